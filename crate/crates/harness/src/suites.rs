//! Randomized identity suites for the algebra and for the spectral operators.

use crate::fields::{self, random_multivector, random_unitish_vector, random_vector, uniform, HarnessRng};
use crate::report::{Bound, ReportRow};
use dirac_beltrami::clifford::{
    self, b_op, cliff_neg, cliff_pos, euler_op, grade_of, hodge_left, hodge_right, inner, lcontract, rcontract,
    rotor_conjugate, vector_inverse, wedge, Multivector, Signature,
};
use dirac_beltrami::gridfield::{GridSpec, MultivectorGridField};
use dirac_beltrami::linmaps::{self, cayley, exterior_extend, grassmann_dual, ExteriorMap, VectorMap};
use dirac_beltrami::spectral;
use dirac_beltrami::Result;
use rand::Rng;

/// Absolute tolerance of every algebra identity on unit-scaled inputs.
pub const ALGEBRA_TOL: f64 = 1e-10;
/// Relative tolerance of every operator identity.
pub const OPERATOR_TOL: f64 = 1e-9;

/// One randomized case: the error and, when `dump` is set, the inputs.
type CaseFn = fn(usize, &mut HarnessRng, bool) -> Result<(f64, String)>;

fn dump(on: bool, f: impl FnOnce() -> String) -> String {
    if on {
        f()
    } else {
        String::new()
    }
}

fn diff(a: &Multivector, b: &Multivector) -> f64 {
    a.max_abs_diff(b)
}

fn add(a: &Multivector, b: &Multivector) -> Multivector {
    let c: Vec<f64> = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x + y).collect();
    Multivector::from_coeffs(a.dim(), &c).expect("same dim")
}

fn random_homogeneous(dim: usize, k: usize, rng: &mut HarnessRng) -> Multivector {
    random_multivector(dim, rng).grade_project(k)
}

fn riesz_left(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let v = random_vector(n, rng);
    let w = random_multivector(n, rng);
    let vw = add(&lcontract(&v, &w)?, &wedge(&v, &w)?);
    let e1 = diff(&cliff_pos(&v, &w)?, &vw);
    let neg = add(&lcontract(&v, &w)?.scale(-1.0), &wedge(&v, &w)?);
    let e2 = diff(&cliff_neg(&v, &w)?, &neg);
    Ok((e1.max(e2), dump(d, || format!("v = {v:?}, w = {w:?}"))))
}

fn riesz_right(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let v = random_vector(n, rng);
    let w = random_multivector(n, rng);
    let pos = add(&rcontract(&w, &v)?, &wedge(&w, &v)?);
    let e1 = diff(&cliff_pos(&w, &v)?, &pos);
    let neg = add(&rcontract(&w, &v)?.scale(-1.0), &wedge(&w, &v)?);
    let e2 = diff(&cliff_neg(&w, &v)?, &neg);
    Ok((e1.max(e2), dump(d, || format!("v = {v:?}, w = {w:?}"))))
}

fn anticommute_mixed(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let u = random_vector(n, rng);
    let v = random_vector(n, rng);
    let w = random_multivector(n, rng);
    let lhs = cliff_pos(&u, &cliff_neg(&v, &w)?)?;
    let rhs = cliff_neg(&v, &cliff_pos(&u, &w)?)?.scale(-1.0);
    Ok((diff(&lhs, &rhs), dump(d, || format!("u = {u:?}, v = {v:?}, w = {w:?}"))))
}

fn anticommute_swap(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let v = random_vector(n, rng);
    let w = random_multivector(n, rng);
    let e = diff(&cliff_pos(&v, &w)?, &cliff_neg(&w.involution(), &v)?);
    Ok((e, dump(d, || format!("v = {v:?}, w = {w:?}"))))
}

fn hodge_star(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let w = random_multivector(n, rng);
    let twisted = grade_sign_map(&w, |k| if (k * (n - k)).is_multiple_of(2) { 1.0 } else { -1.0 });
    let ev = Multivector::volume(n);
    let errs = [
        diff(&hodge_left(&hodge_right(&w)), &w),
        diff(&hodge_right(&hodge_left(&w)), &w),
        diff(&hodge_left(&hodge_left(&w)), &twisted),
        diff(&hodge_right(&hodge_right(&w)), &twisted),
        diff(&hodge_left(&w), &cliff_pos(&ev, &w.reversion())?),
        diff(&hodge_right(&w), &cliff_pos(&w.reversion(), &ev)?),
    ];
    Ok((errs.iter().copied().fold(0.0, f64::max), dump(d, || format!("w = {w:?}"))))
}

fn grade_sign_map(w: &Multivector, sign: impl Fn(usize) -> f64) -> Multivector {
    let c: Vec<f64> = w.coeffs().iter().enumerate().map(|(s, x)| sign(grade_of(s)) * x).collect();
    Multivector::from_coeffs(w.dim(), &c).expect("same dim")
}

/// `★★w = ŵ = w★★` as literally stated; true for even `n` only.
fn hodge_double_star_literal(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let w = random_multivector(n, rng);
    let hat = w.involution();
    let e = diff(&hodge_left(&hodge_left(&w)), &hat).max(diff(&hodge_right(&hodge_right(&w)), &hat));
    Ok((e, dump(d, || format!("w = {w:?}"))))
}

/// `(w₁ ∧ (★w₂))★ = ⟨w₁, w₂⟩` as literally stated; holds up to the sign
/// `(−1)^{k(n−k)}`, so it fails for even `n` and odd `k`.
fn hodge_pairing_literal(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let k = rng.random_range(0..=n);
    let w1 = random_homogeneous(n, k, rng);
    let w2 = random_homogeneous(n, k, rng);
    let s = Multivector::scalar(n, inner(&w1, &w2)?);
    let e = diff(&hodge_right(&wedge(&w1, &hodge_left(&w2))?), &s);
    Ok((e, dump(d, || format!("w1 = {w1:?}, w2 = {w2:?}"))))
}

fn hodge_pairing(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let k = rng.random_range(0..=n);
    let w1 = random_homogeneous(n, k, rng);
    let w2 = random_homogeneous(n, k, rng);
    let ip = inner(&w1, &w2)?;
    let a = hodge_right(&wedge(&hodge_left(&w2), &w1)?);
    let b = hodge_right(&wedge(&w1, &hodge_right(&w2))?);
    let s = Multivector::scalar(n, ip);
    Ok((diff(&a, &s).max(diff(&b, &s)), dump(d, || format!("w1 = {w1:?}, w2 = {w2:?}"))))
}

fn norm_product(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let v = random_vector(n, rng);
    let w = random_multivector(n, rng);
    let target = v.norm() * w.norm();
    let e1 = (cliff_pos(&v, &w)?.norm() - target).abs();
    let e2 = (cliff_pos(&w, &v)?.norm() - target).abs();
    let e3 = (cliff_neg(&v, &w)?.norm() - target).abs();
    Ok((e1.max(e2).max(e3), dump(d, || format!("v = {v:?}, w = {w:?}"))))
}

fn reflection_matrix(v: &Multivector) -> VectorMap {
    let n = v.dim();
    let c = v.vector_part();
    let r2 = v.norm_sqr();
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            e[i * n + j] = if i == j { 1.0 } else { 0.0 } - 2.0 * c[i] * c[j] / r2;
        }
    }
    VectorMap::from_row_slice(n, &e).expect("n×n")
}

fn reflection(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let v = random_unitish_vector(n, rng);
    let w = random_multivector(n, rng);
    let ext = exterior_extend(&reflection_matrix(&v)).apply(&w)?;
    let clif = cliff_pos(&cliff_pos(&v, &w.involution())?, &vector_inverse(&v, Signature::Pos)?)?;
    let e = diff(&ext, &clif).max(diff(&ext, &rotor_conjugate(&v, &w)?));
    Ok((e, dump(d, || format!("v = {v:?}, w = {w:?}"))))
}

fn rotor(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let k = rng.random_range(2..=4);
    let vs: Vec<Multivector> = (0..k).map(|_| random_unitish_vector(n, rng)).collect();
    let w = random_multivector(n, rng);
    let mut q = Multivector::scalar(n, 1.0);
    let mut t = VectorMap::identity(n);
    for v in &vs {
        q = cliff_pos(&q, v)?;
        t = t.compose(&reflection_matrix(v))?;
    }
    let e = diff(&rotor_conjugate(&q, &w)?, &exterior_extend(&t).apply(&w)?);
    Ok((e, dump(d, || format!("vectors = {vs:?}, w = {w:?}"))))
}

fn b_eigenvalues(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let w = random_multivector(n, rng);
    let mut e: f64 = 0.0;
    for k in 0..=n {
        let wk = w.grade_project(k);
        let lambda = n as f64 - 2.0 * k as f64;
        e = e.max(diff(&b_op(&wk), &wk.scale(lambda)));
    }
    let via_euler = add(&w.scale(n as f64), &euler_op(&w).scale(-2.0));
    e = e.max(diff(&b_op(&w), &via_euler));
    Ok((e, dump(d, || format!("w = {w:?}"))))
}

fn cayley_identities(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let t = fields::random_positive(n, rng);
    let x: Vec<f64> = (0..n).map(|_| uniform(rng)).collect();
    let tx = t.apply(&x);
    let y: Vec<f64> = x.iter().zip(&tx).map(|(a, b)| a + b).collect();
    let cy = cayley(&t)?.apply(&y);
    let mut e: f64 = 0.0;
    for i in 0..n {
        e = e.max((cy[i] - (x[i] - tx[i])).abs());
        e = e.max((x[i] - 0.5 * (y[i] + cy[i])).abs());
        e = e.max((tx[i] - 0.5 * (y[i] - cy[i])).abs());
    }
    e = e.max(cayley(&cayley(&t)?)?.max_abs_diff(&t));
    Ok((e, dump(d, || format!("T = {:?}, x = {x:?}", t.to_row_vec()))))
}

/// Positivity of `T` against `‖𝒞(T)‖ < 1`; the error is 1 on disagreement.
/// Cases within `1e−9` of the boundary on either side count as agreeing.
fn cayley_contraction(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let shift = 1.5 * uniform(rng);
    let t = fields::random_matrix(n, rng).add(&VectorMap::scaled_identity(n, shift));
    let q = t.min_quadratic_form();
    let e = match cayley(&t) {
        Ok(c) => {
            let norm = linmaps::operator_norm(&c);
            let near = q.abs() < 1e-9 || (norm - 1.0).abs() < 1e-9;
            if near || (q > 0.0) == (norm < 1.0) {
                0.0
            } else {
                1.0
            }
        }
        Err(_) if q <= 1e-9 => 0.0,
        Err(e) => return Err(e),
    };
    Ok((e, dump(d, || format!("T = {:?}, min ⟨Tx,x⟩ = {q}", t.to_row_vec()))))
}

fn cofactor(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let t = fields::random_matrix(n, rng);
    let lhs = grassmann_dual(&exterior_extend(&t)).compose(&exterior_extend(&t.transpose()))?;
    let rhs = ExteriorMap::identity(n).scale(t.det());
    Ok((lhs.max_abs_diff(&rhs), dump(d, || format!("T = {:?}", t.to_row_vec()))))
}

fn grassmann_dual_props(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let s = fields::random_matrix(n, rng);
    let t = fields::random_matrix(n, rng);
    let (es, et) = (exterior_extend(&s), exterior_extend(&t));
    let ev = Multivector::volume(n);
    let dual_t = grassmann_dual(&et);
    let errs = [
        grassmann_dual(&dual_t).max_abs_diff(&et),
        diff(&dual_t.apply(&ev)?, &ev),
        grassmann_dual(&es.compose(&et)?).max_abs_diff(&grassmann_dual(&es).compose(&dual_t)?),
        grassmann_dual(&ExteriorMap::identity(n)).max_abs_diff(&ExteriorMap::identity(n)),
    ];
    Ok((
        errs.iter().copied().fold(0.0, f64::max),
        dump(d, || format!("S = {:?}, T = {:?}", s.to_row_vec(), t.to_row_vec())),
    ))
}

fn cayley_inverse_normal(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let t = fields::random_normal(n, rng);
    let e = cayley(&t.inverse()?)?.max_abs_diff(&cayley(&t)?.scale(-1.0));
    Ok((e, dump(d, || format!("T = {:?}", t.to_row_vec()))))
}

/// Named algebra identities in suite order.
pub const ALGEBRA_IDENTITIES: [(&str, CaseFn); 18] = [
    ("riesz-left", riesz_left),
    ("riesz-right", riesz_right),
    ("anticommute-mixed", anticommute_mixed),
    ("anticommute-swap", anticommute_swap),
    ("hodge-star", hodge_star),
    ("hodge-pairing", hodge_pairing),
    ("clifford-norm", norm_product),
    ("reflection", reflection),
    ("rotor", rotor),
    ("b-eigenvalues", b_eigenvalues),
    ("cayley-identities", cayley_identities),
    ("cayley-contraction", cayley_contraction),
    ("cofactor", cofactor),
    ("grassmann-dual", grassmann_dual_props),
    ("cayley-inverse-normal", cayley_inverse_normal),
    ("product-associative", product_associative),
    ("hodge-double-star-literal", hodge_double_star_literal),
    ("hodge-pairing-literal", hodge_pairing_literal),
];

pub use crate::report::is_literal_check;

fn product_associative(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
    let a = random_multivector(n, rng);
    let b = random_multivector(n, rng);
    let c = random_multivector(n, rng);
    let mut e: f64 = 0.0;
    for sig in [Signature::Pos, Signature::Neg] {
        let l = clifford::product(&clifford::product(&a, &b, sig)?, &c, sig)?;
        let r = clifford::product(&a, &clifford::product(&b, &c, sig)?, sig)?;
        e = e.max(diff(&l, &r));
    }
    Ok((e, dump(d, || format!("a = {a:?}, b = {b:?}, c = {c:?}"))))
}

/// Run one identity for `trials` cases in dimension `n`. The worst case is
/// replayed to record its inputs when it fails.
pub fn run_identity(name: &str, case: CaseFn, n: usize, trials: usize, seed: u64) -> ReportRow {
    let params = format!("n={n};trials={trials}");
    let mut rng = fields::rng(seed ^ ((n as u64) << 32) ^ fnv(name));
    let mut worst = (0.0f64, None);
    for _ in 0..trials {
        let state = rng.clone();
        match case(n, &mut rng, false) {
            Ok((e, _)) if e.is_nan() || e > worst.0 => {
                worst = (if e.is_nan() { f64::INFINITY } else { e }, Some(state))
            }
            Ok(_) => {}
            Err(err) => return ReportRow::failed("algebra", name, &params, seed, err),
        }
    }
    let row = ReportRow::new("algebra", name, &params, worst.0, Bound::AtMost(ALGEBRA_TOL), seed);
    match (row.pass, worst.1) {
        (false, Some(mut state)) => {
            let inputs = case(n, &mut state, true).map(|r| r.1).unwrap_or_default();
            row.with_note(format!("counterexample {inputs}"))
        }
        _ => row,
    }
}

/// Every algebra identity in every requested dimension.
pub fn algebra_suite(dims: &[usize], trials: usize, seed: u64) -> Vec<ReportRow> {
    if trials == 0 {
        log::warn!("trials = 0: the algebra suite passes vacuously");
    }
    let mut rows = Vec::new();
    for &n in dims {
        for (name, case) in ALGEBRA_IDENTITIES {
            rows.push(run_identity(name, case, n, trials, seed));
        }
    }
    rows
}

/// FNV-1a hash, used to give each identity its own stream.
fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn rel(a: &MultivectorGridField, b: &MultivectorGridField) -> Result<f64> {
    let den = a.l2_norm()?.max(b.l2_norm()?);
    let num = a.sub(b)?.l2_norm()?;
    Ok(if den > 0.0 { num / den } else { num })
}

/// Operator identities on band-limited random fields.
pub fn operator_suite(spec: GridSpec, seed: u64) -> Result<Vec<ReportRow>> {
    let params = format!("n={};N={};L={}", spec.dim(), spec.points_per_axis(), spec.box_length());
    let mut rng = fields::rng(seed ^ fnv("operators") ^ spec.dim() as u64);
    let f = fields::random_field(spec, &mut rng, |_| true)?;
    let g = fields::random_field(spec, &mut rng, |_| true)?;
    let f0 = f.mean_project();
    let n = spec.dim();
    let alpha = fields::random_field(spec, &mut rng, |s| grade_of(s) < n)?;
    let beta = fields::random_field(spec, &mut rng, |s| grade_of(s) > 0)?;

    let mut out = Vec::new();
    let mut push = |check: &str, value: f64| {
        out.push(ReportRow::new("operators", check, &params, value, Bound::AtMost(OPERATOR_TOL), seed));
    };

    let sf = spectral::beurling(&f)?;
    push("beurling-involution", rel(&spectral::beurling(&sf)?, &f)?);
    let sf0 = spectral::beurling(&f0)?;
    push("beurling-isometry", (sf0.l2_norm()? - f0.l2_norm()?).abs() / f0.l2_norm()?);
    let da = spectral::d(&alpha)?;
    push("beurling-exact", rel(&spectral::beurling(&da)?, &da)?);
    let db = spectral::delta(&beta)?;
    push("beurling-coexact", rel(&spectral::beurling(&db)?, &db.scale(-1.0))?);
    let lhs = spectral::beurling(&f0.hodge_left()?)?;
    let rhs = sf0.hodge_left()?.scale(-1.0);
    let lhs_r = spectral::beurling(&f0.hodge_right()?)?;
    let rhs_r = sf0.hodge_right()?.scale(-1.0);
    push("beurling-star", rel(&lhs, &rhs)?.max(rel(&lhs_r, &rhs_r)?));
    let sym = (spectral::beurling(&f)?.inner(&g)? - f.inner(&spectral::beurling(&g)?)?).abs()
        / (f.l2_norm()? * g.l2_norm()?);
    push("beurling-self-adjoint", sym);
    push("beurling-hodge-route", rel(&sf, &spectral::beurling_hodge(&f)?)?);
    push("cauchy-right-inverse", rel(&spectral::dplus(&spectral::cauchy_plus(&f)?)?, &f0)?);
    push("cauchy-left-inverse", rel(&spectral::cauchy_plus(&spectral::dplus(&f)?)?, &f0)?);
    let (a, b) = spectral::dirac_of_cauchy_check(&f)?;
    push("dirac-cauchy-beurling", a.max(b));
    let hat = f0.involution();
    let literal = spectral::riesz_pos(&spectral::riesz_pos_right(&hat)?)?.scale(-1.0);
    let literal2 = spectral::riesz_pos_right(&spectral::riesz_pos(&hat)?)?.scale(-1.0);
    push("factorization-literal", rel(&sf0, &literal)?.max(rel(&sf0, &literal2)?));
    push("factorization-corrected", rel(&sf0, &literal.scale(-1.0))?.max(rel(&sf0, &literal2.scale(-1.0))?));
    let (s1, s2) = spectral::star_conjugation_check(&f)?;
    push("star-dirac", s1.max(s2));
    let hat_star = f.involution().hodge_right()?;
    let literal_star = rel(&spectral::dplus(&f)?.hodge_right()?, &spectral::dminus(&hat_star)?)?;
    push("star-dirac-literal", literal_star.max(s2));
    let nl = spectral::null_lagrangian(&f)?.abs() / (spectral::d(&f)?.l2_norm()? * spectral::delta(&f)?.l2_norm()?);
    push("null-lagrangian", nl);
    let scalar = fields::random_field(spec, &mut rng, |s| s == 0)?.mean_project();
    push("riesz-square", rel(&spectral::riesz_pos(&spectral::riesz_pos(&scalar)?)?, &scalar.scale(-1.0))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_identity_passes_small_run() {
        for n in 2..=6 {
            for (name, case) in ALGEBRA_IDENTITIES.into_iter().filter(|(name, _)| !is_literal_check(name)) {
                let row = run_identity(name, case, n, 50, 1);
                assert!(row.pass, "{}", row.line());
            }
        }
    }

    fn flipped_riesz(n: usize, rng: &mut HarnessRng, d: bool) -> Result<(f64, String)> {
        let v = random_vector(n, rng);
        let w = random_multivector(n, rng);
        let wrong = add(&lcontract(&v, &w)?.scale(-1.0), &wedge(&v, &w)?);
        Ok((diff(&cliff_pos(&v, &w)?, &wrong), dump(d, || format!("v = {v:?}, w = {w:?}"))))
    }

    #[test]
    fn sign_bug_is_named_with_counterexample() {
        let row = run_identity("riesz-left", flipped_riesz, 3, 20, 4);
        assert!(!row.pass);
        assert_eq!(row.check, "riesz-left");
        assert!(row.note.starts_with("counterexample v = "));
    }

    #[test]
    fn literal_statements_fail_where_expected() {
        let even = run_identity("hodge-double-star-literal", hodge_double_star_literal, 4, 50, 1);
        let odd = run_identity("hodge-double-star-literal", hodge_double_star_literal, 3, 50, 1);
        assert!(even.pass && !odd.pass);
        assert!(!run_identity("hodge-pairing-literal", hodge_pairing_literal, 4, 50, 1).pass);
    }

    #[test]
    fn zero_trials_pass_vacuously() {
        assert!(algebra_suite(&[2], 0, 1).iter().all(|r| r.pass));
    }

    #[test]
    fn small_operator_suite() {
        let rows = operator_suite(GridSpec::new(2, 32, 1.0).unwrap(), 3).unwrap();
        for r in rows.iter().filter(|r| !is_literal_check(&r.check)) {
            assert!(r.pass, "{}", r.line());
        }
    }
}
