//! The `solve` command: one solve on a named recipe, with a JSON report and
//! field snapshots.

use crate::config::ExperimentConfig;
use crate::experiments;
use crate::fields;
use crate::recipes::Recipe;
use crate::report::{self, Bound, ReportRow};
use dirac_beltrami::clifford::grade_of;
use dirac_beltrami::gridfield::{write_snapshot, GridSpec, MultivectorGridField};
use dirac_beltrami::solver::{self, BeltramiProblem, Coefficient, SolveReport};
use dirac_beltrami::Result;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Serializable form of a solve, written as `solve-<recipe>.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveSummary {
    pub recipe: String,
    pub dim: usize,
    pub points: usize,
    pub box_length: f64,
    pub seed: u64,
    pub tol: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    pub contraction_estimate: f64,
    pub coefficient_bound: f64,
    /// Blade coefficients of `ω`, indexed by bitmask.
    pub harmonic_offset: Vec<f64>,
    /// Relative size of the grid-only harmonic modes of `Φ`.
    pub grid_harmonic: f64,
    pub norm_d: f64,
    pub norm_delta: f64,
    pub norm_f: f64,
    pub distortion_violation_count: usize,
    /// Relative `L²` error against the exact field, for manufactured recipes.
    pub error_vs_exact: Option<f64>,
    pub max_abs_error: Option<f64>,
    pub field_snapshot: PathBuf,
    pub exact_snapshot: Option<PathBuf>,
    pub version: String,
}

/// Field, exact field and solver report of a recipe solve.
pub struct RecipeSolve {
    pub field: MultivectorGridField,
    pub exact: Option<MultivectorGridField>,
    pub report: SolveReport,
}

/// Solve the recipe on `spec`. Manufactured recipes build `Ψ` from a random
/// exact field; the others use `Ψ = (I + ℳ)G` with `G` a random vector
/// field, the source of the second-order reduction.
pub fn solve_recipe(recipe: Recipe, spec: GridSpec, tol: f64, seed: u64) -> Result<RecipeSolve> {
    let mut rng = fields::rng(seed);
    match recipe {
        Recipe::Manufactured(m) => {
            let out = experiments::manufactured_linear(spec, m, tol, &mut rng)?;
            Ok(RecipeSolve { field: out.field, exact: Some(out.exact), report: out.report })
        }
        Recipe::Nonlinear(k) => {
            let out = experiments::manufactured_nonlinear(spec, k, tol, &mut rng)?;
            Ok(RecipeSolve { field: out.field, exact: Some(out.exact), report: out.report })
        }
        _ => {
            let m = recipe.linear_coefficient(spec, &mut rng)?;
            let g = fields::random_field(spec, &mut rng, |s| grade_of(s) == 1)?;
            let psi = g.add(&m.apply(&g)?)?;
            let problem = BeltramiProblem::new(Coefficient::Linear(m), psi).with_tol(tol);
            let (field, report) = solver::neumann_solve(&problem)?;
            Ok(RecipeSolve { field, exact: None, report })
        }
    }
}

fn file_stem(recipe: Recipe, spec: &GridSpec) -> String {
    format!("solve-{recipe}-n{}-N{}", spec.dim(), spec.points_per_axis())
}

/// Run the `solve` command and write its outputs under `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> std::result::Result<(SolveSummary, Vec<ReportRow>), String> {
    let spec = cfg.grid(2, 64).map_err(|e| e.to_string())?;
    let solved = solve_recipe(cfg.recipe, spec, cfg.tol, cfg.seed).map_err(|e| format!("solve failed: {e}"))?;
    let out = &cfg.out;
    let stem = file_stem(cfg.recipe, &spec);
    let field_path = out.join(format!("{stem}.hdgf"));
    let io = |e: dirac_beltrami::Error| e.to_string();
    std::fs::create_dir_all(out).map_err(|e| e.to_string())?;
    write_snapshot(&solved.field, &field_path).map_err(io)?;
    let (error, max_err, exact_path) = match &solved.exact {
        Some(exact) => {
            let p = out.join(format!("{stem}-exact.hdgf"));
            write_snapshot(exact, &p).map_err(io)?;
            let diff = solved.field.sub(exact).map_err(io)?;
            let rel = diff.l2_norm().map_err(io)? / exact.l2_norm().map_err(io)?;
            (Some(rel), Some(diff.max_abs()), Some(p))
        }
        None => (None, None, None),
    };
    let r = &solved.report;
    let summary = SolveSummary {
        recipe: cfg.recipe.to_string(),
        dim: spec.dim(),
        points: spec.points_per_axis(),
        box_length: spec.box_length(),
        seed: cfg.seed,
        tol: cfg.tol,
        iterations: r.iterations,
        residual_history: r.residual_history.clone(),
        final_residual: r.final_residual,
        contraction_estimate: r.contraction_estimate,
        coefficient_bound: r.coefficient_bound,
        harmonic_offset: r.harmonic_offset.coeffs().to_vec(),
        grid_harmonic: r.grid_harmonic,
        norm_d: r.norm_d,
        norm_delta: r.norm_delta,
        norm_f: r.norm_f,
        distortion_violation_count: r.distortion_violation_count,
        error_vs_exact: error,
        max_abs_error: max_err,
        field_snapshot: relative_name(&field_path),
        exact_snapshot: exact_path.as_deref().map(relative_name),
        version: report::CODE_VERSION.to_string(),
    };
    report::write_json(&out.join(format!("{stem}.json")), &summary).map_err(|e| e.to_string())?;
    let rows = summary_rows(&summary, cfg.recipe);
    report::write_csv(&out.join(format!("{stem}.csv")), &rows).map_err(|e| e.to_string())?;
    Ok((summary, rows))
}

fn relative_name(p: &Path) -> PathBuf {
    p.file_name().map(PathBuf::from).unwrap_or_else(|| p.to_path_buf())
}

/// Acceptance rows of a solve: equation residual, observed rate against
/// `M + 0.05`, and the error against the exact field when there is one.
pub fn summary_rows(s: &SolveSummary, recipe: Recipe) -> Vec<ReportRow> {
    let params = format!("recipe={};n={};N={}", s.recipe, s.dim, s.points);
    let mut rows = vec![
        ReportRow::new("solve", "residual", &params, s.final_residual, Bound::AtMost(100.0 * s.tol), s.seed),
        ReportRow::new("solve", "iterations", &params, s.iterations as f64, Bound::Record, s.seed),
    ];
    if s.iterations > 2 {
        rows.push(ReportRow::new(
            "solve",
            "rate",
            &params,
            s.contraction_estimate,
            Bound::AtMost(s.coefficient_bound + 0.05),
            s.seed,
        ));
    }
    if let Some(e) = s.error_vs_exact {
        let bound = if matches!(recipe, Recipe::Nonlinear(_)) { 1e-7 } else { 1e-8 };
        rows.push(ReportRow::new("solve", "error-vs-exact", &params, e, Bound::AtMost(bound), s.seed));
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_recipe_converges_at_once() {
        let spec = GridSpec::new(2, 32, 1.0).unwrap();
        let s = solve_recipe(Recipe::Identity, spec, 1e-10, 3).unwrap();
        assert_eq!(s.report.iterations, 1);
        assert!(s.report.final_residual <= 1e-12, "{}", s.report.final_residual);
    }

    #[test]
    fn checkerboard_rate_within_bound() {
        let spec = GridSpec::new(2, 64, 1.0).unwrap();
        let s = solve_recipe(Recipe::Checkerboard(0.6), spec, 1e-10, 3).unwrap();
        assert!(s.report.contraction_estimate <= 0.65, "{}", s.report.contraction_estimate);
    }

    #[test]
    fn manufactured_recipe_writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            dim: Some(2),
            points: Some(32),
            box_length: 1.0,
            levels: None,
            seed: 11,
            tol: 1e-10,
            trials: 0,
            recipe: Recipe::Manufactured(0.3),
            out: dir.path().to_path_buf(),
        };
        let (summary, rows) = run(&cfg).unwrap();
        assert!(summary.error_vs_exact.unwrap() <= 1e-8);
        assert!(report::all_pass(&rows));
        let stem = "solve-manufactured-M0.3-n2-N32";
        let back = dirac_beltrami::gridfield::read_snapshot(&dir.path().join(format!("{stem}.hdgf"))).unwrap();
        assert_eq!(back.spec().points_per_axis(), 32);
        let json = std::fs::read(dir.path().join(format!("{stem}.json"))).unwrap();
        run(&cfg).unwrap();
        assert_eq!(json, std::fs::read(dir.path().join(format!("{stem}.json"))).unwrap());
    }
}
