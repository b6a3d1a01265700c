use dirac_beltrami::clifford::{wedge, Multivector};
use dirac_beltrami::linmaps::{
    cayley, exterior_extend, grassmann_dual, is_self_dual, operator_norm, ExteriorMap, VectorMap,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = VectorMap> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |e| VectorMap::from_row_slice(n, &e).unwrap())
}

fn any_matrix() -> impl Strategy<Value = VectorMap> {
    (2usize..=5).prop_flat_map(matrix)
}

fn spd(n: usize) -> impl Strategy<Value = VectorMap> {
    matrix(n).prop_map(move |b| b.compose(&b.transpose()).unwrap().add(&VectorMap::scaled_identity(n, 0.1)))
}

/// `Q D Qᵀ` with `D` of 2×2 rotation-scaling blocks and a trailing positive
/// entry in odd dimension.
fn normal(n: usize) -> impl Strategy<Value = VectorMap> {
    (matrix(n), prop::collection::vec((0.2f64..1.5, -1.0f64..1.0), n)).prop_map(move |(g, blocks)| {
        let q = g.add(&VectorMap::scaled_identity(n, 3.0)).matrix().clone().qr().q();
        let mut d = DMatrix::zeros(n, n);
        let mut i = 0;
        while i + 1 < n {
            let (r, t) = blocks[i];
            d[(i, i)] = r * t.cos();
            d[(i + 1, i + 1)] = r * t.cos();
            d[(i, i + 1)] = -r * t.sin();
            d[(i + 1, i)] = r * t.sin();
            i += 2;
        }
        if i < n {
            d[(i, i)] = blocks[i].0;
        }
        VectorMap::from_matrix(&q * d * q.transpose()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn extension_is_multiplicative(((s, t), (u, v)) in (2usize..=5).prop_flat_map(|n| ((matrix(n), matrix(n)), (prop::collection::vec(-1.0f64..1.0, n), prop::collection::vec(-1.0f64..1.0, n))))) {
        let lhs = exterior_extend(&s.compose(&t).unwrap());
        let rhs = exterior_extend(&s).compose(&exterior_extend(&t)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let uv = wedge(&Multivector::vector(&u).unwrap(), &Multivector::vector(&v).unwrap()).unwrap();
        let tu = Multivector::vector(&t.apply(&u)).unwrap();
        let tv = Multivector::vector(&t.apply(&v)).unwrap();
        let image = exterior_extend(&t).apply(&uv).unwrap();
        prop_assert!(image.max_abs_diff(&wedge(&tu, &tv).unwrap()) < 1e-12);
    }

    #[test]
    fn top_block_is_determinant(t in any_matrix()) {
        let n = t.dim();
        let top = exterior_extend(&t).block(n)[(0, 0)];
        prop_assert!((top - t.det()).abs() < 1e-12);
    }

    #[test]
    fn grassmann_dual_properties(t in any_matrix()) {
        let n = t.dim();
        let l = exterior_extend(&t);
        prop_assert!(grassmann_dual(&grassmann_dual(&l)).max_abs_diff(&l) < 1e-12);
        let cof = grassmann_dual(&l).compose(&exterior_extend(&t.transpose())).unwrap();
        prop_assert!(cof.max_abs_diff(&ExteriorMap::identity(n).scale(t.det())) < 1e-11);
    }

    #[test]
    fn cayley_is_an_involution(a in (2usize..=5).prop_flat_map(spd)) {
        let c = cayley(&a).unwrap();
        prop_assert!(cayley(&c).unwrap().max_abs_diff(&a) < 1e-9 * (1.0 + operator_norm(&a)));
        prop_assert!(operator_norm(&c) < 1.0);
    }

    #[test]
    fn cayley_norm_of_normal_map(t in (2usize..=5).prop_flat_map(normal)) {
        let n = t.dim();
        let c = cayley(&t).unwrap();
        let ct_inv = cayley(&t.inverse().unwrap()).unwrap();
        prop_assert!(ct_inv.max_abs_diff(&c.scale(-1.0)) < 1e-10);
        let eig = nalgebra::DMatrix::from_row_slice(n, n, &t.to_row_vec()).complex_eigenvalues();
        let expected = eig.iter().map(|z| ((1.0 - z) / (1.0 + z)).norm()).fold(0.0, f64::max);
        prop_assert!((operator_norm(&c) - expected).abs() < 1e-9);
    }

    #[test]
    fn scaled_rotations_are_self_dual((r, theta) in (0.1f64..3.0, -3.2f64..3.2)) {
        let t = VectorMap::from_row_slice(2, &[r * theta.cos(), -r * theta.sin(), r * theta.sin(), r * theta.cos()]).unwrap();
        prop_assert!(is_self_dual(&t, 1e-10));
    }
}

#[test]
fn unequal_stretch_is_not_self_dual() {
    assert!(!is_self_dual(&VectorMap::diag(&[1.0, 2.0]).unwrap(), 1e-10));
}
