//! Randomized invariants across modules, at generic anisotropies and
//! spectral parameters.

use a2n2::chain::{hamiltonian, transfer_matrix};
use a2n2::kmatrix::{bybe_residual, dual_residual};
use a2n2::qgroup::{generators, symmetry_residual};
use a2n2::rmatrix::ybe_residual;
use a2n2::tensor::{kron, relative_residual};
use a2n2::{BoundarySet, ModelParams, Operator, C64};
use proptest::prelude::*;

fn spectral() -> impl Strategy<Value = C64> {
    (-1.5..1.5f64, -1.5..1.5f64).prop_map(|(re, im)| C64::new(re, im))
}

/// Anisotropies away from zero and from the real axis.
fn anisotropy() -> impl Strategy<Value = C64> {
    (-0.1..0.1f64, 0.05..0.4f64, any::<bool>()).prop_map(|(re, im, flip)| C64::new(re, if flip { -im } else { im }))
}

fn set() -> impl Strategy<Value = BoundarySet> {
    prop_oneof![Just(BoundarySet::I), Just(BoundarySet::II)]
}

fn operator(dim: usize) -> impl Strategy<Value = Operator> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim)
        .prop_map(move |v| Operator::from_fn(dim, |i, j| C64::new(v[i * dim + j].0, v[i * dim + j].1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn yang_baxter(n in 1usize..=2, eta in anisotropy(), u in spectral(), v in spectral()) {
        let p = ModelParams::new(n, 2, eta, BoundarySet::I).unwrap();
        prop_assert!(ybe_residual(u, v, &p) < 1e-9);
    }

    #[test]
    fn reflection_equations(n in 1usize..=2, eta in anisotropy(), s in set(), u in spectral(), v in spectral()) {
        let p = ModelParams::new(n, 2, eta, s).unwrap();
        prop_assert!(bybe_residual(u, v, &p) < 1e-9);
        prop_assert!(dual_residual(u, v, &p) < 1e-9);
    }

    #[test]
    fn transfer_matrices_commute(eta in anisotropy(), s in set(), u in spectral(), v in spectral()) {
        let p = ModelParams::new(1, 2, eta, s).unwrap();
        let (tu, tv) = (transfer_matrix(u, &p).unwrap(), transfer_matrix(v, &p).unwrap());
        let scale = (tu.norm() * tv.norm()).max(1.0);
        prop_assert!(tu.commutator(&tv).norm() / scale < 1e-10);
    }

    #[test]
    fn hamiltonian_symmetry(n in 1usize..=2, eta in anisotropy(), s in set()) {
        let p = ModelParams::new(n, 2, eta, s).unwrap();
        let cop = generators(&p).nfold_coproduct_with_cap(p.sites, 1024).unwrap();
        prop_assert!(symmetry_residual(&cop, &hamiltonian(&p).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn kron_mixed_product(a in operator(2), b in operator(3), c in operator(2), d in operator(3)) {
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(relative_residual(&lhs, &rhs) < 1e-13);
    }
}
