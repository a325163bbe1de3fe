//! Double-row transfer matrix, two-site Hamiltonians and the open-chain
//! Hamiltonians for both boundary sets.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmatrix::{k_minus, k_minus_prime_zero, k_plus, BoundaryData};
use crate::params::{BoundarySet, ModelParams};
use crate::report::{Check, Report};
use crate::rmatrix::{m_matrix, r_matrix, r_prime_zero, xi};
use crate::tensor::{
    kron, num_derivative, partial_trace, permutation_operator, relative_residual, site_embed, LocalOperator, Operator,
    DERIVATIVE_STEP,
};

/// Default cap on the chain dimension `(2n+1)^N` for transfer-matrix and
/// Hamiltonian assembly.
pub const DEFAULT_CHAIN_CAP: usize = 1024;

/// Two-site operators and normalization constants of one model.
#[derive(Clone, Debug)]
pub struct ChainOperators {
    pub params: ModelParams,
    pub h2: Operator,
    /// Present for set II only.
    pub h2_tilde: Option<Operator>,
    pub c1: C64,
    pub c2: C64,
}

impl ChainOperators {
    pub fn new(p: &ModelParams) -> Self {
        let (c1, c2) = normalization_constants(p);
        Self {
            params: *p,
            h2: two_site_h(p),
            h2_tilde: two_site_h_tilde(p).ok(),
            c1,
            c2,
        }
    }
}

/// `h = P R′(0) / ξ(0)`.
pub fn two_site_h(p: &ModelParams) -> Operator {
    let perm = permutation_operator(p.local_dim());
    (&perm * &r_prime_zero(p)).scale(xi(C64::new(0.0, 0.0), p).inv())
}

/// `h̃ = h + (K′(0)⊗I − I⊗K′(0)) / 2κ` (set II only).
pub fn two_site_h_tilde(p: &ModelParams) -> Result<Operator> {
    if p.boundary != BoundarySet::II {
        return Err(Error::WrongBoundarySet { expected: "II" });
    }
    let d = p.local_dim();
    let kd = k_minus_prime_zero(p);
    let id = Operator::identity(d);
    let kappa = BoundaryData::new(p).kappa;
    let boundary = (&kron(&kd, &id) - &kron(&id, &kd)).scale((2.0 * kappa).inv());
    Ok(&two_site_h(p) + &boundary)
}

fn check_cap(p: &ModelParams, cap: usize) -> Result<()> {
    let dim = p.chain_dim();
    if dim > cap {
        Err(Error::DimensionCap { dim, cap })
    } else {
        Ok(())
    }
}

/// Sum of a two-site operator over all nearest-neighbour bonds.
pub fn bond_sum(h: &Operator, p: &ModelParams) -> Result<Operator> {
    let d = p.local_dim();
    let n_sites = p.sites;
    let mut total = Operator::zeros(p.chain_dim());
    for k in 1..n_sites {
        total = &total + &site_embed(h, &[k, k + 1], n_sites, d)?;
    }
    total.with_sites(vec![d; n_sites])
}

/// Open-chain Hamiltonian: `Σ h` for set I, `Σ h̃ + (μ/2κ) U_N` for set II.
pub fn hamiltonian(p: &ModelParams) -> Result<Operator> {
    hamiltonian_with_cap(p, DEFAULT_CHAIN_CAP)
}

pub fn hamiltonian_with_cap(p: &ModelParams, cap: usize) -> Result<Operator> {
    check_cap(p, cap)?;
    match p.boundary {
        BoundarySet::I => bond_sum(&two_site_h(p), p),
        BoundarySet::II => {
            let data = BoundaryData::new(p);
            let d = p.local_dim();
            let sum = bond_sum(&two_site_h_tilde(p)?, p)?;
            let edge = site_embed(&data.u_matrix(d), &[p.sites], p.sites, d)?;
            Ok(&sum + &edge.scale(data.mu / (2.0 * data.kappa)))
        }
    }
}

/// `(c₁, c₂)` with `H = t′(0)/c₁ + c₂·I`.
pub fn normalization_constants(p: &ModelParams) -> (C64, C64) {
    let n = p.n_f();
    let big_n = p.sites as i32;
    let e = |k: f64| p.eta_times(k);
    let i = C64::i();
    match p.boundary {
        BoundarySet::I => {
            let c1 = 4f64.powi(big_n + 1)
                * e(2.0 * n + 1.0).sinh()
                * e(2.0 * n - 1.0).cosh()
                * e(2.0).sinh().powi(2 * big_n - 1)
                * e(2.0 * n + 1.0).cosh().powi(2 * big_n);
            let c2 = e(6.0 * n + 1.0).cosh() / (2.0 * e(4.0 * n + 2.0).sinh() * e(2.0 * n - 1.0).cosh());
            (c1, c2)
        }
        BoundarySet::II => {
            let w = p.eta.cosh() + i * e(2.0 * n).sinh();
            let c1 = 2f64.powi(2 * big_n + 1)
                * w
                * w
                * e(4.0 * n + 2.0).sinh()
                * e(2.0 * n + 3.0).cosh()
                * (e(2.0).sinh() * e(2.0 * n + 1.0).cosh()).powi(2 * big_n - 1);
            let c2 = e(6.0 * n + 5.0).cosh() / (2.0 * e(4.0 * n + 2.0).sinh() * e(2.0 * n + 3.0).cosh())
                + i * e(2.0 * n).cosh() / w;
            (c1, c2)
        }
    }
}

/// The `2N + 2` factors of the double-row product on the `(N+1)`-slot space
/// (quantum sites first, auxiliary slot last), in the order they act on a
/// vector: `R_{Na} … R_{1a}`, `K⁻_a`, `R_{a1} … R_{aN}`, `K⁺_a`.
fn double_row_factors(u: C64, p: &ModelParams) -> Vec<LocalOperator> {
    let d = p.local_dim();
    let n_sites = p.sites;
    let slots = n_sites + 1;
    let aux = n_sites;
    let r = r_matrix(u, p);
    let mut factors = Vec::with_capacity(2 * n_sites + 2);
    for k in (0..n_sites).rev() {
        factors.push(LocalOperator::new(&r, vec![k, aux], slots, d));
    }
    factors.push(LocalOperator::new(&k_minus(u, p), vec![aux], slots, d));
    for k in 0..n_sites {
        factors.push(LocalOperator::new(&r, vec![aux, k], slots, d));
    }
    factors.push(LocalOperator::new(&k_plus(u, p), vec![aux], slots, d));
    // Product order: t = tr_a K⁺ T K⁻ T̂ with T = R_{aN}…R_{a1}, T̂ = R_{1a}…R_{Na};
    // acting on a vector, T̂'s rightmost factor R_{Na} comes first.
    factors
}

/// `t(u) = tr_a K⁺_a(u) T_a(u) K⁻_a(u) T̂_a(u)` with
/// `T_a = R_{aN}⋯R_{a1}` and `T̂_a = R_{1a}⋯R_{Na}`.
pub fn transfer_matrix(u: C64, p: &ModelParams) -> Result<Operator> {
    transfer_matrix_with_cap(u, p, DEFAULT_CHAIN_CAP)
}

pub fn transfer_matrix_with_cap(u: C64, p: &ModelParams, cap: usize) -> Result<Operator> {
    check_cap(p, cap)?;
    let d = p.local_dim();
    let dim = p.chain_dim();
    let factors = double_row_factors(u, p);
    let columns: Vec<Vec<C64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut col = vec![C64::new(0.0, 0.0); dim];
            for alpha in 0..d {
                let mut x = vec![C64::new(0.0, 0.0); dim * d];
                x[j * d + alpha] = C64::new(1.0, 0.0);
                for f in &factors {
                    x = f.apply(&x);
                }
                for (i, c) in col.iter_mut().enumerate() {
                    *c += x[i * d + alpha];
                }
            }
            col
        })
        .collect();
    let t = Operator::from_fn(dim, |i, j| columns[j][i]);
    t.with_sites(vec![d; p.sites])
}

/// Dense reference assembly of `t(u)` from embedded factors on the full
/// `(N+1)`-slot space followed by a partial trace over the auxiliary slot.
/// Only practical for small chains; used as an oracle.
pub fn transfer_matrix_dense(u: C64, p: &ModelParams) -> Result<Operator> {
    let d = p.local_dim();
    let slots = p.sites + 1;
    let aux = slots;
    let r = r_matrix(u, p);
    let mut x = site_embed(&k_plus(u, p), &[aux], slots, d)?;
    for k in (1..=p.sites).rev() {
        x = &x * &site_embed(&r, &[aux, k], slots, d)?;
    }
    x = &x * &site_embed(&k_minus(u, p), &[aux], slots, d)?;
    for k in 1..=p.sites {
        x = &x * &site_embed(&r, &[k, aux], slots, d)?;
    }
    let dim = p.chain_dim();
    let t = Operator::from_fn(dim, |i, j| (0..d).map(|a| x.get(i * d + a, j * d + a)).sum());
    t.with_sites(vec![d; p.sites])
}

/// `t′(0)` by finite differences.
pub fn transfer_derivative_zero(p: &ModelParams) -> Result<Operator> {
    check_cap(p, DEFAULT_CHAIN_CAP)?;
    Ok(num_derivative(|u| transfer_matrix(u, p).expect("cap checked"), C64::new(0.0, 0.0), DERIVATIVE_STEP))
}

/// Relative residual of `H = t′(0)/c₁ + c₂·I`.
pub fn hamiltonian_transfer_residual(p: &ModelParams) -> Result<f64> {
    let h = hamiltonian(p)?;
    let (c1, c2) = normalization_constants(p);
    let from_t = &transfer_derivative_zero(p)?.scale(c1.inv()) + &Operator::identity(p.chain_dim()).scale(c2);
    Ok(relative_residual(&h, &from_t))
}

/// `tr₀ M₀ h_{N0}` as an operator on site `N` (set I boundary term).
pub fn set_one_boundary_term(p: &ModelParams) -> Operator {
    let d = p.local_dim();
    let m0 = kron(&Operator::identity(d), &m_matrix(p));
    partial_trace(&(&m0 * &two_site_h(p)), 2).expect("two-factor operator")
}

/// Deviation of the set I boundary term from a multiple of the identity:
/// off-diagonal maximum and diagonal spread after dividing by the first
/// diagonal entry.
pub fn set_one_boundary_triviality(p: &ModelParams) -> (f64, f64) {
    let b = set_one_boundary_term(&p.with_boundary(BoundarySet::I));
    let ratio = b.scale(b.get(0, 0).inv());
    let d = ratio.dim();
    let mut off: f64 = 0.0;
    let mut spread: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i == j {
                spread = spread.max((ratio.get(i, i) - C64::new(1.0, 0.0)).norm());
            } else {
                off = off.max(ratio.get(i, j).norm());
            }
        }
    }
    (off, spread)
}

/// Commutativity, symmetry and `[H, t]` checks of the transfer matrix at
/// the given sample pairs.
pub fn transfer_report(p: &ModelParams, samples: &[(C64, C64)], tol: f64) -> Result<Report> {
    let h = hamiltonian(p)?;
    let mut commute = Check::new("transfer_commutativity", tol);
    let mut with_h = Check::new("hamiltonian_commutes_with_transfer", tol);
    let mut symmetric = Check::new("transfer_symmetric", tol);
    for &(u, v) in samples {
        let tu = transfer_matrix(u, p)?;
        let tv = transfer_matrix(v, p)?;
        let scale = (tu.norm() * tv.norm()).max(1.0);
        commute.record(tu.commutator(&tv).norm() / scale);
        with_h.record(h.commutator(&tu).norm() / (h.norm() * tu.norm()).max(1.0));
        symmetric.record((&tu - &tu.transpose()).norm() / tu.norm().max(1.0));
    }
    let mut report = Report::default();
    report.push(commute);
    report.push(with_h);
    report.push(symmetric);
    Ok(report)
}

/// Serializable summary of the chain-level checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainSummary {
    pub c1: C64,
    pub c2: C64,
    pub report: Report,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::BoundarySet::{I, II};
    use crate::sampling::{disk_points, sample_pairs};
    use crate::tensor::eigenvalues;

    fn params(n: usize, sites: usize, set: BoundarySet) -> ModelParams {
        ModelParams::reference(n, sites, set)
    }

    fn degeneracies(m: &Operator) -> Vec<usize> {
        let mut vals = eigenvalues(m).unwrap();
        vals.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut groups: Vec<(C64, usize)> = Vec::new();
        for v in vals {
            match groups.iter_mut().find(|(c, _)| (c - v).norm() < 1e-8) {
                Some(g) => g.1 += 1,
                None => groups.push((v, 1)),
            }
        }
        let mut degs: Vec<usize> = groups.into_iter().map(|g| g.1).collect();
        degs.sort_unstable_by(|a, b| b.cmp(a));
        degs
    }

    #[test]
    fn two_site_h_matches_finite_difference() {
        let p = params(2, 2, I);
        let fd = num_derivative(|u| r_matrix(u, &p), C64::new(0.0, 0.0), DERIVATIVE_STEP);
        let h_fd = (&permutation_operator(5) * &fd).scale(xi(C64::new(0.0, 0.0), &p).inv());
        assert!((&h_fd - &two_site_h(&p)).max_abs() < 1e-8);
    }

    #[test]
    fn hermiticity() {
        let real = ModelParams::new(1, 2, C64::new(0.3, 0.0), I).unwrap();
        let h = hamiltonian(&real).unwrap();
        assert!((&h - &h.adjoint()).max_abs() < 1e-12);
        let h = hamiltonian(&params(1, 2, I)).unwrap();
        assert!((&h - &h.adjoint()).max_abs() > 1e-3);
    }

    #[test]
    fn h_tilde_rules() {
        let p = params(1, 3, II);
        let ht = two_site_h_tilde(&p).unwrap();
        let h = two_site_h(&p);
        assert!((ht.trace() - h.trace()).norm() < 1e-12);
        let kd = k_minus_prime_zero(&p);
        let kappa = BoundaryData::new(&p).kappa;
        let edges = &site_embed(&kd, &[1], 3, 3).unwrap() - &site_embed(&kd, &[3], 3, 3).unwrap();
        let want = &bond_sum(&h, &p).unwrap() + &edges.scale((2.0 * kappa).inv());
        assert!((&bond_sum(&ht, &p).unwrap() - &want).max_abs() < 1e-12);
        assert!(two_site_h_tilde(&params(1, 3, I)).is_err());
    }

    #[test]
    fn small_chain_degeneracies() {
        assert_eq!(degeneracies(&hamiltonian(&params(1, 2, I)).unwrap()), vec![5, 3, 1]);
        assert_eq!(degeneracies(&hamiltonian(&params(1, 2, II)).unwrap()), vec![3, 2, 2, 1, 1]);
        let p = params(1, 2, II);
        let data = BoundaryData::new(&p);
        let direct = &two_site_h_tilde(&p).unwrap()
            + &site_embed(&data.u_matrix(3), &[2], 2, 3).unwrap().scale(data.mu / (2.0 * data.kappa));
        assert!((&direct - &hamiltonian(&p).unwrap()).max_abs() < 1e-14);
    }

    #[test]
    fn sparse_transfer_matches_dense_assembly() {
        for set in [I, II] {
            for (n, sites) in [(1, 1), (1, 2), (2, 2)] {
                let p = params(n, sites, set);
                let u = C64::new(0.41, -0.27);
                let sparse = transfer_matrix(u, &p).unwrap();
                let dense = transfer_matrix_dense(u, &p).unwrap();
                assert!(relative_residual(&sparse, &dense) < 1e-13, "{set} n={n} N={sites}");
            }
        }
    }

    #[test]
    fn transfer_properties() {
        for set in [I, II] {
            for (n, sites) in [(1, 2), (1, 3), (2, 2)] {
                let p = params(n, sites, set);
                let report = transfer_report(&p, &sample_pairs(77, 5), 1e-8).unwrap();
                assert!(report.pass(), "{set} n={n} N={sites}: {report:#?}");
            }
        }
    }

    #[test]
    fn hamiltonian_from_transfer() {
        for set in [I, II] {
            for n in 1..=2 {
                let r = hamiltonian_transfer_residual(&params(n, 2, set)).unwrap();
                assert!(r < 1e-6, "{set} n={n}: {r}");
            }
        }
    }

    #[test]
    fn constants() {
        let p = params(1, 2, I);
        let e = p.eta;
        let want = (e * 7.0).cosh() / (2.0 * (e * 6.0).sinh() * e.cosh());
        assert!((normalization_constants(&p).1 - want).norm() < 1e-15);
        for n in 1..=3 {
            for set in [I, II] {
                assert!(normalization_constants(&params(n, 2, set)).0.norm() > 0.0);
            }
        }
    }

    #[test]
    fn set_one_boundary_term_trivial() {
        for n in 1..=3 {
            let (off, spread) = set_one_boundary_triviality(&params(n, 2, I));
            assert!(off < 1e-10 && spread < 1e-10, "n={n}: {off} {spread}");
        }
    }

    #[test]
    fn cap_enforced() {
        let p = params(3, 4, I);
        assert!(matches!(transfer_matrix(C64::new(0.1, 0.0), &p), Err(Error::DimensionCap { .. })));
        assert!(matches!(hamiltonian(&p), Err(Error::DimensionCap { .. })));
        assert!(disk_points(0, 1, 1.0).len() == 1);
    }
}
