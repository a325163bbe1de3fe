//! Diagonal boundary K-matrices for the two boundary sets, the reflection
//! equations, and the boundary identity used to simplify the Hamiltonian.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::params::{BoundarySet, ModelParams};
use crate::report::{Check, Report};
use crate::rmatrix::{m_matrix, r21, r_matrix, v_matrix, xi};
use crate::tensor::{kron, num_derivative, partial_trace, permutation_operator, relative_residual, Operator, DERIVATIVE_STEP};

/// Entries below this magnitude cannot anchor the boundary-identity fit.
pub const FIT_THRESHOLD: f64 = 1e-8;

/// Regularity constant and boundary-term coefficients of a boundary set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub set: BoundarySet,
    /// `K⁻(0) = κ·I`.
    pub kappa: C64,
    /// Coefficient of `U` in the `V`-sandwich of `K⁻′(0)`; zero for set I.
    pub mu: C64,
    /// Coefficient of `I` in the `V`-sandwich of `K⁻′(0)`; zero for set I.
    pub nu: C64,
    /// Index (1-based) of the middle basis state; `U = e_{mm}`.
    pub middle: usize,
}

impl BoundaryData {
    pub fn new(p: &ModelParams) -> Self {
        let middle = p.rank + 1;
        match p.boundary {
            BoundarySet::I => Self {
                set: BoundarySet::I,
                kappa: C64::new(1.0, 0.0),
                mu: C64::new(0.0, 0.0),
                nu: C64::new(0.0, 0.0),
                middle,
            },
            BoundarySet::II => Self { set: BoundarySet::II, kappa: kappa(p), mu: mu(p), nu: nu(p), middle },
        }
    }

    /// `U = e_{n+1,n+1}`.
    pub fn u_matrix(&self, d: usize) -> Operator {
        let mut u = Operator::zeros(d);
        u.set(self.middle - 1, self.middle - 1, C64::new(1.0, 0.0));
        u
    }
}

/// `κ = i cosh η − sinh(2nη)` (set II regularity constant).
pub fn kappa(p: &ModelParams) -> C64 {
    C64::i() * p.eta.cosh() - p.eta_times(2.0 * p.n_f()).sinh()
}

/// `μ = 2(i sinh η − cosh 2nη)`.
pub fn mu(p: &ModelParams) -> C64 {
    2.0 * (C64::i() * p.eta.sinh() - p.eta_times(2.0 * p.n_f()).cosh())
}

/// `ν = 2 cosh 2nη`.
pub fn nu(p: &ModelParams) -> C64 {
    2.0 * p.eta_times(2.0 * p.n_f()).cosh()
}

/// Diagonal entries of the set II matrix `K(u)` (with `ε = +1`).
pub(crate) fn k_diagonal<T: Scalar>(u: T, p: &ModelParams) -> Vec<T> {
    let n = p.rank;
    let i = C64::i();
    let outer = T::constant(i * p.eta.cosh()) + (u - T::constant(p.eta_times(2.0 * n as f64))).sinh();
    let middle = (u + T::constant(p.eta)).cosh().scale(i) - T::constant(p.eta_times(2.0 * n as f64).sinh());
    (1..=2 * n + 1)
        .map(|j| {
            if j <= n {
                (-u).exp() * outer
            } else if j == n + 1 {
                middle
            } else {
                u.exp() * outer
            }
        })
        .collect()
}

/// `K⁻(u)`: identity for set I, `K(u)` for set II.
pub fn k_minus(u: C64, p: &ModelParams) -> Operator {
    match p.boundary {
        BoundarySet::I => Operator::identity(p.local_dim()),
        BoundarySet::II => Operator::diagonal(&k_diagonal(u, p)),
    }
}

/// `K⁺(u) = K⁻ᵗ(−u−ρ)·M`.
pub fn k_plus(u: C64, p: &ModelParams) -> Operator {
    match p.boundary {
        BoundarySet::I => m_matrix(p),
        BoundarySet::II => &k_minus(-u - p.rho(), p).transpose() * &m_matrix(p),
    }
}

/// Analytic `K⁻′(0)` (zero for set I).
pub fn k_minus_prime_zero(p: &ModelParams) -> Operator {
    match p.boundary {
        BoundarySet::I => Operator::zeros(p.local_dim()),
        BoundarySet::II => {
            let slopes: Vec<C64> = k_diagonal(Jet::variable(C64::new(0.0, 0.0)), p).iter().map(|j| j.slope).collect();
            Operator::diagonal(&slopes)
        }
    }
}

/// Relative residual of the boundary Yang–Baxter equation at `(u, v)`.
pub fn bybe_residual(u: C64, v: C64, p: &ModelParams) -> f64 {
    let d = p.local_dim();
    let id = Operator::identity(d);
    let k1 = kron(&k_minus(u, p), &id);
    let k2 = kron(&id, &k_minus(v, p));
    let lhs = &(&(&r_matrix(u - v, p) * &k1) * &r21(u + v, p)) * &k2;
    let rhs = &(&(&k2 * &r_matrix(u + v, p)) * &k1) * &r21(u - v, p);
    relative_residual(&lhs, &rhs)
}

/// Relative residual of the dual reflection equation satisfied by `K⁺`.
pub fn dual_residual(u: C64, v: C64, p: &ModelParams) -> f64 {
    let d = p.local_dim();
    let id = Operator::identity(d);
    let rho = p.rho();
    let m = m_matrix(p);
    let m_inv = Operator::diagonal(&m.diag().iter().map(|x| x.inv()).collect::<Vec<_>>());
    let m1 = kron(&m, &id);
    let m1_inv = kron(&m_inv, &id);
    let kp1 = kron(&k_plus(u, p).transpose(), &id);
    let kp2 = kron(&id, &k_plus(v, p).transpose());
    let far = -u - v - rho * 2.0;
    let lhs = &(&(&(&(&r_matrix(-u + v, p) * &kp1) * &m1_inv) * &r21(far, p)) * &m1) * &kp2;
    let rhs = &(&(&(&(&kp2 * &m1) * &r_matrix(far, p)) * &m1_inv) * &kp1) * &r21(-u + v, p);
    relative_residual(&lhs, &rhs)
}

/// Scalar extracted from the boundary identity at one spectral parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFit {
    pub f: C64,
    /// `‖LHS − f·V K⁻ V‖ / ‖LHS‖`.
    pub residual: f64,
}

/// `tr₁ K₁⁺(u) P₁₂ R₂₁(2u)`.
pub fn boundary_identity_lhs(u: C64, p: &ModelParams) -> Operator {
    let d = p.local_dim();
    let kp1 = kron(&k_plus(u, p), &Operator::identity(d));
    let prod = &(&kp1 * &permutation_operator(d)) * &r21(u * 2.0, p);
    partial_trace(&prod, 1).expect("two-factor operator")
}

/// Fits `f(u)` in `tr₁ K₁⁺(u) P₁₂ R₂₁(2u) = f(u) V K⁻ᵗ(u) V` from the
/// largest-magnitude entry of the right-hand matrix, and reports how well
/// the remaining entries agree.
pub fn boundary_identity_fit(u: C64, p: &ModelParams) -> Result<BoundaryFit> {
    let lhs = boundary_identity_lhs(u, p);
    let v = v_matrix(p);
    let rhs = &(&v * &k_minus(u, p).transpose()) * &v;
    let d = p.local_dim();
    let (mut best, mut best_abs) = ((0, 0), 0.0);
    for i in 0..d {
        for j in 0..d {
            let a = rhs.get(i, j).norm();
            if a > best_abs {
                best_abs = a;
                best = (i, j);
            }
        }
    }
    if best_abs <= FIT_THRESHOLD {
        return Err(Error::DegenerateFit { threshold: FIT_THRESHOLD });
    }
    let f = lhs.get(best.0, best.1) / rhs.get(best.0, best.1);
    let scale = lhs.norm();
    let residual = if scale == 0.0 { 0.0 } else { (&lhs - &rhs.scale(f)).norm() / scale };
    Ok(BoundaryFit { f, residual })
}

/// Closed form of the fitted scalar at `u = 0`: `ξ(0) tr K⁺(0) / κ`.
pub fn boundary_fit_at_zero(p: &ModelParams) -> C64 {
    let zero = C64::new(0.0, 0.0);
    xi(zero, p) * k_plus(zero, p).trace() / BoundaryData::new(p).kappa
}

/// Checks `V K⁻′(0) V = −K⁻′(0) + μU + νI` for set II, together with the
/// finite-difference cross-check of the analytic derivative.
pub fn v_sandwich_check(p: &ModelParams, tol: f64) -> Result<Report> {
    if p.boundary != BoundarySet::II {
        return Err(Error::WrongBoundarySet { expected: "II" });
    }
    let data = BoundaryData::new(p);
    let d = p.local_dim();
    let kd = k_minus_prime_zero(p);
    let v = v_matrix(p);
    let lhs = &(&v * &kd) * &v;
    let rhs = &(&(-&kd) + &data.u_matrix(d).scale(data.mu)) + &Operator::identity(d).scale(data.nu);
    let fd = num_derivative(|u| k_minus(u, p), C64::new(0.0, 0.0), DERIVATIVE_STEP);
    // The U coefficient read off entrywise: (VK′V + K′)_{mm} − ν.
    let m = data.middle - 1;
    let mu_extracted = lhs.get(m, m) + kd.get(m, m) - data.nu;
    let mut report = Report::default();
    report.push(Check::single("v_sandwich", relative_residual(&lhs, &rhs), tol));
    report.push(Check::single("k_prime_finite_difference", (&fd - &kd).max_abs(), 1e-8));
    report.push(Check::single("mu_extracted", (mu_extracted - data.mu).norm(), tol));
    Ok(report)
}

/// Reflection-equation and boundary-identity checks at the given samples.
pub fn reflection_report(p: &ModelParams, samples: &[(C64, C64)], tol: f64) -> Report {
    let mut bybe = Check::new("bybe", tol);
    let mut dual = Check::new("dual_reflection", tol);
    let mut fit = Check::new("boundary_identity", tol);
    for &(u, v) in samples {
        bybe.record(bybe_residual(u, v, p));
        dual.record(dual_residual(u, v, p));
        if let Ok(bf) = boundary_identity_fit(u, p) {
            fit.record(bf.residual);
        }
    }
    let zero = C64::new(0.0, 0.0);
    let mut report = Report::default();
    report.push(bybe);
    report.push(dual);
    report.push(fit);
    let regular = relative_residual(&k_minus(zero, p), &Operator::identity(p.local_dim()).scale(BoundaryData::new(p).kappa));
    report.push(Check::single("k_regularity", regular, tol));
    if let Ok(bf) = boundary_identity_fit(zero, p) {
        let closed = boundary_fit_at_zero(p);
        report.push(Check::single("boundary_fit_at_zero", (bf.f - closed).norm() / closed.norm().max(1.0), tol));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{disk_points, sample_pairs};

    fn params(n: usize, set: BoundarySet) -> ModelParams {
        ModelParams::reference(n, 2, set)
    }

    #[test]
    fn set_one_matrices() {
        let p = params(2, BoundarySet::I);
        for u in disk_points(1, 3, 2.0) {
            assert_eq!(k_minus(u, &p).matrix(), Operator::identity(5).matrix());
            assert_eq!(k_plus(u, &p).matrix(), m_matrix(&p).matrix());
        }
    }

    #[test]
    fn set_two_regularity_and_entries() {
        let p = params(1, BoundarySet::II);
        let zero = C64::new(0.0, 0.0);
        let kap = C64::i() * p.eta.cosh() - (p.eta * 2.0).sinh();
        assert!((&k_minus(zero, &p) - &Operator::identity(3).scale(kap)).max_abs() < 1e-15);
        let u = C64::new(0.5, 0.0);
        let k2 = C64::i() * (u + p.eta).cosh() - (p.eta * 2.0).sinh();
        assert!((k_minus(u, &p).get(1, 1) - k2).norm() < 1e-15);
        let at_rho = k_plus(-p.rho(), &p);
        assert!((&at_rho - &m_matrix(&p).scale(kap)).max_abs() < 1e-14);
    }

    #[test]
    fn k_plus_diagonal() {
        for n in 1..=3 {
            let p = params(n, BoundarySet::II);
            for u in disk_points(2, 4, 2.0) {
                assert!(k_plus(u, &p).is_diagonal(0.0));
            }
        }
    }

    #[test]
    fn reflection_equations() {
        for set in [BoundarySet::I, BoundarySet::II] {
            for n in 1..=3 {
                let p = params(n, set);
                let samples = sample_pairs(40 + n as u64, 10);
                let report = reflection_report(&p, &samples, 1e-9);
                assert!(report.pass(), "{set} n={n}: {report:#?}");
            }
        }
    }

    #[test]
    fn bybe_at_coincident_points() {
        let p = params(2, BoundarySet::II);
        let u = C64::new(0.3, 0.1);
        assert!(bybe_residual(u, u, &p) < 1e-12);
        assert!(bybe_residual(C64::new(0.0, 0.0), C64::new(0.0, 0.0), &p) < 1e-12);
        assert!(bybe_residual(u, -u, &params(1, BoundarySet::I)) < 1e-10);
    }

    #[test]
    fn boundary_identity() {
        for set in [BoundarySet::I, BoundarySet::II] {
            for n in 1..=2 {
                let p = params(n, set);
                let bf = boundary_identity_fit(C64::new(0.0, 0.0), &p).unwrap();
                assert!((bf.f - boundary_fit_at_zero(&p)).norm() < 1e-9);
                for u in disk_points(9, 5, 2.0) {
                    let fit = boundary_identity_fit(u, &p).unwrap();
                    assert!(fit.residual < 1e-8, "{set} n={n} u={u}: {}", fit.residual);
                }
            }
        }
        let p = params(1, BoundarySet::I);
        for u in disk_points(10, 3, 1.5) {
            let lhs = boundary_identity_lhs(u, &p);
            let s = lhs.get(0, 0);
            assert!((&lhs - &Operator::identity(3).scale(s)).max_abs() < 1e-10 * s.norm().max(1.0));
        }
    }

    #[test]
    fn v_sandwich() {
        for n in 1..=3 {
            let report = v_sandwich_check(&params(n, BoundarySet::II), 1e-9).unwrap();
            assert!(report.pass(), "n={n}: {report:#?}");
        }
        assert_eq!(
            v_sandwich_check(&params(1, BoundarySet::I), 1e-9),
            Err(Error::WrongBoundarySet { expected: "II" })
        );
    }
}
