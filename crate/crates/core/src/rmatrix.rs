//! The A2n(2) R-matrix, its companion matrices `V` and `M`, and the checks of
//! its defining identities.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::params::ModelParams;
use crate::report::{Check, Report};
use crate::tensor::{kron, partial_transpose, permutation_operator, relative_residual, site_embed, Operator};

/// Default tolerance for the identity checks.
pub const PROPERTY_TOLERANCE: f64 = 1e-9;

/// `ξ(u) = 2 sinh(u/2 − 2η) cosh(u/2 − (2n+1)η)`.
pub fn xi(u: C64, p: &ModelParams) -> C64 {
    xi_generic(u, p)
}

fn xi_generic<T: Scalar>(u: T, p: &ModelParams) -> T {
    let half = u.scale(C64::new(0.5, 0.0));
    let two_n1 = (2 * p.rank + 1) as f64;
    T::real(2.0)
        * (half - T::constant(p.eta_times(2.0))).sinh()
        * (half - T::constant(p.eta_times(two_n1))).cosh()
}

fn check_index(alpha: usize, p: &ModelParams) -> Result<()> {
    let d = p.local_dim();
    if alpha == 0 || alpha > d {
        Err(Error::IndexOutOfRange { index: alpha, dim: d })
    } else {
        Ok(())
    }
}

/// `α′ = 2n + 2 − α`.
pub fn conjugate_index(alpha: usize, p: &ModelParams) -> Result<usize> {
    check_index(alpha, p)?;
    Ok(2 * p.rank + 2 - alpha)
}

/// `ᾱ`: `α + ½` below the middle index, `α` at it, `α − ½` above it.
pub fn bar_index(alpha: usize, p: &ModelParams) -> Result<f64> {
    check_index(alpha, p)?;
    Ok(bar(alpha, p.rank))
}

fn bar(alpha: usize, n: usize) -> f64 {
    let a = alpha as f64;
    match alpha.cmp(&(n + 1)) {
        std::cmp::Ordering::Less => a + 0.5,
        std::cmp::Ordering::Equal => a,
        std::cmp::Ordering::Greater => a - 0.5,
    }
}

/// Coefficient of `e_{αα}⊗e_{αα}` (α ≠ α′).
fn coeff_c<T: Scalar>(u: T, p: &ModelParams) -> T {
    let half = u.scale(C64::new(0.5, 0.0));
    T::real(2.0)
        * (half - T::constant(p.eta_times(2.0))).sinh()
        * (half - T::constant(p.eta_times((2 * p.rank + 1) as f64))).cosh()
}

/// Coefficient of `e_{αα}⊗e_{ββ}` (β ∉ {α, α′}).
fn coeff_b<T: Scalar>(u: T, p: &ModelParams) -> T {
    let half = u.scale(C64::new(0.5, 0.0));
    T::real(2.0) * half.sinh() * (half - T::constant(p.eta_times((2 * p.rank + 1) as f64))).cosh()
}

/// Coefficient of `e_{αβ}⊗e_{βα}` for α < β, β ≠ α′.
fn coeff_e<T: Scalar>(u: T, p: &ModelParams) -> T {
    let half = u.scale(C64::new(0.5, 0.0));
    T::real(-2.0)
        * (-half).exp()
        * T::constant(p.eta_times(2.0).sinh())
        * (half - T::constant(p.eta_times((2 * p.rank + 1) as f64))).cosh()
}

/// Coefficient of `e_{αβ}⊗e_{βα}` for α > β, β ≠ α′.
fn coeff_e_bar<T: Scalar>(u: T, p: &ModelParams) -> T {
    u.exp() * coeff_e(u, p)
}

/// Coefficient of `e_{αβ}⊗e_{α′β′}`.
fn coeff_a<T: Scalar>(u: T, alpha: usize, beta: usize, p: &ModelParams) -> T {
    let n = p.n_f();
    let eta = p.eta;
    let conj = |a: usize| 2 * p.rank + 2 - a;
    let c = |x: f64| T::constant(eta * x);
    let sh = |x: f64| T::constant((eta * x).sinh());
    let ch = |x: f64| T::constant((eta * x).cosh());
    let ex = |x: f64| T::constant((eta * x).exp());
    let half = u.scale(C64::new(0.5, 0.0));
    let sinh2 = sh(2.0);
    let (ab, bb) = (bar(alpha, p.rank), bar(beta, p.rank));
    let b = beta as f64;
    if alpha == beta && alpha != conj(alpha) {
        (u - c(2.0 * n - 1.0)).sinh() + sh(2.0 * n - 1.0)
    } else if alpha == beta {
        (u - c(2.0 * n + 1.0)).sinh() + sh(2.0 * n + 1.0) + sh(2.0 * n - 1.0) - sh(2.0 * n + 3.0)
    } else if alpha < beta && alpha != conj(beta) {
        T::real(-2.0) * ex(2.0 * n + 1.0 + 2.0 * (ab - bb)) * (-half).exp() * half.sinh() * sinh2
    } else if alpha < beta {
        T::real(2.0) * ex(2.0 * (2.0 * n + 1.0) - 2.0 * b + 2.0) * (-u).exp() * sh(2.0 * n + 3.0 - 2.0 * b) * sinh2
            - T::real(2.0) * ex(2.0 * n + 3.0 - 2.0 * b) * ch(2.0 * (2.0 * n + 2.0) - 2.0 * b) * sinh2
    } else if alpha != conj(beta) {
        T::real(2.0) * ex(-(2.0 * n + 1.0) + 2.0 * (ab - bb)) * half.exp() * half.sinh() * sinh2
    } else {
        T::real(2.0) * (u - c(2.0 * b)).exp() * sh(2.0 * n + 1.0 - 2.0 * b) * sinh2
            - T::real(2.0) * ex(2.0 * n + 1.0 - 2.0 * b) * ch(2.0 * b) * sinh2
    }
}

/// Nonzero entries `(row, col, value)` of `R(u)` with 0-based indices into
/// `V⊗V`; `e_{αβ}⊗e_{γδ}` sits at `((α−1)d + γ−1, (β−1)d + δ−1)`.
pub(crate) fn r_entries<T: Scalar>(u: T, p: &ModelParams) -> Vec<(usize, usize, T)> {
    let d = p.local_dim();
    let conj = |a: usize| 2 * p.rank + 2 - a;
    let idx = |a: usize, b: usize, c: usize, e: usize| ((a - 1) * d + (c - 1), (b - 1) * d + (e - 1));
    let mut out: Vec<(usize, usize, T)> = Vec::with_capacity(3 * d * d);
    let mut push = |(r, c): (usize, usize), v: T| {
        if let Some(slot) = out.iter_mut().find(|(rr, cc, _)| *rr == r && *cc == c) {
            slot.2 = slot.2 + v;
        } else {
            out.push((r, c, v));
        }
    };
    let (cu, bu, eu, ebu) = (coeff_c(u, p), coeff_b(u, p), coeff_e(u, p), coeff_e_bar(u, p));
    for a in 1..=d {
        if a != conj(a) {
            push(idx(a, a, a, a), cu);
        }
        for b in 1..=d {
            if b != a && b != conj(a) {
                push(idx(a, a, b, b), bu);
            }
            if a < b && a != conj(b) {
                push(idx(a, b, b, a), eu);
            }
            if a > b && a != conj(b) {
                push(idx(a, b, b, a), ebu);
            }
        }
    }
    for a in 1..=d {
        for b in 1..=d {
            push(idx(a, b, conj(a), conj(b)), coeff_a(u, a, b, p));
        }
    }
    out
}

fn assemble(entries: Vec<(usize, usize, C64)>, d: usize) -> Operator {
    let mut m = Operator::zeros(d * d);
    for (r, c, v) in entries {
        m.set(r, c, m.get(r, c) + v);
    }
    m.with_sites(vec![d, d]).expect("d*d factors")
}

/// `R₁₂(u)` on `V⊗V`.
pub fn r_matrix(u: C64, p: &ModelParams) -> Operator {
    assemble(r_entries(u, p), p.local_dim())
}

/// Analytic derivative `R′(0)`.
pub fn r_prime_zero(p: &ModelParams) -> Operator {
    r_prime(C64::new(0.0, 0.0), p)
}

/// Analytic derivative `R′(u)`.
pub fn r_prime(u: C64, p: &ModelParams) -> Operator {
    let entries = r_entries(Jet::variable(u), p).into_iter().map(|(r, c, j)| (r, c, j.slope)).collect();
    assemble(entries, p.local_dim())
}

/// Crossing matrix `V` (anti-diagonal).
pub fn v_matrix(p: &ModelParams) -> Operator {
    let d = p.local_dim();
    let n = p.n_f();
    let mut v = Operator::zeros(d);
    for a in 1..=d {
        let ap = 2 * p.rank + 2 - a;
        let val = match a.cmp(&ap) {
            std::cmp::Ordering::Equal => C64::new(1.0, 0.0),
            std::cmp::Ordering::Less => p.eta_times(-(2.0 * n + 1.0) + 2.0 * a as f64).exp(),
            std::cmp::Ordering::Greater => p.eta_times(2.0 * n + 1.0 - 2.0 * ap as f64).exp(),
        };
        v.set(a - 1, ap - 1, val);
    }
    v
}

/// `M = diag(e^{4(n+1−ᾱ)η})`.
pub fn m_matrix(p: &ModelParams) -> Operator {
    let n = p.n_f();
    let diag: Vec<C64> = (1..=p.local_dim()).map(|a| p.eta_times(4.0 * (n + 1.0 - bar(a, p.rank))).exp()).collect();
    Operator::diagonal(&diag)
}

/// Rank-one projector `R(−ρ) / ((2n+1) ξ(0))`.
pub fn crossing_projector(p: &ModelParams) -> Operator {
    let norm = C64::new(p.local_dim() as f64, 0.0) * xi(C64::new(0.0, 0.0), p);
    r_matrix(-p.rho(), p).scale(norm.inv())
}

/// `R₂₁(u) = P R₁₂(u) P`.
pub fn r21(u: C64, p: &ModelParams) -> Operator {
    let perm = permutation_operator(p.local_dim());
    &(&perm * &r_matrix(u, p)) * &perm
}

/// Yang–Baxter residual on `V⊗V⊗V` at `(u, v)`.
pub fn ybe_residual(u: C64, v: C64, p: &ModelParams) -> f64 {
    let d = p.local_dim();
    let r12 = site_embed(&r_matrix(u - v, p), &[1, 2], 3, d).expect("valid sites");
    let r13 = site_embed(&r_matrix(u, p), &[1, 3], 3, d).expect("valid sites");
    let r23 = site_embed(&r_matrix(v, p), &[2, 3], 3, d).expect("valid sites");
    let lhs = &(&r12 * &r13) * &r23;
    let rhs = &(&r23 * &r13) * &r12;
    relative_residual(&lhs, &rhs)
}

/// Residuals of the R-matrix identities (Yang–Baxter, PT symmetry,
/// unitarity, regularity, both crossing forms, and the `V`-conjugation rule)
/// at each sample pair.
pub fn property_report(p: &ModelParams, samples: &[(C64, C64)]) -> Report {
    property_report_with_tolerance(p, samples, PROPERTY_TOLERANCE)
}

pub fn property_report_with_tolerance(p: &ModelParams, samples: &[(C64, C64)], tol: f64) -> Report {
    let d = p.local_dim();
    let perm = permutation_operator(d);
    let v = v_matrix(p);
    let id = Operator::identity(d);
    let v1 = kron(&v, &id);
    let v2 = kron(&id, &v);
    let v2t = kron(&id, &v.transpose());
    let rho = p.rho();
    let mut ybe = Check::new("yang_baxter", tol);
    let mut pt = Check::new("pt_symmetry", tol);
    let mut unitarity = Check::new("unitarity", tol);
    let mut crossing1 = Check::new("crossing_first", tol);
    let mut crossing2 = Check::new("crossing_second", tol);
    let mut v_rule = Check::new("v_conjugation", tol);
    for &(u, w) in samples {
        ybe.record(ybe_residual(u, w, p));
        let r = r_matrix(u, p);
        let r21u = &(&perm * &r) * &perm;
        let full_t = partial_transpose(&partial_transpose(&r, 1).expect("two factors"), 2).expect("two factors");
        pt.record(relative_residual(&r21u, &full_t));
        let r21m = r21(-u, p);
        let unit = Operator::identity(d * d).scale(xi(u, p) * xi(-u, p));
        unitarity.record(relative_residual(&(&r * &r21m), &unit));
        let rc = r_matrix(-u - rho, p);
        let c1 = &(&v1 * &partial_transpose(&rc, 2).expect("two factors")) * &v1;
        crossing1.record(relative_residual(&r, &c1));
        let c2 = &(&v2t * &partial_transpose(&rc, 1).expect("two factors")) * &v2t;
        crossing2.record(relative_residual(&r, &c2));
        v_rule.record(relative_residual(&(&(&v1 * &r) * &v1), &(&(&v2 * &r21u) * &v2)));
    }
    let zero = C64::new(0.0, 0.0);
    let regularity = Check::single(
        "regularity",
        relative_residual(&r_matrix(zero, p), &perm.scale(xi(zero, p))),
        tol,
    );
    let mut report = Report::default();
    for c in [ybe, pt, unitarity, regularity, crossing1, crossing2, v_rule] {
        report.push(c);
    }
    report
}

/// Idempotency, sandwich-rule and asymmetry residuals of the crossing
/// projector. The sandwich rule is tested against the supplied operator.
pub fn projector_report(p: &ModelParams, probe: &Operator, tol: f64) -> Report {
    let proj = crossing_projector(p);
    let d = p.local_dim();
    let perm = permutation_operator(d);
    let mut report = Report::default();
    report.push(Check::single("projector_idempotent", relative_residual(&(&proj * &proj), &proj), tol));
    let lhs = &(&proj * probe) * &proj;
    let rhs = proj.scale((&proj * probe).trace());
    report.push(Check::single("projector_sandwich", relative_residual(&lhs, &rhs), tol));
    let closed = {
        let v1 = kron(&v_matrix(p), &Operator::identity(d));
        (&(&v1 * &partial_transpose(&perm, 2).expect("two factors")) * &v1).scale(C64::new(1.0 / d as f64, 0.0))
    };
    report.push(Check::single("projector_closed_form", relative_residual(&proj, &closed), tol));
    let p21 = &(&perm * &proj) * &perm;
    let full_t = partial_transpose(&partial_transpose(&proj, 1).expect("two factors"), 2).expect("two factors");
    report.push(Check::single("projector_transpose_rule", relative_residual(&p21, &full_t), tol));
    report
}
