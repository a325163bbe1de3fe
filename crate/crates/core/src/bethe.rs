//! Nested Bethe equations, a multi-start Newton solver, and the closed-form
//! transfer-matrix eigenvalue and energy of a Bethe state.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Algebra, ModelParams};
use crate::rep::{tensor_power_decompose, weyl_dimension, IrrepLabel, WeightVector};

/// Newton stops once the largest residual component drops below this.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 200;
/// Step of the complex central differences used for the Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-7;
pub const MAX_JACOBIAN_CONDITION: f64 = 1e12;
/// Two roots of one level closer than this are a collision.
pub const COLLISION_DISTANCE: f64 = 1e-8;
/// Per-coordinate tolerance for comparing canonical configurations.
pub const DEDUP_TOLERANCE: f64 = 1e-6;
/// Generic probe points for comparing `Λ(u)` with transfer-matrix spectra.
pub const PROBES: [C64; 2] = [C64::new(0.37, 0.21), C64::new(0.83, -0.41)];
pub const DEFAULT_SEARCH_SEED: u64 = 7_919;
/// Redraws allowed per random start in [`solve_with_repairs`].
pub const REPAIR_ATTEMPTS: usize = 4;

const POLE_EPS: f64 = 1e-12;
const ESCAPE_RE: f64 = 25.0;
const TIE: f64 = 1e-9;
const TRIVIAL_ROOT: f64 = 1e-6;
const MIN_LINE_STEP: f64 = 1e-4;
/// Largest per-root move in one Newton step.
const MAX_STEP: f64 = 0.5;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn ratio(num: C64, den: C64, what: &'static str) -> Result<C64> {
    if den.norm() < POLE_EPS || !den.is_finite() {
        Err(Error::Pole(what))
    } else {
        Ok(num / den)
    }
}

fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| if z.is_finite() { z.norm() } else { f64::INFINITY }).fold(0.0, f64::max)
}

/// Bethe roots grouped by nesting level. Serializes as a bare list of
/// levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootConfiguration {
    pub levels: Vec<Vec<C64>>,
}

impl RootConfiguration {
    pub fn new(levels: Vec<Vec<C64>>) -> Self {
        Self { levels }
    }

    pub fn empty(rank: usize) -> Self {
        Self { levels: vec![Vec::new(); rank] }
    }

    pub fn rank(&self) -> usize {
        self.levels.len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn root_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn flatten(&self) -> Vec<C64> {
        self.levels.iter().flatten().copied().collect()
    }

    /// Inverse of [`flatten`](Self::flatten) for the given cardinalities.
    pub fn from_flat(m: &[usize], x: &[C64]) -> Self {
        let mut levels = Vec::with_capacity(m.len());
        let mut at = 0;
        for &k in m {
            levels.push(x[at..at + k].to_vec());
            at += k;
        }
        Self { levels }
    }

    fn check_rank(&self, p: &ModelParams) -> Result<()> {
        if self.rank() != p.rank {
            return Err(Error::DimensionMismatch(format!("{} root levels for rank {}", self.rank(), p.rank)));
        }
        Ok(())
    }
}

/// `e_k(u) = sinh(u/2 + kη) / sinh(u/2 − kη)`.
pub fn e_fn(k: f64, u: C64, eta: C64) -> Result<C64> {
    let half = u * 0.5;
    ratio((half + eta * k).sinh(), (half - eta * k).sinh(), "e_k")
}

/// Boundary factor of the last-level equations: 1 for set I, a squared
/// ratio for set II.
pub fn chi_fn(u: C64, p: &ModelParams) -> Result<C64> {
    match p.algebra() {
        Algebra::B => Ok(one()),
        Algebra::C => {
            let shift = C64::new(0.0, PI / 2.0);
            let r = ratio(((u + p.eta - shift) * 0.5).sinh(), ((u - p.eta + shift) * 0.5).sinh(), "chi")?;
            Ok(r * r)
        }
    }
}

/// `LHS/RHS − 1` for every root, level by level. A pole hit by the
/// configuration is reported as [`Error::Pole`].
pub fn bethe_residual(r: &RootConfiguration, p: &ModelParams) -> Result<Vec<C64>> {
    r.check_rank(p)?;
    let n = p.rank;
    let eta = p.eta;
    let ipi = C64::new(0.0, PI);
    let pair = |a: f64, x: C64, y: C64| -> Result<C64> { Ok(e_fn(a, x - y, eta)? * e_fn(a, x + y, eta)?) };
    let mut out = Vec::with_capacity(r.root_count());
    for l in 0..n {
        for (k, &uk) in r.levels[l].iter().enumerate() {
            let mut lhs = one();
            if l == 0 {
                lhs *= e_fn(1.0, uk, eta)?.powu(2 * p.sites as u32);
            }
            if l == n - 1 {
                lhs *= chi_fn(uk, p)?;
            }
            let mut rhs = one();
            if l > 0 {
                for &uj in &r.levels[l - 1] {
                    rhs *= pair(-1.0, uk, uj)?;
                }
            }
            if l + 1 < n {
                for &uj in &r.levels[l + 1] {
                    rhs *= pair(-1.0, uk, uj)?;
                }
            }
            for (j, &uj) in r.levels[l].iter().enumerate() {
                if j == k {
                    continue;
                }
                rhs *= pair(2.0, uk, uj)?;
                if l == n - 1 {
                    rhs *= pair(-1.0, uk + ipi, uj)?;
                }
            }
            out.push(ratio(lhs, rhs, "Bethe equation")? - one());
        }
    }
    Ok(out)
}

/// Largest residual component, `0` for the empty configuration.
pub fn max_residual(r: &RootConfiguration, p: &ModelParams) -> Result<f64> {
    Ok(max_abs(&bethe_residual(r, p)?))
}

/// Representative of `±u + 2πiZ` with `Re ≥ 0` and `Im ∈ [0, 2π)`.
pub fn canonical_root(u: C64) -> C64 {
    let wrap = |im: f64| {
        let r = im.rem_euclid(TAU);
        if TAU - r < COLLISION_DISTANCE {
            0.0
        } else {
            r
        }
    };
    let flip = u.re < -TIE || (u.re.abs() <= TIE && wrap(u.im) > PI + TIE);
    let v = if flip { -u } else { u };
    let re = if v.re.abs() <= TIE { 0.0 } else { v.re };
    C64::new(re, wrap(v.im))
}

fn sort_key(u: &C64) -> (i64, f64) {
    ((u.re / DEDUP_TOLERANCE).round() as i64, u.im)
}

/// Canonical roots, sorted within each level by `(Re, Im)`.
pub fn canonicalize(r: &RootConfiguration) -> RootConfiguration {
    let levels = r
        .levels
        .iter()
        .map(|level| {
            let mut v: Vec<C64> = level.iter().map(|&u| canonical_root(u)).collect();
            v.sort_by(|a, b| {
                let (ka, kb) = (sort_key(a), sort_key(b));
                ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
            });
            v
        })
        .collect();
    RootConfiguration { levels }
}

fn roots_close(a: C64, b: C64, tol: f64) -> bool {
    let dim = (a.im - b.im).abs();
    (a.re - b.re).abs() <= tol && dim.min(TAU - dim) <= tol
}

/// Equality of canonical forms within `tol` per coordinate.
pub fn configurations_equal(a: &RootConfiguration, b: &RootConfiguration, tol: f64) -> bool {
    if a.cardinalities() != b.cardinalities() {
        return false;
    }
    let (ca, cb) = (canonicalize(a), canonicalize(b));
    ca.levels.iter().zip(&cb.levels).all(|(la, lb)| {
        let mut used = vec![false; lb.len()];
        la.iter().all(|&x| match (0..lb.len()).find(|&j| !used[j] && roots_close(x, lb[j], tol)) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        })
    })
}

/// Dynkin label of the Bethe states with cardinalities `m`.
pub fn dynkin_label(m: &[usize], sites: usize, algebra: Algebra) -> Result<IrrepLabel> {
    let n = m.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty cardinality tuple".into()));
    }
    let mi: Vec<i64> = m.iter().map(|&x| x as i64).collect();
    let big_n = sites as i64;
    let last_factor = match algebra {
        Algebra::B => 2,
        Algebra::C => 1,
    };
    let labels: Vec<i64> = if n == 1 {
        vec![last_factor * (big_n - mi[0])]
    } else {
        let mut a = Vec::with_capacity(n);
        a.push(big_n - 2 * mi[0] + mi[1]);
        for i in 1..n - 1 {
            a.push(mi[i - 1] - 2 * mi[i] + mi[i + 1]);
        }
        a.push(last_factor * (mi[n - 2] - mi[n - 1]));
        a
    };
    if labels.iter().any(|&a| a < 0) {
        return Err(Error::Inadmissible { m: m.to_vec(), labels });
    }
    Ok(IrrepLabel::new(algebra, labels.iter().map(|&a| a as u32).collect()))
}

/// All cardinality tuples with nonnegative Dynkin labels, in lexicographic
/// order.
pub fn enumerate_admissible(rank: usize, sites: usize, algebra: Algebra) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut m = vec![0usize; rank];
    loop {
        if dynkin_label(&m, sites, algebra).is_ok() {
            out.push(m.clone());
        }
        let mut i = rank;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if m[i] < sites {
                m[i] += 1;
                m[i + 1..].iter_mut().for_each(|x| *x = 0);
                break;
            }
        }
    }
}

/// Cartan eigenvalues `h₁ = N − m₁`, `hᵢ = m_{i−1} − mᵢ`.
pub fn cartan_weights(m: &[usize], sites: usize) -> WeightVector {
    let h: Vec<i64> = (0..m.len())
        .map(|i| if i == 0 { sites as i64 - m[0] as i64 } else { m[i - 1] as i64 - m[i] as i64 })
        .collect();
    WeightVector::from_integers(&h)
}

/// Number of irreducible summands labelled by `dynkin_label(m)` in the
/// tensor-power decomposition: the number of Bethe solutions expected.
pub fn expected_multiplicity(m: &[usize], p: &ModelParams) -> Result<u64> {
    let label = dynkin_label(m, p.sites, p.algebra())?;
    Ok(tensor_power_decompose(p.rank, p.sites, p.algebra())?.multiplicity(&label))
}

struct Eigenvalue<'a> {
    r: &'a RootConfiguration,
    p: &'a ModelParams,
}

impl Eigenvalue<'_> {
    fn n(&self) -> f64 {
        self.p.n_f()
    }

    fn pair_product(
        &self,
        level: usize,
        x: C64,
        num: (f64, bool),
        den: (f64, bool),
        what: &'static str,
    ) -> Result<C64> {
        let e = self.p.eta;
        let f = |z: C64, (k, hyperbolic_cos): (f64, bool)| {
            let arg = z * 0.5 - e * k;
            if hyperbolic_cos {
                arg.cosh()
            } else {
                arg.sinh()
            }
        };
        let mut acc = one();
        for &v in &self.r.levels[level] {
            acc *= ratio(f(x - v, num) * f(x + v, num), f(x - v, den) * f(x + v, den), what)?;
        }
        Ok(acc)
    }

    fn a(&self, x: C64) -> Result<C64> {
        self.pair_product(0, x, (-1.0, false), (1.0, false), "A")
    }

    fn b(&self, l: usize, x: C64) -> Result<C64> {
        let lf = l as f64;
        Ok(self.pair_product(l - 1, x, (lf + 2.0, false), (lf, false), "B_l")?
            * self.pair_product(l, x, (lf - 1.0, false), (lf + 1.0, false), "B_l")?)
    }

    fn b_last(&self, x: C64) -> Result<C64> {
        let n = self.n();
        let last = self.p.rank - 1;
        Ok(self.pair_product(last, x, (n + 2.0, false), (n, false), "B_n")?
            * self.pair_product(last, x, (n - 1.0, true), (n + 1.0, true), "B_n")?)
    }

    fn z(&self, l: usize, x: C64) -> Result<C64> {
        let (n, e, lf) = (self.n(), self.p.eta, l as f64);
        ratio(
            x.sinh() * (x - e * (2.0 * (2.0 * n + 1.0))).sinh() * (x - e * (2.0 * n - 1.0)).cosh(),
            (x - e * (2.0 * lf)).sinh() * (x - e * (2.0 * (lf + 1.0))).sinh() * (x - e * (2.0 * n + 1.0)).cosh(),
            "z_l",
        )
    }

    fn w(&self, x: C64) -> Result<C64> {
        let (n, e) = (self.n(), self.p.eta);
        ratio(
            x.sinh() * (x - e * (2.0 * (2.0 * n + 1.0))).sinh(),
            (x - e * (2.0 * n)).sinh() * (x - e * (2.0 * (n + 1.0))).sinh(),
            "w",
        )
    }

    fn psi1(&self, x: C64) -> Result<C64> {
        if self.p.algebra() == Algebra::B {
            return Ok(one());
        }
        let (n, e) = (self.n(), self.p.eta);
        let bracket = e.cosh() - C64::i() * (x - e * (2.0 * n)).sinh();
        Ok(ratio((x - e * (2.0 * n + 3.0)).cosh(), (x - e * (2.0 * n - 1.0)).cosh(), "psi_1")? * bracket * bracket)
    }

    fn psi2(&self, x: C64) -> C64 {
        if self.p.algebra() == Algebra::B {
            return one();
        }
        let (n, e) = (self.n(), self.p.eta);
        (x - e * (2.0 * n + 3.0)).cosh() * (x - e * (2.0 * n - 1.0)).cosh()
    }

    fn value(&self, u: C64) -> Result<C64> {
        let (n, e) = (self.n(), self.p.eta);
        let power = 2 * self.p.sites as u32;
        let crossed = -u - self.p.rho();
        let half = u * 0.5;
        let first = self.a(u)?
            * self.psi1(u)?
            * ratio(
                (u - e * (2.0 * (2.0 * n + 1.0))).sinh() * (u - e * (2.0 * n - 1.0)).cosh(),
                (u - e * 2.0).sinh() * (u - e * (2.0 * n + 1.0)).cosh(),
                "first prefactor",
            )?
            * ((half - e * 2.0).sinh() * (half - e * (2.0 * n + 1.0)).cosh() * 2.0).powu(power);
        let second = self.a(crossed)?
            * self.psi1(crossed)?
            * ratio(
                u.sinh() * (u - e * (2.0 * n + 3.0)).cosh(),
                (u - e * (4.0 * n)).sinh() * (u - e * (2.0 * n + 1.0)).cosh(),
                "second prefactor",
            )?
            * (half.sinh() * (half - e * (2.0 * n - 1.0)).cosh() * 2.0).powu(power);
        let mut bracket = self.w(u)? * self.psi2(u) * self.b_last(u)?;
        for l in 1..self.p.rank {
            bracket += self.z(l, u)? * self.psi1(u)? * self.b(l, u)?;
            bracket += self.z(l, crossed)? * self.psi1(crossed)? * self.b(l, crossed)?;
        }
        let third = bracket * (half.sinh() * (half - e * (2.0 * n + 1.0)).cosh() * 2.0).powu(power);
        Ok(first + second + third)
    }
}

/// Transfer-matrix eigenvalue `Λ(u)` of the Bethe state with roots `r`.
/// Crossed building blocks are evaluated at `−u − ρ`.
pub fn transfer_eigenvalue(r: &RootConfiguration, u: C64, p: &ModelParams) -> Result<C64> {
    r.check_rank(p)?;
    Eigenvalue { r, p }.value(u)
}

/// Hamiltonian eigenvalue of the Bethe state with roots `r`.
pub fn energy(r: &RootConfiguration, p: &ModelParams) -> Result<C64> {
    r.check_rank(p)?;
    let (n, e) = (p.n_f(), p.eta);
    let s2 = (e * 2.0).sinh();
    let mut total = -(e * (2.0 * n + 3.0)).cosh() * (p.sites as f64 - 1.0) / (s2 * 2.0 * (e * (2.0 * n + 1.0)).cosh());
    for &u in &r.levels[0] {
        total -= ratio(s2, ((u * 0.5 - e).sinh() * (u * 0.5 + e).sinh()) * 2.0, "energy")?;
    }
    Ok(total)
}

/// A converged, canonical solution of the Bethe equations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheSolution {
    pub roots: RootConfiguration,
    pub residual: f64,
    pub dynkin: IrrepLabel,
    pub dimension: u64,
    pub energy: C64,
    /// `Λ` at each probe point, in order.
    pub lambda_at_probes: Vec<C64>,
    pub iterations: usize,
}

impl BetheSolution {
    /// Evaluates all derived quantities for already-canonical roots.
    pub fn from_roots(roots: RootConfiguration, p: &ModelParams, probes: &[C64], iterations: usize) -> Result<Self> {
        let residual = max_residual(&roots, p)?;
        let dynkin = dynkin_label(&roots.cardinalities(), p.sites, p.algebra())?;
        let dimension = weyl_dimension(&dynkin);
        let energy = energy(&roots, p)?;
        let lambda_at_probes = probes.iter().map(|&u| transfer_eigenvalue(&roots, u, p)).collect::<Result<_>>()?;
        Ok(Self { roots, residual, dynkin, dimension, energy, lambda_at_probes, iterations })
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.roots.cardinalities()
    }
}

/// Knobs of [`newton_solve`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub jacobian_step: f64,
    pub max_condition: f64,
    pub probes: [C64; 2],
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: CONVERGENCE_TOLERANCE,
            max_iterations: MAX_ITERATIONS,
            jacobian_step: JACOBIAN_STEP,
            max_condition: MAX_JACOBIAN_CONDITION,
            probes: PROBES,
        }
    }
}

fn check_escape(x: &DVector<C64>) -> Result<()> {
    if let Some(z) = x.iter().find(|z| !z.is_finite() || z.re.abs() > ESCAPE_RE) {
        return Err(Error::Diverged(format!("root {z} left the search domain")));
    }
    Ok(())
}

/// Rejects collisions, roots at the trivial fixed points `0` and `iπ`, and
/// roots on the poles of `e₁`.
pub fn check_admissible(r: &RootConfiguration, p: &ModelParams) -> Result<()> {
    let c = canonicalize(r);
    for (l, level) in c.levels.iter().enumerate() {
        for (k, &u) in level.iter().enumerate() {
            if u.norm() < TRIVIAL_ROOT || (u - C64::new(0.0, PI)).norm() < TRIVIAL_ROOT {
                return Err(Error::Rejected(format!("level {} root {u} is a trivial fixed point", l + 1)));
            }
            if (u * 0.5 - p.eta).sinh().norm() < COLLISION_DISTANCE || (u * 0.5 + p.eta).sinh().norm() < COLLISION_DISTANCE {
                return Err(Error::Rejected(format!("level {} root {u} sits on a pole", l + 1)));
            }
            if level[k + 1..].iter().any(|&v| roots_close(u, v, COLLISION_DISTANCE)) {
                return Err(Error::Rejected(format!("collision at level {}", l + 1)));
            }
        }
    }
    Ok(())
}

/// Damped Newton iteration from `seed`.
///
/// Steps are taken on the principal logarithm of each ratio `LHS/RHS`;
/// convergence is judged on `max |LHS/RHS − 1|`.
pub fn newton_solve(seed: &RootConfiguration, p: &ModelParams, opts: &SolverOptions) -> Result<BetheSolution> {
    let (raw, iterations) = newton_iterate(seed, p, opts)?;
    let roots = canonicalize(&raw);
    check_admissible(&roots, p)?;
    BetheSolution::from_roots(roots, p, &opts.probes, iterations)
}

fn newton_iterate(seed: &RootConfiguration, p: &ModelParams, opts: &SolverOptions) -> Result<(RootConfiguration, usize)> {
    seed.check_rank(p)?;
    let m = seed.cardinalities();
    let ratios = |x: &DVector<C64>| -> Result<DVector<C64>> {
        let f = bethe_residual(&RootConfiguration::from_flat(&m, x.as_slice()), p)?;
        if f.iter().any(|z| !z.is_finite() || (z + 1.0).norm() == 0.0) {
            return Err(Error::Pole("Bethe equation"));
        }
        Ok(DVector::from_iterator(f.len(), f.iter().map(|z| z + 1.0)))
    };
    let residual = |r: &DVector<C64>| r.iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max);
    let merit = |r: &DVector<C64>| r.iter().map(|z| z.ln().norm_sqr()).sum::<f64>();
    let mut x = DVector::from_vec(seed.flatten());
    check_escape(&x)?;
    let size = x.len();
    let mut r = ratios(&x)?;
    let mut norm = merit(&r);
    let mut iterations = 0;
    while residual(&r) >= opts.tolerance {
        if iterations == opts.max_iterations {
            return Err(Error::NoConvergence { residual: residual(&r) });
        }
        iterations += 1;
        let h = opts.jacobian_step;
        let mut jac = nalgebra::DMatrix::<C64>::zeros(size, size);
        for k in 0..size {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let (rp, rm) = (ratios(&xp)?, ratios(&xm)?);
            let col = DVector::from_iterator(size, rp.iter().zip(rm.iter()).map(|(a, b)| (a / b).ln() / (2.0 * h)));
            jac.set_column(k, &col);
        }
        let sv = jac.clone().singular_values();
        let condition = sv.max() / sv.min();
        if !condition.is_finite() || condition > opts.max_condition {
            return Err(Error::SingularJacobian { condition });
        }
        let f = r.map(|z| -z.ln());
        let step = jac.lu().solve(&f).ok_or(Error::SingularJacobian { condition: f64::INFINITY })?;
        let longest = step.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut lambda = if longest > MAX_STEP { MAX_STEP / longest } else { 1.0 };
        loop {
            let trial = &x + &step * C64::new(lambda, 0.0);
            if let Ok(rt) = ratios(&trial) {
                let tn = merit(&rt);
                if tn < norm {
                    x = trial;
                    r = rt;
                    norm = tn;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < MIN_LINE_STEP {
                return Err(Error::NoConvergence { residual: residual(&r) });
            }
        }
        check_escape(&x)?;
    }
    Ok((RootConfiguration::from_flat(&m, x.as_slice()), iterations))
}

/// Positions `(level, index)` of the roots that make `r` inadmissible: roots
/// at a trivial fixed point or a pole, and the later root of each colliding
/// pair.
pub fn inadmissible_roots(r: &RootConfiguration, p: &ModelParams) -> Vec<(usize, usize)> {
    let mut bad = Vec::new();
    for (l, level) in r.levels.iter().enumerate() {
        let canon: Vec<C64> = level.iter().map(|&u| canonical_root(u)).collect();
        for (k, &u) in canon.iter().enumerate() {
            let trivial = u.norm() < TRIVIAL_ROOT || (u - C64::new(0.0, PI)).norm() < TRIVIAL_ROOT;
            let pole = (u * 0.5 - p.eta).sinh().norm() < COLLISION_DISTANCE
                || (u * 0.5 + p.eta).sinh().norm() < COLLISION_DISTANCE;
            let collides = canon[..k].iter().any(|&v| roots_close(u, v, COLLISION_DISTANCE));
            if trivial || pole || collides {
                bad.push((l, k));
            }
        }
    }
    bad
}

/// Newton from `seed`; when it lands on an inadmissible configuration the
/// offending roots are redrawn and the iteration resumed, at most
/// [`REPAIR_ATTEMPTS`] times.
pub fn solve_with_repairs(
    seed: &RootConfiguration,
    p: &ModelParams,
    opts: &SolverOptions,
    rng: &mut ChaCha8Rng,
) -> Result<BetheSolution> {
    let mut start = seed.clone();
    let mut total = 0;
    for _ in 0..=REPAIR_ATTEMPTS {
        let (raw, iterations) = newton_iterate(&start, p, opts)?;
        total += iterations;
        let bad = inadmissible_roots(&raw, p);
        if bad.is_empty() {
            return BetheSolution::from_roots(canonicalize(&raw), p, &opts.probes, total);
        }
        start = raw;
        for (l, k) in bad {
            start.levels[l][k] = random_root(rng);
        }
    }
    Err(Error::Rejected(format!("still inadmissible after {REPAIR_ATTEMPTS} repairs")))
}

/// Filters converged solutions, typically by comparing `Λ` and the energy
/// with a numerically computed spectrum.
pub trait SolutionOracle: Sync {
    fn accepts(&self, solution: &BetheSolution) -> bool;
}

/// Knobs of [`completeness_search`].
#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Number of random starts (table seeds come on top).
    pub starts: usize,
    pub seed: u64,
    pub batch_size: usize,
    /// Stop once this many distinct solutions are found.
    pub expected: Option<u64>,
    /// Tried before any random start.
    pub table_seeds: Vec<RootConfiguration>,
    pub solver: SolverOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            starts: 4000,
            seed: DEFAULT_SEARCH_SEED,
            batch_size: 64,
            expected: None,
            table_seeds: Vec::new(),
            solver: SolverOptions::default(),
        }
    }
}

/// Result of a multi-start search in one cardinality sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub cardinalities: Vec<usize>,
    pub dynkin: IrrepLabel,
    pub dimension: u64,
    pub expected: Option<u64>,
    pub solutions: Vec<BetheSolution>,
    pub starts_used: usize,
    pub converged: usize,
    pub rejected_by_oracle: usize,
}

impl SearchOutcome {
    pub fn found(&self) -> u64 {
        self.solutions.len() as u64
    }

    /// Missing solutions relative to the expected count.
    pub fn shortfall(&self) -> Option<u64> {
        self.expected.map(|e| e.saturating_sub(self.found()))
    }

    pub fn complete(&self) -> bool {
        self.shortfall() == Some(0)
    }
}

/// Log-uniform on `[lo, hi]`, favouring the small roots that dominate
/// low-lying states.
fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn random_root(rng: &mut ChaCha8Rng) -> C64 {
    let r: f64 = rng.random();
    if r < 0.5 {
        C64::new(log_uniform(rng, 0.03, 3.0), 0.0)
    } else if r < 0.9 {
        C64::new(0.0, rng.random_range(0.2..3.0))
    } else {
        C64::new(rng.random_range(0.02..2.0), PI)
    }
}

/// A random start with `m[l]` roots at level `l`, mixing real roots,
/// imaginary roots, roots on the `Im = π` line and conjugate pairs. Every
/// start is closed under conjugation modulo `2πi`, a symmetry Newton
/// preserves.
pub fn random_seed(m: &[usize], rng: &mut ChaCha8Rng) -> RootConfiguration {
    let levels = m
        .iter()
        .map(|&k| {
            let mut level = Vec::with_capacity(k);
            while level.len() < k {
                if k - level.len() >= 2 && rng.random::<f64>() < 0.35 {
                    let a = rng.random_range(0.02..2.0);
                    let b = rng.random_range(0.1..1.6);
                    level.push(C64::new(a, b));
                    level.push(C64::new(a, -b));
                } else {
                    level.push(random_root(rng));
                }
            }
            level
        })
        .collect();
    RootConfiguration { levels }
}

/// Multi-start search for all distinct solutions with cardinalities `m`.
/// Falling short of `expected` is reported in the outcome, not as an error.
pub fn completeness_search(
    m: &[usize],
    p: &ModelParams,
    opts: &SearchOptions,
    oracle: Option<&dyn SolutionOracle>,
) -> Result<SearchOutcome> {
    if m.len() != p.rank {
        return Err(Error::DimensionMismatch(format!("{} cardinalities for rank {}", m.len(), p.rank)));
    }
    let dynkin = dynkin_label(m, p.sites, p.algebra())?;
    let mut outcome = SearchOutcome {
        cardinalities: m.to_vec(),
        dimension: weyl_dimension(&dynkin),
        dynkin,
        expected: opts.expected,
        solutions: Vec::new(),
        starts_used: 0,
        converged: 0,
        rejected_by_oracle: 0,
    };
    let absorb = |outcome: &mut SearchOutcome, results: Vec<Result<BetheSolution>>| {
        for s in results.into_iter().flatten() {
            outcome.converged += 1;
            if outcome.solutions.iter().any(|k| configurations_equal(&k.roots, &s.roots, DEDUP_TOLERANCE)) {
                continue;
            }
            if oracle.is_some_and(|o| !o.accepts(&s)) {
                outcome.rejected_by_oracle += 1;
                continue;
            }
            outcome.solutions.push(s);
        }
    };
    let done = |o: &SearchOutcome| o.expected.is_some_and(|e| o.found() >= e);

    if m.iter().all(|&k| k == 0) {
        let r = newton_solve(&RootConfiguration::empty(p.rank), p, &opts.solver);
        outcome.starts_used = 1;
        absorb(&mut outcome, vec![r]);
        return Ok(finish(outcome));
    }
    let table: Vec<RootConfiguration> =
        opts.table_seeds.iter().filter(|s| s.cardinalities() == m).cloned().collect();
    if !table.is_empty() {
        let results: Vec<_> = table.par_iter().map(|s| newton_solve(s, p, &opts.solver)).collect();
        outcome.starts_used += table.len();
        absorb(&mut outcome, results);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let seeds: Vec<(RootConfiguration, u64)> =
        (0..opts.starts).map(|_| (random_seed(m, &mut rng), rng.random::<u64>())).collect();
    for batch in seeds.chunks(opts.batch_size.max(1)) {
        if done(&outcome) {
            break;
        }
        let results: Vec<_> = batch
            .par_iter()
            .map(|(s, repair_seed)| {
                solve_with_repairs(s, p, &opts.solver, &mut ChaCha8Rng::seed_from_u64(*repair_seed))
            })
            .collect();
        outcome.starts_used += batch.len();
        absorb(&mut outcome, results);
    }
    Ok(finish(outcome))
}

fn finish(mut outcome: SearchOutcome) -> SearchOutcome {
    outcome.solutions.sort_by(|a, b| {
        a.energy.norm().total_cmp(&b.energy.norm()).then_with(|| {
            let (fa, fb) = (a.roots.flatten(), b.roots.flatten());
            fa.iter()
                .zip(&fb)
                .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    outcome
}
