//! Dense complex operators and tensor-product plumbing.
//!
//! Every operator in the crate is an [`Operator`]: a dense square complex
//! matrix with an optional list of local dimensions. The tensor-factor
//! ordering is fixed by [`kron`]: the left factor varies slowest, so site 1 of
//! a chain is the slowest-varying index.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default cap on the dimension handed to the dense eigensolver.
pub const DEFAULT_EIG_CAP: usize = 1024;

/// Residual tolerance (relative to `max(1, ‖M‖)`) accepted from [`eig`].
pub const EIG_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
    sites: Option<Vec<usize>>,
}

impl Operator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operators are square");
        Self { mat, sites: None }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_matrix(DMatrix::from_fn(dim, dim, f))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix(DMatrix::identity(dim, dim))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, |i, j| if i == j { entries[i] } else { C64::new(0.0, 0.0) })
    }

    /// Attaches a site structure; the product of `sites` must equal `dim`.
    pub fn with_sites(mut self, sites: Vec<usize>) -> Result<Self> {
        let prod: usize = sites.iter().product();
        if prod != self.dim() || sites.contains(&0) {
            return Err(Error::SiteStructure(format!(
                "sites {sites:?} do not factor dimension {}",
                self.dim()
            )));
        }
        self.sites = Some(sites);
        Ok(self)
    }

    pub fn sites(&self) -> Option<&[usize]> {
        self.sites.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.mat[(i, j)] = v;
    }

    pub fn transpose(&self) -> Self {
        Self { mat: self.mat.transpose(), sites: self.sites.clone() }
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint(), sites: self.sites.clone() }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { mat: &self.mat * s, sites: self.sites.clone() }
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.mat.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.mat[(i, j)].norm() <= tol))
    }

    pub fn diag(&self) -> Vec<C64> {
        self.mat.diagonal().iter().copied().collect()
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// Entrywise `exp` of a diagonal operator scaled by `s`, i.e. `e^{s·D}`.
    pub fn exp_diagonal(&self, s: C64) -> Operator {
        debug_assert!(self.is_diagonal(0.0));
        let d: Vec<C64> = self.diag().iter().map(|&x| (s * x).exp()).collect();
        Operator::diagonal(&d)
    }

    /// Applies the operator to a vector.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| (0..n).map(|j| self.mat[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator { mat: &self.mat * &rhs.mat, sites: self.sites.clone().or(rhs.sites.clone()) }
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        Operator { mat: &self.mat + &rhs.mat, sites: self.sites.clone().or(rhs.sites.clone()) }
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        Operator { mat: &self.mat - &rhs.mat, sites: self.sites.clone().or(rhs.sites.clone()) }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { mat: -&self.mat, sites: self.sites.clone() }
    }
}

/// Frobenius distance normalized by `max(1, ‖a‖, ‖b‖)`.
pub fn relative_residual(a: &Operator, b: &Operator) -> f64 {
    let scale = 1f64.max(a.norm()).max(b.norm());
    (a - b).norm() / scale
}

/// Kronecker product, left factor slowest-varying:
/// `(A⊗B)[(i·dB + k), (j·dB + l)] = A[i,j]·B[k,l]`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (da, db) = (a.dim(), b.dim());
    let mut out = DMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a.mat[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b.mat[(k, l)];
                }
            }
        }
    }
    let mut sites = a.sites.clone().unwrap_or_else(|| vec![da]);
    sites.extend(b.sites.clone().unwrap_or_else(|| vec![db]));
    Operator { mat: out, sites: Some(sites) }
}

/// Kronecker product of a list of factors.
pub fn kron_all(factors: &[Operator]) -> Operator {
    let mut iter = factors.iter();
    let first = iter.next().expect("kron_all needs at least one factor").clone();
    iter.fold(first, |acc, f| kron(&acc, f))
}

/// Elementary matrix `e_{ab}` of size `d` (1-based indices).
pub fn elementary_matrix(d: usize, a: usize, b: usize) -> Result<Operator> {
    for idx in [a, b] {
        if idx == 0 || idx > d {
            return Err(Error::IndexOutOfRange { index: idx, dim: d });
        }
    }
    let mut m = Operator::zeros(d);
    m.set(a - 1, b - 1, C64::new(1.0, 0.0));
    Ok(m)
}

/// Permutation operator `P = Σ e_{αβ}⊗e_{βα}` on `V⊗V`.
pub fn permutation_operator(d: usize) -> Operator {
    let mut m = Operator::zeros(d * d);
    for a in 0..d {
        for b in 0..d {
            m.set(a * d + b, b * d + a, C64::new(1.0, 0.0));
        }
    }
    m.with_sites(vec![d, d]).expect("d*d factors")
}

fn two_factor_dim(m: &Operator) -> Result<usize> {
    match m.sites() {
        Some([a, b]) if a == b => Ok(*a),
        Some(s) => Err(Error::SiteStructure(format!("expected [d, d], found {s:?}"))),
        None => Err(Error::SiteStructure("missing site structure".into())),
    }
}

/// Transposes the indices of one tensor factor (`which` ∈ {1, 2}).
pub fn partial_transpose(m: &Operator, which: usize) -> Result<Operator> {
    let d = two_factor_dim(m)?;
    if which != 1 && which != 2 {
        return Err(Error::SiteStructure(format!("factor {which} of a two-factor operator")));
    }
    let mut out = Operator::zeros(d * d);
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                for l in 0..d {
                    let v = m.get(i * d + k, j * d + l);
                    let (r, c) = if which == 1 { (j * d + k, i * d + l) } else { (i * d + l, j * d + k) };
                    out.set(r, c, v);
                }
            }
        }
    }
    out.with_sites(vec![d, d])
}

/// Traces out one tensor factor (`which` ∈ {1, 2}); the result acts on `V`.
pub fn partial_trace(m: &Operator, which: usize) -> Result<Operator> {
    let d = two_factor_dim(m)?;
    if which != 1 && which != 2 {
        return Err(Error::SiteStructure(format!("factor {which} of a two-factor operator")));
    }
    Ok(Operator::from_fn(d, |r, c| {
        (0..d)
            .map(|s| if which == 1 { m.get(s * d + r, s * d + c) } else { m.get(r * d + s, c * d + s) })
            .sum()
    }))
}

/// Embeds `op` (acting on `d^{sites.len()}`) into the `d^n_sites` chain space,
/// acting on the listed (1-based, distinct) sites in order and as the identity
/// elsewhere.
pub fn site_embed(op: &Operator, sites: &[usize], n_sites: usize, d: usize) -> Result<Operator> {
    let k = sites.len();
    if op.dim() != d.pow(k as u32) {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} cannot act on {k} sites of dimension {d}",
            op.dim()
        )));
    }
    for (i, &s) in sites.iter().enumerate() {
        if s == 0 || s > n_sites {
            return Err(Error::IndexOutOfRange { index: s, dim: n_sites });
        }
        if sites[..i].contains(&s) {
            return Err(Error::SiteStructure(format!("site {s} listed twice")));
        }
    }
    let local = LocalOperator::new(op, sites.iter().map(|s| s - 1).collect(), n_sites, d);
    let total = d.pow(n_sites as u32);
    let mut out = DMatrix::zeros(total, total);
    for (col, rowvals) in (0..total).map(|c| (c, local.apply_basis(c))) {
        for (row, v) in rowvals {
            out[(row, col)] += v;
        }
    }
    Operator::from_matrix(out).with_sites(vec![d; n_sites])
}

/// Sparse local operator acting on a fixed set of slots of a `d^slots` space.
/// Used to apply R- and K-factors to vectors without materializing the
/// embedded matrix.
#[derive(Clone, Debug)]
pub struct LocalOperator {
    entries: Vec<(usize, usize, C64)>,
    by_col: Vec<Vec<(usize, C64)>>,
    slots: Vec<usize>,
    strides: Vec<usize>,
    d: usize,
    total: usize,
}

impl LocalOperator {
    /// `slots` are 0-based, ordered as the tensor factors of `op`.
    pub fn new(op: &Operator, slots: Vec<usize>, n_slots: usize, d: usize) -> Self {
        let dim = op.dim();
        let mut entries = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                let v = op.get(r, c);
                if v != C64::new(0.0, 0.0) {
                    entries.push((r, c, v));
                }
            }
        }
        let strides = slots.iter().map(|&s| d.pow((n_slots - 1 - s) as u32)).collect();
        let mut me = Self { entries, by_col: vec![Vec::new(); dim], slots, strides, d, total: d.pow(n_slots as u32) };
        for &(r, c, v) in &me.entries {
            let off = me.offset(r);
            me.by_col[c].push((off, v));
        }
        me
    }

    fn local_index(&self, global: usize) -> (usize, usize) {
        let mut local = 0;
        let mut base = global;
        for &st in &self.strides {
            let digit = (global / st) % self.d;
            local = local * self.d + digit;
            base -= digit * st;
        }
        (local, base)
    }

    fn offset(&self, local: usize) -> usize {
        let mut rem = local;
        let mut off = 0;
        for &st in self.strides.iter().rev() {
            off += (rem % self.d) * st;
            rem /= self.d;
        }
        off
    }

    fn apply_basis(&self, col: usize) -> Vec<(usize, C64)> {
        let (local, base) = self.local_index(col);
        self.entries
            .iter()
            .filter(|(_, c, _)| *c == local)
            .map(|&(r, _, v)| (base + self.offset(r), v))
            .collect()
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    /// `out = op · x` on the full space.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.total);
        let mut out = vec![C64::new(0.0, 0.0); self.total];
        for (g, &xv) in x.iter().enumerate() {
            if xv == C64::new(0.0, 0.0) {
                continue;
            }
            let (local, base) = self.local_index(g);
            for &(off, v) in &self.by_col[local] {
                out[base + off] += v * xv;
            }
        }
        out
    }
}

/// Result of a general (non-Hermitian) eigendecomposition.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<C64>,
    /// Right eigenvectors as unit-norm columns, in the order of `values`.
    pub vectors: DMatrix<C64>,
    /// Largest `‖M v − λ v‖ / max(1, ‖M‖)` over all pairs.
    pub residual: f64,
}

/// Deflation thresholds tried in turn; the QR iteration can stall at
/// machine epsilon on some non-normal matrices.
const SCHUR_EPSILONS: [f64; 4] = [f64::EPSILON, 1e-15, 1e-14, 1e-13];

fn schur(m: &DMatrix<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    SCHUR_EPSILONS
        .iter()
        .find_map(|&eps| nalgebra::linalg::Schur::try_new(m.clone(), eps, 10_000))
        .map(|s| s.unpack())
        .ok_or(Error::NoConvergence { residual: f64::INFINITY })
}

/// General eigendecomposition via complex Schur form and triangular
/// back-substitution.
pub fn eig(m: &Operator) -> Result<Eigen> {
    eig_with_cap(m, DEFAULT_EIG_CAP)
}

pub fn eig_with_cap(m: &Operator, cap: usize) -> Result<Eigen> {
    let n = m.dim();
    if n > cap {
        return Err(Error::DimensionCap { dim: n, cap });
    }
    let scale = 1f64.max(m.norm());
    let (q, t) = schur(&m.mat)?;
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let degenerate = 1e-10 * scale;
    let mut y = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = t[(i, k)];
            for j in i + 1..k {
                s += t[(i, j)] * y[(j, k)];
            }
            let denom = t[(i, i)] - values[k];
            // Within a degenerate cluster the coupling is numerically zero
            // for diagonalizable input; drop it rather than divide by noise.
            y[(i, k)] = if denom.norm() < degenerate { C64::new(0.0, 0.0) } else { -s / denom };
        }
    }
    let mut vectors = q * y;
    for mut col in vectors.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= C64::new(nrm, 0.0);
        }
    }
    let mv = &m.mat * &vectors;
    let mut residual: f64 = 0.0;
    for k in 0..n {
        let r = (mv.column(k) - vectors.column(k) * values[k]).norm();
        residual = residual.max(r / scale);
    }
    if !residual.is_finite() || residual > EIG_TOLERANCE {
        return Err(Error::NoConvergence { residual });
    }
    Ok(Eigen { values, vectors, residual })
}

/// Eigenvalues only.
pub fn eigenvalues(m: &Operator) -> Result<Vec<C64>> {
    let n = m.dim();
    if n > DEFAULT_EIG_CAP {
        return Err(Error::DimensionCap { dim: n, cap: DEFAULT_EIG_CAP });
    }
    let (_, t) = schur(&m.mat)?;
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Default finite-difference step for [`num_derivative`].
pub const DERIVATIVE_STEP: f64 = 1e-5;

/// Central difference with one Richardson step:
/// `(4·D(h/2) − D(h)) / 3` where `D(h) = (f(u0+h) − f(u0−h)) / 2h`.
pub fn num_derivative(f: impl Fn(C64) -> Operator, u0: C64, step: f64) -> Operator {
    let central = |h: f64| {
        let hc = C64::new(h, 0.0);
        (&f(u0 + hc) - &f(u0 - hc)).scale(C64::new(1.0 / (2.0 * h), 0.0))
    };
    let coarse = central(step);
    let fine = central(step / 2.0);
    (&fine.scale(C64::new(4.0, 0.0)) - &coarse).scale(C64::new(1.0 / 3.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_op(rng: &mut ChaCha8Rng, d: usize) -> Operator {
        Operator::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn kron_identities_and_convention() {
        assert_eq!(kron(&Operator::identity(2), &Operator::identity(3)).matrix(), Operator::identity(6).matrix());
        let e12 = elementary_matrix(2, 1, 2).unwrap();
        let k = kron(&e12, &Operator::identity(2));
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i, j) == (0, 2) || (i, j) == (1, 3) { 1.0 } else { 0.0 };
                assert_eq!(k.get(i, j), c(expect));
            }
        }
    }

    #[test]
    fn kron_matches_quadruple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_op(&mut rng, 3);
        let b = random_op(&mut rng, 3);
        let k = kron(&a, &b);
        for i in 0..3 {
            for j in 0..3 {
                for p in 0..3 {
                    for q in 0..3 {
                        assert_eq!(k.get(i * 3 + p, j * 3 + q), a.get(i, j) * b.get(p, q));
                    }
                }
            }
        }
        let cc = random_op(&mut rng, 2);
        assert!((&kron(&kron(&a, &b), &cc) - &kron(&a, &kron(&b, &cc))).max_abs() < 1e-15);
    }

    #[test]
    fn elementary_algebra() {
        let d = elementary_matrix(3, 1, 1).unwrap();
        assert_eq!(d.diag(), vec![c(1.0), c(0.0), c(0.0)]);
        let prod = &elementary_matrix(3, 1, 3).unwrap() * &elementary_matrix(3, 3, 2).unwrap();
        assert_eq!(prod.matrix(), elementary_matrix(3, 1, 2).unwrap().matrix());
        let sum = (1..=5).fold(Operator::zeros(5), |acc, a| &acc + &elementary_matrix(5, a, a).unwrap());
        assert_eq!(sum.matrix(), Operator::identity(5).matrix());
        assert_eq!(elementary_matrix(3, 0, 1), Err(Error::IndexOutOfRange { index: 0, dim: 3 }));
        assert!(elementary_matrix(3, 1, 4).is_err());
    }

    #[test]
    fn permutation_swaps_factors() {
        let p2 = permutation_operator(2);
        let swap = [[1., 0., 0., 0.], [0., 0., 1., 0.], [0., 1., 0., 0.], [0., 0., 0., 1.]];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(p2.get(i, j), c(swap[i][j]));
            }
        }
        let p3 = permutation_operator(3);
        assert_eq!((&p3 * &p3).matrix(), Operator::identity(9).matrix());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_op(&mut rng, 3);
        let b = random_op(&mut rng, 3);
        let lhs = &(&p3 * &kron(&a, &b)) * &p3;
        assert!((&lhs - &kron(&b, &a)).norm() < 1e-14);
    }

    #[test]
    fn partial_transpose_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_op(&mut rng, 3);
        let b = random_op(&mut rng, 3);
        let m = random_op(&mut rng, 9).with_sites(vec![3, 3]).unwrap();
        let twice = partial_transpose(&partial_transpose(&m, 1).unwrap(), 1).unwrap();
        assert_eq!(twice.matrix(), m.matrix());
        let full = partial_transpose(&partial_transpose(&m, 1).unwrap(), 2).unwrap();
        assert_eq!(full.matrix(), &m.matrix().transpose());
        let fact = partial_transpose(&kron(&a, &b), 1).unwrap();
        assert_eq!(fact.matrix(), kron(&a.transpose(), &b).matrix());
        assert!(partial_transpose(&random_op(&mut rng, 9), 1).is_err());
        let bad = random_op(&mut rng, 6).with_sites(vec![2, 3]).unwrap();
        assert!(matches!(partial_transpose(&bad, 1), Err(Error::SiteStructure(_))));
    }

    #[test]
    fn partial_trace_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_op(&mut rng, 3);
        let b = random_op(&mut rng, 3);
        let t1 = partial_trace(&kron(&a, &b), 1).unwrap();
        assert!((&t1 - &b.scale(a.trace())).norm() < 1e-13);
        let t2 = partial_trace(&kron(&a, &b), 2).unwrap();
        assert!((&t2 - &a.scale(b.trace())).norm() < 1e-13);
        let m = random_op(&mut rng, 9).with_sites(vec![3, 3]).unwrap();
        assert!((partial_trace(&m, 1).unwrap().trace() - m.trace()).norm() < 1e-13);
        for which in [1, 2] {
            let p = partial_trace(&permutation_operator(4), which).unwrap();
            assert_eq!(p.matrix(), Operator::identity(4).matrix());
        }
    }

    #[test]
    fn site_embedding() {
        let d = 3;
        let id = site_embed(&Operator::identity(d), &[2], 3, d).unwrap();
        assert_eq!(id.matrix(), Operator::identity(27).matrix());
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_op(&mut rng, d);
        let b = random_op(&mut rng, d);
        let anchored = site_embed(&a, &[1], 2, d).unwrap();
        assert_eq!(anchored.matrix(), kron(&a, &Operator::identity(d)).matrix());
        let ea = site_embed(&a, &[1], 3, d).unwrap();
        let eb = site_embed(&b, &[3], 3, d).unwrap();
        assert!(ea.commutator(&eb).norm() < 1e-13);
        // Two-site operator on reversed sites equals P-conjugation.
        let ab = kron(&a, &b);
        let rev = site_embed(&ab, &[2, 1], 2, d).unwrap();
        assert!((&rev - &kron(&b, &a)).norm() < 1e-13);
        assert!(site_embed(&a, &[1, 1], 3, d).is_err());
        assert!(site_embed(&a, &[4], 3, d).is_err());
    }

    #[test]
    fn local_operator_matches_embedding() {
        let d = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let op = random_op(&mut rng, d * d);
        let dense = site_embed(&op, &[3, 1], 3, d).unwrap();
        let local = LocalOperator::new(&op, vec![2, 0], 3, d);
        let x: Vec<C64> = (0..27).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let want = dense.apply(&x);
        let got = local.apply(&x);
        for (w, g) in want.iter().zip(&got) {
            assert!((w - g).norm() < 1e-13);
        }
    }

    #[test]
    fn eig_small_cases() {
        let d = Operator::diagonal(&[c(1.0), c(2.0), c(3.0)]);
        let mut vals: Vec<f64> = eig(&d).unwrap().values.iter().map(|z| z.re).collect();
        vals.sort_by(f64::total_cmp);
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        let mut swap: Vec<f64> = eig(&permutation_operator(2)).unwrap().values.iter().map(|z| z.re).collect();
        swap.sort_by(f64::total_cmp);
        for (got, want) in swap.iter().zip([-1.0, 1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    /// Characteristic polynomial via Faddeev–LeVerrier, evaluated at each
    /// computed eigenvalue.
    #[test]
    fn eig_roots_of_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let m = random_op(&mut rng, 5);
        let n = 5;
        let mut coeffs = vec![c(1.0)];
        let mut mk = Operator::zeros(n);
        let id = Operator::identity(n);
        for k in 1..=n {
            let prev = coeffs[k - 1];
            mk = &(&m * &mk) + &id.scale(prev);
            let am = &m * &mk;
            coeffs.push(-am.trace() / c(k as f64));
        }
        let e = eig(&m).unwrap();
        for &lam in &e.values {
            let p = coeffs.iter().fold(c(0.0), |acc, &a| acc * lam + a);
            assert!(p.norm() < 1e-8, "p(λ) = {p}");
        }
        // Reconstruction M = V diag(λ) V^{-1}.
        let v = e.vectors.clone();
        let vinv = v.clone().try_inverse().unwrap();
        let recon = &v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone())) * vinv;
        assert!((recon - m.matrix()).norm() / m.norm() < 1e-8);
    }

    #[test]
    fn eig_cap() {
        assert!(matches!(eig_with_cap(&Operator::identity(5), 4), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn derivative_examples() {
        let id = Operator::identity(3);
        let d = num_derivative(|u| id.scale(u), C64::new(0.3, 0.2), DERIVATIVE_STEP);
        assert!((&d - &id).norm() < 1e-9);
        let e11 = elementary_matrix(2, 1, 1).unwrap();
        let d = num_derivative(|u| e11.scale(u.sinh()), C64::new(0.0, 0.0), DERIVATIVE_STEP);
        assert!((&d - &e11).norm() < 1e-10);
    }
}
