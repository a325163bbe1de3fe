//! Uq(Bn) and Uq(Cn) generators on the (2n+1)-dimensional site space, their
//! coproducts and N-fold extensions, and the symmetry checks.
//!
//! Every simple generator other than the Cn generator `E_n^±` has a
//! twisted-primitive coproduct `Δ(X) = X⊗R + L⊗X` with group-like `L`, `R`
//! (exponentials of Cartan elements, `Δ(g) = g⊗g`). The Cn generator
//! `E_n^±` is obtained from `E_0^±` by a commutator ladder; its coproduct is
//! kept symbolically as a sum of tensor products of words so that it can be
//! nested or checked for coassociativity without re-deriving it.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Algebra, ModelParams};
use crate::report::{Check, Report};
use crate::tensor::{kron, kron_all, Operator};

/// Singular values below `HW_THRESHOLD · max(σ_max, 1)` count as zero when
/// computing joint kernels of the raising operators.
pub const HW_THRESHOLD: f64 = 1e-7;

/// Eigenbases with a condition number above this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Default cap on the N-site dimension of the coproducts.
pub const DEFAULT_COPRODUCT_CAP: usize = 1024;

/// One-site matrices of a generator set.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub algebra: Algebra,
    pub rank: usize,
    pub cartan: Vec<Operator>,
    pub raising: Vec<Operator>,
    pub lowering: Vec<Operator>,
    /// `E_0^±` (Cn only).
    pub extra_raising: Option<Operator>,
    pub extra_lowering: Option<Operator>,
    eta: C64,
}

fn e(d: usize, a: usize, b: usize) -> Operator {
    let mut m = Operator::zeros(d);
    m.set(a - 1, b - 1, C64::new(1.0, 0.0));
    m
}

fn cartan_matrices(n: usize) -> Vec<Operator> {
    let d = 2 * n + 1;
    (1..=n).map(|a| &e(d, a, a) - &e(d, 2 * n + 2 - a, 2 * n + 2 - a)).collect()
}

/// Bn generators in the orthogonal basis.
pub fn bn_generators(p: &ModelParams) -> GeneratorSet {
    let n = p.rank;
    let d = p.local_dim();
    let raising: Vec<Operator> =
        (1..=n).map(|a| &e(d, a, a + 1) + &e(d, 2 * n + 1 - a, 2 * n + 2 - a)).collect();
    let lowering = raising.iter().map(Operator::transpose).collect();
    GeneratorSet {
        algebra: Algebra::B,
        rank: n,
        cartan: cartan_matrices(n),
        raising,
        lowering,
        extra_raising: None,
        extra_lowering: None,
        eta: p.eta,
    }
}

/// Cn generators embedded in the (2n+1)-dimensional space with a null middle
/// row and column.
pub fn cn_generators(p: &ModelParams) -> GeneratorSet {
    let n = p.rank;
    let d = p.local_dim();
    let mut raising: Vec<Operator> =
        (1..n).map(|a| &e(d, a, a + 1) + &e(d, 2 * n + 1 - a, 2 * n + 2 - a)).collect();
    raising.push(e(d, n, n + 2));
    let lowering = raising.iter().map(Operator::transpose).collect();
    GeneratorSet {
        algebra: Algebra::C,
        rank: n,
        cartan: cartan_matrices(n),
        raising,
        lowering,
        extra_raising: Some(e(d, 1, 2 * n + 1)),
        extra_lowering: Some(e(d, 2 * n + 1, 1)),
        eta: p.eta,
    }
}

/// Generators matching the symmetry of the boundary set in `p`.
pub fn generators(p: &ModelParams) -> GeneratorSet {
    match p.algebra() {
        Algebra::B => bn_generators(p),
        Algebra::C => cn_generators(p),
    }
}

/// Simple roots in the orthogonal basis.
pub fn simple_roots(algebra: Algebra, n: usize) -> Vec<Vec<i32>> {
    (1..=n)
        .map(|j| {
            let mut r = vec![0; n];
            if j < n {
                r[j - 1] = 1;
                r[j] = -1;
            } else {
                r[n - 1] = if algebra == Algebra::B { 1 } else { 2 };
            }
            r
        })
        .collect()
}

/// Nested commutator `(−½)^{n−1} [[…[[x, y₁], y₁]…, y_{n−1}], y_{n−1}]`.
pub fn ladder(x: &Operator, ys: &[Operator]) -> Operator {
    let mut acc = x.clone();
    for y in ys {
        acc = acc.commutator(y).commutator(y);
    }
    acc.scale(C64::new((-0.5f64).powi(ys.len() as i32), 0.0))
}

/// Identifies a simple generator (and its sign).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GenId {
    Cartan(usize),
    Raise(usize),
    Lower(usize),
    Raise0,
    Lower0,
}

/// A letter of a word in the algebra.
#[derive(Clone, Debug, PartialEq)]
enum Letter {
    /// A generator with a twisted-primitive or Cartan coproduct.
    Gen(GenId),
    /// A diagonal group-like element.
    Group(Vec<C64>),
}

/// `Σ coef · word₁ ⊗ word₂`.
#[derive(Clone, Debug, Default)]
struct TwoSite {
    terms: Vec<(C64, Vec<Letter>, Vec<Letter>)>,
}

impl TwoSite {
    fn mul(&self, other: &TwoSite) -> TwoSite {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ca, la, ra) in &self.terms {
            for (cb, lb, rb) in &other.terms {
                let mut l = la.clone();
                l.extend(lb.iter().cloned());
                let mut r = ra.clone();
                r.extend(rb.iter().cloned());
                terms.push((ca * cb, l, r));
            }
        }
        TwoSite { terms }
    }

    fn commutator(&self, other: &TwoSite) -> TwoSite {
        let mut out = self.mul(other);
        out.terms.extend(other.mul(self).terms.into_iter().map(|(c, l, r)| (-c, l, r)));
        out
    }

    fn scale(mut self, s: C64) -> TwoSite {
        for t in &mut self.terms {
            t.0 *= s;
        }
        self
    }
}

impl GeneratorSet {
    pub fn local_dim(&self) -> usize {
        2 * self.rank + 1
    }

    /// One-site matrix of a generator.
    pub fn matrix(&self, id: GenId) -> Operator {
        match id {
            GenId::Cartan(j) => self.cartan[j - 1].clone(),
            GenId::Raise(j) => self.raising[j - 1].clone(),
            GenId::Lower(j) => self.lowering[j - 1].clone(),
            GenId::Raise0 => self.extra_raising.clone().expect("Cn only"),
            GenId::Lower0 => self.extra_lowering.clone().expect("Cn only"),
        }
    }

    /// All generators whose symmetry is checked: Cartan, raising, lowering.
    pub fn ids(&self) -> Vec<GenId> {
        let n = self.rank;
        let mut ids: Vec<GenId> = (1..=n).map(GenId::Cartan).collect();
        ids.extend((1..=n).map(GenId::Raise));
        ids.extend((1..=n).map(GenId::Lower));
        ids
    }

    fn h_diag(&self, j: usize) -> Vec<f64> {
        if j == 0 || j > self.rank {
            return vec![0.0; self.local_dim()];
        }
        self.cartan[j - 1].diag().iter().map(|z| z.re).collect()
    }

    /// Diagonal of `exp(Σ_j c_j H_j)`.
    fn group(&self, coeffs: &[(usize, C64)]) -> Vec<C64> {
        (0..self.local_dim())
            .map(|a| coeffs.iter().map(|&(j, c)| c * self.h_diag(j)[a]).sum::<C64>().exp())
            .collect()
    }

    fn is_ladder(&self, id: GenId) -> bool {
        self.algebra == Algebra::C && self.rank >= 2 && matches!(id, GenId::Raise(j) | GenId::Lower(j) if j == self.rank)
    }

    /// Left and right group-like twists of a primitive generator.
    fn twists(&self, id: GenId) -> (Vec<C64>, Vec<C64>) {
        let eta = self.eta;
        let ipi = C64::new(0.0, PI);
        let n = self.rank;
        match (self.algebra, id) {
            (_, GenId::Cartan(_)) => (self.group(&[]), self.group(&[])),
            (Algebra::B, GenId::Raise(j) | GenId::Lower(j)) => {
                let right = self.group(&[(j, ipi + eta), (j + 1, -eta)]);
                let left = self.group(&[(j, -ipi - eta), (j + 1, eta)]);
                (left, right)
            }
            (Algebra::C, GenId::Raise(j) | GenId::Lower(j)) if j < n => {
                let right = self.group(&[(j + 1, ipi)]);
                let left = self.group(&[(j + 1, ipi + 2.0 * eta), (j, -2.0 * eta)]);
                (left, right)
            }
            (Algebra::C, GenId::Raise(_) | GenId::Lower(_) | GenId::Raise0 | GenId::Lower0) => {
                (self.group(&[(1, 4.0 * eta)]), self.group(&[]))
            }
            (Algebra::B, GenId::Raise0 | GenId::Lower0) => unreachable!("Bn has no E0"),
        }
    }

    fn letter_matrix(&self, l: &Letter) -> Operator {
        match l {
            Letter::Gen(id) => self.matrix(*id),
            Letter::Group(g) => Operator::diagonal(g),
        }
    }

    fn word_matrix(&self, w: &[Letter]) -> Operator {
        w.iter().fold(Operator::identity(self.local_dim()), |acc, l| &acc * &self.letter_matrix(l))
    }

    /// Symbolic `Δ(X)`.
    fn two_site(&self, id: GenId) -> TwoSite {
        if self.is_ladder(id) {
            let (x0, down): (GenId, fn(usize) -> GenId) = match id {
                GenId::Raise(_) => (GenId::Raise0, GenId::Lower),
                _ => (GenId::Lower0, GenId::Raise),
            };
            let mut acc = self.two_site(x0);
            for j in 1..self.rank {
                let y = self.two_site(down(j));
                acc = acc.commutator(&y).commutator(&y);
            }
            return acc.scale(C64::new((-0.5f64).powi(self.rank as i32 - 1), 0.0));
        }
        let one = C64::new(1.0, 0.0);
        if let GenId::Cartan(_) = id {
            return TwoSite { terms: vec![(one, vec![Letter::Gen(id)], vec![]), (one, vec![], vec![Letter::Gen(id)])] };
        }
        let (left, right) = self.twists(id);
        TwoSite {
            terms: vec![
                (one, vec![Letter::Gen(id)], vec![Letter::Group(right)]),
                (one, vec![Letter::Group(left)], vec![Letter::Gen(id)]),
            ],
        }
    }

    /// `Δ_(N)` of a single letter (N ≥ 1).
    fn letter_nfold(&self, l: &Letter, sites: usize) -> Operator {
        match l {
            Letter::Group(g) => kron_all(&vec![Operator::diagonal(g); sites]),
            Letter::Gen(id) => self.primitive_nfold(*id, sites),
        }
    }

    fn word_nfold(&self, w: &[Letter], sites: usize) -> Operator {
        let dim = self.local_dim().pow(sites as u32);
        w.iter().fold(Operator::identity(dim), |acc, l| &acc * &self.letter_nfold(l, sites))
    }

    /// `Σ_k L^{⊗(k−1)} ⊗ X ⊗ R^{⊗(N−k)}` for a primitive generator.
    fn primitive_nfold(&self, id: GenId, sites: usize) -> Operator {
        let x = self.matrix(id);
        if sites == 1 {
            return x;
        }
        let (left, right) = self.twists(id);
        let (l, r) = (Operator::diagonal(&left), Operator::diagonal(&right));
        let dim = self.local_dim().pow(sites as u32);
        let mut total = Operator::zeros(dim);
        for k in 0..sites {
            let mut factors = vec![l.clone(); k];
            factors.push(x.clone());
            factors.extend(std::iter::repeat_n(r.clone(), sites - k - 1));
            total = &total + &kron_all(&factors);
        }
        total
    }

    fn eval_two_site(&self, t: &TwoSite) -> Operator {
        let d = self.local_dim();
        let mut total = Operator::zeros(d * d);
        for (c, l, r) in &t.terms {
            total = &total + &kron(&self.word_matrix(l), &self.word_matrix(r)).scale(*c);
        }
        total
    }

    /// Two-site coproduct `Δ(X)` as a matrix.
    pub fn coproduct(&self, id: GenId) -> Operator {
        self.eval_two_site(&self.two_site(id))
    }

    /// N-fold coproduct of one generator. The Cn generator `E_n^±` is built
    /// by applying the commutator ladder to the N-fold coproducts of `E_0^±`
    /// and `E_j^∓`.
    pub fn nfold(&self, id: GenId, sites: usize) -> Operator {
        if !self.is_ladder(id) {
            return self.primitive_nfold(id, sites);
        }
        let (x0, down): (GenId, fn(usize) -> GenId) = match id {
            GenId::Raise(_) => (GenId::Raise0, GenId::Lower),
            _ => (GenId::Lower0, GenId::Raise),
        };
        let ys: Vec<Operator> = (1..self.rank).map(|j| self.primitive_nfold(down(j), sites)).collect();
        ladder(&self.primitive_nfold(x0, sites), &ys)
    }

    /// N-fold coproduct by left nesting of the two-site coproduct,
    /// `Δ_(N) = (Δ_(N−1) ⊗ id)∘Δ`.
    pub fn nfold_by_nesting(&self, id: GenId, sites: usize) -> Operator {
        if sites == 1 {
            return self.matrix(id);
        }
        let t = self.two_site(id);
        let dim = self.local_dim().pow(sites as u32);
        let mut total = Operator::zeros(dim);
        for (c, l, r) in &t.terms {
            total = &total + &kron(&self.word_nfold(l, sites - 1), &self.word_matrix(r)).scale(*c);
        }
        total
    }

    /// `(Δ⊗id)Δ(X)` and `(id⊗Δ)Δ(X)` on three sites.
    pub fn coassociativity_pair(&self, id: GenId) -> (Operator, Operator) {
        let t = self.two_site(id);
        let d3 = self.local_dim().pow(3);
        let mut left = Operator::zeros(d3);
        let mut right = Operator::zeros(d3);
        for (c, l, r) in &t.terms {
            left = &left + &kron(&self.word_nfold(l, 2), &self.word_matrix(r)).scale(*c);
            right = &right + &kron(&self.word_matrix(l), &self.word_nfold(r, 2)).scale(*c);
        }
        (left, right)
    }

    /// `Δ_(N)` of every Cartan, raising and lowering generator.
    pub fn nfold_coproduct(&self, sites: usize) -> Result<CoproductSet> {
        self.nfold_coproduct_with_cap(sites, DEFAULT_COPRODUCT_CAP)
    }

    pub fn nfold_coproduct_with_cap(&self, sites: usize, cap: usize) -> Result<CoproductSet> {
        if sites == 0 {
            return Err(Error::InvalidParameter("coproducts need at least one site".into()));
        }
        let dim = self.local_dim().pow(sites as u32);
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        let n = self.rank;
        Ok(CoproductSet {
            sites,
            algebra: self.algebra,
            cartan: (1..=n).map(|j| self.nfold(GenId::Cartan(j), sites)).collect(),
            raising: (1..=n).map(|j| self.nfold(GenId::Raise(j), sites)).collect(),
            lowering: (1..=n).map(|j| self.nfold(GenId::Lower(j), sites)).collect(),
        })
    }
}

/// N-site matrices of the coproducts of all generators.
#[derive(Clone, Debug)]
pub struct CoproductSet {
    pub sites: usize,
    pub algebra: Algebra,
    pub cartan: Vec<Operator>,
    pub raising: Vec<Operator>,
    pub lowering: Vec<Operator>,
}

impl CoproductSet {
    pub fn dim(&self) -> usize {
        self.cartan[0].dim()
    }

    pub fn all(&self) -> impl Iterator<Item = &Operator> {
        self.cartan.iter().chain(&self.raising).chain(&self.lowering)
    }

    /// Cartan eigenvalues of a computational basis state.
    pub fn basis_weight(&self, index: usize) -> Vec<i64> {
        self.cartan.iter().map(|h| h.get(index, index).re.round() as i64).collect()
    }
}

/// `max_X ‖[Δ_(N)(X), H]‖ / (‖Δ_(N)(X)‖ ‖H‖)`.
pub fn symmetry_residual(cop: &CoproductSet, h: &Operator) -> Result<f64> {
    if cop.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!("coproducts act on {}, operator on {}", cop.dim(), h.dim())));
    }
    let hn = h.norm().max(f64::MIN_POSITIVE);
    Ok(cop.all().map(|x| x.commutator(h).norm() / (x.norm().max(f64::MIN_POSITIVE) * hn)).fold(0.0, f64::max))
}

/// Orthonormal basis of the column span of `vectors`; rejects bases whose
/// condition number exceeds [`MAX_CONDITION`].
pub fn orthonormalize(vectors: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let k = vectors.ncols();
    if k == 0 {
        return Ok(vectors.clone());
    }
    let svd = vectors.clone().svd(true, false);
    let s = &svd.singular_values;
    let smax = s.max();
    let smin = s.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    Ok(svd.u.expect("requested").columns(0, k).into_owned())
}

/// Orthonormal basis of the joint kernel of all `Δ_(N)(E_i^+)` inside the
/// span of `eigenspace` (columns).
pub fn highest_weight_vectors(cop: &CoproductSet, eigenspace: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let basis = orthonormalize(eigenspace)?;
    let k = basis.ncols();
    let dim = basis.nrows();
    if k == 0 {
        return Ok(basis);
    }
    let mut stacked = DMatrix::<C64>::zeros(dim * cop.raising.len(), k);
    for (i, e) in cop.raising.iter().enumerate() {
        let block = e.matrix() * &basis;
        stacked.view_mut((i * dim, 0), (dim, k)).copy_from(&block);
    }
    let svd = stacked.svd(false, true);
    let s = &svd.singular_values;
    let v_t = svd.v_t.expect("requested");
    let threshold = HW_THRESHOLD * s.max().max(1.0);
    let rank = s.iter().filter(|&&x| x > threshold).count();
    // Rows of V^H beyond the rank span the kernel.
    let null: Vec<usize> = (0..s.len()).filter(|&i| s[i] <= threshold).collect();
    let mut kernel = DMatrix::<C64>::zeros(k, k - rank);
    for (c, &i) in null.iter().enumerate() {
        for r in 0..k {
            kernel[(r, c)] = v_t[(i, r)].conj();
        }
    }
    Ok(basis * kernel)
}

/// Dimension of the joint kernel of the raising coproducts on the span.
pub fn highest_weight_count(cop: &CoproductSet, eigenspace: &DMatrix<C64>) -> Result<usize> {
    Ok(highest_weight_vectors(cop, eigenspace)?.ncols())
}

/// Two-site q-relations: (4.6)-type for Bn, (4.29)-type for Cn.
pub fn q_relation_report(g: &GeneratorSet, tol: f64) -> Report {
    let n = g.rank;
    let d = g.local_dim();
    let eta = g.eta;
    let q = (2.0 * eta).exp();
    let id2 = Operator::identity(d * d);
    let delta_h = |j: usize| {
        if j == 0 || j > n {
            Operator::zeros(d * d)
        } else {
            g.coproduct(GenId::Cartan(j))
        }
    };
    let omega = |i: usize, j: usize| {
        if i.abs_diff(j) == 1 {
            let h = &g.cartan[i.max(j) - 1];
            kron(&h.exp_diagonal(C64::new(0.0, PI)), &Operator::identity(d))
        } else {
            id2.clone()
        }
    };
    let mut report = Report::default();
    let mut check = Check::new("q_relations", tol);
    match g.algebra {
        Algebra::B => {
            for i in 1..=n {
                for j in 1..=n {
                    let ei = g.coproduct(GenId::Raise(i));
                    let fj = g.coproduct(GenId::Lower(j));
                    let om = omega(i, j);
                    let lhs = &(&(&om * &ei) * &fj) - &(&(&fj * &ei) * &om);
                    let rhs = if i == j {
                        let x = &delta_h(i) - &delta_h(i + 1);
                        (&x.exp_diagonal(2.0 * eta) - &x.exp_diagonal(-2.0 * eta)).scale((q - q.inv()).inv())
                    } else {
                        Operator::zeros(d * d)
                    };
                    check.record(crate::tensor::relative_residual(&lhs, &rhs));
                }
            }
        }
        Algebra::C => {
            for i in 1..n {
                for j in 1..n {
                    let ei = g.coproduct(GenId::Raise(i));
                    let fj = g.coproduct(GenId::Lower(j));
                    let (lhs, rhs) = if i == j {
                        let lhs = &(&ei * &fj) - &(&fj * &ei).scale((4.0 * eta).exp());
                        let x = &delta_h(i) - &delta_h(i + 1);
                        let rhs = (&x.exp_diagonal(-4.0 * eta) - &id2).scale(((-4.0 * eta).exp() - 1.0).inv());
                        (lhs, rhs)
                    } else if i.abs_diff(j) == 1 {
                        let om = omega(i, j);
                        ((&(&om * &ei) * &fj).scale((2.0 * eta).exp()), &(&fj * &ei) * &om)
                    } else {
                        (&ei * &fj, &fj * &ei)
                    };
                    check.record(crate::tensor::relative_residual(&lhs, &rhs));
                }
            }
        }
    }
    report.push(check);
    report
}

/// Root relations `[H_i, E_j^±] = ±α_i^{(j)} E_j^±`, maximum deviation.
pub fn root_relation_residual(g: &GeneratorSet) -> f64 {
    let roots = simple_roots(g.algebra, g.rank);
    let mut worst: f64 = 0.0;
    for i in 0..g.rank {
        for j in 0..g.rank {
            let a = C64::new(roots[j][i] as f64, 0.0);
            let up = &g.cartan[i].commutator(&g.raising[j]) - &g.raising[j].scale(a);
            let down = &g.cartan[i].commutator(&g.lowering[j]) - &g.lowering[j].scale(-a);
            worst = worst.max(up.max_abs()).max(down.max_abs());
        }
    }
    worst
}

/// Coassociativity, ladder and nesting checks of the coproducts.
pub fn coproduct_report(g: &GeneratorSet, tol: f64) -> Report {
    let mut report = Report::default();
    let mut coassoc = Check::new("coassociativity", tol);
    let mut ids = g.ids();
    if g.algebra == Algebra::C {
        ids.extend([GenId::Raise0, GenId::Lower0]);
    }
    for &id in &ids {
        let (l, r) = g.coassociativity_pair(id);
        coassoc.record(crate::tensor::relative_residual(&l, &r));
    }
    report.push(coassoc);
    if g.algebra == Algebra::C {
        let n = g.rank;
        let one_site = ladder(
            g.extra_raising.as_ref().expect("Cn"),
            &(1..n).map(|j| g.lowering[j - 1].clone()).collect::<Vec<_>>(),
        );
        report.push(Check::single("ladder_one_site", (&one_site - &g.raising[n - 1]).max_abs(), tol));
        let mut nesting = Check::new("ladder_nesting", tol);
        for sites in 2..=3 {
            if g.local_dim().pow(sites as u32) > DEFAULT_COPRODUCT_CAP {
                break;
            }
            for id in [GenId::Raise(n), GenId::Lower(n)] {
                nesting.record(crate::tensor::relative_residual(&g.nfold(id, sites), &g.nfold_by_nesting(id, sites)));
            }
        }
        report.push(nesting);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{hamiltonian, two_site_h, two_site_h_tilde};
    use crate::params::BoundarySet;
    use crate::tensor::{eig, relative_residual};

    fn params(n: usize, sites: usize, set: BoundarySet) -> ModelParams {
        ModelParams::reference(n, sites, set)
    }

    #[test]
    fn bn_rank_one_matrices() {
        let g = bn_generators(&params(1, 2, BoundarySet::I));
        assert_eq!(g.cartan[0].diag(), vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]);
        assert_eq!(g.raising[0].matrix(), (&e(3, 1, 2) + &e(3, 2, 3)).matrix());
    }

    #[test]
    fn root_relations_exact() {
        for n in 1..=3 {
            assert_eq!(root_relation_residual(&bn_generators(&params(n, 2, BoundarySet::I))), 0.0);
            assert_eq!(root_relation_residual(&cn_generators(&params(n, 2, BoundarySet::II))), 0.0);
        }
    }

    #[test]
    fn cn_structure() {
        let g = cn_generators(&params(1, 2, BoundarySet::II));
        assert_eq!(g.raising[0].matrix(), e(3, 1, 3).matrix());
        assert_eq!(g.extra_raising.as_ref().unwrap().matrix(), g.raising[0].matrix());
        let g = cn_generators(&params(2, 2, BoundarySet::II));
        let built = ladder(g.extra_raising.as_ref().unwrap(), &[g.lowering[0].clone()]);
        assert_eq!(built.matrix(), e(5, 2, 4).matrix());
        for n in 1..=3 {
            let g = cn_generators(&params(n, 2, BoundarySet::II));
            let d = g.local_dim();
            let u = e(d, n + 1, n + 1);
            for x in g.cartan.iter().chain(&g.raising).chain(&g.lowering) {
                assert_eq!(x.commutator(&u).max_abs(), 0.0);
                for k in 0..d {
                    assert_eq!(x.get(n, k), C64::new(0.0, 0.0));
                    assert_eq!(x.get(k, n), C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn q_relations() {
        for n in 1..=3 {
            let b = q_relation_report(&bn_generators(&params(n, 2, BoundarySet::I)), 1e-9);
            assert!(b.pass(), "B{n}: {b:#?}");
            let c = q_relation_report(&cn_generators(&params(n, 2, BoundarySet::II)), 1e-9);
            assert!(c.pass(), "C{n}: {c:#?}");
        }
    }

    #[test]
    fn coproducts() {
        for n in 1..=3 {
            for g in [bn_generators(&params(n, 2, BoundarySet::I)), cn_generators(&params(n, 2, BoundarySet::II))] {
                let report = coproduct_report(&g, 1e-10);
                assert!(report.pass(), "{} n={n}: {report:#?}", g.algebra);
            }
        }
    }

    #[test]
    fn nfold_cartan_and_unrolled_e0() {
        let g = cn_generators(&params(1, 3, BoundarySet::II));
        let cop = g.nfold_coproduct(3).unwrap();
        for idx in 0..27 {
            let digits = [idx / 9, (idx / 3) % 3, idx % 3];
            let want: i64 = digits.iter().map(|&a| (a == 0) as i64 - (a == 2) as i64).sum();
            assert_eq!(cop.basis_weight(idx), vec![want]);
        }
        let e0 = g.extra_raising.clone().unwrap();
        let gh = g.cartan[0].exp_diagonal(4.0 * g.eta);
        let id = Operator::identity(3);
        let want = &(&kron_all(&[e0.clone(), id.clone(), id.clone()]) + &kron_all(&[gh.clone(), e0.clone(), id.clone()]))
            + &kron_all(&[gh.clone(), gh, e0]);
        assert!((&g.nfold(GenId::Raise0, 3) - &want).max_abs() < 1e-14);
    }

    #[test]
    fn two_site_symmetry() {
        for n in 1..=3 {
            let p = params(n, 2, BoundarySet::I);
            let cop = bn_generators(&p).nfold_coproduct(2).unwrap();
            assert!(symmetry_residual(&cop, &two_site_h(&p)).unwrap() < 1e-9);
            let p = params(n, 2, BoundarySet::II);
            let cop = cn_generators(&p).nfold_coproduct(2).unwrap();
            assert!(symmetry_residual(&cop, &two_site_h_tilde(&p).unwrap()).unwrap() < 1e-9);
        }
    }

    #[test]
    fn chain_symmetry_and_negative_control() {
        for (n, sites) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
            let p1 = params(n, sites, BoundarySet::I);
            let h1 = hamiltonian(&p1).unwrap();
            assert!(symmetry_residual(&bn_generators(&p1).nfold_coproduct(sites).unwrap(), &h1).unwrap() < 1e-9);
            let p2 = params(n, sites, BoundarySet::II);
            let h2 = hamiltonian(&p2).unwrap();
            assert!(symmetry_residual(&cn_generators(&p2).nfold_coproduct(sites).unwrap(), &h2).unwrap() < 1e-9);
            let wrong = bn_generators(&p2).nfold_coproduct(sites).unwrap();
            assert!(symmetry_residual(&wrong, &h2).unwrap() > 1e-3);
        }
        let cop = bn_generators(&params(1, 2, BoundarySet::I)).nfold_coproduct(2).unwrap();
        assert!(symmetry_residual(&cop, &Operator::identity(27)).is_err());
    }

    #[test]
    fn highest_weight_counts_rank_one() {
        let p = params(1, 2, BoundarySet::I);
        let h = hamiltonian(&p).unwrap();
        let cop = bn_generators(&p).nfold_coproduct(2).unwrap();
        let ev = eig(&h).unwrap();
        // Group eigenvectors by eigenvalue and count highest-weight states.
        let mut used = vec![false; 9];
        let mut counts = Vec::new();
        for i in 0..9 {
            if used[i] {
                continue;
            }
            let members: Vec<usize> = (0..9).filter(|&j| (ev.values[j] - ev.values[i]).norm() < 1e-8).collect();
            for &j in &members {
                used[j] = true;
            }
            let space = DMatrix::from_columns(&members.iter().map(|&j| ev.vectors.column(j)).collect::<Vec<_>>());
            counts.push((members.len(), highest_weight_count(&cop, &space).unwrap()));
        }
        counts.sort();
        assert_eq!(counts, vec![(1, 1), (3, 1), (5, 1)]);
        let single = DMatrix::from_column_slice(9, 1, &[C64::new(1.0, 0.0); 9]);
        assert!(highest_weight_count(&cop, &single).unwrap() <= 1);
        let id = relative_residual(&Operator::identity(2), &Operator::identity(2));
        assert_eq!(id, 0.0);
    }

    #[test]
    fn ill_conditioned_basis_rejected() {
        let mut m = DMatrix::<C64>::zeros(4, 2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(0, 1)] = C64::new(1.0, 0.0);
        m[(1, 1)] = C64::new(1e-15, 0.0);
        assert!(matches!(orthonormalize(&m), Err(Error::IllConditioned { .. })));
    }
}
