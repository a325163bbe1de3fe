//! Exact diagonalization by weight sectors, degeneracy clustering, and
//! reconciliation of the numerical spectrum with Bethe solutions and with
//! the tensor-power decomposition.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bethe::{cartan_weights, BetheSolution, SolutionOracle, PROBES};
use crate::chain::{hamiltonian_with_cap, transfer_matrix_with_cap, DEFAULT_CHAIN_CAP};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::qgroup::{generators, highest_weight_vectors, CoproductSet};
use crate::report::{Check, Report};
use crate::rep::{tensor_power_decompose, weight_to_label, weyl_dimension, Decomposition, IrrepLabel, WeightVector};
use crate::tensor::{eigenvalues, Operator};

/// Eigenvalues closer than `CLUSTER_TOLERANCE · max(1, |λ|)` are one cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-8;
/// Bound on `‖H V − V (V⁺ H V)‖ / max(1, ‖H‖)` for an accepted cluster.
pub const INVARIANT_TOLERANCE: f64 = 1e-7;
/// Relative tolerance for matching `Λ` and energies to numerical eigenvalues.
pub const MATCH_TOLERANCE: f64 = 1e-7;
/// Clusters closer than this multiple of the cluster tolerance are flagged.
const AMBIGUITY_FACTOR: f64 = 10.0;

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() < tol * a.norm().max(b.norm()).max(1.0)
}

/// Single-linkage groups of `values` under [`close`].
fn cluster_values(values: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if close(values[i], values[j], tol) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

fn mean(values: impl Iterator<Item = C64>) -> C64 {
    let (sum, count) = values.fold((C64::new(0.0, 0.0), 0usize), |(s, c), v| (s + v, c + 1));
    sum / count as f64
}

/// Part of a cluster's eigenspace inside one weight sector, as orthonormal
/// columns on the full chain space.
#[derive(Clone, Debug)]
pub struct SectorPiece {
    pub weight: Vec<i64>,
    pub eigenvalue: C64,
    pub vectors: DMatrix<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HighestWeight {
    pub weight: Vec<i64>,
    pub label: Option<IrrepLabel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub eigenvalue: C64,
    pub degeneracy: usize,
    /// `(weight, number of states)` pairs, sorted by weight.
    pub weight_sectors: Vec<(Vec<i64>, usize)>,
    pub invariant_residual: f64,
    pub highest_weight_count: usize,
    pub highest_weights: Vec<HighestWeight>,
    /// Eigenvalues of `t(u*)` restricted to the cluster, one list per probe.
    pub transfer_eigenvalues: Vec<Vec<C64>>,
    /// Indices into [`SpectrumReport::solutions`].
    pub matched_solutions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ambiguity {
    pub clusters: (usize, usize),
    pub gap: f64,
}

/// Matched Bethe solutions per Dynkin label against the predicted
/// multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelCount {
    pub label: IrrepLabel,
    pub matched: u64,
    pub predicted: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub params: ModelParams,
    pub clusters: Vec<Cluster>,
    pub ambiguities: Vec<Ambiguity>,
    pub decomposition_observed: Decomposition,
    pub decomposition_predicted: Decomposition,
    /// Solutions offered to [`reconcile`], in the order received.
    pub solutions: Vec<BetheSolution>,
    pub probes: Vec<C64>,
    pub commutator_residual: Option<f64>,
    pub unmatched_clusters: Vec<usize>,
    pub unmatched_solutions: Vec<usize>,
    pub label_counts: Vec<LabelCount>,
    /// Problems found while clustering.
    pub failures: Vec<String>,
    /// Problems found by the last [`reconcile`].
    pub reconcile_failures: Vec<String>,
}

impl SpectrumReport {
    pub fn total_degeneracy(&self) -> usize {
        self.clusters.iter().map(|c| c.degeneracy).sum()
    }

    pub fn degeneracies(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.degeneracy).collect()
    }

    /// Clustering and highest-weight counting agree with representation
    /// theory, independently of any Bethe input.
    pub fn decomposition_consistent(&self) -> bool {
        self.decomposition_observed == self.decomposition_predicted
            && self.total_degeneracy() as u64 == self.decomposition_predicted.total_dimension()
    }

    /// Every cluster and every solution is matched and no check failed.
    pub fn fully_reconciled(&self) -> bool {
        self.decomposition_consistent()
            && self.unmatched_clusters.is_empty()
            && self.unmatched_solutions.is_empty()
            && self.failures.is_empty()
            && self.reconcile_failures.is_empty()
            && self.label_counts.iter().all(|c| c.matched == c.predicted)
    }

    /// Total dimension of the clusters left without a matched solution.
    pub fn unmatched_dimension(&self) -> u64 {
        self.unmatched_clusters.iter().map(|&k| self.clusters[k].degeneracy as u64).sum()
    }
}

/// A spectrum report together with the cluster eigenspaces it was built from.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub report: SpectrumReport,
    pub bases: Vec<Vec<SectorPiece>>,
    pub coproducts: CoproductSet,
}

impl Diagonalization {
    /// Orthonormal basis of cluster `k` on the full chain space.
    pub fn cluster_basis(&self, k: usize) -> DMatrix<C64> {
        let pieces = &self.bases[k];
        let dim = self.coproducts.dim();
        let cols: usize = pieces.iter().map(|p| p.vectors.ncols()).sum();
        let mut v = DMatrix::<C64>::zeros(dim, cols);
        let mut at = 0;
        for p in pieces {
            v.view_mut((0, at), (dim, p.vectors.ncols())).copy_from(&p.vectors);
            at += p.vectors.ncols();
        }
        v
    }
}

/// `k` right-singular vectors of `b − λ` with the smallest singular values.
fn near_null_space(b: &DMatrix<C64>, lambda: C64, k: usize) -> DMatrix<C64> {
    let s = b.nrows();
    let shifted = b - DMatrix::<C64>::identity(s, s) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    DMatrix::from_fn(s, k, |r, c| v_t[(order[c], r)].conj())
}

fn invariant_residual(b: &DMatrix<C64>, v: &DMatrix<C64>) -> f64 {
    let bv = b * v;
    let rayleigh = v.adjoint() * &bv;
    (bv - v * rayleigh).norm() / b.norm().max(1.0)
}

struct SectorResult {
    pieces: Vec<SectorPiece>,
    residual: f64,
}

fn diagonalize_sector(h: &DMatrix<C64>, weight: &[i64], indices: &[usize], dim: usize) -> Result<SectorResult> {
    let s = indices.len();
    let block = DMatrix::from_fn(s, s, |a, b| h[(indices[a], indices[b])]);
    let values = eigenvalues(&Operator::from_matrix(block.clone()))?;
    let mut pieces = Vec::new();
    let mut residual: f64 = 0.0;
    for group in cluster_values(&values, CLUSTER_TOLERANCE) {
        let lambda = mean(group.iter().map(|&i| values[i]));
        let local = near_null_space(&block, lambda, group.len());
        residual = residual.max(invariant_residual(&block, &local));
        let mut vectors = DMatrix::<C64>::zeros(dim, group.len());
        for (a, &row) in indices.iter().enumerate() {
            for c in 0..group.len() {
                vectors[(row, c)] = local[(a, c)];
            }
        }
        pieces.push(SectorPiece { weight: weight.to_vec(), eigenvalue: lambda, vectors });
    }
    Ok(SectorResult { pieces, residual })
}

/// Clusters the spectrum of `h`, sector by sector, and counts highest-weight
/// vectors in every cluster.
pub fn sector_diagonalize(h: &Operator, p: &ModelParams) -> Result<Diagonalization> {
    let dim = p.chain_dim();
    if h.dim() != dim {
        return Err(Error::DimensionMismatch(format!("operator on {}, chain space {dim}", h.dim())));
    }
    let coproducts = generators(p).nfold_coproduct_with_cap(p.sites, DEFAULT_CHAIN_CAP)?;
    let scale = h.norm().max(1.0);
    for (j, cartan) in coproducts.cartan.iter().enumerate() {
        let r = cartan.commutator(h).norm() / (scale * cartan.norm().max(1.0));
        if r > 1e-10 {
            return Err(Error::NotSymmetric(format!("commutator with Cartan generator {} is {r:.3e}", j + 1)));
        }
    }
    let mut sectors: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for i in 0..dim {
        sectors.entry(coproducts.basis_weight(i)).or_default().push(i);
    }
    let sectors: Vec<(Vec<i64>, Vec<usize>)> = sectors.into_iter().collect();
    let results: Vec<Result<SectorResult>> = sectors
        .par_iter()
        .map(|(w, idx)| diagonalize_sector(h.matrix(), w, idx, dim))
        .collect();
    let mut pieces = Vec::new();
    let mut sector_residual: f64 = 0.0;
    for r in results {
        let r = r?;
        sector_residual = sector_residual.max(r.residual);
        pieces.extend(r.pieces);
    }

    let piece_values: Vec<C64> = pieces.iter().map(|p| p.eigenvalue).collect();
    let mut groups = cluster_values(&piece_values, CLUSTER_TOLERANCE);
    let centre = |g: &Vec<usize>| {
        let total: usize = g.iter().map(|&i| pieces[i].vectors.ncols()).sum();
        g.iter().map(|&i| pieces[i].eigenvalue * pieces[i].vectors.ncols() as f64).sum::<C64>() / total as f64
    };
    groups.sort_by(|a, b| {
        let (ca, cb) = (centre(a), centre(b));
        ca.re.total_cmp(&cb.re).then(ca.im.total_cmp(&cb.im))
    });

    let algebra = p.algebra();
    let mut failures = Vec::new();
    let mut clusters = Vec::with_capacity(groups.len());
    let mut bases = Vec::with_capacity(groups.len());
    let mut observed: BTreeMap<IrrepLabel, u64> = BTreeMap::new();
    for g in &groups {
        let eigenvalue = centre(g);
        let mut members: Vec<SectorPiece> = g.iter().map(|&i| pieces[i].clone()).collect();
        members.sort_by(|a, b| a.weight.cmp(&b.weight));
        let mut weight_sectors: Vec<(Vec<i64>, usize)> = Vec::new();
        let mut highest_weights = Vec::new();
        for piece in &members {
            weight_sectors.push((piece.weight.clone(), piece.vectors.ncols()));
            let kernel = highest_weight_vectors(&coproducts, &piece.vectors)?;
            for _ in 0..kernel.ncols() {
                let label = weight_to_label(&WeightVector::from_integers(&piece.weight), algebra).ok();
                match &label {
                    Some(l) => *observed.entry(l.clone()).or_insert(0) += 1,
                    None => failures.push(format!("non-dominant highest weight {:?} at {eigenvalue}", piece.weight)),
                }
                highest_weights.push(HighestWeight { weight: piece.weight.clone(), label });
            }
        }
        let degeneracy = weight_sectors.iter().map(|(_, k)| k).sum();
        let spanned: u64 = highest_weights.iter().filter_map(|w| w.label.as_ref()).map(weyl_dimension).sum();
        if spanned != degeneracy as u64 {
            failures.push(format!("cluster at {eigenvalue}: degeneracy {degeneracy} but highest weights span {spanned}"));
        }
        clusters.push(Cluster {
            eigenvalue,
            degeneracy,
            weight_sectors,
            invariant_residual: sector_residual,
            highest_weight_count: highest_weights.len(),
            highest_weights,
            transfer_eigenvalues: Vec::new(),
            matched_solutions: Vec::new(),
        });
        bases.push(members);
    }
    if sector_residual > INVARIANT_TOLERANCE {
        failures.push(format!("invariant-subspace residual {sector_residual:.3e}"));
    }
    let mut ambiguities = Vec::new();
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            let (a, b) = (clusters[i].eigenvalue, clusters[j].eigenvalue);
            if close(a, b, AMBIGUITY_FACTOR * CLUSTER_TOLERANCE) {
                ambiguities.push(Ambiguity { clusters: (i, j), gap: (a - b).norm() });
            }
        }
    }
    let predicted = tensor_power_decompose(p.rank, p.sites, algebra)?;
    let report = SpectrumReport {
        params: *p,
        clusters,
        ambiguities,
        decomposition_observed: Decomposition {
            algebra,
            rank: p.rank,
            sites: p.sites,
            entries: observed.into_iter().collect(),
        },
        decomposition_predicted: predicted,
        solutions: Vec::new(),
        probes: Vec::new(),
        commutator_residual: None,
        unmatched_clusters: Vec::new(),
        unmatched_solutions: Vec::new(),
        label_counts: Vec::new(),
        failures,
        reconcile_failures: Vec::new(),
    };
    Ok(Diagonalization { report, bases, coproducts })
}

/// Hamiltonian of `p`, diagonalized by sectors, under the default cap.
pub fn spectrum(p: &ModelParams) -> Result<Diagonalization> {
    spectrum_with_cap(p, DEFAULT_CHAIN_CAP)
}

pub fn spectrum_with_cap(p: &ModelParams, cap: usize) -> Result<Diagonalization> {
    let h = hamiltonian_with_cap(p, cap)?;
    sector_diagonalize(&h, p)
}

/// Matches Bethe solutions to clusters through `t(u*)` at the probes and
/// the energy, then checks degeneracies, multiplicities and highest
/// weights.
pub fn reconcile(diag: &mut Diagonalization, solutions: &[BetheSolution], probes: &[C64]) -> Result<()> {
    let p = diag.report.params;
    let h = hamiltonian_with_cap(&p, DEFAULT_CHAIN_CAP)?;
    let transfers: Vec<Operator> = probes.iter().map(|&u| transfer_matrix_with_cap(u, &p, DEFAULT_CHAIN_CAP)).collect::<Result<_>>()?;
    let commutator = transfers
        .iter()
        .map(|t| t.commutator(&h).norm() / (t.norm() * h.norm()).max(1.0))
        .fold(0.0, f64::max);

    for k in 0..diag.report.clusters.len() {
        let v = diag.cluster_basis(k);
        let vh = v.adjoint();
        let mut per_probe = Vec::with_capacity(transfers.len());
        for t in &transfers {
            let restricted = &vh * t.matrix() * &v;
            per_probe.push(eigenvalues(&Operator::from_matrix(restricted))?);
        }
        diag.report.clusters[k].transfer_eigenvalues = per_probe;
        diag.report.clusters[k].matched_solutions.clear();
    }

    let report = &mut diag.report;
    report.solutions = solutions.to_vec();
    report.probes = probes.to_vec();
    report.commutator_residual = Some(commutator);
    report.unmatched_clusters.clear();
    report.unmatched_solutions.clear();
    report.label_counts.clear();
    report.reconcile_failures.clear();
    if commutator > 1e-8 {
        report.reconcile_failures.push(format!("[H, t(u*)] residual {commutator:.3e}"));
    }

    for (s_index, s) in solutions.iter().enumerate() {
        if s.lambda_at_probes.len() != probes.len() {
            return Err(Error::DimensionMismatch("solution evaluated at different probes".into()));
        }
        let mut best: Option<(usize, f64)> = None;
        for (k, c) in report.clusters.iter().enumerate() {
            let de = (s.energy - c.eigenvalue).norm() / s.energy.norm().max(1.0);
            if de >= MATCH_TOLERANCE {
                continue;
            }
            let mut worst = de;
            for (lam, values) in s.lambda_at_probes.iter().zip(&c.transfer_eigenvalues) {
                let d = values.iter().map(|&x| (x - lam).norm() / lam.norm()).fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
            if worst < MATCH_TOLERANCE && best.is_none_or(|(_, b)| worst < b) {
                best = Some((k, worst));
            }
        }
        match best {
            Some((k, _)) => report.clusters[k].matched_solutions.push(s_index),
            None => report.unmatched_solutions.push(s_index),
        }
    }

    let mut matched_labels: BTreeMap<IrrepLabel, u64> = BTreeMap::new();
    for (k, c) in report.clusters.iter().enumerate() {
        if c.matched_solutions.is_empty() {
            report.unmatched_clusters.push(k);
            continue;
        }
        let dims: u64 = c.matched_solutions.iter().map(|&i| solutions[i].dimension).sum();
        if dims != c.degeneracy as u64 {
            report.reconcile_failures.push(format!("cluster {k}: degeneracy {} but matched dimensions sum to {dims}", c.degeneracy));
        }
        if c.highest_weight_count != c.matched_solutions.len() {
            report.reconcile_failures.push(format!(
                "cluster {k}: {} highest-weight vectors for {} matched solutions",
                c.highest_weight_count,
                c.matched_solutions.len()
            ));
        }
        for &i in &c.matched_solutions {
            *matched_labels.entry(solutions[i].dynkin.clone()).or_insert(0) += 1;
        }
    }
    let mut labels: BTreeMap<IrrepLabel, (u64, u64)> = BTreeMap::new();
    for (label, count) in &report.decomposition_predicted.entries {
        labels.entry(label.clone()).or_default().1 = *count;
    }
    for (label, count) in matched_labels {
        labels.entry(label).or_default().0 = count;
    }
    report.label_counts =
        labels.into_iter().map(|(label, (matched, predicted))| LabelCount { label, matched, predicted }).collect();
    let cartan = cartan_eigen_check(report);
    for c in cartan.checks.iter().filter(|c| !c.pass) {
        report.reconcile_failures.push(format!("{} failed", c.name));
    }
    Ok(())
}

/// For every matched cluster, the weights of its highest-weight vectors
/// equal the Cartan eigenvalues predicted from the matched cardinalities.
pub fn cartan_eigen_check(report: &SpectrumReport) -> Report {
    let mut out = Report::default();
    let sites = report.params.sites;
    for (k, c) in report.clusters.iter().enumerate() {
        if c.matched_solutions.is_empty() {
            continue;
        }
        let mut expected: Vec<Vec<i64>> = c
            .matched_solutions
            .iter()
            .map(|&i| cartan_weights(&report.solutions[i].cardinalities(), sites).twice.iter().map(|t| t / 2).collect())
            .collect();
        let mut observed: Vec<Vec<i64>> = c.highest_weights.iter().map(|w| w.weight.clone()).collect();
        expected.sort();
        observed.sort();
        let mismatch = if expected == observed { 0.0 } else { 1.0 };
        out.push(Check::single(format!("cartan_weights_cluster_{k}"), mismatch, 0.5));
    }
    out
}

/// Accepts a solution when its energy and `Λ` at both probes match
/// eigenvalues of the dense Hamiltonian and transfer matrices.
#[derive(Clone, Debug)]
pub struct SpectralOracle {
    pub energies: Vec<C64>,
    pub probes: Vec<C64>,
    pub transfer_values: Vec<Vec<C64>>,
}

impl SpectralOracle {
    pub fn new(p: &ModelParams, probes: &[C64]) -> Result<Self> {
        let energies = eigenvalues(&hamiltonian_with_cap(p, DEFAULT_CHAIN_CAP)?)?;
        let transfer_values = probes
            .iter()
            .map(|&u| eigenvalues(&transfer_matrix_with_cap(u, p, DEFAULT_CHAIN_CAP)?))
            .collect::<Result<_>>()?;
        Ok(Self { energies, probes: probes.to_vec(), transfer_values })
    }

    pub fn with_default_probes(p: &ModelParams) -> Result<Self> {
        Self::new(p, &PROBES)
    }

    /// Smallest relative distances `(energy, worst Λ over probes)`.
    pub fn distances(&self, s: &BetheSolution) -> (f64, f64) {
        let de = self.energies.iter().map(|&x| (x - s.energy).norm()).fold(f64::INFINITY, f64::min)
            / s.energy.norm().max(1.0);
        let dl = s
            .lambda_at_probes
            .iter()
            .zip(&self.transfer_values)
            .map(|(lam, values)| values.iter().map(|&x| (x - lam).norm() / lam.norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        (de, dl)
    }
}

impl SolutionOracle for SpectralOracle {
    fn accepts(&self, s: &BetheSolution) -> bool {
        let (de, dl) = self.distances(s);
        s.lambda_at_probes.len() == self.probes.len() && de < MATCH_TOLERANCE && dl < MATCH_TOLERANCE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::{newton_solve, RootConfiguration, SolverOptions};
    use crate::params::{Algebra, BoundarySet};
    use crate::tables;

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    #[test]
    fn clustering_groups_close_values() {
        let v = [C64::new(1.0, 0.0), C64::new(1.0 + 1e-10, 0.0), C64::new(2.0, 0.0), C64::new(1.0, 1e-12)];
        assert_eq!(cluster_values(&v, CLUSTER_TOLERANCE), vec![vec![0, 1, 3], vec![2]]);
    }

    #[test]
    fn degeneracy_patterns() {
        for (n, sites, set, expected) in [
            (1, 2, BoundarySet::I, vec![1, 3, 5]),
            (1, 2, BoundarySet::II, vec![1, 1, 2, 2, 3]),
            (2, 3, BoundarySet::I, vec![5, 5, 5, 10, 30, 35, 35]),
            (2, 1, BoundarySet::I, vec![5]),
        ] {
            let p = ModelParams::reference(n, sites, set);
            let d = spectrum(&p).unwrap();
            assert_eq!(sorted(d.report.degeneracies()), expected, "{n} {sites} {set}");
            assert!(d.report.decomposition_consistent());
            assert!(d.report.failures.is_empty(), "{:?}", d.report.failures);
        }
    }

    #[test]
    fn reconciles_the_tabulated_solutions() {
        for (n, sites, set) in [(2, 2, BoundarySet::I), (1, 2, BoundarySet::II)] {
            let p = ModelParams::reference(n, sites, set);
            let table = tables::find(p.algebra(), n, sites).unwrap();
            let mut solutions = Vec::new();
            for row in &table.rows {
                for s in row.solutions.iter().flatten() {
                    solutions.push(newton_solve(s, &p, &SolverOptions::default()).unwrap());
                }
            }
            let mut d = spectrum(&p).unwrap();
            reconcile(&mut d, &solutions, &PROBES).unwrap();
            assert!(d.report.fully_reconciled(), "{:#?}", d.report.reconcile_failures);
            assert!(cartan_eigen_check(&d.report).pass());
        }
    }

    #[test]
    fn reconciliation_flags_missing_solutions() {
        let p = ModelParams::reference(1, 2, BoundarySet::I);
        let empty = newton_solve(&RootConfiguration::empty(1), &p, &SolverOptions::default()).unwrap();
        let mut d = spectrum(&p).unwrap();
        reconcile(&mut d, &[empty], &PROBES).unwrap();
        assert_eq!(d.report.unmatched_clusters.len(), 2);
        assert!(!d.report.fully_reconciled());
        let top = d.report.clusters.iter().find(|c| c.degeneracy == 5).unwrap();
        assert_eq!(top.highest_weights[0].weight, vec![2]);
        assert_eq!(top.highest_weights[0].label, Some(IrrepLabel::new(Algebra::B, vec![4])));
    }

    #[test]
    fn oracle_rejects_off_shell_roots() {
        let p = ModelParams::reference(1, 2, BoundarySet::I);
        let oracle = SpectralOracle::with_default_probes(&p).unwrap();
        let good = newton_solve(&RootConfiguration::new(vec![vec![C64::new(0.2, 0.0)]]), &p, &SolverOptions::default()).unwrap();
        assert!(oracle.accepts(&good));
        let bad = BetheSolution::from_roots(RootConfiguration::new(vec![vec![C64::new(0.5, 0.1)]]), &p, &PROBES, 0).unwrap();
        assert!(!oracle.accepts(&bad));
    }
}
