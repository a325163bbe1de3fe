//! End-to-end runs: identity verification for one parameter set, and the
//! completeness sweep that solves every admissible sector and reconciles the
//! solutions with exact diagonalization.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bethe::{
    completeness_search, enumerate_admissible, expected_multiplicity, SearchOptions, SearchOutcome, DEFAULT_SEARCH_SEED,
    PROBES,
};
use crate::chain::{hamiltonian, hamiltonian_transfer_residual, transfer_report, DEFAULT_CHAIN_CAP};
use crate::error::{Error, Result};
use crate::kmatrix::{reflection_report, v_sandwich_check};
use crate::params::{BoundarySet, ModelParams};
use crate::qgroup::{bn_generators, coproduct_report, generators, q_relation_report, root_relation_residual, symmetry_residual};
use crate::report::{Check, Report};
use crate::rmatrix::{projector_report, property_report_with_tolerance};
use crate::sampling::{disk_points, sample_pairs, DEFAULT_SEED};
use crate::spectrum::{reconcile, spectrum, SpectralOracle, SpectrumReport};
use crate::tables;
use crate::tensor::{relative_residual, Operator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: usize,
    /// Local identities (R, K, projectors, q-relations).
    pub identity_tolerance: f64,
    /// Transfer-matrix commutativity and `[H, t]`.
    pub chain_tolerance: f64,
    /// `H` against the finite-difference derivative of `t`.
    pub derivative_tolerance: f64,
    pub coassociativity_tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples: 10,
            identity_tolerance: 1e-9,
            chain_tolerance: 1e-8,
            derivative_tolerance: 1e-6,
            coassociativity_tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: ModelParams,
    pub options: VerifyOptions,
    pub identities: Report,
    pub chain: Report,
    pub symmetry: Report,
    pub pass: bool,
}

/// A reproducible dense test operator on two sites.
fn probe_operator(d: usize, seed: u64) -> Operator {
    let values = disk_points(seed, d * d * d * d, 1.0);
    Operator::from_fn(d * d, |i, j| values[i * d * d + j])
}

/// R-matrix, projector and reflection identities at seeded sample pairs.
pub fn identity_report(p: &ModelParams, samples: &[(C64, C64)], seed: u64, tol: f64) -> Result<Report> {
    let mut report = property_report_with_tolerance(p, samples, tol);
    report.extend(projector_report(p, &probe_operator(p.local_dim(), seed), tol));
    report.extend(reflection_report(p, samples, tol));
    if p.boundary == BoundarySet::II {
        report.extend(v_sandwich_check(p, tol)?);
    }
    Ok(report)
}

/// Transfer-matrix commutativity, `[H, t] = 0` and `H ∝ t′(0) + const`.
pub fn chain_report(p: &ModelParams, samples: &[(C64, C64)], opts: &VerifyOptions) -> Result<Report> {
    let mut report = transfer_report(p, samples, opts.chain_tolerance)?;
    report.push(Check::single("hamiltonian_from_transfer", hamiltonian_transfer_residual(p)?, opts.derivative_tolerance));
    Ok(report)
}

/// Generator relations, coproduct properties and the chain symmetry.
pub fn symmetry_report(p: &ModelParams, opts: &VerifyOptions) -> Result<Report> {
    let g = generators(p);
    let mut report = Report::default();
    report.push(Check::single("root_relations", root_relation_residual(&g), 0.0));
    report.extend(q_relation_report(&g, opts.identity_tolerance));
    report.extend(coproduct_report(&g, opts.coassociativity_tolerance));
    let cop = g.nfold_coproduct_with_cap(p.sites, DEFAULT_CHAIN_CAP)?;
    let h = hamiltonian(p)?;
    report.push(Check::single("chain_symmetry", symmetry_residual(&cop, &h)?, opts.identity_tolerance));
    Ok(report)
}

/// Largest `‖[Δ(E_j⁺), H]‖ / (‖Δ(E_j⁺)‖ ‖H‖)` of the `Bn` raising
/// coproducts against the set II Hamiltonian.
pub fn broken_symmetry_residual(p: &ModelParams) -> Result<f64> {
    let p = p.with_boundary(BoundarySet::II);
    let cop = bn_generators(&p).nfold_coproduct_with_cap(p.sites, DEFAULT_CHAIN_CAP)?;
    let h = hamiltonian(&p)?;
    let hn = h.norm().max(f64::MIN_POSITIVE);
    Ok(cop.raising.iter().map(|e| e.commutator(&h).norm() / (e.norm() * hn)).fold(0.0, f64::max))
}

/// `‖H − H†‖ / max(1, ‖H‖)`.
pub fn hermiticity_residual(p: &ModelParams) -> Result<f64> {
    let h = hamiltonian(p)?;
    Ok(relative_residual(&h, &h.adjoint()))
}

pub fn verify(p: &ModelParams, opts: &VerifyOptions) -> Result<VerifyReport> {
    let samples = sample_pairs(opts.seed, opts.samples);
    let identities = identity_report(p, &samples, opts.seed, opts.identity_tolerance)?;
    let chain = chain_report(p, &samples, opts)?;
    let symmetry = symmetry_report(p, opts)?;
    let pass = identities.pass() && chain.pass() && symmetry.pass();
    Ok(VerifyReport { params: *p, options: opts.clone(), identities, chain, symmetry, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellOptions {
    /// Random starts per sector.
    pub starts: usize,
    pub seed: u64,
    /// Seed the search with the embedded printed roots when available.
    pub table_seeds: bool,
    pub probes: [C64; 2],
}

impl Default for CellOptions {
    fn default() -> Self {
        Self { starts: 10_000, seed: DEFAULT_SEARCH_SEED, table_seeds: true, probes: PROBES }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    /// Every predicted solution found and every cluster matched.
    Complete,
    /// Everything found reconciles; the unmatched clusters are exactly the
    /// states of the missing solutions.
    Incomplete,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub params: ModelParams,
    pub sectors: Vec<SearchOutcome>,
    pub spectrum: SpectrumReport,
    /// `Σ found × dimension`.
    pub dimension_sum: u64,
    pub chain_dim: u64,
    pub missing_dimension: u64,
    pub status: CellStatus,
}

impl CellReport {
    pub fn complete(&self) -> bool {
        self.status == CellStatus::Complete
    }

    pub fn sector(&self, m: &[usize]) -> Option<&SearchOutcome> {
        self.sectors.iter().find(|s| s.cardinalities == m)
    }
}

/// Searches one cardinality sector with the spectral oracle.
pub fn solve_sector(m: &[usize], p: &ModelParams, opts: &CellOptions, oracle: &SpectralOracle) -> Result<SearchOutcome> {
    let search = SearchOptions {
        starts: opts.starts,
        seed: opts.seed,
        expected: Some(expected_multiplicity(m, p)?),
        table_seeds: if opts.table_seeds { tables::seeds_for(p, m) } else { Vec::new() },
        solver: crate::bethe::SolverOptions { probes: opts.probes, ..Default::default() },
        ..SearchOptions::default()
    };
    completeness_search(m, p, &search, Some(oracle))
}

/// Solves every admissible sector of `p` and reconciles with the spectrum.
pub fn completeness_cell(p: &ModelParams, opts: &CellOptions) -> Result<CellReport> {
    if opts.probes[0] == opts.probes[1] {
        return Err(Error::InvalidParameter("the two probe points must differ".into()));
    }
    let mut diag = spectrum(p)?;
    let oracle = SpectralOracle::new(p, &opts.probes)?;
    let mut sectors = Vec::new();
    for m in enumerate_admissible(p.rank, p.sites, p.algebra()) {
        sectors.push(solve_sector(&m, p, opts, &oracle)?);
    }
    let solutions: Vec<_> = sectors.iter().flat_map(|s| s.solutions.iter().cloned()).collect();
    reconcile(&mut diag, &solutions, &opts.probes)?;
    let report = diag.report;
    let dimension_sum = sectors.iter().map(|s| s.found() * s.dimension).sum();
    let missing_dimension = sectors.iter().map(|s| s.shortfall().unwrap_or(0) * s.dimension).sum();
    let chain_dim = p.chain_dim() as u64;
    let status = if report.fully_reconciled() && dimension_sum == chain_dim {
        CellStatus::Complete
    } else if missing_dimension > 0
        && report.decomposition_consistent()
        && report.failures.is_empty()
        && report.reconcile_failures.is_empty()
        && report.unmatched_solutions.is_empty()
        && report.unmatched_dimension() == missing_dimension
        && dimension_sum + missing_dimension == chain_dim
    {
        CellStatus::Incomplete
    } else {
        CellStatus::Failed
    };
    Ok(CellReport { params: *p, sectors, spectrum: report, dimension_sum, chain_dim, missing_dimension, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::REFERENCE_ETA;

    #[test]
    fn verify_small_cells() {
        for set in [BoundarySet::I, BoundarySet::II] {
            let p = ModelParams::reference(1, 2, set);
            let r = verify(&p, &VerifyOptions::default()).unwrap();
            assert!(r.pass, "{r:#?}");
        }
    }

    #[test]
    fn broken_symmetry_is_visible() {
        assert!(broken_symmetry_residual(&ModelParams::reference(1, 2, BoundarySet::II)).unwrap() > 1e-3);
    }

    #[test]
    fn rank_one_cells_complete_without_table_seeds() {
        let opts = CellOptions { table_seeds: false, starts: 2000, ..Default::default() };
        for set in [BoundarySet::I, BoundarySet::II] {
            let p = ModelParams::new(1, 2, REFERENCE_ETA, set).unwrap();
            let cell = completeness_cell(&p, &opts).unwrap();
            assert_eq!(cell.status, CellStatus::Complete, "{set}: {:#?}", cell.spectrum.reconcile_failures);
            assert_eq!(cell.dimension_sum, 9);
        }
    }
}
