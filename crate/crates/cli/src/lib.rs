//! Command-line front end: `verify`, `spectrum`, `bethe` and `completeness`.
//!
//! Every command builds a serializable report, prints an aligned table (or
//! the JSON itself with `--json`) and optionally writes the JSON to `--out`.
//! Exit codes: 0 pass, 1 identity or reconciliation failure, 2 bad
//! configuration, 3 dimension cap exceeded.

pub mod config;
mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use a2n2::bethe::{
    completeness_search, enumerate_admissible, expected_multiplicity, BetheSolution, SearchOptions, SearchOutcome,
    SolutionOracle, SolverOptions,
};
use a2n2::pipeline::{completeness_cell, verify, CellOptions, CellStatus, VerifyOptions, VerifyReport};
use a2n2::rep::IrrepLabel;
use a2n2::spectrum::{spectrum_with_cap, SpectralOracle, SpectrumReport};
use a2n2::tables::{self, TableReplication};
use a2n2::{Error, ModelParams};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "a2n2", version, about = "A2n(2) open spin chain: identities, spectra and Bethe roots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the R/K-matrix, transfer-matrix and quantum-group identities.
    Verify(Args),
    /// Exact diagonalization with degeneracy and decomposition analysis.
    Spectrum(Args),
    /// Solve the Bethe equations in one sector (--m) or all (--all).
    Bethe(Args),
    /// Solve every sector and reconcile with the spectrum, over ranges of n and N.
    Completeness(Args),
}

#[derive(Clone, Debug, Default, clap::Args)]
pub struct Args {
    /// Rank n (local dimension 2n+1); a range lo..hi for `completeness`.
    #[arg(long = "n")]
    pub n: Option<String>,
    /// Number of sites N; a range lo..hi for `completeness`.
    #[arg(long)]
    pub sites: Option<String>,
    /// Anisotropy as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<String>,
    /// Boundary set: I, II or both.
    #[arg(long)]
    pub set: Option<String>,
    /// Root cardinalities, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// Solve every admissible sector.
    #[arg(long)]
    pub all: bool,
    /// Random starts per sector.
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Spectral parameter for transfer eigenvalues; give exactly two.
    #[arg(long, allow_hyphen_values = true)]
    pub probe: Vec<String>,
    /// Identity tolerance (`verify`) or Bethe residual tolerance (`bethe`).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the solution table as CSV (`bethe`).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Seed from the embedded root tables and check they are reproduced.
    #[arg(long)]
    pub check_tables: bool,
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Largest chain dimension for dense operators.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Number of sample points for `verify`.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Cap(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Cap(m) => write!(f, "resource cap: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionCap { .. } => CliError::Cap(e.to_string()),
            Error::InvalidParameter(_) | Error::Inadmissible { .. } | Error::DimensionMismatch(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

/// Any report a command produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Outcome {
    Verify(VerifyReport),
    Spectrum(SpectrumOutput),
    Bethe(BetheReport),
    Completeness(CompletenessReport),
}

impl Outcome {
    pub fn pass(&self) -> bool {
        match self {
            Outcome::Verify(r) => r.pass,
            Outcome::Spectrum(r) => r.pass,
            Outcome::Bethe(r) => r.pass,
            Outcome::Completeness(r) => r.pass,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOutput {
    pub report: SpectrumReport,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheSector {
    pub m: Vec<usize>,
    pub label: IrrepLabel,
    pub dimension: u64,
    pub expected: u64,
    pub found: u64,
    pub incomplete: bool,
    pub starts_used: usize,
    pub converged: usize,
    pub rejected_by_oracle: usize,
    pub solutions: Vec<BetheSolution>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheReport {
    pub params: ModelParams,
    pub seed: u64,
    pub starts: usize,
    /// Solutions were screened against exact diagonalization.
    pub spectral_oracle: bool,
    pub sectors: Vec<BetheSector>,
    pub incomplete: bool,
    pub tables: Option<TableReplication>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSummary {
    pub m: Vec<usize>,
    pub label: IrrepLabel,
    pub dimension: u64,
    pub expected: u64,
    pub found: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub params: ModelParams,
    pub status: CellStatus,
    pub sectors: Vec<SectorSummary>,
    /// `Σ found × dimension`.
    pub dimension_sum: u64,
    pub chain_dim: u64,
    pub missing_dimension: u64,
    pub clusters: usize,
    pub unmatched_clusters: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub seed: u64,
    pub starts: usize,
    pub table_seeds: bool,
    pub cells: Vec<CellSummary>,
    /// Some cell is complete only up to unfound solutions.
    pub incomplete: bool,
    pub pass: bool,
}

fn params_for(n: usize, sites: usize, cfg: &RunConfig, set: a2n2::BoundarySet) -> Result<ModelParams, CliError> {
    Ok(ModelParams::new(n, sites, cfg.eta, set)?)
}

fn check_cap(p: &ModelParams, cap: usize) -> Result<(), CliError> {
    if p.chain_dim() > cap {
        return Err(Error::DimensionCap { dim: p.chain_dim(), cap }.into());
    }
    Ok(())
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    let (n, sites, set) = cfg.single()?;
    let p = params_for(n, sites, cfg, set)?;
    check_cap(&p, cfg.cap)?;
    let mut opts = VerifyOptions { seed: cfg.sample_seed, samples: cfg.samples, ..VerifyOptions::default() };
    if let Some(t) = cfg.tol {
        opts.identity_tolerance = t;
    }
    Ok(verify(&p, &opts)?)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<SpectrumOutput, CliError> {
    let (n, sites, set) = cfg.single()?;
    let p = params_for(n, sites, cfg, set)?;
    let report = spectrum_with_cap(&p, cfg.cap)?.report;
    let pass = report.decomposition_consistent() && report.failures.is_empty();
    Ok(SpectrumOutput { report, pass })
}

fn empty_sector(m: &[usize], p: &ModelParams, cfg: &RunConfig) -> Result<SearchOutcome, CliError> {
    let solution = BetheSolution::from_roots(a2n2::bethe::RootConfiguration::empty(p.rank), p, &cfg.probes, 0)?;
    Ok(SearchOutcome {
        cardinalities: m.to_vec(),
        dynkin: solution.dynkin.clone(),
        dimension: solution.dimension,
        expected: Some(expected_multiplicity(m, p)?),
        solutions: vec![solution],
        starts_used: 0,
        converged: 0,
        rejected_by_oracle: 0,
    })
}

pub fn cmd_bethe(cfg: &RunConfig) -> Result<BetheReport, CliError> {
    let (n, sites, set) = cfg.single()?;
    let p = params_for(n, sites, cfg, set)?;
    let sectors: Vec<Vec<usize>> = match (&cfg.m, cfg.all) {
        (_, true) => enumerate_admissible(p.rank, p.sites, p.algebra()),
        (Some(m), false) => {
            if m.len() != p.rank {
                return Err(CliError::Config(format!("--m has {} entries for rank {}", m.len(), p.rank)));
            }
            vec![m.clone()]
        }
        (None, false) => return Err(CliError::Config("bethe needs --m or --all".into())),
    };
    let table = if cfg.check_tables {
        if (p.eta - tables::embedded().eta).norm() > 1e-12 {
            return Err(CliError::Config("--check-tables requires the tabulated anisotropy 0,-0.1".into()));
        }
        let t = tables::find(p.algebra(), p.rank, p.sites)
            .ok_or_else(|| CliError::Config(format!("no embedded table for n={} N={} set {}", p.rank, p.sites, p.boundary)))?;
        Some(t)
    } else {
        None
    };
    let spectral = if p.chain_dim() <= cfg.cap { Some(SpectralOracle::new(&p, &cfg.probes)?) } else { None };
    let mut solver = SolverOptions { probes: cfg.probes, ..SolverOptions::default() };
    if let Some(t) = cfg.tol {
        solver.tolerance = t;
    }
    let mut out = Vec::with_capacity(sectors.len());
    for m in &sectors {
        let outcome = if m.iter().all(|&k| k == 0) {
            empty_sector(m, &p, cfg)?
        } else {
            let search = SearchOptions {
                starts: cfg.starts,
                seed: cfg.seed,
                expected: Some(expected_multiplicity(m, &p)?),
                table_seeds: if table.is_some() { tables::seeds_for(&p, m) } else { Vec::new() },
                solver,
                ..SearchOptions::default()
            };
            completeness_search(m, &p, &search, spectral.as_ref().map(|o| o as &dyn SolutionOracle))?
        };
        let expected = outcome.expected.unwrap_or(0);
        out.push(BetheSector {
            m: outcome.cardinalities,
            label: outcome.dynkin,
            dimension: outcome.dimension,
            expected,
            found: outcome.solutions.len() as u64,
            incomplete: (outcome.solutions.len() as u64) < expected,
            starts_used: outcome.starts_used,
            converged: outcome.converged,
            rejected_by_oracle: outcome.rejected_by_oracle,
            solutions: outcome.solutions,
        });
    }
    let tables = table.map(|t| tables::replicate(t, &solver)).transpose()?;
    let pass = tables.as_ref().is_none_or(|t| t.pass);
    Ok(BetheReport {
        params: p,
        seed: cfg.seed,
        starts: cfg.starts,
        spectral_oracle: spectral.is_some(),
        incomplete: out.iter().any(|s| s.incomplete),
        sectors: out,
        tables,
        pass,
    })
}

pub fn cmd_completeness(cfg: &RunConfig) -> Result<CompletenessReport, CliError> {
    let opts = CellOptions { starts: cfg.starts, seed: cfg.seed, table_seeds: cfg.check_tables, probes: cfg.probes };
    let mut cells = Vec::new();
    for n in cfg.n.clone() {
        for sites in cfg.sites.clone() {
            for &set in &cfg.sets {
                let p = params_for(n, sites, cfg, set)?;
                check_cap(&p, cfg.cap)?;
                let cell = completeness_cell(&p, &opts)?;
                let mut failures = cell.spectrum.failures.clone();
                failures.extend(cell.spectrum.reconcile_failures.iter().cloned());
                cells.push(CellSummary {
                    params: p,
                    status: cell.status,
                    sectors: cell
                        .sectors
                        .iter()
                        .map(|s| SectorSummary {
                            m: s.cardinalities.clone(),
                            label: s.dynkin.clone(),
                            dimension: s.dimension,
                            expected: s.expected.unwrap_or(0),
                            found: s.found(),
                        })
                        .collect(),
                    dimension_sum: cell.dimension_sum,
                    chain_dim: cell.chain_dim,
                    missing_dimension: cell.missing_dimension,
                    clusters: cell.spectrum.clusters.len(),
                    unmatched_clusters: cell.spectrum.unmatched_clusters.len(),
                    failures,
                });
            }
        }
    }
    Ok(CompletenessReport {
        seed: cfg.seed,
        starts: cfg.starts,
        table_seeds: cfg.check_tables,
        incomplete: cells.iter().any(|c| c.status == CellStatus::Incomplete),
        pass: cells.iter().all(|c| c.status != CellStatus::Failed),
        cells,
    })
}

/// Runs one command; the returned outcome's `pass` decides between exit 0
/// and 1.
pub fn execute(command: &Command) -> Result<(Outcome, RunConfig), CliError> {
    let (args, kind) = match command {
        Command::Verify(a) => (a, 0),
        Command::Spectrum(a) => (a, 1),
        Command::Bethe(a) => (a, 2),
        Command::Completeness(a) => (a, 3),
    };
    let cfg = RunConfig::resolve(args)?;
    let outcome = match kind {
        0 => Outcome::Verify(cmd_verify(&cfg)?),
        1 => Outcome::Spectrum(cmd_spectrum(&cfg)?),
        2 => Outcome::Bethe(cmd_bethe(&cfg)?),
        _ => Outcome::Completeness(cmd_completeness(&cfg)?),
    };
    Ok((outcome, cfg))
}

/// Full run with output; returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let result = execute(&cli.command).and_then(|(outcome, cfg)| {
        let json = outcome.to_json();
        if let Some(path) = &cfg.out {
            fs::write(path, format!("{json}\n"))?;
        }
        if let (Some(path), Outcome::Bethe(report)) = (&cfg.csv, &outcome) {
            fs::write(path, output::bethe_csv(report))?;
        }
        if cfg.json {
            writeln!(stdout, "{json}")?;
        } else {
            stdout.write_all(output::render(&outcome).as_bytes())?;
        }
        Ok(outcome.pass())
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}
