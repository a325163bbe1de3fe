//! Run configuration: JSON file values overridden by command-line flags.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use a2n2::bethe::{DEFAULT_SEARCH_SEED, PROBES};
use a2n2::chain::DEFAULT_CHAIN_CAP;
use a2n2::params::{parse_complex, REFERENCE_ETA};
use a2n2::sampling::DEFAULT_SEED;
use a2n2::{BoundarySet, C64};
use serde::Deserialize;

use crate::{Args, CliError};

/// Integer or `"lo..hi"` / `"lo..=hi"` range.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Span {
    One(usize),
    Text(String),
}

/// `[re, im]` or `"re,im"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ComplexValue {
    Pair([f64; 2]),
    Text(String),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<Span>,
    sites: Option<Span>,
    eta: Option<ComplexValue>,
    set: Option<String>,
    m: Option<Vec<usize>>,
    all: Option<bool>,
    starts: Option<usize>,
    seed: Option<u64>,
    probes: Option<Vec<ComplexValue>>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    check_tables: Option<bool>,
    cap: Option<usize>,
    samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: RangeInclusive<usize>,
    pub sites: RangeInclusive<usize>,
    pub eta: C64,
    pub sets: Vec<BoundarySet>,
    pub m: Option<Vec<usize>>,
    pub all: bool,
    pub starts: usize,
    /// Random seed for search starts; the verification samples use
    /// `sample_seed`.
    pub seed: u64,
    pub sample_seed: u64,
    pub samples: usize,
    pub probes: [C64; 2],
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub check_tables: bool,
    pub cap: usize,
    pub json: bool,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_span(text: &str, what: &str) -> Result<RangeInclusive<usize>, CliError> {
    let bad = || config_error(format!("--{what}: expected an integer or a range lo..hi, got {text:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let range = if let Some((lo, hi)) = text.split_once("..=") {
        num(lo)?..=num(hi)?
    } else if let Some((lo, hi)) = text.split_once("..") {
        num(lo)?..=num(hi)?
    } else {
        let v = num(text)?;
        v..=v
    };
    if range.is_empty() || *range.start() == 0 {
        return Err(config_error(format!("--{what}: range {text:?} is empty or starts at 0")));
    }
    Ok(range)
}

fn span(value: &Span, what: &str) -> Result<RangeInclusive<usize>, CliError> {
    match value {
        Span::One(v) => parse_span(&v.to_string(), what),
        Span::Text(t) => parse_span(t, what),
    }
}

fn complex(value: &ComplexValue, what: &str) -> Result<C64, CliError> {
    let z = match value {
        ComplexValue::Pair([re, im]) => C64::new(*re, *im),
        ComplexValue::Text(t) => parse_complex(t).map_err(|e| config_error(format!("--{what}: {e}")))?,
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(config_error(format!("--{what}: {z} is not finite")));
    }
    Ok(z)
}

fn parse_sets(text: &str) -> Result<Vec<BoundarySet>, CliError> {
    match text.trim() {
        "both" | "all" => Ok(vec![BoundarySet::I, BoundarySet::II]),
        other => other
            .parse::<BoundarySet>()
            .map(|s| vec![s])
            .map_err(|e| config_error(format!("--set: {e}"))),
    }
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(args: &Args) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let m = args.m.clone().or(file.m);
        let n = match (&args.n, &file.n, &m) {
            (Some(t), _, _) => parse_span(t, "n")?,
            (None, Some(s), _) => span(s, "n")?,
            (None, None, Some(m)) if !m.is_empty() => m.len()..=m.len(),
            (None, None, _) => 1..=1,
        };
        let sites = match (&args.sites, &file.sites) {
            (Some(t), _) => parse_span(t, "sites")?,
            (None, Some(s)) => span(s, "sites")?,
            (None, None) => 2..=2,
        };
        let eta = match (&args.eta, &file.eta) {
            (Some(t), _) => complex(&ComplexValue::Text(t.clone()), "eta")?,
            (None, Some(v)) => complex(v, "eta")?,
            (None, None) => REFERENCE_ETA,
        };
        if eta.norm() == 0.0 {
            return Err(config_error("--eta: the anisotropy must be nonzero"));
        }
        let sets = match args.set.as_ref().or(file.set.as_ref()) {
            Some(t) => parse_sets(t)?,
            None => vec![BoundarySet::I],
        };
        let probes: Vec<C64> = if !args.probe.is_empty() {
            args.probe.iter().map(|t| complex(&ComplexValue::Text(t.clone()), "probe")).collect::<Result<_, _>>()?
        } else if let Some(list) = &file.probes {
            list.iter().map(|v| complex(v, "probe")).collect::<Result<_, _>>()?
        } else {
            PROBES.to_vec()
        };
        let probes: [C64; 2] = probes
            .try_into()
            .map_err(|v: Vec<C64>| config_error(format!("--probe: exactly two probe points are required, got {}", v.len())))?;
        if probes[0] == probes[1] {
            return Err(config_error("--probe: the two probe points must differ"));
        }
        let tol = args.tol.or(file.tol);
        if tol.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
            return Err(config_error("--tol must be positive"));
        }
        let seed = args.seed.or(file.seed);
        Ok(Self {
            n,
            sites,
            eta,
            sets,
            m,
            all: args.all || file.all.unwrap_or(false),
            starts: args.starts.or(file.starts).unwrap_or(4000),
            seed: seed.unwrap_or(DEFAULT_SEARCH_SEED),
            sample_seed: seed.unwrap_or(DEFAULT_SEED),
            samples: args.samples.or(file.samples).unwrap_or(10).max(1),
            probes,
            tol,
            out: args.out.clone().or(file.out),
            csv: args.csv.clone().or(file.csv),
            check_tables: args.check_tables || file.check_tables.unwrap_or(false),
            cap: args.cap.or(file.cap).unwrap_or(DEFAULT_CHAIN_CAP),
            json: args.json,
        })
    }

    /// The single `(n, N, set)` cell of commands that take one.
    pub fn single(&self) -> Result<(usize, usize, BoundarySet), CliError> {
        if self.n.start() != self.n.end() || self.sites.start() != self.sites.end() || self.sets.len() != 1 {
            return Err(config_error("this command takes a single --n, --sites and --set"));
        }
        Ok((*self.n.start(), *self.sites.start(), self.sets[0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans() {
        assert_eq!(parse_span("2", "n").unwrap(), 2..=2);
        assert_eq!(parse_span("1..3", "n").unwrap(), 1..=3);
        assert_eq!(parse_span("1..=2", "n").unwrap(), 1..=2);
        assert!(parse_span("3..1", "n").is_err());
        assert!(parse_span("0", "n").is_err());
        assert!(parse_span("x", "n").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        fs::write(&path, r#"{"n": 2, "sites": "2..3", "eta": [0.0, -0.2], "set": "II", "seed": 5}"#).unwrap();
        let args = Args { config: Some(path), n: Some("1".into()), ..Args::default() };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert_eq!(cfg.n, 1..=1);
        assert_eq!(cfg.sites, 2..=3);
        assert_eq!(cfg.eta, C64::new(0.0, -0.2));
        assert_eq!(cfg.sets, vec![BoundarySet::II]);
        assert_eq!(cfg.seed, 5);
    }

    #[test]
    fn rejects_bad_values() {
        for args in [
            Args { eta: Some("abc".into()), ..Args::default() },
            Args { eta: Some("0,0".into()), ..Args::default() },
            Args { set: Some("III".into()), ..Args::default() },
            Args { probe: vec!["1,0".into()], ..Args::default() },
            Args { tol: Some(-1.0), ..Args::default() },
        ] {
            assert!(matches!(RunConfig::resolve(&args), Err(CliError::Config(_))), "{args:?}");
        }
    }
}
