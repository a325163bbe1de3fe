//! Embedded copies of the published Bethe-root tables and their replication
//! by Newton refinement.

use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bethe::{canonicalize, dynkin_label, newton_solve, BetheSolution, RootConfiguration, SolverOptions};
use crate::error::{Error, Result};
use crate::params::{Algebra, BoundarySet, ModelParams};
use crate::rep::{weyl_dimension, IrrepLabel};

/// Largest allowed per-coordinate gap between a refined root and its
/// printed value.
pub const PRINTED_PRECISION: f64 = 1e-5;

const DATA: &str = include_str!("../data/tables.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableSet {
    pub version: u32,
    pub description: String,
    pub eta: C64,
    pub tables: Vec<Table>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub id: String,
    pub algebra: Algebra,
    pub rank: usize,
    pub sites: usize,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub m: Vec<usize>,
    pub labels: Vec<u32>,
    pub deg: u64,
    pub mult: u64,
    /// `None` marks a solution counted in `mult` but not printed.
    pub solutions: Vec<Option<RootConfiguration>>,
}

impl Table {
    pub fn boundary(&self) -> BoundarySet {
        match self.algebra {
            Algebra::B => BoundarySet::I,
            Algebra::C => BoundarySet::II,
        }
    }

    pub fn params(&self, eta: C64) -> Result<ModelParams> {
        ModelParams::new(self.rank, self.sites, eta, self.boundary())
    }

    pub fn row(&self, m: &[usize]) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.m == m)
    }
}

fn parse(text: &str) -> Result<TableSet> {
    let set: TableSet = serde_json::from_str(text).map_err(|e| Error::TableData(e.to_string()))?;
    for t in &set.tables {
        for r in &t.rows {
            if r.m.len() != t.rank || r.labels.len() != t.rank {
                return Err(Error::TableData(format!("{}: row {:?} has the wrong rank", t.id, r.m)));
            }
            if r.solutions.len() as u64 != r.mult {
                return Err(Error::TableData(format!("{}: row {:?} lists {} of {} solutions", t.id, r.m, r.solutions.len(), r.mult)));
            }
            if r.solutions.iter().flatten().any(|s| s.cardinalities() != r.m) {
                return Err(Error::TableData(format!("{}: row {:?} has a solution of the wrong shape", t.id, r.m)));
            }
        }
    }
    Ok(set)
}

/// The embedded tables, parsed once.
pub fn embedded() -> &'static TableSet {
    static SET: OnceLock<TableSet> = OnceLock::new();
    SET.get_or_init(|| parse(DATA).expect("embedded table data is well formed"))
}

pub fn find(algebra: Algebra, rank: usize, sites: usize) -> Option<&'static Table> {
    embedded().tables.iter().find(|t| t.algebra == algebra && t.rank == rank && t.sites == sites)
}

/// Printed solutions usable as Newton seeds for `p` and cardinalities `m`.
/// Empty unless `p` uses the tabulated anisotropy.
pub fn seeds_for(p: &ModelParams, m: &[usize]) -> Vec<RootConfiguration> {
    if (p.eta - embedded().eta).norm() > 1e-12 {
        return Vec::new();
    }
    find(p.algebra(), p.rank, p.sites)
        .and_then(|t| t.row(m))
        .map(|r| r.solutions.iter().flatten().cloned().collect())
        .unwrap_or_default()
}

/// Largest per-coordinate gap between two configurations of equal shape,
/// after canonicalization and optimal-by-greedy matching within each level.
pub fn max_deviation(a: &RootConfiguration, b: &RootConfiguration) -> f64 {
    if a.cardinalities() != b.cardinalities() {
        return f64::INFINITY;
    }
    let (ca, cb) = (canonicalize(a), canonicalize(b));
    let gap = |x: C64, y: C64| {
        let dim = (x.im - y.im).abs();
        (x.re - y.re).abs().max(dim.min(std::f64::consts::TAU - dim))
    };
    let mut worst: f64 = 0.0;
    for (la, lb) in ca.levels.iter().zip(&cb.levels) {
        let mut used = vec![false; lb.len()];
        for &x in la {
            let (j, g) = (0..lb.len())
                .filter(|&j| !used[j])
                .map(|j| (j, gap(x, lb[j])))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .expect("equal cardinalities");
            used[j] = true;
            worst = worst.max(g);
        }
    }
    worst
}

/// Outcome of refining one printed solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionReplication {
    pub index: usize,
    pub printed: RootConfiguration,
    pub refined: Option<BetheSolution>,
    pub error: Option<String>,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowReplication {
    pub m: Vec<usize>,
    pub printed_labels: Vec<u32>,
    pub label: Option<IrrepLabel>,
    pub deg: u64,
    pub dimension: u64,
    pub mult: u64,
    pub unprinted: u64,
    pub solutions: Vec<SolutionReplication>,
    /// Refined solutions are pairwise distinct.
    pub distinct: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableReplication {
    pub id: String,
    pub params: ModelParams,
    pub rows: Vec<RowReplication>,
    pub pass: bool,
}

/// Refines every printed solution of `table` and compares labels,
/// dimensions and roots with the printed columns.
pub fn replicate(table: &Table, opts: &SolverOptions) -> Result<TableReplication> {
    let p = table.params(embedded().eta)?;
    let mut rows = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let label = dynkin_label(&row.m, table.sites, table.algebra).ok();
        let dimension = label.as_ref().map_or(0, weyl_dimension);
        let mut solutions = Vec::new();
        for (index, printed) in row.solutions.iter().enumerate() {
            let Some(printed) = printed else { continue };
            let (refined, error) = match newton_solve(printed, &p, opts) {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let deviation = refined.as_ref().map_or(f64::INFINITY, |s| max_deviation(&s.roots, printed));
            let pass = refined.as_ref().is_some_and(|s| s.residual < opts.tolerance) && deviation <= PRINTED_PRECISION;
            solutions.push(SolutionReplication { index, printed: printed.clone(), refined, error, deviation, pass });
        }
        let refined: Vec<&BetheSolution> = solutions.iter().filter_map(|s| s.refined.as_ref()).collect();
        let distinct = refined.iter().enumerate().all(|(i, a)| {
            refined[i + 1..].iter().all(|b| !crate::bethe::configurations_equal(&a.roots, &b.roots, crate::bethe::DEDUP_TOLERANCE))
        });
        let label_ok = label.as_ref().is_some_and(|l| l.labels == row.labels);
        let pass = label_ok && dimension == row.deg && distinct && solutions.iter().all(|s| s.pass);
        rows.push(RowReplication {
            m: row.m.clone(),
            printed_labels: row.labels.clone(),
            label,
            deg: row.deg,
            dimension,
            mult: row.mult,
            unprinted: row.solutions.iter().filter(|s| s.is_none()).count() as u64,
            solutions,
            distinct,
            pass,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(TableReplication { id: table.id.clone(), params: p, rows, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_tables_parse() {
        let set = embedded();
        assert_eq!(set.tables.len(), 12);
        assert_eq!(set.eta, C64::new(0.0, -0.1));
        let last = find(Algebra::C, 3, 3).unwrap();
        let row = last.row(&[3, 3, 3]).unwrap();
        assert_eq!((row.mult, row.solutions.iter().filter(|s| s.is_none()).count()), (4, 2));
        assert!(parse("{\"version\":1}").is_err());
    }

    #[test]
    fn seeds_only_at_the_tabulated_anisotropy() {
        let p = ModelParams::reference(1, 3, BoundarySet::II);
        assert_eq!(seeds_for(&p, &[2]).len(), 5);
        let other = ModelParams::new(1, 3, C64::new(0.0, -0.2), BoundarySet::II).unwrap();
        assert!(seeds_for(&other, &[2]).is_empty());
    }

    #[test]
    fn small_tables_replicate() {
        for id in ["B1_N2", "C1_N2", "B2_N2", "C2_N2"] {
            let t = embedded().tables.iter().find(|t| t.id == id).unwrap();
            let r = replicate(t, &SolverOptions::default()).unwrap();
            assert!(r.pass, "{id}: {r:#?}");
        }
    }
}
