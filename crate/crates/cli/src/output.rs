//! Human-readable tables and CSV.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use a2n2::bethe::RootConfiguration;
use a2n2::pipeline::CellStatus;
use a2n2::{ModelParams, C64};

use crate::{BetheReport, CompletenessReport, Outcome, SpectrumOutput};
use a2n2::pipeline::VerifyReport;

fn complex(z: C64) -> String {
    let clean = |x: f64| if x.abs() < 5e-11 { 0.0 } else { x };
    let z = C64::new(clean(z.re), clean(z.im));
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.10}{sign}{:.10}i", z.re, z.im.abs())
}

/// Imaginary parts shown in `(-π, π]`.
fn roots(r: &RootConfiguration) -> String {
    if r.root_count() == 0 {
        return "-".into();
    }
    let shift = |u: C64| if u.im > PI { u - C64::new(0.0, TAU) } else { u };
    r.levels
        .iter()
        .map(|level| {
            if level.is_empty() {
                "-".to_string()
            } else {
                level.iter().map(|&u| complex(shift(u))).collect::<Vec<_>>().join(" ")
            }
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

fn header(p: &ModelParams) -> String {
    format!("n={} N={} set {} ({}{}) eta={}\n", p.rank, p.sites, p.boundary, p.algebra(), p.rank, complex(p.eta))
}

/// Columns padded to their widest cell; numeric-looking cells right-aligned.
fn table(headers: &[String], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut width: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (k, cell) in cells.iter().enumerate().take(cols) {
            let pad = width[k] - cell.chars().count();
            let numeric = cell.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+');
            if k > 0 {
                s.push_str("  ");
            }
            if numeric && k + 1 < cols {
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            } else {
                s.push_str(cell);
                if k + 1 < cols {
                    s.push_str(&" ".repeat(pad));
                }
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(headers);
    out.push_str(&line(&width.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>()));
    for row in rows {
        out.push_str(&line(row));
    }
    out
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn render_verify(r: &VerifyReport) -> String {
    let mut out = header(&r.params);
    let rows: Vec<Vec<String>> = [("identities", &r.identities), ("chain", &r.chain), ("symmetry", &r.symmetry)]
        .iter()
        .flat_map(|(group, report)| {
            report.checks.iter().map(move |c| {
                vec![
                    group.to_string(),
                    c.name.clone(),
                    format!("{:.3e}", c.residual),
                    format!("{:.1e}", c.tolerance),
                    c.samples.to_string(),
                    verdict(c.pass).to_string(),
                ]
            })
        })
        .collect();
    out.push_str(&table(&strings(&["group", "check", "residual", "tolerance", "samples", "status"]), &rows));
    let failed = rows.iter().filter(|r| r[5] == "FAIL").count();
    let _ = writeln!(out, "{}: {} checks, {failed} failed", verdict(r.pass), rows.len());
    out
}

fn render_spectrum(s: &SpectrumOutput) -> String {
    let r = &s.report;
    let mut out = header(&r.params);
    let mut labels: Vec<_> = r.decomposition_predicted.entries.iter().map(|(l, _)| l.clone()).collect();
    for (l, _) in &r.decomposition_observed.entries {
        if !labels.contains(l) {
            labels.push(l.clone());
        }
    }
    labels.sort();
    let rows: Vec<Vec<String>> = labels
        .iter()
        .map(|l| {
            vec![
                l.to_string(),
                l.dimension().to_string(),
                r.decomposition_observed.multiplicity(l).to_string(),
                r.decomposition_predicted.multiplicity(l).to_string(),
            ]
        })
        .collect();
    out.push_str(&table(&strings(&["label", "dimension", "multiplicity", "predicted"]), &rows));
    let _ = writeln!(out, "decomposition: {}", r.decomposition_observed);
    out.push('\n');
    let rows: Vec<Vec<String>> = r
        .clusters
        .iter()
        .map(|c| {
            let hw: Vec<String> =
                c.highest_weights.iter().map(|h| h.label.as_ref().map_or("?".into(), |l| l.to_string())).collect();
            vec![complex(c.eigenvalue), c.degeneracy.to_string(), format!("{:.1e}", c.invariant_residual), hw.join(" ")]
        })
        .collect();
    out.push_str(&table(&strings(&["energy", "deg", "invariance", "highest weights"]), &rows));
    for a in &r.ambiguities {
        let _ = writeln!(out, "warning: clusters {} and {} are only {:.2e} apart", a.clusters.0, a.clusters.1, a.gap);
    }
    for f in &r.failures {
        let _ = writeln!(out, "failure: {f}");
    }
    let _ = writeln!(out, "{}: {} levels, total dimension {}", verdict(s.pass), r.clusters.len(), r.total_degeneracy());
    out
}

fn bethe_rows(r: &BetheReport, with_energy: bool) -> (Vec<String>, Vec<Vec<String>>) {
    let n = r.params.rank;
    let mut headers: Vec<String> = (1..=n).map(|l| format!("m{l}")).collect();
    headers.extend((1..=n).map(|l| format!("a{l}")));
    headers.extend(strings(&["deg", "mult"]));
    if with_energy {
        headers.push("energy".into());
    }
    headers.push("roots".into());
    let mut rows = Vec::new();
    for s in &r.sectors {
        let mut lead: Vec<String> = s.m.iter().map(usize::to_string).collect();
        lead.extend(s.label.labels.iter().map(u32::to_string));
        lead.push(s.dimension.to_string());
        lead.push(s.expected.to_string());
        for sol in &s.solutions {
            let mut row = lead.clone();
            if with_energy {
                row.push(complex(sol.energy));
            }
            row.push(roots(&sol.roots));
            rows.push(row);
        }
        for _ in s.found..s.expected {
            let mut row = lead.clone();
            if with_energy {
                row.push("-".into());
            }
            row.push("not found".into());
            rows.push(row);
        }
    }
    (headers, rows)
}

fn render_bethe(r: &BetheReport) -> String {
    let mut out = header(&r.params);
    let (headers, rows) = bethe_rows(r, true);
    out.push_str(&table(&headers, &rows));
    for s in r.sectors.iter().filter(|s| s.incomplete) {
        let _ = writeln!(
            out,
            "incomplete: m={:?} found {} of {} after {} starts",
            s.m, s.found, s.expected, s.starts_used
        );
    }
    if let Some(t) = &r.tables {
        let solutions: Vec<_> = t.rows.iter().flat_map(|row| &row.solutions).collect();
        let worst = solutions.iter().map(|s| s.deviation).fold(0.0, f64::max);
        let unprinted: u64 = t.rows.iter().map(|row| row.unprinted).sum();
        let _ = writeln!(
            out,
            "table {}: {} rows, {} printed solutions refined, {unprinted} unprinted, largest deviation {worst:.2e}: {}",
            t.id,
            t.rows.len(),
            solutions.len(),
            verdict(t.pass)
        );
    }
    let found: u64 = r.sectors.iter().map(|s| s.found).sum();
    let expected: u64 = r.sectors.iter().map(|s| s.expected).sum();
    let state = if r.incomplete { " (incomplete)" } else { "" };
    let _ = writeln!(out, "{}: {found} of {expected} solutions{state}", verdict(r.pass));
    out
}

/// Solution table in the column order `m…, a…, deg, mult, roots`; one line
/// per solution, roots as `re+imi` separated by spaces, levels by `|`.
pub fn bethe_csv(r: &BetheReport) -> String {
    let (headers, rows) = bethe_rows(r, false);
    let mut out = headers.join(",") + "\n";
    for row in rows.iter().filter(|row| row.last().is_some_and(|c| c != "not found")) {
        let last = row.len() - 1;
        let mut cells = row[..last].to_vec();
        cells.push(format!("\"{}\"", row[last]));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn status(s: CellStatus) -> &'static str {
    match s {
        CellStatus::Complete => "complete",
        CellStatus::Incomplete => "incomplete",
        CellStatus::Failed => "FAILED",
    }
}

fn render_completeness(r: &CompletenessReport) -> String {
    let rows: Vec<Vec<String>> = r
        .cells
        .iter()
        .map(|c| {
            let found: u64 = c.sectors.iter().map(|s| s.found).sum();
            let expected: u64 = c.sectors.iter().map(|s| s.expected).sum();
            vec![
                c.params.rank.to_string(),
                c.params.sites.to_string(),
                c.params.boundary.to_string(),
                c.chain_dim.to_string(),
                c.dimension_sum.to_string(),
                format!("{found}/{expected}"),
                c.clusters.to_string(),
                c.unmatched_clusters.to_string(),
                status(c.status).to_string(),
            ]
        })
        .collect();
    let mut out =
        table(&strings(&["n", "N", "set", "dim", "sum", "solutions", "levels", "unmatched", "status"]), &rows);
    for c in &r.cells {
        for s in c.sectors.iter().filter(|s| s.found < s.expected) {
            let _ = writeln!(
                out,
                "n={} N={} set {}: m={:?} found {} of {}",
                c.params.rank, c.params.sites, c.params.boundary, s.m, s.found, s.expected
            );
        }
        for f in &c.failures {
            let _ = writeln!(out, "n={} N={} set {}: {f}", c.params.rank, c.params.sites, c.params.boundary);
        }
    }
    let state = if r.incomplete { " (some cells incomplete)" } else { "" };
    let _ = writeln!(out, "{}: {} cells{state}", verdict(r.pass), r.cells.len());
    out
}

pub fn render(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Verify(r) => render_verify(r),
        Outcome::Spectrum(r) => render_spectrum(r),
        Outcome::Bethe(r) => render_bethe(r),
        Outcome::Completeness(r) => render_completeness(r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_columns() {
        let t = table(&strings(&["a", "bb"]), &[strings(&["10", "x"]), strings(&["2", "yyy"])]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines, ["a   bb", "--  ---", "10  x", " 2  yyy"]);
    }

    #[test]
    fn complex_format() {
        assert_eq!(complex(C64::new(0.5, -0.25)), "0.5000000000-0.2500000000i");
        assert_eq!(complex(C64::new(-1.0, 0.0)), "-1.0000000000+0.0000000000i");
    }
}
