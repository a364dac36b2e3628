use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use monotone_lab::experiments::{ScanRow, ScanSeries};
use monotone_lab::measure::CountsRecord;
use monotone_lab::monotones::{E4bVariant, MonotoneName, MonotoneReport, PauliTermSet};
use monotone_lab::noise::ReadoutMap;
use monotone_lab::rng::derive_seed;
use monotone_lab::Error;

use crate::CliError;

/// Reads a counts JSONL file. Blank lines are skipped; any malformed
/// record is reported with its 1-based line number.
pub fn ingest_counts(path: &Path) -> Result<Vec<CountsRecord>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    parse_counts_jsonl(&text).map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("{}:{m}", path.display())),
        other => other,
    })
}

pub fn parse_counts_jsonl(text: &str) -> Result<Vec<CountsRecord>, CliError> {
    let mut out = Vec::new();
    let mut seen: HashMap<(String, Option<u64>), usize> = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |m: String| CliError::Data(format!("line {lineno}: {m}"));
        let rec: CountsRecord = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        rec.validate().map_err(|e| bad(e.to_string()))?;
        if let Some(d) = rec.delay_us {
            if !(d.is_finite() && d >= 0.0) {
                return Err(bad(format!("delay_us {d} must be finite and >= 0")));
            }
        }
        let key = (rec.basis.label(), rec.delay_us.map(f64::to_bits));
        if let Some(first) = seen.insert(key, lineno) {
            return Err(bad(format!(
                "duplicate basis {} at delay_us {:?} (first seen on line {first})",
                rec.basis.label(),
                rec.delay_us
            )));
        }
        out.push(rec);
    }
    if out.is_empty() {
        return Err(CliError::Data("line 1: no records".into()));
    }
    Ok(out)
}

/// Records sharing one `delay_us`, keyed by unsigned basis label.
#[derive(Debug, Clone)]
pub struct CountsGroup {
    pub delay_us: Option<f64>,
    pub records: BTreeMap<String, CountsRecord>,
}

/// Groups by delay, ordered by delay (records without one first).
pub fn group_by_delay(records: &[CountsRecord]) -> Vec<CountsGroup> {
    let mut groups: Vec<CountsGroup> = Vec::new();
    for r in records {
        match groups
            .iter_mut()
            .find(|g| g.delay_us.map(f64::to_bits) == r.delay_us.map(f64::to_bits))
        {
            Some(g) => {
                g.records.insert(r.basis.label(), r.clone());
            }
            None => groups.push(CountsGroup {
                delay_us: r.delay_us,
                records: BTreeMap::from([(r.basis.label(), r.clone())]),
            }),
        }
    }
    groups.sort_by(|a, b| match (a.delay_us, b.delay_us) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => x.total_cmp(&y),
    });
    groups
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub reports: Vec<(Option<f64>, MonotoneReport)>,
    /// Groups lacking bases, with the missing labels.
    pub skipped: Vec<(Option<f64>, Vec<String>)>,
}

impl Analysis {
    /// Scan-schema rows; the delay fills both time columns (0 when absent).
    pub fn to_series(&self, family: &str) -> ScanSeries {
        ScanSeries::new(
            self.reports
                .iter()
                .map(|(d, r)| ScanRow {
                    t_us: d.unwrap_or(0.0),
                    realized_t_us: d.unwrap_or(0.0),
                    family: family.to_string(),
                    quantity: r.name.to_string(),
                    mode: r.mode.as_str().to_string(),
                    value: r.value,
                    stderr: r.stderr,
                })
                .collect(),
        )
    }
}

/// Evaluates `monotone` on every complete delay group. Group `g` seeds its
/// bootstrap from `(seed, g)`.
pub fn analyze_counts(
    records: &[CountsRecord],
    monotone: MonotoneName,
    variant: E4bVariant,
    readout: Option<&ReadoutMap>,
    bootstrap: usize,
    seed: u64,
) -> Result<Analysis, CliError> {
    let set = PauliTermSet::for_name(monotone, variant);
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for (g, group) in group_by_delay(records).into_iter().enumerate() {
        match set.report_from_counts(&group.records, readout, bootstrap, derive_seed(seed, &[g as u64])) {
            Ok(rep) => reports.push((group.delay_us, rep)),
            Err(Error::MissingBases(missing)) => skipped.push((group.delay_us, missing)),
            Err(e) => {
                return Err(CliError::Data(format!("delay_us {:?}: {e}", group.delay_us)));
            }
        }
    }
    Ok(Analysis { reports, skipped })
}
