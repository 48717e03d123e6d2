//! Reduction of local fields, module totals and design comparison.
//!
//! A local field reduces to its maximum and its volume-weighted mean
//! `sum(C_j * V_j) / sum(V_j)`. Module values combine into totals with weights
//! `w_j = V_j / sum(V)`; maxima combine by taking the largest.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexes::{parse_scalar_key, scalar_key_order, LocalIndexField, Process, ScalarKind};
use crate::spatial::OctreeFingerprint;

pub const REPORT_SCHEMA: &str = "dfm-index.report.v1";
pub const TOTALS_SCHEMA: &str = "dfm-index.totals.v1";
pub const COMPARISON_SCHEMA: &str = "dfm-index.comparison.v1";

/// Tolerance on the sum of weights accepted by [`total_index`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

pub fn local_mean(values: &[f64], volumes: &[f64]) -> Result<f64> {
    if values.len() != volumes.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: volumes.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::EmptyField);
    }
    let total: f64 = volumes.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroTotalVolume);
    }
    let weighted: f64 = values.iter().zip(volumes).map(|(c, v)| c * v).sum();
    Ok(weighted / total)
}

pub fn local_max(values: &[f64]) -> Result<f64> {
    values
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or(Error::EmptyField)
}

/// Volume weights; the last weight closes the sum to exactly 1.
pub fn module_weights(volumes: &[f64]) -> Result<Vec<f64>> {
    if volumes.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&v) = volumes.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::NonPositiveVolume(v));
    }
    let total: f64 = volumes.iter().sum();
    let mut weights: Vec<f64> = volumes.iter().map(|v| v / total).collect();
    let n = weights.len();
    let head: f64 = weights[..n - 1].iter().sum();
    weights[n - 1] = 1.0 - head;
    Ok(weights)
}

/// Weighted total of per-module values.
pub fn total_index(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: weights.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE || weights.iter().any(|w| *w < 0.0) {
        return Err(Error::BadWeights(sum));
    }
    Ok(values.iter().zip(weights).map(|(c, w)| c * w).sum())
}

/// Highest maximum over all modules.
pub fn total_max(values: &[f64]) -> Result<f64> {
    values.iter().copied().reduce(f64::max).ok_or(Error::EmptyInput)
}

/// A reduced local field as stored in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSummary {
    pub max: f64,
    pub mean: f64,
    pub values: Vec<f64>,
    pub volumes: Vec<f64>,
}

impl LocalSummary {
    pub fn from_field(field: &LocalIndexField) -> Result<Self> {
        Ok(Self {
            max: field.max()?,
            mean: field.mean()?,
            values: field.values.clone(),
            volumes: field.volumes.clone(),
        })
    }
}

/// Analysis settings recorded with a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub triangles: usize,
    pub vertices: usize,
    pub volume_mm3: f64,
    pub surface_area_mm2: f64,
    pub max_depth: u32,
    pub samples: u32,
    pub margin: f64,
}

/// Result of analyzing one design for one process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub schema: String,
    pub design: String,
    pub process: Process,
    /// Global index key (e.g. `C(d)-`) to value.
    pub globals: BTreeMap<String, f64>,
    /// Local index key (e.g. `C(f)-`) to reduced field.
    pub locals: BTreeMap<String, LocalSummary>,
    pub octree: Option<OctreeFingerprint>,
    pub provenance: Provenance,
}

impl IndexReport {
    pub fn new(design: impl Into<String>, process: Process) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_string(),
            design: design.into(),
            process,
            globals: BTreeMap::new(),
            locals: BTreeMap::new(),
            octree: None,
            provenance: Provenance::default(),
        }
    }

    pub fn insert_local(&mut self, field: &LocalIndexField) -> Result<()> {
        self.locals
            .insert(field.id.key(), LocalSummary::from_field(field)?);
        Ok(())
    }

    /// Globals plus the max and mean of every local field.
    pub fn scalars(&self) -> BTreeMap<String, f64> {
        let mut out = self.globals.clone();
        for (key, summary) in &self.locals {
            if let Some(id) = crate::indexes::IndexId::from_key(key) {
                out.insert(id.max_key(), summary.max);
                out.insert(id.mean_key(), summary.mean);
            }
        }
        out
    }
}

/// One module of an assembly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleEntry {
    pub id: String,
    pub process: Process,
    pub volume_mm3: f64,
    /// Volume weight; absent when modules use different processes.
    pub weight: Option<f64>,
    pub scalars: BTreeMap<String, f64>,
}

/// Totals over the modules of an assembly design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotalsReport {
    pub schema: String,
    pub design: String,
    pub modules: Vec<ModuleEntry>,
    /// Process of the totals; `None` when modules mix processes.
    pub process: Option<Process>,
    pub totals: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

pub const MIXED_PROCESS_WARNING: &str =
    "MixedProcessTotals: modules use different processes; indexes are listed side by side without totals";

/// Combines module reports. Only indexes present in every module are
/// totaled; maxima use the largest module value, everything else the
/// volume-weighted sum.
pub fn total_modules(design: impl Into<String>, modules: &[(String, f64, &IndexReport)]) -> Result<TotalsReport> {
    if modules.is_empty() {
        return Err(Error::EmptyInput);
    }
    let first = modules[0].2.process;
    let single_process = modules.iter().all(|(_, _, r)| r.process == first);
    let mut report = TotalsReport {
        schema: TOTALS_SCHEMA.to_string(),
        design: design.into(),
        modules: modules
            .iter()
            .map(|(id, volume, r)| ModuleEntry {
                id: id.clone(),
                process: r.process,
                volume_mm3: *volume,
                weight: None,
                scalars: r.scalars(),
            })
            .collect(),
        process: None,
        totals: BTreeMap::new(),
        warnings: Vec::new(),
    };
    if !single_process {
        report.warnings.push(MIXED_PROCESS_WARNING.to_string());
        return Ok(report);
    }
    let volumes: Vec<f64> = modules.iter().map(|(_, v, _)| *v).collect();
    let weights = module_weights(&volumes)?;
    for (m, w) in report.modules.iter_mut().zip(&weights) {
        m.weight = Some(*w);
    }
    let shared: Vec<String> = report.modules[0]
        .scalars
        .keys()
        .filter(|k| report.modules.iter().all(|m| m.scalars.contains_key(*k)))
        .cloned()
        .collect();
    for key in shared {
        let values: Vec<f64> = report.modules.iter().map(|m| m.scalars[&key]).collect();
        let total = match parse_scalar_key(&key) {
            Some((_, ScalarKind::Max)) => total_max(&values)?,
            _ => total_index(&values, &weights)?,
        };
        report.totals.insert(key, total);
    }
    report.process = Some(first);
    Ok(report)
}

/// Anything that can be compared: a single report or assembly totals.
#[derive(Debug, Clone, PartialEq)]
pub enum Analysis {
    Report(IndexReport),
    Totals(TotalsReport),
}

impl Analysis {
    pub fn design(&self) -> &str {
        match self {
            Analysis::Report(r) => &r.design,
            Analysis::Totals(t) => &t.design,
        }
    }

    /// Per-process scalar tables.
    pub fn scalar_tables(&self) -> BTreeMap<Process, BTreeMap<String, f64>> {
        let mut out = BTreeMap::new();
        match self {
            Analysis::Report(r) => {
                out.insert(r.process, r.scalars());
            }
            Analysis::Totals(t) => match t.process {
                Some(p) => {
                    out.insert(p, t.totals.clone());
                }
                None => {
                    // Mixed assembly: a process only has values when a single module carries it.
                    for p in [Process::Machining, Process::Additive] {
                        let of: Vec<&ModuleEntry> = t.modules.iter().filter(|m| m.process == p).collect();
                        if let [only] = of.as_slice() {
                            out.insert(p, only.scalars.clone());
                        }
                    }
                }
            },
        }
        out
    }

    /// Parses any report document, checking its schema tag.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let schema = value
            .get("schema")
            .and_then(|s| s.as_str())
            .unwrap_or("")
            .to_string();
        match schema.as_str() {
            REPORT_SCHEMA => Ok(Analysis::Report(serde_json::from_value(value)?)),
            TOTALS_SCHEMA => Ok(Analysis::Totals(serde_json::from_value(value)?)),
            _ => Err(Error::SchemaMismatch {
                expected: format!("{REPORT_SCHEMA} or {TOTALS_SCHEMA}"),
                found: schema,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub process: Process,
    pub id: String,
    pub baseline: f64,
    pub candidate: f64,
    pub delta: f64,
    /// Change relative to the baseline, in percent; `None` for a zero baseline
    /// with a nonzero candidate.
    pub percent: Option<f64>,
}

/// A value present on only one side, or under different processes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideBySideRow {
    pub id: String,
    pub baseline_process: Option<Process>,
    pub baseline: Option<f64>,
    pub candidate_process: Option<Process>,
    pub candidate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema: String,
    pub baseline: String,
    pub candidate: String,
    pub rows: Vec<ComparisonRow>,
    pub side_by_side: Vec<SideBySideRow>,
    /// Per-leaf `candidate - baseline` for local fields; only filled when both
    /// sides are single reports over the same octree.
    pub field_deltas: BTreeMap<String, Vec<f64>>,
}

pub fn percent_change(baseline: f64, candidate: f64) -> Option<f64> {
    if baseline != 0.0 {
        Some((candidate - baseline) / baseline * 100.0)
    } else if candidate == 0.0 {
        Some(0.0)
    } else {
        None
    }
}

/// Deltas of every index shared by both analyses under the same process.
/// Rows follow the canonical index order. Values of the other process are
/// listed side by side, paired by index letter and statistic. Fails when
/// nothing can be matched either way.
pub fn compare(baseline: &Analysis, candidate: &Analysis) -> Result<ComparisonReport> {
    let base = baseline.scalar_tables();
    let cand = candidate.scalar_tables();
    let mut rows = Vec::new();
    let mut side_by_side = Vec::new();
    for (process, btable) in &base {
        let Some(ctable) = cand.get(process) else {
            continue;
        };
        for (id, &b) in btable {
            if let Some(&c) = ctable.get(id) {
                rows.push(ComparisonRow {
                    process: *process,
                    id: id.clone(),
                    baseline: b,
                    candidate: c,
                    delta: c - b,
                    percent: percent_change(b, c),
                });
            }
        }
    }
    rows.sort_by(|a, b| {
        a.process
            .cmp(&b.process)
            .then_with(|| scalar_key_order(&a.id).cmp(&scalar_key_order(&b.id)))
    });

    let flat = |t: &BTreeMap<Process, BTreeMap<String, f64>>| -> Vec<(Process, String, f64)> {
        t.iter()
            .flat_map(|(p, m)| m.iter().map(move |(k, v)| (*p, k.clone(), *v)))
            .collect()
    };
    let shared = |p: Process, id: &str| rows.iter().any(|r| r.process == p && r.id == id);
    for (p, id, v) in flat(&base) {
        if !shared(p, &id) {
            side_by_side.push(SideBySideRow {
                id,
                baseline_process: Some(p),
                baseline: Some(v),
                candidate_process: None,
                candidate: None,
            });
        }
    }
    for (p, id, v) in flat(&cand) {
        if shared(p, &id) {
            continue;
        }
        // Pair with an unmatched baseline row of the same statistic from the other process.
        let pair = side_by_side.iter_mut().find(|r| {
            r.candidate.is_none()
                && r.baseline_process != Some(p)
                && same_statistic(&r.id, &id)
        });
        match pair {
            Some(r) => {
                r.candidate_process = Some(p);
                r.candidate = Some(v);
                r.id = format!("{} | {}", r.id, id);
            }
            None => side_by_side.push(SideBySideRow {
                id,
                baseline_process: None,
                baseline: None,
                candidate_process: Some(p),
                candidate: Some(v),
            }),
        }
    }

    let paired = side_by_side.iter().any(|r| r.baseline.is_some() && r.candidate.is_some());
    if rows.is_empty() && !paired {
        return Err(Error::NoSharedIndexes);
    }

    let mut field_deltas = BTreeMap::new();
    if let (Analysis::Report(a), Analysis::Report(b)) = (baseline, candidate) {
        if a.octree.is_some() && a.octree == b.octree {
            for (key, fa) in &a.locals {
                if let Some(fb) = b.locals.get(key) {
                    if fa.values.len() == fb.values.len() {
                        let d = fa.values.iter().zip(&fb.values).map(|(x, y)| y - x).collect();
                        field_deltas.insert(key.clone(), d);
                    }
                }
            }
        }
    }

    Ok(ComparisonReport {
        schema: COMPARISON_SCHEMA.to_string(),
        baseline: baseline.design().to_string(),
        candidate: candidate.design().to_string(),
        rows,
        side_by_side,
        field_deltas,
    })
}

/// Same index letter and statistic, ignoring the process sign.
fn same_statistic(a: &str, b: &str) -> bool {
    match (parse_scalar_key(a), parse_scalar_key(b)) {
        (Some((ia, ka)), Some((ib, kb))) => ia.symbol() == ib.symbol() && ka == kb,
        _ => false,
    }
}
