//! Seeded verification campaigns and their reports.
//!
//! A campaign is a pure function of its definition and master seed: instance `(s, j)`
//! (shape `s`, sample `j`) draws everything from the seed
//! `stream_seed(stream_seed(master, s), j)`, instances run in parallel, and records are
//! assembled in `(shape, sample)` order. Reports carry no timing, so reruns serialize
//! to identical bytes.

mod campaigns;
mod random;

pub use random::{gaussian_vector, random_alternating, random_tensor, Field};

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::AlternatingTensor;
use crate::solvers::{stream_seed, SolverConfig};
use crate::tensor::{Factor, Shape};

pub const SCHEMA_VERSION: u32 = 1;

/// The campaign set shipped with the crate.
pub const DEFAULT_CAMPAIGNS: &str = include_str!("../../campaigns.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignKind {
    SelfMembership,
    VerifyMain,
    BinaryRoots,
    CountBinary,
    VerifyConverse,
    DegenerateLocus,
    AlsMembership,
    FlagFormulas,
    FormIdentities,
}

/// One entry of a campaign's shape grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GridShape {
    Symmetric {
        dim: usize,
        degree: usize,
    },
    Binary {
        degrees: Vec<usize>,
    },
    Partial {
        factors: Vec<Factor>,
    },
    /// Ordinary tensor; `rank` is the CP-ALS target rank where one is needed.
    Segre {
        dims: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rank: Option<usize>,
    },
    Exterior {
        dim: usize,
        k: usize,
    },
    /// `a ⊗ b ⊗ c` in `C² ⊗ C² ⊗ C²` with `(1, ±i)` in slot `factor`.
    IsotropicSlice {
        factor: usize,
        sign: i8,
    },
}

/// A grid shape resolved into the space it describes.
pub(crate) enum Space {
    Partial(Shape),
    Exterior { dim: usize, k: usize },
    Slice { factor: usize, sign: i8 },
}

impl GridShape {
    pub(crate) fn resolve(&self) -> Result<Space> {
        match self {
            GridShape::Symmetric { dim, degree } => Ok(Space::Partial(Shape::symmetric(*dim, *degree)?)),
            GridShape::Binary { degrees } => Ok(Space::Partial(Shape::binary(degrees)?)),
            GridShape::Partial { factors } => Ok(Space::Partial(Shape::new(factors.clone())?)),
            GridShape::Segre { dims, .. } => Ok(Space::Partial(Shape::segre(dims)?)),
            GridShape::Exterior { dim, k } => {
                AlternatingTensor::new(*dim, *k, vec![Default::default(); crate::tensor::binomial(*dim, *k)])?;
                Ok(Space::Exterior { dim: *dim, k: *k })
            }
            GridShape::IsotropicSlice { factor, sign } => {
                if *factor > 2 || sign.abs() != 1 {
                    return Err(Error::InvalidShape(format!(
                        "isotropic slice needs factor ≤ 2 and sign ±1, got {factor}, {sign}"
                    )));
                }
                Ok(Space::Slice {
                    factor: *factor,
                    sign: *sign,
                })
            }
        }
    }

    pub fn label(&self) -> String {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        match self {
            GridShape::Symmetric { dim, degree } => format!("S^{degree}C^{dim}"),
            GridShape::Binary { degrees } => format!("binary({})", join(degrees)),
            GridShape::Partial { factors } => factors
                .iter()
                .map(|f| format!("S^{}C^{}", f.degree, f.dim))
                .collect::<Vec<_>>()
                .join("⊗"),
            GridShape::Segre { dims, rank } => match rank {
                Some(q) => format!("segre({}) q={q}", join(dims)),
                None => format!("segre({})", join(dims)),
            },
            GridShape::Exterior { dim, k } => format!("∧^{k}C^{dim}"),
            GridShape::IsotropicSlice { factor, sign } => {
                let s = if *sign > 0 { "+" } else { "-" };
                format!("isotropic slot {factor} (1,{s}i)")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub name: String,
    pub kind: CampaignKind,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub shapes: Vec<GridShape>,
    pub samples: usize,
    #[serde(default)]
    pub field: Field,
    #[serde(default)]
    pub cfg: SolverConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl Campaign {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidInput(format!(
                "campaign {}: samples must be ≥ 1",
                self.name
            )));
        }
        self.cfg.validate()?;
        for s in &self.shapes {
            s.resolve()?;
        }
        Ok(())
    }

    pub(crate) fn tol(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    /// Seed of sample `sample` of shape `shape_index`.
    pub fn instance_seed(&self, shape_index: usize, sample: usize) -> u64 {
        stream_seed(stream_seed(self.cfg.master_seed, shape_index as u64), sample as u64)
    }

    /// Solver configuration for one instance, restarts seeded from the instance.
    pub(crate) fn instance_cfg(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            master_seed: seed,
            ..self.cfg.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSet {
    pub campaigns: Vec<Campaign>,
}

impl CampaignSet {
    pub fn parse(text: &str) -> Result<Self> {
        let set: CampaignSet = serde_json::from_str(text)?;
        for c in &set.campaigns {
            c.validate()?;
        }
        Ok(set)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_CAMPAIGNS).expect("bundled campaigns are valid")
    }

    pub fn get(&self, name: &str) -> Result<&Campaign> {
        self.campaigns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCampaign(name.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Genericity not met (degenerate input, no certified points, no convergence).
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub shape: String,
    pub shape_index: usize,
    pub sample: usize,
    pub seed: u64,
    pub status: Status,
    pub counts: BTreeMap<String, u64>,
    pub residuals: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl InstanceRecord {
    pub(crate) fn new(shape: String, shape_index: usize, sample: usize, seed: u64) -> Self {
        Self {
            shape,
            shape_index,
            sample,
            seed,
            status: Status::Pass,
            counts: BTreeMap::new(),
            residuals: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn count(&mut self, key: &str, v: usize) {
        self.counts.insert(key.to_string(), v as u64);
    }

    pub(crate) fn residual(&mut self, key: &str, v: f64) {
        self.residuals.insert(key.to_string(), v);
    }

    /// Records a failed check; the first failure decides the status.
    pub(crate) fn fail(&mut self, note: String) {
        self.status = Status::Fail;
        self.notes.push(note);
    }

    pub(crate) fn inconclusive(&mut self, note: String) {
        if self.status == Status::Pass {
            self.status = Status::Inconclusive;
        }
        self.notes.push(note);
    }

    /// Fails with `note` unless `value ≤ bound`; NaN fails.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub(crate) fn check_le(&mut self, what: &str, value: f64, bound: f64) {
        self.residual(what, value);
        if !(value <= bound) {
            self.fail(format!("{what} = {value:e} > {bound:e}"));
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    /// `passed / instances`.
    pub pass_rate: f64,
}

impl Tally {
    fn of<'a>(records: impl Iterator<Item = &'a InstanceRecord>) -> Self {
        let mut t = Tally::default();
        for r in records {
            t.instances += 1;
            match r.status {
                Status::Pass => t.passed += 1,
                Status::Fail => t.failed += 1,
                Status::Inconclusive => t.inconclusive += 1,
            }
        }
        t.pass_rate = if t.instances == 0 {
            0.0
        } else {
            t.passed as f64 / t.instances as f64
        };
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeSummary {
    pub shape: String,
    #[serde(flatten)]
    pub tally: Tally,
}

/// A campaign-level claim (rates, set sizes) beyond the per-instance checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssertionResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema_version: u32,
    pub campaign: String,
    pub kind: CampaignKind,
    pub master_seed: u64,
    pub samples: usize,
    pub field: Field,
    pub config: SolverConfig,
    pub tolerances: BTreeMap<String, f64>,
    pub summary: Tally,
    pub shapes: Vec<ShapeSummary>,
    pub assertions: Vec<AssertionResult>,
    pub passed: bool,
    pub records: Vec<InstanceRecord>,
}

impl CampaignReport {
    pub(crate) fn assemble(c: &Campaign, records: Vec<InstanceRecord>, assertions: Vec<AssertionResult>) -> Self {
        let mut labels: Vec<(usize, String)> = records.iter().map(|r| (r.shape_index, r.shape.clone())).collect();
        labels.dedup();
        let shapes = labels
            .into_iter()
            .map(|(i, shape)| ShapeSummary {
                tally: Tally::of(records.iter().filter(|r| r.shape_index == i)),
                shape,
            })
            .collect();
        let summary = Tally::of(records.iter());
        let passed = summary.failed == 0 && assertions.iter().all(|a| a.passed);
        Self {
            schema_version: SCHEMA_VERSION,
            campaign: c.name.clone(),
            kind: c.kind,
            master_seed: c.cfg.master_seed,
            samples: c.samples,
            field: c.field,
            config: c.cfg.clone(),
            tolerances: c.tolerances.clone(),
            summary,
            shapes,
            assertions,
            passed,
            records,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per instance; count and residual columns are the union of keys.
    pub fn to_csv(&self) -> String {
        let mut count_keys: Vec<&String> = self.records.iter().flat_map(|r| r.counts.keys()).collect();
        count_keys.sort();
        count_keys.dedup();
        let mut res_keys: Vec<&String> = self.records.iter().flat_map(|r| r.residuals.keys()).collect();
        res_keys.sort();
        res_keys.dedup();

        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = ["campaign", "shape", "sample", "seed", "status"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend(count_keys.iter().map(|k| format!("count:{k}")));
        header.extend(res_keys.iter().map(|k| format!("residual:{k}")));
        header.push("notes".into());
        w.write_record(&header).expect("in-memory write");
        for r in &self.records {
            let mut row = vec![
                self.campaign.clone(),
                r.shape.clone(),
                r.sample.to_string(),
                r.seed.to_string(),
                serde_json::to_value(r.status)
                    .expect("status")
                    .as_str()
                    .unwrap_or_default()
                    .to_string(),
            ];
            row.extend(
                count_keys
                    .iter()
                    .map(|k| r.counts.get(*k).map_or(String::new(), u64::to_string)),
            );
            row.extend(
                res_keys
                    .iter()
                    .map(|k| r.residuals.get(*k).map_or(String::new(), |v| format!("{v:e}"))),
            );
            row.push(r.notes.join("; "));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

pub fn emit_report(r: &CampaignReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Json => r.to_json(),
        ReportFormat::Csv => r.to_csv(),
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Runs `per_instance` over every `(shape, sample)` in parallel and returns the records
/// in grid order.
pub(crate) fn run_grid<F>(c: &Campaign, per_instance: F) -> Result<Vec<InstanceRecord>>
where
    F: Fn(&GridShape, &Space, InstanceRecord) -> InstanceRecord + Sync,
{
    let spaces: Vec<(String, Space)> = c
        .shapes
        .iter()
        .map(|s| Ok((s.label(), s.resolve()?)))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..spaces.len())
        .flat_map(|s| (0..c.samples).map(move |j| (s, j)))
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(s, j)| {
            let rec = InstanceRecord::new(spaces[s].0.clone(), s, j, c.instance_seed(s, j));
            per_instance(&c.shapes[s], &spaces[s].1, rec)
        })
        .collect())
}

/// Runs a campaign and collects its report.
pub fn run_campaign(c: &Campaign) -> Result<CampaignReport> {
    c.validate()?;
    let (records, assertions) = match c.kind {
        CampaignKind::SelfMembership => campaigns::self_membership(c)?,
        CampaignKind::VerifyMain => campaigns::verify_main(c)?,
        CampaignKind::BinaryRoots => campaigns::binary_roots(c)?,
        CampaignKind::CountBinary => campaigns::count_binary(c)?,
        CampaignKind::VerifyConverse => campaigns::verify_converse(c)?,
        CampaignKind::DegenerateLocus => campaigns::degenerate_locus(c)?,
        CampaignKind::AlsMembership => campaigns::als_membership(c)?,
        CampaignKind::FlagFormulas => campaigns::flag_formulas(c)?,
        CampaignKind::FormIdentities => campaigns::form_identities(c)?,
    };
    Ok(CampaignReport::assemble(c, records, assertions))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Campaign {
        Campaign {
            name: "tiny".into(),
            kind: CampaignKind::SelfMembership,
            description: String::new(),
            shapes: vec![
                GridShape::Binary { degrees: vec![1, 2] },
                GridShape::Exterior { dim: 4, k: 2 },
            ],
            samples: 3,
            field: Field::Complex,
            cfg: SolverConfig::default(),
            tolerances: BTreeMap::new(),
        }
    }

    #[test]
    fn builtin_campaigns_parse() {
        let set = CampaignSet::builtin();
        assert!(set.get("self-membership").is_ok());
        assert!(matches!(set.get("nope"), Err(Error::UnknownCampaign(_))));
    }

    #[test]
    fn record_count_is_samples_times_shapes() {
        let r = run_campaign(&tiny()).unwrap();
        assert_eq!(r.records.len(), 6);
        assert!(r.passed);
        assert_eq!(r.shapes.len(), 2);
    }

    #[test]
    fn json_round_trip_keeps_aggregates() {
        let r = run_campaign(&tiny()).unwrap();
        let back: CampaignReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.summary, r.summary);
        assert_eq!(back.shapes, r.shapes);
    }

    #[test]
    fn csv_has_one_row_per_instance() {
        let r = run_campaign(&tiny()).unwrap();
        assert_eq!(r.to_csv().lines().count(), 1 + r.records.len());
    }

    #[test]
    fn empty_report_still_has_header() {
        let mut c = tiny();
        c.shapes.clear();
        let r = run_campaign(&c).unwrap();
        assert_eq!(r.records.len(), 0);
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("campaign,shape"));
        let _: CampaignReport = serde_json::from_str(&r.to_json()).unwrap();
    }

    #[test]
    fn zero_samples_rejected() {
        let mut c = tiny();
        c.samples = 0;
        assert!(run_campaign(&c).is_err());
    }
}
