//! Serializable report records and their text renderings.

use std::fmt::Write as _;

use ouroboros_core::analysis::{ImageReport, PointSet};
use ouroboros_core::checker::{CheckConfig, Coverage, Failure, PointMode, Stage, Verdict, Witness};
use ouroboros_core::slln::ConvergenceTrace;
use ouroboros_core::{FunctionDef, Scalar};
use serde::{Serialize, Serializer};

/// Point lists longer than this are truncated in reports.
pub const LIST_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy)]
pub struct Num(pub Scalar);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Scalar::Int(i) => s.serialize_i64(i),
            Scalar::Real(r) => s.serialize_f64(r),
        }
    }
}

fn nums(v: &[Scalar]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

#[derive(Debug, Serialize)]
pub struct ConfigRecord {
    pub sample_count: usize,
    pub enumeration_cutoff: u64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub window: [f64; 2],
    pub mode: &'static str,
}

impl From<&CheckConfig> for ConfigRecord {
    fn from(c: &CheckConfig) -> Self {
        ConfigRecord {
            sample_count: c.sample_count,
            enumeration_cutoff: c.enumeration_cutoff,
            eps_abs: c.eps_abs,
            eps_rel: c.eps_rel,
            window: [c.window.lo, c.window.hi],
            mode: match c.mode {
                PointMode::Auto => "auto",
                PointMode::Exhaustive => "exhaustive",
                PointMode::Sampled => "sampled",
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct WitnessRecord {
    pub index: u64,
    pub input: Vec<Num>,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub composed: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rejected_by: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub message: String,
}

impl From<&Witness> for WitnessRecord {
    fn from(w: &Witness) -> Self {
        let mut r = WitnessRecord {
            index: w.index,
            input: nums(&w.input),
            kind: "",
            output: w.output().map(Num),
            composed: None,
            defect: None,
            rejected_by: Vec::new(),
            stage: None,
            error: None,
            message: w.failure.to_string(),
        };
        match &w.failure {
            Failure::Escape { rejected_by, .. } => {
                r.kind = "escape";
                r.rejected_by = rejected_by.iter().map(ToString::to_string).collect();
            }
            Failure::Eval { stage, error, .. } => {
                r.kind = "eval_error";
                r.stage = Some(match stage {
                    Stage::Output => "output",
                    Stage::Composition => "composition",
                });
                r.error = Some(error.to_string());
            }
            Failure::Defect { composed, defect, .. } => {
                r.kind = "defect";
                r.composed = Some(Num(*composed));
                r.defect = Some(*defect);
            }
        }
        r
    }
}

#[derive(Debug, Serialize)]
pub struct PointSetRecord {
    pub exact: bool,
    pub count: usize,
    pub min: Option<Num>,
    pub max: Option<Num>,
    /// The smallest points, at most `LIST_LIMIT` of them.
    pub points: Vec<Num>,
    pub truncated: bool,
}

impl From<&PointSet> for PointSetRecord {
    fn from(p: &PointSet) -> Self {
        PointSetRecord {
            exact: p.exact,
            count: p.len(),
            min: p.min().map(Num),
            max: p.max().map(Num),
            points: nums(&p.points[..p.len().min(LIST_LIMIT)]),
            truncated: p.len() > LIST_LIMIT,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ImageRecord {
    pub image: PointSetRecord,
    pub fixed_points: PointSetRecord,
    pub equal: bool,
}

impl From<&ImageReport> for ImageRecord {
    fn from(r: &ImageReport) -> Self {
        ImageRecord {
            image: (&r.image).into(),
            fixed_points: (&r.fixed_points).into(),
            equal: r.equal,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckRecord {
    pub function: String,
    pub expression: String,
    pub signature: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<String>,
    pub status: &'static str,
    pub coverage: &'static str,
    pub points_checked: u64,
    pub max_defect: f64,
    pub max_rel_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image: Option<ImageRecord>,
    pub seed: u64,
    pub config: ConfigRecord,
}

impl CheckRecord {
    pub fn new(f: &FunctionDef, v: &Verdict, cfg: &CheckConfig) -> Self {
        CheckRecord {
            function: f.name.clone(),
            expression: f.body.to_string(),
            signature: f.signature.to_string(),
            n: None,
            distribution: None,
            status: v.status.as_str(),
            coverage: v.coverage.as_str(),
            points_checked: v.points_checked,
            max_defect: v.max_defect,
            max_rel_defect: v.max_rel_defect,
            witness: v.witness.as_ref().map(Into::into),
            image: None,
            seed: cfg.seed,
            config: cfg.into(),
        }
    }

    pub const CSV_HEADER: [&'static str; 9] = [
        "function",
        "signature",
        "n",
        "status",
        "coverage",
        "points_checked",
        "max_defect",
        "max_rel_defect",
        "seed",
    ];

    pub fn csv_row(&self) -> [String; 9] {
        [
            self.function.clone(),
            self.signature.clone(),
            self.n.map(|n| n.to_string()).unwrap_or_default(),
            self.status.to_string(),
            self.coverage.to_string(),
            self.points_checked.to_string(),
            self.max_defect.to_string(),
            self.max_rel_defect.to_string(),
            self.seed.to_string(),
        ]
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let name = match self.n {
            Some(n) => format!("{} (n = {n})", self.function),
            None => self.function.clone(),
        };
        let _ = writeln!(s, "function   {name}: {}", self.expression);
        let _ = writeln!(s, "domain     {}", self.signature);
        if let Some(d) = &self.distribution {
            let _ = writeln!(s, "inputs     drawn from {d}");
        }
        let _ = writeln!(
            s,
            "status     {} ({}, {} points)",
            self.status, self.coverage, self.points_checked
        );
        let _ = writeln!(s, "max defect {} (relative {})", self.max_defect, self.max_rel_defect);
        if let Some(w) = &self.witness {
            let input: Vec<String> = w.input.iter().map(|n| n.0.to_string()).collect();
            let _ = writeln!(s, "witness    #{} x = ({}): {}", w.index, input.join(", "), w.message);
        }
        if let Some(img) = &self.image {
            point_set_text(&mut s, "image", &img.image);
            point_set_text(&mut s, "fixed", &img.fixed_points);
            let _ = writeln!(s, "Fix = Im   {}", img.equal);
        }
        if self.coverage == Coverage::Sampled.as_str() {
            let _ = writeln!(
                s,
                "note       sampled verdicts are evidence from finitely many points, not proofs"
            );
        }
        s
    }
}

fn point_set_text(s: &mut String, label: &str, p: &PointSetRecord) {
    let shown: Vec<String> = p.points.iter().map(|n| n.0.to_string()).collect();
    let range = match (p.min, p.max) {
        (Some(lo), Some(hi)) => format!(", range [{}, {}]", lo.0, hi.0),
        _ => String::new(),
    };
    let _ = writeln!(
        s,
        "{label:<10} {} {} points{range}: {{{}{}}}",
        if p.exact { "exactly" } else { "sampled" },
        p.count,
        shown.join(", "),
        if p.truncated { ", ..." } else { "" }
    );
}

/// Echo of the settings every text report ends with.
pub fn config_line(seed: u64, c: &ConfigRecord) -> String {
    format!(
        "seed {seed}  samples {}  cutoff {}  eps_abs {:e}  eps_rel {:e}  window [{}, {}]  mode {}\n",
        c.sample_count, c.enumeration_cutoff, c.eps_abs, c.eps_rel, c.window[0], c.window[1], c.mode
    )
}

pub const PATH_NOTE: &str = "one seed is one sample path; almost-sure convergence \
is a statement over paths, so compare several seeds";

#[derive(Debug, Serialize)]
pub struct CheckpointRecord {
    pub n: u64,
    pub running_mean: f64,
    pub abs_error: f64,
}

#[derive(Debug, Serialize)]
pub struct TraceRecord {
    pub distribution: String,
    pub seed: u64,
    pub n_max: u64,
    pub analytic_mean: f64,
    pub standard_error: f64,
    pub final_abs_error: f64,
    pub checkpoints: Vec<CheckpointRecord>,
    pub note: &'static str,
}

impl From<&ConvergenceTrace> for TraceRecord {
    fn from(t: &ConvergenceTrace) -> Self {
        TraceRecord {
            distribution: t.distribution.to_string(),
            seed: t.seed,
            n_max: t.n_max,
            analytic_mean: t.analytic_mean,
            standard_error: t.distribution.standard_error(t.n_max),
            final_abs_error: t.final_abs_error,
            checkpoints: t
                .checkpoints
                .iter()
                .zip(&t.running_means)
                .zip(t.abs_errors())
                .map(|((&n, &running_mean), abs_error)| CheckpointRecord {
                    n,
                    running_mean,
                    abs_error,
                })
                .collect(),
            note: PATH_NOTE,
        }
    }
}

impl TraceRecord {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "distribution {}  mean {}", self.distribution, self.analytic_mean);
        let _ = writeln!(s, "{:>12}  {:>22}  {:>22}", "n", "running mean", "abs error");
        for c in &self.checkpoints {
            let _ = writeln!(s, "{:>12}  {:>22}  {:>22}", c.n, c.running_mean, c.abs_error);
        }
        let _ = writeln!(
            s,
            "final error {} at n = {} (standard error {})",
            self.final_abs_error, self.n_max, self.standard_error
        );
        let _ = writeln!(s, "note: {}", self.note);
        let _ = writeln!(s, "seed {}  n_max {}", self.seed, self.n_max);
        s
    }
}

#[derive(Debug, Serialize)]
pub struct CatalogRecord {
    pub name: String,
    pub expression: String,
    pub signature: String,
    pub codomain: String,
    pub expected: &'static str,
    pub note: &'static str,
}
