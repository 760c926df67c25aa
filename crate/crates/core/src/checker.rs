//! Membership checks for `O(A)`, `O(Aⁿ)` and `O(A₁×…×Aₙ)`.
//!
//! A function is a member when every output lies in every factor of its
//! domain and feeding that output back into all argument slots reproduces it:
//! `f(f(x), …, f(x)) = f(x)`. Finite domains under the enumeration cutoff are
//! checked exhaustively; everything else is sampled from a seeded generator,
//! which caps a positive answer at [`Status::HoldsProbably`].
//!
//! Every point is examined, so the status does not depend on point order:
//! any escaping output gives `Undefined`, otherwise any defect above tolerance
//! gives `Fails`. The reported witness is the earliest point of that kind.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::catalog;
use crate::domain::{Domain, DomainError, DomainSignature, SampleWindow};
use crate::expr::{EvalError, FunctionDef};
use crate::scalar::Scalar;

/// Which points a check visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointMode {
    /// Exhaust finite domains up to the cutoff, sample otherwise.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub sample_count: usize,
    pub enumeration_cutoff: u64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub seed: u64,
    /// Sampling range standing in for `R` and `Z`.
    pub window: SampleWindow,
    pub mode: PointMode,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            sample_count: 10_000,
            enumeration_cutoff: 100_000,
            eps_abs: 1e-9,
            eps_rel: 1e-9,
            seed: 42,
            window: SampleWindow::default(),
            mode: PointMode::Auto,
        }
    }
}

impl CheckConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        CheckConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<(), CheckError> {
        if self.sample_count == 0 {
            return Err(CheckError::Config("sample_count must be at least 1".into()));
        }
        let ok = |e: f64| e.is_finite() && e >= 0.0;
        if !ok(self.eps_abs) || !ok(self.eps_rel) {
            return Err(CheckError::Config("tolerances must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// `|value - reference| ≤ eps_abs + eps_rel·|reference|`, exact when both
    /// sides are integers.
    pub fn agrees(&self, value: Scalar, reference: Scalar) -> bool {
        match (value, reference) {
            (Scalar::Int(a), Scalar::Int(b)) => a == b,
            _ => value.abs_diff(reference) <= self.tolerance(reference),
        }
    }

    pub fn tolerance(&self, reference: Scalar) -> f64 {
        self.eps_abs + self.eps_rel * libm::fabs(reference.as_f64())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{check} needs arity {expected}, function has arity {got}")]
    Arity {
        check: &'static str,
        expected: &'static str,
        got: usize,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Every point of a finite domain satisfies the equation.
    Holds,
    /// Every sampled point satisfies the equation.
    HoldsProbably,
    /// Some point has `|f(y, …, y) − y|` above tolerance.
    Fails,
    /// Some output leaves the domain, so the composition is undefined.
    Undefined,
}

impl Status {
    pub fn is_member(self) -> bool {
        matches!(self, Status::Holds | Status::HoldsProbably)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "Holds",
            Status::HoldsProbably => "HoldsProbably",
            Status::Fails => "Fails",
            Status::Undefined => "Undefined",
        }
    }

    /// Holds and HoldsProbably collapse to one class; used to compare
    /// exhaustive and sampled runs.
    pub fn class(self) -> Status {
        if self.is_member() {
            Status::Holds
        } else {
            self
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    Exhaustive,
    Sampled,
}

impl Coverage {
    pub fn as_str(self) -> &'static str {
        match self {
            Coverage::Exhaustive => "exhaustive",
            Coverage::Sampled => "sampled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Computing `y = f(x)`.
    Output,
    /// Computing `f(y, …, y)`.
    Composition,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// `f(x)` lies outside the listed factors.
    Escape { output: Scalar, rejected_by: Vec<Domain> },
    Eval {
        stage: Stage,
        output: Option<Scalar>,
        error: EvalError,
    },
    Defect {
        output: Scalar,
        composed: Scalar,
        defect: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Position of the point in the visit order.
    pub index: u64,
    pub input: Vec<Scalar>,
    pub failure: Failure,
}

impl Witness {
    pub fn output(&self) -> Option<Scalar> {
        match &self.failure {
            Failure::Escape { output, .. } | Failure::Defect { output, .. } => Some(*output),
            Failure::Eval { output, .. } => *output,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub coverage: Coverage,
    pub points_checked: u64,
    /// Largest `|f(y, …, y) − y|` over points whose output stayed in the domain.
    pub max_defect: f64,
    /// Same, divided by `|y|` (or by 1 when `y = 0`).
    pub max_rel_defect: f64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReport {
    pub coverage: Coverage,
    pub points_checked: u64,
    /// First point whose output is outside the domain or fails to evaluate.
    pub escape: Option<Witness>,
    /// Whether the declared codomain is a subset of every factor.
    pub codomain_within_domain: bool,
}

impl ContainmentReport {
    pub fn consistent(&self) -> bool {
        self.escape.is_none()
    }
}

/// Points of a signature in visit order: an odometer over enumerated factors,
/// or a seeded sample stream.
pub struct PointStream {
    inner: StreamKind,
}

enum StreamKind {
    Odometer {
        factors: Vec<Vec<Scalar>>,
        counters: Vec<usize>,
        done: bool,
    },
    Sampled {
        signature: DomainSignature,
        rng: Box<ChaCha8Rng>,
        window: SampleWindow,
        remaining: usize,
    },
}

impl PointStream {
    pub fn new(signature: &DomainSignature, cfg: &CheckConfig) -> Result<(Self, Coverage), CheckError> {
        let exhaust = match cfg.mode {
            PointMode::Sampled => false,
            PointMode::Exhaustive => true,
            PointMode::Auto => signature
                .total_points()
                .is_some_and(|n| n <= cfg.enumeration_cutoff as u128),
        };
        if exhaust {
            let factors = (0..signature.arity())
                .map(|i| signature.factor(i).enumerate())
                .collect::<Result<Vec<_>, _>>()?;
            let counters = vec![0; factors.len()];
            let stream = PointStream {
                inner: StreamKind::Odometer {
                    factors,
                    counters,
                    done: false,
                },
            };
            Ok((stream, Coverage::Exhaustive))
        } else {
            let stream = PointStream {
                inner: StreamKind::Sampled {
                    signature: signature.clone(),
                    rng: Box::new(ChaCha8Rng::seed_from_u64(cfg.seed)),
                    window: cfg.window,
                    remaining: cfg.sample_count,
                },
            };
            Ok((stream, Coverage::Sampled))
        }
    }
}

impl Iterator for PointStream {
    type Item = Vec<Scalar>;

    fn next(&mut self) -> Option<Vec<Scalar>> {
        match &mut self.inner {
            StreamKind::Odometer {
                factors,
                counters,
                done,
            } => {
                if *done {
                    return None;
                }
                let point = counters.iter().zip(factors.iter()).map(|(&c, f)| f[c]).collect();
                // last coordinate varies fastest
                *done = true;
                for i in (0..counters.len()).rev() {
                    counters[i] += 1;
                    if counters[i] < factors[i].len() {
                        *done = false;
                        break;
                    }
                    counters[i] = 0;
                }
                Some(point)
            }
            StreamKind::Sampled {
                signature,
                rng,
                window,
                remaining,
            } => {
                if *remaining == 0 {
                    return None;
                }
                *remaining -= 1;
                Some(signature.sample_point(rng, *window))
            }
        }
    }
}

/// Result of examining the first half of the equation at one point.
enum OutputCheck {
    Inside(Scalar),
    Bad(Failure),
}

fn output_at(f: &FunctionDef, x: &[Scalar]) -> OutputCheck {
    match f.apply(x) {
        Err(error) => OutputCheck::Bad(Failure::Eval {
            stage: Stage::Output,
            output: None,
            error,
        }),
        Ok(y) => {
            let rejected_by = f.signature.rejecting_factors(y);
            if rejected_by.is_empty() {
                OutputCheck::Inside(y)
            } else {
                OutputCheck::Bad(Failure::Escape { output: y, rejected_by })
            }
        }
    }
}

/// Result of `f(t, …, t)` compared against `t`.
#[derive(Clone)]
enum DiagonalCheck {
    Ok { defect: f64, rel: f64 },
    Bad { failure: Failure, undefined: bool },
}

fn diagonal_at(f: &FunctionDef, t: Scalar, cfg: &CheckConfig) -> DiagonalCheck {
    let args = vec![t; f.arity()];
    match f.apply(&args) {
        Err(error) => DiagonalCheck::Bad {
            failure: Failure::Eval {
                stage: Stage::Composition,
                output: Some(t),
                error,
            },
            undefined: true,
        },
        Ok(composed) => {
            let defect = composed.abs_diff(t);
            let scale = libm::fabs(t.as_f64());
            let rel = if scale > 0.0 { defect / scale } else { defect };
            if cfg.agrees(composed, t) {
                DiagonalCheck::Ok { defect, rel }
            } else {
                DiagonalCheck::Bad {
                    failure: Failure::Defect {
                        output: t,
                        composed,
                        defect,
                    },
                    undefined: false,
                }
            }
        }
    }
}

/// Folds per-point outcomes into a verdict.
struct Tally {
    coverage: Coverage,
    points: u64,
    max_defect: f64,
    max_rel: f64,
    first_undefined: Option<Witness>,
    first_defect: Option<Witness>,
}

impl Tally {
    fn new(coverage: Coverage) -> Self {
        Tally {
            coverage,
            points: 0,
            max_defect: 0.0,
            max_rel: 0.0,
            first_undefined: None,
            first_defect: None,
        }
    }

    fn record(&mut self, index: u64, input: &[Scalar], outcome: Result<(f64, f64), (Failure, bool)>) {
        self.points += 1;
        match outcome {
            Ok((defect, rel)) => {
                self.max_defect = self.max_defect.max(defect);
                self.max_rel = self.max_rel.max(rel);
            }
            Err((failure, undefined)) => {
                if let Failure::Defect { defect, output, .. } = &failure {
                    self.max_defect = self.max_defect.max(*defect);
                    let scale = libm::fabs(output.as_f64());
                    self.max_rel = self.max_rel.max(if scale > 0.0 { defect / scale } else { *defect });
                }
                let slot = if undefined {
                    &mut self.first_undefined
                } else {
                    &mut self.first_defect
                };
                if slot.as_ref().is_none_or(|w| index < w.index) {
                    *slot = Some(Witness {
                        index,
                        input: input.to_vec(),
                        failure,
                    });
                }
            }
        }
    }

    fn finish(self) -> Verdict {
        let (status, witness) = if let Some(w) = self.first_undefined {
            (Status::Undefined, Some(w))
        } else if let Some(w) = self.first_defect {
            (Status::Fails, Some(w))
        } else if self.coverage == Coverage::Exhaustive {
            (Status::Holds, None)
        } else {
            (Status::HoldsProbably, None)
        };
        Verdict {
            status,
            coverage: self.coverage,
            points_checked: self.points,
            max_defect: self.max_defect,
            max_rel_defect: self.max_rel,
            witness,
        }
    }
}

/// Checks `f` over an arbitrary point sequence. `coverage` states whether the
/// sequence is the whole domain.
pub fn check_points<I>(f: &FunctionDef, points: I, coverage: Coverage, cfg: &CheckConfig) -> Verdict
where
    I: IntoIterator<Item = Vec<Scalar>>,
{
    let mut tally = Tally::new(coverage);
    for (index, x) in points.into_iter().enumerate() {
        let outcome = match output_at(f, &x) {
            OutputCheck::Bad(failure) => Err((failure, true)),
            OutputCheck::Inside(y) => match diagonal_at(f, y, cfg) {
                DiagonalCheck::Ok { defect, rel } => Ok((defect, rel)),
                DiagonalCheck::Bad { failure, undefined } => Err((failure, undefined)),
            },
        };
        tally.record(index as u64, &x, outcome);
    }
    tally.finish()
}

/// Looks for an input whose output leaves the domain: outside the base set
/// for `Aⁿ`, outside any factor for a mixed product.
pub fn check_containment(f: &FunctionDef, cfg: &CheckConfig) -> Result<ContainmentReport, CheckError> {
    cfg.validate()?;
    let (points, coverage) = PointStream::new(&f.signature, cfg)?;
    let mut checked = 0u64;
    let mut escape = None;
    for (index, x) in points.enumerate() {
        checked += 1;
        if let OutputCheck::Bad(failure) = output_at(f, &x) {
            escape = Some(Witness {
                index: index as u64,
                input: x,
                failure,
            });
            break;
        }
    }
    let codomain_within_domain = f
        .signature
        .distinct_factors()
        .iter()
        .all(|d| f.codomain.is_subset_of(d));
    Ok(ContainmentReport {
        coverage,
        points_checked: checked,
        escape,
        codomain_within_domain,
    })
}

/// Membership in `O(A)` for a function of one variable.
pub fn check_univariate(f: &FunctionDef, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    if f.arity() != 1 {
        return Err(CheckError::Arity {
            check: "check_univariate",
            expected: "1",
            got: f.arity(),
        });
    }
    check(f, cfg)
}

/// Membership in `O(Aⁿ)` or `O(A₁×…×Aₙ)` for `n ≥ 2`.
pub fn check_multivariate(f: &FunctionDef, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    if f.arity() < 2 {
        return Err(CheckError::Arity {
            check: "check_multivariate",
            expected: ">= 2",
            got: f.arity(),
        });
    }
    check(f, cfg)
}

/// Membership check for any arity.
pub fn check(f: &FunctionDef, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    cfg.validate()?;
    let (points, coverage) = PointStream::new(&f.signature, cfg)?;
    Ok(check_points(f, points, coverage, cfg))
}

/// Same question answered through the diagonal `t ↦ f(t, …, t)`: collect the
/// distinct outputs `t = f(x)` first, then test `f(t, …, t) = t` once per `t`.
pub fn check_diagonal(f: &FunctionDef, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    if f.arity() < 2 {
        return Err(CheckError::Arity {
            check: "check_diagonal",
            expected: ">= 2",
            got: f.arity(),
        });
    }
    cfg.validate()?;
    let (points, coverage) = PointStream::new(&f.signature, cfg)?;

    #[derive(PartialEq, Eq, PartialOrd, Ord)]
    enum Key {
        Int(i64),
        Real(u64),
    }
    let key = |t: Scalar| match t {
        Scalar::Int(i) => Key::Int(i),
        Scalar::Real(r) => Key::Real(r.to_bits()),
    };

    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut image: BTreeMap<Key, Scalar> = BTreeMap::new();
    for x in points {
        let out = output_at(f, &x);
        if let OutputCheck::Inside(t) = &out {
            image.entry(key(*t)).or_insert(*t);
        }
        inputs.push(x);
        outputs.push(out);
    }
    let diagonal: BTreeMap<Key, DiagonalCheck> = image.into_iter().map(|(k, t)| (k, diagonal_at(f, t, cfg))).collect();

    let mut tally = Tally::new(coverage);
    for (index, (x, out)) in inputs.iter().zip(outputs).enumerate() {
        let outcome = match out {
            OutputCheck::Bad(failure) => Err((failure, true)),
            OutputCheck::Inside(t) => match &diagonal[&key(t)] {
                DiagonalCheck::Ok { defect, rel } => Ok((*defect, *rel)),
                DiagonalCheck::Bad { failure, undefined } => Err((failure.clone(), *undefined)),
            },
        };
        tally.record(index as u64, x, outcome);
    }
    Ok(tally.finish())
}

/// `mean_n` over `baseⁿ` for each requested `n`.
pub fn check_mean_sweep(
    base: &Domain,
    n_values: &[usize],
    cfg: &CheckConfig,
) -> Result<Vec<(usize, Verdict)>, CheckError> {
    n_values
        .iter()
        .map(|&n| {
            let sig = DomainSignature::power(base.clone(), n)?;
            let f = catalog::mean(n).with_signature(sig).expect("mean_n has arity n");
            Ok((n, check(&f, cfg)?))
        })
        .collect()
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Escape { output, rejected_by } => {
                write!(f, "f(x) = {output} lies outside ")?;
                let names: Vec<String> = rejected_by.iter().map(ToString::to_string).collect();
                f.write_str(&names.join(", "))
            }
            Failure::Eval { stage, output, error } => match (stage, output) {
                (Stage::Output, _) => write!(f, "f(x) is undefined: {error}"),
                (Stage::Composition, Some(y)) => {
                    write!(f, "f({y}, ..., {y}) is undefined: {error}")
                }
                (Stage::Composition, None) => write!(f, "composition is undefined: {error}"),
            },
            Failure::Defect {
                output,
                composed,
                defect,
            } => write!(
                f,
                "f(x) = {output} but f(f(x), ..., f(x)) = {composed} (defect {defect})"
            ),
        }
    }
}
