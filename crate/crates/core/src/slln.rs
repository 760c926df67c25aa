//! Running means of i.i.d. draws and the mean-function membership sweep.
//!
//! A seed plays the role of one outcome `ω`: it fixes a whole sample path
//! `X₁(ω), X₂(ω), …`. Convergence "almost surely" is checked the only way a
//! finite run can: across many seeds.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Exp, Normal, Uniform};
use thiserror::Error;

use crate::catalog;
use crate::checker::{check_points, CheckConfig, CheckError, Coverage, Verdict};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("invalid parameters for {family}: {reason}")]
    Parameters { family: &'static str, reason: &'static str },
    #[error("{0} has no finite mean")]
    NotIntegrable(String),
    #[error(
        "unknown distribution `{0}`; expected uniform(a,b), bernoulli(p), normal(mu,sigma) or exponential(lambda)"
    )]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Uniform { lo: f64, hi: f64 },
    Bernoulli { p: f64 },
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
}

impl DistributionSpec {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self, DistributionError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(DistributionError::Parameters {
                family: "uniform",
                reason: "need finite a < b",
            });
        }
        Ok(DistributionSpec::Uniform { lo, hi })
    }

    pub fn bernoulli(p: f64) -> Result<Self, DistributionError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(DistributionError::Parameters {
                family: "bernoulli",
                reason: "need 0 <= p <= 1",
            });
        }
        Ok(DistributionSpec::Bernoulli { p })
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self, DistributionError> {
        if !(mean.is_finite() && sd.is_finite() && sd > 0.0) {
            return Err(DistributionError::Parameters {
                family: "normal",
                reason: "need finite mu and sigma > 0",
            });
        }
        Ok(DistributionSpec::Normal { mean, sd })
    }

    pub fn exponential(rate: f64) -> Result<Self, DistributionError> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(DistributionError::Parameters {
                family: "exponential",
                reason: "need lambda > 0",
            });
        }
        Ok(DistributionSpec::Exponential { rate })
    }

    /// Parses `uniform(0,1)`, `bernoulli(0.3)`, `normal(0,1)`, `exponential(2)`.
    pub fn parse(text: &str) -> Result<Self, DistributionError> {
        let unknown = || DistributionError::Unknown(text.into());
        let text = text.trim();
        let open = text.find('(').ok_or_else(unknown)?;
        let inner = text[open + 1..].strip_suffix(')').ok_or_else(unknown)?;
        let args: Vec<f64> = inner
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| unknown())?;
        match (text[..open].trim(), args.as_slice()) {
            ("uniform", &[a, b]) => Self::uniform(a, b),
            ("bernoulli", &[p]) => Self::bernoulli(p),
            ("normal", &[m, s]) => Self::normal(m, s),
            ("exponential" | "exp", &[l]) => Self::exponential(l),
            ("cauchy", _) => Err(DistributionError::NotIntegrable(text.into())),
            _ => Err(unknown()),
        }
    }

    pub fn analytic_mean(&self) -> f64 {
        match *self {
            DistributionSpec::Uniform { lo, hi } => (lo + hi) / 2.0,
            DistributionSpec::Bernoulli { p } => p,
            DistributionSpec::Normal { mean, .. } => mean,
            DistributionSpec::Exponential { rate } => 1.0 / rate,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            DistributionSpec::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            DistributionSpec::Bernoulli { p } => p * (1.0 - p),
            DistributionSpec::Normal { sd, .. } => sd * sd,
            DistributionSpec::Exponential { rate } => 1.0 / (rate * rate),
        }
    }

    /// Standard error of the mean of `n` draws.
    pub fn standard_error(&self, n: u64) -> f64 {
        libm::sqrt(self.variance() / n as f64)
    }

    pub fn sampler(&self) -> Sampler {
        let kind = match *self {
            DistributionSpec::Uniform { lo, hi } => {
                SamplerKind::Uniform(Uniform::new(lo, hi).expect("validated bounds"))
            }
            DistributionSpec::Bernoulli { p } => {
                SamplerKind::Bernoulli(Bernoulli::new(p).expect("validated probability"))
            }
            DistributionSpec::Normal { mean, sd } => {
                SamplerKind::Normal(Normal::new(mean, sd).expect("validated sigma"))
            }
            DistributionSpec::Exponential { rate } => SamplerKind::Exp(Exp::new(rate).expect("validated rate")),
        };
        Sampler { kind }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
            DistributionSpec::Bernoulli { p } => write!(f, "bernoulli({p})"),
            DistributionSpec::Normal { mean, sd } => write!(f, "normal({mean},{sd})"),
            DistributionSpec::Exponential { rate } => write!(f, "exponential({rate})"),
        }
    }
}

pub struct Sampler {
    kind: SamplerKind,
}

enum SamplerKind {
    Uniform(Uniform<f64>),
    Bernoulli(Bernoulli),
    Normal(Normal<f64>),
    Exp(Exp<f64>),
}

impl Sampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            SamplerKind::Uniform(d) => d.sample(rng),
            SamplerKind::Bernoulli(d) => {
                if d.sample(rng) {
                    1.0
                } else {
                    0.0
                }
            }
            SamplerKind::Normal(d) => d.sample(rng),
            SamplerKind::Exp(d) => d.sample(rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub distribution: DistributionSpec,
    pub seed: u64,
    pub n_max: u64,
    pub checkpoints: Vec<u64>,
    /// `(1/n_k) Σ_{i ≤ n_k} X_i` along one sample path.
    pub running_means: Vec<f64>,
    pub analytic_mean: f64,
    pub final_abs_error: f64,
}

impl ConvergenceTrace {
    pub fn abs_errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.running_means
            .iter()
            .map(move |m| libm::fabs(m - self.analytic_mean))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("checkpoints must be strictly ascending and start at 1 or more")]
    Checkpoints,
    #[error("checkpoint {0} exceeds n_max {1}")]
    BeyondMax(u64, u64),
    #[error("n_max must be at least 1")]
    Empty,
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Draws `n_max` values along one seeded path and records the running mean at
/// each checkpoint. The final error is measured at `n_max`.
pub fn simulate_path(
    dist: &DistributionSpec,
    n_max: u64,
    checkpoints: &[u64],
    seed: u64,
) -> Result<ConvergenceTrace, SimulationError> {
    if n_max == 0 {
        return Err(SimulationError::Empty);
    }
    if checkpoints.first() == Some(&0) || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SimulationError::Checkpoints);
    }
    if let Some(&last) = checkpoints.last().filter(|&&c| c > n_max) {
        return Err(SimulationError::BeyondMax(last, n_max));
    }
    let sampler = dist.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut running_means = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for i in 1..=n_max {
        sum += sampler.draw(&mut rng);
        if next.peek() == Some(&&i) {
            next.next();
            running_means.push(sum / i as f64);
        }
    }
    let analytic_mean = dist.analytic_mean();
    Ok(ConvergenceTrace {
        distribution: *dist,
        seed,
        n_max,
        checkpoints: checkpoints.to_vec(),
        running_means,
        analytic_mean,
        final_abs_error: libm::fabs(sum / n_max as f64 - analytic_mean),
    })
}

/// `1, 2, 4, …` up to and including `n_max`.
pub fn doubling_checkpoints(n_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = core::iter::successors(Some(1u64), |&c| c.checked_mul(2))
        .take_while(|&c| c <= n_max)
        .collect();
    if out.last() != Some(&n_max) && n_max > 0 {
        out.push(n_max);
    }
    out
}

/// `mean_n ∈ O(ℝⁿ)` for each `n`, with input vectors drawn from `dist`.
pub fn membership_sweep(
    dist: &DistributionSpec,
    n_values: &[usize],
    cfg: &CheckConfig,
) -> Result<Vec<(usize, Verdict)>, SimulationError> {
    cfg.validate()?;
    if n_values.contains(&0) {
        return Err(SimulationError::Checkpoints);
    }
    let sampler = dist.sampler();
    n_values
        .iter()
        .map(|&n| {
            let f = catalog::mean(n);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let points =
                (0..cfg.sample_count).map(|_| (0..n).map(|_| Scalar::Real(sampler.draw(&mut rng))).collect::<Vec<_>>());
            Ok((n, check_points(&f, points, Coverage::Sampled, cfg)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::Status;
    use alloc::format;

    #[test]
    fn parameter_validation() {
        assert!(DistributionSpec::uniform(1.0, 1.0).is_err());
        assert!(DistributionSpec::bernoulli(1.5).is_err());
        assert!(DistributionSpec::normal(0.0, 0.0).is_err());
        assert!(DistributionSpec::exponential(-1.0).is_err());
        assert!(matches!(
            DistributionSpec::parse("cauchy(0,1)"),
            Err(DistributionError::NotIntegrable(_))
        ));
        assert!(matches!(
            DistributionSpec::parse("gamma(2)"),
            Err(DistributionError::Unknown(_))
        ));
        assert_eq!(
            DistributionSpec::parse(" normal(0, 2) ").unwrap(),
            DistributionSpec::Normal { mean: 0.0, sd: 2.0 }
        );
    }

    #[test]
    fn analytic_means() {
        assert_eq!(DistributionSpec::uniform(0.0, 1.0).unwrap().analytic_mean(), 0.5);
        assert_eq!(DistributionSpec::exponential(2.0).unwrap().analytic_mean(), 0.5);
        assert_eq!(DistributionSpec::bernoulli(0.3).unwrap().analytic_mean(), 0.3);
    }

    #[test]
    fn display_parses_back() {
        for d in [
            DistributionSpec::uniform(-1.5, 2.0).unwrap(),
            DistributionSpec::bernoulli(0.25).unwrap(),
            DistributionSpec::normal(3.0, 0.5).unwrap(),
            DistributionSpec::exponential(2.0).unwrap(),
        ] {
            assert_eq!(DistributionSpec::parse(&format!("{d}")).unwrap(), d);
        }
    }

    #[test]
    fn degenerate_bernoulli_is_exact() {
        let d = DistributionSpec::bernoulli(1.0).unwrap();
        let t = simulate_path(&d, 10_000, &doubling_checkpoints(10_000), 3).unwrap();
        assert!(t.running_means.iter().all(|&m| m == 1.0));
        assert_eq!(t.final_abs_error, 0.0);
    }

    #[test]
    fn checkpoint_validation() {
        let d = DistributionSpec::uniform(0.0, 1.0).unwrap();
        assert!(simulate_path(&d, 10, &[2, 2], 1).is_err());
        assert!(simulate_path(&d, 10, &[0, 2], 1).is_err());
        assert!(matches!(
            simulate_path(&d, 10, &[5, 11], 1),
            Err(SimulationError::BeyondMax(11, 10))
        ));
        assert!(simulate_path(&d, 0, &[], 1).is_err());
    }

    #[test]
    fn doubling() {
        assert_eq!(doubling_checkpoints(10), [1, 2, 4, 8, 10]);
        assert_eq!(doubling_checkpoints(8), [1, 2, 4, 8]);
    }

    #[test]
    fn sweep_small() {
        let cfg = CheckConfig {
            sample_count: 500,
            ..CheckConfig::default()
        };
        let d = DistributionSpec::normal(0.0, 1.0).unwrap();
        for (n, v) in membership_sweep(&d, &[1, 2, 8, 32], &cfg).unwrap() {
            assert_eq!(v.status, Status::HoldsProbably, "n={n}");
            assert_eq!(v.points_checked, 500);
        }
    }
}
