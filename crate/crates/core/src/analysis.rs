//! Image and fixed-point sets.
//!
//! For a member of `O(·)` every output `y = f(x)` satisfies `f(y, …, y) = y`,
//! and every diagonal fixed point `t` is the output at `(t, …, t)`, so the two
//! sets coincide. On finite domains they are compared exactly; on sampled
//! domains each point of one set must have a neighbour in the other within
//! tolerance.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::checker::{self, CheckConfig, CheckError, Failure, PointStream, Stage, Status, Witness};
use crate::domain::Domain;
use crate::expr::FunctionDef;
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("f is undefined at {:?}: {}", .0.input, .0.failure)]
    Undefined(Witness),
    #[error("requires a verified member, verdict was {0}")]
    Precondition(Status),
}

/// Distinct, sorted points with a flag saying whether they are the whole set
/// or a sample of it.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub exact: bool,
    pub points: Vec<Scalar>,
}

impl PointSet {
    fn new(exact: bool, mut points: Vec<Scalar>) -> Self {
        scalar::sort_dedup(&mut points);
        PointSet { exact, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> Option<Scalar> {
        self.points.first().copied()
    }

    pub fn max(&self) -> Option<Scalar> {
        self.points.last().copied()
    }

    fn same_values(&self, other: &PointSet) -> bool {
        self.points.len() == other.points.len() && self.points.iter().zip(&other.points).all(|(a, b)| a.value_eq(b))
    }

    /// Every point here has a neighbour in `other` within tolerance.
    fn covered_by(&self, other: &PointSet, cfg: &CheckConfig) -> bool {
        self.points.iter().all(|&p| {
            let i = other.points.partition_point(|q| q.cmp_value(&p).is_lt());
            let near = |j: usize| other.points.get(j).is_some_and(|&q| cfg.agrees(q, p));
            near(i) || (i > 0 && near(i - 1))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageReport {
    pub image: PointSet,
    pub fixed_points: PointSet,
    pub equal: bool,
}

fn undefined(index: u64, input: Vec<Scalar>, error: crate::expr::EvalError) -> AnalysisError {
    AnalysisError::Undefined(Witness {
        index,
        input,
        failure: Failure::Eval {
            stage: Stage::Output,
            output: None,
            error,
        },
    })
}

/// `{f(x)}` over the enumerated or sampled domain. Outputs that leave the
/// domain are kept: this is the set `B`, not `B ∩ A`.
pub fn image(f: &FunctionDef, cfg: &CheckConfig) -> Result<PointSet, AnalysisError> {
    cfg.validate()?;
    let (points, coverage) = PointStream::new(&f.signature, cfg)?;
    let mut out = Vec::new();
    for (i, x) in points.enumerate() {
        match f.apply(&x) {
            Ok(y) => out.push(y),
            Err(e) => return Err(undefined(i as u64, x, e)),
        }
    }
    Ok(PointSet::new(coverage == checker::Coverage::Exhaustive, out))
}

/// Scalars lying in every factor: enumerated when some factor is finite and
/// small enough, sampled otherwise.
fn diagonal_candidates(f: &FunctionDef, cfg: &CheckConfig) -> Result<(bool, Vec<Scalar>), CheckError> {
    let factors = f.signature.distinct_factors();
    let in_all = |t: &Scalar| factors.iter().all(|d| d.contains(*t));
    let finite = factors
        .iter()
        .filter(|d| d.size().is_some_and(|n| n <= cfg.enumeration_cutoff as u128))
        .min_by_key(|d| d.size());
    let sampled_mode = cfg.mode == checker::PointMode::Sampled;
    if let (Some(d), false) = (finite, sampled_mode) {
        let pts = d.enumerate()?.into_iter().filter(in_all).collect();
        return Ok((true, pts));
    }
    if f.arity() == 1 {
        // same points the image is built from
        let (points, _) = PointStream::new(&f.signature, cfg)?;
        return Ok((false, points.map(|x| x[0]).collect()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut pts = Vec::with_capacity(cfg.sample_count);
    for i in 0..cfg.sample_count {
        let d: &Domain = factors[i % factors.len()];
        let t = d.sample_one(&mut rng, cfg.window);
        if in_all(&t) {
            pts.push(t);
        }
    }
    Ok((false, pts))
}

fn is_fixed(f: &FunctionDef, t: Scalar, cfg: &CheckConfig) -> bool {
    let args = alloc::vec![t; f.arity()];
    f.apply(&args).is_ok_and(|y| cfg.agrees(y, t))
}

/// Points `t` of the domain with `f(t, …, t) = t` within tolerance.
pub fn fixed_points(f: &FunctionDef, cfg: &CheckConfig) -> Result<PointSet, AnalysisError> {
    cfg.validate()?;
    let (exact, candidates) = diagonal_candidates(f, cfg)?;
    if exact {
        let fixed = candidates.into_iter().filter(|&t| is_fixed(f, t, cfg)).collect();
        return Ok(PointSet::new(true, fixed));
    }
    let image = image(f, cfg)?;
    Ok(sampled_fixed(f, candidates, &image, cfg))
}

fn sampled_fixed(f: &FunctionDef, mut candidates: Vec<Scalar>, image: &PointSet, cfg: &CheckConfig) -> PointSet {
    // image points inside the domain are candidates too; sampling a
    // continuous domain rarely lands on e.g. the integers fixed by floor
    candidates.extend(image.points.iter().copied().filter(|&y| f.signature.accepts_output(y)));
    let fixed = candidates.into_iter().filter(|&t| is_fixed(f, t, cfg)).collect();
    PointSet::new(false, fixed)
}

/// Image and fixed points side by side, without requiring membership.
pub fn compare_fix_and_image(f: &FunctionDef, cfg: &CheckConfig) -> Result<ImageReport, AnalysisError> {
    cfg.validate()?;
    let mut image = image(f, cfg)?;
    let (exact, candidates) = diagonal_candidates(f, cfg)?;
    let fixed_points = if exact && image.exact {
        let fixed = candidates.into_iter().filter(|&t| is_fixed(f, t, cfg)).collect();
        PointSet::new(true, fixed)
    } else {
        // outputs on the diagonal belong to the image as well
        let mut extra = Vec::new();
        for &t in &candidates {
            match f.apply(&alloc::vec![t; f.arity()]) {
                Ok(y) => extra.push(y),
                Err(e) => return Err(undefined(0, alloc::vec![t; f.arity()], e)),
            }
        }
        let fixed = sampled_fixed(f, candidates, &image, cfg);
        extra.extend(image.points.iter().copied());
        image = PointSet::new(image.exact, extra);
        fixed
    };
    let equal = if image.exact && fixed_points.exact {
        image.same_values(&fixed_points)
    } else {
        image.covered_by(&fixed_points, cfg) && fixed_points.covered_by(&image, cfg)
    };
    Ok(ImageReport {
        image,
        fixed_points,
        equal,
    })
}

/// `Fix(f) = Im(f)` for a function already shown to be a member.
pub fn verify_fix_equals_image(f: &FunctionDef, cfg: &CheckConfig) -> Result<ImageReport, AnalysisError> {
    let verdict = checker::check(f, cfg)?;
    if !verdict.status.is_member() {
        return Err(AnalysisError::Precondition(verdict.status));
    }
    compare_fix_and_image(f, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::domain::{parse_domain, DomainSignature};

    fn on(name: &str, domain: &str) -> FunctionDef {
        let f = lookup(name).unwrap().def;
        let base = parse_domain(domain).unwrap();
        f.with_signature(DomainSignature::power(base, f.arity()).unwrap())
            .unwrap()
    }

    fn ints(v: impl IntoIterator<Item = i64>) -> Vec<Scalar> {
        v.into_iter().map(Scalar::Int).collect()
    }

    #[test]
    fn image_examples() {
        let cfg = CheckConfig::default();
        let im = image(&on("const_7", "int[0..9]"), &cfg).unwrap();
        assert!(im.exact);
        assert_eq!(im.points, ints([7]));
        let im = image(&on("identity", "int[0..3]"), &cfg).unwrap();
        assert_eq!(im.points, ints(0..=3));
        let im = image(&on("floor", "real[0,3)"), &cfg).unwrap();
        assert!(!im.exact);
        assert!(im.points.iter().all(|p| matches!(p, Scalar::Int(0..=2))));
    }

    #[test]
    fn fixed_point_examples() {
        let cfg = CheckConfig::default();
        assert_eq!(
            fixed_points(&on("const_7", "int[0..9]"), &cfg).unwrap().points,
            ints([7])
        );
        assert!(fixed_points(&on("succ", "int[0..9]"), &cfg).unwrap().is_empty());
        let mean2 = lookup("mean_2").unwrap().def;
        let fix = fixed_points(&mean2, &cfg).unwrap();
        assert!(!fix.exact);
        assert!(fix.len() >= 9_000, "{}", fix.len());
    }

    #[test]
    fn undefined_output_propagates() {
        let sig = DomainSignature::univariate(parse_domain("int[-1..1]").unwrap());
        let f = FunctionDef::new("inv", crate::expr::parse("1/x1", 1).unwrap(), sig, Domain::AllReals).unwrap();
        assert!(matches!(
            image(&f, &CheckConfig::default()),
            Err(AnalysisError::Undefined(_))
        ));
    }

    #[test]
    fn fix_equals_image_examples() {
        let cfg = CheckConfig::default();
        let r = verify_fix_equals_image(&on("identity", "int[0..99]"), &cfg).unwrap();
        assert!(r.equal);
        assert_eq!(r.image.points, ints(0..=99));
        let r = verify_fix_equals_image(&on("const_7", "int[0..9]"), &cfg).unwrap();
        assert!(r.equal);
        assert_eq!(r.fixed_points.points, ints([7]));
        let r = verify_fix_equals_image(&on("floor", "real[0,10)"), &cfg).unwrap();
        assert!(r.equal);
        assert_eq!(r.image.points, ints(0..=9));
        assert_eq!(r.fixed_points.points, ints(0..=9));
    }

    #[test]
    fn sampled_multivariate_members_compare_equal() {
        let cfg = CheckConfig::default();
        for name in ["mean_2", "min_2", "median_3"] {
            let r = verify_fix_equals_image(&lookup(name).unwrap().def, &cfg).unwrap();
            assert!(r.equal, "{name}");
        }
    }

    #[test]
    fn non_members() {
        let cfg = CheckConfig::default();
        assert!(matches!(
            verify_fix_equals_image(&lookup("succ").unwrap().def, &cfg),
            Err(AnalysisError::Precondition(Status::Fails))
        ));
        let r = compare_fix_and_image(&lookup("succ").unwrap().def, &cfg).unwrap();
        assert!(!r.equal);
        assert!(r.fixed_points.is_empty());
        assert!(!r.image.is_empty());
    }
}
