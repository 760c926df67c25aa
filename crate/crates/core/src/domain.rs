//! Scalar domains, their finite powers and mixed Cartesian products.
//!
//! Textual form (used by the CLI and by reports):
//!
//! ```text
//! set{1,2,3}   int[-50..50]   real[0,1]   real(0,1]   R   Z
//! R^3          real[0,1] x int[0..9]
//! ```
//!
//! `Display` output always parses back to an equal value.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use thiserror::Error;

use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("empty domain: {0}")]
    Empty(String),
    #[error("lower bound {lo} exceeds upper bound {hi}")]
    Inverted { lo: String, hi: String },
    #[error("domain bound is not finite")]
    NonFiniteBound,
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("domain is not enumerable: {0}")]
    NotEnumerable(String),
    #[error("invalid domain spec at column {column}: {message}")]
    Syntax { column: usize, message: String },
}

/// Bounded stand-in used when sampling `R` or `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleWindow {
    pub lo: f64,
    pub hi: f64,
}

impl SampleWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self, DomainError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(DomainError::NonFiniteBound);
        }
        if lo > hi {
            return Err(DomainError::Inverted {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        if libm::ceil(lo) > libm::floor(hi) {
            return Err(DomainError::Empty("sample window holds no integer".into()));
        }
        Ok(SampleWindow { lo, hi })
    }
}

impl Default for SampleWindow {
    fn default() -> Self {
        SampleWindow { lo: -1e6, hi: 1e6 }
    }
}

/// Sorted, deduplicated, non-empty list of scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSet {
    members: Vec<Scalar>,
}

impl FiniteSet {
    pub fn members(&self) -> &[Scalar] {
        &self.members
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    lo: i64,
    hi: i64,
}

impl IntRange {
    pub fn lo(&self) -> i64 {
        self.lo
    }
    pub fn hi(&self) -> i64 {
        self.hi
    }
    pub fn count(&self) -> u128 {
        (self.hi as i128 - self.lo as i128 + 1) as u128
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RealInterval {
    lo: f64,
    hi: f64,
    lo_closed: bool,
    hi_closed: bool,
}

impl PartialEq for RealInterval {
    fn eq(&self, other: &Self) -> bool {
        self.lo.to_bits() == other.lo.to_bits()
            && self.hi.to_bits() == other.hi.to_bits()
            && self.lo_closed == other.lo_closed
            && self.hi_closed == other.hi_closed
    }
}

impl RealInterval {
    pub fn lo(&self) -> f64 {
        self.lo
    }
    pub fn hi(&self) -> f64 {
        self.hi
    }
    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }
    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    fn contains_f64(&self, v: f64) -> bool {
        let above = if self.lo_closed { v >= self.lo } else { v > self.lo };
        let below = if self.hi_closed { v <= self.hi } else { v < self.hi };
        above && below
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    FiniteSet(FiniteSet),
    IntRange(IntRange),
    RealInterval(RealInterval),
    AllReals,
    AllIntegers,
}

impl Domain {
    pub fn finite_set(values: impl IntoIterator<Item = Scalar>) -> Result<Self, DomainError> {
        let mut members: Vec<Scalar> = values.into_iter().collect();
        if members.is_empty() {
            return Err(DomainError::Empty("set{}".into()));
        }
        scalar::sort_dedup(&mut members);
        Ok(Domain::FiniteSet(FiniteSet { members }))
    }

    pub fn int_range(lo: i64, hi: i64) -> Result<Self, DomainError> {
        if lo > hi {
            return Err(DomainError::Inverted {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(Domain::IntRange(IntRange { lo, hi }))
    }

    pub fn real_interval(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self, DomainError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(DomainError::NonFiniteBound);
        }
        if lo > hi {
            return Err(DomainError::Inverted {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        let iv = RealInterval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        };
        let probe = lo / 2.0 + hi / 2.0;
        let non_empty = if lo == hi {
            lo_closed && hi_closed
        } else {
            iv.contains_f64(probe) || (lo_closed && iv.contains_f64(lo))
        };
        if !non_empty {
            return Err(DomainError::Empty(Domain::RealInterval(iv).to_string()));
        }
        Ok(Domain::RealInterval(iv))
    }

    /// Closed interval `[lo, hi]`.
    pub fn closed(lo: f64, hi: f64) -> Result<Self, DomainError> {
        Self::real_interval(lo, hi, true, true)
    }

    pub fn contains(&self, v: Scalar) -> bool {
        match self {
            Domain::FiniteSet(s) => s.members.binary_search_by(|m| m.cmp_value(&v)).is_ok(),
            Domain::IntRange(r) => v.integer_value().is_some_and(|i| r.lo <= i && i <= r.hi),
            Domain::RealInterval(iv) => iv.contains_f64(v.as_f64()),
            Domain::AllReals => true,
            Domain::AllIntegers => v.integer_value().is_some(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Domain::FiniteSet(_) | Domain::IntRange(_))
    }

    /// Number of members, `None` for infinite variants. Degenerate `real[a,a]`
    /// is treated as infinite-variant and not counted.
    pub fn size(&self) -> Option<u128> {
        match self {
            Domain::FiniteSet(s) => Some(s.members.len() as u128),
            Domain::IntRange(r) => Some(r.count()),
            _ => None,
        }
    }

    /// Every member exactly once, ascending.
    pub fn enumerate(&self) -> Result<Vec<Scalar>, DomainError> {
        match self {
            Domain::FiniteSet(s) => Ok(s.members.clone()),
            Domain::IntRange(r) => Ok((r.lo..=r.hi).map(Scalar::Int).collect()),
            _ => Err(DomainError::NotEnumerable(self.to_string())),
        }
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R, window: SampleWindow) -> Scalar {
        match self {
            Domain::FiniteSet(s) => s.members[rng.random_range(0..s.members.len())],
            Domain::IntRange(r) => Scalar::Int(rng.random_range(r.lo..=r.hi)),
            Domain::RealInterval(iv) => Scalar::Real(sample_interval(iv, rng)),
            Domain::AllReals => Scalar::Real(sample_interval(
                &RealInterval {
                    lo: window.lo,
                    hi: window.hi,
                    lo_closed: true,
                    hi_closed: true,
                },
                rng,
            )),
            Domain::AllIntegers => {
                let lo = libm::ceil(window.lo) as i64;
                let hi = libm::floor(window.hi) as i64;
                Scalar::Int(rng.random_range(lo..=hi))
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R, window: SampleWindow) -> Vec<Scalar> {
        (0..k).map(|_| self.sample_one(rng, window)).collect()
    }

    /// Decides `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Domain) -> bool {
        match (self, other) {
            (_, Domain::AllReals) => true,
            (Domain::FiniteSet(s), _) => s.members.iter().all(|&m| other.contains(m)),
            (Domain::IntRange(_), Domain::AllIntegers) => true,
            (Domain::IntRange(r), Domain::IntRange(o)) => o.lo <= r.lo && r.hi <= o.hi,
            (Domain::IntRange(r), Domain::RealInterval(o)) => {
                o.contains_f64(r.lo as f64) && o.contains_f64(r.hi as f64)
            }
            (Domain::IntRange(r), Domain::FiniteSet(o)) => {
                r.count() <= o.members.len() as u128 && (r.lo..=r.hi).all(|i| other.contains(Scalar::Int(i)))
            }
            (Domain::RealInterval(iv), Domain::RealInterval(o)) => {
                let lo_ok = o.lo < iv.lo || (o.lo == iv.lo && (o.lo_closed || !iv.lo_closed));
                let hi_ok = iv.hi < o.hi || (o.hi == iv.hi && (o.hi_closed || !iv.hi_closed));
                lo_ok && hi_ok
            }
            (Domain::RealInterval(iv), _) => iv.lo == iv.hi && other.contains(Scalar::Real(iv.lo)),
            (Domain::AllIntegers, Domain::AllIntegers) => true,
            _ => false,
        }
    }
}

fn sample_interval<R: Rng + ?Sized>(iv: &RealInterval, rng: &mut R) -> f64 {
    if iv.lo == iv.hi {
        return iv.lo;
    }
    loop {
        let u: f64 = rng.random();
        // convex combination avoids overflow of hi - lo
        let v = iv.lo * (1.0 - u) + iv.hi * u;
        if iv.contains_f64(v) {
            return v;
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::FiniteSet(s) => {
                f.write_str("set{")?;
                for (i, m) in s.members.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str("}")
            }
            Domain::IntRange(r) => write!(f, "int[{}..{}]", r.lo, r.hi),
            Domain::RealInterval(iv) => write!(
                f,
                "real{}{:?},{:?}{}",
                if iv.lo_closed { '[' } else { '(' },
                iv.lo,
                iv.hi,
                if iv.hi_closed { ']' } else { ')' }
            ),
            Domain::AllReals => f.write_str("R"),
            Domain::AllIntegers => f.write_str("Z"),
        }
    }
}

/// Domain of an n-ary function: `Aⁿ` or `A₁ × … × Aₙ`.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSignature {
    Power { base: Domain, arity: usize },
    Mixed(Vec<Domain>),
}

impl DomainSignature {
    pub fn power(base: Domain, arity: usize) -> Result<Self, DomainError> {
        if arity == 0 {
            return Err(DomainError::ZeroArity);
        }
        Ok(DomainSignature::Power { base, arity })
    }

    pub fn univariate(base: Domain) -> Self {
        DomainSignature::Power { base, arity: 1 }
    }

    /// Product of factors; collapses to `Power` when every factor is equal.
    pub fn mixed(factors: Vec<Domain>) -> Result<Self, DomainError> {
        let Some(first) = factors.first() else {
            return Err(DomainError::ZeroArity);
        };
        if factors.iter().all(|d| d == first) {
            let arity = factors.len();
            let base = factors.into_iter().next().unwrap();
            return Ok(DomainSignature::Power { base, arity });
        }
        Ok(DomainSignature::Mixed(factors))
    }

    pub fn arity(&self) -> usize {
        match self {
            DomainSignature::Power { arity, .. } => *arity,
            DomainSignature::Mixed(fs) => fs.len(),
        }
    }

    pub fn factor(&self, i: usize) -> &Domain {
        match self {
            DomainSignature::Power { base, .. } => base,
            DomainSignature::Mixed(fs) => &fs[i],
        }
    }

    /// Distinct factor domains in order of first appearance.
    pub fn distinct_factors(&self) -> Vec<&Domain> {
        match self {
            DomainSignature::Power { base, .. } => alloc::vec![base],
            DomainSignature::Mixed(fs) => {
                let mut out: Vec<&Domain> = Vec::new();
                for d in fs {
                    if !out.contains(&d) {
                        out.push(d);
                    }
                }
                out
            }
        }
    }

    /// Factors that do not contain `y`. Empty means `y` may be fed back into
    /// every argument slot.
    pub fn rejecting_factors(&self, y: Scalar) -> Vec<Domain> {
        self.distinct_factors()
            .into_iter()
            .filter(|d| !d.contains(y))
            .cloned()
            .collect()
    }

    pub fn accepts_output(&self, y: Scalar) -> bool {
        self.distinct_factors().iter().all(|d| d.contains(y))
    }

    /// Number of points in the product, `None` if any factor is infinite or the
    /// count overflows.
    pub fn total_points(&self) -> Option<u128> {
        (0..self.arity()).try_fold(1u128, |acc, i| acc.checked_mul(self.factor(i).size()?))
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, window: SampleWindow) -> Vec<Scalar> {
        (0..self.arity())
            .map(|i| self.factor(i).sample_one(rng, window))
            .collect()
    }

    /// Same signature with every factor replaced by `base`.
    pub fn rebased(&self, base: Domain) -> Self {
        DomainSignature::Power {
            base,
            arity: self.arity(),
        }
    }
}

impl fmt::Display for DomainSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSignature::Power { base, arity: 1 } => write!(f, "{base}"),
            DomainSignature::Power { base, arity } => write!(f, "{base}^{arity}"),
            DomainSignature::Mixed(fs) => {
                for (i, d) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" x ")?;
                    }
                    write!(f, "{d}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parse a single domain such as `int[0..9]`.
pub fn parse_domain(text: &str) -> Result<Domain, DomainError> {
    let mut p = SpecParser::new(text);
    p.skip_ws();
    let d = p.domain()?;
    p.skip_ws();
    p.expect_end()?;
    Ok(d)
}

/// Parse a signature such as `R^3` or `real[0,1] x int[0..9]`.
pub fn parse_signature(text: &str) -> Result<DomainSignature, DomainError> {
    let mut p = SpecParser::new(text);
    let mut factors = Vec::new();
    loop {
        p.skip_ws();
        let d = p.domain()?;
        p.skip_ws();
        let mut count = 1usize;
        if p.eat('^') {
            p.skip_ws();
            count = p.unsigned()?;
            if count == 0 {
                return Err(p.error("exponent must be at least 1"));
            }
        }
        factors.extend(core::iter::repeat_n(d, count));
        p.skip_ws();
        if p.at_end() {
            break;
        }
        if !(p.eat('x') || p.eat('×')) {
            return Err(p.error("expected `x` between factors"));
        }
    }
    if factors.len() > 1 && factors.iter().all(|d| d == &factors[0]) {
        let arity = factors.len();
        return DomainSignature::power(factors.swap_remove(0), arity);
    }
    DomainSignature::mixed(factors)
}

struct SpecParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> SpecParser<'a> {
    fn new(src: &'a str) -> Self {
        SpecParser { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn error(&self, message: &str) -> DomainError {
        DomainError::Syntax {
            column: self.src[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), DomainError> {
        self.skip_ws();
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&alloc::format!("expected `{c}`")))
        }
    }

    fn expect_end(&self) -> Result<(), DomainError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn domain(&mut self) -> Result<Domain, DomainError> {
        if self.eat_str("set") {
            self.expect('{')?;
            let mut members = Vec::new();
            loop {
                self.skip_ws();
                members.push(self.scalar()?);
                self.skip_ws();
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
            Domain::finite_set(members)
        } else if self.eat_str("int") {
            self.expect('[')?;
            self.skip_ws();
            let lo = self.integer()?;
            self.skip_ws();
            if !self.eat_str("..") {
                return Err(self.error("expected `..`"));
            }
            self.skip_ws();
            let hi = self.integer()?;
            self.expect(']')?;
            Domain::int_range(lo, hi)
        } else if self.eat_str("real") {
            self.skip_ws();
            let lo_closed = if self.eat('[') {
                true
            } else if self.eat('(') {
                false
            } else {
                return Err(self.error("expected `[` or `(`"));
            };
            self.skip_ws();
            let lo = self.scalar()?.as_f64();
            self.expect(',')?;
            self.skip_ws();
            let hi = self.scalar()?.as_f64();
            self.skip_ws();
            let hi_closed = if self.eat(']') {
                true
            } else if self.eat(')') {
                false
            } else {
                return Err(self.error("expected `]` or `)`"));
            };
            Domain::real_interval(lo, hi, lo_closed, hi_closed)
        } else if self.eat('R') || self.eat('ℝ') {
            Ok(Domain::AllReals)
        } else if self.eat('Z') || self.eat('ℤ') {
            Ok(Domain::AllIntegers)
        } else {
            Err(self.error("expected a domain: set{..}, int[..], real[..], R or Z"))
        }
    }

    fn number_text(&mut self) -> &'a str {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
            i += 1;
        }
        while i < bytes.len() {
            let b = bytes[i];
            let exp_sign = (b == b'-' || b == b'+') && i > start && matches!(bytes[i - 1], b'e' | b'E');
            // `..` ends an integer in int[a..b]
            let dot = b == b'.' && bytes.get(i + 1) != Some(&b'.');
            if b.is_ascii_digit() || dot || b == b'e' || b == b'E' || exp_sign {
                i += 1;
            } else {
                break;
            }
        }
        self.pos = i;
        &self.src[start..i]
    }

    fn scalar(&mut self) -> Result<Scalar, DomainError> {
        let at = self.pos;
        let text = self.number_text();
        let value = parse_number(text);
        value.ok_or_else(|| {
            self.pos = at;
            self.error("expected a number")
        })
    }

    fn integer(&mut self) -> Result<i64, DomainError> {
        match self.scalar()? {
            Scalar::Int(i) => Ok(i),
            Scalar::Real(_) => Err(self.error("expected an integer")),
        }
    }

    fn unsigned(&mut self) -> Result<usize, DomainError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error("expected a positive integer"))
    }
}

/// Integer text becomes `Int`; text with `.` or an exponent becomes `Real`.
pub(crate) fn parse_number(text: &str) -> Option<Scalar> {
    let digits = text.trim_start_matches(['-', '+']);
    if digits.is_empty() || !digits.as_bytes()[0].is_ascii_digit() {
        return None;
    }
    if text.contains(['.', 'e', 'E']) {
        text.parse::<f64>().ok().and_then(|v| Scalar::real(v).ok())
    } else {
        text.parse::<i64>().ok().map(Scalar::Int)
    }
}
