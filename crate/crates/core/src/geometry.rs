//! Stage geometry of UCP-ρ_N potentials.
//!
//! At every stage each barrier segment of width `b_{s-1}` is split into `N`
//! children of width `b_s`, separated by `N − 1` equal gaps of width
//! `d_s = b_{s-1} / ρ^(μ+νs)`. Stage indices follow `b_0 = L`; gaps and
//! super-periods are indexed from 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of leaf segments materialized by [`build_layout`].
pub const DEFAULT_SEGMENT_CAP: usize = 1_000_000;

/// The parameters `(N, ρ, μ, ν, S)` plus span `L` and barrier height `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub n: usize,
    pub rho: f64,
    pub mu: f64,
    pub nu: f64,
    pub stages: usize,
    pub length: f64,
    pub height: f64,
}

impl PotentialSpec {
    pub fn new(n: usize, rho: f64, mu: f64, nu: f64, stages: usize, length: f64, height: f64) -> Self {
        Self { n, rho, mu, nu, stages, length, height }
    }

    /// Same spec at another stage.
    pub fn with_stages(mut self, stages: usize) -> Self {
        self.stages = stages;
        self
    }

    pub fn with_height(mut self, height: f64) -> Self {
        self.height = height;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn validate(&self) -> ValidationReport {
        validate_spec(self)
    }

    /// Returns `Ok(())` when the spec is valid, otherwise an `InvalidSpec`
    /// error naming every violation.
    pub fn check(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(report.to_string()))
        }
    }

    /// `ρ^(μ+νj)`, the removal denominator at stage `j`.
    pub fn removal_denominator(&self, j: usize) -> f64 {
        self.rho.powf(self.mu + self.nu * j as f64)
    }

    /// The per-stage width factor `1 − (N−1)/ρ^(μ+νj)`.
    pub fn width_factor(&self, j: usize) -> f64 {
        1.0 - (self.n as f64 - 1.0) / self.removal_denominator(j)
    }

    /// Number of leaf segments `N^S`, or `None` on overflow.
    pub fn segment_count(&self) -> Option<u128> {
        (self.n as u128).checked_pow(self.stages as u32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewChildren(usize),
    RhoNotAboveOne(f64),
    ExponentsBothZero,
    NonPositiveLength(f64),
    NegativeHeight(f64),
    NonFinite(&'static str),
    NonPositiveFactor { stage: usize, factor: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewChildren(n) => write!(f, "N must be at least 2 (got {n})"),
            Violation::RhoNotAboveOne(rho) => write!(f, "rho must exceed 1 (got {rho})"),
            Violation::ExponentsBothZero => write!(f, "(mu,nu) simultaneously zero"),
            Violation::NonPositiveLength(l) => write!(f, "L must be positive (got {l})"),
            Violation::NegativeHeight(v) => write!(f, "V must be non-negative (got {v})"),
            Violation::NonFinite(name) => write!(f, "{name} is not finite"),
            Violation::NonPositiveFactor { stage, factor } => {
                write!(f, "factor non-positive at j={stage} (1-(N-1)/rho^(mu+nu*j) = {factor})")
            }
        }
    }
}

/// Outcome of [`validate_spec`]: empty means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Reports every violated constraint instead of stopping at the first one.
pub fn validate_spec(spec: &PotentialSpec) -> ValidationReport {
    let mut violations = Vec::new();
    for (name, value) in [("rho", spec.rho), ("mu", spec.mu), ("nu", spec.nu), ("L", spec.length), ("V", spec.height)] {
        if !value.is_finite() {
            violations.push(Violation::NonFinite(name));
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }
    if spec.n < 2 {
        violations.push(Violation::TooFewChildren(spec.n));
    }
    if spec.rho <= 1.0 {
        violations.push(Violation::RhoNotAboveOne(spec.rho));
    }
    if spec.mu == 0.0 && spec.nu == 0.0 {
        violations.push(Violation::ExponentsBothZero);
    }
    if spec.length <= 0.0 {
        violations.push(Violation::NonPositiveLength(spec.length));
    }
    if spec.height < 0.0 {
        violations.push(Violation::NegativeHeight(spec.height));
    }
    if spec.n >= 2 && spec.rho > 1.0 {
        // A zero factor means zero-width segments, which is rejected too.
        for j in 1..=spec.stages {
            let factor = spec.width_factor(j);
            if factor <= 0.0 || !factor.is_finite() {
                violations.push(Violation::NonPositiveFactor { stage: j, factor });
            }
        }
    }
    ValidationReport { violations }
}

/// The q-Pochhammer symbol `(α; β)_p = Π_{j=0}^{p−1} (1 − α β^j)`.
pub fn q_pochhammer(alpha: f64, beta: f64, p: usize) -> f64 {
    let mut product = 1.0;
    let mut power = 1.0;
    for _ in 0..p {
        product *= 1.0 - alpha * power;
        power *= beta;
    }
    product
}

/// `b_s = (L / N^s) · Π_{j=1}^{s} (1 − (N−1)/ρ^(μ+νj))`.
pub fn segment_width(spec: &PotentialSpec, s: usize) -> Result<f64> {
    spec.check()?;
    if s > spec.stages {
        return Err(Error::Index(format!("stage {s} exceeds S = {}", spec.stages)));
    }
    Ok(segment_width_unchecked(spec, s))
}

pub(crate) fn segment_width_unchecked(spec: &PotentialSpec, s: usize) -> f64 {
    let n = spec.n as f64;
    (1..=s).fold(spec.length, |b, j| b * spec.width_factor(j) / n)
}

/// `d_s = b_{s−1} / ρ^(μ+νs)` for `1 ≤ s ≤ S`.
pub fn gap_width(spec: &PotentialSpec, s: usize) -> Result<f64> {
    spec.check()?;
    if s == 0 || s > spec.stages {
        return Err(Error::Index(format!("gap index {s} outside 1..={}", spec.stages)));
    }
    Ok(gap_width_unchecked(spec, s))
}

pub(crate) fn gap_width_unchecked(spec: &PotentialSpec, s: usize) -> f64 {
    segment_width_unchecked(spec, s - 1) / spec.removal_denominator(s)
}

/// Super-periodic distance `r_q = b_{S+1−q} + d_{S+1−q}`: the spacing between
/// consecutive copies at hierarchy level `q`.
pub fn super_period(spec: &PotentialSpec, q: usize) -> Result<f64> {
    spec.check()?;
    if q == 0 || q > spec.stages {
        return Err(Error::Index(format!("order {q} outside 1..={}", spec.stages)));
    }
    let s = spec.stages + 1 - q;
    Ok(segment_width_unchecked(spec, s) + gap_width_unchecked(spec, s))
}

/// Per-stage widths, gaps and super-periods of one spec.
#[derive(Debug, Clone, PartialEq)]
pub struct StageMetrics {
    /// `b_0..=b_S`
    pub b: Vec<f64>,
    /// `d_1..=d_S`, stored at index `s − 1`.
    pub d: Vec<f64>,
    /// `r_1..=r_S`, stored at index `q − 1`.
    pub r: Vec<f64>,
}

impl StageMetrics {
    pub fn compute(spec: &PotentialSpec) -> Result<Self> {
        spec.check()?;
        let stages = spec.stages;
        let b: Vec<f64> = (0..=stages).map(|s| segment_width_unchecked(spec, s)).collect();
        let d: Vec<f64> = (1..=stages).map(|s| b[s - 1] / spec.removal_denominator(s)).collect();
        let r = (1..=stages)
            .map(|q| {
                let s = stages + 1 - q;
                b[s] + d[s - 1]
            })
            .collect();
        Ok(Self { b, d, r })
    }

    pub fn leaf_width(&self) -> f64 {
        *self.b.last().expect("b_0 always present")
    }

    /// `d_s` with the 1-based stage index.
    pub fn gap(&self, s: usize) -> f64 {
        self.d[s - 1]
    }

    /// `r_q` with the 1-based order index.
    pub fn period(&self, q: usize) -> f64 {
        self.r[q - 1]
    }
}

/// Explicit leaf intervals of a stage-`S` potential, in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentLayout {
    pub segments: Vec<(f64, f64)>,
    /// The common leaf width `b_S`. Differences of stored endpoints carry
    /// rounding of order `ulp(L)` that is the same for every leaf in a binade.
    pub width: f64,
    pub spec: PotentialSpec,
}

impl SegmentLayout {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::repeat_n(self.width, self.segments.len())
    }

    /// Free gaps between consecutive segments.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments.windows(2).map(|w| w[1].0 - w[0].1)
    }

    /// Reflection of the layout about `L/2`, re-sorted into increasing order.
    pub fn mirrored(&self) -> SegmentLayout {
        let l = self.spec.length;
        let segments = self.segments.iter().rev().map(|&(a, b)| (l - b, l - a)).collect();
        SegmentLayout { segments, width: self.width, spec: self.spec }
    }
}

pub fn build_layout(spec: &PotentialSpec) -> Result<SegmentLayout> {
    build_layout_capped(spec, DEFAULT_SEGMENT_CAP)
}

/// Recursive subdivision of `[0, L]`. Each child start is its parent start
/// plus an integer multiple of `b_s + d_s`, so rounding grows with `S`, not
/// with the number of leaves.
pub fn build_layout_capped(spec: &PotentialSpec, cap: usize) -> Result<SegmentLayout> {
    spec.check()?;
    let count = spec.segment_count().unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::LayoutTooLarge { segments: count, cap });
    }
    let metrics = StageMetrics::compute(spec)?;
    let mut starts = vec![0.0_f64];
    for s in 1..=spec.stages {
        let pitch = metrics.b[s] + metrics.gap(s);
        let mut next = Vec::with_capacity(starts.len() * spec.n);
        for &parent in &starts {
            next.extend((0..spec.n).map(|i| parent + i as f64 * pitch));
        }
        starts = next;
    }
    let width = metrics.leaf_width();
    let segments = starts.into_iter().map(|x| (x, x + width)).collect();
    Ok(SegmentLayout { segments, width, spec: *spec })
}
