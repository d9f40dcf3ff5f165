//! 2×2 transfer matrices and the brute-force layout product.
//!
//! Amplitudes are referenced to plane waves `e^{±ikx}` in absolute
//! coordinates. The unit-cell matrix [`barrier_matrix`] describes a barrier
//! occupying `[0, b]`; it reduces to the identity when `V = 0`. A barrier
//! followed by a free stretch is composed as
//!
//! ```text
//! barrier(b) · propagation(b) · propagation(gap)
//! ```
//!
//! with `propagation(x) = diag(e^{−ikx}, e^{+ikx})`, i.e. each factor shifts
//! the reference plane to the start of the next element. Matrices are
//! multiplied left to right in layout order. The outer reference planes only
//! contribute phases, so `|m22|` of the product is layout-translation
//! invariant and `T = 1/|m22|²`.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{build_layout_capped, PotentialSpec, SegmentLayout, DEFAULT_SEGMENT_CAP};

/// `|k² − V|` below which `σ±` alone are not evaluated.
pub const DEGENERATE_ENERGY_THRESHOLD: f64 = 1e-6;

/// `|k̃b|` below which `sin(k̃b)/(k̃b)` is taken from its Taylor series.
const SINC_SERIES_THRESHOLD: f64 = 1e-6;

/// Relative tolerance on the imaginary residue of quantities that are real
/// in exact arithmetic.
const REALITY_TOLERANCE: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(1.0, 0.0),
    };

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// `|m22|² − |m12|²`, equal to 1 for flux-conserving matrices.
    pub fn flux(&self) -> f64 {
        self.m22.norm_sqr() - self.m12.norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &TransferMatrix) -> f64 {
        [self.m11 - other.m11, self.m12 - other.m12, self.m21 - other.m21, self.m22 - other.m22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }
}

/// Wavenumber outside (`k`) and inside (`k̃ = √(k² − V)`) a barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveContext {
    pub k: f64,
    pub height: f64,
    pub ktilde: Complex64,
}

impl WaveContext {
    pub fn new(k: f64, height: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Domain(format!("wavenumber must be positive and finite (got {k})")));
        }
        if !(height >= 0.0) || !height.is_finite() {
            return Err(Error::Domain(format!("barrier height must be non-negative (got {height})")));
        }
        let excess = k * k - height;
        let ktilde =
            if excess >= 0.0 { Complex64::new(excess.sqrt(), 0.0) } else { Complex64::new(0.0, (-excess).sqrt()) };
        Ok(Self { k, height, ktilde })
    }

    /// `k̃² = k² − V` as a real number.
    pub fn energy_excess(&self) -> f64 {
        self.k * self.k - self.height
    }

    pub fn is_degenerate(&self) -> bool {
        self.energy_excess().abs() < DEGENERATE_ENERGY_THRESHOLD
    }

    pub fn is_evanescent(&self) -> bool {
        self.energy_excess() < 0.0
    }
}

/// `σ± = (k/k̃ ± k̃/k) / 2`.
pub fn sigma_pm(ctx: &WaveContext) -> Result<(Complex64, Complex64)> {
    if ctx.is_degenerate() {
        return Err(Error::DegenerateEnergy { gap: ctx.energy_excess().abs() });
    }
    let ratio = ctx.k / ctx.ktilde;
    let inverse = ctx.ktilde / ctx.k;
    Ok(((ratio + inverse) * 0.5, (ratio - inverse) * 0.5))
}

/// The real trigonometric factors of a barrier of width `b`:
/// `cos(k̃b)`, `σ₊ sin(k̃b)` and `σ₋ sin(k̃b)`.
///
/// The products are evaluated as `(k² ± k̃²)/(2k) · b · sinc(k̃b)`, which stays
/// finite through `k² = V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellFactors {
    pub cos: f64,
    pub sigma_plus_sin: f64,
    pub sigma_minus_sin: f64,
}

impl CellFactors {
    pub fn new(ctx: &WaveContext, b: f64) -> Self {
        let z = ctx.ktilde * b;
        let sinc = if z.norm() < SINC_SERIES_THRESHOLD {
            let z2 = z * z;
            Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
        } else {
            z.sin() / z
        };
        let k = ctx.k;
        let ktilde_sq = Complex64::new(ctx.energy_excess(), 0.0);
        let plus = (k * k + ktilde_sq) / (2.0 * k) * b * sinc;
        let minus = (k * k - ktilde_sq) / (2.0 * k) * b * sinc;
        Self { cos: real_part(z.cos()), sigma_plus_sin: real_part(plus), sigma_minus_sin: real_part(minus) }
    }
}

fn real_part(z: Complex64) -> f64 {
    debug_assert!(
        z.im.abs() <= REALITY_TOLERANCE * z.re.abs().max(1.0),
        "imaginary residue {} on a real quantity {}",
        z.im,
        z.re
    );
    z.re
}

/// Unit-cell matrix of a rectangular barrier on `[0, b]`.
pub fn barrier_matrix(ctx: &WaveContext, b: f64) -> TransferMatrix {
    let f = CellFactors::new(ctx, b);
    let phase = Complex64::from_polar(1.0, ctx.k * b);
    TransferMatrix {
        m11: phase * (f.cos - I * f.sigma_plus_sin),
        m12: I * f.sigma_minus_sin,
        m21: -I * f.sigma_minus_sin,
        m22: phase.conj() * (f.cos + I * f.sigma_plus_sin),
    }
}

/// Free translation over `d`: `diag(e^{−ikd}, e^{+ikd})`.
pub fn propagation_matrix(k: f64, d: f64) -> TransferMatrix {
    let phase = Complex64::from_polar(1.0, k * d);
    TransferMatrix { m11: phase.conj(), m12: Complex64::new(0.0, 0.0), m21: Complex64::new(0.0, 0.0), m22: phase }
}

/// `(T, R) = (1/|m22|², |m12|²/|m22|²)`.
pub fn transmission_from_matrix(m: &TransferMatrix) -> Result<(f64, f64)> {
    let norm = m.m22.norm();
    if !(norm >= 1.0 - 1e-9) {
        return Err(Error::NonPhysicalMatrix(norm));
    }
    let denom = m.m22.norm_sqr();
    let t = (1.0 / denom).min(1.0);
    let r = (m.m12.norm_sqr() / denom).clamp(0.0, 1.0);
    Ok((t, r))
}

/// Product of barrier and gap matrices over an explicit layout, left to right.
pub fn layout_matrix(layout: &SegmentLayout, ctx: &WaveContext) -> TransferMatrix {
    compose(layout.segments.iter().copied(), ctx)
}

/// Same product taken over the mirrored layout (right to left).
pub fn layout_matrix_reversed(layout: &SegmentLayout, ctx: &WaveContext) -> TransferMatrix {
    let l = layout.spec.length;
    compose(layout.segments.iter().rev().map(|&(a, b)| (l - b, l - a)), ctx)
}

fn compose(segments: impl Iterator<Item = (f64, f64)>, ctx: &WaveContext) -> TransferMatrix {
    let mut total = TransferMatrix::IDENTITY;
    let mut previous_end: Option<f64> = None;
    for (start, end) in segments {
        if let Some(prev) = previous_end {
            total = total * propagation_matrix(ctx.k, start - prev);
        }
        let width = end - start;
        total = total * barrier_matrix(ctx, width) * propagation_matrix(ctx.k, width);
        previous_end = Some(end);
    }
    total
}

/// Transmission by explicit composition over all `N^S` segments.
pub fn brute_force_transmission(spec: &PotentialSpec, k: f64) -> Result<f64> {
    brute_force_transmission_capped(spec, k, DEFAULT_SEGMENT_CAP)
}

pub fn brute_force_transmission_capped(spec: &PotentialSpec, k: f64, cap: usize) -> Result<f64> {
    let ctx = WaveContext::new(k, spec.height)?;
    let layout = build_layout_capped(spec, cap)?;
    let m = layout_matrix(&layout, &ctx);
    transmission_from_matrix(&m).map(|(t, _)| t)
}
