//! Closed-form transmission of UCP-ρ_N potentials viewed as super-periodic
//! potentials.
//!
//! A stage-`S` potential is a unit-cell barrier of width `b_S` repeated `N`
//! times at spacing `r_1`, that block repeated `N` times at spacing `r_2`, and
//! so on `S` levels deep. With `U_n` the Chebyshev polynomial of the second
//! kind and `Γ_q` the Bloch argument of level `q`,
//!
//! ```text
//! T = 1 / (1 + (σ₋ sin k̃b_S)² · [Π_q U_{N−1}(Γ_q)]²)
//! ```
//!
//! The Bloch arguments are built sequentially, each consuming every earlier one:
//!
//! ```text
//! Γ_q = |M22| cos(τ − kχ₁(q)) Π_{p<q} U_{N−1}(Γ_p)
//!       − Σ_{h<q} cos(kχ₂(q,h)) U_{N−2}(Γ_h) Π_{p=h+1}^{q−1} U_{N−1}(Γ_p)
//! ```
//!
//! where `M22 = |M22| e^{iτ}` belongs to the unit cell. The correction sum
//! enters with a minus sign: nesting the level-`(q−1)` block `B` through
//! `B_q = U_{N−1}(Γ_q) B_{q−1} − U_{N−2}(Γ_q) G_q⁻¹` (with `G_q` the gap
//! translation) and taking the half trace gives that sign, and the
//! brute-force product confirms it. The cost is O(S²) per wavenumber.
//!
//! In band gaps the Chebyshev product can grow past the range of `f64`. When
//! any intermediate magnitude exceeds [`OVERFLOW_GUARD`] the evaluation is
//! repeated with every quantity carried as a signed logarithm, and `T` is
//! rebuilt from `ln X` as `1/(1 + e^{ln X})`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{segment_width_unchecked, PotentialSpec, StageMetrics};
use crate::scattering::{barrier_matrix, CellFactors, WaveContext};

/// Magnitude above which the plain evaluation hands over to the log domain.
pub const OVERFLOW_GUARD: f64 = 1e150;

/// `|sin x|` below which the Laue function takes its `N²` limit.
const LAUE_LIMIT: f64 = 1e-8;

/// Chebyshev polynomial of the second kind `U_n(x)`.
///
/// Uses `sin((n+1)γ)/sin γ` with `γ = arccos x` inside `[−1, 1]` and the
/// hyperbolic analogue outside.
pub fn chebyshev_u(n: usize, x: f64) -> f64 {
    match n {
        0 => return 1.0,
        1 => return 2.0 * x,
        _ => {}
    }
    let order = (n + 1) as f64;
    let parity = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    if x.abs() == 1.0 {
        let sign = if x > 0.0 { 1.0 } else { parity };
        return sign * order;
    }
    if x.abs() < 1.0 {
        let gamma = x.acos();
        (order * gamma).sin() / gamma.sin()
    } else {
        let theta = x.abs().acosh();
        let sign = if x > 0.0 { 1.0 } else { parity };
        sign * (order * theta).sinh() / theta.sinh()
    }
}

/// `χ₁(q) = −(b_S + d_{S−q+1})`, always negative.
pub fn chi1(spec: &PotentialSpec, q: usize) -> Result<f64> {
    spec.check()?;
    check_order(spec, q)?;
    let metrics = StageMetrics::compute(spec)?;
    Ok(chi1_from(&metrics, spec.stages, q))
}

/// `χ₂(q, h) = d_{S−h+1} − d_{S−q+1} = χ₁(q) − χ₁(h)` for `h < q`.
pub fn chi2(spec: &PotentialSpec, q: usize, h: usize) -> Result<f64> {
    spec.check()?;
    check_order(spec, q)?;
    if h == 0 || h >= q {
        return Err(Error::Index(format!("chi2 requires 1 <= h < q (got q={q}, h={h})")));
    }
    let metrics = StageMetrics::compute(spec)?;
    Ok(chi2_from(&metrics, spec.stages, q, h))
}

fn check_order(spec: &PotentialSpec, q: usize) -> Result<()> {
    if q == 0 || q > spec.stages {
        return Err(Error::Index(format!("order {q} outside 1..={}", spec.stages)));
    }
    Ok(())
}

fn chi1_from(m: &StageMetrics, stages: usize, q: usize) -> f64 {
    -(m.leaf_width() + m.gap(stages - q + 1))
}

fn chi2_from(m: &StageMetrics, stages: usize, q: usize, h: usize) -> f64 {
    m.gap(stages - h + 1) - m.gap(stages - q + 1)
}

/// Bloch arguments `Γ_1..Γ_S` with their cached `U_{N−1}(Γ_q)`.
///
/// On the log-domain path, entries whose magnitude exceeds the `f64` range are
/// stored as `±∞`; [`BlochArgs::log_abs_product`] stays finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlochArgs {
    pub gamma: Vec<f64>,
    pub u_values: Vec<f64>,
    /// `ln |Π_q U_{N−1}(Γ_q)|`.
    pub log_abs_product: f64,
    /// Whether the log-domain path produced these values.
    pub log_domain: bool,
}

impl BlochArgs {
    /// `Π_q U_{N−1}(Γ_q)`, possibly infinite on the log-domain path.
    pub fn product(&self) -> f64 {
        self.u_values.iter().product()
    }

    /// Any `|Γ_q| > 1`.
    pub fn in_gap(&self) -> bool {
        self.gamma.iter().any(|g| g.abs() > 1.0)
    }
}

/// Everything the closed form computes at one `(spec, k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm {
    pub bloch: BlochArgs,
    /// `σ₋ sin(k̃ b_S)` of the unit cell.
    pub sigma_minus_sin: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub log10_transmission: f64,
}

/// Shared per-spec quantities of a closed-form evaluation.
struct Setup {
    metrics: StageMetrics,
    n: usize,
    stages: usize,
}

impl Setup {
    fn new(spec: &PotentialSpec) -> Result<Self> {
        spec.check()?;
        Ok(Self { metrics: StageMetrics::compute(spec)?, n: spec.n, stages: spec.stages })
    }

    /// `Γ̃_a` without its Chebyshev product: `|M22| cos(τ − kχ₁(q))`.
    fn gamma_a_head(&self, m22: num_complex::Complex64, k: f64, q: usize) -> f64 {
        let chi = chi1_from(&self.metrics, self.stages, q);
        (m22 * num_complex::Complex64::from_polar(1.0, -k * chi)).re
    }

    fn chi2_cos(&self, k: f64, q: usize, h: usize) -> f64 {
        (k * chi2_from(&self.metrics, self.stages, q, h)).cos()
    }
}

pub fn bloch_args(spec: &PotentialSpec, k: f64) -> Result<BlochArgs> {
    Ok(evaluate(spec, k)?.bloch)
}

/// `T_S(k, N)` by the closed form.
pub fn transmission_closed_form(spec: &PotentialSpec, k: f64) -> Result<f64> {
    Ok(evaluate(spec, k)?.transmission)
}

/// Full closed-form evaluation: Bloch arguments, `T`, `R` and `log₁₀ T`.
pub fn evaluate(spec: &PotentialSpec, k: f64) -> Result<ClosedForm> {
    let setup = Setup::new(spec)?;
    let ctx = WaveContext::new(k, spec.height)?;
    let b = setup.metrics.leaf_width();
    let m22 = barrier_matrix(&ctx, b).m22;
    let sm = CellFactors::new(&ctx, b).sigma_minus_sin;
    let bloch = match plain_bloch(&setup, m22, k) {
        Some(bloch) => bloch,
        None => log_bloch(&setup, m22, k),
    };
    Ok(assemble(bloch, sm))
}

fn assemble(bloch: BlochArgs, sm: f64) -> ClosedForm {
    // X = (σ₋ sin k̃b · Π U)²
    let (transmission, reflection, log10_transmission) = if sm == 0.0 || bloch.log_abs_product == f64::NEG_INFINITY {
        (1.0, 0.0, 0.0)
    } else if !bloch.log_domain {
        let x = (sm * bloch.product()).powi(2);
        (1.0 / (1.0 + x), x / (1.0 + x), -x.ln_1p() / std::f64::consts::LN_10)
    } else {
        let ln_x = 2.0 * (sm.abs().ln() + bloch.log_abs_product);
        // ln(1 + e^{ln X})
        let ln_denominator = if ln_x > 40.0 { ln_x + (-ln_x).exp().ln_1p() } else { ln_x.exp().ln_1p() };
        let t = (-ln_denominator).exp();
        let r = (ln_x - ln_denominator).exp();
        (t, r, -ln_denominator / std::f64::consts::LN_10)
    };
    ClosedForm { bloch, sigma_minus_sin: sm, transmission, reflection, log10_transmission }
}

/// Direct evaluation; `None` when some magnitude passes the overflow guard.
fn plain_bloch(setup: &Setup, m22: num_complex::Complex64, k: f64) -> Option<BlochArgs> {
    let (n, stages) = (setup.n, setup.stages);
    let mut gamma = Vec::with_capacity(stages);
    let mut u_values: Vec<f64> = Vec::with_capacity(stages);
    let mut u_lower: Vec<f64> = Vec::with_capacity(stages);
    for q in 1..=stages {
        let prefix: f64 = u_values.iter().product();
        let mut value = setup.gamma_a_head(m22, k, q) * prefix;
        // − Σ_h cos(kχ₂(q,h)) U_{N−2}(Γ_h) Π_{p=h+1}^{q−1} U_{N−1}(Γ_p), h descending
        let mut tail = 1.0;
        for h in (1..q).rev() {
            value -= setup.chi2_cos(k, q, h) * u_lower[h - 1] * tail;
            tail *= u_values[h - 1];
        }
        let u = chebyshev_u(n - 1, value);
        let lower = chebyshev_u(n.saturating_sub(2), value);
        let running = prefix * u;
        if ![value, u, lower, running].iter().all(|x| x.is_finite() && x.abs() <= OVERFLOW_GUARD) {
            return None;
        }
        gamma.push(value);
        u_values.push(u);
        u_lower.push(lower);
    }
    let product: f64 = u_values.iter().product();
    Some(BlochArgs { gamma, u_values, log_abs_product: product.abs().ln(), log_domain: false })
}

/// A signed number carried as `sign · e^{ln}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LogValue {
    ln: f64,
    sign: f64,
}

impl LogValue {
    const ZERO: LogValue = LogValue { ln: f64::NEG_INFINITY, sign: 0.0 };

    fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self { ln: x.abs().ln(), sign: x.signum() }
        }
    }

    fn to_f64(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln.exp()
        }
    }

    fn mul(self, other: LogValue) -> Self {
        if self.sign == 0.0 || other.sign == 0.0 {
            Self::ZERO
        } else {
            Self { ln: self.ln + other.ln, sign: self.sign * other.sign }
        }
    }

    fn sum(terms: &[LogValue]) -> Self {
        let peak = terms.iter().filter(|t| t.sign != 0.0).map(|t| t.ln).fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let scaled: f64 = terms.iter().filter(|t| t.sign != 0.0).map(|t| t.sign * (t.ln - peak).exp()).sum();
        let mut out = Self::from_f64(scaled);
        out.ln += peak;
        out
    }
}

/// `ln |sinh y|` for `y > 0`.
fn ln_sinh(y: f64) -> f64 {
    if y > 20.0 {
        y - std::f64::consts::LN_2 + (-(-2.0 * y).exp()).ln_1p()
    } else {
        y.sinh().ln()
    }
}

/// `U_n` of a log-domain argument.
fn chebyshev_u_log(n: usize, x: LogValue) -> LogValue {
    if x.sign == 0.0 || x.ln < 300.0 {
        let direct = chebyshev_u(n, x.to_f64());
        if direct.is_finite() {
            return LogValue::from_f64(direct);
        }
    }
    if n == 0 {
        return LogValue { ln: 0.0, sign: 1.0 };
    }
    // θ = arccosh|x|; for |x| > e^20 the correction to ln|x| + ln 2 is below 1e−17.
    let theta = if x.ln > 20.0 { x.ln + std::f64::consts::LN_2 } else { x.ln.exp().acosh() };
    let sign = if x.sign > 0.0 || n.is_multiple_of(2) { 1.0 } else { -1.0 };
    LogValue { ln: ln_sinh((n + 1) as f64 * theta) - ln_sinh(theta), sign }
}

fn log_bloch(setup: &Setup, m22: num_complex::Complex64, k: f64) -> BlochArgs {
    let (n, stages) = (setup.n, setup.stages);
    let mut gamma = Vec::with_capacity(stages);
    let mut u_values: Vec<LogValue> = Vec::with_capacity(stages);
    let mut u_lower: Vec<LogValue> = Vec::with_capacity(stages);
    let mut terms = Vec::with_capacity(stages);
    for q in 1..=stages {
        terms.clear();
        let prefix = u_values.iter().fold(LogValue { ln: 0.0, sign: 1.0 }, |acc, u| acc.mul(*u));
        terms.push(LogValue::from_f64(setup.gamma_a_head(m22, k, q)).mul(prefix));
        let mut tail = LogValue { ln: 0.0, sign: 1.0 };
        for h in (1..q).rev() {
            let c = LogValue::from_f64(-setup.chi2_cos(k, q, h));
            terms.push(c.mul(u_lower[h - 1]).mul(tail));
            tail = tail.mul(u_values[h - 1]);
        }
        let value = LogValue::sum(&terms);
        u_values.push(chebyshev_u_log(n - 1, value));
        u_lower.push(chebyshev_u_log(n.saturating_sub(2), value));
        gamma.push(value.to_f64());
    }
    let product = u_values.iter().fold(LogValue { ln: 0.0, sign: 1.0 }, |acc, u| acc.mul(*u));
    BlochArgs {
        gamma,
        u_values: u_values.iter().map(|u| u.to_f64()).collect(),
        log_abs_product: product.ln,
        log_domain: true,
    }
}

/// Barrier height `V_S = L·V0 / (N^S b_S)` keeping the total barrier area at `L·V0`.
pub fn area_preserving_height(spec: &PotentialSpec, v0: f64) -> Result<f64> {
    spec.check()?;
    let product: f64 = (1..=spec.stages).map(|j| spec.width_factor(j)).product();
    Ok(v0 / product)
}

/// Large-`k` reflection estimate at the area-preserving height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReflectionEstimate {
    /// `(V0 L / (2 N^S k))² Π U²_{N−1}(Γ_q)` with `Γ_q` at height `V_S`.
    pub estimate: f64,
    /// Exact `R = 1 − T` from the closed form at height `V_S`.
    pub exact: f64,
    pub height: f64,
    /// `k² ≥ 100 V_S`.
    pub valid: bool,
}

pub fn reflection_asymptotic(spec: &PotentialSpec, v0: f64, k: f64) -> Result<ReflectionEstimate> {
    let height = area_preserving_height(spec, v0)?;
    let scaled = spec.with_height(height);
    let eval = evaluate(&scaled, k)?;
    let count = (spec.n as f64).powi(spec.stages as i32);
    let prefactor = v0 * spec.length / (2.0 * count * k);
    let estimate = (2.0 * (prefactor.ln() + eval.bloch.log_abs_product)).exp();
    Ok(ReflectionEstimate { estimate, exact: eval.reflection, height, valid: k * k >= 100.0 * height })
}

/// Laue function `sin²(Nx)/sin²(x)`.
pub fn laue(x: f64, n: usize) -> f64 {
    let s = x.sin();
    if s.abs() < LAUE_LIMIT {
        return (n * n) as f64;
    }
    ((n as f64 * x).sin() / s).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingValue {
    pub value: f64,
    /// Some `|Γ_q| > 1`: the value is the squared Chebyshev product, since the
    /// Laue form has no real angle there.
    pub gap_regime: bool,
}

/// `W^(S)(k, N) = Π_q L(γ_q)` with `γ_q = arccos Γ_q`.
pub fn scaling_function(spec: &PotentialSpec, k: f64) -> Result<ScalingValue> {
    let bloch = bloch_args(spec, k)?;
    if bloch.in_gap() {
        let value = (2.0 * bloch.log_abs_product).exp();
        return Ok(ScalingValue { value, gap_regime: true });
    }
    let value = bloch.gamma.iter().map(|g| laue(g.acos(), spec.n)).product();
    Ok(ScalingValue { value, gap_regime: false })
}

/// Single-barrier transmission `1/(1 + (σ₋ sin k̃L)²)` over the whole span.
pub fn single_barrier_transmission(length: f64, height: f64, k: f64) -> Result<f64> {
    let ctx = WaveContext::new(k, height)?;
    let sm = CellFactors::new(&ctx, length).sigma_minus_sin;
    Ok(1.0 / (1.0 + sm * sm))
}

/// Width of the unit cell `b_S`, exposed for drivers.
pub fn unit_cell_width(spec: &PotentialSpec) -> Result<f64> {
    spec.check()?;
    Ok(segment_width_unchecked(spec, spec.stages))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Three-term recurrence, the independent route to `U_n`.
    fn chebyshev_recurrence(n: usize, x: f64) -> f64 {
        let (mut prev, mut cur) = (1.0, 2.0 * x);
        if n == 0 {
            return prev;
        }
        for _ in 1..n {
            let next = 2.0 * x * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    #[test]
    fn chebyshev_values() {
        assert_relative_eq!(chebyshev_u(1, 0.3), 0.6, max_relative = 1e-15);
        for n in 0..10 {
            assert_eq!(chebyshev_u(n, 1.0), (n + 1) as f64);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(chebyshev_u(n, -1.0), sign * (n + 1) as f64);
        }
        assert_relative_eq!(chebyshev_u(2, 2.0), 15.0, max_relative = 1e-14);
        assert_relative_eq!(chebyshev_u(3, 2.0), 56.0, max_relative = 1e-14);
    }

    #[test]
    fn chebyshev_dual_path() {
        let mut worst: f64 = 0.0;
        for n in 0..=64 {
            for i in 0..=400 {
                let x = -10.0 + 20.0 * i as f64 / 400.0 + 1e-3;
                let closed = chebyshev_u(n, x);
                let rec = chebyshev_recurrence(n, x);
                let err = (closed - rec).abs() / rec.abs().max(1.0);
                worst = worst.max(err);
            }
        }
        assert!(worst < 1e-10, "worst relative discrepancy {worst:e}");
    }

    #[test]
    fn chi_values() {
        let spec = PotentialSpec::new(2, 3.0, 1.0, 0.0, 2, 1.0, 25.0);
        let m = StageMetrics::compute(&spec).unwrap();
        assert_relative_eq!(chi1(&spec, 1).unwrap(), -m.period(1), max_relative = 1e-15);
        assert_relative_eq!(chi1(&spec, 2).unwrap(), -4.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(chi2(&spec, 2, 1).unwrap(), -2.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(
            chi2(&spec, 2, 1).unwrap(),
            chi1(&spec, 2).unwrap() - chi1(&spec, 1).unwrap(),
            max_relative = 1e-14
        );
        assert!(chi2(&spec, 1, 1).is_err());
        assert!(chi2(&spec, 1, 2).is_err());
        assert!(chi1(&spec, 0).is_err());
    }

    #[test]
    fn single_level_is_kronig_penney() {
        let spec = PotentialSpec::new(3, 2.7, 0.9, 0.4, 1, 3.0, 7.0);
        let m = StageMetrics::compute(&spec).unwrap();
        let (b, d) = (m.leaf_width(), m.gap(1));
        for k in [0.7, 2.0, 2.7, 4.1] {
            let ctx = WaveContext::new(k, spec.height).unwrap();
            let f = CellFactors::new(&ctx, b);
            let kp = (k * d).cos() * f.cos - f.sigma_plus_sin * (k * d).sin();
            let g = bloch_args(&spec, k).unwrap().gamma[0];
            assert!((g - kp).abs() < 1e-12 * kp.abs().max(1.0));
        }
    }

    #[test]
    fn closed_form_trivial_cases() {
        let single = PotentialSpec::new(2, 3.0, 1.0, 0.0, 0, 2.0, 3.0);
        let t = transmission_closed_form(&single, 2.0).unwrap();
        assert_relative_eq!(t, single_barrier_transmission(2.0, 3.0, 2.0).unwrap(), max_relative = 1e-15);
        let free = PotentialSpec::new(4, 3.0, 1.0, 0.5, 3, 5.0, 0.0);
        for k in [0.2, 1.0, 9.0] {
            assert_eq!(transmission_closed_form(&free, k).unwrap(), 1.0);
        }
    }

    #[test]
    fn barrier_resonance_gives_unit_transmission() {
        // k̃ b_S = mπ makes σ₋ sin(k̃ b_S) vanish.
        let spec = PotentialSpec::new(3, 3.0, 1.0, 0.0, 2, 9.0, 4.0);
        let b = unit_cell_width(&spec).unwrap();
        for m in 1..4 {
            let kt = m as f64 * std::f64::consts::PI / b;
            let k = (kt * kt + spec.height).sqrt();
            let t = transmission_closed_form(&spec, k).unwrap();
            assert!((1.0 - t).abs() < 1e-12, "m = {m}: T = {t}");
        }
    }

    #[test]
    fn log_domain_matches_plain_path() {
        let spec = PotentialSpec::new(4, 3.0, 0.8, 0.5, 4, 12.0, 30.0);
        let setup = Setup::new(&spec).unwrap();
        let b = setup.metrics.leaf_width();
        for k in [0.5, 1.5, 3.0, 5.2, 7.9] {
            let ctx = WaveContext::new(k, spec.height).unwrap();
            let m22 = barrier_matrix(&ctx, b).m22;
            let sm = CellFactors::new(&ctx, b).sigma_minus_sin;
            let plain = assemble(plain_bloch(&setup, m22, k).unwrap(), sm);
            let logd = assemble(log_bloch(&setup, m22, k), sm);
            assert!(logd.bloch.log_domain);
            let scale = plain.log10_transmission.abs().max(1.0);
            assert!((plain.log10_transmission - logd.log10_transmission).abs() < 1e-9 * scale);
            assert!((plain.transmission - logd.transmission).abs() < 1e-9);
        }
    }

    #[test]
    fn deep_gap_stays_finite() {
        // Thick, high, deep: the Chebyshev product overflows f64.
        let spec = PotentialSpec::new(6, 30.0, 1.0, 0.0, 6, 400.0, 400.0);
        let eval = evaluate(&spec, 1.0).unwrap();
        assert!(eval.bloch.log_domain);
        assert!(eval.log10_transmission.is_finite() && eval.log10_transmission < -300.0);
        assert!(eval.transmission >= 0.0);
    }

    #[test]
    fn area_preserving_heights() {
        let spec = PotentialSpec::new(2, 3.0, 1.0, 0.0, 0, 1.0, 0.0);
        assert_eq!(area_preserving_height(&spec, 7.0).unwrap(), 7.0);
        assert_relative_eq!(area_preserving_height(&spec.with_stages(1), 2.0).unwrap(), 3.0, max_relative = 1e-14);
        let spec = PotentialSpec::new(5, 4.2, 0.7, 0.9, 4, 3.0, 0.0);
        let vs = area_preserving_height(&spec, 10.0).unwrap();
        let b = unit_cell_width(&spec).unwrap();
        assert_relative_eq!(625.0 * b * vs, 3.0 * 10.0, max_relative = 1e-12);
        assert!(vs >= 10.0);
    }

    #[test]
    fn reflection_estimate_single_barrier() {
        let spec = PotentialSpec::new(2, 3.0, 1.0, 0.0, 0, 0.3, 0.0);
        let est = reflection_asymptotic(&spec, 5.0, 40.0).unwrap();
        assert_relative_eq!(est.estimate, (5.0 * 0.3 / 80.0f64).powi(2), max_relative = 1e-12);
        assert!(est.valid);
        assert!(!reflection_asymptotic(&spec, 5.0, 2.0).unwrap().valid);
    }

    #[test]
    fn laue_values() {
        assert_eq!(laue(0.0, 3), 9.0);
        assert_eq!(laue(std::f64::consts::PI, 4), 16.0);
        assert!(laue(std::f64::consts::FRAC_PI_2, 2) < 1e-30);
        assert!(laue(std::f64::consts::FRAC_PI_3, 3) < 1e-30);
        assert_relative_eq!(laue(0.4, 1), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn scaling_function_identity() {
        assert_eq!(scaling_function(&PotentialSpec::new(3, 3.0, 1.0, 0.0, 0, 1.0, 5.0), 4.0).unwrap().value, 1.0);
        let spec = PotentialSpec::new(3, 3.5, 0.5, 1.5, 2, 1.0, 10.0);
        let mut checked = 0;
        for i in 1..400 {
            let k = 5.0 + i as f64 * 0.37;
            let w = scaling_function(&spec, k).unwrap();
            let bloch = bloch_args(&spec, k).unwrap();
            let squared = bloch.product().powi(2);
            if !w.gap_regime {
                checked += 1;
                assert!((w.value - squared).abs() <= 1e-10 * squared.max(1.0));
            } else {
                assert_relative_eq!(w.value, squared, max_relative = 1e-12);
            }
        }
        assert!(checked > 50);
    }
}
