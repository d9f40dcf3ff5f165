//! Experiment drivers: k-sweeps, ρ–k grids, stage saturation, large-k
//! scaling fits and resonance finding.
//!
//! Every driver evaluates its nodes in parallel and assembles results in axis
//! order, so output never depends on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PotentialSpec;
use crate::scattering::brute_force_transmission;
use crate::spp::{area_preserving_height, evaluate};

/// Default saturation threshold in `|log₁₀ T|` sup-norm.
pub const DEFAULT_SATURATION_DELTA: f64 = 0.05;
/// Reflection below this is treated as a resonance null in scaling fits.
pub const NULL_REFLECTION: f64 = 1e-14;
pub const MIN_FIT_POINTS: usize = 8;
/// Golden-section stopping width in k.
pub const REFINE_TOLERANCE: f64 = 1e-10;
pub const MERGE_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Closed,
    Oracle,
    Both,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Oracle => "oracle",
            Method::Both => "both",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" | "closed-form" => Ok(Method::Closed),
            "oracle" => Ok(Method::Oracle),
            "both" => Ok(Method::Both),
            other => Err(Error::Domain(format!("unknown method {other:?} (expected closed, oracle or both)"))),
        }
    }
}

/// Uniform grid of `n` points over `[lo, hi]`, endpoints included.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect()
}

/// Log-uniform grid of `n ≥ 2` points over `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (a + step * i as f64).exp(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis: Vec<f64>,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    /// Oracle column, present for `Method::Both`.
    pub t_oracle: Option<Vec<f64>>,
    pub max_discrepancy: Option<f64>,
    pub spec: PotentialSpec,
    pub method: Method,
}

pub fn k_sweep(spec: &PotentialSpec, k_min: f64, k_max: f64, n_points: usize, method: Method) -> Result<SweepTable> {
    if !(k_min > 0.0 && k_min < k_max && k_max.is_finite()) {
        return Err(Error::Domain(format!("need 0 < k_min < k_max (got {k_min}, {k_max})")));
    }
    if n_points < 2 {
        return Err(Error::Domain(format!("n_points must be at least 2 (got {n_points})")));
    }
    spec.check()?;
    let axis = uniform_grid(k_min, k_max, n_points);
    let rows: Vec<(f64, f64, Option<f64>)> = axis
        .par_iter()
        .map(|&k| -> Result<(f64, f64, Option<f64>)> {
            match method {
                Method::Closed => {
                    let e = evaluate(spec, k)?;
                    Ok((e.transmission, e.reflection, None))
                }
                Method::Oracle => {
                    let t = brute_force_transmission(spec, k)?;
                    Ok((t, 1.0 - t, None))
                }
                Method::Both => {
                    let e = evaluate(spec, k)?;
                    Ok((e.transmission, e.reflection, Some(brute_force_transmission(spec, k)?)))
                }
            }
        })
        .collect::<Result<_>>()?;
    let t: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let r = rows.iter().map(|r| r.1).collect();
    let t_oracle: Option<Vec<f64>> = (method == Method::Both).then(|| rows.iter().map(|r| r.2.unwrap()).collect());
    let max_discrepancy = t_oracle.as_ref().map(|o| t.iter().zip(o).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    Ok(SweepTable { axis, t, r, t_oracle, max_discrepancy, spec: *spec, method })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridTable {
    pub rho_axis: Vec<f64>,
    pub k_axis: Vec<f64>,
    /// Row-major, one row per ρ; rows of invalid specs hold NaN.
    pub t: Vec<f64>,
    pub row_valid: Vec<bool>,
    pub template: PotentialSpec,
}

impl GridTable {
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.k_axis.len();
        &self.t[i * n..(i + 1) * n]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.k_axis.len() + j]
    }

    /// Mean over valid rows.
    pub fn mean(&self) -> f64 {
        let (sum, count) = (0..self.rho_axis.len())
            .filter(|&i| self.row_valid[i])
            .flat_map(|i| self.row(i).iter())
            .fold((0.0, 0usize), |(s, c), &v| (s + v, c + 1));
        sum / count as f64
    }
}

fn check_axis(name: &str, lo: f64, hi: f64, n: usize) -> Result<()> {
    let ok = n >= 1 && lo.is_finite() && hi.is_finite() && (lo < hi || (n == 1 && lo <= hi));
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("invalid {name} grid [{lo}, {hi}] with {n} points")))
    }
}

pub fn rho_k_grid(
    template: &PotentialSpec,
    rho_min: f64,
    rho_max: f64,
    n_rho: usize,
    k_min: f64,
    k_max: f64,
    n_k: usize,
) -> Result<GridTable> {
    check_axis("rho", rho_min, rho_max, n_rho)?;
    check_axis("k", k_min, k_max, n_k)?;
    if k_min <= 0.0 {
        return Err(Error::Domain(format!("k must be positive (got {k_min})")));
    }
    let rho_axis = uniform_grid(rho_min, rho_max, n_rho);
    let k_axis = uniform_grid(k_min, k_max, n_k);
    let row_valid: Vec<bool> = rho_axis.iter().map(|&rho| template.with_rho(rho).check().is_ok()).collect();
    let t = (0..n_rho * n_k)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n_k, idx % n_k);
            if !row_valid[i] {
                return Ok(f64::NAN);
            }
            Ok(evaluate(&template.with_rho(rho_axis[i]), k_axis[j])?.transmission)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GridTable { rho_axis, k_axis, t, row_valid, template: *template })
}

/// Pairwise sup-norm distances of `log₁₀ T` between stages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaturationMatrix {
    pub stages: Vec<usize>,
    pub k_axis: Vec<f64>,
    /// Row-major `stages.len()²` matrix.
    pub distance: Vec<f64>,
}

impl SaturationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.distance[i * self.stages.len() + j]
    }

    /// Distance between two stage values, if both are present.
    pub fn between(&self, s: usize, s2: usize) -> Option<f64> {
        let i = self.stages.iter().position(|&x| x == s)?;
        let j = self.stages.iter().position(|&x| x == s2)?;
        Some(self.get(i, j))
    }

    /// Smallest listed stage beyond which every pairwise distance is ≤ `delta`.
    pub fn saturated_beyond(&self, delta: f64) -> Option<usize> {
        let mut order: Vec<usize> = (0..self.stages.len()).collect();
        order.sort_by_key(|&i| self.stages[i]);
        (0..order.len()).find_map(|start| {
            let tail = &order[start..];
            let ok = tail.iter().all(|&i| tail.iter().all(|&j| self.get(i, j) <= delta));
            ok.then(|| self.stages[order[start]])
        })
    }
}

pub fn saturation_metric(
    family: &PotentialSpec,
    stages: &[usize],
    k_min: f64,
    k_max: f64,
    n_points: usize,
) -> Result<SaturationMatrix> {
    if stages.is_empty() {
        return Err(Error::Domain("no stages given".into()));
    }
    for (i, s) in stages.iter().enumerate() {
        if stages[..i].contains(s) {
            return Err(Error::Domain(format!("stage {s} listed twice")));
        }
        family.with_stages(*s).check()?;
    }
    if !(k_min > 0.0 && k_min < k_max) || n_points < 2 {
        return Err(Error::Domain(format!("invalid k grid [{k_min}, {k_max}] with {n_points} points")));
    }
    let k_axis = uniform_grid(k_min, k_max, n_points);
    let curves: Vec<Vec<f64>> = stages
        .par_iter()
        .map(|&s| {
            let spec = family.with_stages(s);
            k_axis.iter().map(|&k| Ok(evaluate(&spec, k)?.log10_transmission)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let m = stages.len();
    let mut distance = vec![0.0; m * m];
    for i in 0..m {
        for j in i + 1..m {
            let d = curves[i].iter().zip(&curves[j]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            distance[i * m + j] = d;
            distance[j * m + i] = d;
        }
    }
    Ok(SaturationMatrix { stages: stages.to_vec(), k_axis, distance })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of `ln R` about the fitted line.
    pub residual: f64,
    pub used: usize,
    /// Points dropped as resonance nulls.
    pub excluded: usize,
    /// Area-preserved height `V_S`.
    pub height: f64,
    pub k_axis: Vec<f64>,
    /// `R` per grid point, nulls included.
    pub reflection: Vec<f64>,
}

/// Least-squares fit of `ln R` against `ln k` at the area-preserved height.
pub fn scaling_fit(spec: &PotentialSpec, v0: f64, k_range: (f64, f64), n_points: usize) -> Result<ScalingFit> {
    let (k_lo, k_hi) = k_range;
    if !(k_lo > 0.0 && k_lo < k_hi && k_hi.is_finite()) || n_points < 2 {
        return Err(Error::Domain(format!("invalid k range [{k_lo}, {k_hi}] with {n_points} points")));
    }
    if !(v0 > 0.0) {
        return Err(Error::Domain(format!("V0 must be positive (got {v0})")));
    }
    let height = area_preserving_height(spec, v0)?;
    if k_lo * k_lo < 100.0 * height {
        return Err(Error::Domain(format!("k_lo² = {} is below 100·V_S = {}", k_lo * k_lo, 100.0 * height)));
    }
    let scaled = spec.with_height(height);
    let k_axis = log_grid(k_lo, k_hi, n_points);
    let reflection = k_axis.par_iter().map(|&k| Ok(evaluate(&scaled, k)?.reflection)).collect::<Result<Vec<f64>>>()?;
    let points: Vec<(f64, f64)> = k_axis
        .iter()
        .zip(&reflection)
        .filter(|(_, &r)| r >= NULL_REFLECTION)
        .map(|(&k, &r)| (k.ln(), r.ln()))
        .collect();
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints { kept: points.len(), required: MIN_FIT_POINTS });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(ScalingFit {
        slope,
        intercept,
        residual,
        used: points.len(),
        excluded: n_points - points.len(),
        height,
        k_axis,
        reflection,
    })
}

/// Coarse-scanned k-intervals where `|Γ_level| ≤ 1` (1-based level).
///
/// Each interval is widened by one grid step on both sides so that band
/// edges falling between grid points stay inside.
pub fn allowed_bands(
    spec: &PotentialSpec,
    level: usize,
    k_min: f64,
    k_max: f64,
    coarse_points: usize,
) -> Result<Vec<(f64, f64)>> {
    if level == 0 || level > spec.stages {
        return Err(Error::Index(format!("level {level} outside 1..={}", spec.stages)));
    }
    if !(k_min > 0.0 && k_min < k_max) || coarse_points < 2 {
        return Err(Error::Domain(format!("invalid k grid [{k_min}, {k_max}] with {coarse_points} points")));
    }
    let axis = uniform_grid(k_min, k_max, coarse_points);
    let inside = axis
        .par_iter()
        .map(|&k| Ok(evaluate(spec, k)?.bloch.gamma[level - 1].abs() <= 1.0))
        .collect::<Result<Vec<bool>>>()?;
    let mut bands = Vec::new();
    let mut i = 0;
    while i < axis.len() {
        if !inside[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < axis.len() && inside[i] {
            i += 1;
        }
        bands.push((axis[start.saturating_sub(1)], axis[i.min(axis.len() - 1)]));
    }
    Ok(bands)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub k: f64,
    pub t: f64,
    /// Extent of the interval around `k` where `T ≥ threshold/2`.
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceReport {
    pub peaks: Vec<Resonance>,
    /// Set when `T = 1` identically (no barrier), so no peaks are listed.
    pub plateau: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximisation of `f` on `[a, b]`.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Crossing of `f = level` between `inside` (above) and `outside` (below).
fn bisect_level(f: &impl Fn(f64) -> f64, mut inside: f64, mut outside: f64, level: f64) -> f64 {
    while (outside - inside).abs() > REFINE_TOLERANCE {
        let mid = 0.5 * (inside + outside);
        if f(mid) >= level {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}

/// Locates transmission peaks `T ≥ threshold` on `[k_min, k_max]`.
///
/// Every local maximum of the coarse scan is refined, so peaks narrower than
/// the coarse spacing are still found as long as the scan sees their flank.
pub fn find_resonances(
    spec: &PotentialSpec,
    k_min: f64,
    k_max: f64,
    coarse_points: usize,
    threshold: f64,
) -> Result<ResonanceReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Domain(format!("threshold must lie in (0, 1) (got {threshold})")));
    }
    if coarse_points < 100 {
        return Err(Error::Domain(format!("coarse_points must be at least 100 (got {coarse_points})")));
    }
    if !(k_min > 0.0 && k_min < k_max && k_max.is_finite()) {
        return Err(Error::Domain(format!("need 0 < k_min < k_max (got {k_min}, {k_max})")));
    }
    spec.check()?;
    if spec.height == 0.0 {
        return Ok(ResonanceReport { peaks: Vec::new(), plateau: true });
    }
    let f = |k: f64| evaluate(spec, k).map(|e| e.transmission).unwrap_or(f64::NAN);
    // −ln X with T = 1/(1 + X): same ordering as T, but a zero of X stays
    // resolvable where 1 − T has already rounded to nothing
    let sharpness = |k: f64| match evaluate(spec, k) {
        Ok(e) if e.sigma_minus_sin == 0.0 || e.bloch.log_abs_product == f64::NEG_INFINITY => f64::INFINITY,
        Ok(e) => -2.0 * (e.sigma_minus_sin.abs().ln() + e.bloch.log_abs_product),
        Err(_) => f64::NEG_INFINITY,
    };
    let axis = uniform_grid(k_min, k_max, coarse_points);
    let coarse: Vec<(f64, f64)> = axis.par_iter().map(|&k| (f(k), sharpness(k))).collect();
    let last = coarse_points - 1;
    let candidates: Vec<usize> = (0..coarse_points)
        .filter(|&i| {
            let left = i == 0 || coarse[i].1 >= coarse[i - 1].1;
            let right = i == last || coarse[i].1 >= coarse[i + 1].1;
            left && right
        })
        .collect();
    let refined: Vec<Option<Resonance>> = candidates
        .par_iter()
        .map(|&i| {
            let (a, b) = (axis[i.saturating_sub(1)], axis[(i + 1).min(last)]);
            let (k, _) = golden_max(&sharpness, a, b, REFINE_TOLERANCE);
            // a maximum pinned to the window edge is a rising flank, not a peak
            if (k - k_min).abs() <= REFINE_TOLERANCE || (k_max - k).abs() <= REFINE_TOLERANCE {
                return None;
            }
            let t = f(k);
            if !(t >= threshold) {
                return None;
            }
            let half = threshold / 2.0;
            let left_out = (0..i).rev().find(|&j| coarse[j].0 < half && axis[j] < k).map(|j| axis[j]);
            let right_out = (i + 1..coarse_points).find(|&j| coarse[j].0 < half && axis[j] > k).map(|j| axis[j]);
            let lo = left_out.map_or(k_min, |o| bisect_level(&f, k, o, half));
            let hi = right_out.map_or(k_max, |o| bisect_level(&f, k, o, half));
            Some(Resonance { k, t, width: hi - lo })
        })
        .collect();
    let mut peaks: Vec<Resonance> = Vec::new();
    for r in refined.into_iter().flatten() {
        match peaks.last_mut() {
            Some(prev) if (r.k - prev.k).abs() < MERGE_DISTANCE => {
                if r.t > prev.t {
                    *prev = r;
                }
            }
            _ => peaks.push(r),
        }
    }
    Ok(ResonanceReport { peaks, plateau: false })
}
