//! Fractal dimension and lacunarity parameters of polyadic Cantor structures.
//!
//! Both dimension formulas are negative under a literal reading (`ln ζ < 0`);
//! magnitudes are returned.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{gap_width, PotentialSpec};

/// `D = ln N / ln ρ`.
pub fn fractal_dimension(n: usize, rho: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("N must be at least 2 (got {n})")));
    }
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("rho must exceed 1 (got {rho})")));
    }
    Ok((n as f64).ln() / rho.ln())
}

/// Second dimension definition `|ln 2 / ln((1 − ζ)/2)|`, meaningful for `N = 2`.
pub fn fractal_dimension_alt(zeta: f64) -> Result<f64> {
    let ratio = (1.0 - zeta) / 2.0;
    if !(zeta > 0.0 && zeta < 1.0) || !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Domain(format!("zeta must lie in (0, 1) (got {zeta})")));
    }
    Ok((2f64.ln() / ratio.ln()).abs())
}

/// `ε_max`, which the even/odd formulas leave undefined for `N = 2, 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MaxLacunarity {
    Value(f64),
    NotApplicable,
}

impl MaxLacunarity {
    pub fn value(self) -> Option<f64> {
        match self {
            MaxLacunarity::Value(v) => Some(v),
            MaxLacunarity::NotApplicable => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Descriptors {
    pub n: usize,
    pub dimension: f64,
    pub zeta: f64,
    /// Central-gap width for unit span, `1 − ζN`.
    pub g_c: f64,
    pub eps_min: f64,
    pub eps_reg: f64,
    pub eps_max: MaxLacunarity,
    /// `0 = ε_min < ε_reg < ε_max`, or the first inequality alone when
    /// `ε_max` is not applicable.
    pub ordered: bool,
    /// Set when a raw (signed) ε came out negative before taking `|ε|`.
    pub sign_flipped: bool,
}

/// Lacunarity parameters of the `N`-adic Cantor set with scaling factor `ζ`.
pub fn lacunarity_parameters(n: usize, zeta: f64) -> Result<Descriptors> {
    if n < 2 {
        return Err(Error::Domain(format!("N must be at least 2 (got {n})")));
    }
    let zeta_max = 1.0 / n as f64;
    if !(zeta > 0.0 && zeta < zeta_max) {
        return Err(Error::Domain(format!("zeta must lie in (0, 1/N) = (0, {zeta_max}) (got {zeta})")));
    }
    let g_c = 1.0 - zeta * n as f64;
    let raw_reg = g_c / (n as f64 - 1.0);
    let raw_max = match n {
        2 | 3 => None,
        n if n % 2 == 0 => Some(g_c / (n as f64 - 2.0)),
        n => Some(g_c / (n as f64 - 3.0)),
    };
    let sign_flipped = raw_reg < 0.0 || raw_max.is_some_and(|v| v < 0.0);
    let eps_reg = raw_reg.abs();
    let eps_max = raw_max.map_or(MaxLacunarity::NotApplicable, |v| MaxLacunarity::Value(v.abs()));
    let ordered = match eps_max {
        MaxLacunarity::Value(max) => 0.0 < eps_reg && eps_reg < max,
        MaxLacunarity::NotApplicable => 0.0 < eps_reg,
    };
    Ok(Descriptors {
        n,
        dimension: -(n as f64).ln() / zeta.ln(),
        zeta,
        g_c,
        eps_min: 0.0,
        eps_reg,
        eps_max,
        ordered,
        sign_flipped,
    })
}

/// Lacunarity parameter of a UCP layout: the stage-1 gap `d_1 = L / ρ^(μ+ν)`.
pub fn ucp_epsilon(spec: &PotentialSpec) -> Result<f64> {
    if spec.stages == 0 {
        return Err(Error::Index("ucp_epsilon requires S >= 1".into()));
    }
    gap_width(spec, 1)
}
