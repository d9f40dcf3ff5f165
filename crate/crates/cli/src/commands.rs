use ucp_core::analysis::{self, Method, DEFAULT_SATURATION_DELTA};
use ucp_core::fractal::{fractal_dimension, fractal_dimension_alt, lacunarity_parameters, ucp_epsilon};
use ucp_core::geometry::build_layout;
use ucp_core::scattering::{brute_force_transmission, DEGENERATE_ENERGY_THRESHOLD};
use ucp_core::spp::evaluate;

use crate::config::{RunConfig, UsageError};
use crate::output::{Cell, Report};

#[derive(Debug)]
pub enum CliError {
    /// Exit code 2.
    Usage(String),
    /// Exit code 1.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e.0)
    }
}

impl From<ucp_core::Error> for CliError {
    fn from(e: ucp_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

type Outcome = Result<Report, CliError>;

/// The config with the spec defaults filled in, as echoed in output headers.
fn resolved(config: &RunConfig) -> Result<(RunConfig, ucp_core::PotentialSpec), CliError> {
    let spec = config.spec()?;
    let mut config = config.clone();
    config.nu = Some(spec.nu);
    config.height = Some(spec.height);
    Ok((config, spec))
}

/// Outcome of `validate`: the report text and whether the spec is valid.
pub fn validate(config: &RunConfig) -> Result<(Report, bool), CliError> {
    let (config, spec) = resolved(config)?;
    let config = &config;
    let validation = spec.validate();
    let mut report = Report::new(config, vec!["valid", "report"]);
    report.single = true;
    let text = validation.to_string();
    report.rows.push(vec![Cell::from(validation.is_ok()), Cell::Text(text)]);
    Ok((report, validation.is_ok()))
}

pub fn layout(config: &RunConfig) -> Outcome {
    let (config, spec) = resolved(config)?;
    let layout = build_layout(&spec)?;
    let mut report = Report::new(&config, vec!["index", "start", "end", "width"]);
    report.meta("segments", layout.len());
    report.rows = layout
        .segments
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| vec![Cell::from(i), Cell::from(a), Cell::from(b), Cell::from(layout.width)])
        .collect();
    Ok(report)
}

pub fn transmit(config: &RunConfig) -> Outcome {
    let (mut config, spec) = resolved(config)?;
    let k = config.require(config.k, "k")?;
    if !(k.is_finite() && k > 0.0) {
        return Err(CliError::Usage(format!("--k must be a positive number (got {k})")));
    }
    let method = *config.method.get_or_insert(Method::Closed);
    spec.check()?;
    let mut report = Report::new(&config, vec!["k", "T", "R", "method", "discrepancy", "warning"]);
    report.single = true;
    let warning = if (k * k - spec.height).abs() < DEGENERATE_ENERGY_THRESHOLD && spec.height > 0.0 {
        "degenerate energy: limit branch used"
    } else {
        ""
    };
    let (t, r, discrepancy) = match method {
        Method::Closed => {
            let e = evaluate(&spec, k)?;
            (e.transmission, e.reflection, f64::NAN)
        }
        Method::Oracle => {
            let t = brute_force_transmission(&spec, k)?;
            (t, 1.0 - t, f64::NAN)
        }
        Method::Both => {
            let e = evaluate(&spec, k)?;
            let oracle = brute_force_transmission(&spec, k)?;
            (e.transmission, e.reflection, (e.transmission - oracle).abs())
        }
    };
    report.rows.push(vec![
        Cell::from(k),
        Cell::from(t),
        Cell::from(r),
        Cell::from(method.as_str()),
        Cell::from(discrepancy),
        Cell::from(warning),
    ]);
    Ok(report)
}

pub fn sweep(config: &RunConfig) -> Outcome {
    let (mut config, spec) = resolved(config)?;
    let k_min = config.require(config.k_min, "k-min")?;
    let k_max = config.require(config.k_max, "k-max")?;
    let points = *config.points.get_or_insert(801);
    let method = *config.method.get_or_insert(Method::Closed);
    let table = analysis::k_sweep(&spec, k_min, k_max, points, method)?;
    let mut header = vec!["k", "T", "R"];
    if table.t_oracle.is_some() {
        header.push("T_oracle");
    }
    let mut report = Report::new(&config, header);
    if let Some(d) = table.max_discrepancy {
        report.meta("max_discrepancy", d);
    }
    report.rows = (0..table.axis.len())
        .map(|i| {
            let mut row = vec![Cell::from(table.axis[i]), Cell::from(table.t[i]), Cell::from(table.r[i])];
            if let Some(o) = &table.t_oracle {
                row.push(Cell::from(o[i]));
            }
            row
        })
        .collect();
    Ok(report)
}

/// Rows run over `rho`, so the template `rho` defaults to `rho_min`.
pub fn grid(config: &RunConfig) -> Outcome {
    let rho_min = config.require(config.rho_min, "rho-min")?;
    let mut template = config.clone();
    template.rho = template.rho.or(Some(rho_min));
    let (mut config, spec) = resolved(&template)?;
    let rho_max = *config.rho_max.get_or_insert(rho_min);
    let k_min = config.require(config.k_min, "k-min")?;
    let k_max = *config.k_max.get_or_insert(k_min);
    let n_rho = *config.n_rho.get_or_insert(if rho_max == rho_min { 1 } else { 101 });
    let n_k = *config.n_k.get_or_insert(if k_max == k_min { 1 } else { 201 });
    let table = analysis::rho_k_grid(&spec, rho_min, rho_max, n_rho, k_min, k_max, n_k)?;
    let mut report = Report::new(&config, vec!["rho", "k", "T"]);
    report.meta("invalid_rows", table.row_valid.iter().filter(|v| !**v).count());
    for (i, &rho) in table.rho_axis.iter().enumerate() {
        for (j, &k) in table.k_axis.iter().enumerate() {
            report.rows.push(vec![Cell::from(rho), Cell::from(k), Cell::from(table.value(i, j))]);
        }
    }
    Ok(report)
}

pub fn saturate(config: &RunConfig) -> Outcome {
    let (mut config, spec) = resolved(config)?;
    let stages = config.stage_list.clone().ok_or_else(|| CliError::Usage("missing --stages".into()))?;
    let k_max = config.require(config.k_max, "k-max")?;
    let points = *config.points.get_or_insert(2000);
    let k_min = *config.k_min.get_or_insert(k_max / points as f64);
    let delta = *config.delta.get_or_insert(DEFAULT_SATURATION_DELTA);
    let matrix = analysis::saturation_metric(&spec, &stages, k_min, k_max, points)?;
    let mut report = Report::new(&config, vec!["s", "s_prime", "distance"]);
    match matrix.saturated_beyond(delta) {
        Some(s) => report.meta("saturated_beyond", s),
        None => report.meta("saturated_beyond", "none"),
    }
    for (i, &s) in matrix.stages.iter().enumerate() {
        for (j, &s2) in matrix.stages.iter().enumerate() {
            report.rows.push(vec![Cell::from(s), Cell::from(s2), Cell::from(matrix.get(i, j))]);
        }
    }
    Ok(report)
}

pub fn scaling(config: &RunConfig) -> Outcome {
    let (mut config, spec) = resolved(config)?;
    let v0 = config.require(config.v0, "V0")?;
    let k_lo = *config.k_lo.get_or_insert(1e2);
    let k_hi = *config.k_hi.get_or_insert(1e4);
    let points = *config.points.get_or_insert(200);
    let fit = analysis::scaling_fit(&spec, v0, (k_lo, k_hi), points)?;
    let mut report = Report::new(&config, vec!["k", "R"]);
    report.meta("slope", fit.slope);
    report.meta("intercept", fit.intercept);
    report.meta("residual", fit.residual);
    report.meta("used", fit.used);
    report.meta("excluded", fit.excluded);
    report.meta("height", fit.height);
    report.rows = fit.k_axis.iter().zip(&fit.reflection).map(|(&k, &r)| vec![Cell::from(k), Cell::from(r)]).collect();
    Ok(report)
}

pub fn resonances(config: &RunConfig) -> Outcome {
    let (mut config, spec) = resolved(config)?;
    let k_min = config.require(config.k_min, "k-min")?;
    let k_max = config.require(config.k_max, "k-max")?;
    let coarse = *config.coarse.get_or_insert(2000);
    let threshold = *config.threshold.get_or_insert(0.99);
    let found = analysis::find_resonances(&spec, k_min, k_max, coarse, threshold)?;
    let mut report = Report::new(&config, vec!["k", "T", "width"]);
    report.meta("plateau", found.plateau);
    report.meta("peaks", found.peaks.len());
    report.rows = found.peaks.iter().map(|p| vec![Cell::from(p.k), Cell::from(p.t), Cell::from(p.width)]).collect();
    Ok(report)
}

/// Dimension and lacunarity descriptors. Needs `N` and `rho`; the UCP gap is
/// reported when the full spec is given.
pub fn descriptors(config: &RunConfig) -> Outcome {
    let n = config.require(config.n, "N")?;
    let rho = config.require(config.rho, "rho")?;
    let dimension = fractal_dimension(n, rho)?;
    let zeta = 1.0 / rho;
    let mut report =
        Report::new(config, vec!["D", "D_alt", "zeta", "g_c", "eps_min", "eps_reg", "eps_max", "ordered", "eps_ucp"]);
    report.single = true;
    let d_alt = if n == 2 { fractal_dimension_alt(zeta).unwrap_or(f64::NAN) } else { f64::NAN };
    let lac = lacunarity_parameters(n, zeta).ok();
    let eps_ucp = config.spec().ok().and_then(|s| ucp_epsilon(&s).ok()).unwrap_or(f64::NAN);
    report.rows.push(vec![
        Cell::from(dimension),
        Cell::from(d_alt),
        Cell::from(zeta),
        Cell::from(lac.map_or(f64::NAN, |l| l.g_c)),
        Cell::from(lac.map_or(f64::NAN, |l| l.eps_min)),
        Cell::from(lac.map_or(f64::NAN, |l| l.eps_reg)),
        Cell::from(lac.and_then(|l| l.eps_max.value()).unwrap_or(f64::NAN)),
        lac.map_or(Cell::from("n/a"), |l| Cell::from(l.ordered)),
        Cell::from(eps_ucp),
    ]);
    Ok(report)
}
