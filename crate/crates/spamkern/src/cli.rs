//! Experiment driver: JSON configuration, sweep execution with replicates,
//! slope fitting, bound tabulation and deterministic CSV emission.
//!
//! Rows are computed in a work pool but always emitted in grid-then-replicate
//! order, and every random stream is derived from the configured seed plus
//! the task's own grid values, so a run's CSV bytes depend only on its
//! configuration.

use rayon::prelude::*;
use serde::Deserialize;
use std::time::Instant;

use crate::bounds::{greedy_packing, n_star, gaussian_complexity_mc, sandwich_check};
use crate::error::{Error, Result};
use crate::estimator::{factorize_design, fit_with_factors, SolverOptions};
use crate::kernels::SpectralKernel;
use crate::rates::{
    critical_rate, lower_rate_logarithmic, lower_rate_polynomial, make_reg_params, q_sigma,
};
use crate::simulate::{
    generate, l2p_error_with_factors, l2pn_error_with_factors, replicate_rng, SyntheticSpec,
};

/// Experiment kinds the driver understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fit,
    SweepN,
    SweepD,
    SweepS,
    LowerBound,
    Packing,
    Complexity,
    Sandwich,
}

impl Mode {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "fit" => Ok(Self::Fit),
            "sweep-n" => Ok(Self::SweepN),
            "sweep-d" => Ok(Self::SweepD),
            "sweep-s" => Ok(Self::SweepS),
            "lower-bound" => Ok(Self::LowerBound),
            "packing" => Ok(Self::Packing),
            "complexity" => Ok(Self::Complexity),
            "sandwich" => Ok(Self::Sandwich),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fit => "fit",
            Self::SweepN => "sweep-n",
            Self::SweepD => "sweep-d",
            Self::SweepS => "sweep-s",
            Self::LowerBound => "lower-bound",
            Self::Packing => "packing",
            Self::Complexity => "complexity",
            Self::Sandwich => "sandwich",
        }
    }
}

fn default_replicates() -> usize {
    1
}
fn default_kappa() -> f64 {
    1.0
}
fn default_c_mult() -> f64 {
    16.0
}
fn default_noise_std() -> f64 {
    1.0
}
fn default_signal_radius() -> f64 {
    1.0
}
fn default_m_trunc() -> usize {
    1000
}
fn default_mc_reps() -> usize {
    200
}
fn default_trials() -> usize {
    200
}

/// Flat JSON configuration for one run. The kernel is either
/// `"finite-rank"` with `m`, or `"sobolev"` with `alpha` and an optional
/// truncation level (default 1000).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; must match the mode given on the command line when present.
    pub mode: Option<String>,
    pub kernel_kind: String,
    pub m: Option<usize>,
    pub alpha: Option<f64>,
    #[serde(default = "default_m_trunc")]
    pub m_trunc: usize,
    pub n_grid: Vec<usize>,
    pub d_grid: Vec<usize>,
    pub s_grid: Vec<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Optional multiplier sweep around the theory-driven `kappa`; the
    /// theory value itself stays the default path.
    pub kappa_grid: Option<Vec<f64>>,
    #[serde(default = "default_c_mult")]
    pub c_mult: f64,
    pub seed: u64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "default_noise_std")]
    pub noise_std: f64,
    #[serde(default = "default_signal_radius")]
    pub signal_radius: f64,
    /// Output path used when the command line gives none.
    pub out: Option<String>,
    /// Off by default: wall-clock timings are the one nondeterministic
    /// column, so they are recorded only on request.
    #[serde(default)]
    pub record_timing: bool,
    pub max_sweeps: Option<usize>,
    pub kkt_tol: Option<f64>,
    /// Packing mode: nonzero symbols per coordinate.
    pub alphabet: Option<usize>,
    /// Packing mode: requested codeword count.
    pub max_size: Option<usize>,
    /// Complexity mode: localization radii.
    pub t_grid: Option<Vec<f64>>,
    #[serde(default = "default_mc_reps")]
    pub mc_reps: usize,
    /// Sandwich mode: multiples of the critical rate.
    pub t_mult_grid: Option<Vec<f64>>,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config JSON: {e}")))
    }

    pub fn kernel(&self) -> Result<SpectralKernel> {
        match self.kernel_kind.as_str() {
            "finite-rank" => {
                let m = self
                    .m
                    .ok_or_else(|| Error::Config("finite-rank kernel needs `m`".into()))?;
                SpectralKernel::finite_rank(m)
            }
            "sobolev" => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::Config("sobolev kernel needs `alpha`".into()))?;
                SpectralKernel::sobolev(alpha, self.m_trunc)
            }
            other => Err(Error::Config(format!("unknown kernel kind `{other}`"))),
        }
    }

    fn validate(&self, mode: Mode) -> Result<()> {
        if let Some(declared) = &self.mode {
            if Mode::parse(declared)? != mode {
                return Err(Error::Config(format!(
                    "config declares mode `{declared}` but the command line asked for `{}`",
                    mode.as_str()
                )));
            }
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        for (name, grid) in [
            ("n_grid", &self.n_grid),
            ("d_grid", &self.d_grid),
            ("s_grid", &self.s_grid),
        ] {
            if grid.is_empty() {
                return Err(Error::Config(format!("{name} must be nonempty")));
            }
            if grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config(format!("{name} must be strictly increasing")));
            }
        }
        let singletons: &[(&str, usize)] = match mode {
            Mode::Fit => &[
                ("n_grid", self.n_grid.len()),
                ("d_grid", self.d_grid.len()),
                ("s_grid", self.s_grid.len()),
            ],
            Mode::SweepN => &[("d_grid", self.d_grid.len()), ("s_grid", self.s_grid.len())],
            Mode::SweepD => &[("n_grid", self.n_grid.len()), ("s_grid", self.s_grid.len())],
            Mode::SweepS => &[("n_grid", self.n_grid.len()), ("d_grid", self.d_grid.len())],
            _ => &[],
        };
        for &(name, len) in singletons {
            if len != 1 {
                return Err(Error::Config(format!(
                    "{name} must hold exactly one value in mode {}",
                    mode.as_str()
                )));
            }
        }
        match mode {
            Mode::Packing => {
                if self.alphabet.is_none() || self.max_size.is_none() {
                    return Err(Error::Config(
                        "packing mode needs `alphabet` and `max_size`".into(),
                    ));
                }
            }
            Mode::Complexity => {
                if self.t_grid.as_ref().map_or(true, Vec::is_empty) {
                    return Err(Error::Config("complexity mode needs a nonempty `t_grid`".into()));
                }
            }
            Mode::Sandwich => {
                if self.t_mult_grid.as_ref().map_or(true, Vec::is_empty) {
                    return Err(Error::Config(
                        "sandwich mode needs a nonempty `t_mult_grid`".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn solver_options(&self) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if let Some(ms) = self.max_sweeps {
            opts.max_sweeps = ms;
        }
        if let Some(tol) = self.kkt_tol {
            opts.kkt_tol = tol;
        }
        opts
    }
}

/// One emitted sweep row. Error columns are empty on solver failure; the
/// trailing flag marks such rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub d: usize,
    pub s: usize,
    pub replicate: usize,
    pub l2p_error: Option<f64>,
    pub l2pn_error: Option<f64>,
    pub active_set_size: Option<usize>,
    pub lambda_n: f64,
    pub rho_n: f64,
    pub nu_n: f64,
    pub sweeps_used: Option<usize>,
    pub wall_time_seconds: f64,
    pub failed: bool,
}

pub const SWEEP_HEADER: &str =
    "n,d,s,replicate,l2p_error,l2pn_error,active_set_size,lambda_n,rho_n,nu_n,sweeps_used,wall_time_seconds,failed";

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundRow {
    pub n: usize,
    pub d: usize,
    pub s: usize,
    /// Decay exponent for sobolev kernels, rank for finite-rank ones.
    pub param: f64,
    pub lower_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingRow {
    pub d: usize,
    pub s: usize,
    pub alphabet: usize,
    pub n_star: Option<f64>,
    pub target_size: usize,
    pub achieved_size: usize,
    pub min_hamming_distance: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityRow {
    pub n: usize,
    pub t: f64,
    pub mean: f64,
    pub std_err: f64,
    pub q_sigma: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichRow {
    pub n: usize,
    pub t_mult: f64,
    pub t: f64,
    pub trials: usize,
    pub frequency: f64,
}

/// Result of a run, ready for CSV emission.
#[derive(Debug, Clone)]
pub enum RunOutput {
    Sweep(Vec<SweepRow>),
    LowerBound { header: &'static str, rows: Vec<LowerBoundRow> },
    Packing(Vec<PackingRow>),
    Complexity(Vec<ComplexityRow>),
    Sandwich(Vec<SandwichRow>),
}

/// Decimal float with 17 significant digits: round-trips f64 bit-exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn format_opt_int(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl RunOutput {
    /// UTF-8, comma-separated, LF line endings, header row first.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Self::Sweep(rows) => {
                out.push_str(SWEEP_HEADER);
                out.push('\n');
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                        r.n,
                        r.d,
                        r.s,
                        r.replicate,
                        format_opt_float(r.l2p_error),
                        format_opt_float(r.l2pn_error),
                        format_opt_int(r.active_set_size),
                        format_float(r.lambda_n),
                        format_float(r.rho_n),
                        format_float(r.nu_n),
                        format_opt_int(r.sweeps_used),
                        format_float(r.wall_time_seconds),
                        u8::from(r.failed),
                    ));
                }
            }
            Self::LowerBound { header, rows } => {
                out.push_str(header);
                out.push('\n');
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        r.n,
                        r.d,
                        r.s,
                        format_float(r.param),
                        format_float(r.lower_rate),
                    ));
                }
            }
            Self::Packing(rows) => {
                out.push_str("d,s,alphabet,n_star,target_size,achieved_size,min_hamming_distance\n");
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        r.d,
                        r.s,
                        r.alphabet,
                        format_opt_float(r.n_star),
                        r.target_size,
                        r.achieved_size,
                        r.min_hamming_distance,
                    ));
                }
            }
            Self::Complexity(rows) => {
                out.push_str("n,t,mean,std_err,q_sigma,ratio\n");
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.n,
                        format_float(r.t),
                        format_float(r.mean),
                        format_float(r.std_err),
                        format_float(r.q_sigma),
                        format_float(r.ratio),
                    ));
                }
            }
            Self::Sandwich(rows) => {
                out.push_str("n,t_mult,t,trials,frequency\n");
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        r.n,
                        format_float(r.t_mult),
                        format_float(r.t),
                        r.trials,
                        format_float(r.frequency),
                    ));
                }
            }
        }
        out
    }
}

/// Splittable stream id from the grid identity of a task, so values depend
/// on the grid point and replicate, never on enumeration order.
fn task_stream(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        h ^= p.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
        // splitmix64 finalizer
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h = z ^ (z >> 31);
    }
    h
}

/// Executes a configured experiment. Deterministic given the config.
pub fn run(mode: Mode, config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate(mode)?;
    match mode {
        Mode::Fit | Mode::SweepN | Mode::SweepD | Mode::SweepS => run_sweep(config),
        Mode::LowerBound => run_lower_bound(config),
        Mode::Packing => run_packing(config),
        Mode::Complexity => run_complexity(config),
        Mode::Sandwich => run_sandwich(config),
    }
}

fn run_sweep(config: &ExperimentConfig) -> Result<RunOutput> {
    let kernel = config.kernel()?;
    let opts = config.solver_options();
    let kappas: Vec<f64> = config
        .kappa_grid
        .clone()
        .unwrap_or_else(|| vec![config.kappa]);

    // task list in emission order
    let mut tasks = Vec::new();
    for &n in &config.n_grid {
        for &d in &config.d_grid {
            for &s in &config.s_grid {
                for (ki, &kappa) in kappas.iter().enumerate() {
                    for rep in 0..config.replicates {
                        tasks.push((n, d, s, ki, kappa, rep));
                    }
                }
            }
        }
    }

    let rows: Result<Vec<SweepRow>> = tasks
        .par_iter()
        .map(|&(n, d, s, _ki, kappa, rep)| {
            let started = Instant::now();
            let params = make_reg_params(&kernel, n, d, kappa, config.c_mult)?;
            let stream = task_stream(&[n as u64, d as u64, s as u64, kappa.to_bits(), rep as u64]);
            let data = generate(&SyntheticSpec {
                d,
                s,
                n,
                kernel: kernel.clone(),
                mu: config.mu,
                noise_std: config.noise_std,
                signal_radius: config.signal_radius,
                seed: config.seed ^ stream,
            })?;
            let factors = factorize_design(&kernel, &data.design)?;
            let outcome = fit_with_factors(&data.design, &data.responses, &factors, &params, &opts);
            let wall = if config.record_timing {
                started.elapsed().as_secs_f64()
            } else {
                0.0
            };
            let row = match outcome {
                Ok(fitted) => {
                    let l2p =
                        l2p_error_with_factors(&fitted, &data, &kernel, &data.design, &factors)?;
                    let l2pn = l2pn_error_with_factors(&fitted, &data, &factors)?;
                    SweepRow {
                        n,
                        d,
                        s,
                        replicate: rep,
                        l2p_error: Some(l2p),
                        l2pn_error: Some(l2pn),
                        active_set_size: Some(fitted.active_set.len()),
                        lambda_n: params.lambda_n,
                        rho_n: params.rho_n,
                        nu_n: params.nu_n,
                        sweeps_used: Some(fitted.sweeps_used),
                        wall_time_seconds: wall,
                        failed: false,
                    }
                }
                Err(Error::NotConverged { .. }) => SweepRow {
                    n,
                    d,
                    s,
                    replicate: rep,
                    l2p_error: None,
                    l2pn_error: None,
                    active_set_size: None,
                    lambda_n: params.lambda_n,
                    rho_n: params.rho_n,
                    nu_n: params.nu_n,
                    sweeps_used: None,
                    wall_time_seconds: wall,
                    failed: true,
                },
                Err(other) => return Err(other),
            };
            Ok(row)
        })
        .collect();
    Ok(RunOutput::Sweep(rows?))
}

fn run_lower_bound(config: &ExperimentConfig) -> Result<RunOutput> {
    let (header, is_sobolev, param) = match config.kernel_kind.as_str() {
        "sobolev" => {
            let alpha = config
                .alpha
                .ok_or_else(|| Error::Config("sobolev kernel needs `alpha`".into()))?;
            ("n,d,s,alpha,lower_rate", true, alpha)
        }
        "finite-rank" => {
            let m = config
                .m
                .ok_or_else(|| Error::Config("finite-rank kernel needs `m`".into()))?;
            ("n,d,s,m,lower_rate", false, m as f64)
        }
        other => return Err(Error::Config(format!("unknown kernel kind `{other}`"))),
    };
    let mut rows = Vec::new();
    for &n in &config.n_grid {
        for &d in &config.d_grid {
            for &s in &config.s_grid {
                let lower_rate = if is_sobolev {
                    lower_rate_polynomial(s, d, n, param)?
                } else {
                    lower_rate_logarithmic(s, d, n, param as usize)?
                };
                rows.push(LowerBoundRow {
                    n,
                    d,
                    s,
                    param,
                    lower_rate,
                });
            }
        }
    }
    Ok(RunOutput::LowerBound { header, rows })
}

fn run_packing(config: &ExperimentConfig) -> Result<RunOutput> {
    let alphabet = config.alphabet.expect("validated");
    let max_size = config.max_size.expect("validated");
    let mut rows = Vec::new();
    for &d in &config.d_grid {
        for &s in &config.s_grid {
            let guaranteed = if s % 2 == 0 {
                Some(n_star(d, s, alphabet)?)
            } else {
                None
            };
            let target = max_size.min(guaranteed.map_or(1, |g| (g.floor() as usize).max(1)));
            let stream = task_stream(&[d as u64, s as u64, alphabet as u64]);
            let mut rng = replicate_rng(config.seed ^ stream, 0);
            let pack = greedy_packing(d, s, alphabet, max_size, &mut rng)?;
            rows.push(PackingRow {
                d,
                s,
                alphabet,
                n_star: guaranteed,
                target_size: target,
                achieved_size: pack.len(),
                min_hamming_distance: pack.min_distance,
            });
        }
    }
    Ok(RunOutput::Packing(rows))
}

fn run_complexity(config: &ExperimentConfig) -> Result<RunOutput> {
    let kernel = config.kernel()?;
    let t_grid = config.t_grid.as_ref().expect("validated");
    let mut rows = Vec::new();
    for &n in &config.n_grid {
        let stream = task_stream(&[n as u64]);
        let mut rng = replicate_rng(config.seed ^ stream, 0);
        let column: Vec<f64> = (0..n).map(|_| rand::Rng::random(&mut rng)).collect();
        for &t in t_grid {
            let (mean, std_err) =
                gaussian_complexity_mc(&kernel, &column, t, config.mc_reps, &mut rng)?;
            let q = q_sigma(t, &kernel, n);
            rows.push(ComplexityRow {
                n,
                t,
                mean,
                std_err,
                q_sigma: q,
                ratio: mean / q,
            });
        }
    }
    Ok(RunOutput::Complexity(rows))
}

fn run_sandwich(config: &ExperimentConfig) -> Result<RunOutput> {
    let kernel = config.kernel()?;
    let mults = config.t_mult_grid.as_ref().expect("validated");
    let mut rows = Vec::new();
    for &n in &config.n_grid {
        let nu = critical_rate(&kernel, n)?;
        for &t_mult in mults {
            let t = t_mult * nu;
            let stream = task_stream(&[n as u64, t_mult.to_bits()]);
            let mut rng = replicate_rng(config.seed ^ stream, 0);
            let frequency = sandwich_check(&kernel, n, config.trials, t, &mut rng)?;
            rows.push(SandwichRow {
                n,
                t_mult,
                t,
                trials: config.trials,
                frequency,
            });
        }
    }
    Ok(RunOutput::Sandwich(rows))
}

// ---------------------------------------------------------------------------
// slope fitting
// ---------------------------------------------------------------------------

/// Sweep columns usable as regression variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    N,
    D,
    S,
    L2pError,
    L2pnError,
}

fn column_value(row: &SweepRow, col: Column) -> Option<f64> {
    match col {
        Column::N => Some(row.n as f64),
        Column::D => Some(row.d as f64),
        Column::S => Some(row.s as f64),
        Column::L2pError => row.l2p_error,
        Column::L2pnError => row.l2pn_error,
    }
}

/// Ordinary least squares of `log median(y)` on `log x`, with medians taken
/// over replicates at each distinct x. Returns the slope and its standard
/// error. Needs at least three distinct x values with positive medians.
pub fn fit_slope(rows: &[SweepRow], x_col: Column, y_col: Column) -> Result<(f64, f64)> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<u64, (f64, Vec<f64>)> = BTreeMap::new();
    for row in rows {
        if row.failed {
            continue;
        }
        let (Some(x), Some(y)) = (column_value(row, x_col), column_value(row, y_col)) else {
            continue;
        };
        groups.entry(x.to_bits()).or_insert((x, Vec::new())).1.push(y);
    }
    if groups.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need >= 3 distinct x values, found {}",
            groups.len()
        )));
    }
    let mut points = Vec::with_capacity(groups.len());
    for (_, (x, mut ys)) in groups {
        let med = median(&mut ys);
        if !(med > 0.0) || !(x > 0.0) {
            return Err(Error::InsufficientData(
                "log-log regression needs positive medians".into(),
            ));
        }
        points.push((x.ln(), med.ln()));
    }
    ols_with_stderr(&points)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Slope and standard error of an ordinary least-squares line through the
/// points.
pub fn ols_with_stderr(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let k = points.len();
    if k < 3 {
        return Err(Error::InsufficientData("need >= 3 points".into()));
    }
    let kf = k as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / kf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("x values are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let sigma_sq = rss / (kf - 2.0);
    Ok((slope, (sigma_sq / sxx).sqrt()))
}

/// Parses a CSV document produced by [`RunOutput::to_csv`] for sweep rows.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty CSV".into()))?;
    if header != SWEEP_HEADER {
        return Err(Error::Config(format!("unexpected sweep header: {header}")));
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(Error::Config(format!("bad sweep row: {line}")));
        }
        let parse_int = |f: &str| -> Result<usize> {
            f.parse()
                .map_err(|e| Error::Config(format!("bad integer `{f}`: {e}")))
        };
        let parse_float = |f: &str| -> Result<f64> {
            f.parse()
                .map_err(|e| Error::Config(format!("bad float `{f}`: {e}")))
        };
        let opt_float = |f: &str| -> Result<Option<f64>> {
            if f.is_empty() {
                Ok(None)
            } else {
                parse_float(f).map(Some)
            }
        };
        let opt_int = |f: &str| -> Result<Option<usize>> {
            if f.is_empty() {
                Ok(None)
            } else {
                parse_int(f).map(Some)
            }
        };
        rows.push(SweepRow {
            n: parse_int(fields[0])?,
            d: parse_int(fields[1])?,
            s: parse_int(fields[2])?,
            replicate: parse_int(fields[3])?,
            l2p_error: opt_float(fields[4])?,
            l2pn_error: opt_float(fields[5])?,
            active_set_size: opt_int(fields[6])?,
            lambda_n: parse_float(fields[7])?,
            rho_n: parse_float(fields[8])?,
            nu_n: parse_float(fields[9])?,
            sweeps_used: opt_int(fields[10])?,
            wall_time_seconds: parse_float(fields[11])?,
            failed: fields[12] == "1",
        });
    }
    Ok(rows)
}
