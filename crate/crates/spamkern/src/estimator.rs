//! Block-coordinate solver for the doubly-penalized least-squares program
//!
//! ```text
//! min  1/(2n) ||y~ - sum_j K^j a_j||^2
//!      + lambda sum_j sqrt(||K^j a_j||^2 / n) + rho sum_j sqrt(a_j' K^j a_j)
//! s.t. a_j' K^j a_j <= 1 for every coordinate j,
//! ```
//!
//! where `y~` is the centered response vector. Each coordinate is
//! reparametrized in its Gram eigenbasis, `beta_j = D_j^(1/2) U_j' a_j`, so
//! the block penalty becomes `lambda sqrt(beta' D beta / n) + rho ||beta||`
//! and the constraint the Euclidean unit ball. Cyclic sweeps minimize each
//! block exactly; the block minimizer comes from nested scalar root-finding
//! on the stationarity system, so the objective is nonincreasing by
//! construction and convergence is declared on the KKT residual.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{GramSpectral, SpectralKernel};
use crate::rates::RegParams;

/// Tie tolerance at the prox's nonsmooth point: a block is pinned to zero
/// whenever the zero test passes within this slack.
const ZERO_TIE_TOL: f64 = 1e-12;

/// Relative bisection tolerance for every scalar root in the block solver.
const ROOT_TOL: f64 = 1e-12;

/// Stopping parameters for [`fit`].
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub max_sweeps: usize,
    pub kkt_tol: f64,
    /// Relative per-sweep objective decrease below which the solver declares
    /// a stall (three consecutive stalled sweeps with the KKT residual still
    /// above tolerance abort with `NotConverged`).
    pub objective_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 10_000,
            kkt_tol: 1e-6,
            objective_tol: 1e-12,
        }
    }
}

/// Fitted additive model in the per-coordinate Gram eigenbases.
///
/// `block_weights[j]` holds `beta_j` over coordinate `j`'s positive Gram
/// spectrum (zero-spectrum directions are pinned at zero and omitted). The
/// diagnostics fields carry the solver trace: per-sweep objective values,
/// final KKT residual, per-block empirical norms and the sweep count.
#[derive(Debug, Clone)]
pub struct AdditiveFit {
    pub intercept: f64,
    pub block_weights: Vec<Vec<f64>>,
    pub active_set: Vec<usize>,
    pub objective: f64,
    pub kkt_residual: f64,
    pub sweeps_used: usize,
    /// `||f_j||_n` for every coordinate at the solution.
    pub block_empirical_norms: Vec<f64>,
    /// Objective after each sweep (monotone nonincreasing).
    pub objective_trace: Vec<f64>,
}

impl AdditiveFit {
    pub fn dimension(&self) -> usize {
        self.block_weights.len()
    }
}

// ---------------------------------------------------------------------------
// scalar machinery
// ---------------------------------------------------------------------------

/// `min over ||u|| <= 1 of || z - a diag(sqrt(spec)) u ||`: the trust-region
/// least-squares behind the zero test and the KKT distance at zero. Solved
/// through 1-D root-finding on its Lagrange multiplier.
fn covering_residual(z: &[f64], spec: &[f64], a: f64) -> f64 {
    debug_assert_eq!(z.len(), spec.len());
    if a == 0.0 {
        return norm(z);
    }
    // coordinates with zero weight cannot be covered at all
    let mut base_sq = 0.0;
    let mut cover_sq = 0.0; // sum z_i^2 / (a^2 s_i) over coverable coords
    for (&zi, &si) in z.iter().zip(spec) {
        if si > 0.0 {
            cover_sq += zi * zi / (a * a * si);
        } else {
            base_sq += zi * zi;
        }
    }
    if cover_sq <= 1.0 {
        return base_sq.sqrt();
    }
    // h(gamma) = sum s'_i z_i^2 / (s'_i + gamma)^2 with s'_i = a^2 s_i is
    // strictly decreasing; h(0) = cover_sq > 1 and h(gamma_hi) <= 1 below.
    let h = |gamma: f64| -> f64 {
        z.iter()
            .zip(spec)
            .filter(|(_, &si)| si > 0.0)
            .map(|(&zi, &si)| {
                let sp = a * a * si;
                let den = sp + gamma;
                sp * zi * zi / (den * den)
            })
            .sum()
    };
    let mut hi = z
        .iter()
        .zip(spec)
        .filter(|(_, &si)| si > 0.0)
        .map(|(&zi, &si)| a * a * si * zi * zi)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    while h(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while (hi - lo) > ROOT_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gamma = 0.5 * (lo + hi);
    let mut val_sq = base_sq;
    for (&zi, &si) in z.iter().zip(spec) {
        if si > 0.0 {
            let den = a * a * si + gamma;
            val_sq += zi * zi * gamma * gamma / (den * den);
        }
    }
    val_sq.sqrt()
}

/// Subdifferential test for a zero block: true iff
/// `min over ||u|| <= 1 of ||z - a diag(sqrt(spec)) u|| <= b`.
pub fn zero_block_test(z: &[f64], spec: &[f64], a: f64, b: f64) -> bool {
    covering_residual(z, spec, a) <= b + ZERO_TIE_TOL
}

/// Solves `min 1/2 beta' diag(quad) beta - z' beta + b ||beta||` over the
/// unit ball, all `quad_i > 0`. Stationarity gives
/// `beta_i = z_i / (quad_i + b/r + theta)`; `r` then solves a strictly
/// decreasing scalar equation, with the ball multiplier `theta` taking over
/// when the free root leaves the ball.
fn shrink_solve(z: &[f64], quad: &[f64], b: f64) -> Vec<f64> {
    let nz = norm(z);
    if nz <= b {
        return vec![0.0; z.len()];
    }
    if b == 0.0 {
        let free: Vec<f64> = z.iter().zip(quad).map(|(&zi, &qi)| zi / qi).collect();
        if norm(&free) <= 1.0 {
            return free;
        }
        let theta = multiplier_root(z, quad, 0.0);
        return z
            .iter()
            .zip(quad)
            .map(|(&zi, &qi)| zi / (qi + theta))
            .collect();
    }
    // g(r) = sum z_i^2 / (quad_i r + b)^2 - 1, strictly decreasing,
    // g(0) = ||z||^2/b^2 - 1 > 0
    let g = |r: f64| -> f64 {
        z.iter()
            .zip(quad)
            .map(|(&zi, &qi)| {
                let den = qi * r + b;
                zi * zi / (den * den)
            })
            .sum::<f64>()
            - 1.0
    };
    // the ball caps the norm at 1, so only a free root inside [0, 1] matters
    if g(1.0) > 0.0 {
        let theta = multiplier_root(z, quad, b);
        return z
            .iter()
            .zip(quad)
            .map(|(&zi, &qi)| zi / (qi + b + theta))
            .collect();
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while (hi - lo) > ROOT_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    z.iter()
        .zip(quad)
        .map(|(&zi, &qi)| zi / (qi + b / r))
        .collect()
}

/// Root of `sum z_i^2 / (quad_i + b + theta)^2 = 1` in `theta >= 0`.
fn multiplier_root(z: &[f64], quad: &[f64], b: f64) -> f64 {
    let h = |theta: f64| -> f64 {
        z.iter()
            .zip(quad)
            .map(|(&zi, &qi)| {
                let den = qi + b + theta;
                zi * zi / (den * den)
            })
            .sum()
    };
    let mut hi = norm(z).max(f64::MIN_POSITIVE);
    while h(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while (hi - lo) > ROOT_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact minimizer of
///
/// ```text
/// 1/2 beta' diag(quad) beta - z' beta
///   + a sqrt(beta' diag(spec) beta) + b ||beta||,   ||beta|| <= 1,
/// ```
///
/// with `quad_i > 0`, `spec_i >= 0`, `a, b >= 0`. The stationarity system
/// `beta_i = z_i / (quad_i + a spec_i / t + b / r + theta)` with
/// `t = sqrt(beta' S beta)`, `r = ||beta||` is closed by bisection on `t`
/// (outer) and on `r` or the ball multiplier (inner).
pub(crate) fn solve_block(z: &[f64], quad: &[f64], spec: &[f64], a: f64, b: f64) -> Vec<f64> {
    let n = z.len();
    debug_assert!(quad.len() == n && spec.len() == n);
    debug_assert!(quad.iter().all(|&q| q > 0.0));
    if zero_block_test(z, spec, a, b) {
        return vec![0.0; n];
    }
    let no_weighted_term = a == 0.0 || spec.iter().all(|&s| s == 0.0);
    if no_weighted_term {
        return shrink_solve(z, quad, b);
    }
    // can the weighted-norm subgradient absorb the positive-spectrum part of
    // z on its own? If so the optimum is supported on the null coordinates.
    let cover_sq: f64 = z
        .iter()
        .zip(spec)
        .filter(|(_, &si)| si > 0.0)
        .map(|(&zi, &si)| zi * zi / (a * a * si))
        .sum();
    if cover_sq <= 1.0 {
        return null_support_solve(z, quad, spec, b);
    }
    // main branch: the weighted seminorm is positive at the optimum
    let inner = |t: f64| -> Vec<f64> {
        let c: Vec<f64> = quad
            .iter()
            .zip(spec)
            .map(|(&qi, &si)| qi + a * si / t)
            .collect();
        shrink_solve(z, &c, b)
    };
    let weighted = |beta: &[f64]| -> f64 {
        beta.iter()
            .zip(spec)
            .map(|(&bi, &si)| si * bi * bi)
            .sum::<f64>()
            .sqrt()
    };
    let f = |t: f64| weighted(&inner(t)) - t;
    let mut hi = 1.0;
    let mut guard = 0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            break;
        }
    }
    let mut lo = hi * 0.5;
    guard = 0;
    while f(lo) <= 0.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 {
            // the root is numerically at t = 0
            return null_support_solve(z, quad, spec, b);
        }
    }
    while (hi - lo) > ROOT_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    inner(0.5 * (lo + hi))
}

/// Minimizer restricted to the zero-spectrum coordinates (the weighted
/// seminorm vanishes there, so only the quadratic, `b ||.||` and the ball
/// remain).
fn null_support_solve(z: &[f64], quad: &[f64], spec: &[f64], b: f64) -> Vec<f64> {
    let n = z.len();
    let idx: Vec<usize> = (0..n).filter(|&i| spec[i] == 0.0).collect();
    let zs: Vec<f64> = idx.iter().map(|&i| z[i]).collect();
    let qs: Vec<f64> = idx.iter().map(|&i| quad[i]).collect();
    let sol = shrink_solve(&zs, &qs, b);
    let mut beta = vec![0.0; n];
    for (slot, &i) in idx.iter().enumerate() {
        beta[i] = sol[slot];
    }
    beta
}

/// Exact minimizer over the unit ball of
/// `1/2 ||beta - z||^2 + a sqrt(beta' diag(spectrum) beta) + b ||beta||`.
///
/// Returns zero exactly when [`zero_block_test`] passes.
pub fn block_prox(z: &[f64], spectrum: &[f64], a: f64, b: f64) -> Result<Vec<f64>> {
    if spectrum.len() != z.len() {
        return Err(Error::DimensionMismatch(format!(
            "spectrum length {} vs point length {}",
            spectrum.len(),
            z.len()
        )));
    }
    if a < 0.0 || b < 0.0 || spectrum.iter().any(|&s| s < 0.0) {
        return Err(Error::InvalidParameter(
            "block_prox needs a, b >= 0 and a nonnegative spectrum".into(),
        ));
    }
    let quad = vec![1.0; z.len()];
    Ok(solve_block(z, &quad, spectrum, a, b))
}

/// Distance from the origin to the subdifferential of
/// `1/2 beta' diag(quad) beta - z' beta + a sqrt(beta' S beta) + b ||beta||
///  + indicator(||beta|| <= 1)`
/// at `beta`. Zero at the exact minimizer.
pub(crate) fn block_kkt_distance(
    beta: &[f64],
    z: &[f64],
    quad: &[f64],
    spec: &[f64],
    a: f64,
    b: f64,
) -> f64 {
    let r = norm(beta);
    if r == 0.0 {
        return (covering_residual(z, spec, a) - b).max(0.0);
    }
    let t = beta
        .iter()
        .zip(spec)
        .map(|(&bi, &si)| si * bi * bi)
        .sum::<f64>()
        .sqrt();
    let on_boundary = r >= 1.0 - 1e-9;
    // smooth part plus the (unique) subgradient of b||.|| away from zero
    let mut g: Vec<f64> = beta
        .iter()
        .zip(quad)
        .zip(z)
        .map(|((&bi, &qi), &zi)| qi * bi - zi + b * bi / r)
        .collect();
    if t > 0.0 {
        for ((gi, &bi), &si) in g.iter_mut().zip(beta).zip(spec) {
            *gi += a * si * bi / t;
        }
        let theta = if on_boundary {
            (-dot(&g, beta) / (r * r)).max(0.0)
        } else {
            0.0
        };
        let mut dist_sq = 0.0;
        for (&gi, &bi) in g.iter().zip(beta) {
            let v = gi + theta * bi;
            dist_sq += v * v;
        }
        dist_sq.sqrt()
    } else {
        // beta lies in the null space of S, which is orthogonal to the range
        // of S^(1/2): the covering of the range part and the ball multiplier
        // on the null part separate coordinate-wise.
        let range: Vec<usize> = (0..beta.len()).filter(|&i| spec[i] > 0.0).collect();
        let null: Vec<usize> = (0..beta.len()).filter(|&i| spec[i] == 0.0).collect();
        let zr: Vec<f64> = range.iter().map(|&i| -g[i]).collect();
        let sr: Vec<f64> = range.iter().map(|&i| spec[i]).collect();
        let range_dist = covering_residual(&zr, &sr, a);
        let gnull: Vec<f64> = null.iter().map(|&i| g[i]).collect();
        let bnull: Vec<f64> = null.iter().map(|&i| beta[i]).collect();
        let theta = if on_boundary {
            (-dot(&gnull, &bnull) / (r * r)).max(0.0)
        } else {
            0.0
        };
        let mut null_sq = 0.0;
        for (&gi, &bi) in gnull.iter().zip(&bnull) {
            let v = gi + theta * bi;
            null_sq += v * v;
        }
        (range_dist * range_dist + null_sq).sqrt()
    }
}

// ---------------------------------------------------------------------------
// the fit
// ---------------------------------------------------------------------------

pub(crate) fn factorize_design(
    kernel: &SpectralKernel,
    design: &DMatrix<f64>,
) -> Result<Vec<GramSpectral>> {
    let cols: Vec<Vec<f64>> = (0..design.ncols())
        .map(|j| design.column(j).iter().copied().collect())
        .collect();
    cols.par_iter()
        .map(|col| GramSpectral::compute(kernel, col))
        .collect()
}

fn check_design(design: &DMatrix<f64>, responses: &[f64]) -> Result<()> {
    if design.nrows() != responses.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} design rows vs {} responses",
            design.nrows(),
            responses.len()
        )));
    }
    if design.nrows() < 2 || design.ncols() == 0 {
        return Err(Error::InvalidParameter(
            "need n >= 2 samples and d >= 1 coordinates".into(),
        ));
    }
    for &v in design.iter() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(v));
        }
    }
    Ok(())
}

/// Solves the penalized program by cyclic exact block minimization in the
/// Gram eigenbases. Responses are centered by their sample mean, which
/// becomes the intercept; convergence is declared once the blockwise KKT
/// residual drops to `opts.kkt_tol`.
pub fn fit(
    design: &DMatrix<f64>,
    responses: &[f64],
    kernel: &SpectralKernel,
    params: &RegParams,
    opts: &SolverOptions,
) -> Result<AdditiveFit> {
    check_design(design, responses)?;
    if params.lambda_n < 0.0 || params.rho_n < 0.0 {
        return Err(Error::InvalidParameter(
            "penalty weights must be nonnegative".into(),
        ));
    }
    let blocks = factorize_design(kernel, design)?;
    fit_with_factors(design, responses, &blocks, params, opts)
}

/// Same as [`fit`], reusing precomputed per-coordinate Gram factors.
pub(crate) fn fit_with_factors(
    design: &DMatrix<f64>,
    responses: &[f64],
    blocks: &[GramSpectral],
    params: &RegParams,
    opts: &SolverOptions,
) -> Result<AdditiveFit> {
    let n = design.nrows();
    let d = design.ncols();
    let nf = n as f64;
    let intercept = responses.iter().sum::<f64>() / nf;
    let centered = DVector::from_iterator(n, responses.iter().map(|&y| y - intercept));

    let lambda = params.lambda_n;
    let rho = params.rho_n;
    let a_coef = lambda / nf.sqrt();

    let mut beta: Vec<Vec<f64>> = blocks.iter().map(|b| vec![0.0; b.rank()]).collect();
    let mut residual = centered.clone();
    let mut trace: Vec<f64> = Vec::new();
    let mut prev_obj = objective_from_state(&residual, &beta, &blocks, lambda, rho, nf);
    let mut stalled = 0usize;
    let mut kkt = f64::INFINITY;
    let mut sweeps = 0usize;
    let mut converged = false;

    while sweeps < opts.max_sweeps {
        sweeps += 1;
        for (j, block) in blocks.iter().enumerate() {
            let r = block.rank();
            if r == 0 {
                continue;
            }
            let sb = &block.scaled_basis;
            let lam = &block.spectrum;
            // z~ = SB' (residual + SB beta_j) via SB'SB = diag(spectrum)
            let mut ztilde = sb.tr_mul(&residual);
            for i in 0..r {
                ztilde[i] += lam[i] * beta[j][i];
            }
            let z: Vec<f64> = ztilde.iter().map(|v| v / nf).collect();
            let new_beta = if zero_block_test(&z, lam, a_coef, rho) {
                vec![0.0; r]
            } else {
                let quad: Vec<f64> = lam.iter().map(|&l| l / nf).collect();
                solve_block(&z, &quad, lam, a_coef, rho)
            };
            let changed = new_beta.iter().zip(&beta[j]).any(|(&a, &b)| a != b);
            if changed {
                let delta = DVector::from_iterator(
                    r,
                    new_beta.iter().zip(&beta[j]).map(|(&nv, &ov)| ov - nv),
                );
                residual.gemv(1.0, sb, &delta, 1.0);
                beta[j] = new_beta;
            }
        }
        // refresh the residual periodically to stop incremental drift
        if sweeps % 64 == 0 {
            residual = centered.clone();
            for (j, block) in blocks.iter().enumerate() {
                if block.rank() == 0 {
                    continue;
                }
                let bv = DVector::from_column_slice(&beta[j]);
                residual.gemv(-1.0, &block.scaled_basis, &bv, 1.0);
            }
        }

        let obj = objective_from_state(&residual, &beta, &blocks, lambda, rho, nf);
        debug_assert!(
            obj <= prev_obj + 1e-12 * prev_obj.abs().max(1.0),
            "objective increased: {prev_obj} -> {obj}"
        );
        debug_assert!(beta.iter().all(|b| norm(b) <= 1.0 + 1e-8));
        trace.push(obj);

        kkt = kkt_from_state(&residual, &beta, &blocks, a_coef, rho, nf);
        if kkt <= opts.kkt_tol {
            prev_obj = obj;
            converged = true;
            break;
        }
        let decrease = prev_obj - obj;
        if decrease <= opts.objective_tol * prev_obj.abs().max(1.0) {
            stalled += 1;
            if stalled >= 3 {
                return Err(Error::NotConverged {
                    sweeps,
                    kkt,
                    tol: opts.kkt_tol,
                });
            }
        } else {
            stalled = 0;
        }
        prev_obj = obj;
    }
    if !converged {
        return Err(Error::NotConverged {
            sweeps,
            kkt,
            tol: opts.kkt_tol,
        });
    }

    let block_empirical_norms: Vec<f64> = beta
        .iter()
        .zip(blocks)
        .map(|(b, blk)| {
            (b.iter()
                .zip(&blk.spectrum)
                .map(|(&bi, &li)| li * bi * bi)
                .sum::<f64>()
                / nf)
                .sqrt()
        })
        .collect();
    let active_set: Vec<usize> = (0..d)
        .filter(|&j| beta[j].iter().any(|&v| v != 0.0))
        .collect();

    Ok(AdditiveFit {
        intercept,
        block_weights: beta,
        active_set,
        objective: prev_obj,
        kkt_residual: kkt,
        sweeps_used: sweeps,
        block_empirical_norms,
        objective_trace: trace,
    })
}

fn objective_from_state(
    residual: &DVector<f64>,
    beta: &[Vec<f64>],
    blocks: &[GramSpectral],
    lambda: f64,
    rho: f64,
    nf: f64,
) -> f64 {
    let mut obj = residual.norm_squared() / (2.0 * nf);
    for (b, blk) in beta.iter().zip(blocks) {
        let t_sq: f64 = b
            .iter()
            .zip(&blk.spectrum)
            .map(|(&bi, &li)| li * bi * bi)
            .sum();
        obj += lambda * (t_sq / nf).sqrt() + rho * norm(b);
    }
    obj
}

fn kkt_from_state(
    residual: &DVector<f64>,
    beta: &[Vec<f64>],
    blocks: &[GramSpectral],
    a_coef: f64,
    rho: f64,
    nf: f64,
) -> f64 {
    let mut worst = 0.0_f64;
    for (b, blk) in beta.iter().zip(blocks) {
        let r = blk.rank();
        if r == 0 {
            continue;
        }
        let lam = &blk.spectrum;
        let mut ztilde = blk.scaled_basis.tr_mul(residual);
        for i in 0..r {
            ztilde[i] += lam[i] * b[i];
        }
        let z: Vec<f64> = ztilde.iter().map(|v| v / nf).collect();
        let quad: Vec<f64> = lam.iter().map(|&l| l / nf).collect();
        worst = worst.max(block_kkt_distance(b, &z, &quad, lam, a_coef, rho));
    }
    worst
}

// ---------------------------------------------------------------------------
// recomputation paths: objective, prediction, KKT residual
// ---------------------------------------------------------------------------

fn rebuild_state(
    fit: &AdditiveFit,
    design: &DMatrix<f64>,
    responses: &[f64],
    kernel: &SpectralKernel,
) -> Result<(Vec<GramSpectral>, DVector<f64>)> {
    check_design(design, responses)?;
    if fit.dimension() != design.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "fit has {} blocks, design has {} columns",
            fit.dimension(),
            design.ncols()
        )));
    }
    let blocks = factorize_design(kernel, design)?;
    for (j, blk) in blocks.iter().enumerate() {
        if blk.rank() != fit.block_weights[j].len() {
            return Err(Error::DimensionMismatch(format!(
                "block {j}: {} weights vs rank {}",
                fit.block_weights[j].len(),
                blk.rank()
            )));
        }
    }
    let n = design.nrows();
    let mut residual = DVector::from_iterator(n, responses.iter().map(|&y| y - fit.intercept));
    for (j, blk) in blocks.iter().enumerate() {
        if blk.rank() == 0 {
            continue;
        }
        let bv = DVector::from_column_slice(&fit.block_weights[j]);
        residual.gemv(-1.0, &blk.scaled_basis, &bv, 1.0);
    }
    Ok((blocks, residual))
}

/// Recomputes the cost functional at the fitted point from scratch:
/// half mean squared residual plus the empirical-norm and Hilbert-norm
/// penalties of every block.
pub fn objective(
    fit: &AdditiveFit,
    design: &DMatrix<f64>,
    responses: &[f64],
    kernel: &SpectralKernel,
    params: &RegParams,
) -> Result<f64> {
    let (blocks, residual) = rebuild_state(fit, design, responses, kernel)?;
    Ok(objective_from_state(
        &residual,
        &fit.block_weights,
        &blocks,
        params.lambda_n,
        params.rho_n,
        design.nrows() as f64,
    ))
}

/// Blockwise KKT residual of the full objective at the fitted point,
/// recomputed from the data.
pub fn kkt_residual(
    fit: &AdditiveFit,
    design: &DMatrix<f64>,
    responses: &[f64],
    kernel: &SpectralKernel,
    params: &RegParams,
) -> Result<f64> {
    let (blocks, residual) = rebuild_state(fit, design, responses, kernel)?;
    let nf = design.nrows() as f64;
    Ok(kkt_from_state(
        &residual,
        &fit.block_weights,
        &blocks,
        params.lambda_n / nf.sqrt(),
        params.rho_n,
        nf,
    ))
}

/// Evaluates the fitted function at new points through the representer
/// expansion: intercept plus, for every coordinate, the kernel sections at
/// the training points weighted by `alpha_j = U_j D_j^(-1/2) beta_j` (zero
/// spectrum directions contribute nothing).
pub fn predict(
    fit: &AdditiveFit,
    kernel: &SpectralKernel,
    train_design: &DMatrix<f64>,
    new_points: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    if new_points.ncols() != train_design.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{} prediction columns vs {} training columns",
            new_points.ncols(),
            train_design.ncols()
        )));
    }
    if fit.dimension() != train_design.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "fit has {} blocks, design has {} columns",
            fit.dimension(),
            train_design.ncols()
        )));
    }
    let blocks = factorize_design(kernel, train_design)?;
    let n = train_design.nrows();
    let mut out = vec![fit.intercept; new_points.nrows()];
    for (j, blk) in blocks.iter().enumerate() {
        let r = blk.rank();
        if r != fit.block_weights[j].len() {
            return Err(Error::DimensionMismatch(format!(
                "block {j}: {} weights vs rank {}",
                fit.block_weights[j].len(),
                r
            )));
        }
        if r == 0 || fit.block_weights[j].iter().all(|&v| v == 0.0) {
            continue;
        }
        // alpha = U D^(-1/2) beta = scaled_basis * diag(1/lambda) * beta
        let scaled: Vec<f64> = fit.block_weights[j]
            .iter()
            .zip(&blk.spectrum)
            .map(|(&bi, &li)| bi / li)
            .collect();
        let alpha = &blk.scaled_basis * DVector::from_column_slice(&scaled);
        for (row, slot) in out.iter_mut().enumerate() {
            let zj = new_points[(row, j)];
            let mut acc = 0.0;
            for i in 0..n {
                acc += alpha[i] * kernel.eval(zj, train_design[(i, j)])?;
            }
            *slot += acc;
        }
    }
    Ok(out)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|&x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
