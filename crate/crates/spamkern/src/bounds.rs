//! Lower-bound machinery: sparse codeword packings with Hamming separation,
//! the hypothesis-testing error bound they feed, Monte Carlo estimates of
//! local Gaussian complexities, and the empirical-vs-population norm
//! sandwich check.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernels::SpectralKernel;
use crate::rates::critical_rate;
use crate::simulate::random_unit_ball_function;

/// Candidate budget for the randomized greedy packing scan.
const GREEDY_BUDGET: usize = 1_000_000;

/// Additive function represented by per-coordinate basis coefficients.
pub type AdditiveCoeffs = Vec<Vec<f64>>;

/// A set of length-`d` codewords over symbols `{0, ..., N}`, each with
/// exactly `s` nonzero entries and pairwise Hamming distance at least
/// `ceil(s/2)`.
#[derive(Debug, Clone)]
pub struct PackingSet {
    /// Number of nonzero symbols available per coordinate.
    pub alphabet_size: usize,
    pub codewords: Vec<Vec<u16>>,
    /// Exhaustively verified minimum pairwise Hamming distance (vacuously
    /// `d` when fewer than two codewords are present).
    pub min_distance: usize,
}

impl PackingSet {
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Nonzero count of the codewords (the sparsity each one carries).
    pub fn sparsity(&self) -> usize {
        self.codewords
            .first()
            .map_or(0, |u| u.iter().filter(|&&v| v != 0).count())
    }
}

fn hamming(u: &[u16], v: &[u16]) -> usize {
    u.iter().zip(v).filter(|(a, b)| a != b).count()
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc = 0.0;
    for i in 0..k {
        acc += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    acc
}

/// Guaranteed packing cardinality
/// `1/2 [C(d,s) / C(d,s/2)] N^s / (N+1)^(s/2)`, computed with log-domain
/// binomials. Defined for even `s` only (the count divides the sparsity in
/// half).
pub fn n_star(d: usize, s: usize, alphabet: usize) -> Result<f64> {
    if s == 0 || s > d || alphabet == 0 {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= s <= d and a nonempty alphabet, got s={s}, d={d}, N={alphabet}"
        )));
    }
    if s % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "the guaranteed count needs even s, got {s}"
        )));
    }
    let nf = alphabet as f64;
    let log_val = ln_binomial(d, s) - ln_binomial(d, s / 2) + s as f64 * nf.ln()
        - (s as f64 / 2.0) * (nf + 1.0).ln();
    Ok(0.5 * log_val.exp())
}

/// Greedy randomized packing: scans random sparse codewords, keeping each
/// one whose Hamming distance to the accepted set is at least `ceil(s/2)`,
/// until `max_size` codewords are found or the candidate budget runs out.
/// When the guaranteed count covers the request, falling short is an error.
pub fn greedy_packing(
    d: usize,
    s: usize,
    alphabet: usize,
    max_size: usize,
    rng: &mut dyn RngCore,
) -> Result<PackingSet> {
    if s == 0 || s > d || alphabet == 0 || max_size == 0 {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= s <= d, N >= 1 and max_size >= 1, got s={s}, d={d}, N={alphabet}, max_size={max_size}"
        )));
    }
    let required_dist = s.div_ceil(2);
    let guaranteed = if s % 2 == 0 {
        n_star(d, s, alphabet)?.floor() as usize
    } else {
        1
    };
    let target = max_size.min(guaranteed.max(1));

    let mut accepted: Vec<Vec<u16>> = Vec::new();
    let mut support: Vec<usize> = (0..d).collect();
    for _ in 0..GREEDY_BUDGET {
        if accepted.len() >= max_size {
            break;
        }
        // random support, then random nonzero symbols
        for i in 0..s {
            let j = rng.random_range(i..d);
            support.swap(i, j);
        }
        let mut word = vec![0u16; d];
        for &j in &support[..s] {
            word[j] = rng.random_range(1..=alphabet) as u16;
        }
        if accepted.iter().all(|u| hamming(u, &word) >= required_dist) {
            accepted.push(word);
        }
    }
    if accepted.len() < target {
        return Err(Error::PackingShortfall {
            found: accepted.len(),
            target,
        });
    }
    let min_distance = verify_min_distance(&accepted).unwrap_or(d);
    Ok(PackingSet {
        alphabet_size: alphabet,
        codewords: accepted,
        min_distance,
    })
}

/// Exhaustive pairwise minimum Hamming distance; `None` with fewer than two
/// codewords.
pub fn verify_min_distance(codewords: &[Vec<u16>]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in 0..codewords.len() {
        for j in (i + 1)..codewords.len() {
            let dist = hamming(&codewords[i], &codewords[j]);
            best = Some(best.map_or(dist, |b: usize| b.min(dist)));
        }
    }
    best
}

/// Maps a packing to additive functions: the nonzero symbol `v` on
/// coordinate `j` becomes the basis direction `phi_v` scaled to population
/// norm `scale/sqrt(s)`, the zero symbol the zero function. Distinct
/// codewords then satisfy
/// `||g^u - g^v||_2^2 >= scale^2 rho_H(u, v) / s` exactly.
///
/// Every family element must fit inside the unit Hilbert ball, which
/// requires `scale/sqrt(s) <= sqrt(mu_N)`.
pub fn packing_to_functions(
    pack: &PackingSet,
    kernel: &SpectralKernel,
    scale: f64,
) -> Result<Vec<AdditiveCoeffs>> {
    if pack.is_empty() {
        return Ok(Vec::new());
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scale must be positive, got {scale}"
        )));
    }
    let s = pack.sparsity();
    let d = pack.codewords[0].len();
    let m = kernel.m_trunc();
    let available = kernel.rank();
    if pack.alphabet_size > available {
        return Err(Error::InsufficientUnivariateFamily {
            alphabet: pack.alphabet_size,
            available,
        });
    }
    let norm_per_symbol = scale / (s as f64).sqrt();
    let mu_last = kernel.eigenvalues()[pack.alphabet_size - 1];
    if norm_per_symbol > mu_last.sqrt() * (1.0 + 1e-12) {
        // the N-th basis direction cannot carry this norm inside the ball
        let usable = kernel
            .eigenvalues()
            .iter()
            .take_while(|&&mu| norm_per_symbol <= mu.sqrt() * (1.0 + 1e-12))
            .count();
        return Err(Error::InsufficientUnivariateFamily {
            alphabet: pack.alphabet_size,
            available: usable,
        });
    }
    Ok(pack
        .codewords
        .iter()
        .map(|word| {
            let mut coeffs = vec![vec![0.0; m]; d];
            for (j, &symbol) in word.iter().enumerate() {
                if symbol != 0 {
                    coeffs[j][symbol as usize - 1] = norm_per_symbol;
                }
            }
            coeffs
        })
        .collect())
}

/// Exact squared population distance between two additive coefficient
/// arrays.
pub fn additive_l2_distance_sq(a: &AdditiveCoeffs, b: &AdditiveCoeffs) -> f64 {
    a.iter()
        .zip(b)
        .map(|(aj, bj)| {
            aj.iter()
                .zip(bj)
                .map(|(&x, &y)| (x - y) * (x - y))
                .sum::<f64>()
        })
        .sum()
}

/// Testing-error lower bound `max(0, 1 - (32 n delta^2 + log 2) / log_m)`
/// for a packing whose pairwise distances are bounded by a multiple of
/// `delta`.
pub fn fano_bound(n: usize, delta: f64, log_m: f64) -> Result<f64> {
    if !(log_m > 0.0) || !(delta > 0.0) {
        return Err(Error::InvalidParameter(
            "fano_bound needs delta > 0 and log_m > 0".into(),
        ));
    }
    let info = 32.0 * n as f64 * delta * delta + std::f64::consts::LN_2;
    Ok((1.0 - info / log_m).max(0.0))
}

// ---------------------------------------------------------------------------
// Gaussian complexity
// ---------------------------------------------------------------------------

/// Shared per-sample state for the inner maximizations: the two quadratic
/// constraints are simultaneously diagonalized once, after which every inner
/// problem is a one-dimensional dual search.
struct ComplexityProblem {
    /// Eigenvalues of the empirical-seminorm form in Hilbert-ball coords.
    psi: Vec<f64>,
    /// `V' diag(sqrt(mu)) Phi' / n` maps a noise vector straight to the
    /// diagonalized linear functional.
    noise_map: DMatrix<f64>,
}

impl ComplexityProblem {
    fn new(kernel: &SpectralKernel, column: &[f64]) -> Result<Self> {
        let n = column.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty sample column".into()));
        }
        let m = kernel.m_trunc();
        let mut phi = DMatrix::zeros(n, m);
        let mut row = vec![0.0; m];
        for (i, &x) in column.iter().enumerate() {
            SpectralKernel::fill_basis_row(x, &mut row);
            for k in 0..m {
                phi[(i, k)] = row[k];
            }
        }
        // G = diag(sqrt(mu)) (Phi'Phi / n) diag(sqrt(mu))
        let mut weighted = phi.clone();
        for k in 0..m {
            let w = kernel.eigenvalues()[k].sqrt();
            weighted.column_mut(k).scale_mut(w);
        }
        let gram = weighted.tr_mul(&weighted) / n as f64;
        let eig = nalgebra::SymmetricEigen::try_new(gram, 1e-13, 100_000)
            .ok_or(Error::DecompositionFailure { n: m })?;
        let psi: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
        let noise_map = eig.eigenvectors.transpose() * weighted.transpose() / n as f64;
        Ok(Self { psi, noise_map })
    }

    /// `sup { <w, g(x)>/n : ||g||_H <= 1, ||g||_n <= t }` for one noise
    /// draw, through the one-dimensional dual
    /// `min over ratio >= 0 of sqrt(sum v_k^2/(1 + ratio psi_k)) sqrt(1 + ratio t^2)`.
    /// Returns the primal value; the recovered point is feasible and the
    /// duality gap vanishes (Slater holds for t > 0).
    fn inner_sup(&self, v: &DVector<f64>, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0; // convention: the seminorm constraint collapses
        }
        let dual = |ratio: f64| -> f64 {
            let quad: f64 = v
                .iter()
                .zip(&self.psi)
                .map(|(&vk, &pk)| vk * vk / (1.0 + ratio * pk))
                .sum();
            (quad * (1.0 + ratio * t * t)).sqrt()
        };
        // bracket the unimodal dual, then golden-section
        let mut hi = 1.0_f64;
        let mut guard = 0;
        while dual(hi * 2.0) < dual(hi) {
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                break;
            }
        }
        hi *= 2.0;
        let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
        let (mut a, mut b) = (0.0_f64, hi);
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let (mut f1, mut f2) = (dual(x1), dual(x2));
        while (b - a) > 1e-10 * b.max(1.0) {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = dual(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = dual(x2);
            }
        }
        let ratio = 0.5 * (a + b);
        self.primal_value(v, t, ratio)
    }

    /// Feasible primal point from the dual ratio: rescale the dual direction
    /// to whichever constraint binds first.
    fn primal_value(&self, v: &DVector<f64>, t: f64, ratio: f64) -> f64 {
        let mut ball_sq = 0.0;
        let mut semi_sq = 0.0;
        let mut objective = 0.0;
        for (&vk, &pk) in v.iter().zip(&self.psi) {
            let h = vk / (1.0 + ratio * pk);
            ball_sq += h * h;
            semi_sq += pk * h * h;
            objective += vk * h;
        }
        if ball_sq == 0.0 {
            return 0.0;
        }
        let scale_ball = 1.0 / ball_sq.sqrt();
        let scale = if semi_sq > 0.0 {
            scale_ball.min(t / semi_sq.sqrt())
        } else {
            scale_ball
        };
        scale * objective
    }

    /// Constraint residuals of the recovered point, for verification.
    #[cfg(test)]
    fn primal_residuals(&self, v: &DVector<f64>, t: f64, ratio: f64) -> (f64, f64) {
        let mut ball_sq = 0.0;
        let mut semi_sq = 0.0;
        for (&vk, &pk) in v.iter().zip(&self.psi) {
            let h = vk / (1.0 + ratio * pk);
            ball_sq += h * h;
            semi_sq += pk * h * h;
        }
        let scale_sq = if semi_sq > 0.0 {
            (1.0 / ball_sq).min(t * t / semi_sq)
        } else {
            1.0 / ball_sq
        };
        (
            (scale_sq * ball_sq - 1.0).max(0.0),
            (scale_sq * semi_sq - t * t).max(0.0),
        )
    }
}

/// Monte Carlo estimate (mean, standard error) of the local Gaussian
/// complexity `E_w sup { <w, g(x)>/n : ||g||_H <= 1, ||g||_n <= t }` over
/// the given sample column.
pub fn gaussian_complexity_mc(
    kernel: &SpectralKernel,
    column: &[f64],
    t: f64,
    reps: usize,
    rng: &mut dyn RngCore,
) -> Result<(f64, f64)> {
    if reps < 30 {
        return Err(Error::InvalidParameter(format!(
            "need at least 30 Monte Carlo replicates, got {reps}"
        )));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("need t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let problem = ComplexityProblem::new(kernel, column)?;
    let n = column.len();
    let mut values = Vec::with_capacity(reps);
    for _ in 0..reps {
        let w = DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)));
        let v = &problem.noise_map * w;
        values.push(problem.inner_sup(&v, t));
    }
    let mean = values.iter().sum::<f64>() / reps as f64;
    let var = values
        .iter()
        .map(|&x| (x - mean) * (x - mean))
        .sum::<f64>()
        / (reps as f64 - 1.0);
    Ok((mean, (var / reps as f64).sqrt()))
}

/// Empirical frequency of the norm sandwich
/// `||g||_2 / 2 <= ||g||_n <= 3 ||g||_2 / 2` over random unit-ball functions
/// rescaled to population norm at least `t`, each evaluated on a fresh
/// uniform sample of size `n`. Requires `t` at or above the critical rate.
pub fn sandwich_check(
    kernel: &SpectralKernel,
    n: usize,
    trials: usize,
    t: f64,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    if trials == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "need n >= 1 and at least one trial".into(),
        ));
    }
    let eps_n = critical_rate(kernel, n)?;
    if t < eps_n {
        return Err(Error::InvalidParameter(format!(
            "t = {t} is below the critical radius {eps_n}"
        )));
    }
    let m = kernel.m_trunc();
    let mut row = vec![0.0; m];
    let mut hits = 0usize;
    for _ in 0..trials {
        let mut coeffs = random_unit_ball_function(kernel, 1.0, rng)?;
        let mut l2 = coeffs.iter().map(|&a| a * a).sum::<f64>().sqrt();
        if l2 < t {
            let scale = t / l2;
            for a in &mut coeffs {
                *a *= scale;
            }
            l2 = t;
        }
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x: f64 = rng.random();
            SpectralKernel::fill_basis_row(x, &mut row);
            let g: f64 = coeffs.iter().zip(&row).map(|(&a, &p)| a * p).sum();
            sum_sq += g * g;
        }
        let gn = (sum_sq / n as f64).sqrt();
        if gn >= 0.5 * l2 && gn <= 1.5 * l2 {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}
