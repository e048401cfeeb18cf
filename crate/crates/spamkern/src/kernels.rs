//! Univariate Mercer kernels given by explicit eigen-expansions.
//!
//! Every kernel here is a truncated Mercer sum over the mean-zero cosine
//! family on `[0,1]` with the uniform base measure,
//!
//! ```text
//! K(x, y) = sum_{k=1..M} mu_k * phi_k(x) * phi_k(y),   phi_k(x) = sqrt(2) cos(2 pi k x).
//! ```
//!
//! The `phi_k` are orthonormal in L2(uniform), each integrates to zero, and
//! `|phi_k| <= sqrt(2)` everywhere, so Hilbert norms, population L2 norms and
//! sup-norm bounds are all available in closed form from the coefficients.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Uniform bound on every basis function: `sup_x |phi_k(x)| = sqrt(2)`.
pub const BASIS_SUP_BOUND: f64 = std::f64::consts::SQRT_2;

/// Grid resolution used by [`SpectralKernel::sup_bound`].
pub const SUP_GRID_POINTS: usize = 10_001;

/// Relative cutoff below which Gram eigenvalues are treated as zero rank.
pub(crate) const RANK_CUT_REL: f64 = 1e-12;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// A univariate Mercer kernel defined by a nonincreasing, nonnegative
/// eigenvalue sequence over the cosine basis. The truncation level is the
/// length of the sequence; finite-rank kernels carry no tail at all.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralKernel {
    eigenvalues: Vec<f64>,
}

impl SpectralKernel {
    /// Kernel with polynomial eigendecay `mu_k = k^(-2 alpha)`, truncated at
    /// `m_trunc` terms. Requires `alpha > 1/2` so the eigenvalues are summable.
    pub fn sobolev(alpha: f64, m_trunc: usize) -> Result<Self> {
        if !(alpha > 0.5) {
            return Err(Error::InvalidParameter(format!(
                "sobolev decay needs alpha > 1/2, got {alpha}"
            )));
        }
        if m_trunc == 0 {
            return Err(Error::InvalidParameter("m_trunc must be >= 1".into()));
        }
        let eigenvalues = (1..=m_trunc)
            .map(|k| (k as f64).powf(-2.0 * alpha))
            .collect();
        Ok(Self { eigenvalues })
    }

    /// Rank-`m` kernel with unit eigenvalues `mu_1 = ... = mu_m = 1`.
    pub fn finite_rank(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("rank must be >= 1".into()));
        }
        Ok(Self {
            eigenvalues: vec![1.0; m],
        })
    }

    /// Kernel from an explicit eigenvalue sequence (nonincreasing, >= 0).
    pub fn from_eigenvalues(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidParameter("empty eigenvalue sequence".into()));
        }
        for w in eigenvalues.windows(2) {
            if w[1] > w[0] {
                return Err(Error::InvalidParameter(
                    "eigenvalues must be nonincreasing".into(),
                ));
            }
        }
        if eigenvalues.iter().any(|&m| m < 0.0 || !m.is_finite()) {
            return Err(Error::InvalidParameter(
                "eigenvalues must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Number of retained eigenpairs.
    pub fn m_trunc(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Number of strictly positive eigenvalues.
    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().filter(|&&m| m > 0.0).count()
    }

    /// Fills `out[k-1] = phi_k(x)` for `k = 1..=out.len()`.
    ///
    /// Uses the three-term cosine recurrence
    /// `cos((k+1)t) = 2 cos(t) cos(kt) - cos((k-1)t)`, so one `cos` call
    /// serves the whole row. The recurrence is pure arithmetic, which keeps
    /// basis evaluation deterministic across runs.
    pub fn fill_basis_row(x: f64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        let t = TWO_PI * x;
        let c1 = t.cos();
        let mut prev = 1.0; // cos(0)
        let mut cur = c1; // cos(t)
        out[0] = BASIS_SUP_BOUND * cur;
        for slot in out.iter_mut().skip(1) {
            let next = 2.0 * c1 * cur - prev;
            prev = cur;
            cur = next;
            *slot = BASIS_SUP_BOUND * cur;
        }
    }

    /// `phi_k(x)` for a single index `k >= 1`.
    pub fn basis_eval(k: usize, x: f64) -> f64 {
        BASIS_SUP_BOUND * (TWO_PI * k as f64 * x).cos()
    }

    /// Mercer-sum evaluation `K(x, y)`. Errors if either argument leaves
    /// `[0,1]`. Each term is grouped as `mu * (phi(x) * phi(y))`, which makes
    /// the result bitwise symmetric in `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        for &v in &[x, y] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(v));
            }
        }
        let m = self.m_trunc();
        let mut bx = vec![0.0; m];
        let mut by = vec![0.0; m];
        Self::fill_basis_row(x, &mut bx);
        Self::fill_basis_row(y, &mut by);
        let mut acc = 0.0;
        for k in 0..m {
            acc += self.eigenvalues[k] * (bx[k] * by[k]);
        }
        Ok(acc)
    }

    /// Squared Hilbert norm `sum_k a_k^2 / mu_k` of a coefficient vector in
    /// the eigenbasis. Terms with `mu_k = 0` must carry `a_k = 0`.
    pub fn hilbert_norm_sq(&self, coeffs: &[f64]) -> Result<f64> {
        if coeffs.len() > self.m_trunc() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a kernel truncated at {}",
                coeffs.len(),
                self.m_trunc()
            )));
        }
        let mut acc = 0.0;
        for (k, &a) in coeffs.iter().enumerate() {
            let mu = self.eigenvalues[k];
            if mu == 0.0 {
                if a != 0.0 {
                    return Err(Error::InfeasibleCoefficient { index: k });
                }
            } else {
                acc += a * a / mu;
            }
        }
        Ok(acc)
    }

    /// Grid estimate (10,001 points) of `sup_x sqrt(K(x, x))`: the constant
    /// relating sup norm to Hilbert norm for unit-ball functions. No claim of
    /// exactness between grid points is made.
    pub fn sup_bound(&self) -> f64 {
        let m = self.m_trunc();
        let mut row = vec![0.0; m];
        let mut best = 0.0_f64;
        for i in 0..SUP_GRID_POINTS {
            let x = i as f64 / (SUP_GRID_POINTS - 1) as f64;
            Self::fill_basis_row(x, &mut row);
            let mut diag = 0.0;
            for k in 0..m {
                diag += self.eigenvalues[k] * (row[k] * row[k]);
            }
            best = best.max(diag);
        }
        best.sqrt()
    }

    /// `n x m_trunc` matrix of basis values `phi_k(x_i)` for a sample column.
    pub(crate) fn basis_matrix(&self, column: &[f64]) -> DMatrix<f64> {
        let n = column.len();
        let m = self.m_trunc();
        let mut phi = DMatrix::zeros(n, m);
        let mut row = vec![0.0; m];
        for (i, &x) in column.iter().enumerate() {
            Self::fill_basis_row(x, &mut row);
            for k in 0..m {
                phi[(i, k)] = row[k];
            }
        }
        phi
    }
}

/// Empirical kernel matrix for one coordinate, with its symmetric
/// eigendecomposition. `matrix = orthonormal_factor * diag(spectrum) *
/// orthonormal_factor^T` up to a 1e-8 relative Frobenius tolerance; negative
/// roundoff eigenvalues are clamped to zero.
#[derive(Debug, Clone)]
pub struct GramFactor {
    pub matrix: DMatrix<f64>,
    pub orthonormal_factor: DMatrix<f64>,
    pub spectrum: Vec<f64>,
}

impl GramFactor {
    /// Builds the Gram matrix entrywise through [`SpectralKernel::eval`]
    /// (same code path as scalar evaluation) and factors it.
    pub fn compute(kernel: &SpectralKernel, column: &[f64]) -> Result<Self> {
        let n = column.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty sample column".into()));
        }
        let mut matrix = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = kernel.eval(column[i], column[j])?;
                matrix[(i, j)] = v;
                matrix[(j, i)] = v;
            }
        }
        let eig = nalgebra::SymmetricEigen::try_new(matrix.clone(), 1e-13, 100_000)
            .ok_or(Error::DecompositionFailure { n })?;
        // sort eigenpairs by descending eigenvalue, clamping roundoff negatives
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut orthonormal_factor = DMatrix::zeros(n, n);
        let mut spectrum = Vec::with_capacity(n);
        for (dst, &src) in order.iter().enumerate() {
            orthonormal_factor.set_column(dst, &eig.eigenvectors.column(src));
            spectrum.push(eig.eigenvalues[src].max(0.0));
        }
        Ok(Self {
            matrix,
            orthonormal_factor,
            spectrum,
        })
    }

    /// Relative Frobenius error of the `U D U^T` reconstruction.
    pub fn reconstruction_error(&self) -> f64 {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.spectrum.clone()));
        let rebuilt = &self.orthonormal_factor * d * self.orthonormal_factor.transpose();
        let denom = self.matrix.norm().max(f64::MIN_POSITIVE);
        (&rebuilt - &self.matrix).norm() / denom
    }
}

/// Lean per-coordinate factorization used by the solver: only the positive
/// part of the Gram spectrum, carried as `scaled_basis = U * diag(sqrt(d))`
/// so that in-sample values of a block are `scaled_basis * beta`.
#[derive(Debug, Clone)]
pub(crate) struct GramSpectral {
    /// `n x r` matrix with orthogonal columns of squared norm `spectrum[i]`.
    pub scaled_basis: DMatrix<f64>,
    /// Positive Gram eigenvalues, descending.
    pub spectrum: Vec<f64>,
}

impl GramSpectral {
    /// Factors the Gram matrix of `column` without materializing it when the
    /// truncation level is below `n`: the `n x n` problem is then equivalent
    /// to an `M x M` one through the basis factor `A = Phi diag(sqrt(mu))`,
    /// since `K = A A^T` and `B = A^T A` share nonzero eigenvalues.
    pub fn compute(kernel: &SpectralKernel, column: &[f64]) -> Result<Self> {
        let n = column.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty sample column".into()));
        }
        let m = kernel.m_trunc();
        let phi = kernel.basis_matrix(column);
        let mut a = phi;
        for k in 0..m {
            let s = kernel.eigenvalues()[k].sqrt();
            a.column_mut(k).scale_mut(s);
        }
        if n <= m {
            let gram = &a * a.transpose();
            let eig = nalgebra::SymmetricEigen::try_new(gram, 1e-13, 100_000)
                .ok_or(Error::DecompositionFailure { n })?;
            Self::from_eigen(eig.eigenvalues.as_slice(), &eig.eigenvectors, None)
        } else {
            let small = a.transpose() * &a;
            let eig = nalgebra::SymmetricEigen::try_new(small, 1e-13, 100_000)
                .ok_or(Error::DecompositionFailure { n: m })?;
            Self::from_eigen(eig.eigenvalues.as_slice(), &eig.eigenvectors, Some(&a))
        }
    }

    fn from_eigen(
        values: &[f64],
        vectors: &DMatrix<f64>,
        back_map: Option<&DMatrix<f64>>,
    ) -> Result<Self> {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let lambda_max = values[order[0]].max(0.0);
        let cut = lambda_max * RANK_CUT_REL;
        let kept: Vec<usize> = order
            .into_iter()
            .take_while(|&i| values[i] > cut && values[i] > 0.0)
            .collect();
        let spectrum: Vec<f64> = kept.iter().map(|&i| values[i]).collect();
        let rows = back_map.map_or(vectors.nrows(), |a| a.nrows());
        let mut scaled_basis = DMatrix::zeros(rows, kept.len());
        for (dst, &src) in kept.iter().enumerate() {
            match back_map {
                // direct route: column = u * sqrt(lambda)
                None => {
                    let mut col = vectors.column(src).clone_owned();
                    col.scale_mut(values[src].sqrt());
                    scaled_basis.set_column(dst, &col);
                }
                // factored route: A w has squared norm lambda already
                Some(a) => {
                    let col = a * vectors.column(src);
                    scaled_basis.set_column(dst, &col);
                }
            }
        }
        Ok(Self {
            scaled_basis,
            spectrum,
        })
    }

    pub fn rank(&self) -> usize {
        self.spectrum.len()
    }
}
