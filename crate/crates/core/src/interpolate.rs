//! Gaussian RBF out-of-sample interpolation: exact-fit and
//! ridge-regularized coefficient solves, evaluation, and the regularity
//! statistics feeding the generalization bounds.

use crate::error::{Error, Result};
use crate::numerics::{solve_spd, DenseMatrix};

/// Gaussian RBF map from ambient space to the embedded space. Kernel
/// centers are the (deduplicated) training points; the kernel is
/// `phi(r) = exp(-r^2 / sigma^2)`.
#[derive(Debug, Clone)]
pub struct RbfInterpolator {
    centers: DenseMatrix,
    coeffs: DenseMatrix,
    sigma: f64,
    ridge: f64,
}

/// Regularity of a fitted interpolator relative to an embedding.
#[derive(Debug, Clone, Copy)]
pub struct RegularityStats {
    /// Largest absolute coefficient column sum over embedding dimensions.
    pub coeff_bound: f64,
    /// Lipschitz constant of the Gaussian kernel at this sigma.
    pub kernel_lipschitz: f64,
    /// Largest embedded distance between same-class training points within
    /// ambient distance `delta` (0 when no pair qualifies).
    pub codiameter: f64,
}

#[inline]
fn gaussian(r: f64, sigma: f64) -> f64 {
    (-r * r / (sigma * sigma)).exp()
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Fits coefficients so every center maps to its embedding coordinates:
/// one linear solve of the kernel matrix per embedding dimension, with an
/// optional ridge. Duplicate training points are collapsed (targets
/// averaged) before solving since they make the kernel matrix singular.
pub fn fit(points: &DenseMatrix, targets: &DenseMatrix, sigma: f64, ridge: f64) -> Result<RbfInterpolator> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::BadParam(format!("sigma must be finite and > 0, got {sigma}")));
    }
    if !ridge.is_finite() || ridge < 0.0 {
        return Err(Error::BadParam(format!("ridge must be finite and >= 0, got {ridge}")));
    }
    if points.rows() != targets.rows() {
        return Err(Error::DimensionMismatch { expected: points.rows(), got: targets.rows() });
    }
    if points.rows() == 0 {
        return Err(Error::EmptyDataset);
    }

    // collapse exact duplicates, averaging their targets
    let n = points.rows();
    let mut rep_of: Vec<usize> = Vec::with_capacity(n);
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        let mut found = None;
        for (slot, &r) in reps.iter().enumerate() {
            if points.row(i) == points.row(r) {
                found = Some(slot);
                break;
            }
        }
        match found {
            Some(slot) => rep_of.push(slot),
            None => {
                rep_of.push(reps.len());
                reps.push(i);
            }
        }
    }
    let m = reps.len();
    let d = targets.cols();
    let mut centers = DenseMatrix::zeros(m, points.cols());
    for (slot, &r) in reps.iter().enumerate() {
        for j in 0..points.cols() {
            centers.set(slot, j, points.get(r, j));
        }
    }
    let mut y = DenseMatrix::zeros(m, d);
    let mut counts = vec![0usize; m];
    for i in 0..n {
        let slot = rep_of[i];
        counts[slot] += 1;
        for j in 0..d {
            y.set(slot, j, y.get(slot, j) + targets.get(i, j));
        }
    }
    for slot in 0..m {
        for j in 0..d {
            y.set(slot, j, y.get(slot, j) / counts[slot] as f64);
        }
    }

    let mut phi = DenseMatrix::zeros(m, m);
    for i in 0..m {
        phi.set(i, i, 1.0);
        for j in (i + 1)..m {
            let w = gaussian(euclid(centers.row(i), centers.row(j)), sigma);
            phi.set(i, j, w);
            phi.set(j, i, w);
        }
    }
    let coeffs = solve_spd(&phi, &y, ridge)?;
    Ok(RbfInterpolator { centers, coeffs, sigma, ridge })
}

impl RbfInterpolator {
    pub fn centers(&self) -> &DenseMatrix {
        &self.centers
    }

    pub fn coeffs(&self) -> &DenseMatrix {
        &self.coeffs
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn dim(&self) -> usize {
        self.coeffs.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.centers.cols()
    }

    /// Maps one ambient point into the embedded space.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.centers.cols() {
            return Err(Error::DimensionMismatch { expected: self.centers.cols(), got: x.len() });
        }
        let d = self.dim();
        let mut out = vec![0.0; d];
        for i in 0..self.centers.rows() {
            let w = gaussian(euclid(x, self.centers.row(i)), self.sigma);
            if w == 0.0 {
                continue;
            }
            for k in 0..d {
                out[k] += self.coeffs.get(i, k) * w;
            }
        }
        Ok(out)
    }

    /// Maps every row of `xs`.
    pub fn eval_rows(&self, xs: &DenseMatrix) -> Result<DenseMatrix> {
        let mut out = DenseMatrix::zeros(xs.rows(), self.dim());
        for i in 0..xs.rows() {
            let y = self.eval(xs.row(i))?;
            for k in 0..y.len() {
                out.set(i, k, y[k]);
            }
        }
        Ok(out)
    }

    /// Tightest coefficient bound valid for every embedding dimension:
    /// the largest absolute column sum of the coefficient matrix.
    pub fn coeff_bound(&self) -> f64 {
        let mut best = 0.0_f64;
        for k in 0..self.coeffs.cols() {
            let s: f64 = (0..self.coeffs.rows()).map(|i| self.coeffs.get(i, k).abs()).sum();
            best = best.max(s);
        }
        best
    }

    /// Regularity statistics relative to the training set the interpolator
    /// was fitted on: coefficient bound, kernel Lipschitz constant, and the
    /// embedding co-diameter at ambient scale `delta`.
    pub fn regularity(
        &self,
        points: &DenseMatrix,
        labels: &[usize],
        targets: &DenseMatrix,
        delta: f64,
    ) -> Result<RegularityStats> {
        if delta.is_nan() || delta <= 0.0 {
            return Err(Error::BadParam(format!("delta must be > 0, got {delta}")));
        }
        if points.rows() != labels.len() || points.rows() != targets.rows() {
            return Err(Error::DimensionMismatch { expected: points.rows(), got: labels.len() });
        }
        let mut codiameter = 0.0_f64;
        for i in 0..points.rows() {
            for j in (i + 1)..points.rows() {
                if labels[i] != labels[j] {
                    continue;
                }
                if euclid(points.row(i), points.row(j)) <= delta {
                    codiameter = codiameter.max(euclid(targets.row(i), targets.row(j)));
                }
            }
        }
        Ok(RegularityStats {
            coeff_bound: self.coeff_bound(),
            kernel_lipschitz: gaussian_lipschitz(self.sigma)?,
            codiameter,
        })
    }
}

/// Lipschitz constant of the Gaussian kernel `exp(-r^2/sigma^2)`: the
/// slope extremum sits at `r = sigma / sqrt(2)`, giving
/// `sqrt(2) e^{-1/2} / sigma`.
pub fn gaussian_lipschitz(sigma: f64) -> Result<f64> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::BadParam(format!("sigma must be finite and > 0, got {sigma}")));
    }
    Ok(std::f64::consts::SQRT_2 * (-0.5_f64).exp() / sigma)
}

/// Default ridge for the regularized configuration: `1e-6 tr(Phi) / N`.
/// The Gaussian kernel matrix has a unit diagonal, so this is exactly 1e-6.
pub fn default_ridge() -> f64 {
    1e-6
}
