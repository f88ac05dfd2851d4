//! Dense linear algebra kernel: row-major matrices, cyclic Jacobi
//! eigendecomposition for symmetric matrices, Cholesky solves with an
//! optional ridge, and the spectral operator norm.
//!
//! Everything here is self-contained and sized for dense problems up to a
//! few thousand rows.

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting shape mismatches and
    /// non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadShape { rows, cols, len: data.len() });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::BadShape { rows: r, cols: c, len: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(r, c, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, got: other.rows * other.cols });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(DenseMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, got: other.rows * other.cols });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(DenseMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scaled(&self, s: f64) -> Self {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest absolute difference between the matrix and its transpose.
    pub fn symmetry_deviation(&self) -> f64 {
        let mut dev = 0.0_f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols.min(self.rows) {
                dev = dev.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        dev
    }
}

/// Full eigendecomposition of a symmetric matrix: ascending eigenvalues with
/// matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    values: Vec<f64>,
    vectors: DenseMatrix,
}

impl EigenPairs {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvectors as columns, same order as `values`.
    pub fn vectors(&self) -> &DenseMatrix {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.col(k)
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// `tol` both gates the symmetry check on the input and sets the convergence
/// target: the returned pairs satisfy `||A v - lambda v|| <= tol * ||A||_F`.
pub fn symmetric_eig(a: &DenseMatrix, tol: f64) -> Result<EigenPairs> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let tol = if tol > 0.0 { tol } else { 1e-10 };
    let dev = a.symmetry_deviation();
    let sym_limit = tol * a.max_abs().max(1.0);
    if dev > sym_limit {
        return Err(Error::NotSymmetric { deviation: dev, tol: sym_limit });
    }

    // Work on the symmetrized copy so the iteration sees an exactly
    // symmetric matrix.
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, i, a.get(i, i));
        for j in (i + 1)..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    let mut v = DenseMatrix::identity(n);
    let fro = m.frobenius_norm();

    if fro > 0.0 && n > 1 {
        let target = 0.1 * tol.min(1e-10) * fro;
        let mut converged = false;
        let max_sweeps = 100;
        let mut last_off = f64::INFINITY;
        for sweep in 0..max_sweeps {
            let mut off = 0.0_f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += 2.0 * m.get(i, j) * m.get(i, j);
                }
            }
            let off = off.sqrt();
            if off <= target {
                converged = true;
                break;
            }
            if sweep == max_sweeps - 1 {
                last_off = off;
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = m.get(p, q);
                    if apq.abs() <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let app = m.get(p, p);
                    let aqq = m.get(q, q);
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = if tau.abs() > 1e150 {
                        1.0 / (2.0 * tau)
                    } else if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        1.0 / (tau - (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        if k == p || k == q {
                            continue;
                        }
                        let mkp = m.get(k, p);
                        let mkq = m.get(k, q);
                        let new_p = c * mkp - s * mkq;
                        let new_q = s * mkp + c * mkq;
                        m.set(k, p, new_p);
                        m.set(p, k, new_p);
                        m.set(k, q, new_q);
                        m.set(q, k, new_q);
                    }
                    m.set(p, p, app - t * apq);
                    m.set(q, q, aqq + t * apq);
                    m.set(p, q, 0.0);
                    m.set(q, p, 0.0);
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        if !converged {
            return Err(Error::EigenConvergence { sweeps: max_sweeps, off: last_off });
        }
    }

    // Sort ascending, permuting eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_col, v.get(r, old_col));
        }
    }
    Ok(EigenPairs { values, vectors })
}

/// Solves `(A + ridge I) X = B` for symmetric positive definite `A` by
/// Cholesky factorization with two steps of iterative refinement.
///
/// Fails with a message telling the caller to raise `ridge` when the system
/// is singular at the given ridge.
pub fn solve_spd(a: &DenseMatrix, b: &DenseMatrix, ridge: f64) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: b.rows() });
    }
    if !ridge.is_finite() || ridge < 0.0 {
        return Err(Error::BadParam(format!("ridge must be finite and >= 0, got {ridge}")));
    }
    let n = a.rows();
    let mut m = a.clone();
    for i in 0..n {
        m.set(i, i, m.get(i, i) + ridge);
    }

    // Cholesky factor, lower triangle.
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if d.is_nan() || d <= 0.0 {
            return Err(Error::SingularSystem { pivot: j });
        }
        let djj = d.sqrt();
        l.set(j, j, djj);
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / djj);
        }
    }

    let chol_solve = |rhs: &DenseMatrix| -> DenseMatrix {
        let cols = rhs.cols();
        let mut x = rhs.clone();
        for c in 0..cols {
            // forward: L y = rhs
            for i in 0..n {
                let mut s = x.get(i, c);
                for k in 0..i {
                    s -= l.get(i, k) * x.get(k, c);
                }
                x.set(i, c, s / l.get(i, i));
            }
            // backward: L^T x = y
            for i in (0..n).rev() {
                let mut s = x.get(i, c);
                for k in (i + 1)..n {
                    s -= l.get(k, i) * x.get(k, c);
                }
                x.set(i, c, s / l.get(i, i));
            }
        }
        x
    };

    // iterative refinement until the residual stalls or drops below target
    let scale = b.frobenius_norm();
    let mut x = chol_solve(b);
    let mut residual = b.sub(&m.matmul(&x)?)?.frobenius_norm();
    for _ in 0..25 {
        if residual <= 1e-10 * scale {
            break;
        }
        let r = b.sub(&m.matmul(&x)?)?;
        let candidate = x.add(&chol_solve(&r))?;
        let next = b.sub(&m.matmul(&candidate)?)?.frobenius_norm();
        if next >= residual {
            break;
        }
        x = candidate;
        residual = next;
    }
    if scale > 0.0 && residual > 1e-8 * scale {
        return Err(Error::SolveResidual { residual: residual / scale });
    }
    Ok(x)
}

/// Largest singular value, computed by power iteration on `A^T A`.
pub fn operator_norm(a: &DenseMatrix) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    if a.frobenius_norm() == 0.0 {
        return Ok(0.0);
    }
    let b = a.transpose().matmul(a)?;
    let n = b.rows();
    if n == 1 {
        return Ok(b.get(0, 0).max(0.0).sqrt());
    }

    // Deterministic pseudo-random start vector keeps runs reproducible.
    let mut v: Vec<f64> = (0..n).map(|i| 0.5 + crate::rng::mix64(i as u64 + 1) as f64 / u64::MAX as f64).collect();
    let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm0);

    let mut lambda = 0.0_f64;
    for _ in 0..50_000 {
        let mut w = vec![0.0; n];
        for i in 0..n {
            let row = b.row(i);
            w[i] = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            // v landed in the null space; the norm is dominated elsewhere,
            // restart from a shifted vector.
            v = (0..n).map(|i| 0.5 + crate::rng::mix64(i as u64 + 7919) as f64 / u64::MAX as f64).collect();
            let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= s);
            continue;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        let change = (norm - lambda).abs();
        lambda = norm;
        v = w;
        if change <= 1e-13 * lambda.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(lambda.max(0.0).sqrt())
}

/// General square solve by LU with partial pivoting. Used internally for the
/// small systems arising in hull-distance corrections.
pub(crate) fn solve_general(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: b.rows() });
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut x = b.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut pivot = col;
        let mut best = lu.get(col, col).abs();
        for r in (col + 1)..n {
            let v = lu.get(r, col).abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best <= f64::MIN_POSITIVE {
            return Err(Error::SingularSystem { pivot: col });
        }
        if pivot != col {
            for j in 0..n {
                let tmp = lu.get(col, j);
                lu.set(col, j, lu.get(pivot, j));
                lu.set(pivot, j, tmp);
            }
            for j in 0..x.cols() {
                let tmp = x.get(col, j);
                x.set(col, j, x.get(pivot, j));
                x.set(pivot, j, tmp);
            }
            perm.swap(col, pivot);
        }
        let d = lu.get(col, col);
        for r in (col + 1)..n {
            let f = lu.get(r, col) / d;
            if f == 0.0 {
                continue;
            }
            lu.set(r, col, 0.0);
            for j in (col + 1)..n {
                lu.set(r, j, lu.get(r, j) - f * lu.get(col, j));
            }
            for j in 0..x.cols() {
                x.set(r, j, x.get(r, j) - f * x.get(col, j));
            }
        }
    }
    for c in 0..x.cols() {
        for i in (0..n).rev() {
            let mut s = x.get(i, c);
            for k in (i + 1)..n {
                s -= lu.get(i, k) * x.get(k, c);
            }
            x.set(i, c, s / lu.get(i, i));
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn random_symmetric(n: usize, rng: &mut CounterRng) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = rng.next_range(-1.0, 1.0);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    /// Counts eigenvalues strictly below `x` via the inertia of the LDL^T
    /// factorization of `A - x I`. Independent of the Jacobi path.
    fn count_eigs_below(a: &DenseMatrix, x: f64) -> usize {
        let n = a.rows();
        let mut m = a.clone();
        for i in 0..n {
            m.set(i, i, m.get(i, i) - x);
        }
        // plain symmetric elimination; perturb x slightly when a pivot dies
        let mut neg = 0;
        for k in 0..n {
            let pivot = m.get(k, k);
            if pivot.abs() < 1e-13 {
                return count_eigs_below(a, x + 3e-12);
            }
            if pivot < 0.0 {
                neg += 1;
            }
            for i in (k + 1)..n {
                let f = m.get(i, k) / pivot;
                for j in (k + 1)..n {
                    m.set(i, j, m.get(i, j) - f * m.get(k, j));
                }
            }
        }
        neg
    }

    /// Bisection oracle: isolates the k-th smallest eigenvalue by counting.
    fn bisect_eigenvalue(a: &DenseMatrix, k: usize) -> f64 {
        let n = a.rows();
        // Gershgorin bounds
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r: f64 = (0..n).filter(|&j| j != i).map(|j| a.get(i, j).abs()).sum();
            lo = lo.min(a.get(i, i) - r);
            hi = hi.max(a.get(i, i) + r);
        }
        let (mut lo, mut hi) = (lo - 1.0, hi + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count_eigs_below(a, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn gauss_jordan_inverse(a: &DenseMatrix) -> DenseMatrix {
        let n = a.rows();
        let mut aug = DenseMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, a.get(i, j));
            }
            aug.set(i, n + i, 1.0);
        }
        for col in 0..n {
            let mut pivot = col;
            for r in (col + 1)..n {
                if aug.get(r, col).abs() > aug.get(pivot, col).abs() {
                    pivot = r;
                }
            }
            for j in 0..2 * n {
                let tmp = aug.get(col, j);
                aug.set(col, j, aug.get(pivot, j));
                aug.set(pivot, j, tmp);
            }
            let d = aug.get(col, col);
            for j in 0..2 * n {
                aug.set(col, j, aug.get(col, j) / d);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = aug.get(r, col);
                for j in 0..2 * n {
                    aug.set(r, j, aug.get(r, j) - f * aug.get(col, j));
                }
            }
        }
        let mut inv = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j));
            }
        }
        inv
    }

    #[test]
    fn two_node_laplacian_spectrum() {
        let a = DenseMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let eig = symmetric_eig(&a, 1e-10).unwrap();
        assert!((eig.values()[0] - 0.0).abs() <= 1e-12);
        assert!((eig.values()[1] - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn identity_spectrum() {
        let eig = symmetric_eig(&DenseMatrix::identity(3), 1e-10).unwrap();
        for v in eig.values() {
            assert!((v - 1.0).abs() <= 1e-14);
        }
        // any orthonormal basis is fine; check orthonormality
        let v = eig.vectors();
        let vtv = v.transpose().matmul(v).unwrap();
        let dev = vtv.sub(&DenseMatrix::identity(3)).unwrap().max_abs();
        assert!(dev <= 1e-12);
    }

    #[test]
    fn tridiagonal_known_spectrum() {
        // eigenvalues of [[2,1,0],[1,2,1],[0,1,2]] are 2 - sqrt(2), 2, 2 + sqrt(2)
        let a = DenseMatrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ])
        .unwrap();
        let eig = symmetric_eig(&a, 1e-10).unwrap();
        let expect = [2.0 - std::f64::consts::SQRT_2, 2.0, 2.0 + std::f64::consts::SQRT_2];
        for (got, want) in eig.values().iter().zip(expect) {
            assert!((got - want).abs() <= 1e-12, "got {got}, want {want}");
        }
    }

    #[test]
    fn random_symmetric_matches_bisection_oracle() {
        let mut rng = CounterRng::new(42, 0);
        for _ in 0..5 {
            let a = random_symmetric(6, &mut rng);
            let eig = symmetric_eig(&a, 1e-10).unwrap();
            for k in 0..6 {
                let oracle = bisect_eigenvalue(&a, k);
                assert!(
                    (eig.values()[k] - oracle).abs() <= 1e-8,
                    "eigenvalue {k}: jacobi {} vs bisection {oracle}",
                    eig.values()[k]
                );
            }
        }
    }

    #[test]
    fn eigen_residual_and_orthonormality() {
        let mut rng = CounterRng::new(7, 0);
        for n in [2usize, 5, 11, 20] {
            let a = random_symmetric(n, &mut rng);
            let eig = symmetric_eig(&a, 1e-10).unwrap();
            let fro = a.frobenius_norm();
            for k in 0..n {
                let v = eig.vector(k);
                let mut resid = 0.0_f64;
                for i in 0..n {
                    let av: f64 = (0..n).map(|j| a.get(i, j) * v[j]).sum();
                    resid += (av - eig.values()[k] * v[i]).powi(2);
                }
                assert!(resid.sqrt() <= 1e-8 * fro);
            }
            let vt = eig.vectors().transpose();
            let dev = vt.matmul(eig.vectors()).unwrap().sub(&DenseMatrix::identity(n)).unwrap().max_abs();
            assert!(dev <= 1e-8);
            // spectral reconstruction
            let mut lam = DenseMatrix::zeros(n, n);
            for k in 0..n {
                lam.set(k, k, eig.values()[k]);
            }
            let rebuilt = eig.vectors().matmul(&lam).unwrap().matmul(&vt).unwrap();
            assert!(rebuilt.sub(&a).unwrap().frobenius_norm() <= 1e-7 * fro.max(1e-300));
        }
    }

    #[test]
    fn eig_rejects_asymmetric_and_nonsquare() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(symmetric_eig(&a, 1e-10), Err(Error::NotSymmetric { .. })));
        let b = DenseMatrix::zeros(2, 3);
        assert!(matches!(symmetric_eig(&b, 1e-10), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn solve_identity_is_rhs() {
        let b = DenseMatrix::from_rows(&[vec![1.5], vec![-2.0], vec![0.25]]).unwrap();
        let x = solve_spd(&DenseMatrix::identity(3), &b, 0.0).unwrap();
        assert!(x.sub(&b).unwrap().max_abs() <= 1e-14);
    }

    #[test]
    fn solve_diagonal_example() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![2.0], vec![8.0]]).unwrap();
        let x = solve_spd(&a, &b, 0.0).unwrap();
        assert!((x.get(0, 0) - 1.0).abs() <= 1e-14);
        assert!((x.get(1, 0) - 2.0).abs() <= 1e-14);
    }

    #[test]
    fn solve_matches_explicit_inverse() {
        let mut rng = CounterRng::new(11, 0);
        for _ in 0..4 {
            // random SPD via G G^T + I
            let g = random_symmetric(8, &mut rng);
            let a = g.matmul(&g.transpose()).unwrap().add(&DenseMatrix::identity(8)).unwrap();
            let mut bdata = Vec::new();
            for _ in 0..8 {
                bdata.push(vec![rng.next_range(-2.0, 2.0), rng.next_range(-2.0, 2.0)]);
            }
            let b = DenseMatrix::from_rows(&bdata).unwrap();
            let x = solve_spd(&a, &b, 0.0).unwrap();
            let oracle = gauss_jordan_inverse(&a).matmul(&b).unwrap();
            assert!(x.sub(&oracle).unwrap().max_abs() <= 1e-9);
            let resid = a.matmul(&x).unwrap().sub(&b).unwrap().frobenius_norm();
            assert!(resid <= 1e-8 * b.frobenius_norm());
        }
    }

    #[test]
    fn solve_singular_instructs_ridge() {
        let a = DenseMatrix::zeros(2, 2);
        let b = DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let err = solve_spd(&a, &b, 0.0).unwrap_err();
        assert!(err.to_string().contains("ridge"));
        // ridge rescues it
        let x = solve_spd(&a, &b, 2.0).unwrap();
        assert!((x.get(0, 0) - 0.5).abs() <= 1e-14);
    }

    #[test]
    fn operator_norm_cases() {
        assert_eq!(operator_norm(&DenseMatrix::zeros(3, 3)).unwrap(), 0.0);
        let d = DenseMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, -5.0]]).unwrap();
        assert!((operator_norm(&d).unwrap() - 5.0).abs() <= 1e-10);
    }

    #[test]
    fn operator_norm_matches_eigensolver() {
        let mut rng = CounterRng::new(3, 0);
        for _ in 0..5 {
            let mut a = DenseMatrix::zeros(5, 5);
            for i in 0..5 {
                for j in 0..5 {
                    a.set(i, j, rng.next_range(-1.0, 1.0));
                }
            }
            let got = operator_norm(&a).unwrap();
            let ata = a.transpose().matmul(&a).unwrap();
            let eig = symmetric_eig(&ata, 1e-12).unwrap();
            let oracle = eig.values().last().unwrap().max(0.0).sqrt();
            assert!((got - oracle).abs() <= 1e-8, "got {got}, oracle {oracle}");
        }
    }

    #[test]
    fn solve_general_small_system() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 2.0], vec![1.0, 1.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![4.0], vec![3.0]]).unwrap();
        let x = solve_general(&a, &b).unwrap();
        assert!((x.get(0, 0) - 1.0).abs() <= 1e-12);
        assert!((x.get(1, 0) - 2.0).abs() <= 1e-12);
    }
}
