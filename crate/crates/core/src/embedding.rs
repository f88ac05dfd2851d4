//! Supervised embeddings of labeled graphs: the eigenvector embedding of
//! the weighted Laplacian difference, the trace-ratio embedding, and plain
//! label encoding, plus the degree-normalized coordinate view.

use std::io::Write;
use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::{laplacians, SupervisedGraph};
use crate::numerics::{symmetric_eig, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingMethod {
    SupLaplacian,
    Fisher,
    LabelEncoding,
}

impl std::fmt::Display for EmbeddingMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EmbeddingMethod::SupLaplacian => "sup_laplacian",
            EmbeddingMethod::Fisher => "fisher",
            EmbeddingMethod::LabelEncoding => "label_encoding",
        };
        f.write_str(s)
    }
}

/// An N x d coordinate matrix with its generating method and, when a graph
/// was involved, the degree-normalized view `Z = D_w^{-1/2} Y`.
#[derive(Debug, Clone)]
pub struct Embedding {
    coords: DenseMatrix,
    method: EmbeddingMethod,
    mu: f64,
    normalized_view: Option<DenseMatrix>,
}

impl Embedding {
    pub fn coords(&self) -> &DenseMatrix {
        &self.coords
    }

    pub fn method(&self) -> EmbeddingMethod {
        self.method
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Degree-normalized coordinates, rows `z_i = y_i / sqrt(d_w(i))`.
    pub fn normalized_view(&self) -> Option<&DenseMatrix> {
        self.normalized_view.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.coords.cols()
    }

    pub fn len(&self) -> usize {
        self.coords.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.rows() == 0
    }
}

/// Result of the trace-ratio iteration, keeping the ratio trajectory for
/// diagnostics.
#[derive(Debug, Clone)]
pub struct FisherEmbedding {
    pub embedding: Embedding,
    pub ratio: f64,
    pub ratio_trace: Vec<f64>,
}

/// Makes the first entry of magnitude above 1e-12 positive in every column.
fn fix_column_signs(y: &mut DenseMatrix) {
    for j in 0..y.cols() {
        let mut sign = 1.0;
        for i in 0..y.rows() {
            let v = y.get(i, j);
            if v.abs() > 1e-12 {
                sign = v.signum();
                break;
            }
        }
        if sign < 0.0 {
            for i in 0..y.rows() {
                let v = y.get(i, j);
                y.set(i, j, -v);
            }
        }
    }
}

fn first_columns(vectors: &DenseMatrix, cols: std::ops::Range<usize>) -> DenseMatrix {
    let mut y = DenseMatrix::zeros(vectors.rows(), cols.len());
    for (out_j, j) in cols.enumerate() {
        for i in 0..vectors.rows() {
            y.set(i, out_j, vectors.get(i, j));
        }
    }
    y
}

fn normalized_rows(y: &DenseMatrix, deg_within: &[f64]) -> DenseMatrix {
    let mut z = y.clone();
    for i in 0..z.rows() {
        let s = 1.0 / deg_within[i].sqrt();
        for j in 0..z.cols() {
            let v = z.get(i, j) * s;
            z.set(i, j, v);
        }
    }
    z
}

/// The objective matrix `L_w - mu L_b` of the supervised graph.
pub fn objective_matrix(g: &SupervisedGraph, mu: f64) -> Result<DenseMatrix> {
    let (l_w, l_b) = laplacians(g)?;
    l_w.sub(&l_b.scaled(mu))
}

/// Supervised Laplacian embedding: the `d` eigenvectors of `L_w - mu L_b`
/// with smallest eigenvalues, orthonormal columns in ascending eigenvalue
/// order, each column's leading nonzero entry made positive.
pub fn sup_laplacian(g: &SupervisedGraph, d: usize, mu: f64) -> Result<Embedding> {
    if d == 0 || d > g.len() {
        return Err(Error::BadParam(format!("embedding dimension {d} outside 1..={}", g.len())));
    }
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::BadParam(format!("mu must be finite and > 0, got {mu}")));
    }
    let m = objective_matrix(g, mu)?;
    let eig = symmetric_eig(&m, 1e-10)?;
    let mut y = first_columns(eig.vectors(), 0..d);
    fix_column_signs(&mut y);
    let z = normalized_rows(&y, g.deg_within());
    Ok(Embedding { coords: y, method: EmbeddingMethod::SupLaplacian, mu, normalized_view: Some(z) })
}

/// Trace-ratio embedding maximizing `tr(Y^T L_b Y) / tr(Y^T L_w Y)` over
/// orthonormal `Y` by the shifted-eigenproblem iteration, started from the
/// supervised Laplacian solution at `mu = 1`.
pub fn fisher_trace_ratio(g: &SupervisedGraph, d: usize, max_iters: usize, tol: f64) -> Result<FisherEmbedding> {
    if d == 0 || d > g.len() {
        return Err(Error::BadParam(format!("embedding dimension {d} outside 1..={}", g.len())));
    }
    let (l_w, l_b) = laplacians(g)?;
    let y0 = sup_laplacian(g, d, 1.0)?.coords().clone();
    let (mut y, ratio, ratio_trace) = trace_ratio_iteration(&l_w, &l_b, y0, max_iters, tol)?;
    fix_column_signs(&mut y);
    let z = normalized_rows(&y, g.deg_within());
    let embedding = Embedding { coords: y, method: EmbeddingMethod::Fisher, mu: 0.0, normalized_view: Some(z) };
    Ok(FisherEmbedding { embedding, ratio, ratio_trace })
}

fn trace_quadratic(y: &DenseMatrix, a: &DenseMatrix) -> f64 {
    // tr(Y^T A Y)
    let mut total = 0.0;
    for j in 0..y.cols() {
        for i in 0..a.rows() {
            let mut av = 0.0;
            for k in 0..a.cols() {
                av += a.get(i, k) * y.get(k, j);
            }
            total += y.get(i, j) * av;
        }
    }
    total
}

fn trace_ratio_iteration(
    l_w: &DenseMatrix,
    l_b: &DenseMatrix,
    y0: DenseMatrix,
    max_iters: usize,
    tol: f64,
) -> Result<(DenseMatrix, f64, Vec<f64>)> {
    let d = y0.cols();
    let n = y0.rows();
    let mut y = y0;
    let mut trace = Vec::new();
    let mut rho = {
        let denom = trace_quadratic(&y, l_w);
        if denom < 1e-12 {
            return Err(Error::DegenerateFisher);
        }
        trace_quadratic(&y, l_b) / denom
    };
    trace.push(rho);
    for _ in 0..max_iters {
        let m = l_b.sub(&l_w.scaled(rho))?;
        let eig = symmetric_eig(&m, 1e-10)?;
        y = first_columns(eig.vectors(), (n - d)..n);
        let denom = trace_quadratic(&y, l_w);
        if denom < 1e-12 {
            return Err(Error::DegenerateFisher);
        }
        let next = trace_quadratic(&y, l_b) / denom;
        let delta = (next - rho).abs();
        rho = next;
        trace.push(rho);
        if delta <= tol {
            break;
        }
    }
    Ok((y, rho, trace))
}

/// One-hot label embedding: row i is the unit indicator of class `C_i`,
/// dimension equals the class count.
pub fn label_encoding(ds: &Dataset) -> Embedding {
    let n = ds.len();
    let m = ds.class_count();
    let mut y = DenseMatrix::zeros(n, m);
    for i in 0..n {
        y.set(i, ds.labels()[i] - 1, 1.0);
    }
    Embedding { coords: y, method: EmbeddingMethod::LabelEncoding, mu: 0.0, normalized_view: None }
}

/// Writes embedding coordinates plus labels as CSV (`y1..yd,label`).
pub fn export_csv(emb: &Embedding, labels: &[usize], path: impl AsRef<Path>) -> Result<()> {
    if labels.len() != emb.len() {
        return Err(Error::DimensionMismatch { expected: emb.len(), got: labels.len() });
    }
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    let header: Vec<String> = (1..=emb.dim()).map(|j| format!("y{j}")).collect();
    writeln!(file, "{},label", header.join(","))?;
    for i in 0..emb.len() {
        let fields: Vec<String> = emb.coords().row(i).iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(file, "{},{}", fields.join(","), labels[i])?;
    }
    file.flush()?;
    Ok(())
}

/// Reads coordinates and labels written by [`export_csv`].
pub fn import_csv(path: impl AsRef<Path>) -> Result<(DenseMatrix, Vec<usize>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::EmptyDataset)?;
    let ncols = header.split(',').count();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != ncols {
            return Err(Error::Csv { line: lineno + 1, msg: format!("expected {ncols} fields, got {}", fields.len()) });
        }
        let mut row = Vec::with_capacity(ncols - 1);
        for f in &fields[..ncols - 1] {
            row.push(f.parse::<f64>().map_err(|_| Error::Csv { line: lineno + 1, msg: format!("bad coordinate '{f}'") })?);
        }
        labels.push(
            fields[ncols - 1]
                .parse::<usize>()
                .map_err(|_| Error::Csv { line: lineno + 1, msg: format!("bad label '{}'", fields[ncols - 1]) })?,
        );
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok((DenseMatrix::from_rows(&rows)?, labels))
}
