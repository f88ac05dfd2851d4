//! Labeled point clouds: CSV ingestion, deterministic stratified splits,
//! and the synthetic two-class surface generators.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::rng::CounterRng;

/// Labeled data in an ambient Euclidean space. Labels are dense class
/// indices `1..=class_count`, every class nonempty.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: DenseMatrix,
    labels: Vec<usize>,
    class_count: usize,
    name: String,
}

impl Dataset {
    pub fn new(points: DenseMatrix, labels: Vec<usize>, name: impl Into<String>) -> Result<Self> {
        let n = points.rows();
        if n < 2 {
            return Err(Error::BadParam(format!("dataset needs at least 2 samples, got {n}")));
        }
        if labels.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: labels.len() });
        }
        if !points.is_finite() {
            return Err(Error::NonFinite);
        }
        let class_count = *labels.iter().max().unwrap_or(&0);
        if class_count == 0 {
            return Err(Error::BadParam("labels must be 1-based class indices".into()));
        }
        let mut seen = vec![false; class_count];
        for &l in &labels {
            if l == 0 || l > class_count {
                return Err(Error::BadParam(format!("label {l} outside 1..={class_count}")));
            }
            seen[l - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::BadParam(format!("class {} has no samples", missing + 1)));
        }
        Ok(Dataset { points, labels, class_count, name: name.into() })
    }

    pub fn points(&self) -> &DenseMatrix {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.rows() == 0
    }

    /// Ambient dimension.
    pub fn ambient_dim(&self) -> usize {
        self.points.cols()
    }

    pub fn class_indices(&self, class: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == class).collect()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.class_count];
        for &l in &self.labels {
            sizes[l - 1] += 1;
        }
        sizes
    }

    /// Row-subset copy, preserving index order. Every class must survive.
    pub fn subset(&self, indices: &[usize], name: impl Into<String>) -> Result<Dataset> {
        let rows: Vec<Vec<f64>> = indices.iter().map(|&i| self.points.row(i).to_vec()).collect();
        let labels: Vec<usize> = indices.iter().map(|&i| self.labels[i]).collect();
        Dataset::new(DenseMatrix::from_rows(&rows)?, labels, name)
    }
}

/// Disjoint train/test index partition, stratified per class.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// Synthetic two-class surface family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surface {
    Quadratic,
    Swissroll,
    Spheres,
}

impl FromStr for Surface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(Surface::Quadratic),
            "swissroll" => Ok(Surface::Swissroll),
            "spheres" => Ok(Surface::Spheres),
            other => Err(Error::UnknownSurface(other.to_string())),
        }
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Surface::Quadratic => "quadratic",
            Surface::Swissroll => "swissroll",
            Surface::Spheres => "spheres",
        };
        f.write_str(s)
    }
}

/// Generates `2 * per_class` points in R^3 from two nonintersecting
/// surfaces, class 1 rows first. `noise` is the standard deviation of
/// isotropic Gaussian noise added per coordinate.
///
/// Surfaces: `quadratic` puts class 1 on z = x^2 + y^2 and class 2 on the
/// same paraboloid shifted up by 0.5 over (x, y) uniform in [-1, 1]^2;
/// `swissroll` draws the spiral (t cos a, h, t sin a) with t in
/// [1.5 pi, 4.5 pi], h in [0, 4], where class 1 uses angle a = t and class 2
/// the interleaved sheet a = t + pi; `spheres` draws uniform directions at
/// radii 1 and 1.6.
pub fn gen_two_class(surface: Surface, per_class: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if per_class < 2 {
        return Err(Error::BadParam(format!("per_class must be >= 2, got {per_class}")));
    }
    if !noise.is_finite() || noise < 0.0 {
        return Err(Error::BadParam(format!("noise must be finite and >= 0, got {noise}")));
    }
    let mut rows = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    for class in 1..=2usize {
        let mut rng = CounterRng::new(seed, class as u64);
        for _ in 0..per_class {
            let mut p = match surface {
                Surface::Quadratic => {
                    let x = rng.next_range(-1.0, 1.0);
                    let y = rng.next_range(-1.0, 1.0);
                    let z = x * x + y * y + if class == 2 { 0.5 } else { 0.0 };
                    [x, y, z]
                }
                Surface::Swissroll => {
                    let t = rng.next_range(1.5 * std::f64::consts::PI, 4.5 * std::f64::consts::PI);
                    let h = rng.next_range(0.0, 4.0);
                    let angle = if class == 2 { t + std::f64::consts::PI } else { t };
                    [t * angle.cos(), h, t * angle.sin()]
                }
                Surface::Spheres => {
                    let radius = if class == 2 { 1.6 } else { 1.0 };
                    loop {
                        let u = [rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()];
                        let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
                        if norm > 1e-12 {
                            break [radius * u[0] / norm, radius * u[1] / norm, radius * u[2] / norm];
                        }
                    }
                }
            };
            if noise > 0.0 {
                for v in &mut p {
                    *v += noise * rng.next_gaussian();
                }
            }
            rows.push(p.to_vec());
            labels.push(class);
        }
    }
    let name = format!("{surface}");
    Dataset::new(DenseMatrix::from_rows(&rows)?, labels, name)
}

/// Stratified deterministic split. Per class, `round(fraction * N_m)`
/// samples go to train; every class must keep at least one training sample.
pub fn split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::BadFraction(train_fraction));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 1..=ds.class_count() {
        let mut idx = ds.class_indices(class);
        let n_m = idx.len();
        let mut rng = CounterRng::new(seed, class as u64);
        rng.shuffle(&mut idx);
        let n_train = ((train_fraction * n_m as f64).round() as usize).min(n_m);
        if n_train == 0 {
            return Err(Error::ClassWithoutTrain { class });
        }
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test, seed })
}

/// Loads a labeled dataset from a UTF-8 comma-separated file with one header
/// row. All columns except `label_column` are numeric features, kept in
/// file order. String labels are mapped to `1..=M` by first occurrence;
/// integer labels already forming a dense `1..=M` set are used as-is.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset> {
    let text = std::fs::read_to_string(&path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::EmptyDataset)?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let label_idx = columns
        .iter()
        .position(|c| *c == label_column)
        .ok_or_else(|| Error::Csv { line: 1, msg: format!("label column '{label_column}' not found in header") })?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(Error::Csv {
                line: lineno + 1,
                msg: format!("expected {} fields, got {}", columns.len(), fields.len()),
            });
        }
        let mut row = Vec::with_capacity(columns.len() - 1);
        for (col, field) in fields.iter().enumerate() {
            if col == label_idx {
                raw_labels.push((*field).to_string());
            } else {
                let v: f64 = field.parse().map_err(|_| Error::Csv {
                    line: lineno + 1,
                    msg: format!("non-numeric feature '{}' in column '{}'", field, columns[col]),
                })?;
                if !v.is_finite() {
                    return Err(Error::Csv {
                        line: lineno + 1,
                        msg: format!("non-finite feature in column '{}'", columns[col]),
                    });
                }
                row.push(v);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let labels = map_labels(&raw_labels);
    let name = path
        .as_ref()
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".to_string());
    Dataset::new(DenseMatrix::from_rows(&rows)?, labels, name)
}

fn map_labels(raw: &[String]) -> Vec<usize> {
    // integer labels that already form a dense 1..=M set pass through
    if let Some(ints) = raw.iter().map(|s| s.parse::<i64>().ok()).collect::<Option<Vec<i64>>>() {
        let mut uniq: Vec<i64> = ints.clone();
        uniq.sort_unstable();
        uniq.dedup();
        let dense = uniq.first() == Some(&1) && *uniq.last().unwrap() == uniq.len() as i64;
        if dense {
            return ints.into_iter().map(|v| v as usize).collect();
        }
    }
    let mut order: BTreeMap<&str, usize> = BTreeMap::new();
    let mut next = 0usize;
    let mut out = Vec::with_capacity(raw.len());
    for s in raw {
        let id = *order.entry(s.as_str()).or_insert_with(|| {
            next += 1;
            next
        });
        out.push(id);
    }
    out
}

/// Writes the dataset as CSV: features `x1..xn`, then the label column.
/// Reals carry 17 significant digits so a round trip is exact.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>, label_column: &str) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    let n_dim = ds.ambient_dim();
    let header: Vec<String> = (1..=n_dim).map(|j| format!("x{j}")).collect();
    writeln!(file, "{},{label_column}", header.join(","))?;
    for i in 0..ds.len() {
        let fields: Vec<String> = ds.points.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(file, "{},{}", fields.join(","), ds.labels[i])?;
    }
    file.flush()?;
    Ok(())
}
