//! Margin computation and classification in the embedded space:
//! maximum-margin pairwise hyperplanes via convex-hull distance, the
//! all-pairs linear rule with voting fallback, nearest-neighbor
//! classification, and ambient-space baselines.

use std::collections::BTreeMap;

use crate::dataset::Dataset;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::numerics::{solve_general, DenseMatrix};

/// Separating hyperplane for one unordered class pair, with the first class
/// of the pair on the positive side.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
    /// Distance between the two convex hulls (0 when they meet).
    pub margin: f64,
    pub class_pair: (usize, usize),
    /// False when the hulls intersect and the plane is best-effort only.
    pub separating: bool,
}

impl Hyperplane {
    /// Signed score `w^T y + b`.
    pub fn score(&self, y: &[f64]) -> f64 {
        self.normal.iter().zip(y).map(|(w, v)| w * v).sum::<f64>() + self.offset
    }
}

/// All pairwise hyperplanes over a training embedding.
#[derive(Debug, Clone)]
pub struct ClassifierModel {
    hyperplanes: Vec<Hyperplane>,
    classes: Vec<usize>,
    train_coords: DenseMatrix,
    train_labels: Vec<usize>,
    min_margin: f64,
}

/// Outcome of Wolfe's min-norm-point search over the difference of two
/// convex hulls.
struct MinNormPoint {
    /// The minimizing difference vector `p* - q*`.
    w: Vec<f64>,
    p_star: Vec<f64>,
    q_star: Vec<f64>,
}

const GAP_TOL: f64 = 1e-10;
const MAX_MAJOR_ITERS: usize = 10_000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fully corrective Frank-Wolfe (Wolfe's min-norm-point algorithm) for
/// `min |p - q|^2` over `p in hull(P), q in hull(Q)`. Atoms are point pairs;
/// the linear minimization oracle scans each set once, the corral is
/// re-solved exactly after every atom insertion, and the search stops at a
/// duality gap of 1e-10 (relative for large norms) or after 10^4 rounds.
fn min_norm_between(p: &DenseMatrix, q: &DenseMatrix) -> MinNormPoint {
    let dim = p.cols();
    let atom = |i: usize, j: usize| -> Vec<f64> {
        p.row(i).iter().zip(q.row(j)).map(|(a, b)| a - b).collect()
    };

    let mut corral: Vec<(usize, usize)> = vec![(0, 0)];
    let mut atoms: Vec<Vec<f64>> = vec![atom(0, 0)];
    let mut alphas: Vec<f64> = vec![1.0];

    let current_w = |atoms: &[Vec<f64>], alphas: &[f64]| -> Vec<f64> {
        let mut w = vec![0.0; dim];
        for (v, &a) in atoms.iter().zip(alphas) {
            for (wk, vk) in w.iter_mut().zip(v) {
                *wk += a * vk;
            }
        }
        w
    };

    let mut last_ww = f64::INFINITY;
    for _ in 0..MAX_MAJOR_ITERS {
        let w = current_w(&atoms, &alphas);
        let ww = dot(&w, &w);
        if ww >= last_ww {
            // no strict progress at working precision
            break;
        }
        last_ww = ww;

        // linear minimization oracle over both hulls
        let mut best_i = 0;
        let mut best_ip = f64::INFINITY;
        for i in 0..p.rows() {
            let s = dot(&w, p.row(i));
            if s < best_ip {
                best_ip = s;
                best_i = i;
            }
        }
        let mut best_j = 0;
        let mut best_jq = f64::NEG_INFINITY;
        for j in 0..q.rows() {
            let s = dot(&w, q.row(j));
            if s > best_jq {
                best_jq = s;
                best_j = j;
            }
        }
        let gap = 2.0 * (ww - (best_ip - best_jq));
        if gap <= GAP_TOL * ww.max(1.0) {
            break;
        }
        if corral.contains(&(best_i, best_j)) {
            // the oracle cannot improve further at working precision
            break;
        }
        corral.push((best_i, best_j));
        atoms.push(atom(best_i, best_j));
        alphas.push(0.0);

        // minor cycles: exact affine solve over the corral, stepping back
        // onto the simplex until the solution is feasible
        loop {
            let k = atoms.len();
            if k == 1 {
                alphas[0] = 1.0;
                break;
            }
            // substitute beta_k = 1 - sum(beta_a) and solve the reduced
            // normal equations over shifted atoms
            let last = k - 1;
            let mut h = DenseMatrix::zeros(last, last);
            let mut rhs = DenseMatrix::zeros(last, 1);
            let shifted: Vec<Vec<f64>> = (0..last)
                .map(|a| atoms[a].iter().zip(&atoms[last]).map(|(x, y)| x - y).collect())
                .collect();
            for a in 0..last {
                for b in a..last {
                    let v = dot(&shifted[a], &shifted[b]);
                    h.set(a, b, v);
                    h.set(b, a, v);
                }
                rhs.set(a, 0, -dot(&atoms[last], &shifted[a]));
            }
            let beta = match solve_general(&h, &rhs) {
                Ok(x) => x,
                Err(_) => {
                    // affinely dependent corral: damp and retry once
                    let mut hd = h.clone();
                    let bump = 1e-12 * (0..last).map(|a| hd.get(a, a)).fold(0.0_f64, f64::max).max(1e-300);
                    for a in 0..last {
                        hd.set(a, a, hd.get(a, a) + bump);
                    }
                    match solve_general(&hd, &rhs) {
                        Ok(x) => x,
                        Err(_) => break,
                    }
                }
            };
            let mut full = Vec::with_capacity(k);
            let mut tail = 1.0;
            for a in 0..last {
                full.push(beta.get(a, 0));
                tail -= beta.get(a, 0);
            }
            full.push(tail);

            if full.iter().all(|&b| b >= -1e-12) {
                alphas = full.iter().map(|&b| b.max(0.0)).collect();
                let total: f64 = alphas.iter().sum();
                alphas.iter_mut().for_each(|a| *a /= total);
                break;
            }
            // step from alphas toward full until the first weight hits zero
            let mut theta = 1.0_f64;
            for (&cur, &new) in alphas.iter().zip(&full) {
                if new < -1e-12 {
                    theta = theta.min(cur / (cur - new));
                }
            }
            for (cur, &new) in alphas.iter_mut().zip(&full) {
                *cur = (1.0 - theta) * *cur + theta * new;
            }
            // drop exhausted atoms
            let mut a = 0;
            while a < alphas.len() {
                if alphas[a] <= 1e-14 {
                    alphas.remove(a);
                    atoms.remove(a);
                    corral.remove(a);
                } else {
                    a += 1;
                }
            }
            let total: f64 = alphas.iter().sum();
            if total > 0.0 {
                alphas.iter_mut().for_each(|x| *x /= total);
            } else {
                alphas = vec![1.0; atoms.len().max(1)];
            }
            if atoms.is_empty() {
                corral.push((0, 0));
                atoms.push(atom(0, 0));
                alphas = vec![1.0];
                break;
            }
        }
    }

    let mut p_star = vec![0.0; dim];
    let mut q_star = vec![0.0; dim];
    for (&(i, j), &a) in corral.iter().zip(&alphas) {
        for k in 0..dim {
            p_star[k] += a * p.get(i, k);
            q_star[k] += a * q.get(j, k);
        }
    }
    let w: Vec<f64> = p_star.iter().zip(&q_star).map(|(a, b)| a - b).collect();
    MinNormPoint { w, p_star, q_star }
}

/// Maximum-margin hyperplane between two point sets: the margin equals the
/// distance between their convex hulls, the normal points toward `P`
/// (first set positive), and the slab sits symmetrically between the
/// nearest hull points. Intersecting hulls yield margin 0 with a
/// best-effort plane flagged non-separating.
pub fn max_margin_hyperplane(p: &DenseMatrix, q: &DenseMatrix) -> Result<Hyperplane> {
    max_margin_for_pair(p, q, (1, 2))
}

fn max_margin_for_pair(p: &DenseMatrix, q: &DenseMatrix, class_pair: (usize, usize)) -> Result<Hyperplane> {
    if p.rows() == 0 || q.rows() == 0 {
        return Err(Error::BadParam("both point sets must be nonempty".into()));
    }
    if p.cols() != q.cols() {
        return Err(Error::DimensionMismatch { expected: p.cols(), got: q.cols() });
    }
    if !p.is_finite() || !q.is_finite() {
        return Err(Error::NonFinite);
    }
    let dim = p.cols();
    let mnp = min_norm_between(p, q);
    let dist = dot(&mnp.w, &mnp.w).sqrt();
    let scale = p.max_abs().max(q.max_abs()).max(1.0);

    if dist <= 1e-9 * scale {
        // hulls meet; report a flagged best-effort separator
        let mut normal = mnp.w.clone();
        let norm = dot(&normal, &normal).sqrt();
        if norm > 0.0 {
            normal.iter_mut().for_each(|v| *v /= norm);
        } else {
            normal = vec![0.0; dim];
            normal[0] = 1.0;
        }
        let mid: Vec<f64> = mnp.p_star.iter().zip(&mnp.q_star).map(|(a, b)| 0.5 * (a + b)).collect();
        let offset = -dot(&normal, &mid);
        return Ok(Hyperplane { normal, offset, margin: 0.0, class_pair, separating: false });
    }

    let normal: Vec<f64> = mnp.w.iter().map(|v| v / dist).collect();
    let mid: Vec<f64> = mnp.p_star.iter().zip(&mnp.q_star).map(|(a, b)| 0.5 * (a + b)).collect();
    let offset = -dot(&normal, &mid);
    Ok(Hyperplane { normal, offset, margin: dist, class_pair, separating: true })
}

/// Through-origin margin between class points `pos` (positive side) and
/// `neg`: twice the distance from the origin to `hull(pos ∪ -neg)`, or 0
/// when that hull contains the origin.
pub fn origin_margin(pos: &DenseMatrix, neg: &DenseMatrix) -> Result<f64> {
    if pos.rows() == 0 || neg.rows() == 0 {
        return Err(Error::BadParam("both point sets must be nonempty".into()));
    }
    if pos.cols() != neg.cols() {
        return Err(Error::DimensionMismatch { expected: pos.cols(), got: neg.cols() });
    }
    let dim = pos.cols();
    let mut union_rows: Vec<Vec<f64>> = Vec::with_capacity(pos.rows() + neg.rows());
    for i in 0..pos.rows() {
        union_rows.push(pos.row(i).to_vec());
    }
    for j in 0..neg.rows() {
        union_rows.push(neg.row(j).iter().map(|v| -v).collect());
    }
    let union = DenseMatrix::from_rows(&union_rows)?;
    let origin = DenseMatrix::zeros(1, dim);
    let mnp = min_norm_between(&union, &origin);
    let dist = dot(&mnp.w, &mnp.w).sqrt();
    let scale = union.max_abs().max(1.0);
    if dist <= 1e-9 * scale {
        Ok(0.0)
    } else {
        Ok(2.0 * dist)
    }
}

fn class_rows(coords: &DenseMatrix, labels: &[usize], class: usize) -> DenseMatrix {
    let rows: Vec<Vec<f64>> = (0..coords.rows())
        .filter(|&i| labels[i] == class)
        .map(|i| coords.row(i).to_vec())
        .collect();
    DenseMatrix::from_rows(&rows).expect("class rows share the embedding dimension")
}

/// Fits one maximum-margin hyperplane per unordered class pair. The model's
/// empirical margin is the smallest pairwise margin.
pub fn fit_linear(emb: &Embedding, labels: &[usize]) -> Result<ClassifierModel> {
    fit_linear_coords(emb.coords(), labels)
}

/// [`fit_linear`] over a raw coordinate matrix.
pub fn fit_linear_coords(coords: &DenseMatrix, labels: &[usize]) -> Result<ClassifierModel> {
    if labels.len() != coords.rows() {
        return Err(Error::DimensionMismatch { expected: coords.rows(), got: labels.len() });
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::BadParam("need at least two classes".into()));
    }
    let mut hyperplanes = Vec::new();
    let mut min_margin = f64::INFINITY;
    for (a, &k) in classes.iter().enumerate() {
        for &l in &classes[(a + 1)..] {
            let p = class_rows(coords, labels, k);
            let q = class_rows(coords, labels, l);
            let h = max_margin_for_pair(&p, &q, (k, l))?;
            min_margin = min_margin.min(h.margin);
            hyperplanes.push(h);
        }
    }
    Ok(ClassifierModel {
        hyperplanes,
        classes,
        train_coords: coords.clone(),
        train_labels: labels.to_vec(),
        min_margin,
    })
}

impl ClassifierModel {
    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    /// Smallest pairwise hull distance: the embedding's empirical margin.
    pub fn margin(&self) -> f64 {
        self.min_margin
    }

    /// Signed score of `y` for the ordered pair (k, l): positive favors k.
    fn pair_score(&self, k: usize, l: usize, y: &[f64]) -> f64 {
        for h in &self.hyperplanes {
            if h.class_pair == (k, l) {
                return h.score(y);
            }
            if h.class_pair == (l, k) {
                return -h.score(y);
            }
        }
        unreachable!("every class pair has a hyperplane")
    }

    /// All-pairs linear rule: a class wins outright when it beats every
    /// other class strictly. Otherwise falls back to pairwise voting with
    /// the lowest class index breaking ties, flagged `false`.
    pub fn predict_linear(&self, y: &[f64]) -> (usize, bool) {
        let mut winner = None;
        for &l in &self.classes {
            let beats_all = self
                .classes
                .iter()
                .filter(|&&k| k != l)
                .all(|&k| self.pair_score(l, k, y) > 0.0);
            if beats_all {
                winner = Some(l);
                break;
            }
        }
        if let Some(l) = winner {
            return (l, true);
        }
        let mut votes: BTreeMap<usize, usize> = self.classes.iter().map(|&c| (c, 0)).collect();
        for (a, &k) in self.classes.iter().enumerate() {
            for &l in &self.classes[(a + 1)..] {
                let s = self.pair_score(k, l, y);
                if s > 0.0 {
                    *votes.get_mut(&k).unwrap() += 1;
                } else if s < 0.0 {
                    *votes.get_mut(&l).unwrap() += 1;
                }
            }
        }
        let best = self
            .classes
            .iter()
            .copied()
            .max_by(|&a, &b| votes[&a].cmp(&votes[&b]).then(b.cmp(&a)))
            .expect("classes nonempty");
        (best, false)
    }

    /// Label of the nearest training point in the embedded space, distance
    /// ties broken by the lower index.
    pub fn predict_nn(&self, y: &[f64]) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for i in 0..self.train_coords.rows() {
            let d: f64 = self
                .train_coords
                .row(i)
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        self.train_labels[best]
    }
}

/// One line of a prediction report.
#[derive(Debug, Clone, Copy)]
pub struct PredictionRow {
    pub index: usize,
    pub true_label: usize,
    pub predicted: usize,
    /// Whether the all-pairs linear rule picked the class outright.
    pub won_outright: bool,
}

/// Writes predictions as CSV: `index,true_label,predicted,won_outright`.
pub fn write_prediction_report(rows: &[PredictionRow], path: impl AsRef<std::path::Path>) -> Result<()> {
    use std::io::Write;
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "index,true_label,predicted,won_outright")?;
    for row in rows {
        writeln!(file, "{},{},{},{}", row.index, row.true_label, row.predicted, row.won_outright)?;
    }
    file.flush()?;
    Ok(())
}

/// Majority vote among the `k` ambient-space nearest training points;
/// neighbor ties break on the lower index, vote ties on the lower class.
pub fn baseline_knn(ds_train: &Dataset, k: usize, x: &[f64]) -> Result<usize> {
    if k == 0 || k > ds_train.len() {
        return Err(Error::BadParam(format!("k must lie in 1..={}, got {k}", ds_train.len())));
    }
    if x.len() != ds_train.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: ds_train.ambient_dim(), got: x.len() });
    }
    let mut order: Vec<usize> = (0..ds_train.len()).collect();
    let dist = |i: usize| -> f64 {
        ds_train.points().row(i).iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum()
    };
    order.sort_by(|&a, &b| dist(a).partial_cmp(&dist(b)).unwrap().then(a.cmp(&b)));
    let mut votes: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in order.iter().take(k) {
        *votes.entry(ds_train.labels()[i]).or_insert(0) += 1;
    }
    let best = votes
        .iter()
        .max_by(|(ca, va), (cb, vb)| va.cmp(vb).then(cb.cmp(ca)))
        .map(|(&c, _)| c)
        .expect("k >= 1");
    Ok(best)
}

/// Nadaraya-Watson smoothing of the one-hot class indicators with Gaussian
/// weights `exp(-r^2/sigma^2)`; the argmax class wins, lower index on ties.
/// When every weight underflows to zero, falls back to 1-NN and flags it.
pub fn baseline_kernel_regression(ds_train: &Dataset, sigma: f64, x: &[f64]) -> Result<(usize, bool)> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::BadParam(format!("sigma must be finite and > 0, got {sigma}")));
    }
    if x.len() != ds_train.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: ds_train.ambient_dim(), got: x.len() });
    }
    let mut score: BTreeMap<usize, f64> = BTreeMap::new();
    let mut total = 0.0;
    for i in 0..ds_train.len() {
        let r2: f64 = ds_train.points().row(i).iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        let w = (-r2 / (sigma * sigma)).exp();
        total += w;
        *score.entry(ds_train.labels()[i]).or_insert(0.0) += w;
    }
    if total == 0.0 {
        return Ok((baseline_knn(ds_train, 1, x)?, true));
    }
    let best = score
        .iter()
        .max_by(|(ca, va), (cb, vb)| va.partial_cmp(vb).unwrap().then(cb.cmp(ca)))
        .map(|(&c, _)| c)
        .expect("at least one class");
    Ok((best, false))
}
