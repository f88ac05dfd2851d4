//! Within-class and between-class neighborhood graphs with heat-kernel
//! weights, their normalized Laplacians, and the graph statistics consumed
//! by the separability bounds.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Heat-kernel scale selection for edge weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeatScale {
    /// Median of the within-class neighbor distances.
    Auto,
    Fixed(f64),
}

/// Supervised neighborhood graph: symmetric nonnegative weight matrices for
/// same-class and cross-class edges, with strictly positive degrees on both.
#[derive(Debug, Clone)]
pub struct SupervisedGraph {
    w_within: DenseMatrix,
    w_between: DenseMatrix,
    labels: Vec<usize>,
    deg_within: Vec<f64>,
    deg_between: Vec<f64>,
    heat_scale: f64,
}

/// Per-class and per-vertex quantities entering the separation bounds.
#[derive(Debug, Clone)]
pub struct GraphStats {
    /// Within-class volume per class.
    pub vol_within: BTreeMap<usize, f64>,
    pub vol_max: f64,
    /// Pairwise between-class volume, keyed by (k, l) with k < l.
    pub vol_between: BTreeMap<(usize, usize), f64>,
    pub vol_between_max: f64,
    /// Hop diameter of each class's within-class component.
    pub diameter: BTreeMap<usize, usize>,
    /// Minimum within-class edge weight per class.
    pub min_weight: BTreeMap<usize, f64>,
    /// min over classes of min_weight / diameter.
    pub w_bar_min: f64,
    /// Per-vertex degree ratio d_w / d_b.
    pub beta: Vec<f64>,
    pub beta_min: f64,
    pub beta_max: f64,
    pub deg_within_min: f64,
}

impl SupervisedGraph {
    /// Validating constructor from explicit weight matrices.
    pub fn from_weights(w_within: DenseMatrix, w_between: DenseMatrix, labels: Vec<usize>) -> Result<Self> {
        Self::assemble(w_within, w_between, labels, 0.0)
    }

    fn assemble(w_within: DenseMatrix, w_between: DenseMatrix, labels: Vec<usize>, heat_scale: f64) -> Result<Self> {
        let n = labels.len();
        for (w, tag) in [(&w_within, "within"), (&w_between, "between")] {
            if !w.is_square() || w.rows() != n {
                return Err(Error::DimensionMismatch { expected: n, got: w.rows() });
            }
            for i in 0..n {
                if w.get(i, i) != 0.0 {
                    return Err(Error::BadParam(format!("{tag} graph has a nonzero diagonal at {i}")));
                }
                for j in 0..n {
                    let v = w.get(i, j);
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::BadParam(format!("{tag} weight ({i},{j}) = {v} is invalid")));
                    }
                    if v != w.get(j, i) {
                        return Err(Error::BadParam(format!("{tag} weights are not symmetric at ({i},{j})")));
                    }
                    if v > 0.0 {
                        let same = labels[i] == labels[j];
                        if tag == "within" && !same {
                            return Err(Error::BadParam(format!("within edge ({i},{j}) joins different classes")));
                        }
                        if tag == "between" && same {
                            return Err(Error::BadParam(format!("between edge ({i},{j}) joins the same class")));
                        }
                    }
                }
            }
        }
        let deg_within: Vec<f64> = (0..n).map(|i| w_within.row(i).iter().sum()).collect();
        let deg_between: Vec<f64> = (0..n).map(|i| w_between.row(i).iter().sum()).collect();
        if let Some(v) = deg_within.iter().position(|&d| d <= 0.0) {
            return Err(Error::ZeroDegree { vertex: v, graph: "within" });
        }
        if let Some(v) = deg_between.iter().position(|&d| d <= 0.0) {
            return Err(Error::ZeroDegree { vertex: v, graph: "between" });
        }
        Ok(SupervisedGraph { w_within, w_between, labels, deg_within, deg_between, heat_scale })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn w_within(&self) -> &DenseMatrix {
        &self.w_within
    }

    pub fn w_between(&self) -> &DenseMatrix {
        &self.w_between
    }

    pub fn deg_within(&self) -> &[f64] {
        &self.deg_within
    }

    pub fn deg_between(&self) -> &[f64] {
        &self.deg_between
    }

    /// Heat-kernel scale the graph was built with (0 when constructed from
    /// explicit weights).
    pub fn heat_scale(&self) -> f64 {
        self.heat_scale
    }

    /// Distinct class labels present, ascending.
    pub fn classes(&self) -> Vec<usize> {
        let mut cs: Vec<usize> = self.labels.clone();
        cs.sort_unstable();
        cs.dedup();
        cs
    }

    /// Vertex-subset copy (indices keep their input order).
    pub fn subgraph(&self, indices: &[usize]) -> Result<SupervisedGraph> {
        let m = indices.len();
        let mut ww = DenseMatrix::zeros(m, m);
        let mut wb = DenseMatrix::zeros(m, m);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                ww.set(a, b, self.w_within.get(i, j));
                wb.set(a, b, self.w_between.get(i, j));
            }
        }
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::assemble(ww, wb, labels, self.heat_scale)
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn heat_weight(d: f64, t: f64) -> f64 {
    let w = (-d * d / (2.0 * t * t)).exp();
    // keep strict positivity so degrees never collapse to zero
    if w > 0.0 {
        w
    } else {
        1e-300
    }
}

/// Builds the supervised graph: each sample joins its `k_within` nearest
/// same-class neighbors and `k_between` nearest other-class neighbors,
/// symmetrized by union, with weights `exp(-d^2 / (2 t^2))`. Disconnected
/// within-class components are bridged by the globally shortest
/// inter-component pair of the class.
pub fn build(ds: &Dataset, k_within: usize, k_between: usize, heat: HeatScale) -> Result<SupervisedGraph> {
    let n = ds.len();
    let labels = ds.labels().to_vec();
    if k_within == 0 || k_between == 0 {
        return Err(Error::BadParam("k_within and k_between must be >= 1".into()));
    }
    for class in 1..=ds.class_count() {
        let size = ds.class_indices(class).len();
        if size <= k_within {
            return Err(Error::ClassTooSmall { class, size, need: k_within });
        }
        if n - size < k_between {
            return Err(Error::ClassTooSmall { class, size: n - size, need: k_between });
        }
    }

    let mut dist = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclid(ds.points().row(i), ds.points().row(j));
            dist.set(i, j, d);
            dist.set(j, i, d);
        }
    }

    // k nearest with deterministic tie-break on the smaller index
    let nearest = |i: usize, same_class: bool, k: usize| -> Vec<usize> {
        let mut cand: Vec<usize> = (0..n)
            .filter(|&j| j != i && (labels[j] == labels[i]) == same_class)
            .collect();
        cand.sort_by(|&a, &b| {
            dist.get(i, a)
                .partial_cmp(&dist.get(i, b))
                .unwrap()
                .then(a.cmp(&b))
        });
        cand.truncate(k);
        cand
    };

    let mut within_pairs: Vec<(usize, usize)> = Vec::new();
    let mut between_pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in nearest(i, true, k_within) {
            within_pairs.push((i.min(j), i.max(j)));
        }
        for j in nearest(i, false, k_between) {
            between_pairs.push((i.min(j), i.max(j)));
        }
    }
    within_pairs.sort_unstable();
    within_pairs.dedup();
    between_pairs.sort_unstable();
    between_pairs.dedup();

    let t = match heat {
        HeatScale::Fixed(t) if t.is_finite() && t > 0.0 => t,
        HeatScale::Fixed(t) => {
            return Err(Error::BadParam(format!("heat scale must be finite and > 0, got {t}")));
        }
        HeatScale::Auto => {
            let mut ds_sorted: Vec<f64> = within_pairs.iter().map(|&(i, j)| dist.get(i, j)).collect();
            ds_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let m = ds_sorted.len();
            let median = if m % 2 == 1 {
                ds_sorted[m / 2]
            } else {
                0.5 * (ds_sorted[m / 2 - 1] + ds_sorted[m / 2])
            };
            if median <= 0.0 {
                return Err(Error::DegenerateHeatScale);
            }
            median
        }
    };

    let mut w_within = DenseMatrix::zeros(n, n);
    for &(i, j) in &within_pairs {
        let w = heat_weight(dist.get(i, j), t);
        w_within.set(i, j, w);
        w_within.set(j, i, w);
    }
    let mut w_between = DenseMatrix::zeros(n, n);
    for &(i, j) in &between_pairs {
        let w = heat_weight(dist.get(i, j), t);
        w_between.set(i, j, w);
        w_between.set(j, i, w);
    }

    // bridge each class's within-graph into one component
    for class in 1..=ds.class_count() {
        let members = ds.class_indices(class);
        loop {
            let comp = components(&w_within, &members);
            let ncomp = *comp.values().max().unwrap() + 1;
            if ncomp <= 1 {
                break;
            }
            let mut best: Option<(f64, usize, usize)> = None;
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[(a + 1)..] {
                    if comp[&i] == comp[&j] {
                        continue;
                    }
                    let d = dist.get(i, j);
                    if best.is_none_or(|(bd, bi, bj)| d < bd || (d == bd && (i, j) < (bi, bj))) {
                        best = Some((d, i, j));
                    }
                }
            }
            let (d, i, j) = best.expect("multiple components imply a crossing pair");
            let w = heat_weight(d, t);
            w_within.set(i, j, w);
            w_within.set(j, i, w);
        }
    }

    SupervisedGraph::assemble(w_within, w_between, labels, t)
}

/// Connected-component ids (0-based, in order of first appearance) of the
/// vertex set `members` under the positive entries of `w`.
fn components(w: &DenseMatrix, members: &[usize]) -> BTreeMap<usize, usize> {
    let mut comp: BTreeMap<usize, usize> = BTreeMap::new();
    let mut next = 0;
    for &start in members {
        if comp.contains_key(&start) {
            continue;
        }
        let mut stack = vec![start];
        comp.insert(start, next);
        while let Some(i) = stack.pop() {
            for &j in members {
                if !comp.contains_key(&j) && w.get(i, j) > 0.0 {
                    comp.insert(j, next);
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Normalized Laplacians `D^{-1/2} (D - W) D^{-1/2}` of the within and
/// between graphs. Both are exactly symmetric with eigenvalues in [0, 2].
pub fn laplacians(g: &SupervisedGraph) -> Result<(DenseMatrix, DenseMatrix)> {
    let l_w = normalized_laplacian(g.w_within(), g.deg_within(), "within")?;
    let l_b = normalized_laplacian(g.w_between(), g.deg_between(), "between")?;
    Ok((l_w, l_b))
}

fn normalized_laplacian(w: &DenseMatrix, deg: &[f64], tag: &'static str) -> Result<DenseMatrix> {
    let n = w.rows();
    if let Some(v) = deg.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDegree { vertex: v, graph: tag });
    }
    let inv_sqrt: Vec<f64> = deg.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        l.set(i, i, 1.0);
        for j in (i + 1)..n {
            let w_ij = w.get(i, j);
            if w_ij > 0.0 {
                let v = -w_ij * inv_sqrt[i] * inv_sqrt[j];
                l.set(i, j, v);
                l.set(j, i, v);
            }
        }
    }
    Ok(l)
}

/// Graph statistics per the separation bounds: volumes, hop diameters,
/// minimum weights, and degree ratios.
pub fn stats(g: &SupervisedGraph) -> Result<GraphStats> {
    let n = g.len();
    let classes = g.classes();

    let mut vol_within = BTreeMap::new();
    for &c in &classes {
        let v: f64 = (0..n).filter(|&i| g.labels()[i] == c).map(|i| g.deg_within()[i]).sum();
        vol_within.insert(c, v);
    }
    let vol_max = vol_within.values().fold(0.0_f64, |m, &v| m.max(v));

    let mut vol_between = BTreeMap::new();
    for (a, &k) in classes.iter().enumerate() {
        for &l in &classes[(a + 1)..] {
            let mut v = 0.0;
            for i in 0..n {
                if g.labels()[i] != k {
                    continue;
                }
                for j in 0..n {
                    if g.labels()[j] == l {
                        v += 2.0 * g.w_between().get(i, j);
                    }
                }
            }
            vol_between.insert((k, l), v);
        }
    }
    let vol_between_max = vol_between.values().fold(0.0_f64, |m, &v| m.max(v));

    let mut diameter = BTreeMap::new();
    let mut min_weight = BTreeMap::new();
    for &c in &classes {
        let members: Vec<usize> = (0..n).filter(|&i| g.labels()[i] == c).collect();
        diameter.insert(c, class_diameter(g.w_within(), &members, c)?);
        let mut wmin = f64::INFINITY;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[(a + 1)..] {
                let w = g.w_within().get(i, j);
                if w > 0.0 {
                    wmin = wmin.min(w);
                }
            }
        }
        min_weight.insert(c, wmin);
    }

    let w_bar_min = classes
        .iter()
        .map(|c| min_weight[c] / diameter[c] as f64)
        .fold(f64::INFINITY, f64::min);

    let beta: Vec<f64> = (0..n).map(|i| g.deg_within()[i] / g.deg_between()[i]).collect();
    let beta_min = beta.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let beta_max = beta.iter().fold(0.0_f64, |m, &v| m.max(v));
    let deg_within_min = g.deg_within().iter().fold(f64::INFINITY, |m, &v| m.min(v));

    Ok(GraphStats {
        vol_within,
        vol_max,
        vol_between,
        vol_between_max,
        diameter,
        min_weight,
        w_bar_min,
        beta,
        beta_min,
        beta_max,
        deg_within_min,
    })
}

/// All-pairs BFS hop diameter of one class's within-class component.
fn class_diameter(w: &DenseMatrix, members: &[usize], class: usize) -> Result<usize> {
    let mut diam = 0usize;
    for &start in members {
        let mut hop: BTreeMap<usize, usize> = BTreeMap::new();
        hop.insert(start, 0);
        let mut frontier = vec![start];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &i in &frontier {
                let h = hop[&i];
                for &j in members {
                    if !hop.contains_key(&j) && w.get(i, j) > 0.0 {
                        hop.insert(j, h + 1);
                        next.push(j);
                    }
                }
            }
            frontier = next;
        }
        if hop.len() != members.len() {
            return Err(Error::DisconnectedClass { class });
        }
        diam = diam.max(*hop.values().max().unwrap());
    }
    Ok(diam)
}

/// Deletes every between-class edge whose endpoints' classes lie in
/// different categories, then recomputes degrees. Within-class edges are
/// untouched. `category_of_class` maps each class label to its category.
pub fn restrict_to_categories(g: &SupervisedGraph, category_of_class: &BTreeMap<usize, usize>) -> Result<SupervisedGraph> {
    for c in g.classes() {
        if !category_of_class.contains_key(&c) {
            return Err(Error::BadParam(format!("class {c} has no category assignment")));
        }
    }
    let n = g.len();
    let mut wb = g.w_between().clone();
    for i in 0..n {
        for j in 0..n {
            if wb.get(i, j) > 0.0 {
                let ci = category_of_class[&g.labels()[i]];
                let cj = category_of_class[&g.labels()[j]];
                if ci != cj {
                    wb.set(i, j, 0.0);
                }
            }
        }
    }
    for i in 0..n {
        if wb.row(i).iter().sum::<f64>() <= 0.0 {
            return Err(Error::CategoryIsolatesVertex { vertex: i });
        }
    }
    SupervisedGraph::assemble(g.w_within().clone(), wb, g.labels().to_vec(), g.heat_scale())
}

/// Writes both graphs as an edge list, one `i j w class_i class_j` line per
/// undirected edge (within-class edges first).
pub fn write_edge_list(g: &SupervisedGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    let n = g.len();
    for w in [g.w_within(), g.w_between()] {
        for i in 0..n {
            for j in (i + 1)..n {
                let v = w.get(i, j);
                if v > 0.0 {
                    writeln!(file, "{i} {j} {v:.16e} {} {}", g.labels()[i], g.labels()[j])?;
                }
            }
        }
    }
    file.flush()?;
    Ok(())
}
