//! Numerical evaluation of the toolkit's separability and generalization
//! bounds: covering numbers, local density floors, the probability bounds
//! for Lipschitz and RBF interpolators under linear and nearest-neighbor
//! classification, the graph-parameter separation bounds, the
//! block-perturbation multi-category bound, the optimal kernel-scale cubic,
//! the condition parameter, and the intrinsic-dimension scaling estimate.
//!
//! Covering numbers and density floors are sample plug-ins (the underlying
//! class measures are unknown); reports label them empirical estimates.
//! Vacuous bound values (<= 0) are returned as-is so sweeps show where a
//! bound becomes informative.

use std::collections::BTreeMap;

use crate::classify::origin_margin;
use crate::dataset::Dataset;
use crate::embedding::sup_laplacian;
use crate::error::{Error, Result};
use crate::graph::{restrict_to_categories, GraphStats, SupervisedGraph};
use crate::numerics::{operator_norm, symmetric_eig, DenseMatrix};

/// Every scalar feeding the probability bounds.
#[derive(Debug, Clone)]
pub struct BoundInputs {
    /// Total training samples N.
    pub n_total: usize,
    /// Training samples of the class under test.
    pub n_class: usize,
    /// Neighborhood sample count Q.
    pub q: usize,
    pub delta: f64,
    pub epsilon: f64,
    /// Embedding dimension.
    pub dim: usize,
    /// Lipschitz constant of the interpolation map on class supports.
    pub lipschitz: f64,
    /// Lipschitz constant of the RBF kernel.
    pub kernel_lipschitz: f64,
    /// Coefficient magnitude bound of the RBF interpolator.
    pub coeff_bound: f64,
    /// Plain separation margin.
    pub gamma: f64,
    /// Mean-margin over Q-point class averages (>= gamma always holds).
    pub gamma_q: f64,
    /// Empirical lower bound on the class measure of a delta-ball.
    pub density_floor: f64,
    /// Embedded co-diameter at ambient scale 2*delta.
    pub codiameter_2delta: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        if self.n_class == 0 || self.n_total == 0 {
            return Err(Error::BadParam("sample counts must be positive".into()));
        }
        if self.dim == 0 {
            return Err(Error::BadParam("dimension must be positive".into()));
        }
        let fields = [
            ("delta", self.delta),
            ("epsilon", self.epsilon),
            ("lipschitz", self.lipschitz),
            ("kernel_lipschitz", self.kernel_lipschitz),
            ("coeff_bound", self.coeff_bound),
            ("gamma", self.gamma),
            ("gamma_q", self.gamma_q),
            ("density_floor", self.density_floor),
            ("codiameter_2delta", self.codiameter_2delta),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::BadParam(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.density_floor > 1.0 {
            return Err(Error::BadParam(format!("density_floor must lie in [0, 1], got {}", self.density_floor)));
        }
        Ok(())
    }
}

/// A probability lower bound together with its side conditions.
#[derive(Debug, Clone, Copy)]
pub struct ProbabilityBound {
    /// Lower bound on the correct-classification probability; may be
    /// negative (vacuous) and is reported as computed.
    pub value: f64,
    /// Whether the margin/regularity inequality of the bound holds.
    pub condition_ok: bool,
    /// Whether the sample condition `N_m * eta > Q` holds.
    pub applicable: bool,
}

/// Two-class separation bound from graph statistics, in both coordinate
/// scales, with the weight-parameter threshold below which it applies.
#[derive(Debug, Clone, Copy)]
pub struct TwoClassBound {
    pub z_bound: f64,
    pub y_bound: f64,
    pub mu_max: f64,
    pub applicable: bool,
}

/// Output of the block-perturbation multi-category analysis.
#[derive(Debug, Clone, Copy)]
pub struct CategoryBound {
    /// Spectral norm of the cross-category component of the objective.
    pub offdiag_norm: f64,
    /// Smallest eigenvalue gap of the block-diagonal objective.
    pub eigen_gap: f64,
    pub xi: f64,
    pub zeta: f64,
    /// Worst through-origin margin over the per-category embeddings.
    pub category_margin: f64,
    /// Guaranteed margin of the combined embedding when applicable.
    pub predicted_margin: f64,
    pub applicable: bool,
}

/// Collected separability diagnostics for one run.
#[derive(Debug, Clone)]
pub struct SeparabilityReport {
    pub empirical_margin: f64,
    /// z-scale separation of the leading coordinate (two-class runs).
    pub z_separation: Option<f64>,
    pub two_class: Option<TwoClassBound>,
    pub origin_bound: Option<f64>,
    pub category: Option<CategoryBound>,
    pub kappa: f64,
    pub kappa_finite: bool,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Greedy sample cover: farthest-point-first centers until every point lies
/// strictly within `eps` of a center. An upper bound on the minimal sample
/// cover.
pub fn covering_number_greedy(points: &DenseMatrix, eps: f64) -> Result<usize> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::BadParam(format!("eps must be > 0, got {eps}")));
    }
    let n = points.rows();
    if n == 0 {
        return Ok(0);
    }
    let mut nearest = vec![f64::INFINITY; n];
    let mut count = 0usize;
    let mut next = 0usize;
    loop {
        count += 1;
        for i in 0..n {
            let d = euclid(points.row(i), points.row(next));
            if d < nearest[i] {
                nearest[i] = d;
            }
        }
        let mut far_idx = None;
        let mut far_d = 0.0;
        for i in 0..n {
            if nearest[i] >= eps && nearest[i] > far_d {
                far_d = nearest[i];
                far_idx = Some(i);
            }
        }
        match far_idx {
            Some(i) => next = i,
            None => return Ok(count),
        }
    }
}

/// Minimal sample cover by exhaustive subset search; limited to 12 points.
pub fn covering_number_exact(points: &DenseMatrix, eps: f64) -> Result<usize> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::BadParam(format!("eps must be > 0, got {eps}")));
    }
    let n = points.rows();
    if n > 12 {
        return Err(Error::ExactCoveringTooLarge(n));
    }
    if n == 0 {
        return Ok(0);
    }
    // bitmask of points each candidate center covers
    let cover: Vec<u32> = (0..n)
        .map(|c| {
            let mut mask = 0u32;
            for i in 0..n {
                if euclid(points.row(i), points.row(c)) < eps {
                    mask |= 1 << i;
                }
            }
            mask
        })
        .collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = n;
    for subset in 1u32..(1 << n) {
        let size = subset.count_ones() as usize;
        if size >= best {
            continue;
        }
        let mut covered = 0u32;
        for c in 0..n {
            if subset & (1 << c) != 0 {
                covered |= cover[c];
            }
        }
        if covered == full {
            best = size;
        }
    }
    Ok(best)
}

/// Empirical plug-in for the smallest class measure of a delta-ball: the
/// minimum over class samples of the in-class fraction strictly within
/// `delta` (each point counts itself).
pub fn estimate_density_floor(ds: &Dataset, class: usize, delta: f64) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::BadParam(format!("delta must be > 0, got {delta}")));
    }
    let members = ds.class_indices(class);
    if members.is_empty() {
        return Err(Error::BadParam(format!("class {class} has no samples")));
    }
    let n_m = members.len() as f64;
    let mut floor = 1.0_f64;
    for &i in &members {
        let inside = members
            .iter()
            .filter(|&&j| euclid(ds.points().row(i), ds.points().row(j)) < delta)
            .count();
        floor = floor.min(inside as f64 / n_m);
    }
    Ok(floor)
}

/// Covering-number accuracy bound for the linear classifier:
/// `1 - cover / (2 N_m)`, applicable when `N_m >= cover`.
pub fn covering_accuracy_bound(n_class: usize, cover_count: usize) -> (f64, bool) {
    let value = 1.0 - cover_count as f64 / (2.0 * n_class as f64);
    (value, n_class >= cover_count)
}

/// e^{-num/den} for nonnegative denominators, with the zero-numerator case
/// resolved first so `Q = 0` style inputs stay finite.
fn exp_neg_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        1.0
    } else if den == 0.0 {
        if num > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (-num / den).exp()
    }
}

fn sample_term(inputs: &BoundInputs) -> f64 {
    let n_m = inputs.n_class as f64;
    let dev = n_m * inputs.density_floor - inputs.q as f64;
    (-2.0 * dev * dev / n_m).exp()
}

fn sample_condition(inputs: &BoundInputs) -> bool {
    inputs.n_class as f64 * inputs.density_floor > inputs.q as f64
}

/// Exponential accuracy bound, linear classifier, generic Lipschitz
/// interpolator: `1 - exp(-2 (N_m eta - Q)^2 / N_m)
/// - 2 d exp(-Q eps^2 / (2 L^2 delta^2))`, under the margin condition
/// `L delta + sqrt(d) eps <= gamma_Q / 2`.
pub fn lipschitz_linear_bound(inputs: &BoundInputs) -> Result<ProbabilityBound> {
    inputs.validate()?;
    let deviation = 2.0 * inputs.dim as f64
        * exp_neg_ratio(
            inputs.q as f64 * inputs.epsilon * inputs.epsilon,
            2.0 * inputs.lipschitz * inputs.lipschitz * inputs.delta * inputs.delta,
        );
    let value = 1.0 - sample_term(inputs) - deviation;
    let condition_ok =
        inputs.lipschitz * inputs.delta + (inputs.dim as f64).sqrt() * inputs.epsilon <= inputs.gamma_q / 2.0;
    Ok(ProbabilityBound { value, condition_ok, applicable: sample_condition(inputs) })
}

/// Same exponential bound under nearest-neighbor classification; the margin
/// condition additionally pays the embedded co-diameter:
/// `L delta + sqrt(d) eps + D_{2 delta} <= gamma / 2`.
pub fn lipschitz_nn_bound(inputs: &BoundInputs) -> Result<ProbabilityBound> {
    let mut out = lipschitz_linear_bound(inputs)?;
    out.condition_ok = inputs.lipschitz * inputs.delta
        + (inputs.dim as f64).sqrt() * inputs.epsilon
        + inputs.codiameter_2delta
        <= inputs.gamma / 2.0;
    Ok(out)
}

fn rbf_deviation_term(inputs: &BoundInputs) -> f64 {
    2.0 * inputs.n_total as f64
        * exp_neg_ratio(
            (inputs.q as f64 - 1.0) * inputs.epsilon * inputs.epsilon,
            2.0 * inputs.kernel_lipschitz * inputs.kernel_lipschitz * inputs.delta * inputs.delta,
        )
}

/// RBF-interpolator accuracy bound, linear classifier: the deviation term
/// becomes `2 N exp(-(Q-1) eps^2 / (2 L_phi^2 delta^2))` and the margin
/// condition `sqrt(d) C (L_phi delta + eps) <= gamma_Q / 2`.
pub fn rbf_linear_bound(inputs: &BoundInputs) -> Result<ProbabilityBound> {
    inputs.validate()?;
    let value = 1.0 - sample_term(inputs) - rbf_deviation_term(inputs);
    let condition_ok = (inputs.dim as f64).sqrt()
        * inputs.coeff_bound
        * (inputs.kernel_lipschitz * inputs.delta + inputs.epsilon)
        <= inputs.gamma_q / 2.0;
    Ok(ProbabilityBound { value, condition_ok, applicable: sample_condition(inputs) })
}

/// RBF-interpolator accuracy bound, nearest-neighbor classifier; the margin
/// condition pays the embedded co-diameter.
pub fn rbf_nn_bound(inputs: &BoundInputs) -> Result<ProbabilityBound> {
    inputs.validate()?;
    let value = 1.0 - sample_term(inputs) - rbf_deviation_term(inputs);
    let condition_ok = (inputs.dim as f64).sqrt()
        * inputs.coeff_bound
        * (inputs.kernel_lipschitz * inputs.delta + inputs.epsilon)
        + inputs.codiameter_2delta
        <= inputs.gamma / 2.0;
    Ok(ProbabilityBound { value, condition_ok, applicable: sample_condition(inputs) })
}

/// Two-class separation lower bound from graph statistics. For
/// `mu < mu_max = w_bar_min / (beta_max V_b_max)` the normalized-coordinate
/// separation is at least
/// `(1 - sqrt(mu beta_max V_b_max / w_bar_min)) / sqrt(V_max)`, and the
/// unnormalized bound multiplies by `sqrt(d_w_min)`. At or beyond `mu_max`
/// both bounds are reported 0 and inapplicable.
pub fn two_class_separation_bound(stats: &GraphStats, mu: f64) -> Result<TwoClassBound> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::BadParam(format!("mu must be finite and > 0, got {mu}")));
    }
    let mu_max = stats.w_bar_min / (stats.beta_max * stats.vol_between_max);
    if mu >= mu_max {
        return Ok(TwoClassBound { z_bound: 0.0, y_bound: 0.0, mu_max, applicable: false });
    }
    let z_bound = (1.0 - (mu * stats.beta_max * stats.vol_between_max / stats.w_bar_min).sqrt())
        / stats.vol_max.sqrt();
    let y_bound = stats.deg_within_min.sqrt() * z_bound;
    Ok(TwoClassBound { z_bound, y_bound, mu_max, applicable: true })
}

/// Lower bound on the distance of either class support to the origin in a
/// one-dimensional embedding: half the separation, shrunk by the degree
/// ratio spread `beta_min / beta_max`.
pub fn origin_distance_bound(stats: &GraphStats, separation: f64) -> Result<f64> {
    if !separation.is_finite() || separation < 0.0 {
        return Err(Error::BadParam(format!("separation must be finite and >= 0, got {separation}")));
    }
    Ok(0.5 * (stats.beta_min / stats.beta_max) * separation)
}

fn xi_zeta(offdiag_norm: f64, eigen_gap: f64, n: usize) -> (f64, f64) {
    let xi = if eigen_gap > 0.0 && 2.0 * offdiag_norm < eigen_gap {
        (1.0 - 4.0 * offdiag_norm * offdiag_norm / (eigen_gap * eigen_gap)).max(0.0).sqrt()
    } else {
        0.0
    };
    let zeta = (2.0 - 2.0 * xi + 2.0 * (n as f64 * (1.0 - xi * xi)).sqrt()).max(0.0).sqrt();
    (xi, zeta)
}

/// Multi-category separability via block perturbation. The objective
/// `L_w - mu L_b` is compared to its category-restricted counterpart; the
/// within-category embeddings (dimension per `category_dims`) provide the
/// through-origin margin `category_margin`, and the combined embedding of
/// dimension `sum(d_q)` is guaranteed a margin of
/// `category_margin / sqrt(2) - 2 zeta` when the off-diagonal norm stays
/// below half the eigenvalue gap and `zeta < category_margin / (2 sqrt 2)`.
pub fn category_perturbation_bound(
    g: &SupervisedGraph,
    mu: f64,
    category_of_class: &BTreeMap<usize, usize>,
    category_dims: &BTreeMap<usize, usize>,
) -> Result<CategoryBound> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::BadParam(format!("mu must be finite and > 0, got {mu}")));
    }
    let classes = g.classes();
    let mut categories: Vec<usize> = Vec::new();
    let mut classes_of: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &c in &classes {
        let q = *category_of_class
            .get(&c)
            .ok_or_else(|| Error::BadParam(format!("class {c} has no category assignment")))?;
        classes_of.entry(q).or_default().push(c);
        if !categories.contains(&q) {
            categories.push(q);
        }
    }
    categories.sort_unstable();
    if categories.len() < 2 {
        return Err(Error::BadParam("need at least two categories".into()));
    }
    for (&q, cs) in &classes_of {
        if cs.len() < 2 {
            return Err(Error::BadParam(format!("category {q} has a single class")));
        }
        if !category_dims.contains_key(&q) {
            return Err(Error::BadParam(format!("category {q} has no embedding dimension")));
        }
    }

    let restricted = restrict_to_categories(g, category_of_class)?;
    let full = crate::embedding::objective_matrix(g, mu)?;
    let blocked = crate::embedding::objective_matrix(&restricted, mu)?;
    let offdiag = full.sub(&blocked)?;
    let offdiag_norm = operator_norm(&offdiag)?;

    let spectrum = symmetric_eig(&blocked, 1e-10)?;
    let mut eigen_gap = f64::INFINITY;
    for pair in spectrum.values().windows(2) {
        eigen_gap = eigen_gap.min(pair[1] - pair[0]);
    }
    let eigen_gap = eigen_gap.max(0.0);

    // per-category embeddings on the restricted graph, through-origin margin
    let mut category_margin = f64::INFINITY;
    for &q in &categories {
        let members: Vec<usize> = (0..g.len())
            .filter(|&i| category_of_class[&g.labels()[i]] == q)
            .collect();
        let sub = restricted.subgraph(&members)?;
        let d_q = category_dims[&q];
        let emb = sup_laplacian(&sub, d_q, mu)?;
        let sub_labels = sub.labels();
        let cs = &classes_of[&q];
        for (a, &k) in cs.iter().enumerate() {
            for &l in &cs[(a + 1)..] {
                let rows_k: Vec<Vec<f64>> = (0..sub.len())
                    .filter(|&i| sub_labels[i] == k)
                    .map(|i| emb.coords().row(i).to_vec())
                    .collect();
                let rows_l: Vec<Vec<f64>> = (0..sub.len())
                    .filter(|&i| sub_labels[i] == l)
                    .map(|i| emb.coords().row(i).to_vec())
                    .collect();
                let m = origin_margin(&DenseMatrix::from_rows(&rows_k)?, &DenseMatrix::from_rows(&rows_l)?)?;
                category_margin = category_margin.min(m);
            }
        }
    }

    let (xi, zeta) = xi_zeta(offdiag_norm, eigen_gap, g.len());
    let predicted_margin = category_margin / std::f64::consts::SQRT_2 - 2.0 * zeta;
    let applicable = eigen_gap > 0.0
        && 2.0 * offdiag_norm < eigen_gap
        && zeta < category_margin / (2.0 * std::f64::consts::SQRT_2);
    Ok(CategoryBound { offdiag_norm, eigen_gap, xi, zeta, category_margin, predicted_margin, applicable })
}

/// Coefficients of the kernel-scale condition: with `a = beta sqrt(N)`,
/// `a1 = sqrt(2 d) a e^{-1/2} delta` and `a2 = sqrt(d) a epsilon`.
pub fn cubic_coefficients(beta_const: f64, n_total: usize, dim: usize, delta: f64, epsilon: f64) -> Result<(f64, f64)> {
    for (name, v) in [("beta", beta_const), ("delta", delta), ("epsilon", epsilon)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::BadParam(format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    let a = beta_const * (n_total as f64).sqrt();
    let a1 = (2.0 * dim as f64).sqrt() * a * (-0.5_f64).exp() * delta;
    let a2 = (dim as f64).sqrt() * a * epsilon;
    Ok((a1, a2))
}

/// Unique positive root of
/// `2 alpha a2 s^3 + 2 alpha a1 s^2 - a2 n s - a1 (n+1) = 0`, the
/// stationary point of the kernel-scale condition. Bracketing bisection
/// followed by Newton polish; the cubic has exactly one positive root.
pub fn optimal_kernel_scale(alpha: f64, a1: f64, a2: f64, n: usize) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::BadParam(format!("alpha must be finite and > 0, got {alpha}")));
    }
    if !a1.is_finite() || !a2.is_finite() || a1 < 0.0 || a2 < 0.0 {
        return Err(Error::BadParam("a1 and a2 must be finite and >= 0".into()));
    }
    if a1 == 0.0 && a2 == 0.0 {
        return Err(Error::BadParam("a1 and a2 must not both vanish".into()));
    }
    if n == 0 {
        return Err(Error::BadParam("ambient dimension must be >= 1".into()));
    }
    let nf = n as f64;
    let g = |s: f64| 2.0 * alpha * a2 * s * s * s + 2.0 * alpha * a1 * s * s - a2 * nf * s - a1 * (nf + 1.0);
    let dg = |s: f64| 6.0 * alpha * a2 * s * s + 4.0 * alpha * a1 * s - a2 * nf;

    let mut lo = 1e-12;
    // the polynomial is negative just right of zero and grows to +inf
    let mut hi = 1.0;
    let mut guard = 0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(Error::BadParam("kernel-scale cubic has no bracketable positive root".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut root = 0.5 * (lo + hi);
    for _ in 0..6 {
        let slope = dg(root);
        if slope.abs() <= f64::MIN_POSITIVE {
            break;
        }
        let step = g(root) / slope;
        let candidate = root - step;
        if candidate > 0.0 && candidate.is_finite() {
            root = candidate;
        } else {
            break;
        }
    }
    Ok(root)
}

/// Condition parameter `sqrt(d) C / (sigma gamma)`. A zero margin returns
/// an infinity sentinel with the finite flag cleared.
pub fn condition_kappa(dim: usize, coeff_bound: f64, sigma: f64, gamma: f64) -> Result<(f64, bool)> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::BadParam(format!("sigma must be finite and > 0, got {sigma}")));
    }
    if coeff_bound.is_nan() || gamma.is_nan() || coeff_bound < 0.0 || gamma < 0.0 {
        return Err(Error::BadParam("coeff_bound and gamma must be >= 0".into()));
    }
    if gamma == 0.0 {
        return Ok((f64::INFINITY, false));
    }
    Ok(((dim as f64).sqrt() * coeff_bound / (sigma * gamma), true))
}

/// Order-of-magnitude misclassification estimate as a function of the
/// intrinsic dimension `D` of the class supports:
/// `exp(-N_m delta^{2D} / Theta^{2D})
/// + N exp(-N_m delta^{D-2} eps^2 / (L_phi^2 Theta^D))`.
///
/// A plotting aid, not a certified bound.
pub fn dimension_scaling_estimate(
    intrinsic_dim: u32,
    delta: f64,
    theta: f64,
    n_class: usize,
    n_total: usize,
    epsilon: f64,
    kernel_lipschitz: f64,
) -> Result<f64> {
    for (name, v) in [("delta", delta), ("theta", theta), ("epsilon", epsilon), ("kernel_lipschitz", kernel_lipschitz)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::BadParam(format!("{name} must be finite and > 0, got {v}")));
        }
    }
    if intrinsic_dim == 0 {
        return Err(Error::BadParam("intrinsic dimension must be >= 1".into()));
    }
    let n_m = n_class as f64;
    let d = intrinsic_dim as i32;
    let first = (-n_m * (delta / theta).powi(2 * d)).exp();
    let second = n_total as f64
        * (-n_m * delta.powi(d - 2) * epsilon * epsilon / (kernel_lipschitz * kernel_lipschitz * theta.powi(d))).exp();
    Ok(first + second)
}
