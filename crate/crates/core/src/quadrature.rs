//! Full-manifold Monte Carlo integration and reduced section quadrature.
//!
//! Measure conventions on `M`:
//!
//! * group targets: Haar measure of total mass one;
//! * linear targets (`g`, `p`): Lebesgue measure in trace-orthonormal
//!   coordinates;
//! * `S^n`: round measure of the unit sphere;
//! * `H^2`: hyperbolic area, integrals taken over the disk of radius
//!   [`HYPERBOLIC_TRUNCATION`] about the base point unless a rule with a
//!   different radius is passed explicitly.
//!
//! Reduced integrals are `(c/|W|) sum_i w_i f(s_i) delta(s_i)`, with `delta`
//! in closed-form units (numeric values divided by the calibration scale
//! from [`crate::jacobians::closed_form_scale`]) and, for group targets,
//! torus weights divided by the cell volume `(2 pi)^r`. The constant `c` is
//! always obtained from [`calibrate_c`]; [`riemannian_orbit_constant`]
//! converts it to the Riemannian `vol(G/H)`.

use gauss_quad::GaussLegendre;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::actions::{ActionKind, AmbientPoint, PolarAction};
use crate::error::{Error, Result};
use crate::jacobians::{closed_form_scale, delta_closed, delta_numeric};
use crate::rng::stream_rng;

/// Half-width of the box on which Gaussian-weighted linear targets are
/// integrated; the Gaussian tail beyond it is below `1e-27`.
pub const EUCLIDEAN_HALF_WIDTH: f64 = 8.0;

/// Radius of the `H^2` disk used by default for calibration and Monte Carlo.
pub const HYPERBOLIC_TRUNCATION: f64 = 3.0;

/// Standard deviation of the Gaussian proposal on linear targets.
pub const GAUSSIAN_PROPOSAL_SIGMA: f64 = 1.25;

/// Samples per parallel Monte Carlo chunk; chunk `k` draws from stream `k`.
pub const MC_CHUNK: usize = 8192;

/// Integrand on the manifold.
pub type AmbientFn<'a> = dyn Fn(&AmbientPoint) -> f64 + Sync + 'a;

/// Integrand on the section.
pub type SectionFn<'a> = dyn Fn(&[f64]) -> f64 + Sync + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            stderr: 0.0,
            n_samples: 0,
        }
    }

    /// `|self - other|` in units of the combined standard error.
    pub fn z_score(&self, other: &Estimate) -> f64 {
        let se = self.stderr.hypot(other.stderr);
        let diff = (self.value - other.value).abs();
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / se
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SectionDomain {
    /// `[0, 2 pi)^rank`.
    TorusCell { rank: usize },
    /// `[-half_width, half_width]^rank`.
    EuclideanBox { rank: usize, half_width: f64 },
    /// A line segment split into panels at `breaks`.
    Interval { breaks: Vec<f64> },
}

impl SectionDomain {
    pub fn coordinate_volume(&self) -> f64 {
        match self {
            SectionDomain::TorusCell { rank } => (2.0 * PI).powi(*rank as i32),
            SectionDomain::EuclideanBox { rank, half_width } => {
                (2.0 * half_width).powi(*rank as i32)
            }
            SectionDomain::Interval { breaks } => breaks[breaks.len() - 1] - breaks[0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub domain: SectionDomain,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvariantViolation("quadrature order must be at least 1".into()));
    }
    Ok(())
}

/// Gauss-Legendre nodes and weights on `[a, b]`; order 1 is the midpoint rule.
fn legendre_panel(order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    if order == 1 {
        return vec![(mid, b - a)];
    }
    let rule = GaussLegendre::new(order).expect("order >= 2");
    rule.nodes()
        .zip(rule.weights())
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Composite Gauss-Legendre rule with `order` nodes on each panel.
pub fn panel_rule(order: usize, breaks: &[f64]) -> Result<QuadratureRule> {
    check_order(order)?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvariantViolation(format!(
            "panel breaks must be strictly increasing, got {breaks:?}"
        )));
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in breaks.windows(2) {
        for (x, wt) in legendre_panel(order, w[0], w[1]) {
            nodes.push(vec![x]);
            weights.push(wt);
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: SectionDomain::Interval {
            breaks: breaks.to_vec(),
        },
    })
}

fn tensor(axes: &[Vec<(f64, f64)>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut nodes = vec![Vec::new()];
    let mut weights = vec![1.0];
    for axis in axes {
        let mut next_nodes = Vec::with_capacity(nodes.len() * axis.len());
        let mut next_weights = Vec::with_capacity(nodes.len() * axis.len());
        for (n, w) in nodes.iter().zip(&weights) {
            for (x, wx) in axis {
                let mut m = n.clone();
                m.push(*x);
                next_nodes.push(m);
                next_weights.push(w * wx);
            }
        }
        nodes = next_nodes;
        weights = next_weights;
    }
    (nodes, weights)
}

/// Iterated Gauss-Legendre on `[-l, l]^2`. For each outer node `x` the
/// inner panels break where a wall `alpha = 0` crosses the vertical line, so
/// the kinks of `prod |alpha|^m` never fall inside a panel.
fn wall_adapted_plane(
    action: &PolarAction,
    order: usize,
    outer: &[(f64, f64)],
    l: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let roots: &[Vec<f64>] = action
        .roots
        .as_ref()
        .map(|r| r.positive_roots.as_slice())
        .unwrap_or(&[]);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for &(x, wx) in outer {
        let mut breaks = vec![-l, l];
        for a in roots {
            if a[1] != 0.0 {
                let y = -a[0] * x / a[1];
                if y.abs() < l {
                    breaks.push(y);
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|b, a| (*b - *a).abs() < 1e-12);
        for w in breaks.windows(2) {
            for (y, wy) in legendre_panel(order, w[0], w[1]) {
                nodes.push(vec![x, y]);
                weights.push(wx * wy);
            }
        }
    }
    (nodes, weights)
}

/// Default section rule of the action:
///
/// * torus sections: tensor trapezoid with `order` points per circle;
/// * linear targets: Gauss-Legendre on `[-L, L]^r`, `L =`
///   [`EUCLIDEAN_HALF_WIDTH`], `order` nodes on each half-axis; in rank 2
///   the inner axis is also split at the walls;
/// * model spaces: Gauss-Legendre panels split at the singular points
///   (`S^n`: `[-pi, pi]`; `H^2`: `[-R, R]` with `R =`
///   [`HYPERBOLIC_TRUNCATION`]; Hermann: breaks at `+-pi/2`).
pub fn section_rule(action: &PolarAction, order: usize) -> Result<QuadratureRule> {
    check_order(order)?;
    let r = action.section_dim;
    match action.kind {
        ActionKind::Conjugation => {
            let h = 2.0 * PI / order as f64;
            let axis: Vec<(f64, f64)> = (0..order).map(|k| (k as f64 * h, h)).collect();
            let (nodes, weights) = tensor(&vec![axis; r]);
            Ok(QuadratureRule {
                nodes,
                weights,
                domain: SectionDomain::TorusCell { rank: r },
            })
        }
        ActionKind::AdjointRep | ActionKind::SRepresentation => {
            let l = EUCLIDEAN_HALF_WIDTH;
            let mut axis = legendre_panel(order, -l, 0.0);
            axis.extend(legendre_panel(order, 0.0, l));
            let (nodes, weights) = if r == 2 {
                wall_adapted_plane(action, order, &axis, l)
            } else {
                tensor(&vec![axis; r])
            };
            Ok(QuadratureRule {
                nodes,
                weights,
                domain: SectionDomain::EuclideanBox {
                    rank: r,
                    half_width: l,
                },
            })
        }
        ActionKind::SymmetricSpaceCompact => panel_rule(order, &[-PI, 0.0, PI]),
        ActionKind::SymmetricSpaceNoncompact => truncated_rule(action, order, HYPERBOLIC_TRUNCATION),
        ActionKind::Hermann => panel_rule(order, &[-PI, -PI / 2.0, PI / 2.0, PI]),
    }
}

/// Radial rule on `[-radius, radius]` for the noncompact model space; the
/// reduced integral then covers the geodesic disk of that radius.
pub fn truncated_rule(action: &PolarAction, order: usize, radius: f64) -> Result<QuadratureRule> {
    if action.kind != ActionKind::SymmetricSpaceNoncompact {
        return Err(Error::Unsupported(format!(
            "truncated radial rule on {}",
            action.id
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvariantViolation(format!("truncation radius {radius}")));
    }
    panel_rule(order, &[-radius, 0.0, radius])
}

/// Which `delta` engine a reduced integral uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMethod {
    #[default]
    Numeric,
    ClosedForm,
}

/// `delta` in closed-form units.
pub fn delta_value(action: &PolarAction, s: &[f64], method: DeltaMethod, kappa: f64) -> Result<f64> {
    match method {
        DeltaMethod::Numeric => Ok(delta_numeric(action, s)? / kappa),
        DeltaMethod::ClosedForm => delta_closed(action, s)?.ok_or_else(|| {
            Error::Unsupported(format!("{} has no closed-form delta", action.id))
        }),
    }
}

fn default_method(action: &PolarAction) -> DeltaMethod {
    if action.has_closed_form() {
        DeltaMethod::ClosedForm
    } else {
        DeltaMethod::Numeric
    }
}

/// Factor applied to section weights: `(2 pi)^{-r}` on group targets so
/// that the torus has unit volume, 1 otherwise.
pub fn weight_normalization(action: &PolarAction) -> f64 {
    match action.kind {
        ActionKind::Conjugation => (2.0 * PI).powi(-(action.section_dim as i32)),
        _ => 1.0,
    }
}

/// Known integral of the calibration reference density over `M`.
pub fn reference_integral(action: &PolarAction) -> f64 {
    match action.kind {
        ActionKind::Conjugation => 1.0,
        ActionKind::AdjointRep | ActionKind::SRepresentation => {
            (2.0 * PI).powf(action.ambient_dim as f64 / 2.0)
        }
        ActionKind::SymmetricSpaceCompact | ActionKind::Hermann => sphere_area(action.ambient_dim),
        ActionKind::SymmetricSpaceNoncompact => disk_area(HYPERBOLIC_TRUNCATION),
    }
}

/// Reference density on `M` at a section point: the standard Gaussian for
/// linear targets, 1 otherwise.
pub fn reference_weight(action: &PolarAction, s: &[f64]) -> Result<f64> {
    Ok(match action.kind {
        ActionKind::AdjointRep | ActionKind::SRepresentation => {
            let p = action.section_embed(s)?;
            let x = action.euclidean_coords(&p).expect("linear target");
            (-0.5 * x.norm_squared()).exp()
        }
        _ => 1.0,
    })
}

/// Area of the unit `n`-sphere.
pub fn sphere_area(n: usize) -> f64 {
    // |S^n| = 2 pi |S^{n-2}| / (n - 1), |S^0| = 2, |S^1| = 2 pi.
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI * sphere_area(n - 2) / (n as f64 - 1.0),
    }
}

/// Area of a geodesic disk of radius `r` in `H^2`.
pub fn disk_area(r: f64) -> f64 {
    2.0 * PI * (r.cosh() - 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub action: String,
    pub c: f64,
    /// Ratio `delta_numeric / delta_closed`; numeric values are divided by it.
    pub kappa: f64,
    pub order: usize,
    pub weyl_order: usize,
    pub reference: f64,
}

/// Solves `(c/|W|) sum w_i delta(s_i) ref(s_i) = reference_integral` for `c`.
pub fn calibrate_c(action: &PolarAction, order: usize) -> Result<Calibration> {
    let rule = section_rule(action, order)?;
    let kappa = closed_form_scale(action)?;
    let method = default_method(action);
    let norm = weight_normalization(action);
    let sum = rule
        .nodes
        .par_iter()
        .zip(&rule.weights)
        .map(|(s, w)| Ok(w * norm * delta_value(action, s, method, kappa)? * reference_weight(action, s)?))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum::<f64>();
    if sum.abs() < 1e-300 || !sum.is_finite() {
        return Err(Error::DegenerateCalibration(sum));
    }
    let reference = reference_integral(action);
    Ok(Calibration {
        action: action.id.clone(),
        c: action.weyl_order as f64 * reference / sum,
        kappa,
        order,
        weyl_order: action.weyl_order,
        reference,
    })
}

fn check_calibration(action: &PolarAction, cal: &Calibration) -> Result<()> {
    if cal.action != action.id {
        return Err(Error::Uncalibrated {
            expected: action.id.clone(),
            found: cal.action.clone(),
        });
    }
    Ok(())
}

/// `(c/|W|) sum w_i f(s_i) delta(s_i)` over an explicit rule.
pub fn reduced_integrate_with_rule(
    action: &PolarAction,
    cal: &Calibration,
    f: &SectionFn,
    rule: &QuadratureRule,
    method: DeltaMethod,
) -> Result<f64> {
    check_calibration(action, cal)?;
    let norm = weight_normalization(action);
    let terms = rule
        .nodes
        .par_iter()
        .zip(&rule.weights)
        .map(|(s, w)| {
            let d = delta_value(action, s, method, cal.kappa)?;
            let v = if d == 0.0 { 0.0 } else { f(s) * d };
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    sample: format!("{s:?}"),
                    value: v,
                });
            }
            Ok(w * norm * v)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(cal.c / action.weyl_order as f64 * terms.iter().sum::<f64>())
}

/// Reduced integral of a `G`-invariant function given by its restriction
/// to the section, using the default rule of the given order.
pub fn reduced_integrate(
    action: &PolarAction,
    cal: &Calibration,
    f: &SectionFn,
    order: usize,
    method: DeltaMethod,
) -> Result<f64> {
    let rule = section_rule(action, order)?;
    reduced_integrate_with_rule(action, cal, f, &rule, method)
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn merge(self, o: Moments) -> Moments {
        Moments {
            n: self.n + o.n,
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
        }
    }

    fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Unbiased sample variance.
    fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let m = self.mean();
        ((self.sum_sq - n * m * m) / (n - 1.0)).max(0.0)
    }

    fn estimate(&self) -> Estimate {
        Estimate {
            value: self.mean(),
            stderr: (self.variance() / self.n as f64).sqrt(),
            n_samples: self.n,
        }
    }
}

/// Draws a point of `M` together with its importance weight.
fn sample_ambient<R: Rng + ?Sized>(action: &PolarAction, rng: &mut R) -> (AmbientPoint, f64) {
    match action.kind {
        ActionKind::Conjugation => (AmbientPoint::Group(action.sample_acting(rng)), 1.0),
        ActionKind::AdjointRep | ActionKind::SRepresentation => {
            let d = action.ambient_dim;
            let sigma = GAUSSIAN_PROPOSAL_SIGMA;
            let x: Vec<f64> = (0..d)
                .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let weight = (2.0 * PI * sigma * sigma).powf(d as f64 / 2.0) * (r2 / (2.0 * sigma * sigma)).exp();
            (action.point_from_coords(&x).expect("linear target"), weight)
        }
        ActionKind::SymmetricSpaceCompact | ActionKind::Hermann => {
            let dim = action.ambient_dim + 1;
            let v = loop {
                let v = nalgebra::DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                let n = v.norm();
                if n > 1e-12 {
                    break v / n;
                }
            };
            (AmbientPoint::Model(v), sphere_area(action.ambient_dim))
        }
        ActionKind::SymmetricSpaceNoncompact => {
            let big = HYPERBOLIC_TRUNCATION;
            let u: f64 = rng.random();
            // Inverse of the radial CDF (cosh r - 1)/(cosh R - 1).
            let r = (1.0 + u * (big.cosh() - 1.0)).acosh();
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let v = nalgebra::DVector::from_vec(vec![r.sinh() * phi.cos(), r.sinh() * phi.sin(), r.cosh()]);
            (AmbientPoint::Model(v), disk_area(big))
        }
    }
}

/// Monte Carlo estimate of `int_M f`. Samples are drawn in chunks of
/// [`MC_CHUNK`]; chunk `k` uses stream `k` of `seed`, so results depend only
/// on `(seed, n)` and not on the thread count.
pub fn mc_integrate_full(action: &PolarAction, f: &AmbientFn, n: usize, seed: u64) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let chunks = n.div_ceil(MC_CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let count = MC_CHUNK.min(n - k * MC_CHUNK);
            let mut m = Moments::default();
            for _ in 0..count {
                let (p, w) = sample_ambient(action, &mut rng);
                let v = f(&p) * w;
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        sample: format!("{p:?}"),
                        value: v,
                    });
                }
                m.push(v);
            }
            Ok(m)
        })
        .collect::<Result<Vec<Moments>>>()?;
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    Ok(total.estimate())
}

/// Inner orbit averages `mean_g F(g . s_i)` with their variances, one
/// random stream per node.
fn orbit_averages(
    action: &PolarAction,
    f: &AmbientFn,
    rule: &QuadratureRule,
    n_orbit: usize,
    seed: u64,
) -> Result<Vec<Moments>> {
    rule.nodes
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = stream_rng(seed, i as u64);
            let base = action.section_embed(s)?;
            let mut m = Moments::default();
            for _ in 0..n_orbit {
                let g = action.sample_acting(&mut rng);
                let p = action.act(&g, &base);
                let v = f(&p);
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        sample: format!("{p:?}"),
                        value: v,
                    });
                }
                m.push(v);
            }
            Ok(m)
        })
        .collect()
}

fn combine_orbit_averages(
    action: &PolarAction,
    cal: &Calibration,
    rule: &QuadratureRule,
    inner: &[Moments],
    method: DeltaMethod,
    prefactor: f64,
) -> Result<Estimate> {
    let norm = weight_normalization(action);
    let mut value = 0.0;
    let mut var = 0.0;
    let mut n = 0;
    for ((s, w), m) in rule.nodes.iter().zip(&rule.weights).zip(inner) {
        let coef = prefactor * w * norm * delta_value(action, s, method, cal.kappa)?;
        let e = m.estimate();
        value += coef * e.value;
        var += (coef * e.stderr).powi(2);
        n += m.n;
    }
    Ok(Estimate {
        value,
        stderr: var.sqrt(),
        n_samples: n,
    })
}

/// Reduced formula for functions that need not be invariant: deterministic
/// outer section rule, inner Haar average over the acting group (the
/// integrand is right-`H`-invariant, so `G` samples suffice).
pub fn reduced_integrate_general(
    action: &PolarAction,
    cal: &Calibration,
    f: &AmbientFn,
    order: usize,
    n_orbit: usize,
    seed: u64,
    method: DeltaMethod,
) -> Result<Estimate> {
    check_calibration(action, cal)?;
    if n_orbit == 0 {
        return Err(Error::EmptySample);
    }
    let rule = section_rule(action, order)?;
    let inner = orbit_averages(action, f, &rule, n_orbit, seed)?;
    let prefactor = cal.c / action.weyl_order as f64;
    combine_orbit_averages(action, cal, &rule, &inner, method, prefactor)
}

/// Seed of the full-manifold side of [`psi_norm_check`].
pub fn psi_rhs_seed(seed: u64) -> u64 {
    seed.wrapping_add(0x9e37_79b9_7f4a_7c15)
}

/// `(lhs, rhs)` with `lhs = c sum w_i delta(s_i) mean_g |f(g s_i)|`, the
/// `L^1` norm of `F(gH, s) = f(g s) delta(s)` on `G/H x Sigma`, and
/// `rhs = |W| int_M |f|`. The inner average uses `n / #nodes` samples per
/// node and the right side `n` samples.
pub fn psi_norm_check(
    action: &PolarAction,
    cal: &Calibration,
    f: &AmbientFn,
    order: usize,
    n: usize,
    seed: u64,
) -> Result<(Estimate, Estimate)> {
    check_calibration(action, cal)?;
    let abs_f = |p: &AmbientPoint| f(p).abs();
    let rule = section_rule(action, order)?;
    let n_orbit = (n / rule.len()).max(1);
    let inner = orbit_averages(action, &abs_f, &rule, n_orbit, seed)?;
    let lhs = combine_orbit_averages(action, cal, &rule, &inner, default_method(action), cal.c)?;
    let full = mc_integrate_full(action, &abs_f, n, psi_rhs_seed(seed))?;
    let w = action.weyl_order as f64;
    let rhs = Estimate {
        value: w * full.value,
        stderr: w * full.stderr,
        n_samples: full.n_samples,
    };
    Ok((lhs, rhs))
}

/// Converts a calibrated `c` into the Riemannian `vol(G/H)` for the trace
/// form on the acting algebra:
/// `c_cal vol(M) / (V_cell kappa J)`, where `vol(M)` is the Riemannian
/// volume of a group target (1 otherwise, the measure being Riemannian
/// already), `V_cell` the torus cell volume for group targets, and `J` the
/// section metric factor.
pub fn riemannian_orbit_constant(action: &PolarAction, cal: &Calibration) -> Result<f64> {
    check_calibration(action, cal)?;
    let j = action.section_metric_factor();
    let (vol_m, cell) = match action.kind {
        ActionKind::Conjugation => (
            action.group.riemannian_volume().ok_or_else(|| {
                Error::Unsupported(format!("Riemannian volume of {}", action.group))
            })?,
            (2.0 * PI).powi(action.section_dim as i32),
        ),
        _ => (1.0, 1.0),
    };
    Ok(cal.c * vol_m / (cell * cal.kappa * j))
}

/// Riemannian volume of the orbit through `s`:
/// `delta(s) vol(G/H) / |G_s/H|`, with `delta` in trace-form units.
pub fn orbit_volume(action: &PolarAction, cal: &Calibration, s: &[f64]) -> Result<f64> {
    let reg = action.is_regular(s)?;
    let index = match reg.exceptional_index {
        Some(k) if reg.regular => k,
        _ => {
            return Err(Error::SingularPoint {
                coords: s.to_vec(),
                margin: reg.margin,
            })
        }
    };
    let c = riemannian_orbit_constant(action, cal)?;
    Ok(delta_numeric(action, s)? * c / index as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::action_by_id;
    use approx::assert_relative_eq;

    fn calibrated(id: &str, order: usize) -> (PolarAction, Calibration) {
        let a = action_by_id(id).unwrap();
        let cal = calibrate_c(&a, order).unwrap();
        (a, cal)
    }

    #[test]
    fn torus_rule() {
        let a = action_by_id("conj-su2").unwrap();
        let rule = section_rule(&a, 8).unwrap();
        assert_eq!(rule.len(), 8);
        for w in &rule.weights {
            assert_relative_eq!(*w, 2.0 * PI / 8.0, epsilon = 1e-15);
        }
        let integral: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(s, w)| w * s[0].sin().powi(2))
            .sum();
        assert_relative_eq!(integral, PI, epsilon = 1e-14);
        assert!(section_rule(&a, 0).is_err());
    }

    #[test]
    fn weights_sum_to_coordinate_volume() {
        for id in crate::actions::CATALOG_IDS {
            let a = action_by_id(id).unwrap();
            for order in [1, 2, 7, 16] {
                let rule = section_rule(&a, order).unwrap();
                let vol = rule.domain.coordinate_volume();
                assert!((rule.weight_sum() - vol).abs() < 1e-12 * vol.max(1.0), "{id} {order}");
            }
        }
    }

    #[test]
    fn calibrated_constants() {
        let c = |id: &str| calibrated(id, 64).1.c;
        assert_relative_eq!(c("conj-su2"), 1.0, epsilon = 1e-13);
        assert_relative_eq!(c("conj-su3"), 1.0, epsilon = 1e-13);
        assert_relative_eq!(c("conj-so3"), 1.0, epsilon = 1e-13);
        let two_root_two_pi = 2.0 * 2f64.sqrt() * PI;
        assert_relative_eq!(c("adj-su2"), two_root_two_pi, max_relative = 1e-12);
        assert_relative_eq!(c("sym-s2"), 2.0 * PI, max_relative = 1e-12);
        assert_relative_eq!(c("sym-s3"), 4.0 * PI, max_relative = 1e-12);
        assert_relative_eq!(c("sym-h2"), 2.0 * PI, max_relative = 1e-12);
        assert_relative_eq!(c("hermann-s2"), two_root_two_pi, max_relative = 1e-12);
    }

    #[test]
    fn adjoint_constant_from_both_analytic_sides() {
        // int_{R^3} e^{-|x|^2/2} = (2 pi)^{3/2} and, with |H|^2 = 2 theta^2 and
        // delta = (2 theta)^2, int e^{-theta^2} 4 theta^2 d theta = 2 sqrt(pi).
        let (_, cal) = calibrated("adj-su2", 64);
        let c = 2.0 * (2.0 * PI).powf(1.5) / (2.0 * PI.sqrt());
        assert_relative_eq!(cal.c, c, max_relative = 1e-12);
    }

    #[test]
    fn character_orthogonality() {
        let (a, cal) = calibrated("conj-su2", 64);
        let chi = |n: usize, t: f64| (0..=n).map(|k| ((n as f64 - 2.0 * k as f64) * t).cos()).sum::<f64>();
        for m in 0..=5 {
            for n in 0..=5 {
                let order = 2 * m.max(n) + 4;
                let f = |s: &[f64]| chi(m, s[0]) * chi(n, s[0]);
                let v = reduced_integrate(&a, &cal, &f, order, DeltaMethod::ClosedForm).unwrap();
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-12, "{m} {n}: {v}");
            }
        }
    }

    #[test]
    fn sphere_reductions() {
        let (a, cal) = calibrated("sym-s2", 32);
        let one = |_: &[f64]| 1.0;
        for method in [DeltaMethod::Numeric, DeltaMethod::ClosedForm] {
            let area = reduced_integrate(&a, &cal, &one, 32, method).unwrap();
            assert_relative_eq!(area, 4.0 * PI, max_relative = 1e-12);
            let cos2 = reduced_integrate(&a, &cal, &|s: &[f64]| s[0].cos().powi(2), 32, method).unwrap();
            assert_relative_eq!(cos2, 4.0 * PI / 3.0, max_relative = 1e-10);
            let harmonic = reduced_integrate(&a, &cal, &|s: &[f64]| s[0].cos(), 32, method).unwrap();
            assert!(harmonic.abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_disks() {
        let (a, cal) = calibrated("sym-h2", 32);
        for r in [1.0, 2.0] {
            let rule = truncated_rule(&a, 32, r).unwrap();
            let area = reduced_integrate_with_rule(&a, &cal, &|_| 1.0, &rule, DeltaMethod::Numeric).unwrap();
            assert_relative_eq!(area, disk_area(r), max_relative = 1e-8);
        }
    }

    #[test]
    fn uncalibrated_is_rejected() {
        let (_, cal) = calibrated("conj-su2", 8);
        let other = action_by_id("conj-su3").unwrap();
        assert!(matches!(
            reduced_integrate(&other, &cal, &|_| 1.0, 8, DeltaMethod::Numeric),
            Err(Error::Uncalibrated { .. })
        ));
        let (h, hcal) = calibrated("hermann-s2", 8);
        assert!(reduced_integrate(&h, &hcal, &|_| 1.0, 8, DeltaMethod::ClosedForm).is_err());
    }

    #[test]
    fn mc_basics() {
        let a = action_by_id("conj-su2").unwrap();
        let e = mc_integrate_full(&a, &|_| 1.0, 1000, 1).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.stderr, 0.0);
        assert!(matches!(mc_integrate_full(&a, &|_| 1.0, 0, 1), Err(Error::EmptySample)));
        assert!(matches!(
            mc_integrate_full(&a, &|_| f64::NAN, 10, 1),
            Err(Error::NonFinite { .. })
        ));
        let e1 = mc_integrate_full(&a, &|p| p.as_group().unwrap().trace().norm_sqr(), 20_000, 9).unwrap();
        let e2 = mc_integrate_full(&a, &|p| p.as_group().unwrap().trace().norm_sqr(), 20_000, 9).unwrap();
        assert_eq!(e1, e2);
        assert!((e1.value - 1.0).abs() < 4.0 * e1.stderr);
    }

    #[test]
    fn mc_gaussian_on_su2() {
        let a = action_by_id("adj-su2").unwrap();
        let f = |p: &AmbientPoint| (-0.5 * p.as_algebra().unwrap().norm().powi(2)).exp();
        let e = mc_integrate_full(&a, &f, 200_000, 3).unwrap();
        assert!((e.value - (2.0 * PI).powf(1.5)).abs() < 4.0 * e.stderr, "{e:?}");
    }

    #[test]
    fn mc_model_areas() {
        let s2 = action_by_id("sym-s2").unwrap();
        let e = mc_integrate_full(&s2, &|_| 1.0, 1000, 1).unwrap();
        assert_relative_eq!(e.value, 4.0 * PI, epsilon = 1e-12);
        let h2 = action_by_id("sym-h2").unwrap();
        let cosh = |p: &AmbientPoint| 1.0 / p.as_model().unwrap()[2];
        // int_{disk R} 1/cosh r dA = 2 pi log cosh R.
        let e = mc_integrate_full(&h2, &cosh, 200_000, 4).unwrap();
        let want = 2.0 * PI * HYPERBOLIC_TRUNCATION.cosh().ln();
        assert!((e.value - want).abs() < 4.0 * e.stderr, "{e:?} vs {want}");
    }

    #[test]
    fn general_reduction_of_invariant_function() {
        let (a, cal) = calibrated("conj-su2", 16);
        let f = |p: &AmbientPoint| p.as_group().unwrap().trace().norm_sqr();
        let e = reduced_integrate_general(&a, &cal, &f, 16, 50, 5, DeltaMethod::ClosedForm).unwrap();
        // The inner integral is constant, so the estimate is essentially exact.
        assert!((e.value - 1.0).abs() < 1e-10, "{e:?}");
        assert!(e.value >= 0.0);
    }

    #[test]
    fn psi_norm_constant() {
        let (a, cal) = calibrated("conj-su2", 16);
        let (lhs, rhs) = psi_norm_check(&a, &cal, &|_| 1.0, 16, 1600, 6).unwrap();
        assert_relative_eq!(lhs.value, 2.0, epsilon = 1e-12);
        assert_relative_eq!(rhs.value, 2.0, epsilon = 1e-12);
        let (lhs, rhs) = psi_norm_check(&a, &cal, &|_| 0.0, 16, 1600, 6).unwrap();
        assert_eq!((lhs.value, rhs.value), (0.0, 0.0));
    }

    #[test]
    fn orbit_volumes() {
        let (a, cal) = calibrated("conj-su2", 32);
        assert_relative_eq!(riemannian_orbit_constant(&a, &cal).unwrap(), 2.0 * PI, max_relative = 1e-12);
        // SU(2) is the 3-sphere of radius sqrt 2; the class of angle theta is a
        // 2-sphere of radius sqrt 2 sin theta.
        for theta in [0.4, 1.2, 2.9] {
            let area = 4.0 * PI * 2.0 * f64::sin(theta).powi(2);
            assert_relative_eq!(orbit_volume(&a, &cal, &[theta]).unwrap(), area, max_relative = 1e-10);
        }
        assert!(matches!(orbit_volume(&a, &cal, &[0.0]), Err(Error::SingularPoint { .. })));

        let (so3, cal) = calibrated("conj-so3", 32);
        let c = riemannian_orbit_constant(&so3, &cal).unwrap();
        assert_relative_eq!(c, 8.0 * PI, max_relative = 1e-12);
        let at_pi = orbit_volume(&so3, &cal, &[PI]).unwrap();
        assert_relative_eq!(at_pi, 16.0 * PI, max_relative = 1e-10);
        let near = orbit_volume(&so3, &cal, &[PI - 1e-6]).unwrap();
        assert_relative_eq!(near, 2.0 * at_pi, max_relative = 1e-9);

        let (adj, cal) = calibrated("adj-su2", 64);
        // Orbit of H = theta A_1 is the round sphere of radius sqrt 2 theta.
        assert_relative_eq!(orbit_volume(&adj, &cal, &[0.7]).unwrap(), 8.0 * PI * 0.49, max_relative = 1e-10);

        let (s2, cal) = calibrated("sym-s2", 32);
        assert_relative_eq!(
            riemannian_orbit_constant(&s2, &cal).unwrap(),
            2.0 * 2f64.sqrt() * PI,
            max_relative = 1e-12
        );
    }

    #[test]
    fn volume_splits_over_the_torus() {
        // vol(G) = vol(G/T) vol(T) for the bi-invariant trace metric.
        for id in ["conj-su2", "conj-su3"] {
            let (a, cal) = calibrated(id, 32);
            let vol_t = (2.0 * PI).powi(a.section_dim as i32) * a.section_metric_factor();
            let c = riemannian_orbit_constant(&a, &cal).unwrap();
            assert_relative_eq!(c * vol_t, a.group.riemannian_volume().unwrap(), max_relative = 1e-12);
        }
    }
}
