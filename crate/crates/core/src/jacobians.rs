//! The volume scaling function `delta(s) = |det d omega_s(eH)|`.
//!
//! Two independent routes are provided. The numeric route pairs the image of
//! an orthonormal basis of `g/h` under the infinitesimal action with an
//! orthonormal normal frame of the section and takes `|det|`. The closed
//! forms are root products:
//!
//! | kind | delta |
//! |---|---|
//! | conjugation | `4^{|P|} prod sin^2(alpha/2)` |
//! | adjoint | `prod alpha^2` |
//! | s-representation | `prod |alpha|^{m}` |
//! | compact symmetric | `prod |sin alpha|^{m}` |
//! | noncompact symmetric | `prod |sinh alpha|^{m}` |
//!
//! The numeric value is measured with the trace form on the acting algebra
//! while the model spaces carry their unit-curvature metric, so the two
//! routes differ by a constant factor. That factor is measured once at a
//! calibration point ([`closed_form_scale`]) and divided out before any
//! comparison.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::actions::{ActionKind, PolarAction};
use crate::error::{Error, Result};
use crate::lie_core::GroupDescriptor;
use crate::roots::{group_roots, restricted_roots, SymmetricSpace};

/// Points closer than this to the singular set are never used for
/// relative-error comparisons.
pub const NEAR_SINGULAR_GUARD: f64 = 1e-6;

/// Above this size the determinant is accumulated in log space.
const LOG_DET_THRESHOLD: usize = 8;

/// `|det m|` via partially pivoted LU.
pub fn abs_det(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 1.0;
    }
    let lu = m.clone().lu();
    let u = lu.u();
    if n > LOG_DET_THRESHOLD {
        let mut log = 0.0;
        for i in 0..n {
            let d = u[(i, i)].abs();
            if d == 0.0 {
                return 0.0;
            }
            log += d.ln();
        }
        log.exp()
    } else {
        (0..n).map(|i| u[(i, i)]).product::<f64>().abs()
    }
}

/// `M_ij = <X_j . s, nu_i>` for the complement basis `X_j` and the given
/// orthonormal normal frame `nu_i`.
pub fn jacobian_matrix_in_frame(
    action: &PolarAction,
    s: &[f64],
    frame: &[DVector<f64>],
) -> Result<DMatrix<f64>> {
    let l = action.orbit_dim();
    if frame.len() != l {
        return Err(Error::DimensionMismatch {
            expected: l,
            found: frame.len(),
        });
    }
    let images = action
        .complement_basis
        .iter()
        .map(|x| action.infinitesimal_action(x, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(l, l, |i, j| action.inner(&images[j], &frame[i])))
}

pub fn jacobian_matrix(action: &PolarAction, s: &[f64]) -> Result<DMatrix<f64>> {
    let frame = action.normal_frame(s)?;
    jacobian_matrix_in_frame(action, s, &frame)
}

/// Numeric `delta` in the trace-form normalization of the acting algebra.
pub fn delta_numeric(action: &PolarAction, s: &[f64]) -> Result<f64> {
    Ok(abs_det(&jacobian_matrix(action, s)?))
}

pub fn delta_numeric_in_frame(
    action: &PolarAction,
    s: &[f64],
    frame: &[DVector<f64>],
) -> Result<f64> {
    Ok(abs_det(&jacobian_matrix_in_frame(action, s, frame)?))
}

/// `4^{|P|} prod_{alpha in P} sin^2(alpha(s)/2)`.
pub fn delta_conjugation(group: &GroupDescriptor, s: &[f64]) -> Result<f64> {
    let roots = group_roots(group);
    let values = roots.values(s)?;
    Ok(values
        .iter()
        .map(|a| 4.0 * (a / 2.0).sin().powi(2))
        .product())
}

/// `prod_{alpha in P} alpha(H)^2`.
pub fn delta_adjoint(group: &GroupDescriptor, h: &[f64]) -> Result<f64> {
    let roots = group_roots(group);
    Ok(roots.values(h)?.iter().map(|a| a * a).product())
}

/// `prod_{alpha in Sigma+} |alpha(H)|^{m_alpha}`.
pub fn delta_srep(space: &SymmetricSpace, h: &[f64]) -> Result<f64> {
    root_product(space, h, |a| a.abs())
}

/// `prod |sin alpha(H)|^{m_alpha}` for compact spaces, `prod |sinh alpha(H)|^{m_alpha}`
/// for noncompact ones.
pub fn delta_symmetric(space: &SymmetricSpace, h: &[f64]) -> Result<f64> {
    if space.is_compact() {
        root_product(space, h, |a| a.sin().abs())
    } else {
        root_product(space, h, |a| a.sinh().abs())
    }
}

fn root_product(space: &SymmetricSpace, h: &[f64], f: impl Fn(f64) -> f64) -> Result<f64> {
    let roots = restricted_roots(space);
    let values = roots.values(h)?;
    Ok(values
        .iter()
        .zip(&roots.multiplicities)
        .map(|(a, m)| f(*a).powi(*m as i32))
        .product())
}

/// Closed-form `delta` for the action's kind; `None` for the Hermann instance.
pub fn delta_closed(action: &PolarAction, s: &[f64]) -> Result<Option<f64>> {
    let space = action.space.as_ref();
    Ok(Some(match action.kind {
        ActionKind::Conjugation => delta_conjugation(&action.group, s)?,
        ActionKind::AdjointRep => delta_adjoint(&action.group, s)?,
        ActionKind::SRepresentation => delta_srep(space.expect("s-rep has a space"), s)?,
        ActionKind::SymmetricSpaceCompact | ActionKind::SymmetricSpaceNoncompact => {
            delta_symmetric(space.expect("symmetric action has a space"), s)?
        }
        ActionKind::Hermann => return Ok(None),
    }))
}

/// Section point at which the numeric and closed-form routes are matched.
pub fn calibration_point(action: &PolarAction) -> Vec<f64> {
    match action.section_dim {
        1 => vec![0.9],
        _ => vec![0.7, -0.3],
    }
}

/// `kappa = delta_numeric / delta_closed` at the calibration point; 1 for
/// actions without a closed form.
pub fn closed_form_scale(action: &PolarAction) -> Result<f64> {
    let s = calibration_point(action);
    match delta_closed(action, &s)? {
        None => Ok(1.0),
        Some(closed) => {
            if closed.abs() < 1e-8 {
                return Err(Error::DegenerateCalibration(closed));
            }
            Ok(delta_numeric(action, &s)? / closed)
        }
    }
}

/// A sampled point excluded from comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub coords: Vec<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianReport {
    pub action: String,
    pub seed: u64,
    pub margin: f64,
    /// `kappa` from [`closed_form_scale`]; numeric values are divided by it
    /// before comparison.
    pub calibration_scale: f64,
    pub sample_points: Vec<Vec<f64>>,
    pub numeric: Vec<f64>,
    /// Empty when the action has no closed form.
    pub closed_form: Vec<f64>,
    /// `None` when nothing was compared.
    pub max_abs_rel_error: Option<f64>,
    pub points_skipped: Vec<SkippedPoint>,
}

impl JacobianReport {
    /// Re-derives `max_abs_rel_error` from the stored lists.
    pub fn recompute_max_error(&self) -> Option<f64> {
        if self.closed_form.is_empty() {
            return None;
        }
        self.numeric
            .iter()
            .zip(&self.closed_form)
            .map(|(n, c)| rel_error(n / self.calibration_scale, *c))
            .reduce(f64::max)
    }
}

fn rel_error(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

/// Samples `n_points` section points with regularity margin at least
/// `margin` (never below [`NEAR_SINGULAR_GUARD`]) and compares calibrated
/// numeric `delta` with the closed form. Rejected draws are listed.
pub fn cross_validate(
    action: &PolarAction,
    n_points: usize,
    margin: f64,
    seed: u64,
) -> Result<JacobianReport> {
    let guard = margin.max(NEAR_SINGULAR_GUARD);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_points);
    let mut skipped = Vec::new();
    let max_draws = 1000 * n_points.max(1);
    let mut draws = 0;
    while points.len() < n_points && draws < max_draws {
        draws += 1;
        let s = action.sample_section_point(&mut rng);
        let reg = action.is_regular(&s)?;
        if reg.margin >= guard {
            points.push(s);
        } else {
            skipped.push(SkippedPoint {
                coords: s,
                margin: reg.margin,
            });
        }
    }
    let kappa = closed_form_scale(action)?;
    let evaluated = points
        .par_iter()
        .map(|s| Ok((delta_numeric(action, s)?, delta_closed(action, s)?)))
        .collect::<Result<Vec<_>>>()?;
    let numeric: Vec<f64> = evaluated.iter().map(|(n, _)| *n).collect();
    let closed_form: Vec<f64> = evaluated.iter().filter_map(|(_, c)| *c).collect();
    let mut report = JacobianReport {
        action: action.id.clone(),
        seed,
        margin,
        calibration_scale: kappa,
        sample_points: points,
        numeric,
        closed_form,
        max_abs_rel_error: None,
        points_skipped: skipped,
    };
    report.max_abs_rel_error = report.recompute_max_error();
    Ok(report)
}

/// A point on a wall where a controlled set of roots vanishes, together
/// with a transverse direction and the order at which `delta` must vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct WallProbe {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    pub expected_order: f64,
}

/// Wall probe with exactly one vanishing positive root (the Hermann
/// instance uses its fixed-point circle at `t = pi/2`).
pub fn wall_probe(action: &PolarAction) -> Result<WallProbe> {
    let (base, direction) = match action.section_dim {
        1 if action.kind == ActionKind::Hermann => (vec![std::f64::consts::FRAC_PI_2], vec![1.0]),
        1 => (vec![0.0], vec![1.0]),
        _ => (vec![0.5, 0.5], vec![1.0, 0.0]),
    };
    let expected_order = match &action.roots {
        None => 1.0,
        Some(roots) => {
            let per_root = match action.kind {
                ActionKind::Conjugation | ActionKind::AdjointRep => 2.0,
                _ => 1.0,
            };
            roots
                .values(&base)?
                .iter()
                .zip(&roots.multiplicities)
                .filter(|(a, _)| a.abs() < 1e-12)
                .map(|(_, m)| per_root * f64::from(*m))
                .sum()
        }
    };
    Ok(WallProbe {
        base,
        direction,
        expected_order,
    })
}

/// Least-squares slope of `log delta` against `log eps` along the probe.
pub fn vanishing_order(action: &PolarAction, probe: &WallProbe, eps: &[f64]) -> Result<f64> {
    let mut xs = Vec::with_capacity(eps.len());
    let mut ys = Vec::with_capacity(eps.len());
    for &e in eps {
        let s: Vec<f64> = probe
            .base
            .iter()
            .zip(&probe.direction)
            .map(|(b, d)| b + e * d)
            .collect();
        xs.push(e.ln());
        ys.push(delta_numeric(action, &s)?.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Finite-difference continuity diagnostics of `delta` along a straight path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub step: f64,
    pub n_steps: usize,
    pub max_increment: f64,
    /// Largest amount by which an increment exceeds twice its larger
    /// neighbour; positive values indicate an isolated jump.
    pub max_jump_excess: f64,
    /// `|extrapolated limit - delta(center)|` from the left and right, using
    /// quadratic extrapolation from three points on each side.
    pub left_gap: f64,
    pub right_gap: f64,
}

impl ContinuityReport {
    pub fn max_gap(&self) -> f64 {
        self.left_gap.max(self.right_gap)
    }
}

/// Samples `delta` at `center + k h direction` for `|k| <= half_steps`.
pub fn continuity_along_path(
    action: &PolarAction,
    center: &[f64],
    direction: &[f64],
    step: f64,
    half_steps: usize,
) -> Result<ContinuityReport> {
    if half_steps < 3 {
        return Err(Error::InvariantViolation(
            "continuity check needs at least 3 steps per side".into(),
        ));
    }
    let k_max = half_steps as i64;
    let values = (-k_max..=k_max)
        .into_par_iter()
        .map(|k| {
            let s: Vec<f64> = center
                .iter()
                .zip(direction)
                .map(|(c, d)| c + (k as f64) * step * d)
                .collect();
            delta_numeric(action, &s)
        })
        .collect::<Result<Vec<f64>>>()?;
    let incs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let max_increment = incs.iter().copied().fold(0.0, f64::max);
    let mut max_jump_excess = f64::NEG_INFINITY;
    for i in 0..incs.len() {
        let left = if i > 0 { incs[i - 1] } else { 0.0 };
        let right = incs.get(i + 1).copied().unwrap_or(0.0);
        let neighbour = left.max(right);
        // Tolerance for rounding in flat regions.
        max_jump_excess = max_jump_excess.max(incs[i] - 2.0 * neighbour - 1e-12);
    }
    let mid = half_steps;
    // Quadratic extrapolation through offsets 1, 2, 3 to offset 0.
    let extrapolate = |a: f64, b: f64, c: f64| 3.0 * a - 3.0 * b + c;
    let left = extrapolate(values[mid - 1], values[mid - 2], values[mid - 3]);
    let right = extrapolate(values[mid + 1], values[mid + 2], values[mid + 3]);
    Ok(ContinuityReport {
        step,
        n_steps: values.len(),
        max_increment,
        max_jump_excess,
        left_gap: (left - values[mid]).abs(),
        right_gap: (right - values[mid]).abs(),
    })
}
