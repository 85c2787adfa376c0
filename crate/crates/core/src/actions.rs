//! The catalog of polar actions.
//!
//! Every action is packaged with what the orbit-map Jacobian needs: a section
//! parametrization, the infinitesimal action of the acting algebra, an
//! orthonormal complement of the isotropy algebra `h = Lie Z(section)`, and a
//! normal frame along the section.
//!
//! Tangent vectors are coordinate vectors in a fixed chart of the ambient
//! space:
//!
//! * group targets (conjugation) are left-trivialized and expressed in the
//!   trace-orthonormal basis of the Lie algebra;
//! * linear targets (adjoint representation, s-representations) use a
//!   trace-orthonormal basis of the representation space;
//! * model spaces `S^n`, `H^2` are embedded in `R^{n+1}` (resp. Minkowski
//!   `R^{2,1}`) and tangent vectors are ambient vectors with the Euclidean
//!   (resp. Lorentzian) Gram matrix.
//!
//! Section coordinates: torus angles for conjugation, the same angle
//! generators for the Cartan subspaces of the linear targets, and the
//! geodesic radius (unit curvature) for the model spaces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::lie_core::{
    commutator, haar_sample, standard_basis, torus_algebra_element, torus_element,
    torus_generators, AlgebraElement, CMatrix, GroupDescriptor, GroupElement, OrthonormalBasis,
};
use crate::roots::{
    self, distance_to_lattice, group_roots, restricted_roots, RootDatum, SymmetricSpace,
    COMPACT_FLAT_WALL_STEP, TORUS_WALL_STEP,
};

/// Points with a regularity margin at or below this are treated as singular.
pub const SINGULAR_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Conjugation,
    AdjointRep,
    SRepresentation,
    SymmetricSpaceCompact,
    SymmetricSpaceNoncompact,
    Hermann,
}

/// What an action is built from: a group (conjugation, adjoint) or a
/// symmetric space (s-representation, isotropy and Hermann actions).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionTarget {
    Group(GroupDescriptor),
    Space(SymmetricSpace),
}

/// Ambient Riemannian inner product at section points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbientMetric {
    /// Trace form in orthonormal coordinates (identity Gram matrix).
    TraceForm,
    /// Round metric restricted from Euclidean `R^{n+1}`.
    Euclidean,
    /// Hyperbolic metric restricted from `diag(1, 1, -1)`.
    Lorentzian,
}

impl AmbientMetric {
    fn signature(&self, i: usize, dim: usize) -> f64 {
        match self {
            AmbientMetric::Lorentzian if i + 1 == dim => -1.0,
            _ => 1.0,
        }
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let dim = u.len();
        (0..dim).map(|i| self.signature(i, dim) * u[i] * v[i]).sum()
    }
}

/// A point of the manifold acted on.
#[derive(Clone, Debug, PartialEq)]
pub enum AmbientPoint {
    Group(GroupElement),
    Algebra(AlgebraElement),
    Model(DVector<f64>),
}

impl AmbientPoint {
    pub fn as_group(&self) -> Option<&GroupElement> {
        match self {
            AmbientPoint::Group(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_algebra(&self) -> Option<&AlgebraElement> {
        match self {
            AmbientPoint::Algebra(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_model(&self) -> Option<&DVector<f64>> {
        match self {
            AmbientPoint::Model(v) => Some(v),
            _ => None,
        }
    }
}

/// Regularity classification of a section point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    pub regular: bool,
    /// Minimum distance of a root value (or, for the Hermann instance, of the
    /// coordinate) to the singular set.
    pub margin: f64,
    /// Regular by roots, but fixed by a non-trivial Weyl element modulo the
    /// section's periodicity; the orbit map is then a covering.
    pub exceptional_candidate: bool,
    /// `|G_s/H|` for non-singular points, computed as the order of the Weyl
    /// stabilizer; `None` at singular points.
    pub exceptional_index: Option<usize>,
}

#[derive(Clone, Debug)]
enum Geometry {
    /// `M = G`, tangent vectors left-trivialized into `basis` coordinates.
    Group { basis: OrthonormalBasis },
    /// `M` a linear subspace of a matrix algebra with orthonormal `basis`.
    Linear {
        basis: Vec<AlgebraElement>,
        section_group: GroupDescriptor,
    },
    /// `M` a quadric in `R^dim`; the acting group moves `acting_axes`.
    Model {
        dim: usize,
        acting_axes: Vec<usize>,
        tip_axis: usize,
        base_axis: usize,
    },
}

/// A cataloged polar action with everything the Jacobian computation needs.
#[derive(Clone, Debug)]
pub struct PolarAction {
    pub id: String,
    pub kind: ActionKind,
    /// The acting group `G` (or `K`).
    pub group: GroupDescriptor,
    pub space: Option<SymmetricSpace>,
    pub section_dim: usize,
    /// `dim M`.
    pub ambient_dim: usize,
    /// Root data of the section; `None` for the Hermann instance.
    pub roots: Option<RootDatum>,
    pub weyl_order: usize,
    /// Orthonormal basis of the acting algebra.
    pub acting_basis: OrthonormalBasis,
    /// Orthonormal basis of `h`, computed as a joint kernel.
    pub isotropy_basis: Vec<AlgebraElement>,
    /// Orthonormal basis of the complement of `h`; its length is `l`.
    pub complement_basis: Vec<AlgebraElement>,
    pub metric: AmbientMetric,
    geometry: Geometry,
}

/// Identifiers of the frozen catalog, in listing order.
pub const CATALOG_IDS: [&str; 11] = [
    "conj-su2",
    "conj-su3",
    "conj-so3",
    "adj-su2",
    "adj-su3",
    "srep-su2so2",
    "srep-su3so3",
    "sym-s2",
    "sym-s3",
    "sym-h2",
    "hermann-s2",
];

fn catalog_entry(id: &str) -> Option<(ActionKind, ActionTarget)> {
    let su = |n| ActionTarget::Group(GroupDescriptor::special_unitary(n).unwrap());
    let so = |n| ActionTarget::Group(GroupDescriptor::special_orthogonal(n).unwrap());
    let space = ActionTarget::Space;
    Some(match id {
        "conj-su2" => (ActionKind::Conjugation, su(2)),
        "conj-su3" => (ActionKind::Conjugation, su(3)),
        "conj-so3" => (ActionKind::Conjugation, so(3)),
        "adj-su2" => (ActionKind::AdjointRep, su(2)),
        "adj-su3" => (ActionKind::AdjointRep, su(3)),
        "srep-su2so2" => (
            ActionKind::SRepresentation,
            space(SymmetricSpace::UnitaryOverOrthogonal(2)),
        ),
        "srep-su3so3" => (
            ActionKind::SRepresentation,
            space(SymmetricSpace::UnitaryOverOrthogonal(3)),
        ),
        "sym-s2" => (ActionKind::SymmetricSpaceCompact, space(SymmetricSpace::Sphere(2))),
        "sym-s3" => (ActionKind::SymmetricSpaceCompact, space(SymmetricSpace::Sphere(3))),
        "sym-h2" => (
            ActionKind::SymmetricSpaceNoncompact,
            space(SymmetricSpace::HyperbolicPlane),
        ),
        "hermann-s2" => (ActionKind::Hermann, space(SymmetricSpace::Sphere(2))),
        _ => return None,
    })
}

/// Looks up a cataloged action by id.
pub fn action_by_id(id: &str) -> Result<PolarAction> {
    let (kind, target) = catalog_entry(id).ok_or_else(|| Error::UnknownId {
        what: "action",
        id: id.to_string(),
        available: CATALOG_IDS.iter().map(|s| s.to_string()).collect(),
    })?;
    let mut action = make_action(kind, target)?;
    action.id = id.to_string();
    Ok(action)
}

/// All cataloged actions.
pub fn catalog() -> Vec<PolarAction> {
    CATALOG_IDS
        .iter()
        .map(|id| action_by_id(id).expect("catalog entries are valid"))
        .collect()
}

fn default_id(kind: ActionKind, target: &ActionTarget) -> String {
    let t = match target {
        ActionTarget::Group(g) => g.to_string(),
        ActionTarget::Space(s) => s.label(),
    };
    format!("{kind:?}:{t}")
}

/// Assembles a polar action; `h` is computed numerically as the joint kernel
/// of the infinitesimal action over a few generic section points and checked
/// against the expected cohomogeneity data.
pub fn make_action(kind: ActionKind, target: ActionTarget) -> Result<PolarAction> {
    let unsupported = || Error::Unsupported(format!("{kind:?} on {target:?}"));
    let (group, space, roots, metric, geometry, section_dim, ambient_dim) = match (kind, target) {
        (ActionKind::Conjugation, ActionTarget::Group(g)) => {
            if g.n == 2 && !g.is_unitary() {
                return Err(unsupported());
            }
            let basis = standard_basis(&g);
            (g, None, Some(group_roots(&g)), AmbientMetric::TraceForm,
             Geometry::Group { basis }, g.rank, g.dim_g)
        }
        (ActionKind::AdjointRep, ActionTarget::Group(g)) => {
            if !g.is_unitary() {
                return Err(unsupported());
            }
            let basis = standard_basis(&g).elements;
            (g, None, Some(group_roots(&g)), AmbientMetric::TraceForm,
             Geometry::Linear { basis, section_group: g }, g.rank, g.dim_g)
        }
        (ActionKind::SRepresentation, ActionTarget::Space(s @ SymmetricSpace::UnitaryOverOrthogonal(n))) => {
            let su = GroupDescriptor::special_unitary(n)?;
            let so = GroupDescriptor::special_orthogonal(n)?;
            let full = standard_basis(&su);
            // p = i Sym_0: Cartan part plus the F_jk (purely imaginary) elements.
            let basis: Vec<AlgebraElement> = full
                .elements
                .iter()
                .filter(|e| e.matrix().iter().all(|z| z.re == 0.0))
                .cloned()
                .collect();
            let dim = basis.len();
            (so, Some(s), Some(restricted_roots(&s)), AmbientMetric::TraceForm,
             Geometry::Linear { basis, section_group: su }, n - 1, dim)
        }
        (ActionKind::SymmetricSpaceCompact, ActionTarget::Space(s @ SymmetricSpace::Sphere(n))) => {
            let k = GroupDescriptor::special_orthogonal(n)?;
            let geometry = Geometry::Model {
                dim: n + 1,
                acting_axes: (0..n).collect(),
                tip_axis: 0,
                base_axis: n,
            };
            (k, Some(s), Some(restricted_roots(&s)), AmbientMetric::Euclidean, geometry, 1, n)
        }
        (ActionKind::SymmetricSpaceNoncompact, ActionTarget::Space(s @ SymmetricSpace::HyperbolicPlane)) => {
            let k = GroupDescriptor::special_orthogonal(2)?;
            let geometry = Geometry::Model {
                dim: 3,
                acting_axes: vec![0, 1],
                tip_axis: 0,
                base_axis: 2,
            };
            (k, Some(s), Some(restricted_roots(&s)), AmbientMetric::Lorentzian, geometry, 1, 2)
        }
        (ActionKind::Hermann, ActionTarget::Space(s @ SymmetricSpace::Sphere(2))) => {
            // H = SO(2) rotating about the x-axis acts on S^2 = SO(3)/SO(2)_z.
            // Section: the great circle through the base point e_z and e_x.
            let h = GroupDescriptor::special_orthogonal(2)?;
            let geometry = Geometry::Model {
                dim: 3,
                acting_axes: vec![1, 2],
                tip_axis: 0,
                base_axis: 2,
            };
            (h, Some(s), None, AmbientMetric::Euclidean, geometry, 1, 2)
        }
        _ => return Err(unsupported()),
    };
    let weyl_order = match &roots {
        Some(r) => r.weyl_order,
        // Rotation by pi about the x-axis maps t to pi - t.
        None => 2,
    };
    let mut action = PolarAction {
        id: default_id(kind, &target),
        kind,
        group,
        space,
        section_dim,
        ambient_dim,
        roots,
        weyl_order,
        acting_basis: standard_basis(&group),
        isotropy_basis: Vec::new(),
        complement_basis: Vec::new(),
        metric,
        geometry,
    };
    action.compute_isotropy()?;
    Ok(action)
}

/// Fixed generic section points used for the isotropy kernel.
fn generic_points(kind: ActionKind, dim: usize) -> Vec<Vec<f64>> {
    match (kind, dim) {
        (ActionKind::Hermann, _) => vec![vec![0.3], vec![0.9], vec![-1.2]],
        (_, 1) => vec![vec![0.7], vec![1.3], vec![-0.4]],
        _ => vec![vec![0.7, -0.3], vec![1.9, 0.45], vec![-0.8, 1.2]],
    }
}

fn orthonormalize_coeffs(candidates: &[DVector<f64>], against: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut kept: Vec<DVector<f64>> = Vec::new();
    for c in candidates {
        let mut v = c.clone();
        for _ in 0..2 {
            for b in against.iter().chain(kept.iter()) {
                let proj = b.dot(&v);
                v.axpy(-proj, b, 1.0);
            }
        }
        let norm = v.norm();
        if norm > tol * c.norm().max(1.0) {
            kept.push(v / norm);
        }
    }
    kept
}

impl PolarAction {
    /// `l = dim G/H`.
    pub fn orbit_dim(&self) -> usize {
        self.complement_basis.len()
    }

    pub fn has_closed_form(&self) -> bool {
        self.roots.is_some()
    }

    fn compute_isotropy(&mut self) -> Result<()> {
        let points = generic_points(self.kind, self.section_dim);
        let basis = self.acting_basis.elements.clone();
        let mut columns = Vec::with_capacity(basis.len());
        for x in &basis {
            let mut col = Vec::new();
            for s in &points {
                col.extend(self.infinitesimal_action(x, s)?.iter().copied());
            }
            columns.push(DVector::from_vec(col));
        }
        let dim = basis.len();
        let a = DMatrix::from_columns(&columns);
        let svd = a.svd(false, true);
        let v_t = svd.v_t.expect("v_t requested");
        let smax = svd.singular_values.max().max(1e-300);
        let null: Vec<DVector<f64>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s <= 1e-9 * smax)
            .map(|(i, _)| v_t.row(i).transpose())
            .collect();
        let units: Vec<DVector<f64>> = (0..dim)
            .map(|i| DVector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        // Prefer standard basis directions for h when they already lie in it.
        let null_units: Vec<DVector<f64>> = units
            .iter()
            .filter(|u| {
                let resid: f64 = null.iter().map(|n| n.dot(u).powi(2)).sum::<f64>();
                (1.0 - resid).abs() < 1e-12
            })
            .cloned()
            .collect();
        let mut h_coeffs = orthonormalize_coeffs(&null_units, &[], 1e-8);
        h_coeffs.extend(orthonormalize_coeffs(&null, &h_coeffs, 1e-8));
        let complement = orthonormalize_coeffs(&units, &h_coeffs, 1e-8);

        let to_element = |c: &DVector<f64>| self.acting_basis.combine(c.as_slice());
        self.isotropy_basis = h_coeffs.iter().map(to_element).collect();
        self.complement_basis = complement.iter().map(to_element).collect();

        if self.ambient_dim != self.section_dim + self.complement_basis.len() {
            return Err(Error::InvariantViolation(format!(
                "{}: dim M = {} but dim section + l = {} + {}",
                self.id,
                self.ambient_dim,
                self.section_dim,
                self.complement_basis.len()
            )));
        }
        Ok(())
    }

    fn check_coords(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.section_dim {
            return Err(Error::DimensionMismatch {
                expected: self.section_dim,
                found: s.len(),
            });
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvariantViolation(format!(
                "non-finite section coordinates {s:?}"
            )));
        }
        Ok(())
    }

    /// The point of `M` with section coordinates `s`.
    pub fn section_embed(&self, s: &[f64]) -> Result<AmbientPoint> {
        self.check_coords(s)?;
        Ok(match &self.geometry {
            Geometry::Group { .. } => AmbientPoint::Group(torus_element(&self.group, s)?),
            Geometry::Linear { section_group, .. } => {
                AmbientPoint::Algebra(torus_algebra_element(section_group, s))
            }
            Geometry::Model {
                dim,
                tip_axis,
                base_axis,
                ..
            } => {
                let r = s[0];
                let mut v = DVector::zeros(*dim);
                if self.metric == AmbientMetric::Lorentzian {
                    v[*tip_axis] = r.sinh();
                    v[*base_axis] = r.cosh();
                } else {
                    v[*tip_axis] = r.sin();
                    v[*base_axis] = r.cos();
                }
                AmbientPoint::Model(v)
            }
        })
    }

    /// Length of tangent coordinate vectors.
    pub fn tangent_coord_len(&self) -> usize {
        match &self.geometry {
            Geometry::Group { basis } => basis.len(),
            Geometry::Linear { basis, .. } => basis.len(),
            Geometry::Model { dim, .. } => *dim,
        }
    }

    fn linear_coords(basis: &[AlgebraElement], m: &CMatrix) -> DVector<f64> {
        // Trace-form coordinates: <e, m> = -Re tr(e m).
        DVector::from_iterator(
            basis.len(),
            basis.iter().map(|e| -(e.matrix().component_mul(&m.transpose())).sum().re),
        )
    }

    fn embed_acting(&self, m: &CMatrix, dim: usize, axes: &[usize]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(dim, dim);
        for (a, &i) in axes.iter().enumerate() {
            for (b, &j) in axes.iter().enumerate() {
                out[(i, j)] = m[(a, b)].re;
            }
        }
        out
    }

    /// Differential of the orbit map at the identity applied to `x`, as a
    /// tangent coordinate vector at `section_embed(s)`.
    ///
    /// * conjugation: `t^{-1}(X t - t X) = (Ad_{t^{-1}} - id) X`;
    /// * linear targets: `[X, H_s]`;
    /// * model spaces: `X . p`, which under the embedding equals
    ///   `dl_a dpi(e) Ad_{a^{-1}} X` for `p = a K`.
    pub fn infinitesimal_action(&self, x: &AlgebraElement, s: &[f64]) -> Result<DVector<f64>> {
        if x.group() != &self.group {
            return Err(Error::ShapeMismatch {
                expected: self.group.to_string(),
                found: x.group().to_string(),
            });
        }
        let p = self.section_embed(s)?;
        Ok(self.infinitesimal_action_at(x, &p))
    }

    fn infinitesimal_action_at(&self, x: &AlgebraElement, p: &AmbientPoint) -> DVector<f64> {
        match (&self.geometry, p) {
            (Geometry::Group { basis }, AmbientPoint::Group(t)) => {
                let tm = t.matrix();
                let pulled = tm.adjoint() * x.matrix() * tm - x.matrix();
                basis.coords_of_matrix(&pulled)
            }
            (Geometry::Linear { basis, .. }, AmbientPoint::Algebra(h)) => {
                Self::linear_coords(basis, &commutator(x.matrix(), h.matrix()))
            }
            (
                Geometry::Model {
                    dim, acting_axes, ..
                },
                AmbientPoint::Model(v),
            ) => self.embed_acting(x.matrix(), *dim, acting_axes) * v,
            _ => unreachable!("point kind always matches the geometry"),
        }
    }

    /// Tangent vectors of the section at `s` (derivatives of the embedding
    /// along each coordinate), in tangent coordinates.
    pub fn section_tangents(&self, s: &[f64]) -> Result<Vec<DVector<f64>>> {
        self.check_coords(s)?;
        Ok(match &self.geometry {
            Geometry::Group { basis } => torus_generators(&self.group)
                .iter()
                .map(|a| basis.coords(a))
                .collect(),
            Geometry::Linear {
                basis,
                section_group,
            } => torus_generators(section_group)
                .iter()
                .map(|a| Self::linear_coords(basis, a.matrix()))
                .collect(),
            Geometry::Model {
                dim,
                tip_axis,
                base_axis,
                ..
            } => {
                let r = s[0];
                let mut v = DVector::zeros(*dim);
                if self.metric == AmbientMetric::Lorentzian {
                    v[*tip_axis] = r.cosh();
                    v[*base_axis] = r.sinh();
                } else {
                    v[*tip_axis] = r.cos();
                    v[*base_axis] = -r.sin();
                }
                vec![v]
            }
        })
    }

    /// Ambient inner product of two tangent coordinate vectors.
    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.metric.inner(u, v)
    }

    fn tangent_spanning_set(&self, p: &AmbientPoint) -> Vec<DVector<f64>> {
        let d = self.tangent_coord_len();
        let units = (0..d).map(|i| DVector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 }));
        match p {
            AmbientPoint::Model(x) => {
                let xx = self.inner(x, x);
                units
                    .map(|e| {
                        let c = self.inner(&e, x) / xx;
                        e - x * c
                    })
                    .collect()
            }
            _ => units.collect(),
        }
    }

    /// Orthonormal basis of the normal space of the section at `s`, built by
    /// Gram-Schmidt in the ambient metric against the section tangents, with
    /// candidates taken in a fixed order.
    pub fn normal_frame(&self, s: &[f64]) -> Result<Vec<DVector<f64>>> {
        let p = self.section_embed(s)?;
        let tangents = self.section_tangents(s)?;
        let fail = |reason: String| Error::FrameFailure {
            coords: s.to_vec(),
            reason,
        };
        let mut accepted: Vec<DVector<f64>> = Vec::new();
        for t in &tangents {
            let v = self.gram_schmidt_step(t, &accepted);
            let n = self.inner(&v, &v).max(0.0).sqrt();
            if n < 1e-10 {
                return Err(fail("section tangents are degenerate".into()));
            }
            accepted.push(v / n);
        }
        let l = self.orbit_dim();
        let mut frame = Vec::with_capacity(l);
        for cand in self.tangent_spanning_set(&p) {
            if frame.len() == l {
                break;
            }
            let scale = self.inner(&cand, &cand).abs().sqrt();
            if scale < 1e-12 {
                continue;
            }
            let v = self.gram_schmidt_step(&cand, &accepted);
            let n = self.inner(&v, &v).max(0.0).sqrt();
            if n > 1e-6 * scale {
                let unit = v / n;
                accepted.push(unit.clone());
                frame.push(unit);
            }
        }
        if frame.len() != l {
            return Err(fail(format!("found {} of {l} normal directions", frame.len())));
        }
        Ok(frame)
    }

    fn gram_schmidt_step(&self, v: &DVector<f64>, against: &[DVector<f64>]) -> DVector<f64> {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in against {
                let c = self.inner(b, &w);
                w.axpy(-c, b, 1.0);
            }
        }
        w
    }

    /// `sqrt(det Gram)` of the coordinate tangent vectors of the section:
    /// the density of the Riemannian measure on the section with respect to
    /// the coordinate measure. Constant along the cataloged sections.
    pub fn section_metric_factor(&self) -> f64 {
        let s = generic_points(self.kind, self.section_dim).remove(0);
        let t = self.section_tangents(&s).expect("generic point is valid");
        let k = t.len();
        let gram = DMatrix::from_fn(k, k, |i, j| self.inner(&t[i], &t[j]));
        gram.determinant().abs().sqrt()
    }

    /// Period of the section coordinates, if the section is compact.
    pub fn section_period(&self) -> Option<f64> {
        match self.kind {
            ActionKind::Conjugation
            | ActionKind::SymmetricSpaceCompact
            | ActionKind::Hermann => Some(2.0 * PI),
            _ => None,
        }
    }

    /// Box from which cross-validation draws section points.
    pub fn sampling_box(&self) -> Vec<(f64, f64)> {
        let range = match self.kind {
            ActionKind::Conjugation => (0.0, 2.0 * PI),
            ActionKind::AdjointRep | ActionKind::SRepresentation => (-2.0, 2.0),
            ActionKind::SymmetricSpaceCompact | ActionKind::Hermann => (-PI, PI),
            ActionKind::SymmetricSpaceNoncompact => (-3.0, 3.0),
        };
        vec![range; self.section_dim]
    }

    /// Uniform draw from `sampling_box`.
    pub fn sample_section_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.sampling_box()
            .iter()
            .map(|(lo, hi)| rng.random_range(*lo..*hi))
            .collect()
    }

    fn hermann_margin(t: f64) -> f64 {
        distance_to_lattice(t, FRAC_PI_2, PI)
    }

    /// Regularity margin and exceptional classification of `s`.
    pub fn is_regular(&self, s: &[f64]) -> Result<Regularity> {
        self.check_coords(s)?;
        let margin = match &self.roots {
            None => Self::hermann_margin(s[0]),
            Some(roots) => {
                let values = roots.values(s)?;
                values
                    .iter()
                    .map(|&a| match self.kind {
                        ActionKind::Conjugation => distance_to_lattice(a, 0.0, TORUS_WALL_STEP),
                        ActionKind::SymmetricSpaceCompact => {
                            distance_to_lattice(a, 0.0, COMPACT_FLAT_WALL_STEP)
                        }
                        _ => a.abs(),
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        };
        let regular = margin > SINGULAR_EPS;
        let exceptional_index = if regular {
            Some(self.weyl_stabilizer(s)?)
        } else {
            None
        };
        Ok(Regularity {
            regular,
            margin,
            exceptional_candidate: exceptional_index.is_some_and(|k| k > 1),
            exceptional_index,
        })
    }

    fn weyl_stabilizer(&self, s: &[f64]) -> Result<usize> {
        match &self.roots {
            Some(r) => roots::weyl_stabilizer_order(r, s, self.section_period()),
            None => {
                let image = PI - s[0];
                let fixed = distance_to_lattice(image - s[0], 0.0, 2.0 * PI) < 1e-9;
                Ok(1 + usize::from(fixed))
            }
        }
    }

    /// Distinct points of the Weyl orbit of `s`, `s` first.
    pub fn weyl_orbit(&self, s: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_coords(s)?;
        match &self.roots {
            Some(r) => roots::weyl_orbit(r, s),
            None => {
                let image = PI - s[0];
                if (image - s[0]).abs() <= 1e-12 * s[0].abs().max(1.0) {
                    Ok(vec![s.to_vec()])
                } else {
                    Ok(vec![s.to_vec(), vec![image]])
                }
            }
        }
    }

    /// The acting group element `g` applied to `p`.
    pub fn act(&self, g: &GroupElement, p: &AmbientPoint) -> AmbientPoint {
        let gm = g.matrix();
        match (&self.geometry, p) {
            (Geometry::Group { .. }, AmbientPoint::Group(x)) => {
                AmbientPoint::Group(GroupElement::from_raw(self.group, gm * x.matrix() * gm.adjoint()))
            }
            (Geometry::Linear { .. }, AmbientPoint::Algebra(x)) => AmbientPoint::Algebra(
                AlgebraElement::from_raw(*x.group(), gm * x.matrix() * gm.adjoint()),
            ),
            (
                Geometry::Model {
                    dim, acting_axes, ..
                },
                AmbientPoint::Model(v),
            ) => {
                let mut full = self.embed_acting(gm, *dim, acting_axes);
                for i in 0..*dim {
                    if !acting_axes.contains(&i) {
                        full[(i, i)] = 1.0;
                    }
                }
                AmbientPoint::Model(full * v)
            }
            _ => unreachable!("point kind always matches the geometry"),
        }
    }

    /// Haar sample of the acting group.
    pub fn sample_acting<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        haar_sample(&self.group, rng)
    }

    /// Orthonormal coordinates of a point of a linear target, or the
    /// embedding coordinates of a model point. `None` for group targets.
    pub fn euclidean_coords(&self, p: &AmbientPoint) -> Option<DVector<f64>> {
        match (&self.geometry, p) {
            (Geometry::Linear { basis, .. }, AmbientPoint::Algebra(x)) => {
                Some(Self::linear_coords(basis, x.matrix()))
            }
            (_, AmbientPoint::Model(v)) => Some(v.clone()),
            _ => None,
        }
    }

    /// Inverse of `euclidean_coords` for linear targets.
    pub fn point_from_coords(&self, coords: &[f64]) -> Option<AmbientPoint> {
        match &self.geometry {
            Geometry::Linear {
                basis,
                section_group,
            } => {
                let n = section_group.n;
                let mut m = CMatrix::zeros(n, n);
                for (c, e) in coords.iter().zip(basis) {
                    m += e.matrix() * C64::new(*c, 0.0);
                }
                Some(AmbientPoint::Algebra(AlgebraElement::from_raw(*section_group, m)))
            }
            _ => None,
        }
    }

    /// Geodesic distance of a model point from the base point.
    pub fn model_radius(&self, p: &AmbientPoint) -> Option<f64> {
        match (&self.geometry, p) {
            (Geometry::Model { base_axis, .. }, AmbientPoint::Model(v)) => {
                let c = v[*base_axis];
                Some(if self.metric == AmbientMetric::Lorentzian {
                    c.max(1.0).acosh()
                } else {
                    c.clamp(-1.0, 1.0).acos()
                })
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn catalog_dimensions() {
        // (id, section_dim, l, |W|)
        let expected = [
            ("conj-su2", 1, 2, 2),
            ("conj-su3", 2, 6, 6),
            ("conj-so3", 1, 2, 2),
            ("adj-su2", 1, 2, 2),
            ("adj-su3", 2, 6, 6),
            ("srep-su2so2", 1, 1, 2),
            ("srep-su3so3", 2, 3, 6),
            ("sym-s2", 1, 1, 2),
            ("sym-s3", 1, 2, 2),
            ("sym-h2", 1, 1, 2),
            ("hermann-s2", 1, 1, 2),
        ];
        for (id, sd, l, w) in expected {
            let a = action_by_id(id).unwrap();
            assert_eq!(a.section_dim, sd, "{id}");
            assert_eq!(a.orbit_dim(), l, "{id}");
            assert_eq!(a.weyl_order, w, "{id}");
            assert_eq!(a.ambient_dim, sd + l, "{id}");
        }
        assert_eq!(action_by_id("adj-su2").unwrap().ambient_dim, 3);
    }

    #[test]
    fn unknown_and_unsupported() {
        match action_by_id("conj-su9") {
            Err(Error::UnknownId { available, .. }) => assert_eq!(available.len(), 11),
            other => panic!("unexpected {other:?}"),
        }
        let so3 = GroupDescriptor::special_orthogonal(3).unwrap();
        assert!(make_action(ActionKind::AdjointRep, ActionTarget::Group(so3)).is_err());
        assert!(make_action(
            ActionKind::SymmetricSpaceCompact,
            ActionTarget::Space(SymmetricSpace::HyperbolicPlane)
        )
        .is_err());
    }

    #[test]
    fn conjugation_isotropy_is_the_torus() {
        let a = action_by_id("conj-su2").unwrap();
        assert_eq!(a.isotropy_basis.len(), 1);
        let h = &a.isotropy_basis[0];
        assert!((h.inner(&a.acting_basis.elements[0]).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal_to_isotropy() {
        for a in catalog() {
            let c = &a.complement_basis;
            for (i, x) in c.iter().enumerate() {
                for (j, y) in c.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((x.inner(y) - want).abs() < 1e-10, "{}", a.id);
                }
                for h in &a.isotropy_basis {
                    assert!(x.inner(h).abs() < 1e-10, "{}", a.id);
                }
            }
        }
    }

    #[test]
    fn isotropy_acts_trivially_on_section() {
        let mut rng = stream_rng(21, 0);
        for a in catalog() {
            for _ in 0..10 {
                let s = a.sample_section_point(&mut rng);
                for h in &a.isotropy_basis {
                    let v = a.infinitesimal_action(h, &s).unwrap();
                    assert!(v.camax() < 1e-10, "{} at {s:?}", a.id);
                }
            }
        }
    }

    #[test]
    fn orbits_meet_the_section_orthogonally() {
        let mut rng = stream_rng(22, 0);
        for a in catalog() {
            let mut checked = 0;
            while checked < 50 {
                let s = a.sample_section_point(&mut rng);
                if !a.is_regular(&s).unwrap().regular {
                    continue;
                }
                let tangents = a.section_tangents(&s).unwrap();
                let x = &a.complement_basis[checked % a.orbit_dim()];
                let v = a.infinitesimal_action(x, &s).unwrap();
                for t in &tangents {
                    assert!(a.inner(&v, t).abs() < 1e-10, "{} at {s:?}", a.id);
                }
                checked += 1;
            }
        }
    }

    #[test]
    fn conjugation_su2_image_norm() {
        let a = action_by_id("conj-su2").unwrap();
        for theta in [0.3, 1.0, 2.5] {
            for x in &a.complement_basis {
                let v = a.infinitesimal_action(x, &[theta]).unwrap();
                assert!((v.norm() - 2.0 * f64::sin(theta).abs()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn adjoint_image_is_normal_to_section() {
        let a = action_by_id("adj-su2").unwrap();
        let x = &a.complement_basis[0];
        let v = a.infinitesimal_action(x, &[0.8]).unwrap();
        assert!(v.norm() > 0.1);
        let t = &a.section_tangents(&[0.8]).unwrap()[0];
        assert!(a.inner(&v, t).abs() < 1e-14);
    }

    #[test]
    fn embeddings() {
        for a in catalog() {
            let zero = vec![0.0; a.section_dim];
            match a.section_embed(&zero).unwrap() {
                AmbientPoint::Group(g) => {
                    assert!((g.matrix() - CMatrix::identity(g.group().n, g.group().n)).camax() < 1e-15)
                }
                AmbientPoint::Algebra(x) => assert!(x.norm() < 1e-15),
                AmbientPoint::Model(v) => {
                    assert!(a.model_radius(&AmbientPoint::Model(v)).unwrap().abs() < 1e-15)
                }
            }
        }
        let conj = action_by_id("conj-su3").unwrap();
        let p = conj.section_embed(&[0.4, -1.0]).unwrap();
        let q = conj.section_embed(&[0.4 + 2.0 * PI, -1.0 - 2.0 * PI]).unwrap();
        assert!((p.as_group().unwrap().matrix() - q.as_group().unwrap().matrix()).camax() < 1e-12);

        let s2 = action_by_id("sym-s2").unwrap();
        let p = s2.section_embed(&[1.1]).unwrap();
        assert!((s2.model_radius(&p).unwrap() - 1.1).abs() < 1e-14);
        let h2 = action_by_id("sym-h2").unwrap();
        let p = h2.section_embed(&[1.7]).unwrap();
        assert!((h2.model_radius(&p).unwrap() - 1.7).abs() < 1e-12);
        let v = p.as_model().unwrap();
        assert!((h2.inner(v, v) + 1.0).abs() < 1e-12);
        assert!(s2.section_embed(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn normal_frames() {
        let conj = action_by_id("conj-su2").unwrap();
        let frame = conj.normal_frame(&[0.9]).unwrap();
        // Left-translates of E and F are coordinate vectors 1 and 2.
        assert!((frame[0][1].abs() - 1.0).abs() < 1e-14);
        assert!((frame[1][2].abs() - 1.0).abs() < 1e-14);

        let adj = action_by_id("adj-su3").unwrap();
        let f1 = adj.normal_frame(&[0.3, 0.2]).unwrap();
        let f2 = adj.normal_frame(&[-1.3, 0.9]).unwrap();
        for (u, v) in f1.iter().zip(&f2) {
            assert!((u - v).camax() < 1e-14);
        }

        let mut rng = stream_rng(23, 0);
        for a in catalog() {
            for _ in 0..5 {
                let s = a.sample_section_point(&mut rng);
                let frame = a.normal_frame(&s).unwrap();
                let t = a.section_tangents(&s).unwrap();
                for (i, u) in frame.iter().enumerate() {
                    for tv in &t {
                        assert!(a.inner(u, tv).abs() < 1e-10);
                    }
                    for (j, v) in frame.iter().enumerate() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((a.inner(u, v) - want).abs() < 1e-10, "{}", a.id);
                    }
                }
            }
        }
    }

    #[test]
    fn regularity() {
        for a in catalog() {
            if a.kind == ActionKind::Hermann {
                continue;
            }
            let r = a.is_regular(&vec![0.0; a.section_dim]).unwrap();
            assert!(!r.regular, "{}", a.id);
            assert_eq!(r.exceptional_index, None);
        }
        let conj = action_by_id("conj-su2").unwrap();
        let r = conj.is_regular(&[FRAC_PI_2]).unwrap();
        assert!(r.regular && !r.exceptional_candidate);
        assert!((r.margin - PI).abs() < 1e-14);

        let so3 = action_by_id("conj-so3").unwrap();
        let r = so3.is_regular(&[PI]).unwrap();
        assert!(r.regular);
        assert!(r.exceptional_candidate);
        assert_eq!(r.exceptional_index, Some(2));
        assert_eq!(so3.is_regular(&[2.0]).unwrap().exceptional_index, Some(1));

        let hermann = action_by_id("hermann-s2").unwrap();
        assert!(hermann.is_regular(&[0.0]).unwrap().regular);
        assert!(!hermann.is_regular(&[FRAC_PI_2]).unwrap().regular);
        assert_eq!(hermann.weyl_orbit(&[0.2]).unwrap(), vec![vec![0.2], vec![PI - 0.2]]);
    }

    #[test]
    fn conjugation_orbits_recover_weyl_orbit() {
        // g t g^{-1} has trace 2 cos(theta); re-solving gives {theta, -theta}
        // modulo 2 pi, i.e. the Weyl orbit.
        let a = action_by_id("conj-su2").unwrap();
        let mut rng = stream_rng(24, 0);
        for _ in 0..100 {
            let theta: f64 = rng.random_range(0.1..3.0);
            let g = a.sample_acting(&mut rng);
            let p = a.act(&g, &a.section_embed(&[theta]).unwrap());
            let tr = p.as_group().unwrap().trace();
            assert!(tr.im.abs() < 1e-12);
            let solved = (tr.re / 2.0).clamp(-1.0, 1.0).acos();
            let recovered = [solved, -solved];
            let orbit = a.weyl_orbit(&[theta]).unwrap();
            assert_eq!(orbit.len(), 2);
            for o in orbit {
                assert!(recovered
                    .iter()
                    .any(|r| distance_to_lattice(o[0] - r, 0.0, 2.0 * PI) < 1e-7));
            }
        }
    }

    #[test]
    fn acting_preserves_the_model_quadric() {
        let mut rng = stream_rng(25, 0);
        for id in ["sym-s3", "sym-h2", "hermann-s2"] {
            let a = action_by_id(id).unwrap();
            let p = a.section_embed(&[0.8]).unwrap();
            let v0 = p.as_model().unwrap().clone();
            for _ in 0..10 {
                let g = a.sample_acting(&mut rng);
                let q = a.act(&g, &p);
                let v = q.as_model().unwrap();
                assert!((a.inner(v, v) - a.inner(&v0, &v0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn metric_factors() {
        let f = |id: &str| action_by_id(id).unwrap().section_metric_factor();
        assert!((f("conj-su2") - 2f64.sqrt()).abs() < 1e-14);
        assert!((f("conj-su3") - 3f64.sqrt()).abs() < 1e-14);
        assert!((f("conj-so3") - 2f64.sqrt()).abs() < 1e-14);
        assert!((f("sym-s2") - 1.0).abs() < 1e-14);
        assert!((f("sym-h2") - 1.0).abs() < 1e-14);
    }
}
