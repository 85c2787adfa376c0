//! Dense numerics for the compact classical groups `SU(n)` and `SO(n)`.
//!
//! Every algebra carries the trace form `<X, Y> = -Re tr(XY)`, which is
//! Ad-invariant and proportional to the negative Killing form on these
//! families. All volume constants elsewhere in the crate are stated relative
//! to this form.
//!
//! Matrices are stored as complex for both families; orthogonal elements
//! simply have zero imaginary part.
//!
//! # Basis conventions
//!
//! `standard_basis` is frozen so that root tables stay coordinate-stable:
//!
//! * `su(n)`: Cartan elements `H_k = i diag(1,..,1,-k,0,..,0)/sqrt(k(k+1))`
//!   for `k = 1..n-1`, then for each pair `j < k` (lexicographic)
//!   `E_jk = (e_jk - e_kj)/sqrt(2)` followed by `F_jk = i (e_jk + e_kj)/sqrt(2)`.
//! * `so(n)`: Cartan elements `R_{2k-1,2k}/sqrt(2)`, then the remaining
//!   plane generators `R_jk/sqrt(2)` in lexicographic order, where
//!   `R_jk = e_kj - e_jk` rotates `e_j` towards `e_k`.
//!
//! Torus coordinates are *angles*, not orthonormal coordinates. The torus
//! generators are `A_k = i (e_kk - e_nn)` for `su(n)` and `R_{2k-1,2k}` for
//! `so(n)`, so that `torus_element` is `2 pi`-periodic in every angle. For
//! `su(2)` this means `A_1 = sqrt(2) H_1` and `torus_element([t]) =
//! diag(e^{it}, e^{-it})`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;

/// Entrywise tolerance for algebra membership.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Entrywise tolerance for group membership.
pub const GROUP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupFamily {
    SpecialUnitary,
    SpecialOrthogonal,
}

/// A compact classical matrix group together with its basic dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub family: GroupFamily,
    pub n: usize,
    pub dim_g: usize,
    pub rank: usize,
}

impl GroupDescriptor {
    /// `SU(n)` for `n` in 2..=4 and `SO(n)` for `n` in 2..=5.
    ///
    /// `SO(2)` is only used as the isotropy group of the rank-one model
    /// spaces; it has no roots.
    pub fn new(family: GroupFamily, n: usize) -> Result<Self> {
        let supported = match family {
            GroupFamily::SpecialUnitary => (2..=4).contains(&n),
            GroupFamily::SpecialOrthogonal => (2..=5).contains(&n),
        };
        if !supported {
            return Err(Error::UnsupportedGroup { family, n });
        }
        let (dim_g, rank) = match family {
            GroupFamily::SpecialUnitary => (n * n - 1, n - 1),
            GroupFamily::SpecialOrthogonal => (n * (n - 1) / 2, n / 2),
        };
        Ok(Self {
            family,
            n,
            dim_g,
            rank,
        })
    }

    pub fn special_unitary(n: usize) -> Result<Self> {
        Self::new(GroupFamily::SpecialUnitary, n)
    }

    pub fn special_orthogonal(n: usize) -> Result<Self> {
        Self::new(GroupFamily::SpecialOrthogonal, n)
    }

    pub fn is_unitary(&self) -> bool {
        self.family == GroupFamily::SpecialUnitary
    }

    /// Riemannian volume of the group for the metric induced by the trace
    /// form, where known in closed form.
    ///
    /// `SU(n)` uses Macdonald's formula
    /// `sqrt(n) (2 pi)^((n-1)(n+2)/2) / (1! 2! ... (n-1)!)`, which gives the
    /// round 3-sphere of radius `sqrt(2)` for `n = 2`. `SO(3)` is the quotient
    /// `SU(2)/{±1}` with all lengths doubled (`ad` scales the trace norm by 2),
    /// hence `8 * vol(SU(2)) / 2`.
    pub fn riemannian_volume(&self) -> Option<f64> {
        match (self.family, self.n) {
            (GroupFamily::SpecialUnitary, n) => {
                let n_f = n as f64;
                let exponent = ((n - 1) * (n + 2)) as f64 / 2.0;
                let superfactorial: f64 = (1..n)
                    .map(|k| (1..=k).map(|j| j as f64).product::<f64>())
                    .product();
                Some(n_f.sqrt() * (2.0 * PI).powf(exponent) / superfactorial)
            }
            (GroupFamily::SpecialOrthogonal, 3) => Some(16.0 * SQRT_2 * PI * PI),
            _ => None,
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            GroupFamily::SpecialUnitary => write!(f, "SU({})", self.n),
            GroupFamily::SpecialOrthogonal => write!(f, "SO({})", self.n),
        }
    }
}

fn check_shape(group: &GroupDescriptor, m: &CMatrix) -> Result<()> {
    if m.nrows() != group.n || m.ncols() != group.n {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", group.n),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// An element of `su(n)` or `so(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    group: GroupDescriptor,
    matrix: CMatrix,
}

impl AlgebraElement {
    /// Validates anti-Hermitian (resp. real antisymmetric) and traceless,
    /// entrywise to `ALGEBRA_TOL` relative to the largest entry.
    pub fn new(group: GroupDescriptor, matrix: CMatrix) -> Result<Self> {
        check_shape(&group, &matrix)?;
        let scale = max_abs(&matrix).max(1.0);
        let skew = max_abs(&(&matrix + matrix.adjoint()));
        if skew > ALGEBRA_TOL * scale {
            return Err(Error::InvariantViolation(format!(
                "algebra element is not skew (residual {skew:e})"
            )));
        }
        match group.family {
            GroupFamily::SpecialUnitary => {
                let tr = matrix.trace().norm();
                if tr > ALGEBRA_TOL * scale {
                    return Err(Error::InvariantViolation(format!(
                        "su(n) element has trace {tr:e}"
                    )));
                }
            }
            GroupFamily::SpecialOrthogonal => {
                let im = matrix.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                if im > ALGEBRA_TOL * scale {
                    return Err(Error::InvariantViolation(format!(
                        "so(n) element has imaginary part {im:e}"
                    )));
                }
            }
        }
        Ok(Self { group, matrix })
    }

    pub(crate) fn from_raw(group: GroupDescriptor, matrix: CMatrix) -> Self {
        Self { group, matrix }
    }

    pub fn zero(group: GroupDescriptor) -> Self {
        Self::from_raw(group, CMatrix::zeros(group.n, group.n))
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `-Re tr(XY)`.
    pub fn inner(&self, other: &Self) -> f64 {
        let n = self.group.n;
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += (self.matrix[(i, k)] * other.matrix[(k, i)]).re;
            }
        }
        -acc
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::from_raw(self.group, &self.matrix * C64::new(a, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_raw(self.group, &self.matrix + &other.matrix)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_raw(self.group, &self.matrix - &other.matrix)
    }
}

/// An element of `SU(n)` or `SO(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    group: GroupDescriptor,
    matrix: CMatrix,
}

impl GroupElement {
    /// Validates `g* g = I` and `det g = 1` to `GROUP_TOL`.
    pub fn new(group: GroupDescriptor, matrix: CMatrix) -> Result<Self> {
        check_shape(&group, &matrix)?;
        let g = Self { group, matrix };
        let drift = g.unitarity_defect();
        if drift > GROUP_TOL {
            return Err(Error::InvariantViolation(format!(
                "group element is not unitary (residual {drift:e})"
            )));
        }
        let det = g.matrix.determinant();
        if (det - C64::new(1.0, 0.0)).norm() > GROUP_TOL {
            return Err(Error::InvariantViolation(format!(
                "group element has determinant {det}"
            )));
        }
        if group.family == GroupFamily::SpecialOrthogonal {
            let im = g.matrix.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            if im > GROUP_TOL {
                return Err(Error::InvariantViolation(
                    "orthogonal group element is not real".into(),
                ));
            }
        }
        Ok(g)
    }

    pub(crate) fn from_raw(group: GroupDescriptor, matrix: CMatrix) -> Self {
        Self { group, matrix }
    }

    pub fn identity(group: GroupDescriptor) -> Self {
        Self::from_raw(group, CMatrix::identity(group.n, group.n))
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_raw(self.group, &self.matrix * &other.matrix)
    }

    /// Inverse via the conjugate transpose.
    pub fn inverse(&self) -> Self {
        Self::from_raw(self.group, self.matrix.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Max entry of `|g* g - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.group.n;
        max_abs(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n)))
    }

    /// Nearest element of the group in the polar sense: `U V*` from the SVD,
    /// followed by a determinant phase fix.
    pub fn reprojected(&self) -> Self {
        let n = self.group.n;
        let svd = self.matrix.clone().svd(true, true);
        let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let mut m = u * v_t;
        let det = m.determinant();
        match self.group.family {
            GroupFamily::SpecialUnitary => {
                let phase = C64::from_polar(1.0, -det.arg() / n as f64);
                m *= phase;
            }
            GroupFamily::SpecialOrthogonal => {
                m.iter_mut().for_each(|z| z.im = 0.0);
                if det.re < 0.0 {
                    m.column_mut(0).neg_mut();
                }
            }
        }
        Self::from_raw(self.group, m)
    }
}

/// An ordered trace-orthonormal basis of the Lie algebra.
#[derive(Clone, Debug)]
pub struct OrthonormalBasis {
    pub group: GroupDescriptor,
    pub elements: Vec<AlgebraElement>,
    /// The first `cartan_count` elements span the standard maximal Abelian
    /// subalgebra.
    pub cartan_count: usize,
}

impl OrthonormalBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn cartan(&self) -> &[AlgebraElement] {
        &self.elements[..self.cartan_count]
    }

    pub fn off_cartan(&self) -> &[AlgebraElement] {
        &self.elements[self.cartan_count..]
    }

    /// Coordinates of `x` in this basis.
    pub fn coords(&self, x: &AlgebraElement) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.elements.iter().map(|e| e.inner(x)))
    }

    /// Coordinates of an arbitrary matrix, using the trace form formally.
    pub(crate) fn coords_of_matrix(&self, m: &CMatrix) -> DVector<f64> {
        let x = AlgebraElement::from_raw(self.group, m.clone());
        self.coords(&x)
    }

    pub fn combine(&self, coeffs: &[f64]) -> AlgebraElement {
        let n = self.group.n;
        let mut m = CMatrix::zeros(n, n);
        for (c, e) in coeffs.iter().zip(&self.elements) {
            m += e.matrix() * C64::new(*c, 0.0);
        }
        AlgebraElement::from_raw(self.group, m)
    }

    /// Matrix of `ad_X` acting on the algebra, in this basis.
    pub fn ad_matrix(&self, x: &AlgebraElement) -> DMatrix<f64> {
        let d = self.len();
        let mut out = DMatrix::zeros(d, d);
        for (j, e) in self.elements.iter().enumerate() {
            let col = self.coords_of_matrix(&commutator(x.matrix(), e.matrix()));
            out.set_column(j, &col);
        }
        out
    }

    /// Matrix of `Ad_g` acting on the algebra, in this basis.
    pub fn ad_group_matrix(&self, g: &GroupElement) -> DMatrix<f64> {
        let d = self.len();
        let mut out = DMatrix::zeros(d, d);
        for (j, e) in self.elements.iter().enumerate() {
            let img = g.matrix() * e.matrix() * g.matrix().adjoint();
            out.set_column(j, &self.coords_of_matrix(&img));
        }
        out
    }

    /// Standard-normal coordinates scaled by `scale`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> AlgebraElement {
        let coeffs: Vec<f64> = (0..self.len())
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        self.combine(&coeffs)
    }
}

pub(crate) fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

fn unit(n: usize, i: usize, j: usize, value: C64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = value;
    m
}

/// `R_jk = e_kj - e_jk`, the rotation generator turning `e_j` towards `e_k`.
pub(crate) fn rotation_generator(n: usize, j: usize, k: usize) -> CMatrix {
    unit(n, k, j, C64::new(1.0, 0.0)) - unit(n, j, k, C64::new(1.0, 0.0))
}

/// The frozen trace-orthonormal basis described in the module docs.
pub fn standard_basis(group: &GroupDescriptor) -> OrthonormalBasis {
    let n = group.n;
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut elements = Vec::with_capacity(group.dim_g);
    match group.family {
        GroupFamily::SpecialUnitary => {
            for k in 1..n {
                let norm = ((k * (k + 1)) as f64).sqrt();
                let mut m = CMatrix::zeros(n, n);
                for d in 0..k {
                    m[(d, d)] = i / norm;
                }
                m[(k, k)] = -i * (k as f64) / norm;
                elements.push(AlgebraElement::from_raw(*group, m));
            }
            for a in 0..n {
                for b in (a + 1)..n {
                    let e = (unit(n, a, b, one) - unit(n, b, a, one)) / C64::new(SQRT_2, 0.0);
                    let f = (unit(n, a, b, i) + unit(n, b, a, i)) / C64::new(SQRT_2, 0.0);
                    elements.push(AlgebraElement::from_raw(*group, e));
                    elements.push(AlgebraElement::from_raw(*group, f));
                }
            }
        }
        GroupFamily::SpecialOrthogonal => {
            let scale = C64::new(1.0 / SQRT_2, 0.0);
            for k in 0..group.rank {
                let m = rotation_generator(n, 2 * k, 2 * k + 1) * scale;
                elements.push(AlgebraElement::from_raw(*group, m));
            }
            for a in 0..n {
                for b in (a + 1)..n {
                    let is_cartan = a % 2 == 0 && b == a + 1 && a / 2 < group.rank;
                    if !is_cartan {
                        let m = rotation_generator(n, a, b) * scale;
                        elements.push(AlgebraElement::from_raw(*group, m));
                    }
                }
            }
        }
    }
    OrthonormalBasis {
        group: *group,
        elements,
        cartan_count: group.rank,
    }
}

/// The `2 pi`-periodic angle generators of the standard torus
/// (see the module docs). They span the same subalgebra as the Cartan part of
/// `standard_basis` but are not orthonormal.
pub fn torus_generators(group: &GroupDescriptor) -> Vec<AlgebraElement> {
    let n = group.n;
    match group.family {
        GroupFamily::SpecialUnitary => (0..n - 1)
            .map(|k| {
                let m = unit(n, k, k, C64::new(0.0, 1.0)) - unit(n, n - 1, n - 1, C64::new(0.0, 1.0));
                AlgebraElement::from_raw(*group, m)
            })
            .collect(),
        GroupFamily::SpecialOrthogonal => (0..group.rank)
            .map(|k| AlgebraElement::from_raw(*group, rotation_generator(n, 2 * k, 2 * k + 1)))
            .collect(),
    }
}

/// `[X, Y] = XY - YX`.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    same_group(x.group(), y.group())?;
    Ok(AlgebraElement::from_raw(
        x.group,
        commutator(&x.matrix, &y.matrix),
    ))
}

/// `Ad_g Y = g Y g*`.
pub fn adjoint_group(g: &GroupElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    same_group(g.group(), y.group())?;
    Ok(AlgebraElement::from_raw(
        y.group,
        &g.matrix * &y.matrix * g.matrix.adjoint(),
    ))
}

fn same_group(a: &GroupDescriptor, b: &GroupDescriptor) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch {
            expected: a.to_string(),
            found: b.to_string(),
        });
    }
    Ok(())
}

/// Matrix exponential of a skew matrix.
///
/// `-iX` is Hermitian, so `exp(X) = U diag(e^{i lambda}) U*` from its
/// eigendecomposition. The result is re-projected onto the group if the
/// unitarity defect exceeds `GROUP_TOL`.
pub fn exp_matrix(x: &AlgebraElement) -> GroupElement {
    let group = x.group;
    let herm = x.matrix() * C64::new(0.0, -1.0);
    let eig = herm.symmetric_eigen();
    let phases = DVector::from_iterator(
        group.n,
        eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, l)),
    );
    let u = &eig.eigenvectors;
    let mut m = u * CMatrix::from_diagonal(&phases) * u.adjoint();
    if group.family == GroupFamily::SpecialOrthogonal {
        m.iter_mut().for_each(|z| z.im = 0.0);
    }
    let g = GroupElement::from_raw(group, m);
    if g.unitarity_defect() > GROUP_TOL {
        g.reprojected()
    } else {
        g
    }
}

/// Normalized Haar sample: QR of a Gaussian matrix with the diagonal of `R`
/// made positive (resp. unimodular), then the determinant is divided out of
/// the first column.
pub fn haar_sample<R: Rng + ?Sized>(group: &GroupDescriptor, rng: &mut R) -> GroupElement {
    let n = group.n;
    match group.family {
        GroupFamily::SpecialUnitary => {
            let z = CMatrix::from_fn(n, n, |_, _| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let qr = z.qr();
            let (mut q, r) = (qr.q(), qr.r());
            for j in 0..n {
                let d = r[(j, j)];
                let phase = d / d.norm();
                let col = q.column(j) * phase;
                q.set_column(j, &col);
            }
            let det = q.determinant();
            let fix = det.conj() / det.norm();
            let col = q.column(0) * fix;
            q.set_column(0, &col);
            GroupElement::from_raw(*group, q)
        }
        GroupFamily::SpecialOrthogonal => {
            let z = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
            let qr = z.qr();
            let (mut q, r) = (qr.q(), qr.r());
            for j in 0..n {
                if r[(j, j)] < 0.0 {
                    q.column_mut(j).neg_mut();
                }
            }
            if q.determinant() < 0.0 {
                q.column_mut(0).neg_mut();
            }
            GroupElement::from_raw(*group, q.map(|v| C64::new(v, 0.0)))
        }
    }
}

/// `exp(sum_k angles[k] A_k)` for the torus generators `A_k`.
pub fn torus_element(group: &GroupDescriptor, angles: &[f64]) -> Result<GroupElement> {
    if angles.len() != group.rank {
        return Err(Error::DimensionMismatch {
            expected: group.rank,
            found: angles.len(),
        });
    }
    Ok(exp_matrix(&torus_algebra_element(group, angles)))
}

/// `sum_k angles[k] A_k` without exponentiating.
pub fn torus_algebra_element(group: &GroupDescriptor, angles: &[f64]) -> AlgebraElement {
    let gens = torus_generators(group);
    let mut x = AlgebraElement::zero(*group);
    for (a, g) in angles.iter().zip(&gens) {
        x = x.add(&g.scaled(*a));
    }
    x
}
