//! Static root and restricted-root tables for the cataloged actions.
//!
//! A root vector `a` represents the functional `alpha` through
//! `alpha(X)/i = dot(a, coords)`, where `coords` are the section coordinates
//! of the corresponding action:
//!
//! * `su(n)`: torus angles `theta_1..theta_{n-1}`. With the eigenvalue phases
//!   `phi = (theta_1, .., theta_{n-1}, -sum theta)` the positive roots are
//!   `phi_j - phi_k`, `j < k`. For `su(2)` this gives `alpha(theta)/i = 2 theta`.
//! * `so(n)`: rotation angles of the planes `(1,2), (3,4), ..`; positive roots
//!   `theta_j ± theta_k` and, for odd `n`, `theta_j`.
//! * rank-one model spaces: the geodesic radius `r` (unit curvature), so
//!   `alpha(r) = r`.
//!
//! The angle coordinates relate to trace-orthonormal Cartan coordinates by the
//! Gram matrix of the torus generators: for `su(n)` it is `I + J` (ones
//! matrix), for `so(n)` it is `2 I`. In particular the `su(2)` angle is
//! `1/sqrt(2)` times the orthonormal coordinate along `H_1`.
//!
//! The tables are checked against joint `ad`-eigenvalues in the test suite.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lie_core::{GroupDescriptor, GroupFamily};

/// How the Weyl group acts on section coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum WeylType {
    /// Permutations of the `n` phases `phi` of `su(n)` angle coordinates.
    A { n: usize },
    /// All signed permutations.
    B { rank: usize },
    /// Signed permutations with an even number of sign changes.
    D { rank: usize },
    /// `{id}`; used by abelian groups.
    Trivial { rank: usize },
}

impl WeylType {
    pub fn order(&self) -> usize {
        let fact = |k: usize| (1..=k).product::<usize>();
        match *self {
            WeylType::A { n } => fact(n),
            WeylType::B { rank } => (1 << rank) * fact(rank),
            WeylType::D { rank } => (1 << (rank - 1)) * fact(rank),
            WeylType::Trivial { .. } => 1,
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            WeylType::A { n } => n - 1,
            WeylType::B { rank } | WeylType::D { rank } | WeylType::Trivial { rank } => rank,
        }
    }

    /// Images of `x` under every group element, with repetitions, in a fixed
    /// enumeration order. The first entry is `x` itself.
    pub fn images(&self, x: &[f64]) -> Vec<Vec<f64>> {
        match *self {
            WeylType::A { n } => {
                let mut phi: Vec<f64> = x.to_vec();
                phi.push(-x.iter().sum::<f64>());
                permutations(n)
                    .into_iter()
                    .map(|p| p[..n - 1].iter().map(|&i| phi[i]).collect())
                    .collect()
            }
            WeylType::B { rank } | WeylType::D { rank } => {
                let even_only = matches!(self, WeylType::D { .. });
                let mut out = Vec::new();
                for p in permutations(rank) {
                    for signs in 0u32..(1 << rank) {
                        if even_only && signs.count_ones() % 2 == 1 {
                            continue;
                        }
                        out.push(
                            p.iter()
                                .enumerate()
                                .map(|(slot, &i)| {
                                    if signs & (1 << slot) != 0 {
                                        -x[i]
                                    } else {
                                        x[i]
                                    }
                                })
                                .collect(),
                        );
                    }
                }
                out
            }
            WeylType::Trivial { .. } => vec![x.to_vec()],
        }
    }
}

/// Permutations of `0..n` with the identity first.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

/// Positive roots with multiplicities and the Weyl group of a section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootDatum {
    #[serde(rename = "type")]
    pub label: String,
    pub positive_roots: Vec<Vec<f64>>,
    pub multiplicities: Vec<u32>,
    pub weyl_order: usize,
    #[serde(skip)]
    pub weyl: Option<WeylType>,
}

impl RootDatum {
    fn new(label: impl Into<String>, roots: Vec<Vec<f64>>, mult: Vec<u32>, weyl: WeylType) -> Self {
        Self {
            label: label.into(),
            multiplicities: mult,
            positive_roots: roots,
            weyl_order: weyl.order(),
            weyl: Some(weyl),
        }
    }

    pub fn rank(&self) -> usize {
        self.weyl.map(|w| w.rank()).unwrap_or_else(|| {
            self.positive_roots.first().map(Vec::len).unwrap_or(0)
        })
    }

    /// `sum_alpha m_alpha`, the homogeneity degree of the Euclidean product
    /// formulas.
    pub fn total_multiplicity(&self) -> u32 {
        self.multiplicities.iter().sum()
    }

    /// Root values `alpha(x)/i` for every positive root, in table order.
    pub fn values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.positive_roots.iter().map(|a| eval_root(a, x)).collect()
    }

    fn weyl_type(&self) -> Result<WeylType> {
        self.weyl
            .ok_or_else(|| Error::Unsupported(format!("no Weyl group for '{}'", self.label)))
    }
}

/// Positive roots of the Lie algebra of `group` in torus angle coordinates.
pub fn group_roots(group: &GroupDescriptor) -> RootDatum {
    let r = group.rank;
    let e = |i: usize| {
        let mut v = vec![0.0; r];
        v[i] = 1.0;
        v
    };
    match group.family {
        GroupFamily::SpecialUnitary => {
            let n = group.n;
            // phi_j as a functional of theta.
            let phi = |j: usize| -> Vec<f64> {
                if j < n - 1 {
                    e(j)
                } else {
                    vec![-1.0; r]
                }
            };
            let mut roots = Vec::new();
            for j in 0..n {
                for k in (j + 1)..n {
                    let (a, b) = (phi(j), phi(k));
                    roots.push(a.iter().zip(&b).map(|(x, y)| x - y).collect());
                }
            }
            let m = vec![1; roots.len()];
            RootDatum::new(format!("A{}", n - 1), roots, m, WeylType::A { n })
        }
        GroupFamily::SpecialOrthogonal => {
            let mut roots = Vec::new();
            for j in 0..r {
                for k in (j + 1)..r {
                    let mut minus = e(j);
                    minus[k] = -1.0;
                    let mut plus = e(j);
                    plus[k] = 1.0;
                    roots.push(minus);
                    roots.push(plus);
                }
            }
            let odd = group.n % 2 == 1;
            if odd {
                roots.extend((0..r).map(e));
            }
            let m = vec![1; roots.len()];
            let (label, weyl) = match (group.n, odd) {
                (2, _) => ("T1".to_string(), WeylType::Trivial { rank: 1 }),
                (_, true) => (format!("B{r}"), WeylType::B { rank: r }),
                (_, false) => (format!("D{r}"), WeylType::D { rank: r }),
            };
            RootDatum::new(label, roots, m, weyl)
        }
    }
}

/// Symmetric spaces with restricted-root data in the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetricSpace {
    /// `S^n = SO(n+1)/SO(n)`.
    Sphere(usize),
    /// `H^2 = SO(2,1)/SO(2)`.
    HyperbolicPlane,
    /// `SU(n)/SO(n)`.
    UnitaryOverOrthogonal(usize),
}

impl SymmetricSpace {
    pub fn new_sphere(n: usize) -> Result<Self> {
        if (2..=3).contains(&n) {
            Ok(Self::Sphere(n))
        } else {
            Err(Error::Unsupported(format!("sphere S^{n}")))
        }
    }

    pub fn new_unitary_over_orthogonal(n: usize) -> Result<Self> {
        if (2..=3).contains(&n) {
            Ok(Self::UnitaryOverOrthogonal(n))
        } else {
            Err(Error::Unsupported(format!("SU({n})/SO({n})")))
        }
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self, Self::HyperbolicPlane)
    }

    pub fn rank(&self) -> usize {
        match *self {
            Self::Sphere(_) | Self::HyperbolicPlane => 1,
            Self::UnitaryOverOrthogonal(n) => n - 1,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Self::Sphere(n) => format!("S{n}"),
            Self::HyperbolicPlane => "H2".into(),
            Self::UnitaryOverOrthogonal(n) => format!("SU({n})/SO({n})"),
        }
    }
}

/// Restricted positive roots with multiplicities.
pub fn restricted_roots(space: &SymmetricSpace) -> RootDatum {
    match *space {
        SymmetricSpace::Sphere(n) => RootDatum::new(
            format!("S{n}"),
            vec![vec![1.0]],
            vec![(n - 1) as u32],
            WeylType::B { rank: 1 },
        ),
        SymmetricSpace::HyperbolicPlane => {
            RootDatum::new("H2", vec![vec![1.0]], vec![1], WeylType::B { rank: 1 })
        }
        SymmetricSpace::UnitaryOverOrthogonal(n) => {
            let g = GroupDescriptor::special_unitary(n).expect("n in 2..=3");
            let mut d = group_roots(&g);
            d.label = format!("A{}-restricted", n - 1);
            d
        }
    }
}

/// `alpha(X)/i` as the dot product of the root vector with the coordinates.
pub fn eval_root(root: &[f64], x: &[f64]) -> Result<f64> {
    if root.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: root.len(),
            found: x.len(),
        });
    }
    Ok(root.iter().zip(x).map(|(a, b)| a * b).sum())
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn close_mod(a: &[f64], b: &[f64], period: f64, tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| {
        let d = (x - y).rem_euclid(period);
        d.min(period - d) <= tol
    })
}

fn dedup_tol(x: &[f64]) -> f64 {
    1e-12 * x.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// The distinct points of the Weyl orbit of `x`, `x` first.
pub fn weyl_orbit(datum: &RootDatum, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let weyl = datum.weyl_type()?;
    if x.len() != weyl.rank() {
        return Err(Error::DimensionMismatch {
            expected: weyl.rank(),
            found: x.len(),
        });
    }
    let tol = dedup_tol(x);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in weyl.images(x) {
        if !out.iter().any(|q| close(q, &p, tol)) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Number of Weyl group elements fixing `x`, optionally modulo the lattice
/// `period * Z^rank`.
pub fn weyl_stabilizer_order(datum: &RootDatum, x: &[f64], period: Option<f64>) -> Result<usize> {
    let weyl = datum.weyl_type()?;
    let tol = 1e-9 * x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    Ok(weyl
        .images(x)
        .iter()
        .filter(|p| match period {
            Some(t) => close_mod(p, x, t, tol),
            None => close(p, x, tol),
        })
        .count())
}

/// Distance from `value` to the nearest point of `offset + step * Z`.
pub(crate) fn distance_to_lattice(value: f64, offset: f64, step: f64) -> f64 {
    let d = (value - offset).rem_euclid(step);
    d.min(step - d)
}

/// Singular values of a root for a torus section: `2 pi Z`.
pub(crate) const TORUS_WALL_STEP: f64 = 2.0 * PI;
/// Singular values of a root on a compact-type flat: `pi Z`.
pub(crate) const COMPACT_FLAT_WALL_STEP: f64 = PI;
