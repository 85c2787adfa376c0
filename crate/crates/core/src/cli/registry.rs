//! Named test functions for the integration commands.
//!
//! Each function is defined on the ambient points of one family of targets
//! and restricts to the section by evaluation at the embedded section point.

use serde::Serialize;

use crate::actions::{ActionKind, AmbientPoint, PolarAction};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionDomain {
    /// Any target.
    Any,
    /// Group targets (conjugation).
    Group,
    /// Linear targets (adjoint, s-representations).
    Linear,
    /// Round spheres (isotropy and Hermann actions).
    Sphere,
    /// The hyperbolic plane.
    Hyperbolic,
}

impl FunctionDomain {
    fn contains(&self, action: &PolarAction) -> bool {
        match self {
            FunctionDomain::Any => true,
            FunctionDomain::Group => action.kind == ActionKind::Conjugation,
            FunctionDomain::Linear => matches!(
                action.kind,
                ActionKind::AdjointRep | ActionKind::SRepresentation
            ),
            FunctionDomain::Sphere => matches!(
                action.kind,
                ActionKind::SymmetricSpaceCompact | ActionKind::Hermann
            ),
            FunctionDomain::Hyperbolic => action.kind == ActionKind::SymmetricSpaceNoncompact,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Invariance {
    Always,
    Never,
    /// Invariant under the isotropy actions, not under the Hermann action.
    FixesBasePoint,
    /// Invariant under the Hermann action only.
    FixesHermannAxis,
}

#[derive(Clone, Copy)]
pub struct TestFunction {
    pub id: &'static str,
    pub description: &'static str,
    pub domain: FunctionDomain,
    invariance: Invariance,
    eval: fn(&PolarAction, &AmbientPoint) -> f64,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction").field("id", &self.id).finish()
    }
}

fn group_trace(p: &AmbientPoint) -> num_complex::Complex64 {
    p.as_group().expect("group target").trace()
}

fn linear_coords(a: &PolarAction, p: &AmbientPoint) -> nalgebra::DVector<f64> {
    a.euclidean_coords(p).expect("linear target")
}

fn model_vec(p: &AmbientPoint) -> &nalgebra::DVector<f64> {
    p.as_model().expect("model target")
}

/// Base-point coordinate `cos r` on the cataloged spheres.
fn sphere_height(p: &AmbientPoint) -> f64 {
    let v = model_vec(p);
    v[v.len() - 1]
}

fn char2(p: &AmbientPoint) -> num_complex::Complex64 {
    let g = p.as_group().expect("group target").matrix();
    let t = g.trace();
    ((t * t) + (g * g).trace()) / 2.0
}

const REGISTRY: [TestFunction; 16] = [
    TestFunction {
        id: "const1",
        description: "f = 1",
        domain: FunctionDomain::Any,
        invariance: Invariance::Always,
        eval: |_, _| 1.0,
    },
    TestFunction {
        id: "abs_trace_sq",
        description: "|tr g|^2",
        domain: FunctionDomain::Group,
        invariance: Invariance::Always,
        eval: |_, p| group_trace(p).norm_sqr(),
    },
    TestFunction {
        id: "abs_trace_4",
        description: "|tr g|^4",
        domain: FunctionDomain::Group,
        invariance: Invariance::Always,
        eval: |_, p| group_trace(p).norm_sqr().powi(2),
    },
    TestFunction {
        id: "abs_trace_6",
        description: "|tr g|^6",
        domain: FunctionDomain::Group,
        invariance: Invariance::Always,
        eval: |_, p| group_trace(p).norm_sqr().powi(3),
    },
    TestFunction {
        id: "re_trace_gsq",
        description: "Re tr(g^2)",
        domain: FunctionDomain::Group,
        invariance: Invariance::Always,
        eval: |_, p| (p.as_group().expect("group target").matrix().pow(2)).trace().re,
    },
    TestFunction {
        id: "char2_sq",
        description: "|chi_2(g)|^2, chi_2 the character of the symmetric square",
        domain: FunctionDomain::Group,
        invariance: Invariance::Always,
        eval: |_, p| char2(p).norm_sqr(),
    },
    // On SU(2), Re g_11 = Re tr(g)/2 is in fact a class function. It is
    // still routed through the non-invariant path.
    TestFunction {
        id: "re_g11",
        description: "Re g_11, integrated as a non-invariant function",
        domain: FunctionDomain::Group,
        invariance: Invariance::Never,
        eval: |_, p| p.as_group().expect("group target").matrix()[(0, 0)].re,
    },
    TestFunction {
        id: "abs_g12_sq",
        description: "|g_12|^2 (not a class function; integral 1/n)",
        domain: FunctionDomain::Group,
        invariance: Invariance::Never,
        eval: |_, p| p.as_group().expect("group target").matrix()[(0, 1)].norm_sqr(),
    },
    TestFunction {
        id: "gaussian",
        description: "exp(-|x|^2/2)",
        domain: FunctionDomain::Linear,
        invariance: Invariance::Always,
        eval: |a, p| (-0.5 * linear_coords(a, p).norm_squared()).exp(),
    },
    TestFunction {
        id: "coord_poly",
        description: "x_1^2 exp(-|x|^2/2), x_1 the first orthonormal coordinate",
        domain: FunctionDomain::Linear,
        invariance: Invariance::Never,
        eval: |a, p| {
            let x = linear_coords(a, p);
            x[0] * x[0] * (-0.5 * x.norm_squared()).exp()
        },
    },
    TestFunction {
        id: "quartic_gauss",
        description: "|x|^4 exp(-|x|^2/2)",
        domain: FunctionDomain::Linear,
        invariance: Invariance::Always,
        eval: |a, p| {
            let r2 = linear_coords(a, p).norm_squared();
            r2 * r2 * (-0.5 * r2).exp()
        },
    },
    TestFunction {
        id: "cos_r_sq",
        description: "cos^2 r, r the distance from the base point",
        domain: FunctionDomain::Sphere,
        invariance: Invariance::FixesBasePoint,
        eval: |_, p| sphere_height(p).powi(2),
    },
    TestFunction {
        id: "harmonic_deg1",
        description: "cos r, a degree-one spherical harmonic",
        domain: FunctionDomain::Sphere,
        invariance: Invariance::FixesBasePoint,
        eval: |_, p| sphere_height(p),
    },
    TestFunction {
        id: "x_coord_sq",
        description: "x^2, the squared first embedding coordinate",
        domain: FunctionDomain::Sphere,
        invariance: Invariance::FixesHermannAxis,
        eval: |_, p| model_vec(p)[0].powi(2),
    },
    TestFunction {
        id: "sech_r",
        description: "1/cosh r on the hyperbolic plane",
        domain: FunctionDomain::Hyperbolic,
        invariance: Invariance::Always,
        eval: |_, p| 1.0 / model_vec(p)[2],
    },
    TestFunction {
        id: "cosh_r_sq",
        description: "cosh^2 r on the hyperbolic plane",
        domain: FunctionDomain::Hyperbolic,
        invariance: Invariance::Always,
        eval: |_, p| model_vec(p)[2].powi(2),
    },
];

impl TestFunction {
    pub fn applies_to(&self, action: &PolarAction) -> bool {
        self.domain.contains(action)
    }

    pub fn is_invariant_for(&self, action: &PolarAction) -> bool {
        match self.invariance {
            Invariance::Always => true,
            Invariance::Never => false,
            Invariance::FixesBasePoint => action.kind != ActionKind::Hermann,
            Invariance::FixesHermannAxis => action.kind == ActionKind::Hermann,
        }
    }

    fn check(&self, action: &PolarAction) -> Result<()> {
        if self.applies_to(action) {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "function '{}' is not defined on the target of '{}'",
                self.id, action.id
            )))
        }
    }

    /// The function on the ambient space of `action`.
    pub fn bind<'a>(&self, action: &'a PolarAction) -> Result<impl Fn(&AmbientPoint) -> f64 + Sync + 'a> {
        self.check(action)?;
        let eval = self.eval;
        Ok(move |p: &AmbientPoint| eval(action, p))
    }

    /// The restriction to the section; requires invariance.
    pub fn bind_section<'a>(&self, action: &'a PolarAction) -> Result<impl Fn(&[f64]) -> f64 + Sync + 'a> {
        self.check(action)?;
        if !self.is_invariant_for(action) {
            return Err(Error::NotInvariant {
                function: self.id.to_string(),
                action: action.id.clone(),
            });
        }
        let eval = self.eval;
        Ok(move |s: &[f64]| {
            let p = action.section_embed(s).expect("rule nodes have the section dimension");
            eval(action, &p)
        })
    }
}

pub fn test_function_registry() -> &'static [TestFunction] {
    &REGISTRY
}

pub fn function_by_id(id: &str) -> Result<TestFunction> {
    REGISTRY
        .iter()
        .find(|f| f.id == id)
        .copied()
        .ok_or_else(|| Error::UnknownId {
            what: "function",
            id: id.to_string(),
            available: REGISTRY.iter().map(|f| f.id.to_string()).collect(),
        })
}

/// Registry listing with the cataloged actions each function is defined
/// on, split by invariance.
#[derive(Clone, Debug, Serialize)]
pub struct RegistryEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub domain: FunctionDomain,
    pub invariant_on: Vec<String>,
    pub non_invariant_on: Vec<String>,
}

pub fn registry_listing(actions: &[PolarAction]) -> Vec<RegistryEntry> {
    REGISTRY
        .iter()
        .map(|f| {
            let mut entry = RegistryEntry {
                id: f.id,
                description: f.description,
                domain: f.domain,
                invariant_on: Vec::new(),
                non_invariant_on: Vec::new(),
            };
            for a in actions.iter().filter(|a| f.applies_to(a)) {
                if f.is_invariant_for(a) {
                    entry.invariant_on.push(a.id.clone());
                } else {
                    entry.non_invariant_on.push(a.id.clone());
                }
            }
            entry
        })
        .collect()
}
