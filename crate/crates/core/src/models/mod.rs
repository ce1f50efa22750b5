//! Built-in model catalog.

mod polynomials;
mod spin;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use polynomials::{jacobi, jacobi_matrix, laguerre, laguerre_matrix, polynomial_roots, RootApprox, RootSolver};
pub use spin::{
    collective_spin, collective_spin_matrix, lipkin, lipkin_moments, lipkin_sector_matrix, uniaxial, uniaxial_matrix,
    Parity,
};

use crate::error::{Error, Result};
use crate::numerics::ScalarFn;
use crate::sequence::{materialize, BandProfileSet, ProfileSet, TridiagonalMatrix};
use crate::spectra::Atom;

pub type Evaluator = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;
pub type ExactMatrix = Arc<dyn Fn(usize) -> Result<TridiagonalMatrix> + Send + Sync>;

/// Model profiles: tridiagonal or general band.
#[derive(Debug, Clone)]
pub enum Profiles {
    Tridiagonal(ProfileSet),
    Band(BandProfileSet),
}

/// Closed-form densities. `rho1` is the continuous part; atoms are listed separately.
/// `d0`/`d1` are present only where a closed distribution function is known.
#[derive(Clone)]
pub struct ClosedForms {
    pub rho0: Evaluator,
    pub rho1: Evaluator,
    pub d0: Option<Evaluator>,
    pub d1: Option<Evaluator>,
    pub atoms: Vec<Atom>,
}

#[derive(Clone)]
pub struct ModelDescriptor {
    pub name: String,
    pub parameters: Vec<(String, f64)>,
    pub profiles: Profiles,
    pub closed_forms: Option<ClosedForms>,
    /// The model's own finite matrix as a function of `2j`, when it differs
    /// from sampling the profiles.
    pub exact: Option<ExactMatrix>,
    pub notes: String,
}

impl fmt::Debug for ModelDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelDescriptor")
            .field("name", &self.name)
            .field("parameters", &self.parameters)
            .field("profiles", &self.profiles)
            .field("closed_forms", &self.closed_forms.is_some())
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl ModelDescriptor {
    pub fn tridiagonal(&self) -> Result<&ProfileSet> {
        match &self.profiles {
            Profiles::Tridiagonal(p) => Ok(p),
            Profiles::Band(_) => Err(Error::Invalid(format!("model {} is band-diagonal", self.name))),
        }
    }

    pub fn band(&self) -> Result<BandProfileSet> {
        match &self.profiles {
            Profiles::Tridiagonal(p) => BandProfileSet::from_profiles(p),
            Profiles::Band(b) => Ok(b.clone()),
        }
    }

    /// Finite matrix of size `2j+1`: the exact model matrix when available,
    /// otherwise the sampled profiles.
    pub fn matrix(&self, two_j: usize) -> Result<TridiagonalMatrix> {
        match &self.exact {
            Some(m) => m(two_j),
            None => materialize(self.tridiagonal()?, two_j),
        }
    }

    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

/// A profile with analytic first and second derivatives.
pub(crate) fn smooth(
    label: &str,
    f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
    d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> ScalarFn {
    ScalarFn::new(label, f).with_derivative(d1).with_second_derivative(d2)
}

pub fn toeplitz(a: f64, b: f64) -> Result<ModelDescriptor> {
    if b <= 0.0 {
        return Err(Error::Invalid(format!("Toeplitz off-diagonal must be positive, got {b}")));
    }
    let p = ProfileSet::new(
        "toeplitz",
        ScalarFn::constant(a),
        ScalarFn::constant(0.0),
        ScalarFn::constant(b),
        ScalarFn::constant(0.0),
    )?;
    Ok(ModelDescriptor {
        name: "toeplitz".into(),
        parameters: vec![("a".into(), a), ("b".into(), b)],
        profiles: Profiles::Tridiagonal(p),
        closed_forms: None,
        exact: None,
        notes: "constant diagonal a and off-diagonal b".into(),
    })
}

/// `A0 = -10x² + 11x - 5/2`, `B0 = x(1-x)`: for `-3/2 ≤ λ < 1/32` the support
/// splits into two intervals.
pub fn alternating_states() -> Result<ModelDescriptor> {
    let p = ProfileSet::new(
        "alternating",
        smooth("-10x^2+11x-5/2", |x| -10.0 * x * x + 11.0 * x - 2.5, |x| -20.0 * x + 11.0, |_| -20.0),
        ScalarFn::constant(0.0),
        smooth("x(1-x)", |x| x * (1.0 - x), |x| 1.0 - 2.0 * x, |_| -2.0),
        ScalarFn::constant(0.0),
    )?;
    Ok(ModelDescriptor {
        name: "alternating".into(),
        parameters: Vec::new(),
        profiles: Profiles::Tridiagonal(p),
        closed_forms: None,
        exact: None,
        notes: "closed sequence with a two-interval support region".into(),
    })
}

pub fn custom(a0: &str, a1: &str, b0: &str, b1: &str) -> Result<ModelDescriptor> {
    let p = ProfileSet::from_expressions("custom", a0, a1, b0, b1)?;
    Ok(ModelDescriptor {
        name: "custom".into(),
        parameters: Vec::new(),
        profiles: Profiles::Tridiagonal(p),
        closed_forms: None,
        exact: None,
        notes: format!("A0={a0}; A1={a1}; B0={b0}; B1={b1}"),
    })
}

pub const REGISTRY: [&str; 9] = [
    "toeplitz",
    "alternating",
    "lipkin-even",
    "lipkin-odd",
    "uniaxial",
    "collective",
    "laguerre",
    "jacobi",
    "custom",
];

/// Builds a named model from numeric parameters; missing ones take defaults.
/// `custom` needs expressions and is built with [`custom`].
pub fn by_name(name: &str, params: &BTreeMap<String, f64>) -> Result<ModelDescriptor> {
    let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
    match name {
        "toeplitz" => toeplitz(get("a", 0.0), get("b", 1.0)),
        "alternating" => alternating_states(),
        "lipkin-even" => lipkin(get("gamma", 1.0), Parity::Even),
        "lipkin-odd" => lipkin(get("gamma", 1.0), Parity::Odd),
        "uniaxial" => uniaxial(get("gamma", 1.0)),
        "collective" => collective_spin(
            [get("hx", 0.0), get("hy", 0.0), get("hz", 1.0)],
            get("gx", 0.0),
            get("gy", 0.0),
        ),
        "laguerre" => laguerre(get("alpha0", 1.0), get("alpha1", 0.0)),
        "jacobi" => jacobi(get("alpha0", 1.0), get("alpha1", 0.0), get("beta0", 1.0), get("beta1", 0.0)),
        "custom" => Err(Error::Invalid("custom models are built from --A0/--A1/--B0/--B1 expressions".into())),
        other => Err(Error::Invalid(format!(
            "unknown model '{other}'; expected one of {}",
            REGISTRY.join(", ")
        ))),
    }
}
