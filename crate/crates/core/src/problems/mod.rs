//! Built-in example problems and user-defined problems loaded from config.

mod bessel;
mod config;
mod expr;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::sync::Arc;

pub use bessel::{bessel_j, bessel_zero};
pub use config::parse_problem_config;
pub use expr::{parse_expression, BinOp, Expr, Func};

use crate::error::{Error, Result};
use crate::mesh::DecayProfile;
use crate::transform::{
    map_catalog, Coefficient, ConformalMap, DecayKind, IntervalKind, TransformedProblem,
};

/// Closed-form eigenvalues known for a problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    /// `lambda_i = j_{order,i}^2`.
    BesselZerosSquared {
        order: u32,
    },
    /// `lambda_i = i - 1`.
    ShiftedIndex,
    None,
}

/// `-u'' + q(x) u = lambda rho(x) u` on an interval with Dirichlet
/// conditions, together with the maps and decay data needed to discretize it.
#[derive(Clone)]
pub struct SturmLiouvilleProblem {
    pub name: String,
    pub interval: IntervalKind,
    pub q: Coefficient,
    pub rho: Coefficient,
    pub params: BTreeMap<String, f64>,
    pub se_profile: Option<DecayProfile>,
    pub de_profile: DecayProfile,
    pub se_map: ConformalMap,
    pub de_map: ConformalMap,
    /// Method used when none is requested explicitly.
    pub default_method: DecayKind,
    pub reference: Reference,
}

impl fmt::Debug for SturmLiouvilleProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SturmLiouvilleProblem")
            .field("name", &self.name)
            .field("interval", &self.interval)
            .field("params", &self.params)
            .field("se_profile", &self.se_profile)
            .field("de_profile", &self.de_profile)
            .field("se_map", &self.se_map)
            .field("de_map", &self.de_map)
            .field("default_method", &self.default_method)
            .field("reference", &self.reference)
            .finish_non_exhaustive()
    }
}

impl SturmLiouvilleProblem {
    pub fn map(&self, decay: DecayKind) -> ConformalMap {
        match decay {
            DecayKind::Se => self.se_map,
            DecayKind::De => self.de_map,
        }
    }

    pub fn profile(&self, decay: DecayKind) -> Result<DecayProfile> {
        match decay {
            DecayKind::De => Ok(self.de_profile),
            DecayKind::Se => self.se_profile.ok_or_else(|| {
                Error::Config(format!("problem '{}' has no SE decay profile", self.name))
            }),
        }
    }

    /// The problem pulled back to the real line by the map for `decay`.
    pub fn transformed(&self, decay: DecayKind) -> Result<TransformedProblem> {
        Ok(TransformedProblem::new(
            self.map(decay),
            self.q.clone(),
            self.rho.clone(),
            self.profile(decay)?,
        ))
    }

    /// Check `rho > 0` and `q` finite at interior sample points.
    pub fn validate(&self) -> Result<()> {
        self.de_map.validate()?;
        self.se_map.validate()?;
        for i in -40..=40 {
            let x = self.de_map.phi(i as f64 * 0.1);
            let (a, b) = self.interval.endpoints();
            if !(x > a && x < b) {
                continue;
            }
            let (qx, rx) = ((self.q)(x), (self.rho)(x));
            if !qx.is_finite() {
                return Err(Error::domain(format!("q({x}) = {qx} is not finite")));
            }
            if !(rx > 0.0) || !rx.is_finite() {
                return Err(Error::domain(format!(
                    "rho({x}) = {rx}, expected a positive value"
                )));
            }
        }
        Ok(())
    }

    /// Closed-form eigenvalue `lambda_index` (1-based) when known.
    pub fn reference_eigenvalue(&self, index: usize) -> Option<f64> {
        if index == 0 {
            return None;
        }
        match self.reference {
            Reference::BesselZerosSquared { order } => {
                let z = bessel_zero(order, u32::try_from(index).ok()?).ok()?;
                Some(z * z)
            }
            Reference::ShiftedIndex => Some(index as f64 - 1.0),
            Reference::None => None,
        }
    }
}

/// Free function form of [`SturmLiouvilleProblem::reference_eigenvalue`].
pub fn reference_eigenvalue(problem: &SturmLiouvilleProblem, index: usize) -> Option<f64> {
    problem.reference_eigenvalue(index)
}

fn take_param(params: &mut BTreeMap<String, f64>, key: &str) -> Option<f64> {
    params.remove(key)
}

fn reject_leftovers(name: &str, params: &BTreeMap<String, f64>) -> Result<()> {
    match params.keys().next() {
        Some(key) => Err(Error::Config(format!(
            "unknown parameter '{key}' for problem '{name}'"
        ))),
        None => Ok(()),
    }
}

/// Bessel problem `-u'' + (4n^2 - 1)/(4x^2) u = lambda u` on (0, 1).
pub fn builtin_bessel(order: u32) -> Result<SturmLiouvilleProblem> {
    if order < 1 {
        return Err(Error::domain(format!(
            "Bessel order must be an integer >= 1, got {order}"
        )));
    }
    let n = order as f64;
    let c = (4.0 * n * n - 1.0) / 4.0;
    Ok(SturmLiouvilleProblem {
        name: "bessel".into(),
        interval: IntervalKind::Unit,
        q: Arc::new(move |x| c / (x * x)),
        rho: Arc::new(|_| 1.0),
        params: BTreeMap::from([("n".into(), n)]),
        se_profile: Some(DecayProfile::se(1.0, 1.0, FRAC_PI_2)?),
        de_profile: DecayProfile::de(n, 0.5, 1.0, 1.0, FRAC_PI_2)?,
        se_map: map_catalog(IntervalKind::Unit, DecayKind::Se, 1.0)?,
        de_map: map_catalog(IntervalKind::Unit, DecayKind::De, 1.0)?,
        default_method: DecayKind::De,
        reference: Reference::BesselZerosSquared { order },
    })
}

/// Laguerre problem `-u'' + ((a^2 - 1/4)/x^2 - (a+1)/2 + x^2/16) u = lambda u`
/// on (0, inf), with eigenvalues `0, 1, 2, ...`.
pub fn builtin_laguerre(alpha: f64) -> Result<SturmLiouvilleProblem> {
    if !(alpha > 0.5) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "Laguerre alpha must exceed 1/2, got {alpha}"
        )));
    }
    let c = alpha * alpha - 0.25;
    let shift = 0.5 * (alpha + 1.0);
    Ok(SturmLiouvilleProblem {
        name: "laguerre".into(),
        interval: IntervalKind::HalfLine,
        q: Arc::new(move |x| c / (x * x) - shift + x * x / 16.0),
        rho: Arc::new(|_| 1.0),
        params: BTreeMap::from([("alpha".into(), alpha)]),
        se_profile: Some(DecayProfile::se(0.125, 2.0, FRAC_PI_2)?),
        de_profile: DecayProfile::de(0.5 * alpha, 1.0 / 32.0, 1.0, 2.0, FRAC_PI_4)?,
        se_map: map_catalog(IntervalKind::HalfLine, DecayKind::Se, 1.0)?,
        de_map: map_catalog(IntervalKind::HalfLine, DecayKind::De, 1.0)?,
        default_method: DecayKind::De,
        reference: Reference::ShiftedIndex,
    })
}

/// Default scale of the sinh map for the singular problem.
pub fn singular_default_kappa() -> f64 {
    0.2f64.sqrt()
}

/// Problem on the real line whose coefficients have complex singularities
/// at `+-i sqrt(0.1)`, solved with the map `kappa sinh(t)`.
pub fn builtin_singular(kappa: f64) -> Result<SturmLiouvilleProblem> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::domain(format!(
            "singular problem needs kappa in (0, 1], got {kappa}"
        )));
    }
    // nearest pulled-back singularity of q is at i asin(sqrt(0.1)/kappa), capped by the map at pi/4
    let ratio = 0.1f64.sqrt() / kappa;
    let d = if ratio >= 1.0 {
        FRAC_PI_4
    } else {
        ratio.asin().min(FRAC_PI_4)
    };
    let beta = kappa * kappa / 8.0;
    Ok(SturmLiouvilleProblem {
        name: "singular".into(),
        interval: IntervalKind::RealLine,
        q: Arc::new(|x| x * x + x.tanh() / (x * x + 1.1).ln()),
        rho: Arc::new(|x| 1.0 / (x * x + x.cos())),
        params: BTreeMap::from([("kappa".into(), kappa)]),
        se_profile: Some(DecayProfile::se(0.5, 2.0, 0.1f64.sqrt())?),
        de_profile: DecayProfile::de(beta, beta, 2.0, 2.0, d)?,
        se_map: map_catalog(IntervalKind::RealLine, DecayKind::Se, 1.0)?,
        de_map: map_catalog(IntervalKind::RealLine, DecayKind::De, kappa)?,
        default_method: DecayKind::De,
        reference: Reference::None,
    })
}

/// Look up a built-in problem by name. Recognised parameters: `n` for
/// bessel (default 7), `alpha` for laguerre (default 3), `kappa` for
/// singular (default `sqrt(0.2)`).
pub fn builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<SturmLiouvilleProblem> {
    let mut rest = params.clone();
    let problem = match name {
        "bessel" => {
            let n = take_param(&mut rest, "n").unwrap_or(7.0);
            if n.fract() != 0.0 || !(1.0..=u32::MAX as f64).contains(&n) {
                return Err(Error::domain(format!(
                    "Bessel order must be an integer >= 1, got {n}"
                )));
            }
            builtin_bessel(n as u32)?
        }
        "laguerre" => builtin_laguerre(take_param(&mut rest, "alpha").unwrap_or(3.0))?,
        "singular" => {
            builtin_singular(take_param(&mut rest, "kappa").unwrap_or_else(singular_default_kappa))?
        }
        other => return Err(Error::Config(format!("unknown built-in problem '{other}'"))),
    };
    reject_leftovers(name, &rest)?;
    Ok(problem)
}
