//! Conformal maps from the real line onto the problem interval, and the
//! Liouville-form coefficients they induce.
//!
//! Every catalog map is a composition `phi(t) = f(s(t))` with an inner map
//! `s` that fixes the decay type (`s = t` for single-exponential, `s = sinh t`
//! for double-exponential) and an outer map `f` that fixes the interval.
//! Derivatives follow from the chain rule; the curvature part of the
//! transformed potential is evaluated from the ratios `phi''/phi'` and
//! `phi'''/phi'`, which stay finite even where `phi'` itself underflows.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::DecayProfile;

/// A real coefficient function `x -> q(x)` or `x -> rho(x)`.
pub type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalKind {
    /// `(0, 1)`
    Unit,
    /// `(0, inf)`
    HalfLine,
    /// `(-inf, inf)`
    RealLine,
}

impl IntervalKind {
    pub fn endpoints(self) -> (f64, f64) {
        match self {
            IntervalKind::Unit => (0.0, 1.0),
            IntervalKind::HalfLine => (0.0, f64::INFINITY),
            IntervalKind::RealLine => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

impl fmt::Display for IntervalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntervalKind::Unit => "unit",
            IntervalKind::HalfLine => "halfline",
            IntervalKind::RealLine => "realline",
        })
    }
}

impl FromStr for IntervalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(IntervalKind::Unit),
            "halfline" => Ok(IntervalKind::HalfLine),
            "realline" => Ok(IntervalKind::RealLine),
            other => Err(Error::Config(format!(
                "unknown interval '{other}' (expected unit, halfline or realline)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecayKind {
    Se,
    De,
}

impl fmt::Display for DecayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayKind::Se => "se",
            DecayKind::De => "de",
        })
    }
}

impl FromStr for DecayKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "se" => Ok(DecayKind::Se),
            "de" => Ok(DecayKind::De),
            other => Err(Error::Config(format!(
                "unknown map kind '{other}' (expected se or de)"
            ))),
        }
    }
}

/// Value, first derivative and the ratios `f''/f'`, `f'''/f'` of an outer map.
struct OuterJet {
    value: f64,
    d1: f64,
    r2: f64,
    r3: f64,
}

/// Value and first three derivatives of an inner map.
struct InnerJet {
    s: f64,
    d1: f64,
    d2: f64,
    d3: f64,
}

/// One of the catalog maps `phi: R -> (a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalMap {
    interval: IntervalKind,
    decay: DecayKind,
    kappa: f64,
}

impl ConformalMap {
    pub fn interval(&self) -> IntervalKind {
        self.interval
    }

    pub fn decay(&self) -> DecayKind {
        self.decay
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    fn inner(&self, t: f64) -> InnerJet {
        match self.decay {
            DecayKind::Se => InnerJet {
                s: t,
                d1: 1.0,
                d2: 0.0,
                d3: 0.0,
            },
            DecayKind::De => {
                let (sh, ch) = (t.sinh(), t.cosh());
                InnerJet {
                    s: sh,
                    d1: ch,
                    d2: sh,
                    d3: ch,
                }
            }
        }
    }

    fn outer(&self, s: f64) -> OuterJet {
        match self.interval {
            IntervalKind::Unit => {
                // f(s) = tanh(s)/2 + 1/2 = 1 / (1 + e^{-2s})
                let sech = 1.0 / s.cosh();
                let th = s.tanh();
                OuterJet {
                    value: 1.0 / (1.0 + (-2.0 * s).exp()),
                    d1: 0.5 * sech * sech,
                    r2: -2.0 * th,
                    r3: 4.0 * th * th - 2.0 * sech * sech,
                }
            }
            IntervalKind::HalfLine => {
                // f(s) = arcsinh(e^s); f'/f = 1/sqrt(1 + e^{-2s}); (ln f')' = 1/(1 + e^{2s})
                let value = if s > 30.0 {
                    s + (1.0 + (1.0 + (-2.0 * s).exp()).sqrt()).ln()
                } else {
                    s.exp().asinh()
                };
                let d1 = if s >= 0.0 {
                    1.0 / (1.0 + (-2.0 * s).exp()).sqrt()
                } else {
                    s.exp() / (1.0 + (2.0 * s).exp()).sqrt()
                };
                let p = 1.0 / (1.0 + (2.0 * s).exp());
                OuterJet {
                    value,
                    d1,
                    r2: p,
                    r3: 3.0 * p * p - 2.0 * p,
                }
            }
            IntervalKind::RealLine => OuterJet {
                value: self.kappa * s,
                d1: self.kappa,
                r2: 0.0,
                r3: 0.0,
            },
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.outer(self.inner(t).s).value
    }

    pub fn d1(&self, t: f64) -> f64 {
        let inner = self.inner(t);
        self.outer(inner.s).d1 * inner.d1
    }

    pub fn d2(&self, t: f64) -> f64 {
        self.d1(t) * self.d2_over_d1(t)
    }

    pub fn d3(&self, t: f64) -> f64 {
        self.d1(t) * self.d3_over_d1(t)
    }

    /// `phi''(t) / phi'(t)`.
    pub fn d2_over_d1(&self, t: f64) -> f64 {
        let inner = self.inner(t);
        let outer = self.outer(inner.s);
        outer.r2 * inner.d1 + inner.d2 / inner.d1
    }

    /// `phi'''(t) / phi'(t)`.
    pub fn d3_over_d1(&self, t: f64) -> f64 {
        let inner = self.inner(t);
        let outer = self.outer(inner.s);
        outer.r3 * inner.d1 * inner.d1 + 3.0 * outer.r2 * inner.d2 + inner.d3 / inner.d1
    }

    /// The curvature part `3/4 (phi''/phi')^2 - phi'''/(2 phi')` of the
    /// transformed potential.
    pub fn curvature(&self, t: f64) -> f64 {
        let r2 = self.d2_over_d1(t);
        0.75 * r2 * r2 - 0.5 * self.d3_over_d1(t)
    }

    /// Checks monotonicity on a sample grid and the endpoint limits at `t = +-20`.
    pub fn validate(&self) -> Result<()> {
        for i in -120..=120 {
            let t = i as f64 * 0.05;
            let d = self.d1(t);
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::domain(format!(
                    "map {self} is not strictly increasing at t = {t} (phi' = {d})"
                )));
            }
        }
        let (a, b) = self.interval.endpoints();
        let (lo, hi) = (self.phi(-20.0), self.phi(20.0));
        let near = |value: f64, end: f64| {
            if end.is_finite() {
                (value - end).abs() < 1e-6
            } else {
                value.signum() == end.signum() && value.abs() >= 10.0 * self.kappa.min(1.0)
            }
        };
        if !near(lo, a) || !near(hi, b) {
            return Err(Error::domain(format!(
                "map {self} does not reach the endpoints of {}: phi(-20) = {lo}, phi(20) = {hi}",
                self.interval
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ConformalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.interval, self.decay)?;
        if self.kappa != 1.0 {
            write!(f, "(kappa={})", self.kappa)?;
        }
        Ok(())
    }
}

/// Look up a catalog map. A scale `kappa != 1` is only meaningful for the
/// double-exponential real-line map `kappa * sinh(t)`.
pub fn map_catalog(interval: IntervalKind, decay: DecayKind, kappa: f64) -> Result<ConformalMap> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain(format!(
            "map scale must be positive, got {kappa}"
        )));
    }
    if kappa != 1.0 && !(interval == IntervalKind::RealLine && decay == DecayKind::De) {
        return Err(Error::domain(format!(
            "map scale {kappa} is only supported for the real-line DE map"
        )));
    }
    Ok(ConformalMap {
        interval,
        decay,
        kappa,
    })
}

/// Transformed potential `q~(t) = 3/4 (phi''/phi')^2 - phi'''/(2 phi') + phi'^2 q(phi)`.
pub fn qtilde_eval(map: &ConformalMap, q: &dyn Fn(f64) -> f64, t: f64) -> Result<f64> {
    let d1 = map.d1(t);
    if !(d1 > 0.0) {
        return Err(Error::Evaluation {
            t,
            reason: format!("map derivative is {d1}, expected a positive value"),
        });
    }
    let x = map.phi(t);
    let qx = q(x);
    if !qx.is_finite() {
        return Err(Error::Evaluation {
            t,
            reason: format!("q is not finite at x = {x}"),
        });
    }
    let value = map.curvature(t) + d1 * d1 * qx;
    if !value.is_finite() {
        return Err(Error::Evaluation {
            t,
            reason: format!("transformed potential is {value}"),
        });
    }
    Ok(value)
}

/// Transformed weight `rho(phi(t)) phi'(t)^2`.
pub fn weight_eval(map: &ConformalMap, rho: &dyn Fn(f64) -> f64, t: f64) -> Result<f64> {
    let d1 = map.d1(t);
    let x = map.phi(t);
    let value = rho(x) * d1 * d1;
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Evaluation {
            t,
            reason: format!("weight is {value:e} at x = {x}, expected a positive finite value"),
        });
    }
    Ok(value)
}

/// A Sturm-Liouville problem pulled back to the real line by a conformal map.
#[derive(Clone)]
pub struct TransformedProblem {
    pub map: ConformalMap,
    pub q: Coefficient,
    pub rho: Coefficient,
    pub decay: DecayProfile,
}

impl TransformedProblem {
    pub fn new(map: ConformalMap, q: Coefficient, rho: Coefficient, decay: DecayProfile) -> Self {
        Self { map, q, rho, decay }
    }

    pub fn qtilde(&self, t: f64) -> Result<f64> {
        qtilde_eval(&self.map, &*self.q, t)
    }

    pub fn weight(&self, t: f64) -> Result<f64> {
        weight_eval(&self.map, &*self.rho, t)
    }
}

impl fmt::Debug for TransformedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformedProblem")
            .field("map", &self.map)
            .field("decay", &self.decay)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KAPPA_ADAPTED: f64 = 0.4472135954999579;

    fn all_maps() -> Vec<ConformalMap> {
        let mut maps = Vec::new();
        for interval in [
            IntervalKind::Unit,
            IntervalKind::HalfLine,
            IntervalKind::RealLine,
        ] {
            for decay in [DecayKind::Se, DecayKind::De] {
                maps.push(map_catalog(interval, decay, 1.0).unwrap());
            }
        }
        maps.push(map_catalog(IntervalKind::RealLine, DecayKind::De, KAPPA_ADAPTED).unwrap());
        maps
    }

    #[test]
    fn catalog_examples() {
        let id = map_catalog(IntervalKind::RealLine, DecayKind::Se, 1.0).unwrap();
        assert_eq!(id.phi(2.0), 2.0);
        assert_eq!(id.d1(2.0), 1.0);
        assert_eq!(id.d2(2.0), 0.0);
        let unit = map_catalog(IntervalKind::Unit, DecayKind::De, 1.0).unwrap();
        assert_eq!(unit.phi(0.0), 0.5);
        let k = map_catalog(IntervalKind::RealLine, DecayKind::De, KAPPA_ADAPTED).unwrap();
        assert!((k.phi(1.0) - 0.5255659512452867).abs() < 1e-15);
    }

    #[test]
    fn catalog_rejects_scale_outside_real_line_de() {
        assert!(map_catalog(IntervalKind::Unit, DecayKind::De, 0.5).is_err());
        assert!(map_catalog(IntervalKind::RealLine, DecayKind::Se, 2.0).is_err());
        assert!(map_catalog(IntervalKind::RealLine, DecayKind::De, 0.0).is_err());
        assert!(map_catalog(IntervalKind::RealLine, DecayKind::De, -1.0).is_err());
    }

    #[test]
    fn catalog_maps_are_valid() {
        for map in all_maps() {
            map.validate().unwrap_or_else(|e| panic!("{map}: {e}"));
        }
    }

    #[test]
    fn half_line_outer_matches_direct_formula() {
        let se = map_catalog(IntervalKind::HalfLine, DecayKind::Se, 1.0).unwrap();
        for &t in &[-5.0, -0.3, 0.0, 1.7, 12.0, 29.9, 30.1, 40.0] {
            let direct = f64::exp(t).asinh();
            assert!(
                (se.phi(t) - direct).abs() <= 1e-15 * direct.max(1.0),
                "t = {t}"
            );
        }
        let de = map_catalog(IntervalKind::HalfLine, DecayKind::De, 1.0).unwrap();
        // e^{sinh 8} overflows; the asymptotic branch keeps phi finite
        assert!(de.phi(8.0).is_finite());
        assert!((de.phi(8.0) - (8.0f64.sinh() + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // Richardson-extrapolated central differences, O(step^4)
        fn diff(f: impl Fn(f64) -> f64, t: f64) -> f64 {
            let step = 1e-3;
            let c = |s: f64| (f(t + s) - f(t - s)) / (2.0 * s);
            (4.0 * c(0.5 * step) - c(step)) / 3.0
        }
        for map in all_maps() {
            for i in -30..=30 {
                let t = i as f64 * 0.1;
                let fd1 = diff(|s| map.phi(s), t);
                let fd2 = diff(|s| map.d1(s), t);
                let fd3 = diff(|s| map.d2(s), t);
                for (name, exact, fd, scale) in [
                    ("d1", map.d1(t), fd1, map.d1(t).abs()),
                    ("d2", map.d2(t), fd2, map.d1(t).abs() + map.d2(t).abs()),
                    ("d3", map.d3(t), fd3, map.d2(t).abs() + map.d3(t).abs()),
                ] {
                    assert!(
                        (exact - fd).abs() <= 1e-7 * scale + 1e-12,
                        "{map} {name} at t = {t}: {exact} vs {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn identity_map_reduces_qtilde_to_q() {
        let id = map_catalog(IntervalKind::RealLine, DecayKind::Se, 1.0).unwrap();
        let q = |x: f64| x * x + (3.0 * x).sin();
        for i in -100..100 {
            let t = i as f64 * 0.037;
            assert!((qtilde_eval(&id, &q, t).unwrap() - q(t)).abs() <= 1e-15 * q(t).abs().max(1.0));
        }
        assert_eq!(qtilde_eval(&id, &q, 1.3).unwrap(), q(1.3));
    }

    #[test]
    fn qtilde_examples() {
        let sinh = map_catalog(IntervalKind::RealLine, DecayKind::De, 1.0).unwrap();
        assert!((qtilde_eval(&sinh, &|_| 0.0, 0.0).unwrap() + 0.5).abs() < 1e-15);
        let unit = map_catalog(IntervalKind::Unit, DecayKind::De, 1.0).unwrap();
        let bessel7 = |x: f64| (4.0 * 49.0 - 1.0) / (4.0 * x * x);
        assert!((qtilde_eval(&unit, &bessel7, 0.0).unwrap() - 49.25).abs() < 1e-12);
    }

    #[test]
    fn qtilde_reports_failing_point() {
        let id = map_catalog(IntervalKind::RealLine, DecayKind::Se, 1.0).unwrap();
        let err = qtilde_eval(&id, &|x| 1.0 / x, 0.0).unwrap_err();
        match err {
            Error::Evaluation { t, .. } => assert_eq!(t, 0.0),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn weight_examples() {
        let id = map_catalog(IntervalKind::RealLine, DecayKind::Se, 1.0).unwrap();
        assert_eq!(weight_eval(&id, &|_| 1.0, 0.7).unwrap(), 1.0);
        let unit = map_catalog(IntervalKind::Unit, DecayKind::De, 1.0).unwrap();
        assert!((weight_eval(&unit, &|_| 1.0, 0.0).unwrap() - 0.25).abs() < 1e-16);
        let k = map_catalog(IntervalKind::RealLine, DecayKind::De, KAPPA_ADAPTED).unwrap();
        let rho = |x: f64| 1.0 / (x * x + x.cos());
        assert!((weight_eval(&k, &rho, 0.0).unwrap() - 0.2).abs() < 1e-15);
        assert!(weight_eval(&id, &|_| -1.0, 0.0).is_err());
        assert!(weight_eval(&id, &|_| 0.0, 0.0).is_err());
    }

    #[test]
    fn parse_kinds() {
        assert_eq!(
            "halfline".parse::<IntervalKind>().unwrap(),
            IntervalKind::HalfLine
        );
        assert_eq!("de".parse::<DecayKind>().unwrap(), DecayKind::De);
        assert!("circle".parse::<IntervalKind>().is_err());
        assert!("xe".parse::<DecayKind>().is_err());
    }
}
