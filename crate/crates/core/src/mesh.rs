//! Mesh size and truncation selection for the SE and DE collocation methods.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lambertw::lambert_w0;
use crate::transform::DecayKind;

/// Decay envelope of the transformed eigenfunction together with the
/// half-width `d` of its strip of analyticity.
///
/// * DE: `|v(t)| <= C exp(-beta_l exp(gamma_l |t|))` for `t <= 0`, and the
///   same with `beta_r, gamma_r` for `t >= 0`.
/// * SE: `|v(t)| <= C exp(-alpha |t|^rho_decay)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayProfile {
    Se {
        alpha: f64,
        rho_decay: f64,
        d: f64,
    },
    De {
        beta_l: f64,
        beta_r: f64,
        gamma_l: f64,
        gamma_r: f64,
        d: f64,
    },
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

impl DecayProfile {
    pub fn se(alpha: f64, rho_decay: f64, d: f64) -> Result<Self> {
        let p = DecayProfile::Se {
            alpha,
            rho_decay,
            d,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn de(beta_l: f64, beta_r: f64, gamma_l: f64, gamma_r: f64, d: f64) -> Result<Self> {
        let p = DecayProfile::De {
            beta_l,
            beta_r,
            gamma_l,
            gamma_r,
            d,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn kind(&self) -> DecayKind {
        match self {
            DecayProfile::Se { .. } => DecayKind::Se,
            DecayProfile::De { .. } => DecayKind::De,
        }
    }

    pub fn d(&self) -> f64 {
        match *self {
            DecayProfile::Se { d, .. } | DecayProfile::De { d, .. } => d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DecayProfile::Se {
                alpha,
                rho_decay,
                d,
            } => {
                check_positive("alpha", alpha)?;
                check_positive("rho_decay", rho_decay)?;
                check_positive("d", d)
            }
            DecayProfile::De {
                beta_l,
                beta_r,
                gamma_l,
                gamma_r,
                d,
            } => {
                check_positive("beta_l", beta_l)?;
                check_positive("beta_r", beta_r)?;
                check_positive("gamma_l", gamma_l)?;
                check_positive("gamma_r", gamma_r)?;
                check_positive("d", d)?;
                let bound = PI / (2.0 * gamma_l.max(gamma_r));
                // small slack so d = pi/(2 gamma) written as a decimal is accepted
                if d > bound * (1.0 + 1e-12) {
                    return Err(Error::domain(format!(
                        "strip width d = {d} exceeds pi/(2 gamma) = {bound}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Mirror image `t -> -t`: left and right decay constants exchanged.
    pub fn mirrored(&self) -> Self {
        match *self {
            DecayProfile::De {
                beta_l,
                beta_r,
                gamma_l,
                gamma_r,
                d,
            } => DecayProfile::De {
                beta_l: beta_r,
                beta_r: beta_l,
                gamma_l: gamma_r,
                gamma_r: gamma_l,
                d,
            },
            se => se,
        }
    }
}

/// Mesh size `h` and truncation indices: collocation points are `k h` for
/// `k = -M..=N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshConfig {
    pub h: f64,
    pub m: usize,
    pub n: usize,
}

impl MeshConfig {
    pub fn new(h: f64, m: usize, n: usize) -> Result<Self> {
        check_positive("mesh size h", h)?;
        Ok(Self { h, m, n })
    }

    /// Matrix dimension `M + N + 1`.
    pub fn size(&self) -> usize {
        self.m + self.n + 1
    }

    /// Collocation points `k h`, `k = -M..=N`, paired with their index `k`.
    pub fn points(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        (-(self.m as i64)..=self.n as i64).map(move |k| (k, k as f64 * self.h))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Which side's decay governs the truncation, following the four-case
/// balancing rule; `None` for a symmetric profile.
fn governing_side(beta_l: f64, beta_r: f64, gamma_l: f64, gamma_r: f64) -> Option<Side> {
    if gamma_l > gamma_r {
        Some(Side::Left)
    } else if gamma_r > gamma_l {
        Some(Side::Right)
    } else if beta_l > beta_r {
        Some(Side::Left)
    } else if beta_r > beta_l {
        Some(Side::Right)
    } else {
        None
    }
}

fn de_step(beta: f64, gamma: f64, d: f64, n: usize) -> Result<(f64, f64)> {
    let gn = gamma * n as f64;
    let w = lambert_w0(PI * d * gn / beta)?;
    Ok((w / gn, w))
}

fn de_constants(profile: &DecayProfile) -> Result<(f64, f64, f64, f64, f64)> {
    profile.validate()?;
    match *profile {
        DecayProfile::De {
            beta_l,
            beta_r,
            gamma_l,
            gamma_r,
            d,
        } => Ok((beta_l, beta_r, gamma_l, gamma_r, d)),
        DecayProfile::Se { .. } => Err(Error::domain("a DE mesh needs a DE decay profile")),
    }
}

/// Balanced DE mesh: `h = W(pi d gamma n / beta) / (gamma n)` with the
/// governing index `n` on the side selected by the decay constants and the
/// opposite index chosen so both truncation errors match.
pub fn de_mesh(profile: &DecayProfile, n: usize) -> Result<MeshConfig> {
    if n == 0 {
        return Err(Error::domain("governing index n must be at least 1"));
    }
    let (beta_l, beta_r, gamma_l, gamma_r, d) = de_constants(profile)?;
    let gamma = gamma_l.max(gamma_r);
    let nf = n as f64;
    match governing_side(beta_l, beta_r, gamma_l, gamma_r) {
        None => {
            let (h, _) = de_step(beta_l, gamma, d, n)?;
            MeshConfig::new(h, n, n)
        }
        Some(Side::Left) => {
            let (h, w) = de_step(beta_l, gamma, d, n)?;
            let right = gamma_l / gamma_r * nf * (1.0 + (beta_l / beta_r).ln() / w);
            MeshConfig::new(h, n, right.ceil().max(0.0) as usize)
        }
        Some(Side::Right) => {
            let (h, w) = de_step(beta_r, gamma, d, n)?;
            let left = gamma_r / gamma_l * nf * (1.0 + (beta_r / beta_l).ln() / w);
            MeshConfig::new(h, left.floor().max(0.0) as usize, n)
        }
    }
}

/// Symmetric DE mesh: the step of [`de_mesh`] for the governing side, with
/// `M = N = n`.
pub fn de_mesh_symmetric(profile: &DecayProfile, n: usize) -> Result<MeshConfig> {
    let balanced = de_mesh(profile, n)?;
    MeshConfig::new(balanced.h, n, n)
}

/// SE mesh `h = (pi d / (alpha N)^rho)^(1/(rho+1))` with `M = N`.
pub fn se_mesh(profile: &DecayProfile, n: usize) -> Result<MeshConfig> {
    if n == 0 {
        return Err(Error::domain("truncation index N must be at least 1"));
    }
    profile.validate()?;
    let DecayProfile::Se {
        alpha,
        rho_decay,
        d,
    } = *profile
    else {
        return Err(Error::domain("an SE mesh needs an SE decay profile"));
    };
    let h = (PI * d / (alpha * n as f64).powf(rho_decay)).powf(1.0 / (rho_decay + 1.0));
    MeshConfig::new(h, n, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bessel7() -> DecayProfile {
        DecayProfile::de(7.0, 0.5, 1.0, 1.0, PI / 2.0).unwrap()
    }

    fn laguerre3() -> DecayProfile {
        DecayProfile::de(1.5, 1.0 / 32.0, 1.0, 2.0, PI / 4.0).unwrap()
    }

    #[test]
    fn symmetric_profile_gives_equal_indices() {
        let p = DecayProfile::de(0.3, 0.3, 1.5, 1.5, 0.5).unwrap();
        for n in [1, 2, 9, 40] {
            let mesh = de_mesh(&p, n).unwrap();
            assert_eq!((mesh.m, mesh.n), (n, n));
        }
    }

    #[test]
    fn bessel_profile_example() {
        let mesh = de_mesh(&bessel7(), 20).unwrap();
        let w = lambert_w0(10.0 * PI * PI / 7.0).unwrap();
        assert_eq!(mesh.m, 20);
        assert!((mesh.h - w / 20.0).abs() < 1e-16);
        let expected_n = (20.0 * (1.0 + 14f64.ln() / w)).ceil() as usize;
        assert_eq!(mesh.n, expected_n);
        assert_eq!(mesh.size(), 20 + expected_n + 1);
    }

    #[test]
    fn laguerre_profile_example() {
        let mesh = de_mesh(&laguerre3(), 30).unwrap();
        let w = lambert_w0(480.0 * PI * PI).unwrap();
        assert_eq!(mesh.n, 30);
        assert!((mesh.h - w / 60.0).abs() < 1e-16);
        let expected_m = (60.0 * (1.0 - 48f64.ln() / w)).floor().max(0.0) as usize;
        assert_eq!(mesh.m, expected_m);
    }

    #[test]
    fn dependent_index_is_clamped_at_zero() {
        // right side governs with a tiny right beta; the left formula goes negative
        let p = DecayProfile::de(1e6, 1e-6, 0.5, 1.0, 0.5).unwrap();
        let mesh = de_mesh(&p, 3).unwrap();
        assert_eq!(mesh.n, 3);
        assert_eq!(mesh.m, 0);
        let mirrored = de_mesh(&p.mirrored(), 3).unwrap();
        assert_eq!((mirrored.m, mirrored.n), (3, 0));
    }

    #[test]
    fn step_equates_truncation_and_discretization() {
        for profile in [bessel7(), laguerre3()] {
            let DecayProfile::De {
                beta_l,
                beta_r,
                gamma_l,
                gamma_r,
                d,
            } = profile
            else {
                unreachable!()
            };
            let gamma = gamma_l.max(gamma_r);
            let beta = match governing_side(beta_l, beta_r, gamma_l, gamma_r) {
                Some(Side::Right) => beta_r,
                _ => beta_l,
            };
            let mut prev = f64::INFINITY;
            for n in 1..=60 {
                let h = de_mesh(&profile, n).unwrap().h;
                let lhs = beta * (gamma * n as f64 * h).exp() * h;
                assert!((lhs - PI * d).abs() <= 1e-10 * PI * d, "n = {n}");
                assert!(h < prev);
                prev = h;
            }
        }
    }

    #[test]
    fn mirrored_profile_swaps_sides() {
        for profile in [bessel7(), laguerre3()] {
            for n in 1..=40 {
                let a = de_mesh(&profile, n).unwrap();
                let b = de_mesh(&profile.mirrored(), n).unwrap();
                assert_eq!(a.h, b.h);
                // the governing index swaps exactly; the dependent index is
                // rounded up on the right and down on the left
                if a.m == n {
                    assert_eq!(b.n, n);
                    assert!(a.n - b.m <= 1);
                } else {
                    assert_eq!(a.n, n);
                    assert_eq!(b.m, n);
                    assert!(b.n - a.m <= 1);
                }
            }
        }
    }

    #[test]
    fn symmetric_variant_keeps_governing_step() {
        let p = bessel7();
        let sym = de_mesh_symmetric(&p, 12).unwrap();
        let bal = de_mesh(&p, 12).unwrap();
        assert_eq!(sym.h, bal.h);
        assert_eq!((sym.m, sym.n), (12, 12));
        let lag = de_mesh_symmetric(&laguerre3(), 10).unwrap();
        let w = lambert_w0(160.0 * PI * PI).unwrap();
        assert!((lag.h - w / 20.0).abs() < 1e-16);
    }

    #[test]
    fn se_examples() {
        let d = 0.7;
        let unit = DecayProfile::se(PI * d, 1.0, d).unwrap();
        assert!((se_mesh(&unit, 1).unwrap().h - 1.0).abs() < 1e-15);
        let generic = DecayProfile::se(2.5, 1.0, d).unwrap();
        let mesh = se_mesh(&generic, 17).unwrap();
        assert!((mesh.h - (PI * d / (2.5 * 17.0)).sqrt()).abs() < 1e-15);
        assert_eq!((mesh.m, mesh.n), (17, 17));
        let singular = DecayProfile::se(0.5, 2.0, 0.1f64.sqrt()).unwrap();
        let h = se_mesh(&singular, 10).unwrap().h;
        assert!((h - 0.3412478742390088).abs() < 1e-15);
    }

    #[test]
    fn degenerate_profiles_are_rejected() {
        assert!(DecayProfile::de(0.0, 1.0, 1.0, 1.0, 0.5).is_err());
        assert!(DecayProfile::de(1.0, 1.0, -1.0, 1.0, 0.5).is_err());
        assert!(DecayProfile::de(1.0, 1.0, 1.0, 2.0, 1.0).is_err());
        assert!(DecayProfile::se(1.0, 0.0, 0.5).is_err());
        assert!(DecayProfile::se(f64::NAN, 1.0, 0.5).is_err());
        assert!(de_mesh(&bessel7(), 0).is_err());
        let se = DecayProfile::se(1.0, 1.0, 1.0).unwrap();
        assert!(de_mesh(&se, 4).is_err());
        assert!(se_mesh(&bessel7(), 4).is_err());
    }
}
