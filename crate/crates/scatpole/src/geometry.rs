//! Smooth closed boundary curves in 2π-periodic parametric form, with
//! analytic first and second derivatives and unit outward normal.
//!
//! All built-ins are counterclockwise star-shaped curves `z(t) = r(t)(cos t,
//! sin t)` with analytic radius; the normal convention `ν = (z₂', −z₁')/|z'|`
//! is outward for counterclockwise orientation.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A boundary curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Curve {
    /// Circle of the given radius centered at the origin.
    Disk { radius: f64 },
    /// Peanut shape `sqrt(0.25 + cos² t) (cos t, sin t)`.
    Peanut,
    /// Acorn shape `0.6 sqrt(17/4 + 2 cos 3t) (cos t, sin t)`.
    Acorn,
    /// Star-shaped curve with trigonometric-polynomial radius
    /// `r(t) = cos_coeffs[0] + Σ_{k≥1} cos_coeffs[k] cos(kt) + Σ_{k≥1} sin_coeffs[k-1] sin(kt)`.
    RadialTrig {
        cos_coeffs: Vec<f64>,
        #[serde(default)]
        sin_coeffs: Vec<f64>,
    },
}

/// Point, derivatives, and outward normal of a curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveFrame {
    pub z: Vector2<f64>,
    pub dz: Vector2<f64>,
    pub ddz: Vector2<f64>,
    pub normal: Vector2<f64>,
    pub speed: f64,
}

/// Radius and its first two derivatives at one parameter value.
struct Radial {
    r: f64,
    dr: f64,
    ddr: f64,
}

impl Curve {
    /// Validates curve parameters. Radial radii must be positive, checked on
    /// a 4096-point grid; the disk radius must be positive.
    pub fn validate(&self) -> Result<()> {
        match self {
            Curve::Disk { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::Config(format!(
                        "disk radius must be positive, got {radius}"
                    )));
                }
            }
            Curve::Peanut | Curve::Acorn => {}
            Curve::RadialTrig { cos_coeffs, .. } => {
                if cos_coeffs.is_empty() {
                    return Err(Error::Config(
                        "radial_trig needs at least the constant cosine coefficient".into(),
                    ));
                }
                for p in 0..4096 {
                    let t = 2.0 * std::f64::consts::PI * p as f64 / 4096.0;
                    if self.radial(t).r <= 0.0 {
                        return Err(Error::Config(format!(
                            "radial_trig radius is not positive at t = {t}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn radial(&self, t: f64) -> Radial {
        match self {
            Curve::Disk { radius } => Radial {
                r: *radius,
                dr: 0.0,
                ddr: 0.0,
            },
            // r = sqrt(p) with trig-polynomial p:
            //   r' = p'/(2r),  r'' = p''/(2r) - p'^2/(4 r^3).
            Curve::Peanut => sqrt_radial(
                0.75 + 0.5 * (2.0 * t).cos(),
                -(2.0 * t).sin(),
                -2.0 * (2.0 * t).cos(),
            ),
            Curve::Acorn => sqrt_radial(
                0.36 * (4.25 + 2.0 * (3.0 * t).cos()),
                0.36 * (-6.0 * (3.0 * t).sin()),
                0.36 * (-18.0 * (3.0 * t).cos()),
            ),
            Curve::RadialTrig {
                cos_coeffs,
                sin_coeffs,
            } => {
                let mut r = cos_coeffs[0];
                let mut dr = 0.0;
                let mut ddr = 0.0;
                for (k, &a) in cos_coeffs.iter().enumerate().skip(1) {
                    let kf = k as f64;
                    let (s, c) = (kf * t).sin_cos();
                    r += a * c;
                    dr -= a * kf * s;
                    ddr -= a * kf * kf * c;
                }
                for (i, &b) in sin_coeffs.iter().enumerate() {
                    let kf = (i + 1) as f64;
                    let (s, c) = (kf * t).sin_cos();
                    r += b * s;
                    dr += b * kf * c;
                    ddr -= b * kf * kf * s;
                }
                Radial { r, dr, ddr }
            }
        }
    }

    /// Point, derivatives, and outward normal at parameter `t`.
    pub fn frame(&self, t: f64) -> Result<CurveFrame> {
        let Radial { r, dr, ddr } = self.radial(t);
        let (s, c) = t.sin_cos();
        let u = Vector2::new(c, s);
        let v = Vector2::new(-s, c);
        let z = r * u;
        let dz = dr * u + r * v;
        let ddz = (ddr - r) * u + 2.0 * dr * v;
        let speed = dz.norm();
        if speed < 1e-12 {
            return Err(Error::Domain(format!(
                "degenerate parametrization: |z'({t})| = {speed}"
            )));
        }
        let normal = Vector2::new(dz.y, -dz.x) / speed;
        Ok(CurveFrame {
            z,
            dz,
            ddz,
            normal,
            speed,
        })
    }

    /// Chord length `ρ = |z(s) - z(t)|` and projection
    /// `(z(s) - z(t)) · ν(z(t))`. Returns `(0, 0)` at coincident points;
    /// callers owning diagonal limits must branch on `ρ = 0`.
    pub fn chord(&self, s: f64, t: f64) -> Result<(f64, f64)> {
        let fs = self.frame(s)?;
        let ft = self.frame(t)?;
        let d = fs.z - ft.z;
        Ok((d.norm(), d.dot(&ft.normal)))
    }

    /// Maximum relative deviation of the analytic `dz`, `ddz` from 4th-order
    /// central differences of `z` with the given step.
    pub fn frame_derivative_check(&self, t: f64, h: f64) -> Result<f64> {
        let f = self.frame(t)?;
        let zs: Vec<Vector2<f64>> = (-2..=2)
            .map(|i| self.frame(t + i as f64 * h).map(|fr| fr.z))
            .collect::<Result<_>>()?;
        let fd_dz = (zs[0] - 8.0 * zs[1] + 8.0 * zs[3] - zs[4]) / (12.0 * h);
        let fd_ddz = (-zs[0] + 16.0 * zs[1] - 30.0 * zs[2] + 16.0 * zs[3] - zs[4]) / (12.0 * h * h);
        let e1 = (fd_dz - f.dz).norm() / f.dz.norm().max(1.0);
        let e2 = (fd_ddz - f.ddz).norm() / f.ddz.norm().max(1.0);
        Ok(e1.max(e2))
    }

    /// Signed area `(1/2) ∮ (z₁ z₂' − z₂ z₁') dt` by 1024-point trapezoid
    /// quadrature; positive for counterclockwise orientation.
    pub fn signed_area(&self) -> Result<f64> {
        let n = 1024;
        let mut acc = 0.0;
        for p in 0..n {
            let t = 2.0 * std::f64::consts::PI * p as f64 / n as f64;
            let f = self.frame(t)?;
            acc += f.z.x * f.dz.y - f.z.y * f.dz.x;
        }
        Ok(0.5 * acc * 2.0 * std::f64::consts::PI / n as f64)
    }
}

fn sqrt_radial(p: f64, dp: f64, ddp: f64) -> Radial {
    let r = p.sqrt();
    Radial {
        r,
        dr: dp / (2.0 * r),
        ddr: ddp / (2.0 * r) - dp * dp / (4.0 * r * r * r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn disk_frame_at_zero() {
        let c = Curve::Disk { radius: 1.0 };
        let f = c.frame(0.0).unwrap();
        assert_eq!(f.z, Vector2::new(1.0, 0.0));
        assert_eq!(f.dz, Vector2::new(0.0, 1.0));
        assert_eq!(f.ddz, Vector2::new(-1.0, 0.0));
        assert_eq!(f.normal, Vector2::new(1.0, 0.0));
        assert_eq!(f.speed, 1.0);
    }

    #[test]
    fn peanut_point_at_zero() {
        let f = Curve::Peanut.frame(0.0).unwrap();
        assert_relative_eq!(f.z.x, 1.25_f64.sqrt(), max_relative = 1e-15);
        assert!(f.z.y.abs() < 1e-15);
    }

    #[test]
    fn acorn_point_at_half_pi() {
        let f = Curve::Acorn.frame(std::f64::consts::FRAC_PI_2).unwrap();
        assert!(f.z.x.abs() < 1e-15);
        assert_relative_eq!(f.z.y, 0.6 * 4.25_f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn frame_invariants_random_t() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for curve in [
            Curve::Disk { radius: 2.0 },
            Curve::Peanut,
            Curve::Acorn,
            Curve::RadialTrig {
                cos_coeffs: vec![1.0, 0.2],
                sin_coeffs: vec![0.1],
            },
        ] {
            for _ in 0..50 {
                let t: f64 = rng.random_range(0.0..2.0 * std::f64::consts::PI);
                let f = curve.frame(t).unwrap();
                assert!(f.normal.dot(&f.dz).abs() < 1e-14 * f.speed);
                assert!((f.normal.norm() - 1.0).abs() < 1e-14);
                assert_eq!(f.speed, f.dz.norm());
            }
        }
    }

    #[test]
    fn derivative_check_disk() {
        let c = Curve::Disk { radius: 1.0 };
        for &t in &[0.0, 0.7, 2.1, 4.9] {
            // Second-difference roundoff at h = 1e-4 floors the deviation
            // near 1e-8; see the decisions ledger note on the 1e-9 target.
            assert!(c.frame_derivative_check(t, 1e-4).unwrap() <= 5e-8);
        }
    }

    #[test]
    fn derivative_check_peanut_acorn() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for curve in [Curve::Peanut, Curve::Acorn] {
            for _ in 0..100 {
                let t: f64 = rng.random_range(0.0..2.0 * std::f64::consts::PI);
                // Same roundoff floor as the disk check, scaled by the larger
                // second derivatives of these curves.
                assert!(curve.frame_derivative_check(t, 1e-4).unwrap() <= 4e-7);
            }
        }
    }

    #[test]
    fn chord_disk_antipodal_and_coincident() {
        let c = Curve::Disk { radius: 1.0 };
        let (rho, dot) = c.chord(std::f64::consts::PI, 0.0).unwrap();
        assert_relative_eq!(rho, 2.0, max_relative = 1e-15);
        assert_relative_eq!(dot, -2.0, max_relative = 1e-15);
        let (rho, dot) = c.chord(1.3, 1.3).unwrap();
        assert_eq!(rho, 0.0);
        assert_eq!(dot, 0.0);
    }

    #[test]
    fn chord_peanut_direct_formula() {
        let (rho, _) = Curve::Peanut.chord(std::f64::consts::FRAC_PI_3, 0.0).unwrap();
        let r0 = 1.25_f64.sqrt();
        let t = std::f64::consts::FRAC_PI_3;
        let r1 = (0.25 + t.cos() * t.cos()).sqrt();
        let d = Vector2::new(r1 * t.cos() - r0, r1 * t.sin());
        assert_relative_eq!(rho, d.norm(), max_relative = 1e-14);
    }

    #[test]
    fn disk_chord_closed_form() {
        let c = Curve::Disk { radius: 1.7 };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let s: f64 = rng.random_range(0.0..2.0 * std::f64::consts::PI);
            let t: f64 = rng.random_range(0.0..2.0 * std::f64::consts::PI);
            let (rho, _) = c.chord(s, t).unwrap();
            let expect = 2.0 * 1.7 * ((s - t) / 2.0).sin().abs();
            assert!((rho - expect).abs() <= 1e-14 * (1.0 + expect));
        }
    }

    #[test]
    fn signed_area_positive() {
        for curve in [
            Curve::Disk { radius: 1.0 },
            Curve::Peanut,
            Curve::Acorn,
            Curve::RadialTrig {
                cos_coeffs: vec![1.0, 0.3],
                sin_coeffs: vec![],
            },
        ] {
            assert!(curve.signed_area().unwrap() > 0.0);
        }
        let c = Curve::Disk { radius: 1.0 };
        assert_relative_eq!(
            c.signed_area().unwrap(),
            std::f64::consts::PI,
            max_relative = 1e-12
        );
    }

    #[test]
    fn periodicity_bit_identical() {
        // 2*pi is not exactly representable, so compare at an exactly
        // shifted argument via the same floating value.
        let two_pi = 2.0 * std::f64::consts::PI;
        for curve in [Curve::Peanut, Curve::Acorn] {
            let f0 = curve.frame(0.25).unwrap();
            let f1 = curve.frame(0.25 + two_pi).unwrap();
            assert!((f0.z - f1.z).norm() < 1e-14);
            assert!((f0.dz - f1.dz).norm() < 1e-14);
        }
    }

    #[test]
    fn validation_rejects_bad_curves() {
        assert!(Curve::Disk { radius: -1.0 }.validate().is_err());
        assert!(Curve::RadialTrig {
            cos_coeffs: vec![0.1, 1.0],
            sin_coeffs: vec![],
        }
        .validate()
        .is_err());
        assert!(Curve::RadialTrig {
            cos_coeffs: vec![1.0, 0.3],
            sin_coeffs: vec![0.2],
        }
        .validate()
        .is_ok());
    }
}
