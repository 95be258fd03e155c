//! Log-split kernel factors for the single- and double-layer operators.
//!
//! Both parameterized kernels are split as
//! `kernel(s,t) = a(s,t) ln(4 sin²((s−t)/2)) + b(s,t)` with smooth,
//! 2π-biperiodic factors `a`, `b`; the split isolates the logarithmic
//! singularity so that `a` and `b` can be interpolated trigonometrically.
//! The factor 2 relating the kernels to the layer operators is baked into
//! the factors, so assembled matrices represent `S(κ)` and `D(κ)` directly.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::geometry::{Curve, CurveFrame};
use crate::specfun::{self, EULER_GAMMA};
use crate::{Error, Result};

/// Which layer operator the split belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFlavor {
    SingleLayer,
    DoubleLayer,
}

/// Kernel split for one curve at a fixed complex wavenumber.
#[derive(Debug, Clone)]
pub struct KernelSplit<'a> {
    pub kappa: Complex64,
    pub curve: &'a Curve,
    pub flavor: KernelFlavor,
}

/// `ln(4 sin²((s−t)/2))`, the periodic logarithmic weight.
pub fn log_weight(s: f64, t: f64) -> f64 {
    let half = ((s - t) / 2.0).sin();
    (4.0 * half * half).ln()
}

fn coincident(s: f64, t: f64) -> bool {
    ((s - t) / 2.0).sin() == 0.0
}

/// Off-diagonal `a` factor from precomputed chord data.
///
/// Single layer: `−(1/2π) J₀(κρ) |z'(t)|`.
/// Double layer: `−(κ/2π) (dot/ρ) J₁(κρ) |z'(t)|`.
pub fn a_off_diagonal(
    flavor: KernelFlavor,
    kappa: Complex64,
    rho: f64,
    dot: f64,
    speed_t: f64,
) -> Result<Complex64> {
    let w = kappa * rho;
    Ok(match flavor {
        KernelFlavor::SingleLayer => -speed_t / (2.0 * PI) * specfun::bessel_j(0, w)?,
        KernelFlavor::DoubleLayer => {
            -kappa / (2.0 * PI) * (dot / rho) * specfun::bessel_j(1, w)? * speed_t
        }
    })
}

/// Off-diagonal `b` factor; `logw` is `ln(4 sin²((s−t)/2))`.
///
/// Single layer: `(i/2) H₀⁽¹⁾(κρ) |z'(t)| − a_S·logw`.
/// Double layer: `(iκ/2) (dot/ρ) H₁⁽¹⁾(κρ) |z'(t)| − a_D·logw`.
pub fn b_off_diagonal(
    flavor: KernelFlavor,
    kappa: Complex64,
    rho: f64,
    dot: f64,
    speed_t: f64,
    logw: f64,
) -> Result<Complex64> {
    let w = kappa * rho;
    let a = a_off_diagonal(flavor, kappa, rho, dot, speed_t)?;
    Ok(match flavor {
        KernelFlavor::SingleLayer => {
            Complex64::I / 2.0 * specfun::hankel1(0, w)? * speed_t - a * logw
        }
        KernelFlavor::DoubleLayer => {
            Complex64::I * kappa / 2.0 * (dot / rho) * specfun::hankel1(1, w)? * speed_t - a * logw
        }
    })
}

/// Diagonal limit of `a` from the frame at `t`.
pub fn a_diagonal(flavor: KernelFlavor, frame: &CurveFrame) -> Complex64 {
    match flavor {
        KernelFlavor::SingleLayer => Complex64::from(-frame.speed / (2.0 * PI)),
        KernelFlavor::DoubleLayer => Complex64::ZERO,
    }
}

/// Diagonal limit of `b` from the frame at `t`.
///
/// Single layer: `(i/2 − C_E/π − (1/2π) ln(κ²|z'|²/4)) |z'|` with the
/// principal logarithm of the complex product.
/// Double layer: `(1/2π) z''·ν / |z'|`.
pub fn b_diagonal(flavor: KernelFlavor, kappa: Complex64, frame: &CurveFrame) -> Complex64 {
    match flavor {
        KernelFlavor::SingleLayer => {
            let arg = kappa * kappa * (frame.speed * frame.speed / 4.0);
            (Complex64::I / 2.0 - Complex64::from(EULER_GAMMA / PI) - arg.ln() / (2.0 * PI))
                * frame.speed
        }
        KernelFlavor::DoubleLayer => {
            Complex64::from(frame.ddz.dot(&frame.normal) / frame.speed / (2.0 * PI))
        }
    }
}

impl<'a> KernelSplit<'a> {
    pub fn new(curve: &'a Curve, kappa: Complex64, flavor: KernelFlavor) -> Result<Self> {
        if kappa == Complex64::ZERO {
            return Err(Error::Config(
                "kernel split requires kappa != 0 (the diagonal of b_S contains ln kappa)".into(),
            ));
        }
        curve.validate()?;
        Ok(KernelSplit {
            kappa,
            curve,
            flavor,
        })
    }

    /// Smooth factor `a(s,t)`; the coincident case uses the analytic limit.
    pub fn eval_a(&self, s: f64, t: f64) -> Result<Complex64> {
        let ft = self.curve.frame(t)?;
        if coincident(s, t) {
            return Ok(a_diagonal(self.flavor, &ft));
        }
        let fs = self.curve.frame(s)?;
        let d = fs.z - ft.z;
        a_off_diagonal(self.flavor, self.kappa, d.norm(), d.dot(&ft.normal), ft.speed)
    }

    /// Smooth factor `b(s,t)`; the coincident case uses the analytic limit.
    pub fn eval_b(&self, s: f64, t: f64) -> Result<Complex64> {
        let ft = self.curve.frame(t)?;
        if coincident(s, t) {
            return Ok(b_diagonal(self.flavor, self.kappa, &ft));
        }
        let fs = self.curve.frame(s)?;
        let d = fs.z - ft.z;
        b_off_diagonal(
            self.flavor,
            self.kappa,
            d.norm(),
            d.dot(&ft.normal),
            ft.speed,
            log_weight(s, t),
        )
    }

    /// Recombines the split: `a(s,t)·ln(4sin²((s−t)/2)) + b(s,t)`, which
    /// must equal twice the layer-operator kernel. Off-diagonal only.
    pub fn reconstruct_kernel(&self, s: f64, t: f64) -> Result<Complex64> {
        if coincident(s, t) {
            return Err(Error::Singularity(
                "reconstruct_kernel is undefined at coincident arguments".into(),
            ));
        }
        Ok(self.eval_a(s, t)? * log_weight(s, t) + self.eval_b(s, t)?)
    }

    /// `|b(t+h, t) − b(t, t)|`; tends to zero with `h` since `b` is
    /// continuous on the diagonal for smooth curves.
    pub fn diagonal_continuity(&self, t: f64, h: f64) -> Result<f64> {
        if !(1e-6..=1e-2).contains(&h) {
            return Err(Error::Domain(format!(
                "diagonal_continuity step must lie in [1e-6, 1e-2], got {h}"
            )));
        }
        Ok((self.eval_b(t + h, t)? - self.eval_b(t, t)?).norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const DISK: Curve = Curve::Disk { radius: 1.0 };

    #[test]
    fn a_single_diagonal_disk() {
        let ks = KernelSplit::new(&DISK, c(2.0, 0.0), KernelFlavor::SingleLayer).unwrap();
        let v = ks.eval_a(0.3, 0.3).unwrap();
        assert!((v - Complex64::from(-1.0 / (2.0 * PI))).norm() < 1e-15);
    }

    #[test]
    fn a_double_diagonal_zero() {
        for curve in [DISK, Curve::Peanut, Curve::Acorn] {
            let ks = KernelSplit::new(&curve, c(1.5, -0.5), KernelFlavor::DoubleLayer).unwrap();
            assert_eq!(ks.eval_a(1.1, 1.1).unwrap(), Complex64::ZERO);
        }
    }

    #[test]
    fn a_single_antipodal_disk() {
        let ks = KernelSplit::new(&DISK, c(2.0, 0.0), KernelFlavor::SingleLayer).unwrap();
        let v = ks.eval_a(PI, 0.0).unwrap();
        let expect = -specfun::bessel_j(0, c(4.0, 0.0)).unwrap() / (2.0 * PI);
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn b_single_diagonal_disk_kappa_two() {
        // ln(kappa^2/4) = 0 at kappa = 2, |z'| = 1: b_S(t,t) = i/2 - C_E/pi.
        let ks = KernelSplit::new(&DISK, c(2.0, 0.0), KernelFlavor::SingleLayer).unwrap();
        let v = ks.eval_b(0.0, 0.0).unwrap();
        let expect = c(-EULER_GAMMA / PI, 0.5);
        assert!((v - expect).norm() < 1e-15);
        assert!((v.re - (-0.1837)).abs() < 1e-4);
    }

    #[test]
    fn b_double_diagonal_disk() {
        // z'' . nu = -1 and |z'| = 1 on the unit circle.
        for kappa in [c(2.0, 0.0), c(1.0, -3.0)] {
            let ks = KernelSplit::new(&DISK, kappa, KernelFlavor::DoubleLayer).unwrap();
            let v = ks.eval_b(2.0, 2.0).unwrap();
            assert!((v - Complex64::from(-1.0 / (2.0 * PI))).norm() < 1e-15);
        }
    }

    #[test]
    fn b_single_off_diagonal_composition() {
        let ks = KernelSplit::new(&DISK, c(2.0, 0.0), KernelFlavor::SingleLayer).unwrap();
        let s = PI / 2.0;
        let v = ks.eval_b(s, 0.0).unwrap();
        let h = specfun::hankel1(0, c(2.0 * 2.0_f64.sqrt(), 0.0)).unwrap();
        let a = ks.eval_a(s, 0.0).unwrap();
        let expect = Complex64::I / 2.0 * h - a * 2.0_f64.ln();
        assert!((v - expect).norm() <= 1e-14 * expect.norm());
    }

    #[test]
    fn split_identity_single_disk() {
        let ks = KernelSplit::new(&DISK, c(2.0, 0.0), KernelFlavor::SingleLayer).unwrap();
        let v = ks.reconstruct_kernel(PI, 0.0).unwrap();
        let expect = Complex64::I / 2.0 * specfun::hankel1(0, c(4.0, 0.0)).unwrap();
        assert!((v - expect).norm() <= 1e-13 * expect.norm());
    }

    /// Direct evaluation of twice the parameterized kernel, bypassing the
    /// split: `(i/2) H₀ |z'|` or `(iκ/2)(dot/ρ) H₁ |z'|`.
    fn direct_kernel(
        curve: &Curve,
        flavor: KernelFlavor,
        kappa: Complex64,
        s: f64,
        t: f64,
    ) -> Complex64 {
        let (rho, dot) = curve.chord(s, t).unwrap();
        let speed = curve.frame(t).unwrap().speed;
        let w = kappa * rho;
        match flavor {
            KernelFlavor::SingleLayer => {
                Complex64::I / 2.0 * specfun::hankel1(0, w).unwrap() * speed
            }
            KernelFlavor::DoubleLayer => {
                Complex64::I * kappa / 2.0 * (dot / rho)
                    * specfun::hankel1(1, w).unwrap()
                    * speed
            }
        }
    }

    #[test]
    fn split_identity_random_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let cases = [
            (Curve::Peanut, KernelFlavor::DoubleLayer, c(1.5, -0.5)),
            (Curve::Acorn, KernelFlavor::SingleLayer, c(3.0, -2.0)),
            (DISK, KernelFlavor::DoubleLayer, c(0.7, -3.1)),
        ];
        for (curve, flavor, kappa) in cases {
            let ks = KernelSplit::new(&curve, kappa, flavor).unwrap();
            for _ in 0..50 {
                let s: f64 = rng.random_range(0.0..2.0 * PI);
                let mut t: f64 = rng.random_range(0.0..2.0 * PI);
                if (s - t).abs() < 1e-3 {
                    t += 0.5;
                }
                let v = ks.reconstruct_kernel(s, t).unwrap();
                let expect = direct_kernel(&curve, flavor, kappa, s, t);
                assert!(
                    (v - expect).norm() <= 1e-12 * expect.norm().max(1e-6),
                    "split identity failed for {flavor:?} at ({s}, {t})"
                );
            }
        }
    }

    #[test]
    fn biperiodicity_bit_identical() {
        let ks = KernelSplit::new(&Curve::Peanut, c(2.0, -1.0), KernelFlavor::SingleLayer).unwrap();
        // Shift both arguments by the same floating value.
        let two_pi = 2.0 * PI;
        let (s, t) = (0.5, 1.25);
        let v0 = ks.eval_a(s, t).unwrap();
        let v1 = ks.eval_a(s + two_pi, t + two_pi).unwrap();
        assert!((v0 - v1).norm() < 1e-13 * v0.norm().max(1.0));
    }

    #[test]
    fn disk_translation_invariance() {
        let ks = KernelSplit::new(&DISK, c(1.3, -1.7), KernelFlavor::SingleLayer).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let s: f64 = rng.random_range(0.0..2.0 * PI);
            let t: f64 = rng.random_range(0.0..2.0 * PI);
            let shift: f64 = rng.random_range(0.0..2.0 * PI);
            let v0 = ks.eval_b(s, t).unwrap();
            let v1 = ks.eval_b(s + shift, t + shift).unwrap();
            assert!((v0 - v1).norm() <= 1e-13 * v0.norm().max(1.0));
        }
    }

    #[test]
    fn diagonal_continuity_shrinks() {
        let ks_s = KernelSplit::new(&DISK, c(2.0, 0.0), KernelFlavor::SingleLayer).unwrap();
        assert!(ks_s.diagonal_continuity(0.0, 1e-3).unwrap() <= 1e-2);
        let ks_d = KernelSplit::new(&DISK, c(2.0, 0.0), KernelFlavor::DoubleLayer).unwrap();
        assert!(ks_d.diagonal_continuity(1.0, 1e-4).unwrap() <= 1e-3);
        for ks in [&ks_s, &ks_d] {
            let d2 = ks.diagonal_continuity(0.4, 1e-2).unwrap();
            let d3 = ks.diagonal_continuity(0.4, 1e-3).unwrap();
            let d4 = ks.diagonal_continuity(0.4, 1e-4).unwrap();
            assert!(d2 > d3 && d3 > d4, "deviations not decreasing: {d2} {d3} {d4}");
        }
    }

    #[test]
    fn zero_kappa_rejected() {
        assert!(KernelSplit::new(&DISK, Complex64::ZERO, KernelFlavor::SingleLayer).is_err());
    }

    #[test]
    fn reconstruct_rejects_coincidence() {
        let ks = KernelSplit::new(&DISK, c(2.0, 0.0), KernelFlavor::SingleLayer).unwrap();
        assert!(ks.reconstruct_kernel(1.0, 1.0).is_err());
    }
}
