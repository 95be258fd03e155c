//! Independent ground truth for the unit disk: its scattering poles are the
//! zeros of the integer-order Hankel functions `H_ν⁽¹⁾`, ν ≥ 2, in the lower
//! half plane. A Newton sweep from coarse-grid seeds finds the zeros; an
//! argument-principle count certifies that none were missed.

use num_complex::Complex64;

use crate::nepsolve::{Contour, SearchRegion};
use crate::specfun::{hankel1_int, hankel1_int_derivative};
use crate::{Error, Result};

/// A zero of `H_ν⁽¹⁾` with its certification residual.
#[derive(Debug, Clone)]
pub struct HankelZero {
    pub nu: u32,
    pub kappa: Complex64,
    /// `|H_ν⁽¹⁾(kappa)|` after Newton convergence.
    pub newton_residual: f64,
}

/// Result of the Newton sweep: accepted zeros plus the number of seeds whose
/// iteration failed to converge.
#[derive(Debug, Clone)]
pub struct ZeroSweep {
    pub zeros: Vec<HankelZero>,
    pub dropped: usize,
}

const NEWTON_MAX_STEPS: usize = 60;
const NEWTON_STEP_TOL: f64 = 1e-13;
const RESIDUAL_TOL: f64 = 1e-12;
const DEDUP_DIST: f64 = 1e-6;

fn newton_zero(nu: u32, seed: Complex64) -> Option<Complex64> {
    let mut kappa = seed;
    for _ in 0..NEWTON_MAX_STEPS {
        let h = hankel1_int(nu, kappa).ok()?;
        let dh = hankel1_int_derivative(nu, kappa).ok()?;
        if dh.norm() == 0.0 {
            return None;
        }
        let step = h / dh;
        kappa -= step;
        if step.norm() < NEWTON_STEP_TOL {
            return Some(kappa);
        }
    }
    None
}

/// All zeros of `H_ν⁽¹⁾` for `ν ∈ {2, …, nu_max}` inside the region.
///
/// Seeds are the local minima of `|H_ν⁽¹⁾|` on a coarse grid over the region;
/// each seed is polished by Newton iteration with the analytic derivative.
/// Converged zeros are deduplicated (pairwise distance > 1e-6) and kept only
/// if they lie strictly inside the region with residual ≤ 1e-12;
/// non-convergent seeds are counted in `dropped`.
pub fn hankel_zeros_in_region(nu_max: u32, region: &SearchRegion) -> Result<ZeroSweep> {
    if nu_max < 2 {
        return Err(Error::Config(format!("nu_max must be at least 2, got {nu_max}")));
    }
    if !(region.re_min < region.re_max) || !(region.im_min < region.im_max) {
        return Err(Error::Config("degenerate region for the zero sweep".into()));
    }
    // Seeding grid, independent of the region's scan resolution.
    let grid = 60usize;
    let dre = (region.re_max - region.re_min) / grid as f64;
    let dim = (region.im_max - region.im_min) / grid as f64;
    let mut zeros: Vec<HankelZero> = Vec::new();
    let mut dropped = 0usize;
    for nu in 2..=nu_max {
        let mut absh = vec![f64::INFINITY; grid * grid];
        for iy in 0..grid {
            for ix in 0..grid {
                let kappa = Complex64::new(
                    region.re_min + (ix as f64 + 0.5) * dre,
                    region.im_min + (iy as f64 + 0.5) * dim,
                );
                if kappa.norm() < 1e-6 {
                    continue;
                }
                if let Ok(h) = hankel1_int(nu, kappa) {
                    absh[iy * grid + ix] = h.norm();
                }
            }
        }
        for iy in 0..grid as isize {
            for ix in 0..grid as isize {
                let v = absh[iy as usize * grid + ix as usize];
                if !v.is_finite() {
                    continue;
                }
                let mut is_min = true;
                for dy in -1..=1isize {
                    for dx in -1..=1isize {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (px, py) = (ix + dx, iy + dy);
                        if px < 0 || py < 0 || px >= grid as isize || py >= grid as isize {
                            continue;
                        }
                        if absh[py as usize * grid + px as usize] < v {
                            is_min = false;
                        }
                    }
                }
                if !is_min {
                    continue;
                }
                let seed = Complex64::new(
                    region.re_min + (ix as f64 + 0.5) * dre,
                    region.im_min + (iy as f64 + 0.5) * dim,
                );
                match newton_zero(nu, seed) {
                    Some(kappa) => {
                        if !region.contains(kappa) {
                            continue;
                        }
                        let residual = match hankel1_int(nu, kappa) {
                            Ok(h) => h.norm(),
                            Err(_) => {
                                dropped += 1;
                                continue;
                            }
                        };
                        if residual > RESIDUAL_TOL {
                            dropped += 1;
                            continue;
                        }
                        if zeros.iter().any(|z| (z.kappa - kappa).norm() <= DEDUP_DIST) {
                            continue;
                        }
                        zeros.push(HankelZero { nu, kappa, newton_residual: residual });
                    }
                    None => dropped += 1,
                }
            }
        }
    }
    zeros.sort_by(|a, b| {
        (a.kappa.re, a.kappa.im)
            .partial_cmp(&(b.kappa.re, b.kappa.im))
            .expect("finite")
    });
    Ok(ZeroSweep { zeros, dropped })
}

/// Number of zeros of `H_ν⁽¹⁾` enclosed by the contour, via the argument
/// principle `(1/2πi)∮ H'/H dκ`.
///
/// Trapezoid quadrature with node doubling until the value settles within
/// 1e-3 of an integer; fails if the contour passes within `|H| < 1e-6` of a
/// zero or if 2¹⁴ nodes do not suffice.
pub fn argument_principle_count(nu: u32, contour: &Contour) -> Result<i64> {
    let mut nodes = 64usize;
    loop {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut min_abs = f64::INFINITY;
        for j in 0..nodes {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
            let dir = Complex64::new(theta.cos(), theta.sin());
            let kappa = contour.center + contour.radius * dir;
            let h = hankel1_int(nu, kappa)?;
            let dh = hankel1_int_derivative(nu, kappa)?;
            min_abs = min_abs.min(h.norm());
            sum += dir * dh / h;
        }
        if min_abs < 1e-6 {
            return Err(Error::Numerical(format!(
                "contour at {} r={} passes within {min_abs:.2e} of a zero of H_{nu}",
                contour.center, contour.radius
            )));
        }
        let value = sum * Complex64::from(contour.radius / nodes as f64);
        let count = value.re.round();
        if (value.re - count).abs() <= 1e-3 && value.im.abs() <= 1e-3 {
            return Ok(count as i64);
        }
        if nodes >= 1 << 14 {
            return Err(Error::Numerical(format!(
                "argument-principle quadrature failed to settle on an integer (last value {value})"
            )));
        }
        nodes *= 2;
    }
}
