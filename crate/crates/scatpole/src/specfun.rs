//! Complex-argument Bessel and Hankel functions of the first kind.
//!
//! Ascending power series only, validated for `|w| <= 50`. The kernel
//! arguments are `κ·|z(s) - z(t)|` with `κ` in the search rectangle, which
//! stays well inside that range for all built-in curves. Integer-order
//! Hankel functions come from the forward recurrence seeded with orders
//! zero and one.

use num_complex::Complex64;

use crate::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest argument magnitude the ascending series are validated for.
pub const MAX_ARG: f64 = 50.0;

/// Truncation control for the ascending series.
#[derive(Debug, Clone, Copy)]
pub struct SpecFunConfig {
    /// Relative truncation tolerance.
    pub series_tol: f64,
    /// Cap on the number of series terms.
    pub max_terms: usize,
}

impl Default for SpecFunConfig {
    fn default() -> Self {
        SpecFunConfig {
            series_tol: 1e-16,
            max_terms: 200,
        }
    }
}

impl SpecFunConfig {
    pub fn new(series_tol: f64, max_terms: usize) -> Result<Self> {
        if !(series_tol > 0.0 && series_tol < 1e-8) {
            return Err(Error::Config(format!(
                "series_tol must be in (0, 1e-8), got {series_tol}"
            )));
        }
        if max_terms < 50 {
            return Err(Error::Config(format!(
                "max_terms must be at least 50, got {max_terms}"
            )));
        }
        Ok(SpecFunConfig {
            series_tol,
            max_terms,
        })
    }
}

fn check_magnitude(w: Complex64) -> Result<()> {
    if w.norm() >= MAX_ARG {
        return Err(Error::Domain(format!(
            "|w| = {} exceeds the validated range |w| < {MAX_ARG}",
            w.norm()
        )));
    }
    Ok(())
}

/// Rejects the origin and arguments within 1e-12 of the branch cut along
/// the negative real axis.
fn check_off_cut(w: Complex64) -> Result<()> {
    if w == Complex64::ZERO {
        return Err(Error::Singularity("Y_nu is singular at w = 0".into()));
    }
    if (w.arg().abs() - std::f64::consts::PI).abs() < 1e-12 {
        return Err(Error::Domain(format!(
            "argument {w} lies within 1e-12 of the branch cut arg(w) = ±π"
        )));
    }
    Ok(())
}

/// Kahan-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: Complex64,
    carry: Complex64,
}

impl Compensated {
    fn add(&mut self, term: Complex64) {
        let y = term - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Bessel function of the first kind `J_ν(w)` for integer `ν ≥ 0`.
///
/// Ascending series `Σ_{k≥0} (-1)^k (w/2)^{ν+2k} / (k! (ν+k)!)`, truncated
/// when a term falls below `series_tol` times the running sum.
pub fn bessel_j_cfg(cfg: &SpecFunConfig, order: u32, w: Complex64) -> Result<Complex64> {
    check_magnitude(w)?;
    let half = w / 2.0;
    // t_0 = (w/2)^nu / nu!
    let mut term = Complex64::ONE;
    for k in 1..=order {
        term *= half / k as f64;
    }
    let mut acc = Compensated::default();
    acc.add(term);
    let q = -half * half;
    for k in 1..=cfg.max_terms {
        term *= q / (k as f64 * (order as u64 + k as u64) as f64);
        acc.add(term);
        if term.norm() <= cfg.series_tol * acc.sum.norm() {
            break;
        }
    }
    Ok(acc.sum)
}

pub fn bessel_j(order: u32, w: Complex64) -> Result<Complex64> {
    bessel_j_cfg(&SpecFunConfig::default(), order, w)
}

/// Bessel function of the second kind `Y_ν(w)` for `ν ∈ {0, 1}`, principal
/// branch of the logarithm.
///
/// Ascending series (DLMF 10.8.1):
/// `Y_ν = (2/π) ln(w/2) J_ν − (1/π) Σ_{k<ν} (ν−k−1)!/k! (w/2)^{2k−ν}`
/// `      − (1/π) Σ_{k≥0} (−1)^k [ψ(k+1)+ψ(ν+k+1)] (w/2)^{ν+2k} / (k!(ν+k)!)`.
pub fn bessel_y_cfg(cfg: &SpecFunConfig, order: u32, w: Complex64) -> Result<Complex64> {
    if order > 1 {
        return Err(Error::Domain(format!(
            "bessel_y supports orders 0 and 1 only, got {order}"
        )));
    }
    check_magnitude(w)?;
    check_off_cut(w)?;

    let half = w / 2.0;
    let ln_half = half.ln();
    let j = bessel_j_cfg(cfg, order, w)?;
    let mut y = 2.0 / std::f64::consts::PI * ln_half * j;

    // Finite sum: only present for nu = 1, where it is 1/(w/2) at k = 0.
    if order == 1 {
        y -= Complex64::ONE / half / std::f64::consts::PI;
    }

    // psi(1) = -gamma, psi(m+1) = psi(m) + 1/m.
    let mut psi_a = -EULER_GAMMA; // psi(k+1)
    let mut psi_b = if order == 0 {
        -EULER_GAMMA
    } else {
        1.0 - EULER_GAMMA
    }; // psi(nu+k+1)

    let mut term = Complex64::ONE;
    for k in 1..=order {
        term *= half / k as f64;
    }
    // Accumulates Σ (-1)^k [psi(k+1)+psi(nu+k+1)] (w/2)^{nu+2k}/(k!(nu+k)!).
    let q = -half * half;
    let mut acc = Compensated::default();
    acc.add(term * (psi_a + psi_b));
    for k in 1..=cfg.max_terms {
        term *= q / (k as f64 * (order as u64 + k as u64) as f64);
        psi_a += 1.0 / k as f64;
        psi_b += 1.0 / (order as u64 + k as u64) as f64;
        let contrib = term * (psi_a + psi_b);
        acc.add(contrib);
        if contrib.norm() <= cfg.series_tol * acc.sum.norm().max(1e-300) {
            break;
        }
    }
    y -= acc.sum / std::f64::consts::PI;
    Ok(y)
}

pub fn bessel_y(order: u32, w: Complex64) -> Result<Complex64> {
    bessel_y_cfg(&SpecFunConfig::default(), order, w)
}

/// Hankel function of the first kind `H_ν^{(1)}(w) = J_ν(w) + i Y_ν(w)` for
/// `ν ∈ {0, 1}`.
pub fn hankel1(order: u32, w: Complex64) -> Result<Complex64> {
    let j = bessel_j(order, w)?;
    let y = bessel_y(order, w)?;
    Ok(j + Complex64::I * y)
}

/// `H_ν^{(1)}(w)` for integer `ν ≥ 0` by the forward recurrence
/// `H_{ν+1} = (2ν/w) H_ν − H_{ν−1}`.
///
/// The boolean flag is raised when `|H_ν|` has grown by more than 1e12
/// relative to `|H_0|`; the recessive (J) component has then lost all
/// significance while the dominant behavior, which governs the zeros, is
/// still accurate.
pub fn hankel1_int_with_flag(order: u32, w: Complex64) -> Result<(Complex64, bool)> {
    if order > 40 {
        return Err(Error::Domain(format!(
            "hankel1_int supports orders up to 40, got {order}"
        )));
    }
    let h0 = hankel1(0, w)?;
    if order == 0 {
        return Ok((h0, false));
    }
    let h1 = hankel1(1, w)?;
    let mut prev = h0;
    let mut cur = h1;
    for nu in 1..order {
        let next = 2.0 * nu as f64 / w * cur - prev;
        prev = cur;
        cur = next;
    }
    let warn = cur.norm() > 1e12 * h0.norm();
    Ok((cur, warn))
}

pub fn hankel1_int(order: u32, w: Complex64) -> Result<Complex64> {
    hankel1_int_with_flag(order, w).map(|(v, _)| v)
}

/// Derivative `d/dw H_ν^{(1)}(w) = H_{ν−1}^{(1)}(w) − (ν/w) H_ν^{(1)}(w)`
/// for `ν ≥ 1`.
pub fn hankel1_int_derivative(order: u32, w: Complex64) -> Result<Complex64> {
    if order == 0 {
        return Err(Error::Domain(
            "hankel1_int_derivative requires order >= 1".into(),
        ));
    }
    let hm1 = hankel1_int(order - 1, w)?;
    let h = hankel1_int(order, w)?;
    Ok(hm1 - order as f64 / w * h)
}
