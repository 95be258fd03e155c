//! Trigonometric interpolation of kernel factors and closed-form assembly
//! of the Fourier-Galerkin matrices `S_n(κ)` and `I + D_n(κ)`.
//!
//! Basis `e_m(t) = (1/√(2π)) e^{imt}` for `|m| ≤ n`; matrix indices run over
//! `-n..n` mapped to storage `0..2n` so the matrix is literally the operator
//! in that basis. Interpolation uses the equidistant knots
//! `s_j = 2πj/(2n+1)`, evaluated by a 2-D FFT with one index reshuffle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use crate::geometry::Curve;
use crate::kernels::{self, KernelFlavor};
use crate::{Error, Result};

/// Which operator family an assembled matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorFlavor {
    /// The single-layer matrix `S_n(κ)`.
    SingleLayer,
    /// The matrix `I_{2n+1} + D_n(κ)`.
    IdentityPlusDoubleLayer,
}

impl OperatorFlavor {
    pub fn kernel_flavor(self) -> KernelFlavor {
        match self {
            OperatorFlavor::SingleLayer => KernelFlavor::SingleLayer,
            OperatorFlavor::IdentityPlusDoubleLayer => KernelFlavor::DoubleLayer,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OperatorFlavor::SingleLayer => "S_n",
            OperatorFlavor::IdentityPlusDoubleLayer => "I+D_n",
        }
    }
}

/// 2-D trigonometric interpolation coefficients `c_{j,k}`, `|j|,|k| ≤ n`.
#[derive(Debug, Clone)]
pub struct TrigCoeffs {
    pub n: usize,
    c: Vec<Complex64>,
}

impl TrigCoeffs {
    fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// Coefficient `c_{j,k}` for `|j|, |k| ≤ n`.
    pub fn get(&self, j: i64, k: i64) -> Complex64 {
        let n = self.n as i64;
        debug_assert!(j.abs() <= n && k.abs() <= n);
        self.c[((j + n) as usize) * self.dim() + (k + n) as usize]
    }

    /// Constant coefficients: `c_{0,0} = 2π·value`, all others zero, which
    /// interpolates the constant kernel `value`.
    pub fn constant(n: usize, value: Complex64) -> TrigCoeffs {
        let dim = 2 * n + 1;
        let mut c = vec![Complex64::ZERO; dim * dim];
        c[n * dim + n] = 2.0 * PI * value;
        TrigCoeffs { n, c }
    }

    /// Value of the interpolant `Σ c_{j,k} e_j(s) e_k(t)`.
    pub fn eval(&self, s: f64, t: f64) -> Complex64 {
        let n = self.n as i64;
        let mut acc = Complex64::ZERO;
        for j in -n..=n {
            let ej = (Complex64::I * (j as f64) * s).exp();
            for k in -n..=n {
                let ek = (Complex64::I * (k as f64) * t).exp();
                acc += self.get(j, k) * ej * ek;
            }
        }
        acc / (2.0 * PI)
    }
}

/// Interpolation knots `2πj/(2n+1)`, `j = 0..2n`.
pub fn knots(n: usize) -> Vec<f64> {
    let dim = 2 * n + 1;
    (0..dim)
        .map(|j| 2.0 * PI * j as f64 / dim as f64)
        .collect()
}

/// Coefficients of the trigonometric interpolant through samples
/// `f(s_ℓ, t_m)` on the `(2n+1)²` knot grid (row index ℓ, column index m):
/// `c_{j,k} = (2π/(2n+1)²) Σ_{ℓ,m} f(s_ℓ,t_m) e^{−ijs_ℓ} e^{−ikt_m}`.
pub fn interpolate2d(samples: &[Complex64], n: usize) -> Result<TrigCoeffs> {
    let dim = 2 * n + 1;
    if samples.len() != dim * dim {
        return Err(Error::Dimension(format!(
            "expected {} samples on the ({dim})^2 knot grid, got {}",
            dim * dim,
            samples.len()
        )));
    }
    let mut grid = samples.to_vec();
    let fft = FftPlanner::new().plan_fft_forward(dim);
    fft2d_in_place(&mut grid, dim, &fft);

    // Reshuffle: frequency j in -n..n lives at DFT bin j mod (2n+1).
    let scale = 2.0 * PI / (dim * dim) as f64;
    let mut c = vec![Complex64::ZERO; dim * dim];
    for j in -(n as i64)..=(n as i64) {
        let bj = j.rem_euclid(dim as i64) as usize;
        for k in -(n as i64)..=(n as i64) {
            let bk = k.rem_euclid(dim as i64) as usize;
            c[((j + n as i64) as usize) * dim + (k + n as i64) as usize] =
                grid[bj * dim + bk] * scale;
        }
    }
    Ok(TrigCoeffs { n, c })
}

/// Row-column 2-D forward DFT of a `dim × dim` grid stored row-major.
fn fft2d_in_place(grid: &mut [Complex64], dim: usize, fft: &Arc<dyn rustfft::Fft<f64>>) {
    for row in grid.chunks_exact_mut(dim) {
        fft.process(row);
    }
    let mut col = vec![Complex64::ZERO; dim];
    for k in 0..dim {
        for (l, slot) in col.iter_mut().enumerate() {
            *slot = grid[l * dim + k];
        }
        fft.process(&mut col);
        for (l, &v) in col.iter().enumerate() {
            grid[l * dim + k] = v;
        }
    }
}

/// Galerkin matrix of the smooth part `B(b)[φ](s) = ∫ b(s,t) φ(t) dt` for
/// the interpolated kernel: entry `(i,l) = c_{i,−l}`, from
/// `∫ e_k(t) e_l(t) dt = δ_{k+l,0}`.
pub fn assemble_b(c: &TrigCoeffs) -> DMatrix<Complex64> {
    let n = c.n as i64;
    let dim = c.dim();
    DMatrix::from_fn(dim, dim, |row, col| {
        let i = row as i64 - n;
        let l = col as i64 - n;
        c.get(i, -l)
    })
}

/// Galerkin matrix of the logarithmic part
/// `A(a)[φ](s) = ∫ a(s,t) ln(4 sin²((t−s)/2)) φ(t) dt` for the interpolated
/// kernel, via the expansion `ln(4 sin²(τ/2)) = −Σ_{m≠0} e^{imτ}/|m|`:
/// entry `(i,l) = −Σ_{|k|≤n, k≠−l, |i−k−l|≤n} c_{i−k−l,k} / |k+l|`.
pub fn assemble_a(c: &TrigCoeffs) -> DMatrix<Complex64> {
    let n = c.n as i64;
    let dim = c.dim();
    DMatrix::from_fn(dim, dim, |row, col| {
        let i = row as i64 - n;
        let l = col as i64 - n;
        let mut acc = Complex64::ZERO;
        for k in -n..=n {
            if k == -l || (i - k - l).abs() > n {
                continue;
            }
            acc -= c.get(i - k - l, k) / (k + l).abs() as f64;
        }
        acc
    })
}

/// Dense complex Fourier-Galerkin matrix of one operator at fixed `κ`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub n: usize,
    pub flavor: OperatorFlavor,
    pub kappa: Complex64,
    pub entries: DMatrix<Complex64>,
}

/// Kernel factor samples on the knot grid, coincident knots via the
/// diagonal limit formulas. Bessel evaluations are shared between `(ℓ,m)`
/// and `(m,ℓ)` since they depend only on the chord length; for the disk the
/// chord depends on `ℓ−m` alone and the tables collapse to one row.
fn sample_kernel_grids(
    curve: &Curve,
    kappa: Complex64,
    n: usize,
    flavor: KernelFlavor,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let dim = 2 * n + 1;
    let ts = knots(n);
    let frames = ts
        .iter()
        .map(|&t| curve.frame(t))
        .collect::<Result<Vec<_>>>()?;

    let mut a = vec![Complex64::ZERO; dim * dim];
    let mut b = vec![Complex64::ZERO; dim * dim];

    // log weight depends on l - m only.
    let logw_by_diff: Vec<f64> = (0..dim)
        .map(|d| {
            if d == 0 {
                0.0
            } else {
                kernels::log_weight(ts[d], 0.0)
            }
        })
        .collect();

    let circulant = matches!(curve, Curve::Disk { .. });
    // j0/h0 (single) or j1/h1 (double) at kappa*rho, indexed like rho.
    let bessel_at = |rho: f64| -> Result<(Complex64, Complex64)> {
        let w = kappa * rho;
        match flavor {
            KernelFlavor::SingleLayer => {
                Ok((crate::specfun::bessel_j(0, w)?, crate::specfun::hankel1(0, w)?))
            }
            KernelFlavor::DoubleLayer => {
                Ok((crate::specfun::bessel_j(1, w)?, crate::specfun::hankel1(1, w)?))
            }
        }
    };

    let fill = |a: &mut [Complex64],
                b: &mut [Complex64],
                l: usize,
                m: usize,
                jv: Complex64,
                hv: Complex64| {
        let fm = &frames[m];
        if l == m {
            a[l * dim + m] = kernels::a_diagonal(flavor, fm);
            b[l * dim + m] = kernels::b_diagonal(flavor, kappa, fm);
            return;
        }
        let fl = &frames[l];
        let d = fl.z - fm.z;
        let rho = d.norm();
        let logw = logw_by_diff[(l + dim - m) % dim];
        let (av, bv) = match flavor {
            KernelFlavor::SingleLayer => {
                let av = -fm.speed / (2.0 * PI) * jv;
                let bv = Complex64::I / 2.0 * hv * fm.speed - av * logw;
                (av, bv)
            }
            KernelFlavor::DoubleLayer => {
                let dir = d.dot(&fm.normal) / rho;
                let av = -kappa / (2.0 * PI) * dir * jv * fm.speed;
                let bv = Complex64::I * kappa / 2.0 * dir * hv * fm.speed - av * logw;
                (av, bv)
            }
        };
        a[l * dim + m] = av;
        b[l * dim + m] = bv;
    };

    if circulant {
        // rho depends only on (l - m) mod dim; one Bessel evaluation per
        // diagonal of the grid.
        let mut tables = vec![(Complex64::ZERO, Complex64::ZERO); dim];
        for d in 1..dim {
            let rho = (frames[d].z - frames[0].z).norm();
            tables[d] = bessel_at(rho)?;
        }
        for l in 0..dim {
            for m in 0..dim {
                let (jv, hv) = tables[(l + dim - m) % dim];
                fill(&mut a, &mut b, l, m, jv, hv);
            }
        }
    } else {
        for l in 0..dim {
            for m in l..dim {
                let (jv, hv) = if l == m {
                    (Complex64::ZERO, Complex64::ZERO)
                } else {
                    bessel_at((frames[l].z - frames[m].z).norm())?
                };
                fill(&mut a, &mut b, l, m, jv, hv);
                if l != m {
                    fill(&mut a, &mut b, m, l, jv, hv);
                }
            }
        }
    }
    Ok((a, b))
}

/// Assembles `S_n(κ)` or `I_{2n+1} + D_n(κ)`: samples the split factors on
/// the knot grid, interpolates both, and combines the closed-form Galerkin
/// matrices of the two parts.
pub fn assemble_operator(
    curve: &Curve,
    kappa: Complex64,
    n: usize,
    flavor: OperatorFlavor,
) -> Result<OperatorMatrix> {
    if kappa == Complex64::ZERO {
        return Err(Error::Config("assemble_operator requires kappa != 0".into()));
    }
    if n < 2 {
        return Err(Error::Config(format!(
            "assemble_operator requires n >= 2, got {n}"
        )));
    }
    curve.validate()?;
    let (a_samples, b_samples) = sample_kernel_grids(curve, kappa, n, flavor.kernel_flavor())?;
    let ca = interpolate2d(&a_samples, n)?;
    let cb = interpolate2d(&b_samples, n)?;
    let mut entries = assemble_a(&ca) + assemble_b(&cb);
    if flavor == OperatorFlavor::IdentityPlusDoubleLayer {
        for i in 0..2 * n + 1 {
            entries[(i, i)] += Complex64::ONE;
        }
    }
    Ok(OperatorMatrix {
        n,
        flavor,
        kappa,
        entries,
    })
}

/// Galerkin matrix of `K[φ](s) = −(1/2π)∫ [ln(4 sin²((s−t)/2)) − 1] φ(t) dt`,
/// assembled through the same split pipeline with constant factors
/// `a ≡ −1/(2π)`, `b ≡ 1/(2π)`. Equals `diag(1, 1/|m|)` in Fourier ordering.
pub fn k_operator_matrix(n: usize) -> Result<DMatrix<Complex64>> {
    if n < 1 {
        return Err(Error::Config("k_operator_matrix requires n >= 1".into()));
    }
    let ca = TrigCoeffs::constant(n, Complex64::from(-1.0 / (2.0 * PI)));
    let cb = TrigCoeffs::constant(n, Complex64::from(1.0 / (2.0 * PI)));
    Ok(assemble_a(&ca) + assemble_b(&cb))
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// Text dump: a header line `n flavor kappa_re kappa_im` followed by one
    /// `re im` pair per entry in row-major order (indices −n..n).
    pub fn dump_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "{} {} {} {}",
            self.n,
            self.flavor.label(),
            self.kappa.re,
            self.kappa.im
        )?;
        for row in 0..self.dim() {
            for col in 0..self.dim() {
                let v = self.entries[(row, col)];
                writeln!(w, "{} {}", v.re, v.im)?;
            }
        }
        Ok(())
    }
}
