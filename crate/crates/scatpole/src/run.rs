//! CLI orchestration: configuration loading, worker-pool setup, and
//! bit-stable emission of scan heatmaps, pole tables, convergence studies,
//! and the disk oracle.
//!
//! All result files (CSV, poles/zeros JSON) are byte-identical across runs
//! with the same config and seed, independent of the thread count. The
//! accompanying manifest files additionally carry wall-clock timings and are
//! therefore excluded from that guarantee.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diskoracle::{argument_principle_count, hankel_zeros_in_region, ZeroSweep};
use crate::galerkin::OperatorFlavor;
use crate::geometry::Curve;
use crate::nepsolve::{refine_poles, scan_region, Contour, IndicatorField, PoleEstimate, RefineSettings, SearchRegion};
use crate::{Error, Result};

/// Environment variable overriding the configured worker count.
pub const THREADS_ENV: &str = "SCATPOLE_THREADS";

/// Which operator family to use: the single-layer matrix, the
/// identity-plus-double-layer matrix, or both with a cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlavorChoice {
    Single,
    Double,
    Both,
}

impl FlavorChoice {
    pub fn flavors(self) -> Vec<OperatorFlavor> {
        match self {
            FlavorChoice::Single => vec![OperatorFlavor::SingleLayer],
            FlavorChoice::Double => vec![OperatorFlavor::IdentityPlusDoubleLayer],
            FlavorChoice::Both => vec![
                OperatorFlavor::SingleLayer,
                OperatorFlavor::IdentityPlusDoubleLayer,
            ],
        }
    }
}

pub fn flavor_name(flavor: OperatorFlavor) -> &'static str {
    match flavor {
        OperatorFlavor::SingleLayer => "single",
        OperatorFlavor::IdentityPlusDoubleLayer => "double",
    }
}

/// Spectral-indicator scan parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanParams {
    /// Indicator contour radius around the origin of the spectral plane.
    pub radius: f64,
    /// The contour uses `2m` quadrature nodes.
    pub m: usize,
    /// Indicator level above which a grid cell counts as a pole candidate.
    pub threshold: f64,
}

impl Default for ScanParams {
    fn default() -> Self {
        // radius 0.15: large enough that a pole anywhere in a default-grid
        // cell pulls an eigenvalue inside the contour (slope of the smallest
        // eigenvalue near a pole is about 3.5), small enough that the rest of
        // the region stays many orders below the threshold.
        ScanParams { radius: 0.15, m: 16, threshold: 1e-8 }
    }
}

impl ScanParams {
    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::Config(format!("scan radius must be positive, got {}", self.radius)));
        }
        if self.m < 4 {
            return Err(Error::Config(format!("scan m must be at least 4, got {}", self.m)));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::Config(format!(
                "scan threshold must lie in (0, 1], got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Contour-moment refinement parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RefineParams {
    /// Contour radius around each candidate; `None` uses half the scan grid
    /// cell diagonal.
    pub radius: Option<f64>,
    /// The moment quadrature uses `2 * m_quad` nodes.
    pub m_quad: usize,
    /// Columns of the random probe block.
    pub block: usize,
    /// Rank cutoff relative to the leading singular value.
    pub rank_tol: f64,
    /// Largest acceptable smallest singular value at a reported pole.
    pub residual_accept: f64,
}

impl Default for RefineParams {
    fn default() -> Self {
        RefineParams {
            radius: None,
            m_quad: 32,
            block: 8,
            rank_tol: 1e-8,
            residual_accept: 1e-6,
        }
    }
}

impl RefineParams {
    fn settings(&self, region: &SearchRegion, seed: u64) -> Result<RefineSettings> {
        let settings = RefineSettings {
            radius: self.radius.unwrap_or_else(|| region.half_cell_diagonal()),
            m_quad: self.m_quad,
            block: self.block,
            rank_tol: self.rank_tol,
            seed,
        };
        settings.validate()?;
        if !(self.residual_accept > 0.0) {
            return Err(Error::Config(format!(
                "residual_accept must be positive, got {}",
                self.residual_accept
            )));
        }
        Ok(settings)
    }
}

/// Full run configuration. Unknown keys are rejected; every field has a
/// default so a minimal config file (or none at all) is valid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub curve: Curve,
    pub flavor: FlavorChoice,
    /// Truncation order; the matrices have dimension `2n + 1`.
    pub n: usize,
    /// Orders for convergence studies.
    pub n_list: Option<Vec<usize>>,
    pub region: SearchRegion,
    pub scan: ScanParams,
    pub refine: RefineParams,
    /// Pre-supplied pole candidates `[re, im]`; skips the scan when present.
    pub targets: Option<Vec<[f64; 2]>>,
    /// Largest Hankel order for the disk oracle.
    pub nu_max: u32,
    pub seed: u64,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            curve: Curve::Disk { radius: 1.0 },
            flavor: FlavorChoice::Both,
            n: 32,
            n_list: None,
            region: SearchRegion::default(),
            scan: ScanParams::default(),
            refine: RefineParams::default(),
            targets: None,
            nu_max: 10,
            seed: 42,
            threads: 1,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.curve.validate()?;
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if let Some(list) = &self.n_list {
            if list.is_empty() {
                return Err(Error::Config("n_list must not be empty".into()));
            }
            if list.iter().any(|&n| n < 2) {
                return Err(Error::Config("n_list entries must be at least 2".into()));
            }
        }
        self.region.validate()?;
        self.scan.validate()?;
        self.refine.settings(&self.region, self.seed)?;
        if self.nu_max < 2 {
            return Err(Error::Config(format!("nu_max must be at least 2, got {}", self.nu_max)));
        }
        Ok(())
    }

    /// Effective worker count: environment override, then config.
    pub fn effective_threads(&self) -> Result<usize> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{THREADS_ENV} must be an integer, got {v:?}"))),
            Err(_) => Ok(self.threads),
        }
    }

    fn candidate_points(&self) -> Option<Vec<Complex64>> {
        self.targets
            .as_ref()
            .map(|t| t.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }
}

fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if threads > 0 {
        builder = builder.num_threads(threads);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("worker pool setup failed: {e}")))?;
    pool.install(job)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

/// 15 significant digits, mirroring the printed pole tables.
fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}

fn complex_sig15(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{} {sign} {}i", sig15(z.re), sig15(z.im.abs()))
}

#[derive(Serialize)]
struct Manifest<'a, E: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    elapsed_ms: u128,
    #[serde(flatten)]
    extra: E,
}

fn write_manifest<E: Serialize>(
    cfg: &RunConfig,
    command: &str,
    start: Instant,
    extra: E,
) -> Result<()> {
    let manifest = Manifest {
        command,
        config: cfg,
        elapsed_ms: start.elapsed().as_millis(),
        extra,
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    write_file(&cfg.output_dir, &format!("{command}_manifest.json"), &text)?;
    Ok(())
}

fn field_csv(field: &IndicatorField) -> String {
    let mut out = String::from("kappa_re,kappa_im,log10_rim\n");
    for p in &field.points {
        match p.log10_rim() {
            Some(v) => {
                let _ = writeln!(out, "{:e},{:e},{:e}", p.kappa.re, p.kappa.im, v);
            }
            None => {
                let _ = writeln!(out, "{:e},{:e},nan", p.kappa.re, p.kappa.im);
            }
        }
    }
    out
}

/// Indicator heatmap CSV per configured flavor, plus a manifest.
pub fn cmd_scan(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let start = Instant::now();
    let threads = cfg.effective_threads()?;
    let mut failed_points = 0usize;
    in_pool(threads, || {
        for flavor in cfg.flavor.flavors() {
            let field = scan_region(
                &cfg.curve,
                cfg.n,
                flavor,
                &cfg.region,
                cfg.scan.radius,
                cfg.scan.m,
                cfg.seed,
            )?;
            failed_points += field.points.iter().filter(|p| p.rim.is_none()).count();
            write_file(
                &cfg.output_dir,
                &format!("scan_{}.csv", flavor_name(flavor)),
                &field_csv(&field),
            )?;
        }
        Ok(())
    })?;
    write_manifest(cfg, "scan", start, serde_json::json!({ "failed_points": failed_points }))
}

#[derive(Serialize)]
struct PoleRecord {
    kappa_re: f64,
    kappa_im: f64,
    residual: f64,
    count: usize,
    flavor: String,
    n: usize,
    seed: u64,
}

fn pole_records(poles: &[PoleEstimate]) -> Vec<PoleRecord> {
    poles
        .iter()
        .map(|p| PoleRecord {
            kappa_re: p.kappa.re,
            kappa_im: p.kappa.im,
            residual: p.residual,
            count: p.count,
            flavor: flavor_name(p.flavor).to_string(),
            n: p.n,
            seed: p.seed,
        })
        .collect()
}

/// Candidate cells for refinement: pre-supplied targets if present, otherwise
/// a fresh indicator scan.
///
/// Candidate detection always scans with the identity-plus-double-layer
/// matrix: away from poles its eigenvalues cluster at 1, so the indicator
/// field is dark there. The single-layer eigenvalues instead accumulate at 0
/// like 1/m, which parks an eigenvalue inside any practical indicator contour
/// at every κ and washes the field out. Refinement still runs with whichever
/// flavors are configured.
fn candidates(cfg: &RunConfig, n: usize) -> Result<Vec<Complex64>> {
    if let Some(points) = cfg.candidate_points() {
        return Ok(points);
    }
    let field = scan_region(
        &cfg.curve,
        n,
        OperatorFlavor::IdentityPlusDoubleLayer,
        &cfg.region,
        cfg.scan.radius,
        cfg.scan.m,
        cfg.seed,
    )?;
    Ok(field.candidate_cells(cfg.scan.threshold))
}

fn refined_in_region(
    cfg: &RunConfig,
    n: usize,
    flavor: OperatorFlavor,
    cands: &[Complex64],
    settings: &RefineSettings,
) -> Result<Vec<PoleEstimate>> {
    let poles = refine_poles(&cfg.curve, n, flavor, cands, settings)?;
    Ok(poles
        .into_iter()
        .filter(|p| p.residual <= cfg.refine.residual_accept && cfg.region.contains(p.kappa))
        .collect())
}

/// Scan (or accept pre-supplied candidates), refine with every configured
/// flavor, cross-check the flavors against each other, and write the pole
/// list as JSON plus a printable table.
pub fn cmd_poles(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let start = Instant::now();
    let threads = cfg.effective_threads()?;
    let (cands, per_flavor) = in_pool(threads, || {
        let cands = candidates(cfg, cfg.n)?;
        let settings = cfg.refine.settings(&cfg.region, cfg.seed)?;
        let mut per_flavor = Vec::new();
        for flavor in cfg.flavor.flavors() {
            per_flavor.push(refined_in_region(cfg, cfg.n, flavor, &cands, &settings)?);
        }
        Ok((cands, per_flavor))
    })?;

    // Cross-check when both flavors ran: distance from each pole of one
    // flavor to its nearest counterpart in the other.
    let cross_check_max = if per_flavor.len() == 2 {
        let mut worst: f64 = 0.0;
        for (a, b) in [(&per_flavor[0], &per_flavor[1]), (&per_flavor[1], &per_flavor[0])] {
            for p in a.iter() {
                let nearest = b
                    .iter()
                    .map(|q| (p.kappa - q.kappa).norm())
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(nearest);
            }
        }
        Some(worst)
    } else {
        None
    };

    let all: Vec<&PoleEstimate> = per_flavor.iter().flatten().collect();
    let records: Vec<PoleRecord> =
        pole_records(&all.iter().map(|&p| p.clone()).collect::<Vec<_>>());
    let json = serde_json::to_string_pretty(&records)?;
    write_file(&cfg.output_dir, "poles.json", &json)?;

    let mut table = String::new();
    let _ = writeln!(table, "{:<8} {:>4} {:>6}  {:<42} {:>12}", "flavor", "n", "count", "pole", "residual");
    for p in &all {
        let _ = writeln!(
            table,
            "{:<8} {:>4} {:>6}  {:<42} {:>12.3e}",
            flavor_name(p.flavor),
            p.n,
            p.count,
            complex_sig15(p.kappa),
            p.residual
        );
    }
    write_file(&cfg.output_dir, "poles.txt", &table)?;

    write_manifest(
        cfg,
        "poles",
        start,
        serde_json::json!({
            "candidates": cands.len(),
            "poles_per_flavor": per_flavor.iter().map(|v| v.len()).collect::<Vec<_>>(),
            "cross_check_max_distance": cross_check_max,
        }),
    )
}

/// Reference poles for a convergence study: the Hankel-zero oracle for the
/// disk, the finest configured order for every other curve.
fn convergence_reference(cfg: &RunConfig, n_max: usize) -> Result<Vec<Complex64>> {
    if let Curve::Disk { radius } = cfg.curve {
        if (radius - 1.0).abs() < 1e-15 {
            let sweep = hankel_zeros_in_region(cfg.nu_max, &cfg.region)?;
            return Ok(sweep.zeros.iter().map(|z| z.kappa).collect());
        }
    }
    let cands = candidates(cfg, n_max)?;
    let settings = cfg.refine.settings(&cfg.region, cfg.seed)?;
    let flavor = cfg.flavor.flavors()[0];
    let poles = refined_in_region(cfg, n_max, flavor, &cands, &settings)?;
    Ok(poles.into_iter().map(|p| p.kappa).collect())
}

/// Absolute pole errors against the reference for every configured order,
/// written as CSV with one row per (target, n).
pub fn cmd_convergence(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let start = Instant::now();
    let n_list = cfg
        .n_list
        .clone()
        .ok_or_else(|| Error::Config("convergence runs need n_list".into()))?;
    let threads = cfg.effective_threads()?;
    let n_max = *n_list.iter().max().expect("validated non-empty");

    let csv = in_pool(threads, || {
        let reference = convergence_reference(cfg, n_max)?;
        let targets = match cfg.candidate_points() {
            Some(points) => points
                .into_iter()
                .map(|p| {
                    reference
                        .iter()
                        .copied()
                        .min_by(|a, b| {
                            (a - p).norm().partial_cmp(&(b - p).norm()).expect("finite")
                        })
                        .ok_or_else(|| Error::Numerical("empty convergence reference".into()))
                })
                .collect::<Result<Vec<_>>>()?,
            None => reference.clone(),
        };
        if targets.is_empty() {
            return Err(Error::Numerical("no reference poles for the convergence study".into()));
        }
        let settings = cfg.refine.settings(&cfg.region, cfg.seed)?;
        let flavors = cfg.flavor.flavors();

        let mut csv = String::from("target_re,target_im,n,flavor,abs_error\n");
        for &target in &targets {
            for &n in &n_list {
                for &flavor in &flavors {
                    let poles = refine_poles(&cfg.curve, n, flavor, &[target], &settings)?;
                    let nearest = poles
                        .iter()
                        .map(|p| (p.kappa - target).norm())
                        .fold(f64::INFINITY, f64::min);
                    if !nearest.is_finite() {
                        return Err(Error::Numerical(format!(
                            "no pole near {target} at n = {n} ({})",
                            flavor_name(flavor)
                        )));
                    }
                    let _ = writeln!(
                        csv,
                        "{:e},{:e},{n},{},{:e}",
                        target.re,
                        target.im,
                        flavor_name(flavor),
                        nearest
                    );
                }
            }
        }
        Ok(csv)
    })?;
    write_file(&cfg.output_dir, "convergence.csv", &csv)?;
    write_manifest(cfg, "convergence", start, serde_json::json!({ "n_list": n_list }))
}

#[derive(Serialize)]
struct ZeroRecord {
    nu: u32,
    kappa_re: f64,
    kappa_im: f64,
    newton_residual: f64,
}

/// Hankel zeros of the disk oracle with per-zero argument-principle
/// certification, written as JSON.
pub fn cmd_disk_oracle(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let start = Instant::now();
    let sweep: ZeroSweep = hankel_zeros_in_region(cfg.nu_max, &cfg.region)?;

    // Completeness: each accepted zero must be the only one its ν-contour
    // encloses; a mismatch means the Newton sweep and the argument principle
    // disagree.
    for z in &sweep.zeros {
        let contour = Contour::new(z.kappa, 0.15, 8)?;
        let count = argument_principle_count(z.nu, &contour)?;
        if count != 1 {
            return Err(Error::Numerical(format!(
                "argument principle counts {count} zeros of H_{} near {}, expected 1",
                z.nu, z.kappa
            )));
        }
    }

    let records: Vec<ZeroRecord> = sweep
        .zeros
        .iter()
        .map(|z| ZeroRecord {
            nu: z.nu,
            kappa_re: z.kappa.re,
            kappa_im: z.kappa.im,
            newton_residual: z.newton_residual,
        })
        .collect();
    let json = serde_json::to_string_pretty(&records)?;
    write_file(&cfg.output_dir, "disk_zeros.json", &json)?;
    write_manifest(
        cfg,
        "disk_oracle",
        start,
        serde_json::json!({ "zeros": sweep.zeros.len(), "dropped_seeds": sweep.dropped }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("scatpole-run-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn config_roundtrip_and_validation() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();

        let bad: std::result::Result<RunConfig, _> =
            serde_json::from_str(r#"{"unknown_key": 1}"#);
        assert!(bad.is_err());

        let bad_curve: RunConfig =
            serde_json::from_str(r#"{"curve": {"kind": "disk", "radius": -1.0}}"#).unwrap();
        assert!(matches!(bad_curve.validate(), Err(Error::Config(_))));

        let mut bad_scan = RunConfig::default();
        bad_scan.scan.radius = -0.5;
        assert!(bad_scan.validate().is_err());
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"n": 8, "flavor": "single"}"#).unwrap();
        assert_eq!(cfg.n, 8);
        assert_eq!(cfg.flavor, FlavorChoice::Single);
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn disk_oracle_outputs() {
        let dir = temp_dir("oracle");
        let cfg = RunConfig {
            nu_max: 3,
            output_dir: dir.clone(),
            ..RunConfig::default()
        };
        cmd_disk_oracle(&cfg).unwrap();
        let json = std::fs::read_to_string(dir.join("disk_zeros.json")).unwrap();
        let records: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
        assert_eq!(records.len(), 2);
        let manifest = std::fs::read_to_string(dir.join("disk_oracle_manifest.json")).unwrap();
        assert!(manifest.contains("\"zeros\": 2"));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn poles_from_supplied_candidates() {
        let dir = temp_dir("poles");
        let cfg = RunConfig {
            flavor: FlavorChoice::Single,
            n: 16,
            targets: Some(vec![[1.31, -1.68]]),
            refine: RefineParams {
                radius: Some(0.08),
                m_quad: 32,
                ..RefineParams::default()
            },
            output_dir: dir.clone(),
            ..RunConfig::default()
        };
        cmd_poles(&cfg).unwrap();
        let json = std::fs::read_to_string(dir.join("poles.json")).unwrap();
        let records: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
        assert_eq!(records.len(), 1);
        let re = records[0]["kappa_re"].as_f64().unwrap();
        let im = records[0]["kappa_im"].as_f64().unwrap();
        assert!((re - 1.308012032273949).abs() <= 1e-9);
        assert!((im + 1.681788804745845).abs() <= 1e-9);
        let table = std::fs::read_to_string(dir.join("poles.txt")).unwrap();
        assert!(table.contains("single"));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn poles_empty_region() {
        let dir = temp_dir("empty");
        let cfg = RunConfig {
            flavor: FlavorChoice::Double,
            n: 8,
            region: SearchRegion {
                re_min: 0.5,
                re_max: 1.0,
                im_min: -0.5,
                im_max: 0.0,
                n_re: 4,
                n_im: 4,
            },
            output_dir: dir.clone(),
            ..RunConfig::default()
        };
        cmd_poles(&cfg).unwrap();
        let json = std::fs::read_to_string(dir.join("poles.json")).unwrap();
        let records: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
        assert!(records.is_empty());
        let manifest = std::fs::read_to_string(dir.join("poles_manifest.json")).unwrap();
        assert!(manifest.contains("\"candidates\": 0"));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn scan_csv_shape() {
        let dir = temp_dir("scan");
        let cfg = RunConfig {
            flavor: FlavorChoice::Double,
            n: 8,
            region: SearchRegion {
                re_min: 1.0,
                re_max: 1.6,
                im_min: -2.0,
                im_max: -1.4,
                n_re: 4,
                n_im: 4,
            },
            output_dir: dir.clone(),
            ..RunConfig::default()
        };
        cmd_scan(&cfg).unwrap();
        let csv = std::fs::read_to_string(dir.join("scan_double.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 17);
        assert_eq!(lines[0], "kappa_re,kappa_im,log10_rim");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn convergence_against_oracle() {
        let dir = temp_dir("conv");
        let cfg = RunConfig {
            flavor: FlavorChoice::Single,
            n_list: Some(vec![8, 16]),
            targets: Some(vec![[1.308, -1.682]]),
            nu_max: 3,
            refine: RefineParams {
                radius: Some(0.08),
                m_quad: 32,
                ..RefineParams::default()
            },
            output_dir: dir.clone(),
            ..RunConfig::default()
        };
        cmd_convergence(&cfg).unwrap();
        let csv = std::fs::read_to_string(dir.join("convergence.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "target_re,target_im,n,flavor,abs_error");
        assert_eq!(lines.len(), 3);
        let err8: f64 = lines[1].rsplit(',').next().unwrap().parse().unwrap();
        let err16: f64 = lines[2].rsplit(',').next().unwrap().parse().unwrap();
        assert!(err16 <= err8);
        assert!(err16 <= 1e-9);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn convergence_requires_n_list() {
        let cfg = RunConfig::default();
        assert!(matches!(cmd_convergence(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn determinism_across_thread_counts() {
        let dir1 = temp_dir("det1");
        let dir2 = temp_dir("det2");
        let base = RunConfig {
            flavor: FlavorChoice::Single,
            n: 8,
            targets: Some(vec![[1.31, -1.68]]),
            refine: RefineParams {
                radius: Some(0.08),
                m_quad: 16,
                ..RefineParams::default()
            },
            ..RunConfig::default()
        };
        let cfg1 = RunConfig { threads: 1, output_dir: dir1.clone(), ..base.clone() };
        let cfg2 = RunConfig { threads: 4, output_dir: dir2.clone(), ..base };
        cmd_poles(&cfg1).unwrap();
        cmd_poles(&cfg2).unwrap();
        let a = std::fs::read(dir1.join("poles.json")).unwrap();
        let b = std::fs::read(dir2.join("poles.json")).unwrap();
        assert_eq!(a, b);
        std::fs::remove_dir_all(&dir1).unwrap();
        std::fs::remove_dir_all(&dir2).unwrap();
    }
}
