//! Experiment orchestration: flat key-value configs, visibility sweeps over
//! (epsilon, omega), decay-rate fits, and the CSV / JSON report formats.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::grid2d::Grid2D;
use crate::heat::{Envelope, SourceSpec};
use crate::helmholtz::{
    grid_visibility, radial_visibility, FrequencySolver, RadialFrequencySolver,
};
use crate::medium::{MediumSpec, ObjectSpec};
use crate::radial::RadialGrid;
use crate::special::rate_frequency;
use crate::transform::BlowupMap;
use crate::{Error, Result};

/// Parsed sweep configuration. One key per line, `key = value`, `#` starts
/// a comment; list values are comma separated.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub dimension: usize,
    pub epsilons: Vec<f64>,
    pub omegas: Vec<f64>,
    pub nx: usize,
    pub t_final: f64,
    pub dt: f64,
    pub object_tensor: f64,
    pub object_density: f64,
    pub source_center: Vec<f64>,
    pub source_width: f64,
    pub r_obs: f64,
    pub out_dir: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dimension: 3,
            epsilons: vec![0.02, 0.04, 0.08, 0.16],
            omegas: vec![1.0],
            nx: 256,
            t_final: 1.0,
            dt: 0.01,
            object_tensor: 2.0,
            object_density: 3.0,
            source_center: vec![3.0, 0.0, 0.0],
            source_width: 0.3,
            r_obs: 2.0,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("key {key}: cannot parse number from {v:?}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let items: Result<Vec<f64>> = v.split(',').map(|s| parse_f64(key, s)).collect();
    let items = items?;
    if items.is_empty() {
        return Err(Error::Config(format!("key {key}: empty list")));
    }
    Ok(items)
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut center_given = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "dimension" => {
                    cfg.dimension = parse_f64(key, value)? as usize;
                }
                "epsilons" => cfg.epsilons = parse_list(key, value)?,
                "omegas" => cfg.omegas = parse_list(key, value)?,
                "nx" => {
                    let v = parse_f64(key, value)?;
                    if v.fract() != 0.0 || v < 0.0 {
                        return Err(Error::Config(format!("key nx: {value:?} is not a count")));
                    }
                    cfg.nx = v as usize;
                }
                "t_final" => cfg.t_final = parse_f64(key, value)?,
                "dt" => cfg.dt = parse_f64(key, value)?,
                "object.tensor" => cfg.object_tensor = parse_f64(key, value)?,
                "object.density" => cfg.object_density = parse_f64(key, value)?,
                "source.center" => {
                    cfg.source_center = parse_list(key, value)?;
                    center_given = true;
                }
                "source.width" => cfg.source_width = parse_f64(key, value)?,
                "r_obs" => cfg.r_obs = parse_f64(key, value)?,
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                other => {
                    return Err(Error::Config(format!("unknown key {other:?}")));
                }
            }
        }
        if !center_given && cfg.dimension == 2 {
            cfg.source_center = vec![3.0, 0.0];
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 2 && self.dimension != 3 {
            return Err(Error::Config(format!(
                "dimension must be 2 or 3, got {}",
                self.dimension
            )));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|&e| !(e > 0.0 && e < 0.5)) {
            return Err(Error::Config(format!(
                "epsilons must lie in (0, 1/2), got {:?}",
                self.epsilons
            )));
        }
        if self.omegas.is_empty() || self.omegas.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Config(format!(
                "omegas must be positive, got {:?}",
                self.omegas
            )));
        }
        if self.dimension == 2 && (self.nx < 16 || self.nx % 8 != 0) {
            return Err(Error::Config(format!(
                "nx must be a multiple of 8 and at least 16 for planar runs, got {}",
                self.nx
            )));
        }
        if !(self.t_final > 0.0) || !(self.dt > 0.0) || self.dt > self.t_final {
            return Err(Error::Config(format!(
                "bad time horizon: t_final {} dt {}",
                self.t_final, self.dt
            )));
        }
        if self.source_center.len() != self.dimension {
            return Err(Error::Config(format!(
                "source.center has {} entries for dimension {}",
                self.source_center.len(),
                self.dimension
            )));
        }
        let rc: f64 = self.source_center.iter().map(|c| c * c).sum::<f64>().sqrt();
        if rc <= 2.0 {
            return Err(Error::Config(format!(
                "source.center must lie outside the cloak, |c| = {rc:.3}"
            )));
        }
        if rc >= 4.0 {
            return Err(Error::Config(format!(
                "source.center must lie inside the domain, |c| = {rc:.3}"
            )));
        }
        if !(self.source_width > 0.0) {
            return Err(Error::Config(format!(
                "source.width must be positive, got {}",
                self.source_width
            )));
        }
        if !(2.0..=3.5).contains(&self.r_obs) {
            return Err(Error::Config(format!(
                "r_obs must lie in [2, 3.5] so the observation shell is inside the domain, got {}",
                self.r_obs
            )));
        }
        if !(self.object_tensor > 0.0) || !(self.object_density > 0.0) {
            return Err(Error::Config("object constants must be positive".into()));
        }
        Ok(())
    }

    pub fn object(&self) -> Result<ObjectSpec> {
        ObjectSpec::isotropic(self.dimension, self.object_tensor, self.object_density)
    }

    pub fn source(&self) -> Result<SourceSpec> {
        SourceSpec::new(self.source_center.clone(), self.source_width, Envelope::Exp)
    }

    pub fn cloak_spec(&self, epsilon: f64) -> Result<MediumSpec> {
        let map = BlowupMap::new(epsilon, self.dimension)?;
        MediumSpec::cloak(map, self.object()?)
    }

    pub fn homogeneous_spec(&self) -> Result<MediumSpec> {
        MediumSpec::homogeneous(self.dimension)
    }
}

/// One sweep sample: exterior discrepancy at `(epsilon, omega)` next to the
/// theoretical near-invisibility envelope for that point.
#[derive(Debug, Clone, Copy)]
pub struct VisibilityRecord {
    pub epsilon: f64,
    pub omega: f64,
    pub err_l2: f64,
    pub err_h1: f64,
    pub envelope: f64,
}

#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub records: Vec<VisibilityRecord>,
    /// Human-readable notes for points that failed; the sweep continues
    /// past individual failures.
    pub failures: Vec<String>,
}

fn radial_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let source = cfg.source()?;
    let homog_spec = cfg.homogeneous_spec()?;
    let per_eps: Vec<(Vec<VisibilityRecord>, Vec<String>)> = cfg
        .epsilons
        .par_iter()
        .map(|&eps| {
            let mut records = Vec::new();
            let mut failures = Vec::new();
            let built = (|| -> Result<(RadialFrequencySolver, RadialFrequencySolver)> {
                let grid = RadialGrid::graded(cfg.dimension, eps, 4.0)?;
                let cloak = RadialFrequencySolver::new(grid.clone(), &cfg.cloak_spec(eps)?)?;
                let homog = RadialFrequencySolver::new(grid, &homog_spec)?;
                Ok((cloak, homog))
            })();
            match built {
                Err(e) => failures.push(format!("epsilon {eps}: {e}")),
                Ok((cloak, homog)) => {
                    for &omega in &cfg.omegas {
                        match radial_visibility(
                            &cloak,
                            &homog,
                            omega,
                            &|r| source.spatial_radial(r),
                            cfg.r_obs,
                        ) {
                            Ok(vis) => records.push(VisibilityRecord {
                                epsilon: eps,
                                omega,
                                err_l2: vis.err_l2,
                                err_h1: vis.err_h1,
                                envelope: rate_frequency(eps, omega, cfg.dimension)
                                    .unwrap_or(f64::NAN),
                            }),
                            Err(e) => {
                                failures.push(format!("epsilon {eps} omega {omega}: {e}"))
                            }
                        }
                    }
                }
            }
            (records, failures)
        })
        .collect();
    let mut out = SweepOutcome::default();
    for (records, failures) in per_eps {
        out.records.extend(records);
        out.failures.extend(failures);
    }
    Ok(out)
}

fn planar_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let source = cfg.source()?;
    let grid = Grid2D::standard(cfg.nx)?;
    let homog = FrequencySolver::new(&grid, &cfg.homogeneous_spec()?)?;
    let per_eps: Vec<(Vec<VisibilityRecord>, Vec<String>)> = cfg
        .epsilons
        .par_iter()
        .map(|&eps| {
            let mut records = Vec::new();
            let mut failures = Vec::new();
            match cfg
                .cloak_spec(eps)
                .and_then(|spec| FrequencySolver::new(&grid, &spec))
            {
                Err(e) => failures.push(format!("epsilon {eps}: {e}")),
                Ok(cloak) => {
                    for &omega in &cfg.omegas {
                        match grid_visibility(
                            &cloak,
                            &homog,
                            omega,
                            &|x, y| source.spatial2(x, y),
                            cfg.r_obs,
                        ) {
                            Ok(vis) => records.push(VisibilityRecord {
                                epsilon: eps,
                                omega,
                                err_l2: vis.err_l2,
                                err_h1: vis.err_h1,
                                envelope: rate_frequency(eps, omega, cfg.dimension)
                                    .unwrap_or(f64::NAN),
                            }),
                            Err(e) => {
                                failures.push(format!("epsilon {eps} omega {omega}: {e}"))
                            }
                        }
                    }
                }
            }
            (records, failures)
        })
        .collect();
    let mut out = SweepOutcome::default();
    for (records, failures) in per_eps {
        out.records.extend(records);
        out.failures.extend(failures);
    }
    Ok(out)
}

/// Runs the frequency-domain visibility sweep over all `(epsilon, omega)`
/// pairs in the config. Individual failures are recorded, not fatal.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    match cfg.dimension {
        3 => radial_sweep(cfg),
        _ => planar_sweep(cfg),
    }
}

/// Least-squares decay fit. The regressor follows the expected law:
/// `ln err` against `ln epsilon` in 3D, against `ln(1/|ln epsilon|)` in 2D.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub n_used: usize,
}

pub fn fit_rate(dim: usize, points: &[(f64, f64)]) -> Result<RateFit> {
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidParameter(format!(
            "rate fit dimension must be 2 or 3, got {dim}"
        )));
    }
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite epsilons"));
    // the largest epsilon sits closest to the cloak boundary regime; drop it
    // when enough points remain
    if pts.len() >= 4 {
        pts.pop();
    }
    if pts.len() < 2 {
        return Err(Error::InvalidParameter(
            "rate fit needs at least two usable points".into(),
        ));
    }
    let mut xs = Vec::with_capacity(pts.len());
    let mut ys = Vec::with_capacity(pts.len());
    for &(eps, err) in &pts {
        if !(eps > 0.0 && eps < 0.5) || !(err > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rate fit point ({eps}, {err}) out of range"
            )));
        }
        let x = match dim {
            3 => eps.ln(),
            _ => -eps.ln().abs().ln(),
        };
        xs.push(x);
        ys.push(err.ln());
    }
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-14 {
        return Err(Error::InvalidParameter(
            "rate fit abscissas are degenerate".into(),
        ));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let d = y - (slope * x + intercept);
            d * d
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(RateFit {
        slope,
        intercept,
        residual,
        n_used: xs.len(),
    })
}

/// Fits the decay of `err_h1` against epsilon for the records at one omega.
pub fn fit_sweep(dim: usize, records: &[VisibilityRecord], omega: f64) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.omega == omega)
        .map(|r| (r.epsilon, r.err_h1))
        .collect();
    fit_rate(dim, &pts)
}

fn fmt_num(x: f64) -> String {
    format!("{x:.12e}")
}

/// `ix,iy,x,y,re,im` rows over every node, row-major from the bottom edge.
pub fn field_csv(grid: &Grid2D, full: &[Complex64]) -> Result<String> {
    if full.len() != grid.node_count() {
        return Err(Error::GridMismatch(format!(
            "field has {} values for {} nodes",
            full.len(),
            grid.node_count()
        )));
    }
    let mut out = String::with_capacity(full.len() * 64);
    out.push_str("ix,iy,x,y,re,im\n");
    for iy in 0..=grid.nx() {
        for ix in 0..=grid.nx() {
            let (x, y) = grid.node_coord(ix, iy);
            let v = full[grid.node_index(ix, iy)];
            let _ = writeln!(
                out,
                "{ix},{iy},{},{},{},{}",
                fmt_num(x),
                fmt_num(y),
                fmt_num(v.re),
                fmt_num(v.im)
            );
        }
    }
    Ok(out)
}

/// `time,normL2,normH1` rows.
pub fn series_csv(times: &[f64], l2: &[f64], h1: &[f64]) -> Result<String> {
    if times.len() != l2.len() || times.len() != h1.len() {
        return Err(Error::GridMismatch("series columns differ in length".into()));
    }
    let mut out = String::from("time,normL2,normH1\n");
    for i in 0..times.len() {
        let _ = writeln!(out, "{},{},{}", fmt_num(times[i]), fmt_num(l2[i]), fmt_num(h1[i]));
    }
    Ok(out)
}

/// `epsilon,omega,errL2,errH1,envelope` rows.
pub fn sweep_csv(records: &[VisibilityRecord]) -> String {
    let mut out = String::from("epsilon,omega,errL2,errH1,envelope\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(r.epsilon),
            fmt_num(r.omega),
            fmt_num(r.err_l2),
            fmt_num(r.err_h1),
            fmt_num(r.envelope)
        );
    }
    out
}

/// `omega,errL2,errH1` rows, the per-frequency response at fixed epsilon.
pub fn response_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("omega,errL2,errH1\n");
    for &(omega, l2, h1) in rows {
        let _ = writeln!(out, "{},{},{}", fmt_num(omega), fmt_num(l2), fmt_num(h1));
    }
    out
}

/// Key-value report with stable field order, rendered as a JSON object.
#[derive(Debug, Default)]
pub struct Report {
    pairs: Vec<(String, serde_json::Value)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.pairs.push((key.to_string(), value.into()));
    }

    pub fn render(&self) -> String {
        let mut out = String::from("{\n");
        for (i, (k, v)) in self.pairs.iter().enumerate() {
            let key = serde_json::Value::String(k.clone());
            let sep = if i + 1 == self.pairs.len() { "" } else { "," };
            let _ = writeln!(out, "  {}: {}{}", key, v, sep);
        }
        out.push_str("}\n");
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.render())
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
# radial decay sweep
dimension = 3
epsilons = 0.04, 0.08, 0.16
omegas = 1.0, 4.0
nx = 64
t_final = 0.5
dt = 0.005
object.tensor = 2.0
object.density = 3.0
source.center = 3.0, 0.0, 0.0
source.width = 0.3
r_obs = 2.0
out_dir = out/test
";

    #[test]
    fn parses_flat_config() {
        let cfg = SweepConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.dimension, 3);
        assert_eq!(cfg.epsilons, vec![0.04, 0.08, 0.16]);
        assert_eq!(cfg.omegas, vec![1.0, 4.0]);
        assert_eq!(cfg.nx, 64);
        assert_eq!(cfg.source_center, vec![3.0, 0.0, 0.0]);
        assert_eq!(cfg.out_dir, PathBuf::from("out/test"));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(SweepConfig::parse("dimension = 4").is_err());
        assert!(SweepConfig::parse("frequency = 1").is_err());
        assert!(SweepConfig::parse("epsilons = 0.6").is_err());
        assert!(SweepConfig::parse("dimension = 2\nnx = 50").is_err());
        assert!(SweepConfig::parse("r_obs = 1.0").is_err());
        assert!(SweepConfig::parse("source.center = 1.0, 0.0, 0.0").is_err());
        assert!(SweepConfig::parse("omegas = -1").is_err());
        assert!(SweepConfig::parse("dimension").is_err());
        // 2D default source center adapts to the dimension
        let cfg = SweepConfig::parse("dimension = 2\nnx = 64").unwrap();
        assert_eq!(cfg.source_center.len(), 2);
    }

    #[test]
    fn synthetic_rate_fit_is_exact() {
        let pts: Vec<(f64, f64)> = [0.02, 0.04, 0.08, 0.16]
            .iter()
            .map(|&e| (e, 0.7 * e))
            .collect();
        let fit = fit_rate(3, &pts).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-10, "slope {}", fit.slope);
        assert!((fit.intercept - 0.7f64.ln()).abs() < 1e-10);
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.n_used, 3); // largest epsilon dropped

        let pts2: Vec<(f64, f64)> = [0.02, 0.05, 0.1]
            .iter()
            .map(|&e: &f64| (e, 0.5 / e.ln().abs()))
            .collect();
        let fit2 = fit_rate(2, &pts2).unwrap();
        assert!((fit2.slope - 1.0).abs() < 1e-10, "slope {}", fit2.slope);
        assert_eq!(fit2.n_used, 3); // fewer than four points, all kept

        assert!(fit_rate(3, &[(0.1, 1.0)]).is_err());
        assert!(fit_rate(3, &[(0.1, 0.0), (0.2, 1.0)]).is_err());
    }

    #[test]
    fn radial_sweep_records_and_determinism() {
        let mut cfg = SweepConfig::parse(SAMPLE).unwrap();
        cfg.epsilons = vec![0.05, 0.1];
        cfg.omegas = vec![1.0, 2.0];
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert!(a.failures.is_empty(), "failures: {:?}", a.failures);
        assert_eq!(a.records.len(), 4);
        // records ordered by (epsilon index, omega index)
        assert_eq!(a.records[0].epsilon, 0.05);
        assert_eq!(a.records[0].omega, 1.0);
        assert_eq!(a.records[3].epsilon, 0.1);
        assert_eq!(a.records[3].omega, 2.0);
        // smaller epsilon hides better at fixed omega
        assert!(a.records[0].err_h1 < a.records[2].err_h1);
        assert!(a.records.iter().all(|r| r.envelope.is_finite()));
        let csv_a = sweep_csv(&a.records);
        let csv_b = sweep_csv(&b.records);
        assert_eq!(csv_a, csv_b, "sweep output must be reproducible");
        assert!(csv_a.starts_with("epsilon,omega,errL2,errH1,envelope\n"));
    }

    #[test]
    fn csv_shapes() {
        let grid = Grid2D::new(2, 1.0).unwrap();
        let full = vec![Complex64::new(1.0, -1.0); grid.node_count()];
        let text = field_csv(&grid, &full).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "ix,iy,x,y,re,im");
        assert_eq!(text.lines().count(), 1 + 9);
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "0");
        assert_eq!(row[1], "0");
        assert_eq!(row[2], "-1.000000000000e0");

        let series = series_csv(&[0.0, 0.5], &[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert!(series.starts_with("time,normL2,normH1\n"));
        assert_eq!(series.lines().count(), 3);
        assert!(series_csv(&[0.0], &[1.0, 2.0], &[3.0]).is_err());

        let resp = response_csv(&[(1.0, 0.5, 0.7)]);
        assert!(resp.starts_with("omega,errL2,errH1\n"));
    }

    #[test]
    fn report_preserves_insertion_order() {
        let mut r = Report::new();
        r.push("zeta", 1.5);
        r.push("alpha", "text");
        r.push("count", 3);
        r.push("list", vec![1.0, 2.0]);
        let s = r.render();
        let zeta = s.find("\"zeta\"").unwrap();
        let alpha = s.find("\"alpha\"").unwrap();
        let count = s.find("\"count\"").unwrap();
        assert!(zeta < alpha && alpha < count);
        let parsed: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(parsed["count"], 3);
        assert_eq!(parsed["list"][1], 2.0);
    }
}
