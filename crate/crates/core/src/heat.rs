//! Time-domain parabolic solves: `rho du/dt = div(A grad u) + s(t) g(x)`
//! with homogeneous Dirichlet walls, marched implicitly. The same march
//! drives 2D grids (multigrid-preconditioned CG per step) and radial
//! profiles (direct tridiagonal per step).

use num_complex::Complex64;

use crate::grid2d;
use crate::radial::{norms_radial, pin_node, RadialGrid};
use crate::solver::{cg, combine_tridiag, MgHierarchy, Tridiag};
use crate::{Error, Result};

/// Relative CG tolerance per implicit step.
const STEP_TOL: f64 = 1e-10;
const STEP_MAX_ITER: usize = 400;

/// Uniform step partition of `[0, t_final]`; the step count must tile the
/// horizon exactly.
#[derive(Debug, Clone, Copy)]
pub struct TimeGrid {
    t_final: f64,
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, dt: f64) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "time grid needs positive horizon and step, got {t_final}, {dt}"
            )));
        }
        let steps = (t_final / dt).round() as usize;
        if steps == 0 || ((steps as f64) * dt - t_final).abs() > 1e-12 * t_final {
            return Err(Error::InvalidParameter(format!(
                "step {dt} does not tile horizon {t_final}"
            )));
        }
        Ok(Self { t_final, dt, steps })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self, step: usize) -> f64 {
        if step == self.steps {
            self.t_final
        } else {
            step as f64 * self.dt
        }
    }
}

/// Temporal modulation of the source, `s(t)` for `t >= 0`, zero before.
#[derive(Debug, Clone, Copy)]
pub enum Envelope {
    /// `1` on `[0, duration]`, `0` after.
    Indicator { duration: f64 },
    /// `e^{-t}`.
    Exp,
    /// `exp(-((t - center)/width)^2)`; the bump must sit well inside
    /// `t > 0` so its transform has a clean closed form.
    Gaussian { center: f64, width: f64 },
}

impl Envelope {
    pub fn indicator(duration: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "indicator duration must be positive, got {duration}"
            )));
        }
        Ok(Self::Indicator { duration })
    }

    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidParameter("bad gaussian envelope".into()));
        }
        if center < 5.0 * width {
            return Err(Error::InvalidParameter(format!(
                "gaussian envelope must be separated from t = 0: center {center} < 5 width {width}"
            )));
        }
        Ok(Self::Gaussian { center, width })
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match *self {
            Self::Indicator { duration } => {
                if t <= duration {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Exp => (-t).exp(),
            Self::Gaussian { center, width } => {
                let z = (t - center) / width;
                (-z * z).exp()
            }
        }
    }

    /// One-sided transform `(1/sqrt(2 pi)) int_0^inf s(t) e^{i omega t} dt`.
    pub fn hat(&self, omega: f64) -> Complex64 {
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        match *self {
            Self::Indicator { duration } => {
                if omega.abs() < 1e-12 {
                    Complex64::new(norm * duration, 0.0)
                } else {
                    // (e^{i omega T} - 1) / (i omega)
                    let e = Complex64::new(0.0, omega * duration).exp();
                    (e - Complex64::new(1.0, 0.0)) / Complex64::new(0.0, omega) * norm
                }
            }
            Self::Exp => norm / Complex64::new(1.0, -omega),
            Self::Gaussian { center, width } => {
                // full-line formula; the ctor keeps the truncated tail below 1e-11
                let w = width;
                let phase = Complex64::new(-omega * omega * w * w / 4.0, omega * center).exp();
                phase * (w / std::f64::consts::SQRT_2)
            }
        }
    }
}

/// Source description shared by the time and frequency pipelines: a spatial
/// Gaussian bump clipped to the cloak exterior `|x| > 2`, modulated by the
/// envelope.
#[derive(Clone)]
pub struct SourceSpec {
    pub center: Vec<f64>,
    pub width: f64,
    pub envelope: Envelope,
}

impl SourceSpec {
    pub fn new(center: Vec<f64>, width: f64, envelope: Envelope) -> Result<Self> {
        if center.len() != 2 && center.len() != 3 {
            return Err(Error::InvalidParameter(format!(
                "source center must be 2 or 3 dimensional, got {}",
                center.len()
            )));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "source width must be positive, got {width}"
            )));
        }
        let r: f64 = center.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r <= 2.0 {
            return Err(Error::InvalidParameter(format!(
                "source center must lie outside the cloak, |c| = {r}"
            )));
        }
        Ok(Self {
            center,
            width,
            envelope,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Planar profile `exp(-|x - c|^2 / width^2)` on `|x| > 2`, else zero.
    pub fn spatial2(&self, x: f64, y: f64) -> f64 {
        if x.hypot(y) <= 2.0 {
            return 0.0;
        }
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        (-(dx * dx + dy * dy) / (self.width * self.width)).exp()
    }

    /// Radial shell profile `exp(-(r - |c|)^2 / width^2)` on `r > 2`.
    pub fn spatial_radial(&self, r: f64) -> f64 {
        if r <= 2.0 {
            return 0.0;
        }
        let rc: f64 = self.center.iter().map(|c| c * c).sum::<f64>().sqrt();
        let d = r - rc;
        (-d * d / (self.width * self.width)).exp()
    }
}

/// Implicit stepping scheme; `theta` weights the stiffness at the new level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    BackwardEuler,
    CrankNicolson,
}

impl Scheme {
    fn theta(self) -> f64 {
        match self {
            Self::BackwardEuler => 1.0,
            Self::CrankNicolson => 0.5,
        }
    }

    /// Envelope sampling time for the step ending at `t1`.
    fn source_time(self, t1: f64, dt: f64) -> f64 {
        match self {
            Self::BackwardEuler => t1,
            Self::CrankNicolson => t1 - 0.5 * dt,
        }
    }
}

/// Marches `M u' + K u = s(t) load` from `u0` over interior nodes.
/// `observe` fires at step 0 with the initial data and after every step.
/// Returns the final field.
pub fn march(
    hier: &MgHierarchy,
    tg: &TimeGrid,
    scheme: Scheme,
    u0: &[f64],
    load: &[f64],
    s: &dyn Fn(f64) -> f64,
    mut observe: impl FnMut(usize, f64, &[f64]),
) -> Result<Vec<f64>> {
    let (k, m) = hier.fine_matrices();
    let n = k.nrows();
    if u0.len() != n || load.len() != n {
        return Err(Error::GridMismatch(format!(
            "march needs interior vectors of length {n}"
        )));
    }
    let dt = tg.dt();
    let theta = scheme.theta();
    let pc = hier.shifted(theta * dt, 1.0)?;
    let mut u = u0.to_vec();
    observe(0, 0.0, &u);
    let mut rhs = vec![0.0f64; n];
    for step in 1..=tg.steps() {
        let t1 = tg.time(step);
        let sv = s(scheme.source_time(t1, dt));
        let mu = m.matvec(&u);
        let ku = k.matvec(&u);
        for i in 0..n {
            rhs[i] = mu[i] - (1.0 - theta) * dt * ku[i] + dt * sv * load[i];
        }
        let (next, _) = cg(pc.operator(), &rhs, &pc, STEP_TOL, STEP_MAX_ITER)?;
        u = next;
        observe(step, t1, &u);
    }
    Ok(u)
}

/// Radial counterpart of `march`; the outer node is pinned to zero.
pub fn march_radial(
    grid: &RadialGrid,
    k: &Tridiag<f64>,
    m: &Tridiag<f64>,
    tg: &TimeGrid,
    scheme: Scheme,
    u0: &[f64],
    load: &[f64],
    s: &dyn Fn(f64) -> f64,
    mut observe: impl FnMut(usize, f64, &[f64]),
) -> Result<Vec<f64>> {
    let n = grid.node_count();
    if k.n() != n || m.n() != n || u0.len() != n || load.len() != n {
        return Err(Error::GridMismatch(format!(
            "radial march needs node vectors of length {n}"
        )));
    }
    let dt = tg.dt();
    let theta = scheme.theta();
    let mut sys = combine_tridiag(k, theta * dt, m, 1.0)?;
    let mut dummy = vec![0.0f64; n];
    pin_node(&mut sys, &mut dummy, n - 1, 0.0);
    let mut u = u0.to_vec();
    u[n - 1] = 0.0;
    observe(0, 0.0, &u);
    let mut rhs = vec![0.0f64; n];
    for step in 1..=tg.steps() {
        let t1 = tg.time(step);
        let sv = s(scheme.source_time(t1, dt));
        let mu = m.matvec(&u);
        let ku = k.matvec(&u);
        for i in 0..n {
            rhs[i] = mu[i] - (1.0 - theta) * dt * ku[i] + dt * sv * load[i];
        }
        rhs[n - 1] = 0.0;
        u = sys.solve(&rhs)?;
        observe(step, t1, &u);
    }
    Ok(u)
}

/// Exterior discrepancy history between two media driven by the same source.
#[derive(Debug, Clone)]
pub struct TimeVisibility {
    pub times: Vec<f64>,
    pub err_l2: Vec<f64>,
    pub err_h1: Vec<f64>,
    pub sup_l2: f64,
    pub sup_h1: f64,
}

/// Step-locked dual march on a shared 2D grid: both problems advance with
/// the same scheme and step, and the difference is measured on cells outside
/// `r_obs` every `stride` steps (and at the final time).
pub fn time_visibility(
    cloak: &MgHierarchy,
    homog: &MgHierarchy,
    tg: &TimeGrid,
    scheme: Scheme,
    stride: usize,
    load: &[f64],
    s: &dyn Fn(f64) -> f64,
    r_obs: f64,
) -> Result<TimeVisibility> {
    let grid = cloak.fine_grid();
    if grid.nx() != homog.fine_grid().nx() || grid.half() != homog.fine_grid().half() {
        return Err(Error::GridMismatch("visibility marches use different grids".into()));
    }
    if r_obs < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "observation radius must be >= 2, got {r_obs}"
        )));
    }
    let stride = stride.max(1);
    let record = |step: usize| step > 0 && (step % stride == 0 || step == tg.steps());
    let mut kept: Vec<(usize, Vec<f64>)> = Vec::new();
    let zero = vec![0.0f64; load.len()];
    march(cloak, tg, scheme, &zero, load, s, |step, _, u| {
        if record(step) {
            kept.push((step, u.to_vec()));
        }
    })?;
    let mask = grid.cells_in(|x, y| x.hypot(y) >= r_obs);
    let mut out = TimeVisibility {
        times: Vec::new(),
        err_l2: Vec::new(),
        err_h1: Vec::new(),
        sup_l2: 0.0,
        sup_h1: 0.0,
    };
    let mut idx = 0usize;
    march(homog, tg, scheme, &zero, load, s, |step, t, u| {
        if record(step) {
            let (kept_step, cloak_u) = &kept[idx];
            debug_assert_eq!(*kept_step, step);
            idx += 1;
            let diff: Vec<f64> = cloak_u.iter().zip(u).map(|(a, b)| a - b).collect();
            let full = grid2d::scatter(grid, &diff);
            let (l2, h1) = grid2d::norms(grid, &full, &mask).expect("nonempty exterior");
            out.times.push(t);
            out.err_l2.push(l2);
            out.err_h1.push(h1);
            out.sup_l2 = out.sup_l2.max(l2);
            out.sup_h1 = out.sup_h1.max(h1);
        }
    })?;
    Ok(out)
}

/// Radial version of `time_visibility` on a shared grid.
#[allow(clippy::too_many_arguments)]
pub fn time_visibility_radial(
    grid: &RadialGrid,
    cloak: (&Tridiag<f64>, &Tridiag<f64>),
    homog: (&Tridiag<f64>, &Tridiag<f64>),
    tg: &TimeGrid,
    scheme: Scheme,
    stride: usize,
    load: &[f64],
    s: &dyn Fn(f64) -> f64,
    r_obs: f64,
) -> Result<TimeVisibility> {
    if r_obs < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "observation radius must be >= 2, got {r_obs}"
        )));
    }
    let stride = stride.max(1);
    let record = |step: usize| step > 0 && (step % stride == 0 || step == tg.steps());
    let zero = vec![0.0f64; grid.node_count()];
    let mut kept: Vec<(usize, Vec<f64>)> = Vec::new();
    march_radial(grid, cloak.0, cloak.1, tg, scheme, &zero, load, s, |step, _, u| {
        if record(step) {
            kept.push((step, u.to_vec()));
        }
    })?;
    let mask = grid.cells_in(|r| r >= r_obs);
    let mut out = TimeVisibility {
        times: Vec::new(),
        err_l2: Vec::new(),
        err_h1: Vec::new(),
        sup_l2: 0.0,
        sup_h1: 0.0,
    };
    let mut idx = 0usize;
    march_radial(grid, homog.0, homog.1, tg, scheme, &zero, load, s, |step, t, u| {
        if record(step) {
            let (kept_step, cloak_u) = &kept[idx];
            debug_assert_eq!(*kept_step, step);
            idx += 1;
            let diff: Vec<f64> = cloak_u.iter().zip(u).map(|(a, b)| a - b).collect();
            let (l2, h1) = norms_radial(grid, &diff, &mask).expect("nonempty exterior");
            out.times.push(t);
            out.err_l2.push(l2);
            out.err_h1.push(h1);
            out.sup_l2 = out.sup_l2.max(l2);
            out.sup_h1 = out.sup_h1.max(h1);
        }
    })?;
    Ok(out)
}
