//! Frequency-integral pipeline: quadrature grids over omega, the forward
//! and inverse transforms between time series and spectra, and time-domain
//! synthesis from per-frequency solves.
//!
//! Conventions: `uhat(omega) = (1/sqrt(2 pi)) int_0^inf u(t) e^{i omega t} dt`
//! for signals vanishing on `t < 0`; real signals are recovered from the
//! positive half axis by `u(t) = sqrt(2/pi) Re int_0^inf uhat e^{-i omega t}`.

use num_complex::Complex64;

use crate::heat::{Envelope, TimeVisibility};
use crate::helmholtz::FrequencySolver;
use crate::{grid2d, Error, Result};

/// Quadrature nodes and trapezoid weights on `[0, omega_max]`.
#[derive(Debug, Clone)]
pub struct OmegaGrid {
    omegas: Vec<f64>,
    weights: Vec<f64>,
}

fn trapezoid_weights(omegas: &[f64]) -> Vec<f64> {
    let n = omegas.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let half = 0.5 * (omegas[i + 1] - omegas[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    w
}

impl OmegaGrid {
    pub fn from_omegas(omegas: Vec<f64>) -> Result<Self> {
        if omegas.len() < 2 {
            return Err(Error::InvalidParameter("need at least two frequencies".into()));
        }
        if omegas[0] < 0.0 {
            return Err(Error::InvalidParameter("frequencies must be nonnegative".into()));
        }
        if !omegas.windows(2).all(|p| p[1] > p[0]) {
            return Err(Error::InvalidParameter(
                "frequencies must be strictly increasing".into(),
            ));
        }
        let weights = trapezoid_weights(&omegas);
        Ok(Self { omegas, weights })
    }

    pub fn uniform(omega_max: f64, intervals: usize) -> Result<Self> {
        if !(omega_max > 0.0) || intervals < 1 {
            return Err(Error::InvalidParameter("bad uniform frequency grid".into()));
        }
        let omegas = (0..=intervals)
            .map(|i| omega_max * i as f64 / intervals as f64)
            .collect();
        Self::from_omegas(omegas)
    }

    /// Default sweep grid: dense geometric resolution below 1, linear
    /// steps of 0.4 through the resonant band up to 16, then four points
    /// per octave out to `omega_max`.
    pub fn composite(omega_max: f64) -> Result<Self> {
        if !(omega_max >= 16.0) {
            return Err(Error::InvalidParameter(format!(
                "composite grid wants omega_max >= 16, got {omega_max}"
            )));
        }
        let mut omegas = vec![0.0];
        for i in 0..=20 {
            omegas.push(0.01 * (100.0f64).powf(i as f64 / 20.0));
        }
        let mut w = 1.0 + 0.4;
        while w < 16.0 - 1e-9 {
            omegas.push(w);
            w += 0.4;
        }
        omegas.push(16.0);
        let octaves = (omega_max / 16.0).log2();
        let pts = (octaves * 4.0).round().max(1.0) as usize;
        for i in 1..=pts {
            omegas.push(16.0 * (omega_max / 16.0).powf(i as f64 / pts as f64));
        }
        Self::from_omegas(omegas)
    }

    /// Geometric grid with `per_octave` points per doubling from 1/64 up to
    /// `omega_max`, prefixed by zero. Reaches large omega cheaply when the
    /// spectrum carries a slow tail.
    pub fn pow2(omega_max: f64, per_octave: usize) -> Result<Self> {
        if !(omega_max > 0.03125) || per_octave == 0 {
            return Err(Error::InvalidParameter("bad pow2 frequency grid".into()));
        }
        let lo = 0.015625f64;
        let octaves = (omega_max / lo).log2();
        let pts = (octaves * per_octave as f64).ceil() as usize;
        let mut omegas = vec![0.0];
        for i in 0..=pts {
            omegas.push(lo * (omega_max / lo).powf(i as f64 / pts as f64));
        }
        Self::from_omegas(omegas)
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn omega_max(&self) -> f64 {
        *self.omegas.last().expect("nonempty")
    }
}

/// Trapezoid transform of a sampled real signal on a uniform time grid.
pub fn time_to_frequency(times: &[f64], values: &[f64], omegas: &[f64]) -> Result<Vec<Complex64>> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::GridMismatch("mismatched time series".into()));
    }
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut out = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..times.len() - 1 {
            let dt = times[i + 1] - times[i];
            let f0 = Complex64::from_polar(values[i], omega * times[i]);
            let f1 = Complex64::from_polar(values[i + 1], omega * times[i + 1]);
            acc += (f0 + f1) * (0.5 * dt);
        }
        out.push(acc * norm);
    }
    Ok(out)
}

/// Inverse transform of a real signal's spectrum at a single time.
pub fn frequency_to_time(grid: &OmegaGrid, uhat: &[Complex64], t: f64) -> Result<f64> {
    if uhat.len() != grid.len() {
        return Err(Error::GridMismatch("spectrum length".into()));
    }
    let scale = (2.0 / std::f64::consts::PI).sqrt();
    let mut acc = 0.0;
    for ((&omega, &w), &u) in grid.omegas().iter().zip(grid.weights()).zip(uhat) {
        acc += w * (u * Complex64::from_polar(1.0, -omega * t)).re;
    }
    Ok(scale * acc)
}

/// Time-domain fields reconstructed from per-frequency solves.
pub struct Synthesis {
    pub times: Vec<f64>,
    pub fields: Vec<Vec<f64>>,
    /// Scale of the spectrum at the last node; the omitted tail beyond
    /// `omega_max` is of order `spectrum_edge / (pi t)` per unit field.
    pub spectrum_edge: f64,
}

fn solve_at(
    solver: &FrequencySolver,
    omega: f64,
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    if omega == 0.0 {
        let re: Vec<f64> = rhs.iter().map(|z| z.re).collect();
        let im: Vec<f64> = rhs.iter().map(|z| z.im).collect();
        let (ur, _) = solver.solve_stationary(&re)?;
        let (ui, _) = solver.solve_stationary(&im)?;
        Ok(ur
            .into_iter()
            .zip(ui)
            .map(|(a, b)| Complex64::new(a, b))
            .collect())
    } else {
        Ok(solver.solve(omega, rhs)?.0)
    }
}

/// Builds the frequency-domain right-hand side at `omega`: the modulated
/// source plus the initial-data impulse `M u0 / sqrt(2 pi)`.
fn frequency_rhs(
    solver: &FrequencySolver,
    omega: f64,
    load: &[f64],
    envelope: &Envelope,
    u0: Option<&[f64]>,
) -> Vec<Complex64> {
    let shat = envelope.hat(omega);
    let mut rhs: Vec<Complex64> = load.iter().map(|&v| shat * v).collect();
    if let Some(u0) = u0 {
        let (_, m) = solver.hierarchy().fine_matrices();
        let mu = m.matvec(u0);
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        for (r, v) in rhs.iter_mut().zip(mu) {
            *r += Complex64::new(norm * v, 0.0);
        }
    }
    rhs
}

/// Reconstructs `u(t)` at the query times by quadrature over per-frequency
/// solves, reusing one hierarchy across the whole grid. Frequencies are
/// processed in order, so the accumulation is deterministic.
pub fn synthesize_time_solution(
    solver: &FrequencySolver,
    og: &OmegaGrid,
    load: &[f64],
    envelope: &Envelope,
    u0: Option<&[f64]>,
    times: &[f64],
) -> Result<Synthesis> {
    let n = solver.grid().interior_count();
    if load.len() != n || u0.map_or(false, |v| v.len() != n) {
        return Err(Error::GridMismatch("synthesis vectors sized to interior".into()));
    }
    if times.iter().any(|&t| t <= 0.0) {
        return Err(Error::InvalidParameter(
            "synthesis times must be positive".into(),
        ));
    }
    let scale = (2.0 / std::f64::consts::PI).sqrt();
    let mut fields = vec![vec![0.0f64; n]; times.len()];
    let mut spectrum_edge = 0.0;
    for ((&omega, &w), is_last) in og
        .omegas()
        .iter()
        .zip(og.weights())
        .zip((0..og.len()).map(|i| i + 1 == og.len()))
    {
        let rhs = frequency_rhs(solver, omega, load, envelope, u0);
        let uhat = solve_at(solver, omega, &rhs)?;
        if is_last {
            spectrum_edge = uhat.iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        for (field, &t) in fields.iter_mut().zip(times) {
            let rot = Complex64::from_polar(scale * w, -omega * t);
            for (f, &u) in field.iter_mut().zip(&uhat) {
                *f += (u * rot).re;
            }
        }
    }
    Ok(Synthesis {
        times: times.to_vec(),
        fields,
        spectrum_edge,
    })
}

/// Visibility curve computed entirely in the frequency domain: the cloaked
/// and homogeneous spectra are differenced per frequency and the exterior
/// norms of the synthesized difference are reported per query time.
#[allow(clippy::too_many_arguments)]
pub fn visibility_curve_frequency(
    cloak: &FrequencySolver,
    homog: &FrequencySolver,
    og: &OmegaGrid,
    load: &[f64],
    envelope: &Envelope,
    times: &[f64],
    r_obs: f64,
) -> Result<TimeVisibility> {
    let grid = cloak.grid();
    if grid.nx() != homog.grid().nx() || grid.half() != homog.grid().half() {
        return Err(Error::GridMismatch("visibility solvers use different grids".into()));
    }
    if r_obs < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "observation radius must be >= 2, got {r_obs}"
        )));
    }
    let n = grid.interior_count();
    if load.len() != n {
        return Err(Error::GridMismatch("load sized to interior".into()));
    }
    let scale = (2.0 / std::f64::consts::PI).sqrt();
    let mut diffs = vec![vec![0.0f64; n]; times.len()];
    for (&omega, &w) in og.omegas().iter().zip(og.weights()) {
        let rhs = frequency_rhs(cloak, omega, load, envelope, None);
        let uc = solve_at(cloak, omega, &rhs)?;
        let uh = solve_at(homog, omega, &rhs)?;
        for (field, &t) in diffs.iter_mut().zip(times) {
            let rot = Complex64::from_polar(scale * w, -omega * t);
            for (f, (&a, &b)) in field.iter_mut().zip(uc.iter().zip(&uh)) {
                *f += ((a - b) * rot).re;
            }
        }
    }
    let mask = grid.cells_in(|x, y| x.hypot(y) >= r_obs);
    let mut out = TimeVisibility {
        times: times.to_vec(),
        err_l2: Vec::with_capacity(times.len()),
        err_h1: Vec::with_capacity(times.len()),
        sup_l2: 0.0,
        sup_h1: 0.0,
    };
    for field in &diffs {
        let full = grid2d::scatter(grid, field);
        let (l2, h1) = grid2d::norms(grid, &full, &mask)?;
        out.err_l2.push(l2);
        out.err_h1.push(h1);
        out.sup_l2 = out.sup_l2.max(l2);
        out.sup_h1 = out.sup_h1.max(h1);
    }
    Ok(out)
}
