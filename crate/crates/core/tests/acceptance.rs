//! End-to-end acceptance checks. Each test prints one PASS/FAIL line with
//! the measured quantities; tolerances are fixed in the assertions.
//!
//! Everything here is rate- or property-based: the estimates being checked
//! are asymptotic with non-constructive constants, so constants are
//! calibrated from the runs themselves and only decay behavior is judged.

use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;

use thermocloak::grid2d::{self, Grid2D};
use thermocloak::harness::fit_rate;
use thermocloak::heat::{self, Envelope, Scheme, SourceSpec, TimeGrid};
use thermocloak::helmholtz::{
    grid_visibility, radial_visibility, smallest_eigenvalue, solve_radial_exterior,
    FrequencySolver, RadialFrequencySolver,
};
use thermocloak::medium::{MediumSpec, ObjectSpec};
use thermocloak::radial::{interp_radial, norms_radial, RadialGrid};
use thermocloak::solver::MgHierarchy;
use thermocloak::special::{green2d, green3d, hankel0_h1, rate_frequency, wavenumber};
use thermocloak::spectral::{synthesize_time_solution, visibility_curve_frequency, OmegaGrid};
use thermocloak::transform::BlowupMap;

fn node_field<T: thermocloak::sparse::Scalar>(
    grid: &Grid2D,
    f: impl Fn(f64, f64) -> T,
) -> Vec<T> {
    let mut full = vec![T::zero(); grid.node_count()];
    for iy in 0..=grid.nx() {
        for ix in 0..=grid.nx() {
            let (x, y) = grid.node_coord(ix, iy);
            full[grid.node_index(ix, iy)] = f(x, y);
        }
    }
    full
}

fn verdict(criterion: usize, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {criterion} ({name}): {tag} - {detail}");
    println!("{line}");
    assert!(pass, "{line}");
}

/// Exterior H1 visibility of the 3D radial cloak at `omega = 1` over the
/// standard epsilon sweep.
fn radial_h1_sweep(object: &ObjectSpec) -> Vec<(f64, f64)> {
    let source = SourceSpec::new(vec![3.0, 0.0, 0.0], 0.3, Envelope::Exp).unwrap();
    [0.02f64, 0.04, 0.08, 0.16]
        .iter()
        .map(|&eps| {
            let grid = RadialGrid::graded(3, eps, 4.0).unwrap();
            let map = BlowupMap::new(eps, 3).unwrap();
            let spec = MediumSpec::cloak(map, object.clone()).unwrap();
            let cloak = RadialFrequencySolver::new(grid.clone(), &spec).unwrap();
            let homog =
                RadialFrequencySolver::new(grid, &MediumSpec::homogeneous(3).unwrap()).unwrap();
            let vis =
                radial_visibility(&cloak, &homog, 1.0, &|r| source.spatial_radial(r), 2.0)
                    .unwrap();
            (eps, vis.err_h1)
        })
        .collect()
}

/// Exterior H1 visibility of the 2D cloak at `omega = 1`, `h = 1/96`.
fn planar_h1_sweep(object: &ObjectSpec) -> Vec<(f64, f64)> {
    let grid = Grid2D::new(768, 4.0).unwrap();
    let source = SourceSpec::new(vec![3.0, 0.0], 0.3, Envelope::Exp).unwrap();
    let homog = FrequencySolver::new(&grid, &MediumSpec::homogeneous(2).unwrap()).unwrap();
    [1.0 / 12.0, 1.0 / 24.0, 1.0 / 48.0]
        .iter()
        .map(|&eps| {
            let map = BlowupMap::new(eps, 2).unwrap();
            let spec = MediumSpec::cloak(map, object.clone()).unwrap();
            let cloak = FrequencySolver::new(&grid, &spec).unwrap();
            let vis = grid_visibility(&cloak, &homog, 1.0, &|x, y| source.spatial2(x, y), 2.0)
                .unwrap();
            (eps, vis.err_h1)
        })
        .collect()
}

fn planar_default_sweep() -> &'static [(f64, f64)] {
    static SWEEP: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    SWEEP.get_or_init(|| planar_h1_sweep(&ObjectSpec::standard(2)))
}

#[test]
fn criterion_1_3d_visibility_rate() {
    let start = Instant::now();
    let pts = radial_h1_sweep(&ObjectSpec::standard(3));
    let fit = fit_rate(3, &pts).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let pass = (0.8..=1.2).contains(&fit.slope) && elapsed < 60.0;
    verdict(
        1,
        "3D visibility rate",
        pass,
        &format!(
            "H1 slope vs ln eps = {:.4} (window [0.8, 1.2]), {} points, {elapsed:.1}s",
            fit.slope, fit.n_used
        ),
    );
}

#[test]
fn criterion_2_2d_visibility_rate() {
    let start = Instant::now();
    let pts = planar_default_sweep();
    let scaled: Vec<f64> = pts.iter().map(|&(e, v)| v * (1.0 / e).ln()).collect();
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(0.0f64, f64::max);
    let ratio = hi / lo;
    let elapsed = start.elapsed().as_secs_f64();
    let pass = ratio <= 2.0 && elapsed < 600.0;
    verdict(
        2,
        "2D visibility rate",
        pass,
        &format!(
            "errH1 * |ln eps| in [{lo:.3e}, {hi:.3e}], ratio {ratio:.3} (<= 2), {elapsed:.0}s"
        ),
    );
}

#[test]
fn criterion_3_frequency_envelope() {
    let omegas = [0.25f64, 1.0, 4.0, 16.0, 64.0];
    let mut detail = String::new();
    let mut pass = true;

    // 3D radial.
    {
        let eps = 0.05;
        let grid = RadialGrid::graded(3, eps, 4.0).unwrap();
        let source = SourceSpec::new(vec![3.0, 0.0, 0.0], 0.3, Envelope::Exp).unwrap();
        let map = BlowupMap::new(eps, 3).unwrap();
        let cloak = RadialFrequencySolver::new(
            grid.clone(),
            &MediumSpec::cloak(map, ObjectSpec::standard(3)).unwrap(),
        )
        .unwrap();
        let homog =
            RadialFrequencySolver::new(grid.clone(), &MediumSpec::homogeneous(3).unwrap())
                .unwrap();
        let g_nodes: Vec<f64> = grid.radii().iter().map(|&r| source.spatial_radial(r)).collect();
        let mask = grid.cells_in(|_| true);
        let (g_norm, _) = norms_radial(&grid, &g_nodes, &mask).unwrap();
        let bound = |w: f64| rate_frequency(eps, w, 3).unwrap() * (1.0 + w.powf(-0.5)) * g_norm;
        let errs: Vec<f64> = omegas
            .iter()
            .map(|&w| {
                radial_visibility(&cloak, &homog, w, &|r| source.spatial_radial(r), 2.0)
                    .unwrap()
                    .err_h1
            })
            .collect();
        let c = errs[0] / bound(omegas[0]);
        let worst = omegas
            .iter()
            .zip(&errs)
            .skip(1)
            .map(|(&w, &e)| e / (c * bound(w)))
            .fold(0.0f64, f64::max);
        pass &= worst <= 1.0;
        detail.push_str(&format!("3D: C = {c:.3e}, worst err/bound = {worst:.3}; "));
    }

    // 2D grid; omega = 1/4 calibrates the low-frequency branch, the rest
    // run on the high branch.
    {
        let eps = 0.1;
        let grid = Grid2D::new(256, 4.0).unwrap();
        let source = SourceSpec::new(vec![3.0, 0.0], 0.3, Envelope::Exp).unwrap();
        let map = BlowupMap::new(eps, 2).unwrap();
        let cloak = FrequencySolver::new(
            &grid,
            &MediumSpec::cloak(map, ObjectSpec::standard(2)).unwrap(),
        )
        .unwrap();
        let homog = FrequencySolver::new(&grid, &MediumSpec::homogeneous(2).unwrap()).unwrap();
        let g_full = node_field(&grid, |x, y| source.spatial2(x, y));
        let mask = grid.cells_in(|_, _| true);
        let (g_norm, _) = grid2d::norms(&grid, &g_full, &mask).unwrap();
        let bound = |w: f64| rate_frequency(eps, w, 2).unwrap() * (1.0 + w.powf(-0.5)) * g_norm;
        let errs: Vec<f64> = omegas
            .iter()
            .map(|&w| {
                grid_visibility(&cloak, &homog, w, &|x, y| source.spatial2(x, y), 2.0)
                    .unwrap()
                    .err_h1
            })
            .collect();
        let c = errs[0] / bound(omegas[0]);
        let worst = omegas
            .iter()
            .zip(&errs)
            .skip(1)
            .map(|(&w, &e)| e / (c * bound(w)))
            .fold(0.0f64, f64::max);
        pass &= worst <= 1.0;
        detail.push_str(&format!("2D: C = {c:.3e}, worst err/bound = {worst:.3}"));
    }

    verdict(3, "frequency envelope", pass, &detail);
}

#[test]
fn criterion_4_exterior_decay() {
    // Closed-form kernels: the radiating boundary condition is exact for
    // both kernels, so only the quadratic interior error remains.
    let mut kernel_worst = 0.0f64;
    for dim in [3usize, 2] {
        let k = wavenumber(0.4, 2.0);
        let (grid, u) = solve_radial_exterior(dim, k, Complex64::new(1.0, 0.0), 15.0, 24000)
            .unwrap();
        let kernel = |r: f64| -> Complex64 {
            let g = if dim == 3 { green3d(k, r) } else { green2d(k, r) };
            g.unwrap()
        };
        let at_one = kernel(1.0);
        for &r in &[1.5, 2.5, 4.0, 8.0] {
            let exact = kernel(r) / at_one;
            let num = interp_radial(&grid, &u, r);
            kernel_worst = kernel_worst.max((num - exact).norm() / exact.norm());
        }
    }
    let kernels_ok = kernel_worst <= 1e-6;

    // Sampled decay at r = 1/(2 eps): the envelope must dominate every
    // sample up to one bounded multiple per dimension.
    let mut decay_ok = true;
    let mut cals = String::new();
    for dim in [3usize, 2] {
        let mut c_cal = 0.0f64;
        for &omega in &[1.0f64, 4.0, 16.0] {
            for &eps in &[0.05f64, 0.02, 0.01] {
                let k = wavenumber(eps, omega);
                let rstar = 1.0 / (2.0 * eps);
                let (grid, u) =
                    solve_radial_exterior(dim, k, Complex64::new(1.0, 0.0), 1.5 * rstar, 6000)
                        .unwrap();
                let v = interp_radial(&grid, &u, rstar).norm();
                let ratio = v / rate_frequency(eps, omega, dim).unwrap();
                c_cal = c_cal.max(ratio);
            }
        }
        decay_ok &= c_cal <= 5.0;
        cals.push_str(&format!("C{dim} = {c_cal:.3} "));
    }

    verdict(
        4,
        "exterior decay",
        kernels_ok && decay_ok,
        &format!(
            "kernel max rel dev {kernel_worst:.2e} (<= 1e-6); envelope multiples {cals}(each <= 5)"
        ),
    );
}

/// One cloaked-vs-blown-up comparison: marches both media on the same grid
/// and returns the relative exterior L2 difference at the final time.
fn invariance_gap(nx: usize) -> f64 {
    let eps = 0.45;
    let grid = Grid2D::new(nx, 4.0).unwrap();
    let object = ObjectSpec::standard(2);
    let map = BlowupMap::new(eps, 2).unwrap();
    let src = SourceSpec::new(vec![3.0, 0.0], 0.4, Envelope::Exp).unwrap();
    let load = grid2d::load_vector(&grid, |x, y| src.spatial2(x, y));
    let tg = TimeGrid::new(0.15, 5e-3).unwrap();
    let n = load.len();
    let env = src.envelope;
    // One hierarchy alive at a time keeps the peak footprint at nx = 1536
    // within bounds.
    let mut fields = Vec::new();
    for spec in [
        MediumSpec::cloak(map.clone(), object.clone()).unwrap(),
        MediumSpec::blownup(map.clone(), object.clone()).unwrap(),
    ] {
        let hier = MgHierarchy::build(&grid, &spec).unwrap();
        let u = heat::march(
            &hier,
            &tg,
            Scheme::CrankNicolson,
            &vec![0.0; n],
            &load,
            &|t| env.eval(t),
            |_, _, _| {},
        )
        .unwrap();
        fields.push(u);
    }
    let diff: Vec<f64> = fields[0].iter().zip(&fields[1]).map(|(a, b)| a - b).collect();
    let full_diff = grid2d::scatter(&grid, &diff);
    let full_ref = grid2d::scatter(&grid, &fields[1]);
    let mask = grid.cells_in(|x, y| x.hypot(y) >= 2.0);
    let (dl2, _) = grid2d::norms(&grid, &full_diff, &mask).unwrap();
    let (rl2, _) = grid2d::norms(&grid, &full_ref, &mask).unwrap();
    dl2 / rl2
}

#[test]
fn criterion_5_change_of_variables() {
    let coarse = invariance_gap(768);
    let fine = invariance_gap(1536);
    let pass = coarse <= 0.03 && fine < coarse;
    verdict(
        5,
        "change-of-variables invariance",
        pass,
        &format!(
            "exterior rel L2 gap {coarse:.4e} at h = 1/96 (<= 3e-2), {fine:.4e} after refinement (decreasing)"
        ),
    );
}

#[test]
fn criterion_6_pipeline_equivalence() {
    // Homogeneous medium: synthesized inverse transform vs time stepping.
    let rel_homog = {
        let grid = Grid2D::new(128, 4.0).unwrap();
        let spec = MediumSpec::homogeneous(2).unwrap();
        let hier = MgHierarchy::build(&grid, &spec).unwrap();
        let solver = FrequencySolver::new(&grid, &spec).unwrap();
        let src = SourceSpec::new(vec![3.0, 0.0], 0.3, Envelope::Exp).unwrap();
        let load = grid2d::load_vector(&grid, |x, y| src.spatial2(x, y));
        let tg = TimeGrid::new(0.5, 1e-3).unwrap();
        let mut marched: Vec<Vec<f64>> = Vec::new();
        heat::march(
            &hier,
            &tg,
            Scheme::CrankNicolson,
            &vec![0.0; load.len()],
            &load,
            &|t| (-t).exp(),
            |step, _, u| {
                if step == 250 || step == 500 {
                    marched.push(u.to_vec());
                }
            },
        )
        .unwrap();
        // The quadrature grid must resolve e^{-i omega t} at the latest
        // requested time; the tail band rides on the 1/omega^2 spectrum.
        let mut omegas: Vec<f64> = (0..=64).map(|i| 0.25 * i as f64).collect();
        omegas.extend((1..=48).map(|i| 16.0 + i as f64));
        omegas.extend((1..=96).map(|i| 64.0 + 2.0 * i as f64));
        let og = OmegaGrid::from_omegas(omegas).unwrap();
        let times = [0.25, 0.5];
        let synth =
            synthesize_time_solution(&solver, &og, &load, &Envelope::Exp, None, &times).unwrap();
        let mask = grid.cells_in(|_, _| true);
        let mut worst = 0.0f64;
        for (have, want) in synth.fields.iter().zip(&marched) {
            let diff: Vec<f64> = have.iter().zip(want).map(|(a, b)| a - b).collect();
            let (dn, _) = grid2d::norms(&grid, &grid2d::scatter(&grid, &diff), &mask).unwrap();
            let (rn, _) = grid2d::norms(&grid, &grid2d::scatter(&grid, want), &mask).unwrap();
            worst = worst.max(dn / rn);
        }
        worst
    };

    // Cloak at eps = 0.1: visibility curves from the two pipelines.
    let (dev_l2, dev_h1) = {
        let grid = Grid2D::new(256, 4.0).unwrap();
        let map = BlowupMap::new(0.1, 2).unwrap();
        let cloak_spec = MediumSpec::cloak(map, ObjectSpec::standard(2)).unwrap();
        let homog_spec = MediumSpec::homogeneous(2).unwrap();
        let src = SourceSpec::new(vec![3.0, 0.0], 0.3, Envelope::Exp).unwrap();
        let load = grid2d::load_vector(&grid, |x, y| src.spatial2(x, y));
        let tg = TimeGrid::new(1.0, 2e-3).unwrap();
        let cloak_h = MgHierarchy::build(&grid, &cloak_spec).unwrap();
        let homog_h = MgHierarchy::build(&grid, &homog_spec).unwrap();
        let tv = heat::time_visibility(
            &cloak_h,
            &homog_h,
            &tg,
            Scheme::CrankNicolson,
            50,
            &load,
            &|t| (-t).exp(),
            2.0,
        )
        .unwrap();
        drop((cloak_h, homog_h));
        let cloak_s = FrequencySolver::new(&grid, &cloak_spec).unwrap();
        let homog_s = FrequencySolver::new(&grid, &homog_spec).unwrap();
        // The difference spectrum is concentrated near omega = 0 with
        // variation on the scale of the domain's smallest eigenvalue, so
        // the quadrature is densest there.
        let mut omegas: Vec<f64> = (0..=25).map(|i| 0.04 * i as f64).collect();
        omegas.extend((1..=30).map(|i| 1.0 + 0.1 * i as f64));
        omegas.extend((1..=24).map(|i| 4.0 + 0.5 * i as f64));
        omegas.extend((1..=48).map(|i| 16.0 + i as f64));
        let og = OmegaGrid::from_omegas(omegas).unwrap();
        let fv = visibility_curve_frequency(
            &cloak_s,
            &homog_s,
            &og,
            &load,
            &Envelope::Exp,
            &tv.times,
            2.0,
        )
        .unwrap();
        let sup = |xs: &[f64]| xs.iter().cloned().fold(0.0f64, f64::max);
        let dev = |a: &[f64], b: &[f64]| -> f64 {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max)
        };
        (
            dev(&tv.err_l2, &fv.err_l2) / sup(&tv.err_l2),
            dev(&tv.err_h1, &fv.err_h1) / sup(&tv.err_h1),
        )
    };

    let pass = rel_homog <= 0.02 && dev_l2 <= 0.10 && dev_h1 <= 0.10;
    verdict(
        6,
        "pipeline equivalence",
        pass,
        &format!(
            "homogeneous rel L2 {rel_homog:.4e} (<= 2e-2); cloak visibility curve deviation L2 {dev_l2:.3e}, H1 {dev_h1:.3e} (<= 1e-1)"
        ),
    );
}

#[test]
fn criterion_7_special_functions() {
    // Frozen series oracle for H0(1).
    let oracle = Complex64::new(0.76519768655796655145, 0.088256964215676957983);
    let got = hankel0_h1(Complex64::new(1.0, 0.0)).unwrap();
    let series_dev = (got - oracle).norm();

    // Small-argument form 1 + (2i/pi) ln(|z|/2), valid once the log term
    // dwarfs Euler's constant.
    let z = Complex64::new(1e-30, 0.0);
    let form = Complex64::new(1.0, 0.0)
        + Complex64::new(0.0, std::f64::consts::FRAC_2_PI) * (z / 2.0).ln();
    let h = hankel0_h1(z).unwrap();
    let small_dev = (h - form).norm() / h.norm();

    // Large-argument form sqrt(2/(pi z)) e^{i(z - pi/4)}; leading-order
    // accuracy is ~1/(8z).
    let mut large_dev = 0.0f64;
    for &x in &[15.0f64, 25.0, 60.0] {
        let z = Complex64::new(x, 0.0);
        let lead = (2.0 / (std::f64::consts::PI * x)).sqrt()
            * (Complex64::i() * (z - Complex64::new(std::f64::consts::FRAC_PI_4, 0.0))).exp();
        let h = hankel0_h1(z).unwrap();
        large_dev = large_dev.max((h - lead).norm() / h.norm());
    }

    let pass = series_dev <= 1e-10 && small_dev <= 0.01 && large_dev <= 0.01;
    verdict(
        7,
        "special functions",
        pass,
        &format!(
            "H0(1) dev {series_dev:.2e} (<= 1e-10); small-z rel {small_dev:.3e}, large-z rel {large_dev:.3e} (<= 1e-2)"
        ),
    );
}

#[test]
fn criterion_8_object_independence() {
    let contrast3 = ObjectSpec::isotropic(3, 100.0, 0.09).unwrap();
    let contrast2 = ObjectSpec::isotropic(2, 100.0, 0.09).unwrap();

    let slope3_default = fit_rate(3, &radial_h1_sweep(&ObjectSpec::standard(3)))
        .unwrap()
        .slope;
    let slope3_contrast = fit_rate(3, &radial_h1_sweep(&contrast3)).unwrap().slope;
    let gap3 = (slope3_default - slope3_contrast).abs();

    let slope2_default = fit_rate(2, planar_default_sweep()).unwrap().slope;
    let slope2_contrast = fit_rate(2, &planar_h1_sweep(&contrast2)).unwrap().slope;
    let gap2 = (slope2_default - slope2_contrast).abs();

    let window3 = (0.8..=1.2).contains(&slope3_contrast);
    let pass = window3 && gap3 <= 0.2 && gap2 <= 0.2;
    verdict(
        8,
        "object independence",
        pass,
        &format!(
            "3D slopes {slope3_default:.4} vs {slope3_contrast:.4} (gap {gap3:.3}); 2D slopes {slope2_default:.4} vs {slope2_contrast:.4} (gap {gap2:.3}); gaps must be <= 0.2"
        ),
    );
}

#[test]
fn criterion_9_solver_bedrock() {
    // Parabolic: separable manufactured solution on the standard square,
    // spatial order from three dyadic grids at a small fixed step.
    let phi = |x: f64, y: f64| {
        let s = std::f64::consts::PI / 8.0;
        (s * (x + 4.0)).sin() * (s * (y + 4.0)).sin()
    };
    let lam = 2.0 * (std::f64::consts::PI / 8.0).powi(2);
    let mut heat_errs = Vec::new();
    for nx in [32usize, 64, 128] {
        let grid = Grid2D::new(nx, 4.0).unwrap();
        let hier = MgHierarchy::build(&grid, &MediumSpec::homogeneous(2).unwrap()).unwrap();
        let tg = TimeGrid::new(0.1, 1e-3).unwrap();
        let load = grid2d::load_vector(&grid, phi);
        let u0 = grid2d::restrict(&grid, &node_field(&grid, phi));
        // For u = e^{-t} phi the forcing is u_t - lap u = (lam - 1) e^{-t} phi.
        let u = heat::march(
            &hier,
            &tg,
            Scheme::CrankNicolson,
            &u0,
            &load,
            &|t| (lam - 1.0) * (-t).exp(),
            |_, _, _| {},
        )
        .unwrap();
        let decay = (-0.1f64).exp();
        let exact = node_field(&grid, |x, y| decay * phi(x, y));
        let full: Vec<f64> = grid2d::scatter(&grid, &u)
            .iter()
            .zip(&exact)
            .map(|(a, b)| a - b)
            .collect();
        let mask = grid.cells_in(|_, _| true);
        let (e, _) = grid2d::norms(&grid, &full, &mask).unwrap();
        heat_errs.push(e);
    }
    let heat_order = (heat_errs[0] / heat_errs[2]).log2() / 2.0;

    // Frequency solver: same profile, complex shift.
    let omega = 2.0;
    let mut freq_errs = Vec::new();
    for nx in [32usize, 64, 128] {
        let grid = Grid2D::new(nx, 4.0).unwrap();
        let solver = FrequencySolver::new(&grid, &MediumSpec::homogeneous(2).unwrap()).unwrap();
        let rhs = grid2d::load_vector(&grid, |x, y| Complex64::new(lam, -omega) * phi(x, y));
        let (u, _) = solver.solve(omega, &rhs).unwrap();
        let exact = node_field(&grid, |x, y| Complex64::new(phi(x, y), 0.0));
        let full: Vec<Complex64> = grid2d::scatter(&grid, &u)
            .iter()
            .zip(&exact)
            .map(|(a, b)| a - b)
            .collect();
        let mask = grid.cells_in(|_, _| true);
        let (e, _) = grid2d::norms(&grid, &full, &mask).unwrap();
        freq_errs.push(e);
    }
    let freq_order = (freq_errs[0] / freq_errs[2]).log2() / 2.0;

    // Discrete Laplacian ground state on the unit square.
    let grid = Grid2D::new(64, 0.5).unwrap();
    let hier = MgHierarchy::build(&grid, &MediumSpec::homogeneous(2).unwrap()).unwrap();
    let lambda = smallest_eigenvalue(&hier, 1e-12, 200).unwrap();
    let target = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
    let eig_rel = (lambda - target).abs() / target;

    let pass = (1.5..=2.5).contains(&heat_order)
        && (1.5..=2.5).contains(&freq_order)
        && eig_rel <= 0.01;
    verdict(
        9,
        "solver bedrock",
        pass,
        &format!(
            "parabolic order {heat_order:.2}, frequency order {freq_order:.2} (2.0 +- 0.5); eigenvalue rel dev {eig_rel:.2e} (<= 1e-2)"
        ),
    );
}
