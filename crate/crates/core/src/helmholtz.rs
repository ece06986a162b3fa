//! Frequency-domain solves. The transformed heat equation at frequency
//! `omega` reads `-div(A grad u) - i omega rho u = f`, i.e. a Helmholtz
//! problem with complex shift; the discrete system is `(K - i omega M) u = b`.
//!
//! Two geometries: full 2D grids (multigrid-preconditioned BiCGSTAB) and
//! radial profiles (direct tridiagonal). A radiating exterior solver on
//! `[1, r_max]` provides the kernel reference used to calibrate decay.

use num_complex::Complex64;

use crate::grid2d::{self, Grid2D};
use crate::medium::{MediumSpec, RadialField};
use crate::radial::{assemble_radial, load_radial, norms_radial, pin_node, RadialGrid};
use crate::solver::{bicgstab, cg, combine_tridiag, MgHierarchy, SolveReport, Tridiag};
use crate::sparse::dot;
use crate::special::{hankel0_h1, hankel1_h1};
use crate::{Error, Result};

/// Relative residual target for iterative frequency solves.
pub const FREQ_TOL: f64 = 1e-11;
pub const FREQ_MAX_ITER: usize = 600;

/// 2D frequency solver. The multigrid hierarchy is built once per
/// (grid, medium) pair; each frequency only re-shifts the levels, so
/// sweeping omega is cheap.
pub struct FrequencySolver {
    hier: MgHierarchy,
}

impl FrequencySolver {
    pub fn new(grid: &Grid2D, spec: &MediumSpec) -> Result<Self> {
        Ok(Self {
            hier: MgHierarchy::build(grid, spec)?,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        self.hier.fine_grid()
    }

    pub fn hierarchy(&self) -> &MgHierarchy {
        &self.hier
    }

    /// Solves `(K - i omega M) u = rhs` over interior nodes.
    pub fn solve(&self, omega: f64, rhs: &[Complex64]) -> Result<(Vec<Complex64>, SolveReport)> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "frequency must be positive, got {omega}"
            )));
        }
        let pc = self
            .hier
            .shifted(Complex64::new(1.0, 0.0), Complex64::new(0.0, -omega))?;
        bicgstab(pc.operator(), rhs, &pc, FREQ_TOL, FREQ_MAX_ITER)
    }

    /// Zero-frequency (stationary) solve `K u = rhs`, real and SPD.
    pub fn solve_stationary(&self, rhs: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let pc = self.hier.shifted(1.0, 0.0)?;
        cg(pc.operator(), rhs, &pc, FREQ_TOL, FREQ_MAX_ITER)
    }
}

/// Radial frequency solver: assembles once, then each solve is a complex
/// tridiagonal factorization. Outer node carries homogeneous Dirichlet.
pub struct RadialFrequencySolver {
    grid: RadialGrid,
    k: Tridiag<f64>,
    m: Tridiag<f64>,
}

impl RadialFrequencySolver {
    pub fn new(grid: RadialGrid, spec: &MediumSpec) -> Result<Self> {
        let field = RadialField::sample(spec, &grid.cell_midpoints())?;
        if field.dim != grid.dim() {
            return Err(Error::GridMismatch("medium and grid dimensions differ".into()));
        }
        let (k, m) = assemble_radial(&grid, &field)?;
        Ok(Self { grid, k, m })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn matrices(&self) -> (&Tridiag<f64>, &Tridiag<f64>) {
        (&self.k, &self.m)
    }

    /// Solves `(K - i omega M) u = rhs` with `u(r_max) = 0`; `rhs` spans all
    /// nodes and its last entry is overwritten by the boundary row.
    pub fn solve(&self, omega: f64, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "frequency must be positive, got {omega}"
            )));
        }
        let mut s = combine_tridiag(
            &self.k,
            Complex64::new(1.0, 0.0),
            &self.m,
            Complex64::new(0.0, -omega),
        )?;
        let mut b = rhs.to_vec();
        pin_node(&mut s, &mut b, self.grid.node_count() - 1, Complex64::new(0.0, 0.0));
        s.solve(&b)
    }

    pub fn solve_stationary(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut s = combine_tridiag(&self.k, 1.0, &self.m, 0.0)?;
        let mut b = rhs.to_vec();
        pin_node(&mut s, &mut b, self.grid.node_count() - 1, 0.0);
        s.solve(&b)
    }
}

/// Exterior L2/H1 discrepancy between two solutions of the same problem
/// class, e.g. cloaked vs homogeneous.
#[derive(Debug, Clone, Copy)]
pub struct VisibilityNorms {
    pub err_l2: f64,
    pub err_h1: f64,
}

/// Frequency-domain visibility on a radial grid: both solvers are driven by
/// the same source profile and the difference is measured on `r >= r_obs`.
pub fn radial_visibility(
    cloak: &RadialFrequencySolver,
    homog: &RadialFrequencySolver,
    omega: f64,
    g: &dyn Fn(f64) -> f64,
    r_obs: f64,
) -> Result<VisibilityNorms> {
    let grid = cloak.grid();
    if grid.radii() != homog.grid().radii() || grid.dim() != homog.grid().dim() {
        return Err(Error::GridMismatch("visibility solvers use different grids".into()));
    }
    if r_obs < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "observation radius must be >= 2, got {r_obs}"
        )));
    }
    let rhs = load_radial(grid, |r| Complex64::new(g(r), 0.0));
    let uc = cloak.solve(omega, &rhs)?;
    let uh = homog.solve(omega, &rhs)?;
    let diff: Vec<Complex64> = uc.iter().zip(&uh).map(|(a, b)| a - b).collect();
    let mask = grid.cells_in(|r| r >= r_obs);
    let (err_l2, err_h1) = norms_radial(grid, &diff, &mask)?;
    Ok(VisibilityNorms { err_l2, err_h1 })
}

/// Frequency-domain visibility on a 2D grid; difference measured on cells
/// fully outside the observation radius.
pub fn grid_visibility(
    cloak: &FrequencySolver,
    homog: &FrequencySolver,
    omega: f64,
    g: &dyn Fn(f64, f64) -> f64,
    r_obs: f64,
) -> Result<VisibilityNorms> {
    let grid = cloak.grid();
    let other = homog.grid();
    if grid.nx() != other.nx() || grid.half() != other.half() {
        return Err(Error::GridMismatch("visibility solvers use different grids".into()));
    }
    if r_obs < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "observation radius must be >= 2, got {r_obs}"
        )));
    }
    let rhs = grid2d::load_vector(grid, |x, y| Complex64::new(g(x, y), 0.0));
    let (uc, _) = cloak.solve(omega, &rhs)?;
    let (uh, _) = homog.solve(omega, &rhs)?;
    let diff: Vec<Complex64> = uc.iter().zip(&uh).map(|(a, b)| a - b).collect();
    let full = grid2d::scatter(grid, &diff);
    let mask = grid.cells_in(|x, y| x.hypot(y) >= r_obs);
    let (err_l2, err_h1) = grid2d::norms(grid, &full, &mask)?;
    Ok(VisibilityNorms { err_l2, err_h1 })
}

/// Radiating exterior solve: `u'' + (d-1)/r u' + k^2 u = 0` on `[1, r_max]`,
/// `u(1) = boundary_value`, exact outgoing Robin condition at `r_max`
/// (`u'/u = ik - 1/R` in 3D, `-k H1(kR)/H0(kR)` in 2D). Valid for
/// wavenumbers in the closed upper half plane away from the branch cut.
pub fn solve_radial_exterior(
    dim: usize,
    k: Complex64,
    boundary_value: Complex64,
    r_max: f64,
    cells: usize,
) -> Result<(RadialGrid, Vec<Complex64>)> {
    if !(r_max > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "exterior domain must extend past r = 1, got {r_max}"
        )));
    }
    if cells < 2 {
        return Err(Error::InvalidParameter("need at least two cells".into()));
    }
    if k.norm() == 0.0 {
        return Err(Error::InvalidParameter("wavenumber must be nonzero".into()));
    }
    if k.im < 0.0 {
        return Err(Error::InvalidParameter(
            "wavenumber must lie in the upper half plane for decay".into(),
        ));
    }
    let radii: Vec<f64> = (0..=cells)
        .map(|i| 1.0 + (r_max - 1.0) * i as f64 / cells as f64)
        .collect();
    let grid = RadialGrid::from_radii(dim, radii)?;
    let field = RadialField::sample(&MediumSpec::homogeneous(dim)?, &grid.cell_midpoints())?;
    let (kk, mm) = assemble_radial(&grid, &field)?;
    let mut s = combine_tridiag(&kk, Complex64::new(1.0, 0.0), &mm, -k * k)?;
    let lambda = match dim {
        3 => Complex64::new(0.0, 1.0) * k - Complex64::new(1.0 / r_max, 0.0),
        2 => {
            let z = k * r_max;
            -k * hankel1_h1(z)? / hankel0_h1(z)?
        }
        _ => unreachable!("grid constructor checked dim"),
    };
    let n = grid.node_count();
    s.diag[n - 1] -= lambda * Complex64::new(r_max.powi(dim as i32 - 1), 0.0);
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    pin_node(&mut s, &mut b, 0, boundary_value);
    let u = s.solve(&b)?;
    Ok((grid, u))
}

/// Smallest eigenvalue of `K v = lambda M v` by inverse power iteration with
/// multigrid-preconditioned CG inner solves.
pub fn smallest_eigenvalue(hier: &MgHierarchy, tol: f64, max_iter: usize) -> Result<f64> {
    let (_, m) = hier.fine_matrices();
    let pc = hier.shifted(1.0, 0.0)?;
    let n = m.nrows();
    let mut v = vec![1.0f64; n];
    let mut lambda = f64::INFINITY;
    for _ in 0..max_iter {
        let mv = m.matvec(&v);
        let (w, _) = cg(pc.operator(), &mv, &pc, 1e-13, 400)?;
        let mw = m.matvec(&w);
        let num = dot(&w, &mv);
        let den = dot(&w, &mw);
        if den == 0.0 {
            return Err(Error::SolverDiverged {
                context: "inverse iteration breakdown".into(),
                residual: f64::NAN,
                iterations: max_iter,
            });
        }
        let next = num / den;
        let scale = 1.0 / den.sqrt();
        v = w.iter().map(|&x| x * scale).collect();
        if (next - lambda).abs() <= tol * next.abs() {
            return Ok(next);
        }
        lambda = next;
    }
    Err(Error::SolverDiverged {
        context: "inverse iteration did not settle".into(),
        residual: f64::NAN,
        iterations: max_iter,
    })
}
