//! Radial reduction: 1D grids on [0, R] with the r^{d-1} volume weight,
//! piecewise-linear assembly, and weighted norms.
//!
//! Radially symmetric media and sources make every 3D experiment a
//! tridiagonal problem; the same machinery serves 2D radial cross-checks.

use crate::medium::RadialField;
use crate::solver::Tridiag;
use crate::sparse::Scalar;
use crate::{Error, Result};

/// Two-point Gauss on [0, 1].
const GP: [f64; 2] = [0.211324865405187118, 0.788675134594812882];

#[derive(Debug, Clone)]
pub struct RadialGrid {
    dim: usize,
    r: Vec<f64>,
}

impl RadialGrid {
    pub fn from_radii(dim: usize, r: Vec<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidParameter(format!(
                "radial dimension must be 2 or 3, got {dim}"
            )));
        }
        if r.len() < 2 {
            return Err(Error::InvalidParameter("need at least two radii".into()));
        }
        if r[0] < 0.0 {
            return Err(Error::InvalidParameter("radii must start at >= 0".into()));
        }
        if !r.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "radii must be strictly increasing".into(),
            ));
        }
        Ok(Self { dim, r })
    }

    pub fn uniform(dim: usize, r_max: f64, cells: usize) -> Result<Self> {
        if !(r_max > 0.0) || cells < 1 {
            return Err(Error::InvalidParameter("bad uniform radial grid".into()));
        }
        let r = (0..=cells)
            .map(|i| r_max * i as f64 / cells as f64)
            .collect();
        Self::from_radii(dim, r)
    }

    /// Grid graded for the blown-up medium: uniform on [0, 2 eps], geometric
    /// from 2 eps to 1, uniform from 1 to `r_max`. Keeps at least 8 nodes
    /// inside B_eps.
    pub fn graded(dim: usize, eps: f64, r_max: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "grading parameter must lie in (0, 1/2), got {eps}"
            )));
        }
        if !(r_max > 2.0) {
            return Err(Error::InvalidParameter(
                "radial domain must reach past the cloak".into(),
            ));
        }
        let n_in = 24usize; // cells on [0, 2 eps]: 12 inside B_eps
        let n_geo = 160usize;
        let n_out = 420usize;
        let mut r = Vec::with_capacity(n_in + n_geo + n_out + 1);
        for i in 0..=n_in {
            r.push(2.0 * eps * i as f64 / n_in as f64);
        }
        let ratio = (1.0 / (2.0 * eps)).powf(1.0 / n_geo as f64);
        let mut cur = 2.0 * eps;
        for _ in 0..n_geo - 1 {
            cur *= ratio;
            r.push(cur);
        }
        r.push(1.0);
        for i in 1..=n_out {
            r.push(1.0 + (r_max - 1.0) * i as f64 / n_out as f64);
        }
        let grid = Self::from_radii(dim, r)?;
        debug_assert!(grid.nodes_inside(eps) >= 8);
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn node_count(&self) -> usize {
        self.r.len()
    }

    pub fn cell_count(&self) -> usize {
        self.r.len() - 1
    }

    pub fn r_max(&self) -> f64 {
        *self.r.last().expect("nonempty")
    }

    pub fn r_min(&self) -> f64 {
        self.r[0]
    }

    pub fn nodes_inside(&self, radius: f64) -> usize {
        self.r.iter().filter(|&&x| x < radius).count()
    }

    /// Cell midpoints, where coefficients are sampled.
    pub fn cell_midpoints(&self) -> Vec<f64> {
        self.r.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Cells whose closure lies inside the predicate region.
    pub fn cells_in(&self, pred: impl Fn(f64) -> bool) -> Vec<bool> {
        self.r.windows(2).map(|w| pred(w[0]) && pred(w[1])).collect()
    }
}

/// Angular measure of the unit sphere: 2 pi (d = 2), 4 pi (d = 3). Weighted
/// radial norms carry this factor so they agree with full-dimension norms.
pub fn sphere_measure(dim: usize) -> f64 {
    match dim {
        2 => std::f64::consts::TAU,
        _ => 4.0 * std::f64::consts::PI,
    }
}

/// Stiffness `int a_r u' v' r^{d-1} dr` and mass `int rho u v r^{d-1} dr`
/// over ALL nodes (no boundary elimination here; callers pin Dirichlet nodes
/// with `pin_node`). Two-point Gauss with midpoint coefficients per cell.
pub fn assemble_radial(grid: &RadialGrid, field: &RadialField) -> Result<(Tridiag<f64>, Tridiag<f64>)> {
    if field.len() != grid.cell_count() {
        return Err(Error::GridMismatch(format!(
            "field has {} cells, grid has {}",
            field.len(),
            grid.cell_count()
        )));
    }
    if field.dim != grid.dim() {
        return Err(Error::GridMismatch("field and grid dimensions differ".into()));
    }
    let n = grid.node_count();
    let mut k = Tridiag::zeros(n);
    let mut m = Tridiag::zeros(n);
    let pw = grid.dim() as i32 - 1;
    for (c, w) in grid.radii().windows(2).enumerate() {
        let (r0, r1) = (w[0], w[1]);
        let hl = r1 - r0;
        let a = field.a_r[c];
        let rho = field.density[c];
        if !(a > 0.0 && rho > 0.0) {
            return Err(Error::SingularAssembly(format!(
                "non-elliptic radial cell {c}"
            )));
        }
        let mut kloc = [[0.0f64; 2]; 2];
        let mut mloc = [[0.0f64; 2]; 2];
        for &g in GP.iter() {
            let r = r0 + g * hl;
            let wgt = 0.5 * hl * r.powi(pw);
            // shapes on the cell: phi0 = 1 - g, phi1 = g; derivatives -1/hl, 1/hl
            let ph = [1.0 - g, g];
            let dp = [-1.0 / hl, 1.0 / hl];
            for i in 0..2 {
                for j in 0..2 {
                    kloc[i][j] += wgt * a * dp[i] * dp[j];
                    mloc[i][j] += wgt * rho * ph[i] * ph[j];
                }
            }
        }
        k.diag[c] += kloc[0][0];
        k.diag[c + 1] += kloc[1][1];
        k.sup[c] += kloc[0][1];
        k.sub[c] += kloc[1][0];
        m.diag[c] += mloc[0][0];
        m.diag[c + 1] += mloc[1][1];
        m.sup[c] += mloc[0][1];
        m.sub[c] += mloc[1][0];
    }
    Ok((k, m))
}

/// Replaces row `i` by the identity row and zeroes its couplings, moving the
/// prescribed value to the right-hand side of `b`.
pub fn pin_node<T: Scalar>(a: &mut Tridiag<T>, b: &mut [T], i: usize, value: T) {
    let n = a.n();
    if i > 0 {
        b[i - 1] -= a.sup[i - 1] * value;
        a.sup[i - 1] = T::zero();
        a.sub[i - 1] = T::zero();
    }
    if i + 1 < n {
        b[i + 1] -= a.sub[i] * value;
        a.sub[i] = T::zero();
        a.sup[i] = T::zero();
    }
    a.diag[i] = T::one();
    b[i] = value;
}

/// Load vector `int f phi_i r^{d-1} dr` over all nodes.
pub fn load_radial<T: Scalar>(grid: &RadialGrid, f: impl Fn(f64) -> T) -> Vec<T> {
    let n = grid.node_count();
    let mut out = vec![T::zero(); n];
    let pw = grid.dim() as i32 - 1;
    for (c, w) in grid.radii().windows(2).enumerate() {
        let (r0, r1) = (w[0], w[1]);
        let hl = r1 - r0;
        for &g in GP.iter() {
            let r = r0 + g * hl;
            let wgt = 0.5 * hl * r.powi(pw);
            let fv = f(r);
            out[c] += fv * T::from_re(wgt * (1.0 - g));
            out[c + 1] += fv * T::from_re(wgt * g);
        }
    }
    out
}

/// Weighted L2 and H1 norms over masked cells, including the angular factor,
/// so values are comparable with 2D grid norms of the same function.
pub fn norms_radial<T: Scalar>(
    grid: &RadialGrid,
    u: &[T],
    mask: &[bool],
) -> Result<(f64, f64)> {
    if u.len() != grid.node_count() {
        return Err(Error::GridMismatch("field length".into()));
    }
    if mask.len() != grid.cell_count() {
        return Err(Error::GridMismatch("mask length".into()));
    }
    if !mask.iter().any(|&b| b) {
        return Err(Error::EmptyRegion);
    }
    let pw = grid.dim() as i32 - 1;
    let mut l2 = 0.0;
    let mut semi = 0.0;
    for (c, w) in grid.radii().windows(2).enumerate() {
        if !mask[c] {
            continue;
        }
        let (r0, r1) = (w[0], w[1]);
        let hl = r1 - r0;
        let du = (u[c + 1] - u[c]) * T::from_re(1.0 / hl);
        for &g in GP.iter() {
            let r = r0 + g * hl;
            let wgt = 0.5 * hl * r.powi(pw);
            let uv = u[c] * T::from_re(1.0 - g) + u[c + 1] * T::from_re(g);
            l2 += wgt * uv.abs2();
            semi += wgt * du.abs2();
        }
    }
    let s = sphere_measure(grid.dim());
    l2 *= s;
    semi *= s;
    Ok((l2.sqrt(), (l2 + semi).sqrt()))
}

/// Linear interpolation of a nodal field at radius `x` (clamped to the grid).
pub fn interp_radial<T: Scalar>(grid: &RadialGrid, u: &[T], x: f64) -> T {
    let r = grid.radii();
    if x <= r[0] {
        return u[0];
    }
    if x >= *r.last().expect("nonempty") {
        return *u.last().expect("nonempty");
    }
    let c = match r.binary_search_by(|v| v.partial_cmp(&x).expect("finite")) {
        Ok(i) => return u[i],
        Err(i) => i - 1,
    };
    let t = (x - r[c]) / (r[c + 1] - r[c]);
    u[c] * T::from_re(1.0 - t) + u[c + 1] * T::from_re(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::{MediumSpec, RadialField};

    fn homog_field(grid: &RadialGrid, dim: usize) -> RadialField {
        let spec = MediumSpec::homogeneous(dim).unwrap();
        RadialField::sample(&spec, &grid.cell_midpoints()).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::from_radii(3, vec![0.0, 1.0, 2.0]).is_ok());
        assert!(RadialGrid::from_radii(3, vec![0.0, 1.0, 1.0]).is_err());
        assert!(RadialGrid::from_radii(3, vec![-0.1, 1.0]).is_err());
        assert!(RadialGrid::from_radii(4, vec![0.0, 1.0]).is_err());
        assert!(RadialGrid::uniform(2, 0.0, 4).is_err());
        let g = RadialGrid::uniform(3, 4.0, 8).unwrap();
        assert_eq!(g.cell_count(), 8);
        assert_eq!(g.r_max(), 4.0);
    }

    #[test]
    fn graded_grid_resolves_inner_ball() {
        for &eps in &[0.02, 0.1, 0.3] {
            let g = RadialGrid::graded(3, eps, 4.0).unwrap();
            assert!(
                g.nodes_inside(eps) >= 8,
                "only {} nodes inside eps = {eps}",
                g.nodes_inside(eps)
            );
            assert_eq!(g.r_min(), 0.0);
            assert_eq!(g.r_max(), 4.0);
            // node at exactly 1 so the object boundary is resolved
            assert!(g.radii().iter().any(|&r| r == 1.0));
        }
        assert!(RadialGrid::graded(3, 0.6, 4.0).is_err());
        assert!(RadialGrid::graded(3, 0.1, 1.5).is_err());
    }

    /// Steady conduction through a spherical shell: u(r) = (1/r - 1/b)/(1/a - 1/b)
    /// solves (r^2 u')' = 0 with u(a) = 1, u(b) = 0; P1 nodal values are exact
    /// up to quadrature placement of the 1/r profile.
    #[test]
    fn spherical_shell_conduction() {
        let grid = RadialGrid::uniform(3, 4.0, 400).unwrap();
        let field = homog_field(&grid, 3);
        let (mut k, _) = assemble_radial(&grid, &field).unwrap();
        let n = grid.node_count();
        let mut b = vec![0.0f64; n];
        // pin u = 1 on the node nearest r = 1, u = 0 at r = 4
        let i1 = grid.radii().iter().position(|&r| r >= 1.0).unwrap();
        pin_node(&mut k, &mut b, i1, 1.0);
        pin_node(&mut k, &mut b, n - 1, 0.0);
        // also pin everything inside r = 1 to 1 (conduction only in the shell)
        for i in 0..i1 {
            pin_node(&mut k, &mut b, i, 1.0);
        }
        let u = k.solve(&b).unwrap();
        let a = grid.radii()[i1];
        let exact = |r: f64| (1.0 / r - 0.25) / (1.0 / a - 0.25);
        for (i, &r) in grid.radii().iter().enumerate().skip(i1) {
            let want = exact(r.max(a));
            assert!(
                (u[i] - want).abs() < 2e-4,
                "u({r}) = {} vs {want}",
                u[i]
            );
        }
    }

    /// 2D steady state is logarithmic: u = ln(b/r)/ln(b/a).
    #[test]
    fn cylindrical_shell_conduction() {
        let grid = RadialGrid::uniform(2, 4.0, 600).unwrap();
        let field = homog_field(&grid, 2);
        let (mut k, _) = assemble_radial(&grid, &field).unwrap();
        let n = grid.node_count();
        let mut b = vec![0.0f64; n];
        let i1 = grid.radii().iter().position(|&r| r >= 1.0).unwrap();
        for i in 0..=i1 {
            pin_node(&mut k, &mut b, i, 1.0);
        }
        pin_node(&mut k, &mut b, n - 1, 0.0);
        let u = k.solve(&b).unwrap();
        let a = grid.radii()[i1];
        for (i, &r) in grid.radii().iter().enumerate().skip(i1 + 1) {
            let want = (4.0 / r).ln() / (4.0 / a).ln();
            assert!((u[i] - want).abs() < 2e-4, "u({r}) = {} vs {want}", u[i]);
        }
    }

    #[test]
    fn weighted_norm_oracle() {
        // u = r on [0, 1], d = 3: ||u||^2 = 4 pi int r^4 = 4 pi / 5
        let grid = RadialGrid::uniform(3, 1.0, 512).unwrap();
        let u: Vec<f64> = grid.radii().to_vec();
        let mask = vec![true; grid.cell_count()];
        let (l2, h1) = norms_radial(&grid, &u, &mask).unwrap();
        let want_l2 = (4.0 * std::f64::consts::PI / 5.0f64).sqrt();
        assert!((l2 - want_l2).abs() < 1e-6, "L2 {l2} vs {want_l2}");
        // |u'| = 1: seminorm^2 = 4 pi int r^2 = 4 pi / 3
        let semi = (h1 * h1 - l2 * l2).sqrt();
        let want_semi = (4.0 * std::f64::consts::PI / 3.0f64).sqrt();
        assert!((semi - want_semi).abs() < 1e-6, "semi {semi} vs {want_semi}");
        // region mask errors
        let empty = vec![false; grid.cell_count()];
        assert!(norms_radial(&grid, &u, &empty).is_err());
    }

    #[test]
    fn load_vector_integrates_volume() {
        // sum of load entries = int_0^R r^{d-1} dr = R^d / d
        let grid = RadialGrid::uniform(3, 2.0, 100).unwrap();
        let l = load_radial(&grid, |_| 1.0f64);
        let total: f64 = l.iter().sum();
        assert!((total - 8.0 / 3.0).abs() < 1e-12, "total {total}");
    }

    #[test]
    fn interpolation_clamps_and_reproduces() {
        let grid = RadialGrid::uniform(2, 2.0, 4).unwrap();
        let u = vec![0.0, 1.0, 4.0, 9.0, 16.0];
        assert_eq!(interp_radial(&grid, &u, 0.75), 2.5);
        assert_eq!(interp_radial(&grid, &u, 1.0), 4.0);
        assert_eq!(interp_radial(&grid, &u, -1.0), 0.0);
        assert_eq!(interp_radial(&grid, &u, 5.0), 16.0);
    }

    #[test]
    fn mass_matrix_measures_volume() {
        let grid = RadialGrid::uniform(3, 1.0, 200).unwrap();
        let field = homog_field(&grid, 3);
        let (_, m) = assemble_radial(&grid, &field).unwrap();
        let ones = vec![1.0; grid.node_count()];
        let total: f64 = m.matvec(&ones).iter().sum();
        // int_0^1 r^2 dr = 1/3
        assert!((total - 1.0 / 3.0).abs() < 1e-12);
    }
}
