//! Uniform Cartesian grid on a centered square, bilinear elements, discrete
//! norms, and nodal interpolation.
//!
//! Node (ix, iy) sits at (-half + ix h, -half + iy h); coordinates are pure
//! functions of the indices. Unknowns are the interior nodes; the boundary
//! carries homogeneous Dirichlet data throughout.

use crate::medium::{MaterialField, MediumSpec};
use crate::sparse::{Csr, Scalar};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    half: f64,
    h: f64,
}

impl Grid2D {
    /// Square grid with `nx` cells per side on `(-half, half)^2`.
    pub fn new(nx: usize, half: f64) -> Result<Self> {
        if nx < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 cells per side, got {nx}"
            )));
        }
        if !(half > 0.0 && half.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid half-width must be positive, got {half}"
            )));
        }
        Ok(Self {
            nx,
            half,
            h: 2.0 * half / nx as f64,
        })
    }

    /// Default experiment domain (-4, 4)^2.
    pub fn standard(nx: usize) -> Result<Self> {
        Self::new(nx, 4.0)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn half(&self) -> f64 {
        self.half
    }

    /// Nodes per side.
    pub fn nodes_per_side(&self) -> usize {
        self.nx + 1
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.nx + 1)
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.nx
    }

    pub fn interior_count(&self) -> usize {
        (self.nx - 1) * (self.nx - 1)
    }

    pub fn node_coord(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            -self.half + ix as f64 * self.h,
            -self.half + iy as f64 * self.h,
        )
    }

    pub fn node_index(&self, ix: usize, iy: usize) -> usize {
        iy * (self.nx + 1) + ix
    }

    pub fn node_ij(&self, n: usize) -> (usize, usize) {
        (n % (self.nx + 1), n / (self.nx + 1))
    }

    pub fn is_boundary(&self, ix: usize, iy: usize) -> bool {
        ix == 0 || iy == 0 || ix == self.nx || iy == self.nx
    }

    /// Interior unknown index of a node, if interior.
    pub fn interior_index(&self, ix: usize, iy: usize) -> Option<usize> {
        if self.is_boundary(ix, iy) {
            None
        } else {
            Some((iy - 1) * (self.nx - 1) + (ix - 1))
        }
    }

    pub fn cell_center(&self, cx: usize, cy: usize) -> (f64, f64) {
        (
            -self.half + (cx as f64 + 0.5) * self.h,
            -self.half + (cy as f64 + 0.5) * self.h,
        )
    }

    pub fn cell_index(&self, cx: usize, cy: usize) -> usize {
        cy * self.nx + cx
    }

    /// Cell centers in cell-index order.
    pub fn cell_centers(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        (0..self.cell_count()).map(move |c| {
            let (cx, cy) = (c % self.nx, c / self.nx);
            self.cell_center(cx, cy)
        })
    }

    /// Samples a medium at the cell centers; requires the domain to contain
    /// the cloak support `B_2` strictly.
    pub fn sample_medium(&self, spec: &MediumSpec) -> Result<MaterialField> {
        if self.half <= 2.0 {
            return Err(Error::GridCoverage(format!(
                "domain half-width {} does not strictly contain B_2",
                self.half
            )));
        }
        MaterialField::sample2(spec, self.cell_centers())
    }

    /// Marks cells that lie entirely inside the predicate's region: all four
    /// corners and the center must pass, so straddling cells are excluded.
    pub fn cells_in(&self, pred: impl Fn(f64, f64) -> bool) -> Vec<bool> {
        let mut mask = vec![false; self.cell_count()];
        for cy in 0..self.nx {
            for cx in 0..self.nx {
                let (x0, y0) = self.node_coord(cx, cy);
                let (x1, y1) = self.node_coord(cx + 1, cy + 1);
                let (cxm, cym) = self.cell_center(cx, cy);
                mask[self.cell_index(cx, cy)] = pred(x0, y0)
                    && pred(x1, y0)
                    && pred(x0, y1)
                    && pred(x1, y1)
                    && pred(cxm, cym);
            }
        }
        mask
    }

    /// Grid with half the resolution; `nx` must be even.
    pub fn coarsened(&self) -> Result<Grid2D> {
        if self.nx % 2 != 0 {
            return Err(Error::GridMismatch(format!(
                "cannot halve odd cell count {}",
                self.nx
            )));
        }
        Grid2D::new(self.nx / 2, self.half)
    }
}

/// 2x2 Gauss points and weights on [0, 1].
const GP: [f64; 2] = [0.211324865405187118, 0.788675134594812882];
const GW: [f64; 2] = [0.5, 0.5];

/// Bilinear shape values on the reference square at (s, t); corner order
/// (0,0), (1,0), (0,1), (1,1).
fn shape(s: f64, t: f64) -> [f64; 4] {
    [
        (1.0 - s) * (1.0 - t),
        s * (1.0 - t),
        (1.0 - s) * t,
        s * t,
    ]
}

/// Reference gradients (d/ds, d/dt) of the four shapes at (s, t).
fn shape_grad(s: f64, t: f64) -> [(f64, f64); 4] {
    [
        (-(1.0 - t), -(1.0 - s)),
        (1.0 - t, -s),
        (-t, 1.0 - s),
        (t, s),
    ]
}

/// Local corner offsets in (dx, dy).
const CORNER: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

/// Stiffness and mass matrices over interior unknowns, sharing one sparsity
/// pattern. The weak form is `K = int A grad u . grad v`,
/// `M = int rho u v`, with cell-constant coefficients from the sampled field.
pub fn assemble(grid: &Grid2D, field: &MaterialField) -> Result<(Csr<f64>, Csr<f64>)> {
    if field.len() != grid.cell_count() {
        return Err(Error::GridMismatch(format!(
            "field has {} cells, grid has {}",
            field.len(),
            grid.cell_count()
        )));
    }
    let n = grid.interior_count();
    let h = grid.h();
    // reference-element integrals scaled per cell: grad phi = ref grad / h,
    // cell area h^2
    let mut kt: Vec<(u32, u32, f64)> = Vec::with_capacity(16 * grid.cell_count());
    let mut mt: Vec<(u32, u32, f64)> = Vec::with_capacity(16 * grid.cell_count());
    for cy in 0..grid.nx {
        for cx in 0..grid.nx {
            let c = grid.cell_index(cx, cy);
            let a = &field.tensor[c];
            let (axx, axy, ayy) = (a.get(0, 0), a.get(0, 1), a.get(1, 1));
            let rho = field.density[c];
            if !(rho > 0.0) {
                return Err(Error::SingularAssembly(format!(
                    "non-positive density in cell ({cx}, {cy})"
                )));
            }
            let mut kl = [[0.0f64; 4]; 4];
            let mut ml = [[0.0f64; 4]; 4];
            for (gi, &s) in GP.iter().enumerate() {
                for (gj, &t) in GP.iter().enumerate() {
                    let w = GW[gi] * GW[gj]; // times h^2 for area, applied below
                    let ph = shape(s, t);
                    let gr = shape_grad(s, t);
                    for ia in 0..4 {
                        let (gax, gay) = gr[ia];
                        for ib in 0..4 {
                            let (gbx, gby) = gr[ib];
                            // (A grad_a) . grad_b with grads scaled by 1/h,
                            // area h^2: net h^0
                            kl[ia][ib] += w
                                * (axx * gax * gbx
                                    + axy * (gax * gby + gay * gbx)
                                    + ayy * gay * gby);
                            ml[ia][ib] += w * rho * ph[ia] * ph[ib];
                        }
                    }
                }
            }
            let h2 = h * h;
            let idx: Vec<Option<usize>> = CORNER
                .iter()
                .map(|&(dx, dy)| grid.interior_index(cx + dx, cy + dy))
                .collect();
            for ia in 0..4 {
                let Some(ra) = idx[ia] else { continue };
                for ib in 0..4 {
                    let Some(rb) = idx[ib] else { continue };
                    kt.push((ra as u32, rb as u32, kl[ia][ib]));
                    mt.push((ra as u32, rb as u32, ml[ia][ib] * h2));
                }
            }
        }
    }
    let k = Csr::from_triplets(n, n, kt)?;
    let m = Csr::from_triplets(n, n, mt)?;
    Ok((k, m))
}

/// Galerkin load vector `int f phi_i` over interior unknowns, with `f`
/// evaluated at the quadrature points.
pub fn load_vector<T: Scalar>(grid: &Grid2D, f: impl Fn(f64, f64) -> T) -> Vec<T> {
    let mut out = vec![T::zero(); grid.interior_count()];
    let h = grid.h();
    let h2 = h * h;
    for cy in 0..grid.nx {
        for cx in 0..grid.nx {
            let (x0, y0) = grid.node_coord(cx, cy);
            for (gi, &s) in GP.iter().enumerate() {
                for (gj, &t) in GP.iter().enumerate() {
                    let w = GW[gi] * GW[gj] * h2;
                    let fx = f(x0 + s * h, y0 + t * h);
                    let ph = shape(s, t);
                    for (ia, &(dx, dy)) in CORNER.iter().enumerate() {
                        if let Some(r) = grid.interior_index(cx + dx, cy + dy) {
                            out[r] += fx * T::from_re(w * ph[ia]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Expands an interior-unknown vector to the full node set with zeros on the
/// boundary.
pub fn scatter<T: Scalar>(grid: &Grid2D, interior: &[T]) -> Vec<T> {
    debug_assert_eq!(interior.len(), grid.interior_count());
    let mut full = vec![T::zero(); grid.node_count()];
    for iy in 1..grid.nx {
        for ix in 1..grid.nx {
            full[grid.node_index(ix, iy)] =
                interior[grid.interior_index(ix, iy).expect("interior")];
        }
    }
    full
}

/// Extracts the interior unknowns from a full node vector.
pub fn restrict<T: Scalar>(grid: &Grid2D, full: &[T]) -> Vec<T> {
    debug_assert_eq!(full.len(), grid.node_count());
    let mut out = vec![T::zero(); grid.interior_count()];
    for iy in 1..grid.nx {
        for ix in 1..grid.nx {
            out[grid.interior_index(ix, iy).expect("interior")] = full[grid.node_index(ix, iy)];
        }
    }
    out
}

/// L2 and H1 norms of a full node field over the masked cells.
/// Returns (L2, H1) with `H1^2 = L2^2 + |grad|_{L2}^2`.
pub fn norms<T: Scalar>(grid: &Grid2D, full: &[T], mask: &[bool]) -> Result<(f64, f64)> {
    if full.len() != grid.node_count() {
        return Err(Error::GridMismatch(format!(
            "field length {} vs node count {}",
            full.len(),
            grid.node_count()
        )));
    }
    if mask.len() != grid.cell_count() {
        return Err(Error::GridMismatch("mask length mismatch".into()));
    }
    if !mask.iter().any(|&b| b) {
        return Err(Error::EmptyRegion);
    }
    let h = grid.h();
    let h2 = h * h;
    let mut l2sq = 0.0;
    let mut semisq = 0.0;
    for cy in 0..grid.nx {
        for cx in 0..grid.nx {
            if !mask[grid.cell_index(cx, cy)] {
                continue;
            }
            let vals: Vec<T> = CORNER
                .iter()
                .map(|&(dx, dy)| full[grid.node_index(cx + dx, cy + dy)])
                .collect();
            for (gi, &s) in GP.iter().enumerate() {
                for (gj, &t) in GP.iter().enumerate() {
                    let w = GW[gi] * GW[gj] * h2;
                    let ph = shape(s, t);
                    let gr = shape_grad(s, t);
                    let mut u = T::zero();
                    let mut ux = T::zero();
                    let mut uy = T::zero();
                    for ia in 0..4 {
                        u += vals[ia] * T::from_re(ph[ia]);
                        ux += vals[ia] * T::from_re(gr[ia].0 / h);
                        uy += vals[ia] * T::from_re(gr[ia].1 / h);
                    }
                    l2sq += w * u.abs2();
                    semisq += w * (ux.abs2() + uy.abs2());
                }
            }
        }
    }
    let l2 = l2sq.sqrt();
    Ok((l2, (l2sq + semisq).sqrt()))
}

/// Bilinear point evaluation of a full node field; zero outside the domain
/// (consistent with the Dirichlet extension).
pub fn interp_at<T: Scalar>(grid: &Grid2D, full: &[T], x: f64, y: f64) -> T {
    let half = grid.half();
    if x < -half || x > half || y < -half || y > half {
        return T::zero();
    }
    let h = grid.h();
    let fx = (x + half) / h;
    let fy = (y + half) / h;
    let cx = (fx.floor() as usize).min(grid.nx() - 1);
    let cy = (fy.floor() as usize).min(grid.nx() - 1);
    let s = (fx - cx as f64).clamp(0.0, 1.0);
    let t = (fy - cy as f64).clamp(0.0, 1.0);
    let ph = shape(s, t);
    let mut u = T::zero();
    for (ia, &(dx, dy)) in CORNER.iter().enumerate() {
        u += full[grid.node_index(cx + dx, cy + dy)] * T::from_re(ph[ia]);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::MediumSpec;

    fn unit_square(nx: usize) -> Grid2D {
        Grid2D::new(nx, 0.5).unwrap()
    }

    fn homog_field(grid: &Grid2D) -> MaterialField {
        let spec = MediumSpec::homogeneous(2).unwrap();
        MaterialField::sample2(&spec, grid.cell_centers()).unwrap()
    }

    #[test]
    fn geometry_is_reproducible() {
        let g = Grid2D::standard(16).unwrap();
        assert_eq!(g.h(), 0.5);
        assert_eq!(g.node_coord(0, 0), (-4.0, -4.0));
        assert_eq!(g.node_coord(16, 16), (4.0, 4.0));
        assert_eq!(g.node_coord(8, 4), (0.0, -2.0));
        // bit-exact: same indices, same floats
        for _ in 0..3 {
            assert_eq!(g.node_coord(7, 11), g.node_coord(7, 11));
        }
        assert!(g.is_boundary(0, 5) && g.is_boundary(5, 16));
        assert!(!g.is_boundary(1, 1));
        assert_eq!(g.interior_count(), 15 * 15);
        assert_eq!(g.interior_index(1, 1), Some(0));
        assert_eq!(g.interior_index(0, 1), None);
        let (cx, cy) = g.cell_center(0, 0);
        assert_eq!((cx, cy), (-3.75, -3.75));
        assert!(Grid2D::new(1, 1.0).is_err());
        assert!(Grid2D::new(8, 0.0).is_err());
    }

    #[test]
    fn coverage_check_rejects_small_domains() {
        let g = Grid2D::new(8, 1.5).unwrap();
        let spec = MediumSpec::homogeneous(2).unwrap();
        assert!(matches!(
            g.sample_medium(&spec),
            Err(Error::GridCoverage(_))
        ));
        let g = Grid2D::standard(8).unwrap();
        assert!(g.sample_medium(&spec).is_ok());
    }

    /// Interior rows whose full stencil avoids the boundary annihilate
    /// constants (row sums of K vanish).
    #[test]
    fn stiffness_annihilates_constants() {
        let g = unit_square(8);
        let (k, _) = assemble(&g, &homog_field(&g)).unwrap();
        let ones = vec![1.0; g.interior_count()];
        let y = k.matvec(&ones);
        for iy in 2..g.nx() - 1 {
            for ix in 2..g.nx() - 1 {
                let r = g.interior_index(ix, iy).unwrap();
                assert!(
                    y[r].abs() < 1e-13,
                    "row ({ix}, {iy}) sum {} not zero",
                    y[r]
                );
            }
        }
    }

    #[test]
    fn galerkin_matrices_are_symmetric() {
        // anisotropic medium to exercise the off-diagonal tensor path
        let spec = MediumSpec::custom(
            2,
            |x| crate::transform::SymTensor::new2(2.0 + x[0].abs(), 0.3, 1.0 + x[1] * x[1]),
            |x| 1.0 + 0.5 * x[0].abs(),
        )
        .unwrap();
        let g = unit_square(12);
        let f = MaterialField::sample2(&spec, g.cell_centers()).unwrap();
        let (k, m) = assemble(&g, &f).unwrap();
        assert!(k.symmetry_defect() <= 1e-14, "K defect {}", k.symmetry_defect());
        assert!(m.symmetry_defect() <= 1e-14, "M defect {}", m.symmetry_defect());
        assert!(k.same_pattern(&m));
    }

    /// Mass row sums reproduce `int rho phi_i = rho h^2` away from the
    /// boundary.
    #[test]
    fn mass_row_sums_are_cell_areas() {
        let g = unit_square(8);
        let (_, m) = assemble(&g, &homog_field(&g)).unwrap();
        let ones = vec![1.0; g.interior_count()];
        let y = m.matvec(&ones);
        let h2 = g.h() * g.h();
        for iy in 2..g.nx() - 1 {
            for ix in 2..g.nx() - 1 {
                let r = g.interior_index(ix, iy).unwrap();
                assert!((y[r] - h2).abs() < 1e-15, "row ({ix}, {iy}): {}", y[r]);
            }
        }
    }

    #[test]
    fn load_vector_partition_of_unity() {
        let g = unit_square(8);
        let l = load_vector(&g, |_, _| 1.0f64);
        let h2 = g.h() * g.h();
        for iy in 1..g.nx() {
            for ix in 1..g.nx() {
                let r = g.interior_index(ix, iy).unwrap();
                assert!((l[r] - h2).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn norm_examples() {
        // f = x + 1/2 on the unit square centered at the origin:
        // L2 = 1/sqrt(3), H1 seminorm = 1
        let g = unit_square(128);
        let mut full = vec![0.0f64; g.node_count()];
        for iy in 0..=g.nx() {
            for ix in 0..=g.nx() {
                let (x, _) = g.node_coord(ix, iy);
                full[g.node_index(ix, iy)] = x + 0.5;
            }
        }
        let mask = vec![true; g.cell_count()];
        let (l2, h1) = norms(&g, &full, &mask).unwrap();
        assert!((l2 - 1.0 / 3.0f64.sqrt()).abs() < 1e-6, "L2 {l2}");
        let semi = (h1 * h1 - l2 * l2).sqrt();
        assert!((semi - 1.0).abs() < 1e-9, "H1 seminorm {semi}");
        // zero field
        let zero = vec![0.0f64; g.node_count()];
        let (l2, h1) = norms(&g, &zero, &mask).unwrap();
        assert_eq!((l2, h1), (0.0, 0.0));
        // empty region
        let empty = vec![false; g.cell_count()];
        match norms(&g, &full, &empty) {
            Err(Error::EmptyRegion) => {}
            other => panic!("expected empty-region error, got {other:?}"),
        }
    }

    #[test]
    fn region_mask_excludes_straddling_cells() {
        let g = Grid2D::standard(32).unwrap();
        let mask = g.cells_in(|x, y| (x * x + y * y).sqrt() >= 2.0);
        for cy in 0..g.nx() {
            for cx in 0..g.nx() {
                if !mask[g.cell_index(cx, cy)] {
                    continue;
                }
                let (x0, y0) = g.node_coord(cx, cy);
                let (x1, y1) = g.node_coord(cx + 1, cy + 1);
                for &(x, y) in &[(x0, y0), (x1, y0), (x0, y1), (x1, y1)] {
                    assert!((x * x + y * y).sqrt() >= 2.0);
                }
            }
        }
        assert!(mask.iter().any(|&b| b));
        assert!(mask.iter().any(|&b| !b));
    }

    #[test]
    fn scatter_restrict_roundtrip() {
        let g = unit_square(6);
        let interior: Vec<f64> = (0..g.interior_count()).map(|i| i as f64 + 1.0).collect();
        let full = scatter(&g, &interior);
        for ix in 0..=g.nx() {
            assert_eq!(full[g.node_index(ix, 0)], 0.0);
            assert_eq!(full[g.node_index(0, ix)], 0.0);
        }
        assert_eq!(restrict(&g, &full), interior);
    }

    #[test]
    fn bilinear_interpolation() {
        let g = unit_square(10);
        let mut full = vec![0.0f64; g.node_count()];
        // u = 2x + 3y + 4xy is reproduced exactly by bilinear elements
        let f = |x: f64, y: f64| 2.0 * x + 3.0 * y + 4.0 * x * y;
        for iy in 0..=g.nx() {
            for ix in 0..=g.nx() {
                let (x, y) = g.node_coord(ix, iy);
                full[g.node_index(ix, iy)] = f(x, y);
            }
        }
        for &(x, y) in &[(0.03, -0.21), (0.49, 0.5), (-0.5, -0.5), (0.25, 0.25)] {
            let u = interp_at(&g, &full, x, y);
            assert!((u - f(x, y)).abs() < 1e-12, "at ({x}, {y}): {u} vs {}", f(x, y));
        }
        // outside: Dirichlet extension by zero
        assert_eq!(interp_at(&g, &full, 0.6, 0.0), 0.0);
    }

    #[test]
    fn coarsening() {
        let g = Grid2D::standard(768).unwrap();
        let c = g.coarsened().unwrap();
        assert_eq!(c.nx(), 384);
        assert_eq!(c.half(), g.half());
        assert!(Grid2D::standard(9).unwrap().coarsened().is_err());
    }
}
