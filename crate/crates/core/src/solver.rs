//! Linear solvers: pivoted tridiagonal and dense LU for small or banded
//! systems, preconditioned Krylov iterations for the 2D systems, and a
//! geometric multigrid preconditioner whose coarse operators are
//! rediscretized from the analytic medium.
//!
//! Everything here is deterministic: fixed sweep orders, fixed coarsening,
//! no pivot tie randomness.

use crate::grid2d::{assemble, Grid2D};
use crate::medium::{MaterialField, MediumSpec};
use crate::sparse::{axpy, dot, nrm2, Csr, Scalar};
use crate::{Error, Result};

/// Symmetric-pattern tridiagonal matrix: `sub` and `sup` have length n-1.
#[derive(Debug, Clone)]
pub struct Tridiag<T> {
    pub sub: Vec<T>,
    pub diag: Vec<T>,
    pub sup: Vec<T>,
}

impl<T: Scalar> Tridiag<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            sub: vec![T::zero(); n.saturating_sub(1)],
            diag: vec![T::zero(); n],
            sup: vec![T::zero(); n.saturating_sub(1)],
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let n = self.n();
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.sup[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// LU with partial pivoting (band grows by one superdiagonal), as in
    /// LAPACK's gtsv. Stable for the indefinite complex shifts.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::GridMismatch("rhs length".into()));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut dl = self.sub.clone();
        let mut d = self.diag.clone();
        let mut du = self.sup.clone();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut x = b.to_vec();
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                // no interchange
                if d[i].abs() == 0.0 {
                    return Err(Error::SingularSystem(format!(
                        "tridiagonal pivot vanished at row {i}"
                    )));
                }
                let f = dl[i] / d[i];
                d[i + 1] = d[i + 1] - f * du[i];
                x[i + 1] = x[i + 1] - f * x[i];
                dl[i] = T::zero();
                if i + 2 < n {
                    du2[i] = T::zero();
                }
            } else {
                // swap rows i and i+1
                let f = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - f * tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du2[i];
                }
                du[i] = tmp;
                let t = x[i];
                x[i] = x[i + 1];
                x[i + 1] = t - f * x[i];
                dl[i] = T::zero();
            }
        }
        if d[n - 1].abs() == 0.0 {
            return Err(Error::SingularSystem("tridiagonal pivot vanished".into()));
        }
        // back substitution
        x[n - 1] = x[n - 1] / d[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            let mut s = x[i] - du[i] * x[i + 1];
            if i + 2 < n {
                s -= du2[i] * x[i + 2];
            }
            x[i] = s / d[i];
        }
        Ok(x)
    }
}

/// `alpha K + beta M` for equally sized real tridiagonal matrices.
pub fn combine_tridiag<T: Scalar>(
    k: &Tridiag<f64>,
    alpha: T,
    m: &Tridiag<f64>,
    beta: T,
) -> Result<Tridiag<T>> {
    if k.n() != m.n() {
        return Err(Error::GridMismatch("tridiagonal sizes differ".into()));
    }
    let mix = |a: &[f64], b: &[f64]| -> Vec<T> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| alpha * T::from_re(x) + beta * T::from_re(y))
            .collect()
    };
    Ok(Tridiag {
        sub: mix(&k.sub, &m.sub),
        diag: mix(&k.diag, &m.diag),
        sup: mix(&k.sup, &m.sup),
    })
}

/// Dense LU with partial pivoting, row-major storage.
pub struct DenseLu<T> {
    n: usize,
    lu: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Scalar> DenseLu<T> {
    pub fn factor(n: usize, mut a: Vec<T>) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::GridMismatch("dense matrix size".into()));
        }
        let mut piv = vec![0usize; n];
        for col in 0..n {
            let mut best = col;
            let mut bestv = a[col * n + col].abs();
            for row in col + 1..n {
                let v = a[row * n + col].abs();
                if v > bestv {
                    best = row;
                    bestv = v;
                }
            }
            if bestv == 0.0 {
                return Err(Error::SingularSystem(format!(
                    "dense pivot vanished in column {col}"
                )));
            }
            piv[col] = best;
            if best != col {
                for j in 0..n {
                    a.swap(col * n + j, best * n + j);
                }
            }
            let inv = T::one() / a[col * n + col];
            for row in col + 1..n {
                let f = a[row * n + col] * inv;
                a[row * n + col] = f;
                for j in col + 1..n {
                    let u = a[col * n + j];
                    a[row * n + j] -= f * u;
                }
            }
        }
        Ok(Self { n, lu: a, piv })
    }

    pub fn from_csr(a: &Csr<T>) -> Result<Self> {
        let n = a.nrows();
        let mut dense = vec![T::zero(); n * n];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (c, v) in cols.iter().zip(vals) {
                dense[i * n + *c as usize] = *v;
            }
        }
        Self::factor(n, dense)
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            x.swap(i, self.piv[i]);
            for j in 0..i {
                let f = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= f * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let f = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= f * xj;
            }
            x[i] = x[i] / self.lu[i * n + i];
        }
        x
    }
}

/// Iteration outcome attached to every Krylov solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual: f64,
}

pub trait Preconditioner<T: Scalar> {
    fn apply(&self, r: &[T]) -> Vec<T>;
}

pub struct IdentityPrecond;

impl<T: Scalar> Preconditioner<T> for IdentityPrecond {
    fn apply(&self, r: &[T]) -> Vec<T> {
        r.to_vec()
    }
}

pub struct JacobiPrecond<T> {
    inv_diag: Vec<T>,
}

impl<T: Scalar> JacobiPrecond<T> {
    pub fn new(a: &Csr<T>) -> Result<Self> {
        let mut inv = a.diag();
        for (i, d) in inv.iter_mut().enumerate() {
            if d.abs() == 0.0 {
                return Err(Error::SingularSystem(format!("zero diagonal at row {i}")));
            }
            *d = T::one() / *d;
        }
        Ok(Self { inv_diag: inv })
    }
}

impl<T: Scalar> Preconditioner<T> for JacobiPrecond<T> {
    fn apply(&self, r: &[T]) -> Vec<T> {
        r.iter().zip(&self.inv_diag).map(|(&x, &d)| x * d).collect()
    }
}

/// Preconditioned conjugate gradients for Hermitian positive definite
/// systems.
pub fn cg<T: Scalar>(
    a: &Csr<T>,
    b: &[T],
    pc: &dyn Preconditioner<T>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<T>, SolveReport)> {
    let n = b.len();
    let bnorm = nrm2(b);
    if bnorm == 0.0 {
        return Ok((
            vec![T::zero(); n],
            SolveReport {
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut z = pc.apply(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        let ap = a.matvec(&p);
        let pap = dot(&p, &ap);
        if pap.abs() == 0.0 {
            return Err(Error::SolverDiverged {
                context: "cg breakdown".into(),
                residual: nrm2(&r) / bnorm,
                iterations: it,
            });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rel = nrm2(&r) / bnorm;
        if rel <= tol {
            let true_rel = a.rel_residual(&x, b);
            if true_rel <= tol * 10.0 {
                return Ok((
                    x,
                    SolveReport {
                        iterations: it,
                        residual: true_rel,
                    },
                ));
            }
        }
        z = pc.apply(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverDiverged {
        context: "cg exceeded iteration budget".into(),
        residual: nrm2(&r) / bnorm,
        iterations: max_iter,
    })
}

/// Preconditioned BiCGSTAB for general (complex, non-Hermitian) systems.
pub fn bicgstab<T: Scalar>(
    a: &Csr<T>,
    b: &[T],
    pc: &dyn Preconditioner<T>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<T>, SolveReport)> {
    let n = b.len();
    let bnorm = nrm2(b);
    if bnorm == 0.0 {
        return Ok((
            vec![T::zero(); n],
            SolveReport {
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut rhat = r.clone();
    let mut rho = T::one();
    let mut alpha = T::one();
    let mut omega = T::one();
    let mut v = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    let mut total_it = 0usize;
    for it in 1..=max_iter {
        total_it = it;
        let rho_new = dot(&rhat, &r);
        if rho_new.abs() < 1e-290 {
            // restart with the current residual as shadow vector
            rhat = r.clone();
            rho = T::one();
            alpha = T::one();
            omega = T::one();
            v.iter_mut().for_each(|z| *z = T::zero());
            p.iter_mut().for_each(|z| *z = T::zero());
            continue;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let phat = pc.apply(&p);
        v = a.matvec(&phat);
        let denom = dot(&rhat, &v);
        if denom.abs() < 1e-290 {
            rhat = r.clone();
            rho = T::one();
            alpha = T::one();
            omega = T::one();
            continue;
        }
        alpha = rho / denom;
        let mut s = r.clone();
        axpy(-alpha, &v, &mut s);
        if nrm2(&s) / bnorm <= tol {
            axpy(alpha, &phat, &mut x);
            let true_rel = a.rel_residual(&x, b);
            if true_rel <= tol {
                return Ok((
                    x,
                    SolveReport {
                        iterations: it,
                        residual: true_rel,
                    },
                ));
            }
            r = a.residual(&x, b);
            rhat = r.clone();
            rho = T::one();
            alpha = T::one();
            omega = T::one();
            continue;
        }
        let shat = pc.apply(&s);
        let t = a.matvec(&shat);
        let tt = dot(&t, &t);
        if tt.abs() == 0.0 {
            return Err(Error::SolverDiverged {
                context: "bicgstab breakdown (t = 0)".into(),
                residual: nrm2(&s) / bnorm,
                iterations: it,
            });
        }
        omega = dot(&t, &s) / tt;
        axpy(alpha, &phat, &mut x);
        axpy(omega, &shat, &mut x);
        r = s;
        axpy(-omega, &t, &mut r);
        if nrm2(&r) / bnorm <= tol {
            let true_rel = a.rel_residual(&x, b);
            if true_rel <= tol {
                return Ok((
                    x,
                    SolveReport {
                        iterations: it,
                        residual: true_rel,
                    },
                ));
            }
            // drifted recursion residual: recompute and continue
            r = a.residual(&x, b);
            rhat = r.clone();
            rho = T::one();
            alpha = T::one();
            omega = T::one();
        }
        if omega.abs() < 1e-290 {
            rhat = r.clone();
            rho = T::one();
            alpha = T::one();
            omega = T::one();
        }
    }
    Err(Error::SolverDiverged {
        context: "bicgstab exceeded iteration budget".into(),
        residual: a.rel_residual(&x, b),
        iterations: total_it,
    })
}

/// Direct-or-iterative dispatch for a bare system without geometric context:
/// dense LU for small systems, Jacobi-preconditioned BiCGSTAB otherwise.
pub fn solve_sparse<T: Scalar>(a: &Csr<T>, b: &[T]) -> Result<Vec<T>> {
    if a.nrows() != b.len() {
        return Err(Error::GridMismatch("system and rhs sizes differ".into()));
    }
    if a.nrows() <= 2000 {
        let lu = DenseLu::from_csr(a)?;
        let x = lu.solve(b);
        let rel = a.rel_residual(&x, b);
        if rel > 1e-10 && nrm2(b) > 0.0 {
            return Err(Error::SolverDiverged {
                context: "dense elimination residual above tolerance".into(),
                residual: rel,
                iterations: 1,
            });
        }
        return Ok(x);
    }
    let pc = JacobiPrecond::new(a)?;
    let (x, _) = bicgstab(a, b, &pc, 1e-11, 20_000)?;
    Ok(x)
}

const MG_COARSEST_NX: usize = 8;
const MG_SMOOTH_STEPS: usize = 2;

struct MgLevel {
    grid: Grid2D,
    k: Csr<f64>,
    m: Csr<f64>,
}

/// Grid hierarchy with rediscretized stiffness and mass matrices per level.
/// Coarse operators come from resampling the analytic medium, not from
/// Galerkin triple products.
pub struct MgHierarchy {
    levels: Vec<MgLevel>,
}

impl MgHierarchy {
    pub fn build(grid: &Grid2D, spec: &MediumSpec) -> Result<Self> {
        let mut levels = Vec::new();
        let mut g = *grid;
        loop {
            let field = MaterialField::sample2(spec, g.cell_centers())?;
            let (k, m) = assemble(&g, &field)?;
            levels.push(MgLevel { grid: g, k, m });
            if g.nx() % 2 != 0 || g.nx() / 2 < MG_COARSEST_NX {
                break;
            }
            g = g.coarsened()?;
        }
        Ok(Self { levels })
    }

    pub fn fine_matrices(&self) -> (&Csr<f64>, &Csr<f64>) {
        (&self.levels[0].k, &self.levels[0].m)
    }

    pub fn fine_grid(&self) -> &Grid2D {
        &self.levels[0].grid
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Builds the V-cycle preconditioner for `alpha K + beta M`.
    pub fn shifted<T: Scalar>(&self, alpha: T, beta: T) -> Result<MgPrecond<T>> {
        let mut ops = Vec::with_capacity(self.levels.len());
        let mut grids = Vec::with_capacity(self.levels.len());
        for lvl in &self.levels {
            ops.push(crate::sparse::combine(&lvl.k, alpha, &lvl.m, beta)?);
            grids.push(lvl.grid);
        }
        let coarse = DenseLu::from_csr(ops.last().expect("nonempty hierarchy"))?;
        Ok(MgPrecond {
            ops,
            grids,
            coarse,
            nu: MG_SMOOTH_STEPS,
        })
    }
}

/// One V-cycle per application; symmetric smoothing (forward sweeps down,
/// backward sweeps up) so the operator is admissible inside CG.
pub struct MgPrecond<T: Scalar> {
    ops: Vec<Csr<T>>,
    grids: Vec<Grid2D>,
    coarse: DenseLu<T>,
    nu: usize,
}

fn gauss_seidel_sweep<T: Scalar>(a: &Csr<T>, b: &[T], x: &mut [T], reverse: bool) {
    let n = x.len();
    let mut order: Box<dyn Iterator<Item = usize>> = if reverse {
        Box::new((0..n).rev())
    } else {
        Box::new(0..n)
    };
    let run = |i: usize, x: &mut [T]| {
        let (cols, vals) = a.row(i);
        let mut s = b[i];
        let mut d = T::one();
        for (c, v) in cols.iter().zip(vals) {
            let j = *c as usize;
            if j == i {
                d = *v;
            } else {
                s -= *v * x[j];
            }
        }
        x[i] = s / d;
    };
    loop {
        match order.next() {
            Some(i) => run(i, x),
            None => break,
        }
    }
}

/// Bilinear prolongation of coarse interior values onto the fine interior;
/// Dirichlet (zero) outside.
pub fn prolong<T: Scalar>(coarse: &Grid2D, fine: &Grid2D, xc: &[T]) -> Vec<T> {
    debug_assert_eq!(fine.nx(), 2 * coarse.nx());
    let nxc = coarse.nx();
    let at = |ix: usize, iy: usize| -> T {
        if ix == 0 || iy == 0 || ix >= nxc || iy >= nxc {
            T::zero()
        } else {
            xc[coarse.interior_index(ix, iy).expect("interior")]
        }
    };
    let mut out = vec![T::zero(); fine.interior_count()];
    for iy in 1..fine.nx() {
        for ix in 1..fine.nx() {
            let v = match (ix % 2, iy % 2) {
                (0, 0) => at(ix / 2, iy / 2),
                (1, 0) => (at(ix / 2, iy / 2) + at(ix / 2 + 1, iy / 2)) * T::from_re(0.5),
                (0, 1) => (at(ix / 2, iy / 2) + at(ix / 2, iy / 2 + 1)) * T::from_re(0.5),
                _ => (at(ix / 2, iy / 2)
                    + at(ix / 2 + 1, iy / 2)
                    + at(ix / 2, iy / 2 + 1)
                    + at(ix / 2 + 1, iy / 2 + 1))
                    * T::from_re(0.25),
            };
            out[fine.interior_index(ix, iy).expect("interior")] = v;
        }
    }
    out
}

/// Restriction as the exact prolongation transpose. Residuals here are
/// Galerkin (integrated) quantities, so the adjoint of the nested-space
/// injection is the consistent transfer; no 1/4 pointwise-stencil scaling.
pub fn restrict_adj<T: Scalar>(fine: &Grid2D, coarse: &Grid2D, rf: &[T]) -> Vec<T> {
    debug_assert_eq!(fine.nx(), 2 * coarse.nx());
    let at = |ix: isize, iy: isize| -> T {
        if ix <= 0 || iy <= 0 || ix >= fine.nx() as isize || iy >= fine.nx() as isize {
            T::zero()
        } else {
            rf[fine
                .interior_index(ix as usize, iy as usize)
                .expect("interior")]
        }
    };
    let mut out = vec![T::zero(); coarse.interior_count()];
    for jy in 1..coarse.nx() {
        for jx in 1..coarse.nx() {
            let (fx, fy) = (2 * jx as isize, 2 * jy as isize);
            let mut v = at(fx, fy);
            v += (at(fx - 1, fy) + at(fx + 1, fy) + at(fx, fy - 1) + at(fx, fy + 1))
                * T::from_re(0.5);
            v += (at(fx - 1, fy - 1) + at(fx + 1, fy - 1) + at(fx - 1, fy + 1)
                + at(fx + 1, fy + 1))
                * T::from_re(0.25);
            out[coarse.interior_index(jx, jy).expect("interior")] = v;
        }
    }
    out
}

impl<T: Scalar> MgPrecond<T> {
    fn vcycle(&self, level: usize, b: &[T], x: &mut Vec<T>) {
        let a = &self.ops[level];
        if level + 1 == self.ops.len() {
            *x = self.coarse.solve(b);
            return;
        }
        for _ in 0..self.nu {
            gauss_seidel_sweep(a, b, x, false);
        }
        let r = a.residual(x, b);
        let rc = restrict_adj(&self.grids[level], &self.grids[level + 1], &r);
        let mut ec = vec![T::zero(); rc.len()];
        self.vcycle(level + 1, &rc, &mut ec);
        let ef = prolong(&self.grids[level + 1], &self.grids[level], &ec);
        axpy(T::one(), &ef, x);
        for _ in 0..self.nu {
            gauss_seidel_sweep(a, b, x, true);
        }
    }

    pub fn operator(&self) -> &Csr<T> {
        &self.ops[0]
    }
}

impl<T: Scalar> Preconditioner<T> for MgPrecond<T> {
    fn apply(&self, r: &[T]) -> Vec<T> {
        let mut z = vec![T::zero(); r.len()];
        self.vcycle(0, r, &mut z);
        z
    }
}
