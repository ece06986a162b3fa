//! The radial blow-up map, its inverse and Jacobian, and coefficient
//! pushforwards.
//!
//! The map expands the ball of radius `epsilon` onto the unit ball, maps the
//! annulus `epsilon <= |x| <= 2` onto `1 <= |y| <= 2` by an affine radial
//! profile, and fixes everything outside radius 2. Pushing the homogeneous
//! medium forward under it produces the anisotropic cloak layer.

use crate::{Error, Result};

/// Small symmetric tensor (2x2 or 3x3), packed storage.
///
/// Entries are stored row-major upper-triangular: `[xx, xy, yy]` for 2x2 and
/// `[xx, xy, xz, yy, yz, zz]` for 3x3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor {
    dim: usize,
    e: [f64; 6],
}

impl SymTensor {
    pub fn new2(xx: f64, xy: f64, yy: f64) -> Self {
        SymTensor {
            dim: 2,
            e: [xx, xy, yy, 0.0, 0.0, 0.0],
        }
    }

    pub fn new3(xx: f64, xy: f64, xz: f64, yy: f64, yz: f64, zz: f64) -> Self {
        SymTensor {
            dim: 3,
            e: [xx, xy, xz, yy, yz, zz],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::isotropic(dim, 1.0)
    }

    /// `a * I`.
    pub fn isotropic(dim: usize, a: f64) -> Self {
        assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
        match dim {
            2 => Self::new2(a, 0.0, a),
            _ => Self::new3(a, 0.0, 0.0, a, 0.0, a),
        }
    }

    /// `tangential I + (radial - tangential) rhat rhat^T`: eigenvalue
    /// `radial` along `rhat`, `tangential` across it.
    pub fn from_radial_tangential(rhat: &[f64], radial: f64, tangential: f64) -> Self {
        let dim = rhat.len();
        let mut out = Self::isotropic(dim, tangential);
        let d = radial - tangential;
        for i in 0..dim {
            for j in i..dim {
                out.set(i, j, out.get(i, j) + d * rhat[i] * rhat[j]);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        match self.dim {
            2 => self.e[i + j],
            _ => {
                // upper-triangular row-major offsets for 3x3: row starts 0, 3, 5
                const ROW: [usize; 3] = [0, 3, 5];
                self.e[ROW[i] + (j - i)]
            }
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        match self.dim {
            2 => self.e[i + j] = v,
            _ => {
                const ROW: [usize; 3] = [0, 3, 5];
                self.e[ROW[i] + (j - i)] = v;
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = *self;
        for v in out.e.iter_mut() {
            *v *= c;
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Quadratic form `<A xi, xi>`.
    pub fn quad_form(&self, xi: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.get(i, j) * xi[i] * xi[j];
            }
        }
        s
    }

    pub fn det(&self) -> f64 {
        match self.dim {
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(0, 1),
            _ => {
                let a = |i: usize, j: usize| self.get(i, j);
                a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(1, 2))
                    - a(0, 1) * (a(0, 1) * a(2, 2) - a(1, 2) * a(0, 2))
                    + a(0, 2) * (a(0, 1) * a(1, 2) - a(1, 1) * a(0, 2))
            }
        }
    }

    /// Smallest and largest eigenvalue (closed form; trigonometric method for
    /// 3x3).
    pub fn eig_bounds(&self) -> (f64, f64) {
        match self.dim {
            2 => {
                let (a, b, c) = (self.get(0, 0), self.get(0, 1), self.get(1, 1));
                let tr = a + c;
                let d = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
                (0.5 * (tr - d), 0.5 * (tr + d))
            }
            _ => {
                let q = (self.get(0, 0) + self.get(1, 1) + self.get(2, 2)) / 3.0;
                let mut b2 = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        let v = self.get(i, j) - if i == j { q } else { 0.0 };
                        b2 += v * v;
                    }
                }
                let p = (b2 / 6.0).sqrt();
                if p < 1e-300 {
                    return (q, q);
                }
                // det((A - qI)/p), clamped into [-1, 1] against roundoff
                let mut b = *self;
                for i in 0..3 {
                    b.set(i, i, b.get(i, i) - q);
                }
                let r = (b.det() / (p * p * p) / 2.0).clamp(-1.0, 1.0);
                let phi = r.acos() / 3.0;
                let emax = q + 2.0 * p * phi.cos();
                let emin = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
                (emin, emax)
            }
        }
    }

    /// Congruence `J * A * J^T` for symmetric `J` (radial-map Jacobians are
    /// symmetric).
    pub fn congruence(&self, j: &SymTensor) -> SymTensor {
        assert_eq!(self.dim, j.dim);
        let d = self.dim;
        let mut out = SymTensor::isotropic(d, 0.0);
        for r in 0..d {
            for c in r..d {
                let mut s = 0.0;
                for p in 0..d {
                    for q in 0..d {
                        s += j.get(r, p) * self.get(p, q) * j.get(c, q);
                    }
                }
                out.set(r, c, s);
            }
        }
        out
    }
}

fn radius(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Pushforward of a tensor by a map with symmetric Jacobian `j`:
/// `J A J^T / |det J|`. Fails when the Jacobian is (numerically) degenerate.
pub fn pushforward_with(j: &SymTensor, a: &SymTensor) -> Result<SymTensor> {
    let det = j.det();
    if det.abs() < 1e-14 {
        return Err(Error::DegenerateJacobian { det });
    }
    Ok(a.congruence(j).scaled(1.0 / det.abs()))
}

/// Pushforward of a density: `rho / |det J|`.
pub fn pushforward_density_with(det: f64, rho: f64) -> Result<f64> {
    if det.abs() < 1e-14 {
        return Err(Error::DegenerateJacobian { det });
    }
    Ok(rho / det.abs())
}

/// Radial eigen-structure of a cloak-layer point: the pushforward of `(I, 1)`
/// at target radius `s` in `(1, 2)`, split into radial/tangential eigenvalues
/// and the transformed density.
#[derive(Debug, Clone, Copy)]
pub struct ShellCoefficients {
    pub radial: f64,
    pub tangential: f64,
    pub density: f64,
}

/// The blow-up map. `epsilon` is the regularization radius, `dim` the space
/// dimension (2 or 3).
#[derive(Debug, Clone, Copy)]
pub struct BlowupMap {
    epsilon: f64,
    dim: usize,
}

impl BlowupMap {
    pub fn new(epsilon: f64, dim: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1/2), got {epsilon}"
            )));
        }
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be 2 or 3, got {dim}"
            )));
        }
        Ok(BlowupMap { epsilon, dim })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Middle-branch radial profile `f(r) = (2-2e)/(2-e) + r/(2-e)`.
    fn profile_coeffs(&self) -> (f64, f64) {
        let e = self.epsilon;
        ((2.0 - 2.0 * e) / (2.0 - e), 1.0 / (2.0 - e))
    }

    /// Radial profile of the full piecewise map. Branch interfaces use the
    /// outer-side branch.
    pub fn profile(&self, r: f64) -> f64 {
        if r >= 2.0 {
            r
        } else if r >= self.epsilon {
            let (a, b) = self.profile_coeffs();
            a + b * r
        } else {
            r / self.epsilon
        }
    }

    fn profile_deriv(&self, r: f64) -> f64 {
        if r >= 2.0 {
            1.0
        } else if r >= self.epsilon {
            self.profile_coeffs().1
        } else {
            1.0 / self.epsilon
        }
    }

    /// Forward map.
    pub fn map(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        let r = radius(x);
        if r >= 2.0 {
            return x.to_vec();
        }
        if r < self.epsilon {
            return x.iter().map(|v| v / self.epsilon).collect();
        }
        let f = self.profile(r);
        x.iter().map(|v| v * (f / r)).collect()
    }

    /// Exact piecewise inverse of [`BlowupMap::map`].
    pub fn inverse(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.dim);
        let s = radius(y);
        if s >= 2.0 {
            return y.to_vec();
        }
        if s <= 1.0 {
            return y.iter().map(|v| v * self.epsilon).collect();
        }
        let (a, b) = self.profile_coeffs();
        let r = (s - a) / b;
        y.iter().map(|v| v * (r / s)).collect()
    }

    /// Inverse radial profile on the image side (`s = |y|`).
    pub fn inverse_radius(&self, s: f64) -> f64 {
        if s >= 2.0 {
            s
        } else if s > 1.0 {
            let (a, b) = self.profile_coeffs();
            (s - a) / b
        } else {
            s * self.epsilon
        }
    }

    /// Analytic Jacobian: `f'(r)` in the radial direction, `f(r)/r`
    /// tangentially. At the origin the inner linear branch gives `I/epsilon`.
    pub fn jacobian(&self, x: &[f64]) -> SymTensor {
        let d = self.dim;
        let r = radius(x);
        if r < self.epsilon {
            return SymTensor::isotropic(d, 1.0 / self.epsilon);
        }
        if r >= 2.0 {
            return SymTensor::identity(d);
        }
        let fp = self.profile_deriv(r);
        let ft = self.profile(r) / r;
        // fp * P_radial + ft * (I - P_radial)
        let mut j = SymTensor::isotropic(d, ft);
        for i in 0..d {
            for k in i..d {
                let p = x[i] * x[k] / (r * r);
                j.set(i, k, j.get(i, k) + (fp - ft) * p);
            }
        }
        j
    }

    pub fn det_jacobian(&self, x: &[f64]) -> f64 {
        let r = radius(x);
        if r < self.epsilon {
            return self.epsilon.powi(-(self.dim as i32));
        }
        if r >= 2.0 {
            return 1.0;
        }
        let f = self.profile(r);
        self.profile_deriv(r) * (f / r).powi(self.dim as i32 - 1)
    }

    /// Pushforward of a tensor field under this map, evaluated at the image
    /// point `y`: `(J A J^T / |det J|)(F^{-1}(y))`.
    pub fn pushforward_tensor(
        &self,
        y: &[f64],
        a: impl Fn(&[f64]) -> SymTensor,
    ) -> Result<SymTensor> {
        let x = self.inverse(y);
        let j = self.jacobian(&x);
        pushforward_with(&j, &a(&x))
    }

    /// Pushforward of a density field, evaluated at the image point `y`:
    /// `rho(F^{-1}(y)) / |det J(F^{-1}(y))|`.
    pub fn pushforward_density(&self, y: &[f64], rho: impl Fn(&[f64]) -> f64) -> Result<f64> {
        let x = self.inverse(y);
        pushforward_density_with(self.det_jacobian(&x), rho(&x))
    }

    /// Closed-form cloak-layer coefficients at target radius `s in (1, 2)`:
    /// the pushforward of the homogeneous pair `(I, 1)`.
    pub fn shell_coefficients(&self, s: f64) -> ShellCoefficients {
        let r = self.inverse_radius(s);
        let f = self.profile(r);
        let fp = self.profile_deriv(r);
        let ratio = f / r; // = s / r
        let det = fp * ratio.powi(self.dim as i32 - 1);
        let radial = fp * fp / det;
        let tangential = ratio * ratio / det;
        ShellCoefficients {
            radial,
            tangential,
            density: 1.0 / det,
        }
    }
}
