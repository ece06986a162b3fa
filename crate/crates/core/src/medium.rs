//! Material descriptions: the homogeneous background, the cloak built by
//! pushing (I, 1) forward through the blow-up map, and the equivalent
//! blown-up medium with the shrunk object.
//!
//! Media are analytic (evaluable at any point), so multigrid levels can
//! rediscretize exactly; solvers consume per-cell samples taken at cell
//! centers.

use std::sync::Arc;

use crate::transform::{
    pushforward_density_with, pushforward_with, BlowupMap, SymTensor,
};
use crate::{Error, Result};

type TensorFn = Arc<dyn Fn(&[f64]) -> SymTensor + Send + Sync>;
type DensityFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Cell classification relative to the cloak geometry.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Region {
    Exterior,
    CloakLayer,
    Object,
}

/// Contents of the cloaked region: tensor and density fields on the unit
/// ball, with a declared ellipticity bound.
#[derive(Clone)]
pub struct ObjectSpec {
    dim: usize,
    ellipticity_bound: f64,
    tensor: TensorFn,
    density: DensityFn,
}

impl ObjectSpec {
    pub fn with_fields(
        dim: usize,
        ellipticity_bound: f64,
        tensor: impl Fn(&[f64]) -> SymTensor + Send + Sync + 'static,
        density: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidParameter(format!(
                "object dimension must be 2 or 3, got {dim}"
            )));
        }
        if !(ellipticity_bound >= 1.0 && ellipticity_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ellipticity bound must be >= 1, got {ellipticity_bound}"
            )));
        }
        Ok(Self {
            dim,
            ellipticity_bound,
            tensor: Arc::new(tensor),
            density: Arc::new(density),
        })
    }

    /// Constant isotropic contents `(a I, rho)`.
    pub fn isotropic(dim: usize, a: f64, rho: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "object tensor scale must be positive, got {a}"
            )));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "object density must be positive, got {rho}"
            )));
        }
        let bound = a.max(1.0 / a);
        Self::with_fields(dim, bound, move |x| SymTensor::isotropic(x.len(), a), move |_| rho)
    }

    /// Default contents used by the experiments.
    pub fn standard(dim: usize) -> Self {
        Self::isotropic(dim, 2.0, 3.0).expect("admissible constants")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ellipticity_bound(&self) -> f64 {
        self.ellipticity_bound
    }

    pub fn tensor_at(&self, x: &[f64]) -> SymTensor {
        (self.tensor)(x)
    }

    pub fn density_at(&self, x: &[f64]) -> f64 {
        (self.density)(x)
    }

    /// Deterministic point scan of the unit ball verifying the declared
    /// bound `Lambda^-1 |xi|^2 <= <a xi, xi> <= Lambda |xi|^2` and positive
    /// density.
    pub fn validate_sampled(&self) -> Result<()> {
        let lambda = self.ellipticity_bound;
        let tol = 1e-12;
        for x in unit_ball_samples(self.dim) {
            let a = self.tensor_at(&x);
            let (lo, hi) = a.eig_bounds();
            if !(lo >= 1.0 / lambda - tol && hi <= lambda + tol) {
                return Err(Error::Ellipticity(format!(
                    "object tensor eigenvalues [{lo:.6}, {hi:.6}] escape [1/{lambda}, {lambda}] at {x:?}"
                )));
            }
            let rho = self.density_at(&x);
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(Error::Ellipticity(format!(
                    "object density {rho} not positive at {x:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Sample points covering the unit ball: origin plus radius/direction grid.
fn unit_ball_samples(dim: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0; dim]];
    let radii = [0.05, 0.2, 0.4, 0.6, 0.8, 0.95];
    if dim == 2 {
        for &r in &radii {
            for k in 0..16 {
                let th = std::f64::consts::TAU * (k as f64) / 16.0;
                pts.push(vec![r * th.cos(), r * th.sin()]);
            }
        }
    } else {
        for &r in &radii {
            for i in 1..8 {
                let phi = std::f64::consts::PI * (i as f64) / 8.0;
                for k in 0..8 {
                    let th = std::f64::consts::TAU * (k as f64) / 8.0;
                    pts.push(vec![
                        r * phi.sin() * th.cos(),
                        r * phi.sin() * th.sin(),
                        r * phi.cos(),
                    ]);
                }
            }
            pts.push(vec![0.0, 0.0, r]);
            pts.push(vec![0.0, 0.0, -r]);
        }
    }
    pts
}

#[derive(Clone)]
enum Kind {
    Homogeneous,
    Cloak { map: BlowupMap, object: ObjectSpec },
    BlownUp { map: BlowupMap, object: ObjectSpec },
    Custom { tensor: TensorFn, density: DensityFn },
    Pushforward { map: BlowupMap, base: Box<MediumSpec> },
}

/// Analytic medium, evaluable at any point of the domain.
#[derive(Clone)]
pub struct MediumSpec {
    dim: usize,
    kind: Kind,
}

impl MediumSpec {
    /// Background `(I, 1)` everywhere.
    pub fn homogeneous(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            kind: Kind::Homogeneous,
        })
    }

    /// Cloak: `(I, 1)` outside `B_2`, the pushforward shell in `B_2 \ B_1`,
    /// object contents in `B_1`.
    pub fn cloak(map: BlowupMap, object: ObjectSpec) -> Result<Self> {
        if map.dim() != object.dim() {
            return Err(Error::InvalidParameter(
                "map and object dimensions differ".into(),
            ));
        }
        object.validate_sampled()?;
        Ok(Self {
            dim: map.dim(),
            kind: Kind::Cloak { map, object },
        })
    }

    /// Equivalent problem: `(I, 1)` outside `B_eps`, scaled object contents
    /// `(eps^{2-d} a(./eps), eps^{-d} rho(./eps))` inside.
    pub fn blownup(map: BlowupMap, object: ObjectSpec) -> Result<Self> {
        if map.dim() != object.dim() {
            return Err(Error::InvalidParameter(
                "map and object dimensions differ".into(),
            ));
        }
        object.validate_sampled()?;
        Ok(Self {
            dim: map.dim(),
            kind: Kind::BlownUp { map, object },
        })
    }

    /// Arbitrary analytic medium (used by change-of-variables studies).
    pub fn custom(
        dim: usize,
        tensor: impl Fn(&[f64]) -> SymTensor + Send + Sync + 'static,
        density: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            kind: Kind::Custom {
                tensor: Arc::new(tensor),
                density: Arc::new(density),
            },
        })
    }

    /// The image medium `(F_* A, F_* rho)` of `self` under the map.
    pub fn pushforward_under(self, map: BlowupMap) -> Result<Self> {
        if map.dim() != self.dim {
            return Err(Error::InvalidParameter(
                "map and medium dimensions differ".into(),
            ));
        }
        Ok(Self {
            dim: self.dim,
            kind: Kind::Pushforward {
                map,
                base: Box::new(self),
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Tensor and density at a point.
    pub fn eval(&self, x: &[f64]) -> Result<(SymTensor, f64)> {
        debug_assert_eq!(x.len(), self.dim);
        let r = norm(x);
        match &self.kind {
            Kind::Homogeneous => Ok((SymTensor::identity(self.dim), 1.0)),
            Kind::Cloak { map, object } => {
                if r >= 2.0 {
                    Ok((SymTensor::identity(self.dim), 1.0))
                } else if r >= 1.0 {
                    let sc = map.shell_coefficients(r);
                    let rhat: Vec<f64> = x.iter().map(|v| v / r).collect();
                    Ok((
                        SymTensor::from_radial_tangential(&rhat, sc.radial, sc.tangential),
                        sc.density,
                    ))
                } else {
                    Ok((object.tensor_at(x), object.density_at(x)))
                }
            }
            Kind::BlownUp { map, object } => {
                let eps = map.epsilon();
                if r >= eps {
                    Ok((SymTensor::identity(self.dim), 1.0))
                } else {
                    let y: Vec<f64> = x.iter().map(|v| v / eps).collect();
                    let scale = eps.powi(2 - self.dim as i32);
                    Ok((
                        object.tensor_at(&y).scaled(scale),
                        object.density_at(&y) * eps.powi(-(self.dim as i32)),
                    ))
                }
            }
            Kind::Custom { tensor, density } => Ok((tensor(x), density(x))),
            Kind::Pushforward { map, base } => {
                let z = map.inverse(x);
                let (a, rho) = base.eval(&z)?;
                let j = map.jacobian(&z);
                let tensor = pushforward_with(&j, &a)?;
                let density = pushforward_density_with(j.det(), rho)?;
                Ok((tensor, density))
            }
        }
    }

    /// Exhaustive, exclusive partition into exterior, cloak layer, object.
    pub fn region(&self, x: &[f64]) -> Region {
        let r = norm(x);
        match &self.kind {
            Kind::Cloak { .. } => {
                if r < 1.0 {
                    Region::Object
                } else if r < 2.0 {
                    Region::CloakLayer
                } else {
                    Region::Exterior
                }
            }
            Kind::BlownUp { map, .. } => {
                if r < map.epsilon() {
                    Region::Object
                } else {
                    Region::Exterior
                }
            }
            Kind::Pushforward { map, base } => base.region(&map.inverse(x)),
            _ => Region::Exterior,
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be 2 or 3, got {dim}"
        )));
    }
    Ok(())
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Per-cell samples of a medium on a 2D grid (cell centers).
#[derive(Clone)]
pub struct MaterialField {
    pub dim: usize,
    pub tensor: Vec<SymTensor>,
    pub density: Vec<f64>,
    pub region: Vec<Region>,
}

impl MaterialField {
    pub fn sample2(
        spec: &MediumSpec,
        centers: impl ExactSizeIterator<Item = (f64, f64)>,
    ) -> Result<Self> {
        if spec.dim() != 2 {
            return Err(Error::GridMismatch(
                "2D field sampling needs a 2D medium".into(),
            ));
        }
        let n = centers.len();
        let mut tensor = Vec::with_capacity(n);
        let mut density = Vec::with_capacity(n);
        let mut region = Vec::with_capacity(n);
        for (x, y) in centers {
            let p = [x, y];
            let (a, rho) = spec.eval(&p)?;
            let (lo, _) = a.eig_bounds();
            if !(lo > 0.0 && rho > 0.0) {
                return Err(Error::SingularAssembly(format!(
                    "non-elliptic sample at ({x}, {y}): min eig {lo}, density {rho}"
                )));
            }
            tensor.push(a);
            density.push(rho);
            region.push(spec.region(&p));
        }
        Ok(Self {
            dim: 2,
            tensor,
            density,
            region,
        })
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }
}

/// Per-cell samples for the radial reduction: only the radial tensor
/// component enters the weak form of radially symmetric problems.
#[derive(Clone)]
pub struct RadialField {
    /// Ambient dimension (2 or 3); sets the `r^{d-1}` weight.
    pub dim: usize,
    pub a_r: Vec<f64>,
    pub density: Vec<f64>,
    pub region: Vec<Region>,
}

impl RadialField {
    pub fn sample(spec: &MediumSpec, mid_radii: &[f64]) -> Result<Self> {
        let dim = spec.dim();
        let mut a_r = Vec::with_capacity(mid_radii.len());
        let mut density = Vec::with_capacity(mid_radii.len());
        let mut region = Vec::with_capacity(mid_radii.len());
        for &r in mid_radii {
            if r <= 0.0 {
                return Err(Error::GridMismatch(
                    "radial sampling needs positive radii".into(),
                ));
            }
            let mut p = vec![0.0; dim];
            p[0] = r;
            let (a, rho) = spec.eval(&p)?;
            let ar = a.get(0, 0);
            if !(ar > 0.0 && rho > 0.0) {
                return Err(Error::SingularAssembly(format!(
                    "non-elliptic radial sample at r = {r}: coefficient {ar}, density {rho}"
                )));
            }
            a_r.push(ar);
            density.push(rho);
            region.push(spec.region(&p));
        }
        Ok(Self {
            dim,
            a_r,
            density,
            region,
        })
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }
}

/// Min/max tensor eigenvalues and density per region.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RegionStats {
    pub region: String,
    pub cells: usize,
    pub min_eig: f64,
    pub max_eig: f64,
    pub min_density: f64,
    pub max_density: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EllipticityReport {
    pub stats: Vec<RegionStats>,
    pub violations: Vec<String>,
    pub ok: bool,
}

fn region_name(r: Region) -> &'static str {
    match r {
        Region::Exterior => "exterior",
        Region::CloakLayer => "cloak_layer",
        Region::Object => "object",
    }
}

fn check_stream(
    items: impl Iterator<Item = (Region, f64, f64, f64)>,
    lower: f64,
    upper: f64,
) -> EllipticityReport {
    let mut stats: Vec<(Region, RegionStats)> = Vec::new();
    for (region, lo, hi, rho) in items {
        let entry = match stats.iter_mut().find(|(r, _)| *r == region) {
            Some((_, s)) => s,
            None => {
                stats.push((
                    region,
                    RegionStats {
                        region: region_name(region).to_string(),
                        cells: 0,
                        min_eig: f64::INFINITY,
                        max_eig: f64::NEG_INFINITY,
                        min_density: f64::INFINITY,
                        max_density: f64::NEG_INFINITY,
                    },
                ));
                &mut stats.last_mut().expect("just pushed").1
            }
        };
        entry.cells += 1;
        entry.min_eig = entry.min_eig.min(lo);
        entry.max_eig = entry.max_eig.max(hi);
        entry.min_density = entry.min_density.min(rho);
        entry.max_density = entry.max_density.max(rho);
    }
    let mut violations = Vec::new();
    for (_, s) in &stats {
        if s.min_eig < lower {
            violations.push(format!(
                "{}: min eigenvalue {:.6e} below {lower:.6e}",
                s.region, s.min_eig
            ));
        }
        if s.max_eig > upper {
            violations.push(format!(
                "{}: max eigenvalue {:.6e} above {upper:.6e}",
                s.region, s.max_eig
            ));
        }
        if s.min_density <= 0.0 {
            violations.push(format!("{}: non-positive density", s.region));
        }
    }
    let ok = violations.is_empty();
    EllipticityReport {
        stats: stats.into_iter().map(|(_, s)| s).collect(),
        violations,
        ok,
    }
}

/// Scans a sampled 2D field against requested eigenvalue bounds.
pub fn check_ellipticity(field: &MaterialField, lower: f64, upper: f64) -> EllipticityReport {
    check_stream(
        field
            .tensor
            .iter()
            .zip(&field.density)
            .zip(&field.region)
            .map(|((a, &rho), &reg)| {
                let (lo, hi) = a.eig_bounds();
                (reg, lo, hi, rho)
            }),
        lower,
        upper,
    )
}

/// Radial counterpart; the scanned eigenvalue is the radial coefficient.
pub fn check_ellipticity_radial(field: &RadialField, lower: f64, upper: f64) -> EllipticityReport {
    check_stream(
        field
            .a_r
            .iter()
            .zip(&field.density)
            .zip(&field.region)
            .map(|((&ar, &rho), &reg)| (reg, ar, ar, rho)),
        lower,
        upper,
    )
}
