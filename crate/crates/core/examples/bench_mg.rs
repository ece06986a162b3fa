//! Timing probe for the production solve path at experiment scale.

use num_complex::Complex64;
use thermocloak::grid2d::{load_vector, Grid2D};
use thermocloak::medium::{MediumSpec, ObjectSpec};
use thermocloak::solver::{bicgstab, MgHierarchy};
use thermocloak::transform::BlowupMap;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let nx: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(768);
    let eps: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(1.0 / 48.0);
    let omega: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1.0);

    let grid = Grid2D::standard(nx).unwrap();
    let map = BlowupMap::new(eps, 2).unwrap();
    let spec = MediumSpec::cloak(map, ObjectSpec::standard(2)).unwrap();

    let t0 = std::time::Instant::now();
    let hier = MgHierarchy::build(&grid, &spec).unwrap();
    println!("hierarchy: {} levels, built in {:.2?}", hier.depth(), t0.elapsed());

    let t0 = std::time::Instant::now();
    let mg = hier
        .shifted(Complex64::new(1.0, 0.0), Complex64::new(0.0, -omega))
        .unwrap();
    println!("shift + coarse LU in {:.2?}", t0.elapsed());

    let g = load_vector(&grid, |x, y| {
        let r2 = (x - 3.0) * (x - 3.0) + y * y;
        Complex64::new((-r2 / 0.18).exp() / (0.18 * std::f64::consts::PI), 0.0)
    });
    let rhs: Vec<Complex64> = g.iter().map(|v| -v).collect();

    let t0 = std::time::Instant::now();
    match bicgstab(mg.operator(), &rhs, &mg, 1e-11, 600) {
        Ok((x, rep)) => {
            let nrm: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            println!(
                "solve: {} iterations, residual {:.2e}, |x| = {:.3e}, in {:.2?}",
                rep.iterations, rep.residual, nrm, t0.elapsed()
            );
        }
        Err(e) => println!("solve failed after {:.2?}: {e}", t0.elapsed()),
    }
}
