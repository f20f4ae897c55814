//! The `validate` suite: half-plane identity, boundary conditions on the
//! scatterer and source/field reciprocity at theta = pi^2.

use std::f64::consts::PI;

use mathieu_core::scattering::window_points;
use mathieu_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GEOMETRIES: [Geometry; 2] = [Geometry::Slit, Geometry::Strip];
const BCS: [BoundaryCondition; 2] = [BoundaryCondition::Neumann, BoundaryCondition::Dirichlet];

fn report(name: &str, value: f64, tol: f64) -> bool {
    let ok = value <= tol;
    println!("{} {name}: {value:.3e} (tol {tol:.0e})", if ok { "ok  " } else { "FAIL" });
    ok
}

/// Runs every check, printing one line each; true when all hold.
pub fn run(table: &CoefficientTable, n_terms: usize, pairs: usize) -> Result<bool> {
    let cfg = EvaluatorConfig::default();
    let mut all = true;

    let pts = window_points([-5.0, 5.0, -5.0, 5.0], 41, 41)?;
    for bc in BCS {
        let mut pr = GreenProblem::from_a_over_lambda(Geometry::Slit, bc, 2.0, 1.0, 3.0)?;
        pr.n_terms = n_terms;
        let r = half_plane_identity(pr, table, cfg, &pts, 0.05)?;
        all &= report(&format!("half-plane identity {}", bc.label()), r.max_err, 1e-3);
    }

    let probes: Vec<EllipticPoint> = [(0.3, 1.2), (-2.0, 0.7), (1.5, -1.0)].iter().map(|&(x, y)| to_elliptic(x, y, 2.0)).collect::<Result<_>>()?;
    for geometry in GEOMETRIES {
        for bc in BCS {
            let pr = GreenProblem::from_a_over_lambda(geometry, bc, 2.0, 1.0, 3.0)?;
            let s = GreenSolver::new(pr, table, cfg)?;
            let mut scale = 0.0f64;
            for &p in &probes {
                scale = scale.max(s.field(p)?.g.norm());
            }
            let mut worst = 0.0f64;
            match geometry {
                Geometry::Slit => {
                    for i in 1..=20 {
                        let u = 0.1 * i as f64;
                        for v in [0.0, PI] {
                            for upper in [true, false] {
                                let f = s.field_on_side(EllipticPoint::new(u, v)?, upper)?;
                                worst = worst.max(match bc {
                                    BoundaryCondition::Dirichlet => f.g.norm() / scale,
                                    BoundaryCondition::Neumann => f.dg_dv.norm() / u.sinh() / (pr.k * scale),
                                });
                            }
                        }
                    }
                }
                Geometry::Strip => {
                    for i in 1..40 {
                        let v = PI * i as f64 / 40.0;
                        for v in [v, -v] {
                            let f = s.field(EllipticPoint::new(0.0, v)?)?;
                            worst = worst.max(match bc {
                                BoundaryCondition::Dirichlet => f.g.norm() / scale,
                                BoundaryCondition::Neumann => f.dg_du.norm() / v.sin().abs() / (pr.k * scale),
                            });
                        }
                    }
                }
            }
            let tol = match (geometry, bc) {
                (Geometry::Slit, BoundaryCondition::Dirichlet) => 1e-10,
                (Geometry::Strip, BoundaryCondition::Dirichlet) => 1e-8,
                _ => 1e-6,
            };
            all &= report(&format!("boundary condition {}/{}", geometry.label(), bc.label()), worst, tol);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut sample = Vec::new();
    while sample.len() < pairs {
        let p: (f64, f64) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let q: (f64, f64) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        if p.1.abs() > 0.05 && q.1.abs() > 0.05 && (p.0 - q.0).hypot(p.1 - q.1) > 0.2 {
            sample.push((p, q));
        }
    }
    for geometry in GEOMETRIES {
        for bc in BCS {
            let g = |src: (f64, f64), at: (f64, f64)| -> Result<Complex64> {
                let pr = GreenProblem::from_a_over_lambda(geometry, bc, 2.0, src.0, src.1)?;
                Ok(GreenSolver::new(pr, table, cfg)?.field(to_elliptic(at.0, at.1, 2.0)?)?.g)
            };
            let mut worst = 0.0f64;
            for &(p, q) in &sample {
                let (a, b) = (g(p, q)?, g(q, p)?);
                worst = worst.max((a - b).norm() / a.norm().max(b.norm()));
            }
            all &= report(&format!("reciprocity {}/{}", geometry.label(), bc.label()), worst, 1e-3);
        }
    }
    Ok(all)
}
