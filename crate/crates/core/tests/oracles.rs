use std::f64::consts::PI;

use approx::assert_relative_eq;
use mathieu_core::evaluator::residual;
use mathieu_core::radial::prefactors;
use mathieu_core::special::{airy, bessel_j, hankel1};
use mathieu_core::*;

fn series_only() -> EvaluatorConfig {
    EvaluatorConfig { n0: 100_000, ..EvaluatorConfig::default() }
}

// Abramowitz & Stegun table 20.1
#[test]
fn characteristic_values_match_tables() {
    let t = build_tables(1.0, 5, 80).unwrap();
    let a = [-0.455_138_60, 1.859_108_07, 4.371_300_98, 9.078_368_85];
    let b = [-0.110_248_82, 3.917_024_77, 9.047_739_26];
    for (n, want) in a.iter().enumerate() {
        assert!((t.char_even[n] - want).abs() < 1e-7, "a{n}(1) = {}", t.char_even[n]);
    }
    for (i, want) in b.iter().enumerate() {
        assert!((t.char_odd[i + 1] - want).abs() < 1e-7, "b{}(1) = {}", i + 1, t.char_odd[i + 1]);
    }
    let t5 = build_tables(5.0, 3, 80).unwrap();
    assert!((t5.char_even[0] + 5.800_046_02).abs() < 1e-7);
    assert!((t5.char_odd[1] + 5.790_080_60).abs() < 1e-7);
    assert!((t5.char_even[2] - 7.449_109_74).abs() < 1e-7);
}

#[test]
fn special_function_values() {
    assert_relative_eq!(bessel_j(0, 1.0).unwrap(), 0.765_197_686_557_966_6, max_relative = 1e-14);
    assert_relative_eq!(bessel_j(5, 10.0).unwrap(), -0.234_061_528_186_793_6, max_relative = 1e-12);
    let h = hankel1(1, 2.5).unwrap();
    assert_relative_eq!(h.re, 0.497_094_102_464_274_3, max_relative = 1e-13);
    assert_relative_eq!(h.im, 0.145_918_137_966_786_6, max_relative = 1e-12);
    let a = airy(0.0).unwrap();
    assert_relative_eq!(a.ai, 0.355_028_053_887_817_2, max_relative = 1e-14);
    assert_relative_eq!(a.bi, 0.614_926_627_446_000_7, max_relative = 1e-14);
}

#[test]
fn ne1_series_residual() {
    let t = build_tables(PI * PI, 30, 130).unwrap();
    let rep = residual(&t, &series_only(), SymmetryClass::Odd, 20, &[0.5]).unwrap();
    assert!(rep.max() <= 1e-6, "{}", rep.max());
}

#[test]
fn series_residuals_at_pi_squared() {
    let t = build_tables(PI * PI, 30, 130).unwrap();
    let ev = Evaluator::new(&t, series_only()).unwrap();
    let grid: Vec<f64> = (1..=300).map(|i| i as f64 * 0.01).collect();
    for class in [SymmetryClass::Even, SymmetryClass::Odd] {
        for n in 1..=12 {
            let rep = ev.residual(class, n, &grid).unwrap();
            assert!(rep.max() <= 1e-6, "{class:?} n={n}: {}", rep.max());
        }
    }
}

#[test]
fn small_theta_stays_accurate() {
    let t = build_tables(1e-4, 20, 60).unwrap();
    let p = prefactors(&t).unwrap();
    assert!(p.c.iter().all(|e| e.as_ref().unwrap().value.is_finite()));
    assert!(p.d.iter().skip(1).all(|e| e.as_ref().unwrap().value.is_finite()));
    let ev = Evaluator::new(&t, series_only()).unwrap();
    let grid: Vec<f64> = (1..=30).map(|i| i as f64 * 0.1).collect();
    for class in [SymmetryClass::Even, SymmetryClass::Odd] {
        for n in [1, 7, 20] {
            assert!(ev.residual(class, n, &grid).unwrap().max() <= 1e-6);
        }
    }
}

#[test]
fn high_order_near_origin() {
    let t = build_tables(PI * PI, 100, 260).unwrap();
    let ev = Evaluator::new(&t, EvaluatorConfig::default()).unwrap();
    let v = ev.evaluate(SymmetryClass::Even, 99, 0.1).unwrap();
    assert!(v.ratio.re.is_finite() && v.ratio.im.is_finite());
    assert!(ev.residual(SymmetryClass::Even, 99, &[0.1]).unwrap().max() <= 5e-3);
}

#[test]
fn turning_point_window() {
    let t = build_tables(PI * PI, 30, 130).unwrap();
    let ev = Evaluator::new(&t, EvaluatorConfig::default()).unwrap();
    let us = ev.context(SymmetryClass::Even, 20).unwrap().u_star;
    let v = ev.evaluate(SymmetryClass::Even, 20, us).unwrap();
    assert!(v.ratio.norm().is_finite() && v.ratio.norm() > 0.0);
    let grid: Vec<f64> = (-10..10).map(|k| us + 0.01 * k as f64 + 0.005).collect();
    assert!(ev.residual(SymmetryClass::Even, 20, &grid).unwrap().max() <= 5e-2);
}

#[test]
fn strip_source_on_strip_is_rejected() {
    let t = build_tables(PI * PI, 60, 180).unwrap();
    let pr = GreenProblem::from_a_over_lambda(Geometry::Strip, BoundaryCondition::Neumann, 2.0, 0.5, 0.0).unwrap();
    assert!(matches!(GreenSolver::new(pr, &t, EvaluatorConfig::default()), Err(MathieuError::Domain(_))));
}

#[test]
fn slit_far_field_peaks_straight_through() {
    let t = build_tables(PI * PI, 60, 180).unwrap();
    let pr = GreenProblem::new(Geometry::Slit, BoundaryCondition::Neumann, 2.0 * PI, 2.0, EllipticPoint::new(5.0, 0.0).unwrap());
    let alphas: Vec<f64> = (1..400).map(|i| PI * i as f64 / 400.0).collect();
    let ff = far_field(pr, &t, EvaluatorConfig::default(), 5.0, PI / 2.0, &alphas).unwrap();
    let (imax, _) = ff.intensity.iter().enumerate().fold((0, 0.0), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
    assert!((alphas[imax] - PI / 2.0).abs() < 0.02);
}
