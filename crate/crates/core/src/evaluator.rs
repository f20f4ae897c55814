//! Dispatch between the exact series and the two WKB formulas, and the ODE
//! residual used to judge the result.

use num_complex::Complex64;

use crate::angular::{CoefficientTable, SymmetryClass};
use crate::error::{domain, MathieuError, Result};
use crate::radial::series_ratio;
use crate::wkb::{coupling, inside_scaled, turning_scaled, ActionContext, ScaledRadial};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluatorConfig {
    /// Indices below n0 always use the series.
    pub n0: usize,
    /// The series is used while 1/h >= eps0.
    pub eps0: f64,
    /// Inside formula while 2 theta cosh(2u) / h < eps1.
    pub eps1: f64,
    /// Base finite-difference step of the residual.
    pub fd_step: f64,
    /// Compare 2 theta cosh(u) / h instead of cosh(2u).
    pub literal_cosh_u: bool,
}

impl Default for EvaluatorConfig {
    fn default() -> Self {
        EvaluatorConfig { n0: 6, eps0: 0.005, eps1: 0.1, fd_step: 1e-4, literal_cosh_u: false }
    }
}

impl EvaluatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n0 < 1 {
            return Err(MathieuError::Config("n0 must be >= 1".into()));
        }
        if !(self.eps0 > 0.0 && self.eps0 < 1.0) || !(self.eps1 > 0.0 && self.eps1 < 1.0) {
            return Err(MathieuError::Config(format!("eps0 and eps1 must lie in (0, 1), got {} and {}", self.eps0, self.eps1)));
        }
        if !(self.fd_step > 0.0) {
            return Err(MathieuError::Config(format!("fd_step must be positive, got {}", self.fd_step)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Series,
    WkbInside,
    WkbTurning,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Series => "series",
            Branch::WkbInside => "wkb_inside",
            Branch::WkbTurning => "wkb_turning",
        }
    }
}

/// Normalized radial data at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialValue {
    /// Me1/Me1'(0) (even class) or Ne1/Ne1(0) (odd class).
    pub ratio: Complex64,
    pub ratio_du: Complex64,
    /// Ce/ce(0) (even class) or Se/se'(0) (odd class).
    pub first_kind: f64,
    pub first_kind_du: f64,
    pub branch: Branch,
    /// A WKB branch was selected but raised a precision error.
    pub fell_back: bool,
}

/// k|x| estimate sqrt(theta) e^u.
pub fn radius_map(theta: f64, u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return domain(format!("radius_map needs u >= 0, got {u}"));
    }
    Ok(theta.sqrt() * u.exp())
}

fn annotate(e: MathieuError, b: Branch) -> MathieuError {
    let tag = |m: String| format!("[{}] {m}", b.label());
    match e {
        MathieuError::Domain(m) => MathieuError::Domain(tag(m)),
        MathieuError::Config(m) => MathieuError::Config(tag(m)),
        MathieuError::Truncation { what, last_term } => MathieuError::Truncation { what: tag(what), last_term },
        MathieuError::Precision(m) => MathieuError::Precision(tag(m)),
        MathieuError::Singularity(m) => MathieuError::Singularity(tag(m)),
    }
}

/// Evaluator bound to one table, with the action contexts prepared per index.
pub struct Evaluator<'a> {
    pub table: &'a CoefficientTable,
    pub cfg: EvaluatorConfig,
    even: Vec<Option<ActionContext>>,
    odd: Vec<Option<ActionContext>>,
    k_even: Vec<Result<f64>>,
    k_odd: Vec<Result<f64>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(table: &'a CoefficientTable, cfg: EvaluatorConfig) -> Result<Self> {
        cfg.validate()?;
        let ctx = |h: f64| ActionContext::new(h, table.theta).ok();
        let even = table.char_even.iter().map(|&h| ctx(h)).collect();
        let odd = table.char_odd.iter().enumerate().map(|(n, &h)| if n == 0 { None } else { ctx(h) }).collect();
        let k_even = (0..=table.n_max).map(|n| coupling(table, SymmetryClass::Even, n)).collect();
        let k_odd = (0..=table.n_max).map(|n| coupling(table, SymmetryClass::Odd, n)).collect();
        Ok(Evaluator { table, cfg, even, odd, k_even, k_odd })
    }

    pub fn context(&self, class: SymmetryClass, n: usize) -> Option<&ActionContext> {
        match class {
            SymmetryClass::Even => self.even.get(n)?.as_ref(),
            SymmetryClass::Odd => self.odd.get(n)?.as_ref(),
        }
    }

    /// Branch the dispatch rule selects.
    pub fn branch(&self, class: SymmetryClass, n: usize, u: f64) -> Result<Branch> {
        let h = self.table.char_value(class, n)?;
        if !(u >= 0.0) || !u.is_finite() {
            return domain(format!("radial coordinate must be finite and >= 0, got {u}"));
        }
        if n < self.cfg.n0 || 1.0 / h >= self.cfg.eps0 || h <= 0.0 || self.context(class, n).is_none() {
            return Ok(Branch::Series);
        }
        let arg = if self.cfg.literal_cosh_u { u } else { 2.0 * u };
        if 2.0 * self.table.theta * arg.cosh() / h < self.cfg.eps1 {
            Ok(Branch::WkbInside)
        } else {
            Ok(Branch::WkbTurning)
        }
    }

    fn coupling(&self, class: SymmetryClass, n: usize) -> Result<f64> {
        let k = match class {
            SymmetryClass::Even => self.k_even.get(n),
            SymmetryClass::Odd => self.k_odd.get(n),
        };
        k.cloned().unwrap_or_else(|| domain(format!("index {n} above table n_max {}", self.table.n_max)))
    }

    pub fn evaluate(&self, class: SymmetryClass, n: usize, u: f64) -> Result<RadialValue> {
        let b = self.branch(class, n, u)?;
        match self.evaluate_with(class, n, u, b) {
            Err(MathieuError::Precision(_)) if b != Branch::Series => {
                let mut v = self.evaluate_with(class, n, u, Branch::Series)?;
                v.fell_back = true;
                Ok(v)
            }
            other => other,
        }
    }

    /// Evaluates with a forced branch.
    pub fn evaluate_with(&self, class: SymmetryClass, n: usize, u: f64, b: Branch) -> Result<RadialValue> {
        let v = unscaled(&self.evaluate_scaled_with(class, n, u, b)?, b, false);
        if !(v.ratio.norm().is_finite() && v.first_kind.is_finite()) {
            return Err(annotate(MathieuError::Precision(format!("{class:?} n={n} at u={u} leaves the double range")), b));
        }
        Ok(v)
    }

    /// Dispatched evaluation in scaled form; also returns the branch used and
    /// whether a WKB precision error forced the series.
    pub fn evaluate_scaled(&self, class: SymmetryClass, n: usize, u: f64) -> Result<(ScaledRadial, Branch, bool)> {
        let b = self.branch(class, n, u)?;
        match self.evaluate_scaled_with(class, n, u, b) {
            Err(MathieuError::Precision(_)) if b != Branch::Series => {
                Ok((self.evaluate_scaled_with(class, n, u, Branch::Series)?, Branch::Series, true))
            }
            Err(e) => Err(e),
            Ok(v) => Ok((v, b, false)),
        }
    }

    pub fn evaluate_scaled_with(&self, class: SymmetryClass, n: usize, u: f64, b: Branch) -> Result<ScaledRadial> {
        let run = || -> Result<ScaledRadial> {
            if b == Branch::Series {
                let s = series_ratio(self.table, class, n, u)?;
                return Ok(ScaledRadial {
                    ratio: s.ratio,
                    ratio_du: s.ratio_du,
                    first_kind: s.first_kind,
                    first_kind_du: s.first_kind_du,
                    shift: 0.0,
                });
            }
            let ctx = self
                .context(class, n)
                .ok_or_else(|| MathieuError::Domain(format!("{class:?} n={n} has no turning point")))?;
            if b == Branch::WkbInside {
                inside_scaled(ctx, class, self.coupling(class, n)?, u)
            } else {
                turning_scaled(ctx, class, u)
            }
        };
        run().map_err(|e| annotate(e, b))
    }

    /// ODE residual of Im(ratio) on a grid; `None` marks points near a node.
    pub fn residual(&self, class: SymmetryClass, n: usize, u_grid: &[f64]) -> Result<ResidualReport> {
        let h = self.table.char_value(class, n)?;
        let th = self.table.theta;
        let mut eps = Vec::with_capacity(u_grid.len());
        let mut branches = Vec::with_capacity(u_grid.len());
        let mut masked = 0;
        for &u in u_grid {
            if !(u > 0.0) {
                return domain(format!("residual grid must lie in (0, u_max], got {u}"));
            }
            let q = h - 2.0 * th * (2.0 * u).cosh();
            // Step shrinks with the local wavenumber; fourth-order stencil on y'.
            let d = (self.cfg.fd_step / (q.abs().sqrt() / 10.0).max(1.0)).min(0.25 * u);
            let b = self.branch(class, n, u)?;
            let c = self.evaluate(class, n, u)?;
            let b_used = c.branch;
            let at = |x: f64| self.evaluate_with(class, n, x, b_used).map(|v| v.ratio_du.im);
            let ypp = (8.0 * (at(u + d)? - at(u - d)?) - (at(u + 2.0 * d)? - at(u - 2.0 * d)?)) / (12.0 * d);
            let y = c.ratio.im;
            let yp = c.ratio_du.im;
            let amp = (y * y + yp * yp / q.abs().max(1e-300)).sqrt();
            branches.push(b);
            if y.abs() < 1e-2 * amp || q == 0.0 {
                masked += 1;
                eps.push(None);
            } else {
                eps.push(Some(((ypp / y - q) / q).abs()));
            }
        }
        Ok(ResidualReport { eps, branches, masked })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub eps: Vec<Option<f64>>,
    pub branches: Vec<Branch>,
    /// Points skipped because the function is near a node.
    pub masked: usize,
}

impl ResidualReport {
    pub fn values(&self) -> Vec<f64> {
        self.eps.iter().flatten().copied().collect()
    }

    pub fn max(&self) -> f64 {
        self.values().into_iter().fold(0.0, f64::max)
    }

    pub fn median(&self) -> f64 {
        let mut v = self.values();
        if v.is_empty() {
            return f64::NAN;
        }
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        if v.len() % 2 == 1 {
            v[m]
        } else {
            0.5 * (v[m - 1] + v[m])
        }
    }
}

fn unscaled(s: &ScaledRadial, branch: Branch, fell_back: bool) -> RadialValue {
    let w = s.unscale();
    RadialValue {
        ratio: w.ratio,
        ratio_du: w.ratio_du,
        first_kind: w.first_kind,
        first_kind_du: w.first_kind_du,
        branch,
        fell_back,
    }
}

/// One-shot evaluation; builds an [`Evaluator`] on the fly.
pub fn evaluate(table: &CoefficientTable, cfg: &EvaluatorConfig, class: SymmetryClass, n: usize, u: f64) -> Result<RadialValue> {
    Evaluator::new(table, *cfg)?.evaluate(class, n, u)
}

pub fn residual(table: &CoefficientTable, cfg: &EvaluatorConfig, class: SymmetryClass, n: usize, u_grid: &[f64]) -> Result<ResidualReport> {
    Evaluator::new(table, *cfg)?.residual(class, n, u_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::build_tables;
    use std::f64::consts::PI;

    fn table() -> CoefficientTable {
        build_tables(PI * PI, 40, 140).unwrap()
    }

    #[test]
    fn branch_rules() {
        let t = table();
        let ev = Evaluator::new(&t, EvaluatorConfig::default()).unwrap();
        for u in [0.0, 0.5, 2.0, 4.0] {
            assert_eq!(ev.branch(SymmetryClass::Even, 3, u).unwrap(), Branch::Series);
        }
        assert_eq!(ev.branch(SymmetryClass::Even, 20, 0.1).unwrap(), Branch::WkbInside);
        let us = ev.context(SymmetryClass::Even, 20).unwrap().u_star;
        assert_eq!(ev.branch(SymmetryClass::Even, 20, us).unwrap(), Branch::WkbTurning);
        assert_eq!(ev.branch(SymmetryClass::Even, 14, 0.1).unwrap(), Branch::Series);
    }

    #[test]
    fn seam_moves_with_eps1() {
        let t = table();
        let seam = |eps1: f64| {
            let ev = Evaluator::new(&t, EvaluatorConfig { eps1, ..Default::default() }).unwrap();
            (0..3000).map(|i| i as f64 * 1e-3).find(|&u| ev.branch(SymmetryClass::Even, 30, u).unwrap() == Branch::WkbTurning).unwrap()
        };
        let (a, b, c) = (seam(0.05), seam(0.1), seam(0.2));
        assert!(a < b && b < c);
    }

    #[test]
    fn seam_is_continuous() {
        let t = table();
        let ev = Evaluator::new(&t, EvaluatorConfig::default()).unwrap();
        let h = t.char_even[20];
        let ub = (0.1 * h / (2.0 * t.theta)).acosh() / 2.0;
        let a = ev.evaluate(SymmetryClass::Even, 20, ub - 1e-3).unwrap();
        let b = ev.evaluate(SymmetryClass::Even, 20, ub + 1e-3).unwrap();
        assert_ne!(a.branch, b.branch);
        // Extrapolate each side to the seam with its own derivative.
        let la = a.ratio + a.ratio_du * 1e-3;
        let lb = b.ratio - b.ratio_du * 1e-3;
        assert!((la - lb).norm() / la.norm() < 1e-2);
    }

    #[test]
    fn series_residual_is_tiny() {
        let t = table();
        let r = residual(&t, &EvaluatorConfig::default(), SymmetryClass::Even, 8, &[0.5]).unwrap();
        assert!(r.eps[0].unwrap() < 1e-6, "{:?}", r.eps);
        let r = residual(&t, &EvaluatorConfig::default(), SymmetryClass::Odd, 20, &[0.5]).unwrap();
        assert_eq!(r.branches[0], Branch::WkbInside);
    }

    #[test]
    fn radius_map_values() {
        assert!((radius_map(PI * PI, 0.0).unwrap() - PI).abs() < 1e-15);
        assert!((radius_map(PI * PI, 2f64.ln()).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!(radius_map(1.0, -1.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(EvaluatorConfig { eps0: 0.0, ..Default::default() }.validate().is_err());
        assert!(EvaluatorConfig { n0: 0, ..Default::default() }.validate().is_err());
        assert!(EvaluatorConfig::default().validate().is_ok());
    }
}
