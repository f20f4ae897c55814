//! Green functions of the Helmholtz equation for a slit in an infinite screen
//! and for a strip, as mode sums in elliptic coordinates.
//!
//! Units: the focal distance is `a`, so x + iy = (a/2) cosh(u + iv), and the
//! wavenumber is `k`; the Mathieu parameter is theta = (k a / 4)^2. The slit
//! occupies the focal segment u = 0 (the screen is the rest of the x axis);
//! the strip is the focal segment itself.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::angular::{CoefficientTable, SymmetryClass};
use crate::error::{domain, MathieuError, Result};
use crate::evaluator::{Evaluator, EvaluatorConfig};
use crate::special::hankel1_batch;
use crate::wkb::ScaledRadial;

/// Terms whose last five magnitudes exceed this fraction of the sum get flagged.
pub const TAIL_TOL: f64 = 1e-6;
/// Minimum source-to-field distance, relative to `a`.
pub const SINGULAR_RADIUS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Geometry {
    Slit,
    Strip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundaryCondition {
    Neumann,
    Dirichlet,
}

impl Geometry {
    pub fn label(self) -> &'static str {
        match self {
            Geometry::Slit => "slit",
            Geometry::Strip => "strip",
        }
    }
}

impl BoundaryCondition {
    pub fn label(self) -> &'static str {
        match self {
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::Dirichlet => "dirichlet",
        }
    }
}

/// Elliptic coordinates with u >= 0 and v in (-pi, pi].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EllipticPoint {
    pub u: f64,
    pub v: f64,
}

impl EllipticPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !u.is_finite() || !v.is_finite() || u < 0.0 {
            return domain(format!("elliptic point needs finite u >= 0 and v, got ({u}, {v})"));
        }
        Ok(EllipticPoint { u, v: wrap_angle(v) })
    }
}

fn wrap_angle(v: f64) -> f64 {
    let mut w = v.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Points on the focal segment get u = 0 and v = arccos(2x/a) >= 0.
pub fn to_elliptic(x: f64, y: f64, a: f64) -> Result<EllipticPoint> {
    if !(a > 0.0 && a.is_finite()) || !x.is_finite() || !y.is_finite() {
        return domain(format!("to_elliptic needs finite x, y and a > 0, got ({x}, {y}, {a})"));
    }
    let z = Complex64::new(2.0 * x / a, 2.0 * y / a);
    // acosh(z) = 2 ln( sqrt((z+1)/2) + sqrt((z-1)/2) ), accurate near the foci
    let w = 2.0 * (((z + 1.0) * 0.5).sqrt() + ((z - 1.0) * 0.5).sqrt()).ln();
    let (mut u, mut v) = (w.re, w.im);
    if u < 0.0 {
        u = -u;
        v = -v;
    }
    if y == 0.0 {
        if x.abs() <= a / 2.0 {
            u = 0.0;
            v = (2.0 * x / a).clamp(-1.0, 1.0).acos();
        } else {
            v = if x > 0.0 { 0.0 } else { PI };
        }
    } else if v.signum() != y.signum() && u > 0.0 {
        v = -v;
    }
    EllipticPoint::new(u, v)
}

pub fn to_cartesian(p: EllipticPoint, a: f64) -> (f64, f64) {
    let h = a / 2.0;
    (h * p.u.cosh() * p.v.cos(), h * p.u.sinh() * p.v.sin())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GreenProblem {
    pub geometry: Geometry,
    pub bc: BoundaryCondition,
    pub k: f64,
    pub a: f64,
    pub source: EllipticPoint,
    pub n_terms: usize,
}

impl GreenProblem {
    pub fn new(geometry: Geometry, bc: BoundaryCondition, k: f64, a: f64, source: EllipticPoint) -> Self {
        GreenProblem { geometry, bc, k, a, source, n_terms: 60 }
    }

    /// a = 2 and k = pi a/lambda, so one wavelength is 2 / (a/lambda).
    pub fn from_a_over_lambda(geometry: Geometry, bc: BoundaryCondition, a_over_lambda: f64, sx: f64, sy: f64) -> Result<Self> {
        if !(a_over_lambda > 0.0 && a_over_lambda.is_finite()) {
            return domain(format!("a/lambda must be positive, got {a_over_lambda}"));
        }
        let source = to_elliptic(sx, sy, 2.0)?;
        Ok(GreenProblem::new(geometry, bc, PI * a_over_lambda, 2.0, source))
    }

    pub fn theta(&self) -> f64 {
        let q = self.k * self.a / 4.0;
        q * q
    }

    pub fn source_xy(&self) -> (f64, f64) {
        to_cartesian(self.source, self.a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite() && self.a > 0.0 && self.a.is_finite()) {
            return domain(format!("need k > 0 and a > 0, got k={} a={}", self.k, self.a));
        }
        if self.n_terms == 0 {
            return Err(MathieuError::Config("n_terms must be positive".into()));
        }
        if self.source.u <= 0.0 {
            return domain(format!("source lies on the focal segment (u0 = {})", self.source.u));
        }
        if self.geometry == Geometry::Slit && (self.source.v == 0.0 || self.source.v == PI) {
            return domain("source lies on the screen".to_string());
        }
        Ok(())
    }
}

/// Which mode sum to use. The half-plane sums share the machinery with the
/// slit and strip sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kernel {
    SlitNeumann,
    SlitDirichlet,
    StripNeumann,
    StripDirichlet,
    WallNeumann,
    WallDirichlet,
}

impl Kernel {
    fn of(geometry: Geometry, bc: BoundaryCondition) -> Self {
        match (geometry, bc) {
            (Geometry::Slit, BoundaryCondition::Neumann) => Kernel::SlitNeumann,
            (Geometry::Slit, BoundaryCondition::Dirichlet) => Kernel::SlitDirichlet,
            (Geometry::Strip, BoundaryCondition::Neumann) => Kernel::StripNeumann,
            (Geometry::Strip, BoundaryCondition::Dirichlet) => Kernel::StripDirichlet,
        }
    }

    fn wall(bc: BoundaryCondition) -> Self {
        match bc {
            BoundaryCondition::Neumann => Kernel::WallNeumann,
            BoundaryCondition::Dirichlet => Kernel::WallDirichlet,
        }
    }

    fn class(self) -> SymmetryClass {
        match self {
            Kernel::SlitNeumann | Kernel::StripDirichlet | Kernel::WallNeumann => SymmetryClass::Even,
            _ => SymmetryClass::Odd,
        }
    }

    fn mirrored(self) -> bool {
        matches!(self, Kernel::SlitNeumann | Kernel::SlitDirichlet)
    }
}

/// Field value with its elliptic-coordinate derivatives and the truncation
/// indicator (sum of the last five term magnitudes over the sum magnitude).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldValue {
    pub g: Complex64,
    pub dg_du: Complex64,
    pub dg_dv: Complex64,
    pub tail: f64,
}

/// Radial data for the modes n_lo..n_terms of one class at one u.
type Row = Vec<ScaledRadial>;

pub struct GreenSolver<'a> {
    pub problem: GreenProblem,
    kernel: Kernel,
    ev: Evaluator<'a>,
    n_lo: usize,
    mirror: bool,
    /// Source after mirroring into v <= 0 (slits only).
    src: EllipticPoint,
    src_row: Row,
    zero_row: Row,
    src_ang: Vec<f64>,
    /// Angular coefficients trimmed to their significant range.
    coeffs: Vec<(usize, Vec<f64>)>,
    max_order: usize,
}

impl<'a> GreenSolver<'a> {
    pub fn new(problem: GreenProblem, table: &'a CoefficientTable, cfg: EvaluatorConfig) -> Result<Self> {
        Self::with_kernel(problem, Kernel::of(problem.geometry, problem.bc), table, cfg)
    }

    fn with_kernel(problem: GreenProblem, kernel: Kernel, table: &'a CoefficientTable, cfg: EvaluatorConfig) -> Result<Self> {
        problem.validate()?;
        let theta = problem.theta();
        if (table.theta - theta).abs() > 1e-12 * theta.max(1.0) {
            return Err(MathieuError::Config(format!("table built for theta={} but the problem needs {}", table.theta, theta)));
        }
        if table.n_max + 1 < problem.n_terms {
            return Err(MathieuError::Config(format!("table has n_max={} but {} terms were requested", table.n_max, problem.n_terms)));
        }
        let class = kernel.class();
        let n_lo = match class {
            SymmetryClass::Even => 0,
            SymmetryClass::Odd => 1,
        };
        let mirror = kernel.mirrored() && problem.source.v > 0.0;
        let src = EllipticPoint { u: problem.source.u, v: if mirror { -problem.source.v } else { problem.source.v } };
        let ev = Evaluator::new(table, cfg)?;
        let coeffs: Vec<(usize, Vec<f64>)> = (n_lo..problem.n_terms)
            .map(|n| {
                let c = table.coeffs(class, n)?;
                let big = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let last = c.iter().rposition(|x| x.abs() > 1e-18 * big).unwrap_or(0);
                Ok((class.offset(n), c[..=last].to_vec()))
            })
            .collect::<Result<_>>()?;
        let max_order = coeffs.iter().map(|(o, c)| o + 2 * (c.len() - 1)).max().unwrap_or(0);
        let mut s = GreenSolver { problem, kernel, ev, n_lo, mirror, src, src_row: Vec::new(), zero_row: Vec::new(), src_ang: Vec::new(), coeffs, max_order };
        s.src_row = s.row(src.u)?;
        s.zero_row = s.row(0.0)?;
        s.src_ang = s.angular(src.v).into_iter().map(|(f, _)| f).collect();
        Ok(s)
    }

    fn row(&self, u: f64) -> Result<Row> {
        let class = self.kernel.class();
        (self.n_lo..self.problem.n_terms).map(|n| Ok(self.ev.evaluate_scaled(class, n, u)?.0)).collect()
    }

    /// (f, f') of every mode at v.
    fn angular(&self, v: f64) -> Vec<(f64, f64)> {
        let even = self.kernel.class() == SymmetryClass::Even;
        let trig: Vec<(f64, f64)> = (0..=self.max_order).map(|m| (m as f64 * v).sin_cos()).collect();
        self.coeffs
            .iter()
            .map(|(off, c)| {
                let (mut f, mut fp) = (0.0, 0.0);
                for (j, &cj) in c.iter().enumerate() {
                    let m = off + 2 * j;
                    let (s, co) = trig[m];
                    if even {
                        f += cj * co;
                        fp -= cj * m as f64 * s;
                    } else {
                        f += cj * s;
                        fp += cj * m as f64 * co;
                    }
                }
                (f, fp)
            })
            .collect()
    }

    /// Green function at p. Slit points on the screen line (v = 0 or pi) are
    /// taken on the upper side; use [`GreenSolver::field_on_side`] for the other.
    pub fn field(&self, p: EllipticPoint) -> Result<FieldValue> {
        self.field_on_side(p, p.v >= 0.0)
    }

    pub fn field_on_side(&self, p: EllipticPoint, upper: bool) -> Result<FieldValue> {
        self.check_distance(p)?;
        let row = self.row(p.u)?;
        Ok(self.assemble(p, upper, &row))
    }

    fn check_distance(&self, p: EllipticPoint) -> Result<()> {
        let (x, y) = to_cartesian(p, self.problem.a);
        let (x0, y0) = self.problem.source_xy();
        if (x - x0).hypot(y - y0) < SINGULAR_RADIUS * self.problem.a {
            return Err(MathieuError::Singularity(format!("field point ({x}, {y}) coincides with the source")));
        }
        Ok(())
    }

    fn assemble(&self, p: EllipticPoint, upper: bool, row: &Row) -> FieldValue {
        let (v, upper, vsign) = if self.mirror { (-p.v, !upper, -1.0) } else { (p.v, upper, 1.0) };
        let u = p.u;
        let u0 = self.src.u;
        let ang = self.angular(v);
        let kernel = self.kernel;
        let mut g = Complex64::new(0.0, 0.0);
        let mut gu = g;
        let mut gv = g;
        let mut mags = Vec::with_capacity(row.len());
        for (i, f) in row.iter().enumerate() {
            let s = &self.src_row[i];
            let z = &self.zero_row[i];
            // P = ratio(u>) first(u<), Q = ratio(u) ratio(u0) / (ratio or ratio' at 0)
            let (p_val, p_du) = if u <= u0 {
                let e = (f.shift - s.shift).exp();
                (s.ratio * f.first_kind * e, s.ratio * f.first_kind_du * e)
            } else {
                let e = (s.shift - f.shift).exp();
                (f.ratio * s.first_kind * e, f.ratio_du * s.first_kind * e)
            };
            let denom = if kernel.class() == SymmetryClass::Even { z.ratio } else { z.ratio_du };
            let qe = s.ratio / denom * (z.shift - f.shift - s.shift).exp();
            let (q_val, q_du) = (f.ratio * qe, f.ratio_du * qe);
            let (c, cu) = match kernel {
                Kernel::SlitNeumann if upper => (q_val, q_du),
                Kernel::SlitNeumann => (2.0 * p_val - q_val, 2.0 * p_du - q_du),
                Kernel::SlitDirichlet if upper => (-q_val, -q_du),
                Kernel::SlitDirichlet => (q_val - 2.0 * p_val, q_du - 2.0 * p_du),
                Kernel::StripNeumann => (q_val - p_val, q_du - p_du),
                Kernel::StripDirichlet => (p_val - q_val, p_du - q_du),
                Kernel::WallNeumann => (2.0 * p_val, 2.0 * p_du),
                Kernel::WallDirichlet => (-2.0 * p_val, -2.0 * p_du),
            };
            let (a, ap) = ang[i];
            let a0 = self.src_ang[i];
            let t = c * (a * a0 / PI);
            g += t;
            gu += cu * (a * a0 / PI);
            gv += c * (ap * a0 / PI);
            mags.push(t.norm());
        }
        let tail_sum: f64 = mags.iter().rev().take(5).sum();
        let tail = if g.norm() > 0.0 { tail_sum / g.norm() } else if tail_sum > 0.0 { f64::INFINITY } else { 0.0 };
        if matches!(kernel, Kernel::StripNeumann | Kernel::StripDirichlet) {
            let sign = if kernel == Kernel::StripNeumann { 1.0 } else { -1.0 };
            let (h, hu, hv) = self.free_pair(p, sign);
            g += h;
            gu += hu;
            gv += hv;
        }
        FieldValue { g, dg_du: gu, dg_dv: gv * vsign, tail }
    }

    /// [H0(k r) + sign H0(k r')] / 8i with its u and v derivatives, r' measured
    /// from the source mirrored in the x axis.
    fn free_pair(&self, p: EllipticPoint, sign: f64) -> (Complex64, Complex64, Complex64) {
        let h = self.problem.a / 2.0;
        let (x, y) = to_cartesian(p, self.problem.a);
        let (x0, y0) = self.problem.source_xy();
        let (xu, yu) = (h * p.u.sinh() * p.v.cos(), h * p.u.cosh() * p.v.sin());
        let (xv, yv) = (-h * p.u.cosh() * p.v.sin(), h * p.u.sinh() * p.v.cos());
        let k = self.problem.k;
        let inv8i = Complex64::new(0.0, -0.125);
        let mut out = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (ys, w) in [(y0, 1.0), (-y0, sign)] {
            let (dx, dy) = (x - x0, y - ys);
            let r = dx.hypot(dy);
            let hk = hankel1_batch(1, k * r).expect("positive distance");
            // d H0(kr) = -k H1(kr) dr
            let dr_du = (dx * xu + dy * yu) / r;
            let dr_dv = (dx * xv + dy * yv) / r;
            out.0 += hk[0] * w * inv8i;
            out.1 += -hk[1] * (k * dr_du * w) * inv8i;
            out.2 += -hk[1] * (k * dr_dv * w) * inv8i;
        }
        out
    }

    /// Evaluate on many points; radial data are shared between points with
    /// the same u. Points at the source are reported as NaN.
    pub fn grid(&self, points: &[(f64, f64)]) -> Result<FieldGrid> {
        let a = self.problem.a;
        let ell: Vec<EllipticPoint> = points.iter().map(|&(x, y)| to_elliptic(x, y, a)).collect::<Result<_>>()?;
        let mut keys: Vec<u64> = ell.iter().map(|p| p.u.to_bits()).collect();
        keys.sort_unstable();
        keys.dedup();
        let rows: Vec<Row> = keys.par_iter().map(|&b| self.row(f64::from_bits(b))).collect::<Result<_>>()?;
        let index: HashMap<u64, usize> = keys.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let values: Vec<(Complex64, f64, bool)> = ell
            .par_iter()
            .map(|p| {
                if self.check_distance(*p).is_err() {
                    return (Complex64::new(f64::NAN, f64::NAN), 0.0, true);
                }
                let fv = self.assemble(*p, p.v >= 0.0, &rows[index[&p.u.to_bits()]]);
                (fv.g, fv.tail, false)
            })
            .collect();
        let max_tail = values.iter().filter(|v| !v.2).map(|v| v.1).fold(0.0, f64::max);
        let flagged = values.iter().filter(|v| !v.2 && v.1 > TAIL_TOL).count();
        let skipped = values.iter().filter(|v| v.2).count();
        let (sx, sy) = self.problem.source_xy();
        Ok(FieldGrid {
            points: points.iter().zip(&ell).map(|(&(x, y), p)| GridPoint { x, y, u: p.u, v: p.v }).collect(),
            values: values.iter().map(|v| v.0).collect(),
            meta: GridMeta {
                geometry: self.problem.geometry.label(),
                bc: self.problem.bc.label(),
                theta: self.problem.theta(),
                k: self.problem.k,
                a,
                source: (sx, sy),
                n_terms: self.problem.n_terms,
                max_tail,
                flagged,
                skipped,
            },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridMeta {
    pub geometry: &'static str,
    pub bc: &'static str,
    pub theta: f64,
    pub k: f64,
    pub a: f64,
    pub source: (f64, f64),
    pub n_terms: usize,
    /// Largest truncation indicator over the grid.
    pub max_tail: f64,
    /// Points whose truncation indicator exceeds [`TAIL_TOL`].
    pub flagged: usize,
    /// Points skipped because they sit on the source.
    pub skipped: usize,
}

impl GridMeta {
    pub fn truncation_warning(&self) -> Option<String> {
        (self.flagged > 0).then(|| {
            format!("{} points have a series tail above {TAIL_TOL:e} of the sum (worst {:e}); raise the number of terms", self.flagged, self.max_tail)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldGrid {
    pub points: Vec<GridPoint>,
    pub values: Vec<Complex64>,
    pub meta: GridMeta,
}

/// Fixed-width scientific format with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

impl FieldGrid {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,u,v,re,im")?;
        for (p, g) in self.points.iter().zip(&self.values) {
            writeln!(w, "{},{},{},{},{},{}", sig17(p.x), sig17(p.y), sig17(p.u), sig17(p.v), sig17(g.re), sig17(g.im))?;
        }
        Ok(())
    }
}

/// nx by ny samples with both ends included, x varying fastest.
pub fn window_points(window: [f64; 4], nx: usize, ny: usize) -> Result<Vec<(f64, f64)>> {
    let [x0, x1, y0, y1] = window;
    if nx == 0 || ny == 0 || !window.iter().all(|w| w.is_finite()) {
        return domain(format!("bad sampling window {window:?} with {nx}x{ny} samples"));
    }
    let lin = |a: f64, b: f64, n: usize, i: usize| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
    Ok((0..ny).flat_map(|j| (0..nx).map(move |i| (lin(x0, x1, nx, i), lin(y0, y1, ny, j)))).collect())
}

pub fn green_slit(problem: GreenProblem, table: &CoefficientTable, cfg: EvaluatorConfig, p: EllipticPoint) -> Result<Complex64> {
    if problem.geometry != Geometry::Slit {
        return Err(MathieuError::Config("green_slit called with a strip problem".into()));
    }
    Ok(GreenSolver::new(problem, table, cfg)?.field(p)?.g)
}

pub fn green_strip(problem: GreenProblem, table: &CoefficientTable, cfg: EvaluatorConfig, p: EllipticPoint) -> Result<Complex64> {
    if problem.geometry != Geometry::Strip {
        return Err(MathieuError::Config("green_strip called with a slit problem".into()));
    }
    Ok(GreenSolver::new(problem, table, cfg)?.field(p)?.g)
}

/// Half-plane Green function with a wall on y = 0, closed form from Hankel
/// functions and as a mode sum.
pub struct HalfPlaneReport {
    pub closed_form: FieldGrid,
    pub mode_sum: FieldGrid,
    /// Largest |closed - sum| outside the exclusion discs around the source
    /// and its image.
    pub max_err: f64,
    pub compared: usize,
}

/// `problem.geometry` is ignored; the wall carries `problem.bc`.
pub fn half_plane_identity(problem: GreenProblem, table: &CoefficientTable, cfg: EvaluatorConfig, points: &[(f64, f64)], exclude_radius: f64) -> Result<HalfPlaneReport> {
    let solver = GreenSolver::with_kernel(problem, Kernel::wall(problem.bc), table, cfg)?;
    let mode_sum = solver.grid(points)?;
    let (x0, y0) = problem.source_xy();
    let sign = match problem.bc {
        BoundaryCondition::Neumann => 1.0,
        BoundaryCondition::Dirichlet => -1.0,
    };
    let inv4i = Complex64::new(0.0, -0.25);
    let closed: Vec<Complex64> = points
        .par_iter()
        .map(|&(x, y)| {
            let r = (x - x0).hypot(y - y0);
            let r2 = (x - x0).hypot(y + y0);
            if r < SINGULAR_RADIUS * problem.a || r2 < SINGULAR_RADIUS * problem.a {
                return Complex64::new(f64::NAN, f64::NAN);
            }
            let h = hankel1_batch(0, problem.k * r).expect("positive")[0];
            let h2 = hankel1_batch(0, problem.k * r2).expect("positive")[0];
            (h + h2 * sign) * inv4i
        })
        .collect();
    let mut max_err = 0.0f64;
    let mut compared = 0;
    for (i, &(x, y)) in points.iter().enumerate() {
        if (x - x0).hypot(y - y0) <= exclude_radius || (x - x0).hypot(y + y0) <= exclude_radius {
            continue;
        }
        let d = (closed[i] - mode_sum.values[i]).norm();
        if d.is_finite() {
            max_err = max_err.max(d);
            compared += 1;
        }
    }
    let mut closed_form = mode_sum.clone();
    closed_form.values = closed;
    Ok(HalfPlaneReport { closed_form, mode_sum, max_err, compared })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FarField {
    pub alpha: Vec<f64>,
    pub intensity: Vec<f64>,
    pub fraunhofer: Vec<f64>,
}

/// Transmitted intensity on the ellipse u = u_m for a slit lit from the
/// source at (u0, v0 - pi), normalised to its maximum over `alphas`.
pub fn far_field(problem: GreenProblem, table: &CoefficientTable, cfg: EvaluatorConfig, u_m: f64, v0: f64, alphas: &[f64]) -> Result<FarField> {
    if !(u_m > 0.0 && u_m.is_finite()) {
        return domain(format!("observation ellipse needs u_m > 0, got {u_m}"));
    }
    if !(v0 > 0.0 && v0 < PI) {
        return domain(format!("incidence angle v0 must lie in (0, pi), got {v0}"));
    }
    let mut pr = problem;
    pr.geometry = Geometry::Slit;
    pr.source = EllipticPoint::new(problem.source.u, v0 - PI)?;
    let solver = GreenSolver::new(pr, table, cfg)?;
    let row = solver.row(u_m)?;
    let raw: Vec<f64> = alphas
        .par_iter()
        .map(|&al| {
            let p = EllipticPoint::new(u_m, al)?;
            Ok(solver.assemble(p, true, &row).g.norm_sqr())
        })
        .collect::<Result<_>>()?;
    let top = raw.iter().cloned().fold(0.0, f64::max);
    let intensity = raw.iter().map(|v| if top > 0.0 { v / top } else { 0.0 }).collect();
    Ok(FarField { alpha: alphas.to_vec(), intensity, fraunhofer: fraunhofer(problem.theta(), v0, alphas) })
}

/// Single-slit pattern sinc^2(2 sqrt(theta) sin(alpha - v0)), 1 at alpha = v0.
pub fn fraunhofer(theta: f64, v0: f64, alphas: &[f64]) -> Vec<f64> {
    let s = 2.0 * theta.sqrt();
    alphas
        .iter()
        .map(|&al| {
            let x = s * (al - v0).sin();
            if x.abs() < 1e-8 {
                1.0 - x * x / 3.0
            } else {
                (x.sin() / x).powi(2)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::build_tables;

    #[test]
    fn coordinates_round_trip() {
        for &(x, y) in &[(0.3, 0.0), (-0.99, 0.0), (3.0, 0.0), (-3.0, 0.0), (0.5, 1e-9), (0.5, -1e-9), (2.0, -1.5), (-4.0, 2.0), (0.0, 0.0)] {
            let p = to_elliptic(x, y, 2.0).unwrap();
            let (xx, yy) = to_cartesian(p, 2.0);
            assert!((xx - x).abs() < 1e-12 && (yy - y).abs() < 1e-12, "({x},{y}) -> {p:?} -> ({xx},{yy})");
            assert!(y == 0.0 || p.v.signum() == y.signum());
        }
        let p = to_elliptic(0.3, 0.0, 2.0).unwrap();
        assert_eq!(p.u, 0.0);
        assert!((p.v - 0.3f64.acos()).abs() < 1e-15);
    }

    #[test]
    fn fraunhofer_shape() {
        let th = PI * PI;
        let v0 = PI / 2.0;
        let f = fraunhofer(th, v0, &[v0, v0 + PI / 6.0, v0 - PI / 6.0]);
        assert_eq!(f[0], 1.0);
        assert!(f[1] < 1e-25 && f[2] < 1e-25);
    }

    fn setup(geometry: Geometry, bc: BoundaryCondition) -> (GreenProblem, CoefficientTable) {
        let mut pr = GreenProblem::from_a_over_lambda(geometry, bc, 2.0, 1.0, 3.0).unwrap();
        pr.n_terms = 40;
        let t = build_tables(pr.theta(), 40, 140).unwrap();
        (pr, t)
    }

    #[test]
    fn dirichlet_slit_vanishes_on_screen() {
        let (pr, t) = setup(Geometry::Slit, BoundaryCondition::Dirichlet);
        let s = GreenSolver::new(pr, &t, EvaluatorConfig::default()).unwrap();
        let probe = s.field(to_elliptic(0.0, 1.0, 2.0).unwrap()).unwrap().g.norm();
        for &x in &[1.5, 2.5, -1.7] {
            let p = to_elliptic(x, 0.0, 2.0).unwrap();
            for up in [true, false] {
                assert!(s.field_on_side(p, up).unwrap().g.norm() < 1e-10 * probe);
            }
        }
    }

    #[test]
    fn strip_dirichlet_vanishes_on_strip() {
        let (pr, t) = setup(Geometry::Strip, BoundaryCondition::Dirichlet);
        let s = GreenSolver::new(pr, &t, EvaluatorConfig::default()).unwrap();
        let probe = s.field(to_elliptic(0.0, 1.0, 2.0).unwrap()).unwrap().g.norm();
        for &x in &[0.5, -0.2, 0.9] {
            let g = s.field(to_elliptic(x, 0.0, 2.0).unwrap()).unwrap().g.norm();
            assert!(g < 1e-8 * probe, "{x}: {g}");
        }
    }

    #[test]
    fn singular_at_source() {
        let (pr, t) = setup(Geometry::Slit, BoundaryCondition::Neumann);
        let s = GreenSolver::new(pr, &t, EvaluatorConfig::default()).unwrap();
        assert!(matches!(s.field(pr.source), Err(MathieuError::Singularity(_))));
        let mut bad = pr;
        bad.source = EllipticPoint::new(0.0, 1.0).unwrap();
        bad.geometry = Geometry::Strip;
        assert!(GreenSolver::new(bad, &t, EvaluatorConfig::default()).is_err());
    }

    #[test]
    fn slit_field_continuous_across_aperture() {
        for bc in [BoundaryCondition::Neumann, BoundaryCondition::Dirichlet] {
            let (pr, t) = setup(Geometry::Slit, bc);
            let s = GreenSolver::new(pr, &t, EvaluatorConfig::default()).unwrap();
            for &v in &[0.4, 1.3, 2.6] {
                // the same aperture point seen from each half plane
                let up = s.field_on_side(EllipticPoint::new(0.0, v).unwrap(), true).unwrap();
                let lo = s.field_on_side(EllipticPoint::new(0.0, -v).unwrap(), false).unwrap();
                let scale = up.g.norm().max(lo.g.norm());
                assert!((up.g - lo.g).norm() < 1e-10 * scale, "{bc:?} v={v}: {} vs {}", up.g, lo.g);
                // d/du points away from the aperture on both sides
                assert!((up.dg_du + lo.dg_du).norm() < 1e-8 * up.dg_du.norm().max(1e-300), "{bc:?} v={v}");
            }
        }
    }
}
