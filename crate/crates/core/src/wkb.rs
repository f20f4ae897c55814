//! WKB approximations of the normalized radial ratios and the cosh-well demo.
//!
//! The momentum is `Q(u) = h - g cosh(c u)` with `g = 2 theta`, `c = 2` for the
//! radial Mathieu equation `y'' = Q y`.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::angular::{CoefficientTable, SymmetryClass};
use crate::error::{domain, MathieuError, Result};
use crate::quad::integrate;
use crate::radial::k_factor;
use crate::special::airy_scaled;

/// Half-width of the window around the turning point where the Langer
/// prefactor is replaced by its Taylor limit.
pub const DESINGULARIZE_WINDOW: f64 = 1e-4;
/// Beyond this action e^{-S*} leaves the double range.
pub const MAX_ACTION: f64 = 700.0;

const QUAD_REL_TOL: f64 = 1e-13;
const QUAD_PANELS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionContext {
    pub h: f64,
    pub theta: f64,
    pub u_star: f64,
    pub s_star: f64,
    g: f64,
    c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Action {
    pub s: f64,
    /// S(u) - S*, computed directly from the turning point.
    pub s_rel: f64,
    /// |S'(u)|.
    pub sprime: f64,
    pub regime: Regime,
}

impl ActionContext {
    /// Radial Mathieu action for characteristic value `h`.
    pub fn new(h: f64, theta: f64) -> Result<Self> {
        Self::with_potential(h, 2.0 * theta, 2.0)
    }

    /// `Q(u) = h - g cosh(c u)`.
    pub fn with_potential(h: f64, g: f64, c: f64) -> Result<Self> {
        if !(g > 0.0) || !(c > 0.0) || !h.is_finite() || !g.is_finite() || !c.is_finite() {
            return domain(format!("action needs g > 0 and c > 0, got g={g}, c={c}"));
        }
        if !(h > g) {
            return domain(format!("no turning point: h={h} must exceed {g}"));
        }
        let u_star = (h / g).acosh() / c;
        let mut ctx = ActionContext { h, theta: 0.5 * g, u_star, s_star: 0.0, g, c };
        ctx.s_star = ctx.segment(u_star, Regime::Below);
        Ok(ctx)
    }

    /// Q(u), written as a product of sinh factors so it stays accurate near u*.
    pub fn q(&self, u: f64) -> f64 {
        let c2 = 0.5 * self.c;
        2.0 * self.g * (c2 * (self.u_star + u)).sinh() * (c2 * (self.u_star - u)).sinh()
    }

    pub fn dq(&self, u: f64) -> f64 {
        -self.g * self.c * (self.c * u).sinh()
    }

    /// -Q'(u*).
    pub fn kappa(&self) -> f64 {
        self.g * self.c * (self.c * self.u_star).sinh()
    }

    pub fn sprime0(&self) -> f64 {
        self.q(0.0).sqrt()
    }

    /// |S - S*| over a distance `len` from u* on one side, with t = u* -+ s^2.
    fn segment(&self, len: f64, side: Regime) -> f64 {
        if len <= 0.0 {
            return 0.0;
        }
        let sg = if side == Regime::Below { -1.0 } else { 1.0 };
        let f = |s: f64| self.q(self.u_star + sg * s * s).abs().sqrt() * 2.0 * s;
        integrate(f, 0.0, len.sqrt(), 1e-300, QUAD_REL_TOL, QUAD_PANELS).value
    }

    pub fn action(&self, u: f64) -> Result<Action> {
        if !(u >= 0.0) || !u.is_finite() {
            return domain(format!("action needs finite u >= 0, got {u}"));
        }
        let sprime = self.q(u).abs().sqrt();
        if u <= self.u_star {
            let (s, s_rel) = if u < 0.5 * self.u_star {
                let s = integrate(|t: f64| self.q(t).max(0.0).sqrt(), 0.0, u, 1e-300, QUAD_REL_TOL, QUAD_PANELS).value;
                (s, s - self.s_star)
            } else {
                let r = -self.segment(self.u_star - u, Regime::Below);
                (self.s_star + r, r)
            };
            Ok(Action { s, s_rel, sprime, regime: Regime::Below })
        } else {
            let r = self.segment(u - self.u_star, Regime::Above);
            Ok(Action { s: self.s_star + r, s_rel: r, sprime, regime: Regime::Above })
        }
    }
}

/// Radial data with an exponential factor split off: the true ratio is
/// `ratio * e^-shift` and the true first-kind value is `first_kind * e^shift`.
/// Products such as ratio(u>) first_kind(u<) then never leave the double range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledRadial {
    pub ratio: Complex64,
    pub ratio_du: Complex64,
    pub first_kind: f64,
    pub first_kind_du: f64,
    pub shift: f64,
}

/// Unscaled WKB values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbValue {
    /// Me1/Me1'(0) or Ne1/Ne1(0).
    pub ratio: Complex64,
    pub ratio_du: Complex64,
    /// Ce/ce(0) or Se/se'(0).
    pub first_kind: f64,
    pub first_kind_du: f64,
}

impl ScaledRadial {
    pub fn unscale(&self) -> WkbValue {
        let (d, g) = ((-self.shift).exp(), self.shift.exp());
        WkbValue {
            ratio: self.ratio * d,
            ratio_du: self.ratio_du * d,
            first_kind: self.first_kind * g,
            first_kind_du: self.first_kind_du * g,
        }
    }
}

/// WKB coupling K (see [`k_factor`]); an underflow to zero is harmless, a
/// vanishing denominator is not.
pub fn coupling(table: &CoefficientTable, class: SymmetryClass, n: usize) -> Result<f64> {
    let k = k_factor(table, class, n)?;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(MathieuError::Precision(format!("WKB coupling of {class:?} n={n} is {k:e}")));
    }
    Ok(k)
}

/// Inside-barrier formula (exponential plus cosh/sinh term).
pub fn wkb_inside(ctx: &ActionContext, table: &CoefficientTable, class: SymmetryClass, n: usize, u: f64) -> Result<WkbValue> {
    Ok(inside_scaled(ctx, class, coupling(table, class, n)?, u)?.unscale())
}

/// Inside formula with shift S(u), for a precomputed coupling `k`.
pub fn inside_scaled(ctx: &ActionContext, class: SymmetryClass, k: f64, u: f64) -> Result<ScaledRadial> {
    let a = ctx.action(u)?;
    if a.regime == Regime::Above || a.sprime == 0.0 {
        return domain(format!("inside formula used at u={u} beyond the turning point {}", ctx.u_star));
    }
    let sp0 = ctx.sprime0();
    let sp = a.sprime;
    // d ln sqrt(S') / du
    let g = ctx.dq(u) / (4.0 * sp * sp);
    let s = a.s;
    let e2 = (-2.0 * s).exp();
    // K cosh S e^S and K sinh S e^S.
    let big = (k.ln() + 2.0 * s).exp();
    let kc = 0.5 * (big + k);
    let ks = 0.5 * (big - k);
    let (ch, sh) = (0.5 * (1.0 + e2), 0.5 * (1.0 - e2));
    let half_pi = 0.5 * PI;
    Ok(match class {
        SymmetryClass::Even => {
            let amp = (sp0 * sp).sqrt().recip();
            let b = (sp0 / sp).sqrt();
            ScaledRadial {
                ratio: Complex64::new(-amp, -half_pi * b * kc),
                ratio_du: Complex64::new(-amp * (-sp - g), -half_pi * b * (sp * ks - g * kc)),
                first_kind: b * ch,
                first_kind_du: b * (sp * sh - g * ch),
                shift: s,
            }
        }
        SymmetryClass::Odd => {
            let amp = (sp0 / sp).sqrt();
            let b = (sp0 * sp).sqrt().recip();
            ScaledRadial {
                ratio: Complex64::new(amp, half_pi * b * ks),
                ratio_du: Complex64::new(amp * (-sp - g), half_pi * b * (sp * kc - g * ks)),
                first_kind: b * sh,
                first_kind_du: b * (sp * ch - g * sh),
                shift: s,
            }
        }
    })
}

/// Langer pieces shared by the Mathieu formula and the demo: the Airy argument
/// and its u-derivative, |S - S*|^{1/6} / |S'|^{1/2} and its log-derivative.
struct Langer {
    x: f64,
    dx: f64,
    l: f64,
    dl: f64,
}

fn langer(ctx: &ActionContext, u: f64, a: &Action) -> Langer {
    let d = u - ctx.u_star;
    let x = -d.signum() * (1.5 * a.s_rel.abs()).powf(2.0 / 3.0);
    if d.abs() < DESINGULARIZE_WINDOW {
        // Q = -kappa d (1 + al d + be d^2) and x = -kappa^{1/3} d (1 + p d + r d^2)
        // from x x'^2 = Q; l = l0 ((1 + p d + r d^2) / (1 + al d + be d^2))^{1/4}.
        let kappa = ctx.kappa();
        let al = ctx.g * ctx.c * ctx.c * (ctx.c * ctx.u_star).cosh() / (2.0 * kappa);
        let be = ctx.c * ctx.c / 6.0;
        let p = al / 5.0;
        let r = (be - 8.0 * p * p) / 7.0;
        let num = 1.0 + p * d + r * d * d;
        let den = 1.0 + al * d + be * d * d;
        let l0 = (2.0f64 / 3.0).powf(1.0 / 6.0) * kappa.powf(-1.0 / 6.0);
        return Langer {
            x,
            dx: -kappa.cbrt() * (1.0 + 2.0 * p * d + 3.0 * r * d * d),
            l: l0 * (num / den).powf(0.25),
            dl: 0.25 * ((p + 2.0 * r * d) / num - (al + 2.0 * be * d) / den),
        };
    }
    let sp = a.sprime;
    let dsp = ctx.q(u).signum() * ctx.dq(u) / (2.0 * sp);
    Langer {
        x,
        dx: -sp / x.abs().sqrt(),
        l: a.s_rel.abs().powf(1.0 / 6.0) / sp.sqrt(),
        dl: d.signum() * sp / (6.0 * a.s_rel.abs()) - 0.5 * dsp / sp,
    }
}

/// sqrt(pi) (3/2)^{1/6}.
fn langer_constant() -> f64 {
    PI.sqrt() * 1.5f64.powf(1.0 / 6.0)
}

/// Turning-point (Langer/Airy) formula.
pub fn wkb_turning(ctx: &ActionContext, table: &CoefficientTable, class: SymmetryClass, n: usize, u: f64) -> Result<WkbValue> {
    class.check_index(n)?;
    if n > table.n_max {
        return domain(format!("index {n} above table n_max {}", table.n_max));
    }
    if ctx.s_star > MAX_ACTION {
        return Err(MathieuError::Precision(format!("S* = {} is beyond the double range of e^-S*", ctx.s_star)));
    }
    Ok(turning_scaled(ctx, class, u)?.unscale())
}

/// Turning formula with shift S* - zeta (S(u) below u*, S* above).
///
/// The first-kind value uses the coupling implied by the Airy connection,
/// K = 2 e^{-2 S*} / (pi S'(0)), so it joins the inside formula without K.
pub fn turning_scaled(ctx: &ActionContext, class: SymmetryClass, u: f64) -> Result<ScaledRadial> {
    let a = ctx.action(u)?;
    let lg = langer(ctx, u, &a);
    let air = airy_scaled(lg.x)?;
    let damp = (-2.0 * air.zeta).exp();
    let w = Complex64::new(air.bi, air.ai * damp);
    let wd = Complex64::new(air.bip, air.aip * damp) * lg.dx;
    let sp0 = ctx.sprime0();
    let (pref, cf) = match class {
        SymmetryClass::Even => (-langer_constant() / sp0.sqrt(), langer_constant() * sp0.sqrt()),
        SymmetryClass::Odd => (langer_constant() * sp0.sqrt(), langer_constant() / sp0.sqrt()),
    };
    Ok(ScaledRadial {
        ratio: w * (pref * lg.l),
        ratio_du: (w * lg.dl + wd) * (pref * lg.l),
        first_kind: cf * lg.l * air.ai,
        first_kind_du: cf * lg.l * (air.ai * lg.dl + air.aip * lg.dx),
        shift: ctx.s_star - air.zeta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoRegime {
    Inside,
    Turning,
    Outside,
}

impl DemoRegime {
    pub fn label(self) -> &'static str {
        match self {
            DemoRegime::Inside => "inside",
            DemoRegime::Turning => "turning",
            DemoRegime::Outside => "outside",
        }
    }
}

/// Schrodinger problem `-psi'' + V psi = E psi` with `V = -V0 cosh(c x)`,
/// `m = 1/2`, `hbar = 1`, and a Neumann condition at x = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbDemoProblem {
    pub v0: f64,
    pub energy: f64,
    /// c in cosh(c x); 2 by default.
    pub cosh_factor: f64,
    /// Regime seams as fractions of the turning point.
    pub inner_seam: f64,
    pub outer_seam: f64,
}

/// Turning point of the reference case V0 = 1, E = -20, c = 2.
fn reference_x_star() -> f64 {
    20f64.acosh() / 2.0
}

impl WkbDemoProblem {
    pub fn new(v0: f64, energy: f64) -> Self {
        let xs = reference_x_star();
        WkbDemoProblem { v0, energy, cosh_factor: 2.0, inner_seam: 0.66 / xs, outer_seam: 2.3 / xs }
    }

    pub fn context(&self) -> Result<ActionContext> {
        if !(self.v0 > 0.0) || !(self.energy < 0.0) {
            return domain(format!("demo needs V0 > 0 and E < 0, got V0={}, E={}", self.v0, self.energy));
        }
        if !(self.inner_seam > 0.0 && self.inner_seam < 1.0 && self.outer_seam > 1.0) {
            return domain("demo seams must satisfy 0 < inner < 1 < outer");
        }
        ActionContext::with_potential(-self.energy, self.v0, self.cosh_factor)
    }

    /// Seam positions in x.
    pub fn seams(&self) -> Result<(f64, f64)> {
        let ctx = self.context()?;
        Ok((self.inner_seam * ctx.u_star, self.outer_seam * ctx.u_star))
    }
}

/// Piecewise WKB wavefunction with unit amplitude A.
pub fn demo_cosh_well(problem: &WkbDemoProblem, x: f64) -> Result<(f64, DemoRegime)> {
    let ctx = problem.context()?;
    demo_with_context(problem, &ctx, x)
}

/// Same as [`demo_cosh_well`] with a prebuilt context.
pub fn demo_with_context(problem: &WkbDemoProblem, ctx: &ActionContext, x: f64) -> Result<(f64, DemoRegime)> {
    let a = ctx.action(x)?;
    let (x1, x2) = (problem.inner_seam * ctx.u_star, problem.outer_seam * ctx.u_star);
    if x < x1 {
        return Ok((a.s.cosh() / a.sprime.sqrt(), DemoRegime::Inside));
    }
    if x > x2 {
        let psi = ctx.s_star.exp() / a.sprime.sqrt() * (a.s_rel - FRAC_PI_4).cos();
        return Ok((psi, DemoRegime::Outside));
    }
    let lg = langer(ctx, x, &a);
    let air = airy_scaled(lg.x)?;
    let ea = (ctx.s_star - air.zeta).exp();
    let eb = 0.5 * (air.zeta - ctx.s_star).exp();
    let psi = langer_constant() * lg.l * (air.ai * ea + air.bi * eb);
    Ok((psi, DemoRegime::Turning))
}
