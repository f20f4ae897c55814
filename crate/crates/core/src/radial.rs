//! Radial Mathieu functions from Bessel-product series.
//!
//! `Me1 = Ce + i Fey` and `Ne1 = Se + i Gey` are summed as prefactor times a
//! series of products `H_a(x1) J_b(x2)` with `x1 = sqrt(theta) e^u`,
//! `x2 = sqrt(theta) e^-u`. The normalized ratios `Me1/Me1'(0)` and
//! `Ne1/Ne1(0)` never need the prefactor, so they stay finite at any index.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::angular::{angular_pair, CoefficientTable, SymmetryClass};
use crate::error::{domain, MathieuError, Result};
use crate::special::{batch_derivative, bessel_j_batch, hankel1_batch};

/// Stop once this many consecutive terms fall below `SERIES_REL_TOL` of the sum.
pub const SERIES_REL_TOL: f64 = 1e-14;
const SMALL_TERMS_TO_STOP: usize = 3;
/// Partial sums this much larger than the result signal heavy cancellation.
pub const CANCELLATION_FLAG: f64 = 1e6;
/// Squared leading coefficients below this make the prefactor untrustworthy.
pub const PREFACTOR_FLOOR: f64 = 1e-200;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialKindValue {
    /// Third kind: Me1 (even class) or Ne1 (odd class).
    pub me1: Complex64,
    pub me1_du: Complex64,
}

impl RadialKindValue {
    /// Ce or Se.
    pub fn first(&self) -> f64 {
        self.me1.re
    }

    /// Fey or Gey.
    pub fn second(&self) -> f64 {
        self.me1.im
    }

    /// Second third-kind function, Ce - i Fey.
    pub fn me2(&self) -> Complex64 {
        self.me1.conj()
    }
}

/// Bare Bessel-product sum, before the prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub sum: Complex64,
    pub sum_du: Complex64,
    pub terms: usize,
    /// max |partial sum| / |sum|.
    pub loss: f64,
}

impl SeriesSum {
    pub fn cancellation_flagged(&self) -> bool {
        self.loss > CANCELLATION_FLAG
    }
}

fn check(table: &CoefficientTable, class: SymmetryClass, n: usize, u: f64) -> Result<()> {
    class.check_index(n)?;
    if n > table.n_max {
        return domain(format!("index {n} above table n_max {}", table.n_max));
    }
    if !(u >= 0.0) || !u.is_finite() {
        return domain(format!("radial coordinate must be finite and >= 0, got {u}"));
    }
    if !(table.theta > 0.0) {
        return domain("radial series need theta > 0");
    }
    Ok(())
}

/// Term layout of one class: (sign, Hankel order, J order) pairs for compact index j,
/// together with the alternating-sign exponent.
fn term_orders(class: SymmetryClass, n: usize, j: usize) -> (usize, [(f64, usize, usize); 2]) {
    match (class, n % 2) {
        (SymmetryClass::Even, 0) => (j, [(1.0, j, j), (0.0, 0, 0)]),
        (SymmetryClass::Even, _) => (j, [(1.0, j + 1, j), (1.0, j, j + 1)]),
        (SymmetryClass::Odd, 1) => (j, [(1.0, j + 1, j), (-1.0, j, j + 1)]),
        (SymmetryClass::Odd, _) => {
            let p = j + 1;
            (p, [(1.0, p - 1, p + 1), (-1.0, p + 1, p - 1)])
        }
    }
}

fn peak_index(c: &[f64]) -> usize {
    c.iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Sums the Bessel-product series for Me1 or Ne1 without the prefactor.
pub fn series_sum(table: &CoefficientTable, class: SymmetryClass, n: usize, u: f64) -> Result<SeriesSum> {
    check(table, class, n, u)?;
    let c = table.coeffs(class, n)?;
    let k = table.theta.sqrt();
    let (x1, x2) = (k * u.exp(), k * (-u).exp());
    let top = c.len() + 3;
    let h = hankel1_batch(top, x1)?;
    let hd = batch_derivative(&h);
    let jv = bessel_j_batch(top, x2)?;
    let jd = batch_derivative(&jv);
    let peak = peak_index(c);

    let mut sum = Complex64::new(0.0, 0.0);
    let mut sum_du = Complex64::new(0.0, 0.0);
    let mut max_partial = 0.0f64;
    let mut small = 0;
    let mut last = f64::INFINITY;
    for (j, &a) in c.iter().enumerate() {
        let (p, pieces) = term_orders(class, n, j);
        let sign = if p % 2 == 0 { a } else { -a };
        let mut t = Complex64::new(0.0, 0.0);
        let mut td = Complex64::new(0.0, 0.0);
        for &(s, ha, jb) in pieces.iter() {
            if s == 0.0 {
                continue;
            }
            t += h[ha] * (s * jv[jb]);
            td += hd[ha] * (s * x1 * jv[jb]) - h[ha] * (s * x2 * jd[jb]);
        }
        let term = t * sign;
        if !term.norm().is_finite() || !td.norm().is_finite() {
            return Err(MathieuError::Truncation {
                what: format!("Bessel-product series for {class:?} n={n} at u={u} overflowed at term {j}"),
                last_term: last,
            });
        }
        sum += term;
        sum_du += td * sign;
        max_partial = max_partial.max(sum.norm());
        last = term.norm();
        if last < SERIES_REL_TOL * sum.norm() {
            small += 1;
        } else {
            small = 0;
        }
        if small >= SMALL_TERMS_TO_STOP && j > peak {
            let loss = if sum.norm() > 0.0 { max_partial / sum.norm() } else { f64::INFINITY };
            return Ok(SeriesSum { sum, sum_du, terms: j + 1, loss });
        }
    }
    Err(MathieuError::Truncation {
        what: format!("Bessel-product series for {class:?} n={n} at u={u} did not settle within p_max"),
        last_term: last,
    })
}

/// Angular data that enters the prefactors.
struct EdgeData {
    /// ce(pi/2) or ce'(pi/2), se(pi/2) or se'(pi/2), as the index parity demands.
    half: f64,
    /// ce(0) or se'(0).
    origin: f64,
    /// Leading coefficient A0, A1, B1 or B2.
    lead: f64,
}

fn edge_data(table: &CoefficientTable, class: SymmetryClass, n: usize) -> Result<EdgeData> {
    let (f_half, fp_half) = angular_pair(table, class, n, FRAC_PI_2)?;
    let (f0, fp0) = angular_pair(table, class, n, 0.0)?;
    let lead = table.coeffs(class, n)?[0];
    Ok(match (class, n % 2) {
        (SymmetryClass::Even, 0) => EdgeData { half: f_half, origin: f0, lead },
        (SymmetryClass::Even, _) => EdgeData { half: fp_half, origin: f0, lead },
        (SymmetryClass::Odd, 1) => EdgeData { half: f_half, origin: fp0, lead },
        (SymmetryClass::Odd, _) => EdgeData { half: fp_half, origin: fp0, lead },
    })
}

/// Power of sqrt(theta) attached to the leading coefficient: 0, 1, 1 or 2.
fn theta_power(class: SymmetryClass, n: usize) -> i32 {
    match (class, n % 2) {
        (SymmetryClass::Even, 0) => 0,
        (SymmetryClass::Odd, 0) => 2,
        _ => 1,
    }
}

/// Factor K with Im(Me1/Me1'(0)) at 0 equal to -pi K / 2 (even class) and
/// Im(Ne1/Ne1(0))' at 0 equal to +pi K / 2 (odd class).
pub fn k_factor(table: &CoefficientTable, class: SymmetryClass, n: usize) -> Result<f64> {
    class.check_index(n)?;
    let e = edge_data(table, class, n)?;
    let s = table.theta.sqrt().powi(theta_power(class, n));
    Ok((s * e.lead / e.half).powi(2))
}

/// Multiplier turning the bare sum into the normalized ratio.
fn ratio_factor(theta: f64, class: SymmetryClass, n: usize, half: f64) -> Complex64 {
    match (class, n % 2) {
        (SymmetryClass::Even, 0) => Complex64::new(PI / (2.0 * half), 0.0) / I,
        (SymmetryClass::Even, _) => I * (PI * theta.sqrt() / (2.0 * half)),
        (SymmetryClass::Odd, 1) => I * (PI * theta.sqrt() / (2.0 * half)),
        (SymmetryClass::Odd, _) => -I * (PI * theta / (2.0 * half)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrefactorEntry {
    /// Angular-data closed form; this is the value used by the series.
    pub value: f64,
    /// Closed form through the series boundary data, Me1'(0) or Ne1(0).
    pub series_form: Complex64,
    /// |series_form / value - 1|.
    pub discrepancy: f64,
    /// Me1(0) or Ne1(0) and the u-derivative at 0.
    pub at_zero: Complex64,
    pub du_at_zero: Complex64,
}

/// Prefactor C_n (even class) or D_n (odd class).
pub fn prefactor(table: &CoefficientTable, class: SymmetryClass, n: usize) -> Result<PrefactorEntry> {
    check(table, class, n, 0.0)?;
    let e = edge_data(table, class, n)?;
    if e.lead * e.lead < PREFACTOR_FLOOR {
        return Err(MathieuError::Precision(format!(
            "leading coefficient {:e} of {class:?} n={n} too small for the series prefactor",
            e.lead
        )));
    }
    let th = table.theta;
    let sq = th.sqrt();
    let value = match (class, n % 2) {
        (SymmetryClass::Even, 0) => e.half * e.origin / (e.lead * e.lead),
        (SymmetryClass::Even, _) => -e.half * e.origin / (sq * e.lead * e.lead),
        (SymmetryClass::Odd, 1) => e.half * e.origin / (sq * e.lead * e.lead),
        (SymmetryClass::Odd, _) => -e.half * e.origin / (th * e.lead * e.lead),
    };
    if !value.is_finite() || value == 0.0 {
        return Err(MathieuError::Precision(format!("prefactor of {class:?} n={n} is {value:e}")));
    }
    let s = series_sum(table, class, n, 0.0)?;
    let at_zero = s.sum * value;
    let du_at_zero = s.sum_du * value;
    let two_i = 2.0 * I;
    let series_form = match (class, n % 2) {
        (SymmetryClass::Even, 0) => du_at_zero * PI / (two_i * e.half),
        (SymmetryClass::Even, _) => -du_at_zero * (PI * sq) / (two_i * e.half),
        (SymmetryClass::Odd, 1) => -at_zero * (PI * sq) / (two_i * e.half),
        (SymmetryClass::Odd, _) => at_zero * (PI * th) / (two_i * e.half),
    };
    let discrepancy = (series_form / value - 1.0).norm();
    Ok(PrefactorEntry { value, series_form, discrepancy, at_zero, du_at_zero })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prefactors {
    pub theta: f64,
    /// C_n for n = 0..=n_max.
    pub c: Vec<Result<PrefactorEntry>>,
    /// D_n for n = 0..=n_max; entry 0 is a domain error.
    pub d: Vec<Result<PrefactorEntry>>,
}

impl Prefactors {
    /// Largest discrepancy over the entries that could be formed.
    pub fn max_discrepancy(&self) -> f64 {
        self.c
            .iter()
            .chain(self.d.iter())
            .filter_map(|e| e.as_ref().ok())
            .fold(0.0, |m, e| m.max(e.discrepancy))
    }
}

/// All prefactors of a table. Entries past the trustworthy range hold their error.
pub fn prefactors(table: &CoefficientTable) -> Result<Prefactors> {
    if !(table.theta > 0.0) {
        return domain("prefactors need theta > 0");
    }
    let c = (0..=table.n_max).map(|n| prefactor(table, SymmetryClass::Even, n)).collect();
    let d = (0..=table.n_max).map(|n| prefactor(table, SymmetryClass::Odd, n)).collect();
    Ok(Prefactors { theta: table.theta, c, d })
}

/// Me1_n(u) with its u-derivative.
pub fn me1_series_full(table: &CoefficientTable, n: usize, u: f64) -> Result<RadialKindValue> {
    third_kind(table, SymmetryClass::Even, n, u)
}

/// Ne1_n(u) with its u-derivative.
pub fn ne1_series_full(table: &CoefficientTable, n: usize, u: f64) -> Result<RadialKindValue> {
    third_kind(table, SymmetryClass::Odd, n, u)
}

pub fn me1_series(table: &CoefficientTable, n: usize, u: f64) -> Result<Complex64> {
    Ok(me1_series_full(table, n, u)?.me1)
}

pub fn ne1_series(table: &CoefficientTable, n: usize, u: f64) -> Result<Complex64> {
    Ok(ne1_series_full(table, n, u)?.me1)
}

fn third_kind(table: &CoefficientTable, class: SymmetryClass, n: usize, u: f64) -> Result<RadialKindValue> {
    let p = prefactor(table, class, n)?;
    let s = series_sum(table, class, n, u)?;
    Ok(RadialKindValue { me1: s.sum * p.value, me1_du: s.sum_du * p.value })
}

/// J_k(x) and J_k'(x) for signed k.
struct SignedJ {
    j: Vec<f64>,
    jd: Vec<f64>,
}

impl SignedJ {
    fn new(top: usize, x: f64) -> Result<Self> {
        let j = bessel_j_batch(top + 1, x)?;
        let jd = batch_derivative(&j);
        Ok(SignedJ { j, jd })
    }

    fn get(&self, k: i64) -> (f64, f64) {
        let m = k.unsigned_abs() as usize;
        let s = if k < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
        (s * self.j[m], s * self.jd[m])
    }
}

/// First-kind series shifted to the dominant coefficient so that no term is
/// much larger than the result. Returns the unnormalized value and u-derivative.
fn shifted_first_kind(table: &CoefficientTable, class: SymmetryClass, n: usize, u: f64) -> Result<(f64, f64)> {
    let c = table.coeffs(class, n)?;
    let s = peak_index(c) as i64;
    let k = table.theta.sqrt();
    let (x1, x2) = (k * u.exp(), k * (-u).exp());
    let top = c.len() + s as usize + 3;
    let j1 = SignedJ::new(top, x1)?;
    let j2 = SignedJ::new(top, x2)?;
    // (extra order on the raised index, sign between the two products)
    let (shift, pm) = match (class, n % 2) {
        (SymmetryClass::Even, 0) => (0, 1.0),
        (SymmetryClass::Even, _) => (1, 1.0),
        (SymmetryClass::Odd, 1) => (1, -1.0),
        (SymmetryClass::Odd, _) => (2, -1.0),
    };
    let (mut f, mut fd) = (0.0, 0.0);
    for (l, &a) in c.iter().enumerate() {
        let l = l as i64;
        let a = if l % 2 == 0 { a } else { -a };
        let (lo, hi) = (l - s, l + s + shift);
        let (a2, a2d) = j2.get(lo);
        let (b1, b1d) = j1.get(hi);
        let (b2, b2d) = j2.get(hi);
        let (a1, a1d) = j1.get(lo);
        f += a * (a2 * b1 + pm * b2 * a1);
        fd += a * (-x2 * a2d * b1 + a2 * x1 * b1d + pm * (-x2 * b2d * a1 + b2 * x1 * a1d));
    }
    Ok((f, fd))
}

/// Normalized radial data from the series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRatio {
    /// Me1/Me1'(0) (even class) or Ne1/Ne1(0) (odd class).
    pub ratio: Complex64,
    pub ratio_du: Complex64,
    /// Ce/ce(0) (even class) or Se/se'(0) (odd class).
    pub first_kind: f64,
    pub first_kind_du: f64,
    /// Im ratio(0) (even class) or Im ratio'(0) (odd class).
    pub im_scale: f64,
    pub loss: f64,
}

/// Normalized ratio with the recessive imaginary part from the shifted series.
pub fn series_ratio(table: &CoefficientTable, class: SymmetryClass, n: usize, u: f64) -> Result<SeriesRatio> {
    let s = series_sum(table, class, n, u)?;
    let e = edge_data(table, class, n)?;
    let f = ratio_factor(table.theta, class, n, e.half);
    let raw = s.sum * f;
    let raw_du = s.sum_du * f;
    let kf = k_factor(table, class, n)?;
    let (g, gd) = shifted_first_kind(table, class, n, u)?;
    let (norm, im_scale) = match class {
        SymmetryClass::Even => (shifted_first_kind(table, class, n, 0.0)?.0, -0.5 * PI * kf),
        SymmetryClass::Odd => (shifted_first_kind(table, class, n, 0.0)?.1, 0.5 * PI * kf),
    };
    if norm == 0.0 || !norm.is_finite() {
        return Err(MathieuError::Precision(format!("first-kind normalization vanished for {class:?} n={n}")));
    }
    let (first_kind, first_kind_du) = (g / norm, gd / norm);
    Ok(SeriesRatio {
        ratio: Complex64::new(raw.re, im_scale * first_kind),
        ratio_du: Complex64::new(raw_du.re, im_scale * first_kind_du),
        first_kind,
        first_kind_du,
        im_scale,
        loss: s.loss,
    })
}
