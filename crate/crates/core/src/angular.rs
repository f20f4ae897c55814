//! Characteristic values, Fourier coefficients and angular Mathieu functions.
//!
//! Each of the four parity sub-problems (ce of even/odd index, se of odd/even
//! index) is a symmetric tridiagonal eigenproblem in the Fourier coefficients.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{domain, MathieuError, Result};
use crate::tridiag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryClass {
    /// ce_n, characteristic values a_n, n >= 0.
    Even,
    /// se_n, characteristic values b_n, n >= 1.
    Odd,
}

impl SymmetryClass {
    pub fn check_index(self, n: usize) -> Result<()> {
        if self == SymmetryClass::Odd && n == 0 {
            return domain("odd class has no n = 0 function");
        }
        Ok(())
    }

    /// Fourier order of the first stored coefficient for index n.
    pub fn offset(self, n: usize) -> usize {
        match (self, n % 2) {
            (SymmetryClass::Even, 0) => 0,
            (SymmetryClass::Even, _) => 1,
            (SymmetryClass::Odd, 1) => 1,
            (SymmetryClass::Odd, _) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub theta: f64,
    pub n_max: usize,
    pub p_max: usize,
    /// a_n for n = 0..=n_max.
    pub char_even: Vec<f64>,
    /// b_n for n = 0..=n_max; entry 0 is an unused 0.0 (no se_0).
    pub char_odd: Vec<f64>,
    /// Compact coefficients: `coeff_even[n][j]` multiplies cos((2j + offset) v).
    pub coeff_even: Vec<Vec<f64>>,
    pub coeff_odd: Vec<Vec<f64>>,
    pub truncation_warning: Option<String>,
}

struct SubProblem {
    d: Vec<f64>,
    e: Vec<f64>,
    /// Fourier order of row 0.
    offset: usize,
    /// Row 0 carries sqrt(2) A_0 (ce of even index).
    sym_first: bool,
}

fn sub_problem(theta: f64, class: SymmetryClass, parity: usize, p_max: usize) -> SubProblem {
    let offset = class.offset(parity);
    let size = if p_max < offset { 0 } else { (p_max - offset) / 2 + 1 };
    let mut d: Vec<f64> = (0..size).map(|j| ((2 * j + offset) as f64).powi(2)).collect();
    let mut e = vec![theta; size.saturating_sub(1)];
    let sym_first = class == SymmetryClass::Even && offset == 0;
    if sym_first && !e.is_empty() {
        e[0] = std::f64::consts::SQRT_2 * theta;
    }
    if offset == 1 && size > 0 {
        match class {
            SymmetryClass::Even => d[0] += theta,
            SymmetryClass::Odd => d[0] -= theta,
        }
    }
    SubProblem { d, e, offset, sym_first }
}

impl SubProblem {
    fn mode(&self, k: usize, class: SymmetryClass) -> Result<(f64, Vec<f64>)> {
        let lam = tridiag::eigenvalue(&self.d, &self.e, k);
        let mut z = tridiag::eigenvector(&self.d, &self.e, lam);
        if self.sym_first {
            z[0] /= std::f64::consts::SQRT_2;
        }
        let s: f64 = match class {
            SymmetryClass::Even => z.iter().sum(),
            SymmetryClass::Odd => z.iter().enumerate().map(|(j, c)| (2 * j + self.offset) as f64 * c).sum(),
        };
        if s == 0.0 || !s.is_finite() {
            return Err(MathieuError::Precision(format!("sign condition undecidable for {class:?} mode {k}")));
        }
        if s < 0.0 {
            for c in z.iter_mut() {
                *c = -*c;
            }
        }
        Ok((lam, z))
    }
}

/// Solves all four sub-problems at `theta` for modes up to `n_max`.
pub fn build_tables(theta: f64, n_max: usize, p_max: usize) -> Result<CoefficientTable> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return domain(format!("theta must be finite and >= 0, got {theta}"));
    }
    if p_max < n_max {
        return Err(MathieuError::Config(format!("p_max {p_max} below n_max {n_max}")));
    }
    let jobs = [(SymmetryClass::Even, 0), (SymmetryClass::Even, 1), (SymmetryClass::Odd, 1), (SymmetryClass::Odd, 0)];
    let solved: Vec<Result<Vec<(usize, f64, Vec<f64>)>>> = {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(class, parity)| {
                let sp = sub_problem(theta, class, parity, p_max);
                let first = if class == SymmetryClass::Odd && parity == 0 { 2 } else { parity };
                (first..=n_max)
                    .step_by(2)
                    .enumerate()
                    .map(|(k, n)| sp.mode(k, class).map(|(v, c)| (n, v, c)))
                    .collect()
            })
            .collect()
    };
    let mut char_even = vec![f64::NAN; n_max + 1];
    let mut char_odd = vec![0.0; n_max + 1];
    let mut coeff_even = vec![Vec::new(); n_max + 1];
    let mut coeff_odd = vec![Vec::new(); n_max + 1];
    for (job, modes) in jobs.iter().zip(solved) {
        for (n, v, c) in modes? {
            match job.0 {
                SymmetryClass::Even => {
                    char_even[n] = v;
                    coeff_even[n] = c;
                }
                SymmetryClass::Odd => {
                    char_odd[n] = v;
                    coeff_odd[n] = c;
                }
            }
        }
    }
    let truncation_warning = truncation_check(theta, n_max, p_max, char_even[n_max]);
    Ok(CoefficientTable { theta, n_max, p_max, char_even, char_odd, coeff_even, coeff_odd, truncation_warning })
}

fn truncation_check(theta: f64, n_max: usize, p_max: usize, a_top: f64) -> Option<String> {
    let sp = sub_problem(theta, SymmetryClass::Even, n_max % 2, p_max + 50);
    let again = tridiag::eigenvalue(&sp.d, &sp.e, n_max / 2);
    let rel = (again - a_top).abs() / a_top.abs().max(1.0);
    (rel > 1e-10).then(|| format!("a_{n_max} moves by {rel:e} (relative) when p_max grows from {p_max} to {}", p_max + 50))
}

impl CoefficientTable {
    fn check(&self, class: SymmetryClass, n: usize) -> Result<()> {
        class.check_index(n)?;
        if n > self.n_max {
            return domain(format!("index {n} above table n_max {}", self.n_max));
        }
        Ok(())
    }

    /// a_n or b_n.
    pub fn char_value(&self, class: SymmetryClass, n: usize) -> Result<f64> {
        self.check(class, n)?;
        Ok(match class {
            SymmetryClass::Even => self.char_even[n],
            SymmetryClass::Odd => self.char_odd[n],
        })
    }

    /// Compact coefficient slice; entry j belongs to Fourier order 2j + offset.
    pub fn coeffs(&self, class: SymmetryClass, n: usize) -> Result<&[f64]> {
        self.check(class, n)?;
        Ok(match class {
            SymmetryClass::Even => &self.coeff_even[n],
            SymmetryClass::Odd => &self.coeff_odd[n],
        })
    }

    /// A_p^(n) or B_p^(n) by Fourier order p (zero for the wrong parity).
    pub fn coefficient(&self, class: SymmetryClass, n: usize, p: usize) -> Result<f64> {
        let c = self.coeffs(class, n)?;
        let off = class.offset(n);
        if p < off || (p - off) % 2 == 1 {
            return Ok(0.0);
        }
        Ok(c.get((p - off) / 2).copied().unwrap_or(0.0))
    }

    /// Writes the table as JSON; f64 values round-trip exactly.
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).map_err(|e| MathieuError::Config(format!("table cache: {e}")))?;
        std::fs::write(path, text).map_err(|e| MathieuError::Config(format!("table cache {}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| MathieuError::Config(format!("table cache {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| MathieuError::Config(format!("table cache {}: {e}", path.display())))
    }
}

/// Cache file name for a given key inside `dir`.
pub fn cache_path(dir: &Path, theta: f64, n_max: usize, p_max: usize) -> PathBuf {
    dir.join(format!("mathieu_{:016x}_{n_max}_{p_max}.json", theta.to_bits()))
}

/// Loads the table from `dir` when present, otherwise builds and stores it.
pub fn build_tables_cached(theta: f64, n_max: usize, p_max: usize, dir: &Path) -> Result<CoefficientTable> {
    let path = cache_path(dir, theta, n_max, p_max);
    if let Ok(t) = CoefficientTable::load(&path) {
        if t.theta.to_bits() == theta.to_bits() && t.n_max == n_max && t.p_max == p_max {
            return Ok(t);
        }
    }
    let t = build_tables(theta, n_max, p_max)?;
    std::fs::create_dir_all(dir).map_err(|e| MathieuError::Config(format!("table cache {}: {e}", dir.display())))?;
    t.save(&path)?;
    Ok(t)
}

/// ce_n(v) / se_n(v) (deriv = 0) or the v-derivative (deriv = 1).
pub fn angular_eval(table: &CoefficientTable, class: SymmetryClass, n: usize, v: f64, deriv: u8) -> Result<f64> {
    if deriv > 1 {
        return domain(format!("deriv must be 0 or 1, got {deriv}"));
    }
    let (f, fp) = angular_pair(table, class, n, v)?;
    Ok(if deriv == 0 { f } else { fp })
}

/// Function value and v-derivative together.
pub fn angular_pair(table: &CoefficientTable, class: SymmetryClass, n: usize, v: f64) -> Result<(f64, f64)> {
    let c = table.coeffs(class, n)?;
    let off = class.offset(n);
    let (mut f, mut fp) = (0.0, 0.0);
    for (j, &a) in c.iter().enumerate() {
        let k = (2 * j + off) as f64;
        let (s, co) = (k * v).sin_cos();
        match class {
            SymmetryClass::Even => {
                f += a * co;
                fp -= a * k * s;
            }
            SymmetryClass::Odd => {
                f += a * s;
                fp += a * k * co;
            }
        }
    }
    Ok((f, fp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_theta_is_harmonic() {
        let t = build_tables(0.0, 12, 40).unwrap();
        for n in 0..=12 {
            assert!((t.char_even[n] - (n * n) as f64).abs() < 1e-12);
            if n > 0 {
                assert!((t.char_odd[n] - (n * n) as f64).abs() < 1e-12);
                assert!((t.coefficient(SymmetryClass::Odd, n, n).unwrap() - 1.0).abs() < 1e-15);
            }
            let want = if n == 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
            assert!((t.coefficient(SymmetryClass::Even, n, n).unwrap() - want).abs() < 1e-15);
            for p in 0..=20 {
                if p != n {
                    assert_eq!(t.coefficient(SymmetryClass::Even, n, p).unwrap(), 0.0);
                }
            }
        }
        for v in [0.0, 0.3, 1.7, -2.2] {
            let c = angular_eval(&t, SymmetryClass::Even, 2, v, 0).unwrap();
            assert!((c - (2.0 * v).cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn theta_one_a0() {
        let t = build_tables(1.0, 4, 100).unwrap();
        assert!((t.char_even[0] + 0.455_138_604_1).abs() < 1e-9);
    }

    #[test]
    fn normalisation_and_sign() {
        let t = build_tables(PI * PI, 30, 130).unwrap();
        for n in 0..=30 {
            let c = t.coeffs(SymmetryClass::Even, n).unwrap();
            let norm = if n % 2 == 0 { c[0] * c[0] } else { 0.0 } + c.iter().map(|x| x * x).sum::<f64>();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!(angular_eval(&t, SymmetryClass::Even, n, 0.0, 0).unwrap() > 0.0);
            if n > 0 {
                let b = t.coeffs(SymmetryClass::Odd, n).unwrap();
                assert!((b.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(angular_eval(&t, SymmetryClass::Odd, n, 0.0, 1).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn recursion_residuals() {
        let th = 2.5;
        let t = build_tables(th, 20, 120).unwrap();
        for n in 0..=20 {
            for class in [SymmetryClass::Even, SymmetryClass::Odd] {
                if class == SymmetryClass::Odd && n == 0 {
                    continue;
                }
                let h = t.char_value(class, n).unwrap();
                let cmax = t.coeffs(class, n).unwrap().iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let c = |p: i64| if p < 0 { 0.0 } else { t.coefficient(class, n, p as usize).unwrap() };
                for p in 0..60i64 {
                    let cp = c(p);
                    if (class == SymmetryClass::Odd && p == 0) || (cp == 0.0 && c(p + 2) == 0.0 && c(p - 2) == 0.0) {
                        continue;
                    }
                    // Mathieu recursion in Fourier order with the low-order reflections.
                    let mut r = (h - (p * p) as f64) * cp - th * (c(p - 2) + c(p + 2));
                    match (class, p) {
                        (SymmetryClass::Even, 0) => r = h * cp - th * c(2),
                        (SymmetryClass::Even, 2) => r = (h - 4.0) * cp - th * (2.0 * c(0) + c(4)),
                        (SymmetryClass::Even, 1) => r = (h - 1.0 - th) * cp - th * c(3),
                        (SymmetryClass::Odd, 1) => r = (h - 1.0 + th) * cp - th * c(3),
                        (SymmetryClass::Odd, 2) => r = (h - 4.0) * cp - th * c(4),
                        _ => {}
                    }
                    assert!(r.abs() < 1e-10 * cmax * h.abs().max(1.0), "{class:?} n={n} p={p} r={r}");
                }
            }
        }
    }

    #[test]
    fn errors() {
        assert!(build_tables(-1.0, 4, 10).is_err());
        assert!(build_tables(1.0, 10, 5).is_err());
        let t = build_tables(1.0, 4, 20).unwrap();
        assert!(angular_eval(&t, SymmetryClass::Odd, 0, 0.1, 0).is_err());
        assert!(angular_eval(&t, SymmetryClass::Even, 5, 0.1, 0).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("mathieu-cache-test-{}", std::process::id()));
        let a = build_tables_cached(1.5, 6, 30, &dir).unwrap();
        let b = build_tables_cached(1.5, 6, 30, &dir).unwrap();
        assert_eq!(a, b);
        std::fs::remove_dir_all(&dir).ok();
    }
}
