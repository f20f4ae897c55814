//! Symmetric tridiagonal eigenpairs: Sturm-count bisection for eigenvalues and
//! a twisted factorisation for eigenvectors.
//!
//! Both steps keep tiny eigenvector components relatively accurate, which the
//! radial prefactors depend on (first Fourier coefficients reach 1e-135).

/// Number of eigenvalues strictly below `x`. `e[i]` couples rows i and i+1.
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let qq = if q == 0.0 { f64::MIN_POSITIVE } else { q };
        q = d[i] - x - e[i - 1] * e[i - 1] / qq;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the spectrum.
pub fn gershgorin(d: &[f64], e: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..d.len() {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i < e.len() { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (lo, hi)
}

/// k-th smallest eigenvalue (0-based), bisected to adjacent floats.
pub fn eigenvalue(d: &[f64], e: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(d, e);
    let pad = 1e-12 * (lo.abs() + hi.abs()) + f64::MIN_POSITIVE;
    lo -= pad;
    hi += pad;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unit eigenvector for eigenvalue `lambda` via the twisted factorisation
/// T - lambda = N_k D_k N_k^T with the twist index minimising |gamma_k|.
pub fn eigenvector(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    if n == 1 {
        return vec![1.0];
    }
    let guard = |v: f64| if v == 0.0 { f64::MIN_POSITIVE } else { v };
    let mut dp = vec![0.0; n];
    dp[0] = guard(d[0] - lambda);
    for i in 1..n {
        dp[i] = guard(d[i] - lambda - e[i - 1] * e[i - 1] / dp[i - 1]);
    }
    let mut dm = vec![0.0; n];
    dm[n - 1] = guard(d[n - 1] - lambda);
    for i in (0..n - 1).rev() {
        dm[i] = guard(d[i] - lambda - e[i] * e[i] / dm[i + 1]);
    }
    let mut k = 0;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let g = (dp[i] + dm[i] - (d[i] - lambda)).abs();
        if g < best {
            best = g;
            k = i;
        }
    }
    let mut z = vec![0.0; n];
    z[k] = 1.0;
    for i in (0..k).rev() {
        z[i] = -e[i] / dp[i] * z[i + 1];
    }
    for i in k..n - 1 {
        z[i + 1] = -e[i] / dm[i + 1] * z[i];
    }
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in z.iter_mut() {
        *v /= norm;
    }
    z
}
