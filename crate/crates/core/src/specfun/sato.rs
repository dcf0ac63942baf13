use std::f64::consts::PI;

use super::{kummer_m, SeriesTolerance};
use crate::error::{Error, Result};

/// Products are exact in `f64` well past this index; beyond it the double
/// factorial is accumulated as a sum of logarithms.
const DIRECT_PRODUCT_LIMIT: u64 = 250;

/// `n!! = n (n - 2) (n - 4) ...`, with `0!! = 1!! = 1`. Overflows to
/// infinity for `n > 300`.
pub fn double_factorial(n: u64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// `ln(n!!)`, finite for every `n`.
pub fn ln_double_factorial(n: u64) -> f64 {
    if n <= DIRECT_PRODUCT_LIMIT {
        return double_factorial(n).ln();
    }
    // Split off the tail above the limit, keeping the parity of n.
    let head = if (n - DIRECT_PRODUCT_LIMIT).is_multiple_of(2) {
        DIRECT_PRODUCT_LIMIT
    } else {
        DIRECT_PRODUCT_LIMIT - 1
    };
    let mut acc = double_factorial(head).ln();
    let mut k = head + 2;
    while k <= n {
        acc += (k as f64).ln();
        k += 2;
    }
    acc
}

/// Terms `2^m / ((m+1) (m+2)!!) w^(2m+2)` of the power series in the mean
/// passage time of the Ornstein-Uhlenbeck process, `w = z sqrt(d0) / sigma`.
/// All terms are positive.
pub fn sato_series_terms(d0: f64, sigma: f64, z: f64) -> impl Iterator<Item = f64> {
    let ln_w = (z * d0.sqrt() / sigma).ln();
    // ln(n!!) for n = m + 2 and n = m + 1, advanced together.
    let mut ln_df_cur = 2f64.ln();
    let mut ln_df_prev = 0.0;
    (0u64..).map(move |m| {
        let mf = m as f64;
        let ln_term = mf * std::f64::consts::LN_2 + (2.0 * mf + 2.0) * ln_w
            - (mf + 1.0).ln()
            - ln_df_cur;
        let next = ((m + 3) as f64).ln() + ln_df_prev;
        ln_df_prev = ln_df_cur;
        ln_df_cur = next;
        ln_term.exp()
    })
}

/// `phi1(0, z) = (1/d0) [ (z sqrt(d0 pi) / sigma) M(1/2, 3/2, d0 z^2 / sigma^2)
///   + sum_m 2^m / ((m+1) (m+2)!!) (z sqrt(d0) / sigma)^(2m+2) ]`.
///
/// Used for the mean passage time of the exponential-decline
/// constant-volatility model. Large `z sqrt(d0) / sigma` overflows double
/// precision; that is reported rather than returned as infinity.
pub fn sato_phi1(d0: f64, sigma: f64, z: f64, tol: SeriesTolerance) -> Result<f64> {
    if !(d0 > 0.0) {
        return Err(Error::param("d0", d0, "must be positive"));
    }
    if !(sigma > 0.0) {
        return Err(Error::param("sigma", sigma, "must be positive"));
    }
    if !(z >= 0.0) {
        return Err(Error::param("z", z, "must be nonnegative"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let w = z * d0.sqrt() / sigma;
    let kummer_part = w * PI.sqrt() * kummer_m(0.5, 1.5, w * w, tol)?;

    let mut sum = 0.0;
    let mut last = 0.0;
    for (m, term) in sato_series_terms(d0, sigma, z).take(tol.max_terms).enumerate() {
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Overflow {
                what: "phi1 power series",
            });
        }
        if m > 0 && term < last && term <= tol.rel_tol * sum {
            let total = (kummer_part + sum) / d0;
            return if total.is_finite() {
                Ok(total)
            } else {
                Err(Error::Overflow { what: "phi1" })
            };
        }
        last = term;
    }
    Err(Error::SeriesNotConverged {
        what: "phi1 power series",
        terms: tol.max_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(0), 1.0);
        assert_eq!(double_factorial(1), 1.0);
        assert_eq!(double_factorial(7), 105.0);
        assert_eq!(double_factorial(8), 384.0);
        for n in [0u64, 5, 100, 249, 250, 251, 252, 300] {
            let direct: f64 = (1..=n).rev().step_by(2).map(|k| (k as f64).ln()).sum();
            assert_relative_eq!(ln_double_factorial(n), direct, max_relative = 1e-12, epsilon = 1e-12);
        }
        assert!(ln_double_factorial(100_000).is_finite());
    }

    #[test]
    fn series_terms_match_direct_formula() {
        let (d0, sigma, z): (f64, f64, f64) = (0.7, 1.3, 2.1);
        let w = z * d0.sqrt() / sigma;
        for (m, term) in sato_series_terms(d0, sigma, z).take(30).enumerate() {
            let direct = 2f64.powi(m as i32) / ((m + 1) as f64 * double_factorial(m as u64 + 2))
                * w.powi(2 * m as i32 + 2);
            assert_relative_eq!(term, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_level() {
        assert_eq!(sato_phi1(1.0, 1.0, 0.0, SeriesTolerance::default()).unwrap(), 0.0);
    }

    #[test]
    fn increasing_in_level() {
        let tol = SeriesTolerance::default();
        let mut prev = 0.0;
        for z in [0.1, 0.5, 1.0, 2.0, 3.0] {
            let v = sato_phi1(1.0, 1.0, z, tol).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn rejects_bad_input() {
        let tol = SeriesTolerance::default();
        assert!(sato_phi1(0.0, 1.0, 1.0, tol).is_err());
        assert!(sato_phi1(1.0, 0.0, 1.0, tol).is_err());
        assert!(sato_phi1(1.0, 1.0, -1.0, tol).is_err());
    }

    #[test]
    fn paper_scale_overflows_explicitly() {
        // z sqrt(d0) / sigma = 6.58 puts the series peak near exp(3750).
        let r = sato_phi1(3e-4, 1.0, 380.0, SeriesTolerance::default());
        assert!(matches!(
            r,
            Err(Error::Overflow { .. }) | Err(Error::SeriesNotConverged { .. })
        ));
    }
}
