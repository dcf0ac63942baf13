use super::SeriesTolerance;
use crate::error::{Error, Result};

/// Kummer's confluent hypergeometric function `M(a, c, z) = 1F1(a; c; z)`.
///
/// Summed as `sum_k (a)_k / (c)_k z^k / k!`. Negative arguments go through
/// Kummer's transformation `M(a, c, z) = e^z M(c - a, c, -z)`, which turns the
/// alternating series into one with terms of constant sign whenever `c > a`.
pub fn kummer_m(a: f64, c: f64, z: f64, tol: SeriesTolerance) -> Result<f64> {
    if c <= 0.0 && c == c.round() {
        return Err(Error::param("c", c, "must not be a nonpositive integer"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z < 0.0 {
        return Ok(z.exp() * series(c - a, c, -z, tol)?);
    }
    series(a, c, z, tol)
}

fn series(a: f64, c: f64, z: f64, tol: SeriesTolerance) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..tol.max_terms {
        let kf = k as f64;
        term *= (a + kf) / (c + kf) * z / (kf + 1.0);
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Overflow {
                what: "Kummer function",
            });
        }
        // Terms only start shrinking once k exceeds z.
        if term.abs() <= tol.rel_tol * sum.abs() && kf + 1.0 > z {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNotConverged {
        what: "Kummer function",
        terms: tol.max_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tol() -> SeriesTolerance {
        SeriesTolerance::default()
    }

    #[test]
    fn zero_argument() {
        assert_eq!(kummer_m(0.3, 1.7, 0.0, tol()).unwrap(), 1.0);
    }

    #[test]
    fn exponential_identity() {
        assert_relative_eq!(kummer_m(1.0, 1.0, 1.0, tol()).unwrap(), 1f64.exp(), max_relative = 1e-13);
    }

    #[test]
    fn half_three_halves_at_one() {
        // Term-by-term oracle: sum z^k / ((2k + 1) k!).
        let mut oracle = 0.0;
        let mut fact = 1.0;
        for k in 0..40 {
            if k > 0 {
                fact *= k as f64;
            }
            oracle += 1.0 / ((2 * k + 1) as f64 * fact);
        }
        let m = kummer_m(0.5, 1.5, 1.0, tol()).unwrap();
        assert_relative_eq!(m, oracle, max_relative = 1e-13);
        assert_relative_eq!(m, 1.462_652, epsilon = 1e-6);
    }

    #[test]
    fn polynomial_case_terminates() {
        // M(-2, c, z) = 1 - 2z/c + z^2 / (c (c + 1)).
        let (c, z) = (0.5, 3.0);
        let expected = 1.0 - 2.0 * z / c + z * z / (c * (c + 1.0));
        assert_relative_eq!(kummer_m(-2.0, c, z, tol()).unwrap(), expected, max_relative = 1e-13);
    }

    #[test]
    fn rejects_pole() {
        assert!(kummer_m(1.0, -2.0, 1.0, tol()).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let short = SeriesTolerance::new(1e-12, 5).unwrap();
        assert!(matches!(
            kummer_m(1.0, 1.0, 30.0, short),
            Err(Error::SeriesNotConverged { .. })
        ));
    }

    #[test]
    fn reports_overflow() {
        assert!(matches!(
            kummer_m(1.0, 1.0, 800.0, tol()),
            Err(Error::Overflow { .. })
        ));
    }
}
