//! Binomial confidence intervals.

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // 10/100: reference interval [0.05523, 0.17437].
        let (lo, hi) = wilson(10, 100, Z95);
        assert!((lo - 0.055_229).abs() < 1e-5, "{lo}");
        assert!((hi - 0.174_366).abs() < 1e-5, "{hi}");
    }

    #[test]
    fn extremes() {
        let (lo, hi) = wilson(0, 1000, Z95);
        assert_eq!(lo, 0.0);
        // z^2 / (n + z^2)
        assert!((hi - Z95 * Z95 / (1000.0 + Z95 * Z95)).abs() < 1e-12);
        let (lo, hi) = wilson(1000, 1000, Z95);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.99 && lo < 1.0);
    }

    #[test]
    fn interval_brackets_estimate() {
        for t in [1u64, 2, 7, 100, 4096] {
            for s in 0..=t.min(50) {
                let (lo, hi) = wilson(s, t, Z95);
                let p = s as f64 / t as f64;
                assert!(lo <= p && p <= hi, "{s}/{t}: [{lo}, {hi}]");
            }
        }
    }
}
