//! Reference query counts for ordered search over `N` items.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityStats {
    pub n: u64,
    /// `ceil(log2 N)`.
    pub classical: u64,
    /// `3 ceil(log_52 N)`.
    pub three_query: u64,
    /// `4 ceil(log_605 N)`.
    pub this_work: u64,
    /// `4 log_605 N` without the ceiling.
    pub this_work_exact: f64,
    /// `(ln N - 1) / pi`.
    pub lower_bound: f64,
    /// `4 N log_605 N` queries for sorting.
    pub sorting: f64,
    /// `4 log_605 N / log2 N = 4 ln 2 / ln 605`.
    pub ratio: f64,
}

/// Smallest `L` with `base^L >= n`, in exact integer arithmetic.
pub fn ceil_log(base: u64, n: u64) -> u64 {
    assert!(base >= 2, "logarithm base must be at least 2");
    let mut levels = 0;
    let mut span: u128 = 1;
    while span < n as u128 {
        span *= base as u128;
        levels += 1;
    }
    levels
}

pub fn complexity_stats(n: u64) -> ComplexityStats {
    let ln = (n as f64).ln();
    let log605 = ln / 605f64.ln();
    ComplexityStats {
        n,
        classical: ceil_log(2, n),
        three_query: 3 * ceil_log(52, n),
        this_work: 4 * ceil_log(605, n),
        this_work_exact: 4.0 * log605,
        lower_bound: (ln - 1.0) / std::f64::consts::PI,
        sorting: 4.0 * n as f64 * log605,
        ratio: 4.0 * 2f64.ln() / 605f64.ln(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_arithmetic() {
        assert_eq!(complexity_stats(605u64.pow(4)).this_work, 16);
        assert_eq!(complexity_stats(605u64.pow(4) + 1).this_work, 20);
        assert_eq!(complexity_stats(2).classical, 1);
        assert_eq!(ceil_log(6, 36), 2);
        assert_eq!(ceil_log(6, 37), 3);
        assert_eq!(ceil_log(6, 1), 0);
    }
}
