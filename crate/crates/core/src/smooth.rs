//! Enumeration and counting of `y`-smooth integers.
//!
//! An integer `n ≥ 1` is `y`-smooth when every prime divisor of `n` is at
//! most `y`; in particular `1` is smooth for every `y`. Logarithms are
//! natural throughout the crate.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest `x` accepted by the sieve. The sieve keeps one `u32` per integer
/// in `[0, x]`, so this cap corresponds to about 800 MB of working memory.
pub const MAX_SIEVE_X: u64 = 200_000_000;

/// The set `S(x, y)` of `y`-smooth integers in `[1, x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothSet {
    x: u64,
    y: u64,
    members: Vec<u64>,
}

impl SmoothSet {
    /// Builds a set from explicit members, bypassing the sieve.
    ///
    /// This is how arbitrary finite sets (for instance `{1, 2, 3, 4}` with
    /// `x = 4`) enter the moment machinery. Members must be strictly
    /// ascending and lie in `[1, x]`; the `y` label is informational.
    pub fn from_members(x: u64, y: u64, members: Vec<u64>) -> Result<Self> {
        if x == 0 {
            return Err(Error::Domain("x must be at least 1".into()));
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("members must be strictly ascending".into()));
        }
        if members.first().is_some_and(|&m| m == 0) || members.last().is_some_and(|&m| m > x) {
            return Err(Error::Argument(format!("members must lie in [1, {x}]")));
        }
        Ok(Self { x, y, members })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    /// `Ψ(x, y)`.
    pub fn count(&self) -> u64 {
        self.members.len() as u64
    }

    /// Largest member; `0` for an empty set.
    pub fn max_member(&self) -> u64 {
        self.members.last().copied().unwrap_or(0)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }
}

fn check_range(x: u64, y: u64) -> Result<()> {
    if x == 0 {
        return Err(Error::Domain("x must be at least 1".into()));
    }
    if y == 0 {
        return Err(Error::Domain("y must be at least 1".into()));
    }
    if x > MAX_SIEVE_X {
        return Err(Error::capacity("x", x, MAX_SIEVE_X));
    }
    Ok(())
}

/// Greatest prime factor of every integer in `[0, x]` (`gpf[0] = 0`,
/// `gpf[1] = 1`), via a smallest-prime-factor sieve followed by an in-place
/// ascending pass `gpf[n] = max(spf[n], gpf[n / spf[n]])`.
fn greatest_prime_factors(x: usize) -> Vec<u32> {
    let mut table = vec![0u32; x + 1];
    if x >= 1 {
        table[1] = 1;
    }
    for i in 2..=x {
        if table[i] != 0 {
            continue;
        }
        table[i] = i as u32;
        if let Some(start) = i.checked_mul(i).filter(|&s| s <= x) {
            for j in (start..=x).step_by(i) {
                if table[j] == 0 {
                    table[j] = i as u32;
                }
            }
        }
    }
    // table[n] holds spf for indices >= n and gpf below n.
    for n in 2..=x {
        let p = table[n];
        let rest = n / p as usize;
        table[n] = p.max(table[rest]);
    }
    table
}

/// Enumerates `S(x, y)` in ascending order.
pub fn sieve_smooth(x: u64, y: u64) -> Result<SmoothSet> {
    check_range(x, y)?;
    let members = if y >= x {
        (1..=x).collect()
    } else {
        let gpf = greatest_prime_factors(x as usize);
        (1..=x as usize)
            .filter(|&n| u64::from(gpf[n]) <= y)
            .map(|n| n as u64)
            .collect()
    };
    Ok(SmoothSet { x, y, members })
}

/// `Ψ(x, y)` without materialising the member list.
pub fn psi(x: u64, y: u64) -> Result<u64> {
    check_range(x, y)?;
    if y >= x {
        return Ok(x);
    }
    let gpf = greatest_prime_factors(x as usize);
    Ok(gpf[1..].iter().filter(|&&p| u64::from(p) <= y).count() as u64)
}

/// `y = ⌊(ln x)^K⌋`, at least 1.
pub fn y_from_k(x: u64, k: f64) -> u64 {
    if x < 2 {
        return 1;
    }
    let y = (x as f64).ln().powf(k).floor();
    if y.is_finite() && y >= 1.0 {
        if y >= u64::MAX as f64 {
            u64::MAX
        } else {
            y as u64
        }
    } else {
        1
    }
}

/// Approximate saddle point `α(x, y) = ln(1 + y / ln x) / ln y`, with no
/// lower-order correction.
pub fn saddle_alpha<T: Real>(x: T, y: T) -> Result<T> {
    if !(y > T::one()) || !(y <= x) {
        return Err(Error::Domain(format!(
            "saddle point needs 1 < y <= x, got x = {x}, y = {y}"
        )));
    }
    Ok((T::one() + y / x.ln()).ln() / y.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_smooth(n: u64, y: u64) -> bool {
        let mut m = n;
        let mut p = 2;
        while p * p <= m {
            while m % p == 0 {
                if p > y {
                    return false;
                }
                m /= p;
            }
            p += 1;
        }
        m == 1 || m <= y
    }

    #[test]
    fn small_sets() {
        assert_eq!(sieve_smooth(10, 2).unwrap().members(), &[1, 2, 4, 8]);
        assert_eq!(sieve_smooth(10, 3).unwrap().members(), &[1, 2, 3, 4, 6, 8, 9]);
        assert_eq!(sieve_smooth(100, 100).unwrap().count(), 100);
        assert_eq!(sieve_smooth(1, 1).unwrap().members(), &[1]);
        assert_eq!(sieve_smooth(30, 1).unwrap().members(), &[1]);
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(10, 2).unwrap(), 4);
        for y in [1, 2, 7, 1000] {
            assert_eq!(psi(1, y).unwrap(), 1);
        }
        let brute = (1..=10_000u64).filter(|&n| trial_division_smooth(n, 190)).count() as u64;
        assert_eq!(psi(10_000, 190).unwrap(), brute);
    }

    #[test]
    fn agrees_with_trial_division() {
        for x in [1u64, 2, 17, 360, 1000, 2047] {
            for y in [1u64, 2, 3, 5, 13, 31, x] {
                let set = sieve_smooth(x, y).unwrap();
                let oracle: Vec<u64> = (1..=x).filter(|&n| trial_division_smooth(n, y)).collect();
                assert_eq!(set.members(), oracle.as_slice(), "x={x} y={y}");
            }
        }
    }

    #[test]
    fn monotone_in_both_arguments() {
        let ys = [2u64, 3, 7, 20, 100];
        let xs = [10u64, 50, 300, 1000, 3000];
        for &y in &ys {
            let counts: Vec<u64> = xs.iter().map(|&x| psi(x, y).unwrap()).collect();
            assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        }
        for &x in &xs {
            let counts: Vec<u64> = ys.iter().map(|&y| psi(x, y).unwrap()).collect();
            assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn range_errors() {
        assert!(matches!(sieve_smooth(0, 3), Err(Error::Domain(_))));
        assert!(matches!(psi(5, 0), Err(Error::Domain(_))));
        assert!(matches!(
            sieve_smooth(MAX_SIEVE_X + 1, 3),
            Err(Error::Capacity { limit, .. }) if limit == MAX_SIEVE_X as u128
        ));
    }

    #[test]
    fn from_members_validation() {
        assert!(SmoothSet::from_members(4, 4, vec![1, 2, 3, 4]).is_ok());
        assert!(SmoothSet::from_members(4, 4, vec![1, 3, 2]).is_err());
        assert!(SmoothSet::from_members(4, 4, vec![0, 1]).is_err());
        assert!(SmoothSet::from_members(4, 4, vec![5]).is_err());
    }

    #[test]
    fn saddle_point() {
        let x = 100f64.exp();
        let a = saddle_alpha(x, 100.0).unwrap();
        assert!((a - 2f64.ln() / 100f64.ln()).abs() < 1e-12);
        assert!((a - 0.150515).abs() < 1e-6);
        let a = saddle_alpha(x, 1.0e4).unwrap();
        assert!((a - 101f64.ln() / 1.0e4f64.ln()).abs() < 1e-12);
        assert!((a - 0.50108).abs() < 1e-6);
        // y = ln x
        let a = saddle_alpha(x, 100.0f64).unwrap();
        assert!((a - 2f64.ln() / x.ln().ln()).abs() < 1e-12);
        assert!(saddle_alpha(100.0, 1.0).is_err());
        assert!(saddle_alpha(100.0, 101.0).is_err());
        let a32 = saddle_alpha(1.0e6f32, 50.0).unwrap();
        assert!((f64::from(a32) - saddle_alpha(1.0e6f64, 50.0).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn y_parameterization() {
        // (ln 1e4)^2 = 84.83...
        assert_eq!(y_from_k(10_000, 2.0), 84);
        assert_eq!(y_from_k(1, 5.0), 1);
    }
}
