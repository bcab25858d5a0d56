//! Moments `I_ρ = ∫₀¹ |S(θ)|^ρ dθ`.
//!
//! For even `ρ = 2s` the moment counts solutions of
//! `n₁ + … + n_s = n_{s+1} + … + n_{2s}` and equals `Σ_m r_s(m)²`, where
//! `r_s(m)` is the number of ordered `s`-tuples of members summing to `m`.
//! The uniform Riemann sum `(1/N) Σ_j |S(j/N)|^{2s}` is exact as soon as
//! `N > s(x − 1)`, since `|S|^{2s}` is a trigonometric polynomial of degree
//! at most `s(x − 1)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expsum::eval_s_grid;
use crate::ntt;
use crate::scalar::Real;
use crate::smooth::SmoothSet;
use crate::sum::Compensated;

/// Longest representation-count array accepted (entries in `[s, s·x]`).
pub const MAX_CONVOLUTION_LEN: usize = 1 << 27;

/// Largest grid [`moment_refined`] will try before giving up.
pub const MAX_REFINED_GRID: usize = 1 << 25;

/// Below this many multiply-adds the schoolbook convolution is used.
const DIRECT_WORK: u128 = 20_000_000;

const QUADRATURE_BLOCK: usize = 4096;

/// Representation function `r_s(m)` for `m ∈ [s, s·x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepCounts {
    s: u32,
    x: u64,
    counts: Vec<u64>,
    total: u128,
}

impl RepCounts {
    pub fn s(&self) -> u32 {
        self.s
    }

    /// Smallest index `m = s`.
    pub fn first_sum(&self) -> u64 {
        u64::from(self.s)
    }

    /// Largest index `m = s·x`.
    pub fn last_sum(&self) -> u64 {
        u64::from(self.s) * self.x
    }

    /// `r_s(m)`; zero outside `[s, s·x]`.
    pub fn get(&self, m: u64) -> u64 {
        m.checked_sub(self.first_sum())
            .and_then(|i| self.counts.get(i as usize).copied())
            .unwrap_or(0)
    }

    /// Counts for `m = s, s + 1, …, s·x`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `Σ_m r_s(m) = Ψ^s`.
    pub fn total(&self) -> u128 {
        self.total
    }

    /// `Σ_m r_s(m)² = I_{2s}`, or `None` on `u128` overflow.
    pub fn sum_of_squares(&self) -> Option<u128> {
        self.counts.iter().try_fold(0u128, |acc, &c| {
            acc.checked_add(u128::from(c).checked_mul(u128::from(c))?)
        })
    }
}

fn indicator(set: &SmoothSet) -> Vec<u64> {
    let mut v = vec![0u64; set.x() as usize + 1];
    for &m in set.members() {
        v[m as usize] = 1;
    }
    v
}

fn direct_power(set: &SmoothSet, s: u32) -> Vec<u64> {
    let mut r = indicator(set);
    for _ in 1..s {
        let mut next = vec![0u64; r.len() + set.x() as usize];
        for (m, &c) in r.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &n in set.members() {
                next[m + n as usize] += c;
            }
        }
        r = next;
    }
    r
}

/// Exact `r_s(m)` by iterated convolution of the indicator vector.
///
/// Small instances use a schoolbook convolution; larger ones take an exact
/// number-theoretic transform, which requires every count (at most
/// `Ψ^{s−1}`) to be below the transform modulus.
pub fn representation_counts(set: &SmoothSet, s: u32) -> Result<RepCounts> {
    if s == 0 {
        return Err(Error::Argument("s must be at least 1".into()));
    }
    let len = u128::from(s) * u128::from(set.x()) + 1;
    if len > MAX_CONVOLUTION_LEN as u128 {
        return Err(Error::capacity("s*x + 1", len, MAX_CONVOLUTION_LEN as u64));
    }
    let psi = set.count();
    let total = u128::from(psi)
        .checked_pow(s)
        .ok_or_else(|| Error::capacity("Psi^s", u128::MAX, u128::MAX))?;
    let ceiling = u128::from(psi).pow(s - 1);
    if ceiling >= u128::from(ntt::MODULUS) {
        return Err(Error::capacity("Psi^(s-1)", ceiling, ntt::MODULUS - 1));
    }

    let work = u128::from(psi) * len;
    let full = if s == 1 {
        indicator(set)
    } else if work <= DIRECT_WORK {
        direct_power(set, s)
    } else {
        ntt::convolution_power(&indicator(set), s)
    };
    let counts = full[s as usize..].to_vec();
    debug_assert_eq!(counts.iter().map(|&c| u128::from(c)).sum::<u128>(), total);
    Ok(RepCounts {
        s,
        x: set.x(),
        counts,
        total,
    })
}

/// How a [`MomentResult`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MomentMethod {
    ExactConvolution,
    Grid,
    GridRefined,
}

impl MomentMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MomentMethod::ExactConvolution => "EXACT_CONVOLUTION",
            MomentMethod::Grid => "GRID",
            MomentMethod::GridRefined => "GRID_REFINED",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "EXACT_CONVOLUTION" => Some(MomentMethod::ExactConvolution),
            "GRID" => Some(MomentMethod::Grid),
            "GRID_REFINED" => Some(MomentMethod::GridRefined),
            _ => None,
        }
    }
}

/// A computed moment `I_ρ(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentResult<T> {
    pub rho: T,
    pub value: T,
    /// Exact integer value, present for [`MomentMethod::ExactConvolution`].
    pub exact: Option<u128>,
    pub method: MomentMethod,
    /// Grid size, `0` for the exact path.
    pub grid: usize,
    /// `0` when the value is exact up to rounding. Otherwise a heuristic
    /// relative error from comparing successive grids, or `+∞` when no
    /// comparison was available.
    pub error_estimate: T,
    pub x: u64,
    pub psi: u64,
}

/// `I_{2s}` as an exact integer.
pub fn even_moment_exact<T: Real>(set: &SmoothSet, s: u32) -> Result<MomentResult<T>> {
    let reps = representation_counts(set, s)?;
    let exact = reps
        .sum_of_squares()
        .ok_or_else(|| Error::capacity("I_2s", u128::MAX, u128::MAX))?;
    Ok(MomentResult {
        rho: T::from_count(2 * u64::from(s)),
        value: T::from_u128(exact).unwrap_or_else(T::infinity),
        exact: Some(exact),
        method: MomentMethod::ExactConvolution,
        grid: 0,
        error_estimate: T::zero(),
        x: set.x(),
        psi: set.count(),
    })
}

/// Additive energy `E = I₄`.
pub fn energy<T: Real>(set: &SmoothSet) -> Result<MomentResult<T>> {
    even_moment_exact(set, 2)
}

/// `s` when `ρ = 2s` for a positive integer `s`.
pub fn even_half<T: Real>(rho: T) -> Option<u64> {
    let s = rho / T::lit(2.0);
    (s >= T::one() && s.fract() == T::zero()).then(|| s.to_u64()).flatten()
}

/// Whether a uniform grid of `n` nodes integrates `|S|^{2s}` exactly.
pub fn alias_free(x: u64, s: u64, n: usize) -> bool {
    (n as u128) > u128::from(s) * u128::from(x.saturating_sub(1))
}

/// Smallest alias-free grid for `|S|^{2s}`: `s(x − 1) + 1`.
pub fn alias_free_grid(x: u64, s: u64) -> usize {
    (s * x.saturating_sub(1) + 1) as usize
}

fn grid_sums<T: Real>(set: &SmoothSet, rho: T, n: usize) -> Result<(T, T)> {
    let grid = eval_s_grid::<T>(set, n)?;
    let even = even_half(rho).and_then(|s| i32::try_from(s).ok());
    let power = |v: &crate::expsum::ExpSumValue<T>| match even {
        Some(s) => v.norm_sqr().powi(s),
        None => v.modulus.powf(rho),
    };
    // Fixed-size blocks merged in order keep the result independent of the
    // thread count.
    let blocks: Vec<(Compensated<T>, Compensated<T>)> = grid
        .par_chunks(QUADRATURE_BLOCK)
        .enumerate()
        .map(|(b, chunk)| {
            let mut all = Compensated::new();
            let mut evens = Compensated::new();
            for (i, v) in chunk.iter().enumerate() {
                let p = power(v);
                all.add(p);
                if (b * QUADRATURE_BLOCK + i) % 2 == 0 {
                    evens.add(p);
                }
            }
            (all, evens)
        })
        .collect();
    let mut all = Compensated::new();
    let mut evens = Compensated::new();
    for (a, e) in blocks {
        all.merge(a);
        evens.merge(e);
    }
    Ok((all.value(), evens.value()))
}

/// Riemann sum `(1/N) Σ_{j<N} |S(j/N)|^ρ` on the nodes `j/N`, including `θ = 0`.
pub fn moment_quadrature<T: Real>(set: &SmoothSet, rho: T, n: usize) -> Result<MomentResult<T>> {
    if !(rho > T::zero()) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    let (all, evens) = grid_sums(set, rho, n)?;
    let nf = T::from_count(n as u64);
    let value = all / nf;
    let exact_grid = even_half(rho).is_some_and(|s| alias_free(set.x(), s, n));
    let error_estimate = if exact_grid {
        T::zero()
    } else if n >= 2 && n % 2 == 0 {
        let coarse = evens / T::from_count((n / 2) as u64);
        relative_change(value, coarse)
    } else {
        T::infinity()
    };
    Ok(MomentResult {
        rho,
        value,
        exact: None,
        method: MomentMethod::Grid,
        grid: n,
        error_estimate,
        x: set.x(),
        psi: set.count(),
    })
}

fn relative_change<T: Real>(new: T, old: T) -> T {
    if new == T::zero() {
        (new - old).abs()
    } else {
        ((new - old) / new).abs()
    }
}

/// Doubles the grid from `N₀ = 2x` until two successive Riemann sums agree
/// to `rel_tol`. The returned `error_estimate` is that last relative change,
/// a heuristic rather than a bound for non-even `ρ`.
pub fn moment_refined<T: Real>(set: &SmoothSet, rho: T, rel_tol: T) -> Result<MomentResult<T>> {
    refine_up_to(set, rho, rel_tol, MAX_REFINED_GRID)
}

fn refine_up_to<T: Real>(set: &SmoothSet, rho: T, rel_tol: T, cap: usize) -> Result<MomentResult<T>> {
    if !(rel_tol > T::zero() && rel_tol < T::one()) {
        return Err(Error::Domain(format!("rel_tol must lie in (0, 1), got {rel_tol}")));
    }
    let mut n = (2 * set.x()).max(2) as usize;
    if n > cap {
        return Err(Error::capacity("refined grid", n as u64, cap as u64));
    }
    let mut last = moment_quadrature(set, rho, n)?;
    let mut before: Option<T> = None;
    loop {
        let next_n = n * 2;
        if next_n > cap {
            return Err(Error::Convergence {
                grid: n,
                last: last.value.to_f64().unwrap_or(f64::NAN),
                previous: before.and_then(|v| v.to_f64()).unwrap_or(f64::NAN),
            });
        }
        let current = moment_quadrature(set, rho, next_n)?;
        let change = relative_change(current.value, last.value);
        if change < rel_tol {
            return Ok(MomentResult {
                method: MomentMethod::GridRefined,
                error_estimate: change,
                ..current
            });
        }
        before = Some(last.value);
        last = current;
        n = next_n;
    }
}
