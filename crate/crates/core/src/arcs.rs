//! Dirichlet arcs `M(a, q, Q) = {θ : |θ − a/q| ≤ 1/(qQ)}` and the
//! decomposition of a moment into per-arc contributions.
//!
//! Points live on the circle `ℝ/ℤ`: the fraction `q/q = 1/1` stands for
//! `0 ≡ 1`, and distances are taken modulo one. The arcs cover the circle
//! but overlap; each point is assigned to the arc with the smallest `q`
//! containing it, which turns the cover into a partition.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::ExponentParams;
use crate::expsum::eval_s_grid;
use crate::moments::{alias_free, even_half};
use crate::scalar::{Exponent, Real};
use crate::smooth::SmoothSet;
use crate::sum::Compensated;

/// Largest `Q` accepted by [`farey_fractions`].
pub const MAX_FAREY_Q: u64 = 10_000;

/// Denominator used to turn a floating-point `θ` into an exact rational.
const THETA_SCALE: u128 = 1 << 53;

/// The arc a point was assigned to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcLabel {
    /// Numerator in `[1, q]`.
    pub a: u64,
    pub q: u64,
    /// Arc parameter `Q`.
    pub big_q: f64,
    /// `1/(qQ)`.
    pub halfwidth: f64,
    /// Circular distance from the point to `a/q`.
    pub distance: f64,
    /// Within `1/x` of the centre.
    pub sharp: bool,
    /// `ℒ = 1 + x·distance`.
    pub l: f64,
}

impl ArcLabel {
    pub fn center(&self) -> f64 {
        self.a as f64 / self.q as f64
    }
}

/// All `(a, q)` with `1 ≤ a ≤ q ≤ Q`, `gcd(a, q) = 1`, ascending in `a/q`.
pub fn farey_fractions(big_q: u64) -> Result<Vec<(u64, u64)>> {
    if big_q == 0 {
        return Err(Error::Domain("Q must be at least 1".into()));
    }
    if big_q > MAX_FAREY_Q {
        return Err(Error::capacity("Q", big_q, MAX_FAREY_Q));
    }
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, big_q);
    let mut out = vec![(c, d)];
    while c < d {
        let k = (big_q + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
        out.push((c, d));
    }
    Ok(out)
}

/// Assignment of `θ = num/den` (`0 ≤ num < den`).
///
/// The smallest `q` with `‖qθ‖ < 1/Q` is always a continued-fraction
/// denominator of `θ`, so only convergents are tested.
fn classify_rational(num: u128, den: u128, big_q: f64, x: u64) -> ArcLabel {
    let check = |q: u128| -> Option<ArcLabel> {
        let t = q * num;
        let r = t % den;
        let (dist_num, a) = if r <= den - r { (r, t / den) } else { (den - r, t / den + 1) };
        ((dist_num as f64) * big_q < den as f64).then(|| {
            let q64 = q as u64;
            let a = match (a % q) as u64 {
                0 => q64,
                a => a,
            };
            let distance = dist_num as f64 / den as f64 / q as f64;
            ArcLabel {
                a,
                q: q64,
                big_q,
                halfwidth: 1.0 / (q as f64 * big_q),
                distance,
                sharp: dist_num * u128::from(x) <= den * q,
                l: 1.0 + x as f64 * distance,
            }
        })
    };

    // Convergent denominators k_i = a_i k_{i-1} + k_{i-2}.
    let (mut n, mut d) = (num, den);
    let (mut k_prev, mut k) = (1u128, 0u128);
    if let Some(label) = check(1) {
        return label;
    }
    while d != 0 {
        let a_i = n / d;
        (n, d) = (d, n - a_i * d);
        let k_next = a_i * k + k_prev;
        (k_prev, k) = (k, k_next);
        if k as f64 > big_q {
            break;
        }
        if k > 1 {
            if let Some(label) = check(k) {
                return label;
            }
        }
    }

    // Dirichlet guarantees a hit among q <= Q.
    (1..=big_q.floor() as u128)
        .find_map(check)
        .expect("Dirichlet's theorem provides q <= Q")
}

/// Assigns `θ` to its Dirichlet arc: the smallest `q ≤ Q` with `θ` strictly
/// inside `M(a, q, Q)`, i.e. `|θ − a/q| < 1/(qQ)` modulo one, and the nearest
/// `a`. Such a `q` exists for every real `Q ≥ 1`; preferring interior points
/// assigns a point on the boundary of a low-`q` arc (such as `1/2` with
/// `Q = 2`) to the arc it is centred in.
pub fn classify_theta<T: Real>(theta: T, big_q: f64, x: u64) -> Result<ArcLabel> {
    if !(big_q >= 1.0) || !big_q.is_finite() {
        return Err(Error::Domain(format!("Q must be at least 1, got {big_q}")));
    }
    let t = theta
        .to_f64()
        .filter(|t| t.is_finite())
        .ok_or_else(|| Error::Argument("theta must be finite".into()))?;
    let t = t - t.floor();
    let num = ((t * THETA_SCALE as f64).round() as u128) % THETA_SCALE;
    Ok(classify_rational(num, THETA_SCALE, big_q, x))
}

/// Assigns the grid node `j/N` exactly.
pub fn classify_grid_node(j: usize, n: usize, big_q: f64, x: u64) -> ArcLabel {
    classify_rational((j % n) as u128, n as u128, big_q, x)
}

/// Labels for every node of the grid `{j/N}`.
pub fn classify_grid(n: usize, big_q: f64, x: u64) -> Vec<ArcLabel> {
    (0..n)
        .into_par_iter()
        .map(|j| classify_grid_node(j, n, big_q, x))
        .collect()
}

/// Where the `q`-range is split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitRule {
    /// `q ≤ x^{1/2−ε}` versus larger `q`; `Q = x^{1/2+ε}`.
    Thm1,
    /// `q ≤ x/Q` versus larger `q`; `Q = x^ξ`.
    Thm2,
}

impl SplitRule {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitRule::Thm1 => "THM1",
            SplitRule::Thm2 => "THM2",
        }
    }
}

impl std::str::FromStr for SplitRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "THM1" => Ok(SplitRule::Thm1),
            "THM2" => Ok(SplitRule::Thm2),
            _ => Err(Error::Argument(format!("unknown split {s:?}"))),
        }
    }
}

/// Contribution of one arc to a moment.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcContribution<T> {
    pub a: u64,
    pub q: u64,
    pub contribution: T,
    pub sharp: T,
    pub flat: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcDecomposition<T> {
    pub rho: T,
    pub big_q: f64,
    pub split: SplitRule,
    /// `q`-threshold separating part 1 from part 2.
    pub split_q: f64,
    pub grid: usize,
    /// Riemann sum over all nodes.
    pub total: T,
    /// Arcs with `q ≤ split_q`.
    pub part1: T,
    pub part2: T,
    /// Sharp and flat pieces of part 1.
    pub sharp_part: T,
    pub flat_part: T,
    /// Ordered by `(q, a)`.
    pub per_arc: Vec<ArcContribution<T>>,
}

/// Splits the grid moment `(1/N) Σ |S(j/N)|^ρ` by the arc of each node.
pub fn arc_decompose<T: Real, P: Exponent>(
    set: &SmoothSet,
    rho: T,
    big_q: f64,
    n: usize,
    params: &ExponentParams<P>,
    split: SplitRule,
) -> Result<ArcDecomposition<T>> {
    if !(rho > T::zero()) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    if !(big_q >= 1.0) || !big_q.is_finite() {
        return Err(Error::Domain(format!("Q must be at least 1, got {big_q}")));
    }
    if let Some(s) = even_half(rho) {
        if !alias_free(set.x(), s, n) {
            return Err(Error::Argument(format!(
                "grid of {n} nodes is below the aliasing threshold {} for rho = {rho}",
                s * set.x().saturating_sub(1)
            )));
        }
    }
    let x = set.x();
    let xf = x as f64;
    let split_q = match split {
        SplitRule::Thm1 => xf.powf(0.5 - params.epsilon),
        SplitRule::Thm2 => xf / big_q,
    };

    let grid = eval_s_grid::<T>(set, n)?;
    let labels = classify_grid(n, big_q, x);
    let nf = T::from_count(n as u64);

    let mut arcs: BTreeMap<(u64, u64), (Compensated<T>, Compensated<T>)> = BTreeMap::new();
    let mut total = Compensated::new();
    for (v, label) in grid.iter().zip(&labels) {
        let w = v.modulus.powf(rho) / nf;
        total.add(w);
        let entry = arcs
            .entry((label.q, label.a))
            .or_insert_with(|| (Compensated::new(), Compensated::new()));
        if label.sharp {
            entry.0.add(w);
        } else {
            entry.1.add(w);
        }
    }

    let mut part1 = Compensated::new();
    let mut part2 = Compensated::new();
    let mut sharp_part = Compensated::new();
    let mut flat_part = Compensated::new();
    let per_arc: Vec<ArcContribution<T>> = arcs
        .into_iter()
        .map(|((q, a), (sharp, flat))| {
            let (sharp, flat) = (sharp.value(), flat.value());
            let contribution = sharp + flat;
            if q as f64 <= split_q {
                part1.add(contribution);
                sharp_part.add(sharp);
                flat_part.add(flat);
            } else {
                part2.add(contribution);
            }
            ArcContribution {
                a,
                q,
                contribution,
                sharp,
                flat,
            }
        })
        .collect();

    Ok(ArcDecomposition {
        rho,
        big_q,
        split,
        split_q,
        grid: n,
        total: total.value(),
        part1: part1.value(),
        part2: part2.value(),
        sharp_part: sharp_part.value(),
        flat_part: flat_part.value(),
        per_arc,
    })
}

/// `Q = x^{1/2+ε}` for [`SplitRule::Thm1`] and `Q = x^ξ`, `ξ = 1 − 2η`, for
/// [`SplitRule::Thm2`]. The latter needs `2 < ρ < 2K + 4`, which is exactly
/// what keeps `ξ` above `1/2`.
pub fn optimal_q<P: Exponent>(x: u64, params: &ExponentParams<P>, rule: SplitRule) -> Result<f64> {
    let xf = x as f64;
    match rule {
        SplitRule::Thm1 => Ok(xf.powf(0.5 + params.epsilon)),
        SplitRule::Thm2 => {
            let two = P::int(2);
            let upper = two.clone() * params.k.clone() + P::int(4);
            if !(params.rho > two && params.rho < upper) {
                return Err(Error::Validity(format!(
                    "Q = x^xi needs 2 < rho < 2K + 4, got rho = {}, K = {}",
                    params.rho, params.k
                )));
            }
            debug_assert!(params.xi >= P::ratio(1, 2));
            Ok(xf.powf(params.xi.approx()))
        }
    }
}

/// `(1 − 2κ)/(2 − 3κ)`: above `Q = x^{this}` the first `J₁` term dominates
/// the second.
pub fn balance_threshold_exponent<P: Exponent>(params: &ExponentParams<P>) -> P {
    let k = params.kappa.clone();
    (P::one() - P::int(2) * k.clone()) / (P::int(2) - P::int(3) * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::exponent_params;
    use crate::moments::{energy, moment_quadrature};
    use crate::smooth::sieve_smooth;
    use crate::Rational;

    fn euler_phi(n: u64) -> u64 {
        (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u64
    }

    #[test]
    fn farey_small() {
        assert_eq!(farey_fractions(1).unwrap(), vec![(1, 1)]);
        assert_eq!(farey_fractions(3).unwrap(), vec![(1, 3), (1, 2), (2, 3), (1, 1)]);
        assert_eq!(farey_fractions(5).unwrap().len(), 10);
        for q in [7u64, 30, 101] {
            let f = farey_fractions(q).unwrap();
            assert_eq!(f.len() as u64, (1..=q).map(euler_phi).sum::<u64>());
            assert!(f.windows(2).all(|w| w[0].0 * w[1].1 < w[1].0 * w[0].1));
            assert!(f.iter().all(|&(a, b)| num_integer::gcd(a, b) == 1 && a <= b));
        }
        assert!(farey_fractions(0).is_err());
        assert!(matches!(farey_fractions(MAX_FAREY_Q + 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn classify_examples() {
        let l = classify_theta(0.5f64, 2.0, 100).unwrap();
        assert_eq!((l.a, l.q), (1, 2));
        assert_eq!(l.distance, 0.0);
        assert!(l.sharp);
        assert_eq!(l.l, 1.0);

        let t = 1.0 / std::f64::consts::PI;
        let l = classify_theta(t, 10.0, 1000).unwrap();
        assert_eq!((l.a, l.q), (1, 3));
        assert!((l.distance - 0.015023).abs() < 1e-6);
        assert!(l.distance <= 1.0 / 30.0);

        let l = classify_theta(0.4f64, 3.0, 100).unwrap();
        assert!(l.q <= 3 && l.distance <= 1.0 / (3.0 * l.q as f64));
        assert!(((0.4 - l.center()).abs() - l.distance).abs() < 1e-15);

        // Near 1 the point belongs to 1/1 on the circle.
        let l = classify_theta(0.999f64, 10.0, 100).unwrap();
        assert_eq!((l.a, l.q), (1, 1));
        assert!((l.distance - 0.001).abs() < 1e-12);
        assert!(classify_theta(0.3f64, 0.5, 10).is_err());
        assert!(classify_theta(f64::NAN, 5.0, 10).is_err());
    }

    #[test]
    fn classification_picks_smallest_q() {
        for n in [97usize, 360, 1001] {
            for big_q in [1.0, 3.5, 10.0, 31.0] {
                for j in 0..n {
                    let l = classify_grid_node(j, n, big_q, 1000);
                    let qmax = big_q.floor() as u64;
                    let first = (1..=qmax)
                        .find(|&q| {
                            let r = (q as usize * j) % n;
                            (r.min(n - r) as f64) * big_q < n as f64
                        })
                        .unwrap();
                    assert_eq!(l.q, first, "j={j} n={n} Q={big_q}");
                    assert!(l.distance <= l.halfwidth * (1.0 + 1e-12));
                    assert_eq!(num_integer::gcd(l.a, l.q), 1);
                }
            }
        }
    }

    #[test]
    fn decomposition_totals() {
        let set = sieve_smooth(300, 11).unwrap();
        let psi = set.count() as f64;
        let p = exponent_params(Rational::from_integer(5.into()), Rational::from_integer(2.into()), 0.05).unwrap();
        let d = arc_decompose(&set, 2.0f64, 17.3, 301, &p, SplitRule::Thm1).unwrap();
        assert!(((d.part1 + d.part2) - psi).abs() < 1e-9 * psi);

        let interval = SmoothSet::from_members(4, 4, vec![1, 2, 3, 4]).unwrap();
        let d = arc_decompose(&interval, 4.0f64, 2.0, 17, &p, SplitRule::Thm2).unwrap();
        assert_eq!(d.split_q, 2.0);
        assert!(((d.part1 + d.part2) - 44.0).abs() < 1e-9 * 44.0);
        assert!(((d.sharp_part + d.flat_part) - d.part1).abs() < 1e-9 * 44.0);
        let arc_sum: f64 = d.per_arc.iter().map(|c| c.contribution).sum();
        assert!((arc_sum - 44.0).abs() < 1e-9 * 44.0);
        assert!(d.per_arc.iter().all(|c| c.contribution >= 0.0));
        assert!(d.per_arc.windows(2).all(|w| (w[0].q, w[0].a) < (w[1].q, w[1].a)));

        assert!(arc_decompose(&interval, 4.0f64, 2.0, 6, &p, SplitRule::Thm2).is_err());
    }

    #[test]
    fn decomposition_matches_energy_and_quadrature() {
        let set = sieve_smooth(400, 13).unwrap();
        let e = energy::<f64>(&set).unwrap().value;
        let p = exponent_params(13.0f64, 4.0, 0.05).unwrap();
        let q = optimal_q(400, &p, SplitRule::Thm2).unwrap();
        let d = arc_decompose(&set, 4.0f64, q, 2 * 399 + 1, &p, SplitRule::Thm2).unwrap();
        assert!(((d.part1 + d.part2) - e).abs() < 1e-6 * e);

        let q3 = moment_quadrature(&set, 3.0f64, 1600).unwrap().value;
        let d = arc_decompose(&set, 3.0f64, 25.0, 1600, &p, SplitRule::Thm1).unwrap();
        assert!(((d.part1 + d.part2) - q3).abs() < 1e-6 * q3);
    }

    #[test]
    fn optimal_q_rules() {
        let p = exponent_params(13.0f64, 4.0, 0.05).unwrap();
        let q = optimal_q(10_000, &p, SplitRule::Thm1).unwrap();
        assert!((q - 10f64.powf(2.2)).abs() < 1e-9);
        assert!((q - 158.489).abs() < 1e-3);

        let exact = exponent_params(
            Rational::from_integer(13.into()),
            Rational::from_integer(4.into()),
            0.05,
        )
        .unwrap();
        assert_eq!(exact.xi, Rational::new(16.into(), 19.into()));
        let q = optimal_q(10_000, &exact, SplitRule::Thm2).unwrap();
        assert!((q - 10_000f64.powf(16.0 / 19.0)).abs() < 1e-9 * q);

        let at30 = exact.with_rho(Rational::from_integer(30.into())).unwrap();
        assert!(matches!(optimal_q(10_000, &at30, SplitRule::Thm2), Err(Error::Validity(_))));
        let at2 = exact.with_rho(Rational::from_integer(2.into())).unwrap();
        assert!(optimal_q(10_000, &at2, SplitRule::Thm2).is_err());
    }

    #[test]
    fn threshold_exponent() {
        let p = exponent_params(Rational::from_integer(13.into()), Rational::from_integer(4.into()), 0.05).unwrap();
        // (1 - 2/13)/(2 - 3/13) = 11/23
        assert_eq!(balance_threshold_exponent(&p), Rational::new(11.into(), 23.into()));
        assert_eq!("thm2".parse::<SplitRule>().unwrap(), SplitRule::Thm2);
        assert!("thm3".parse::<SplitRule>().is_err());
    }
}
