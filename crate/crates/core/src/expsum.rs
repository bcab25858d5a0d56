//! Exponential sums `S(θ) = Σ_{n ∈ S(x,y)} e(θn)` with `e(t) = exp(2πit)`.

use num_integer::Integer;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::exponents::ExponentParams;
use crate::scalar::{Exponent, Real};
use crate::smooth::SmoothSet;
use crate::sum::Compensated;

/// Largest grid accepted by [`eval_s_grid`] (one complex value per node).
pub const MAX_GRID: usize = 1 << 26;

/// Value of `S(θ)` at a reduced point `θ ∈ [0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpSumValue<T> {
    pub theta: T,
    pub re: T,
    pub im: T,
    pub modulus: T,
}

impl<T: Real> ExpSumValue<T> {
    fn new(theta: T, re: T, im: T) -> Self {
        Self {
            theta,
            re,
            im,
            modulus: re.hypot(im),
        }
    }

    /// `|S|²` computed from the components.
    pub fn norm_sqr(&self) -> T {
        self.re * self.re + self.im * self.im
    }
}

#[inline]
fn reduce<T: Real>(theta: T) -> T {
    let r = theta - theta.floor();
    // theta slightly below an integer can round up to exactly 1.
    if r >= T::one() {
        T::zero()
    } else {
        r
    }
}

/// Fractional part of `θ·n`, carrying the rounding error of the product.
#[inline]
fn phase<T: Real>(theta: T, n: T) -> T {
    let p = theta * n;
    let err = theta.mul_add(n, -p);
    (p - p.floor()) + err
}

/// Evaluates `S(θ)` by compensated summation in ascending `n`.
pub fn eval_s<T: Real>(theta: T, set: &SmoothSet) -> ExpSumValue<T> {
    let theta = reduce(theta);
    if theta == T::zero() {
        return ExpSumValue::new(theta, T::from_count(set.count()), T::zero());
    }
    let tau = T::TAU();
    let mut re = Compensated::new();
    let mut im = Compensated::new();
    for &n in set.members() {
        let (s, c) = (tau * phase(theta, T::from_count(n))).sin_cos();
        re.add(c);
        im.add(s);
    }
    ExpSumValue::new(theta, re.value(), im.value())
}

/// Evaluates `S(j/N)` for `j = 0, …, N − 1` with one length-`N` transform of
/// the indicator vector of the set folded modulo `N`.
pub fn eval_s_grid<T: Real>(set: &SmoothSet, n: usize) -> Result<Vec<ExpSumValue<T>>> {
    if n == 0 {
        return Err(Error::Argument("grid size must be at least 1".into()));
    }
    if n > MAX_GRID {
        return Err(Error::capacity("grid size", n as u64, MAX_GRID as u64));
    }
    let mut folded = vec![0u64; n];
    for &m in set.members() {
        folded[(m % n as u64) as usize] += 1;
    }
    let mut buf: Vec<Complex<T>> = folded
        .into_iter()
        .map(|c| Complex::new(T::from_count(c), T::zero()))
        .collect();
    // The inverse transform carries the e(+jm/N) kernel.
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let nf = T::from_count(n as u64);
    Ok(buf
        .into_iter()
        .enumerate()
        .map(|(j, z)| ExpSumValue::new(T::from_count(j as u64) / nf, z.re, z.im))
        .collect())
}

/// Which pointwise bound a [`SkeletonReport`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaId {
    /// `x^{1}(x^{-1/4} + q^{-1/2} + (q/x)^{1/2}) ℒ`, for `y = x^{o(1)}`.
    FouvryTenenbaum,
    /// `Ψ (qℒ)^{-γ} (ln x)^{5/2}`, under `qℒ ≤ 2x^{1/2-ε}`.
    Harper,
    /// `Ψ ((qℒ)^{-γ} + (qℒ x^{κ-1})^{1/2})`, unconditional.
    Baker,
}

impl LemmaId {
    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::FouvryTenenbaum => "FT",
            LemmaId::Harper => "HARPER",
            LemmaId::Baker => "BAKER",
        }
    }
}

/// A pointwise bound evaluated with every `o(1)` exponent set to zero and
/// implicit constants set to one.
///
/// `ratio = |S(θ)| / value` is for empirical study only; no inequality
/// between the two is implied at finite `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonReport<T> {
    pub lemma: LemmaId,
    pub theta: T,
    pub a: i64,
    pub q: u64,
    /// `ℒ = 1 + x‖θ − a/q‖`, distance taken modulo one.
    pub l: T,
    pub value: T,
    /// The lemma's arithmetic hypothesis.
    pub valid: bool,
    /// `K ≤ 3`: the lemma is stated only for `K > 3`.
    pub out_of_theory: bool,
    pub modulus: T,
    pub ratio: T,
}

impl<T: Real> SkeletonReport<T> {
    /// Turns a failed hypothesis or an out-of-theory `K` into an error.
    pub fn strict(self) -> Result<Self> {
        if self.out_of_theory {
            return Err(Error::Validity(format!(
                "{} skeleton evaluated with K <= 3",
                self.lemma.as_str()
            )));
        }
        if !self.valid {
            return Err(Error::Validity(format!(
                "{} hypothesis fails at q = {}, L = {}",
                self.lemma.as_str(),
                self.q,
                self.l
            )));
        }
        Ok(self)
    }
}

/// Distance between two points of `ℝ/ℤ`.
fn circle_distance<T: Real>(a: T, b: T) -> T {
    let d = reduce(a - b);
    d.min(T::one() - d)
}

struct Frame<T> {
    x: T,
    psi: T,
    l: T,
    modulus: T,
}

fn frame<T: Real>(theta: T, a: i64, q: u64, set: &SmoothSet) -> Result<Frame<T>> {
    if q == 0 {
        return Err(Error::Argument("q must be at least 1".into()));
    }
    if (a.unsigned_abs()).gcd(&q) != 1 {
        return Err(Error::Argument(format!("gcd({a}, {q}) != 1")));
    }
    let x = T::from_count(set.x());
    let center = T::lit(a as f64) / T::from_count(q);
    Ok(Frame {
        x,
        psi: T::from_count(set.count()),
        l: T::one() + x * circle_distance(theta, center),
        modulus: eval_s(theta, set).modulus,
    })
}

fn report<T: Real>(
    lemma: LemmaId,
    theta: T,
    a: i64,
    q: u64,
    f: Frame<T>,
    value: T,
    valid: bool,
    out_of_theory: bool,
) -> SkeletonReport<T> {
    SkeletonReport {
        lemma,
        theta,
        a,
        q,
        l: f.l,
        value,
        valid,
        out_of_theory,
        modulus: f.modulus,
        ratio: f.modulus / value,
    }
}

/// Fouvry–Tenenbaum shape `x (x^{-1/4} + q^{-1/2} + (q/x)^{1/2}) ℒ`.
///
/// The range condition `3 ≤ y = x^{o(1)}` has no finite-`x` content and is
/// not enforced, so `valid` is always true.
pub fn skeleton_ft<T: Real>(theta: T, a: i64, q: u64, set: &SmoothSet) -> Result<SkeletonReport<T>> {
    let f = frame(theta, a, q, set)?;
    let qf = T::from_count(q);
    let half = T::lit(0.5);
    let value = f.x * (f.x.powf(T::lit(-0.25)) + qf.powf(-half) + (qf / f.x).powf(half)) * f.l;
    Ok(report(LemmaId::FouvryTenenbaum, theta, a, q, f, value, true, false))
}

/// Harper shape `Ψ (qℒ)^{-γ} (ln x)^{5/2}`, valid when `qℒ ≤ 2x^{1/2-ε}`.
pub fn skeleton_harper<T: Real, P: Exponent>(
    theta: T,
    a: i64,
    q: u64,
    set: &SmoothSet,
    params: &ExponentParams<P>,
) -> Result<SkeletonReport<T>> {
    let f = frame(theta, a, q, set)?;
    let gamma = T::lit(params.gamma.approx());
    let eps = T::lit(params.epsilon);
    let ql = T::from_count(q) * f.l;
    let value = f.psi * ql.powf(-gamma) * f.x.ln().powf(T::lit(2.5));
    let valid = ql <= T::lit(2.0) * f.x.powf(T::lit(0.5) - eps);
    Ok(report(LemmaId::Harper, theta, a, q, f, value, valid, !params.in_theory()))
}

/// Baker shape `Ψ ((qℒ)^{-γ} + (qℒ x^{κ-1})^{1/2})`; no arithmetic hypothesis.
pub fn skeleton_baker<T: Real, P: Exponent>(
    theta: T,
    a: i64,
    q: u64,
    set: &SmoothSet,
    params: &ExponentParams<P>,
) -> Result<SkeletonReport<T>> {
    let f = frame(theta, a, q, set)?;
    let gamma = T::lit(params.gamma.approx());
    let kappa = T::lit(params.kappa.approx());
    let ql = T::from_count(q) * f.l;
    let value = f.psi * (ql.powf(-gamma) + (ql * f.x.powf(kappa - T::one())).sqrt());
    Ok(report(LemmaId::Baker, theta, a, q, f, value, true, !params.in_theory()))
}
