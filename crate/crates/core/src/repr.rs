//! CDF oracles, next-bit predictors, and the constructive conversions between
//! them, plus conditional sampling from a predictor.
//!
//! A prefix `y` of length `k` selects the contiguous rank interval
//! `[y0^{n-k}, y1^{n-k}]`, so its cylinder mass is a difference of two CDF
//! values. Conversely a predictor determines every string mass as a chain
//! product of `n` conditionals, and `F(x)` as `mu(x)` plus the masses of the
//! cylinders `x_1..x_{i-1}0` for each `i` with `x_i = 1`.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{BitString, Prefix};
use crate::dist::{DyadicMass, ExplicitDistribution, MAX_EXPLICIT_LEN, MAX_LOG2_DENOM};
use crate::error::{Error, Result};

/// Tolerance under which a negative real cylinder mass is treated as zero.
pub const REAL_ZERO_TOLERANCE: f64 = 1e-12;

/// A probability value: exact when it comes from dyadic masses, real otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Probability {
    Exact(DyadicMass),
    Real(f64),
}

impl Probability {
    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(m) => m.to_f64(),
            Probability::Real(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<DyadicMass> {
        match self {
            Probability::Exact(m) => Some(*m),
            Probability::Real(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Probability::Exact(m) => m.numerator() == 0,
            Probability::Real(v) => *v == 0.0,
        }
    }
}

/// `x -> F(x) = sum_{z <= x} mu(z)`.
pub trait CdfOracle: Sync {
    fn n(&self) -> usize;

    fn eval(&self, x: &BitString) -> Result<Probability>;
}

impl<C: CdfOracle + ?Sized> CdfOracle for &C {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn eval(&self, x: &BitString) -> Result<Probability> {
        (**self).eval(x)
    }
}

/// Exact CDF backed by an explicit distribution's prefix sums.
#[derive(Clone, Debug)]
pub struct ExplicitCdf<'a> {
    dist: &'a ExplicitDistribution,
    cumulative: Vec<u64>,
}

impl ExplicitDistribution {
    pub fn cdf(&self) -> ExplicitCdf<'_> {
        ExplicitCdf {
            dist: self,
            cumulative: self.cumulative(),
        }
    }
}

impl ExplicitCdf<'_> {
    pub fn distribution(&self) -> &ExplicitDistribution {
        self.dist
    }

    pub fn eval_rank(&self, rank: u64) -> DyadicMass {
        DyadicMass::new(self.cumulative[rank as usize], self.dist.log2_denom())
            .expect("prefix sums never exceed 2^K")
    }
}

impl CdfOracle for ExplicitCdf<'_> {
    fn n(&self) -> usize {
        self.dist.n()
    }

    fn eval(&self, x: &BitString) -> Result<Probability> {
        if x.len() != self.dist.n() {
            return Err(Error::DimensionMismatch(x.len(), self.dist.n()));
        }
        Ok(Probability::Exact(self.eval_rank(x.rank())))
    }
}

/// Wraps an oracle and counts evaluations.
#[derive(Debug)]
pub struct CountingCdf<C> {
    inner: C,
    count: AtomicUsize,
}

impl<C: CdfOracle> CountingCdf<C> {
    pub fn new(inner: C) -> Self {
        Self {
            inner,
            count: AtomicUsize::new(0),
        }
    }

    pub fn evaluations(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.count.store(0, Ordering::Relaxed);
    }
}

impl<C: CdfOracle> CdfOracle for CountingCdf<C> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn eval(&self, x: &BitString) -> Result<Probability> {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.eval(x)
    }
}

/// Exact conditional probability `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactRatio {
    pub num: u64,
    pub den: u64,
}

/// `y -> Pr[x_{|y|+1} = 1 | y is a prefix of x]`, with the value 0 on
/// zero-mass cylinders.
pub trait NextBitPredictor: Sync {
    fn n(&self) -> usize;

    fn eval(&self, y: &Prefix) -> Result<f64>;

    /// The same conditional as an exact ratio, when the predictor has one.
    fn eval_exact(&self, _y: &Prefix) -> Result<Option<ExactRatio>> {
        Ok(None)
    }
}

impl<P: NextBitPredictor + ?Sized> NextBitPredictor for &P {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn eval(&self, y: &Prefix) -> Result<f64> {
        (**self).eval(y)
    }

    fn eval_exact(&self, y: &Prefix) -> Result<Option<ExactRatio>> {
        (**self).eval_exact(y)
    }
}

fn check_predictor_prefix(n: usize, y: &Prefix) -> Result<()> {
    if y.ambient_len() != n {
        return Err(Error::DimensionMismatch(y.ambient_len(), n));
    }
    if y.len() >= n {
        return Err(Error::Length(format!("predictor prefix must be shorter than n = {n}")));
    }
    Ok(())
}

/// Mass of all strings starting with `y`: `F(b_y) - F(a_y - 1)`, where the
/// predecessor of `0^n` contributes 0.
pub fn cylinder_mass<C: CdfOracle + ?Sized>(cdf: &C, y: &Prefix) -> Result<Probability> {
    if y.ambient_len() != cdf.n() {
        return Err(Error::DimensionMismatch(y.ambient_len(), cdf.n()));
    }
    let hi = cdf.eval(&y.high())?;
    let lo = match y.low().predecessor() {
        Some(p) => Some(cdf.eval(&p)?),
        None => None,
    };
    match (hi, lo) {
        (Probability::Exact(h), None) => Ok(Probability::Exact(h)),
        (Probability::Exact(h), Some(Probability::Exact(l))) => h
            .checked_sub(&l)
            .map(Probability::Exact)
            .ok_or_else(|| Error::NonMonotoneCdf(h.to_f64() - l.to_f64())),
        (h, lo) => {
            let d = h.to_f64() - lo.map_or(0.0, |l| l.to_f64());
            if d < -REAL_ZERO_TOLERANCE {
                Err(Error::NonMonotoneCdf(d))
            } else {
                Ok(Probability::Real(d.max(0.0)))
            }
        }
    }
}

/// Predictor derived from a CDF oracle by `f(y) = mu(y1) / mu(y)`.
#[derive(Debug)]
pub struct CdfPredictor<C> {
    cdf: C,
}

pub fn predictor_from_cdf<C: CdfOracle>(cdf: C) -> CdfPredictor<C> {
    CdfPredictor { cdf }
}

impl<C: CdfOracle> CdfPredictor<C> {
    fn masses(&self, y: &Prefix) -> Result<(Probability, Probability)> {
        check_predictor_prefix(self.cdf.n(), y)?;
        let whole = cylinder_mass(&self.cdf, y)?;
        if whole.is_zero() {
            return Ok((whole, whole));
        }
        let one = cylinder_mass(&self.cdf, &y.child(true)?)?;
        Ok((whole, one))
    }
}

impl<C: CdfOracle> NextBitPredictor for CdfPredictor<C> {
    fn n(&self) -> usize {
        self.cdf.n()
    }

    fn eval(&self, y: &Prefix) -> Result<f64> {
        let (whole, one) = self.masses(y)?;
        if whole.is_zero() {
            return Ok(0.0);
        }
        Ok(match (whole, one) {
            // common denominator, so the ratio of numerators is correctly rounded
            (Probability::Exact(w), Probability::Exact(o)) => {
                let k = w.log2_denom().max(o.log2_denom());
                o.numerator_at(k) as f64 / w.numerator_at(k) as f64
            }
            (w, o) => (o.to_f64() / w.to_f64()).clamp(0.0, 1.0),
        })
    }

    fn eval_exact(&self, y: &Prefix) -> Result<Option<ExactRatio>> {
        let (whole, one) = self.masses(y)?;
        Ok(match (whole, one) {
            (Probability::Exact(w), _) if w.numerator() == 0 => Some(ExactRatio { num: 0, den: 1 }),
            (Probability::Exact(w), Probability::Exact(o)) => {
                let k = w.log2_denom().max(o.log2_denom());
                Some(ExactRatio {
                    num: o.numerator_at(k),
                    den: w.numerator_at(k),
                })
            }
            _ => None,
        })
    }
}

/// Same conditional for every prefix.
#[derive(Clone, Copy, Debug)]
pub struct ConstantPredictor {
    n: usize,
    p: f64,
}

impl ConstantPredictor {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("conditional probability {p} not in [0, 1]")));
        }
        Ok(Self { n, p })
    }

    pub fn uniform(n: usize) -> Self {
        Self { n, p: 0.5 }
    }
}

impl NextBitPredictor for ConstantPredictor {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, y: &Prefix) -> Result<f64> {
        check_predictor_prefix(self.n, y)?;
        Ok(self.p)
    }

    fn eval_exact(&self, y: &Prefix) -> Result<Option<ExactRatio>> {
        check_predictor_prefix(self.n, y)?;
        let den = 1u64 << MAX_LOG2_DENOM;
        let scaled = self.p * den as f64;
        Ok((scaled.fract() == 0.0).then(|| ExactRatio {
            num: scaled as u64,
            den,
        }))
    }
}

/// Point mass at `x`: follows `x` and returns 0 off its path.
#[derive(Clone, Debug)]
pub struct PointPredictor {
    x: BitString,
}

impl PointPredictor {
    pub fn new(x: BitString) -> Self {
        Self { x }
    }

    fn bit(&self, y: &Prefix) -> Result<bool> {
        check_predictor_prefix(self.x.len(), y)?;
        let on_path = self.x.bits().starts_with(y.bits());
        Ok(on_path && self.x.bit(y.len()))
    }
}

impl NextBitPredictor for PointPredictor {
    fn n(&self) -> usize {
        self.x.len()
    }

    fn eval(&self, y: &Prefix) -> Result<f64> {
        Ok(if self.bit(y)? { 1.0 } else { 0.0 })
    }

    fn eval_exact(&self, y: &Prefix) -> Result<Option<ExactRatio>> {
        Ok(Some(ExactRatio {
            num: self.bit(y)? as u64,
            den: 1,
        }))
    }
}

/// Arbitrary conditional per prefix, stored in heap order
/// (`index = 2^k - 1 + value(y)`); `n <= 20`.
#[derive(Clone, Debug)]
pub struct TablePredictor {
    n: usize,
    table: Vec<f64>,
}

impl TablePredictor {
    pub fn new(n: usize, table: Vec<f64>) -> Result<Self> {
        if n == 0 || n > 20 {
            return Err(Error::Cap {
                what: "table predictor n",
                value: n,
                cap: 20,
            });
        }
        if table.len() != (1usize << n) - 1 {
            return Err(Error::Length(format!(
                "table needs {} entries, found {}",
                (1usize << n) - 1,
                table.len()
            )));
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::NegativeProbability { index, value });
        }
        Ok(Self { n, table })
    }

    pub fn heap_index(y: &Prefix) -> usize {
        (1usize << y.len()) - 1 + y.value() as usize
    }
}

impl NextBitPredictor for TablePredictor {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, y: &Prefix) -> Result<f64> {
        check_predictor_prefix(self.n, y)?;
        Ok(self.table[Self::heap_index(y)])
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Reduced non-negative fraction; `None` from arithmetic means overflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Fraction {
    num: u128,
    den: u128,
}

impl Fraction {
    const ONE: Fraction = Fraction { num: 1, den: 1 };
    const ZERO: Fraction = Fraction { num: 0, den: 1 };

    fn new(num: u128, den: u128) -> Fraction {
        if num == 0 {
            return Fraction::ZERO;
        }
        let g = gcd(num, den);
        Fraction {
            num: num / g,
            den: den / g,
        }
    }

    fn mul(self, other: Fraction) -> Option<Fraction> {
        let g1 = gcd(self.num, other.den).max(1);
        let g2 = gcd(other.num, self.den).max(1);
        let num = (self.num / g1).checked_mul(other.num / g2)?;
        let den = (self.den / g2).checked_mul(other.den / g1)?;
        Some(Fraction::new(num, den))
    }

    fn complement(self) -> Fraction {
        Fraction::new(self.den - self.num, self.den)
    }

    fn add(self, other: Fraction) -> Option<Fraction> {
        let g = gcd(self.den, other.den);
        let lhs = self.num.checked_mul(other.den / g)?;
        let rhs = other.num.checked_mul(self.den / g)?;
        let den = (self.den / g).checked_mul(other.den)?;
        Some(Fraction::new(lhs.checked_add(rhs)?, den))
    }

    /// Dyadic form when the denominator is a power of two no larger than `2^52`.
    fn to_dyadic(self) -> Option<DyadicMass> {
        if !self.den.is_power_of_two() {
            return None;
        }
        let k = self.den.trailing_zeros().max(1);
        if k > MAX_LOG2_DENOM {
            return None;
        }
        let num = self.num << (k - self.den.trailing_zeros());
        DyadicMass::new(num as u64, k).ok()
    }
}

/// Running mass along a path, exact while every conditional is exact.
#[derive(Clone, Copy, Debug)]
enum Running {
    Exact(Fraction),
    Real(f64),
}

impl Running {
    fn real(self) -> f64 {
        match self {
            Running::Exact(f) => f.num as f64 / f.den as f64,
            Running::Real(v) => v,
        }
    }

    /// `(mass of y0, mass of y1)` given the mass of `y` and `f(y)`.
    fn split<P: NextBitPredictor + ?Sized>(self, f: &P, y: &Prefix) -> Result<(Running, Running)> {
        if let Running::Exact(m) = self {
            if let Some(r) = f.eval_exact(y)? {
                if r.den > 0 && r.num <= r.den {
                    let p = Fraction::new(r.num as u128, r.den as u128);
                    if let (Some(one), Some(zero)) = (m.mul(p), m.mul(p.complement())) {
                        return Ok((Running::Exact(zero), Running::Exact(one)));
                    }
                }
            }
        }
        let m = self.real();
        let p = f.eval(y)?;
        Ok((Running::Real(m * (1.0 - p)), Running::Real(m * p)))
    }

    fn add(self, other: Running) -> Running {
        if let (Running::Exact(a), Running::Exact(b)) = (self, other) {
            if let Some(s) = a.add(b) {
                return Running::Exact(s);
            }
        }
        Running::Real(self.real() + other.real())
    }

    fn finish(self) -> Probability {
        match self {
            Running::Exact(f) => match f.to_dyadic() {
                Some(d) => Probability::Exact(d),
                None => Probability::Real(f.num as f64 / f.den as f64),
            },
            Running::Real(v) => Probability::Real(v),
        }
    }
}

fn path_mass<P: NextBitPredictor + ?Sized>(f: &P, bits: &[bool]) -> Result<Running> {
    let n = f.n();
    let mut y = Prefix::empty(n);
    let mut mass = Running::Exact(Fraction::ONE);
    for &b in bits {
        let (zero, one) = mass.split(f, &y)?;
        mass = if b { one } else { zero };
        y = y.child(b)?;
    }
    Ok(mass)
}

/// Cylinder mass of `y` under a predictor, as the chain product along `y`.
pub fn prefix_mass<P: NextBitPredictor + ?Sized>(f: &P, y: &Prefix) -> Result<Probability> {
    if y.ambient_len() != f.n() {
        return Err(Error::DimensionMismatch(y.ambient_len(), f.n()));
    }
    Ok(path_mass(f, y.bits())?.finish())
}

/// `mu(x) = prod_i [f(x_{<i}) if x_i = 1 else 1 - f(x_{<i})]`.
pub fn mass_from_predictor<P: NextBitPredictor + ?Sized>(f: &P, x: &BitString) -> Result<Probability> {
    if x.len() != f.n() {
        return Err(Error::DimensionMismatch(x.len(), f.n()));
    }
    Ok(path_mass(f, x.bits())?.finish())
}

/// `F(x) = mu(x) + sum_{i: x_i = 1} mu(x_1..x_{i-1} 0)`, using `n` predictor
/// evaluations along the path of `x`.
pub fn cdf_from_predictor<P: NextBitPredictor + ?Sized>(f: &P, x: &BitString) -> Result<Probability> {
    let n = f.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch(x.len(), n));
    }
    let mut y = Prefix::empty(n);
    let mut mass = Running::Exact(Fraction::ONE);
    let mut below = Running::Exact(Fraction::ZERO);
    for &b in x.bits() {
        let (zero, one) = mass.split(f, &y)?;
        if b {
            below = below.add(zero);
            mass = one;
        } else {
            mass = zero;
        }
        y = y.child(b)?;
    }
    Ok(below.add(mass).finish())
}

/// CDF oracle evaluated through a predictor.
#[derive(Debug)]
pub struct PredictorCdf<P> {
    predictor: P,
}

impl<P: NextBitPredictor> PredictorCdf<P> {
    pub fn new(predictor: P) -> Self {
        Self { predictor }
    }
}

impl<P: NextBitPredictor> CdfOracle for PredictorCdf<P> {
    fn n(&self) -> usize {
        self.predictor.n()
    }

    fn eval(&self, x: &BitString) -> Result<Probability> {
        cdf_from_predictor(&self.predictor, x)
    }
}

/// Materializes a predictor as an explicit distribution over `2^K`.
///
/// Exact when every conditional is an exact ratio whose chain products are
/// multiples of `2^-K`; otherwise the real chain products are quantized by
/// largest remainder.
pub fn to_explicit<P: NextBitPredictor + ?Sized>(f: &P, log2_denom: u32) -> Result<ExplicitDistribution> {
    let n = f.n();
    if n == 0 || n > MAX_EXPLICIT_LEN {
        return Err(Error::Cap {
            what: "explicit n",
            value: n,
            cap: MAX_EXPLICIT_LEN,
        });
    }
    if log2_denom == 0 || log2_denom > MAX_LOG2_DENOM {
        return Err(Error::Parse {
            field: "log2_denom",
            message: format!("{log2_denom} not in [1, {MAX_LOG2_DENOM}]"),
        });
    }
    if let Some(mass) = exact_leaves(f, log2_denom)? {
        return ExplicitDistribution::new(n, log2_denom, mass);
    }
    let probs = real_leaves(f)?;
    ExplicitDistribution::from_float_masses(&probs, log2_denom)
}

fn exact_leaves<P: NextBitPredictor + ?Sized>(f: &P, log2_denom: u32) -> Result<Option<Vec<u64>>> {
    let n = f.n();
    let mut level = vec![1u64 << log2_denom];
    for k in 0..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (value, &m) in level.iter().enumerate() {
            let y = Prefix::from_value(value as u64, k, n)?;
            let Some(r) = f.eval_exact(&y)? else {
                return Ok(None);
            };
            if r.den == 0 || r.num > r.den {
                return Ok(None);
            }
            let scaled = m as u128 * r.num as u128;
            if scaled % r.den as u128 != 0 {
                return Ok(None);
            }
            let one = (scaled / r.den as u128) as u64;
            next.push(m - one);
            next.push(one);
        }
        level = next;
    }
    Ok(Some(level))
}

/// Real chain products for every string, in rank order.
pub fn real_leaves<P: NextBitPredictor + ?Sized>(f: &P) -> Result<Vec<f64>> {
    let n = f.n();
    let mut level = vec![1.0f64];
    for k in 0..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (value, &m) in level.iter().enumerate() {
            let p = f.eval(&Prefix::from_value(value as u64, k, n)?)?;
            next.push(m * (1.0 - p));
            next.push(m * p);
        }
        level = next;
    }
    Ok(level)
}

/// Deterministic conditional sampler: the sample drawn at stream position
/// `t` depends only on `(seed, t, prefix)`.
#[derive(Debug)]
pub struct SamplerHandle<P> {
    predictor: P,
    rng_seed: u64,
    stream_position: u64,
}

impl<P: NextBitPredictor> SamplerHandle<P> {
    pub fn new(predictor: P, rng_seed: u64) -> Self {
        Self {
            predictor,
            rng_seed,
            stream_position: 0,
        }
    }

    pub fn with_position(predictor: P, rng_seed: u64, stream_position: u64) -> Self {
        Self {
            predictor,
            rng_seed,
            stream_position,
        }
    }

    pub fn predictor(&self) -> &P {
        &self.predictor
    }

    pub fn position(&self) -> u64 {
        self.stream_position
    }

    pub fn n(&self) -> usize {
        self.predictor.n()
    }

    /// Draws `x` extending `y` with probability `Pr[x | y is a prefix of x]`
    /// and advances the stream position.
    pub fn sample(&mut self, y: &Prefix) -> Result<BitString> {
        let n = self.predictor.n();
        if y.ambient_len() != n {
            return Err(Error::DimensionMismatch(y.ambient_len(), n));
        }
        if prefix_mass(&self.predictor, y)?.is_zero() {
            return Err(Error::UnsupportedPrefix(y.to_string()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(self.stream_position);
        self.stream_position += 1;

        let mut current = y.clone();
        while current.len() < n {
            let p = self.predictor.eval(&current)?;
            let u: f64 = rng.random();
            current = current.child(u < p)?;
        }
        BitString::new(current.bits().to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn two_bit_table() -> TablePredictor {
        // f(ε) = 3/4, f(0) = 1/2, f(1) = 1/3
        TablePredictor::new(2, vec![0.75, 0.5, 1.0 / 3.0]).unwrap()
    }

    #[test]
    fn cylinder_of_empty_prefix_is_one() {
        let u = ExplicitDistribution::uniform(3, 10).unwrap();
        let m = cylinder_mass(&u.cdf(), &Prefix::empty(3)).unwrap();
        assert_eq!(m.to_f64(), 1.0);
        let m = cylinder_mass(&u.cdf(), &Prefix::parse("01", 3).unwrap()).unwrap();
        assert_eq!(m.to_f64(), 0.25);
        assert!(matches!(m, Probability::Exact(_)));
    }

    #[test]
    fn non_monotone_cdf_is_rejected() {
        struct Broken;
        impl CdfOracle for Broken {
            fn n(&self) -> usize {
                2
            }
            fn eval(&self, x: &BitString) -> Result<Probability> {
                Ok(Probability::Real(if x.rank() == 1 { 0.9 } else { 0.5 }))
            }
        }
        let err = cylinder_mass(&Broken, &Prefix::parse("1", 2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NonMonotoneCdf(_)));
        assert!(predictor_from_cdf(Broken).eval(&Prefix::parse("1", 2).unwrap()).is_err());
    }

    #[test]
    fn uniform_predictor_from_cdf_is_half() {
        let u = ExplicitDistribution::uniform(4, 8).unwrap();
        let f = predictor_from_cdf(u.cdf());
        for k in 0..4 {
            for v in 0..(1u64 << k) {
                assert_eq!(f.eval(&Prefix::from_value(v, k, 4).unwrap()).unwrap(), 0.5);
            }
        }
    }

    #[test]
    fn point_mass_predictor_follows_path() {
        let x = bs("1011");
        let d = ExplicitDistribution::point(&x, 6).unwrap();
        let f = predictor_from_cdf(d.cdf());
        for k in 0..4 {
            for v in 0..(1u64 << k) {
                let y = Prefix::from_value(v, k, 4).unwrap();
                let expected = if y.is_prefix_of(&x) { x.bit(k) as u8 as f64 } else { 0.0 };
                assert_eq!(f.eval(&y).unwrap(), expected, "prefix {y}");
            }
        }
    }

    #[test]
    fn chain_product_by_hand() {
        let f = two_bit_table();
        let expect = [("00", 0.125), ("01", 0.125), ("10", 0.5), ("11", 0.25)];
        for (x, m) in expect {
            let got = mass_from_predictor(&f, &bs(x)).unwrap().to_f64();
            assert!((got - m).abs() < 1e-15, "{x}: {got} vs {m}");
        }
        let f = ConstantPredictor::uniform(4);
        let m = mass_from_predictor(&f, &bs("0110")).unwrap();
        assert_eq!(m, Probability::Exact(DyadicMass::new(1, 4).unwrap()));
    }

    #[test]
    fn cdf_from_predictor_by_hand() {
        let f = two_bit_table();
        let got = cdf_from_predictor(&f, &bs("10")).unwrap().to_f64();
        assert!((got - 0.75).abs() < 1e-15);
        let total = cdf_from_predictor(&f, &bs("11")).unwrap().to_f64();
        assert!((total - 1.0).abs() < 1e-9);
        let u = ConstantPredictor::uniform(6);
        let total = cdf_from_predictor(&u, &BitString::ones(6).unwrap()).unwrap();
        assert!(matches!(total, Probability::Exact(_)));
        assert_eq!(total.to_f64(), 1.0);
    }

    #[test]
    fn to_explicit_examples() {
        let d = to_explicit(&ConstantPredictor::uniform(3), 6).unwrap();
        assert_eq!(d.masses(), &[8; 8]);
        let d = to_explicit(&PointPredictor::new(bs("110")), 6).unwrap();
        assert_eq!(d.masses(), &[0, 0, 0, 0, 0, 0, 64, 0]);
        assert!(to_explicit(&ConstantPredictor::uniform(25), 40).is_err());
    }

    #[test]
    fn sampler_is_deterministic_and_respects_zero_mass() {
        let x = bs("0110");
        let mut s = SamplerHandle::new(PointPredictor::new(x.clone()), 7);
        for _ in 0..20 {
            assert_eq!(s.sample(&Prefix::empty(4)).unwrap(), x);
        }
        let err = s.sample(&Prefix::parse("1", 4).unwrap()).unwrap_err();
        assert!(matches!(err, Error::UnsupportedPrefix(_)));

        let u = ConstantPredictor::uniform(32);
        let mut a = SamplerHandle::with_position(u, 99, 5);
        let mut b = SamplerHandle::with_position(u, 99, 5);
        let y = Prefix::parse("101", 32).unwrap();
        let sa = a.sample(&y).unwrap();
        assert_eq!(sa, b.sample(&y).unwrap());
        assert!(y.is_prefix_of(&sa));
        assert_ne!(a.sample(&y).unwrap(), sa, "next position differs with overwhelming probability");
    }
}
