//! Brute-force oracles shared by the integration and acceptance tests. They
//! reimplement each quantity directly from its definition and share no code
//! with the library beyond the data types.

#![allow(dead_code)]

use bitdist::dist::ExplicitDistribution;
use bitdist::repr::Probability;
use rand::Rng;

/// Random distribution with exact masses: `2^n - 1` sorted cut points in
/// `[0, 2^K]`, masses are the gaps. About a quarter of the strings get zero
/// mass when `sparse` is set.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize, k: u32, sparse: bool) -> ExplicitDistribution {
    let total = 1u64 << k;
    let size = 1usize << n;
    loop {
        let mut cuts: Vec<u64> = (0..size - 1).map(|_| rng.random_range(0..=total)).collect();
        cuts.push(0);
        cuts.push(total);
        cuts.sort_unstable();
        let mut mass: Vec<u64> = cuts.windows(2).map(|w| w[1] - w[0]).collect();
        if sparse {
            // move the mass of dropped strings onto a kept one
            let mut moved = 0;
            for m in mass.iter_mut() {
                if rng.random_range(0..4) == 0 {
                    moved += *m;
                    *m = 0;
                }
            }
            let keep = rng.random_range(0..size);
            mass[keep] += moved;
        }
        if mass.iter().sum::<u64>() == total {
            return ExplicitDistribution::new(n, k, mass).expect("valid by construction");
        }
    }
}

/// `F(rank)` as an integer numerator over the distribution's denominator.
pub fn brute_cdf(d: &ExplicitDistribution, rank: usize) -> u128 {
    d.masses()[..=rank].iter().map(|&m| m as u128).sum()
}

/// Brute-force cylinder mass of the prefix of length `len` with value `v`.
pub fn brute_cylinder(d: &ExplicitDistribution, v: usize, len: usize) -> u128 {
    let shift = d.n() - len;
    (v << shift..(v + 1) << shift).map(|r| d.masses()[r] as u128).sum()
}

/// Numerator of an exact probability over `2^k`, or `None` if it is real
/// or needs a finer denominator.
pub fn numerator_over(p: &Probability, k: u32) -> Option<u128> {
    let m = p.exact()?;
    if m.log2_denom() > k {
        let drop = m.log2_denom() - k;
        let num = m.numerator() as u128;
        return (num % (1u128 << drop) == 0).then_some(num >> drop);
    }
    Some((m.numerator() as u128) << (k - m.log2_denom()))
}

/// `sum p log2(p/q)` with the usual conventions, plain summation.
pub fn brute_kl(p: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b == 0.0 {
                return f64::INFINITY;
            }
            s += a * (a / b).log2();
        }
    }
    s
}

pub fn brute_sd(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn brute_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&a| a > 0.0).map(|&a| a * a.log2()).sum::<f64>()
}

/// Random probability vector with strictly positive entries.
pub fn random_probs<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..1usize << n).map(|_| rng.random_range(0.01..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// `log2(Pr[x_i = 1 | x_<i = y]) - log2(Pr[x_i = 0 | ...])` for the full-prefix
/// cell `(len, v)` of an explicit distribution, from cylinder sums.
pub fn brute_log_odds(d: &ExplicitDistribution, v: usize, len: usize) -> f64 {
    let one = brute_cylinder(d, 2 * v + 1, len + 1) as f64;
    let zero = brute_cylinder(d, 2 * v, len + 1) as f64;
    (one / zero).log2()
}

/// Optimal cross-entropy of a Markov model of order `k` with logits clamped
/// to `[-b, b]`, by direct counting of `(position, context, bit)` weights.
pub fn brute_markov_optimum(d: &ExplicitDistribution, k: usize, b: f64) -> f64 {
    let n = d.n();
    let mut total = 0.0;
    for i in 0..n {
        let width = i.min(k);
        let mut ones = vec![0.0f64; 1 << width];
        let mut zeros = vec![0.0f64; 1 << width];
        for r in 0..1usize << n {
            let p = d.prob_of(r);
            if p == 0.0 {
                continue;
            }
            let ctx = (r >> (n - i)) & ((1 << width) - 1);
            let ctx = if i == 0 { 0 } else { ctx };
            if (r >> (n - 1 - i)) & 1 == 1 {
                ones[ctx] += p;
            } else {
                zeros[ctx] += p;
            }
        }
        for c in 0..1usize << width {
            let (a, z) = (ones[c], zeros[c]);
            if a + z == 0.0 {
                continue;
            }
            let q = if z == 0.0 {
                1.0 / (1.0 + (-b).exp2())
            } else if a == 0.0 {
                1.0 / (1.0 + b.exp2())
            } else {
                let q = a / (a + z);
                q.clamp(1.0 / (1.0 + b.exp2()), 1.0 / (1.0 + (-b).exp2()))
            };
            if a > 0.0 {
                total -= a * q.log2();
            }
            if z > 0.0 {
                total -= z * (1.0 - q).log2();
            }
        }
    }
    total
}

pub trait ProbOf {
    fn prob_of(&self, rank: usize) -> f64;
}

impl ProbOf for ExplicitDistribution {
    fn prob_of(&self, rank: usize) -> f64 {
        self.masses()[rank] as f64 / (1u64 << self.log2_denom()) as f64
    }
}
