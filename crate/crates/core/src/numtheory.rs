//! Exact integer arithmetic for the classical half of Shor's algorithm:
//! gcd, modular exponentiation, multiplicative orders, the Carmichael
//! function of a semiprime, prime-power detection, order post-processing and
//! continued-fraction period extraction.
//!
//! Everything operates on `u64`; intermediate products go through `u128`.

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumTheoryError {
    #[error("gcd(0, 0) is undefined")]
    BothZero,
    #[error("{a} is not coprime to {n}")]
    NotCoprime { a: u64, n: u64 },
    #[error("base {a} must satisfy 1 < a < {n}")]
    BaseOutOfRange { a: u64, n: u64 },
    #[error("modulus {0} is too small")]
    ModulusTooSmall(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("primes must be distinct (got {0} twice)")]
    EqualPrimes(u64),
    #[error("{r} is not the order of {a} modulo {n} (order is {order})")]
    NotTheOrder { a: u64, n: u64, r: u64, order: u64 },
    #[error("gcd(s +/- 1, {n}) with s = {s} only yields trivial factors")]
    TrivialFactors { n: u64, s: u64 },
}

pub type Result<T> = std::result::Result<T, NumTheoryError>;

/// Euclid's algorithm.
pub fn gcd(a: u64, b: u64) -> Result<u64> {
    if a == 0 && b == 0 {
        return Err(NumTheoryError::BothZero);
    }
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    Ok(a)
}

fn gcd_nonzero(a: u64, b: u64) -> u64 {
    gcd(a, b).unwrap_or(0)
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// `a^x mod n` by square-and-multiply. `n == 1` yields 0.
pub fn mod_pow(a: u64, x: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut base = a % n;
    let mut exp = x;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Checks `1 < a < n`, `n >= 3` and `gcd(a, n) = 1`.
pub fn check_base(a: u64, n: u64) -> Result<()> {
    if n < 3 {
        return Err(NumTheoryError::ModulusTooSmall(n));
    }
    if a <= 1 || a >= n {
        return Err(NumTheoryError::BaseOutOfRange { a, n });
    }
    if gcd_nonzero(a, n) != 1 {
        return Err(NumTheoryError::NotCoprime { a, n });
    }
    Ok(())
}

/// Smallest `r > 0` with `a^r = 1 (mod n)`, by direct scan (bounded by `n`).
pub fn multiplicative_order(a: u64, n: u64) -> Result<u64> {
    check_base(a, n)?;
    let mut cur = a % n;
    for r in 1..=n {
        if cur == 1 {
            return Ok(r);
        }
        cur = mul_mod(cur, a, n);
    }
    unreachable!("units modulo n have order below n")
}

/// Deterministic trial division. Intended for the small moduli this crate
/// handles (well below `2^32`).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `n = p * q` with `p < q` distinct odd primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Semiprime {
    pub n: u64,
    pub p: u64,
    pub q: u64,
}

impl Semiprime {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        for x in [p, q] {
            if x < 3 || !is_prime(x) {
                return Err(NumTheoryError::NotOddPrime(x));
            }
        }
        if p == q {
            return Err(NumTheoryError::EqualPrimes(p));
        }
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        Ok(Self { n: p * q, p, q })
    }

    /// Recovers the factorization of `n` by trial division, if `n` is a
    /// product of two distinct odd primes.
    pub fn from_n(n: u64) -> Option<Self> {
        let mut d = 3u64;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return Self::new(d, n / d).ok();
            }
            d += 2;
        }
        None
    }

    /// All such semiprimes below `bound`, ascending in `n`.
    pub fn all_below(bound: u64) -> Vec<Self> {
        let mut out: Vec<Self> = (15..bound).filter_map(Self::from_n).collect();
        out.sort_by_key(|s| s.n);
        out
    }

    pub fn carmichael(&self) -> u64 {
        (self.p - 1).lcm(&(self.q - 1))
    }
}

/// Carmichael function `lcm(p - 1, q - 1)` of `n = p q`.
pub fn carmichael(p: u64, q: u64) -> Result<u64> {
    Ok(Semiprime::new(p, q)?.carmichael())
}

/// Divisors of the Carmichael function strictly greater than one.
pub fn allowed_periods(p: u64, q: u64) -> Result<Vec<u64>> {
    let lambda = carmichael(p, q)?;
    Ok((2..=lambda).filter(|d| lambda % d == 0).collect())
}

/// A base and its multiplicative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRecord {
    pub a: u64,
    pub r: u64,
}

/// Orders of every `a` in `(1, n)` coprime to `n`, ascending in `a`.
pub fn coprime_order_table(n: u64) -> Result<Vec<OrderRecord>> {
    if n < 3 {
        return Err(NumTheoryError::ModulusTooSmall(n));
    }
    (2..n)
        .filter(|&a| gcd_nonzero(a, n) == 1)
        .map(|a| multiplicative_order(a, n).map(|r| OrderRecord { a, r }))
        .collect()
}

/// Returns `(p, k)` with `p` prime and `p^k = n`, if one exists. Checks the
/// exact integer `k`-th root for every `k` up to `log2 n` (which covers the
/// `log3 n` bound needed for odd `n`).
pub fn is_prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let max_k = 63 - n.leading_zeros();
    (1..=max_k.max(1)).rev().find_map(|k| {
        let root = n.nth_root(k);
        (root.checked_pow(k) == Some(n) && is_prime(root)).then_some((root, k))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PostProcessStatus {
    Factors,
    OddOrderNoSquareRoot,
    MinusOneCongruence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostProcessOutcome {
    pub status: PostProcessStatus,
    /// `(f1, f2)` with `f1 <= f2` and `f1 * f2 = n` when `status == Factors`.
    pub factors: Option<(u64, u64)>,
    /// The square root of unity `s` that was tried, if one was computed.
    pub s: Option<u64>,
}

impl PostProcessOutcome {
    fn failure(status: PostProcessStatus, s: Option<u64>) -> Self {
        Self { status, factors: None, s }
    }
}

/// Classical post-processing of an order `r` of `a` modulo `n`.
///
/// For odd `r` the algorithm can only continue when `a` itself is a perfect
/// square `b^2`; then `s = b^r mod n` plays the role of `a^(r/2)`.
pub fn shor_postprocess(n: u64, a: u64, r: u64) -> Result<PostProcessOutcome> {
    let order = multiplicative_order(a, n)?;
    if order != r {
        return Err(NumTheoryError::NotTheOrder { a, n, r, order });
    }
    let s = if r.is_multiple_of(2) {
        mod_pow(a, r / 2, n)
    } else {
        let b = a.sqrt();
        if b * b != a {
            return Ok(PostProcessOutcome::failure(
                PostProcessStatus::OddOrderNoSquareRoot,
                None,
            ));
        }
        mod_pow(b, r, n)
    };
    if s == n - 1 {
        return Ok(PostProcessOutcome::failure(
            PostProcessStatus::MinusOneCongruence,
            Some(s),
        ));
    }
    let plus = gcd_nonzero(s + 1, n);
    let minus = gcd_nonzero((s + n - 1) % n, n);
    let trivial = |f: u64| f == 1 || f == n;
    if trivial(plus) || trivial(minus) {
        return Err(NumTheoryError::TrivialFactors { n, s });
    }
    let (f1, f2) = if plus <= minus { (plus, minus) } else { (minus, plus) };
    Ok(PostProcessOutcome {
        status: PostProcessStatus::Factors,
        factors: Some((f1, f2)),
        s: Some(s),
    })
}

/// Convergents `(numerator, denominator)` of the continued fraction of
/// `k / m`, in order.
pub fn convergents(k: u64, m: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    let (mut num, mut den) = (k, m);
    // h_{-1}=1, h_{-2}=0; k_{-1}=0, k_{-2}=1
    let (mut h1, mut h2) = (1u128, 0u128);
    let (mut q1, mut q2) = (0u128, 1u128);
    loop {
        let a = (num / den) as u128;
        let h = a * h1 + h2;
        let q = a * q1 + q2;
        out.push((h as u64, q as u64));
        (h2, h1) = (h1, h);
        (q2, q1) = (q1, q);
        let rem = num % den;
        if rem == 0 {
            break;
        }
        (num, den) = (den, rem);
    }
    out
}

/// Period candidate from a measured QFT outcome `k` on a register of size
/// `m_size`: the denominator of the last convergent of `k / m_size` whose
/// denominator lies in `(1, n)`. Returns `None` for outcomes that carry no
/// period information (e.g. `k = 0`).
pub fn continued_fraction_order(k: u64, m_size: u64, n: u64) -> Option<u64> {
    convergents(k, m_size)
        .into_iter()
        .map(|(_, d)| d).rfind(|&d| d > 1 && d < n)
}

/// Combines period candidates into a verified order of `a` modulo `n`.
///
/// Tries every candidate and every pairwise lcm, smallest first, keeping the
/// first value `t` with `a^t = 1 (mod n)`, then reduces it to its smallest
/// divisor that still satisfies the congruence.
pub fn combine_order_candidates(a: u64, n: u64, candidates: &[u64]) -> Option<u64> {
    let mut distinct: Vec<u64> = candidates.iter().copied().filter(|&d| d > 0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let mut pool = distinct.clone();
    for (i, &x) in distinct.iter().enumerate() {
        for &y in &distinct[i + 1..] {
            pool.push(x.lcm(&y));
        }
    }
    pool.sort_unstable();
    pool.dedup();
    let t = pool.into_iter().find(|&t| mod_pow(a, t, n) == 1)?;
    (1..=t).find(|&d| t % d == 0 && mod_pow(a, d, n) == 1)
}
