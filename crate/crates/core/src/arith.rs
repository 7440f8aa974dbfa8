//! Integer and symbol primitives: primality, factorization, Kronecker
//! symbols and decomposition of fundamental discriminants into prime
//! discriminants.
//!
//! Everything here works in `i64`/`u64`; the survey never goes anywhere
//! near the 63-bit limit. Exact big-integer arithmetic is confined to the
//! multiquadratic module, which has its own coefficient type.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ArithError {
    #[error("kronecker symbol (a/n) undefined for n = 0")]
    ZeroModulus,
    #[error("{0} is not a fundamental discriminant: divisible by the square {1}")]
    SquareFactor(i64, i64),
    #[error("{0} is not a fundamental discriminant: {0} ≡ {1} (mod 4)")]
    BadCongruence(i64, i64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
}

/// Kronecker symbol (a/n), completely multiplicative in both arguments,
/// extending the Jacobi symbol by the usual conventions at 2, −1 and units.
///
/// For n < 0 we use (a/−1) = sign(a) (with (0/−1) = 1), so that
/// (a/n) = (a/−1)·(a/|n|).
pub fn kronecker(a: i64, n: i64) -> Result<i64, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroModulus);
    }
    let mut a = a;
    let mut n = n;
    let mut result: i64 = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    if n % 2 == 0 {
        if a % 2 == 0 {
            return Ok(0);
        }
        // (a/2) depends on a mod 8
        let tz = n.trailing_zeros();
        let am8 = a.rem_euclid(8);
        if (am8 == 3 || am8 == 5) && tz % 2 == 1 {
            result = -result;
        }
        n >>= tz;
    }
    // now n odd positive; run the Jacobi algorithm
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let nm8 = n % 8;
            if nm8 == 3 || nm8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        Ok(result)
    } else {
        Ok(0)
    }
}

/// Deterministic Miller–Rabin for u64 (the standard 7-base certificate).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn pollard_rho(n: u64) -> u64 {
    // n odd composite, not a prime power guard needed by callers
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Prime factorization of |n| as (prime, exponent) pairs, primes ascending.
/// Trial division by small primes, then Pollard rho on what is left.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    let mut n = n;
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n == 0 {
        return out;
    }
    for p in 2u64.. {
        if p * p > n || p > 1_000_000 {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    let mut big: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            big.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    big.sort_unstable();
    for m in big {
        match out.iter_mut().find(|(p, _)| *p == m) {
            Some((_, e)) => *e += 1,
            None => out.push((m, 1)),
        }
    }
    out.sort_unstable();
    out
}

pub fn is_squarefree(n: u64) -> bool {
    factor(n).iter().all(|&(_, e)| e == 1)
}

/// True iff d is a fundamental discriminant: d ≡ 1 (mod 4) squarefree, or
/// d = 4m with m ≡ 2, 3 (mod 4) squarefree. 0 and 1 are not discriminants.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            (r == 2 || r == 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// A fundamental discriminant divisible by exactly one prime: −4, ±8, or
/// p* = (−1)^((p−1)/2)·p for an odd prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeDiscriminant {
    /// The discriminant itself.
    pub value: i64,
    /// The unique prime dividing it.
    pub prime: u64,
}

impl PrimeDiscriminant {
    pub fn new(value: i64) -> Option<Self> {
        match value {
            -4 | 8 | -8 => Some(PrimeDiscriminant { value, prime: 2 }),
            v => {
                let p = v.unsigned_abs();
                if is_prime(p) && p % 2 == 1 && v.rem_euclid(4) == 1 {
                    Some(PrimeDiscriminant { value, prime: p })
                } else {
                    None
                }
            }
        }
    }

    /// p* for an odd prime p.
    pub fn from_odd_prime(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && is_prime(p));
        let value = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        PrimeDiscriminant { value, prime: p }
    }

    pub fn is_even(&self) -> bool {
        self.prime == 2
    }
}

impl std::fmt::Display for PrimeDiscriminant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A fundamental discriminant split into prime discriminants. Parts are
/// sorted by their prime, so an even part (over 2) always comes first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantFactorization {
    pub d: i64,
    pub parts: Vec<PrimeDiscriminant>,
}

impl DiscriminantFactorization {
    pub fn parts_values(&self) -> Vec<i64> {
        self.parts.iter().map(|p| p.value).collect()
    }

    pub fn num_negative(&self) -> usize {
        self.parts.iter().filter(|p| p.value < 0).count()
    }

    pub fn num_positive(&self) -> usize {
        self.parts.iter().filter(|p| p.value > 0).count()
    }
}

/// Decompose a fundamental discriminant into prime discriminants.
///
/// Every fundamental discriminant factors uniquely as a product of prime
/// discriminants: the odd primes p | d contribute p*, and whatever 2-power
/// congruence is left over contributes one of −4, ±8.
pub fn factor_discriminant(d: i64) -> Result<DiscriminantFactorization, ArithError> {
    check_fundamental(d)?;
    let mut parts: Vec<PrimeDiscriminant> = Vec::new();
    let mut odd_product: i64 = 1;
    for (p, _) in factor(d.unsigned_abs()) {
        if p == 2 {
            continue;
        }
        let pd = PrimeDiscriminant::from_odd_prime(p);
        odd_product *= pd.value;
        parts.push(pd);
    }
    if d % 2 == 0 {
        let even = d / odd_product;
        debug_assert!(even == -4 || even == 8 || even == -8, "even part {even} of {d}");
        parts.push(PrimeDiscriminant { value: even, prime: 2 });
    } else {
        debug_assert_eq!(odd_product, d);
    }
    parts.sort_by_key(|p| p.prime);
    Ok(DiscriminantFactorization { d, parts })
}

/// Like [`is_fundamental`] but reports which obstruction failed.
pub fn check_fundamental(d: i64) -> Result<(), ArithError> {
    if d == 0 || d == 1 {
        return Err(ArithError::NotFundamental(d));
    }
    let r4 = d.rem_euclid(4);
    if r4 == 2 || r4 == 3 {
        return Err(ArithError::BadCongruence(d, r4 as i64));
    }
    let m = if r4 == 1 { d } else { d / 4 };
    if r4 == 0 {
        let rm = m.rem_euclid(4);
        if rm != 2 && rm != 3 {
            // d/4 ≡ 0 or 1 mod 4: divisible by 16, or 4m with m ≡ 1 mod 4
            let sq = if rm == 0 { 16 } else { 4 };
            return Err(ArithError::SquareFactor(d, sq));
        }
    }
    for (p, e) in factor(m.unsigned_abs()) {
        if e >= 2 {
            return Err(ArithError::SquareFactor(d, (p * p) as i64));
        }
    }
    Ok(())
}

/// The bracket exponent [a, p] ∈ {0, 1} for a discriminant a and a prime p:
/// (−1)^[a,p] = (a'/p) where a' is a with any p-part divided out.
///
/// For p ∤ a this is just the Kronecker symbol (a/p); for a prime
/// discriminant over p itself it is 0.
pub fn bracket(a: i64, part_over_p: Option<i64>, p: u64) -> u8 {
    let a_prime = match part_over_p {
        Some(dp) => a / dp,
        None => a,
    };
    let s = kronecker(a_prime, p as i64).expect("prime modulus");
    debug_assert!(s != 0, "bracket [{a}, {p}] with p | a'");
    if s == 1 {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kronecker_known_values() {
        assert_eq!(kronecker(11, 5).unwrap(), 1);
        assert_eq!(kronecker(3, 5).unwrap(), -1);
        for a in -20..20 {
            assert_eq!(kronecker(a, 1).unwrap(), 1);
        }
        assert_eq!(kronecker(0, 5).unwrap(), 0);
        assert_eq!(kronecker(2, 7).unwrap(), 1);
        assert_eq!(kronecker(2, 3).unwrap(), -1);
        assert_eq!(kronecker(-1, 3).unwrap(), -1);
        assert_eq!(kronecker(-1, 5).unwrap(), 1);
        assert_eq!(kronecker(5, 2).unwrap(), -1);
        assert_eq!(kronecker(7, 2).unwrap(), 1);
        assert_eq!(kronecker(-7, 2).unwrap(), 1);
        assert_eq!(kronecker(-11, 2).unwrap(), -1);
        assert_eq!(kronecker(3, 0), Err(ArithError::ZeroModulus));
    }

    #[test]
    fn kronecker_euler_criterion() {
        // against a^((n-1)/2) mod n for odd primes
        for n in (3u64..500).filter(|&n| is_prime(n)) {
            for a in -50i64..50 {
                let e = pow_mod(a.rem_euclid(n as i64) as u64, (n - 1) / 2, n);
                let k = kronecker(a, n as i64).unwrap();
                let e_signed = if e == n - 1 { -1 } else { e as i64 };
                assert_eq!(k, e_signed, "a={a} n={n}");
            }
        }
    }

    #[test]
    fn kronecker_reciprocity_for_prime_discriminants() {
        // (p*/q) = (q/p) for distinct odd primes
        let primes: Vec<u64> = (3..=500).filter(|&n| is_prime(n)).collect();
        for &p in &primes {
            for &q in &primes {
                if p == q {
                    continue;
                }
                let pstar = PrimeDiscriminant::from_odd_prime(p).value;
                assert_eq!(
                    kronecker(pstar, q as i64).unwrap(),
                    kronecker(q as i64, p as i64).unwrap(),
                    "p={p} q={q}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn kronecker_multiplicative(a in -200i64..=200, b in -200i64..=200, n in (1i64..=200).prop_map(|n| 2*n - 1)) {
            let ab = kronecker(a * b, n).unwrap();
            let prod = kronecker(a, n).unwrap() * kronecker(b, n).unwrap();
            prop_assert_eq!(ab, prod);
        }

        #[test]
        fn factor_discriminant_round_trip(seed in 2i64..=100_000) {
            // scan both signs near the seed for fundamental discriminants
            for d in [seed, -seed] {
                if is_fundamental(d) {
                    let f = factor_discriminant(d).unwrap();
                    let prod: i64 = f.parts_values().iter().product();
                    prop_assert_eq!(prod, d);
                    for p in &f.parts {
                        prop_assert!(PrimeDiscriminant::new(p.value).is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn factor_discriminant_examples() {
        let f = factor_discriminant(-660).unwrap();
        assert_eq!(f.parts_values(), vec![-4, -3, 5, -11]);
        let f = factor_discriminant(-2415).unwrap();
        assert_eq!(f.parts_values(), vec![-3, 5, -7, -23]);
        let f = factor_discriminant(5).unwrap();
        assert_eq!(f.parts_values(), vec![5]);
        let f = factor_discriminant(-1092).unwrap();
        assert_eq!(f.parts_values(), vec![-4, -3, -7, 13]);
        let f = factor_discriminant(8).unwrap();
        assert_eq!(f.parts_values(), vec![8]);
        let f = factor_discriminant(-24).unwrap();
        assert_eq!(f.parts_values(), vec![8, -3]);
        assert!(matches!(factor_discriminant(-12), Err(ArithError::SquareFactor(-12, 4))));
        assert!(matches!(factor_discriminant(-10), Err(ArithError::BadCongruence(-10, 2))));
        assert!(matches!(factor_discriminant(45), Err(ArithError::SquareFactor(45, 9))));
    }

    #[test]
    fn fundamental_examples() {
        assert!(is_fundamental(-660));
        assert!(!is_fundamental(-12));
        assert!(is_fundamental(-4));
        assert!(is_fundamental(8));
        assert!(is_fundamental(-8));
        assert!(is_fundamental(5));
        assert!(!is_fundamental(0));
        assert!(!is_fundamental(1));
        assert!(!is_fundamental(-9));
    }

    #[test]
    fn primality_and_factor() {
        assert!(is_prime(2));
        assert!(is_prime(9999999967));
        assert!(!is_prime(9999999968));
        assert_eq!(factor(2 * 2 * 3 * 97), vec![(2, 2), (3, 1), (97, 1)]);
        assert_eq!(factor(1_000_003 * 1_000_033), vec![(1_000_003, 1), (1_000_033, 1)]);
    }
}
