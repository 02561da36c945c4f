//! Exact 64-bit integer primitives: primality, sieving, factorization,
//! Euler's totient and the Kronecker symbol.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest sieve limit accepted by [`sieve_primes`].
pub const SIEVE_LIMIT_MAX: u64 = 1_000_000_000;

/// Witnesses that make Miller-Rabin deterministic for every `n < 2^64`.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Trial-division primes are cached up to this bound.
const SMALL_PRIME_BOUND: u64 = 1 << 16;

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// Deterministic primality test, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
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

/// Odd-only bit sieve of Eratosthenes. Immutable once built.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    // bit i set <=> 2i+1 is composite
    composite: Vec<u64>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Result<Self> {
        if !(2..=SIEVE_LIMIT_MAX).contains(&limit) {
            return Err(Error::Bound {
                value: limit,
                min: 2,
                max: SIEVE_LIMIT_MAX,
            });
        }
        let odd_count = limit.div_ceil(2);
        let mut composite = vec![0u64; odd_count.div_ceil(64) as usize];
        composite[0] |= 1; // 1 is not prime
        let mut i = 1u64;
        loop {
            let p = 2 * i + 1;
            if p * p > limit {
                break;
            }
            if composite[(i / 64) as usize] >> (i % 64) & 1 == 0 {
                let mut j = (p * p) / 2;
                while j < odd_count {
                    composite[(j / 64) as usize] |= 1 << (j % 64);
                    j += p;
                }
            }
            i += 1;
        }
        Ok(PrimeSieve { limit, composite })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Membership test; `n` must not exceed the sieve limit.
    pub fn contains(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} beyond sieve limit {}", self.limit);
        match n {
            0 | 1 => false,
            2 => true,
            _ if n % 2 == 0 => false,
            _ => {
                let i = n / 2;
                self.composite[(i / 64) as usize] >> (i % 64) & 1 == 0
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let odd = (1..self.limit.div_ceil(2))
            .filter(|&i| self.composite[(i / 64) as usize] >> (i % 64) & 1 == 0)
            .map(|i| 2 * i + 1);
        std::iter::once(2).chain(odd)
    }
}

/// All primes `<= limit`, ascending.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    Ok(PrimeSieve::new(limit)?.iter().collect())
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(SMALL_PRIME_BOUND).expect("static bound"))
}

/// Prime factorization with primes in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Exponent of `p` in the value (0 if absent).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Totient from the factorization.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Factor `n` by trial division. `n = 0` is rejected.
///
/// Cofactors are tested with [`is_prime`] after every division, so the cost
/// is bounded by the second-largest prime factor. Worst case (two factors near
/// `2^32`) takes on the order of `2^31` divisions.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("cannot factor 0"));
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut push = |m: &mut u64, p: u64| {
        let mut e = 0;
        while *m % p == 0 {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        push(&mut m, p);
    }
    if m >= SMALL_PRIME_BOUND * SMALL_PRIME_BOUND && !is_prime(m) {
        let mut d = SMALL_PRIME_BOUND + 1;
        while d.checked_mul(d).is_some_and(|dd| dd <= m) {
            if m % d == 0 {
                push(&mut m, d);
                if is_prime(m) {
                    break;
                }
            }
            d += 2;
        }
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization { value: n, factors })
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(factorize(n)?.phi())
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Jacobi symbol `(a/n)` for odd `n > 0`, with `0 <= a < n`.
fn jacobi_reduced(mut a: u64, mut n: u64) -> i8 {
    let mut sign = 1i8;
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol `(a/n)`.
///
/// Conventions: `(a/1) = 1`; `(a/-1) = -1` for `a < 0`, else 1;
/// `(a/2)` is 0 for even `a`, 1 for `a = ±1 mod 8`, -1 for `a = ±3 mod 8`.
pub fn kronecker(a: i64, n: i64) -> Result<i8> {
    if n == 0 {
        return Err(Error::domain("Kronecker symbol (a/0) is undefined"));
    }
    let mut sign = 1i8;
    if n < 0 && a < 0 {
        sign = -1;
    }
    let mut m = n.unsigned_abs();
    let twos = m.trailing_zeros();
    m >>= twos;
    if twos > 0 {
        if a % 2 == 0 {
            return Ok(0);
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
    }
    let r = (a as i128).rem_euclid(m as i128) as u64;
    Ok(sign * jacobi_reduced(r, m))
}

/// Every `N <= n_bound` with `phi(N) | d`, ascending.
///
/// Built from the primes `q` with `(q - 1) | d`; every such `N` is a product
/// of powers of these primes, so the enumeration is complete for any bound.
pub fn enumerate_totient_divisors(d: u64, n_bound: u64) -> Result<Vec<u64>> {
    if d == 0 || n_bound == 0 {
        return Err(Error::domain("d and n_bound must be positive"));
    }
    let primes: Vec<u64> = factorize(d)?
        .divisors()
        .into_iter()
        .filter_map(|t| t.checked_add(1))
        .filter(|&q| is_prime(q))
        .collect();

    fn extend(primes: &[u64], d: u64, n: u64, phi: u64, bound: u64, out: &mut Vec<u64>) {
        for (i, &q) in primes.iter().enumerate() {
            let mut qe = q;
            let mut phi_qe = q - 1;
            while let Some(next_n) = n.checked_mul(qe).filter(|&v| v <= bound) {
                let next_phi = phi * phi_qe;
                if d % next_phi != 0 {
                    break;
                }
                out.push(next_n);
                extend(&primes[i + 1..], d, next_n, next_phi, bound, out);
                match qe.checked_mul(q) {
                    Some(v) => qe = v,
                    None => break,
                }
                phi_qe *= q;
            }
        }
    }

    let mut out = vec![1];
    extend(&primes, d, 1, 1, n_bound, &mut out);
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    fn brute_phi(n: u64) -> u64 {
        (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
    }

    /// Legendre symbol by Euler's criterion.
    fn euler_legendre(a: i64, p: u64) -> i8 {
        let r = a.rem_euclid(p as i64) as u64;
        if r == 0 {
            return 0;
        }
        if pow_mod(r, (p - 1) / 2, p) == 1 {
            1
        } else {
            -1
        }
    }

    /// Quadratic residue test by listing squares.
    fn is_square_mod(a: i64, p: u64) -> bool {
        let r = a.rem_euclid(p as i64) as u64;
        (1..p).any(|x| x * x % p == r)
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(23));
        assert!(!is_prime(15));
        assert!(is_prime(6 * 13 + 1));
        assert!(!is_prime(0) && !is_prime(1));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest 64-bit prime
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
        assert!(!is_prime(u64::MAX));
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(sieve_primes(10).unwrap(), vec![2, 3, 5, 7]);
        let p30 = sieve_primes(30).unwrap();
        assert_eq!(p30.len(), 10);
        assert_eq!(*p30.last().unwrap(), 29);
        let oracle = (0..=100).filter(|&n| trial_is_prime(n)).count();
        assert_eq!(oracle, 25);
        assert_eq!(sieve_primes(100).unwrap().len(), oracle);
        assert_eq!(sieve_primes(2).unwrap(), vec![2]);
        assert_eq!(sieve_primes(3).unwrap(), vec![2, 3]);
    }

    #[test]
    fn sieve_bounds() {
        assert!(matches!(sieve_primes(1), Err(Error::Bound { .. })));
        assert!(matches!(sieve_primes(0), Err(Error::Bound { .. })));
        assert!(matches!(
            sieve_primes(SIEVE_LIMIT_MAX + 1),
            Err(Error::Bound { .. })
        ));
    }

    #[test]
    fn sieve_agrees_with_miller_rabin_to_ten_million() {
        let sieve = PrimeSieve::new(10_000_000).unwrap();
        for n in 0..=10_000_000 {
            assert_eq!(sieve.contains(n), is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-115, 23).unwrap(), 0);
        // -3 = 5 mod 8; odd squares mod 8 are all 1.
        assert!((1..8).step_by(2).all(|x| x * x % 8 == 1));
        assert_eq!(kronecker(-3, 2).unwrap(), -1);
        // 4^2 = 16 = -7 mod 23
        assert!(is_square_mod(-7, 23));
        assert_eq!(kronecker(-7, 23).unwrap(), 1);
        assert!(kronecker(5, 0).is_err());
    }

    #[test]
    fn kronecker_conventions() {
        assert_eq!(kronecker(7, 1).unwrap(), 1);
        assert_eq!(kronecker(0, 1).unwrap(), 1);
        assert_eq!(kronecker(0, -1).unwrap(), 1);
        assert_eq!(kronecker(0, 5).unwrap(), 0);
        assert_eq!(kronecker(-5, -1).unwrap(), -1);
        assert_eq!(kronecker(5, -1).unwrap(), 1);
        assert_eq!(kronecker(-7, 2).unwrap(), 1);
        assert_eq!(kronecker(-8, 2).unwrap(), 0);
        // -2^63 = 1 mod 3
        assert_eq!(kronecker(i64::MIN, 3).unwrap(), 1);
        assert_eq!(kronecker(i64::MIN, i64::MIN).unwrap(), 0);
        assert_eq!(kronecker(3, i64::MIN).unwrap(), -1); // 3 = 3 mod 8, 63 twos; n<0 but a>0
    }

    #[test]
    fn kronecker_matches_euler_criterion_for_odd_primes() {
        let primes = sieve_primes(10_000).unwrap();
        for &p in primes.iter().skip(1).step_by(7) {
            for a in [-163i64, -115, -28, -7, -4, -3, 2, 5, 97, 1_000_003] {
                assert_eq!(kronecker(a, p as i64).unwrap(), euler_legendre(a, p), "({a}/{p})");
            }
        }
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(115).unwrap().factors(), &[(5, 1), (23, 1)]);
        assert_eq!(factorize(235).unwrap().factors(), &[(5, 1), (47, 1)]);
        assert!(factorize(1).unwrap().factors().is_empty());
        assert!(factorize(0).is_err());
        // two primes just above 2^32 would be slow; one above 2^16 is not
        let big = 65_537u64 * 4_294_967_291;
        assert_eq!(factorize(big).unwrap().factors(), &[(65_537, 1), (4_294_967_291, 1)]);
        assert_eq!(factorize(1 << 63).unwrap().factors(), &[(2, 63)]);
    }

    #[test]
    fn factorize_round_trips_to_one_million() {
        for n in 1..=1_000_000u64 {
            let f = factorize(n).unwrap();
            let product: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(product, n);
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.primes().all(is_prime));
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(brute_phi(49), 42);
        assert_eq!(euler_phi(49).unwrap(), 42);
        assert_eq!(brute_phi(46), 22);
        assert_eq!(euler_phi(2 * 23).unwrap(), 22);
        for n in 1..2000 {
            assert_eq!(euler_phi(n).unwrap(), brute_phi(n), "n = {n}");
        }
    }

    fn brute_totient_divisors(d: u64, bound: u64) -> Vec<u64> {
        (1..=bound).filter(|&n| d % brute_phi(n) == 0).collect()
    }

    #[test]
    fn totient_divisor_examples() {
        assert_eq!(
            enumerate_totient_divisors(4, 100).unwrap(),
            vec![1, 2, 3, 4, 5, 6, 8, 10, 12]
        );
        assert_eq!(brute_totient_divisors(2, 20), vec![1, 2, 3, 4, 6]);
        assert_eq!(enumerate_totient_divisors(2, 20).unwrap(), vec![1, 2, 3, 4, 6]);
        assert_eq!(enumerate_totient_divisors(1, 10).unwrap(), vec![1, 2]);
        assert!(enumerate_totient_divisors(0, 10).is_err());
    }

    #[test]
    fn totient_divisors_match_scan_at_completeness_bound() {
        for d in 1..=60u64 {
            let bound = 2 * d * d;
            assert_eq!(
                enumerate_totient_divisors(d, bound).unwrap(),
                brute_totient_divisors(d, bound),
                "d = {d}"
            );
        }
        // the values used for p = 7 with ω = 6 and ω = 4
        for d in [84u64, 56] {
            let bound = 2 * d * d;
            assert_eq!(
                enumerate_totient_divisors(d, bound).unwrap(),
                brute_totient_divisors(d, bound)
            );
        }
    }

    #[test]
    fn totient_divisors_for_twelve_match_lemma_list() {
        // φ(N) | 12, as listed for the j = 0 order
        assert_eq!(
            enumerate_totient_divisors(12, u64::MAX).unwrap(),
            vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 14, 18, 21, 26, 28, 36, 42]
        );
        assert_eq!(
            enumerate_totient_divisors(8, u64::MAX).unwrap(),
            vec![1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 16, 20, 24, 30]
        );
    }

    proptest! {
        #[test]
        fn kronecker_multiplicative_in_odd_modulus(a in -100_000i64..100_000, m in 0u64..5000, n in 0u64..5000) {
            let (m, n) = (2 * m + 1, 2 * n + 1);
            let lhs = kronecker(a, (m * n) as i64).unwrap();
            let rhs = kronecker(a, m as i64).unwrap() * kronecker(a, n as i64).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn kronecker_multiplicative_in_top(a in -10_000i64..10_000, b in -10_000i64..10_000, n in 1i64..10_000) {
            let lhs = kronecker(a * b, n).unwrap();
            let rhs = kronecker(a, n).unwrap() * kronecker(b, n).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn phi_multiplicative(m in 1u64..1_000_000, n in 1u64..1_000_000) {
            prop_assume!(gcd(m, n) == 1);
            prop_assert_eq!(euler_phi(m * n).unwrap(), euler_phi(m).unwrap() * euler_phi(n).unwrap());
        }

        #[test]
        fn factorize_round_trips(n in 1u64..u64::MAX >> 24) {
            let f = factorize(n).unwrap();
            let product: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(product, n);
            prop_assert!(f.primes().all(is_prime));
        }
    }
}
