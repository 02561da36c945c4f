//! Torsion degree functions for CM elliptic curves.
//!
//! For an order `O` and levels `M | N`:
//!
//! * `T̃(O, ℓ^a, ℓ^b)` is the local factor at a single prime,
//! * `T(O, M, N)` generates the degrees over `K(j(E))` in which an `O`-CM curve
//!   acquires `Z/M × Z/N`, and
//! * `T°(O, M, N) = 2^ε · T(O, M, N)` is the least such degree over `Q(j(E))`.

use serde::Serialize;

use crate::arith::{factorize, is_prime, valuation};
use crate::error::{Error, Result};
use crate::orders::OrderDescriptor;

/// Level `Z/M × Z/N` with `M | N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TorsionLevel {
    m: u64,
    n: u64,
}

impl TorsionLevel {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        if m == 0 || n == 0 || n % m != 0 {
            return Err(Error::domain(format!("level requires 1 <= M | N, got M = {m}, N = {n}")));
        }
        Ok(TorsionLevel { m, n })
    }

    /// Cyclic level `Z/N`.
    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(1, n)
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

/// One prime's contribution to a degree computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalFactor {
    pub prime: u64,
    pub a: u32,
    pub b: u32,
    pub t_tilde: u64,
    /// Which least-degree condition (1..=8) holds for `ℓ^b`, if any.
    pub t_circ_condition: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub order: OrderDescriptor,
    pub level: TorsionLevel,
    pub t_tilde_factors: Vec<LocalFactor>,
    pub t: u64,
    pub t_circ: u64,
    pub epsilon: u8,
}

fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::domain(format!("{base}^{exp} overflows 64 bits")))
}

fn checked_mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b)
        .ok_or_else(|| Error::domain(format!("{a}·{b} overflows 64 bits")))
}

/// Local factor `T̃(O, ℓ^a, ℓ^b)`.
pub fn t_tilde(order: &OrderDescriptor, ell: u64, a: u32, b: u32) -> Result<u64> {
    if !is_prime(ell) {
        return Err(Error::domain(format!("{ell} is not prime")));
    }
    if a > b {
        return Err(Error::domain(format!("need a <= b, got a = {a}, b = {b}")));
    }
    if b == 0 {
        return Err(Error::domain("T̃ is undefined at ℓ^b = 1"));
    }
    let chi = order.symbol(ell);

    if ell == 2 && b == 1 {
        return Ok(match (a, chi) {
            (0, -1) => 3,
            (0, _) => 1,
            _ => (2 - chi as i64) as u64,
        });
    }

    let l1 = ell - 1;
    let c = valuation(order.conductor(), ell);
    // ℓ^e (ℓ - 1)
    let unit_power = |e: u32| checked_mul(checked_pow(ell, e)?, l1);

    match chi {
        -1 => checked_mul(checked_pow(ell, 2 * b - 2)?, checked_mul(ell + 1, l1)?),
        1 if a == 0 => unit_power(b - 1),
        1 => checked_mul(checked_pow(ell, a + b - 2)?, checked_mul(l1, l1)?),
        _ => match order.field_symbol(ell) {
            0 if b <= 2 * c + 1 => unit_power(a + b - 1),
            0 => unit_power((a + b - 1).max(2 * b - 2 * c - 2)),
            1 => unit_power(a + b - 1),
            _ if b <= 2 * c => unit_power(a + b - 1),
            _ => unit_power((a + b - 1).max(2 * b - 2 * c - 1)),
        },
    }
}

fn divide_by_omega(value: u64, order: &OrderDescriptor, what: &str) -> Result<u64> {
    let omega = order.omega() as u64;
    if value % omega != 0 {
        return Err(Error::consistency(format!(
            "{what} = {value}/{omega} is not an integer for Δ = {}",
            order.delta()
        )));
    }
    Ok(value / omega)
}

fn local_factors(order: &OrderDescriptor, level: TorsionLevel) -> Result<Vec<LocalFactor>> {
    factorize(level.n)?
        .factors()
        .iter()
        .map(|&(ell, b)| {
            let a = valuation(level.m, ell);
            Ok(LocalFactor {
                prime: ell,
                a,
                b,
                t_tilde: t_tilde(order, ell, a, b)?,
                t_circ_condition: t_circ_condition(order, ell, b),
            })
        })
        .collect()
}

/// `T(O, M, N)`.
pub fn t_of(order: &OrderDescriptor, level: TorsionLevel) -> Result<u64> {
    let (m, n) = (level.m, level.n);
    match n {
        1 => Ok(1),
        2 | 3 => {
            let chi = order.symbol(n) as i64;
            let omega = order.omega() as i64;
            match (m, n) {
                (1, 2) => Ok(if chi == -1 && order.delta() != -3 { 3 } else { 1 }),
                (1, 3) if chi == -1 => divide_by_omega(8, order, "T(O,1,3)"),
                (1, 3) => Ok(1),
                (2, 2) | (3, 3) => {
                    let num = 2 * (n as i64 - chi);
                    if num % omega != 0 {
                        return Err(Error::consistency(format!(
                            "T(O,{m},{n}) = {num}/{omega} is not an integer for Δ = {}",
                            order.delta()
                        )));
                    }
                    Ok((num / omega) as u64)
                }
                _ => unreachable!("M | N with N prime"),
            }
        }
        _ => {
            let product = local_factors(order, level)?
                .iter()
                .try_fold(1u64, |acc, f| checked_mul(acc, f.t_tilde))?;
            divide_by_omega(product, order, "T̃ product/ω")
        }
    }
}

/// The least-degree condition (numbered 1..=8) satisfied by `ℓ^a`, if any.
/// `T°(O, ℓ^a) = T(O, ℓ^a)` exactly when one holds.
pub fn t_circ_condition(order: &OrderDescriptor, ell: u64, a: u32) -> Option<u8> {
    let chi = order.symbol(ell);
    let chi_k = order.field_symbol(ell);
    let c = valuation(order.conductor(), ell);
    let ramified_in_order = chi == 0;

    if chi == -1 {
        return Some(1);
    }
    if ell == 2 {
        if a == 1 {
            // split or ramified
            return Some(2);
        }
        let ord2_dk = valuation(order.delta_k().unsigned_abs(), 2);
        if ramified_in_order && chi_k != 0 && c >= 2 && a <= 2 * c - 2 {
            return Some(3);
        }
        if chi_k == 0 && c == 0 {
            return Some(4);
        }
        if ord2_dk == 2 && c >= 1 && a <= 2 * c {
            return Some(5);
        }
        if ord2_dk == 3 && c >= 1 {
            return Some(6);
        }
        return None;
    }
    if ramified_in_order && chi_k == 1 && a <= 2 * c {
        return Some(7);
    }
    if ramified_in_order && chi_k != 1 {
        return Some(8);
    }
    None
}

/// Whether `T°(O, ℓ^a) = T(O, ℓ^a)`.
pub fn t_circ_prime_power_equal(order: &OrderDescriptor, ell: u64, a_exp: u32) -> bool {
    t_circ_condition(order, ell, a_exp).is_some()
}

/// Full degree report with `T°`.
///
/// `ε = 0` iff every prime power exactly dividing `N` satisfies one of the
/// least-degree conditions. For `M > 1` the same rule is applied to the prime
/// powers of `N`.
pub fn t_circ(order: &OrderDescriptor, level: TorsionLevel) -> Result<DegreeReport> {
    let t = t_of(order, level)?;
    let factors = if level.n == 1 {
        Vec::new()
    } else {
        local_factors(order, level)?
    };
    let epsilon = u8::from(factors.iter().any(|f| f.t_circ_condition.is_none()));
    Ok(DegreeReport {
        order: *order,
        level,
        t_tilde_factors: factors,
        t,
        t_circ: checked_mul(t, 1 << epsilon)?,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{euler_phi, kronecker, sieve_primes};
    use crate::orders::{all_orders, make_order};

    fn order(delta: i64) -> OrderDescriptor {
        make_order(delta).unwrap()
    }

    fn level(m: u64, n: u64) -> TorsionLevel {
        TorsionLevel::new(m, n).unwrap()
    }

    #[test]
    fn t_tilde_examples() {
        assert_eq!(t_tilde(&order(-3), 2, 0, 1).unwrap(), 3);
        assert_eq!(kronecker(-7, 23).unwrap(), 1);
        assert_eq!(t_tilde(&order(-7), 23, 0, 1).unwrap(), 22);
        assert_eq!(t_tilde(&order(-115), 23, 0, 1).unwrap(), 22);
    }

    #[test]
    fn t_tilde_domain_errors() {
        let o = order(-7);
        assert!(t_tilde(&o, 3, 2, 1).is_err());
        assert!(t_tilde(&o, 3, 0, 0).is_err());
        assert!(t_tilde(&o, 4, 0, 1).is_err());
        assert!(t_tilde(&o, 3, 0, 60).is_err()); // overflow, not panic
    }

    #[test]
    fn t_tilde_two_part_table() {
        // 2 - (Δ/2) for M = N = 2
        assert_eq!(t_tilde(&order(-7), 2, 1, 1).unwrap(), 1);
        assert_eq!(t_tilde(&order(-8), 2, 1, 1).unwrap(), 2);
        assert_eq!(t_tilde(&order(-3), 2, 1, 1).unwrap(), 3);
        assert_eq!(t_tilde(&order(-4), 2, 0, 1).unwrap(), 1);
    }

    #[test]
    fn t_tilde_ramified_branches() {
        // Δ = -16: Δ_K = -4, c = 1, case (iv)
        let o = order(-16);
        assert_eq!(t_tilde(&o, 2, 0, 3).unwrap(), 4); // b <= 2c+1: 2^{2}·1
        assert_eq!(t_tilde(&o, 2, 0, 4).unwrap(), 16); // max(3, 4)
        // Δ = -28: Δ_K = -7, 2 split in K, 2 | f, case (iii)
        assert_eq!(t_tilde(&order(-28), 2, 0, 3).unwrap(), 4);
        // Δ = -12: Δ_K = -3, 2 inert in K, c = 1, case (v)
        let o = order(-12);
        assert_eq!(t_tilde(&o, 2, 0, 2).unwrap(), 2); // b <= 2c
        assert_eq!(t_tilde(&o, 2, 0, 3).unwrap(), 8); // max(2, 3)
        // Δ = -27: Δ_K = -3, c = 1 at ℓ = 3, case (iv)
        let o = order(-27);
        assert_eq!(t_tilde(&o, 3, 0, 3).unwrap(), 18); // b <= 3: 3^2·2
        assert_eq!(t_tilde(&o, 3, 0, 4).unwrap(), 2 * 3u64.pow(4)); // max(3, 4)
        // Δ = -63 = 9·(-7): 3 inert in K, c = 1, case (v)
        let o = order(-63);
        assert_eq!(o.field_symbol(3), -1);
        assert_eq!(t_tilde(&o, 3, 1, 2).unwrap(), 3u64.pow(2) * 2);
    }

    #[test]
    fn t_of_examples() {
        assert_eq!(t_of(&order(-4), level(1, 3)).unwrap(), 2);
        assert_eq!(t_of(&order(-115), level(1, 23)).unwrap(), 11);
        assert_eq!(t_of(&order(-7), level(2, 46)).unwrap(), 11);
        assert_eq!(t_of(&order(-115), level(1, 46)).unwrap(), 33);
        assert_eq!(t_of(&order(-3), level(1, 1)).unwrap(), 1);
    }

    #[test]
    fn small_level_closed_forms() {
        assert_eq!(t_of(&order(-3), level(1, 2)).unwrap(), 1);
        assert_eq!(t_of(&order(-11), level(1, 2)).unwrap(), 3);
        assert_eq!(t_of(&order(-7), level(1, 2)).unwrap(), 1);
        assert_eq!(t_of(&order(-3), level(2, 2)).unwrap(), 1);
        assert_eq!(t_of(&order(-11), level(2, 2)).unwrap(), 3);
        assert_eq!(t_of(&order(-4), level(3, 3)).unwrap(), 2);
        assert_eq!(t_of(&order(-3), level(3, 3)).unwrap(), 1);
        assert_eq!(t_of(&order(-7), level(1, 3)).unwrap(), 4); // 3 inert: 8/ω
        assert_eq!(t_of(&order(-8), level(1, 3)).unwrap(), 1);
        assert_eq!(t_of(&order(-20), level(1, 3)).unwrap(), 1);
    }

    #[test]
    fn level_validation() {
        assert!(TorsionLevel::new(2, 3).is_err());
        assert!(TorsionLevel::new(0, 3).is_err());
        assert!(TorsionLevel::new(1, 0).is_err());
    }

    #[test]
    fn t_circ_condition_examples() {
        assert!(t_circ_prime_power_equal(&order(-115), 23, 1));
        assert_eq!(t_circ_condition(&order(-115), 23, 1), Some(8));
        assert!(!t_circ_prime_power_equal(&order(-7), 23, 1));
        assert_eq!(t_circ_condition(&order(-3), 2, 1), Some(1));
        // 2 ramified in K, c = 0
        assert_eq!(t_circ_condition(&order(-4), 2, 3), Some(4));
        // ord_2(Δ_K) = 2, c = 1: a <= 2
        assert_eq!(t_circ_condition(&order(-16), 2, 2), Some(5));
        assert_eq!(t_circ_condition(&order(-16), 2, 3), None);
        // ord_2(Δ_K) = 3, c >= 1
        assert_eq!(t_circ_condition(&order(-32), 2, 5), Some(6));
        // 2 ramified in O only, c = 2: a <= 2
        assert_eq!(t_circ_condition(&order(-7 * 16), 2, 2), Some(3));
        assert_eq!(t_circ_condition(&order(-7 * 16), 2, 3), None);
        // odd ℓ ramified in O, split in K, a <= 2c
        let o = order(-7 * 4);
        assert_eq!(t_circ_condition(&o, 2, 2), None);
        let o = order(-11 * 25); // 5 split in Q(√-11)
        assert_eq!(o.field_symbol(5), 1);
        assert_eq!(t_circ_condition(&o, 5, 2), Some(7));
        assert_eq!(t_circ_condition(&o, 5, 3), None);
    }

    #[test]
    fn t_circ_examples() {
        let r = t_circ(&order(-115), level(1, 23)).unwrap();
        assert_eq!((r.t, r.t_circ, r.epsilon), (11, 11, 0));
        let r = t_circ(&order(-7), level(2, 46)).unwrap();
        assert_eq!((r.t, r.t_circ, r.epsilon), (11, 22, 1));
        let r = t_circ(&order(-28), level(2, 46)).unwrap();
        assert_eq!((r.t, r.t_circ), (22, 44));
        let r = t_circ(&order(-5 * 4), level(1, 1)).unwrap();
        assert_eq!((r.t, r.t_circ, r.epsilon), (1, 1, 0));
        assert!(r.t_tilde_factors.is_empty());
    }

    #[test]
    fn minus_eight_is_inert_at_twenty_three() {
        // (-8/23) = -1, so the ramified-2 computation at N = 46 goes through the
        // inert local factor 23² - 1.
        assert_eq!(kronecker(-8, 23).unwrap(), -1);
        let r = t_circ(&order(-8), level(2, 46)).unwrap();
        assert_eq!((r.t, r.t_circ), (528, 528));
    }

    fn grid() -> Vec<OrderDescriptor> {
        all_orders(2000)
    }

    #[test]
    fn report_invariants_on_grid() {
        for o in all_orders(300) {
            for n in 1..=200u64 {
                for m in (1..=n).filter(|m| n % m == 0) {
                    let r = t_circ(&o, level(m, n)).unwrap();
                    assert!(r.t_circ == r.t || r.t_circ == 2 * r.t);
                    if n >= 4 {
                        let product: u64 = r.t_tilde_factors.iter().map(|f| f.t_tilde).product();
                        assert_eq!(o.omega() as u64 * r.t, product);
                    }
                }
            }
        }
    }

    #[test]
    fn phi_divides_omega_t() {
        for o in grid() {
            for n in 1..=500u64 {
                let t = t_of(&o, level(1, n)).unwrap();
                assert_eq!(o.omega() as u64 * t % euler_phi(n).unwrap(), 0, "Δ = {}, N = {n}", o.delta());
            }
        }
    }

    #[test]
    fn local_factor_growth() {
        let primes = sieve_primes(512).unwrap();
        for o in grid() {
            for &ell in &primes {
                let mut b = 1;
                while ell.pow(b) <= 512 {
                    let phi = euler_phi(ell.pow(b)).unwrap();
                    for a in 0..=b {
                        let tt = t_tilde(&o, ell, a, b).unwrap();
                        assert_eq!(tt % phi, 0, "Δ = {}, ℓ^a = {ell}^{a}, ℓ^b = {ell}^{b}", o.delta());
                        if o.symbol(ell) == -1 && ell.pow(b) >= 3 {
                            assert!(tt > phi);
                        }
                    }
                    for a in 1..=b {
                        let lo = t_of(&o, level(1, ell.pow(a))).unwrap();
                        let hi = t_of(&o, level(1, ell.pow(b))).unwrap();
                        assert_eq!(hi % lo, 0, "Δ = {}, {ell}^{a} vs {ell}^{b}", o.delta());
                    }
                    b += 1;
                }
            }
        }
    }
}
