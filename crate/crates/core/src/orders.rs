//! Imaginary quadratic orders, identified by their discriminant.
//!
//! Class numbers come from counting reduced primitive forms. The ring class
//! number formula (class number of the maximal order scaled by the conductor
//! contribution) is kept as an independent cross-check.

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{factorize, kronecker};
use crate::error::{Error, Result};

/// Largest `|Δ|` accepted by [`make_order`]; the form count is linear in `|Δ|`.
pub const MAX_ORDER_DISCRIMINANT: u64 = 10_000_000_000;

/// Bound at which the class number 1 and 2 lists are known to be exhausted.
pub const COMPLETE_LIST_BOUND: u64 = 10_000;

/// An order in an imaginary quadratic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OrderDescriptor {
    delta: i64,
    delta_k: i64,
    conductor: u64,
    omega: u32,
    class_number: u64,
}

impl OrderDescriptor {
    /// Discriminant `Δ = f²·Δ_K`.
    pub fn delta(&self) -> i64 {
        self.delta
    }

    /// Fundamental discriminant of the field.
    pub fn delta_k(&self) -> i64 {
        self.delta_k
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Number of units.
    pub fn omega(&self) -> u32 {
        self.omega
    }

    /// Unit count of the maximal order of the same field.
    pub fn w_k(&self) -> u32 {
        unit_count(self.delta_k)
    }

    pub fn class_number(&self) -> u64 {
        self.class_number
    }

    /// `(Δ/ℓ)`.
    pub fn symbol(&self, ell: u64) -> i8 {
        kronecker(self.delta, ell as i64).expect("ell is nonzero")
    }

    /// `(Δ_K/ℓ)`.
    pub fn field_symbol(&self, ell: u64) -> i8 {
        kronecker(self.delta_k, ell as i64).expect("ell is nonzero")
    }

    pub fn splitting_type(&self, ell: u64) -> SplittingType {
        SplittingType::from_symbol(self.symbol(ell))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

impl SplittingType {
    pub fn from_symbol(symbol: i8) -> Self {
        match symbol {
            1 => SplittingType::Split,
            -1 => SplittingType::Inert,
            0 => SplittingType::Ramified,
            _ => unreachable!("Kronecker symbol is in {{-1, 0, 1}}"),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SplittingType::Split => "split",
            SplittingType::Inert => "inert",
            SplittingType::Ramified => "ramified",
        }
    }
}

/// `Δ < 0` and `Δ ≡ 0, 1 (mod 4)`.
pub fn is_valid_discriminant(delta: i64) -> bool {
    delta < 0 && matches!(delta.rem_euclid(4), 0 | 1)
}

pub fn is_fundamental(delta: i64) -> bool {
    if !is_valid_discriminant(delta) {
        return false;
    }
    let squarefree = |n: u64| factorize(n).is_ok_and(|f| f.factors().iter().all(|&(_, e)| e == 1));
    let d = delta.unsigned_abs();
    if delta.rem_euclid(4) == 1 {
        squarefree(d)
    } else {
        let m = delta / 4;
        matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
    }
}

fn unit_count(delta: i64) -> u32 {
    match delta {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// Split `Δ` into `(Δ_K, f)` with `Δ = f²·Δ_K` and `Δ_K` fundamental.
pub fn fundamental_part(delta: i64) -> Result<(i64, u64)> {
    if !is_valid_discriminant(delta) {
        return Err(Error::InvalidDiscriminant(delta));
    }
    // |Δ| = s·g² with s squarefree
    let mut s = 1u64;
    let mut g = 1u64;
    for &(p, e) in factorize(delta.unsigned_abs())?.factors() {
        if e % 2 == 1 {
            s *= p;
        }
        g *= p.pow(e / 2);
    }
    let d0 = -(s as i64);
    if d0.rem_euclid(4) == 1 {
        Ok((d0, g))
    } else {
        // Δ ≡ 0 mod 4 forces g even here
        debug_assert!(g % 2 == 0);
        Ok((4 * d0, g / 2))
    }
}

fn check_order_discriminant(delta: i64) -> Result<()> {
    if !is_valid_discriminant(delta) {
        return Err(Error::InvalidDiscriminant(delta));
    }
    if delta.unsigned_abs() > MAX_ORDER_DISCRIMINANT {
        return Err(Error::Bound {
            value: delta.unsigned_abs(),
            min: 3,
            max: MAX_ORDER_DISCRIMINANT,
        });
    }
    Ok(())
}

pub fn make_order(delta: i64) -> Result<OrderDescriptor> {
    check_order_discriminant(delta)?;
    let class_number = class_number_forms(delta)?;
    order_with_class_number(delta, class_number)
}

/// Builds a descriptor when the class number is already known (scans).
pub(crate) fn order_with_class_number(delta: i64, class_number: u64) -> Result<OrderDescriptor> {
    let (delta_k, conductor) = fundamental_part(delta)?;
    Ok(OrderDescriptor {
        delta,
        delta_k,
        conductor,
        omega: unit_count(delta),
        class_number,
    })
}

/// Number of reduced primitive positive definite forms `(a, b, c)` with
/// `b² - 4ac = Δ`.
pub fn class_number_forms(delta: i64) -> Result<u64> {
    check_order_discriminant(delta)?;
    let d = delta.unsigned_abs();
    let mut count = 0u64;
    let mut b = d % 2;
    while 3 * b * b <= d {
        let q = (b * b + d) / 4;
        let mut a = b.max(1);
        while a * a <= q {
            if q % a == 0 {
                let c = q / a;
                if a.gcd(&b).gcd(&c) == 1 {
                    count += if b == 0 || a == b || a == c { 1 } else { 2 };
                }
            }
            a += 1;
        }
        b += 2;
    }
    Ok(count)
}

/// Class numbers of every discriminant with `|Δ| <= bound`, indexed by `|Δ|`.
/// Entries for invalid `|Δ|` are zero.
pub fn class_number_table(bound: u64) -> Vec<u64> {
    let mut table = vec![0u64; bound as usize + 1];
    let mut a = 1u64;
    while 3 * a * a <= bound {
        for b in -(a as i64) + 1..=a as i64 {
            let b2 = (b * b) as u64;
            let mut c = a;
            while 4 * a * c - b2 <= bound {
                if !(c == a && b < 0) && a.gcd(&b.unsigned_abs()).gcd(&c) == 1 {
                    table[(4 * a * c - b2) as usize] += 1;
                }
                c += 1;
            }
        }
        a += 1;
    }
    table
}

/// Ring class number formula
/// `h(O) = h_K · (2/w_K) · f · ∏_{p | f} (1 - (Δ_K/p)/p)` for `f > 1`, evaluated exactly.
pub fn class_number_formula(delta_k: i64, f: u64) -> Result<u64> {
    if !is_fundamental(delta_k) {
        return Err(Error::NotFundamental(delta_k));
    }
    let h_k = class_number_forms(delta_k)?;
    class_number_formula_with(delta_k, f, h_k)
}

pub(crate) fn class_number_formula_with(delta_k: i64, f: u64, h_k: u64) -> Result<u64> {
    if f == 0 {
        return Err(Error::domain("conductor must be positive"));
    }
    if f == 1 {
        return Ok(h_k);
    }
    let mut h = Ratio::from_integer(h_k as i128)
        * Ratio::new(2, unit_count(delta_k) as i128)
        * Ratio::from_integer(f as i128);
    for p in factorize(f)?.primes() {
        let chi = kronecker(delta_k, p as i64)? as i128;
        h *= Ratio::from_integer(1) - Ratio::new(chi, p as i128);
    }
    if !h.is_integer() || *h.numer() <= 0 {
        return Err(Error::consistency(format!(
            "class number formula gave {h} for Δ_K = {delta_k}, f = {f}"
        )));
    }
    Ok(h.to_integer() as u64)
}

pub fn splitting_type(order: &OrderDescriptor, ell: u64) -> SplittingType {
    order.splitting_type(ell)
}

/// Every order with `-bound <= Δ < 0`, ascending by `|Δ|`.
pub fn all_orders(bound: u64) -> Vec<OrderDescriptor> {
    let table = class_number_table(bound);
    (3..=bound)
        .map(|d| -(d as i64))
        .filter(|&delta| is_valid_discriminant(delta))
        .map(|delta| {
            order_with_class_number(delta, table[delta.unsigned_abs() as usize])
                .expect("valid discriminant")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderList {
    pub class_number: u64,
    pub bound: u64,
    pub orders: Vec<OrderDescriptor>,
    /// The scanned range is known to contain every order of this class number.
    pub complete: bool,
}

impl OrderList {
    pub fn discriminants(&self) -> Vec<i64> {
        self.orders.iter().map(|o| o.delta).collect()
    }
}

/// All `-bound <= Δ < 0` with `h(Δ) = h`, ascending by `|Δ|`.
pub fn enumerate_orders_with_class_number(h: u64, bound: u64) -> Result<OrderList> {
    if h == 0 || bound < 3 {
        return Err(Error::domain("need h >= 1 and bound >= 3"));
    }
    let orders = all_orders(bound)
        .into_iter()
        .filter(|o| o.class_number == h)
        .collect();
    Ok(OrderList {
        class_number: h,
        bound,
        orders,
        complete: matches!(h, 1 | 2) && bound >= COMPLETE_LIST_BOUND,
    })
}
