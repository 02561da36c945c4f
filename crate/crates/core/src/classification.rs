//! New torsion subgroups of CM elliptic curves over number fields of degree
//! `2p`, `p > 5` prime.
//!
//! The engine encodes the eight-case classification directly. Each case is
//! keyed to the discriminants that realize it; the brute-force replay in
//! [`crate::verify`] re-derives the same groups from the degree functions.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, kronecker, PrimeSieve};
use crate::error::{Error, Result};
use crate::orders::make_order;

/// Class number one discriminants below -4.
pub const CLASS_NUMBER_ONE_BELOW_MINUS_FOUR: [i64; 11] =
    [-7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163];

/// Class number one discriminants with 2 inert (`(Δ/2) = -1`), excluding -3.
pub const ODD_EXPONENT_DISCRIMINANTS: [i64; 6] = [-11, -19, -27, -43, -67, -163];

/// Class number one discriminants with 2 ramified, giving cyclic `Z/2(2p+1)`.
pub const EVEN_EXPONENT_DISCRIMINANTS: [i64; 4] = [-8, -12, -16, -28];

/// `(Δ, p, N)`: class number 2 orders in which `N = 2p + 1` ramifies.
pub const EXCEPTIONAL_PAIRS: [(i64, u64, u64); 2] = [(-115, 11, 23), (-235, 23, 47)];

/// `Z/M × Z/N` with `M | N`; ordered by `(N, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TorsionGroup {
    pub m: u64,
    pub n: u64,
}

impl TorsionGroup {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        if m == 0 || n == 0 || n % m != 0 {
            return Err(Error::domain(format!("torsion group needs M | N, got ({m}, {n})")));
        }
        Ok(TorsionGroup { m, n })
    }

    pub const fn cyclic(n: u64) -> Self {
        TorsionGroup { m: 1, n }
    }

    pub fn is_cyclic(&self) -> bool {
        self.m == 1
    }
}

impl Ord for TorsionGroup {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.m).cmp(&(other.n, other.m))
    }
}

impl PartialOrd for TorsionGroup {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TorsionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "Z/{}", self.n)
        } else {
            write!(f, "Z/{} x Z/{}", self.m, self.n)
        }
    }
}

/// One classification case that produces a group, with the discriminants
/// realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseHit {
    pub case_id: u8,
    pub witnesses: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewGroup {
    pub group: TorsionGroup,
    pub cases: Vec<CaseHit>,
}

impl NewGroup {
    /// All witnessing discriminants across cases, descending (closest to 0 first).
    pub fn witnesses(&self) -> Vec<i64> {
        let mut all: Vec<i64> = self.cases.iter().flat_map(|c| c.witnesses.iter().copied()).collect();
        all.sort_unstable_by(|a, b| b.cmp(a));
        all.dedup();
        all
    }

    pub fn case_ids(&self) -> Vec<u8> {
        self.cases.iter().map(|c| c.case_id).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub p: u64,
    pub new_groups: Vec<NewGroup>,
    pub baseline: Vec<TorsionGroup>,
    pub is_olson: bool,
}

impl ClassificationReport {
    pub fn groups(&self) -> Vec<TorsionGroup> {
        self.new_groups.iter().map(|g| g.group).collect()
    }
}

/// Groups arising for CM elliptic curves over quadratic fields, canonically ordered.
pub fn quadratic_baseline() -> Vec<TorsionGroup> {
    let mut groups: Vec<TorsionGroup> = [1, 2, 3, 4, 6, 7, 10]
        .into_iter()
        .map(TorsionGroup::cyclic)
        .chain([2, 4, 6].into_iter().map(|n| TorsionGroup { m: 2, n }))
        .chain(std::iter::once(TorsionGroup { m: 3, n: 3 }))
        .collect();
    groups.sort();
    groups
}

/// Exponents already present in the quadratic baseline.
pub const BASELINE_EXPONENTS: [u64; 7] = [1, 2, 3, 4, 6, 7, 10];

fn check_prime_domain(p: u64) -> Result<()> {
    if p <= 5 || !is_prime(p) {
        return Err(Error::domain(format!("p must be a prime greater than 5, got {p}")));
    }
    if p.checked_mul(6).and_then(|v| v.checked_add(1)).is_none() {
        return Err(Error::domain(format!("p = {p} too large: 6p + 1 overflows 64 bits")));
    }
    Ok(())
}

/// Class numbers behind the hard-coded discriminant lists, checked once.
fn constants_checked() -> Result<()> {
    static CHECK: OnceLock<Result<()>> = OnceLock::new();
    CHECK
        .get_or_init(|| {
            for &(delta, p, n) in &EXCEPTIONAL_PAIRS {
                let order = make_order(delta)?;
                if order.class_number() != 2 || n != 2 * p + 1 || delta.unsigned_abs() % n != 0 {
                    return Err(Error::consistency(format!("exceptional pair ({delta}, {p}) is not as recorded")));
                }
            }
            for &delta in CLASS_NUMBER_ONE_BELOW_MINUS_FOUR.iter().chain(&[-3, -4]) {
                if make_order(delta)?.class_number() != 1 {
                    return Err(Error::consistency(format!("h({delta}) != 1")));
                }
            }
            Ok(())
        })
        .clone()
}

fn splits(delta: i64, q: u64) -> bool {
    kronecker(delta, q as i64).expect("q is nonzero") == 1
}

/// The new torsion subgroups in degree `2p`.
pub fn new_groups(p: u64) -> Result<ClassificationReport> {
    check_prime_domain(p)?;
    constants_checked()?;

    let sophie = 2 * p + 1;
    let sophie_prime = is_prime(sophie);
    let mut hits: Vec<(TorsionGroup, CaseHit)> = Vec::new();
    let mut hit = |group: TorsionGroup, case_id: u8, witnesses: Vec<i64>| {
        if !witnesses.is_empty() {
            hits.push((group, CaseHit { case_id, witnesses }));
        }
    };

    for (case_id, &(delta, q, n)) in (1u8..).zip(EXCEPTIONAL_PAIRS.iter()) {
        if p == q {
            hit(TorsionGroup::cyclic(n), case_id, vec![delta]);
        }
    }
    if sophie_prime {
        let split_in = |list: &[i64]| list.iter().copied().filter(|&d| splits(d, sophie)).collect();
        hit(TorsionGroup::cyclic(sophie), 3, split_in(&ODD_EXPONENT_DISCRIMINANTS));
        hit(TorsionGroup::cyclic(2 * sophie), 4, split_in(&EVEN_EXPONENT_DISCRIMINANTS));
        hit(TorsionGroup { m: 2, n: 2 * sophie }, 5, split_in(&[-7]));
    }
    if p == 7 {
        hit(TorsionGroup::cyclic(49), 6, vec![-3]);
    }
    if is_prime(6 * p + 1) {
        hit(TorsionGroup::cyclic(6 * p + 1), 7, vec![-3]);
    }
    if is_prime(4 * p + 1) {
        hit(TorsionGroup::cyclic(2 * (4 * p + 1)), 8, vec![-4]);
    }

    let mut new_groups: Vec<NewGroup> = Vec::new();
    hits.sort_by_key(|(g, c)| (*g, c.case_id));
    for (group, case) in hits {
        match new_groups.last_mut() {
            Some(last) if last.group == group => last.cases.push(case),
            _ => new_groups.push(NewGroup { group, cases: vec![case] }),
        }
    }

    let is_olson = new_groups.is_empty();
    Ok(ClassificationReport {
        p,
        new_groups,
        baseline: quadratic_baseline(),
        is_olson,
    })
}

/// Every torsion group of a CM elliptic curve over a degree `2p` field.
pub fn gcm_degree_2p(p: u64) -> Result<Vec<TorsionGroup>> {
    let report = new_groups(p)?;
    let mut all = report.baseline.clone();
    all.extend(report.groups());
    all.sort();
    all.dedup();
    Ok(all)
}

/// Whether `2p` is a 2-Olson degree: none of
/// (1) `2p+1` prime and split in a class number one order with `Δ < -4`,
/// (2) `4p+1` prime, (3) `6p+1` prime.
pub fn is_olson(p: u64) -> Result<bool> {
    check_prime_domain(p)?;
    let q = 2 * p + 1;
    let cond1 = is_prime(q) && CLASS_NUMBER_ONE_BELOW_MINUS_FOUR.iter().any(|&d| splits(d, q));
    let cond2 = is_prime(4 * p + 1);
    let cond3 = is_prime(6 * p + 1);
    Ok(!(cond1 || cond2 || cond3))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OlsonRow {
    pub p: u64,
    pub is_olson: bool,
    pub new_group_count: usize,
}

fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if hi < lo.max(2) {
        return Ok(Vec::new());
    }
    Ok(PrimeSieve::new(hi)?.iter().filter(|&p| p >= lo).collect())
}

/// One row per prime `5 < p <= max_p`, ascending.
pub fn scan_olson(max_p: u64) -> Result<Vec<OlsonRow>> {
    primes_in(7, max_p)?
        .into_par_iter()
        .map(|p| {
            Ok(OlsonRow {
                p,
                is_olson: is_olson(p)?,
                new_group_count: new_groups(p)?.new_groups.len(),
            })
        })
        .collect()
}

/// Cumulative number of Olson rows with `p <= checkpoint`, per checkpoint.
pub fn olson_counts_at(rows: &[OlsonRow], checkpoints: &[u64]) -> Vec<(u64, usize)> {
    checkpoints
        .iter()
        .map(|&x| (x, rows.iter().filter(|r| r.p <= x && r.is_olson).count()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GermainStats {
    pub max_p: u64,
    pub a: u64,
    pub count_p: u64,
    pub count_chain: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainRow {
    pub p: u64,
    pub chain: bool,
}

fn check_chain_multiplier(a: u64) -> Result<()> {
    if !matches!(a, 2 | 4 | 6) {
        return Err(Error::domain(format!("multiplier a must be 2, 4 or 6, got {a}")));
    }
    Ok(())
}

/// For every prime `p <= max_p`, whether `a·p + 1` is prime.
pub fn chain_rows(max_p: u64, a: u64) -> Result<Vec<ChainRow>> {
    check_chain_multiplier(a)?;
    if max_p < 2 {
        return Err(Error::domain("max_p must be at least 2"));
    }
    Ok(primes_in(2, max_p)?
        .into_par_iter()
        .map(|p| ChainRow { p, chain: is_prime(a * p + 1) })
        .collect())
}

/// Number of primes `p <= max_p`, and of those with `a·p + 1` also prime.
pub fn germain_stats(max_p: u64, a: u64) -> Result<GermainStats> {
    let rows = chain_rows(max_p, a)?;
    Ok(GermainStats {
        max_p,
        a,
        count_p: rows.len() as u64,
        count_chain: rows.iter().filter(|r| r.chain).count() as u64,
    })
}
