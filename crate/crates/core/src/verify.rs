//! Brute-force replays of the degree-`2p` case analysis.
//!
//! These checks rebuild the classification from the degree functions alone
//! and compare it with [`crate::classification`]. Three facts are not
//! computable from the degree functions and are taken as axioms:
//!
//! * an `O`-CM curve with `h(O) = 1` and 2 split or ramified in `O` always has
//!   a rational point of order 2, in every model (2-adic filter);
//! * for `Δ = -7`, a point of order `2p + 1` in degree `2p` forces full
//!   2-torsion, so `Z/2(2p+1)` only occurs inside `Z/2 × Z/2(2p+1)`;
//! * a point of order `N` exists in degree `d` over `Q(j(E))` only if
//!   `T°(O, N) | d`. This is where the Weber-function exclusions of
//!   `N = 13, 21` for `Δ = -3` and the `N = 5, 8, 12` exclusions enter.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{enumerate_totient_divisors, euler_phi, factorize, is_prime, Factorization, PrimeSieve};
use crate::classification::{is_olson, new_groups, quadratic_baseline, TorsionGroup, BASELINE_EXPONENTS};
use crate::degrees::{t_circ, t_of, TorsionLevel};
use crate::error::{Error, Result};
use crate::orders::{
    all_orders, class_number_formula_with, class_number_table, enumerate_orders_with_class_number,
    fundamental_part, is_valid_discriminant, OrderDescriptor, SplittingType, COMPLETE_LIST_BOUND,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EliminationReason {
    /// `T(O, N)` does not divide the degree over `Q(j(E))`.
    DegreeDivisibility,
    /// `T(O, N)` divides it but the least degree `T°(O, N)` does not.
    TCircMismatch,
    /// `N` is already an exponent over quadratic fields.
    BaselineOldExponent,
    /// `N` is odd but the order forces a rational 2-torsion point.
    TwoAdicFilter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Elimination {
    pub n: u64,
    pub reason: EliminationReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentCandidateSet {
    pub p: u64,
    pub delta: i64,
    pub class_number_context: u64,
    /// `[F : Q(j(E))] = 2p / h(O)`.
    pub degree: u64,
    /// Every `N` with `φ(N) | ω · degree`.
    pub candidates: Vec<u64>,
    /// Candidates passing both degree filters, old exponents included.
    pub degree_feasible: Vec<u64>,
    /// New exponents that survive every filter.
    pub surviving: Vec<u64>,
    pub eliminated: Vec<Elimination>,
}

impl ExponentCandidateSet {
    pub fn reason_for(&self, n: u64) -> Option<EliminationReason> {
        self.eliminated.iter().find(|e| e.n == n).map(|e| e.reason)
    }
}

fn check_p(p: u64) -> Result<()> {
    if p <= 5 || !is_prime(p) {
        return Err(Error::domain(format!("p must be a prime greater than 5, got {p}")));
    }
    if p > u32::MAX as u64 {
        return Err(Error::domain(format!("p = {p} too large for exhaustive replay")));
    }
    Ok(())
}

/// Orders whose every curve carries a rational 2-torsion point.
pub fn forced_two_torsion(order: &OrderDescriptor) -> bool {
    order.class_number() == 1 && order.splitting_type(2) != SplittingType::Inert
}

/// `d / x` divisibility with `x = 0` never dividing.
fn divides(x: u64, d: u64) -> bool {
    x != 0 && d % x == 0
}

/// Which `N` admit an `O`-point of order `N` in degree `2p`, and why the rest fail.
pub fn candidate_exponents(p: u64, order: &OrderDescriptor) -> Result<ExponentCandidateSet> {
    check_p(p)?;
    let h = order.class_number();
    if ![1, 2, p, 2 * p].contains(&h) {
        return Err(Error::domain(format!(
            "h(Δ = {}) = {h} cannot occur in degree 2p = {}",
            order.delta(),
            2 * p
        )));
    }
    let degree = 2 * p / h;
    let totient_target = order.omega() as u64 * degree;
    let candidates = enumerate_totient_divisors(totient_target, 2 * totient_target * totient_target)?;

    let mut degree_feasible = Vec::new();
    let mut surviving = Vec::new();
    let mut eliminated = Vec::new();
    for &n in &candidates {
        let level = TorsionLevel::cyclic(n)?;
        let reason = if !divides(t_of(order, level)?, degree) {
            Some(EliminationReason::DegreeDivisibility)
        } else if !divides(t_circ(order, level)?.t_circ, degree) {
            Some(EliminationReason::TCircMismatch)
        } else {
            degree_feasible.push(n);
            if BASELINE_EXPONENTS.contains(&n) {
                Some(EliminationReason::BaselineOldExponent)
            } else if n % 2 == 1 && forced_two_torsion(order) {
                Some(EliminationReason::TwoAdicFilter)
            } else {
                None
            }
        };
        match reason {
            Some(reason) => eliminated.push(Elimination { n, reason }),
            None => surviving.push(n),
        }
    }

    Ok(ExponentCandidateSet {
        p,
        delta: order.delta(),
        class_number_context: h,
        degree,
        candidates,
        degree_feasible,
        surviving,
        eliminated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BabyLemmaViolation {
    pub delta: i64,
    pub n: u64,
    pub prime: u64,
}

/// Outcome of the `φ(N) = ω · T°(O, N)` test at one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BabyLemmaPoint {
    pub equality: bool,
    /// Primes dividing `N` that are neither ramified nor `2 ∥ N` split.
    pub offending_primes: Vec<u64>,
}

fn baby_lemma_with(order: &OrderDescriptor, n: u64, nf: &Factorization) -> Result<BabyLemmaPoint> {
    let t_circ = t_circ(order, TorsionLevel::cyclic(n)?)?.t_circ;
    let equality = nf.phi() == order.omega() as u64 * t_circ;
    let offending_primes = if equality {
        nf.factors()
            .iter()
            .filter(|&&(ell, a)| match order.splitting_type(ell) {
                SplittingType::Ramified => false,
                SplittingType::Split => !(ell == 2 && a == 1),
                SplittingType::Inert => true,
            })
            .map(|&(ell, _)| ell)
            .collect()
    } else {
        Vec::new()
    };
    Ok(BabyLemmaPoint { equality, offending_primes })
}

/// Single-point check: if `φ(N) = ω · T°(O, N)`, every `ℓ | N` is ramified
/// in `O`, or `ℓ = 2` is split with `2 ∥ N`.
pub fn baby_lemma_at(order: &OrderDescriptor, n: u64) -> Result<BabyLemmaPoint> {
    if n < 4 {
        return Err(Error::domain("N must be at least 4"));
    }
    baby_lemma_with(order, n, &factorize(n)?)
}

/// Scans every order with `|Δ| <= delta_bound` and every `4 <= N <= n_bound`.
pub fn check_baby_lemma(delta_bound: u64, n_bound: u64) -> Result<Vec<BabyLemmaViolation>> {
    if delta_bound < 4 || n_bound < 4 {
        return Err(Error::domain("bounds must be at least 4"));
    }
    let factorizations: Vec<Factorization> = (4..=n_bound).map(factorize).collect::<Result<_>>()?;
    let per_order: Vec<Vec<BabyLemmaViolation>> = all_orders(delta_bound)
        .par_iter()
        .map(|order| {
            let mut found = Vec::new();
            for nf in &factorizations {
                let point = baby_lemma_with(order, nf.value(), nf)?;
                found.extend(point.offending_primes.into_iter().map(|prime| BabyLemmaViolation {
                    delta: order.delta(),
                    n: nf.value(),
                    prime,
                }));
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    Ok(per_order.into_iter().flatten().collect())
}

fn primes_between(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if hi < lo {
        return Ok(Vec::new());
    }
    Ok(PrimeSieve::new(hi.max(2))?.iter().filter(|&p| p >= lo).collect())
}

/// Primes `5 < p <= max_p` where the Olson test and the classification disagree.
pub fn check_cor14_consistency(max_p: u64) -> Result<Vec<u64>> {
    let disagreements: Vec<Option<u64>> = primes_between(7, max_p)?
        .into_par_iter()
        .map(|p| Ok((is_olson(p)? != new_groups(p)?.is_olson).then_some(p)))
        .collect::<Result<_>>()?;
    Ok(disagreements.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassNumberMismatch {
    pub delta: i64,
    pub forms: u64,
    /// `None` when the formula itself reported an inconsistency.
    pub formula: Option<u64>,
}

/// Ring class number formula against the reduced-form count for every valid
/// `|Δ| <= delta_bound`.
pub fn check_class_number_oracle(delta_bound: u64) -> Result<Vec<ClassNumberMismatch>> {
    if delta_bound < 4 {
        return Err(Error::domain("delta_bound must be at least 4"));
    }
    let table = class_number_table(delta_bound);
    let mismatches: Vec<Option<ClassNumberMismatch>> = (3..=delta_bound)
        .into_par_iter()
        .map(|d| -(d as i64))
        .filter(|&delta| is_valid_discriminant(delta))
        .map(|delta| {
            let forms = table[delta.unsigned_abs() as usize];
            let (delta_k, f) = fundamental_part(delta)?;
            let h_k = table[delta_k.unsigned_abs() as usize];
            let formula = match class_number_formula_with(delta_k, f, h_k) {
                Ok(h) => Some(h),
                Err(e) if e.is_internal() => None,
                Err(e) => return Err(e),
            };
            Ok((formula != Some(forms)).then_some(ClassNumberMismatch { delta, forms, formula }))
        })
        .collect::<Result<_>>()?;
    Ok(mismatches.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MBoundViolation {
    pub delta: i64,
    pub group: TorsionGroup,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MBoundReport {
    pub p: u64,
    pub violations: Vec<MBoundViolation>,
    /// Non-cyclic groups outside the baseline that pass the degree tests.
    pub noncyclic_new: Vec<(i64, TorsionGroup)>,
}

/// Orders of class number 1 and 2.
pub fn small_class_number_orders() -> Vec<OrderDescriptor> {
    [1, 2]
        .into_iter()
        .flat_map(|h| {
            enumerate_orders_with_class_number(h, COMPLETE_LIST_BOUND)
                .expect("valid arguments")
                .orders
        })
        .collect()
}

fn m_bound_for_order(p: u64, order: &OrderDescriptor, report: &mut MBoundReport) -> Result<()> {
    let baseline = quadratic_baseline();
    let sophie = 2 * p + 1;
    let cs = candidate_exponents(p, order)?;
    for &n in &cs.degree_feasible {
        for m in factorize(n)?.divisors().into_iter().filter(|&m| m >= 2) {
            let group = TorsionGroup::new(m, n)?;
            if baseline.contains(&group) {
                continue;
            }
            let level = TorsionLevel::new(m, n)?;
            if m >= 3 {
                // K lies in F(E[M]), so T(O, M, N) divides [F : K(j)] = degree / 2.
                if divides(2 * t_of(order, level)?, cs.degree) {
                    report.violations.push(MBoundViolation {
                        delta: order.delta(),
                        group,
                        detail: format!("M = {m} > 2 is degree-feasible"),
                    });
                }
                continue;
            }
            if !divides(t_circ(order, level)?.t_circ, cs.degree) {
                continue;
            }
            report.noncyclic_new.push((order.delta(), group));
            let allowed = order.delta() == -7 && is_prime(sophie) && n == 2 * sophie;
            if !allowed {
                report.violations.push(MBoundViolation {
                    delta: order.delta(),
                    group,
                    detail: "only Δ = -7 admits Z/2 × Z/2(2p+1)".into(),
                });
            }
        }
    }
    Ok(())
}

/// Replays the non-cyclic analysis for degree `2p` over all class number 1
/// and 2 orders.
pub fn check_m_bound(p: u64) -> Result<MBoundReport> {
    check_p(p)?;
    let mut report = MBoundReport { p, violations: Vec::new(), noncyclic_new: Vec::new() };
    for order in small_class_number_orders() {
        m_bound_for_order(p, &order, &mut report)?;
    }
    Ok(report)
}

/// Groups with their witnessing discriminants, sorted by group then witness.
pub type GroupWitnesses = Vec<(TorsionGroup, Vec<i64>)>;

/// New groups in degree `2p` derived from the degree functions over the given orders.
pub fn brute_force_new_groups(p: u64, orders: &[OrderDescriptor]) -> Result<GroupWitnesses> {
    check_p(p)?;
    let sophie = 2 * p + 1;
    let mut groups: BTreeMap<TorsionGroup, Vec<i64>> = BTreeMap::new();
    let mut noncyclic = MBoundReport { p, violations: Vec::new(), noncyclic_new: Vec::new() };
    for order in orders {
        let cs = candidate_exponents(p, order)?;
        for &n in &cs.surviving {
            let full_two_torsion = order.delta() == -7 && is_prime(sophie) && n == 2 * sophie;
            if !full_two_torsion {
                groups.entry(TorsionGroup::cyclic(n)).or_default().push(order.delta());
            }
        }
        m_bound_for_order(p, order, &mut noncyclic)?;
    }
    for (delta, group) in noncyclic.noncyclic_new {
        groups.entry(group).or_default().push(delta);
    }
    Ok(groups
        .into_iter()
        .map(|(g, mut w)| {
            w.sort_unstable_by(|a, b| b.cmp(a));
            w.dedup();
            (g, w)
        })
        .collect())
}

fn engine_groups(p: u64) -> Result<GroupWitnesses> {
    Ok(new_groups(p)?
        .new_groups
        .iter()
        .map(|g| (g.group, g.witnesses()))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceMismatch {
    pub p: u64,
    pub engine: GroupWitnesses,
    pub brute_force: GroupWitnesses,
}

/// Primes `5 < p <= max_p` where the engine and the brute-force replay differ,
/// in groups or in witnessing discriminants.
pub fn check_engine_equivalence(max_p: u64) -> Result<Vec<EquivalenceMismatch>> {
    let orders = small_class_number_orders();
    let found: Vec<Option<EquivalenceMismatch>> = primes_between(7, max_p)?
        .into_par_iter()
        .map(|p| {
            let engine = engine_groups(p)?;
            let brute_force = brute_force_new_groups(p, &orders)?;
            Ok((engine != brute_force).then_some(EquivalenceMismatch { p, engine, brute_force }))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LargeClassNumberViolation {
    pub p: u64,
    pub delta: i64,
    pub n: u64,
}

/// Orders with `h(O) ∈ {p, 2p}` and `|Δ| <= delta_bound` that would give a
/// new exponent in degree `2p`. Expected empty; bounded because those lists
/// cannot be exhausted by a scan.
pub fn check_large_class_number_orders(max_p: u64, delta_bound: u64) -> Result<Vec<LargeClassNumberViolation>> {
    let orders = all_orders(delta_bound);
    let found: Vec<Vec<LargeClassNumberViolation>> = primes_between(7, max_p)?
        .into_par_iter()
        .map(|p| {
            let mut found = Vec::new();
            for order in orders.iter().filter(|o| o.class_number() == p || o.class_number() == 2 * p) {
                for n in candidate_exponents(p, order)?.surviving {
                    found.push(LargeClassNumberViolation { p, delta: order.delta(), n });
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Orders with odd prime class number `> 5` whose discriminant is not
/// `-ℓ^(2a+1)` or `-4·ℓ^(2a+1)` with `ℓ ≡ 3 (mod 4)`.
pub fn check_odd_class_number_shape(delta_bound: u64) -> Result<Vec<i64>> {
    let mut bad = Vec::new();
    for order in all_orders(delta_bound) {
        let h = order.class_number();
        if h <= 5 || !is_prime(h) {
            continue;
        }
        let d = order.delta().unsigned_abs();
        let (twos, odd) = (d.trailing_zeros(), d >> d.trailing_zeros());
        let f = factorize(odd)?;
        let shape_ok = matches!(twos, 0 | 2)
            && matches!(f.factors(), [(ell, e)] if ell % 4 == 3 && e % 2 == 1);
        if !shape_ok {
            bad.push(order.delta());
        }
    }
    Ok(bad)
}

/// `φ(N) | ω · T(O, 1, N)` violations over a grid.
pub fn check_totient_divisibility(delta_bound: u64, n_bound: u64) -> Result<Vec<(i64, u64)>> {
    let found: Vec<Vec<(i64, u64)>> = all_orders(delta_bound)
        .par_iter()
        .map(|order| {
            let mut found = Vec::new();
            for n in 1..=n_bound {
                let t = t_of(order, TorsionLevel::cyclic(n)?)?;
                if (order.omega() as u64 * t) % euler_phi(n)? != 0 {
                    found.push((order.delta(), n));
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}
