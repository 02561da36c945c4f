use std::fmt::Write as _;

use cm_torsion::arith::sieve_primes;
use cm_torsion::classification::{chain_rows, gcm_degree_2p, new_groups, olson_counts_at, scan_olson, TorsionGroup};
use cm_torsion::degrees::{t_circ, TorsionLevel};
use cm_torsion::orders::{make_order, SplittingType};
use cm_torsion::parse::{ScanMode, Suite};
use cm_torsion::verify::{
    check_baby_lemma, check_class_number_oracle, check_cor14_consistency, check_engine_equivalence,
    check_m_bound,
};
use cm_torsion::{Error, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub struct Report {
    pub command: &'static str,
    pub parameters: Map<String, Value>,
    pub results: Value,
    pub text: String,
    pub csv: Option<String>,
    pub violations: usize,
}

impl Report {
    fn new(command: &'static str, parameters: Value, results: Value, text: String) -> Self {
        let Value::Object(parameters) = parameters else {
            unreachable!("parameters are built with json!({{..}})")
        };
        Report { command, parameters, results, text, csv: None, violations: 0 }
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn envelope(&self) -> String {
        let envelope = json!({
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "version": env!("CARGO_PKG_VERSION"),
        });
        let mut s = serde_json::to_string_pretty(&envelope).expect("values serialize");
        s.push('\n');
        s
    }
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("library types serialize")
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

pub fn order(disc: i64) -> Result<Report> {
    let order = make_order(disc)?;
    let primes = sieve_primes(100)?;
    let by_type = |kind: SplittingType| -> Vec<u64> {
        primes.iter().copied().filter(|&ell| order.splitting_type(ell) == kind).collect()
    };
    let (split, inert, ramified) =
        (by_type(SplittingType::Split), by_type(SplittingType::Inert), by_type(SplittingType::Ramified));

    let mut text = String::new();
    writeln!(text, "discriminant   {}", order.delta()).unwrap();
    writeln!(text, "field disc     {}", order.delta_k()).unwrap();
    writeln!(text, "conductor      {}", order.conductor()).unwrap();
    writeln!(text, "units          {}", order.omega()).unwrap();
    writeln!(text, "class number   {}", order.class_number()).unwrap();
    writeln!(text, "split          {}", join(&split, " ")).unwrap();
    writeln!(text, "inert          {}", join(&inert, " ")).unwrap();
    writeln!(text, "ramified       {}", join(&ramified, " ")).unwrap();

    let results = json!({
        "class_number": order.class_number(),
        "conductor": order.conductor(),
        "delta": order.delta(),
        "delta_k": order.delta_k(),
        "omega": order.omega(),
        "w_k": order.w_k(),
        "splitting_up_to": 100,
        "split": split,
        "inert": inert,
        "ramified": ramified,
    });
    Ok(Report::new("order", json!({ "disc": disc }), results, text))
}

pub fn tdeg(disc: i64, n: u64, m: u64, circ: bool) -> Result<Report> {
    let order = make_order(disc)?;
    let level = TorsionLevel::new(m, n)?;
    let report = t_circ(&order, level)?;

    let mut text = String::new();
    writeln!(text, "T(O_{disc}, {m}, {n}) = {}", report.t).unwrap();
    if circ {
        writeln!(text, "T°(O_{disc}, {m}, {n}) = {}", report.t_circ).unwrap();
    }
    for f in &report.t_tilde_factors {
        write!(text, "  {}^{} (a = {}): T̃ = {}", f.prime, f.b, f.a, f.t_tilde).unwrap();
        match f.t_circ_condition {
            Some(c) if circ => writeln!(text, ", least-degree condition {c}").unwrap(),
            _ => text.push('\n'),
        }
    }

    let mut results = to_value(&report);
    if !circ {
        let obj = results.as_object_mut().expect("struct serializes to an object");
        obj.remove("t_circ");
        obj.remove("epsilon");
    }
    let params = json!({ "disc": disc, "m": m, "n": n, "circ": circ });
    Ok(Report::new("tdeg", params, results, text))
}

pub fn classify(p: u64) -> Result<Report> {
    let report = new_groups(p)?;
    let gcm = gcm_degree_2p(p)?;

    let mut text = format!("p = {p}, degree {}\nnew groups:\n", 2 * p);
    if report.new_groups.is_empty() {
        text.push_str("  none\n");
    }
    for g in &report.new_groups {
        let cases = join(g.case_ids(), ",");
        let witnesses = join(g.witnesses(), ", ");
        writeln!(text, "  {:<14} case {:<5} Δ = {witnesses}", g.group.to_string(), cases).unwrap();
    }
    writeln!(text, "baseline: {}", join(&report.baseline, ", ")).unwrap();
    writeln!(text, "2-Olson: {}", if report.is_olson { "yes" } else { "no" }).unwrap();

    let mut results = to_value(&report);
    results["gcm"] = to_value(&gcm);
    results["gcm_names"] = to_value(&gcm.iter().map(TorsionGroup::to_string).collect::<Vec<_>>());
    Ok(Report::new("classify", json!({ "p": p }), results, text))
}

fn csv_string<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::Domain(format!("csv: {e}")))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Domain(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv of integers and booleans is ASCII"))
}

#[derive(Serialize)]
struct ClassifyCsvRow {
    p: u64,
    new_group_count: usize,
    is_olson: bool,
}

#[derive(Serialize)]
struct OlsonCsvRow {
    p: u64,
    is_olson: bool,
    cumulative_olson: usize,
}

pub fn scan(max_p: u64, mode: ScanMode, a: u64) -> Result<Report> {
    let min = if mode == ScanMode::Germain { 2 } else { 7 };
    if max_p < min {
        return Err(Error::Domain(format!("max_p must be at least {min} for {mode} scans")));
    }
    let mut params = json!({ "max_p": max_p, "mode": mode.as_str() });
    let (csv, results, text) = match mode {
        ScanMode::Classify => {
            let rows = scan_olson(max_p)?;
            let total: usize = rows.iter().map(|r| r.new_group_count).sum();
            let csv = csv_string(rows.iter().map(|r| ClassifyCsvRow {
                p: r.p,
                new_group_count: r.new_group_count,
                is_olson: r.is_olson,
            }))?;
            let text = format!("{} primes, {total} new groups\n", rows.len());
            (csv, json!({ "primes": rows.len(), "total_new_groups": total }), text)
        }
        ScanMode::Olson => {
            let rows = scan_olson(max_p)?;
            let mut cumulative = 0;
            let csv = csv_string(rows.iter().map(|r| {
                cumulative += r.is_olson as usize;
                OlsonCsvRow { p: r.p, is_olson: r.is_olson, cumulative_olson: cumulative }
            }))?;
            let mut checkpoints: Vec<u64> = std::iter::successors(Some(10u64), |x| x.checked_mul(10))
                .take_while(|&x| x <= max_p)
                .chain(std::iter::once(max_p))
                .collect();
            checkpoints.dedup();
            let counts: Vec<Value> = olson_counts_at(&rows, &checkpoints)
                .into_iter()
                .map(|(p, count)| json!({ "p": p, "count": count }))
                .collect();
            let text = format!("{} primes, {cumulative} Olson\n", rows.len());
            let results = json!({ "primes": rows.len(), "olson_count": cumulative, "checkpoints": counts });
            (csv, results, text)
        }
        ScanMode::Germain => {
            params["a"] = json!(a);
            let rows = chain_rows(max_p, a)?;
            let chain = rows.iter().filter(|r| r.chain).count();
            let csv = csv_string(&rows)?;
            let text = format!("{} primes, {chain} with {a}p+1 prime\n", rows.len());
            (csv, json!({ "a": a, "count_p": rows.len(), "count_chain": chain, "max_p": max_p }), text)
        }
    };
    let mut report = Report::new("scan", params, results, text);
    report.csv = Some(csv);
    Ok(report)
}

fn m_bound_range(max_p: u64) -> Result<(Vec<Value>, Vec<Value>)> {
    if max_p < 7 {
        return Err(Error::Domain("bound must be at least 7 for m-bound".into()));
    }
    let mut violations = Vec::new();
    let mut allowed = Vec::new();
    for p in sieve_primes(max_p)?.into_iter().filter(|&p| p > 5) {
        let report = check_m_bound(p)?;
        violations.extend(report.violations.iter().map(|v| json!({ "p": p, "violation": v })));
        allowed.extend(
            report
                .noncyclic_new
                .iter()
                .map(|(delta, g)| json!({ "p": p, "delta": delta, "group": g.to_string() })),
        );
    }
    Ok((violations, allowed))
}

pub fn verify(suite: Suite, bound: u64, n_bound: u64) -> Result<Report> {
    let mut params = json!({ "suite": suite.as_str(), "bound": bound });
    let mut extra = Map::new();
    let violations: Vec<Value> = match suite {
        Suite::BabyLemma => {
            params["n_bound"] = json!(n_bound);
            check_baby_lemma(bound, n_bound)?.iter().map(to_value).collect()
        }
        Suite::ClassNumber => check_class_number_oracle(bound)?.iter().map(to_value).collect(),
        Suite::Cor14 => check_cor14_consistency(bound)?.iter().map(to_value).collect(),
        Suite::MBound => {
            let (violations, allowed) = m_bound_range(bound)?;
            extra.insert("noncyclic_new".into(), Value::Array(allowed));
            violations
        }
        Suite::EngineEquivalence => check_engine_equivalence(bound)?.iter().map(to_value).collect(),
    };

    let mut text = format!("{suite}: {} violations\n", violations.len());
    for v in &violations {
        writeln!(text, "  {v}").unwrap();
    }
    let mut results = json!({ "suite": suite.as_str(), "violation_count": violations.len() });
    results["violations"] = Value::Array(violations);
    for (k, v) in extra {
        results[k] = v;
    }
    let count = results["violation_count"].as_u64().unwrap_or(0) as usize;
    let mut report = Report::new("verify", params, results, text);
    report.violations = count;
    Ok(report)
}
