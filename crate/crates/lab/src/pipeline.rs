//! The composed density pipeline: positive entropy of `a`, the q-Host
//! property of `b`, the entropy growth experiment, then density of
//! `{q^n a_m b_k x}`.

use num_traits::ToPrimitive;
use serde_json::{json, Value};
use timesq_core::arith::{gcd, prime_divisors};
use timesq_core::density::{triple_product_points, TripleBudget};
use timesq_core::entropy::{local_positivity, KPolicy};
use timesq_core::padic::{continuity_test, critical_point_scan, interpolation_stride, ContinuityVerdict};
use timesq_core::SequenceSpec;

use crate::config::{range, PipelineConfig};
use crate::error::{LabError, Result, Stage, StageExt};
use crate::report::{Report, Table};
use crate::run::{
    cloud_metrics, dec, growth_config, growth_report, growth_tables, norm_tends_to_zero, positivity_tables, surrogate,
    term_valuations, verdict,
};

/// Precision used for the critical point scan of a stride certificate.
const CRITICAL_PRECISION: u32 = 20;

/// Growth defaults sized for a 200-digit surrogate and a composite `q`.
const GROWTH_TERMS: u64 = 60;
const GROWTH_SEARCH_LEN: usize = 128;

/// The integer `c` with `b_k = c^{e(k)}`, when `b` has that shape.
pub fn exponential_base(spec: &SequenceSpec) -> Option<u64> {
    match spec {
        SequenceSpec::Geometric { c } | SequenceSpec::DoubleExp { c, .. } => c.to_u64(),
        SequenceSpec::Tower { base, .. } => base.to_u64(),
        _ => None,
    }
}

/// Evidence for one prime `p | q` that `b` is p-Host or has `‖b_k‖_p → 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeHost {
    pub p: u64,
    /// `(stride, v_log, guard_ok, critical points)` of the base's certificate.
    pub certificate: Option<(u64, u32, bool, Option<u64>)>,
    /// Mahler screen verdict; `None` when the terms are too large to difference.
    pub continuity: Option<ContinuityVerdict>,
    pub valuations: Vec<Option<u32>>,
}

impl PrimeHost {
    pub fn smooth(&self) -> bool {
        self.certificate.is_some_and(|c| c.2) || self.continuity == Some(ContinuityVerdict::Plausible)
    }

    pub fn norm_to_zero(&self) -> bool {
        norm_tends_to_zero(&self.valuations)
    }
}

pub fn prime_host(cfg: &PipelineConfig, p: u64) -> Result<PrimeHost> {
    let b = &cfg.b.0;
    let certificate = match exponential_base(b) {
        Some(base) if gcd(base, p) == 1 => {
            let cert = interpolation_stride(base, p)?;
            let critical =
                if cert.guard_ok { Some(critical_point_scan(&cert, CRITICAL_PRECISION)?.count) } else { None };
            Some((cert.stride, cert.v_log, cert.guard_ok, critical))
        }
        _ => None,
    };
    let continuity = match continuity_test(b, p, cfg.k_max, &cfg.slope.0) {
        Ok(r) => Some(r.verdict),
        Err(timesq_core::Error::TooLarge(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let valuations = term_valuations(b, p, cfg.norm_terms)?;
    Ok(PrimeHost { p, certificate, continuity, valuations })
}

/// Some prime gives a smooth interpolation and every other prime either does
/// too or has `‖b_k‖_p → 0`.
pub fn is_q_host(primes: &[PrimeHost]) -> bool {
    primes.iter().any(PrimeHost::smooth) && primes.iter().all(|h| h.smooth() || h.norm_to_zero())
}

fn host_rows(table: &mut Table, h: &PrimeHost) {
    let p = h.p.to_string();
    let cert = match h.certificate {
        Some((s, v, ok, crit)) => {
            let crit = crit.map_or("n/a".into(), |c| c.to_string());
            (format!("S={s} v_log={v} guard_ok={ok} critical_points={crit}"), ok)
        }
        None => ("base not a unit".into(), false),
    };
    table.push(vec!["q-Host".into(), p.clone(), "stride certificate".into(), cert.0, cert.1.to_string()]);
    let cont = h.continuity.map_or("terms too large".into(), |v| v.to_string());
    let plausible = h.continuity == Some(ContinuityVerdict::Plausible);
    table.push(vec!["q-Host".into(), p.clone(), "mahler continuity".into(), cont, plausible.to_string()]);
    let vals: Vec<String> = h.valuations.iter().map(|v| v.map_or("inf".into(), |v| v.to_string())).collect();
    table.push(vec![
        "q-Host".into(),
        p,
        "norm to zero".into(),
        format!("v_p(b_k)={}", vals.join(";")),
        h.norm_to_zero().to_string(),
    ]);
}

fn host_json(h: &PrimeHost) -> Value {
    json!({
        "p": h.p,
        "certificate": h.certificate.map(|(s, v, ok, crit)| json!({
            "stride": s, "v_log": v, "guard_ok": ok, "critical_points": crit,
        })),
        "continuity": h.continuity.map(|v| v.to_string()),
        "valuations": h.valuations,
        "smooth": h.smooth(),
        "norm_to_zero": h.norm_to_zero(),
    })
}

/// Runs the four stages in order, halting at the first failure.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Report> {
    let mut report = Report::default();
    if let Err(e) = stages(cfg, &mut report) {
        report.fail(e);
    }
    Ok(report)
}

fn stages(cfg: &PipelineConfig, report: &mut Report) -> Result<()> {
    let mut hyp = Table::new("hypotheses", &["condition", "prime", "check", "detail", "holds"]);

    let policy = KPolicy::default();
    let pos = local_positivity(&cfg.a.0, cfg.q, cfg.n_max, policy, &cfg.threshold.0).stage(Stage::Positivity)?;
    for v in &pos.per_prime {
        hyp.push(vec![
            "Positive Entropy".into(),
            v.p.to_string(),
            "tail_sup > threshold".into(),
            format!("{} vs {}", dec(&v.profile.tail_sup), dec(&v.threshold)),
            v.positive.to_string(),
        ]);
    }
    let (pos_tables, pos_json) = positivity_tables(&pos);
    report.tables.extend(pos_tables.into_iter().map(|mut t| {
        t.name = format!("a_entropy_{}", t.name);
        t
    }));
    report.insert("positive_entropy", pos_json);
    if !pos.positive {
        report.tables.push(hyp);
        return Err(LabError::Hypothesis(format!("a = {{{}}}: {}", cfg.a.0, verdict(&pos))).at(Stage::Positivity));
    }

    let hosts =
        prime_divisors(cfg.q).into_iter().map(|p| prime_host(cfg, p)).collect::<Result<Vec<_>>>().stage(Stage::Host)?;
    hosts.iter().for_each(|h| host_rows(&mut hyp, h));
    let host = is_q_host(&hosts);
    hyp.push(vec!["q-Host".into(), "all".into(), "combined".into(), String::new(), host.to_string()]);
    report.tables.push(hyp);
    report.insert("q_host", json!({ "holds": host, "per_prime": hosts.iter().map(host_json).collect::<Vec<_>>() }));
    if !host {
        return Err(LabError::Hypothesis(format!("b = {{{}}} is not certified q-Host", cfg.b.0)).at(Stage::Host));
    }

    let x = surrogate(&cfg.x, cfg.digits)?;
    let mut opts = cfg.growth.clone();
    opts.terms = opts.terms.or(Some(GROWTH_TERMS));
    opts.search_len = opts.search_len.or(Some(GROWTH_SEARCH_LEN));
    let gcfg = growth_config(cfg.q, cfg.levels, &opts).stage(Stage::Growth)?;
    let growth = growth_report(&x, &cfg.a.0, &gcfg).stage(Stage::Growth)?;
    let (table, summary) = growth_tables(&growth);
    report.tables.push(table);
    report.insert("growth", summary);
    if !growth.checks_pass() {
        return Err(LabError::Hypothesis("an entropy growth check failed".into()).at(Stage::Growth));
    }

    let c = SequenceSpec::geometric(cfg.q).stage(Stage::Density)?;
    let t = &cfg.triple;
    let budget = TripleBudget {
        a: range("triple.m_range", t.m_range)?,
        b: range("triple.k_range", t.k_range)?,
        c: range("triple.n_range", t.n_range)?,
        max_product: t.max_product.0.clone(),
    };
    let cloud = triple_product_points(&x, &cfg.a.0, &cfg.b.0, &c, &budget).stage(Stage::Density)?;
    let mut metrics = cloud_metrics(&cloud).stage(Stage::Density)?;
    metrics.name = "density".into();
    report.tables.push(metrics);
    report.insert("density_provenance", cloud.provenance.clone());
    Ok(())
}
