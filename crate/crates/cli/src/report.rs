//! JSON rendering. Keys are sorted and floats use the shortest decimal that
//! round-trips, so identical inputs give byte-identical reports.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use specgap::analysis::{Analysis, Violation};
use specgap::bounds::{BoundCertificate, Direction, DriftReport, IntegrabilityReport, Scope};
use specgap::cheeger::{CheegerConstants, RatioSequence};
use specgap::forms::Alpha;
use specgap::spectral::SpectralResult;
use specgap::Subset;

/// Finite floats as numbers; `±∞` and NaN as strings, which JSON lacks.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn members(set: &Subset) -> Value {
    json!(set.members())
}

pub fn spectral(result: &Option<SpectralResult<f64>>) -> Value {
    match result {
        None => Value::Null,
        Some(r) => json!({
            "value": num(r.value),
            "residual": num(r.residual),
            "method": r.method.to_string(),
        }),
    }
}

pub fn constants(c: &CheegerConstants<f64>) -> Value {
    json!({
        "alpha": c.alpha.value(),
        "h": num(c.h),
        "h_vacuous": c.h_vacuous,
        "k": num(c.k),
        "k_exact": c.k_exact,
        "k_prime": num(c.k_prime),
        "k_prime_exact": c.k_prime_exact,
        "source": format!("{:?}", c.source).to_lowercase(),
        "witness_h": members(&c.argmin_h),
        "witness_k": members(&c.argmin_k),
        "witness_k_prime": members(&c.argmin_kprime),
    })
}

pub fn certificate(c: &BoundCertificate<f64>) -> Value {
    let inputs: Map<String, Value> = c.inputs.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
    json!({
        "name": c.name,
        "target": c.target.to_string(),
        "direction": c.direction.to_string(),
        "value": num(c.value),
        "vacuous": c.vacuous,
        "scope": match c.scope { Scope::Instance => "instance", Scope::Family => "family" },
        "rescale": c.rescale.map_or(Value::Null, num),
        "inputs": inputs,
        "note": c.note,
    })
}

/// Instance certificates grouped by target and direction, best first.
pub fn ranking(certs: &[BoundCertificate<f64>]) -> Value {
    type Sides<'a> = (Vec<&'a BoundCertificate<f64>>, Vec<&'a BoundCertificate<f64>>);
    let mut groups: BTreeMap<String, Sides> = BTreeMap::new();
    for c in certs.iter().filter(|c| c.scope == Scope::Instance) {
        let entry = groups.entry(c.target.to_string()).or_default();
        match c.direction {
            Direction::Lower => entry.0.push(c),
            Direction::Upper => entry.1.push(c),
        }
    }
    let row = |c: &&BoundCertificate<f64>| json!({"name": c.name, "value": num(c.value), "vacuous": c.vacuous});
    let mut out = Map::new();
    for (target, (mut lower, mut upper)) in groups {
        lower.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.name.cmp(b.name)));
        upper.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.name.cmp(b.name)));
        out.insert(
            target,
            json!({
                "best_lower": lower.first().map_or(Value::Null, row),
                "best_upper": upper.first().map_or(Value::Null, row),
                "lower": lower.iter().map(row).collect::<Vec<_>>(),
                "upper": upper.iter().map(row).collect::<Vec<_>>(),
            }),
        );
    }
    Value::Object(out)
}

pub fn analysis(a: &Analysis<f64>, alphas: &[Alpha]) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("n".into(), json!(a.n));
    out.insert("lambda0".into(), spectral(&a.lambda0));
    out.insert("lambda1".into(), spectral(&a.lambda1));
    out.insert(
        "constants".into(),
        a.constants
            .iter()
            .filter(|c| alphas.contains(&c.alpha))
            .map(constants)
            .collect(),
    );
    out.insert("certificates".into(), a.certificates.iter().map(certificate).collect());
    out.insert("ranking".into(), ranking(&a.certificates));
    out.insert(
        "skipped".into(),
        a.skipped
            .iter()
            .map(|s| json!({"name": s.name, "reason": s.reason.to_string()}))
            .collect(),
    );
    out
}

pub fn violation(v: &Violation<f64>) -> Value {
    json!({
        "certificate": certificate(&v.certificate),
        "exact": num(v.exact),
    })
}

pub fn ratio_trend(alpha: Alpha, seq: &RatioSequence<f64>, checkpoints: &[usize]) -> Value {
    json!({
        "alpha": alpha.value(),
        "infimum": num(seq.infimum),
        "argmin": seq.argmin,
        "minimum_up_to": checkpoints
            .iter()
            .map(|&m| json!({"up_to": m, "minimum": num(seq.min_upto(m))}))
            .collect::<Vec<_>>(),
    })
}

pub fn drift(d: &DriftReport<f64>) -> Value {
    json!({
        "name": d.name,
        "window": [d.window.0, d.window.1],
        "sup": num(d.sup),
        "classification": match d.classification {
            specgap::bounds::DriftClassification::NegativeOnWindow => "negative_on_window",
            specgap::bounds::DriftClassification::Indeterminate => "indeterminate",
        },
        "decay_exponent": num(d.decay_exponent),
        "phi": d.phi,
        "note": d.note,
    })
}

pub fn integrability(eps: f64, r: &IntegrabilityReport) -> Value {
    json!({
        "eps": eps,
        "verdict": format!("{:?}", r.verdict).to_lowercase(),
        "samples": r.samples.len(),
        "last_exponent": r.exponents.last().copied().map_or(Value::Null, num),
    })
}

/// Error entry for a report section that could not be computed.
pub fn section_error(e: impl std::fmt::Display) -> Value {
    json!({ "error": e.to_string() })
}
