use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use specgap::analysis::{analyze_birth_death, analyze_form, verify, Analysis, AnalysisOptions, BirthDeathOptions, Violation};
use specgap::bounds::{
    birth_death_delta2_kernel, birth_death_lyapunov_drift, birth_death_one_sided, birth_death_sandwich, delta2_kernel,
    exponential_moment, integrability_probe, one_sided_cheeger, BoundCertificate, Direction, Scope, Target,
};
use specgap::cheeger::{birth_death_kprime, enumerate_constants, MAX_ENUMERATION};
use specgap::expr::RateExpression;
use specgap::forms::{default_weights, modified_form, Alpha, BirthDeathSpec};
use specgap::random::{random_form, RandomFormConfig};
use specgap::spectral::{birth_death_lambda1, lambda1_exact};
use specgap::{BirthDeath, Form, Subset};

use crate::error::{CliError, CliResult};
use crate::report;
use crate::spec::{bind_lattice, evaluate, lattice_instance, parse_alphas, AnalysisSection, ChainSection, ChainSpecFile, Instance};

pub const VERIFY_TOL: f64 = 1e-9;
pub const BATCH_SIZE: u64 = 50;

/// Settings shared by the commands, after merging flags over the spec's
/// analysis block.
#[derive(Debug, Clone)]
pub struct Settings {
    pub alphas: Vec<Alpha>,
    pub kappa: f64,
}

impl Settings {
    pub fn resolve(section: &AnalysisSection, alpha_flag: Option<&[f64]>, kappa_flag: Option<f64>) -> CliResult<Self> {
        let alphas = match alpha_flag.or(section.alpha.as_deref()) {
            Some(values) => parse_alphas(values)?,
            None => Alpha::ALL.to_vec(),
        };
        let kappa = kappa_flag.or(section.kappa).unwrap_or(1.0);
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(CliError::Usage(format!("kappa {kappa} must be a finite number >= 1")));
        }
        Ok(Self { alphas, kappa })
    }
}

/// An evaluated analysis plus the family-level sections that do not fit
/// the certificate model.
struct Run {
    kind: &'static str,
    analysis: Analysis<f64>,
    extras: Map<String, Value>,
}

fn kind_name(spec: &ChainSpecFile) -> &'static str {
    match spec.chain {
        ChainSection::Explicit { .. } => "explicit",
        ChainSection::BirthDeath { .. } => "birth_death",
        ChainSection::Lattice { .. } => "lattice",
        ChainSection::Fixture { .. } => "fixture",
    }
}

fn run(spec: &ChainSpecFile, settings: &Settings) -> CliResult<Run> {
    let section = spec.analysis();
    let params = spec.params();
    let kind = kind_name(spec);
    match spec.instance()? {
        Instance::Form { form, labels } => {
            let analysis = run_form(&form, &labels, &section, &params, settings)?;
            Ok(Run {
                kind,
                analysis,
                extras: Map::new(),
            })
        }
        Instance::BirthDeath(bd) => run_birth_death(&bd, &section, &params, settings, kind),
    }
}

fn run_form(
    form: &Form,
    labels: &[i64],
    section: &AnalysisSection,
    params: &BTreeMap<String, f64>,
    settings: &Settings,
) -> CliResult<Analysis<f64>> {
    let n = form.n();
    let eval = |field: &str, source: &Option<String>| -> CliResult<Option<Vec<f64>>> {
        source
            .as_deref()
            .map(|s| evaluate(field, s, labels.iter().copied(), params))
            .transpose()
    };
    let total: Vec<f64> = (0..n).map(|i| form.total_rate(i)).collect();
    let options = AnalysisOptions {
        kappa: settings.kappa,
        tilt: eval("analysis.p", &section.p)?.or_else(|| default_tilt(total)),
        a: section.a.as_ref().map(|s| s.resolve(labels)).transpose()?,
        b: section.b.as_ref().map(|s| s.resolve(labels)).transpose()?,
        phi: eval("analysis.phi", &section.phi)?,
        ..AnalysisOptions::default()
    };
    analyze_form(form, &options).map_err(CliError::core("analysis"))
}

/// The total rates, the smallest tilt the change of measure accepts, when
/// all are positive.
fn default_tilt(total: Vec<f64>) -> Option<Vec<f64>> {
    total.iter().all(|&q| q > 0.0 && q.is_finite()).then_some(total)
}

/// End of a prefix set `{0, …, m}`.
fn prefix_end(set: &Subset, field: &str) -> CliResult<usize> {
    let members = set.members();
    match members.last() {
        Some(&m) if members.len() == m + 1 => Ok(m),
        _ => Err(CliError::Validation(format!(
            "{field} must be a prefix {{0, ..., m}} for a birth-death chain"
        ))),
    }
}

fn chain_of(spec: &BirthDeathSpec) -> CliResult<BirthDeath> {
    spec.rates().map_err(CliError::core("birth-death rates"))
}

/// Checkpoints `10, 100, …` below `levels`, then `levels` itself.
fn decades(levels: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(10usize), |m| m.checked_mul(10))
        .take_while(|&m| m < levels)
        .collect();
    out.push(levels);
    out
}

fn run_birth_death(
    spec: &BirthDeathSpec,
    section: &AnalysisSection,
    params: &BTreeMap<String, f64>,
    settings: &Settings,
    kind: &'static str,
) -> CliResult<Run> {
    let chain = chain_of(spec)?;
    let n = chain.len();
    let levels = spec.levels;
    let eval = |field: &str, source: &Option<String>| -> CliResult<Option<Vec<f64>>> {
        source
            .as_deref()
            .map(|s| evaluate(field, s, 0..n as i64, params))
            .transpose()
    };
    let labels: Vec<i64> = (0..n as i64).collect();
    let a_end = section
        .a
        .as_ref()
        .map(|s| s.resolve(&labels).and_then(|set| prefix_end(&set, "A")))
        .transpose()?;
    let b_end = section
        .b
        .as_ref()
        .map(|s| s.resolve(&labels).and_then(|set| prefix_end(&set, "B")))
        .transpose()?;
    let phi = eval("analysis.phi", &section.phi)?;
    let total: Vec<f64> = (0..n).map(|i| chain.death(i) + chain.birth(i)).collect();
    let options = BirthDeathOptions {
        kappa: settings.kappa,
        tilt: eval("analysis.p", &section.p)?.or_else(|| default_tilt(total)),
        sandwich: b_end.map(|b| (a_end.unwrap_or(0), b)),
        lyapunov: match (&phi, b_end) {
            (Some(phi), Some(b)) if b < levels => Some((phi.clone(), b + 1)),
            _ => None,
        },
    };
    let analysis = analyze_birth_death(&chain, &options).map_err(CliError::core("analysis"))?;

    let mut extras = Map::new();
    extras.insert("levels".into(), json!(levels));
    let checkpoints = decades(levels);
    extras.insert(
        "k_prime_trend".into(),
        settings
            .alphas
            .iter()
            .map(|&alpha| report::ratio_trend(alpha, &birth_death_kprime(&chain, alpha), &checkpoints))
            .collect(),
    );
    if let Some(phi) = &phi {
        let start = b_end.map_or((levels / 10).max(1), |b| b + 1);
        let end = levels.saturating_sub(1);
        let drift = if start <= end {
            birth_death_lyapunov_drift(&chain, phi, start, end).map_or_else(report::section_error, |d| report::drift(&d))
        } else {
            report::section_error(format!("drift window [{start}, {end}] is empty"))
        };
        extras.insert("drift".into(), drift);
        if let (Some(source), Some(eps)) = (&section.phi, &section.eps) {
            let expr = RateExpression::parse(source)
                .map_err(|e| CliError::Validation(format!("analysis.phi: {e}")))?
                .bind(params);
            extras.insert(
                "integrability".into(),
                eps.iter()
                    .map(|&e| {
                        integrability_probe(spec, &expr, e)
                            .map_or_else(report::section_error, |r| report::integrability(e, &r))
                    })
                    .collect(),
            );
        }
    }
    Ok(Run { kind, analysis, extras })
}

fn render(run: &Run, settings: &Settings) -> Value {
    let mut out = report::analysis(&run.analysis, &settings.alphas);
    out.insert("kind".into(), json!(run.kind));
    out.insert("kappa".into(), report::num(settings.kappa));
    out.extend(run.extras.clone());
    Value::Object(out)
}

pub fn analyze(spec: &ChainSpecFile, settings: &Settings) -> CliResult<Value> {
    Ok(render(&run(spec, settings)?, settings))
}

/// Verification result: a report and the number of violations.
pub struct Verdict {
    pub report: Value,
    pub violations: usize,
}

/// Appends a lower bound above the exact value, to check that the harness
/// notices.
fn corrupt(analysis: &mut Analysis<f64>) {
    let (target, exact) = match (&analysis.lambda1, &analysis.lambda0) {
        (Some(r), _) => (Target::Lambda1, r.value),
        (None, Some(r)) => (Target::Lambda0, r.value),
        (None, None) => return,
    };
    analysis.certificates.push(BoundCertificate {
        name: "corrupted",
        target,
        direction: Direction::Lower,
        value: 2.0 * exact.abs() + 1.0,
        inputs: BTreeMap::new(),
        vacuous: false,
        rescale: None,
        scope: Scope::Instance,
        note: Some("deliberately invalid".into()),
    });
}

fn violations_json(v: &[Violation<f64>]) -> Value {
    v.iter().map(report::violation).collect()
}

pub fn verify_spec(spec: &ChainSpecFile, settings: &Settings, corrupted: bool) -> CliResult<Verdict> {
    let mut run = run(spec, settings)?;
    if corrupted {
        corrupt(&mut run.analysis);
    }
    let violations = verify(&run.analysis, VERIFY_TOL);
    let report = json!({
        "kind": run.kind,
        "n": run.analysis.n,
        "certificates": run.analysis.certificates.len(),
        "violations": violations_json(&violations),
        "passed": violations.is_empty(),
    });
    Ok(Verdict {
        report,
        violations: violations.len(),
    })
}

/// Seeded batch of random chains with `n ≤ 12` and no killing.
pub fn verify_batch(seed: u64, settings: &Settings, corrupted: bool) -> CliResult<Verdict> {
    let config = RandomFormConfig::default();
    let mut rows = Vec::new();
    let mut total = 0;
    for s in seed..seed + BATCH_SIZE {
        let form: Form = random_form(s, &config).map_err(CliError::core(format!("random chain {s}")))?;
        let n = form.n();
        let mut options = AnalysisOptions {
            kappa: settings.kappa,
            ..AnalysisOptions::default()
        };
        if n >= 3 {
            options.a = Some(Subset::range(n, 0, 0));
            options.b = Some(Subset::range(n, 0, n - 2));
        }
        let mut analysis = analyze_form(&form, &options).map_err(CliError::core(format!("random chain {s}")))?;
        if corrupted && s == seed {
            corrupt(&mut analysis);
        }
        let violations = verify(&analysis, VERIFY_TOL);
        total += violations.len();
        if !violations.is_empty() {
            rows.push(json!({"seed": s, "n": n, "violations": violations_json(&violations)}));
        }
    }
    Ok(Verdict {
        report: json!({
            "seed": seed,
            "chains": BATCH_SIZE,
            "failures": rows,
            "passed": total == 0,
        }),
        violations: total,
    })
}

/// `start:stop:step` (inclusive) or a comma-separated list; empty means
/// no grid points.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("grid entry `{s}` is not a number")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').map(number).collect(),
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0) || stop < start {
                return Err(CliError::Usage(format!("grid `{text}` needs start <= stop and step > 0")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(CliError::Usage(format!("grid `{text}` must be start:stop:step or a list"))),
    }
}

pub const SWEEP_HEADER: &str = "param,N,lambda1_exact,one_sided_cheeger,local_sandwich_lower,exponential_moment_upper";

pub struct SweepArgs {
    pub param: Option<String>,
    pub grid: Vec<f64>,
    pub levels: Vec<usize>,
    pub eps_star: Option<f64>,
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v}"))
}

struct SweepRow {
    lambda1: f64,
    one_sided: Option<f64>,
    sandwich: Option<f64>,
    moment: Option<f64>,
}

fn sweep_birth_death(
    spec: &BirthDeathSpec,
    section: &AnalysisSection,
    params: &BTreeMap<String, f64>,
    levels: usize,
    eps_star: Option<f64>,
) -> CliResult<SweepRow> {
    let chain = chain_of(&spec.with_levels(levels))?;
    let n = chain.len();
    let lambda1 = birth_death_lambda1(&chain).map_err(CliError::core("eigenvalue"))?.value;
    let labels: Vec<i64> = (0..n as i64).collect();
    let end = |s: &Option<crate::spec::SubsetSpec>, field: &str| {
        s.as_ref()
            .map(|s| s.resolve(&labels).and_then(|set| prefix_end(&set, field)))
            .transpose()
    };
    let a_end = end(&section.a, "A")?.unwrap_or(0);
    let b_end = end(&section.b, "B")?.unwrap_or(levels / 2);
    let sandwich = birth_death_sandwich(&chain, a_end, b_end).ok().map(|s| s.lower.value);
    let moment = match (eps_star, &section.phi) {
        (Some(eps), Some(source)) => {
            let phi = evaluate("analysis.phi", source, 0..n as i64, params)?;
            birth_death_delta2_kernel(&chain, &phi)
                .and_then(|d| exponential_moment(d, eps))
                .ok()
                .map(|c| c.value)
        }
        _ => None,
    };
    Ok(SweepRow {
        lambda1,
        one_sided: Some(birth_death_one_sided(&chain).value),
        sandwich,
        moment,
    })
}

fn sweep_form(
    form: &Form,
    labels: &[i64],
    section: &AnalysisSection,
    params: &BTreeMap<String, f64>,
    eps_star: Option<f64>,
) -> CliResult<SweepRow> {
    let lambda1 = lambda1_exact(form).map_err(CliError::core("eigenvalue"))?.value;
    let one_sided = default_weights(form, Alpha::Half)
        .and_then(|p| one_sided_cheeger(form, &p))
        .ok()
        .map(|c| c.value);
    let moment = match (eps_star, &section.phi) {
        (Some(eps), Some(source)) => {
            let phi = evaluate("analysis.phi", source, labels.iter().copied(), params)?;
            delta2_kernel(form, &phi)
                .and_then(|d| exponential_moment(d, eps))
                .ok()
                .map(|c| c.value)
        }
        _ => None,
    };
    Ok(SweepRow {
        lambda1,
        one_sided,
        sandwich: None,
        moment,
    })
}

pub fn sweep(spec: &ChainSpecFile, args: &SweepArgs) -> CliResult<String> {
    let section = spec.analysis();
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    let points: Vec<Option<f64>> = match &args.param {
        Some(_) => args.grid.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    for point in points {
        let mut extra = BTreeMap::new();
        if let (Some(name), Some(value)) = (&args.param, point) {
            extra.insert(name.clone(), value);
        }
        let instance = spec.instance_with(&extra)?;
        let mut params = spec.params();
        params.extend(extra.clone());
        for &levels in &args.levels {
            let row = match (&instance, &spec.chain) {
                (Instance::BirthDeath(bd), _) => sweep_birth_death(bd, &section, &params, levels, args.eps_star)?,
                (Instance::Form { .. }, ChainSection::Lattice { .. }) => {
                    let ChainSection::Lattice { d, range, outward, inward, level, .. } = &spec.chain else {
                        unreachable!()
                    };
                    let mut lattice = specgap::forms::LatticeChainSpec::new(*d, levels, *range, outward, inward)
                        .map_err(CliError::core("lattice chain"))?;
                    if let Some(level) = level {
                        lattice.level = Some(
                            RateExpression::parse(level).map_err(|e| CliError::Validation(format!("chain.level: {e}")))?,
                        );
                    }
                    let Instance::Form { form, labels } = lattice_instance(&bind_lattice(&lattice, &params))? else {
                        unreachable!()
                    };
                    sweep_form(&form, &labels, &section, &params, args.eps_star)?
                }
                _ => {
                    return Err(CliError::Usage(
                        "sweep needs a birth-death or lattice chain".into(),
                    ))
                }
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                cell(point),
                levels,
                row.lambda1,
                cell(row.one_sided),
                cell(row.sandwich),
                cell(row.moment),
            ));
        }
    }
    Ok(out)
}

pub fn subsets(spec: &ChainSpecFile, settings: &Settings) -> CliResult<Value> {
    let form = match spec.instance()? {
        Instance::Form { form, .. } => form,
        Instance::BirthDeath(bd) => {
            let n = bd.levels + 1;
            if n > MAX_ENUMERATION {
                return Err(CliError::core("subsets")(specgap::Error::TooManyStates { n, max: MAX_ENUMERATION }));
            }
            chain_of(&bd)?.to_form().map_err(CliError::core("birth-death form"))?
        }
    };
    let n = form.n();
    if n > MAX_ENUMERATION {
        return Err(CliError::core("subsets")(specgap::Error::TooManyStates { n, max: MAX_ENUMERATION }));
    }
    let constants = settings
        .alphas
        .iter()
        .map(|&alpha| {
            let params = default_weights(&form, alpha).map_err(CliError::core("weights"))?;
            let c = enumerate_constants(&modified_form(&form, &params), alpha).map_err(CliError::core("enumeration"))?;
            Ok(report::constants(&c))
        })
        .collect::<CliResult<Vec<Value>>>()?;
    Ok(json!({ "n": n, "constants": constants }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::load;

    fn settings() -> Settings {
        Settings::resolve(&AnalysisSection::default(), None, None).unwrap()
    }

    #[test]
    fn grids() {
        assert!(parse_grid("").unwrap().is_empty());
        assert_eq!(parse_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_grid("1.2:3.0:0.2").unwrap().len(), 10);
        assert!(parse_grid("1:0:1").is_err());
    }

    #[test]
    fn decade_checkpoints() {
        assert_eq!(decades(2000), vec![10, 100, 1000, 2000]);
        assert_eq!(decades(5), vec![5]);
    }

    #[test]
    fn two_state_verifies() {
        let v = verify_spec(&load("@TwoState(0.5)").unwrap(), &settings(), false).unwrap();
        assert_eq!(v.violations, 0);
        let v = verify_spec(&load("@TwoState(0.5)").unwrap(), &settings(), true).unwrap();
        assert_eq!(v.violations, 1);
    }

    #[test]
    fn witness_for_lighter_state() {
        let report = subsets(&load("@TwoState(0.3)").unwrap(), &settings()).unwrap();
        assert_eq!(report["constants"][0]["witness_k_prime"], json!([0]));
    }

    #[test]
    fn kappa_range() {
        assert!(Settings::resolve(&AnalysisSection::default(), None, Some(0.5)).is_err());
        assert!(Settings::resolve(&AnalysisSection::default(), None, Some(1.5)).is_ok());
    }
}
