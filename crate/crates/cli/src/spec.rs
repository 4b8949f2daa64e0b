//! Chain-spec files: a `[chain]` section holding exactly one chain kind and
//! an optional `[analysis]` section.
//!
//! ```toml
//! [chain]
//! kind = "birth_death"
//! a = "i^$gamma"
//! b = "i^$gamma"
//! N = 2000
//!
//! [analysis]
//! A = [0, 1, 2]
//! B = "i<=1500"
//! phi = "sqrt(i)"
//! alpha = [0, 0.5, 1]
//! params = { gamma = 2.0 }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use specgap::expr::{ExprError, RateExpression};
use specgap::forms::fixtures::{build_fixture, Fixture};
use specgap::forms::{ form_from_rates, BirthDeathSpec, LatticeChainSpec};
use specgap::{Chain, Form, Subset};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpecFile {
    pub chain: ChainSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainSection {
    /// Sparse rates `q_ij` as `[i, j, rate]` triples, optional killing rates
    /// `d` and an optional reference measure (solved from detailed balance
    /// when absent).
    Explicit {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pi: Option<Vec<f64>>,
        q: Vec<(usize, usize, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<Vec<f64>>,
    },
    BirthDeath {
        a: String,
        b: String,
        #[serde(rename = "N")]
        levels: usize,
    },
    Lattice {
        d: usize,
        #[serde(rename = "L")]
        radius: usize,
        #[serde(rename = "R")]
        range: usize,
        outward: String,
        inward: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<String>,
    },
    /// A built-in family such as `Star(0.4, 50)`.
    Fixture { name: String },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<SubsetSpec>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<SubsetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Values for `$name` placeholders in every expression.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<BTreeMap<String, f64>>,
}

/// Explicit indices, or a predicate on the index such as `i<=10`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubsetSpec {
    Indices(Vec<usize>),
    Predicate(String),
}

impl SubsetSpec {
    /// Index lists refer to states; predicates are tested on each state's
    /// label (the index, or `|x|₁` on a lattice).
    pub fn resolve(&self, labels: &[i64]) -> CliResult<Subset> {
        let n = labels.len();
        match self {
            Self::Indices(list) => {
                if let Some(&bad) = list.iter().find(|&&i| i >= n) {
                    return Err(CliError::Validation(format!("subset index {bad} out of range for {n} states")));
                }
                Subset::new(n, list.iter().copied()).map_err(CliError::core("subset"))
            }
            Self::Predicate(text) => {
                let test = parse_predicate(text)?;
                Ok(Subset::from_mask(labels.iter().map(|&i| test(i)).collect()))
            }
        }
    }
}

fn parse_predicate(text: &str) -> CliResult<impl Fn(i64) -> bool> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Validation(format!("subset predicate `{text}` must look like `i<=m`"));
    let rest = compact.strip_prefix('i').ok_or_else(bad)?;
    let (op, bound) = ["<=", ">=", "==", "<", ">"]
        .iter()
        .find_map(|op| rest.strip_prefix(op).map(|b| (*op, b)))
        .ok_or_else(bad)?;
    let m: i64 = bound.parse().map_err(|_| bad())?;
    Ok(move |i: i64| match op {
        "<=" => i <= m,
        ">=" => i >= m,
        "==" => i == m,
        "<" => i < m,
        _ => i > m,
    })
}

impl ChainSpecFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |span| line_column(text, span.start));
            CliError::Syntax {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec structures always serialise")
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        self.analysis.as_ref().and_then(|a| a.params.clone()).unwrap_or_default()
    }

    fn validate(&self) -> CliResult<()> {
        let mut expressions: Vec<(&str, &str)> = Vec::new();
        match &self.chain {
            ChainSection::Explicit { n, pi, q, d } => {
                if *n == 0 {
                    return Err(CliError::Validation("n must be positive".into()));
                }
                for &(i, j, rate) in q {
                    if i >= *n || j >= *n {
                        return Err(CliError::Validation(format!("rate ({i}, {j}) out of range for {n} states")));
                    }
                    if !(rate >= 0.0) || !rate.is_finite() {
                        return Err(CliError::Validation(format!("rate ({i}, {j}) = {rate} is not a nonnegative number")));
                    }
                }
                for (name, list) in [("pi", pi), ("d", d)] {
                    if let Some(list) = list {
                        if list.len() != *n {
                            return Err(CliError::Validation(format!("{name} has {} entries, expected {n}", list.len())));
                        }
                        if list.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                            return Err(CliError::Validation(format!("{name} has a negative or non-finite entry")));
                        }
                    }
                }
            }
            ChainSection::BirthDeath { a, b, levels } => {
                if *levels == 0 {
                    return Err(CliError::Validation("N must be positive".into()));
                }
                expressions.extend([("chain.a", a.as_str()), ("chain.b", b.as_str())]);
            }
            ChainSection::Lattice {
                outward, inward, level, ..
            } => {
                expressions.extend([("chain.outward", outward.as_str()), ("chain.inward", inward.as_str())]);
                if let Some(level) = level {
                    expressions.push(("chain.level", level.as_str()));
                }
            }
            ChainSection::Fixture { name } => {
                parse_fixture_call(name)?;
            }
        }
        if let Some(analysis) = &self.analysis {
            for (field, value) in [("analysis.phi", &analysis.phi), ("analysis.p", &analysis.p)] {
                if let Some(value) = value {
                    expressions.push((field, value.as_str()));
                }
            }
            for subset in [&analysis.a, &analysis.b].into_iter().flatten() {
                if let SubsetSpec::Predicate(text) = subset {
                    let _ = parse_predicate(text)?;
                }
            }
            if let Some(alpha) = &analysis.alpha {
                parse_alphas(alpha)?;
            }
        }
        for (field, source) in expressions {
            RateExpression::parse(source).map_err(|e| expression_error(field, e))?;
        }
        Ok(())
    }

    /// Builds the instance, binding `$name` placeholders from the analysis
    /// block.
    pub fn instance(&self) -> CliResult<Instance> {
        self.instance_with(&BTreeMap::new())
    }

    /// [`Self::instance`] with extra placeholder values, which take
    /// precedence over the analysis block.
    pub fn instance_with(&self, extra: &BTreeMap<String, f64>) -> CliResult<Instance> {
        let mut params = self.params();
        params.extend(extra.iter().map(|(k, v)| (k.clone(), *v)));
        let instance = match &self.chain {
            ChainSection::Explicit { n, pi, q, d } => {
                let defect = d.clone().unwrap_or_else(|| vec![0.0; *n]);
                let chain = match pi {
                    Some(pi) => Chain::new(pi.clone(), q.iter().copied(), defect),
                    None => Chain::from_rates(*n, q.iter().copied(), defect),
                }
                .map_err(CliError::core("explicit chain"))?;
                let form = form_from_rates(&chain).map_err(CliError::core("explicit chain"))?;
                Instance::form(form)
            }
            ChainSection::BirthDeath { a, b, levels } => {
                let spec = BirthDeathSpec::new(a, b, *levels).map_err(CliError::core("birth-death chain"))?;
                Instance::BirthDeath(spec.bind(&params))
            }
            ChainSection::Lattice {
                d,
                radius,
                range,
                outward,
                inward,
                level,
            } => {
                let mut spec = LatticeChainSpec::new(*d, *radius, *range, outward, inward)
                    .map_err(CliError::core("lattice chain"))?;
                if let Some(level) = level {
                    spec.level = Some(RateExpression::parse(level).map_err(|e| expression_error("chain.level", e))?);
                }
                lattice_instance(&bind_lattice(&spec, &params))?
            }
            ChainSection::Fixture { name } => fixture_instance(name)?,
        };
        Ok(instance)
    }

    pub fn analysis(&self) -> AnalysisSection {
        self.analysis.clone().unwrap_or_default()
    }
}

pub fn bind_lattice(spec: &LatticeChainSpec, params: &BTreeMap<String, f64>) -> LatticeChainSpec {
    LatticeChainSpec {
        outward: spec.outward.bind(params),
        inward: spec.inward.bind(params),
        level: spec.level.as_ref().map(|l| l.bind(params)),
        ..spec.clone()
    }
}

pub fn lattice_instance(spec: &LatticeChainSpec) -> CliResult<Instance> {
    let chain = spec.build::<f64>().map_err(CliError::core("lattice chain"))?;
    let form = form_from_rates(&chain).map_err(CliError::core("lattice chain"))?;
    let labels = (0..spec.n())
        .map(|k| LatticeChainSpec::norm1(&spec.site(k)))
        .collect();
    Ok(Instance::Form { form, labels })
}

fn expression_error(field: &str, e: ExprError) -> CliError {
    match e {
        ExprError::Syntax { message, line, column } => CliError::Syntax {
            line,
            column,
            message: format!("{field}: {message}"),
        },
        other => CliError::Validation(format!("{field}: {other}")),
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn parse_alphas(values: &[f64]) -> CliResult<Vec<specgap::forms::Alpha>> {
    values
        .iter()
        .map(|&x| {
            specgap::forms::Alpha::from_f64(x)
                .ok_or_else(|| CliError::Validation(format!("alpha {x} is not one of 0, 0.5, 1")))
        })
        .collect()
}

/// `Name(p1, p2, ...)` with numeric parameters.
pub fn parse_fixture_call(text: &str) -> CliResult<(String, Vec<f64>)> {
    let text = text.trim();
    let bad = || CliError::Validation(format!("fixture `{text}` must look like Name(1, 2)"));
    let (name, rest) = text.split_once('(').ok_or_else(bad)?;
    let inner = rest.strip_suffix(')').ok_or_else(bad)?;
    let params = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<CliResult<Vec<f64>>>()?
    };
    Ok((name.trim().to_string(), params))
}

fn fixture_instance(call: &str) -> CliResult<Instance> {
    let (name, params) = parse_fixture_call(call)?;
    match build_fixture::<f64>(&name, &params).map_err(CliError::core(format!("fixture {call}")))? {
        Fixture::Form(form) => Ok(Instance::form(form)),
        Fixture::BirthDeath(spec) => Ok(Instance::BirthDeath(spec)),
    }
}

/// A spec path, or `@Name(params)` for a built-in fixture.
pub fn load(argument: &str) -> CliResult<ChainSpecFile> {
    if let Some(call) = argument.strip_prefix('@') {
        let spec = ChainSpecFile {
            chain: ChainSection::Fixture { name: call.to_string() },
            analysis: None,
        };
        spec.validate()?;
        return Ok(spec);
    }
    let text = std::fs::read_to_string(argument).map_err(|source| CliError::Io {
        path: argument.to_string(),
        source,
    })?;
    ChainSpecFile::parse(&text)
}

/// A finite form with per-state labels (the index, or `|x|₁` on a lattice)
/// at which analysis expressions are evaluated, or a birth-death family.
#[derive(Debug, Clone)]
pub enum Instance {
    Form { form: Form, labels: Vec<i64> },
    BirthDeath(BirthDeathSpec),
}

impl Instance {
    fn form(form: Form) -> Self {
        let labels = (0..form.n() as i64).collect();
        Self::Form { form, labels }
    }
}

/// Evaluates an expression at each label.
pub fn evaluate(field: &str, source: &str, labels: impl Iterator<Item = i64>, params: &BTreeMap<String, f64>) -> CliResult<Vec<f64>> {
    let expr = RateExpression::parse(source)
        .map_err(|e| expression_error(field, e))?
        .bind(params);
    labels
        .map(|i| expr.eval(i).map_err(|e| expression_error(field, e)))
        .collect()
}
