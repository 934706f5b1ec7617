use gdf_core::energytest::{
    failure_event_estimate_seeded, lemma36_probability_seeded, SourceModel, TestParams,
};
use gdf_core::parallel::McOptions;
use gdf_core::params::{compose_security, ProtocolInput};
use gdf_core::subspace::verify_definetti_seeded;
use gdf_core::{Error, LogReal};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{Cli, Command, Model, ParamsArgs, SimulateArgs, VerifyCommand};
use crate::suites::{gram_suite, invariance_suite, lgrc_suite, tails_suite};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_VERIFICATION_FAILED: u8 = 3;

/// A rendered report and the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: u8,
}

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub exit_code: u8,
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let exit_code = match e {
            Error::Precondition(_)
            | Error::TestModesTooFew { .. }
            | Error::DeFinettiInapplicable { .. }
            | Error::Unachievable => EXIT_INFEASIBLE,
            Error::IllConditionedGram { .. } | Error::TailTooLarge { .. } => EXIT_VERIFICATION_FAILED,
            _ => EXIT_USAGE,
        };
        CliError { message: e.to_string(), exit_code }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { message: message.into(), exit_code: EXIT_USAGE }
}

fn probability(name: &str, v: f64, allow_zero: bool) -> Result<LogReal, CliError> {
    let ok = if allow_zero { (0.0..1.0).contains(&v) } else { v > 0.0 && v < 1.0 };
    if !ok {
        let range = if allow_zero { "[0, 1)" } else { "(0, 1)" };
        return Err(usage(format!("--{name} = {v} must lie in {range}")));
    }
    Ok(LogReal::from_f64(v))
}

/// Serialize `body` and prepend the given header fields.
fn with_header<T: Serialize>(header: &[(&str, Value)], body: &T) -> Result<Value, CliError> {
    let body = serde_json::to_value(body).map_err(|e| usage(e.to_string()))?;
    let mut map = Map::new();
    for (k, v) in header {
        map.insert((*k).to_string(), v.clone());
    }
    match body {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("report".into(), other);
        }
    }
    Ok(Value::Object(map))
}

fn verdict(passed: bool) -> u8 {
    if passed { EXIT_PASS } else { EXIT_VERIFICATION_FAILED }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let options = McOptions::with_threads(cli.global.threads);
    let seed = cli.global.seed;
    match &cli.command {
        Command::Params(a) => params(a),
        Command::Verify(v) => verify(v, seed, &options),
        Command::Simulate(a) => simulate(a, seed, &options),
    }
}

fn params(a: &ParamsArgs) -> Result<Outcome, CliError> {
    let input = ProtocolInput {
        n: a.n,
        k: a.k,
        d_a: a.da,
        d_b: a.db,
        eps_coll: probability("eps-coll", a.eps_coll, true)?,
        eps_test: probability("eps-test", a.eps_test, false)?,
    };
    let derived = compose_security(&input)?;
    let exit_code = if derived.feasible { EXIT_PASS } else { EXIT_INFEASIBLE };
    let input_value = serde_json::to_value(input).map_err(|e| usage(e.to_string()))?;
    let report = with_header(&[("command", "params".into()), ("input", input_value)], &derived)?;
    Ok(Outcome { report, exit_code })
}

fn verify(v: &VerifyCommand, seed: u64, options: &McOptions) -> Result<Outcome, CliError> {
    let (suite, report, passed) = match v {
        VerifyCommand::Definetti(a) => {
            let r = verify_definetti_seeded(a.n, a.cutoff, a.eta, a.samples, seed, options)?;
            let passed = r.passed;
            ("definetti", with_header(&[], &r)?, passed)
        }
        VerifyCommand::Gram(a) => {
            let r = gram_suite(a.n, a.cutoff)?;
            ("gram", with_header(&[], &r)?, r.passed)
        }
        VerifyCommand::Tails(a) => {
            let r = tails_suite(a.k_max, a.n_max, a.grid, a.pinsker_grid)?;
            ("tails", with_header(&[], &r)?, r.passed)
        }
        VerifyCommand::Lgrc(a) => {
            let r = lgrc_suite(a.n_max, a.d_max, a.d_step, a.extra)?;
            ("lgrc", with_header(&[], &r)?, r.passed)
        }
        VerifyCommand::Invariance(a) => {
            let r = invariance_suite(a.n, a.degree, a.trials, seed)?;
            ("invariance", with_header(&[], &r)?, r.passed)
        }
    };
    let report = with_header(
        &[("command", "verify".into()), ("suite", suite.into()), ("seed", seed.into())],
        &report,
    )?;
    Ok(Outcome { report, exit_code: verdict(passed) })
}

#[derive(Serialize)]
struct SimulationReport {
    failure_event: gdf_core::energytest::FailureEstimate,
    lemma36: gdf_core::energytest::Lemma36Estimate,
    passed: bool,
}

fn simulate(a: &SimulateArgs, seed: u64, options: &McOptions) -> Result<Outcome, CliError> {
    let params = TestParams { n: a.n, k: a.k, d_a: a.da, d_b: a.db };
    let eps_test = probability("eps-test", a.eps_test, false)?;
    let mean_b = a.mean_photons_b.unwrap_or(a.mean_photons);
    let source = match a.model {
        Model::Thermal => SourceModel::Thermal { mean_a: a.mean_photons, mean_b },
        Model::Concentrated => SourceModel::Concentrated { mean_a: a.mean_photons, mean_b },
    };
    let failure_event = failure_event_estimate_seeded(&params, source, eps_test, a.trials, seed, options)?;
    // The failure event uses d' = g(n, k, eps_test / 4) d, so the matching
    // chi-square event is evaluated at eps_test / 4.
    let lemma36 = lemma36_probability_seeded(
        a.n,
        a.k,
        a.da,
        eps_test.scale(0.25),
        a.trials,
        seed.wrapping_add(1),
        options,
    )?;
    let passed = failure_event.passed && lemma36.passed;
    let body = SimulationReport { failure_event, lemma36, passed };
    let report = with_header(&[("command", "simulate".into()), ("seed", seed.into())], &body)?;
    Ok(Outcome { report, exit_code: verdict(passed) })
}
