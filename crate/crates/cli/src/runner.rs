//! Scenario execution: drives the core suites and experiments and assembles
//! reports.

use convact_core::approx::{
    approximate_action, ApproxError, ApproximationRequest, PinnedConstraint,
};
use convact_core::circle::Angle;
use convact_core::convolution::FubiniBudgets;
use convact_core::ellis::{ellis_equality_check, EllisCheckConfig};
use convact_core::io::angle_point;
use convact_core::laws::{
    circle_fubini_suite, circle_invariance_suite, finite_verify_suites, SuiteResult,
};
use convact_core::sampled::{SampledMeasure, DEFAULT_DELTA};
use convact_core::system::{CircleRotation, FiniteSystem, PointIndex};
use convact_core::testfn::{circle_catalog, finite_catalog};
use convact_core::weight::{ratio, Rational};
use convact_core::FiniteMeasure;

use crate::config::{
    parse_scalar_f64, ApproximateParams, CommandParams, ConfigError, MeasureSpec, Mode, Scenario,
    SystemSpec, TargetSpec, VerifyParams,
};
use crate::report::{ApproximationSection, Provenance, Report};

/// Execution failure, mapped onto the documented exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Exit 1: configuration or usage problems.
    Config(ConfigError),
    /// Exit 3: the approximation request cannot be satisfied by any draw.
    Unsolvable(String),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Unsolvable(message) => write!(f, "unsolvable request: {message}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Run one scenario to a report. `report.passed` drives the exit status.
pub fn run_scenario(scenario: &Scenario) -> Result<Report, RunError> {
    let provenance = Provenance::of(scenario);
    match &scenario.params {
        CommandParams::Verify(params) => run_verify(scenario, params, provenance),
        CommandParams::Approximate(params) => run_approximate(scenario, params, provenance),
        CommandParams::Ellis(params) => run_ellis(scenario, params, provenance),
    }
}

fn run_verify(
    scenario: &Scenario,
    params: &VerifyParams,
    provenance: Provenance,
) -> Result<Report, RunError> {
    let suites: Vec<SuiteResult> = match &scenario.system {
        SystemSpec::Finite { system, .. } => match scenario.mode {
            Mode::Exact => finite_verify_suites::<Rational>(
                system,
                params.cases,
                scenario.seed,
                &ratio(0, 1),
            ),
            Mode::Float => {
                finite_verify_suites::<f64>(system, params.cases, scenario.seed, &params.tolerance)
            }
        },
        SystemSpec::Circle => vec![
            circle_fubini_suite(
                params.cases,
                scenario.seed,
                FubiniBudgets::default(),
                DEFAULT_DELTA,
                0.95,
            ),
            circle_invariance_suite(200, scenario.seed, params.tolerance.max(1e-12)),
        ],
    };
    let passed = suites.iter().all(|s| s.passed);
    Ok(Report {
        provenance,
        passed,
        suites: Some(suites),
        approximation: None,
        ellis: None,
    })
}

fn run_approximate(
    scenario: &Scenario,
    params: &ApproximateParams,
    provenance: Provenance,
) -> Result<Report, RunError> {
    if scenario.mode != Mode::Float {
        return Err(RunError::Config(ConfigError::Invalid(
            "approximation experiments are statistical; use mode = \"float\"".to_string(),
        )));
    }
    let section = match &scenario.system {
        SystemSpec::Circle => approximate_on_circle(scenario, params)?,
        SystemSpec::Finite { system, .. } => approximate_on_finite(scenario, params, system)?,
    };
    let passed = section.inside;
    Ok(Report {
        provenance,
        passed,
        suites: None,
        approximation: Some(section),
        ellis: None,
    })
}

fn approximate_on_circle(
    scenario: &Scenario,
    params: &ApproximateParams,
) -> Result<ApproximationSection, RunError> {
    let mut constraints = Vec::with_capacity(params.constraints.len());
    for spec in &params.constraints {
        let test_fn = circle_catalog(&spec.test_fn)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        constraints.push(PinnedConstraint::<CircleRotation, f64> {
            anchor: angle_measure(&spec.anchor)?,
            test_fn,
            lower: parse_scalar_f64(&spec.lower)?,
            upper: parse_scalar_f64(&spec.upper)?,
        });
    }
    let request = ApproximationRequest {
        constraints,
        epsilon: params.epsilon,
        delta: params.delta,
        max_attempts: params.max_attempts,
        estimate_budget: params.estimate_budget,
    };
    let outcome = match &params.target {
        TargetSpec::Uniform => {
            approximate_action(&CircleRotation, &SampledMeasure::uniform(), &request, scenario.seed)
        }
        TargetSpec::Finite(spec) => {
            let target = angle_measure(spec)?;
            approximate_action(&CircleRotation, &target, &request, scenario.seed)
        }
    }
    .map_err(map_approx_error)?;
    Ok(ApproximationSection {
        samples_per_attempt: outcome.samples_per_attempt,
        attempts_used: outcome.attempts.len() as u64,
        inside: outcome.inside,
        attempts: outcome.attempts,
    })
}

fn approximate_on_finite(
    scenario: &Scenario,
    params: &ApproximateParams,
    system: &FiniteSystem,
) -> Result<ApproximationSection, RunError> {
    let mut constraints = Vec::with_capacity(params.constraints.len());
    for spec in &params.constraints {
        let test_fn = finite_catalog::<f64>(&spec.test_fn, system.space_size())
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        constraints.push(PinnedConstraint::<FiniteSystem, f64> {
            anchor: point_measure(&spec.anchor, system.space_size())?,
            test_fn,
            lower: parse_scalar_f64(&spec.lower)?,
            upper: parse_scalar_f64(&spec.upper)?,
        });
    }
    let request = ApproximationRequest {
        constraints,
        epsilon: params.epsilon,
        delta: params.delta,
        max_attempts: params.max_attempts,
        estimate_budget: params.estimate_budget,
    };
    let TargetSpec::Finite(spec) = &params.target else {
        return Err(RunError::Config(ConfigError::Invalid(
            "finite systems need a finite target measure".to_string(),
        )));
    };
    let target = group_measure(spec, system)?;
    let outcome =
        approximate_action(system, &target, &request, scenario.seed).map_err(map_approx_error)?;
    Ok(ApproximationSection {
        samples_per_attempt: outcome.samples_per_attempt,
        attempts_used: outcome.attempts.len() as u64,
        inside: outcome.inside,
        attempts: outcome.attempts,
    })
}

fn map_approx_error(err: ApproxError) -> RunError {
    match err {
        ApproxError::Unsolvable { .. } => RunError::Unsolvable(err.to_string()),
        other => RunError::Config(ConfigError::Invalid(other.to_string())),
    }
}

fn run_ellis(
    scenario: &Scenario,
    params: &crate::config::EllisParams,
    provenance: Provenance,
) -> Result<Report, RunError> {
    let SystemSpec::Finite { system, .. } = &scenario.system else {
        return Err(RunError::Config(ConfigError::Invalid(
            "the enveloping-semigroup check needs a finite system".to_string(),
        )));
    };
    if scenario.mode != Mode::Exact {
        return Err(RunError::Config(ConfigError::Invalid(
            "the enveloping-semigroup check is exact; use mode = \"exact\"".to_string(),
        )));
    }
    let report = ellis_equality_check::<Rational>(
        system,
        EllisCheckConfig {
            grid_denominator: params.grid_denominator,
            max_group_order: params.max_group_order,
        },
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let passed =
        report.all_decomposed && (!report.reconstruction_unique || report.reconstructions_matched);
    Ok(Report {
        provenance,
        passed,
        suites: None,
        approximation: None,
        ellis: Some(report),
    })
}

fn angle_measure(spec: &MeasureSpec) -> Result<FiniteMeasure<Angle, f64>, RunError> {
    build_measure(spec, |text| {
        angle_point(text).map_err(|e| RunError::Config(ConfigError::Invalid(e)))
    })
}

fn point_measure(
    spec: &MeasureSpec,
    space_size: usize,
) -> Result<FiniteMeasure<PointIndex, f64>, RunError> {
    build_measure(spec, |text| {
        convact_core::io::index_point(space_size)(text)
            .map_err(|e| RunError::Config(ConfigError::Invalid(e)))
    })
}

fn group_measure(
    spec: &MeasureSpec,
    system: &FiniteSystem,
) -> Result<FiniteMeasure<convact_core::GroupIndex, f64>, RunError> {
    build_measure(spec, |text| {
        let index: usize = text
            .parse()
            .map_err(|_| RunError::Config(ConfigError::Invalid(format!("bad element '{text}'"))))?;
        if index >= system.group().order() {
            return Err(RunError::Config(ConfigError::Invalid(format!(
                "element {index} out of group order {}",
                system.group().order()
            ))));
        }
        Ok(convact_core::GroupIndex(index))
    })
}

fn build_measure<P: convact_core::system::Point>(
    spec: &MeasureSpec,
    parse_point: impl Fn(&str) -> Result<P, RunError>,
) -> Result<FiniteMeasure<P, f64>, RunError> {
    if spec.points.len() != spec.weights.len() {
        return Err(RunError::Config(ConfigError::Invalid(format!(
            "measure spec has {} points but {} weights",
            spec.points.len(),
            spec.weights.len()
        ))));
    }
    let mut entries = Vec::with_capacity(spec.points.len());
    for (p, w) in spec.points.iter().zip(&spec.weights) {
        entries.push((parse_point(p)?, parse_scalar_f64(w)?));
    }
    FiniteMeasure::new(entries)
        .map_err(|e| RunError::Config(ConfigError::Invalid(format!("measure spec: {e}"))))
}
