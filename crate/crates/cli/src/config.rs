//! Scenario configuration: TOML schema, resolution of config names, and the
//! built-in scenario catalog.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use convact_core::builtin;
use convact_core::io::parse_system;
use convact_core::system::FiniteSystem;

/// Environment variable naming the default scenario directory.
pub const SCENARIO_DIR_ENV: &str = "CONVACT_SCENARIO_DIR";

/// Names accepted by the built-in catalog.
pub const BUILTIN_SCENARIOS: [&str; 5] = [
    "z2-swap",
    "z3-rotation",
    "s3-natural",
    "dihedral-4",
    "circle-rotation-uniform",
];

#[derive(Debug)]
pub enum ConfigError {
    NotFound(String),
    Io(PathBuf, std::io::Error),
    Toml(String, toml::de::Error),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::NotFound(name) => write!(
                f,
                "config '{name}' is not a file, not in ${SCENARIO_DIR_ENV}, and not a built-in scenario"
            ),
            ConfigError::Io(path, err) => write!(f, "cannot read {}: {err}", path.display()),
            ConfigError::Toml(name, err) => write!(f, "config '{name}': {err}"),
            ConfigError::Invalid(message) => write!(f, "misconfiguration: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: String,
    seed: Option<u64>,
    mode: Option<Mode>,
    system: RawSystem,
    verify: Option<RawVerify>,
    approximate: Option<RawApproximate>,
    ellis: Option<RawEllis>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    builtin: Option<String>,
    table: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    cases: Option<u64>,
    tolerance: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawApproximate {
    epsilon: f64,
    delta: f64,
    max_attempts: Option<u32>,
    estimate_budget: Option<u64>,
    constraint: Vec<RawConstraint>,
    target: Option<RawTarget>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    test_fn: String,
    lower: String,
    upper: String,
    anchor: RawMeasure,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    points: Vec<String>,
    weights: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    kind: String,
    points: Option<Vec<String>>,
    weights: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEllis {
    grid_denominator: Option<u64>,
    max_group_order: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<String>,
    format: Option<ReportFormat>,
}

/// The system a scenario runs on.
#[derive(Clone, Debug)]
pub enum SystemSpec {
    Finite { name: String, system: FiniteSystem },
    Circle,
}

impl SystemSpec {
    pub fn name(&self) -> &str {
        match self {
            SystemSpec::Finite { name, .. } => name,
            SystemSpec::Circle => "circle-rotation",
        }
    }
}

/// A plain-text measure spec (point strings and scalar strings), interpreted
/// against the system and mode at run time.
#[derive(Clone, Debug, Default)]
pub struct MeasureSpec {
    pub points: Vec<String>,
    pub weights: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ConstraintSpec {
    pub test_fn: String,
    pub lower: String,
    pub upper: String,
    pub anchor: MeasureSpec,
}

#[derive(Clone, Debug)]
pub enum TargetSpec {
    Uniform,
    Finite(MeasureSpec),
}

#[derive(Clone, Debug)]
pub struct VerifyParams {
    pub cases: u64,
    pub tolerance: f64,
}

#[derive(Clone, Debug)]
pub struct ApproximateParams {
    pub epsilon: f64,
    pub delta: f64,
    pub max_attempts: u32,
    pub estimate_budget: u64,
    pub constraints: Vec<ConstraintSpec>,
    pub target: TargetSpec,
}

#[derive(Clone, Debug)]
pub struct EllisParams {
    pub grid_denominator: u64,
    pub max_group_order: usize,
}

#[derive(Clone, Debug)]
pub enum CommandParams {
    Verify(VerifyParams),
    Approximate(ApproximateParams),
    Ellis(EllisParams),
}

impl CommandParams {
    pub fn name(&self) -> &'static str {
        match self {
            CommandParams::Verify(_) => "verify",
            CommandParams::Approximate(_) => "approximate",
            CommandParams::Ellis(_) => "ellis",
        }
    }
}

/// A fully resolved scenario, ready to run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub label: String,
    pub system: SystemSpec,
    pub mode: Mode,
    pub seed: u64,
    pub params: CommandParams,
    pub output_path: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Scenario {
    /// Canonical description of the effective configuration; its SHA-256 is
    /// the provenance hash carried by reports.
    pub fn canonical_text(&self) -> String {
        let mut out = format!(
            "command={}\nsystem={}\nmode={}\nseed={}\n",
            self.params.name(),
            self.system.name(),
            self.mode,
            self.seed
        );
        match &self.params {
            CommandParams::Verify(v) => {
                out.push_str(&format!("cases={}\ntolerance={}\n", v.cases, v.tolerance));
            }
            CommandParams::Approximate(a) => {
                out.push_str(&format!(
                    "epsilon={}\ndelta={}\nmax_attempts={}\nestimate_budget={}\n",
                    a.epsilon, a.delta, a.max_attempts, a.estimate_budget
                ));
                for c in &a.constraints {
                    out.push_str(&format!(
                        "constraint={};{};{};points={};weights={}\n",
                        c.test_fn,
                        c.lower,
                        c.upper,
                        c.anchor.points.join(","),
                        c.anchor.weights.join(",")
                    ));
                }
                match &a.target {
                    TargetSpec::Uniform => out.push_str("target=uniform\n"),
                    TargetSpec::Finite(m) => out.push_str(&format!(
                        "target=finite;points={};weights={}\n",
                        m.points.join(","),
                        m.weights.join(",")
                    )),
                }
            }
            CommandParams::Ellis(e) => {
                out.push_str(&format!(
                    "grid_denominator={}\nmax_group_order={}\n",
                    e.grid_denominator, e.max_group_order
                ));
            }
        }
        out
    }
}

/// Command-line overrides applied to whatever the config file says.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub format: Option<ReportFormat>,
}

/// Resolve a `--config` value: an existing path, a file under
/// `$CONVACT_SCENARIO_DIR`, or a built-in catalog name.
pub fn load_scenario(
    name: &str,
    expected_command: &str,
    overrides: &Overrides,
) -> Result<Scenario, ConfigError> {
    if let Some(text) = read_config_text(name)? {
        let raw: RawConfig =
            toml::from_str(&text).map_err(|e| ConfigError::Toml(name.to_string(), e))?;
        return resolve(name, raw, expected_command, overrides);
    }
    if BUILTIN_SCENARIOS.contains(&name) {
        return builtin_scenario(name, expected_command, overrides);
    }
    Err(ConfigError::NotFound(name.to_string()))
}

fn read_config_text(name: &str) -> Result<Option<String>, ConfigError> {
    let direct = Path::new(name);
    if direct.is_file() {
        return std::fs::read_to_string(direct)
            .map(Some)
            .map_err(|e| ConfigError::Io(direct.to_path_buf(), e));
    }
    if !name.contains(std::path::MAIN_SEPARATOR) {
        if let Ok(dir) = std::env::var(SCENARIO_DIR_ENV) {
            for candidate in [
                Path::new(&dir).join(name),
                Path::new(&dir).join(format!("{name}.toml")),
            ] {
                if candidate.is_file() {
                    return std::fs::read_to_string(&candidate)
                        .map(Some)
                        .map_err(|e| ConfigError::Io(candidate.clone(), e));
                }
            }
        }
    }
    Ok(None)
}

fn resolve(
    label: &str,
    raw: RawConfig,
    expected_command: &str,
    overrides: &Overrides,
) -> Result<Scenario, ConfigError> {
    if raw.command != expected_command {
        return Err(ConfigError::Invalid(format!(
            "config '{label}' declares command '{}' but was passed to '{expected_command}'",
            raw.command
        )));
    }
    let system = resolve_system(&raw.system)?;
    let is_circle = matches!(system, SystemSpec::Circle);
    let mode = overrides.mode.or(raw.mode).unwrap_or(if is_circle {
        Mode::Float
    } else {
        Mode::Exact
    });
    if is_circle && mode == Mode::Exact {
        return Err(ConfigError::Invalid(
            "circle scenarios are sampler-backed; use mode = \"float\"".to_string(),
        ));
    }
    let seed = overrides.seed.or(raw.seed).unwrap_or(0);
    let params = match raw.command.as_str() {
        "verify" => {
            let section = raw.verify.unwrap_or(RawVerify { cases: None, tolerance: None });
            let tolerance = section.tolerance.unwrap_or(match mode {
                Mode::Exact => 0.0,
                Mode::Float => 1e-9,
            });
            if mode == Mode::Float && tolerance == 0.0 {
                return Err(ConfigError::Invalid(
                    "float mode with tolerance 0 cannot distinguish rounding from violations; \
                     set a positive tolerance"
                        .to_string(),
                ));
            }
            if mode == Mode::Exact && tolerance != 0.0 {
                return Err(ConfigError::Invalid(
                    "exact mode verifies with equality; remove the tolerance".to_string(),
                ));
            }
            CommandParams::Verify(VerifyParams {
                cases: section.cases.unwrap_or(200),
                tolerance,
            })
        }
        "approximate" => {
            let section = raw.approximate.ok_or_else(|| {
                ConfigError::Invalid(format!("config '{label}' needs an [approximate] section"))
            })?;
            if section.constraint.is_empty() {
                return Err(ConfigError::Invalid(
                    "approximate needs at least one [[approximate.constraint]]".to_string(),
                ));
            }
            let target = match section.target {
                None => TargetSpec::Uniform,
                Some(t) => match t.kind.as_str() {
                    "uniform" => TargetSpec::Uniform,
                    "finite" => TargetSpec::Finite(MeasureSpec {
                        points: t.points.unwrap_or_default(),
                        weights: t.weights.unwrap_or_default(),
                    }),
                    other => {
                        return Err(ConfigError::Invalid(format!(
                            "unknown target kind '{other}' (use 'uniform' or 'finite')"
                        )))
                    }
                },
            };
            if matches!(target, TargetSpec::Uniform) && !is_circle {
                return Err(ConfigError::Invalid(
                    "target kind 'uniform' needs the circle system".to_string(),
                ));
            }
            CommandParams::Approximate(ApproximateParams {
                epsilon: section.epsilon,
                delta: section.delta,
                max_attempts: section.max_attempts.unwrap_or(4),
                estimate_budget: section.estimate_budget.unwrap_or(4096),
                constraints: section
                    .constraint
                    .into_iter()
                    .map(|c| ConstraintSpec {
                        test_fn: c.test_fn,
                        lower: c.lower,
                        upper: c.upper,
                        anchor: MeasureSpec { points: c.anchor.points, weights: c.anchor.weights },
                    })
                    .collect(),
                target,
            })
        }
        "ellis" => {
            if is_circle {
                return Err(ConfigError::Invalid(
                    "the enveloping-semigroup check needs a finite system".to_string(),
                ));
            }
            let section = raw
                .ellis
                .unwrap_or(RawEllis { grid_denominator: None, max_group_order: None });
            CommandParams::Ellis(EllisParams {
                grid_denominator: section.grid_denominator.unwrap_or(4),
                max_group_order: section.max_group_order.unwrap_or(16),
            })
        }
        other => {
            return Err(ConfigError::Invalid(format!(
                "unknown command '{other}' (use verify, approximate, or ellis)"
            )))
        }
    };
    let output = raw.output.unwrap_or(RawOutput { path: None, format: None });
    Ok(Scenario {
        label: label.to_string(),
        system,
        mode,
        seed,
        params,
        output_path: overrides.out.clone().or(output.path.map(PathBuf::from)),
        format: overrides.format.or(output.format).unwrap_or(ReportFormat::Json),
    })
}

fn resolve_system(raw: &RawSystem) -> Result<SystemSpec, ConfigError> {
    match (&raw.builtin, &raw.table) {
        (Some(name), None) => system_by_name(name),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::Io(PathBuf::from(path), e))?;
            let system = parse_system(&text)
                .map_err(|e| ConfigError::Invalid(format!("table '{path}': {e}")))?;
            Ok(SystemSpec::Finite { name: path.clone(), system })
        }
        _ => Err(ConfigError::Invalid(
            "[system] needs exactly one of 'builtin' or 'table'".to_string(),
        )),
    }
}

/// Look a system up by catalog name (also accepts a table-file path).
pub fn system_by_name(name: &str) -> Result<SystemSpec, ConfigError> {
    if name == "circle-rotation" || name == "circle-rotation-uniform" {
        return Ok(SystemSpec::Circle);
    }
    if let Some(system) = builtin::finite_by_name(name) {
        return Ok(SystemSpec::Finite { name: name.to_string(), system });
    }
    if Path::new(name).is_file() {
        let text = std::fs::read_to_string(name)
            .map_err(|e| ConfigError::Io(PathBuf::from(name), e))?;
        let system = parse_system(&text)
            .map_err(|e| ConfigError::Invalid(format!("table '{name}': {e}")))?;
        return Ok(SystemSpec::Finite { name: name.to_string(), system });
    }
    Err(ConfigError::Invalid(format!("unknown system '{name}'")))
}

/// The built-in scenario catalog: default configs synthesized by name.
fn builtin_scenario(
    name: &str,
    expected_command: &str,
    overrides: &Overrides,
) -> Result<Scenario, ConfigError> {
    let is_circle = name == "circle-rotation-uniform";
    let system = if is_circle {
        SystemSpec::Circle
    } else {
        system_by_name(name)?
    };
    let mode = overrides.mode.unwrap_or(if is_circle { Mode::Float } else { Mode::Exact });
    let seed = overrides.seed.unwrap_or(12345);
    let params = match expected_command {
        "verify" => CommandParams::Verify(VerifyParams {
            cases: if is_circle { 50 } else { 200 },
            tolerance: match mode {
                Mode::Exact => 0.0,
                Mode::Float => 1e-9,
            },
        }),
        "approximate" => {
            if !is_circle {
                return Err(ConfigError::Invalid(format!(
                    "built-in approximate scenario exists only for circle-rotation-uniform, \
                     not '{name}'"
                )));
            }
            CommandParams::Approximate(ApproximateParams {
                epsilon: 0.05,
                delta: 0.05,
                max_attempts: 4,
                estimate_budget: 4096,
                constraints: vec![
                    ConstraintSpec {
                        test_fn: "cos:1".to_string(),
                        lower: "-0.1".to_string(),
                        upper: "0.1".to_string(),
                        anchor: MeasureSpec {
                            points: vec!["0.0".to_string()],
                            weights: vec!["1.0".to_string()],
                        },
                    },
                    ConstraintSpec {
                        test_fn: "sin:1".to_string(),
                        lower: "-0.1".to_string(),
                        upper: "0.1".to_string(),
                        anchor: MeasureSpec {
                            points: vec!["0.0".to_string()],
                            weights: vec!["1.0".to_string()],
                        },
                    },
                ],
                target: TargetSpec::Uniform,
            })
        }
        "ellis" => {
            if is_circle {
                return Err(ConfigError::Invalid(
                    "the enveloping-semigroup check needs a finite system".to_string(),
                ));
            }
            CommandParams::Ellis(EllisParams { grid_denominator: 4, max_group_order: 16 })
        }
        other => return Err(ConfigError::Invalid(format!("unknown command '{other}'"))),
    };
    Ok(Scenario {
        label: name.to_string(),
        system,
        mode,
        seed,
        params,
        output_path: overrides.out.clone(),
        format: overrides.format.unwrap_or(ReportFormat::Json),
    })
}

/// Parse a scalar that may be a fraction `p/q` or a decimal.
pub fn parse_scalar_f64(text: &str) -> Result<f64, ConfigError> {
    let value = parse_scalar_raw(text)?;
    if !value.is_finite() {
        return Err(ConfigError::Invalid(format!("scalar '{text}' is not finite")));
    }
    Ok(value)
}

fn parse_scalar_raw(text: &str) -> Result<f64, ConfigError> {
    if let Some((num, den)) = text.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| ConfigError::Invalid(format!("bad numerator in '{text}'")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| ConfigError::Invalid(format!("bad denominator in '{text}'")))?;
        if d == 0.0 {
            return Err(ConfigError::Invalid(format!("zero denominator in '{text}'")));
        }
        Ok(n / d)
    } else {
        text.trim()
            .parse()
            .map_err(|_| ConfigError::Invalid(format!("bad number '{text}'")))
    }
}
