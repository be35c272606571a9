//! `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment. Omitted keys take the
//! reproduction defaults of [`crate::experiments`]; `T`, `alpha` and
//! `sign_change_offset` default per case.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::dynamics::{MomentumRule, StepControl, DEFAULT_CFL_CONST, DEFAULT_MOMENTUM_GUARD};
use crate::error::{Error, Result};
use crate::experiments::{CaseId, ExperimentCase, DEFAULT_POINTS, DEFAULT_SIDE};
use crate::grid::MIN_POINTS;

pub const DEFAULT_EPS: f64 = 0.01;
pub const DEFAULT_STRIDE: usize = 10;
pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Emit {
    Fields,
    Series,
    Sweep,
}

impl Emit {
    pub fn as_str(&self) -> &'static str {
        match self {
            Emit::Fields => "fields",
            Emit::Series => "series",
            Emit::Sweep => "sweep",
        }
    }
}

impl FromStr for Emit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fields" => Ok(Emit::Fields),
            "series" => Ok(Emit::Series),
            "sweep" => Ok(Emit::Sweep),
            other => Err(format!("unknown output kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case_id: CaseId,
    pub eps: f64,
    pub alpha: f64,
    pub side: f64,
    pub n: usize,
    pub cfl_const: f64,
    pub final_time: f64,
    pub stride: usize,
    pub project_mass: bool,
    pub project_momentum: bool,
    pub momentum_guard: f64,
    pub momentum_rule: MomentumRule,
    pub sign_change_offset: f64,
    pub output_dir: PathBuf,
    pub emit: BTreeSet<Emit>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let case_id = CaseId::NearZeroCurrent;
        Self {
            case_id,
            eps: DEFAULT_EPS,
            alpha: case_id.default_alpha(),
            side: DEFAULT_SIDE,
            n: DEFAULT_POINTS,
            cfl_const: DEFAULT_CFL_CONST,
            final_time: case_id.default_final_time(),
            stride: DEFAULT_STRIDE,
            project_mass: true,
            project_momentum: true,
            momentum_guard: DEFAULT_MOMENTUM_GUARD,
            momentum_rule: MomentumRule::default(),
            sign_change_offset: DEFAULT_SIDE / 8.0,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            emit: [Emit::Fields, Emit::Series, Emit::Sweep]
                .into_iter()
                .collect(),
        }
    }
}

impl RunConfig {
    pub fn case(&self) -> ExperimentCase {
        ExperimentCase {
            case_id: self.case_id,
            alpha: self.alpha,
            side: self.side,
            n: self.n,
            sign_change_offset: self.sign_change_offset,
        }
    }

    pub fn step_control(&self) -> StepControl {
        StepControl {
            cfl_const: self.cfl_const,
            momentum_guard: self.momentum_guard,
            project_mass: self.project_mass,
            project_momentum: self.project_momentum,
            momentum_rule: self.momentum_rule,
        }
    }

    /// Range checks shared by the parser and by programmatic overrides.
    pub fn validate(&self) -> Result<()> {
        let fail = |key: &str, reason: String| Err(Error::Config(format!("`{key}`: {reason}")));
        if let Some(reason) = check_range("eps", self.eps) {
            return fail("eps", reason);
        }
        if let Some(reason) = check_range("L", self.side) {
            return fail("L", reason);
        }
        if self.n < MIN_POINTS {
            return fail("n", format!("must be at least {MIN_POINTS}"));
        }
        for (key, value) in [
            ("alpha", self.alpha),
            ("cfl_const", self.cfl_const),
            ("T", self.final_time),
            ("momentum_guard", self.momentum_guard),
            ("sign_change_offset", self.sign_change_offset),
        ] {
            if let Some(reason) = check_range(key, value) {
                return fail(key, reason);
            }
        }
        if self.stride == 0 {
            return fail("stride", "must be at least 1".into());
        }
        Ok(())
    }
}

/// Returns a reason when `value` is outside the admissible range for `key`.
fn check_range(key: &str, value: f64) -> Option<String> {
    if !value.is_finite() {
        return Some(format!("must be finite, got {value}"));
    }
    let ok = match key {
        "L" | "cfl_const" => value > 0.0,
        "eps" | "T" | "momentum_guard" | "sign_change_offset" => value >= 0.0,
        _ => true,
    };
    if ok {
        None
    } else if matches!(key, "L" | "cfl_const") {
        Some(format!("must be positive, got {value}"))
    } else {
        Some(format!("must be non-negative, got {value}"))
    }
}

const KEYS: &[&str] = &[
    "case",
    "eps",
    "alpha",
    "L",
    "n",
    "cfl_const",
    "T",
    "stride",
    "project_mass",
    "project_momentum",
    "momentum_guard",
    "momentum_rule",
    "sign_change_offset",
    "output_dir",
    "emit",
];

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        other => Err(format!("expected true/false, got `{other}`")),
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("expected a number, got `{s}`"))
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<(&str, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |key: &str, reason: String| Error::ConfigKey {
            key: key.to_string(),
            line: line_no,
            reason,
        };
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(line, "expected `key = value`".into()))?;
        let key = KEYS
            .iter()
            .copied()
            .find(|&k| k == key)
            .ok_or_else(|| err(key, "unknown key".into()))?;
        if seen.iter().any(|(k, _)| *k == key) {
            return Err(err(key, "key given twice".into()));
        }
        seen.push((key, line_no));

        let as_f64 = |v: &str| -> Result<f64> {
            let x = parse_f64(v).map_err(|r| err(key, r))?;
            match check_range(key, x) {
                Some(reason) => Err(err(key, reason)),
                None => Ok(x),
            }
        };
        match key {
            "case" => cfg.case_id = value.parse().map_err(|e: Error| err(key, e.to_string()))?,
            "eps" => cfg.eps = as_f64(value)?,
            "alpha" => cfg.alpha = as_f64(value)?,
            "L" => cfg.side = as_f64(value)?,
            "n" => {
                cfg.n = value
                    .parse()
                    .map_err(|_| err(key, format!("expected an integer, got `{value}`")))?;
                if cfg.n < MIN_POINTS {
                    return Err(err(key, format!("must be at least {MIN_POINTS}")));
                }
            }
            "cfl_const" => cfg.cfl_const = as_f64(value)?,
            "T" => cfg.final_time = as_f64(value)?,
            "stride" => {
                cfg.stride = value
                    .parse()
                    .map_err(|_| err(key, format!("expected an integer, got `{value}`")))?;
                if cfg.stride == 0 {
                    return Err(err(key, "must be at least 1".into()));
                }
            }
            "project_mass" => cfg.project_mass = parse_bool(value).map_err(|r| err(key, r))?,
            "project_momentum" => {
                cfg.project_momentum = parse_bool(value).map_err(|r| err(key, r))?
            }
            "momentum_guard" => cfg.momentum_guard = as_f64(value)?,
            "momentum_rule" => {
                cfg.momentum_rule = value.parse().map_err(|e: Error| err(key, e.to_string()))?
            }
            "sign_change_offset" => cfg.sign_change_offset = as_f64(value)?,
            "output_dir" => {
                if value.is_empty() {
                    return Err(err(key, "must not be empty".into()));
                }
                cfg.output_dir = PathBuf::from(value);
            }
            "emit" => {
                let mut set = BTreeSet::new();
                for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    set.insert(item.parse::<Emit>().map_err(|r| err(key, r))?);
                }
                cfg.emit = set;
            }
            _ => unreachable!("key list and match arms out of sync"),
        }
    }

    let given = |k: &str| seen.iter().any(|(s, _)| *s == k);
    if !given("alpha") {
        cfg.alpha = cfg.case_id.default_alpha();
    }
    if !given("T") {
        cfg.final_time = cfg.case_id.default_final_time();
    }
    if !given("sign_change_offset") {
        cfg.sign_change_offset = cfg.side / 8.0;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Writes every key explicitly; `parse_config(&render(c)) == c`.
pub fn render(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let emit: Vec<&str> = cfg.emit.iter().map(Emit::as_str).collect();
    let _ = writeln!(out, "case = {}", cfg.case_id);
    let _ = writeln!(out, "eps = {:?}", cfg.eps);
    let _ = writeln!(out, "alpha = {:?}", cfg.alpha);
    let _ = writeln!(out, "L = {:?}", cfg.side);
    let _ = writeln!(out, "n = {}", cfg.n);
    let _ = writeln!(out, "cfl_const = {:?}", cfg.cfl_const);
    let _ = writeln!(out, "T = {:?}", cfg.final_time);
    let _ = writeln!(out, "stride = {}", cfg.stride);
    let _ = writeln!(out, "project_mass = {}", cfg.project_mass);
    let _ = writeln!(out, "project_momentum = {}", cfg.project_momentum);
    let _ = writeln!(out, "momentum_guard = {:?}", cfg.momentum_guard);
    let _ = writeln!(out, "momentum_rule = {}", cfg.momentum_rule.as_str());
    let _ = writeln!(out, "sign_change_offset = {:?}", cfg.sign_change_offset);
    let _ = writeln!(out, "output_dir = {}", cfg.output_dir.display());
    let _ = writeln!(out, "emit = {}", emit.join(","));
    out
}
