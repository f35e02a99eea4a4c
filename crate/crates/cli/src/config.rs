//! Flat key = value configuration files.
//!
//! Every key maps one-to-one onto a physical symbol (see the README table).
//! Values are SI; `#` starts a comment; keys may appear in any order. The
//! physical parameters and the sweep edges are required, integrator
//! controls and the drive amplitude have documented defaults.

use squidsim_core::{
    InputCircuitParams, SimConfig, SimError, SquidParams, StriplineParams,
};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Frequency grid for the sweeping subcommands, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub points: u32,
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub squid: SquidParams,
    pub line: StriplineParams,
    pub input: InputCircuitParams,
    pub sim: SimConfig,
    pub sweep: SweepSpec,
}

const REQUIRED: &[&str] = &[
    "critical_current",
    "junction_resistance",
    "junction_capacitance",
    "loop_inductance",
    "bias_current",
    "external_flux",
    "inductance_per_length",
    "capacitance_per_length",
    "length",
    "fundamental_mutual",
    "source_resistance",
    "shunt_resistance",
    "coupling_capacitance",
    "sweep_start",
    "sweep_stop",
];

const OPTIONAL: &[&str] = &[
    "input_amplitude",
    "step",
    "transient_skip",
    "averaging_window",
    "flux_fd_step",
    "ac_amplitude",
    "seed",
    "sweep_points",
    "sweep_spacing",
];

fn config_err(msg: String) -> SimError {
    SimError::Config(msg)
}

struct Raw<'a> {
    values: BTreeMap<&'a str, (usize, &'a str)>,
}

impl<'a> Raw<'a> {
    fn float(&self, key: &str) -> Result<f64, SimError> {
        let (line, text) = self.values[key];
        text.parse::<f64>()
            .map_err(|_| config_err(format!("key `{key}` on line {line}: `{text}` is not a number")))
    }

    fn float_or(&self, key: &str, default: f64) -> Result<f64, SimError> {
        if self.values.contains_key(key) {
            self.float(key)
        } else {
            Ok(default)
        }
    }

    fn integer_or(&self, key: &str, default: u64) -> Result<u64, SimError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(&(line, text)) => text.parse::<u64>().map_err(|_| {
                config_err(format!(
                    "key `{key}` on line {line}: `{text}` is not a nonnegative integer"
                ))
            }),
        }
    }

    fn spacing_or(&self, key: &str, default: Spacing) -> Result<Spacing, SimError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(&(_, "linear")) => Ok(Spacing::Linear),
            Some(&(_, "log")) => Ok(Spacing::Log),
            Some(&(line, text)) => Err(config_err(format!(
                "key `{key}` on line {line}: `{text}` must be `linear` or `log`"
            ))),
        }
    }
}

/// Parse and fully validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, SimError> {
    let mut values: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            config_err(format!("line {line_no}: expected `key = value`, got `{content}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        if !REQUIRED.contains(&key) && !OPTIONAL.contains(&key) {
            return Err(config_err(format!("unknown key `{key}` on line {line_no}")));
        }
        if values.insert(key, (line_no, value)).is_some() {
            return Err(config_err(format!("duplicate key `{key}` on line {line_no}")));
        }
    }

    let missing: Vec<&str> = REQUIRED
        .iter()
        .copied()
        .filter(|k| !values.contains_key(k))
        .collect();
    if !missing.is_empty() {
        return Err(config_err(format!(
            "missing required keys: {}",
            missing.join(", ")
        )));
    }

    let raw = Raw { values };
    let defaults = SimConfig::default();
    let cfg = RunConfig {
        squid: SquidParams {
            critical_current: raw.float("critical_current")?,
            junction_resistance: raw.float("junction_resistance")?,
            junction_capacitance: raw.float("junction_capacitance")?,
            loop_inductance: raw.float("loop_inductance")?,
            bias_current: raw.float("bias_current")?,
            external_flux: raw.float("external_flux")?,
        },
        line: StriplineParams {
            inductance_per_length: raw.float("inductance_per_length")?,
            capacitance_per_length: raw.float("capacitance_per_length")?,
            length: raw.float("length")?,
            fundamental_mutual: raw.float("fundamental_mutual")?,
        },
        input: InputCircuitParams {
            source_resistance: raw.float("source_resistance")?,
            shunt_resistance: raw.float("shunt_resistance")?,
            coupling_capacitance: raw.float("coupling_capacitance")?,
            input_amplitude: raw.float_or("input_amplitude", 1.0)?,
        },
        sim: SimConfig {
            step: raw.float_or("step", defaults.step)?,
            transient_skip: raw.float_or("transient_skip", defaults.transient_skip)?,
            averaging_window: raw.float_or("averaging_window", defaults.averaging_window)?,
            flux_fd_step: raw.float_or("flux_fd_step", defaults.flux_fd_step)?,
            ac_amplitude: raw.float_or("ac_amplitude", defaults.ac_amplitude)?,
            seed: raw.integer_or("seed", defaults.seed)?,
        },
        sweep: SweepSpec {
            start: raw.float("sweep_start")?,
            stop: raw.float("sweep_stop")?,
            points: raw.integer_or("sweep_points", 201)? as u32,
            spacing: raw.spacing_or("sweep_spacing", Spacing::Linear)?,
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Read and parse a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig, SimError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        config_err(format!("cannot read config `{}`: {e}", path.display()))
    })?;
    parse_config(&text)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.squid.validate()?;
        self.line.validate()?;
        self.input.validate()?;
        self.sim.validate()?;
        if self.sweep.points < 2 {
            return Err(SimError::InvalidParameter {
                name: "sweep_points",
                constraint: "sweep_points >= 2",
                value: f64::from(self.sweep.points),
            });
        }
        if !(self.sweep.start.is_finite() && self.sweep.start > 0.0) {
            return Err(SimError::InvalidParameter {
                name: "sweep_start",
                constraint: "sweep_start > 0",
                value: self.sweep.start,
            });
        }
        if !(self.sweep.stop.is_finite() && self.sweep.stop > self.sweep.start) {
            return Err(SimError::InvalidParameter {
                name: "sweep_stop",
                constraint: "sweep_stop > sweep_start",
                value: self.sweep.stop,
            });
        }
        Ok(())
    }

    /// The sweep grid, strictly increasing, `points` entries.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.sweep.points as usize;
        let (a, b) = (self.sweep.start, self.sweep.stop);
        (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                match self.sweep.spacing {
                    Spacing::Linear => a + (b - a) * f,
                    Spacing::Log => a * (b / a).powf(f),
                }
            })
            .collect()
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Render a configuration document that parses back to an identical
/// `RunConfig`.
pub fn emit_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let kv = |out: &mut String, key: &str, v: f64| {
        let _ = writeln!(out, "{key} = {}", fmt_value(v));
    };
    s.push_str("# squid\n");
    kv(&mut s, "critical_current", cfg.squid.critical_current);
    kv(&mut s, "junction_resistance", cfg.squid.junction_resistance);
    kv(&mut s, "junction_capacitance", cfg.squid.junction_capacitance);
    kv(&mut s, "loop_inductance", cfg.squid.loop_inductance);
    kv(&mut s, "bias_current", cfg.squid.bias_current);
    kv(&mut s, "external_flux", cfg.squid.external_flux);
    s.push_str("\n# stripline\n");
    kv(&mut s, "inductance_per_length", cfg.line.inductance_per_length);
    kv(&mut s, "capacitance_per_length", cfg.line.capacitance_per_length);
    kv(&mut s, "length", cfg.line.length);
    kv(&mut s, "fundamental_mutual", cfg.line.fundamental_mutual);
    s.push_str("\n# input circuit\n");
    kv(&mut s, "source_resistance", cfg.input.source_resistance);
    kv(&mut s, "shunt_resistance", cfg.input.shunt_resistance);
    kv(&mut s, "coupling_capacitance", cfg.input.coupling_capacitance);
    kv(&mut s, "input_amplitude", cfg.input.input_amplitude);
    s.push_str("\n# integrator\n");
    kv(&mut s, "step", cfg.sim.step);
    kv(&mut s, "transient_skip", cfg.sim.transient_skip);
    kv(&mut s, "averaging_window", cfg.sim.averaging_window);
    kv(&mut s, "flux_fd_step", cfg.sim.flux_fd_step);
    kv(&mut s, "ac_amplitude", cfg.sim.ac_amplitude);
    let _ = writeln!(s, "seed = {}", cfg.sim.seed);
    s.push_str("\n# sweep\n");
    kv(&mut s, "sweep_start", cfg.sweep.start);
    kv(&mut s, "sweep_stop", cfg.sweep.stop);
    let _ = writeln!(s, "sweep_points = {}", cfg.sweep.points);
    let _ = writeln!(
        s,
        "sweep_spacing = {}",
        match cfg.sweep.spacing {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        }
    );
    s
}
