//! Run configuration as TOML: a benchmark preset named by `case`, with any
//! subset of its fields overridden by the file and by `key=value` pairs.

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::bench::{BenchmarkCase, CaseId, CaseSetup, Expectation};
use crate::error::{Error, Result};
use crate::ns::SchemeKind;
use crate::stability::{self, Region, C_MAX_2D};

/// Output location and snapshot cadence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    pub dir: String,
    /// Steps between field snapshots; 0 writes none.
    pub cadence: usize,
}

impl Default for OutputSettings {
    fn default() -> Self {
        OutputSettings { dir: "runs".into(), cadence: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: CaseId,
    pub trim: f64,
    pub setup: CaseSetup,
    pub expected: Vec<Expectation>,
    pub output: OutputSettings,
}

impl RunConfig {
    pub fn preset(id: CaseId) -> Self {
        let b = BenchmarkCase::preset(id);
        RunConfig { case: id, trim: b.trim, setup: b.setup, expected: b.expected, output: OutputSettings::default() }
    }

    pub fn benchmark(&self) -> BenchmarkCase {
        BenchmarkCase { id: self.case, setup: self.setup.clone(), trim: self.trim, expected: self.expected.clone() }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes to TOML")
    }

    /// Problems that make the run meaningless, each naming the offending key.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(0.0..1.0).contains(&self.trim) {
            errs.push(format!("trim must lie in [0, 1), got {}", self.trim));
        }
        for (k, e) in self.expected.iter().enumerate() {
            if e.reference.trim().is_empty() {
                errs.push(format!("expected[{k}].reference must name the reference data set"));
            }
            if !(e.min <= e.max) {
                errs.push(format!("expected[{k}] has min {} above max {}", e.min, e.max));
            }
        }
        match &self.setup {
            CaseSetup::Cylinder(c) => {
                if let Err(Error::Config(list)) = c.validate() {
                    errs.extend(list.into_iter().map(|m| format!("setup.{m}")));
                }
                if !c.domain.contains_rect(&c.refined) {
                    errs.push("setup.refined must lie inside setup.domain".into());
                }
            }
            CaseSetup::Fsi(f) => {
                let mut positive = |name: &str, v: f64| {
                    if !(v > 0.0 && v.is_finite()) {
                        errs.push(format!("setup.{name} must be positive and finite, got {v}"));
                    }
                };
                positive("dt", f.dt);
                positive("t_end", f.t_end);
                if let Err(e) = f.beam.validate() {
                    errs.push(format!("setup.beam: {e}"));
                }
                if let Err(e) = f.fluid.validate() {
                    errs.push(format!("setup.fluid: {e}"));
                }
                if let Err(e) = f.gains.validate() {
                    errs.push(format!("setup.gains: {e}"));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Legal but doubtful choices.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let CaseSetup::Cylinder(c) = &self.setup {
            let g = c.gains;
            if c.scheme == SchemeKind::Bdf2 && g.alpha != 0.0 && g.beta == 0.0 && g.gamma == 0.0 {
                out.push(
                    "BDF2 with integral gain only (beta = gamma = 0) has no stable gain region; set gamma != 0".into(),
                );
            }
            let [x, y, neg_gamma] = c.scaled_gains();
            let inside = match stability::analytic_region(c.scheme, -neg_gamma, C_MAX_2D) {
                Region::Polygon { constraints, .. } => constraints.iter().all(|hp| hp.contains([x, y], 1e-12)),
                Region::Origin => x == 0.0 && y == 0.0,
                Region::Unstable => false,
            };
            if !inside {
                out.push(format!(
                    "gains (-alpha dt^2, -beta dt, -gamma) = ({x}, {y}, {neg_gamma}) lie outside the analytic stability region"
                ));
            }
        }
        out
    }
}

/// A validated configuration and its warnings.
#[derive(Clone, Debug, PartialEq)]
pub struct Parsed {
    pub config: RunConfig,
    pub warnings: Vec<String>,
}

/// Parses `text`, fills unspecified keys from the preset named by `case`,
/// applies `overrides` (`dotted.key=value`), then validates.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<Parsed> {
    let mut user: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(vec![e.to_string()]))?;
    for o in overrides {
        apply_override(&mut user, o)?;
    }
    let case: CaseId = match user.get("case") {
        Some(Value::String(s)) => s.parse().map_err(|e: String| Error::Config(vec![format!("case: {e}")]))?,
        Some(other) => return Err(Error::Config(vec![format!("case must be a string, got {other}")])),
        None => return Err(Error::Config(vec!["missing required key 'case'".into()])),
    };
    let mut merged = Table::try_from(RunConfig::preset(case)).expect("preset serializes to a table");
    if let (Some(Value::Table(u)), Some(Value::Table(p))) = (user.get("setup"), merged.get("setup")) {
        // Switching the setup kind replaces the preset setup outright.
        if u.get("kind").is_some_and(|k| Some(k) != p.get("kind")) {
            merged.remove("setup");
        }
    }
    merge(&mut merged, user);
    let config: RunConfig =
        Value::Table(merged).try_into().map_err(|e: toml::de::Error| Error::Config(vec![e.to_string()]))?;
    config.validate()?;
    let warnings = config.warnings();
    Ok(Parsed { config, warnings })
}

fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Sets `key=value`, where the value is read as a TOML literal and
/// otherwise kept as a string.
pub fn apply_override(table: &mut Table, pair: &str) -> Result<()> {
    let (key, raw) = pair
        .split_once('=')
        .ok_or_else(|| Error::Config(vec![format!("override '{pair}' is not of the form key=value")]))?;
    let (key, raw) = (key.trim(), raw.trim());
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(vec![format!("override key '{key}' is malformed")]));
    }
    let mut node = table;
    for part in &parts[..parts.len() - 1] {
        let entry = node.entry(part.to_string()).or_insert_with(|| Value::Table(Table::new()));
        node = match entry {
            Value::Table(t) => t,
            _ => return Err(Error::Config(vec![format!("override key '{key}': '{part}' is not a table")])),
        };
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn messages(e: Error) -> String {
        match e {
            Error::Config(list) => list.join("\n"),
            other => panic!("expected a configuration error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_takes_the_preset() {
        let p = parse_config("case = \"stationary-cylinder\"", &[]).unwrap();
        assert_eq!(p.config, RunConfig::preset(CaseId::StationaryCylinder));
        assert!(p.warnings.is_empty(), "{:?}", p.warnings);
    }

    #[test]
    fn non_positive_dt_names_the_key() {
        let text = "case = \"stationary-cylinder\"\n[setup]\ndt = 0.0\n";
        let msg = messages(parse_config(text, &[]).unwrap_err());
        assert!(msg.contains("setup.dt"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "case = \"stationary-cylinder\"\n[setup]\ntime_step = 0.01\n";
        let msg = messages(parse_config(text, &[]).unwrap_err());
        assert!(msg.contains("time_step"), "{msg}");
        assert!(parse_config("case = \"inline-oscillation\"\ncolour = 1\n", &[]).is_err());
        assert!(parse_config("trim = 0.5\n", &[]).is_err());
    }

    #[test]
    fn bdf2_with_integral_gain_only_warns() {
        let text = "case = \"stationary-cylinder\"\n[setup]\nscheme = \"bdf2\"\n";
        let p = parse_config(text, &[]).unwrap();
        assert_eq!(p.config.benchmark().setup, {
            let CaseSetup::Cylinder(mut c) = BenchmarkCase::stationary_cylinder().setup else { unreachable!() };
            c.scheme = SchemeKind::Bdf2;
            CaseSetup::Cylinder(c)
        });
        assert!(p.warnings.iter().any(|w| w.contains("gamma != 0")), "{:?}", p.warnings);
    }

    #[test]
    fn overrides_apply_after_the_file() {
        let text = "case = \"inline-oscillation\"\n[setup]\ndt = 0.01\n";
        let o = vec!["setup.dt=0.02".to_string(), "setup.gains.gamma = -0.5".into(), "output.dir=out/x".into()];
        let c = parse_config(text, &o).unwrap().config;
        let CaseSetup::Cylinder(cyl) = &c.setup else { panic!() };
        assert_eq!(cyl.dt, 0.02);
        assert_eq!(cyl.gains.gamma, -0.5);
        assert_eq!(c.output.dir, "out/x");
        assert!(parse_config(text, &["setup.dt".into()]).is_err());
    }

    #[test]
    fn round_trip() {
        for id in CaseId::ALL {
            let c = RunConfig::preset(id);
            assert_eq!(parse_config(&c.to_toml(), &[]).unwrap().config, c);
        }
    }
}
