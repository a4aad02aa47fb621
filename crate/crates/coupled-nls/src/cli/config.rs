//! Flat JSON run configuration.

use std::path::Path;

use serde_json::{Map, Value};

use crate::energy::SystemParams;
use crate::error::{param, Error, Result};
use crate::solver::{Init, SeedMode, SolveConfig};

/// Keys that must be present.
pub const REQUIRED: [&str; 9] = ["p", "q", "r1", "r2", "mu1", "mu2", "beta", "a", "b"];
/// Keys with defaults.
pub const OPTIONAL: [&str; 8] = [
    "dim",
    "radius",
    "points",
    "tol_residual",
    "max_iters",
    "seed_mode",
    "output",
    "mode",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub radius: f64,
    pub points: usize,
    pub tol_residual: f64,
    pub max_iters: usize,
    pub seed_mode: SeedMode,
    /// Result CSV path; the profiles go next to it.
    pub output: Option<String>,
    /// Free-form tag echoed in the logs.
    pub mode: String,
}

fn number(map: &Map<String, Value>, key: &str) -> Result<Option<f64>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => match v.as_f64() {
            Some(x) => Ok(Some(x)),
            None => param(format!("key `{key}` must be a number, got {v}")),
        },
    }
}

fn required(map: &Map<String, Value>, key: &str) -> Result<f64> {
    number(map, key)?.ok_or_else(|| Error::Parameter(format!("missing key `{key}`")))
}

fn count(map: &Map<String, Value>, key: &str, default: usize) -> Result<usize> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => match v.as_u64() {
            Some(x) => Ok(x as usize),
            None => param(format!("key `{key}` must be a nonnegative integer, got {v}")),
        },
    }
}

fn text(map: &Map<String, Value>, key: &str) -> Result<Option<String>> {
    match map.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(v) => param(format!("key `{key}` must be a string, got {v}")),
    }
}

impl RunConfig {
    pub fn from_json(src: &str) -> Result<RunConfig> {
        let value: Value = serde_json::from_str(src).map_err(|e| Error::Parameter(format!("config is not valid JSON: {e}")))?;
        let Value::Object(map) = value else {
            return param("config must be a flat JSON object");
        };
        if let Some(k) = map.keys().find(|k| !REQUIRED.contains(&k.as_str()) && !OPTIONAL.contains(&k.as_str())) {
            return param(format!("unknown key `{k}`"));
        }
        let params = SystemParams {
            dim: count(&map, "dim", 3)?,
            p: required(&map, "p")?,
            q: required(&map, "q")?,
            r1: required(&map, "r1")?,
            r2: required(&map, "r2")?,
            mu1: required(&map, "mu1")?,
            mu2: required(&map, "mu2")?,
            beta: required(&map, "beta")?,
            a: required(&map, "a")?,
            b: required(&map, "b")?,
        };
        let seed_mode = match text(&map, "seed_mode")? {
            Some(s) => SeedMode::parse(&s)?,
            None => SeedMode::Multistart,
        };
        let cfg = RunConfig {
            params,
            radius: number(&map, "radius")?.unwrap_or(15.0),
            points: count(&map, "points", 1501)?,
            tol_residual: number(&map, "tol_residual")?.unwrap_or(1e-4),
            max_iters: count(&map, "max_iters", 20000)?,
            seed_mode,
            output: text(&map, "output")?,
            mode: text(&map, "mode")?.unwrap_or_else(|| "solve".into()),
        };
        let sc = cfg.solve_config();
        sc.validate()?;
        sc.grid()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Parameter(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::from_json(&src)
    }

    pub fn solve_config(&self) -> SolveConfig {
        let mut c = SolveConfig::new(self.params);
        c.radius = self.radius;
        c.points = self.points;
        c.tol_residual = self.tol_residual;
        c.max_iters = self.max_iters;
        c.init = Init::Seed(self.seed_mode);
        c
    }

    /// Copy with one of `a`, `b`, `beta` replaced.
    pub fn varied(&self, key: &str, value: f64) -> Result<RunConfig> {
        let mut c = self.clone();
        match key {
            "a" => c.params.a = value,
            "b" => c.params.b = value,
            "beta" => c.params.beta = value,
            _ => return param(format!("can only vary a, b or beta, not `{key}`")),
        }
        c.solve_config().validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{"p": 4, "q": 4, "r1": 1.75, "r2": 1.75, "mu1": 1, "mu2": 1, "beta": 1, "a": 1, "b": 1}"#;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_json(FULL).unwrap();
        assert_eq!(c.params.dim, 3);
        assert_eq!((c.radius, c.points, c.max_iters), (15.0, 1501, 20000));
        assert_eq!(c.tol_residual, 1e-4);
        assert_eq!(c.seed_mode, SeedMode::Multistart);
    }

    #[test]
    fn missing_key_is_named() {
        let src = FULL.replace(r#""beta": 1, "#, "");
        let e = RunConfig::from_json(&src).unwrap_err();
        assert!(e.to_string().contains("`beta`"), "{e}");
    }

    #[test]
    fn rejects_unknown_and_mistyped() {
        let src = FULL.replace('}', r#", "gamma": 2}"#);
        assert!(RunConfig::from_json(&src).unwrap_err().to_string().contains("gamma"));
        let src = FULL.replace(r#""a": 1"#, r#""a": "one""#);
        assert!(RunConfig::from_json(&src).unwrap_err().to_string().contains("`a`"));
        assert!(RunConfig::from_json("[1, 2]").is_err());
    }

    #[test]
    fn window_is_checked() {
        let src = FULL.replace(r#""p": 4"#, r#""p": 7"#);
        assert!(RunConfig::from_json(&src).is_err());
    }

    #[test]
    fn only_masses_and_beta_vary() {
        let c = RunConfig::from_json(FULL).unwrap();
        assert_eq!(c.varied("beta", 10.0).unwrap().params.beta, 10.0);
        assert!(c.varied("p", 5.0).is_err());
        assert!(c.varied("a", -1.0).is_err());
    }
}
