//! Flat `key = value` configuration files for simulation runs.
//!
//! Grammar: one assignment per line, `#` starts a comment, blank lines
//! ignored. Unknown and duplicate keys are errors. Required keys:
//! `k, nx, ny, Lx, Ly, T, dt`. Optional keys with defaults:
//! `integrator = ifrk4`, `dealias = true`, `snapshot_stride = 100`,
//! `diagnostic_stride = 10`, `dt_policy = fixed`, `cfl_s = 1.0`.

use crate::error::{GzkError, Result};
use crate::evolution::{DtPolicy, Integrator, SimulationConfig};
use crate::grid::make_grid;
use std::collections::BTreeMap;
use std::path::Path;

const KNOWN_KEYS: &[&str] = &[
    "k",
    "nx",
    "ny",
    "Lx",
    "Ly",
    "T",
    "dt",
    "integrator",
    "dealias",
    "snapshot_stride",
    "diagnostic_stride",
    "dt_policy",
    "cfl_s",
];

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            GzkError::Config(format!("line {}: expected 'key = value'", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(GzkError::Config(format!(
                "line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(GzkError::Config(format!(
                "line {}: duplicate key '{key}'",
                lineno + 1
            )));
        }
    }
    Ok(map)
}

fn required<'a>(map: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    map.get(key)
        .map(String::as_str)
        .ok_or_else(|| GzkError::Config(format!("missing required key '{key}'")))
}

fn parse_num<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| GzkError::Config(format!("key '{key}': cannot parse '{raw}'")))
}

pub fn parse_config_str(text: &str) -> Result<SimulationConfig> {
    let map = parse_pairs(text)?;
    let k: u32 = parse_num("k", required(&map, "k")?)?;
    let nx: usize = parse_num("nx", required(&map, "nx")?)?;
    let ny: usize = parse_num("ny", required(&map, "ny")?)?;
    let lx: f64 = parse_num("Lx", required(&map, "Lx")?)?;
    let ly: f64 = parse_num("Ly", required(&map, "Ly")?)?;
    let t_end: f64 = parse_num("T", required(&map, "T")?)?;
    let dt: f64 = parse_num("dt", required(&map, "dt")?)?;
    let grid = make_grid(nx, ny, lx, ly).map_err(|e| GzkError::Config(e.to_string()))?;
    let integrator = match map.get("integrator") {
        Some(raw) => Integrator::parse(raw).map_err(|e| GzkError::Config(e.to_string()))?,
        None => Integrator::IfRk4,
    };
    let dealias = match map.get("dealias").map(String::as_str) {
        None => true,
        Some("true") => true,
        Some("false") => false,
        Some(other) => {
            return Err(GzkError::Config(format!(
                "key 'dealias': expected true|false, got '{other}'"
            )))
        }
    };
    let snapshot_stride: usize = match map.get("snapshot_stride") {
        Some(raw) => parse_num("snapshot_stride", raw)?,
        None => 100,
    };
    let diagnostic_stride: usize = match map.get("diagnostic_stride") {
        Some(raw) => parse_num("diagnostic_stride", raw)?,
        None => 10,
    };
    let cfl_s: f64 = match map.get("cfl_s") {
        Some(raw) => parse_num("cfl_s", raw)?,
        None => 1.0,
    };
    let dt_policy = match map.get("dt_policy").map(String::as_str) {
        None | Some("fixed") => DtPolicy::Fixed(dt),
        Some("cfl") => DtPolicy::Cfl { dt_ref: dt, s: cfl_s },
        Some(other) => {
            return Err(GzkError::Config(format!(
                "key 'dt_policy': expected fixed|cfl, got '{other}'"
            )))
        }
    };
    let cfg = SimulationConfig {
        k,
        grid,
        t_end,
        dt_policy,
        integrator,
        dealias,
        snapshot_stride,
        diagnostic_stride,
    };
    cfg.validate().map_err(|e| GzkError::Config(e.to_string()))?;
    Ok(cfg)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<SimulationConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

/// Canonical serialization; `parse(serialize(cfg))` reproduces `cfg` and
/// `serialize` is idempotent under re-parsing.
pub fn serialize_config(cfg: &SimulationConfig) -> String {
    let (policy, dt, cfl_s) = match cfg.dt_policy {
        DtPolicy::Fixed(dt) => ("fixed", dt, 1.0),
        DtPolicy::Cfl { dt_ref, s } => ("cfl", dt_ref, s),
    };
    format!(
        "k = {}\nnx = {}\nny = {}\nLx = {:.17}\nLy = {:.17}\nT = {:.17}\ndt = {:.17}\n\
         integrator = {}\ndealias = {}\nsnapshot_stride = {}\ndiagnostic_stride = {}\n\
         dt_policy = {}\ncfl_s = {:.17}\n",
        cfg.k,
        cfg.grid.nx(),
        cfg.grid.ny(),
        cfg.grid.lx(),
        cfg.grid.ly(),
        cfg.t_end,
        dt,
        cfg.integrator.name(),
        cfg.dealias,
        cfg.snapshot_stride,
        cfg.diagnostic_stride,
        policy,
        cfl_s,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "k=2\nnx=256\nny=256\nLx=100.53096491\nLy=100.53096491\nT=1.0\ndt=0.001\n";

    #[test]
    fn minimal_file_parses_with_defaults() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.k, 2);
        assert_eq!(cfg.grid.nx(), 256);
        assert_eq!(cfg.dt_policy, DtPolicy::Fixed(0.001));
        assert_eq!(cfg.integrator, Integrator::IfRk4);
        assert!(cfg.dealias);
    }

    #[test]
    fn comments_and_spacing_accepted() {
        let text = "# run\n k = 2 # nonlinearity\nnx = 16\nny = 16\nLx = 6.0\nLy = 6.0\nT = 0.5\ndt = 0.01\n\n";
        let cfg = parse_config_str(text).unwrap();
        assert_eq!(cfg.grid.ny(), 16);
        assert_eq!(cfg.t_end, 0.5);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(parse_config_str(&MINIMAL.replace("k=2", "k=0")).is_err());
        assert!(parse_config_str(&format!("{MINIMAL}k=3\n")).is_err()); // duplicate
        assert!(parse_config_str(&format!("{MINIMAL}mystery=1\n")).is_err()); // unknown
        assert!(parse_config_str(&MINIMAL.replace("dt=0.001", "dt=soon")).is_err());
        assert!(parse_config_str("k=2\nnx=256\n").is_err()); // missing keys
        assert!(parse_config_str(&format!("{MINIMAL}dealias=maybe\n")).is_err());
        assert!(parse_config_str(&format!("{MINIMAL}integrator=rk4\n")).is_err());
        assert!(parse_config_str(&format!("{MINIMAL}dt_policy=magic\n")).is_err());
        assert!(parse_config_str("k : 2\n").is_err());
    }

    #[test]
    fn serialize_round_trips() {
        let mut cfg = parse_config_str(MINIMAL).unwrap();
        cfg.dt_policy = DtPolicy::Cfl { dt_ref: 0.001, s: 0.5 };
        cfg.integrator = Integrator::Strang;
        cfg.dealias = false;
        let text = serialize_config(&cfg);
        let back = parse_config_str(&text).unwrap();
        assert_eq!(serialize_config(&back), text);
        assert_eq!(back.dt_policy, cfg.dt_policy);
        assert_eq!(back.integrator, cfg.integrator);
        assert_eq!(back.grid, cfg.grid);
        assert_eq!(back.t_end, cfg.t_end);
    }
}
