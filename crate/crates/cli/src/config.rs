//! Campaign configuration files.
//!
//! A config is a TOML document with up to four sections, `[scenario]`,
//! `[radio]`, `[mac]` and `[campaign]`. Every key is optional and falls back
//! to the defaults below; unknown keys and sections are rejected.
//!
//! ```toml
//! [scenario]
//! kind = "urban-grid"        # suburban-cross | suburban-cloverleaf | urban-grid
//! density = 100.0            # vehicles per km² of bounding region
//!
//! [mac]
//! cw = 127
//!
//! [campaign]
//! seed = 7
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;
use v2x_core::engine::{CampaignConfig, ScenarioKind};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid value for `{key}`{}: {message}", line_suffix(*.line))]
    Constraint {
        key: String,
        line: Option<usize>,
        message: String,
    },
}

fn line_suffix(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

/// Every accepted key, as `(section, key)`.
pub const KEYS: &[(&str, &str)] = &[
    ("scenario", "kind"),
    ("scenario", "arm_length"),
    ("scenario", "road_width"),
    ("scenario", "loop_radius"),
    ("scenario", "blocks_per_side"),
    ("scenario", "block_size"),
    ("scenario", "street_width"),
    ("scenario", "density"),
    ("scenario", "speed"),
    ("scenario", "fixed_n"),
    ("radio", "fc_ghz"),
    ("radio", "tx_power_dbm"),
    ("radio", "bandwidth_mhz"),
    ("radio", "noise_figure_db"),
    ("radio", "sinr_threshold_db"),
    ("radio", "h_bs"),
    ("radio", "h_ut"),
    ("radio", "building_height"),
    ("radio", "avg_street_width"),
    ("radio", "shadowing"),
    ("mac", "cw"),
    ("mac", "slot_us"),
    ("mac", "aifs"),
    ("mac", "bsm_period"),
    ("mac", "bsm_airtime"),
    ("mac", "cs_threshold_dbm"),
    ("campaign", "seed"),
    ("campaign", "snapshots"),
    ("campaign", "horizon"),
    ("campaign", "awareness_range"),
];

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SeedValue {
    Int(i64),
    Text(String),
}

type Field<T> = Option<Spanned<T>>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: Field<String>,
    arm_length: Field<Number>,
    road_width: Field<Number>,
    loop_radius: Field<Number>,
    blocks_per_side: Field<Number>,
    block_size: Field<Number>,
    street_width: Field<Number>,
    density: Field<Number>,
    speed: Field<Number>,
    fixed_n: Field<Number>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRadio {
    fc_ghz: Field<Number>,
    tx_power_dbm: Field<Number>,
    bandwidth_mhz: Field<Number>,
    noise_figure_db: Field<Number>,
    sinr_threshold_db: Field<Number>,
    h_bs: Field<Number>,
    h_ut: Field<Number>,
    building_height: Field<Number>,
    avg_street_width: Field<Number>,
    shadowing: Field<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMac {
    cw: Field<Number>,
    slot_us: Field<Number>,
    aifs: Field<Number>,
    bsm_period: Field<Number>,
    bsm_airtime: Field<Number>,
    cs_threshold_dbm: Field<Number>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCampaign {
    seed: Field<SeedValue>,
    snapshots: Field<Number>,
    horizon: Field<Number>,
    awareness_range: Field<Number>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    #[serde(default)]
    scenario: RawScenario,
    #[serde(default)]
    radio: RawRadio,
    #[serde(default)]
    mac: RawMac,
    #[serde(default)]
    campaign: RawCampaign,
}

/// Resolves spans to line numbers and remembers where each key was set.
struct Reader<'a> {
    text: &'a str,
    lines: HashMap<String, usize>,
}

impl Reader<'_> {
    fn line_of(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    fn constraint(&self, key: &str, line: Option<usize>, message: impl Into<String>) -> ConfigError {
        ConfigError::Constraint { key: key.to_string(), line, message: message.into() }
    }

    fn take<T>(&mut self, key: &str, field: Field<T>) -> Option<(T, usize)> {
        field.map(|s| {
            let line = self.line_of(s.span().start);
            self.lines.insert(key.to_string(), line);
            (s.into_inner(), line)
        })
    }

    fn float(&mut self, key: &str, field: Field<Number>, default: f64) -> Result<f64, ConfigError> {
        match self.take(key, field) {
            None => Ok(default),
            Some((n, line)) => {
                let v = match n {
                    Number::Int(i) => i as f64,
                    Number::Float(f) => f,
                };
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(self.constraint(key, Some(line), "must be a finite number"))
                }
            }
        }
    }

    fn uint(&mut self, key: &str, field: Field<Number>, default: u64) -> Result<u64, ConfigError> {
        match self.take(key, field) {
            None => Ok(default),
            Some((Number::Int(i), _)) if i >= 0 => Ok(i as u64),
            Some((Number::Int(i), line)) => {
                Err(self.constraint(key, Some(line), format!("must be a non-negative integer, got {i}")))
            }
            Some((Number::Float(f), line)) => {
                Err(self.constraint(key, Some(line), format!("must be an integer, got {f}")))
            }
        }
    }

    fn u32(&mut self, key: &str, field: Field<Number>, default: u32) -> Result<u32, ConfigError> {
        let line = field.as_ref().map(|s| self.line_of(s.span().start));
        let v = self.uint(key, field, default as u64)?;
        u32::try_from(v).map_err(|_| self.constraint(key, line, format!("{v} does not fit in 32 bits")))
    }
}

fn qualified(name: &str) -> String {
    KEYS.iter()
        .find(|(_, k)| *k == name)
        .map(|(s, k)| format!("{s}.{k}"))
        .unwrap_or_else(|| name.to_string())
}

/// Parses a config document.
pub fn parse_config_str(text: &str) -> Result<CampaignConfig, ConfigError> {
    let raw: RawDoc = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let mut r = Reader { text, lines: HashMap::new() };
    let mut cfg = CampaignConfig::default();

    let s = raw.scenario;
    let sc = &mut cfg.scenario;
    if let Some((kind, line)) = r.take("scenario.kind", s.kind) {
        sc.kind = kind
            .parse::<ScenarioKind>()
            .map_err(|e| r.constraint("scenario.kind", Some(line), e.to_string()))?;
    }
    sc.arm_length = r.float("scenario.arm_length", s.arm_length, sc.arm_length)?;
    sc.road_width = r.float("scenario.road_width", s.road_width, sc.road_width)?;
    sc.loop_radius = r.float("scenario.loop_radius", s.loop_radius, sc.loop_radius)?;
    sc.blocks_per_side = r.uint("scenario.blocks_per_side", s.blocks_per_side, sc.blocks_per_side as u64)? as usize;
    sc.block_size = r.float("scenario.block_size", s.block_size, sc.block_size)?;
    sc.street_width = r.float("scenario.street_width", s.street_width, sc.street_width)?;
    sc.density = r.float("scenario.density", s.density, sc.density)?;
    sc.speed = r.float("scenario.speed", s.speed, sc.speed)?;
    if s.fixed_n.is_some() {
        sc.fixed_n = Some(r.uint("scenario.fixed_n", s.fixed_n, 0)? as usize);
    }

    let ra = raw.radio;
    let rc = &mut cfg.radio;
    rc.fc_ghz = r.float("radio.fc_ghz", ra.fc_ghz, rc.fc_ghz)?;
    rc.tx_power_dbm = r.float("radio.tx_power_dbm", ra.tx_power_dbm, rc.tx_power_dbm)?;
    rc.bandwidth_mhz = r.float("radio.bandwidth_mhz", ra.bandwidth_mhz, rc.bandwidth_mhz)?;
    rc.noise_figure_db = r.float("radio.noise_figure_db", ra.noise_figure_db, rc.noise_figure_db)?;
    rc.sinr_threshold_db = r.float("radio.sinr_threshold_db", ra.sinr_threshold_db, rc.sinr_threshold_db)?;
    rc.h_bs = r.float("radio.h_bs", ra.h_bs, rc.h_bs)?;
    rc.h_ut = r.float("radio.h_ut", ra.h_ut, rc.h_ut)?;
    rc.building_height = r.float("radio.building_height", ra.building_height, rc.building_height)?;
    rc.avg_street_width = r.float("radio.avg_street_width", ra.avg_street_width, rc.avg_street_width)?;
    if let Some((b, _)) = r.take("radio.shadowing", ra.shadowing) {
        rc.shadowing = b;
    }

    let m = raw.mac;
    let mc = &mut cfg.mac;
    mc.cw = r.u32("mac.cw", m.cw, mc.cw)?;
    mc.slot_us = r.float("mac.slot_us", m.slot_us, mc.slot_us)?;
    mc.aifs = r.u32("mac.aifs", m.aifs, mc.aifs)?;
    mc.bsm_period = r.uint("mac.bsm_period", m.bsm_period, mc.bsm_period)?;
    mc.bsm_airtime = r.uint("mac.bsm_airtime", m.bsm_airtime, mc.bsm_airtime)?;
    mc.cs_threshold_dbm = r.float("mac.cs_threshold_dbm", m.cs_threshold_dbm, mc.cs_threshold_dbm)?;

    let c = raw.campaign;
    if let Some((seed, line)) = r.take("campaign.seed", c.seed) {
        cfg.base_seed = match seed {
            SeedValue::Int(i) if i >= 0 => i as u64,
            SeedValue::Int(i) => {
                return Err(r.constraint("campaign.seed", Some(line), format!("must be non-negative, got {i}")))
            }
            SeedValue::Text(t) => t
                .parse::<u64>()
                .map_err(|_| r.constraint("campaign.seed", Some(line), format!("`{t}` is not a 64-bit unsigned integer")))?,
        };
    }
    cfg.snapshots = r.uint("campaign.snapshots", c.snapshots, cfg.snapshots as u64)? as usize;
    cfg.horizon = r.uint("campaign.horizon", c.horizon, cfg.horizon)?;
    cfg.awareness_range = r.float("campaign.awareness_range", c.awareness_range, cfg.awareness_range)?;

    cfg.validate().map_err(|e| match e {
        v2x_core::Error::InvalidParameter { name, reason } => {
            let key = qualified(name);
            let line = r.lines.get(&key).copied();
            ConfigError::Constraint { key, line, message: reason }
        }
        other => ConfigError::Constraint { key: "config".into(), line: None, message: other.to_string() },
    })?;
    Ok(cfg)
}

/// Reads and parses a config file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<CampaignConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

fn float(v: f64) -> String {
    // Debug formatting round-trips exactly and always carries a '.' or exponent
    format!("{v:?}")
}

/// Serializes the effective config with every key spelled out.
pub fn render_config(cfg: &CampaignConfig) -> String {
    let mut out = String::new();
    let s = &cfg.scenario;
    let _ = writeln!(out, "[scenario]");
    let _ = writeln!(out, "kind = \"{}\"", s.kind.label());
    let _ = writeln!(out, "arm_length = {}", float(s.arm_length));
    let _ = writeln!(out, "road_width = {}", float(s.road_width));
    let _ = writeln!(out, "loop_radius = {}", float(s.loop_radius));
    let _ = writeln!(out, "blocks_per_side = {}", s.blocks_per_side);
    let _ = writeln!(out, "block_size = {}", float(s.block_size));
    let _ = writeln!(out, "street_width = {}", float(s.street_width));
    let _ = writeln!(out, "density = {}", float(s.density));
    let _ = writeln!(out, "speed = {}", float(s.speed));
    if let Some(n) = s.fixed_n {
        let _ = writeln!(out, "fixed_n = {n}");
    }

    let r = &cfg.radio;
    let _ = writeln!(out, "\n[radio]");
    let _ = writeln!(out, "fc_ghz = {}", float(r.fc_ghz));
    let _ = writeln!(out, "tx_power_dbm = {}", float(r.tx_power_dbm));
    let _ = writeln!(out, "bandwidth_mhz = {}", float(r.bandwidth_mhz));
    let _ = writeln!(out, "noise_figure_db = {}", float(r.noise_figure_db));
    let _ = writeln!(out, "sinr_threshold_db = {}", float(r.sinr_threshold_db));
    let _ = writeln!(out, "h_bs = {}", float(r.h_bs));
    let _ = writeln!(out, "h_ut = {}", float(r.h_ut));
    let _ = writeln!(out, "building_height = {}", float(r.building_height));
    let _ = writeln!(out, "avg_street_width = {}", float(r.avg_street_width));
    let _ = writeln!(out, "shadowing = {}", r.shadowing);

    let m = &cfg.mac;
    let _ = writeln!(out, "\n[mac]");
    let _ = writeln!(out, "cw = {}", m.cw);
    let _ = writeln!(out, "slot_us = {}", float(m.slot_us));
    let _ = writeln!(out, "aifs = {}", m.aifs);
    let _ = writeln!(out, "bsm_period = {}", m.bsm_period);
    let _ = writeln!(out, "bsm_airtime = {}", m.bsm_airtime);
    let _ = writeln!(out, "cs_threshold_dbm = {}", float(m.cs_threshold_dbm));

    let _ = writeln!(out, "\n[campaign]");
    if cfg.base_seed <= i64::MAX as u64 {
        let _ = writeln!(out, "seed = {}", cfg.base_seed);
    } else {
        let _ = writeln!(out, "seed = \"{}\"", cfg.base_seed);
    }
    let _ = writeln!(out, "snapshots = {}", cfg.snapshots);
    let _ = writeln!(out, "horizon = {}", cfg.horizon);
    let _ = writeln!(out, "awareness_range = {}", float(cfg.awareness_range));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let cfg = parse_config_str("[scenario]\nkind = \"urban-grid\"\n[campaign]\nseed = 42\n").unwrap();
        let mut expected = CampaignConfig::default();
        expected.scenario.kind = ScenarioKind::UrbanGrid;
        expected.base_seed = 42;
        assert_eq!(cfg, expected);
        assert_eq!(cfg.mac.cw, 31);
    }

    #[test]
    fn empty_file_is_all_defaults() {
        assert_eq!(parse_config_str("").unwrap(), CampaignConfig::default());
    }

    #[test]
    fn negative_cw_names_the_key() {
        let err = parse_config_str("[mac]\n\ncw = -1\n").unwrap_err();
        match &err {
            ConfigError::Constraint { key, line, .. } => {
                assert_eq!(key, "mac.cw");
                assert_eq!(*line, Some(3));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("cw"));
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = parse_config_str("[mac]\ncw = 31\nretries = 7\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
        assert!(err.to_string().contains("retries"), "{err}");
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(parse_config_str("[phy]\nx = 1\n").is_err());
    }

    #[test]
    fn core_constraints_carry_key_and_line() {
        let err = parse_config_str("[radio]\nfc_ghz = 60.0\n").unwrap_err();
        match err {
            ConfigError::Constraint { key, line, .. } => {
                assert_eq!(key, "radio.fc_ghz");
                assert_eq!(line, Some(2));
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_config_str("[mac]\nbsm_period = 10\n").unwrap_err();
        assert!(err.to_string().contains("mac.bsm_period"), "{err}");
        let err = parse_config_str("[scenario]\nkind = \"downtown\"\n").unwrap_err();
        assert!(err.to_string().contains("scenario.kind"), "{err}");
    }

    #[test]
    fn integers_accepted_for_floats_but_not_vice_versa() {
        let cfg = parse_config_str("[scenario]\ndensity = 50\n").unwrap();
        assert_eq!(cfg.scenario.density, 50.0);
        assert!(parse_config_str("[mac]\ncw = 31.5\n").is_err());
    }

    #[test]
    fn render_then_parse_round_trips() {
        let mut cfg = CampaignConfig::default();
        assert_eq!(parse_config_str(&render_config(&cfg)).unwrap(), cfg);
        cfg.scenario.kind = ScenarioKind::SuburbanCloverleaf;
        cfg.scenario.fixed_n = Some(12);
        cfg.scenario.speed = 27.777_777_777_777_78;
        cfg.radio.fc_ghz = 5.905;
        cfg.radio.shadowing = false;
        cfg.mac.cw = 127;
        cfg.mac.cs_threshold_dbm = -82.123_456_789;
        cfg.base_seed = u64::MAX;
        let text = render_config(&cfg);
        assert_eq!(parse_config_str(&text).unwrap(), cfg);
        // rendering is a fixed point
        assert_eq!(render_config(&parse_config_str(&text).unwrap()), text);
    }
}
