//! Flat `key = value` run configuration.
//!
//! Values are layered: built-in defaults, then the named preset, then the
//! config file, then command-line flags. Frequencies are entered in GHz
//! (rate / 2π) and converted to rad/ns on resolution.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;
use wgm_qed::steady::linspace;
use wgm_qed::units::{ghz, to_ghz};
use wgm_qed::{HilbertSpace, SystemParams};

use crate::presets;

/// Every key accepted in a config file, in echo order.
pub const KEYS: &[&str] = &[
    "mode",
    "preset",
    "g0_ghz",
    "beta_ghz",
    "xi_rad",
    "kappa_t_ghz",
    "kappa_e_ghz",
    "gamma_par_ghz",
    "gamma_p_ghz",
    "delta_ac_ghz",
    "p_in",
    "n_max_cw",
    "n_max_ccw",
    "delta_lc_min_ghz",
    "delta_lc_max_ghz",
    "delta_lc_points",
    "delta_ac_min_ghz",
    "delta_ac_max_ghz",
    "delta_ac_points",
    "min_dip_depth",
    "omega_l_ghz",
    "g2_a",
    "g2_b",
    "tau_max_ns",
    "tau_points",
    "t_max_ns",
    "t_points",
    "output",
    "format",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("duplicate key `{key}` on line {line}")]
    Duplicate { key: String, line: usize },
    #[error("cannot read config file `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Spectrum,
    Classical,
    Obse,
    G2,
    Anticrossing,
    Nonclassical,
    Transient,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::Spectrum,
        Mode::Classical,
        Mode::Obse,
        Mode::G2,
        Mode::Anticrossing,
        Mode::Nonclassical,
        Mode::Transient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Classical => "classical",
            Mode::Obse => "obse",
            Mode::G2 => "g2",
            Mode::Anticrossing => "anticrossing",
            Mode::Nonclassical => "nonclassical",
            Mode::Transient => "transient",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Mode::ALL.iter().map(|m| m.name()).collect();
                format!("expected one of {}, got `{s}`", names.join(", "))
            })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("expected csv or json, got `{s}`")),
        }
    }
}

/// Field operator selected for correlation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldMode {
    Cw,
    Ccw,
    Sw1,
    Sw2,
}

impl FieldMode {
    pub fn name(self) -> &'static str {
        match self {
            FieldMode::Cw => "cw",
            FieldMode::Ccw => "ccw",
            FieldMode::Sw1 => "sw1",
            FieldMode::Sw2 => "sw2",
        }
    }
}

impl FromStr for FieldMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cw" => Ok(FieldMode::Cw),
            "ccw" => Ok(FieldMode::Ccw),
            "sw1" => Ok(FieldMode::Sw1),
            "sw2" => Ok(FieldMode::Sw2),
            _ => Err(format!("expected cw, ccw, sw1 or sw2, got `{s}`")),
        }
    }
}

/// Uniform grid `[min, max]` with `points` samples, in display units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.points)
    }

    /// Values converted from GHz to rad/ns.
    pub fn rad(&self) -> Vec<f64> {
        self.values().into_iter().map(ghz).collect()
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub preset: Option<String>,
    pub g0_ghz: f64,
    pub beta_ghz: f64,
    pub xi_rad: f64,
    pub kappa_t_ghz: f64,
    pub kappa_e_ghz: f64,
    pub gamma_par_ghz: f64,
    pub gamma_p_ghz: f64,
    pub delta_ac_ghz: f64,
    /// Input photon flux (photons/ns).
    pub p_in: f64,
    pub n_max_cw: usize,
    pub n_max_ccw: usize,
    pub delta_lc: Grid,
    pub delta_ac: Grid,
    pub min_dip_depth: f64,
    pub omega_l_ghz: f64,
    pub g2_a: FieldMode,
    pub g2_b: FieldMode,
    /// Delay grid in ns, starting at zero.
    pub tau_max_ns: f64,
    pub tau_points: usize,
    pub t_max_ns: f64,
    pub t_points: usize,
    pub output: Option<String>,
    pub format: Format,
}

/// Parses config text into ordered `(key, value)` pairs. `#` starts a
/// comment; blank lines are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: k + 1,
                reason: format!("expected `key = value`, got `{line}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        if out.iter().any(|(seen, _)| seen == key) {
            return Err(ConfigError::Duplicate {
                key: key.to_string(),
                line: k + 1,
            });
        }
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

/// Formats a float so that it parses back to the same value. Very small or
/// large magnitudes use exponent notation.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e7).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Layers of raw values, lowest priority first.
#[derive(Debug, Default, Clone)]
pub struct Layers {
    pub file: Vec<(String, String)>,
    pub cli: Vec<(String, String)>,
}

impl Layers {
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let lookup = |key: &str| -> Option<&String> {
            self.cli
                .iter()
                .chain(self.file.iter())
                .find(|(k, _)| k == key)
                .map(|(_, v)| v)
        };
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        if let Some(name) = lookup("preset") {
            let preset = presets::find(name)
                .ok_or_else(|| invalid("preset", format!("unknown preset `{name}` (see list-presets)")))?;
            raw.extend(preset.pairs());
            raw.insert("preset".into(), name.clone());
        }
        for (k, v) in self.file.iter().chain(self.cli.iter()) {
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey(k.clone()));
            }
            raw.insert(k.clone(), v.clone());
        }
        RunConfig::from_raw(&raw)
    }
}

fn get<T: FromStr>(raw: &BTreeMap<String, String>, key: &str, default: T) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    match raw.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|e: T::Err| invalid(key, e.to_string())),
    }
}

fn get_opt<T: FromStr>(raw: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    raw.get(key)
        .map(|v| v.parse().map_err(|e: T::Err| invalid(key, e.to_string())))
        .transpose()
}

fn finite(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, "must be finite"))
    }
}

fn non_negative(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be finite and non-negative, got {v}")))
    }
}

impl RunConfig {
    fn from_raw(raw: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let mode: Mode = get_opt(raw, "mode")?.ok_or(ConfigError::Missing("mode"))?;
        let f = |key: &str, default: f64| -> Result<f64, ConfigError> { finite(key, get(raw, key, default)?) };
        let nn = |key: &str, default: f64| -> Result<f64, ConfigError> { non_negative(key, get(raw, key, default)?) };

        let g0_ghz = nn("g0_ghz", 6.0)?;
        let beta_ghz = nn("beta_ghz", 9.6)?;
        let xi_rad = f("xi_rad", 0.0)?;
        let kappa_t_ghz = nn("kappa_t_ghz", 1.2)?;
        let kappa_e_ghz = nn("kappa_e_ghz", 0.44)?;
        if kappa_e_ghz > kappa_t_ghz {
            return Err(invalid("kappa_e_ghz", "must not exceed kappa_t_ghz"));
        }
        let gamma_par_ghz = nn("gamma_par_ghz", 0.16)?;
        let gamma_p_ghz = nn("gamma_p_ghz", 2.4)?;
        let delta_ac_ghz = f("delta_ac_ghz", 0.0)?;
        let p_in = nn("p_in", 1e-5)?;

        let n_max_cw: usize = get(raw, "n_max_cw", 2)?;
        let n_max_ccw: usize = get(raw, "n_max_ccw", 2)?;
        for (key, n) in [("n_max_cw", n_max_cw), ("n_max_ccw", n_max_ccw)] {
            if n == 0 {
                return Err(invalid(key, "truncation must be at least 1"));
            }
        }

        let span = 3.0 * beta_ghz + 3.0 * g0_ghz + 10.0 * kappa_t_ghz;
        let delta_lc = grid(raw, "delta_lc", (-span, span, 401))?;
        let delta_ac = grid(raw, "delta_ac", (-25.0, 25.0, 101))?;

        let min_dip_depth = nn("min_dip_depth", wgm_qed::steady::DEFAULT_DIP_DEPTH)?;
        let omega_l_ghz = f("omega_l_ghz", 0.0)?;
        let g2_a = get(raw, "g2_a", FieldMode::Ccw)?;
        let g2_b = get(raw, "g2_b", FieldMode::Ccw)?;

        let tau_default = if kappa_t_ghz > 0.0 { 10.0 / ghz(kappa_t_ghz) } else { 10.0 };
        let tau_max_ns = nn("tau_max_ns", tau_default)?;
        let tau_points: usize = get(raw, "tau_points", 512)?;
        let t_max_ns = nn("t_max_ns", 2.0)?;
        let t_points: usize = get(raw, "t_points", 201)?;
        for (key, n, max) in [("tau_points", tau_points, tau_max_ns), ("t_points", t_points, t_max_ns)] {
            if n < 2 || !(max > 0.0) {
                return Err(invalid(key, "need at least 2 points over a positive span"));
            }
        }

        Ok(RunConfig {
            mode,
            preset: raw.get("preset").cloned(),
            g0_ghz,
            beta_ghz,
            xi_rad,
            kappa_t_ghz,
            kappa_e_ghz,
            gamma_par_ghz,
            gamma_p_ghz,
            delta_ac_ghz,
            p_in,
            n_max_cw,
            n_max_ccw,
            delta_lc,
            delta_ac,
            min_dip_depth,
            omega_l_ghz,
            g2_a,
            g2_b,
            tau_max_ns,
            tau_points,
            t_max_ns,
            t_points,
            output: raw.get("output").cloned(),
            format: get(raw, "format", Format::Csv)?,
        })
    }

    /// Resolved parameters in rad/ns.
    pub fn system_params(&self) -> SystemParams {
        SystemParams::from_ghz(
            self.g0_ghz,
            self.beta_ghz,
            self.kappa_t_ghz,
            self.kappa_e_ghz,
            self.gamma_par_ghz,
            self.gamma_p_ghz,
        )
        .with_xi(self.xi_rad)
        .with_delta_ac(ghz(self.delta_ac_ghz))
        .with_p_in(self.p_in)
    }

    pub fn space(&self) -> HilbertSpace {
        HilbertSpace::new(self.n_max_cw, self.n_max_ccw).expect("truncation validated on resolution")
    }

    pub fn omega_l(&self) -> f64 {
        ghz(self.omega_l_ghz)
    }

    pub fn taus(&self) -> Vec<f64> {
        linspace(0.0, self.tau_max_ns, self.tau_points)
    }

    pub fn times(&self) -> Vec<f64> {
        linspace(0.0, self.t_max_ns, self.t_points)
    }

    /// ξ reduced to `[0, 2π)`.
    pub fn xi_reduced(&self) -> f64 {
        self.xi_rad.rem_euclid(TAU)
    }

    /// The settings that determine the computed data, as re-loadable
    /// `key = value` pairs. Output path and format are omitted.
    pub fn echo_pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![("mode", self.mode.to_string())];
        if let Some(p) = &self.preset {
            out.push(("preset", p.clone()));
        }
        let floats = [
            ("g0_ghz", self.g0_ghz),
            ("beta_ghz", self.beta_ghz),
            ("xi_rad", self.xi_rad),
            ("kappa_t_ghz", self.kappa_t_ghz),
            ("kappa_e_ghz", self.kappa_e_ghz),
            ("gamma_par_ghz", self.gamma_par_ghz),
            ("gamma_p_ghz", self.gamma_p_ghz),
            ("delta_ac_ghz", self.delta_ac_ghz),
            ("p_in", self.p_in),
        ];
        out.extend(floats.iter().map(|&(k, v)| (k, fmt_f64(v))));
        out.push(("n_max_cw", self.n_max_cw.to_string()));
        out.push(("n_max_ccw", self.n_max_ccw.to_string()));
        for (prefix, g) in [("delta_lc", &self.delta_lc), ("delta_ac", &self.delta_ac)] {
            let (kmin, kmax, kn) = grid_keys(prefix);
            out.push((kmin, fmt_f64(g.min)));
            out.push((kmax, fmt_f64(g.max)));
            out.push((kn, g.points.to_string()));
        }
        out.push(("min_dip_depth", fmt_f64(self.min_dip_depth)));
        out.push(("omega_l_ghz", fmt_f64(self.omega_l_ghz)));
        out.push(("g2_a", self.g2_a.name().to_string()));
        out.push(("g2_b", self.g2_b.name().to_string()));
        out.push(("tau_max_ns", fmt_f64(self.tau_max_ns)));
        out.push(("tau_points", self.tau_points.to_string()));
        out.push(("t_max_ns", fmt_f64(self.t_max_ns)));
        out.push(("t_points", self.t_points.to_string()));
        out
    }

    /// [`Self::echo_pairs`] as config-file text.
    pub fn echo_text(&self) -> String {
        self.echo_pairs()
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Rates actually used by the solver (rad/ns), for the metadata header.
    pub fn resolved_rates(&self) -> Vec<(&'static str, f64)> {
        let p = self.system_params();
        vec![
            ("g0", p.g0),
            ("beta_mag", p.beta_mag),
            ("xi", p.xi),
            ("kappa_i", p.kappa_i),
            ("kappa_e", p.kappa_e),
            ("kappa_t", p.kappa_t()),
            ("gamma_par", p.gamma_par),
            ("gamma_p", p.gamma_p),
            ("gamma_perp", p.gamma_perp()),
            ("delta_ac", p.delta_ac),
            ("p_in", p.p_in),
        ]
    }
}

fn grid_keys(prefix: &str) -> (&'static str, &'static str, &'static str) {
    match prefix {
        "delta_lc" => ("delta_lc_min_ghz", "delta_lc_max_ghz", "delta_lc_points"),
        _ => ("delta_ac_min_ghz", "delta_ac_max_ghz", "delta_ac_points"),
    }
}

fn grid(raw: &BTreeMap<String, String>, prefix: &str, default: (f64, f64, usize)) -> Result<Grid, ConfigError> {
    let (kmin, kmax, kn) = grid_keys(prefix);
    let min = finite(kmin, get(raw, kmin, default.0)?)?;
    let max = finite(kmax, get(raw, kmax, default.1)?)?;
    let points: usize = get(raw, kn, default.2)?;
    if points == 0 {
        return Err(invalid(kn, "grid needs at least one point"));
    }
    if points > 1 && !(max > min) {
        return Err(invalid(kmax, format!("must exceed {kmin}")));
    }
    Ok(Grid { min, max, points })
}

/// GHz value of a rate given in rad/ns, for display.
pub fn display_ghz(omega: f64) -> String {
    fmt_f64(to_ghz(omega))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layers(text: &str) -> Layers {
        Layers {
            file: parse_pairs(text).unwrap(),
            cli: Vec::new(),
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let p = parse_pairs("# header\n\nmode = spectrum  # trailing\n g0_ghz=3\n").unwrap();
        assert_eq!(p, vec![("mode".into(), "spectrum".into()), ("g0_ghz".into(), "3".into())]);
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        assert!(matches!(parse_pairs("g0 = 6"), Err(ConfigError::UnknownKey(k)) if k == "g0"));
        assert!(matches!(parse_pairs("p_in = 1\np_in = 2"), Err(ConfigError::Duplicate { line: 2, .. })));
        assert!(matches!(parse_pairs("mode spectrum"), Err(ConfigError::Syntax { line: 1, .. })));
    }

    #[test]
    fn empty_config_names_mode() {
        let err = layers("").resolve().unwrap_err();
        assert!(err.to_string().contains("`mode`"));
    }

    #[test]
    fn bad_values_name_their_key() {
        for (text, key) in [
            ("mode = spectra", "mode"),
            ("mode = g2\ng0_ghz = -1", "g0_ghz"),
            ("mode = g2\nkappa_e_ghz = 5", "kappa_e_ghz"),
            ("mode = g2\nn_max_cw = 0", "n_max_cw"),
            ("mode = g2\ng2_a = x", "g2_a"),
            ("mode = g2\npreset = nope", "preset"),
            ("mode = g2\ndelta_lc_min_ghz = 3\ndelta_lc_max_ghz = 1", "delta_lc_max_ghz"),
        ] {
            let err = layers(text).resolve().unwrap_err();
            assert!(err.to_string().contains(&format!("`{key}`")), "{text}: {err}");
        }
    }

    #[test]
    fn default_probe_grid_span() {
        let c = layers("mode = spectrum\ng0_ghz = 6\nbeta_ghz = 9.6\nkappa_t_ghz = 1.2").resolve().unwrap();
        assert_eq!(c.delta_lc.points, 401);
        assert!((c.delta_lc.max - (28.8 + 18.0 + 12.0)).abs() < 1e-12);
        assert_eq!(c.delta_lc.min, -c.delta_lc.max);
    }

    #[test]
    fn ghz_entries_become_angular_rates() {
        let c = layers("mode = spectrum\nkappa_t_ghz = 1.2\nkappa_e_ghz = 0.44").resolve().unwrap();
        let p = c.system_params();
        assert_eq!(p.kappa_t(), 1.2 * TAU);
        assert!((p.kappa_t() - 7.539_822_368_615_503).abs() < 1e-12);
    }

    #[test]
    fn echo_round_trips() {
        let c = layers("mode = g2\npreset = fig8a_g2\np_in = 0.00123\nt_points = 7").resolve().unwrap();
        let again = layers(&c.echo_text()).resolve().unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.0, 1.0, -18.085281374238571, 1e-5, 3.2e-12, 123456789.0, 0.1 + 0.2] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(1e-5), "1e-5");
        assert_eq!(fmt_f64(9.6), "9.6");
    }
}
