//! Named parameter sets taken from the figure captions.
//!
//! Rates follow the caption order `{g₀, β, κ_T, κ_e, γ∥, γ_p}/2π` in GHz.
//! Weak-drive spectra use `p_in = 1e-5` photons/ns; correlation and
//! non-classicality runs use `p_in = 1e-3` with three photons per mode.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::config::{fmt_f64, Mode};

/// One named preset.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub figure: &'static str,
    pub summary: &'static str,
    pub mode: Mode,
    /// `{g₀, |β|, κ_T, κ_e, γ∥, γ_p}/2π` in GHz.
    pub rates: [f64; 6],
    pub xi: f64,
    pub delta_ac_ghz: f64,
    pub extra: Vec<(&'static str, String)>,
}

impl Preset {
    /// Config pairs this preset expands to.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let keys = ["g0_ghz", "beta_ghz", "kappa_t_ghz", "kappa_e_ghz", "gamma_par_ghz", "gamma_p_ghz"];
        let mut out = vec![("mode".to_string(), self.mode.to_string())];
        out.extend(keys.iter().zip(self.rates).map(|(k, v)| (k.to_string(), fmt_f64(v))));
        out.push(("xi_rad".into(), fmt_f64(self.xi)));
        out.push(("delta_ac_ghz".into(), fmt_f64(self.delta_ac_ghz)));
        out.extend(self.extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
        out
    }

    /// Caption-style parameter tuple, with β written as `i9.6` for ξ = π/2
    /// and `-9.6` for ξ = π.
    pub fn parameter_set(&self) -> String {
        let [g0, beta, kt, ke, gpar, gp] = self.rates;
        let b = if beta == 0.0 {
            "0".to_string()
        } else if self.xi == FRAC_PI_2 {
            format!("i{beta}")
        } else if self.xi == PI {
            format!("-{beta}")
        } else if self.xi == 0.0 {
            format!("{beta}")
        } else {
            format!("{beta}e^(i{})", self.xi)
        };
        format!("{{{g0}, {b}, {kt}, {ke}, {gpar}, {gp}}} GHz")
    }
}

const FIG4: [f64; 6] = [6.0, 9.6, 1.2, 0.44, 0.16, 2.4];
const BETA0: [f64; 6] = [6.0, 0.0, 1.2, 0.44, 0.16, 0.7];
const STRONG: [f64; 6] = [6.0, 9.6, 1.2, 0.44, 0.16, 0.7];

fn kv(pairs: &[(&'static str, f64)]) -> Vec<(&'static str, String)> {
    pairs.iter().map(|&(k, v)| (k, fmt_f64(v))).collect()
}

fn probe(lo: f64, hi: f64, n: usize) -> Vec<(&'static str, String)> {
    vec![
        ("delta_lc_min_ghz", fmt_f64(lo)),
        ("delta_lc_max_ghz", fmt_f64(hi)),
        ("delta_lc_points", n.to_string()),
    ]
}

fn correlation(omega_l: f64, a: &str, b: &str) -> Vec<(&'static str, String)> {
    let mut v = kv(&[("omega_l_ghz", omega_l), ("p_in", 1e-3)]);
    v.push(("n_max_cw", "3".into()));
    v.push(("n_max_ccw", "3".into()));
    v.push(("g2_a", a.into()));
    v.push(("g2_b", b.into()));
    v
}

fn weak(mut extra: Vec<(&'static str, String)>) -> Vec<(&'static str, String)> {
    extra.push(("p_in", fmt_f64(1e-5)));
    extra
}

#[allow(clippy::too_many_arguments)]
fn preset(
    name: &'static str,
    figure: &'static str,
    summary: &'static str,
    mode: Mode,
    rates: [f64; 6],
    xi: f64,
    delta_ac_ghz: f64,
    extra: Vec<(&'static str, String)>,
) -> Preset {
    Preset {
        name,
        figure,
        summary,
        mode,
        rates,
        xi,
        delta_ac_ghz,
        extra,
    }
}

/// All presets, in figure order.
pub fn all() -> Vec<Preset> {
    let root2g = SQRT_2 * 6.0;
    let fig2_grid = || probe(-30.0, 30.0, 1201);
    let qme_grid = || weak(probe(-30.0, 30.0, 1201));
    let mut v = vec![
        // κ_i/2π = 0.4 GHz corresponds to Q_i ≈ 3×10⁵ near 1.27 µm.
        preset("fig2a", "Fig. 2(a)", "coupled-mode doublet, beta/kappa_T = 8, kappa_T/kappa_i = 3", Mode::Classical,
            [0.0, 9.6, 1.2, 0.8, 0.16, 0.0], 0.0, 0.0, fig2_grid()),
        preset("fig2b", "Fig. 2(b)", "overlapping doublet, beta/kappa_T = 1, kappa_T/kappa_i = 3", Mode::Classical,
            [0.0, 1.2, 1.2, 0.8, 0.16, 0.0], 0.0, 0.0, fig2_grid()),
        preset("fig2c", "Fig. 2(c)", "overcoupled, beta/kappa_T = 1, kappa_T/kappa_i = 20", Mode::Classical,
            [0.0, 8.0, 8.0, 7.6, 0.16, 0.0], 0.0, 0.0, fig2_grid()),
    ];
    let spectra = [
        ("fig4a", "Fig. 4(a)", "xi = 0 spectrum, QD at cavity centre", 0.0, 0.0),
        ("fig4b", "Fig. 4(b)", "xi = 0 spectrum, QD at +beta", 0.0, 9.6),
        ("fig4c", "Fig. 4(c)", "xi = 0 spectrum, QD at -beta", 0.0, -9.6),
        ("fig5a", "Fig. 5(a)", "xi = pi mirror spectrum, QD at cavity centre", PI, 0.0),
        ("fig5b", "Fig. 5(b)", "xi = pi mirror spectrum, QD at +beta", PI, 9.6),
        ("fig5c", "Fig. 5(c)", "xi = pi mirror spectrum, QD at -beta", PI, -9.6),
        ("fig6a", "Fig. 6(a)", "xi = pi/2 spectrum, QD at cavity centre", FRAC_PI_2, 0.0),
        ("fig6b", "Fig. 6(b)", "xi = pi/2 spectrum, QD at +beta", FRAC_PI_2, 9.6),
        ("fig6c", "Fig. 6(c)", "xi = pi/2 spectrum, QD at -beta", FRAC_PI_2, -9.6),
    ];
    for (name, fig, summary, xi, dac) in spectra {
        v.push(preset(name, fig, summary, Mode::Spectrum, FIG4, xi, dac, qme_grid()));
    }
    let mut anti = weak(probe(-40.0, 40.0, 321));
    anti.extend(kv(&[("delta_ac_min_ghz", -24.0), ("delta_ac_max_ghz", 24.0)]));
    anti.push(("delta_ac_points", "97".into()));
    v.push(preset("fig7_anticrossing", "Fig. 7", "dip positions versus QD detuning, both standing modes coupled",
        Mode::Anticrossing, FIG4, FRAC_PI_2, 0.0, anti));
    v.extend([
        preset("sec4b", "Sec. IV.B", "g0 > beta > kappa_T > gamma_perp, QD at -beta", Mode::Spectrum,
            [12.0, 4.8, 1.2, 0.44, 0.16, 2.4], 0.0, -4.8, weak(probe(-40.0, 40.0, 1601))),
        preset("sec4c", "Sec. IV.C", "kappa_T > g0 > beta > gamma_perp", Mode::Spectrum,
            [6.0, 1.2, 9.6, 3.5, 0.16, 0.7], 0.0, 0.0, weak(probe(-40.0, 40.0, 1601))),
        preset("sec4d", "Sec. IV.D", "gamma_par > g0 > beta > kappa_T, QD at -beta", Mode::Spectrum,
            [6.0, 1.2, 0.6, 0.22, 9.4, 0.0], 0.0, -1.2, weak(probe(-30.0, 30.0, 1201))),
        preset("sec4e", "Sec. IV.E", "g0 > kappa_T > beta > gamma_perp", Mode::Spectrum,
            [12.0, 1.2, 6.0, 2.2, 0.16, 0.7], 0.0, 0.0, weak(probe(-40.0, 40.0, 1601))),
        preset("beta0", "Sec. IV, beta = 0", "no backscattering, three-dip spectrum", Mode::Spectrum,
            BETA0, 0.0, 0.0, weak(probe(-30.0, 30.0, 1201))),
        preset("fig8a_g2", "Fig. 8(a)", "g2_ccw,ccw at omega_l = -beta - sqrt2 g0", Mode::G2,
            FIG4, 0.0, -9.6, correlation(-9.6 - root2g, "ccw", "ccw")),
        preset("fig8b_g2", "Fig. 8(b)", "g2_ccw,ccw at omega_l = -beta + sqrt2 g0", Mode::G2,
            FIG4, 0.0, -9.6, correlation(-9.6 + root2g, "ccw", "ccw")),
        preset("fig8c_g2", "Fig. 8(c)", "g2_ccw,ccw at omega_l = +beta", Mode::G2,
            FIG4, 0.0, -9.6, correlation(9.6, "ccw", "ccw")),
        preset("fig9a_g2", "Fig. 9(a)", "g2_ccw,ccw at omega_l = -12.8 GHz", Mode::G2,
            FIG4, FRAC_PI_2, 0.0, correlation(-12.8, "ccw", "ccw")),
        preset("fig9b_g2", "Fig. 9(b)", "g2_ccw,ccw at omega_l = 0", Mode::G2,
            FIG4, FRAC_PI_2, 0.0, correlation(0.0, "ccw", "ccw")),
        preset("fig9c_g2", "Fig. 9(c)", "g2_ccw,ccw at omega_l = +12.8 GHz", Mode::G2,
            FIG4, FRAC_PI_2, 0.0, correlation(12.8, "ccw", "ccw")),
        preset("fig10_beta0_g2", "Fig. 10(a)", "g2_ccw,ccw at omega_l = -sqrt2 g0", Mode::G2,
            BETA0, 0.0, 0.0, correlation(-root2g, "ccw", "ccw")),
        preset("fig10b_beta0_g2", "Fig. 10(b)", "g2_ccw,ccw at omega_l = 0", Mode::G2,
            BETA0, 0.0, 0.0, correlation(0.0, "ccw", "ccw")),
        preset("fig10c_beta0_g2", "Fig. 10(c)", "g2_ccw,ccw at omega_l = +sqrt2 g0", Mode::G2,
            BETA0, 0.0, 0.0, correlation(root2g, "ccw", "ccw")),
        preset("fig11_sw1_g2", "Fig. 11 (top)", "g2_sw1,sw1 at omega_l = -sqrt2 g0", Mode::G2,
            BETA0, 0.0, 0.0, correlation(-root2g, "sw1", "sw1")),
        preset("fig11_sw2_g2", "Fig. 11 (bottom)", "g2_sw2,sw2 at omega_l = -sqrt2 g0", Mode::G2,
            BETA0, 0.0, 0.0, correlation(-root2g, "sw2", "sw2")),
    ]);
    let mut cs = correlation(0.0, "cw", "ccw");
    cs.extend(probe(-20.0, 20.0, 161));
    v.push(preset("fig12a_cauchy_schwarz", "Fig. 12(a)", "zero-delay Cauchy-Schwarz test across omega_l",
        Mode::Nonclassical, BETA0, 0.0, 0.0, cs));
    let mut tr = correlation(-6.0, "cw", "ccw");
    tr.extend(kv(&[("t_max_ns", 2.0)]));
    tr.push(("t_points", "201".into()));
    v.push(preset("fig12b_transient", "Fig. 12(b)", "equal-time correlations from vacuum at omega_l = -6 GHz",
        Mode::Transient, BETA0, 0.0, 0.0, tr));
    let mut strong = kv(&[("p_in", 30.0)]);
    strong.push(("n_max_cw", "5".into()));
    strong.push(("n_max_ccw", "5".into()));
    strong.extend(probe(-20.0, 20.0, 41));
    v.push(preset("fig13_strong_drive", "Fig. 13", "Mandel and quadrature Q at about 30 photons/ns",
        Mode::Nonclassical, STRONG, FRAC_PI_2, 0.0, strong));
    v.push(preset("obse_xi0", "Sec. III", "bistability state equation, xi = 0, QD at -beta", Mode::Obse,
        FIG4, 0.0, -9.6, kv(&[("p_in", 1e-6)]).into_iter().chain(probe(-30.0, 30.0, 241)).collect()));
    v.push(preset("obse_xi_pi2", "Sec. III", "bistability state equation, xi = pi/2", Mode::Obse,
        FIG4, FRAC_PI_2, 0.0, kv(&[("p_in", 1e-6)]).into_iter().chain(probe(-30.0, 30.0, 241)).collect()));
    v
}

pub fn find(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name == name)
}

/// Human-readable preset table.
pub fn table() -> String {
    let presets = all();
    let w = presets.iter().map(|p| p.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for p in &presets {
        out.push_str(&format!(
            "{:<w$}  {:<16}  {:<13}  {:<38}  {}\n",
            p.name,
            p.figure,
            p.mode.name(),
            p.parameter_set(),
            p.summary,
        ));
    }
    out
}
