//! Classical coupled-mode spectra and the semiclassical optical
//! bistability state equations (OBSE).
//!
//! OBSE amplitudes are expressed as `X± = ⟨(a_cw ± a_ccw)/√2⟩ / √n_s`. For
//! ξ = 0 these are the standing-wave modes; for ξ = π/2 they are the even
//! and odd superpositions that diagonalize the QD coupling.

use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;

use crate::model::SystemParams;
use crate::ode::{integrate, Tolerances};
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// One point of the empty-cavity coupled-mode spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalRecord {
    pub delta_lc: f64,
    /// `|s₊ + i√(2κ_e) a_cw|² / |s₊|²`
    pub transmission: f64,
    /// `|i√(2κ_e) a_ccw|² / |s₊|²`
    pub reflection: f64,
}

/// Steady-state transmission and reflection of the two coupled travelling
/// modes without the QD, normalized to the input power.
pub fn classical_spectrum(params: &SystemParams, delta_lc_grid: &[f64]) -> Vec<ClassicalRecord> {
    delta_lc_grid
        .par_iter()
        .map(|&delta_lc| {
            let (a_cw, a_ccw) = classical_amplitudes(params, delta_lc, 1.0);
            let k = (2.0 * params.kappa_e).sqrt();
            ClassicalRecord {
                delta_lc,
                transmission: (C64::new(1.0, 0.0) + I * k * a_cw).norm_sqr(),
                reflection: (k * a_ccw).norm_sqr(),
            }
        })
        .collect()
}

/// Steady-state `(a_cw, a_ccw)` for input amplitude `s` (real).
pub fn classical_amplitudes(params: &SystemParams, delta_lc: f64, s: f64) -> (C64, C64) {
    let d_cl = -delta_lc;
    let diag = C64::new(params.kappa_t(), d_cl);
    let to_cw = I * C64::from_polar(params.beta_mag, params.xi);
    let to_ccw = I * C64::from_polar(params.beta_mag, -params.xi);
    let drive = I * (2.0 * params.kappa_e).sqrt() * s;
    // [diag, −to_cw; −to_ccw, diag] (a_cw, a_ccw)ᵀ = (drive, 0)ᵀ
    let det = diag * diag - to_cw * to_ccw;
    (diag * drive / det, to_ccw * drive / det)
}

/// Dimensionless OBSE parameters at one probe detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObseParams {
    /// Saturation photon number γ⊥γ∥ / 4g₀².
    pub n_s: f64,
    /// Cooperativity g₀² / 2κ_Tγ⊥.
    pub cooperativity: f64,
    /// E / (√(2n_s) κ_T).
    pub y: C64,
    pub delta_cl: f64,
    pub delta_al: f64,
    pub kappa_t: f64,
    pub gamma_perp: f64,
    pub beta_mag: f64,
}

impl ObseParams {
    pub fn from_params(params: &SystemParams, delta_lc: f64) -> Result<Self> {
        params.validate()?;
        let kappa_t = params.kappa_t();
        let gamma_perp = params.gamma_perp();
        if params.g0 == 0.0 {
            return Err(Error::ZeroDenominator { which: "g0", value: 0.0 });
        }
        if kappa_t == 0.0 {
            return Err(Error::ZeroDenominator { which: "kappa_t", value: 0.0 });
        }
        if gamma_perp == 0.0 {
            return Err(Error::ZeroDenominator { which: "gamma_perp", value: 0.0 });
        }
        let g2 = params.g0 * params.g0;
        let n_s = gamma_perp * params.gamma_par / (4.0 * g2);
        if n_s == 0.0 {
            return Err(Error::ZeroDenominator { which: "n_s", value: 0.0 });
        }
        let delta_cl = -delta_lc;
        Ok(Self {
            n_s,
            cooperativity: g2 / (2.0 * kappa_t * gamma_perp),
            y: params.drive() / ((2.0 * n_s).sqrt() * kappa_t),
            delta_cl,
            delta_al: delta_cl + params.delta_ac,
            kappa_t,
            gamma_perp,
            beta_mag: params.beta_mag,
        })
    }

    fn delta_tilde(&self) -> f64 {
        self.delta_al / self.gamma_perp
    }
}

/// One self-consistent OBSE solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObseRoot {
    pub x_plus: C64,
    pub x_minus: C64,
}

impl ObseRoot {
    /// Travelling-wave amplitudes `(⟨a_cw⟩, ⟨a_ccw⟩)`.
    pub fn travelling_amplitudes(&self, n_s: f64) -> (C64, C64) {
        let f = (n_s / 2.0).sqrt();
        ((self.x_plus + self.x_minus) * f, (self.x_plus - self.x_minus) * f)
    }
}

/// Solves `u·|p|²·|A(2u+w) + K|² = |Y|²(2u+w)²` for `u = |X₊|² ≥ 0`,
/// where `w = 1 + Δ̃²` and `K = 4C(1 − iΔ̃)`. Returns ascending roots.
fn saturable_roots(p: C64, a: C64, o: &ObseParams) -> Vec<f64> {
    let dt = o.delta_tilde();
    let w = 1.0 + dt * dt;
    let k = C64::new(4.0 * o.cooperativity, -4.0 * o.cooperativity * dt);
    let y2 = o.y.norm_sqr();
    if y2 == 0.0 {
        return vec![0.0];
    }
    let p2 = p.norm_sqr();
    let b = a * w + k;
    let c3 = 4.0 * p2 * a.norm_sqr();
    let c2 = 4.0 * p2 * (a * b.conj()).re - 4.0 * y2;
    let c1 = p2 * b.norm_sqr() - 4.0 * w * y2;
    let c0 = -y2 * w * w;
    let f = |u: f64| ((c3 * u + c2) * u + c1) * u + c0;

    // The real part of the bracket is at least Re A ≥ 1 here, so the drive
    // bounds u by |Y|²/|p|²; the factor 4 is a safety margin.
    let u_max = 4.0 * y2 * (1.0 / p2).max(1.0);

    // Monotone pieces of the cubic between its critical points.
    let mut knots = vec![0.0];
    let (qa, qb, qc) = (3.0 * c3, 2.0 * c2, c1);
    let disc = qb * qb - 4.0 * qa * qc;
    if disc > 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (qb + qb.signum() * sq);
        for r in [q / qa, qc / q] {
            if r.is_finite() && r > 0.0 && r < u_max {
                knots.push(r);
            }
        }
    }
    knots.sort_by(f64::total_cmp);
    knots.push(u_max);

    let mut roots = Vec::new();
    for win in knots.windows(2) {
        let (mut lo, mut hi) = (win[0], win[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            if roots.last() != Some(&lo) {
                roots.push(lo);
            }
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        while hi - lo > 1e-12 * hi.max(f64::MIN_POSITIVE) {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
}

fn x_from_u(u: f64, p: C64, a: C64, o: &ObseParams) -> C64 {
    let dt = o.delta_tilde();
    let s = 2.0 * u + 1.0 + dt * dt;
    let k = C64::new(4.0 * o.cooperativity, -4.0 * o.cooperativity * dt);
    o.y / (p * (a + k / s))
}

/// OBSE roots for ξ = 0, ordered by increasing |X₊|. `X₋` is the same for
/// every root.
pub fn obse_xi0(o: &ObseParams) -> Vec<ObseRoot> {
    let b = o.beta_mag / o.kappa_t;
    let d = o.delta_cl / o.kappa_t;
    let a = C64::new(1.0, d - b);
    let p = C64::new(1.0, 0.0);
    let x_minus = o.y / C64::new(1.0, d + b);
    saturable_roots(p, a, o)
        .into_iter()
        .map(|u| ObseRoot {
            x_plus: x_from_u(u, p, a, o),
            x_minus,
        })
        .collect()
}

/// OBSE roots for ξ = π/2, ordered by increasing |X₊|.
pub fn obse_xi_pi2(o: &ObseParams) -> Vec<ObseRoot> {
    let b = o.beta_mag / o.kappa_t;
    let d = o.delta_cl / o.kappa_t;
    let one_id = C64::new(1.0, d);
    let p = one_id / (one_id + b);
    let comp = b * b / (1.0 + d * d);
    let a = C64::new(1.0 + comp, d * (1.0 - comp));
    saturable_roots(p, a, o)
        .into_iter()
        .map(|u| {
            let x_plus = x_from_u(u, p, a, o);
            ObseRoot {
                x_plus,
                x_minus: (o.y - x_plus * b) / one_id,
            }
        })
        .collect()
}

/// Mean-field state in the standing-wave basis of the backscattering phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalState {
    /// ⟨a_SW,1⟩
    pub a_sw1: C64,
    /// ⟨a_SW,2⟩
    pub a_sw2: C64,
    /// ⟨σ₋⟩
    pub sigma_minus: C64,
    /// ⟨σ_z⟩
    pub sigma_z: f64,
}

impl SemiclassicalState {
    /// Empty cavity, QD in the ground state.
    pub fn ground() -> Self {
        Self {
            a_sw1: C64::new(0.0, 0.0),
            a_sw2: C64::new(0.0, 0.0),
            sigma_minus: C64::new(0.0, 0.0),
            sigma_z: -1.0,
        }
    }

    /// `(⟨a_cw⟩, ⟨a_ccw⟩)` for `a_SW,1/2 = (a_cw ± e^{iξ} a_ccw)/√2`.
    pub fn travelling_amplitudes(&self, xi: f64) -> (C64, C64) {
        let cw = (self.a_sw1 + self.a_sw2) * FRAC_1_SQRT_2;
        let ccw = C64::from_polar(FRAC_1_SQRT_2, -xi) * (self.a_sw1 - self.a_sw2);
        (cw, ccw)
    }

    fn to_vec(self) -> [C64; 4] {
        [self.a_sw1, self.a_sw2, self.sigma_minus, C64::new(self.sigma_z, 0.0)]
    }

    fn from_slice(y: &[C64]) -> Self {
        Self {
            a_sw1: y[0],
            a_sw2: y[1],
            sigma_minus: y[2],
            sigma_z: y[3].re,
        }
    }
}

/// Effective couplings `g₀(1 ± e^{iξ})/√2` of the two standing-wave modes.
pub fn standing_wave_couplings(g0: f64, xi: f64) -> (C64, C64) {
    let e = C64::from_polar(1.0, xi);
    ((C64::new(1.0, 0.0) + e) * (g0 * FRAC_1_SQRT_2), (C64::new(1.0, 0.0) - e) * (g0 * FRAC_1_SQRT_2))
}

/// Integrates the factorized mean-field equations at the default
/// tolerances.
pub fn semiclassical_ode(
    params: &SystemParams,
    delta_lc: f64,
    initial: SemiclassicalState,
    times: &[f64],
) -> Result<Vec<SemiclassicalState>> {
    semiclassical_ode_with(params, delta_lc, initial, times, Tolerances::default())
}

pub fn semiclassical_ode_with(
    params: &SystemParams,
    delta_lc: f64,
    initial: SemiclassicalState,
    times: &[f64],
    tol: Tolerances,
) -> Result<Vec<SemiclassicalState>> {
    params.validate()?;
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("times", "grid must be strictly increasing"));
    }
    let d_cl = -delta_lc;
    let d_al = d_cl + params.delta_ac;
    let kappa = params.kappa_t();
    let gperp = params.gamma_perp();
    let gpar = params.gamma_par;
    let bm = params.beta_mag;
    let (g1, g2) = standing_wave_couplings(params.g0, params.xi);
    let e = params.drive() * FRAC_1_SQRT_2;

    let rhs = |_: f64, y: &[C64], dy: &mut [C64]| {
        let (a1, a2, s, z) = (y[0], y[1], y[2], y[3].re);
        dy[0] = C64::new(-kappa, -(d_cl - bm)) * a1 + g1 * s + e;
        dy[1] = C64::new(-kappa, -(d_cl + bm)) * a2 + g2 * s + e;
        dy[2] = C64::new(-gperp, -d_al) * s + (g1.conj() * a1 + g2.conj() * a2) * z;
        let x = (g1 * a1.conj() + g2 * a2.conj()) * s;
        dy[3] = C64::new(-4.0 * x.re - gpar * (1.0 + z), 0.0);
    };
    let out = integrate(rhs, &initial.to_vec(), times, tol)?;
    Ok(out.iter().map(|y| SemiclassicalState::from_slice(y)).collect())
}
