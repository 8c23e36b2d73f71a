//! Physical parameters, Hamiltonian and Liouvillian assembly.
//!
//! Frame: rotating at the probe frequency ω_l, with
//! `Δω_cl = ω_c − ω_l = −Δω_lc` and `Δω_al = Δω_cl + Δω_ac`.
//!
//! Cavity loss uses the field-amplitude convention
//! `κ_T (2 a ρ a† − a†a ρ − ρ a†a)` for each travelling-wave mode, so a
//! photon decays at `2κ_T`.

use std::f64::consts::PI;

use crate::hilbert::{annihilation, qd_lowering, qd_raising, sigma_z, HilbertSpace, Mode, Operator};
use crate::sparse::CsrMatrix;
use crate::units::ghz;
use crate::{DensityMatrix, Error, Result, C64};

/// Speed of light in µm/ns.
const SPEED_OF_LIGHT_UM_PER_NS: f64 = 2.997_924_58e5;

/// Full rate set of the cavity–QD system, all in rad/ns (drive in photons/ns).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// QD coupling to each travelling-wave mode.
    pub g0: f64,
    /// |β|, backscattering rate.
    pub beta_mag: f64,
    /// Backscattering phase ξ (radians), β = |β| e^{iξ}.
    pub xi: f64,
    /// Intrinsic field decay.
    pub kappa_i: f64,
    /// Field decay into the waveguide.
    pub kappa_e: f64,
    /// γ∥, QD spontaneous emission.
    pub gamma_par: f64,
    /// γ_p, QD pure dephasing.
    pub gamma_p: f64,
    /// Δω_ac = ω_a − ω_c.
    pub delta_ac: f64,
    /// Waveguide input photon flux (photons/ns).
    pub p_in: f64,
}

impl SystemParams {
    /// Builds from the `{g₀, β, κ_T, κ_e, γ∥, γ_p}/2π` GHz tuple used in
    /// figure captions. ξ, Δω_ac and the drive start at zero.
    pub fn from_ghz(g0: f64, beta: f64, kappa_t: f64, kappa_e: f64, gamma_par: f64, gamma_p: f64) -> Self {
        Self {
            g0: ghz(g0),
            beta_mag: ghz(beta),
            xi: 0.0,
            kappa_i: ghz(kappa_t - kappa_e),
            kappa_e: ghz(kappa_e),
            gamma_par: ghz(gamma_par),
            gamma_p: ghz(gamma_p),
            delta_ac: 0.0,
            p_in: 0.0,
        }
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_delta_ac(mut self, delta_ac: f64) -> Self {
        self.delta_ac = delta_ac;
        self
    }

    pub fn with_p_in(mut self, p_in: f64) -> Self {
        self.p_in = p_in;
        self
    }

    pub fn with_g0(mut self, g0: f64) -> Self {
        self.g0 = g0;
        self
    }

    pub fn with_gamma_p(mut self, gamma_p: f64) -> Self {
        self.gamma_p = gamma_p;
        self
    }

    /// κ_T = κ_i + κ_e.
    pub fn kappa_t(&self) -> f64 {
        self.kappa_i + self.kappa_e
    }

    /// γ⊥ = γ∥/2 + γ_p.
    pub fn gamma_perp(&self) -> f64 {
        self.gamma_par / 2.0 + self.gamma_p
    }

    /// β = |β| e^{iξ}.
    pub fn beta(&self) -> C64 {
        C64::from_polar(self.beta_mag, self.xi)
    }

    /// E = i √(2 κ_e P_in).
    pub fn drive(&self) -> C64 {
        C64::new(0.0, (2.0 * self.kappa_e * self.p_in).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("g0", self.g0),
            ("beta", self.beta_mag),
            ("kappa_i", self.kappa_i),
            ("kappa_e", self.kappa_e),
            ("gamma_par", self.gamma_par),
            ("gamma_p", self.gamma_p),
            ("p_in", self.p_in),
        ];
        for (name, v) in checks {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(name, format!("must be finite and non-negative, got {v}")));
            }
        }
        if !self.xi.is_finite() || !self.delta_ac.is_finite() {
            return Err(Error::invalid("xi/delta_ac", "must be finite"));
        }
        Ok(())
    }
}

/// `H₀ + H₁` at probe–cavity detuning `delta_lc` (rad/ns).
pub fn build_hamiltonian(space: HilbertSpace, params: &SystemParams, delta_lc: f64) -> Operator {
    let i = C64::new(0.0, 1.0);
    let d_cl = -delta_lc;
    let d_al = d_cl + params.delta_ac;
    let beta = params.beta();
    let e = params.drive();
    let g = C64::new(params.g0, 0.0);

    let a = annihilation(space, Mode::Cw);
    let b = annihilation(space, Mode::Ccw);
    let ad = a.dagger();
    let bd = b.dagger();
    let sm = qd_lowering(space);
    let sp = qd_raising(space);

    let mut h = &(&ad * &a) + &(&bd * &b);
    h = h.scale(C64::new(d_cl, 0.0));
    h = &h - &(&ad * &b).scale(beta);
    h = &h - &(&bd * &a).scale(beta.conj());
    h = &h + &(&ad.scale(e) - &a.scale(e.conj())).scale(i);
    h = &h + &(&sp * &sm).scale(C64::new(d_al, 0.0));
    for (c, cd) in [(&a, &ad), (&b, &bd)] {
        h = &h + &(&(cd * &sm) - &(c * &sp)).scale(i * g);
    }
    h
}

/// Column-stacked superoperator acting on `vec(ρ)`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    space: HilbertSpace,
    matrix: CsrMatrix,
    delta_lc: f64,
    amplitude_scales: [f64; 3],
}

impl Liouvillian {
    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn delta_lc(&self) -> f64 {
        self.delta_lc
    }

    /// Amplitude scales for `(a_cw, a_ccw, σ₋)`: ten times the weak-drive
    /// linear response, at least a tenth of the largest, at most 1. All
    /// ones when the response is undefined.
    pub fn amplitude_scales(&self) -> [f64; 3] {
        self.amplitude_scales
    }

    /// d² for a d-dimensional Hilbert space.
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.mul_vec(v)
    }

    pub fn apply_rho(&self, rho: &DensityMatrix) -> Result<Operator> {
        let v = self.apply(&rho.to_vec());
        Ok(DensityMatrix::seed_from_vec(self.space, &v)?.as_operator().clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    /// Vectorized trace functional `1ᵀ` (ones at the diagonal entries of ρ).
    pub fn trace_functional(&self) -> Vec<C64> {
        trace_functional(self.space.dim())
    }

    /// `max |1ᵀ L| / max |L|`; zero for an exactly trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let row = self.matrix.left_mul_vec(&self.trace_functional());
        row.iter().map(|v| v.norm()).fold(0.0, f64::max) / scale
    }
}

pub(crate) fn trace_functional(d: usize) -> Vec<C64> {
    let mut w = vec![C64::new(0.0, 0.0); d * d];
    for k in 0..d {
        w[k + d * k] = C64::new(1.0, 0.0);
    }
    w
}

/// Accumulates `c · A ρ B` as `c (Bᵀ ⊗ A)` in column-stacked layout.
struct SuperopBuilder {
    d: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SuperopBuilder {
    fn new(d: usize) -> Self {
        Self { d, entries: Vec::new() }
    }

    fn sandwich(&mut self, coeff: C64, left: Option<&Operator>, right: Option<&Operator>) {
        if coeff == C64::new(0.0, 0.0) {
            return;
        }
        let d = self.d;
        let diag: Vec<(usize, usize, C64)> = (0..d).map(|k| (k, k, C64::new(1.0, 0.0))).collect();
        let lnz: Vec<_> = left.map_or_else(|| diag.clone(), |a| a.nonzeros().collect());
        let rnz: Vec<_> = right.map_or(diag, |b| b.nonzeros().collect());
        // (A ρ B)_{ij} = Σ A_ik ρ_kl B_lj
        for &(i, k, a) in &lnz {
            for &(l, j, b) in &rnz {
                self.entries.push((i + d * j, k + d * l, coeff * a * b));
            }
        }
    }

    fn finish(self) -> CsrMatrix {
        let n = self.d * self.d;
        CsrMatrix::from_triplets(n, n, self.entries)
    }
}

/// Lindblad generator for the driven cavity–QD system.
pub fn build_liouvillian(space: HilbertSpace, params: &SystemParams, delta_lc: f64) -> Liouvillian {
    let h = build_hamiltonian(space, params, delta_lc);
    let i = C64::new(0.0, 1.0);
    let mut sb = SuperopBuilder::new(space.dim());

    // −i [H, ρ]
    sb.sandwich(-i, Some(&h), None);
    sb.sandwich(i, None, Some(&h));

    let mut dissipator = |rate: f64, c: &Operator| {
        let cd = c.dagger();
        let cdc = &cd * c;
        let r = C64::new(rate, 0.0);
        sb.sandwich(r * 2.0, Some(c), Some(&cd));
        sb.sandwich(-r, Some(&cdc), None);
        sb.sandwich(-r, None, Some(&cdc));
    };
    let kappa_t = params.kappa_t();
    dissipator(kappa_t, &annihilation(space, Mode::Cw));
    dissipator(kappa_t, &annihilation(space, Mode::Ccw));
    dissipator(params.gamma_par / 2.0, &qd_lowering(space));

    // (γ_p / 2)(σ_z ρ σ_z − ρ)
    let sz = sigma_z(space);
    let half_gp = C64::new(params.gamma_p / 2.0, 0.0);
    sb.sandwich(half_gp, Some(&sz), Some(&sz));
    sb.sandwich(-half_gp, None, None);

    Liouvillian {
        space,
        matrix: sb.finish(),
        delta_lc,
        amplitude_scales: amplitude_scales(params, delta_lc),
    }
}

/// Linear response of `(a_cw, a_ccw, σ₋)` with σ_z frozen at −1.
fn amplitude_scales(params: &SystemParams, delta_lc: f64) -> [f64; 3] {
    let i = C64::new(0.0, 1.0);
    let d_cl = -delta_lc;
    let cav = -C64::new(params.kappa_t(), d_cl);
    let qd = -C64::new(params.gamma_perp(), d_cl + params.delta_ac);
    let beta = params.beta();
    let g = C64::new(params.g0, 0.0);
    let mut m = [
        [cav, i * beta, g, -params.drive()],
        [i * beta.conj(), cav, g, C64::new(0.0, 0.0)],
        [-g, -g, qd, C64::new(0.0, 0.0)],
    ];
    // Gaussian elimination with partial pivoting on the augmented matrix
    for col in 0..3 {
        let piv = (col..3).max_by(|&r, &s| m[r][col].norm().total_cmp(&m[s][col].norm())).unwrap();
        m.swap(col, piv);
        if m[col][col].norm() == 0.0 {
            return [1.0; 3];
        }
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..4 {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
        }
    }
    let mut x = [C64::new(0.0, 0.0); 3];
    for r in (0..3).rev() {
        let mut acc = m[r][3];
        for c in r + 1..3 {
            acc -= m[r][c] * x[c];
        }
        x[r] = acc / m[r][r];
    }
    let mags = x.map(|z| z.norm());
    let top = mags.iter().copied().fold(0.0, f64::max);
    if !(top > 0.0 && top.is_finite()) {
        return [1.0; 3];
    }
    // Incoherent scattering raises √n above |⟨a⟩|; overestimates only cost
    // a factor 10 per excitation in relative precision.
    mags.map(|v| (10.0 * v.max(0.1 * top)).min(1.0))
}

/// QD–travelling-wave coupling rate g₀ (rad/ns) for a dot at the field
/// maximum of a mode with effective volume `v_eff_in_cubic_wavelengths · (λ₀/n)³`.
///
/// `tau_sp` in ns, `lambda0` in µm. The refractive index cancels in this
/// parametrization but is still validated.
pub fn coupling_rate_g0(tau_sp: f64, lambda0: f64, n_refractive: f64, v_eff_in_cubic_wavelengths: f64) -> Result<f64> {
    for (name, v) in [
        ("tau_sp", tau_sp),
        ("lambda0", lambda0),
        ("n_refractive", n_refractive),
        ("v_eff", v_eff_in_cubic_wavelengths),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(name, format!("must be positive, got {v}")));
        }
    }
    let v_eff = v_eff_in_cubic_wavelengths * (lambda0 / n_refractive).powi(3);
    let c = SPEED_OF_LIGHT_UM_PER_NS;
    let arg = 3.0 * c * lambda0 * lambda0 * tau_sp / (2.0 * PI * n_refractive.powi(3) * v_eff);
    Ok(arg.sqrt() / (2.0 * tau_sp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::to_ghz;

    fn space() -> HilbertSpace {
        HilbertSpace::symmetric(2).unwrap()
    }

    #[test]
    fn bare_cavity_hamiltonian_is_number_sum() {
        let p = SystemParams::from_ghz(0.0, 0.0, 1.0, 0.5, 0.0, 0.0).with_delta_ac(-1.0);
        // Δω_cl = 1 with Δω_al = 0
        let h = build_hamiltonian(space(), &p, -1.0);
        let ev = h.hermitian_eigenvalues();
        for v in ev {
            assert!((v - v.round()).abs() < 1e-12 && (0.0..=4.0).contains(&v.round()));
        }
    }

    #[test]
    fn backscattering_splits_one_photon_block() {
        let beta = 2.5;
        let p = SystemParams {
            beta_mag: beta,
            ..SystemParams::from_ghz(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        };
        let s = space();
        let h = build_hamiltonian(s, &p, 0.0);
        let i10 = s.index(1, 0, false);
        let i01 = s.index(0, 1, false);
        // 2×2 block in {|1,0⟩, |0,1⟩}
        assert_eq!(h.get(i10, i01), C64::new(-beta, 0.0));
        assert_eq!(h.get(i01, i10), C64::new(-beta, 0.0));
        let ev = h.hermitian_eigenvalues();
        assert!(ev.iter().any(|v| (v + beta).abs() < 1e-12));
        assert!(ev.iter().any(|v| (v - beta).abs() < 1e-12));
    }

    #[test]
    fn g0_formula_examples() {
        let g = coupling_rate_g0(1.0, 1.265_41, 3.4, 5.6).unwrap();
        assert!((to_ghz(g) - 11.3).abs() < 0.05, "g0/2π = {}", to_ghz(g));
        let g_half = coupling_rate_g0(1.0, 1.265_41, 3.4, 2.8).unwrap();
        assert!((g_half / g - 2f64.sqrt()).abs() < 1e-12);
        let g4 = coupling_rate_g0(4.0, 1.265_41, 3.4, 5.6).unwrap();
        assert!((g4 / g - 0.5).abs() < 1e-12);
        // n cancels
        let g_n = coupling_rate_g0(1.0, 1.265_41, 2.0, 5.6).unwrap();
        assert!((g_n - g).abs() < 1e-12);
        assert!(coupling_rate_g0(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(coupling_rate_g0(1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn zero_rates_give_zero_generator() {
        let p = SystemParams::from_ghz(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let l = build_liouvillian(space(), &p, 0.0);
        assert_eq!(l.matrix().nnz(), 0);
    }

    #[test]
    fn maximally_mixed_maps_to_traceless() {
        let p = SystemParams::from_ghz(6.0, 9.6, 1.2, 0.44, 0.16, 2.4)
            .with_xi(0.7)
            .with_p_in(3.0);
        let s = space();
        let l = build_liouvillian(s, &p, ghz(2.0));
        let out = l.apply(&DensityMatrix::maximally_mixed(s).to_vec());
        let tr: C64 = l.trace_functional().iter().zip(&out).map(|(w, v)| w * v).sum();
        assert!(tr.norm() < 1e-12 * l.max_abs());
        assert!(l.trace_defect() < 1e-14);
    }

    #[test]
    fn derived_rates() {
        let p = SystemParams::from_ghz(6.0, 9.6, 1.2, 0.44, 0.16, 2.4).with_p_in(2.0);
        assert!((p.kappa_t() - ghz(1.2)).abs() < 1e-12);
        assert!((p.gamma_perp() - ghz(0.08 + 2.4)).abs() < 1e-12);
        let e = p.drive();
        assert_eq!(e.re, 0.0);
        assert!((e.im - (2.0 * ghz(0.44) * 2.0).sqrt()).abs() < 1e-12);
        assert!(p.validate().is_ok());
        assert!(SystemParams::from_ghz(1.0, 1.0, 0.2, 0.44, 0.0, 0.0).validate().is_err());
    }
}
