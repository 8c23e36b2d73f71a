//! Comparisons against independently computed reference values.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use nalgebra::{Complex, DMatrix, Matrix3, Vector3};
use wgm_qed::analysis::{mandel_q, quadrature_variance, Quadrature};
use wgm_qed::classical::{
    classical_spectrum, obse_xi0, obse_xi_pi2, semiclassical_ode_with, ObseParams, SemiclassicalState,
};
use wgm_qed::hilbert::annihilation;
use wgm_qed::model::{build_hamiltonian, build_liouvillian, coupling_rate_g0};
use wgm_qed::ode::Tolerances;
use wgm_qed::steady::{linspace, solve_steady_state, spectrum_point, sweep_probe};
use wgm_qed::units::{ghz, to_ghz};
use wgm_qed::{DensityMatrix, HilbertSpace, Mode, SystemParams, C64};

type Z = Complex<f64>;

fn fig4() -> SystemParams {
    SystemParams::from_ghz(6.0, 9.6, 1.2, 0.44, 0.16, 2.4)
}

fn rel_err(x: C64, reference: C64) -> f64 {
    (x - reference).norm() / reference.norm()
}

#[test]
fn coherent_state_moments() {
    let s = HilbertSpace::new(20, 1).unwrap();
    let alpha = C64::new(0.3, 0.4);
    let mut psi = vec![C64::new(0.0, 0.0); s.dim()];
    // Poisson amplitudes e^{-|α|²/2} αⁿ/√n!
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..=20 {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        psi[s.index(n, 0, false)] = c;
    }
    let rho = DensityMatrix::pure(s, &psi).unwrap();
    let a = annihilation(s, Mode::Cw);
    assert!((rho.expectation(&a).unwrap() - alpha).norm() < 1e-12);
    assert!((rho.expectation(&(&a.dagger() * &a)).unwrap().re - 0.25).abs() < 1e-12);
    assert!(mandel_q(&rho, &a).unwrap().abs() < 1e-10);
    for q in [Quadrature::X1, Quadrature::X2] {
        assert!((quadrature_variance(&rho, &a, q).unwrap() - 0.25).abs() < 1e-10);
    }
}

/// Single-excitation block in the basis `|1,0,g⟩, |0,1,g⟩, |0,0,e⟩`.
fn one_excitation_block(p: &SystemParams, delta_lc: f64) -> DMatrix<Z> {
    let d_cl = -delta_lc;
    let d_al = d_cl + p.delta_ac;
    let beta = Z::from_polar(p.beta_mag, p.xi);
    let ig = Z::new(0.0, p.g0);
    DMatrix::from_row_slice(
        3,
        3,
        &[
            Z::new(d_cl, 0.0),
            -beta,
            ig,
            -beta.conj(),
            Z::new(d_cl, 0.0),
            ig,
            -ig,
            -ig,
            Z::new(d_al, 0.0),
        ],
    )
}

#[test]
fn single_excitation_eigenvalues() {
    let s = HilbertSpace::symmetric(1).unwrap();
    let cases = [
        (SystemParams::from_ghz(6.0, 0.0, 1.2, 0.44, 0.16, 0.0), 0.0),
        (fig4(), ghz(3.0)),
        (fig4().with_xi(FRAC_PI_2).with_delta_ac(ghz(-7.0)), ghz(-11.0)),
        (fig4().with_xi(2.1).with_delta_ac(ghz(4.0)), ghz(5.5)),
    ];
    for (p, dlc) in cases {
        let full = build_hamiltonian(s, &p, dlc).hermitian_eigenvalues();
        let block = one_excitation_block(&p, dlc).symmetric_eigen().eigenvalues;
        for ev in block.iter() {
            let nearest = full.iter().map(|x| (x - ev).abs()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-10, "{ev} missing from {full:?}");
        }
    }
    let g0 = ghz(6.0);
    let mut ev: Vec<f64> = one_excitation_block(&cases[0].0, 0.0).symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    for (x, want) in ev.iter().zip([-SQRT_2 * g0, 0.0, SQRT_2 * g0]) {
        assert!((x - want).abs() < 1e-10);
    }
}

#[test]
fn coupling_rate_from_emitter_lifetime() {
    // SI evaluation of (1/2τ)√(3cλ²τ / 2πn³V) with V = 5.6 (λ/n)³.
    let (tau, lambda, n): (f64, f64, f64) = (1e-9, 1.26541e-6, 3.4);
    let v = 5.6 * (lambda / n).powi(3);
    let g = (3.0 * 2.99792458e8 * lambda * lambda * tau / (2.0 * PI * n.powi(3) * v)).sqrt() / (2.0 * tau);
    let got = coupling_rate_g0(1.0, 1.26541, n, 5.6).unwrap();
    assert!((got * 1e9 - g).abs() < 1e-9 * g);
    assert!((to_ghz(got) - 11.3).abs() < 0.05);
    let halved = coupling_rate_g0(1.0, 1.26541, n, 2.8).unwrap();
    assert!((halved / got - SQRT_2).abs() < 1e-12);
    assert!(coupling_rate_g0(0.0, 1.26541, n, 5.6).is_err());
}

#[test]
fn empty_cavity_matches_coupled_modes() {
    let sets = [(9.6, 0.8), (1.2, 0.8), (8.0, 7.6)];
    for (beta, ke) in sets {
        let kt = if beta == 8.0 { 8.0 } else { 1.2 };
        let p = SystemParams::from_ghz(0.0, beta, kt, ke, 0.16, 0.0).with_p_in(1e-5);
        let grid = linspace(ghz(-30.0), ghz(30.0), 201);
        let q = sweep_probe(HilbertSpace::symmetric(2).unwrap(), &p, &grid).unwrap();
        let c = classical_spectrum(&p, &grid);
        for (x, y) in q.iter().zip(&c) {
            assert!((x.transmission - y.transmission).abs() < 1e-8);
            assert!((x.reflection - y.reflection).abs() < 1e-8);
        }
    }
}

/// Steady state of the factorized equations with σ_z frozen at −1.
fn linear_response(p: &SystemParams, delta_lc: f64) -> (Z, Z, Z) {
    let d_cl = -delta_lc;
    let d_al = d_cl + p.delta_ac;
    let cav = Z::new(-p.kappa_t(), -d_cl);
    let beta = Z::from_polar(p.beta_mag, p.xi);
    let i = Z::new(0.0, 1.0);
    let g = Z::new(p.g0, 0.0);
    let e = Z::new(0.0, (2.0 * p.kappa_e * p.p_in).sqrt());
    let m = Matrix3::new(
        cav,
        i * beta,
        g,
        i * beta.conj(),
        cav,
        g,
        -g,
        -g,
        Z::new(-p.gamma_perp(), -d_al),
    );
    let x = m.lu().solve(&Vector3::new(-e, Z::new(0.0, 0.0), Z::new(0.0, 0.0))).unwrap();
    (x[0], x[1], x[2])
}

#[test]
fn weak_drive_follows_linear_response() {
    let space = HilbertSpace::symmetric(2).unwrap();
    let cases = [
        fig4(),
        fig4().with_delta_ac(ghz(-9.6)),
        fig4().with_xi(FRAC_PI_2),
        SystemParams::from_ghz(6.0, 0.0, 1.2, 0.44, 0.16, 0.7),
        SystemParams::from_ghz(6.0, 9.6, 1.2, 0.44, 0.16, 0.0).with_delta_ac(ghz(5.0)),
    ];
    for p in cases {
        let p = p.with_p_in(1e-7);
        let k = (2.0 * p.kappa_e).sqrt();
        for dlc in linspace(ghz(-25.0), ghz(25.0), 41) {
            let (a_cw, _, _) = linear_response(&p, dlc);
            let t_lin = (Z::new(1.0, 0.0) + Z::new(0.0, k) * a_cw / p.p_in.sqrt()).norm_sqr();
            let r = spectrum_point(space, &p, dlc).unwrap();
            assert!((r.transmission_coherent - t_lin).abs() < 1e-4, "{} vs {t_lin}", r.transmission_coherent);
            // pure dephasing scatters incoherently already at linear order
            if p.gamma_p == 0.0 {
                assert!((r.transmission - t_lin).abs() < 1e-4, "{} vs {t_lin}", r.transmission);
            }
        }
    }
}

/// QME `(⟨a_cw⟩, ⟨a_ccw⟩)` at one probe detuning.
fn qme_amplitudes(p: &SystemParams, delta_lc: f64) -> (C64, C64) {
    let space = HilbertSpace::symmetric(2).unwrap();
    let rho = solve_steady_state(&build_liouvillian(space, p, delta_lc)).unwrap();
    (
        rho.expectation(&annihilation(space, Mode::Cw)).unwrap(),
        rho.expectation(&annihilation(space, Mode::Ccw)).unwrap(),
    )
}

#[test]
fn state_equations_match_master_equation_at_weak_drive() {
    let presets = [
        (fig4().with_delta_ac(ghz(-9.6)).with_p_in(1e-6), true),
        (fig4().with_xi(FRAC_PI_2).with_p_in(1e-6), false),
    ];
    for (p, xi0) in presets {
        for dlc in linspace(ghz(-30.0), ghz(30.0), 61) {
            let o = ObseParams::from_params(&p, dlc).unwrap();
            let roots = if xi0 { obse_xi0(&o) } else { obse_xi_pi2(&o) };
            assert_eq!(roots.len(), 1, "weak drive is monostable");
            let (cw, ccw) = roots[0].travelling_amplitudes(o.n_s);
            let (q_cw, q_ccw) = qme_amplitudes(&p, dlc);
            assert!(rel_err(cw, q_cw) < 1e-4, "cw {cw} vs {q_cw}");
            // ccw is fed only through backscattering and the dot
            if q_ccw.norm() > 1e-3 * q_cw.norm() {
                assert!(rel_err(ccw, q_ccw) < 1e-4, "ccw {ccw} vs {q_ccw}");
            }
        }
    }
}

#[test]
fn mean_field_relaxes_to_state_equation_root() {
    let tol = Tolerances { rtol: 1e-10, atol: 1e-14 };
    let presets = [
        (fig4().with_delta_ac(ghz(-9.6)).with_p_in(1e-6), true),
        (fig4().with_xi(FRAC_PI_2).with_p_in(1e-6), false),
        (fig4().with_p_in(0.5), true),
    ];
    for (p, xi0) in presets {
        for dlc in [ghz(-18.0), ghz(-9.0), ghz(0.0), ghz(4.0), ghz(12.0)] {
            let o = ObseParams::from_params(&p, dlc).unwrap();
            let roots = if xi0 { obse_xi0(&o) } else { obse_xi_pi2(&o) };
            let traj = semiclassical_ode_with(&p, dlc, SemiclassicalState::ground(), &[0.0, 80.0], tol).unwrap();
            let (cw, ccw) = traj[1].travelling_amplitudes(p.xi);
            let best = roots
                .iter()
                .map(|r| {
                    let (rc, rb) = r.travelling_amplitudes(o.n_s);
                    rel_err(cw, rc).max((ccw - rb).norm() / rc.norm())
                })
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6, "fixed point differs by {best} at {}", to_ghz(dlc));
        }
    }
}
