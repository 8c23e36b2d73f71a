//! Weak-drive spectra: truncation and drive stability, flux balance and the
//! ξ = π mirror image.

use std::f64::consts::PI;

use proptest::prelude::*;
use wgm_qed::steady::{linspace, spectrum_point, sweep_probe};
use wgm_qed::units::ghz;
use wgm_qed::{HilbertSpace, SpectrumRecord, SystemParams};

fn fig4() -> SystemParams {
    SystemParams::from_ghz(6.0, 9.6, 1.2, 0.44, 0.16, 2.4).with_p_in(1e-5)
}

fn max_diff(a: &[SpectrumRecord], b: &[SpectrumRecord]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.transmission - y.transmission).abs().max((x.reflection - y.reflection).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn doubling_truncation_changes_nothing_at_weak_drive() {
    let grid = linspace(ghz(-30.0), ghz(30.0), 61);
    for p in [fig4(), fig4().with_delta_ac(ghz(9.6)), fig4().with_xi(PI / 2.0)] {
        let small = sweep_probe(HilbertSpace::symmetric(2).unwrap(), &p, &grid).unwrap();
        let large = sweep_probe(HilbertSpace::symmetric(4).unwrap(), &p, &grid).unwrap();
        assert!(max_diff(&small, &large) < 1e-6);
    }
}

#[test]
fn halving_drive_leaves_normalized_spectrum() {
    let grid = linspace(ghz(-30.0), ghz(30.0), 121);
    let space = HilbertSpace::symmetric(2).unwrap();
    for p in [fig4(), fig4().with_delta_ac(ghz(-9.6)), SystemParams::from_ghz(6.0, 0.0, 1.2, 0.44, 0.16, 0.7).with_p_in(1e-5)] {
        let full = sweep_probe(space, &p, &grid).unwrap();
        let half = sweep_probe(space, &p.with_p_in(p.p_in / 2.0), &grid).unwrap();
        assert!(max_diff(&full, &half) < 1e-6);
    }
}

#[test]
fn mirror_image_for_negative_beta() {
    let grid = linspace(ghz(-30.0), ghz(30.0), 241);
    let mirrored: Vec<f64> = grid.iter().rev().map(|x| -x).collect();
    let space = HilbertSpace::symmetric(2).unwrap();
    for dac in [0.0, 9.6, -9.6] {
        let p = fig4().with_delta_ac(ghz(dac));
        let zero = sweep_probe(space, &p, &grid).unwrap();
        let pi = sweep_probe(space, &p.with_xi(PI).with_delta_ac(ghz(-dac)), &mirrored).unwrap();
        let pi: Vec<SpectrumRecord> = pi.into_iter().rev().collect();
        assert!(max_diff(&zero, &pi) < 1e-6, "Δac = {dac}");
    }
}

fn params() -> impl Strategy<Value = SystemParams> {
    (
        (0.0..15.0f64, 0.0..12.0f64, 0.3..10.0f64, 0.05..1.0f64),
        (0.05..10.0f64, 0.0..3.0f64, -PI..PI, -20.0..20.0f64),
        1e-7..1e-2f64,
    )
        .prop_map(|((g0, beta, kt, frac), (gpar, gp, xi, dac), p_in)| {
            SystemParams::from_ghz(g0, beta, kt, frac * kt, gpar, gp)
                .with_xi(xi)
                .with_delta_ac(ghz(dac))
                .with_p_in(p_in)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outgoing_flux_never_exceeds_input(p in params(), dlc in (-40.0..40.0f64).prop_map(ghz)) {
        let r = spectrum_point(HilbertSpace::symmetric(2).unwrap(), &p, dlc).unwrap();
        prop_assert!(r.transmission >= -1e-9 && r.reflection >= -1e-9);
        prop_assert!(1.0 - r.transmission - r.reflection >= -1e-9, "T = {}, R = {}", r.transmission, r.reflection);
    }
}
