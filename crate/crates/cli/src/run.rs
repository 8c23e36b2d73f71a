//! Mode dispatch: one result table per run.

use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;
use thiserror::Error;
use wgm_qed::analysis::{g2_zero_delay, mandel_q, quadrature_q, Quadrature};
use wgm_qed::classical::{classical_spectrum, obse_xi0, obse_xi_pi2, ObseParams};
use wgm_qed::dynamics::{evolve, g2_two_time};
use wgm_qed::hilbert::{annihilation, standing_wave_ops};
use wgm_qed::model::build_liouvillian;
use wgm_qed::steady::{solve_steady_state, sweep_probe, sweep_qd_detuning};
use wgm_qed::units::to_ghz;
use wgm_qed::{DensityMatrix, HilbertSpace, Mode as Field, Operator};

use crate::config::{ConfigError, FieldMode, Mode, RunConfig};
use crate::output::Table;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failure: {0}")]
    Solver(#[from] wgm_qed::Error),
    #[error("cannot write `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// 1 for configuration and I/O problems, 2 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Solver(_) => 2,
            _ => 1,
        }
    }
}

pub fn field_operator(space: HilbertSpace, which: FieldMode, xi: f64) -> Operator {
    match which {
        FieldMode::Cw => annihilation(space, Field::Cw),
        FieldMode::Ccw => annihilation(space, Field::Ccw),
        FieldMode::Sw1 => standing_wave_ops(space, xi).0,
        FieldMode::Sw2 => standing_wave_ops(space, xi).1,
    }
}

/// Computes the table for `cfg.mode`.
pub fn execute(cfg: &RunConfig) -> Result<Table, RunError> {
    cfg.system_params().validate()?;
    match cfg.mode {
        Mode::Spectrum => spectrum(cfg),
        Mode::Classical => Ok(classical(cfg)),
        Mode::Obse => obse(cfg),
        Mode::G2 => g2(cfg),
        Mode::Anticrossing => anticrossing(cfg),
        Mode::Nonclassical => nonclassical(cfg),
        Mode::Transient => transient(cfg),
    }
}

fn spectrum(cfg: &RunConfig) -> Result<Table, RunError> {
    let recs = sweep_probe(cfg.space(), &cfg.system_params(), &cfg.delta_lc.rad())?;
    let mut t = Table::new(&["delta_lc_ghz", "T", "R", "T_coh", "n_cw", "n_ccw", "qd_excitation"]);
    for (x, r) in cfg.delta_lc.values().into_iter().zip(recs) {
        t.push(
            [
                x,
                r.transmission,
                r.reflection,
                r.transmission_coherent,
                r.n_cw,
                r.n_ccw,
                r.qd_excitation,
            ]
            .map(Some)
            .to_vec(),
        );
    }
    Ok(t)
}

fn classical(cfg: &RunConfig) -> Table {
    let mut t = Table::new(&["delta_lc_ghz", "T", "R"]);
    let recs = classical_spectrum(&cfg.system_params(), &cfg.delta_lc.rad());
    for (x, r) in cfg.delta_lc.values().into_iter().zip(recs) {
        t.push(vec![Some(x), Some(r.transmission), Some(r.reflection)]);
    }
    t
}

fn obse(cfg: &RunConfig) -> Result<Table, RunError> {
    const XI_TOL: f64 = 1e-12;
    let xi = cfg.xi_reduced();
    let at = |target: f64| (xi - target).abs() < XI_TOL || (xi - target - TAU).abs() < XI_TOL;
    let solve = if at(0.0) {
        obse_xi0
    } else if at(FRAC_PI_2) {
        obse_xi_pi2
    } else {
        return Err(ConfigError::Invalid {
            key: "xi_rad".into(),
            reason: "the state equations are available for xi = 0 and xi = pi/2 only".into(),
        }
        .into());
    };
    let params = cfg.system_params();
    let mut t = Table::new(&[
        "delta_lc_ghz",
        "root",
        "x_plus_re",
        "x_plus_im",
        "x_minus_re",
        "x_minus_im",
        "n_cw",
        "n_ccw",
    ]);
    let xs = cfg.delta_lc.values();
    for (k, dlc) in cfg.delta_lc.rad().into_iter().enumerate() {
        let o = ObseParams::from_params(&params, dlc).map_err(|e| grid_error(e, k, dlc))?;
        for (j, root) in solve(&o).into_iter().enumerate() {
            let (cw, ccw) = root.travelling_amplitudes(o.n_s);
            t.push(
                [
                    xs[k],
                    j as f64,
                    root.x_plus.re,
                    root.x_plus.im,
                    root.x_minus.re,
                    root.x_minus.im,
                    cw.norm_sqr(),
                    ccw.norm_sqr(),
                ]
                .map(Some)
                .to_vec(),
            );
        }
    }
    Ok(t)
}

fn grid_error(e: wgm_qed::Error, index: usize, value: f64) -> wgm_qed::Error {
    wgm_qed::Error::GridPoint {
        index,
        value,
        source: Box::new(e),
    }
}

fn g2(cfg: &RunConfig) -> Result<Table, RunError> {
    let space = cfg.space();
    let l = build_liouvillian(space, &cfg.system_params(), cfg.omega_l());
    let rho = solve_steady_state(&l)?;
    let a = field_operator(space, cfg.g2_a, cfg.xi_rad);
    let b = field_operator(space, cfg.g2_b, cfg.xi_rad);
    let series = g2_two_time(&l, &rho, &a, &b, &cfg.taus())?;
    let mut t = Table::new(&["tau_ns", "g2"]);
    for (tau, g) in series.taus.iter().zip(&series.values) {
        t.push(vec![Some(*tau), Some(*g)]);
    }
    Ok(t)
}

fn anticrossing(cfg: &RunConfig) -> Result<Table, RunError> {
    let sets = sweep_qd_detuning(
        cfg.space(),
        &cfg.system_params(),
        &cfg.delta_ac.rad(),
        &cfg.delta_lc.rad(),
        cfg.min_dip_depth,
    )?;
    let mut t = Table::new(&["delta_ac_ghz", "dip1_ghz", "dip2_ghz", "dip3_ghz"]);
    for (x, s) in cfg.delta_ac.values().into_iter().zip(sets) {
        let mut idx: Vec<usize> = (0..s.dips.len()).collect();
        idx.sort_by(|&i, &j| s.values[i].total_cmp(&s.values[j]));
        idx.truncate(3);
        idx.sort_unstable();
        let mut row = vec![Some(x)];
        row.extend((0..3).map(|k| idx.get(k).map(|&i| to_ghz(s.dips[i]))));
        t.push(row);
    }
    Ok(t)
}

fn nonclassical(cfg: &RunConfig) -> Result<Table, RunError> {
    let space = cfg.space();
    let params = cfg.system_params();
    let cw = annihilation(space, Field::Cw);
    let ccw = annihilation(space, Field::Ccw);
    let (sw1, sw2) = standing_wave_ops(space, cfg.xi_rad);
    let xs = cfg.delta_lc.values();
    let grid = cfg.delta_lc.rad();
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(k, &w)| {
            let l = build_liouvillian(space, &params, w);
            let rho = solve_steady_state(&l).map_err(|e| grid_error(e, k, w))?;
            let q = |a: &Operator| mandel_q(&rho, a).ok();
            let x = |a: &Operator, which| quadrature_q(&rho, a, which).ok();
            let g = |a: &Operator, b: &Operator| g2_zero_delay(&rho, a, b).ok();
            let (lhs, rhs) = match (g(&cw, &ccw), g(&cw, &cw), g(&ccw, &ccw)) {
                (Some(ab), Some(aa), Some(bb)) => (Some(ab * ab), Some(aa * bb)),
                _ => (None, None),
            };
            Ok(vec![
                Some(xs[k]),
                q(&cw),
                q(&ccw),
                q(&sw1),
                q(&sw2),
                x(&cw, Quadrature::X1),
                x(&cw, Quadrature::X2),
                x(&ccw, Quadrature::X1),
                x(&ccw, Quadrature::X2),
                lhs,
                rhs,
            ])
        })
        .collect::<Result<Vec<_>, wgm_qed::Error>>()?;
    let mut t = Table::new(&[
        "omega_l_ghz",
        "q_cw",
        "q_ccw",
        "q_sw1",
        "q_sw2",
        "qx1_cw",
        "qx2_cw",
        "qx1_ccw",
        "qx2_ccw",
        "cs_lhs",
        "cs_rhs",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn transient(cfg: &RunConfig) -> Result<Table, RunError> {
    let space = cfg.space();
    let l = build_liouvillian(space, &cfg.system_params(), cfg.omega_l());
    let traj = evolve(&l, &DensityMatrix::ground(space), &cfg.times())?;
    let a = field_operator(space, cfg.g2_a, cfg.xi_rad);
    let b = field_operator(space, cfg.g2_b, cfg.xi_rad);
    let obs = |name: &str| traj.observable(name).expect("trajectory records photon numbers").to_vec();
    let (n_cw, n_ccw, qd) = (obs("n_cw"), obs("n_ccw"), obs("qd_excitation"));
    let mut t = Table::new(&["t_ns", "n_cw", "n_ccw", "qd_excitation", "g2_ab", "g2_aa", "g2_bb"]);
    for (k, rho) in traj.states.iter().enumerate() {
        let g = |x: &Operator, y: &Operator| g2_zero_delay(rho, x, y).ok();
        t.push(vec![
            Some(traj.times[k]),
            Some(n_cw[k]),
            Some(n_ccw[k]),
            Some(qd[k]),
            g(&a, &b),
            g(&a, &a),
            g(&b, &b),
        ]);
    }
    Ok(t)
}
