//! Time evolution under the master equation and two-time correlations by
//! the quantum regression theorem.

use std::collections::BTreeMap;

use crate::hilbert::{annihilation, qd_lowering, Mode, Operator};
use crate::model::Liouvillian;
use crate::ode::{integrate, Tolerances};
use crate::{DensityMatrix, Error, Result, C64};

/// Photon numbers at or below this are treated as an unpopulated mode.
const MIN_POPULATION: f64 = 1e-300;

/// States and observables sampled on a time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// `n_cw`, `n_ccw` and `qd_excitation` at every stored time.
    pub observables: BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    /// `Tr[A ρ(t)]` along the trajectory.
    pub fn expectation(&self, op: &Operator) -> Result<Vec<C64>> {
        self.states.iter().map(|r| r.expectation(op)).collect()
    }

    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables.get(name).map(Vec::as_slice)
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory is never empty")
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::invalid("times", "grid is empty"));
    }
    if times[0] < 0.0 || !times[0].is_finite() {
        return Err(Error::invalid("times", "first time must be finite and non-negative"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("times", "grid must be strictly increasing"));
    }
    Ok(())
}

fn check_space(l: &Liouvillian, rho: &DensityMatrix) -> Result<()> {
    let (d, found) = (l.space().dim(), rho.space().dim());
    if d != found || l.space() != rho.space() {
        return Err(Error::DimensionMismatch { expected: d, found });
    }
    Ok(())
}

fn propagate(l: &Liouvillian, v0: &[C64], times: &[f64], tol: Tolerances) -> Result<Vec<Vec<C64>>> {
    let m = l.matrix();
    integrate(|_, y, dy| m.mul_vec_into(y, dy), v0, times, tol)
}

/// Integrates `dρ/dt = Lρ` with `ρ(times[0]) = rho0` at the default
/// tolerances (rtol 1e-8, atol 1e-10).
pub fn evolve(l: &Liouvillian, rho0: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
    evolve_with(l, rho0, times, Tolerances::default())
}

pub fn evolve_with(l: &Liouvillian, rho0: &DensityMatrix, times: &[f64], tol: Tolerances) -> Result<Trajectory> {
    check_times(times)?;
    check_space(l, rho0)?;
    let space = l.space();
    let vs = propagate(l, &rho0.to_vec(), times, tol)?;
    let states = vs
        .iter()
        .map(|v| DensityMatrix::from_vec(space, v))
        .collect::<Result<Vec<_>>>()?;

    let a = annihilation(space, Mode::Cw);
    let b = annihilation(space, Mode::Ccw);
    let sm = qd_lowering(space);
    let mut observables = BTreeMap::new();
    for (name, op) in [
        ("n_cw", &a.dagger() * &a),
        ("n_ccw", &b.dagger() * &b),
        ("qd_excitation", &sm.dagger() * &sm),
    ] {
        let series = states
            .iter()
            .map(|r| r.expectation(&op).map(|z| z.re))
            .collect::<Result<Vec<_>>>()?;
        observables.insert(name.to_string(), series);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        observables,
    })
}

/// Normalized two-time correlation sampled at the requested delays.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub taus: Vec<f64>,
    /// Real part of g²_{a,b}(τ).
    pub values: Vec<f64>,
    /// Largest |Im g²_{a,b}(τ)| over the grid.
    pub max_imaginary: f64,
}

/// Stationary g²_{a,b}(τ) = ⟨a†(0) b†(τ) b(τ) a(0)⟩ / (⟨a†a⟩⟨b†b⟩).
///
/// The seed `a ρ_ss a† / ⟨a†a⟩` is evolved under `l`; the absolute
/// tolerance is scaled by `min(1, ⟨b†b⟩)` so that weakly populated modes are
/// resolved.
pub fn g2_two_time(
    l: &Liouvillian,
    rho_ss: &DensityMatrix,
    a: &Operator,
    b: &Operator,
    taus: &[f64],
) -> Result<CorrelationSeries> {
    g2_two_time_with(l, rho_ss, a, b, taus, Tolerances::default())
}

pub fn g2_two_time_with(
    l: &Liouvillian,
    rho_ss: &DensityMatrix,
    a: &Operator,
    b: &Operator,
    taus: &[f64],
    tol: Tolerances,
) -> Result<CorrelationSeries> {
    check_space(l, rho_ss)?;
    if taus.is_empty() {
        return Err(Error::invalid("taus", "grid is empty"));
    }
    if taus[0] < 0.0 || taus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("taus", "delays must be non-negative and strictly increasing"));
    }
    let space = l.space();
    let ad = a.dagger();
    let nb_op = &b.dagger() * b;
    let na = rho_ss.expectation(&(&ad * a))?.re;
    let nb = rho_ss.expectation(&nb_op)?.re;
    if na <= MIN_POPULATION {
        return Err(Error::ZeroDenominator { which: "<a^dag a>", value: na });
    }
    if nb <= MIN_POPULATION {
        return Err(Error::ZeroDenominator { which: "<b^dag b>", value: nb });
    }

    let seed = (&(a * rho_ss.as_operator()) * &ad).scale(C64::new(1.0 / na, 0.0));
    let seed = DensityMatrix::seed(seed);

    let mut grid = Vec::with_capacity(taus.len() + 1);
    let prepended = taus[0] > 0.0;
    if prepended {
        grid.push(0.0);
    }
    grid.extend_from_slice(taus);
    let tol = Tolerances {
        atol: tol.atol * nb.min(1.0),
        ..tol
    };
    let vs = propagate(l, &seed.to_vec(), &grid, tol)?;

    let mut values = Vec::with_capacity(taus.len());
    let mut max_imaginary = 0.0_f64;
    for v in vs.iter().skip(usize::from(prepended)) {
        let c = DensityMatrix::seed_from_vec(space, v)?;
        let g = c.expectation(&nb_op)? / nb;
        values.push(g.re);
        max_imaginary = max_imaginary.max(g.im.abs());
    }
    Ok(CorrelationSeries {
        taus: taus.to_vec(),
        values,
        max_imaginary,
    })
}

/// Equal-time g²_{a,b}(t) along a transient from `rho0`. Entries are `None`
/// while either mode is unpopulated.
pub fn g2_equal_time_transient(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    a: &Operator,
    b: &Operator,
    times: &[f64],
) -> Result<Vec<Option<f64>>> {
    g2_equal_time_transient_with(l, rho0, a, b, times, Tolerances::default())
}

pub fn g2_equal_time_transient_with(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    a: &Operator,
    b: &Operator,
    times: &[f64],
    tol: Tolerances,
) -> Result<Vec<Option<f64>>> {
    let traj = evolve_with(l, rho0, times, tol)?;
    let ad = a.dagger();
    let bd = b.dagger();
    let na_op = &ad * a;
    let nb_op = &bd * b;
    let num_op = &(&ad * &bd) * &(b * a);
    traj.states
        .iter()
        .map(|r| {
            let na = r.expectation(&na_op)?.re;
            let nb = r.expectation(&nb_op)?.re;
            if na <= MIN_POPULATION || nb <= MIN_POPULATION {
                return Ok(None);
            }
            Ok(Some(r.expectation(&num_op)?.re / (na * nb)))
        })
        .collect()
}
