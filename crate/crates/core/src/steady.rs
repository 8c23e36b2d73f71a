//! Steady states of the master equation and waveguide observables.
//!
//! The null vector of the Liouvillian is found from a bordered linear
//! system: the vacuum population row is replaced by the vectorized trace
//! functional and the right-hand side is the matching unit vector.
//! Unknowns are rescaled by powers of the linear-response amplitudes
//! before factorization. Small systems (d < 12) use a dense LU, larger
//! ones a sparse LU.

use std::cell::RefCell;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, SymbolicSparseColMatRef, Triplet};
use faer::{Col, Mat};
use rayon::prelude::*;

use crate::analysis::find_minima;
use crate::hilbert::{annihilation, qd_lowering, HilbertSpace, Mode};
use crate::model::{build_liouvillian, trace_functional, Liouvillian, SystemParams};
use crate::{DensityMatrix, Error, Result, C64};

/// Hilbert dimension from which the sparse factorization is used.
pub const SPARSE_DIM_THRESHOLD: usize = 12;

/// Residual bound `‖L v‖_max ≤ RESIDUAL_TOL · ‖L‖_max`.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Smallest admissible `|U_kk| / max |U_kk|` in the dense bordered LU.
const PIVOT_RATIO_TOL: f64 = 1e-13;

/// Transmission dips shallower than this (1 − T) are ignored by
/// [`sweep_qd_detuning`].
pub const DEFAULT_DIP_DEPTH: f64 = 1e-3;

/// One point of a probe sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRecord {
    /// Δω_lc = ω_l − ω_c (rad/ns).
    pub delta_lc: f64,
    /// Normalized transmitted photon flux.
    pub transmission: f64,
    /// Normalized reflected photon flux.
    pub reflection: f64,
    /// Transmission from the coherent amplitude ⟨a_cw⟩ only.
    pub transmission_coherent: f64,
    pub n_cw: f64,
    pub n_ccw: f64,
    /// ⟨σ₊σ₋⟩
    pub qd_excitation: f64,
}

/// Unique trace-one null vector of `l`.
pub fn solve_steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let space = l.space();
    let d = space.dim();
    let scale = l.max_abs();
    if scale == 0.0 {
        return Err(Error::NonUniqueSteadyState);
    }
    let m = l.matrix();
    // Any population row k + d·k may carry the trace functional. The
    // vacuum row has no O(1) entries after scaling, so dropping it keeps
    // the system well conditioned.
    let pivot_row = 0;

    // ρ = W ρ̃ with W_ij = w_i w_j, w = a_cw^{n_cw} a_ccw^{n_ccw} σ^{e}, so
    // that weak-drive multi-photon elements keep full relative precision.
    let weights = excitation_weights(space, l.amplitude_scales());
    let trace: Vec<C64> = trace_functional(d)
        .into_iter()
        .zip(&weights)
        .map(|(t, w)| t * *w)
        .collect();
    // ρ̃ is Hermitian, so the system is solved for its d² real parameters:
    // Re and Im of the upper triangle, and the real diagonal.
    let coords = HermitianCoords::new(d);
    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * m.nnz());
    for (r, c, v) in m.triplets() {
        let (k, l) = (r % d, r / d);
        if r == pivot_row || k > l {
            continue;
        }
        let v = v * (weights[c] / weights[r]);
        let (i, j) = (c % d, c / d);
        let mut push = |col: usize, coef: C64| {
            entries.push((coords.re[r], col, coef.re));
            if k != l {
                entries.push((coords.im[r], col, coef.im));
            }
        };
        if i == j {
            push(coords.re[c], v);
        } else if i < j {
            push(coords.re[c], v);
            push(coords.im[c], C64::i() * v);
        } else {
            let t = j + d * i;
            push(coords.re[t], v);
            push(coords.im[t], -C64::i() * v);
        }
    }
    entries.extend(
        trace
            .iter()
            .enumerate()
            .filter(|(_, w)| w.re != 0.0)
            .map(|(c, w)| (coords.re[0], coords.re[c], w.re)),
    );
    let n = d * d;
    let rhs_row = coords.re[pivot_row];

    let x = if d < SPARSE_DIM_THRESHOLD {
        solve_dense(n, &entries, rhs_row)?
    } else {
        solve_sparse(n, entries, rhs_row)?
    };
    let v: Vec<C64> = (0..n)
        .map(|c| {
            let (i, j) = (c % d, c / d);
            let z = match i.cmp(&j) {
                std::cmp::Ordering::Equal => C64::new(x[coords.re[c]], 0.0),
                std::cmp::Ordering::Less => C64::new(x[coords.re[c]], x[coords.im[c]]),
                std::cmp::Ordering::Greater => {
                    let t = j + d * i;
                    C64::new(x[coords.re[t]], -x[coords.im[t]])
                }
            };
            z * weights[c]
        })
        .collect();

    if v.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::NonUniqueSteadyState);
    }
    // A density matrix has |ρ_ij| ≤ 1; anything far above signals a
    // near-singular bordered system.
    if v.iter().any(|x| x.norm() > 1.0 + 1e-6) {
        return Err(Error::NonUniqueSteadyState);
    }
    let residual = l.apply(&v).iter().map(|x| x.norm()).fold(0.0, f64::max);
    let tolerance = RESIDUAL_TOL * scale;
    if residual > tolerance {
        return Err(Error::SteadyStateResidual { residual, tolerance });
    }

    let raw = DensityMatrix::from_vec(space, &v)?;
    Ok(hermitian_part_normalized(&raw))
}

fn excitation_weights(space: HilbertSpace, [s_cw, s_ccw, s_qd]: [f64; 3]) -> Vec<f64> {
    let d = space.dim();
    let w: Vec<f64> = (0..d)
        .map(|i| {
            let (n_cw, n_ccw, e) = space.labels(i);
            s_cw.powi(n_cw as i32) * s_ccw.powi(n_ccw as i32) * if e { s_qd } else { 1.0 }
        })
        .collect();
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            out.push(w[i] * w[j]);
        }
    }
    out
}

fn hermitian_part_normalized(rho: &DensityMatrix) -> DensityMatrix {
    let op = rho.as_operator();
    let sym = (&(op + &op.dagger())).scale(C64::new(0.5, 0.0));
    let tr = sym.trace().re;
    DensityMatrix::from_operator(sym.scale(C64::new(1.0 / tr, 0.0)))
}

/// Positions of Re ρ_ij and Im ρ_ij (i ≤ j) among the real unknowns,
/// indexed by the column-stacked position i + d·j.
struct HermitianCoords {
    re: Vec<usize>,
    im: Vec<usize>,
}

impl HermitianCoords {
    fn new(d: usize) -> Self {
        let mut re = vec![usize::MAX; d * d];
        let mut im = vec![usize::MAX; d * d];
        let mut next = 0;
        for j in 0..d {
            for i in 0..=j {
                re[i + d * j] = next;
                next += 1;
                if i != j {
                    im[i + d * j] = next;
                    next += 1;
                }
            }
        }
        Self { re, im }
    }
}

fn solve_dense(n: usize, entries: &[(usize, usize, f64)], rhs_row: usize) -> Result<Vec<f64>> {
    let mut a = Mat::<f64>::zeros(n, n);
    for &(i, j, v) in entries {
        a[(i, j)] += v;
    }
    let lu = a.partial_piv_lu();
    let u = lu.U();
    let (mut umin, mut umax) = (f64::INFINITY, 0.0_f64);
    for k in 0..n {
        let p = u[(k, k)].abs();
        umin = umin.min(p);
        umax = umax.max(p);
    }
    if umax == 0.0 || umin / umax < PIVOT_RATIO_TOL {
        return Err(Error::NonUniqueSteadyState);
    }
    let mut rhs = Col::<f64>::zeros(n);
    rhs[rhs_row] = 1.0;
    let x = lu.solve(&rhs);
    Ok((0..n).map(|i| x[i]).collect())
}

thread_local! {
    /// Symbolic LU of the last sparsity pattern factorized on this thread.
    /// Points of a sweep share one pattern.
    static SYMBOLIC: RefCell<Option<(Vec<usize>, Vec<usize>, SymbolicLu<usize>)>> = const { RefCell::new(None) };
}

fn symbolic_lu(pattern: SymbolicSparseColMatRef<'_, usize>) -> Result<SymbolicLu<usize>> {
    SYMBOLIC.with_borrow_mut(|cache| {
        if let Some((col_ptr, row_idx, lu)) = cache.as_ref() {
            if col_ptr == pattern.col_ptr() && row_idx == pattern.row_idx() {
                return Ok(lu.clone());
            }
        }
        let lu = SymbolicLu::try_new(pattern).map_err(|e| Error::Factorization(format!("{e:?}")))?;
        *cache = Some((pattern.col_ptr().to_vec(), pattern.row_idx().to_vec(), lu.clone()));
        Ok(lu)
    })
}

fn solve_sparse(n: usize, mut entries: Vec<(usize, usize, f64)>, rhs_row: usize) -> Result<Vec<f64>> {
    entries.sort_unstable_by_key(|&(i, j, _)| (j, i));
    let mut trips: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(entries.len());
    for (i, j, v) in entries {
        match trips.last_mut() {
            Some(t) if t.row == i && t.col == j => t.val += v,
            _ => trips.push(Triplet::new(i, j, v)),
        }
    }
    trips.retain(|t| t.val != 0.0);
    let mat = SparseColMat::try_new_from_triplets(n, n, &trips).map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let lu = Lu::try_new_with_symbolic(symbolic_lu(mat.symbolic())?, mat.as_ref()).map_err(|e| match e {
        LuError::SymbolicSingular { .. } => Error::NonUniqueSteadyState,
        other => Error::Factorization(format!("{other:?}")),
    })?;
    let mut rhs = Col::<f64>::zeros(n);
    rhs[rhs_row] = 1.0;
    let x = lu.solve(&rhs);
    Ok((0..n).map(|i| x[i]).collect())
}

/// Normalized transmitted/reflected flux for a steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionReflection {
    /// `⟨(s₊ + i√(2κ_e) a_cw)†(s₊ + i√(2κ_e) a_cw)⟩ / |s₊|²`
    pub transmission: f64,
    /// `2κ_e ⟨a_ccw† a_ccw⟩ / |s₊|²`
    pub reflection: f64,
    /// `|s₊ + i√(2κ_e)⟨a_cw⟩|² / |s₊|²`
    pub transmission_coherent: f64,
}

/// Transmission and reflection from operator expectations, with `s₊ = √P_in`.
pub fn transmission_reflection(rho: &DensityMatrix, params: &SystemParams) -> Result<TransmissionReflection> {
    if params.p_in <= 0.0 {
        return Err(Error::invalid("p_in", "transmission needs a nonzero drive"));
    }
    let space = rho.space();
    let a = annihilation(space, Mode::Cw);
    let b = annihilation(space, Mode::Ccw);
    let mean_a = rho.expectation(&a)?;
    let n_a = rho.expectation(&(&a.dagger() * &a))?.re;
    let n_b = rho.expectation(&(&b.dagger() * &b))?.re;
    Ok(io_fluxes(params, mean_a, n_a, n_b))
}

fn io_fluxes(params: &SystemParams, mean_a: C64, n_a: f64, n_b: f64) -> TransmissionReflection {
    let s = params.p_in.sqrt();
    let k = (2.0 * params.kappa_e).sqrt();
    // |s + i k a|² expanded with s real
    let transmission = 1.0 - 2.0 * k * mean_a.im / s + k * k * n_a / params.p_in;
    let coh = C64::new(s, 0.0) + C64::new(0.0, k) * mean_a;
    TransmissionReflection {
        transmission,
        reflection: k * k * n_b / params.p_in,
        transmission_coherent: coh.norm_sqr() / params.p_in,
    }
}

/// Steady state and observables at one probe detuning.
pub fn spectrum_point(space: HilbertSpace, params: &SystemParams, delta_lc: f64) -> Result<SpectrumRecord> {
    let l = build_liouvillian(space, params, delta_lc);
    let rho = solve_steady_state(&l)?;
    record_from_state(&rho, params, delta_lc)
}

pub fn record_from_state(rho: &DensityMatrix, params: &SystemParams, delta_lc: f64) -> Result<SpectrumRecord> {
    let space = rho.space();
    let a = annihilation(space, Mode::Cw);
    let b = annihilation(space, Mode::Ccw);
    let sm = qd_lowering(space);
    let mean_a = rho.expectation(&a)?;
    let n_cw = rho.expectation(&(&a.dagger() * &a))?.re;
    let n_ccw = rho.expectation(&(&b.dagger() * &b))?.re;
    let qd_excitation = rho.expectation(&(&sm.dagger() * &sm))?.re;
    let tr = io_fluxes(params, mean_a, n_cw, n_ccw);
    Ok(SpectrumRecord {
        delta_lc,
        transmission: tr.transmission,
        reflection: tr.reflection,
        transmission_coherent: tr.transmission_coherent,
        n_cw,
        n_ccw,
        qd_excitation,
    })
}

fn check_grid(grid: &[f64], name: &'static str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid(name, "grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(name, "grid must be strictly increasing"));
    }
    Ok(())
}

/// Steady-state spectrum over a probe detuning grid (rad/ns). Points are
/// solved in parallel; output order follows the grid.
pub fn sweep_probe(space: HilbertSpace, params: &SystemParams, delta_lc_grid: &[f64]) -> Result<Vec<SpectrumRecord>> {
    params.validate()?;
    check_grid(delta_lc_grid, "delta_lc_grid")?;
    delta_lc_grid
        .par_iter()
        .enumerate()
        .map(|(k, &x)| spectrum_point(space, params, x).map_err(|e| e.at_grid_point(k, x)))
        .collect()
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// 401 points over ±(3|β| + 3g₀ + 10κ_T).
pub fn default_probe_grid(params: &SystemParams) -> Vec<f64> {
    let span = 3.0 * params.beta_mag + 3.0 * params.g0 + 10.0 * params.kappa_t();
    linspace(-span, span, 401)
}

/// Transmission minima positions for one QD detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct DipSet {
    pub delta_ac: f64,
    /// Ascending dip positions (rad/ns).
    pub dips: Vec<f64>,
    /// Interpolated transmission at each dip.
    pub values: Vec<f64>,
}

/// Transmission dips as a function of QD–cavity detuning. Minima with
/// depth `1 − T` below `min_depth` are discarded.
pub fn sweep_qd_detuning(
    space: HilbertSpace,
    params: &SystemParams,
    delta_ac_grid: &[f64],
    delta_lc_grid: &[f64],
    min_depth: f64,
) -> Result<Vec<DipSet>> {
    check_grid(delta_ac_grid, "delta_ac_grid")?;
    check_grid(delta_lc_grid, "delta_lc_grid")?;
    delta_ac_grid
        .iter()
        .enumerate()
        .map(|(k, &dac)| {
            let p = params.with_delta_ac(dac);
            let spec = sweep_probe(space, &p, delta_lc_grid).map_err(|e| e.at_grid_point(k, dac))?;
            let t: Vec<f64> = spec.iter().map(|r| r.transmission).collect();
            let (dips, values) = find_minima(delta_lc_grid, &t)
                .into_iter()
                .filter(|e| 1.0 - e.value >= min_depth)
                .map(|e| (e.position, e.value))
                .unzip();
            Ok(DipSet {
                delta_ac: dac,
                dips,
                values,
            })
        })
        .collect()
}
