//! Post-processing of spectra and steady states: dip finding, vacuum Rabi
//! splittings, photon-number and quadrature statistics, and the
//! Cauchy–Schwarz test for inter-mode intensity correlations.

use crate::hilbert::{expectation, Operator};
use crate::steady::{DipSet, SpectrumRecord};
use crate::{DensityMatrix, Error, Result, C64};

/// Threshold on `lhs − rhs` above which the Cauchy–Schwarz inequality is
/// reported as violated.
pub const CS_VIOLATION_MARGIN: f64 = 1e-10;

/// Photon numbers below this are treated as an empty mode.
const MIN_PHOTON_NUMBER: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub position: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// Interior local extrema of sampled data, refined by a three-point
/// parabola. `grid` must be sorted; fewer than three points yields nothing.
pub fn find_extrema(grid: &[f64], values: &[f64]) -> Vec<Extremum> {
    assert_eq!(grid.len(), values.len(), "grid and values differ in length");
    let mut out = Vec::new();
    if grid.len() < 3 {
        return out;
    }
    for k in 1..grid.len() - 1 {
        let (y0, y1, y2) = (values[k - 1], values[k], values[k + 1]);
        let kind = if y1 < y0 && y1 <= y2 {
            ExtremumKind::Minimum
        } else if y1 > y0 && y1 >= y2 {
            ExtremumKind::Maximum
        } else {
            continue;
        };
        let (position, value) = parabola_vertex(
            (grid[k - 1], y0),
            (grid[k], y1),
            (grid[k + 1], y2),
        );
        out.push(Extremum {
            position,
            value,
            kind,
        });
    }
    out
}

/// Local minima only.
pub fn find_minima(grid: &[f64], values: &[f64]) -> Vec<Extremum> {
    find_extrema(grid, values)
        .into_iter()
        .filter(|e| e.kind == ExtremumKind::Minimum)
        .collect()
}

fn parabola_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> (f64, f64) {
    let h0 = p0.0 - p1.0;
    let h2 = p2.0 - p1.0;
    let s0 = (p0.1 - p1.1) / h0;
    let s2 = (p2.1 - p1.1) / h2;
    let a = (s0 - s2) / (h0 - h2);
    if a == 0.0 || !a.is_finite() {
        return p1;
    }
    let b = s0 - a * h0;
    let t = (-b / (2.0 * a)).clamp(h0, h2);
    (p1.0 + t, p1.1 + b * t + a * t * t)
}

/// Vacuum Rabi splitting from sampled transmission: the separation of the
/// deepest adjacent pair of minima inside `window = (lo, hi)` (same units as
/// `grid`). The window excludes resonances not coupled to the QD.
pub fn rabi_splitting_from(grid: &[f64], transmission: &[f64], window: (f64, f64)) -> Result<f64> {
    let mut dips: Vec<Extremum> = find_minima(grid, transmission)
        .into_iter()
        .filter(|e| e.position >= window.0 && e.position <= window.1)
        .collect();
    if dips.len() < 2 {
        return Err(Error::FewerThanTwoDips { found: dips.len() });
    }
    dips.sort_by(|a, b| a.position.total_cmp(&b.position));
    let best = dips
        .windows(2)
        .min_by(|p, q| p[0].value.max(p[1].value).total_cmp(&q[0].value.max(q[1].value)))
        .expect("at least one adjacent pair");
    Ok(best[1].position - best[0].position)
}

/// [`rabi_splitting_from`] applied to a probe sweep (rad/ns).
pub fn rabi_splitting(spectrum: &[SpectrumRecord], window: (f64, f64)) -> Result<f64> {
    let grid: Vec<f64> = spectrum.iter().map(|r| r.delta_lc).collect();
    let t: Vec<f64> = spectrum.iter().map(|r| r.transmission).collect();
    rabi_splitting_from(&grid, &t, window)
}

/// Narrowest opening of the dip branches where the bare QD line crosses a
/// bare cavity resonance at `mode` (both in probe-detuning units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiCrossing {
    /// QD detuning at which the gap is smallest.
    pub delta_ac: f64,
    pub gap: f64,
}

/// Scans the QD detunings within `half_width` of `mode`. At each detuning
/// the bare crossing point `(mode + Δω_ac)/2` is bracketed by the nearest
/// dips on either side; their separation is the branch gap. Returns `None`
/// when no detuning in range has dips on both sides.
pub fn anticrossing_gap(dip_sets: &[DipSet], mode: f64, half_width: f64) -> Option<AntiCrossing> {
    dip_sets
        .iter()
        .filter(|s| (s.delta_ac - mode).abs() <= half_width)
        .filter_map(|s| {
            let c = 0.5 * (mode + s.delta_ac);
            let below = s.dips.iter().copied().filter(|&d| d < c).max_by(f64::total_cmp)?;
            let above = s.dips.iter().copied().filter(|&d| d > c).min_by(f64::total_cmp)?;
            Some(AntiCrossing {
                delta_ac: s.delta_ac,
                gap: above - below,
            })
        })
        .min_by(|a, b| a.gap.total_cmp(&b.gap))
}

fn real_expectation(rho: &DensityMatrix, op: &Operator) -> Result<f64> {
    Ok(expectation(rho, op)?.re)
}

/// Mandel Q = (Var(n) − ⟨n⟩)/⟨n⟩, evaluated in normal order as
/// (⟨a†²a²⟩ − ⟨a†a⟩²)/⟨a†a⟩.
pub fn mandel_q(rho: &DensityMatrix, a: &Operator) -> Result<f64> {
    let ad = a.dagger();
    let n = real_expectation(rho, &(&ad * a))?;
    if n <= MIN_PHOTON_NUMBER {
        return Err(Error::ZeroPhotonNumber);
    }
    let ad2a2 = &(&ad * &ad) * &(a * a);
    let g = real_expectation(rho, &ad2a2)?;
    Ok((g - n * n) / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    /// X¹ = (a + a†)/2
    X1,
    /// X² = −i(a − a†)/2
    X2,
}

pub fn quadrature_operator(a: &Operator, which: Quadrature) -> Operator {
    let ad = a.dagger();
    match which {
        Quadrature::X1 => (&(a + &ad)).scale(C64::new(0.5, 0.0)),
        Quadrature::X2 => (&(a - &ad)).scale(C64::new(0.0, -0.5)),
    }
}

/// Var(X) for one quadrature.
pub fn quadrature_variance(rho: &DensityMatrix, a: &Operator, which: Quadrature) -> Result<f64> {
    let x = quadrature_operator(a, which);
    let mean = real_expectation(rho, &x)?;
    let sq = real_expectation(rho, &(&x * &x))?;
    Ok(sq - mean * mean)
}

/// Quadrature Q = (Var(X) − 1/4)/(1/4); negative means squeezed below vacuum.
pub fn quadrature_q(rho: &DensityMatrix, a: &Operator, which: Quadrature) -> Result<f64> {
    Ok((quadrature_variance(rho, a, which)? - 0.25) / 0.25)
}

/// Zero-delay g²_{a,b}(0) = ⟨a†b†ba⟩ / (⟨a†a⟩⟨b†b⟩) from a density matrix.
pub fn g2_zero_delay(rho: &DensityMatrix, a: &Operator, b: &Operator) -> Result<f64> {
    let ad = a.dagger();
    let bd = b.dagger();
    let na = real_expectation(rho, &(&ad * a))?;
    let nb = real_expectation(rho, &(&bd * b))?;
    if na <= MIN_PHOTON_NUMBER || nb <= MIN_PHOTON_NUMBER {
        return Err(Error::ZeroPhotonNumber);
    }
    let num = &(&ad * &bd) * &(b * a);
    Ok(real_expectation(rho, &num)? / (na * nb))
}

/// Non-classicality summary for a pair of modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonclassicalReport {
    /// Mandel Q of modes a and b.
    pub q_number: [f64; 2],
    /// Quadrature Q, indexed `[mode][X¹, X²]`.
    pub q_quadrature: [[f64; 2]; 2],
    pub g2_ab: f64,
    pub g2_aa: f64,
    pub g2_bb: f64,
    /// (g²_{a,b}(0))²
    pub cs_lhs: f64,
    /// g²_{a,a}(0) · g²_{b,b}(0)
    pub cs_rhs: f64,
    pub violated: bool,
}

/// Zero-delay Cauchy–Schwarz test `(g²_{a,b})² ≤ g²_{a,a} g²_{b,b}` plus the
/// single-mode statistics of both modes.
pub fn cauchy_schwarz(rho: &DensityMatrix, a: &Operator, b: &Operator) -> Result<NonclassicalReport> {
    let g2_ab = g2_zero_delay(rho, a, b)?;
    let g2_aa = g2_zero_delay(rho, a, a)?;
    let g2_bb = g2_zero_delay(rho, b, b)?;
    Ok(cauchy_schwarz_from_g2(g2_ab, g2_aa, g2_bb, single_mode_stats(rho, a, b)?))
}

fn single_mode_stats(rho: &DensityMatrix, a: &Operator, b: &Operator) -> Result<([f64; 2], [[f64; 2]; 2])> {
    let mut qn = [0.0; 2];
    let mut qq = [[0.0; 2]; 2];
    for (k, op) in [a, b].into_iter().enumerate() {
        qn[k] = mandel_q(rho, op)?;
        qq[k][0] = quadrature_q(rho, op, Quadrature::X1)?;
        qq[k][1] = quadrature_q(rho, op, Quadrature::X2)?;
    }
    Ok((qn, qq))
}

/// Builds a report from precomputed correlation values (for example from a
/// regression run).
pub fn cauchy_schwarz_from_g2(
    g2_ab: f64,
    g2_aa: f64,
    g2_bb: f64,
    (q_number, q_quadrature): ([f64; 2], [[f64; 2]; 2]),
) -> NonclassicalReport {
    let cs_lhs = g2_ab * g2_ab;
    let cs_rhs = g2_aa * g2_bb;
    NonclassicalReport {
        q_number,
        q_quadrature,
        g2_ab,
        g2_aa,
        g2_bb,
        cs_lhs,
        cs_rhs,
        violated: cs_lhs > cs_rhs + CS_VIOLATION_MARGIN,
    }
}
