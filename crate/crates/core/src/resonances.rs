//! Resonance and bound-state location.
//!
//! Three independent routes to a resonance `ε = E − iΓ/2`:
//!
//! * long-lifetime closed forms ([`analytic_well_resonances`],
//!   [`analytic_barrier_resonances`]),
//! * peak tops and half-maximum widths of the transmission coefficient
//!   ([`scan_transmission`]),
//! * Newton iteration on Δ(k) = 0 in the fourth quadrant ([`refine_pole`]).
//!
//! The graphical route measures where `T(E)` peaks, which is not the real part
//! of the pole; the two agree only to the extent that the Lorentzian picture
//! holds.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::{in_fourth_quadrant, PotentialKind, PotentialSpec};
use crate::scattering::{delta, delta_derivative, transmission_coefficient};

/// Γ/(2ΔE) below which a level counts as isolated.
pub const ISOLATION_RATIO: f64 = 0.05;

/// Largest `|Δ(k)|/|kq|` a refined pole may carry.
pub const RESIDUAL_CEILING: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Graphical,
    Refined,
}

/// Long-lifetime validity of a resonance: Γ/2 small against the level
/// spacing, and E above the level spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Validity {
    pub spacing: f64,
    pub width_to_spacing: f64,
    pub isolated: bool,
    pub above_spacing: bool,
}

impl Validity {
    fn new(energy: f64, half_width: f64, spacing: f64) -> Self {
        let ratio = half_width / spacing;
        Validity {
            spacing,
            width_to_spacing: ratio,
            isolated: ratio < ISOLATION_RATIO,
            above_spacing: energy > spacing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub energy: f64,
    /// Full width Γ.
    pub width: f64,
    pub k: Option<Complex64>,
    pub index: u32,
    pub method: Method,
    pub validity: Option<Validity>,
}

impl Resonance {
    pub fn half_width(&self) -> f64 {
        0.5 * self.width
    }

    /// ε = E − iΓ/2.
    pub fn complex_energy(&self) -> Complex64 {
        Complex64::new(self.energy, -self.half_width())
    }

    /// The kinetic parameter, or the fourth-quadrant square root of ε.
    pub fn kinetic(&self) -> Complex64 {
        self.k.unwrap_or_else(|| self.complex_energy().sqrt())
    }

    fn from_k(k: Complex64, index: u32, method: Method) -> Self {
        Resonance {
            energy: k.re * k.re - k.im * k.im,
            width: -4.0 * k.re * k.im,
            k: Some(k),
            index,
            method,
            validity: None,
        }
    }
}

fn require_kind(spec: &PotentialSpec, kind: PotentialKind) -> Result<()> {
    if spec.kind() != kind {
        return Err(Error::Domain(format!(
            "operation needs a {kind}, got a {}",
            spec.kind()
        )));
    }
    Ok(())
}

fn require_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    Ok(())
}

/// Closed-form well resonances, `m = 0..count`:
/// `E_m = ([(n_inf + m)π/(2θ)]² − 1) V0`, `Γ_m/2 = (4/b)√E_m`.
pub fn analytic_well_resonances(spec: &PotentialSpec, count: usize) -> Result<Vec<Resonance>> {
    require_kind(spec, PotentialKind::Well)?;
    require_count(count)?;
    let theta = spec.theta();
    let v0 = spec.strength();
    let n_inf = spec.n_inf() as f64;
    let level = |m: usize| {
        let r = (n_inf + m as f64) * PI / (2.0 * theta);
        (r * r - 1.0) * v0
    };
    Ok((0..count)
        .map(|m| {
            let energy = level(m);
            let half_width = 4.0 / spec.width() * energy.sqrt();
            let spacing = level(m + 1) - energy;
            Resonance {
                energy,
                width: 2.0 * half_width,
                k: None,
                index: m as u32,
                method: Method::Analytic,
                validity: Some(Validity::new(energy, half_width, spacing)),
            }
        })
        .collect())
}

/// Closed-form barrier resonances, `n = 1..=count`:
/// `E_n = V0 [1 + (nπ/(2θ))²]`, `Γ_n/2 = (2/θ)(E_n − V0)`.
pub fn analytic_barrier_resonances(spec: &PotentialSpec, count: usize) -> Result<Vec<Resonance>> {
    require_kind(spec, PotentialKind::Barrier)?;
    require_count(count)?;
    let theta = spec.theta();
    let v0 = spec.strength();
    let level = |n: usize| {
        let r = n as f64 * PI / (2.0 * theta);
        v0 * (1.0 + r * r)
    };
    Ok((1..=count)
        .map(|n| {
            let energy = level(n);
            let half_width = 2.0 / theta * (energy - v0);
            let spacing = level(n + 1) - energy;
            Resonance {
                energy,
                width: 2.0 * half_width,
                k: None,
                index: n as u32,
                method: Method::Analytic,
                validity: Some(Validity::new(energy, half_width, spacing)),
            }
        })
        .collect())
}

/// Closed-form resonances for either kind (wells from m = 0, barriers from n = 1).
pub fn analytic_resonances(spec: &PotentialSpec, count: usize) -> Result<Vec<Resonance>> {
    match spec.kind() {
        PotentialKind::Well => analytic_well_resonances(spec, count),
        PotentialKind::Barrier => analytic_barrier_resonances(spec, count),
    }
}

/// Newton iteration on Δ(k) = 0 started from a fourth-quadrant guess.
///
/// Converges when the Newton step drops below `tol·max(1, |k|)`, or when it
/// stops shrinking while `|Δ|/|kq|` is below `max(tol, RESIDUAL_CEILING)`.
pub fn refine_pole(
    spec: &PotentialSpec,
    k_guess: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<Resonance> {
    refine_pole_counted(spec, k_guess, tol, max_iter).map(|(r, _)| r)
}

/// Same as [`refine_pole`], also returning the number of Newton steps taken.
pub fn refine_pole_counted(
    spec: &PotentialSpec,
    k_guess: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<(Resonance, usize)> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
    }
    if !in_fourth_quadrant(k_guess) {
        return Err(Error::WrongQuadrant { k: k_guess });
    }
    let mut k = k_guess;
    let mut last_step = f64::INFINITY;
    for iteration in 1..=max_iter {
        let step = delta(spec, k) / delta_derivative(spec, k);
        if !step.is_finite() {
            return Err(Error::NoConvergence {
                iterations: iteration,
                last: k,
            });
        }
        k -= step;
        let guard = 1e-6 * k.norm().max(1.0);
        if k.re < -guard || k.im > guard {
            return Err(Error::WrongQuadrant { k });
        }
        let q = spec.interaction_parameter(k);
        let residual = delta(spec, k).norm() / (k * q).norm();
        let size = step.norm();
        // The step Δ/Δ' is the backward error. Where Δ' is steep the residual
        // bottoms out well above 1e-15, so a stalled step only needs a small
        // residual.
        let converged = size <= tol * k.norm().max(1.0)
            || (size >= last_step && residual <= tol.max(RESIDUAL_CEILING));
        if converged {
            return Ok((Resonance::from_k(k, 0, Method::Refined), iteration));
        }
        last_step = size;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        last: k,
    })
}

/// Refine an analytic estimate, keeping its index and validity flags.
pub fn refine_resonance(
    spec: &PotentialSpec,
    seed: &Resonance,
    tol: f64,
    max_iter: usize,
) -> Result<(Resonance, usize)> {
    let (mut refined, iterations) = refine_pole_counted(spec, seed.kinetic(), tol, max_iter)?;
    refined.index = seed.index;
    refined.validity = seed.validity;
    Ok((refined, iterations))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPeak {
    /// Location of the maximum of T, refined on the closed form.
    pub center: f64,
    pub peak_value: f64,
    /// Lowest sampled T between this peak and its left/right neighbour (or the range edge).
    pub left_min: f64,
    pub right_min: f64,
    pub left_half: Option<f64>,
    pub right_half: Option<f64>,
    pub accepted: bool,
}

impl ScanPeak {
    /// Full width between the half-maximum crossings.
    pub fn width(&self) -> Option<f64> {
        Some(self.right_half? - self.left_half?)
    }

    pub fn as_resonance(&self, index: u32) -> Option<Resonance> {
        Some(Resonance {
            energy: self.center,
            width: self.width()?,
            k: None,
            index,
            method: Method::Graphical,
            validity: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub energies: Vec<f64>,
    pub transmission: Vec<f64>,
    pub peaks: Vec<ScanPeak>,
}

impl ScanResult {
    pub fn accepted(&self) -> impl Iterator<Item = &ScanPeak> {
        self.peaks.iter().filter(|p| p.accepted)
    }

    /// Accepted peaks as graphical resonances numbered from `first_index`.
    pub fn resonances(&self, first_index: u32) -> Vec<Resonance> {
        self.accepted()
            .filter_map(|p| p.as_resonance(0))
            .enumerate()
            .map(|(i, mut r)| {
                r.index = first_index + i as u32;
                r
            })
            .collect()
    }
}

fn t_at(spec: &PotentialSpec, e: f64) -> f64 {
    transmission_coefficient(spec, e).unwrap_or(0.0)
}

/// Golden-section search for the maximum of T on `[lo, hi]`.
fn maximize(spec: &PotentialSpec, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = t_at(spec, a);
    let mut fb = t_at(spec, b);
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi.abs().max(1.0) {
            break;
        }
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = t_at(spec, b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = t_at(spec, a);
        }
    }
    0.5 * (lo + hi)
}

/// Bisection for T(E) = 1/2 with `below` on the low side of the crossing
/// and `above` on the high side (in T, not in E).
fn half_crossing(spec: &PotentialSpec, mut below: f64, mut above: f64) -> f64 {
    for _ in 0..200 {
        if (above - below).abs() <= 1e-10 {
            break;
        }
        let mid = 0.5 * (below + above);
        if mid == below || mid == above {
            break;
        }
        if t_at(spec, mid) < 0.5 {
            below = mid;
        } else {
            above = mid;
        }
    }
    0.5 * (below + above)
}

/// Sample T(E) on a uniform grid and measure the FBW-like peaks.
///
/// A peak is a strict local maximum of the samples (a plateau of equal
/// samples counts once, at its midpoint). Its top is refined on the closed
/// form and its half-maximum crossings are bisected to 1e-10. Peaks whose
/// flanking minima are not both below 1/2 are kept but not accepted.
///
/// Fails with [`Error::NoPeaks`] when nothing is accepted; use
/// [`sample_transmission`] to keep the samples in that case.
pub fn scan_transmission(
    spec: &PotentialSpec,
    e_min: f64,
    e_max: f64,
    samples: usize,
) -> Result<ScanResult> {
    let result = sample_transmission(spec, e_min, e_max, samples)?;
    if result.accepted().next().is_none() {
        return Err(Error::NoPeaks { e_min, e_max });
    }
    Ok(result)
}

/// The scan of [`scan_transmission`] without the accepted-peak requirement.
pub fn sample_transmission(
    spec: &PotentialSpec,
    e_min: f64,
    e_max: f64,
    samples: usize,
) -> Result<ScanResult> {
    if !(e_min.is_finite() && e_min > 0.0) {
        return Err(Error::invalid("e_min", format!("must be > 0, got {e_min}")));
    }
    if !(e_max.is_finite() && e_max > e_min) {
        return Err(Error::invalid("e_max", format!("must exceed e_min, got {e_max}")));
    }
    if samples < 100 {
        return Err(Error::invalid("samples", format!("need at least 100, got {samples}")));
    }
    let step = (e_max - e_min) / (samples - 1) as f64;
    let energies: Vec<f64> = (0..samples)
        .map(|i| if i + 1 == samples { e_max } else { e_min + step * i as f64 })
        .collect();
    let transmission: Vec<f64> = energies.par_iter().map(|&e| t_at(spec, e)).collect();

    // (first, last) sample index of each local-maximum plateau
    let mut maxima = Vec::new();
    let mut i = 1;
    while i + 1 < samples {
        let mut j = i;
        while j + 1 < samples && transmission[j + 1] == transmission[i] {
            j += 1;
        }
        if j + 1 < samples && transmission[i - 1] < transmission[i] && transmission[j + 1] < transmission[i] {
            maxima.push((i, j));
        }
        i = j + 1;
    }

    let argmin = |lo: usize, hi: usize| -> usize {
        (lo..=hi)
            .min_by(|&a, &b| transmission[a].total_cmp(&transmission[b]))
            .unwrap_or(lo)
    };

    let mut peaks = Vec::with_capacity(maxima.len());
    for (p, &(first, last)) in maxima.iter().enumerate() {
        let left_bound = if p == 0 { 0 } else { maxima[p - 1].1 };
        let right_bound = maxima.get(p + 1).map_or(samples - 1, |m| m.0);
        let left_idx = argmin(left_bound, first);
        let right_idx = argmin(last, right_bound);
        let lo = energies[first - 1];
        let hi = energies[last + 1];
        let center = if first == last {
            maximize(spec, lo, hi)
        } else {
            0.5 * (energies[first] + energies[last])
        };
        let peak_value = t_at(spec, center);
        let left_min = transmission[left_idx];
        let right_min = transmission[right_idx];
        let accepted = left_min < 0.5 && right_min < 0.5 && peak_value > 0.5;
        let (left_half, right_half) = if accepted {
            (
                Some(half_crossing(spec, energies[left_idx], center)),
                Some(half_crossing(spec, energies[right_idx], center)),
            )
        } else {
            (None, None)
        };
        peaks.push(ScanPeak {
            center,
            peak_value,
            left_min,
            right_min,
            left_half,
            right_half,
            accepted,
        });
    }

    Ok(ScanResult {
        energies,
        transmission,
        peaks,
    })
}

/// Graphical measurement of the single peak nearest `seed`, using a local
/// scan over half the level spacing on either side.
pub fn measure_peak(spec: &PotentialSpec, seed: &Resonance, samples: usize) -> Result<Resonance> {
    let spacing = seed
        .validity
        .map(|v| v.spacing)
        .unwrap_or(4.0 * seed.width)
        .max(4.0 * seed.width.min(seed.energy));
    let half = 0.5 * spacing;
    let lo = (seed.energy - half).max(seed.energy * 1e-6).max(f64::MIN_POSITIVE);
    let hi = seed.energy + half;
    let scan = scan_transmission(spec, lo, hi, samples)?;
    scan.accepted()
        .min_by(|a, b| {
            (a.center - seed.energy)
                .abs()
                .total_cmp(&(b.center - seed.energy).abs())
        })
        .and_then(|p| p.as_resonance(seed.index))
        .ok_or(Error::NoPeaks { e_min: lo, e_max: hi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundState {
    pub index: usize,
    pub energy: f64,
    pub parity: Parity,
    /// ϱ = qb/2.
    pub rho: f64,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bound states of a well: roots ϱ ∈ (0, θ) of
/// `ϱ tan ϱ = √(θ² − ϱ²)` (even) and `ϱ cot ϱ = −√(θ² − ϱ²)` (odd).
///
/// Each interval `((j−1)π/2, jπ/2) ∩ (0, θ)` holds exactly one root, even for
/// odd `j` and odd for even `j`.
pub fn bound_states(spec: &PotentialSpec) -> Result<Vec<BoundState>> {
    require_kind(spec, PotentialKind::Well)?;
    let theta = spec.theta();
    let b = spec.width();
    let v0 = spec.strength();
    let root = |r: f64| (theta * theta - r * r).max(0.0).sqrt();
    let even = |r: f64| r * r.sin() - root(r) * r.cos();
    let odd = |r: f64| r * r.cos() + root(r) * r.sin();

    let mut states = Vec::new();
    let mut j = 1usize;
    loop {
        let lo = (j - 1) as f64 * PI / 2.0;
        if lo >= theta {
            break;
        }
        let hi = (j as f64 * PI / 2.0).min(theta);
        let (parity, rho) = if j % 2 == 1 {
            (Parity::Even, bisect(even, lo, hi))
        } else {
            (Parity::Odd, bisect(odd, lo, hi))
        };
        let q = 2.0 * rho / b;
        let energy = q * q - v0;
        if energy < 0.0 && rho > 0.0 && rho < theta {
            states.push(BoundState {
                index: states.len(),
                energy,
                parity,
                rho,
            });
        }
        j += 1;
    }
    Ok(states)
}

/// Bound-state wavefunction with its derivative, in the parity-adapted form
/// that is `±e^{∓κx}` outside the well, optionally scaled to unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundWavefunction {
    state: BoundState,
    half_width: f64,
    kappa: f64,
    q: f64,
    interior: f64,
    scale: f64,
}

impl BoundWavefunction {
    pub fn new(spec: &PotentialSpec, state: &BoundState) -> Self {
        let h = spec.half_width();
        let kappa = (-state.energy).sqrt();
        let q = state.rho / h;
        let edge = (-kappa * h).exp();
        let interior = match state.parity {
            Parity::Even => edge / state.rho.cos(),
            Parity::Odd => -edge / state.rho.sin(),
        };
        BoundWavefunction {
            state: *state,
            half_width: h,
            kappa,
            q,
            interior,
            scale: 1.0,
        }
    }

    /// Unit L² norm, using the closed-form integral over the three regions.
    pub fn normalized(spec: &PotentialSpec, state: &BoundState) -> Self {
        let mut wf = Self::new(spec, state);
        let h = wf.half_width;
        let tails = (-2.0 * wf.kappa * h).exp() / wf.kappa;
        let s = (2.0 * wf.q * h).sin() / (2.0 * wf.q);
        let core = match state.parity {
            Parity::Even => wf.interior * wf.interior * (h + s),
            Parity::Odd => wf.interior * wf.interior * (h - s),
        };
        wf.scale = 1.0 / (tails + core).sqrt();
        wf
    }

    pub fn state(&self) -> &BoundState {
        &self.state
    }

    pub fn energy(&self) -> f64 {
        self.state.energy
    }

    pub fn evaluate(&self, x: f64) -> (f64, f64) {
        let h = self.half_width;
        let (u, du) = if x < -h {
            let e = (self.kappa * x).exp();
            (e, self.kappa * e)
        } else if x > h {
            let e = (-self.kappa * x).exp();
            match self.state.parity {
                Parity::Even => (e, -self.kappa * e),
                Parity::Odd => (-e, self.kappa * e),
            }
        } else {
            let a = self.interior;
            match self.state.parity {
                Parity::Even => (a * (self.q * x).cos(), -a * self.q * (self.q * x).sin()),
                Parity::Odd => (a * (self.q * x).sin(), a * self.q * (self.q * x).cos()),
            }
        };
        (self.scale * u, self.scale * du)
    }
}

/// Unnormalised bound-state wavefunction value.
pub fn bound_wavefunction(state: &BoundState, spec: &PotentialSpec, x: f64) -> f64 {
    BoundWavefunction::new(spec, state).evaluate(x).0
}
