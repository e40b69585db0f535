//! First- and second-order Darboux deformations generated by a
//! [`GamowFunction`].
//!
//! First order: `Ṽ = V + 2β' = 2β² + 2ε − V`, with solutions
//! `y = ψ' + βψ` at every energy of the base problem and `y_ε = 1/u` at ε.
//!
//! Second order, paired with the conjugate function at ε̄:
//! `β₂ = −β − ε_I/β_I`, giving the real potential
//! `V₂ = V + 4(ε_I/v)' = V − 4ε_I v'/v²` with `v' = −2(2β_Rβ_I + ε_I)`, and
//! solutions `Ψ = (ε − ℰ)ψ + 2(ε_I/v) y`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamow::{BetaValue, GamowFunction};
use crate::numerics::gram_matrix;
use crate::potentials::PotentialSpec;
use crate::resonances::BoundWavefunction;
use crate::scattering::ScatteringState;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A solution of the base problem, with its derivative.
pub trait BaseSolution {
    fn energy(&self) -> Complex64;
    fn evaluate(&self, x: f64) -> (Complex64, Complex64);
}

impl BaseSolution for BoundWavefunction {
    fn energy(&self) -> Complex64 {
        Complex64::new(BoundWavefunction::energy(self), 0.0)
    }

    fn evaluate(&self, x: f64) -> (Complex64, Complex64) {
        let (u, du) = BoundWavefunction::evaluate(self, x);
        (Complex64::new(u, 0.0), Complex64::new(du, 0.0))
    }
}

impl BaseSolution for ScatteringState {
    fn energy(&self) -> Complex64 {
        Complex64::new(ScatteringState::energy(self), 0.0)
    }

    fn evaluate(&self, x: f64) -> (Complex64, Complex64) {
        ScatteringState::evaluate(self, x)
    }
}

impl BaseSolution for GamowFunction {
    fn energy(&self) -> Complex64 {
        GamowFunction::energy(self)
    }

    fn evaluate(&self, x: f64) -> (Complex64, Complex64) {
        GamowFunction::evaluate(self, x)
    }
}

/// Default sampling half-window `b/2 + min(15/|k_I|, 10b)`.
pub fn default_window(spec: &PotentialSpec, k: Complex64) -> f64 {
    spec.half_width() + (15.0 / k.im.abs()).min(10.0 * spec.width())
}

/// Complex first-order deformation Ṽ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformedPotential1 {
    g: GamowFunction,
}

impl DeformedPotential1 {
    pub fn new(g: GamowFunction) -> Self {
        DeformedPotential1 { g }
    }

    pub fn transformation(&self) -> &GamowFunction {
        &self.g
    }

    pub fn evaluate(&self, x: f64) -> Result<Complex64> {
        let b = self.g.beta(x)?;
        Ok(2.0 * b.beta * b.beta + 2.0 * self.g.energy() - self.g.spec().evaluate(x))
    }

    pub fn sample(&self, xs: &[f64]) -> Result<Vec<Complex64>> {
        xs.par_iter().map(|&x| self.evaluate(x)).collect()
    }
}

pub fn deform1(g: &GamowFunction) -> DeformedPotential1 {
    DeformedPotential1::new(*g)
}

/// `y = ψ' + βψ`, a solution of `−y'' + Ṽ y = ℰ y`.
#[derive(Debug, Clone, Copy)]
pub struct FirstOrderState<S> {
    g: GamowFunction,
    psi: S,
}

impl<S: BaseSolution> FirstOrderState<S> {
    pub fn energy(&self) -> Complex64 {
        self.psi.energy()
    }

    pub fn base(&self) -> &S {
        &self.psi
    }

    /// `(y, y')`, using `y' = (ε − ℰ)ψ + βy`.
    pub fn evaluate(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let b = self.g.beta(x)?;
        Ok(self.with_beta(&b, x))
    }

    fn with_beta(&self, b: &BetaValue, x: f64) -> (Complex64, Complex64) {
        let (psi, dpsi) = self.psi.evaluate(x);
        let y = dpsi + b.beta * psi;
        let dy = (self.g.energy() - self.psi.energy()) * psi + b.beta * y;
        (y, dy)
    }
}

pub fn deform1_state<S: BaseSolution>(g: &GamowFunction, psi: S) -> FirstOrderState<S> {
    FirstOrderState { g: *g, psi }
}

/// `y_ε = 1/u`, the extra solution of the Ṽ problem at the complex energy ε.
/// Square integrable when the generating function is a decaying state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseState {
    g: GamowFunction,
}

impl InverseState {
    pub fn energy(&self) -> Complex64 {
        self.g.energy()
    }

    pub fn evaluate(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let b = self.g.beta(x)?;
        let inv = self.g.evaluate(x).0.inv();
        Ok((inv, b.beta * inv))
    }
}

pub fn new_eigenstate(g: &GamowFunction) -> InverseState {
    InverseState { g: *g }
}

/// Reflection and transmission of a deformed scattering wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformedScattering {
    pub kappa: f64,
    /// t = (β_> + iκ)/(β_< + iκ).
    pub t: Complex64,
    pub reflection: f64,
    pub transmission: f64,
    /// `v_s/v` with v the generating function's outgoing velocity on the right.
    pub velocity_ratio: f64,
    /// Closed approximation `(1 + r²(1 − 2/r)) / (1 + r²(1 + 2/r))` for R̃ + T̃.
    pub approximation: f64,
}

impl TransformedScattering {
    pub fn sum(&self) -> f64 {
        self.reflection + self.transmission
    }
}

pub fn transformed_scattering(g: &GamowFunction, energy: f64) -> Result<TransformedScattering> {
    let state = ScatteringState::new(g.spec(), energy)?;
    let kappa = state.kappa();
    let (beta_left, beta_right) = g.asymptotic_beta();
    let t = (beta_right + I * kappa) / (beta_left + I * kappa);
    let amp = state.amplitudes();
    let scale = t.norm_sqr();
    let (_, v) = g.asymptotic_velocity();
    let r = 2.0 * kappa / v;
    let approximation = (1.0 + r * r * (1.0 - 2.0 / r)) / (1.0 + r * r * (1.0 + 2.0 / r));
    Ok(TransformedScattering {
        kappa,
        t,
        reflection: scale * amp.reflection_probability(),
        transmission: scale * amp.transmission_probability(),
        velocity_ratio: r,
        approximation,
    })
}

/// Real second-order deformation V₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformedPotential2 {
    g: GamowFunction,
}

impl DeformedPotential2 {
    /// Fails with [`Error::ZeroVelocity`] if the flux velocity of `g` vanishes
    /// anywhere, since V₂ is singular there. A decaying state always has one
    /// such point (its velocity runs from −2k_R to +2k_R).
    pub fn new(g: GamowFunction) -> Result<Self> {
        let d = DeformedPotential2 { g };
        let spec = g.spec();
        let velocity = |x: f64| g.beta(x).map(|b| b.velocity);
        let (vl, vr) = g.asymptotic_velocity();
        let reach = spec.half_width() + (40.0 / g.kinetic().im.abs()).min(50.0 * spec.width());
        if vl == 0.0 || vr == 0.0 {
            return Err(Error::ZeroVelocity {
                x: if vl == 0.0 { f64::NEG_INFINITY } else { f64::INFINITY },
            });
        }
        // bracket between the far tails and a fine interior sweep
        let n = 4000;
        let mut xs = vec![-reach];
        xs.extend((0..=n).map(|i| -reach + 2.0 * reach * i as f64 / n as f64));
        let mut prev = (xs[0], vl);
        for &x in xs.iter().skip(1).chain(std::iter::once(&f64::INFINITY)) {
            let v = if x.is_finite() { velocity(x)? } else { vr };
            if v == 0.0 || (v > 0.0) != (prev.1 > 0.0) {
                let zero = if x.is_finite() {
                    bisect_velocity(&g, prev.0, x)?
                } else {
                    prev.0
                };
                return Err(Error::ZeroVelocity { x: zero });
            }
            prev = (x, v);
        }
        Ok(d)
    }

    pub fn transformation(&self) -> &GamowFunction {
        &self.g
    }

    fn parts(&self, x: f64) -> Result<(BetaValue, f64, f64)> {
        let b = self.g.beta(x)?;
        let eps_i = self.g.energy().im;
        let v = b.velocity;
        if v == 0.0 {
            return Err(Error::ZeroVelocity { x });
        }
        let dv = -2.0 * (2.0 * b.beta.re * b.beta.im + eps_i);
        Ok((b, v, dv))
    }

    /// V₂(x) = V(x) − 4ε_I v'/v².
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let (_, v, dv) = self.parts(x)?;
        let eps_i = self.g.energy().im;
        Ok(self.g.spec().evaluate(x) - 4.0 * eps_i * dv / (v * v))
    }

    /// The same potential via the complex route `2β₂² + 2ε̄ − Ṽ`; its imaginary
    /// part vanishes up to round-off.
    pub fn evaluate_complex(&self, x: f64) -> Result<Complex64> {
        let b = self.g.beta(x)?;
        let eps = self.g.energy();
        if b.beta.im == 0.0 {
            return Err(Error::ZeroVelocity { x });
        }
        let beta2 = -b.beta - eps.im / b.beta.im;
        let v1 = 2.0 * b.beta * b.beta + 2.0 * eps - self.g.spec().evaluate(x);
        Ok(2.0 * beta2 * beta2 + 2.0 * eps.conj() - v1)
    }

    pub fn sample(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.par_iter().map(|&x| self.evaluate(x)).collect()
    }

    /// Clusters of sign changes of `V₂ − V` strictly inside the interaction
    /// zone. Samples smaller than 1% of the largest deviation are ignored, and
    /// each localized distortion accounts for a pair of sign changes.
    pub fn distortion_groups(&self, samples: usize) -> Result<usize> {
        let spec = self.g.spec();
        let h = spec.half_width();
        let xs: Vec<f64> = (1..samples.max(3))
            .map(|i| -h + 2.0 * h * i as f64 / samples.max(3) as f64)
            .collect();
        let diff: Vec<f64> = self
            .sample(&xs)?
            .into_iter()
            .zip(&xs)
            .map(|(v2, &x)| v2 - spec.evaluate(x))
            .collect();
        let peak = diff.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        if peak == 0.0 {
            return Ok(0);
        }
        let signs: Vec<bool> = diff
            .iter()
            .filter(|d| d.abs() > 0.01 * peak)
            .map(|d| *d > 0.0)
            .collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        Ok(changes.div_ceil(2))
    }
}

fn bisect_velocity(g: &GamowFunction, mut lo: f64, mut hi: f64) -> Result<f64> {
    let v_lo = g.beta(lo)?.velocity;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let v = g.beta(mid)?.velocity;
        if (v > 0.0) == (v_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn deform2(g: &GamowFunction) -> Result<DeformedPotential2> {
    DeformedPotential2::new(*g)
}

/// `Ψ = (ε − ℰ)ψ + 2(ε_I/v) y`, a solution of `−Ψ'' + V₂Ψ = ℰΨ`.
#[derive(Debug, Clone, Copy)]
pub struct SecondOrderState<S> {
    d: DeformedPotential2,
    psi: S,
}

impl<S: BaseSolution> SecondOrderState<S> {
    pub fn energy(&self) -> Complex64 {
        self.psi.energy()
    }

    pub fn evaluate(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let g = &self.d.g;
        let (b, v, dv) = self.d.parts(x)?;
        let first = FirstOrderState { g: *g, psi: &self.psi };
        let (y, dy) = first.with_beta(&b, x);
        let (psi, dpsi) = self.psi.evaluate(x);
        let eps = g.energy();
        let gap = eps - self.psi.energy();
        let f = eps.im / v;
        let df = -eps.im * dv / (v * v);
        Ok((gap * psi + 2.0 * f * y, gap * dpsi + 2.0 * (df * y + f * dy)))
    }
}

impl<S: BaseSolution + ?Sized> BaseSolution for &S {
    fn energy(&self) -> Complex64 {
        (*self).energy()
    }

    fn evaluate(&self, x: f64) -> (Complex64, Complex64) {
        (*self).evaluate(x)
    }
}

pub fn deform2_state<S: BaseSolution>(d: &DeformedPotential2, psi: S) -> Result<SecondOrderState<S>> {
    let eps = d.g.energy();
    if (eps - psi.energy()).norm() <= 1e-12 * eps.norm() {
        return Err(Error::Domain(
            "the base state sits at the transformation energy; Ψ degenerates".into(),
        ));
    }
    Ok(SecondOrderState { d: *d, psi })
}

/// Overlaps `∫ conj(y_i) y_j` of the first-order images of the bound states,
/// each base state normalised to 1. The images are not orthogonal.
pub fn bound_image_gram(
    g: &GamowFunction,
    states: &[BoundWavefunction],
    window: f64,
    intervals: usize,
) -> Result<Vec<Vec<Complex64>>> {
    // surface node errors before integrating
    for s in states {
        let st = deform1_state(g, *s);
        for i in 0..=64 {
            st.evaluate(-window + 2.0 * window * i as f64 / 64.0)?;
        }
    }
    let images: Vec<FirstOrderState<BoundWavefunction>> =
        states.iter().map(|s| deform1_state(g, *s)).collect();
    let closures: Vec<Box<dyn Fn(f64) -> Complex64 + '_>> = images
        .iter()
        .map(|img| {
            Box::new(move |x: f64| img.evaluate(x).map(|v| v.0).unwrap_or(Complex64::new(f64::NAN, 0.0)))
                as Box<dyn Fn(f64) -> Complex64>
        })
        .collect();
    let refs: Vec<&dyn Fn(f64) -> Complex64> = closures.iter().map(|b| b.as_ref()).collect();
    Ok(gram_matrix(&refs, -window, window, intervals))
}
