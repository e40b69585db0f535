//! Closed-form scattering data for the square models.
//!
//! With a single source on the left the stationary solution is
//!
//! ```text
//! u(x) = e^{ikx} + L e^{-ikx}                x < -b/2
//!        (k/Δ) e^{-ikb/2} [ i(k c - i q s) sin qx + (q c - i k s) cos qx ]
//!        S e^{ikx}                           x >  b/2
//! ```
//!
//! with `c = cos(qb/2)`, `s = sin(qb/2)` and
//! `Δ(k) = (k c − i q s)(q c − i k s)`. Multiplying through by Δ gives the
//! "cleared" form, which stays finite at the zeros of Δ and is what the
//! Gamow-Siegert functions are built from.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative size of |Δ| (against |k q| max(1, |e^{-ikb}|), times the
/// round-off amplification `1 + |qb|` of the trig arguments) below which the
/// amplitudes are reported as sitting on a pole.
pub const POLE_GUARD: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringAmplitudes {
    pub k: Complex64,
    pub q: Complex64,
    /// Reflection amplitude L(k).
    pub reflection: Complex64,
    /// Transmission amplitude S(k).
    pub transmission: Complex64,
    pub delta: Complex64,
}

impl ScatteringAmplitudes {
    pub fn reflection_probability(&self) -> f64 {
        self.reflection.norm_sqr()
    }

    pub fn transmission_probability(&self) -> f64 {
        self.transmission.norm_sqr()
    }
}

/// `sin z / z`, continued to 1 at the origin.
pub(crate) fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Δ(k) = (k cos(qb/2) − i q sin(qb/2)) (q cos(qb/2) − i k sin(qb/2)).
pub fn delta(spec: &PotentialSpec, k: Complex64) -> Complex64 {
    let q = spec.interaction_parameter(k);
    let h = spec.half_width();
    let (s, c) = ((q * h).sin(), (q * h).cos());
    (k * c - I * q * s) * (q * c - I * k * s)
}

/// dΔ/dk, using dq/dk = k/q.
pub fn delta_derivative(spec: &PotentialSpec, k: Complex64) -> Complex64 {
    let q = spec.interaction_parameter(k);
    let h = spec.half_width();
    let (s, c) = ((q * h).sin(), (q * h).cos());
    let dq = k / q;
    let dc = -s * h * dq;
    let ds = c * h * dq;
    let a = k * c - I * q * s;
    let b = q * c - I * k * s;
    let da = c + k * dc - I * (dq * s + q * ds);
    let db = dq * c + q * dc - I * (s + k * ds);
    da * b + a * db
}

/// Δ/q written so that it stays finite at q = 0 (barrier threshold):
/// `k cos qb − i (k² + q²)/2 · b · sinc(qb)`.
fn reduced_delta(spec: &PotentialSpec, k: Complex64, q: Complex64) -> Complex64 {
    let b = spec.width();
    k * (q * b).cos() - I * 0.5 * (k * k + q * q) * b * sinc(q * b)
}

/// Reflection and transmission amplitudes L(k), S(k).
pub fn amplitudes(spec: &PotentialSpec, k: Complex64) -> Result<ScatteringAmplitudes> {
    let q = spec.interaction_parameter(k);
    let b = spec.width();
    let phase = (-I * k * b).exp();
    let reduced = reduced_delta(spec, k, q);
    let amplification = 1.0 + (q * b).norm();
    if reduced.norm() < POLE_GUARD * amplification * k.norm() * phase.norm().max(1.0) {
        return Err(Error::Pole {
            k,
            ratio: reduced.norm() / k.norm(),
        });
    }
    // V0 enters L with the well's sign convention; a barrier is V0 -> -V0.
    let strength = -spec.inside_value();
    let transmission = k * phase / reduced;
    let reflection = I * 0.5 * strength * b * sinc(q * b) * phase / reduced;
    Ok(ScatteringAmplitudes {
        k,
        q,
        reflection,
        transmission,
        delta: q * reduced,
    })
}

/// T(E) = |S(√E)|² for real energies above the scattering threshold.
pub fn transmission_coefficient(spec: &PotentialSpec, energy: f64) -> Result<f64> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::Domain(format!(
            "transmission needs a finite energy E > 0, got {energy}"
        )));
    }
    let k = Complex64::new(energy.sqrt(), 0.0);
    Ok(amplitudes(spec, k)?.transmission_probability().clamp(0.0, 1.0))
}

/// Coefficients of the Δ-cleared stationary solution in each region.
///
/// Left: `left_in e^{ikx} + left_out e^{-ikx}`; interior:
/// `sin_coeff sin qx + cos_coeff cos qx`; right: `right_out e^{ikx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearedCoefficients {
    pub q: Complex64,
    pub left_in: Complex64,
    pub left_out: Complex64,
    pub sin_coeff: Complex64,
    pub cos_coeff: Complex64,
    pub right_out: Complex64,
}

impl ClearedCoefficients {
    pub fn new(spec: &PotentialSpec, k: Complex64) -> Self {
        let q = spec.interaction_parameter(k);
        let h = spec.half_width();
        let b = spec.width();
        let (s, c) = ((q * h).sin(), (q * h).cos());
        let a = k * c - I * q * s;
        let bb = q * c - I * k * s;
        let prefactor = k * (-I * k * h).exp();
        let phase = (-I * k * b).exp();
        let strength = -spec.inside_value();
        ClearedCoefficients {
            q,
            left_in: a * bb,
            left_out: I * 0.5 * strength * (q * b).sin() * phase,
            sin_coeff: prefactor * I * a,
            cos_coeff: prefactor * bb,
            right_out: k * q * phase,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        ClearedCoefficients {
            q: self.q,
            left_in: self.left_in * factor,
            left_out: self.left_out * factor,
            sin_coeff: self.sin_coeff * factor,
            cos_coeff: self.cos_coeff * factor,
            right_out: self.right_out * factor,
        }
    }

    /// Value and derivative at `x` for kinetic parameter `k`.
    pub fn evaluate(&self, spec: &PotentialSpec, k: Complex64, x: f64) -> (Complex64, Complex64) {
        let h = spec.half_width();
        if x < -h {
            let fwd = (I * k * x).exp();
            let bwd = (-I * k * x).exp();
            let u = self.left_in * fwd + self.left_out * bwd;
            let du = I * k * (self.left_in * fwd - self.left_out * bwd);
            (u, du)
        } else if x > h {
            let fwd = (I * k * x).exp();
            (self.right_out * fwd, I * k * self.right_out * fwd)
        } else {
            let q = self.q;
            let (s, c) = ((q * x).sin(), (q * x).cos());
            let u = self.sin_coeff * s + self.cos_coeff * c;
            let du = q * (self.sin_coeff * c - self.cos_coeff * s);
            (u, du)
        }
    }
}

/// Interior branch of the stationary solution multiplied by Δ(k).
pub fn interior_wave(spec: &PotentialSpec, k: Complex64, x: f64) -> Complex64 {
    let coeffs = ClearedCoefficients::new(spec, k);
    let q = coeffs.q;
    coeffs.sin_coeff * (q * x).sin() + coeffs.cos_coeff * (q * x).cos()
}

/// A scattering state with unit incoming amplitude from the left at real κ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringState {
    spec: PotentialSpec,
    kappa: f64,
    coeffs: ClearedCoefficients,
    amplitudes: ScatteringAmplitudes,
}

impl ScatteringState {
    pub fn new(spec: &PotentialSpec, energy: f64) -> Result<Self> {
        if !(energy.is_finite() && energy > 0.0) {
            return Err(Error::Domain(format!(
                "scattering states need E > 0, got {energy}"
            )));
        }
        let kappa = energy.sqrt();
        let k = Complex64::new(kappa, 0.0);
        let amplitudes = amplitudes(spec, k)?;
        let cleared = ClearedCoefficients::new(spec, k);
        let coeffs = cleared.scaled(cleared.left_in.inv());
        Ok(ScatteringState {
            spec: *spec,
            kappa,
            coeffs,
            amplitudes,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn energy(&self) -> f64 {
        self.kappa * self.kappa
    }

    pub fn amplitudes(&self) -> &ScatteringAmplitudes {
        &self.amplitudes
    }

    pub fn evaluate(&self, x: f64) -> (Complex64, Complex64) {
        self.coeffs
            .evaluate(&self.spec, Complex64::new(self.kappa, 0.0), x)
    }
}

/// A Fock-Breit-Wigner (Lorentzian) peak with unit height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FbwPeak {
    energy: f64,
    width: f64,
}

impl FbwPeak {
    pub fn new(energy: f64, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::Domain(format!("FBW width must be > 0, got {width}")));
        }
        if !energy.is_finite() {
            return Err(Error::Domain(format!("FBW center must be finite, got {energy}")));
        }
        Ok(FbwPeak { energy, width })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.width
    }
}

/// ω(ε_R) = (Γ/2)² / ((ε_R − E)² + (Γ/2)²).
pub fn fbw(eps_r: f64, peak: &FbwPeak) -> f64 {
    let h = peak.half_width();
    let d = eps_r - peak.energy;
    h * h / (d * d + h * h)
}

/// Sum of FBW profiles; not clamped to 1.
pub fn fbw_sum(eps_r: f64, peaks: &[FbwPeak]) -> f64 {
    peaks.iter().map(|p| fbw(eps_r, p)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::transfer_matrix_transmission;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_limit_collapses_delta() {
        let spec = PotentialSpec::well(1e-300, 3.0).unwrap();
        for k in [c(0.7, 0.0), c(2.0, -0.3), c(5.0, 0.1)] {
            let expected = k * k * (-I * k * 3.0).exp();
            assert!((delta(&spec, k) - expected).norm() < 1e-12 * expected.norm());
            if k.im == 0.0 {
                let amp = amplitudes(&spec, k).unwrap();
                assert!((amp.transmission - 1.0).norm() < 1e-12);
                assert!(amp.reflection.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_is_large_off_the_pole() {
        // The decreasing-function parameter used for the complex well is not
        // itself a zero of Δ: |Δ|/|kq| is of order one there.
        let spec = PotentialSpec::well(16.0, 5.0).unwrap();
        let k = c(1.7504, -0.7657);
        let q = spec.interaction_parameter(k);
        let ratio = delta(&spec, k).norm() / (k * q).norm();
        assert!((ratio - 0.731818).abs() < 1e-5, "ratio = {ratio}");
    }

    #[test]
    fn delta_small_near_analytic_seed() {
        let spec = PotentialSpec::well(1000.0, 20.0).unwrap();
        let e: f64 = 6.798680;
        let k = c(e.sqrt(), -0.527888 / (2.0 * e.sqrt()));
        let q = spec.interaction_parameter(k);
        assert!(delta(&spec, k).norm() < 0.2 * (k * q).norm());
    }

    #[test]
    fn delta_derivative_matches_central_difference() {
        let spec = PotentialSpec::barrier(30.0, 2.0).unwrap();
        for k in [c(6.0, -0.2), c(2.5, -0.9), c(1.2, 0.4)] {
            let h = 1e-6;
            let fd = (delta(&spec, k + h) - delta(&spec, k - h)) / (2.0 * h);
            let an = delta_derivative(&spec, k);
            assert!((fd - an).norm() < 1e-6 * an.norm().max(1.0));
            let fdi = (delta(&spec, k + I * h) - delta(&spec, k - I * h)) / (2.0 * I * h);
            assert!((fdi - an).norm() < 1e-6 * an.norm().max(1.0));
        }
    }

    #[test]
    fn unitarity_for_real_k() {
        let spec = PotentialSpec::well(16.0, 5.0).unwrap();
        let amp = amplitudes(&spec, c(2.0, 0.0)).unwrap();
        let sum = amp.reflection_probability() + amp.transmission_probability();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn barrier_transparency_is_nearly_total() {
        let spec = PotentialSpec::barrier(1000.0, 10.0).unwrap();
        let t = transmission_coefficient(&spec, 1000.098696).unwrap();
        assert!(t >= 0.99, "T = {t}");
    }

    #[test]
    fn well_transmission_at_first_resonance() {
        let spec = PotentialSpec::well(1000.0, 20.0).unwrap();
        let t = transmission_coefficient(&spec, 6.798680).unwrap();
        assert!((t - 1.0).abs() < 0.01, "T = {t}");
    }

    #[test]
    fn full_transmission_when_qb_is_multiple_of_pi() {
        let spec = PotentialSpec::well(16.0, 5.0).unwrap();
        let q = 3.0 * std::f64::consts::PI / 5.0 * 3.0;
        let e = q * q - 16.0;
        let t = transmission_coefficient(&spec, e).unwrap();
        assert!((t - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tunneling_matches_transfer_matrix() {
        let spec = PotentialSpec::barrier(1000.0, 5.0).unwrap();
        let closed = transmission_coefficient(&spec, 500.0).unwrap();
        let oracle = transfer_matrix_transmission(&[(-2.5, 2.5, 1000.0)], 500.0);
        assert!((closed - oracle).abs() < 1e-10);
    }

    #[test]
    fn barrier_threshold_is_regular() {
        let spec = PotentialSpec::barrier(1000.0, 5.0).unwrap();
        let t = transmission_coefficient(&spec, 1000.0).unwrap();
        let oracle = transfer_matrix_transmission(&[(-2.5, 2.5, 1000.0)], 1000.0 + 1e-9);
        assert!((t - oracle).abs() < 1e-6);
        let expected = 1.0 / (1.0 + 1000.0 * 25.0 / 4.0);
        assert!((t - expected).abs() < 1e-12, "T = {t}");
    }

    #[test]
    fn non_positive_energy_is_rejected() {
        let spec = PotentialSpec::well(16.0, 5.0).unwrap();
        assert!(matches!(transmission_coefficient(&spec, 0.0), Err(Error::Domain(_))));
        assert!(matches!(transmission_coefficient(&spec, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn amplitudes_at_a_pole_are_an_error() {
        let spec = PotentialSpec::well(1000.0, 20.0).unwrap();
        let pole = crate::resonances::refine_pole(&spec, c(2.6035, -0.1003), 1e-13, 100)
            .unwrap()
            .k
            .unwrap();
        assert!(matches!(amplitudes(&spec, pole), Err(Error::Pole { .. })));
    }

    #[test]
    fn product_and_cos_tan_forms_agree() {
        // S = e^{-ikb} / (cos qb [1 - i g(k)]), g = (k² + q²)/(2qk) tan qb.
        let spec = PotentialSpec::well(50.0, 3.0).unwrap();
        for k in [c(1.3, 0.0), c(2.2, -0.4), c(0.6, -0.05)] {
            let q = spec.interaction_parameter(k);
            let b = spec.width();
            let g = (k * k + q * q) / (2.0 * q * k) * (q * b).tan();
            let alt = (-I * k * b).exp() / ((q * b).cos() * (1.0 - I * g));
            let direct = k * q / delta(&spec, k) * (-I * k * b).exp();
            let amp = amplitudes(&spec, k).unwrap();
            assert!((alt - direct).norm() < 1e-12 * direct.norm());
            assert!((amp.transmission - direct).norm() < 1e-12 * direct.norm());
        }
    }

    #[test]
    fn interior_wave_at_origin() {
        let spec = PotentialSpec::well(16.0, 5.0).unwrap();
        let k = c(1.1, -0.2);
        let q = spec.interaction_parameter(k);
        let h = 2.5;
        let expected = k * (-I * k * h).exp() * (q * (q * h).cos() - I * k * (q * h).sin());
        assert!((interior_wave(&spec, k, 0.0) - expected).norm() < 1e-13 * expected.norm());
    }

    #[test]
    fn cleared_solution_is_continuous_with_continuous_derivative() {
        for spec in [
            PotentialSpec::well(16.0, 5.0).unwrap(),
            PotentialSpec::barrier(40.0, 2.0).unwrap(),
        ] {
            for k in [c(1.7, -0.3), c(7.0, -0.05), c(0.4, 0.2)] {
                let co = ClearedCoefficients::new(&spec, k);
                let h = spec.half_width();
                for edge in [-h, h] {
                    let eps = 1e-7;
                    let (ul, dl) = co.evaluate(&spec, k, edge - eps);
                    let (ur, dr) = co.evaluate(&spec, k, edge + eps);
                    let scale = ul.norm() + dl.norm();
                    // first-order extrapolation to the edge from either side
                    assert!(((ul + eps * dl) - (ur - eps * dr)).norm() < 1e-10 * scale);
                    assert!((dl - dr).norm() < 1e-5 * scale);
                }
                // outgoing branch at +b/2 agrees with the interior formula
                let right = co.right_out * (I * k * h).exp();
                assert!((interior_wave(&spec, k, h) - right).norm() < 1e-10 * right.norm());
                // derivative from finite differences of the closed form
                for x in [-h + 1e-3, 0.3 * h, h - 1e-3, h + 0.5, -h - 0.5] {
                    let step = 1e-5;
                    let fd = (co.evaluate(&spec, k, x + step).0 - co.evaluate(&spec, k, x - step).0)
                        / (2.0 * step);
                    let an = co.evaluate(&spec, k, x).1;
                    assert!((fd - an).norm() < 1e-6 * an.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn fbw_examples() {
        let peak = FbwPeak::new(3.0, 0.5).unwrap();
        assert_eq!(fbw(3.0, &peak), 1.0);
        assert_eq!(fbw(3.25, &peak), 0.5);
        assert_eq!(fbw(2.75, &peak), 0.5);
        assert!((fbw(3.75, &peak) - 0.1).abs() < 1e-15);
        assert_eq!(fbw_sum(1.0, &[]), 0.0);
        assert_eq!(fbw_sum(3.0, &[peak]), 1.0);
        assert!(FbwPeak::new(1.0, 0.0).is_err());
        assert!(FbwPeak::new(1.0, -1.0).is_err());
    }

    #[test]
    fn scattering_state_has_unit_incoming_wave() {
        let spec = PotentialSpec::well(16.0, 5.0).unwrap();
        let state = ScatteringState::new(&spec, 4.0).unwrap();
        let amp = state.amplitudes();
        let x = 7.0;
        let (u, _) = state.evaluate(x);
        let expected = amp.transmission * (I * 2.0 * x).exp();
        assert!((u - expected).norm() < 1e-12);
        let (u, _) = state.evaluate(-x);
        let expected = (-I * 2.0 * x).exp() + amp.reflection * (I * 2.0 * x).exp();
        assert!((u - expected).norm() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn spec_strategy() -> impl Strategy<Value = PotentialSpec> {
            (any::<bool>(), 0.1f64..200.0, 0.2f64..8.0).prop_map(|(barrier, v0, b)| {
                if barrier {
                    PotentialSpec::barrier(v0, b).unwrap()
                } else {
                    PotentialSpec::well(v0, b).unwrap()
                }
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(500))]

            #[test]
            fn unitarity(spec in spec_strategy(), k in 0.05f64..30.0) {
                let amp = amplitudes(&spec, Complex64::new(k, 0.0)).unwrap();
                let sum = amp.reflection_probability() + amp.transmission_probability();
                prop_assert!((sum - 1.0).abs() < 1e-12, "sum = {}", sum);
            }

            #[test]
            fn mirror_symmetry(spec in spec_strategy(), re in 0.05f64..10.0, im in -1.5f64..1.5) {
                let k = Complex64::new(re, im);
                let mirrored = -k.conj();
                if let (Ok(a), Ok(b)) = (amplitudes(&spec, k), amplitudes(&spec, mirrored)) {
                    let scale = a.transmission.norm().max(1.0);
                    prop_assert!((a.transmission.conj() - b.transmission).norm() < 1e-12 * scale);
                }
            }

            #[test]
            fn branch_invariance(spec in spec_strategy(), re in 0.05f64..10.0, im in -1.0f64..0.5) {
                let k = Complex64::new(re, im);
                let q = spec.interaction_parameter(k);
                let h = spec.half_width();
                let with_q = |q: Complex64| {
                    let (s, c) = ((q * h).sin(), (q * h).cos());
                    let d = (k * c - I * q * s) * (q * c - I * k * s);
                    k * q / d * (-I * k * spec.width()).exp()
                };
                let a = with_q(q);
                let b = with_q(-q);
                prop_assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
            }
        }
    }
}
