//! Gamow-Siegert functions of the square models and the quantities built on
//! their logarithmic derivative β = −u'/u.
//!
//! All variants reuse the Δ-cleared stationary solution, evaluated at the
//! kinetic parameter the variant calls for:
//!
//! | variant      | kinetic parameter | behaviour                                  |
//! |--------------|-------------------|--------------------------------------------|
//! | `Decaying`   | pole `k`          | purely outgoing, grows at both ends        |
//! | `Capture`    | `−k̄`              | purely incoming, `u(x; −k̄) = conj u(x; k)` |
//! | `Decreasing` | `k̄`               | decays to the right, grows to the left     |

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::{in_fourth_quadrant, PotentialSpec};
use crate::scattering::{delta, ClearedCoefficients};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest `|Δ(k)|/|kq|` accepted for a pole.
pub const POLE_TOLERANCE: f64 = 1e-8;

/// `|u|` below this fraction of the local scale is treated as a node.
pub const NODE_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Decaying,
    Capture,
    Decreasing,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Decaying => "decaying",
            Variant::Capture => "capture",
            Variant::Decreasing => "decreasing",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "decaying" => Ok(Variant::Decaying),
            "capture" => Ok(Variant::Capture),
            "decreasing" => Ok(Variant::Decreasing),
            other => Err(Error::invalid(
                "variant",
                format!("expected decaying, capture or decreasing, got `{other}`"),
            )),
        }
    }
}

/// Piecewise closed-form solution at a complex kinetic parameter.
///
/// The overall constant is fixed by making the larger of the two interior
/// coefficients equal to 1. At a pole only one parity survives, so a fixed
/// choice of the cos coefficient would vanish for odd resonances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GamowFunction {
    spec: PotentialSpec,
    variant: Variant,
    k: Complex64,
    coeffs: ClearedCoefficients,
}

/// β, its derivative and the flux velocity at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaValue {
    pub beta: Complex64,
    pub beta_prime: Complex64,
    /// v = −2 Im β.
    pub velocity: f64,
}

impl GamowFunction {
    /// Build from a fourth-quadrant pole `k`. `Decaying` and `Capture` need
    /// `|Δ(k)| ≤ POLE_TOLERANCE·|kq|`; `Decreasing` only needs the quadrant.
    pub fn build(spec: &PotentialSpec, k: Complex64, variant: Variant) -> Result<Self> {
        if !in_fourth_quadrant(k) {
            return Err(Error::Quadrant {
                k,
                variant: variant.name(),
            });
        }
        match variant {
            Variant::Decaying | Variant::Capture => {
                let ratio = pole_ratio(spec, k);
                let on_pole = ratio <= POLE_TOLERANCE;
                if !on_pole {
                    return Err(Error::NotAPole { k, ratio });
                }
                let used = if variant == Variant::Decaying { k } else { -k.conj() };
                Ok(Self::at(spec, used, variant))
            }
            Variant::Decreasing => Ok(Self::at(spec, k.conj(), variant)),
        }
    }

    /// Decreasing function at an upper-half-plane parameter given directly.
    pub fn decreasing(spec: &PotentialSpec, k_upper: Complex64) -> Result<Self> {
        if !(k_upper.im > 0.0 && k_upper.re.is_finite() && k_upper.im.is_finite()) {
            return Err(Error::Quadrant {
                k: k_upper,
                variant: Variant::Decreasing.name(),
            });
        }
        Ok(Self::at(spec, k_upper, Variant::Decreasing))
    }

    fn at(spec: &PotentialSpec, k: Complex64, variant: Variant) -> Self {
        let raw = ClearedCoefficients::new(spec, k);
        let pivot = if raw.cos_coeff.norm() >= raw.sin_coeff.norm() {
            raw.cos_coeff
        } else {
            raw.sin_coeff
        };
        let mut coeffs = raw.scaled(pivot.inv());
        if variant != Variant::Decreasing {
            // Δ(k) vanishes up to round-off; drop the incoming remainder.
            coeffs.left_in = Complex64::new(0.0, 0.0);
        }
        GamowFunction {
            spec: *spec,
            variant,
            k,
            coeffs,
        }
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// The kinetic parameter the function is actually evaluated at.
    pub fn kinetic(&self) -> Complex64 {
        self.k
    }

    pub fn interaction(&self) -> Complex64 {
        self.coeffs.q
    }

    /// ε = k².
    pub fn energy(&self) -> Complex64 {
        self.k * self.k
    }

    pub fn coefficients(&self) -> &ClearedCoefficients {
        &self.coeffs
    }

    /// `(u, u')` at `x`.
    pub fn evaluate(&self, x: f64) -> (Complex64, Complex64) {
        self.coeffs.evaluate(&self.spec, self.k, x)
    }

    /// β = −u'/u with β' from the Riccati identity β' = β² + ε − V.
    pub fn beta(&self, x: f64) -> Result<BetaValue> {
        let (u, du) = self.evaluate(x);
        let scale = self.k.norm().max(self.coeffs.q.norm()).max(1e-300);
        let clear = u.norm() > NODE_TOLERANCE * (u.norm() + du.norm() / scale);
        if !clear {
            return Err(Error::Node { x });
        }
        let beta = -du / u;
        let beta_prime = beta * beta + self.energy() - self.spec.evaluate(x);
        Ok(BetaValue {
            beta,
            beta_prime,
            velocity: -2.0 * beta.im,
        })
    }

    /// Limits of β as x → −∞ and x → +∞, read off the dominant exponential.
    pub fn asymptotic_beta(&self) -> (Complex64, Complex64) {
        let k = self.k;
        let c = &self.coeffs;
        let zero = Complex64::new(0.0, 0.0);
        // e^{ikx} dominates at −∞ when Im k > 0
        let left = if c.left_in != zero && (k.im > 0.0 || c.left_out == zero) {
            -I * k
        } else {
            I * k
        };
        (left, -I * k)
    }

    /// Flux velocities `(v_<, v_>)` beyond the interaction zone.
    pub fn asymptotic_velocity(&self) -> (f64, f64) {
        let (l, r) = self.asymptotic_beta();
        (-2.0 * l.im, -2.0 * r.im)
    }

    /// ρ(x, t) = e^{−Γt}|u(x)|² with Γ = −2 Im ε.
    pub fn density_factor(&self, x: f64, t: f64) -> Result<f64> {
        if self.variant == Variant::Decreasing {
            return Err(Error::Domain(
                "density evolution is defined for decaying and capture functions".into(),
            ));
        }
        let gamma = -2.0 * self.energy().im;
        Ok((-gamma * t).exp() * self.evaluate(x).0.norm_sqr())
    }
}

fn pole_ratio(spec: &PotentialSpec, k: Complex64) -> f64 {
    let q = spec.interaction_parameter(k);
    delta(spec, k).norm() / (k * q).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonances::refine_pole;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pole(spec: &PotentialSpec, guess: Complex64) -> Complex64 {
        refine_pole(spec, guess, 1e-13, 100).unwrap().k.unwrap()
    }

    /// `−u'' + (V − ε) u` by a 5-point stencil, relative to |ε u|.
    fn residual(g: &GamowFunction, x: f64) -> f64 {
        let h = 1e-3;
        let u = |t: f64| g.evaluate(t).0;
        let d2 = (-u(x + 2.0 * h) + 16.0 * u(x + h) - 30.0 * u(x) + 16.0 * u(x - h) - u(x - 2.0 * h))
            / (12.0 * h * h);
        let v = g.spec().evaluate(x);
        (-d2 + (v - g.energy()) * u(x)).norm() / ((v.abs() + g.energy().norm()) * u(x).norm())
    }

    #[test]
    fn decaying_is_continuous_and_solves_the_equation() {
        let spec = PotentialSpec::well(50.0, 14.2).unwrap();
        let k = pole(&spec, c(1.81, -0.14));
        let g = GamowFunction::build(&spec, k, Variant::Decaying).unwrap();
        let h = spec.half_width();
        for edge in [-h, h] {
            let (a, da) = g.evaluate(edge - 1e-9);
            let (b, db) = g.evaluate(edge + 1e-9);
            assert!((a - b).norm() < 1e-6 * a.norm());
            assert!((da - db).norm() < 1e-6 * da.norm());
        }
        for i in 0..100 {
            let x = -20.0 + 40.0 * (i as f64 + 0.37) / 100.0;
            if (x.abs() - h).abs() < 0.01 {
                continue;
            }
            assert!(residual(&g, x) < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn decaying_is_purely_outgoing_and_grows() {
        let spec = PotentialSpec::well(1000.0, 20.0).unwrap();
        let k = pole(&spec, c(2.6035, -0.1003));
        let g = GamowFunction::build(&spec, k, Variant::Decaying).unwrap();
        let (u, du) = g.evaluate(50.0);
        assert!(((du - I * k * u) / u).norm() < 1e-8);
        let (u, du) = g.evaluate(-50.0);
        assert!(((du + I * k * u) / u).norm() < 1e-8);
        let (vl, vr) = g.asymptotic_velocity();
        assert!((vr - 2.0 * k.re).abs() < 1e-12 && (vl + 2.0 * k.re).abs() < 1e-12);
        for x in [15.0, -15.0, 30.0, -30.0] {
            let v = g.beta(x).unwrap().velocity;
            assert!((v - 2.0 * k.re * x.signum()).abs() < 1e-10);
        }
        // |u|² ~ e^{−2 k_I |x|}
        let slope = (g.evaluate(40.0).0.norm_sqr().ln() - g.evaluate(20.0).0.norm_sqr().ln()) / 20.0;
        assert!((slope + 2.0 * k.im).abs() < 1e-6);
    }

    #[test]
    fn odd_pole_still_normalises() {
        let spec = PotentialSpec::well(1000.0, 20.0).unwrap();
        let k = pole(&spec, c(4.095, -0.1006));
        let g = GamowFunction::build(&spec, k, Variant::Decaying).unwrap();
        let c = g.coefficients();
        assert!((c.sin_coeff.norm() - 1.0).abs() < 1e-12 || (c.cos_coeff.norm() - 1.0).abs() < 1e-12);
        assert!(g.evaluate(0.0).0.is_finite());
    }

    #[test]
    fn capture_mirrors_decaying() {
        let spec = PotentialSpec::well(50.0, 14.2).unwrap();
        let k = pole(&spec, c(1.81, -0.14));
        let d = GamowFunction::build(&spec, k, Variant::Decaying).unwrap();
        let cap = GamowFunction::build(&spec, k, Variant::Capture).unwrap();
        assert_eq!(cap.kinetic(), -k.conj());
        for x in [-12.0, -7.1, -3.0, 0.0, 2.2, 7.1, 9.5] {
            let a = d.evaluate(x).0.norm();
            let b = cap.evaluate(x).0.norm();
            assert!((a - b).abs() < 1e-10 * a.max(1.0), "x = {x}");
        }
    }

    #[test]
    fn decreasing_decays_right_and_grows_left() {
        let spec = PotentialSpec::well(50.0, 14.2).unwrap();
        let g = GamowFunction::decreasing(&spec, c(0.3072, 0.2484)).unwrap();
        let k = g.kinetic();
        let rate = |a: f64, b: f64| (g.evaluate(b).0.norm() / g.evaluate(a).0.norm()).ln() / (b - a);
        assert!((rate(20.0, 40.0) + k.im).abs() < 1e-9);
        // on the left the e^{ikx} piece takes over and grows
        assert!((rate(-60.0, -40.0) + k.im).abs() < 1e-6);
        let (bl, br) = g.asymptotic_beta();
        assert_eq!(bl, br);
        let (vl, vr) = g.asymptotic_velocity();
        assert!(vl > 0.0 && vr > 0.0);
    }

    #[test]
    fn build_validates_inputs() {
        let spec = PotentialSpec::well(16.0, 5.0).unwrap();
        assert!(matches!(
            GamowFunction::build(&spec, c(1.7504, -0.7657), Variant::Decaying),
            Err(Error::NotAPole { .. })
        ));
        assert!(matches!(
            GamowFunction::build(&spec, c(1.7, 0.4), Variant::Decaying),
            Err(Error::Quadrant { .. })
        ));
        assert!(GamowFunction::build(&spec, c(1.7504, -0.7657), Variant::Decreasing).is_ok());
        assert!(GamowFunction::decreasing(&spec, c(1.0, -0.1)).is_err());
    }

    #[test]
    fn riccati_matches_finite_differences() {
        let spec = PotentialSpec::well(16.0, 5.0).unwrap();
        let g = GamowFunction::decreasing(&spec, c(1.7504, 0.7657)).unwrap();
        for i in 0..100 {
            let x = -8.0 + 16.0 * (i as f64 + 0.5) / 100.0;
            if (x.abs() - 2.5).abs() < 1e-3 {
                continue;
            }
            let b = g.beta(x).unwrap();
            let (u, du) = g.evaluate(x);
            assert!((b.beta + du / u).norm() < 1e-14 * b.beta.norm().max(1.0));
            let h = 1e-5;
            let fd = (g.beta(x + h).unwrap().beta - g.beta(x - h).unwrap().beta) / (2.0 * h);
            assert!((fd - b.beta_prime).norm() < 1e-6 * b.beta_prime.norm().max(1.0), "x = {x}");
        }
        let far = g.beta(40.0).unwrap().beta;
        assert!((far + I * g.kinetic()).norm() < 1e-8);
    }

    #[test]
    fn density_factor_decays_in_time() {
        let spec = PotentialSpec::well(1000.0, 20.0).unwrap();
        let k = pole(&spec, c(2.6035, -0.1003));
        let g = GamowFunction::build(&spec, k, Variant::Decaying).unwrap();
        let gamma = -2.0 * g.energy().im;
        let d0 = g.density_factor(3.0, 0.0).unwrap();
        assert_eq!(d0, g.evaluate(3.0).0.norm_sqr());
        let d1 = g.density_factor(3.0, 0.5).unwrap();
        let d2 = g.density_factor(3.0, 1.5).unwrap();
        assert!((d2 / d1 - (-gamma).exp()).abs() < 1e-12);
        // outside, ρ ∝ e^{−Γ(t − x/v₊)}: ln ρ is linear in x with slope Γ/v₊
        let v = 2.0 * k.re;
        let xs: Vec<f64> = (0..=20).map(|i| 40.0 + i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| g.density_factor(x, 0.0).unwrap().ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        assert!((sxy / sxx - gamma / v).abs() < 1e-4);
        let dec = GamowFunction::build(&spec, k, Variant::Decreasing).unwrap();
        assert!(dec.density_factor(0.0, 1.0).is_err());
    }

    #[test]
    fn node_is_reported() {
        // an odd resonance vanishes at the origin
        let spec = PotentialSpec::well(16.0, 5.0).unwrap();
        let k = pole(&spec, c(1.75, -0.77));
        let g = GamowFunction::build(&spec, k, Variant::Decaying).unwrap();
        assert!(g.coefficients().cos_coeff.norm() < 1e-12);
        assert!(matches!(g.beta(0.0), Err(Error::Node { .. })));
        assert!(g.beta(0.3).is_ok());
        assert!("Decreasing".parse::<Variant>().is_ok());
        assert!("other".parse::<Variant>().is_err());
    }
}
