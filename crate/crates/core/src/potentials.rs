//! Square well and square barrier models.
//!
//! Both models share one parametrisation: a strength `V0 > 0`, a width `b > 0`
//! and a [`PotentialKind`] that fixes the sign of the step. Units are
//! ħ²/2m = 1, so energies are squared wavenumbers.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Well,
    Barrier,
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialKind::Well => f.write_str("well"),
            PotentialKind::Barrier => f.write_str("barrier"),
        }
    }
}

impl FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "well" => Ok(PotentialKind::Well),
            "barrier" => Ok(PotentialKind::Barrier),
            other => Err(Error::invalid("kind", format!("expected `well` or `barrier`, got `{other}`"))),
        }
    }
}

/// A square well `V(x) = -V0 Θ(b/2 - |x|)` or barrier `V(x) = V0 Θ(b/2 - |x|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSpec {
    kind: PotentialKind,
    strength: f64,
    width: f64,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, strength: f64, width: f64) -> Result<Self> {
        if !(strength.is_finite() && strength > 0.0) {
            return Err(Error::invalid("v0", format!("must be finite and > 0, got {strength}")));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::invalid("b", format!("must be finite and > 0, got {width}")));
        }
        let spec = PotentialSpec {
            kind,
            strength,
            width,
        };
        let theta = spec.theta();
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::invalid("b", format!("θ = (b/2)√V0 must be finite and > 0, got {theta}")));
        }
        Ok(spec)
    }

    pub fn well(strength: f64, width: f64) -> Result<Self> {
        Self::new(PotentialKind::Well, strength, width)
    }

    pub fn barrier(strength: f64, width: f64) -> Result<Self> {
        Self::new(PotentialKind::Barrier, strength, width)
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.width
    }

    /// Signed value of the potential inside the interaction zone.
    pub fn inside_value(&self) -> f64 {
        match self.kind {
            PotentialKind::Well => -self.strength,
            PotentialKind::Barrier => self.strength,
        }
    }

    /// Strength-range product θ = (b/2)√V0.
    pub fn theta(&self) -> f64 {
        0.5 * self.width * self.strength.sqrt()
    }

    /// ⌈2θ/π⌉: the label of the lowest positive-energy resonance of a well,
    /// which is also the number of its bound states.
    pub fn n_inf(&self) -> u64 {
        (2.0 * self.theta() / PI).ceil() as u64
    }

    /// Pointwise potential. The boundary |x| = b/2 belongs to the interior.
    pub fn evaluate(&self, x: f64) -> f64 {
        if x.abs() <= self.half_width() {
            self.inside_value()
        } else {
            0.0
        }
    }

    /// `q = √(k² + V0)` for wells and `√(k² − V0)` for barriers, principal branch.
    pub fn interaction_parameter(&self, k: Complex64) -> Complex64 {
        principal_sqrt(k * k - self.inside_value())
    }

    pub fn kinetic_pair(&self, k: Complex64) -> KineticPair {
        KineticPair {
            k,
            q: self.interaction_parameter(k),
        }
    }
}

/// Kinetic parameter `k` (ε = k²) together with the interaction parameter `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticPair {
    pub k: Complex64,
    pub q: Complex64,
}

impl KineticPair {
    pub fn energy(&self) -> Complex64 {
        self.k * self.k
    }
}

/// Square root with `Re ≥ 0`, and `Im ≥ 0` on the cut.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re == 0.0 && r.im < 0.0 {
        -r
    } else {
        r
    }
}

/// The k-plane quadrant convention used for resonances: `k_R > 0`, `k_I < 0`.
pub fn in_fourth_quadrant(k: Complex64) -> bool {
    k.re > 0.0 && k.im < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_matches_step_definition() {
        let well = PotentialSpec::well(16.0, 5.0).unwrap();
        assert_eq!(well.evaluate(0.0), -16.0);
        assert_eq!(well.evaluate(3.0), 0.0);
        assert_eq!(well.evaluate(-2.5), -16.0);
        let barrier = PotentialSpec::barrier(1000.0, 5.0).unwrap();
        assert_eq!(barrier.evaluate(2.5), 1000.0);
        assert_eq!(barrier.evaluate(2.5 + 1e-12), 0.0);
    }

    #[test]
    fn interaction_parameter_examples() {
        let well = PotentialSpec::well(16.0, 5.0).unwrap();
        let q = well.interaction_parameter(Complex64::new(3.0, 0.0));
        assert!((q - Complex64::new(5.0, 0.0)).norm() < 1e-15);

        let barrier = PotentialSpec::barrier(1000.0, 5.0).unwrap();
        let q = barrier.interaction_parameter(Complex64::new(1000f64.sqrt(), 0.0));
        assert!(q.norm() < 1e-6, "threshold q = {q}");

        let k = Complex64::new(1.7504, -0.7657);
        let q = well.interaction_parameter(k);
        assert!((q * q - (k * k + 16.0)).norm() < 1e-12);
    }

    #[test]
    fn branch_on_cut_has_nonnegative_imaginary_part() {
        let z = Complex64::new(-4.0, -0.0);
        let r = principal_sqrt(z);
        assert_eq!(r, Complex64::new(0.0, 2.0));
        // Below threshold the barrier's q is purely imaginary with Im > 0.
        let barrier = PotentialSpec::barrier(10.0, 1.0).unwrap();
        let q = barrier.interaction_parameter(Complex64::new(1.0, 0.0));
        assert!(q.re == 0.0 && q.im > 0.0);
    }

    #[test]
    fn theta_and_n_inf_reference_values() {
        assert_eq!(PotentialSpec::well(1000.0, 20.0).unwrap().n_inf(), 202);
        assert_eq!(PotentialSpec::well(743.0, 22.0).unwrap().n_inf(), 191);
        assert_eq!(PotentialSpec::well(16.0, 5.0).unwrap().theta(), 10.0);
    }

    #[test]
    fn rejects_non_positive_parameters() {
        assert!(matches!(
            PotentialSpec::well(0.0, 1.0),
            Err(Error::InvalidParameter { field: "v0", .. })
        ));
        assert!(matches!(
            PotentialSpec::barrier(1.0, -2.0),
            Err(Error::InvalidParameter { field: "b", .. })
        ));
        assert!(PotentialSpec::well(f64::NAN, 1.0).is_err());
        assert!(PotentialSpec::well(1e-300, 1.0).is_ok());
    }

    #[test]
    fn kind_parses_case_insensitively() {
        assert_eq!("Well".parse::<PotentialKind>().unwrap(), PotentialKind::Well);
        assert_eq!("barrier".parse::<PotentialKind>().unwrap(), PotentialKind::Barrier);
        assert!("step".parse::<PotentialKind>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn q_squared_round_trips(
                re in -50.0f64..50.0,
                im in -50.0f64..50.0,
                v0 in 1e-3f64..2000.0,
                barrier in any::<bool>(),
            ) {
                let kind = if barrier { PotentialKind::Barrier } else { PotentialKind::Well };
                let spec = PotentialSpec::new(kind, v0, 1.0).unwrap();
                let k = Complex64::new(re, im);
                let q = spec.interaction_parameter(k);
                let lhs = q * q - k * k;
                let expected = -spec.inside_value();
                let scale = 1.0 + (k * k).norm() + v0;
                prop_assert!((lhs - expected).norm() <= 4.0 * f64::EPSILON * scale);
                prop_assert!(q.re >= 0.0);
            }
        }
    }
}
