use gamow::darboux::{deform2, transformed_scattering};
use gamow::numerics::simpson;
use gamow::resonances::{analytic_resonances, bound_states, refine_resonance, BoundWavefunction};
use gamow::scattering::{delta, transmission_coefficient};
use gamow::{GamowFunction, PotentialSpec, Variant};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn well_poles_sit_near_their_analytic_seeds(
        v0 in 200.0f64..1500.0,
        b in 10.0f64..25.0,
        m in 0usize..4,
    ) {
        let spec = PotentialSpec::well(v0, b).unwrap();
        let seeds = analytic_resonances(&spec, m + 1).unwrap();
        let seed = &seeds[m];
        let (pole, _) = refine_resonance(&spec, seed, 1e-12, 100).unwrap();
        let k = pole.kinetic();
        prop_assert!(k.re > 0.0 && k.im < 0.0);
        prop_assert!(delta(&spec, k).norm() < 1e-8 * (k * spec.interaction_parameter(k)).norm());
        let validity = seed.validity.unwrap();
        // near threshold the lowest pole may have Re ε < 0 and no peak above it
        if validity.above_spacing {
            prop_assert!((pole.energy - seed.energy).abs() < 0.5 * validity.spacing);
            prop_assert!(transmission_coefficient(&spec, pole.energy).unwrap() > 0.5);
        }
    }

    #[test]
    fn barrier_poles_sit_near_their_analytic_seeds(
        v0 in 500.0f64..1500.0,
        b in 4.0f64..12.0,
        n in 0usize..4,
    ) {
        let spec = PotentialSpec::barrier(v0, b).unwrap();
        let seeds = analytic_resonances(&spec, n + 1).unwrap();
        let (pole, _) = refine_resonance(&spec, &seeds[n], 1e-12, 100).unwrap();
        prop_assert!(pole.energy > v0);
        prop_assert!((pole.energy - seeds[n].energy).abs() < 1e-3 * seeds[n].energy);
        prop_assert!(pole.half_width() > 0.0);
    }

    #[test]
    fn transformed_flux_matches_closed_form(
        v0 in 20.0f64..200.0,
        b in 4.0f64..15.0,
        e in 0.1f64..50.0,
    ) {
        let spec = PotentialSpec::well(v0, b).unwrap();
        let seed = analytic_resonances(&spec, 1).unwrap()[0];
        let Ok((pole, _)) = refine_resonance(&spec, &seed, 1e-12, 100) else {
            return Ok(());
        };
        let k = pole.kinetic();
        let g = GamowFunction::build(&spec, k, Variant::Decaying).unwrap();
        let ts = transformed_scattering(&g, e).unwrap();
        let kappa = e.sqrt();
        let exact = (kappa - k).norm_sqr() / (kappa + k).norm_sqr();
        prop_assert!((ts.sum() - exact).abs() < 1e-10);
    }

    #[test]
    fn second_order_barrier_is_real(v0 in 300.0f64..1500.0, b in 4.0f64..12.0, n in 0usize..3) {
        let spec = PotentialSpec::barrier(v0, b).unwrap();
        let seeds = analytic_resonances(&spec, n + 1).unwrap();
        let (pole, _) = refine_resonance(&spec, &seeds[n], 1e-12, 100).unwrap();
        let g = GamowFunction::build(&spec, pole.kinetic(), Variant::Decreasing).unwrap();
        let d = deform2(&g).unwrap();
        for i in 0..=200 {
            let x = -3.0 * b + 6.0 * b * i as f64 / 200.0;
            let z = d.evaluate_complex(x).unwrap();
            prop_assert!(z.im.abs() < 1e-9 * v0, "Im V2({}) = {}", x, z.im);
        }
    }
}

#[test]
fn bound_states_are_orthonormal() {
    let spec = PotentialSpec::well(16.0, 5.0).unwrap();
    let states: Vec<_> = bound_states(&spec)
        .unwrap()
        .iter()
        .map(|s| BoundWavefunction::normalized(&spec, s))
        .collect();
    // the weakest state decays like e^{-κx} with κ ≈ 1
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let overlap = simpson(|x| a.evaluate(x).0 * b.evaluate(x).0, -40.0, 40.0, 80_000);
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((overlap - expected).abs() < 1e-7, "<{i}|{j}> = {overlap}");
        }
    }
}
