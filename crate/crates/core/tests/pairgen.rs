use atomfwm::pairgen::{
    coherent_expand, displace_remove, intensity, interact, mean_pairs_per_pulse, pair_rate,
    CoherentInput,
};
use atomfwm::{pulse, Axis, Complex64, Error, PhysicalParams};
use proptest::prelude::*;

fn rect_input(alpha: Complex64, l: f64, dx: f64) -> CoherentInput {
    let axis = Axis::spanning(-20.0, l, dx).unwrap();
    CoherentInput::new(alpha, pulse::rectangular(axis, l).unwrap(), l).unwrap()
}

#[test]
fn nothing_happens_without_coupling() {
    let p = PhysicalParams::uncoupled(1.0).unwrap();
    for alpha in [Complex64::new(0.1, 0.0), Complex64::new(0.2, -0.25)] {
        let state = coherent_expand(&rect_input(alpha, 8.0, 0.1)).unwrap();
        let out = interact(&state, &p).unwrap();
        assert_eq!(out, state);
        let r = displace_remove(&out, -alpha).unwrap();
        let a = alpha.norm();
        assert!(r.mode_mismatch < 1e-14);
        assert!(r.residual_one_photon < a.powi(3));
        assert!((r.state.vacuum_weight() - 1.0).abs() < a.powi(6));
        assert!(r.state.two_photon_weight() < a.powi(6));
    }
}

#[test]
fn long_pulse_leaves_the_pair_component() {
    let p = PhysicalParams::default();
    let alpha = Complex64::new(0.1, 0.0);
    let out = interact(
        &coherent_expand(&rect_input(alpha, 100.0, 0.1)).unwrap(),
        &p,
    )
    .unwrap();

    // one-photon amplitude flips sign, up to the 2 c / (gamma L) edge loss
    let overlap = atomfwm::inner_product(&out.mode, &out.one_photon_amplitude()).unwrap();
    assert!((overlap - alpha * (-1.0 + 2.0 / 100.0)).norm() < 1e-3 * alpha.norm());

    let r = displace_remove(&out, alpha).unwrap();
    let want = mean_pairs_per_pulse(alpha, 100.0, &p);
    assert!((want - 8e-6).abs() < 1e-18);
    let pairs = r.state.two_photon_weight();
    assert!((pairs - want).abs() < 0.05 * want, "{pairs}");
    assert!(r.residual_one_photon <= r.bound);
}

#[test]
fn finite_pulse_reports_mode_mismatch() {
    let p = PhysicalParams::default();
    let alpha = Complex64::new(0.1, 0.0);
    let out = interact(&coherent_expand(&rect_input(alpha, 20.0, 0.1)).unwrap(), &p).unwrap();
    let r = displace_remove(&out, alpha).unwrap();
    assert!(r.residual_one_photon > 10.0 * alpha.norm().powi(3));
    assert!(r.mode_mismatch > 0.5 * r.residual_one_photon);

    // displacing the wrong way leaves |-2 alpha>
    assert!(matches!(
        displace_remove(&out, -alpha),
        Err(Error::ModeMismatch { .. })
    ));
}

#[test]
fn pair_weight_scales_as_alpha_to_the_fourth() {
    let p = PhysicalParams::default();
    let weight = |a: f64| {
        let alpha = Complex64::new(a, 0.0);
        let out = interact(&coherent_expand(&rect_input(alpha, 40.0, 0.1)).unwrap(), &p).unwrap();
        let s = displace_remove(&out, alpha).unwrap().state;
        s.two_photon_weight() / s.vacuum_weight()
    };
    let a = 0.2;
    let ratio = 16.0 * weight(a / 2.0) / weight(a);
    assert!((ratio - 1.0).abs() < a * a, "{ratio}");
}

proptest! {
    #[test]
    fn pulse_and_rate_formulas_agree(a in 0.0f64..0.44, l in 20.0f64..1e4, gamma in 0.1f64..10.0, c in 0.1f64..10.0) {
        let p = PhysicalParams::new(gamma, c).unwrap();
        let alpha = Complex64::new(a, 0.0);
        let per_pulse = mean_pairs_per_pulse(alpha, l * p.coherence_length(), &p);
        let rate = pair_rate(intensity(alpha, l * p.coherence_length(), &p), &p);
        let from_pulse = per_pulse / (l * p.coherence_length() / c);
        prop_assert!((from_pulse - rate).abs() <= 4.0 * f64::EPSILON * rate.max(f64::MIN_POSITIVE));
    }
}
