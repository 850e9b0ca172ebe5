//! Randomized structural properties.

use cvq::channel::{eta_env, hemt_amplify, lossy_tmst, AirChannel, Geometry};
use cvq::distill::{ps_tmsv, ps_tmsv_negativity};
use cvq::entanglement::{negativity, pts_eigenvalues, BipartiteCM};
use cvq::estimation::{gaussian_qfi, GaussianFamily};
use cvq::gaussian::{
    apply, beam_splitter, omega, partial_trace, single_mode_squeezer, symplectic_eigenvalues, thermal, tmst,
    two_mode_squeezer, GaussianState, ModeSubset, SymplecticTransform,
};
use cvq::illumination::{gain, qi_received, QiParams};
use cvq::teleport::{fidelity_gaussian, regaussify, RegaussMode};
use proptest::prelude::*;

fn local(r1: f64, t1: f64, r2: f64, t2: f64) -> SymplecticTransform {
    let a = single_mode_squeezer(r1, t1).unwrap();
    let b = single_mode_squeezer(r2, t2).unwrap();
    a.direct_sum(&b)
}

/// Squeezed thermal pair, one arm mixed with a thermal bath, then scrambled
/// by local squeezers: a generic entangled or separable two-mode state.
fn random_pair(r: f64, n: f64, eta: f64, bath: f64, l: [f64; 4]) -> GaussianState {
    let s = tmst(r, n).unwrap().tensor(&thermal(1, bath).unwrap());
    let s = apply(&s, &beam_splitter(eta).unwrap(), &ModeSubset::new(&[1, 2]).unwrap()).unwrap();
    let s = partial_trace(&s, &ModeSubset::new(&[0, 1]).unwrap()).unwrap();
    apply(&s, &local(l[0], l[1], l[2], l[3]), &ModeSubset::all(2)).unwrap()
}

fn local_strategy() -> impl Strategy<Value = [f64; 4]> {
    (0.0..1.0f64, -3.0..3.0f64, 0.0..1.0f64, -3.0..3.0f64).prop_map(|(a, b, c, d)| [a, b, c, d])
}

fn pair_strategy() -> impl Strategy<Value = GaussianState> {
    (
        0.0..1.5f64,
        0.0..2.0f64,
        0.05..1.0f64,
        0.0..5.0f64,
        local_strategy(),
    )
        .prop_map(|(r, n, eta, bath, l)| random_pair(r, n, eta, bath, l))
}

fn sorted_spectrum(s: &GaussianState) -> Vec<f64> {
    let mut v = symplectic_eigenvalues(s.sigma()).unwrap();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn composed_transforms_stay_symplectic(eta in 0.0..1.0f64, r in 0.0..1.0f64, t in -3.0..3.0f64) {
        let s = beam_splitter(eta).unwrap()
            .compose(&two_mode_squeezer(r).unwrap())
            .compose(&local(r, t, 0.5 * r, -t));
        let m = s.matrix();
        let om = omega(2);
        let defect = (m * om.matrix() * m.transpose() - om.matrix()).amax();
        prop_assert!(defect < 1e-10);
    }

    #[test]
    fn spectra_survive_gaussian_unitaries(st in pair_strategy(), eta in 0.0..1.0f64, r in 0.0..1.0f64) {
        let before = sorted_spectrum(&st);
        let u = beam_splitter(eta).unwrap().compose(&two_mode_squeezer(r).unwrap());
        let after = sorted_spectrum(&apply(&st, &u, &ModeSubset::all(2)).unwrap());
        for (a, b) in after.iter().zip(&before) {
            prop_assert!((a - b).abs() < 1e-9 * b);
        }
    }

    #[test]
    fn generated_states_are_physical(st in pair_strategy()) {
        prop_assert!(st.is_physical());
        prop_assert!(sorted_spectrum(&st)[0] >= 1.0 - 1e-9);
    }

    #[test]
    fn partially_transposed_spectrum_is_ordered(st in pair_strategy()) {
        let (lo, hi) = pts_eigenvalues(&BipartiteCM::from_state(&st).unwrap()).unwrap();
        prop_assert!(lo > 0.0 && lo <= hi);
    }

    #[test]
    fn negativity_ignores_local_operations(st in pair_strategy(), l in local_strategy()) {
        let n0 = negativity(&BipartiteCM::from_state(&st).unwrap()).unwrap();
        let moved = apply(&st, &local(l[0], l[1], l[2], l[3]), &ModeSubset::all(2)).unwrap();
        let n1 = negativity(&BipartiteCM::from_state(&moved).unwrap()).unwrap();
        prop_assert!((n0 - n1).abs() < 1e-9 * (1.0 + n0));
    }

    #[test]
    fn amplification_never_adds_entanglement(st in pair_strategy(), g in 1.0..20.0f64, n_h in 0.0..5.0f64, arm in 0usize..2) {
        let cm = BipartiteCM::from_state(&st).unwrap();
        let amp = hemt_amplify(&cm, g, n_h, &[arm]).unwrap();
        prop_assert!(amp.is_physical());
        prop_assert!(negativity(&amp).unwrap() <= negativity(&cm).unwrap() + 1e-12);
    }

    #[test]
    fn environment_reflectivity_grows_with_distance_and_density(mu in 1e-7..1e-4f64, l in 0.0..5e3f64, dl in 1.0..100.0f64) {
        let e = eta_env(mu, l);
        prop_assert!((0.0..1.0).contains(&e));
        prop_assert!(eta_env(mu, l + dl) >= e);
        prop_assert!(eta_env(1.5 * mu, l) >= e);
    }

    #[test]
    fn link_resources_are_states(l in 0.0..3e3f64, r in 0.0..2.0f64, n in 0.0..0.5f64, n_th in 0.0..2e3f64) {
        let ch = AirChannel::new(1.44e-6, l, n_th, 0.0).unwrap();
        for g in [Geometry::Asym, Geometry::Sym] {
            prop_assert!(lossy_tmst(&ch, r, n, g).unwrap().is_physical());
        }
    }

    #[test]
    fn regaussification_preserves_fidelity(r in 0.1..1.2f64, n in 0.0..0.1f64, c in 0.0..0.4f64) {
        let cm = BipartiteCM::from_state(&tmst(r, n).unwrap()).unwrap();
        let f = fidelity_gaussian(&cm).unwrap();
        for mode in [RegaussMode::Sym, RegaussMode::Asym] {
            let rg = regaussify(&cm, c, mode);
            prop_assert!((fidelity_gaussian(&rg.cm).unwrap() - (1.0 + c) * f).abs() < 1e-12);
        }
    }

    #[test]
    fn quantum_probe_never_loses(n_s in 0.01..5.0f64, n_th in 0.01..5.0f64) {
        prop_assert!(gain(&QiParams::new(n_s, n_th, 0.0, 1e-4).unwrap()).unwrap() >= 1.0);
    }

    #[test]
    fn lossless_subtraction_beats_heralded(lambda in 0.05..0.9f64, tau in 0.5..0.999f64) {
        let heur = ps_tmsv_negativity(lambda, 1).unwrap();
        let prob = ps_tmsv(lambda, tau, 1).unwrap().negativity;
        prop_assert!(heur >= prob);
    }
}

fn qi_pair(eta: f64) -> cvq::Result<GaussianState> {
    qi_received(&QiParams::new(0.4, 0.7, 0.0, eta)?)?.to_state()
}

#[test]
fn qfi_doubles_on_two_copies() {
    let one = gaussian_qfi(&GaussianFamily::new(qi_pair, 0.3, 1e-4)).unwrap();
    let two = gaussian_qfi(&GaussianFamily::new(|e| Ok(qi_pair(e)?.tensor(&qi_pair(e)?)), 0.3, 1e-4)).unwrap();
    assert!((two - 2.0 * one).abs() < 1e-8 * one);
}

#[test]
fn qfi_ignores_fixed_unitaries() {
    let base = gaussian_qfi(&GaussianFamily::new(qi_pair, 0.3, 1e-4)).unwrap();
    let u = beam_splitter(0.37).unwrap().compose(&two_mode_squeezer(0.25).unwrap());
    let moved = GaussianFamily::new(move |e| apply(&qi_pair(e)?, &u, &ModeSubset::all(2)), 0.3, 1e-4);
    assert!((gaussian_qfi(&moved).unwrap() - base).abs() < 1e-8 * base);
}
