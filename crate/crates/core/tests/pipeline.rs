use std::f64::consts::PI;

use autoforma::automorphy::check_integrality;
use autoforma::experiment::{Experiment, ExperimentConfig, Outcome};
use autoforma::forms::{
    apply_gauge, landau_residual, mixed_residual, poincare_landau, probe_pairs, GaugeDirection,
    SeriesConfig,
};
use autoforma::phi::{chi_hat_residual, phi_affine, pseudo_char_residual};
use autoforma::{AffineTau, CharacterTable, Lattice, Weights};
use num_complex::Complex64;
use proptest::prelude::*;

/// A lattice with shape `(1, x + iy)` scaled so that `B·area = kπ`.
fn integral_lattice(b: f64, k: u32, x: f64, y: f64) -> Lattice {
    let s = (k as f64 * PI / (b * y)).sqrt();
    Lattice::new(Complex64::new(s, 0.0), Complex64::new(s * x, s * y)).unwrap()
}

fn affine() -> impl Strategy<Value = AffineTau> {
    let coeff = -2.0..2.0f64;
    (
        coeff.clone(),
        coeff.clone(),
        coeff.clone(),
        coeff.clone(),
        coeff.clone(),
        coeff,
        any::<bool>(),
    )
        .prop_map(|(cr, ci, dr, di, er, ei, holomorphic)| {
            let (c, d) = if holomorphic {
                (Complex64::new(cr, ci), Complex64::new(0.0, 0.0))
            } else {
                (Complex64::new(cr, ci), Complex64::new(dr, di))
            };
            AffineTau::new(c, d, Complex64::new(er, ei)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_inverse_of_landau_form_is_mixed(
        t in affine(),
        nu in 0.5..3.0f64,
        mu in 0.1..1.0f64,
        k in 1u32..3,
        x in -0.5..0.5f64,
        y in 0.7..1.5f64,
        seed in any::<u64>(),
    ) {
        let w = Weights::new(&t, nu, mu).unwrap();
        prop_assume!(w.b > 0.3);
        let lattice = integral_lattice(w.b, k, x, y);
        prop_assert!(check_integrality(&t, &w, &lattice).ok);

        let phi = phi_affine(&t, &w);
        let chi = CharacterTable::new(&t, &w, &phi, &lattice);
        prop_assert!(pseudo_char_residual(&t, &w, &phi, &lattice, 3) < 1e-10);
        let [w1, w2] = lattice.generators();
        let zs = [Complex64::new(0.3, -0.7), Complex64::new(-1.1, 0.4)];
        prop_assert!(chi_hat_residual(&t, &w, &phi, w1 + w2, &zs).spread < 1e-10);
        prop_assert!(chi_hat_residual(&t, &w, &phi, w2, &zs).spread < 1e-10);

        let cfg = SeriesConfig { probe_seed: seed, ..SeriesConfig::default() };
        let landau = poincare_landau(&t, &w, &chi, &lattice, &cfg).unwrap();
        let mixed = apply_gauge(&phi, &landau, GaugeDirection::Inverse);
        for (z, gamma) in probe_pairs(&lattice, seed, 8, 2.0, 2) {
            prop_assert!(landau_residual(&landau, &chi, w.b, z, gamma) < 1e-8);
            prop_assert!(mixed_residual(&mixed, &t, &w, z, gamma) < 1e-8);
        }
    }
}

#[test]
fn shipped_configs_verify() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    for (name, expected) in [
        ("canonical.json", Outcome::Ok),
        ("conjugate.json", Outcome::Ok),
        ("non_integral.json", Outcome::IntegralityViolated),
    ] {
        let text = std::fs::read_to_string(format!("{dir}/{name}")).unwrap();
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        let report = Experiment::new(cfg).unwrap().verify().unwrap();
        assert_eq!(report.outcome(), expected, "{name}");
    }
}

#[test]
fn verification_is_deterministic() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let text = std::fs::read_to_string(format!("{dir}/canonical.json")).unwrap();
    let run = || {
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        serde_json::to_string(&Experiment::new(cfg).unwrap().verify().unwrap()).unwrap()
    };
    assert_eq!(run(), run());
}
