use proptest::prelude::*;

use qrac::classical::{classical_success, majority_strategy_success};
use qrac::experiment::{
    parse_table2, prepare_optics_state, write_table2, OpticsSetting, TABLE2_CSV,
};
use qrac::linalg::{
    apply_weyl, computational_basis, fourier_basis, third_mub, weyl_x, weyl_z, Ket, C64,
};
use qrac::qrac2::{success2_closed, Qrac2Code};
use qrac::qrac3::{base_state, question_probs, t_solutions};
use qrac::seesaw::{measurement_update, objective, random_strategy, state_update};

fn ket(d: usize) -> impl Strategy<Value = Ket> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d).prop_filter_map("nonzero", |v| {
        Ket::new(v.into_iter().map(|(re, im)| C64::new(re, im)).collect()).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classical_matches_majority(n in 1usize..6, d in 2usize..6) {
        let exact = classical_success(n, d).unwrap().value;
        let sim = majority_strategy_success(n, d).unwrap();
        prop_assert!((exact - sim).abs() < 1e-12);
        prop_assert!(exact >= 1.0 / d as f64 - 1e-15 && exact <= 1.0);
    }

    #[test]
    fn classical_single_symbol_is_certain(d in 2usize..40) {
        prop_assert_eq!(classical_success(1, d).unwrap().value, 1.0);
    }

    #[test]
    fn weyl_shortcut_matches_matrices((d, a, b, psi) in (2usize..9).prop_flat_map(|d| (Just(d), 0..d, 0..d, ket(d)))) {
        let u = &weyl_x(d).unwrap().pow(a as u32) * &weyl_z(d).unwrap().pow(b as u32);
        let direct = u.apply(psi.amps());
        let fast = apply_weyl(d, a, b, psi.amps());
        for (x, y) in direct.iter().zip(&fast) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn basis_distributions_sum_to_one((d, psi) in (2usize..12).prop_flat_map(|d| (Just(d), ket(d)))) {
        for basis in [computational_basis(d).unwrap(), fourier_basis(d).unwrap(), third_mub(d).unwrap()] {
            let total: f64 = basis.distribution(&psi).unwrap().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_symbol_code_is_uniform((d, x0, x1) in (2usize..10).prop_flat_map(|d| (Just(d), 0..d, 0..d))) {
        let code = Qrac2Code::new(d).unwrap();
        let p = success2_closed(d).unwrap();
        for y in 0..2 {
            prop_assert!((code.correct_prob(x0, x1, y).unwrap() - p).abs() < 1e-10);
        }
    }

    #[test]
    fn roots_equalize_all_questions(
        (d, a, r) in (2usize..14).prop_flat_map(|d| (Just(d), 0..d, -3.0f64..3.0))
    ) {
        let bases = [computational_basis(d).unwrap(), fourier_basis(d).unwrap(), third_mub(d).unwrap()];
        for (_, t) in t_solutions(d, a, r).unwrap() {
            let Ok(psi) = base_state(d, a, r, t) else { continue };
            let p = question_probs(&psi, &bases, [0, 0, a]).unwrap();
            prop_assert!((p[1] - p[2]).abs() < 1e-10);
            prop_assert!((p[0] - p[1]).abs() < 1e-8, "d={} a={} r={} t={} {:?}", d, a, r, t, p);
        }
    }

    #[test]
    fn seesaw_steps_never_decrease(n in 1usize..4, d in 2usize..4, seed in any::<u64>()) {
        let s = random_strategy(n, d, seed).unwrap();
        let f0 = objective(&s);
        let s1 = state_update(&s).unwrap();
        let f1 = objective(&s1);
        let s2 = measurement_update(&s1).unwrap().strategy;
        let f2 = objective(&s2);
        prop_assert!(f1 >= f0 - 1e-12 && f2 >= f1 - 1e-12);
        prop_assert!(s2.validate().is_ok());
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f2));
    }

    #[test]
    fn optics_state_unit_norm(t1 in -180.0f64..180.0, t2 in -180.0f64..180.0, t3 in -180.0f64..180.0, pi in any::<bool>()) {
        let phi = if pi { std::f64::consts::PI } else { 0.0 };
        let psi = prepare_optics_state(&OpticsSetting { theta1: t1, theta2: t2, theta3: t3, phi });
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_round_trips(pz in prop::collection::vec(0.0f64..=1.0, 16), err in 0.0f64..0.2) {
        let mut recs = parse_table2(TABLE2_CSV).unwrap();
        for (r, p) in recs.iter_mut().zip(&pz) {
            r.pz = *p;
            r.px_err = err;
        }
        prop_assert_eq!(parse_table2(&write_table2(&recs).unwrap()).unwrap(), recs);
    }
}
