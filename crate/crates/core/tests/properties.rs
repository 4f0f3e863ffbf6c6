mod common;

use std::cmp::Ordering;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ontosymm::io::{emit_model_file, parse_model_file};
use ontosymm::numerics::{Direction, Mode, Scalar, Tolerance};
use ontosymm::ontological::{
    joint, relabel, reproduces, search_time_reverse_bijection, Bijection, OnticLabel, OnticSpace,
    SearchOptions,
};
use ontosymm::operational::{check_time_reverse_pair, reverse, Experiment};
use ontosymm::quantum::{build_bb_model, predict_qubit, spin_labels, Settings};
use ontosymm::theorems::{certify_time_symmetry_violation, chsh_value, CertificateKind};

const TOL: Tolerance = Tolerance::DEFAULT;

fn small_exact() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=6, -6i64..=6, 1i64..=6).prop_map(|(p, q, r, s)| Scalar::surd(p, q, r, s))
}

/// Rational point on the unit sphere by inverse stereographic projection.
fn exact_direction() -> impl Strategy<Value = Direction> {
    (-5i64..=5, 1i64..=4, -5i64..=5, 1i64..=4).prop_map(|(un, ud, vn, vd)| {
        let u = Scalar::ratio(un, ud);
        let v = Scalar::ratio(vn, vd);
        let one = Scalar::ratio(1, 1);
        let two = Scalar::ratio(2, 1);
        let r2 = &(&u * &u) + &(&v * &v);
        let denom = &one + &r2;
        Direction::new(
            &(&two * &u) / &denom,
            &(&two * &v) / &denom,
            &(&one - &r2) / &denom,
            TOL,
        )
        .unwrap()
    })
}

fn random_experiment(seed: u64) -> Experiment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common::RawModel::random(&mut rng)
        .build()
        .experiment()
        .clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_laws(a in small_exact(), b in small_exact(), c in small_exact()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a + &(-&a)).is_zero(TOL));
        if !a.is_zero(TOL) {
            prop_assert_eq!(&a * &(&Scalar::ratio(1, 1) / &a), Scalar::ratio(1, 1));
        } else {
            prop_assert!(Scalar::ratio(1, 1).checked_div(&a).is_err());
        }
    }

    #[test]
    fn exact_order_agrees_with_floats(a in small_exact(), b in small_exact()) {
        let exact = a.compare(&b, TOL).unwrap();
        let (fa, fb) = (a.to_f64(), b.to_f64());
        if (fa - fb).abs() > 1e-9 {
            prop_assert_eq!(exact, fa.partial_cmp(&fb).unwrap());
        }
        prop_assert_eq!(exact == Ordering::Equal, a == b);
    }

    #[test]
    fn scalar_text_round_trip(a in small_exact()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<Scalar>().unwrap(), a);
    }

    #[test]
    fn dot_is_symmetric(u in exact_direction(), v in exact_direction()) {
        prop_assert_eq!(u.dot(&v).unwrap(), v.dot(&u).unwrap());
        prop_assert_eq!(u.dot(&u).unwrap(), Scalar::ratio(1, 1));
    }

    #[test]
    fn qubit_tables_are_self_reverse(dirs in prop::collection::vec(exact_direction(), 1..4)) {
        let s = Settings::indexed(dirs).unwrap();
        let e = predict_qubit(&s, &s, Mode::Exact).unwrap();
        prop_assert!(check_time_reverse_pair(&e, &e, TOL).is_ok());
    }

    #[test]
    fn reverse_twice_is_identity(seed in any::<u64>()) {
        let e = random_experiment(seed);
        prop_assert_eq!(reverse(&reverse(&e, "r"), e.name()), e);
    }

    #[test]
    fn reverse_pair_is_symmetric(seed in any::<u64>()) {
        let e = random_experiment(seed);
        let r = reverse(&e, "r");
        prop_assert!(check_time_reverse_pair(&e, &r, TOL).is_ok());
        prop_assert!(check_time_reverse_pair(&r, &e, TOL).is_ok());
    }

    #[test]
    fn ontic_marginal_ignores_measurement(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::RawModel::random(&mut rng).build();
        let j = joint(&m);
        let s = m.experiment().signature();
        for l in 0..m.lambda().len() {
            for x in 0..s.x.len() {
                let first = j.ontic_given_settings(l, x, 0);
                for y in 1..s.y.len() {
                    prop_assert_eq!(&j.ontic_given_settings(l, x, y), &first);
                }
            }
        }
        prop_assert!(reproduces(&m, TOL).holds());
    }

    #[test]
    fn relabelling_preserves_the_joint(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::RawModel::random(&mut rng).build();
        let n = m.lambda().len();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left((seed as usize) % n);
        let target = OnticSpace::new((0..n).map(|i| OnticLabel::single(format!("t{i}"))).collect()).unwrap();
        let f = Bijection::new(m.lambda().clone(), target, perm).unwrap();
        let r = relabel(&m, &f).unwrap();
        let (j, jr) = (joint(&m), joint(&r));
        let s = m.experiment().signature();
        for a in 0..s.a.len() {
            for b in 0..s.b.len() {
                for l in 0..n {
                    for x in 0..s.x.len() {
                        for y in 0..s.y.len() {
                            prop_assert_eq!(j.get(a, b, l, x, y), jr.get(a, b, f.apply(l), x, y));
                        }
                    }
                }
            }
        }
        prop_assert!(reproduces(&r, TOL).holds());
        prop_assert_eq!(relabel(&r, &f.inverse()).unwrap(), m);
    }

    #[test]
    fn search_finds_the_constructing_bijection(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = common::random_symmetrizable(&mut rng);
        let search = search_time_reverse_bijection(&pair.m1, &pair.m2, SearchOptions::default()).unwrap();
        let n = pair.m1.lambda().len() as u128;
        prop_assert_eq!(search.total, (1..=n).product::<u128>());
        prop_assert_eq!(search.total, search.pruned + search.checked);
        prop_assert!(search.found.contains(&pair.f));
    }

    #[test]
    fn model_files_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::RawModel::random(&mut rng).build();
        let text = emit_model_file(m.experiment(), Some(&m));
        let back = parse_model_file(&text, Mode::Exact, TOL).unwrap();
        prop_assert_eq!(back.model.as_ref(), Some(&m));
        prop_assert_eq!(emit_model_file(&back.experiment, back.model.as_ref()), text);
    }

    #[test]
    fn chsh_under_outcome_flips(dirs in prop::collection::vec(exact_direction(), 4)) {
        let prep = Settings::indexed(dirs[..2].to_vec()).unwrap();
        let meas = Settings::indexed(dirs[2..].to_vec()).unwrap();
        let e = predict_qubit(&prep, &meas, Mode::Exact).unwrap();
        let s = chsh_value(&e, "0", "1", "0", "1").unwrap();
        let flip = |flip_a: bool, flip_b: bool| {
            let sig = e.signature().clone();
            Experiment::from_fn("flipped", sig, |a, b, x, y| {
                let a2 = if flip_a { 1 - a } else { a };
                let b2 = if flip_b { 1 - b } else { b };
                e.p(a2, b2, x, y).clone()
            })
            .unwrap()
        };
        prop_assert_eq!(chsh_value(&flip(true, true), "0", "1", "0", "1").unwrap(), s.clone());
        prop_assert_eq!(chsh_value(&flip(true, false), "0", "1", "0", "1").unwrap(), -&s);
        // Tsirelson's bound: S² ≤ 8.
        prop_assert_ne!((&s * &s).compare(&Scalar::ratio(8, 1), TOL).unwrap(), Ordering::Greater);
        prop_assert_eq!(e.omega_a(), &spin_labels());
    }

    #[test]
    fn bb_over_two_directions_violates(u in exact_direction(), v in exact_direction()) {
        let d = u.dot(&v).unwrap();
        prop_assume!((&d * &d) != Scalar::ratio(1, 1));
        let s = Settings::indexed(vec![u, v]).unwrap();
        let m = build_bb_model(&s, &s, Mode::Exact).unwrap();
        let cert = certify_time_symmetry_violation(&m, SearchOptions::default()).unwrap();
        prop_assert_eq!(cert.kind, CertificateKind::ViolationExhaustive);
    }
}
