use proptest::prelude::*;
use rand::Rng;
use wedgesq::combinat::{pairs, quads, sign_pairs};
use wedgesq::exalg::{wedge, Indexing, SquareMatrix};
use wedgesq::pluecker::{act, canonical_form, in_ideal, plucker_poly};
use wedgesq::random::{random_invertible, random_matrix, random_member, rng_from_seed};
use wedgesq::scalar::{RingTag, Scalar};
use wedgesq::scheme::{
    b_matrix, congruence_membership, exterior_number, membership, membership_with, second_form_membership,
    theta_compose, theta_from_minors, MembershipOptions, ThetaTable,
};

const F97: RingTag = RingTag::IntegersMod(97);

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exterior_numbers_are_symmetric(seed in any::<u64>(), n in 4usize..7) {
        let mut rng = rng_from_seed(seed);
        let g = random_matrix(&mut rng, F97, Indexing::wedge2(n));
        let (ps, qs) = (pairs(n), quads(n));
        for _ in 0..50 {
            let a = ps[rng.random_range(0..ps.len())];
            let c = ps[rng.random_range(0..ps.len())];
            let h = qs[rng.random_range(0..qs.len())];
            prop_assert_eq!(exterior_number(&g, a, c, h).unwrap(), exterior_number(&g, c, a, h).unwrap());
        }
    }

    #[test]
    fn wedged_points_factor_through_theta(seed in any::<u64>(), n in 4usize..7) {
        let mut rng = rng_from_seed(seed);
        let (x, g) = random_member(&mut rng, F97, n);
        let theta = theta_from_minors(&x).unwrap();
        for h in quads(n) {
            for a in pairs(n) {
                for c in pairs(n) {
                    let expect = match a.union(c) {
                        None => Scalar::zero(F97),
                        Some(s) => &Scalar::from_sign(F97, sign_pairs(a, c)) * theta.get(s, h),
                    };
                    prop_assert_eq!(exterior_number(&g, a, c, h).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn theta_composition_follows_products(seed in any::<u64>(), n in 4usize..7) {
        let mut rng = rng_from_seed(seed);
        let x = random_matrix(&mut rng, F97, Indexing::Plain(n));
        let y = random_matrix(&mut rng, F97, Indexing::Plain(n));
        let composed = theta_compose(&theta_from_minors(&x).unwrap(), &theta_from_minors(&y).unwrap()).unwrap();
        prop_assert_eq!(composed, theta_from_minors(&x.matmul(&y).unwrap()).unwrap());
        let id = ThetaTable::identity(F97, n);
        let tx = theta_from_minors(&x).unwrap();
        prop_assert_eq!(theta_compose(&tx, &id).unwrap(), tx);
    }

    #[test]
    fn parallel_sweep_matches_serial(seed in any::<u64>(), n in 4usize..7, member in any::<bool>()) {
        let mut rng = rng_from_seed(seed);
        let g = if member {
            random_member(&mut rng, F97, n).1
        } else {
            random_matrix(&mut rng, F97, Indexing::wedge2(n))
        };
        for full_report in [false, true] {
            let serial = MembershipOptions { require_invertible: false, full_report, ..Default::default() };
            let parallel = MembershipOptions { parallel: true, ..serial };
            prop_assert_eq!(
                membership_with(&g, &serial, None).unwrap(),
                membership_with(&g, &parallel, None).unwrap()
            );
        }
    }

    #[test]
    fn integral_members_pass_every_congruence(seed in any::<u64>(), m in 2u64..50) {
        let x = random_invertible(&mut rng_from_seed(seed), RingTag::Integers, 4);
        let g = wedge(2, &x).unwrap();
        prop_assert!(membership(&g).unwrap().accepted());
        prop_assert!(congruence_membership(&g, m, &MembershipOptions::default()).unwrap().accepted());
    }

    #[test]
    fn perturbation_by_modulus_is_invisible(seed in any::<u64>(), m in 2u64..30) {
        let mut rng = rng_from_seed(seed);
        let x = random_invertible(&mut rng, RingTag::Integers, 4);
        let noise = random_matrix(&mut rng, RingTag::Integers, Indexing::wedge2(4));
        let scaled = noise.scale(&Scalar::from_i64(RingTag::Integers, m as i64)).unwrap();
        let g = wedge(2, &x).unwrap().add(&scaled).unwrap();
        prop_assert!(congruence_membership(&g, m, &MembershipOptions::default()).unwrap().accepted());
    }

    #[test]
    fn plucker_action_recovers_theta_columns(seed in any::<u64>(), n in 4usize..7) {
        let mut rng = rng_from_seed(seed);
        let (x, g) = random_member(&mut rng, F97, n);
        let theta = theta_from_minors(&x).unwrap();
        for h in quads(n) {
            let moved = act(&g, &canonical_form(F97, n, h)).unwrap();
            let coords = in_ideal(&moved);
            let coords = coords.theta().expect("stays in the ideal");
            for s in quads(n) {
                prop_assert_eq!(&coords.get(s), theta.get(s, h));
            }
        }
    }
}

#[test]
fn second_form_alpha_equals_theta() {
    let mut rng = rng_from_seed(41);
    for n in [4, 5] {
        for _ in 0..3 {
            let (x, g) = random_member(&mut rng, F97, n);
            let report = second_form_membership(&g).unwrap();
            assert!(report.accepted());
            assert_eq!(&report.alpha.unwrap(), theta_from_minors(&x).unwrap().as_matrix());
        }
    }
}

#[test]
fn second_form_over_integers_needs_integral_alpha() {
    let mut rng = rng_from_seed(43);
    let x = random_invertible(&mut rng, RingTag::Integers, 4);
    let g = wedge(2, &x).unwrap();
    let report = second_form_membership(&g).unwrap();
    assert!(report.accepted());
    assert_eq!(report.alpha.unwrap().ring(), RingTag::Integers);
    // λ·I with λ = 2 is a point over ℚ, but not of the ℤ-scheme: not invertible.
    let two = SquareMatrix::scalar(Scalar::from_i64(RingTag::Integers, 2), Indexing::wedge2(4));
    assert!(second_form_membership(&two).is_err());
    let over_q = two.convert(RingTag::Rationals).unwrap();
    assert!(second_form_membership(&over_q).unwrap().accepted());
}

#[test]
fn b_matrix_reproduces_the_canonical_form() {
    let n = 5;
    let mut rng = rng_from_seed(47);
    for h in quads(n) {
        let b = b_matrix(RingTag::Integers, n, h).unwrap();
        let [i, j1, j2, j3] = h.elems();
        let f = plucker_poly(RingTag::Integers, n, i, [j1, j2, j3]).unwrap();
        for _ in 0..5 {
            let x: Vec<Scalar> = (0..10).map(|_| Scalar::from_i64(RingTag::Integers, rng.random_range(-9..=9))).collect();
            let quad: Scalar = (0..10).fold(Scalar::zero(RingTag::Integers), |acc, r| {
                (0..10).fold(acc, |acc, c| &acc + &(&(&x[r] * b.get(r, c)) * &x[c]))
            });
            assert_eq!(quad, &Scalar::from_i64(RingTag::Integers, -2) * &f.evaluate(&x));
        }
        for a in pairs(n) {
            for c in pairs(n).into_iter().filter(|c| c.meets(a)) {
                assert!(b.get(a.rank(n), c.rank(n)).is_zero());
            }
        }
    }
}

#[test]
fn membership_json_shape() {
    let g = SquareMatrix::identity(F97, Indexing::wedge2(4));
    let json = membership(&g).unwrap().to_json();
    assert_eq!(json["verdict"], "accept");
    assert_eq!(json["theta"]["1234|1234"], "1");
    assert!(json["violation"].is_null());
}

#[test]
fn trace_sees_every_key_until_the_violation() {
    let n = 4;
    let mut g = SquareMatrix::identity(F97, Indexing::wedge2(n));
    g.set(0, 5, Scalar::one(F97));
    let mut seen = Vec::new();
    let mut observer = |k: &wedgesq::scheme::ExtNumberKey, _: &Scalar, ok: bool| seen.push((*k, ok));
    let report = membership_with(&g, &MembershipOptions::default(), Some(&mut observer)).unwrap();
    assert!(!report.accepted());
    assert_eq!(seen.len(), 1);
    assert!(!seen[0].1);

    let id = SquareMatrix::identity(F97, Indexing::wedge2(n));
    let mut count = 0;
    let mut counter = |_: &wedgesq::scheme::ExtNumberKey, _: &Scalar, ok: bool| {
        assert!(ok);
        count += 1;
    };
    membership_with(&id, &MembershipOptions::default(), Some(&mut counter)).unwrap();
    assert_eq!(count, 21);
}
