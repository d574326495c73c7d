use jandl::cochain::cocycle_basis;
use jandl::counting::{centre_dim, count_simples};
use jandl::groupoid::parse_group_spec;
use jandl::torsion::check_gauge_invariance;
use jandl::transgress::{transgress, TransgressionMap};
use jandl::{Cochain, Phase, Sign, Twist};
use proptest::prelude::*;

const GROUPS: &[&str] = &["product_Z2:1", "cyclic:4:mod2", "product_Z2:Z2", "product_Z2:Z3", "dihedral:4:reflection"];
const MAPS: [TransgressionMap; 4] =
    [TransgressionMap::Tau, TransgressionMap::TauPi, TransgressionMap::TauRef, TransgressionMap::TauRefTilde];

fn phase() -> impl Strategy<Value = Phase> {
    (-50i64..50, 1i64..24).prop_map(|(n, d)| Phase::new(n, d))
}

fn sign() -> impl Strategy<Value = Sign> {
    any::<bool>().prop_map(Sign::from_odd)
}

/// A cocycle from the solver basis with random coefficients.
fn cocycle(spec: &str, degree: usize, seed: u64) -> Cochain {
    let b = parse_group_spec(spec).unwrap().classifying_groupoid();
    let basis = cocycle_basis(&b, degree, Twist::Pi, 4).unwrap();
    let mut c = Cochain::zero(&b, degree, Twist::Pi).unwrap();
    for (i, z) in basis.cocycles.iter().enumerate() {
        c = c.add(&z.scale((seed.rotate_right(2 * i as u32) & 3) as i64)).unwrap();
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn phases_form_a_module(a in phase(), b in phase(), c in phase(), s in sign(), t in sign()) {
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a + b, b + a);
        prop_assert!((a - a).is_zero());
        prop_assert_eq!((a + b).act(s), a.act(s) + b.act(s));
        prop_assert_eq!(a.act(s).act(t), a.act(s * t));
        prop_assert_eq!(a.to_string().parse::<Phase>().unwrap(), a);
    }

    #[test]
    fn differential_squares_to_zero(gi in 0..GROUPS.len(), degree in 0usize..3, twisted: bool, seed: u64) {
        let b = parse_group_spec(GROUPS[gi]).unwrap().classifying_groupoid();
        let twist = if twisted { Twist::Pi } else { Twist::None };
        let c = Cochain::random(&b, degree, twist, 12, seed).unwrap();
        prop_assert!(c.differential().unwrap().differential().unwrap().is_zero());
    }

    #[test]
    fn transgression_anticommutes_with_d(gi in 0..GROUPS.len(), mi in 0..4usize, degree in 1usize..3, seed: u64) {
        let map = MAPS[mi];
        let b = parse_group_spec(GROUPS[gi]).unwrap().classifying_groupoid();
        let lg = map.loop_groupoid(&b).unwrap();
        let l = Cochain::random(&b, degree, map.input_twist(), 12, seed).unwrap();
        let lhs = transgress(map, &lg, &l.differential().unwrap()).unwrap();
        let rhs = transgress(map, &lg, &l).unwrap().differential().unwrap().neg();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn counts_ignore_coboundaries(gi in 0..GROUPS.len(), seed: u64, mu_seed: u64) {
        let g = parse_group_spec(GROUPS[gi]).unwrap();
        let theta = cocycle(GROUPS[gi], 2, seed);
        let mu = Cochain::random(theta.space(), 1, Twist::Pi, 12, mu_seed).unwrap();
        let shifted = theta.add(&mu.differential().unwrap()).unwrap();
        prop_assert_eq!(
            count_simples(&theta).unwrap().value_formula,
            count_simples(&shifted).unwrap().value_formula
        );
        prop_assert_eq!(
            centre_dim(&g, &theta).unwrap().value_formula,
            centre_dim(&g, &shifted).unwrap().value_formula
        );
        check_gauge_invariance(&g, &theta, &mu).unwrap();
    }

    #[test]
    fn torsion_rows_ignore_coboundaries(gi in 0..GROUPS.len(), seed: u64, mu_seed: u64) {
        let g = parse_group_spec(GROUPS[gi]).unwrap();
        let eta = cocycle(GROUPS[gi], 3, seed);
        let mu = Cochain::random(eta.space(), 2, Twist::Pi, 12, mu_seed).unwrap();
        check_gauge_invariance(&g, &eta, &mu).unwrap();
    }
}
