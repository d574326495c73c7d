use jandl::cochain::{cocycle_basis, quaternionic};
use jandl::counting::{centre_dim, count_simples, double_simple_count, flat_sect_equality, one_loop_sectors};
use jandl::groupoid::parse_group_spec;
use jandl::{Cochain, Rational, Twist};

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn zero(spec: &str, degree: usize) -> Cochain {
    let g = parse_group_spec(spec).unwrap();
    Cochain::zero(&g.classifying_groupoid(), degree, Twist::Pi).unwrap()
}

// Real irreducible representations: Z2 has 2, Z3 has 2 (the trivial one and
// a 2-dimensional rotation), S3 and D4 have all irreps real.
#[test]
fn untwisted_simples_are_real_irreps() {
    for (base, want) in [("1", 1), ("Z2", 2), ("Z3", 2), ("Z4", 3), ("S3", 3), ("D4", 5), ("Z2xZ2", 4)] {
        let spec = format!("product_Z2:{base}");
        let r = count_simples(&zero(&spec, 2)).unwrap();
        assert_eq!(r.value_formula, int(want), "{spec}");
        assert!(r.agree, "{spec}: {r:?}");
    }
}

// Class sums span the real centre.
#[test]
fn untwisted_centre_is_class_count() {
    for (base, want) in [("Z2", 2), ("Z3", 3), ("S3", 3), ("D4", 5), ("Z2xZ2", 4)] {
        let spec = format!("product_Z2:{base}");
        let g = parse_group_spec(&spec).unwrap();
        let r = centre_dim(&g, &zero(&spec, 2)).unwrap();
        assert_eq!(r.value_formula, int(want), "{spec}");
        assert!(r.agree);
    }
}

// The quaternion algebra is the only simple Real module of Z2 with the
// nontrivial sign twist.
#[test]
fn quaternionic_point() {
    let g = parse_group_spec("product_Z2:1").unwrap();
    let theta = quaternionic(&g.classifying_groupoid()).unwrap();
    assert_eq!(count_simples(&theta).unwrap().value_formula, int(1));
    assert_eq!(centre_dim(&g, &theta).unwrap().value_formula, int(1));
}

#[test]
fn half_flat_sections_of_the_trivial_line() {
    for spec in ["cyclic:4:mod2", "product_Z2:1", "product_Z2:Z3", "dihedral:4:reflection"] {
        let r = flat_sect_equality(&zero(spec, 1)).unwrap();
        assert_eq!(r.value_formula, Rational::new(1, 2), "{spec}");
        assert!(r.agree);
    }
}

#[test]
fn double_counts_split_into_sectors() {
    for spec in ["product_Z2:1", "product_Z2:Z2", "cyclic:4:mod2", "product_Z2:Z3"] {
        let g = parse_group_spec(spec).unwrap();
        let basis = cocycle_basis(&g.classifying_groupoid(), 3, Twist::Pi, 4).unwrap();
        for eta in std::iter::once(zero(spec, 3)).chain(basis.cocycles) {
            let r = double_simple_count(&eta).unwrap();
            assert!(r.agree, "{spec}: {r:?}");
            let s = one_loop_sectors(&eta).unwrap();
            assert_eq!(s.torus + s.klein, s.total, "{spec}");
            assert_eq!(int(s.total as i64), r.value_formula, "{spec}");
        }
    }
}

// The untwisted Real double of the trivial group has the single trivial
// module in each sector.
#[test]
fn trivial_group_double() {
    let s = one_loop_sectors(&zero("product_Z2:1", 3)).unwrap();
    assert_eq!((s.torus, s.klein, s.total), (1, 1, 2));
}
