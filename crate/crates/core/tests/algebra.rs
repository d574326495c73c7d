use jandl::algebra::{check_key_identity, quasi_bialgebra, AlgebraElement, TwistedGroupoidAlgebra};
use jandl::cochain::{cocycle_basis, quaternionic};
use jandl::counting::{centre_dim, even_part, willerton_dimension};
use jandl::groupoid::parse_group_spec;
use jandl::{Cochain, Twist};

const SMALL: &[&str] = &["product_Z2:1", "product_Z2:Z2", "cyclic:4:mod2", "product_Z2:Z3", "dihedral:4:reflection", "product_Z2:Z2xZ2"];
const SUITE: &[&str] = &["product_Z2:Z2", "cyclic:4:mod2", "product_Z2:Z3", "product_Z2:S3", "dihedral:4:reflection"];

fn two_cocycles(spec: &str) -> Vec<Cochain> {
    let g = parse_group_spec(spec).unwrap();
    let b = g.classifying_groupoid();
    let mut v = vec![Cochain::zero(&b, 2, Twist::Pi).unwrap(), quaternionic(&b).unwrap()];
    v.extend(cocycle_basis(&b, 2, Twist::Pi, 4).unwrap().cocycles);
    v
}

#[test]
fn quasi_bialgebra_on_small_groups() {
    for spec in SMALL {
        let g = parse_group_spec(spec).unwrap();
        let b = g.classifying_groupoid();
        let mut etas = vec![Cochain::zero(&b, 3, Twist::Pi).unwrap()];
        etas.extend(cocycle_basis(&b, 3, Twist::Pi, 4).unwrap().cocycles);
        for (i, eta) in etas.iter().enumerate() {
            let q = quasi_bialgebra(&g, eta).unwrap();
            for (name, r) in q.checks() {
                assert!(r.is_ok(), "{spec} cocycle {i}: {name}: {r:?}");
            }
        }
    }
}

#[test]
fn basis_products_associate() {
    for spec in SUITE {
        for theta in two_cocycles(spec) {
            let a = TwistedGroupoidAlgebra::new(theta).unwrap();
            let n = a.dim() as u32;
            let l = AlgebraElement::basis;
            for x in 0..n {
                for y in 0..n {
                    let xy = a.multiply(&l(x), &l(y));
                    for z in 0..n {
                        let lhs = a.multiply(&xy, &l(z));
                        let rhs = a.multiply(&l(x), &a.multiply(&l(y), &l(z)));
                        assert_eq!(lhs, rhs, "{spec} ({x},{y},{z})");
                    }
                }
            }
        }
    }
}

#[test]
fn key_identity_and_centrality() {
    for spec in SUITE {
        let g = parse_group_spec(spec).unwrap();
        for theta in two_cocycles(spec) {
            check_key_identity(&g, &theta).unwrap();
            let a = TwistedGroupoidAlgebra::new(theta.clone()).unwrap();
            let z = a.centre().unwrap();
            for c in &z.basis {
                for m in 0..a.dim() as u32 {
                    let l = AlgebraElement::basis(m);
                    assert_eq!(a.multiply(c, &l), a.multiply(&l, c), "{spec}");
                }
            }
            let r = centre_dim(&g, &theta).unwrap();
            assert!(r.agree, "{spec}: {r:?}");
        }
    }
}

#[test]
fn centre_depends_only_on_the_even_part() {
    let families: &[&[&str]] = &[
        &["product_Z2:Z2", "cyclic:4:mod2"],
        &["product_Z2:Z3", "symmetric:3:sign"],
        &["product_Z2:Z4", "dihedral:4:reflection"],
        &["product_Z2:S3"],
    ];
    for family in families {
        let mut seen = Vec::new();
        for spec in *family {
            let g = parse_group_spec(spec).unwrap();
            for theta in two_cocycles(spec) {
                let real = centre_dim(&g, &theta).unwrap().value_formula;
                let (_, _, small) = even_part(&g, &theta).unwrap();
                assert_eq!(real, willerton_dimension(&small).unwrap().0, "{spec}");
                if theta.is_zero() {
                    seen.push(real);
                }
            }
        }
        assert!(seen.windows(2).all(|w| w[0] == w[1]), "{family:?}: {seen:?}");
    }
}
