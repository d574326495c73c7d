use jandl::groupoid::parse_group_spec;
use jandl::torsion::{check_gauge_invariance, torsion_3d, Surface};
use jandl::{Cochain, Phase, Sign, Twist};

// η = x₁y₂z₃/2 on (Z2)³, pulled back along the projection from (Z2)³×Z2.
// Its values are 2-torsion, so it is closed for either twist.
#[test]
fn type_three_cocycle_gives_the_determinant() {
    let g = parse_group_spec("product_Z2:Z2xZ2xZ2").unwrap();
    let coords = g.coords().unwrap().coords.clone();
    let b = g.classifying_groupoid();
    let eta = Cochain::from_fn(&b, 3, Twist::Pi, |t| {
        let (x, y, z) = (&coords[t[0] as usize], &coords[t[1] as usize], &coords[t[2] as usize]);
        Phase::new((x[0] * y[1] * z[2]) as i64, 2)
    })
    .unwrap();
    eta.check_cocycle().unwrap();
    let table = torsion_3d(&g, &eta).unwrap();
    assert_eq!(table.rows.len(), 8 * 16 * 16);
    assert_eq!(table.count(Surface::T3), 8 * 8 * 8);
    assert_eq!(table.count(Surface::KleinXS1), 8 * 16 * 16 - 8 * 8 * 8);
    let mut nonzero = 0;
    for row in table.rows.iter().filter(|r| r.surface == Surface::T3) {
        let v: Vec<&Vec<u32>> = row.generators.iter().map(|&e| &coords[e]).collect();
        let det = |i: usize, j: usize, k: usize| v[0][i] * v[1][j] * v[2][k];
        let d = det(0, 1, 2) + det(1, 2, 0) + det(2, 0, 1) + det(2, 1, 0) + det(0, 2, 1) + det(1, 0, 2);
        let want = Phase::new((d % 2) as i64, 2);
        assert_eq!(row.phase, want, "{:?}", row.generators);
        nonzero += usize::from(!want.is_zero());
    }
    // Bases of F₂³ as ordered triples.
    assert_eq!(nonzero, 168);
}

#[test]
fn coboundaries_do_not_move_rows() {
    let g = parse_group_spec("product_Z2:Z2xZ2xZ2").unwrap();
    let b = g.classifying_groupoid();
    let eta = Cochain::zero(&b, 3, Twist::Pi).unwrap();
    for seed in 0..3 {
        let mu = Cochain::random(&b, 2, Twist::Pi, 4, seed).unwrap();
        check_gauge_invariance(&g, &eta, &mu).unwrap();
    }
}

#[test]
fn parity_labels() {
    use Sign::{Minus, Plus};
    assert_eq!(Surface::of_parities(&[Plus, Plus]), Surface::T2);
    assert_eq!(Surface::of_parities(&[Plus, Minus]), Surface::Klein);
    assert_eq!(Surface::of_parities(&[Plus, Plus, Plus]), Surface::T3);
    for p in [[Plus, Plus, Minus], [Plus, Minus, Plus], [Plus, Minus, Minus]] {
        assert_eq!(Surface::of_parities(&p), Surface::KleinXS1);
    }
}
