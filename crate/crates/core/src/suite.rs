//! The pinned verification matrix and the property checks run over it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{check_key_identity, quasi_bialgebra, TwistedGroupoidAlgebra};
use crate::cochain::{builtin_cocycle, cocycle_basis, is_coboundary, quaternionic, BuiltinSpec, Cochain, Twist};
use crate::counting::{
    centre_dim, count_simples, double_simple_count, even_part, flat_sect_equality, one_loop_sectors, real_class_count,
    simple_count_by_pairs, willerton_dimension,
};
use crate::error::{Error, Result};
use crate::groupoid::{double_cover, parse_group_spec, GradedGroup, GradedGroupoid, LoopGroupoid, MorId, ObjId};
use crate::phase::{Phase, Rational, Sign};
use crate::torsion::{check_doubly_odd_reduction, check_gauge_invariance, torsion_2d, torsion_3d, Surface};
use crate::transgress::{ez_transgress_oracle, phi_minus, transgress, TransgressionMap};

const STANDARD: &str = include_str!("../data/suite.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fixture {
    pub quantity: String,
    pub group: String,
    pub cocycle: String,
    pub value: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub groups: Vec<String>,
    pub torsion_groups: Vec<String>,
    pub quasi_groups: Vec<String>,
    pub lift_families: Vec<Vec<String>>,
    pub solver_order: u64,
    pub max_solver3_order: usize,
    pub random_cochains: usize,
    pub random_one_cocycles: usize,
    pub fixtures: Vec<Fixture>,
}

impl Manifest {
    pub fn standard() -> Manifest {
        Manifest::from_json(STANDARD).expect("bundled manifest")
    }

    pub fn from_json(s: &str) -> Result<Manifest> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub criterion: usize,
    pub name: String,
    pub cases: usize,
    pub witness: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    fn collect(criterion: usize, name: &str, parts: Vec<Result<usize>>) -> Outcome {
        let mut cases = 0;
        let mut witness = None;
        for p in parts {
            match p {
                Ok(n) => cases += n,
                Err(e) => {
                    witness.get_or_insert_with(|| e.to_string());
                }
            }
        }
        Outcome {
            criterion,
            name: name.to_string(),
            cases,
            witness,
        }
    }
}

pub const CRITERIA: [&str; 11] = [
    "anti-chain map",
    "oracle equivalence",
    "restriction diagram",
    "counting triangle",
    "centre triangle",
    "half flat sections",
    "associativity and key identity",
    "quasi-bialgebra",
    "double counts",
    "torsion dual path",
    "solver sanity",
];

struct Ctx<'a> {
    m: &'a Manifest,
    seed: u64,
}

fn group(spec: &str) -> Result<(GradedGroup, GradedGroupoid)> {
    let g = parse_group_spec(spec)?;
    let b = g.classifying_groupoid();
    Ok((g, b))
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::verification("suite", what()))
    }
}

/// Trivial, quaternionic (degree 2) and the solver basis, labelled.
pub fn suite_cocycles(
    group: &GradedGroup,
    space: &GradedGroupoid,
    degree: usize,
    k: u64,
    max_solver_order: usize,
) -> Result<Vec<(String, Cochain)>> {
    let mut out = vec![("trivial".to_string(), Cochain::zero(space, degree, Twist::Pi)?)];
    if degree == 2 && !group.odd_elements().is_empty() {
        out.push(("quaternionic".to_string(), quaternionic(space)?));
    }
    if group.order() <= max_solver_order {
        for (i, c) in cocycle_basis(space, degree, Twist::Pi, k)?.cocycles.into_iter().enumerate() {
            out.push((format!("basis[{i}]"), c));
        }
    }
    Ok(out)
}

fn pairs(ctx: &Ctx, spec: &str, degree: usize) -> Result<(GradedGroup, Vec<(String, Cochain)>)> {
    let (g, b) = group(spec)?;
    let max = if degree == 3 { ctx.m.max_solver3_order } else { usize::MAX };
    let c = suite_cocycles(&g, &b, degree, ctx.m.solver_order, max)?;
    Ok((g, c))
}

fn case_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15), |a, &p| {
        a.rotate_left(17) ^ p.wrapping_mul(0xBF58_476D_1CE4_E5B9)
    })
}

fn per_group<F>(specs: &[String], f: F) -> Vec<Result<usize>>
where
    F: Fn(usize, &str) -> Result<usize> + Sync,
{
    specs.par_iter().enumerate().map(|(i, s)| f(i, s).map_err(|e| tag(s, e))).collect()
}

fn tag(spec: &str, e: Error) -> Error {
    match e {
        Error::Verification { check, witness } => Error::Verification {
            check,
            witness: format!("{spec}: {witness}"),
        },
        e => Error::verification("suite", format!("{spec}: {e}")),
    }
}

fn anti_chain(ctx: &Ctx) -> Outcome {
    let parts = per_group(&ctx.m.groups, |gi, spec| {
        let (_, b) = group(spec)?;
        let mut n = 0;
        for (mi, map) in TransgressionMap::ALL.into_iter().enumerate() {
            let lg = map.loop_groupoid(&b)?;
            for i in 0..ctx.m.random_cochains {
                let degree = 1 + i % 3;
                let s = case_seed(ctx.seed, &[1, gi as u64, mi as u64, i as u64]);
                let l = Cochain::random(&b, degree, map.input_twist(), 12, s)?;
                let lhs = transgress(map, &lg, &l.differential()?)?;
                let rhs = transgress(map, &lg, &l)?.differential()?.neg();
                ensure(lhs == rhs, || format!("{map} degree {degree} seed {s}"))?;
                n += 1;
            }
        }
        Ok(n)
    });
    Outcome::collect(1, CRITERIA[0], parts)
}

fn oracle(ctx: &Ctx) -> Outcome {
    let parts = per_group(&ctx.m.groups, |gi, spec| {
        let (_, b) = group(spec)?;
        let mut n = 0;
        for (mi, map) in TransgressionMap::ALL.into_iter().enumerate() {
            let lg = map.loop_groupoid(&b)?;
            for degree in 1..=3 {
                let s = case_seed(ctx.seed, &[2, gi as u64, mi as u64, degree as u64]);
                let l = Cochain::random(&b, degree, map.input_twist(), 24, s)?;
                let fast = transgress(map, &lg, &l)?;
                let slow = ez_transgress_oracle(map, &lg, &l)?;
                ensure(fast == slow, || format!("{map} degree {degree} seed {s}"))?;
                n += 1;
            }
        }
        Ok(n)
    });
    Outcome::collect(2, CRITERIA[1], parts)
}

/// `τ(Φ₋ λ)` on `Λ𝒢` against the pullback of the quotient transgression,
/// compared on tuples whose objects lie on the positive sheet.
pub fn restriction_defect(base: &GradedGroupoid, map: TransgressionMap, lambda: &Cochain) -> Result<usize> {
    let dc = double_cover(base)?;
    let lc = LoopGroupoid::plain(dc.groupoid.clone())?;
    let g = lc.groupoid();
    let plus = |o: ObjId| dc.sheet(dc.groupoid.source(lc.loop_of(o))) == Sign::Plus;
    let lg = map.loop_groupoid(base)?;
    let proj = dc.loop_projection(&lc, &lg)?;
    let domain = GradedGroupoid::new(g.clone(), lg.graded().pullback_grading(&proj))?;
    let down = transgress(map, &lg, lambda)?.pullback(&proj, &domain)?;
    let up = transgress(TransgressionMap::Tau, &lc, &phi_minus(lambda, &dc)?)?;
    let mut checked = 0;
    let mut bad: Option<Vec<MorId>> = None;
    if lambda.degree() == 1 {
        for o in g.objects().filter(|&o| plus(o)) {
            if down.object_value(o) != up.object_value(o) {
                bad.get_or_insert(vec![o]);
            }
            checked += 1;
        }
    } else {
        up.for_each_tuple(|t| {
            if plus(g.source(t[t.len() - 1])) && t.iter().all(|&m| plus(g.target(m))) {
                if down.value(t) != up.value(t) {
                    bad.get_or_insert_with(|| t.to_vec());
                }
                checked += 1;
            }
        });
    }
    match bad {
        Some(t) => Err(Error::verification("restriction diagram", format!("{map} at {t:?}"))),
        None => Ok(checked),
    }
}

fn restriction(ctx: &Ctx) -> Outcome {
    let parts = per_group(&ctx.m.groups, |gi, spec| {
        let (_, b) = group(spec)?;
        let mut n = 0;
        for (mi, map) in [TransgressionMap::TauRef, TransgressionMap::TauPi].into_iter().enumerate() {
            for degree in 1..=3 {
                let s = case_seed(ctx.seed, &[3, gi as u64, mi as u64, degree as u64]);
                let l = Cochain::random(&b, degree, Twist::Pi, 12, s)?;
                ensure(restriction_defect(&b, map, &l)? > 0, || format!("{map}: nothing compared"))?;
                n += 1;
            }
        }
        Ok(n)
    });
    Outcome::collect(3, CRITERIA[2], parts)
}

fn fixture(ctx: &Ctx, quantity: &str, spec: &str, label: &str) -> Option<Rational> {
    ctx.m
        .fixtures
        .iter()
        .find(|f| f.quantity == quantity && f.group == spec && f.cocycle == label)
        .map(|f| Rational::from_integer(f.value))
}

fn fixture_specs(ctx: &Ctx, quantity: &str) -> Vec<String> {
    let mut specs = ctx.m.groups.clone();
    for f in ctx.m.fixtures.iter().filter(|f| f.quantity == quantity) {
        if !specs.contains(&f.group) {
            specs.push(f.group.clone());
        }
    }
    specs
}

fn counting(ctx: &Ctx) -> Outcome {
    let specs = fixture_specs(ctx, "count_simples");
    let parts = per_group(&specs, |_, spec| {
        let (g, cs) = pairs(ctx, spec, 2)?;
        let mut n = 0;
        for (label, theta) in &cs {
            let mut r = count_simples(theta)?.with_check("pair_sum", simple_count_by_pairs(&g, theta)?);
            if let Some(v) = fixture(ctx, "count_simples", spec, label) {
                r = r.with_classical(v);
            }
            if label == "trivial" && spec.starts_with("product_Z2:") {
                let (kernel, _) = g.kernel_group()?;
                r = r.with_check("real_classes", Rational::from_integer(real_class_count(&kernel) as i64));
            }
            ensure(r.agree && r.is_integral(), || format!("{label}: {}", serde_json::to_string(&r).unwrap_or_default()))?;
            n += 1;
        }
        Ok(n)
    });
    Outcome::collect(4, CRITERIA[3], parts)
}

/// `dim_ℂ Z(ℂ^θ[G])` for the even part, which the Real centre dimension must match.
fn even_centre(group: &GradedGroup, theta: &Cochain) -> Result<Rational> {
    let (_, _, small) = even_part(group, theta)?;
    Ok(willerton_dimension(&small)?.0)
}

fn centre(ctx: &Ctx) -> Outcome {
    let specs = fixture_specs(ctx, "centre_dim");
    let mut parts = per_group(&specs, |_, spec| {
        let (g, cs) = pairs(ctx, spec, 2)?;
        let mut n = 0;
        for (label, theta) in &cs {
            let mut r = centre_dim(&g, theta)?.with_check("even_part", even_centre(&g, theta)?);
            if let Some(v) = fixture(ctx, "centre_dim", spec, label) {
                r = r.with_classical(v);
            }
            ensure(r.agree, || format!("{label}: {}", serde_json::to_string(&r).unwrap_or_default()))?;
            n += 1;
        }
        Ok(n)
    });
    for family in &ctx.m.lift_families {
        let values: Result<Vec<Vec<Rational>>> = family
            .iter()
            .map(|spec| {
                let (g, b) = group(spec)?;
                Ok(vec![
                    centre_dim(&g, &Cochain::zero(&b, 2, Twist::Pi)?)?.value_formula,
                    centre_dim(&g, &quaternionic(&b)?)?.value_formula,
                ])
            })
            .collect();
        parts.push(values.and_then(|v| {
            ensure(v.windows(2).all(|w| w[0] == w[1]), || format!("lift dependence in {family:?}: {v:?}"))?;
            Ok(v.len())
        }));
    }
    Outcome::collect(5, CRITERIA[4], parts)
}

/// A random twisted 1-cocycle: a combination of solver generators plus a coboundary.
pub fn random_one_cocycle(space: &GradedGroupoid, k: u64, seed: u64) -> Result<Cochain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = cocycle_basis(space, 1, Twist::Pi, k)?;
    let mut a = Cochain::random(space, 0, Twist::Pi, k, rng.gen())?.differential()?;
    for c in &basis.cocycles {
        a = a.add(&c.scale(rng.gen_range(0..k as i64)))?;
    }
    Ok(a)
}

fn half_sections(ctx: &Ctx) -> Outcome {
    let parts = per_group(&ctx.m.groups, |gi, spec| {
        let (_, b) = group(spec)?;
        let mut n = 0;
        for i in 0..ctx.m.random_one_cocycles {
            let s = case_seed(ctx.seed, &[6, gi as u64, i as u64]);
            let a = random_one_cocycle(&b, ctx.m.solver_order, s)?;
            let r = flat_sect_equality(&a)?;
            ensure(r.agree, || format!("seed {s}: {}", serde_json::to_string(&r).unwrap_or_default()))?;
            n += 1;
        }
        Ok(n)
    });
    Outcome::collect(6, CRITERIA[5], parts)
}

fn associativity(ctx: &Ctx) -> Outcome {
    let parts = per_group(&ctx.m.groups, |_, spec| {
        let (g, cs) = pairs(ctx, spec, 2)?;
        for (_, theta) in &cs {
            TwistedGroupoidAlgebra::new(theta.clone())?;
            check_key_identity(&g, theta)?;
        }
        Ok(cs.len())
    });
    Outcome::collect(7, CRITERIA[6], parts)
}

fn quasi(ctx: &Ctx) -> Outcome {
    let parts = per_group(&ctx.m.quasi_groups, |_, spec| {
        let (g, cs) = pairs(ctx, spec, 3)?;
        for (_, eta) in &cs {
            quasi_bialgebra(&g, eta)?.verify()?;
        }
        Ok(cs.len())
    });
    Outcome::collect(8, CRITERIA[7], parts)
}

fn doubles(ctx: &Ctx) -> Outcome {
    let small: Vec<String> = ctx
        .m
        .torsion_groups
        .iter()
        .filter(|s| parse_group_spec(s).is_ok_and(|g| g.order() <= ctx.m.max_solver3_order))
        .cloned()
        .collect();
    let parts = per_group(&small, |_, spec| {
        let (_, cs) = pairs(ctx, spec, 3)?;
        for (label, eta) in &cs {
            let r = double_simple_count(eta)?;
            let split = one_loop_sectors(eta)?;
            ensure(r.agree, || format!("{label}: {}", serde_json::to_string(&r).unwrap_or_default()))?;
            ensure(
                split.torus + split.klein == split.total && Rational::from_integer(split.total as i64) == r.value_sections,
                || format!("{label}: sectors {split:?}"),
            )?;
        }
        Ok(cs.len())
    });
    Outcome::collect(9, CRITERIA[8], parts)
}

/// On `(ℤ₂×ℤ₂)×ℤ₂` with `θ(a, b) = a₁b₂/2`, every `T²` row is `(a₁b₂ − a₂b₁)/2`.
pub fn antisymmetrization_check() -> Result<usize> {
    let (g, b) = group("product_Z2:Z2xZ2")?;
    let c = g.coords().ok_or_else(|| Error::Incompatible("abelian coordinates".into()))?.coords.clone();
    let theta = Cochain::from_fn(&b, 2, Twist::Pi, |t| {
        Phase::new((c[t[0] as usize][0] * c[t[1] as usize][1]) as i64, 2)
    })?;
    let table = torsion_2d(&g, &theta)?;
    let mut n = 0;
    for r in table.rows.iter().filter(|r| r.surface == Surface::T2) {
        let (x, y) = (&c[r.generators[0]], &c[r.generators[1]]);
        let eps = Phase::new(x[0] as i64 * y[1] as i64 - x[1] as i64 * y[0] as i64, 2);
        ensure(r.phase == eps, || format!("row {:?}", r.generators))?;
        n += 1;
    }
    ensure(n == 16, || format!("{n} torus rows"))?;
    Ok(n)
}

fn torsion(ctx: &Ctx) -> Outcome {
    let mut parts = per_group(&ctx.m.torsion_groups, |gi, spec| {
        let (g, b) = group(spec)?;
        let mut n = 0;
        for degree in [2, 3] {
            let max = if degree == 3 { ctx.m.max_solver3_order } else { usize::MAX };
            for (ci, (_, c)) in suite_cocycles(&g, &b, degree, ctx.m.solver_order, max)?.iter().enumerate() {
                let table = if degree == 2 { torsion_2d(&g, c)? } else { torsion_3d(&g, c)? };
                if degree == 3 {
                    check_doubly_odd_reduction(&g, c, &table)?;
                }
                let s = case_seed(ctx.seed, &[10, gi as u64, degree as u64, ci as u64]);
                check_gauge_invariance(&g, c, &Cochain::random(&b, degree - 1, Twist::Pi, 4, s)?)?;
                n += table.rows.len();
            }
        }
        Ok(n)
    });
    parts.push(antisymmetrization_check());
    Outcome::collect(10, CRITERIA[9], parts)
}

/// `H¹(ℤ₂; U(1)) = H³(ℤ₂; U(1)) = ℤ₂`, and the cyclic 3-cocycle is a nontrivial class.
pub fn solver_sanity_check() -> Result<usize> {
    let (g, b) = group("cyclic:2")?;
    for degree in [1, 3] {
        let f = cocycle_basis(&b, degree, Twist::None, 4)?.invariant_factors;
        ensure(f == vec![2], || format!("H^{degree}(Z2) invariant factors {f:?}"))?;
    }
    let eta = builtin_cocycle(&g, &b, &BuiltinSpec::Cyclic3 { factor: 0 }, 3, Twist::None)?;
    ensure(eta.is_cocycle(), || "cyclic3 is not closed".into())?;
    ensure(!is_coboundary(&eta, 4)?, || "cyclic3 is a coboundary".into())?;
    Ok(3)
}

fn solver(_: &Ctx) -> Outcome {
    Outcome::collect(11, CRITERIA[10], vec![solver_sanity_check()])
}

/// Runs one criterion, numbered from 1.
pub fn run_criterion(m: &Manifest, seed: u64, criterion: usize) -> Result<Outcome> {
    let ctx = Ctx { m, seed };
    Ok(match criterion {
        1 => anti_chain(&ctx),
        2 => oracle(&ctx),
        3 => restriction(&ctx),
        4 => counting(&ctx),
        5 => centre(&ctx),
        6 => half_sections(&ctx),
        7 => associativity(&ctx),
        8 => quasi(&ctx),
        9 => doubles(&ctx),
        10 => torsion(&ctx),
        11 => solver(&ctx),
        n => return Err(Error::Incompatible(format!("no criterion {n}"))),
    })
}

pub fn run(m: &Manifest, seed: u64) -> Vec<Outcome> {
    (1..=CRITERIA.len()).map(|i| run_criterion(m, seed, i).expect("criterion in range")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_parses() {
        let m = Manifest::standard();
        assert_eq!(m.groups.len(), 5);
        for s in m.groups.iter().chain(&m.torsion_groups).chain(m.lift_families.iter().flatten()) {
            parse_group_spec(s).unwrap();
        }
    }

    #[test]
    fn standalone_checks() {
        assert_eq!(antisymmetrization_check().unwrap(), 16);
        assert_eq!(solver_sanity_check().unwrap(), 3);
    }

    #[test]
    fn random_one_cocycles_are_closed() {
        let b = parse_group_spec("dihedral:4:reflection").unwrap().classifying_groupoid();
        for s in 0..5 {
            assert!(random_one_cocycle(&b, 4, s).unwrap().is_cocycle());
        }
    }
}
