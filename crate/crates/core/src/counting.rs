//! Counting formulas for twisted representations, centres and doubles,
//! each computed twice: as an integral of a transgressed cocycle and as a
//! dimension of flat sections.

use serde::{Serialize, Serializer};

use crate::algebra::{flat_sections_dim_c, real_flat_sections_dim, TwistedGroupoidAlgebra};
use crate::cochain::{Cochain, Twist};
use crate::error::{Error, Result};
use crate::groupoid::{integrate, integrate_over_objects, GradedGroup, GradedGroupoid, LoopGroupoid, MorId};
use crate::phase::{format_rational, PhaseSum, Rational};
use crate::transgress::{transgress, TransgressionMap};

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

fn ser_opt_rational<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_none(),
    }
}

fn ser_checks<S: Serializer>(v: &[(String, Rational)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(v.len()))?;
    for (k, r) in v {
        m.serialize_entry(k, &format_rational(r))?;
    }
    m.end()
}

/// One quantity computed by independent routes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub quantity: String,
    #[serde(serialize_with = "ser_rational")]
    pub value_formula: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub value_sections: Rational,
    #[serde(serialize_with = "ser_opt_rational")]
    pub value_classical: Option<Rational>,
    #[serde(serialize_with = "ser_checks")]
    pub cross_checks: Vec<(String, Rational)>,
    pub agree: bool,
}

impl CountReport {
    fn new(quantity: &str, formula: Rational, sections: Rational) -> CountReport {
        let mut r = CountReport {
            quantity: quantity.to_string(),
            value_formula: formula,
            value_sections: sections,
            value_classical: None,
            cross_checks: Vec::new(),
            agree: true,
        };
        r.refresh();
        r
    }

    fn refresh(&mut self) {
        let v = self.value_formula;
        self.agree = self.value_sections == v
            && self.value_classical.is_none_or(|c| c == v)
            && self.cross_checks.iter().all(|(_, c)| *c == v);
    }

    pub fn with_classical(mut self, v: Rational) -> CountReport {
        self.value_classical = Some(v);
        self.refresh();
        self
    }

    pub fn with_check(mut self, name: &str, v: Rational) -> CountReport {
        self.cross_checks.push((name.to_string(), v));
        self.refresh();
        self
    }

    pub fn is_integral(&self) -> bool {
        crate::phase::rational_is_nonneg_integer(&self.value_formula)
    }

    pub fn is_half_integral(&self) -> bool {
        crate::phase::rational_is_nonneg_integer(&(self.value_formula * Rational::from_integer(2)))
    }
}

fn real_value(s: &PhaseSum, what: &str) -> Result<Rational> {
    s.to_rational()
        .ok_or_else(|| Error::verification(format!("{what} is real"), s.to_string()))
}

fn require(cond: bool, what: &str, r: &CountReport) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::verification(what, format_rational(&r.value_formula)))
    }
}

fn check_on(c: &Cochain, degree: usize, twist: Twist) -> Result<()> {
    if c.degree() != degree {
        return Err(Error::Degree(c.degree()));
    }
    if c.twist() != twist {
        return Err(Error::TwistMismatch(format!("expected a {twist} cocycle")));
    }
    c.check_cocycle()
}

/// `∫_{ΛΛ^ref_π BĜ} τ(τ_ref(θ̂))` against `dim_ℂ Γ(τ_ref(θ̂))`.
pub fn count_simples(theta: &Cochain) -> Result<CountReport> {
    check_on(theta, 2, Twist::Pi)?;
    let lg = LoopGroupoid::reflection(theta.space())?;
    let t1 = transgress(TransgressionMap::TauRef, &lg, theta)?;
    let llg = LoopGroupoid::plain(lg.groupoid().clone())?;
    let t0 = transgress(TransgressionMap::Tau, &llg, &t1)?;
    let formula = real_value(&integrate(&t0)?, "integral")?;
    let sections = Rational::from_integer(flat_sections_dim_c(&t1)? as i64);
    let r = CountReport::new("simple twisted representations", formula, sections);
    require(r.is_integral(), "integral simple count", &r)?;
    Ok(r)
}

/// The displayed weighted sum over pairs with `γ = ωγ^{π(ω)}ω⁻¹`.
pub fn simple_count_by_pairs(group: &GradedGroup, theta: &Cochain) -> Result<Rational> {
    let th = |a: usize, b: usize| theta.value(&[a as MorId, b as MorId]);
    let mut s = PhaseSum::zero();
    let kernel = group.kernel();
    for &gamma in &kernel {
        for w in 0..group.order() {
            if group.real_conj(w, gamma) != gamma {
                continue;
            }
            let odd = group.sign(w).is_odd();
            let gp = if odd { group.inv(gamma) } else { gamma };
            let mut p = th(gamma, w) - th(w, gp);
            if odd {
                p -= th(group.inv(gamma), gamma);
            }
            s += &PhaseSum::from_phase(p);
        }
    }
    let n = Rational::from_integer(2 * kernel.len() as i64);
    Ok(real_value(&s, "pair sum")? / n)
}

/// `dim_ℝ Z` of the Real twisted group algebra, three ways.
pub fn centre_dim(group: &GradedGroup, theta: &Cochain) -> Result<CountReport> {
    check_on(theta, 2, Twist::Pi)?;
    let kernel = group.kernel();
    let th = |a: usize, b: usize| theta.value(&[a as MorId, b as MorId]);
    let mut s = PhaseSum::zero();
    for &g1 in &kernel {
        for &g2 in &kernel {
            if group.mul(g1, g2) == group.mul(g2, g1) {
                s += &PhaseSum::from_phase(th(g1, g2) - th(g2, g1));
            }
        }
    }
    let formula = real_value(&s, "commuting pair sum")? / Rational::from_integer(kernel.len() as i64);
    let lg = LoopGroupoid::quotient(theta.space())?;
    let alpha = transgress(TransgressionMap::TauPi, &lg, theta)?.neg();
    let sections = Rational::from_integer(real_flat_sections_dim(&alpha)?.0 as i64);
    let algebra = TwistedGroupoidAlgebra::new(theta.clone())?.centre()?;
    let r = CountReport::new("real centre dimension", formula, sections)
        .with_check("algebra_centre", Rational::from_integer(algebra.dim_real as i64));
    require(r.is_integral(), "integral centre dimension", &r)?;
    Ok(r)
}

/// `∫_{Λ²Λ^ref_π BĜ} ττ(τ_ref(η̂))` against `dim_ℂ Γ(τ(τ_ref(η̂)))`.
pub fn double_simple_count(eta: &Cochain) -> Result<CountReport> {
    let (_, t1, total) = iterated(eta)?;
    let llg = LoopGroupoid::plain(t1.groupoid().clone())?;
    let t0 = transgress(TransgressionMap::Tau, &llg, &t1)?;
    let formula = real_value(&integrate(&t0)?, "integral")?;
    let r = CountReport::new("simple double modules", formula, Rational::from_integer(total as i64));
    require(r.is_integral(), "integral module count", &r)?;
    Ok(r)
}

/// `(Λ^ref_π BĜ, τ(τ_ref(η̂)) on ΛΛ^ref_π BĜ, dim_ℂ of its flat sections)`.
fn iterated(eta: &Cochain) -> Result<(LoopGroupoid, Cochain, usize)> {
    check_on(eta, 3, Twist::Pi)?;
    let lg = LoopGroupoid::reflection(eta.space())?;
    let t2 = transgress(TransgressionMap::TauRef, &lg, eta)?;
    let llg = LoopGroupoid::plain(lg.groupoid().clone())?;
    let t1 = transgress(TransgressionMap::Tau, &llg, &t2)?;
    let total = flat_sections_dim_c(&t1)?;
    Ok((lg, t1, total))
}

/// Flat sections over `ΛΛ^ref_π BĜ` split by the parity of the loop `ω`
/// in each object `(g, ω)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SectorSplit {
    pub torus: usize,
    pub klein: usize,
    pub total: usize,
}

pub fn one_loop_sectors(eta: &Cochain) -> Result<SectorSplit> {
    let (lg, t1, total) = iterated(eta)?;
    let llg = LoopGroupoid::plain(lg.groupoid().clone())?;
    let g = llg.groupoid();
    let parity = |o: u32| lg.base().sign(lg.underlying(llg.loop_of(o))).is_odd();
    let (mut torus, mut klein) = (0, 0);
    for c in g.components() {
        let odd = parity(c.base);
        if c.objects.iter().any(|&o| parity(o) != odd) {
            return Err(Error::verification("sector purity", g.object_name(c.base).to_string()));
        }
        if c.automorphisms.iter().all(|&m| t1.value(&[m]).is_zero()) {
            if odd {
                klein += 1;
            } else {
                torus += 1;
            }
        }
    }
    Ok(SectorSplit { torus, klein, total })
}

/// `½ dim_ℝ Γ(α̂) = ∫_{Λ^ref_π} τ_ref(α̂) = ∫_{Λ_π} τ_π(α̂)⁻¹`.
pub fn flat_sect_equality(alpha: &Cochain) -> Result<CountReport> {
    check_on(alpha, 1, Twist::Pi)?;
    let space = alpha.space();
    let lr = LoopGroupoid::reflection(space)?;
    let formula = real_value(&integrate(&transgress(TransgressionMap::TauRef, &lr, alpha)?)?, "integral")?;
    let sections = Rational::from_integer(real_flat_sections_dim(alpha)?.0 as i64) / Rational::from_integer(2);
    let lq = LoopGroupoid::quotient(space)?;
    let inv = transgress(TransgressionMap::TauPi, &lq, alpha)?.neg().with_twist(Twist::None);
    let quot = real_value(&integrate_over_objects(&inv)?, "integral")?;
    let r = CountReport::new("half real flat sections", formula, sections).with_check("quotient_integral", quot);
    require(r.is_half_integral(), "half-integral section count", &r)?;
    Ok(r)
}

/// Conjugacy classes of a group.
pub fn class_count(group: &GradedGroup) -> usize {
    let n = group.order();
    let mut seen = vec![false; n];
    let mut count = 0;
    for x in 0..n {
        if !seen[x] {
            count += 1;
            for g in 0..n {
                seen[group.conj(g, x)] = true;
            }
        }
    }
    count
}

/// Classes up to inversion, i.e. irreducible real representations.
pub fn real_class_count(group: &GradedGroup) -> usize {
    let n = group.order();
    let mut seen = vec![false; n];
    let mut count = 0;
    for x in 0..n {
        if !seen[x] {
            count += 1;
            for g in 0..n {
                seen[group.conj(g, x)] = true;
                seen[group.conj(g, group.inv(x))] = true;
            }
        }
    }
    count
}

/// The even part `(G, θ)` of a graded cocycle, as an untwisted cochain on `BG`.
pub fn even_part(group: &GradedGroup, theta: &Cochain) -> Result<(GradedGroup, GradedGroupoid, Cochain)> {
    let (kernel, _, kb, incl) = crate::algebra::kernel_inclusion(group)?;
    let small = theta.pullback(&incl, &kb)?.with_twist(Twist::None);
    Ok((kernel, kb, small))
}

/// `∫_{ΛBG} τ(θ)`-style identity: `dim_ℂ Γ_{Λ𝒢}(τ(θ)) = ∫_{ΛΛ𝒢} ττ(θ)`.
pub fn willerton_dimension(theta: &Cochain) -> Result<(Rational, Rational)> {
    if theta.twist() != Twist::None {
        return Err(Error::TwistMismatch("expected an untwisted cocycle".into()));
    }
    let space = GradedGroupoid::trivially_graded(theta.groupoid().clone());
    let theta = theta.regraded(&space)?;
    let l1 = LoopGroupoid::plain(space.groupoid().clone())?;
    let t1 = transgress(TransgressionMap::Tau, &l1, &theta)?;
    let l2 = LoopGroupoid::plain(l1.groupoid().clone())?;
    let t0 = transgress(TransgressionMap::Tau, &l2, &t1)?;
    let integral = real_value(&integrate(&t0)?, "integral")?;
    Ok((Rational::from_integer(flat_sections_dim_c(&t1)? as i64), integral))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::quaternionic;
    use crate::groupoid::parse_group_spec;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn setup(spec: &str) -> (GradedGroup, GradedGroupoid) {
        let g = parse_group_spec(spec).unwrap();
        let b = g.classifying_groupoid();
        (g, b)
    }

    #[test]
    fn simple_counts() {
        let (g, b) = setup("product_Z2:Z3");
        let rep = count_simples(&Cochain::zero(&b, 2, Twist::Pi).unwrap()).unwrap();
        assert!(rep.agree);
        assert_eq!(rep.value_formula, r(2, 1));
        assert_eq!(simple_count_by_pairs(&g, &Cochain::zero(&b, 2, Twist::Pi).unwrap()).unwrap(), r(2, 1));

        let (g, b) = setup("product_Z2:1");
        let q = quaternionic(&b).unwrap();
        let rep = count_simples(&q).unwrap();
        assert!(rep.agree);
        assert_eq!(rep.value_formula, r(1, 1));
        assert_eq!(simple_count_by_pairs(&g, &q).unwrap(), r(1, 1));

        let (_, b) = setup("cyclic:4:mod2");
        assert_eq!(count_simples(&Cochain::zero(&b, 2, Twist::Pi).unwrap()).unwrap().value_formula, r(2, 1));
    }

    #[test]
    fn centre_dimensions() {
        let (g, b) = setup("product_Z2:S3");
        let rep = centre_dim(&g, &Cochain::zero(&b, 2, Twist::Pi).unwrap()).unwrap();
        assert!(rep.agree, "{rep:?}");
        assert_eq!(rep.value_formula, r(3, 1));
        let (g, b) = setup("cyclic:4:mod2");
        let rep = centre_dim(&g, &quaternionic(&b).unwrap()).unwrap();
        assert!(rep.agree);
        assert_eq!(rep.value_formula, r(2, 1));
    }

    #[test]
    fn flat_section_halves() {
        let (_, b) = setup("cyclic:4:mod2");
        let rep = flat_sect_equality(&Cochain::zero(&b, 1, Twist::Pi).unwrap()).unwrap();
        assert!(rep.agree, "{rep:?}");
        assert_eq!(rep.value_formula, r(1, 2));

        let (g, _) = setup("product_Z2:Z3");
        let paired = g.action_groupoid(2, |w, x| if g.sign(w).is_odd() { 1 - x } else { x }).unwrap();
        let rep = flat_sect_equality(&Cochain::zero(&paired, 1, Twist::Pi).unwrap()).unwrap();
        assert!(rep.agree, "{rep:?}");
        assert_eq!(rep.value_formula, r(1, 1));
    }

    #[test]
    fn double_counts_and_sectors() {
        let (_, b) = setup("cyclic:4:mod2");
        let eta = Cochain::zero(&b, 3, Twist::Pi).unwrap();
        let rep = double_simple_count(&eta).unwrap();
        assert!(rep.agree, "{rep:?}");
        let s = one_loop_sectors(&eta).unwrap();
        assert_eq!(s.torus + s.klein, s.total);
        assert_eq!(Rational::from_integer(s.total as i64), rep.value_sections);
    }

    #[test]
    fn classical_class_counts() {
        for (spec, classes, real) in [("cyclic:2", 2, 2), ("cyclic:3", 3, 2), ("symmetric:3", 3, 3), ("dihedral:4", 5, 5)] {
            let g = parse_group_spec(spec).unwrap();
            assert_eq!(class_count(&g), classes, "{spec}");
            assert_eq!(real_class_count(&g), real, "{spec}");
        }
    }
}
