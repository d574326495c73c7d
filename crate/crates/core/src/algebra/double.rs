use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AlgebraElement, TwistedGroupoidAlgebra};
use crate::cochain::{Cochain, Twist};
use crate::error::{Error, Result};
use crate::groupoid::{Functor, GradedGroup, GradedGroupoid, LoopGroupoid, MorId};
use crate::phase::{Phase, Sign};
use crate::transgress::{transgress, TransgressionMap};

/// The three thickened doubles of a graded group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoubleVariant {
    /// `τ_ref(η̂)` on `Λ^ref_π BĜ`, a complex algebra.
    DRef,
    /// `τ_π(η̂)` on `Λ_π BĜ`, a Real algebra.
    DdQuot,
    /// `τ̃_ref(η̃)` on `Λ^ref_π BĜ`, a Real algebra.
    DdRefTilde,
}

impl DoubleVariant {
    pub const ALL: [DoubleVariant; 3] = [Self::DRef, Self::DdQuot, Self::DdRefTilde];

    pub fn map(self) -> TransgressionMap {
        match self {
            Self::DRef => TransgressionMap::TauRef,
            Self::DdQuot => TransgressionMap::TauPi,
            Self::DdRefTilde => TransgressionMap::TauRefTilde,
        }
    }
}

impl fmt::Display for DoubleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::DRef => "d_ref",
            Self::DdQuot => "dd_quot",
            Self::DdRefTilde => "dd_ref_tilde",
        })
    }
}

impl FromStr for DoubleVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d_ref" | "dref" => Ok(Self::DRef),
            "dd_quot" | "ddquot" => Ok(Self::DdQuot),
            "dd_ref_tilde" | "ddreftilde" => Ok(Self::DdRefTilde),
            _ => Err(Error::Parse(format!("unknown double variant '{s}'"))),
        }
    }
}

/// A double together with the loop groupoid carrying its basis.
#[derive(Clone, Debug)]
pub struct Double {
    pub variant: DoubleVariant,
    pub loops: LoopGroupoid,
    pub algebra: TwistedGroupoidAlgebra,
}

/// The twisted double of a degree-3 cocycle on `BĜ`.
pub fn build_double(cocycle: &Cochain, variant: DoubleVariant) -> Result<Double> {
    if cocycle.degree() != 3 {
        return Err(Error::Degree(cocycle.degree()));
    }
    let map = variant.map();
    if cocycle.twist() != map.input_twist() {
        return Err(Error::TwistMismatch(format!("{variant} needs a {} cocycle", map.input_twist())));
    }
    cocycle.check_cocycle()?;
    let loops = map.loop_groupoid(cocycle.space())?;
    let theta = transgress(map, &loops, cocycle)?;
    let algebra = TwistedGroupoidAlgebra::new(theta)?;
    Ok(Double {
        variant,
        loops,
        algebra,
    })
}

/// Basis vectors of the even part: morphisms with even underlying element.
pub fn even_subalgebra(d: &Double) -> Vec<MorId> {
    let base = d.loops.base();
    d.loops
        .groupoid()
        .morphisms()
        .filter(|&m| !base.sign(d.loops.underlying(m)).is_odd())
        .collect()
}

/// `BG ↪ BĜ` for the kernel `G`, as `(G, ids in Ĝ, BG, inclusion)`.
pub fn kernel_inclusion(group: &GradedGroup) -> Result<(GradedGroup, Vec<usize>, GradedGroupoid, Functor)> {
    let (kernel, embed) = group.kernel_group()?;
    let kb = kernel.classifying_groupoid();
    let f = Functor {
        objects: vec![0],
        morphisms: embed.iter().map(|&x| x as MorId).collect(),
    };
    Ok((kernel, embed, kb, f))
}

/// The anti-linear map `q^ς` on `ℂ^θ[BG]` induced by an odd element `ς`.
#[derive(Clone, Debug)]
pub struct QInvolution {
    pub algebra: TwistedGroupoidAlgebra,
    pub sigma: usize,
    /// `l_g ↦ e(p)·l_{g'}` per kernel element.
    image: Vec<(MorId, Phase)>,
}

impl QInvolution {
    pub fn apply(&self, x: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (m, c) in x.terms() {
            let (t, p) = self.image[m as usize];
            out.add_term(t, &c.act(Sign::Minus).rotate(p));
        }
        out
    }
}

/// `q^ς(Σ c_g l_g) = Σ c̄_g · e(−τ_π(θ̂)([ς]g)) · l_{ςgς⁻¹}`.
pub fn q_involution(group: &GradedGroup, theta_hat: &Cochain, sigma: usize) -> Result<QInvolution> {
    if sigma >= group.order() || !group.sign(sigma).is_odd() {
        return Err(Error::Incompatible("ς must be an odd element".into()));
    }
    if theta_hat.degree() != 2 || theta_hat.twist() != Twist::Pi {
        return Err(Error::TwistMismatch("expected a twisted 2-cocycle".into()));
    }
    theta_hat.check_cocycle()?;
    let (_, embed, kb, incl) = kernel_inclusion(group)?;
    let theta = theta_hat.pullback(&incl, &kb)?.with_twist(Twist::None);
    let algebra = TwistedGroupoidAlgebra::new(theta)?;
    let lg = LoopGroupoid::quotient(theta_hat.space())?;
    let tp = transgress(TransgressionMap::TauPi, &lg, theta_hat)?;
    let pos = |x: usize| embed.iter().position(|&y| y == x).expect("kernel element") as MorId;
    let image = embed
        .iter()
        .map(|&g| {
            let o = lg.object_of_loop(g as MorId).expect("even loop");
            let m = lg.morphism_at(o, sigma as MorId);
            (pos(group.conj(sigma, g)), tp.value(&[m]).neg())
        })
        .collect();
    Ok(QInvolution { algebra, sigma, image })
}

/// `θ̂(ωg₂ω⁻¹, ωg₁ω⁻¹) − π(ω)θ̂(g₂, g₁) = τ_π(θ̂)([ω]g₂) + τ_π(θ̂)([ω]g₁) − τ_π(θ̂)([ω]g₂g₁)`
/// for all `g₁, g₂ ∈ G`, `ω ∈ Ĝ`.
pub fn check_key_identity(group: &GradedGroup, theta_hat: &Cochain) -> Result<()> {
    if theta_hat.degree() != 2 || theta_hat.twist() != Twist::Pi {
        return Err(Error::TwistMismatch("expected a twisted 2-cocycle".into()));
    }
    let lg = LoopGroupoid::quotient(theta_hat.space())?;
    let tp = transgress(TransgressionMap::TauPi, &lg, theta_hat)?;
    let th = |a: usize, b: usize| theta_hat.value(&[a as MorId, b as MorId]);
    let at = |w: usize, g: usize| {
        let o = lg.object_of_loop(g as MorId).expect("even loop");
        tp.value(&[lg.morphism_at(o, w as MorId)])
    };
    let kernel = group.kernel();
    for w in 0..group.order() {
        for &g2 in &kernel {
            for &g1 in &kernel {
                let lhs = th(group.conj(w, g2), group.conj(w, g1)) - th(g2, g1).act(group.sign(w));
                let rhs = at(w, g2) + at(w, g1) - at(w, group.mul(g2, g1));
                if lhs != rhs {
                    return Err(Error::verification(
                        "key 2-cocycle identity",
                        format!("g2={g2} g1={g1} w={w}: {lhs} vs {rhs}"),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Fixed points of `q` on a centre basis, as an ℝ-spanning set `z + q(z)`.
pub fn q_fixed_span(q: &QInvolution, centre: &[AlgebraElement]) -> Vec<AlgebraElement> {
    centre.iter().map(|z| z.add(&q.apply(z))).filter(|z| !z.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{cocycle_basis, quaternionic};
    use crate::groupoid::parse_group_spec;

    #[test]
    fn untwisted_reflection_double_dimension() {
        let g = parse_group_spec("cyclic:4:mod2").unwrap();
        let b = g.classifying_groupoid();
        let d = build_double(&Cochain::zero(&b, 3, Twist::Pi).unwrap(), DoubleVariant::DRef).unwrap();
        assert_eq!(d.algebra.dim(), 8);
        assert!(!d.algebra.is_real());
        let dd = build_double(&Cochain::zero(&b, 3, Twist::Pi).unwrap(), DoubleVariant::DdQuot).unwrap();
        assert!(dd.algebra.is_real());
        assert!(build_double(&Cochain::zero(&b, 3, Twist::Pi).unwrap(), DoubleVariant::DdRefTilde).is_err());
        let mut bad = Cochain::zero(&b, 3, Twist::Pi).unwrap();
        bad.set(&[1, 1, 1], Phase::new(1, 3));
        assert!(matches!(build_double(&bad, DoubleVariant::DdQuot), Err(Error::NotClosed { .. })));
    }

    #[test]
    fn even_part_of_quotient_double_is_the_classical_double() {
        for spec in ["cyclic:4:mod2", "product_Z2:Z3", "dihedral:4:reflection"] {
            let g = parse_group_spec(spec).unwrap();
            let b = g.classifying_groupoid();
            let (_, embed, kb, incl) = kernel_inclusion(&g).unwrap();
            let pos = |x: MorId| embed.iter().position(|&y| y as MorId == x).unwrap() as MorId;
            let basis = cocycle_basis(&b, 3, Twist::Pi, 4).unwrap();
            for eta in &basis.cocycles {
                let d = build_double(eta, DoubleVariant::DdQuot).unwrap();
                let even = even_subalgebra(&d);
                let lk = LoopGroupoid::plain(kb.groupoid().clone()).unwrap();
                let small = eta.pullback(&incl, &kb).unwrap().with_twist(Twist::None);
                let tk = transgress(TransgressionMap::Tau, &lk, &small).unwrap();
                let to_small = |m: MorId| {
                    let o = lk.object_of_loop(pos(d.loops.loop_of(d.loops.groupoid().source(m)))).unwrap();
                    lk.morphism_at(o, pos(d.loops.underlying(m)))
                };
                let lg = d.loops.groupoid();
                for &a in &even {
                    for &c in &even {
                        if lg.compose(a, c).is_some() {
                            let theta = d.algebra.theta().value(&[a, c]);
                            assert_eq!(theta, tk.value(&[to_small(a), to_small(c)]), "{spec}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn q_is_an_antilinear_involution_of_the_centre() {
        for spec in ["cyclic:4:mod2", "product_Z2:S3", "dihedral:4:reflection", "product_Z2:Z3"] {
            let g = parse_group_spec(spec).unwrap();
            let b = g.classifying_groupoid();
            let mut thetas = vec![Cochain::zero(&b, 2, Twist::Pi).unwrap()];
            if spec == "cyclic:4:mod2" {
                thetas.push(quaternionic(&b).unwrap());
            }
            if g.order() <= 8 {
                thetas.extend(cocycle_basis(&b, 2, Twist::Pi, 4).unwrap().cocycles);
            }
            let odd = g.odd_elements();
            for theta in &thetas {
                let qs: Vec<QInvolution> = odd.iter().map(|&s| q_involution(&g, theta, s).unwrap()).collect();
                let a = &qs[0].algebra;
                let n = a.dim() as MorId;
                for x in 0..n {
                    for y in 0..n {
                        let (lx, ly) = (AlgebraElement::basis(x), AlgebraElement::basis(y));
                        let lhs = qs[0].apply(&a.multiply(&lx, &ly));
                        let rhs = a.multiply(&qs[0].apply(&lx), &qs[0].apply(&ly));
                        assert_eq!(lhs, rhs, "{spec}");
                    }
                }
                let centre = a.centre().unwrap();
                for z in &centre.basis {
                    let qz = qs[0].apply(z);
                    assert!(a.is_central(&qz));
                    assert_eq!(qs[0].apply(&qz), *z);
                    for q in &qs[1..] {
                        assert_eq!(q.apply(z), qz);
                    }
                }
                check_key_identity(&g, theta).unwrap();
                let real = TwistedGroupoidAlgebra::new(theta.clone()).unwrap().centre().unwrap();
                assert_eq!(real.dim_real * 2, centre.dim_real, "{spec}");
            }
        }
    }
}
