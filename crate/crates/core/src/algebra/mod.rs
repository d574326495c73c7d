//! Twisted groupoid algebras, their centres, flat sections of (Real) line
//! bundles and the thickened doubles built from transgressed cocycles.

mod double;
mod quasi;

pub use double::{build_double, check_key_identity, even_subalgebra, kernel_inclusion, q_fixed_span, q_involution, Double, DoubleVariant, QInvolution};
pub use quasi::{quasi_bialgebra, QuasiBialgebraData, TensorElement};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cochain::{Cochain, Twist};
use crate::error::{Error, Result};
use crate::groupoid::{ComponentClass, Component, FiniteGroupoid, GradedGroupoid, LoopGroupoid, MorId, ObjId};
use crate::phase::{format_rational, parse_rational, Phase, PhaseSum, Sign};
use crate::transgress::{transgress, TransgressionMap};

/// A formal combination `Σ c_ω l_ω` with coefficients in ℚ[ℚ/ℤ].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraElement {
    coeffs: BTreeMap<MorId, PhaseSum>,
}

impl AlgebraElement {
    pub fn zero() -> AlgebraElement {
        AlgebraElement::default()
    }

    pub fn basis(m: MorId) -> AlgebraElement {
        Self::monomial(m, PhaseSum::one())
    }

    pub fn monomial(m: MorId, c: PhaseSum) -> AlgebraElement {
        let mut x = Self::zero();
        x.add_term(m, &c);
        x
    }

    pub fn add_term(&mut self, m: MorId, c: &PhaseSum) {
        let e = self.coeffs.entry(m).or_default();
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    pub fn coeff(&self, m: MorId) -> PhaseSum {
        self.coeffs.get(&m).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (MorId, &PhaseSum)> {
        self.coeffs.iter().map(|(&m, c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support(&self) -> Vec<MorId> {
        self.coeffs.keys().copied().collect()
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        out
    }

    pub fn neg(&self) -> AlgebraElement {
        AlgebraElement {
            coeffs: self.coeffs.iter().map(|(&m, c)| (m, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        self.add(&other.neg())
    }

    /// Left multiplication of every coefficient by a scalar.
    pub fn scale(&self, c: &PhaseSum) -> AlgebraElement {
        let mut out = Self::zero();
        for (m, x) in self.terms() {
            out.add_term(m, &(c * x));
        }
        out
    }

    pub fn to_json(&self, g: &FiniteGroupoid) -> Vec<ElementTerm> {
        self.terms()
            .map(|(m, c)| ElementTerm {
                morphism: g.morphism_name(m).to_string(),
                terms: c
                    .terms()
                    .iter()
                    .map(|(r, p)| Coefficient {
                        coeff: format_rational(r),
                        phase: *p,
                    })
                    .collect(),
            })
            .collect()
    }

    pub fn from_json(terms: &[ElementTerm], g: &FiniteGroupoid) -> Result<AlgebraElement> {
        let mut out = Self::zero();
        for t in terms {
            let m = g
                .morphism_by_name(&t.morphism)
                .ok_or_else(|| Error::Parse(format!("unknown morphism '{}'", t.morphism)))?;
            let mut c = Vec::new();
            for x in &t.terms {
                c.push((parse_rational(&x.coeff)?, x.phase));
            }
            out.add_term(m, &PhaseSum::from_terms(c));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementTerm {
    pub morphism: String,
    pub terms: Vec<Coefficient>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coefficient {
    pub coeff: String,
    pub phase: Phase,
}

/// `ℂ^θ[𝒢]`: basis `l_ω`, product `l_{ω₂}·l_{ω₁} = θ(ω₂,ω₁) l_{ω₂ω₁}`.
///
/// With a PI-twisted `θ` the algebra is Real: scalars passing an odd `l_ω`
/// are conjugated.
#[derive(Clone, Debug)]
pub struct TwistedGroupoidAlgebra {
    theta: Cochain,
}

impl TwistedGroupoidAlgebra {
    /// Checks associativity on every composable basis triple.
    pub fn new(theta: Cochain) -> Result<TwistedGroupoidAlgebra> {
        if theta.degree() != 2 {
            return Err(Error::Degree(theta.degree()));
        }
        let a = TwistedGroupoidAlgebra { theta };
        a.check_associative()?;
        Ok(a)
    }

    pub fn theta(&self) -> &Cochain {
        &self.theta
    }

    pub fn space(&self) -> &GradedGroupoid {
        self.theta.space()
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        self.theta.groupoid()
    }

    pub fn is_real(&self) -> bool {
        self.theta.twist() == Twist::Pi
    }

    pub fn dim(&self) -> usize {
        self.groupoid().n_morphisms()
    }

    fn sign(&self, m: MorId) -> Sign {
        self.theta.kappa(m)
    }

    /// `Σ_x l_{id_x}`.
    pub fn unit(&self) -> AlgebraElement {
        let g = self.groupoid();
        let mut u = AlgebraElement::zero();
        for x in g.objects() {
            u.add_term(g.identity(x), &PhaseSum::one());
        }
        u
    }

    /// `(l_{m₂}, l_{m₁}) ↦ (θ(m₂,m₁), m₂m₁)` when composable.
    pub fn basis_product(&self, m2: MorId, m1: MorId) -> Option<(Phase, MorId)> {
        let m = self.groupoid().compose(m2, m1)?;
        Some((self.theta.value(&[m2, m1]), m))
    }

    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (m2, c2) in x.terms() {
            for (m1, c1) in y.terms() {
                if let Some((p, m)) = self.basis_product(m2, m1) {
                    let c = (c2 * &c1.act(self.sign(m2))).rotate(p);
                    out.add_term(m, &c);
                }
            }
        }
        out
    }

    fn check_associative(&self) -> Result<()> {
        let g = self.groupoid();
        for m1 in g.morphisms() {
            for &m2 in g.out(g.target(m1)) {
                for &m3 in g.out(g.target(m2)) {
                    let left = self.theta.value(&[m3, m2]) + self.theta.value(&[g.compose_unchecked(m3, m2), m1]);
                    let right =
                        self.theta.value(&[m2, m1]).act(self.sign(m3)) + self.theta.value(&[m3, g.compose_unchecked(m2, m1)]);
                    if left != right {
                        return Err(Error::verification("associativity", self.theta.describe(&[m3, m2, m1])));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether `z` commutes with every basis vector and, for a Real algebra,
    /// with the complex scalars.
    pub fn is_central(&self, z: &AlgebraElement) -> bool {
        let g = self.groupoid();
        let central_basis = g.morphisms().all(|m| {
            let l = AlgebraElement::basis(m);
            self.multiply(&l, z) == self.multiply(z, &l)
        });
        let i = PhaseSum::from_phase(Phase::new(1, 4));
        let iu = self.unit().scale(&i);
        central_basis && self.multiply(&iu, z) == self.multiply(z, &iu)
    }

    /// A basis of the centre over ℝ.
    pub fn centre(&self) -> Result<Centre> {
        let base = self.space();
        let (lg, map) = if self.is_real() {
            (LoopGroupoid::quotient(base)?, TransgressionMap::TauPi)
        } else {
            (LoopGroupoid::plain(base.groupoid().clone())?, TransgressionMap::Tau)
        };
        let theta = if self.is_real() {
            self.theta.clone()
        } else {
            self.theta.regraded(&GradedGroupoid::trivially_graded(base.groupoid().clone()))?
        };
        let alpha = transgress(map, &lg, &theta)?.neg();
        let sections = flat_sections(&alpha)?;
        let basis: Vec<AlgebraElement> = sections
            .into_iter()
            .map(|s| {
                let mut z = AlgebraElement::zero();
                for (o, p) in s {
                    z.add_term(lg.loop_of(o), &PhaseSum::from_phase(p));
                }
                z
            })
            .collect();
        Ok(Centre {
            dim_real: basis.len(),
            basis,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Centre {
    /// An ℝ-basis; for complex algebras it comes in pairs `z, i·z`.
    pub basis: Vec<AlgebraElement>,
    pub dim_real: usize,
}

/// `c ↦ act(σ, c)·e(r)` constraints on one complex number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Solutions {
    Plane,
    /// The real line `e(p/2)·ℝ`.
    Line(Phase),
    Zero,
}

impl Solutions {
    fn impose(self, sigma: Sign, r: Phase) -> Solutions {
        match (self, sigma) {
            (Solutions::Zero, _) => Solutions::Zero,
            (_, Sign::Plus) if !r.is_zero() => Solutions::Zero,
            (s, Sign::Plus) => s,
            (Solutions::Plane, Sign::Minus) => Solutions::Line(r),
            (Solutions::Line(p), Sign::Minus) if p == r => Solutions::Line(p),
            (Solutions::Line(_), Sign::Minus) => Solutions::Zero,
        }
    }
}

/// An ℝ-basis of the flat sections of the line bundle of a closed 1-cochain:
/// `s(y) = act(π(m), s(x))·e(α(m))` for `m: x → y`, with `π` trivial unless
/// `α` is PI-twisted. Each element is listed by its values on objects.
pub fn flat_sections(alpha: &Cochain) -> Result<Vec<Vec<(ObjId, Phase)>>> {
    if alpha.degree() != 1 {
        return Err(Error::Degree(alpha.degree()));
    }
    alpha.check_cocycle()?;
    let g = alpha.groupoid();
    let mut out = Vec::new();
    // (sign, offset) with s(x) = act(sign, s(base))·e(offset)
    let mut frame: Vec<Option<(Sign, Phase)>> = vec![None; g.n_objects()];
    for c in g.components() {
        frame[c.base as usize] = Some((Sign::Plus, Phase::ZERO));
        let mut queue = std::collections::VecDeque::from([c.base]);
        let mut state = Solutions::Plane;
        while let Some(x) = queue.pop_front() {
            let (sx, qx) = frame[x as usize].unwrap();
            for &m in g.out(x) {
                let y = g.target(m);
                let pm = alpha.kappa(m);
                let (s, q) = (pm * sx, qx.act(pm) + alpha.value(&[m]));
                match frame[y as usize] {
                    None => {
                        frame[y as usize] = Some((s, q));
                        queue.push_back(y);
                    }
                    Some((sy, qy)) => state = state.impose(sy * s, (q - qy).act(sy)),
                }
            }
        }
        let seeds: Vec<Phase> = match state {
            Solutions::Plane => vec![Phase::ZERO, Phase::new(1, 4)],
            Solutions::Line(p) => vec![p.half()],
            Solutions::Zero => vec![],
        };
        for c0 in seeds {
            out.push(
                c.objects
                    .iter()
                    .map(|&x| {
                        let (s, q) = frame[x as usize].unwrap();
                        (x, c0.act(s) + q)
                    })
                    .collect(),
            );
        }
    }
    Ok(out)
}

/// `dim_ℂ` of flat sections: components whose holonomy character is trivial.
pub fn flat_sections_dim_c(alpha: &Cochain) -> Result<usize> {
    if alpha.degree() != 1 || alpha.twist() != Twist::None {
        return Err(Error::Incompatible("expected an untwisted 1-cocycle".into()));
    }
    alpha.check_cocycle()?;
    let g = alpha.groupoid();
    Ok(g.components()
        .iter()
        .filter(|c| c.automorphisms.iter().all(|&m| alpha.value(&[m]).is_zero()))
        .count())
}

/// `dim_ℝ` of flat sections of the Real line bundle of a twisted 1-cocycle,
/// with each component's contribution.
pub fn real_flat_sections_dim(alpha: &Cochain) -> Result<(usize, Vec<(Component, usize)>)> {
    if alpha.degree() != 1 || alpha.twist() != Twist::Pi {
        return Err(Error::Incompatible("expected a twisted 1-cocycle".into()));
    }
    alpha.check_cocycle()?;
    let space = alpha.space();
    let mut parts = Vec::new();
    for c in space.components() {
        let even_trivial = c
            .automorphisms
            .iter()
            .filter(|&&m| !space.sign(m).is_odd())
            .all(|&m| alpha.value(&[m]).is_zero());
        let contribution = match (c.class, even_trivial) {
            (_, false) => 0,
            (Some(ComponentClass::OddLoop), true) => 1,
            _ => 2,
        };
        parts.push((c, contribution));
    }
    Ok((parts.iter().map(|p| p.1).sum(), parts))
}
