use std::collections::BTreeMap;

use super::double::{build_double, kernel_inclusion, Double, DoubleVariant};
use super::{AlgebraElement, TwistedGroupoidAlgebra};
use crate::cochain::{Cochain, Twist};
use crate::error::{Error, Result};
use crate::groupoid::{GradedGroup, GradedGroupoid, MorId};
use crate::phase::{Phase, PhaseSum};

/// An element of a tensor power of a (Real) twisted groupoid algebra,
/// restricted to homogeneous basis tensors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorElement {
    coeffs: BTreeMap<Vec<MorId>, PhaseSum>,
}

impl TensorElement {
    pub fn zero() -> TensorElement {
        TensorElement::default()
    }

    pub fn add_term(&mut self, key: Vec<MorId>, c: &PhaseSum) {
        let e = self.coeffs.entry(key.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[MorId], &PhaseSum)> {
        self.coeffs.iter().map(|(k, c)| (k.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Factorwise product; a scalar passing a tensor of odd vectors is
    /// conjugated once.
    pub fn multiply(&self, a: &TwistedGroupoidAlgebra, other: &TensorElement) -> TensorElement {
        let g = a.groupoid();
        let mut out = TensorElement::zero();
        for (x, cx) in self.terms() {
            for (y, cy) in other.terms() {
                debug_assert_eq!(x.len(), y.len());
                let mut key = Vec::with_capacity(x.len());
                let mut phase = Phase::ZERO;
                let mut ok = true;
                for (&m2, &m1) in x.iter().zip(y) {
                    match g.compose(m2, m1) {
                        Some(m) => {
                            key.push(m);
                            phase += a.theta().value(&[m2, m1]);
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    let c = (cx * &cy.act(a.theta().kappa(x[0]))).rotate(phase);
                    out.add_term(key, &c);
                }
            }
        }
        out
    }
}

/// `Δ`, `Φ` and the correction cochains `c_ω` of the quotient double.
#[derive(Clone, Debug)]
pub struct QuasiBialgebraData {
    pub double: Double,
    pub group: GradedGroup,
    /// Kernel element ids inside `Ĝ`.
    pub kernel: Vec<usize>,
    pub kernel_space: GradedGroupoid,
    /// `c_ω` on `BG`, indexed by the element `ω` of `Ĝ`.
    pub corrections: Vec<Cochain>,
    /// `Δ(l_m) = Σ e(p) l_a ⊗ l_b`, indexed by the morphism `m`.
    pub coproduct: Vec<Vec<(Phase, MorId, MorId)>>,
    pub associator: Vec<(Phase, [MorId; 3])>,
    eta: Cochain,
}

/// Builds `Δ` and `Φ` for the quotient double of a twisted 3-cocycle.
pub fn quasi_bialgebra(group: &GradedGroup, eta: &Cochain) -> Result<QuasiBialgebraData> {
    let double = build_double(eta, DoubleVariant::DdQuot)?;
    if eta.groupoid().n_objects() != 1 || eta.groupoid().n_morphisms() != group.order() {
        return Err(Error::Incompatible("cocycle does not live on the classifying groupoid of the group".into()));
    }
    let (_, kernel, kb, _) = kernel_inclusion(group)?;
    let e = |a: usize, b: usize, c: usize| eta.value(&[a as MorId, b as MorId, c as MorId]);
    let mut corrections = Vec::with_capacity(group.order());
    for w in 0..group.order() {
        let c = Cochain::from_fn(&kb, 2, Twist::None, |t| {
            let (g2, g1) = (kernel[t[0] as usize], kernel[t[1] as usize]);
            let (c2, c1) = (group.conj(w, g2), group.conj(w, g1));
            e(w, g2, g1) + e(c2, c1, w) - e(c2, w, g1)
        })?;
        corrections.push(c);
    }
    let pos = |x: usize| kernel.iter().position(|&y| y == x).expect("kernel element") as MorId;
    let loops = &double.loops;
    let lg = loops.groupoid();
    let at = |g: usize, w: MorId| loops.morphism_at(loops.object_of_loop(g as MorId).expect("even loop"), w);
    let coproduct = lg
        .morphisms()
        .map(|m| {
            let g = loops.loop_of(lg.source(m)) as usize;
            let w = loops.underlying(m);
            kernel
                .iter()
                .map(|&g2| {
                    let g1 = group.mul(group.inv(g2), g);
                    (corrections[w as usize].value(&[pos(g2), pos(g1)]), at(g2, w), at(g1, w))
                })
                .collect()
        })
        .collect();
    // Φ = η⁻¹ on the kernel, matching the orientation of c_ω.
    let mut associator = Vec::new();
    for &g3 in &kernel {
        for &g2 in &kernel {
            for &g1 in &kernel {
                associator.push((-e(g3, g2, g1), [at(g3, 0), at(g2, 0), at(g1, 0)]));
            }
        }
    }
    Ok(QuasiBialgebraData {
        double,
        group: group.clone(),
        kernel,
        kernel_space: kb,
        corrections,
        coproduct,
        associator,
        eta: eta.clone(),
    })
}

impl QuasiBialgebraData {
    pub fn algebra(&self) -> &TwistedGroupoidAlgebra {
        &self.double.algebra
    }

    pub fn delta(&self, x: &AlgebraElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for (m, c) in x.terms() {
            for &(p, a, b) in &self.coproduct[m as usize] {
                out.add_term(vec![a, b], &c.rotate(p));
            }
        }
        out
    }

    /// `Δ` applied to factor `slot` of a tensor.
    pub fn delta_at(&self, x: &TensorElement, slot: usize) -> TensorElement {
        let mut out = TensorElement::zero();
        for (key, c) in x.terms() {
            for &(p, a, b) in &self.coproduct[key[slot] as usize] {
                let mut k = key[..slot].to_vec();
                k.extend([a, b]);
                k.extend_from_slice(&key[slot + 1..]);
                out.add_term(k, &c.rotate(p));
            }
        }
        out
    }

    pub fn phi(&self) -> TensorElement {
        let mut out = TensorElement::zero();
        for &(p, k) in &self.associator {
            out.add_term(k.to_vec(), &PhaseSum::from_phase(p));
        }
        out
    }

    fn pos(&self, x: usize) -> MorId {
        self.kernel.iter().position(|&y| y == x).expect("kernel element") as MorId
    }

    /// `dc_ω = η^{π(ω)} - ω·η` on the kernel.
    pub fn check_conjugation(&self) -> Result<()> {
        let grp = &self.group;
        let e = |a: usize, b: usize, c: usize| self.eta.value(&[a as MorId, b as MorId, c as MorId]);
        for w in 0..grp.order() {
            let dc = self.corrections[w].differential()?;
            for &g3 in &self.kernel {
                for &g2 in &self.kernel {
                    for &g1 in &self.kernel {
                        let lhs = e(g3, g2, g1).act(grp.sign(w)) - e(grp.conj(w, g3), grp.conj(w, g2), grp.conj(w, g1));
                        let rhs = dc.value(&[self.pos(g3), self.pos(g2), self.pos(g1)]);
                        if lhs != rhs {
                            return Err(Error::verification("conjugation identity", self.names(w, &[g3, g2, g1])));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Compatibility of `τ_π(η̂)` with the corrections under composition.
    pub fn check_composition(&self) -> Result<()> {
        let grp = &self.group;
        let loops = &self.double.loops;
        let tau = self.double.algebra.theta();
        let t = |w2: usize, w1: usize, g: usize| {
            let o = loops.object_of_loop(g as MorId).expect("even loop");
            let m1 = loops.morphism_at(o, w1 as MorId);
            let m2 = loops.morphism_at(loops.groupoid().target(m1), w2 as MorId);
            tau.value(&[m2, m1])
        };
        let c = |w: usize, g2: usize, g1: usize| self.corrections[w].value(&[self.pos(g2), self.pos(g1)]);
        for w2 in 0..grp.order() {
            for w1 in 0..grp.order() {
                for &g2 in &self.kernel {
                    for &g1 in &self.kernel {
                        let lhs = t(w2, w1, g2) + t(w2, w1, g1) - t(w2, w1, grp.mul(g2, g1));
                        let rhs = c(grp.mul(w2, w1), g2, g1)
                            - c(w1, g2, g1).act(grp.sign(w2))
                            - c(w2, grp.conj(w1, g2), grp.conj(w1, g1));
                        if lhs != rhs {
                            return Err(Error::verification(
                                "composition identity",
                                format!("ω₂={} {}", grp.element_name(w2), self.names(w1, &[g2, g1])),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `Δ(xy) = Δ(x)Δ(y)` on basis vectors.
    pub fn check_multiplicative(&self) -> Result<()> {
        let a = self.algebra();
        let g = a.groupoid();
        for m1 in g.morphisms() {
            for m2 in g.morphisms() {
                let (x, y) = (AlgebraElement::basis(m2), AlgebraElement::basis(m1));
                let lhs = self.delta(&a.multiply(&x, &y));
                let rhs = self.delta(&x).multiply(a, &self.delta(&y));
                if lhs != rhs {
                    return Err(Error::verification(
                        "coproduct multiplicativity",
                        format!("[{}|{}]", g.morphism_name(m2), g.morphism_name(m1)),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `(id⊗Δ)Δ(x)·Φ = Φ·(Δ⊗id)Δ(x)` on basis vectors.
    pub fn check_coassociative(&self) -> Result<()> {
        let a = self.algebra();
        let g = a.groupoid();
        let phi = self.phi();
        for m in g.morphisms() {
            let d = self.delta(&AlgebraElement::basis(m));
            let lhs = self.delta_at(&d, 1).multiply(a, &phi);
            let rhs = phi.multiply(a, &self.delta_at(&d, 0));
            if lhs != rhs {
                return Err(Error::verification("quasi-coassociativity", g.morphism_name(m).to_string()));
            }
        }
        Ok(())
    }

    /// The four checks in order, with their outcomes.
    pub fn checks(&self) -> Vec<(&'static str, Result<()>)> {
        vec![
            ("conjugation", self.check_conjugation()),
            ("composition", self.check_composition()),
            ("multiplicative", self.check_multiplicative()),
            ("coassociative", self.check_coassociative()),
        ]
    }

    pub fn verify(&self) -> Result<()> {
        for (_, r) in self.checks() {
            r?;
        }
        Ok(())
    }

    fn names(&self, w: usize, gs: &[usize]) -> String {
        let grp = &self.group;
        let inner: Vec<&str> = gs.iter().map(|&g| grp.element_name(g)).collect();
        format!("ω={} [{}]", grp.element_name(w), inner.join("|"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::cocycle_basis;
    use crate::groupoid::parse_group_spec;

    #[test]
    fn trivial_cocycle_gives_the_classical_coproduct() {
        let g = parse_group_spec("product_Z2:Z3").unwrap();
        let b = g.classifying_groupoid();
        let q = quasi_bialgebra(&g, &Cochain::zero(&b, 3, Twist::Pi).unwrap()).unwrap();
        assert!(q.coproduct.iter().flatten().all(|t| t.0.is_zero()));
        assert!(q.associator.iter().all(|t| t.0.is_zero()));
        assert_eq!(q.coproduct[0].len(), 3);
        q.verify().unwrap();
    }

    #[test]
    fn solver_cocycles_on_z4() {
        let g = parse_group_spec("cyclic:4:mod2").unwrap();
        let b = g.classifying_groupoid();
        let basis = cocycle_basis(&b, 3, Twist::Pi, 4).unwrap();
        assert!(!basis.cocycles.is_empty());
        for eta in &basis.cocycles {
            let q = quasi_bialgebra(&g, eta).unwrap();
            for (name, r) in q.checks() {
                assert!(r.is_ok(), "{name}: {r:?}");
            }
        }
    }
}
