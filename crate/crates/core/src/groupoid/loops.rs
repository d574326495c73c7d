use std::sync::Arc;

use super::{FiniteGroupoid, Functor, GradedGroupoid, MorId, ObjId};
use crate::error::{Error, Result};
use crate::phase::Sign;

/// Which conjugation action builds the loop groupoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LoopKind {
    /// Λ𝒢: all loops, ordinary conjugation.
    Plain,
    /// Λ_π Ĝ: even loops, ordinary conjugation by all of Ĝ.
    Quotient,
    /// Λ^ref_π Ĝ: even loops, Real conjugation `ω γ^{π(ω)} ω⁻¹`.
    Reflection,
}

/// A loop groupoid together with its bookkeeping back to the base.
///
/// Objects are loops `γ` of the base; the morphism `g` at object `γ` has
/// id `offset[γ] + local(g)`.
#[derive(Clone, Debug)]
pub struct LoopGroupoid {
    kind: LoopKind,
    base: GradedGroupoid,
    graded: GradedGroupoid,
    loop_of: Vec<MorId>,
    object_of_loop: Vec<Option<ObjId>>,
    offset: Vec<usize>,
    underlying: Vec<MorId>,
}

impl LoopGroupoid {
    pub fn plain(base: Arc<FiniteGroupoid>) -> Result<LoopGroupoid> {
        Self::build(LoopKind::Plain, GradedGroupoid::trivially_graded(base))
    }

    pub fn quotient(base: &GradedGroupoid) -> Result<LoopGroupoid> {
        Self::build(LoopKind::Quotient, base.clone())
    }

    pub fn reflection(base: &GradedGroupoid) -> Result<LoopGroupoid> {
        Self::build(LoopKind::Reflection, base.clone())
    }

    pub fn build(kind: LoopKind, base: GradedGroupoid) -> Result<LoopGroupoid> {
        let g = base.groupoid().clone();
        let mut loop_of = Vec::new();
        let mut object_of_loop = vec![None; g.n_morphisms()];
        for x in g.objects() {
            for gamma in g.automorphisms(x) {
                if kind != LoopKind::Plain && base.sign(gamma).is_odd() {
                    continue;
                }
                object_of_loop[gamma as usize] = Some(loop_of.len() as ObjId);
                loop_of.push(gamma);
            }
        }
        let act = |w: MorId, gamma: MorId| -> MorId {
            if kind == LoopKind::Reflection && base.sign(w).is_odd() {
                g.conjugate(w, g.inverse(gamma))
            } else {
                g.conjugate(w, gamma)
            }
        };
        let mut offset = Vec::with_capacity(loop_of.len());
        let mut underlying = Vec::new();
        let mut morphisms = Vec::new();
        for (o, &gamma) in loop_of.iter().enumerate() {
            offset.push(underlying.len());
            let x = g.source(gamma);
            for &w in g.out(x) {
                let tgt = object_of_loop[act(w, gamma) as usize].expect("conjugate of an even loop is even");
                morphisms.push((
                    format!("{}@[{}]", g.morphism_name(w), g.morphism_name(gamma)),
                    o as ObjId,
                    tgt,
                ));
                underlying.push(w);
            }
        }
        let object_names = loop_of.iter().map(|&m| g.morphism_name(m).to_string()).collect();
        let lg = FiniteGroupoid::new(object_names, morphisms, |m2, m1| {
            let w = g.compose_unchecked(underlying[m2 as usize], underlying[m1 as usize]);
            let o = lg_source(&offset, m1);
            (offset[o] + g.local(w)) as MorId
        })?;
        let grading: Vec<Sign> = underlying.iter().map(|&w| base.sign(w)).collect();
        let graded = GradedGroupoid::from_parts(Arc::new(lg), grading.into());
        Ok(LoopGroupoid {
            kind,
            base,
            graded,
            loop_of,
            object_of_loop,
            offset,
            underlying,
        })
    }

    pub fn kind(&self) -> LoopKind {
        self.kind
    }

    /// The groupoid whose loops these are.
    pub fn base(&self) -> &GradedGroupoid {
        &self.base
    }

    pub fn base_groupoid(&self) -> &Arc<FiniteGroupoid> {
        self.base.groupoid()
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        self.graded.groupoid()
    }

    /// The loop groupoid with grading `π(underlying morphism)`.
    pub fn graded(&self) -> &GradedGroupoid {
        &self.graded
    }

    /// The base loop sitting at an object.
    pub fn loop_of(&self, o: ObjId) -> MorId {
        self.loop_of[o as usize]
    }

    pub fn object_of_loop(&self, gamma: MorId) -> Option<ObjId> {
        self.object_of_loop[gamma as usize]
    }

    /// The base morphism underlying a loop-groupoid morphism.
    #[inline]
    pub fn underlying(&self, m: MorId) -> MorId {
        self.underlying[m as usize]
    }

    /// The morphism `w` based at object `o`.
    #[inline]
    pub fn morphism_at(&self, o: ObjId, w: MorId) -> MorId {
        debug_assert_eq!(self.base.groupoid().source(w), self.base.groupoid().source(self.loop_of(o)));
        (self.offset[o as usize] + self.base.groupoid().local(w)) as MorId
    }

    /// The target loop of `w` acting on `γ`.
    pub fn act(&self, w: MorId, gamma: MorId) -> MorId {
        let g = self.base.groupoid();
        if self.kind == LoopKind::Reflection && self.base.sign(w).is_odd() {
            g.conjugate(w, g.inverse(gamma))
        } else {
            g.conjugate(w, gamma)
        }
    }

    /// The functor Λ𝒢 → 𝒢 forgetting the loop.
    pub fn forget(&self) -> Functor {
        Functor {
            objects: self.loop_of.iter().map(|&m| self.base.groupoid().source(m)).collect(),
            morphisms: self.underlying.clone(),
        }
    }
}

fn lg_source(offset: &[usize], m: MorId) -> usize {
    offset.partition_point(|&o| o <= m as usize) - 1
}

/// The explicit double cover 𝒢 → Ĝ.
#[derive(Clone, Debug)]
pub struct DoubleCover {
    pub base: GradedGroupoid,
    pub groupoid: Arc<FiniteGroupoid>,
    pub proj: Functor,
    pub deck: Functor,
}

/// Objects `(x, ε)` numbered `2x + [ε = −1]`; the morphism `ω` starting on
/// sheet `ε` is numbered `2ω + [ε = −1]`.
pub fn double_cover(base: &GradedGroupoid) -> Result<DoubleCover> {
    let g = base.groupoid();
    let sheet = |e: usize| if e == 0 { "+" } else { "-" };
    let objects = g
        .objects()
        .flat_map(|x| (0..2).map(move |e| (x, e)))
        .map(|(x, e)| format!("{}{}", g.object_name(x), sheet(e)))
        .collect();
    let flip = |w: MorId, e: usize| if base.sign(w).is_odd() { 1 - e } else { e };
    let morphisms = g
        .morphisms()
        .flat_map(|w| (0..2).map(move |e| (w, e)))
        .map(|(w, e)| {
            (
                format!("{}{}", g.morphism_name(w), sheet(e)),
                2 * g.source(w) + e as u32,
                2 * g.target(w) + flip(w, e) as u32,
            )
        })
        .collect();
    let cover = FiniteGroupoid::new(objects, morphisms, |m2, m1| {
        let w = g.compose_unchecked(m2 / 2, m1 / 2);
        2 * w + m1 % 2
    })?;
    let proj = Functor {
        objects: cover.objects().map(|x| x / 2).collect(),
        morphisms: cover.morphisms().map(|m| m / 2).collect(),
    };
    let deck = Functor {
        objects: cover.objects().map(|x| x ^ 1).collect(),
        morphisms: cover.morphisms().map(|m| m ^ 1).collect(),
    };
    Ok(DoubleCover {
        base: base.clone(),
        groupoid: Arc::new(cover),
        proj,
        deck,
    })
}

impl DoubleCover {
    pub fn sheet(&self, x: ObjId) -> Sign {
        Sign::from_odd(x % 2 == 1)
    }

    pub fn lift_object(&self, x: ObjId, e: Sign) -> ObjId {
        2 * x + u32::from(e.is_odd())
    }

    /// The lift of `ω` starting on sheet `e`.
    pub fn lift(&self, w: MorId, e: Sign) -> MorId {
        2 * w + u32::from(e.is_odd())
    }

    /// The canonical functor Λ𝒢 → Λ_π Ĝ or Λ𝒢 → Λ^ref_π Ĝ: on objects
    /// `((x,ε), γ) ↦ (x, γ)` resp. `(x, γ^ε)`.
    pub fn loop_projection(&self, cover_loops: &LoopGroupoid, target: &LoopGroupoid) -> Result<Functor> {
        if cover_loops.kind() != LoopKind::Plain || !Arc::ptr_eq(cover_loops.base_groupoid(), &self.groupoid) {
            return Err(Error::Incompatible("expected the loop groupoid of this double cover".into()));
        }
        if !Arc::ptr_eq(target.base_groupoid(), self.base.groupoid()) {
            return Err(Error::Incompatible("target is not built on the covered groupoid".into()));
        }
        let base = self.base.groupoid();
        let reflect = match target.kind() {
            LoopKind::Quotient => false,
            LoopKind::Reflection => true,
            LoopKind::Plain => return Err(Error::Incompatible("target must be a quotient loop groupoid".into())),
        };
        let image_object = |o: ObjId| -> ObjId {
            let lifted = cover_loops.loop_of(o);
            let x = cover_loops.base_groupoid().source(lifted);
            let mut gamma = self.proj.map(lifted);
            if reflect && self.sheet(x).is_odd() {
                gamma = base.inverse(gamma);
            }
            target.object_of_loop(gamma).expect("loops of the cover are even")
        };
        let lg = cover_loops.groupoid();
        let objects: Vec<ObjId> = lg.objects().map(image_object).collect();
        let morphisms = lg
            .morphisms()
            .map(|m| {
                let o = objects[lg.source(m) as usize];
                target.morphism_at(o, self.proj.map(cover_loops.underlying(m)))
            })
            .collect();
        Ok(Functor { objects, morphisms })
    }

    /// The deck transformation of Λ𝒢: `((x,ε),γ) ↦ ((x,−ε),γ)`, or with
    /// `reflect` the map `((x,ε),γ) ↦ ((x,−ε),γ⁻¹)`.
    pub fn loop_deck(&self, cover_loops: &LoopGroupoid, reflect: bool) -> Functor {
        let cg = cover_loops.base_groupoid();
        let lg = cover_loops.groupoid();
        let objects: Vec<ObjId> = lg
            .objects()
            .map(|o| {
                let mut gamma = self.deck.map(cover_loops.loop_of(o));
                if reflect {
                    gamma = cg.inverse(gamma);
                }
                cover_loops.object_of_loop(gamma).unwrap()
            })
            .collect();
        let morphisms = lg
            .morphisms()
            .map(|m| cover_loops.morphism_at(objects[lg.source(m) as usize], self.deck.map(cover_loops.underlying(m))))
            .collect();
        Functor { objects, morphisms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{parse_group_spec, ComponentClass};

    fn bg(s: &str) -> GradedGroupoid {
        parse_group_spec(s).unwrap().classifying_groupoid()
    }

    #[test]
    fn double_cover_examples() {
        let dc = double_cover(&bg(r#"{"family":"cyclic","n":2,"grading":[1,-1]}"#)).unwrap();
        assert_eq!((dc.groupoid.n_objects(), dc.groupoid.n_morphisms()), (2, 4));
        assert_eq!(dc.groupoid.components().len(), 1);
        let dc = double_cover(&bg("cyclic:4:mod2")).unwrap();
        assert_eq!(dc.groupoid.n_morphisms(), 8);
        assert_eq!(dc.groupoid.components().len(), 1);
        assert_eq!(dc.groupoid.automorphisms(0).count(), 2);
        let trivial = GradedGroupoid::trivially_graded(dc.groupoid.clone());
        assert_eq!(trivial.components()[0].class, Some(ComponentClass::Even));
        let dc = double_cover(&bg("cyclic:3:trivial")).unwrap();
        assert_eq!(dc.groupoid.components().len(), 2);
    }

    #[test]
    fn double_cover_functors() {
        for s in ["cyclic:4:mod2", "product_Z2:S3", "dihedral:4:reflection"] {
            let b = bg(s);
            let dc = double_cover(&b).unwrap();
            dc.groupoid.check_axioms().unwrap();
            dc.proj.check(&dc.groupoid, b.groupoid()).unwrap();
            dc.deck.check(&dc.groupoid, &dc.groupoid).unwrap();
            assert_eq!(dc.deck.after(&dc.deck), Functor::identity(&dc.groupoid));
            assert_eq!(dc.proj.after(&dc.deck), dc.proj);
        }
    }

    #[test]
    fn loop_groupoid_examples() {
        let l = LoopGroupoid::plain(bg("cyclic:2").groupoid().clone()).unwrap();
        assert_eq!((l.groupoid().n_objects(), l.groupoid().n_morphisms()), (2, 4));
        let l = LoopGroupoid::plain(bg("symmetric:3").groupoid().clone()).unwrap();
        let mut auts: Vec<usize> = l.groupoid().components().iter().map(|c| c.automorphisms.len()).collect();
        auts.sort();
        assert_eq!(auts, vec![2, 3, 6]);
        let z2 = parse_group_spec("cyclic:2").unwrap();
        let contractible = z2.action_groupoid(2, |g, x| (g + x) % 2).unwrap();
        let l = LoopGroupoid::plain(contractible.groupoid().clone()).unwrap();
        assert_eq!(l.groupoid().n_objects(), 2);
        assert_eq!(l.groupoid().components().len(), 1);
    }

    #[test]
    fn quotient_loop_examples() {
        let q = LoopGroupoid::quotient(&bg("cyclic:4:mod2")).unwrap();
        assert_eq!((q.groupoid().n_objects(), q.groupoid().n_morphisms()), (2, 8));
        let q = LoopGroupoid::quotient(&bg("product_Z2:S3")).unwrap();
        assert_eq!(q.groupoid().components().len(), 3);
        let r = LoopGroupoid::reflection(&bg("cyclic:4:mod2")).unwrap();
        for m in r.groupoid().morphisms() {
            assert_eq!(r.groupoid().source(m), r.groupoid().target(m));
        }
        let r = LoopGroupoid::reflection(&bg("product_Z2:Z3")).unwrap();
        let comps = r.graded().components();
        assert_eq!(comps.len(), 2);
        let classes: Vec<_> = comps.iter().map(|c| (c.objects.len(), c.class.unwrap())).collect();
        assert!(classes.contains(&(1, ComponentClass::OddLoop)));
        assert!(classes.contains(&(2, ComponentClass::Paired)));
        let t = LoopGroupoid::reflection(&bg("cyclic:3")).unwrap();
        let p = LoopGroupoid::plain(bg("cyclic:3").groupoid().clone()).unwrap();
        assert_eq!(t.groupoid().n_morphisms(), p.groupoid().n_morphisms());
    }

    #[test]
    fn loop_objects_count_automorphisms() {
        let b = bg("dihedral:4:reflection");
        let dc = double_cover(&b).unwrap();
        let l = LoopGroupoid::plain(dc.groupoid.clone()).unwrap();
        let total: usize = dc.groupoid.objects().map(|x| dc.groupoid.automorphisms(x).count()).sum();
        assert_eq!(l.groupoid().n_objects(), total);
        l.groupoid().check_axioms().unwrap();
    }

    #[test]
    fn canonical_functors_to_quotients() {
        for s in ["cyclic:4:mod2", "product_Z2:Z3", "product_Z2:S3", "dihedral:4:reflection"] {
            let b = bg(s);
            let dc = double_cover(&b).unwrap();
            let lc = LoopGroupoid::plain(dc.groupoid.clone()).unwrap();
            for (target, reflect) in [
                (LoopGroupoid::quotient(&b).unwrap(), false),
                (LoopGroupoid::reflection(&b).unwrap(), true),
            ] {
                let p = dc.loop_projection(&lc, &target).unwrap();
                p.check(lc.groupoid(), target.groupoid()).unwrap();
                let mut fibre = vec![0; target.groupoid().n_objects()];
                for o in lc.groupoid().objects() {
                    fibre[p.map_object(o) as usize] += 1;
                }
                assert!(fibre.iter().all(|&k| k == 2));
                let sigma = dc.loop_deck(&lc, reflect);
                sigma.check(lc.groupoid(), lc.groupoid()).unwrap();
                assert_eq!(p.after(&sigma), p);
            }
        }
    }
}
