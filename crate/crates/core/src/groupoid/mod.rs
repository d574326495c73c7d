//! Finite groupoids with dense ids, ℤ₂-gradings, functors and component analysis.

mod group;
mod loops;

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::cochain::{Cochain, Twist};
use crate::error::{Error, Result};
use crate::phase::{PhaseSum, Rational, Sign};

pub use group::{parse_group_spec, AbelianCoords, GradedGroup, Grading, GradingField, GroupSpec};
pub use loops::{double_cover, DoubleCover, LoopGroupoid, LoopKind};

pub type ObjId = u32;
pub type MorId = u32;

/// A finite groupoid with a flat composition table.
///
/// Morphisms leaving an object are numbered locally; `compose(m2, m1)` is a
/// single indexed load into the block of `m1`.
#[derive(Debug)]
pub struct FiniteGroupoid {
    object_names: Vec<String>,
    morphism_names: Vec<String>,
    source: Vec<ObjId>,
    target: Vec<ObjId>,
    identity: Vec<MorId>,
    inverse: Vec<MorId>,
    out: Vec<Vec<MorId>>,
    local: Vec<u32>,
    comp_offset: Vec<usize>,
    comp: Vec<MorId>,
    radix: usize,
    morphism_index: HashMap<String, MorId>,
    object_index: HashMap<String, ObjId>,
}

impl FiniteGroupoid {
    /// Builds a groupoid from morphisms `(name, source, target)` and a
    /// composition rule `compose(m2, m1)`, called on every composable pair.
    /// Identities and inverses are located from the table.
    pub fn new(
        object_names: Vec<String>,
        morphisms: Vec<(String, ObjId, ObjId)>,
        compose: impl Fn(MorId, MorId) -> MorId,
    ) -> Result<FiniteGroupoid> {
        let n_obj = object_names.len();
        let n_mor = morphisms.len();
        if n_mor >= u32::MAX as usize || n_obj >= u32::MAX as usize {
            return Err(Error::InvalidGroupoid("too many cells".into()));
        }
        let mut source = Vec::with_capacity(n_mor);
        let mut target = Vec::with_capacity(n_mor);
        let mut morphism_names = Vec::with_capacity(n_mor);
        let mut out = vec![Vec::new(); n_obj];
        let mut local = Vec::with_capacity(n_mor);
        for (m, (name, s, t)) in morphisms.into_iter().enumerate() {
            if s as usize >= n_obj || t as usize >= n_obj {
                return Err(Error::InvalidGroupoid(format!("morphism {name} has an unknown endpoint")));
            }
            local.push(out[s as usize].len() as u32);
            out[s as usize].push(m as MorId);
            source.push(s);
            target.push(t);
            morphism_names.push(name);
        }
        let radix = out.iter().map(Vec::len).max().unwrap_or(0);
        let mut comp_offset = Vec::with_capacity(n_mor);
        let mut comp = Vec::new();
        for m1 in 0..n_mor {
            comp_offset.push(comp.len());
            let y = target[m1] as usize;
            for &m2 in &out[y] {
                let m = compose(m2, m1 as MorId);
                if m as usize >= n_mor || source[m as usize] != source[m1] || target[m as usize] != target[m2 as usize] {
                    return Err(Error::InvalidGroupoid(format!(
                        "composite of {} and {} has wrong endpoints",
                        morphism_names[m2 as usize], morphism_names[m1]
                    )));
                }
                comp.push(m);
            }
        }
        let mut g = FiniteGroupoid {
            morphism_index: morphism_names.iter().enumerate().map(|(i, s)| (s.clone(), i as MorId)).collect(),
            object_index: object_names.iter().enumerate().map(|(i, s)| (s.clone(), i as ObjId)).collect(),
            object_names,
            morphism_names,
            source,
            target,
            identity: Vec::new(),
            inverse: Vec::new(),
            out,
            local,
            comp_offset,
            comp,
            radix,
        };
        if g.morphism_index.len() != n_mor || g.object_index.len() != n_obj {
            return Err(Error::InvalidGroupoid("names are not unique".into()));
        }
        let mut identity = Vec::with_capacity(n_obj);
        for x in 0..n_obj {
            let id = g.out[x]
                .iter()
                .copied()
                .find(|&m| g.target(m) as usize == x && g.compose_unchecked(m, m) == m)
                .ok_or_else(|| Error::InvalidGroupoid(format!("object {} has no identity", g.object_names[x])))?;
            identity.push(id);
        }
        g.identity = identity;
        let mut inverse = Vec::with_capacity(n_mor);
        for m in 0..n_mor as MorId {
            let (s, t) = (g.source(m), g.target(m));
            let inv = g.out[t as usize]
                .iter()
                .copied()
                .find(|&w| g.target(w) == s && g.compose_unchecked(w, m) == g.identity[s as usize])
                .ok_or_else(|| Error::InvalidGroupoid(format!("{} has no inverse", g.morphism_names[m as usize])))?;
            inverse.push(inv);
        }
        g.inverse = inverse;
        Ok(g)
    }

    pub fn n_objects(&self) -> usize {
        self.object_names.len()
    }

    pub fn n_morphisms(&self) -> usize {
        self.morphism_names.len()
    }

    pub fn source(&self, m: MorId) -> ObjId {
        self.source[m as usize]
    }

    pub fn target(&self, m: MorId) -> ObjId {
        self.target[m as usize]
    }

    pub fn identity(&self, x: ObjId) -> MorId {
        self.identity[x as usize]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identity[self.source(m) as usize] == m
    }

    pub fn inverse(&self, m: MorId) -> MorId {
        self.inverse[m as usize]
    }

    /// Morphisms with source `x`, in local order.
    pub fn out(&self, x: ObjId) -> &[MorId] {
        &self.out[x as usize]
    }

    /// Position of `m` among the morphisms leaving its source.
    pub fn local(&self, m: MorId) -> usize {
        self.local[m as usize] as usize
    }

    /// The largest number of morphisms leaving one object.
    pub fn radix(&self) -> usize {
        self.radix
    }

    /// `m2 ∘ m1`, or `None` when `target(m1) != source(m2)`.
    pub fn compose(&self, m2: MorId, m1: MorId) -> Option<MorId> {
        (self.target(m1) == self.source(m2)).then(|| self.compose_unchecked(m2, m1))
    }

    #[inline]
    pub fn compose_unchecked(&self, m2: MorId, m1: MorId) -> MorId {
        debug_assert_eq!(self.target(m1), self.source(m2));
        self.comp[self.comp_offset[m1 as usize] + self.local[m2 as usize] as usize]
    }

    /// Conjugate `g γ g⁻¹` of a loop `γ` at the source of `g`.
    pub fn conjugate(&self, g: MorId, gamma: MorId) -> MorId {
        let t = self.compose_unchecked(g, gamma);
        self.compose_unchecked(t, self.inverse(g))
    }

    /// `γ^k` for a loop `γ`.
    pub fn power(&self, gamma: MorId, k: i64) -> MorId {
        let base = if k < 0 { self.inverse(gamma) } else { gamma };
        let mut acc = self.identity(self.source(gamma));
        for _ in 0..k.unsigned_abs() {
            acc = self.compose_unchecked(base, acc);
        }
        acc
    }

    /// Composite `g_n ∘ … ∘ g_1` of a tuple listed outermost first.
    pub fn compose_tuple(&self, tuple: &[MorId]) -> Option<MorId> {
        let (&first, rest) = tuple.split_last()?;
        let mut acc = first;
        for &m in rest.iter().rev() {
            acc = self.compose(m, acc)?;
        }
        Some(acc)
    }

    /// Whether `target(t[i+1]) == source(t[i])` throughout.
    pub fn is_composable(&self, tuple: &[MorId]) -> bool {
        tuple.windows(2).all(|w| self.target(w[1]) == self.source(w[0]))
    }

    pub fn automorphisms(&self, x: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.out(x).iter().copied().filter(move |&m| self.target(m) == x)
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.out(x).iter().copied().filter(move |&m| self.target(m) == y)
    }

    pub fn object_name(&self, x: ObjId) -> &str {
        &self.object_names[x as usize]
    }

    pub fn morphism_name(&self, m: MorId) -> &str {
        &self.morphism_names[m as usize]
    }

    pub fn morphism_by_name(&self, name: &str) -> Option<MorId> {
        self.morphism_index.get(name).copied()
    }

    pub fn object_by_name(&self, name: &str) -> Option<ObjId> {
        self.object_index.get(name).copied()
    }

    pub fn morphisms(&self) -> std::ops::Range<MorId> {
        0..self.n_morphisms() as MorId
    }

    pub fn objects(&self) -> std::ops::Range<ObjId> {
        0..self.n_objects() as ObjId
    }

    /// Exhaustive check of the category axioms.
    pub fn check_axioms(&self) -> Result<()> {
        let bad = |what: &str, w: String| Err(Error::InvalidGroupoid(format!("{what} fails at {w}")));
        for m in self.morphisms() {
            let (s, t) = (self.source(m), self.target(m));
            if self.compose_unchecked(m, self.identity(s)) != m || self.compose_unchecked(self.identity(t), m) != m {
                return bad("identity law", self.morphism_name(m).to_string());
            }
            let inv = self.inverse(m);
            if self.compose_unchecked(inv, m) != self.identity(s) || self.compose_unchecked(m, inv) != self.identity(t) {
                return bad("inverse law", self.morphism_name(m).to_string());
            }
        }
        for m1 in self.morphisms() {
            for &m2 in self.out(self.target(m1)) {
                let m21 = self.compose_unchecked(m2, m1);
                for &m3 in self.out(self.target(m2)) {
                    let lhs = self.compose_unchecked(self.compose_unchecked(m3, m2), m1);
                    let rhs = self.compose_unchecked(m3, m21);
                    if lhs != rhs {
                        return bad(
                            "associativity",
                            format!(
                                "({}, {}, {})",
                                self.morphism_name(m3),
                                self.morphism_name(m2),
                                self.morphism_name(m1)
                            ),
                        );
                    }
                }
            }
        }
        Ok(())
    }

    /// Connected components, each with its first object as base.
    pub fn components(&self) -> Vec<Component> {
        let mut comp_of = vec![usize::MAX; self.n_objects()];
        let mut comps = Vec::new();
        for x in self.objects() {
            if comp_of[x as usize] != usize::MAX {
                continue;
            }
            let idx = comps.len();
            let mut objects = Vec::new();
            let mut queue = VecDeque::from([x]);
            comp_of[x as usize] = idx;
            while let Some(y) = queue.pop_front() {
                objects.push(y);
                for &m in self.out(y) {
                    let z = self.target(m);
                    if comp_of[z as usize] == usize::MAX {
                        comp_of[z as usize] = idx;
                        queue.push_back(z);
                    }
                }
            }
            objects.sort_unstable();
            comps.push(Component {
                base: x,
                automorphisms: self.automorphisms(x).collect(),
                objects,
                class: None,
            });
        }
        comps
    }

    /// Object → index into [`FiniteGroupoid::components`].
    pub fn component_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.n_objects()];
        for (i, c) in self.components().iter().enumerate() {
            for &x in &c.objects {
                idx[x as usize] = i;
            }
        }
        idx
    }

    /// The full subgroupoid on `keep` and its inclusion functor.
    pub fn full_subgroupoid(&self, keep: &[ObjId]) -> Result<(FiniteGroupoid, Functor)> {
        let mut new_obj = vec![None; self.n_objects()];
        for (i, &x) in keep.iter().enumerate() {
            new_obj[x as usize] = Some(i as ObjId);
        }
        let mut kept = Vec::new();
        let mut new_mor = vec![u32::MAX; self.n_morphisms()];
        for &x in keep {
            for &m in self.out(x) {
                if new_obj[self.target(m) as usize].is_some() {
                    new_mor[m as usize] = kept.len() as MorId;
                    kept.push(m);
                }
            }
        }
        let g = FiniteGroupoid::new(
            keep.iter().map(|&x| self.object_name(x).to_string()).collect(),
            kept.iter()
                .map(|&m| {
                    (
                        self.morphism_name(m).to_string(),
                        new_obj[self.source(m) as usize].unwrap(),
                        new_obj[self.target(m) as usize].unwrap(),
                    )
                })
                .collect(),
            |a, b| new_mor[self.compose_unchecked(kept[a as usize], kept[b as usize]) as usize],
        )?;
        let inc = Functor {
            objects: keep.to_vec(),
            morphisms: kept,
        };
        Ok((g, inc))
    }

    pub fn dump(&self, grading: Option<&[Sign]>) -> GroupoidDump {
        let mut compose = Vec::new();
        for m1 in self.morphisms() {
            for &m2 in self.out(self.target(m1)) {
                compose.push([m2, m1, self.compose_unchecked(m2, m1)]);
            }
        }
        GroupoidDump {
            objects: self.object_names.clone(),
            morphisms: self
                .morphisms()
                .map(|m| MorphismDump {
                    id: m,
                    name: self.morphism_name(m).to_string(),
                    source: self.source(m),
                    target: self.target(m),
                })
                .collect(),
            compose,
            identity: self.identity.clone(),
            inverse: self.inverse.clone(),
            grading: grading.map(|g| g.iter().map(|s| s.to_i64()).collect()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MorphismDump {
    pub id: MorId,
    pub name: String,
    pub source: ObjId,
    pub target: ObjId,
}

/// Serialized form of a groupoid.
#[derive(Debug, Serialize)]
pub struct GroupoidDump {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDump>,
    /// Triples `[m2, m1, m2∘m1]`.
    pub compose: Vec<[MorId; 3]>,
    pub identity: Vec<MorId>,
    pub inverse: Vec<MorId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading: Option<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComponentClass {
    /// Some object carries an odd automorphism.
    OddLoop,
    /// Odd morphisms exist, odd loops do not.
    Paired,
    /// No odd morphisms at all.
    Even,
}

#[derive(Clone, Debug)]
pub struct Component {
    pub objects: Vec<ObjId>,
    pub base: ObjId,
    pub automorphisms: Vec<MorId>,
    pub class: Option<ComponentClass>,
}

/// A functor given by its action on ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    pub objects: Vec<ObjId>,
    pub morphisms: Vec<MorId>,
}

impl Functor {
    pub fn identity(g: &FiniteGroupoid) -> Functor {
        Functor {
            objects: g.objects().collect(),
            morphisms: g.morphisms().collect(),
        }
    }

    #[inline]
    pub fn map(&self, m: MorId) -> MorId {
        self.morphisms[m as usize]
    }

    pub fn map_object(&self, x: ObjId) -> ObjId {
        self.objects[x as usize]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Functor) -> Functor {
        Functor {
            objects: first.objects.iter().map(|&x| self.map_object(x)).collect(),
            morphisms: first.morphisms.iter().map(|&m| self.map(m)).collect(),
        }
    }

    /// Checks endpoints, identities and composition exhaustively.
    pub fn check(&self, dom: &FiniteGroupoid, cod: &FiniteGroupoid) -> Result<()> {
        let bad = |w: String| Err(Error::NotAFunctor(w));
        if self.objects.len() != dom.n_objects() || self.morphisms.len() != dom.n_morphisms() {
            return bad("size mismatch".into());
        }
        if self.objects.iter().any(|&x| x as usize >= cod.n_objects())
            || self.morphisms.iter().any(|&m| m as usize >= cod.n_morphisms())
        {
            return bad("image out of range".into());
        }
        for m in dom.morphisms() {
            let fm = self.map(m);
            if cod.source(fm) != self.map_object(dom.source(m)) || cod.target(fm) != self.map_object(dom.target(m)) {
                return bad(format!("endpoints of {}", dom.morphism_name(m)));
            }
        }
        for x in dom.objects() {
            if self.map(dom.identity(x)) != cod.identity(self.map_object(x)) {
                return bad(format!("identity at {}", dom.object_name(x)));
            }
        }
        for m1 in dom.morphisms() {
            for &m2 in dom.out(dom.target(m1)) {
                let lhs = self.map(dom.compose_unchecked(m2, m1));
                if cod.compose(self.map(m2), self.map(m1)) != Some(lhs) {
                    return bad(format!("composite of {} and {}", dom.morphism_name(m2), dom.morphism_name(m1)));
                }
            }
        }
        Ok(())
    }
}

/// A groupoid together with a grading functor to Bℤ₂.
#[derive(Clone, Debug)]
pub struct GradedGroupoid {
    groupoid: Arc<FiniteGroupoid>,
    grading: Arc<[Sign]>,
}

impl GradedGroupoid {
    pub fn new(groupoid: Arc<FiniteGroupoid>, grading: Vec<Sign>) -> Result<GradedGroupoid> {
        if grading.len() != groupoid.n_morphisms() {
            return Err(Error::InvalidGroupoid("grading has the wrong length".into()));
        }
        for m1 in groupoid.morphisms() {
            for &m2 in groupoid.out(groupoid.target(m1)) {
                let m = groupoid.compose_unchecked(m2, m1);
                if grading[m as usize] != grading[m2 as usize] * grading[m1 as usize] {
                    return Err(Error::InvalidGroupoid(format!(
                        "grading is not multiplicative at ({}, {})",
                        groupoid.morphism_name(m2),
                        groupoid.morphism_name(m1)
                    )));
                }
            }
        }
        Ok(GradedGroupoid {
            groupoid,
            grading: grading.into(),
        })
    }

    pub fn trivially_graded(groupoid: Arc<FiniteGroupoid>) -> GradedGroupoid {
        let grading: Arc<[Sign]> = vec![Sign::Plus; groupoid.n_morphisms()].into();
        GradedGroupoid { groupoid, grading }
    }

    pub(crate) fn from_parts(groupoid: Arc<FiniteGroupoid>, grading: Arc<[Sign]>) -> GradedGroupoid {
        GradedGroupoid { groupoid, grading }
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn grading(&self) -> &Arc<[Sign]> {
        &self.grading
    }

    #[inline]
    pub fn sign(&self, m: MorId) -> Sign {
        self.grading[m as usize]
    }

    /// Every object is the source of an odd morphism.
    pub fn is_strongly_nontrivial(&self) -> bool {
        self.groupoid
            .objects()
            .all(|x| self.groupoid.out(x).iter().any(|&m| self.sign(m).is_odd()))
    }

    /// Components with their parity classification.
    pub fn components(&self) -> Vec<Component> {
        let g = &self.groupoid;
        let mut comps = g.components();
        for c in &mut comps {
            let odd_loop = c.objects.iter().any(|&x| g.automorphisms(x).any(|m| self.sign(m).is_odd()));
            let odd_any = c.objects.iter().any(|&x| g.out(x).iter().any(|&m| self.sign(m).is_odd()));
            c.class = Some(if odd_loop {
                ComponentClass::OddLoop
            } else if odd_any {
                ComponentClass::Paired
            } else {
                ComponentClass::Even
            });
            // an ODD_LOOP component is based where an odd loop lives
            if odd_loop {
                c.base = *c
                    .objects
                    .iter()
                    .find(|&&x| g.automorphisms(x).any(|m| self.sign(m).is_odd()))
                    .unwrap();
                c.automorphisms = g.automorphisms(c.base).collect();
            }
        }
        comps
    }

    /// Grading pulled back along a functor into this groupoid.
    pub fn pullback_grading(&self, f: &Functor) -> Vec<Sign> {
        f.morphisms.iter().map(|&m| self.sign(m)).collect()
    }
}

/// `∫β = Σ_{components} β(base)/|Aut(base)|` for a closed degree-0 cochain.
pub fn integrate(beta: &Cochain) -> Result<PhaseSum> {
    check_integrand(beta)?;
    let g = beta.groupoid();
    for m in g.morphisms() {
        if beta.object_value(g.source(m)) != beta.object_value(g.target(m)) {
            return Err(Error::NotClosed {
                witness: g.morphism_name(m).to_string(),
            });
        }
    }
    let mut total = PhaseSum::zero();
    for c in g.components() {
        let w = Rational::new(1, c.automorphisms.len() as i64);
        total += &PhaseSum::term(w, beta.object_value(c.base));
    }
    Ok(total)
}

/// `Σ_{x ∈ Obj} β(x)/|x→|`, defined without any closedness assumption.
pub fn integrate_over_objects(beta: &Cochain) -> Result<PhaseSum> {
    check_integrand(beta)?;
    let g = beta.groupoid();
    let mut total = PhaseSum::zero();
    for x in g.objects() {
        let w = Rational::new(1, g.out(x).len() as i64);
        total += &PhaseSum::term(w, beta.object_value(x));
    }
    Ok(total)
}

fn check_integrand(beta: &Cochain) -> Result<()> {
    if beta.degree() != 0 {
        return Err(Error::Degree(beta.degree()));
    }
    if beta.twist() != Twist::None {
        return Err(Error::TwistMismatch("integrand must be untwisted".into()));
    }
    Ok(())
}

/// `∫1 = Σ 1/|Aut|` as an exact rational.
pub fn groupoid_cardinality(g: &FiniteGroupoid) -> Rational {
    g.components()
        .iter()
        .map(|c| Rational::new(1, c.automorphisms.len() as i64))
        .fold(Rational::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(s: &str) -> GradedGroup {
        parse_group_spec(s).unwrap()
    }

    #[test]
    fn classifying_groupoid_shape() {
        let g = group("cyclic:4:mod2");
        let b = g.classifying_groupoid();
        assert_eq!(b.groupoid().n_objects(), 1);
        assert_eq!(b.groupoid().n_morphisms(), 4);
        let odd = b.groupoid().morphisms().filter(|&m| b.sign(m).is_odd()).count();
        assert_eq!(odd, 2);
        b.groupoid().check_axioms().unwrap();
        let comps = b.components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].class, Some(ComponentClass::OddLoop));
    }

    #[test]
    fn action_groupoids() {
        let z2 = group("cyclic:2:trivial");
        let pt = z2.action_groupoid(1, |_, x| x).unwrap();
        assert_eq!((pt.groupoid().n_objects(), pt.groupoid().n_morphisms()), (1, 2));
        let tr = z2.action_groupoid(2, |g, x| (g + x) % 2).unwrap();
        let t = tr.groupoid();
        assert_eq!((t.n_objects(), t.n_morphisms()), (2, 4));
        for x in t.objects() {
            for y in t.objects() {
                assert_eq!(t.hom(x, y).count(), 1);
            }
        }
        t.check_axioms().unwrap();
        assert!(z2.action_groupoid(2, |_, _| 0).is_err());
    }

    #[test]
    fn cardinality_is_equivalence_invariant() {
        let s3 = group("symmetric:3:trivial");
        let b = s3.classifying_groupoid();
        // S3 acting on itself by left translation: a contractible model
        let n = s3.order();
        let torsor = s3.action_groupoid(n, |g, x| s3.mul(g, x)).unwrap();
        assert_eq!(groupoid_cardinality(b.groupoid()), Rational::new(1, 6));
        assert_eq!(groupoid_cardinality(torsor.groupoid()), Rational::from_integer(1));
        // S3 acting on S3/A3
        let cosets = s3.action_groupoid(2, |g, x| x ^ usize::from(s3.sign(g).is_odd())).unwrap();
        assert_eq!(groupoid_cardinality(cosets.groupoid()), Rational::new(1, 3));
    }

    #[test]
    fn full_subgroupoid_inclusion_is_functor() {
        let g = group("cyclic:4:mod2");
        let dc = double_cover(&g.classifying_groupoid()).unwrap();
        let (sub, inc) = dc.groupoid.full_subgroupoid(&[0]).unwrap();
        inc.check(&sub, &dc.groupoid).unwrap();
        assert_eq!(sub.n_morphisms(), 2);
    }
}
