//! Normalized (twisted) cochains on finite groupoids.
//!
//! Tuples are listed outermost first: `[g_n, …, g_1]` is the chain
//! `x₁ →g₁ x₂ → ⋯ →g_n x_{n+1}`, so `t[0]` is applied last.

mod builtin;
mod io;
mod snf;
mod solver;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, Functor, GradedGroupoid, MorId, ObjId};
use crate::phase::{Phase, Sign};

pub use builtin::{builtin_cocycle, quaternionic, BuiltinSpec};
pub use io::{CocycleFile, CocycleSource, CocycleValue};
pub use snf::{crt_idempotent, invariant_factors, prime_power_parts, SnfMod};
pub use solver::{cocycle_basis, is_coboundary, CocycleBasis};

/// Longest tuple a table may be keyed by.
pub const MAX_DEGREE: usize = 6;

static TABLE_BUDGET: AtomicU64 = AtomicU64::new(1 << 25);

/// Caps the number of entries any single cochain table may allocate.
pub fn set_table_budget(entries: u64) {
    TABLE_BUDGET.store(entries.max(1), Ordering::Relaxed);
}

pub fn table_budget() -> u64 {
    TABLE_BUDGET.load(Ordering::Relaxed)
}

/// Dense table size for degree-`n` cochains on `g`.
pub fn table_size(g: &FiniteGroupoid, n: usize) -> u128 {
    if n == 0 {
        g.n_objects() as u128
    } else {
        (g.n_morphisms() as u128).saturating_mul((g.radix() as u128).saturating_pow(n as u32 - 1))
    }
}

fn check_budget(g: &FiniteGroupoid, n: usize) -> Result<usize> {
    if n > MAX_DEGREE {
        return Err(Error::Degree(n));
    }
    let required = table_size(g, n);
    let budget = table_budget() as u128;
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    Ok(required as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Twist {
    None,
    Pi,
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Twist::None => "none",
            Twist::Pi => "pi",
        })
    }
}

/// A normalized cochain with a dense table over composable tuples.
///
/// Entry `[g_n, …, g_1]` lives at `g_1·R^{n−1} + Σ local(g_k)·R^{n−k}` where
/// `R` is the largest out-degree; unreachable slots stay zero.
#[derive(Clone)]
pub struct Cochain {
    space: GradedGroupoid,
    degree: usize,
    twist: Twist,
    values: Vec<Phase>,
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Cochain) -> bool {
        std::sync::Arc::ptr_eq(self.space.groupoid(), other.space.groupoid())
            && self.degree == other.degree
            && self.twist == other.twist
            && self.values == other.values
    }
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cochain(degree {}, twist {}, {} nonzero)", self.degree, self.twist, self.support_size())
    }
}

impl Cochain {
    pub fn zero(space: &GradedGroupoid, degree: usize, twist: Twist) -> Result<Cochain> {
        let size = check_budget(space.groupoid(), degree)?;
        Ok(Cochain {
            space: space.clone(),
            degree,
            twist,
            values: vec![Phase::ZERO; size],
        })
    }

    /// Degree-0 cochain from a function on objects.
    pub fn from_objects(space: &GradedGroupoid, twist: Twist, f: impl Fn(ObjId) -> Phase) -> Result<Cochain> {
        let mut c = Self::zero(space, 0, twist)?;
        for x in space.groupoid().objects() {
            c.values[x as usize] = f(x);
        }
        Ok(c)
    }

    /// Evaluates `f` on every composable tuple of length `degree ≥ 1`,
    /// degenerate ones included.
    pub fn from_fn(
        space: &GradedGroupoid,
        degree: usize,
        twist: Twist,
        f: impl Fn(&[MorId]) -> Phase + Sync,
    ) -> Result<Cochain> {
        if degree == 0 {
            return Err(Error::Degree(0));
        }
        let mut c = Self::zero(space, degree, twist)?;
        let g = space.groupoid().as_ref();
        let block = g.radix().pow(degree as u32 - 1);
        if block == 0 {
            return Ok(c);
        }
        c.values.par_chunks_mut(block).enumerate().for_each(|(m1, chunk)| {
            let mut buf = [0 as MorId; MAX_DEGREE];
            let t = &mut buf[..degree];
            t[degree - 1] = m1 as MorId;
            fill_paths(g, t, 1, 0, &mut |t, pos| chunk[pos] = f(t));
        });
        Ok(c)
    }

    pub fn space(&self) -> &GradedGroupoid {
        &self.space
    }

    pub fn groupoid(&self) -> &std::sync::Arc<FiniteGroupoid> {
        self.space.groupoid()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn twist(&self) -> Twist {
        self.twist
    }

    /// The sign by which the outermost morphism acts.
    #[inline]
    pub fn kappa(&self, m: MorId) -> Sign {
        match self.twist {
            Twist::None => Sign::Plus,
            Twist::Pi => self.space.sign(m),
        }
    }

    #[inline]
    fn index(&self, t: &[MorId]) -> usize {
        let g = self.space.groupoid();
        let r = g.radix();
        let n = t.len();
        let mut idx = t[n - 1] as usize;
        for &m in t[..n - 1].iter().rev() {
            idx = idx * r + g.local(m);
        }
        idx
    }

    /// Value on a composable tuple of length `degree ≥ 1`.
    #[inline]
    pub fn value(&self, t: &[MorId]) -> Phase {
        debug_assert_eq!(t.len(), self.degree);
        debug_assert!(self.space.groupoid().is_composable(t));
        self.values[self.index(t)]
    }

    /// Value of a degree-0 cochain.
    #[inline]
    pub fn object_value(&self, x: ObjId) -> Phase {
        debug_assert_eq!(self.degree, 0);
        self.values[x as usize]
    }

    /// Value on a possibly empty tuple starting at `start`.
    #[inline]
    pub fn face_value(&self, t: &[MorId], start: ObjId) -> Phase {
        if t.is_empty() {
            self.object_value(start)
        } else {
            self.value(t)
        }
    }

    pub fn set(&mut self, t: &[MorId], p: Phase) {
        assert!(t.len() == self.degree && self.space.groupoid().is_composable(t));
        let i = self.index(t);
        self.values[i] = p;
    }

    pub fn set_object(&mut self, x: ObjId, p: Phase) {
        assert_eq!(self.degree, 0);
        self.values[x as usize] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|p| p.is_zero())
    }

    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|p| !p.is_zero()).count()
    }

    /// Calls `f` on every composable tuple of this cochain's degree.
    pub fn for_each_tuple(&self, f: impl FnMut(&[MorId])) {
        for_each_tuple(self.space.groupoid(), self.degree, f);
    }

    /// Nonzero entries in enumeration order.
    pub fn entries(&self) -> Vec<(Vec<MorId>, Phase)> {
        let mut out = Vec::new();
        if self.degree == 0 {
            for x in self.space.groupoid().objects() {
                out.push((vec![x], self.object_value(x)));
            }
            out.retain(|(_, p)| !p.is_zero());
            return out;
        }
        self.for_each_tuple(|t| {
            let p = self.value(t);
            if !p.is_zero() {
                out.push((t.to_vec(), p));
            }
        });
        out
    }

    /// Whether every tuple containing an identity maps to zero.
    pub fn is_normalized(&self) -> bool {
        if self.degree == 0 {
            return true;
        }
        let g = self.space.groupoid();
        let mut ok = true;
        self.for_each_tuple(|t| {
            if ok && t.iter().any(|&m| g.is_identity(m)) && !self.value(t).is_zero() {
                ok = false;
            }
        });
        ok
    }

    /// Pointwise sum; both cochains must live on the same groupoid.
    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        let mut c = self.clone();
        for (a, b) in c.values.iter_mut().zip(&other.values) {
            *a += *b;
        }
        Ok(c)
    }

    pub fn neg(&self) -> Cochain {
        let mut c = self.clone();
        c.values.iter_mut().for_each(|a| *a = a.neg());
        c
    }

    pub fn scale(&self, k: i64) -> Cochain {
        let mut c = self.clone();
        c.values.iter_mut().for_each(|a| *a = a.scale(k));
        c
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add(&other.neg())
    }

    fn check_compatible(&self, other: &Cochain) -> Result<()> {
        if !std::sync::Arc::ptr_eq(self.groupoid(), other.groupoid()) || self.degree != other.degree {
            return Err(Error::Incompatible("cochains live on different spaces or degrees".into()));
        }
        if self.twist != other.twist {
            return Err(Error::TwistMismatch("cannot add cochains of different twists".into()));
        }
        Ok(())
    }

    /// The same table read with the opposite twist flag.
    pub fn with_twist(&self, twist: Twist) -> Cochain {
        let mut c = self.clone();
        c.twist = twist;
        c
    }

    /// The same values on a groupoid sharing this one's cells but carrying
    /// another grading.
    pub fn regraded(&self, space: &GradedGroupoid) -> Result<Cochain> {
        if !std::sync::Arc::ptr_eq(self.groupoid(), space.groupoid()) {
            return Err(Error::Incompatible("regrading needs the same groupoid".into()));
        }
        let mut c = self.clone();
        c.space = space.clone();
        Ok(c)
    }

    /// Least common multiple of the value denominators.
    pub fn order(&self) -> u64 {
        use num_integer::Integer;
        self.values.iter().fold(1u64, |l, p| l.lcm(&p.den()))
    }

    /// `(dλ)` at one tuple of length `degree + 1`.
    pub fn differential_at(&self, t: &[MorId]) -> Phase {
        let n = t.len();
        debug_assert_eq!(n, self.degree + 1);
        let g = self.space.groupoid();
        let mut acc = self.face_value(&t[1..], g.source(t[n - 1])).act(self.kappa(t[0]));
        let mut buf = [0 as MorId; MAX_DEGREE];
        for j in 1..n {
            // merge g_{j+1} g_j, which sit at t[n-j-1] and t[n-j]
            let len = n - 1;
            let a = n - j - 1;
            buf[..a].copy_from_slice(&t[..a]);
            buf[a] = g.compose_unchecked(t[a], t[a + 1]);
            buf[a + 1..len].copy_from_slice(&t[a + 2..]);
            acc += self.face_value(&buf[..len], g.source(t[n - 1])).signed(Sign::pow(n - j));
        }
        acc += self.face_value(&t[..n - 1], g.target(t[n - 1])).signed(Sign::pow(n));
        acc
    }

    pub fn differential(&self) -> Result<Cochain> {
        Self::from_fn(&self.space, self.degree + 1, self.twist, |t| self.differential_at(t))
    }

    /// First tuple where `dλ ≠ 0`, if any.
    pub fn cocycle_witness(&self) -> Option<Vec<MorId>> {
        let mut witness = None;
        for_each_tuple(self.space.groupoid(), self.degree + 1, |t| {
            if witness.is_none() && !self.differential_at(t).is_zero() {
                witness = Some(t.to_vec());
            }
        });
        witness
    }

    pub fn is_cocycle(&self) -> bool {
        self.cocycle_witness().is_none()
    }

    /// `Err(NotClosed)` naming the first failing tuple.
    pub fn check_cocycle(&self) -> Result<()> {
        match self.cocycle_witness() {
            None => Ok(()),
            Some(t) => Err(Error::NotClosed {
                witness: format!("{} (d = {})", self.describe(&t), self.differential_at(&t)),
            }),
        }
    }

    /// Human-readable tuple.
    pub fn describe(&self, t: &[MorId]) -> String {
        describe_tuple(self.space.groupoid(), t)
    }

    /// `F*λ` on `domain`; for twisted cochains the grading of `domain` must
    /// be the pulled back one.
    pub fn pullback(&self, f: &Functor, domain: &GradedGroupoid) -> Result<Cochain> {
        let dg = domain.groupoid();
        if f.morphisms.len() != dg.n_morphisms() || f.objects.len() != dg.n_objects() {
            return Err(Error::NotAFunctor("functor does not match the domain".into()));
        }
        if self.twist == Twist::Pi && dg.morphisms().any(|m| domain.sign(m) != self.space.sign(f.map(m))) {
            return Err(Error::TwistMismatch("domain grading is not pulled back".into()));
        }
        let cg = self.groupoid();
        for m1 in dg.morphisms() {
            for &m2 in dg.out(dg.target(m1)) {
                if cg.compose(f.map(m2), f.map(m1)) != Some(f.map(dg.compose_unchecked(m2, m1))) {
                    return Err(Error::NotAFunctor(format!(
                        "composite of {} and {}",
                        dg.morphism_name(m2),
                        dg.morphism_name(m1)
                    )));
                }
            }
        }
        if self.degree == 0 {
            return Self::from_objects(domain, self.twist, |x| self.object_value(f.map_object(x)));
        }
        Self::from_fn(domain, self.degree, self.twist, |t| {
            let mut buf = [0 as MorId; MAX_DEGREE];
            for (b, &m) in buf.iter_mut().zip(t) {
                *b = f.map(m);
            }
            self.value(&buf[..t.len()])
        })
    }

    /// Uniform normalized cochain with values in `(1/k)ℤ/ℤ`.
    pub fn random(space: &GradedGroupoid, degree: usize, twist: Twist, k: u64, seed: u64) -> Result<Cochain> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Self::zero(space, degree, twist)?;
        let g = space.groupoid().clone();
        if degree == 0 {
            for x in g.objects() {
                c.values[x as usize] = Phase::from_residue(rng.gen_range(0..k), k);
            }
            return Ok(c);
        }
        let mut writes = Vec::new();
        for_each_tuple(&g, degree, |t| {
            if !t.iter().any(|&m| g.is_identity(m)) {
                writes.push((c.index(t), Phase::from_residue(rng.gen_range(0..k), k)));
            }
        });
        for (i, p) in writes {
            c.values[i] = p;
        }
        Ok(c)
    }
}

pub fn describe_tuple(g: &FiniteGroupoid, t: &[MorId]) -> String {
    let names: Vec<&str> = t.iter().map(|&m| g.morphism_name(m)).collect();
    format!("[{}]", names.join("|"))
}

/// Extends `t[len-fixed..]` downwards by every composable continuation.
fn fill_paths(g: &FiniteGroupoid, t: &mut [MorId], fixed: usize, pos: usize, f: &mut impl FnMut(&[MorId], usize)) {
    let n = t.len();
    if fixed == n {
        f(t, pos);
        return;
    }
    let x = g.target(t[n - fixed]);
    for &m in g.out(x) {
        t[n - fixed - 1] = m;
        fill_paths(g, t, fixed + 1, pos * g.radix() + g.local(m), f);
    }
}

/// Calls `f` on every composable tuple of length `n ≥ 1`.
pub fn for_each_tuple(g: &FiniteGroupoid, n: usize, mut f: impl FnMut(&[MorId])) {
    if n == 0 {
        return;
    }
    let mut buf = vec![0 as MorId; n];
    for m1 in g.morphisms() {
        buf[n - 1] = m1;
        fill_paths(g, &mut buf, 1, 0, &mut |t, _| f(t));
    }
}

/// Composable tuples of length `n` containing no identity.
pub fn nondegenerate_tuples(g: &FiniteGroupoid, n: usize) -> Vec<Vec<MorId>> {
    let mut out = Vec::new();
    for_each_tuple(g, n, |t| {
        if !t.iter().any(|&m| g.is_identity(m)) {
            out.push(t.to_vec());
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{double_cover, parse_group_spec};

    fn bg(s: &str) -> GradedGroupoid {
        parse_group_spec(s).unwrap().classifying_groupoid()
    }

    #[test]
    fn differential_examples() {
        let b = bg("cyclic:2");
        let mut l = Cochain::zero(&b, 1, Twist::None).unwrap();
        l.set(&[1], Phase::HALF);
        assert!(l.differential().unwrap().is_zero());
        l.set(&[1], Phase::new(1, 4));
        assert_eq!(l.cocycle_witness(), Some(vec![1, 1]));
        assert_eq!(l.differential_at(&[1, 1]), Phase::HALF);

        let b = bg("cyclic:4:mod2");
        let l = Cochain::from_objects(&b, Twist::Pi, |_| Phase::new(1, 4)).unwrap();
        let d = l.differential().unwrap();
        for w in 0..4 {
            let want = if w % 2 == 1 { Phase::HALF } else { Phase::ZERO };
            assert_eq!(d.value(&[w]), want);
        }
        let z = Cochain::zero(&b, 2, Twist::Pi).unwrap();
        assert!(z.differential().unwrap().is_zero());
    }

    #[test]
    fn d_squared_vanishes() {
        for s in ["cyclic:4:mod2", "product_Z2:Z3", "dihedral:4:reflection"] {
            let b = bg(s);
            let dc = double_cover(&b).unwrap();
            let cover = GradedGroupoid::trivially_graded(dc.groupoid.clone());
            for (space, twist) in [(&b, Twist::None), (&b, Twist::Pi), (&cover, Twist::None)] {
                for n in 0..=3 {
                    let l = Cochain::random(space, n, twist, 12, n as u64 + 3).unwrap();
                    let d = l.differential().unwrap();
                    assert!(d.is_normalized());
                    assert!(d.differential().unwrap().is_zero(), "{s} degree {n} {twist}");
                }
            }
        }
    }

    #[test]
    fn random_is_reproducible_and_normalized() {
        let b = bg("product_Z2:S3");
        let a = Cochain::random(&b, 2, Twist::Pi, 4, 9).unwrap();
        let c = Cochain::random(&b, 2, Twist::Pi, 4, 9).unwrap();
        assert_eq!(a, c);
        assert!(a.is_normalized());
        assert!(!a.is_zero());
    }

    #[test]
    fn pullback_commutes_with_d() {
        let b = bg("cyclic:4:mod2");
        let dc = double_cover(&b).unwrap();
        let cover = GradedGroupoid::new(dc.groupoid.clone(), b.pullback_grading(&dc.proj)).unwrap();
        for n in 0..=3 {
            for twist in [Twist::None, Twist::Pi] {
                let l = Cochain::random(&b, n, twist, 8, 11).unwrap();
                let lhs = l.differential().unwrap().pullback(&dc.proj, &cover).unwrap();
                let rhs = l.pullback(&dc.proj, &cover).unwrap().differential().unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        let l = Cochain::random(&b, 2, Twist::Pi, 8, 1).unwrap();
        assert_eq!(l.pullback(&Functor::identity(b.groupoid()), &b).unwrap(), l);
    }

    #[test]
    fn pullback_of_quaternionic_to_kernel_vanishes() {
        let z4 = parse_group_spec("cyclic:4:mod2").unwrap();
        let b = z4.classifying_groupoid();
        let q = quaternionic(&b).unwrap();
        let (sub, inc) = b.groupoid().full_subgroupoid(&[0]).unwrap();
        assert_eq!(sub.n_morphisms(), 4);
        // the even part as an action groupoid of the kernel
        let (ker, elems) = z4.kernel_group().unwrap();
        let bk = ker.classifying_groupoid();
        let f = Functor {
            objects: vec![0],
            morphisms: elems.iter().map(|&e| e as MorId).collect(),
        };
        let _ = inc;
        let pulled = q.pullback(&f, &GradedGroupoid::new(bk.groupoid().clone(), vec![Sign::Plus; 2]).unwrap()).unwrap();
        assert!(pulled.is_zero());
    }
}
