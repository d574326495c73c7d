//! Chain-level model of the transgression maps, used as an oracle.
//!
//! A transgression is computed literally as a composite: translate the
//! input to the double cover 𝒢, push the lifted loop chain through `f`
//! (or `[1] ⊗ −`), the Eilenberg–Zilber shuffle map and the evaluation
//! functor `BZ × Λ𝒢 → 𝒢`, and read the input cochain on the result.

use std::collections::BTreeMap;

use super::{check_inputs, TransgressionMap};
use crate::cochain::{Cochain, Twist, MAX_DEGREE};
use crate::error::{Error, Result};
use crate::groupoid::{double_cover, DoubleCover, FiniteGroupoid, Functor, GradedGroupoid, LoopGroupoid, MorId, ObjId};
use crate::phase::{Phase, Sign};

/// `[a_p|…|a_1] ⊗ [m_q|…|m_1]` in `C(BZ) ⊗ C(H)`, both in top-first order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    pub s: Vec<i64>,
    pub tail: Vec<MorId>,
    pub start: ObjId,
}

impl Simplex {
    pub fn is_degenerate(&self, g: &FiniteGroupoid) -> bool {
        self.s.contains(&0) || self.tail.iter().any(|&m| g.is_identity(m))
    }
}

/// A finite ℤ-combination of [`Simplex`] terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FChain {
    terms: BTreeMap<Simplex, i64>,
}

/// `s^ε_p = [ε|−ε|…]`, top entry first.
pub fn alternating(p: usize, e: Sign) -> Vec<i64> {
    (0..p).map(|i| (Sign::pow(i) * e).to_i64()).collect()
}

fn faces<T: Clone>(t: &[T], compose: impl Fn(&T, &T) -> T) -> Vec<(Vec<T>, bool, Sign)> {
    // (face, drops the bottom entry, sign)
    let n = t.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    out.push((t[1..].to_vec(), false, Sign::Plus));
    for j in 1..n {
        let a = n - j - 1;
        let mut f = t[..a].to_vec();
        f.push(compose(&t[a], &t[a + 1]));
        f.extend_from_slice(&t[a + 2..]);
        out.push((f, false, Sign::pow(n - j)));
    }
    out.push((t[..n - 1].to_vec(), true, Sign::pow(n)));
    out
}

impl FChain {
    pub fn zero() -> FChain {
        FChain::default()
    }

    pub fn single(s: Simplex) -> FChain {
        let mut c = FChain::zero();
        c.add(s, 1);
        c
    }

    pub fn add(&mut self, s: Simplex, coef: i64) {
        let e = self.terms.entry(s).or_insert(0);
        *e += coef;
        if *e == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn add_chain(&mut self, other: &FChain, coef: i64) {
        for (s, &c) in &other.terms {
            self.add(s.clone(), c * coef);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Simplex, i64)> {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn without_degenerate(&self, g: &FiniteGroupoid) -> FChain {
        FChain {
            terms: self.terms.iter().filter(|(s, _)| !s.is_degenerate(g)).map(|(s, &c)| (s.clone(), c)).collect(),
        }
    }

    /// `∂(a ⊗ b) = ∂a ⊗ b + (−1)^{|a|} a ⊗ ∂b`.
    pub fn boundary(&self, g: &FiniteGroupoid) -> FChain {
        let mut out = FChain::zero();
        for (x, c) in self.terms() {
            for (f, _, sign) in faces(&x.s, |a, b| a + b) {
                let s = Simplex {
                    s: f,
                    tail: x.tail.clone(),
                    start: x.start,
                };
                out.add(s, c * sign.to_i64());
            }
            let tensor = Sign::pow(x.s.len());
            let n = x.tail.len();
            for (f, drops_bottom, sign) in faces(&x.tail, |a, b| g.compose_unchecked(*a, *b)) {
                let start = if drops_bottom { g.target(x.tail[n - 1]) } else { x.start };
                let s = Simplex {
                    s: x.s.clone(),
                    tail: f,
                    start,
                };
                out.add(s, c * (sign * tensor).to_i64());
            }
        }
        out
    }

    /// Applies a functor to the groupoid factor and, with `negate`, the
    /// inversion of ℤ to the other.
    pub fn map(&self, f: &Functor, negate: bool) -> FChain {
        let mut out = FChain::zero();
        for (x, c) in self.terms() {
            let s = Simplex {
                s: x.s.iter().map(|&a| if negate { -a } else { a }).collect(),
                tail: x.tail.iter().map(|&m| f.map(m)).collect(),
                start: f.map_object(x.start),
            };
            out.add(s, c);
        }
        out
    }

    /// `f` applied termwise to a chain of `C(H)` (all `s` empty).
    pub fn apply_f(&self, sheet: impl Fn(ObjId) -> Sign, degree: impl Fn(MorId) -> Sign + Copy) -> FChain {
        let mut out = FChain::zero();
        for (x, c) in self.terms() {
            assert!(x.s.is_empty(), "f is defined on chains of the groupoid alone");
            out.add_chain(&f_map(&x.tail, x.start, sheet(x.start), degree), c);
        }
        out
    }
}

/// `f_n([ω_n|…|ω_1]_{ε_1})`, with `degree` the grading of the covered
/// groupoid pulled back to `H`.
pub fn f_map(tail: &[MorId], start: ObjId, start_sheet: Sign, degree: impl Fn(MorId) -> Sign) -> FChain {
    let n = tail.len();
    let mut eps = [Sign::Plus; MAX_DEGREE + 2];
    eps[1] = start_sheet;
    for k in 1..=n {
        eps[k + 1] = eps[k] * degree(tail[n - k]);
    }
    let top = eps[n + 1];
    let mut out = FChain::zero();
    out.add(
        Simplex {
            s: alternating(1, top),
            tail: tail.to_vec(),
            start,
        },
        top.to_i64(),
    );
    for i in 0..n {
        if !degree(tail[i]).is_odd() {
            break;
        }
        out.add(
            Simplex {
                s: alternating(i + 2, top),
                tail: tail[i + 1..].to_vec(),
                start,
            },
            (Sign::pow(i) * eps[n + 1 - i]).to_i64(),
        );
    }
    out
}

/// `ev_* EZ(s ⊗ tail)` for a simplex of `BZ ⊗ Λ(H)`: signed simplices of `H`
/// in top-first order, with their start objects.
fn ez_ev(lc: &LoopGroupoid, x: &Simplex) -> Vec<(Vec<MorId>, ObjId, Sign)> {
    let h = lc.base_groupoid();
    let lg = lc.groupoid();
    let (p, q) = (x.s.len(), x.tail.len());
    let mut out = Vec::new();
    let start = h.source(lc.loop_of(x.start));
    for mask in 0u32..(1 << (p + q)) {
        if mask.count_ones() as usize != p {
            continue;
        }
        // bit k set: step k (from the bottom) is an a-step
        let mut obj = x.start;
        let (mut ai, mut bi) = (0, 0);
        let mut b_above = 0;
        let mut bottom_up = Vec::with_capacity(p + q);
        for k in 0..p + q {
            if mask >> k & 1 == 1 {
                let a = x.s[p - 1 - ai];
                ai += 1;
                bottom_up.push(h.power(lc.loop_of(obj), a));
                b_above += q - bi;
            } else {
                let m = x.tail[q - 1 - bi];
                bi += 1;
                debug_assert_eq!(lg.source(m), obj);
                bottom_up.push(lc.underlying(m));
                obj = lg.target(m);
            }
        }
        bottom_up.reverse();
        out.push((bottom_up, start, Sign::pow(b_above)));
    }
    out
}

/// `Φ₋(λ̂)[ω̃_n|…|ω̃_1] = ε_{n+1}·λ̂[ω_n|…|ω_1]` on the double cover.
pub fn phi_minus(lambda: &Cochain, dc: &DoubleCover) -> Result<Cochain> {
    translate_to_cover(lambda, dc, Twist::Pi)
}

/// `Φ(λ) = λ∘proj` on the double cover.
pub fn phi(lambda: &Cochain, dc: &DoubleCover) -> Result<Cochain> {
    translate_to_cover(lambda, dc, Twist::None)
}

fn translate_to_cover(lambda: &Cochain, dc: &DoubleCover, twist: Twist) -> Result<Cochain> {
    if !std::sync::Arc::ptr_eq(lambda.groupoid(), dc.base.groupoid()) {
        return Err(Error::Incompatible("cochain does not live on the covered groupoid".into()));
    }
    if lambda.twist() != twist {
        return Err(Error::TwistMismatch(format!("expected a {twist} cochain")));
    }
    let cover = GradedGroupoid::trivially_graded(dc.groupoid.clone());
    let g = &dc.groupoid;
    let end_sign = |x: ObjId| if twist == Twist::Pi { dc.sheet(x) } else { Sign::Plus };
    if lambda.degree() == 0 {
        return Cochain::from_objects(&cover, Twist::None, |x| lambda.object_value(x / 2).act(end_sign(x)));
    }
    Cochain::from_fn(&cover, lambda.degree(), Twist::None, |t| {
        let mut buf = [0 as MorId; MAX_DEGREE];
        for (b, &m) in buf.iter_mut().zip(t) {
            *b = dc.proj.map(m);
        }
        lambda.value(&buf[..t.len()]).act(end_sign(g.target(t[0])))
    })
}

/// `Ψ₋(μ)[ω_n|…|ω_1] = μ[ω_n|…|ω_1]_{π(ω_{≤n})}`.
pub fn psi_minus(mu: &Cochain, dc: &DoubleCover) -> Result<Cochain> {
    translate_from_cover(mu, dc, Twist::Pi)
}

/// `Ψ(μ)[ω_n|…|ω_1] = μ[ω_n|…|ω_1]_{+1}`.
pub fn psi(mu: &Cochain, dc: &DoubleCover) -> Result<Cochain> {
    translate_from_cover(mu, dc, Twist::None)
}

/// Lifts a chain of the base to the cover starting on sheet `e1`.
pub fn lift_tuple(dc: &DoubleCover, t: &[MorId], e1: Sign) -> Vec<MorId> {
    let mut e = e1;
    let mut out = vec![0; t.len()];
    for k in (0..t.len()).rev() {
        out[k] = dc.lift(t[k], e);
        e = e * dc.base.sign(t[k]);
    }
    out
}

fn translate_from_cover(mu: &Cochain, dc: &DoubleCover, twist: Twist) -> Result<Cochain> {
    if !std::sync::Arc::ptr_eq(mu.groupoid(), &dc.groupoid) || mu.twist() != Twist::None {
        return Err(Error::Incompatible("expected an untwisted cochain on the double cover".into()));
    }
    let base = &dc.base;
    if mu.degree() == 0 {
        return Cochain::from_objects(base, twist, |x| mu.object_value(dc.lift_object(x, Sign::Plus)));
    }
    let g = base.groupoid();
    Cochain::from_fn(base, mu.degree(), twist, |t| {
        let e1 = match twist {
            Twist::Pi => t.iter().fold(Sign::Plus, |a, &m| a * base.sign(m)),
            Twist::None => Sign::Plus,
        };
        debug_assert!(g.is_composable(t));
        mu.value(&lift_tuple(dc, t, e1))
    })
}

/// The transgression computed through the defining chain-level composite.
pub fn ez_transgress_oracle(map: TransgressionMap, lg: &LoopGroupoid, lambda: &Cochain) -> Result<Cochain> {
    check_inputs(map, lg, lambda)?;
    if lambda.degree() > 4 {
        return Err(Error::Degree(lambda.degree()));
    }
    let n = lambda.degree() - 1;
    if map == TransgressionMap::Tau {
        let eval = |t: &[MorId], start: ObjId| -> Phase {
            let c = Simplex {
                s: vec![1],
                tail: t.to_vec(),
                start,
            };
            let mut acc = Phase::ZERO;
            for (simplex, _, sign) in ez_ev(lg, &c) {
                acc += lambda.value(&simplex).signed(sign);
            }
            acc
        };
        return build(lg, n, map.output_twist(), eval);
    }

    let base = lg.base();
    let dc = double_cover(base)?;
    let lc = LoopGroupoid::plain(dc.groupoid.clone())?;
    let proj = dc.loop_projection(&lc, lg)?;
    let lcg = lc.groupoid();
    let cover = &dc.groupoid;
    let sheet = |o: ObjId| dc.sheet(cover.source(lc.loop_of(o)));
    let degree = |m: MorId| base.sign(dc.proj.map(lc.underlying(m)));
    let eval = |t: &[MorId], start: ObjId| -> Phase {
        let total = t.iter().fold(Sign::Plus, |a, &m| a * lg.graded().sign(m));
        let e1 = match map {
            TransgressionMap::TauRef => Sign::Plus,
            _ => total,
        };
        let gamma = lg.loop_of(start);
        let lifted_loop = match map {
            TransgressionMap::TauPi => dc.lift(gamma, e1),
            _ => dc.lift(base.groupoid().power(gamma, e1.to_i64()), e1),
        };
        let mut o = lc.object_of_loop(lifted_loop).expect("lifted loop");
        let o1 = o;
        let mut lifted = vec![0; t.len()];
        for k in (0..t.len()).rev() {
            let w = lg.underlying(t[k]);
            let m = lc.morphism_at(o, dc.lift(w, sheet(o)));
            debug_assert_eq!(proj.map(m), t[k]);
            lifted[k] = m;
            o = lcg.target(m);
        }
        let chain = match map {
            TransgressionMap::TauPi => FChain::single(Simplex {
                s: vec![1],
                tail: lifted,
                start: o1,
            }),
            _ => f_map(&lifted, o1, sheet(o1), degree),
        };
        let mut acc = Phase::ZERO;
        for (x, coef) in chain.terms() {
            for (simplex, _, sign) in ez_ev(&lc, x) {
                let projected: Vec<MorId> = simplex.iter().map(|&m| dc.proj.map(m)).collect();
                let end_sheet = dc.sheet(cover.target(simplex[0]));
                let mut v = lambda.value(&projected).signed(sign).scale(coef);
                if lambda.twist() == Twist::Pi {
                    v = v.act(end_sheet);
                }
                acc += v;
            }
        }
        acc
    };
    build(lg, n, map.output_twist(), eval)
}

fn build(lg: &LoopGroupoid, n: usize, twist: Twist, eval: impl Fn(&[MorId], ObjId) -> Phase + Sync) -> Result<Cochain> {
    let space = lg.graded();
    if n == 0 {
        return Cochain::from_objects(space, twist, |o| eval(&[], o));
    }
    let g = lg.groupoid();
    Cochain::from_fn(space, n, twist, |t| eval(t, g.source(t[n - 1])))
}
