//! The four loop transgression maps in closed form.
//!
//! Sign conventions, all additive (a phase is negated where a cocycle is
//! inverted):
//!
//! | map             | input   | loops          | output  | term sign                                  |
//! |-----------------|---------|----------------|---------|--------------------------------------------|
//! | `tau`           | untw.   | `Λ𝒢`           | untw.   | `(−1)^{n−i}`                               |
//! | `tau_pi`        | π       | `Λ_π Ĝ`        | π       | `(−1)^{n−i}`                               |
//! | `tau_ref`       | π       | `Λ^ref_π Ĝ`    | untw.   | `(−1)^{m−1}·Δ_top(m−1)·sgn(𝔰)`             |
//! | `tau_ref_tilde` | untw.   | `Λ^ref_π Ĝ`    | π       | `Δ_top(m−1)·sgn(𝔰)`                        |
//!
//! For the reflection maps `m` counts the inserted loop entries and
//! `Δ_top(m−1)` asks the top `m−1` morphisms `ω_n, …, ω_{n+2−m}` to be odd.

pub mod chains;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cochain::{Cochain, Twist, MAX_DEGREE};
use crate::error::{Error, Result};
use crate::groupoid::{GradedGroupoid, LoopGroupoid, LoopKind, MorId, ObjId};
use crate::phase::{Phase, Sign};

pub use chains::{ez_transgress_oracle, f_map, phi, phi_minus, psi, psi_minus, FChain, Simplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransgressionMap {
    Tau,
    TauPi,
    TauRef,
    TauRefTilde,
}

impl TransgressionMap {
    pub const ALL: [TransgressionMap; 4] = [Self::Tau, Self::TauPi, Self::TauRef, Self::TauRefTilde];

    pub fn loop_kind(self) -> LoopKind {
        match self {
            Self::Tau => LoopKind::Plain,
            Self::TauPi => LoopKind::Quotient,
            Self::TauRef | Self::TauRefTilde => LoopKind::Reflection,
        }
    }

    pub fn input_twist(self) -> Twist {
        match self {
            Self::Tau | Self::TauRefTilde => Twist::None,
            Self::TauPi | Self::TauRef => Twist::Pi,
        }
    }

    pub fn output_twist(self) -> Twist {
        match self {
            Self::Tau | Self::TauRef => Twist::None,
            Self::TauPi | Self::TauRefTilde => Twist::Pi,
        }
    }

    /// The loop groupoid this map lands on.
    pub fn loop_groupoid(self, base: &GradedGroupoid) -> Result<LoopGroupoid> {
        match self.loop_kind() {
            LoopKind::Plain => LoopGroupoid::plain(base.groupoid().clone()),
            kind => LoopGroupoid::build(kind, base.clone()),
        }
    }
}

impl fmt::Display for TransgressionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tau => "tau",
            Self::TauPi => "tau_pi",
            Self::TauRef => "tau_ref",
            Self::TauRefTilde => "tau_ref_tilde",
        })
    }
}

impl FromStr for TransgressionMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<TransgressionMap> {
        Ok(match s {
            "tau" | "plain" => Self::Tau,
            "tau_pi" | "quot" => Self::TauPi,
            "tau_ref" | "ref" => Self::TauRef,
            "tau_ref_tilde" | "ref_tilde" => Self::TauRefTilde,
            _ => return Err(Error::Parse(format!("unknown transgression map '{s}'"))),
        })
    }
}

/// An `i`-shuffle of `i` inserted loop entries into `n+1` slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShuffleInsertion {
    pub n: usize,
    pub i: usize,
    /// Slots of the inserted entries, counted from the bottom starting at 1.
    pub positions: Vec<usize>,
    /// `(−1)^{#(inserted, kept) pairs with the kept entry above}`.
    pub sign: Sign,
}

impl ShuffleInsertion {
    /// Number of kept entries below the `j`-th inserted one (`j` from 0).
    pub fn kept_below(&self, j: usize) -> usize {
        self.positions[j] - j - 1
    }
}

/// All of `𝔖_{i,n+1}` in lexicographic order of positions.
pub fn shuffles(n: usize, i: usize) -> Vec<ShuffleInsertion> {
    let slots = n + 1;
    let kept = slots - i;
    let mut out = Vec::new();
    let mut pos: Vec<usize> = (1..=i).collect();
    if i > slots {
        return out;
    }
    loop {
        let above: usize = pos.iter().enumerate().map(|(j, &p)| kept - (p - j - 1)).sum();
        out.push(ShuffleInsertion {
            n,
            i,
            positions: pos.clone(),
            sign: Sign::pow(above),
        });
        // next combination
        let mut j = i;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if pos[j] < slots - (i - 1 - j) {
                break;
            }
        }
        pos[j] += 1;
        for l in j + 1..i {
            pos[l] = pos[l - 1] + 1;
        }
    }
}

fn check_inputs(map: TransgressionMap, lg: &LoopGroupoid, lambda: &Cochain) -> Result<()> {
    if !std::sync::Arc::ptr_eq(lambda.groupoid(), lg.base_groupoid()) {
        return Err(Error::Incompatible("cochain does not live on the loop groupoid's base".into()));
    }
    if lg.kind() != map.loop_kind() {
        return Err(Error::Incompatible(format!("{map} needs a {:?} loop groupoid", map.loop_kind())));
    }
    if lambda.twist() != map.input_twist() {
        return Err(Error::TwistMismatch(format!(
            "{map} takes {} cochains, got {}",
            map.input_twist(),
            lambda.twist()
        )));
    }
    if lambda.degree() == 0 || lambda.degree() > MAX_DEGREE {
        return Err(Error::Degree(lambda.degree()));
    }
    Ok(())
}

/// Applies a transgression map; the output has degree one less.
pub fn transgress(map: TransgressionMap, lg: &LoopGroupoid, lambda: &Cochain) -> Result<Cochain> {
    check_inputs(map, lg, lambda)?;
    let n = lambda.degree() - 1;
    let out_space = lg.graded();
    if n == 0 {
        return Cochain::from_objects(out_space, map.output_twist(), |o| transgress_at(map, lg, lambda, &[], o));
    }
    let g = lg.groupoid();
    Cochain::from_fn(out_space, n, map.output_twist(), |t| {
        transgress_at(map, lg, lambda, t, g.source(t[n - 1]))
    })
}

pub fn tau(lg: &LoopGroupoid, lambda: &Cochain) -> Result<Cochain> {
    transgress(TransgressionMap::Tau, lg, lambda)
}

pub fn tau_pi(lg: &LoopGroupoid, lambda: &Cochain) -> Result<Cochain> {
    transgress(TransgressionMap::TauPi, lg, lambda)
}

pub fn tau_ref(lg: &LoopGroupoid, lambda: &Cochain) -> Result<Cochain> {
    transgress(TransgressionMap::TauRef, lg, lambda)
}

pub fn tau_ref_tilde(lg: &LoopGroupoid, lambda: &Cochain) -> Result<Cochain> {
    transgress(TransgressionMap::TauRefTilde, lg, lambda)
}

/// The data `ω_k`, `γ_k` and `π(ω_{≤k})` of a loop-groupoid chain.
struct LoopChain {
    n: usize,
    omega: [MorId; MAX_DEGREE + 1],
    gamma: [MorId; MAX_DEGREE + 2],
    prefix: [Sign; MAX_DEGREE + 1],
}

impl LoopChain {
    fn new(lg: &LoopGroupoid, t: &[MorId], start: ObjId) -> LoopChain {
        let n = t.len();
        let g = lg.groupoid();
        let mut c = LoopChain {
            n,
            omega: [0; MAX_DEGREE + 1],
            gamma: [0; MAX_DEGREE + 2],
            prefix: [Sign::Plus; MAX_DEGREE + 1],
        };
        c.gamma[1] = lg.loop_of(start);
        for k in 1..=n {
            let m = t[n - k];
            c.omega[k] = lg.underlying(m);
            c.gamma[k + 1] = lg.loop_of(g.target(m));
            c.prefix[k] = c.prefix[k - 1] * lg.base().sign(c.omega[k]);
        }
        c
    }
}

/// One output value of a transgression map at `[t]` based at loop `start`.
pub fn transgress_at(map: TransgressionMap, lg: &LoopGroupoid, lambda: &Cochain, t: &[MorId], start: ObjId) -> Phase {
    let c = LoopChain::new(lg, t, start);
    match map {
        TransgressionMap::Tau | TransgressionMap::TauPi => willerton_at(&c, lambda),
        TransgressionMap::TauRef => reflection_at(&c, lg, lambda, false),
        TransgressionMap::TauRefTilde => reflection_at(&c, lg, lambda, true),
    }
}

/// `Σ_i (−1)^{n−i} λ[ω_n|…|ω_{i+1}|γ_{i+1}|ω_i|…|ω_1]`.
fn willerton_at(c: &LoopChain, lambda: &Cochain) -> Phase {
    let n = c.n;
    let mut buf = [0 as MorId; MAX_DEGREE];
    let mut acc = Phase::ZERO;
    for i in 0..=n {
        // paper order: top entries first
        let mut p = 0;
        for k in (i + 1..=n).rev() {
            buf[p] = c.omega[k];
            p += 1;
        }
        buf[p] = c.gamma[i + 1];
        p += 1;
        for k in (1..=i).rev() {
            buf[p] = c.omega[k];
            p += 1;
        }
        acc += lambda.value(&buf[..n + 1]).signed(Sign::pow(n - i));
    }
    acc
}

/// The signed shuffle sum for the reflection maps.
fn reflection_at(c: &LoopChain, lg: &LoopGroupoid, lambda: &Cochain, tilde: bool) -> Phase {
    let n = c.n;
    let base = lg.base_groupoid();
    let odd = |k: usize| lg.base().sign(c.omega[k]).is_odd();
    let mut acc = Phase::ZERO;
    let mut bottom_up = [0 as MorId; MAX_DEGREE];
    let mut buf = [0 as MorId; MAX_DEGREE];
    for m in 1..=n + 1 {
        if m >= 2 && !odd(n + 2 - m) {
            // the gate only shrinks as m grows
            break;
        }
        let coef = if tilde { Sign::Plus } else { Sign::pow(m - 1) };
        for sh in shuffles(n, m) {
            let mut kept = 0;
            let mut j = 0;
            for (slot, b) in bottom_up[..n + 1].iter_mut().enumerate() {
                if j < m && sh.positions[j] == slot + 1 {
                    j += 1;
                    let e = Sign::pow(m - j) * c.prefix[n] * c.prefix[kept];
                    *b = base.power(c.gamma[kept + 1], e.to_i64());
                } else {
                    kept += 1;
                    *b = c.omega[kept];
                }
            }
            for (dst, src) in buf[..n + 1].iter_mut().zip(bottom_up[..n + 1].iter().rev()) {
                *dst = *src;
            }
            acc += lambda.value(&buf[..n + 1]).signed(sh.sign * coef);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{builtin_cocycle, quaternionic, BuiltinSpec};
    use crate::groupoid::parse_group_spec;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn shuffle_counts_and_signs() {
        for n in 0..5 {
            for i in 1..=n + 1 {
                let s = shuffles(n, i);
                assert_eq!(s.len(), binomial(n + 1, i));
                for sh in &s {
                    assert!(sh.positions.windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
        let s = shuffles(1, 1);
        assert_eq!(s[0].positions, vec![1]);
        assert_eq!(s[0].sign, Sign::Minus);
        assert_eq!(s[1].sign, Sign::Plus);
    }

    #[test]
    fn willerton_on_cyclic3() {
        let z2 = parse_group_spec("cyclic:2").unwrap();
        let b = z2.classifying_groupoid();
        let eta = builtin_cocycle(&z2, &b, &BuiltinSpec::Cyclic3 { factor: 0 }, 3, Twist::None).unwrap();
        let lg = LoopGroupoid::plain(b.groupoid().clone()).unwrap();
        let t = tau(&lg, &eta).unwrap();
        let o = lg.object_of_loop(1).unwrap();
        let one = lg.morphism_at(o, 1);
        assert_eq!(t.value(&[one, one]), Phase::HALF);
    }

    #[test]
    fn quaternionic_transgressions() {
        let z4 = parse_group_spec("cyclic:4:mod2").unwrap();
        let b = z4.classifying_groupoid();
        let q = quaternionic(&b).unwrap();
        let lq = LoopGroupoid::quotient(&b).unwrap();
        assert!(tau_pi(&lq, &q).unwrap().is_zero());
        // degree 0: the value at each loop
        let lr = LoopGroupoid::reflection(&b).unwrap();
        let a = Cochain::random(&b, 1, Twist::Pi, 4, 3).unwrap();
        let t = tau_ref(&lr, &a).unwrap();
        for o in lr.groupoid().objects() {
            assert_eq!(t.object_value(o), a.value(&[lr.loop_of(o)]));
        }
    }

    #[test]
    fn wrong_inputs_are_rejected() {
        let b = parse_group_spec("cyclic:4:mod2").unwrap().classifying_groupoid();
        let lr = LoopGroupoid::reflection(&b).unwrap();
        let l = Cochain::random(&b, 2, Twist::None, 4, 1).unwrap();
        assert!(matches!(tau_ref(&lr, &l), Err(Error::TwistMismatch(_))));
        let other = parse_group_spec("cyclic:4:mod2").unwrap().classifying_groupoid();
        let l2 = Cochain::random(&other, 2, Twist::Pi, 4, 1).unwrap();
        assert!(matches!(tau_ref(&lr, &l2), Err(Error::Incompatible(_))));
    }
}
