//! Orientifold discrete-torsion phases on tori, Klein bottles, `T³` and `𝕂×S¹`.
//!
//! Each row is read off the iterated transgression and then recomputed from an
//! explicit formula in the cocycle values; the two must agree.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::{Cochain, Twist};
use crate::error::{Error, Result};
use crate::groupoid::{GradedGroup, LoopGroupoid, MorId};
use crate::phase::{Phase, PhaseSum, Sign};
use crate::transgress::{tau, tau_ref};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Surface {
    T2,
    #[serde(rename = "KLEIN")]
    Klein,
    T3,
    #[serde(rename = "KLEINxS1")]
    KleinXS1,
}

impl Surface {
    pub fn of_parities(parities: &[Sign]) -> Surface {
        let odd = parities[1..].iter().any(|s| s.is_odd());
        match (parities.len(), odd) {
            (2, false) => Surface::T2,
            (2, true) => Surface::Klein,
            (_, false) => Surface::T3,
            (_, true) => Surface::KleinXS1,
        }
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Surface::T2 => "T2",
            Surface::Klein => "KLEIN",
            Surface::T3 => "T3",
            Surface::KleinXS1 => "KLEINxS1",
        })
    }
}

impl FromStr for Surface {
    type Err = Error;
    fn from_str(s: &str) -> Result<Surface> {
        match s {
            "T2" => Ok(Surface::T2),
            "KLEIN" => Ok(Surface::Klein),
            "T3" => Ok(Surface::T3),
            "KLEINxS1" => Ok(Surface::KleinXS1),
            _ => Err(Error::Parse(format!("unknown surface '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionRow {
    /// `(g, ω)` or `(g, ω₁, ω₂)`.
    pub generators: Vec<usize>,
    pub parities: Vec<Sign>,
    pub surface: Surface,
    pub phase: Phase,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionTable {
    pub group: String,
    pub rows: Vec<TorsionRow>,
}

impl TorsionTable {
    pub fn phase_of(&self, generators: &[usize]) -> Option<Phase> {
        self.rows.iter().find(|r| r.generators == generators).map(|r| r.phase)
    }

    pub fn count(&self, surface: Surface) -> usize {
        self.rows.iter().filter(|r| r.surface == surface).count()
    }

    pub fn to_tsv(&self, group: &GradedGroup) -> String {
        let mut out = String::from("generators\tparities\tsurface\tphase\n");
        for r in &self.rows {
            let gens: Vec<&str> = r.generators.iter().map(|&x| group.element_name(x)).collect();
            let pars: Vec<&str> = r.parities.iter().map(|s| if s.is_odd() { "-" } else { "+" }).collect();
            out.push_str(&format!("{}\t{}\t{}\t{}\n", gens.join(","), pars.join(","), r.surface, r.phase));
        }
        out
    }

    /// `Σ e(phase)` over each orbit of `h·(g, ω…) = (h g^{π(h)} h⁻¹, hωh⁻¹, …)`,
    /// keyed by the smallest row of the orbit.
    pub fn orbit_sums(&self, group: &GradedGroup) -> BTreeMap<Vec<usize>, PhaseSum> {
        let act = |h: usize, t: &[usize]| -> Vec<usize> {
            let mut v = vec![group.real_conj(h, t[0])];
            v.extend(t[1..].iter().map(|&w| group.conj(h, w)));
            v
        };
        let mut sums = BTreeMap::new();
        for r in &self.rows {
            let key = (0..group.order()).map(|h| act(h, &r.generators)).min().expect("nonempty group");
            *sums.entry(key).or_insert_with(PhaseSum::zero) += &PhaseSum::from_phase(r.phase);
        }
        sums
    }
}

/// `Ĝ^{⟨2⟩}`: pairs `(g, ω)` with `g` even and `ω g^{π(ω)} ω⁻¹ = g`.
pub fn graded_commuting_pairs(group: &GradedGroup) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for g in group.kernel() {
        for w in 0..group.order() {
            if group.real_conj(w, g) == g {
                out.push((g, w));
            }
        }
    }
    out
}

/// `Ĝ^{⟨3⟩}`: `(g, ω₁, ω₂)` with `(g, ωᵢ) ∈ Ĝ^{⟨2⟩}` and `ω₁ω₂ = ω₂ω₁`.
pub fn graded_commuting_triples(group: &GradedGroup) -> Vec<(usize, usize, usize)> {
    let pairs = graded_commuting_pairs(group);
    let mut out = Vec::new();
    for &(g, w1) in &pairs {
        for &(h, w2) in &pairs {
            if h == g && group.mul(w1, w2) == group.mul(w2, w1) {
                out.push((g, w1, w2));
            }
        }
    }
    out
}

fn check_input(group: &GradedGroup, c: &Cochain, degree: usize) -> Result<()> {
    let g = c.groupoid();
    if g.n_objects() != 1 || g.n_morphisms() != group.order() {
        return Err(Error::Incompatible("torsion phases need a cocycle on the classifying groupoid".into()));
    }
    if c.degree() != degree {
        return Err(Error::Degree(c.degree()));
    }
    if c.twist() != Twist::Pi {
        return Err(Error::TwistMismatch("expected a π-twisted cocycle".into()));
    }
    c.check_cocycle()
}

fn mismatch(group: &GradedGroup, t: &[usize], lhs: Phase, rhs: Phase) -> Error {
    let names: Vec<&str> = t.iter().map(|&x| group.element_name(x)).collect();
    Error::verification(
        "torsion closed form",
        format!("({}): transgression {lhs}, closed form {rhs}", names.join(", ")),
    )
}

/// `−Δ_ω θ̂(g⁻¹, g) + θ̂(g, ω) − θ̂(ω, g^{π(ω)})`
pub fn closed_form_2d(group: &GradedGroup, theta: &Cochain, g: usize, w: usize) -> Phase {
    let th = |a: usize, b: usize| theta.value(&[a as MorId, b as MorId]);
    let gi = group.inv(g);
    let odd = group.sign(w).is_odd();
    let gp = if odd { gi } else { g };
    let mut p = th(g, w) - th(w, gp);
    if odd {
        p -= th(gi, g);
    }
    p
}

/// The membrane phase on `(g, ω₁, ω₂)`, one formula per parity pattern of `(ω₁, ω₂)`.
pub fn closed_form_3d(group: &GradedGroup, eta: &Cochain, g: usize, w1: usize, w2: usize) -> Phase {
    let e = |a: usize, b: usize, c: usize| eta.value(&[a as MorId, b as MorId, c as MorId]);
    let gi = group.inv(g);
    match (group.sign(w1).is_odd(), group.sign(w2).is_odd()) {
        (false, false) => {
            e(w1, w2, g) + e(g, w1, w2) + e(w2, g, w1) - e(w1, g, w2) - e(w2, w1, g) - e(g, w2, w1)
        }
        (false, true) => {
            e(gi, g, w1) + e(w1, gi, g) - e(gi, w1, g) + e(w1, w2, gi) + e(g, w1, w2) + e(w2, gi, w1)
                - e(w1, g, w2)
                - e(w2, w1, gi)
                - e(g, w2, w1)
        }
        (true, false) => {
            e(gi, w2, g) - e(gi, g, w2) - e(w2, gi, g) + e(w1, w2, gi) + e(g, w1, w2) + e(w2, g, w1)
                - e(w1, gi, w2)
                - e(w2, w1, gi)
                - e(g, w2, w1)
        }
        (true, true) => {
            e(gi, w2, gi) + e(gi, g, w1) + e(w1, g, gi) - e(gi, g, w2) - e(w2, g, gi) - e(gi, w1, gi)
                + e(w1, w2, g)
                + e(g, w1, w2)
                + e(w2, gi, w1)
                - e(w1, gi, w2)
                - e(w2, w1, g)
                - e(g, w2, w1)
        }
    }
}

fn row(group: &GradedGroup, generators: Vec<usize>, phase: Phase) -> TorsionRow {
    let parities: Vec<Sign> = generators.iter().map(|&x| group.sign(x)).collect();
    TorsionRow {
        surface: Surface::of_parities(&parities),
        generators,
        parities,
        phase,
    }
}

/// One-loop phases: `τ(τ_ref(θ̂))` at each `(g, ω) ∈ Ĝ^{⟨2⟩}`.
pub fn torsion_2d(group: &GradedGroup, theta: &Cochain) -> Result<TorsionTable> {
    check_input(group, theta, 2)?;
    let lg = LoopGroupoid::reflection(theta.space())?;
    let t1 = tau_ref(&lg, theta)?;
    let llg = LoopGroupoid::plain(lg.groupoid().clone())?;
    let t0 = tau(&llg, &t1)?;
    let rows = graded_commuting_pairs(group)
        .into_par_iter()
        .map(|(g, w)| {
            let x = lg.object_of_loop(g as MorId).expect("even loop");
            let m = lg.morphism_at(x, w as MorId);
            let o = llg.object_of_loop(m).expect("automorphism");
            let p = t0.object_value(o);
            let q = closed_form_2d(group, theta, g, w);
            if p != q {
                return Err(mismatch(group, &[g, w], p, q));
            }
            Ok(row(group, vec![g, w], p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TorsionTable {
        group: group.name().to_string(),
        rows,
    })
}

/// Membrane phases: `τ²τ_ref(η̂)` at each `(g, ω₁, ω₂) ∈ Ĝ^{⟨3⟩}`, read as the
/// value of `ττ_ref(η̂)` on the loop `ω₂` over the object `(g, ω₁)` of `ΛΛ^ref`.
pub fn torsion_3d(group: &GradedGroup, eta: &Cochain) -> Result<TorsionTable> {
    check_input(group, eta, 3)?;
    let lg = LoopGroupoid::reflection(eta.space())?;
    let t2 = tau_ref(&lg, eta)?;
    let llg = LoopGroupoid::plain(lg.groupoid().clone())?;
    let t1 = tau(&llg, &t2)?;
    let rows = graded_commuting_triples(group)
        .into_par_iter()
        .map(|(g, w1, w2)| {
            let x = lg.object_of_loop(g as MorId).expect("even loop");
            let o = llg.object_of_loop(lg.morphism_at(x, w1 as MorId)).expect("automorphism");
            let m = llg.morphism_at(o, lg.morphism_at(x, w2 as MorId));
            let p = t1.value(&[m]);
            let q = closed_form_3d(group, eta, g, w1, w2);
            if p != q {
                return Err(mismatch(group, &[g, w1, w2], p, q));
            }
            Ok(row(group, vec![g, w1, w2], p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TorsionTable {
        group: group.name().to_string(),
        rows,
    })
}

/// Doubly-odd rows against the mixed-parity formula at `(g, ω₁ω₂⁻¹, ω₂)`.
pub fn check_doubly_odd_reduction(group: &GradedGroup, eta: &Cochain, table: &TorsionTable) -> Result<()> {
    for r in &table.rows {
        if let [g, w1, w2] = r.generators[..] {
            if group.sign(w1).is_odd() && group.sign(w2).is_odd() {
                let v = group.mul(w1, group.inv(w2));
                let q = closed_form_3d(group, eta, g, v, w2);
                if q != r.phase {
                    return Err(Error::verification(
                        "doubly-odd reduction",
                        format!("({g}, {w1}, {w2}): {} vs {q}", r.phase),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Recomputes the table after adding `dμ̂` and compares rows and orbit sums.
pub fn check_gauge_invariance(group: &GradedGroup, cocycle: &Cochain, mu: &Cochain) -> Result<()> {
    let shifted = cocycle.add(&mu.differential()?)?;
    let build = |c: &Cochain| match c.degree() {
        2 => torsion_2d(group, c),
        3 => torsion_3d(group, c),
        d => Err(Error::Degree(d)),
    };
    let (a, b) = (build(cocycle)?, build(&shifted)?);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        if x.phase != y.phase {
            return Err(Error::verification("gauge invariance", format!("{:?}", x.generators)));
        }
    }
    if a.orbit_sums(group) != b.orbit_sums(group) {
        return Err(Error::verification("gauge invariance", "orbit sums"));
    }
    Ok(())
}
