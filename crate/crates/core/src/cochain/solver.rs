//! Cocycles, coboundaries and cohomology with `(1/k)ℤ/ℤ` coefficients.

use super::snf::{crt_idempotent, invariant_factors, prime_power_parts, SnfMod};
use super::{check_budget, nondegenerate_tuples, Cochain, Twist};
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GradedGroupoid, MorId, ObjId};
use crate::phase::Phase;

#[derive(Clone, Debug)]
pub struct CocycleBasis {
    pub degree: usize,
    pub twist: Twist,
    pub order: u64,
    /// Generators of `Z^n` over ℤ/k.
    pub cocycles: Vec<Cochain>,
    /// Generators `(dμ, μ)` of `B^n`.
    pub coboundaries: Vec<(Cochain, Cochain)>,
    /// Invariant factors of `H^n`, ones dropped.
    pub invariant_factors: Vec<u64>,
}

/// Coordinates of normalized degree-`n` cochains.
struct Basis {
    degree: usize,
    tuples: Vec<Vec<MorId>>,
    position: Vec<u32>,
}

impl Basis {
    fn new(g: &FiniteGroupoid, degree: usize) -> Result<Basis> {
        let size = check_budget(g, degree)?;
        if degree == 0 {
            return Ok(Basis {
                degree,
                tuples: g.objects().map(|x| vec![x]).collect(),
                position: (0..size as u32).collect(),
            });
        }
        let tuples = nondegenerate_tuples(g, degree);
        let mut position = vec![u32::MAX; size];
        for (i, t) in tuples.iter().enumerate() {
            position[dense_index(g, t)] = i as u32;
        }
        Ok(Basis {
            degree,
            tuples,
            position,
        })
    }

    fn len(&self) -> usize {
        self.tuples.len()
    }

    /// Coordinate of a face, `None` when it is degenerate.
    fn coord(&self, g: &FiniteGroupoid, face: &[MorId], start: ObjId) -> Option<usize> {
        if self.degree == 0 {
            return Some(start as usize);
        }
        let p = self.position[dense_index(g, face)];
        (p != u32::MAX).then_some(p as usize)
    }

    fn to_cochain(&self, space: &GradedGroupoid, twist: Twist, v: &[u64], k: u64) -> Result<Cochain> {
        let mut c = Cochain::zero(space, self.degree, twist)?;
        for (t, &x) in self.tuples.iter().zip(v) {
            let p = Phase::from_residue(x, k);
            if self.degree == 0 {
                c.set_object(t[0], p);
            } else {
                c.set(t, p);
            }
        }
        Ok(c)
    }
}

fn dense_index(g: &FiniteGroupoid, t: &[MorId]) -> usize {
    let n = t.len();
    let mut idx = t[n - 1] as usize;
    for &m in t[..n - 1].iter().rev() {
        idx = idx * g.radix() + g.local(m);
    }
    idx
}

/// The matrix of `d: C^{n} → C^{n+1}` over ℤ/k in the given bases.
fn differential_matrix(space: &GradedGroupoid, twist: Twist, src: &Basis, dst: &Basis, k: u64) -> Vec<u64> {
    let g = space.groupoid();
    let cols = src.len();
    let mut a = vec![0u64; dst.len() * cols];
    let mut add = |row: usize, col: Option<usize>, s: i64| {
        if let Some(c) = col {
            let e = &mut a[row * cols + c];
            *e = (*e as i64 + s).rem_euclid(k as i64) as u64;
        }
    };
    for (row, t) in dst.tuples.iter().enumerate() {
        let n = t.len();
        let sign = |e: usize| if e % 2 == 0 { 1 } else { -1 };
        let lead = match twist {
            Twist::Pi if space.sign(t[0]).is_odd() => -1,
            _ => 1,
        };
        add(row, src.coord(g, &t[1..], g.source(t[n - 1])), lead);
        for j in 1..n {
            let a = n - j - 1;
            let mut face = t[..a].to_vec();
            face.push(g.compose_unchecked(t[a], t[a + 1]));
            face.extend_from_slice(&t[a + 2..]);
            add(row, src.coord(g, &face, g.source(t[n - 1])), sign(n - j));
        }
        add(row, src.coord(g, &t[..n - 1], g.target(t[n - 1])), sign(n));
    }
    a
}

/// `Z^n`, `B^n` and `H^n` of normalized cochains with values in `(1/k)ℤ/ℤ`.
///
/// ℤ/k is split into its prime-power factors; generators found modulo `q`
/// are lifted with the CRT idempotent for `q`.
pub fn cocycle_basis(space: &GradedGroupoid, degree: usize, twist: Twist, k: u64) -> Result<CocycleBasis> {
    if k < 2 {
        return Err(Error::Incompatible("coefficient order must be at least 2".into()));
    }
    let g = space.groupoid();
    let here = Basis::new(g, degree)?;
    let above = Basis::new(g, degree + 1)?;
    let below = if degree > 0 { Some(Basis::new(g, degree - 1)?) } else { None };
    let n = here.len();
    let d_up = differential_matrix(space, twist, &here, &above, k);
    let d_in = below.as_ref().map(|b| differential_matrix(space, twist, b, &here, k));

    let mut cocycles = Vec::new();
    let mut coboundaries = Vec::new();
    let mut orders = Vec::new();
    for q in prime_power_parts(k) {
        let e = crt_idempotent(q, k);
        let lift = |v: &[u64]| -> Vec<u64> { v.iter().map(|&x| (x as u128 * e as u128 % k as u128) as u64).collect() };
        let reduce = |a: &[u64]| -> Vec<u64> { a.iter().map(|&x| x % q).collect() };
        let snf = SnfMod::new(reduce(&d_up), above.len(), n, q);
        for v in snf.kernel() {
            cocycles.push(here.to_cochain(space, twist, &lift(&v), k)?);
        }

        let mut images: Vec<Vec<u64>> = Vec::new();
        if let (Some(below), Some(d_in)) = (&below, &d_in) {
            let m = below.len();
            let snf_in = SnfMod::new(reduce(d_in), n, m, q);
            for t in 0..snf_in.pivots.len() {
                let mu = lift(&snf_in.q_column(t));
                let b: Vec<u64> = (0..n)
                    .map(|i| {
                        let s: u128 = (0..m).map(|j| d_in[i * m + j] as u128 * mu[j] as u128).sum();
                        (s % k as u128) as u64
                    })
                    .collect();
                if b.iter().all(|&x| x == 0) {
                    continue;
                }
                coboundaries.push((here.to_cochain(space, twist, &b, k)?, below.to_cochain(space, twist, &mu, k)?));
                images.push(reduce(&b));
            }
        }
        orders.extend(cohomology_orders(&snf, &images, q));
    }

    Ok(CocycleBasis {
        degree,
        twist,
        order: k,
        cocycles,
        coboundaries,
        invariant_factors: invariant_factors(&orders),
    })
}

/// Whether `c = dμ` for a normalized `μ` with values in `(1/k)ℤ/ℤ`.
pub fn is_coboundary(c: &Cochain, k: u64) -> Result<bool> {
    if k < 2 {
        return Err(Error::Incompatible("coefficient order must be at least 2".into()));
    }
    let degree = c.degree();
    if degree == 0 {
        return Ok(c.is_zero());
    }
    let space = c.space();
    let g = space.groupoid();
    let here = Basis::new(g, degree)?;
    let below = Basis::new(g, degree - 1)?;
    let mut target = Vec::with_capacity(here.len());
    for t in &here.tuples {
        let p = c.value(t);
        if k % p.den() != 0 {
            return Err(Error::Incompatible(format!("value {p} is not in (1/{k})ℤ/ℤ")));
        }
        target.push(p.num() * (k / p.den()));
    }
    let (n, m) = (here.len(), below.len());
    let d_in = differential_matrix(space, c.twist(), &below, &here, k);
    for q in prime_power_parts(k) {
        let mut plain = Vec::with_capacity(n * m);
        let mut augmented = Vec::with_capacity(n * (m + 1));
        for i in 0..n {
            let row = d_in[i * m..(i + 1) * m].iter().map(|&x| x % q);
            plain.extend(row.clone());
            augmented.extend(row);
            augmented.push(target[i] % q);
        }
        let before = SnfMod::new(plain, n, m, q).cokernel();
        let after = SnfMod::new(augmented, n, m + 1, q).cokernel();
        if before != after {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Orders of `K/B` over ℤ/q, where `K = ker A` is read off the SNF of `A`
/// and `B` is spanned by `images`.
///
/// In the coordinates `y = Q⁻¹x`, `K = ⊕ a_t ℤ/q` with `a_t = q/gcd(p_t, q)`,
/// so `K ≅ ⊕ ℤ/m_t` with `m_t = gcd(p_t, q)`.
fn cohomology_orders(snf: &SnfMod, images: &[Vec<u64>], q: u64) -> Vec<u64> {
    let divisors = snf.divisors();
    let live: Vec<usize> = (0..snf.cols).filter(|&t| divisors[t] > 1).collect();
    let r = live.len();
    if r == 0 {
        return Vec::new();
    }
    let mut rel_cols: Vec<Vec<u64>> = live
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut c = vec![0; r];
            c[i] = divisors[t] % q;
            c
        })
        .collect();
    for b in images {
        let y = snf.apply_q_inv(b);
        rel_cols.push(
            live.iter()
                .map(|&t| {
                    let a = q / divisors[t];
                    debug_assert_eq!(y[t] % a, 0);
                    (y[t] / a) % divisors[t]
                })
                .collect(),
        );
    }
    let cols = rel_cols.len();
    let mut rel = vec![0u64; r * cols];
    for (j, c) in rel_cols.iter().enumerate() {
        for i in 0..r {
            rel[i * cols + j] = c[i];
        }
    }
    SnfMod::new(rel, r, cols, q).cokernel()
}
