use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use super::{Cochain, Twist};
use crate::error::{Error, Result};
use crate::groupoid::{GradedGroup, GradedGroupoid};
use crate::phase::Phase;

/// Named cocycles on classifying groupoids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuiltinSpec {
    /// The zero cochain; degree and twist come from the caller.
    Trivial,
    /// `½` when both entries are odd.
    Quaternionic,
    /// `a·⌊(b+c)/k⌋/k` in the abelian coordinate `factor`.
    Cyclic3 { factor: usize },
    /// `a_i·b_j / gcd(k_i, k_j)`.
    Cyclic2Pulled { i: usize, j: usize },
}

impl FromStr for BuiltinSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<BuiltinSpec> {
        let parts: Vec<&str> = s.split(':').collect();
        let idx = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .map_or(Ok(0), |p| p.parse().map_err(|_| Error::Parse(format!("bad index in '{s}'"))))
        };
        Ok(match (parts[0], parts.len()) {
            ("trivial", 1) => BuiltinSpec::Trivial,
            ("quaternionic", 1) => BuiltinSpec::Quaternionic,
            ("cyclic3", 1 | 2) => BuiltinSpec::Cyclic3 { factor: idx(1)? },
            ("cyclic2_pulled", 3) => BuiltinSpec::Cyclic2Pulled { i: idx(1)?, j: idx(2)? },
            _ => return Err(Error::UnknownCocycle(s.to_string())),
        })
    }
}

impl fmt::Display for BuiltinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinSpec::Trivial => write!(f, "trivial"),
            BuiltinSpec::Quaternionic => write!(f, "quaternionic"),
            BuiltinSpec::Cyclic3 { factor } => write!(f, "cyclic3:{factor}"),
            BuiltinSpec::Cyclic2Pulled { i, j } => write!(f, "cyclic2_pulled:{i}:{j}"),
        }
    }
}

impl BuiltinSpec {
    /// Natural degree, if fixed.
    pub fn degree(&self) -> Option<usize> {
        match self {
            BuiltinSpec::Trivial => None,
            BuiltinSpec::Quaternionic | BuiltinSpec::Cyclic2Pulled { .. } => Some(2),
            BuiltinSpec::Cyclic3 { .. } => Some(3),
        }
    }
}

/// `½·Δ_{ω₂,ω₁}` as a twisted 2-cocycle on any graded groupoid.
pub fn quaternionic(space: &GradedGroupoid) -> Result<Cochain> {
    let c = Cochain::from_fn(space, 2, Twist::Pi, |t| {
        if space.sign(t[0]).is_odd() && space.sign(t[1]).is_odd() {
            Phase::HALF
        } else {
            Phase::ZERO
        }
    })?;
    c.check_cocycle()?;
    Ok(c)
}

/// Builds and verifies a builtin cocycle on `space = B(group)`.
pub fn builtin_cocycle(
    group: &GradedGroup,
    space: &GradedGroupoid,
    spec: &BuiltinSpec,
    degree: usize,
    twist: Twist,
) -> Result<Cochain> {
    let g = space.groupoid();
    if g.n_objects() != 1 || g.n_morphisms() != group.order() {
        return Err(Error::Incompatible("builtin cocycles live on the classifying groupoid".into()));
    }
    if let Some(d) = spec.degree() {
        if d != degree {
            return Err(Error::Incompatible(format!("{spec} has degree {d}, not {degree}")));
        }
    }
    let coord = |k: usize| -> Result<(Vec<Vec<u32>>, u32)> {
        let c = group
            .coords()
            .ok_or_else(|| Error::Incompatible(format!("{spec} needs an abelian group, got {}", group.name())))?;
        let m = *c
            .moduli
            .get(k)
            .ok_or_else(|| Error::Incompatible(format!("{} has no cyclic factor {k}", group.name())))?;
        Ok((c.coords.iter().map(|v| vec![v[k]]).collect(), m))
    };
    let c = match spec {
        BuiltinSpec::Trivial => {
            if degree == 0 {
                Cochain::zero(space, 0, twist)?
            } else {
                Cochain::from_fn(space, degree, twist, |_| Phase::ZERO)?
            }
        }
        BuiltinSpec::Quaternionic => {
            let q = quaternionic(space)?;
            q.with_twist(twist)
        }
        BuiltinSpec::Cyclic3 { factor } => {
            let (x, k) = coord(*factor)?;
            Cochain::from_fn(space, 3, twist, |t| {
                let (a, b, c) = (x[t[0] as usize][0], x[t[1] as usize][0], x[t[2] as usize][0]);
                Phase::new((a * ((b + c) / k)) as i64, k as i64)
            })?
        }
        BuiltinSpec::Cyclic2Pulled { i, j } => {
            let (xi, ki) = coord(*i)?;
            let (xj, kj) = coord(*j)?;
            let d = ki.gcd(&kj);
            Cochain::from_fn(space, 2, twist, |t| {
                Phase::new((xi[t[0] as usize][0] * xj[t[1] as usize][0]) as i64, d as i64)
            })?
        }
    };
    c.check_cocycle()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::parse_group_spec;

    fn build(group: &str, spec: &str, degree: usize, twist: Twist) -> Result<Cochain> {
        let g = parse_group_spec(group).unwrap();
        builtin_cocycle(&g, &g.classifying_groupoid(), &spec.parse()?, degree, twist)
    }

    #[test]
    fn quaternionic_values() {
        for s in ["cyclic:4:mod2", "product_Z2:S3", "dihedral:4:reflection", "symmetric:3:sign"] {
            let g = parse_group_spec(s).unwrap();
            let b = g.classifying_groupoid();
            let q = quaternionic(&b).unwrap();
            for a in 0..g.order() {
                for c in 0..g.order() {
                    let both = g.sign(a).is_odd() && g.sign(c).is_odd();
                    let want = if both { Phase::HALF } else { Phase::ZERO };
                    assert_eq!(q.value(&[a as u32, c as u32]), want);
                }
            }
        }
    }

    #[test]
    fn cyclic3_on_z2() {
        let c = build("cyclic:2", "cyclic3", 3, Twist::None).unwrap();
        assert_eq!(c.value(&[1, 1, 1]), Phase::HALF);
        assert_eq!(c.support_size(), 1);
        let z4 = build("cyclic:4", "cyclic3", 3, Twist::None).unwrap();
        assert_eq!(z4.value(&[1, 2, 3]), Phase::new(1, 4));
        assert!(build("product_Z2:Z2xZ2", "cyclic3:1", 3, Twist::None).is_ok());
        assert!(build("product_Z2:S3", "cyclic3", 3, Twist::None).is_err());
    }

    #[test]
    fn cyclic2_pulled_is_closed() {
        let c = build("product_Z2:Z2xZ2", "cyclic2_pulled:0:1", 2, Twist::None).unwrap();
        assert!(!c.is_zero());
        assert!(build("cyclic:4", "cyclic2_pulled:0:3", 2, Twist::None).is_err());
    }

    #[test]
    fn trivial_and_errors() {
        let z = build("cyclic:4:mod2", "trivial", 3, Twist::Pi).unwrap();
        assert!(z.is_zero());
        assert_eq!((z.degree(), z.twist()), (3, Twist::Pi));
        assert!(matches!("bogus".parse::<BuiltinSpec>(), Err(Error::UnknownCocycle(_))));
        assert!(build("cyclic:4:mod2", "quaternionic", 3, Twist::Pi).is_err());
    }
}
