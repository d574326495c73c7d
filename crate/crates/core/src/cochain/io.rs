use serde::{Deserialize, Serialize};

use std::path::PathBuf;
use std::str::FromStr;

use super::{builtin_cocycle, cocycle_basis, BuiltinSpec, Cochain, Twist};
use crate::error::{Error, Result};
use crate::groupoid::{GradedGroup, GradedGroupoid, MorId};
use crate::phase::Phase;

/// On-disk cocycle; omitted tuples are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleFile {
    pub degree: usize,
    pub twist: Twist,
    pub order: u64,
    pub values: Vec<CocycleValue>,
}

/// One entry; for degree 0 the tuple holds a single object name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleValue {
    pub tuple: Vec<String>,
    pub phase: Phase,
}

impl CocycleFile {
    pub fn from_cochain(c: &Cochain) -> CocycleFile {
        let g = c.groupoid();
        let values = c
            .entries()
            .into_iter()
            .map(|(t, phase)| CocycleValue {
                tuple: if c.degree() == 0 {
                    vec![g.object_name(t[0]).to_string()]
                } else {
                    t.iter().map(|&m| g.morphism_name(m).to_string()).collect()
                },
                phase,
            })
            .collect();
        CocycleFile {
            degree: c.degree(),
            twist: c.twist(),
            order: c.order(),
            values,
        }
    }

    /// Loads onto `space`, rejecting unknown names, non-composable tuples,
    /// entries on degenerate tuples and phases outside `(1/order)ℤ/ℤ`.
    pub fn to_cochain(&self, space: &GradedGroupoid) -> Result<Cochain> {
        let g = space.groupoid();
        let mut c = Cochain::zero(space, self.degree, self.twist)?;
        for v in &self.values {
            if self.order == 0 || self.order % v.phase.den() != 0 {
                return Err(Error::Parse(format!("phase {} does not have order dividing {}", v.phase, self.order)));
            }
            if self.degree == 0 {
                let [name] = v.tuple.as_slice() else {
                    return Err(Error::Parse("degree-0 entries name one object".into()));
                };
                let x = g
                    .object_by_name(name)
                    .ok_or_else(|| Error::Parse(format!("unknown object '{name}'")))?;
                c.set_object(x, v.phase);
                continue;
            }
            if v.tuple.len() != self.degree {
                return Err(Error::Parse(format!("tuple {:?} has the wrong length", v.tuple)));
            }
            let t: Vec<MorId> = v
                .tuple
                .iter()
                .map(|n| g.morphism_by_name(n).ok_or_else(|| Error::Parse(format!("unknown morphism '{n}'"))))
                .collect::<Result<_>>()?;
            if !g.is_composable(&t) {
                return Err(Error::Parse(format!("tuple {:?} is not composable", v.tuple)));
            }
            if t.iter().any(|&m| g.is_identity(m)) && !v.phase.is_zero() {
                return Err(Error::Parse(format!("tuple {:?} contains an identity", v.tuple)));
            }
            c.set(&t, v.phase);
        }
        Ok(c)
    }

    pub fn from_json(s: &str) -> Result<CocycleFile> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Where a cocycle comes from: a builtin name, `basis:i` from the solver, or a JSON file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CocycleSource {
    Builtin(BuiltinSpec),
    Basis(usize),
    File(PathBuf),
}

impl FromStr for CocycleSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<CocycleSource> {
        if let Some(i) = s.strip_prefix("basis:") {
            let i = i.parse().map_err(|_| Error::Parse(format!("bad basis index in '{s}'")))?;
            return Ok(CocycleSource::Basis(i));
        }
        if s.ends_with(".json") || s.contains('/') {
            return Ok(CocycleSource::File(PathBuf::from(s)));
        }
        Ok(CocycleSource::Builtin(s.parse()?))
    }
}

impl CocycleSource {
    /// Resolves on `space = B(group)`; `degree` is used when the source does not fix it.
    pub fn resolve(&self, group: &GradedGroup, space: &GradedGroupoid, degree: usize, twist: Twist, k: u64) -> Result<Cochain> {
        match self {
            CocycleSource::Builtin(spec) => builtin_cocycle(group, space, spec, spec.degree().unwrap_or(degree), twist),
            CocycleSource::Basis(i) => {
                let basis = cocycle_basis(space, degree, twist, k)?;
                let n = basis.cocycles.len();
                basis
                    .cocycles
                    .into_iter()
                    .nth(*i)
                    .ok_or_else(|| Error::Incompatible(format!("the solver basis has {n} elements, no index {i}")))
            }
            CocycleSource::File(path) => {
                let file = CocycleFile::from_json(&std::fs::read_to_string(path)?)?;
                if file.twist != twist {
                    return Err(Error::TwistMismatch(format!("{} holds a {} cochain, expected {twist}", path.display(), file.twist)));
                }
                let c = file.to_cochain(space)?;
                c.check_cocycle()?;
                Ok(c)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::quaternionic;
    use crate::groupoid::parse_group_spec;

    #[test]
    fn round_trip() {
        let b = parse_group_spec("product_Z2:S3").unwrap().classifying_groupoid();
        let q = quaternionic(&b).unwrap();
        let file = CocycleFile::from_cochain(&q);
        assert_eq!(file.order, 2);
        let back = CocycleFile::from_json(&file.to_json().unwrap()).unwrap().to_cochain(&b).unwrap();
        assert_eq!(back, q);
        let r = Cochain::random(&b, 0, Twist::Pi, 6, 2).unwrap();
        assert_eq!(CocycleFile::from_cochain(&r).to_cochain(&b).unwrap(), r);
    }

    #[test]
    fn rejects_bad_entries() {
        let b = parse_group_spec("cyclic:4:mod2").unwrap().classifying_groupoid();
        let load = |s: &str| CocycleFile::from_json(s).and_then(|f| f.to_cochain(&b));
        assert!(load(r#"{"degree":1,"twist":"none","order":4,"values":[{"tuple":["1"],"phase":"1/4"}]}"#).is_ok());
        assert!(load(r#"{"degree":1,"twist":"none","order":4,"values":[{"tuple":["0"],"phase":"1/4"}]}"#).is_err());
        assert!(load(r#"{"degree":1,"twist":"none","order":2,"values":[{"tuple":["1"],"phase":"1/4"}]}"#).is_err());
        assert!(load(r#"{"degree":1,"twist":"none","order":4,"values":[{"tuple":["9"],"phase":"1/4"}]}"#).is_err());
        assert!(load(r#"{"degree":2,"twist":"none","order":4,"values":[{"tuple":["1"],"phase":"1/4"}]}"#).is_err());
    }
}
