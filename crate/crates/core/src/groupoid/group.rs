use std::sync::Arc;

use serde::Deserialize;

use super::{FiniteGroupoid, GradedGroupoid, MorId};
use crate::error::{Error, Result};
use crate::phase::Sign;

/// Coordinates of an abelian group presented as a product of cyclic groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianCoords {
    pub moduli: Vec<u32>,
    pub coords: Vec<Vec<u32>>,
}

/// A finite group with a homomorphism to {±1}. Elements are `0..order`.
#[derive(Clone, Debug)]
pub struct GradedGroup {
    name: String,
    names: Vec<String>,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    grading: Vec<Sign>,
    coords: Option<AbelianCoords>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Grading {
    Trivial,
    Mod2,
    Reflection,
    Sign,
    Projection,
    Explicit(Vec<Sign>),
}

impl Grading {
    fn parse(s: &str) -> Result<Grading> {
        Ok(match s {
            "trivial" => Grading::Trivial,
            "mod2" => Grading::Mod2,
            "reflection" => Grading::Reflection,
            "sign" => Grading::Sign,
            "projection" => Grading::Projection,
            _ => return Err(Error::InvalidGroup(format!("unknown grading '{s}'"))),
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GradingField {
    Named(String),
    Explicit(Vec<i64>),
}

impl Default for GradingField {
    fn default() -> Self {
        GradingField::Named("trivial".into())
    }
}

impl GradingField {
    fn resolve(&self) -> Result<Grading> {
        match self {
            GradingField::Named(s) => Grading::parse(s),
            GradingField::Explicit(v) => Ok(Grading::Explicit(
                v.iter().map(|&x| Sign::from_i64(x)).collect::<Result<_>>()?,
            )),
        }
    }
}

/// The JSON group description.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GroupSpec {
    Cyclic {
        n: usize,
        #[serde(default)]
        grading: GradingField,
    },
    Dihedral {
        n: usize,
        #[serde(default)]
        grading: GradingField,
    },
    Symmetric {
        n: usize,
        #[serde(default)]
        grading: GradingField,
    },
    #[serde(rename = "product_Z2")]
    ProductZ2 { base: String },
    Explicit {
        table: Vec<Vec<usize>>,
        #[serde(default)]
        names: Option<Vec<String>>,
        #[serde(default)]
        grading: GradingField,
    },
}

impl GroupSpec {
    pub fn build(&self) -> Result<GradedGroup> {
        match self {
            GroupSpec::Cyclic { n, grading } => GradedGroup::cyclic(*n)?.graded(grading.resolve()?),
            GroupSpec::Dihedral { n, grading } => GradedGroup::dihedral(*n)?.graded(grading.resolve()?),
            GroupSpec::Symmetric { n, grading } => GradedGroup::symmetric(*n)?.graded(grading.resolve()?),
            GroupSpec::ProductZ2 { base } => Ok(parse_base(base)?.product_z2()),
            GroupSpec::Explicit { table, names, grading } => {
                let g = GradedGroup::from_table("explicit", names.clone(), table.clone())?;
                g.graded(grading.resolve()?)
            }
        }
    }
}

/// Parses `cyclic:4:mod2`, `dihedral:4:reflection`, `symmetric:3:sign`,
/// `product_Z2:S3`, `product_Z2:Z2xZ2` or a JSON object.
pub fn parse_group_spec(s: &str) -> Result<GradedGroup> {
    let s = s.trim();
    if s.starts_with('{') {
        let spec: GroupSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        return spec.build();
    }
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| -> Result<usize> {
        parts
            .get(i)
            .ok_or_else(|| Error::InvalidGroup(format!("'{s}' is missing a size")))?
            .parse()
            .map_err(|_| Error::InvalidGroup(format!("bad size in '{s}'")))
    };
    let grading = |i: usize| -> Result<Grading> { parts.get(i).map_or(Ok(Grading::Trivial), |g| Grading::parse(g)) };
    if parts.len() > 3 {
        return Err(Error::InvalidGroup(format!("cannot parse '{s}'")));
    }
    match parts[0] {
        "cyclic" => GradedGroup::cyclic(num(1)?)?.graded(grading(2)?),
        "dihedral" => GradedGroup::dihedral(num(1)?)?.graded(grading(2)?),
        "symmetric" => GradedGroup::symmetric(num(1)?)?.graded(grading(2)?),
        "product_Z2" if parts.len() == 2 => Ok(parse_base(parts[1])?.product_z2()),
        "trivial" if parts.len() == 1 => GradedGroup::trivial(),
        _ => Err(Error::InvalidGroup(format!("cannot parse '{s}'"))),
    }
}

/// Ungraded base groups: `1`, `Zn`, `Sn`, `Dn` and products `AxB`.
fn parse_base(s: &str) -> Result<GradedGroup> {
    let mut acc: Option<GradedGroup> = None;
    for f in s.split('x') {
        let f = f.trim();
        let size = |t: &str| -> Result<usize> { t.parse().map_err(|_| Error::InvalidGroup(format!("bad factor '{f}'"))) };
        let g = if f == "1" {
            GradedGroup::trivial()?
        } else if let Some(t) = f.strip_prefix('Z') {
            GradedGroup::cyclic(size(t)?)?
        } else if let Some(t) = f.strip_prefix('S') {
            GradedGroup::symmetric(size(t)?)?
        } else if let Some(t) = f.strip_prefix('D') {
            GradedGroup::dihedral(size(t)?)?
        } else {
            return Err(Error::InvalidGroup(format!("bad factor '{f}'")));
        };
        acc = Some(match acc {
            None => g,
            Some(a) => a.product(&g),
        });
    }
    acc.ok_or_else(|| Error::InvalidGroup("empty base".into()))
}

impl GradedGroup {
    /// Validates a multiplication table `table[a][b] = a·b` (trivially graded).
    pub fn from_table(name: &str, names: Option<Vec<String>>, table: Vec<Vec<usize>>) -> Result<GradedGroup> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroup("table is not square over the elements".into()));
        }
        let flat: Vec<usize> = table.concat();
        let mul = |a: usize, b: usize| flat[a * n + b];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul(e, a) == a && mul(a, e) == a))
            .ok_or_else(|| Error::InvalidGroup("no identity".into()))?;
        let inverse = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| mul(a, b) == identity)
                    .ok_or_else(|| Error::InvalidGroup(format!("{a} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        let names = match names {
            Some(v) if v.len() == n => v,
            Some(_) => return Err(Error::InvalidGroup("wrong number of names".into())),
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != n {
            return Err(Error::InvalidGroup("element names are not unique".into()));
        }
        Ok(GradedGroup {
            name: name.to_string(),
            names,
            table: flat,
            identity,
            inverse,
            grading: vec![Sign::Plus; n],
            coords: None,
        })
    }

    pub fn trivial() -> Result<GradedGroup> {
        let mut g = Self::from_table("1", Some(vec!["e".into()]), vec![vec![0]])?;
        g.coords = Some(AbelianCoords {
            moduli: vec![],
            coords: vec![vec![]],
        });
        Ok(g)
    }

    pub fn cyclic(n: usize) -> Result<GradedGroup> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let mut g = Self::from_table(&format!("Z{n}"), None, table)?;
        g.coords = Some(AbelianCoords {
            moduli: vec![n as u32],
            coords: (0..n as u32).map(|k| vec![k]).collect(),
        });
        Ok(g)
    }

    /// The dihedral group of order `2n`; `r{i}` are rotations, `s{i}` = r^i s.
    pub fn dihedral(n: usize) -> Result<GradedGroup> {
        if n < 1 {
            return Err(Error::InvalidGroup("dihedral group needs n >= 1".into()));
        }
        let elem = |i: usize, j: usize| i + n * j;
        let mut table = vec![vec![0; 2 * n]; 2 * n];
        for a in 0..n {
            for b in 0..2 {
                for c in 0..n {
                    for d in 0..2 {
                        let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                        table[elem(a, b)][elem(c, d)] = elem(rot, (b + d) % 2);
                    }
                }
            }
        }
        let names = (0..2 * n)
            .map(|k| if k < n { format!("r{k}") } else { format!("s{}", k - n) })
            .collect();
        Self::from_table(&format!("D{n}"), Some(names), table)
    }

    pub fn symmetric(n: usize) -> Result<GradedGroup> {
        if n == 0 || n > 6 {
            return Err(Error::InvalidGroup("symmetric groups are supported for 1 <= n <= 6".into()));
        }
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut p: Vec<usize> = (0..n).collect();
        loop {
            perms.push(p.clone());
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
            p.swap(i, j);
            p[i + 1..].reverse();
        }
        let index = |q: &Vec<usize>| perms.iter().position(|r| r == q).unwrap();
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| index(&(0..n).map(|i| a[b[i]]).collect()))
                    .collect()
            })
            .collect();
        let names = perms
            .iter()
            .map(|q| q.iter().map(|d| d.to_string()).collect::<String>())
            .collect();
        let mut g = Self::from_table(&format!("S{n}"), Some(names), table)?;
        g.name = format!("S{n}");
        Ok(g)
    }

    /// Direct product, trivially graded; element `(a, b)` has index `a·|B| + b`.
    pub fn product(&self, other: &GradedGroup) -> GradedGroup {
        let (n, m) = (self.order(), other.order());
        let mut table = vec![0; n * m * n * m];
        for a in 0..n {
            for b in 0..m {
                for c in 0..n {
                    for d in 0..m {
                        table[(a * m + b) * n * m + c * m + d] = self.mul(a, c) * m + other.mul(b, d);
                    }
                }
            }
        }
        let names = (0..n * m)
            .map(|k| format!("({},{})", self.names[k / m], other.names[k % m]))
            .collect();
        let inverse = (0..n * m)
            .map(|k| self.inv(k / m) * m + other.inv(k % m))
            .collect();
        let coords = match (&self.coords, &other.coords) {
            (Some(x), Some(y)) => Some(AbelianCoords {
                moduli: x.moduli.iter().chain(&y.moduli).copied().collect(),
                coords: (0..n * m)
                    .map(|k| x.coords[k / m].iter().chain(&y.coords[k % m]).copied().collect())
                    .collect(),
            }),
            _ => None,
        };
        GradedGroup {
            name: format!("{}x{}", self.name, other.name),
            names,
            table,
            identity: self.identity * m + other.identity,
            inverse,
            grading: vec![Sign::Plus; n * m],
            coords,
        }
    }

    /// `G × ℤ₂` graded by the projection onto the second factor.
    pub fn product_z2(&self) -> GradedGroup {
        let z2 = GradedGroup::cyclic(2).expect("Z2");
        let mut g = self.product(&z2);
        g.grading = (0..g.order()).map(|k| Sign::from_odd(k % 2 == 1)).collect();
        g.name = format!("product_Z2:{}", self.name);
        g
    }

    /// Replaces the grading.
    pub fn graded(mut self, grading: Grading) -> Result<GradedGroup> {
        let n = self.order();
        let signs: Vec<Sign> = match grading {
            Grading::Trivial => vec![Sign::Plus; n],
            Grading::Mod2 => {
                let is_cyclic = self.coords.as_ref().is_some_and(|c| c.moduli.len() == 1);
                if !is_cyclic || n % 2 != 0 {
                    return Err(Error::InvalidGroup(format!(
                        "mod2 grading needs a cyclic group of even order, got {}",
                        self.name
                    )));
                }
                (0..n).map(|k| Sign::from_odd(k % 2 == 1)).collect()
            }
            Grading::Reflection => {
                if !self.name.starts_with('D') {
                    return Err(Error::InvalidGroup("reflection grading needs a dihedral group".into()));
                }
                (0..n).map(|k| Sign::from_odd(k >= n / 2)).collect()
            }
            Grading::Sign => {
                if !self.name.starts_with('S') {
                    return Err(Error::InvalidGroup("sign grading needs a symmetric group".into()));
                }
                (0..n).map(|k| Sign::from_odd(permutation_is_odd(&self.names[k]))).collect()
            }
            Grading::Projection => {
                return Err(Error::InvalidGroup("projection grading is only available as product_Z2".into()))
            }
            Grading::Explicit(v) => {
                if v.len() != n {
                    return Err(Error::InvalidGroup("explicit grading has the wrong length".into()));
                }
                v
            }
        };
        for a in 0..n {
            for b in 0..n {
                if signs[self.mul(a, b)] != signs[a] * signs[b] {
                    return Err(Error::InvalidGroup(format!("grading is not a homomorphism at ({a}, {b})")));
                }
            }
        }
        self.grading = signs;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    #[inline]
    pub fn sign(&self, a: usize) -> Sign {
        self.grading[a]
    }

    pub fn element_name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn element_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    pub fn coords(&self) -> Option<&AbelianCoords> {
        self.coords.as_ref()
    }

    pub fn is_graded(&self) -> bool {
        self.grading.iter().any(|s| s.is_odd())
    }

    /// The even subgroup G.
    pub fn kernel(&self) -> Vec<usize> {
        (0..self.order()).filter(|&a| !self.sign(a).is_odd()).collect()
    }

    pub fn odd_elements(&self) -> Vec<usize> {
        (0..self.order()).filter(|&a| self.sign(a).is_odd()).collect()
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        (0..k.unsigned_abs()).fold(self.identity, |acc, _| self.mul(base, acc))
    }

    /// `g x g⁻¹`
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// `ω x^{π(ω)} ω⁻¹`
    pub fn real_conj(&self, w: usize, x: usize) -> usize {
        let y = if self.sign(w).is_odd() { self.inv(x) } else { x };
        self.conj(w, y)
    }

    /// The subgroup of even elements as an ungraded group.
    pub fn kernel_group(&self) -> Result<(GradedGroup, Vec<usize>)> {
        let k = self.kernel();
        let pos = |x: usize| k.iter().position(|&y| y == x).unwrap();
        let table = k.iter().map(|&a| k.iter().map(|&b| pos(self.mul(a, b))).collect()).collect();
        let names = k.iter().map(|&a| self.names[a].clone()).collect();
        let g = GradedGroup::from_table(&format!("ker({})", self.name), Some(names), table)?;
        Ok((g, k))
    }

    /// B(Ĝ): one object `*`, morphisms the elements with the same ids.
    pub fn classifying_groupoid(&self) -> GradedGroupoid {
        self.action_groupoid(1, |_, x| x).expect("trivial action")
    }

    /// The action groupoid X//Ĝ for `X = 0..n_points`, with morphism `(g, x)`
    /// numbered `x·|Ĝ| + g`.
    pub fn action_groupoid(&self, n_points: usize, act: impl Fn(usize, usize) -> usize) -> Result<GradedGroupoid> {
        let n = self.order();
        let table: Vec<usize> = (0..n_points).flat_map(|x| (0..n).map(move |g| (g, x))).map(|(g, x)| act(g, x)).collect();
        let a = |g: usize, x: usize| table[x * n + g];
        for x in 0..n_points {
            if a(self.identity, x) != x {
                return Err(Error::InvalidAction(format!("identity moves point {x}")));
            }
            for g in 0..n {
                if a(g, x) >= n_points {
                    return Err(Error::InvalidAction(format!("image of point {x} out of range")));
                }
                for h in 0..n {
                    if a(self.mul(h, g), x) != a(h, a(g, x)) {
                        return Err(Error::InvalidAction(format!("not an action at ({h}, {g}, {x})")));
                    }
                }
            }
        }
        let objects: Vec<String> = if n_points == 1 {
            vec!["*".into()]
        } else {
            (0..n_points).map(|x| format!("x{x}")).collect()
        };
        let morphisms = (0..n_points)
            .flat_map(|x| (0..n).map(move |g| (g, x)))
            .map(|(g, x)| {
                let name = if n_points == 1 {
                    self.names[g].clone()
                } else {
                    format!("{}|x{x}", self.names[g])
                };
                (name, x as u32, a(g, x) as u32)
            })
            .collect();
        let groupoid = FiniteGroupoid::new(objects, morphisms, |m2, m1| {
            let (g1, x1) = (m1 as usize % n, m1 as usize / n);
            let g2 = m2 as usize % n;
            (x1 * n + self.mul(g2, g1)) as MorId
        })?;
        let grading = (0..n_points).flat_map(|_| self.grading.iter().copied()).collect();
        GradedGroupoid::new(Arc::new(groupoid), grading)
    }
}

fn permutation_is_odd(one_line: &str) -> bool {
    let p: Vec<u32> = one_line.chars().map(|c| c.to_digit(10).unwrap()).collect();
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        let z4 = parse_group_spec("cyclic:4:mod2").unwrap();
        assert_eq!(z4.kernel(), vec![0, 2]);
        assert!(parse_group_spec("cyclic:3:mod2").is_err());
        let s3z2 = parse_group_spec("product_Z2:S3").unwrap();
        assert_eq!(s3z2.order(), 12);
        assert_eq!(s3z2.kernel().len(), 6);
        let d4 = parse_group_spec("dihedral:4:reflection").unwrap();
        assert_eq!(d4.kernel().len(), 4);
        let s3 = parse_group_spec("symmetric:3:sign").unwrap();
        assert_eq!(s3.odd_elements().len(), 3);
        let v = parse_group_spec("product_Z2:Z2xZ2").unwrap();
        assert_eq!(v.order(), 8);
        assert_eq!(v.coords().unwrap().moduli, vec![2, 2, 2]);
        let json = parse_group_spec(r#"{"family": "cyclic", "n": 4, "grading": "mod2"}"#).unwrap();
        assert_eq!(json.kernel(), vec![0, 2]);
        let explicit = parse_group_spec(r#"{"family": "explicit", "table": [[0,1],[1,0]], "grading": [1,-1]}"#).unwrap();
        assert!(explicit.sign(1).is_odd());
        assert!(parse_group_spec(r#"{"family": "explicit", "table": [[0,1],[0,1]]}"#).is_err());
        assert!(parse_group_spec(r#"{"family": "explicit", "table": [[0,1],[1,0]], "grading": [-1,-1]}"#).is_err());
    }

    #[test]
    fn dihedral_relations() {
        let d = GradedGroup::dihedral(4).unwrap();
        let (r, s) = (1, 4);
        assert_eq!(d.pow(r, 4), d.identity());
        assert_eq!(d.mul(s, s), d.identity());
        assert_eq!(d.conj(s, r), d.inv(r));
    }
}
