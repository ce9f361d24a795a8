//! JSON wire format for finite categories: sparse data as coefficient
//! triples `[row, col, "value"]`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::exactlinalg::{Field, Scalar, SparseMatrix};

use super::category::{Arg, FinWuDgCat, HomSpace};
use super::vector::{self, Vector};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HomJson {
    pub src: usize,
    pub tgt: usize,
    pub degrees: Vec<i32>,
    pub names: Vec<String>,
    pub d: Vec<(usize, usize, Scalar)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edge: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CompJson {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    /// `(a, b, a ∘ b)`, zero values included
    pub entries: Vec<(usize, usize, Vec<(usize, Scalar)>)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TowerJson {
    pub args: Vec<Arg>,
    pub value: Vec<(usize, Scalar)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CategoryJson {
    pub field: Field,
    pub objects: Vec<String>,
    pub n_max: usize,
    #[serde(default)]
    pub partial: bool,
    pub homs: Vec<HomJson>,
    pub comp: Vec<CompJson>,
    pub units: Vec<Vec<(usize, Scalar)>>,
    #[serde(default)]
    pub ptower: Vec<TowerJson>,
}

fn sparse(v: &[Scalar]) -> Vec<(usize, Scalar)> {
    v.iter().enumerate().filter(|(_, s)| !s.is_zero()).map(|(i, s)| (i, s.clone())).collect()
}

fn dense(field: Field, n: usize, e: &[(usize, Scalar)]) -> Result<Vector, String> {
    let mut v = vector::zeros(field, n);
    for (i, s) in e {
        *v.get_mut(*i).ok_or_else(|| format!("coordinate {i} out of range {n}"))? = s.to_field(field);
    }
    Ok(v)
}

fn bad_arg(c: &FinWuDgCat, a: &Arg) -> bool {
    match *a {
        Arg::One(x) => x >= c.n_objects(),
        Arg::Mor { src, tgt, idx } => src >= c.n_objects() || tgt >= c.n_objects() || idx >= c.dim(src, tgt),
    }
}

impl CategoryJson {
    pub fn from_category(c: &FinWuDgCat) -> Self {
        let homs = c
            .homs
            .iter()
            .map(|(&(src, tgt), h)| HomJson {
                src,
                tgt,
                degrees: h.degrees.clone(),
                names: h.names.clone(),
                d: h.d.entries().map(|(r, k, s)| (r, k, s.clone())).collect(),
                edge: h.edge.iter().copied().collect(),
            })
            .collect();
        let comp = c
            .comp
            .iter()
            .map(|(&(x, y, z), t)| CompJson {
                x,
                y,
                z,
                entries: t.iter().map(|(&(a, b), v)| (a, b, sparse(v))).collect(),
            })
            .collect();
        CategoryJson {
            field: c.field,
            objects: c.objects.clone(),
            n_max: c.n_max,
            partial: c.partial,
            homs,
            comp,
            units: c.units.iter().map(|u| sparse(u)).collect(),
            ptower: c
                .ptower
                .iter()
                .map(|(args, v)| TowerJson {
                    args: args.clone(),
                    value: sparse(v),
                })
                .collect(),
        }
    }

    pub fn to_category(&self) -> Result<FinWuDgCat, String> {
        let f = self.field;
        let mut c = FinWuDgCat::new(f, self.objects.clone(), self.n_max);
        c.partial = self.partial;
        let no = self.objects.len();
        for h in &self.homs {
            if h.src >= no || h.tgt >= no || h.degrees.len() != h.names.len() {
                return Err(format!("malformed hom ({}, {})", h.src, h.tgt));
            }
            let n = h.degrees.len();
            if h.d.iter().any(|(r, k, _)| *r >= n || *k >= n) {
                return Err(format!("differential entry out of range in ({}, {})", h.src, h.tgt));
            }
            let d = SparseMatrix::from_entries(n, n, h.d.iter().map(|(r, k, s)| (*r, *k, s.to_field(f))));
            let mut hs = HomSpace::new(h.degrees.clone(), h.names.clone(), d);
            hs.edge = h.edge.iter().copied().collect::<BTreeSet<_>>();
            c.set_hom(h.src, h.tgt, hs);
        }
        for t in &self.comp {
            if t.x >= no || t.y >= no || t.z >= no {
                return Err(format!("composition at unknown objects ({}, {}, {})", t.x, t.y, t.z));
            }
            c.comp.entry((t.x, t.y, t.z)).or_default();
            for (a, b, e) in &t.entries {
                if *a >= c.dim(t.y, t.z) || *b >= c.dim(t.x, t.y) {
                    return Err(format!("composition entry out of range at ({}, {}, {})", t.x, t.y, t.z));
                }
                let v = dense(f, c.dim(t.x, t.z), e)?;
                c.set_comp(t.x, t.y, t.z, *a, *b, v);
            }
        }
        if self.units.len() != no {
            return Err("one unit per object expected".into());
        }
        for (x, u) in self.units.iter().enumerate() {
            let v = dense(f, c.dim(x, x), u)?;
            c.set_unit(x, v);
        }
        for t in &self.ptower {
            if t.args.len() < 2 || t.args.iter().any(|a| bad_arg(&c, a)) || !super::category::composable(&t.args) {
                return Err(format!("malformed tower entry {:?}", t.args));
            }
            let (x, y) = (t.args[t.args.len() - 1].src(), t.args[0].tgt());
            let v = dense(f, c.dim(x, y), &t.value)?;
            c.set_p(t.args.clone(), v);
        }
        Ok(c)
    }
}

pub fn to_json(c: &FinWuDgCat) -> String {
    serde_json::to_string_pretty(&CategoryJson::from_category(c)).expect("serializable")
}

pub fn from_json(s: &str) -> Result<FinWuDgCat, String> {
    let j: CategoryJson = serde_json::from_str(s).map_err(|e| e.to_string())?;
    j.to_category()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgcat::construct::{interval_category, random_wu_category};

    #[test]
    fn round_trip() {
        for field in [Field::Rational, Field::prime()] {
            let w = random_wu_category(5, field, &[1, 2], 3).unwrap();
            let back = from_json(&to_json(w.cat())).unwrap();
            assert_eq!(&back, w.cat());
            let i = interval_category(field);
            assert_eq!(from_json(&to_json(&i)).unwrap(), i);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let mut j = CategoryJson::from_category(&interval_category(Field::Rational));
        j.units.pop();
        assert!(j.to_category().is_err());
        assert!(from_json("{").is_err());
    }
}
