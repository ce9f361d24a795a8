//! The differential on trees.
//!
//! On a generator, with inputs of `p_n` written `a_1, …, a_n` (each an
//! operadic argument or a unit slot), the A∞-functor identity for
//! `p: C ⊕ k_C → C` reads
//!
//! ```text
//! d p_n = Σ_{r=1}^{n-1} (-1)^{r-1} p_{n-1}(…, a_r·a_{r+1}, …)
//!       - Σ_{l=1}^{n-1} (-1)^{l-1} m(p_l(a_1..a_l), p_{n-l}(a_{l+1}..a_n))
//! ```
//!
//! where products are taken in `C ⊕ k_C`: `1·1 = 1`, `1·f = f·1 = f`, and
//! `f·g = m(f, g)`. Elements are ordered vertex lists in preorder, so the
//! Leibniz rule picks up `(-1)^{deg of vertices before v}` and grafting an
//! output tree back in moves each input subtree past the vertices that
//! follow its leaf.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::treeops::{graft, normalize, GenTree, Mode};

/// Deliberate faults for exercising the failure paths of the verifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// flip the sign of the `r`-sum term at `r = 1`
    FlipMergeSign,
}

/// Integer linear combination of normal-form trees.
pub type Chain = BTreeMap<GenTree, i64>;

pub(crate) fn add_term(acc: &mut Chain, t: GenTree, c: i64) {
    use std::collections::btree_map::Entry;
    if c == 0 {
        return;
    }
    match acc.entry(t) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if *o.get() == 0 {
                o.remove();
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Input {
    Slot,
    Arg,
}

/// Raw (unnormalized) terms of `d p_{n;slots}` as trees on `n - k` leaves.
pub fn generator_terms(n: usize, slots: &[usize], fault: Fault) -> Vec<(i64, GenTree)> {
    let inputs: Vec<Input> = (1..=n)
        .map(|i| if slots.contains(&i) { Input::Slot } else { Input::Arg })
        .collect();
    let mut out = Vec::new();
    for r in 1..n {
        let mut sign = if (r - 1) % 2 == 0 { 1 } else { -1 };
        if fault == Fault::FlipMergeSign && r == 1 {
            sign = -sign;
        }
        let (a, b) = (inputs[r - 1], inputs[r]);
        let merged = match (a, b) {
            (Input::Slot, Input::Slot) => Input::Slot,
            _ => Input::Arg,
        };
        let mut new_inputs = inputs[..r - 1].to_vec();
        new_inputs.push(merged);
        new_inputs.extend_from_slice(&inputs[r + 1..]);
        let both_args = a == Input::Arg && b == Input::Arg;
        let merged_pos = r - 1;
        let mut new_slots = Vec::new();
        let mut children = Vec::new();
        for (i, x) in new_inputs.iter().enumerate() {
            match x {
                Input::Slot => new_slots.push(i + 1),
                Input::Arg => children.push(if both_args && i == merged_pos {
                    GenTree::m_leaves(2)
                } else {
                    GenTree::Leaf
                }),
            }
        }
        out.push((
            sign,
            GenTree::P {
                n: n - 1,
                slots: new_slots,
                children,
            },
        ));
    }
    for l in 1..n {
        let sign = if (l - 1) % 2 == 0 { -1 } else { 1 };
        let left = sub_p(&inputs[..l]);
        let right = sub_p(&inputs[l..]);
        out.push((sign, GenTree::M(vec![left, right])));
    }
    out
}

fn sub_p(inputs: &[Input]) -> GenTree {
    let slots: Vec<usize> = inputs
        .iter()
        .enumerate()
        .filter(|(_, x)| **x == Input::Slot)
        .map(|(i, _)| i + 1)
        .collect();
    GenTree::p(inputs.len(), &slots)
}

/// Differential on normal-form trees in a fixed mode, memoizing
/// generator images.
pub struct Differential {
    mode: Mode,
    fault: Fault,
    gens: Mutex<HashMap<(usize, Vec<usize>), Vec<(i64, GenTree)>>>,
}

impl Differential {
    pub fn new(mode: Mode) -> Self {
        Self::with_fault(mode, Fault::None)
    }

    pub fn with_fault(mode: Mode, fault: Fault) -> Self {
        Differential {
            mode,
            fault,
            gens: Mutex::new(HashMap::new()),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Normalized image of a generator, as trees on leaves.
    pub fn of_generator(&self, n: usize, slots: &[usize]) -> Vec<(i64, GenTree)> {
        let key = (n, slots.to_vec());
        if let Some(v) = self.gens.lock().unwrap().get(&key) {
            return v.clone();
        }
        let mut acc = Chain::new();
        for (c, t) in generator_terms(n, slots, self.fault) {
            if let Some(t) = normalize(&t, self.mode) {
                add_term(&mut acc, t, c);
            }
        }
        let v: Vec<(i64, GenTree)> = acc.into_iter().map(|(t, c)| (c, t)).collect();
        self.gens.lock().unwrap().insert(key, v.clone());
        v
    }

    /// `d t` for a normal-form tree.
    pub fn of_tree(&self, t: &GenTree) -> Chain {
        let mut acc = Chain::new();
        for (c, s) in self.raw(t) {
            if let Some(s) = normalize(&s, self.mode) {
                add_term(&mut acc, s, c);
            }
        }
        acc
    }

    /// Summands of `d t` before the final normalization.
    fn raw(&self, t: &GenTree) -> Vec<(i64, GenTree)> {
        let children = t.children();
        let mut out = Vec::new();
        if let GenTree::P { n, slots, .. } = t {
            for (c, img) in self.of_generator(*n, slots) {
                let (neg, g) = graft(&img, children);
                out.push((if neg { -c } else { c }, g));
            }
        }
        let mut before = match t {
            GenTree::P { n, .. } => 1 - *n as i32,
            _ => 0,
        };
        for (i, child) in children.iter().enumerate() {
            let s = if before.rem_euclid(2) == 1 { -1 } else { 1 };
            for (c, img) in self.raw(child) {
                let mut kids = children.to_vec();
                kids[i] = img;
                out.push((s * c, rebuild(t, kids)));
            }
            before += child.degree();
        }
        out
    }
}

fn rebuild(t: &GenTree, kids: Vec<GenTree>) -> GenTree {
    match t {
        GenTree::M(_) => GenTree::M(kids),
        GenTree::P { n, slots, .. } => GenTree::P {
            n: *n,
            slots: slots.clone(),
            children: kids,
        },
        _ => unreachable!("leaves and j have no inputs"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(v: &[(i64, GenTree)]) -> Chain {
        let mut c = Chain::new();
        for (k, t) in v {
            add_term(&mut c, t.clone(), *k);
        }
        c
    }

    #[test]
    fn d_m_and_j_vanish() {
        for mode in [Mode::O, Mode::OPrime] {
            let d = Differential::new(mode);
            assert!(d.of_tree(&GenTree::m_leaves(2)).is_empty());
            assert!(d.of_tree(&GenTree::J).is_empty());
        }
    }

    #[test]
    fn d_p21() {
        let d = Differential::new(Mode::O);
        let got = d.of_tree(&GenTree::p(2, &[1]));
        let want = chain(&[(1, GenTree::Leaf), (-1, GenTree::m(vec![GenTree::J, GenTree::Leaf]))]);
        assert_eq!(got, want);
    }

    #[test]
    fn d_p2_ones_in_oprime() {
        let d = Differential::new(Mode::OPrime);
        let got = d.of_tree(&GenTree::p(2, &[1, 2]));
        // m(j,j) - j up to the global sign
        let want = chain(&[(1, GenTree::J), (-1, GenTree::m(vec![GenTree::J, GenTree::J]))]);
        assert_eq!(got, want);
    }

    #[test]
    fn d_p3_ones_in_oprime() {
        let d = Differential::new(Mode::OPrime);
        let got = d.of_tree(&GenTree::p(3, &[1, 2, 3]));
        let p2 = GenTree::p(2, &[1, 2]);
        // the two merge terms cancel, leaving m(j,p2) - m(p2,j) up to sign
        let want = chain(&[
            (-1, GenTree::m(vec![GenTree::J, p2.clone()])),
            (1, GenTree::m(vec![p2, GenTree::J])),
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn strict_part_closes() {
        // d p_{2;∅} = m - m = 0 before the zero relation is applied
        let terms = generator_terms(2, &[], Fault::None);
        let mut acc = Chain::new();
        for (c, t) in terms {
            add_term(&mut acc, normalize(&t, Mode::O).unwrap_or(GenTree::J), c);
        }
        assert!(acc.is_empty());
    }
}
