use std::collections::HashMap;

use super::{GenTree, Mode};

/// Generator of normal-form trees by exact `(arity, Q, -degree)`.
struct Gen {
    mode: Mode,
    any: HashMap<(usize, usize, usize), Vec<GenTree>>,
    non_m: HashMap<(usize, usize, usize), Vec<GenTree>>,
}

impl Gen {
    fn new(mode: Mode) -> Self {
        Gen {
            mode,
            any: HashMap::new(),
            non_m: HashMap::new(),
        }
    }

    fn all(&mut self, a: usize, q: usize, e: usize) -> Vec<GenTree> {
        if let Some(v) = self.any.get(&(a, q, e)) {
            return v.clone();
        }
        let mut out = self.non_m_trees(a, q, e);
        out.extend(self.m_trees(a, q, e));
        self.any.insert((a, q, e), out.clone());
        out
    }

    fn non_m_trees(&mut self, a: usize, q: usize, e: usize) -> Vec<GenTree> {
        if let Some(v) = self.non_m.get(&(a, q, e)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if (a, q, e) == (1, 0, 0) {
            out.push(GenTree::Leaf);
        }
        if (a, q, e) == (0, 1, 0) {
            out.push(GenTree::J);
        }
        for n in 2..=e + 1 {
            let kmax = if self.mode == Mode::O { n - 1 } else { n };
            for k in 1..=kmax.min(q) {
                let rest_e = e - (n - 1);
                let rest_q = q - k;
                let args = n - k;
                let seqs = self.sequences(args, a, rest_q, rest_e);
                if seqs.is_empty() {
                    continue;
                }
                for slots in subsets(n, k) {
                    for s in &seqs {
                        out.push(GenTree::P {
                            n,
                            slots: slots.clone(),
                            children: s.clone(),
                        });
                    }
                }
            }
        }
        self.non_m.insert((a, q, e), out.clone());
        out
    }

    /// Ordered tuples of `len` arbitrary trees with the given totals.
    fn sequences(&mut self, len: usize, a: usize, q: usize, e: usize) -> Vec<Vec<GenTree>> {
        if len == 0 {
            return if (a, q, e) == (0, 0, 0) { vec![Vec::new()] } else { Vec::new() };
        }
        let mut out = Vec::new();
        for a1 in 0..=a {
            for q1 in 0..=q {
                for e1 in 0..=e {
                    let firsts = self.all(a1, q1, e1);
                    if firsts.is_empty() {
                        continue;
                    }
                    let rests = self.sequences(len - 1, a - a1, q - q1, e - e1);
                    for f in &firsts {
                        for r in &rests {
                            let mut v = Vec::with_capacity(len);
                            v.push(f.clone());
                            v.extend(r.iter().cloned());
                            out.push(v);
                        }
                    }
                }
            }
        }
        out
    }

    fn m_trees(&mut self, a: usize, q: usize, e: usize) -> Vec<GenTree> {
        self.m_children(a, q, e, false)
            .into_iter()
            .filter(|c| c.len() >= 2)
            .map(GenTree::M)
            .collect()
    }

    /// Nonempty sequences of non-`m` trees; in mode O no two adjacent `j`.
    /// `after_j` forbids a leading `j`.
    fn m_children(&mut self, a: usize, q: usize, e: usize, after_j: bool) -> Vec<Vec<GenTree>> {
        let mut out = Vec::new();
        for a1 in 0..=a {
            for q1 in 0..=q {
                for e1 in 0..=e {
                    let firsts = self.non_m_trees(a1, q1, e1);
                    for f in firsts {
                        let is_j = f == GenTree::J;
                        if is_j && after_j && self.mode == Mode::O {
                            continue;
                        }
                        if (a1, q1, e1) == (a, q, e) {
                            out.push(vec![f.clone()]);
                        }
                        let (ra, rq, re) = (a - a1, q - q1, e - e1);
                        if (ra, rq) == (0, 0) {
                            continue;
                        }
                        for r in self.m_children(ra, rq, re, is_j) {
                            let mut v = Vec::with_capacity(r.len() + 1);
                            v.push(f.clone());
                            v.extend(r);
                            out.push(v);
                        }
                    }
                }
            }
        }
        out
    }
}

/// All `k`-subsets of `{1..n}` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..=n {
            cur.push(s);
            rec(s + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Normal-form trees with exactly the given arity, unit weight and degree.
pub fn enumerate_exact(arity: usize, q: usize, degree: i32, mode: Mode) -> Vec<GenTree> {
    assert!(degree <= 0);
    Gen::new(mode).all(arity, q, (-degree) as usize)
}

/// Normal-form trees of arity `n` with `Q <= q_max` and degree
/// `>= degree_min`, sorted by degree and then by encoding.
pub fn enumerate_trees(arity: usize, q_max: usize, degree_min: i32, mode: Mode) -> Vec<GenTree> {
    assert!(degree_min <= 0, "degree_min must be nonpositive");
    let mut g = Gen::new(mode);
    let mut out: Vec<(i32, String, GenTree)> = Vec::new();
    for q in 0..=q_max {
        for e in 0..=(-degree_min) as usize {
            for t in g.all(arity, q, e) {
                assert!(t.count_p() <= q_max && t.count_j() <= q_max);
                assert!(t.count_m() <= arity + 2 * q_max);
                out.push((t.degree(), t.encode(), t));
            }
        }
    }
    out.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    out.into_iter().map(|x| x.2).collect()
}

/// Independent count: generate every tree with arbitrary shape (nested
/// `m`, adjacent `j`, forbidden `p`) within the bounds, then keep the
/// normal ones. Used as a test oracle.
pub fn count_by_brute_force(arity: usize, q_max: usize, degree_min: i32, mode: Mode) -> usize {
    let e_max = (-degree_min) as usize;
    let mut seen = std::collections::BTreeSet::new();
    for q in 0..=q_max {
        for e in 0..=e_max {
            for t in raw_exact(arity, q, e) {
                if t.is_normal(mode) {
                    seen.insert(t.encode());
                }
            }
        }
    }
    seen.len()
}

/// Every tree with arity `a`, unit weight `q` and degree `-e` built from
/// leaves, `j`, `m_l` (`l >= 2`) and `p_{n;I}` (`n >= 2`). Each such tree
/// has `a + q + e >= 1`, so splitting over at least two inputs recurses on
/// strictly smaller weights.
fn raw_exact(a: usize, q: usize, e: usize) -> Vec<GenTree> {
    let mut out = Vec::new();
    match (a, q, e) {
        (1, 0, 0) => out.push(GenTree::Leaf),
        (0, 1, 0) => out.push(GenTree::J),
        _ => {}
    }
    for l in 2..=a + q + e {
        for kids in raw_splits(l, a, q, e) {
            out.push(GenTree::M(kids));
        }
    }
    for n in 2..=e + 1 {
        for k in 0..=n.min(q) {
            for slots in subsets(n, k) {
                for kids in raw_splits(n - k, a, q - k, e - (n - 1)) {
                    out.push(GenTree::P {
                        n,
                        slots: slots.clone(),
                        children: kids,
                    });
                }
            }
        }
    }
    out
}

/// Tuples of `len` raw trees with the given exact totals.
fn raw_splits(len: usize, a: usize, q: usize, e: usize) -> Vec<Vec<GenTree>> {
    if len == 0 {
        return if (a, q, e) == (0, 0, 0) { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for a1 in 0..=a {
        for q1 in 0..=q {
            for e1 in 0..=e {
                let w1 = a1 + q1 + e1;
                if w1 == 0 || (a - a1) + (q - q1) + (e - e1) < len - 1 {
                    continue;
                }
                let firsts = raw_exact(a1, q1, e1);
                if firsts.is_empty() {
                    continue;
                }
                let rests = raw_splits(len - 1, a - a1, q - q1, e - e1);
                for f in &firsts {
                    for r in &rests {
                        let mut v = vec![f.clone()];
                        v.extend(r.iter().cloned());
                        out.push(v);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bases() {
        for mode in [Mode::O, Mode::OPrime] {
            let b = enumerate_trees(2, 0, 0, mode);
            assert_eq!(b, vec![GenTree::m_leaves(2)]);
        }
        assert_eq!(enumerate_trees(0, 1, 0, Mode::O), vec![GenTree::J]);
        let deg = |v: Vec<GenTree>| v.into_iter().filter(|t| t.degree() == -1).count();
        assert_eq!(deg(enumerate_trees(0, 2, -1, Mode::OPrime)), 3);
        assert_eq!(deg(enumerate_trees(0, 2, -1, Mode::O)), 2);
    }

    #[test]
    fn output_is_normal_sorted_and_in_bounds() {
        for mode in [Mode::O, Mode::OPrime] {
            let b = enumerate_trees(2, 3, -2, mode);
            for t in &b {
                assert!(t.is_normal(mode), "{t}");
                assert_eq!(super::super::normalize(t, mode).as_ref(), Some(t));
                let s = t.stats();
                assert!(s.q <= 3 && s.degree >= -2 && s.arity == 2);
            }
            let keys: Vec<(i32, String)> = b.iter().map(|t| (t.degree(), t.encode())).collect();
            let mut sorted = keys.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(keys, sorted);
        }
    }

    #[test]
    fn subsets_count() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }
}
