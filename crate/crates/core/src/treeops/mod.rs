//! Planar trees over the signature `{m, j, p_{n;I}}`: normal forms,
//! grafting with Koszul signs, statistics and truncated enumeration.

mod enumerate;
mod rewrite;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use enumerate::{count_by_brute_force, enumerate_exact, enumerate_trees};
pub use rewrite::{normalize_stepwise, rewrite_once, Order, Step};

/// Which operad the trees live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    /// `p_n(1,…,1) = 0` for `n >= 2` and `m(j,j) = j`
    O,
    /// both relations dropped
    OPrime,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::O => "O",
            Mode::OPrime => "Oprime",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "O" | "o" => Some(Mode::O),
            "Oprime" | "oprime" | "O'" | "Op" => Some(Mode::OPrime),
            _ => None,
        }
    }
}

/// Vertex label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GenSig {
    M(usize),
    J,
    P { n: usize, slots: Vec<usize> },
}

impl GenSig {
    pub fn arity(&self) -> usize {
        match self {
            GenSig::M(l) => *l,
            GenSig::J => 0,
            GenSig::P { n, slots } => n - slots.len(),
        }
    }

    pub fn degree(&self) -> i32 {
        match self {
            GenSig::P { n, .. } => 1 - *n as i32,
            _ => 0,
        }
    }

    /// Whether this label may appear in a normal-form tree of `mode`.
    pub fn allowed(&self, mode: Mode) -> bool {
        match self {
            GenSig::M(l) => *l >= 2,
            GenSig::J => true,
            GenSig::P { n, slots } => {
                let k = slots.len();
                *n >= 2
                    && k >= 1
                    && (k < *n || mode == Mode::OPrime)
                    && slots.windows(2).all(|w| w[0] < w[1])
                    && slots.iter().all(|&s| s >= 1 && s <= *n)
            }
        }
    }
}

/// Planar rooted tree. Leaves are numbered left to right by position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenTree {
    Leaf,
    J,
    M(Vec<GenTree>),
    P {
        n: usize,
        slots: Vec<usize>,
        children: Vec<GenTree>,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("position {pos} out of range for arity {arity}")]
    Position { pos: usize, arity: usize },
    #[error("cannot parse tree: {0}")]
    Parse(String),
}

/// Statistics used by the truncation and the filtration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    /// sum of `n - k` over `p` vertices
    pub sharp: usize,
    /// `p` vertices other than `p_n(1,…,1)`
    pub sharp_p: usize,
    /// unit weight: slot count plus `j` count
    pub q: usize,
    pub degree: i32,
    pub arity: usize,
}

impl GenTree {
    pub fn m(children: Vec<GenTree>) -> GenTree {
        GenTree::M(children)
    }

    /// `m_l` on `l` leaves.
    pub fn m_leaves(l: usize) -> GenTree {
        GenTree::M(vec![GenTree::Leaf; l])
    }

    /// `p_{n;slots}` applied to leaves.
    pub fn p(n: usize, slots: &[usize]) -> GenTree {
        GenTree::P {
            n,
            slots: slots.to_vec(),
            children: vec![GenTree::Leaf; n - slots.len()],
        }
    }

    pub fn p_with(n: usize, slots: &[usize], children: Vec<GenTree>) -> GenTree {
        assert_eq!(children.len(), n - slots.len());
        GenTree::P {
            n,
            slots: slots.to_vec(),
            children,
        }
    }

    /// Identity operation (the bare leaf).
    pub fn id() -> GenTree {
        GenTree::Leaf
    }

    pub fn label(&self) -> Option<GenSig> {
        match self {
            GenTree::Leaf => None,
            GenTree::J => Some(GenSig::J),
            GenTree::M(c) => Some(GenSig::M(c.len())),
            GenTree::P { n, slots, .. } => Some(GenSig::P {
                n: *n,
                slots: slots.clone(),
            }),
        }
    }

    pub fn children(&self) -> &[GenTree] {
        match self {
            GenTree::M(c) | GenTree::P { children: c, .. } => c,
            _ => &[],
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GenTree::Leaf => 1,
            GenTree::J => 0,
            _ => self.children().iter().map(GenTree::arity).sum(),
        }
    }

    pub fn degree(&self) -> i32 {
        let own = match self {
            GenTree::P { n, .. } => 1 - *n as i32,
            _ => 0,
        };
        own + self.children().iter().map(GenTree::degree).sum::<i32>()
    }

    pub fn stats(&self) -> TreeStats {
        let mut s = TreeStats {
            sharp: 0,
            sharp_p: 0,
            q: 0,
            degree: 0,
            arity: 0,
        };
        self.accumulate(&mut s);
        s
    }

    fn accumulate(&self, s: &mut TreeStats) {
        match self {
            GenTree::Leaf => s.arity += 1,
            GenTree::J => s.q += 1,
            GenTree::M(_) => {}
            GenTree::P { n, slots, .. } => {
                let k = slots.len();
                s.sharp += n - k;
                if k < *n {
                    s.sharp_p += 1;
                }
                s.q += k;
                s.degree += 1 - *n as i32;
            }
        }
        for c in self.children() {
            c.accumulate(s);
        }
    }

    pub fn unit_weight(&self) -> usize {
        self.stats().q
    }

    /// `♯(T) - ♯_p(T)`.
    pub fn filtration_level(&self) -> usize {
        let s = self.stats();
        s.sharp - s.sharp_p
    }

    pub fn has_p(&self) -> bool {
        matches!(self, GenTree::P { .. }) || self.children().iter().any(GenTree::has_p)
    }

    pub fn count_vertices(&self) -> usize {
        let own = usize::from(!matches!(self, GenTree::Leaf));
        own + self.children().iter().map(GenTree::count_vertices).sum::<usize>()
    }

    pub fn count_p(&self) -> usize {
        usize::from(matches!(self, GenTree::P { .. })) + self.children().iter().map(GenTree::count_p).sum::<usize>()
    }

    pub fn count_j(&self) -> usize {
        usize::from(matches!(self, GenTree::J)) + self.children().iter().map(GenTree::count_j).sum::<usize>()
    }

    pub fn count_m(&self) -> usize {
        usize::from(matches!(self, GenTree::M(_))) + self.children().iter().map(GenTree::count_m).sum::<usize>()
    }

    /// Preorder encoding: `(m_l)`, `(j)`, `(p n [slots])`, leaves `*`.
    pub fn encode(&self) -> String {
        let mut out = Vec::new();
        self.encode_into(&mut out);
        out.join(" ")
    }

    fn encode_into(&self, out: &mut Vec<String>) {
        match self {
            GenTree::Leaf => out.push("*".into()),
            GenTree::J => out.push("(j)".into()),
            GenTree::M(c) => out.push(format!("(m_{})", c.len())),
            GenTree::P { n, slots, .. } => {
                let s: Vec<String> = slots.iter().map(usize::to_string).collect();
                out.push(format!("(p {n} [{}])", s.join(",")));
            }
        }
        for c in self.children() {
            c.encode_into(out);
        }
    }

    pub fn decode(s: &str) -> Result<GenTree, TreeError> {
        let toks = tokenize(s)?;
        let mut pos = 0;
        let t = parse_tokens(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(TreeError::Parse(format!("trailing input after token {pos}")));
        }
        Ok(t)
    }

    /// Whether the tree satisfies every normal-form rule of `mode`.
    pub fn is_normal(&self, mode: Mode) -> bool {
        match self {
            GenTree::Leaf | GenTree::J => true,
            GenTree::M(c) => {
                c.len() >= 2
                    && c.iter().all(|x| !matches!(x, GenTree::M(_)))
                    && (mode == Mode::OPrime
                        || c.windows(2).all(|w| !(w[0] == GenTree::J && w[1] == GenTree::J)))
                    && c.iter().all(|x| x.is_normal(mode))
            }
            GenTree::P { .. } => {
                self.label().unwrap().allowed(mode) && self.children().iter().all(|x| x.is_normal(mode))
            }
        }
    }
}

impl fmt::Display for GenTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

fn tokenize(s: &str) -> Result<Vec<String>, TreeError> {
    let mut toks = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&ch) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
        } else if ch == '*' {
            chars.next();
            toks.push("*".to_string());
        } else if ch == '(' {
            let mut t = String::new();
            for c in chars.by_ref() {
                t.push(c);
                if c == ')' {
                    break;
                }
            }
            if !t.ends_with(')') {
                return Err(TreeError::Parse("unbalanced parenthesis".into()));
            }
            toks.push(t);
        } else {
            return Err(TreeError::Parse(format!("unexpected character {ch:?}")));
        }
    }
    Ok(toks)
}

fn parse_tokens(toks: &[String], pos: &mut usize) -> Result<GenTree, TreeError> {
    let tok = toks
        .get(*pos)
        .ok_or_else(|| TreeError::Parse("unexpected end of input".into()))?;
    *pos += 1;
    if tok == "*" {
        return Ok(GenTree::Leaf);
    }
    let inner = &tok[1..tok.len() - 1];
    if inner == "j" {
        return Ok(GenTree::J);
    }
    if let Some(l) = inner.strip_prefix("m_") {
        let l: usize = l.parse().map_err(|_| TreeError::Parse(format!("bad label {tok}")))?;
        let mut c = Vec::with_capacity(l);
        for _ in 0..l {
            c.push(parse_tokens(toks, pos)?);
        }
        return Ok(GenTree::M(c));
    }
    if let Some(rest) = inner.strip_prefix("p ") {
        let (n, sl) = rest
            .split_once(' ')
            .ok_or_else(|| TreeError::Parse(format!("bad label {tok}")))?;
        let n: usize = n.parse().map_err(|_| TreeError::Parse(format!("bad n in {tok}")))?;
        let sl = sl.trim().trim_start_matches('[').trim_end_matches(']');
        let slots: Vec<usize> = if sl.is_empty() {
            Vec::new()
        } else {
            sl.split(',')
                .map(|x| x.trim().parse().map_err(|_| TreeError::Parse(format!("bad slot in {tok}"))))
                .collect::<Result<_, _>>()?
        };
        if slots.len() > n {
            return Err(TreeError::Parse(format!("too many slots in {tok}")));
        }
        let mut c = Vec::new();
        for _ in 0..n - slots.len() {
            c.push(parse_tokens(toks, pos)?);
        }
        return Ok(GenTree::P { n, slots, children: c });
    }
    Err(TreeError::Parse(format!("unknown label {tok}")))
}

/// Normal form, or `None` when a zero relation applies.
pub fn normalize(t: &GenTree, mode: Mode) -> Option<GenTree> {
    match t {
        GenTree::Leaf => Some(GenTree::Leaf),
        GenTree::J => Some(GenTree::J),
        GenTree::P { n, slots, children } => {
            let k = slots.len();
            assert_eq!(children.len(), n - k, "malformed p vertex");
            if k == 0 && *n >= 2 {
                return None;
            }
            if k == *n && *n >= 2 && mode == Mode::O {
                return None;
            }
            let ch: Vec<GenTree> = children
                .iter()
                .map(|c| normalize(c, mode))
                .collect::<Option<_>>()?;
            if *n == 1 {
                return Some(if k == 1 { GenTree::J } else { ch.into_iter().next().unwrap() });
            }
            Some(GenTree::P {
                n: *n,
                slots: slots.clone(),
                children: ch,
            })
        }
        GenTree::M(children) => {
            assert!(!children.is_empty(), "m vertex without inputs");
            let mut flat: Vec<GenTree> = Vec::with_capacity(children.len());
            for c in children {
                match normalize(c, mode)? {
                    GenTree::M(inner) => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            if mode == Mode::O {
                flat.dedup_by(|b, a| *a == GenTree::J && *b == GenTree::J);
            }
            if flat.len() == 1 {
                flat.pop()
            } else {
                Some(GenTree::M(flat))
            }
        }
    }
}

/// Substitutes `inputs[i]` for the `i`-th leaf of `t` without normalizing.
/// Returns the Koszul sign of moving each input past the vertices of `t`
/// that follow its leaf in preorder.
pub fn graft(t: &GenTree, inputs: &[GenTree]) -> (bool, GenTree) {
    assert_eq!(inputs.len(), t.arity(), "graft needs one input per leaf");
    let total = t.degree();
    let mut seen = 0i32;
    let mut idx = 0usize;
    let mut odd = false;
    let out = graft_rec(t, inputs, total, &mut seen, &mut idx, &mut odd);
    (odd, out)
}

fn graft_rec(t: &GenTree, inputs: &[GenTree], total: i32, seen: &mut i32, idx: &mut usize, odd: &mut bool) -> GenTree {
    match t {
        GenTree::Leaf => {
            let c = inputs[*idx].clone();
            *idx += 1;
            let after = total - *seen;
            if (c.degree() * after).rem_euclid(2) == 1 {
                *odd = !*odd;
            }
            c
        }
        GenTree::J => GenTree::J,
        GenTree::M(ch) => GenTree::M(ch.iter().map(|c| graft_rec(c, inputs, total, seen, idx, odd)).collect()),
        GenTree::P { n, slots, children } => {
            *seen += 1 - *n as i32;
            GenTree::P {
                n: *n,
                slots: slots.clone(),
                children: children
                    .iter()
                    .map(|c| graft_rec(c, inputs, total, seen, idx, odd))
                    .collect(),
            }
        }
    }
}

/// `outer ∘_position inner`, normalized. `None` is the zero element; the
/// boolean is true when the result carries a minus sign.
pub fn compose(outer: &GenTree, position: usize, inner: &GenTree, mode: Mode) -> Result<Option<(bool, GenTree)>, TreeError> {
    let ar = outer.arity();
    if position == 0 || position > ar {
        return Err(TreeError::Position { pos: position, arity: ar });
    }
    let mut inputs = vec![GenTree::Leaf; ar];
    inputs[position - 1] = inner.clone();
    let (neg, raw) = graft(outer, &inputs);
    Ok(normalize(&raw, mode).map(|t| (neg, t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p21() -> GenTree {
        GenTree::p(2, &[1])
    }

    #[test]
    fn identity_is_unit() {
        let t = GenTree::p(3, &[2]);
        for i in 1..=2 {
            assert_eq!(compose(&t, i, &GenTree::id(), Mode::O).unwrap(), Some((false, t.clone())));
        }
        assert_eq!(compose(&GenTree::id(), 1, &t, Mode::O).unwrap(), Some((false, t.clone())));
    }

    #[test]
    fn m_flattens() {
        let m = GenTree::m_leaves(2);
        let (neg, t) = compose(&m, 1, &m, Mode::O).unwrap().unwrap();
        assert!(!neg);
        assert_eq!(t, GenTree::m_leaves(3));
    }

    #[test]
    fn p21_on_j() {
        let (neg, t) = compose(&p21(), 1, &GenTree::J, Mode::O).unwrap().unwrap();
        assert!(!neg);
        let s = t.stats();
        assert_eq!((s.arity, s.degree, s.q), (0, -1, 2));
    }

    #[test]
    fn position_checked() {
        assert_eq!(
            compose(&p21(), 2, &GenTree::J, Mode::O),
            Err(TreeError::Position { pos: 2, arity: 1 })
        );
    }

    #[test]
    fn relations() {
        let mjj = GenTree::m(vec![GenTree::J, GenTree::J]);
        assert_eq!(normalize(&mjj, Mode::O), Some(GenTree::J));
        assert_eq!(normalize(&mjj, Mode::OPrime), Some(mjj.clone()));
        assert_eq!(normalize(&GenTree::p(2, &[1, 2]), Mode::O), None);
        assert!(normalize(&GenTree::p(2, &[1, 2]), Mode::OPrime).is_some());
        assert_eq!(normalize(&GenTree::p(1, &[1]), Mode::O), Some(GenTree::J));
        assert_eq!(normalize(&GenTree::p(1, &[]), Mode::O), Some(GenTree::Leaf));
        assert_eq!(normalize(&GenTree::p(2, &[]), Mode::OPrime), None);
        let t = GenTree::m(vec![GenTree::Leaf, GenTree::p(3, &[1, 3])]);
        assert_eq!(normalize(&t, Mode::O), Some(t.clone()));
    }

    #[test]
    fn stats_examples() {
        let s = GenTree::m_leaves(2).stats();
        assert_eq!((s.sharp, s.sharp_p, s.q, s.degree, s.arity), (0, 0, 0, 0, 2));
        let s = GenTree::p(3, &[1, 3]).stats();
        assert_eq!((s.sharp, s.sharp_p, s.q, s.degree, s.arity), (1, 1, 2, -2, 1));
        let s = GenTree::J.stats();
        assert_eq!((s.sharp, s.q, s.degree, s.arity), (0, 1, 0, 0));
        assert_eq!(GenTree::p(3, &[1]).filtration_level(), 1);
        assert_eq!(GenTree::p(3, &[1, 3]).filtration_level(), 0);
        let p2 = GenTree::p(2, &[1, 2]);
        assert_eq!((p2.stats().sharp, p2.stats().sharp_p), (0, 0));
    }

    #[test]
    fn encoding_roundtrip() {
        let t = GenTree::m(vec![
            GenTree::J,
            GenTree::p_with(3, &[2], vec![GenTree::Leaf, GenTree::m_leaves(2)]),
        ]);
        let e = t.encode();
        assert_eq!(e, "(m_2) (j) (p 3 [2]) * (m_2) * *");
        assert_eq!(GenTree::decode(&e).unwrap(), t);
        assert!(GenTree::decode("(m_2) *").is_err());
    }

    #[test]
    fn graft_sign_parallel_odd() {
        // m(p21, p21) with the second leaf replaced by a degree -1 tree: it
        // moves past nothing; replacing the first moves past the second p.
        let outer = GenTree::m(vec![p21(), p21()]);
        let x = compose(&p21(), 1, &GenTree::J, Mode::O).unwrap().unwrap().1;
        let (neg1, _) = compose(&outer, 1, &x, Mode::O).unwrap().unwrap();
        let (neg2, _) = compose(&outer, 2, &x, Mode::O).unwrap().unwrap();
        assert!(neg1);
        assert!(!neg2);
    }
}
