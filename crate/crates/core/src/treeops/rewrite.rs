//! One-rule-at-a-time rewriting, used to cross-check `normalize` against
//! different redex orders.

use super::{GenTree, Mode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    LeftFirst,
    RightFirst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Rewritten(GenTree),
    Zero,
    Normal,
}

/// Redexes of `t` in preorder, as paths of child indices.
fn redexes(t: &GenTree, mode: Mode, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let here = match t {
        GenTree::M(c) => {
            c.len() < 2
                || c.iter().any(|x| matches!(x, GenTree::M(_)))
                || (mode == Mode::O && c.windows(2).any(|w| w[0] == GenTree::J && w[1] == GenTree::J))
        }
        GenTree::P { n, slots, .. } => {
            let k = slots.len();
            *n == 1 || (k == 0 && *n >= 2) || (mode == Mode::O && k == *n && *n >= 2)
        }
        _ => false,
    };
    if here {
        out.push(path.clone());
    }
    for (i, c) in t.children().iter().enumerate() {
        path.push(i);
        redexes(c, mode, path, out);
        path.pop();
    }
}

/// Applies one elementary rule at the vertex `t` (which must be a redex).
/// Order decides which sub-rule fires when several apply at the vertex.
fn fire(t: &GenTree, mode: Mode, order: Order) -> Option<GenTree> {
    match t {
        GenTree::P { n, slots, children } => {
            let k = slots.len();
            if *n == 1 {
                Some(if k == 1 { GenTree::J } else { children[0].clone() })
            } else {
                None
            }
        }
        GenTree::M(c) => {
            if c.len() == 1 {
                return Some(c[0].clone());
            }
            let mut idx: Vec<usize> = Vec::new();
            for (i, x) in c.iter().enumerate() {
                if matches!(x, GenTree::M(_)) {
                    idx.push(2 * i);
                }
                if mode == Mode::O && i + 1 < c.len() && *x == GenTree::J && c[i + 1] == GenTree::J {
                    idx.push(2 * i + 1);
                }
            }
            let pick = match order {
                Order::LeftFirst => idx[0],
                Order::RightFirst => *idx.last().unwrap(),
            };
            let i = pick / 2;
            let mut v = c.clone();
            if pick % 2 == 0 {
                let GenTree::M(inner) = v.remove(i) else { unreachable!() };
                for (o, x) in inner.into_iter().enumerate() {
                    v.insert(i + o, x);
                }
            } else {
                v.remove(i + 1);
            }
            Some(GenTree::M(v))
        }
        _ => unreachable!(),
    }
}

fn replace_at(t: &GenTree, path: &[usize], new: GenTree) -> GenTree {
    if path.is_empty() {
        return new;
    }
    let mut t = t.clone();
    let (GenTree::M(c) | GenTree::P { children: c, .. }) = &mut t else {
        unreachable!()
    };
    c[path[0]] = replace_at(&c[path[0]], &path[1..], new);
    t
}

fn subtree<'a>(t: &'a GenTree, path: &[usize]) -> &'a GenTree {
    path.iter().fold(t, |acc, &i| &acc.children()[i])
}

/// A single rewrite at the first or last redex in preorder.
pub fn rewrite_once(t: &GenTree, mode: Mode, order: Order) -> Step {
    let mut rs = Vec::new();
    redexes(t, mode, &mut Vec::new(), &mut rs);
    let path = match order {
        Order::LeftFirst => rs.first(),
        Order::RightFirst => rs.last(),
    };
    let Some(path) = path else { return Step::Normal };
    match fire(subtree(t, path), mode, order) {
        Some(new) => Step::Rewritten(replace_at(t, path, new)),
        None => Step::Zero,
    }
}

/// Normal form reached by repeated single steps.
pub fn normalize_stepwise(t: &GenTree, mode: Mode, order: Order) -> Option<GenTree> {
    let mut cur = t.clone();
    loop {
        match rewrite_once(&cur, mode, order) {
            Step::Normal => return Some(cur),
            Step::Zero => return None,
            Step::Rewritten(n) => cur = n,
        }
    }
}
