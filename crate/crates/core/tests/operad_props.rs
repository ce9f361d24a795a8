use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;
use wucat::treeops::{
    compose, count_by_brute_force, enumerate_trees, normalize, normalize_stepwise, GenTree, Mode, Order,
};
use wucat::wuoperad::{project_assoc, split_by_level, Chain, Differential, OperadElement};

fn pool(mode: Mode) -> &'static [GenTree] {
    static O: OnceLock<Vec<GenTree>> = OnceLock::new();
    static OP: OnceLock<Vec<GenTree>> = OnceLock::new();
    let cell = if mode == Mode::O { &O } else { &OP };
    cell.get_or_init(|| (0..=3).flat_map(|n| enumerate_trees(n, 2, -2, mode)).collect())
}

fn mode_strategy() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::O), Just(Mode::OPrime)]
}

fn pick(mode: Mode, i: usize) -> GenTree {
    let p = pool(mode);
    p[i % p.len()].clone()
}

/// Arbitrary, usually non-normal trees.
fn raw_tree() -> impl Strategy<Value = GenTree> {
    let leaf = prop_oneof![Just(GenTree::Leaf), Just(GenTree::J)];
    leaf.prop_recursive(4, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(GenTree::M),
            (1usize..4, prop::collection::vec(any::<bool>(), 3), prop::collection::vec(inner, 3)).prop_map(
                |(n, mask, kids)| {
                    let slots: Vec<usize> = (1..=n).filter(|i| mask[i - 1]).collect();
                    let children = kids.into_iter().take(n - slots.len()).collect();
                    GenTree::P { n, slots, children }
                }
            ),
        ]
    })
}

fn signed(x: Option<(bool, GenTree)>) -> Chain {
    let mut c = Chain::new();
    if let Some((neg, t)) = x {
        c.insert(t, if neg { -1 } else { 1 });
    }
    c
}

fn add(acc: &mut Chain, t: GenTree, c: i64) {
    let e = acc.entry(t.clone()).or_insert(0);
    *e += c;
    if *e == 0 {
        acc.remove(&t);
    }
}

/// Bilinear extension of `∘_i`.
fn compose_chains(a: &Chain, i: usize, b: &Chain, mode: Mode) -> Chain {
    let mut out = Chain::new();
    for (s, x) in a {
        for (t, y) in b {
            if let Some((neg, r)) = compose(s, i, t, mode).unwrap() {
                add(&mut out, r, if neg { -x * y } else { x * y });
            }
        }
    }
    out
}

fn single(t: &GenTree) -> Chain {
    let mut c = Chain::new();
    c.insert(t.clone(), 1);
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalize_is_idempotent_and_confluent(t in raw_tree(), mode in mode_strategy()) {
        let n = normalize(&t, mode);
        if let Some(n) = &n {
            prop_assert!(n.is_normal(mode));
            let again = normalize(n, mode);
            prop_assert_eq!(again.as_ref(), Some(n));
            prop_assert_eq!(n.arity(), t.arity());
            prop_assert_eq!(n.degree(), t.degree());
        }
        let left = normalize_stepwise(&t, mode, Order::LeftFirst);
        let right = normalize_stepwise(&t, mode, Order::RightFirst);
        prop_assert_eq!(&left, &n);
        prop_assert_eq!(&right, &n);
    }

    #[test]
    fn encoding_round_trips(mode in mode_strategy(), i in any::<usize>()) {
        let t = pick(mode, i);
        prop_assert_eq!(GenTree::decode(&t.encode()).unwrap(), t);
    }

    #[test]
    fn sequential_associativity(mode in mode_strategy(), ia in any::<usize>(), ib in any::<usize>(),
                                ic in any::<usize>(), i in any::<usize>(), j in any::<usize>()) {
        let (a, b, c) = (pick(mode, ia), pick(mode, ib), pick(mode, ic));
        prop_assume!(a.arity() >= 1 && b.arity() >= 1);
        let i = 1 + i % a.arity();
        let j = 1 + j % b.arity();
        let left = compose_chains(&signed(compose(&a, i, &b, mode).unwrap()), i + j - 1, &single(&c), mode);
        let right = compose_chains(&single(&a), i, &signed(compose(&b, j, &c, mode).unwrap()), mode);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn parallel_associativity(mode in mode_strategy(), ia in any::<usize>(), ib in any::<usize>(),
                              ic in any::<usize>(), i in any::<usize>(), k in any::<usize>()) {
        let (a, b, c) = (pick(mode, ia), pick(mode, ib), pick(mode, ic));
        prop_assume!(a.arity() >= 2);
        let k = 2 + k % (a.arity() - 1);
        let i = 1 + i % (k - 1);
        let left = compose_chains(&signed(compose(&a, k, &b, mode).unwrap()), i, &single(&c), mode);
        let mut right = compose_chains(&signed(compose(&a, i, &c, mode).unwrap()), k + c.arity() - 1, &single(&b), mode);
        if (b.degree() * c.degree()) % 2 != 0 {
            right.values_mut().for_each(|v| *v = -*v);
        }
        prop_assert_eq!(left, right);
    }

    #[test]
    fn differential_is_an_operadic_derivation(mode in mode_strategy(), ia in any::<usize>(),
                                              ib in any::<usize>(), i in any::<usize>()) {
        let d = Differential::new(mode);
        let (a, b) = (pick(mode, ia), pick(mode, ib));
        prop_assume!(a.arity() >= 1);
        let i = 1 + i % a.arity();
        let ab = signed(compose(&a, i, &b, mode).unwrap());
        let mut lhs = Chain::new();
        for (t, c) in &ab {
            for (s, e) in d.of_tree(t) {
                add(&mut lhs, s, c * e);
            }
        }
        let mut rhs = compose_chains(&d.of_tree(&a), i, &single(&b), mode);
        let sign = if a.degree() % 2 == 0 { 1 } else { -1 };
        for (t, c) in compose_chains(&single(&a), i, &d.of_tree(&b), mode) {
            add(&mut rhs, t, sign * c);
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn differential_respects_weight_level_and_projection(mode in mode_strategy(), i in any::<usize>()) {
        let d = Differential::new(mode);
        let t = pick(mode, i);
        let dt = d.of_tree(&t);
        for s in dt.keys() {
            prop_assert!(s.unit_weight() <= t.unit_weight());
            prop_assert_eq!(s.degree(), t.degree() + 1);
            prop_assert_eq!(s.arity(), t.arity());
            prop_assert!(s.is_normal(mode));
        }
        prop_assert!(split_by_level(&d, &t).is_ok());
        let x = OperadElement::from_chain(mode, &dt);
        prop_assert!(project_assoc(&x).coefficient.is_zero());
        let mut dd = BTreeMap::new();
        for (s, c) in &dt {
            for (u, e) in d.of_tree(s) {
                add(&mut dd, u, c * e);
            }
        }
        prop_assert!(dd.is_empty());
    }
}

#[test]
fn enumeration_matches_brute_force() {
    for mode in [Mode::O, Mode::OPrime] {
        for n in 0..=2 {
            for q in 0..=3 {
                let fast = enumerate_trees(n, q, -2, mode).len();
                assert_eq!(fast, count_by_brute_force(n, q, -2, mode), "{mode:?} N={n} Q={q}");
            }
        }
    }
}
