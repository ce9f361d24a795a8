use serde::Serialize;

use super::category::{composable, sign, Arg, FinWuDgCat};
use super::vector;

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    /// instances that leave a truncated structure
    pub skipped: usize,
    pub witness: Option<String>,
}

impl AxiomCheck {
    fn new(name: &str) -> Self {
        AxiomCheck {
            name: name.into(),
            passed: true,
            checked: 0,
            skipped: 0,
            witness: None,
        }
    }

    fn fail(&mut self, w: String) {
        if self.passed {
            self.witness = Some(w);
        }
        self.passed = false;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WuReport {
    pub n_max: usize,
    pub checks: Vec<AxiomCheck>,
    /// some `p_n(1, …, 1) ≠ 0` with `n ≥ 2`
    pub cat_prime: bool,
    /// strict units and no higher tower
    pub strict: bool,
}

impl WuReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the dg category axioms, the weak unit conditions and the
/// A∞-functor identities for the tower through `n_max`.
pub fn check_wu_axioms(c: &FinWuDgCat, n_max: usize) -> WuReport {
    let mut checks = Vec::new();
    let no = c.n_objects();

    let mut dd = AxiomCheck::new("d²=0");
    for (&(x, y), h) in &c.homs {
        for i in 0..h.dim() {
            if h.edge.contains(&i) {
                dd.skipped += 1;
                continue;
            }
            dd.checked += 1;
            let v = c.diff(x, y, &c.diff(x, y, &c.basis(x, y, i)));
            if !vector::is_zero(&v) {
                dd.fail(format!("d²({}) = {}", h.names[i], c.vec_text(x, y, &v)));
            }
            for (j, s) in h.d.row(i).iter().map(|(j, s)| (*j, s)) {
                if !s.is_zero() && h.degrees[i] != h.degrees[j] + 1 {
                    dd.fail(format!("d({}) has a term of the wrong degree", h.names[j]));
                }
            }
        }
    }
    checks.push(dd);

    let mut deg = AxiomCheck::new("composition degree");
    let mut leib = AxiomCheck::new("composition chain map");
    for x in 0..no {
        for y in 0..no {
            for z in 0..no {
                for a in 0..c.dim(y, z) {
                    for b in 0..c.dim(x, y) {
                        let (da, db) = (c.degree(y, z, a), c.degree(x, y, b));
                        let edge = c.hom(y, z).edge.contains(&a) || c.hom(x, y).edge.contains(&b);
                        let Ok(ab) = c.compose_basis(x, y, z, a, b) else {
                            deg.skipped += 1;
                            leib.skipped += 1;
                            continue;
                        };
                        deg.checked += 1;
                        let hz = c.hom(x, z);
                        if ab.iter().enumerate().any(|(k, s)| !s.is_zero() && hz.degrees[k] != da + db) {
                            deg.fail(format!("{} ∘ {}", c.hom(y, z).names[a], c.hom(x, y).names[b]));
                        }
                        if edge || hz.touches_edge(&ab) {
                            leib.skipped += 1;
                            continue;
                        }
                        let lhs = c.diff(x, z, &ab);
                        let u = c.compose(x, y, z, &c.diff(y, z, &c.basis(y, z, a)), &c.basis(x, y, b));
                        let v = c.compose(x, y, z, &c.basis(y, z, a), &c.diff(x, y, &c.basis(x, y, b)));
                        match (u, v) {
                            (Ok(u), Ok(v)) => {
                                leib.checked += 1;
                                let mut rhs = u;
                                vector::add_scaled(&mut rhs, &v, &sign(da));
                                if lhs != rhs && !vector::is_zero(&vector::sub(&lhs, &rhs)) {
                                    leib.fail(format!(
                                        "d({} ∘ {})",
                                        c.hom(y, z).names[a],
                                        c.hom(x, y).names[b]
                                    ));
                                }
                            }
                            _ => leib.skipped += 1,
                        }
                    }
                }
            }
        }
    }
    checks.push(deg);
    checks.push(leib);

    let mut assoc = AxiomCheck::new("associativity");
    for w in 0..no {
        for x in 0..no {
            for y in 0..no {
                for z in 0..no {
                    for a in 0..c.dim(y, z) {
                        for b in 0..c.dim(x, y) {
                            for e in 0..c.dim(w, x) {
                                let l = c
                                    .compose_basis(x, y, z, a, b)
                                    .and_then(|ab| c.compose(w, x, z, &ab, &c.basis(w, x, e)));
                                let r = c
                                    .compose_basis(w, x, y, b, e)
                                    .and_then(|be| c.compose(w, y, z, &c.basis(y, z, a), &be));
                                match (l, r) {
                                    (Ok(l), Ok(r)) => {
                                        assoc.checked += 1;
                                        if l != r && !vector::is_zero(&vector::sub(&l, &r)) {
                                            assoc.fail(format!(
                                                "({} ∘ {}) ∘ {}",
                                                c.hom(y, z).names[a],
                                                c.hom(x, y).names[b],
                                                c.hom(w, x).names[e]
                                            ));
                                        }
                                    }
                                    _ => assoc.skipped += 1,
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    checks.push(assoc);

    let mut closed = AxiomCheck::new("unit closed of degree 0");
    let mut idem = AxiomCheck::new("unit idempotent");
    for x in 0..no {
        closed.checked += 1;
        let id = c.id(x);
        let h = c.hom(x, x);
        if !vector::is_zero(&c.diff(x, x, id)) || id.iter().enumerate().any(|(k, s)| !s.is_zero() && h.degrees[k] != 0) {
            closed.fail(format!("id_{}", c.objects[x]));
        }
        match c.compose(x, x, x, id, id) {
            Ok(ii) => {
                idem.checked += 1;
                if !vector::is_zero(&vector::sub(&ii, id)) {
                    idem.fail(format!("id_{0} ∘ id_{0} ≠ id_{0}", c.objects[x]));
                }
            }
            Err(_) => idem.skipped += 1,
        }
    }
    checks.push(closed);
    checks.push(idem);

    let mut table = AxiomCheck::new("tower table shape");
    let mut cat_prime = false;
    for (args, v) in &c.ptower {
        table.checked += 1;
        let n = args.len();
        if n < 2 || !composable(args) {
            table.fail(format!("malformed key {}", c.args_text(args)));
            continue;
        }
        if !args.iter().any(Arg::is_one) && !vector::is_zero(v) {
            table.fail(format!("p∘i ≠ id: p_{n}{} ≠ 0", c.args_text(args)));
        }
        let out_deg: i32 = args.iter().map(|a| c.arg_degree(a)).sum::<i32>() - n as i32 + 1;
        let (x, y) = (args[n - 1].src(), args[0].tgt());
        let h = c.hom(x, y);
        if v.iter().enumerate().any(|(k, s)| !s.is_zero() && h.degrees[k] != out_deg) {
            table.fail(format!("p_{n}{} has the wrong degree", c.args_text(args)));
        }
        if args.iter().all(Arg::is_one) && !vector::is_zero(v) && n <= n_max {
            cat_prime = true;
        }
    }
    checks.push(table);

    let mut ainf = AxiomCheck::new("A∞ identities");
    for n in 1..=n_max.max(1) {
        c.for_each_tuple(n, n >= 2, |args| match c.ainf_residual(args) {
            _ if c.touches_edge(args) => ainf.skipped += 1,
            Ok(r) => {
                ainf.checked += 1;
                if !vector::is_zero(&r) {
                    let (x, y) = (args[n - 1].src(), args[0].tgt());
                    ainf.fail(format!("n={n} {}: residual {}", c.args_text(args), c.vec_text(x, y, &r)));
                }
            }
            Err(_) => ainf.skipped += 1,
        });
    }
    checks.push(ainf);

    let strict = c.ptower.values().all(|v| vector::is_zero(v)) && strict_units(c);
    WuReport {
        n_max,
        checks,
        cat_prime,
        strict,
    }
}

/// Whether every `id_x` is a two-sided unit on all defined composites.
pub fn strict_units(c: &FinWuDgCat) -> bool {
    let no = c.n_objects();
    for x in 0..no {
        for y in 0..no {
            for i in 0..c.dim(x, y) {
                let f = c.basis(x, y, i);
                let l = c.compose(x, y, y, c.id(y), &f);
                let r = c.compose(x, x, y, &f, c.id(x));
                if matches!(l, Ok(v) if v != f && !vector::is_zero(&vector::sub(&v, &f)))
                    || matches!(r, Ok(v) if v != f && !vector::is_zero(&vector::sub(&v, &f)))
                {
                    return false;
                }
            }
        }
    }
    true
}
