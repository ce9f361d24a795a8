use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::scalar::{Field, Scalar};

/// Sparse matrix stored by rows. Rows are sorted by column, contain no
/// zeros and no repeated columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Scalar)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_entries(n, n, (0..n).map(|i| (i, i, Scalar::one())))
    }

    /// Builds a matrix from triples; repeated positions are summed and zero
    /// sums dropped.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut acc: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            if v.is_zero() {
                continue;
            }
            let slot = acc[r].entry(c).or_insert_with(|| v.field().zero());
            *slot += &v;
        }
        let data = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseMatrix { rows, cols, data }
    }

    pub fn from_dense(rows: &[Vec<Scalar>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        Self::from_entries(
            nr,
            nc,
            rows.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, v)| (i, j, v.clone()))),
        )
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Scalar::int(v)).collect())
            .collect();
        Self::from_dense(&dense)
    }

    /// Matrix from columns, each given as a dense vector of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Self {
        Self::from_entries(
            rows,
            columns.len(),
            columns
                .iter()
                .enumerate()
                .flat_map(|(j, col)| col.iter().enumerate().map(move |(i, v)| (i, j, v.clone()))),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Scalar)] {
        &self.data[r]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, c.to_owned(), v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(i) => self.data[r][i].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    /// Field of the stored entries; rational when the matrix is empty.
    pub fn field(&self) -> Field {
        self.data
            .iter()
            .flatten()
            .next()
            .map_or(Field::Rational, |(_, v)| v.field())
    }

    pub fn to_field(&self, field: Field) -> SparseMatrix {
        Self::from_entries(
            self.rows,
            self.cols,
            self.entries().map(|(r, c, v)| (r, c, v.to_field(field))),
        )
    }

    pub fn transpose(&self) -> SparseMatrix {
        Self::from_entries(self.cols, self.rows, self.entries().map(|(r, c, v)| (c, r, v.clone())))
    }

    pub fn scale(&self, s: &Scalar) -> SparseMatrix {
        Self::from_entries(self.rows, self.cols, self.entries().map(|(r, c, v)| (r, c, v * s)))
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_entries(
            self.rows,
            self.cols,
            self.entries()
                .chain(other.entries())
                .map(|(r, c, v)| (r, c, v.clone())),
        )
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add(&other.scale(&Scalar::int(-1)))
    }

    /// Product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut data = Vec::with_capacity(self.rows);
        for row in &self.data {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, a) in row {
                for (c, b) in &other.data[*k] {
                    let t = a * b;
                    match acc.get_mut(c) {
                        Some(s) => *s += &t,
                        None => {
                            acc.insert(*c, t);
                        }
                    }
                }
            }
            data.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        }
        SparseMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.cols);
        let f = x.first().map_or(Field::Rational, Scalar::field);
        self.data
            .iter()
            .map(|row| {
                let mut s = f.zero();
                for (c, v) in row {
                    if !x[*c].is_zero() {
                        s += &(v * &x[*c]);
                    }
                }
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v.clone();
        }
        out
    }

    /// Block matrix `[[a, b], [c, d]]`; blocks must have compatible shapes.
    pub fn block(a: &SparseMatrix, b: &SparseMatrix, c: &SparseMatrix, d: &SparseMatrix) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let (r0, c0) = (a.rows, a.cols);
        let e = a
            .entries()
            .map(|(r, k, v)| (r, k, v.clone()))
            .chain(b.entries().map(|(r, k, v)| (r, k + c0, v.clone())))
            .chain(c.entries().map(|(r, k, v)| (r + r0, k, v.clone())))
            .chain(d.entries().map(|(r, k, v)| (r + r0, k + c0, v.clone())));
        Self::from_entries(a.rows + c.rows, a.cols + b.cols, e)
    }
}

/// Field operations used by elimination. Two implementations so the
/// modular path avoids enum dispatch.
trait Elem: Clone {
    fn is_zero(&self) -> bool;
    fn mul(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn inv(&self) -> Self;
    fn neg(&self) -> Self;
}

impl Elem for BigRational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn neg(&self) -> Self {
        -self
    }
}

#[derive(Clone, Copy)]
struct Fp(u32, u32);

impl Elem for Fp {
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn mul(&self, o: &Self) -> Self {
        Fp(((self.0 as u64 * o.0 as u64) % self.1 as u64) as u32, self.1)
    }
    fn sub(&self, o: &Self) -> Self {
        Fp(((self.0 as u64 + self.1 as u64 - o.0 as u64) % self.1 as u64) as u32, self.1)
    }
    fn inv(&self) -> Self {
        match (Scalar::Fp { v: self.0, p: self.1 }).inv() {
            Scalar::Fp { v, p } => Fp(v, p),
            _ => unreachable!(),
        }
    }
    fn neg(&self) -> Self {
        Fp((self.1 - self.0) % self.1, self.1)
    }
}

/// Output of elimination: pivot rows in elimination order. A pivot row has
/// zeros in every earlier pivot column.
struct Echelon<E> {
    ncols: usize,
    pivots: Vec<(usize, Vec<(usize, E)>)>,
    /// rows of the input that became zero only outside `limit` columns
    inconsistent: bool,
}

/// Gaussian elimination with Markowitz pivoting: among active entries in
/// columns `< limit`, choose the one minimising `(r-1)(c-1)` where `r`, `c`
/// are the current row and column counts; ties go to the smallest (row, col).
fn eliminate<E: Elem>(mut rows: Vec<Vec<(usize, E)>>, ncols: usize, limit: usize) -> Echelon<E> {
    let nrows = rows.len();
    let mut col_rows: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for (c, _) in r {
            col_rows[*c].insert(i);
        }
    }
    let mut active = vec![true; nrows];
    let mut pivots = Vec::new();
    loop {
        let mut best: Option<(usize, usize, usize)> = None; // cost, row, col
        for (i, r) in rows.iter().enumerate() {
            if !active[i] {
                continue;
            }
            let rc = r.len();
            if rc == 0 {
                continue;
            }
            for (c, _) in r {
                if *c >= limit {
                    break;
                }
                let cost = (rc - 1) * (col_rows[*c].len() - 1);
                let better = match best {
                    None => true,
                    Some((b, _, _)) => cost < b,
                };
                if better {
                    best = Some((cost, i, *c));
                }
            }
            if matches!(best, Some((0, _, _))) {
                break;
            }
        }
        let Some((_, pr, pc)) = best else { break };
        active[pr] = false;
        let prow = std::mem::take(&mut rows[pr]);
        for (c, _) in &prow {
            col_rows[*c].remove(&pr);
        }
        let pval = prow.iter().find(|e| e.0 == pc).unwrap().1.clone();
        let pinv = pval.inv();
        let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
        for t in targets {
            let row = std::mem::take(&mut rows[t]);
            let a = row.iter().find(|e| e.0 == pc).unwrap().1.mul(&pinv);
            let (merged, added, removed) = axpy(&row, &prow, &a);
            for c in added {
                col_rows[c].insert(t);
            }
            for c in removed {
                col_rows[c].remove(&t);
            }
            rows[t] = merged;
        }
        pivots.push((pc, prow));
    }
    let inconsistent = rows
        .iter()
        .enumerate()
        .any(|(i, r)| active[i] && !r.is_empty());
    Echelon {
        ncols,
        pivots,
        inconsistent,
    }
}

/// `row - a * prow`, reporting which columns appeared or vanished.
fn axpy<E: Elem>(
    row: &[(usize, E)],
    prow: &[(usize, E)],
    a: &E,
) -> (Vec<(usize, E)>, Vec<usize>, Vec<usize>) {
    let mut out = Vec::with_capacity(row.len() + prow.len());
    let mut added = Vec::new();
    let mut removed = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < prow.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let cj = prow.get(j).map_or(usize::MAX, |e| e.0);
        if ci < cj {
            out.push(row[i].clone());
            i += 1;
        } else if cj < ci {
            out.push((cj, a.mul(&prow[j].1).neg()));
            added.push(cj);
            j += 1;
        } else {
            let v = row[i].1.sub(&a.mul(&prow[j].1));
            if v.is_zero() {
                removed.push(ci);
            } else {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    (out, added, removed)
}

impl<E: Elem> Echelon<E> {
    fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Back substitution with the values of non-pivot columns fixed by
    /// `free`; returns the full assignment.
    fn back_substitute(&self, mut x: Vec<Option<E>>, rhs_col: Option<usize>, zero: &E) -> Vec<E> {
        for (pc, row) in self.pivots.iter().rev() {
            let mut s = zero.clone();
            let mut pv = None;
            for (c, v) in row {
                if *c == *pc {
                    pv = Some(v.clone());
                } else if Some(*c) == rhs_col {
                    s = s.sub(&v.neg());
                } else if let Some(xc) = &x[*c] {
                    s = s.sub(&v.mul(xc));
                }
            }
            x[*pc] = Some(s.mul(&pv.unwrap().inv()));
        }
        x.into_iter().map(|v| v.unwrap_or_else(|| zero.clone())).collect()
    }
}

enum Typed {
    Q(Vec<Vec<(usize, BigRational)>>),
    P(Vec<Vec<(usize, Fp)>>, u32),
}

fn typed_rows(m: &SparseMatrix, field: Field) -> Typed {
    match field {
        Field::Rational => Typed::Q(
            m.data
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|(c, v)| match v {
                            Scalar::Rat(q) => (*c, q.clone()),
                            _ => panic!("residue in rational elimination"),
                        })
                        .collect()
                })
                .collect(),
        ),
        Field::Prime(p) => Typed::P(
            m.data
                .iter()
                .map(|r| {
                    r.iter()
                        .filter_map(|(c, v)| match v.to_field(field) {
                            Scalar::Fp { v: 0, .. } => None,
                            Scalar::Fp { v, p } => Some((*c, Fp(v, p))),
                            _ => unreachable!(),
                        })
                        .collect()
                })
                .collect(),
            p,
        ),
    }
}

/// Rank over the field of the entries.
pub fn rank(m: &SparseMatrix) -> usize {
    rank_in(m, m.field())
}

/// Rank over `field`; rational entries are reduced when `field` is prime.
pub fn rank_in(m: &SparseMatrix, field: Field) -> usize {
    match typed_rows(m, field) {
        Typed::Q(rows) => eliminate(rows, m.cols, m.cols).rank(),
        Typed::P(rows, _) => eliminate(rows, m.cols, m.cols).rank(),
    }
}

/// A basis of the right kernel, one vector per non-pivot column.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<Vec<Scalar>> {
    let field = m.field();
    match typed_rows(m, field) {
        Typed::Q(rows) => {
            let ech = eliminate(rows, m.cols, m.cols);
            kernel_from(&ech, &BigRational::zero(), &BigRational::one())
                .into_iter()
                .map(|v| v.into_iter().map(Scalar::Rat).collect())
                .collect()
        }
        Typed::P(rows, p) => {
            let ech = eliminate(rows, m.cols, m.cols);
            kernel_from(&ech, &Fp(0, p), &Fp(1, p))
                .into_iter()
                .map(|v| v.into_iter().map(|e| Scalar::Fp { v: e.0, p }).collect())
                .collect()
        }
    }
}

fn kernel_from<E: Elem>(ech: &Echelon<E>, zero: &E, one: &E) -> Vec<Vec<E>> {
    let mut is_pivot = vec![false; ech.ncols];
    for (c, _) in &ech.pivots {
        is_pivot[*c] = true;
    }
    (0..ech.ncols)
        .filter(|c| !is_pivot[*c])
        .map(|f| {
            let mut x: Vec<Option<E>> = vec![None; ech.ncols];
            for (c, slot) in x.iter_mut().enumerate() {
                if !is_pivot[c] {
                    *slot = Some(if c == f { one.clone() } else { zero.clone() });
                }
            }
            ech.back_substitute(x, None, zero)
        })
        .collect()
}

/// Some solution of `m x = b`, or `None` if the system is inconsistent.
pub fn solve(m: &SparseMatrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(b.len(), m.rows);
    // a residue anywhere promotes the system to its prime field
    let field = match m.field() {
        Field::Prime(p) => Field::Prime(p),
        Field::Rational => b.iter().find(|v| !v.is_zero()).map_or(Field::Rational, Scalar::field),
    };
    let n = m.cols;
    let aug = SparseMatrix::from_entries(
        m.rows,
        n + 1,
        m.entries()
            .map(|(r, c, v)| (r, c, v.to_field(field)))
            .chain(b.iter().enumerate().map(|(r, v)| (r, n, v.to_field(field)))),
    );
    match typed_rows(&aug, field) {
        Typed::Q(rows) => {
            let ech = eliminate(rows, n + 1, n);
            if ech.inconsistent {
                return None;
            }
            let x = ech.back_substitute(vec![None; n + 1], Some(n), &BigRational::zero());
            Some(x[..n].iter().cloned().map(Scalar::Rat).collect())
        }
        Typed::P(rows, p) => {
            let ech = eliminate(rows, n + 1, n);
            if ech.inconsistent {
                return None;
            }
            let x = ech.back_substitute(vec![None; n + 1], Some(n), &Fp(0, p));
            Some(x[..n].iter().map(|e| Scalar::Fp { v: e.0, p }).collect())
        }
    }
}

/// Indices of a maximal linearly independent subset of the columns,
/// preferring earlier columns.
pub fn independent_columns(m: &SparseMatrix) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut cur = 0;
    for j in 0..m.cols {
        chosen.push(j);
        let sub = select_columns(m, &chosen);
        let r = rank(&sub);
        if r > cur {
            cur = r;
        } else {
            chosen.pop();
        }
    }
    chosen
}

pub fn select_columns(m: &SparseMatrix, cols: &[usize]) -> SparseMatrix {
    let pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    SparseMatrix::from_entries(
        m.rows,
        cols.len(),
        m.entries()
            .filter_map(|(r, c, v)| pos.get(&c).map(|&k| (r, k, v.clone()))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMatrix::identity(2)), 2);
        assert_eq!(rank(&SparseMatrix::zeros(2, 2)), 0);
        assert_eq!(rank(&SparseMatrix::from_int_rows(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_in(&SparseMatrix::from_int_rows(&[&[1, 2], &[2, 4]]), Field::prime()), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&SparseMatrix::identity(3)).is_empty());
        assert_eq!(kernel_basis(&SparseMatrix::zeros(3, 3)).len(), 3);
        let k = kernel_basis(&SparseMatrix::from_int_rows(&[&[1, 1]]));
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] + &k[0][1], Scalar::zero());
        assert!(!k[0][0].is_zero());
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = SparseMatrix::from_int_rows(&[&[1, 1, 0], &[0, 1, 1]]);
        let b = vec![Scalar::int(2), Scalar::int(3)];
        let x = solve(&m, &b).unwrap();
        assert_eq!(m.apply(&x), b);
        let m2 = SparseMatrix::from_int_rows(&[&[1, 1], &[2, 2]]);
        assert!(solve(&m2, &[Scalar::int(1), Scalar::int(1)]).is_none());
    }

    #[test]
    fn product_and_transpose() {
        let a = SparseMatrix::from_int_rows(&[&[1, 2], &[0, 1]]);
        let b = SparseMatrix::from_int_rows(&[&[1, -2], &[0, 1]]);
        assert_eq!(a.mul(&b), SparseMatrix::identity(2));
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.get(0, 1), Scalar::int(2));
    }

    #[test]
    fn stored_entries_nonzero() {
        let m = SparseMatrix::from_entries(
            2,
            2,
            vec![(0, 0, Scalar::int(1)), (0, 0, Scalar::int(-1)), (1, 1, Scalar::int(0))],
        );
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn independent_columns_prefers_early() {
        let m = SparseMatrix::from_int_rows(&[&[1, 2, 0], &[1, 2, 1]]);
        assert_eq!(independent_columns(&m), vec![0, 2]);
    }
}
