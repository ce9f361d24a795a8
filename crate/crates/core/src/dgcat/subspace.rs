//! Subspaces of coordinate spaces in reduced row echelon form.

use crate::exactlinalg::{Field, Scalar};

use super::vector::{self, Vector};

/// Rows are kept reduced: each has a 1 at its pivot and 0 at every other
/// pivot, so the coordinates of a member are its pivot entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub field: Field,
    pub dim: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(field: Field, dim: usize) -> Self {
        Subspace {
            field,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn spanned<I: IntoIterator<Item = Vector>>(field: Field, dim: usize, vs: I) -> Self {
        let mut s = Subspace::new(field, dim);
        for v in vs {
            s.insert(&v);
        }
        s
    }

    pub fn full(field: Field, dim: usize) -> Self {
        Subspace::spanned(field, dim, (0..dim).map(|i| unit(field, dim, i)))
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn basis(&self) -> &[Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates outside the pivots; their unit vectors span a complement.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.dim).filter(|i| !self.pivots.contains(i)).collect()
    }

    /// `v` minus its component along the pivots.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut out = vector::to_field(v, self.field);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !out[p].is_zero() {
                let c = -&out[p];
                vector::add_scaled(&mut out, row, &c);
            }
        }
        out
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        vector::is_zero(&self.reduce(v))
    }

    /// Adds `v`; false if it was already in the span.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|s| !s.is_zero()) else {
            return false;
        };
        let inv = r[p].inv();
        r = vector::scale(&r, &inv);
        for row in &mut self.rows {
            if !row[p].is_zero() {
                let c = -&row[p];
                vector::add_scaled(row, &r, &c);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, r);
        self.pivots.insert(at, p);
        true
    }

    /// Coordinates of `v` in `basis()`, if `v` lies in the span.
    pub fn coords(&self, v: &[Scalar]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].to_field(self.field)).collect())
    }

    pub fn combine(&self, coords: &[Scalar]) -> Vector {
        let mut out = vector::zeros(self.field, self.dim);
        for (row, c) in self.rows.iter().zip(coords) {
            vector::add_scaled(&mut out, row, c);
        }
        out
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r);
        }
        s
    }
}

pub fn unit(field: Field, dim: usize, i: usize) -> Vector {
    let mut v = vector::zeros(field, dim);
    v[i] = field.one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echelon_coordinates() {
        let f = Field::Rational;
        let mut s = Subspace::new(f, 3);
        assert!(s.insert(&vector::from_ints(f, &[0, 2, 2])));
        assert!(s.insert(&vector::from_ints(f, &[1, 1, 0])));
        assert!(!s.insert(&vector::from_ints(f, &[2, 4, 2])));
        assert_eq!(s.pivots(), &[0, 1]);
        assert_eq!(s.complement(), vec![2]);
        let v = vector::from_ints(f, &[3, 1, -2]);
        let c = s.coords(&v).unwrap();
        assert_eq!(s.combine(&c), v);
        assert!(s.coords(&vector::from_ints(f, &[0, 0, 1])).is_none());
    }
}
