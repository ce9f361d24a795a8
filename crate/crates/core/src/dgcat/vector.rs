//! Dense coefficient vectors for hom elements.

use crate::exactlinalg::{Field, Scalar};

pub type Vector = Vec<Scalar>;

pub fn zeros(field: Field, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn is_zero(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn add_scaled(acc: &mut [Scalar], v: &[Scalar], s: &Scalar) {
    assert_eq!(acc.len(), v.len());
    if s.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += &(b * s);
        }
    }
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(v: &[Scalar], s: &Scalar) -> Vector {
    v.iter().map(|x| x * s).collect()
}

pub fn to_field(v: &[Scalar], field: Field) -> Vector {
    v.iter().map(|x| x.to_field(field)).collect()
}

pub fn from_ints(field: Field, v: &[i64]) -> Vector {
    v.iter().map(|&n| field.from_i64(n)).collect()
}
