//! Fixed-size 3x3 helpers for Jacobians and deformation gradients. Only the
//! leading `d x d` block is used; the rest stays zero.

use crate::scalar::Real;

pub type Mat3<T> = [[T; 3]; 3];

pub fn zero<T: Real>() -> Mat3<T> {
    [[T::zero(); 3]; 3]
}

pub fn identity<T: Real>(d: usize) -> Mat3<T> {
    let mut m = zero();
    for (i, row) in m.iter_mut().enumerate().take(d) {
        row[i] = T::one();
    }
    m
}

pub fn det<T: Real>(d: usize, m: &Mat3<T>) -> T {
    match d {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

/// Inverse of the leading block; the caller checks the determinant.
pub fn inverse<T: Real>(d: usize, m: &Mat3<T>) -> Mat3<T> {
    let dt = det(d, m);
    let mut r = zero();
    match d {
        1 => r[0][0] = T::one() / m[0][0],
        2 => {
            r[0][0] = m[1][1] / dt;
            r[0][1] = -m[0][1] / dt;
            r[1][0] = -m[1][0] / dt;
            r[1][1] = m[0][0] / dt;
        }
        _ => {
            r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / dt;
            r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / dt;
            r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / dt;
            r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / dt;
            r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / dt;
            r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / dt;
            r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / dt;
            r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / dt;
            r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / dt;
        }
    }
    r
}

pub fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm<T: Real>(a: &[T; 3]) -> T {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

pub fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn distance<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}
