//! 2×2 matrix helpers.

/// Row-major 2×2 matrix.
pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
pub const ZERO: Mat2 = [[0.0; 2]; 2];

pub fn sym(a: &Mat2) -> Mat2 {
    let off = 0.5 * (a[0][1] + a[1][0]);
    [[a[0][0], off], [off, a[1][1]]]
}

pub fn trace(a: &Mat2) -> f64 {
    a[0][0] + a[1][1]
}

/// Frobenius inner product `A·B`.
pub fn dot(a: &Mat2, b: &Mat2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

pub fn norm2(a: &Mat2) -> f64 {
    dot(a, a)
}

pub fn scale(a: &Mat2, s: f64) -> Mat2 {
    [[s * a[0][0], s * a[0][1]], [s * a[1][0], s * a[1][1]]]
}

pub fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn sub(a: &Mat2, b: &Mat2) -> Mat2 {
    add(a, &scale(b, -1.0))
}

/// Symmetric matrix from its components `(m11, m22, m12)`.
pub fn from_voigt(m11: f64, m22: f64, m12: f64) -> Mat2 {
    [[m11, m12], [m12, m22]]
}

/// The rotation `(m11, m22, m12) ↦ (m22, m11, −m12)` relating a stress to
/// the Hessian of its Airy function (and a strain to its strain functions).
pub fn rot(a: &Mat2) -> Mat2 {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub fn max_abs(a: &Mat2) -> f64 {
    a.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rot_is_an_involution() {
        let a = from_voigt(1.0, -2.0, 0.5);
        assert_eq!(rot(&rot(&a)), a);
        assert_eq!(rot(&a), from_voigt(-2.0, 1.0, -0.5));
    }
}
