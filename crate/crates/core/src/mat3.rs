//! Minimal fixed-size 3×3 matrix helpers.
//!
//! The group and algebra types store their two scalar parameters and
//! materialize 3×3 forms on demand; these helpers cover the arithmetic
//! needed for that and for the commutator.

pub type Mat3 = [[f64; 3]; 3];

pub fn identity() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

pub fn zeros() -> Mat3 {
    [[0.0; 3]; 3]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut r = zeros();
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    r
}

pub fn mat_vec(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub fn add(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut r = zeros();
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = a[i][j] + b[i][j];
        }
    }
    r
}

pub fn sub(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut r = zeros();
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = a[i][j] - b[i][j];
        }
    }
    r
}

pub fn scale(m: &Mat3, s: f64) -> Mat3 {
    let mut r = zeros();
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = s * m[i][j];
        }
    }
    r
}

/// Largest absolute entrywise difference, the metric used by the oracles.
pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((a[i][j] - b[i][j]).abs());
        }
    }
    worst
}
