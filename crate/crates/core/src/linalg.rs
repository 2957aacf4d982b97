//! 3x3 matrices: characteristic-cubic eigenvalues and inverse-iteration
//! eigenvectors.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Matrix3(pub [[f64; 3]; 3]);

impl Matrix3 {
    pub fn diag(d: [f64; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            m[i][i] = d[i];
        }
        Matrix3(m)
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// Sum of the principal 2x2 minors.
    pub fn minor_sum(&self) -> f64 {
        let a = &self.0;
        (a[0][0] * a[1][1] - a[0][1] * a[1][0])
            + (a[0][0] * a[2][2] - a[0][2] * a[2][0])
            + (a[1][1] * a[2][2] - a[1][2] * a[2][1])
    }

    pub fn mul_vec(&self, x: &[f64; 3]) -> [f64; 3] {
        let a = &self.0;
        [
            a[0][0] * x[0] + a[0][1] * x[1] + a[0][2] * x[2],
            a[1][0] * x[0] + a[1][1] * x[1] + a[1][2] * x[2],
            a[2][0] * x[0] + a[2][1] * x[1] + a[2][2] * x[2],
        ]
    }

    pub fn shifted(&self, s: f64) -> Self {
        let mut m = self.0;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= s;
        }
        Matrix3(m)
    }

    /// `det(self - z I)` for complex `z`.
    pub fn char_det(&self, z: Complex64) -> Complex64 {
        // -z^3 + tr z^2 - c2 z + det
        let (tr, c2, d) = (self.trace(), self.minor_sum(), self.det());
        -z * z * z + z * z * tr - z * c2 + d
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[f64; 3]) -> Option<[f64; 3]> {
        let mut a = self.0;
        let mut x = *b;
        for col in 0..3 {
            let piv = (col..3)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            if a[piv][col] == 0.0 {
                return None;
            }
            a.swap(col, piv);
            x.swap(col, piv);
            for row in col + 1..3 {
                let f = a[row][col] / a[col][col];
                for k in col..3 {
                    a[row][k] -= f * a[col][k];
                }
                x[row] -= f * x[col];
            }
        }
        for col in (0..3).rev() {
            let mut s = x[col];
            for k in col + 1..3 {
                s -= a[col][k] * x[k];
            }
            x[col] = s / a[col][col];
        }
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

/// Eigenvalues of a 3x3 matrix, sorted by decreasing real part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen3 {
    pub values: [Complex64; 3],
    /// Set when the roots are clustered (near-triple root) and the closed-form
    /// solve loses accuracy.
    pub ill_conditioned: bool,
}

impl Eigen3 {
    pub fn count_positive(&self) -> usize {
        self.values.iter().filter(|z| z.re > 0.0).count()
    }

    pub fn count_negative(&self) -> usize {
        self.values.iter().filter(|z| z.re < 0.0).count()
    }
}

/// Roots of the characteristic cubic via the trigonometric/Cardano closed
/// form, each real root polished by one Newton step.
pub fn eigen3(m: &Matrix3) -> Eigen3 {
    let tr = m.trace();
    let c2 = m.minor_sum();
    let d = m.det();
    // lambda^3 + a lambda^2 + b lambda + c = 0
    let (a, b, c) = (-tr, c2, -d);
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let cubic = |x: f64| ((x + a) * x + b) * x + c;
    let dcubic = |x: f64| (3.0 * x + 2.0 * a) * x + b;
    let polish = |x: f64| {
        let dp = dcubic(x);
        if dp != 0.0 {
            let y = x - cubic(x) / dp;
            if y.is_finite() && cubic(y).abs() <= cubic(x).abs() {
                return y;
            }
        }
        x
    };

    let ill_conditioned = p.abs() < 1e-6 * scale * scale && q.abs() < 1e-9 * scale.powi(3);

    let mut values = if disc <= 0.0 && p < 0.0 {
        // three real roots
        let r = (-p / 3.0).sqrt();
        let arg = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0);
        let phi = arg.acos();
        let mut roots = [0.0; 3];
        for (k, root) in roots.iter_mut().enumerate() {
            let t = 2.0 * r * ((phi - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos();
            *root = polish(t - shift);
        }
        roots.map(|x| Complex64::new(x, 0.0))
    } else {
        // one real root, then deflate to a quadratic
        let sq = disc.max(0.0).sqrt();
        let t = (-q / 2.0 + sq).cbrt() + (-q / 2.0 - sq).cbrt();
        let r = polish(t - shift);
        let sum = tr - r;
        let prod = c2 - r * sum;
        let qd = sum * sum / 4.0 - prod;
        let (z1, z2) = if qd >= 0.0 {
            let s = qd.sqrt();
            (
                Complex64::new(sum / 2.0 + s, 0.0),
                Complex64::new(sum / 2.0 - s, 0.0),
            )
        } else {
            let s = (-qd).sqrt();
            (
                Complex64::new(sum / 2.0, s),
                Complex64::new(sum / 2.0, -s),
            )
        };
        let z1 = if z1.im == 0.0 { Complex64::new(polish(z1.re), 0.0) } else { z1 };
        let z2 = if z2.im == 0.0 { Complex64::new(polish(z2.re), 0.0) } else { z2 };
        [Complex64::new(r, 0.0), z1, z2]
    };
    values.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    Eigen3 {
        values,
        ill_conditioned,
    }
}

/// Unit eigenvector for a real eigenvalue by inverse iteration on
/// `m - (lambda + 1e-14) I`.
pub fn eigenvector(m: &Matrix3, lambda: f64) -> Result<[f64; 3]> {
    let shifted = m.shifted(lambda + 1e-14 * m.max_abs().max(1.0));
    let mut x = [1.0, 1.0, 1.0];
    normalize(&mut x);
    for _ in 0..4 {
        let mut y = match shifted.solve(&x) {
            Some(y) => y,
            None => return null_vector(&m.shifted(lambda)),
        };
        normalize(&mut y);
        x = y;
    }
    Ok(x)
}

/// Null vector from the largest cross product of two rows.
fn null_vector(m: &Matrix3) -> Result<[f64; 3]> {
    let r = &m.0;
    let cands = [cross(&r[0], &r[1]), cross(&r[0], &r[2]), cross(&r[1], &r[2])];
    let mut best = cands
        .into_iter()
        .max_by(|a, b| norm(a).total_cmp(&norm(b)))
        .unwrap();
    if norm(&best) == 0.0 {
        return Err(Error::Domain("eigenvector is not unique".into()));
    }
    normalize(&mut best);
    Ok(best)
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(x: &[f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn normalize(x: &mut [f64; 3]) {
    let n = norm(x);
    for v in x.iter_mut() {
        *v /= n;
    }
}
