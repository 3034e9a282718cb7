//! Dense helpers over small square matrices of scalars.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Mat = Vec<Vec<f64>>;
pub type Tensor3 = Vec<Vec<Vec<f64>>>;
pub type Tensor4 = Vec<Vec<Vec<Vec<f64>>>>;

pub fn zeros(n: usize) -> Mat {
    vec![vec![0.0; n]; n]
}

pub fn zeros3(n: usize) -> Tensor3 {
    vec![zeros(n); n]
}

pub fn zeros4(n: usize) -> Tensor4 {
    vec![zeros3(n); n]
}

/// Gauss-Jordan inverse with partial pivoting on base-point values.
pub fn invert<S: Scalar>(m: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let one = m[0][0].constant_like(1.0);
    let zero = m[0][0].zero_like();
    let mut inv: Vec<Vec<S>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { one.clone() } else { zero.clone() })
                .collect()
        })
        .collect();
    let scale = m
        .iter()
        .flat_map(|r| r.iter().map(|v| v.value().abs()))
        .fold(0.0, f64::max);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].value().abs().total_cmp(&a[q][col].value().abs()))
            .expect("nonempty");
        if a[pivot][col].value().abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Singular("matrix inverse"));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = a[col][j].clone() / p.clone();
            inv[col][j] = inv[col][j].clone() / p.clone();
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col].clone();
            for j in 0..n {
                a[row][j] = a[row][j].clone() - factor.clone() * a[col][j].clone();
                inv[row][j] = inv[row][j].clone() - factor.clone() * inv[col][j].clone();
            }
        }
    }
    Ok(inv)
}

/// Determinant by elimination with partial pivoting on base-point values.
pub fn det<S: Scalar>(m: &[Vec<S>]) -> S {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut acc = m[0][0].constant_like(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].value().abs().total_cmp(&a[q][col].value().abs()))
            .expect("nonempty");
        if pivot != col {
            a.swap(col, pivot);
            acc = -acc;
        }
        let p = a[col][col].clone();
        if p.value() == 0.0 {
            return m[0][0].zero_like();
        }
        acc = acc * p.clone();
        for row in col + 1..n {
            let factor = a[row][col].clone() / p.clone();
            for j in col..n {
                a[row][j] = a[row][j].clone() - factor.clone() * a[col][j].clone();
            }
        }
    }
    acc
}

pub fn values<S: Scalar>(m: &[Vec<S>]) -> Mat {
    m.iter().map(|r| r.iter().map(S::value).collect()).collect()
}

pub fn to_dmatrix(m: &Mat) -> DMatrix<f64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j])
}

pub fn is_positive_definite(m: &Mat) -> bool {
    nalgebra::Cholesky::new(to_dmatrix(m)).is_some()
}

pub fn mat_vec(m: &Mat, v: &[f64]) -> Vec<f64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

pub fn quadf(m: &Mat, y: &[f64]) -> f64 {
    dotf(&mat_vec(m, y), y)
}

pub fn bilinf(m: &Mat, u: &[f64], v: &[f64]) -> f64 {
    dotf(&mat_vec(m, v), u)
}

pub fn invert_f64(m: &Mat) -> Result<Mat> {
    let d = to_dmatrix(m);
    let inv = d.try_inverse().ok_or(Error::Singular("matrix inverse"))?;
    let n = m.len();
    Ok((0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect())
}

/// Frobenius norm of a matrix.
pub fn frob(m: &Mat) -> f64 {
    m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Norm of a (0,3)-tensor, `sqrt(T_ijk T_lmn g^il g^jm g^kn)`.
pub fn metric_norm3(t: &Tensor3, ginv: &Mat) -> f64 {
    let n = t.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for m in 0..n {
                        for p in 0..n {
                            s += t[i][j][k] * t[l][m][p] * ginv[i][l] * ginv[j][m] * ginv[k][p];
                        }
                    }
                }
            }
        }
    }
    s.max(0.0).sqrt()
}

/// Norm of a (0,2)-tensor measured with a metric inverse: `sqrt(T_ij T_kl g^ik g^jl)`.
pub fn metric_norm2(t: &Mat, ginv: &Mat) -> f64 {
    let n = t.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    s += t[i][j] * t[k][l] * ginv[i][k] * ginv[j][l];
                }
            }
        }
    }
    s.max(0.0).sqrt()
}

/// Norm of a covector measured with a metric inverse.
pub fn metric_norm1(w: &[f64], ginv: &Mat) -> f64 {
    quadf(ginv, w).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;

    #[test]
    fn inverse_of_jet_matrix() {
        let x = Jet::seed(&[0.3, 0.8], 2);
        let one = x[0].constant_like(1.0);
        let m = vec![
            vec![one.clone() + x[0].clone() * x[0].clone(), x[1].clone()],
            vec![x[1].clone(), one.clone() + x[1].clone().sin()],
        ];
        let inv = invert(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = x[0].zero_like();
                for k in 0..2 {
                    acc = acc + m[i][k].clone() * inv[k][j].clone();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((acc.value() - target).abs() < 1e-14);
                assert!(acc.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
            }
        }
    }

    #[test]
    fn singular_and_det() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(invert(&m).is_err());
        assert_eq!(det(&m), 0.0);
        let m = vec![vec![0.0, 2.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 3.0]];
        assert!((det(&m) + 6.0).abs() < 1e-14);
    }
}
