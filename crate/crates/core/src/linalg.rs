//! Small dense linear algebra over any [`Scalar`] backend.

use crate::scalar::Scalar;

/// Row-major square matrix helper.
fn pick_pivot<S: Scalar>(m: &[Vec<S>], col: usize, from: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (r, row) in m.iter().enumerate().skip(from) {
        let w = row[col].pivot_weight();
        if w > 0.0 && best.is_none_or(|(_, bw)| w > bw) {
            best = Some((r, w));
        }
    }
    best.map(|(r, _)| r)
}

pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut det = S::one();
    for col in 0..n {
        let Some(p) = pick_pivot(&m, col, col) else {
            return S::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det = det * pivot.clone();
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / pivot.clone();
            for c in col..n {
                if m[col][c].is_zero() {
                    continue;
                }
                let v = m[r][c].clone() - factor.clone() * m[col][c].clone();
                m[r][c] = v;
            }
        }
    }
    det
}

/// Inverse by Gauss-Jordan elimination; `None` when singular.
pub fn inverse<S: Scalar>(m: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut inv: Vec<Vec<S>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { S::one() } else { S::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let p = pick_pivot(&a, col, col)?;
        a.swap(p, col);
        inv.swap(p, col);
        let pivot = a[col][col].clone();
        for c in 0..n {
            if !a[col][c].is_zero() {
                a[col][c] = a[col][c].clone() / pivot.clone();
            }
            if !inv[col][c].is_zero() {
                inv[col][c] = inv[col][c].clone() / pivot.clone();
            }
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                if !a[col][c].is_zero() {
                    let v = a[r][c].clone() - factor.clone() * a[col][c].clone();
                    a[r][c] = v;
                }
                if !inv[col][c].is_zero() {
                    let v = inv[r][c].clone() - factor.clone() * inv[col][c].clone();
                    inv[r][c] = v;
                }
            }
        }
    }
    Some(inv)
}

/// Solve `m x = rhs`; `None` when singular.
pub fn solve<S: Scalar>(m: &[Vec<S>], rhs: &[S]) -> Option<Vec<S>> {
    let inv = inverse(m)?;
    Some(
        inv.iter()
            .map(|row| {
                row.iter()
                    .zip(rhs)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect(),
    )
}
