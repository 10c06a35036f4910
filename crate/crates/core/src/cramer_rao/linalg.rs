//! Dense symmetric matrices and Cholesky-based trace of the inverse.

use crate::error::{Error, Result};

/// Dense symmetric matrix stored in full row-major form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    d: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            data: vec![0.0; d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Build from rows, checking symmetry to 1e-12 relative to the largest entry.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: r.len(),
            });
        }
        let scale = rows.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        for i in 0..d {
            for j in 0..i {
                if (rows[i][j] - rows[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::Invalid {
                        what: "symmetric matrix",
                        reason: format!("entries ({i},{j}) and ({j},{i}) differ"),
                    });
                }
            }
        }
        Ok(Self {
            d,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    /// Set entries (i, j) and (j, i).
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.d + j] = value;
        self.data[j * self.d + i] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let v = self.get(i, j) + value;
        self.set(i, j, v);
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.d).map(<[f64]>::to_vec).collect()
    }
}

/// Lower-triangular Cholesky factor L with A = L Lᵀ.
#[derive(Debug, Clone)]
pub struct Cholesky {
    d: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn new(a: &SymMatrix) -> Result<Self> {
        let d = a.dim();
        let mut l = vec![0.0; d * d];
        for j in 0..d {
            let mut diag = a.get(j, j);
            for p in 0..j {
                diag -= l[j * d + p] * l[j * d + p];
            }
            if !(diag > 0.0) || !diag.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let ljj = diag.sqrt();
            l[j * d + j] = ljj;
            for i in j + 1..d {
                let mut s = a.get(i, j);
                for p in 0..j {
                    s -= l[i * d + p] * l[j * d + p];
                }
                l[i * d + j] = s / ljj;
            }
        }
        Ok(Self { d, l })
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let d = self.d;
        let mut y = b.to_vec();
        for i in 0..d {
            let mut s = y[i];
            for p in 0..i {
                s -= self.l[i * d + p] * y[p];
            }
            y[i] = s / self.l[i * d + i];
        }
        for i in (0..d).rev() {
            let mut s = y[i];
            for p in i + 1..d {
                s -= self.l[p * d + i] * y[p];
            }
            y[i] = s / self.l[i * d + i];
        }
        y
    }

    /// Diagonal of A⁻¹ as ‖L⁻¹ e_i‖², one forward solve per unit vector.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let d = self.d;
        let mut y = vec![0.0; d];
        (0..d)
            .map(|i| {
                y.iter_mut().for_each(|v| *v = 0.0);
                y[i] = 1.0 / self.l[i * d + i];
                for r in i + 1..d {
                    let mut s = 0.0;
                    for p in i..r {
                        s -= self.l[r * d + p] * y[p];
                    }
                    y[r] = s / self.l[r * d + r];
                }
                y[i..].iter().map(|v| v * v).sum()
            })
            .collect()
    }

    pub fn trace_inverse(&self) -> f64 {
        self.inverse_diagonal().iter().sum()
    }
}

/// Explicit inverse by Gauss–Jordan elimination, limited to `d <= 50`.
pub fn explicit_inverse(a: &SymMatrix) -> Result<Vec<Vec<f64>>> {
    let d = a.dim();
    if d > 50 {
        return Err(Error::Invalid {
            what: "matrix size",
            reason: format!("explicit inverse is limited to d <= 50, got {d}"),
        });
    }
    let mut m = a.rows();
    let mut inv: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for c in 0..d {
        let p = (c..d)
            .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
            .unwrap_or(c);
        if m[p][c] == 0.0 {
            return Err(Error::NotPositiveDefinite { pivot: c });
        }
        m.swap(c, p);
        inv.swap(c, p);
        let piv = m[c][c];
        for j in 0..d {
            m[c][j] /= piv;
            inv[c][j] /= piv;
        }
        for r in 0..d {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for j in 0..d {
                        m[r][j] -= f * m[c][j];
                        inv[r][j] -= f * inv[c][j];
                    }
                }
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn det(m: &[Vec<f64>]) -> f64 {
        let d = m.len();
        if d == 1 {
            return m[0][0];
        }
        (0..d)
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != c)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * det(&minor)
            })
            .sum()
    }

    /// Trace of the inverse from cofactors: Σ_i det(A without row/col i) / det(A).
    fn adjugate_trace(m: &[Vec<f64>]) -> f64 {
        let d = m.len();
        let full = det(m);
        (0..d)
            .map(|i| {
                let minor: Vec<Vec<f64>> = m
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| *r != i)
                    .map(|(_, row)| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != i)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                det(&minor) / full
            })
            .sum()
    }

    /// A = MᵀM + I.
    fn spd_from(entries: &[f64], d: usize) -> SymMatrix {
        let mut a = SymMatrix::identity(d);
        for i in 0..d {
            for j in 0..=i {
                let s: f64 = (0..d)
                    .map(|p| entries[p * d + i] * entries[p * d + j])
                    .sum();
                a.add(i, j, s);
            }
        }
        a
    }

    #[test]
    fn diagonal_and_identity() {
        let c = Cholesky::new(&SymMatrix::from_diagonal(&[2.0, 4.0])).unwrap();
        assert!((c.trace_inverse() - 0.75).abs() < 1e-15);
        let c = Cholesky::new(&SymMatrix::identity(7)).unwrap();
        assert!((c.trace_inverse() - 7.0).abs() < 1e-15);
    }

    #[test]
    fn reports_failing_pivot() {
        let m = SymMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 2.0],
            vec![0.0, 2.0, 1.0],
        ])
        .unwrap();
        assert_eq!(
            Cholesky::new(&m).unwrap_err(),
            Error::NotPositiveDefinite { pivot: 2 }
        );
    }

    #[test]
    fn rejects_asymmetric_rows() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
    }

    #[test]
    fn explicit_inverse_size_limit() {
        assert!(explicit_inverse(&SymMatrix::identity(51)).is_err());
    }

    proptest! {
        #[test]
        fn trace_matches_adjugate(entries in prop::collection::vec(-2.0f64..2.0, 25)) {
            let a = spd_from(&entries, 5);
            let tr = Cholesky::new(&a).unwrap().trace_inverse();
            let oracle = adjugate_trace(&a.rows());
            prop_assert!(((tr - oracle) / oracle).abs() <= 1e-10);
        }

        #[test]
        fn solve_and_inverse_agree(entries in prop::collection::vec(-2.0f64..2.0, 16), b in prop::collection::vec(-5.0f64..5.0, 4)) {
            let a = spd_from(&entries, 4);
            let x = Cholesky::new(&a).unwrap().solve(&b);
            let inv = explicit_inverse(&a).unwrap();
            for i in 0..4 {
                let y: f64 = (0..4).map(|j| inv[i][j] * b[j]).sum();
                prop_assert!((x[i] - y).abs() <= 1e-9 * (1.0 + y.abs()));
            }
        }
    }
}
