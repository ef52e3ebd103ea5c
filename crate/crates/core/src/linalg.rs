//! Dense elimination.
//!
//! Rational matrices are reduced fraction-free (Bareiss) over the integers
//! after clearing row denominators; only the final back-substitution into
//! reduced form divides. Complex matrices use partial pivoting with a pivot
//! threshold of `tol * max(1, max|entry|)`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{ComplexF, Field, Rational};

/// Reduced row echelon form: `rows.len() == pivots.len() == rank`, each row
/// has a 1 in its pivot column and zeros in every other pivot column.
#[derive(Debug, Clone, PartialEq)]
pub struct RowEchelon<F> {
    pub rows: Vec<Vec<F>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl<F: Field> RowEchelon<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Null-space basis, one vector per free column, with that free
    /// coordinate set to 1.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let mut is_pivot = alloc::vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = alloc::vec![F::zero(); self.cols];
                v[free] = F::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = -row[free].clone();
                }
                v
            })
            .collect()
    }
}

fn integer_rows(m: &Matrix<Rational>) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect()
}

/// Fraction-free forward elimination in place. Returns the pivot columns
/// and the number of row swaps performed.
fn bareiss_forward(a: &mut [Vec<BigInt>], cols: usize) -> (Vec<usize>, usize) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (top, bottom) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in bottom.iter_mut() {
            for j in c + 1..cols {
                let num = &pivot_row[c] * &row[j] - &row[c] * &pivot_row[j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                row[j] = num / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (pivots, swaps)
}

pub(crate) fn bareiss_row_reduce(m: &Matrix<Rational>) -> RowEchelon<Rational> {
    let cols = m.cols();
    let mut a = integer_rows(m);
    let (pivots, _) = bareiss_forward(&mut a, cols);
    let mut rows: Vec<Vec<Rational>> = a
        .into_iter()
        .take(pivots.len())
        .map(|row| row.into_iter().map(Rational::from_integer).collect())
        .collect();
    for i in (0..pivots.len()).rev() {
        let p = pivots[i];
        let inv = rows[i][p].recip();
        for x in rows[i].iter_mut() {
            *x = &*x * &inv;
        }
        let (above, rest) = rows.split_at_mut(i);
        let pivot_row = &rest[0];
        for row in above.iter_mut() {
            let f = row[p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(pivot_row) {
                *x = &*x - &f * y;
            }
        }
    }
    RowEchelon { rows, pivots, cols }
}

pub(crate) fn bareiss_determinant(m: &Matrix<Rational>) -> Rational {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return Rational::one();
    }
    let denominators = (0..n).fold(BigInt::one(), |acc, i| {
        let row = m.row(i);
        acc * row.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()))
    });
    let mut a = integer_rows(m);
    let (pivots, swaps) = bareiss_forward(&mut a, n);
    if pivots.len() < n {
        return Rational::zero();
    }
    let mut det = a[n - 1][n - 1].clone();
    if swaps % 2 == 1 {
        det = -det;
    }
    Rational::new(det, denominators)
}

pub(crate) fn pivoting_row_reduce(m: &Matrix<ComplexF>, tol: f64) -> RowEchelon<ComplexF> {
    let cols = m.cols();
    let threshold = tol * m.max_abs().max(1.0);
    let mut a = m.row_vecs();
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows)
            .map(|i| (i, a[i][c].norm()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= threshold {
            for row in a.iter_mut().skip(r) {
                row[c] = ComplexF::zero();
            }
            continue;
        }
        a.swap(p, r);
        let inv = a[r][c].inv();
        for x in a[r].iter_mut() {
            *x *= inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f == ComplexF::zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= f * y;
            }
            row[c] = ComplexF::zero();
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    RowEchelon {
        rows: a,
        pivots,
        cols,
    }
}

pub(crate) fn lu_determinant(m: &Matrix<ComplexF>) -> ComplexF {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut a = m.row_vecs();
    let mut det = ComplexF::one();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm()))
            .unwrap_or(c);
        if a[p][c] == ComplexF::zero() {
            return ComplexF::zero();
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                let t = f * a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Row-space dimension. `tol` is ignored for rationals.
pub fn rank<F: Field>(m: &Matrix<F>, tol: f64) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    F::row_reduce(m, tol).rank()
}

/// Canonical basis of `{v : m·v = 0}`.
pub fn solve_kernel<F: Field>(m: &Matrix<F>, tol: f64) -> Vec<Vec<F>> {
    F::row_reduce(m, tol).kernel()
}

pub fn det<F: Field>(m: &Matrix<F>) -> Result<F> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    Ok(F::determinant(m))
}

/// Inverse by reducing `[m | I]`. Singular (or, for floats, numerically
/// singular at `tol`) matrices are rejected.
pub fn invert<F: Field>(m: &Matrix<F>, tol: f64) -> Result<Matrix<F>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let n = m.rows();
    let reduced = F::row_reduce(&m.hstack(&Matrix::identity(n)), tol);
    if reduced.rank() < n || reduced.pivots[n - 1] != n - 1 {
        return Err(Error::SingularMatrix);
    }
    let data = reduced
        .rows
        .iter()
        .flat_map(|row| row[n..].iter().cloned())
        .collect();
    let inv = Matrix::new(n, n, data)?;
    if F::DOMAIN == crate::scalar::Domain::Complex {
        let residual = (m * &inv).sub(&Matrix::identity(n)).max_abs();
        if residual >= 1e-9 {
            return Err(Error::SingularMatrix);
        }
    }
    Ok(inv)
}

/// Matrix whose rows are the given vectors.
pub fn matrix_from_vectors<F: Field>(vectors: &[Vec<F>], cols: usize) -> Matrix<F> {
    let data = vectors.iter().flat_map(|v| v.iter().cloned()).collect();
    Matrix::new(vectors.len(), cols, data).expect("vectors of equal length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DEFAULT_TOL;
    use alloc::vec;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    /// Schoolbook Gauss-Jordan over rationals, independent of the Bareiss path.
    fn naive_rank(m: &Matrix<Rational>) -> usize {
        let mut a = m.row_vecs();
        let mut r = 0;
        for c in 0..m.cols() {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(p, r);
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[r][c];
                    for j in 0..m.cols() {
                        let t = &f * &a[r][j];
                        a[i][j] -= t;
                    }
                }
            }
            r += 1;
        }
        r
    }

    /// Cofactor expansion.
    fn naive_det(m: &Matrix<Rational>) -> Rational {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)].clone();
        }
        (0..n).fold(Rational::zero(), |acc, j| {
            let minor_rows: Vec<Vec<Rational>> = (1..n)
                .map(|i| (0..n).filter(|&k| k != j).map(|k| m[(i, k)].clone()).collect())
                .collect();
            let minor = Matrix::from_rows(minor_rows).unwrap();
            let term = &m[(0, j)] * naive_det(&minor);
            if j % 2 == 0 {
                acc + term
            } else {
                acc - term
            }
        })
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Matrix::<Rational>::identity(3), 0.0), 3);
        assert_eq!(rank(&qm(&[&[1, 1], &[-1, -1]]), 0.0), 1);
        assert_eq!(rank(&qm(&[&[0, 1], &[0, 0]]), 0.0), 1);
        assert_eq!(rank(&Matrix::<Rational>::zeros(0, 0), 0.0), 0);
    }

    #[test]
    fn kernel_examples() {
        assert!(solve_kernel(&Matrix::<Rational>::identity(2), 0.0).is_empty());
        assert_eq!(solve_kernel(&qm(&[&[1, 1], &[1, 1]]), 0.0), vec![vec![q(-1), q(1)]]);
        // transpose of [[1,1],[-1,-1]]
        assert_eq!(solve_kernel(&qm(&[&[1, -1], &[1, -1]]), 0.0), vec![vec![q(1), q(1)]]);
    }

    #[test]
    fn det_and_inverse_examples() {
        assert_eq!(det(&Matrix::<Rational>::identity(4)).unwrap(), q(1));
        assert_eq!(det(&qm(&[&[1, 1], &[-1, -1]])).unwrap(), q(0));
        let inv = invert(&qm(&[&[2, 0], &[0, 4]]), 0.0).unwrap();
        let half = Rational::new(1.into(), 2.into());
        let quarter = Rational::new(1.into(), 4.into());
        assert_eq!(inv, Matrix::from_rows(vec![vec![half, q(0)], vec![q(0), quarter]]).unwrap());
        assert_eq!(invert(&qm(&[&[1, 1], &[-1, -1]]), 0.0), Err(Error::SingularMatrix));
    }

    #[test]
    fn complex_paths_agree_on_small_cases() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]).to_complex();
        assert_eq!(rank(&m, DEFAULT_TOL), 2);
        for v in solve_kernel(&m, DEFAULT_TOL) {
            let mv = (&m * &Matrix::new(3, 1, v).unwrap()).max_abs();
            assert!(mv < 1e-12);
        }
        let d = det(&qm(&[&[2, 1], &[1, 3]]).to_complex()).unwrap();
        assert!((d - ComplexF::new(5.0, 0.0)).norm() < 1e-12);
        assert_eq!(invert(&m, DEFAULT_TOL), Err(Error::SingularMatrix));
    }

    fn small_rational_matrix(max: usize) -> impl Strategy<Value = Matrix<Rational>> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-4i64..=4, 1i64..=3), r * c).prop_map(move |v| {
                let data = v.into_iter().map(|(n, d)| Rational::new(n.into(), d.into())).collect();
                Matrix::new(r, c, data).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_matches_transpose_and_oracle(m in small_rational_matrix(5)) {
            let r = rank(&m, 0.0);
            prop_assert_eq!(r, rank(&m.transpose(), 0.0));
            prop_assert_eq!(r, naive_rank(&m));
        }

        #[test]
        fn kernel_count_plus_rank_is_cols(m in small_rational_matrix(5)) {
            let kernel = solve_kernel(&m, 0.0);
            prop_assert_eq!(kernel.len() + rank(&m, 0.0), m.cols());
            for v in &kernel {
                let col = Matrix::new(m.cols(), 1, v.clone()).unwrap();
                prop_assert!((&m * &col).is_zero());
            }
            if !kernel.is_empty() {
                prop_assert_eq!(rank(&matrix_from_vectors(&kernel, m.cols()), 0.0), kernel.len());
            }
        }

        #[test]
        fn bareiss_determinant_matches_cofactors(
            v in (1usize..=4).prop_flat_map(|n| proptest::collection::vec((-5i64..=5, 1i64..=4), n * n))
        ) {
            let n = (v.len() as f64).sqrt() as usize;
            let data = v.into_iter().map(|(a, b)| Rational::new(a.into(), b.into())).collect();
            let m = Matrix::new(n, n, data).unwrap();
            prop_assert_eq!(det(&m).unwrap(), naive_det(&m));
        }

        #[test]
        fn inverse_is_involutive(m in small_rational_matrix(4)) {
            prop_assume!(m.is_square());
            if let Ok(inv) = invert(&m, 0.0) {
                prop_assert_eq!(&m * &inv, Matrix::identity(m.rows()));
                prop_assert_eq!(invert(&inv, 0.0).unwrap(), m.clone());
                let c = m.to_complex();
                let back = invert(&invert(&c, DEFAULT_TOL).unwrap(), DEFAULT_TOL).unwrap();
                prop_assert!(back.sub(&c).max_abs() < 1e-9);
            } else {
                prop_assert!(det(&m).unwrap().is_zero());
            }
        }
    }
}
