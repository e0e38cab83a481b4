//! Reference implementations kept deliberately naive and separate from the
//! production kernels. Tests compare the fast paths against these.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::element::Element;
use crate::field::PrimeField;
use crate::matrix::Matrix;
use crate::rng::Rng64;

/// Triple loop with a reduction after every single multiply and add.
pub fn naive_fgemm<E: Element>(
    alpha: E,
    a: &Matrix<E>,
    b: &Matrix<E>,
    beta: E,
    c: &Matrix<E>,
) -> Matrix<E> {
    let f = a.field();
    assert_eq!(a.cols(), b.rows());
    let (m, kk, n) = (a.rows(), a.cols(), b.cols());
    let mut out = Matrix::zeros(m, n, f);
    for i in 0..m {
        for j in 0..n {
            let mut acc = E::zero();
            for k in 0..kk {
                let prod = f.mul(a.get(i, k), b.get(k, j));
                acc = f.add(acc, prod);
            }
            acc = f.mul(f.reduce(alpha), acc);
            let carried = f.mul(f.reduce(beta), c.get(i, j));
            out.set(i, j, f.add(acc, carried));
        }
    }
    out
}

/// Plain matrix product with immediate reductions.
pub fn naive_mm<E: Element>(a: &Matrix<E>, b: &Matrix<E>) -> Matrix<E> {
    let z = Matrix::zeros(a.rows(), b.cols(), a.field());
    naive_fgemm(E::one(), a, b, E::zero(), &z)
}

/// Row-echelon rank over Z/pZ by straightforward Gaussian elimination.
pub fn echelon_rank<E: Element>(a: &Matrix<E>) -> usize {
    let f = a.field();
    let (m, n) = (a.rows(), a.cols());
    let mut w: Vec<Vec<i64>> = (0..m)
        .map(|i| (0..n).map(|j| a.get(i, j).to_i64()).collect())
        .collect();
    let mut rank = 0usize;
    for col in 0..n {
        let pivot = (rank..m).find(|&r| f.reduce(w[r][col]) != 0);
        let Some(pr) = pivot else { continue };
        w.swap(rank, pr);
        let inv = f.inv(f.reduce(w[rank][col])).unwrap();
        for r in (rank + 1)..m {
            let factor = f.mul(f.reduce(w[r][col]), inv);
            for cc in col..n {
                let sub = f.mul(factor, f.reduce(w[rank][cc]));
                w[r][cc] = f.sub(f.reduce(w[r][cc]), sub);
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

/// Cofactor-expansion determinant, practical for n ≤ 8.
pub fn cofactor_det<E: Element>(a: &Matrix<E>) -> i64 {
    let f = a.field();
    let n = a.rows();
    assert_eq!(n, a.cols());
    let w: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j).to_i64()).collect())
        .collect();
    fn go(f: &PrimeField, w: &[Vec<i64>], cols: &[usize]) -> i64 {
        let row = w.len() - cols.len();
        if cols.len() == 1 {
            return f.reduce(w[row][cols[0]]);
        }
        let mut acc = 0i64;
        for (idx, &c) in cols.iter().enumerate() {
            let minor_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let minor = go(f, w, &minor_cols);
            let term = f.mul(f.reduce(w[row][c]), minor);
            acc = if idx % 2 == 0 {
                f.add(acc, term)
            } else {
                f.sub(acc, term)
            };
        }
        acc
    }
    let cols: Vec<usize> = (0..n).collect();
    go(&f, &w, &cols)
}

/// Exact integer back-substitution for a unit upper triangular system.
pub fn back_substitute_exact(t: &[Vec<i64>], b: &[i64]) -> Vec<BigInt> {
    let n = b.len();
    let mut x = vec![BigInt::from(0); n];
    for i in (0..n).rev() {
        let mut acc = BigInt::from(b[i]);
        for j in (i + 1)..n {
            acc -= BigInt::from(t[i][j]) * &x[j];
        }
        x[i] = acc;
    }
    x
}

/// Largest |x| of the exact solution.
pub fn back_substitute_max(t: &[Vec<i64>], b: &[i64]) -> BigInt {
    back_substitute_exact(t, b)
        .into_iter()
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(|| BigInt::from(0))
}

/// Random canonical matrix.
pub fn random_matrix<E: Element>(
    rows: usize,
    cols: usize,
    f: PrimeField,
    rng: &mut Rng64,
) -> Matrix<E> {
    let mut m = Matrix::zeros(rows, cols, f);
    m.fill_random(rng);
    m
}

/// Random matrix of exact rank r, built as an m×r by r×n product of
/// full-rank factors.
pub fn random_matrix_of_rank<E: Element>(
    m: usize,
    n: usize,
    r: usize,
    f: PrimeField,
    rng: &mut Rng64,
) -> Matrix<E> {
    assert!(r <= m.min(n));
    if r == 0 {
        return Matrix::zeros(m, n, f);
    }
    loop {
        let left: Matrix<E> = random_matrix(m, r, f, rng);
        let right: Matrix<E> = random_matrix(r, n, f, rng);
        if echelon_rank(&left) == r && echelon_rank(&right) == r {
            return naive_mm(&left, &right);
        }
    }
}

/// Random upper (or lower) triangular matrix with nonzero diagonal.
pub fn random_triangular<E: Element>(
    n: usize,
    upper: bool,
    unit: bool,
    f: PrimeField,
    rng: &mut Rng64,
) -> Matrix<E> {
    let mut t = Matrix::zeros(n, n, f);
    for i in 0..n {
        let d = if unit {
            E::one()
        } else {
            f.reduce(E::from_i64(rng.range(1, f.p() - 1) as i64))
        };
        t.set(i, i, d);
        let (lo, hi) = if upper { (i + 1, n) } else { (0, i) };
        for j in lo..hi {
            t.set(i, j, f.random_elem(rng));
        }
    }
    t
}

/// Random nonsingular matrix (unit lower times non-unit upper, mixed by a
/// random row permutation).
pub fn random_nonsingular<E: Element>(n: usize, f: PrimeField, rng: &mut Rng64) -> Matrix<E> {
    let l: Matrix<E> = random_triangular(n, false, true, f, rng);
    let u: Matrix<E> = random_triangular(n, true, false, f, rng);
    let mut m = naive_mm(&l, &u);
    for i in (1..n).rev() {
        let j = rng.below((i + 1) as u64) as usize;
        m.as_mut().swap_rows(i, j);
    }
    m
}

/// Random symmetric matrix.
pub fn random_symmetric<E: Element>(n: usize, f: PrimeField, rng: &mut Rng64) -> Matrix<E> {
    let mut m = Matrix::zeros(n, n, f);
    for i in 0..n {
        for j in 0..=i {
            let v = f.random_elem(rng);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}
