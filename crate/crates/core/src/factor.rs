//! In-place LQUP factorization of arbitrary-shape, arbitrary-rank
//! matrices, with rank and determinant on top.
//!
//! The input is overwritten: storage row s < rank holds the eliminated
//! multipliers in columns 0..s and the U row from column s on; rows past
//! the rank hold multipliers only. Row bookkeeping q maps storage rows
//! back to original rows, column bookkeeping likewise; the normative
//! contract is the exact reconstruction `L·Q·U·P = A`.

use crate::bounds::Instr;
use crate::element::Element;
use crate::field::PrimeField;
use crate::matmul::{fgemm, MulConfig};
use crate::matrix::Matrix;
use crate::perm::Permutation;
use crate::trsm::solve_right_upper;

#[derive(Clone, Debug)]
pub struct LQUPFactors<E> {
    storage: Matrix<E>,
    rank: usize,
    row_perm: Permutation,
    col_perm: Permutation,
}

impl<E: Element> LQUPFactors<E> {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn field(&self) -> PrimeField {
        self.storage.field()
    }

    /// The overwritten input: compressed multipliers below, U above.
    pub fn storage(&self) -> &Matrix<E> {
        &self.storage
    }

    /// Row permutation Q of the reconstruction `L·Q·U·P = A`.
    pub fn q(&self) -> &Permutation {
        &self.row_perm
    }

    /// Column permutation P of the reconstruction.
    pub fn p(&self) -> &Permutation {
        &self.col_perm
    }

    /// U: m×n upper triangular, exactly the first `rank` rows nonzero.
    pub fn expand_u(&self) -> Matrix<E> {
        let (m, n) = (self.storage.rows(), self.storage.cols());
        let mut u = Matrix::zeros(m, n, self.storage.field());
        for i in 0..self.rank {
            for j in i..n {
                u.set(i, j, self.storage.get(i, j));
            }
        }
        u
    }

    /// L in storage row order: unit lower triangular with the compressed
    /// multipliers below the diagonal. Satisfies `Q·A-rows = L̂·U·P`-wise
    /// bookkeeping; the solvers building inverses work in this indexing.
    pub fn expand_l_compressed(&self) -> Matrix<E> {
        let m = self.storage.rows();
        let mut l = Matrix::identity(m, self.storage.field());
        for s in 0..m {
            let lim = s.min(self.rank);
            for t in 0..lim {
                l.set(s, t, self.storage.get(s, t));
            }
        }
        l
    }

    /// L in original row indexing: unit lower triangular, `L·Q·U·P = A`.
    pub fn expand_l(&self) -> Matrix<E> {
        let m = self.storage.rows();
        let q = self.row_perm.image();
        let mut l = Matrix::identity(m, self.storage.field());
        for s in 0..m {
            let lim = s.min(self.rank);
            for t in 0..lim {
                l.set(q[s], q[t], self.storage.get(s, t));
            }
        }
        l
    }
}

/// Factors A in place. Rank deficiency is a result, never an error.
pub fn lqup<E: Element>(mut a: Matrix<E>, cfg: &MulConfig, instr: &mut Instr) -> LQUPFactors<E> {
    let f = a.field();
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= 1 && n >= 1);
    let mut row_map: Vec<usize> = (0..m).collect();
    let mut col_map: Vec<usize> = (0..n).collect();
    let rank = rec(&mut a, &f, 0, m, 0, &mut row_map, &mut col_map, cfg, instr);
    LQUPFactors {
        storage: a,
        rank,
        row_perm: Permutation::from_image(row_map),
        col_perm: Permutation::from_image(col_map).inverse(),
    }
}

/// Factors rows [r0, r0+m) against columns [c0, n). `c0` equals the number
/// of pivots found before this window. Column swaps run through the full
/// height of the matrix so earlier Y-regions and later raw rows stay
/// aligned with the pivot order.
#[allow(clippy::too_many_arguments)]
fn rec<E: Element>(
    a: &mut Matrix<E>,
    f: &PrimeField,
    r0: usize,
    m: usize,
    c0: usize,
    row_map: &mut [usize],
    col_map: &mut [usize],
    cfg: &MulConfig,
    instr: &mut Instr,
) -> usize {
    let n = a.cols();
    if c0 >= n {
        return 0;
    }
    if m == 1 {
        let pivot = (c0..n).find(|&j| !a.get(r0, j).is_zero());
        let Some(j) = pivot else { return 0 };
        if j != c0 {
            a.as_mut().swap_cols(c0, j);
            col_map.swap(c0, j);
        }
        return 1;
    }

    let m1 = m / 2;
    let m2 = m - m1;
    let r1 = rec(a, f, r0, m1, c0, row_map, col_map, cfg, instr);

    if r1 > 0 {
        // G·T = X with T the pivot block of the top rows; G replaces X
        let am = a.as_mut();
        let (top, bot) = am.split_rows_mut(r0 + m1);
        let t1 = top.rb().submatrix(r0, c0, r1, r1);
        let y1 = top.rb().submatrix(r0, c0 + r1, r1, n - c0 - r1);
        let bot = bot.submatrix_mut(0, 0, m2, n);
        let (mut g, mut z) = {
            let (left, right) = bot.split_cols_mut(c0 + r1);
            (
                left.submatrix_mut(0, c0, m2, r1),
                right.submatrix_mut(0, 0, m2, n - c0 - r1),
            )
        };
        solve_right_upper(f, t1, g.rb_mut(), cfg, instr)
            .expect("pivot block has nonzero diagonal");
        if n > c0 + r1 {
            let minus_one = f.reduce(E::one().neg());
            fgemm(f, minus_one, g.rb(), y1, E::one(), z.rb_mut(), cfg, instr)
                .expect("level selection cannot fail here");
        }
    }

    let r2 = rec(a, f, r0 + m1, m2, c0 + r1, row_map, col_map, cfg, instr);

    // interleave: [top pivots, top zeros, bottom pivots, …] becomes
    // [top pivots, bottom pivots, top zeros, …]
    let zeros = m1 - r1;
    if zeros > 0 && r2 > 0 {
        rotate_rows_left(a, r0 + r1, r0 + m1, r0 + m1 + r2);
        row_map[r0 + r1..r0 + m1 + r2].rotate_left(zeros);
    }
    r1 + r2
}

fn rotate_rows_left<E: Element>(a: &mut Matrix<E>, start: usize, mid: usize, end: usize) {
    let n = a.cols();
    let head = mid - start;
    let mut buf: Vec<Vec<E>> = Vec::with_capacity(head);
    for i in start..mid {
        buf.push((0..n).map(|j| a.get(i, j)).collect());
    }
    for i in mid..end {
        for j in 0..n {
            let v = a.get(i, j);
            a.set(i - head, j, v);
        }
    }
    for (off, row) in buf.into_iter().enumerate() {
        let dst = end - head + off;
        for (j, v) in row.into_iter().enumerate() {
            a.set(dst, j, v);
        }
    }
}

/// Rank via a factorization of a copy.
pub fn rank<E: Element>(a: &Matrix<E>, cfg: &MulConfig, instr: &mut Instr) -> usize {
    lqup(a.clone(), cfg, instr).rank()
}

/// Determinant: zero when rank deficient, otherwise the product of the
/// pivots signed by both permutations.
pub fn det<E: Element>(a: &Matrix<E>, cfg: &MulConfig, instr: &mut Instr) -> E {
    assert_eq!(a.rows(), a.cols(), "determinant needs a square matrix");
    let f = a.field();
    let n = a.rows();
    let factors = lqup(a.clone(), cfg, instr);
    if factors.rank() < n {
        return E::zero();
    }
    let mut acc = E::one();
    for i in 0..n {
        acc = f.mul(acc, factors.storage().get(i, i));
    }
    instr.ops.mults += n as u64;
    if factors.q().sign() * factors.p().sign() < 0 {
        acc = f.neg(acc);
    }
    acc
}


#[cfg(test)]
mod contract_tests {
    use super::*;
    use crate::field::Repr;

    #[test]
    #[should_panic(expected = "square")]
    fn det_rejects_rectangular() {
        let f = PrimeField::new(7, Repr::Positive, 53).unwrap();
        let a = Matrix::<f64>::zeros(2, 3, f);
        det(&a, &MulConfig::default(), &mut Instr::new());
    }
}
