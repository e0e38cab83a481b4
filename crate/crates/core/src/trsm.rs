//! Triangular solving with matrix right-hand side: X ← A⁻¹·B for upper
//! triangular A, B overwritten in place.
//!
//! Three interchangeable strategies:
//!   - pure block recursion with a reduction after every update product;
//!   - the same recursion with a fully delayed base case: systems of
//!     dimension ≤ t_del are back-substituted entirely over the integers;
//!   - a double cascade: coarse block columns of width t_split are solved
//!     with the delayed-base recursion whose update products accumulate
//!     over the integers (admissible while the block stays below the
//!     unreduced-accumulation bound), and one reduced multiplication
//!     propagates each solved block into the remaining right-hand side.
//!
//! Lower-triangular and right-hand-side orientations reduce to this case
//! by explicit transposition and index-reversal helpers.

use crate::bounds::{thresholds, Instr, Thresholds};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matmul::{fgemm, mm_accum_neg_raw, MulConfig};
use crate::matrix::{MatMut, MatRef, Matrix};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TrsmVariant {
    PureRecursive,
    DelayedBase,
    DoubleCascade,
}

/// Solves `A·X = B` (A upper triangular m×m, B m×n overwritten by X).
pub fn trsm<E: Element>(
    variant: TrsmVariant,
    f: &PrimeField,
    a: MatRef<E>,
    mut b: MatMut<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<()> {
    assert_eq!(a.rows(), a.cols(), "triangular matrix must be square");
    assert_eq!(a.rows(), b.rows(), "dimension mismatch");
    check_diagonal(a)?;
    match variant {
        TrsmVariant::PureRecursive => {
            trsm_rec(f, a, b, cfg, instr);
        }
        TrsmVariant::DelayedBase => {
            let th = thresholds(f.p(), f.gamma(), f.repr())?;
            let (_, unit) = normalize_unit_diagonal(f, a, b.rb_mut(), instr)?;
            rec_delayed(f, unit.as_ref(), b, th.t_del, cfg, instr);
        }
        TrsmVariant::DoubleCascade => {
            let th = thresholds(f.p(), f.gamma(), f.repr())?;
            let (_, unit) = normalize_unit_diagonal(f, a, b.rb_mut(), instr)?;
            cascade(f, unit.as_ref(), b, &th, cfg, instr);
        }
    }
    Ok(())
}

fn check_diagonal<E: Element>(a: MatRef<E>) -> Result<()> {
    for i in 0..a.rows() {
        if a.at(i, i).is_zero() {
            return Err(Error::Singular { index: i });
        }
    }
    Ok(())
}

/// Pure block recursion: split at ⌊m/2⌋, solve the bottom system, update
/// `B1 ← B1 - A2·X2` with an immediate reduction, solve the top.
pub fn trsm_rec<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    mut b: MatMut<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) {
    let m = a.rows();
    if m == 1 {
        let inv = f.inv(a.at(0, 0)).expect("diagonal checked nonzero");
        instr.ops.divisions += 1;
        for v in b.row_mut(0) {
            *v = f.mul(inv, *v);
        }
        instr.ops.mults += b.cols() as u64;
        instr.ops.reductions += b.cols() as u64;
        return;
    }
    let m1 = m / 2;
    let (a1, a2, _, a3) = a.quad(m1, m1);
    {
        let (_, b2) = b.rb_mut().split_rows_mut(m1);
        trsm_rec(f, a3, b2, cfg, instr);
    }
    // B1 ← B1 - A2·X2, reduced immediately
    let minus_one = f.reduce(E::one().neg());
    let (mut b1, b2) = b.split_rows_mut(m1);
    fgemm(f, minus_one, a2, b2.rb(), E::one(), b1.rb_mut(), cfg, instr)
        .expect("level selection cannot fail here");
    trsm_rec(f, a1, b1, cfg, instr);
}

/// Makes an upper triangular matrix unit diagonal: `A = D·A'` with D the
/// diagonal of A, and rescales B ← D⁻¹·B so `A'·X = D⁻¹B` has the same
/// solution. Returns (D, A').
pub fn normalize_unit_diagonal<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    mut b: MatMut<E>,
    instr: &mut Instr,
) -> Result<(Vec<E>, Matrix<E>)> {
    let m = a.rows();
    let n = b.cols();
    let mut d = Vec::with_capacity(m);
    let mut unit = Matrix::zeros(m, m, *f);
    let mut all_unit = true;
    for i in 0..m {
        let di = a.at(i, i);
        if di.is_zero() {
            return Err(Error::Singular { index: i });
        }
        if di != E::one() {
            all_unit = false;
        }
        d.push(di);
    }
    let mut um = unit.as_mut();
    if all_unit {
        for i in 0..m {
            um.row_mut(i)[i..].copy_from_slice(&a.row(i)[i..]);
        }
        return Ok((d, unit));
    }
    for i in 0..m {
        let inv = f.inv(d[i])?;
        instr.ops.divisions += 1;
        let urow = um.row_mut(i);
        urow[i] = E::one();
        for j in (i + 1)..m {
            urow[j] = f.mul(inv, a.at(i, j));
        }
        for v in b.row_mut(i) {
            *v = f.mul(inv, *v);
        }
        instr.ops.mults += (m - i - 1 + n) as u64;
        instr.ops.reductions += (m - i - 1 + n) as u64;
    }
    Ok((d, unit))
}

/// Fully delayed solve: the entire back-substitution runs over the
/// integers with no intermediate reduction; admissible only up to the
/// t_del dimension bound. A must be unit upper triangular and canonical.
pub fn trsm_delayed<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    b: MatMut<E>,
    instr: &mut Instr,
) {
    let td = crate::bounds::t_del(f.p(), f.gamma(), f.repr());
    assert!(
        a.rows() <= td,
        "delayed solve of dimension {} exceeds the bound {}",
        a.rows(),
        td
    );
    delayed_base(f, a, b, instr);
}

fn delayed_base<E: Element>(f: &PrimeField, a: MatRef<E>, mut b: MatMut<E>, instr: &mut Instr) {
    let m = a.rows();
    let n = b.cols();
    // inputs reduced immediately before the unreduced solve
    for i in 0..m {
        for v in b.row_mut(i) {
            *v = f.reduce(*v);
        }
    }
    instr.ops.reductions += (m * n) as u64;
    for i in (0..m).rev() {
        let arow = a.row(i);
        for t in (i + 1)..m {
            let coeff = arow[t];
            let (mut bi, bt) = split_two(b.rb_mut(), i, t);
            if instr.trace {
                for (d, &s) in bi.row_mut(0).iter_mut().zip(bt.row(0)) {
                    let prod = coeff.mul(s);
                    instr.observe(prod.abs_u128());
                    *d = d.sub(prod);
                    instr.observe(d.abs_u128());
                }
            } else {
                for (d, &s) in bi.row_mut(0).iter_mut().zip(bt.row(0)) {
                    *d = d.sub(coeff.mul(s));
                }
            }
        }
    }
    instr.ops.mults += (m * (m - 1) / 2 * n) as u64;
    instr.ops.adds += (m * (m - 1) / 2 * n) as u64;
    for i in 0..m {
        for v in b.row_mut(i) {
            *v = f.reduce(*v);
        }
    }
    instr.ops.reductions += (m * n) as u64;
}

/// Disjoint single-row views of rows i and t (i ≠ t).
fn split_two<E: Element>(b: MatMut<'_, E>, i: usize, t: usize) -> (MatMut<'_, E>, MatMut<'_, E>) {
    assert!(i < t);
    let n = b.cols();
    let (top, bot) = b.split_rows_mut(t);
    (top.submatrix_mut(i, 0, 1, n), bot.submatrix_mut(0, 0, 1, n))
}

/// Recursion with the delayed base case; update products reduced at once.
fn rec_delayed<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    mut b: MatMut<E>,
    t_del: usize,
    cfg: &MulConfig,
    instr: &mut Instr,
) {
    let m = a.rows();
    if m <= t_del {
        delayed_base(f, a, b, instr);
        return;
    }
    let m1 = m / 2;
    let (a1, a2, _, a3) = a.quad(m1, m1);
    {
        let (_, b2) = b.rb_mut().split_rows_mut(m1);
        rec_delayed(f, a3, b2, t_del, cfg, instr);
    }
    let minus_one = f.reduce(E::one().neg());
    let (mut b1, b2) = b.rb_mut().split_rows_mut(m1);
    fgemm(f, minus_one, a2, b2.rb(), E::one(), b1.rb_mut(), cfg, instr)
        .expect("level selection cannot fail here");
    rec_delayed(f, a1, b1, t_del, cfg, instr);
}

/// Coarse pass of the double cascade: block columns of width t_split are
/// processed from the bottom right upward.
fn cascade<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    mut b: MatMut<E>,
    th: &Thresholds,
    cfg: &MulConfig,
    instr: &mut Instr,
) {
    let m = a.rows();
    let n = b.cols();
    let ts = th.t_split.max(1);
    let blocks = m.div_ceil(ts);
    let minus_one = f.reduce(E::one().neg());
    for i in (0..blocks).rev() {
        let s = i * ts;
        let e = (s + ts).min(m);
        {
            let block = a.submatrix(s, s, e - s, e - s);
            let bs = b.rb_mut().submatrix_mut(s, 0, e - s, n);
            partial_delayed(f, block, bs, th, instr);
        }
        {
            let mut bs = b.rb_mut().submatrix_mut(s, 0, e - s, n);
            bs.reduce_all(f);
            instr.ops.reductions += ((e - s) * n) as u64;
        }
        if s > 0 {
            // one multiplication, one reduction for the whole update
            let v = a.submatrix(0, s, s, e - s);
            let (mut btop, bs) = b.rb_mut().split_rows_mut(s);
            let xs = bs.rb().submatrix(0, 0, e - s, n);
            fgemm(f, minus_one, v, xs, E::one(), btop.rb_mut(), cfg, instr)
                .expect("level selection cannot fail here");
        }
    }
}

/// Fine recursion of the cascade: updates accumulate over the integers
/// without reduction (the enclosing block is below the accumulation
/// bound), the base case reduces its inputs and solves fully delayed.
fn partial_delayed<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    mut b: MatMut<E>,
    th: &Thresholds,
    instr: &mut Instr,
) {
    let m = a.rows();
    if m <= th.t_del {
        delayed_base(f, a, b, instr);
        return;
    }
    let m1 = m / 2;
    let (a1, a2, _, a3) = a.quad(m1, m1);
    {
        let (_, b2) = b.rb_mut().split_rows_mut(m1);
        partial_delayed(f, a3, b2, th, instr);
    }
    let (b1, b2) = b.rb_mut().split_rows_mut(m1);
    // B1 ← B1 - A2·X2 without modular reduction
    mm_accum_neg_raw(a2, b2.rb(), b1, instr);
    let (b1, _) = b.split_rows_mut(m1);
    partial_delayed(f, a1, b1, th, instr);
}

/// Copy with both index orders reversed: out[i][j] = m[R-1-i][C-1-j].
/// Turns lower triangular into upper and preserves solutions up to the
/// same reversal of the right-hand side.
pub fn reverse_copy<E: Element>(m: MatRef<E>, f: PrimeField) -> Matrix<E> {
    let (r, c) = (m.rows(), m.cols());
    let mut out = Matrix::zeros(r, c, f);
    for i in 0..r {
        for j in 0..c {
            out.set(i, j, m.at(r - 1 - i, c - 1 - j));
        }
    }
    out
}

fn reverse_rows_inplace<E: Element>(mut b: MatMut<E>) {
    let r = b.rows();
    for i in 0..r / 2 {
        b.swap_rows(i, r - 1 - i);
    }
}

/// Solves `L·X = B` for lower triangular L by index reversal around the
/// upper cascade.
pub fn solve_lower_left<E: Element>(
    f: &PrimeField,
    l: MatRef<E>,
    mut b: MatMut<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<()> {
    let rev = reverse_copy(l, *f);
    reverse_rows_inplace(b.rb_mut());
    // columns of B are untouched by the reversal of the system
    let mut cols_rev = Matrix::zeros(b.rows(), b.cols(), *f);
    for i in 0..b.rows() {
        cols_rev.as_mut().row_mut(i).copy_from_slice(b.row(i));
    }
    trsm(
        TrsmVariant::DoubleCascade,
        f,
        rev.as_ref(),
        cols_rev.as_mut(),
        cfg,
        instr,
    )?;
    for i in 0..b.rows() {
        b.row_mut(i).copy_from_slice(cols_rev.as_ref().row(i));
    }
    reverse_rows_inplace(b);
    Ok(())
}

/// Solves `X·T = B` for upper triangular T (right-side solve) via
/// transposition: `Tᵀ·Xᵀ = Bᵀ` with Tᵀ lower triangular.
pub fn solve_right_upper<E: Element>(
    f: &PrimeField,
    t: MatRef<E>,
    b: MatMut<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<()> {
    let tt = t.transpose_to(*f);
    let mut bt = b.rb().transpose_to(*f);
    solve_lower_left(f, tt.as_ref(), bt.as_mut(), cfg, instr)?;
    let mut b = b;
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            b.write(i, j, bt.get(j, i));
        }
    }
    Ok(())
}

/// Solves `X·L = B` for lower triangular L via transposition to the
/// left-upper case.
pub fn solve_right_lower<E: Element>(
    f: &PrimeField,
    l: MatRef<E>,
    b: MatMut<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<()> {
    let lt = l.transpose_to(*f);
    let mut bt = b.rb().transpose_to(*f);
    trsm(
        TrsmVariant::DoubleCascade,
        f,
        lt.as_ref(),
        bt.as_mut(),
        cfg,
        instr,
    )?;
    let mut b = b;
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            b.write(i, j, bt.get(j, i));
        }
    }
    Ok(())
}


#[cfg(test)]
mod contract_tests {
    use super::*;
    use crate::field::Repr;

    #[test]
    #[should_panic(expected = "exceeds the bound")]
    fn delayed_solve_rejects_oversized_system() {
        let f = PrimeField::new(8388617, Repr::Positive, 53).unwrap(); // t_del = 2
        let a = Matrix::<f64>::identity(8, f);
        let mut b = Matrix::<f64>::zeros(8, 2, f);
        let mut instr = Instr::new();
        trsm_delayed(&f, a.as_ref(), b.as_mut(), &mut instr);
    }
}
