//! Derived routines on top of the multiplication kernel, the triangular
//! solvers and the LQUP factorization: nullspace bases, triangular
//! products, symmetric squarings, the LDLᵀ factorization, and the inverse
//! family through the rank-deficient Moore-Penrose pseudo-inverse.

use crate::bounds::Instr;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::factor::lqup;
use crate::field::{dot_delayed, PrimeField};
use crate::matmul::{fgemm, MulConfig};
use crate::matrix::{MatMut, MatRef, Matrix, Side};
use crate::perm::Direction;
use crate::trsm::{
    reverse_copy, solve_lower_left, solve_right_lower, solve_right_upper, trsm, TrsmVariant,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Uplo {
    Upper,
    Lower,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MulSide {
    Left,
    Right,
}

/// Basis of the right nullspace: an n×(n-r) matrix N with A·N = 0 and
/// independent columns. Rank deficiency is expected, not an error; a
/// full-rank wide matrix is the classical case.
pub fn nullspace_right<E: Element>(
    a: &Matrix<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Matrix<E> {
    let f = a.field();
    let n = a.cols();
    let fa = lqup(a.clone(), cfg, instr);
    let r = fa.rank();
    let mut basis = Matrix::zeros(n, n - r, f);
    if r > 0 && n > r {
        // S = U1⁻¹·U2, stacked above the identity with a sign flip
        let storage = fa.storage();
        let u1 = storage.view(0, 0, r, r);
        let mut s = storage.view(0, r, r, n - r).to_matrix(f);
        trsm(TrsmVariant::DoubleCascade, &f, u1, s.as_mut(), cfg, instr)
            .expect("pivot block is invertible");
        for i in 0..r {
            for j in 0..(n - r) {
                basis.set(i, j, f.neg(s.get(i, j)));
            }
        }
    }
    for j in 0..(n - r) {
        basis.set(r + j, j, E::one());
    }
    basis.permute(fa.p(), Side::Rows, Direction::Inverse);
    basis
}

/// In-place triangular multiplication: B ← T·B (left) or B ← B·T (right).
pub fn trmm<E: Element>(
    f: &PrimeField,
    side: MulSide,
    uplo: Uplo,
    t: MatRef<E>,
    mut b: MatMut<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) {
    assert_eq!(t.rows(), t.cols(), "triangular factor must be square");
    let n = t.rows();
    match side {
        MulSide::Left => assert_eq!(n, b.rows(), "dimension mismatch"),
        MulSide::Right => assert_eq!(n, b.cols(), "dimension mismatch"),
    }
    if n == 0 {
        return;
    }
    if n == 1 {
        let t00 = t.at(0, 0);
        match side {
            MulSide::Left => {
                for v in b.row_mut(0) {
                    *v = f.mul(t00, *v);
                }
                instr.ops.mults += b.cols() as u64;
                instr.ops.reductions += b.cols() as u64;
            }
            MulSide::Right => {
                for i in 0..b.rows() {
                    let v = b.at(i, 0);
                    b.write(i, 0, f.mul(v, t00));
                }
                instr.ops.mults += b.rows() as u64;
                instr.ops.reductions += b.rows() as u64;
            }
        }
        return;
    }
    let n1 = n / 2;
    let (t1, t2, t3, t4) = t.quad(n1, n1);
    match (side, uplo) {
        (MulSide::Left, Uplo::Upper) => {
            let (mut b1, b2) = b.split_rows_mut(n1);
            trmm(f, side, uplo, t1, b1.rb_mut(), cfg, instr);
            fgemm(f, E::one(), t2, b2.rb(), E::one(), b1, cfg, instr).expect("admissible");
            trmm(f, side, uplo, t4, b2, cfg, instr);
        }
        (MulSide::Left, Uplo::Lower) => {
            let (b1, mut b2) = b.split_rows_mut(n1);
            trmm(f, side, uplo, t4, b2.rb_mut(), cfg, instr);
            fgemm(f, E::one(), t3, b1.rb(), E::one(), b2, cfg, instr).expect("admissible");
            trmm(f, side, uplo, t1, b1, cfg, instr);
        }
        (MulSide::Right, Uplo::Upper) => {
            let (bl, mut br) = b.split_cols_mut(n1);
            trmm(f, side, uplo, t4, br.rb_mut(), cfg, instr);
            fgemm(f, E::one(), bl.rb(), t2, E::one(), br, cfg, instr).expect("admissible");
            trmm(f, side, uplo, t1, bl, cfg, instr);
        }
        (MulSide::Right, Uplo::Lower) => {
            let (mut bl, br) = b.split_cols_mut(n1);
            trmm(f, side, uplo, t1, bl.rb_mut(), cfg, instr);
            fgemm(f, E::one(), br.rb(), t3, E::one(), bl, cfg, instr).expect("admissible");
            trmm(f, side, uplo, t4, br, cfg, instr);
        }
    }
}

/// Upper × lower triangular product, dense result.
pub fn trtr_ul<E: Element>(
    f: &PrimeField,
    u: MatRef<E>,
    l: MatRef<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Matrix<E> {
    assert_eq!(u.rows(), u.cols());
    assert_eq!(l.rows(), l.cols());
    assert_eq!(u.cols(), l.rows(), "dimension mismatch");
    let n = u.rows();
    let mut c = Matrix::zeros(n, n, *f);
    if n == 0 {
        return c;
    }
    if n == 1 {
        c.set(0, 0, f.mul(u.at(0, 0), l.at(0, 0)));
        instr.ops.mults += 1;
        instr.ops.reductions += 1;
        return c;
    }
    let n1 = n / 2;
    let (u1, u2, _, u4) = u.quad(n1, n1);
    let (l1, _, l3, l4) = l.quad(n1, n1);
    // C11 = U1·L1 + U2·L3
    let c11 = trtr_ul(f, u1, l1, cfg, instr);
    {
        let mut c11v = c.view_mut(0, 0, n1, n1);
        c11v.copy_from(c11.as_ref());
        fgemm(f, E::one(), u2, l3, E::one(), c11v, cfg, instr).expect("admissible");
    }
    // C12 = U2·L4, C21 = U4·L3
    {
        let mut c12 = c.view_mut(0, n1, n1, n - n1);
        c12.copy_from(u2);
        trmm(f, MulSide::Right, Uplo::Lower, l4, c12, cfg, instr);
    }
    {
        let mut c21 = c.view_mut(n1, 0, n - n1, n1);
        c21.copy_from(l3);
        trmm(f, MulSide::Left, Uplo::Upper, u4, c21, cfg, instr);
    }
    // C22 = U4·L4
    let c22 = trtr_ul(f, u4, l4, cfg, instr);
    c.view_mut(n1, n1, n - n1, n - n1).copy_from(c22.as_ref());
    c
}

/// Lower × upper triangular product, dense result.
pub fn trtr_lu<E: Element>(
    f: &PrimeField,
    l: MatRef<E>,
    u: MatRef<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Matrix<E> {
    assert_eq!(l.rows(), l.cols());
    assert_eq!(u.rows(), u.cols());
    assert_eq!(l.cols(), u.rows(), "dimension mismatch");
    let n = l.rows();
    let mut c = Matrix::zeros(n, n, *f);
    if n == 0 {
        return c;
    }
    if n == 1 {
        c.set(0, 0, f.mul(l.at(0, 0), u.at(0, 0)));
        instr.ops.mults += 1;
        instr.ops.reductions += 1;
        return c;
    }
    let n1 = n / 2;
    let (l1, _, l3, l4) = l.quad(n1, n1);
    let (u1, u2, _, u4) = u.quad(n1, n1);
    let c11 = trtr_lu(f, l1, u1, cfg, instr);
    c.view_mut(0, 0, n1, n1).copy_from(c11.as_ref());
    {
        let mut c12 = c.view_mut(0, n1, n1, n - n1);
        c12.copy_from(u2);
        trmm(f, MulSide::Left, Uplo::Lower, l1, c12, cfg, instr);
    }
    {
        let mut c21 = c.view_mut(n1, 0, n - n1, n1);
        c21.copy_from(l3);
        trmm(f, MulSide::Right, Uplo::Upper, u1, c21, cfg, instr);
    }
    // C22 = L3·U2 + L4·U4
    let c22 = trtr_lu(f, l4, u4, cfg, instr);
    {
        let mut c22v = c.view_mut(n1, n1, n - n1, n - n1);
        c22v.copy_from(c22.as_ref());
        fgemm(f, E::one(), l3, u2, E::one(), c22v, cfg, instr).expect("admissible");
    }
    c
}

/// Upper × upper triangular product; the result is upper triangular.
pub fn trtr_uu<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    b: MatRef<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Matrix<E> {
    assert_eq!(a.rows(), a.cols());
    assert_eq!(b.rows(), b.cols());
    assert_eq!(a.cols(), b.rows(), "dimension mismatch");
    let n = a.rows();
    let mut c = Matrix::zeros(n, n, *f);
    if n == 0 {
        return c;
    }
    if n == 1 {
        c.set(0, 0, f.mul(a.at(0, 0), b.at(0, 0)));
        instr.ops.mults += 1;
        instr.ops.reductions += 1;
        return c;
    }
    let n1 = n / 2;
    let (a1, a2, _, a4) = a.quad(n1, n1);
    let (b1, b2, _, b4) = b.quad(n1, n1);
    let c11 = trtr_uu(f, a1, b1, cfg, instr);
    c.view_mut(0, 0, n1, n1).copy_from(c11.as_ref());
    let c22 = trtr_uu(f, a4, b4, cfg, instr);
    c.view_mut(n1, n1, n - n1, n - n1).copy_from(c22.as_ref());
    // C12 = A1·B2 + A2·B4
    {
        let mut c12 = c.view_mut(0, n1, n1, n - n1);
        c12.copy_from(b2);
        trmm(f, MulSide::Left, Uplo::Upper, a1, c12.rb_mut(), cfg, instr);
    }
    let mut a2b4 = a2.to_matrix(*f);
    trmm(f, MulSide::Right, Uplo::Upper, b4, a2b4.as_mut(), cfg, instr);
    {
        let mut c12 = c.view_mut(0, n1, n1, n - n1);
        for i in 0..n1 {
            for j in 0..(n - n1) {
                let v = f.add(c12.at(i, j), a2b4.get(i, j));
                c12.write(i, j, v);
            }
        }
        instr.ops.adds += (n1 * (n - n1)) as u64;
        instr.ops.reductions += (n1 * (n - n1)) as u64;
    }
    c
}

/// Symmetric product X·Yᵀ where Y = X·D for some diagonal D: only the
/// upper half is computed recursively, the rest is mirrored.
fn gram_rec<E: Element>(
    f: &PrimeField,
    x: MatRef<E>,
    y: MatRef<E>,
    mut c: MatMut<E>,
    accumulate: bool,
    cfg: &MulConfig,
    instr: &mut Instr,
) {
    let (m, k) = (x.rows(), x.cols());
    if m < 4 || k < 4 {
        let lambda = f.lambda();
        for i in 0..m {
            for j in i..m {
                let mut v = if k == 0 {
                    E::zero()
                } else {
                    dot_delayed(f, x.row(i), y.row(j), lambda)
                };
                if accumulate {
                    v = f.add(c.at(i, j), v);
                }
                c.write(i, j, v);
                c.write(j, i, v);
            }
        }
        let entries = (m * (m + 1) / 2) as u64;
        if k > 0 {
            instr.ops.mults += entries * k as u64;
            instr.ops.adds += entries * (k as u64 - 1);
        }
        if accumulate {
            instr.ops.adds += entries;
        }
        return;
    }
    let (m1, k1) = (m / 2, k / 2);
    let (x1, x2, x3, x4) = x.quad(m1, k1);
    let (y1, y2, y3, y4) = y.quad(m1, k1);
    {
        let c11 = c.rb_mut().submatrix_mut(0, 0, m1, m1);
        gram_rec(f, x1, y1, c11, accumulate, cfg, instr);
    }
    {
        let c11 = c.rb_mut().submatrix_mut(0, 0, m1, m1);
        gram_rec(f, x2, y2, c11, true, cfg, instr);
    }
    {
        let c22 = c.rb_mut().submatrix_mut(m1, m1, m - m1, m - m1);
        gram_rec(f, x3, y3, c22, accumulate, cfg, instr);
    }
    {
        let c22 = c.rb_mut().submatrix_mut(m1, m1, m - m1, m - m1);
        gram_rec(f, x4, y4, c22, true, cfg, instr);
    }
    // C21 = X3·Y1ᵀ + X4·Y2ᵀ, one corner only; the other is its transpose
    let y1t = y1.transpose_to(*f);
    let y2t = y2.transpose_to(*f);
    let beta = if accumulate { E::one() } else { E::zero() };
    {
        let mut c21 = c.rb_mut().submatrix_mut(m1, 0, m - m1, m1);
        fgemm(f, E::one(), x3, y1t.as_ref(), beta, c21.rb_mut(), cfg, instr).expect("admissible");
        fgemm(f, E::one(), x4, y2t.as_ref(), E::one(), c21, cfg, instr).expect("admissible");
    }
    for i in 0..(m - m1) {
        for j in 0..m1 {
            let v = c.at(m1 + i, j);
            c.write(j, m1 + i, v);
        }
    }
}

/// `A·D·Aᵀ` (D optional), exploiting the symmetry of the result.
pub fn aat<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    d: Option<&[E]>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Matrix<E> {
    let (m, k) = (a.rows(), a.cols());
    let scaled: Matrix<E>;
    let y: MatRef<E> = match d {
        None => a,
        Some(dv) => {
            assert_eq!(dv.len(), k, "diagonal length mismatch");
            let mut s = Matrix::zeros(m, k, *f);
            for i in 0..m {
                for (j, (dst, &src)) in s.as_mut().row_mut(i).iter_mut().zip(a.row(i)).enumerate()
                {
                    *dst = f.mul(src, dv[j]);
                }
            }
            instr.ops.mults += (m * k) as u64;
            instr.ops.reductions += (m * k) as u64;
            scaled = s;
            scaled.as_ref()
        }
    };
    let mut c = Matrix::zeros(m, m, *f);
    gram_rec(f, a, y, c.as_mut(), false, cfg, instr);
    c
}

/// `A·Aᵀ` for symmetric A (= A²). The block recursion reuses the symmetric
/// structure of the diagonal blocks; the off-diagonal Gram pieces still
/// cost two symmetric products.
pub fn sym_aat<E: Element>(a: &Matrix<E>, cfg: &MulConfig, instr: &mut Instr) -> Result<Matrix<E>> {
    let f = a.field();
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::Asymmetric);
    }
    for i in 0..n {
        for j in 0..i {
            if a.get(i, j) != a.get(j, i) {
                return Err(Error::Asymmetric);
            }
        }
    }
    let mut c = Matrix::zeros(n, n, f);
    sym_aat_rec(&f, a.as_ref(), c.as_mut(), cfg, instr);
    Ok(c)
}

fn sym_aat_rec<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    mut c: MatMut<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) {
    let n = a.rows();
    if n < 4 {
        let lambda = f.lambda();
        for i in 0..n {
            for j in i..n {
                let v = dot_delayed(f, a.row(i), a.row(j), lambda);
                c.write(i, j, v);
                c.write(j, i, v);
            }
        }
        let entries = (n * (n + 1) / 2) as u64;
        if n > 0 {
            instr.ops.mults += entries * n as u64;
            instr.ops.adds += entries * (n as u64 - 1);
        }
        return;
    }
    let n1 = n / 2;
    let (a1, a2, _, a4) = a.quad(n1, n1);
    {
        let c11 = c.rb_mut().submatrix_mut(0, 0, n1, n1);
        sym_aat_rec(f, a1, c11, cfg, instr);
    }
    {
        let c11 = c.rb_mut().submatrix_mut(0, 0, n1, n1);
        gram_rec(f, a2, a2, c11, true, cfg, instr);
    }
    {
        let c22 = c.rb_mut().submatrix_mut(n1, n1, n - n1, n - n1);
        sym_aat_rec(f, a4, c22, cfg, instr);
    }
    {
        let a2t = a2.transpose_to(*f);
        let c22 = c.rb_mut().submatrix_mut(n1, n1, n - n1, n - n1);
        gram_rec(f, a2t.as_ref(), a2t.as_ref(), c22, true, cfg, instr);
    }
    // C12 = A1·A2 + A2·A4
    {
        let mut c12 = c.rb_mut().submatrix_mut(0, n1, n1, n - n1);
        fgemm(f, E::one(), a1, a2, E::zero(), c12.rb_mut(), cfg, instr).expect("admissible");
        fgemm(f, E::one(), a2, a4, E::one(), c12, cfg, instr).expect("admissible");
    }
    for i in 0..n1 {
        for j in n1..n {
            let v = c.at(i, j);
            c.write(j, i, v);
        }
    }
}

/// `L·D·Lᵀ` for unit lower triangular L.
pub fn ltl<E: Element>(
    f: &PrimeField,
    l: MatRef<E>,
    d: &[E],
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Matrix<E> {
    let n = l.rows();
    assert_eq!(n, l.cols());
    assert_eq!(n, d.len());
    let mut c = Matrix::zeros(n, n, *f);
    ltl_rec(f, l, d, c.as_mut(), cfg, instr);
    c
}

fn ltl_rec<E: Element>(
    f: &PrimeField,
    l: MatRef<E>,
    d: &[E],
    mut c: MatMut<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) {
    let n = l.rows();
    if n == 0 {
        return;
    }
    if n == 1 {
        c.write(0, 0, d[0]);
        return;
    }
    let n1 = n / 2;
    let (l1, _, l3, l4) = l.quad(n1, n1);
    let (d1, d4) = d.split_at(n1);
    {
        let c11 = c.rb_mut().submatrix_mut(0, 0, n1, n1);
        ltl_rec(f, l1, d1, c11, cfg, instr);
    }
    // C21 = L3·D1·L1ᵀ
    let mut s3 = Matrix::zeros(n - n1, n1, *f);
    for i in 0..(n - n1) {
        for (j, (dst, &src)) in s3.as_mut().row_mut(i).iter_mut().zip(l3.row(i)).enumerate() {
            *dst = f.mul(src, d1[j]);
        }
    }
    instr.ops.mults += ((n - n1) * n1) as u64;
    instr.ops.reductions += ((n - n1) * n1) as u64;
    {
        let l1t = l1.transpose_to(*f);
        let mut c21 = c.rb_mut().submatrix_mut(n1, 0, n - n1, n1);
        c21.copy_from(s3.as_ref());
        trmm(f, MulSide::Right, Uplo::Upper, l1t.as_ref(), c21, cfg, instr);
    }
    // C22 = L3·D1·L3ᵀ + L4·D4·L4ᵀ
    {
        let c22 = c.rb_mut().submatrix_mut(n1, n1, n - n1, n - n1);
        gram_rec(f, l3, s3.as_ref(), c22, false, cfg, instr);
    }
    let rec22 = ltl(f, l4, d4, cfg, instr);
    {
        let mut c22 = c.rb_mut().submatrix_mut(n1, n1, n - n1, n - n1);
        for i in 0..(n - n1) {
            for j in 0..(n - n1) {
                let v = f.add(c22.at(i, j), rec22.get(i, j));
                c22.write(i, j, v);
            }
        }
        instr.ops.adds += ((n - n1) * (n - n1)) as u64;
        instr.ops.reductions += ((n - n1) * (n - n1)) as u64;
    }
    for i in 0..(n - n1) {
        for j in 0..n1 {
            let v = c.at(n1 + i, j);
            c.write(j, n1 + i, v);
        }
    }
}

/// `Lᵀ·D·L` for unit lower triangular L (the shape needed to rebuild a
/// symmetric inverse from its factorization).
pub fn ltl_t<E: Element>(
    f: &PrimeField,
    l: MatRef<E>,
    d: &[E],
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Matrix<E> {
    let n = l.rows();
    assert_eq!(n, l.cols());
    assert_eq!(n, d.len());
    let mut c = Matrix::zeros(n, n, *f);
    ltl_t_rec(f, l, d, c.as_mut(), cfg, instr);
    c
}

fn ltl_t_rec<E: Element>(
    f: &PrimeField,
    l: MatRef<E>,
    d: &[E],
    mut c: MatMut<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) {
    let n = l.rows();
    if n == 0 {
        return;
    }
    if n == 1 {
        c.write(0, 0, d[0]);
        return;
    }
    let n1 = n / 2;
    let (l1, _, l3, l4) = l.quad(n1, n1);
    let (d1, d4) = d.split_at(n1);
    // C11 = L1ᵀ·D1·L1 + L3ᵀ·D4·L3
    {
        let c11 = c.rb_mut().submatrix_mut(0, 0, n1, n1);
        ltl_t_rec(f, l1, d1, c11, cfg, instr);
    }
    let l3t = l3.transpose_to(*f);
    let mut s3t = Matrix::zeros(n1, n - n1, *f);
    for i in 0..n1 {
        for (j, (dst, &src)) in s3t
            .as_mut()
            .row_mut(i)
            .iter_mut()
            .zip(l3t.as_ref().row(i))
            .enumerate()
        {
            *dst = f.mul(src, d4[j]);
        }
    }
    instr.ops.mults += (n1 * (n - n1)) as u64;
    instr.ops.reductions += (n1 * (n - n1)) as u64;
    {
        let c11 = c.rb_mut().submatrix_mut(0, 0, n1, n1);
        gram_rec(f, l3t.as_ref(), s3t.as_ref(), c11, true, cfg, instr);
    }
    // C12 = L3ᵀ·D4·L4
    {
        let mut c12 = c.rb_mut().submatrix_mut(0, n1, n1, n - n1);
        c12.copy_from(s3t.as_ref());
        trmm(f, MulSide::Right, Uplo::Lower, l4, c12, cfg, instr);
    }
    {
        let c22 = c.rb_mut().submatrix_mut(n1, n1, n - n1, n - n1);
        ltl_t_rec(f, l4, d4, c22, cfg, instr);
    }
    for i in 0..n1 {
        for j in n1..n {
            let v = c.at(i, j);
            c.write(j, i, v);
        }
    }
}

/// LDLᵀ factorization of a symmetric matrix with generic rank profile
/// (every leading principal minor nonzero). No pivoting: a vanishing
/// minor is an error naming the failing order.
pub fn ldlt_factor<E: Element>(
    a: &Matrix<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<(Matrix<E>, Vec<E>)> {
    let f = a.field();
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::Asymmetric);
    }
    for i in 0..n {
        for j in 0..i {
            if a.get(i, j) != a.get(j, i) {
                return Err(Error::Asymmetric);
            }
        }
    }
    let mut work = a.clone();
    let mut l = Matrix::identity(n, f);
    let mut d = vec![E::zero(); n];
    ldlt_rec(&f, work.as_mut(), l.as_mut(), &mut d, 0, cfg, instr)?;
    Ok((l, d))
}

fn ldlt_rec<E: Element>(
    f: &PrimeField,
    mut a: MatMut<E>,
    mut l: MatMut<E>,
    d: &mut [E],
    order0: usize,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<()> {
    let n = a.rows();
    if n == 0 {
        return Ok(());
    }
    if n == 1 {
        if a.at(0, 0).is_zero() {
            return Err(Error::NonGenericMinor { order: order0 + 1 });
        }
        d[0] = a.at(0, 0);
        return Ok(());
    }
    let n1 = n / 2;
    {
        let a1 = a.rb_mut().submatrix_mut(0, 0, n1, n1);
        let l1 = l.rb_mut().submatrix_mut(0, 0, n1, n1);
        ldlt_rec(f, a1, l1, &mut d[..n1], order0, cfg, instr)?;
    }
    // G from L1·D1·Gᵀ = A2, i.e. A3 = G·D1·L1ᵀ: right-solve then unscale
    {
        let a3 = a.rb().submatrix(n1, 0, n - n1, n1);
        let (l_top, l_bot) = l.rb_mut().split_rows_mut(n1);
        let l1 = l_top.rb().submatrix(0, 0, n1, n1);
        let mut g = l_bot.submatrix_mut(0, 0, n - n1, n1);
        g.copy_from(a3);
        let l1t = l1.transpose_to(*f);
        solve_right_upper(f, l1t.as_ref(), g.rb_mut(), cfg, instr)
            .expect("unit diagonal cannot be singular");
        for j in 0..n1 {
            let inv = f.inv(d[j]).expect("pivots checked nonzero");
            instr.ops.divisions += 1;
            for i in 0..(n - n1) {
                let v = f.mul(g.at(i, j), inv);
                g.write(i, j, v);
            }
        }
        instr.ops.mults += ((n - n1) * n1) as u64;
        instr.ops.reductions += ((n - n1) * n1) as u64;
    }
    // Schur update A4 ← A4 - G·D1·Gᵀ
    {
        let g = l.rb().submatrix(n1, 0, n - n1, n1);
        let schur = aat(f, g, Some(&d[..n1]), cfg, instr);
        let mut a4 = a.rb_mut().submatrix_mut(n1, n1, n - n1, n - n1);
        for i in 0..(n - n1) {
            for j in 0..(n - n1) {
                let v = f.sub(a4.at(i, j), schur.get(i, j));
                a4.write(i, j, v);
            }
        }
        instr.ops.adds += ((n - n1) * (n - n1)) as u64;
        instr.ops.reductions += ((n - n1) * (n - n1)) as u64;
    }
    let a4 = a.submatrix_mut(n1, n1, n - n1, n - n1);
    let l4 = l.submatrix_mut(n1, n1, n - n1, n - n1);
    ldlt_rec(f, a4, l4, &mut d[n1..], order0 + n1, cfg, instr)
}

/// Triangular inverse via two recursive calls and two triangular products.
pub fn trinv<E: Element>(
    f: &PrimeField,
    uplo: Uplo,
    t: MatRef<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<Matrix<E>> {
    assert_eq!(t.rows(), t.cols());
    let mut out = t.to_matrix(*f);
    trinv_rec(f, uplo, out.as_mut(), 0, cfg, instr)?;
    Ok(out)
}

fn trinv_rec<E: Element>(
    f: &PrimeField,
    uplo: Uplo,
    mut t: MatMut<E>,
    offset: usize,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<()> {
    let n = t.rows();
    if n == 0 {
        return Ok(());
    }
    if n == 1 {
        let v = t.at(0, 0);
        if v.is_zero() {
            return Err(Error::Singular { index: offset });
        }
        t.write(0, 0, f.inv(v)?);
        instr.ops.divisions += 1;
        return Ok(());
    }
    let n1 = n / 2;
    match uplo {
        Uplo::Upper => {
            {
                let t1 = t.rb_mut().submatrix_mut(0, 0, n1, n1);
                trinv_rec(f, uplo, t1, offset, cfg, instr)?;
            }
            {
                let t4 = t.rb_mut().submatrix_mut(n1, n1, n - n1, n - n1);
                trinv_rec(f, uplo, t4, offset + n1, cfg, instr)?;
            }
            let (top, bot) = t.split_rows_mut(n1);
            let (t1_part, mut t2) = top.split_cols_mut(n1);
            let t4 = bot.submatrix_mut(0, n1, n - n1, n - n1);
            trmm(f, MulSide::Left, Uplo::Upper, t1_part.rb(), t2.rb_mut(), cfg, instr);
            trmm(f, MulSide::Right, Uplo::Upper, t4.rb(), t2.rb_mut(), cfg, instr);
            for i in 0..n1 {
                for v in t2.row_mut(i) {
                    *v = f.neg(*v);
                }
            }
            instr.ops.adds += (n1 * (n - n1)) as u64;
        }
        Uplo::Lower => {
            {
                let t1 = t.rb_mut().submatrix_mut(0, 0, n1, n1);
                trinv_rec(f, uplo, t1, offset, cfg, instr)?;
            }
            {
                let t4 = t.rb_mut().submatrix_mut(n1, n1, n - n1, n - n1);
                trinv_rec(f, uplo, t4, offset + n1, cfg, instr)?;
            }
            let (top, bot) = t.split_rows_mut(n1);
            let t1 = top.rb().submatrix(0, 0, n1, n1);
            let (mut t3, t4m) = bot.split_cols_mut(n1);
            trmm(f, MulSide::Left, Uplo::Lower, t4m.rb(), t3.rb_mut(), cfg, instr);
            trmm(f, MulSide::Right, Uplo::Lower, t1, t3.rb_mut(), cfg, instr);
            for i in 0..(n - n1) {
                for v in t3.row_mut(i) {
                    *v = f.neg(*v);
                }
            }
            instr.ops.adds += (n1 * (n - n1)) as u64;
        }
    }
    Ok(())
}

/// Dense inverse: factor, invert the unit lower factor, one triangular
/// solve, undo both permutations.
pub fn inv<E: Element>(a: &Matrix<E>, cfg: &MulConfig, instr: &mut Instr) -> Result<Matrix<E>> {
    let f = a.field();
    let n = a.rows();
    assert_eq!(n, a.cols(), "inverse needs a square matrix");
    let fa = lqup(a.clone(), cfg, instr);
    if fa.rank() < n {
        return Err(Error::SingularRank { rank: fa.rank(), n });
    }
    let lhat = fa.expand_l_compressed();
    let mut x = trinv(&f, Uplo::Lower, lhat.as_ref(), cfg, instr)?;
    let u = fa.expand_u();
    trsm(TrsmVariant::DoubleCascade, &f, u.as_ref(), x.as_mut(), cfg, instr)?;
    x.permute(fa.q(), Side::Cols, Direction::Forward);
    x.permute(fa.p(), Side::Rows, Direction::Inverse);
    Ok(x)
}

/// Symmetric inverse from the LDLᵀ factorization.
pub fn sym_inv<E: Element>(a: &Matrix<E>, cfg: &MulConfig, instr: &mut Instr) -> Result<Matrix<E>> {
    let f = a.field();
    let (l, d) = ldlt_factor(a, cfg, instr)?;
    let li = trinv(&f, Uplo::Lower, l.as_ref(), cfg, instr)?;
    let mut dinv = Vec::with_capacity(d.len());
    for &v in &d {
        dinv.push(f.inv(v)?);
        instr.ops.divisions += 1;
    }
    Ok(ltl_t(&f, li.as_ref(), &dinv, cfg, instr))
}

/// Full-rank Moore-Penrose pseudo-inverse `Aᵀ(AAᵀ)⁻¹` for m ≤ n. Over a
/// finite field the Gram matrix can be singular even for full-rank A;
/// that is a reported failure, never a silent wrong answer.
pub fn pinv_fullrank<E: Element>(
    a: &Matrix<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<Matrix<E>> {
    let f = a.field();
    let (m, _n) = (a.rows(), a.cols());
    assert!(m <= a.cols(), "full-rank form expects m ≤ n");
    let gram = aat(&f, a.as_ref(), None, cfg, instr);
    let (l, d) = ldlt_factor(&gram, cfg, instr).map_err(|e| match e {
        Error::NonGenericMinor { .. } => {
            if crate::factor::rank(&gram, cfg, instr) < m {
                Error::PinvStage {
                    stage: "gram",
                    reason: "A·Aᵀ is singular mod p",
                }
            } else {
                Error::PinvStage {
                    stage: "gram",
                    reason: "A·Aᵀ lacks a generic rank profile",
                }
            }
        }
        other => other,
    })?;
    // Z = (AAᵀ)⁻¹·A via the factorization, then transpose
    let mut z = a.clone();
    solve_lower_left(&f, l.as_ref(), z.as_mut(), cfg, instr)?;
    for i in 0..m {
        let inv = f.inv(d[i])?;
        instr.ops.divisions += 1;
        for v in z.as_mut().row_mut(i) {
            *v = f.mul(inv, *v);
        }
    }
    instr.ops.mults += (m * z.cols()) as u64;
    instr.ops.reductions += (m * z.cols()) as u64;
    let lt = l.transpose();
    trsm(TrsmVariant::DoubleCascade, &f, lt.as_ref(), z.as_mut(), cfg, instr)?;
    Ok(z.transpose())
}

/// Rank-deficient Moore-Penrose pseudo-inverse from the full-rank
/// decomposition A = [L1;G]·[U1|Y] (both permutations undone at the end).
/// Every singular intermediate is reported with its stage.
pub fn pinv_rank_deficient<E: Element>(
    a: &Matrix<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<Matrix<E>> {
    let f = a.field();
    let (m, n) = (a.rows(), a.cols());
    let fa = lqup(a.clone(), cfg, instr);
    let r = fa.rank();
    if r == 0 {
        // the pseudo-inverse of the zero matrix is the zero matrix
        return Ok(Matrix::zeros(n, m, f));
    }
    let lhat = fa.expand_l_compressed();
    let l1 = lhat.view(0, 0, r, r).to_matrix(f);
    let g = lhat.view(r, 0, m - r, r).to_matrix(f);
    let storage = fa.storage();
    let mut u1 = Matrix::zeros(r, r, f);
    for i in 0..r {
        for j in i..r {
            u1.set(i, j, storage.get(i, j));
        }
    }
    let y = storage.view(0, r, r, n - r).to_matrix(f);

    // W = (L1 + L1⁻ᵀ·GᵀG)·(U1 + Y·Yᵀ·U1⁻¹)
    let gt = g.transpose();
    let mut gtg = aat(&f, gt.as_ref(), None, cfg, instr);
    let l1t = l1.transpose();
    trsm(
        TrsmVariant::DoubleCascade,
        &f,
        l1t.as_ref(),
        gtg.as_mut(),
        cfg,
        instr,
    )?;
    let w1 = mat_add(&f, &l1, &gtg, instr);
    let mut yyt = aat(&f, y.as_ref(), None, cfg, instr);
    let u1t = u1.transpose();
    solve_right_lower(&f, u1t.as_ref(), yyt.as_mut(), cfg, instr)?;
    let w2 = mat_add(&f, &u1, &yyt, instr);
    let mut w = Matrix::zeros(r, r, f);
    fgemm(
        &f,
        E::one(),
        w1.as_ref(),
        w2.as_ref(),
        E::zero(),
        w.as_mut(),
        cfg,
        instr,
    )
    .expect("admissible");

    // reversed factorization W = Uw·Lw through the index reversal
    let v = reverse_copy(w.as_ref(), f);
    let vf = lqup(v, cfg, instr);
    if vf.rank() < r {
        return Err(Error::PinvStage {
            stage: "reversed-lu",
            reason: "W is singular mod p",
        });
    }
    if !vf.q().is_identity() || !vf.p().is_identity() {
        return Err(Error::PinvStage {
            stage: "reversed-lu",
            reason: "W lacks a generic structure for the reversed factorization",
        });
    }
    let uw = reverse_copy(vf.expand_l_compressed().as_ref(), f); // unit upper
    let lw = reverse_copy(vf.expand_u().as_ref(), f); // lower, nonzero diagonal

    // H = (L1ᵀ·Uw)⁻¹·Gᵀ and Z = Yᵀ·(Lw·U1ᵀ)⁻¹
    let k1 = trtr_uu(&f, l1t.as_ref(), uw.as_ref(), cfg, instr);
    let lwt = lw.transpose();
    let k2 = trtr_uu(&f, u1.as_ref(), lwt.as_ref(), cfg, instr).transpose();
    let mut h = g.transpose();
    trsm(TrsmVariant::DoubleCascade, &f, k1.as_ref(), h.as_mut(), cfg, instr).map_err(|_| {
        Error::PinvStage {
            stage: "h-solve",
            reason: "L1ᵀ·Uw is singular mod p",
        }
    })?;
    let mut z = y.transpose();
    solve_right_lower(&f, k2.as_ref(), z.as_mut(), cfg, instr).map_err(|_| Error::PinvStage {
        stage: "z-solve",
        reason: "Lw·U1ᵀ is singular mod p",
    })?;

    // assemble [[W⁻¹, Lw⁻¹·H], [Z·Uw⁻¹, Z·H]]
    let lw_inv = trinv(&f, Uplo::Lower, lw.as_ref(), cfg, instr)?;
    let uw_inv = trinv(&f, Uplo::Upper, uw.as_ref(), cfg, instr)?;
    let w_inv = trtr_lu(&f, lw_inv.as_ref(), uw_inv.as_ref(), cfg, instr);
    let mut out = Matrix::zeros(n, m, f);
    out.view_mut(0, 0, r, r).copy_from(w_inv.as_ref());
    if m > r {
        let mut blk = h.clone();
        solve_lower_left(&f, lw.as_ref(), blk.as_mut(), cfg, instr)?;
        out.view_mut(0, r, r, m - r).copy_from(blk.as_ref());
    }
    if n > r {
        let mut blk = z.clone();
        solve_right_upper(&f, uw.as_ref(), blk.as_mut(), cfg, instr)?;
        out.view_mut(r, 0, n - r, r).copy_from(blk.as_ref());
        if m > r {
            let mut zh = Matrix::zeros(n - r, m - r, f);
            fgemm(
                &f,
                E::one(),
                z.as_ref(),
                h.as_ref(),
                E::zero(),
                zh.as_mut(),
                cfg,
                instr,
            )
            .expect("admissible");
            out.view_mut(r, r, n - r, m - r).copy_from(zh.as_ref());
        }
    }

    // undo the permutations of the decomposition
    out.permute(fa.p(), Side::Rows, Direction::Inverse);
    out.permute(fa.q(), Side::Cols, Direction::Forward);
    Ok(out)
}

fn mat_add<E: Element>(
    f: &PrimeField,
    a: &Matrix<E>,
    b: &Matrix<E>,
    instr: &mut Instr,
) -> Matrix<E> {
    let mut out = Matrix::zeros(a.rows(), a.cols(), *f);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out.set(i, j, f.add(a.get(i, j), b.get(i, j)));
        }
    }
    instr.ops.adds += (a.rows() * a.cols()) as u64;
    instr.ops.reductions += (a.rows() * a.cols()) as u64;
    out
}
