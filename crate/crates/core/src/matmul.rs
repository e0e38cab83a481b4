//! The fgemm kernel: `C ← α·A·B + β·C` over Z/pZ.
//!
//! Three layers:
//!   - a cache-blocked classical kernel that accumulates over the integers
//!     and reduces every λ products (the l = 0 path, safe for any k);
//!   - a recursive seven-multiplication step (21-operation schedule, three
//!     half-size temporaries) run entirely over the integers — inside the
//!     cascade nothing is reduced, the admissible depth guarantees every
//!     intermediate fits the backend, and the result is reduced once;
//!   - dynamic peeling at every recursion level for odd dimensions.

use crate::bounds::{k_winograd, winograd_levels, Instr};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{MatMut, MatRef, Matrix};

/// Default switch order: one recursive level at and above this dimension.
pub const DEFAULT_SWITCH_ORDER: usize = 1024;
/// Default k-panel width of the classical kernel.
pub const DEFAULT_BLOCK: usize = 32;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Levels {
    /// `⌊log2(min_dim/w)⌋ + 1` levels, capped at the overflow-admissible depth.
    Auto,
    /// Exactly this many levels; errors when the depth is not admissible.
    Exact(u32),
}

#[derive(Copy, Clone, Debug)]
pub struct MulConfig {
    pub levels: Levels,
    /// Switch order w for the level formula.
    pub switch_order: usize,
    /// k-panel width of the classical base case.
    pub block: usize,
}

impl Default for MulConfig {
    fn default() -> Self {
        MulConfig {
            levels: Levels::Auto,
            switch_order: DEFAULT_SWITCH_ORDER,
            block: DEFAULT_BLOCK,
        }
    }
}

impl MulConfig {
    pub fn classical() -> MulConfig {
        MulConfig {
            levels: Levels::Exact(0),
            ..MulConfig::default()
        }
    }

    pub fn with_levels(levels: Levels) -> MulConfig {
        MulConfig {
            levels,
            ..MulConfig::default()
        }
    }
}

/// Result of an instrumented run: the product lands in C, the trace here.
#[derive(Clone, Debug)]
pub struct TraceResult {
    /// Largest |z| over every intermediate value of the computation.
    pub max_abs: u128,
    pub ops: crate::bounds::OpCounter,
}

/// Deepest l (≤ cap) for which k admits l unreduced levels.
pub fn admissible_levels(f: &PrimeField, k: usize, cap: u32) -> u32 {
    let mut l = 0u32;
    while l < cap {
        match k_winograd(f.p(), f.gamma(), l + 1, f.repr()) {
            Ok(kw) if (k as u64) <= kw => l += 1,
            _ => break,
        }
    }
    l
}

fn effective_levels<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    b: MatRef<E>,
    cfg: &MulConfig,
) -> Result<u32> {
    let min_dim = a.rows().min(a.cols()).min(b.cols());
    let k = a.cols();
    // dimensions halve per level, so recursion self-limits at this depth;
    // only the depth that can actually execute needs an overflow check
    let structural = usize::BITS - 1 - min_dim.max(1).leading_zeros();
    match cfg.levels {
        Levels::Exact(l) => {
            if l == 0 {
                return Ok(0);
            }
            let executable = l.min(structural).max(1);
            let adm = admissible_levels(f, k, executable);
            if adm < executable {
                return Err(Error::LevelTooDeep {
                    requested: l,
                    admissible: adm,
                });
            }
            Ok(l)
        }
        Levels::Auto => {
            let want = winograd_levels(min_dim.max(1), cfg.switch_order).min(structural);
            Ok(admissible_levels(f, k, want))
        }
    }
}

/// `C ← α·A·B + β·C`, canonical in, canonical out.
#[allow(clippy::too_many_arguments)]
pub fn fgemm<E: Element>(
    f: &PrimeField,
    alpha: E,
    a: MatRef<E>,
    b: MatRef<E>,
    beta: E,
    mut c: MatMut<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<()> {
    assert_eq!(a.cols(), b.rows(), "inner dimensions differ");
    assert_eq!(a.rows(), c.rows(), "row dimensions differ");
    assert_eq!(b.cols(), c.cols(), "column dimensions differ");

    let alpha = f.reduce(alpha);
    let beta = f.reduce(beta);

    if alpha.is_zero() || a.cols() == 0 {
        scale_reduce(f, beta, c.rb_mut(), instr);
        return Ok(());
    }

    let levels = effective_levels(f, a, b, cfg)?;

    // Fold α into a canonical copy of A so the growth analysis (stated for
    // α = 1) applies unchanged.
    let scaled;
    let a = if alpha == E::one() {
        a
    } else {
        scaled = scale_copy(f, alpha, a, instr);
        scaled.as_ref()
    };

    if levels == 0 {
        classic_fgemm(f, a, b, beta, c, cfg.block, instr);
    } else {
        rec_mul(f, levels, a, b, beta, c.rb_mut(), instr);
        reduce_all(f, c, instr);
    }
    Ok(())
}

/// Matrix-level wrapper; checks the operands share one field.
pub fn fgemm_mat<E: Element>(
    alpha: E,
    a: &Matrix<E>,
    b: &Matrix<E>,
    beta: E,
    c: &mut Matrix<E>,
    cfg: &MulConfig,
    instr: &mut Instr,
) -> Result<()> {
    assert_eq!(a.field(), b.field(), "field mismatch");
    assert_eq!(a.field(), c.field(), "field mismatch");
    let f = a.field();
    fgemm(&f, alpha, a.as_ref(), b.as_ref(), beta, c.as_mut(), cfg, instr)
}

/// As `fgemm` with max-intermediate tracking enabled.
pub fn fgemm_traced<E: Element>(
    f: &PrimeField,
    alpha: E,
    a: MatRef<E>,
    b: MatRef<E>,
    beta: E,
    c: MatMut<E>,
    cfg: &MulConfig,
) -> Result<TraceResult> {
    let mut instr = Instr::traced();
    fgemm(f, alpha, a, b, beta, c, cfg, &mut instr)?;
    Ok(TraceResult {
        max_abs: instr.max_abs,
        ops: instr.ops,
    })
}

/// Classical multiplication with delayed reductions: the l = 0 kernel.
/// `C ← A·B + β·C` with accumulation chunks of λ products (a nonzero seed
/// consumes one slot of the budget).
pub fn classic_mm_delayed<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    b: MatRef<E>,
    c: MatMut<E>,
    instr: &mut Instr,
) {
    classic_fgemm(f, a, b, E::zero(), c, DEFAULT_BLOCK, instr);
}

fn classic_fgemm<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    b: MatRef<E>,
    beta: E,
    mut c: MatMut<E>,
    block: usize,
    instr: &mut Instr,
) {
    let (m, kk, n) = (a.rows(), a.cols(), b.cols());
    let lambda = f.lambda();
    let block = block.max(1);
    if lambda == 1 {
        // No room to stack a product on a canonical seed: reduce eagerly.
        classic_fgemm_eager(f, a, b, beta, c, instr);
        return;
    }

    // Seed the accumulators with β·C (canonical), or zero them.
    let mut terms: u64 = if beta.is_zero() {
        for i in 0..m {
            c.row_mut(i).fill(E::zero());
        }
        0
    } else if beta == E::one() {
        1
    } else {
        for i in 0..m {
            for v in c.row_mut(i) {
                *v = f.reduce(beta.mul(*v));
            }
        }
        instr.ops.mults += (m * n) as u64;
        instr.ops.reductions += (m * n) as u64;
        1
    };

    let mut k0 = 0usize;
    while k0 < kk {
        if terms >= lambda {
            reduce_all(f, c.rb_mut(), instr);
            terms = 1;
        }
        let take = ((lambda - terms) as usize).min(kk - k0);
        // k-panels of `block` rows of B, reused across all rows of C
        let mut kb = k0;
        while kb < k0 + take {
            let kend = (kb + block).min(k0 + take);
            for i in 0..m {
                let crow = c.row_mut(i);
                for k in kb..kend {
                    let aik = a.at(i, k);
                    if instr.trace {
                        axpy_row::<E, true>(crow, aik, b.row(k), instr);
                    } else {
                        axpy_row::<E, false>(crow, aik, b.row(k), instr);
                    }
                }
            }
            kb = kend;
        }
        terms += take as u64;
        k0 += take;
    }

    if kk > 0 {
        instr.ops.mults += (m * kk * n) as u64;
        instr.ops.adds += (m * n) as u64 * (kk as u64 - 1 + u64::from(!beta.is_zero()));
    }
    reduce_all(f, c, instr);
}

/// Per-product reduction: the λ = 1 path. The product is reduced before it
/// joins the canonical running value, so sums never exceed 2(p-1).
fn classic_fgemm_eager<E: Element>(
    f: &PrimeField,
    a: MatRef<E>,
    b: MatRef<E>,
    beta: E,
    mut c: MatMut<E>,
    instr: &mut Instr,
) {
    let (m, kk, n) = (a.rows(), a.cols(), b.cols());
    scale_reduce(f, beta, c.rb_mut(), instr);
    for i in 0..m {
        let crow = c.row_mut(i);
        for k in 0..kk {
            let aik = a.at(i, k);
            let brow = b.row(k);
            for j in 0..n {
                let prod = f.reduce(aik.mul(brow[j]));
                if instr.trace {
                    instr.observe(prod.abs_u128());
                }
                crow[j] = f.reduce(crow[j].add(prod));
            }
        }
    }
    if kk > 0 {
        instr.ops.mults += (m * kk * n) as u64;
        instr.ops.adds += (m * n) as u64 * (kk as u64 - 1 + u64::from(!beta.is_zero()));
        instr.ops.reductions += 2 * (m * kk * n) as u64;
    }
}

#[inline(always)]
fn axpy_row<E: Element, const TRACE: bool>(dst: &mut [E], a: E, src: &[E], instr: &mut Instr) {
    if TRACE {
        for (d, &s) in dst.iter_mut().zip(src) {
            let prod = a.mul(s);
            instr.observe(prod.abs_u128());
            *d = d.add(prod);
            instr.observe(d.abs_u128());
        }
    } else {
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = d.add(a.mul(s));
        }
    }
}

fn reduce_all<E: Element>(f: &PrimeField, mut c: MatMut<E>, instr: &mut Instr) {
    for i in 0..c.rows() {
        for v in c.row_mut(i) {
            *v = f.reduce(*v);
        }
    }
    instr.ops.reductions += (c.rows() * c.cols()) as u64;
}

/// `C ← reduce(β·C)`.
fn scale_reduce<E: Element>(f: &PrimeField, beta: E, mut c: MatMut<E>, instr: &mut Instr) {
    let (m, n) = (c.rows(), c.cols());
    if beta.is_zero() {
        for i in 0..m {
            c.row_mut(i).fill(E::zero());
        }
        return;
    }
    if beta == E::one() {
        return;
    }
    for i in 0..m {
        for v in c.row_mut(i) {
            *v = f.reduce(beta.mul(*v));
        }
    }
    instr.ops.mults += (m * n) as u64;
    instr.ops.reductions += (m * n) as u64;
}

fn scale_copy<E: Element>(
    f: &PrimeField,
    alpha: E,
    a: MatRef<E>,
    instr: &mut Instr,
) -> Matrix<E> {
    let mut out = Matrix::zeros(a.rows(), a.cols(), *f);
    for i in 0..a.rows() {
        for (dst, &src) in out.as_mut().row_mut(i).iter_mut().zip(a.row(i)) {
            *dst = f.reduce(alpha.mul(src));
        }
    }
    instr.ops.mults += (a.rows() * a.cols()) as u64;
    instr.ops.reductions += (a.rows() * a.cols()) as u64;
    out
}

/// Recursive multiplication over the integers, no reductions anywhere.
/// Odd dimensions are peeled at each level: the even-dimensioned leading
/// blocks recurse, a rank-1 update and one trailing row/column of classical
/// products complete the result.
fn rec_mul<E: Element>(
    f: &PrimeField,
    l: u32,
    a: MatRef<E>,
    b: MatRef<E>,
    beta: E,
    mut c: MatMut<E>,
    instr: &mut Instr,
) {
    let (m, kk, n) = (a.rows(), a.cols(), b.cols());
    if l == 0 || m < 2 || kk < 2 || n < 2 {
        mm_accum_raw(a, b, beta, c, instr);
        return;
    }
    let (me, ke, ne) = (m & !1, kk & !1, n & !1);

    winograd_step(
        f,
        l,
        a.submatrix(0, 0, me, ke),
        b.submatrix(0, 0, ke, ne),
        beta,
        c.rb_mut().submatrix_mut(0, 0, me, ne),
        instr,
    );

    if ke < kk {
        // rank-1 completion of the even block, still over the integers
        let acol = a.submatrix(0, ke, me, 1);
        let brow = b.submatrix(ke, 0, 1, ne);
        let mut cee = c.rb_mut().submatrix_mut(0, 0, me, ne);
        for i in 0..me {
            let aik = acol.at(i, 0);
            if instr.trace {
                axpy_row::<E, true>(cee.row_mut(i), aik, brow.row(0), instr);
            } else {
                axpy_row::<E, false>(cee.row_mut(i), aik, brow.row(0), instr);
            }
        }
        instr.ops.mults += (me * ne) as u64;
        instr.ops.adds += (me * ne) as u64;
    }
    if me < m {
        // trailing row, full width and full depth
        mm_accum_raw(
            a.submatrix(me, 0, 1, kk),
            b,
            beta,
            c.rb_mut().submatrix_mut(me, 0, 1, n),
            instr,
        );
    }
    if ne < n {
        // trailing column over the even rows
        mm_accum_raw(
            a.submatrix(0, 0, me, kk),
            b.submatrix(0, ne, kk, 1),
            beta,
            c.rb_mut().submatrix_mut(0, ne, me, 1),
            instr,
        );
    }
}

/// One recursive level on even-dimensioned operands: the 21-operation
/// schedule with three temporaries X1, X2, X3.
fn winograd_step<E: Element>(
    f: &PrimeField,
    l: u32,
    a: MatRef<E>,
    b: MatRef<E>,
    beta: E,
    c: MatMut<E>,
    instr: &mut Instr,
) {
    let (m2, k2, n2) = (a.rows() / 2, a.cols() / 2, b.cols() / 2);
    let (a11, a12, a21, a22) = a.quad(m2, k2);
    let (b11, b12, b21, b22) = b.quad(k2, n2);
    let (mut c11, mut c12, mut c21, mut c22) = c.quad_mut(m2, n2);

    let mut x1: Matrix<E> = Matrix::zeros(m2, k2, *f);
    let mut x2: Matrix<E> = Matrix::zeros(k2, n2, *f);
    let mut x3: Matrix<E> = Matrix::zeros(m2, n2, *f);

    mat_sum(x1.as_mut(), a21, a22, false, instr); // S1 = A21 + A22
    mat_sum(x2.as_mut(), b12, b11, true, instr); // T1 = B12 - B11
    rec_mul(f, l - 1, x1.as_ref(), x2.as_ref(), E::zero(), x3.as_mut(), instr); // P5
    mat_axpby(c22.rb_mut(), x3.as_ref(), beta, instr); // C22 = P5 + β·C22
    mat_axpby(c12.rb_mut(), x3.as_ref(), beta, instr); // C12 = P5 + β·C12
    mat_sum_assign(x1.as_mut(), a11, true, false, instr); // S2 = S1 - A11
    mat_sum_assign(x2.as_mut(), b22, true, true, instr); // T2 = B22 - T1
    rec_mul(f, l - 1, a11, b11, E::zero(), x3.as_mut(), instr); // P1
    mat_axpby(c11.rb_mut(), x3.as_ref(), beta, instr); // C11 = P1 + β·C11
    rec_mul(f, l - 1, x1.as_ref(), x2.as_ref(), E::one(), x3.as_mut(), instr); // U2 = S2·T2 + P1
    rec_mul(f, l - 1, a12, b21, E::one(), c11.rb_mut(), instr); // U1 = A12·B21 + C11
    mat_sum_assign(x1.as_mut(), a12, true, true, instr); // S4 = A12 - S2
    mat_sum_assign(x2.as_mut(), b21, true, false, instr); // T4 = T2 - B21
    rec_mul(f, l - 1, x1.as_ref(), b22, E::one(), c12.rb_mut(), instr); // C12 += S4·B22
    mat_add_assign(c12.rb_mut(), x3.as_ref(), instr); // U5 = U2 + C12
    rec_mul(f, l - 1, a22, x2.as_ref(), beta.neg(), c21.rb_mut(), instr); // P4 = A22·T4 - β·C21
    mat_sum(x1.as_mut(), a11, a21, true, instr); // S3 = A11 - A21
    mat_sum(x2.as_mut(), b22, b12, true, instr); // T3 = B22 - B12
    rec_mul(f, l - 1, x1.as_ref(), x2.as_ref(), E::one(), x3.as_mut(), instr); // U3 = S3·T3 + U2
    mat_add_assign(c22.rb_mut(), x3.as_ref(), instr); // U7 = U3 + C22
    mat_rsub_assign(c21.rb_mut(), x3.as_ref(), instr); // U6 = U3 - P4
}

/// Base case: `C = A·B + β·C` exactly over the integers. β of ±1 costs one
/// add per entry; β = 0 overwrites.
fn mm_accum_raw<E: Element>(
    a: MatRef<E>,
    b: MatRef<E>,
    beta: E,
    mut c: MatMut<E>,
    instr: &mut Instr,
) {
    let (m, kk, n) = (a.rows(), a.cols(), b.cols());
    debug_assert!(kk >= 1);
    let neg_one = E::one().neg();
    if beta.is_zero() {
        for i in 0..m {
            c.row_mut(i).fill(E::zero());
        }
    } else if beta == neg_one {
        for i in 0..m {
            for v in c.row_mut(i) {
                *v = v.neg();
            }
        }
    } else if beta != E::one() {
        for i in 0..m {
            for v in c.row_mut(i) {
                *v = beta.mul(*v);
                if instr.trace {
                    instr.observe(v.abs_u128());
                }
            }
        }
        instr.ops.mults += (m * n) as u64;
    }
    for i in 0..m {
        let crow = c.row_mut(i);
        for k in 0..kk {
            let aik = a.at(i, k);
            if instr.trace {
                axpy_row::<E, true>(crow, aik, b.row(k), instr);
            } else {
                axpy_row::<E, false>(crow, aik, b.row(k), instr);
            }
        }
    }
    instr.ops.mults += (m * kk * n) as u64;
    instr.ops.adds += (m * n) as u64 * (kk as u64 - 1 + u64::from(!beta.is_zero()));
}

/// `C ← C - A·B` exactly over the integers, no reduction. Used by the
/// cascade solver where the enclosing block width bounds the accumulation.
pub(crate) fn mm_accum_neg_raw<E: Element>(
    a: MatRef<E>,
    b: MatRef<E>,
    mut c: MatMut<E>,
    instr: &mut Instr,
) {
    let (m, kk, n) = (a.rows(), a.cols(), b.cols());
    for i in 0..m {
        let crow = c.row_mut(i);
        for k in 0..kk {
            let aik = a.at(i, k).neg();
            if instr.trace {
                axpy_row::<E, true>(crow, aik, b.row(k), instr);
            } else {
                axpy_row::<E, false>(crow, aik, b.row(k), instr);
            }
        }
    }
    instr.ops.mults += (m * kk * n) as u64;
    instr.ops.adds += (m * kk * n) as u64;
}

/// `dst = x ± y` elementwise.
fn mat_sum<E: Element>(
    mut dst: MatMut<E>,
    x: MatRef<E>,
    y: MatRef<E>,
    subtract: bool,
    instr: &mut Instr,
) {
    let (m, n) = (dst.rows(), dst.cols());
    for i in 0..m {
        let d = dst.row_mut(i);
        let xr = x.row(i);
        let yr = y.row(i);
        for j in 0..n {
            d[j] = if subtract {
                xr[j].sub(yr[j])
            } else {
                xr[j].add(yr[j])
            };
            if instr.trace {
                instr.observe(d[j].abs_u128());
            }
        }
    }
    instr.ops.adds += (m * n) as u64;
}

/// `dst = dst ± y` or `dst = y - dst` elementwise.
fn mat_sum_assign<E: Element>(
    mut dst: MatMut<E>,
    y: MatRef<E>,
    subtract: bool,
    reversed: bool,
    instr: &mut Instr,
) {
    let (m, n) = (dst.rows(), dst.cols());
    for i in 0..m {
        let d = dst.row_mut(i);
        let yr = y.row(i);
        for j in 0..n {
            d[j] = match (subtract, reversed) {
                (false, _) => d[j].add(yr[j]),
                (true, false) => d[j].sub(yr[j]),
                (true, true) => yr[j].sub(d[j]),
            };
            if instr.trace {
                instr.observe(d[j].abs_u128());
            }
        }
    }
    instr.ops.adds += (m * n) as u64;
}

/// `dst = x + β·dst`; β = 0 is a copy, β = ±1 a pure add/subtract.
fn mat_axpby<E: Element>(mut dst: MatMut<E>, x: MatRef<E>, beta: E, instr: &mut Instr) {
    let (m, n) = (dst.rows(), dst.cols());
    if beta.is_zero() {
        for i in 0..m {
            dst.row_mut(i).copy_from_slice(x.row(i));
        }
        return;
    }
    let neg_one = E::one().neg();
    for i in 0..m {
        let d = dst.row_mut(i);
        let xr = x.row(i);
        for j in 0..n {
            d[j] = if beta == E::one() {
                xr[j].add(d[j])
            } else if beta == neg_one {
                xr[j].sub(d[j])
            } else {
                xr[j].add(beta.mul(d[j]))
            };
            if instr.trace {
                instr.observe(d[j].abs_u128());
            }
        }
    }
    if beta != E::one() && beta != neg_one {
        instr.ops.mults += (m * n) as u64;
    }
    instr.ops.adds += (m * n) as u64;
}

fn mat_add_assign<E: Element>(mut dst: MatMut<E>, x: MatRef<E>, instr: &mut Instr) {
    let (m, n) = (dst.rows(), dst.cols());
    for i in 0..m {
        let d = dst.row_mut(i);
        let xr = x.row(i);
        for j in 0..n {
            d[j] = d[j].add(xr[j]);
            if instr.trace {
                instr.observe(d[j].abs_u128());
            }
        }
    }
    instr.ops.adds += (m * n) as u64;
}

/// `dst = x - dst` elementwise.
fn mat_rsub_assign<E: Element>(mut dst: MatMut<E>, x: MatRef<E>, instr: &mut Instr) {
    let (m, n) = (dst.rows(), dst.cols());
    for i in 0..m {
        let d = dst.row_mut(i);
        let xr = x.row(i);
        for j in 0..n {
            d[j] = xr[j].sub(d[j]);
            if instr.trace {
                instr.observe(d[j].abs_u128());
            }
        }
    }
    instr.ops.adds += (m * n) as u64;
}


#[cfg(test)]
mod chunking_tests {
    use super::*;
    use crate::field::Repr;
    use crate::oracle::{naive_fgemm, random_matrix};
    use crate::rng::Rng64;

    // γ = 12 keeps λ tiny so the classical kernel actually crosses its
    // accumulation budget mid-product.
    #[test]
    fn classical_chunked_reduction_boundary() {
        let f = PrimeField::new(31, Repr::Positive, 12).unwrap();
        let lam = f.lambda();
        assert_eq!(lam, 4);
        let mut rng = Rng64::new(0x1234);
        for extra in 0..4usize {
            let k = (2 * lam + 1) as usize + extra;
            let a: Matrix<f64> = random_matrix(5, k, f, &mut rng);
            let b: Matrix<f64> = random_matrix(k, 3, f, &mut rng);
            let c: Matrix<f64> = random_matrix(5, 3, f, &mut rng);
            for beta in [0.0f64, 1.0, 17.0] {
                let mut out = c.clone();
                let mut instr = Instr::traced();
                fgemm_mat(1.0, &a, &b, beta, &mut out, &MulConfig::classical(), &mut instr)
                    .unwrap();
                assert_eq!(out, naive_fgemm(1.0, &a, &b, beta, &c), "k={k} beta={beta}");
                assert!(instr.max_abs < 1 << 12, "budget exceeded: {}", instr.max_abs);
                assert!(instr.ops.reductions > 0);
            }
        }
    }

    // λ = 1: every product must be reduced before it joins the sum.
    #[test]
    fn eager_path_when_budget_is_one() {
        let f = PrimeField::new(61, Repr::Positive, 12).unwrap();
        assert_eq!(f.lambda(), 1);
        let mut rng = Rng64::new(0x4321);
        let a: Matrix<i64> = random_matrix(6, 9, f, &mut rng);
        let b: Matrix<i64> = random_matrix(9, 4, f, &mut rng);
        let c: Matrix<i64> = random_matrix(6, 4, f, &mut rng);
        let mut out = c.clone();
        let mut instr = Instr::traced();
        fgemm_mat(1, &a, &b, 1, &mut out, &MulConfig::classical(), &mut instr).unwrap();
        assert_eq!(out, naive_fgemm(1, &a, &b, 1, &c));
        assert!(instr.max_abs < 1 << 12);
    }
}
