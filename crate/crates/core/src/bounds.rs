//! Overflow thresholds, operation-count formulas and worst-case witnesses.
//!
//! Everything here is computed in exact big-integer arithmetic: several of
//! the bounds (notably the fully delayed triangular solve) involve p^(n-1),
//! far beyond any backend word.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{dot_lambda, Repr};

pub use crate::field::dot_lambda as lambda_for;

/// Tallies of field operations. Reductions and divisions are tracked apart
/// from the multiply/add counts that the complexity constants are stated in.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub mults: u64,
    pub adds: u64,
    pub reductions: u64,
    pub divisions: u64,
}

impl OpCounter {
    pub fn muladds(&self) -> u64 {
        self.mults + self.adds
    }

    pub fn merge(&mut self, other: &OpCounter) {
        self.mults += other.mults;
        self.adds += other.adds;
        self.reductions += other.reductions;
        self.divisions += other.divisions;
    }
}

/// Instrumentation context threaded through the kernels: always counts
/// operations (in bulk, off the hot paths), optionally records the largest
/// absolute intermediate value seen.
#[derive(Clone, Debug, Default)]
pub struct Instr {
    pub ops: OpCounter,
    pub trace: bool,
    pub max_abs: u128,
}

impl Instr {
    pub fn new() -> Instr {
        Instr::default()
    }

    pub fn traced() -> Instr {
        Instr {
            trace: true,
            ..Instr::default()
        }
    }

    #[inline(always)]
    pub fn observe(&mut self, v: u128) {
        if v > self.max_abs {
            self.max_abs = v;
        }
    }
}

/// Cascade control parameters for a given (p, γ, representation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thresholds {
    pub lambda: u64,
    pub t_del: usize,
    pub t_update: usize,
    pub t_split: usize,
}

/// `⌊log2(n/w)⌋ + 1` recursive levels when n ≥ w, else 0.
pub fn winograd_levels(n: usize, w: usize) -> u32 {
    assert!(n >= 1 && w >= 1);
    let mut l = 0u32;
    let mut t = n;
    while t >= w {
        l += 1;
        t /= 2;
    }
    l
}

/// Arithmetic operations of the hybrid multiplication of two n×n matrices
/// with l recursive levels: W(n,0) = 2n³-n², W(n,l) = 7·W(n/2,l-1) + 15(n/2)².
pub fn winograd_opcount(n: u64, l: u32) -> u64 {
    assert!(
        n % (1u64 << l) == 0,
        "2^{l} must divide n = {n} for the closed-form count"
    );
    if l == 0 {
        return 2 * n * n * n - n * n;
    }
    let h = n / 2;
    7 * winograd_opcount(h, l - 1) + 15 * h * h
}

fn t_coeff(l: u32) -> BigInt {
    (BigInt::one() + BigInt::from(3u32).pow(l)) / 2
}

fn s_coeff(l: u32) -> BigInt {
    (BigInt::one() - BigInt::from(3u32).pow(l)) / 2
}

/// Element ranges for the two multiplication operands (and the accumulated
/// summand): `m_X ≤ x ≤ M_X` with `0 ≤ -m_X ≤ M_X`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct OperandBounds {
    pub min_a: i64,
    pub max_a: i64,
    pub min_b: i64,
    pub max_b: i64,
}

impl OperandBounds {
    pub fn new(min_a: i64, max_a: i64, min_b: i64, max_b: i64) -> OperandBounds {
        let b = OperandBounds {
            min_a,
            max_a,
            min_b,
            max_b,
        };
        b.validate();
        b
    }

    pub fn validate(&self) {
        assert!(
            0 <= -self.min_a && -self.min_a <= self.max_a,
            "operand bounds must satisfy 0 ≤ -min ≤ max"
        );
        assert!(0 <= -self.min_b && -self.min_b <= self.max_b);
    }

    /// Canonical ranges of a field: `[0, p-1]` or `[±(p-1)/2]`.
    pub fn for_field(p: u64, repr: Repr) -> OperandBounds {
        let (lo, hi) = match repr {
            Repr::Positive => (0i64, (p - 1) as i64),
            Repr::Balanced => (-(((p - 1) / 2) as i64), ((p - 1) / 2) as i64),
        };
        OperandBounds::new(lo, hi, lo, hi)
    }
}

/// Largest value any intermediate can reach in an l-level run:
/// `(t_l·M_A + s_l·m_A)·(t_l·M_B + s_l·m_B)·⌊k/2^l⌋` with t/s = (1±3^l)/2.
pub fn winograd_bound(l: u32, b: &OperandBounds, k: u64) -> BigInt {
    assert!(l >= 1);
    b.validate();
    let va = t_coeff(l) * b.max_a + s_coeff(l) * b.min_a;
    let vb = t_coeff(l) * b.max_b + s_coeff(l) * b.min_b;
    va * vb * BigInt::from(k >> l)
}

/// Largest common dimension k admitting l unreduced recursive levels on a
/// γ-bit backend. The growth bound is
/// `((1+3^l)/2·(p-1))²·⌊k/2^l⌋` for the positive representation (3^l in
/// place of 1+3^l balanced), so the base accumulation count
/// `⌊k/2^l⌋` may reach at most the largest Q with `Q·D < 2^(γ+2)` where
/// `D = ((1+3^l)(p-1))²`; the answer is `(Q+1)·2^l - 1`. Evaluating the
/// quotient before flooring (rather than the textbook `(2^(γ+2)/D+1)·2^l`
/// reading) keeps the guarantee exact: one extra column in the final
/// stretch would already push the bound past 2^γ. Errors when no k ≥ 2^l
/// is admissible.
pub fn k_winograd(p: u64, gamma: u32, l: u32, repr: Repr) -> Result<u64> {
    assert!(l >= 1, "at least one recursive level");
    let growth = match repr {
        Repr::Positive => BigInt::one() + BigInt::from(3u32).pow(l),
        Repr::Balanced => BigInt::from(3u32).pow(l),
    };
    let denom: BigInt = (growth * (p - 1)).pow(2);
    let cap = BigInt::from(2u8).pow(gamma + 2);
    // largest Q with Q·denom < 2^(γ+2)
    let q = (&cap + &denom - BigInt::one()) / &denom - BigInt::one();
    if q < BigInt::one() {
        return Err(Error::LevelTooDeep {
            requested: l,
            admissible: 0,
        });
    }
    let k = (q + 1u8) * BigInt::from(2u8).pow(l) - 1u8;
    Ok(k.try_into().unwrap_or(u64::MAX))
}

/// Largest system dimension solvable entirely without reductions:
/// `(p-1)/2·(p^(n-1) + (p-1)^(n-1)) < 2^γ` (positive) or
/// `(p-1)/2·((p+1)/2)^n < 2^γ` (balanced). At least 1.
pub fn t_del(p: u64, gamma: u32, repr: Repr) -> usize {
    assert!(p >= 2);
    assert!(repr == Repr::Positive || p >= 3, "balanced needs odd p");
    // both sides doubled so (p-1)/2 stays integral for p = 2
    let cap2 = BigInt::from(2u8).pow(gamma + 1);
    let mut n = 1usize;
    loop {
        let next = n + 1;
        let lhs: BigInt = match repr {
            Repr::Positive => {
                BigInt::from(p - 1)
                    * (BigInt::from(p).pow(next as u32 - 1)
                        + BigInt::from(p - 1).pow(next as u32 - 1))
            }
            Repr::Balanced => BigInt::from(p - 1) * BigInt::from((p + 1) / 2).pow(next as u32),
        };
        if lhs < cap2 {
            n = next;
        } else {
            return n;
        }
    }
}

/// Closed-form growth bound for a unit triangular solve with entries in
/// `[m, M]`: `(M-m)/2·(M+1)^(n-1) + (M+m)/2·(M-1)^(n-1)`. Exactly attained
/// when the range is symmetric (m = -M); a strict over-estimate for
/// asymmetric ranges once n ≥ 4 (see `trsm_witness_profile` for the sharp
/// per-position values).
pub fn trsm_solution_bound(n: usize, m: i64, max: i64) -> BigInt {
    assert!(n >= 1 && m <= 0 && max >= 1);
    let (mm, mx) = (BigInt::from(m), BigInt::from(max));
    let a = (&mx - &mm) * (&mx + 1u8).pow(n as u32 - 1);
    let b = (&mx + &mm) * (&mx - 1u8).pow(n as u32 - 1);
    (a + b) / 2u8
}

/// Exact per-position solution magnitudes of the worst-case system built
/// by `trsm_witness`: entry k is |x| at distance k from the bottom. The
/// signs alternate, so
/// `w_(k+1) = M·Σ w_(same parity as k) - m·Σ w_(other parity) + c`,
/// with c = -m after an even step and M after an odd one. No system over
/// `[m, M]` exceeds this profile position-wise.
pub fn trsm_witness_profile(n: usize, m: i64, max: i64) -> Vec<BigInt> {
    assert!(n >= 1 && m <= 0 && max >= 1);
    let (mm, mx) = (BigInt::from(m), BigInt::from(max));
    let mut w = vec![BigInt::from(max)];
    let mut even_sum = BigInt::from(max); // Σ w_j over j ≡ 0 (mod 2)
    let mut odd_sum = BigInt::zero();
    for k in 0..n - 1 {
        let (same, other) = if k % 2 == 0 {
            (&even_sum, &odd_sum)
        } else {
            (&odd_sum, &even_sum)
        };
        let c = if k % 2 == 0 { -&mm } else { mx.clone() };
        let next = &mx * same - &mm * other + c;
        if (k + 1) % 2 == 0 {
            even_sum += &next;
        } else {
            odd_sum += &next;
        }
        w.push(next);
    }
    w
}

/// All cascade thresholds for (p, γ, repr). `t_update` is the l = 1
/// unreduced-accumulation bound; `t_split = ⌊t_update/t_del⌋·t_del`, falling
/// back to `t_del` when the update bound is the smaller of the two.
pub fn thresholds(p: u64, gamma: u32, repr: Repr) -> Result<Thresholds> {
    let lambda = dot_lambda(p, gamma, repr)?;
    let td = t_del(p, gamma, repr);
    let tu = k_winograd(p, gamma, 1, repr)? as usize;
    let ts = if tu >= td { (tu / td) * td } else { td };
    Ok(Thresholds {
        lambda,
        t_del: td,
        t_update: tu,
        t_split: ts,
    })
}

/// Worst-case multiplication operands of order 2^l: l recursive levels on
/// this pair drive some intermediate value exactly to `winograd_bound`.
/// Built by the doubling recursion from the 2×2 seeds, where the complement
/// of X is taken entrywise as `max + min - x`.
pub fn mm_witness(l: u32, b: &OperandBounds) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    assert!(l >= 1);
    b.validate();
    let mut a = vec![vec![b.min_a, 0], vec![b.max_a, b.max_a]];
    let mut bb = vec![vec![b.max_b, b.min_b], vec![0, b.max_b]];
    for _ in 1..l {
        a = double_witness(&a, b.min_a, b.max_a, true);
        bb = double_witness(&bb, b.min_b, b.max_b, false);
    }
    (a, bb)
}

fn double_witness(x: &[Vec<i64>], min: i64, max: i64, left_operand: bool) -> Vec<Vec<i64>> {
    let n = x.len();
    let comp: Vec<Vec<i64>> = x
        .iter()
        .map(|r| r.iter().map(|&v| max + min - v).collect())
        .collect();
    let mut out = vec![vec![0i64; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            if left_operand {
                // [[X̄, 0], [X, X]]
                out[i][j] = comp[i][j];
                out[n + i][j] = x[i][j];
                out[n + i][n + j] = x[i][j];
            } else {
                // [[X, X̄], [0, X]]
                out[i][j] = x[i][j];
                out[i][n + j] = comp[i][j];
                out[n + i][n + j] = x[i][j];
            }
        }
    }
    out
}

/// Worst-case unit upper triangular system of order n: rows carry the
/// repeating pattern max, min, max, … to the right of the diagonal and the
/// right-hand side reads max, min, … from the bottom up. Exact
/// back-substitution reaches `trsm_solution_profile` at every position.
pub fn trsm_witness(n: usize, min: i64, max: i64) -> (Vec<Vec<i64>>, Vec<i64>) {
    assert!(min <= 0 && 0 <= max);
    let mut t = vec![vec![0i64; n]; n];
    let mut b = vec![0i64; n];
    for i in 0..n {
        t[i][i] = 1;
        for j in (i + 1)..n {
            t[i][j] = if (j - i) % 2 == 1 { max } else { min };
        }
        b[i] = if (n - 1 - i) % 2 == 0 { max } else { min };
    }
    (t, b)
}

/// The coupled series `u_{j+1} = 2u_j - v_j`, `v_{j+1} = 2v_j - u_j` that
/// drives the operand growth analysis.
#[derive(Clone, Debug)]
pub struct BoundSeries {
    pub u: Vec<BigInt>,
    pub v: Vec<BigInt>,
}

impl BoundSeries {
    pub fn new(u0: i64, v0: i64, terms: usize) -> BoundSeries {
        assert!(u0 <= 0 && v0 >= 0);
        let mut u = vec![BigInt::from(u0)];
        let mut v = vec![BigInt::from(v0)];
        for j in 0..terms {
            let nu = 2 * &u[j] - &v[j];
            let nv = 2 * &v[j] - &u[j];
            u.push(nu);
            v.push(nv);
        }
        BoundSeries { u, v }
    }
}

pub fn t_j(j: u32) -> BigInt {
    t_coeff(j)
}

pub fn s_j(j: u32) -> BigInt {
    s_coeff(j)
}
