//! Word-size prime field arithmetic in positive and balanced representations.
//!
//! Elements are exact integers in a backend of bit capacity γ. The canonical
//! range is `[0, p-1]` (positive) or `[-(p-1)/2, (p-1)/2]` (balanced).
//! Vector kernels accumulate over the integers and reduce only every λ
//! products, where λ is the largest count such that the running sum provably
//! stays below 2^γ.

use crate::element::Element;
use crate::error::{Error, Result};

/// Canonical residue representation.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Repr {
    /// Residues in `[0, p-1]`.
    Positive,
    /// Residues in `[-(p-1)/2, (p-1)/2]`; requires odd p.
    Balanced,
}

impl Repr {
    pub fn name(self) -> &'static str {
        match self {
            Repr::Positive => "positive",
            Repr::Balanced => "balanced",
        }
    }
}

impl std::str::FromStr for Repr {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "positive" => Ok(Repr::Positive),
            "balanced" => Ok(Repr::Balanced),
            other => Err(format!("unknown representation {other:?}")),
        }
    }
}

/// Trial division up to √p.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Largest λ with `λ(p-1)² < 2^γ` (positive) or `λ((p-1)/2)² < 2^(γ-1)`
/// (balanced). Errors when no λ ≥ 1 exists, i.e. the field does not fit.
pub fn dot_lambda(p: u64, gamma: u32, repr: Repr) -> Result<u64> {
    assert!(gamma >= 1 && gamma <= 63, "gamma out of range");
    let (sq, cap) = match repr {
        Repr::Positive => ((p - 1) as u128 * (p - 1) as u128, 1u128 << gamma),
        Repr::Balanced => {
            let h = ((p - 1) / 2) as u128;
            (h * h, 1u128 << (gamma - 1))
        }
    };
    if sq == 0 {
        // p = 2 balanced is rejected earlier; p = 2 positive gives sq = 1.
        return Err(Error::NoValidLambda { p, gamma });
    }
    let lambda = (cap + sq - 1) / sq - 1; // largest λ with λ·sq < cap
    if lambda == 0 {
        return Err(Error::NoValidLambda { p, gamma });
    }
    Ok(lambda.min(u64::MAX as u128) as u64)
}

/// The arithmetic context: characteristic, representation and backend
/// capacity. Immutable and freely shared.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    repr: Repr,
    gamma: u32,
    lambda: u64,
}

impl PrimeField {
    /// Builds a field, validating primality (trial division), the
    /// representation (balanced needs odd p) and that a single product
    /// fits the backend: `(p-1)² < 2^γ`.
    pub fn new(p: u64, repr: Repr, gamma: u32) -> Result<PrimeField> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 && repr == Repr::Balanced {
            return Err(Error::BalancedEven);
        }
        if gamma < 2 || gamma > 63 {
            return Err(Error::PrimeTooLarge { p, gamma });
        }
        let sq = (p - 1) as u128 * (p - 1) as u128;
        if sq >= 1u128 << gamma {
            return Err(Error::PrimeTooLarge { p, gamma });
        }
        let lambda = dot_lambda(p, gamma, repr)?;
        Ok(PrimeField {
            p,
            repr,
            gamma,
            lambda,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn repr(&self) -> Repr {
        self.repr
    }
    pub fn gamma(&self) -> u32 {
        self.gamma
    }
    /// Accumulation budget between reductions.
    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn p_as<E: Element>(&self) -> E {
        E::from_i64(self.p as i64)
    }

    /// Smallest canonical representative (0 or -(p-1)/2).
    pub fn min_elem(&self) -> i64 {
        match self.repr {
            Repr::Positive => 0,
            Repr::Balanced => -(((self.p - 1) / 2) as i64),
        }
    }

    /// Largest canonical representative (p-1 or (p-1)/2).
    pub fn max_elem(&self) -> i64 {
        match self.repr {
            Repr::Positive => (self.p - 1) as i64,
            Repr::Balanced => ((self.p - 1) / 2) as i64,
        }
    }

    /// Reduces any backend value (|v| < 2^γ) into the canonical range.
    #[inline]
    pub fn reduce<E: Element>(&self, v: E) -> E {
        let p = self.p_as::<E>();
        let mut r = v.rem_trunc(p);
        match self.repr {
            Repr::Positive => {
                if r < E::zero() {
                    r = r.add(p);
                }
            }
            Repr::Balanced => {
                let half = E::from_i64(((self.p - 1) / 2) as i64);
                if r > half {
                    r = r.sub(p);
                } else if r < half.neg() {
                    r = r.add(p);
                }
            }
        }
        r
    }

    #[inline]
    pub fn is_canonical<E: Element>(&self, v: E) -> bool {
        let x = v.to_i64();
        x >= self.min_elem() && x <= self.max_elem()
    }

    /// Canonical addition.
    #[inline]
    pub fn add<E: Element>(&self, a: E, b: E) -> E {
        self.reduce(a.add(b))
    }

    #[inline]
    pub fn sub<E: Element>(&self, a: E, b: E) -> E {
        self.reduce(a.sub(b))
    }

    /// Canonical product; a single product never overflows by construction.
    #[inline]
    pub fn mul<E: Element>(&self, a: E, b: E) -> E {
        self.reduce(a.mul(b))
    }

    #[inline]
    pub fn neg<E: Element>(&self, a: E) -> E {
        self.reduce(a.neg())
    }

    /// Multiplicative inverse via the extended gcd.
    pub fn inv<E: Element>(&self, a: E) -> Result<E> {
        let a = a.to_i64();
        let p = self.p as i64;
        let mut r = a.rem_euclid(p);
        if r == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut old_r, mut old_s, mut s) = (p, 0i64, 1i64);
        while r != 0 {
            let q = old_r / r;
            let tmp_r = old_r - q * r;
            old_r = r;
            r = tmp_r;
            let tmp_s = old_s - q * s;
            old_s = s;
            s = tmp_s;
        }
        debug_assert_eq!(old_r, 1, "gcd with a prime must be 1");
        Ok(self.reduce(E::from_i64(old_s)))
    }

    /// Uniform canonical element from a deterministic generator.
    #[inline]
    pub fn random_elem<E: Element>(&self, rng: &mut crate::rng::Rng64) -> E {
        let v = rng.below(self.p) as i64;
        self.reduce(E::from_i64(v))
    }
}

/// Dot product with reductions deferred: one reduction after every `lambda`
/// accumulated products and one at the end. `lambda` must not exceed the
/// field's own budget.
pub fn dot_delayed<E: Element>(f: &PrimeField, x: &[E], y: &[E], lambda: u64) -> E {
    assert_eq!(x.len(), y.len(), "dot product length mismatch");
    assert!(lambda >= 1 && lambda <= f.lambda(), "lambda out of budget");
    if lambda == 1 {
        // no room to stack a raw product on the canonical running value
        let mut acc = E::zero();
        for (&a, &b) in x.iter().zip(y.iter()) {
            acc = f.reduce(acc.add(f.reduce(a.mul(b))));
        }
        return acc;
    }
    let mut acc = E::zero();
    let mut used = 0u64;
    for (&a, &b) in x.iter().zip(y.iter()) {
        if used == lambda {
            acc = f.reduce(acc);
            used = 1; // the reduced value re-enters the running sum
        }
        acc = acc.add(a.mul(b));
        used += 1;
    }
    f.reduce(acc)
}

/// `y[i] += a·x[i]` over the integers, one product per element. `used`
/// tracks how many products each accumulator already holds; the vector is
/// reduced when the budget is exhausted. With `a = 0` nothing changes,
/// including the counter.
pub fn axpy_delayed<E: Element>(f: &PrimeField, a: E, x: &[E], y: &mut [E], used: &mut u64) {
    assert_eq!(x.len(), y.len(), "axpy length mismatch");
    assert!(*used <= f.lambda(), "accumulation budget already violated");
    if a.is_zero() {
        return;
    }
    if f.lambda() == 1 {
        // no room to stack a raw product on a canonical value
        for (v, &xi) in y.iter_mut().zip(x.iter()) {
            *v = f.reduce(f.reduce(*v).add(f.reduce(a.mul(xi))));
        }
        *used = 0;
        return;
    }
    if *used >= f.lambda() - 1 {
        for v in y.iter_mut() {
            *v = f.reduce(*v);
        }
        *used = 1;
    }
    for (v, &xi) in y.iter_mut().zip(x.iter()) {
        *v = v.add(a.mul(xi));
    }
    *used += 1;
}


#[cfg(test)]
mod budget_tests {
    use super::*;

    #[test]
    #[should_panic(expected = "budget already violated")]
    fn axpy_asserts_budget_tracking() {
        let f = PrimeField::new(7, Repr::Positive, 53).unwrap();
        let x = [1.0, 2.0];
        let mut y = [0.0, 0.0];
        let mut used = f.lambda() + 1; // caller lied about the state
        axpy_delayed(&f, 1.0, &x, &mut y, &mut used);
    }
}
