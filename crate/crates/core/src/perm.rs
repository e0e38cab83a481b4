//! Permutations stored as image arrays.
//!
//! A `Permutation` is an array σ of n distinct indices. Applied "forward"
//! to rows it scatters: new row σ(i) is old row i. Applied "inverse" it
//! gathers: new row i is old row σ(i). As a matrix, `as_matrix(σ)` has a 1
//! at (σ(j), j), so `as_matrix(σ) · M` equals the forward row application.

use crate::element::Element;
use crate::field::PrimeField;
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    image: Vec<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation {
            image: (0..n).collect(),
        }
    }

    /// Builds from an image array; panics unless it is a bijection.
    pub fn from_image(image: Vec<usize>) -> Permutation {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            assert!(v < n && !seen[v], "image array is not a bijection");
            seen[v] = true;
        }
        Permutation { image }
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Permutation {
        let mut image: Vec<usize> = (0..n).collect();
        image.swap(i, j);
        Permutation { image }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0usize; self.image.len()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { image: inv }
    }

    /// Composition acting as functions: `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation {
            image: other.image.iter().map(|&i| self.image[i]).collect(),
        }
    }

    /// +1 for even, -1 for odd, via cycle decomposition.
    pub fn sign(&self) -> i32 {
        let n = self.image.len();
        let mut seen = vec![false; n];
        let mut sign = 1i32;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0usize;
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cur = self.image[cur];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }

    /// Dense 0/1 matrix P with `P[σ(j)][j] = 1`.
    pub fn as_matrix<E: Element>(&self, field: PrimeField) -> Matrix<E> {
        let n = self.len();
        let mut m = Matrix::zeros(n, n, field);
        for j in 0..n {
            m.set(self.image[j], j, E::one());
        }
        m
    }
}

/// Rearranges a slice of row indices (or any bookkeeping array) in lockstep
/// with a row/column permutation.
pub fn permute_slice<T: Copy>(v: &mut [T], p: &Permutation, dir: Direction) {
    assert_eq!(v.len(), p.len());
    let old: Vec<T> = v.to_vec();
    match dir {
        Direction::Forward => {
            for (i, &val) in old.iter().enumerate() {
                v[p.apply(i)] = val;
            }
        }
        Direction::Inverse => {
            for i in 0..v.len() {
                v[i] = old[p.apply(i)];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng64;

    fn random_perm(n: usize, rng: &mut Rng64) -> Permutation {
        let mut image: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.below((i + 1) as u64) as usize;
            image.swap(i, j);
        }
        Permutation::from_image(image)
    }

    #[test]
    fn inverse_law() {
        let mut rng = Rng64::new(1);
        for _ in 0..50 {
            let p = random_perm(12, &mut rng);
            assert!(p.compose(&p.inverse()).is_identity());
            assert!(p.inverse().compose(&p).is_identity());
        }
    }

    #[test]
    fn sign_multiplicative() {
        let mut rng = Rng64::new(2);
        for _ in 0..100 {
            let p = random_perm(9, &mut rng);
            let q = random_perm(9, &mut rng);
            assert_eq!(p.compose(&q).sign(), p.sign() * q.sign());
        }
        assert_eq!(Permutation::identity(5).sign(), 1);
        assert_eq!(Permutation::transposition(5, 1, 3).sign(), -1);
    }

    #[test]
    fn compose_associative_on_points() {
        let mut rng = Rng64::new(3);
        for _ in 0..50 {
            let p = random_perm(8, &mut rng);
            let q = random_perm(8, &mut rng);
            let r = random_perm(8, &mut rng);
            let a = p.compose(&q).compose(&r);
            let b = p.compose(&q.compose(&r));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn permute_slice_roundtrip() {
        let mut rng = Rng64::new(4);
        let p = random_perm(10, &mut rng);
        let orig: Vec<usize> = (100..110).collect();
        let mut v = orig.clone();
        permute_slice(&mut v, &p, Direction::Forward);
        permute_slice(&mut v, &p, Direction::Inverse);
        assert_eq!(v, orig);
    }
}
