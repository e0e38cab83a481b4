//! Dense row-major matrices with strided, zero-copy submatrix views.
//!
//! `Matrix` owns its storage. `MatRef`/`MatMut` are lightweight windows
//! (pointer, dims, stride) used by every block-recursive algorithm; splits
//! of a mutable view yield disjoint mutable windows, so recursions borrow
//! quadrants without copying.

use std::fmt::Write as _;
use std::marker::PhantomData;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::field::{PrimeField, Repr};
use crate::perm::{Direction, Permutation};
use crate::rng::Rng64;

#[derive(Clone, Debug)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<E>,
    field: PrimeField,
}

impl<E: Element> Matrix<E> {
    pub fn zeros(rows: usize, cols: usize, field: PrimeField) -> Matrix<E> {
        assert!(
            field.gamma() <= E::NATIVE_GAMMA,
            "field capacity γ={} exceeds backend {}",
            field.gamma(),
            E::NAME
        );
        Matrix {
            rows,
            cols,
            stride: cols,
            data: vec![E::zero(); rows * cols],
            field,
        }
    }

    pub fn identity(n: usize, field: PrimeField) -> Matrix<E> {
        let mut m = Matrix::zeros(n, n, field);
        for i in 0..n {
            m.set(i, i, E::one());
        }
        m
    }

    /// Builds from integer rows, reducing every entry into the canonical range.
    pub fn from_rows(rows: &[Vec<i64>], field: PrimeField) -> Matrix<E> {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        let mut m = Matrix::zeros(r, c, field);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, field.reduce(E::from_i64(v)));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn stride(&self) -> usize {
        self.stride
    }
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> E {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.data[i * self.stride + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: E) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.data[i * self.stride + j] = v;
    }

    pub fn as_ref(&self) -> MatRef<'_, E> {
        MatRef {
            ptr: self.data.as_ptr(),
            rows: self.rows,
            cols: self.cols,
            stride: self.stride,
            _marker: PhantomData,
        }
    }

    pub fn as_mut(&mut self) -> MatMut<'_, E> {
        MatMut {
            ptr: self.data.as_mut_ptr(),
            rows: self.rows,
            cols: self.cols,
            stride: self.stride,
            _marker: PhantomData,
        }
    }

    /// Aliasing read view of a window; panics when out of bounds.
    pub fn view(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> MatRef<'_, E> {
        self.as_ref().submatrix(r0, c0, nr, nc)
    }

    /// Aliasing mutable window; mutation through it is visible in `self`.
    pub fn view_mut(&mut self, r0: usize, c0: usize, nr: usize, nc: usize) -> MatMut<'_, E> {
        self.as_mut().submatrix_mut(r0, c0, nr, nc)
    }

    pub fn transpose(&self) -> Matrix<E> {
        let mut t = Matrix::zeros(self.cols, self.rows, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_canonical(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| self.field.is_canonical(self.get(i, j))))
    }

    pub fn canonicalize(&mut self) {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                self.set(i, j, self.field.reduce(v));
            }
        }
    }

    pub fn fill_random(&mut self, rng: &mut Rng64) {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.field.random_elem(rng);
                self.set(i, j, v);
            }
        }
    }

    /// In-place row or column rearrangement by σ (forward) or σ⁻¹.
    pub fn permute(&mut self, p: &Permutation, side: Side, dir: Direction) {
        match side {
            Side::Rows => {
                assert_eq!(p.len(), self.rows, "permutation size mismatch");
                let old = self.clone();
                for i in 0..self.rows {
                    let src = match dir {
                        Direction::Forward => i,
                        Direction::Inverse => p.apply(i),
                    };
                    let dst = match dir {
                        Direction::Forward => p.apply(i),
                        Direction::Inverse => i,
                    };
                    for j in 0..self.cols {
                        self.set(dst, j, old.get(src, j));
                    }
                }
            }
            Side::Cols => {
                assert_eq!(p.len(), self.cols, "permutation size mismatch");
                let old = self.clone();
                for j in 0..self.cols {
                    let (src, dst) = match dir {
                        Direction::Forward => (j, p.apply(j)),
                        Direction::Inverse => (p.apply(j), j),
                    };
                    for i in 0..self.rows {
                        self.set(i, dst, old.get(i, src));
                    }
                }
            }
        }
    }

    /// Emits the text form: header `rows cols p`, then one line per row.
    /// Entries are written as positive representatives regardless of the
    /// in-memory representation, so files are portable across backends.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let p = self.field.p() as i64;
        writeln!(out, "{} {} {}", self.rows, self.cols, self.field.p()).unwrap();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    out.push(' ');
                }
                let v = self.get(i, j).to_i64().rem_euclid(p);
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text form. The header supplies p; representation and γ
    /// come from the caller. Out-of-range entries are reduced on load.
    pub fn from_text(text: &str, repr: Repr, gamma: u32) -> Result<Matrix<E>> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::BadHeader(String::new()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::BadHeader(header.to_string()));
        }
        let rows: usize = parts[0]
            .parse()
            .map_err(|_| Error::BadHeader(header.to_string()))?;
        let cols: usize = parts[1]
            .parse()
            .map_err(|_| Error::BadHeader(header.to_string()))?;
        let p: u64 = parts[2]
            .parse()
            .map_err(|_| Error::BadHeader(header.to_string()))?;
        if rows == 0 || cols == 0 {
            return Err(Error::BadHeader(header.to_string()));
        }
        let field = PrimeField::new(p, repr, gamma)?;
        let mut entries: Vec<i64> = Vec::with_capacity(rows * cols);
        for line in lines {
            for tok in line.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| Error::BadNumber(tok.to_string()))?;
                entries.push(v);
            }
        }
        if entries.len() != rows * cols {
            return Err(Error::WrongEntryCount {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        let mut m = Matrix::zeros(rows, cols, field);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, field.reduce(E::from_i64(entries[i * cols + j])));
            }
        }
        Ok(m)
    }
}

impl<E: Element> PartialEq for Matrix<E> {
    fn eq(&self, other: &Self) -> bool {
        if self.rows != other.rows || self.cols != other.cols || self.field != other.field {
            return false;
        }
        (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == other.get(i, j)))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Side {
    Rows,
    Cols,
}

/// Immutable strided window.
pub struct MatRef<'a, E> {
    ptr: *const E,
    rows: usize,
    cols: usize,
    stride: usize,
    _marker: PhantomData<&'a [E]>,
}

impl<E> Copy for MatRef<'_, E> {}
impl<E> Clone for MatRef<'_, E> {
    fn clone(&self) -> Self {
        *self
    }
}
unsafe impl<E: Sync> Sync for MatRef<'_, E> {}
unsafe impl<E: Sync> Send for MatRef<'_, E> {}

impl<'a, E: Element> MatRef<'a, E> {
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline(always)]
    pub fn at(&self, i: usize, j: usize) -> E {
        debug_assert!(i < self.rows && j < self.cols);
        unsafe { *self.ptr.add(i * self.stride + j) }
    }

    /// Row `i` as a contiguous slice of length `cols`.
    #[inline(always)]
    pub fn row(&self, i: usize) -> &'a [E] {
        debug_assert!(i < self.rows);
        unsafe { std::slice::from_raw_parts(self.ptr.add(i * self.stride), self.cols) }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> MatRef<'a, E> {
        assert!(
            r0 + nr <= self.rows && c0 + nc <= self.cols,
            "window out of bounds"
        );
        MatRef {
            ptr: unsafe { self.ptr.add(r0 * self.stride + c0) },
            rows: nr,
            cols: nc,
            stride: self.stride,
            _marker: PhantomData,
        }
    }

    pub fn split_rows(&self, r: usize) -> (MatRef<'a, E>, MatRef<'a, E>) {
        (
            self.submatrix(0, 0, r, self.cols),
            self.submatrix(r, 0, self.rows - r, self.cols),
        )
    }

    pub fn split_cols(&self, c: usize) -> (MatRef<'a, E>, MatRef<'a, E>) {
        (
            self.submatrix(0, 0, self.rows, c),
            self.submatrix(0, c, self.rows, self.cols - c),
        )
    }

    /// Quadrants cut at (r, c): (top-left, top-right, bottom-left, bottom-right).
    pub fn quad(
        &self,
        r: usize,
        c: usize,
    ) -> (MatRef<'a, E>, MatRef<'a, E>, MatRef<'a, E>, MatRef<'a, E>) {
        (
            self.submatrix(0, 0, r, c),
            self.submatrix(0, c, r, self.cols - c),
            self.submatrix(r, 0, self.rows - r, c),
            self.submatrix(r, c, self.rows - r, self.cols - c),
        )
    }

    pub fn to_matrix(&self, field: PrimeField) -> Matrix<E> {
        let mut m = Matrix::zeros(self.rows, self.cols, field);
        for i in 0..self.rows {
            m.as_mut().row_mut(i).copy_from_slice(self.row(i));
        }
        m
    }

    pub fn transpose_to(&self, field: PrimeField) -> Matrix<E> {
        let mut t = Matrix::zeros(self.cols, self.rows, field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j));
            }
        }
        t
    }
}

/// Mutable strided window. Splitting yields disjoint windows.
pub struct MatMut<'a, E> {
    ptr: *mut E,
    rows: usize,
    cols: usize,
    stride: usize,
    _marker: PhantomData<&'a mut [E]>,
}

unsafe impl<E: Send> Send for MatMut<'_, E> {}

impl<'a, E: Element> MatMut<'a, E> {
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline(always)]
    pub fn at(&self, i: usize, j: usize) -> E {
        debug_assert!(i < self.rows && j < self.cols);
        unsafe { *self.ptr.add(i * self.stride + j) }
    }

    #[inline(always)]
    pub fn write(&mut self, i: usize, j: usize, v: E) {
        debug_assert!(i < self.rows && j < self.cols);
        unsafe { *self.ptr.add(i * self.stride + j) = v }
    }

    #[inline(always)]
    pub fn row(&self, i: usize) -> &[E] {
        debug_assert!(i < self.rows);
        unsafe { std::slice::from_raw_parts(self.ptr.add(i * self.stride), self.cols) }
    }

    #[inline(always)]
    pub fn row_mut(&mut self, i: usize) -> &mut [E] {
        debug_assert!(i < self.rows);
        unsafe { std::slice::from_raw_parts_mut(self.ptr.add(i * self.stride), self.cols) }
    }

    /// Reborrows as immutable without consuming the mutable window.
    pub fn rb(&self) -> MatRef<'_, E> {
        MatRef {
            ptr: self.ptr,
            rows: self.rows,
            cols: self.cols,
            stride: self.stride,
            _marker: PhantomData,
        }
    }

    /// Reborrows mutably with a shorter lifetime.
    pub fn rb_mut(&mut self) -> MatMut<'_, E> {
        MatMut {
            ptr: self.ptr,
            rows: self.rows,
            cols: self.cols,
            stride: self.stride,
            _marker: PhantomData,
        }
    }

    pub fn submatrix_mut(self, r0: usize, c0: usize, nr: usize, nc: usize) -> MatMut<'a, E> {
        assert!(
            r0 + nr <= self.rows && c0 + nc <= self.cols,
            "window out of bounds"
        );
        MatMut {
            ptr: unsafe { self.ptr.add(r0 * self.stride + c0) },
            rows: nr,
            cols: nc,
            stride: self.stride,
            _marker: PhantomData,
        }
    }

    pub fn split_rows_mut(self, r: usize) -> (MatMut<'a, E>, MatMut<'a, E>) {
        assert!(r <= self.rows);
        let top = MatMut {
            ptr: self.ptr,
            rows: r,
            cols: self.cols,
            stride: self.stride,
            _marker: PhantomData,
        };
        let bot = MatMut {
            ptr: unsafe { self.ptr.add(r * self.stride) },
            rows: self.rows - r,
            cols: self.cols,
            stride: self.stride,
            _marker: PhantomData,
        };
        (top, bot)
    }

    pub fn split_cols_mut(self, c: usize) -> (MatMut<'a, E>, MatMut<'a, E>) {
        assert!(c <= self.cols);
        let left = MatMut {
            ptr: self.ptr,
            rows: self.rows,
            cols: c,
            stride: self.stride,
            _marker: PhantomData,
        };
        let right = MatMut {
            ptr: unsafe { self.ptr.add(c) },
            rows: self.rows,
            cols: self.cols - c,
            stride: self.stride,
            _marker: PhantomData,
        };
        (left, right)
    }

    /// Disjoint mutable quadrants cut at (r, c).
    pub fn quad_mut(
        self,
        r: usize,
        c: usize,
    ) -> (MatMut<'a, E>, MatMut<'a, E>, MatMut<'a, E>, MatMut<'a, E>) {
        let (top, bot) = self.split_rows_mut(r);
        let (tl, tr) = top.split_cols_mut(c);
        let (bl, br) = bot.split_cols_mut(c);
        (tl, tr, bl, br)
    }

    pub fn fill(&mut self, v: E) {
        for i in 0..self.rows {
            self.row_mut(i).fill(v);
        }
    }

    pub fn copy_from(&mut self, src: MatRef<'_, E>) {
        assert_eq!(self.rows, src.rows());
        assert_eq!(self.cols, src.cols());
        for i in 0..self.rows {
            self.row_mut(i).copy_from_slice(src.row(i));
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let t = self.at(a, j);
            let v = self.at(b, j);
            self.write(a, j, v);
            self.write(b, j, t);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let t = self.at(i, a);
            let v = self.at(i, b);
            self.write(i, a, v);
            self.write(i, b, t);
        }
    }

    pub fn reduce_all(&mut self, field: &PrimeField) {
        for i in 0..self.rows {
            for v in self.row_mut(i) {
                *v = field.reduce(*v);
            }
        }
    }
}
