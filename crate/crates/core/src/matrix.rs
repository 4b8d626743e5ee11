//! Boolean matrices over (𝔹, +, ·), stored bit-packed per row.

use std::fmt;
use std::str::FromStr;

use crate::bits::{words_for, BoolVec, WORD_BITS};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMat {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BoolMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            m.set_row(i, &BoolVec::ones(cols));
        }
        m
    }

    /// Builds a matrix from 0/1 rows. All rows must have the same length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            for (j, &b) in r.iter().enumerate() {
                if b > 1 {
                    return Err(Error::MatrixFormat(format!(
                        "entry ({i},{j}) is {b}, expected 0 or 1"
                    )));
                }
                m.set(i, j, b == 1);
            }
        }
        Ok(m)
    }

    /// Single-column matrix holding `v`.
    pub fn from_column(v: &BoolVec) -> Self {
        let mut m = Self::zeros(v.len(), 1);
        m.set_col(0, v);
        m
    }

    /// Permutation matrix `P` with `P(order[k], k) = 1`, so that `PᵀAP`
    /// relists rows and columns of `A` in the sequence `order`.
    pub fn permutation(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        let mut p = Self::zeros(n, n);
        for (k, &i) in order.iter().enumerate() {
            if i >= n || seen[i] {
                return Err(Error::Argument(format!("{order:?} is not a permutation")));
            }
            seen[i] = true;
            p.set(i, k, true);
        }
        Ok(p)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "({i},{j}) out of bounds");
        (self.words[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "({i},{j}) out of bounds");
        let w = &mut self.words[i * self.stride + j / WORD_BITS];
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BoolVec {
        assert!(i < self.rows, "row {i} out of bounds");
        BoolVec::from_words(self.cols, self.row_words(i).to_vec())
    }

    pub fn set_row(&mut self, i: usize, v: &BoolVec) {
        assert_eq!(v.len(), self.cols, "row length mismatch");
        let s = self.stride;
        self.words[i * s..(i + 1) * s].copy_from_slice(v.words());
    }

    pub fn col(&self, j: usize) -> BoolVec {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &BoolVec) {
        assert_eq!(v.len(), self.rows, "column length mismatch");
        for i in 0..self.rows {
            self.set(i, j, v.get(i));
        }
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row_words(i).iter().all(|&w| w == 0)
    }

    pub fn row_count_ones(&self, i: usize) -> usize {
        self.row_words(i)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Logical product: `(AB)(i,k) = Σ_j A(i,j)·B(j,k)`.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        let s = out.stride;
        for i in 0..self.rows {
            let dst = &mut out.words[i * s..(i + 1) * s];
            for (wi, &w) in self.row_words(i).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let j = wi * WORD_BITS + w.trailing_zeros() as usize;
                    for (d, src) in dst.iter_mut().zip(rhs.row_words(j)) {
                        *d |= *src;
                    }
                    w &= w - 1;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `Ax`.
    pub fn mul_vec(&self, x: &BoolVec) -> Result<BoolVec> {
        if self.cols != x.len() {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row_words(i)
                    .iter()
                    .zip(x.words())
                    .any(|(a, b)| a & b != 0)
            })
            .collect())
    }

    /// `A⁰ = I`, `Aᵏ = A·Aᵏ⁻¹`.
    pub fn pow(&self, k: usize) -> Result<Self> {
        self.require_square("power")?;
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (wi, &w) in self.row_words(i).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let j = wi * WORD_BITS + w.trailing_zeros() as usize;
                    t.set(j, i, true);
                    w &= w - 1;
                }
            }
        }
        t
    }

    pub fn or(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, |a, b| a | b)
    }

    pub fn and(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, |a, b| a & b)
    }

    /// Elementwise `self ≤ rhs` under 0 ≤ 1.
    pub fn le(&self, rhs: &Self) -> Result<bool> {
        self.same_shape(rhs)?;
        Ok(self.words.iter().zip(&rhs.words).all(|(a, b)| a & !b == 0))
    }

    /// Horizontal concatenation `(self | rhs)`.
    pub fn hcat(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot concatenate {} rows with {} rows",
                self.rows, rhs.rows
            )));
        }
        let mut out = Self::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..rhs.cols {
                out.set(i, self.cols + j, rhs.get(i, j));
            }
        }
        Ok(out)
    }

    /// Left `cols` columns.
    pub fn left_columns(&self, cols: usize) -> Self {
        let cols = cols.min(self.cols);
        let mut out = Self::zeros(self.rows, cols);
        for i in 0..self.rows {
            for j in 0..cols {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Copy with the diagonal cleared.
    pub fn without_diagonal(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out.set(i, i, false);
        }
        out
    }

    /// Boolean spectral radius: `false` (ρ = 0) iff `Aⁿ = 0`.
    ///
    /// The eigenvector definition admits `x = 0` for every λ, so ρ is taken
    /// from the nilpotency characterisation instead.
    pub fn spectral_radius(&self) -> Result<bool> {
        self.require_square("spectral radius")?;
        if self.rows == 0 {
            return Err(Error::Shape("spectral radius of an empty matrix".into()));
        }
        Ok(!self.pow(self.rows)?.is_zero())
    }

    /// Smallest `q ≤ n` with `A^q = 0`, or `None` when `A` is not nilpotent.
    pub fn nilpotency_index(&self) -> Result<Option<usize>> {
        self.require_square("nilpotency index")?;
        let n = self.rows;
        let mut power = Self::identity(n);
        for q in 0..=n {
            if power.is_zero() {
                return Ok(Some(q));
            }
            power = power.mul(self)?;
        }
        Ok(None)
    }

    /// Parses the plain-text format: a `rows cols` header followed by
    /// `rows` lines of space-separated 0/1 entries. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::MatrixFormat("missing `rows cols` header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::MatrixFormat(format!("bad dimension `{t}`")))
            })
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::MatrixFormat(format!(
                "header must be `rows cols`, got `{header}`"
            )));
        };
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::MatrixFormat(format!("missing row {i}")))?;
            let cells: Vec<&str> = line.split_whitespace().collect();
            if cells.len() != cols {
                return Err(Error::MatrixFormat(format!(
                    "row {i} has {} entries, expected {cols}",
                    cells.len()
                )));
            }
            for (j, c) in cells.iter().enumerate() {
                match *c {
                    "0" => {}
                    "1" => m.set(i, j, true),
                    other => {
                        return Err(Error::MatrixFormat(format!(
                            "entry ({i},{j}) is `{other}`, expected 0 or 1"
                        )))
                    }
                }
            }
        }
        if let Some(extra) = lines.next() {
            return Err(Error::MatrixFormat(format!("trailing content `{extra}`")));
        }
        Ok(m)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<&str> = (0..self.cols)
                .map(|j| if self.get(i, j) { "1" } else { "0" })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    fn same_shape(&self, rhs: &Self) -> Result<()> {
        if self.rows == rhs.rows && self.cols == rhs.cols {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )))
        }
    }

    fn zip(&self, rhs: &Self, op: impl Fn(u64, u64) -> u64) -> Result<Self> {
        self.same_shape(rhs)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            stride: self.stride,
            words: self
                .words
                .iter()
                .zip(&rhs.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }
}

impl fmt::Debug for BoolMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: String = (0..self.cols)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for BoolMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for BoolMat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lone_root_c() -> BoolMat {
        BoolMat::from_rows(&[
            [1, 1, 0, 0, 1],
            [1, 0, 1, 0, 1],
            [1, 1, 1, 1, 1],
            [0, 1, 1, 1, 1],
            [0, 0, 0, 0, 1],
        ])
        .unwrap()
    }

    #[test]
    fn identity_times_column() {
        let v = BoolMat::from_column(&BoolVec::from_bits(&[0, 1, 1, 0, 1]));
        assert_eq!(BoolMat::identity(5).mul(&v).unwrap(), v);
    }

    #[test]
    fn lone_root_products_match_reachability_columns() {
        let c = lone_root_c();
        let e1 = BoolVec::unit(5, 0);
        assert_eq!(
            c.mul_vec(&e1).unwrap(),
            BoolVec::from_bits(&[1, 1, 1, 0, 0])
        );
        let c2 = c.pow(2).unwrap();
        assert_eq!(
            c2.mul_vec(&e1).unwrap(),
            BoolVec::from_bits(&[1, 1, 1, 1, 0])
        );
    }

    #[test]
    fn zero_power_is_identity() {
        assert_eq!(lone_root_c().pow(0).unwrap(), BoolMat::identity(5));
    }

    #[test]
    fn strictly_lower_triangular_is_nilpotent() {
        let a =
            BoolMat::from_rows(&[[0, 0, 0, 0], [1, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 0]]).unwrap();
        assert!(a.pow(4).unwrap().is_zero());
        assert!(!a.pow(3).unwrap().is_zero());
        assert_eq!(a.nilpotency_index().unwrap(), Some(4));
        assert!(!a.spectral_radius().unwrap());
    }

    #[test]
    fn spectral_radius_basics() {
        assert!(!BoolMat::zeros(3, 3).spectral_radius().unwrap());
        assert!(BoolMat::identity(3).spectral_radius().unwrap());
        assert!(BoolMat::from_rows(&[[1, 1, 1], [1, 1, 1], [1, 0, 0]])
            .unwrap()
            .spectral_radius()
            .unwrap());
    }

    #[test]
    fn shape_errors() {
        let a = BoolMat::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(Error::Shape(_))));
        assert!(matches!(a.pow(2), Err(Error::Shape(_))));
        assert!(matches!(a.spectral_radius(), Err(Error::Shape(_))));
        assert!(matches!(
            a.mul_vec(&BoolVec::zeros(2)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn text_format_roundtrip_and_errors() {
        let c = lone_root_c();
        assert_eq!(BoolMat::parse_text(&c.to_text()).unwrap(), c);
        assert!(BoolMat::parse_text("2 2\n0 1\n").is_err());
        assert!(BoolMat::parse_text("1 2\n0 2\n").is_err());
        assert!(BoolMat::parse_text("1 2\n0 1 1\n").is_err());
        assert!(BoolMat::parse_text("").is_err());
        assert_eq!(
            "# comment\n1 2\n\n1 0\n".parse::<BoolMat>().unwrap(),
            BoolMat::from_rows(&[[1, 0]]).unwrap()
        );
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        let n = 130;
        let mut a = BoolMat::zeros(n, n);
        for i in 1..n {
            a.set(i, i - 1, true);
        }
        assert_eq!(a.nilpotency_index().unwrap(), Some(n));
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn permutation_conjugation() {
        let p = BoolMat::permutation(&[2, 0, 1]).unwrap();
        // A has a single edge 2 <- 0 (row 2, col 0).
        let mut a = BoolMat::zeros(3, 3);
        a.set(2, 0, true);
        let b = p.transpose().mul(&a).unwrap().mul(&p).unwrap();
        // In the order (2, 0, 1), agent 2 sits at position 0 and agent 0 at position 1.
        assert!(b.get(0, 1));
        assert_eq!(b.count_ones(), 1);
        assert!(BoolMat::permutation(&[0, 0, 1]).is_err());
    }
}
