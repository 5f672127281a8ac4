use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::AlgebraError;

/// A sparse integer vector: (index, coefficient) pairs sorted by index,
/// with no zero coefficients stored.
pub type SparseVec = Vec<(usize, BigInt)>;

/// Adds `c * src` into `dst`, keeping the sorted sparse invariant.
pub fn axpy(dst: &SparseVec, src: &SparseVec, c: &BigInt) -> SparseVec {
    if c.is_zero() || src.is_empty() {
        return dst.clone();
    }
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        if j >= src.len() || (i < dst.len() && dst[i].0 < src[j].0) {
            out.push(dst[i].clone());
            i += 1;
        } else if i >= dst.len() || src[j].0 < dst[i].0 {
            let v = c * &src[j].1;
            if !v.is_zero() {
                out.push((src[j].0, v));
            }
            j += 1;
        } else {
            let v = &dst[i].1 + c * &src[j].1;
            if !v.is_zero() {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub(crate) fn sparse_get(v: &SparseVec, idx: usize) -> BigInt {
    match v.binary_search_by_key(&idx, |e| e.0) {
        Ok(pos) => v[pos].1.clone(),
        Err(_) => BigInt::zero(),
    }
}

/// A dense-shaped, sparsely stored matrix over Z with arbitrary-precision
/// entries. Entry access outside the declared shape is an error, never a
/// silent zero.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<SparseVec>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for j in 0..n {
            m.columns[j].push((j, BigInt::one()));
        }
        m
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> Self {
        for col in &columns {
            debug_assert!(col.windows(2).all(|w| w[0].0 < w[1].0));
            debug_assert!(col.iter().all(|(r, v)| *r < rows && !v.is_zero()));
        }
        IntMatrix {
            rows,
            cols: columns.len(),
            columns,
        }
    }

    /// Builds a matrix from (row, col, value) triples; repeated positions
    /// accumulate.
    pub fn from_entries(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> Self {
        let mut m = IntMatrix::zero(rows, cols);
        for &(r, c, v) in entries {
            assert!(r < rows && c < cols, "entry out of bounds");
            let cur = sparse_get(&m.columns[c], r) + BigInt::from(v);
            m.set_unchecked(r, c, cur);
        }
        m
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                if *v != 0 {
                    m.columns[j].push((i, BigInt::from(*v)));
                }
            }
        }
        for col in &mut m.columns {
            col.sort_by_key(|e| e.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> Result<BigInt, AlgebraError> {
        if r >= self.rows || c >= self.cols {
            return Err(AlgebraError::OutOfBounds(r, c, self.rows, self.cols));
        }
        Ok(sparse_get(&self.columns[c], r))
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) -> Result<(), AlgebraError> {
        if r >= self.rows || c >= self.cols {
            return Err(AlgebraError::OutOfBounds(r, c, self.rows, self.cols));
        }
        self.set_unchecked(r, c, v);
        Ok(())
    }

    fn set_unchecked(&mut self, r: usize, c: usize, v: BigInt) {
        let col = &mut self.columns[c];
        match col.binary_search_by_key(&r, |e| e.0) {
            Ok(pos) => {
                if v.is_zero() {
                    col.remove(pos);
                } else {
                    col[pos].1 = v;
                }
            }
            Err(pos) => {
                if !v.is_zero() {
                    col.insert(pos, (r, v));
                }
            }
        }
    }

    pub fn set_column(&mut self, j: usize, col: SparseVec) {
        debug_assert!(col.iter().all(|(r, v)| *r < self.rows && !v.is_zero()));
        self.columns[j] = col;
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    /// Matrix-vector product on a sparse vector.
    pub fn apply(&self, v: &SparseVec) -> Result<SparseVec, AlgebraError> {
        if let Some((idx, _)) = v.last() {
            if *idx >= self.cols {
                return Err(AlgebraError::DimensionMismatch(format!(
                    "vector index {idx} vs {} columns",
                    self.cols
                )));
            }
        }
        let mut out: SparseVec = Vec::new();
        for (j, c) in v {
            out = axpy(&out, &self.columns[*j], c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut cols = Vec::with_capacity(other.cols);
        for j in 0..other.cols {
            cols.push(self.apply(&other.columns[j])?);
        }
        Ok(IntMatrix::from_columns(self.rows, cols))
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix, AlgebraError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(AlgebraError::DimensionMismatch("add shapes differ".into()));
        }
        let one = BigInt::one();
        let cols = (0..self.cols)
            .map(|j| axpy(&self.columns[j], &other.columns[j], &one))
            .collect();
        Ok(IntMatrix::from_columns(self.rows, cols))
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix, AlgebraError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(AlgebraError::DimensionMismatch("sub shapes differ".into()));
        }
        let minus = -BigInt::one();
        let cols = (0..self.cols)
            .map(|j| axpy(&self.columns[j], &other.columns[j], &minus))
            .collect();
        Ok(IntMatrix::from_columns(self.rows, cols))
    }

    pub fn neg(&self) -> IntMatrix {
        let cols = self
            .columns
            .iter()
            .map(|c| c.iter().map(|(r, v)| (*r, -v)).collect())
            .collect();
        IntMatrix::from_columns(self.rows, cols)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut cols: Vec<SparseVec> = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                cols[*r].push((j, v.clone()));
            }
        }
        IntMatrix::from_columns(self.cols, cols)
    }

    /// Extracts the submatrix with the given rows and columns (in order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut row_map = vec![usize::MAX; self.rows];
        for (new, old) in rows.iter().enumerate() {
            row_map[*old] = new;
        }
        let out_cols = cols
            .iter()
            .map(|&j| {
                let mut col: SparseVec = self.columns[j]
                    .iter()
                    .filter(|(r, _)| row_map[*r] != usize::MAX)
                    .map(|(r, v)| (row_map[*r], v.clone()))
                    .collect();
                col.sort_by_key(|e| e.0);
                col
            })
            .collect();
        IntMatrix::from_columns(rows.len(), out_cols)
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                out[*r][j] = v.clone();
            }
        }
        out
    }

    /// Rank over the rationals (exact, via integer column echelon).
    pub fn rank(&self) -> usize {
        super::snf::column_echelon_rank(self)
    }

    /// Rank over the prime field F_p.
    pub fn rank_mod(&self, p: u64) -> usize {
        assert!(p >= 2, "modulus must be at least 2");
        let pb = BigInt::from(p);
        let mut cols: Vec<Vec<(usize, u64)>> = self
            .columns
            .iter()
            .map(|c| {
                c.iter()
                    .filter_map(|(r, v)| {
                        let m = ((v % &pb) + &pb) % &pb;
                        let m: u64 = m.try_into().unwrap();
                        (m != 0).then_some((*r, m))
                    })
                    .collect()
            })
            .collect();
        // column echelon mod p keyed on the lowest (largest-index) row
        let mut pivot_of_row: Vec<Option<usize>> = vec![None; self.rows];
        let mut rank = 0;
        for j in 0..cols.len() {
            while let Some(&(low, c)) = cols[j].last() {
                match pivot_of_row[low] {
                    None => {
                        pivot_of_row[low] = Some(j);
                        rank += 1;
                        break;
                    }
                    Some(k) => {
                        let pc = cols[k].last().unwrap().1;
                        let factor = (c * mod_inverse(pc, p)) % p;
                        let sub = cols[k].clone();
                        cols[j] = mod_axpy(&cols[j], &sub, p - factor, p);
                    }
                }
            }
        }
        rank
    }
}

fn mod_axpy(dst: &[(usize, u64)], src: &[(usize, u64)], c: u64, p: u64) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        if j >= src.len() || (i < dst.len() && dst[i].0 < src[j].0) {
            out.push(dst[i]);
            i += 1;
        } else if i >= dst.len() || src[j].0 < dst[i].0 {
            let v = mulmod(src[j].1, c, p);
            if v != 0 {
                out.push((src[j].0, v));
            }
            j += 1;
        } else {
            let v = (dst[i].1 + mulmod(src[j].1, c, p)) % p;
            if v != 0 {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is prime in every caller; Fermat.
    let mut result: u64 = 1;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mulmod(result, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    result
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_dense() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", line.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_of_bounds_is_an_error() {
        let m = IntMatrix::from_dense(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(m.get(0, 1).unwrap(), BigInt::from(2));
        assert!(matches!(
            m.get(2, 0),
            Err(AlgebraError::OutOfBounds(2, 0, 2, 2))
        ));
        assert!(matches!(m.get(0, 2), Err(AlgebraError::OutOfBounds(..))));
    }

    #[test]
    fn mul_and_transpose() {
        let a = IntMatrix::from_dense(&[vec![1, 2], vec![3, 4]]);
        let b = IntMatrix::from_dense(&[vec![0, 1], vec![1, 0]]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, IntMatrix::from_dense(&[vec![2, 1], vec![4, 3]]));
        assert_eq!(
            a.transpose(),
            IntMatrix::from_dense(&[vec![1, 3], vec![2, 4]])
        );
        assert!(a.mul(&IntMatrix::zero(3, 1)).is_err());
    }

    #[test]
    fn rank_over_q_and_fp() {
        let m = IntMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.rank_mod(2), 0);
        assert_eq!(m.rank_mod(3), 2);
        let t = IntMatrix::from_dense(&[vec![2]]);
        assert_eq!(t.rank(), 1);
        assert_eq!(t.rank_mod(2), 0);
        assert_eq!(t.rank_mod(3), 1);
    }
}
