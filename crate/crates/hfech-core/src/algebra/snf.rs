use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{axpy, IntMatrix, SparseVec};
use super::AlgebraError;

/// Smith normal form `left * A * right = diag(d)` with unimodular
/// transforms and their exact inverses.
#[derive(Debug, Clone)]
pub struct SnfResult {
    /// Nonnegative diagonal, `d[i]` divides `d[i+1]`, padded with zeros to
    /// `min(rows, cols)`.
    pub d: Vec<BigInt>,
    pub left: IntMatrix,
    pub left_inv: IntMatrix,
    pub right: IntMatrix,
    pub right_inv: IntMatrix,
}

impl SnfResult {
    /// Number of nonzero diagonal entries (the rank).
    pub fn rank(&self) -> usize {
        self.d.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn diagonal_matrix(&self, rows: usize, cols: usize) -> IntMatrix {
        let mut m = IntMatrix::zero(rows, cols);
        for (i, v) in self.d.iter().enumerate() {
            if !v.is_zero() {
                m.set(i, i, v.clone()).unwrap();
            }
        }
        m
    }
}

fn div_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    // quotient minimizing |a - q*b|; div_rem truncates toward zero
    let (q, r) = a.div_rem(b);
    if (&r * BigInt::from(2)).abs() > b.abs() {
        if r.sign() == b.sign() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Dense working state for the Smith reduction.
struct Dense {
    b: Vec<Vec<BigInt>>,
    l: Vec<Vec<BigInt>>,
    l_inv: Vec<Vec<BigInt>>,
    r: Vec<Vec<BigInt>>,
    r_inv: Vec<Vec<BigInt>>,
}

impl Dense {
    fn new(a: &IntMatrix) -> Self {
        let (rows, cols) = (a.rows(), a.cols());
        let ident = |n: usize| -> Vec<Vec<BigInt>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                BigInt::one()
                            } else {
                                BigInt::zero()
                            }
                        })
                        .collect()
                })
                .collect()
        };
        Dense {
            b: a.to_dense(),
            l: ident(rows),
            l_inv: ident(rows),
            r: ident(cols),
            r_inv: ident(cols),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.b.swap(i, j);
        self.l.swap(i, j);
        for row in &mut self.l_inv {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.b {
            row.swap(i, j);
        }
        for row in &mut self.r {
            row.swap(i, j);
        }
        self.r_inv.swap(i, j);
    }

    /// row_i -= q * row_t
    fn row_op(&mut self, i: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.b[0].len() {
            let v = &self.b[i][c] - q * &self.b[t][c];
            self.b[i][c] = v;
        }
        for c in 0..self.l[0].len() {
            let v = &self.l[i][c] - q * &self.l[t][c];
            self.l[i][c] = v;
        }
        for r in 0..self.l_inv.len() {
            let v = &self.l_inv[r][t] + q * &self.l_inv[r][i];
            self.l_inv[r][t] = v;
        }
    }

    /// col_j -= q * col_t
    fn col_op(&mut self, j: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in &mut self.b {
            let v = &row[j] - q * &row[t];
            row[j] = v;
        }
        for row in &mut self.r {
            let v = &row[j] - q * &row[t];
            row[j] = v;
        }
        for c in 0..self.r_inv[0].len() {
            let v = &self.r_inv[t][c] + q * &self.r_inv[j][c];
            self.r_inv[t][c] = v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for v in &mut self.b[i] {
            *v = -std::mem::take(v);
        }
        for v in &mut self.l[i] {
            *v = -std::mem::take(v);
        }
        for row in &mut self.l_inv {
            row[i] = -std::mem::take(&mut row[i]);
        }
    }

    /// row_t += row_i
    fn add_row(&mut self, t: usize, i: usize) {
        let minus_one = -BigInt::one();
        self.row_op(t, i, &minus_one);
    }
}

/// Smith normal form with minimal-absolute-value pivoting.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (rows, cols) = (a.rows(), a.cols());
    let n = rows.min(cols);
    let mut st = Dense::new(a);

    for t in 0..n {
        'pivot: loop {
            // minimal nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !st.b[i][j].is_zero()
                        && best
                            .map(|(bi, bj)| st.b[i][j].abs() < st.b[bi][bj].abs())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'pivot; // block is zero; done
            };
            st.swap_rows(t, pi);
            st.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if !st.b[i][t].is_zero() {
                    let q = div_nearest(&st.b[i][t], &st.b[t][t]);
                    st.row_op(i, t, &q);
                    if !st.b[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue 'pivot;
            }
            for j in t + 1..cols {
                if !st.b[t][j].is_zero() {
                    let q = div_nearest(&st.b[t][j], &st.b[t][t]);
                    st.col_op(j, t, &q);
                    if !st.b[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue 'pivot;
            }
            // divisibility of the trailing block by the pivot
            let p = st.b[t][t].clone();
            let mut fixed = true;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&st.b[i][j] % &p).is_zero() {
                        st.add_row(t, i);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break 'pivot;
            }
        }
        if st.b[t][t].is_negative() {
            st.negate_row(t);
        }
    }

    let d = (0..n).map(|t| st.b[t][t].clone()).collect();
    let dense_to = |m: Vec<Vec<BigInt>>| -> IntMatrix {
        let mut cols_v: Vec<SparseVec> = vec![Vec::new(); m.first().map_or(0, |r| r.len())];
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    cols_v[j].push((i, v.clone()));
                }
            }
        }
        IntMatrix::from_columns(m.len(), cols_v)
    };
    SnfResult {
        d,
        left: dense_to(st.l),
        left_inv: dense_to(st.l_inv),
        right: dense_to(st.r),
        right_inv: dense_to(st.r_inv),
    }
}

/// Integer column echelon form. Returns `(reduced, transform)` with
/// `reduced = a * transform`, `transform` unimodular, and every nonzero
/// reduced column having a distinct lowest row.
pub fn column_echelon(a: &IntMatrix) -> (Vec<SparseVec>, Vec<SparseVec>) {
    let mut cols: Vec<SparseVec> = a.columns().to_vec();
    let mut trans: Vec<SparseVec> = (0..a.cols()).map(|j| vec![(j, BigInt::one())]).collect();
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; a.rows()];

    for j in 0..cols.len() {
        while let Some((low, c)) = cols[j].last().cloned() {
            match pivot_of_row[low] {
                None => {
                    pivot_of_row[low] = Some(j);
                    break;
                }
                Some(k) => {
                    let p = cols[k].last().unwrap().1.clone();
                    if (&c % &p).is_zero() {
                        let q = -(&c / &p);
                        cols[j] = axpy(&cols[j], &cols[k].clone(), &q);
                        trans[j] = axpy(&trans[j], &trans[k].clone(), &q);
                    } else {
                        // gcd step: unimodular mix of columns j and k
                        let e = p.extended_gcd(&c);
                        let (g, u, v) = (e.gcd, e.x, e.y);
                        let ck = cols[k].clone();
                        let cj = cols[j].clone();
                        let tk = trans[k].clone();
                        let tj = trans[j].clone();
                        let new_k = axpy(&scale(&ck, &u), &cj, &v);
                        let new_j = axpy(&scale(&cj, &(&p / &g)), &ck, &(-(&c / &g)));
                        cols[k] = new_k;
                        cols[j] = new_j;
                        trans[k] = axpy(&scale(&tk, &u), &tj, &v);
                        trans[j] = axpy(&scale(&tj, &(&p / &g)), &tk, &(-(&c / &g)));
                    }
                }
            }
        }
    }
    (cols, trans)
}

fn scale(v: &SparseVec, c: &BigInt) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(r, x)| (*r, c * x)).collect()
}

pub(crate) fn column_echelon_rank(a: &IntMatrix) -> usize {
    let (cols, _) = column_echelon(a);
    cols.iter().filter(|c| !c.is_empty()).count()
}

/// An echelon basis of the integer kernel of `a`, as the columns of the
/// returned matrix (possibly zero columns wide).
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let (cols, trans) = column_echelon(a);
    let raw: Vec<SparseVec> = cols
        .iter()
        .zip(trans)
        .filter(|(c, _)| c.is_empty())
        .map(|(_, t)| t)
        .collect();
    // echelonize the kernel basis itself so it is peelable
    let k = IntMatrix::from_columns(a.cols(), raw);
    let (ecols, _) = column_echelon(&k);
    let mut nz: Vec<SparseVec> = ecols.into_iter().filter(|c| !c.is_empty()).collect();
    nz.sort_by_key(|c| c.last().unwrap().0);
    IntMatrix::from_columns(a.cols(), nz)
}

/// Expresses `v` as an integer combination of the columns of `echelon`
/// (which must have distinct lowest rows). Returns the coefficients.
pub fn peel_solve(echelon: &IntMatrix, v: &SparseVec) -> Result<SparseVec, AlgebraError> {
    let mut low_to_col = vec![usize::MAX; echelon.rows()];
    for (j, col) in echelon.columns().iter().enumerate() {
        let low = col.last().expect("echelon columns are nonzero").0;
        debug_assert!(low_to_col[low] == usize::MAX);
        low_to_col[low] = j;
    }
    let mut rest = v.clone();
    let mut coeffs: SparseVec = Vec::new();
    while let Some((low, c)) = rest.last().cloned() {
        let j = low_to_col[low];
        if j == usize::MAX {
            return Err(AlgebraError::NotInSpan { row: low });
        }
        let p = &echelon.column(j).last().unwrap().1;
        let (q, r) = c.div_rem(p);
        if !r.is_zero() {
            return Err(AlgebraError::NotInSpan { row: low });
        }
        rest = axpy(&rest, echelon.column(j), &-&q);
        coeffs.push((j, q));
    }
    coeffs.sort_by_key(|e| e.0);
    Ok(coeffs)
}

/// Canonical column Hermite normal form of the column lattice of `a`:
/// nonzero columns only, sorted by pivot row, positive pivots, off-pivot
/// entries reduced into `[0, pivot)`. Two matrices span the same lattice
/// iff their forms are equal.
pub fn hermite_normal_form(a: &IntMatrix) -> IntMatrix {
    let (cols, _) = column_echelon(a);
    let mut nz: Vec<SparseVec> = cols.into_iter().filter(|c| !c.is_empty()).collect();
    for c in &mut nz {
        if c.last().unwrap().1.is_negative() {
            for e in c.iter_mut() {
                e.1 = -std::mem::take(&mut e.1);
            }
        }
    }
    nz.sort_by_key(|c| c.last().unwrap().0);
    // reduce above-pivot entries; k runs downward so reductions stick
    for j in (0..nz.len()).rev() {
        for k in (0..j).rev() {
            let (head, tail) = nz.split_at_mut(j);
            let ck = &head[k];
            let cj = &mut tail[0];
            let low_k = ck.last().unwrap().0;
            let p = &ck.last().unwrap().1;
            let entry = cj
                .binary_search_by_key(&low_k, |e| e.0)
                .ok()
                .map(|pos| cj[pos].1.clone())
                .unwrap_or_else(BigInt::zero);
            let q = entry.div_floor(p);
            if !q.is_zero() {
                *cj = axpy(cj, ck, &-q);
            }
        }
    }
    IntMatrix::from_columns(a.rows(), nz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::big;

    fn check_snf(a: &IntMatrix) -> SnfResult {
        let s = smith_normal_form(a);
        // left * a * right is the diagonal
        let lar = s.left.mul(a).unwrap().mul(&s.right).unwrap();
        assert_eq!(lar, s.diagonal_matrix(a.rows(), a.cols()));
        // transforms invert exactly
        assert_eq!(
            s.left.mul(&s.left_inv).unwrap(),
            IntMatrix::identity(a.rows())
        );
        assert_eq!(
            s.right.mul(&s.right_inv).unwrap(),
            IntMatrix::identity(a.cols())
        );
        // reassembly: left_inv * diag * right_inv == a
        let back = s
            .left_inv
            .mul(&s.diagonal_matrix(a.rows(), a.cols()))
            .unwrap()
            .mul(&s.right_inv)
            .unwrap();
        assert_eq!(&back, a);
        // divisibility chain
        let nz: Vec<&BigInt> = s.d.iter().filter(|v| !v.is_zero()).collect();
        for w in nz.windows(2) {
            assert!((w[1] % w[0]).is_zero());
        }
        s
    }

    #[test]
    fn snf_two_by_two() {
        // d1 = gcd = 2, d1*d2 = |det| = 8
        let a = IntMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        let s = check_snf(&a);
        assert_eq!(s.d, vec![big(2), big(4)]);
    }

    #[test]
    fn snf_identity_and_zero() {
        let s = check_snf(&IntMatrix::identity(3));
        assert_eq!(s.d, vec![big(1), big(1), big(1)]);
        let z = check_snf(&IntMatrix::zero(2, 3));
        assert_eq!(z.d, vec![big(0), big(0)]);
    }

    #[test]
    fn snf_torsion_chain() {
        let a = IntMatrix::from_dense(&[vec![2, 0, 0], vec![0, 6, 0], vec![0, 0, 4]]);
        let s = check_snf(&a);
        assert_eq!(s.d, vec![big(2), big(2), big(12)]);
    }

    #[test]
    fn kernel_and_peel() {
        // kernel of [1 1 1] is rank 2
        let a = IntMatrix::from_dense(&[vec![1, 1, 1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).unwrap().is_zero());
        // a kernel member peels, a non-member errors
        let v: SparseVec = vec![(0, big(1)), (1, big(-2)), (2, big(1))];
        let x = peel_solve(&k, &v).unwrap();
        let kx = k.apply(&x).unwrap();
        assert_eq!(kx, v);
        let bad: SparseVec = vec![(0, big(1))];
        assert!(peel_solve(&k, &bad).is_err());
    }

    #[test]
    fn hermite_canonical_for_equal_lattices() {
        let a = IntMatrix::from_dense(&[vec![2, 1], vec![0, 3]]);
        // same lattice, different generators
        let b = IntMatrix::from_dense(&[vec![2, 3, 1], vec![3, 3, 3]]);
        let ha = hermite_normal_form(&a);
        let hb = hermite_normal_form(&b);
        assert_ne!(ha, hb); // different lattices here, sanity
        let c = IntMatrix::from_dense(&[vec![1, 3], vec![3, 3]]);
        let d = IntMatrix::from_dense(&[vec![1, 0], vec![3, 6]]);
        assert_eq!(hermite_normal_form(&c), hermite_normal_form(&d));
    }
}
