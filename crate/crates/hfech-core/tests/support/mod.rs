#![allow(dead_code)] // each test target uses its own subset
#![allow(clippy::needless_range_loop)] // dense textbook matrix code reads best with indices

//! Independent test-side oracle: a plain dense textbook Smith reduction
//! over i128 and a from-scratch construction of the handle-complex
//! windows. Nothing here touches the engine's own linear algebra.

/// Invariant factors of a dense integer matrix (textbook algorithm,
/// first-nonzero pivoting, no sparsity, no transforms).
pub fn oracle_snf(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let n = rows.min(cols);
    let mut d = vec![0i128; n];
    for t in 0..n {
        loop {
            // find any nonzero entry in the trailing block
            let mut pivot = None;
            'scan: for i in t..rows {
                for j in t..cols {
                    if m[i][j] != 0 {
                        pivot = Some((i, j));
                        break 'scan;
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return d;
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            // reduce column and row by euclidean steps until clean
            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t] != 0 {
                    let q = m[i][t] / m[t][t];
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                    if m[i][t] != 0 {
                        // remainder left: swap up to shrink the pivot
                        m.swap(t, i);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            for j in t + 1..cols {
                if m[t][j] != 0 {
                    let q = m[t][j] / m[t][t];
                    for row in m.iter_mut().take(rows).skip(t) {
                        row[j] -= q * row[t];
                    }
                    if m[t][j] != 0 {
                        for row in m.iter_mut() {
                            row.swap(t, j);
                        }
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block
            let p = m[t][t];
            let mut fixed = true;
            'fix: for i in t + 1..rows {
                for j in t + 1..cols {
                    if m[i][j] % p != 0 {
                        for jj in t..cols {
                            m[t][jj] += m[i][jj];
                        }
                        fixed = false;
                        break 'fix;
                    }
                }
            }
            if fixed {
                d[t] = p.abs();
                break;
            }
        }
    }
    d
}

pub fn oracle_rank(m: &[Vec<i128>]) -> usize {
    oracle_snf(m.to_vec()).iter().filter(|&&v| v != 0).count()
}

/// Homology of a composable pair, brute force: free rank and torsion.
pub fn oracle_homology(d_in: &[Vec<i128>], d_out: &[Vec<i128>]) -> (usize, Vec<i128>) {
    let n = if d_in.is_empty() {
        d_out.first().map_or(0, |r| r.len())
    } else {
        d_in.len()
    };
    let r_out = if d_out.is_empty() {
        0
    } else {
        oracle_rank(d_out)
    };
    let r_in = if d_in.is_empty() || d_in[0].is_empty() {
        0
    } else {
        oracle_rank(d_in)
    };
    let rank = n - r_out - r_in;
    let mut torsion: Vec<i128> = if d_in.is_empty() || d_in[0].is_empty() {
        Vec::new()
    } else {
        oracle_snf(d_in.to_vec())
            .into_iter()
            .filter(|&v| v > 1)
            .collect()
    };
    torsion.sort();
    (rank, torsion)
}

/// Handle labels encoded independently of the engine: o is 0, 1 (up),
/// 2 (down), 3 (both).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleCell {
    pub m: i64,
    pub o: u8,
}

pub fn oracle_weight(o: u8) -> i64 {
    match o {
        0 => 0,
        1 | 2 => 1,
        3 => 2,
        _ => unreachable!(),
    }
}

/// The four boundary rules, typed in directly from their statement.
pub fn oracle_boundary(c: OracleCell) -> Vec<(OracleCell, i128)> {
    let cell = |m: i64, o: u8| OracleCell { m, o };
    match c.o {
        0 => vec![],
        1 => vec![(cell(c.m, 0), 1), (cell(c.m + 1, 0), 1)],
        2 => vec![(cell(c.m, 0), 1), (cell(c.m - 1, 0), 1)],
        3 => vec![
            (cell(c.m, 2), 1),
            (cell(c.m, 1), -1),
            (cell(c.m + 1, 2), 1),
            (cell(c.m - 1, 1), -1),
        ],
        _ => unreachable!(),
    }
}

/// All cells with |m| + 2|o| < l.
pub fn oracle_window(l: i64) -> Vec<OracleCell> {
    let mut out = Vec::new();
    for o in 0..4u8 {
        let w = oracle_weight(o);
        let mut m = -l;
        while m <= l {
            if m.abs() + 2 * w < l {
                out.push(OracleCell { m, o });
            }
            m += 1;
        }
    }
    out.sort();
    out
}

/// The boundary matrix from cells of grading `g` to cells of grading
/// g - 1 within the window.
pub fn oracle_boundary_matrix(cells: &[OracleCell], g: i64) -> Vec<Vec<i128>> {
    let sources: Vec<OracleCell> = cells
        .iter()
        .copied()
        .filter(|c| oracle_weight(c.o) == g)
        .collect();
    let targets: Vec<OracleCell> = cells
        .iter()
        .copied()
        .filter(|c| oracle_weight(c.o) == g - 1)
        .collect();
    let mut m = vec![vec![0i128; sources.len()]; targets.len()];
    for (j, s) in sources.iter().enumerate() {
        for (t, coeff) in oracle_boundary(*s) {
            if let Some(r) = targets.iter().position(|&x| x == t) {
                m[r][j] += coeff;
            }
            // boundary terms leaving the window would be a filtration
            // violation; the engine-side tests assert that separately
        }
    }
    m
}

/// Per-grading homology of the handle window, straight from the oracle.
pub fn oracle_window_homology(l: i64) -> Vec<(usize, Vec<i128>)> {
    let cells = oracle_window(l);
    (0..3)
        .map(|g| {
            let d_in = oracle_boundary_matrix(&cells, g + 1);
            let d_out = oracle_boundary_matrix(&cells, g);
            let mid = cells.iter().filter(|c| oracle_weight(c.o) == g).count();
            if mid == 0 {
                return (0, Vec::new());
            }
            let d_in = if d_in.is_empty() || d_in[0].is_empty() {
                vec![vec![0i128; 0]; mid]
            } else {
                d_in
            };
            oracle_homology(&d_in, &d_out)
        })
        .collect()
}

/// A tiny deterministic generator for oracle-side randomized tests.
pub struct TestRng(pub u64);

impl TestRng {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}
