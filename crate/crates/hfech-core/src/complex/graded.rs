use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{ComplexError, ComplexViolation};
use crate::algebra::{IntMatrix, SparseVec};
use crate::label::Label;

/// A finitely generated free chain complex over Z with a relative Z/pZ
/// grading (p = 0 means a Z-grading). Gradings are stored as integer
/// lifts: only their classes mod p are meaningful, and the Koszul signs
/// below use the lift parity, which is well defined because p is even.
#[derive(Debug, Clone)]
pub struct GradedComplex {
    labels: Vec<Label>,
    index: BTreeMap<Label, usize>,
    grading: Vec<i64>,
    p: u32,
    diff: IntMatrix,
}

impl GradedComplex {
    pub fn new(
        labels: Vec<Label>,
        grading: Vec<i64>,
        p: u32,
        diff: IntMatrix,
    ) -> Result<Self, ComplexError> {
        assert!(p.is_multiple_of(2), "grading modulus must be even");
        let n = labels.len();
        if grading.len() != n || diff.rows() != n || diff.cols() != n {
            return Err(ComplexError::Shape(format!(
                "{} labels, {} gradings, {}x{} differential",
                n,
                grading.len(),
                diff.rows(),
                diff.cols()
            )));
        }
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(ComplexError::DuplicateLabel(l.clone()));
            }
        }
        Ok(GradedComplex {
            labels,
            index,
            grading,
            p,
            diff,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn index_of(&self, l: &Label) -> Option<usize> {
        self.index.get(l).copied()
    }

    pub fn lift(&self, i: usize) -> i64 {
        self.grading[i]
    }

    pub fn differential(&self) -> &IntMatrix {
        &self.diff
    }

    /// The grading class of a lift: the lift itself when p = 0, otherwise
    /// its nonnegative residue mod p.
    pub fn grading_key_of_lift(&self, lift: i64) -> i64 {
        if self.p == 0 {
            lift
        } else {
            lift.rem_euclid(self.p as i64)
        }
    }

    pub fn grading_key(&self, i: usize) -> i64 {
        self.grading_key_of_lift(self.grading[i])
    }

    /// Shifts a grading key by `delta`, wrapping mod p when p > 0.
    pub fn key_shift(&self, key: i64, delta: i64) -> i64 {
        self.grading_key_of_lift(key + delta)
    }

    /// All grading keys present in the basis, ascending.
    pub fn grading_keys(&self) -> Vec<i64> {
        let mut keys: Vec<i64> = (0..self.dim()).map(|i| self.grading_key(i)).collect();
        keys.sort_unstable();
        keys.dedup();
        keys
    }

    /// Basis indices at the given grading key, in basis order.
    pub fn indices_at(&self, key: i64) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.grading_key(i) == key)
            .collect()
    }

    /// Builds a sparse chain from label/coefficient pairs.
    pub fn chain(&self, parts: &[(Label, i64)]) -> Result<SparseVec, ComplexError> {
        let mut v: SparseVec = Vec::new();
        for (l, c) in parts {
            let i = self
                .index_of(l)
                .ok_or_else(|| ComplexError::UnknownLabel(l.clone()))?;
            let cur = v
                .binary_search_by_key(&i, |e| e.0)
                .map(|pos| v[pos].1.clone())
                .unwrap_or_else(|_| BigInt::zero());
            let nv = cur + BigInt::from(*c);
            match v.binary_search_by_key(&i, |e| e.0) {
                Ok(pos) => {
                    if nv.is_zero() {
                        v.remove(pos);
                    } else {
                        v[pos].1 = nv;
                    }
                }
                Err(pos) => {
                    if !nv.is_zero() {
                        v.insert(pos, (i, nv));
                    }
                }
            }
        }
        Ok(v)
    }

    pub fn chain_to_string(&self, v: &SparseVec) -> String {
        if v.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (i, c)) in v.iter().enumerate() {
            let l = &self.labels[*i];
            if k == 0 {
                if *c == BigInt::from(1) {
                    out.push_str(&format!("{l}"));
                } else if *c == BigInt::from(-1) {
                    out.push_str(&format!("-{l}"));
                } else {
                    out.push_str(&format!("{c}*{l}"));
                }
            } else if *c == BigInt::from(1) {
                out.push_str(&format!(" + {l}"));
            } else if *c == BigInt::from(-1) {
                out.push_str(&format!(" - {l}"));
            } else if c.sign() == num_bigint::Sign::Minus {
                out.push_str(&format!(" - {}*{l}", -c));
            } else {
                out.push_str(&format!(" + {c}*{l}"));
            }
        }
        out
    }

    /// Checks that the differential squares to zero and lowers the
    /// relative grading by exactly 1.
    pub fn verify(&self) -> Result<(), ComplexViolation> {
        let p = self.p as i64;
        for j in 0..self.dim() {
            for (r, _) in self.diff.column(j) {
                let drop = self.grading[j] - self.grading[*r];
                let ok = if p == 0 {
                    drop == 1
                } else {
                    drop.rem_euclid(p) == 1
                };
                if !ok {
                    return Err(ComplexViolation::WrongDegree {
                        from: self.labels[j].clone(),
                        to: self.labels[*r].clone(),
                    });
                }
            }
        }
        for j in 0..self.dim() {
            let sq = self.diff.apply(self.diff.column(j)).unwrap();
            if !sq.is_empty() {
                return Err(ComplexViolation::NotSquareZero {
                    witness: self.labels[j].clone(),
                });
            }
        }
        Ok(())
    }

    /// Signed tensor product. The differential acts on a decomposable
    /// pair as the left differential plus (-1)^(left lift) times the
    /// right differential.
    pub fn tensor(&self, other: &GradedComplex) -> Result<GradedComplex, ComplexError> {
        let p = match (self.p, other.p) {
            (0, q) => q,
            (q, 0) => q,
            (a, b) if a == b => a,
            (a, b) if a % b == 0 => b,
            (a, b) if b % a == 0 => a,
            (a, b) => return Err(ComplexError::GradingMismatch(a, b)),
        };
        let (nl, nr) = (self.dim(), other.dim());
        let n = nl * nr;
        let at = |i: usize, j: usize| i * nr + j;

        let mut labels = Vec::with_capacity(n);
        let mut grading = Vec::with_capacity(n);
        for i in 0..nl {
            for j in 0..nr {
                labels.push(Label::pair(self.labels[i].clone(), other.labels[j].clone()));
                grading.push(self.grading[i] + other.grading[j]);
            }
        }
        let mut diff = IntMatrix::zero(n, n);
        for i in 0..nl {
            for j in 0..nr {
                let mut col: SparseVec = Vec::new();
                for (r, c) in self.diff.column(i) {
                    col.push((at(*r, j), c.clone()));
                }
                let sign = if self.grading[i].rem_euclid(2) == 0 {
                    BigInt::from(1)
                } else {
                    BigInt::from(-1)
                };
                for (r, c) in other.diff.column(j) {
                    col.push((at(i, *r), &sign * c));
                }
                col.sort_by_key(|e| e.0);
                diff.set_column(at(i, j), col);
            }
        }
        GradedComplex::new(labels, grading, p, diff)
    }

    /// Splits the complex along a differential-invariant span of basis
    /// labels into a short exact sequence sub -> total -> quotient.
    pub fn sub_quotient<F: Fn(&Label) -> bool>(&self, keep: F) -> Result<Ses, ComplexError> {
        let kept: Vec<usize> = (0..self.dim()).filter(|&i| keep(&self.labels[i])).collect();
        let dropped: Vec<usize> = (0..self.dim())
            .filter(|&i| !keep(&self.labels[i]))
            .collect();
        let mut kept_set = vec![false; self.dim()];
        for &i in &kept {
            kept_set[i] = true;
        }
        for &j in &kept {
            for (r, _) in self.diff.column(j) {
                if !kept_set[*r] {
                    return Err(ComplexError::NotSubcomplex {
                        from: self.labels[j].clone(),
                        to: self.labels[*r].clone(),
                    });
                }
            }
        }
        let pick = |idx: &[usize]| -> (Vec<Label>, Vec<i64>) {
            (
                idx.iter().map(|&i| self.labels[i].clone()).collect(),
                idx.iter().map(|&i| self.grading[i]).collect(),
            )
        };
        let (sub_labels, sub_grading) = pick(&kept);
        let (quot_labels, quot_grading) = pick(&dropped);
        let sub = GradedComplex::new(
            sub_labels,
            sub_grading,
            self.p,
            self.diff.submatrix(&kept, &kept),
        )?;
        let quotient = GradedComplex::new(
            quot_labels,
            quot_grading,
            self.p,
            self.diff.submatrix(&dropped, &dropped),
        )?;
        let mut inclusion = IntMatrix::zero(self.dim(), kept.len());
        for (s, &g) in kept.iter().enumerate() {
            inclusion.set(g, s, BigInt::from(1)).unwrap();
        }
        let mut projection = IntMatrix::zero(dropped.len(), self.dim());
        for (q, &g) in dropped.iter().enumerate() {
            projection.set(q, g, BigInt::from(1)).unwrap();
        }
        Ok(Ses {
            sub,
            total: self.clone(),
            quotient,
            inclusion,
            projection,
            sub_indices: kept,
            quot_indices: dropped,
        })
    }
}

/// A short exact sequence of complexes built from a differential-invariant
/// span of basis labels. The quotient basis is the dropped labels
/// themselves.
#[derive(Debug, Clone)]
pub struct Ses {
    pub sub: GradedComplex,
    pub total: GradedComplex,
    pub quotient: GradedComplex,
    pub inclusion: IntMatrix,
    pub projection: IntMatrix,
    /// Index in `total` of each `sub` basis element.
    pub sub_indices: Vec<usize>,
    /// Index in `total` of each `quotient` basis element.
    pub quot_indices: Vec<usize>,
}

impl Ses {
    /// Structural sanity: inclusion and projection are chain maps,
    /// their composite vanishes, and ranks account for exactness.
    pub fn verify(&self) -> Result<(), ComplexError> {
        let di = self
            .total
            .differential()
            .mul(&self.inclusion)?
            .sub(&self.inclusion.mul(self.sub.differential())?)?;
        if !di.is_zero() {
            return Err(ComplexError::Shape("inclusion is not a chain map".into()));
        }
        let dp = self
            .quotient
            .differential()
            .mul(&self.projection)?
            .sub(&self.projection.mul(self.total.differential())?)?;
        if !dp.is_zero() {
            return Err(ComplexError::Shape("projection is not a chain map".into()));
        }
        if !self.projection.mul(&self.inclusion)?.is_zero() {
            return Err(ComplexError::Shape(
                "projection . inclusion is nonzero".into(),
            ));
        }
        if self.sub.dim() + self.quotient.dim() != self.total.dim() {
            return Err(ComplexError::Shape("ranks are not exact".into()));
        }
        Ok(())
    }

    /// Lifts a quotient chain to the total complex along the label
    /// identification.
    pub fn lift_quotient(&self, v: &SparseVec) -> SparseVec {
        let mut out: SparseVec = v
            .iter()
            .map(|(q, c)| (self.quot_indices[*q], c.clone()))
            .collect();
        out.sort_by_key(|e| e.0);
        out
    }

    /// Restricts a total chain supported on the sub span to sub
    /// coordinates. Returns None if the chain leaves the span.
    pub fn restrict_to_sub(&self, v: &SparseVec) -> Option<SparseVec> {
        let mut pos = vec![usize::MAX; self.total.dim()];
        for (s, &g) in self.sub_indices.iter().enumerate() {
            pos[g] = s;
        }
        let mut out: SparseVec = Vec::new();
        for (g, c) in v {
            if pos[*g] == usize::MAX {
                return None;
            }
            out.push((pos[*g], c.clone()));
        }
        out.sort_by_key(|e| e.0);
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ComplexViolation;

    #[test]
    fn verify_accepts_zero_and_reports_witnesses() {
        let zero = GradedComplex::new(
            vec![Label::atom("a"), Label::atom("b")],
            vec![1, 0],
            0,
            IntMatrix::zero(2, 2),
        )
        .unwrap();
        zero.verify().unwrap();

        // d(a) = b, d(b) = c: the square fails at a
        let chain = GradedComplex::new(
            vec![Label::atom("a"), Label::atom("b"), Label::atom("c")],
            vec![2, 1, 0],
            0,
            IntMatrix::from_entries(3, 3, &[(1, 0, 1), (2, 1, 1)]),
        )
        .unwrap();
        match chain.verify() {
            Err(ComplexViolation::NotSquareZero { witness }) => {
                assert_eq!(witness, Label::atom("a"));
            }
            other => panic!("expected a square-zero violation, got {other:?}"),
        }

        // an entry that does not lower the grading by 1
        let skew = GradedComplex::new(
            vec![Label::atom("a"), Label::atom("b")],
            vec![2, 0],
            0,
            IntMatrix::from_entries(2, 2, &[(1, 0, 1)]),
        )
        .unwrap();
        assert!(matches!(
            skew.verify(),
            Err(ComplexViolation::WrongDegree { .. })
        ));
    }

    #[test]
    fn endo_validation_checks_degree_and_commutation() {
        // d(a) = b on three cells a(2), b(1), c(0)
        let c = GradedComplex::new(
            vec![Label::atom("a"), Label::atom("b"), Label::atom("c")],
            vec![2, 1, 0],
            0,
            IntMatrix::from_entries(3, 3, &[(1, 0, 1)]),
        )
        .unwrap();
        // eps: a -> b, b -> c has degree -1 but eps d + d eps sends a to c
        let eps = GradedEndo {
            matrix: IntMatrix::from_entries(3, 3, &[(1, 0, 1), (2, 1, 1)]),
            degree: -1,
            commutation: Commutation::AntiCommutes,
        };
        assert!(matches!(
            eps.validate(&c),
            Err(ComplexViolation::EndoCommutation { .. })
        ));
        let zero = GradedEndo {
            matrix: IntMatrix::zero(3, 3),
            degree: -1,
            commutation: Commutation::AntiCommutes,
        };
        zero.validate(&c).unwrap();
        let wrong_degree = GradedEndo {
            matrix: IntMatrix::from_entries(3, 3, &[(1, 0, 1)]),
            degree: -2,
            commutation: Commutation::Commutes,
        };
        assert!(matches!(
            wrong_degree.validate(&c),
            Err(ComplexViolation::EndoDegree { .. })
        ));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Commutation {
    Commutes,
    AntiCommutes,
}

/// A graded endomorphism with a declared degree and commutation rule
/// against the differential.
#[derive(Debug, Clone)]
pub struct GradedEndo {
    pub matrix: IntMatrix,
    pub degree: i64,
    pub commutation: Commutation,
}

impl GradedEndo {
    pub fn validate(&self, c: &GradedComplex) -> Result<(), ComplexViolation> {
        let p = c.p() as i64;
        for j in 0..c.dim() {
            for (r, _) in self.matrix.column(j) {
                let drop = c.lift(j) - c.lift(*r);
                let ok = if p == 0 {
                    drop == -self.degree
                } else {
                    (drop + self.degree).rem_euclid(p) == 0
                };
                if !ok {
                    return Err(ComplexViolation::EndoDegree {
                        from: c.label(j).clone(),
                        to: c.label(*r).clone(),
                    });
                }
            }
        }
        let md = self.matrix.mul(c.differential()).unwrap();
        let dm = c.differential().mul(&self.matrix).unwrap();
        let resid = match self.commutation {
            Commutation::Commutes => md.sub(&dm).unwrap(),
            Commutation::AntiCommutes => md.add(&dm).unwrap(),
        };
        if !resid.is_zero() {
            let j = (0..resid.cols())
                .find(|&j| !resid.column(j).is_empty())
                .unwrap();
            return Err(ComplexViolation::EndoCommutation {
                witness: c.label(j).clone(),
            });
        }
        Ok(())
    }
}
