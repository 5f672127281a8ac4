//! The input data model: a finite generator set with a relative Z/pZ
//! grading and a translation-equivariant, filtration-preserving
//! differential whose entries are polynomials in one translation symbol
//! T. T shifts the integer coordinate by -1 and carries grading -2, so a
//! T^k entry from x to y needs grading(x) - grading(y) + 2k = 1 (mod p).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::{IntMatrix, SparseVec};
use crate::complex::{ComplexError, GradedComplex, Ses};
use crate::label::Label;
use thiserror::Error;

/// A polynomial in T with nonnegative exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TPoly(BTreeMap<u32, BigInt>);

impl TPoly {
    pub fn add_term(&mut self, power: u32, coeff: BigInt) {
        let e = self.0.entry(power).or_insert_with(BigInt::zero);
        *e += coeff;
        if e.is_zero() {
            self.0.remove(&power);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigInt)> {
        self.0.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_exponent(&self) -> u32 {
        self.0.keys().next_back().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Error)]
pub enum HfError {
    #[error("duplicate generator name {0}")]
    DuplicateName(String),
    #[error("unknown generator name {0}")]
    UnknownName(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("no h1 action with index {0}")]
    NoSuchAction(usize),
}

/// A violation found by `validate`, with a witness.
#[derive(Debug, Clone, Error)]
pub enum HfViolation {
    #[error("entry {from} -> {to} (T^{power}) does not have degree -1")]
    WrongDegree {
        from: String,
        to: String,
        power: u32,
    },
    #[error("differential does not square to zero; witness {witness}")]
    NotSquareZero { witness: String },
    #[error("h1 action {action} entry {from} -> {to} (T^{power}) does not have degree -1")]
    H1Degree {
        action: usize,
        from: String,
        to: String,
        power: u32,
    },
    #[error("h1 action {action} does not anti-commute with the differential; witness {witness}")]
    H1Commutation { action: usize, witness: String },
}

type PolyColumns = Vec<BTreeMap<usize, TPoly>>;

/// The chain data: generators, grading modulus p (0 for a Z-grading),
/// grading lifts, the differential, and optional degree -1 actions that
/// anti-commute with it.
#[derive(Debug, Clone)]
pub struct HfData {
    names: Vec<String>,
    p: u32,
    grading: Vec<i64>,
    diff: PolyColumns,
    h1: Vec<PolyColumns>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Infinity,
    Minus,
    Plus,
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Flavor::Infinity => write!(f, "inf"),
            Flavor::Minus => write!(f, "minus"),
            Flavor::Plus => write!(f, "plus"),
        }
    }
}

impl HfData {
    pub fn new(names: Vec<String>, p: u32, grading: Vec<i64>) -> Result<HfData, HfError> {
        if !p.is_multiple_of(2) {
            return Err(HfError::Shape(format!("grading modulus {p} is odd")));
        }
        if names.len() != grading.len() {
            return Err(HfError::Shape(format!(
                "{} names vs {} gradings",
                names.len(),
                grading.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for n in &names {
            if !seen.insert(n.clone()) {
                return Err(HfError::DuplicateName(n.clone()));
            }
        }
        let n = names.len();
        Ok(HfData {
            names,
            p,
            grading,
            diff: vec![BTreeMap::new(); n],
            h1: Vec::new(),
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn grading(&self) -> &[i64] {
        &self.grading
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn add_term(
        &mut self,
        from: &str,
        to: &str,
        t_power: u32,
        coeff: i64,
    ) -> Result<(), HfError> {
        let f = self
            .index_of(from)
            .ok_or_else(|| HfError::UnknownName(from.to_string()))?;
        let t = self
            .index_of(to)
            .ok_or_else(|| HfError::UnknownName(to.to_string()))?;
        self.diff[f]
            .entry(t)
            .or_default()
            .add_term(t_power, BigInt::from(coeff));
        Ok(())
    }

    pub fn add_h1_action(&mut self) -> usize {
        self.h1.push(vec![BTreeMap::new(); self.names.len()]);
        self.h1.len() - 1
    }

    pub fn add_h1_term(
        &mut self,
        action: usize,
        from: &str,
        to: &str,
        t_power: u32,
        coeff: i64,
    ) -> Result<(), HfError> {
        if action >= self.h1.len() {
            return Err(HfError::NoSuchAction(action));
        }
        let f = self
            .index_of(from)
            .ok_or_else(|| HfError::UnknownName(from.to_string()))?;
        let t = self
            .index_of(to)
            .ok_or_else(|| HfError::UnknownName(to.to_string()))?;
        self.h1[action][f]
            .entry(t)
            .or_default()
            .add_term(t_power, BigInt::from(coeff));
        Ok(())
    }

    pub fn h1_count(&self) -> usize {
        self.h1.len()
    }

    /// All differential terms as (from, to, power, coeff), sorted.
    pub fn diff_terms(&self) -> Vec<(String, String, u32, BigInt)> {
        self.collect_terms(&self.diff)
    }

    pub fn h1_terms(&self, action: usize) -> Vec<(String, String, u32, BigInt)> {
        self.collect_terms(&self.h1[action])
    }

    fn collect_terms(&self, cols: &PolyColumns) -> Vec<(String, String, u32, BigInt)> {
        let mut out = Vec::new();
        for (f, targets) in cols.iter().enumerate() {
            for (t, poly) in targets {
                for (k, c) in poly.terms() {
                    out.push((self.names[f].clone(), self.names[*t].clone(), k, c.clone()));
                }
            }
        }
        out.sort();
        out
    }

    pub fn max_exponent(&self) -> u32 {
        let scan = |cols: &PolyColumns| {
            cols.iter()
                .flat_map(|t| t.values())
                .map(|p| p.max_exponent())
                .max()
                .unwrap_or(0)
        };
        let mut e = scan(&self.diff);
        for a in &self.h1 {
            e = e.max(scan(a));
        }
        e
    }

    fn degree_ok(&self, from: usize, to: usize, power: u32) -> bool {
        let drop = self.grading[from] - self.grading[to] + 2 * power as i64;
        if self.p == 0 {
            drop == 1
        } else {
            drop.rem_euclid(self.p as i64) == 1
        }
    }

    /// Checks every structural invariant: entry degrees, the squared
    /// differential on a window large enough to see every polynomial
    /// coefficient, and the degree and anti-commutation of each h1
    /// action.
    pub fn validate(&self) -> Result<(), HfViolation> {
        for (f, targets) in self.diff.iter().enumerate() {
            for (t, poly) in targets {
                for (k, _) in poly.terms() {
                    if !self.degree_ok(f, *t, k) {
                        return Err(HfViolation::WrongDegree {
                            from: self.names[f].clone(),
                            to: self.names[*t].clone(),
                            power: k,
                        });
                    }
                }
            }
        }
        let e = self.max_exponent() as i64;
        let w = self.window(0, 2 * e + 1);
        for j in 0..w.dim() {
            let sq = w.differential().apply(w.differential().column(j)).unwrap();
            if !sq.is_empty() {
                return Err(HfViolation::NotSquareZero {
                    witness: w.label(j).to_string(),
                });
            }
        }
        for (a, action) in self.h1.iter().enumerate() {
            for (f, targets) in action.iter().enumerate() {
                for (t, poly) in targets {
                    for (k, _) in poly.terms() {
                        if !self.degree_ok(f, *t, k) {
                            return Err(HfViolation::H1Degree {
                                action: a,
                                from: self.names[f].clone(),
                                to: self.names[*t].clone(),
                                power: k,
                            });
                        }
                    }
                }
            }
            let eps = self.expand_on_window(action, &w);
            let d = w.differential();
            let anti = eps.mul(d).unwrap().add(&d.mul(&eps).unwrap()).unwrap();
            if !anti.is_zero() {
                let j = (0..anti.cols())
                    .find(|&j| !anti.column(j).is_empty())
                    .unwrap();
                return Err(HfViolation::H1Commutation {
                    action: a,
                    witness: w.label(j).to_string(),
                });
            }
        }
        Ok(())
    }

    /// The window complex on labels (x, i) for i in [i_min, i_max].
    /// Differential terms that would leave the window at the bottom are
    /// dropped (the window is a quotient of the i <= i_max subcomplex).
    pub fn window(&self, i_min: i64, i_max: i64) -> GradedComplex {
        assert!(i_min <= i_max);
        let n = self.names.len();
        let mut labels = Vec::new();
        let mut grading = Vec::new();
        for i in i_min..=i_max {
            for x in 0..n {
                labels.push(Label::indexed(&self.names[x], i));
                grading.push(self.grading[x] + 2 * i);
            }
        }
        let dim = labels.len();
        let at = |x: usize, i: i64| -> usize { ((i - i_min) as usize) * n + x };
        let mut diff = IntMatrix::zero(dim, dim);
        for i in i_min..=i_max {
            for x in 0..n {
                let mut col: SparseVec = Vec::new();
                for (y, poly) in &self.diff[x] {
                    for (k, c) in poly.terms() {
                        let ti = i - k as i64;
                        if ti >= i_min {
                            col.push((at(*y, ti), c.clone()));
                        }
                    }
                }
                col.sort_by_key(|e| e.0);
                diff.set_column(at(x, i), col);
            }
        }
        GradedComplex::new(labels, grading, self.p, diff).expect("window construction")
    }

    /// Expands a polynomial endomorphism on a window with the same
    /// bottom-truncation rule as the differential.
    fn expand_on_window(&self, cols: &PolyColumns, w: &GradedComplex) -> IntMatrix {
        let mut m = IntMatrix::zero(w.dim(), w.dim());
        for j in 0..w.dim() {
            let Label::Indexed(name, i) = w.label(j) else {
                panic!("window labels are indexed")
            };
            let x = self.index_of(name).unwrap();
            let mut col: SparseVec = Vec::new();
            for (y, poly) in &cols[x] {
                for (k, c) in poly.terms() {
                    let target = Label::indexed(&self.names[*y], i - k as i64);
                    if let Some(r) = w.index_of(&target) {
                        col.push((r, c.clone()));
                    }
                }
            }
            col.sort_by_key(|e| e.0);
            m.set_column(j, col);
        }
        m
    }

    /// The h1 action expanded on a window.
    pub fn h1_matrix(&self, action: usize, w: &GradedComplex) -> Result<IntMatrix, HfError> {
        self.h1
            .get(action)
            .map(|a| self.expand_on_window(a, w))
            .ok_or(HfError::NoSuchAction(action))
    }

    /// The short exact sequence of the i <= -1 subcomplex inside the
    /// window (the window must straddle i = -1/0).
    pub fn flavor_ses(&self, i_min: i64, i_max: i64) -> Result<Ses, ComplexError> {
        assert!(i_min <= -1 && i_max >= 0, "window must straddle the cut");
        let w = self.window(i_min, i_max);
        w.sub_quotient(|l| l.translation_index().map(|i| i <= -1).unwrap_or(false))
    }

    /// The requested flavor of the window complex.
    pub fn flavor_complex(
        &self,
        flavor: Flavor,
        i_min: i64,
        i_max: i64,
    ) -> Result<GradedComplex, ComplexError> {
        match flavor {
            Flavor::Infinity => Ok(self.window(i_min, i_max)),
            Flavor::Minus => Ok(self.flavor_ses(i_min, i_max)?.sub),
            Flavor::Plus => Ok(self.flavor_ses(i_min, i_max)?.quotient),
        }
    }
}

/// The translation action (x, i) -> (x, i-1) on any complex whose labels
/// carry a translation coordinate, truncated at the window bottom. This
/// is a chain map for every bottom-truncated window complex.
pub fn translation_matrix(c: &GradedComplex) -> IntMatrix {
    let mut m = IntMatrix::zero(c.dim(), c.dim());
    for j in 0..c.dim() {
        let l = c.label(j);
        if let Some(i) = l.translation_index() {
            if let Some(shifted) = l.with_translation_index(i - 1) {
                if let Some(r) = c.index_of(&shifted) {
                    m.set(r, j, BigInt::from(1)).unwrap();
                }
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acyclic() -> HfData {
        let mut hf = HfData::new(vec!["x".into(), "y".into()], 0, vec![0, 1]).unwrap();
        hf.add_term("x", "y", 1, 1).unwrap();
        hf
    }

    #[test]
    fn validate_accepts_the_basic_examples() {
        let hf = HfData::new(vec!["x".into()], 0, vec![0]).unwrap();
        hf.validate().unwrap();
        acyclic().validate().unwrap();
    }

    #[test]
    fn validate_rejects_bad_degrees() {
        let mut hf = HfData::new(vec!["x".into(), "y".into()], 0, vec![0, 0]).unwrap();
        hf.add_term("x", "y", 1, 1).unwrap();
        assert!(matches!(
            hf.validate(),
            Err(HfViolation::WrongDegree { .. })
        ));
    }

    #[test]
    fn validate_rejects_nonzero_square() {
        // x -> y -> z with both arrows nonzero and gradings forced
        let mut hf =
            HfData::new(vec!["x".into(), "y".into(), "z".into()], 0, vec![2, 1, 0]).unwrap();
        hf.add_term("x", "y", 0, 1).unwrap();
        hf.add_term("y", "z", 0, 1).unwrap();
        assert!(matches!(
            hf.validate(),
            Err(HfViolation::NotSquareZero { .. })
        ));
    }

    #[test]
    fn window_counts_and_flavors() {
        let hf = HfData::new(vec!["x".into()], 0, vec![0]).unwrap();
        let ses = hf.flavor_ses(-3, 3).unwrap();
        assert_eq!(ses.total.dim(), 7);
        assert_eq!(ses.sub.dim(), 3);
        assert_eq!(ses.quotient.dim(), 4);
        ses.verify().unwrap();
        ses.total.verify().unwrap();
    }

    #[test]
    fn window_differential_truncates_at_the_bottom() {
        let hf = acyclic();
        let w = hf.window(-2, 2);
        w.verify().unwrap();
        // (x, -2) maps to (y, -3) which is below the window: dropped
        let j = w.index_of(&Label::indexed("x", -2)).unwrap();
        assert!(w.differential().column(j).is_empty());
        // interior translation commutes with the differential
        let u = translation_matrix(&w);
        let ud = u.mul(w.differential()).unwrap();
        let du = w.differential().mul(&u).unwrap();
        assert_eq!(ud, du);
    }

    #[test]
    fn u_is_a_chain_map_and_shifts_grading_by_two() {
        let hf = acyclic();
        let w = hf.window(-3, 3);
        let u = translation_matrix(&w);
        for j in 0..w.dim() {
            for (r, _) in u.column(j) {
                assert_eq!(w.lift(*r), w.lift(j) - 2);
            }
        }
        let ud = u.mul(w.differential()).unwrap();
        let du = w.differential().mul(&u).unwrap();
        assert_eq!(ud, du);
        // applied twice: (x, 2) lands on (x, 0)
        let uu = u.mul(&u).unwrap();
        let from = w.index_of(&Label::indexed("x", 2)).unwrap();
        let to = w.index_of(&Label::indexed("x", 0)).unwrap();
        assert_eq!(uu.column(from), &vec![(to, num_bigint::BigInt::from(1))]);
    }

    #[test]
    fn h1_validation() {
        // exterior doubling: u, v = u*e with eps(u) = u*e
        let mut hf = HfData::new(vec!["u".into(), "ue".into()], 0, vec![0, -1]).unwrap();
        let a = hf.add_h1_action();
        hf.add_h1_term(a, "u", "ue", 0, 1).unwrap();
        hf.validate().unwrap();
        // breaking anti-commutation: add a differential that fails to
        // anti-commute with eps
        let mut bad = HfData::new(
            vec!["u".into(), "v".into(), "ue".into(), "ve".into()],
            0,
            vec![1, 0, 0, -1],
        )
        .unwrap();
        bad.add_term("u", "v", 0, 1).unwrap();
        bad.add_term("ue", "ve", 0, 1).unwrap(); // should be -1
        let a = bad.add_h1_action();
        bad.add_h1_term(a, "u", "ue", 0, 1).unwrap();
        bad.add_h1_term(a, "v", "ve", 0, 1).unwrap();
        assert!(matches!(
            bad.validate(),
            Err(HfViolation::H1Commutation { .. })
        ));
    }
}
