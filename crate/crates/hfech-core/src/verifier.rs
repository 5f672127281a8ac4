//! Machine checks of the structural statements: the direct-limit
//! homology of the handle complex, the commutative ladder of long exact
//! sequences with its collapse-induced vertical isomorphisms, the exact
//! collapse of every handle factor, and the module-structure
//! intertwining.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::{field_homology_pair, ClassVector, FinAbGroup, IntMatrix, SparseVec};
use crate::complex::{
    connecting_map, induced_between, les_gradings, long_exact_sequence_precomputed, morse_reduce,
    ses_homology, Commutation, ComplexHomology, GradedComplex, GradedEndo, LesRow, MorseReduction,
    Ses, SesHomology,
};
use crate::ech::{self, EchTruncation};
use crate::hf::{translation_matrix, HfData};
use crate::label::Label;
use crate::ocomplex::{self, DStarVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotStabilized,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
            Verdict::NotStabilized => write!(f, "not-stabilized"),
        }
    }
}

/// One row of a per-grading group table in a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRow {
    pub row: String,
    pub grading: i64,
    pub group: FinAbGroup,
}

/// The outcome of one verification, with enough recorded data to
/// reproduce it and to compare reruns at enlarged budgets.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub statement: String,
    pub verdict: Verdict,
    pub params: Vec<(String, String)>,
    pub evidence: Vec<String>,
    /// Stable-range group tables (empty when the grading is cyclic).
    pub groups: Vec<GroupRow>,
    pub failure: Option<String>,
}

impl VerificationReport {
    fn new(statement: &str) -> Self {
        VerificationReport {
            statement: statement.to_string(),
            verdict: Verdict::Pass,
            params: Vec::new(),
            evidence: Vec::new(),
            groups: Vec::new(),
            failure: None,
        }
    }

    fn param(&mut self, k: &str, v: impl fmt::Display) {
        self.params.push((k.to_string(), v.to_string()));
    }

    fn note(&mut self, line: impl Into<String>) {
        self.evidence.push(line.into());
    }

    fn fail(mut self, why: impl Into<String>) -> Self {
        self.verdict = Verdict::Fail;
        self.failure = Some(why.into());
        self
    }

    fn not_stabilized(mut self, why: impl Into<String>) -> Self {
        self.verdict = Verdict::NotStabilized;
        self.failure = Some(why.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Finite-model budgets for the ladder checks: the handle block window
/// [block_lo, block_hi] and the translation window [i_min, i_max].
#[derive(Debug, Clone, Copy)]
pub struct Budgets {
    pub block_lo: i64,
    pub block_hi: i64,
    pub i_min: i64,
    pub i_max: i64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            block_lo: -1,
            block_hi: 1,
            i_min: -3,
            i_max: 3,
        }
    }
}

impl Budgets {
    /// Enlarges the handle window by two in diameter and the translation
    /// window by two on each side.
    pub fn enlarged(&self) -> Budgets {
        Budgets {
            block_lo: self.block_lo - 1,
            block_hi: self.block_hi + 1,
            i_min: self.i_min - 2,
            i_max: self.i_max + 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    Z,
    Q,
    Fp(u64),
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Z => write!(f, "z"),
            Coefficients::Q => write!(f, "q"),
            Coefficients::Fp(p) => write!(f, "f{p}"),
        }
    }
}

fn class_matches_up_to_sign(a: &ClassVector, b: &ClassVector, torsion: &[BigInt]) -> bool {
    if a == b {
        return true;
    }
    let neg_free: Vec<BigInt> = b.free.iter().map(|v| -v).collect();
    let neg_tors: Vec<BigInt> = b
        .torsion
        .iter()
        .zip(torsion)
        .map(|(v, t)| (((-v) % t) + t) % t)
        .collect();
    a.free == neg_free && a.torsion == neg_tors
}

/// Checks that the direct-limit homology of the handle complex is Z + Z
/// in gradings 0 and 1, generated by (0,0) and (0,+1)-(1,-1) up to sign
/// and boundary, with nothing in grading 2.
pub fn check_lemma25(l_max: u32) -> VerificationReport {
    check_lemma25_with(l_max, DStarVariant::Canonical)
}

pub fn check_lemma25_with(l_max: u32, variant: DStarVariant) -> VerificationReport {
    let mut rep = VerificationReport::new("lemma25");
    rep.param("Lmax", l_max);
    rep.param("dstar_variant", format!("{variant:?}"));
    if l_max < 6 {
        return rep.not_stabilized(format!(
            "window budget {l_max} cannot stabilize the tower; use at least 6"
        ));
    }

    // the differential of every window must square to zero before any
    // homology can be trusted
    for l in 1..=l_max {
        let w = ocomplex::window_with(l, variant);
        if let Err(v) = w.verify() {
            return rep.fail(format!("window {l} is not a complex: {v}"));
        }
    }

    let limit = match ocomplex::limit_homology_with(l_max, variant) {
        Ok(l) => l,
        Err(e) => return rep.not_stabilized(e.to_string()),
    };
    rep.note(format!(
        "image tower constant from window {}",
        limit.stabilized_at
    ));

    let expect: BTreeMap<i64, usize> = [(0, 1), (1, 1), (2, 0)].into();
    for (d, rank) in &expect {
        let got = limit
            .groups
            .get(d)
            .cloned()
            .unwrap_or_else(FinAbGroup::zero);
        if got.free_rank != *rank || !got.torsion.is_empty() {
            return rep.fail(format!(
                "grading {d}: limit group is {got}, expected free rank {rank}"
            ));
        }
        rep.groups.push(GroupRow {
            row: "limit".into(),
            grading: *d,
            group: got.clone(),
        });
    }

    let top = &limit.top;
    let top_h = &limit.top_homology;
    let expected0 = top
        .chain(&[(Label::handle(0, ocomplex::OSym::Zero), 1)])
        .unwrap();
    let expected1 = top
        .chain(&[
            (Label::handle(0, ocomplex::OSym::Plus), 1),
            (Label::handle(1, ocomplex::OSym::Minus), -1),
        ])
        .unwrap();
    for (d, expected) in [(0i64, expected0), (1i64, expected1)] {
        let reps = &limit.generators[&d];
        if reps.len() != 1 {
            return rep.fail(format!(
                "grading {d}: expected one limit generator, found {}",
                reps.len()
            ));
        }
        let got = match top_h.class_of(d, &reps[0]) {
            Ok(c) => c,
            Err(e) => return rep.fail(format!("grading {d}: representative is not a cycle: {e}")),
        };
        let want = match top_h.class_of(d, &expected) {
            Ok(c) => c,
            Err(e) => return rep.fail(format!("grading {d}: expected chain is not a cycle: {e}")),
        };
        if !class_matches_up_to_sign(&got, &want, &top_h.group(d).torsion) {
            return rep.fail(format!(
                "grading {d}: generator {} is not homologous to the expected chain up to sign",
                top.chain_to_string(&reps[0])
            ));
        }
        rep.note(format!(
            "grading {d} generator: {}",
            top.chain_to_string(&reps[0])
        ));
    }
    rep
}

/// Everything the ladder machinery needs for one side of the diagram.
struct LadderSide {
    ses: Ses,
    hom: SesHomology,
    row: LesRow,
}

fn build_side(c: &GradedComplex, gradings: &[i64]) -> Result<LadderSide, String> {
    let ses = c
        .sub_quotient(|l| l.translation_index().map(|i| i <= -1).unwrap_or(false))
        .map_err(|e| format!("flavor cut failed: {e}"))?;
    ses.verify()
        .map_err(|e| format!("flavor cut is not exact: {e}"))?;
    let mut keys = gradings.to_vec();
    if c.p() == 0 {
        if let Some(&lo) = gradings.last() {
            keys.push(lo - 1);
        }
    }
    let hom = ses_homology(&ses, Some(&keys)).map_err(|e| format!("homology failed: {e}"))?;
    let row = long_exact_sequence_precomputed(&ses, &hom, gradings)
        .map_err(|e| format!("row construction failed: {e}"))?;
    Ok(LadderSide { ses, hom, row })
}

/// The collapse of the block model: the reduction, the independently
/// built bottom complex, and the identification between them.
struct Collapse {
    trunc: EchTruncation,
    reduction: MorseReduction,
    bottom: GradedComplex,
    /// Sends reduced basis indices to bottom basis indices.
    reduced_to_bottom: Vec<usize>,
}

fn build_collapse(
    hf: &HfData,
    g: u32,
    budgets: Budgets,
    variant: DStarVariant,
) -> Result<Collapse, String> {
    let trunc = ech::build_ech_block_with(
        hf,
        g,
        budgets.block_lo,
        budgets.block_hi,
        budgets.i_min,
        budgets.i_max,
        variant,
    );
    trunc
        .complex
        .verify()
        .map_err(|e| format!("assembled complex fails verification: {e}"))?;
    let matching = ech::block_collapse_matching(&trunc, budgets.block_lo, budgets.block_hi);
    let reduction =
        morse_reduce(&trunc.complex, &matching).map_err(|e| format!("collapse failed: {e}"))?;

    let hfw = hf.window(budgets.i_min, budgets.i_max);
    let vhat = ocomplex::vhat(budgets.block_lo);
    let mut bottom = hfw;
    for _ in 0..g {
        bottom = bottom
            .tensor(&vhat)
            .map_err(|e| format!("bottom tensor failed: {e}"))?;
    }
    if bottom.dim() != reduction.reduced.dim() {
        return Err(format!(
            "collapse left {} cells, expected {}",
            reduction.reduced.dim(),
            bottom.dim()
        ));
    }
    let mut reduced_to_bottom = Vec::with_capacity(bottom.dim());
    for j in 0..reduction.reduced.dim() {
        let lab = reduction.reduced.label(j);
        let Some(b) = bottom.index_of(lab) else {
            return Err(format!("critical cell {lab} is not a bottom basis label"));
        };
        reduced_to_bottom.push(b);
    }
    Ok(Collapse {
        trunc,
        reduction,
        bottom,
        reduced_to_bottom,
    })
}

impl Collapse {
    /// The projection re-indexed to land in the bottom complex.
    fn vertical(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.bottom.dim(), self.trunc.complex.dim());
        for e in 0..self.trunc.complex.dim() {
            let mut col: SparseVec = self
                .reduction
                .project
                .column(e)
                .iter()
                .map(|(r, v)| (self.reduced_to_bottom[*r], v.clone()))
                .collect();
            col.sort_by_key(|x| x.0);
            m.set_column(e, col);
        }
        m
    }

    /// Compares the transferred differential with the bottom
    /// differential entry by entry; returns the first discrepancy.
    fn differential_discrepancy(&self) -> Option<String> {
        for j in 0..self.reduction.reduced.dim() {
            let jb = self.reduced_to_bottom[j];
            let mut got: Vec<(usize, BigInt)> = self
                .reduction
                .reduced
                .differential()
                .column(j)
                .iter()
                .map(|(r, v)| (self.reduced_to_bottom[*r], v.clone()))
                .collect();
            got.sort_by_key(|e| e.0);
            let want = self.bottom.differential().column(jb);
            if &got != want {
                let render = |v: &[(usize, BigInt)]| {
                    let parts: Vec<String> = v
                        .iter()
                        .map(|(r, c)| format!("{c}*{}", self.bottom.label(*r)))
                        .collect();
                    if parts.is_empty() {
                        "0".to_string()
                    } else {
                        parts.join(" + ")
                    }
                };
                return Some(format!(
                    "differential differs at {}: transferred {}, expected {}",
                    self.reduction.reduced.label(j),
                    render(&got),
                    render(want)
                ));
            }
        }
        None
    }
}

/// A grading range on which the windowed model provably agrees with any
/// enlargement: gradings touching cells near the truncation edges are
/// excluded. None for cyclic gradings.
fn stable_grading_range(hf: &HfData, g: u32, budgets: Budgets) -> Option<(i64, i64)> {
    if hf.p() != 0 {
        return None;
    }
    let maxlift = hf.grading().iter().copied().max().unwrap_or(0);
    let minlift = hf.grading().iter().copied().min().unwrap_or(0);
    let e = hf.max_exponent() as i64;
    let lo = 2 * (budgets.i_min + e + 1) + maxlift + 2 * g as i64;
    let hi = 2 * budgets.i_max + minlift - 1;
    (lo <= hi).then_some((lo, hi))
}

/// Checks the commutative ladder: both long exact rows, the
/// square-commutativity on homology, the collapse-induced vertical
/// isomorphisms per grading, and the intertwining of the translation and
/// h1 actions.
pub fn check_thm24(
    hf: &HfData,
    g: u32,
    coefficients: Coefficients,
    budgets: Budgets,
) -> VerificationReport {
    let mut rep = VerificationReport::new("thm24");
    rep.param("g", g);
    rep.param(
        "block",
        format!("{}..{}", budgets.block_lo, budgets.block_hi),
    );
    rep.param("window", format!("{}..{}", budgets.i_min, budgets.i_max));
    rep.param("coefficients", coefficients);
    if let Err(v) = hf.validate() {
        return rep.fail(format!("input is invalid: {v}"));
    }

    let collapse = match build_collapse(hf, g, budgets, DStarVariant::Canonical) {
        Ok(c) => c,
        Err(e) => return rep.fail(e),
    };
    if let Some(d) = collapse.differential_discrepancy() {
        return rep.fail(format!("collapse does not realize the bottom row: {d}"));
    }

    let top_c = &collapse.trunc.complex;
    let bottom_c = &collapse.bottom;
    let vertical = collapse.vertical();

    let vd = vertical.mul(top_c.differential()).unwrap();
    let dv = bottom_c.differential().mul(&vertical).unwrap();
    if vd != dv {
        return rep.fail("vertical map is not a chain map".to_string());
    }

    let gradings = {
        let tmp = top_c.sub_quotient(|l| l.translation_index().map(|i| i <= -1).unwrap_or(false));
        match tmp {
            Ok(s) => les_gradings(&s, None),
            Err(e) => return rep.fail(format!("flavor cut failed: {e}")),
        }
    };

    let top = match build_side(top_c, &gradings) {
        Ok(s) => s,
        Err(e) => return rep.fail(format!("top row: {e}")),
    };
    let bottom = match build_side(bottom_c, &gradings) {
        Ok(s) => s,
        Err(e) => return rep.fail(format!("bottom row: {e}")),
    };

    // (a) both rows exact
    if let Err(e) = top.row.verify_exactness() {
        return rep.fail(format!("top row: {e}"));
    }
    if let Err(e) = bottom.row.verify_exactness() {
        return rep.fail(format!("bottom row: {e}"));
    }
    rep.note(format!(
        "both rows exact over {} gradings ({} nodes each)",
        gradings.len(),
        top.row.nodes.len()
    ));

    // chain-level vertical maps on the sub and quotient pieces
    let v_sub = vertical.submatrix(&bottom.ses.sub_indices, &top.ses.sub_indices);
    let v_quot = vertical.submatrix(&bottom.ses.quot_indices, &top.ses.quot_indices);
    {
        let lhs = vertical.mul(&top.ses.inclusion).unwrap();
        let rhs = bottom.ses.inclusion.mul(&v_sub).unwrap();
        if lhs != rhs {
            return rep.fail("vertical map does not commute with the inclusions".to_string());
        }
        let lhs = v_quot.mul(&top.ses.projection).unwrap();
        let rhs = bottom.ses.projection.mul(&vertical).unwrap();
        if lhs != rhs {
            return rep.fail("vertical map does not commute with the projections".to_string());
        }
    }

    // (b) squares commute on homology; (c) vertical isomorphisms
    let mut squares = 0usize;
    let mut isos = 0usize;
    for &d in &gradings {
        let mut verticals = Vec::new();
        for (th, bh, vm, name) in [
            (&top.hom.sub, &bottom.hom.sub, &v_sub, "sub"),
            (&top.hom.total, &bottom.hom.total, &vertical, "total"),
            (&top.hom.quotient, &bottom.hom.quotient, &v_quot, "quot"),
        ] {
            let ind = match induced_between(vm, 0, d, th, bh) {
                Ok(m) => m,
                Err(e) => return rep.fail(format!("vertical map on {name} at grading {d}: {e}")),
            };
            if !ind.is_isomorphism() {
                return rep.fail(format!(
                    "vertical map on {name} at grading {d} is not an isomorphism ({} vs {})",
                    ind.source, ind.target
                ));
            }
            isos += 1;
            verticals.push(ind);
        }
        let ti = match induced_between(&top.ses.inclusion, 0, d, &top.hom.sub, &top.hom.total) {
            Ok(m) => m,
            Err(e) => return rep.fail(format!("top inclusion at {d}: {e}")),
        };
        let bi = match induced_between(
            &bottom.ses.inclusion,
            0,
            d,
            &bottom.hom.sub,
            &bottom.hom.total,
        ) {
            Ok(m) => m,
            Err(e) => return rep.fail(format!("bottom inclusion at {d}: {e}")),
        };
        if !bi
            .compose(&verticals[0])
            .unwrap()
            .same_map(&verticals[1].compose(&ti).unwrap())
        {
            return rep.fail(format!("inclusion square does not commute at grading {d}"));
        }
        squares += 1;
        let tp = match induced_between(&top.ses.projection, 0, d, &top.hom.total, &top.hom.quotient)
        {
            Ok(m) => m,
            Err(e) => return rep.fail(format!("top projection at {d}: {e}")),
        };
        let bp = match induced_between(
            &bottom.ses.projection,
            0,
            d,
            &bottom.hom.total,
            &bottom.hom.quotient,
        ) {
            Ok(m) => m,
            Err(e) => return rep.fail(format!("bottom projection at {d}: {e}")),
        };
        if !bp
            .compose(&verticals[1])
            .unwrap()
            .same_map(&verticals[2].compose(&tp).unwrap())
        {
            return rep.fail(format!("projection square does not commute at grading {d}"));
        }
        squares += 1;
        let d1 = top_c.grading_key_of_lift(d - 1);
        let tconn = match connecting_map(&top.ses, &top.hom, d) {
            Ok(m) => m,
            Err(e) => return rep.fail(format!("top connecting map at {d}: {e}")),
        };
        let bconn = match connecting_map(&bottom.ses, &bottom.hom, d) {
            Ok(m) => m,
            Err(e) => return rep.fail(format!("bottom connecting map at {d}: {e}")),
        };
        let v_sub_low = match induced_between(&v_sub, 0, d1, &top.hom.sub, &bottom.hom.sub) {
            Ok(m) => m,
            Err(e) => return rep.fail(format!("vertical sub map at {d1}: {e}")),
        };
        if !bconn
            .compose(&verticals[2])
            .unwrap()
            .same_map(&v_sub_low.compose(&tconn).unwrap())
        {
            return rep.fail(format!("connecting square does not commute at grading {d}"));
        }
        squares += 1;
    }
    rep.note(format!(
        "{squares} squares commute, {isos} vertical isomorphisms"
    ));

    // (d)/(e) translation and h1 intertwining, exact at chain level
    let t_top = translation_matrix(top_c);
    let u_top = ech::t_action(&collapse.trunc);
    if t_top != u_top {
        return rep.fail("the two translation constructions disagree".to_string());
    }
    let u_bottom = translation_matrix(bottom_c);
    if vertical.mul(&t_top).unwrap() != u_bottom.mul(&vertical).unwrap() {
        return rep.fail("translation action is not intertwined".to_string());
    }
    rep.note("translation action intertwined at chain level");

    for k in 0..hf.h1_count() {
        let e_top = ech_h1_matrix(hf, k, top_c);
        let e_bottom = ech_h1_matrix(hf, k, bottom_c);
        let anti = e_top
            .mul(top_c.differential())
            .unwrap()
            .add(&top_c.differential().mul(&e_top).unwrap())
            .unwrap();
        if !anti.is_zero() {
            return rep.fail(format!("h1 action {k} does not anti-commute upstairs"));
        }
        if vertical.mul(&e_top).unwrap() != e_bottom.mul(&vertical).unwrap() {
            return rep.fail(format!("h1 action {k} is not intertwined"));
        }
    }
    if hf.h1_count() > 0 {
        rep.note(format!(
            "{} h1 actions intertwined at chain level",
            hf.h1_count()
        ));
    }

    // field-coefficient consistency layer
    if coefficients != Coefficients::Z {
        let characteristic = match coefficients {
            Coefficients::Fp(p) => p,
            _ => 0,
        };
        for &d in &gradings {
            for (c, h, name) in [
                (&top.ses.total, &top.hom.total, "top total"),
                (&bottom.ses.total, &bottom.hom.total, "bottom total"),
            ] {
                let dim = match field_dim(c, d, characteristic) {
                    Ok(v) => v,
                    Err(e) => return rep.fail(format!("field rank at {d} ({name}): {e}")),
                };
                let zg = h.group(d);
                let d1 = c.grading_key_of_lift(d - 1);
                let zg1 = h.group(d1);
                let count = |grp: &FinAbGroup| {
                    if characteristic == 0 {
                        0
                    } else {
                        grp.torsion
                            .iter()
                            .filter(|t| (*t % BigInt::from(characteristic)).is_zero())
                            .count()
                    }
                };
                let expected = zg.free_rank + count(zg) + count(zg1);
                if dim != expected {
                    return rep.fail(format!(
                        "universal coefficients mismatch at grading {d} ({name}): \
                         field dim {dim}, integer data predicts {expected}"
                    ));
                }
            }
        }
        rep.note(format!(
            "field dims over {coefficients} agree with the integer groups"
        ));
    }

    // stable-range group tables for rerun comparisons
    if let Some((lo, hi)) = stable_grading_range(hf, g, budgets) {
        for d in lo..=hi {
            for (h, name) in [(&top.hom, "ech"), (&bottom.hom, "bottom")] {
                for (ch, slot) in [(&h.sub, "minus"), (&h.total, "inf"), (&h.quotient, "plus")] {
                    rep.groups.push(GroupRow {
                        row: format!("{name}.{slot}"),
                        grading: d,
                        group: ch.group(d).clone(),
                    });
                }
            }
        }
        rep.param("stable_range", format!("{lo}..{hi}"));
    }

    rep
}

fn field_dim(c: &GradedComplex, d: i64, characteristic: u64) -> Result<usize, String> {
    let mid = c.indices_at(d);
    let up = c.indices_at(c.key_shift(d, 1));
    let down = c.indices_at(c.key_shift(d, -1));
    let d_in = c.differential().submatrix(&mid, &up);
    let d_out = c.differential().submatrix(&down, &mid);
    field_homology_pair(&d_in, &d_out, characteristic).map_err(|e| e.to_string())
}

/// An h1 action extended through the input factor of an assembled
/// complex: the handles are untouched, and no sign appears because the
/// input factor is leftmost.
fn ech_h1_matrix(hf: &HfData, action: usize, c: &GradedComplex) -> IntMatrix {
    let terms = hf.h1_terms(action);
    let mut m = IntMatrix::zero(c.dim(), c.dim());
    for j in 0..c.dim() {
        let mut factors = c.label(j).factors();
        let first = factors.remove(0);
        let Label::Indexed(name, i) = first else {
            panic!("assembled labels start with an indexed factor")
        };
        let mut col: SparseVec = Vec::new();
        for (from, to, k, coeff) in &terms {
            if from != name {
                continue;
            }
            let ti = i - *k as i64;
            let mut target = Label::indexed(to, ti);
            for f in &factors {
                target = Label::pair(target, (*f).clone());
            }
            if let Some(r) = c.index_of(&target) {
                col.push((r, coeff.clone()));
            }
        }
        col.sort_by_key(|e| e.0);
        m.set_column(j, col);
    }
    m
}

/// Checks that cancelling every handle factor transfers the differential
/// onto exactly the input differential tensor identity, after the
/// recorded basis change.
pub fn check_collapse(hf: &HfData, g: u32, budgets: Budgets) -> VerificationReport {
    check_collapse_with(hf, g, budgets, DStarVariant::Canonical)
}

pub fn check_collapse_with(
    hf: &HfData,
    g: u32,
    budgets: Budgets,
    variant: DStarVariant,
) -> VerificationReport {
    let mut rep = VerificationReport::new("collapse");
    rep.param("g", g);
    rep.param(
        "block",
        format!("{}..{}", budgets.block_lo, budgets.block_hi),
    );
    rep.param("window", format!("{}..{}", budgets.i_min, budgets.i_max));
    rep.param("dstar_variant", format!("{variant:?}"));
    if let Err(v) = hf.validate() {
        return rep.fail(format!("input is invalid: {v}"));
    }
    let collapse = match build_collapse(hf, g, budgets, variant) {
        Ok(c) => c,
        Err(e) => return rep.fail(e),
    };
    let pi = collapse
        .reduction
        .project
        .mul(&collapse.reduction.include)
        .unwrap();
    if pi != IntMatrix::identity(collapse.reduction.reduced.dim()) {
        return rep.fail("basis change does not split the reduction".to_string());
    }
    if let Some(d) = collapse.differential_discrepancy() {
        return rep.fail(d);
    }
    rep.note(format!(
        "transferred differential equals the input differential tensor identity on {} cells",
        collapse.reduction.reduced.dim()
    ));
    rep
}

/// Checks the module structure on the block model: the translation
/// action has degree -2, commutes, and corresponds to the input
/// translation tensor identity under the collapse; each h1 action has
/// degree -1, anti-commutes, acts only through the input factor,
/// commutes with translation, corresponds under the collapse, and
/// squares to zero on homology.
pub fn check_module_structure(hf: &HfData, g: u32, budgets: Budgets) -> VerificationReport {
    let mut rep = VerificationReport::new("modules");
    rep.param("g", g);
    rep.param(
        "block",
        format!("{}..{}", budgets.block_lo, budgets.block_hi),
    );
    rep.param("window", format!("{}..{}", budgets.i_min, budgets.i_max));
    rep.param("h1_actions", hf.h1_count());
    if let Err(v) = hf.validate() {
        return rep.fail(format!("input is invalid: {v}"));
    }
    let collapse = match build_collapse(hf, g, budgets, DStarVariant::Canonical) {
        Ok(c) => c,
        Err(e) => return rep.fail(e),
    };
    if let Some(d) = collapse.differential_discrepancy() {
        return rep.fail(format!("collapse does not realize the bottom: {d}"));
    }
    let top_c = &collapse.trunc.complex;
    let bottom_c = &collapse.bottom;
    let vertical = collapse.vertical();

    let t_top = ech::t_action(&collapse.trunc);
    let u_bottom = translation_matrix(bottom_c);
    let endo = GradedEndo {
        matrix: t_top.clone(),
        degree: -2,
        commutation: Commutation::Commutes,
    };
    if let Err(v) = endo.validate(top_c) {
        return rep.fail(format!("translation action: {v}"));
    }
    if vertical.mul(&t_top).unwrap() != u_bottom.mul(&vertical).unwrap() {
        return rep.fail("translation does not correspond under the collapse".to_string());
    }
    rep.note("translation action has degree -2, commutes, and corresponds under the collapse");

    let hom = if hf.h1_count() > 0 {
        match ComplexHomology::compute(top_c) {
            Ok(h) => Some(h),
            Err(e) => return rep.fail(format!("homology failed: {e}")),
        }
    } else {
        None
    };

    for k in 0..hf.h1_count() {
        let e_top = ech_h1_matrix(hf, k, top_c);
        let e_bottom = ech_h1_matrix(hf, k, bottom_c);
        let endo = GradedEndo {
            matrix: e_top.clone(),
            degree: -1,
            commutation: Commutation::AntiCommutes,
        };
        if let Err(v) = endo.validate(top_c) {
            return rep.fail(format!("h1 action {k}: {v}"));
        }
        for j in 0..top_c.dim() {
            let from = ech::EchGenerator::from_label(top_c.label(j)).unwrap();
            for (r, _) in e_top.column(j) {
                let to = ech::EchGenerator::from_label(top_c.label(*r)).unwrap();
                if from.handles != to.handles {
                    return rep.fail(format!(
                        "h1 action {k} moves a handle factor at {}",
                        top_c.label(j)
                    ));
                }
            }
        }
        if t_top.mul(&e_top).unwrap() != e_top.mul(&t_top).unwrap() {
            return rep.fail(format!("h1 action {k} does not commute with translation"));
        }
        if vertical.mul(&e_top).unwrap() != e_bottom.mul(&vertical).unwrap() {
            return rep.fail(format!(
                "h1 action {k} does not correspond under the collapse"
            ));
        }
        let hom = hom.as_ref().unwrap();
        for d in top_c.grading_keys() {
            let down = top_c.grading_key_of_lift(d - 1);
            let first = match induced_between(&e_top, -1, d, hom, hom) {
                Ok(m) => m,
                Err(e) => return rep.fail(format!("h1 induced map at {d}: {e}")),
            };
            let second = match induced_between(&e_top, -1, down, hom, hom) {
                Ok(m) => m,
                Err(e) => return rep.fail(format!("h1 induced map at {down}: {e}")),
            };
            let square = second.compose(&first).unwrap();
            let zero = crate::algebra::InducedMap {
                matrix: IntMatrix::zero(square.target.coord_dim(), square.source.coord_dim()),
                source: square.source.clone(),
                target: square.target.clone(),
            };
            if !square.same_map(&zero) {
                return rep.fail(format!(
                    "h1 action {k} does not square to zero on homology at grading {d}"
                ));
            }
        }
        rep.note(format!(
            "h1 action {k}: degree -1, anti-commutes, input-factor only, squares to zero on homology"
        ));
    }
    rep
}
