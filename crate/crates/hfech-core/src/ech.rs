//! Assembly of the full complex: the input chain data tensored with g
//! handle factors, with the signed differential, translation action,
//! norm filtration, and windowed flavor homology.
//!
//! Tensor factors are ordered with the input factor leftmost and handles
//! left to right; signs iterate the two-factor rule left-associatively,
//! so the handle-p term carries the parity of everything to its left.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::algebra::{hermite_normal_form, subgroup_structure, FinAbGroup, IntMatrix, SparseVec};
use crate::complex::{induced_between, ComplexHomology, GradedComplex, Ses};
use crate::hf::{Flavor, HfData};
use crate::label::{Label, OLabel};
use crate::ocomplex::{self, DStarVariant};

/// A generator of the assembled complex: an input generator name, its
/// translation coordinate, and one handle label per factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EchGenerator {
    pub hf_name: String,
    pub i: i64,
    pub handles: Vec<OLabel>,
}

impl EchGenerator {
    /// The filtration norm: the sum over handles of |m| + 2|o|.
    pub fn l_norm(&self) -> i64 {
        self.handles.iter().map(|h| h.norm()).sum()
    }

    /// Parses a left-associated tensor label.
    pub fn from_label(l: &Label) -> Option<EchGenerator> {
        let factors = l.factors();
        let Label::Indexed(name, i) = factors.first()? else {
            return None;
        };
        let mut handles = Vec::with_capacity(factors.len() - 1);
        for f in &factors[1..] {
            let Label::Handle(h) = f else { return None };
            handles.push(*h);
        }
        Some(EchGenerator {
            hf_name: name.clone(),
            i: *i,
            handles,
        })
    }

    pub fn to_label(&self) -> Label {
        let mut l = Label::indexed(&self.hf_name, self.i);
        for h in &self.handles {
            l = Label::pair(l, Label::Handle(*h));
        }
        l
    }
}

/// A finite model of the assembled complex, cut by the handle norm
/// filtration and a translation window.
#[derive(Debug, Clone)]
pub struct EchTruncation {
    pub g: u32,
    /// The norm budget (generators satisfy l_norm < l), or None for a
    /// block-window model.
    pub l: Option<u32>,
    pub i_min: i64,
    pub i_max: i64,
    pub complex: GradedComplex,
}

struct HandleSet {
    labels: Vec<OLabel>,
    index: BTreeMap<OLabel, usize>,
}

impl HandleSet {
    fn from_complex(c: &GradedComplex) -> HandleSet {
        let labels: Vec<OLabel> = c
            .labels()
            .iter()
            .map(|l| match l {
                Label::Handle(h) => *h,
                _ => unreachable!("handle window labels"),
            })
            .collect();
        let index = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        HandleSet { labels, index }
    }
}

fn assemble(
    hf: &HfData,
    g: u32,
    handles: &HandleSet,
    norm_budget: Option<i64>,
    i_min: i64,
    i_max: i64,
    variant: DStarVariant,
) -> GradedComplex {
    assert!(g >= 1);
    let hfw = hf.window(i_min, i_max);
    let nh = handles.labels.len();

    // odometer enumeration of handle tuples, filtered by the norm budget
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    let mut cur = vec![0usize; g as usize];
    'outer: loop {
        let norm: i64 = cur.iter().map(|&t| handles.labels[t].norm()).sum();
        if norm_budget.map(|b| norm < b).unwrap_or(true) {
            tuples.push(cur.clone());
        }
        for d in (0..g as usize).rev() {
            cur[d] += 1;
            if cur[d] < nh {
                continue 'outer;
            }
            cur[d] = 0;
        }
        break;
    }

    let mut labels = Vec::with_capacity(hfw.dim() * tuples.len());
    let mut grading = Vec::with_capacity(labels.capacity());
    let mut index: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
    for a in 0..hfw.dim() {
        for t in &tuples {
            let mut lab = hfw.label(a).clone();
            let mut lift = hfw.lift(a);
            for &h in t {
                lab = Label::pair(lab, Label::Handle(handles.labels[h]));
                lift += handles.labels[h].o.weight();
            }
            index.insert((a, t.clone()), labels.len());
            labels.push(lab);
            grading.push(lift);
        }
    }

    let dim = labels.len();
    let mut diff = IntMatrix::zero(dim, dim);
    for a in 0..hfw.dim() {
        for t in &tuples {
            let j = index[&(a, t.clone())];
            let mut col: SparseVec = Vec::new();
            // input-factor part: handles unchanged
            for (b, c) in hfw.differential().column(a) {
                let r = index
                    .get(&(*b, t.clone()))
                    .expect("translation windows align");
                col.push((*r, c.clone()));
            }
            // handle parts with the iterated sign
            let mut parity = hfw.lift(a).rem_euclid(2);
            for (pfac, &h) in t.iter().enumerate() {
                let sign = if parity == 0 { 1 } else { -1 };
                for (target, c) in ocomplex::boundary_star_variant(handles.labels[h], variant) {
                    let Some(&ht) = handles.index.get(&target) else {
                        panic!(
                            "handle window is not closed under the differential: {} -> {}",
                            handles.labels[h], target
                        );
                    };
                    let mut nt = t.clone();
                    nt[pfac] = ht;
                    let Some(&r) = index.get(&(a, nt)) else {
                        panic!("norm filtration was not preserved by the differential");
                    };
                    col.push((r, BigInt::from(sign * c)));
                }
                parity = (parity + handles.labels[h].o.weight()).rem_euclid(2);
            }
            col.sort_by_key(|e| e.0);
            // merge duplicate rows (cannot happen: targets differ)
            diff.set_column(j, col);
        }
    }
    GradedComplex::new(labels, grading, hf.p(), diff).expect("assembly is well formed")
}

/// Builds the norm-truncated model: generators with l_norm < l and
/// translation coordinate in [i_min, i_max].
pub fn build_ech(hf: &HfData, g: u32, l: u32, i_min: i64, i_max: i64) -> EchTruncation {
    build_ech_with(hf, g, l, i_min, i_max, DStarVariant::Canonical)
}

pub fn build_ech_with(
    hf: &HfData,
    g: u32,
    l: u32,
    i_min: i64,
    i_max: i64,
    variant: DStarVariant,
) -> EchTruncation {
    let handles = HandleSet::from_complex(&ocomplex::window_with(l, variant));
    let complex = assemble(hf, g, &handles, Some(l as i64), i_min, i_max, variant);
    EchTruncation {
        g,
        l: Some(l),
        i_min,
        i_max,
        complex,
    }
}

/// Builds the block-window model: every handle factor ranges over the
/// differential-closed block [lo, hi], with no norm cut. This is the
/// model whose handle factors collapse onto exactly two classes each.
pub fn build_ech_block(
    hf: &HfData,
    g: u32,
    lo: i64,
    hi: i64,
    i_min: i64,
    i_max: i64,
) -> EchTruncation {
    build_ech_block_with(hf, g, lo, hi, i_min, i_max, DStarVariant::Canonical)
}

pub fn build_ech_block_with(
    hf: &HfData,
    g: u32,
    lo: i64,
    hi: i64,
    i_min: i64,
    i_max: i64,
    variant: DStarVariant,
) -> EchTruncation {
    let handles = HandleSet::from_complex(&ocomplex::block_window_with(lo, hi, variant));
    let complex = assemble(hf, g, &handles, None, i_min, i_max, variant);
    EchTruncation {
        g,
        l: None,
        i_min,
        i_max,
        complex,
    }
}

/// The translation action on the assembled complex: (x, i, handles) ->
/// (x, i-1, handles), truncated at the window bottom.
pub fn t_action(trunc: &EchTruncation) -> IntMatrix {
    crate::hf::translation_matrix(&trunc.complex)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FactorRole {
    Upper(OLabel),
    Lower,
}

/// The product matching that cancels each handle factor onto its two
/// critical labels, leaving the input factor untouched: each generator
/// is matched through its leftmost non-critical handle. Critical cells
/// are exactly the generators whose handles are all critical.
pub fn block_collapse_matching(trunc: &EchTruncation, lo: i64, hi: i64) -> Vec<(Label, Label)> {
    let mut role: BTreeMap<OLabel, FactorRole> = BTreeMap::new();
    for (upper, lower) in ocomplex::block_matching(lo, hi) {
        let (Label::Handle(u), Label::Handle(l)) = (upper, lower) else {
            unreachable!()
        };
        role.insert(u, FactorRole::Upper(l));
        role.insert(l, FactorRole::Lower);
    }
    let c = &trunc.complex;
    let mut pairs = Vec::new();
    for j in 0..c.dim() {
        let gen = EchGenerator::from_label(c.label(j)).expect("assembled labels parse");
        for (p, h) in gen.handles.iter().enumerate() {
            match role.get(h) {
                None => continue,                 // critical factor; look further right
                Some(FactorRole::Lower) => break, // matched from its partner
                Some(FactorRole::Upper(l)) => {
                    let mut partner = gen.clone();
                    partner.handles[p] = *l;
                    pairs.push((gen.to_label(), partner.to_label()));
                    break;
                }
            }
        }
    }
    pairs
}

/// The subcomplex cut for the minus flavor: translation coordinate <= -1.
pub fn minus_ses(trunc: &EchTruncation) -> Result<Ses, crate::complex::ComplexError> {
    trunc
        .complex
        .sub_quotient(|l| l.translation_index().map(|i| i <= -1).unwrap_or(false))
}

pub fn flavor_complex(
    trunc: &EchTruncation,
    flavor: Flavor,
) -> Result<GradedComplex, crate::complex::ComplexError> {
    match flavor {
        Flavor::Infinity => Ok(trunc.complex.clone()),
        Flavor::Minus => Ok(minus_ses(trunc)?.sub),
        Flavor::Plus => Ok(minus_ses(trunc)?.quotient),
    }
}

/// Stabilization status of one reported grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabStatus {
    /// Stable in the norm budget and unchanged under window enlargement.
    Stable,
    /// Stable in the norm budget; the translation window still matters
    /// (edge gradings, or a cyclic grading where windows always grow).
    NormStableOnly,
}

#[derive(Debug, Clone)]
pub struct GradingReport {
    pub windowed: FinAbGroup,
    pub stable: FinAbGroup,
    pub generators: Vec<String>,
    pub status: StabStatus,
}

#[derive(Debug, Clone)]
pub struct EchHomologyReport {
    pub flavor: Flavor,
    pub g: u32,
    pub l: u32,
    pub i_min: i64,
    pub i_max: i64,
    /// Per grading: the windowed group at the base budget, the stable
    /// group of the norm tower, generator chains, and status.
    pub gradings: BTreeMap<i64, GradingReport>,
    /// The smallest norm budget from which the image tower is constant.
    pub stabilized_at_l: u32,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("norm tower still moving at budget {l_top} (grading {grading}): {detail}")]
pub struct EchNotStabilized {
    pub l_top: u32,
    pub grading: i64,
    pub detail: String,
}

/// Windowed flavor homology with the norm-direction stabilization
/// analysis: computes the tower of norm truncations l..l+slack, takes
/// stable images in the top one, and reports both the windowed and the
/// stabilized groups per grading.
pub fn ech_flavor_homology(
    hf: &HfData,
    g: u32,
    flavor: Flavor,
    l: u32,
    i_min: i64,
    i_max: i64,
) -> Result<EchHomologyReport, EchNotStabilized> {
    let slack = 4u32;
    let levels: Vec<u32> = (l..=l + slack).collect();
    let complexes: Vec<GradedComplex> = levels
        .iter()
        .map(|&ll| {
            let t = build_ech(hf, g, ll, i_min, i_max);
            flavor_complex(&t, flavor).expect("flavor cut")
        })
        .collect();
    let homologies: Vec<ComplexHomology> = complexes
        .iter()
        .map(|c| ComplexHomology::compute(c).expect("validated input"))
        .collect();
    let top = complexes.last().unwrap();
    let top_h = homologies.last().unwrap();
    let base = &complexes[0];
    let base_h = &homologies[0];

    let include_into_top = |c: &GradedComplex| -> IntMatrix {
        let mut m = IntMatrix::zero(top.dim(), c.dim());
        for j in 0..c.dim() {
            let gidx = top.index_of(c.label(j)).expect("norm windows nest");
            m.set(gidx, j, BigInt::from(1)).unwrap();
        }
        m
    };

    let mut gradings = BTreeMap::new();
    let mut stabilized_at_l = l;
    let keys = base.grading_keys();
    for &d in &keys {
        let mut lattices = Vec::new();
        let mut images = Vec::new();
        // the top complex only receives the comparison; its self-image is
        // the whole group and is not part of the tower
        for (idx, c) in complexes.iter().enumerate().take(complexes.len() - 1) {
            let inc = include_into_top(c);
            let m = induced_between(&inc, 0, d, &homologies[idx], top_h)
                .expect("norm inclusions are chain maps");
            let mut cols = m.matrix.columns().to_vec();
            cols.extend(top_h.group(d).relation_columns().columns().iter().cloned());
            lattices.push(hermite_normal_form(&IntMatrix::from_columns(
                m.matrix.rows(),
                cols,
            )));
            images.push(m.matrix);
        }
        // stable once the image lattice is constant for at least three
        // consecutive budgets up to the top of the tower
        let stable_from = (0..lattices.len())
            .find(|&s| lattices.len() - s >= 3 && lattices[s..].windows(2).all(|w| w[0] == w[1]));
        let Some(stable_from) = stable_from else {
            return Err(EchNotStabilized {
                l_top: l + slack,
                grading: d,
                detail: format!(
                    "image ranks along the tower: {:?}",
                    images
                        .iter()
                        .map(|m| subgroup_structure(m, top_h.group(d)).free_rank)
                        .collect::<Vec<_>>()
                ),
            });
        };
        stabilized_at_l = stabilized_at_l.max(l + stable_from as u32);
        let stable = subgroup_structure(&images[stable_from], top_h.group(d));
        let hnf_im = hermite_normal_form(&images[stable_from]);
        let top_gens = top_h.generators_global(d);
        let mut reps = Vec::new();
        for jc in 0..hnf_im.cols() {
            let mut chain: SparseVec = Vec::new();
            for (gi, coeff) in hnf_im.column(jc) {
                chain = crate::algebra::axpy(&chain, &top_gens[*gi], coeff);
            }
            if !chain.is_empty() {
                reps.push(top.chain_to_string(&chain));
            }
        }
        gradings.insert(
            d,
            GradingReport {
                windowed: base_h.group(d).clone(),
                stable,
                generators: reps,
                status: StabStatus::NormStableOnly,
            },
        );
    }

    // window-direction check: enlarge the translation window and compare
    // the stable groups on shared gradings
    if hf.p() == 0 {
        let enlarged = stable_groups_only(hf, g, flavor, l, i_min - 2, i_max + 2);
        if let Ok(enl) = enlarged {
            for (d, rep) in gradings.iter_mut() {
                if let Some(other) = enl.get(d) {
                    if rep.stable.same_iso_class(other) {
                        rep.status = StabStatus::Stable;
                    }
                }
            }
        }
    }

    Ok(EchHomologyReport {
        flavor,
        g,
        l,
        i_min,
        i_max,
        gradings,
        stabilized_at_l,
    })
}

/// The stable groups of the norm tower alone (used for the window
/// comparison).
fn stable_groups_only(
    hf: &HfData,
    g: u32,
    flavor: Flavor,
    l: u32,
    i_min: i64,
    i_max: i64,
) -> Result<BTreeMap<i64, FinAbGroup>, EchNotStabilized> {
    let slack = 3u32;
    let levels: Vec<u32> = (l..=l + slack).collect();
    let complexes: Vec<GradedComplex> = levels
        .iter()
        .map(|&ll| {
            let t = build_ech(hf, g, ll, i_min, i_max);
            flavor_complex(&t, flavor).expect("flavor cut")
        })
        .collect();
    let homologies: Vec<ComplexHomology> = complexes
        .iter()
        .map(|c| ComplexHomology::compute(c).expect("validated input"))
        .collect();
    let top = complexes.last().unwrap();
    let top_h = homologies.last().unwrap();
    let base = &complexes[0];
    let base_h = &homologies[0];

    let mut out = BTreeMap::new();
    for d in base.grading_keys() {
        let mut inc = IntMatrix::zero(top.dim(), base.dim());
        for j in 0..base.dim() {
            let gidx = top.index_of(base.label(j)).expect("norm windows nest");
            inc.set(gidx, j, BigInt::from(1)).unwrap();
        }
        let m = induced_between(&inc, 0, d, base_h, top_h).map_err(|e| EchNotStabilized {
            l_top: l + slack,
            grading: d,
            detail: e.to_string(),
        })?;
        out.insert(d, subgroup_structure(&m.matrix, top_h.group(d)));
    }
    Ok(out)
}
