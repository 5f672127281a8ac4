//! Bundled chain-data instances and a deterministic random family.
//!
//! Random instances are built from elementary two-generator pieces and
//! then conjugated by grading-compatible unimodular shears over the
//! translation polynomial ring, so validity is by construction (and
//! asserted).

use std::collections::BTreeMap;

use crate::hf::HfData;

/// One generator, zero differential.
pub fn trivial() -> HfData {
    HfData::new(vec!["x".into()], 0, vec![0]).unwrap()
}

/// Two generators with the differential x -> T y; the full-window
/// homology vanishes on interior gradings.
pub fn acyclic_pair() -> HfData {
    let mut hf = HfData::new(vec!["x".into(), "y".into()], 0, vec![0, 1]).unwrap();
    hf.add_term("x", "y", 1, 1).unwrap();
    hf
}

/// A mod-4 graded example with 2-torsion: x -> 2y plus a free tail
/// w -> T^2 z.
pub fn graded_p4() -> HfData {
    let mut hf = HfData::new(
        vec!["x".into(), "y".into(), "w".into(), "z".into()],
        4,
        vec![1, 0, 2, 1],
    )
    .unwrap();
    hf.add_term("x", "y", 0, 2).unwrap();
    hf.add_term("w", "z", 2, 1).unwrap();
    hf
}

/// An exterior doubling of the acyclic pair carrying one degree -1
/// action that anti-commutes with the differential.
pub fn h1_pair() -> HfData {
    let mut hf = HfData::new(
        vec!["u".into(), "v".into(), "ue".into(), "ve".into()],
        0,
        vec![0, 1, -1, 0],
    )
    .unwrap();
    hf.add_term("u", "v", 1, 1).unwrap();
    hf.add_term("ue", "ve", 1, -1).unwrap();
    let a = hf.add_h1_action();
    hf.add_h1_term(a, "u", "ue", 0, 1).unwrap();
    hf.add_h1_term(a, "v", "ve", 0, 1).unwrap();
    hf
}

/// A six-generator mixed instance with translation powers up to 2.
pub fn stress() -> HfData {
    let mut hf = HfData::new(
        vec![
            "a".into(),
            "b".into(),
            "c".into(),
            "d".into(),
            "e".into(),
            "f".into(),
        ],
        0,
        vec![0, 1, 2, 3, 0, 1],
    )
    .unwrap();
    hf.add_term("a", "b", 1, 2).unwrap();
    hf.add_term("a", "d", 2, 2).unwrap();
    hf.add_term("c", "d", 1, 2).unwrap();
    hf.add_term("c", "b", 0, 1).unwrap();
    hf.add_term("f", "e", 0, 1).unwrap();
    hf
}

/// Names and constructors of the bundled corpus.
pub fn bundled() -> Vec<(&'static str, HfData)> {
    vec![
        ("trivial", trivial()),
        ("acyclic", acyclic_pair()),
        ("graded_p4", graded_p4()),
        ("h1_pair", h1_pair()),
        ("stress", stress()),
    ]
}

/// A splitmix64 stream; deterministic across platforms.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    pub fn pick<'a, T>(&mut self, s: &'a [T]) -> &'a T {
        &s[self.below(s.len() as u64) as usize]
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

type TermMap = BTreeMap<(usize, usize), BTreeMap<u32, i64>>; // (to, from) -> power -> coeff

fn add_into(map: &mut TermMap, to: usize, from: usize, k: u32, c: i64) {
    if c == 0 {
        return;
    }
    let poly = map.entry((to, from)).or_default();
    let e = poly.entry(k).or_insert(0);
    *e += c;
    if *e == 0 {
        poly.remove(&k);
    }
    if map.get(&(to, from)).map(|p| p.is_empty()).unwrap_or(false) {
        map.remove(&(to, from));
    }
}

/// Conjugates the term map by the shear sending generator `a` to
/// a + c T^j b (a unimodular grading-compatible change of basis).
fn shear(map: &TermMap, a: usize, b: usize, j: u32, c: i64) -> TermMap {
    let mut out = map.clone();
    // D' = D + cT^j D E_{ba} - cT^j E_{ba} D - c^2 T^{2j} E_{ba} D E_{ba}
    for (&(to, from), poly) in map {
        for (&k, &v) in poly {
            if from == b {
                add_into(&mut out, to, a, k + j, c * v);
            }
            if to == a {
                add_into(&mut out, b, from, k + j, -c * v);
            }
            if from == b && to == a {
                add_into(&mut out, b, a, k + 2 * j, -c * c * v);
            }
        }
    }
    out
}

fn max_exp_of(map: &TermMap) -> u32 {
    map.values()
        .flat_map(|p| p.keys())
        .copied()
        .max()
        .unwrap_or(0)
}

/// A random valid instance with at most `max_gens` generators,
/// translation exponents at most `max_exp`, and modulus drawn from `ps`.
pub fn random_hf(rng: &mut Rng, max_gens: usize, max_exp: u32, ps: &[u32]) -> HfData {
    let n = 1 + rng.below(max_gens as u64) as usize;
    let p = *rng.pick(ps);

    let mut lifts = vec![0i64; n];
    let mut terms: TermMap = BTreeMap::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && rng.chance(3, 5) {
            let k = rng.below(max_exp as u64 + 1) as u32;
            lifts[i] = rng.below(4) as i64;
            lifts[i + 1] = lifts[i] - 1 + 2 * k as i64;
            let coeff = *rng.pick(&[-2i64, -1, 1, 1, 2]);
            add_into(&mut terms, i + 1, i, k, coeff);
            i += 2;
        } else {
            lifts[i] = rng.below(4) as i64;
            i += 1;
        }
    }

    // grading-compatible shears keep validity and mix the pieces
    let tries = rng.below(2 * n as u64 + 1);
    for _ in 0..tries {
        let a = rng.below(n as u64) as usize;
        let b = rng.below(n as u64) as usize;
        if a == b {
            continue;
        }
        // need lift(a) = lift(b) - 2j (mod p) with j >= 0
        let mut js = Vec::new();
        for j in 0..=max_exp {
            let delta = lifts[b] - lifts[a] - 2 * j as i64;
            let ok = if p == 0 {
                delta == 0
            } else {
                delta.rem_euclid(p as i64) == 0
            };
            if ok {
                js.push(j);
            }
        }
        let Some(&j) = js.first() else { continue };
        let c = *rng.pick(&[-1i64, 1]);
        let sheared = shear(&terms, a, b, j, c);
        if max_exp_of(&sheared) <= max_exp {
            terms = sheared;
        }
    }

    let names: Vec<String> = (0..n).map(|k| format!("g{k}")).collect();
    let mut hf = HfData::new(names.clone(), p, lifts).unwrap();
    for (&(to, from), poly) in &terms {
        for (&k, &c) in poly {
            hf.add_term(&names[from], &names[to], k, c).unwrap();
        }
    }
    hf.validate()
        .expect("random instance is valid by construction");
    hf
}

/// Doubles an instance by an exterior generator: every x gains a partner
/// x_e one grading lower, the differential extends with a sign, and
/// multiplication by the new generator becomes an anti-commuting degree
/// -1 action. The input's own actions are dropped.
pub fn double_with_h1(hf: &HfData) -> HfData {
    let names = hf.names().to_vec();
    let mut new_names: Vec<String> = names.clone();
    new_names.extend(names.iter().map(|n| format!("{n}_e")));
    let mut grading: Vec<i64> = hf.grading().to_vec();
    grading.extend(hf.grading().iter().map(|g| g - 1));
    let mut out = HfData::new(new_names, hf.p(), grading).unwrap();
    for (from, to, k, c) in hf.diff_terms() {
        let c: i64 = i64::try_from(c).expect("small coefficients");
        out.add_term(&from, &to, k, c).unwrap();
        out.add_term(&format!("{from}_e"), &format!("{to}_e"), k, -c)
            .unwrap();
    }
    let a = out.add_h1_action();
    for n in &names {
        out.add_h1_term(a, n, &format!("{n}_e"), 0, 1).unwrap();
    }
    out.validate().expect("doubling preserves validity");
    out
}

/// A random instance that carries one h1 action (a doubled random
/// instance, kept within the generator budget).
pub fn random_hf_with_h1(rng: &mut Rng, max_gens: usize, max_exp: u32, ps: &[u32]) -> HfData {
    let base = random_hf(rng, (max_gens / 2).max(1), max_exp, ps);
    double_with_h1(&base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_instances_validate() {
        for (name, hf) in bundled() {
            hf.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn random_family_validates_and_is_deterministic() {
        let mut rng = Rng::new(7);
        for _ in 0..60 {
            let _ = random_hf(&mut rng, 6, 2, &[0, 2, 4, 8]);
        }
        let mut r1 = Rng::new(42);
        let mut r2 = Rng::new(42);
        let a = random_hf(&mut r1, 6, 2, &[0, 4]);
        let b = random_hf(&mut r2, 6, 2, &[0, 4]);
        assert_eq!(a.diff_terms(), b.diff_terms());
        assert_eq!(a.grading(), b.grading());
    }

    #[test]
    fn doubling_always_validates() {
        let mut rng = Rng::new(11);
        for _ in 0..20 {
            let hf = random_hf_with_h1(&mut rng, 6, 2, &[0, 2]);
            assert_eq!(hf.h1_count(), 1);
        }
    }
}
