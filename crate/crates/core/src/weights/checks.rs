//! Verdicts on weight systems: the sl2 skein identity, commutativity of the
//! image, annihilation of relations and invariance under conjugation.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::usl2::{diagram_value, TensorKey};
use super::{evaluate, WeightSystem, WeightValue};
use crate::diagrams::checks::{box_blob, bubble, connected_trees_le2};
use crate::diagrams::relations::{chord_basis, compositions, relation_space_guarded};
use crate::diagrams::stu::{stu_step, y_with_chords};
use crate::diagrams::text::format_diagram;
use crate::diagrams::{make_jn, stu_expand, DiagElt, JDiagram, Raw, Signature, StuOrder};
use crate::error::{Error, Result};
use crate::scalar::{FormalScalar, Rat};
use crate::series::series_inverse;

fn two() -> Signature {
    Signature::Strands(2)
}

fn elt(d: &JDiagram) -> Result<DiagElt> {
    DiagElt::from_diagram(two(), d, FormalScalar::one())
}

/// Where an end of the H pattern goes: a strand leg, or another end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Leg(u32),
    End(usize),
}

/// Ends of the H pattern in the order top-left, bottom-left, top-right, bottom-right,
/// with slot tokens: left vertex `(mid, TL, BL)`, right vertex `(TR, mid, BR)`.
const END_TOKENS: [u32; 4] = [101, 102, 200, 202];
/// Smoothings: `=` joins TL-TR and BL-BR, `X` joins TL-BR and BL-TR.
const PARALLEL: [usize; 4] = [2, 3, 0, 1];
const CROSS: [usize; 4] = [3, 2, 1, 0];

/// One embedding: strand token lists, targets of the four ends, extra chords between legs.
#[derive(Clone, Debug)]
struct Embedding {
    strands: Vec<Vec<u32>>,
    ends: [Target; 4],
    chords: Vec<(u32, u32)>,
}

impl Embedding {
    fn h_raw(&self) -> Raw {
        let mut edges = vec![(100, 201)];
        for (i, t) in self.ends.iter().enumerate() {
            match *t {
                Target::Leg(x) => edges.push((END_TOKENS[i], x)),
                Target::End(j) if i < j => edges.push((END_TOKENS[i], END_TOKENS[j])),
                Target::End(_) => {}
            }
        }
        edges.extend(self.chords.iter().copied());
        Raw {
            strands: self.strands.clone(),
            vertices: vec![[100, 101, 102], [200, 201, 202]],
            edges,
            ..Default::default()
        }
    }

    /// Replace the H by a smoothing; returns the diagram and the number of closed dashed loops.
    fn smoothed(&self, partner: &[usize; 4]) -> Result<(JDiagram, usize)> {
        let mut seen = [false; 4];
        let mut edges = self.chords.clone();
        for start in 0..4 {
            let Target::Leg(a) = self.ends[start] else {
                continue;
            };
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut cur = start;
            loop {
                let p = partner[cur];
                seen[p] = true;
                match self.ends[p] {
                    Target::Leg(b) => {
                        edges.push((a, b));
                        break;
                    }
                    Target::End(q) => {
                        seen[q] = true;
                        cur = q;
                    }
                }
            }
        }
        let mut loops = 0;
        for start in 0..4 {
            if seen[start] {
                continue;
            }
            loops += 1;
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                let p = partner[cur];
                seen[p] = true;
                match self.ends[p] {
                    Target::End(q) => cur = q,
                    Target::Leg(_) => return Err(Error::Invalid("inconsistent smoothing".into())),
                }
            }
        }
        let raw = Raw {
            strands: self.strands.clone(),
            edges,
            ..Default::default()
        };
        Ok((raw.labeled()?, loops))
    }
}

/// Strand layouts of the listed labels over two strands, in every order.
fn layouts(labels: &[u32]) -> Vec<Vec<Vec<u32>>> {
    let mut perms: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..labels.len() {
        let mut next = Vec::new();
        for p in &perms {
            for &x in labels {
                if !p.contains(&x) {
                    let mut q = p.clone();
                    q.push(x);
                    next.push(q);
                }
            }
        }
        perms = next;
    }
    let mut out = Vec::new();
    for lens in compositions(labels.len(), 2) {
        for p in &perms {
            out.push(vec![p[..lens[0]].to_vec(), p[lens[0]..].to_vec()]);
        }
    }
    out
}

fn embeddings() -> Vec<Embedding> {
    let mut out = Vec::new();
    // all four ends on legs
    for strands in layouts(&[0, 1, 2, 3]) {
        out.push(Embedding {
            strands,
            ends: [0, 1, 2, 3].map(Target::Leg),
            chords: vec![],
        });
    }
    // two ends joined to each other, the other two on legs, with or without one more chord
    for i in 0..4 {
        for j in i + 1..4 {
            let rest: Vec<usize> = (0..4).filter(|&x| x != i && x != j).collect();
            let mut ends = [Target::Leg(0); 4];
            ends[i] = Target::End(j);
            ends[j] = Target::End(i);
            ends[rest[0]] = Target::Leg(0);
            ends[rest[1]] = Target::Leg(1);
            for strands in layouts(&[0, 1]) {
                out.push(Embedding {
                    strands,
                    ends,
                    chords: vec![],
                });
            }
            let mut seen = std::collections::HashSet::new();
            for strands in layouts(&[0, 1, 2, 3]) {
                // legs 2 and 3 carry the extra chord; skip layouts equal up to swapping them
                let key: Vec<Vec<u32>> = strands
                    .iter()
                    .map(|s| s.iter().map(|&x| x.min(2)).collect())
                    .collect();
                if seen.insert(key) {
                    out.push(Embedding {
                        strands,
                        ends,
                        chords: vec![(2, 3)],
                    });
                }
            }
        }
    }
    out
}

fn value_of(d: &JDiagram, loops: usize) -> Result<HashMap<TensorKey, Rat>> {
    diagram_value(d, loops)
}

fn combine(parts: &[(&HashMap<TensorKey, Rat>, i64)]) -> HashMap<TensorKey, Rat> {
    let mut out = HashMap::new();
    for (m, c) in parts {
        for (k, v) in m.iter() {
            crate::scalar::accumulate_rat(&mut out, k.clone(), v * &Rat::int(*c));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct SkeinReport {
    pub embeddings: usize,
    /// Embeddings (as diagram text) where `W(H) != 2 W(=) - 2 W(X)`.
    pub failures: Vec<String>,
    /// Four-legged embeddings where direct evaluation and evaluation after STU differ.
    pub stu_mismatches: Vec<String>,
}

impl SkeinReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.stu_mismatches.is_empty()
    }
}

/// The skein identity `W(H) = 2 W(=) - 2 W(X)` on every embedding of the H pattern into
/// diagrams of degree ≤ 3 on two strands, plus agreement of the direct and STU routes.
pub fn skein_verify() -> Result<SkeinReport> {
    let mut rep = SkeinReport {
        embeddings: 0,
        failures: Vec::new(),
        stu_mismatches: Vec::new(),
    };
    for e in embeddings() {
        rep.embeddings += 1;
        let h = e.h_raw().labeled()?;
        let (par, lp) = e.smoothed(&PARALLEL)?;
        let (cro, lc) = e.smoothed(&CROSS)?;
        let lhs = value_of(&h, 0)?;
        let (vp, vc) = (value_of(&par, lp)?, value_of(&cro, lc)?);
        let rhs = combine(&[(&vp, 2), (&vc, -2)]);
        if lhs != rhs {
            rep.failures.push(format_diagram(&h, &two()));
        }
        if e.ends.iter().all(|t| matches!(t, Target::Leg(_))) {
            let direct = super::weight_universal_sl2(&elt(&h)?)?;
            let via = super::weight_universal_sl2(&stu_expand(&elt(&h)?, StuOrder::LastLeg)?)?;
            if direct != via {
                rep.stu_mismatches.push(format_diagram(&h, &two()));
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct CommutativityReport {
    pub system: WeightSystem,
    pub diagrams: usize,
    /// Unordered pairs checked.
    pub pairs: usize,
    /// A pair of diagrams (as text) with non-commuting values.
    pub witness: Option<(String, String)>,
    /// Jacobi diagrams whose direct value differs from the value of their STU expansion (sl2 only).
    pub stu_mismatches: Vec<String>,
}

impl CommutativityReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none() && self.stu_mismatches.is_empty()
    }
}

/// Jacobi diagrams with vertices of degree ≤ 3 used alongside chord diagrams.
pub fn jacobi_samples() -> Result<Vec<JDiagram>> {
    let mut out: Vec<JDiagram> = connected_trees_le2()?
        .into_iter()
        .filter(|d| !d.is_chord())
        .collect();
    out.push(make_jn(3)?);
    out.push(bubble()?);
    out.push(box_blob()?);
    Ok(out)
}

/// `W(J1) W(J2) = W(J2) W(J1)` for all pairs of chord diagrams of degree ≤ `cap`;
/// for sl2 also with the sample Jacobi diagrams, evaluated directly.
pub fn commutativity_report(system: WeightSystem, cap: usize) -> Result<CommutativityReport> {
    if cap > 4 {
        return Err(Error::Cap(format!(
            "commutativity check supports degree cap ≤ 4, got {cap}"
        )));
    }
    let mut diagrams: Vec<JDiagram> = (0..=cap).flat_map(|d| chord_basis(d, 2)).collect();
    let mut stu_mismatches = Vec::new();
    if system == WeightSystem::Sl2 {
        let extra: Vec<JDiagram> = jacobi_samples()?
            .into_iter()
            .filter(|d| d.degree() <= cap.max(3))
            .collect();
        for d in &extra {
            let direct = evaluate(system, &elt(d)?)?;
            let via = evaluate(system, &stu_expand(&elt(d)?, StuOrder::FirstLeg)?)?;
            if direct != via {
                stu_mismatches.push(format_diagram(d, &two()));
            }
        }
        diagrams.extend(extra);
    }
    let values: Vec<WeightValue> = diagrams
        .par_iter()
        .map(|d| evaluate(system, &elt(d)?))
        .collect::<Result<_>>()?;
    let n = values.len();
    let witness = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Option<(usize, usize)>> {
            for j in i + 1..n {
                if !values[i].commutator(&values[j])?.is_zero() {
                    return Ok(Some((i, j)));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next()
        .map(|(i, j)| {
            (
                format_diagram(&diagrams[i], &two()),
                format_diagram(&diagrams[j], &two()),
            )
        });
    Ok(CommutativityReport {
        system,
        diagrams: n,
        pairs: n * (n - 1) / 2,
        witness,
        stu_mismatches,
    })
}

#[derive(Clone, Debug)]
pub struct AnnihilationReport {
    pub system: WeightSystem,
    pub rows: usize,
    /// `(degree, row index)` of rows with nonzero value.
    pub failures: Vec<(usize, usize)>,
    /// One-vertex diagrams whose direct sl2 value differs from an STU resolution.
    pub vertex_failures: Vec<String>,
}

impl AnnihilationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.vertex_failures.is_empty()
    }
}

/// `W(r) = 0` for every generated relation row of degree ≤ `max_degree`; for sl2 also
/// `W(Y) = W(STU_p Y)` at every leg `p` of every one-vertex diagram of degree ≤ `max_degree`.
pub fn relation_annihilation(
    system: WeightSystem,
    max_degree: usize,
) -> Result<AnnihilationReport> {
    let mut rep = AnnihilationReport {
        system,
        rows: 0,
        failures: Vec::new(),
        vertex_failures: Vec::new(),
    };
    for deg in 2..=max_degree {
        let space = relation_space_guarded(deg, 2, false)?;
        let cols = space.columns();
        let values: Vec<WeightValue> = cols
            .par_iter()
            .map(|d| evaluate(system, &elt(d)?))
            .collect::<Result<_>>()?;
        for (ri, row) in space.relation_rows()?.iter().enumerate() {
            rep.rows += 1;
            let mut acc = evaluate(system, &DiagElt::zero(two()))?;
            for (c, r) in row {
                acc.add_scaled(&values[*c as usize], &FormalScalar::from_rat(r.clone()))?;
            }
            if !acc.is_zero() {
                rep.failures.push((deg, ri));
            }
        }
    }
    if system == WeightSystem::Sl2 {
        for deg in 2..=max_degree {
            let n = 2 * deg - 1;
            for lens in compositions(n, 2) {
                for p in 0..n {
                    for q in p + 1..n {
                        for r in q + 1..n {
                            let rest: Vec<usize> =
                                (0..n).filter(|x| ![p, q, r].contains(x)).collect();
                            for m in crate::diagrams::relations::matchings(&rest) {
                                let y = y_with_chords(&lens, [p, q, r], &m)?;
                                let direct = evaluate(system, &elt(&y)?)?;
                                for leg in [p, q, r] {
                                    let mut res = DiagElt::zero(two());
                                    for (d, s) in stu_step(&y, leg)? {
                                        res.add_diagram(&d, FormalScalar::int(s))?;
                                    }
                                    if evaluate(system, &res)? != direct {
                                        rep.vertex_failures.push(format_diagram(&y, &two()));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct ConjugationReport {
    pub system: WeightSystem,
    pub conjugators: usize,
    pub checked: usize,
    /// `(seed, diagram text)` where `W(F X F^{-1}) != W(X)`.
    pub failures: Vec<(u64, String)>,
}

impl ConjugationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A random `F = 1 + (terms of degree 1..=cap)` on chord diagrams with small rational coefficients.
pub fn random_unit(seed: u64, cap: usize) -> Result<DiagElt> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut f = DiagElt::one(two()).with_cap(cap);
    for deg in 1..=cap {
        let basis = chord_basis(deg, 2);
        for _ in 0..3 {
            let d = &basis[rng.gen_range(0..basis.len())];
            let c = Rat::new(rng.gen_range(-5..=5), rng.gen_range(1..=4));
            f.add_diagram(d, FormalScalar::from_rat(c))?;
        }
    }
    Ok(f)
}

/// `W(F X F^{-1}) = W(X)` degreewise, for chord diagrams `X` of degree ≤ `cap` and random `F`.
pub fn conjugation_check(
    system: WeightSystem,
    seeds: &[u64],
    cap: usize,
) -> Result<ConjugationReport> {
    let xs: Vec<JDiagram> = (0..=cap).flat_map(|d| chord_basis(d, 2)).collect();
    let mut rep = ConjugationReport {
        system,
        conjugators: seeds.len(),
        checked: 0,
        failures: Vec::new(),
    };
    for &seed in seeds {
        let f = random_unit(seed, cap)?;
        let finv = series_inverse(&f)?;
        let results: Vec<Result<Option<String>>> = xs
            .par_iter()
            .map(|x| {
                let xe = elt(x)?.with_cap(cap);
                let conj = f.stack_product(&xe)?.stack_product(&finv)?;
                let same = evaluate(system, &conj)? == evaluate(system, &xe)?;
                Ok(if same {
                    None
                } else {
                    Some(format_diagram(x, &two()))
                })
            })
            .collect();
        for r in results {
            rep.checked += 1;
            if let Some(s) = r? {
                rep.failures.push((seed, s));
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::StdSystem;

    #[test]
    fn skein_holds() {
        let r = skein_verify().unwrap();
        assert!(r.embeddings > 150, "{}", r.embeddings);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn skein_with_swapped_smoothings_fails() {
        let e = &embeddings()[0];
        let h = e.h_raw().labeled().unwrap();
        let (par, lp) = e.smoothed(&PARALLEL).unwrap();
        let (cro, lc) = e.smoothed(&CROSS).unwrap();
        let (vp, vc) = (value_of(&par, lp).unwrap(), value_of(&cro, lc).unwrap());
        assert_ne!(value_of(&h, 0).unwrap(), combine(&[(&vp, -2), (&vc, 2)]));
        assert!(!value_of(&h, 0).unwrap().is_empty());
    }

    #[test]
    fn j3_is_an_h_embedding() {
        let j3 = make_jn(3).unwrap().canonical().unwrap().unwrap().0;
        let found = embeddings()
            .iter()
            .filter(|e| e.chords.is_empty() && e.ends.iter().all(|t| matches!(t, Target::Leg(_))))
            .any(|e| {
                e.h_raw()
                    .labeled()
                    .unwrap()
                    .canonical()
                    .unwrap()
                    .map(|c| c.0)
                    == Some(j3.clone())
            });
        assert!(found);
    }

    #[test]
    fn standard_systems_commute_at_cap_two() {
        for s in StdSystem::ALL {
            let r = commutativity_report(WeightSystem::Std(s), 2).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert!(commutativity_report(WeightSystem::Sl2, 5).is_err());
    }

    #[test]
    fn relations_are_killed_at_degree_two() {
        for s in WeightSystem::ALL {
            let r = relation_annihilation(s, 2).unwrap();
            assert!(r.rows > 0);
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn noncentral_element_is_detected() {
        // t12 and t11 commute in U(sl2)^{⊗2}, but e ⊗ 1 and f ⊗ 1 do not: the check is not vacuous
        let e = crate::weights::usl2::Usl2TensorElt::monomial(
            &[
                crate::weights::PbwMono::generator(crate::weights::usl2::E),
                crate::weights::PbwMono::one(),
            ],
            FormalScalar::one(),
        );
        let f = crate::weights::usl2::Usl2TensorElt::monomial(
            &[
                crate::weights::PbwMono::generator(crate::weights::usl2::F),
                crate::weights::PbwMono::one(),
            ],
            FormalScalar::one(),
        );
        assert!(!WeightValue::Sl2(e)
            .commutator(&WeightValue::Sl2(f))
            .unwrap()
            .is_zero());
    }
}
