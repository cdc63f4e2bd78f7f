//! Relation spaces among chord diagrams of one degree, and exact reduction.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use smallvec::SmallVec;

use super::elt::{DiagElt, Signature};
use super::stu::{stu_expand, stu_step, y_with_chords, StuOrder};
use super::JDiagram;
use crate::error::{Error, Result};
use crate::linalg::Echelon;
use crate::modular::DualBasis;
use crate::scalar::{FormalScalar, Rat};

/// Column guard for relation spaces (chord diagrams of one degree).
pub const DEFAULT_COLUMNS: usize = 20_000;
pub const DEEP_COLUMNS: usize = 200_000;

/// How the relation rows are stored.
#[derive(Debug)]
enum Basis {
    /// Exact rational echelon form.
    Exact(Echelon),
    /// Modular elimination certified by exact kernel vectors.
    Certified(DualBasis),
}

/// Relations among degree-`d` chord diagrams on `k` strands, eliminated.
#[derive(Debug)]
pub struct RelationSpace {
    pub degree: usize,
    pub strands: usize,
    columns: Vec<JDiagram>,
    index: HashMap<JDiagram, u32>,
    basis: Basis,
    generated_rows: usize,
}

/// Compositions of `total` into `k` ordered parts, lexicographic.
pub fn compositions(total: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Perfect matchings of `points` (in their given order, first point matched first).
pub fn matchings(points: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if points.is_empty() {
        return vec![vec![]];
    }
    let a = points[0];
    let mut out = Vec::new();
    for j in 1..points.len() {
        let rest: Vec<usize> = points[1..]
            .iter()
            .enumerate()
            .filter(|(i, _)| i + 1 != j)
            .map(|(_, &x)| x)
            .collect();
        for mut m in matchings(&rest) {
            m.insert(0, (a, points[j]));
            out.push(m);
        }
    }
    out
}

/// Chord diagram from strand lengths and leg pairs.
pub fn chord_diagram(lens: &[usize], pairs: &[(usize, usize)]) -> JDiagram {
    let n: usize = lens.iter().sum();
    let mut mate: SmallVec<[u16; 32]> = SmallVec::from_elem(0, n);
    for &(a, b) in pairs {
        mate[a] = b as u16;
        mate[b] = a as u16;
    }
    JDiagram {
        strands: lens.iter().map(|&x| x as u8).collect(),
        colors: SmallVec::new(),
        colored: false,
        mate,
    }
}

/// All degree-`d` chord diagrams on `k` strands, in enumeration order.
pub fn chord_basis(d: usize, k: usize) -> Vec<JDiagram> {
    let pts: Vec<usize> = (0..2 * d).collect();
    let ms = matchings(&pts);
    let mut out = Vec::new();
    for lens in compositions(2 * d, k) {
        for m in &ms {
            out.push(chord_diagram(&lens, m));
        }
    }
    out
}

/// Closed-form count `C(2d+k-1, k-1) (2d-1)!!` of degree-`d` chord diagrams on `k` strands.
pub fn number_of_chord_diagrams(d: usize, k: usize) -> usize {
    let mut binom = 1usize;
    for i in 0..k - 1 {
        binom = binom * (2 * d + k - 1 - i) / (i + 1);
    }
    let mut dfact = 1usize;
    for i in (1..2 * d).step_by(2) {
        dfact *= i;
    }
    binom * dfact
}

pub type Row = Vec<(u32, Rat)>;

impl RelationSpace {
    /// Columns and generated STU rows, without elimination.
    pub fn unreduced(d: usize, k: usize) -> Result<(Vec<JDiagram>, Vec<Row>)> {
        let columns = chord_basis(d, k);
        let index: HashMap<JDiagram, u32> = columns
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u32))
            .collect();
        let space = RelationSpace {
            degree: d,
            strands: k,
            columns,
            index,
            basis: Basis::Exact(Echelon::new()),
            generated_rows: 0,
        };
        let rows = if d < 2 { Vec::new() } else { space.stu_rows()? };
        Ok((space.columns, rows))
    }

    /// The space by modular elimination with exact certification, uncached.
    pub fn certified(d: usize, k: usize) -> Result<RelationSpace> {
        Self::build(d, k, DEEP_COLUMNS, true)
    }

    fn build(d: usize, k: usize, max_columns: usize, modular: bool) -> Result<RelationSpace> {
        if k == 0 {
            return Err(Error::Invalid(
                "relation space needs at least one strand".into(),
            ));
        }
        let count = number_of_chord_diagrams(d, k);
        if count > max_columns {
            return Err(Error::Guard(format!(
                "degree {d} on {k} strands has {count} chord diagrams, above the guard {max_columns}"
            )));
        }
        let columns = chord_basis(d, k);
        let index: HashMap<JDiagram, u32> = columns
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u32))
            .collect();
        let mut space = RelationSpace {
            degree: d,
            strands: k,
            columns,
            index,
            basis: Basis::Exact(Echelon::new()),
            generated_rows: 0,
        };
        if d < 2 {
            return Ok(space);
        }
        let rows = space.stu_rows()?;
        space.generated_rows = rows.len();
        if modular {
            space.basis = Basis::Certified(DualBasis::build(&rows, space.columns.len())?);
        } else {
            let mut e = Echelon::new();
            for r in &rows {
                e.insert(r)?;
            }
            space.basis = Basis::Exact(e);
        }
        Ok(space)
    }

    fn signed_row(&self, terms: &[(JDiagram, i64)]) -> Result<Row> {
        let mut acc: BTreeMap<u32, i64> = BTreeMap::new();
        for (e, s) in terms {
            if *s == 0 {
                continue;
            }
            let Some((c, cs)) = e.canonical()? else {
                continue;
            };
            let i = *self
                .index
                .get(&c)
                .ok_or_else(|| Error::Invalid("relation term outside the chord basis".into()))?;
            *acc.entry(i).or_insert(0) += s * cs;
        }
        Ok(acc
            .into_iter()
            .filter(|(_, v)| *v != 0)
            .map(|(i, v)| (i, Rat::int(v)))
            .collect())
    }

    /// Rows equating STU resolutions at two legs of each one-vertex diagram.
    fn stu_rows(&self) -> Result<Vec<Row>> {
        let (d, k) = (self.degree, self.strands);
        let n = 2 * d - 1;
        let mut jobs = Vec::new();
        for lens in compositions(n, k) {
            for p in 0..n {
                for q in p + 1..n {
                    for r in q + 1..n {
                        jobs.push((lens.clone(), [p, q, r]));
                    }
                }
            }
        }
        let per: Vec<Result<Vec<Row>>> = jobs
            .par_iter()
            .map(|(lens, y)| {
                let rest: Vec<usize> = (0..n).filter(|x| !y.contains(x)).collect();
                let mut rows = Vec::new();
                for m in matchings(&rest) {
                    let dia = y_with_chords(lens, *y, &m)?;
                    let legs: Vec<usize> = y.to_vec();
                    let res: Vec<[(JDiagram, i64); 2]> = legs
                        .iter()
                        .map(|&p| stu_step(&dia, p))
                        .collect::<Result<_>>()?;
                    for other in [&res[1], &res[2]] {
                        let terms = [
                            res[0][0].clone(),
                            res[0][1].clone(),
                            (other[0].0.clone(), -other[0].1),
                            (other[1].0.clone(), -other[1].1),
                        ];
                        let row = self.signed_row(&terms)?;
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
                Ok(rows)
            })
            .collect();
        let mut out = Vec::new();
        for r in per {
            out.extend(r?);
        }
        Ok(out)
    }

    /// Classical four-term relations, built from chord positions directly.
    pub fn four_term_rows(&self) -> Result<Vec<Row>> {
        let (d, k) = (self.degree, self.strands);
        if d < 2 {
            return Ok(Vec::new());
        }
        let mut rows = Vec::new();
        for base in chord_basis(d - 1, k) {
            let off = base.strand_offsets();
            // legs at keys 4i on their strand; gaps at 4i - 2 (including the end)
            let mut legs: Vec<(usize, i64)> = Vec::new();
            for s in 0..k {
                for (i, _) in (off[s]..off[s + 1]).enumerate() {
                    legs.push((s, 4 * i as i64));
                }
            }
            let pairs: Vec<(usize, usize)> = (0..base.mate.len())
                .filter(|&h| h < base.mate[h] as usize)
                .map(|h| (h, base.mate[h] as usize))
                .collect();
            let mut gaps = Vec::new();
            for s in 0..k {
                for g in 0..=(base.strands[s] as i64) {
                    gaps.push((s, 4 * g - 2));
                }
            }
            for &(zs, zk) in &gaps {
                for &(x, y) in &pairs {
                    let mut terms = Vec::new();
                    for (end, sgn) in [(x, 1i64), (y, 1i64)] {
                        for (shift, s2) in [(-1i64, 1i64), (1, -1)] {
                            let (ws, wk) = (legs[end].0, legs[end].1 + shift);
                            terms.push((place(&legs, &pairs, (zs, zk), (ws, wk), k), sgn * s2));
                        }
                    }
                    let row = self.signed_row(&terms)?;
                    if !row.is_empty() {
                        rows.push(row);
                    }
                }
            }
        }
        Ok(rows)
    }

    /// The generated STU rows, regenerated on demand (the space keeps only its echelon form).
    pub fn relation_rows(&self) -> Result<Vec<Row>> {
        if self.degree < 2 {
            return Ok(Vec::new());
        }
        self.stu_rows()
    }

    pub fn columns(&self) -> &[JDiagram] {
        &self.columns
    }

    pub fn free_dim(&self) -> usize {
        self.columns.len()
    }

    pub fn rank(&self) -> usize {
        match &self.basis {
            Basis::Exact(e) => e.rank(),
            Basis::Certified(b) => b.rank(),
        }
    }

    pub fn reduced_dim(&self) -> usize {
        self.free_dim() - self.rank()
    }

    pub fn generated_rows(&self) -> usize {
        self.generated_rows
    }

    /// Whether the space was built by certified modular elimination.
    pub fn is_certified(&self) -> bool {
        matches!(self.basis, Basis::Certified(_))
    }

    /// Coordinates of a column vector modulo relations. Nonzero coordinates
    /// sit on a fixed set of non-pivot columns, so the result is zero exactly
    /// when the vector lies in the relation span.
    pub fn reduce_vec(&self, v: &BTreeMap<u32, FormalScalar>) -> BTreeMap<u32, FormalScalar> {
        match &self.basis {
            Basis::Exact(e) => e.reduce_fs(v),
            Basis::Certified(b) => b.reduce_fs(v),
        }
    }

    pub fn index_of(&self, d: &JDiagram) -> Option<u32> {
        self.index.get(d).copied()
    }

    /// Coordinates of a homogeneous chord-diagram element modulo relations.
    pub fn reduce_nf(&self, x: &DiagElt) -> Result<BTreeMap<u32, FormalScalar>> {
        let mut v = BTreeMap::new();
        for (d, c) in x.terms() {
            if !d.is_chord() || d.degree() != self.degree || d.n_strands() != self.strands {
                return Err(Error::Invalid(format!(
                    "reduce_nf needs degree-{} chord diagrams on {} strands",
                    self.degree, self.strands
                )));
            }
            let i = self.index[d];
            v.insert(i, c.clone());
        }
        Ok(self.reduce_vec(&v))
    }

    /// Rank of the four-term rows, for comparison with this space.
    pub fn four_term_rank(&self) -> Result<usize> {
        let mut e = Echelon::new();
        for r in self.four_term_rows()? {
            e.insert(&r)?;
        }
        Ok(e.rank())
    }
}

/// Chord diagram with chords `pairs` at `legs` positions plus a chord from `z` to `w`.
fn place(
    legs: &[(usize, i64)],
    pairs: &[(usize, usize)],
    z: (usize, i64),
    w: (usize, i64),
    k: usize,
) -> JDiagram {
    let mut pts: Vec<(usize, i64, usize)> = legs
        .iter()
        .enumerate()
        .map(|(i, &(s, key))| (s, key, i))
        .collect();
    let (zi, wi) = (legs.len(), legs.len() + 1);
    pts.push((z.0, z.1, zi));
    pts.push((w.0, w.1, wi));
    pts.sort();
    let mut pos = vec![0usize; legs.len() + 2];
    for (p, &(_, _, id)) in pts.iter().enumerate() {
        pos[id] = p;
    }
    let mut lens = vec![0usize; k];
    for &(s, _, _) in &pts {
        lens[s] += 1;
    }
    let mut ps: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
    ps.push((pos[zi], pos[wi]));
    chord_diagram(&lens, &ps)
}

type Slot = Arc<Mutex<Option<Arc<RelationSpace>>>>;
type Cache = Mutex<HashMap<(usize, usize), Slot>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Relation space of degree `d`, cached and built once; `deep` lifts the column guard.
pub fn relation_space_guarded(d: usize, k: usize, deep: bool) -> Result<Arc<RelationSpace>> {
    let slot = cache()
        .lock()
        .expect("relation cache")
        .entry((d, k))
        .or_default()
        .clone();
    let mut slot = slot.lock().expect("relation slot");
    if let Some(r) = slot.as_ref() {
        return Ok(r.clone());
    }
    let guard = if deep { DEEP_COLUMNS } else { DEFAULT_COLUMNS };
    let modular = number_of_chord_diagrams(d, k) > DEFAULT_COLUMNS;
    let r = Arc::new(RelationSpace::build(d, k, guard, modular)?);
    *slot = Some(r.clone());
    Ok(r)
}

/// Relation space of degree `d` for a strand signature, under the default guard.
pub fn relation_space(d: usize, sig: &Signature) -> Result<Arc<RelationSpace>> {
    match sig {
        Signature::Strands(k) => relation_space_guarded(d, *k, false),
        Signature::Colors(_) => Err(Error::Invalid(
            "relation spaces are built on strands".into(),
        )),
    }
}

/// Whether `x` vanishes in the diagram algebra, degree by degree.
pub fn vanishes(x: &DiagElt, deep: bool) -> Result<bool> {
    let k = match x.signature() {
        Signature::Strands(k) => *k,
        _ => return Err(Error::Invalid("vanishes needs strands".into())),
    };
    let e = stu_expand(x, StuOrder::FirstLeg)?;
    let mut degs: Vec<usize> = e.terms().keys().map(|d| d.degree()).collect();
    degs.sort();
    degs.dedup();
    for deg in degs {
        let r = relation_space_guarded(deg, k, deep)?;
        if !r.reduce_nf(&e.component(deg))?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Normal form of `x` in the chord basis modulo relations, degree by degree.
pub fn reduce_mod_relations(x: &DiagElt, deep: bool) -> Result<DiagElt> {
    let k = match x.signature() {
        Signature::Strands(k) => *k,
        _ => return Err(Error::Invalid("reduction needs strands".into())),
    };
    let e = stu_expand(x, StuOrder::FirstLeg)?;
    let mut degs: Vec<usize> = e.terms().keys().map(|d| d.degree()).collect();
    degs.sort();
    degs.dedup();
    let mut out = DiagElt::zero(x.signature().clone());
    for deg in degs {
        let r = relation_space_guarded(deg, k, deep)?;
        for (i, c) in r.reduce_nf(&e.component(deg))? {
            out.add_diagram(&r.columns()[i as usize], c)?;
        }
    }
    Ok(match x.cap_opt() {
        Some(c) => out.with_cap(c),
        None => out,
    })
}

/// Whether `x` and `y` commute up to degree `cap`.
pub fn commute_check(x: &DiagElt, y: &DiagElt, cap: usize, deep: bool) -> Result<bool> {
    let c = x.with_cap(cap).commutator(&y.with_cap(cap))?;
    vanishes(&c, deep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::elt::DiagElt;

    #[test]
    fn counts() {
        assert_eq!(number_of_chord_diagrams(1, 2), 3);
        assert_eq!(number_of_chord_diagrams(5, 2), 10395);
        assert_eq!(number_of_chord_diagrams(6, 2), 135135);
        for (d, k) in [(1, 2), (2, 2), (3, 2), (2, 3)] {
            assert_eq!(chord_basis(d, k).len(), number_of_chord_diagrams(d, k));
        }
    }

    #[test]
    fn low_degrees_match_four_term_oracle() {
        let r1 = relation_space_guarded(1, 2, false).unwrap();
        assert_eq!(r1.reduced_dim(), 3);
        for (d, k) in [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3)] {
            let r = relation_space_guarded(d, k, false).unwrap();
            assert_eq!(
                r.rank(),
                r.four_term_rank().unwrap(),
                "degree {d} on {k} strands"
            );
            for row in r.four_term_rows().unwrap() {
                let v: BTreeMap<u32, FormalScalar> = row
                    .into_iter()
                    .map(|(c, x)| (c, FormalScalar::from_rat(x)))
                    .collect();
                assert!(r.reduce_vec(&v).is_empty());
            }
        }
        // one strand: 1, 2, 3 primitive-generated dimensions of chord diagrams
        assert_eq!(
            relation_space_guarded(2, 1, false).unwrap().reduced_dim(),
            2
        );
        assert_eq!(
            relation_space_guarded(3, 1, false).unwrap().reduced_dim(),
            3
        );
    }

    #[test]
    fn reduction_is_a_projection_and_commutators_vanish() {
        let r = relation_space_guarded(2, 2, false).unwrap();
        let t12 = DiagElt::chord(2, 1, 2).unwrap();
        let raw = super::super::Raw {
            strands: vec![vec![0, 1], vec![]],
            edges: vec![(0, 1)],
            ..Default::default()
        };
        let a = DiagElt::from_raw(Signature::Strands(2), &raw).unwrap();
        let c = t12.commutator(&a).unwrap();
        assert!(!c.is_zero());
        assert!(r.reduce_nf(&c).unwrap().is_empty());
        let single = r.reduce_nf(&t12.stack_product(&t12).unwrap()).unwrap();
        assert!(!single.is_empty());
        let again: BTreeMap<u32, FormalScalar> = single.clone();
        assert_eq!(r.reduce_vec(&again), single);
        assert!(r.reduce_nf(&t12).is_err());
    }

    #[test]
    fn certified_backend_matches_exact_echelon() {
        for (d, k) in [(3, 2), (4, 2), (3, 3), (5, 2)] {
            let exact = relation_space_guarded(d, k, false).unwrap();
            let cert = RelationSpace::certified(d, k).unwrap();
            assert!(!exact.is_certified() && cert.is_certified());
            assert_eq!(exact.rank(), cert.rank(), "degree {d} on {k} strands");
            let Basis::Exact(e) = &exact.basis else {
                unreachable!()
            };
            for row in e.rows() {
                let v: BTreeMap<u32, FormalScalar> = row
                    .iter()
                    .map(|(c, x)| (*c, FormalScalar::from_rat(x.clone())))
                    .collect();
                assert!(cert.reduce_vec(&v).is_empty());
            }
            // exact non-pivot unit vectors map to a basis of the certified quotient
            let free: Vec<u32> = (0..exact.free_dim() as u32)
                .filter(|c| !e.is_pivot(*c))
                .collect();
            let Basis::Certified(b) = &cert.basis else {
                unreachable!()
            };
            let pos: HashMap<u32, usize> = b
                .free_columns()
                .iter()
                .enumerate()
                .map(|(i, c)| (*c, i))
                .collect();
            let matrix: Vec<Vec<Rat>> = free
                .iter()
                .map(|&g| {
                    let mut line = vec![Rat::zero(); free.len()];
                    for (c, x) in cert.reduce_vec(&[(g, FormalScalar::int(1))].into()) {
                        line[pos[&c]] = x.as_rat().unwrap();
                    }
                    line
                })
                .collect();
            assert_eq!(crate::linalg::dense_rank(matrix), free.len());
        }
    }
}
