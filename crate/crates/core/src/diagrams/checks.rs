//! Verification routines on A(↓↓): the commutator-to-bracket identity,
//! STU confluence, and centrality statements.

use super::colored::{commutator_decomposition, connect_bracket, tau};
use super::elt::{DiagElt, Signature};
use super::relations::{chord_basis, relation_space_guarded, vanishes};
use super::stu::{stu_expand, y_with_chords, StuOrder};
use super::{make_jn, JDiagram, Raw};
use crate::error::Result;
use crate::scalar::FormalScalar;

fn two() -> Signature {
    Signature::Strands(2)
}

fn elt(d: &JDiagram) -> Result<DiagElt> {
    DiagElt::from_diagram(two(), d, FormalScalar::one())
}

/// Connected tree diagrams of degree at most 2 on two strands, one per AS class:
/// the three chords and the four Y diagrams.
pub fn connected_trees_le2() -> Result<Vec<JDiagram>> {
    let mut out = chord_basis(1, 2);
    for lens in [[3, 0], [2, 1], [1, 2], [0, 3]] {
        out.push(y_with_chords(&lens, [0, 1, 2], &[])?);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct TranspositionReport {
    pub pairs: usize,
    /// Pairs where the transposition sum differs from `XY - YX` modulo relations.
    pub decomposition_failures: Vec<(usize, usize)>,
    /// Pairs where τ of the transposition sum differs from `[τX, τY]_1`.
    pub bracket_failures: Vec<(usize, usize)>,
}

impl TranspositionReport {
    pub fn passed(&self) -> bool {
        self.decomposition_failures.is_empty() && self.bracket_failures.is_empty()
    }
}

/// For all ordered pairs of connected trees of degree ≤ 2: `XY - YX` equals the
/// sum of its adjacent-transposition terms modulo relations, and τ of that sum
/// equals the leg-joining bracket of τX and τY exactly.
pub fn transposition_oracle() -> Result<TranspositionReport> {
    let trees = connected_trees_le2()?;
    let mut rep = TranspositionReport {
        pairs: 0,
        decomposition_failures: Vec::new(),
        bracket_failures: Vec::new(),
    };
    for (i, x) in trees.iter().enumerate() {
        for (j, y) in trees.iter().enumerate() {
            rep.pairs += 1;
            let (ex, ey) = (elt(x)?, elt(y)?);
            let comm = ex.commutator(&ey)?;
            let mut sum = DiagElt::zero(two());
            for d in commutator_decomposition(x, y)? {
                sum.add_diagram(&d, FormalScalar::one())?;
            }
            if !vanishes(&sum.sub(&comm)?, false)? {
                rep.decomposition_failures.push((i, j));
            }
            if tau(&sum)? != connect_bracket(&tau(&ex)?, &tau(&ey)?)? {
                rep.bracket_failures.push((i, j));
            }
        }
    }
    Ok(rep)
}

/// Diagrams used for the confluence test: `J_3`, `J_4`, the bubble, the box and
/// every one-vertex diagram of degree ≤ 4 on two strands.
pub fn confluence_samples() -> Result<Vec<JDiagram>> {
    let mut out = vec![make_jn(3)?, make_jn(4)?, bubble()?, box_blob()?];
    for d in 2..=4usize {
        let n = 2 * d - 1;
        for l0 in 0..=n {
            let lens = [l0, n - l0];
            for p in 0..n {
                for q in p + 1..n {
                    for r in q + 1..n {
                        let rest: Vec<usize> = (0..n).filter(|x| ![p, q, r].contains(x)).collect();
                        for m in super::relations::matchings(&rest) {
                            out.push(y_with_chords(&lens, [p, q, r], &m)?);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Two resolution orders of STU agree modulo relations for every sample.
pub fn confluence_check() -> Result<(usize, Vec<JDiagram>)> {
    let mut bad = Vec::new();
    let samples = confluence_samples()?;
    for d in &samples {
        let e = elt(d)?;
        let diff = stu_expand(&e, StuOrder::FirstLeg)?.sub(&stu_expand(&e, StuOrder::LastLeg)?)?;
        for deg in 1..=d.degree() {
            let r = relation_space_guarded(deg, 2, false)?;
            if !r.reduce_nf(&diff.component(deg))?.is_empty() {
                bad.push(d.clone());
                break;
            }
        }
    }
    Ok((samples.len(), bad))
}

/// The degree-2 diagram with one leg per strand and a dashed bubble between them.
pub fn bubble() -> Result<JDiagram> {
    Raw {
        strands: vec![vec![0], vec![1]],
        vertices: vec![[10, 11, 12], [20, 21, 22]],
        edges: vec![(0, 10), (11, 21), (12, 22), (20, 1)],
        ..Default::default()
    }
    .labeled()
}

fn blob(left_on_first: bool) -> Result<JDiagram> {
    // legs u, v; vertices A(u,B,C), B(A,C,D), C(A,D,B), D(B,C,v); degree 3
    let (u, v) = (0u32, 1u32);
    let strands = if left_on_first {
        vec![vec![u], vec![v]]
    } else {
        vec![vec![v], vec![u]]
    };
    Raw {
        strands,
        vertices: vec![[10, 11, 12], [20, 21, 22], [30, 31, 32], [40, 41, 42]],
        edges: vec![
            (u, 10),
            (11, 20),
            (12, 30),
            (21, 32),
            (22, 40),
            (31, 41),
            (42, v),
        ],
        ..Default::default()
    }
    .labeled()
}

/// A two-legged degree-3 blob `J`, with one leg on each strand.
pub fn box_blob() -> Result<JDiagram> {
    blob(true)
}

/// `J + rot180(J)`: rotation swaps which leg meets which strand and keeps cyclic orders.
pub fn symmetrized_blob() -> Result<DiagElt> {
    elt(&blob(true)?)?.add(&elt(&blob(false)?)?)
}

/// Whether `z` commutes with every listed diagram, modulo relations.
pub fn commutes_with_all(z: &DiagElt, others: &[JDiagram], deep: bool) -> Result<Option<JDiagram>> {
    for c in others {
        let ce = elt(c)?;
        if !vanishes(&z.commutator(&ce)?, deep)? {
            return Ok(Some(c.clone()));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct CentralityReport {
    pub checked: usize,
    pub witness: Option<(JDiagram, JDiagram)>,
}

/// Every chord diagram of degree ≤ 2 commutes with every chord diagram of degree ≤ `c_degree`.
pub fn centrality_check(c_degree: usize, deep: bool) -> Result<CentralityReport> {
    let zs: Vec<JDiagram> = (1..=2).flat_map(|d| chord_basis(d, 2)).collect();
    let cs: Vec<JDiagram> = (1..=c_degree).flat_map(|d| chord_basis(d, 2)).collect();
    let mut checked = 0;
    for z in &zs {
        checked += cs.len();
        if let Some(c) = commutes_with_all(&elt(z)?, &cs, deep)? {
            return Ok(CentralityReport {
                checked,
                witness: Some((z.clone(), c)),
            });
        }
    }
    Ok(CentralityReport {
        checked,
        witness: None,
    })
}

/// Every pair of chord diagrams of degree ≤ 3 commutes (needs degree-6 relations when both have degree 3).
pub fn pair_commutation_check(deep: bool) -> Result<CentralityReport> {
    let xs: Vec<JDiagram> = chord_basis(3, 2);
    let top = if deep { 3 } else { 2 };
    let ys: Vec<JDiagram> = (1..=top).flat_map(|d| chord_basis(d, 2)).collect();
    let mut checked = 0;
    for (i, x) in xs.iter().enumerate() {
        let ys_here: Vec<JDiagram> = ys
            .iter()
            .filter(|y| y.degree() < 3 || xs.iter().position(|w| w == *y).is_some_and(|j| j > i))
            .cloned()
            .collect();
        checked += ys_here.len();
        if let Some(c) = commutes_with_all(&elt(x)?, &ys_here, deep)? {
            return Ok(CentralityReport {
                checked,
                witness: Some((x.clone(), c)),
            });
        }
    }
    Ok(CentralityReport {
        checked,
        witness: None,
    })
}
