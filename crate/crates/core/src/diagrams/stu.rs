//! STU resolution of trivalent vertices into chord diagrams.
//!
//! For a vertex whose slot `r` is joined to a strand leg `p`, with the other
//! slots `e1 = r+1`, `e2 = r+2` (cyclically), the vertex equals
//! `D(p- ~ e2, p+ ~ e1) - D(p- ~ e1, p+ ~ e2)`, where `p-` and `p+` are two
//! adjacent legs replacing `p` (earlier and later along the strand) and
//! `x ~ e` means `x` is joined to the far end of `e`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::elt::DiagElt;
use super::{JDiagram, Raw};
use crate::error::{Error, Result};
use crate::scalar::Rat;

/// Which leg-adjacent vertex to resolve first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StuOrder {
    FirstLeg,
    LastLeg,
}

/// The two signed diagrams of one STU step at leg `p`, which must be joined to a vertex.
pub fn stu_step(d: &JDiagram, p: usize) -> Result<[(JDiagram, i64); 2]> {
    let l = d.n_legs();
    let h = d.mate[p] as usize;
    if p >= l || h < l {
        return Err(Error::Invalid(format!(
            "leg {p} is not joined to a trivalent vertex"
        )));
    }
    let v = (h - l) / 3;
    let r = (h - l) % 3;
    let b = l + 3 * v;
    let (e1, e2) = (b + (r + 1) % 3, b + (r + 2) % 3);
    let (m1, m2) = (d.mate[e1] as u32, d.mate[e2] as u32);
    let mut raw = d.to_raw();
    let (early, late) = (d.mate.len() as u32, d.mate.len() as u32 + 1);
    for s in raw.strands.iter_mut() {
        if let Some(pos) = s.iter().position(|&t| t == p as u32) {
            s.splice(pos..=pos, [early, late]);
        }
    }
    raw.vertices.remove(v);
    let slots = [b as u32, b as u32 + 1, b as u32 + 2];
    raw.edges
        .retain(|&(x, y)| !slots.contains(&x) && !slots.contains(&y));
    let with = |a: u32, c: u32| -> Result<JDiagram> {
        let mut r2 = raw.clone();
        r2.edges.push((early, a));
        r2.edges.push((late, c));
        r2.labeled()
    };
    if slots.contains(&m1) || slots.contains(&m2) {
        // a loop at the vertex: both terms coincide
        let z = d.clone();
        return Ok([(z.clone(), 0), (z, 0)]);
    }
    Ok([(with(m2, m1)?, 1), (with(m1, m2)?, -1)])
}

thread_local! {
    static MEMO: RefCell<HashMap<(JDiagram, StuOrder), Rc<Vec<(JDiagram, i64)>>>> = RefCell::new(HashMap::new());
}

/// Chord-diagram expansion of one canonical diagram.
fn expand_canonical(d: &JDiagram, order: StuOrder) -> Result<Rc<Vec<(JDiagram, i64)>>> {
    if d.is_chord() {
        return Ok(Rc::new(vec![(d.clone(), 1)]));
    }
    let key = (d.clone(), order);
    if let Some(r) = MEMO.with(|m| m.borrow().get(&key).cloned()) {
        return Ok(r);
    }
    let l = d.n_legs();
    let mut legs = (0..l).filter(|&p| d.mate[p] as usize >= l);
    let p = match order {
        StuOrder::FirstLeg => legs.next(),
        StuOrder::LastLeg => legs.last(),
    }
    .ok_or_else(|| Error::Invalid("dashed component has no path to a strand".into()))?;
    let mut acc: HashMap<JDiagram, i64> = HashMap::new();
    for (e, s) in stu_step(d, p)? {
        if s == 0 {
            continue;
        }
        let Some((c, cs)) = e.canonical()? else {
            continue;
        };
        for (f, k) in expand_canonical(&c, order)?.iter() {
            *acc.entry(f.clone()).or_insert(0) += s * cs * k;
        }
    }
    let mut v: Vec<(JDiagram, i64)> = acc.into_iter().filter(|(_, k)| *k != 0).collect();
    v.sort();
    let r = Rc::new(v);
    MEMO.with(|m| m.borrow_mut().insert(key, r.clone()));
    Ok(r)
}

/// Rewrite every term as chord diagrams by repeated STU.
pub fn stu_expand(x: &DiagElt, order: StuOrder) -> Result<DiagElt> {
    if x.signature().is_colored() {
        return Err(Error::Invalid("STU needs strands".into()));
    }
    let mut out = DiagElt::zero(x.signature().clone());
    if let Some(c) = x.cap_opt() {
        out = out.with_cap(c);
    }
    for (d, c) in x.terms() {
        for (f, k) in expand_canonical(d, order)?.iter() {
            out.add_diagram(f, c.scale(&Rat::int(*k)))?;
        }
    }
    Ok(out)
}

/// Raw Y diagram joining three legs, plus chords, on `k` strands; used by tests and generators.
pub fn y_with_chords(lens: &[usize], y: [usize; 3], chords: &[(usize, usize)]) -> Result<JDiagram> {
    let mut strands = Vec::new();
    let mut t = 0u32;
    for &n in lens {
        strands.push((t..t + n as u32).collect());
        t += n as u32;
    }
    let base = t;
    let mut raw = Raw {
        strands,
        vertices: vec![[base, base + 1, base + 2]],
        ..Default::default()
    };
    for (r, &p) in y.iter().enumerate() {
        raw.edges.push((p as u32, base + r as u32));
    }
    for &(a, b) in chords {
        raw.edges.push((a as u32, b as u32));
    }
    raw.labeled()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::elt::Signature;
    use crate::scalar::FormalScalar;

    fn chords(lens: &[usize], pairs: &[(usize, usize)]) -> DiagElt {
        let mut strands = Vec::new();
        let mut t = 0u32;
        for &n in lens {
            strands.push((t..t + n as u32).collect());
            t += n as u32;
        }
        let raw = Raw {
            strands,
            edges: pairs.iter().map(|&(a, b)| (a as u32, b as u32)).collect(),
            ..Default::default()
        };
        DiagElt::from_raw(Signature::Strands(lens.len()), &raw).unwrap()
    }

    #[test]
    fn chord_is_fixed() {
        let c = chords(&[1, 1], &[(0, 1)]);
        assert_eq!(stu_expand(&c, StuOrder::FirstLeg).unwrap(), c);
    }

    #[test]
    fn y_resolves_to_commutator() {
        // Y on legs (s1, s1, s2), resolved at the strand-2 leg: difference of two 2-chord diagrams
        let y = y_with_chords(&[2, 1], [0, 1, 2], &[]).unwrap();
        let e = DiagElt::from_diagram(Signature::Strands(2), &y, FormalScalar::one()).unwrap();
        let a = stu_expand(&e, StuOrder::LastLeg).unwrap();
        let t1 = chords(&[2, 2], &[(0, 3), (1, 2)]);
        let t2 = chords(&[2, 2], &[(0, 2), (1, 3)]);
        assert_eq!(a.len(), 2);
        // r = 2 at leg 2; e1 -> leg 0, e2 -> leg 1: early joins leg 1, late joins leg 0
        assert_eq!(a, t1.sub(&t2).unwrap());
        // resolving at the first leg instead gives [t11-chord, t12] up to the same relation
        let b = stu_expand(&e, StuOrder::FirstLeg).unwrap();
        assert_eq!(b.len(), 2);
        assert!(stu_step(&y, 3).is_err());
    }
}
