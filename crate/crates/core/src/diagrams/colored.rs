//! Colored tree diagrams: forgetting strands (τ), the leg-joining bracket,
//! and the expansion η of a tree into rooted Lie monomials.

use std::collections::{BTreeMap, HashMap};

use smallvec::SmallVec;

use super::elt::{DiagElt, Signature};
use super::{JDiagram, Mates, Raw};
use crate::error::{Error, Result};
use crate::lie::{assoc_to_lyndon, AssocPoly, LieElt, Word};
use crate::scalar::{accumulate, FormalScalar, Rat};

const OPEN: u8 = 254;
const CLOSE: u8 = 255;

/// Color names for `k` strands: `a, b, c, ...`.
pub fn strand_colors(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect()
}

struct Forest<'a> {
    d: &'a JDiagram,
    l: usize,
}

impl Forest<'_> {
    /// Code and AS sign of the subtree behind half-edge `h` (seen from its mate), or `None` if it vanishes.
    fn code(&self, h: usize) -> Option<(Vec<u8>, i64)> {
        let t = self.d.mate[h] as usize;
        if t < self.l {
            return Some((vec![self.d.colors[t]], 1));
        }
        let v = (t - self.l) / 3;
        let r = (t - self.l) % 3;
        let b = self.l + 3 * v;
        let (x, y) = (b + (r + 1) % 3, b + (r + 2) % 3);
        let (cx, sx) = self.code(x)?;
        let (cy, sy) = self.code(y)?;
        let (first, second, s) = match cx.cmp(&cy) {
            std::cmp::Ordering::Equal => return None,
            std::cmp::Ordering::Less => (cx, cy, 1),
            std::cmp::Ordering::Greater => (cy, cx, -1),
        };
        let mut out = Vec::with_capacity(first.len() + second.len() + 2);
        out.push(OPEN);
        out.extend(first);
        out.extend(second);
        out.push(CLOSE);
        Some((out, s * sx * sy))
    }

    /// Rebuild the subtree behind `h` in canonical slot order, appending legs and vertices.
    fn rebuild(
        &self,
        h: usize,
        legs: &mut Vec<u8>,
        verts: &mut Vec<[Option<usize>; 3]>,
        edges: &mut Vec<(Node, Node)>,
    ) -> Node {
        let t = self.d.mate[h] as usize;
        if t < self.l {
            legs.push(self.d.colors[t]);
            return Node::Leg(legs.len() - 1);
        }
        let v = (t - self.l) / 3;
        let r = (t - self.l) % 3;
        let b = self.l + 3 * v;
        let (mut x, mut y) = (b + (r + 1) % 3, b + (r + 2) % 3);
        let (cx, _) = self.code(x).expect("nonvanishing subtree");
        let (cy, _) = self.code(y).expect("nonvanishing subtree");
        if cx > cy {
            std::mem::swap(&mut x, &mut y);
        }
        let me = verts.len();
        verts.push([None; 3]);
        let nx = self.rebuild(x, legs, verts, edges);
        edges.push((Node::Slot(me, 1), nx));
        let ny = self.rebuild(y, legs, verts, edges);
        edges.push((Node::Slot(me, 2), ny));
        Node::Slot(me, 0)
    }
}

#[derive(Clone, Copy, Debug)]
enum Node {
    Leg(usize),
    Slot(usize, usize),
}

/// Canonical form of a colored forest: each component is rooted at the leg
/// giving the least code, children ordered by code; components sorted.
pub(crate) fn canonical_colored(d: &JDiagram) -> Result<Option<(JDiagram, i64)>> {
    let l = d.n_legs();
    if d.b1() > 0 {
        return Err(Error::Invalid("colored diagrams must be forests".into()));
    }
    let f = Forest { d, l };
    // component of each leg
    let mut comp_of = vec![usize::MAX; l];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for u in 0..l {
        if comp_of[u] != usize::MAX {
            continue;
        }
        let ci = comps.len();
        let mut members = Vec::new();
        let mut stack = vec![u];
        let mut seen = vec![false; d.mate.len()];
        while let Some(h) = stack.pop() {
            if seen[h] {
                continue;
            }
            seen[h] = true;
            if h < l {
                comp_of[h] = ci;
                members.push(h);
                stack.push(d.mate[h] as usize);
            } else {
                let b = l + 3 * ((h - l) / 3);
                for s in b..b + 3 {
                    if !seen[s] {
                        seen[s] = true;
                        stack.push(d.mate[s] as usize);
                    }
                }
            }
        }
        members.sort();
        comps.push(members);
    }
    let vertices_seen: usize = {
        let mut total = 0;
        for c in &comps {
            total += c.len() - 2;
        }
        total
    };
    if vertices_seen != d.n_vertices() {
        return Err(Error::Invalid("dashed component without legs".into()));
    }
    let mut sign = 1i64;
    let mut keyed: Vec<(Vec<u8>, usize)> = Vec::new();
    for members in &comps {
        let mut best: Option<(Vec<u8>, i64, usize)> = None;
        let mut conflict = false;
        for &u in members {
            let Some((c, s)) = f.code(u) else {
                return Ok(None);
            };
            let mut code = vec![d.colors[u]];
            code.extend(c);
            match &best {
                Some((bc, bs, _)) if *bc == code => {
                    if *bs != s {
                        conflict = true;
                    }
                }
                Some((bc, _, _)) if *bc < code => {}
                _ => {
                    best = Some((code, s, u));
                    conflict = false;
                }
            }
        }
        if conflict {
            return Ok(None);
        }
        let (code, s, u) = best.expect("component has legs");
        sign *= s;
        keyed.push((code, u));
    }
    keyed.sort();
    let mut legs: Vec<u8> = Vec::new();
    let mut verts: Vec<[Option<usize>; 3]> = Vec::new();
    let mut edges: Vec<(Node, Node)> = Vec::new();
    for (_, root) in &keyed {
        legs.push(d.colors[*root]);
        let me = Node::Leg(legs.len() - 1);
        let other = f.rebuild(*root, &mut legs, &mut verts, &mut edges);
        edges.push((me, other));
    }
    let nl = legs.len();
    let idx = |n: Node| match n {
        Node::Leg(i) => i,
        Node::Slot(v, r) => nl + 3 * v + r,
    };
    let mut mate: Mates = SmallVec::from_elem(0, nl + 3 * verts.len());
    for (a, b) in edges {
        mate[idx(a)] = idx(b) as u16;
        mate[idx(b)] = idx(a) as u16;
    }
    Ok(Some((
        JDiagram {
            strands: SmallVec::new(),
            colors: legs.into_iter().collect(),
            colored: true,
            mate,
        },
        sign,
    )))
}

/// τ: drop diagrams with dashed cycles and color each leg by its strand.
pub fn tau(x: &DiagElt) -> Result<DiagElt> {
    let k = match x.signature() {
        Signature::Strands(k) => *k,
        _ => return Err(Error::Invalid("tau needs a strand element".into())),
    };
    x.map_diagrams(Signature::Colors(strand_colors(k)), |d| {
        if d.b1() > 0 {
            return Ok(Vec::new());
        }
        let mut colors = SmallVec::new();
        for (s, &n) in d.strands.iter().enumerate() {
            colors.extend(std::iter::repeat_n(s as u8, n as usize));
        }
        Ok(vec![(
            JDiagram {
                strands: SmallVec::new(),
                colors,
                colored: true,
                mate: d.mate.clone(),
            },
            1,
        )])
    })
}

/// Join leg `u` of `x` and leg `v` of `y` (same color) at a new vertex with a new leg of that color.
/// The new vertex has cyclic order (new leg, `y` side, `x` side).
fn join(x: &JDiagram, u: usize, y: &JDiagram, v: usize) -> Raw {
    let off = 10_000u32;
    let mut rx = x.to_raw();
    let ry = y.to_raw();
    let shift = |t: u32| t + off;
    rx.colors.retain(|&(t, _)| t != u as u32);
    rx.colors.extend(
        ry.colors
            .iter()
            .filter(|&&(t, _)| t != v as u32)
            .map(|&(t, c)| (shift(t), c)),
    );
    rx.vertices.extend(
        ry.vertices
            .iter()
            .map(|s| [shift(s[0]), shift(s[1]), shift(s[2])]),
    );
    let mx = x.mate[u] as u32;
    let my = shift(y.mate[v] as u32);
    rx.edges.retain(|&(a, b)| a != u as u32 && b != u as u32);
    rx.edges.extend(
        ry.edges
            .iter()
            .filter(|&&(a, b)| a != v as u32 && b != v as u32)
            .map(|&(a, b)| (shift(a), shift(b))),
    );
    let (leg, s0, s1, s2) = (3 * off, 3 * off + 1, 3 * off + 2, 3 * off + 3);
    rx.colors.push((leg, x.colors[u]));
    rx.vertices.push([s0, s1, s2]);
    rx.edges.extend([(leg, s0), (s1, my), (s2, mx)]);
    rx
}

/// The leg-joining bracket `[J, J']_1` on colored trees.
pub fn connect_bracket(x: &DiagElt, y: &DiagElt) -> Result<DiagElt> {
    if x.signature() != y.signature() || !x.signature().is_colored() {
        return Err(Error::Invalid(
            "connect_bracket needs colored elements with one color set".into(),
        ));
    }
    let mut out = DiagElt::zero(x.signature().clone());
    for (dx, cx) in x.terms() {
        if dx.b1() > 0 {
            return Err(Error::Invalid("connect_bracket needs trees".into()));
        }
        for (dy, cy) in y.terms() {
            if dy.b1() > 0 {
                return Err(Error::Invalid("connect_bracket needs trees".into()));
            }
            let c = cx * cy;
            for u in 0..dx.n_legs() {
                for v in 0..dy.n_legs() {
                    if dx.colors[u] == dy.colors[v] {
                        out.add_diagram(&join(dx, u, dy, v).labeled()?, c.clone())?;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Associative expansion of the rooted monomial behind half-edge `h`.
fn monomial(d: &JDiagram, h: usize) -> Vec<(Word, i64)> {
    let l = d.n_legs();
    let t = d.mate[h] as usize;
    if t < l {
        return vec![(SmallVec::from_slice(&[d.colors[t]]), 1)];
    }
    let b = l + 3 * ((t - l) / 3);
    let r = (t - l) % 3;
    let (x, y) = (b + (r + 1) % 3, b + (r + 2) % 3);
    // vertex entered through s with cyclic order (s, x, y) reads [T(y), T(x)]
    let (left, right) = (monomial(d, y), monomial(d, x));
    let mut out = Vec::with_capacity(2 * left.len() * right.len());
    for (p, cp) in &left {
        for (q, cq) in &right {
            let mut w = p.clone();
            w.extend_from_slice(q);
            out.push((w, cp * cq));
            let mut w2 = q.clone();
            w2.extend_from_slice(p);
            out.push((w2, -cp * cq));
        }
    }
    out
}

/// η of a colored element of connected trees: for each root color, the Lie
/// element summing the monomials of all trees rooted at legs of that color.
/// `filter(root color, leaf color counts without the root)` prunes terms before expansion.
pub fn eta_filtered(
    x: &DiagElt,
    filter: impl Fn(u8, &[usize]) -> bool,
) -> Result<Vec<(u8, LieElt)>> {
    let names = match x.signature() {
        Signature::Colors(c) => c.clone(),
        _ => return Err(Error::Invalid("eta needs a colored element".into())),
    };
    let mut per: BTreeMap<u8, AssocPoly> = BTreeMap::new();
    for (d, c) in x.terms() {
        if d.b1() > 0 || d.components() != 1 {
            return Err(Error::Invalid("eta needs connected trees".into()));
        }
        for u in 0..d.n_legs() {
            let mut counts = vec![0usize; names.len()];
            for (i, &col) in d.colors.iter().enumerate() {
                if i != u {
                    counts[col as usize] += 1;
                }
            }
            if !filter(d.colors[u], &counts) {
                continue;
            }
            let poly = per.entry(d.colors[u]).or_default();
            for (w, k) in monomial(d, u) {
                accumulate(poly, w, c.scale(&Rat::int(k)));
            }
        }
    }
    let mut out = Vec::new();
    for (col, poly) in per {
        let lyn = assoc_to_lyndon(poly)?;
        let mut e = LieElt::zero_over(&names);
        for (w, c) in lyn {
            e = e.add(&LieElt::lyndon(&names, &w)?.scale(&c))?;
        }
        if !e.is_zero() {
            out.push((col, e));
        }
    }
    Ok(out)
}

pub fn eta(x: &DiagElt) -> Result<Vec<(u8, LieElt)>> {
    eta_filtered(x, |_, _| true)
}

/// J~_n built directly as a colored tree: `n-1` spine legs colored a, ends colored b.
pub fn make_jtilde(n: usize) -> Result<JDiagram> {
    let raw = super::jn_raw(n)?;
    let m = (n - 1) as u32;
    let mut c = Raw {
        colored: true,
        vertices: raw.vertices.clone(),
        edges: raw.edges.clone(),
        ..Default::default()
    };
    c.colors = (0..m)
        .map(|t| (t, 0u8))
        .chain([(m, 1u8), (m + 1, 1u8)])
        .collect();
    c.labeled()
}

/// Decompose `XY - YX` (X on top) into one-vertex-joined diagrams by moving Y's
/// legs above X's legs one adjacent transposition at a time. Each term joins an
/// X leg and a Y leg at a new vertex with cyclic order (leg, Y side, X side).
pub fn commutator_decomposition(x: &JDiagram, y: &JDiagram) -> Result<Vec<JDiagram>> {
    if x.colored || y.colored || x.n_strands() != y.n_strands() {
        return Err(Error::Invalid(
            "commutator decomposition needs strand diagrams on one skeleton".into(),
        ));
    }
    let off = 10_000u32;
    let (rx, ry) = (x.to_raw(), y.to_raw());
    let mut vertices: Vec<[u32; 3]> = rx.vertices.clone();
    vertices.extend(
        ry.vertices
            .iter()
            .map(|s| [s[0] + off, s[1] + off, s[2] + off]),
    );
    let mut mate: HashMap<u32, u32> = HashMap::new();
    for &(a, b) in &rx.edges {
        mate.insert(a, b);
        mate.insert(b, a);
    }
    for &(a, b) in &ry.edges {
        mate.insert(a + off, b + off);
        mate.insert(b + off, a + off);
    }
    let mut strands: Vec<Vec<u32>> = (0..x.n_strands())
        .map(|s| {
            rx.strands[s]
                .iter()
                .copied()
                .chain(ry.strands[s].iter().map(|t| t + off))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let fresh = 3 * off;
    for s in 0..strands.len() {
        let nx = rx.strands[s].len();
        let ny = ry.strands[s].len();
        // move each Y leg (top one first) up past all X legs
        for j in 0..ny {
            let mut pos = nx + j;
            while pos > j {
                let (xt, yt) = (strands[s][pos - 1], strands[s][pos]);
                let mut st = strands.clone();
                st[s].splice(pos - 1..=pos, [fresh]);
                let keep = |t: &u32| *t != xt && *t != yt;
                let mut edges: Vec<(u32, u32)> = Vec::new();
                for (&a, &b) in &mate {
                    if a < b && keep(&a) && keep(&b) {
                        edges.push((a, b));
                    }
                }
                let (v0, v1, v2) = (fresh + 1, fresh + 2, fresh + 3);
                edges.extend([(fresh, v0), (v1, mate[&yt]), (v2, mate[&xt])]);
                let mut vs = vertices.clone();
                vs.push([v0, v1, v2]);
                let raw = Raw {
                    strands: st,
                    vertices: vs,
                    edges,
                    ..Default::default()
                };
                out.push(raw.labeled()?);
                strands[s].swap(pos - 1, pos);
                pos -= 1;
            }
        }
    }
    Ok(out)
}

/// Result of the non-commutativity certificate for `[J3, J_{2n+1}]`.
#[derive(Clone, Debug)]
pub struct Prop44Certificate {
    pub n: usize,
    /// Left factor b, multidegree (a: 2n+2, b: 2) part of η([τJ_3, τJ_{2n+1}]_1).
    pub element: LieElt,
    pub nonzero: bool,
    /// Least Lyndon word in the support with its coefficient.
    pub leading: Option<(Word, FormalScalar)>,
    /// The three-tree expansion `4(-T1 + T2 - T3)`.
    pub three_trees: LieElt,
}

impl Prop44Certificate {
    /// The leading coefficient divided by `-4(2n-2)`; the argument predicts 1.
    pub fn leading_ratio(&self) -> Option<FormalScalar> {
        let (_, c) = self.leading.as_ref()?;
        let m = -4 * (2 * self.n as i64 - 2);
        if m == 0 {
            return None;
        }
        Some(c.scale(&Rat::new(1, m)))
    }
}

fn ad_power(x: &LieElt, k: usize, y: &LieElt) -> Result<LieElt> {
    let mut r = y.clone();
    for _ in 0..k {
        r = x.bracket(&r)?;
    }
    Ok(r)
}

/// The three rooted combs of the non-commutativity argument, combined as `4(-T1 + T2 - T3)`.
pub fn three_tree_expansion(n: usize) -> Result<LieElt> {
    let ab = ["a", "b"];
    let a = LieElt::letter(&ab, "a")?;
    let b = LieElt::letter(&ab, "b")?;
    let ab_br = a.bracket(&b)?;
    let tail = ad_power(&a, 2 * n - 1, &ab_br)?;
    let t1 = a.bracket(&a.bracket(&b.bracket(&tail)?)?)?;
    let bba = b.bracket(&a)?.bracket(&a)?;
    let t2 = bba.bracket(&tail)?;
    let mut t3 = bba.bracket(&b)?;
    for _ in 0..2 * n {
        t3 = t3.bracket(&a)?;
    }
    Ok(t2.sub(&t1)?.sub(&t3)?.scale(&FormalScalar::int(4)))
}

/// η-certificate that `J_3` and `J_{2n+1}` do not commute.
pub fn prop44_certificate(n: usize) -> Result<Prop44Certificate> {
    if n == 0 {
        return Err(Error::Invalid("certificate needs n >= 1".into()));
    }
    let sig = Signature::ab();
    let j3 = DiagElt::from_diagram(sig.clone(), &make_jtilde(3)?, FormalScalar::one())?;
    let jn = DiagElt::from_diagram(sig, &make_jtilde(2 * n + 1)?, FormalScalar::one())?;
    let br = connect_bracket(&j3, &jn)?;
    let target = [2 * n + 2, 2];
    let parts = eta_filtered(&br, |root, counts| root == 1 && counts == target)?;
    let element = parts
        .into_iter()
        .find(|(c, _)| *c == 1)
        .map(|(_, e)| e)
        .unwrap_or_else(|| LieElt::zero(&["a", "b"]));
    let nonzero = !element.is_zero();
    let leading = element
        .terms()
        .iter()
        .next()
        .map(|(w, c)| (w.clone(), c.clone()));
    Ok(Prop44Certificate {
        n,
        element,
        nonzero,
        leading,
        three_trees: three_tree_expansion(n)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::make_jn;

    fn edge_ab() -> DiagElt {
        let raw = Raw {
            colored: true,
            colors: vec![(0, 0), (1, 1)],
            edges: vec![(0, 1)],
            ..Default::default()
        };
        DiagElt::from_raw(Signature::ab(), &raw).unwrap()
    }

    #[test]
    fn tau_basics() {
        let t12 = DiagElt::chord(2, 1, 2).unwrap();
        assert_eq!(tau(&t12).unwrap(), edge_ab());
        for n in 3..=7 {
            let j = DiagElt::from_diagram(
                Signature::Strands(2),
                &make_jn(n).unwrap(),
                FormalScalar::one(),
            )
            .unwrap();
            let jt = DiagElt::from_diagram(
                Signature::ab(),
                &make_jtilde(n).unwrap(),
                FormalScalar::one(),
            )
            .unwrap();
            assert_eq!(tau(&j).unwrap(), jt);
        }
        // bubble: a dashed cycle
        let bubble = Raw {
            strands: vec![vec![0], vec![1]],
            vertices: vec![[10, 11, 12], [20, 21, 22]],
            edges: vec![(0, 10), (11, 21), (12, 22), (20, 1)],
            ..Default::default()
        };
        assert!(
            tau(&DiagElt::from_raw(Signature::Strands(2), &bubble).unwrap())
                .unwrap()
                .is_zero()
        );
    }

    #[test]
    fn colored_canonical_is_invariant() {
        // reversing the spine reverses all n-1 vertices, so J~_n vanishes for even n
        for n in [4, 6, 8] {
            assert_eq!(make_jtilde(n).unwrap().canonical().unwrap(), None);
        }
        let j = make_jtilde(7).unwrap();
        let (c0, s0) = j.canonical().unwrap().unwrap();
        let mut raw = j.to_raw();
        raw.vertices.reverse();
        for v in raw.vertices.iter_mut() {
            v.rotate_left(1);
        }
        raw.colors.reverse();
        assert_eq!(raw.canonical().unwrap(), Some((c0.clone(), s0)));
        raw.vertices[0].swap(1, 2);
        assert_eq!(raw.canonical().unwrap(), Some((c0, -s0)));
        // Y with two equal leaves vanishes
        let y = Raw {
            colored: true,
            colors: vec![(0, 0), (1, 0), (2, 1)],
            vertices: vec![[5, 6, 7]],
            edges: vec![(0, 5), (1, 6), (2, 7)],
            ..Default::default()
        };
        assert_eq!(y.canonical().unwrap(), None);
    }

    #[test]
    fn eta_small_trees() {
        let e = eta(&edge_ab()).unwrap();
        assert_eq!(e.len(), 2);
        let ab = ["a", "b", "c"];
        assert_eq!(
            e[0].1.to_sexpr(),
            LieElt::letter(&["a", "b"], "b").unwrap().to_sexpr()
        );
        // Y with colors c1=a, c2=b, c3=c, drawn with c1, c2 above and c3 below: counterclockwise (c3, c2, c1), rooted at c3
        let y = Raw {
            colored: true,
            colors: vec![(0, 0), (1, 1), (2, 2)],
            vertices: vec![[5, 6, 7]],
            edges: vec![(2, 5), (0, 7), (1, 6)],
            ..Default::default()
        };
        let sig = Signature::Colors(ab.iter().map(|s| s.to_string()).collect());
        let el = DiagElt::from_raw(sig, &y).unwrap();
        let parts = eta(&el).unwrap();
        let at_c = parts.iter().find(|(c, _)| *c == 2).unwrap().1.clone();
        let a = LieElt::letter(&ab, "a").unwrap();
        let b = LieElt::letter(&ab, "b").unwrap();
        assert_eq!(at_c, a.bracket(&b).unwrap());
    }

    #[test]
    fn bracket_of_edge_with_itself_vanishes() {
        let e = edge_ab();
        assert!(connect_bracket(&e, &e).unwrap().is_zero());
    }

    #[test]
    fn certificate_small() {
        let c1 = prop44_certificate(1).unwrap();
        assert!(!c1.nonzero);
        let c2 = prop44_certificate(2).unwrap();
        assert!(c2.nonzero);
    }
}
