//! Jacobi diagrams on ordered downward strands, or with colored legs.
//!
//! A [`JDiagram`] stores half-edges densely: legs `0..L` (strand-major, in
//! strand order, for strand diagrams; arbitrary for colored ones), then the
//! three slots `L+3v, L+3v+1, L+3v+2` of vertex `v` listed in cyclic order.
//! `mate[h]` is the other end of the dashed edge at `h`. A diagram with a
//! reversed cyclic order at one vertex is the negative of the original (AS), so
//! canonical forms carry a sign, and a diagram equal to its own negative is 0.

pub mod checks;
pub mod colored;
pub mod elt;
pub mod relations;
pub mod stu;
pub mod text;

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use colored::{connect_bracket, eta, make_jtilde, prop44_certificate, tau, Prop44Certificate};
pub use elt::{DiagElt, Signature};
pub use relations::{
    reduce_mod_relations, relation_space, relation_space_guarded, vanishes, RelationSpace,
};
pub use stu::{stu_expand, StuOrder};

pub type Mates = SmallVec<[u16; 32]>;

const NONE: u16 = u16::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JDiagram {
    /// Leg count per strand (strand diagrams).
    pub strands: SmallVec<[u8; 4]>,
    /// Color per leg (colored diagrams); empty for strand diagrams.
    pub colors: SmallVec<[u8; 16]>,
    pub colored: bool,
    pub mate: Mates,
}

impl JDiagram {
    /// The empty diagram on `k` strands.
    pub fn empty(k: usize) -> JDiagram {
        JDiagram {
            strands: SmallVec::from_elem(0, k),
            colors: SmallVec::new(),
            colored: false,
            mate: Mates::new(),
        }
    }

    pub fn empty_colored() -> JDiagram {
        JDiagram {
            strands: SmallVec::new(),
            colors: SmallVec::new(),
            colored: true,
            mate: Mates::new(),
        }
    }

    pub fn n_legs(&self) -> usize {
        if self.colored {
            self.colors.len()
        } else {
            self.strands.iter().map(|&x| x as usize).sum()
        }
    }

    pub fn n_vertices(&self) -> usize {
        (self.mate.len() - self.n_legs()) / 3
    }

    pub fn degree(&self) -> usize {
        (self.n_legs() + self.n_vertices()) / 2
    }

    pub fn is_chord(&self) -> bool {
        self.n_vertices() == 0
    }

    pub fn n_strands(&self) -> usize {
        self.strands.len()
    }

    /// First leg index of each strand, plus the total at the end.
    pub fn strand_offsets(&self) -> SmallVec<[usize; 5]> {
        let mut v = SmallVec::new();
        let mut s = 0;
        v.push(0);
        for &l in &self.strands {
            s += l as usize;
            v.push(s);
        }
        v
    }

    /// Strand of a leg.
    pub fn strand_of(&self, leg: usize) -> usize {
        let off = self.strand_offsets();
        (0..self.strands.len())
            .find(|&s| leg < off[s + 1])
            .expect("leg index in range")
    }

    /// Number of connected components of the dashed graph.
    pub fn components(&self) -> usize {
        let n = self.mate.len();
        let l = self.n_legs();
        let node = |h: usize| if h < l { h } else { l + (h - l) / 3 };
        let nn = l + self.n_vertices();
        let mut parent: Vec<usize> = (0..nn).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for h in 0..n {
            let (a, b) = (
                find(&mut parent, node(h)),
                find(&mut parent, node(self.mate[h] as usize)),
            );
            if a != b {
                parent[a] = b;
            }
        }
        (0..nn).filter(|&x| find(&mut parent, x) == x).count()
    }

    /// First Betti number of the dashed graph.
    pub fn b1(&self) -> usize {
        let edges = self.mate.len() / 2;
        let nodes = self.n_legs() + self.n_vertices();
        edges + self.components() - nodes
    }

    pub fn to_raw(&self) -> Raw {
        let l = self.n_legs();
        let off = self.strand_offsets();
        let strands = if self.colored {
            Vec::new()
        } else {
            (0..self.strands.len())
                .map(|s| (off[s] as u32..off[s + 1] as u32).collect())
                .collect()
        };
        let colors = if self.colored {
            (0..l).map(|i| (i as u32, self.colors[i])).collect()
        } else {
            Vec::new()
        };
        let vertices = (0..self.n_vertices()).map(|v| {
            let b = (l + 3 * v) as u32;
            [b, b + 1, b + 2]
        });
        let edges = (0..self.mate.len())
            .filter(|&h| (h as u16) < self.mate[h])
            .map(|h| (h as u32, self.mate[h] as u32))
            .collect();
        Raw {
            colored: self.colored,
            strands,
            colors,
            vertices: vertices.collect(),
            edges,
        }
    }

    /// Canonical representative and AS sign, or `None` when the diagram vanishes by AS.
    pub fn canonical(&self) -> Result<Option<(JDiagram, i64)>> {
        if self.colored {
            colored::canonical_colored(self)
        } else {
            canonical_strand(self)
        }
    }
}

/// A diagram with arbitrary half-edge tokens, used to build and transform diagrams.
#[derive(Clone, Debug, Default)]
pub struct Raw {
    pub colored: bool,
    pub strands: Vec<Vec<u32>>,
    pub colors: Vec<(u32, u8)>,
    pub vertices: Vec<[u32; 3]>,
    pub edges: Vec<(u32, u32)>,
}

impl Raw {
    /// Dense labeled diagram, validating that every half-edge is placed and matched exactly once.
    pub fn labeled(&self) -> Result<JDiagram> {
        let max = self
            .strands
            .iter()
            .flatten()
            .copied()
            .chain(self.colors.iter().map(|c| c.0))
            .chain(self.vertices.iter().flatten().copied())
            .max()
            .map(|m| m as usize + 1)
            .unwrap_or(0);
        let mut idx = vec![NONE; max];
        let mut next = 0u16;
        let mut place = |t: u32, idx: &mut Vec<u16>| -> Result<()> {
            let t = t as usize;
            if idx[t] != NONE {
                return Err(Error::Invalid(format!("half-edge {t} placed twice")));
            }
            idx[t] = next;
            next += 1;
            Ok(())
        };
        let mut strands = SmallVec::new();
        let mut colors = SmallVec::new();
        if self.colored {
            for &(t, c) in &self.colors {
                place(t, &mut idx)?;
                colors.push(c);
            }
        } else {
            for s in &self.strands {
                strands.push(s.len() as u8);
                for &t in s {
                    place(t, &mut idx)?;
                }
            }
        }
        for v in &self.vertices {
            for &t in v {
                place(t, &mut idx)?;
            }
        }
        let n = next as usize;
        let mut mate: Mates = SmallVec::from_elem(NONE, n);
        for &(a, b) in &self.edges {
            let (ia, ib) = (
                idx.get(a as usize).copied().unwrap_or(NONE),
                idx.get(b as usize).copied().unwrap_or(NONE),
            );
            if ia == NONE || ib == NONE || a == b {
                return Err(Error::Invalid(format!(
                    "edge ({a},{b}) references an unplaced half-edge"
                )));
            }
            if mate[ia as usize] != NONE || mate[ib as usize] != NONE {
                return Err(Error::Invalid(format!(
                    "half-edge in edge ({a},{b}) matched twice"
                )));
            }
            mate[ia as usize] = ib;
            mate[ib as usize] = ia;
        }
        if mate.iter().any(|&m| m == NONE) {
            return Err(Error::Invalid("unmatched half-edge".into()));
        }
        Ok(JDiagram {
            strands,
            colors,
            colored: self.colored,
            mate,
        })
    }

    pub fn canonical(&self) -> Result<Option<(JDiagram, i64)>> {
        self.labeled()?.canonical()
    }
}

/// Canonical form of a strand diagram. Legs stay fixed; vertices are numbered in
/// breadth-first discovery order from the legs. At a newly discovered vertex the
/// two remaining slots are ordered by the least leg reachable through each of
/// them, and ties are searched exhaustively for the lexicographically least mate
/// array. Each reversed cyclic order contributes a factor -1.
pub fn canonical_strand(d: &JDiagram) -> Result<Option<(JDiagram, i64)>> {
    let l = d.n_legs();
    let nv = d.n_vertices();
    if nv == 0 {
        return Ok(Some((d.clone(), 1)));
    }
    for v in 0..nv {
        for r in 0..3 {
            let m = d.mate[l + 3 * v + r] as usize;
            if m >= l && (m - l) / 3 == v {
                // a dashed loop at one vertex is fixed by an orientation-reversing symmetry
                return Ok(None);
            }
        }
    }
    let n = d.mate.len();
    let mut s = Search {
        d,
        l,
        n,
        best: None,
        best_sign: 1,
        zero: false,
        unreachable: false,
    };
    let mut o2n = vec![NONE; n];
    let mut n2o = vec![NONE; n];
    for i in 0..l {
        o2n[i] = i as u16;
        n2o[i] = i as u16;
    }
    let mut out = Vec::with_capacity(n);
    s.dfs(&o2n, &n2o, 0, 0, &mut out, 1);
    if s.unreachable {
        return Err(Error::Invalid("dashed component without legs".into()));
    }
    if s.zero {
        return Ok(None);
    }
    let best = s.best.expect("search visits at least one labeling");
    Ok(Some((
        JDiagram {
            strands: d.strands.clone(),
            colors: SmallVec::new(),
            colored: false,
            mate: best.into_iter().collect(),
        },
        s.best_sign,
    )))
}

struct Search<'a> {
    d: &'a JDiagram,
    l: usize,
    n: usize,
    best: Option<Vec<u16>>,
    best_sign: i64,
    zero: bool,
    unreachable: bool,
}

impl Search<'_> {
    /// Least leg reachable from half-edge `h` through its edge without entering vertex `v`.
    fn reach_key(&self, h: usize, v: usize) -> usize {
        let l = self.l;
        let mut seen = vec![false; self.n];
        let mut stack = vec![self.d.mate[h] as usize];
        let mut best = usize::MAX;
        while let Some(x) = stack.pop() {
            if x < l {
                best = best.min(x);
                continue;
            }
            let w = (x - l) / 3;
            if w == v || seen[l + 3 * w] {
                continue;
            }
            seen[l + 3 * w] = true;
            for r in 0..3 {
                stack.push(self.d.mate[l + 3 * w + r] as usize);
            }
        }
        best
    }

    /// `Some(less)` when `out` is a prefix not exceeding the best encoding, `None` to prune.
    fn prefix_state(&self, out: &[u16]) -> Option<bool> {
        match &self.best {
            None => Some(true),
            Some(b) => match out.cmp(&b[..out.len()]) {
                std::cmp::Ordering::Less => Some(true),
                std::cmp::Ordering::Equal => Some(false),
                std::cmp::Ordering::Greater => None,
            },
        }
    }

    fn dfs(
        &mut self,
        o2n: &[u16],
        n2o: &[u16],
        nv: usize,
        start: usize,
        out: &mut Vec<u16>,
        sign: i64,
    ) {
        if self.unreachable {
            return;
        }
        let base = out.len();
        let Some(mut less) = self.prefix_state(out) else {
            return;
        };
        let mut i = start;
        while i < self.n {
            let h = n2o[i];
            if h == NONE {
                self.unreachable = true;
                out.truncate(base);
                return;
            }
            let m = self.d.mate[h as usize] as usize;
            if o2n[m] == NONE {
                let v = (m - self.l) / 3;
                let r = (m - self.l) % 3;
                let b = self.l + 3 * v;
                let k = self.l + 3 * nv;
                let x = b + (r + 1) % 3;
                let y = b + (r + 2) % 3;
                let (kx, ky) = (self.reach_key(x, v), self.reach_key(y, v));
                let mut choices: SmallVec<[((usize, usize), i64); 2]> = SmallVec::new();
                if kx <= ky {
                    choices.push(((x, y), 1));
                }
                if ky <= kx {
                    choices.push(((y, x), -1));
                }
                for ((p, q), sg) in choices {
                    let mut o = o2n.to_vec();
                    let mut nn = n2o.to_vec();
                    for (old, new) in [(m, k), (p, k + 1), (q, k + 2)] {
                        o[old] = new as u16;
                        nn[new] = old as u16;
                    }
                    self.dfs(&o, &nn, nv + 1, i, out, sign * sg);
                }
                out.truncate(base);
                return;
            }
            let val = o2n[m];
            if !less {
                let b = self
                    .best
                    .as_ref()
                    .expect("equal prefix implies a best encoding");
                match val.cmp(&b[i]) {
                    std::cmp::Ordering::Greater => {
                        out.truncate(base);
                        return;
                    }
                    std::cmp::Ordering::Less => less = true,
                    std::cmp::Ordering::Equal => {}
                }
            }
            out.push(val);
            i += 1;
        }
        if less {
            self.best = Some(out.clone());
            self.best_sign = sign;
            self.zero = false;
        } else if sign != self.best_sign {
            self.zero = true;
        }
        out.truncate(base);
    }
}

/// `J_n` on two strands: a dashed spine whose top and bottom ends reach strand 2
/// and whose `n-1` rungs reach strand 1, drawn with strand 1 left of strand 2
/// and counterclockwise cyclic orders. Returned as built, not canonicalized.
pub fn make_jn(n: usize) -> Result<JDiagram> {
    jn_raw(n)?.labeled()
}

pub(crate) fn jn_raw(n: usize) -> Result<Raw> {
    if n < 3 {
        return Err(Error::Invalid(format!("J_n needs n >= 3, got {n}")));
    }
    let m = n - 1;
    // tokens: strand-1 legs 0..m, strand-2 legs m and m+1, vertex v slots 1000+3v+r
    let slot = |v: usize, r: usize| (1000 + 3 * v + r) as u32;
    let mut raw = Raw {
        colored: false,
        strands: vec![(0..m as u32).collect(), vec![m as u32, m as u32 + 1]],
        vertices: (0..m)
            .map(|v| [slot(v, 0), slot(v, 1), slot(v, 2)])
            .collect(),
        ..Default::default()
    };
    // top vertex (down, s2 leg, s1 leg); bottom vertex (up, s1 leg, s2 leg); middle (up, s1 leg, down)
    raw.edges.push((slot(0, 1), m as u32));
    raw.edges.push((slot(0, 2), 0));
    raw.edges.push((slot(m - 1, 1), (m - 1) as u32));
    raw.edges.push((slot(m - 1, 2), m as u32 + 1));
    for v in 1..m - 1 {
        raw.edges.push((slot(v, 1), v as u32));
    }
    let down = |v: usize| if v == 0 { slot(0, 0) } else { slot(v, 2) };
    for v in 0..m - 1 {
        raw.edges.push((down(v), slot(v + 1, 0)));
    }
    Ok(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};

    fn y_diagram(order: [u32; 3]) -> JDiagram {
        Raw {
            strands: vec![vec![0, 1], vec![2]],
            vertices: vec![[10, 11, 12]],
            edges: vec![(order[0], 10), (order[1], 11), (order[2], 12)],
            ..Default::default()
        }
        .labeled()
        .unwrap()
    }

    /// Shuffle vertex order and rotate or reverse each slot triple; returns the AS sign.
    fn scramble(raw: &Raw, rng: &mut impl Rng) -> (Raw, i64) {
        let mut r = raw.clone();
        let mut sign = 1;
        for v in r.vertices.iter_mut() {
            v.rotate_left(rng.gen_range(0..3));
            if rng.gen_bool(0.5) {
                v.swap(1, 2);
                sign = -sign;
            }
        }
        r.vertices.shuffle(rng);
        r.edges.shuffle(rng);
        (r, sign)
    }

    #[test]
    fn chord_is_canonical() {
        let c = Raw {
            strands: vec![vec![0], vec![1]],
            edges: vec![(0, 1)],
            ..Default::default()
        }
        .labeled()
        .unwrap();
        assert_eq!(c.canonical().unwrap(), Some((c.clone(), 1)));
        assert_eq!(c.degree(), 1);
    }

    #[test]
    fn reversed_vertex_flips_sign() {
        let (a, sa) = y_diagram([0, 1, 2]).canonical().unwrap().unwrap();
        let (b, sb) = y_diagram([0, 2, 1]).canonical().unwrap().unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, -sb);
    }

    #[test]
    fn malformed_and_vanishing() {
        let bubble = Raw {
            strands: vec![vec![0], vec![1]],
            vertices: vec![[10, 11, 12], [20, 21, 22]],
            edges: vec![(0, 10), (11, 21), (12, 22), (20, 1)],
            ..Default::default()
        };
        assert!(bubble.canonical().unwrap().is_some());
        let tadpole = Raw {
            strands: vec![vec![0]],
            vertices: vec![[10, 11, 12]],
            edges: vec![(0, 10), (11, 12)],
            ..Default::default()
        };
        assert_eq!(tadpole.canonical().unwrap(), None);
        let dangling = Raw {
            strands: vec![vec![0]],
            edges: vec![(0, 5)],
            ..Default::default()
        };
        assert!(dangling.labeled().is_err());
        let twice = Raw {
            strands: vec![vec![0, 0]],
            edges: vec![(0, 0)],
            ..Default::default()
        };
        assert!(twice.labeled().is_err());
        let theta = Raw {
            strands: vec![vec![0, 1]],
            vertices: vec![[10, 11, 12], [20, 21, 22], [30, 31, 32]],
            edges: vec![(0, 1), (10, 20), (11, 21), (12, 31), (22, 30), (32, 33)],
            ..Default::default()
        };
        assert!(theta.labeled().is_err());
        let closed = Raw {
            strands: vec![vec![0, 1]],
            vertices: vec![[10, 11, 12], [20, 21, 22]],
            edges: vec![(0, 1), (10, 20), (11, 21), (12, 22)],
            ..Default::default()
        };
        assert!(closed.canonical().is_err());
    }

    #[test]
    fn random_relabelings_agree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        // J_5 and a degree-4 diagram with a cycle (box on two strands)
        let boxd = Raw {
            strands: vec![vec![0, 1], vec![2, 3]],
            vertices: vec![[10, 11, 12], [20, 21, 22], [30, 31, 32], [40, 41, 42]],
            edges: vec![
                (0, 10),
                (11, 21),
                (12, 41),
                (1, 40),
                (42, 31),
                (2, 20),
                (22, 32),
                (3, 30),
            ],
            ..Default::default()
        };
        for (raw, deg) in [(jn_raw(5).unwrap(), 5), (boxd, 4)] {
            let (c0, s0) = raw.canonical().unwrap().unwrap();
            assert_eq!(raw.labeled().unwrap().degree(), deg);
            for _ in 0..1000 {
                let (r, sign) = scramble(&raw, &mut rng);
                let (c, s) = r.canonical().unwrap().unwrap();
                assert_eq!(c, c0);
                assert_eq!(s, s0 * sign);
                assert_eq!(c.canonical().unwrap(), Some((c.clone(), 1)));
            }
        }
    }

    #[test]
    fn jn_shape() {
        for n in 3..=9 {
            let j = make_jn(n).unwrap();
            assert_eq!(j.degree(), n);
            assert_eq!(j.n_legs(), n + 1);
            assert_eq!(j.n_vertices(), n - 1);
            assert_eq!(j.strands.as_slice(), &[(n - 1) as u8, 2]);
            assert_eq!(j.b1(), 0);
            assert_eq!(j.components(), 1);
        }
        assert!(make_jn(2).is_err());
    }
}
