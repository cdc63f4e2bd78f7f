//! Weight systems of the standard representations of gl_N, sl_N, so_N and sp_2N on
//! two strands, by state sums over chord resolutions with symbolic `N`.
//!
//! Values live in the span of three operators on `V ⊗ V`:
//! `I = id ⊗ id`, `P = Σ e_ij ⊗ e_ji` and the cup-cap `K` of the invariant form
//! (`K = Σ e_ij ⊗ e_ij` for so_N, `K = Σ ω_ac ω_bd e_ab ⊗ e_cd` for sp_2N with
//! `ω = [[0, I], [-I, 0]]`). This span is closed under composition.

use std::fmt;
use std::str::FromStr;

use crate::diagrams::{DiagElt, JDiagram, Signature};
use crate::error::{Error, Result};
use crate::scalar::{FormalScalar, Rat, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StdSystem {
    GlN,
    SlN,
    SoN,
    Sp2N,
}

impl StdSystem {
    pub const ALL: [StdSystem; 4] = [
        StdSystem::GlN,
        StdSystem::SlN,
        StdSystem::SoN,
        StdSystem::Sp2N,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StdSystem::GlN => "glN",
            StdSystem::SlN => "slN",
            StdSystem::SoN => "soN",
            StdSystem::Sp2N => "sp2N",
        }
    }

    /// Dimension of the standard representation as a formal scalar.
    pub fn dim(self) -> FormalScalar {
        let n = FormalScalar::symbol(Symbol::N);
        match self {
            StdSystem::Sp2N => n.scale(&Rat::int(2)),
            _ => n,
        }
    }

    /// Casimir coefficients on the resolutions (crossing, parallel, turn).
    fn casimir(self) -> [FormalScalar; 3] {
        let half = FormalScalar::rat(1, 2);
        match self {
            StdSystem::GlN => [
                FormalScalar::one(),
                FormalScalar::zero(),
                FormalScalar::zero(),
            ],
            StdSystem::SlN => [
                FormalScalar::one(),
                -FormalScalar::monomial(Symbol::N, -1),
                FormalScalar::zero(),
            ],
            StdSystem::SoN | StdSystem::Sp2N => [half.clone(), FormalScalar::zero(), -half],
        }
    }

    fn symplectic(self) -> bool {
        self == StdSystem::Sp2N
    }
}

impl FromStr for StdSystem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        StdSystem::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                Error::Parse(format!("unknown weight system {s:?} (glN, slN, soN, sp2N)"))
            })
    }
}

impl fmt::Display for StdSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Basis operators of `End(V)^{⊗2}` reached by the weight systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    I,
    P,
    K,
}

impl Op {
    pub const ALL: [Op; 3] = [Op::I, Op::P, Op::K];

    fn idx(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Op::I => "I",
            Op::P => "P",
            Op::K => "K",
        }
    }
}

/// Element of the operator span with coefficients Laurent in `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorElt {
    pub system: StdSystem,
    coeffs: [FormalScalar; 3],
}

impl OperatorElt {
    pub fn zero(system: StdSystem) -> Self {
        OperatorElt {
            system,
            coeffs: [
                FormalScalar::zero(),
                FormalScalar::zero(),
                FormalScalar::zero(),
            ],
        }
    }

    pub fn basis(system: StdSystem, op: Op) -> Self {
        let mut x = Self::zero(system);
        x.coeffs[op.idx()] = FormalScalar::one();
        x
    }

    pub fn identity(system: StdSystem) -> Self {
        Self::basis(system, Op::I)
    }

    pub fn coeff(&self, op: Op) -> &FormalScalar {
        &self.coeffs[op.idx()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.system != o.system {
            return Err(Error::Invalid(format!(
                "weight systems differ: {} vs {}",
                self.system, o.system
            )));
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, o: &Self, c: &FormalScalar) -> Result<()> {
        self.check(o)?;
        for i in 0..3 {
            self.coeffs[i] += &(&o.coeffs[i] * c);
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let mut r = self.clone();
        r.add_scaled(o, &FormalScalar::one())?;
        Ok(r)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        let mut r = self.clone();
        r.add_scaled(o, &FormalScalar::int(-1))?;
        Ok(r)
    }

    pub fn scale(&self, c: &FormalScalar) -> Self {
        let mut r = self.clone();
        for x in r.coeffs.iter_mut() {
            *x = &*x * c;
        }
        r
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut r = Self::zero(self.system);
        for a in Op::ALL {
            for b in Op::ALL {
                let c = &self.coeffs[a.idx()] * &o.coeffs[b.idx()];
                if c.is_zero() {
                    continue;
                }
                let (op, k) = compose_basis(self.system, a, b);
                r.coeffs[op.idx()] += &(&c * &k);
            }
        }
        Ok(r)
    }

    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.compose(o)?.sub(&o.compose(self)?)
    }

    /// Substitute a nonzero integer for `N` (coefficients are Laurent in `N`).
    pub fn evaluate(&self, n: i64) -> Result<[Rat; 3]> {
        if n == 0 {
            return Err(Error::Invalid("N must be nonzero".into()));
        }
        let nr = Rat::int(n);
        let mut out = [Rat::zero(), Rat::zero(), Rat::zero()];
        for i in 0..3 {
            for (m, c) in self.coeffs[i].terms() {
                if Symbol::ALL.iter().any(|&s| s != Symbol::N && m.exp(s) != 0) {
                    return Err(Error::Invalid("value has symbols other than N".into()));
                }
                let e = m.exp(Symbol::N);
                let mut p = Rat::one();
                for _ in 0..e.unsigned_abs() {
                    p = &p * &nr;
                }
                if e < 0 {
                    p = p.recip();
                }
                out[i] += &(c * &p);
            }
        }
        Ok(out)
    }

    pub fn to_sexpr(&self) -> String {
        let parts: Vec<String> = Op::ALL
            .iter()
            .filter(|op| !self.coeffs[op.idx()].is_zero())
            .map(|op| format!("(* {} {})", self.coeffs[op.idx()].to_sexpr(), op.name()))
            .collect();
        match parts.len() {
            0 => "0".into(),
            1 => parts[0].clone(),
            _ => format!("(+ {})", parts.join(" ")),
        }
    }
}

impl fmt::Display for OperatorElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

/// Composition table: `a ∘ b = k · op`.
pub fn compose_basis(system: StdSystem, a: Op, b: Op) -> (Op, FormalScalar) {
    let one = FormalScalar::one();
    let eps = if system.symplectic() {
        FormalScalar::int(-1)
    } else {
        FormalScalar::one()
    };
    match (a, b) {
        (Op::I, x) | (x, Op::I) => (x, one),
        (Op::P, Op::P) => (Op::I, one),
        (Op::P, Op::K) | (Op::K, Op::P) => (Op::K, eps),
        (Op::K, Op::K) => (Op::K, system.dim()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Res {
    Cross,
    Parallel,
    Turn,
}

/// A port graph edge: plain identification, or a form factor `ω(from, to)` times `sign`.
#[derive(Clone, Copy, Debug)]
enum Link {
    Delta,
    Omega { from: usize, sign: i64 },
}

/// Result of tracing one resolved diagram: the open pattern, its sign and the number of closed loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Traced {
    pub pattern: Op,
    pub sign: i64,
    pub loops: usize,
}

/// Trace the curves of a chord diagram after resolving each chord.
/// Ports: `2p` below leg `p`, `2p+1` above it; `2L + 2s` top of strand `s`, `2L + 2s + 1` its bottom.
fn trace(d: &JDiagram, res: &[Res], symplectic: bool) -> Option<Traced> {
    let l = d.n_legs();
    let n = 2 * l + 4;
    let mut edges: Vec<(usize, usize, Link)> = Vec::new();
    let off = d.strand_offsets();
    for s in 0..2 {
        let (top, bottom) = (2 * l + 2 * s, 2 * l + 2 * s + 1);
        let (lo, hi) = (off[s], off[s + 1]);
        if lo == hi {
            edges.push((top, bottom, Link::Delta));
            continue;
        }
        edges.push((top, 2 * lo + 1, Link::Delta));
        for p in lo..hi - 1 {
            edges.push((2 * p, 2 * (p + 1) + 1, Link::Delta));
        }
        edges.push((2 * (hi - 1), bottom, Link::Delta));
    }
    let chords: Vec<(usize, usize)> = (0..l)
        .filter(|&p| p < d.mate[p] as usize)
        .map(|p| (p, d.mate[p] as usize))
        .collect();
    for (&(a, b), r) in chords.iter().zip(res) {
        match r {
            Res::Cross => {
                edges.push((2 * a, 2 * b + 1, Link::Delta));
                edges.push((2 * b, 2 * a + 1, Link::Delta));
            }
            Res::Parallel => {
                edges.push((2 * a, 2 * a + 1, Link::Delta));
                edges.push((2 * b, 2 * b + 1, Link::Delta));
            }
            Res::Turn => {
                let top_sign = if symplectic { -1 } else { 1 };
                edges.push((
                    2 * a + 1,
                    2 * b + 1,
                    Link::Omega {
                        from: 2 * a + 1,
                        sign: top_sign,
                    },
                ));
                edges.push((
                    2 * b,
                    2 * a,
                    Link::Omega {
                        from: 2 * b,
                        sign: 1,
                    },
                ));
            }
        }
    }
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &(a, b, _)) in edges.iter().enumerate() {
        inc[a].push(i);
        inc[b].push(i);
    }
    let mut seen = vec![false; n];
    // follow the curve from `start`: end node, sign, and number of form factors
    let walk = |start: usize, seen: &mut Vec<bool>| -> (usize, i64, usize) {
        let (mut cur, mut e) = (start, inc[start][0]);
        let (mut sign, mut k) = (1i64, 0usize);
        seen[start] = true;
        loop {
            let (a, b, lk) = edges[e];
            let x = if a == cur { b } else { a };
            if let Link::Omega { from, sign: s } = lk {
                k += 1;
                sign *= s;
                if symplectic && from != cur {
                    sign = -sign;
                }
            }
            seen[x] = true;
            if x == start || inc[x].len() == 1 {
                return (x, sign, k);
            }
            e = if inc[x][0] == e { inc[x][1] } else { inc[x][0] };
            cur = x;
        }
    };
    // `ω^k` is `(-1)^{k/2}` for even `k` and `(-1)^{(k-1)/2} ω` for odd `k`
    let power_sign = |k: usize| -> i64 {
        if symplectic && (k / 2) % 2 == 1 {
            -1
        } else {
            1
        }
    };
    let (t1, t2, b1, b2) = (2 * l, 2 * l + 2, 2 * l + 1, 2 * l + 3);
    let (end1, s1, k1) = walk(t1, &mut seen);
    let (pattern, second) = if end1 == b1 || end1 == b2 {
        (if end1 == b1 { Op::I } else { Op::P }, t2)
    } else {
        (Op::K, b1)
    };
    let (_, s2, k2) = walk(second, &mut seen);
    let odd = pattern == Op::K;
    if (k1 % 2 == 1) != odd || (k2 % 2 == 1) != odd {
        return None;
    }
    let mut sign = s1 * s2 * power_sign(k1) * power_sign(k2);
    let mut loops = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let (_, s, k) = walk(start, &mut seen);
        if k % 2 == 1 {
            return None;
        }
        sign *= s * power_sign(k);
        loops += 1;
    }
    Some(Traced {
        pattern,
        sign,
        loops,
    })
}

/// Value of one chord diagram on two strands.
pub fn chord_value(system: StdSystem, d: &JDiagram) -> Result<OperatorElt> {
    if d.colored || d.n_strands() != 2 {
        return Err(Error::Invalid(
            "standard weight systems act on diagrams on two strands".into(),
        ));
    }
    if !d.is_chord() {
        return Err(Error::Invalid(
            "standard weight systems need chord diagrams; apply stu_expand first".into(),
        ));
    }
    let cas = system.casimir();
    let options: Vec<(Res, FormalScalar)> = [Res::Cross, Res::Parallel, Res::Turn]
        .into_iter()
        .zip(cas)
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let m = d.n_legs() / 2;
    let dim = system.dim();
    let mut out = OperatorElt::zero(system);
    let total = options.len().pow(m as u32);
    let mut res = vec![Res::Cross; m];
    for state in 0..total {
        let mut s = state;
        let mut c = FormalScalar::one();
        for r in res.iter_mut() {
            let (o, k) = &options[s % options.len()];
            s /= options.len();
            *r = *o;
            c = &c * k;
        }
        let Some(t) = trace(d, &res, system.symplectic()) else {
            continue;
        };
        let mut v = c.scale(&Rat::int(t.sign));
        for _ in 0..t.loops {
            v = &v * &dim;
        }
        out.coeffs[t.pattern.idx()] += &v;
    }
    Ok(out)
}

/// The standard weight system on a chord-diagram element of `A(↓↓)`.
pub fn weight_standard(system: StdSystem, x: &DiagElt) -> Result<OperatorElt> {
    if *x.signature() != Signature::Strands(2) {
        return Err(Error::Invalid(
            "standard weight systems act on A(↓↓)".into(),
        ));
    }
    let mut out = OperatorElt::zero(system);
    for (d, c) in x.terms() {
        out.add_scaled(&chord_value(system, d)?, c)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::relations::chord_diagram;

    #[test]
    fn gl_values_on_small_diagrams() {
        let g = StdSystem::GlN;
        let one = DiagElt::one(Signature::Strands(2));
        assert_eq!(weight_standard(g, &one).unwrap(), OperatorElt::identity(g));
        let t = DiagElt::chord(2, 1, 2).unwrap();
        assert_eq!(
            weight_standard(g, &t).unwrap(),
            OperatorElt::basis(g, Op::P)
        );
        let tt = t.stack_product(&t).unwrap();
        assert_eq!(weight_standard(g, &tt).unwrap(), OperatorElt::identity(g));
        // a chord on one strand is the Casimir N · id
        let c = chord_diagram(&[2, 0], &[(0, 1)]);
        assert_eq!(
            chord_value(g, &c).unwrap(),
            OperatorElt::identity(g).scale(&g.dim())
        );
    }

    #[test]
    fn composition_table() {
        for s in StdSystem::ALL {
            let p = OperatorElt::basis(s, Op::P);
            let k = OperatorElt::basis(s, Op::K);
            assert_eq!(p.compose(&p).unwrap(), OperatorElt::identity(s));
            assert_eq!(p.compose(&k).unwrap(), k.compose(&p).unwrap());
            assert_eq!(k.compose(&k).unwrap(), k.scale(&s.dim()));
        }
        assert!(OperatorElt::basis(StdSystem::GlN, Op::P)
            .compose(&OperatorElt::identity(StdSystem::SoN))
            .is_err());
    }

    #[test]
    fn non_chord_input_is_rejected() {
        let j = crate::diagrams::make_jn(3).unwrap();
        assert!(chord_value(StdSystem::GlN, &j).is_err());
    }
}
