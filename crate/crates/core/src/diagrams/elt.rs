//! Formal linear combinations of Jacobi diagrams and the strand operations.

use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use super::{JDiagram, Mates, Raw};
use crate::error::{Error, Result};
use crate::kohno::{TnElt, FREE_NAMES, LOW_NAMES};
use crate::scalar::{accumulate, FormalScalar};
use crate::series::Series;

/// Skeleton of a diagram space: `k` ordered downward strands, or a color set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Signature {
    Strands(usize),
    Colors(Vec<String>),
}

impl Signature {
    pub fn ab() -> Signature {
        Signature::Colors(vec!["a".into(), "b".into()])
    }

    pub fn is_colored(&self) -> bool {
        matches!(self, Signature::Colors(_))
    }
}

/// Linear combination of canonical diagrams, optionally truncated above degree `cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagElt {
    sig: Signature,
    cap: Option<usize>,
    terms: HashMap<JDiagram, FormalScalar>,
}

impl DiagElt {
    pub fn zero(sig: Signature) -> DiagElt {
        DiagElt {
            sig,
            cap: None,
            terms: HashMap::new(),
        }
    }

    pub fn one(sig: Signature) -> DiagElt {
        let mut x = DiagElt::zero(sig.clone());
        let e = match &sig {
            Signature::Strands(k) => JDiagram::empty(*k),
            Signature::Colors(_) => JDiagram::empty_colored(),
        };
        x.terms.insert(e, FormalScalar::one());
        x
    }

    /// `c` times a diagram, brought to canonical form.
    pub fn from_diagram(sig: Signature, d: &JDiagram, c: FormalScalar) -> Result<DiagElt> {
        let mut x = DiagElt::zero(sig);
        x.add_diagram(d, c)?;
        Ok(x)
    }

    pub fn from_raw(sig: Signature, raw: &Raw) -> Result<DiagElt> {
        DiagElt::from_diagram(sig, &raw.labeled()?, FormalScalar::one())
    }

    /// The chord `t_ij` on `k` strands (strands numbered from 1).
    pub fn chord(k: usize, i: usize, j: usize) -> Result<DiagElt> {
        if i == j || i == 0 || j == 0 || i > k || j > k {
            return Err(Error::Invalid(format!("no chord t{i}{j} on {k} strands")));
        }
        let mut strands = vec![Vec::new(); k];
        strands[i - 1].push(0);
        strands[j - 1].push(1);
        DiagElt::from_raw(
            Signature::Strands(k),
            &Raw {
                strands,
                edges: vec![(0, 1)],
                ..Default::default()
            },
        )
    }

    /// Image of an element of `U(t_n)` under `t_ij -> chord(i, j)`.
    pub fn from_tn(x: &TnElt, k: usize) -> Result<DiagElt> {
        let n = x.n() as usize;
        if k < n {
            return Err(Error::Invalid(format!(
                "U(t_{n}) does not map to {k} strands"
            )));
        }
        let gen = |name: &str| -> Result<DiagElt> {
            let (i, j) = crate::kohno::parse_generator(name, n as u8)?;
            DiagElt::chord(k, i as usize, j as usize)
        };
        let free: Vec<DiagElt> = FREE_NAMES
            .iter()
            .map(|s| gen(s))
            .collect::<Result<_>>()
            .unwrap_or_default();
        let low: Vec<DiagElt> = LOW_NAMES.iter().map(|s| gen(s)).collect::<Result<_>>()?;
        let c = gen("t12")?.add(&gen("t13")?)?.add(&gen("t23")?)?;
        let mut out = DiagElt::zero(Signature::Strands(k));
        out.cap = Some(x.cap());
        let mut cpow: Vec<DiagElt> = vec![DiagElt::one(Signature::Strands(k))];
        for (m, coef) in x.terms() {
            let mut t = DiagElt::one(Signature::Strands(k));
            for &g in m.free.iter() {
                t = t.stack_product(&free[g as usize])?;
            }
            for &g in m.low.iter() {
                t = t.stack_product(&low[g as usize])?;
            }
            while cpow.len() <= m.c as usize {
                let next = cpow.last().expect("nonempty").stack_product(&c)?;
                cpow.push(next);
            }
            t = t.stack_product(&cpow[m.c as usize])?;
            out.add_scaled_in(&t, coef);
        }
        Ok(out)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn cap_opt(&self) -> Option<usize> {
        self.cap
    }

    pub fn with_cap(&self, cap: usize) -> DiagElt {
        DiagElt {
            sig: self.sig.clone(),
            cap: Some(cap),
            terms: self
                .terms
                .iter()
                .filter(|(d, _)| d.degree() <= cap)
                .map(|(d, c)| (d.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn terms(&self) -> &HashMap<JDiagram, FormalScalar> {
        &self.terms
    }

    /// Terms in a deterministic order (degree, then diagram).
    pub fn sorted_terms(&self) -> Vec<(&JDiagram, &FormalScalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| (a.0.degree(), a.0).cmp(&(b.0.degree(), b.0)));
        v
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, d: &JDiagram) -> Result<FormalScalar> {
        match d.canonical()? {
            None => Ok(FormalScalar::zero()),
            Some((c, s)) => Ok(self
                .terms
                .get(&c)
                .map(|x| x.scale(&crate::scalar::Rat::int(s)))
                .unwrap_or_default()),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|d| d.degree()).max().unwrap_or(0)
    }

    pub fn component(&self, deg: usize) -> DiagElt {
        DiagElt {
            sig: self.sig.clone(),
            cap: self.cap,
            terms: self
                .terms
                .iter()
                .filter(|(d, _)| d.degree() == deg)
                .map(|(d, c)| (d.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn filter(&self, f: impl Fn(&JDiagram) -> bool) -> DiagElt {
        DiagElt {
            sig: self.sig.clone(),
            cap: self.cap,
            terms: self
                .terms
                .iter()
                .filter(|(d, _)| f(d))
                .map(|(d, c)| (d.clone(), c.clone()))
                .collect(),
        }
    }

    /// Add `c` times a (not necessarily canonical) diagram.
    pub fn add_diagram(&mut self, d: &JDiagram, c: FormalScalar) -> Result<()> {
        self.check_shape(d)?;
        if self.cap.is_some_and(|k| d.degree() > k) || c.is_zero() {
            return Ok(());
        }
        if let Some((cd, s)) = d.canonical()? {
            let c = if s < 0 { -c } else { c };
            accumulate(&mut self.terms, cd, c);
        }
        Ok(())
    }

    fn check_shape(&self, d: &JDiagram) -> Result<()> {
        match &self.sig {
            Signature::Strands(k) if !d.colored && d.strands.len() == *k => Ok(()),
            Signature::Colors(cs)
                if d.colored && d.colors.iter().all(|&c| (c as usize) < cs.len()) =>
            {
                Ok(())
            }
            _ => Err(Error::Invalid(format!(
                "diagram does not fit signature {:?}",
                self.sig
            ))),
        }
    }

    fn add_scaled_in(&mut self, o: &DiagElt, c: &FormalScalar) {
        for (d, x) in &o.terms {
            if self.cap.is_some_and(|k| d.degree() > k) {
                continue;
            }
            accumulate(&mut self.terms, d.clone(), x * c);
        }
    }

    fn same_sig(&self, o: &DiagElt) -> Result<()> {
        if self.sig != o.sig {
            return Err(Error::Invalid(format!(
                "signature mismatch: {:?} vs {:?}",
                self.sig, o.sig
            )));
        }
        Ok(())
    }

    fn min_cap(&self, o: &DiagElt) -> Option<usize> {
        match (self.cap, o.cap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn add(&self, o: &DiagElt) -> Result<DiagElt> {
        self.same_sig(o)?;
        let mut x = self.clone();
        x.cap = self.min_cap(o);
        let own = x.cap;
        x.terms.retain(|d, _| own.is_none_or(|k| d.degree() <= k));
        x.add_scaled_in(o, &FormalScalar::one());
        Ok(x)
    }

    pub fn sub(&self, o: &DiagElt) -> Result<DiagElt> {
        self.add(&o.scale(&FormalScalar::int(-1)))
    }

    pub fn scale(&self, c: &FormalScalar) -> DiagElt {
        let mut x = DiagElt {
            sig: self.sig.clone(),
            cap: self.cap,
            terms: HashMap::new(),
        };
        x.add_scaled_in(self, c);
        x
    }

    /// Stacking product with `self` on top; for colored diagrams, disjoint union.
    pub fn stack_product(&self, o: &DiagElt) -> Result<DiagElt> {
        self.same_sig(o)?;
        let mut out = DiagElt {
            sig: self.sig.clone(),
            cap: self.min_cap(o),
            terms: HashMap::new(),
        };
        let mut acc: HashMap<JDiagram, FormalScalar> = HashMap::new();
        for (x, cx) in &self.terms {
            for (y, cy) in &o.terms {
                if out.cap.is_some_and(|k| x.degree() + y.degree() > k) {
                    continue;
                }
                accumulate(&mut acc, stack(x, y), cx * cy);
            }
        }
        for (d, c) in acc {
            out.add_diagram(&d, c)?;
        }
        Ok(out)
    }

    pub fn commutator(&self, o: &DiagElt) -> Result<DiagElt> {
        self.stack_product(o)?.sub(&o.stack_product(self)?)
    }

    /// Apply a diagram-level map returning signed diagrams.
    pub fn map_diagrams(
        &self,
        sig: Signature,
        f: impl Fn(&JDiagram) -> Result<Vec<(JDiagram, i64)>>,
    ) -> Result<DiagElt> {
        let mut out = DiagElt {
            sig,
            cap: self.cap,
            terms: HashMap::new(),
        };
        for (d, c) in &self.terms {
            for (e, s) in f(d)? {
                out.add_diagram(&e, c.scale(&crate::scalar::Rat::int(s)))?;
            }
        }
        Ok(out)
    }

    fn strands(&self) -> Result<usize> {
        match self.sig {
            Signature::Strands(k) => Ok(k),
            _ => Err(Error::Invalid(
                "strand operation on a colored element".into(),
            )),
        }
    }

    fn check_index(&self, i: usize) -> Result<usize> {
        let k = self.strands()?;
        if i == 0 || i > k {
            return Err(Error::Invalid(format!("strand {i} out of range 1..={k}")));
        }
        Ok(k)
    }

    /// Δ_i: replace strand `i` by two parallel copies, summing over leg placements.
    pub fn double_strand(&self, i: usize) -> Result<DiagElt> {
        let k = self.check_index(i)?;
        self.map_diagrams(Signature::Strands(k + 1), |d| {
            let off = d.strand_offsets();
            let (lo, hi) = (off[i - 1], off[i]);
            let legs = hi - lo;
            let mut res = Vec::with_capacity(1 << legs);
            for mask in 0..(1u32 << legs) {
                let first: Vec<usize> = (lo..hi).filter(|&p| mask & (1 << (p - lo)) == 0).collect();
                let second: Vec<usize> =
                    (lo..hi).filter(|&p| mask & (1 << (p - lo)) != 0).collect();
                let mut order: Vec<usize> = (0..lo).collect();
                order.extend(&first);
                order.extend(&second);
                order.extend(hi..off[k]);
                let mut lens: SmallVec<[u8; 4]> = d.strands.clone();
                lens[i - 1] = first.len() as u8;
                lens.insert(i, second.len() as u8);
                res.push((relegs(d, lens, &order), 1));
            }
            Ok(res)
        })
    }

    /// ε_i: delete strand `i`, killing diagrams with legs on it.
    pub fn delete_strand(&self, i: usize) -> Result<DiagElt> {
        let k = self.check_index(i)?;
        self.map_diagrams(Signature::Strands(k - 1), |d| {
            if d.strands[i - 1] != 0 {
                return Ok(Vec::new());
            }
            let mut lens = d.strands.clone();
            lens.remove(i - 1);
            let order: Vec<usize> = (0..d.n_legs()).collect();
            Ok(vec![(relegs(d, lens, &order), 1)])
        })
    }

    /// S_i: reverse strand `i`, with sign `(-1)^legs`.
    pub fn reverse_strand(&self, i: usize) -> Result<DiagElt> {
        let k = self.check_index(i)?;
        self.map_diagrams(Signature::Strands(k), |d| {
            let off = d.strand_offsets();
            let mut order: Vec<usize> = (0..d.n_legs()).collect();
            order[off[i - 1]..off[i]].reverse();
            let s = if (off[i] - off[i - 1]) % 2 == 0 {
                1
            } else {
                -1
            };
            Ok(vec![(relegs(d, d.strands.clone(), &order), s)])
        })
    }

    /// Rearrange strands: old strand `j` (0-based) moves to position `sigma[j]`.
    pub fn permute_strands(&self, sigma: &[usize]) -> Result<DiagElt> {
        let k = self.strands()?;
        let mut inv = vec![usize::MAX; k];
        if sigma.len() != k {
            return Err(Error::Invalid(format!(
                "permutation of length {} on {k} strands",
                sigma.len()
            )));
        }
        for (j, &t) in sigma.iter().enumerate() {
            if t >= k || inv[t] != usize::MAX {
                return Err(Error::Invalid(format!("{sigma:?} is not a permutation")));
            }
            inv[t] = j;
        }
        self.map_diagrams(Signature::Strands(k), |d| {
            let off = d.strand_offsets();
            let mut order = Vec::with_capacity(d.n_legs());
            let mut lens = SmallVec::new();
            for &old in &inv {
                order.extend(off[old]..off[old + 1]);
                lens.push(d.strands[old]);
            }
            Ok(vec![(relegs(d, lens, &order), 1)])
        })
    }

    /// Strand image of a generator map: place strand `j` of a `k`-strand element
    /// on strand `targets[j]` of an `m`-strand skeleton (injective).
    pub fn embed_strands(&self, targets: &[usize], m: usize) -> Result<DiagElt> {
        let k = self.strands()?;
        if targets.len() != k || targets.iter().any(|&t| t >= m) {
            return Err(Error::Invalid(format!(
                "bad strand embedding {targets:?} into {m}"
            )));
        }
        let mut inv = vec![usize::MAX; m];
        for (j, &t) in targets.iter().enumerate() {
            if inv[t] != usize::MAX {
                return Err(Error::Invalid(format!(
                    "strand embedding {targets:?} is not injective"
                )));
            }
            inv[t] = j;
        }
        self.map_diagrams(Signature::Strands(m), |d| {
            let off = d.strand_offsets();
            let mut order = Vec::new();
            let mut lens = SmallVec::new();
            for &old in &inv {
                if old == usize::MAX {
                    lens.push(0);
                } else {
                    order.extend(off[old]..off[old + 1]);
                    lens.push(d.strands[old]);
                }
            }
            Ok(vec![(relegs(d, lens, &order), 1)])
        })
    }

    pub fn to_sexpr(&self) -> String {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = terms
            .iter()
            .map(|(d, c)| {
                format!(
                    "(* {} {})",
                    c.to_sexpr(),
                    super::text::format_diagram(d, &self.sig)
                )
            })
            .collect();
        if parts.len() == 1 {
            parts[0].clone()
        } else {
            format!("(+ {})", parts.join(" "))
        }
    }
}

impl fmt::Display for DiagElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

/// Reorder legs: new leg `p` is old leg `order[p]`, strands get lengths `lens`.
pub(crate) fn relegs(d: &JDiagram, lens: SmallVec<[u8; 4]>, order: &[usize]) -> JDiagram {
    let l = d.n_legs();
    let mut o2n = vec![0u16; d.mate.len()];
    for (p, &old) in order.iter().enumerate() {
        o2n[old] = p as u16;
    }
    for h in l..d.mate.len() {
        o2n[h] = h as u16;
    }
    let mut mate: Mates = SmallVec::from_elem(0, d.mate.len());
    for h in 0..d.mate.len() {
        mate[o2n[h] as usize] = o2n[d.mate[h] as usize];
    }
    JDiagram {
        strands: lens,
        colors: d.colors.clone(),
        colored: d.colored,
        mate,
    }
}

/// Stack `x` above `y` (strand diagrams) or take the disjoint union (colored).
pub(crate) fn stack(x: &JDiagram, y: &JDiagram) -> JDiagram {
    let (lx, ly) = (x.n_legs(), y.n_legs());
    let l = lx + ly;
    let n = x.mate.len() + y.mate.len();
    let mut mx = vec![0u16; x.mate.len()];
    let mut my = vec![0u16; y.mate.len()];
    let mut strands = SmallVec::new();
    let mut colors = SmallVec::new();
    if x.colored {
        for p in 0..lx {
            mx[p] = p as u16;
        }
        for p in 0..ly {
            my[p] = (lx + p) as u16;
        }
        colors.extend(x.colors.iter().copied());
        colors.extend(y.colors.iter().copied());
    } else {
        let (ox, oy) = (x.strand_offsets(), y.strand_offsets());
        let mut next = 0u16;
        for s in 0..x.strands.len() {
            for p in ox[s]..ox[s + 1] {
                mx[p] = next;
                next += 1;
            }
            for p in oy[s]..oy[s + 1] {
                my[p] = next;
                next += 1;
            }
            strands.push(x.strands[s] + y.strands[s]);
        }
    }
    for h in lx..x.mate.len() {
        mx[h] = (l + h - lx) as u16;
    }
    let vx = x.mate.len() - lx;
    for h in ly..y.mate.len() {
        my[h] = (l + vx + h - ly) as u16;
    }
    let mut mate: Mates = SmallVec::from_elem(0, n);
    for h in 0..x.mate.len() {
        mate[mx[h] as usize] = mx[x.mate[h] as usize];
    }
    for h in 0..y.mate.len() {
        mate[my[h] as usize] = my[y.mate[h] as usize];
    }
    JDiagram {
        strands,
        colors,
        colored: x.colored,
        mate,
    }
}

impl Series for DiagElt {
    fn cap(&self) -> usize {
        self.cap.unwrap_or(0)
    }
    fn one_like(&self) -> Self {
        let mut x = DiagElt::one(self.sig.clone());
        x.cap = self.cap;
        x
    }
    fn zero_like_series(&self) -> Self {
        DiagElt {
            sig: self.sig.clone(),
            cap: self.cap,
            terms: HashMap::new(),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        self.stack_product(o)
            .expect("series operands share a signature")
    }
    fn add_scaled_series(&mut self, o: &Self, c: &FormalScalar) {
        self.add_scaled_in(o, c);
    }
    fn constant_term(&self) -> FormalScalar {
        self.terms
            .iter()
            .find(|(d, _)| d.mate.is_empty())
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kohno::TnElt;

    fn t(k: usize, i: usize, j: usize) -> DiagElt {
        DiagElt::chord(k, i, j).unwrap()
    }

    #[test]
    fn unit_and_products() {
        let one = DiagElt::one(Signature::Strands(2));
        let x = t(2, 1, 2);
        assert_eq!(one.stack_product(&x).unwrap(), x);
        assert_eq!(x.stack_product(&one).unwrap(), x);
        let xx = x.stack_product(&x).unwrap();
        assert_eq!(xx.len(), 1);
        let (d, c) = xx.sorted_terms()[0];
        assert!(c.is_one());
        assert_eq!(d.strands.as_slice(), &[2, 2]);
        assert_eq!(d.mate.as_slice(), &[2, 3, 0, 1]);
        // t11 and t12 commute as chord diagrams? no: different leg orders on strand 1
        let a = {
            let raw = Raw {
                strands: vec![vec![0, 1], vec![]],
                edges: vec![(0, 1)],
                ..Default::default()
            };
            DiagElt::from_raw(Signature::Strands(2), &raw).unwrap()
        };
        assert!(!a.commutator(&x).unwrap().is_zero());
        assert!(DiagElt::chord(2, 1, 1).is_err());
        assert!(x
            .stack_product(&DiagElt::one(Signature::Strands(3)))
            .is_err());
    }

    #[test]
    fn strand_maps() {
        let x = t(2, 1, 2);
        assert_eq!(
            x.double_strand(2).unwrap(),
            t(3, 1, 2).add(&t(3, 1, 3)).unwrap()
        );
        assert_eq!(
            x.double_strand(1).unwrap(),
            t(3, 1, 3).add(&t(3, 2, 3)).unwrap()
        );
        assert_eq!(x.reverse_strand(1).unwrap().reverse_strand(2).unwrap(), x);
        assert_eq!(
            x.reverse_strand(1).unwrap(),
            x.scale(&FormalScalar::int(-1))
        );
        assert!(x.delete_strand(1).unwrap().is_zero());
        assert_eq!(t(3, 1, 2).delete_strand(3).unwrap(), x);
        assert_eq!(t(3, 1, 2).permute_strands(&[1, 2, 0]).unwrap(), t(3, 2, 3));
        assert!(x.permute_strands(&[0, 0]).is_err());
        assert!(x.double_strand(3).is_err());
    }

    #[test]
    fn counit_and_coassociativity() {
        let x = t(2, 1, 2)
            .stack_product(&t(2, 1, 2))
            .unwrap()
            .add(&t(2, 1, 2))
            .unwrap();
        let y = x.stack_product(&from_chord_1()).unwrap();
        for e in [&x, &y] {
            let d = e.double_strand(1).unwrap();
            assert_eq!(d.delete_strand(1).unwrap(), *e);
            assert_eq!(d.delete_strand(2).unwrap(), *e);
            let a = d.double_strand(1).unwrap();
            let b = d.double_strand(2).unwrap();
            assert_eq!(a, b);
        }
    }

    fn from_chord_1() -> DiagElt {
        let raw = Raw {
            strands: vec![vec![0, 1], vec![]],
            edges: vec![(0, 1)],
            ..Default::default()
        };
        DiagElt::from_raw(Signature::Strands(2), &raw).unwrap()
    }

    #[test]
    fn tn_images_respect_products() {
        let cap = 3;
        let a = TnElt::generator(3, "t12", cap).unwrap();
        let b = TnElt::generator(3, "t23", cap).unwrap();
        let c = TnElt::generator(3, "t13", cap).unwrap();
        let p = a.product(&b).unwrap().product(&c).unwrap();
        let lhs = DiagElt::from_tn(&p, 3).unwrap();
        let rhs = t(3, 1, 2)
            .stack_product(&t(3, 2, 3))
            .unwrap()
            .stack_product(&t(3, 1, 3))
            .unwrap();
        assert_eq!(lhs, rhs.with_cap(cap));
        let t4 = TnElt::generator(4, "t24", cap)
            .unwrap()
            .product(&TnElt::generator(4, "t12", cap).unwrap())
            .unwrap();
        assert_eq!(
            DiagElt::from_tn(&t4, 4).unwrap(),
            t(4, 2, 4).stack_product(&t(4, 1, 2)).unwrap().with_cap(cap)
        );
    }
}
