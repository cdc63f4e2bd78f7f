//! U(sl2) in the PBW basis `f^p h^q e^r` and the universal sl2 weight system.
//!
//! Basis `e, f, h` of sl2 with the trace form: `B(e,f) = 1`, `B(h,h) = 2`.
//! Dual basis `e* = f`, `f* = e`, `h* = h/2`. Each edge carries `x ⊗ x*`
//! summed over the basis; each trivalent vertex with cyclic slots `(u0,u1,u2)`
//! contributes `-B([u0,u1],u2)`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use crate::diagrams::{DiagElt, JDiagram};
use crate::error::{Error, Result};
use crate::scalar::{FormalScalar, Rat};

/// Generators: 0 = e, 1 = f, 2 = h.
pub const E: u8 = 0;
pub const F: u8 = 1;
pub const H: u8 = 2;

/// PBW monomial `f^p h^q e^r`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PbwMono {
    pub f: u16,
    pub h: u16,
    pub e: u16,
}

impl PbwMono {
    pub fn one() -> PbwMono {
        PbwMono::default()
    }

    pub fn generator(g: u8) -> PbwMono {
        match g {
            E => PbwMono { f: 0, h: 0, e: 1 },
            F => PbwMono { f: 1, h: 0, e: 0 },
            _ => PbwMono { f: 0, h: 1, e: 0 },
        }
    }

    pub fn degree(&self) -> u16 {
        self.f + self.h + self.e
    }

    fn letters(&self) -> impl Iterator<Item = u8> {
        std::iter::repeat(F)
            .take(self.f as usize)
            .chain(std::iter::repeat(H).take(self.h as usize))
            .chain(std::iter::repeat(E).take(self.e as usize))
    }

    fn text(&self) -> String {
        let mut parts = Vec::new();
        for (name, k) in [("f", self.f), ("h", self.h), ("e", self.e)] {
            match k {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{k}")),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("")
        }
    }
}

type Poly = HashMap<PbwMono, Rat>;

fn add_to(p: &mut Poly, m: PbwMono, c: Rat) {
    crate::scalar::accumulate_rat(p, m, c);
}

fn binom(n: u16, k: u16) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k as i64 {
        r = r * (n as i64 - i) / (i + 1);
    }
    r
}

/// `m · g` in PBW form, from `e^r h = (h - 2r) e^r`, `h^q f = f (h - 2)^q`
/// and `e^r f = f e^r + r (h - r + 1) e^{r-1}`.
fn times_generator(m: PbwMono, g: u8) -> Poly {
    let mut out = Poly::new();
    match g {
        E => add_to(&mut out, PbwMono { e: m.e + 1, ..m }, Rat::one()),
        H => {
            add_to(&mut out, PbwMono { h: m.h + 1, ..m }, Rat::one());
            add_to(&mut out, m, Rat::int(-2 * m.e as i64));
        }
        _ => {
            for k in 0..=m.h {
                let c = binom(m.h, k) * (-2i64).pow((m.h - k) as u32);
                add_to(
                    &mut out,
                    PbwMono {
                        f: m.f + 1,
                        h: k,
                        e: m.e,
                    },
                    Rat::int(c),
                );
            }
            if m.e > 0 {
                let r = m.e as i64;
                let base = PbwMono {
                    f: m.f,
                    h: m.h,
                    e: m.e - 1,
                };
                add_to(&mut out, PbwMono { h: m.h + 1, ..base }, Rat::int(r));
                add_to(&mut out, base, Rat::int(r * (1 - r)));
            }
        }
    }
    out
}

thread_local! {
    static PRODUCTS: RefCell<HashMap<(PbwMono, PbwMono), std::rc::Rc<Poly>>> = RefCell::new(HashMap::new());
}

/// Product of two PBW monomials, memoized.
pub fn mono_product(a: PbwMono, b: PbwMono) -> std::rc::Rc<Poly> {
    if let Some(p) = PRODUCTS.with(|m| m.borrow().get(&(a, b)).cloned()) {
        return p;
    }
    let mut cur: Poly = Poly::new();
    cur.insert(a, Rat::one());
    for g in b.letters() {
        let mut next = Poly::new();
        for (m, c) in &cur {
            for (m2, c2) in times_generator(*m, g) {
                add_to(&mut next, m2, c * &c2);
            }
        }
        cur = next;
    }
    let r = std::rc::Rc::new(cur);
    PRODUCTS.with(|m| m.borrow_mut().insert((a, b), r.clone()));
    r
}

/// PBW form of a word in the generators with a scalar factor.
fn word_poly(word: &[u8]) -> Poly {
    let mut cur: Poly = Poly::new();
    cur.insert(PbwMono::one(), Rat::one());
    for &g in word {
        let mut next = Poly::new();
        for (m, c) in &cur {
            for (m2, c2) in times_generator(*m, g) {
                add_to(&mut next, m2, c * &c2);
            }
        }
        cur = next;
    }
    cur
}

/// Key of a tensor monomial: one PBW monomial per strand.
pub type TensorKey = SmallVec<[PbwMono; 3]>;

/// Element of `U(sl2)^{⊗k}` with formal scalar coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Usl2TensorElt {
    k: usize,
    terms: HashMap<TensorKey, FormalScalar>,
}

impl Usl2TensorElt {
    pub fn zero(k: usize) -> Self {
        Usl2TensorElt {
            k,
            terms: HashMap::new(),
        }
    }

    pub fn one(k: usize) -> Self {
        let mut t = Self::zero(k);
        t.terms
            .insert(SmallVec::from_elem(PbwMono::one(), k), FormalScalar::one());
        t
    }

    /// Pure tensor of monomials.
    pub fn monomial(key: &[PbwMono], c: FormalScalar) -> Self {
        let mut t = Self::zero(key.len());
        crate::scalar::accumulate(&mut t.terms, key.iter().copied().collect(), c);
        t
    }

    pub fn strands(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &HashMap<TensorKey, FormalScalar> {
        &self.terms
    }

    pub fn sorted_terms(&self) -> Vec<(&TensorKey, &FormalScalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn coeff(&self, key: &[PbwMono]) -> FormalScalar {
        let k: TensorKey = key.iter().copied().collect();
        self.terms
            .get(&k)
            .cloned()
            .unwrap_or_else(FormalScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.k != o.k {
            return Err(Error::Invalid(format!(
                "tensor factors differ: {} vs {}",
                self.k, o.k
            )));
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, o: &Self, c: &FormalScalar) -> Result<()> {
        self.check(o)?;
        for (key, v) in &o.terms {
            crate::scalar::accumulate(&mut self.terms, key.clone(), v * c);
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
        let mut r = Self::zero(self.k);
        if c.is_zero() {
            return r;
        }
        for (key, v) in &self.terms {
            crate::scalar::accumulate(&mut r.terms, key.clone(), v * c);
        }
        r
    }

    /// Factorwise product in `U(sl2)^{⊗k}`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out: HashMap<TensorKey, FormalScalar> = HashMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let c = ca * cb;
                let mut partial: Vec<(TensorKey, Rat)> = vec![(TensorKey::new(), Rat::one())];
                for i in 0..self.k {
                    let p = mono_product(ka[i], kb[i]);
                    let mut next = Vec::with_capacity(partial.len() * p.len());
                    for (key, r) in &partial {
                        for (m, r2) in p.iter() {
                            let mut nk = key.clone();
                            nk.push(*m);
                            next.push((nk, r * r2));
                        }
                    }
                    partial = next;
                }
                for (key, r) in partial {
                    crate::scalar::accumulate(&mut out, key, c.scale(&r));
                }
            }
        }
        Ok(Usl2TensorElt {
            k: self.k,
            terms: out,
        })
    }

    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    /// Text form: `(+ (* c f^2e ⊗ h) ...)`, with factors joined by `(x)`.
    pub fn to_text(&self) -> String {
        let t = self.sorted_terms();
        if t.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = t
            .iter()
            .map(|(key, c)| {
                let f: Vec<String> = key.iter().map(|m| m.text()).collect();
                format!("(* {} {})", c.to_sexpr(), f.join(" (x) "))
            })
            .collect();
        if parts.len() == 1 {
            parts[0].clone()
        } else {
            format!("(+ {})", parts.join(" "))
        }
    }
}

impl fmt::Display for Usl2TensorElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Dual of a basis element as (generator, coefficient).
fn dual(a: u8) -> (u8, Rat) {
    match a {
        E => (F, Rat::one()),
        F => (E, Rat::one()),
        _ => (H, Rat::new(1, 2)),
    }
}

/// `B([x_a, x_b], x_c)` for generators.
fn structure(a: u8, b: u8, c: u8) -> i64 {
    match (a, b, c) {
        (E, F, H) | (F, H, E) | (H, E, F) => 2,
        (F, E, H) | (H, F, E) | (E, H, F) => -2,
        _ => 0,
    }
}

/// Rational value of one diagram, with `loops` extra leg-free dashed circles (each a factor `dim sl2 = 3`).
pub fn diagram_value(d: &JDiagram, loops: usize) -> Result<HashMap<TensorKey, Rat>> {
    if d.colored {
        return Err(Error::Invalid("weight systems need strand diagrams".into()));
    }
    let n = d.mate.len();
    let l = d.n_legs();
    let edges: Vec<(usize, usize)> = (0..n)
        .filter(|&h| h < d.mate[h] as usize)
        .map(|h| (h, d.mate[h] as usize))
        .collect();
    if edges.len() * 2 != n {
        return Err(Error::Invalid(
            "malformed diagram: unmatched half-edge".into(),
        ));
    }
    let nv = d.n_vertices();
    let off = d.strand_offsets();
    let mut out: HashMap<TensorKey, Rat> = HashMap::new();
    let mut gen = vec![0u8; n];
    let mut coef = vec![Rat::one(); n];
    let total = 3usize.pow(edges.len() as u32);
    let factor = Rat::int(3i64.pow(loops as u32));
    for state in 0..total {
        let mut s = state;
        for &(a, b) in &edges {
            let lab = (s % 3) as u8;
            s /= 3;
            gen[a] = lab;
            coef[a] = Rat::one();
            let (g, c) = dual(lab);
            gen[b] = g;
            coef[b] = c;
        }
        let mut w = factor.clone();
        for h in 0..n {
            w *= &coef[h];
        }
        for v in 0..nv {
            let b = l + 3 * v;
            let c = structure(gen[b], gen[b + 1], gen[b + 2]);
            if c == 0 {
                w = Rat::zero();
                break;
            }
            w *= &Rat::int(-c);
        }
        if w.is_zero() {
            continue;
        }
        let mut partial: Vec<(TensorKey, Rat)> = vec![(TensorKey::new(), w)];
        for st in 0..d.n_strands() {
            let word: Vec<u8> = (off[st]..off[st + 1]).map(|p| gen[p]).collect();
            let p = word_poly(&word);
            let mut next = Vec::with_capacity(partial.len() * p.len());
            for (key, r) in &partial {
                for (m, r2) in &p {
                    let mut nk = key.clone();
                    nk.push(*m);
                    next.push((nk, r * r2));
                }
            }
            partial = next;
        }
        for (key, r) in partial {
            crate::scalar::accumulate_rat(&mut out, key, r);
        }
    }
    Ok(out)
}

thread_local! {
    static VALUES: RefCell<HashMap<JDiagram, std::rc::Rc<HashMap<TensorKey, Rat>>>> = RefCell::new(HashMap::new());
}

fn cached_value(d: &JDiagram) -> Result<std::rc::Rc<HashMap<TensorKey, Rat>>> {
    if let Some(v) = VALUES.with(|m| m.borrow().get(d).cloned()) {
        return Ok(v);
    }
    let v = std::rc::Rc::new(diagram_value(d, 0)?);
    VALUES.with(|m| m.borrow_mut().insert(d.clone(), v.clone()));
    Ok(v)
}

/// The universal sl2 weight system, evaluated directly on Jacobi diagrams.
pub fn weight_universal_sl2(x: &DiagElt) -> Result<Usl2TensorElt> {
    let k = match x.signature() {
        crate::diagrams::Signature::Strands(k) => *k,
        _ => return Err(Error::Invalid("weight systems need strand diagrams".into())),
    };
    let mut out = Usl2TensorElt::zero(k);
    for (d, c) in x.terms() {
        for (key, r) in cached_value(d)?.iter() {
            crate::scalar::accumulate(&mut out.terms, key.clone(), c.scale(r));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::Signature;
    use rand::{Rng, SeedableRng};

    fn mono(f: u16, h: u16, e: u16) -> PbwMono {
        PbwMono { f, h, e }
    }

    fn single(m: PbwMono) -> Usl2TensorElt {
        Usl2TensorElt::monomial(&[m], FormalScalar::one())
    }

    #[test]
    fn commutation_relations() {
        let (e, f, h) = (
            single(PbwMono::generator(E)),
            single(PbwMono::generator(F)),
            single(PbwMono::generator(H)),
        );
        assert_eq!(h.commutator(&e).unwrap(), e.scale(&FormalScalar::int(2)));
        assert_eq!(h.commutator(&f).unwrap(), f.scale(&FormalScalar::int(-2)));
        assert_eq!(e.commutator(&f).unwrap(), h);
        // e^2 f = f e^2 + 2 h e - 2 e
        let e2f = single(mono(0, 0, 2)).mul(&f).unwrap();
        let mut want = single(mono(1, 0, 2));
        want.add_scaled(&single(mono(0, 1, 1)), &FormalScalar::int(2))
            .unwrap();
        want.add_scaled(&single(mono(0, 0, 1)), &FormalScalar::int(-2))
            .unwrap();
        assert_eq!(e2f, want);
    }

    #[test]
    fn associativity_on_random_triples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let rand_elt = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut x = Usl2TensorElt::zero(1);
            for _ in 0..3 {
                let m = mono(
                    rng.gen_range(0..3),
                    rng.gen_range(0..3),
                    rng.gen_range(0..3),
                );
                x.add_scaled(&single(m), &FormalScalar::int(rng.gen_range(-3..4)))
                    .unwrap();
            }
            x
        };
        for _ in 0..20 {
            let (a, b, c) = (rand_elt(&mut rng), rand_elt(&mut rng), rand_elt(&mut rng));
            assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn chord_value_is_the_casimir() {
        let t = DiagElt::chord(2, 1, 2).unwrap();
        let w = weight_universal_sl2(&t).unwrap();
        let (e, f, h) = (
            PbwMono::generator(E),
            PbwMono::generator(F),
            PbwMono::generator(H),
        );
        let mut want = Usl2TensorElt::monomial(&[e, f], FormalScalar::one());
        want.add_scaled(
            &Usl2TensorElt::monomial(&[f, e], FormalScalar::one()),
            &FormalScalar::one(),
        )
        .unwrap();
        want.add_scaled(
            &Usl2TensorElt::monomial(&[h, h], FormalScalar::one()),
            &FormalScalar::rat(1, 2),
        )
        .unwrap();
        assert_eq!(w, want);
        assert_eq!(
            weight_universal_sl2(&DiagElt::one(Signature::Strands(2))).unwrap(),
            Usl2TensorElt::one(2)
        );
    }

    #[test]
    fn one_strand_chord_is_the_casimir_element() {
        // ef + fe + h^2/2 = 2fe + h + h^2/2 in PBW form
        let raw = crate::diagrams::Raw {
            strands: vec![vec![0, 1]],
            edges: vec![(0, 1)],
            ..Default::default()
        };
        let t = DiagElt::from_raw(Signature::Strands(1), &raw).unwrap();
        let w = weight_universal_sl2(&t).unwrap();
        let mut want = single(mono(1, 0, 1)).scale(&FormalScalar::int(2));
        want.add_scaled(&single(mono(0, 1, 0)), &FormalScalar::one())
            .unwrap();
        want.add_scaled(&single(mono(0, 2, 0)), &FormalScalar::rat(1, 2))
            .unwrap();
        assert_eq!(w, want);
    }
}
