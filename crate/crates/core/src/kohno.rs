//! Truncated enveloping algebras of the Drinfeld-Kohno Lie algebras t3 and t4.
//!
//! `t4` splits as the free Lie algebra on `t14, t24, t34` extended by `t3`, and
//! `t3` is the free Lie algebra on `t12, t23` plus the central element
//! `c = t12 + t13 + t23`. A PBW monomial is therefore a triple
//! `(free word in t.4, word in t12/t23, power of c)`, and products straighten
//! by moving `t3` letters rightward past the free word with `g w = w g + g.w`.
//! The action `g.w` is the derivation forced by the defining relations:
//! `t_ij . t_i4 = [t_i4, t_j4]`, `t_ij . t_j4 = [t_j4, t_i4]`, `t_ij . t_k4 = 0`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::{Arc, Mutex, OnceLock};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lie::{AssocPoly, LieElt, LieTarget, Word};
use crate::linalg::Echelon;
use crate::scalar::{accumulate, FormalScalar, Rat};
use crate::series::{series_exp, series_inverse, series_log, NCElt, Series};

/// Letters of the free part: `t14, t24, t34`.
pub const FREE_NAMES: [&str; 3] = ["t14", "t24", "t34"];
/// Letters of the `t3` words: `t12, t23`.
pub const LOW_NAMES: [&str; 2] = ["t12", "t23"];

const G12: u8 = 0;
const G23: u8 = 1;
const GC: u8 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pbw {
    pub free: Word,
    pub low: Word,
    pub c: u8,
}

impl Pbw {
    pub fn one() -> Pbw {
        Pbw {
            free: Word::new(),
            low: Word::new(),
            c: 0,
        }
    }

    pub fn degree(&self) -> usize {
        self.free.len() + self.low.len() + self.c as usize
    }
}

/// Element of the truncated `U(t_n)` for `n` in {3, 4}, in PBW coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TnElt {
    n: u8,
    cap: usize,
    terms: HashMap<Pbw, FormalScalar>,
}

/// Canonical generator index `(i, j)` with `i < j` from a name like `t21`.
pub fn parse_generator(name: &str, n: u8) -> Result<(u8, u8)> {
    let bad = || Error::UnknownLetter(name.to_string());
    let digits = name.strip_prefix('t').ok_or_else(bad)?;
    let ds: Vec<u8> = digits.bytes().collect();
    if ds.len() != 2 {
        return Err(bad());
    }
    let (i, j) = (ds[0].wrapping_sub(b'0'), ds[1].wrapping_sub(b'0'));
    if i == j || i < 1 || j < 1 || i > n || j > n {
        return Err(bad());
    }
    Ok((i.min(j), i.max(j)))
}

/// Generator names `tij`, `i < j <= n`, in lexicographic order.
pub fn generator_names(n: u8) -> Vec<String> {
    let mut v = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            v.push(format!("t{i}{j}"));
        }
    }
    v
}

thread_local! {
    static MOVE: RefCell<HashMap<(Word, Word), Rc<Vec<(Word, Word, u8, i64)>>>> = RefCell::new(HashMap::new());
}

/// `g . x` for a single free letter `x`, as a signed list of two-letter words.
fn act_letter(g: u8, x: u8) -> SmallVec<[([u8; 2], i64); 4]> {
    // free letters: 0 = t14, 1 = t24, 2 = t34
    let comm = |p: u8, q: u8| -> [([u8; 2], i64); 2] { [([p, q], 1), ([q, p], -1)] };
    let mut out = SmallVec::new();
    let parts: &[(u8, u8)] = match (g, x) {
        (G12, 0) => &[(0, 1)],
        (G12, 1) => &[(1, 0)],
        (G23, 1) => &[(1, 2)],
        (G23, 2) => &[(2, 1)],
        (GC, 0) => &[(0, 1), (0, 2)],
        (GC, 1) => &[(1, 0), (1, 2)],
        (GC, 2) => &[(2, 0), (2, 1)],
        _ => &[],
    };
    for &(p, q) in parts {
        out.extend(comm(p, q));
    }
    out
}

/// Derivation action of a `t3` letter on a free word.
fn act_word(g: u8, w: &[u8]) -> Vec<(Word, i64)> {
    let mut out = Vec::new();
    for i in 0..w.len() {
        for (pair, s) in act_letter(g, w[i]) {
            let mut nw = Word::from_slice(&w[..i]);
            nw.extend_from_slice(&pair);
            nw.extend_from_slice(&w[i + 1..]);
            out.push((nw, s));
        }
    }
    out
}

/// Rewrite `g_1 ... g_m * w` as a sum of `w' * (kept low letters) * c^k`.
fn move_past(gseq: &[u8], w: &[u8]) -> Rc<Vec<(Word, Word, u8, i64)>> {
    let key = (Word::from_slice(gseq), Word::from_slice(w));
    if let Some(r) = MOVE.with(|m| m.borrow().get(&key).cloned()) {
        return r;
    }
    // state: (free word, kept letters as a reversed stack) -> coefficient
    let mut cur: HashMap<(Word, Word), i64> = HashMap::new();
    cur.insert((Word::from_slice(w), Word::new()), 1);
    for &g in gseq.iter().rev() {
        let mut next: HashMap<(Word, Word), i64> = HashMap::new();
        for ((fw, kept), c) in cur {
            let mut k2 = kept.clone();
            k2.push(g);
            *next.entry((fw.clone(), k2)).or_insert(0) += c;
            for (nw, s) in act_word(g, &fw) {
                *next.entry((nw, kept.clone())).or_insert(0) += c * s;
            }
        }
        next.retain(|_, c| *c != 0);
        cur = next;
    }
    let mut out: HashMap<(Word, Word, u8), i64> = HashMap::new();
    for ((fw, kept), c) in cur {
        let mut low = Word::new();
        let mut cc = 0u8;
        for &g in kept.iter().rev() {
            if g == GC {
                cc += 1;
            } else {
                low.push(g);
            }
        }
        *out.entry((fw, low, cc)).or_insert(0) += c;
    }
    let mut v: Vec<(Word, Word, u8, i64)> = out
        .into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|((a, b, c), k)| (a, b, c, k))
        .collect();
    v.sort();
    let r = Rc::new(v);
    MOVE.with(|m| m.borrow_mut().insert(key, r.clone()));
    r
}

impl TnElt {
    pub fn zero(n: u8, cap: usize) -> TnElt {
        assert!(n == 3 || n == 4, "U(t_n) is implemented for n = 3, 4");
        TnElt {
            n,
            cap,
            terms: HashMap::new(),
        }
    }

    pub fn one(n: u8, cap: usize) -> TnElt {
        let mut x = TnElt::zero(n, cap);
        x.terms.insert(Pbw::one(), FormalScalar::one());
        x
    }

    fn mono(n: u8, cap: usize, m: Pbw, c: FormalScalar) -> TnElt {
        let mut x = TnElt::zero(n, cap);
        if m.degree() <= cap {
            accumulate(&mut x.terms, m, c);
        }
        x
    }

    pub fn generator(n: u8, name: &str, cap: usize) -> Result<TnElt> {
        if n != 3 && n != 4 {
            return Err(Error::Invalid(format!("U(t_{n}) is not supported")));
        }
        let (i, j) = parse_generator(name, n)?;
        let one = FormalScalar::one();
        let w = |s: &[u8]| Word::from_slice(s);
        let m = |free: &[u8], low: &[u8], c: u8| Pbw {
            free: w(free),
            low: w(low),
            c,
        };
        Ok(match (i, j) {
            (1, 2) => TnElt::mono(n, cap, m(&[], &[G12], 0), one),
            (2, 3) => TnElt::mono(n, cap, m(&[], &[G23], 0), one),
            (1, 3) => {
                let mut x = TnElt::mono(n, cap, m(&[], &[], 1), one.clone());
                x.add_scaled_series(
                    &TnElt::mono(n, cap, m(&[], &[G12], 0), one.clone()),
                    &FormalScalar::int(-1),
                );
                x.add_scaled_series(
                    &TnElt::mono(n, cap, m(&[], &[G23], 0), one),
                    &FormalScalar::int(-1),
                );
                x
            }
            (k, 4) => TnElt::mono(n, cap, m(&[k - 1], &[], 0), one),
            _ => unreachable!(),
        })
    }

    /// The central element `c = t12 + t13 + t23` of `U(t3)`.
    pub fn central(n: u8, cap: usize) -> TnElt {
        TnElt::mono(
            n,
            cap,
            Pbw {
                free: Word::new(),
                low: Word::new(),
                c: 1,
            },
            FormalScalar::one(),
        )
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn terms(&self) -> &HashMap<Pbw, FormalScalar> {
        &self.terms
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

    pub fn with_cap(&self, cap: usize) -> TnElt {
        let mut x = TnElt::zero(self.n, cap);
        for (m, c) in &self.terms {
            if m.degree() <= cap {
                x.terms.insert(m.clone(), c.clone());
            }
        }
        x
    }

    pub fn component(&self, d: usize) -> TnElt {
        let mut x = TnElt::zero(self.n, self.cap);
        for (m, c) in &self.terms {
            if m.degree() == d {
                x.terms.insert(m.clone(), c.clone());
            }
        }
        x
    }

    /// Lowest degree carrying a nonzero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    fn check(&self, o: &TnElt) -> Result<()> {
        if self.n != o.n {
            return Err(Error::Invalid(format!("U(t_{}) vs U(t_{})", self.n, o.n)));
        }
        Ok(())
    }

    pub fn add(&self, o: &TnElt) -> Result<TnElt> {
        self.check(o)?;
        let mut r = self.with_cap(self.cap.min(o.cap));
        r.add_scaled_series(o, &FormalScalar::one());
        Ok(r)
    }

    pub fn sub(&self, o: &TnElt) -> Result<TnElt> {
        self.check(o)?;
        let mut r = self.with_cap(self.cap.min(o.cap));
        r.add_scaled_series(o, &FormalScalar::int(-1));
        Ok(r)
    }

    pub fn scale(&self, c: &FormalScalar) -> TnElt {
        let mut r = TnElt::zero(self.n, self.cap);
        r.add_scaled_series(self, c);
        r
    }

    pub fn product(&self, o: &TnElt) -> Result<TnElt> {
        self.check(o)?;
        let cap = self.cap.min(o.cap);
        let mut out = TnElt::zero(self.n, cap);
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            if d1 > cap {
                continue;
            }
            for (m2, c2) in &o.terms {
                if d1 + m2.degree() > cap {
                    continue;
                }
                let c = c1 * c2;
                if m2.free.is_empty() || (m1.low.is_empty() && m1.c == 0) {
                    let mut free = m1.free.clone();
                    free.extend_from_slice(&m2.free);
                    let mut low = m1.low.clone();
                    low.extend_from_slice(&m2.low);
                    accumulate(
                        &mut out.terms,
                        Pbw {
                            free,
                            low,
                            c: m1.c + m2.c,
                        },
                        c,
                    );
                    continue;
                }
                let mut gseq = m1.low.clone();
                gseq.extend(std::iter::repeat(GC).take(m1.c as usize));
                for (fw, low, cc, k) in move_past(&gseq, &m2.free).iter() {
                    let mut free = m1.free.clone();
                    free.extend_from_slice(fw);
                    let mut l = low.clone();
                    l.extend_from_slice(&m2.low);
                    accumulate(
                        &mut out.terms,
                        Pbw {
                            free,
                            low: l,
                            c: cc + m2.c,
                        },
                        c.scale(&Rat::int(*k)),
                    );
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, o: &TnElt) -> Result<TnElt> {
        self.product(o)?.sub(&o.product(self)?)
    }

    pub fn exp(&self) -> Result<TnElt> {
        series_exp(self)
    }

    pub fn log(&self) -> Result<TnElt> {
        series_log(self)
    }

    pub fn inverse(&self) -> Result<TnElt> {
        series_inverse(self)
    }

    /// Substitute `coeff` for a formal symbol in every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&FormalScalar) -> Result<FormalScalar>) -> Result<TnElt> {
        let mut r = TnElt::zero(self.n, self.cap);
        for (m, c) in &self.terms {
            accumulate(&mut r.terms, m.clone(), f(c)?);
        }
        Ok(r)
    }

    pub fn sorted_terms(&self) -> Vec<(&Pbw, &FormalScalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| (a.0.degree(), a.0).cmp(&(b.0.degree(), b.0)));
        v
    }

    fn mono_string(&self, m: &Pbw) -> String {
        let mut f: Vec<String> = m
            .free
            .iter()
            .map(|&x| FREE_NAMES[x as usize].to_string())
            .collect();
        f.extend(m.low.iter().map(|&x| LOW_NAMES[x as usize].to_string()));
        f.extend(std::iter::repeat("c".to_string()).take(m.c as usize));
        match f.len() {
            0 => "1".into(),
            1 => f.pop().unwrap(),
            _ => format!("(* {})", f.join(" ")),
        }
    }

    /// Prefix form over PBW monomials; `c` denotes `t12 + t13 + t23`.
    pub fn to_sexpr(&self) -> String {
        let parts: Vec<String> = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| {
                let s = self.mono_string(m);
                if c.is_one() {
                    s
                } else {
                    format!("(* {} {})", c.to_sexpr(), s)
                }
            })
            .collect();
        match parts.len() {
            0 => "0".into(),
            1 => parts.into_iter().next().unwrap(),
            _ => format!("(+ {})", parts.join(" ")),
        }
    }

    /// Embed an element of `U(t3)` into `U(t4)`.
    pub fn lift_to_t4(&self) -> TnElt {
        TnElt {
            n: 4,
            cap: self.cap,
            terms: self.terms.clone(),
        }
    }
}

impl Series for TnElt {
    fn cap(&self) -> usize {
        self.cap
    }
    fn one_like(&self) -> Self {
        TnElt::one(self.n, self.cap)
    }
    fn zero_like_series(&self) -> Self {
        TnElt::zero(self.n, self.cap)
    }
    fn mul(&self, o: &Self) -> Self {
        self.product(o).expect("same n")
    }
    fn add_scaled_series(&mut self, o: &Self, c: &FormalScalar) {
        for (m, x) in &o.terms {
            if m.degree() <= self.cap {
                accumulate(&mut self.terms, m.clone(), x * c);
            }
        }
    }
    fn constant_term(&self) -> FormalScalar {
        self.terms.get(&Pbw::one()).cloned().unwrap_or_default()
    }
}

impl LieTarget for TnElt {
    fn lie_bracket(&self, o: &Self) -> Self {
        self.commutator(o).expect("same n")
    }
    fn add_scaled(&mut self, o: &Self, c: &FormalScalar) {
        self.add_scaled_series(o, c);
    }
    fn zero_like(&self) -> Self {
        TnElt::zero(self.n, self.cap)
    }
}

impl fmt::Display for TnElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

/// Normal form in `U(t_n)` of a series over the generators `generator_names(n)`
/// (or any generator names accepted by [`parse_generator`]).
pub fn tn_normal_form(x: &NCElt, n: u8, cap: usize) -> Result<TnElt> {
    if n != 3 && n != 4 {
        return Err(Error::Invalid(format!("U(t_{n}) is not supported")));
    }
    let gens: Vec<TnElt> = x
        .gens()
        .iter()
        .map(|g| TnElt::generator(n, g, cap))
        .collect::<Result<_>>()?;
    let mut out = TnElt::zero(n, cap);
    let mut words: Vec<(&Word, &FormalScalar)> = x.terms().iter().collect();
    words.sort_by(|a, b| a.0.cmp(b.0));
    for (w, c) in words {
        if w.len() > cap {
            return Err(Error::Cap(format!(
                "word of length {} beyond cap {cap}",
                w.len()
            )));
        }
        let mut p = TnElt::one(n, cap);
        for &l in w.iter() {
            p = p.product(&gens[l as usize])?;
        }
        out.add_scaled_series(&p, c);
    }
    Ok(out)
}

/// Dimension of the degree-`d` part of `U(t_n)`.
pub fn tn_dimension(n: u8, d: usize) -> u64 {
    match n {
        3 => (1u64 << (d + 1)) - 1,
        4 => {
            let mut s = 0u64;
            for a in 0..=d {
                for b in 0..=d - a {
                    s += 2u64.pow(b as u32) * 3u64.pow((d - a - b) as u32);
                }
            }
            s
        }
        _ => 0,
    }
}

/// Degree-2 defining relations as polynomials over `generator_names(n)`.
pub fn defining_relations(n: u8) -> Vec<AssocPoly> {
    let names = generator_names(n);
    let idx = |i: u8, j: u8| -> u8 {
        let (a, b) = (i.min(j), i.max(j));
        names.iter().position(|s| *s == format!("t{a}{b}")).unwrap() as u8
    };
    let comm = |x: &[(u8, i64)], y: &[(u8, i64)]| -> AssocPoly {
        let mut p = AssocPoly::new();
        for &(a, ca) in x {
            for &(b, cb) in y {
                accumulate(
                    &mut p,
                    Word::from_slice(&[a, b]),
                    FormalScalar::int(ca * cb),
                );
                accumulate(
                    &mut p,
                    Word::from_slice(&[b, a]),
                    FormalScalar::int(-ca * cb),
                );
            }
        }
        p
    };
    let mut rels = Vec::new();
    let pts: Vec<u8> = (1..=n).collect();
    // [t_ij, t_ik + t_jk] for each 3-subset and each choice of the pair {i,j}
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            for c in b + 1..pts.len() {
                let (i, j, k) = (pts[a], pts[b], pts[c]);
                for (p, q, r) in [(i, j, k), (i, k, j), (j, k, i)] {
                    rels.push(comm(&[(idx(p, q), 1)], &[(idx(p, r), 1), (idx(q, r), 1)]));
                }
            }
        }
    }
    // [t_ij, t_kl] for disjoint pairs
    if n == 4 {
        for (p, q) in [((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))] {
            rels.push(comm(&[(idx(p.0, p.1), 1)], &[(idx(q.0, q.1), 1)]));
        }
    }
    rels
}

fn word_index(w: &[u8], g: u64) -> u32 {
    let mut k = 0u64;
    for &x in w {
        k = k * g + x as u64;
    }
    k as u32
}

type IdealCache = Mutex<HashMap<(u8, usize), Arc<Echelon>>>;

fn ideal_cache() -> &'static IdealCache {
    static C: OnceLock<IdealCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Echelon basis of the degree-`d` part of the two-sided relation ideal.
pub fn ideal_component(n: u8, d: usize) -> Result<Arc<Echelon>> {
    let g = generator_names(n).len() as u64;
    if (g as f64).powi(d as i32) > 1e6 {
        return Err(Error::Guard(format!("ideal oracle needs {g}^{d} <= 10^6")));
    }
    if let Some(e) = ideal_cache().lock().unwrap().get(&(n, d)) {
        return Ok(e.clone());
    }
    let mut e = Echelon::new();
    if d >= 2 {
        let rels = defining_relations(n);
        let edge = d - 2;
        for left in 0..=edge {
            let right = edge - left;
            let lw: Vec<Word> = all_words(g as u8, left);
            let rw: Vec<Word> = all_words(g as u8, right);
            for r in &rels {
                for a in &lw {
                    for b in &rw {
                        let row: Vec<(u32, Rat)> = r
                            .iter()
                            .map(|(w, c)| {
                                let mut full = a.clone();
                                full.extend_from_slice(w);
                                full.extend_from_slice(b);
                                (word_index(&full, g), c.as_rat().unwrap())
                            })
                            .collect();
                        e.insert(&row)?;
                    }
                }
            }
        }
    }
    let e = Arc::new(e);
    ideal_cache().lock().unwrap().insert((n, d), e.clone());
    Ok(e)
}

pub fn all_words(k: u8, len: usize) -> Vec<Word> {
    let mut out = vec![Word::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * k as usize);
        for w in &out {
            for x in 0..k {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Membership of a rational-coefficient series in the relation ideal, by elimination.
pub fn ideal_oracle(x: &NCElt, n: u8, cap: usize) -> Result<bool> {
    if cap > 5 {
        return Err(Error::Guard("ideal oracle supports cap <= 5".into()));
    }
    let names = generator_names(n);
    let g = names.len() as u64;
    let remap: Vec<u8> = x
        .gens()
        .iter()
        .map(|s| {
            let (i, j) = parse_generator(s, n)?;
            Ok(names.iter().position(|t| *t == format!("t{i}{j}")).unwrap() as u8)
        })
        .collect::<Result<_>>()?;
    let mut by_deg: BTreeMap<usize, BTreeMap<u32, FormalScalar>> = BTreeMap::new();
    for (w, c) in x.terms() {
        if w.len() > cap {
            return Err(Error::Cap(format!(
                "word of length {} beyond cap {cap}",
                w.len()
            )));
        }
        let mw: Word = w.iter().map(|&l| remap[l as usize]).collect();
        let e = by_deg
            .entry(w.len())
            .or_default()
            .entry(word_index(&mw, g))
            .or_default();
        *e += c;
    }
    for (d, v) in by_deg {
        let v: BTreeMap<u32, FormalScalar> = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if v.is_empty() {
            continue;
        }
        let ech = ideal_component(n, d)?;
        if !ech.reduce_fs(&v).is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Agreement of `tn_normal_form` with `ideal_oracle` on seeded random samples.
#[derive(Clone, Debug)]
pub struct OracleAgreement {
    pub n: u8,
    pub degree: usize,
    pub samples: usize,
    /// Sample indices where the two procedures disagree.
    pub failures: Vec<usize>,
}

impl OracleAgreement {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_word(rng: &mut impl rand::Rng, g: u8, len: usize) -> Word {
    (0..len).map(|_| rng.gen_range(0..g)).collect()
}

/// For each sample, a random homogeneous `x` and a random ideal element `r`:
/// `r` must normalize to zero and satisfy the oracle, `x + r` and `x` must share
/// a normal form, and `x` normalizes to zero iff the oracle accepts it.
pub fn oracle_agreement(
    n: u8,
    degree: usize,
    samples: usize,
    seed: u64,
) -> Result<OracleAgreement> {
    use rand::{Rng, SeedableRng};
    let names = generator_names(n);
    let g = names.len() as u8;
    let rels = defining_relations(n);
    let mut rep = OracleAgreement {
        n,
        degree,
        samples,
        failures: Vec::new(),
    };
    for i in 0..samples {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
            seed ^ ((n as u64) << 56) ^ ((degree as u64) << 48) ^ i as u64,
        );
        let mut x = AssocPoly::new();
        for _ in 0..rng.gen_range(1..=6) {
            accumulate(
                &mut x,
                random_word(&mut rng, g, degree),
                FormalScalar::int(rng.gen_range(-3..=3)),
            );
        }
        let mut r = AssocPoly::new();
        if degree >= 2 {
            for _ in 0..3 {
                let rel = &rels[rng.gen_range(0..rels.len())];
                let left = rng.gen_range(0..=degree - 2);
                let (u, v) = (
                    random_word(&mut rng, g, left),
                    random_word(&mut rng, g, degree - 2 - left),
                );
                let c = FormalScalar::int(rng.gen_range(-3..=3));
                for (w, a) in rel {
                    let mut full = u.clone();
                    full.extend_from_slice(w);
                    full.extend_from_slice(&v);
                    accumulate(&mut r, full, &c * a);
                }
            }
        }
        if rng.gen_bool(0.2) {
            x.clear();
        }
        let xe = NCElt::from_terms(&names, degree, x);
        let re = NCElt::from_terms(&names, degree, r);
        let nx = tn_normal_form(&xe, n, degree)?;
        let ok = tn_normal_form(&re, n, degree)?.is_zero()
            && ideal_oracle(&re, n, degree)?
            && tn_normal_form(&xe.add(&re)?, n, degree)? == nx
            && nx.is_zero() == ideal_oracle(&xe, n, degree)?
            && ideal_oracle(&xe.add(&re)?, n, degree)? == nx.is_zero();
        if !ok {
            rep.failures.push(i);
        }
    }
    Ok(rep)
}

/// Lie element of `t4 = f(t14,t24,t34) + (f(t12,t23) + K c)`, for cheap linear checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct T4Lie {
    pub free: LieElt,
    pub low: LieElt,
    pub c: FormalScalar,
}

impl T4Lie {
    pub fn zero() -> T4Lie {
        T4Lie {
            free: LieElt::zero(&FREE_NAMES),
            low: LieElt::zero(&LOW_NAMES),
            c: FormalScalar::zero(),
        }
    }

    /// Image of the linear combination `sum coeff * t_ij`.
    pub fn linear(parts: &[(&str, i64)]) -> Result<T4Lie> {
        let mut x = T4Lie::zero();
        for (name, k) in parts {
            let k = FormalScalar::int(*k);
            let (i, j) = parse_generator(name, 4)?;
            match (i, j) {
                (1, 2) => x.low = x.low.add(&LieElt::letter(&LOW_NAMES, "t12")?.scale(&k))?,
                (2, 3) => x.low = x.low.add(&LieElt::letter(&LOW_NAMES, "t23")?.scale(&k))?,
                (1, 3) => {
                    x.c += &k;
                    x.low = x.low.sub(&LieElt::letter(&LOW_NAMES, "t12")?.scale(&k))?;
                    x.low = x.low.sub(&LieElt::letter(&LOW_NAMES, "t23")?.scale(&k))?;
                }
                (a, 4) => {
                    x.free = x
                        .free
                        .add(&LieElt::letter(&FREE_NAMES, FREE_NAMES[a as usize - 1])?.scale(&k))?
                }
                _ => unreachable!(),
            }
        }
        Ok(x)
    }

    pub fn is_zero(&self) -> bool {
        self.free.is_zero() && self.low.is_zero() && self.c.is_zero()
    }

    /// Action of `low + c * central` on a free Lie element.
    fn act(low: &LieElt, c: &FormalScalar, x: &LieElt) -> LieElt {
        if x.is_zero() || (low.is_zero() && c.is_zero()) {
            return LieElt::zero(&FREE_NAMES);
        }
        let xa = x.to_assoc();
        let mut out = AssocPoly::new();
        let mut ops: Vec<(Word, FormalScalar)> = low.to_assoc().into_iter().collect();
        if !c.is_zero() {
            ops.push((Word::from_slice(&[GC]), c.clone()));
        }
        for (gw, gc) in ops {
            let mut cur: HashMap<Word, FormalScalar> = xa.clone();
            for &g in gw.iter().rev() {
                let mut next = HashMap::new();
                for (w, k) in cur {
                    for (nw, s) in act_word(g, &w) {
                        accumulate(&mut next, nw, k.scale(&Rat::int(s)));
                    }
                }
                cur = next;
            }
            for (w, k) in cur {
                accumulate(&mut out, w, &k * &gc);
            }
        }
        LieElt::from_assoc(x.alphabet(), out).expect("derivations preserve Lie elements")
    }

    /// PBW image in `U(t4)`.
    pub fn to_tn(&self, cap: usize) -> TnElt {
        let mut t = TnElt::zero(4, cap);
        for (w, c) in self.free.to_assoc() {
            let m = Pbw {
                free: w,
                low: Word::new(),
                c: 0,
            };
            if m.degree() <= cap {
                accumulate(&mut t.terms, m, c);
            }
        }
        for (w, c) in self.low.to_assoc() {
            let m = Pbw {
                free: Word::new(),
                low: w,
                c: 0,
            };
            if m.degree() <= cap {
                accumulate(&mut t.terms, m, c);
            }
        }
        if !self.c.is_zero() && cap >= 1 {
            accumulate(
                &mut t.terms,
                Pbw {
                    free: Word::new(),
                    low: Word::new(),
                    c: 1,
                },
                self.c.clone(),
            );
        }
        t
    }
}

impl LieTarget for T4Lie {
    fn lie_bracket(&self, o: &Self) -> Self {
        let mut free = self.free.bracket(&o.free).unwrap();
        free = free.add(&T4Lie::act(&self.low, &self.c, &o.free)).unwrap();
        free = free.sub(&T4Lie::act(&o.low, &o.c, &self.free)).unwrap();
        T4Lie {
            free,
            low: self.low.bracket(&o.low).unwrap(),
            c: FormalScalar::zero(),
        }
    }
    fn add_scaled(&mut self, o: &Self, k: &FormalScalar) {
        self.free.add_scaled(&o.free, k);
        self.low.add_scaled(&o.low, k);
        self.c += &(&o.c * k);
    }
    fn zero_like(&self) -> Self {
        T4Lie::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn g(n: u8, s: &str, cap: usize) -> TnElt {
        TnElt::generator(n, s, cap).unwrap()
    }

    #[test]
    fn defining_relations_vanish() {
        for n in [3u8, 4] {
            let names = generator_names(n);
            for r in defining_relations(n) {
                let x = NCElt::from_terms(&names, 3, r.clone());
                assert!(tn_normal_form(&x, n, 3).unwrap().is_zero());
                assert!(ideal_oracle(&x, n, 3).unwrap());
            }
        }
        let t34 = g(4, "t34", 3);
        let t12 = g(4, "t12", 3);
        assert!(t12.commutator(&t34).unwrap().is_zero());
        let t13 = g(3, "t31", 3);
        let s = g(3, "t13", 3).add(&g(3, "t23", 3)).unwrap();
        assert!(g(3, "t12", 3).commutator(&s).unwrap().is_zero());
        assert_eq!(t13, g(3, "t13", 3));
        let t1 = NCElt::generator(&generator_names(3), "t12", 2).unwrap();
        assert!(!ideal_oracle(&t1, 3, 2).unwrap());
    }

    #[test]
    fn normal_form_agrees_with_ideal_oracle() {
        for n in [3u8, 4] {
            for d in 0..=4 {
                let r = oracle_agreement(n, d, 10, 7).unwrap();
                assert!(r.passed(), "n={n} d={d}: {:?}", r.failures);
            }
        }
    }

    #[test]
    fn relation_counts() {
        assert_eq!(defining_relations(4).len(), 15);
        let rows = defining_relations(3)
            .iter()
            .map(|r| {
                all_words(3, 2)
                    .iter()
                    .map(|w| r.get(w).map(|c| c.as_rat().unwrap()).unwrap_or_default())
                    .collect::<Vec<_>>()
            })
            .collect();
        assert_eq!(crate::linalg::dense_rank(rows), 2);
    }

    #[test]
    fn dimensions_match_ideal_elimination() {
        for n in [3u8, 4] {
            let g = generator_names(n).len() as u64;
            for d in 1..=4 {
                let rank = ideal_component(n, d).unwrap().rank() as u64;
                assert_eq!(g.pow(d as u32) - rank, tn_dimension(n, d), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn product_is_associative_and_nf_multiplicative() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let names = generator_names(4);
        let rand_elt = |rng: &mut rand_chacha::ChaCha8Rng| {
            let terms: Vec<(Word, FormalScalar)> = (0..4)
                .map(|_| {
                    let len = rng.gen_range(0..=2);
                    (
                        (0..len).map(|_| rng.gen_range(0..6u8)).collect(),
                        FormalScalar::int(rng.gen_range(-2..=2)),
                    )
                })
                .collect();
            NCElt::from_terms(&names, 6, terms)
        };
        for _ in 0..10 {
            let (x, y, z) = (rand_elt(&mut rng), rand_elt(&mut rng), rand_elt(&mut rng));
            let (nx, ny, nz) = (
                tn_normal_form(&x, 4, 6).unwrap(),
                tn_normal_form(&y, 4, 6).unwrap(),
                tn_normal_form(&z, 4, 6).unwrap(),
            );
            let l = nx.product(&ny).unwrap().product(&nz).unwrap();
            let r = nx.product(&ny.product(&nz).unwrap()).unwrap();
            assert_eq!(l, r);
            assert_eq!(
                tn_normal_form(&x.product(&y).unwrap(), 4, 6).unwrap(),
                nx.product(&ny).unwrap()
            );
        }
    }

    #[test]
    fn central_element_commutes_in_t3() {
        let c = TnElt::central(3, 5);
        let x = g(3, "t12", 5)
            .product(&g(3, "t23", 5))
            .unwrap()
            .add(&g(3, "t13", 5))
            .unwrap();
        assert!(c.commutator(&x).unwrap().is_zero());
        let sum = g(3, "t12", 5)
            .add(&g(3, "t13", 5))
            .unwrap()
            .add(&g(3, "t23", 5))
            .unwrap();
        assert_eq!(sum, c);
    }

    #[test]
    fn lie_model_matches_envelope() {
        let cap = 5;
        let gens = ["t12", "t13", "t14", "t23", "t24", "t34"];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<(&str, i64)> {
                (0..2)
                    .map(|_| (gens[rng.gen_range(0..6)], rng.gen_range(-2..=2i64)))
                    .collect()
            };
            let (p, q, r) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let lie = |v: &[(&str, i64)]| T4Lie::linear(v).unwrap();
            let tn = |v: &[(&str, i64)]| {
                let mut t = TnElt::zero(4, cap);
                for (s, k) in v {
                    t = t.add(&g(4, s, cap).scale(&FormalScalar::int(*k))).unwrap();
                }
                t
            };
            let l = lie(&p).lie_bracket(&lie(&q).lie_bracket(&lie(&r)));
            let t = tn(&p)
                .commutator(&tn(&q).commutator(&tn(&r)).unwrap())
                .unwrap();
            assert_eq!(l.to_tn(cap), t);
        }
    }
}
