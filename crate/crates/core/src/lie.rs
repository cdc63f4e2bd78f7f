//! Free Lie algebras over a finite ordered alphabet, stored in the Lyndon basis.
//!
//! A Lyndon word `w` stands for its standard bracketing `P_w`: letters are
//! themselves, and for `w = uv` with `v` the longest proper Lyndon suffix,
//! `P_w = [P_u, P_v]`. Expanding `P_w` in the free associative algebra gives
//! `w` plus lexicographically larger words, which makes conversion back from
//! associative polynomials triangular.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{FormalScalar, Rat};

pub type Word = SmallVec<[u8; 16]>;

/// Associative polynomial in the free algebra, keyed by word.
pub type AssocPoly = HashMap<Word, FormalScalar>;

pub fn is_lyndon(w: &[u8]) -> bool {
    if w.is_empty() {
        return false;
    }
    (1..w.len()).all(|i| w < &w[i..])
}

/// Standard factorization `w = u v` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[u8]) -> (&[u8], &[u8]) {
    debug_assert!(w.len() >= 2);
    for i in 1..w.len() {
        if is_lyndon(&w[i..]) {
            return (&w[..i], &w[i..]);
        }
    }
    unreachable!("a Lyndon word of length >= 2 has a proper Lyndon suffix")
}

/// All Lyndon words of length `n` over `k` letters, in lexicographic order (Duval).
pub fn lyndon_words(k: u8, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 0 || k == 0 {
        return out;
    }
    let mut w: Vec<i16> = vec![-1];
    while !w.is_empty() {
        *w.last_mut().unwrap() += 1;
        let m = w.len();
        if m == n {
            out.push(w.iter().map(|&x| x as u8).collect());
        }
        while w.len() < n {
            let x = w[w.len() - m];
            w.push(x);
        }
        while let Some(&last) = w.last() {
            if last == k as i16 - 1 {
                w.pop();
            } else {
                break;
            }
        }
    }
    out
}

fn mobius(n: usize) -> i64 {
    let mut n = n;
    let mut res = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            res = -res;
        }
        p += 1;
    }
    if n > 1 {
        res = -res;
    }
    res
}

/// Necklace count `(1/d) sum_{e|d} mu(e) k^{d/e}`: the free Lie dimension in degree `d`.
pub fn necklace_count(k: u64, d: usize) -> u64 {
    let mut s: i128 = 0;
    for e in 1..=d {
        if d % e == 0 {
            s += mobius(e) as i128 * (k as i128).pow((d / e) as u32);
        }
    }
    (s / d as i128) as u64
}

thread_local! {
    static EXPAND: RefCell<HashMap<Word, Rc<Vec<(Word, i64)>>>> = RefCell::new(HashMap::new());
    static BRACKET: RefCell<HashMap<(Word, Word), Rc<Vec<(Word, Rat)>>>> = RefCell::new(HashMap::new());
}

/// Expansion of `P_w` in the free associative algebra (integer coefficients).
pub fn expand_lyndon(w: &[u8]) -> Rc<Vec<(Word, i64)>> {
    if let Some(r) = EXPAND.with(|m| m.borrow().get(w).cloned()) {
        return r;
    }
    let r = if w.len() == 1 {
        Rc::new(vec![(Word::from_slice(w), 1)])
    } else {
        let (u, v) = standard_factorization(w);
        let (pu, pv) = (expand_lyndon(u), expand_lyndon(v));
        let mut acc: HashMap<Word, i64> = HashMap::new();
        for (a, ca) in pu.iter() {
            for (b, cb) in pv.iter() {
                let mut ab = a.clone();
                ab.extend_from_slice(b);
                *acc.entry(ab).or_insert(0) += ca * cb;
                let mut ba = b.clone();
                ba.extend_from_slice(a);
                *acc.entry(ba).or_insert(0) -= ca * cb;
            }
        }
        let mut v: Vec<(Word, i64)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        v.sort();
        Rc::new(v)
    };
    EXPAND.with(|m| m.borrow_mut().insert(Word::from_slice(w), r.clone()));
    r
}

/// Lyndon coordinates of an associative polynomial that is a Lie element.
pub fn assoc_to_lyndon(poly: AssocPoly) -> Result<BTreeMap<Word, FormalScalar>> {
    let mut rest: BTreeMap<Word, FormalScalar> =
        poly.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    let mut out = BTreeMap::new();
    while let Some((m, c)) = rest.pop_first() {
        if !is_lyndon(&m) {
            return Err(Error::Invalid("polynomial is not a Lie element".into()));
        }
        for (u, k) in expand_lyndon(&m).iter().skip(1) {
            let d = c.scale(&Rat::int(-*k));
            match rest.get_mut(u) {
                Some(e) => {
                    *e += &d;
                    if e.is_zero() {
                        rest.remove(u);
                    }
                }
                None => {
                    rest.insert(u.clone(), d);
                }
            }
        }
        out.insert(m, c);
    }
    Ok(out)
}

/// `[P_u, P_v]` in Lyndon coordinates.
fn bracket_basis(u: &[u8], v: &[u8]) -> Rc<Vec<(Word, Rat)>> {
    let key = (Word::from_slice(u), Word::from_slice(v));
    if let Some(r) = BRACKET.with(|m| m.borrow().get(&key).cloned()) {
        return r;
    }
    let (pu, pv) = (expand_lyndon(u), expand_lyndon(v));
    let mut acc: HashMap<Word, i64> = HashMap::new();
    for (a, ca) in pu.iter() {
        for (b, cb) in pv.iter() {
            let mut ab = a.clone();
            ab.extend_from_slice(b);
            *acc.entry(ab).or_insert(0) += ca * cb;
            let mut ba = b.clone();
            ba.extend_from_slice(a);
            *acc.entry(ba).or_insert(0) -= ca * cb;
        }
    }
    let poly: AssocPoly = acc
        .into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|(w, c)| (w, FormalScalar::int(c)))
        .collect();
    let res = assoc_to_lyndon(poly).expect("commutator of Lie elements is Lie");
    let r: Rc<Vec<(Word, Rat)>> = Rc::new(
        res.into_iter()
            .map(|(w, c)| (w, c.as_rat().expect("integer coefficients")))
            .collect(),
    );
    BRACKET.with(|m| m.borrow_mut().insert(key, r.clone()));
    r
}

/// Anything a Lie series can be evaluated in.
pub trait LieTarget: Clone {
    fn lie_bracket(&self, other: &Self) -> Self;
    fn add_scaled(&mut self, other: &Self, c: &FormalScalar);
    fn zero_like(&self) -> Self;
}

/// Element of the free Lie algebra on an ordered alphabet, in Lyndon coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieElt {
    alphabet: Vec<String>,
    terms: BTreeMap<Word, FormalScalar>,
}

impl LieElt {
    pub fn zero(alphabet: &[&str]) -> LieElt {
        LieElt {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn zero_over(alphabet: &[String]) -> LieElt {
        LieElt {
            alphabet: alphabet.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn letter(alphabet: &[&str], name: &str) -> Result<LieElt> {
        let mut x = LieElt::zero(alphabet);
        let i = x.letter_index(name)?;
        x.terms.insert(Word::from_slice(&[i]), FormalScalar::one());
        Ok(x)
    }

    pub fn letter_index(&self, name: &str) -> Result<u8> {
        self.alphabet
            .iter()
            .position(|a| a == name)
            .map(|i| i as u8)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    /// Basis element `P_w` for a Lyndon word `w`.
    pub fn lyndon(alphabet: &[String], w: &[u8]) -> Result<LieElt> {
        if !is_lyndon(w) || w.iter().any(|&c| c as usize >= alphabet.len()) {
            return Err(Error::Invalid(format!(
                "{w:?} is not a Lyndon word over the alphabet"
            )));
        }
        let mut terms = BTreeMap::new();
        terms.insert(Word::from_slice(w), FormalScalar::one());
        Ok(LieElt {
            alphabet: alphabet.to_vec(),
            terms,
        })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn terms(&self) -> &BTreeMap<Word, FormalScalar> {
        &self.terms
    }

    pub fn coeff(&self, w: &[u8]) -> FormalScalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn component(&self, d: usize) -> LieElt {
        LieElt {
            alphabet: self.alphabet.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn truncate(&self, cap: usize) -> LieElt {
        LieElt {
            alphabet: self.alphabet.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() <= cap)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_alphabet(&self, o: &LieElt) -> Result<()> {
        if self.alphabet != o.alphabet {
            return Err(Error::AlphabetMismatch(
                self.alphabet.clone(),
                o.alphabet.clone(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, o: &LieElt) -> Result<LieElt> {
        self.check_alphabet(o)?;
        let mut r = self.clone();
        r.add_assign_scaled(o, &FormalScalar::one());
        Ok(r)
    }

    pub fn sub(&self, o: &LieElt) -> Result<LieElt> {
        self.check_alphabet(o)?;
        let mut r = self.clone();
        r.add_assign_scaled(o, &FormalScalar::int(-1));
        Ok(r)
    }

    fn add_assign_scaled(&mut self, o: &LieElt, c: &FormalScalar) {
        for (w, x) in &o.terms {
            let d = x * c;
            add_term(&mut self.terms, w, d);
        }
    }

    pub fn scale(&self, c: &FormalScalar) -> LieElt {
        let mut r = LieElt::zero_over(&self.alphabet);
        r.add_assign_scaled(self, c);
        r
    }

    pub fn scale_rat(&self, r: &Rat) -> LieElt {
        self.scale(&FormalScalar::from_rat(r.clone()))
    }

    pub fn neg(&self) -> LieElt {
        self.scale_rat(&Rat::int(-1))
    }

    pub fn bracket(&self, o: &LieElt) -> Result<LieElt> {
        self.check_alphabet(o)?;
        let mut out = BTreeMap::new();
        for (u, cu) in &self.terms {
            for (v, cv) in &o.terms {
                if u == v {
                    continue;
                }
                let c = cu * cv;
                for (w, k) in bracket_basis(u, v).iter() {
                    add_term(&mut out, w, c.scale(k));
                }
            }
        }
        Ok(LieElt {
            alphabet: self.alphabet.clone(),
            terms: out,
        })
    }

    /// Expansion in the free associative algebra.
    pub fn to_assoc(&self) -> AssocPoly {
        let mut acc = AssocPoly::new();
        for (w, c) in &self.terms {
            for (u, k) in expand_lyndon(w).iter() {
                crate::scalar::accumulate(&mut acc, u.clone(), c.scale(&Rat::int(*k)));
            }
        }
        acc
    }

    pub fn from_assoc(alphabet: &[String], poly: AssocPoly) -> Result<LieElt> {
        Ok(LieElt {
            alphabet: alphabet.to_vec(),
            terms: assoc_to_lyndon(poly)?,
        })
    }

    /// Terms whose letter counts match `degrees` exactly (unlisted letters count 0).
    pub fn multidegree_project(&self, degrees: &[(&str, usize)]) -> Result<LieElt> {
        let mut want = vec![0usize; self.alphabet.len()];
        for (name, d) in degrees {
            want[self.letter_index(name)? as usize] = *d;
        }
        Ok(LieElt {
            alphabet: self.alphabet.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| letter_counts(w, self.alphabet.len()) == want)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        })
    }

    /// Evaluate in a target Lie algebra, given the image of each letter.
    /// Words longer than `max_len` are skipped (they vanish under truncation).
    pub fn substitute<T: LieTarget>(&self, images: &[T], max_len: Option<usize>) -> Result<T> {
        if images.len() != self.alphabet.len() {
            return Err(Error::Invalid(format!(
                "expected {} letter images, got {}",
                self.alphabet.len(),
                images.len()
            )));
        }
        let Some(first) = images.first() else {
            return Err(Error::Invalid("empty alphabet".into()));
        };
        let mut memo: HashMap<Word, T> = HashMap::new();
        let mut out = first.zero_like();
        for (w, c) in &self.terms {
            if max_len.is_some_and(|m| w.len() > m) {
                continue;
            }
            let v = eval_word(w, images, &mut memo);
            out.add_scaled(&v, c);
        }
        Ok(out)
    }

    /// Rename letters by a permutation-like map (letter index to new letter index).
    pub fn relabel(&self, map: &[u8]) -> Result<LieElt> {
        let mut poly = AssocPoly::new();
        for (w, c) in self.to_assoc() {
            let nw: Word = w.iter().map(|&x| map[x as usize]).collect();
            crate::scalar::accumulate(&mut poly, nw, c);
        }
        LieElt::from_assoc(&self.alphabet, poly)
    }

    /// Standard bracketing of a Lyndon word as text, e.g. `[A [A B]]`.
    pub fn word_bracket_string(&self, w: &[u8]) -> String {
        if w.len() == 1 {
            return self.alphabet[w[0] as usize].clone();
        }
        let (u, v) = standard_factorization(w);
        format!(
            "[{} {}]",
            self.word_bracket_string(u),
            self.word_bracket_string(v)
        )
    }

    pub fn to_sexpr(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let b = self.word_bracket_string(w);
                if c.is_one() {
                    b
                } else {
                    format!("(* {} {})", c.to_sexpr(), b)
                }
            })
            .collect();
        match parts.len() {
            0 => "0".into(),
            1 => parts.into_iter().next().unwrap(),
            _ => format!("(+ {})", parts.join(" ")),
        }
    }
}

fn eval_word<T: LieTarget>(w: &[u8], images: &[T], memo: &mut HashMap<Word, T>) -> T {
    if w.len() == 1 {
        return images[w[0] as usize].clone();
    }
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let (u, v) = standard_factorization(w);
    let a = eval_word(u, images, memo);
    let b = eval_word(v, images, memo);
    let r = a.lie_bracket(&b);
    memo.insert(Word::from_slice(w), r.clone());
    r
}

pub fn letter_counts(w: &[u8], k: usize) -> Vec<usize> {
    let mut c = vec![0usize; k];
    for &x in w {
        c[x as usize] += 1;
    }
    c
}

fn add_term(map: &mut BTreeMap<Word, FormalScalar>, w: &Word, d: FormalScalar) {
    if d.is_zero() {
        return;
    }
    match map.get_mut(w) {
        Some(e) => {
            *e += &d;
            if e.is_zero() {
                map.remove(w);
            }
        }
        None => {
            map.insert(w.clone(), d);
        }
    }
}

impl LieTarget for LieElt {
    fn lie_bracket(&self, other: &Self) -> Self {
        self.bracket(other).expect("common alphabet")
    }
    fn add_scaled(&mut self, other: &Self, c: &FormalScalar) {
        self.add_assign_scaled(other, c);
    }
    fn zero_like(&self) -> Self {
        LieElt::zero_over(&self.alphabet)
    }
}

impl fmt::Display for LieElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

/// Bracket expression over named letters.
#[derive(Clone, Debug, PartialEq)]
pub enum LieExpr {
    Letter(String),
    Sum(Vec<LieExpr>),
    Scaled(FormalScalar, Box<LieExpr>),
    Bracket(Box<LieExpr>, Box<LieExpr>),
}

impl LieExpr {
    pub fn letter(s: &str) -> LieExpr {
        LieExpr::Letter(s.to_string())
    }
    pub fn br(a: LieExpr, b: LieExpr) -> LieExpr {
        LieExpr::Bracket(Box::new(a), Box::new(b))
    }
    pub fn scaled(c: FormalScalar, a: LieExpr) -> LieExpr {
        LieExpr::Scaled(c, Box::new(a))
    }
}

/// Normal form of a bracket expression in the Lyndon basis.
pub fn lie_normalize(alphabet: &[&str], e: &LieExpr) -> Result<LieElt> {
    let alph: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
    Ok(match e {
        LieExpr::Letter(s) => LieElt::letter(alphabet, s)?,
        LieExpr::Sum(v) => {
            let mut acc = LieElt::zero_over(&alph);
            for x in v {
                acc = acc.add(&lie_normalize(alphabet, x)?)?;
            }
            acc
        }
        LieExpr::Scaled(c, x) => lie_normalize(alphabet, x)?.scale(c),
        LieExpr::Bracket(a, b) => {
            lie_normalize(alphabet, a)?.bracket(&lie_normalize(alphabet, b)?)?
        }
    })
}

pub const AB: [&str; 2] = ["A", "B"];

fn a() -> LieElt {
    LieElt::letter(&AB, "A").unwrap()
}

fn b() -> LieElt {
    LieElt::letter(&AB, "B").unwrap()
}

fn br(x: &LieElt, y: &LieElt) -> LieElt {
    x.bracket(y).unwrap()
}

/// `C_kl = ad_B^{k-1} ad_A^{l-1} [A,B]` over `{A,B}`.
pub fn c_generator(k: usize, l: usize) -> Result<LieElt> {
    if k < 1 || l < 1 {
        return Err(Error::Invalid(format!("C_{{{k},{l}}} needs k,l >= 1")));
    }
    let (a, b) = (a(), b());
    let mut x = br(&a, &b);
    for _ in 1..l {
        x = br(&a, &x);
    }
    for _ in 1..k {
        x = br(&b, &x);
    }
    Ok(x)
}

fn cc(k: usize, l: usize) -> LieElt {
    c_generator(k, l).unwrap()
}

fn lin(terms: &[(Rat, LieElt)]) -> LieElt {
    let mut acc = LieElt::zero(&AB);
    for (c, x) in terms {
        acc = acc.add(&x.scale_rat(c)).unwrap();
    }
    acc
}

fn q(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

pub fn sigma3() -> LieElt {
    cc(1, 2).add(&cc(2, 1)).unwrap()
}

pub fn sigma5() -> LieElt {
    let c11 = cc(1, 1);
    lin(&[
        (q(1, 1), cc(1, 4)),
        (q(1, 1), cc(4, 1)),
        (q(2, 1), cc(2, 3)),
        (q(2, 1), cc(3, 2)),
        (q(1, 2), br(&c11, &cc(1, 2))),
        (q(3, 2), br(&c11, &cc(2, 1))),
    ])
}

pub fn sigma7() -> LieElt {
    let c11 = cc(1, 1);
    let (c12, c21) = (cc(1, 2), cc(2, 1));
    lin(&[
        (q(1, 1), cc(1, 6)),
        (q(1, 1), cc(6, 1)),
        (q(3, 1), cc(2, 5)),
        (q(3, 1), cc(5, 2)),
        (q(5, 1), cc(3, 4)),
        (q(5, 1), cc(4, 3)),
        (q(4, 1), br(&c11, &cc(1, 4))),
        (q(13, 1), br(&c11, &cc(2, 3))),
        (q(12, 1), br(&c11, &cc(3, 2))),
        (q(5, 1), br(&c11, &cc(4, 1))),
        (q(3, 1), br(&c12, &cc(1, 3))),
        (q(61, 16), br(&c12, &cc(2, 2))),
        (q(-19, 16), br(&c12, &cc(3, 1))),
        (q(99, 16), br(&c21, &cc(1, 3))),
        (q(179, 16), br(&c21, &cc(2, 2))),
        (q(3, 1), br(&c21, &cc(3, 1))),
        (q(65, 16), br(&c11, &br(&c11, &c12))),
        (q(17, 16), br(&c11, &br(&c11, &c21))),
    ])
}

/// The displayed expansion of `{sigma3, sigma5}` in `C_kl` monomials.
pub fn bracket35_display() -> LieElt {
    let c11 = cc(1, 1);
    let (c12, c21) = (cc(1, 2), cc(2, 1));
    lin(&[
        (q(-2, 1), br(&c11, &cc(1, 5))),
        (q(-5, 1), br(&c11, &cc(2, 4))),
        (q(5, 1), br(&c11, &cc(4, 2))),
        (q(2, 1), br(&c11, &cc(5, 1))),
        (q(-4, 1), br(&c11, &br(&c11, &cc(1, 3)))),
        (q(9, 1), br(&c11, &br(&c11, &cc(2, 2)))),
        (q(6, 1), br(&c11, &br(&c11, &cc(3, 1)))),
        (q(-5, 1), br(&c12, &cc(1, 4))),
        (q(-9, 1), br(&c12, &cc(2, 3))),
        (q(3, 2), br(&c12, &cc(3, 2))),
        (q(7, 2), br(&c12, &cc(4, 1))),
        (q(-11, 2), br(&c12, &br(&c11, &c12))),
        (q(3, 2), br(&c12, &br(&c11, &c21))),
        (q(-7, 2), br(&c21, &cc(1, 4))),
        (q(-3, 2), br(&c21, &cc(2, 3))),
        (q(9, 1), br(&c21, &cc(3, 2))),
        (q(5, 1), br(&c21, &cc(4, 1))),
        (q(7, 2), br(&c21, &br(&c11, &c21))),
        (q(3, 2), br(&cc(1, 3), &cc(2, 2))),
        (q(3, 1), br(&cc(1, 3), &cc(3, 1))),
        (q(3, 2), br(&cc(2, 2), &cc(3, 1))),
    ])
}

/// Named grt1 elements: `3`, `5`, `7` or `bracket35`.
pub fn sigma_element(name: &str) -> Result<LieElt> {
    match name {
        "3" | "sigma3" => Ok(sigma3()),
        "5" | "sigma5" => Ok(sigma5()),
        "7" | "sigma7" => Ok(sigma7()),
        "bracket35" => Ok(bracket35_display()),
        _ => Err(Error::Invalid(format!("unsupported grt1 element `{name}`"))),
    }
}

/// Derivation of the free Lie algebra on `{A,B}` with `A -> 0`, `B -> [psi, B]`.
pub fn ihara_derivation(psi: &LieElt, x: &LieElt) -> Result<LieElt> {
    if psi.alphabet.len() != 2 {
        return Err(Error::Invalid(
            "Ihara bracket needs a two-letter alphabet".into(),
        ));
    }
    psi.check_alphabet(x)?;
    let b = LieElt::lyndon(&psi.alphabet, &[1])?;
    let db = psi.bracket(&b)?.to_assoc();
    let mut out = AssocPoly::new();
    for (w, c) in x.to_assoc() {
        for i in 0..w.len() {
            if w[i] != 1 {
                continue;
            }
            for (u, cu) in &db {
                let mut nw: Word = Word::from_slice(&w[..i]);
                nw.extend_from_slice(u);
                nw.extend_from_slice(&w[i + 1..]);
                crate::scalar::accumulate(&mut out, nw, &c * cu);
            }
        }
    }
    LieElt::from_assoc(&psi.alphabet, out)
}

/// `{psi1, psi2} = D_psi1(psi2) - D_psi2(psi1) - [psi1, psi2]`.
pub fn ihara_bracket(p1: &LieElt, p2: &LieElt) -> Result<LieElt> {
    let d12 = ihara_derivation(p1, p2)?;
    let d21 = ihara_derivation(p2, p1)?;
    d12.sub(&d21)?.sub(&p1.bracket(p2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lyndon_counts_match_necklaces() {
        for d in 1..=8 {
            assert_eq!(
                lyndon_words(2, d).len() as u64,
                necklace_count(2, d),
                "degree {d}"
            );
            assert_eq!(
                lyndon_words(3, d).len() as u64,
                necklace_count(3, d),
                "degree {d}"
            );
        }
        assert_eq!(necklace_count(2, 3), 2);
    }

    #[test]
    fn degree_three_dimension_by_brute_span() {
        // span all left-normed brackets of degree 3 and compare with the Lyndon count
        let (a, b) = (a(), b());
        let gens = [a.clone(), b.clone()];
        let mut vecs = Vec::new();
        for x in &gens {
            for y in &gens {
                for z in &gens {
                    vecs.push(br(&br(x, y), z).to_assoc());
                }
            }
        }
        let words: Vec<Word> = (0..8u8)
            .map(|m| (0..3).map(|i| (m >> i) & 1).collect())
            .collect();
        let rows: Vec<Vec<Rat>> = vecs
            .iter()
            .map(|v| {
                words
                    .iter()
                    .map(|w| v.get(w).map(|c| c.as_rat().unwrap()).unwrap_or_default())
                    .collect()
            })
            .collect();
        assert_eq!(crate::linalg::dense_rank(rows), 2);
    }

    #[test]
    fn antisymmetry_examples() {
        let (a, b) = (a(), b());
        assert_eq!(br(&b, &a), br(&a, &b).neg());
        // [A,[B,A]] and [[A,B],A] coincide, so their sum is twice either
        let (x, y) = (br(&a, &br(&b, &a)), br(&br(&a, &b), &a));
        assert!(x.sub(&y).unwrap().is_zero());
        assert_eq!(x.add(&y).unwrap(), cc(1, 2).scale_rat(&Rat::int(-2)));
    }

    #[test]
    fn c_generators() {
        let (a, b) = (a(), b());
        assert_eq!(cc(1, 1), br(&a, &b));
        assert_eq!(cc(2, 1), br(&b, &br(&a, &b)));
        let x = cc(3, 4);
        for w in x.terms().keys() {
            assert_eq!(letter_counts(w, 2), vec![4, 3]);
        }
        assert!(c_generator(0, 1).is_err());
    }

    #[test]
    fn sigma3_is_bracket_of_sum() {
        let s = a().add(&b()).unwrap();
        assert_eq!(sigma3(), br(&s, &cc(1, 1)));
    }

    #[test]
    fn ihara_matches_display() {
        assert_eq!(
            ihara_bracket(&sigma3(), &sigma5()).unwrap(),
            bracket35_display()
        );
        assert!(ihara_bracket(&sigma3(), &sigma3()).unwrap().is_zero());
        assert!(ihara_bracket(&a(), &b()).unwrap().is_zero());
    }

    #[test]
    fn swap_letters_negates_sigma3() {
        assert_eq!(sigma3().relabel(&[1, 0]).unwrap(), sigma3().neg());
    }

    #[test]
    fn c11_c12_bracket_by_expansion() {
        let x = br(&cc(1, 1), &cc(1, 2));
        let mut p = AssocPoly::new();
        let (pa, pb) = (cc(1, 1).to_assoc(), cc(1, 2).to_assoc());
        for (u, cu) in &pa {
            for (v, cv) in &pb {
                let mut uv = u.clone();
                uv.extend_from_slice(v);
                crate::scalar::accumulate(&mut p, uv, cu * cv);
                let mut vu = v.clone();
                vu.extend_from_slice(u);
                crate::scalar::accumulate(&mut p, vu, -(cu * cv));
            }
        }
        assert_eq!(x.to_assoc(), p);
    }

    fn arb_lie(deg: usize) -> impl Strategy<Value = LieElt> {
        let words = lyndon_words(2, deg);
        proptest::collection::vec(-3i64..=3, words.len()).prop_map(move |cs| {
            let mut x = LieElt::zero(&AB);
            for (w, c) in words.iter().zip(cs) {
                x.terms.insert(w.clone(), FormalScalar::int(c));
            }
            x.terms.retain(|_, c| !c.is_zero());
            x
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn jacobi_and_antisymmetry(x in arb_lie(2), y in arb_lie(1), z in arb_lie(3)) {
            prop_assert!(br(&x, &y).add(&br(&y, &x)).unwrap().is_zero());
            let j = br(&x, &br(&y, &z)).add(&br(&y, &br(&z, &x))).unwrap().add(&br(&z, &br(&x, &y))).unwrap();
            prop_assert!(j.is_zero());
            prop_assert!(br(&z, &z).is_zero());
        }

        #[test]
        fn substitution_is_a_morphism(x in arb_lie(2), y in arb_lie(3), i0 in arb_lie(1), i1 in arb_lie(2)) {
            let images = [i0, i1];
            let lhs = br(&x, &y).substitute(&images, None).unwrap();
            let rhs = br(&x.substitute(&images, None).unwrap(), &y.substitute(&images, None).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn ihara_antisymmetric(x in arb_lie(3), y in arb_lie(2)) {
            let l = ihara_bracket(&x, &y).unwrap();
            let r = ihara_bracket(&y, &x).unwrap();
            prop_assert!(l.add(&r).unwrap().is_zero());
        }
    }
}
