//! Exact scalars: rationals with a machine-word fast path, and sparse Laurent
//! polynomials over a fixed set of formal symbols.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exact rational number. Values that fit in `i64/i64` are kept unboxed.
#[derive(Clone, Debug)]
pub enum Rat {
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn make_small(n: i128, d: i128) -> Rat {
    debug_assert!(d != 0);
    let g = n.gcd(&d);
    let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
    if d < 0 {
        n = -n;
        d = -d;
    }
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(a), Ok(b)) => Rat::Small(a, b),
        _ => Rat::Big(Box::new(BigRational::new_raw(
            BigInt::from(n),
            BigInt::from(d),
        ))),
    }
}

fn from_big(r: BigRational) -> Rat {
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(a), Some(b)) => Rat::Small(a, b),
        _ => Rat::Big(Box::new(r)),
    }
}

impl Rat {
    pub fn new(n: i64, d: i64) -> Rat {
        assert!(d != 0, "zero denominator");
        make_small(n as i128, d as i128)
    }

    pub fn int(n: i64) -> Rat {
        Rat::Small(n, 1)
    }

    pub fn zero() -> Rat {
        Rat::Small(0, 1)
    }

    pub fn one() -> Rat {
        Rat::Small(1, 1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rat::Small(1, 1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n < 0,
            Rat::Big(b) => b.is_negative(),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(b) => (**b).clone(),
        }
    }

    pub fn recip(&self) -> Rat {
        match self {
            Rat::Small(0, _) => panic!("division by zero"),
            Rat::Small(n, d) => make_small(*d as i128, *n as i128),
            Rat::Big(b) => from_big(b.recip()),
        }
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Parses `p`, `-p` or `p/q`.
    pub fn parse(s: &str) -> Result<Rat> {
        let bad = || Error::Parse(format!("invalid rational `{s}`"));
        let (n, d) = match s.split_once('/') {
            Some((a, b)) => (a, b),
            None => (s, "1"),
        };
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(from_big(BigRational::new(n, d)))
    }

    pub fn factorial_recip(k: u32) -> Rat {
        let mut f = BigInt::one();
        for i in 2..=k {
            f *= i;
        }
        from_big(BigRational::new(BigInt::one(), f))
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => a == c && b == d,
            (Rat::Big(x), Rat::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rat::Small(a, b) => {
                0u8.hash(state);
                a.hash(state);
                b.hash(state);
            }
            Rat::Big(x) => {
                1u8.hash(state);
                x.hash(state);
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    if let Some(s) = a.checked_add(*c) {
                        return Rat::Small(s, 1);
                    }
                }
                make_small(
                    *a as i128 * *d as i128 + *c as i128 * *b as i128,
                    *b as i128 * *d as i128,
                )
            }
            _ => from_big(self.to_big() + o.to_big()),
        }
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    if let Some(p) = a.checked_mul(*c) {
                        return Rat::Small(p, 1);
                    }
                }
                make_small(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => from_big(self.to_big() * o.to_big()),
        }
    }
}

impl<'a> Sub<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, o: &Rat) -> Rat {
        self + &(-o.clone())
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Small(a, b) => match a.checked_neg() {
                Some(n) => Rat::Small(n, b),
                None => make_small(-(a as i128), b as i128),
            },
            Rat::Big(x) => from_big(-*x),
        }
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, o: Rat) -> Rat {
        &self + &o
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, o: Rat) -> Rat {
        &self - &o
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, o: Rat) -> Rat {
        &self * &o
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, o: &Rat) {
        *self = &*self + o;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, o: &Rat) {
        *self = &*self - o;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, o: &Rat) {
        *self = &*self * o;
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{n}"),
            Rat::Small(n, d) => write!(f, "{n}/{d}"),
            Rat::Big(b) => {
                if b.denom().is_one() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

/// The formal symbols a [`FormalScalar`] may contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Z,
    Alpha,
    Lambda1,
    Lambda2,
    N,
}

pub const NSYM: usize = 5;

impl Symbol {
    pub const ALL: [Symbol; NSYM] = [
        Symbol::Z,
        Symbol::Alpha,
        Symbol::Lambda1,
        Symbol::Lambda2,
        Symbol::N,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Z => "z",
            Symbol::Alpha => "alpha",
            Symbol::Lambda1 => "lambda1",
            Symbol::Lambda2 => "lambda2",
            Symbol::N => "N",
        }
    }

    pub fn from_name(s: &str) -> Option<Symbol> {
        Symbol::ALL.into_iter().find(|x| x.name() == s)
    }

    fn idx(self) -> usize {
        self as usize
    }
}

/// Exponent vector over the declared symbols (Laurent: exponents may be negative).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono(pub [i8; NSYM]);

impl Mono {
    pub fn one() -> Mono {
        Mono([0; NSYM])
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; NSYM]
    }

    fn mul(&self, o: &Mono) -> Mono {
        let mut r = [0i8; NSYM];
        for i in 0..NSYM {
            r[i] = self.0[i]
                .checked_add(o.0[i])
                .expect("symbol exponent overflow");
        }
        Mono(r)
    }

    pub fn exp(&self, s: Symbol) -> i8 {
        self.0[s.idx()]
    }
}

/// A finite sum of rational multiples of Laurent monomials in the formal symbols.
///
/// Terms are kept sorted by monomial with no zero coefficients, so structural
/// equality is mathematical equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormalScalar {
    terms: SmallVec<[(Mono, Rat); 1]>,
}

impl FormalScalar {
    pub fn zero() -> Self {
        FormalScalar {
            terms: SmallVec::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn int(n: i64) -> Self {
        Self::from_rat(Rat::int(n))
    }

    pub fn rat(n: i64, d: i64) -> Self {
        Self::from_rat(Rat::new(n, d))
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut terms = SmallVec::new();
        if !r.is_zero() {
            terms.push((Mono::one(), r));
        }
        FormalScalar { terms }
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::monomial(s, 1)
    }

    pub fn monomial(s: Symbol, e: i8) -> Self {
        let mut m = Mono::one();
        m.0[s.idx()] = e;
        let mut terms = SmallVec::new();
        terms.push((m, Rat::one()));
        FormalScalar { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Mono, Rat)>) -> Self {
        let mut v: Vec<(Mono, Rat)> = it.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut terms: SmallVec<[(Mono, Rat); 1]> = SmallVec::new();
        for (m, c) in v {
            if let Some(last) = terms.last_mut() {
                if last.0 == m {
                    last.1 += &c;
                    if last.1.is_zero() {
                        terms.pop();
                    }
                    continue;
                }
            }
            terms.push((m, c));
        }
        FormalScalar { terms }
    }

    pub fn terms(&self) -> &[(Mono, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// The value if this scalar is a plain rational.
    pub fn as_rat(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 if self.terms[0].0.is_one() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        FormalScalar {
            terms: self.terms.iter().map(|(m, c)| (*m, c * r)).collect(),
        }
    }

    /// Coefficient of a monomial.
    pub fn coeff(&self, m: &Mono) -> Rat {
        self.terms
            .iter()
            .find(|(k, _)| k == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Part of `self` that is homogeneous of degree `e` in `s`, with `s` divided out.
    pub fn coeff_of_power(&self, s: Symbol, e: i8) -> Self {
        FormalScalar::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exp(s) == e)
                .map(|(m, c)| {
                    let mut m = *m;
                    m.0[s.idx()] = 0;
                    (m, c.clone())
                }),
        )
    }

    /// Substitute a scalar for a symbol (only non-negative powers of `s` allowed).
    pub fn substitute(&self, s: Symbol, v: &FormalScalar) -> Result<Self> {
        let mut out = FormalScalar::zero();
        for (m, c) in &self.terms {
            let e = m.exp(s);
            if e < 0 {
                return Err(Error::Invalid(format!(
                    "cannot substitute into negative power of {}",
                    s.name()
                )));
            }
            let mut rest = *m;
            rest.0[s.idx()] = 0;
            let mut t = FormalScalar {
                terms: SmallVec::from_vec(vec![(rest, c.clone())]),
            };
            for _ in 0..e {
                t = &t * v;
            }
            out += &t;
        }
        Ok(out)
    }

    /// Inverse of a single-term scalar.
    pub fn inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = &self.terms[0];
        let mut inv = [0i8; NSYM];
        for i in 0..NSYM {
            inv[i] = -m.0[i];
        }
        let mut terms = SmallVec::new();
        terms.push((Mono(inv), c.recip()));
        Some(FormalScalar { terms })
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        Symbol::ALL
            .into_iter()
            .filter(|s| self.terms.iter().any(|(m, _)| m.exp(*s) != 0))
            .collect()
    }

    /// Prefix s-expression form, e.g. `(+ lambda1 (* 2 alpha))`.
    pub fn to_sexpr(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| term_sexpr(m, c)).collect();
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            format!("(+ {})", parts.join(" "))
        }
    }
}

fn term_sexpr(m: &Mono, c: &Rat) -> String {
    let mut factors = Vec::new();
    if !c.is_one() || m.is_one() {
        factors.push(c.to_string());
    }
    for s in Symbol::ALL {
        match m.exp(s) {
            0 => {}
            1 => factors.push(s.name().to_string()),
            e => factors.push(format!("(^ {} {})", s.name(), e)),
        }
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        format!("(* {})", factors.join(" "))
    }
}

impl From<Rat> for FormalScalar {
    fn from(r: Rat) -> Self {
        FormalScalar::from_rat(r)
    }
}

impl From<i64> for FormalScalar {
    fn from(n: i64) -> Self {
        FormalScalar::int(n)
    }
}

impl<'a> Add<&'a FormalScalar> for &'a FormalScalar {
    type Output = FormalScalar;
    fn add(self, o: &FormalScalar) -> FormalScalar {
        if o.terms.is_empty() {
            return self.clone();
        }
        if self.terms.is_empty() {
            return o.clone();
        }
        let mut terms: SmallVec<[(Mono, Rat); 1]> =
            SmallVec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < o.terms.len() {
            match self.terms[i].0.cmp(&o.terms[j].0) {
                Ordering::Less => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    terms.push(o.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &o.terms[j].1;
                    if !c.is_zero() {
                        terms.push((self.terms[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend(self.terms[i..].iter().cloned());
        terms.extend(o.terms[j..].iter().cloned());
        FormalScalar { terms }
    }
}

impl<'a> Mul<&'a FormalScalar> for &'a FormalScalar {
    type Output = FormalScalar;
    fn mul(self, o: &FormalScalar) -> FormalScalar {
        if self.terms.is_empty() || o.terms.is_empty() {
            return FormalScalar::zero();
        }
        if self.terms.len() == 1 && o.terms.len() == 1 {
            let m = self.terms[0].0.mul(&o.terms[0].0);
            let c = &self.terms[0].1 * &o.terms[0].1;
            let mut terms = SmallVec::new();
            terms.push((m, c));
            return FormalScalar { terms };
        }
        FormalScalar::from_terms(
            self.terms
                .iter()
                .flat_map(|(m1, c1)| o.terms.iter().map(move |(m2, c2)| (m1.mul(m2), c1 * c2))),
        )
    }
}

impl<'a> Sub<&'a FormalScalar> for &'a FormalScalar {
    type Output = FormalScalar;
    fn sub(self, o: &FormalScalar) -> FormalScalar {
        self + &(-o.clone())
    }
}

impl Neg for FormalScalar {
    type Output = FormalScalar;
    fn neg(mut self) -> FormalScalar {
        for t in self.terms.iter_mut() {
            t.1 = -std::mem::take(&mut t.1);
        }
        self
    }
}

impl Add for FormalScalar {
    type Output = FormalScalar;
    fn add(self, o: FormalScalar) -> FormalScalar {
        &self + &o
    }
}

impl Sub for FormalScalar {
    type Output = FormalScalar;
    fn sub(self, o: FormalScalar) -> FormalScalar {
        &self - &o
    }
}

impl Mul for FormalScalar {
    type Output = FormalScalar;
    fn mul(self, o: FormalScalar) -> FormalScalar {
        &self * &o
    }
}

impl AddAssign<&FormalScalar> for FormalScalar {
    fn add_assign(&mut self, o: &FormalScalar) {
        if o.is_zero() {
            return;
        }
        *self = &*self + o;
    }
}

impl SubAssign<&FormalScalar> for FormalScalar {
    fn sub_assign(&mut self, o: &FormalScalar) {
        *self = &*self - o;
    }
}

impl MulAssign<&FormalScalar> for FormalScalar {
    fn mul_assign(&mut self, o: &FormalScalar) {
        *self = &*self * o;
    }
}

impl fmt::Display for FormalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            let mut parts = Vec::new();
            if !a.is_one() || m.is_one() {
                parts.push(a.to_string());
            }
            for s in Symbol::ALL {
                match m.exp(s) {
                    0 => {}
                    1 => parts.push(s.name().to_string()),
                    e => parts.push(format!("{}^{}", s.name(), e)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Accumulate `coeff` into `map[key]`, removing the entry when it cancels.
pub fn accumulate<K: Eq + Hash>(
    map: &mut std::collections::HashMap<K, FormalScalar>,
    key: K,
    coeff: FormalScalar,
) {
    if coeff.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            *e.get_mut() += &coeff;
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(coeff);
        }
    }
}

/// Rational counterpart of [`accumulate`].
pub fn accumulate_rat<K: Eq + Hash>(
    map: &mut std::collections::HashMap<K, Rat>,
    key: K,
    coeff: Rat,
) {
    if coeff.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            *e.get_mut() += &coeff;
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(coeff);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_basics() {
        let a = Rat::new(1, 3);
        let b = Rat::new(1, 6);
        assert_eq!(&a + &b, Rat::new(1, 2));
        assert_eq!(&a * &b, Rat::new(1, 18));
        assert_eq!(Rat::new(-2, -4), Rat::new(1, 2));
        assert_eq!(Rat::new(3, -6), Rat::new(-1, 2));
        assert_eq!(Rat::parse("-7/21").unwrap(), Rat::new(-1, 3));
        assert!(Rat::parse("1/0").is_err());
    }

    #[test]
    fn rat_overflow_promotes() {
        let big = Rat::int(i64::MAX);
        let s = &big + &big;
        assert!(matches!(s, Rat::Big(_)));
        let back = &s - &big;
        assert_eq!(back, big);
        assert!(matches!(back, Rat::Small(..)));
        let p = &big * &big;
        assert_eq!(&p * &big.recip(), big);
    }

    #[test]
    fn formal_cancellation() {
        let l = FormalScalar::symbol(Symbol::Lambda1);
        let a = FormalScalar::symbol(Symbol::Alpha);
        let x = &l + &a.scale(&Rat::int(2));
        let y = &x - &l;
        assert_eq!(y, a.scale(&Rat::int(2)));
        assert!((&x - &x).is_zero());
        let n = FormalScalar::symbol(Symbol::N);
        let ninv = n.inverse().unwrap();
        assert!((&n * &ninv).is_one());
        assert_eq!(x.to_sexpr(), "(+ lambda1 (* 2 alpha))");
    }

    #[test]
    fn formal_substitute() {
        let l = FormalScalar::symbol(Symbol::Lambda1);
        let sq = &l * &l;
        let v = &l + &FormalScalar::symbol(Symbol::Alpha);
        let r = sq.substitute(Symbol::Lambda1, &v).unwrap();
        let expect = &(&v * &v) + &FormalScalar::zero();
        assert_eq!(r, expect);
    }
}
