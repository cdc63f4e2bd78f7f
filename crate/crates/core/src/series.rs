//! Degree-truncated noncommutative power series.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lie::{AssocPoly, LieElt, LieTarget, Word};
use crate::scalar::{accumulate, FormalScalar, Rat};

/// Truncated graded algebra with a unit: enough structure for exp, log and inverses.
pub trait Series: Clone {
    fn cap(&self) -> usize;
    fn one_like(&self) -> Self;
    fn zero_like_series(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn add_scaled_series(&mut self, o: &Self, c: &FormalScalar);
    fn constant_term(&self) -> FormalScalar;
}

pub fn series_exp<T: Series>(x: &T) -> Result<T> {
    if !x.constant_term().is_zero() {
        return Err(Error::Invalid("exp needs constant term 0".into()));
    }
    let mut sum = x.one_like();
    let mut term = x.one_like();
    for k in 1..=x.cap() {
        term = term.mul(x);
        let mut t = term.zero_like_series();
        t.add_scaled_series(
            &term,
            &FormalScalar::from_rat(Rat::factorial_recip(k as u32)),
        );
        sum.add_scaled_series(&t, &FormalScalar::one());
    }
    Ok(sum)
}

pub fn series_log<T: Series>(x: &T) -> Result<T> {
    if !x.constant_term().is_one() {
        return Err(Error::Invalid("log needs constant term 1".into()));
    }
    let mut y = x.clone();
    y.add_scaled_series(&x.one_like(), &FormalScalar::int(-1));
    let mut sum = x.zero_like_series();
    let mut pow = x.one_like();
    for k in 1..=x.cap() {
        pow = pow.mul(&y);
        let sign = if k % 2 == 1 { 1 } else { -1 };
        sum.add_scaled_series(&pow, &FormalScalar::rat(sign, k as i64));
    }
    Ok(sum)
}

/// Inverse of a series with constant term 1.
pub fn series_inverse<T: Series>(x: &T) -> Result<T> {
    if !x.constant_term().is_one() {
        return Err(Error::Invalid("inverse needs constant term 1".into()));
    }
    let mut y = x.one_like();
    y.add_scaled_series(x, &FormalScalar::int(-1));
    let mut sum = x.one_like();
    let mut pow = x.one_like();
    for _ in 1..=x.cap() {
        pow = pow.mul(&y);
        sum.add_scaled_series(&pow, &FormalScalar::one());
    }
    Ok(sum)
}

/// Element of the truncated free associative algebra on named generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCElt {
    gens: Vec<String>,
    cap: usize,
    terms: AssocPoly,
}

impl NCElt {
    pub fn zero(gens: &[String], cap: usize) -> NCElt {
        NCElt {
            gens: gens.to_vec(),
            cap,
            terms: HashMap::new(),
        }
    }

    pub fn one(gens: &[String], cap: usize) -> NCElt {
        let mut x = NCElt::zero(gens, cap);
        x.terms.insert(Word::new(), FormalScalar::one());
        x
    }

    pub fn generator(gens: &[String], name: &str, cap: usize) -> Result<NCElt> {
        let i = gens
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::UnknownLetter(name.into()))?;
        let mut x = NCElt::zero(gens, cap);
        if cap >= 1 {
            x.terms
                .insert(Word::from_slice(&[i as u8]), FormalScalar::one());
        }
        Ok(x)
    }

    pub fn from_terms(
        gens: &[String],
        cap: usize,
        terms: impl IntoIterator<Item = (Word, FormalScalar)>,
    ) -> NCElt {
        let mut x = NCElt::zero(gens, cap);
        for (w, c) in terms {
            if w.len() <= cap {
                accumulate(&mut x.terms, w, c);
            }
        }
        x
    }

    pub fn from_lie(x: &LieElt, cap: usize) -> NCElt {
        NCElt::from_terms(x.alphabet(), cap, x.to_assoc())
    }

    pub fn gens(&self) -> &[String] {
        &self.gens
    }

    pub fn terms(&self) -> &AssocPoly {
        &self.terms
    }

    pub fn coeff(&self, w: &[u8]) -> FormalScalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn with_cap(&self, cap: usize) -> NCElt {
        NCElt::from_terms(
            &self.gens,
            cap,
            self.terms.iter().map(|(w, c)| (w.clone(), c.clone())),
        )
    }

    pub fn homogeneous(&self, d: usize) -> NCElt {
        NCElt::from_terms(
            &self.gens,
            self.cap,
            self.terms
                .iter()
                .filter(|(w, _)| w.len() == d)
                .map(|(w, c)| (w.clone(), c.clone())),
        )
    }

    fn check(&self, o: &NCElt) -> Result<()> {
        if self.gens != o.gens {
            return Err(Error::AlphabetMismatch(self.gens.clone(), o.gens.clone()));
        }
        Ok(())
    }

    pub fn add(&self, o: &NCElt) -> Result<NCElt> {
        self.check(o)?;
        let mut r = self.with_cap(self.cap.min(o.cap));
        for (w, c) in &o.terms {
            if w.len() <= r.cap {
                accumulate(&mut r.terms, w.clone(), c.clone());
            }
        }
        Ok(r)
    }

    pub fn sub(&self, o: &NCElt) -> Result<NCElt> {
        self.add(&o.scale(&FormalScalar::int(-1)))
    }

    pub fn scale(&self, c: &FormalScalar) -> NCElt {
        NCElt::from_terms(
            &self.gens,
            self.cap,
            self.terms.iter().map(|(w, x)| (w.clone(), x * c)),
        )
    }

    pub fn product(&self, o: &NCElt) -> Result<NCElt> {
        self.check(o)?;
        let cap = self.cap.min(o.cap);
        let mut out = NCElt::zero(&self.gens, cap);
        for (u, cu) in &self.terms {
            if u.len() > cap {
                continue;
            }
            for (v, cv) in &o.terms {
                if u.len() + v.len() > cap {
                    continue;
                }
                let mut w = u.clone();
                w.extend_from_slice(v);
                accumulate(&mut out.terms, w, cu * cv);
            }
        }
        Ok(out)
    }

    pub fn exp(&self) -> Result<NCElt> {
        series_exp(self)
    }

    pub fn log(&self) -> Result<NCElt> {
        series_log(self)
    }

    pub fn inverse(&self) -> Result<NCElt> {
        series_inverse(self)
    }

    /// Lie coordinates of a primitive element, or an error when it is not Lie.
    pub fn to_lie(&self) -> Result<LieElt> {
        let poly: AssocPoly = self
            .terms
            .iter()
            .filter(|(w, _)| !w.is_empty())
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        if self.terms.contains_key(&Word::new()) {
            return Err(Error::Invalid("constant term is not a Lie element".into()));
        }
        LieElt::from_assoc(&self.gens, poly)
    }

    /// Group-likeness test: every homogeneous part `p_d` of `log x` satisfies `D(p_d) = d p_d`
    /// for the left-bracketing map `D`.
    pub fn primitive_check(&self) -> Result<bool> {
        let l = self.log()?;
        for d in 1..=self.cap {
            let p = l.homogeneous(d);
            if p.is_zero() {
                continue;
            }
            let mut dyn_p: AssocPoly = HashMap::new();
            for (w, c) in &p.terms {
                for (u, k) in left_bracketing(w) {
                    accumulate(&mut dyn_p, u, c.scale(&Rat::int(k)));
                }
            }
            let scaled: AssocPoly = p
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.scale(&Rat::int(d as i64))))
                .collect();
            if dyn_p != scaled {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_sexpr(&self) -> String {
        let mut ts: Vec<(&Word, &FormalScalar)> = self.terms.iter().collect();
        ts.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        let parts: Vec<String> = ts
            .into_iter()
            .map(|(w, c)| {
                let m = if w.is_empty() {
                    "1".to_string()
                } else if w.len() == 1 {
                    self.gens[w[0] as usize].clone()
                } else {
                    format!(
                        "(* {})",
                        w.iter()
                            .map(|&i| self.gens[i as usize].as_str())
                            .collect::<Vec<_>>()
                            .join(" ")
                    )
                };
                if c.is_one() {
                    m
                } else {
                    format!("(* {} {})", c.to_sexpr(), m)
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

/// Expansion of `[..[[w1,w2],w3],..,wk]`.
fn left_bracketing(w: &[u8]) -> Vec<(Word, i64)> {
    let mut cur: Vec<(Word, i64)> = vec![(Word::from_slice(&w[..1]), 1)];
    for &x in &w[1..] {
        let mut next = Vec::with_capacity(cur.len() * 2);
        for (u, c) in cur {
            let mut a = u.clone();
            a.push(x);
            next.push((a, c));
            let mut b = Word::from_slice(&[x]);
            b.extend_from_slice(&u);
            next.push((b, -c));
        }
        cur = next;
    }
    cur
}

impl Series for NCElt {
    fn cap(&self) -> usize {
        self.cap
    }
    fn one_like(&self) -> Self {
        NCElt::one(&self.gens, self.cap)
    }
    fn zero_like_series(&self) -> Self {
        NCElt::zero(&self.gens, self.cap)
    }
    fn mul(&self, o: &Self) -> Self {
        self.product(o).expect("same generators")
    }
    fn add_scaled_series(&mut self, o: &Self, c: &FormalScalar) {
        for (w, x) in &o.terms {
            if w.len() <= self.cap {
                accumulate(&mut self.terms, w.clone(), x * c);
            }
        }
    }
    fn constant_term(&self) -> FormalScalar {
        self.coeff(&[])
    }
}

impl LieTarget for NCElt {
    fn lie_bracket(&self, o: &Self) -> Self {
        let ab = self.product(o).expect("same generators");
        let ba = o.product(self).expect("same generators");
        ab.sub(&ba).expect("same generators")
    }
    fn add_scaled(&mut self, o: &Self, c: &FormalScalar) {
        self.add_scaled_series(o, c);
    }
    fn zero_like(&self) -> Self {
        NCElt::zero(&self.gens, self.cap)
    }
}

impl fmt::Display for NCElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{sigma3, AB};
    use proptest::prelude::*;

    fn gens() -> Vec<String> {
        AB.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn exp_a_exp_b_cap2() {
        let a = NCElt::generator(&gens(), "A", 2).unwrap();
        let b = NCElt::generator(&gens(), "B", 2).unwrap();
        let p = a.exp().unwrap().product(&b.exp().unwrap()).unwrap();
        let w = |s: &[u8]| Word::from_slice(s);
        let expect = NCElt::from_terms(
            &gens(),
            2,
            [
                (w(&[]), FormalScalar::one()),
                (w(&[0]), FormalScalar::one()),
                (w(&[1]), FormalScalar::one()),
                (w(&[0, 0]), FormalScalar::rat(1, 2)),
                (w(&[0, 1]), FormalScalar::one()),
                (w(&[1, 1]), FormalScalar::rat(1, 2)),
            ],
        );
        assert_eq!(p, expect);
        assert_eq!(
            NCElt::zero(&gens(), 4).exp().unwrap(),
            NCElt::one(&gens(), 4)
        );
    }

    #[test]
    fn wrong_constant_terms() {
        assert!(NCElt::one(&gens(), 3).exp().is_err());
        assert!(NCElt::zero(&gens(), 3).log().is_err());
    }

    #[test]
    fn primitivity() {
        let s = NCElt::from_lie(&sigma3(), 6);
        assert!(s.exp().unwrap().primitive_check().unwrap());
        let ab = NCElt::from_terms(
            &gens(),
            2,
            [
                (Word::new(), FormalScalar::one()),
                (Word::from_slice(&[0, 1]), FormalScalar::one()),
            ],
        );
        assert!(!ab.primitive_check().unwrap());
    }

    fn arb_series(cap: usize) -> impl Strategy<Value = NCElt> {
        proptest::collection::vec(
            (proptest::collection::vec(0u8..2, 1..=cap), -4i64..=4),
            0..6,
        )
        .prop_map(move |ts| {
            NCElt::from_terms(
                &gens(),
                cap,
                ts.into_iter()
                    .map(|(w, c)| (Word::from_vec(w), FormalScalar::int(c))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn exp_log_roundtrip(cap in 1usize..=8, seed in any::<u64>()) {
            let x = {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let n = rng.gen_range(1..5);
                NCElt::from_terms(&gens(), cap, (0..n).map(|_| {
                    let len = rng.gen_range(1..=cap);
                    let w: Word = (0..len).map(|_| rng.gen_range(0..2u8)).collect();
                    (w, FormalScalar::int(rng.gen_range(-3..=3)))
                }))
            };
            prop_assert_eq!(x.exp().unwrap().log().unwrap(), x.clone());
            let y = x.exp().unwrap();
            prop_assert_eq!(y.log().unwrap().exp().unwrap(), y);
        }

        #[test]
        fn inverse_is_two_sided(x in arb_series(4)) {
            let mut u = x.clone();
            u.terms.remove(&Word::new());
            let g = u.add(&NCElt::one(&gens(), 4)).unwrap();
            let gi = g.inverse().unwrap();
            prop_assert_eq!(g.product(&gi).unwrap(), NCElt::one(&gens(), 4));
            prop_assert_eq!(gi.product(&g).unwrap(), NCElt::one(&gens(), 4));
        }
    }
}
