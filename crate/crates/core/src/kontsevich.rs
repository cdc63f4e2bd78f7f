//! Truncated combinatorial Kontsevich values of 3-strand pure braids in
//! `U(t3)`, conjugation invariance under twisting at low degree, and the
//! first degree where twisting by `1 + alpha J_3` is visible.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::associators::AssocSeries;
use crate::diagrams::colored::commutator_decomposition;
use crate::diagrams::{
    connect_bracket, make_jn, prop44_certificate, tau, vanishes, DiagElt, Signature,
};
use crate::error::{Error, Result};
use crate::kohno::TnElt;
use crate::scalar::FormalScalar;
use crate::series::series_inverse;
use crate::weights::checks::random_unit;

/// Pure-braid generators on three strands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BraidGen {
    X12,
    X23,
}

impl BraidGen {
    pub fn name(self) -> &'static str {
        match self {
            BraidGen::X12 => "x12",
            BraidGen::X23 => "x23",
        }
    }
}

/// A word in `x12^{+-1}, x23^{+-1}`, read left to right.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BraidWord {
    pub letters: Vec<(BraidGen, bool)>,
}

impl BraidWord {
    pub fn new(letters: Vec<(BraidGen, bool)>) -> BraidWord {
        BraidWord { letters }
    }

    pub fn then(&self, o: &BraidWord) -> BraidWord {
        BraidWord {
            letters: self.letters.iter().chain(&o.letters).copied().collect(),
        }
    }
}

impl FromStr for BraidWord {
    type Err = Error;
    /// Space- or `*`-separated tokens `x12`, `x23`, `x12^-1`, `x23^-1`; `1` is the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s
            .split(|c: char| c.is_whitespace() || c == '*')
            .filter(|t| !t.is_empty() && *t != "1")
        {
            let (base, inv) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let g = match base {
                "x12" | "x21" => BraidGen::X12,
                "x23" | "x32" => BraidGen::X23,
                _ => {
                    return Err(Error::Invalid(format!(
                        "unsupported braid generator `{tok}` (x12, x23 and inverses)"
                    )))
                }
            };
            letters.push((g, inv));
        }
        Ok(BraidWord { letters })
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|(g, inv)| format!("{}{}", g.name(), if *inv { "^-1" } else { "" }))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// `phi(t12, t23)` in `U(t3)`.
pub fn associator_in_t3(phi: &AssocSeries, cap: usize) -> Result<TnElt> {
    let g = |s: &str| TnElt::generator(3, s, cap);
    phi.log
        .substitute(&[g("t12")?, g("t23")?], Some(cap))?
        .exp()
}

/// `Z` of a pure 3-braid with parenthesization `(..).`, in `U(t3)` truncated at `cap`.
pub fn z_braid3(w: &BraidWord, phi: &AssocSeries, cap: usize) -> Result<TnElt> {
    if cap > phi.cap {
        return Err(Error::Cap(format!(
            "associator known through degree {}, asked for {cap}",
            phi.cap
        )));
    }
    let t12 = TnElt::generator(3, "t12", cap)?;
    let t23 = TnElt::generator(3, "t23", cap)?;
    let p = associator_in_t3(phi, cap)?;
    let pinv = p.inverse()?;
    let neg = FormalScalar::int(-1);
    let values = [
        t12.exp()?,
        t12.scale(&neg).exp()?,
        pinv.product(&t23.exp()?)?.product(&p)?,
        pinv.product(&t23.scale(&neg).exp()?)?.product(&p)?,
    ];
    let idx = |(g, inv): &(BraidGen, bool)| match g {
        BraidGen::X12 => *inv as usize,
        BraidGen::X23 => 2 + *inv as usize,
    };
    let one = TnElt::one(3, cap);
    w.letters
        .par_iter()
        .map(|l| Ok(values[idx(l)].clone()))
        .try_reduce(|| one.clone(), |a, b| a.product(&b))
}

/// Whether `F z F^-1 = z` modulo relations through degree `cap`, on two strands.
pub fn deg_invariance_check(f: &DiagElt, z: &DiagElt, cap: usize, deep: bool) -> Result<bool> {
    for x in [f, z] {
        if x.signature() != &Signature::Strands(2) {
            return Err(Error::Invalid(
                "conjugation check runs on two strands".into(),
            ));
        }
    }
    let f = f.with_cap(cap);
    let z = z.with_cap(cap);
    let conj = f
        .stack_product(&z)?
        .stack_product(&series_inverse(&f)?)?
        .sub(&z)?;
    Ok(conj.is_zero() || vanishes(&conj, deep)?)
}

/// Seeded `(F, z)` with `F_1 = F_2 = 0` and random chord terms elsewhere.
pub fn random_pair(seed: u64, cap: usize) -> Result<(DiagElt, DiagElt)> {
    let f = random_unit(seed, cap)?.filter(|d| d.degree() == 0 || d.degree() >= 3);
    let z = random_unit(seed ^ 0x9e37_79b9_7f4a_7c15, cap)?;
    Ok((f, z))
}

#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub cap: usize,
    pub pairs: usize,
    /// Seeds whose pair is not conjugation invariant.
    pub failures: Vec<u64>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// [`deg_invariance_check`] on the seeded pairs `seed0 .. seed0 + count`.
pub fn invariance_suite(
    seed0: u64,
    count: usize,
    cap: usize,
    deep: bool,
) -> Result<InvarianceReport> {
    let seeds: Vec<u64> = (0..count as u64).map(|i| seed0.wrapping_add(i)).collect();
    let res = seeds
        .par_iter()
        .map(|&s| {
            let (f, z) = random_pair(s, cap)?;
            Ok((s, deg_invariance_check(&f, &z, cap, deep)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InvarianceReport {
        cap,
        pairs: count,
        failures: res
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(s, _)| s)
            .collect(),
    })
}

/// Outcome of comparing `Z = 1 + J_{2n+1}` with its conjugate by `F = 1 + alpha J_3`.
#[derive(Clone, Debug)]
pub struct Thm12Report {
    pub n: usize,
    pub alpha: FormalScalar,
    /// `F Z F^-1 - Z` has no terms in degrees `<= 2n+3`.
    pub low_equal: bool,
    /// Its degree-`(2n+4)` part is exactly `alpha (J_3 J_{2n+1} - J_{2n+1} J_3)`.
    pub top_is_commutator: bool,
    /// τ of the leg-transposition expansion of the commutator equals `[τJ_3, τJ_{2n+1}]_1`.
    pub bracket_matches: bool,
    /// The η-certificate of that bracket is nonzero.
    pub certificate_nonzero: bool,
}

impl Thm12Report {
    /// The degree-`(2n+4)` parts differ.
    pub fn top_nonzero(&self) -> bool {
        !self.alpha.is_zero()
            && self.top_is_commutator
            && self.bracket_matches
            && self.certificate_nonzero
    }

    pub fn passed(&self) -> bool {
        self.low_equal && self.top_nonzero()
    }
}

/// Conjugate `1 + J_{2n+1}` by `1 + alpha J_3` through degree `2n+4` and certify the top difference.
pub fn thm12_difference(n: usize, alpha: &FormalScalar) -> Result<Thm12Report> {
    if n == 0 {
        return Err(Error::Invalid("thm12 needs n >= 1".into()));
    }
    let cap = 2 * n + 4;
    let sig = Signature::Strands(2);
    let (d3, dn) = (make_jn(3)?, make_jn(2 * n + 1)?);
    let j3 = DiagElt::from_diagram(sig.clone(), &d3, FormalScalar::one())?.with_cap(cap);
    let jn = DiagElt::from_diagram(sig.clone(), &dn, FormalScalar::one())?.with_cap(cap);
    let one = DiagElt::one(sig.clone()).with_cap(cap);
    let f = one.add(&j3.scale(alpha))?;
    let z = one.add(&jn)?;
    let diff = f
        .stack_product(&z)?
        .stack_product(&series_inverse(&f)?)?
        .sub(&z)?;
    let low_equal = diff.terms().keys().all(|d| d.degree() > cap - 1);
    let comm = j3.commutator(&jn)?;
    let top_is_commutator = diff.component(cap) == comm.scale(alpha).component(cap);
    let mut expansion = DiagElt::zero(sig);
    for d in commutator_decomposition(&d3, &dn)? {
        expansion.add_diagram(&d, FormalScalar::one())?;
    }
    let bracket_matches = tau(&expansion)? == connect_bracket(&tau(&j3)?, &tau(&jn)?)?;
    let certificate_nonzero = prop44_certificate(n)?.nonzero;
    Ok(Thm12Report {
        n,
        alpha: alpha.clone(),
        low_equal,
        top_is_commutator,
        bracket_matches,
        certificate_nonzero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::associators::{associator_series, x_chord, AssocKind, AssocParams};
    use crate::scalar::{Rat, Symbol};

    fn g(s: &str, cap: usize) -> TnElt {
        TnElt::generator(3, s, cap).unwrap()
    }

    fn w(s: &str) -> BraidWord {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(w("x12 x23^-1").to_string(), "x12 x23^-1");
        assert_eq!(w("1"), BraidWord::default());
        assert!("x13".parse::<BraidWord>().is_err());
    }

    #[test]
    fn example_three_braid() {
        let kz = associator_series(AssocKind::Kz4, &AssocParams::default(), 4).unwrap();
        let cap = 4;
        let z = z_braid3(&w("x23"), &kz, cap).unwrap();
        let (t12, t23) = (g("t12", cap), g("t23", cap));
        let c = |a: &TnElt, b: &TnElt| a.commutator(b).unwrap();
        let want = t23
            .sub(&c(&c(&t12, &t23), &t23).scale(&FormalScalar::rat(1, 24)))
            .unwrap()
            .add(
                &c(&c(&t12.add(&t23).unwrap(), &c(&t12, &t23)), &t23)
                    .scale(&FormalScalar::symbol(Symbol::Z)),
            )
            .unwrap();
        assert_eq!(z.log().unwrap(), want);
        assert_eq!(z_braid3(&w("x12"), &kz, cap).unwrap(), t12.exp().unwrap());
    }

    #[test]
    fn words_multiply_and_cancel() {
        let phi = associator_series(AssocKind::General5, &AssocParams::default(), 4).unwrap();
        let (a, b) = (w("x12 x23^-1 x23"), w("x23 x12^-1"));
        let za = z_braid3(&a, &phi, 4).unwrap();
        let zb = z_braid3(&b, &phi, 4).unwrap();
        assert_eq!(
            z_braid3(&a.then(&b), &phi, 4).unwrap(),
            za.product(&zb).unwrap()
        );
        assert_eq!(
            z_braid3(&w("x12 x12^-1"), &phi, 4).unwrap(),
            TnElt::one(3, 4)
        );
        assert!(z_braid3(&a, &phi, 5).is_err());
    }

    #[test]
    fn lambda_dependence_starts_in_degree_four() {
        let phi = associator_series(AssocKind::General5, &AssocParams::default(), 4).unwrap();
        let symbolic = |x: &TnElt, d: usize| {
            x.component(d)
                .terms()
                .values()
                .any(|c| !c.symbols().is_empty())
        };
        for s in ["x12 x23", "x23 x23 x12^-1", "x23^-1 x12 x23 x12"] {
            let z = z_braid3(&w(s), &phi, 3).unwrap();
            assert!(!symbolic(&z, 1) && !symbolic(&z, 2), "{s}");
        }
        let l = z_braid3(&w("x23"), &phi, 4).unwrap().log().unwrap();
        assert!(!symbolic(&l, 3));
        assert!(symbolic(&l, 4));
    }

    #[test]
    fn conjugation_invariance_at_cap_five() {
        let rep = invariance_suite(1, 3, 5, false).unwrap();
        assert!(rep.passed());
        let one = DiagElt::one(Signature::Strands(2));
        let f = one.add(&x_chord().unwrap()).unwrap();
        let (_, z) = random_pair(9, 5).unwrap();
        assert!(deg_invariance_check(&f, &z, 5, false).unwrap());
    }

    #[test]
    fn thm12_small_cases() {
        let r = thm12_difference(2, &FormalScalar::one()).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = thm12_difference(1, &FormalScalar::one()).unwrap();
        assert!(r.low_equal && !r.certificate_nonzero && !r.top_nonzero());
        let a = FormalScalar::symbol(Symbol::Alpha);
        let r = thm12_difference(2, &a).unwrap();
        assert!(r.passed());
        assert!(!thm12_difference(2, &FormalScalar::from_rat(Rat::zero()))
            .unwrap()
            .top_nonzero());
    }
}
