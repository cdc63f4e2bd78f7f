//! Truncated associators in `A(↓↓↓)`: the KZ and general rational series,
//! twisting, the four associator axioms, and the central twist by the crossed
//! double chord.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::diagrams::relations::{chord_basis, relation_space_guarded};
use crate::diagrams::{reduce_mod_relations, vanishes, DiagElt, JDiagram, Raw, Signature};
use crate::error::{Error, Result};
use crate::lie::{c_generator, sigma3, sigma5, LieElt, AB};
use crate::linalg::Echelon;
use crate::scalar::{FormalScalar, Rat, Symbol};
use crate::series::{series_exp, series_inverse, series_log, NCElt, Series};

/// Which truncated associator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AssocKind {
    /// KZ through degree 4, with `z = zeta(3)/(2 pi i)^3` symbolic.
    Kz4,
    /// General rational associator through degree 5 with parameters `lambda1, lambda2`.
    General5,
}

impl AssocKind {
    pub fn max_cap(self) -> usize {
        match self {
            AssocKind::Kz4 => 4,
            AssocKind::General5 => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AssocKind::Kz4 => "kz4",
            AssocKind::General5 => "general5",
        }
    }
}

impl FromStr for AssocKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kz4" => Ok(AssocKind::Kz4),
            "general5" => Ok(AssocKind::General5),
            _ => Err(Error::Parse(format!(
                "unknown associator kind {s:?} (kz4, general5)"
            ))),
        }
    }
}

impl fmt::Display for AssocKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of the general family; symbolic by default.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocParams {
    pub lambda1: FormalScalar,
    pub lambda2: FormalScalar,
}

impl Default for AssocParams {
    fn default() -> Self {
        AssocParams {
            lambda1: FormalScalar::symbol(Symbol::Lambda1),
            lambda2: FormalScalar::symbol(Symbol::Lambda2),
        }
    }
}

fn c(k: usize, l: usize) -> LieElt {
    c_generator(k, l).expect("k, l >= 1")
}

fn br(x: &LieElt, y: &LieElt) -> LieElt {
    x.bracket(y).expect("same alphabet")
}

fn q(n: i64, d: i64) -> FormalScalar {
    FormalScalar::rat(n, d)
}

fn sum(terms: &[(FormalScalar, LieElt)]) -> LieElt {
    let mut acc = LieElt::zero(&AB);
    for (k, x) in terms {
        acc = acc.add(&x.scale(k)).expect("same alphabet");
    }
    acc
}

/// The logarithm of the associator as a Lie series in `A, B`.
pub fn associator_log(kind: AssocKind, params: &AssocParams) -> LieElt {
    let (a, b) = (
        LieElt::letter(&AB, "A").expect("A"),
        LieElt::letter(&AB, "B").expect("B"),
    );
    match kind {
        AssocKind::Kz4 => {
            let ab = br(&a, &b);
            let ba = br(&b, &a);
            let z = FormalScalar::symbol(Symbol::Z);
            sum(&[
                (q(1, 24), ab.clone()),
                (-z, br(&a.add(&b).expect("AB"), &ab)),
                (q(-1, 1440), br(&a, &br(&a, &ab))),
                (q(1, 1440), br(&b, &br(&b, &ba))),
                (q(-1, 11520), br(&a, &br(&b, &ab))),
                (q(1, 11520), br(&b, &br(&a, &ba))),
            ])
        }
        AssocKind::General5 => {
            let (l1, l2) = (params.lambda1.clone(), params.lambda2.clone());
            let c11 = c(1, 1);
            let tail = sum(&[
                (q(1, 1), c(2, 3)),
                (q(1, 1), c(3, 2)),
                (q(1, 2), br(&c11, &c(1, 2))),
                (q(1, 2), br(&c11, &c(2, 1))),
            ]);
            sum(&[
                (q(1, 24), c11.clone()),
                (l1.clone(), sigma3()),
                (q(-1, 1440), c(1, 3)),
                (q(-1, 1440), c(3, 1)),
                (q(-1, 5760), c(2, 2)),
                (l2, sigma5()),
                (&l1 * &q(1, 24), tail),
            ])
        }
    }
}

/// Image of a series in two letters under `A -> t12`, `B -> t23` on three strands.
pub fn nc_to_diagrams(x: &NCElt) -> Result<DiagElt> {
    let cap = x.cap();
    let images = [DiagElt::chord(3, 1, 2)?, DiagElt::chord(3, 2, 3)?];
    let mut out = DiagElt::zero(Signature::Strands(3)).with_cap(cap);
    for (w, k) in x.terms() {
        let mut t = DiagElt::one(Signature::Strands(3)).with_cap(cap);
        for &l in w.iter() {
            t = t.stack_product(&images[l as usize])?;
        }
        out.add_scaled_series(&t, k);
    }
    Ok(out)
}

/// Image of a Lie series under `A -> t12`, `B -> t23`, truncated at `cap`.
pub fn lie_to_diagrams(x: &LieElt, cap: usize) -> Result<DiagElt> {
    nc_to_diagrams(&NCElt::from_lie(x, cap))
}

/// A truncated associator together with its logarithm.
#[derive(Clone, Debug)]
pub struct AssocSeries {
    pub kind: AssocKind,
    pub params: AssocParams,
    pub cap: usize,
    pub log: LieElt,
    pub value: DiagElt,
}

impl AssocSeries {
    /// Horizontality (`log value` is the image of the Lie series) and `eps_i(value) = 1`.
    pub fn check_invariants(&self) -> Result<bool> {
        let log = series_log(&self.value)?;
        if log != lie_to_diagrams(&self.log, self.cap)? {
            return Ok(false);
        }
        let one = DiagElt::one(Signature::Strands(2)).with_cap(self.cap);
        for i in 1..=3 {
            if self.value.delete_strand(i)? != one {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `exp` of the chosen Lie series as an element of `A(↓↓↓)` truncated at `cap`.
pub fn associator_series(kind: AssocKind, params: &AssocParams, cap: usize) -> Result<AssocSeries> {
    if cap > kind.max_cap() {
        return Err(Error::Cap(format!(
            "{kind} is known through degree {}, asked for {cap}",
            kind.max_cap()
        )));
    }
    let log = associator_log(kind, params).truncate(cap);
    let value = nc_to_diagrams(&NCElt::from_lie(&log, cap).exp()?)?;
    Ok(AssocSeries {
        kind,
        params: params.clone(),
        cap,
        log,
        value,
    })
}

fn strands_of(x: &DiagElt) -> Result<usize> {
    match x.signature() {
        Signature::Strands(k) => Ok(*k),
        _ => Err(Error::Invalid("expected a strand element".into())),
    }
}

fn zero_mod_relations(x: &DiagElt) -> Result<bool> {
    Ok(x.is_zero() || vanishes(x, false)?)
}

/// Check that `F` on two strands has constant term 1, is symmetric and counital.
pub fn check_twistor(f: &DiagElt) -> Result<()> {
    if strands_of(f)? != 2 {
        return Err(Error::Invalid("a twistor lives on two strands".into()));
    }
    if !f.constant_term().is_one() {
        return Err(Error::Invalid("twistor must have constant term 1".into()));
    }
    if !zero_mod_relations(&f.permute_strands(&[1, 0])?.sub(f)?)? {
        return Err(Error::Invalid(
            "twistor is not symmetric (F^21 != F)".into(),
        ));
    }
    let one = DiagElt::one(Signature::Strands(1));
    for i in 1..=2 {
        if !zero_mod_relations(&f.delete_strand(i)?.sub(&one)?)? {
            return Err(Error::Invalid(format!(
                "twistor fails the counit condition on strand {i}"
            )));
        }
    }
    Ok(())
}

/// `(1 (x) F) (Delta_2 F) Phi (Delta_1 F^-1) (F^-1 (x) 1)`, truncated at `cap`.
pub fn twist(phi: &DiagElt, f: &DiagElt, cap: usize) -> Result<DiagElt> {
    if strands_of(phi)? != 3 {
        return Err(Error::Invalid(
            "an associator lives on three strands".into(),
        ));
    }
    check_twistor(f)?;
    let f = f.with_cap(cap);
    let finv = series_inverse(&f)?;
    f.embed_strands(&[1, 2], 3)?
        .stack_product(&f.double_strand(2)?)?
        .stack_product(&phi.with_cap(cap))?
        .stack_product(&finv.double_strand(1)?)?
        .stack_product(&finv.embed_strands(&[0, 1], 3)?)
}

/// `R = exp(chord / 2)` on two strands.
pub fn r_element(cap: usize) -> Result<DiagElt> {
    series_exp(&DiagElt::chord(2, 1, 2)?.scale(&q(1, 2)).with_cap(cap))
}

/// One axiom's residual parts, reduced modulo relations.
#[derive(Clone, Debug)]
pub struct AxiomResidual {
    pub axiom: u8,
    pub parts: Vec<DiagElt>,
}

impl AxiomResidual {
    pub fn vanishes(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub cap: usize,
    pub residuals: Vec<AxiomResidual>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| r.vanishes())
    }
}

fn axiom_parts(phi: &DiagElt, axiom: u8, cap: usize, deep: bool) -> Result<Vec<DiagElt>> {
    let raw = match axiom {
        1 => {
            let lhs = phi
                .embed_strands(&[1, 2, 3], 4)?
                .stack_product(&phi.double_strand(2)?)?
                .stack_product(&phi.embed_strands(&[0, 1, 2], 4)?)?;
            let rhs = phi
                .double_strand(3)?
                .stack_product(&phi.double_strand(1)?)?;
            vec![lhs.sub(&rhs)?]
        }
        2 => {
            let r = r_element(cap)?;
            let lhs = phi
                .permute_strands(&[1, 2, 0])?
                .stack_product(&r.double_strand(2)?)?
                .stack_product(phi)?;
            let rhs = r
                .embed_strands(&[0, 2], 3)?
                .stack_product(&phi.permute_strands(&[1, 0, 2])?)?
                .stack_product(&r.embed_strands(&[0, 1], 3)?)?;
            vec![lhs.sub(&rhs)?]
        }
        3 => {
            let one = DiagElt::one(Signature::Strands(2)).with_cap(cap);
            (1..=3)
                .map(|i| phi.delete_strand(i)?.sub(&one))
                .collect::<Result<_>>()?
        }
        4 => vec![series_inverse(phi)?.sub(&phi.permute_strands(&[2, 1, 0])?)?],
        _ => return Err(Error::Invalid(format!("no associator axiom ({axiom})"))),
    };
    raw.iter().map(|x| reduce_mod_relations(x, deep)).collect()
}

/// Residuals of the four associator axioms, each reduced modulo relations.
pub fn axiom_residuals(phi: &DiagElt, cap: usize, deep: bool) -> Result<AxiomReport> {
    if cap > 4 {
        return Err(Error::Cap(format!(
            "axiom residuals are computed through degree 4, asked for {cap}"
        )));
    }
    if strands_of(phi)? != 3 {
        return Err(Error::Invalid(
            "an associator lives on three strands".into(),
        ));
    }
    let phi = phi.with_cap(cap);
    let residuals = [1u8, 2, 3, 4]
        .par_iter()
        .map(|&a| {
            Ok(AxiomResidual {
                axiom: a,
                parts: axiom_parts(&phi, a, cap, deep)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AxiomReport { cap, residuals })
}

/// The crossed double chord on two strands.
pub fn x_chord() -> Result<DiagElt> {
    let raw = Raw {
        strands: vec![vec![0, 2], vec![3, 1]],
        edges: vec![(0, 1), (2, 3)],
        ..Default::default()
    };
    DiagElt::from_raw(Signature::Strands(2), &raw)
}

/// `2([t12,t23] + t12 t13 - t23 t13)`.
pub fn x_chord_shift() -> Result<DiagElt> {
    let t = |i, j| DiagElt::chord(3, i, j);
    let (t12, t13, t23) = (t(1, 2)?, t(1, 3)?, t(2, 3)?);
    t12.commutator(&t23)?
        .add(&t12.stack_product(&t13)?)?
        .sub(&t23.stack_product(&t13)?)
        .map(|x| x.scale(&FormalScalar::int(2)))
}

/// All chords `t_ij`, `i < j`, on `k` strands.
pub fn all_chords(k: usize) -> Vec<(usize, usize)> {
    (1..=k)
        .flat_map(|i| (i + 1..=k).map(move |j| (i, j)))
        .collect()
}

/// Whether the degree-`d` part of `x` lies, modulo relations, in the span of
/// length-`d` products of the given chords.
pub fn in_chord_span(x: &DiagElt, d: usize, gens: &[(usize, usize)], deep: bool) -> Result<bool> {
    let k = strands_of(x)?;
    let r = relation_space_guarded(d, k, deep)?;
    let mut ech = Echelon::new();
    let chords: Vec<DiagElt> = gens
        .iter()
        .map(|&(i, j)| DiagElt::chord(k, i, j))
        .collect::<Result<_>>()?;
    let mut words = vec![DiagElt::one(Signature::Strands(k))];
    for _ in 0..d {
        words = words
            .iter()
            .flat_map(|w| chords.iter().map(move |c| w.stack_product(c)))
            .collect::<Result<_>>()?;
    }
    for w in &words {
        let row: Vec<(u32, Rat)> = r
            .reduce_nf(w)?
            .into_iter()
            .map(|(i, c)| {
                c.as_rat()
                    .map(|c| (i, c))
                    .ok_or_else(|| Error::Invalid("symbolic horizontal row".into()))
            })
            .collect::<Result<_>>()?;
        ech.insert(&row)?;
    }
    let v = r.reduce_nf(&x.component(d))?;
    Ok(ech.reduce_fs(&v).is_empty())
}

/// Outcome of the central-twist check.
#[derive(Clone, Debug)]
pub struct Prop15Report {
    pub cap: usize,
    /// Degree-2 change equals `2([t12,t23] + t12 t13 - t23 t13)` modulo relations.
    pub shift_matches: bool,
    /// The twisted associator differs from the horizontal one at degree 2.
    pub differs: bool,
    /// Its degree-2 part is not a combination of words in `t12, t23`, so it is
    /// not of the form `phi(t12, t23)`.
    pub outside_ab_image: bool,
    pub conjugations_checked: usize,
    /// A chord diagram whose conjugate by `F` differs from itself.
    pub witness: Option<JDiagram>,
}

impl Prop15Report {
    pub fn passed(&self) -> bool {
        self.shift_matches && self.differs && self.outside_ab_image && self.witness.is_none()
    }
}

/// Twisting by `F = 1 + X` leaves horizontality, while `F`-conjugation fixes all of `A(↓↓)` up to `cap`.
pub fn prop15_check(cap: usize, deep: bool) -> Result<Prop15Report> {
    if !(2..=5).contains(&cap) {
        return Err(Error::Cap(format!(
            "prop15 check runs at caps 2..=5, asked for {cap}"
        )));
    }
    let x = x_chord()?;
    let f = DiagElt::one(Signature::Strands(2)).add(&x)?;
    let phi = associator_series(AssocKind::General5, &AssocParams::default(), 2)?.value;
    let twisted = twist(&phi, &f, 2)?;
    let delta = twisted.sub(&phi)?.component(2);
    let shift_matches = reduce_mod_relations(&delta.sub(&x_chord_shift()?)?, deep)?.is_zero();
    let differs = !reduce_mod_relations(&delta, deep)?.is_zero();
    let outside_ab_image = !in_chord_span(&twisted, 2, &[(1, 2), (2, 3)], deep)?;

    let f = f.with_cap(cap);
    let finv = series_inverse(&f)?;
    let inputs: Vec<JDiagram> = (0..=cap - 2).flat_map(|d| chord_basis(d, 2)).collect();
    let bad = inputs
        .par_iter()
        .map(|d| -> Result<Option<JDiagram>> {
            let y =
                DiagElt::from_diagram(Signature::Strands(2), d, FormalScalar::one())?.with_cap(cap);
            let conj = f.stack_product(&y)?.stack_product(&finv)?.sub(&y)?;
            Ok(if vanishes(&conj, deep)? {
                None
            } else {
                Some(d.clone())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let witness = bad.into_iter().flatten().next();
    Ok(Prop15Report {
        cap,
        shift_matches,
        differs,
        outside_ab_image,
        conjugations_checked: inputs.len(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::make_jn;

    fn gen(l1: FormalScalar) -> AssocParams {
        AssocParams {
            lambda1: l1,
            ..AssocParams::default()
        }
    }

    #[test]
    fn kz_degree_two_and_general_agreement() {
        let kz = associator_series(AssocKind::Kz4, &AssocParams::default(), 4).unwrap();
        let t12 = DiagElt::chord(3, 1, 2).unwrap();
        let t23 = DiagElt::chord(3, 2, 3).unwrap();
        let want = t12.commutator(&t23).unwrap().scale(&q(1, 24));
        assert_eq!(
            series_log(&kz.value).unwrap().component(2),
            want.with_cap(4)
        );
        let g = associator_series(
            AssocKind::General5,
            &gen(-FormalScalar::symbol(Symbol::Z)),
            5,
        )
        .unwrap();
        assert_eq!(g.value.with_cap(4), kz.value);
        assert_eq!(
            series_log(&g.value).unwrap().component(3),
            lie_to_diagrams(&sigma3(), 5)
                .unwrap()
                .component(3)
                .scale(&-FormalScalar::symbol(Symbol::Z))
        );
        assert!(kz.check_invariants().unwrap());
        assert!(g.check_invariants().unwrap());
        assert!(associator_series(AssocKind::Kz4, &AssocParams::default(), 5).is_err());
        assert!(associator_series(AssocKind::General5, &AssocParams::default(), 6).is_err());
    }

    #[test]
    fn general_series_solves_pentagon_and_hexagons() {
        let l = associator_log(AssocKind::General5, &AssocParams::default());
        assert!(crate::grt::pentagon_residual(&l, 5).unwrap().is_zero());
        let (h1, h2) = crate::grt::hexagon_residuals(&FormalScalar::one(), &l, 5).unwrap();
        assert!(h1.is_zero() && h2.is_zero());
        let only = c(1, 1).scale(&q(1, 24));
        assert!(!crate::grt::pentagon_residual(&only, 4).unwrap().is_zero());
    }

    #[test]
    fn trivial_twist_and_x_chord_shift() {
        let phi = associator_series(AssocKind::General5, &AssocParams::default(), 3)
            .unwrap()
            .value;
        let one = DiagElt::one(Signature::Strands(2));
        assert_eq!(twist(&phi, &one, 3).unwrap(), phi);
        let f = one.add(&x_chord().unwrap()).unwrap();
        let tw = twist(&phi, &f, 3).unwrap();
        let d2 = tw.sub(&phi).unwrap().component(2);
        assert!(
            reduce_mod_relations(&d2.sub(&x_chord_shift().unwrap()).unwrap(), false)
                .unwrap()
                .is_zero()
        );
        let e3 = tw.delete_strand(3).unwrap();
        assert!(
            reduce_mod_relations(&e3.sub(&one.with_cap(3)).unwrap(), false)
                .unwrap()
                .is_zero()
        );
    }

    #[test]
    fn asymmetric_twistor_rejected() {
        let raw = Raw {
            strands: vec![vec![0, 1], vec![]],
            edges: vec![(0, 1)],
            ..Default::default()
        };
        let one = DiagElt::one(Signature::Strands(2));
        let bad = one
            .add(&DiagElt::from_raw(Signature::Strands(2), &raw).unwrap())
            .unwrap();
        let phi = DiagElt::one(Signature::Strands(3));
        assert!(twist(&phi, &bad, 2).is_err());
    }

    #[test]
    fn j3_twist_shifts_lambda1() {
        let alpha = FormalScalar::symbol(Symbol::Alpha);
        let j3 = DiagElt::from_diagram(Signature::Strands(2), &make_jn(3).unwrap(), alpha.clone())
            .unwrap();
        let f = DiagElt::one(Signature::Strands(2)).add(&j3).unwrap();
        let phi = associator_series(AssocKind::General5, &AssocParams::default(), 4)
            .unwrap()
            .value;
        let shifted = AssocParams {
            lambda1: &FormalScalar::symbol(Symbol::Lambda1) + &alpha.scale(&Rat::int(2)),
            ..AssocParams::default()
        };
        let want = associator_series(AssocKind::General5, &shifted, 4)
            .unwrap()
            .value;
        let tw = twist(&phi, &f, 4).unwrap();
        assert!(reduce_mod_relations(&tw.sub(&want).unwrap(), false)
            .unwrap()
            .is_zero());
        let wrong = associator_series(AssocKind::General5, &AssocParams::default(), 4)
            .unwrap()
            .value;
        assert!(!reduce_mod_relations(&tw.sub(&wrong).unwrap(), false)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn axioms_hold_for_general_series_at_cap_three() {
        let phi = associator_series(AssocKind::General5, &AssocParams::default(), 3)
            .unwrap()
            .value;
        let rep = axiom_residuals(&phi, 3, false).unwrap();
        assert!(
            rep.passed(),
            "{:?}",
            rep.residuals
                .iter()
                .map(|r| r.vanishes())
                .collect::<Vec<_>>()
        );
        let trivial = DiagElt::one(Signature::Strands(3));
        let rep = axiom_residuals(&trivial, 2, false).unwrap();
        let flags: Vec<bool> = rep.residuals.iter().map(|r| r.vanishes()).collect();
        assert_eq!(flags, vec![true, false, true, true]);
        assert!(!rep.residuals[1].parts[0].component(2).is_zero());
    }

    #[test]
    fn axioms_hold_at_cap_four_before_and_after_twisting() {
        let phi = associator_series(AssocKind::General5, &AssocParams::default(), 4)
            .unwrap()
            .value;
        assert!(axiom_residuals(&phi, 4, false).unwrap().passed());
        let f = DiagElt::one(Signature::Strands(2))
            .add(&x_chord().unwrap())
            .unwrap();
        let tw = twist(&phi, &f, 4).unwrap();
        assert!(axiom_residuals(&tw, 4, false).unwrap().passed());
        let inverse_check = phi
            .sub(&series_inverse(&phi.permute_strands(&[2, 1, 0]).unwrap()).unwrap())
            .unwrap();
        assert!(inverse_check.is_zero());
        assert!(axiom_residuals(&phi, 5, false).is_err());
    }

    #[test]
    fn prop15_at_cap_four() {
        let r = prop15_check(4, false).unwrap();
        assert!(r.passed(), "{r:?}");
        // the shift is still a horizontal chord combination
        let phi = associator_series(AssocKind::General5, &AssocParams::default(), 2)
            .unwrap()
            .value;
        let f = DiagElt::one(Signature::Strands(2))
            .add(&x_chord().unwrap())
            .unwrap();
        let tw = twist(&phi, &f, 2).unwrap();
        assert!(in_chord_span(&tw, 2, &all_chords(3), false).unwrap());
        assert!(in_chord_span(&phi, 2, &[(1, 2), (2, 3)], false).unwrap());
    }
}
