//! Registry of named verification checks with serializable reports.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::associators::{
    associator_log, associator_series, axiom_residuals, prop15_check, twist, AssocKind, AssocParams,
};
use crate::diagrams::checks::{
    centrality_check, pair_commutation_check, transposition_oracle, CentralityReport,
};
use crate::diagrams::relations::{chord_basis, number_of_chord_diagrams};
use crate::diagrams::text::format_diagram;
use crate::diagrams::{
    make_jn, prop44_certificate, reduce_mod_relations, relation_space_guarded, DiagElt, Signature,
};
use crate::error::{Error, Result};
use crate::grt::{grt1_residuals, hexagon_residuals, pentagon_residual};
use crate::kohno::TnElt;
use crate::kontsevich::{invariance_suite, thm12_difference, z_braid3, BraidWord};
use crate::lie::{bracket35_display, ihara_bracket, sigma3, sigma5, sigma_element};
use crate::scalar::{FormalScalar, Rat, Symbol};
use crate::series::series_inverse;
use crate::weights::checks::CommutativityReport;
use crate::weights::{
    commutativity_report, conjugation_check, relation_annihilation, skein_verify, WeightSystem,
};

/// Registered check names, in report order.
pub const CHECKS: [&str; 11] = [
    "associator",
    "centrality",
    "dims",
    "example21",
    "grt",
    "prop11",
    "prop15",
    "prop44",
    "thm12",
    "twist-j3",
    "weights",
];

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_260_101;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    /// Serialized offending element; present whenever `status` is `fail`.
    pub witness: Option<String>,
    pub elapsed_ms: u64,
    pub degree_caps: BTreeMap<String, usize>,
    /// Computed value, for checks that produce one.
    pub value: Option<String>,
}

/// A scalar parameter given as a rational or as `sym`.
fn parse_scalar(s: &str, sym: Symbol) -> Result<FormalScalar> {
    if s.trim() == "sym" {
        Ok(FormalScalar::symbol(sym))
    } else {
        Ok(FormalScalar::from_rat(Rat::parse(s)?))
    }
}

/// User-supplied parameters shared by all checks; each check reads the ones it needs.
#[derive(Clone, Debug)]
pub struct Params {
    pub n: Option<usize>,
    pub alpha: Option<String>,
    pub lambda1: Option<String>,
    pub lambda2: Option<String>,
    pub max_degree: Option<usize>,
    pub deep: bool,
    pub seed: u64,
    pub element: Option<String>,
    pub system: Option<String>,
    pub space: Option<String>,
    pub degree: Option<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: None,
            alpha: None,
            lambda1: None,
            lambda2: None,
            max_degree: None,
            deep: false,
            seed: DEFAULT_SEED,
            element: None,
            system: None,
            space: None,
            degree: None,
        }
    }
}

impl Params {
    fn scalar(
        &self,
        v: &Option<String>,
        sym: Symbol,
        default_sym: bool,
    ) -> Result<(FormalScalar, String)> {
        match v {
            Some(s) => Ok((parse_scalar(s, sym)?, s.trim().to_string())),
            None if default_sym => Ok((FormalScalar::symbol(sym), "sym".into())),
            None => Ok((FormalScalar::one(), "1".into())),
        }
    }

    /// Reject malformed scalar parameters before any check runs.
    pub fn validate(&self) -> Result<()> {
        for (v, sym) in [
            (&self.alpha, Symbol::Alpha),
            (&self.lambda1, Symbol::Lambda1),
            (&self.lambda2, Symbol::Lambda2),
        ] {
            self.scalar(v, sym, true)?;
        }
        if let Some(s) = &self.space {
            if s != "chords" && s != "reduced" {
                return Err(invalid(format!("unknown space `{s}` (chords|reduced)")));
            }
        }
        Ok(())
    }

    fn assoc(&self) -> Result<(AssocParams, String, String)> {
        let (l1, s1) = self.scalar(&self.lambda1, Symbol::Lambda1, true)?;
        let (l2, s2) = self.scalar(&self.lambda2, Symbol::Lambda2, true)?;
        Ok((
            AssocParams {
                lambda1: l1,
                lambda2: l2,
            },
            s1,
            s2,
        ))
    }
}

/// Report under construction.
struct Draft {
    params: BTreeMap<String, String>,
    caps: BTreeMap<String, usize>,
    failures: Vec<String>,
    skipped: Vec<String>,
    value: Vec<String>,
}

impl Draft {
    fn new() -> Draft {
        Draft {
            params: BTreeMap::new(),
            caps: BTreeMap::new(),
            failures: Vec::new(),
            skipped: Vec::new(),
            value: Vec::new(),
        }
    }

    fn param(&mut self, k: &str, v: impl ToString) {
        self.params.insert(k.into(), v.to_string());
    }

    fn cap(&mut self, k: &str, c: usize) {
        self.caps.insert(k.into(), c);
    }

    fn require(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(witness());
        }
    }

    fn finish(self, name: &str, start: Instant) -> CheckReport {
        let status = if !self.failures.is_empty() {
            Status::Fail
        } else if !self.skipped.is_empty() && self.value.is_empty() {
            Status::Skipped
        } else {
            Status::Pass
        };
        let mut value = self.value;
        value.extend(
            self.skipped
                .iter()
                .map(|s| format!("skipped {s} (needs --deep)")),
        );
        CheckReport {
            check: name.into(),
            params: self.params,
            status,
            witness: if self.failures.is_empty() {
                None
            } else {
                Some(self.failures.join("; "))
            },
            elapsed_ms: start.elapsed().as_millis() as u64,
            degree_caps: self.caps,
            value: if value.is_empty() {
                None
            } else {
                Some(value.join("; "))
            },
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

/// Run one registered check. Unknown names and invalid parameters are errors.
pub fn run_check(name: &str, p: &Params) -> Result<CheckReport> {
    let start = Instant::now();
    let mut d = Draft::new();
    match name {
        "example21" => example21(&mut d)?,
        "twist-j3" => twist_j3(&mut d, p)?,
        "prop44" => prop44(&mut d, p)?,
        "grt" => grt(&mut d, p)?,
        "associator" => associator(&mut d, p)?,
        "weights" => weights(&mut d, p)?,
        "centrality" => centrality(&mut d, p)?,
        "prop11" => prop11(&mut d, p)?,
        "prop15" => prop15(&mut d, p)?,
        "thm12" => thm12(&mut d, p)?,
        "dims" => dims(&mut d, p)?,
        _ => {
            return Err(invalid(format!(
                "unknown check `{name}`; known: {}",
                CHECKS.join(", ")
            )))
        }
    }
    Ok(d.finish(name, start))
}

/// Expand `all` and validate names; the result is sorted and deduplicated.
pub fn resolve_checks(names: &[String]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(CHECKS.iter().map(|s| s.to_string()));
        } else if CHECKS.contains(&n.as_str()) {
            out.push(n.clone());
        } else {
            return Err(invalid(format!(
                "unknown check `{n}`; known: {}, all",
                CHECKS.join(", ")
            )));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Run checks in parallel; reports come back in name order.
pub fn run_checks(names: &[String], p: &Params) -> Result<Vec<CheckReport>> {
    let names = resolve_checks(names)?;
    names.par_iter().map(|n| run_check(n, p)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::Parse(format!("unknown format `{s}` (json|text)"))),
        }
    }
}

/// Serialize reports as a JSON array or as a text table.
pub fn emit_report(reports: &[CheckReport], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                let params: Vec<String> =
                    r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let caps: Vec<String> = r
                    .degree_caps
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                let _ = writeln!(
                    s,
                    "{:<11} {:<7} {:>9} ms  params[{}] caps[{}]",
                    r.check,
                    r.status.as_str(),
                    r.elapsed_ms,
                    params.join(" "),
                    caps.join(" ")
                );
                if let Some(v) = &r.value {
                    let _ = writeln!(s, "    value: {v}");
                }
                if let Some(w) = &r.witness {
                    let _ = writeln!(s, "    witness: {w}");
                }
            }
            s
        }
    }
}

fn example21(d: &mut Draft) -> Result<()> {
    let cap = 4;
    d.cap("z_braid3", cap);
    d.param("associator", "kz4");
    d.param("word", "x23");
    let kz = associator_series(AssocKind::Kz4, &AssocParams::default(), cap)?;
    let log = z_braid3(&BraidWord::from_str("x23")?, &kz, cap)?.log()?;
    let g = |s: &str| TnElt::generator(3, s, cap);
    let (t12, t23) = (g("t12")?, g("t23")?);
    let c = |a: &TnElt, b: &TnElt| a.commutator(b);
    let want = t23
        .sub(&c(&c(&t12, &t23)?, &t23)?.scale(&FormalScalar::rat(1, 24)))?
        .add(
            &c(&c(&t12.add(&t23)?, &c(&t12, &t23)?)?, &t23)?
                .scale(&FormalScalar::symbol(Symbol::Z)),
        )?;
    let diff = log.sub(&want)?;
    d.require(diff.is_zero(), || diff.to_sexpr());
    d.value.push(log.to_sexpr());
    Ok(())
}

fn twist_j3(d: &mut Draft, p: &Params) -> Result<()> {
    let cap = p.max_degree.unwrap_or(4);
    if !(3..=5).contains(&cap) {
        return Err(invalid("twist-j3 runs at max degree 3..=5"));
    }
    if cap == 5 && !p.deep {
        d.skipped.push("degree-5 twist on three strands".into());
        return Ok(());
    }
    let (alpha, sa) = p.scalar(&p.alpha, Symbol::Alpha, true)?;
    let (params, s1, s2) = p.assoc()?;
    d.param("alpha", sa);
    d.param("lambda1", s1);
    d.param("lambda2", s2);
    d.cap("twist", cap);
    let j3 = DiagElt::from_diagram(Signature::Strands(2), &make_jn(3)?, alpha.clone())?;
    let f = DiagElt::one(Signature::Strands(2)).add(&j3)?;
    let phi = associator_series(AssocKind::General5, &params, cap)?.value;
    let shifted = AssocParams {
        lambda1: &params.lambda1 + &alpha.scale(&Rat::int(2)),
        lambda2: params.lambda2.clone(),
    };
    let want = associator_series(AssocKind::General5, &shifted, cap)?.value;
    let diff = reduce_mod_relations(&twist(&phi, &f, cap)?.sub(&want)?, p.deep)?;
    d.require(diff.is_zero(), || diff.to_sexpr());
    Ok(())
}

fn prop44(d: &mut Draft, p: &Params) -> Result<()> {
    let ns: Vec<usize> = match p.n {
        Some(0) => return Err(invalid("prop44 needs n >= 1")),
        Some(n) => vec![n],
        None => (1..=5).collect(),
    };
    if let Some(n) = p.n {
        d.param("n", n);
    }
    let mut vals = Vec::new();
    for n in ns {
        let c = prop44_certificate(n)?;
        let expect = n >= 2;
        d.require(c.nonzero == expect, || {
            format!("n={n}: certificate {}", c.element.to_sexpr())
        });
        vals.push(format!(
            "n={n}:{}",
            if c.nonzero { "nonzero" } else { "zero" }
        ));
        d.cap(&format!("n{n}"), 2 * n + 4);
    }
    d.value.push(vals.join(" "));
    let l = transposition_oracle()?;
    d.require(l.passed(), || {
        format!(
            "transposition oracle: decomposition {:?}, bracket {:?}",
            l.decomposition_failures, l.bracket_failures
        )
    });
    d.value.push(format!("transposition_pairs={}", l.pairs));
    Ok(())
}

fn grt_one(d: &mut Draft, name: &str, psi: &crate::lie::LieElt, cap: usize) -> Result<()> {
    let r = grt1_residuals(psi, cap)?;
    d.cap(name, cap);
    d.require(r.vanish(), || {
        format!(
            "{name}: antisymmetry {} hexagon {} pentagon {}",
            r.antisymmetry.to_sexpr(),
            r.hexagon.to_sexpr(),
            r.pentagon.to_sexpr()
        )
    });
    Ok(())
}

fn grt(d: &mut Draft, p: &Params) -> Result<()> {
    let elements: Vec<String> = match &p.element {
        Some(e) => {
            sigma_element(e)?;
            d.param("element", e);
            vec![e.clone()]
        }
        None => ["sigma3", "sigma5", "sigma7", "bracket35"]
            .map(String::from)
            .to_vec(),
    };
    for e in &elements {
        let psi = if e == "bracket35" {
            ihara_bracket(&sigma3(), &sigma5())?
        } else {
            sigma_element(e)?
        };
        let cap = psi.terms().keys().map(|w| w.len()).max().unwrap_or(1);
        grt_one(d, e, &psi, cap)?;
        d.value.push(format!("{e} in grt1"));
    }
    let b = ihara_bracket(&sigma3(), &sigma5())?;
    let disp = bracket35_display();
    let diff = b.sub(&disp)?;
    d.require(diff.is_zero(), || {
        format!("ihara bracket minus display {}", diff.to_sexpr())
    });
    Ok(())
}

fn associator(d: &mut Draft, p: &Params) -> Result<()> {
    let kind = match &p.element {
        Some(e) => AssocKind::from_str(e)?,
        None => AssocKind::General5,
    };
    let cap = p.max_degree.unwrap_or(kind.max_cap());
    if cap == 0 || cap > kind.max_cap() {
        return Err(invalid(format!(
            "{kind} is known through degree {}",
            kind.max_cap()
        )));
    }
    let (params, s1, s2) = p.assoc()?;
    d.param("element", kind.name());
    if kind == AssocKind::General5 {
        d.param("lambda1", s1);
        d.param("lambda2", s2);
    }
    let log = associator_log(kind, &params);
    let pent = pentagon_residual(&log, cap)?;
    let (h1, h2) = hexagon_residuals(&FormalScalar::one(), &log, cap)?;
    d.cap("pentagon", cap);
    d.cap("hexagon", cap);
    d.require(pent.is_zero(), || format!("pentagon {}", pent.to_sexpr()));
    d.require(h1.is_zero(), || format!("hexagon1 {}", h1.to_sexpr()));
    d.require(h2.is_zero(), || format!("hexagon2 {}", h2.to_sexpr()));
    let acap = cap.min(4);
    let phi = associator_series(kind, &params, acap)?;
    d.require(phi.check_invariants()?, || {
        "log of the series differs from the Lie image".into()
    });
    let rep = axiom_residuals(&phi.value, acap, p.deep)?;
    d.cap("diagram_axioms", acap);
    for r in &rep.residuals {
        d.require(r.vanishes(), || {
            let parts: Vec<String> = r.parts.iter().map(|x| x.to_sexpr()).collect();
            format!("axiom {}: {}", r.axiom, parts.join(" | "))
        });
    }
    Ok(())
}

type CommCache = Mutex<HashMap<(String, usize), CommutativityReport>>;

/// Commutativity reports are shared between `weights` and `centrality`.
fn cached_commutativity(s: WeightSystem, cap: usize) -> Result<CommutativityReport> {
    static C: OnceLock<CommCache> = OnceLock::new();
    let cache = C.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (s.to_string(), cap);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return Ok(r.clone());
    }
    let r = commutativity_report(s, cap)?;
    cache.lock().unwrap().insert(key, r.clone());
    Ok(r)
}

fn systems(p: &Params, d: &mut Draft) -> Result<Vec<WeightSystem>> {
    match &p.system {
        Some(s) => {
            d.param("system", s);
            Ok(vec![WeightSystem::from_str(s)?])
        }
        None => Ok(WeightSystem::ALL.to_vec()),
    }
}

fn commutativity(d: &mut Draft, systems: &[WeightSystem], cap: usize) -> Result<()> {
    let reps = systems
        .par_iter()
        .map(|&s| cached_commutativity(s, cap))
        .collect::<Result<Vec<_>>>()?;
    for r in reps {
        d.require(r.passed(), || {
            format!(
                "{} commutativity: {:?} stu {:?}",
                r.system, r.witness, r.stu_mismatches
            )
        });
    }
    Ok(())
}

fn weights(d: &mut Draft, p: &Params) -> Result<()> {
    let cap = p.max_degree.unwrap_or(3);
    if !(1..=4).contains(&cap) {
        return Err(invalid("weights runs at max degree 1..=4"));
    }
    let sys = systems(p, d)?;
    d.param("seed", p.seed);
    d.cap("commutativity", cap);
    d.cap("annihilation", cap);
    d.cap("conjugation", cap);
    let sk = skein_verify()?;
    d.require(sk.passed(), || {
        format!("skein: {:?} stu {:?}", sk.failures, sk.stu_mismatches)
    });
    commutativity(d, &sys, cap)?;
    let seeds: Vec<u64> = (0..3).map(|i| p.seed.wrapping_add(i)).collect();
    for &s in &sys {
        let a = relation_annihilation(s, cap)?;
        d.require(a.passed(), || {
            format!(
                "{s} annihilation: rows {:?} vertex {:?}",
                a.failures, a.vertex_failures
            )
        });
        let c = conjugation_check(s, &seeds, cap)?;
        d.require(c.passed(), || format!("{s} conjugation: {:?}", c.failures));
    }
    Ok(())
}

fn centrality_witness(r: &CentralityReport) -> String {
    let sig = Signature::Strands(2);
    match &r.witness {
        Some((a, b)) => format!("[{}, {}]", format_diagram(a, &sig), format_diagram(b, &sig)),
        None => String::new(),
    }
}

fn centrality(d: &mut Draft, p: &Params) -> Result<()> {
    let c = centrality_check(3, p.deep)?;
    d.cap("central_degree", 2);
    d.cap("partner_degree", 3);
    d.require(c.witness.is_none(), || centrality_witness(&c));
    let r = pair_commutation_check(p.deep)?;
    d.cap("pair_commutator_degree", if p.deep { 6 } else { 5 });
    d.require(r.witness.is_none(), || centrality_witness(&r));
    d.value.push(format!("pairs={}", c.checked + r.checked));
    if !p.deep {
        commutativity(d, &WeightSystem::ALL, 3)?;
        d.value
            .push("degree-3 pairs through all five weight systems".into());
    }
    Ok(())
}

fn prop11(d: &mut Draft, p: &Params) -> Result<()> {
    let cap = p.max_degree.unwrap_or(if p.deep { 6 } else { 5 });
    d.param("seed", p.seed);
    d.cap("invariance", cap);
    match cap {
        1..=5 => {}
        6 if !p.deep => {
            d.skipped.push("degree-6 invariance".into());
            return Ok(());
        }
        6 => {}
        7 => {
            return Err(invalid(
                "prop11 has no desk-scale check at degree 7; use <= 6 or >= 8",
            ))
        }
        0 => return Err(invalid("prop11 needs max degree >= 1")),
        _ => return adversarial_prop11(d, p),
    }
    let count = 20;
    d.param("pairs", count);
    let r = invariance_suite(p.seed, count, cap, p.deep)?;
    d.require(r.passed(), || {
        let s = r.failures[0];
        match crate::kontsevich::random_pair(s, cap) {
            Ok((f, z)) => format!("seed {s}: F={} z={}", f.to_sexpr(), z.to_sexpr()),
            Err(e) => format!("seed {s}: {e}"),
        }
    });
    Ok(())
}

/// Past degree 7 the conjugation `F = 1 + alpha J3` of `Z = 1 + J5` is certified to differ.
fn adversarial_prop11(d: &mut Draft, p: &Params) -> Result<()> {
    let (alpha, sa) = p.scalar(&p.alpha, Symbol::Alpha, false)?;
    d.param("alpha", sa);
    d.param("pair", "F=1+alpha*J3 Z=1+J5");
    let cap = 8;
    let sig = Signature::Strands(2);
    let j3 = DiagElt::from_diagram(sig.clone(), &make_jn(3)?, alpha.clone())?.with_cap(cap);
    let j5 = DiagElt::from_diagram(sig.clone(), &make_jn(5)?, FormalScalar::one())?.with_cap(cap);
    let one = DiagElt::one(sig).with_cap(cap);
    let f = one.add(&j3)?;
    let z = one.add(&j5)?;
    let diff = f
        .stack_product(&z)?
        .stack_product(&series_inverse(&f)?)?
        .sub(&z)?;
    let rep = thm12_difference(2, &alpha)?;
    if rep.passed() {
        d.failures.push(diff.component(cap).to_sexpr());
        d.value
            .push("degree-8 difference certified nonzero by the eta certificate".into());
    } else {
        d.value
            .push("conjugation invariant through degree 8".into());
    }
    Ok(())
}

fn prop15(d: &mut Draft, p: &Params) -> Result<()> {
    let cap = p.max_degree.unwrap_or(5);
    if !(2..=5).contains(&cap) {
        return Err(invalid("prop15 runs at max degree 2..=5"));
    }
    d.cap("conjugation", cap);
    d.cap("shift", 2);
    let r = prop15_check(cap, p.deep)?;
    let sig = Signature::Strands(2);
    d.require(r.shift_matches, || {
        "degree-2 shift differs from 2([t12,t23] + t12 t13 - t23 t13)".into()
    });
    d.require(r.differs, || "twist leaves the associator unchanged".into());
    d.require(r.outside_ab_image, || {
        "twisted degree-2 part is a word in t12, t23".into()
    });
    d.require(r.witness.is_none(), || {
        r.witness
            .as_ref()
            .map(|w| format_diagram(w, &sig))
            .unwrap_or_default()
    });
    d.value
        .push(format!("conjugations={}", r.conjugations_checked));
    Ok(())
}

fn thm12(d: &mut Draft, p: &Params) -> Result<()> {
    let ns: Vec<usize> = match p.n {
        Some(n) if (1..=5).contains(&n) => {
            d.param("n", n);
            vec![n]
        }
        Some(_) => return Err(invalid("thm12 runs for n in 1..=5")),
        None => vec![2, 3, 4, 5],
    };
    let (alpha, sa) = p.scalar(&p.alpha, Symbol::Alpha, false)?;
    d.param("alpha", sa);
    for n in ns {
        let r = thm12_difference(n, &alpha)?;
        d.cap(&format!("n{n}"), 2 * n + 4);
        let expect = n >= 2 && !alpha.is_zero();
        d.require(r.low_equal, || {
            format!("n={n}: difference below degree {}", 2 * n + 4)
        });
        d.require(r.top_nonzero() == expect, || format!("n={n}: {r:?}"));
        d.value.push(format!(
            "n={n}: equal through degree {}, {} at degree {}",
            2 * n + 3,
            if r.top_nonzero() { "nonzero" } else { "zero" },
            2 * n + 4
        ));
    }
    Ok(())
}

fn dims(d: &mut Draft, p: &Params) -> Result<()> {
    let space = p.space.clone().unwrap_or_else(|| "reduced".into());
    let deg = p.degree.unwrap_or(3);
    d.param("space", &space);
    d.param("degree", deg);
    d.cap("degree", deg);
    match space.as_str() {
        "chords" => {
            let n = chord_basis(deg, 2).len();
            let closed = number_of_chord_diagrams(deg, 2);
            d.require(n == closed, || {
                format!("enumeration {n} vs closed form {closed}")
            });
            d.value.push(n.to_string());
        }
        "reduced" => {
            let r = relation_space_guarded(deg, 2, p.deep)?;
            let dim = r.reduced_dim();
            if deg <= 4 {
                let oracle = r.free_dim() - r.four_term_rank()?;
                d.require(dim == oracle, || format!("STU {dim} vs four-term {oracle}"));
            }
            d.value.push(dim.to_string());
        }
        _ => return Err(invalid(format!("unknown space `{space}` (chords|reduced)"))),
    }
    Ok(())
}
