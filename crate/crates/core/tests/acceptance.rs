//! Acceptance suite: prints PASS/FAIL per criterion and exits nonzero on any failure.
//! Set `JACOBI_DEEP=1` to include the deep items.

use std::process::ExitCode;
use std::str::FromStr;
use std::time::{Duration, Instant};

use jacobi_core::associators::{
    associator_log, associator_series, prop15_check, twist, AssocKind, AssocParams,
};
use jacobi_core::diagrams::checks::{
    centrality_check, pair_commutation_check, transposition_oracle,
};
use jacobi_core::diagrams::{
    make_jn, prop44_certificate, reduce_mod_relations, relation_space_guarded, DiagElt, Signature,
};
use jacobi_core::grt::{grt1_residuals, hexagon_residuals, pentagon_residual};
use jacobi_core::kohno::{oracle_agreement, TnElt};
use jacobi_core::kontsevich::{invariance_suite, thm12_difference, z_braid3, BraidWord};
use jacobi_core::lie::{bracket35_display, ihara_bracket, sigma3, sigma5, sigma7};
use jacobi_core::verify::DEFAULT_SEED;
use jacobi_core::weights::checks::CommutativityReport;
use jacobi_core::weights::{
    commutativity_report, relation_annihilation, skein_verify, WeightSystem,
};
use jacobi_core::{FormalScalar, Rat, Result, Symbol};

type Outcome = Result<Vec<String>>;

fn deep() -> bool {
    std::env::var("JACOBI_DEEP").is_ok_and(|v| v == "1")
}

fn need(fails: &mut Vec<String>, ok: bool, what: impl Into<String>) {
    if !ok {
        fails.push(what.into());
    }
}

fn sym(s: Symbol) -> FormalScalar {
    FormalScalar::symbol(s)
}

fn c1_example() -> Outcome {
    let mut f = Vec::new();
    let cap = 4;
    let kz = associator_series(AssocKind::Kz4, &AssocParams::default(), cap)?;
    let log = z_braid3(&BraidWord::from_str("x23")?, &kz, cap)?.log()?;
    let (t12, t23) = (
        TnElt::generator(3, "t12", cap)?,
        TnElt::generator(3, "t23", cap)?,
    );
    let br = |a: &TnElt, b: &TnElt| a.commutator(b);
    let want = t23
        .sub(&br(&br(&t12, &t23)?, &t23)?.scale(&FormalScalar::rat(1, 24)))?
        .add(&br(&br(&t12.add(&t23)?, &br(&t12, &t23)?)?, &t23)?.scale(&sym(Symbol::Z)))?;
    need(
        &mut f,
        log == want,
        format!("log Z(x23) = {}", log.to_sexpr()),
    );
    Ok(f)
}

fn c2_twist() -> Outcome {
    let mut f = Vec::new();
    let alpha = sym(Symbol::Alpha);
    let sig = Signature::Strands(2);
    let twistor =
        DiagElt::one(sig.clone()).add(&DiagElt::from_diagram(sig, &make_jn(3)?, alpha.clone())?)?;
    let shifted = AssocParams {
        lambda1: &sym(Symbol::Lambda1) + &alpha.scale(&Rat::int(2)),
        ..AssocParams::default()
    };
    let caps: &[usize] = if deep() { &[4, 5] } else { &[4] };
    for &cap in caps {
        let phi = associator_series(AssocKind::General5, &AssocParams::default(), cap)?.value;
        let want = associator_series(AssocKind::General5, &shifted, cap)?.value;
        let diff = reduce_mod_relations(&twist(&phi, &twistor, cap)?.sub(&want)?, cap > 4)?;
        need(
            &mut f,
            diff.is_zero(),
            format!("cap {cap} residual {}", diff.to_sexpr()),
        );
    }
    Ok(f)
}

fn c3_certificates() -> Outcome {
    let mut f = Vec::new();
    for n in 1..=5 {
        let c = prop44_certificate(n)?;
        need(
            &mut f,
            c.nonzero == (n >= 2),
            format!("n={n} nonzero={}", c.nonzero),
        );
    }
    let l = transposition_oracle()?;
    need(
        &mut f,
        l.passed() && l.pairs > 0,
        format!(
            "transposition oracle {:?} {:?}",
            l.decomposition_failures, l.bracket_failures
        ),
    );
    Ok(f)
}

fn c4_grt() -> Outcome {
    let mut f = Vec::new();
    need(&mut f, grt1_residuals(&sigma3(), 3)?.vanish(), "sigma3");
    need(&mut f, grt1_residuals(&sigma5(), 5)?.vanish(), "sigma5");
    let b = ihara_bracket(&sigma3(), &sigma5())?;
    need(
        &mut f,
        b == bracket35_display(),
        "ihara bracket differs from display",
    );
    need(&mut f, grt1_residuals(&sigma7(), 7)?.vanish(), "sigma7");
    need(&mut f, grt1_residuals(&b, 8)?.vanish(), "{sigma3, sigma5}");
    Ok(f)
}

fn c5_general() -> Outcome {
    let mut f = Vec::new();
    let l = associator_log(AssocKind::General5, &AssocParams::default());
    need(&mut f, pentagon_residual(&l, 5)?.is_zero(), "pentagon");
    let (h1, h2) = hexagon_residuals(&FormalScalar::one(), &l, 5)?;
    need(&mut f, h1.is_zero() && h2.is_zero(), "hexagons");
    Ok(f)
}

fn c6_weights(comm: &mut Vec<CommutativityReport>) -> Outcome {
    let mut f = Vec::new();
    let sk = skein_verify()?;
    need(&mut f, sk.passed() && sk.embeddings > 0, "skein");
    for s in WeightSystem::ALL {
        let r = commutativity_report(s, 3)?;
        need(
            &mut f,
            r.passed(),
            format!("{s} commutativity {:?}", r.witness),
        );
        if s == WeightSystem::Sl2 {
            need(&mut f, r.stu_mismatches.is_empty(), "sl2 STU expansion");
        }
        comm.push(r);
        let a = relation_annihilation(s, 3)?;
        need(
            &mut f,
            a.passed() && a.rows > 0,
            format!("{s} annihilation {:?}", a.failures),
        );
    }
    Ok(f)
}

fn c7_centrality(comm: &[CommutativityReport]) -> Outcome {
    let mut f = Vec::new();
    let c = centrality_check(3, false)?;
    need(&mut f, c.witness.is_none(), format!("{:?}", c.witness));
    let p = pair_commutation_check(deep())?;
    need(
        &mut f,
        p.witness.is_none(),
        format!("pair commutation {:?}", p.witness),
    );
    if !deep() {
        need(
            &mut f,
            comm.len() == 5 && comm.iter().all(|r| r.passed()),
            "weight-system necessary condition",
        );
    }
    Ok(f)
}

fn c8_invariance() -> Outcome {
    let mut f = Vec::new();
    let r = invariance_suite(DEFAULT_SEED, 20, 5, false)?;
    need(
        &mut f,
        r.passed() && r.pairs == 20,
        format!("cap 5 seeds {:?}", r.failures),
    );
    if deep() {
        let r = invariance_suite(DEFAULT_SEED, 20, 6, true)?;
        need(&mut f, r.passed(), format!("cap 6 seeds {:?}", r.failures));
    }
    Ok(f)
}

fn c9_prop15() -> Outcome {
    let mut f = Vec::new();
    let r = prop15_check(5, false)?;
    need(&mut f, r.passed(), format!("{r:?}"));
    Ok(f)
}

fn c10_thm12() -> Outcome {
    let mut f = Vec::new();
    for n in 2..=5 {
        let r = thm12_difference(n, &FormalScalar::one())?;
        need(
            &mut f,
            r.low_equal,
            format!("n={n}: differs below degree {}", 2 * n + 4),
        );
        need(&mut f, r.top_nonzero(), format!("n={n}: {r:?}"));
    }
    Ok(f)
}

fn c11_oracles() -> Outcome {
    let mut f = Vec::new();
    for n in [3u8, 4] {
        for d in 0..=4 {
            let r = oracle_agreement(n, d, 50, DEFAULT_SEED)?;
            need(
                &mut f,
                r.passed(),
                format!("U(t{n}) degree {d}: samples {:?}", r.failures),
            );
        }
    }
    for d in 1..=3 {
        let r = relation_space_guarded(d, 2, false)?;
        let oracle = r.free_dim() - r.four_term_rank()?;
        need(
            &mut f,
            r.reduced_dim() == oracle,
            format!("degree {d}: {} vs {oracle}", r.reduced_dim()),
        );
    }
    Ok(f)
}

fn main() -> ExitCode {
    let mut comm = Vec::new();
    let min = |m: u64| Duration::from_secs(60 * m);
    let sec = Duration::from_secs;
    let mut all_ok = true;
    let mut run = |k: usize, name: &str, budget: Duration, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let res = f();
        let el = t.elapsed();
        let (ok, detail) = match res {
            Ok(fails) if fails.is_empty() && el <= budget => (true, String::new()),
            Ok(fails) if fails.is_empty() => (false, format!("over budget {budget:?}")),
            Ok(fails) => (false, fails.join("; ")),
            Err(e) => (false, format!("error: {e}")),
        };
        all_ok &= ok;
        println!(
            "criterion {k:>2} {:<4} {name} ({:.2}s) {detail}",
            if ok { "PASS" } else { "FAIL" },
            el.as_secs_f64()
        );
    };
    let deep = deep();
    run(1, "three-strand braid value", sec(1), &mut c1_example);
    run(
        2,
        "J3 twist shifts lambda1",
        if deep { min(3) } else { sec(30) },
        &mut c2_twist,
    );
    run(
        3,
        "non-commutativity certificates",
        sec(30),
        &mut c3_certificates,
    );
    run(4, "grt1 elements", sec(60), &mut c4_grt);
    run(5, "general rational associator", min(5), &mut c5_general);
    run(6, "weight systems", min(2), &mut || c6_weights(&mut comm));
    let comm_ref = comm.clone();
    run(
        7,
        "centrality",
        if deep { min(30) } else { min(2) },
        &mut || c7_centrality(&comm_ref),
    );
    run(
        8,
        "conjugation invariance",
        if deep { min(60) } else { min(5) },
        &mut c8_invariance,
    );
    run(9, "central twist", min(5), &mut c9_prop15);
    run(10, "degree-(2n+4) difference", sec(60), &mut c10_thm12);
    run(11, "oracle cross-validation", min(5), &mut c11_oracles);
    if all_ok {
        println!(
            "acceptance: all criteria PASS{}",
            if deep { " (deep)" } else { "" }
        );
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAIL");
        ExitCode::FAILURE
    }
}
