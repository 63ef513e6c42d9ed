//! Acceptance run: one line per criterion with its verdict and time.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::Parser;
use serde_json::Value;

use c2_cli::{run, Cli};
use c2_core::catalog::{random_composable_pair, random_presheaf, rng, small_categories};
use c2_core::check::{check_bytes, rejection_class};
use c2_core::fincat::file::BaseAssignment;
use c2_core::fincat::{validate_functor, FinCat};
use c2_core::models;
use c2_core::oracle::{composite_partition, engine_partition};
use c2_core::parser::{parse, parse_bytes, pretty_file, Declaration};
use c2_core::profunctor::{compose_over, validate_nat, Coord, Profunctor};
use c2_core::semantics::Semantics;
use c2_core::syntax::alpha_eq;
use c2_core::typing::{Checker, Rule};
use c2_core::verify::{check_gbeta, coyoneda_holds, gbeta_instances};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(sub: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> =
        std::fs::read_dir(root().join("corpus").join(sub)).unwrap().map(|e| e.unwrap().path()).collect();
    v.retain(|p| p.extension().is_some_and(|e| e == "c2"));
    v.sort();
    v
}

fn positives() -> Vec<PathBuf> {
    corpus("positive").into_iter().chain(corpus("regression")).collect()
}

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn rule_coverage() -> Outcome {
    let checker = Checker::tracing();
    let mut decls = 0;
    for f in positives() {
        let r = check_bytes(&checker, &std::fs::read(&f).unwrap()).map_err(|e| format!("{}: {e}", f.display()))?;
        if let Some(o) = r.outcomes.iter().find(|o| o.error.is_some()) {
            return Err(format!("{}: {} rejected", f.display(), o.name));
        }
        decls += r.outcomes.iter().filter(|o| o.kind != "type").count();
    }
    let counts = checker.rule_counts();
    if let Some(r) = Rule::all().find(|r| counts.get(r).copied().unwrap_or(0) < 2) {
        return Err(format!("rule {r} used fewer than twice"));
    }
    let mut classes = BTreeSet::new();
    for f in corpus("negative") {
        let bytes = std::fs::read(&f).unwrap();
        let head = String::from_utf8_lossy(bytes.split(|&b| b == b'\n').next().unwrap()).to_string();
        let want = head.strip_prefix("-- expect: ").ok_or_else(|| format!("{}: no header", f.display()))?.trim().to_string();
        let got = rejection_class(&Checker::default(), &bytes);
        ensure(got == Some(want.as_str()), || format!("{}: expected {want}, got {got:?}", f.display()))?;
        classes.insert(want);
    }
    ensure(decls >= 30 && classes.len() >= 15, || format!("{decls} declarations, {} classes", classes.len()))?;
    Ok(format!("{decls} declarations, {} rules, {} negative classes", Rule::all().count(), classes.len()))
}

fn coyoneda() -> Outcome {
    let mut r = rng(2);
    let cats = small_categories();
    let mut checked = 0;
    for (name, c) in &cats {
        ensure(c.n_objects() <= 3 && c.n_arrows() <= 8, || format!("{name} too large"))?;
        let c = Arc::new(c.clone());
        for _ in 0..3 {
            let p = Profunctor::new(vec![Coord::Result], random_presheaf(&c, &mut r)).unwrap();
            ensure(coyoneda_holds(&p, &Coord::Result).unwrap_or(false), || format!("fails on {name}"))?;
            checked += 1;
        }
    }
    ensure(cats.len() >= 20, || format!("only {} categories", cats.len()))?;
    Ok(format!("{} categories, {checked} presheaves", cats.len()))
}

fn oracle() -> Outcome {
    let cats: Vec<_> = small_categories().into_iter().map(|(_, c)| Arc::new(c)).collect();
    let mut r = rng(3);
    let n = 64;
    for i in 0..n {
        let (p, q, o) = random_composable_pair(&cats, &mut r, 2);
        let c = compose_over(&p, &q, &o).map_err(|e| format!("pair {i}: {e}"))?;
        ensure(composite_partition(&p, &q, &o) == Some(engine_partition(&c)), || format!("pair {i} differs"))?;
    }
    Ok(format!("{n} pairs"))
}

fn soundness() -> Outcome {
    let bases = [
        ("terminal", BaseAssignment::default()),
        ("discrete-2", BaseAssignment::uniform(FinCat::discrete(2))),
        ("mixed", models::demo_bases()),
    ];
    let mut runs = 0;
    for (label, b) in bases {
        let sem = Semantics::new(b);
        for f in positives() {
            let file = parse(&std::fs::read_to_string(&f).unwrap()).unwrap();
            for d in &file.declarations {
                let at = || format!("{label}: {}", d.name());
                match d {
                    Declaration::TypeDef { .. } => continue,
                    Declaration::TermDecl { context, judgment, expr, .. } => {
                        let p = sem.interp(context, expr, judgment).map_err(|e| format!("{}: {e}", at()))?;
                        validate_functor(p.body()).map_err(|e| format!("{}: {e}", at()))?;
                    }
                    Declaration::ReductionDecl { context, judgment, reduction, .. } => {
                        let c = sem.reduction(context, reduction, Some(judgment)).map_err(|e| format!("{}: {e}", at()))?;
                        validate_functor(c.source.body()).map_err(|e| format!("{}: {e}", at()))?;
                        validate_functor(c.target.body()).map_err(|e| format!("{}: {e}", at()))?;
                        validate_nat(&c.cell).map_err(|e| format!("{}: {e}", at()))?;
                        ensure(c.endpoints_match(), || format!("{}: endpoints differ", at()))?;
                    }
                }
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} declaration runs over 3 base assignments"))
}

fn generalized_beta() -> Outcome {
    let sem = Semantics::new(models::demo_bases());
    let mut classes = BTreeSet::new();
    let mut bijective = 0;
    for inst in gbeta_instances() {
        let o = check_gbeta(&sem, &inst).map_err(|e| format!("{} {}: {e}", inst.class, inst.v))?;
        ensure(o.natural && o.iota_iso, || format!("{} {}: not natural", inst.class, inst.v))?;
        if inst.class == "bound-var" {
            ensure(o.bijective == Some(true), || format!("{}: bound variable not bijective", inst.v))?;
            bijective += 1;
        }
        classes.insert(inst.class);
    }
    Ok(format!("{} case classes, {bijective} bound-variable bijections", classes.len()))
}

fn coincidence() -> Outcome {
    let mut n = 0;
    let mut findings = Vec::new();
    let cats: Vec<_> = small_categories().into_iter().filter(|(_, c)| c.n_objects() <= 2).collect();
    for (name, c) in &cats {
        let sem = Semantics::new(BaseAssignment::uniform(c.clone()));
        for inst in gbeta_instances().into_iter().filter(|i| i.judgment != "#") {
            let o = check_gbeta(&sem, &inst).map_err(|e| format!("{name} {}: {e}", inst.v))?;
            n += 1;
            if o.coincides != Some(true) {
                findings.push(format!("{name}: {} with argument {}", inst.v, inst.arg));
            }
        }
    }
    ensure(findings.is_empty(), || format!("coincidence fails: {}", findings.join("; ")))?;
    Ok(format!("{n} instances over {} categories", cats.len()))
}

fn demo(args: &[&str]) -> Result<(u8, Value), String> {
    let mut full = vec!["c2", "demo"];
    full.extend_from_slice(args);
    full.extend(["--format", "json-lines"]);
    let cli = Cli::try_parse_from(full).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    let code = run(&cli, &mut buf).map_err(|e| e.to_string())?;
    let first = String::from_utf8(buf).unwrap().lines().next().map(str::to_string).ok_or("no output")?;
    Ok((code, serde_json::from_str(&first).map_err(|e| e.to_string())?))
}

fn degeneracy() -> Outcome {
    let mut files: Vec<String> = std::fs::read_dir(root().join("corpus/positive"))
        .unwrap()
        .map(|e| e.unwrap().path().display().to_string())
        .collect();
    files.sort();
    let mut args = vec!["rel-collapse", "--pairs", "100"];
    args.extend(files.iter().map(String::as_str));
    let (code, rel) = demo(&args)?;
    let collapsed = rel["distinct"] == 0 && rel["and_or_coincide"] == true && rel["negation_preserves_cardinality"] == true;
    ensure(code == 0 && collapsed && rel["parallel"].as_u64() > Some(0), || format!("rel-collapse: {rel}"))?;
    ensure(rel["prof_distinct"].as_u64() > Some(0), || format!("no contrast with prof: {rel}"))?;
    let (code, l) = demo(&["lafont"])?;
    ensure(code == 0 && l["well_typed"] == true && l["distinct_reducts"] == true, || format!("lafont: {l}"))?;
    let (code, n) = demo(&["nondegeneracy"])?;
    ensure(code == 0 && n["distinct"] == true, || format!("nondegeneracy: {n}"))?;
    let frozen = std::fs::read_to_string(root().join("corpus/regression/nondegeneracy.c2")).unwrap();
    let same = parse(&frozen).map(|f| f.declarations) == parse(models::WITNESS).map(|f| f.declarations);
    ensure(same, || "regression fixture differs from the pinned witness".into())?;
    Ok(format!(
        "rel: {} parallel, 0 distinct ({} in prof on the same bases); witness separated",
        rel["parallel"], rel["prof_distinct"]
    ))
}

fn round_trip() -> Outcome {
    let mut decls = 0;
    for f in positives() {
        let file = parse(&std::fs::read_to_string(&f).unwrap()).unwrap();
        let again = parse(&pretty_file(&file)).map_err(|e| format!("{}: reprint fails: {e}", f.display()))?;
        ensure(file.declarations.len() == again.declarations.len(), || format!("{}: count differs", f.display()))?;
        for (a, b) in file.declarations.iter().zip(&again.declarations) {
            let same = match (a, b) {
                (Declaration::TermDecl { expr: x, .. }, Declaration::TermDecl { expr: y, .. }) => alpha_eq(x, y),
                _ => a == b,
            };
            ensure(same, || format!("{}: {} changes", f.display(), a.name()))?;
            decls += 1;
        }
    }
    use rand::{Rng, SeedableRng};
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    for i in 0..10_000 {
        let len = r.gen_range(0..128);
        let bytes: Vec<u8> = (0..len).map(|_| r.gen()).collect();
        let _ = catch_unwind(AssertUnwindSafe(|| parse_bytes(&bytes))).map_err(|_| format!("fuzz case {i} panicked"))?;
    }
    Ok(format!("{decls} declarations, 10000 fuzz cases"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("rule coverage", rule_coverage, Duration::from_secs(5)),
        ("co-yoneda", coyoneda, Duration::from_secs(60)),
        ("oracle equivalence", oracle, Duration::from_secs(60)),
        ("soundness sweep", soundness, Duration::from_secs(120)),
        ("generalized beta", generalized_beta, Duration::from_secs(60)),
        ("coincidence", coincidence, Duration::from_secs(120)),
        ("degeneracy contrast", degeneracy, Duration::from_secs(300)),
        ("parser round trip", round_trip, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = outcome.and_then(|m| {
            if took <= *budget {
                Ok(m)
            } else {
                Err(format!("{m}, but over the {budget:?} budget"))
            }
        });
        match outcome {
            Ok(m) => println!("criterion {} ({name}): PASS in {took:.2?}: {m}", i + 1),
            Err(m) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL in {took:.2?}: {m}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
