//! Acceptance suite. Runs without the libtest harness so that the one-line
//! verdicts always reach stdout; exits nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tame_monodromy::abvar::{self, AbelianType};
use tame_monodromy::linalg::{jordan_chevalley, jordan_profile};
use tame_monodromy::poly::{factor_cyclotomic, q_poly};
use tame_monodromy::random::{self, TypeCaps};
use tame_monodromy::verify::onejord_table;
use tame_monodromy::weight_filt::weight_filtration;
use tame_monodromy::{CycloElem, CycloMatrix, QZElem, Rational};

// Sizes and wall-clock limits. Exact arithmetic throughout, so there is no
// numeric tolerance to pin: every comparison below is equality.
const SYMBOLIC_CASES: usize = 500;
const SYMBOLIC_CAPS: TypeCaps = TypeCaps { max_g: 5, max_e: 24 };
const SYMBOLIC_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_CASES: usize = 50;
const ORACLE_CAPS: TypeCaps = TypeCaps { max_g: 3, max_e: 8 };
const ORACLE_LIMIT: Duration = Duration::from_secs(120);
const CHARPOLY_MAX_H1: u64 = 8;
const COMPLETE_CASES: usize = 200;
const COMPLETE_MAX_ORDER: u64 = 60;
const NILPOTENT_CASES: usize = 200;
const NILPOTENT_MAX_DIM: usize = 6;
const PAIR_CASES: usize = 100;
const PAIR_MAX_DIM: usize = 4;
const ONEJORD_MAX_M: u64 = 8;
const BRIDGE_CASES: usize = 20;
const BRIDGE_CAP: usize = 70;
const DETERMINISM_SEED: &str = "42";
const DETERMINISM_CASES: &str = "100";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(0xACCE97);
    r.set_stream(stream);
    r
}

fn types(stream: u64, n: usize, caps: TypeCaps) -> Vec<AbelianType> {
    let mut r = rng(stream);
    (0..n).map(|_| random::random_type(&mut r, caps)).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.1?}, limit {limit:?}"))
}

fn rat(n: u64) -> Rational {
    Rational::from_integer(n.into())
}

fn symbolic_blocks() -> Outcome {
    let start = Instant::now();
    for a in types(1, SYMBOLIC_CASES, SYMBOLIC_CAPS) {
        let hg = abvar::hg_analysis(&a).map_err(|e| format!("{a:?}: {e}"))?;
        let expect = a.tor.norm() as usize + 1;
        let cand = QZElem::from_rational(&abvar::conductor(&a).unwrap()).unwrap();
        ensure(hg.findings.is_empty(), || format!("{a:?}: {:?}", hg.findings))?;
        ensure(hg.pole_candidate == cand && hg.max_block_at_candidate == expect, || {
            format!("{a:?}: block {} at {}", hg.max_block_at_candidate, hg.pole_candidate)
        })?;
        ensure(hg.per_eigenvalue.values().all(|&b| b <= expect), || {
            format!("{a:?}: {:?} exceeds {expect}", hg.per_eigenvalue)
        })?;
    }
    within(SYMBOLIC_LIMIT, start)?;
    Ok(format!("{SYMBOLIC_CASES} types, {:.1?}", start.elapsed()))
}

fn oracle_blocks() -> Outcome {
    let start = Instant::now();
    for a in types(2, ORACLE_CASES, ORACLE_CAPS) {
        let g = a.g as usize;
        let spec = abvar::h1_monodromy(&a).map_err(|e| e.to_string())?;
        let hg = spec.materialize(spec.conductor()).unwrap().wedge(g).unwrap();
        let oracle = jordan_profile(&hg, &spec.wedge_spectrum(g).unwrap()).map_err(|e| e.to_string())?;
        let symbolic = spec.wedge_max_ranks(g).unwrap();
        ensure(oracle.max_blocks() == symbolic, || {
            format!("{spec}: oracle {:?}, symbolic {symbolic:?}", oracle.max_blocks())
        })?;
    }
    within(ORACLE_LIMIT, start)?;
    Ok(format!("{ORACLE_CASES} materialized cases, {:.1?}", start.elapsed()))
}

fn conductor_consistency() -> Outcome {
    let mut toric = 0;
    let all = types(1, SYMBOLIC_CASES, SYMBOLIC_CAPS);
    for a in &all {
        let c = abvar::conductor(a).map_err(|e| e.to_string())?;
        let cm = abvar::conductor_cormult(a).map_err(|e| e.to_string())?;
        ensure(c == cm, || format!("{a:?}: {c} vs {cm}"))?;
        let r = abvar::ranks(a).unwrap();
        if r.a_pot == 0 {
            toric += 1;
            ensure(c == rat(r.u) / rat(2), || format!("{a:?}: c = {c}, u = {}", r.u))?;
        }
    }
    Ok(format!("{} types, {toric} with a_pot = 0", all.len()))
}

fn h1_charpoly() -> Outcome {
    let mut checked = 0;
    for a in types(1, SYMBOLIC_CASES, SYMBOLIC_CAPS) {
        if 2 * a.g > CHARPOLY_MAX_H1 {
            continue;
        }
        checked += 1;
        let p = abvar::h1_charpoly(&a).map_err(|e| e.to_string())?;
        let spec = abvar::h1_monodromy(&a).unwrap();
        let m = spec.materialize(spec.conductor()).unwrap();
        let oracle = m.charpoly();
        let ints: Option<Vec<Rational>> = oracle.iter().map(CycloElem::as_rational).collect();
        let ints = ints.ok_or_else(|| format!("{a:?}: charpoly not rational"))?;
        ensure(ints.iter().all(Rational::is_integer), || format!("{a:?}: {ints:?}"))?;
        let expect: Vec<Rational> = p.coeffs().iter().map(|c| Rational::from_integer(c.clone())).collect();
        ensure(ints == expect, || format!("{a:?}: {p} vs {ints:?}"))?;
        let exps = a.ab.add(&a.dual_ab).add(&a.tor.times(2));
        let back = factor_cyclotomic(&p).map_err(|e| e.to_string())?.to_mult_func();
        ensure(back == exps, || format!("{a:?}: factor gives {back:?}"))?;
    }
    Ok(format!("{checked} types with dim H¹ ≤ {CHARPOLY_MAX_H1}"))
}

fn complete_bijection() -> Outcome {
    let mut r = rng(5);
    for _ in 0..COMPLETE_CASES {
        let f = random::random_complete_function(&mut r, COMPLETE_MAX_ORDER, 4, 3);
        let p = q_poly(&f).map_err(|e| e.to_string())?;
        let back = factor_cyclotomic(&p).map_err(|e| e.to_string())?.to_mult_func();
        ensure(back == f, || format!("{f:?} -> {p} -> {back:?}"))?;
    }
    Ok(format!("{COMPLETE_CASES} functions, orders ≤ {COMPLETE_MAX_ORDER}"))
}

fn nil(m: &CycloMatrix, s: &BTreeSet<QZElem>) -> Result<CycloMatrix, String> {
    jordan_chevalley(m, s).map(|p| p.1).map_err(|e| e.to_string())
}

fn weight_axioms() -> Outcome {
    let mut r = rng(6);
    for _ in 0..NILPOTENT_CASES {
        let (n, sizes) = random::random_nilpotent(&mut r, NILPOTENT_MAX_DIM);
        let w = r.gen_range(-3..=3);
        let f = weight_filtration(&n, w).map_err(|e| e.to_string())?;
        ensure(f.satisfies_conditions(&n), || format!("blocks {sizes:?}"))?;
    }
    let sums = |a: &BTreeSet<QZElem>, b: &BTreeSet<QZElem>| -> BTreeSet<QZElem> {
        a.iter().flat_map(|x| b.iter().map(move |y| x.add(y))).collect()
    };
    for _ in 0..PAIR_CASES {
        let (m1, s1) = random::random_quasi_unipotent(&mut r, PAIR_MAX_DIM, 4);
        let (m2, s2) = random::random_quasi_unipotent(&mut r, PAIR_MAX_DIM, 4);
        let (w1, w2) = (r.gen_range(-2..=2), r.gen_range(-2..=2));
        let f1 = weight_filtration(&nil(&m1, &s1.exponents())?, w1).unwrap();
        let f2 = weight_filtration(&nil(&m2, &s2.exponents())?, w2).unwrap();

        // the contragredient operator is the inverse transpose
        let inv_t = m1.inverse().unwrap().transpose();
        let neg: BTreeSet<QZElem> = s1.exponents().iter().map(QZElem::neg).collect();
        let fd = weight_filtration(&nil(&inv_t, &neg)?, -w1).unwrap();
        ensure(f1.dual() == fd, || format!("dual of {s1}"))?;

        let ft = weight_filtration(&nil(&m1.kron(&m2), &sums(&s1.exponents(), &s2.exponents()))?, w1 + w2).unwrap();
        ensure(f1.tensor(&f2) == ft, || format!("{s1} ⊗ {s2}"))?;

        for j in 1..=m1.rows() {
            let nw = nil(&m1.wedge(j).unwrap(), &s1.wedge_spectrum(j).unwrap())?;
            let fw = weight_filtration(&nw, w1 * j as i64).unwrap();
            ensure(f1.wedge(j).unwrap() == fw, || format!("Λ^{j} of {s1}"))?;
        }
    }
    Ok(format!("{NILPOTENT_CASES} nilpotents, {PAIR_CASES} quasi-unipotent pairs"))
}

fn onejord() -> Outcome {
    let x = QZElem::frac(1, 3);
    let rows = onejord_table(ONEJORD_MAX_M, x).map_err(|e| e.to_string())?;
    let mut differs = Vec::new();
    for row in &rows {
        ensure(row.formula_holds() && row.formula == row.j * (row.m - row.j), || format!("{row:?}"))?;
        // j(m−j) = m(m−j) only when j = m
        ensure(row.alternative_holds() == (row.j == row.m), || format!("{row:?}"))?;
        if !row.alternative_holds() {
            differs.push(format!("({},{}): {} ≠ {}", row.m, row.j, row.brute_force, row.alternative));
        }
    }
    // the discrepancy report
    println!("  amplitude of Λ^j Jord_m(ξ) is j(m−j); m(m−j) disagrees at {} pairs", differs.len());
    for d in differs.iter().take(4) {
        println!("    {d}");
    }
    Ok(format!("{} pairs with m ≤ {ONEJORD_MAX_M}, implemented formula j(m−j)", rows.len()))
}

fn transform_algebra() -> Outcome {
    let all = types(8, 300, TypeCaps { max_g: 4, max_e: 12 });
    let mut r = rng(9);
    for a in &all {
        let d = abvar::dual(a).map_err(|e| e.to_string())?;
        ensure(abvar::dual(&d).unwrap() == *a, || format!("{a:?}: dual not an involution"))?;
        ensure(abvar::validate(&d).is_empty(), || format!("{a:?}: dual not admissible"))?;

        let b = random::random_type_with_flags(&mut r, TypeCaps { max_g: 3, max_e: 12 }, Some(a.flags));
        let p = abvar::product(a, &b).map_err(|e| e.to_string())?;
        ensure(abvar::validate(&p).is_empty(), || format!("{a:?} × {b:?} not admissible"))?;
        let (ca, cb, cp) = (abvar::conductor(a).unwrap(), abvar::conductor(&b).unwrap(), abvar::conductor(&p).unwrap());
        ensure(cp == &ca + &cb, || format!("{a:?} × {b:?}: conductor {cp}"))?;
        let (ra, rb, rp) = (abvar::ranks(a).unwrap(), abvar::ranks(&b).unwrap(), abvar::ranks(&p).unwrap());
        ensure(
            (rp.t, rp.u, rp.a, rp.t_pot, rp.a_pot)
                == (ra.t + rb.t, ra.u + rb.u, ra.a + rb.a, ra.t_pot + rb.t_pot, ra.a_pot + rb.a_pot),
            || format!("{a:?} × {b:?}: ranks {rp:?}"),
        )?;
        let (ka, kb, kp) = (abvar::isogeny_key(a), abvar::isogeny_key(&b), abvar::isogeny_key(&p));
        ensure(kp == (ka.0.add(&kb.0), ka.1.add(&kb.1)), || format!("{a:?} × {b:?}: isogeny key"))?;

        let (n1, n2) = (r.gen_range(1..=6u64), r.gen_range(1..=6u64));
        let step = abvar::base_change(&abvar::base_change(a, n1, true).unwrap(), n2, true).unwrap();
        let once = abvar::base_change(a, n1 * n2, true).map_err(|e| e.to_string())?;
        ensure(step == once, || format!("{a:?}: base change by {n1} then {n2}"))?;
        ensure(abvar::validate(&once).is_empty(), || format!("{a:?}: base change not admissible"))?;
        let full = abvar::base_change(a, a.e, true).unwrap();
        ensure(abvar::conductor(&full).unwrap() == rat(0), || format!("{a:?}: conductor after e"))?;
        ensure(
            [&full.tor, &full.ab, &full.dual_ab].iter().all(|f| f.support().all(QZElem::is_zero)),
            || format!("{a:?}: not semi-abelian after base change by e"),
        )?;
    }
    Ok(format!("{} types", all.len()))
}

fn weight_bridge() -> Outcome {
    let mut r = rng(10);
    let mut done = 0;
    let mut by_g: BTreeMap<u64, usize> = BTreeMap::new();
    while done < BRIDGE_CASES {
        // g = 4 gives C(8, 4) = 70, the largest size allowed
        let a = random::random_type(&mut r, TypeCaps { max_g: 4, max_e: 8 });
        let wp = abvar::hg_weight_profile(&a, BRIDGE_CAP).map_err(|e| format!("{a:?}: {e}"))?;
        let hg = abvar::hg_analysis(&a).unwrap();
        ensure(wp.findings.is_empty(), || format!("{a:?}: {:?}", wp.findings))?;
        ensure(wp.top_alpha == Some(a.tor.norm() as i64), || format!("{a:?}: top α {:?}", wp.top_alpha))?;
        ensure(wp.amplitude as usize + 1 == hg.global_max_block, || {
            format!("{a:?}: amplitude {} vs block {}", wp.amplitude, hg.global_max_block)
        })?;
        *by_g.entry(a.g).or_default() += 1;
        done += 1;
    }
    Ok(format!("{BRIDGE_CASES} types, by g {by_g:?}"))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_tamemono"))
            .args(["verify", "--seed", DETERMINISM_SEED, "--cases", DETERMINISM_CASES])
            .env_remove("MONODROMY_MAX_G")
            .env_remove("MONODROMY_MAX_E")
            .env_remove("MONODROMY_ORACLE_CAP")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), || format!("exit {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stdout)))?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "reports differ".into())?;
    let _: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(|e| e.to_string())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Hᵍ block sizes from multiplicity data", symbolic_blocks),
        ("Hᵍ block sizes against materialized matrices", oracle_blocks),
        ("conductor consistency", conductor_consistency),
        ("H¹ characteristic polynomial", h1_charpoly),
        ("complete functions and cyclotomic products", complete_bijection),
        ("weight filtration conditions and constructions", weight_axioms),
        ("single-block wedge amplitude", onejord),
        ("transform algebra", transform_algebra),
        ("weight gradeds of Hᵍ", weight_bridge),
        ("verify determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
