//! Randomized verification harness.
//!
//! Case `k` draws everything from a ChaCha stream `k` of the seed, so results
//! do not depend on scheduling; cases run in parallel and merge by index.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abvar::{self, AbelianType, Finding};
use crate::arith::binomial;
use crate::error::{Error, Result};
use crate::jordan_calc::{single_block_wedge_amplitude, JordanBlock, JordanSpec};
use crate::linalg::{jordan_chevalley, jordan_profile, CycloElem};
use crate::poly::{factor_cyclotomic, q_poly};
use crate::qz::QZElem;
use crate::random::{self, TypeCaps};
use crate::weight_filt::weight_filtration;

/// Deliberate defects used to check that the harness notices them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Drops the toric part of the conductor sum.
    CorruptConductor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub seed: u64,
    pub cases: u64,
    pub max_g: u64,
    pub max_e: u64,
    /// Largest `C(2g, g)` for which `Hᵍ` is built explicitly.
    pub oracle_cap: usize,
    pub mutation: Option<Mutation>,
}

impl HarnessConfig {
    pub fn new(seed: u64, cases: u64) -> HarnessConfig {
        HarnessConfig {
            seed,
            cases,
            max_g: 4,
            max_e: 12,
            oracle_cap: 20,
            mutation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CaseFinding {
    pub case: u64,
    pub check: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub config: HarnessConfig,
    /// Number of times each check ran.
    pub checks: BTreeMap<String, u64>,
    pub findings: Vec<CaseFinding>,
}

impl HarnessReport {
    pub fn total_checks(&self) -> u64 {
        self.checks.values().sum()
    }
}

#[derive(Default)]
struct Case {
    checks: BTreeMap<&'static str, u64>,
    findings: Vec<Finding>,
}

impl Case {
    fn check(&mut self, name: &'static str, ok: bool, msg: impl FnOnce() -> String) {
        *self.checks.entry(name).or_insert(0) += 1;
        if !ok {
            self.findings.push(Finding::new(name, msg()));
        }
    }

    /// Runs a group of checks; an error is itself a finding.
    fn group(&mut self, name: &'static str, f: impl FnOnce(&mut Case) -> Result<()>) {
        if let Err(e) = f(self) {
            *self.checks.entry(name).or_insert(0) += 1;
            self.findings.push(Finding::new(name, format!("error: {e}")));
        }
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn harness_conductor(a: &AbelianType, mutation: Option<Mutation>) -> Result<BigRational> {
    match mutation {
        None => abvar::conductor(a),
        Some(Mutation::CorruptConductor) => Ok(a.ab.weighted_sum()),
    }
}

pub fn verify_harness(cfg: &HarnessConfig) -> HarnessReport {
    let per_case: Vec<Case> = (0..cfg.cases).into_par_iter().map(|k| run_case(cfg, k)).collect();
    let mut checks = BTreeMap::new();
    let mut findings = Vec::new();
    for (k, case) in per_case.into_iter().enumerate() {
        for (name, n) in case.checks {
            *checks.entry(name.to_string()).or_insert(0) += n;
        }
        findings.extend(case.findings.into_iter().map(|f| CaseFinding {
            case: k as u64,
            check: f.check,
            message: f.message,
        }));
    }
    HarnessReport {
        config: cfg.clone(),
        checks,
        findings,
    }
}

fn case_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

fn run_case(cfg: &HarnessConfig, k: u64) -> Case {
    let mut rng = case_rng(cfg.seed, k);
    let caps = TypeCaps {
        max_g: cfg.max_g,
        max_e: cfg.max_e,
    };
    let a = random::random_type(&mut rng, caps);
    let b = random::random_type(&mut rng, caps);
    let mut case = Case::default();

    let violations = abvar::validate(&a);
    case.check("generator_admissible", violations.is_empty(), || {
        format!("{a:?}: {violations:?}")
    });
    if !violations.is_empty() {
        return case;
    }

    case.group("type_invariants", |c| check_type(c, &a, cfg));
    case.group("transforms", |c| check_transforms(c, &a, &b, &mut rng));
    case.group("cyclotomic_roundtrip", |c| {
        let f = random::random_complete_function(&mut rng, 60, 3, 2);
        let back = factor_cyclotomic(&q_poly(&f)?)?.to_mult_func();
        c.check("qpoly_roundtrip", back == f, || format!("{f} ↦ {back}"));
        Ok(())
    });
    case.group("weight_filtration", |c| check_weights(c, &mut rng));
    case.group("onejord", |c| {
        let m = rng.gen_range(1..=6);
        let j = rng.gen_range(1..=m);
        let d = rng.gen_range(1..=4);
        let x = QZElem::frac(rng.gen_range(0..d), d);
        let amp = wedge_block_amplitude(m, j, x)?;
        let expect = single_block_wedge_amplitude(m as u64, j as u64)?;
        c.check("onejord_amplitude", amp == expect, || {
            format!("Λ^{j} Jord_{m}({x}): amplitude {amp}, formula {expect}")
        });
        Ok(())
    });
    case
}

fn check_type(c: &mut Case, a: &AbelianType, cfg: &HarnessConfig) -> Result<()> {
    let r = abvar::ranks(a)?;
    c.check("rank_sum", r.t + r.u + r.a == a.g, || format!("{r:?} for g = {}", a.g));
    c.check(
        "rank_bounds",
        r.t <= r.t_pot && r.a <= r.a_pot && r.t_pot + r.a_pot == a.g,
        || format!("{r:?} for g = {}", a.g),
    );

    let cond = harness_conductor(a, cfg.mutation)?;
    let alt = abvar::conductor_cormult(a)?;
    c.check("conductor_cormult", cond == alt, || format!("{cond} ≠ {alt} for {a:?}"));
    if r.a_pot == 0 {
        let half_u = rat(r.u as i64, 2);
        c.check("conductor_u_half", cond == half_u, || format!("{cond} ≠ u/2 = {half_u}"));
    }
    c.check(
        "conductor_range",
        cond >= BigRational::zero() && cond < rat(a.g as i64, 1),
        || format!("{cond} outside [0, {})", a.g),
    );
    c.check(
        "conductor_zero_iff_semi_abelian",
        cond.is_zero() == abvar::is_semi_abelian(a),
        || format!("conductor {cond} for {a:?}"),
    );

    let hg = abvar::hg_analysis_with(a, &cond)?;
    c.check("hg_block_size", hg.findings.is_empty(), || {
        hg.findings.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ")
    });

    let spec = abvar::h1_monodromy(a)?;
    let twos: usize = spec.blocks().iter().filter(|b| b.size == 2).map(|b| b.count).sum();
    c.check(
        "h1_shape",
        spec.dim() as u64 == 2 * a.g && twos as u64 == a.tor.norm() && spec.max_block() <= 2,
        || format!("{spec}"),
    );

    let cp = abvar::h1_charpoly(a)?;
    let exps = a.ab.add(&a.dual_ab).add(&a.tor.times(2));
    let back = factor_cyclotomic(&cp)?.to_mult_func();
    c.check("h1_charpoly_factor", back == exps, || format!("{cp} factors as {back}, expected {exps}"));

    let n = spec.conductor();
    if 2 * a.g <= 8 {
        let m = spec.materialize(n)?;
        let oracle: Vec<Option<BigRational>> = m.charpoly().iter().map(CycloElem::as_rational).collect();
        let expect: Vec<Option<BigRational>> = cp.coeffs().iter().map(|x| Some(BigRational::from_integer(x.clone()))).collect();
        c.check("h1_charpoly_oracle", oracle == expect, || format!("{cp} vs {oracle:?}"));
    }

    let g = a.g as usize;
    if binomial(2 * g, g) <= cfg.oracle_cap {
        let hgm = spec.materialize(n)?.wedge(g)?;
        let prof = jordan_profile(&hgm, &spec.wedge_spectrum(g)?)?;
        c.check("hg_oracle", prof.max_blocks() == hg.per_eigenvalue, || {
            format!("oracle {:?} vs symbolic {:?}", prof.max_blocks(), hg.per_eigenvalue)
        });
        let wp = abvar::hg_weight_profile(a, cfg.oracle_cap)?;
        c.check("hg_weight_top_alpha", wp.findings.is_empty(), || {
            wp.findings.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ")
        });
        c.check(
            "hg_weight_amplitude",
            wp.amplitude as usize + 1 == hg.global_max_block,
            || format!("amplitude {} vs max block {}", wp.amplitude, hg.global_max_block),
        );
    }

    if a.flags.residue_char_zero {
        let s = abvar::mhs_summary(a)?;
        let total = s.gr_0.norm() + s.gr_m1_hodge_10.norm() + s.gr_m1_hodge_01.norm() + s.gr_m2.norm();
        c.check(
            "mhs_summary",
            total == 2 * a.g && s.gr_m1_hodge_10 == s.gr_m1_hodge_01.reflect(),
            || format!("{s:?}"),
        );
    }
    Ok(())
}

fn check_transforms(c: &mut Case, a: &AbelianType, b: &AbelianType, rng: &mut ChaCha8Rng) -> Result<()> {
    let d = abvar::dual(a)?;
    c.check(
        "dual_involution",
        abvar::validate(&d).is_empty() && abvar::dual(&d)? == *a,
        || format!("{a:?} ↦ {d:?}"),
    );
    c.check("dual_isogeny_key", abvar::isogeny_key(&d) == abvar::isogeny_key(a), || {
        format!("{a:?}")
    });

    if a.flags.residue_char_zero == b.flags.residue_char_zero {
        let p = abvar::product(a, b)?;
        let (ra, rb, rp) = (abvar::ranks(a)?, abvar::ranks(b)?, abvar::ranks(&p)?);
        let (ka, kb, kp) = (abvar::isogeny_key(a), abvar::isogeny_key(b), abvar::isogeny_key(&p));
        c.check(
            "product_linearity",
            abvar::validate(&p).is_empty()
                && rp.c == ra.c.clone() + rb.c.clone()
                && (rp.t, rp.u, rp.a, rp.t_pot, rp.a_pot)
                    == (ra.t + rb.t, ra.u + rb.u, ra.a + rb.a, ra.t_pot + rb.t_pot, ra.a_pot + rb.a_pot)
                && kp == (ka.0.add(&kb.0), ka.1.add(&kb.1)),
            || format!("{a:?} × {b:?}"),
        );
    } else {
        c.check(
            "product_flag_conflict",
            matches!(abvar::product(a, b), Err(Error::FlagConflict(_))),
            || "mismatched residue characteristic flags accepted".into(),
        );
    }

    let m = rng.gen_range(1..=6);
    let n = rng.gen_range(1..=6);
    let am = abvar::base_change(a, m, true)?;
    let amn = abvar::base_change(&am, n, true)?;
    let direct = abvar::base_change(a, m * n, true)?;
    c.check("base_change_composition", amn == direct, || format!("{a:?} by {m} then {n}"));
    c.check(
        "base_change_complete",
        abvar::validate(&am).is_empty() && am.tor.is_complete() && am.ab.add(&am.dual_ab).is_complete(),
        || format!("{am:?}"),
    );
    let s = abvar::base_change(a, a.e, true)?;
    let exps = abvar::h1_monodromy(&s)?.exponents();
    c.check(
        "base_change_semi_abelian",
        abvar::conductor(&s)?.is_zero() && exps.iter().all(|x| x.is_zero()),
        || format!("{s:?}"),
    );
    Ok(())
}

fn sums(a: &BTreeSet<QZElem>, b: &BTreeSet<QZElem>) -> BTreeSet<QZElem> {
    a.iter().flat_map(|x| b.iter().map(move |y| x.add(y))).collect()
}

fn check_weights(c: &mut Case, rng: &mut ChaCha8Rng) -> Result<()> {
    let (n, sizes) = random::random_nilpotent(rng, 6);
    let w = rng.gen_range(-3..=3);
    let f = weight_filtration(&n, w)?;
    c.check("weight_conditions", f.satisfies_conditions(&n), || format!("{sizes:?}"));
    let top = *sizes.iter().max().unwrap() as u64;
    c.check("weight_amplitude", f.amplitude() + 1 == top, || {
        format!("amplitude {} for blocks {sizes:?}", f.amplitude())
    });
    let symmetric = (0..=6).all(|a| f.graded_dim(w + a) == f.graded_dim(w - a));
    c.check("weight_symmetry", symmetric, || format!("{:?}", f.graded_dims()));
    let dual_op = weight_filtration(&n.transpose().neg(), -w)?;
    c.check("weight_dual", f.dual() == dual_op, || format!("blocks {sizes:?}"));

    let (m1, s1) = random::random_quasi_unipotent(rng, 4, 4);
    let (m2, s2) = random::random_quasi_unipotent(rng, 3, 4);
    let (w1, w2) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
    let f1 = weight_filtration(&jordan_chevalley(&m1, &s1.exponents())?.1, w1)?;
    let f2 = weight_filtration(&jordan_chevalley(&m2, &s2.exponents())?.1, w2)?;
    let (_, np) = jordan_chevalley(&m1.kron(&m2), &sums(&s1.exponents(), &s2.exponents()))?;
    c.check("weight_tensor", f1.tensor(&f2) == weight_filtration(&np, w1 + w2)?, || {
        format!("{s1} ⊗ {s2}")
    });
    let j = rng.gen_range(1..=m1.rows());
    let cands = s1.wedge_spectrum(j)?;
    let (_, nw) = jordan_chevalley(&m1.wedge(j)?, &cands)?;
    c.check("weight_wedge", f1.wedge(j)? == weight_filtration(&nw, w1 * j as i64)?, || {
        format!("Λ^{j} of {s1}")
    });
    Ok(())
}

/// Amplitude of the weight filtration of the nilpotent part of
/// `Λ^j Jord_m(exp(2πi·x))`, from the explicit matrix.
pub fn wedge_block_amplitude(m: usize, j: usize, x: QZElem) -> Result<u64> {
    let spec = JordanSpec::new([JordanBlock {
        exponent: x,
        size: m,
        count: 1,
    }])?;
    let w = spec.materialize(spec.conductor())?.wedge(j)?;
    let (_, n) = jordan_chevalley(&w, &BTreeSet::from([x.scale(j as u64)]))?;
    Ok(weight_filtration(&n, 0)?.amplitude())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneJordRow {
    pub m: u64,
    pub j: u64,
    pub brute_force: u64,
    /// `j(m − j)`.
    pub formula: u64,
    /// `m(m − j)`.
    pub alternative: u64,
}

impl OneJordRow {
    pub fn formula_holds(&self) -> bool {
        self.brute_force == self.formula
    }

    pub fn alternative_holds(&self) -> bool {
        self.brute_force == self.alternative
    }
}

/// Brute-force amplitudes of `Λ^j Jord_m(ξ)` for `1 ≤ j ≤ m ≤ max_m`,
/// compared with `j(m − j)` and with `m(m − j)`.
pub fn onejord_table(max_m: u64, x: QZElem) -> Result<Vec<OneJordRow>> {
    let pairs: Vec<(u64, u64)> = (1..=max_m).flat_map(|m| (1..=m).map(move |j| (m, j))).collect();
    pairs
        .into_par_iter()
        .map(|(m, j)| {
            Ok(OneJordRow {
                m,
                j,
                brute_force: wedge_block_amplitude(m as usize, j as usize, x)?,
                formula: single_block_wedge_amplitude(m, j)?,
                alternative: m * (m - j),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_has_no_findings() {
        let r = verify_harness(&HarnessConfig::new(42, 30));
        assert!(r.findings.is_empty(), "{:?}", r.findings);
        assert!(r.checks["hg_block_size"] == 30);
        assert!(r.checks.contains_key("hg_oracle"));
        assert!(r.checks.contains_key("weight_tensor"));
    }

    #[test]
    fn corrupted_conductor_is_detected() {
        let mut cfg = HarnessConfig::new(42, 30);
        cfg.mutation = Some(Mutation::CorruptConductor);
        let r = verify_harness(&cfg);
        assert!(r.findings.iter().any(|f| f.check == "conductor_cormult"));
    }

    #[test]
    fn zero_cases() {
        let r = verify_harness(&HarnessConfig::new(1, 0));
        assert!(r.findings.is_empty());
        assert_eq!(r.total_checks(), 0);
    }

    #[test]
    fn deterministic() {
        let cfg = HarnessConfig::new(9, 12);
        assert_eq!(
            serde_json::to_string(&verify_harness(&cfg)).unwrap(),
            serde_json::to_string(&verify_harness(&cfg)).unwrap()
        );
    }

    #[test]
    fn small_onejord_table() {
        let rows = onejord_table(4, QZElem::frac(1, 3)).unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows.iter().all(OneJordRow::formula_holds));
        let r = rows.iter().find(|r| r.m == 3 && r.j == 2).unwrap();
        assert_eq!((r.brute_force, r.alternative), (2, 3));
        assert!(!r.alternative_holds());
    }
}
