//! Tamely ramified abelian varieties described by their multiplicity data.
//!
//! An [`AbelianType`] carries the toric, abelian and dual-abelian jump
//! multiplicity functions. Everything else (ranks, base change conductor,
//! monodromy on `H¹` and `Hᵍ`, limit mixed Hodge data) is derived from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, gcd, lcm};
use crate::error::{Error, Result};
use crate::jordan_calc::{jord, JordanSpec};
use crate::linalg::{jordan_chevalley, root_of_unity, Matrix};
use crate::poly::{q_poly, IntPoly};
use crate::qz::{MultFunc, QZElem};
use crate::weight_filt::{weight_filtration, Subspace};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(default)]
    pub residue_char_zero: bool,
    #[serde(default)]
    pub principally_polarized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbelianType {
    pub g: u64,
    pub e: u64,
    #[serde(default)]
    pub tor: MultFunc,
    #[serde(default)]
    pub ab: MultFunc,
    #[serde(default)]
    pub dual_ab: MultFunc,
    #[serde(default)]
    pub flags: Flags,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Degenerate,
    SupportOutsideE,
    DimensionMismatch,
    AbelianNormMismatch,
    AbelianRankMismatch,
    TorNotComplete,
    AbelianSumNotComplete,
    NotReflexive,
}

/// A failed admissibility invariant with its witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// A theorem or consistency check that failed on otherwise valid input.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Finding {
    pub check: String,
    pub message: String,
}

impl Finding {
    pub fn new(check: &str, message: impl Into<String>) -> Finding {
        Finding {
            check: check.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.message)
    }
}

/// Serde helper writing exact rationals as `"a/b"` strings.
pub mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub t: u64,
    pub u: u64,
    pub a: u64,
    pub t_pot: u64,
    pub a_pot: u64,
    #[serde(with = "rational_string")]
    pub c: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HgAnalysis {
    pub pole_candidate: QZElem,
    pub max_block_at_candidate: usize,
    pub global_max_block: usize,
    pub per_eigenvalue: BTreeMap<QZElem, usize>,
    pub findings: Vec<Finding>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MhsSummary {
    pub gr_0: MultFunc,
    pub gr_m1_hodge_10: MultFunc,
    pub gr_m1_hodge_01: MultFunc,
    pub gr_m2: MultFunc,
}

/// Eigenvalue multiplicities of `M_s` on the weight gradeds of `Hᵍ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HgWeightProfile {
    pub graded: BTreeMap<i64, BTreeMap<QZElem, usize>>,
    pub pole_candidate: QZElem,
    /// Largest `α` with the pole candidate present on `Gr_{g+α}`.
    pub top_alpha: Option<i64>,
    pub amplitude: u64,
    pub findings: Vec<Finding>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeReport {
    pub ranks: RankReport,
    #[serde(with = "rational_string")]
    pub conductor: BigRational,
    pub h1: JordanSpec,
    pub hg_per_eigenvalue: BTreeMap<QZElem, usize>,
    pub mhs: Option<MhsSummary>,
    pub findings: Vec<Finding>,
}

fn violation(kind: ViolationKind, message: String) -> Violation {
    Violation { kind, message }
}

impl AbelianType {
    pub fn new(g: u64, e: u64, tor: MultFunc, ab: MultFunc, dual_ab: MultFunc, flags: Flags) -> AbelianType {
        AbelianType {
            g,
            e,
            tor,
            ab,
            dual_ab,
            flags,
        }
    }

    /// `m_A = m_tor + m_ab`.
    pub fn m_a(&self) -> MultFunc {
        self.tor.add(&self.ab)
    }

    /// Whether `m_dual_ab = reflect(m_ab)`; not assumed without the flags.
    pub fn is_reflexive(&self) -> bool {
        self.dual_ab == self.ab.reflect()
    }

    fn ensure_admissible(&self) -> Result<()> {
        let v = validate(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Inadmissible(v))
        }
    }
}

/// Every failed admissibility invariant; empty iff admissible.
pub fn validate(a: &AbelianType) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    if a.g == 0 || a.e == 0 {
        out.push(violation(
            Degenerate,
            format!("g and e must be positive (g = {}, e = {})", a.g, a.e),
        ));
        return out;
    }
    for (name, f) in [("m_tor", &a.tor), ("m_ab", &a.ab), ("m_dual_ab", &a.dual_ab)] {
        let outside: Vec<String> = f.support().filter(|x| !x.in_subgroup(a.e)).map(|x| x.to_string()).collect();
        if !outside.is_empty() {
            out.push(violation(
                SupportOutsideE,
                format!("support of {name} contains {} outside (1/{})Z/Z", outside.join(", "), a.e),
            ));
        }
    }
    let (nt, na, nd) = (a.tor.norm(), a.ab.norm(), a.dual_ab.norm());
    if nt + na != a.g {
        out.push(violation(
            DimensionMismatch,
            format!("‖m_tor‖ + ‖m_ab‖ = {} ≠ g = {}", nt + na, a.g),
        ));
    }
    if na != nd {
        out.push(violation(
            AbelianNormMismatch,
            format!("norm mismatch ‖m_ab‖ = {na} ≠ ‖m_dual_ab‖ = {nd}"),
        ));
    }
    let (a0, d0) = (a.ab.get(&QZElem::ZERO), a.dual_ab.get(&QZElem::ZERO));
    if a0 != d0 {
        out.push(violation(
            AbelianRankMismatch,
            format!("m_ab(0) = {a0} ≠ m_dual_ab(0) = {d0}"),
        ));
    }
    if !a.tor.is_complete() {
        out.push(violation(TorNotComplete, format!("m_tor not complete: {}", a.tor)));
    }
    let sum = a.ab.add(&a.dual_ab);
    if !sum.is_complete() {
        out.push(violation(
            AbelianSumNotComplete,
            format!("m_ab + m_dual_ab not complete: {sum}"),
        ));
    }
    if (a.flags.residue_char_zero || a.flags.principally_polarized) && !a.is_reflexive() {
        let why = if a.flags.residue_char_zero {
            "residue_char_zero"
        } else {
            "principally_polarized"
        };
        out.push(violation(
            NotReflexive,
            format!(
                "m_dual_ab = {} differs from reflect(m_ab) = {} although {why} is set",
                a.dual_ab,
                a.ab.reflect()
            ),
        ));
    }
    out
}

/// Strict-mode warnings: `e` differing from the lcm of the support orders,
/// and `m_ab`, `m_dual_ab` with different mass on some order. The latter
/// passes [`validate`] but some base change then breaks
/// `m_ab(0) = m_dual_ab(0)`.
pub fn strict_warnings(a: &AbelianType) -> Vec<String> {
    let mut out = Vec::new();
    let l = [&a.tor, &a.ab, &a.dual_ab].iter().fold(1, |acc, f| lcm(acc, f.support_lcm()));
    if l != a.e {
        out.push(format!("e = {} differs from the lcm {} of the support orders", a.e, l));
    }
    let mass = |f: &MultFunc| {
        let mut m: BTreeMap<u64, u64> = BTreeMap::new();
        for (x, &v) in f.iter() {
            *m.entry(x.order()).or_default() += v;
        }
        m
    };
    let (ma, md) = (mass(&a.ab), mass(&a.dual_ab));
    if ma != md {
        out.push(format!(
            "m_ab and m_dual_ab differ in mass per order ({ma:?} vs {md:?}); base change can make them disagree at 0"
        ));
    }
    out
}

pub fn ranks(a: &AbelianType) -> Result<RankReport> {
    a.ensure_admissible()?;
    let t = a.tor.get(&QZElem::ZERO);
    let ab0 = a.ab.get(&QZElem::ZERO);
    let u = a.g - t - ab0;
    let nonzero: u64 = a.m_a().iter().filter(|(x, _)| !x.is_zero()).map(|(_, &v)| v).sum();
    if u != nonzero {
        return Err(Error::Inconsistent(format!(
            "u = g − t − a = {u} but Σ_{{x≠0}} m_A(x) = {nonzero}"
        )));
    }
    Ok(RankReport {
        t,
        u,
        a: ab0,
        t_pot: a.tor.norm(),
        a_pot: a.ab.norm(),
        c: conductor(a)?,
    })
}

/// `c(A) = Σ m_A(x)·x` over representatives in `[0, 1)`.
pub fn conductor(a: &AbelianType) -> Result<BigRational> {
    a.ensure_admissible()?;
    let c = a.m_a().weighted_sum();
    let alt = conductor_cormult(a)?;
    if c != alt {
        return Err(Error::Inconsistent(format!(
            "conductor {c} disagrees with the toric/abelian split formula {alt}"
        )));
    }
    Ok(c)
}

/// `c(A) = ½(t_pot − t) + Σ m_ab(x)·x`.
pub fn conductor_cormult(a: &AbelianType) -> Result<BigRational> {
    a.ensure_admissible()?;
    let t_pot = a.tor.norm();
    let t = a.tor.get(&QZElem::ZERO);
    let half = BigRational::new(BigInt::from(t_pot - t), BigInt::from(2));
    Ok(half + a.ab.weighted_sum())
}

/// Base change along a tame extension of degree `n`. Outside residue
/// characteristic zero the caller must assert that `n` is prime to it.
pub fn base_change(a: &AbelianType, n: u64, prime_to_residue_char: bool) -> Result<AbelianType> {
    a.ensure_admissible()?;
    if n == 0 {
        return Err(Error::Parse("base change degree must be positive".into()));
    }
    if !a.flags.residue_char_zero && !prime_to_residue_char {
        return Err(Error::FlagConflict(
            "base change degree must be declared prime to the residue characteristic".into(),
        ));
    }
    let out = AbelianType {
        g: a.g,
        e: a.e / gcd(a.e, n),
        tor: a.tor.pushforward(n),
        ab: a.ab.pushforward(n),
        dual_ab: a.dual_ab.pushforward(n),
        flags: a.flags,
    };
    let v = validate(&out);
    if !v.is_empty() {
        return Err(Error::Inconsistent(format!(
            "base change produced an inadmissible type: {}",
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
        )));
    }
    Ok(out)
}

pub fn product(a: &AbelianType, b: &AbelianType) -> Result<AbelianType> {
    a.ensure_admissible()?;
    b.ensure_admissible()?;
    if a.flags.residue_char_zero != b.flags.residue_char_zero {
        return Err(Error::FlagConflict(
            "factors disagree on residue_char_zero".into(),
        ));
    }
    Ok(AbelianType {
        g: a.g + b.g,
        e: lcm(a.e, b.e),
        tor: a.tor.add(&b.tor),
        ab: a.ab.add(&b.ab),
        dual_ab: a.dual_ab.add(&b.dual_ab),
        flags: Flags {
            residue_char_zero: a.flags.residue_char_zero,
            principally_polarized: a.flags.principally_polarized && b.flags.principally_polarized,
        },
    })
}

/// The dual abelian variety: abelian parts reflected and swapped.
pub fn dual(a: &AbelianType) -> Result<AbelianType> {
    a.ensure_admissible()?;
    Ok(AbelianType {
        ab: a.dual_ab.reflect(),
        dual_ab: a.ab.reflect(),
        ..a.clone()
    })
}

/// `(m_tor, m_ab + m_dual_ab)`, unchanged under isogeny.
pub fn isogeny_key(a: &AbelianType) -> (MultFunc, MultFunc) {
    (a.tor.clone(), a.ab.add(&a.dual_ab))
}

/// Jordan form of the monodromy on `H¹`: `Jord(m_ab + m_dual_ab, m_tor)`.
pub fn h1_monodromy(a: &AbelianType) -> Result<JordanSpec> {
    a.ensure_admissible()?;
    let spec = jord(&a.ab.add(&a.dual_ab), &a.tor);
    debug_assert_eq!(spec.dim() as u64, 2 * a.g);
    Ok(spec)
}

pub fn h1_charpoly(a: &AbelianType) -> Result<IntPoly> {
    a.ensure_admissible()?;
    let exps = a.ab.add(&a.dual_ab).add(&a.tor.times(2));
    let p = q_poly(&exps)?;
    let from_spec = q_poly(&h1_monodromy(a)?.charpoly_exponents())?;
    if p != from_spec || p.degree() != Some(2 * a.g as usize) {
        return Err(Error::Inconsistent(format!(
            "H¹ characteristic polynomial {p} disagrees with its Jordan form ({from_spec})"
        )));
    }
    Ok(p)
}

/// Jordan block sizes of the monodromy on `Hᵍ = Λᵍ H¹`, checked against
/// the expectation `t_pot + 1` at `exp(2πi·c(A))`.
pub fn hg_analysis(a: &AbelianType) -> Result<HgAnalysis> {
    hg_analysis_with(a, &conductor(a)?)
}

/// As [`hg_analysis`], with the conductor supplied by the caller.
pub fn hg_analysis_with(a: &AbelianType, c: &BigRational) -> Result<HgAnalysis> {
    let spec = h1_monodromy(a)?;
    let per = spec.wedge_max_ranks(a.g as usize)?;
    let cand = QZElem::from_rational(c)?;
    let expect = a.tor.norm() as usize + 1;
    let at = per.get(&cand).copied().unwrap_or(0);
    let global = per.values().copied().max().unwrap_or(0);
    let mut findings = Vec::new();
    if at != expect {
        findings.push(Finding::new(
            "hg_block_at_pole",
            format!("largest block at exponent {cand} is {at}, expected t_pot + 1 = {expect}"),
        ));
    }
    if global != expect {
        findings.push(Finding::new(
            "hg_global_max_block",
            format!("largest block on Hᵍ is {global}, expected t_pot + 1 = {expect}"),
        ));
    }
    Ok(HgAnalysis {
        pole_candidate: cand,
        max_block_at_candidate: at,
        global_max_block: global,
        per_eigenvalue: per,
        findings,
    })
}

/// Jordan data of `M_s` on the weight gradeds of the limit mixed Hodge
/// structure on `H₁`, in the complex-analytic setting only.
pub fn mhs_summary(a: &AbelianType) -> Result<MhsSummary> {
    a.ensure_admissible()?;
    if !a.flags.residue_char_zero {
        return Err(Error::NotCharacteristicZero);
    }
    let s = MhsSummary {
        gr_0: a.tor.clone(),
        gr_m1_hodge_10: a.ab.clone(),
        gr_m1_hodge_01: a.dual_ab.clone(),
        gr_m2: a.tor.clone(),
    };
    if s.gr_m1_hodge_10 != s.gr_m1_hodge_01.reflect() {
        return Err(Error::Inconsistent("Hodge symmetry fails on Gr_{-1}".into()));
    }
    Ok(s)
}

/// Weight gradeds of `Hᵍ` from the explicit matrix: the weight filtration of
/// the nilpotent part, centered at `g`, split by eigenvalues of `M_s`.
pub fn hg_weight_profile(a: &AbelianType, cap: usize) -> Result<HgWeightProfile> {
    a.ensure_admissible()?;
    let g = a.g as usize;
    let dim = binomial(2 * g, g);
    if dim > cap {
        return Err(Error::OracleTooLarge { dim, cap });
    }
    let spec = h1_monodromy(a)?;
    let n = spec.conductor();
    let hg = spec.materialize(n)?.wedge(g)?;
    let cands = spec.wedge_spectrum(g)?;
    let (ms, mn) = jordan_chevalley(&hg, &cands)?;
    let filt = weight_filtration(&mn, a.g as i64)?;
    let mut eigenspaces = Vec::new();
    for x in &cands {
        let lambda = root_of_unity(x, n)?;
        let e = Subspace::span_rows(&ms.sub(&Matrix::scalar(dim, &lambda)).kernel());
        if e.dim() > 0 {
            eigenspaces.push((*x, e));
        }
    }
    let mut graded: BTreeMap<i64, BTreeMap<QZElem, usize>> = BTreeMap::new();
    for (x, e) in &eigenspaces {
        let mut prev = 0;
        for i in filt.range() {
            let d = filt.get(i).intersect(e).dim();
            if d > prev {
                graded.entry(i).or_default().insert(*x, d - prev);
            }
            prev = d;
        }
    }
    let cand = QZElem::from_rational(&conductor(a)?)?;
    let top_alpha = graded
        .iter()
        .filter(|(_, m)| m.contains_key(&cand))
        .map(|(&i, _)| i - a.g as i64)
        .max();
    let mut findings = Vec::new();
    let total: usize = graded.values().flat_map(|m| m.values()).sum();
    if total != dim {
        findings.push(Finding::new(
            "hg_weight_gradeds",
            format!("eigenspace gradeds cover {total} of {dim} dimensions"),
        ));
    }
    let t_pot = a.tor.norm() as i64;
    if top_alpha != Some(t_pot) {
        findings.push(Finding::new(
            "hg_weight_top_alpha",
            format!(
                "largest α with exponent {cand} on Gr_(g+α) is {}, expected t_pot = {t_pot}",
                top_alpha.map_or("none".to_string(), |v| v.to_string())
            ),
        ));
    }
    Ok(HgWeightProfile {
        graded,
        pole_candidate: cand,
        top_alpha,
        amplitude: filt.amplitude(),
        findings,
    })
}

/// Ranks, conductor, `H¹` Jordan form, `Hᵍ` block sizes, and (in residue
/// characteristic zero) the limit mixed Hodge data.
pub fn report(a: &AbelianType) -> Result<TypeReport> {
    let ranks = ranks(a)?;
    let hg = hg_analysis(a)?;
    let mhs = if a.flags.residue_char_zero {
        Some(mhs_summary(a)?)
    } else {
        None
    };
    Ok(TypeReport {
        conductor: ranks.c.clone(),
        ranks,
        h1: h1_monodromy(a)?,
        hg_per_eigenvalue: hg.per_eigenvalue,
        mhs,
        findings: hg.findings,
    })
}

/// All exponents occurring in the functions of `a`.
pub fn exponents(a: &AbelianType) -> BTreeSet<QZElem> {
    a.tor.support().chain(a.ab.support()).chain(a.dual_ab.support()).copied().collect()
}

/// `c(A) = 0` iff all jumps sit at 0.
pub fn is_semi_abelian(a: &AbelianType) -> bool {
    a.m_a().support().all(|x| x.is_zero()) && a.dual_ab.support().all(|x| x.is_zero())
}
