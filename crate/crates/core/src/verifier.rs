//! Instance checks of the supporting lemmas and divisibility facts, and the
//! grid sweep that aggregates them with bound reports.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundParams, BoundReport, Family};
use crate::error::{Error, Result};
use crate::lcm_engine::{self, IncrementalState, LcmRecord};
use crate::numeric::{max_power_dividing, max_power_dividing_factorial, pow, Nat, Rat};
use crate::progression::{PrefixWindow, Progression};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    /// `C_{n,0} | L_n`
    #[serde(rename = "l2_1")]
    L2_1,
    /// `L_n >= L_{n,k_n} >= C_{n,k_n} >= u0 (r+1)^n`
    #[serde(rename = "l2_2")]
    L2_2,
    /// `n - k_n > ((l-1)alpha + a - l) r`
    #[serde(rename = "l2_3")]
    L2_3,
    /// `r^e | (n - k_n)!`
    #[serde(rename = "div_factorial")]
    DivFactorial,
    /// `r^e | A_{n,k_n}`
    #[serde(rename = "div_cofactor")]
    DivCofactor,
    /// `n - k_n >= (n-1) r / (r+1)`
    #[serde(rename = "ineq_2_3")]
    Ineq2_3,
    /// `(l alpha r - 1) / (r+1) > (l-1)alpha + a - l`
    #[serde(rename = "ineq_2_5")]
    Ineq2_5,
}

impl LemmaId {
    pub const ALL: [LemmaId; 7] = [
        LemmaId::L2_1,
        LemmaId::L2_2,
        LemmaId::L2_3,
        LemmaId::DivFactorial,
        LemmaId::DivCofactor,
        LemmaId::Ineq2_3,
        LemmaId::Ineq2_5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::L2_1 => "l2_1",
            LemmaId::L2_2 => "l2_2",
            LemmaId::L2_3 => "l2_3",
            LemmaId::DivFactorial => "div_factorial",
            LemmaId::DivCofactor => "div_cofactor",
            LemmaId::Ineq2_3 => "ineq_2_3",
            LemmaId::Ineq2_5 => "ineq_2_5",
        }
    }

    /// Checks that take `(a, l, alpha)`.
    pub fn is_parameterized(self) -> bool {
        matches!(
            self,
            LemmaId::L2_3 | LemmaId::DivFactorial | LemmaId::DivCofactor | LemmaId::Ineq2_5
        )
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "l21" => Ok(LemmaId::L2_1),
            "l22" => Ok(LemmaId::L2_2),
            "l23" => Ok(LemmaId::L2_3),
            "divfactorial" | "divfact" => Ok(LemmaId::DivFactorial),
            "divcofactor" | "divcof" => Ok(LemmaId::DivCofactor),
            "ineq23" => Ok(LemmaId::Ineq2_3),
            "ineq25" => Ok(LemmaId::Ineq2_5),
            _ => Err(Error::InvalidConfig(format!("unknown check {s:?}"))),
        }
    }
}

/// The parameter tuple a verdict was computed for. Unused coordinates are
/// `None`; the derived order is the canonical output order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Instance {
    pub u0: Option<u64>,
    pub r: u64,
    pub n: Option<u64>,
    pub a: Option<u64>,
    pub l: Option<u64>,
    pub alpha: Option<u64>,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(u0) = self.u0 {
            parts.push(format!("u0={u0}"));
        }
        parts.push(format!("r={}", self.r));
        for (name, v) in [("n", self.n), ("a", self.a), ("l", self.l), ("alpha", self.alpha)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Failed,
    /// The check's hypotheses do not hold at this instance.
    Filtered,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaVerdict {
    pub lemma: LemmaId,
    pub instance: Instance,
    pub status: Status,
    /// Both sides of the failed comparison; set iff `status` is `Failed`.
    pub witness: Option<String>,
}

impl LemmaVerdict {
    pub fn ok(&self) -> bool {
        self.status != Status::Failed
    }

    fn decide(lemma: LemmaId, instance: Instance, holds: bool, witness: impl FnOnce() -> String) -> Self {
        let (status, witness) = if holds {
            (Status::Verified, None)
        } else {
            (Status::Failed, Some(format!("{instance}: {}", witness())))
        };
        LemmaVerdict {
            lemma,
            instance,
            status,
            witness,
        }
    }

    fn filtered(lemma: LemmaId, instance: Instance) -> Self {
        LemmaVerdict {
            lemma,
            instance,
            status: Status::Filtered,
            witness: None,
        }
    }
}

fn base_instance(prog: &Progression, n: u64) -> Instance {
    Instance {
        u0: Some(prog.u0()),
        r: prog.r(),
        n: Some(n),
        ..Instance::default()
    }
}

fn param_instance(prog: &Progression, a: u64, l: u64, alpha: u64, n: u64) -> Instance {
    Instance {
        a: Some(a),
        l: Some(l),
        alpha: Some(alpha),
        ..base_instance(prog, n)
    }
}

/// `(l-1) alpha + a - l`, or `None` when the parameters are out of range.
fn exponent(a: u64, l: u64, alpha: u64) -> Option<u64> {
    ((l - 1) * alpha + a).checked_sub(l)
}

/// `alpha >= a >= 2`, `l >= 2`, `r >= max(a, l - 1)`, with no condition on `n`.
fn param_hypotheses(a: u64, l: u64, alpha: u64, r: u64) -> bool {
    a >= 2 && l >= 2 && alpha >= a && r >= a.max(l - 1)
}

fn side_conditions_hold(prog: &Progression, a: u64, l: u64, alpha: u64, n: u64) -> bool {
    param_hypotheses(a, l, alpha, prog.r())
        && n as u128 >= l as u128 * alpha as u128 * prog.r() as u128
}

fn lemma_2_1_with(prog: &Progression, n: u64, l_n: &Nat) -> LemmaVerdict {
    let c = PrefixWindow::new(*prog, n, 0).expect("k = 0").c();
    let quotient = &Rat::from_nat(l_n.clone()) / &c;
    let holds = quotient.is_integer() && quotient.is_positive();
    LemmaVerdict::decide(LemmaId::L2_1, base_instance(prog, n), holds, || {
        format!("L_n={l_n} / C_n0={c} = {quotient} is not a positive integer")
    })
}

pub fn verify_lemma_2_1(prog: &Progression, n: u64) -> LemmaVerdict {
    lemma_2_1_with(prog, n, &lcm_engine::lcm_prefix(prog, n))
}

fn lemma_2_2_with(prog: &Progression, rec: &LcmRecord) -> LemmaVerdict {
    let lower = Nat::from(prog.u0()) * pow(&Nat::from(prog.r() + 1), rec.n);
    let first = rec.l_n >= rec.l_n_kn;
    let second = rec.c_n_kn.cmp_nat(&rec.l_n_kn) != Ordering::Greater;
    let third = rec.c_n_kn.cmp_nat(&lower) != Ordering::Less;
    LemmaVerdict::decide(LemmaId::L2_2, base_instance(prog, rec.n), first && second && third, || {
        format!(
            "k_n={} L_n={} L_n_kn={} C_n_kn={} u0(r+1)^n={} links=[{first},{second},{third}]",
            rec.k_n, rec.l_n, rec.l_n_kn, rec.c_n_kn, lower
        )
    })
}

pub fn verify_lemma_2_2(prog: &Progression, n: u64) -> Result<LemmaVerdict> {
    Ok(lemma_2_2_with(prog, &lcm_engine::record(prog, n)?))
}

pub fn verify_ineq_2_3(prog: &Progression, n: u64) -> LemmaVerdict {
    let (r, k) = (prog.r() as u128, prog.shift_index(n) as u128);
    let n_wide = n as u128;
    let lhs = (n_wide - k) * (r + 1);
    let rhs = n_wide.saturating_sub(1) * r;
    LemmaVerdict::decide(LemmaId::Ineq2_3, base_instance(prog, n), lhs >= rhs, || {
        format!("(n-k_n)(r+1)={lhs} < (n-1)r={rhs}")
    })
}

pub fn verify_lemma_2_3(prog: &Progression, a: u64, l: u64, alpha: u64, n: u64) -> LemmaVerdict {
    let instance = param_instance(prog, a, l, alpha, n);
    if !side_conditions_hold(prog, a, l, alpha, n) {
        return LemmaVerdict::filtered(LemmaId::L2_3, instance);
    }
    let e = exponent(a, l, alpha).expect("hypotheses bound the exponent");
    let lhs = n - prog.shift_index(n);
    let rhs = e as u128 * prog.r() as u128;
    LemmaVerdict::decide(LemmaId::L2_3, instance, lhs as u128 > rhs, || {
        format!("n-k_n={lhs} <= ((l-1)alpha+a-l)r={rhs}")
    })
}

/// Cross-multiplied form `l alpha r - 1 > ((l-1) alpha + a - l)(r + 1)`.
pub fn verify_ineq_2_5(a: u64, l: u64, alpha: u64, r: u64) -> LemmaVerdict {
    let instance = Instance {
        r,
        a: Some(a),
        l: Some(l),
        alpha: Some(alpha),
        ..Instance::default()
    };
    if !param_hypotheses(a, l, alpha, r) {
        return LemmaVerdict::filtered(LemmaId::Ineq2_5, instance);
    }
    let e = exponent(a, l, alpha).expect("hypotheses bound the exponent") as u128;
    let lhs = l as u128 * alpha as u128 * r as u128 - 1;
    let rhs = e * (r as u128 + 1);
    LemmaVerdict::decide(LemmaId::Ineq2_5, instance, lhs > rhs, || {
        format!("l*alpha*r-1={lhs} <= ((l-1)alpha+a-l)(r+1)={rhs}")
    })
}

pub fn verify_div_factorial(prog: &Progression, a: u64, l: u64, alpha: u64, n: u64) -> LemmaVerdict {
    let instance = param_instance(prog, a, l, alpha, n);
    if prog.r() == 1 {
        return LemmaVerdict::decide(LemmaId::DivFactorial, instance, true, String::new);
    }
    if !side_conditions_hold(prog, a, l, alpha, n) {
        return LemmaVerdict::filtered(LemmaId::DivFactorial, instance);
    }
    let e = exponent(a, l, alpha).expect("hypotheses bound the exponent");
    let m = n - prog.shift_index(n);
    let v = max_power_dividing_factorial(&Nat::from(prog.r()), m).expect("r >= 2");
    LemmaVerdict::decide(LemmaId::DivFactorial, instance, v >= e, || {
        format!("largest power of r dividing (n-k_n)!={m}! is {v} < {e}")
    })
}

fn div_cofactor_at(
    prog: &Progression,
    a: u64,
    l: u64,
    alpha: u64,
    n: u64,
    cofactor: impl FnOnce() -> Result<Nat>,
) -> Result<LemmaVerdict> {
    let instance = param_instance(prog, a, l, alpha, n);
    if prog.r() == 1 {
        return Ok(LemmaVerdict::decide(LemmaId::DivCofactor, instance, true, String::new));
    }
    if !side_conditions_hold(prog, a, l, alpha, n) {
        return Ok(LemmaVerdict::filtered(LemmaId::DivCofactor, instance));
    }
    let e = exponent(a, l, alpha).expect("hypotheses bound the exponent");
    let a_n_kn = cofactor()?;
    let v = max_power_dividing(&Nat::from(prog.r()), &a_n_kn)?;
    Ok(LemmaVerdict::decide(LemmaId::DivCofactor, instance, v >= e, || {
        format!("A_n_kn={a_n_kn} has r-adic valuation {v} < {e}")
    }))
}

/// Fails with [`Error::Integrality`] if `A_{n,k_n}` is not an integer.
pub fn verify_div_cofactor(prog: &Progression, a: u64, l: u64, alpha: u64, n: u64) -> Result<LemmaVerdict> {
    div_cofactor_at(prog, a, l, alpha, n, || Ok(lcm_engine::record(prog, n)?.a_n_kn))
}

/// Inclusive integer range. Deserializes from `"lo..hi"`, `"v"`, `v`, or
/// `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RangeRepr", into = "String")]
pub struct IntRange {
    pub lo: u64,
    pub hi: u64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RangeRepr {
    Single(u64),
    Pair([u64; 2]),
    Text(String),
}

impl TryFrom<RangeRepr> for IntRange {
    type Error = Error;
    fn try_from(repr: RangeRepr) -> Result<Self> {
        match repr {
            RangeRepr::Single(v) => Ok(IntRange::single(v)),
            RangeRepr::Pair([lo, hi]) => Ok(IntRange { lo, hi }),
            RangeRepr::Text(s) => s.parse(),
        }
    }
}

impl From<IntRange> for String {
    fn from(range: IntRange) -> String {
        range.to_string()
    }
}

impl IntRange {
    pub fn new(lo: u64, hi: u64) -> Self {
        IntRange { lo, hi }
    }

    pub fn single(v: u64) -> Self {
        IntRange { lo: v, hi: v }
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.lo..=self.hi
    }

    fn validate(&self, name: &str, min: u64) -> Result<()> {
        if self.lo > self.hi {
            return Err(Error::InvalidConfig(format!("{name} range {self} is empty")));
        }
        if self.lo < min {
            return Err(Error::InvalidConfig(format!("{name} must be at least {min}, got {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for IntRange {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("malformed range {s:?}; expected lo..hi or a single value"));
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
        match s.split_once("..") {
            Some((lo, hi)) => Ok(IntRange {
                lo: parse(lo)?,
                hi: parse(hi.strip_prefix('=').unwrap_or(hi))?,
            }),
            None => Ok(IntRange::single(parse(s)?)),
        }
    }
}

fn default_two() -> IntRange {
    IntRange::single(2)
}

/// Grid description. `n` is either an absolute range (`n_range`) or a
/// window of `n_window` steps past each cell's own threshold (`l alpha r`
/// for the parameterized checks and the new family, `2 alpha r`,
/// `r^alpha + 1`, or `1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub u0_range: IntRange,
    pub r_range: IntRange,
    #[serde(default)]
    pub n_range: Option<IntRange>,
    #[serde(default)]
    pub n_window: Option<u64>,
    #[serde(default = "default_two")]
    pub a_range: IntRange,
    #[serde(default = "default_two")]
    pub l_range: IntRange,
    #[serde(default = "default_two")]
    pub alpha_range: IntRange,
    #[serde(default)]
    pub families: Vec<Family>,
    #[serde(default)]
    pub checks: Vec<LemmaId>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.u0_range.validate("u0", 1)?;
        self.r_range.validate("r", 1)?;
        self.a_range.validate("a", 2)?;
        self.l_range.validate("l", 2)?;
        self.alpha_range.validate("alpha", 1)?;
        match (self.n_range, self.n_window) {
            (Some(range), None) => range.validate("n", 1),
            (None, Some(_)) => Ok(()),
            _ => Err(Error::InvalidConfig(
                "exactly one of n_range and n_window must be set".into(),
            )),
        }
    }

    /// `n` values for a cell whose own threshold is `threshold`.
    fn n_values(&self, threshold: Option<u64>) -> Vec<u64> {
        match (self.n_range, self.n_window) {
            (Some(range), _) => range.iter().collect(),
            (None, Some(w)) => match threshold {
                Some(t) => (t..=t.saturating_add(w)).collect(),
                None => Vec::new(),
            },
            (None, None) => Vec::new(),
        }
    }
}

/// Identifies one bound-report cell; ordering is the canonical output order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub u0: u64,
    pub r: u64,
    pub n: u64,
    pub family: Family,
    pub a: Option<u64>,
    pub l: Option<u64>,
    pub alpha: Option<u64>,
}

impl CellKey {
    pub fn of(report: &BoundReport) -> Self {
        CellKey {
            u0: report.prog.u0(),
            r: report.prog.r(),
            n: report.n,
            family: report.params.family(),
            a: report.params.a(),
            l: report.params.l(),
            alpha: report.params.alpha(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinGap {
    pub cell: CellKey,
    pub gap_log: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub total_cells: u64,
    pub hypothesis_filtered: u64,
    pub verified: u64,
    pub failed: u64,
    /// `(u0, r)` pairs dropped for sharing a factor; not counted in `total_cells`.
    pub coprime_skipped: u64,
    pub reports: Vec<BoundReport>,
    pub verdicts: Vec<LemmaVerdict>,
    pub min_gap: Option<MinGap>,
}

impl SweepOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &LemmaVerdict> {
        self.verdicts.iter().filter(|v| v.status == Status::Failed)
    }
}

enum Task {
    Bound(BoundParams),
    Plain(LemmaId),
    Param(LemmaId, u64, u64, u64),
}

impl Task {
    fn needs_record(&self) -> bool {
        matches!(self, Task::Plain(LemmaId::L2_2) | Task::Param(LemmaId::DivCofactor, ..))
    }
}

struct UnitResult {
    reports: Vec<BoundReport>,
    verdicts: Vec<LemmaVerdict>,
}

fn plan_unit(config: &SweepConfig, prog: &Progression) -> BTreeMap<u64, Vec<Task>> {
    let mut plan: BTreeMap<u64, Vec<Task>> = BTreeMap::new();
    let mut add = |ns: Vec<u64>, make: &dyn Fn() -> Task| {
        for n in ns {
            plan.entry(n).or_default().push(make());
        }
    };

    for &check in &config.checks {
        if !check.is_parameterized() {
            add(config.n_values(Some(1)), &|| Task::Plain(check));
        }
    }
    for &family in &config.families {
        let combos: Vec<BoundParams> = match family {
            Family::Nair => vec![BoundParams::nair()],
            Family::HyT11 => config
                .alpha_range
                .iter()
                .filter_map(|alpha| BoundParams::hy_t11(alpha).ok())
                .collect(),
            Family::HkT12 => config
                .a_range
                .iter()
                .flat_map(|a| config.alpha_range.iter().map(move |alpha| (a, alpha)))
                .filter_map(|(a, alpha)| BoundParams::hk_t12(a, alpha).ok())
                .collect(),
            Family::NewT13 => config
                .a_range
                .iter()
                .flat_map(|a| config.l_range.iter().map(move |l| (a, l)))
                .flat_map(|(a, l)| config.alpha_range.iter().map(move |alpha| (a, l, alpha)))
                .filter_map(|(a, l, alpha)| BoundParams::new_t13(a, l, alpha).ok())
                .collect(),
        };
        for params in combos {
            add(config.n_values(params.n_threshold(prog)), &|| Task::Bound(params));
        }
    }
    for &check in &config.checks {
        if !check.is_parameterized() || check == LemmaId::Ineq2_5 {
            continue;
        }
        for a in config.a_range.iter() {
            for l in config.l_range.iter() {
                for alpha in config.alpha_range.iter() {
                    let threshold = l.checked_mul(alpha).and_then(|x| x.checked_mul(prog.r()));
                    add(config.n_values(threshold), &|| Task::Param(check, a, l, alpha));
                }
            }
        }
    }
    plan
}

fn run_unit(config: &SweepConfig, prog: Progression) -> Result<UnitResult> {
    let mut out = UnitResult {
        reports: Vec::new(),
        verdicts: Vec::new(),
    };

    if config.checks.contains(&LemmaId::Ineq2_5) {
        for a in config.a_range.iter() {
            for l in config.l_range.iter() {
                for alpha in config.alpha_range.iter() {
                    let mut v = verify_ineq_2_5(a, l, alpha, prog.r());
                    v.instance.u0 = Some(prog.u0());
                    out.verdicts.push(v);
                }
            }
        }
    }

    let plan = plan_unit(config, &prog);
    let mut state = IncrementalState::start(prog);
    for (&n, tasks) in &plan {
        while state.n() < n {
            state = state.extend();
        }
        let l_n = state.l_n();
        let record = if n >= 1 && tasks.iter().any(Task::needs_record) {
            Some(lcm_engine::record_with_prefix(&prog, n, l_n.clone())?)
        } else {
            None
        };
        for task in tasks {
            match *task {
                Task::Bound(params) => out.reports.push(bounds::check(&params, &prog, n, l_n)),
                Task::Plain(LemmaId::L2_1) => out.verdicts.push(lemma_2_1_with(&prog, n, l_n)),
                Task::Plain(LemmaId::L2_2) => {
                    out.verdicts.push(lemma_2_2_with(&prog, record.as_ref().expect("planned")))
                }
                Task::Plain(LemmaId::Ineq2_3) => out.verdicts.push(verify_ineq_2_3(&prog, n)),
                Task::Param(LemmaId::L2_3, a, l, alpha) => {
                    out.verdicts.push(verify_lemma_2_3(&prog, a, l, alpha, n))
                }
                Task::Param(LemmaId::DivFactorial, a, l, alpha) => {
                    out.verdicts.push(verify_div_factorial(&prog, a, l, alpha, n))
                }
                Task::Param(LemmaId::DivCofactor, a, l, alpha) => {
                    let rec = record.as_ref().expect("planned");
                    out.verdicts.push(div_cofactor_at(&prog, a, l, alpha, n, || Ok(rec.a_n_kn.clone()))?)
                }
                Task::Plain(_) | Task::Param(..) => unreachable!("planner routes each lemma once"),
            }
        }
    }
    Ok(out)
}

fn units(config: &SweepConfig) -> (Vec<Progression>, u64) {
    let mut progs = Vec::new();
    let mut skipped = 0;
    for u0 in config.u0_range.iter() {
        for r in config.r_range.iter() {
            match Progression::new(u0, r) {
                Ok(p) => progs.push(p),
                Err(_) => skipped += 1,
            }
        }
    }
    (progs, skipped)
}

fn aggregate(results: Vec<UnitResult>, coprime_skipped: u64) -> SweepOutcome {
    let mut reports: Vec<BoundReport> = Vec::new();
    let mut verdicts: Vec<LemmaVerdict> = Vec::new();
    for unit in results {
        reports.extend(unit.reports);
        verdicts.extend(unit.verdicts);
    }
    reports.sort_by_key(CellKey::of);
    verdicts.sort_by_key(|v| (v.instance, v.lemma));

    let mut outcome = SweepOutcome {
        total_cells: (reports.len() + verdicts.len()) as u64,
        hypothesis_filtered: 0,
        verified: 0,
        failed: 0,
        coprime_skipped,
        reports: Vec::new(),
        verdicts: Vec::new(),
        min_gap: None,
    };
    for rep in &reports {
        match rep.holds {
            None => outcome.hypothesis_filtered += 1,
            Some(true) => outcome.verified += 1,
            Some(false) => outcome.failed += 1,
        }
        if let Some(gap) = rep.gap_log {
            if outcome.min_gap.as_ref().is_none_or(|m| gap < m.gap_log) {
                outcome.min_gap = Some(MinGap {
                    cell: CellKey::of(rep),
                    gap_log: gap,
                });
            }
        }
    }
    for v in &verdicts {
        match v.status {
            Status::Filtered => outcome.hypothesis_filtered += 1,
            Status::Verified => outcome.verified += 1,
            Status::Failed => outcome.failed += 1,
        }
    }
    outcome.reports = reports;
    outcome.verdicts = verdicts;
    outcome
}

/// Runs the grid on the calling thread.
pub fn sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    sweep_with_jobs(config, 1)
}

/// Runs the grid with one work unit per coprime `(u0, r)` spread over `jobs`
/// threads. Output order does not depend on `jobs`.
pub fn sweep_with_jobs(config: &SweepConfig, jobs: usize) -> Result<SweepOutcome> {
    config.validate()?;
    let mut config = config.clone();
    config.families.sort();
    config.families.dedup();
    config.checks.sort();
    config.checks.dedup();
    let config = &config;
    let (progs, skipped) = units(config);
    let results = if jobs <= 1 {
        progs
            .into_iter()
            .map(|p| run_unit(config, p))
            .collect::<Result<Vec<_>>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start {jobs} workers: {e}")))?;
        pool.install(|| {
            progs
                .into_par_iter()
                .map(|p| run_unit(config, p))
                .collect::<Result<Vec<_>>>()
        })?
    };
    Ok(aggregate(results, skipped))
}
