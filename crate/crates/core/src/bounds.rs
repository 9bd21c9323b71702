//! Lower-bound families for `L_n` and their hypothesis predicates.
//!
//! | family    | hypothesis                                   | bound                               |
//! |-----------|----------------------------------------------|-------------------------------------|
//! | `Nair`    | `u0 = r = 1`, `n >= 1`                        | `2^n` (`lcm(1..n+1) >= 2^n`)        |
//! | `HyT11`   | `alpha >= 1`, `n > r^alpha`                   | `u0 r^alpha (r+1)^n`                |
//! | `HkT12`   | `alpha, r >= a >= 2`, `n >= 2 alpha r`        | `u0 r^(alpha+a-2) (r+1)^n`          |
//! | `NewT13`  | `alpha >= a >= 2`, `l >= 2`, `r >= max(a, l-1)`, `n >= l alpha r` | `u0 r^((l-1)alpha+a-l) (r+1)^n` |
//!
//! `NewT13` with `l = 3` is the `2 alpha + a - 3` bound; there is no separate
//! family for it.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ln_ratio, pow, Nat};
use crate::progression::Progression;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Nair,
    HyT11,
    HkT12,
    NewT13,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Nair, Family::HyT11, Family::HkT12, Family::NewT13];

    pub fn name(self) -> &'static str {
        match self {
            Family::Nair => "nair",
            Family::HyT11 => "hy_t11",
            Family::HkT12 => "hk_t12",
            Family::NewT13 => "new_t13",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nair" => Ok(Family::Nair),
            "hy" | "hy_t11" | "t11" => Ok(Family::HyT11),
            "hk" | "hk_t12" | "t12" => Ok(Family::HkT12),
            "new" | "new_t13" | "t13" => Ok(Family::NewT13),
            other => Err(Error::InvalidParams(format!("unknown family {other:?}"))),
        }
    }
}

/// A family together with its `(a, l, alpha)` parameters. Fields that a
/// family does not use are `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundParams {
    family: Family,
    a: Option<u64>,
    l: Option<u64>,
    alpha: Option<u64>,
}

impl BoundParams {
    pub fn nair() -> Self {
        BoundParams {
            family: Family::Nair,
            a: None,
            l: None,
            alpha: None,
        }
    }

    pub fn hy_t11(alpha: u64) -> Result<Self> {
        if alpha < 1 {
            return Err(Error::InvalidParams("alpha must be at least 1".into()));
        }
        Ok(BoundParams {
            family: Family::HyT11,
            a: None,
            l: None,
            alpha: Some(alpha),
        })
    }

    pub fn hk_t12(a: u64, alpha: u64) -> Result<Self> {
        if a < 2 {
            return Err(Error::InvalidParams("a must be at least 2".into()));
        }
        if alpha < 1 {
            return Err(Error::InvalidParams("alpha must be at least 1".into()));
        }
        Ok(BoundParams {
            family: Family::HkT12,
            a: Some(a),
            l: None,
            alpha: Some(alpha),
        })
    }

    pub fn new_t13(a: u64, l: u64, alpha: u64) -> Result<Self> {
        if a < 2 || l < 2 {
            return Err(Error::InvalidParams("a and l must be at least 2".into()));
        }
        if alpha < 1 {
            return Err(Error::InvalidParams("alpha must be at least 1".into()));
        }
        Ok(BoundParams {
            family: Family::NewT13,
            a: Some(a),
            l: Some(l),
            alpha: Some(alpha),
        })
    }

    /// The `l = 3` instance of [`BoundParams::new_t13`].
    pub fn t14(a: u64, alpha: u64) -> Result<Self> {
        Self::new_t13(a, 3, alpha)
    }

    /// Builds params for `family`, ignoring the arguments it does not use.
    pub fn for_family(family: Family, a: Option<u64>, l: Option<u64>, alpha: Option<u64>) -> Result<Self> {
        let need = |v: Option<u64>, name: &str| {
            v.ok_or_else(|| Error::InvalidParams(format!("family {family} requires {name}")))
        };
        match family {
            Family::Nair => Ok(Self::nair()),
            Family::HyT11 => Self::hy_t11(need(alpha, "alpha")?),
            Family::HkT12 => Self::hk_t12(need(a, "a")?, need(alpha, "alpha")?),
            Family::NewT13 => Self::new_t13(need(a, "a")?, need(l, "l")?, need(alpha, "alpha")?),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn a(&self) -> Option<u64> {
        self.a
    }

    pub fn l(&self) -> Option<u64> {
        self.l
    }

    pub fn alpha(&self) -> Option<u64> {
        self.alpha
    }

    /// Exponent of `r` in the bound; `None` for `Nair`.
    pub fn r_exponent(&self) -> Option<u64> {
        let alpha = self.alpha?;
        match self.family {
            Family::Nair => None,
            Family::HyT11 => Some(alpha),
            Family::HkT12 => Some(alpha + self.a? - 2),
            Family::NewT13 => {
                let (a, l) = (self.a?, self.l?);
                Some((l - 1) * alpha + a - l)
            }
        }
    }

    /// Smallest `n` allowed by the family's condition on `n` alone. `None`
    /// when it does not fit in a `u64`.
    pub fn n_threshold(&self, prog: &Progression) -> Option<u64> {
        let r = prog.r();
        match self.family {
            Family::Nair => Some(1),
            Family::HyT11 => r.checked_pow(u32::try_from(self.alpha?).ok()?)?.checked_add(1),
            Family::HkT12 => 2u64.checked_mul(self.alpha?)?.checked_mul(r),
            Family::NewT13 => self.l?.checked_mul(self.alpha?)?.checked_mul(r),
        }
    }
}

/// True iff every hypothesis of the family holds at `(prog, n)`.
pub fn hypothesis(params: &BoundParams, prog: &Progression, n: u64) -> bool {
    let (u0, r) = (prog.u0(), prog.r());
    let n_wide = n as u128;
    match params.family {
        Family::Nair => u0 == 1 && r == 1 && n >= 1,
        Family::HyT11 => {
            let alpha = params.alpha.expect("validated");
            Nat::from(n) > pow(&Nat::from(r), alpha)
        }
        Family::HkT12 => {
            let (a, alpha) = (params.a.expect("validated"), params.alpha.expect("validated"));
            alpha >= a && r >= a && n_wide >= 2 * alpha as u128 * r as u128
        }
        Family::NewT13 => {
            let (a, l, alpha) = (
                params.a.expect("validated"),
                params.l.expect("validated"),
                params.alpha.expect("validated"),
            );
            alpha >= a && r >= a.max(l - 1) && n_wide >= l as u128 * alpha as u128 * r as u128
        }
    }
}

/// Exact value of the family's bound at `(prog, n)`.
pub fn bound_value(params: &BoundParams, prog: &Progression, n: u64) -> Result<Nat> {
    if !hypothesis(params, prog, n) {
        return Err(Error::HypothesisViolated(format!(
            "{} does not apply at u0={} r={} n={}",
            params.family,
            prog.u0(),
            prog.r(),
            n
        )));
    }
    Ok(match params.r_exponent() {
        None => Nat::one() << n,
        Some(e) => {
            let r = Nat::from(prog.r());
            Nat::from(prog.u0()) * pow(&r, e) * pow(&(r + 1u32), n)
        }
    })
}

/// Outcome of checking one bound at one prefix.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub params: BoundParams,
    pub prog: Progression,
    pub n: u64,
    pub l_n: Nat,
    pub hypothesis_ok: bool,
    /// Present iff `hypothesis_ok`.
    pub bound: Option<Nat>,
    /// Present iff `hypothesis_ok`.
    pub holds: Option<bool>,
    /// `ln(L_n) - ln(bound)`, present iff the bound holds.
    pub gap_log: Option<f64>,
}

impl BoundReport {
    pub fn failed(&self) -> bool {
        self.holds == Some(false)
    }
}

/// Decides `L_n >= bound` by exact comparison. A failed hypothesis is
/// reported, not raised.
pub fn check(params: &BoundParams, prog: &Progression, n: u64, l_n: &Nat) -> BoundReport {
    let mut report = BoundReport {
        params: *params,
        prog: *prog,
        n,
        l_n: l_n.clone(),
        hypothesis_ok: false,
        bound: None,
        holds: None,
        gap_log: None,
    };
    let Ok(bound) = bound_value(params, prog, n) else {
        return report;
    };
    let holds = *l_n >= bound;
    report.hypothesis_ok = true;
    report.holds = Some(holds);
    if holds {
        report.gap_log = Some(ln_ratio(l_n, &bound));
    }
    report.bound = Some(bound);
    report
}
