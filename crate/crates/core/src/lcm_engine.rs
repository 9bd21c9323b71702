//! Exact `L_n`, suffix LCMs `L_{n,k}` and cofactors `A_{n,k}`.

use num_traits::One;

use crate::error::{Error, Result};
use crate::numeric::{lcm, Nat, Rat};
use crate::progression::{PrefixWindow, Progression};

fn fold_lcm(terms: impl Iterator<Item = Nat>) -> Nat {
    terms.fold(Nat::one(), |acc, t| {
        lcm(&acc, &t).expect("progression terms are positive")
    })
}

/// `L_n = lcm(u_0, ..., u_n)` by a from-scratch fold.
pub fn lcm_prefix(prog: &Progression, n: u64) -> Nat {
    fold_lcm((0..=n).map(|j| prog.term(j)))
}

/// `L_{n,k} = lcm(u_k, ..., u_n)`.
pub fn lcm_suffix(prog: &Progression, n: u64, k: u64) -> Result<Nat> {
    let win = PrefixWindow::new(*prog, n, k)?;
    Ok(fold_lcm(win.terms()))
}

/// Running `L_n` that extends one term at a time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncrementalState {
    prog: Progression,
    n: u64,
    l_n: Nat,
}

impl IncrementalState {
    /// State at `n = 0`, where `L_0 = u_0`.
    pub fn start(prog: Progression) -> Self {
        IncrementalState {
            prog,
            n: 0,
            l_n: prog.term(0),
        }
    }

    /// Caller asserts `l_n = lcm(u_0..u_n)`; not re-checked.
    pub fn from_parts(prog: Progression, n: u64, l_n: Nat) -> Self {
        IncrementalState { prog, n, l_n }
    }

    pub fn prog(&self) -> Progression {
        self.prog
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn l_n(&self) -> &Nat {
        &self.l_n
    }

    /// `L_{n+1} = lcm(L_n, u_{n+1})`.
    pub fn extend(&self) -> IncrementalState {
        let next = self.n + 1;
        let l_n = lcm(&self.l_n, &self.prog.term(next)).expect("positive operands");
        IncrementalState {
            prog: self.prog,
            n: next,
            l_n,
        }
    }
}

fn cofactor_from_suffix(win: &PrefixWindow, l_nk: &Nat, c_nk: &Rat) -> Result<Nat> {
    let quotient = &Rat::from_nat(l_nk.clone()) / c_nk;
    match quotient.to_nat() {
        Some(a) if a >= Nat::one() => Ok(a),
        _ => Err(Error::Integrality(format!(
            "u0={} r={} n={} k={}: L_{{n,k}}={} / C_{{n,k}}={} = {} is not a positive integer",
            win.prog().u0(),
            win.prog().r(),
            win.n(),
            win.k(),
            l_nk,
            c_nk,
            quotient
        ))),
    }
}

/// `A_{n,k} = L_{n,k} / C_{n,k}`, computed as an exact fraction and checked
/// for integrality rather than assumed.
pub fn cofactor(prog: &Progression, n: u64, k: u64) -> Result<Nat> {
    let win = PrefixWindow::new(*prog, n, k)?;
    let l_nk = fold_lcm(win.terms());
    cofactor_from_suffix(&win, &l_nk, &win.c())
}

/// All quantities for one prefix, anchored at `k = k_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcmRecord {
    pub n: u64,
    pub k_n: u64,
    pub l_n: Nat,
    pub l_n_kn: Nat,
    pub c_n_kn: Rat,
    pub a_n_kn: Nat,
}

pub fn record(prog: &Progression, n: u64) -> Result<LcmRecord> {
    record_with_prefix(prog, n, lcm_prefix(prog, n))
}

/// Same as [`record`], reusing an already computed `L_n`.
pub fn record_with_prefix(prog: &Progression, n: u64, l_n: Nat) -> Result<LcmRecord> {
    if n == 0 {
        return Err(Error::ZeroPrefixIndex);
    }
    let k_n = prog.shift_index(n);
    let win = PrefixWindow::new(*prog, n, k_n)?;
    let l_n_kn = fold_lcm(win.terms());
    let c_n_kn = win.c();
    let a_n_kn = cofactor_from_suffix(&win, &l_n_kn, &c_n_kn)?;
    Ok(LcmRecord {
        n,
        k_n,
        l_n,
        l_n_kn,
        c_n_kn,
        a_n_kn,
    })
}
