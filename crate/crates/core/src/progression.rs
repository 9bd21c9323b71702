//! The progression `u_k = u0 + k*r` and its windowed quantities.

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{factorial, Nat, Rat};

/// An arithmetic progression with positive, coprime `u0` and `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawProgression")]
pub struct Progression {
    u0: u64,
    r: u64,
}

#[derive(Deserialize)]
struct RawProgression {
    u0: u64,
    r: u64,
}

impl TryFrom<RawProgression> for Progression {
    type Error = Error;
    fn try_from(raw: RawProgression) -> Result<Self> {
        Progression::new(raw.u0, raw.r)
    }
}

impl Progression {
    /// Rejects non-coprime pairs instead of dividing out the common factor,
    /// which would describe a different progression.
    pub fn new(u0: u64, r: u64) -> Result<Self> {
        if u0 == 0 || r == 0 {
            return Err(Error::NonPositiveProgression { u0, r });
        }
        let g = u0.gcd(&r);
        if g != 1 {
            return Err(Error::NotCoprime { u0, r, gcd: g });
        }
        Ok(Progression { u0, r })
    }

    pub fn u0(&self) -> u64 {
        self.u0
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// `u_k = u0 + k*r`.
    pub fn term(&self, k: u64) -> Nat {
        Nat::from(self.u0) + Nat::from(k) * self.r
    }

    /// The shift index `k_n = max(0, floor((n - u0) / (r + 1)) + 1)`, with a
    /// floor that rounds toward negative infinity.
    pub fn shift_index(&self, n: u64) -> u64 {
        let diff = n as i128 - self.u0 as i128;
        let k = Integer::div_floor(&diff, &(self.r as i128 + 1)) + 1;
        k.max(0) as u64
    }

    pub fn window(&self, n: u64, k: u64) -> Result<PrefixWindow> {
        PrefixWindow::new(*self, n, k)
    }
}

/// Index pair `(n, k)` with `0 <= k <= n` over a progression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrefixWindow {
    prog: Progression,
    n: u64,
    k: u64,
}

impl PrefixWindow {
    pub fn new(prog: Progression, n: u64, k: u64) -> Result<Self> {
        if k > n {
            return Err(Error::WindowOutOfRange { n, k });
        }
        Ok(PrefixWindow { prog, n, k })
    }

    pub fn prog(&self) -> Progression {
        self.prog
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn terms(&self) -> impl Iterator<Item = Nat> + '_ {
        (self.k..=self.n).map(move |j| self.prog.term(j))
    }

    /// `u_k * u_{k+1} * ... * u_n`.
    pub fn product(&self) -> Nat {
        self.terms().fold(Nat::one(), |acc, t| acc * t)
    }

    /// `C_{n,k} = u_k ... u_n / (n - k)!`, reduced. Not integral in general.
    pub fn c(&self) -> Rat {
        Rat::from_nats(self.product(), factorial(self.n - self.k))
            .expect("factorial is nonzero")
    }
}
