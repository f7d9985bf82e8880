//! Binary erasure side-information family.
//!
//! `A` is a uniform bit; Bob sees `B`, an independent erasure of `A` with
//! probability `p_b`, and Eve sees `E`, an independent erasure with
//! probability `p_e`. Symbol order is `0, 1, e` for both side-information
//! alphabets.

use crate::error::{Error, Result};
use crate::prob::{Alphabet, Channel, JointPmf};
use crate::regions::SwitchConfig;

pub const ERASED: &str = "e";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErasureParams {
    pub p_b: f64,
    pub p_e: f64,
}

impl ErasureParams {
    pub fn new(p_b: f64, p_e: f64) -> Result<Self> {
        for (name, p) in [("p_b", p_b), ("p_e", p_e)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {p} is outside [0, 1]"
                )));
            }
        }
        Ok(Self { p_b, p_e })
    }
}

pub fn source_alphabet() -> Alphabet {
    Alphabet::new("A", ["0", "1"]).expect("static alphabet")
}

pub fn erased_alphabet(name: &str) -> Alphabet {
    Alphabet::new(name, ["0", "1", ERASED]).expect("static alphabet")
}

/// `p(out | a)` for an erasure channel; `out` indexes `0, 1, e`.
fn erasure_prob(p: f64, a: usize, out: usize) -> f64 {
    match out {
        2 => p,
        o if o == a => 1.0 - p,
        _ => 0.0,
    }
}

/// Joint `p(a, b, e)` over `A`, `B`, `E`.
pub fn make_erasure_joint(params: ErasureParams) -> JointPmf {
    let vars = vec![source_alphabet(), erased_alphabet("B"), erased_alphabet("E")];
    JointPmf::from_fn(vars, |d| {
        0.5 * erasure_prob(params.p_b, d[0], d[1]) * erasure_prob(params.p_e, d[0], d[2])
    })
    .expect("erasure joint is a valid pmf")
}

/// Equivocation of the explicit erasure schemes: `max(p_E − p_B, 0)` without
/// encoder side information, and `p_E(1 − p_B)` (the value of
/// [`optimal_u_for_switches`]) otherwise.
///
/// Without encoder side information this is the region maximum. With `sb`
/// closed it is only a lower bound: for `p_B ≤ 1/2` an auxiliary that is
/// independent of `(A, E)` and makes `A` a function of `(U, B)` reaches
/// `H(A|E) = p_E`.
pub fn erasure_delta(params: ErasureParams, switches: SwitchConfig) -> f64 {
    if switches == SwitchConfig::NONE {
        (params.p_e - params.p_b).max(0.0)
    } else {
        params.p_e * (1.0 - params.p_b)
    }
}

/// The encoder-side-information auxiliary: `U = A` where Bob's symbol is
/// erased, a constant otherwise. Output alphabet is `u0, u1, c`.
///
/// Defined when Bob's side information reaches the encoder (`sb` or `both`);
/// for `both` the channel ignores `E`.
pub fn optimal_u_for_switches(_params: ErasureParams, switches: SwitchConfig) -> Result<Channel> {
    if !switches.sb_closed {
        return Err(Error::Unsupported(format!(
            "no explicit optimal auxiliary for switches `{switches}`"
        )));
    }
    let from = switches
        .conditioning_vars()
        .iter()
        .map(|&n| if n == "A" { source_alphabet() } else { erased_alphabet(n) })
        .collect();
    let to = Alphabet::new("U", ["u0", "u1", "c"])?;
    Channel::from_fn(from, to, |d| {
        let mut row = vec![0.0; 3];
        if d[1] == 2 {
            row[d[0]] = 1.0;
        } else {
            row[2] = 1.0;
        }
        row
    })
}
