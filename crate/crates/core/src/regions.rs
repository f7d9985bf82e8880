//! Compression–equivocation region formulas and their maximization.
//!
//! With uncoded side information `B` at the receiver and `E` at the
//! eavesdropper, a pair `(R_A, Δ)` is achievable iff `R_A ≥ H(A|B)` and
//! `Δ ≤ max_U I(A;B|U) − I(A;E|U)`, where the auxiliary `U` may depend on
//! whichever side information the encoder sees (see [`SwitchConfig`]).
//! With a rate-limited helper, the helper's description `V` of `C` replaces
//! `B` in the inner bound.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::optimize::{multistart_ascent, AuxObjective, OptimizerConfig, Term};
use crate::prob::{Alphabet, Channel, JointPmf};

/// Which side-information sequences the encoder also observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SwitchConfig {
    pub sb_closed: bool,
    pub se_closed: bool,
}

impl SwitchConfig {
    pub const NONE: Self = Self {
        sb_closed: false,
        se_closed: false,
    };
    pub const SB: Self = Self {
        sb_closed: true,
        se_closed: false,
    };
    pub const SE: Self = Self {
        sb_closed: false,
        se_closed: true,
    };
    pub const BOTH: Self = Self {
        sb_closed: true,
        se_closed: true,
    };
    pub const ALL: [Self; 4] = [Self::NONE, Self::SB, Self::SE, Self::BOTH];

    /// Variables the auxiliary `U` may depend on.
    pub fn conditioning_vars(&self) -> &'static [&'static str] {
        match (self.sb_closed, self.se_closed) {
            (false, false) => &["A"],
            (true, false) => &["A", "B"],
            (false, true) => &["A", "E"],
            (true, true) => &["A", "B", "E"],
        }
    }
}

impl fmt::Display for SwitchConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match (self.sb_closed, self.se_closed) {
            (false, false) => "none",
            (true, false) => "sb",
            (false, true) => "se",
            (true, true) => "both",
        })
    }
}

impl FromStr for SwitchConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::NONE),
            "sb" => Ok(Self::SB),
            "se" => Ok(Self::SE),
            "both" => Ok(Self::BOTH),
            other => Err(Error::InvalidParameter(format!("unknown switch setting `{other}`"))),
        }
    }
}

/// A rate point in bits per source symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub r_a: f64,
    pub r_c: Option<f64>,
    pub delta: f64,
}

impl RatePoint {
    pub fn new(r_a: f64, r_c: Option<f64>, delta: f64) -> Result<Self> {
        let all = [Some(r_a), r_c, Some(delta)];
        if all.iter().flatten().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "rate point ({r_a}, {r_c:?}, {delta}) has a negative component"
            )));
        }
        Ok(Self { r_a, r_c, delta })
    }

    /// Equivocation cannot exceed the source entropy bound `log2 |A|`.
    pub fn check_delta_bound(&self, source_card: usize) -> Result<()> {
        let cap = (source_card as f64).log2();
        if self.delta > cap + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "delta {} exceeds log2|A| = {cap}",
                self.delta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    /// `max(0, best objective)`.
    pub delta_star: f64,
    /// Raw best objective, possibly negative.
    pub best_objective: f64,
    pub best_u: Channel,
    pub objective_trace: Vec<f64>,
    pub starts_agreeing: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormMode {
    /// `I(A;B) − I(A;E)`, tight when `B` is less noisy than `E`.
    LessNoisy,
    /// `I(A;B|E)`, tight when only `E` reaches the encoder.
    SeClosed,
}

/// Objective values this close to zero are rounding noise from entropy differences.
const ROUNDING_FLOOR: f64 = 1e-12;

fn clamp_delta(v: f64) -> f64 {
    if v > ROUNDING_FLOOR {
        v
    } else {
        0.0
    }
}

fn abe(joint: &JointPmf) -> Result<JointPmf> {
    joint.marginalize(&["A", "B", "E"])
}

fn same_var_set(a: &[&str], b: &[&str]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

/// `I(A;B|U) − I(A;E|U)` for a given auxiliary channel.
pub fn secrecy_objective(joint_abe: &JointPmf, u_channel: &Channel, switches: SwitchConfig) -> Result<f64> {
    let cond = switches.conditioning_vars();
    let from = u_channel.from_names();
    if !same_var_set(&from, cond) {
        let odd = from
            .iter()
            .find(|n| !cond.contains(n))
            .or_else(|| cond.iter().find(|n| !from.contains(n)))
            .copied()
            .unwrap_or_default();
        return Err(Error::ConditioningMismatch(odd.to_string()));
    }
    let full = abe(joint_abe)?.build_joint(u_channel)?;
    let u = u_channel.to().name();
    Ok(full.mutual_information(&["A"], &["B"], &[u])?
        - full.mutual_information(&["A"], &["E"], &[u])?)
}

/// Default auxiliary cardinality: `|A| + 1` with open switches, otherwise
/// the product of the conditioning alphabet sizes plus one.
pub fn u_cardinality(joint_abe: &JointPmf, switches: SwitchConfig, cfg: &OptimizerConfig) -> Result<usize> {
    if let Some(k) = cfg.u_cardinality {
        return Ok(k);
    }
    let mut n = 1;
    for v in switches.conditioning_vars() {
        n *= joint_abe.variable(v)?.len();
    }
    Ok(n + 1)
}

fn conditioning_alphabets(joint: &JointPmf, names: &[&str]) -> Result<Vec<Alphabet>> {
    names.iter().map(|n| joint.variable(n).cloned()).collect()
}

pub(crate) fn channel_from_weights(from: Vec<Alphabet>, card: usize, w: &[f64]) -> Result<Channel> {
    let to = Alphabet::indexed("U", "u", card)?;
    Channel::new(from, to, w.chunks(card).map(<[f64]>::to_vec).collect())
}

/// Re-expresses `channel` over a larger conditioning set `target_from`
/// (ignoring the added inputs) and pads the output alphabet to `card`
/// symbols with zero-probability entries.
pub fn lift_channel(channel: &Channel, target_from: &[Alphabet], card: usize) -> Result<Channel> {
    let src = channel.from_names();
    let pos: Vec<usize> = src
        .iter()
        .map(|n| {
            target_from
                .iter()
                .position(|a| a.name() == *n)
                .ok_or_else(|| Error::ConditioningMismatch(n.to_string()))
        })
        .collect::<Result<_>>()?;
    let k = channel.to().len();
    if k > card {
        return Err(Error::InvalidParameter(format!(
            "channel has {k} outputs, more than the target cardinality {card}"
        )));
    }
    Channel::from_fn(
        target_from.to_vec(),
        Alphabet::indexed("U", "u", card)?,
        |d| {
            let digits: Vec<usize> = pos.iter().map(|&p| d[p]).collect();
            let mut row = channel.row(&digits).to_vec();
            row.resize(card, 0.0);
            row
        },
    )
}

/// Constant-`U` and `U = A` starting points, always tried after the random starts.
pub(crate) fn structural_starts(joint: &JointPmf, cond: &[&str], card: usize) -> Result<Vec<Vec<f64>>> {
    let shape: Vec<usize> = cond
        .iter()
        .map(|n| joint.variable(n).map(Alphabet::len))
        .collect::<Result<_>>()?;
    let n_rows: usize = shape.iter().product();
    let a_pos = cond.iter().position(|&n| n == "A");
    let a_card = joint.variable("A")?.len();
    let mut constant = vec![0.0; n_rows * card];
    for r in 0..n_rows {
        constant[r * card] = 1.0;
    }
    let mut starts = vec![constant];
    if let (Some(ap), true) = (a_pos, a_card <= card) {
        let mut copy = vec![0.0; n_rows * card];
        let stride: usize = shape[ap + 1..].iter().product();
        for r in 0..n_rows {
            let a = (r / stride) % shape[ap];
            copy[r * card + a] = 1.0;
        }
        starts.push(copy);
    }
    Ok(starts)
}

fn secrecy_terms<'a>() -> [Term<'a>; 4] {
    // I(A;B|U) − I(A;E|U) = H(A,E,U) − H(E,U) − H(A,B,U) + H(B,U)
    [
        (1.0, &["A", "E"], true),
        (-1.0, &["E"], true),
        (-1.0, &["A", "B"], true),
        (1.0, &["B"], true),
    ]
}

/// Maximizes the secrecy objective over auxiliaries allowed by `switches`.
pub fn maximize_equivocation(
    joint_abe: &JointPmf,
    switches: SwitchConfig,
    cfg: &OptimizerConfig,
) -> Result<OptResult> {
    maximize_equivocation_with_starts(joint_abe, switches, cfg, &[])
}

/// As [`maximize_equivocation`], with caller-supplied channels appended as
/// extra starts (lifted to the switch setting's conditioning set).
pub fn maximize_equivocation_with_starts(
    joint_abe: &JointPmf,
    switches: SwitchConfig,
    cfg: &OptimizerConfig,
    extra: &[Channel],
) -> Result<OptResult> {
    cfg.validate()?;
    let joint = abe(joint_abe)?;
    let cond = switches.conditioning_vars();
    let card = u_cardinality(&joint, switches, cfg)?;
    let from = conditioning_alphabets(&joint, cond)?;
    let obj = AuxObjective::new(&joint, cond, card, &secrecy_terms())?;

    let mut starts = structural_starts(&joint, cond, card)?;
    for ch in extra {
        let lifted = lift_channel(ch, &from, card)?;
        starts.push(lifted.rows().concat());
    }
    let out = multistart_ascent(&obj, cfg, &starts);
    Ok(OptResult {
        delta_star: clamp_delta(out.value),
        best_objective: out.value,
        best_u: channel_from_weights(from, card, &out.w)?,
        objective_trace: out.trace,
        starts_agreeing: out.agreeing,
    })
}

/// Closed-form equivocation, clamped at 0. The caller is responsible for
/// the ordering hypothesis behind `mode`.
pub fn closed_form_delta(joint_abe: &JointPmf, mode: ClosedFormMode) -> Result<f64> {
    let v = match mode {
        ClosedFormMode::LessNoisy => {
            joint_abe.mutual_information(&["A"], &["B"], &[])?
                - joint_abe.mutual_information(&["A"], &["E"], &[])?
        }
        ClosedFormMode::SeClosed => joint_abe.mutual_information(&["A"], &["B"], &["E"])?,
    };
    Ok(v.max(0.0))
}

/// One sample of the coded-side-information inner bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedSample {
    /// `R_A = H(A|V)`, `R_C = I(C;V)`, `delta = delta_star`.
    pub corner: RatePoint,
    pub delta_star: f64,
    /// `R_A + delta_star ≥ H(A|E)` (to 1e-9).
    pub sum_ok: bool,
    pub h_a_given_e: f64,
    pub best_u: Channel,
}

impl CodedSample {
    /// Whether `(r_a, r_c, delta)` lies in the achievable set this sample certifies.
    pub fn certifies(&self, r_a: f64, r_c: f64, delta: f64) -> bool {
        r_a >= self.corner.r_a
            && r_c >= self.corner.r_c.unwrap_or(0.0)
            && delta <= self.delta_star
            && r_a + delta >= self.h_a_given_e
    }
}

/// Evaluates the helper inner bound for one description channel `p(v|c)`.
pub fn coded_inner_bound_sample(
    joint_ace: &JointPmf,
    v_channel: &Channel,
    cfg: &OptimizerConfig,
) -> Result<CodedSample> {
    cfg.validate()?;
    let from = v_channel.from_names();
    if from != ["C"] {
        let odd = from.iter().find(|&&n| n != "C").copied().unwrap_or("C");
        return Err(Error::ConditioningMismatch(odd.to_string()));
    }
    let ace = joint_ace.marginalize(&["A", "C", "E"])?;
    let v = v_channel.to().name();
    let full = ace.build_joint(v_channel)?;
    let r_a = full.entropy(&["A"], &[v])?;
    let r_c = full.mutual_information(&["C"], &[v], &[])?;
    let h_a_given_e = full.entropy(&["A"], &["E"])?;

    let card = cfg.u_cardinality.unwrap_or(ace.variable("A")?.len() + 1);
    // I(A;V|U) − I(A;E|U)
    let terms: [Term; 4] = [
        (1.0, &["A", "E"], true),
        (-1.0, &["E"], true),
        (-1.0, &["A", v], true),
        (1.0, &[v], true),
    ];
    let obj = AuxObjective::new(&full, &["A"], card, &terms)?;
    let starts = structural_starts(&full, &["A"], card)?;
    let out = multistart_ascent(&obj, cfg, &starts);
    let delta_star = clamp_delta(out.value);
    Ok(CodedSample {
        corner: RatePoint::new(r_a, Some(r_c), delta_star)?,
        delta_star,
        sum_ok: r_a + delta_star >= h_a_given_e - 1e-9,
        h_a_given_e,
        best_u: channel_from_weights(vec![ace.variable("A")?.clone()], card, &out.w)?,
    })
}

/// Description channels for a coded-region sweep: the erasure family
/// `V = C` w.p. `k/grid`, else a blank symbol, for `k = 0..=grid`, followed by
/// `grid` random channels with `|V| = |C| + 2` drawn from `seed`.
pub fn coded_v_channels(joint_ace: &JointPmf, grid: usize, seed: u64) -> Result<Vec<Channel>> {
    use rand::{Rng, SeedableRng};
    let c = joint_ace.variable("C")?.clone();
    let n = c.len();
    let mut out = Vec::with_capacity(2 * grid + 1);
    let erasure_to = Alphabet::indexed("V", "v", n + 1)?;
    for k in 0..=grid {
        let keep = if grid == 0 { 1.0 } else { k as f64 / grid as f64 };
        out.push(Channel::from_fn(vec![c.clone()], erasure_to.clone(), |d| {
            let mut row = vec![0.0; n + 1];
            row[d[0]] = keep;
            row[n] += 1.0 - keep;
            row
        })?);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let random_to = Alphabet::indexed("V", "v", n + 2)?;
    for _ in 0..grid {
        out.push(Channel::from_fn(vec![c.clone()], random_to.clone(), |_| {
            let mut row: Vec<f64> = (0..n + 2)
                .map(|_| -(1.0 - rng.random::<f64>()).ln())
                .collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
            row
        })?);
    }
    Ok(out)
}
