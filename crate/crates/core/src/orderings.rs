//! Side-information orderings between Bob's `B` and Eve's `E`.
//!
//! Stochastic degradation is decided exactly (up to LP tolerance) by
//! searching for a channel `q(worse | better)` whose composition with
//! `p(better | a)` reproduces `p(worse | a)`. The less-noisy ordering
//! quantifies over every `p(u|a)`, so it can only be falsified: the search
//! maximizes `I(U; worse) − I(U; better)` and reports a witness when the gap
//! is positive.

use crate::error::{Error, Result};
use crate::lp::find_feasible;
use crate::optimize::{multistart_ascent, AuxObjective, OptimizerConfig, Term};
use crate::prob::{Channel, JointPmf};
use crate::regions::{channel_from_weights, structural_starts};

const LP_TOL: f64 = 1e-9;
const COMPOSITION_TOL: f64 = 1e-8;
const WITNESS_GAP: f64 = 1e-6;
const MARKOV_TOL: f64 = 1e-10;

/// Which observation is claimed to be the weaker one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `E` degraded w.r.t. `B`; for less-noisy, `B` less noisy than `E`.
    EWrtB,
    /// `B` degraded w.r.t. `E`; for less-noisy, `E` less noisy than `B`.
    BWrtE,
}

impl Direction {
    /// `(better, worse)` variable names.
    pub fn roles(self) -> (&'static str, &'static str) {
        match self {
            Direction::EWrtB => ("B", "E"),
            Direction::BWrtE => ("E", "B"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrderingVerdict {
    /// `certificate` is `q(worse | better)`; `physical` records whether the
    /// given joint is itself Markov `A − better − worse`.
    Degraded { certificate: Channel, physical: bool },
    NotDegraded,
    LessNoisyFalsified { witness: Channel, gap: f64 },
    LessNoisyNotFalsified { budget_used: usize },
}

impl OrderingVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            OrderingVerdict::Degraded { .. } => "degraded",
            OrderingVerdict::NotDegraded => "not_degraded",
            OrderingVerdict::LessNoisyFalsified { .. } => "less_noisy_falsified",
            OrderingVerdict::LessNoisyNotFalsified { .. } => "less_noisy_not_falsified",
        }
    }
}

/// Max over `(a, w)` with `p(a) > 0` of `|sum_b p(b|a) cert(w|b) − p(w|a)|`.
pub fn composition_error(joint_abe: &JointPmf, direction: Direction, cert: &Channel) -> Result<f64> {
    let (better, worse) = direction.roles();
    let p_a = joint_abe.marginalize(&["A"])?;
    let fwd = joint_abe.conditional(better, &["A"])?;
    let target = joint_abe.conditional(worse, &["A"])?;
    let mut err = 0.0f64;
    for (a, &pa) in p_a.mass().iter().enumerate() {
        if pa <= 0.0 {
            continue;
        }
        let row_b = fwd.row(&[a]);
        for (w, &want) in target.row(&[a]).iter().enumerate() {
            let got: f64 = row_b
                .iter()
                .enumerate()
                .map(|(b, &pb)| pb * cert.row(&[b])[w])
                .sum();
            err = err.max((got - want).abs());
        }
    }
    Ok(err)
}

/// `A − better − worse` holds for this joint (to 1e-10 in `I(A; worse | better)`).
pub fn is_physically_degraded(joint_abe: &JointPmf, direction: Direction) -> Result<bool> {
    let (better, worse) = direction.roles();
    Ok(joint_abe.mutual_information(&["A"], &[worse], &[better])? <= MARKOV_TOL)
}

pub fn check_stochastic_degradation(joint_abe: &JointPmf, direction: Direction) -> Result<OrderingVerdict> {
    let (better, worse) = direction.roles();
    let joint = joint_abe.marginalize(&["A", "B", "E"])?;
    let p_a = joint.marginalize(&["A"])?;
    let active_a: Vec<usize> = (0..p_a.mass().len())
        .filter(|&a| p_a.mass()[a] > 0.0)
        .collect();
    let fwd = joint.conditional(better, &["A"])?;
    let target = joint.conditional(worse, &["A"])?;
    let nb = joint.variable(better)?.len();
    let nw = joint.variable(worse)?.len();

    // better-symbols reachable from some active a
    let active_b: Vec<usize> = (0..nb)
        .filter(|&b| active_a.iter().any(|&a| fwd.row(&[a])[b] > 0.0))
        .collect();
    let var = |bk: usize, w: usize| bk * nw + w;
    let n_vars = active_b.len() * nw;

    let mut a_eq = Vec::new();
    let mut rhs = Vec::new();
    for &a in &active_a {
        for w in 0..nw {
            let mut row = vec![0.0; n_vars];
            for (bk, &b) in active_b.iter().enumerate() {
                row[var(bk, w)] = fwd.row(&[a])[b];
            }
            a_eq.push(row);
            rhs.push(target.row(&[a])[w]);
        }
    }
    for bk in 0..active_b.len() {
        let mut row = vec![0.0; n_vars];
        for w in 0..nw {
            row[var(bk, w)] = 1.0;
        }
        a_eq.push(row);
        rhs.push(1.0);
    }

    let Some(x) = find_feasible(&a_eq, &rhs, LP_TOL) else {
        return Ok(OrderingVerdict::NotDegraded);
    };

    let mut rows = vec![vec![1.0 / nw as f64; nw]; nb];
    for (bk, &b) in active_b.iter().enumerate() {
        let mut row: Vec<f64> = (0..nw).map(|w| x[var(bk, w)].max(0.0)).collect();
        let s: f64 = row.iter().sum();
        if s <= 0.0 {
            return Err(Error::Numerical(format!("empty certificate row for symbol {b}")));
        }
        row.iter_mut().for_each(|v| *v /= s);
        rows[b] = row;
    }
    let certificate = Channel::new(
        vec![joint.variable(better)?.clone()],
        joint.variable(worse)?.clone(),
        rows,
    )?;
    let err = composition_error(&joint, direction, &certificate)?;
    if err > COMPOSITION_TOL {
        return Err(Error::Numerical(format!(
            "degradation certificate misses the target by {err:e}"
        )));
    }
    Ok(OrderingVerdict::Degraded {
        certificate,
        physical: is_physically_degraded(&joint, direction)?,
    })
}

/// Searches `p(u|a)` for `I(U; worse) > I(U; better)`.
pub fn search_less_noisy_violation(
    joint_abe: &JointPmf,
    direction: Direction,
    cfg: &OptimizerConfig,
) -> Result<OrderingVerdict> {
    cfg.validate()?;
    let (better, worse) = direction.roles();
    let joint = joint_abe.marginalize(&["A", "B", "E"])?;
    let a = joint.variable("A")?.clone();
    let card = cfg.u_cardinality.unwrap_or(a.len() + 1);
    // I(U;W) − I(U;B) = H(W) − H(W,U) − H(B) + H(B,U)
    let terms: [Term; 4] = [
        (1.0, &[worse], false),
        (-1.0, &[worse], true),
        (-1.0, &[better], false),
        (1.0, &[better], true),
    ];
    let obj = AuxObjective::new(&joint, &["A"], card, &terms)?;
    let starts = structural_starts(&joint, &["A"], card)?;
    let out = multistart_ascent(&obj, cfg, &starts);
    if out.value > WITNESS_GAP {
        Ok(OrderingVerdict::LessNoisyFalsified {
            witness: channel_from_weights(vec![a], card, &out.w)?,
            gap: out.value,
        })
    } else {
        Ok(OrderingVerdict::LessNoisyNotFalsified {
            budget_used: out.trace.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erasure::{make_erasure_joint, ErasureParams};
    use crate::prob::Alphabet;

    fn erasure(pb: f64, pe: f64) -> JointPmf {
        make_erasure_joint(ErasureParams::new(pb, pe).unwrap())
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            starts: 8,
            ..Default::default()
        }
    }

    #[test]
    fn erasure_certificate() {
        let j = erasure(0.1, 0.3);
        let OrderingVerdict::Degraded { certificate, physical } =
            check_stochastic_degradation(&j, Direction::EWrtB).unwrap()
        else {
            panic!("expected degraded");
        };
        assert!(physical == false);
        assert!((certificate.prob(&["0"], "e").unwrap() - 2.0 / 9.0).abs() < 1e-9);
        assert!((certificate.prob(&["1"], "1").unwrap() - 7.0 / 9.0).abs() < 1e-9);
        assert!((certificate.prob(&["e"], "e").unwrap() - 1.0).abs() < 1e-9);
        assert!(composition_error(&j, Direction::EWrtB, &certificate).unwrap() < 1e-12);
    }

    #[test]
    fn fewer_erasures_cannot_be_degraded() {
        let j = erasure(0.3, 0.1);
        assert_eq!(
            check_stochastic_degradation(&j, Direction::EWrtB).unwrap(),
            OrderingVerdict::NotDegraded
        );
        assert_eq!(
            check_stochastic_degradation(&j, Direction::BWrtE).unwrap().kind(),
            "degraded"
        );
    }

    #[test]
    fn identical_observations() {
        let a = Alphabet::new("A", ["0", "1"]).unwrap();
        let b = Alphabet::new("B", ["x", "y", "z"]).unwrap();
        let e = Alphabet::new("E", ["x", "y", "z"]).unwrap();
        let cond = [[0.6, 0.3, 0.1], [0.2, 0.2, 0.6]];
        let j = JointPmf::from_fn(vec![a, b, e], |d| {
            if d[1] == d[2] {
                0.5 * cond[d[0]][d[1]]
            } else {
                0.0
            }
        })
        .unwrap();
        let OrderingVerdict::Degraded { certificate, physical } =
            check_stochastic_degradation(&j, Direction::EWrtB).unwrap()
        else {
            panic!("expected degraded");
        };
        assert!(physical);
        for (i, row) in certificate.rows().iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                assert!((v - if i == k { 1.0 } else { 0.0 }).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_mass_symbols() {
        // A has a zero-mass symbol and B has a symbol never produced
        let a = Alphabet::new("A", ["0", "1", "2"]).unwrap();
        let b = Alphabet::new("B", ["0", "1", "e", "unused"]).unwrap();
        let e = Alphabet::new("E", ["0", "1", "e"]).unwrap();
        let j = JointPmf::from_fn(vec![a, b, e], |d| {
            if d[0] == 2 || d[1] == 3 {
                return 0.0;
            }
            let pb = match d[1] {
                2 => 0.2,
                x if x == d[0] => 0.8,
                _ => 0.0,
            };
            let pe = match d[2] {
                2 => 0.5,
                x if x == d[0] => 0.5,
                _ => 0.0,
            };
            0.5 * pb * pe
        })
        .unwrap();
        let v = check_stochastic_degradation(&j, Direction::EWrtB).unwrap();
        let OrderingVerdict::Degraded { certificate, .. } = v else {
            panic!("expected degraded");
        };
        let unused = certificate.row(&[3]);
        assert!(unused.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn less_noisy_verdicts() {
        let v = search_less_noisy_violation(&erasure(0.1, 0.3), Direction::EWrtB, &quick()).unwrap();
        assert_eq!(v.kind(), "less_noisy_not_falsified");
        let v = search_less_noisy_violation(&erasure(0.3, 0.1), Direction::EWrtB, &quick()).unwrap();
        let OrderingVerdict::LessNoisyFalsified { gap, .. } = v else {
            panic!("expected witness");
        };
        assert!(gap >= 0.19, "{gap}");
    }

    #[test]
    fn constant_bob_copy_eve() {
        let a = Alphabet::new("A", ["0", "1"]).unwrap();
        let b = Alphabet::new("B", ["-"]).unwrap();
        let e = Alphabet::new("E", ["0", "1"]).unwrap();
        let j = JointPmf::from_fn(vec![a, b, e], |d| if d[0] == d[2] { 0.5 } else { 0.0 }).unwrap();
        let v = search_less_noisy_violation(&j, Direction::EWrtB, &quick()).unwrap();
        let OrderingVerdict::LessNoisyFalsified { witness, gap } = v else {
            panic!("expected witness");
        };
        assert!((gap - 1.0).abs() < 1e-9);
        let full = j.build_joint(&witness).unwrap();
        let i_ue = full.mutual_information(&["U"], &["E"], &[]).unwrap();
        let i_ub = full.mutual_information(&["U"], &["B"], &[]).unwrap();
        assert!((i_ue - i_ub - gap).abs() < 1e-10);
    }
}
