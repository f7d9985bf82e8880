//! Monte Carlo random binning at desk-scale blocklengths.
//!
//! Two schemes are simulated, both with exact per-realization posteriors:
//!
//! - Slepian–Wolf binning: the encoder sends only the bin index of `a^n`;
//!   Bob decodes by maximum posterior within the bin using `b^n`; Eve's
//!   equivocation is the entropy of her posterior over the bin given `e^n`.
//! - The erasure encoder-side-information scheme: the encoder knows Bob's
//!   erasure pattern and sends exactly the erased source bits.
//!
//! Trial `t` draws from its own ChaCha stream, so results do not depend on
//! evaluation order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::erasure::ErasureParams;
use crate::error::{Error, Result};
use crate::prob::{entropy_bits, JointPmf};

/// Largest number of source sequences the exhaustive posterior may visit.
pub const MAX_SEQUENCES: usize = 1 << 20;
/// Largest blocklength for the erasure encoder-side-information scheme.
pub const MAX_ERASURE_N: usize = 12;

const TIE_REL_TOL: f64 = 1e-12;
const BIN_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub trials: usize,
    pub p_e_hat: f64,
    /// Mean per-symbol equivocation, bits/symbol.
    pub equiv_hat: f64,
    pub equiv_stderr: f64,
    pub seed: u64,
}

/// Per-trial outcome. Entropies are per symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub error: bool,
    pub equivocation: f64,
    /// Eve's equivocation from her side information alone.
    pub side_info_only: f64,
    pub true_in_bin: bool,
}

/// Shannon entropy (bits) of the normalized weights.
pub fn exact_posterior_entropy(weights: &[f64]) -> Result<f64> {
    if let Some(&w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidMass(w));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroWeights);
    }
    let h: f64 = weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum();
    Ok(if h > 0.0 { h } else { 0.0 })
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn summarize(outcomes: &[TrialOutcome], seed: u64) -> SimReport {
    let n = outcomes.len() as f64;
    let errors = outcomes.iter().filter(|o| o.error).count() as f64;
    // summed in trial order
    let mean = outcomes.iter().map(|o| o.equivocation).sum::<f64>() / n;
    let var = if outcomes.len() > 1 {
        outcomes
            .iter()
            .map(|o| (o.equivocation - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    SimReport {
        trials: outcomes.len(),
        p_e_hat: errors / n,
        equiv_hat: mean,
        equiv_stderr: (var / n).sqrt(),
        seed,
    }
}

/// A random balanced binning of all `|A|^n` source sequences into
/// `2^⌈n·rate⌉` bins: a seeded permutation dealt round-robin.
#[derive(Debug, Clone, PartialEq)]
pub struct BinningCode {
    n: usize,
    rate: f64,
    source_card: usize,
    bin_of: Vec<u32>,
    members: Vec<Vec<u32>>,
    seed: u64,
}

impl BinningCode {
    pub fn new(source_card: usize, n: usize, rate: f64, seed: u64) -> Result<Self> {
        if n == 0 || source_card == 0 {
            return Err(Error::InvalidParameter("empty blocklength or alphabet".into()));
        }
        let total = (source_card as f64).powi(n as i32);
        if total > MAX_SEQUENCES as f64 {
            return Err(Error::TooLarge(format!(
                "{source_card}^{n} sequences exceed the enumeration limit {MAX_SEQUENCES}"
            )));
        }
        let max_rate = (source_card as f64).log2();
        if !(0.0..=max_rate + 1e-12).contains(&rate) {
            return Err(Error::InvalidParameter(format!(
                "rate {rate} is outside [0, log2|A| = {max_rate}]"
            )));
        }
        let total = total as usize;
        let bits = ((n as f64) * rate - 1e-9).ceil().max(0.0) as u32;
        let n_bins = 1usize << bits;

        let mut order: Vec<u32> = (0..total as u32).collect();
        let mut rng = trial_rng(seed, 0);
        rng.set_stream(BIN_STREAM);
        order.shuffle(&mut rng);
        let mut bin_of = vec![0u32; total];
        let mut members = vec![Vec::new(); n_bins.min(total)];
        for (k, &s) in order.iter().enumerate() {
            let bin = k % n_bins;
            bin_of[s as usize] = bin as u32;
            members[bin].push(s);
        }
        members.iter_mut().for_each(|m| m.sort_unstable());
        // bins past the sequence count stay empty
        members.resize(n_bins, Vec::new());
        Ok(Self {
            n,
            rate,
            source_card,
            bin_of,
            members,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn n_bins(&self) -> usize {
        self.members.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bin_of(&self, sequence: usize) -> usize {
        self.bin_of[sequence] as usize
    }

    /// Sequences in `bin`, in increasing index order.
    pub fn members(&self, bin: usize) -> &[u32] {
        &self.members[bin]
    }

    /// Symbol at `position` of sequence `index` (position 0 is the least significant digit).
    pub fn symbol(&self, index: usize, position: usize) -> usize {
        (index / self.source_card.pow(position as u32)) % self.source_card
    }

    pub fn encode(&self, symbols: &[usize]) -> usize {
        symbols
            .iter()
            .rev()
            .fold(0, |acc, &s| acc * self.source_card + s)
    }
}

/// Slepian–Wolf binning over a joint `p(a, b, e)`.
#[derive(Debug, Clone)]
pub struct SwBinningSim {
    code: BinningCode,
    /// cumulative mass over flat (a, b, e) cells
    cdf: Vec<f64>,
    last_positive: usize,
    shape: [usize; 3],
    /// `p(a | b)` as `[b][a]`
    post_b: Vec<Vec<f64>>,
    /// `p(a | e)` as `[e][a]`
    post_e: Vec<Vec<f64>>,
    seed: u64,
}

impl SwBinningSim {
    pub fn new(joint_abe: &JointPmf, n: usize, rate: f64, seed: u64) -> Result<Self> {
        let joint = joint_abe.marginalize(&["A", "B", "E"])?;
        let shape = joint.shape();
        let code = BinningCode::new(shape[0], n, rate, seed)?;
        let mut acc = 0.0;
        let cdf = joint
            .mass()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let table = |given: &str| -> Result<Vec<Vec<f64>>> {
            let ch = joint.conditional("A", &[given])?;
            Ok(ch.rows().to_vec())
        };
        let last_positive = joint.mass().iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Ok(Self {
            code,
            cdf,
            last_positive,
            shape: [shape[0], shape[1], shape[2]],
            post_b: table("B")?,
            post_e: table("E")?,
            seed,
        })
    }

    pub fn code(&self) -> &BinningCode {
        &self.code
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> (usize, usize, usize) {
        let u: f64 = rng.random();
        let cell = self
            .cdf
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.last_positive);
        let [_, nb, ne] = self.shape;
        (cell / (nb * ne), (cell / ne) % nb, cell % ne)
    }

    fn weight(&self, table: &[Vec<f64>], obs: &[usize], seq: usize) -> f64 {
        obs.iter()
            .enumerate()
            .map(|(i, &o)| table[o][self.code.symbol(seq, i)])
            .product()
    }

    pub fn trial(&self, t: usize) -> Result<TrialOutcome> {
        let n = self.code.n;
        let mut rng = trial_rng(self.seed, t);
        let (mut a, mut b, mut e) = (vec![0; n], vec![0; n], vec![0; n]);
        for i in 0..n {
            (a[i], b[i], e[i]) = self.draw(&mut rng);
        }
        let truth = self.code.encode(&a);
        let bin = self.code.bin_of(truth);
        let members = self.code.members(bin);

        let mut best = (usize::MAX, f64::NEG_INFINITY);
        let mut bob = Vec::with_capacity(members.len());
        for &s in members {
            let w = self.weight(&self.post_b, &b, s as usize);
            bob.push(w);
            if w > best.1 {
                best = (s as usize, w);
            }
        }
        if self.weight(&self.post_b, &b, truth) <= 0.0 {
            return Err(Error::Numerical("true sequence has zero posterior at Bob".into()));
        }
        let ties = bob
            .iter()
            .filter(|&&w| (w - best.1).abs() <= TIE_REL_TOL * best.1)
            .count();
        let error = best.0 != truth || ties > 1;

        let eve: Vec<f64> = members
            .iter()
            .map(|&s| self.weight(&self.post_e, &e, s as usize))
            .collect();
        let equivocation = exact_posterior_entropy(&eve)? / n as f64;
        let side_info_only =
            e.iter().map(|&o| entropy_bits(&self.post_e[o])).sum::<f64>() / n as f64;
        Ok(TrialOutcome {
            error,
            equivocation,
            side_info_only,
            true_in_bin: members.binary_search(&(truth as u32)).is_ok(),
        })
    }

    pub fn run(&self, trials: usize) -> Result<SimReport> {
        if trials == 0 {
            return Err(Error::InvalidParameter("trials must be positive".into()));
        }
        let outcomes = (0..trials).map(|t| self.trial(t)).collect::<Result<Vec<_>>>()?;
        Ok(summarize(&outcomes, self.seed))
    }
}

pub fn run_sw_binning(
    joint_abe: &JointPmf,
    n: usize,
    rate: f64,
    trials: usize,
    seed: u64,
) -> Result<SimReport> {
    SwBinningSim::new(joint_abe, n, rate, seed)?.run(trials)
}

/// Number of index sets `S` (increasing) with `seq[S] == msg`.
pub(crate) fn count_embeddings(seq: &[u8], msg: &[u8]) -> u64 {
    let k = msg.len();
    let mut dp = vec![0u64; k + 1];
    dp[0] = 1;
    for &s in seq {
        for j in (0..k).rev() {
            if msg[j] == s {
                dp[j + 1] += dp[j];
            }
        }
    }
    dp[k]
}

/// One trial of the erasure encoder-side-information scheme.
pub fn erasure_scheme_trial(params: ErasureParams, n: usize, seed: u64, t: usize) -> Result<TrialOutcome> {
    if n == 0 || n > MAX_ERASURE_N {
        return Err(Error::TooLarge(format!(
            "blocklength {n} outside 1..={MAX_ERASURE_N}"
        )));
    }
    let mut rng = trial_rng(seed, t);
    let mut a = vec![0u8; n];
    let mut bob_erased = vec![false; n];
    let mut eve_erased = vec![false; n];
    for i in 0..n {
        a[i] = rng.random::<bool>() as u8;
        bob_erased[i] = rng.random::<f64>() < params.p_b;
        eve_erased[i] = rng.random::<f64>() < params.p_e;
    }
    let msg: Vec<u8> = (0..n).filter(|&i| bob_erased[i]).map(|i| a[i]).collect();
    let k = msg.len();

    // Bob fills his erasures from the message in order
    let mut bits = msg.iter();
    let decoded: Vec<u8> = (0..n)
        .map(|i| if bob_erased[i] { *bits.next().expect("k bits") } else { a[i] })
        .collect();
    let error = decoded != a;

    let free: Vec<usize> = (0..n).filter(|&i| eve_erased[i]).collect();
    let pattern = params.p_b.powi(k as i32) * (1.0 - params.p_b).powi((n - k) as i32);
    let prior = 0.5f64.powi(free.len() as i32);
    let mut weights = Vec::with_capacity(1 << free.len());
    let mut cand = a.clone();
    let mut true_in_support = false;
    for mask in 0..(1usize << free.len()) {
        for (j, &i) in free.iter().enumerate() {
            cand[i] = ((mask >> j) & 1) as u8;
        }
        let w = prior * pattern * count_embeddings(&cand, &msg) as f64;
        if cand == a && w > 0.0 {
            true_in_support = true;
        }
        weights.push(w);
    }
    Ok(TrialOutcome {
        error,
        equivocation: exact_posterior_entropy(&weights)? / n as f64,
        side_info_only: free.len() as f64 / n as f64,
        true_in_bin: true_in_support,
    })
}

pub fn run_erasure_encoder_scheme(
    params: ErasureParams,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<SimReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let outcomes = (0..trials)
        .map(|t| erasure_scheme_trial(params, n, seed, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&outcomes, seed))
}
