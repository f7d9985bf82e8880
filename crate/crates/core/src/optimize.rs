//! Multi-start local ascent over conditional PMFs `p(u | conditioning tuple)`.
//!
//! Objectives are linear combinations of joint entropies of marginals of
//! `p(base) p(u | cond)`, which covers every region expression in the crate.
//! Each start draws every row from a symmetric Dirichlet(1) and then runs
//! projected coordinate ascent: one row at a time, a golden-section line
//! search along the segment toward each simplex vertex and toward one random
//! point. A start stops when a full sweep gains less than `tol`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::prob::{for_each_cell, JointPmf};

const GOLDEN_ITERS: usize = 32;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub max_iters: usize,
    /// Minimum objective gain per sweep before a start is declared converged.
    pub tol: f64,
    pub seed: u64,
    pub u_cardinality: Option<usize>,
    /// Starts whose final value lies within this distance of the best count as agreeing.
    pub agree_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            max_iters: 500,
            tol: 1e-9,
            seed: 0,
            u_cardinality: None,
            agree_tol: 1e-6,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::InvalidParameter("starts must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        if self.u_cardinality == Some(0) {
            return Err(Error::InvalidParameter("u_cardinality must be positive".into()));
        }
        Ok(())
    }
}

struct CompiledTerm {
    coef: f64,
    /// Marginal cell of each kept base cell.
    proj: Vec<usize>,
    size: usize,
}

/// `sum_k coef_k * H(S_k, U)` plus a constant from terms without `U`.
pub(crate) struct AuxObjective {
    base: Vec<f64>,
    row_of: Vec<usize>,
    pub(crate) n_rows: usize,
    pub(crate) card: usize,
    terms: Vec<CompiledTerm>,
    constant: f64,
}

/// One entropy term: coefficient, variable set, and whether `U` is included.
pub(crate) type Term<'a> = (f64, &'a [&'a str], bool);

impl AuxObjective {
    pub(crate) fn new(base: &JointPmf, cond: &[&str], card: usize, terms: &[Term]) -> Result<Self> {
        let shape = base.shape();
        let cond_idx = base.resolve(cond)?;
        let n_rows = cond_idx.iter().map(|&k| shape[k]).product();
        let mut compiled = Vec::new();
        let mut constant = 0.0;
        let resolved: Vec<Vec<usize>> = terms
            .iter()
            .map(|(_, vars, _)| base.resolve(vars))
            .collect::<Result<_>>()?;

        let mut cells = Vec::new();
        let mut row_of = Vec::new();
        let mut projs: Vec<Vec<usize>> = vec![Vec::new(); terms.len()];
        for_each_cell(&shape, |d, c| {
            let p = base.mass()[c];
            if p <= 0.0 {
                return;
            }
            cells.push(p);
            row_of.push(cond_idx.iter().fold(0, |acc, &k| acc * shape[k] + d[k]));
            for (t, idx) in resolved.iter().enumerate() {
                projs[t].push(idx.iter().fold(0, |acc, &k| acc * shape[k] + d[k]));
            }
        });

        for (((coef, _, with_aux), idx), proj) in terms.iter().zip(&resolved).zip(projs) {
            let size: usize = idx.iter().map(|&k| shape[k]).product();
            if *with_aux {
                compiled.push(CompiledTerm {
                    coef: *coef,
                    proj,
                    size,
                });
            } else {
                constant += coef * crate::prob::entropy_bits(&base.marginal_by_index(idx));
            }
        }
        Ok(Self {
            base: cells,
            row_of,
            n_rows,
            card,
            terms: compiled,
            constant,
        })
    }

    pub(crate) fn eval(&self, w: &[f64], scratch: &mut Vec<f64>) -> f64 {
        let card = self.card;
        let mut total = self.constant;
        for term in &self.terms {
            scratch.clear();
            scratch.resize(term.size * card, 0.0);
            for ((&m, &r), &p) in self.base.iter().zip(&self.row_of).zip(&term.proj) {
                let row = &w[r * card..(r + 1) * card];
                let out = &mut scratch[p * card..(p + 1) * card];
                for (o, &x) in out.iter_mut().zip(row) {
                    *o += m * x;
                }
            }
            let h: f64 = scratch
                .iter()
                .filter(|&&q| q > 0.0)
                .map(|&q| -q * q.log2())
                .sum();
            total += term.coef * h;
        }
        total
    }
}

pub(crate) struct AscentOutcome {
    pub w: Vec<f64>,
    pub value: f64,
    pub trace: Vec<f64>,
    pub agreeing: usize,
}

fn dirichlet_row(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut s = 0.0;
    for x in out.iter_mut() {
        // Exp(1) draws normalize to a Dirichlet(1) sample
        *x = -(1.0 - rng.random::<f64>()).ln();
        s += *x;
    }
    out.iter_mut().for_each(|x| *x /= s);
}

fn start_rng(seed: u64, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start as u64);
    rng
}

struct Ascent<'a> {
    obj: &'a AuxObjective,
    w: Vec<f64>,
    value: f64,
    scratch: Vec<f64>,
    row_buf: Vec<f64>,
}

impl Ascent<'_> {
    fn eval_row(&mut self, r: usize, x: &[f64], d: &[f64], t: f64) -> f64 {
        let card = self.obj.card;
        for j in 0..card {
            self.w[r * card + j] = (x[j] + t * d[j]).max(0.0);
        }
        self.obj.eval(&self.w, &mut self.scratch)
    }

    /// Line search on row `r` along `target - row`. Returns true if the row moved.
    fn line_search(&mut self, r: usize, target: &[f64]) -> bool {
        let card = self.obj.card;
        let x: Vec<f64> = self.w[r * card..(r + 1) * card].to_vec();
        let d: Vec<f64> = target.iter().zip(&x).map(|(y, x)| y - x).collect();
        if d.iter().all(|v| v.abs() < 1e-15) {
            return false;
        }
        // x + t d stays on the simplex for t in [lo, 1]
        let mut lo = f64::NEG_INFINITY;
        for (xi, di) in x.iter().zip(&d) {
            if *di > 0.0 {
                lo = lo.max(-xi / di);
            }
        }
        let lo = if lo.is_finite() { lo.min(0.0) } else { 0.0 };
        let hi = 1.0;

        let mut best_t = 0.0;
        let mut best_f = self.value;
        let consider = |t: f64, f: f64, best_t: &mut f64, best_f: &mut f64| {
            if f > *best_f {
                *best_f = f;
                *best_t = t;
            }
        };
        let f_hi = self.eval_row(r, &x, &d, hi);
        consider(hi, f_hi, &mut best_t, &mut best_f);
        if lo < 0.0 {
            let f_lo = self.eval_row(r, &x, &d, lo);
            consider(lo, f_lo, &mut best_t, &mut best_f);
        }

        let (mut a, mut b) = (lo, hi);
        let mut c = b - INV_PHI * (b - a);
        let mut e = a + INV_PHI * (b - a);
        let mut fc = self.eval_row(r, &x, &d, c);
        let mut fe = self.eval_row(r, &x, &d, e);
        consider(c, fc, &mut best_t, &mut best_f);
        consider(e, fe, &mut best_t, &mut best_f);
        for _ in 0..GOLDEN_ITERS {
            if fc >= fe {
                b = e;
                e = c;
                fe = fc;
                c = b - INV_PHI * (b - a);
                fc = self.eval_row(r, &x, &d, c);
                consider(c, fc, &mut best_t, &mut best_f);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + INV_PHI * (b - a);
                fe = self.eval_row(r, &x, &d, e);
                consider(e, fe, &mut best_t, &mut best_f);
            }
        }

        let row = &mut self.w[r * card..(r + 1) * card];
        if best_f > self.value {
            for j in 0..card {
                row[j] = (x[j] + best_t * d[j]).max(0.0);
            }
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
            self.value = self.obj.eval(&self.w, &mut self.scratch);
            true
        } else {
            row.copy_from_slice(&x);
            false
        }
    }

    fn run(&mut self, rng: &mut ChaCha8Rng, cfg: &OptimizerConfig) {
        let card = self.obj.card;
        let mut vertex = vec![0.0; card];
        for _ in 0..cfg.max_iters {
            let before = self.value;
            for r in 0..self.obj.n_rows {
                for k in 0..card {
                    vertex.iter_mut().for_each(|v| *v = 0.0);
                    vertex[k] = 1.0;
                    self.line_search(r, &vertex);
                }
                let mut buf = std::mem::take(&mut self.row_buf);
                dirichlet_row(rng, &mut buf);
                self.line_search(r, &buf);
                self.row_buf = buf;
            }
            if self.value - before < cfg.tol {
                break;
            }
        }
    }
}

/// Runs `cfg.starts` random starts followed by the caller's `extra` starts.
/// The best start wins by value, then by lowest index.
pub(crate) fn multistart_ascent(
    obj: &AuxObjective,
    cfg: &OptimizerConfig,
    extra: &[Vec<f64>],
) -> AscentOutcome {
    let size = obj.n_rows * obj.card;
    let mut trace = Vec::with_capacity(cfg.starts + extra.len());
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in 0..cfg.starts + extra.len() {
        let mut rng = start_rng(cfg.seed, start);
        let w = if start < cfg.starts {
            let mut w = vec![0.0; size];
            for row in w.chunks_mut(obj.card) {
                dirichlet_row(&mut rng, row);
            }
            w
        } else {
            extra[start - cfg.starts].clone()
        };
        let mut scratch = Vec::new();
        let value = obj.eval(&w, &mut scratch);
        let mut ascent = Ascent {
            obj,
            w,
            value,
            scratch,
            row_buf: vec![0.0; obj.card],
        };
        ascent.run(&mut rng, cfg);
        trace.push(ascent.value);
        if best.as_ref().is_none_or(|(_, v)| ascent.value > *v) {
            best = Some((ascent.w, ascent.value));
        }
    }
    let (w, value) = best.expect("at least one start");
    let agreeing = trace
        .iter()
        .filter(|&&v| (value - v).abs() <= cfg.agree_tol)
        .count();
    AscentOutcome {
        w,
        value,
        trace,
        agreeing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Alphabet;

    fn toy() -> JointPmf {
        let a = Alphabet::new("A", ["0", "1", "2"]).unwrap();
        JointPmf::new(vec![a], vec![0.2, 0.3, 0.5]).unwrap()
    }

    #[test]
    fn maximizing_h_u_recovers_h_a() {
        // max over p(u|a) of I(A;U) = H(U) - H(U|A) is H(A), attained by U = A.
        let j = toy();
        let terms: [Term; 2] = [(1.0, &[], true), (-1.0, &["A"], true)];
        let mut obj = AuxObjective::new(&j, &["A"], 4, &terms).unwrap();
        // H(U) - H(A,U) + H(A) gives I(A;U)
        obj.constant += j.entropy(&["A"], &[]).unwrap();
        let cfg = OptimizerConfig {
            starts: 4,
            ..Default::default()
        };
        let out = multistart_ascent(&obj, &cfg, &[]);
        assert!((out.value - j.entropy(&["A"], &[]).unwrap()).abs() < 1e-6);
        assert_eq!(out.trace.len(), 4);
    }

    #[test]
    fn eval_matches_direct_measure() {
        let j = toy();
        let terms: [Term; 2] = [(1.0, &["A"], true), (-1.0, &[], true)];
        let obj = AuxObjective::new(&j, &["A"], 2, &terms).unwrap();
        let w = [0.9, 0.1, 0.4, 0.6, 0.0, 1.0];
        let mut s = Vec::new();
        let got = obj.eval(&w, &mut s);
        let ch = crate::prob::Channel::new(
            vec![j.variable("A").unwrap().clone()],
            Alphabet::indexed("U", "u", 2).unwrap(),
            w.chunks(2).map(<[f64]>::to_vec).collect(),
        )
        .unwrap();
        let want = j.build_joint(&ch).unwrap().entropy(&["A"], &["U"]).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let bad = OptimizerConfig {
            starts: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(OptimizerConfig::default().validate().is_ok());
    }
}
