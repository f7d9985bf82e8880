//! Acceptance suite. Each test prints a single PASS/FAIL line; run with
//! `cargo test -p secrecy-region --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secrecy_region::binning::{run_erasure_encoder_scheme, run_sw_binning};
use secrecy_region::erasure::{make_erasure_joint, optimal_u_for_switches, ErasureParams};
use secrecy_region::orderings::{
    check_stochastic_degradation, composition_error, is_physically_degraded,
    search_less_noisy_violation, Direction, OrderingVerdict,
};
use secrecy_region::regions::{
    closed_form_delta, coded_inner_bound_sample, maximize_equivocation, secrecy_objective,
    ClosedFormMode,
};
use secrecy_region::{Alphabet, Channel, JointPmf, OptimizerConfig, SwitchConfig};

fn report(id: u32, checks: &[(String, bool)]) {
    let ok = checks.iter().all(|(_, c)| *c);
    let detail: Vec<String> = checks
        .iter()
        .map(|(d, c)| format!("{}{}", if *c { "" } else { "!" }, d))
        .collect();
    println!(
        "criterion {id:>2}: {}  {}",
        if ok { "PASS" } else { "FAIL" },
        detail.join("; ")
    );
    assert!(ok, "criterion {id} failed: {}", detail.join("; "));
}

fn erasure(pb: f64, pe: f64) -> JointPmf {
    make_erasure_joint(ErasureParams::new(pb, pe).unwrap())
}

fn dirichlet(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn bsc(flip: f64, x: usize, y: usize) -> f64 {
    if x == y {
        1.0 - flip
    } else {
        flip
    }
}

#[test]
fn criterion_01_erasure_region_without_encoder_si() {
    let cfg = OptimizerConfig::default();
    let mut checks = Vec::new();
    for (pb, pe) in [(0.1, 0.3), (0.25, 0.5), (0.2, 0.9)] {
        let j = erasure(pb, pe);
        let start = Instant::now();
        let res = maximize_equivocation(&j, SwitchConfig::NONE, &cfg).unwrap();
        let took = start.elapsed();
        let r_a_min = j.entropy(&["A"], &["B"]).unwrap();
        checks.push((
            format!("({pb},{pe}) delta*={:.6}", res.delta_star),
            (res.delta_star - (pe - pb)).abs() <= 1e-3,
        ));
        checks.push((
            format!("r_a_min={r_a_min:.12}"),
            (r_a_min - pb).abs() <= 1e-9,
        ));
        checks.push((format!("{:.2}s", took.as_secs_f64()), took < Duration::from_secs(30)));
    }
    report(1, &checks);
}

#[test]
fn criterion_02_degraded_bob_has_no_secrecy() {
    let cfg = OptimizerConfig::default();
    let checks: Vec<_> = [(0.4, 0.2), (0.9, 0.1)]
        .into_iter()
        .map(|(pb, pe)| {
            let d = maximize_equivocation(&erasure(pb, pe), SwitchConfig::NONE, &cfg)
                .unwrap()
                .delta_star;
            (format!("({pb},{pe}) delta*={d:.3e}"), d <= 1e-3)
        })
        .collect();
    report(2, &checks);
}

#[test]
fn criterion_03_encoder_side_information() {
    let cfg = OptimizerConfig::default();
    let params = ErasureParams::new(0.25, 0.5).unwrap();
    let j = make_erasure_joint(params);
    let u = optimal_u_for_switches(params, SwitchConfig::SB).unwrap();
    let at_u = secrecy_objective(&j, &u, SwitchConfig::SB).unwrap();
    let sb = maximize_equivocation(&j, SwitchConfig::SB, &cfg).unwrap().delta_star;
    let h_ae = j.entropy(&["A"], &["E"]).unwrap();
    let se = closed_form_delta(&j, ClosedFormMode::SeClosed).unwrap();
    let weak = maximize_equivocation(&erasure(0.5, 0.3), SwitchConfig::SB, &cfg)
        .unwrap()
        .delta_star;
    report(
        3,
        &[
            (format!("objective at explicit U={at_u:.12}"), (at_u - 0.375).abs() <= 1e-9),
            (
                format!("sb delta*={sb:.6} in [0.365, {h_ae}]"),
                sb >= 0.375 - 1e-2 && sb <= h_ae + 1e-9,
            ),
            (format!("se closed form={se:.12}"), (se - 0.375).abs() <= 1e-12),
            (format!("(0.5,0.3) sb delta*={weak:.6}"), weak >= 0.14),
        ],
    );
}

#[test]
fn criterion_04_objective_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let alph = |n: &str| Alphabet::indexed(n, "s", 3).unwrap();
    let u_alph = Alphabet::indexed("U", "u", 3).unwrap();
    let (mut worst_cor, mut worst_obj) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let mass = dirichlet(&mut rng, 27);
        let j = JointPmf::new(vec![alph("A"), alph("B"), alph("E")], mass).unwrap();
        let base = j.mutual_information(&["A"], &["B"], &[]).unwrap()
            - j.mutual_information(&["A"], &["E"], &[]).unwrap();
        for _ in 0..100 {
            let rows: Vec<Vec<f64>> = (0..3).map(|_| dirichlet(&mut rng, 3)).collect();
            let u = Channel::new(vec![alph("A")], u_alph.clone(), rows).unwrap();
            let full = j.build_joint(&u).unwrap();
            let mi = |x: &str, y: &str, g: &[&str]| full.mutual_information(&[x], &[y], g).unwrap();
            let h = |t: &str, g: &[&str]| full.entropy(&[t], g).unwrap();
            let inner = mi("A", "B", &["U"]) - mi("A", "E", &["U"]);
            let lhs = base - inner;
            let rhs = mi("B", "U", &[]) - mi("E", "U", &[]);
            worst_cor = worst_cor.max((lhs - rhs).abs());
            let obj = secrecy_objective(&j, &u, SwitchConfig::NONE).unwrap();
            worst_obj = worst_obj.max((obj - (h("A", &["E", "U"]) - h("A", &["B", "U"]))).abs());
        }
    }
    let took = start.elapsed();
    report(
        4,
        &[
            (format!("max chain residual={worst_cor:.2e}"), worst_cor <= 1e-10),
            (format!("max objective residual={worst_obj:.2e}"), worst_obj <= 1e-10),
            (format!("{:.2}s", took.as_secs_f64()), took < Duration::from_secs(60)),
        ],
    );
}

#[test]
fn criterion_05_ordering_verdicts() {
    let cfg = OptimizerConfig::default();
    let j = erasure(0.1, 0.3);
    let fwd = check_stochastic_degradation(&j, Direction::EWrtB).unwrap();
    let (comp, erase) = match &fwd {
        OrderingVerdict::Degraded { certificate, .. } => (
            composition_error(&j, Direction::EWrtB, certificate).unwrap(),
            certificate.prob(&["0"], "e").unwrap(),
        ),
        _ => (f64::INFINITY, f64::NAN),
    };
    let rev = check_stochastic_degradation(&j, Direction::BWrtE).unwrap();
    let ln_fwd = search_less_noisy_violation(&j, Direction::EWrtB, &cfg).unwrap();
    let ln_rev = search_less_noisy_violation(&j, Direction::BWrtE, &cfg).unwrap();
    let gap = match ln_rev {
        OrderingVerdict::LessNoisyFalsified { gap, .. } => gap,
        _ => 0.0,
    };
    report(
        5,
        &[
            (format!("forward {}", fwd.kind()), fwd.kind() == "degraded"),
            (format!("composition error={comp:.1e}"), comp <= 1e-8),
            (format!("certificate erasure={erase:.9}"), (erase - 2.0 / 9.0).abs() <= 1e-6),
            (format!("reverse {}", rev.kind()), rev == OrderingVerdict::NotDegraded),
            (
                format!("less-noisy forward {}", ln_fwd.kind()),
                ln_fwd.kind() == "less_noisy_not_falsified",
            ),
            (format!("less-noisy reverse gap={gap:.6}"), gap >= 0.19),
        ],
    );
}

#[test]
fn criterion_06_encoder_eve_si_useless_when_degraded() {
    let cfg = OptimizerConfig::default();
    let bit = |n: &str| Alphabet::new(n, ["0", "1"]).unwrap();
    let j = JointPmf::from_fn(vec![bit("A"), bit("B"), bit("E")], |d| {
        0.5 * bsc(0.1, d[0], d[1]) * bsc(0.2, d[1], d[2])
    })
    .unwrap();
    let physical = is_physically_degraded(&j, Direction::EWrtB).unwrap();
    let none = maximize_equivocation(&j, SwitchConfig::NONE, &cfg).unwrap().delta_star;
    let se = maximize_equivocation(&j, SwitchConfig::SE, &cfg).unwrap().delta_star;
    report(
        6,
        &[
            ("A-B-E Markov".to_string(), physical),
            (format!("se={se:.6} none={none:.6}"), se <= none + 1e-2),
        ],
    );
}

#[test]
fn criterion_07_binning_simulator() {
    let start = Instant::now();
    let j = erasure(0.5, 0.8);
    let full = run_sw_binning(&j, 10, 1.0, 200, 0).unwrap();
    let single = run_sw_binning(&j, 10, 0.0, 500, 0).unwrap();
    let h_ae = j.entropy(&["A"], &["E"]).unwrap();
    let rep = run_sw_binning(&j, 16, 0.65, 500, 0).unwrap();
    let floor = h_ae - 0.65 - 3.0 * rep.equiv_stderr;
    let took = start.elapsed();
    report(
        7,
        &[
            (
                format!("rate 1: p_e={} equiv={}", full.p_e_hat, full.equiv_hat),
                full.p_e_hat == 0.0 && full.equiv_hat == 0.0,
            ),
            (
                format!("single bin equiv={:.4} vs {h_ae}", single.equiv_hat),
                (single.equiv_hat - h_ae).abs() <= 3.0 * single.equiv_stderr,
            ),
            (format!("n=16 p_e={:.3}", rep.p_e_hat), rep.p_e_hat <= 0.25),
            (
                format!("equiv={:.4}", rep.equiv_hat),
                (0.10..=0.30).contains(&rep.equiv_hat),
            ),
            (format!("floor {floor:.4}"), rep.equiv_hat >= floor),
            (format!("{:.2}s", took.as_secs_f64()), took < Duration::from_secs(300)),
        ],
    );
}

#[test]
fn criterion_08_erasure_encoder_scheme() {
    let start = Instant::now();
    let params = ErasureParams::new(0.25, 0.5).unwrap();
    let r12 = run_erasure_encoder_scheme(params, 12, 2000, 0).unwrap();
    let r4 = run_erasure_encoder_scheme(params, 4, 2000, 0).unwrap();
    let d12 = (r12.equiv_hat - 0.375).abs();
    let d4 = (r4.equiv_hat - 0.375).abs();
    let took = start.elapsed();
    report(
        8,
        &[
            (format!("p_e={}", r12.p_e_hat), r12.p_e_hat == 0.0),
            (format!("n=12 equiv={:.4}", r12.equiv_hat), d12 <= 0.1),
            (
                format!("trend |{d12:.4}| vs |{d4:.4}|+2s"),
                d12 <= d4 + 2.0 * r12.equiv_stderr,
            ),
            (format!("{:.2}s", took.as_secs_f64()), took < Duration::from_secs(300)),
        ],
    );
}

#[test]
fn criterion_09_region_depends_only_on_marginals() {
    let cfg = OptimizerConfig::default();
    let (pb, pe) = (0.1, 0.3);
    let independent = erasure(pb, pe);
    // Bob's erasures nested inside Eve's: same p(a,b) and p(a,e)
    let nested = JointPmf::from_fn(
        independent.variables().to_vec(),
        |d| {
            let (a, b, e) = (d[0], d[1], d[2]);
            let p = match (b == 2, e == 2) {
                (true, true) => pb,
                (false, true) if b == a => pe - pb,
                (false, false) if b == a && e == a => 1.0 - pe,
                _ => 0.0,
            };
            0.5 * p
        },
    )
    .unwrap();
    let mut checks = Vec::new();
    for (x, y) in [(&["A", "B"], &["A", "B"]), (&["A", "E"], &["A", "E"])] {
        let m1 = independent.marginalize(x).unwrap();
        let m2 = nested.marginalize(y).unwrap();
        let diff = m1
            .mass()
            .iter()
            .zip(m2.mass())
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        checks.push((format!("{} marginal diff={diff:.1e}", x.join("")), diff <= 1e-15));
    }
    let d1 = maximize_equivocation(&independent, SwitchConfig::NONE, &cfg).unwrap().delta_star;
    let d2 = maximize_equivocation(&nested, SwitchConfig::NONE, &cfg).unwrap().delta_star;
    checks.push((format!("delta* {d1:.6} vs {d2:.6}"), (d1 - d2).abs() <= 1e-3));
    for dir in [Direction::EWrtB, Direction::BWrtE] {
        let k1 = check_stochastic_degradation(&independent, dir).unwrap().kind();
        let k2 = check_stochastic_degradation(&nested, dir).unwrap().kind();
        checks.push((format!("{dir:?} {k1}/{k2}"), k1 == k2));
        let l1 = search_less_noisy_violation(&independent, dir, &cfg).unwrap().kind();
        let l2 = search_less_noisy_violation(&nested, dir, &cfg).unwrap().kind();
        checks.push((format!("{dir:?} {l1}/{l2}"), l1 == l2));
    }
    report(9, &checks);
}

#[test]
fn criterion_10_coded_corner_recovery() {
    let cfg = OptimizerConfig::default();
    let mut checks = Vec::new();
    for (pb, pe) in [(0.1, 0.3), (0.25, 0.5), (0.2, 0.9)] {
        let ace = erasure(pb, pe).rename("B", "C").unwrap();
        let c = ace.variable("C").unwrap().clone();
        let id = Channel::identity(&c, "V").unwrap();
        let s = coded_inner_bound_sample(&ace, &id, &cfg).unwrap();
        checks.push((
            format!("({pb},{pe}) delta*={:.6} r_a={:.12}", s.delta_star, s.corner.r_a),
            (s.delta_star - (pe - pb)).abs() <= 1e-3 && (s.corner.r_a - pb).abs() <= 1e-9,
        ));
        checks.push(("sum_ok".to_string(), s.sum_ok));
        let constant = Channel::constant(vec![c], "V").unwrap();
        let z = coded_inner_bound_sample(&ace, &constant, &cfg).unwrap();
        checks.push((format!("constant V delta*={}", z.delta_star), z.delta_star == 0.0));
    }
    report(10, &checks);
}
