//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).

mod common;

use common::{random_cq_channel, random_dephasing_channel, random_feasible_sdp, random_qubit_channel};
use doeblin::applications::{
    barren_plateau_bound, convergence_time_bound, error_mitigation_min_samples, fairness_beta,
    hypothesis_testing_sc_bounds, simulate_convergence, simulate_gradient_check, CircuitLayer,
    ConvergenceMode, NoisyCircuitSpec,
};
use doeblin::channels::{Channel, Family, QuantumState};
use doeblin::divergences::{fidelity, hellinger_half};
use doeblin::doeblin::{
    alpha, alpha_cone, alpha_plus, alpha_wang, expect_optimal, gad_alpha_wang, reverse_doeblin,
    signed_singular_values_3x3, ConeChoice,
};
use doeblin::linalg::{pauli, ComplexMatrix, HermitianOperator, SubsystemDims, C64};
use doeblin::oracles::{
    alpha_i_seesaw, eta_tr_estimate, exclusion_error, random_povm, random_state, Ensemble,
};
use doeblin::sdp::{SdpOptions, SdpStatus};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn gad(p: f64, eta: f64) -> Channel {
    Channel::make(Family::Gad { p, eta }).unwrap()
}

fn pbr() -> Channel {
    let zero = QuantumState::basis_state(2, 0);
    let plus = QuantumState::pure_state(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
    Channel::make(Family::Cq { states: vec![zero, plus] }).unwrap()
}

fn finish(name: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("[{name}] PASS");
    } else {
        println!("[{name}] FAIL: {}", failures.join("; "));
        panic!("{name} failed with {} violation(s)", failures.len());
    }
}

const P_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const ETA_GRID: [f64; 5] = [0.04, 0.25, 0.49, 0.81, 1.0];

#[test]
fn criterion_01_gad_alpha_closed_form() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for p in P_GRID {
        for eta in ETA_GRID {
            let got = expect_optimal(&alpha(&gad(p, eta)).unwrap()).unwrap();
            let want = (1.0 - eta.sqrt()).powi(2);
            if (got - want).abs() > 1e-6 {
                failures.push(format!("alpha(GAD({p},{eta})) = {got} vs {want}"));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 5.0 {
        failures.push(format!("runtime {elapsed:.2}s exceeded 5s"));
    }
    finish("criterion 1: GAD alpha grid", failures);
}

#[test]
fn criterion_02_gad_alpha_wang_piecewise() {
    let mut failures = Vec::new();
    let mut points: Vec<(f64, f64)> = Vec::new();
    for p in P_GRID {
        for eta in ETA_GRID {
            points.push((p, eta));
        }
    }
    for p in [0.05, 1.0 / 6.0, 5.0 / 6.0, 0.95] {
        points.push((p, 0.25));
    }
    for (p, eta) in points {
        let got = expect_optimal(&alpha_wang(&gad(p, eta)).unwrap()).unwrap();
        let want = gad_alpha_wang(p, eta);
        if (got - want).abs() > 1e-6 {
            failures.push(format!("alpha_wang(GAD({p},{eta})) = {got} vs {want}"));
        }
    }
    finish("criterion 2: GAD alpha_wang piecewise", failures);
}

#[test]
fn criterion_03_pbr_example() {
    let mut failures = Vec::new();
    let single = expect_optimal(&alpha(&pbr()).unwrap()).unwrap();
    let want = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
    if (single - want).abs() > 1e-6 {
        failures.push(format!("alpha(PBR) = {single} vs {want}"));
    }
    let squared = Channel::tensor(&pbr(), &pbr()).unwrap();
    let twice = expect_optimal(&alpha(&squared).unwrap()).unwrap();
    if twice.abs() > 1e-6 {
        failures.push(format!("alpha(PBR x PBR) = {twice}"));
    }
    // Explicit dual witness: Y = sum_x |x><x| (x) c_x u_x u_x^T.
    let dyads: [(usize, f64, [f64; 4]); 4] = [
        (0, 0.5, [0.0, 1.0, 1.0, 0.0]),
        (1, 0.25, [1.0, -1.0, 1.0, 1.0]),
        (2, 0.25, [1.0, 1.0, -1.0, 1.0]),
        (3, 0.5, [1.0, 0.0, 0.0, -1.0]),
    ];
    let mut y = ComplexMatrix::zeros(16, 16);
    for (x, c, u) in dyads {
        for r in 0..4 {
            for s in 0..4 {
                y[(x * 4 + r, x * 4 + s)] = C64::new(c * u[r] * u[s], 0.0);
            }
        }
    }
    let y = HermitianOperator::new(y).unwrap();
    let marginal = doeblin::linalg::partial_trace(&y, &SubsystemDims::two(4, 4), &[1]).unwrap();
    let marg_dev = marginal.sub(&HermitianOperator::identity(4)).max_abs();
    if marg_dev > 1e-9 {
        failures.push(format!("witness Tr_A Y deviates from I by {marg_dev:.2e}"));
    }
    let pairing = y.hs_inner(squared.choi());
    if pairing.abs() > 1e-9 {
        failures.push(format!("<Choi, Y> = {pairing:.2e}"));
    }
    finish("criterion 3: PBR example with explicit witness", failures);
}

#[test]
fn criterion_04_measurement_formula() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for trial in 0..50 {
        let d = if trial % 2 == 0 { 2 } else { 3 };
        let outcomes = 2 + trial % 3;
        let povm = random_povm(d, outcomes, &mut rng);
        let want: f64 = povm
            .iter()
            .map(|e| e.min_eigenvalue().unwrap())
            .sum();
        let ch = Channel::make(Family::Measurement { povm }).unwrap();
        let a = expect_optimal(&alpha(&ch).unwrap()).unwrap();
        let plus = expect_optimal(&alpha_plus(&ch).unwrap()).unwrap();
        let wang = expect_optimal(&alpha_wang(&ch).unwrap()).unwrap();
        if (a - want).abs() > 1e-6 {
            failures.push(format!("trial {trial}: alpha {a} vs sum of min eigs {want}"));
        }
        if (plus - a).abs() > 1e-6 || (wang - a).abs() > 1e-6 {
            failures.push(format!(
                "trial {trial}: collapse violated (alpha {a}, plus {plus}, wang {wang})"
            ));
        }
    }
    finish("criterion 4: measurement channel formula", failures);
}

#[test]
fn criterion_05_qubit_formula_and_heuristics() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for trial in 0..200 {
        let raw = random_qubit_channel(&mut rng);
        let (t, tmat) = raw.stokes_of_qubit().unwrap();
        let ch = Channel::make(Family::Stokes { t, tmat }).unwrap();
        let report = alpha(&ch).unwrap();
        let analytic = report.analytic_value.unwrap();
        if report.status != SdpStatus::Optimal {
            failures.push(format!("trial {trial}: alpha status {:?}", report.status));
            continue;
        }
        if (report.value - analytic).abs() > 1e-6 {
            failures.push(format!(
                "trial {trial}: SDP {} vs tetrahedron {analytic}",
                report.value
            ));
        }
        let (sv, _) = signed_singular_values_3x3(&tmat);
        let eta_hat = eta_tr_estimate(&ch, 1000, 5000 + trial).unwrap();
        if eta_hat > sv[0] + 1e-4 {
            failures.push(format!("trial {trial}: eta_hat {eta_hat} above ||T|| {}", sv[0]));
        }
        if eta_hat < sv[0] - 1e-3 {
            failures.push(format!("trial {trial}: eta_hat {eta_hat} misses ||T|| {}", sv[0]));
        }
        let ppt = expect_optimal(&alpha_cone(&ch, ConeChoice::Ppt).unwrap()).unwrap();
        if 1.0 - ppt < sv[0] - 1e-6 {
            failures.push(format!(
                "trial {trial}: 1 - alpha_PPT = {} below ||T|| {}",
                1.0 - ppt,
                sv[0]
            ));
        }
        if failures.len() > 8 {
            break;
        }
    }
    finish("criterion 5: qubit formula and eta heuristic", failures);
}

#[test]
fn criterion_06_dephasing_and_identity() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    for trial in 0..20 {
        let d = if trial % 2 == 0 { 2 } else { 3 };
        let env = 2 + trial % 3;
        let ch = random_dephasing_channel(d, env, &mut rng);
        let a = expect_optimal(&alpha(&ch).unwrap()).unwrap();
        if a.abs() > 1e-7 {
            failures.push(format!("trial {trial}: alpha(dephasing d={d}) = {a:.2e}"));
        }
    }
    for d in [2usize, 3] {
        let a = expect_optimal(&alpha(&Channel::identity(d)).unwrap()).unwrap();
        if a.abs() > 1e-7 {
            failures.push(format!("alpha(identity_{d}) = {a:.2e}"));
        }
    }
    finish("criterion 6: dephasing and identity", failures);
}

#[test]
fn criterion_07_property_suite() {
    let start = Instant::now();
    let slack = 1e-6;
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    for trial in 0..100 {
        let n1 = random_qubit_channel(&mut rng);
        let n2 = random_qubit_channel(&mut rng);
        let a1 = expect_optimal(&alpha(&n1).unwrap()).unwrap();
        let a2 = expect_optimal(&alpha(&n2).unwrap()).unwrap();

        // Submultiplicativity and alpha_wang multiplicativity.
        let product = Channel::tensor(&n1, &n2).unwrap();
        let ap = expect_optimal(&alpha(&product).unwrap()).unwrap();
        if ap > a1 * a2 + slack {
            failures.push(format!("trial {trial}: submultiplicativity {ap} > {}", a1 * a2));
        }
        let w1 = expect_optimal(&alpha_wang(&n1).unwrap()).unwrap();
        let w2 = expect_optimal(&alpha_wang(&n2).unwrap()).unwrap();
        let wp = expect_optimal(&alpha_wang(&product).unwrap()).unwrap();
        if (wp - w1 * w2).abs() > slack {
            failures.push(format!(
                "trial {trial}: wang multiplicativity off by {:.2e}",
                (wp - w1 * w2).abs()
            ));
        }

        // Concatenation.
        let composed = Channel::compose(&n2, &n1).unwrap();
        let ac = expect_optimal(&alpha(&composed).unwrap()).unwrap();
        if 1.0 - ac > (1.0 - a1) * (1.0 - a2) + slack {
            failures.push(format!("trial {trial}: concatenation violated"));
        }

        // Concavity over a 5-term mixture.
        let extra: Vec<Channel> = (0..3).map(|_| random_qubit_channel(&mut rng)).collect();
        let mut weights: Vec<f64> = (0..5).map(|_| rng.random::<f64>() + 0.01).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let channels = [&n1, &n2, &extra[0], &extra[1], &extra[2]];
        let mut mix = HermitianOperator::zeros(4);
        let mut avg = 0.0;
        for (ch, w) in channels.iter().zip(&weights) {
            mix = mix.add(&ch.choi().scale(*w));
            avg += w * expect_optimal(&alpha(ch).unwrap()).unwrap();
        }
        let mixture = Channel::from_choi(2, 2, mix).unwrap();
        let am = expect_optimal(&alpha(&mixture).unwrap()).unwrap();
        if am < avg - slack {
            failures.push(format!("trial {trial}: concavity {am} < {avg}"));
        }

        // Data-processing monotonicity.
        let pre = random_qubit_channel(&mut rng);
        let post = random_qubit_channel(&mut rng);
        let processed = Channel::compose(&post, &Channel::compose(&n1, &pre).unwrap()).unwrap();
        let aproc = expect_optimal(&alpha(&processed).unwrap()).unwrap();
        if aproc < a1 - slack {
            failures.push(format!("trial {trial}: data processing {aproc} < {a1}"));
        }

        // Ordering chain.
        let plus = expect_optimal(&alpha_plus(&n1).unwrap()).unwrap();
        let ppt = expect_optimal(&alpha_cone(&n1, ConeChoice::Ppt).unwrap()).unwrap();
        let sym2 = expect_optimal(&alpha_cone(&n1, ConeChoice::PptSym2).unwrap()).unwrap();
        let seesaw = alpha_i_seesaw(&n1, 3, 7000 + trial).unwrap();
        let chain = [
            (plus, w1, "alpha_+ <= alpha_wang"),
            (w1, a1, "alpha_wang <= alpha"),
            (a1, sym2, "alpha <= ppt_sym2"),
            (sym2, ppt + slack, "ppt_sym2 <= ppt"),
            (ppt, seesaw + slack, "ppt <= seesaw"),
        ];
        for (lo, hi, label) in chain {
            if lo > hi + slack {
                failures.push(format!("trial {trial}: {label} violated ({lo} vs {hi})"));
            }
        }
        if failures.len() > 8 {
            break;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 180.0 {
        failures.push(format!("runtime {elapsed:.1}s exceeded 3min"));
    }
    finish("criterion 7: property suite on 100 qubit pairs", failures);
}

#[test]
fn criterion_08_exclusion_cross_check() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    for trial in 0..50 {
        let n_states = 2 + trial % 3;
        let ch = random_cq_channel(n_states, &mut rng);
        let a = expect_optimal(&alpha(&ch).unwrap()).unwrap();
        let states = match ch.family() {
            Family::Cq { states } => states.clone(),
            _ => unreachable!(),
        };
        let err = exclusion_error(&Ensemble::uniform(states).unwrap()).unwrap();
        let scaled = err * n_states as f64;
        if (scaled - a).abs() > 1e-6 {
            failures.push(format!("trial {trial}: |X| exclusion {scaled} vs alpha {a}"));
        }
    }
    finish("criterion 8: exclusion cross-check", failures);
}

#[test]
fn criterion_09_reverse_doeblin() {
    let mut failures = Vec::new();
    for p in P_GRID {
        for eta in ETA_GRID {
            let got = expect_optimal(&reverse_doeblin(&gad(p, eta)).unwrap()).unwrap();
            let want = 1.0 - eta;
            if (got - want).abs() > 1e-6 {
                failures.push(format!("reverse(GAD({p},{eta})) = {got} vs {want}"));
            }
        }
    }
    let id = expect_optimal(&reverse_doeblin(&Channel::identity(2)).unwrap()).unwrap();
    if id.abs() > 1e-7 {
        failures.push(format!("reverse(identity) = {id:.2e}"));
    }
    finish("criterion 9: reverse coefficient", failures);
}

#[test]
fn criterion_10_hellinger_half() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    // Quadrature versus the commuting closed form on diagonal pairs.
    for trial in 0..50 {
        let d = 2 + trial % 3;
        let mut p = vec![0.0; d];
        let mut q = vec![0.0; d];
        let (mut sp, mut sq) = (0.0, 0.0);
        for k in 0..d {
            p[k] = rng.random::<f64>() + 0.02;
            q[k] = rng.random::<f64>() + 0.02;
            sp += p[k];
            sq += q[k];
        }
        let mut rho = ComplexMatrix::zeros(d, d);
        let mut sigma = ComplexMatrix::zeros(d, d);
        let mut closed = 0.0;
        for k in 0..d {
            rho[(k, k)] = C64::new(p[k] / sp, 0.0);
            sigma[(k, k)] = C64::new(q[k] / sq, 0.0);
            closed += (p[k] / sp * q[k] / sq).sqrt();
        }
        let closed = 2.0 * (1.0 - closed);
        let h = hellinger_half(
            &HermitianOperator::new(rho).unwrap(),
            &HermitianOperator::new(sigma).unwrap(),
        )
        .unwrap();
        if (h - closed).abs() > 1e-7 {
            failures.push(format!("trial {trial}: quadrature {h} vs closed {closed}"));
        }
    }
    // Fidelity lower bound on non-commuting pairs.
    for trial in 0..50 {
        let rho = random_state(2 + trial % 2, &mut rng);
        let sigma = random_state(2 + trial % 2, &mut rng);
        let h = hellinger_half(rho.density(), sigma.density()).unwrap();
        let f = fidelity(rho.density(), sigma.density()).unwrap();
        if h < 2.0 * (1.0 - f.sqrt()) - 1e-7 {
            failures.push(format!("trial {trial}: H {h} below 2(1-sqrt F)"));
        }
    }
    // Orthogonal pure states.
    let zero = QuantumState::basis_state(2, 0);
    let one = QuantumState::basis_state(2, 1);
    let h = hellinger_half(zero.density(), one.density()).unwrap();
    if (h - 2.0).abs() > 1e-8 {
        failures.push(format!("orthogonal pure value {h} vs 2"));
    }
    finish("criterion 10: Hellinger quadrature", failures);
}

#[test]
fn criterion_11_application_arithmetic() {
    let mut failures = Vec::new();
    // Barren 0.5105.
    let barren = barren_plateau_bound(&[0.1; 20], 1, 1.0, false).unwrap();
    if (barren - 0.5105).abs() > 5e-5 {
        failures.push(format!("barren {barren} vs 0.5105"));
    }
    // Mitigation 14.21.
    let mitigation = error_mitigation_min_samples(&[0.25; 10], 0.1).unwrap();
    if (mitigation - 14.21).abs() > 5e-3 {
        failures.push(format!("mitigation {mitigation} vs 14.21"));
    }
    // Hypothesis lower 0.81 / upper 74 on GAD(0.3, 0.25), |0>, |1>.
    let report = hypothesis_testing_sc_bounds(
        &QuantumState::basis_state(2, 0),
        &QuantumState::basis_state(2, 1),
        &gad(0.3, 0.25),
        0.05,
        0.5,
    )
    .unwrap();
    let lower = report.lower.unwrap_or(f64::NAN);
    let upper = report.upper.unwrap_or(f64::NAN);
    if (lower - 0.81).abs() > 1e-6 {
        failures.push(format!("hypothesis lower {lower} vs 0.81"));
    }
    if (upper - 74.0).abs() > 1e-9 {
        failures.push(format!("hypothesis upper {upper} vs 74"));
    }
    // Mixing bound 17.
    let mixing = convergence_time_bound(0.25, 0.01).unwrap();
    if mixing != Some(17) {
        failures.push(format!("mixing bound {mixing:?} vs 17"));
    }
    // Fairness 0.075.
    let fair = fairness_beta(0.1, 0.25).unwrap();
    if (fair - 0.075).abs() > 1e-12 {
        failures.push(format!("fairness {fair} vs 0.075"));
    }
    finish("criterion 11: application arithmetic", failures);
}

#[test]
fn criterion_12_simulator_soundness() {
    let start = Instant::now();
    let mut failures = Vec::new();
    // Mixing: eigenbasis worst start reproduces t_hat = 4; Haar-sampled
    // starts stay within the bound.
    let ch = gad(1.0, 0.25);
    let report = simulate_convergence(&ch, 0.01, ConvergenceMode::Mixing, 0, 12).unwrap();
    let emp = report.empirical.unwrap();
    if emp.measured != 4.0 {
        failures.push(format!("mixing t_hat {} vs 4", emp.measured));
    }
    if report.value != 17.0 || !emp.bound_respected {
        failures.push(format!("mixing bound {} respected {}", report.value, emp.bound_respected));
    }
    let sampled = simulate_convergence(&ch, 0.01, ConvergenceMode::Mixing, 200, 12).unwrap();
    let semp = sampled.empirical.unwrap();
    if !semp.bound_respected {
        failures.push(format!("sampled mixing t_hat {} above bound", semp.measured));
    }

    // Gradient check: 1-qubit depth-3 GAD circuit, 50 random angle draws per layer.
    let noise = gad(0.3, 0.25);
    let layers = (0..3)
        .map(|_| CircuitLayer {
            generators: vec![pauli(1), pauli(3)],
            thetas: vec![0.0, 0.0],
            noise: noise.clone(),
        })
        .collect();
    let spec = NoisyCircuitSpec {
        n_qudits: 1,
        d: 2,
        dim_r: 1,
        initial: QuantumState::basis_state(2, 0),
        observable: pauli(3),
        layers,
    };
    for i in 1..=3 {
        for j in 1..=2 {
            let g = simulate_gradient_check(&spec, i, j, 50, 120 + (i * 2 + j) as u64).unwrap();
            if !g.bound_respected {
                failures.push(format!(
                    "layer {i} param {j}: gradient {} above bound {}",
                    g.max_abs_gradient, g.bound
                ));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 120.0 {
        failures.push(format!("runtime {elapsed:.1}s exceeded 2min"));
    }
    finish("criterion 12: simulator soundness", failures);
}

#[test]
fn criterion_13_solver_health() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(130);
    let opts = SdpOptions::default();
    for trial in 0..200 {
        let inst = random_feasible_sdp(&mut rng, 16, 60);
        let sol = inst.problem.solve(&opts).unwrap();
        if sol.status != SdpStatus::Optimal {
            failures.push(format!("trial {trial}: status {:?}", sol.status));
            continue;
        }
        if sol.gap > 1e-8 {
            failures.push(format!("trial {trial}: relative gap {:.2e}", sol.gap));
        }
        // Primal feasibility residual recomputed from the raw data.
        let mut num = 0.0;
        let mut bnorm = 0.0;
        for (terms, rhs) in inst.rows.iter().zip(&inst.b) {
            let got: f64 = terms.iter().map(|(j, a)| a.hs_inner(&sol.primal[*j])).sum();
            num += (rhs - got).powi(2);
            bnorm += rhs * rhs;
        }
        let pfeas = num.sqrt() / (1.0 + bnorm.sqrt());
        if pfeas > 1e-8 {
            failures.push(format!("trial {trial}: primal residual {pfeas:.2e}"));
        }
        // Weak duality: the dual certificate never exceeds the primal value.
        let dobj: f64 = inst.b.iter().zip(&sol.dual_y).map(|(b, y)| b * y).sum();
        if dobj > sol.value + 1e-7 * (1.0 + sol.value.abs()) {
            failures.push(format!(
                "trial {trial}: dual certificate {dobj} exceeds primal {}",
                sol.value
            ));
        }
        // Dual feasibility: C - A*(y) must be (almost) PSD per block; its
        // most negative eigenvalue is the dual residual.
        let mut slack = inst.objective.clone();
        for (i, terms) in inst.rows.iter().enumerate() {
            for (j, a) in terms {
                slack[*j] = slack[*j].sub(&a.scale(sol.dual_y[i]));
            }
        }
        let cnorm: f64 = inst
            .objective
            .iter()
            .map(|c| c.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt();
        for s in &slack {
            let min = s.min_eigenvalue().unwrap();
            if min < -1e-8 * (1.0 + cnorm) {
                failures.push(format!("trial {trial}: dual residual {min:.2e}"));
                break;
            }
        }
        // Primal PSD within tolerance.
        for x in &sol.primal {
            if x.min_eigenvalue().unwrap() < -1e-8 {
                failures.push(format!("trial {trial}: primal block not PSD"));
                break;
            }
        }
        if failures.len() > 8 {
            break;
        }
    }

    // Injected primal-infeasible instances: negative trace forced on PSD.
    for trial in 0..20 {
        let mut p = doeblin::sdp::SdpProblem::new();
        let dim = 2 + trial % 4;
        let j = p.add_block("x", dim, doeblin::sdp::Cone::Psd);
        p.add_constraint(
            vec![(j, HermitianOperator::identity(dim))],
            -1.0 - trial as f64 * 0.1,
        );
        let sol = p.solve(&opts).unwrap();
        if sol.status != SdpStatus::PrimalInfeasible {
            failures.push(format!(
                "injected infeasible {trial}: status {:?}",
                sol.status
            ));
        }
    }
    // Injected unbounded (dual-infeasible) instances.
    for trial in 0..20 {
        let mut p = doeblin::sdp::SdpProblem::new();
        let dim = 2 + trial % 4;
        let j = p.add_block("x", dim, doeblin::sdp::Cone::Psd);
        p.set_objective(j, HermitianOperator::identity(dim).scale(-1.0));
        p.add_constraint(vec![(j, doeblin::linalg::herm_unit_re(dim, 0, 0))], 1.0);
        let sol = p.solve(&opts).unwrap();
        if sol.status != SdpStatus::DualInfeasible {
            failures.push(format!(
                "injected unbounded {trial}: status {:?}",
                sol.status
            ));
        }
    }
    finish("criterion 13: solver health", failures);
}
