//! Independent brute-force and heuristic checkers: the state-exclusion SDP,
//! a direct trace-distance contraction search over orthogonal pure pairs,
//! and the alternating see-saw for the induced coefficient.
//!
//! The two heuristics are one-sided by construction: the contraction search
//! returns a certified lower bound on the trace-distance contraction
//! coefficient, and the see-saw returns a feasible (upper) estimate of the
//! induced coefficient. Both are deterministic under a fixed seed.

use crate::channels::{Channel, QuantumState};
use crate::divergences::trace_distance;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator, C64};
use crate::sdp::{Cone, SdpOptions, SdpProblem, SdpStatus};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A prior distribution together with candidate states of equal dimension.
#[derive(Clone, Debug)]
pub struct Ensemble {
    priors: Vec<f64>,
    states: Vec<QuantumState>,
}

impl Ensemble {
    pub fn new(priors: Vec<f64>, states: Vec<QuantumState>) -> Result<Self> {
        if priors.len() != states.len() || priors.is_empty() {
            return Err(Error::input("ensemble priors and states must match and be non-empty"));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > 1e-10 || priors.iter().any(|&p| p < 0.0) {
            return Err(Error::input("priors must be nonnegative and sum to 1"));
        }
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return Err(Error::input("ensemble states must share one dimension"));
        }
        Ok(Ensemble { priors, states })
    }

    pub fn uniform(states: Vec<QuantumState>) -> Result<Self> {
        let n = states.len();
        Ensemble::new(vec![1.0 / n as f64; n], states)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[QuantumState] {
        &self.states
    }
}

/// Minimal error probability of state exclusion:
/// min over POVMs of sum_x p(x) Tr[Lambda_x rho^x].
pub fn exclusion_error(e: &Ensemble) -> Result<f64> {
    Ok(exclusion_solve(e)?.0)
}

/// Also returns the optimal POVM for see-saw use.
fn exclusion_solve(e: &Ensemble) -> Result<(f64, Vec<HermitianOperator>)> {
    let n = e.len();
    let d = e.states[0].dim();
    let mut p = SdpProblem::new();
    let blocks: Vec<usize> = (0..n)
        .map(|x| p.add_block(&format!("L{x}"), d, Cone::Psd))
        .collect();
    for (x, blk) in blocks.iter().enumerate() {
        p.set_objective(*blk, e.states[x].density().scale(e.priors[x]));
    }
    let basis = crate::doeblin::herm_basis(d);
    for el in &basis {
        let terms: Vec<_> = blocks.iter().map(|&b| (b, el.clone())).collect();
        p.add_constraint(terms, el.trace());
    }
    p.set_warm_start(
        (0..n)
            .map(|_| HermitianOperator::identity(d).scale(1.0 / n as f64))
            .collect(),
    );
    let sol = p.solve(&SdpOptions::default())?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::numerical(format!(
            "exclusion SDP ended with status {:?}",
            sol.status
        )));
    }
    Ok((sol.value, sol.primal))
}

/// Certified lower bound on the trace-distance contraction coefficient:
/// max over sampled orthogonal pure pairs, refined by Nelder-Mead over a
/// 2(d-1)-parameter chart of orthonormal pairs.
pub fn eta_tr_estimate(ch: &Channel, restarts: usize, seed: u64) -> Result<f64> {
    let d = ch.d_in();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..restarts.max(1) {
        let frame = haar_unitary(d, &mut rng);
        let objective = |x: &[f64]| -> f64 { pair_value(ch, &frame, x).unwrap_or(0.0) };
        let start = vec![0.0; 2 * (d - 1)];
        let (val, _) = nelder_mead_max(&objective, &start, 0.35, 200);
        best = best.max(val);
    }
    Ok(best)
}

/// T(N(psi), N(phi)) for the orthonormal pair charted by `x` in `frame`.
fn pair_value(ch: &Channel, frame: &ComplexMatrix, x: &[f64]) -> Result<f64> {
    let d = frame.rows();
    if d == 2 && ch.d_out() == 2 {
        return Ok(pair_value_qubit(ch, frame, x));
    }
    let mut psi = vec![C64::new(0.0, 0.0); d];
    psi[0] = C64::new(1.0, 0.0);
    for k in 1..d {
        psi[k] = C64::new(x[2 * (k - 1)], x[2 * (k - 1) + 1]);
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut psi {
        *z /= norm;
    }
    // Orthogonal partner: explicit for qubits, Gram-Schmidt of e_1 otherwise.
    let phi: Vec<C64> = if d == 2 {
        vec![-psi[1].conj(), psi[0].conj()]
    } else {
        let overlap = psi[1].conj();
        let mut v: Vec<C64> = (0..d)
            .map(|k| {
                let e1 = if k == 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                e1 - psi[k] * overlap
            })
            .collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= n;
        }
        v
    };
    let rotate = |v: &[C64]| -> Vec<C64> {
        (0..d)
            .map(|r| (0..d).map(|c| frame[(r, c)] * v[c]).sum())
            .collect()
    };
    let out_psi = ch.apply_herm(&HermitianOperator::projector(&rotate(&psi)))?;
    let out_phi = ch.apply_herm(&HermitianOperator::projector(&rotate(&phi)))?;
    trace_distance(&out_psi, &out_phi)
}

/// Allocation-free qubit specialization of `pair_value`.
fn pair_value_qubit(ch: &Channel, frame: &ComplexMatrix, x: &[f64]) -> f64 {
    let norm = (1.0 + x[0] * x[0] + x[1] * x[1]).sqrt();
    let psi_local = [
        C64::new(1.0 / norm, 0.0),
        C64::new(x[0] / norm, x[1] / norm),
    ];
    let phi_local = [-psi_local[1].conj(), psi_local[0].conj()];
    let rot = |v: &[C64; 2]| -> [C64; 2] {
        [
            frame[(0, 0)] * v[0] + frame[(0, 1)] * v[1],
            frame[(1, 0)] * v[0] + frame[(1, 1)] * v[1],
        ]
    };
    let (psi, phi) = (rot(&psi_local), rot(&phi_local));
    let choi = ch.choi();
    // Delta = N(|psi><psi|) - N(|phi><phi|) with
    // N(rho)_{ab} = sum_{k,i} rho_{ki} Choi[(2k+a, 2i+b)].
    let mut delta = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            let w = psi[k] * psi[i].conj() - phi[k] * phi[i].conj();
            if w.norm_sqr() < 1e-300 {
                continue;
            }
            for (a, row) in delta.iter_mut().enumerate() {
                for (b, entry) in row.iter_mut().enumerate() {
                    *entry += w * choi.entry(2 * k + a, 2 * i + b);
                }
            }
        }
    }
    let t = delta[0][0].re + delta[1][1].re;
    let det = delta[0][0].re * delta[1][1].re - delta[0][1].norm_sqr();
    if det >= 0.0 {
        0.5 * t.abs()
    } else {
        0.5 * (t * t - 4.0 * det).sqrt()
    }
}

/// Feasible upper estimate of the induced Doeblin coefficient by alternating
/// between the exclusion SDP (states fixed) and minimum-eigenvector state
/// updates (POVM fixed). Ensemble size d_out^2; restarts combined by min.
pub fn alpha_i_seesaw(ch: &Channel, restarts: usize, seed: u64) -> Result<f64> {
    let d_in = ch.d_in();
    let n = ch.d_out() * ch.d_out();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for restart in 0..restarts.max(1) {
        // Two structured starts (computational and Fourier bases), then Haar.
        let mut states: Vec<QuantumState> = (0..n)
            .map(|x| match restart {
                0 => QuantumState::basis_state(d_in, x % d_in),
                1 => {
                    let k = x % d_in;
                    let w = 2.0 * std::f64::consts::PI * k as f64 / d_in as f64;
                    let v: Vec<C64> = (0..d_in)
                        .map(|j| C64::from_polar(1.0, w * j as f64))
                        .collect();
                    QuantumState::pure_state(&v).expect("Fourier vector is nonzero")
                }
                _ => {
                    let v = haar_pure(d_in, &mut rng);
                    QuantumState::pure_state(&v).expect("haar vector is normalized")
                }
            })
            .collect();
        let mut prev = f64::INFINITY;
        for _round in 0..100 {
            let outputs: Vec<QuantumState> = states
                .iter()
                .map(|s| ch.apply(s))
                .collect::<Result<Vec<_>>>()?;
            let ensemble = Ensemble::uniform(outputs)?;
            let (err, povm) = exclusion_solve(&ensemble)?;
            let val = err * n as f64;
            // The alternation is monotone up to solver tolerance.
            if val > prev + 1e-7 {
                return Err(Error::numerical(format!(
                    "see-saw value increased from {prev} to {val}"
                )));
            }
            if (prev - val).abs() <= 1e-9 * prev.abs().max(1.0) {
                prev = val.min(prev);
                break;
            }
            prev = val;
            // States move to the minimum eigenvector of the back-propagated POVM.
            states = povm
                .iter()
                .map(|lam| {
                    let back = ch.adjoint_apply(lam)?;
                    let (_, vecs) = back.eig()?;
                    let v: Vec<C64> = (0..d_in).map(|r| vecs[(r, 0)]).collect();
                    QuantumState::pure_state(&v)
                })
                .collect::<Result<Vec<_>>>()?;
        }
        best = best.min(prev);
    }
    Ok(best)
}

/// Deterministic Nelder-Mead maximization with an evaluation budget.
fn nelder_mead_max(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    max_evals: usize,
) -> (f64, Vec<f64>) {
    let n = start.len();
    if n == 0 {
        return (f(start), start.to_vec());
    }
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        -f(x) // minimize the negative
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = start.to_vec();
    let f0 = eval(&v0, &mut evals);
    simplex.push((v0, f0));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += step;
        let fv = eval(&v, &mut evals);
        simplex.push((v, fv));
    }

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let worst = simplex[n].clone();
        let second_worst = simplex[n - 1].1;
        let best = simplex[0].clone();
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(v, _)| v[k]).sum::<f64>() / n as f64)
            .collect();
        let point = |t: f64| -> Vec<f64> {
            (0..n).map(|k| centroid[k] + t * (worst.0[k] - centroid[k])).collect()
        };
        let refl = point(-1.0);
        let f_refl = eval(&refl, &mut evals);
        if f_refl < best.1 {
            let exp = point(-2.0);
            let f_exp = eval(&exp, &mut evals);
            simplex[n] = if f_exp < f_refl { (exp, f_exp) } else { (refl, f_refl) };
        } else if f_refl < second_worst {
            simplex[n] = (refl, f_refl);
        } else {
            let contr = point(0.5);
            let f_contr = eval(&contr, &mut evals);
            if f_contr < worst.1 {
                simplex[n] = (contr, f_contr);
            } else {
                // Shrink toward the best vertex.
                for i in 1..=n {
                    let v: Vec<f64> = (0..n)
                        .map(|k| best.0[k] + 0.5 * (simplex[i].0[k] - best.0[k]))
                        .collect();
                    let fv = eval(&v, &mut evals);
                    simplex[i] = (v, fv);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    (-simplex[0].1, simplex[0].0.clone())
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian.
pub fn haar_unitary(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut g = ComplexMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    // Modified Gram-Schmidt with a phase fix on the R diagonal.
    for c in 0..d {
        for prev in 0..c {
            let mut inner = C64::new(0.0, 0.0);
            for r in 0..d {
                inner += g[(r, prev)].conj() * g[(r, c)];
            }
            for r in 0..d {
                let sub = inner * g[(r, prev)];
                g[(r, c)] -= sub;
            }
        }
        let norm = (0..d).map(|r| g[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        let phase = {
            let pivot = g[(c, c)];
            if pivot.norm() > 1e-300 {
                pivot / pivot.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        };
        let inv = phase.conj() / norm;
        for r in 0..d {
            g[(r, c)] *= inv;
        }
    }
    g
}

/// Haar-random pure state vector.
pub fn haar_pure(d: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Full-rank random density operator (normalized Wishart).
pub fn random_state(d: usize, rng: &mut ChaCha8Rng) -> QuantumState {
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let w = HermitianOperator::symmetrize(g.matmul(&g.adjoint()));
    let tr = w.trace();
    QuantumState::new(w.scale(1.0 / tr)).expect("Wishart matrix is a state")
}

/// Random CPTP channel from a Stinespring isometry with `d_env` environment
/// dimensions.
pub fn random_channel(d_in: usize, d_out: usize, d_env: usize, rng: &mut ChaCha8Rng) -> Channel {
    let rows = d_out * d_env;
    assert!(rows >= d_in, "Stinespring needs d_out*d_env >= d_in");
    let u = haar_unitary(rows, rng);
    let kraus: Vec<ComplexMatrix> = (0..d_env)
        .map(|e| ComplexMatrix::from_fn(d_out, d_in, |r, c| u[(e * d_out + r, c)]))
        .collect();
    Channel::from_kraus(&kraus, d_in, d_out).expect("Stinespring Kraus set is complete")
}

/// Random POVM with `k` outcomes on dimension `d`.
pub fn random_povm(d: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<HermitianOperator> {
    let parts: Vec<HermitianOperator> = (0..k)
        .map(|_| {
            let g = ComplexMatrix::from_fn(d, d, |_, _| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            HermitianOperator::symmetrize(g.matmul(&g.adjoint()))
        })
        .collect();
    let mut total = HermitianOperator::zeros(d);
    for p in &parts {
        total = total.add(p);
    }
    let inv_sqrt = total
        .spectral_map(|l| if l > 1e-12 { 1.0 / l.sqrt() } else { 0.0 })
        .expect("POVM normalizer");
    parts
        .iter()
        .map(|p| {
            HermitianOperator::symmetrize(
                inv_sqrt.matrix().matmul(p.matrix()).matmul(inv_sqrt.matrix()),
            )
        })
        .collect()
}
