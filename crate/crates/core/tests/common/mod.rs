//! Shared generators for the integration and acceptance suites.
#![allow(dead_code)] // each test target uses its own subset

use doeblin::channels::{Channel, Family, QuantumState};
use doeblin::linalg::HermitianOperator;
use doeblin::oracles::{haar_pure, random_channel, random_state};
use doeblin::sdp::{Cone, SdpProblem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_qubit_channel(rng: &mut ChaCha8Rng) -> Channel {
    let env = 2 + (rng.random::<u32>() % 3) as usize;
    random_channel(2, 2, env, rng)
}

/// Random cq channel with `n` qubit output states.
pub fn random_cq_channel(n: usize, rng: &mut ChaCha8Rng) -> Channel {
    let states: Vec<QuantumState> = (0..n).map(|_| random_state(2, rng)).collect();
    Channel::make(Family::Cq { states }).expect("cq channel from states")
}

/// Random generalized dephasing channel on `d` levels with environment
/// vectors of dimension `env`.
pub fn random_dephasing_channel(d: usize, env: usize, rng: &mut ChaCha8Rng) -> Channel {
    let vectors = (0..d).map(|_| haar_pure(env, rng)).collect();
    Channel::make(Family::Dephasing { vectors }).expect("dephasing channel")
}

/// A random strictly feasible SDP plus the raw data needed to recheck
/// residuals externally.
pub struct FeasibleSdp {
    pub problem: SdpProblem,
    pub dims: Vec<usize>,
    pub objective: Vec<HermitianOperator>,
    pub rows: Vec<Vec<(usize, HermitianOperator)>>,
    pub b: Vec<f64>,
}

pub fn random_feasible_sdp(rng: &mut ChaCha8Rng, max_dim: usize, max_rows: usize) -> FeasibleSdp {
    let n_blocks = 1 + (rng.random::<u32>() % 2) as usize;
    let dims: Vec<usize> = (0..n_blocks)
        .map(|_| 2 + (rng.random::<u32>() as usize % (max_dim - 1)))
        .collect();
    let total_dof: usize = dims.iter().map(|d| d * d).sum();
    let m = (2 + rng.random::<u32>() as usize % max_rows).min(total_dof).max(1);

    let rand_herm = |d: usize, rng: &mut ChaCha8Rng| -> HermitianOperator {
        let g = doeblin::linalg::ComplexMatrix::from_fn(d, d, |_, _| {
            doeblin::linalg::C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        HermitianOperator::symmetrize(g)
    };
    let pd = |d: usize, rng: &mut ChaCha8Rng| -> HermitianOperator {
        let g = rand_herm(d, rng);
        let sq = HermitianOperator::symmetrize(g.matrix().matmul(g.matrix()));
        sq.add(&HermitianOperator::identity(d).scale(0.1))
    };

    // Strictly feasible primal X0 and dual (y0, S0 > 0).
    let x0: Vec<HermitianOperator> = dims.iter().map(|&d| pd(d, rng)).collect();
    let s0: Vec<HermitianOperator> = dims.iter().map(|&d| pd(d, rng)).collect();
    let y0: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();

    let mut rows = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for _ in 0..m {
        let terms: Vec<(usize, HermitianOperator)> = dims
            .iter()
            .enumerate()
            .map(|(j, &d)| (j, rand_herm(d, rng)))
            .collect();
        let rhs: f64 = terms.iter().map(|(j, a)| a.hs_inner(&x0[*j])).sum();
        rows.push(terms);
        b.push(rhs);
    }
    // C = A*(y0) + S0 guarantees dual strict feasibility.
    let mut objective: Vec<HermitianOperator> = s0;
    for (i, terms) in rows.iter().enumerate() {
        for (j, a) in terms {
            objective[*j] = objective[*j].add(&a.scale(y0[i]));
        }
    }

    let mut problem = SdpProblem::new();
    for (j, &d) in dims.iter().enumerate() {
        problem.add_block(&format!("B{j}"), d, Cone::Psd);
    }
    for (j, c) in objective.iter().enumerate() {
        problem.set_objective(j, c.clone());
    }
    for (terms, rhs) in rows.iter().zip(&b) {
        problem.add_constraint(terms.clone(), *rhs);
    }
    FeasibleSdp {
        problem,
        dims,
        objective,
        rows,
        b,
    }
}
