//! Quantum channels with the Choi operator as the canonical representation,
//! plus the named channel families (GAD, classical-quantum, measurement,
//! generalized dephasing, depolarizing, replacer, Stokes, classical).
//!
//! Choi ordering is A-then-B: `Gamma = sum_{i,j} |i><j|_A (x) N(|i><j|)_B`.
//! CPTP is validated at construction: `Gamma >= -1e-9` and
//! `Tr_B[Gamma] = I_A` within 1e-9.

use crate::error::{Error, Result};
use crate::linalg::{
    self, kron, partial_trace, partial_transpose, permute_subsystems, ComplexMatrix,
    HermitianOperator, SubsystemDims, C64,
};

const CPTP_TOL: f64 = 1e-9;
const STATE_TOL: f64 = 1e-10;

/// Density operator with PSD and unit-trace validation.
#[derive(Clone, Debug)]
pub struct QuantumState {
    density: HermitianOperator,
}

impl QuantumState {
    pub fn new(density: HermitianOperator) -> Result<Self> {
        let tr = density.trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::input(format!("state trace {tr} is not 1")));
        }
        let min = density.min_eigenvalue()?;
        if min < -STATE_TOL {
            return Err(Error::input(format!(
                "state has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(QuantumState { density })
    }

    /// |v><v| / <v|v>.
    pub fn pure_state(v: &[C64]) -> Result<Self> {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::input("pure state vector must be nonzero"));
        }
        Ok(QuantumState {
            density: HermitianOperator::projector(v).scale(1.0 / norm_sq),
        })
    }

    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[k] = C64::new(1.0, 0.0);
        QuantumState { density: HermitianOperator::projector(&v) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        QuantumState {
            density: HermitianOperator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    pub fn density(&self) -> &HermitianOperator {
        &self.density
    }

    pub fn tensor(&self, other: &Self) -> Self {
        QuantumState {
            density: HermitianOperator::symmetrize(kron(
                self.density.matrix(),
                other.density.matrix(),
            )),
        }
    }
}

/// Family metadata enabling analytic fast paths.
#[derive(Clone, Debug)]
pub enum Family {
    Gad { p: f64, eta: f64 },
    Cq { states: Vec<QuantumState> },
    Measurement { povm: Vec<HermitianOperator> },
    Dephasing { vectors: Vec<Vec<C64>> },
    Depolarizing { q: f64, dim: usize },
    Replacer { state: QuantumState, d_in: usize },
    Stokes { t: [f64; 3], tmat: [[f64; 3]; 3] },
    Classical { w: Vec<Vec<f64>> },
    Generic,
}

/// CPTP map from `d_in` to `d_out` dimensions, canonically a Choi operator.
#[derive(Clone, Debug)]
pub struct Channel {
    d_in: usize,
    d_out: usize,
    choi: HermitianOperator,
    family: Family,
}

impl Channel {
    pub fn from_choi(d_in: usize, d_out: usize, choi: HermitianOperator) -> Result<Self> {
        Self::from_choi_with_family(d_in, d_out, choi, Family::Generic)
    }

    fn from_choi_with_family(
        d_in: usize,
        d_out: usize,
        choi: HermitianOperator,
        family: Family,
    ) -> Result<Self> {
        if choi.dim() != d_in * d_out {
            return Err(Error::input(format!(
                "Choi dimension {} does not match d_in*d_out = {}",
                choi.dim(),
                d_in * d_out
            )));
        }
        let scale = 1.0 + choi.max_abs();
        let min = choi.min_eigenvalue()?;
        if min < -CPTP_TOL * scale {
            return Err(Error::input(format!(
                "Choi operator is not PSD: min eigenvalue {min:.3e}"
            )));
        }
        let marginal = partial_trace(&choi, &SubsystemDims::two(d_in, d_out), &[0])?;
        let dev = marginal.sub(&HermitianOperator::identity(d_in)).max_abs();
        if dev > CPTP_TOL * scale.max(d_in as f64) {
            return Err(Error::input(format!(
                "channel is not trace preserving: ||Tr_B[Choi] - I|| = {dev:.3e}"
            )));
        }
        Ok(Channel { d_in, d_out, choi, family })
    }

    /// Builds the channel from Kraus operators; checks completeness.
    pub fn from_kraus(kraus: &[ComplexMatrix], d_in: usize, d_out: usize) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::input("at least one Kraus operator required"));
        }
        for k in kraus {
            if k.rows() != d_out || k.cols() != d_in {
                return Err(Error::input(format!(
                    "Kraus operator is {}x{}, expected {d_out}x{d_in}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        let mut completeness = ComplexMatrix::zeros(d_in, d_in);
        for k in kraus {
            completeness = completeness.add(&k.adjoint().matmul(k));
        }
        let dev = completeness.sub(&ComplexMatrix::identity(d_in)).max_abs();
        if dev > CPTP_TOL {
            return Err(Error::input(format!(
                "Kraus completeness violated: ||sum K^dag K - I||_inf = {dev:.3e}"
            )));
        }
        // Gamma = sum_k v_k v_k^dag with v_k = sum_i |i> (x) K|i>.
        let d = d_in * d_out;
        let mut choi = ComplexMatrix::zeros(d, d);
        for k in kraus {
            let mut v = vec![C64::new(0.0, 0.0); d];
            for i in 0..d_in {
                for o in 0..d_out {
                    v[i * d_out + o] = k[(o, i)];
                }
            }
            for r in 0..d {
                for c in 0..d {
                    choi[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        Self::from_choi_with_family(d_in, d_out, HermitianOperator::symmetrize(choi), Family::Generic)
    }

    pub fn identity(dim: usize) -> Self {
        Channel::from_kraus(&[ComplexMatrix::identity(dim)], dim, dim)
            .expect("identity channel is CPTP")
    }

    /// Constructs a channel from family metadata (the `make_channel` entry point).
    pub fn make(family: Family) -> Result<Self> {
        match family {
            Family::Gad { p, eta } => {
                if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&eta) {
                    return Err(Error::input(format!(
                        "GAD parameters must lie in [0,1]; got p={p}, eta={eta}"
                    )));
                }
                let k = gad_kraus(p, eta);
                let mut ch = Channel::from_kraus(&k, 2, 2)?;
                ch.family = Family::Gad { p, eta };
                Ok(ch)
            }
            Family::Cq { states } => {
                if states.is_empty() {
                    return Err(Error::input("cq channel needs at least one state"));
                }
                let d_out = states[0].dim();
                if states.iter().any(|s| s.dim() != d_out) {
                    return Err(Error::input("cq channel states must share one dimension"));
                }
                let d_in = states.len();
                let mut choi = ComplexMatrix::zeros(d_in * d_out, d_in * d_out);
                for (i, s) in states.iter().enumerate() {
                    for r in 0..d_out {
                        for c in 0..d_out {
                            choi[(i * d_out + r, i * d_out + c)] = s.density().entry(r, c);
                        }
                    }
                }
                Self::from_choi_with_family(
                    d_in,
                    d_out,
                    HermitianOperator::symmetrize(choi),
                    Family::Cq { states },
                )
            }
            Family::Measurement { povm } => {
                if povm.is_empty() {
                    return Err(Error::input("measurement channel needs POVM elements"));
                }
                let d_in = povm[0].dim();
                if povm.iter().any(|e| e.dim() != d_in) {
                    return Err(Error::input("POVM elements must share one dimension"));
                }
                let mut sum = HermitianOperator::zeros(d_in);
                for e in &povm {
                    if e.min_eigenvalue()? < -CPTP_TOL {
                        return Err(Error::input("POVM element is not PSD"));
                    }
                    sum = sum.add(e);
                }
                let dev = sum.sub(&HermitianOperator::identity(d_in)).max_abs();
                if dev > CPTP_TOL {
                    return Err(Error::input(format!(
                        "POVM incomplete: ||sum - I|| = {dev:.3e}"
                    )));
                }
                let d_out = povm.len();
                let mut choi = ComplexMatrix::zeros(d_in * d_out, d_in * d_out);
                for (y, e) in povm.iter().enumerate() {
                    let et = e.matrix().transpose();
                    for r in 0..d_in {
                        for c in 0..d_in {
                            choi[(r * d_out + y, c * d_out + y)] = et[(r, c)];
                        }
                    }
                }
                Self::from_choi_with_family(
                    d_in,
                    d_out,
                    HermitianOperator::symmetrize(choi),
                    Family::Measurement { povm },
                )
            }
            Family::Dephasing { vectors } => {
                let d = vectors.len();
                if d == 0 {
                    return Err(Error::input("dephasing channel needs vectors"));
                }
                for v in &vectors {
                    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                    if (n - 1.0).abs() > CPTP_TOL {
                        return Err(Error::input("dephasing vectors must be normalized"));
                    }
                }
                let overlap = |i: usize, j: usize| -> C64 {
                    // <psi_j | psi_i>
                    vectors[j]
                        .iter()
                        .zip(&vectors[i])
                        .map(|(a, b)| a.conj() * b)
                        .sum()
                };
                let mut choi = ComplexMatrix::zeros(d * d, d * d);
                for i in 0..d {
                    for j in 0..d {
                        choi[(i * d + i, j * d + j)] = overlap(i, j);
                    }
                }
                Self::from_choi_with_family(
                    d,
                    d,
                    HermitianOperator::symmetrize(choi),
                    Family::Dephasing { vectors },
                )
            }
            Family::Depolarizing { q, dim } => {
                let d = dim;
                if d < 2 {
                    return Err(Error::input("depolarizing channel needs dim >= 2"));
                }
                let qmax = d as f64 * d as f64 / (d as f64 * d as f64 - 1.0);
                if !(0.0..=qmax + 1e-12).contains(&q) {
                    return Err(Error::input(format!(
                        "depolarizing parameter q={q} outside [0, {qmax:.4}]"
                    )));
                }
                // Choi = (1-q) * d*Phi_d + q/d * I (x) I.
                let mut choi = ComplexMatrix::zeros(d * d, d * d);
                for i in 0..d {
                    for j in 0..d {
                        choi[(i * d + i, j * d + j)] += C64::new(1.0 - q, 0.0);
                    }
                }
                for k in 0..d * d {
                    choi[(k, k)] += C64::new(q / d as f64, 0.0);
                }
                Self::from_choi_with_family(
                    d,
                    d,
                    HermitianOperator::symmetrize(choi),
                    Family::Depolarizing { q, dim },
                )
            }
            Family::Replacer { state, d_in } => {
                if d_in < 1 {
                    return Err(Error::input("replacer d_in must be >= 1"));
                }
                let choi = HermitianOperator::symmetrize(kron(
                    &ComplexMatrix::identity(d_in),
                    state.density().matrix(),
                ));
                let d_out = state.dim();
                Self::from_choi_with_family(d_in, d_out, choi, Family::Replacer { state, d_in })
            }
            Family::Stokes { t, tmat } => {
                // N(rho) = (Tr[rho] (I + t.sigma) + (T w).sigma) / 2 with w_k = Tr[sigma_k rho].
                let choi = stokes_choi(&t, &tmat);
                Self::from_choi_with_family(2, 2, choi, Family::Stokes { t, tmat }).map_err(|e| {
                    Error::input(format!("Stokes parameters do not define a CP map: {e}"))
                })
            }
            Family::Classical { w } => {
                let ny = w.len();
                if ny == 0 || w[0].is_empty() {
                    return Err(Error::input("classical channel matrix must be non-empty"));
                }
                let nx = w[0].len();
                if w.iter().any(|row| row.len() != nx) {
                    return Err(Error::input("classical channel rows must be equal length"));
                }
                for x in 0..nx {
                    let col: f64 = (0..ny).map(|y| w[y][x]).sum();
                    if (col - 1.0).abs() > CPTP_TOL || (0..ny).any(|y| w[y][x] < -1e-12) {
                        return Err(Error::input(format!(
                            "column {x} of the stochastic matrix is invalid"
                        )));
                    }
                }
                // Embed as a cq channel with diagonal output states.
                let mut choi = ComplexMatrix::zeros(nx * ny, nx * ny);
                for x in 0..nx {
                    for y in 0..ny {
                        choi[(x * ny + y, x * ny + y)] = C64::new(w[y][x], 0.0);
                    }
                }
                Self::from_choi_with_family(
                    nx,
                    ny,
                    HermitianOperator::symmetrize(choi),
                    Family::Classical { w },
                )
            }
            Family::Generic => Err(Error::input("cannot make a channel from Generic metadata")),
        }
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn choi(&self) -> &HermitianOperator {
        &self.choi
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Replaces family metadata (used when a construction path knows more).
    pub fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    /// Channel action N(H) = Tr_A[(H^T (x) I_B) Gamma] on Hermitian inputs.
    pub fn apply_herm(&self, h: &HermitianOperator) -> Result<HermitianOperator> {
        if h.dim() != self.d_in {
            return Err(Error::input(format!(
                "input dim {} does not match channel d_in {}",
                h.dim(),
                self.d_in
            )));
        }
        let big = kron(&h.matrix().transpose(), &ComplexMatrix::identity(self.d_out))
            .matmul(self.choi.matrix());
        let out = linalg::partial_trace_matrix(
            &big,
            &SubsystemDims::two(self.d_in, self.d_out),
            &[1],
        )?;
        Ok(HermitianOperator::symmetrize(out))
    }

    pub fn apply(&self, rho: &QuantumState) -> Result<QuantumState> {
        QuantumState::new(self.apply_herm(rho.density())?)
    }

    /// Hilbert-Schmidt adjoint N^dagger(O) = (Tr_B[(I_A (x) O) Gamma])^T.
    pub fn adjoint_apply(&self, obs: &HermitianOperator) -> Result<HermitianOperator> {
        if obs.dim() != self.d_out {
            return Err(Error::input("observable dim does not match channel d_out"));
        }
        let big = kron(&ComplexMatrix::identity(self.d_in), obs.matrix())
            .matmul(self.choi.matrix());
        let out = linalg::partial_trace_matrix(
            &big,
            &SubsystemDims::two(self.d_in, self.d_out),
            &[0],
        )?;
        Ok(HermitianOperator::symmetrize(out.transpose()))
    }

    /// Serial composition second∘first via the link product.
    pub fn compose(second: &Channel, first: &Channel) -> Result<Channel> {
        if first.d_out != second.d_in {
            return Err(Error::input(format!(
                "compose dimension mismatch: first.d_out = {}, second.d_in = {}",
                first.d_out, second.d_in
            )));
        }
        let (da, db, dc) = (first.d_in, first.d_out, second.d_out);
        let g2_tb = partial_transpose(&second.choi, &SubsystemDims::two(db, dc), 0)?;
        let big1 = kron(first.choi.matrix(), &ComplexMatrix::identity(dc));
        let big2 = kron(&ComplexMatrix::identity(da), g2_tb.matrix());
        let prod = big1.matmul(&big2);
        let choi = linalg::partial_trace_matrix(
            &prod,
            &SubsystemDims::new(vec![da, db, dc])?,
            &[0, 2],
        )?;
        Channel::from_choi(da, dc, HermitianOperator::symmetrize(choi))
    }

    /// Parallel composition with subsystem order (A1 A2 : B1 B2).
    pub fn tensor(a: &Channel, b: &Channel) -> Result<Channel> {
        let raw = HermitianOperator::symmetrize(kron(a.choi.matrix(), b.choi.matrix()));
        let dims = SubsystemDims::new(vec![a.d_in, a.d_out, b.d_in, b.d_out])?;
        let choi = permute_subsystems(&raw, &dims, &[0, 2, 1, 3])?;
        Channel::from_choi(a.d_in * b.d_in, a.d_out * b.d_out, choi)
    }

    /// Stokes parameterization (t, T) of a qubit channel:
    /// t_k = Tr[sigma_k N(I/2)], T_{kj} = Tr[sigma_k N(sigma_j)]/2.
    pub fn stokes_of_qubit(&self) -> Result<([f64; 3], [[f64; 3]; 3])> {
        if self.d_in != 2 || self.d_out != 2 {
            return Err(Error::input("Stokes parameterization requires a qubit channel"));
        }
        let mut t = [0.0f64; 3];
        let mut tm = [[0.0f64; 3]; 3];
        let half_id = HermitianOperator::identity(2).scale(0.5);
        let n_id = self.apply_herm(&half_id)?;
        for k in 0..3 {
            t[k] = linalg::pauli(k + 1).hs_inner(&n_id);
        }
        for j in 0..3 {
            let nj = self.apply_herm(&linalg::pauli(j + 1))?;
            for k in 0..3 {
                tm[k][j] = linalg::pauli(k + 1).hs_inner(&nj) / 2.0;
            }
        }
        Ok((t, tm))
    }

    /// `Tr_A[Gamma] = I_B` check: unital channels fix the maximally mixed state.
    pub fn is_unital(&self, tol: f64) -> bool {
        partial_trace(&self.choi, &SubsystemDims::two(self.d_in, self.d_out), &[1])
            .map(|m| m.sub(&HermitianOperator::identity(self.d_out)).max_abs() <= tol)
            .unwrap_or(false)
    }

    /// A fixed point of the channel and whether the eigenvalue-1 eigenspace of
    /// the transfer matrix is one-dimensional.
    pub fn fixed_point(&self) -> Result<(QuantumState, bool)> {
        if self.d_in != self.d_out {
            return Err(Error::input("fixed point requires d_in = d_out"));
        }
        let d = self.d_in;
        let n = d * d;
        // Transfer matrix on vectorized operators, column (r,c) = vec N(|r><c|).
        let mut transfer = ComplexMatrix::zeros(n, n);
        for r in 0..d {
            for c in 0..d {
                let mut basis = ComplexMatrix::zeros(d, d);
                basis[(r, c)] = C64::new(1.0, 0.0);
                let image = self.apply_matrix(&basis)?;
                for rr in 0..d {
                    for cc in 0..d {
                        transfer[(rr * d + cc, r * d + c)] = image[(rr, cc)];
                    }
                }
            }
        }
        let shifted = transfer.sub(&ComplexMatrix::identity(n));
        let (sig, _u, v) = linalg::svd_square(&shifted)?;
        let tol = 1e-9 * sig[0].max(1.0);
        let kernel_dim = sig.iter().filter(|&&s| s <= tol).count();
        let unique = kernel_dim == 1;

        // Hermitian combination with non-negligible trace among kernel vectors.
        let mut best: Option<HermitianOperator> = None;
        for k in (n - kernel_dim.max(1))..n {
            let mut mat = ComplexMatrix::zeros(d, d);
            for r in 0..d {
                for c in 0..d {
                    mat[(r, c)] = v[(r * d + c, k)];
                }
            }
            let h1 = HermitianOperator::symmetrize(mat.clone());
            let h2 = HermitianOperator::symmetrize(mat.scale(C64::new(0.0, 1.0)));
            for h in [h1, h2] {
                let tr = h.trace();
                if tr.abs() > 1e-9 {
                    let cand = h.scale(1.0 / tr);
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            cand.min_eigenvalue().unwrap_or(-1.0)
                                > b.min_eigenvalue().unwrap_or(-1.0)
                        }
                    };
                    if better {
                        best = Some(cand);
                    }
                }
            }
        }
        let candidate = best.ok_or_else(|| {
            Error::numerical("no unit-trace element found in the fixed-point space")
        })?;
        // Clean tiny negative noise, renormalize, and verify.
        let (pos, tr) = candidate.positive_part()?;
        let state = if tr > 0.5 { pos.scale(1.0 / tr) } else { candidate };
        let image = self.apply_herm(&state)?;
        let residual = image.sub(&state).max_abs();
        if residual > 1e-8 {
            return Err(Error::numerical(format!(
                "fixed-point residual {residual:.3e} exceeds 1e-8"
            )));
        }
        Ok((QuantumState::new(state)?, unique))
    }

    /// Action of id_R (x) N on an operator over R (x) A, blockwise.
    pub fn apply_tensor_right(
        &self,
        rho: &HermitianOperator,
        dim_r: usize,
    ) -> Result<HermitianOperator> {
        if rho.dim() != dim_r * self.d_in {
            return Err(Error::input(format!(
                "operator dim {} does not match {} x {}",
                rho.dim(),
                dim_r,
                self.d_in
            )));
        }
        let (din, dout) = (self.d_in, self.d_out);
        let mut out = ComplexMatrix::zeros(dim_r * dout, dim_r * dout);
        for r in 0..dim_r {
            for rp in 0..dim_r {
                let block = ComplexMatrix::from_fn(din, din, |a, b| {
                    rho.entry(r * din + a, rp * din + b)
                });
                let image = self.apply_matrix(&block)?;
                for a in 0..dout {
                    for b in 0..dout {
                        out[(r * dout + a, rp * dout + b)] = image[(a, b)];
                    }
                }
            }
        }
        Ok(HermitianOperator::symmetrize(out))
    }

    /// Raw matrix action used by the transfer-matrix construction.
    fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let big = kron(&m.transpose(), &ComplexMatrix::identity(self.d_out))
            .matmul(self.choi.matrix());
        linalg::partial_trace_matrix(&big, &SubsystemDims::two(self.d_in, self.d_out), &[1])
    }
}

/// GAD Kraus operators for damping parameter eta and excitation parameter p.
pub fn gad_kraus(p: f64, eta: f64) -> Vec<ComplexMatrix> {
    let z = C64::new(0.0, 0.0);
    let sp = p.sqrt();
    let sq = (1.0 - p).sqrt();
    let se = eta.sqrt();
    let sl = (1.0 - eta).sqrt();
    let c = |v: f64| C64::new(v, 0.0);
    vec![
        ComplexMatrix::from_rows(&[vec![c(sp), z], vec![z, c(sp * se)]]).unwrap(),
        ComplexMatrix::from_rows(&[vec![z, c(sp * sl)], vec![z, z]]).unwrap(),
        ComplexMatrix::from_rows(&[vec![c(sq * se), z], vec![z, c(sq)]]).unwrap(),
        ComplexMatrix::from_rows(&[vec![z, z], vec![c(sq * sl), z]]).unwrap(),
    ]
}

fn stokes_choi(t: &[f64; 3], tmat: &[[f64; 3]; 3]) -> HermitianOperator {
    // Choi = 1/2 [ I(x)I + I(x)(t.sigma) + sum_{kj} T_{kj} sigma_j^T (x) sigma_k ].
    // Derived from Gamma = sum_{rc} |r><c| (x) N(|r><c|) with
    // N(rho) = (Tr[rho](I + t.sigma) + (Tw).sigma)/2, w_k = Tr[sigma_k rho].
    let d4 = ComplexMatrix::identity(4);
    let mut acc = d4.scale(C64::new(0.5, 0.0));
    let i2 = ComplexMatrix::identity(2);
    for k in 0..3 {
        if t[k] != 0.0 {
            acc = acc.add(&kron(&i2, linalg::pauli(k + 1).matrix()).scale(C64::new(t[k] / 2.0, 0.0)));
        }
    }
    for k in 0..3 {
        for j in 0..3 {
            if tmat[k][j] != 0.0 {
                let sj_t = linalg::pauli(j + 1).matrix().transpose();
                acc = acc.add(
                    &kron(&sj_t, linalg::pauli(k + 1).matrix())
                        .scale(C64::new(tmat[k][j] / 2.0, 0.0)),
                );
            }
        }
    }
    HermitianOperator::symmetrize(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_channel_choi() {
        let ch = Channel::identity(2);
        // choi = 2 * Phi_2: ones at (ii, jj).
        for i in 0..2 {
            for j in 0..2 {
                let v = ch.choi().entry(i * 2 + i, j * 2 + j);
                assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
            }
        }
        let rho = QuantumState::pure_state(&[c(0.8, 0.1), c(0.2, -0.3)]).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!(out.density().sub(rho.density()).max_abs() < 1e-12);
    }

    #[test]
    fn gad_identity_at_p1_eta1() {
        let ch = Channel::make(Family::Gad { p: 1.0, eta: 1.0 }).unwrap();
        let id = Channel::identity(2);
        assert!(ch.choi().sub(id.choi()).max_abs() < 1e-12);
    }

    #[test]
    fn gad_choi_diagonal() {
        let ch = Channel::make(Family::Gad { p: 0.3, eta: 0.25 }).unwrap();
        let want = [0.475, 0.525, 0.225, 0.775];
        for (i, w) in want.iter().enumerate() {
            assert!((ch.choi().entry(i, i).re - w).abs() < 1e-12);
        }
    }

    #[test]
    fn gad_action_on_one() {
        let ch = Channel::make(Family::Gad { p: 1.0, eta: 0.25 }).unwrap();
        let one = QuantumState::basis_state(2, 1);
        let out = ch.apply(&one).unwrap();
        assert!((out.density().entry(0, 0).re - 0.75).abs() < 1e-12);
        assert!((out.density().entry(1, 1).re - 0.25).abs() < 1e-12);
    }

    #[test]
    fn replacer_and_depolarizing() {
        let sigma = QuantumState::maximally_mixed(2);
        let rep = Channel::make(Family::Replacer { state: sigma.clone(), d_in: 2 }).unwrap();
        let rho = QuantumState::basis_state(2, 0);
        let out = rep.apply(&rho).unwrap();
        assert!(out.density().sub(sigma.density()).max_abs() < 1e-12);

        let dep = Channel::make(Family::Depolarizing { q: 1.0, dim: 2 }).unwrap();
        assert!(dep.choi().sub(rep.choi()).max_abs() < 1e-12);
    }

    #[test]
    fn pbr_channel_choi() {
        let zero = QuantumState::basis_state(2, 0);
        let plus = QuantumState::pure_state(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let ch = Channel::make(Family::Cq { states: vec![zero.clone(), plus.clone()] }).unwrap();
        // choi = |0><0| x |0><0| + |1><1| x |+><+|.
        assert!((ch.choi().entry(0, 0).re - 1.0).abs() < 1e-12);
        for (r, cc) in [(2usize, 2usize), (2, 3), (3, 2), (3, 3)] {
            assert!((ch.choi().entry(r, cc).re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn compose_examples() {
        let n = Channel::make(Family::Gad { p: 0.3, eta: 0.25 }).unwrap();
        let id = Channel::identity(2);
        let comp = Channel::compose(&id, &n).unwrap();
        assert!(comp.choi().sub(n.choi()).max_abs() < 1e-10);

        let sigma = QuantumState::pure_state(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let rep = Channel::make(Family::Replacer { state: sigma, d_in: 2 }).unwrap();
        let comp = Channel::compose(&rep, &n).unwrap();
        assert!(comp.choi().sub(rep.choi()).max_abs() < 1e-10);

        // GAD(1, e1) after GAD(1, e2) = GAD(1, e1*e2).
        let a = Channel::make(Family::Gad { p: 1.0, eta: 0.5 }).unwrap();
        let b = Channel::make(Family::Gad { p: 1.0, eta: 0.4 }).unwrap();
        let comp = Channel::compose(&a, &b).unwrap();
        let want = Channel::make(Family::Gad { p: 1.0, eta: 0.2 }).unwrap();
        assert!(comp.choi().sub(want.choi()).max_abs() < 1e-10);

        // apply(compose(g,f), rho) = apply(g, apply(f, rho)).
        let rho = QuantumState::pure_state(&[c(0.3, 0.2), c(0.5, -0.4)]).unwrap();
        let lhs = comp.apply(&rho).unwrap();
        let rhs = a.apply(&b.apply(&rho).unwrap()).unwrap();
        assert!(lhs.density().sub(rhs.density()).max_abs() < 1e-9);
    }

    #[test]
    fn tensor_examples() {
        let id = Channel::identity(2);
        let t = Channel::tensor(&id, &id).unwrap();
        let id4 = Channel::identity(4);
        assert!(t.choi().sub(id4.choi()).max_abs() < 1e-12);

        let s1 = QuantumState::basis_state(2, 0);
        let s2 = QuantumState::maximally_mixed(2);
        let r1 = Channel::make(Family::Replacer { state: s1.clone(), d_in: 2 }).unwrap();
        let r2 = Channel::make(Family::Replacer { state: s2.clone(), d_in: 2 }).unwrap();
        let t = Channel::tensor(&r1, &r2).unwrap();
        let joint = Channel::make(Family::Replacer { state: s1.tensor(&s2), d_in: 4 }).unwrap();
        assert!(t.choi().sub(joint.choi()).max_abs() < 1e-12);
    }

    #[test]
    fn stokes_round_trip() {
        let id = Channel::identity(2);
        let (t, tm) = id.stokes_of_qubit().unwrap();
        for k in 0..3 {
            assert!(t[k].abs() < 1e-12);
            for j in 0..3 {
                let want = if k == j { 1.0 } else { 0.0 };
                assert!((tm[k][j] - want).abs() < 1e-12);
            }
        }

        let (p, eta): (f64, f64) = (0.3, 0.25);
        let gad = Channel::make(Family::Gad { p, eta }).unwrap();
        let (t, tm) = gad.stokes_of_qubit().unwrap();
        assert!((t[2] - (2.0 * p - 1.0) * (1.0 - eta)).abs() < 1e-12);
        assert!((tm[0][0] - eta.sqrt()).abs() < 1e-12);
        assert!((tm[1][1] - eta.sqrt()).abs() < 1e-12);
        assert!((tm[2][2] - eta).abs() < 1e-12);

        let rebuilt = Channel::make(Family::Stokes { t, tmat: tm }).unwrap();
        assert!(rebuilt.choi().sub(gad.choi()).max_abs() < 1e-9);

        let dep = Channel::make(Family::Depolarizing { q: 0.3, dim: 2 }).unwrap();
        let (t, tm) = dep.stokes_of_qubit().unwrap();
        for k in 0..3 {
            assert!(t[k].abs() < 1e-12);
            assert!((tm[k][k] - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_point_examples() {
        let gad = Channel::make(Family::Gad { p: 1.0, eta: 0.25 }).unwrap();
        let (state, unique) = gad.fixed_point().unwrap();
        assert!(unique);
        assert!((state.density().entry(0, 0).re - 1.0).abs() < 1e-8);

        let sigma = QuantumState::pure_state(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let rep = Channel::make(Family::Replacer { state: sigma.clone(), d_in: 2 }).unwrap();
        let (state, unique) = rep.fixed_point().unwrap();
        assert!(unique);
        assert!(state.density().sub(sigma.density()).max_abs() < 1e-8);

        let id = Channel::identity(2);
        let (_, unique) = id.fixed_point().unwrap();
        assert!(!unique);
    }

    #[test]
    fn kraus_completeness_rejected() {
        let bad = vec![ComplexMatrix::identity(2).scale(c(0.9, 0.0))];
        let err = Channel::from_kraus(&bad, 2, 2);
        assert!(matches!(err, Err(Error::Input(_))));
    }

    #[test]
    fn adjoint_consistency() {
        // Tr[O N(rho)] = Tr[N^dag(O) rho] on a few fixed operators.
        let ch = Channel::make(Family::Gad { p: 0.7, eta: 0.4 }).unwrap();
        let rho = QuantumState::pure_state(&[c(0.3, 0.5), c(0.7, -0.1)]).unwrap();
        let obs = linalg::pauli(1);
        let lhs = obs.hs_inner(&ch.apply(&rho).unwrap().density());
        let rhs = ch.adjoint_apply(&obs).unwrap().hs_inner(rho.density());
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn classical_channel_embedding() {
        // BSC(0.1).
        let w = vec![vec![0.9, 0.1], vec![0.1, 0.9]];
        let ch = Channel::make(Family::Classical { w }).unwrap();
        assert_eq!((ch.d_in(), ch.d_out()), (2, 2));
        let out = ch.apply(&QuantumState::basis_state(2, 0)).unwrap();
        assert!((out.density().entry(0, 0).re - 0.9).abs() < 1e-12);
        assert!((out.density().entry(1, 1).re - 0.1).abs() < 1e-12);
    }

    #[test]
    fn unitality_check() {
        assert!(Channel::identity(2).is_unital(1e-9));
        assert!(Channel::make(Family::Depolarizing { q: 0.5, dim: 2 }).unwrap().is_unital(1e-9));
        assert!(!Channel::make(Family::Gad { p: 1.0, eta: 0.25 }).unwrap().is_unital(1e-9));
    }
}
