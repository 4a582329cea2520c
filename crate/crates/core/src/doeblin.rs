//! The coefficient zoo: `alpha`, `alpha_wang`, `alpha_plus`, cone-restricted
//! relaxations over PPT and PPT-with-symmetric-extension, the reverse
//! coefficient, analytic fast paths for the named channel families, and
//! contraction/expansion bound assembly.
//!
//! Every coefficient is computed from its dual SDP (pure PSD blocks with the
//! known strictly feasible warm start); the primal witness is recovered from
//! the constraint multipliers and cross-checked against the primal
//! feasibility predicate.

use crate::channels::{Channel, Family};
use crate::error::{Error, Result};
use crate::linalg::{
    self, herm_unit_im, herm_unit_re, kron, partial_trace, partial_transpose, ComplexMatrix,
    HermitianOperator, SubsystemDims, C64,
};
use crate::sdp::{Cone, SdpOptions, SdpProblem, SdpStatus};

const WITNESS_TOL: f64 = 1e-7;

/// Outcome of one coefficient computation.
#[derive(Clone, Debug)]
pub struct CoefficientReport {
    pub name: String,
    pub value: f64,
    /// The optimizing X of the primal formulation, when recoverable.
    pub primal_witness: Option<HermitianOperator>,
    /// Dual witnesses: Y for `alpha`, (Y1, Y2) for `alpha_wang`, the recovery
    /// channel's Choi operator for the reverse coefficient.
    pub dual_witness: Vec<HermitianOperator>,
    pub gap: f64,
    pub status: SdpStatus,
    pub analytic_value: Option<f64>,
    pub analytic_agreement: Option<f64>,
}

impl CoefficientReport {
    fn attach_analytic(mut self, analytic: Option<f64>) -> Self {
        self.analytic_value = analytic;
        self.analytic_agreement = analytic.map(|a| (self.value - a).abs());
        self
    }
}

/// Cone selector for the induced-coefficient relaxations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeChoice {
    Pos,
    Ppt,
    PptSym2,
}

/// Contraction and expansion bounds assembled from the coefficient calls.
#[derive(Clone, Debug)]
pub struct ContractionBoundReport {
    /// 1 - alpha: upper bound on the complete trace-distance contraction.
    pub tr_upper_from_alpha: f64,
    /// 1 - alpha_{I,PPT ^ Sym2}: upper bound on the trace-distance contraction.
    pub tr_upper_from_cone: f64,
    /// 1 - alpha_plus: upper bound on complete hockey-stick contraction.
    pub hs_upper_from_alpha_plus: f64,
    /// 1 - reverse coefficient: lower bound on the trace-distance expansion
    /// (requires d_in = d_out).
    pub expansion_lower: Option<f64>,
    /// Exact qubit values (||T||_inf, sigma_min(T)) when d_in = d_out = 2.
    pub qubit_exact: Option<QubitExact>,
}

#[derive(Clone, Copy, Debug)]
pub struct QubitExact {
    pub eta_tr: f64,
    pub expansion: f64,
}

/// Tensor-power contraction bounds for a qubit channel.
#[derive(Clone, Copy, Debug)]
pub struct QubitTensorBound {
    /// min(1, 4 n ||T||_inf).
    pub wasserstein: f64,
    /// 1 - alpha_wang(N)^n.
    pub via_wang: f64,
}

/// Orthogonal Hermitian basis of a d-dimensional operator space: diagonal
/// units first, then off-diagonal real and imaginary units.
pub(crate) fn herm_basis(d: usize) -> Vec<HermitianOperator> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(herm_unit_re(d, i, i));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(herm_unit_re(d, i, j));
            out.push(herm_unit_im(d, i, j));
        }
    }
    out
}

fn lift_right(d_left: usize, e: &HermitianOperator) -> HermitianOperator {
    HermitianOperator::symmetrize(kron(&ComplexMatrix::identity(d_left), e.matrix()))
}

static SOLVER_OPTIONS: std::sync::Mutex<Option<SdpOptions>> = std::sync::Mutex::new(None);

/// Overrides the solver tolerances used by every coefficient computation.
pub fn set_default_solver_options(opts: SdpOptions) {
    *SOLVER_OPTIONS.lock().unwrap() = Some(opts);
}

fn solve_options() -> SdpOptions {
    SOLVER_OPTIONS
        .lock()
        .unwrap()
        .clone()
        .unwrap_or_default()
}

fn recover_x(basis: &[HermitianOperator], y: &[f64], d: usize) -> HermitianOperator {
    let mut x = HermitianOperator::zeros(d);
    for (e, &yi) in basis.iter().zip(y) {
        if yi != 0.0 {
            x = x.add(&e.scale(yi));
        }
    }
    x
}

fn check_value_agreement(name: &str, value: f64, dual_value: f64) -> Result<()> {
    let dev = (value - dual_value).abs() / (1.0 + value.abs());
    if dev > WITNESS_TOL {
        return Err(Error::numerical(format!(
            "{name}: primal/dual value mismatch {dev:.3e}"
        )));
    }
    Ok(())
}

/// Quantum Doeblin coefficient alpha(N) = sup{Tr X : I (x) X <= Choi}.
///
/// Solved through the dual min{<Choi, Y> : Y >= 0, Tr_A Y = I_B}.
pub fn alpha(ch: &Channel) -> Result<CoefficientReport> {
    let report = alpha_sdp(ch, "alpha")?;
    Ok(report.attach_analytic(alpha_analytic(ch)?))
}

fn alpha_sdp(ch: &Channel, name: &str) -> Result<CoefficientReport> {
    let (da, db) = (ch.d_in(), ch.d_out());
    let mut p = SdpProblem::new();
    let y = p.add_block("Y", da * db, Cone::Psd);
    p.set_objective(y, ch.choi().clone());
    let basis = herm_basis(db);
    for e in &basis {
        p.add_constraint(vec![(y, lift_right(da, e))], e.trace());
    }
    p.set_warm_start(vec![HermitianOperator::identity(da * db).scale(1.0 / da as f64)]);
    let sol = p.solve(&solve_options())?;

    let x = recover_x(&basis, &sol.dual_y, db);
    if sol.status == SdpStatus::Optimal {
        check_value_agreement(name, sol.value, x.trace())?;
        // I (x) X <= Choi within tolerance.
        let slack = ch.choi().sub(&lift_right(da, &x));
        let min = slack.min_eigenvalue()?;
        if min < -WITNESS_TOL * (1.0 + ch.choi().max_abs()) {
            return Err(Error::numerical(format!(
                "{name}: primal witness violates I (x) X <= Choi by {min:.3e}"
            )));
        }
    }
    Ok(CoefficientReport {
        name: name.to_string(),
        value: sol.value,
        primal_witness: Some(x),
        dual_witness: vec![sol.primal[0].clone()],
        gap: sol.gap,
        status: sol.status,
        analytic_value: None,
        analytic_agreement: None,
    })
}

/// Facial-reduction data for a channel with a singular Choi operator.
///
/// For a kernel vector v of the Choi, any X feasible for `alpha_wang` or
/// `alpha_plus` satisfies (I (x) X) v = 0, so X is supported on the
/// orthocomplement of the joint row space of the kernel vectors' matrices.
/// Both slack constraints then reduce to the support of the Choi operator,
/// restoring strict feasibility of the reduced problem.
enum Facial {
    /// Full-rank Choi: no reduction needed.
    FullRank,
    /// X is forced to zero; the coefficient is exactly zero.
    Collapsed,
    /// Compress slacks by `q` (onto supp Choi) and X by `b_perp`.
    Reduced {
        q: ComplexMatrix,
        b_perp: ComplexMatrix,
    },
}

fn facial_reduction(ch: &Channel) -> Result<Facial> {
    let (da, db) = (ch.d_in(), ch.d_out());
    let (vals, vecs) = ch.choi().eig()?;
    let dim = da * db;
    let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let kernel: Vec<usize> = (0..dim).filter(|&i| vals[i] <= 1e-9 * scale).collect();
    if kernel.is_empty() {
        return Ok(Facial::FullRank);
    }
    // Joint row space of the kernel vectors viewed as d_A x d_B matrices.
    let mut row_basis: Vec<Vec<C64>> = Vec::new();
    for &col in &kernel {
        for a in 0..da {
            let mut row: Vec<C64> = (0..db).map(|b| vecs[(a * db + b, col)]).collect();
            for basis_vec in &row_basis {
                let inner: C64 = basis_vec
                    .iter()
                    .zip(&row)
                    .map(|(u, w)| u.conj() * *w)
                    .sum();
                for (w, u) in row.iter_mut().zip(basis_vec) {
                    *w -= inner * u;
                }
            }
            let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for z in &mut row {
                    *z /= norm;
                }
                row_basis.push(row);
            }
        }
    }
    if row_basis.len() >= db {
        return Ok(Facial::Collapsed);
    }
    // Complete to an orthonormal basis; the added vectors span the allowed
    // support of X.
    let mut complement: Vec<Vec<C64>> = Vec::new();
    for k in 0..db {
        let mut cand = vec![C64::new(0.0, 0.0); db];
        cand[k] = C64::new(1.0, 0.0);
        for basis_vec in row_basis.iter().chain(complement.iter()) {
            let inner: C64 = basis_vec
                .iter()
                .zip(&cand)
                .map(|(u, w)| u.conj() * *w)
                .sum();
            for (w, u) in cand.iter_mut().zip(basis_vec) {
                *w -= inner * u;
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for z in &mut cand {
                *z /= norm;
            }
            complement.push(cand);
        }
    }
    let k = complement.len();
    debug_assert_eq!(k + row_basis.len(), db);
    let b_perp = ComplexMatrix::from_fn(db, k, |r, c| complement[c][r]);
    let support: Vec<usize> = (0..dim).filter(|i| !kernel.contains(i)).collect();
    let q = ComplexMatrix::from_fn(dim, support.len(), |r, c| vecs[(r, support[c])]);
    Ok(Facial::Reduced { q, b_perp })
}

fn collapsed_report(ch: &Channel, name: &str, analytic: Option<f64>) -> CoefficientReport {
    CoefficientReport {
        name: name.to_string(),
        value: 0.0,
        primal_witness: Some(HermitianOperator::zeros(ch.d_out())),
        dual_witness: Vec::new(),
        gap: 0.0,
        status: SdpStatus::Optimal,
        analytic_value: None,
        analytic_agreement: None,
    }
    .attach_analytic(analytic)
}

/// alpha_wang(N) = sup{Tr X : -Choi <= I (x) X <= Choi}, via the dual
/// min{<Choi, Y1 + Y2> : Y1, Y2 >= 0, Tr_A[Y2 - Y1] = I_B}. Singular Choi
/// operators go through facial reduction first.
pub fn alpha_wang(ch: &Channel) -> Result<CoefficientReport> {
    let (da, db) = (ch.d_in(), ch.d_out());
    let analytic = alpha_wang_analytic(ch);

    let (value, x, duals, gap, status) = match facial_reduction(ch)? {
        Facial::Collapsed => {
            return Ok(collapsed_report(ch, "alpha_wang", analytic));
        }
        Facial::FullRank => {
            let mut p = SdpProblem::new();
            let y1 = p.add_block("Y1", da * db, Cone::Psd);
            let y2 = p.add_block("Y2", da * db, Cone::Psd);
            p.set_objective(y1, ch.choi().clone());
            p.set_objective(y2, ch.choi().clone());
            let basis = herm_basis(db);
            for e in &basis {
                let lifted = lift_right(da, e);
                p.add_constraint(vec![(y1, lifted.scale(-1.0)), (y2, lifted)], e.trace());
            }
            let eps = 0.1;
            let scale = 1.0 / da as f64;
            p.set_warm_start(vec![
                HermitianOperator::identity(da * db).scale(eps * scale),
                HermitianOperator::identity(da * db).scale((1.0 + eps) * scale),
            ]);
            let sol = p.solve(&solve_options())?;
            let x = recover_x(&basis, &sol.dual_y, db);
            (
                sol.value,
                x,
                vec![sol.primal[0].clone(), sol.primal[1].clone()],
                sol.gap,
                sol.status,
            )
        }
        Facial::Reduced { q, b_perp } => {
            let r = q.cols();
            let k = b_perp.cols();
            let mut p = SdpProblem::new();
            let w1 = p.add_block("W1", r, Cone::Psd);
            let w2 = p.add_block("W2", r, Cone::Psd);
            let c = compress(ch.choi(), &q);
            p.set_objective(w1, c.clone());
            p.set_objective(w2, c);
            let basis = herm_basis(k);
            let lifted: Vec<HermitianOperator> = basis
                .iter()
                .map(|e| compress(&lift_right(da, &expand(e, &b_perp)), &q))
                .collect();
            for (e, a) in basis.iter().zip(&lifted) {
                p.add_constraint(vec![(w1, a.scale(-1.0)), (w2, a.clone())], e.trace());
            }
            let eps = 0.1;
            let scale = 1.0 / da as f64;
            p.set_warm_start(vec![
                HermitianOperator::identity(r).scale(eps * scale),
                HermitianOperator::identity(r).scale((1.0 + eps) * scale),
            ]);
            let sol = p.solve(&solve_options())?;
            let x_small = recover_x(&basis, &sol.dual_y, k);
            let x = expand(&x_small, &b_perp);
            (
                sol.value,
                x,
                vec![
                    expand_by(&sol.primal[0], &q),
                    expand_by(&sol.primal[1], &q),
                ],
                sol.gap,
                sol.status,
            )
        }
    };

    if status == SdpStatus::Optimal {
        check_value_agreement("alpha_wang", value, x.trace())?;
        let lifted = lift_right(da, &x);
        let tol = WITNESS_TOL * (1.0 + ch.choi().max_abs());
        let upper = ch.choi().sub(&lifted).min_eigenvalue()?;
        let lower = ch.choi().add(&lifted).min_eigenvalue()?;
        if upper < -tol || lower < -tol {
            return Err(Error::numerical(format!(
                "alpha_wang: witness violates -Choi <= I (x) X <= Choi ({upper:.3e}, {lower:.3e})"
            )));
        }
    }
    Ok(CoefficientReport {
        name: "alpha_wang".to_string(),
        value,
        primal_witness: Some(x),
        dual_witness: duals,
        gap,
        status,
        analytic_value: None,
        analytic_agreement: None,
    }
    .attach_analytic(analytic))
}

/// Q^dagger H Q.
fn compress(h: &HermitianOperator, q: &ComplexMatrix) -> HermitianOperator {
    HermitianOperator::symmetrize(q.adjoint().matmul(h.matrix()).matmul(q))
}

/// B X B^dagger.
fn expand(x: &HermitianOperator, b: &ComplexMatrix) -> HermitianOperator {
    HermitianOperator::symmetrize(b.matmul(x.matrix()).matmul(&b.adjoint()))
}

fn expand_by(w: &HermitianOperator, q: &ComplexMatrix) -> HermitianOperator {
    HermitianOperator::symmetrize(q.matmul(w.matrix()).matmul(&q.adjoint()))
}

/// alpha_plus(N) = sup{Tr X : X >= 0, I (x) X <= Choi}, via the dual
/// min{<Choi, Y> : Y >= 0, Tr_A Y >= I_B} with an explicit slack block.
/// Singular Choi operators go through facial reduction first.
pub fn alpha_plus(ch: &Channel) -> Result<CoefficientReport> {
    let (da, db) = (ch.d_in(), ch.d_out());
    let analytic = match ch.family() {
        Family::Measurement { povm } => Some(measurement_alpha(povm)?),
        Family::Replacer { .. } => Some(1.0),
        _ => None,
    };

    let (value, x, duals, gap, status) = match facial_reduction(ch)? {
        Facial::Collapsed => {
            return Ok(collapsed_report(ch, "alpha_plus", analytic));
        }
        Facial::FullRank => {
            let mut p = SdpProblem::new();
            let y = p.add_block("Y", da * db, Cone::Psd);
            let s = p.add_block("S", db, Cone::Psd);
            p.set_objective(y, ch.choi().clone());
            let basis = herm_basis(db);
            for e in &basis {
                p.add_constraint(vec![(y, lift_right(da, e)), (s, e.scale(-1.0))], e.trace());
            }
            p.set_warm_start(vec![
                HermitianOperator::identity(da * db).scale(2.0 / da as f64),
                HermitianOperator::identity(db),
            ]);
            let sol = p.solve(&solve_options())?;
            let x = recover_x(&basis, &sol.dual_y, db);
            (sol.value, x, vec![sol.primal[0].clone()], sol.gap, sol.status)
        }
        Facial::Reduced { q, b_perp } => {
            let r = q.cols();
            let k = b_perp.cols();
            let mut p = SdpProblem::new();
            let w = p.add_block("W", r, Cone::Psd);
            let s = p.add_block("S", k, Cone::Psd);
            p.set_objective(w, compress(ch.choi(), &q));
            let basis = herm_basis(k);
            for e in &basis {
                let a = compress(&lift_right(da, &expand(e, &b_perp)), &q);
                p.add_constraint(vec![(w, a), (s, e.scale(-1.0))], e.trace());
            }
            p.set_warm_start(vec![
                HermitianOperator::identity(r).scale(2.0 / da as f64),
                HermitianOperator::identity(k),
            ]);
            let sol = p.solve(&solve_options())?;
            let x_small = recover_x(&basis, &sol.dual_y, k);
            let x = expand(&x_small, &b_perp);
            (sol.value, x, vec![expand_by(&sol.primal[0], &q)], sol.gap, sol.status)
        }
    };

    if status == SdpStatus::Optimal {
        check_value_agreement("alpha_plus", value, x.trace())?;
        let tol = WITNESS_TOL * (1.0 + ch.choi().max_abs());
        let slack = ch.choi().sub(&lift_right(da, &x)).min_eigenvalue()?;
        let xmin = x.min_eigenvalue()?;
        if slack < -tol || xmin < -WITNESS_TOL {
            return Err(Error::numerical(format!(
                "alpha_plus: witness violates X >= 0, I (x) X <= Choi ({slack:.3e}, {xmin:.3e})"
            )));
        }
    }
    Ok(CoefficientReport {
        name: "alpha_plus".to_string(),
        value,
        primal_witness: Some(x),
        dual_witness: duals,
        gap,
        status,
        analytic_value: None,
        analytic_agreement: None,
    }
    .attach_analytic(analytic))
}

/// Cone-restricted coefficient alpha_{I,K}: the alpha dual with Y confined to
/// POS, PPT, or PPT intersected with the two-symmetric-extension cone.
pub fn alpha_cone(ch: &Channel, cone: ConeChoice) -> Result<CoefficientReport> {
    match cone {
        ConeChoice::Pos => {
            let report = alpha_sdp(ch, "alpha_cone_pos")?;
            let analytic = alpha_analytic(ch)?;
            return Ok(report.attach_analytic(analytic));
        }
        ConeChoice::Ppt => {}
        ConeChoice::PptSym2 => {
            if ch.d_in() * ch.d_out() * ch.d_out() > 64 {
                return Err(Error::input(format!(
                    "PPT_SYM2 requires d_in*d_out^2 <= 64, got {}",
                    ch.d_in() * ch.d_out() * ch.d_out()
                )));
            }
        }
    }
    let (da, db) = (ch.d_in(), ch.d_out());
    let dab = da * db;
    let dims_ab = SubsystemDims::two(da, db);
    let mut p = SdpProblem::new();
    let y = p.add_block("Y", dab, Cone::Psd);
    let z = p.add_block("Y_pt", dab, Cone::Psd);
    p.set_objective(y, ch.choi().clone());

    let basis_b = herm_basis(db);
    for e in &basis_b {
        p.add_constraint(vec![(y, lift_right(da, e))], e.trace());
    }
    // Z = Y^{T_B} entrywise.
    let basis_ab = herm_basis(dab);
    for e in &basis_ab {
        let e_pt = partial_transpose(e, &dims_ab, 1)?;
        p.add_constraint(vec![(z, e.clone()), (y, e_pt.scale(-1.0))], 0.0);
    }

    let warm_y = HermitianOperator::identity(dab).scale(1.0 / da as f64);
    let mut warm = vec![warm_y.clone(), warm_y];

    let mut ext_block = None;
    if cone == ConeChoice::PptSym2 {
        let dp = da * db * db;
        let dims_abb = SubsystemDims::new(vec![da, db, db])?;
        let pb = p.add_block("P_ext", dp, Cone::Psd);
        ext_block = Some(pb);
        // Tr_{B2} P = Y.
        for e in &basis_ab {
            let lifted = HermitianOperator::symmetrize(kron(
                e.matrix(),
                &ComplexMatrix::identity(db),
            ));
            p.add_constraint(vec![(pb, lifted), (y, e.scale(-1.0))], 0.0);
        }
        // Swap invariance of P on (B1, B2), one independent row per orbit.
        for row in swap_invariance_rows(&dims_abb) {
            p.add_constraint(vec![(pb, row)], 0.0);
        }
        warm.push(HermitianOperator::identity(dp).scale(1.0 / (da as f64 * db as f64)));
    }
    p.set_warm_start(warm);
    let sol = p.solve(&solve_options())?;

    // X from the Tr_A Y = I multipliers (the first |basis_b| rows).
    let x = recover_x(&basis_b, &sol.dual_y[..basis_b.len()], db);
    let name = match cone {
        ConeChoice::Pos => "alpha_cone_pos",
        ConeChoice::Ppt => "alpha_cone_ppt",
        ConeChoice::PptSym2 => "alpha_cone_ppt_sym2",
    };
    let mut dual_witness = vec![sol.primal[y].clone(), sol.primal[z].clone()];
    if let Some(pb) = ext_block {
        dual_witness.push(sol.primal[pb].clone());
    }
    Ok(CoefficientReport {
        name: name.to_string(),
        value: sol.value,
        primal_witness: Some(x),
        dual_witness,
        gap: sol.gap,
        status: sol.status,
        analytic_value: None,
        analytic_agreement: None,
    })
}

/// Independent swap-invariance rows for a block on A (x) B (x) B: one row per
/// size-two orbit of Hermitian degrees of freedom under simultaneous swap of
/// the last two factors, plus `Im = 0` rows for conjugation-fixed entries.
fn swap_invariance_rows(dims: &SubsystemDims) -> Vec<HermitianOperator> {
    let d = dims.total();
    let db = dims.dims()[1];
    debug_assert_eq!(dims.dims()[2], db);
    let swap_index = |idx: usize| -> usize {
        let b2 = idx % db;
        let b1 = (idx / db) % db;
        let a = idx / (db * db);
        a * db * db + b2 * db + b1
    };
    let mut rows = Vec::new();
    let mut visited = vec![false; d * d];
    for r in 0..d {
        for c in r..d {
            if visited[r * d + c] {
                continue;
            }
            visited[r * d + c] = true;
            let (mut r2, mut c2) = (swap_index(r), swap_index(c));
            let conjugated = r2 > c2;
            if conjugated {
                std::mem::swap(&mut r2, &mut c2);
            }
            if (r2, c2) == (r, c) {
                if conjugated && r != c {
                    // Entry maps to its own conjugate: imaginary part vanishes.
                    rows.push(herm_unit_im(d, r, c));
                }
                continue;
            }
            visited[r2 * d + c2] = true;
            rows.push(herm_unit_re(d, r, c).sub(&herm_unit_re(d, r2, c2)));
            if r != c && r2 != c2 {
                // Im with a sign that flips when the image lands transposed.
                let sign = if conjugated { 1.0 } else { -1.0 };
                rows.push(herm_unit_im(d, r, c).add(&herm_unit_im(d, r2, c2).scale(sign)));
            }
        }
    }
    rows
}

/// Reverse Doeblin coefficient: the least p such that some channel applied
/// after N realizes (1-p) id + p Tr[.] X. Encoded as
/// min Tr Z over {G >= 0 Choi of the recovery channel, Z free Hermitian}
/// with link(Choi_N, G) = (1 - Tr Z) Choi_id + I (x) Z.
pub fn reverse_doeblin(ch: &Channel) -> Result<CoefficientReport> {
    if ch.d_in() != ch.d_out() {
        return Err(Error::input("reverse Doeblin coefficient requires d_in = d_out"));
    }
    let d = ch.d_in();
    let dg = d * d;

    let mut rows: Vec<(Vec<(usize, HermitianOperator)>, f64)> = Vec::new();
    // Block indices fixed below: 0 = G, 1 = Z.
    let basis_b = herm_basis(d);
    for e in &basis_b {
        let lifted = HermitianOperator::symmetrize(kron(e.matrix(), &ComplexMatrix::identity(d)));
        rows.push((vec![(0, lifted)], e.trace()));
    }

    // Link rows: <F, link(G)> + Tr[Z] <F, Choi_id> - <F, I (x) Z> = <F, Choi_id>.
    let choi_id = Channel::identity(d).choi().clone();
    let basis_g = herm_basis(dg);
    let link_images: Vec<HermitianOperator> = basis_g
        .iter()
        .map(|e| link_apply(ch, e))
        .collect::<Result<Vec<_>>>()?;
    let dims_ac = SubsystemDims::two(d, d);
    for f in &basis_g {
        let gamma_f = f.hs_inner(&choi_id);
        // Adjoint of the link map against F, expanded in the orthogonal basis.
        let mut g_coeff = HermitianOperator::zeros(dg);
        for (e, img) in basis_g.iter().zip(&link_images) {
            let w = f.hs_inner(img) / e.hs_inner(e);
            if w != 0.0 {
                g_coeff = g_coeff.add(&e.scale(w));
            }
        }
        // Z coefficient: Tr[Z] gamma_F - <Tr_A F, Z>.
        let f_marg = partial_trace(f, &dims_ac, &[1])?;
        let z_coeff = HermitianOperator::identity(d).scale(gamma_f).sub(&f_marg);
        rows.push((vec![(0, g_coeff), (1, z_coeff)], gamma_f));
    }

    let rows = orthogonalize_rows(rows, &[dg, d])?;
    let mut p = SdpProblem::new();
    let g = p.add_block("G", dg, Cone::Psd);
    let z = p.add_block("Z", d, Cone::Free);
    debug_assert_eq!((g, z), (0, 1));
    p.set_objective(z, HermitianOperator::identity(d));
    for (terms, rhs) in rows {
        p.add_constraint(terms, rhs);
    }
    // Strictly feasible start: completely depolarizing recovery, Z = I/d.
    p.set_warm_start(vec![
        HermitianOperator::identity(dg).scale(1.0 / d as f64),
        HermitianOperator::identity(d).scale(1.0 / d as f64),
    ]);
    let sol = p.solve(&solve_options())?;

    let analytic = match ch.family() {
        Family::Gad { eta, .. } => Some(1.0 - eta),
        _ => None,
    };
    Ok(CoefficientReport {
        name: "reverse".to_string(),
        value: sol.value,
        primal_witness: Some(sol.primal[z].clone()),
        dual_witness: vec![sol.primal[g].clone()],
        gap: sol.gap,
        status: sol.status,
        analytic_value: None,
        analytic_agreement: None,
    }
    .attach_analytic(analytic))
}

/// Choi of (recovery ∘ N) as a linear function of the recovery Choi G on B (x) C.
fn link_apply(ch: &Channel, g: &HermitianOperator) -> Result<HermitianOperator> {
    let (da, db) = (ch.d_in(), ch.d_out());
    let dc = ch.d_in();
    let g_tb = partial_transpose(g, &SubsystemDims::two(db, dc), 0)?;
    let big1 = kron(ch.choi().matrix(), &ComplexMatrix::identity(dc));
    let big2 = kron(&ComplexMatrix::identity(da), g_tb.matrix());
    let prod = big1.matmul(&big2);
    let out = linalg::partial_trace_matrix(&prod, &SubsystemDims::new(vec![da, db, dc])?, &[0, 2])?;
    Ok(HermitianOperator::symmetrize(out))
}

/// Gram-Schmidt over affine constraint rows; drops rows that become
/// numerically zero with a consistent right-hand side, errors on
/// inconsistent dependent rows.
fn orthogonalize_rows(
    rows: Vec<(Vec<(usize, HermitianOperator)>, f64)>,
    block_dims: &[usize],
) -> Result<Vec<(Vec<(usize, HermitianOperator)>, f64)>> {
    let offsets: Vec<usize> = block_dims
        .iter()
        .scan(0usize, |acc, &d| {
            let start = *acc;
            *acc += 2 * d * d;
            Some(start)
        })
        .collect();
    let total: usize = block_dims.iter().map(|&d| 2 * d * d).sum();

    let flatten = |terms: &[(usize, HermitianOperator)]| -> Vec<f64> {
        let mut v = vec![0.0f64; total];
        for (j, a) in terms {
            let d = block_dims[*j];
            let base = offsets[*j];
            for r in 0..d {
                for c in 0..d {
                    let zv = a.entry(r, c);
                    v[base + 2 * (r * d + c)] += zv.re;
                    v[base + 2 * (r * d + c) + 1] += zv.im;
                }
            }
        }
        v
    };

    // Each kept entry pairs the orthogonalized direction with the rhs
    // transformed by the same projections, so later rows project correctly.
    let mut kept: Vec<(Vec<f64>, f64, Vec<(usize, HermitianOperator)>, f64)> = Vec::new();
    for (terms, rhs) in rows {
        let mut v = flatten(&terms);
        let mut r = rhs;
        let orig_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (kv, kr, _, _) in &kept {
            let knorm_sq: f64 = kv.iter().map(|x| x * x).sum();
            let proj = v.iter().zip(kv).map(|(a, b)| a * b).sum::<f64>() / knorm_sq;
            if proj != 0.0 {
                for (a, b) in v.iter_mut().zip(kv) {
                    *a -= proj * b;
                }
                r -= proj * kr;
            }
        }
        let res_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if res_norm <= 1e-10 * orig_norm.max(1.0) {
            if r.abs() > 1e-8 {
                return Err(Error::input(format!(
                    "inconsistent dependent constraint row (residual rhs {r:.3e})"
                )));
            }
            continue;
        }
        kept.push((v, r, terms, rhs));
    }
    // Re-emit the original (unprojected) rows that survived: projection was
    // only used for dependence detection, keeping the emitted rows sparse.
    Ok(kept.into_iter().map(|(_, _, t, r)| (t, r)).collect())
}

/// Closed-form Doeblin coefficient for the named families; `None` for Generic.
pub fn alpha_analytic(ch: &Channel) -> Result<Option<f64>> {
    Ok(match ch.family() {
        Family::Gad { eta, .. } => Some((1.0 - eta.sqrt()).powi(2)),
        Family::Cq { states } => Some(cq_alpha(
            &states.iter().map(|s| s.density().clone()).collect::<Vec<_>>(),
        )?),
        Family::Measurement { povm } => Some(measurement_alpha(povm)?),
        Family::Dephasing { .. } => Some(0.0),
        Family::Depolarizing { q, dim } => {
            if *dim == 2 {
                let (_, tmat) = ch.stokes_of_qubit()?;
                Some(qubit_alpha_from_stokes(&tmat))
            } else if *q <= 1.0 {
                Some(*q)
            } else {
                None
            }
        }
        Family::Replacer { .. } => Some(1.0),
        Family::Stokes { tmat, .. } => Some(qubit_alpha_from_stokes(tmat)),
        Family::Classical { w } => {
            let nx = w[0].len();
            let mut acc = 0.0;
            for _y in 0..w.len() {
                acc += (0..nx).map(|x| w[_y][x]).fold(f64::INFINITY, f64::min);
            }
            Some(acc)
        }
        Family::Generic => None,
    })
}

/// GAD alpha_wang three-branch closed form.
pub fn gad_alpha_wang(p: f64, eta: f64) -> f64 {
    let se = eta.sqrt();
    let threshold = se / (2.0 * (1.0 + se));
    if p <= threshold {
        2.0 * p * (1.0 - 2.0 * p) * (1.0 - eta).powi(2) / (eta + 2.0 * p * (1.0 - eta))
    } else if p <= 1.0 - threshold {
        (1.0 - se).powi(2)
    } else {
        let q = 1.0 - p;
        2.0 * q * (1.0 - 2.0 * q) * (1.0 - eta).powi(2) / (eta + 2.0 * q * (1.0 - eta))
    }
}

fn alpha_wang_analytic(ch: &Channel) -> Option<f64> {
    match ch.family() {
        Family::Gad { p, eta } => Some(gad_alpha_wang(*p, *eta)),
        Family::Replacer { .. } => Some(1.0),
        Family::Measurement { povm } => measurement_alpha(povm).ok(),
        _ => None,
    }
}

fn measurement_alpha(povm: &[HermitianOperator]) -> Result<f64> {
    let mut acc = 0.0;
    for e in povm {
        acc += e.min_eigenvalue()?;
    }
    Ok(acc)
}

/// sup{Tr X : X <= rho_i for all i} as a small SDP over slack blocks.
pub fn cq_alpha(states: &[HermitianOperator]) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::input("cq alpha needs at least one state"));
    }
    let d = states[0].dim();
    if states.len() == 1 {
        return Ok(states[0].trace());
    }
    let mut p = SdpProblem::new();
    let blocks: Vec<usize> = (0..states.len())
        .map(|i| p.add_block(&format!("S{i}"), d, Cone::Psd))
        .collect();
    p.set_objective(blocks[0], HermitianOperator::identity(d));
    // X = rho_0 - S_0; for i >= 1: S_i - S_0 = rho_i - rho_0.
    let basis = herm_basis(d);
    for (i, rho) in states.iter().enumerate().skip(1) {
        let diff = rho.sub(&states[0]);
        for e in &basis {
            p.add_constraint(
                vec![(blocks[i], e.clone()), (blocks[0], e.scale(-1.0))],
                e.hs_inner(&diff),
            );
        }
    }
    // Strictly feasible start: S_i = rho_i - X0 with X0 strictly below all states.
    let mut min_eig = f64::INFINITY;
    for rho in states {
        min_eig = min_eig.min(rho.min_eigenvalue()?);
    }
    let x0 = HermitianOperator::identity(d).scale(min_eig - 1.0);
    p.set_warm_start(states.iter().map(|rho| rho.sub(&x0)).collect());
    let sol = p.solve(&solve_options())?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::numerical(format!(
            "cq alpha solve ended with status {:?}",
            sol.status
        )));
    }
    Ok(states[0].trace() - sol.value)
}

/// Qubit Doeblin coefficient from the Stokes transfer matrix: signed singular
/// values from the SO(3) x SO(3) normal form, minimized over the tetrahedron
/// vertices of the unital CP set.
pub fn qubit_alpha_from_stokes(tmat: &[[f64; 3]; 3]) -> f64 {
    let (sv, det) = signed_singular_values_3x3(tmat);
    let t = [sv[0], sv[1], if det < 0.0 { -sv[2] } else { sv[2] }];
    let vertices = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    let mut best = f64::INFINITY;
    for v in vertices {
        let s: f64 = (0..3).map(|k| t[k] * v[k]).sum();
        best = best.min(s);
    }
    1.0 + best
}

/// Singular values (descending) and determinant of a real 3x3 matrix.
pub fn signed_singular_values_3x3(t: &[[f64; 3]; 3]) -> ([f64; 3], f64) {
    // Eigenvalues of T^T T through the Hermitian eigensolver.
    let mut g = ComplexMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                acc += t[k][i] * t[k][j];
            }
            g[(i, j)] = C64::new(acc, 0.0);
        }
    }
    let vals = HermitianOperator::symmetrize(g)
        .eigenvalues()
        .expect("3x3 Gram eigendecomposition");
    let sv = [
        vals[2].max(0.0).sqrt(),
        vals[1].max(0.0).sqrt(),
        vals[0].max(0.0).sqrt(),
    ];
    let det = t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1])
        - t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0])
        + t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
    (sv, det)
}

/// n-fold tensor power of a channel.
pub fn tensor_power(ch: &Channel, n: usize) -> Result<Channel> {
    if n == 0 {
        return Err(Error::input("tensor power requires n >= 1"));
    }
    let mut acc = ch.clone();
    for _ in 1..n {
        acc = Channel::tensor(&acc, ch)?;
    }
    Ok(acc)
}

/// Assembles the contraction/expansion bounds from the coefficient calls.
pub fn contraction_bounds(ch: &Channel) -> Result<ContractionBoundReport> {
    let a = alpha(ch)?;
    let cone = alpha_cone(ch, ConeChoice::PptSym2)?;
    let plus = alpha_plus(ch)?;
    let expansion_lower = if ch.d_in() == ch.d_out() {
        Some(1.0 - reverse_doeblin(ch)?.value)
    } else {
        None
    };
    let qubit_exact = if ch.d_in() == 2 && ch.d_out() == 2 {
        let (_, tmat) = ch.stokes_of_qubit()?;
        let (sv, _) = signed_singular_values_3x3(&tmat);
        let ppt = alpha_cone(ch, ConeChoice::Ppt)?;
        let bound = 1.0 - ppt.value;
        if bound < sv[0] - 1e-6 {
            log::warn!(
                "qubit channel: 1 - alpha_PPT = {bound:.9} fell below ||T||_inf = {:.9}",
                sv[0]
            );
        }
        Some(QubitExact { eta_tr: sv[0], expansion: sv[2] })
    } else {
        None
    };
    Ok(ContractionBoundReport {
        tr_upper_from_alpha: 1.0 - a.value,
        tr_upper_from_cone: 1.0 - cone.value,
        hs_upper_from_alpha_plus: 1.0 - plus.value,
        expansion_lower,
        qubit_exact,
    })
}

/// Tensor-power trace-distance contraction bounds for a qubit channel:
/// min(1, 4 n ||T||_inf) alongside 1 - alpha_wang(N)^n.
pub fn qubit_tensor_contraction_bound(ch: &Channel, n: usize) -> Result<QubitTensorBound> {
    if ch.d_in() != 2 || ch.d_out() != 2 {
        return Err(Error::input("tensor contraction bound requires a qubit channel"));
    }
    if n < 1 {
        return Err(Error::input("tensor power must be >= 1"));
    }
    let (_, tmat) = ch.stokes_of_qubit()?;
    let (sv, _) = signed_singular_values_3x3(&tmat);
    let wasserstein = (4.0 * n as f64 * sv[0]).min(1.0);
    let wang = alpha_wang(ch)?.value;
    Ok(QubitTensorBound {
        wasserstein,
        via_wang: 1.0 - wang.powi(n as i32),
    })
}

/// Solved value, or an error when the solve did not reach Optimal.
pub fn expect_optimal(report: &CoefficientReport) -> Result<f64> {
    if report.status != SdpStatus::Optimal {
        return Err(Error::numerical(format!(
            "{} solve ended with status {:?}",
            report.name, report.status
        )));
    }
    Ok(report.value)
}
