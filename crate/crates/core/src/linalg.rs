//! Dense complex linear algebra: Hermitian operators, eigendecomposition,
//! and the tensor/partial operations used by every other module.
//!
//! Everything here targets desk scale (dimensions up to ~256). Storage is
//! row-major dense; all values are immutable after construction and all
//! operations are pure functions.

use crate::error::{Error, Result};
use num_complex::Complex64;

pub type C64 = Complex64;

const HERMITICITY_TOL: f64 = 1e-10;
const POSITIVE_PART_CLIP: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        ComplexMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let nr = rows.len();
        if nr == 0 {
            return Err(Error::input("matrix must have at least one row"));
        }
        let nc = rows[0].len();
        if nc == 0 || rows.iter().any(|r| r.len() != nc) {
            return Err(Error::input("matrix rows must be non-empty and equal length"));
        }
        let data: Vec<C64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::input("matrix entries must be finite"));
        }
        Ok(ComplexMatrix { rows: nr, cols: nc, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Column vector from a slice.
    pub fn col_vector(v: &[C64]) -> Self {
        let mut m = Self::zeros(v.len(), 1);
        for (i, z) in v.iter().enumerate() {
            m[(i, 0)] = *z;
        }
        m
    }

    /// Rank-one |v><w|.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |r, c| v[r] * w[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = self.clone();
        for z in &mut m.data {
            *z *= s;
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (z, w) in m.data.iter_mut().zip(&other.data) {
            *z += w;
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (z, w) in m.data.iter_mut().zip(&other.data) {
            *z -= w;
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let lhs_row = r * self.cols;
                let _ = lhs_row;
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self[(r1, c1)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out[(r1 * other.rows + r2, c1 * other.cols + c2)] = a * other[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    /// Max entrywise |M - M^dagger| over the square part; requires square.
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let d = (self[(r, c)] - self[(c, r)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Kronecker product of two matrices.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Hermitian operator: square complex matrix stored exactly as (M + M^dagger)/2.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: ComplexMatrix,
}

impl HermitianOperator {
    /// Symmetrizes the input; rejects matrices whose asymmetry exceeds 1e-10.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::input(format!(
                "Hermitian operator must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::input("Hermitian operator entries must be finite"));
        }
        let asym = m.asymmetry();
        if asym > HERMITICITY_TOL {
            return Err(Error::input(format!(
                "matrix is not Hermitian: max |M - M^dagger| = {asym:.3e} > {HERMITICITY_TOL:.0e}"
            )));
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrizes unconditionally; for internal results known Hermitian up to rounding.
    pub fn symmetrize(m: ComplexMatrix) -> Self {
        let d = m.rows();
        let mut out = ComplexMatrix::zeros(d, d);
        for r in 0..d {
            out[(r, r)] = C64::new(m[(r, r)].re, 0.0);
            for c in (r + 1)..d {
                let v = (m[(r, c)] + m[(c, r)].conj()).scale(0.5);
                out[(r, c)] = v;
                out[(c, r)] = v.conj();
            }
        }
        HermitianOperator { mat: out }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator { mat: ComplexMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator { mat: ComplexMatrix::identity(dim) }
    }

    /// |v><v| for a (not necessarily normalized) vector.
    pub fn projector(v: &[C64]) -> Self {
        HermitianOperator { mat: ComplexMatrix::outer(v, v) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn entry(&self, r: usize, c: usize) -> C64 {
        self.mat[(r, c)]
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianOperator { mat: self.mat.add(&other.mat) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermitianOperator { mat: self.mat.sub(&other.mat) }
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianOperator { mat: self.mat.scale(C64::new(s, 0.0)) }
    }

    /// Hilbert-Schmidt inner product Tr[A B]; real for Hermitian arguments.
    pub fn hs_inner(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let mut acc = 0.0;
        let d = self.dim();
        for r in 0..d {
            for c in 0..d {
                // Tr[AB] = sum_{r,c} A[r,c] B[c,r] = sum |..| with B[c,r] = conj B[r,c]
                acc += (self.mat[(r, c)] * other.mat[(c, r)]).re;
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.frobenius_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.max_abs()
    }

    /// Conjugation U^dagger H U (for unitary or general U of matching size).
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self::symmetrize(u.adjoint().matmul(&self.mat).matmul(u))
    }

    /// Eigendecomposition H = V diag(lambda) V^dagger with ascending eigenvalues.
    pub fn eig(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        hermitian_eig(self)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eig()?.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Operator (infinity) norm: max |eigenvalue|.
    pub fn op_norm(&self) -> Result<f64> {
        let ev = self.eigenvalues()?;
        Ok(ev.iter().map(|l| l.abs()).fold(0.0, f64::max))
    }

    /// Trace norm: sum of |eigenvalues|.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|l| l.abs()).sum())
    }

    /// Positive part sum_{lambda_i > clip} lambda_i v_i v_i^dagger and its trace.
    pub fn positive_part(&self) -> Result<(Self, f64)> {
        let (vals, vecs) = self.eig()?;
        let d = self.dim();
        let mut p = ComplexMatrix::zeros(d, d);
        let mut trace_plus = 0.0;
        for (i, &l) in vals.iter().enumerate() {
            if l > POSITIVE_PART_CLIP {
                trace_plus += l;
                for r in 0..d {
                    for c in 0..d {
                        p[(r, c)] += vecs[(r, i)] * vecs[(c, i)].conj() * l;
                    }
                }
            }
        }
        Ok((Self::symmetrize(p), trace_plus))
    }

    /// Spectral function f applied to the eigenvalues.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (vals, vecs) = self.eig()?;
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (i, &l) in vals.iter().enumerate() {
            let fl = f(l);
            if fl == 0.0 {
                continue;
            }
            for r in 0..d {
                for c in 0..d {
                    out[(r, c)] += vecs[(r, i)] * vecs[(c, i)].conj() * fl;
                }
            }
        }
        Ok(Self::symmetrize(out))
    }

    /// Principal square root of a PSD operator (negative noise clipped to zero).
    pub fn sqrt_psd(&self) -> Result<Self> {
        self.spectral_map(|l| if l > 0.0 { l.sqrt() } else { 0.0 })
    }
}

/// Ordered factor dimensions of a tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemDims {
    dims: Vec<usize>,
}

impl SubsystemDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 1) {
            return Err(Error::input("subsystem dims must be non-empty and >= 1"));
        }
        Ok(SubsystemDims { dims })
    }

    pub fn two(a: usize, b: usize) -> Self {
        SubsystemDims { dims: vec![a, b] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn check(&self, op_dim: usize) -> Result<()> {
        if self.total() != op_dim {
            return Err(Error::input(format!(
                "subsystem dims {:?} (product {}) inconsistent with operator dimension {}",
                self.dims,
                self.total(),
                op_dim
            )));
        }
        Ok(())
    }

    /// Multi-index of a flat index, most significant factor first.
    fn unravel(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = idx % self.dims[k];
            idx /= self.dims[k];
        }
        out
    }

    fn ravel(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        for (k, &m) in multi.iter().enumerate() {
            idx = idx * self.dims[k] + m;
        }
        idx
    }
}

/// Partial trace on a raw (not necessarily Hermitian) matrix.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &SubsystemDims,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    if m.rows() != m.cols() {
        return Err(Error::input("partial trace requires a square matrix"));
    }
    dims.check(m.rows())?;
    let n = dims.len();
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= n) {
        return Err(Error::input("keep index out of range"));
    }
    let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims.dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product::<usize>().max(1);
    let traced_total: usize = traced.iter().map(|&k| dims.dims[k]).product::<usize>().max(1);

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    let kept_sub = SubsystemDims { dims: if kept_dims.is_empty() { vec![1] } else { kept_dims } };
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims.dims[k]).collect();
    let traced_sub = SubsystemDims { dims: if traced_dims.is_empty() { vec![1] } else { traced_dims } };

    for ro in 0..out_dim {
        let rkm = kept_sub.unravel(ro);
        for co in 0..out_dim {
            let ckm = kept_sub.unravel(co);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..traced_total {
                let tm = traced_sub.unravel(t);
                let mut rm = vec![0usize; n];
                let mut cm = vec![0usize; n];
                for (pos, &k) in keep.iter().enumerate() {
                    rm[k] = rkm[pos];
                    cm[k] = ckm[pos];
                }
                for (pos, &k) in traced.iter().enumerate() {
                    rm[k] = tm[pos];
                    cm[k] = tm[pos];
                }
                acc += m[(dims.ravel(&rm), dims.ravel(&cm))];
            }
            out[(ro, co)] = acc;
        }
    }
    Ok(out)
}

/// Trace over all factors not in `keep`; `keep` holds factor indices in ascending order.
pub fn partial_trace(
    m: &HermitianOperator,
    dims: &SubsystemDims,
    keep: &[usize],
) -> Result<HermitianOperator> {
    Ok(HermitianOperator::symmetrize(partial_trace_matrix(
        m.matrix(),
        dims,
        keep,
    )?))
}

/// Transpose applied to one factor.
pub fn partial_transpose(
    m: &HermitianOperator,
    dims: &SubsystemDims,
    subsystem: usize,
) -> Result<HermitianOperator> {
    dims.check(m.dim())?;
    if subsystem >= dims.len() {
        return Err(Error::input("partial transpose subsystem index out of range"));
    }
    let d = m.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        let mut rm = dims.unravel(r);
        for c in 0..d {
            let mut cm = dims.unravel(c);
            std::mem::swap(&mut rm[subsystem], &mut cm[subsystem]);
            let v = m.entry(dims.ravel(&rm), dims.ravel(&cm));
            std::mem::swap(&mut rm[subsystem], &mut cm[subsystem]);
            out[(r, c)] = v;
        }
    }
    Ok(HermitianOperator::symmetrize(out))
}

/// Conjugation by the permutation unitary W_pi: factor k of the output is
/// factor `perm[k]` of the input.
pub fn permute_subsystems(
    m: &HermitianOperator,
    dims: &SubsystemDims,
    perm: &[usize],
) -> Result<HermitianOperator> {
    dims.check(m.dim())?;
    let n = dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::input(format!("invalid permutation {perm:?} for {n} factors")));
    }
    let out_dims = SubsystemDims {
        dims: perm.iter().map(|&p| dims.dims[p]).collect(),
    };
    let d = m.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        let rm = out_dims.unravel(r);
        for c in 0..d {
            let cm = out_dims.unravel(c);
            let mut rin = vec![0usize; n];
            let mut cin = vec![0usize; n];
            for k in 0..n {
                rin[perm[k]] = rm[k];
                cin[perm[k]] = cm[k];
            }
            out[(r, c)] = m.entry(dims.ravel(&rin), dims.ravel(&cin));
        }
    }
    Ok(HermitianOperator::symmetrize(out))
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Returns ascending eigenvalues and the unitary of eigenvectors (columns).
pub fn hermitian_eig(h: &HermitianOperator) -> Result<(Vec<f64>, ComplexMatrix)> {
    let d = h.dim();
    let mut a = h.matrix().clone();
    let mut v = ComplexMatrix::identity(d);
    if d == 1 {
        return Ok((vec![a[(0, 0)].re], v));
    }
    let scale = a.max_abs().max(1e-300);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale * d as f64 {
            return Ok(sorted_eig(&a, v));
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-18 * scale {
                    continue;
                }
                // Phase making the pivot real, then a real Jacobi rotation.
                let phase = apq / r; // e^{i phi}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column update by U = D J with D = diag(1, conj(phase)),
                // J = [[c, s], [-s, c]].
                let phc = phase.conj();
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * phc * s;
                    a[(k, q)] = akp * s + akq * phc * c;
                }
                // Row update by U^dagger.
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * phc * s;
                    v[(k, q)] = vkp * s + vkq * phc * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }
    Err(Error::numerical(format!(
        "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps (dim {d})"
    )))
}

fn sorted_eig(a: &ComplexMatrix, v: ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let d = a.rows();
    let mut order: Vec<usize> = (0..d).collect();
    let vals: Vec<f64> = (0..d).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_vecs = ComplexMatrix::zeros(d, d);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..d {
            sorted_vecs[(r, new_c)] = v[(r, old_c)];
        }
    }
    (sorted_vals, sorted_vecs)
}

/// One-sided Jacobi SVD of a square complex matrix: A = U diag(sigma) V^dagger.
///
/// Accurate for small singular values; used by the interior-point scaling and
/// for kernel extraction. Returns (sigma descending, U, V).
pub fn svd_square(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix, ComplexMatrix)> {
    assert_eq!(a.rows(), a.cols(), "svd_square requires a square matrix");
    let d = a.rows();
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(d);
    let scale = a.max_abs().max(1e-300);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in (p + 1)..d {
                // Gram entries of columns p, q.
                let mut hpp = 0.0f64;
                let mut hqq = 0.0f64;
                let mut hpq = C64::new(0.0, 0.0);
                for k in 0..d {
                    hpp += w[(k, p)].norm_sqr();
                    hqq += w[(k, q)].norm_sqr();
                    hpq += w[(k, p)].conj() * w[(k, q)];
                }
                let r = hpq.norm();
                if r <= 1e-16 * (hpp * hqq).sqrt().max(1e-30 * scale * scale) {
                    continue;
                }
                rotated = true;
                let phase = hpq / r;
                let theta = (hqq - hpp) / (2.0 * r);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phc = phase.conj();
                for k in 0..d {
                    let wkp = w[(k, p)];
                    let wkq = w[(k, q)];
                    w[(k, p)] = wkp * c - wkq * phc * s;
                    w[(k, q)] = wkp * s + wkq * phc * c;
                }
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * phc * s;
                    v[(k, q)] = vkp * s + vkq * phc * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Extract singular values and left vectors; sort descending.
    let mut sig: Vec<f64> = (0..d)
        .map(|c| (0..d).map(|k| w[(k, c)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| sig[j].partial_cmp(&sig[i]).unwrap());
    let mut u = ComplexMatrix::zeros(d, d);
    let mut vv = ComplexMatrix::zeros(d, d);
    let mut out_sig = vec![0.0; d];
    for (new_c, &old_c) in order.iter().enumerate() {
        out_sig[new_c] = sig[old_c];
        let s = sig[old_c];
        for r in 0..d {
            vv[(r, new_c)] = v[(r, old_c)];
            u[(r, new_c)] = if s > 1e-300 {
                w[(r, old_c)] / s
            } else {
                C64::new(0.0, 0.0)
            };
        }
    }
    sig.clear();
    Ok((out_sig, u, vv))
}

/// Cholesky factorization of a Hermitian positive-definite matrix: A = L L^dagger.
pub fn cholesky(a: &HermitianOperator) -> Result<ComplexMatrix> {
    let d = a.dim();
    let mut l = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let mut diag = a.entry(j, j).re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(Error::numerical(format!(
                "Cholesky pivot {j} is non-positive ({diag:.3e})"
            )));
        }
        let dsqrt = diag.sqrt();
        l[(j, j)] = C64::new(dsqrt, 0.0);
        for i in (j + 1)..d {
            let mut v = a.entry(i, j);
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / dsqrt;
        }
    }
    Ok(l)
}

/// Solves L X = B for lower-triangular L (forward substitution), B full matrix.
pub fn solve_lower_triangular(l: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let d = l.rows();
    let mut x = b.clone();
    for col in 0..b.cols() {
        for i in 0..d {
            let mut v = x[(i, col)];
            for k in 0..i {
                v -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = v / l[(i, i)];
        }
    }
    x
}

/// Real symmetric positive-definite Cholesky solve helpers for the Schur system.
pub mod real {
    use crate::error::{Error, Result};

    /// Dense row-major real symmetric matrix Cholesky: A = L L^T (in place lower).
    pub fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
        let mut l = vec![0.0f64; n * n];
        for j in 0..n {
            let mut diag = a[j * n + j];
            for k in 0..j {
                diag -= l[j * n + k] * l[j * n + k];
            }
            if diag <= 0.0 || !diag.is_finite() {
                return Err(Error::numerical(format!(
                    "real Cholesky pivot {j} non-positive ({diag:.3e})"
                )));
            }
            let dsqrt = diag.sqrt();
            l[j * n + j] = dsqrt;
            for i in (j + 1)..n {
                let mut v = a[i * n + j];
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = v / dsqrt;
            }
        }
        Ok(l)
    }

    /// Solves A x = b given the Cholesky factor L of A.
    pub fn chol_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for i in 0..n {
            let mut v = y[i];
            for k in 0..i {
                v -= l[i * n + k] * y[k];
            }
            y[i] = v / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut v = y[i];
            for k in (i + 1)..n {
                v -= l[k * n + i] * y[k];
            }
            y[i] = v / l[i * n + i];
        }
        y
    }
}

/// Hermitian basis element with `Tr[E X] = Re X[r,c]` (r <= c).
pub fn herm_unit_re(dim: usize, r: usize, c: usize) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(dim, dim);
    if r == c {
        m[(r, c)] = C64::new(1.0, 0.0);
    } else {
        m[(r, c)] = C64::new(0.5, 0.0);
        m[(c, r)] = C64::new(0.5, 0.0);
    }
    HermitianOperator { mat: m }
}

/// Hermitian basis element with `Tr[E X] = Im X[r,c]` (r < c).
pub fn herm_unit_im(dim: usize, r: usize, c: usize) -> HermitianOperator {
    assert!(r != c);
    let mut m = ComplexMatrix::zeros(dim, dim);
    m[(r, c)] = C64::new(0.0, 0.5);
    m[(c, r)] = C64::new(0.0, -0.5);
    HermitianOperator { mat: m }
}

/// Pauli matrices (dim 2).
pub fn pauli(k: usize) -> HermitianOperator {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let m = match k {
        0 => ComplexMatrix::from_rows(&[vec![one, z], vec![z, one]]).unwrap(),
        1 => ComplexMatrix::from_rows(&[vec![z, one], vec![one, z]]).unwrap(),
        2 => ComplexMatrix::from_rows(&[vec![z, -i], vec![i, z]]).unwrap(),
        3 => ComplexMatrix::from_rows(&[vec![one, z], vec![z, -one]]).unwrap(),
        _ => panic!("pauli index must be 0..=3"),
    };
    HermitianOperator { mat: m }
}
