//! State-pair dissimilarity measures: hockey-stick divergence, trace
//! distance, fidelity, max-relative entropy, and the order-1/2 Hellinger
//! divergence evaluated by adaptive quadrature.
//!
//! First arguments of `hockey_stick` and `d_max` accept unit-trace Hermitian
//! (quasi-state) inputs.

use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;

const SUPPORT_TOL: f64 = 1e-10;
const SIMPSON_TOL: f64 = 1e-9;

fn check_dims(a: &HermitianOperator, b: &HermitianOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::input(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Hockey-stick divergence E_gamma(rho||sigma) = Tr[(rho - gamma sigma)_+] - (1-gamma)_+.
pub fn hockey_stick(rho: &HermitianOperator, sigma: &HermitianOperator, gamma: f64) -> Result<f64> {
    check_dims(rho, sigma)?;
    if gamma < 0.0 {
        return Err(Error::input("gamma must be nonnegative"));
    }
    let diff = rho.sub(&sigma.scale(gamma));
    let (_, trace_plus) = diff.positive_part()?;
    Ok(trace_plus - (1.0 - gamma).max(0.0))
}

/// Normalized trace distance T(rho, sigma) = ||rho - sigma||_1 / 2.
pub fn trace_distance(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<f64> {
    check_dims(rho, sigma)?;
    Ok(rho.sub(sigma).trace_norm()? / 2.0)
}

/// Uhlmann fidelity F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1^2.
pub fn fidelity(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<f64> {
    check_dims(rho, sigma)?;
    let sr = rho.sqrt_psd()?;
    let inner = HermitianOperator::symmetrize(
        sr.matrix().matmul(sigma.matrix()).matmul(sr.matrix()),
    );
    Ok(inner.sqrt_psd()?.trace().powi(2))
}

/// Max-relative entropy D_max(rho||sigma) = ln inf{lambda : rho <= lambda sigma};
/// returns +infinity when supp(rho) is not contained in supp(sigma).
pub fn d_max(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<f64> {
    check_dims(rho, sigma)?;
    let (vals, vecs) = sigma.eig()?;
    let d = sigma.dim();
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    // Support test: rho must vanish on ker(sigma).
    for (i, &v) in vals.iter().enumerate() {
        if v <= SUPPORT_TOL * scale {
            let col: Vec<_> = (0..d).map(|r| vecs[(r, i)]).collect();
            let quad = HermitianOperator::projector(&col).hs_inner(rho);
            if quad.abs() > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
        }
    }
    // lambda* = max eigenvalue of sigma^{-1/2} rho sigma^{-1/2} on the support.
    let inv_sqrt = sigma.spectral_map(|l| {
        if l > SUPPORT_TOL * scale {
            1.0 / l.sqrt()
        } else {
            0.0
        }
    })?;
    let middle = HermitianOperator::symmetrize(
        inv_sqrt.matrix().matmul(rho.matrix()).matmul(inv_sqrt.matrix()),
    );
    let lam = middle.eigenvalues()?.last().copied().unwrap_or(0.0).max(0.0);
    if lam <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(lam.ln())
}

/// Hellinger divergence of order 1/2:
/// H_{1/2}(rho||sigma) = (1/2) Int_1^inf [E_g(rho||sigma) + E_g(sigma||rho)] g^{-3/2} dg,
/// evaluated through the substitution g = u^{-2} on [0, 1] with adaptive Simpson.
pub fn hellinger_half(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<f64> {
    check_dims(rho, sigma)?;
    let integrand = |u: f64| -> Result<f64> {
        if u <= 0.0 {
            // gamma -> infinity limit: E_inf(rho||sigma) = Tr[P_ker(sigma) rho P_ker(sigma)].
            Ok(kernel_weight(rho, sigma)? + kernel_weight(sigma, rho)?)
        } else {
            let gamma = 1.0 / (u * u);
            Ok(hockey_stick(rho, sigma, gamma)? + hockey_stick(sigma, rho, gamma)?)
        }
    };
    adaptive_simpson(&integrand, 0.0, 1.0, SIMPSON_TOL)
}

/// Tr[P_ker(sigma) rho P_ker(sigma)].
fn kernel_weight(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<f64> {
    let (vals, vecs) = sigma.eig()?;
    let d = sigma.dim();
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    let mut acc = 0.0;
    for (i, &v) in vals.iter().enumerate() {
        if v <= SUPPORT_TOL * scale {
            let col: Vec<_> = (0..d).map(|r| vecs[(r, i)]).collect();
            acc += HermitianOperator::projector(&col).hs_inner(rho);
        }
    }
    Ok(acc.max(0.0))
}

fn adaptive_simpson(
    f: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_recurse(f, a, b, fa, fb, fm, whole, tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse(
    f: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= 40 {
        return Err(Error::numerical(
            "adaptive Simpson quadrature failed to converge",
        ));
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    let l = simpson_recurse(f, a, m, fa, fm, flm, left, tol / 2.0, depth + 1)?;
    let r = simpson_recurse(f, m, b, fm, fb, frm, right, tol / 2.0, depth + 1)?;
    Ok(l + r)
}
