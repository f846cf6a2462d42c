//! Deterministic analysis of a (matrix, support) pair: coherence, local
//! 2-coherence, restricted-isometry quantities, pseudo-inverse column norms,
//! and the exact-recovery certificates.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::combinatorics::for_each_subset;
use crate::error::{Error, Result};
use crate::linalg::{
    adjoint_mul, matmul, pinv, spectral_norm, svd, vec_norm, vec_norm_l1, C64, SV_CUTOFF,
};
use crate::signal::{row_sign, support_of, JointSignal, Support};
use crate::MeasurementMatrix;

/// Default subset budget for the exact restricted-isometry computation.
pub const DEFAULT_RIP_BUDGET: u128 = 1_000_000;

/// Summary of the recovery-relevant quantities of a (matrix, support) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub coherence: f64,
    pub welch_bound: f64,
    pub mu2: Option<f64>,
    pub delta_s: Option<f64>,
    pub delta_star: Option<f64>,
    pub pinv_l1_max: Option<f64>,
    pub pinv_l2_max: Option<f64>,
    pub erc_pass: Option<bool>,
    pub avg_case_alpha: Option<f64>,
}

/// Both norms of `A_S^+ a_l` for one outside column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinvColumnNorms {
    pub index: usize,
    pub l1: f64,
    pub l2: f64,
}

/// Outcome of the sign-pattern recovery certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub pass: bool,
    /// max over outside columns of the certificate correlation norm;
    /// pass means margin < 1.
    pub margin: f64,
}

/// Largest off-diagonal Gram magnitude over unit-norm columns.
pub fn coherence(a: &MeasurementMatrix) -> Result<f64> {
    if a.n_cols() < 2 {
        return Err(Error::InvalidDimension(
            "coherence needs at least two columns".into(),
        ));
    }
    let gram = adjoint_mul(a.entries(), a.entries());
    let mut max = 0.0f64;
    for i in 0..a.n_cols() {
        for j in (i + 1)..a.n_cols() {
            max = max.max(gram[[i, j]].norm());
        }
    }
    Ok(max)
}

/// Welch-type lower bound sqrt((N-n)/(n(N-1))) on achievable coherence.
pub fn coherence_lower_bound(n: usize, cols: usize) -> Result<f64> {
    if n == 0 || cols < n || cols < 2 {
        return Err(Error::InvalidDimension(format!(
            "need 1 <= n <= N and N >= 2, got n = {n}, N = {cols}"
        )));
    }
    Ok((((cols - n) as f64) / ((n * (cols - 1)) as f64)).sqrt())
}

/// Local 2-coherence: the worst Euclidean correlation between one column and
/// the support, over outside columns and over leave-one-out inside columns.
pub fn local_two_coherence(a: &MeasurementMatrix, support: &Support) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    a.check_support(support)?;
    let a_s = a.restricted(support);
    let mut max = 0.0f64;
    for l in support.complement(a.n_cols()) {
        let col = a.column(l).insert_axis(ndarray::Axis(1)).to_owned();
        let corr = adjoint_mul(a_s.view(), col.view());
        max = max.max(vec_norm(corr.column(0)));
    }
    for l in support.iter() {
        let rest: Vec<usize> = support.iter().filter(|&j| j != l).collect();
        if rest.is_empty() {
            continue;
        }
        let sub = Support::new(rest).expect("distinct indices");
        let a_rest = a.restricted(&sub);
        let col = a.column(l).insert_axis(ndarray::Axis(1)).to_owned();
        let corr = adjoint_mul(a_rest.view(), col.view());
        max = max.max(vec_norm(corr.column(0)));
    }
    Ok(max)
}

fn gram_deviation(a_s: ArrayView2<'_, C64>) -> f64 {
    let k = a_s.ncols();
    let mut g = adjoint_mul(a_s, a_s);
    for i in 0..k {
        g[[i, i]] -= C64::new(1.0, 0.0);
    }
    spectral_norm(g.view())
}

/// delta(S) = ||A_S^* A_S - I||_2 via the singular values of the Hermitian
/// Gram deviation.
pub fn support_gram_deviation(a: &MeasurementMatrix, support: &Support) -> Result<f64> {
    a.check_support(support)?;
    if support.is_empty() {
        return Ok(0.0);
    }
    Ok(gram_deviation(a.restricted(support).view()))
}

/// delta*(S): maximum of delta over all single-column augmentations of S.
pub fn augmented_gram_deviation(a: &MeasurementMatrix, support: &Support) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    a.check_support(support)?;
    let outside = support.complement(a.n_cols());
    if outside.is_empty() {
        return Err(Error::SupportCoversAllColumns);
    }
    let mut max = 0.0f64;
    for l in outside {
        let mut ids: Vec<usize> = support.iter().collect();
        ids.push(l);
        let aug = Support::new(ids).expect("distinct indices");
        max = max.max(gram_deviation(a.restricted(&aug).view()));
    }
    Ok(max)
}

/// Exact restricted isometry constant for sparsity `k` by exhaustive
/// enumeration of all size-`k` supports (nesting makes smaller sizes
/// redundant). Fails if C(N, k) exceeds the budget.
pub fn rip_constant_exact(a: &MeasurementMatrix, k: usize, budget: u128) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    if k > a.n_cols() {
        return Err(Error::InvalidDimension(format!(
            "sparsity {k} exceeds column count {}",
            a.n_cols()
        )));
    }
    let mut max = 0.0f64;
    for_each_subset(a.n_cols(), k, budget, |ids| {
        let support = Support::new(ids.to_vec()).expect("subset indices are distinct");
        max = max.max(gram_deviation(a.restricted(&support).view()));
    })?;
    Ok(max)
}

/// Pseudo-inverse of `A_S` with a rank check at the relative cutoff.
pub(crate) fn restricted_pinv(a: &MeasurementMatrix, support: &Support) -> Result<Array2<C64>> {
    let a_s = a.restricted(support);
    let f = svd(a_s.view());
    let smax = f.singular_values.first().copied().unwrap_or(0.0);
    let smin = f.singular_values.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin <= SV_CUTOFF * smax {
        return Err(Error::RankDeficient {
            ratio: if smax > 0.0 { smin / smax } else { 0.0 },
        });
    }
    Ok(pinv(a_s.view(), SV_CUTOFF))
}

/// l1 and l2 norms of `A_S^+ a_l` for every column outside the support.
pub fn pinv_column_norms(
    a: &MeasurementMatrix,
    support: &Support,
) -> Result<Vec<PinvColumnNorms>> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    a.check_support(support)?;
    let p = restricted_pinv(a, support)?;
    let mut out = Vec::new();
    for l in support.complement(a.n_cols()) {
        let col = a.column(l).insert_axis(ndarray::Axis(1)).to_owned();
        let b = matmul(p.view(), col.view());
        out.push(PinvColumnNorms {
            index: l,
            l1: vec_norm_l1(b.column(0)),
            l2: vec_norm(b.column(0)),
        });
    }
    Ok(out)
}

/// Sign-pattern certificate: X is the unique minimizer of the mixed-norm
/// program when `||sgn(X^S)^* A_S^+ a_l||_2 < 1` for every outside column.
pub fn dual_certificate_check(
    a: &MeasurementMatrix,
    x: &JointSignal,
) -> Result<CertificateCheck> {
    let support = match x.declared_support() {
        Some(s) => s.clone(),
        None => support_of(x, 0.0),
    };
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    a.check_support(&support)?;
    if x.n_rows() != a.n_cols() {
        return Err(Error::DimensionMismatch(format!(
            "signal has {} rows, matrix has {} columns",
            x.n_rows(),
            a.n_cols()
        )));
    }
    let p = restricted_pinv(a, &support)?;
    let signs = row_sign(x);
    // sgn(X^S): restrict the sign matrix to the support rows
    let k = support.cardinality();
    let l_channels = x.n_channels();
    let mut sgn_s = Array2::<C64>::zeros((k, l_channels));
    for (pos, j) in support.iter().enumerate() {
        for l in 0..l_channels {
            sgn_s[[pos, l]] = signs[[j, l]];
        }
    }
    let mut margin = 0.0f64;
    for l in support.complement(a.n_cols()) {
        let col = a.column(l).insert_axis(ndarray::Axis(1)).to_owned();
        let b = matmul(p.view(), col.view());
        let corr = adjoint_mul(sgn_s.view(), b.view());
        margin = margin.max(vec_norm(corr.column(0)));
    }
    Ok(CertificateCheck {
        pass: margin < 1.0,
        margin,
    })
}

/// General certificate: `H` witnesses uniqueness when `A_S^* H = sgn(X^S)`
/// (within 1e-8 entrywise) and `||H^* a_l||_2 < 1` outside the support.
pub fn verify_general_certificate(
    a: &MeasurementMatrix,
    support: &Support,
    sgn_xs: ArrayView2<'_, C64>,
    h: ArrayView2<'_, C64>,
) -> Result<bool> {
    a.check_support(support)?;
    let k = support.cardinality();
    if sgn_xs.nrows() != k || h.nrows() != a.n_rows() || sgn_xs.ncols() != h.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "sgn is {}x{}, H is {}x{}, support size {k}, matrix rows {}",
            sgn_xs.nrows(),
            sgn_xs.ncols(),
            h.nrows(),
            h.ncols(),
            a.n_rows()
        )));
    }
    let a_s = a.restricted(support);
    let lhs = adjoint_mul(a_s.view(), h);
    let dev = (&lhs - &sgn_xs)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if dev > 1e-8 {
        return Ok(false);
    }
    for l in support.complement(a.n_cols()) {
        let col = a.column(l).insert_axis(ndarray::Axis(1)).to_owned();
        let corr = adjoint_mul(h, col.view());
        if vec_norm(corr.column(0)) >= 1.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Assemble the full report; support-dependent fields are filled when a
/// support is given and its pseudo-inverse is well posed.
pub fn analyze(a: &MeasurementMatrix, support: Option<&Support>) -> Result<ConditionReport> {
    let mut report = ConditionReport {
        coherence: coherence(a)?,
        welch_bound: coherence_lower_bound(a.n_rows(), a.n_cols())?,
        mu2: None,
        delta_s: None,
        delta_star: None,
        pinv_l1_max: None,
        pinv_l2_max: None,
        erc_pass: None,
        avg_case_alpha: None,
    };
    if let Some(s) = support {
        if !s.is_empty() {
            report.mu2 = Some(local_two_coherence(a, s)?);
            report.delta_s = Some(support_gram_deviation(a, s)?);
            if s.cardinality() < a.n_cols() {
                report.delta_star = Some(augmented_gram_deviation(a, s)?);
            }
            if let Ok(norms) = pinv_column_norms(a, s) {
                let l1 = norms.iter().map(|p| p.l1).fold(0.0, f64::max);
                let l2 = norms.iter().map(|p| p.l2).fold(0.0, f64::max);
                report.pinv_l1_max = Some(l1);
                report.pinv_l2_max = Some(l2);
                report.erc_pass = Some(l1 < 1.0);
                report.avg_case_alpha = Some(l2);
            }
        }
    }
    Ok(report)
}
