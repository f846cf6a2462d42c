//! Dense complex linear algebra at desk scale.
//!
//! Everything here operates on `ndarray::Array2<Complex64>`. Matrices in this
//! crate are at most a few tens of columns on the factorized side, so a
//! one-sided Jacobi SVD is accurate and more than fast enough; no BLAS/LAPACK
//! backend is required.
//!
//! Reductions over channels (row norms, Frobenius norms) sort their partial
//! terms before summing. IEEE addition is commutative but not associative, so
//! the sort makes every such reduction invariant under channel permutations;
//! solver outputs are then bit-exactly equivariant when measurement columns
//! are permuted.

use ndarray::{Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;

pub type C64 = Complex64;

/// Relative singular-value cutoff for pseudo-inverses and rank decisions.
pub const SV_CUTOFF: f64 = 1e-10;

/// Sum values in a canonical (sorted) order. Permutation invariant.
pub fn canonical_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

// Stack-buffered canonical sum for short reductions (row norms over
// channels); avoids one allocation per row in the solver inner loop.
fn canonical_sum_iter(values: impl Iterator<Item = f64>) -> f64 {
    let mut buf = [0.0f64; 16];
    let mut len = 0usize;
    let mut spill: Option<Vec<f64>> = None;
    for v in values {
        if let Some(vec) = spill.as_mut() {
            vec.push(v);
        } else if len < buf.len() {
            buf[len] = v;
            len += 1;
        } else {
            let mut vec = buf.to_vec();
            vec.push(v);
            spill = Some(vec);
        }
    }
    match spill {
        Some(vec) => canonical_sum(vec),
        None => {
            let terms = &mut buf[..len];
            terms.sort_by(f64::total_cmp);
            terms.iter().sum()
        }
    }
}

/// Euclidean norm of a complex vector, canonical reduction.
pub fn vec_norm(v: ArrayView1<'_, C64>) -> f64 {
    canonical_sum_iter(v.iter().map(|z| z.norm_sqr())).sqrt()
}

/// l1 norm of a complex vector (sum of entry magnitudes).
pub fn vec_norm_l1(v: ArrayView1<'_, C64>) -> f64 {
    canonical_sum(v.iter().map(|z| z.norm()).collect())
}

/// lp norm of a complex vector for p >= 1, canonical reduction.
pub fn vec_norm_p(v: ArrayView1<'_, C64>, p: f64) -> f64 {
    if p == 2.0 {
        return vec_norm(v);
    }
    canonical_sum(v.iter().map(|z| z.norm().powf(p)).collect()).powf(1.0 / p)
}

/// Frobenius norm. Column sub-sums run in row order; the cross-column
/// reduction is canonical, so the result is channel-permutation invariant.
pub fn frobenius_norm(m: ArrayView2<'_, C64>) -> f64 {
    let col_sq: Vec<f64> = (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    canonical_sum(col_sq).sqrt()
}

/// Conjugate transpose.
pub fn adjoint(a: ArrayView2<'_, C64>) -> Array2<C64> {
    let (m, n) = a.dim();
    Array2::from_shape_fn((n, m), |(i, j)| a[[j, i]].conj())
}

/// a * b.
pub fn matmul(a: ArrayView2<'_, C64>, b: ArrayView2<'_, C64>) -> Array2<C64> {
    let (m, ka) = a.dim();
    let (kb, n) = b.dim();
    assert_eq!(ka, kb, "matmul: inner dimensions {ka} vs {kb}");
    let mut out = Array2::<C64>::zeros((m, n));
    // contiguous fast path; both orders are plain ikj loops
    if let (Some(a_s), Some(b_s)) = (a.as_slice(), b.as_slice()) {
        let out_s = out.as_slice_mut().expect("freshly allocated standard layout");
        for i in 0..m {
            let a_row = &a_s[i * ka..(i + 1) * ka];
            let out_row = &mut out_s[i * n..(i + 1) * n];
            for (k, &aik) in a_row.iter().enumerate() {
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &b_s[k * n..(k + 1) * n];
                for (o, &bv) in out_row.iter_mut().zip(b_row.iter()) {
                    *o += aik * bv;
                }
            }
        }
        return out;
    }
    for i in 0..m {
        let a_row = a.row(i);
        let mut out_row = out.row_mut(i);
        for k in 0..ka {
            let aik = a_row[k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            let b_row = b.row(k);
            for j in 0..n {
                out_row[j] += aik * b_row[j];
            }
        }
    }
    out
}

/// a^H * b without materializing the adjoint.
pub fn adjoint_mul(a: ArrayView2<'_, C64>, b: ArrayView2<'_, C64>) -> Array2<C64> {
    let (m, ka) = a.dim();
    let (mb, n) = b.dim();
    assert_eq!(m, mb, "adjoint_mul: row dimensions {m} vs {mb}");
    let mut out = Array2::<C64>::zeros((ka, n));
    if let (Some(a_s), Some(b_s)) = (a.as_slice(), b.as_slice()) {
        let out_s = out.as_slice_mut().expect("freshly allocated standard layout");
        for i in 0..m {
            let a_row = &a_s[i * ka..(i + 1) * ka];
            let b_row = &b_s[i * n..(i + 1) * n];
            for (k, &av) in a_row.iter().enumerate() {
                let c = av.conj();
                let out_row = &mut out_s[k * n..(k + 1) * n];
                for (o, &bv) in out_row.iter_mut().zip(b_row.iter()) {
                    *o += c * bv;
                }
            }
        }
        return out;
    }
    for i in 0..m {
        let a_row = a.row(i);
        let b_row = b.row(i);
        for k in 0..ka {
            let c = a_row[k].conj();
            let mut out_row = out.row_mut(k);
            for j in 0..n {
                out_row[j] += c * b_row[j];
            }
        }
    }
    out
}

/// Thin singular value decomposition `a = u * diag(s) * v^H`.
///
/// `u` has the shape of `a` restricted to `min(m, n)` columns, `s` is sorted
/// descending, `v` is `n x min(m, n)`. Columns of `u` belonging to zero
/// singular values are zero.
pub struct Svd {
    pub u: Array2<C64>,
    pub singular_values: Vec<f64>,
    pub v: Array2<C64>,
}

/// One-sided Jacobi SVD. Wide inputs are factorized through their adjoint.
pub fn svd(a: ArrayView2<'_, C64>) -> Svd {
    let (m, n) = a.dim();
    if n > m {
        let t = svd(adjoint(a).view());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }

    let mut b = a.to_owned();
    let mut v = Array2::<C64>::eye(n);
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for r in 0..m {
                    let bi = b[[r, i]];
                    let bj = b[[r, j]];
                    alpha += bi.norm_sqr();
                    beta += bj.norm_sqr();
                    gamma += bi.conj() * bj;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // De-phase column j so the pair Gram matrix becomes real,
                // then apply the classic symmetric Jacobi rotation.
                let phase = gamma / g; // e^{i phi}
                let tau = (beta - alpha) / (2.0 * g);
                let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let de = phase.conj(); // e^{-i phi}
                for r in 0..m {
                    let bi = b[[r, i]];
                    let bj = b[[r, j]] * de;
                    b[[r, i]] = c * bi + s * bj;
                    b[[r, j]] = -s * bi + c * bj;
                }
                for r in 0..n {
                    let vi = v[[r, i]];
                    let vj = v[[r, j]] * de;
                    v[[r, i]] = c * vi + s * vj;
                    v[[r, j]] = -s * vi + c * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| vec_norm(b.column(j))).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));

    let mut u = Array2::<C64>::zeros((m, n));
    let mut vv = Array2::<C64>::zeros((n, n));
    let mut sing = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sing.push(s);
        if s > 0.0 {
            for r in 0..m {
                u[[r, dst]] = b[[r, src]] / s;
            }
        }
        for r in 0..n {
            vv[[r, dst]] = v[[r, src]];
        }
    }
    Svd {
        u,
        singular_values: sing,
        v: vv,
    }
}

/// Moore-Penrose pseudo-inverse with relative cutoff `rcond * sigma_max`.
pub fn pinv(a: ArrayView2<'_, C64>, rcond: f64) -> Array2<C64> {
    let f = svd(a);
    let smax = f.singular_values.first().copied().unwrap_or(0.0);
    let cut = rcond * smax;
    let (m, _) = a.dim();
    let n = f.v.nrows();
    let r = f.singular_values.len();
    let mut out = Array2::<C64>::zeros((n, m));
    for k in 0..r {
        let s = f.singular_values[k];
        if s <= cut || s == 0.0 {
            continue;
        }
        let inv = 1.0 / s;
        for i in 0..n {
            let vik = f.v[[i, k]] * inv;
            for j in 0..m {
                out[[i, j]] += vik * f.u[[j, k]].conj();
            }
        }
    }
    out
}

/// Largest singular value (spectral norm). For Hermitian inputs this equals
/// the largest eigenvalue magnitude.
pub fn spectral_norm(a: ArrayView2<'_, C64>) -> f64 {
    svd(a).singular_values.first().copied().unwrap_or(0.0)
}

/// sigma_min / sigma_max of a factorization; 0 for an all-zero matrix.
pub fn singular_value_ratio(s: &[f64]) -> f64 {
    match (s.first(), s.last()) {
        (Some(&max), Some(&min)) if max > 0.0 => min / max,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_seed, seeded_rng};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_complex(m: usize, n: usize, seed: u64) -> Array2<C64> {
        let mut rng = seeded_rng(derive_seed(&[seed]));
        Array2::from_shape_fn((m, n), |_| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    }

    fn max_abs(a: &Array2<C64>) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn reconstruct(f: &Svd) -> Array2<C64> {
        let r = f.singular_values.len();
        let mut sv = Array2::<C64>::zeros((r, f.v.nrows()));
        for k in 0..r {
            for j in 0..f.v.nrows() {
                sv[[k, j]] = C64::new(f.singular_values[k], 0.0) * f.v[[j, k]].conj();
            }
        }
        matmul(f.u.view(), sv.view())
    }

    #[test]
    fn svd_reconstructs_tall_and_wide() {
        for (m, n, seed) in [(7, 4, 1), (4, 7, 2), (5, 5, 3)] {
            let a = random_complex(m, n, seed);
            let f = svd(a.view());
            let diff = &a - &reconstruct(&f);
            assert!(max_abs(&diff) < 1e-12, "residual {}", max_abs(&diff));
            // descending order
            for w in f.singular_values.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn svd_factors_are_orthonormal() {
        let a = random_complex(9, 5, 11);
        let f = svd(a.view());
        let utu = adjoint_mul(f.u.view(), f.u.view());
        let vtv = adjoint_mul(f.v.view(), f.v.view());
        let eye = Array2::<C64>::eye(5);
        assert!(max_abs(&(&utu - &eye)) < 1e-12);
        assert!(max_abs(&(&vtv - &eye)) < 1e-12);
    }

    #[test]
    fn svd_known_diagonal() {
        let mut a = Array2::<C64>::zeros((3, 3));
        a[[0, 0]] = C64::new(0.0, 3.0);
        a[[1, 1]] = C64::new(-1.0, 0.0);
        a[[2, 2]] = C64::new(2.0, 0.0);
        let s = svd(a.view()).singular_values;
        assert!((s[0] - 3.0).abs() < 1e-14);
        assert!((s[1] - 2.0).abs() < 1e-14);
        assert!((s[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pinv_satisfies_moore_penrose() {
        let a = random_complex(8, 3, 21);
        let p = pinv(a.view(), SV_CUTOFF);
        // A P A = A and P A P = P
        let apa = matmul(matmul(a.view(), p.view()).view(), a.view());
        let pap = matmul(matmul(p.view(), a.view()).view(), p.view());
        assert!(max_abs(&(&apa - &a)) < 1e-11);
        assert!(max_abs(&(&pap - &p)) < 1e-11);
        // P A Hermitian
        let pa = matmul(p.view(), a.view());
        let diff = &pa - &adjoint(pa.view());
        assert!(max_abs(&diff) < 1e-11);
    }

    #[test]
    fn pinv_drops_small_singular_values() {
        // Two identical columns: rank 1, pinv must not blow up.
        let mut a = Array2::<C64>::zeros((3, 2));
        a[[0, 0]] = C64::new(1.0, 0.0);
        a[[0, 1]] = C64::new(1.0, 0.0);
        let p = pinv(a.view(), SV_CUTOFF);
        assert!(max_abs(&p) < 1.0 + 1e-12);
    }

    #[test]
    fn spectral_norm_matches_power_iteration() {
        let a = random_complex(6, 6, 33);
        let by_svd = spectral_norm(a.view());
        // independent route: power iteration on a^H a
        let g = adjoint_mul(a.view(), a.view());
        let mut x: Vec<C64> = (0..6).map(|i| C64::new(1.0 + i as f64, -0.5)).collect();
        let mut lambda = 0.0;
        for _ in 0..10_000 {
            let y: Vec<C64> = (0..6)
                .map(|i| (0..6).map(|j| g[[i, j]] * x[j]).sum())
                .collect();
            lambda = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            x = y.iter().map(|z| z / lambda).collect();
        }
        assert!((by_svd - lambda.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn frobenius_is_channel_permutation_invariant() {
        let a = random_complex(5, 4, 44);
        let mut b = Array2::<C64>::zeros((5, 4));
        let perm = [2usize, 0, 3, 1];
        for (dst, &src) in perm.iter().enumerate() {
            for r in 0..5 {
                b[[r, dst]] = a[[r, src]];
            }
        }
        assert_eq!(frobenius_norm(a.view()), frobenius_norm(b.view()));
    }
}
