//! Shared dense/iterative symmetric eigensolver helpers and small rotation
//! utilities.

use nalgebra::{DMatrix, DVector, Matrix3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Dense symmetric eigendecomposition with eigenvalues sorted ascending and
/// columns of the returned matrix aligned with them.
pub fn sym_eigen(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = DVector::from_fn(n, |k, _| eig.eigenvalues[order[k]]);
    let mut vecs = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Largest eigenvalue (and eigenvector) of a symmetric operator by power
/// iteration. `apply` must be self-adjoint and PSD-shifted if the caller
/// cares about the algebraically largest value; for a general symmetric
/// operator this converges to the largest-magnitude eigenvalue.
pub fn power_largest(
    apply: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    dim: usize,
    rng: &mut ChaCha8Rng,
    max_iters: usize,
    tol: f64,
) -> (f64, DVector<f64>) {
    let mut v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut nrm = v.norm();
    if nrm == 0.0 {
        v[0] = 1.0;
        nrm = 1.0;
    }
    v /= nrm;
    let mut lambda = 0.0;
    for _ in 0..max_iters {
        let mut w = apply(&v);
        let new_lambda = v.dot(&w);
        let wn = w.norm();
        if wn <= f64::MIN_POSITIVE {
            return (0.0, v);
        }
        w /= wn;
        let delta = (new_lambda - lambda).abs();
        lambda = new_lambda;
        v = w;
        if delta <= tol * (1.0 + lambda.abs()) {
            break;
        }
    }
    (lambda, v)
}

/// Smallest eigenvalue of a symmetric PSD operator, via the shift trick:
/// power iteration gives `lambda_max`, a second power iteration on
/// `lambda_max I - W` gives `lambda_max - lambda_min`. Returns
/// `(lambda_min, lambda_max)`.
pub fn smallest_eigenvalue_shifted(
    apply: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    dim: usize,
    rng: &mut ChaCha8Rng,
    max_iters: usize,
    tol: f64,
) -> (f64, f64) {
    let (lambda_max, _) = power_largest(apply, dim, rng, max_iters, tol);
    let shifted = |v: &DVector<f64>| -> DVector<f64> {
        let mut w = apply(v);
        w.zip_apply(v, |wi, vi| *wi = lambda_max * vi - *wi);
        w
    };
    let (gap, _) = power_largest(&shifted, dim, rng, max_iters, tol);
    (lambda_max - gap, lambda_max)
}

/// The `k` largest eigenpairs of a symmetric operator by Lanczos with full
/// reorthogonalization. Returns eigenvalues in descending order.
pub fn lanczos_largest(
    apply: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    dim: usize,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> (DVector<f64>, DMatrix<f64>) {
    let k = k.min(dim);
    // Krylov dimension: enough slack over k for reliable extreme pairs.
    let steps = (4 * k + 30).min(dim);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta = Vec::with_capacity(steps);

    let mut v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    v /= v.norm();
    basis.push(v);

    for j in 0..steps {
        let mut w = apply(&basis[j]);
        let a = basis[j].dot(&w);
        alpha.push(a);
        w -= &basis[j] * a;
        if j > 0 {
            w -= &basis[j - 1] * beta[j - 1];
        }
        // Full reorthogonalization keeps the basis usable at this scale.
        for u in &basis {
            let c = u.dot(&w);
            w -= u * c;
        }
        let b = w.norm();
        if j + 1 == steps {
            break;
        }
        if b < 1e-13 {
            // Invariant subspace found; restart with a random orthogonal vector.
            let mut r = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
            for u in &basis {
                let c = u.dot(&r);
                r -= u * c;
            }
            let rn = r.norm();
            if rn < 1e-13 {
                break;
            }
            beta.push(0.0);
            basis.push(r / rn);
        } else {
            beta.push(b);
            basis.push(w / b);
        }
    }

    let s = basis.len();
    let mut tri = DMatrix::zeros(s, s);
    for j in 0..s {
        tri[(j, j)] = alpha[j];
        if j + 1 < s {
            tri[(j, j + 1)] = beta[j];
            tri[(j + 1, j)] = beta[j];
        }
    }
    let (tvals, tvecs) = sym_eigen(&tri);
    let take = k.min(s);
    let mut vals = DVector::zeros(take);
    let mut vecs = DMatrix::zeros(dim, take);
    for out in 0..take {
        let col = s - 1 - out; // descending
        vals[out] = tvals[col];
        let mut x = DVector::zeros(dim);
        for (j, u) in basis.iter().enumerate() {
            x += u * tvecs[(j, col)];
        }
        let xn = x.norm();
        if xn > 0.0 {
            x /= xn;
        }
        vecs.set_column(out, &x);
    }
    (vals, vecs)
}

/// Splits a symmetric matrix into its positive part and `-mu` times its
/// negative part, i.e. `(pos, neg_scaled, negative_count)` with
/// `f = pos - neg_scaled / mu`.
pub fn split_spectral_parts(f: &DMatrix<f64>, mu: f64) -> (DMatrix<f64>, DMatrix<f64>, usize) {
    let n = f.nrows();
    let (vals, vecs) = sym_eigen(f);
    let mut pos = DMatrix::zeros(n, n);
    let mut neg = DMatrix::zeros(n, n);
    let mut count = 0;
    for k in 0..n {
        let v = vecs.column(k);
        if vals[k] > 0.0 {
            pos.syger(vals[k], &v, &v, 1.0);
        } else if vals[k] < 0.0 {
            neg.syger(-mu * vals[k], &v, &v, 1.0);
            count += 1;
        }
    }
    pos.fill_upper_triangle_with_lower_triangle();
    neg.fill_upper_triangle_with_lower_triangle();
    (pos, neg, count)
}

/// Same split, computing only the negative eigenpairs iteratively. Intended
/// for large problems where the negative part has low rank; returns `None`
/// when it cannot certify (two clearly non-negative trailing Ritz values)
/// that all negative eigenvalues were found.
pub fn split_spectral_parts_iterative(
    f: &DMatrix<f64>,
    mu: f64,
    expected_rank: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(DMatrix<f64>, DMatrix<f64>, usize)> {
    let n = f.nrows();
    let apply = |v: &DVector<f64>| -> DVector<f64> { -(f * v) };
    let mut k = expected_rank.max(4) + 6;
    loop {
        let (vals, vecs) = lanczos_largest(&apply, n, k, rng);
        // vals are eigenvalues of -F descending; negative eigenvalues of F
        // appear first. Require a margin of trailing non-positive Ritz
        // values before trusting the count.
        let found = vals.iter().take_while(|&&v| v > 0.0).count();
        if found + 2 <= vals.len() || vals.len() == n {
            let mut neg = DMatrix::zeros(n, n);
            for i in 0..found {
                let v = vecs.column(i);
                neg.syger(mu * vals[i], &v, &v, 1.0);
            }
            neg.fill_upper_triangle_with_lower_triangle();
            let pos = f + &neg / mu;
            return Some((pos, neg, found));
        }
        if k >= n / 2 {
            return None;
        }
        k *= 2;
    }
}

/// Nearest rotation (orthogonal polar factor with determinant +1) to a 3x3
/// matrix.
pub fn polar_rotation3(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd with u");
    let vt = svd.v_t.expect("svd with v_t");
    let det = (u * vt).determinant();
    let fix = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, det.signum()));
    u * fix * vt
}

/// Geodesic angle of a rotation matrix.
pub fn rotation_angle(r: &Matrix3<f64>) -> f64 {
    let c = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    c.acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use nalgebra::Vector3;

    fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        &a + a.transpose()
    }

    #[test]
    fn sorted_eigen_reconstructs() {
        let mut rng = derive_rng(11, "linalg-test", 0);
        let a = random_sym(12, &mut rng);
        let (vals, vecs) = sym_eigen(&a);
        for k in 1..12 {
            assert!(vals[k] >= vals[k - 1]);
        }
        let rec = &vecs * DMatrix::from_diagonal(&vals) * vecs.transpose();
        assert!((rec - &a).norm() < 1e-10);
    }

    #[test]
    fn power_iteration_matches_dense() {
        let mut rng = derive_rng(12, "linalg-test", 0);
        let a = random_sym(30, &mut rng);
        let s = &a * &a; // PSD, largest eigenvalue well separated in general
        let (vals, _) = sym_eigen(&s);
        let apply = |v: &DVector<f64>| &s * v;
        let (lmax, _) = power_largest(&apply, 30, &mut rng, 20_000, 1e-12);
        assert!((lmax - vals[29]).abs() < 1e-6 * vals[29].abs().max(1.0));
        let (lmin, lmax2) = smallest_eigenvalue_shifted(&apply, 30, &mut rng, 20_000, 1e-12);
        assert!((lmax2 - vals[29]).abs() < 1e-6 * vals[29].abs().max(1.0));
        assert!((lmin - vals[0]).abs() < 1e-5 * vals[29].abs().max(1.0));
    }

    #[test]
    fn spectral_split_reassembles() {
        let mut rng = derive_rng(13, "linalg-test", 0);
        let f = random_sym(20, &mut rng);
        let mu = 0.7;
        let (pos, neg, count) = split_spectral_parts(&f, mu);
        assert!(count >= 1 && count < 20);
        assert!((&pos - &neg / mu - &f).norm() < 1e-10);
        let (pv, _) = sym_eigen(&pos);
        let (nv, _) = sym_eigen(&neg);
        assert!(pv[0] > -1e-10);
        assert!(nv[0] > -1e-10);
    }

    #[test]
    fn iterative_split_matches_dense_on_low_rank_negative_part() {
        let mut rng = derive_rng(14, "linalg-test", 0);
        // PSD bulk plus a rank-2 negative dent.
        let n = 40;
        let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut f = &a * a.transpose();
        for _ in 0..2 {
            let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal)).normalize();
            f.syger(-80.0, &v, &v, 1.0);
        }
        f.fill_upper_triangle_with_lower_triangle();
        let (pos_d, neg_d, count_d) = split_spectral_parts(&f, 1.3);
        let (pos_i, neg_i, count_i) =
            split_spectral_parts_iterative(&f, 1.3, 2, &mut rng).expect("certified split");
        assert_eq!(count_d, 2);
        assert_eq!(count_i, 2);
        assert!((&pos_d - &pos_i).norm() < 1e-7 * pos_d.norm().max(1.0));
        assert!((&neg_d - &neg_i).norm() < 1e-7 * neg_d.norm().max(1.0));
    }

    #[test]
    fn polar_projection_recovers_rotation() {
        let axis = Vector3::new(0.3, -0.5, 0.81).normalize();
        let r = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), 0.9)
            .into_inner();
        let noisy = r * 1.7; // scaled, polar factor should strip the scale
        let p = polar_rotation3(&noisy);
        assert!((p - r).norm() < 1e-12);
        assert!((p.determinant() - 1.0).abs() < 1e-12);
        assert!(rotation_angle(&(p.transpose() * r)) < 1e-12);
    }
}
