//! Small dense eigen-solvers for density-matrix work (dimensions up to a few dozen).

use num_complex::Complex;

use crate::scalar::Scalar;

/// Cyclic Jacobi on a real symmetric `n x n` row-major matrix. Returns
/// ascending eigenvalues and the matching orthonormal eigenvectors as columns
/// of a row-major matrix.
pub fn symmetric_eigen<T: Scalar>(matrix: &[T], n: usize) -> (Vec<T>, Vec<T>) {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let mut a = matrix.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let two = T::one() + T::one();
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum();
        if off <= T::min_positive_value() || off.sqrt() <= T::epsilon() * T::epsilon() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = cs * akp - sn * akq;
                    a[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = cs * apk - sn * aqk;
                    a[q * n + k] = sn * apk + cs * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = cs * vkp - sn * vkq;
                    v[k * n + q] = sn * vkp + cs * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap());
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + new_col] = v[r * n + old_col];
        }
    }
    (values, vectors)
}

/// Real symmetric embedding `[[Re, -Im], [Im, Re]]` of a Hermitian matrix.
/// Every eigenvalue of the Hermitian matrix appears twice in the embedding.
fn embed<T: Scalar>(h: &[Complex<T>], dim: usize) -> Vec<T> {
    let n2 = 2 * dim;
    let mut m = vec![T::zero(); n2 * n2];
    for r in 0..dim {
        for c in 0..dim {
            let z = h[r * dim + c];
            m[r * n2 + c] = z.re;
            m[r * n2 + c + dim] = -z.im;
            m[(r + dim) * n2 + c] = z.im;
            m[(r + dim) * n2 + c + dim] = z.re;
        }
    }
    m
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<T: Scalar>(h: &[Complex<T>], dim: usize) -> Vec<T> {
    let (values, _) = symmetric_eigen(&embed(h, dim), 2 * dim);
    values.chunks(2).map(|pair| (pair[0] + pair[1]) / (T::one() + T::one())).collect()
}

/// Rebuilds `sum_i f(lambda)_i |v_i><v_i|`, where `map` receives the ascending
/// eigenvalues and returns replacements in the same order.
pub fn hermitian_spectral_map<T: Scalar>(
    h: &[Complex<T>],
    dim: usize,
    map: impl FnOnce(&[T]) -> Vec<T>,
) -> Vec<Complex<T>> {
    let n2 = 2 * dim;
    let (values, vectors) = symmetric_eigen(&embed(h, dim), n2);
    let two = T::one() + T::one();
    let paired: Vec<T> = values.chunks(2).map(|p| (p[0] + p[1]) / two).collect();
    let mapped = map(&paired);
    assert_eq!(mapped.len(), dim, "spectral map must preserve the count");
    // Each Hermitian eigenvector contributes two real eigenvectors (x, y) and
    // (-y, x); summing their outer products yields the embedding of |v><v|.
    let mut out = vec![T::zero(); n2 * n2];
    for (k, &lambda) in mapped.iter().flat_map(|l| [l, l]).enumerate() {
        if lambda == T::zero() {
            continue;
        }
        for r in 0..n2 {
            let ur = vectors[r * n2 + k] * lambda;
            if ur == T::zero() {
                continue;
            }
            for c in 0..n2 {
                out[r * n2 + c] += ur * vectors[c * n2 + k];
            }
        }
    }
    let mut result = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in 0..dim {
            result.push(Complex::new(out[r * n2 + c], out[(r + dim) * n2 + c]));
        }
    }
    result
}

/// Euclidean projection of `values` onto the probability simplex
/// `{p : p_i >= 0, sum p_i = 1}`.
pub fn project_to_simplex<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut prefix = T::zero();
    let mut shift = T::zero();
    for (k, &u) in sorted.iter().enumerate() {
        prefix += u;
        let candidate = (prefix - T::one()) / T::from_usize(k + 1).unwrap();
        if u - candidate > T::zero() {
            shift = candidate;
        }
    }
    values.iter().map(|&v| (v - shift).max(T::zero())).collect()
}
