//! Small dense linear algebra helpers on `&[f64]` slices.
//!
//! Ranks are tiny (n <= 8 in practice) so nothing here is blocked or clever;
//! the simulation hot loops only need dot products and axpy.

/// Inner product of two equal-length slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Squared Euclidean norm.
#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Euclidean norm.
#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `out += c * a`.
#[inline]
pub fn axpy(c: f64, a: &[f64], out: &mut [f64]) {
    for (o, x) in out.iter_mut().zip(a) {
        *o += c * x;
    }
}

/// Euclidean distance between two points.
#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `y = M x` for a row-major `n x n` matrix.
pub fn mat_vec(m: &[f64], x: &[f64], y: &mut [f64]) {
    let n = x.len();
    debug_assert_eq!(m.len(), n * n);
    for i in 0..n {
        y[i] = dot(&m[i * n..(i + 1) * n], x);
    }
}

/// Row-major product `a * b` of two `n x n` matrices.
pub fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik != 0.0 {
                for j in 0..n {
                    c[i * n + j] += aik * b[k * n + j];
                }
            }
        }
    }
    c
}

/// Identity matrix, row-major.
pub fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// True when all entries are finite.
pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Componentwise comparison within an absolute tolerance.
pub fn approx_eq(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when the matrix is numerically singular. `a` is row-major
/// `n x n` and is consumed as scratch.
pub fn solve_linear(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[pivot * n + col].abs() < 1e-12 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
        }
        let inv = 1.0 / a[col * n + col];
        for row in (col + 1)..n {
            let f = a[row * n + col] * inv;
            if f != 0.0 {
                for j in col..n {
                    a[row * n + j] -= f * a[col * n + j];
                }
                b[row] -= f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for j in (col + 1)..n {
            s -= a[col * n + j] * b[j];
        }
        b[col] = s / a[col * n + col];
    }
    Some(b)
}

/// Rank of the row span of `vectors` (each of length `n`), with tolerance.
pub fn span_rank(vectors: &[Vec<f64>], n: usize) -> usize {
    let mut rows: Vec<Vec<f64>> = vectors.to_vec();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) =
            (rank..rows.len()).max_by(|&i, &j| rows[i][col].abs().total_cmp(&rows[j][col].abs()))
        else {
            break;
        };
        if rows[pivot][col].abs() < 1e-9 {
            continue;
        }
        rows.swap(rank, pivot);
        let inv = 1.0 / rows[rank][col];
        for i in (rank + 1)..rows.len() {
            let f = rows[i][col] * inv;
            for j in 0..n {
                rows[i][j] -= f * rows[rank][j];
            }
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

/// Cholesky factor `L` (lower, row-major) of a symmetric positive definite
/// matrix. Returns `None` if a pivot degenerates.
pub fn cholesky(g: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}
