//! Exact finite-j reference computations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::ScalarFn;
use crate::sequence::{BandMatrix, TridiagonalMatrix};

const CLUSTER_GAP: f64 = 1e-8;
const INVERSE_ITERATIONS: usize = 3;
const JACOBI_MAX_SWEEPS: usize = 30;
const JACOBI_TOL: f64 = 1e-11;

/// Sorted eigenvalues and, optionally, matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<f64>>>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Number of eigenvalues strictly below `lambda` (Sturm count via LDLᵀ pivots).
pub fn sturm_count(m: &TridiagonalMatrix, lambda: f64) -> usize {
    let pivmin = f64::MIN_POSITIVE * m.offdiag.iter().fold(1.0f64, |a, b| a.max(b * b));
    let guard = |q: f64| if q.abs() < pivmin { -pivmin } else { q };
    let mut q = guard(m.diag[0] - lambda);
    let mut count = usize::from(q < 0.0);
    for i in 1..m.dim() {
        let e = m.offdiag[i - 1];
        q = guard((m.diag[i] - lambda) - e * e / q);
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(m: &TridiagonalMatrix) -> (f64, f64) {
    let n = m.dim();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = if i > 0 { m.offdiag[i - 1].abs() } else { 0.0 } + m.offdiag.get(i).map_or(0.0, |v| v.abs());
        lo = lo.min(m.diag[i] - r);
        hi = hi.max(m.diag[i] + r);
    }
    let pad = 1e-12 * (hi - lo).abs().max(1.0);
    (lo - pad, hi + pad)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection.
pub fn tridiagonal_eigenvalue(m: &TridiagonalMatrix, k: usize) -> Result<f64> {
    if k >= m.dim() {
        return Err(Error::Invalid(format!("eigenvalue index {k} out of range")));
    }
    let (mut lo, mut hi) = gershgorin(m);
    let tol = 1e-12 * m.norm_inf().max(1.0);
    for _ in 0..200 {
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if sturm_count(m, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Convergence(format!("bisection for eigenvalue {k}")))
}

/// LU factorization with partial pivoting of `T - λI`.
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(m: &TridiagonalMatrix, lambda: f64) -> Self {
        let n = m.dim();
        let mut dl = m.offdiag.clone();
        let mut du = m.offdiag.clone();
        let mut d: Vec<f64> = m.diag.iter().map(|a| a - lambda).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let floor = f64::EPSILON * m.norm_inf().max(f64::MIN_POSITIVE);
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = floor;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        for v in d.iter_mut() {
            if v.abs() < floor {
                *v = floor.copysign(*v);
            }
        }
        ShiftedLu { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.du2[i] * b[i + 2];
            }
            b[i] = s / self.d[i];
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn start_vector(n: usize, k: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 1.0 + 0.5 * (((i * 7919 + k * 104_729) % 1009) as f64 / 1009.0 - 0.5))
        .collect()
}

/// Eigenvectors for a run of eigenvalues, orthogonalized against each other.
fn cluster_vectors(m: &TridiagonalMatrix, values: &[f64], first: usize) -> Vec<Vec<f64>> {
    let n = m.dim();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (offset, &lambda) in values.iter().enumerate() {
        let lu = ShiftedLu::new(m, lambda);
        let mut v = start_vector(n, first + offset);
        normalize(&mut v);
        for _ in 0..INVERSE_ITERATIONS {
            lu.solve(&mut v);
            for u in &out {
                let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= dot * y);
            }
            normalize(&mut v);
        }
        out.push(v);
    }
    out
}

/// Eigen-decomposition of a symmetric tridiagonal matrix.
pub fn eig_tridiagonal(m: &TridiagonalMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    eig_tridiagonal_with(m, want_vectors, Execution::default())
}

pub fn eig_tridiagonal_with(
    m: &TridiagonalMatrix,
    want_vectors: bool,
    exec: Execution,
) -> Result<EigenDecomposition> {
    let n = m.dim();
    let eigenvalues = exec.try_map_range(n, |k| tridiagonal_eigenvalue(m, k))?;
    let eigenvectors = want_vectors.then(|| {
        let gap = CLUSTER_GAP * m.norm_inf().max(1.0);
        let mut clusters = vec![0usize];
        for k in 1..n {
            if eigenvalues[k] - eigenvalues[k - 1] >= gap {
                clusters.push(k);
            }
        }
        clusters.push(n);
        let blocks: Vec<(usize, usize)> = clusters.windows(2).map(|w| (w[0], w[1])).collect();
        exec.map(&blocks, |&(a, b)| cluster_vectors(m, &eigenvalues[a..b], a))
            .into_iter()
            .flatten()
            .collect()
    });
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenpair `k` (0-based) without computing the rest of the spectrum's vectors.
pub fn eigenpair(m: &TridiagonalMatrix, k: usize) -> Result<(f64, Vec<f64>)> {
    let lambda = tridiagonal_eigenvalue(m, k)?;
    let gap = CLUSTER_GAP * m.norm_inf().max(1.0);
    let (mut a, mut b) = (k, k + 1);
    let mut vals = vec![lambda];
    while a > 0 {
        let l = tridiagonal_eigenvalue(m, a - 1)?;
        if vals[0] - l >= gap {
            break;
        }
        vals.insert(0, l);
        a -= 1;
    }
    while b < m.dim() {
        let l = tridiagonal_eigenvalue(m, b)?;
        if l - vals[vals.len() - 1] >= gap {
            break;
        }
        vals.push(l);
        b += 1;
    }
    let vs = cluster_vectors(m, &vals, a);
    Ok((lambda, vs[k - a].clone()))
}

fn jacobi_real(a: &mut [f64], n: usize) -> Result<Vec<f64>> {
    let frob = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = JACOBI_TOL * frob.max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::Convergence(format!("Jacobi eigensolver after {JACOBI_MAX_SWEEPS} sweeps")))
}

fn jacobi_complex(a: &mut [Complex64], n: usize) -> Result<Vec<f64>> {
    let frob = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let target = JACOBI_TOL * frob.max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            return Ok((0..n).map(|i| a[i * n + i].re).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // phase on index q makes a_pq real and positive
                let ph = apq / r;
                for k in 0..n {
                    a[k * n + q] *= ph.conj();
                }
                for k in 0..n {
                    a[q * n + k] *= ph;
                }
                let (app, aqq) = (a[p * n + p].re, a[q * n + q].re);
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = akp * c - akq * s;
                    a[k * n + q] = akp * s + akq * c;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = apk * c - aqk * s;
                    a[q * n + k] = apk * s + aqk * c;
                }
            }
        }
    }
    Err(Error::Convergence(format!("Jacobi eigensolver after {JACOBI_MAX_SWEEPS} sweeps")))
}

/// Eigenvalues of a Hermitian band matrix by cyclic Jacobi rotations.
/// Real matrices use real rotations.
pub fn eig_dense_hermitian(m: &BandMatrix) -> Result<EigenDecomposition> {
    let n = m.dim();
    if n > 2048 {
        return Err(Error::Invalid(format!("dense oracle limited to D ≤ 2048, got {n}")));
    }
    let dense = m.to_dense();
    let mut eigenvalues = if dense.iter().all(|v| v.im == 0.0) {
        let mut a: Vec<f64> = dense.iter().map(|v| v.re).collect();
        jacobi_real(&mut a, n)?
    } else {
        let mut a = dense;
        jacobi_complex(&mut a, n)?
    };
    eigenvalues.sort_by(f64::total_cmp);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: None,
    })
}

/// Fraction of eigenvalues at or below `lambda`.
pub fn staircase(e: &EigenDecomposition, lambda: f64) -> f64 {
    e.eigenvalues.partition_point(|&v| v <= lambda) as f64 / e.dim() as f64
}

/// Normalized trace `(2j+1)⁻¹ Σ f(λ(n,j))`.
pub fn finite_trace(e: &EigenDecomposition, f: &ScalarFn) -> f64 {
    e.eigenvalues.iter().map(|&l| f.eval(l)).sum::<f64>() / e.dim() as f64
}

/// `⟨v|Q|v⟩` for a tridiagonal `Q`.
pub fn expectation_value(q: &TridiagonalMatrix, v: &[f64]) -> f64 {
    q.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Least-squares fit of `T_j = T0 + T1/j + T2/j²` with `T0` fixed; returns `T1`.
/// Two distinct sizes determine `T1` and `T2` exactly.
pub fn richardson_t1(values: &[(f64, f64)], t0: f64) -> Result<f64> {
    let mut js: Vec<f64> = values.iter().map(|v| v.0).collect();
    js.sort_by(f64::total_cmp);
    js.dedup();
    if js.len() < 2 {
        return Err(Error::Invalid("Richardson fit needs at least two distinct j".into()));
    }
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(j, t) in values {
        let (u, w) = (1.0 / j, 1.0 / (j * j));
        let y = t - t0;
        s11 += u * u;
        s12 += u * w;
        s22 += w * w;
        r1 += u * y;
        r2 += w * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-14 * s11 * s22 {
        return Err(Error::Invalid("singular Richardson fit".into()));
    }
    Ok((r1 * s22 - r2 * s12) / det)
}

/// Number of `m`-step ±1 walks on ℤ that start and end at site `n` and visit
/// site 0. Row `n` of a matrix sits at site `n + 1` relative to the wall, so
/// its diagonal deficit in `Hᵐ` is `count_boundary_walks(m, n + 1)`.
pub fn count_boundary_walks(m: usize, n: usize) -> Result<u64> {
    if m > 16 || m % 2 == 1 {
        return Err(Error::Invalid(format!("walk length must be even and ≤ 16, got {m}")));
    }
    let mut count = 0;
    for bits in 0u32..(1 << m) {
        let mut pos = n as i64;
        let mut hit = pos == 0;
        for k in 0..m {
            pos += if bits >> k & 1 == 1 { 1 } else { -1 };
            hit |= pos == 0;
        }
        if pos == n as i64 && hit {
            count += 1;
        }
    }
    Ok(count)
}
