//! Real density matrices, pure-state constructors, the depolarizing channel,
//! tensor products, and symmetric eigendecomposition.
//!
//! Everything here is real-valued. For the discrimination statistics computed
//! in this crate only the real part of any projector matters (Tr[ρ Π] =
//! Tr[ρ Re(Π)] for real ρ), so complex entries are rejected at construction
//! by never being representable.

use crate::error::{Error, Result};

/// Default cap on the total dimension of a joint (tensored) state: 3^8.
pub const DEFAULT_DIM_CAP: usize = 6561;

const SYM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// Dense real square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    dim: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        Mat {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Mat::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Parameter("matrix must be square and non-empty".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            data.extend_from_slice(r);
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parameter("matrix entries must be finite".into()));
        }
        Ok(Mat { dim, data })
    }

    /// Rank-1 projector v vᵀ for a (not necessarily normalized) vector.
    pub fn outer(v: &[f64]) -> Self {
        let dim = v.len();
        let mut m = Mat::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = v[i] * v[j];
            }
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len());
        for (i, x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = *x;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Tr(self · other). Cheaper than materializing the product.
    pub fn trace_product(&self, other: &Mat) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        acc
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Mat {
        Mat {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.dim, other.dim);
        Mat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.dim, other.dim);
        Mat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// In-place self += s * (v vᵀ).
    pub fn add_outer(&mut self, v: &[f64], s: f64) {
        let n = self.dim;
        for i in 0..n {
            let vi = s * v[i];
            for j in 0..n {
                self.data[i * n + j] += vi * v[j];
            }
        }
    }

    pub fn kron(&self, other: &Mat) -> Mat {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut out = Mat::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                if a == 0.0 {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.data[(i * m + k) * dim + (j * m + l)] = a * other.data[k * m + l];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn symmetrized(&self) -> Mat {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (self.get(i, j) + self.get(j, i));
                out.set(i, j, m);
                out.set(j, i, m);
            }
        }
        out
    }

    /// Apply to a vector.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.data[i * n + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }
}

/// Real symmetric positive-semidefinite unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: Mat,
}

impl DensityMatrix {
    /// Validating constructor. PSD is checked by eigendecomposition, so this
    /// is meant for small (user-supplied) matrices; internal operations that
    /// preserve the invariants use [`DensityMatrix::from_mat_unchecked`].
    pub fn new(mat: Mat) -> Result<Self> {
        if mat.asymmetry() > SYM_TOL {
            return Err(Error::Parameter(format!(
                "density matrix not symmetric (asymmetry {:.3e})",
                mat.asymmetry()
            )));
        }
        if (mat.trace() - 1.0).abs() > TRACE_TOL {
            return Err(Error::Parameter(format!(
                "density matrix trace {} != 1",
                mat.trace()
            )));
        }
        let eig = eig_sym(&mat)?;
        if let Some(min) = eig.eigenvalues.last() {
            if *min < -PSD_TOL {
                return Err(Error::Parameter(format!(
                    "density matrix not PSD (min eigenvalue {min:.3e})"
                )));
            }
        }
        Ok(DensityMatrix {
            mat: mat.symmetrized(),
        })
    }

    /// For internal use on matrices known to satisfy the invariants.
    pub(crate) fn from_mat_unchecked(mat: Mat) -> Self {
        DensityMatrix { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }
}

/// |θ⟩⟨θ| with |θ⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩.
pub fn pure_qubit(theta: f64) -> DensityMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    DensityMatrix::from_mat_unchecked(Mat::outer(&[c, s]))
}

/// v vᵀ with v = (sinθ cosφ, sinθ sinφ, cosθ).
pub fn pure_qutrit(phi: f64, theta: f64) -> DensityMatrix {
    let v = [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ];
    DensityMatrix::from_mat_unchecked(Mat::outer(&v))
}

/// (1−γ)ρ + (γ/d)·I.
pub fn depolarize(rho: &DensityMatrix, gamma: f64, d: usize) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Parameter(format!(
            "depolarizing parameter {gamma} outside [0, 1]"
        )));
    }
    if rho.dim() != d {
        return Err(Error::Parameter(format!(
            "depolarize: state dim {} != channel dim {}",
            rho.dim(),
            d
        )));
    }
    let mut out = rho.mat().scaled(1.0 - gamma);
    for i in 0..d {
        out.set(i, i, out.get(i, i) + gamma / d as f64);
    }
    Ok(DensityMatrix::from_mat_unchecked(out))
}

/// Kronecker product of the factors in list order, capped at [`DEFAULT_DIM_CAP`].
pub fn tensor(factors: &[DensityMatrix]) -> Result<DensityMatrix> {
    tensor_with_cap(factors, DEFAULT_DIM_CAP)
}

pub fn tensor_with_cap(factors: &[DensityMatrix], cap: usize) -> Result<DensityMatrix> {
    if factors.is_empty() {
        return Err(Error::Parameter("tensor of an empty list".into()));
    }
    let mut total = 1usize;
    for f in factors {
        total = total
            .checked_mul(f.dim())
            .ok_or_else(|| Error::Resource("tensor dimension overflow".into()))?;
        if total > cap {
            return Err(Error::Resource(format!(
                "tensor dimension {total} exceeds cap {cap}"
            )));
        }
    }
    let mut acc = factors[0].mat().clone();
    for f in &factors[1..] {
        acc = acc.kron(f.mat());
    }
    Ok(DensityMatrix::from_mat_unchecked(acc))
}

/// Eigendecomposition of a real symmetric matrix; eigenvalues descending,
/// eigenvectors orthonormal columns with the first nonzero component positive.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn reconstruct(&self, dim: usize) -> Mat {
        let mut m = Mat::zeros(dim);
        for (l, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m.add_outer(v, *l);
        }
        m
    }
}

/// Closed-form solvers for 2×2 and 3×3, cyclic Jacobi above that.
pub fn eig_sym(m: &Mat) -> Result<EigenDecomposition> {
    if m.asymmetry() > 1e-9 {
        return Err(Error::Parameter(format!(
            "eig_sym: matrix not symmetric (asymmetry {:.3e})",
            m.asymmetry()
        )));
    }
    let a = m.symmetrized();
    let mut dec = match a.dim() {
        0 => return Err(Error::Parameter("eig_sym: empty matrix".into())),
        1 => EigenDecomposition {
            eigenvalues: vec![a.get(0, 0)],
            eigenvectors: vec![vec![1.0]],
        },
        2 => eig_sym_2(&a),
        3 => eig_sym_3(&a),
        _ => eig_sym_jacobi(&a),
    };
    sort_and_fix_signs(&mut dec);
    Ok(dec)
}

fn sort_and_fix_signs(dec: &mut EigenDecomposition) {
    let mut order: Vec<usize> = (0..dec.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| dec.eigenvalues[j].partial_cmp(&dec.eigenvalues[i]).unwrap());
    dec.eigenvalues = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    dec.eigenvectors = order.iter().map(|&i| dec.eigenvectors[i].clone()).collect();
    for v in &mut dec.eigenvectors {
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
        }
    }
}

fn eig_sym_2(m: &Mat) -> EigenDecomposition {
    let (a, b, c) = (m.get(0, 0), m.get(0, 1), m.get(1, 1));
    let mean = 0.5 * (a + c);
    let half = 0.5 * (a - c);
    let r = half.hypot(b);
    let (l1, l2) = (mean + r, mean - r);
    let scale = m.max_abs().max(1.0);
    if r <= 1e-15 * scale {
        return EigenDecomposition {
            eigenvalues: vec![l1, l2],
            eigenvectors: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
    }
    // Pick the better-conditioned row of (M − λ₁I) to solve for v₁.
    let cand1 = [b, l1 - a];
    let cand2 = [l1 - c, b];
    let n1 = cand1[0].hypot(cand1[1]);
    let n2 = cand2[0].hypot(cand2[1]);
    let v1 = if n1 >= n2 {
        [cand1[0] / n1, cand1[1] / n1]
    } else {
        [cand2[0] / n2, cand2[1] / n2]
    };
    let v2 = [-v1[1], v1[0]];
    EigenDecomposition {
        eigenvalues: vec![l1, l2],
        eigenvectors: vec![v1.to_vec(), v2.to_vec()],
    }
}

fn eigvals_3(m: &Mat) -> [f64; 3] {
    // Trigonometric closed form for symmetric 3×3.
    let p1 = m.get(0, 1).powi(2) + m.get(0, 2).powi(2) + m.get(1, 2).powi(2);
    let q = m.trace() / 3.0;
    if p1 == 0.0 {
        let mut d = [m.get(0, 0), m.get(1, 1), m.get(2, 2)];
        d.sort_by(|a, b| b.partial_cmp(a).unwrap());
        return d;
    }
    let p2 = (m.get(0, 0) - q).powi(2)
        + (m.get(1, 1) - q).powi(2)
        + (m.get(2, 2) - q).powi(2)
        + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = m.clone();
    for i in 0..3 {
        b.set(i, i, b.get(i, i) - q);
    }
    let b = b.scaled(1.0 / p);
    let det_b = b.get(0, 0) * (b.get(1, 1) * b.get(2, 2) - b.get(1, 2) * b.get(2, 1))
        - b.get(0, 1) * (b.get(1, 0) * b.get(2, 2) - b.get(1, 2) * b.get(2, 0))
        + b.get(0, 2) * (b.get(1, 0) * b.get(2, 1) - b.get(1, 1) * b.get(2, 0));
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let l2 = 3.0 * q - l1 - l3;
    [l1, l2, l3]
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Eigenvector of a 3×3 symmetric matrix for eigenvalue `l`, via the largest
/// cross product of rows of (M − l·I). Returns None when (M − l·I) has rank
/// below 2, i.e. `l` is (numerically) degenerate.
fn eigvec_3(m: &Mat, l: f64, scale: f64) -> Option<[f64; 3]> {
    let rows: Vec<Vec<f64>> = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| m.get(i, j) - if i == j { l } else { 0.0 })
                .collect()
        })
        .collect();
    let cands = [
        cross(&rows[0], &rows[1]),
        cross(&rows[0], &rows[2]),
        cross(&rows[1], &rows[2]),
    ];
    let best = cands
        .iter()
        .max_by(|a, b| norm(*a).partial_cmp(&norm(*b)).unwrap())
        .unwrap();
    let n = norm(best);
    if n <= 1e-9 * scale * scale {
        return None;
    }
    Some([best[0] / n, best[1] / n, best[2] / n])
}

/// Unit vector orthogonal to all of `vs`, completed from coordinate axes.
fn complete_orthonormal(vs: &[[f64; 3]]) -> [f64; 3] {
    for seed in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
        let mut v = seed;
        for u in vs {
            let d = v[0] * u[0] + v[1] * u[1] + v[2] * u[2];
            for i in 0..3 {
                v[i] -= d * u[i];
            }
        }
        let n = norm(&v);
        if n > 0.5 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
    // Fall through with a smaller acceptance threshold.
    let mut best = [1.0, 0.0, 0.0];
    let mut best_n = 0.0;
    for seed in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
        let mut v = seed;
        for u in vs {
            let d = v[0] * u[0] + v[1] * u[1] + v[2] * u[2];
            for i in 0..3 {
                v[i] -= d * u[i];
            }
        }
        let n = norm(&v);
        if n > best_n {
            best_n = n;
            best = [v[0] / n, v[1] / n, v[2] / n];
        }
    }
    best
}

fn eig_sym_3(m: &Mat) -> EigenDecomposition {
    let vals = eigvals_3(m);
    let scale = m.max_abs().max(1.0);
    let deg = 1e-8 * scale;
    let gap_top = vals[0] - vals[1];
    let gap_bot = vals[1] - vals[2];

    let (v1, v2, v3): ([f64; 3], [f64; 3], [f64; 3]);
    if gap_top < deg && gap_bot < deg {
        (v1, v2, v3) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
    } else if gap_top < deg {
        // λ₁ ≈ λ₂: pin down the well-separated bottom vector first.
        let b = eigvec_3(m, vals[2], scale).unwrap_or([0.0, 0.0, 1.0]);
        let a = complete_orthonormal(&[b]);
        let c = cross(&b, &a);
        (v1, v2, v3) = (a, c, b);
    } else if gap_bot < deg {
        let a = eigvec_3(m, vals[0], scale).unwrap_or([1.0, 0.0, 0.0]);
        let b = complete_orthonormal(&[a]);
        let c = cross(&a, &b);
        (v1, v2, v3) = (a, b, c);
    } else {
        let mut a = eigvec_3(m, vals[0], scale).unwrap_or([1.0, 0.0, 0.0]);
        let mut c = eigvec_3(m, vals[2], scale).unwrap_or_else(|| complete_orthonormal(&[a]));
        // Re-orthogonalize to machine precision.
        let na = norm(&a);
        for x in a.iter_mut() {
            *x /= na;
        }
        let d = c[0] * a[0] + c[1] * a[1] + c[2] * a[2];
        for i in 0..3 {
            c[i] -= d * a[i];
        }
        let nc = norm(&c);
        if nc > 1e-6 {
            for x in c.iter_mut() {
                *x /= nc;
            }
        } else {
            c = complete_orthonormal(&[a]);
        }
        let b = cross(&c, &a);
        (v1, v2, v3) = (a, b, c);
    }
    EigenDecomposition {
        eigenvalues: vals.to_vec(),
        eigenvectors: vec![v1.to_vec(), v2.to_vec(), v3.to_vec()],
    }
}

fn eig_sym_jacobi(m: &Mat) -> EigenDecomposition {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = Mat::identity(n);
    let scale = a.max_abs().max(1e-300);
    let tol = 1e-15 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let eigenvalues: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    let eigenvectors: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| v.get(i, j)).collect())
        .collect();
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}
