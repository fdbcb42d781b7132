//! Projective measurements: Helstrom and modified-Helstrom construction,
//! outcome probabilities, and the quantized qubit/qutrit action spaces.

use crate::error::{Error, Result};
use crate::quantum::{eig_sym, DensityMatrix, Mat};
use serde::{Deserialize, Serialize};

/// Eigenvalues with |λ| ≤ this tolerance count as λ ≥ 0 and join the Helstrom
/// projector, keeping the construction deterministic at degeneracies.
pub const ZERO_EIG_TOL: f64 = 1e-12;

/// An ordered list of mutually orthogonal projectors summing to identity.
/// Outcomes are indexed by position. For binary Helstrom-style measurements
/// the convention is `[I − Π, Π]` with labels `[+1, −1]`: the Π slot is the
/// outcome that moves belief toward ρ₋.
#[derive(Clone, Debug)]
pub struct ProjectiveMeasurement {
    pub projectors: Vec<Mat>,
    pub outcome_labels: Vec<i32>,
}

impl ProjectiveMeasurement {
    pub fn num_outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    /// Max violation across idempotence, orthogonality and completeness.
    pub fn validity_residual(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0_f64;
        let mut sum = Mat::zeros(dim);
        for (i, pi) in self.projectors.iter().enumerate() {
            worst = worst.max(pi.matmul(pi).max_abs_diff(pi));
            sum = sum.add(pi);
            for pj in &self.projectors[i + 1..] {
                worst = worst.max(pi.matmul(pj).max_abs());
            }
        }
        worst.max(sum.max_abs_diff(&Mat::identity(dim)))
    }
}

/// Whether the binary measurement `[I − Π, Π]` is trivial (Π ∈ {0, I}).
pub fn is_trivial(m: &ProjectiveMeasurement) -> bool {
    m.projectors.iter().any(|p| {
        p.max_abs() <= 1e-12 || p.max_abs_diff(&Mat::identity(p.dim())) <= 1e-12
    })
}

fn helstrom_projector(p: f64, rho_plus: &DensityMatrix, rho_minus: &DensityMatrix) -> Result<Mat> {
    if rho_plus.dim() != rho_minus.dim() {
        return Err(Error::Parameter(format!(
            "helstrom: dimension mismatch {} vs {}",
            rho_plus.dim(),
            rho_minus.dim()
        )));
    }
    let m = rho_minus.mat().scaled(1.0 - p).sub(&rho_plus.mat().scaled(p));
    let eig = eig_sym(&m)?;
    let mut pi = Mat::zeros(m.dim());
    for (l, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        if *l >= -ZERO_EIG_TOL {
            pi.add_outer(v, 1.0);
        }
    }
    Ok(pi)
}

/// The error-minimizing binary measurement `{I − Π, Π}` with Π the projector
/// onto the λ ≥ 0 eigenspace of (1−p)ρ₋ − p·ρ₊. May be trivial.
pub fn helstrom(
    p: f64,
    rho_plus: &DensityMatrix,
    rho_minus: &DensityMatrix,
) -> Result<ProjectiveMeasurement> {
    let pi = helstrom_projector(p, rho_plus, rho_minus)?;
    let complement = Mat::identity(pi.dim()).sub(&pi);
    Ok(ProjectiveMeasurement {
        projectors: vec![complement, pi],
        outcome_labels: vec![1, -1],
    })
}

/// Helstrom when nontrivial; otherwise the rank-1 split isolating the extremal
/// eigenvector of (1−p)ρ₋ − p·ρ₊, which always yields an informative outcome.
pub fn modified_helstrom(
    p: f64,
    rho_plus: &DensityMatrix,
    rho_minus: &DensityMatrix,
) -> Result<ProjectiveMeasurement> {
    if rho_plus.dim() != rho_minus.dim() {
        return Err(Error::Parameter(format!(
            "modified_helstrom: dimension mismatch {} vs {}",
            rho_plus.dim(),
            rho_minus.dim()
        )));
    }
    let m = rho_minus.mat().scaled(1.0 - p).sub(&rho_plus.mat().scaled(p));
    let eig = eig_sym(&m)?;
    let dim = m.dim();
    let nonneg: Vec<usize> = (0..dim)
        .filter(|&i| eig.eigenvalues[i] >= -ZERO_EIG_TOL)
        .collect();
    let pi_star = if nonneg.is_empty() {
        // Π = 0: isolate the maximal (least negative) eigenvector.
        Mat::outer(&eig.eigenvectors[0])
    } else if nonneg.len() == dim {
        // Π = I: carve out the minimal eigenvector.
        Mat::identity(dim).sub(&Mat::outer(&eig.eigenvectors[dim - 1]))
    } else {
        let mut pi = Mat::zeros(dim);
        for &i in &nonneg {
            pi.add_outer(&eig.eigenvectors[i], 1.0);
        }
        pi
    };
    let complement = Mat::identity(dim).sub(&pi_star);
    Ok(ProjectiveMeasurement {
        projectors: vec![complement, pi_star],
        outcome_labels: vec![1, -1],
    })
}

/// Tr(Π_outcome · ρ), clamped to [0, 1].
pub fn outcome_prob(
    m: &ProjectiveMeasurement,
    rho: &DensityMatrix,
    outcome_index: usize,
) -> Result<f64> {
    let pi = m
        .projectors
        .get(outcome_index)
        .ok_or_else(|| Error::Parameter(format!("outcome index {outcome_index} out of range")))?;
    Ok(pi.trace_product(rho.mat()).clamp(0.0, 1.0))
}

/// Identifies how an [`ActionSpace`] was constructed; stored with persisted
/// policies so they can be rebuilt and validated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ActionSpaceKind {
    QubitGrid { q_phi: usize },
    QutritTernary { r_vec: Vec<usize>, q: usize },
    QutritBinary { r_vec: Vec<usize>, q: usize },
    ModifiedHelstromOnly,
}

#[derive(Clone, Debug)]
pub struct ActionSpace {
    pub actions: Vec<ProjectiveMeasurement>,
    pub kind: ActionSpaceKind,
}

impl ActionSpace {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Q_φ binary measurements at φ = (π/2)·i/(Q_φ−1): basis {(cos φ, sin φ),
/// (−sin φ, cos φ)}, which sweeps every distinct real qubit basis.
pub fn qubit_action_space(q_phi: usize) -> Result<ActionSpace> {
    if q_phi < 2 {
        return Err(Error::Parameter(format!("qubit_action_space: Q_phi {q_phi} < 2")));
    }
    let mut actions = Vec::with_capacity(q_phi);
    for i in 0..q_phi {
        let phi = std::f64::consts::FRAC_PI_2 * i as f64 / (q_phi - 1) as f64;
        let (s, c) = phi.sin_cos();
        actions.push(ProjectiveMeasurement {
            projectors: vec![Mat::outer(&[c, s]), Mat::outer(&[-s, c])],
            outcome_labels: vec![1, -1],
        });
    }
    Ok(ActionSpace {
        actions,
        kind: ActionSpaceKind::QubitGrid { q_phi },
    })
}

const GOLDEN: f64 = 1.618033988749894848204586834365638118;

fn icosahedron() -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let n = (1.0 + GOLDEN * GOLDEN).sqrt();
    let (a, b) = (1.0 / n, GOLDEN / n);
    let verts = vec![
        [-a, b, 0.0],
        [a, b, 0.0],
        [-a, -b, 0.0],
        [a, -b, 0.0],
        [0.0, -a, b],
        [0.0, a, b],
        [0.0, -a, -b],
        [0.0, a, -b],
        [b, 0.0, -a],
        [b, 0.0, a],
        [-b, 0.0, -a],
        [-b, 0.0, a],
    ];
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (verts, faces)
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// One subdivision step: split each triangular face into r² faces. Edge points
/// are shared combinatorially via canonical edge keys, so the vertex count is
/// exact regardless of floating-point geometry.
fn subdivide(verts: &mut Vec<[f64; 3]>, faces: &[[usize; 3]], r: usize) -> Vec<[usize; 3]> {
    use std::collections::HashMap;
    let mut edge_points: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut new_faces = Vec::with_capacity(faces.len() * r * r);

    for &[fa, fb, fc] in faces {
        // Barycentric grid P(i, j) = a + (b−a)·i/r + (c−a)·j/r, i + j ≤ r.
        let (ca, cb, cc) = (verts[fa], verts[fb], verts[fc]);
        let mut index_of = |verts: &mut Vec<[f64; 3]>, i: usize, j: usize| -> usize {
            let k = r - i - j;
            match (i, j, k) {
                (0, 0, _) => fa,
                (_, 0, 0) => fb,
                (0, _, 0) => fc,
                _ => {
                    let on_edge = |u: usize, v: usize, t: usize| {
                        if u < v {
                            (u, v, t)
                        } else {
                            (v, u, r - t)
                        }
                    };
                    let key = if j == 0 {
                        Some(on_edge(fa, fb, i))
                    } else if i == 0 {
                        Some(on_edge(fa, fc, j))
                    } else if i + j == r {
                        Some(on_edge(fb, fc, j))
                    } else {
                        None
                    };
                    let make = |verts: &mut Vec<[f64; 3]>| {
                        let (a, b, c) = (ca, cb, cc);
                        let fi = i as f64 / r as f64;
                        let fj = j as f64 / r as f64;
                        let p = [
                            a[0] + (b[0] - a[0]) * fi + (c[0] - a[0]) * fj,
                            a[1] + (b[1] - a[1]) * fi + (c[1] - a[1]) * fj,
                            a[2] + (b[2] - a[2]) * fi + (c[2] - a[2]) * fj,
                        ];
                        verts.push(normalize3(p));
                        verts.len() - 1
                    };
                    match key {
                        Some(k) => {
                            if let Some(&idx) = edge_points.get(&k) {
                                idx
                            } else {
                                let idx = make(verts);
                                edge_points.insert(k, idx);
                                idx
                            }
                        }
                        None => make(verts),
                    }
                }
            }
        };
        // Interior points are unique per face; memoize the whole grid locally.
        let mut grid = vec![usize::MAX; (r + 1) * (r + 1)];
        let mut at = |verts: &mut Vec<[f64; 3]>, i: usize, j: usize| -> usize {
            let slot = i * (r + 1) + j;
            if grid[slot] == usize::MAX {
                grid[slot] = index_of(verts, i, j);
            }
            grid[slot]
        };
        for i in 0..r {
            for j in 0..(r - i) {
                let p00 = at(verts, i, j);
                let p10 = at(verts, i + 1, j);
                let p01 = at(verts, i, j + 1);
                new_faces.push([p00, p10, p01]);
                if i + j + 2 <= r {
                    let p11 = at(verts, i + 1, j + 1);
                    new_faces.push([p10, p11, p01]);
                }
            }
        }
    }
    new_faces
}

/// Vertices of an icosahedron subdivided per `r_vec` (segment split by rᵢ at
/// step i) and projected to the unit sphere; count is 10·∏rᵢ² + 2.
pub fn icosphere_vertices(r_vec: &[usize]) -> Result<Vec<[f64; 3]>> {
    if r_vec.iter().any(|&r| r < 1) {
        return Err(Error::Parameter("icosphere subdivision factors must be ≥ 1".into()));
    }
    let (mut verts, mut faces) = icosahedron();
    for &r in r_vec {
        if r > 1 {
            faces = subdivide(&mut verts, &faces, r);
        }
    }
    // Defensive dedup; the combinatorial construction should never collide.
    let mut out: Vec<[f64; 3]> = Vec::with_capacity(verts.len());
    for v in verts {
        if !out.iter().any(|u| {
            (u[0] - v[0]).abs() <= 1e-9 && (u[1] - v[1]).abs() <= 1e-9 && (u[2] - v[2]).abs() <= 1e-9
        }) {
            out.push(v);
        }
    }
    Ok(out)
}

/// R(φ, θ): orthogonal matrix whose third column is the unit vector at (φ, θ).
pub fn rotation_matrix(phi: f64, theta: f64) -> Mat {
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    Mat::from_rows(&[
        vec![-sp, cp * ct, cp * st],
        vec![cp, sp * ct, sp * st],
        vec![0.0, -st, ct],
    ])
    .expect("static 3x3")
}

/// Ternary and binary qutrit action spaces from the icosphere quantization:
/// for each sphere vertex (φ, θ) and each ω = πq/(2Q), the rotated basis
/// u₁, u₂, u₃ yields one ternary measurement and three binary ones
/// (rank-2 element first in each binary pair).
pub fn qutrit_action_spaces(r_vec: &[usize], q_res: usize) -> Result<(ActionSpace, ActionSpace)> {
    if q_res < 1 {
        return Err(Error::Parameter("qutrit_action_spaces: Q must be ≥ 1".into()));
    }
    let verts = icosphere_vertices(r_vec)?;
    let mut ternary = Vec::with_capacity(verts.len() * q_res);
    let mut binary = Vec::with_capacity(3 * verts.len() * q_res);
    let id3 = Mat::identity(3);
    for v in &verts {
        let theta = v[2].clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]);
        let rot = rotation_matrix(phi, theta);
        for qi in 0..q_res {
            let omega = std::f64::consts::FRAC_PI_2 * qi as f64 / q_res as f64;
            let (so, co) = omega.sin_cos();
            let us = [
                rot.apply(&[co, so, 0.0]),
                rot.apply(&[-so, co, 0.0]),
                rot.apply(&[0.0, 0.0, 1.0]),
            ];
            let projs: Vec<Mat> = us.iter().map(|u| Mat::outer(u)).collect();
            for (k, pk) in projs.iter().enumerate() {
                binary.push(ProjectiveMeasurement {
                    projectors: vec![id3.sub(pk), pk.clone()],
                    outcome_labels: vec![1, -(k as i32 + 1)],
                });
            }
            ternary.push(ProjectiveMeasurement {
                projectors: projs,
                outcome_labels: vec![1, 2, 3],
            });
        }
    }
    Ok((
        ActionSpace {
            actions: ternary,
            kind: ActionSpaceKind::QutritTernary {
                r_vec: r_vec.to_vec(),
                q: q_res,
            },
        },
        ActionSpace {
            actions: binary,
            kind: ActionSpaceKind::QutritBinary {
                r_vec: r_vec.to_vec(),
                q: q_res,
            },
        },
    ))
}
