//! The discrimination problem: per-subsystem candidate pairs plus the prior,
//! with a JSON file format and a content hash used to validate stored policies.

use crate::error::{Error, Result};
use crate::quantum::{depolarize, pure_qubit, pure_qutrit, DensityMatrix, Mat};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// One subsystem's candidate states (ρ₊⁽ʲ⁾, ρ₋⁽ʲ⁾).
#[derive(Clone, Debug)]
pub struct CandidatePair {
    pub plus: DensityMatrix,
    pub minus: DensityMatrix,
}

impl CandidatePair {
    pub fn dim(&self) -> usize {
        self.plus.dim()
    }
}

/// N candidate pairs and the prior q = P(ρ = ρ₊).
#[derive(Clone, Debug)]
pub struct DiscriminationProblem {
    pairs: Vec<CandidatePair>,
    prior_q: f64,
}

impl DiscriminationProblem {
    pub fn new(pairs: Vec<CandidatePair>, prior_q: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Parameter("problem needs at least one subsystem".into()));
        }
        if !(0.0..=1.0).contains(&prior_q) {
            return Err(Error::Parameter(format!("prior {prior_q} outside [0, 1]")));
        }
        let dim = pairs[0].dim();
        for (j, pair) in pairs.iter().enumerate() {
            if pair.plus.dim() != pair.minus.dim() || pair.dim() != dim {
                return Err(Error::Parameter(format!(
                    "subsystem {} dimension mismatch (all subsystems must share one dimension)",
                    j + 1
                )));
            }
        }
        Ok(DiscriminationProblem { pairs, prior_q })
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn dim(&self) -> usize {
        self.pairs[0].dim()
    }

    pub fn prior(&self) -> f64 {
        self.prior_q
    }

    pub fn pair(&self, j: usize) -> &CandidatePair {
        &self.pairs[j]
    }

    pub fn pairs(&self) -> &[CandidatePair] {
        &self.pairs
    }

    /// True when every subsystem holds the same candidate pair (within 1e-12),
    /// enabling the O(N·Q_p) planner fast path.
    pub fn is_identical_copies(&self) -> bool {
        let first = &self.pairs[0];
        self.pairs[1..].iter().all(|p| {
            p.plus.mat().max_abs_diff(first.plus.mat()) <= 1e-12
                && p.minus.mat().max_abs_diff(first.minus.mat()) <= 1e-12
        })
    }

    /// SHA-256 over the exact bit patterns of the prior and every matrix
    /// entry; stable across runs and platforms.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.prior_q.to_bits().to_le_bytes());
        h.update((self.pairs.len() as u64).to_le_bytes());
        for pair in &self.pairs {
            h.update((pair.dim() as u64).to_le_bytes());
            for m in [&pair.plus, &pair.minus] {
                for x in m.mat().data() {
                    h.update(x.to_bits().to_le_bytes());
                }
            }
        }
        format!("{:x}", h.finalize())
    }
}

/// On-disk problem description. Each subsystem entry expands into one
/// candidate pair; all entries must produce the same dimension.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    pub prior_q: f64,
    pub subsystems: Vec<SubsystemSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SubsystemSpec {
    PureQubit {
        theta_plus: f64,
        theta_minus: f64,
    },
    DepolarizedQubit {
        theta_plus: f64,
        theta_minus: f64,
        gamma: f64,
    },
    PureQutrit {
        phi_plus: f64,
        theta_plus: f64,
        phi_minus: f64,
        theta_minus: f64,
    },
    DepolarizedQutrit {
        phi_plus: f64,
        theta_plus: f64,
        phi_minus: f64,
        theta_minus: f64,
        gamma: f64,
    },
    Matrix {
        rho_plus: Vec<Vec<f64>>,
        rho_minus: Vec<Vec<f64>>,
    },
}

impl SubsystemSpec {
    pub fn build(&self) -> Result<CandidatePair> {
        match self {
            SubsystemSpec::PureQubit {
                theta_plus,
                theta_minus,
            } => Ok(CandidatePair {
                plus: pure_qubit(*theta_plus),
                minus: pure_qubit(*theta_minus),
            }),
            SubsystemSpec::DepolarizedQubit {
                theta_plus,
                theta_minus,
                gamma,
            } => Ok(CandidatePair {
                plus: depolarize(&pure_qubit(*theta_plus), *gamma, 2)?,
                minus: depolarize(&pure_qubit(*theta_minus), *gamma, 2)?,
            }),
            SubsystemSpec::PureQutrit {
                phi_plus,
                theta_plus,
                phi_minus,
                theta_minus,
            } => Ok(CandidatePair {
                plus: pure_qutrit(*phi_plus, *theta_plus),
                minus: pure_qutrit(*phi_minus, *theta_minus),
            }),
            SubsystemSpec::DepolarizedQutrit {
                phi_plus,
                theta_plus,
                phi_minus,
                theta_minus,
                gamma,
            } => Ok(CandidatePair {
                plus: depolarize(&pure_qutrit(*phi_plus, *theta_plus), *gamma, 3)?,
                minus: depolarize(&pure_qutrit(*phi_minus, *theta_minus), *gamma, 3)?,
            }),
            SubsystemSpec::Matrix { rho_plus, rho_minus } => {
                let plus = DensityMatrix::new(Mat::from_rows(rho_plus)?)?;
                let minus = DensityMatrix::new(Mat::from_rows(rho_minus)?)?;
                Ok(CandidatePair { plus, minus })
            }
        }
    }
}

impl ProblemFile {
    pub fn to_problem(&self) -> Result<DiscriminationProblem> {
        let pairs = self
            .subsystems
            .iter()
            .map(|s| s.build())
            .collect::<Result<Vec<_>>>()?;
        DiscriminationProblem::new(pairs, self.prior_q)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("problem file: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<DiscriminationProblem> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)?.to_problem()
    }
}
