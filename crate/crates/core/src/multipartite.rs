//! Bipartition audits of pure RVB states.
//!
//! For a pure global state a subset is entangled with its complement exactly
//! when its reduced state is mixed, so every verdict here is a purity test.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::density::entropy_bits;
use crate::error::{Result, RvbError};
use crate::state::{check_subset, StateVector, RDM_SITE_CAP};

/// `purity < 1 − MIXED_TOLERANCE` counts as mixed.
pub const MIXED_TOLERANCE: f64 = 1e-9;
/// Entropy (bits) above which a cut counts as entangled in the certificate.
pub const CUT_ENTROPY_TOLERANCE: f64 = 1e-9;
/// Above this many subsets of one size, audits switch to a seeded sample.
pub const EXHAUSTIVE_LIMIT: usize = 5000;
pub const SAMPLE_SIZE: usize = 2000;
pub const DEFAULT_SEED: u64 = 0x5256_4253; // "RVBS"
/// Largest state accepted by the exhaustive certificate.
pub const CERTIFICATE_QUBIT_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartitionVerdict {
    pub subset: Vec<usize>,
    pub entropy_bits: f64,
    pub purity: f64,
    pub entangled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Audit {
    pub verdicts: Vec<BipartitionVerdict>,
    /// Subset sizes that were sampled rather than enumerated.
    pub sampled_sizes: Vec<usize>,
    pub seed: u64,
}

impl Audit {
    pub fn all_entangled(&self) -> bool {
        self.verdicts.iter().all(|v| v.entangled)
    }

    pub fn is_sampled(&self) -> bool {
        !self.sampled_sizes.is_empty()
    }
}

/// Entropy and purity of one side of a cut, computed on the smaller side.
pub fn bipartition_verdict(state: &StateVector, subset: &[usize]) -> Result<BipartitionVerdict> {
    check_subset(subset, state.n_qubits())?;
    let small = state.smaller_side(subset);
    let (entropy, purity) = if small.is_empty() {
        (0.0, 1.0)
    } else {
        let rho = state.reduced_density_matrix(&small)?;
        (entropy_bits(&rho.eigenvalues()), rho.purity())
    };
    Ok(BipartitionVerdict {
        subset: subset.to_vec(),
        entropy_bits: entropy,
        purity,
        entangled: purity < 1.0 - MIXED_TOLERANCE,
    })
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..k).rev().find(|&t| cur[t] < n - k + t) else {
            break;
        };
        cur[pos] += 1;
        for t in pos + 1..k {
            cur[t] = cur[t - 1] + 1;
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, t| acc * (n - t) / (t + 1))
}

fn sampled_subsets(n: usize, k: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut seen = BTreeSet::new();
    while seen.len() < count {
        let mut s = rand::seq::index::sample(rng, n, k).into_vec();
        s.sort_unstable();
        seen.insert(s);
    }
    seen.into_iter().collect()
}

fn audit_sizes(state: &StateVector, sizes: impl Iterator<Item = usize>, seed: u64) -> Result<Audit> {
    let n = state.n_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut subsets = Vec::new();
    let mut sampled_sizes = Vec::new();
    for k in sizes {
        if binomial(n, k) > EXHAUSTIVE_LIMIT {
            sampled_sizes.push(k);
            subsets.extend(sampled_subsets(n, k, SAMPLE_SIZE, &mut rng));
        } else {
            subsets.extend(combinations(n, k));
        }
    }
    let verdicts = subsets
        .par_iter()
        .map(|s| bipartition_verdict(state, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Audit {
        verdicts,
        sampled_sizes,
        seed,
    })
}

fn check_max(max_subset_size: usize) -> Result<()> {
    if max_subset_size > RDM_SITE_CAP {
        return Err(RvbError::CapExceeded {
            what: "audited subset size",
            value: max_subset_size,
            cap: RDM_SITE_CAP,
        });
    }
    Ok(())
}

/// Verdicts for every odd-size subset up to `max_subset_size`.
pub fn odd_subset_audit(state: &StateVector, max_subset_size: usize) -> Result<Audit> {
    odd_subset_audit_seeded(state, max_subset_size, DEFAULT_SEED)
}

pub fn odd_subset_audit_seeded(state: &StateVector, max_subset_size: usize, seed: u64) -> Result<Audit> {
    check_max(max_subset_size)?;
    let top = max_subset_size.min(state.n_qubits());
    audit_sizes(state, (1..=top).step_by(2), seed)
}

/// Verdicts for every even-size proper subset up to `max_subset_size`. The
/// whole lattice (the trivial cut) is never included.
pub fn even_subset_audit(state: &StateVector, max_subset_size: usize) -> Result<Audit> {
    even_subset_audit_seeded(state, max_subset_size, DEFAULT_SEED)
}

pub fn even_subset_audit_seeded(state: &StateVector, max_subset_size: usize, seed: u64) -> Result<Audit> {
    check_max(max_subset_size)?;
    let top = max_subset_size.min(state.n_qubits().saturating_sub(1));
    audit_sizes(state, (2..=top).step_by(2), seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub genuine: bool,
    pub cuts_checked: usize,
    pub min_cut: Vec<usize>,
    pub min_entropy_bits: f64,
}

/// Exhaustive scan of all `2^(n−1) − 1` nontrivial cuts. The state is
/// genuinely multipartite entangled iff every cut carries entropy.
pub fn genuine_multipartite_certificate(state: &StateVector) -> Result<Certificate> {
    let n = state.n_qubits();
    if n > CERTIFICATE_QUBIT_CAP {
        return Err(RvbError::CapExceeded {
            what: "certificate qubit count",
            value: n,
            cap: CERTIFICATE_QUBIT_CAP,
        });
    }
    if n < 2 {
        return Err(RvbError::InvalidArgument("need at least two qubits".into()));
    }
    // The last site is always on the complement side, so each cut appears once.
    let cuts = (1usize << (n - 1)) - 1;
    let verdicts = (1..=cuts)
        .into_par_iter()
        .map(|mask| {
            let subset: Vec<usize> = (0..n - 1).filter(|b| (mask >> b) & 1 == 1).collect();
            bipartition_verdict(state, &subset)
        })
        .collect::<Result<Vec<_>>>()?;
    let min = verdicts
        .iter()
        .min_by(|a, b| a.entropy_bits.total_cmp(&b.entropy_bits))
        .expect("at least one cut");
    Ok(Certificate {
        genuine: min.entropy_bits > CUT_ENTROPY_TOLERANCE,
        cuts_checked: cuts,
        min_cut: min.subset.clone(),
        min_entropy_bits: min.entropy_bits,
    })
}
