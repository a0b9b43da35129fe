//! Exact RVB state vectors in the σ_z product basis.
//!
//! Site `k` is bit `k` of the basis index; bit value 0 is spin up (|½⟩) and
//! 1 is spin down (|−½⟩). A dimer `(a, b)` with `a` on sublattice A is the
//! singlet `(|↑_a ↓_b⟩ − |↓_a ↑_b⟩)/√2`, so every amplitude is real.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coverings::{CoveringEnsemble, DimerCovering};
use crate::density::DensityMatrix;
use crate::error::{Result, RvbError};
use crate::linalg::CMatrix;

pub const DEFAULT_QUBIT_CAP: usize = 16;
/// Largest subsystem handed to [`StateVector::reduced_density_matrix`].
pub const RDM_SITE_CAP: usize = 8;
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Coverings per partial sum during assembly. Fixed, so the reduction tree
/// (and therefore every rounding) is independent of the thread count.
const ASSEMBLY_CHUNK: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<f64>,
    /// Norm of the weighted covering sum before normalisation.
    norm: f64,
}

impl StateVector {
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != 1usize << n_qubits {
            return Err(RvbError::InvalidArgument(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                n_qubits
            )));
        }
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        Ok(StateVector {
            n_qubits,
            amplitudes,
            norm,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(RvbError::InvalidArgument("qubit counts differ".into()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn nonzero_count(&self) -> usize {
        self.amplitudes.iter().filter(|a| **a != 0.0).count()
    }

    /// Reduced density matrix of `sites` (in the given order: `sites[0]` is
    /// the most significant bit of the row index).
    pub fn reduced_density_matrix(&self, sites: &[usize]) -> Result<DensityMatrix> {
        let k = sites.len();
        if k > RDM_SITE_CAP {
            return Err(RvbError::CapExceeded {
                what: "reduced density matrix sites",
                value: k,
                cap: RDM_SITE_CAP,
            });
        }
        check_subset(sites, self.n_qubits)?;
        let ns = self.norm_sqr();
        if (ns - 1.0).abs() > NORM_TOLERANCE {
            return Err(RvbError::Unnormalized(ns));
        }
        let m = self.subsystem_matrix(sites);
        let rows = 1usize << k;
        let cols = 1usize << (self.n_qubits - k);
        let mut data = vec![num_complex::Complex64::new(0.0, 0.0); rows * rows];
        for s in 0..rows {
            let rs = &m[s * cols..(s + 1) * cols];
            for t in s..rows {
                let rt = &m[t * cols..(t + 1) * cols];
                let v: f64 = rs.iter().zip(rt).map(|(x, y)| x * y).sum();
                data[s * rows + t].re = v;
                data[t * rows + s].re = v;
            }
        }
        Ok(DensityMatrix::new_unchecked(
            sites.to_vec(),
            CMatrix::from_vec(rows, data),
        ))
    }

    /// Amplitudes reshaped to a `2^k × 2^(n−k)` matrix: row = subsystem index
    /// (`sites[0]` most significant), column = environment index (remaining
    /// sites in increasing order, lowest site least significant).
    pub(crate) fn subsystem_matrix(&self, sites: &[usize]) -> Vec<f64> {
        let n = self.n_qubits;
        let k = sites.len();
        let env: Vec<usize> = (0..n).filter(|s| !sites.contains(s)).collect();
        let cols = 1usize << (n - k);
        let mut m = vec![0.0; self.amplitudes.len()];
        for (idx, &amp) in self.amplitudes.iter().enumerate() {
            if amp == 0.0 {
                continue;
            }
            let mut s = 0usize;
            for &site in sites {
                s = (s << 1) | ((idx >> site) & 1);
            }
            let mut e = 0usize;
            for (pos, &site) in env.iter().enumerate() {
                e |= ((idx >> site) & 1) << pos;
            }
            m[s * cols + e] = amp;
        }
        m
    }

    /// Purity `tr ρ_S²` of a subsystem, without the site cap of
    /// [`Self::reduced_density_matrix`]: the smaller side of the cut is traced.
    pub fn subsystem_purity(&self, sites: &[usize]) -> Result<f64> {
        check_subset(sites, self.n_qubits)?;
        let small = self.smaller_side(sites);
        let k = small.len();
        let m = self.subsystem_matrix(&small);
        let rows = 1usize << k;
        let cols = 1usize << (self.n_qubits - k);
        let ns = self.norm_sqr();
        let mut acc = 0.0;
        for s in 0..rows {
            let rs = &m[s * cols..(s + 1) * cols];
            for t in s..rows {
                let rt = &m[t * cols..(t + 1) * cols];
                let v: f64 = rs.iter().zip(rt).map(|(x, y)| x * y).sum();
                acc += if s == t { v * v } else { 2.0 * v * v };
            }
        }
        Ok(acc / (ns * ns))
    }

    /// Whichever of `sites` and its complement is smaller (ties keep `sites`).
    pub(crate) fn smaller_side(&self, sites: &[usize]) -> Vec<usize> {
        if sites.len() * 2 <= self.n_qubits {
            sites.to_vec()
        } else {
            (0..self.n_qubits).filter(|s| !sites.contains(s)).collect()
        }
    }

    /// Little-endian binary: `u64` qubit count, then `2^n` `f64` amplitudes.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&(self.n_qubits as u64).to_le_bytes())?;
        for a in &self.amplitudes {
            w.write_all(&a.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let io = |e: std::io::Error| RvbError::Parse(e.to_string());
        let mut word = [0u8; 8];
        r.read_exact(&mut word).map_err(io)?;
        let n = u64::from_le_bytes(word) as usize;
        if n > 40 {
            return Err(RvbError::Parse(format!("implausible qubit count {n}")));
        }
        let mut amps = Vec::with_capacity(1 << n);
        for _ in 0..(1usize << n) {
            r.read_exact(&mut word).map_err(io)?;
            amps.push(f64::from_le_bytes(word));
        }
        Self::from_amplitudes(n, amps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            n_qubits: usize,
            amplitudes: Vec<f64>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| RvbError::Parse(e.to_string()))?;
        Self::from_amplitudes(raw.n_qubits, raw.amplitudes)
    }
}

pub(crate) fn check_subset(sites: &[usize], n_qubits: usize) -> Result<()> {
    let mut seen = vec![false; n_qubits];
    for &s in sites {
        if s >= n_qubits {
            return Err(RvbError::SiteOutOfRange {
                site: s,
                site_count: n_qubits,
            });
        }
        if std::mem::replace(&mut seen[s], true) {
            return Err(RvbError::InvalidArgument(format!("site {s} listed twice")));
        }
    }
    Ok(())
}

/// Add `scale · |covering⟩` (unnormalised singlet product, entries ±1) into
/// `out`. Walks the 2^N sign patterns in Gray-code order so each step flips
/// exactly one dimer.
fn accumulate_product(covering: &DimerCovering, scale: f64, out: &mut [f64]) {
    let pairs = covering.pairs();
    let mut idx: usize = pairs.iter().map(|&(_, b)| 1usize << b).sum();
    let mut sign = scale;
    out[idx] += sign;
    for step in 1usize..(1usize << pairs.len()) {
        let k = step.trailing_zeros() as usize;
        let (a, b) = pairs[k];
        idx ^= (1usize << a) | (1usize << b);
        sign = -sign;
        out[idx] += sign;
    }
}

/// Normalised tensor product of the covering's singlets.
pub fn singlet_product(covering: &DimerCovering) -> StateVector {
    let n_pairs = covering.pairs().len();
    let n = 2 * n_pairs;
    let mut amps = vec![0.0; 1usize << n];
    accumulate_product(covering, 1.0, &mut amps);
    let scale = 0.5_f64.powf(n_pairs as f64 / 2.0);
    amps.iter_mut().for_each(|a| *a *= scale);
    StateVector {
        n_qubits: n,
        amplitudes: amps,
        norm: 1.0,
    }
}

pub fn assemble(ensemble: &CoveringEnsemble) -> Result<StateVector> {
    assemble_with_cap(ensemble, DEFAULT_QUBIT_CAP)
}

/// Weighted sum of singlet products, normalised.
pub fn assemble_with_cap(ensemble: &CoveringEnsemble, qubit_cap: usize) -> Result<StateVector> {
    let n = ensemble.lattice().site_count();
    if n > qubit_cap {
        return Err(RvbError::CapExceeded {
            what: "qubit count",
            value: n,
            cap: qubit_cap,
        });
    }
    let dim = 1usize << n;
    let n_pairs = n / 2;
    let partials: Vec<Vec<f64>> = ensemble
        .coverings()
        .par_chunks(ASSEMBLY_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; dim];
            for c in chunk {
                accumulate_product(c, c.weight(), &mut acc);
            }
            acc
        })
        .collect();
    let mut amps = pairwise_sum(partials);
    let unit = 0.5_f64.powf(n_pairs as f64 / 2.0);
    amps.iter_mut().for_each(|a| *a *= unit);
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(RvbError::DegenerateEnsemble);
    }
    amps.iter_mut().for_each(|a| *a /= norm);
    Ok(StateVector {
        n_qubits: n,
        amplitudes: amps,
        norm,
    })
}

/// Fixed-shape pairwise reduction: round `r` adds element `2i+1` into `2i`.
fn pairwise_sum(mut parts: Vec<Vec<f64>>) -> Vec<f64> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut left) = it.next() {
            if let Some(right) = it.next() {
                left.iter_mut().zip(&right).for_each(|(l, r)| *l += r);
            }
            next.push(left);
        }
        parts = next;
    }
    parts.pop().unwrap_or_default()
}
