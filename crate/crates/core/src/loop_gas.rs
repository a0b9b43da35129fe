//! Loop-covering evaluation of the two-site Werner parameter.
//!
//! Superimposing two coverings `c_k`, `c_l` gives a transition graph whose
//! components are closed loops alternating between the two matchings. A
//! shared dimer is a degenerate loop of two sites. With A-first singlets the
//! overlap of the two product states is `⟨c_k|c_l⟩ = 2^{L − N}` (always
//! positive on a bipartite lattice, `L` the loop count), and
//! `⟨c_k|S_i·S_j|c_l⟩ = −(3/4) ε_ij X_ij ⟨c_k|c_l⟩` where `X_ij` is 1 when
//! `i`, `j` share a loop and `ε_ij` is +1 across sublattices, −1 within one.
//! For a Werner pair `⟨S_i·S_j⟩ = −3p/4`, so
//!
//! ```text
//! p(i, j) = ε_ij · Σ_g w_k w_l X_ij(g) W(g) / Σ_g w_k w_l W(g)
//! ```
//!
//! over all ordered covering pairs `g = (k, l)`, including `k = l`.
//! [`LoopWeighting::Overlap`] uses `W = 2^{n + d}` (one factor of 2 per loop,
//! `n` non-degenerate and `d` degenerate loops). [`LoopWeighting::FourPerLongLoop`]
//! uses `W = 4^n 2^d` and is kept for comparison only; it does not reproduce
//! the exact reduced density matrix.

use rayon::prelude::*;
use serde::Serialize;

use crate::coverings::{CoveringEnsemble, DimerCovering};
use crate::entanglement::extract_werner_p;
use crate::error::{Result, RvbError};
use crate::lattice::LatticeSpec;
use crate::state::assemble;

/// Largest ensemble handled by the `O(|ensemble|²)` loop sum.
pub const MAX_LOOP_ENSEMBLE: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionGraph {
    pub covering_pair: Option<(usize, usize)>,
    /// Each loop as a cyclic site sequence starting at its lowest site.
    pub loops: Vec<Vec<usize>>,
    pub degenerate: usize,
    pub nondegenerate: usize,
    loop_of: Vec<usize>,
}

impl TransitionGraph {
    pub fn loop_count(&self) -> usize {
        self.loops.len()
    }

    pub fn loop_of(&self, site: usize) -> Option<usize> {
        self.loop_of.get(site).copied()
    }

    /// `X(i, j)`: whether `i` and `j` lie on the same loop.
    pub fn same_loop(&self, i: usize, j: usize) -> Result<bool> {
        let n = self.loop_of.len();
        for s in [i, j] {
            if s >= n {
                return Err(RvbError::SiteOutOfRange {
                    site: s,
                    site_count: n,
                });
            }
        }
        Ok(self.loop_of[i] == self.loop_of[j])
    }
}

pub fn build_transition_graph(c_k: &DimerCovering, c_l: &DimerCovering) -> Result<TransitionGraph> {
    if c_k.pairs().len() != c_l.pairs().len() {
        return Err(RvbError::InvalidArgument(
            "coverings belong to lattices of different size".into(),
        ));
    }
    let mk = c_k.mates();
    let ml = c_l.mates();
    let n = mk.len();
    let mut loop_of = vec![usize::MAX; n];
    let mut loops = Vec::new();
    for start in 0..n {
        if loop_of[start] != usize::MAX {
            continue;
        }
        let id = loops.len();
        let mut cyc = Vec::new();
        let mut site = start;
        loop {
            loop_of[site] = id;
            cyc.push(site);
            let next = mk[site];
            loop_of[next] = id;
            cyc.push(next);
            site = ml[next];
            if site == start {
                break;
            }
        }
        loops.push(cyc);
    }
    let degenerate = loops.iter().filter(|l| l.len() == 2).count();
    Ok(TransitionGraph {
        covering_pair: None,
        degenerate,
        nondegenerate: loops.len() - degenerate,
        loops,
        loop_of,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum LoopWeighting {
    /// `2^{n+d}`, proportional to `|⟨c_k|c_l⟩|`.
    #[default]
    Overlap,
    /// `4^n 2^d`.
    FourPerLongLoop,
}

impl LoopWeighting {
    /// Weight divided by `2^N` to stay in floating-point range.
    fn relative(self, g: &TransitionGraph, n_pairs: usize) -> f64 {
        let exp = match self {
            LoopWeighting::Overlap => (g.nondegenerate + g.degenerate) as i32,
            LoopWeighting::FourPerLongLoop => (2 * g.nondegenerate + g.degenerate) as i32,
        };
        2f64.powi(exp - n_pairs as i32)
    }
}

/// Every ordered transition graph of an ensemble with its weight, ready for
/// repeated `p(i, j)` queries.
#[derive(Debug, Clone)]
pub struct LoopTable {
    lattice: LatticeSpec,
    weighting: LoopWeighting,
    entries: Vec<(f64, Vec<usize>)>,
    denominator: f64,
}

impl LoopTable {
    pub fn new(ensemble: &CoveringEnsemble, weighting: LoopWeighting) -> Result<Self> {
        if !ensemble.has_equal_weights() {
            return Err(RvbError::InvalidArgument(
                "loop formula requires an equal-weight ensemble".into(),
            ));
        }
        if ensemble.len() > MAX_LOOP_ENSEMBLE {
            return Err(RvbError::CapExceeded {
                what: "loop-formula ensemble size",
                value: ensemble.len(),
                cap: MAX_LOOP_ENSEMBLE,
            });
        }
        let cov = ensemble.coverings();
        let n_pairs = ensemble.lattice().n_per_sublattice();
        let entries: Vec<(f64, Vec<usize>)> = (0..cov.len() * cov.len())
            .into_par_iter()
            .map(|idx| {
                let (k, l) = (idx / cov.len(), idx % cov.len());
                let g = build_transition_graph(&cov[k], &cov[l]).expect("same lattice");
                (weighting.relative(&g, n_pairs), g.loop_of)
            })
            .collect();
        let denominator: f64 = entries.iter().map(|(w, _)| w).sum();
        if denominator <= 0.0 {
            return Err(RvbError::DegenerateEnsemble);
        }
        Ok(LoopTable {
            lattice: *ensemble.lattice(),
            weighting,
            entries,
            denominator,
        })
    }

    pub fn weighting(&self) -> LoopWeighting {
        self.weighting
    }

    pub fn denominator(&self) -> f64 {
        self.denominator
    }

    pub fn p(&self, i: usize, j: usize) -> Result<f64> {
        if i == j {
            return Err(RvbError::InvalidArgument("sites must differ".into()));
        }
        let si = self.lattice.sublattice_of(i)?;
        let sj = self.lattice.sublattice_of(j)?;
        let numerator: f64 = self
            .entries
            .iter()
            .filter(|(_, loop_of)| loop_of[i] == loop_of[j])
            .map(|(w, _)| w)
            .sum();
        let sign = if si != sj { 1.0 } else { -1.0 };
        Ok(sign * numerator / self.denominator)
    }
}

pub fn loop_formula_p(ensemble: &CoveringEnsemble, i: usize, j: usize) -> Result<f64> {
    LoopTable::new(ensemble, LoopWeighting::Overlap)?.p(i, j)
}

pub fn loop_formula_p_with(
    ensemble: &CoveringEnsemble,
    i: usize,
    j: usize,
    weighting: LoopWeighting,
) -> Result<f64> {
    LoopTable::new(ensemble, weighting)?.p(i, j)
}

/// `p(i, j)` by the loop sum when the ensemble is small enough, otherwise by
/// assembling the state and fitting its two-site reduced density matrix.
pub fn werner_p(ensemble: &CoveringEnsemble, i: usize, j: usize) -> Result<f64> {
    if ensemble.len() <= MAX_LOOP_ENSEMBLE && ensemble.has_equal_weights() {
        loop_formula_p(ensemble, i, j)
    } else {
        let state = assemble(ensemble)?;
        Ok(extract_werner_p(&state.reduced_density_matrix(&[i, j])?)?.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopScanRow {
    pub i: usize,
    pub j: usize,
    pub p: f64,
    pub same_sublattice: bool,
}

/// Loop-formula `p` for every unordered site pair.
pub fn scan_all_pairs(ensemble: &CoveringEnsemble) -> Result<Vec<LoopScanRow>> {
    let table = LoopTable::new(ensemble, LoopWeighting::Overlap)?;
    let l = ensemble.lattice();
    let n = l.site_count();
    let mut rows = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            rows.push(LoopScanRow {
                i,
                j,
                p: table.p(i, j)?,
                same_sublattice: l.sublattice_of(i)? == l.sublattice_of(j)?,
            });
        }
    }
    Ok(rows)
}

/// Loop-formula `p` for every same-sublattice pair.
pub fn same_sublattice_scan(ensemble: &CoveringEnsemble) -> Result<Vec<LoopScanRow>> {
    Ok(scan_all_pairs(ensemble)?
        .into_iter()
        .filter(|r| r.same_sublattice)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverings::{custom_ensemble, enumerate_gas, enumerate_liquid};
    use crate::lattice::Boundary;

    #[test]
    fn identical_coverings_are_all_degenerate() {
        let l = LatticeSpec::square(2, 4, Boundary::Open).unwrap();
        let liq = enumerate_liquid(&l).unwrap();
        let c = &liq.coverings()[2];
        let g = build_transition_graph(c, c).unwrap();
        assert_eq!(g.degenerate, 4);
        assert_eq!(g.nondegenerate, 0);
        let (a, b) = c.pairs()[0];
        assert!(g.same_loop(a, b).unwrap());
        let (x, _) = c.pairs()[1];
        assert!(!g.same_loop(a, x).unwrap());
        assert!(g.same_loop(a, 99).is_err());
    }

    #[test]
    fn disjoint_gas_pair_makes_one_square() {
        let l = LatticeSpec::complete_bipartite(2).unwrap();
        let gas = enumerate_gas(&l).unwrap();
        let g = build_transition_graph(&gas.coverings()[0], &gas.coverings()[1]).unwrap();
        assert_eq!(g.nondegenerate, 1);
        assert_eq!(g.degenerate, 0);
        assert_eq!(g.loops[0].len(), 4);
    }

    #[test]
    fn single_covering_formula() {
        let l = LatticeSpec::square(2, 2, Boundary::Open).unwrap();
        let e = custom_ensemble(&l, &[vec![(0, 1), (3, 2)]], &[1.0]).unwrap();
        assert_eq!(loop_formula_p(&e, 0, 1).unwrap(), 1.0);
        assert_eq!(loop_formula_p(&e, 0, 2).unwrap(), 0.0);
        assert!(loop_formula_p(&e, 1, 1).is_err());
    }

    #[test]
    fn unequal_weights_rejected() {
        let l = LatticeSpec::square(2, 2, Boundary::Open).unwrap();
        let e = custom_ensemble(&l, &[vec![(0, 1), (3, 2)], vec![(0, 2), (3, 1)]], &[1.0, 2.0]).unwrap();
        assert!(loop_formula_p(&e, 0, 1).is_err());
        // werner_p falls back to the state-vector route
        assert!(werner_p(&e, 0, 1).is_ok());
    }

    #[test]
    fn two_by_two_same_sublattice_is_negative() {
        let l = LatticeSpec::square(2, 2, Boundary::Open).unwrap();
        let liq = enumerate_liquid(&l).unwrap();
        let rows = same_sublattice_scan(&liq).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.p <= 1e-12));
    }

    #[test]
    fn large_ensembles_are_capped() {
        let l = LatticeSpec::complete_bipartite(6).unwrap();
        let gas = enumerate_gas(&l).unwrap();
        assert!(matches!(
            loop_formula_p(&gas, 0, 6),
            Err(RvbError::CapExceeded { .. })
        ));
    }
}
