//! Dimer coverings: perfect matchings pairing every A-site with a B-site.
//!
//! A covering is stored as its A-indexed permutation: entry `k` of
//! [`DimerCovering::pairs`] is `(a_k, b)` where `a_k` is the `k`-th A-site in
//! increasing index order. Pairs are always A-first, which fixes the sign of
//! every singlet in the product state.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RvbError};
use crate::lattice::{LatticeSpec, Sublattice};

/// Largest `N` for which [`enumerate_gas`] will produce all `N!` coverings.
pub const DEFAULT_GAS_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimerCovering {
    pairs: Vec<(usize, usize)>,
    weight: f64,
}

impl DimerCovering {
    /// Build and validate a covering. Pairs may be given in either
    /// orientation and any order; they are normalised to A-first and sorted by
    /// A-site.
    pub fn new(lattice: &LatticeSpec, pairs: &[(usize, usize)], weight: f64) -> Result<Self> {
        if !weight.is_finite() {
            return Err(RvbError::InvalidCovering(format!("non-finite weight {weight}")));
        }
        let n = lattice.site_count();
        if pairs.len() * 2 != n {
            return Err(RvbError::InvalidCovering(format!(
                "{} pairs cannot cover {} sites",
                pairs.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        let mut norm = Vec::with_capacity(pairs.len());
        for &(x, y) in pairs {
            let sx = lattice.sublattice_of(x)?;
            let sy = lattice.sublattice_of(y)?;
            if sx == sy {
                return Err(RvbError::InvalidCovering(format!(
                    "pair ({x}, {y}) joins two sites of sublattice {sx:?}"
                )));
            }
            for s in [x, y] {
                if std::mem::replace(&mut seen[s], true) {
                    return Err(RvbError::InvalidCovering(format!("site {s} covered twice")));
                }
            }
            norm.push(if sx == Sublattice::A { (x, y) } else { (y, x) });
        }
        norm.sort_unstable();
        Ok(DimerCovering { pairs: norm, weight })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    /// `mate[s]` is the partner of site `s`.
    pub fn mates(&self) -> Vec<usize> {
        let mut mate = vec![usize::MAX; self.pairs.len() * 2];
        for &(a, b) in &self.pairs {
            mate[a] = b;
            mate[b] = a;
        }
        mate
    }

    /// B-partners in A-site order: the permutation form of the covering.
    pub fn permutation(&self) -> Vec<usize> {
        self.pairs.iter().map(|&(_, b)| b).collect()
    }

    pub fn is_nearest_neighbor(&self, lattice: &LatticeSpec) -> bool {
        self.pairs.iter().all(|&(a, b)| lattice.is_neighbor(a, b))
    }

    pub fn same_dimers(&self, other: &DimerCovering) -> bool {
        self.pairs == other.pairs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Gas,
    Liquid,
    Custom,
}

/// A nonempty set of coverings of one lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringEnsemble {
    lattice: LatticeSpec,
    variant: Variant,
    coverings: Vec<DimerCovering>,
}

impl CoveringEnsemble {
    fn checked(lattice: LatticeSpec, variant: Variant, coverings: Vec<DimerCovering>) -> Result<Self> {
        if coverings.is_empty() {
            return Err(RvbError::InvalidCovering("ensemble is empty".into()));
        }
        match variant {
            Variant::Liquid => {
                if let Some(c) = coverings.iter().find(|c| !c.is_nearest_neighbor(&lattice)) {
                    return Err(RvbError::InvalidCovering(format!(
                        "liquid covering {:?} contains a non-nearest-neighbour dimer",
                        c.pairs()
                    )));
                }
            }
            Variant::Gas => {
                let w0 = coverings[0].weight;
                if coverings.iter().any(|c| c.weight != w0) {
                    return Err(RvbError::InvalidCovering("gas weights must all be equal".into()));
                }
            }
            Variant::Custom => {}
        }
        Ok(CoveringEnsemble {
            lattice,
            variant,
            coverings,
        })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn coverings(&self) -> &[DimerCovering] {
        &self.coverings
    }

    pub fn len(&self) -> usize {
        self.coverings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coverings.is_empty()
    }

    pub fn has_equal_weights(&self) -> bool {
        let w0 = self.coverings[0].weight;
        self.coverings.iter().all(|c| c.weight == w0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&EnsembleFile::from(self)).expect("ensemble serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: EnsembleFile = serde_json::from_str(text).map_err(|e| RvbError::Parse(e.to_string()))?;
        file.try_into()
    }
}

/// On-disk ensemble layout: lattice header, pair arrays, weights.
#[derive(Serialize, Deserialize)]
struct EnsembleFile {
    schema: u32,
    lattice: LatticeSpec,
    variant: Variant,
    coverings: Vec<Vec<[usize; 2]>>,
    weights: Vec<f64>,
}

impl From<&CoveringEnsemble> for EnsembleFile {
    fn from(e: &CoveringEnsemble) -> Self {
        EnsembleFile {
            schema: 1,
            lattice: e.lattice,
            variant: e.variant,
            coverings: e
                .coverings
                .iter()
                .map(|c| c.pairs.iter().map(|&(a, b)| [a, b]).collect())
                .collect(),
            weights: e.coverings.iter().map(|c| c.weight).collect(),
        }
    }
}

impl TryFrom<EnsembleFile> for CoveringEnsemble {
    type Error = RvbError;

    fn try_from(f: EnsembleFile) -> Result<Self> {
        if f.schema != 1 {
            return Err(RvbError::Parse(format!(
                "unsupported ensemble schema {}",
                f.schema
            )));
        }
        let pairs: Vec<Vec<(usize, usize)>> = f
            .coverings
            .into_iter()
            .map(|c| c.into_iter().map(|[a, b]| (a, b)).collect())
            .collect();
        let mut e = custom_ensemble(&f.lattice, &pairs, &f.weights)?;
        e = CoveringEnsemble::checked(e.lattice, f.variant, e.coverings)?;
        Ok(e)
    }
}

/// All `N!` pairings of A-sites with B-sites, weight 1, in lexicographic
/// order of the B-partner permutation.
pub fn enumerate_gas(lattice: &LatticeSpec) -> Result<CoveringEnsemble> {
    enumerate_gas_with_cap(lattice, DEFAULT_GAS_CAP)
}

pub fn enumerate_gas_with_cap(lattice: &LatticeSpec, cap: usize) -> Result<CoveringEnsemble> {
    let n = lattice.n_per_sublattice();
    if n > cap {
        return Err(RvbError::CapExceeded {
            what: "gas sublattice size",
            value: n,
            cap,
        });
    }
    let a_sites = lattice.sites_of(Sublattice::A);
    let b_sites = lattice.sites_of(Sublattice::B);
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut perm = Vec::with_capacity(n);

    fn rec(
        a_sites: &[usize],
        b_sites: &[usize],
        used: &mut [bool],
        perm: &mut Vec<usize>,
        out: &mut Vec<DimerCovering>,
    ) {
        if perm.len() == a_sites.len() {
            let pairs = a_sites.iter().copied().zip(perm.iter().copied()).collect();
            out.push(DimerCovering { pairs, weight: 1.0 });
            return;
        }
        for k in 0..b_sites.len() {
            if !used[k] {
                used[k] = true;
                perm.push(b_sites[k]);
                rec(a_sites, b_sites, used, perm, out);
                perm.pop();
                used[k] = false;
            }
        }
    }

    rec(&a_sites, &b_sites, &mut used, &mut perm, &mut out);
    CoveringEnsemble::checked(*lattice, Variant::Gas, out)
}

/// Every perfect matching of the nearest-neighbour graph, weight 1.
///
/// Backtracking always extends the lowest-index unmatched site, trying its
/// unmatched neighbours in increasing order, so the output order is fixed.
pub fn enumerate_liquid(lattice: &LatticeSpec) -> Result<CoveringEnsemble> {
    let n = lattice.site_count();
    let adj: Vec<Vec<usize>> = (0..n).map(|s| lattice.neighbors_unchecked(s)).collect();
    let mut mate = vec![usize::MAX; n];
    let mut out = Vec::new();

    fn rec(adj: &[Vec<usize>], mate: &mut [usize], lattice: &LatticeSpec, out: &mut Vec<DimerCovering>) {
        let Some(i) = mate.iter().position(|&m| m == usize::MAX) else {
            let mut pairs: Vec<(usize, usize)> = (0..mate.len())
                .filter(|&s| lattice.sublattice_unchecked(s) == Sublattice::A)
                .map(|a| (a, mate[a]))
                .collect();
            pairs.sort_unstable();
            out.push(DimerCovering { pairs, weight: 1.0 });
            return;
        };
        for &j in &adj[i] {
            if mate[j] == usize::MAX {
                mate[i] = j;
                mate[j] = i;
                rec(adj, mate, lattice, out);
                mate[i] = usize::MAX;
                mate[j] = usize::MAX;
            }
        }
    }

    rec(&adj, &mut mate, lattice, &mut out);
    if out.is_empty() {
        return Err(RvbError::NoPerfectMatching);
    }
    CoveringEnsemble::checked(*lattice, Variant::Liquid, out)
}

/// Ensemble from user-supplied matchings and weights.
pub fn custom_ensemble(
    lattice: &LatticeSpec,
    pairs_list: &[Vec<(usize, usize)>],
    weights: &[f64],
) -> Result<CoveringEnsemble> {
    if pairs_list.len() != weights.len() {
        return Err(RvbError::InvalidArgument(format!(
            "{} coverings but {} weights",
            pairs_list.len(),
            weights.len()
        )));
    }
    let coverings = pairs_list
        .iter()
        .zip(weights)
        .map(|(p, &w)| DimerCovering::new(lattice, p, w))
        .collect::<Result<Vec<_>>>()?;
    CoveringEnsemble::checked(*lattice, Variant::Custom, coverings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;

    #[test]
    fn gas_sizes() {
        for (n, count) in [(1, 1), (2, 2), (3, 6), (4, 24), (6, 720)] {
            let l = LatticeSpec::complete_bipartite(n).unwrap();
            assert_eq!(enumerate_gas(&l).unwrap().len(), count);
        }
    }

    #[test]
    fn gas_cap() {
        let l = LatticeSpec::complete_bipartite(9).unwrap();
        assert!(matches!(enumerate_gas(&l), Err(RvbError::CapExceeded { .. })));
        let l = LatticeSpec::complete_bipartite(3).unwrap();
        assert!(enumerate_gas_with_cap(&l, 2).is_err());
    }

    #[test]
    fn liquid_sizes() {
        let l = LatticeSpec::square(2, 2, Boundary::Open).unwrap();
        assert_eq!(enumerate_liquid(&l).unwrap().len(), 2);
        let l = LatticeSpec::square(2, 3, Boundary::Open).unwrap();
        assert_eq!(enumerate_liquid(&l).unwrap().len(), 3);
    }

    #[test]
    fn single_dimer_chain() {
        let l = LatticeSpec::square(1, 2, Boundary::Open).unwrap();
        let liq = enumerate_liquid(&l).unwrap();
        assert_eq!(liq.len(), 1);
        assert_eq!(liq.coverings()[0].pairs(), &[(0, 1)]);
    }

    #[test]
    fn custom_matches_gas() {
        let l = LatticeSpec::complete_bipartite(2).unwrap();
        let gas = enumerate_gas(&l).unwrap();
        let pairs: Vec<_> = gas.coverings().iter().map(|c| c.pairs().to_vec()).collect();
        let custom = custom_ensemble(&l, &pairs, &[1.0, 1.0]).unwrap();
        assert_eq!(custom.coverings(), gas.coverings());
    }

    #[test]
    fn custom_normalises_orientation() {
        let l = LatticeSpec::square(1, 2, Boundary::Open).unwrap();
        let c = DimerCovering::new(&l, &[(1, 0)], 1.0).unwrap();
        assert_eq!(c.pairs(), &[(0, 1)]);
    }

    #[test]
    fn custom_rejects_invalid() {
        let l = LatticeSpec::complete_bipartite(2).unwrap();
        assert!(custom_ensemble(&l, &[vec![(0, 2), (1, 2)]], &[1.0]).is_err());
        assert!(custom_ensemble(&l, &[vec![(0, 1), (2, 3)]], &[1.0]).is_err());
        assert!(custom_ensemble(&l, &[vec![(0, 2)]], &[1.0]).is_err());
        assert!(custom_ensemble(&l, &[vec![(0, 2), (1, 3)]], &[1.0, 2.0]).is_err());
        assert!(custom_ensemble(&l, &[], &[]).is_err());
        assert!(custom_ensemble(&l, &[vec![(0, 2), (1, 3)]], &[f64::NAN]).is_err());
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let l = LatticeSpec::square(2, 3, Boundary::Open).unwrap();
        let liq = enumerate_liquid(&l).unwrap();
        let back = CoveringEnsemble::from_json(&liq.to_json()).unwrap();
        assert_eq!(back, liq);
        let bad = liq.to_json().replace("\"schema\":1", "\"schema\":2");
        assert!(CoveringEnsemble::from_json(&bad).is_err());
    }
}
