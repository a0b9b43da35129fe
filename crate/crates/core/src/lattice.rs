//! Lattice geometries and their A/B sublattice bipartition.
//!
//! Sites are plain `usize` indices in `[0, site_count)`. On square grids the
//! index is row-major (`row * cols + col`) and the checkerboard parity puts
//! `(0, 0)` on sublattice A. On the complete bipartite graph the first `N`
//! indices form sublattice A and the remaining `N` form sublattice B.
//!
//! Distances are graph (hop) distances on the nearest-neighbour graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RvbError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    pub fn opposite(self) -> Sublattice {
        match self {
            Sublattice::A => Sublattice::B,
            Sublattice::B => Sublattice::A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum LatticeKind {
    SquareGrid { rows: usize, cols: usize },
    CompleteBipartite { n_per_sublattice: usize },
}

/// A finite bipartite lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawLattice", into = "RawLattice")]
pub struct LatticeSpec {
    kind: LatticeKind,
    boundary: Boundary,
}

#[derive(Serialize, Deserialize)]
struct RawLattice {
    kind: LatticeKind,
    boundary: Boundary,
    site_count: usize,
}

impl TryFrom<RawLattice> for LatticeSpec {
    type Error = RvbError;

    fn try_from(raw: RawLattice) -> Result<Self> {
        let lattice = LatticeSpec::new(raw.kind, raw.boundary)?;
        if lattice.site_count() != raw.site_count {
            return Err(RvbError::InvalidLattice(format!(
                "site_count {} does not match geometry ({} sites)",
                raw.site_count,
                lattice.site_count()
            )));
        }
        Ok(lattice)
    }
}

impl From<LatticeSpec> for RawLattice {
    fn from(l: LatticeSpec) -> Self {
        RawLattice {
            kind: l.kind,
            boundary: l.boundary,
            site_count: l.site_count(),
        }
    }
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, boundary: Boundary) -> Result<Self> {
        match kind {
            LatticeKind::SquareGrid { rows, cols } => {
                if rows == 0 || cols == 0 {
                    return Err(RvbError::InvalidLattice(
                        "grid dimensions must be positive".into(),
                    ));
                }
                if (rows * cols) % 2 != 0 {
                    return Err(RvbError::InvalidLattice(format!(
                        "{rows}x{cols} grid has an odd number of sites"
                    )));
                }
                // A wrap-around bond joins (r, 0) and (r, cols-1); the
                // checkerboard survives only if the wrapped extent is even.
                if boundary == Boundary::Periodic
                    && ((rows > 1 && rows % 2 != 0) || (cols > 1 && cols % 2 != 0))
                {
                    return Err(RvbError::InvalidLattice(format!(
                        "periodic {rows}x{cols} grid is not bipartite"
                    )));
                }
            }
            LatticeKind::CompleteBipartite { n_per_sublattice } => {
                if n_per_sublattice == 0 {
                    return Err(RvbError::InvalidLattice(
                        "complete bipartite lattice needs at least one site per sublattice".into(),
                    ));
                }
            }
        }
        Ok(LatticeSpec { kind, boundary })
    }

    pub fn square(rows: usize, cols: usize, boundary: Boundary) -> Result<Self> {
        Self::new(LatticeKind::SquareGrid { rows, cols }, boundary)
    }

    /// The geometry used for the RVB gas: every A-site is adjacent to every B-site.
    pub fn complete_bipartite(n_per_sublattice: usize) -> Result<Self> {
        Self::new(
            LatticeKind::CompleteBipartite { n_per_sublattice },
            Boundary::Open,
        )
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.kind, LatticeKind::SquareGrid { .. })
    }

    /// Total number of sites, `2N`.
    pub fn site_count(&self) -> usize {
        match self.kind {
            LatticeKind::SquareGrid { rows, cols } => rows * cols,
            LatticeKind::CompleteBipartite { n_per_sublattice } => 2 * n_per_sublattice,
        }
    }

    /// Sites per sublattice, `N`.
    pub fn n_per_sublattice(&self) -> usize {
        self.site_count() / 2
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.site_count() {
            return Err(RvbError::SiteOutOfRange {
                site,
                site_count: self.site_count(),
            });
        }
        Ok(())
    }

    /// `(row, col)` of a grid site; `None` for non-grid lattices.
    pub fn coords(&self, site: usize) -> Option<(usize, usize)> {
        match self.kind {
            LatticeKind::SquareGrid { cols, .. } if site < self.site_count() => {
                Some((site / cols, site % cols))
            }
            _ => None,
        }
    }

    pub fn site_at(&self, row: usize, col: usize) -> Result<usize> {
        match self.kind {
            LatticeKind::SquareGrid { rows, cols } if row < rows && col < cols => Ok(row * cols + col),
            LatticeKind::SquareGrid { .. } => Err(RvbError::InvalidArgument(format!(
                "coordinate ({row}, {col}) outside the grid"
            ))),
            LatticeKind::CompleteBipartite { .. } => Err(RvbError::InvalidArgument(
                "complete bipartite lattices have no coordinates".into(),
            )),
        }
    }

    pub fn sublattice_of(&self, site: usize) -> Result<Sublattice> {
        self.check_site(site)?;
        Ok(self.sublattice_unchecked(site))
    }

    pub(crate) fn sublattice_unchecked(&self, site: usize) -> Sublattice {
        match self.kind {
            LatticeKind::SquareGrid { cols, .. } => {
                if (site / cols + site % cols).is_multiple_of(2) {
                    Sublattice::A
                } else {
                    Sublattice::B
                }
            }
            LatticeKind::CompleteBipartite { n_per_sublattice } => {
                if site < n_per_sublattice {
                    Sublattice::A
                } else {
                    Sublattice::B
                }
            }
        }
    }

    /// Sites of one sublattice in increasing index order.
    pub fn sites_of(&self, sub: Sublattice) -> Vec<usize> {
        (0..self.site_count())
            .filter(|&s| self.sublattice_unchecked(s) == sub)
            .collect()
    }

    /// Nearest neighbours in increasing index order.
    pub fn neighbors(&self, site: usize) -> Result<Vec<usize>> {
        self.check_site(site)?;
        Ok(self.neighbors_unchecked(site))
    }

    pub(crate) fn neighbors_unchecked(&self, site: usize) -> Vec<usize> {
        match self.kind {
            LatticeKind::SquareGrid { rows, cols } => {
                let (r, c) = (site / cols, site % cols);
                let mut out = BTreeSet::new();
                let periodic = self.boundary == Boundary::Periodic;
                let steps: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
                for (dr, dc) in steps {
                    let nr = r as isize + dr;
                    let nc = c as isize + dc;
                    let (nr, nc) = if periodic {
                        (nr.rem_euclid(rows as isize), nc.rem_euclid(cols as isize))
                    } else if nr < 0 || nc < 0 || nr >= rows as isize || nc >= cols as isize {
                        continue;
                    } else {
                        (nr, nc)
                    };
                    let n = nr as usize * cols + nc as usize;
                    if n != site {
                        out.insert(n);
                    }
                }
                out.into_iter().collect()
            }
            LatticeKind::CompleteBipartite { .. } => {
                self.sites_of(self.sublattice_unchecked(site).opposite())
            }
        }
    }

    pub fn is_neighbor(&self, i: usize, j: usize) -> bool {
        i < self.site_count() && j < self.site_count() && self.neighbors_unchecked(i).contains(&j)
    }

    /// All nearest-neighbour bonds `(i, j)` with `i < j`, sorted.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.site_count() {
            for j in self.neighbors_unchecked(i) {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Graph distance from `site` to every site (breadth-first search).
    pub fn distances_from(&self, site: usize) -> Result<Vec<usize>> {
        self.check_site(site)?;
        let n = self.site_count();
        let mut dist = vec![usize::MAX; n];
        dist[site] = 0;
        let mut queue = VecDeque::from([site]);
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors_unchecked(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<usize> {
        self.check_site(j)?;
        Ok(self.distances_from(i)?[j])
    }

    /// Opposite-sublattice sites at graph distance exactly `r` from `site`.
    pub fn shell(&self, site: usize, r: usize) -> Result<Vec<usize>> {
        if r == 0 {
            return Err(RvbError::InvalidArgument("distance must be positive".into()));
        }
        let own = self.sublattice_of(site)?;
        let dist = self.distances_from(site)?;
        Ok((0..self.site_count())
            .filter(|&s| dist[s] == r && self.sublattice_unchecked(s) != own)
            .collect())
    }

    /// Number of opposite-sublattice sites at distance `r` (the `R` of the
    /// equidistant bounds).
    pub fn equidistant_count(&self, site: usize, r: usize) -> Result<usize> {
        Ok(self.shell(site, r)?.len())
    }

    /// Number of sites of either sublattice at distance exactly `r`.
    pub fn shell_size(&self, site: usize, r: usize) -> Result<usize> {
        let dist = self.distances_from(site)?;
        Ok(dist.iter().filter(|&&d| d == r).count())
    }

    /// Parse a flat `key=value` description. Recognised keys: `kind`
    /// (`grid` or `complete_bipartite`), `rows`, `cols`, `boundary`
    /// (`open`/`periodic`), `n_per_sublattice`. Blank lines and `#` comments
    /// are ignored; unknown keys are an error.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        for key in map.keys() {
            if !matches!(
                key.as_str(),
                "kind" | "rows" | "cols" | "boundary" | "n_per_sublattice"
            ) {
                return Err(RvbError::Parse(format!("unknown lattice key `{key}`")));
            }
        }
        let get_usize = |k: &str| -> Result<usize> {
            map.get(k)
                .ok_or_else(|| RvbError::Parse(format!("missing key `{k}`")))?
                .parse::<usize>()
                .map_err(|e| RvbError::Parse(format!("`{k}`: {e}")))
        };
        let boundary = match map.get("boundary").map(String::as_str) {
            None | Some("open") => Boundary::Open,
            Some("periodic") => Boundary::Periodic,
            Some(other) => return Err(RvbError::Parse(format!("unknown boundary `{other}`"))),
        };
        match map.get("kind").map(String::as_str) {
            Some("grid") | Some("square") | Some("square_grid") => {
                Self::square(get_usize("rows")?, get_usize("cols")?, boundary)
            }
            Some("complete_bipartite") | Some("complete-bipartite") => {
                Self::complete_bipartite(get_usize("n_per_sublattice")?)
            }
            Some(other) => Err(RvbError::Parse(format!("unknown lattice kind `{other}`"))),
            None => Err(RvbError::Parse("missing key `kind`".into())),
        }
    }
}

/// Flat `key=value` lines; `#` starts a comment. Later keys win.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| RvbError::Parse(format!("line {}: expected key=value", lineno + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LatticeKind::SquareGrid { rows, cols } => {
                let b = match self.boundary {
                    Boundary::Open => "open",
                    Boundary::Periodic => "periodic",
                };
                write!(f, "{rows}x{cols} {b} grid")
            }
            LatticeKind::CompleteBipartite { n_per_sublattice } => {
                write!(f, "K({n},{n})", n = n_per_sublattice)
            }
        }
    }
}
