//! Analytic upper bounds on the Werner parameter and their comparison with
//! directly measured values.
//!
//! With `R` symmetry-equivalent partners of one site:
//!
//! * monogamy of the tangle gives `p ≤ 1/3 + 2/(3√R)`,
//! * teleportation fidelity `(p + 1)/2` cannot beat optimal `1 → M` cloning
//!   `(2M + 1)/(3M)`, giving `p ≤ 1/3 + 2/(3M)`,
//! * for the gas the monogamy form reads `p ≤ 1/3 + 2√2/(3√N)`.
//!
//! All bounds are capped at 1.

use serde::Serialize;

use crate::entanglement::extract_werner_p;
use crate::error::{Result, RvbError};
use crate::lattice::{LatticeSpec, Sublattice};
use crate::state::StateVector;

/// A measured `p` satisfies a bound when `p ≤ bound + BOUND_SLACK`.
pub const BOUND_SLACK: f64 = 1e-9;
/// Partners whose `p` agree to this tolerance count as equivalent.
pub const ISOTROPY_TOLERANCE: f64 = 1e-9;

fn require_positive(name: &'static str, v: usize) -> Result<()> {
    if v < 1 {
        return Err(RvbError::OutOfDomain {
            name,
            value: v as f64,
        });
    }
    Ok(())
}

pub fn monogamy_bound(r: usize) -> Result<f64> {
    require_positive("R", r)?;
    Ok((1.0 / 3.0 + 2.0 / (3.0 * (r as f64).sqrt())).min(1.0))
}

pub fn telecloning_bound(m: usize) -> Result<f64> {
    require_positive("M", m)?;
    Ok((1.0 / 3.0 + 2.0 / (3.0 * m as f64)).min(1.0))
}

pub fn gas_monogamy_bound(n: usize) -> Result<f64> {
    require_positive("N", n)?;
    Ok((1.0 / 3.0 + 2.0 * 2f64.sqrt() / (3.0 * (n as f64).sqrt())).min(1.0))
}

/// Teleportation fidelity of a Werner resource.
pub fn teleportation_fidelity(p: f64) -> f64 {
    (p + 1.0) / 2.0
}

/// Optimal symmetric `1 → M` qubit cloning fidelity.
pub fn cloning_fidelity(m: usize) -> f64 {
    (2.0 * m as f64 + 1.0) / (3.0 * m as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    MonogamyNN,
    MonogamyEquidistant,
    TelecloningNN,
    TelecloningEquidistant,
    GasMonogamy,
    GasTelecloning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_kind: BoundKind,
    /// `R`, `M` or `N` depending on the kind.
    pub parameter: usize,
    pub bound_value: f64,
    pub measured_p: Option<f64>,
    pub satisfied: bool,
    /// `bound_value − measured_p` (0 when nothing was measured).
    pub slack: f64,
    pub pair: Option<(usize, usize)>,
    /// Whether every partner entering the bound had the same measured `p`,
    /// which is the premise the bound formulas rely on.
    pub isotropic: bool,
}

impl BoundReport {
    pub fn new(
        bound_kind: BoundKind,
        parameter: usize,
        bound_value: f64,
        measured_p: Option<f64>,
        pair: Option<(usize, usize)>,
        isotropic: bool,
    ) -> Self {
        let (satisfied, slack) = match measured_p {
            Some(p) => (p <= bound_value + BOUND_SLACK, bound_value - p),
            None => (true, 0.0),
        };
        BoundReport {
            bound_kind,
            parameter,
            bound_value,
            measured_p,
            satisfied,
            slack,
            pair,
            isotropic,
        }
    }
}

/// Which pairs a comparison measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    /// One nearest-neighbour bond; `R` is the anchor's neighbour count.
    NearestNeighbor(usize, usize),
    /// All opposite-sublattice sites at graph distance `r` from `anchor`; the
    /// largest measured `p` of the shell is compared.
    Equidistant { anchor: usize, r: usize },
    /// Gas: sublattice-A site 0 against sublattice-B site 0, with `N` clones.
    GasCross,
}

pub fn pair_p(state: &StateVector, i: usize, j: usize) -> Result<f64> {
    Ok(extract_werner_p(&state.reduced_density_matrix(&[i, j])?)?.p)
}

fn all_equal(values: &[f64]) -> bool {
    values.iter().all(|v| (v - values[0]).abs() <= ISOTROPY_TOLERANCE)
}

pub fn compare(state: &StateVector, lattice: &LatticeSpec, class: PairClass) -> Result<Vec<BoundReport>> {
    if state.n_qubits() != lattice.site_count() {
        return Err(RvbError::InvalidArgument(format!(
            "state has {} qubits but the lattice has {} sites",
            state.n_qubits(),
            lattice.site_count()
        )));
    }
    match class {
        PairClass::NearestNeighbor(i, j) => {
            if !lattice.is_neighbor(i, j) {
                return Err(RvbError::InvalidArgument(format!("({i}, {j}) is not a bond")));
            }
            let anchor = if lattice.sublattice_of(i)? == Sublattice::A {
                i
            } else {
                j
            };
            let shell = lattice.shell(anchor, 1)?;
            let ps = shell
                .iter()
                .map(|&k| pair_p(state, anchor, k))
                .collect::<Result<Vec<_>>>()?;
            let p = pair_p(state, i, j)?;
            let r = shell.len();
            let iso = all_equal(&ps);
            Ok(vec![
                BoundReport::new(
                    BoundKind::MonogamyNN,
                    r,
                    monogamy_bound(r)?,
                    Some(p),
                    Some((i, j)),
                    iso,
                ),
                BoundReport::new(
                    BoundKind::TelecloningNN,
                    r,
                    telecloning_bound(r)?,
                    Some(p),
                    Some((i, j)),
                    iso,
                ),
            ])
        }
        PairClass::Equidistant { anchor, r } => {
            let shell = lattice.shell(anchor, r)?;
            if shell.is_empty() {
                return Err(RvbError::InvalidArgument(format!(
                    "no opposite-sublattice sites at distance {r} from {anchor}"
                )));
            }
            let ps = shell
                .iter()
                .map(|&k| pair_p(state, anchor, k))
                .collect::<Result<Vec<_>>>()?;
            let (arg, p) = ps
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |best, (k, v)| if v > best.1 { (k, v) } else { best },
                );
            let pair = Some((anchor, shell[arg]));
            let iso = all_equal(&ps);
            let big_r = shell.len();
            Ok(vec![
                BoundReport::new(
                    BoundKind::MonogamyEquidistant,
                    big_r,
                    monogamy_bound(big_r)?,
                    Some(p),
                    pair,
                    iso,
                ),
                BoundReport::new(
                    BoundKind::TelecloningEquidistant,
                    big_r,
                    telecloning_bound(big_r)?,
                    Some(p),
                    pair,
                    iso,
                ),
            ])
        }
        PairClass::GasCross => {
            let a = lattice.sites_of(Sublattice::A);
            let b = lattice.sites_of(Sublattice::B);
            let p = pair_p(state, a[0], b[0])?;
            let mut cross = Vec::with_capacity(a.len() * b.len());
            for &x in &a {
                for &y in &b {
                    cross.push(pair_p(state, x, y)?);
                }
            }
            let n = lattice.n_per_sublattice();
            let iso = all_equal(&cross);
            let pair = Some((a[0], b[0]));
            Ok(vec![
                BoundReport::new(
                    BoundKind::GasMonogamy,
                    n,
                    gas_monogamy_bound(n)?,
                    Some(p),
                    pair,
                    iso,
                ),
                BoundReport::new(
                    BoundKind::GasTelecloning,
                    n,
                    telecloning_bound(n)?,
                    Some(p),
                    pair,
                    iso,
                ),
            ])
        }
    }
}
