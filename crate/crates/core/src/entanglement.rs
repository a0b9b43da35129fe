//! Two-site entanglement: Werner parameter, tangle, concurrence, entanglement
//! of formation, separability and direct monogamy sums.

use num_complex::Complex64;
use serde::Serialize;

use crate::density::{DensityMatrix, PSD_TOLERANCE};
use crate::error::{Result, RvbError};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, CMatrix};
use crate::state::StateVector;

/// Concurrence above which a two-qubit state counts as entangled.
pub const ENTANGLED_CONCURRENCE: f64 = 1e-9;
/// Slack allowed on the Werner domain `[-1/3, 1]`.
pub const WERNER_DOMAIN_SLACK: f64 = 1e-10;

const SEPARABLE_P: f64 = 1.0 / 3.0;

/// Singlet `(|↑↓⟩ − |↓↑⟩)/√2` in the two-site basis (first site most significant).
pub fn singlet_vector() -> [f64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [0.0, h, -h, 0.0]
}

/// `ρ_W(p) = p |s⟩⟨s| + (1 − p) I/4`.
pub fn werner_state(p: f64) -> CMatrix {
    let proj = CMatrix::projector(&singlet_vector()).scale(p);
    let mixed = CMatrix::identity(4).scale((1.0 - p) / 4.0);
    &proj + &mixed
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WernerFit {
    pub p: f64,
    /// Operator-norm distance between the input and `ρ_W(p)`.
    pub residual: f64,
    pub pair: (usize, usize),
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(RvbError::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    Ok(())
}

fn check_werner_domain(p: f64) -> Result<()> {
    if !(-SEPARABLE_P - WERNER_DOMAIN_SLACK..=1.0 + WERNER_DOMAIN_SLACK).contains(&p) {
        return Err(RvbError::OutOfDomain { name: "p", value: p });
    }
    Ok(())
}

/// Werner parameter from the singlet fidelity, `p = (4F − 1)/3`.
///
/// The singlet projector is the same for either site order, so the fit does
/// not depend on which site of the pair sits on sublattice A.
pub fn extract_werner_p(rho: &DensityMatrix) -> Result<WernerFit> {
    check_two_qubit(rho)?;
    let s = singlet_vector();
    let m = rho.matrix();
    let mut fidelity = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            fidelity += s[i] * m[(i, j)].re * s[j];
        }
    }
    let p = (4.0 * fidelity - 1.0) / 3.0;
    let residual = rho.distance(&werner_state(p))?;
    Ok(WernerFit {
        p,
        residual,
        pair: (rho.sites()[0], rho.sites()[1]),
    })
}

/// Closed-form tangle of a Werner state: `(3p − 1)²/4` above `p = 1/3`, else 0.
pub fn tangle_werner(p: f64) -> Result<f64> {
    check_werner_domain(p)?;
    Ok(if p <= SEPARABLE_P {
        0.0
    } else {
        (3.0 * p - 1.0).powi(2) / 4.0
    })
}

/// Concurrence `max(0, λ1 − λ2 − λ3 − λ4)`, λ the decreasing square roots of
/// the eigenvalues of `ρ ρ̃` with `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
///
/// With `ρ = X X†` the λ are the singular values of `τ = Xᵀ (σ_y⊗σ_y) X`.
/// Computing them from τ keeps near-zero λ at the scale of the eigenvalues
/// of ρ instead of their square roots, which matters for rank-deficient inputs
/// such as the pure singlet.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let eig = hermitian_eigen(rho.matrix());
    let min = *eig.values.last().unwrap();
    if min < -PSD_TOLERANCE {
        return Err(RvbError::NotPositive(min));
    }
    let flip = spin_flip();
    // X = V sqrt(D)
    let mut x = CMatrix::zeros(4);
    for r in 0..4 {
        for c in 0..4 {
            x[(r, c)] = eig.vectors[(r, c)] * eig.values[c].max(0.0).sqrt();
        }
    }
    let tau = &(&x.transpose() * &flip) * &x;
    let gram = &tau.adjoint() * &tau;
    let mut lambda: Vec<f64> = hermitian_eigenvalues(&gram)
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0))
}

pub fn tangle_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    Ok(concurrence(rho)?.powi(2))
}

/// Entanglement of formation in ebits from the concurrence.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    let x = (1.0 + (1.0 - c * c).sqrt()) / 2.0;
    binary_entropy(x)
}

pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    Ok(eof_from_concurrence(concurrence(rho)?))
}

pub fn binary_entropy(x: f64) -> f64 {
    let term = |y: f64| if y <= 0.0 { 0.0 } else { -y * y.log2() };
    term(x) + term(1.0 - x)
}

/// Werner states are separable exactly when `p ≤ 1/3`.
pub fn is_separable_werner(p: f64) -> Result<bool> {
    check_werner_domain(p)?;
    Ok(p <= SEPARABLE_P + 1e-12)
}

/// Partial transpose on the second site.
pub fn partial_transpose(m: &CMatrix) -> CMatrix {
    assert_eq!(m.dim(), 4, "partial transpose is defined here for two qubits");
    let mut out = CMatrix::zeros(4);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    out[(2 * a + b, 2 * c + d)] = m[(2 * a + d, 2 * c + b)];
                }
            }
        }
    }
    out
}

/// Smallest eigenvalue of the partial transpose; negative iff entangled.
pub fn ppt_min_eigenvalue(m: &CMatrix) -> f64 {
    *hermitian_eigenvalues(&partial_transpose(m)).last().unwrap()
}

fn spin_flip() -> CMatrix {
    let sy = crate::linalg::pauli_y();
    sy.kron(&sy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureRecord {
    pub tangle: f64,
    pub concurrence: f64,
    pub eof_ebits: f64,
    pub separable: bool,
}

pub fn measure(rho: &DensityMatrix) -> Result<MeasureRecord> {
    let c = concurrence(rho)?;
    Ok(MeasureRecord {
        tangle: c * c,
        concurrence: c,
        eof_ebits: eof_from_concurrence(c),
        separable: c <= ENTANGLED_CONCURRENCE,
    })
}

/// One row of a pairwise scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairMeasure {
    pub pair: (usize, usize),
    pub p: f64,
    pub residual: f64,
    pub tangle: f64,
    pub eof: f64,
    pub separable: bool,
}

pub fn measure_pair(state: &StateVector, i: usize, j: usize) -> Result<PairMeasure> {
    let rho = state.reduced_density_matrix(&[i, j])?;
    let fit = extract_werner_p(&rho)?;
    let m = measure(&rho)?;
    Ok(PairMeasure {
        pair: (i, j),
        p: fit.p,
        residual: fit.residual,
        tangle: m.tangle,
        eof: m.eof_ebits,
        separable: m.separable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonogamyRecord {
    pub anchor: usize,
    /// `Σ_k τ(ρ_{anchor,k})` over the partners.
    pub pair_tangle_sum: f64,
    /// `τ(anchor : rest)`, the linearised entropy of the anchor's reduced
    /// state (valid because the global state is pure).
    pub aggregate_tangle: f64,
}

pub fn monogamy_sum(state: &StateVector, anchor: usize, partners: &[usize]) -> Result<MonogamyRecord> {
    if partners.contains(&anchor) {
        return Err(RvbError::InvalidArgument(format!(
            "anchor {anchor} cannot be its own partner"
        )));
    }
    let mut sum = 0.0;
    for &k in partners {
        let rho = state.reduced_density_matrix(&[anchor, k])?;
        sum += tangle_two_qubit(&rho)?;
    }
    let single = state.reduced_density_matrix(&[anchor])?;
    Ok(MonogamyRecord {
        anchor,
        pair_tangle_sum: sum,
        aggregate_tangle: single.linear_entropy(),
    })
}

/// Product state `|a⟩⟨a| ⊗ |b⟩⟨b|` for two Bloch vectors, used as a separable
/// reference.
pub fn product_state(bloch_a: [f64; 3], bloch_b: [f64; 3]) -> CMatrix {
    let single = |v: [f64; 3]| {
        let mut m = CMatrix::zeros(2);
        m[(0, 0)] = Complex64::new((1.0 + v[2]) / 2.0, 0.0);
        m[(1, 1)] = Complex64::new((1.0 - v[2]) / 2.0, 0.0);
        m[(0, 1)] = Complex64::new(v[0] / 2.0, -v[1] / 2.0);
        m[(1, 0)] = Complex64::new(v[0] / 2.0, v[1] / 2.0);
        m
    };
    single(bloch_a).kron(&single(bloch_b))
}
