//! Reduced density matrices of a few sites.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Result, RvbError};
use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues, hermitian_operator_norm, pauli_x, pauli_y, pauli_z, CMatrix,
};

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Density matrix on an ordered list of sites. Row index bit `k - 1 - t`
/// holds the spin of `sites[t]` (first site most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    sites: Vec<usize>,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian, unit trace, positive semidefinite.
    pub fn new(sites: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let expected = 1usize << sites.len();
        if matrix.dim() != expected {
            return Err(RvbError::DimensionMismatch {
                expected,
                got: matrix.dim(),
            });
        }
        let rho = DensityMatrix { sites, matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn new_unchecked(sites: Vec<usize>, matrix: CMatrix) -> Self {
        DensityMatrix { sites, matrix }
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.matrix.hermiticity_error();
        if h > HERMITIAN_TOLERANCE {
            return Err(RvbError::InvalidArgument(format!("not Hermitian (error {h:e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(RvbError::InvalidArgument(format!("trace {tr} is not 1")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOLERANCE {
            return Err(RvbError::NotPositive(min));
        }
        Ok(())
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().unwrap_or(&0.0)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Von Neumann entropy in bits, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.eigenvalues())
    }

    /// Linearised entropy `2(1 − tr ρ²)`.
    pub fn linear_entropy(&self) -> f64 {
        2.0 * (1.0 - self.purity())
    }

    /// Trace out everything except `keep`, which must be a subset of
    /// [`Self::sites`]. The result lists sites in the order of `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let k = self.sites.len();
        let pos: Vec<usize> = keep
            .iter()
            .map(|s| {
                self.sites.iter().position(|x| x == s).ok_or_else(|| {
                    RvbError::InvalidArgument(format!("site {s} is not part of this density matrix"))
                })
            })
            .collect::<Result<_>>()?;
        crate::state::check_subset(&pos, k)?;
        let bit = |t: usize| k - 1 - t;
        let traced: Vec<usize> = (0..k).filter(|t| !pos.contains(t)).collect();
        let kd = 1usize << keep.len();
        let mut out = CMatrix::zeros(kd);
        for env in 0..(1usize << traced.len()) {
            let mut base = 0usize;
            for (e, &t) in traced.iter().enumerate() {
                base |= ((env >> e) & 1) << bit(t);
            }
            let full = |sub: usize| {
                let mut idx = base;
                for (j, &t) in pos.iter().enumerate() {
                    idx |= ((sub >> (keep.len() - 1 - j)) & 1) << bit(t);
                }
                idx
            };
            for r in 0..kd {
                let fr = full(r);
                for c in 0..kd {
                    out[(r, c)] += self.matrix[(fr, full(c))];
                }
            }
        }
        Ok(DensityMatrix {
            sites: keep.to_vec(),
            matrix: out,
        })
    }

    /// Largest operator norm of `[ρ, Σ_k σ_α^(k)]` over `α ∈ {x, y, z}`.
    /// Zero exactly when ρ commutes with every total-spin generator, i.e. is
    /// invariant under `U^{⊗n}`.
    pub fn rotational_invariance_defect(&self) -> f64 {
        let n = self.sites.len();
        let mut worst = 0.0_f64;
        for pauli in [pauli_x(), pauli_y(), pauli_z()] {
            let total = collective_operator(&pauli, n);
            let comm = &(&self.matrix * &total) - &(&total * &self.matrix);
            // i[ρ, S] is Hermitian.
            let herm = comm.scale_complex(Complex64::new(0.0, 1.0));
            worst = worst.max(hermitian_operator_norm(&herm));
        }
        worst
    }

    /// Operator-norm distance to another density matrix of the same size.
    pub fn distance(&self, other: &CMatrix) -> Result<f64> {
        if other.dim() != self.dim() {
            return Err(RvbError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(hermitian_operator_norm(&(&self.matrix - other)))
    }

    /// Matrix square root of a PSD matrix (negative round-off clamped).
    pub fn sqrt_matrix(&self) -> CMatrix {
        hermitian_eigen(&self.matrix).map_values(|x| x.max(0.0).sqrt())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("density matrix serialises")
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<[f64; 2]> = self.matrix.as_slice().iter().map(|z| [z.re, z.im]).collect();
        let mut st = serializer.serialize_struct("DensityMatrix", 3)?;
        st.serialize_field("sites", &self.sites)?;
        st.serialize_field("dim", &self.matrix.dim())?;
        st.serialize_field("matrix", &entries)?;
        st.end()
    }
}

/// `Σ_k op^(k)` on `n` sites.
pub fn collective_operator(op: &CMatrix, n: usize) -> CMatrix {
    let d = 1usize << n;
    let id = CMatrix::identity(2);
    let mut total = CMatrix::zeros(d);
    for k in 0..n {
        let mut term = CMatrix::identity(1);
        for t in 0..n {
            term = term.kron(if t == k { op } else { &id });
        }
        total = &total + &term;
    }
    total
}

pub fn entropy_bits(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn singlet_projector() -> CMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::projector(&[0.0, h, -h, 0.0])
    }

    #[test]
    fn maximally_mixed_qubit() {
        let rho = DensityMatrix::new(vec![0], CMatrix::identity(2).scale(0.5)).unwrap();
        assert_abs_diff_eq!(rho.purity(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entropy(), 1.0, epsilon = 1e-15);
        assert_eq!(rho.rotational_invariance_defect(), 0.0);
    }

    #[test]
    fn singlet_is_pure_and_invariant() {
        let rho = DensityMatrix::new(vec![0, 1], singlet_projector()).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entropy(), 0.0, epsilon = 1e-12);
        assert!(rho.rotational_invariance_defect() < 1e-15);
        let one = rho.partial_trace(&[1]).unwrap();
        assert_abs_diff_eq!(one.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(one.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn polarised_state_is_not_invariant() {
        let up = CMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]);
        let rho = DensityMatrix::new(vec![3], up).unwrap();
        assert!(rho.rotational_invariance_defect() > 0.5);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            DensityMatrix::new(vec![0, 1], CMatrix::identity(2)),
            Err(RvbError::DimensionMismatch { .. })
        ));
        assert!(DensityMatrix::new(vec![0], CMatrix::identity(2)).is_err());
        let neg = CMatrix::from_real(2, &[1.5, 0.0, 0.0, -0.5]);
        assert!(matches!(
            DensityMatrix::new(vec![0], neg),
            Err(RvbError::NotPositive(_))
        ));
        let rho = DensityMatrix::new(vec![0, 1], singlet_projector()).unwrap();
        assert!(rho.partial_trace(&[5]).is_err());
    }

    #[test]
    fn partial_trace_respects_order() {
        // |↑⟩_a ⊗ |↓⟩_b on sites [4, 9].
        let mut m = CMatrix::zeros(4);
        m[(1, 1)] = Complex64::new(1.0, 0.0);
        let rho = DensityMatrix::new(vec![4, 9], m).unwrap();
        let a = rho.partial_trace(&[4]).unwrap();
        assert_eq!(a.matrix()[(0, 0)].re, 1.0);
        let b = rho.partial_trace(&[9]).unwrap();
        assert_eq!(b.matrix()[(1, 1)].re, 1.0);
        let swapped = rho.partial_trace(&[9, 4]).unwrap();
        assert_eq!(swapped.matrix()[(2, 2)].re, 1.0);
    }

    #[test]
    fn json_layout() {
        let rho = DensityMatrix::new(vec![2], CMatrix::identity(2).scale(0.5)).unwrap();
        assert_eq!(
            rho.to_json(),
            r#"{"sites":[2],"dim":2,"matrix":[[0.5,0.0],[0.0,0.0],[0.0,0.0],[0.5,0.0]]}"#
        );
    }
}
