//! Entropic functionals: von Neumann entropy, binary entropy,
//! min-relative entropy, and coherent information (numeric and closed
//! form). All values are in bits (base-2 logarithms).

use thiserror::Error;

use crate::linalg::{hermitian_eig, support_projector, LinalgError, Party};
use crate::states::{DensityOperator, StateError};

/// Eigenvalues below this are treated as exact zeros inside logarithms.
pub const EIGENVALUE_CLAMP: f64 = 1e-12;
/// Default overlap threshold below which the min-relative entropy is
/// reported as divergent.
pub const DMIN_OVERLAP_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("parameter {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("dimension mismatch: operators act on {left} and {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// An entropy-like value in bits. Divergent values (min-relative entropy
/// with essentially disjoint supports) are carried as an explicit
/// infinite marker rather than an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue {
    pub bits: f64,
}

impl EntropyValue {
    pub fn finite(bits: f64) -> Self {
        Self { bits }
    }

    pub fn infinite() -> Self {
        Self {
            bits: f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.bits.is_infinite()
    }
}

/// Von Neumann entropy `H(rho) = -Tr[rho log2 rho]`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<EntropyValue, EntropyError> {
    let eig = hermitian_eig(rho.matrix())?;
    let mut h = 0.0;
    for &l in &eig.eigenvalues {
        if l > EIGENVALUE_CLAMP {
            h -= l * l.log2();
        }
    }
    Ok(EntropyValue::finite(h))
}

/// Binary entropy `h2(p) = -p log2 p - (1-p) log2(1-p)`, zero at the
/// endpoints.
pub fn binary_entropy(p: f64) -> Result<EntropyValue, EntropyError> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(EntropyError::Domain {
            name: "p",
            value: p,
            domain: "[0, 1]",
        });
    }
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    Ok(EntropyValue::finite(h))
}

/// Min-relative entropy `D_min(rho || sigma) = -log2 Tr[Pi^rho sigma]`,
/// divergent when the overlap falls below `tol`.
pub fn dmin(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    tol: f64,
) -> Result<EntropyValue, EntropyError> {
    if rho.dim() != sigma.dim() {
        return Err(EntropyError::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let pi = support_projector(rho.matrix(), 1e-9)?;
    let overlap = pi.matmul(sigma.matrix()).trace().re;
    if overlap < tol {
        return Ok(EntropyValue::infinite());
    }
    Ok(EntropyValue::finite(-overlap.log2()))
}

/// Coherent information `I(A>B) = H(B) - H(AB)` where
/// `H(B) = H(Tr_A[rho])`.
pub fn coherent_information(rho: &DensityOperator) -> Result<EntropyValue, EntropyError> {
    rho.dims().require_bipartite()?;
    let b = rho.marginal(Party::B)?;
    let eig_b = hermitian_eig(&b)?;
    let mut h_b = 0.0;
    for &l in &eig_b.eigenvalues {
        if l > EIGENVALUE_CLAMP {
            h_b -= l * l.log2();
        }
    }
    let h_ab = von_neumann_entropy(rho)?.bits;
    Ok(EntropyValue::finite(h_b - h_ab))
}

/// Closed-form coherent information of the Werner state:
/// `1 - h2(p) - p log2(d+1) - (1-p) log2(d-1)`.
pub fn werner_coherent_closed(p: f64, d: usize) -> Result<EntropyValue, EntropyError> {
    if d < 2 {
        return Err(EntropyError::Domain {
            name: "d",
            value: d as f64,
            domain: "d >= 2",
        });
    }
    let h = binary_entropy(p)?.bits;
    let mut v = 1.0 - h - p * ((d + 1) as f64).log2();
    if d > 2 {
        v -= (1.0 - p) * ((d - 1) as f64).log2();
    }
    Ok(EntropyValue::finite(v))
}

/// Closed-form coherent information of the isotropic state:
/// `log2 d - h2(F) - (1-F) log2(d^2 - 1)`.
pub fn isotropic_coherent_closed(f: f64, d: usize) -> Result<EntropyValue, EntropyError> {
    if d < 2 {
        return Err(EntropyError::Domain {
            name: "d",
            value: d as f64,
            domain: "d >= 2",
        });
    }
    let h = binary_entropy(f)?.bits;
    let v = (d as f64).log2() - h - (1.0 - f) * ((d * d - 1) as f64).log2();
    Ok(EntropyValue::finite(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, SystemDims};
    use crate::states::{
        erased_private, erased_state, isotropic_state, max_entangled, werner_state,
    };
    use num_complex::Complex64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const LOG2_3: f64 = 1.584_962_500_721_156;

    fn qubit_pair(m: ComplexMatrix) -> DensityOperator {
        DensityOperator::new(m, SystemDims::bipartite(2, 2)).unwrap()
    }

    #[test]
    fn entropy_of_maximally_mixed() {
        for d in [2usize, 3] {
            let rho = DensityOperator::new(
                ComplexMatrix::identity(d * d).scale_re(1.0 / (d * d) as f64),
                SystemDims::bipartite(d, d),
            )
            .unwrap();
            let h = von_neumann_entropy(&rho).unwrap().bits;
            assert!((h - 2.0 * (d as f64).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_of_pure_state_is_zero() {
        let phi = max_entangled(3).unwrap();
        assert!(von_neumann_entropy(&phi).unwrap().bits.abs() < 1e-10);
    }

    #[test]
    fn entropy_of_werner_half() {
        let w = werner_state(0.5, 2).unwrap();
        let h = von_neumann_entropy(&w).unwrap().bits;
        assert!((h - (1.0 + LOG2_3 / 2.0)).abs() < 1e-10);
    }

    #[test]
    fn entropy_unitary_invariance() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..3 {
            let g = ComplexMatrix::from_fn(4, 4, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let m = g.matmul(&g.dagger());
            let rho = qubit_pair(m.scale_re(1.0 / m.trace().re));
            // Unitary from the eigenvectors of a second random Hermitian.
            let h2m = {
                let g = ComplexMatrix::from_fn(4, 4, |_, _| {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                g.add(&g.dagger()).scale_re(0.5)
            };
            let u = hermitian_eig(&h2m).unwrap().eigenvectors;
            let rotated = qubit_pair(u.matmul(rho.matrix()).matmul(&u.dagger()));
            let h0 = von_neumann_entropy(&rho).unwrap().bits;
            let h1 = von_neumann_entropy(&rotated).unwrap().bits;
            assert!((h0 - h1).abs() < 1e-10);
        }
    }

    #[test]
    fn binary_entropy_values() {
        assert!((binary_entropy(0.5).unwrap().bits - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap().bits, 0.0);
        assert_eq!(binary_entropy(1.0).unwrap().bits, 0.0);
        assert!((binary_entropy(0.9).unwrap().bits - 0.468_995_593_589_281_1).abs() < 1e-12);
        assert!(binary_entropy(1.2).is_err());
    }

    #[test]
    fn dmin_identities() {
        let phi = max_entangled(2).unwrap();
        assert!(dmin(&phi, &phi, DMIN_OVERLAP_TOL).unwrap().bits.abs() < 1e-9);
        let mixed = qubit_pair(ComplexMatrix::identity(4).scale_re(0.25));
        let v = dmin(&phi, &mixed, DMIN_OVERLAP_TOL).unwrap().bits;
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn dmin_equal_supports_of_erased_private_pair() {
        let phi = max_entangled(2).unwrap();
        let a = erased_private(&phi, 0.3).unwrap();
        let b = erased_private(&phi, 0.7).unwrap();
        let v = dmin(&a, &b, DMIN_OVERLAP_TOL).unwrap().bits;
        assert!(v.abs() < 1e-9, "dmin = {v}");
    }

    #[test]
    fn dmin_disjoint_supports_is_infinite() {
        let dims = SystemDims::bipartite(2, 2);
        let a = DensityOperator::new(ComplexMatrix::basis_op(4, 0, 0), dims.clone()).unwrap();
        let b = DensityOperator::new(ComplexMatrix::basis_op(4, 3, 3), dims).unwrap();
        assert!(dmin(&a, &b, DMIN_OVERLAP_TOL).unwrap().is_infinite());
    }

    #[test]
    fn dmin_dimension_mismatch() {
        let phi2 = max_entangled(2).unwrap();
        let phi3 = max_entangled(3).unwrap();
        assert!(matches!(
            dmin(&phi2, &phi3, DMIN_OVERLAP_TOL),
            Err(EntropyError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn coherent_information_of_maxent() {
        let phi = max_entangled(2).unwrap();
        let v = coherent_information(&phi).unwrap().bits;
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coherent_information_of_extreme_werner() {
        let w = werner_state(1.0, 2).unwrap();
        let v = coherent_information(&w).unwrap().bits;
        assert!((v - (1.0 - LOG2_3)).abs() < 1e-9);
    }

    #[test]
    fn coherent_information_of_erased_state_gap_point() {
        let e = erased_state(0.75, 2).unwrap();
        let v = coherent_information(&e).unwrap().bits;
        // 2p - 1 at p = 3/4.
        assert!((v - 0.5).abs() < 1e-10);
        assert!(v > 0.0);
    }

    #[test]
    fn werner_closed_form_values_and_agreement() {
        assert!(
            (werner_coherent_closed(1.0, 2).unwrap().bits - (1.0 - LOG2_3)).abs() < 1e-12
        );
        assert!(
            (werner_coherent_closed(0.5, 2).unwrap().bits - (-LOG2_3 / 2.0)).abs() < 1e-12
        );
        for d in [2usize, 3] {
            for i in 0..=10 {
                let p = i as f64 / 10.0;
                let closed = werner_coherent_closed(p, d).unwrap().bits;
                let numeric = coherent_information(&werner_state(p, d).unwrap())
                    .unwrap()
                    .bits;
                assert!(
                    (closed - numeric).abs() < 1e-8,
                    "d={d} p={p}: closed {closed} vs numeric {numeric}"
                );
            }
        }
    }

    #[test]
    fn isotropic_closed_form_values_and_agreement() {
        assert!((isotropic_coherent_closed(1.0, 2).unwrap().bits - 1.0).abs() < 1e-12);
        assert!(
            (isotropic_coherent_closed(0.9, 2).unwrap().bits - 0.372_508_156_338_603_2).abs()
                < 1e-12
        );
        for d in [2usize, 3] {
            for i in 0..=10 {
                let f = i as f64 / 10.0;
                let closed = isotropic_coherent_closed(f, d).unwrap().bits;
                let numeric = coherent_information(&isotropic_state(f, d).unwrap())
                    .unwrap()
                    .bits;
                assert!(
                    (closed - numeric).abs() < 1e-8,
                    "d={d} f={f}: closed {closed} vs numeric {numeric}"
                );
            }
        }
    }
}
