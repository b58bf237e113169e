//! Hermitian eigendecomposition via cyclic Jacobi rotations.
//!
//! The complex rotation for a pivot (p, q) is the product of a phase that
//! makes the pivot entry real and a real Jacobi rotation that annihilates
//! it. Quadratic convergence sets in after a few sweeps; dimension is
//! capped well below the point where an O(n^3)-per-sweep method hurts.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::LinalgError;

const MAX_SWEEPS: usize = 100;
const HERMITIAN_INPUT_TOL: f64 = 1e-8;

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues
/// and orthonormal eigenvector columns, `H = V diag(lambda) V^dag`.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    /// Rebuilds `V f(lambda) V^dag`; `f = id` reconstructs the input.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let w = f(self.eigenvalues[k]);
            if w == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = v[(r, k)] * w;
                for c in 0..n {
                    out[(r, c)] += vr * v[(c, k)].conj();
                }
            }
        }
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// The input must be Hermitian within `1e-8` relative asymmetry; it is
/// symmetrized before iterating so the returned factors are exactly
/// consistent with each other.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEig, LinalgError> {
    let n = h.require_square()?;
    let scale = h.max_abs().max(1.0);
    let asym = h.hermitian_asymmetry();
    if asym > HERMITIAN_INPUT_TOL * scale {
        return Err(LinalgError::NotHermitian { asymmetry: asym });
    }

    let mut a = h.clone();
    a.hermitize();
    let mut v = ComplexMatrix::identity(n);

    if n <= 1 {
        let eigenvalues = if n == 1 { vec![a[(0, 0)].re] } else { vec![] };
        return Ok(HermitianEig {
            eigenvalues,
            eigenvectors: v,
        });
    }

    let frob = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let stop = 1e-15 * frob;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        // One more residual check: stalled but tiny off-diagonals are fine.
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() > 1e-11 * frob {
            return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation annihilating the (p, q) entry of `a`, with the
/// unitary accumulated into the columns of `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let beta = apq.norm();
    if beta < 1e-300 {
        return;
    }
    let phase = apq / beta; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * beta);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G differs from the identity only at:
    //   G[p,p] = c, G[p,q] = s, G[q,p] = -s e^{-i phi}, G[q,q] = c e^{-i phi}
    let gpp = Complex64::new(c, 0.0);
    let gpq = Complex64::new(s, 0.0);
    let gqp = -s * phase.conj();
    let gqq = c * phase.conj();

    let n = a.rows();
    // A <- A G (columns p, q).
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * gpp + arq * gqp;
        a[(r, q)] = arp * gpq + arq * gqq;
    }
    // A <- G^dag A (rows p, q).
    for col in 0..n {
        let apc = a[(p, col)];
        let aqc = a[(q, col)];
        a[(p, col)] = gpp.conj() * apc + gqp.conj() * aqc;
        a[(q, col)] = gpq.conj() * apc + gqq.conj() * aqc;
    }
    // Clean up roundoff on the pivot and diagonals.
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    // V <- V G.
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * gpp + vrq * gqp;
        v[(r, q)] = vrp * gpq + vrq * gqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(n: usize, rng: &mut StdRng) -> ComplexMatrix {
        let mut m = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let dag = m.dagger();
        m = m.add(&dag).scale_re(0.5);
        m
    }

    fn check_decomposition(h: &ComplexMatrix) {
        let eig = hermitian_eig(h).unwrap();
        let rebuilt = eig.apply_fn(|x| x);
        let scale = h.frobenius_norm().max(1.0);
        assert!(
            rebuilt.sub(h).frobenius_norm() <= 1e-10 * scale,
            "reconstruction error {} too large",
            rebuilt.sub(h).frobenius_norm() / scale
        );
        let vtv = eig.eigenvectors.dagger().matmul(&eig.eigenvectors);
        assert!(vtv.sub(&ComplexMatrix::identity(h.rows())).max_abs() <= 1e-10);
        for w in eig.eigenvalues.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn diagonalizes_random_matrices() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in [1, 2, 3, 5, 8, 16, 36] {
            check_decomposition(&random_hermitian(n, &mut rng));
        }
    }

    #[test]
    fn known_spectrum_of_pauli_x() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let eig = hermitian_eig(&x).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_spectrum_ok() {
        let m = ComplexMatrix::identity(6).scale_re(0.25);
        let eig = hermitian_eig(&m).unwrap();
        for l in &eig.eigenvalues {
            assert!((l - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            hermitian_eig(&m),
            Err(LinalgError::NotHermitian { .. })
        ));
    }
}
