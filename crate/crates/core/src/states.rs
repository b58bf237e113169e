//! Constructors for the bipartite state families, with explicit
//! erasure-symbol embedding.
//!
//! The erasure symbol `[e]` of a party is modeled as one extra basis
//! level per party: a system of logical dimension `d` becomes a part of
//! dimension `d + 1` whose last level is orthogonal to everything on the
//! base space. A composite party is erased as a whole, so a single extra
//! level suffices; the quantities computed here are invariant under the
//! local isometry relating this embedding to the one-level-per-subsystem
//! one, and the smaller space keeps the SDPs small.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    hermitian_eig, partial_trace, permute_systems, ComplexMatrix, LinalgError, Part, Party,
    SystemDims,
};

/// Hermiticity tolerance for density-operator construction (entrywise).
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalue floor for density-operator construction.
pub const DENSITY_EIGEN_TOL: f64 = 1e-10;
/// Trace tolerance for density-operator construction.
pub const DENSITY_TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("not a valid density operator: {reason} ({value:.3e})")]
    InvalidDensity { reason: &'static str, value: f64 },
    #[error("parameter {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("twist unitary {index} is not unitary (deviation {deviation:.3e})")]
    NonUnitaryTwist { index: usize, deviation: f64 },
    #[error("private state spec needs exactly k = {k} twist unitaries, got {got}")]
    TwistCount { k: usize, got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A density operator together with its subsystem layout.
///
/// Construction checks Hermiticity, positivity, and unit trace; every
/// constructor in this module returns operators passing these checks.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: SystemDims,
}

impl DensityOperator {
    /// Validates with the default tolerances.
    pub fn new(matrix: ComplexMatrix, dims: SystemDims) -> Result<Self, StateError> {
        Self::with_tolerance(
            matrix,
            dims,
            DENSITY_HERMITIAN_TOL,
            DENSITY_EIGEN_TOL,
            DENSITY_TRACE_TOL,
        )
    }

    /// Validates with a single loosened tolerance, e.g. for operators read
    /// from files or produced by an iterative solver.
    pub fn with_uniform_tolerance(
        matrix: ComplexMatrix,
        dims: SystemDims,
        tol: f64,
    ) -> Result<Self, StateError> {
        Self::with_tolerance(matrix, dims, tol, tol, tol)
    }

    fn with_tolerance(
        mut matrix: ComplexMatrix,
        dims: SystemDims,
        herm_tol: f64,
        eig_tol: f64,
        trace_tol: f64,
    ) -> Result<Self, StateError> {
        let n = matrix.require_square()?;
        dims.require_matches(n)?;
        let asym = matrix.hermitian_asymmetry();
        if asym > herm_tol {
            return Err(StateError::InvalidDensity {
                reason: "Hermiticity violated",
                value: asym,
            });
        }
        matrix.hermitize();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > trace_tol {
            return Err(StateError::InvalidDensity {
                reason: "trace differs from one",
                value: tr,
            });
        }
        let eig = hermitian_eig(&matrix)?;
        if eig.min_eigenvalue() < -eig_tol {
            return Err(StateError::InvalidDensity {
                reason: "negative eigenvalue",
                value: eig.min_eigenvalue(),
            });
        }
        Ok(Self { matrix, dims })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &SystemDims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Reduced operator on one party (the other is traced out).
    pub fn marginal(&self, party: Party) -> Result<ComplexMatrix, StateError> {
        Ok(partial_trace(
            &self.matrix,
            &self.dims,
            &self.dims.indices_of(party),
        )?)
    }

    /// Relabels subsystems so all A-side parts precede all B-side parts.
    pub fn canonical_a_first(&self) -> Result<Self, StateError> {
        if self.dims.is_a_first() {
            return Ok(self.clone());
        }
        let perm = self.dims.a_first_permutation();
        let (m, d) = permute_systems(&self.matrix, &self.dims, &perm)?;
        Ok(Self { matrix: m, dims: d })
    }

    /// Flattens to a two-part layout `(d_A, d_B)`, permuting to A-first
    /// order when needed. The A:B cut and erasure flags are preserved at
    /// the party level.
    pub fn grouped_bipartite(&self) -> Result<Self, StateError> {
        self.dims.require_bipartite()?;
        let canon = self.canonical_a_first()?;
        let d_a = canon.dims.party_dim(Party::A);
        let d_b = canon.dims.party_dim(Party::B);
        let a_ext = canon
            .dims
            .parts()
            .iter()
            .filter(|p| p.party == Party::A)
            .any(|p| p.erasure_extended);
        let b_ext = canon
            .dims
            .parts()
            .iter()
            .filter(|p| p.party == Party::B)
            .any(|p| p.erasure_extended);
        let dims = SystemDims::new(vec![
            Part {
                party: Party::A,
                dim: d_a,
                erasure_extended: a_ext,
            },
            Part {
                party: Party::B,
                dim: d_b,
                erasure_extended: b_ext,
            },
        ])?;
        Ok(Self {
            matrix: canon.matrix,
            dims,
        })
    }

    /// Tensor product with the bipartite cut regrouped to
    /// `(A_self A_other : B_self B_other)`.
    pub fn tensor_bipartite(&self, other: &Self) -> Result<Self, StateError> {
        let left = self.canonical_a_first()?;
        let right = other.canonical_a_first()?;
        let joint = left.matrix.kron(&right.matrix);
        let mut parts = left.dims.parts().to_vec();
        parts.extend_from_slice(right.dims.parts());
        let dims = SystemDims::new(parts)?;
        let perm = dims.a_first_permutation();
        let (m, d) = permute_systems(&joint, &dims, &perm)?;
        Ok(Self { matrix: m, dims: d })
    }
}

/// Location of the erasure symbol inside a `(d + 1)`-level part.
#[derive(Debug, Clone, Copy)]
pub struct ErasureEmbedding {
    pub base_dim: usize,
}

impl ErasureEmbedding {
    pub fn new(base_dim: usize) -> Self {
        Self { base_dim }
    }

    pub fn extended_dim(&self) -> usize {
        self.base_dim + 1
    }

    /// Index of `[e]`, fixed to the level after the base space.
    pub fn erased_index(&self) -> usize {
        self.base_dim
    }

    /// `[e] = |e><e|` on the extended space.
    pub fn erased_proj(&self) -> ComplexMatrix {
        ComplexMatrix::basis_op(self.extended_dim(), self.base_dim, self.base_dim)
    }

    /// `Pi = sum_{i<d} |i><i|` on the extended space.
    pub fn base_proj(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.extended_dim(), self.extended_dim());
        for i in 0..self.base_dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Isometry from the base space into the extended space (d+1 x d).
    pub fn isometry(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.extended_dim(), self.base_dim);
        for i in 0..self.base_dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Pads an operator on the base space with a zero erased row/column.
    pub fn embed(&self, m: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(m.rows(), self.base_dim);
        let v = self.isometry();
        v.matmul(m).matmul(&v.dagger())
    }
}

/// Specification of a bipartite private state on key systems `A0 B0`
/// (dimension `k` each) and shield systems `A1 B1`.
#[derive(Debug, Clone)]
pub struct PrivateStateSpec {
    pub k: usize,
    pub shield_dims: (usize, usize),
    /// `k` unitaries on the joint shield `A1 B1`.
    pub twist_unitaries: Vec<ComplexMatrix>,
    /// Shield state on `A1 B1`.
    pub shield_state: DensityOperator,
}

impl PrivateStateSpec {
    /// Default spec: shift-operator twists `X^i` on the joint shield, and
    /// a maximally entangled shield when the shield dims agree (otherwise
    /// maximally mixed).
    pub fn with_defaults(k: usize, shield_dims: (usize, usize)) -> Result<Self, StateError> {
        if k < 2 {
            return Err(StateError::Domain {
                name: "k",
                value: k as f64,
                domain: "k >= 2",
            });
        }
        let (da1, db1) = shield_dims;
        let dsh = da1 * db1;
        let shift = shift_operator(dsh);
        let twists = (0..k)
            .map(|i| {
                let mut u = ComplexMatrix::identity(dsh);
                for _ in 0..i {
                    u = shift.matmul(&u);
                }
                u
            })
            .collect();
        let shield_dims_sys = SystemDims::new(vec![
            Part::new(Party::A, da1),
            Part::new(Party::B, db1),
        ])?;
        let shield_state = if da1 == db1 && da1 >= 2 {
            let m = max_entangled(da1)?;
            DensityOperator::new(m.matrix.clone(), shield_dims_sys)?
        } else {
            DensityOperator::new(
                ComplexMatrix::identity(dsh).scale_re(1.0 / dsh as f64),
                shield_dims_sys,
            )?
        };
        Ok(Self {
            k,
            shield_dims,
            twist_unitaries: twists,
            shield_state,
        })
    }

    /// Trivial one-dimensional shield; the private state degenerates to
    /// the maximally entangled state of Schmidt rank `k`.
    pub fn trivial_shield(k: usize) -> Result<Self, StateError> {
        Self::with_defaults(k, (1, 1))
    }

    fn validate(&self) -> Result<(), StateError> {
        if self.k < 2 {
            return Err(StateError::Domain {
                name: "k",
                value: self.k as f64,
                domain: "k >= 2",
            });
        }
        if self.twist_unitaries.len() != self.k {
            return Err(StateError::TwistCount {
                k: self.k,
                got: self.twist_unitaries.len(),
            });
        }
        let dsh = self.shield_dims.0 * self.shield_dims.1;
        for (i, u) in self.twist_unitaries.iter().enumerate() {
            if u.rows() != dsh || u.cols() != dsh {
                return Err(StateError::Linalg(LinalgError::DimensionMismatch {
                    context: "twist unitary must act on the joint shield",
                    expected: dsh,
                    got: u.rows(),
                }));
            }
            let dev = u
                .dagger()
                .matmul(u)
                .sub(&ComplexMatrix::identity(dsh))
                .max_abs();
            if dev > 1e-10 {
                return Err(StateError::NonUnitaryTwist {
                    index: i,
                    deviation: dev,
                });
            }
        }
        if self.shield_state.dim() != dsh {
            return Err(StateError::Linalg(LinalgError::DimensionMismatch {
                context: "shield state must act on the joint shield",
                expected: dsh,
                got: self.shield_state.dim(),
            }));
        }
        Ok(())
    }
}

/// Cyclic shift `X|i> = |i+1 mod d>`.
pub fn shift_operator(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        m[((i + 1) % d, i)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Maximally entangled state of Schmidt rank `d` on `A (x) B`.
pub fn max_entangled(d: usize) -> Result<DensityOperator, StateError> {
    if d < 2 {
        return Err(StateError::Domain {
            name: "d",
            value: d as f64,
            domain: "d >= 2",
        });
    }
    let mut psi = ComplexMatrix::zeros(d * d, 1);
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        psi[(i * d + i, 0)] = amp;
    }
    let m = psi.matmul(&psi.dagger());
    Ok(DensityOperator::new(m, SystemDims::bipartite(d, d))?)
}

/// Bipartite private state `(1/k) sum_{ij} |ii><jj| (x) U_i w U_j^dag`
/// on subsystem order `A0 A1 B0 B1`.
pub fn private_state(spec: &PrivateStateSpec) -> Result<DensityOperator, StateError> {
    spec.validate()?;
    let k = spec.k;
    let (da1, db1) = spec.shield_dims;
    let dsh = da1 * db1;

    // Build on order (A0, B0, SH) and permute the shield into place.
    let mut m = ComplexMatrix::zeros(k * k * dsh, k * k * dsh);
    let key_scale = Complex64::new(1.0 / k as f64, 0.0);
    for i in 0..k {
        let ui_w = spec.twist_unitaries[i].matmul(spec.shield_state.matrix());
        for j in 0..k {
            let block = ui_w.matmul(&spec.twist_unitaries[j].dagger());
            for r in 0..dsh {
                for c in 0..dsh {
                    m[((i * k + i) * dsh + r, (j * k + j) * dsh + c)] = key_scale * block[(r, c)];
                }
            }
        }
    }
    let build_dims = SystemDims::new(vec![
        Part::new(Party::A, k),
        Part::new(Party::B, k),
        Part::new(Party::A, da1),
        Part::new(Party::B, db1),
    ])?;
    // Reorder (A0, B0, A1, B1) -> (A0, A1, B0, B1).
    let (m, dims) = permute_systems(&m, &build_dims, &[0, 2, 1, 3])?;
    Ok(DensityOperator::new(m, dims)?)
}

fn check_prob(p: f64, name: &'static str) -> Result<(), StateError> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(StateError::Domain {
            name,
            value: p,
            domain: "[0, 1]",
        });
    }
    Ok(())
}

/// Doubly erased private state `p gamma + (1-p) [e]_A (x) [e]_B` on the
/// erasure-extended spaces `(d_A + 1)(d_B + 1)`.
pub fn doubly_erased_private(
    gamma: &DensityOperator,
    p: f64,
) -> Result<DensityOperator, StateError> {
    check_prob(p, "p")?;
    let flat = gamma.grouped_bipartite()?;
    let d_a = flat.dims().parts()[0].dim;
    let d_b = flat.dims().parts()[1].dim;
    let ea = ErasureEmbedding::new(d_a);
    let eb = ErasureEmbedding::new(d_b);
    let ext_a = ea.extended_dim();
    let ext_b = eb.extended_dim();
    let mut m = ComplexMatrix::zeros(ext_a * ext_b, ext_a * ext_b);
    for ia in 0..d_a {
        for ib in 0..d_b {
            for ja in 0..d_a {
                for jb in 0..d_b {
                    m[(ia * ext_b + ib, ja * ext_b + jb)] =
                        flat.matrix()[(ia * d_b + ib, ja * d_b + jb)].scale(p);
                }
            }
        }
    }
    let e_idx = ea.erased_index() * ext_b + eb.erased_index();
    m[(e_idx, e_idx)] += Complex64::new(1.0 - p, 0.0);
    let dims = SystemDims::new(vec![
        Part::erasure_extended(Party::A, ext_a),
        Part::erasure_extended(Party::B, ext_b),
    ])?;
    Ok(DensityOperator::new(m, dims)?)
}

/// Erased private state `p gamma + (1-p) Tr_B[gamma] (x) [e]_B`; only B
/// is erasure-extended.
pub fn erased_private(gamma: &DensityOperator, p: f64) -> Result<DensityOperator, StateError> {
    check_prob(p, "p")?;
    let flat = gamma.grouped_bipartite()?;
    let d_a = flat.dims().parts()[0].dim;
    let d_b = flat.dims().parts()[1].dim;
    let gamma_a = flat.marginal(Party::A)?;
    let eb = ErasureEmbedding::new(d_b);
    let ext_b = eb.extended_dim();
    let mut m = ComplexMatrix::zeros(d_a * ext_b, d_a * ext_b);
    for ia in 0..d_a {
        for ib in 0..d_b {
            for ja in 0..d_a {
                for jb in 0..d_b {
                    m[(ia * ext_b + ib, ja * ext_b + jb)] =
                        flat.matrix()[(ia * d_b + ib, ja * d_b + jb)].scale(p);
                }
            }
        }
    }
    let e = eb.erased_index();
    for ia in 0..d_a {
        for ja in 0..d_a {
            m[(ia * ext_b + e, ja * ext_b + e)] += gamma_a[(ia, ja)].scale(1.0 - p);
        }
    }
    let dims = SystemDims::new(vec![
        Part::new(Party::A, d_a),
        Part::erasure_extended(Party::B, ext_b),
    ])?;
    Ok(DensityOperator::new(m, dims)?)
}

/// Erased state `p Phi^d + (1-p) I_A/d (x) [e]_B`, the erased private
/// state of the maximally entangled state.
pub fn erased_state(p: f64, d: usize) -> Result<DensityOperator, StateError> {
    erased_private(&max_entangled(d)?, p)
}

/// Swap operator `F = sum_{ij} |i><j| (x) |j><i|` on `d (x) d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

/// Werner state `p (I+F)/(d(d+1)) + (1-p) (I-F)/(d(d-1))`.
pub fn werner_state(p: f64, d: usize) -> Result<DensityOperator, StateError> {
    check_prob(p, "p")?;
    if d < 2 {
        return Err(StateError::Domain {
            name: "d",
            value: d as f64,
            domain: "d >= 2",
        });
    }
    let f = swap_operator(d);
    let id = ComplexMatrix::identity(d * d);
    let sym = id.add(&f).scale_re(p / (d * (d + 1)) as f64);
    let asym = id.sub(&f).scale_re((1.0 - p) / (d * (d - 1)) as f64);
    Ok(DensityOperator::new(
        sym.add(&asym),
        SystemDims::bipartite(d, d),
    )?)
}

/// Isotropic state `f Phi^d + (1-f) (I - Phi^d)/(d^2 - 1)`.
pub fn isotropic_state(f: f64, d: usize) -> Result<DensityOperator, StateError> {
    check_prob(f, "f")?;
    let phi = max_entangled(d)?;
    let id = ComplexMatrix::identity(d * d);
    let complement = id.sub(phi.matrix());
    let m = phi
        .matrix()
        .scale_re(f)
        .add(&complement.scale_re((1.0 - f) / ((d * d - 1) as f64)));
    Ok(DensityOperator::new(m, SystemDims::bipartite(d, d))?)
}

/// Max entrywise norm of the blocks coupling erased and non-erased
/// sectors of every erasure-extended part. Zero for states of the form
/// produced by the erased constructors.
pub fn sector_coherence(rho: &DensityOperator) -> f64 {
    let dims = rho.dims();
    let n = rho.dim();
    let mut worst = 0.0f64;
    for (part_idx, part) in dims.parts().iter().enumerate() {
        if !part.erasure_extended {
            continue;
        }
        let erased = part.dim - 1;
        for r in 0..n {
            let r_multi = dims.unflatten(r);
            for c in 0..n {
                let c_multi = dims.unflatten(c);
                let r_erased = r_multi[part_idx] == erased;
                let c_erased = c_multi[part_idx] == erased;
                if r_erased != c_erased {
                    worst = worst.max(rho.matrix()[(r, c)].norm());
                }
            }
        }
    }
    worst
}
