//! Min-unextendible entanglement and super two-extendibility.
//!
//! The central quantity is
//!
//! ```text
//!   E(rho) = inf_{sigma in F(rho)} -1/2 log2 Tr[Pi^rho sigma]
//! ```
//!
//! where `F(rho)` collects the marginals `Tr_B[w]` of tripartite states
//! `w` on `A B B'` whose `B'`-marginal is `rho` (with `B' ~ B`), and
//! `Pi^rho` projects onto the support of `rho`. The infimum is computed
//! by lifting to the extension variable: maximize `Tr[Pi^rho_{AB'} w]`
//! over `w >= 0` with `Tr_B'[w] = rho`, where the lifted objective
//! permutes the roles of `B` and `B'` so that it evaluates
//! `Tr[Pi^rho Tr_B w]` exactly.
//!
//! A state is super two-extendible exactly when the optimal overlap is
//! one; the reported `leak = 1 - overlap` measures the distance from
//! membership.
//!
//! For rank-deficient `rho` the feasible set forces the `AB`-marginal
//! support of `w` into `supp(rho)`, so the variable is restricted to
//! `supp(rho) (x) H_B'`; this keeps the barrier well-defined and loses
//! no feasible points.

use thiserror::Error;

use crate::linalg::{
    hermitian_eig, partial_trace, permute_systems, ComplexMatrix, LinalgError, Part, Party,
    SystemDims,
};
use crate::sdp::{
    marginal_constraint_operators, solve, SdpError, SdpProblem, SdpSolution, SdpStatus,
    SolveOptions,
};
use crate::states::{erased_private, DensityOperator, ErasureEmbedding, StateError};

/// Relative eigenvalue cutoff for support decisions.
pub const SUPPORT_REL_TOL: f64 = 1e-9;
/// Default membership tolerance for the super two-extendibility verdict.
pub const MEMBERSHIP_TOL: f64 = 1e-6;
/// Cap on the lifted (possibly support-restricted) variable dimension.
pub const VAR_DIM_CAP: usize = 64;
/// Cap on `d_A d_B` (the constraint count is its square).
pub const MARGINAL_DIM_CAP: usize = 32;

#[derive(Debug, Error)]
pub enum EminError {
    #[error(
        "problem exceeds the solver cap: lifted variable dim {var_dim} (cap {var_cap}) or \
         marginal dim {marginal_dim} (cap {marginal_cap})"
    )]
    DimensionCap {
        var_dim: usize,
        var_cap: usize,
        marginal_dim: usize,
        marginal_cap: usize,
    },
    #[error("input is rank-deficient (min eigenvalue {min_eigenvalue:.3e}); witness needs full rank")]
    RankDeficient { min_eigenvalue: f64 },
    #[error("witness marginal check failed: {context} (deviation {deviation:.3e})")]
    WitnessMarginal {
        context: &'static str,
        deviation: f64,
    },
    #[error("parameter {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Result of a min-unextendible-entanglement computation.
#[derive(Debug, Clone)]
pub struct EminReport {
    /// `-1/2 log2(overlap)`, in bits.
    pub value_bits: f64,
    /// Optimal overlap `Tr[Pi^rho sigma]`.
    pub overlap: f64,
    /// Optimal extension `w` on `A B B'`.
    pub optimal_extension: ComplexMatrix,
    /// Layout of `optimal_extension`.
    pub extension_dims: SystemDims,
    /// Optimal marginal `sigma = Tr_B[w]`, relabeled to `A B`.
    pub optimal_sigma: DensityOperator,
    pub solver_status: SdpStatus,
    pub solver_iterations: usize,
    /// Max violation of `Tr_B'[w] = rho` at the optimum.
    pub marginal_residual: f64,
    /// For doubly erased inputs: the value implied by the reduction
    /// `-1/2 log2(p 2^{-2 E(gamma)} + 1 - p)`.
    pub chain_value_bits: Option<f64>,
}

/// Membership verdict for the super two-extendible set.
#[derive(Debug, Clone)]
pub struct TwoExtSupVerdict {
    pub is_member: bool,
    /// Extension certifying membership (present for members).
    pub witness: Option<ComplexMatrix>,
    /// `1 - overlap`; membership means `leak <= membership_tol`.
    pub leak: f64,
    pub report: EminReport,
}

/// Computes the min-unextendible entanglement with default options.
pub fn emin(rho: &DensityOperator, tol: f64) -> Result<EminReport, EminError> {
    emin_with(rho, &SolveOptions::with_tol(tol))
}

/// Computes the min-unextendible entanglement with explicit solver
/// options.
pub fn emin_with(rho: &DensityOperator, opts: &SolveOptions) -> Result<EminReport, EminError> {
    let flat = rho.grouped_bipartite()?;
    let d_a = flat.dims().parts()[0].dim;
    let d_b = flat.dims().parts()[1].dim;
    let n_full = d_a * d_b;

    // Support analysis of rho.
    let eig = hermitian_eig(flat.matrix())?;
    let cutoff = SUPPORT_REL_TOL * eig.max_eigenvalue().max(0.0);
    let kept: Vec<usize> = (0..n_full)
        .filter(|&i| eig.eigenvalues[i] > cutoff)
        .collect();
    let rank = kept.len();
    let restricted = rank < n_full;
    let pi = eig.apply_fn(|l| if l > cutoff { 1.0 } else { 0.0 });

    let var_dim = rank * d_b;
    if var_dim > VAR_DIM_CAP || d_a * d_b > MARGINAL_DIM_CAP {
        return Err(EminError::DimensionCap {
            var_dim,
            var_cap: VAR_DIM_CAP,
            marginal_dim: d_a * d_b,
            marginal_cap: MARGINAL_DIM_CAP,
        });
    }

    // Lifted objective: Pi acting on (A, B'), identity on B.
    let c_lift = lift_projector_to_abbp(&pi, d_a, d_b);
    let dims3 = SystemDims::new(vec![
        Part::new(Party::A, d_a),
        Part::new(Party::B, d_b),
        Part::new(Party::B, d_b),
    ])?;
    let constraints = marginal_constraint_operators(&dims3, 2, flat.matrix())?;

    let (problem, isometry) = if restricted {
        // V_s columns span supp(rho); the variable lives on supp (x) B'.
        let mut v_s = ComplexMatrix::zeros(n_full, rank);
        for (col, &i) in kept.iter().enumerate() {
            for r in 0..n_full {
                v_s[(r, col)] = eig.eigenvectors[(r, i)];
            }
        }
        let v_lift = v_s.kron(&ComplexMatrix::identity(d_b));
        let mut c_res = v_lift.dagger().matmul(&c_lift).matmul(&v_lift);
        c_res.hermitize();
        let cons_res: Vec<(ComplexMatrix, f64)> = constraints
            .iter()
            .map(|(a, b)| {
                let mut ar = v_lift.dagger().matmul(a).matmul(&v_lift);
                ar.hermitize();
                (ar, *b)
            })
            .collect();
        (SdpProblem::new(c_res, cons_res)?, Some(v_lift))
    } else {
        (SdpProblem::new(c_lift, constraints)?, None)
    };

    let solution = solve(&problem, opts)?;
    finish_report(&flat, d_a, d_b, solution, isometry, dims3)
}

fn finish_report(
    flat: &DensityOperator,
    d_a: usize,
    d_b: usize,
    solution: SdpSolution,
    isometry: Option<ComplexMatrix>,
    dims3: SystemDims,
) -> Result<EminReport, EminError> {
    let omega_full = match &isometry {
        Some(v) => {
            let mut m = v.matmul(&solution.omega).matmul(&v.dagger());
            m.hermitize();
            m
        }
        None => solution.omega.clone(),
    };
    let overlap = solution.primal_value;
    let value_bits = -0.5 * overlap.max(f64::MIN_POSITIVE).log2();

    // sigma = Tr_B[w], relabeled from (A, B') to (A, B).
    let sigma_m = partial_trace(&omega_full, &dims3, &[0, 2])?;
    let optimal_sigma = DensityOperator::with_uniform_tolerance(
        sigma_m,
        SystemDims::new(vec![Part::new(Party::A, d_a), Part::new(Party::B, d_b)])?,
        1e-5,
    )?;
    // Residual of the defining marginal constraint.
    let marginal = partial_trace(&omega_full, &dims3, &[0, 1])?;
    let marginal_residual = marginal.sub(flat.matrix()).max_abs();

    Ok(EminReport {
        value_bits,
        overlap,
        optimal_extension: omega_full,
        extension_dims: dims3,
        optimal_sigma,
        solver_status: solution.status,
        solver_iterations: solution.iterations,
        marginal_residual,
        chain_value_bits: None,
    })
}

/// `Pi_{AB} (x) I` rearranged so that `Pi` acts on `(A, B')` in the
/// `A B B'` layout: `C[(a,b,b'),(a',c,c')] = Pi[(a,b'),(a',c')] d_{b,c}`.
fn lift_projector_to_abbp(pi: &ComplexMatrix, d_a: usize, d_b: usize) -> ComplexMatrix {
    let n = d_a * d_b * d_b;
    let mut c = ComplexMatrix::zeros(n, n);
    for a in 0..d_a {
        for ap in 0..d_a {
            for bp in 0..d_b {
                for cp in 0..d_b {
                    let v = pi[(a * d_b + bp, ap * d_b + cp)];
                    if v.norm_sqr() == 0.0 {
                        continue;
                    }
                    for b in 0..d_b {
                        c[((a * d_b + b) * d_b + bp, (ap * d_b + b) * d_b + cp)] = v;
                    }
                }
            }
        }
    }
    c
}

/// Min-unextendible entanglement of the doubly erased private state
/// built from `gamma`, reported together with the value implied by the
/// dephasing reduction `-1/2 log2(p 2^{-2 E(gamma)} + 1 - p)`.
pub fn emin_doubly_erased(
    gamma: &DensityOperator,
    p: f64,
    opts: &SolveOptions,
) -> Result<EminReport, EminError> {
    let eta = crate::states::doubly_erased_private(gamma, p)?;
    let mut report = emin_with(&eta, opts)?;
    let gamma_report = emin_with(gamma, opts)?;
    let inner = p * (2f64).powf(-2.0 * gamma_report.value_bits) + (1.0 - p);
    report.chain_value_bits = Some(-0.5 * inner.log2());
    Ok(report)
}

/// Decides super two-extendibility through the SDP optimum criterion:
/// member iff the optimal overlap reaches one within `membership_tol`.
pub fn is_super_two_extendible(
    rho: &DensityOperator,
    membership_tol: f64,
) -> Result<TwoExtSupVerdict, EminError> {
    let report = emin(rho, 1e-8)?;
    let leak = 1.0 - report.overlap;
    let is_member = leak <= membership_tol;
    Ok(TwoExtSupVerdict {
        is_member,
        witness: is_member.then(|| report.optimal_extension.clone()),
        leak,
        report,
    })
}

/// Lower bound `-1/2 log2(p/k^2 + 1 - p)` on the min-unextendible
/// entanglement of a doubly erased private state.
pub fn lemma1_bound(p: f64, k: usize) -> Result<f64, EminError> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(EminError::Domain {
            name: "p",
            value: p,
            domain: "[0, 1]",
        });
    }
    if k < 2 {
        return Err(EminError::Domain {
            name: "k",
            value: k as f64,
            domain: "k >= 2",
        });
    }
    Ok(-0.5 * (p / (k * k) as f64 + 1.0 - p).log2())
}

/// The explicit extension `w = p gamma_AB (x) [e]_E + (1-p) gamma_AE (x)
/// [e]_B` of an erased private state, with its two marginals verified:
/// `Tr_E[w]` is the erased private state at `p` and `Tr_B[w]` the one at
/// `1 - p`.
pub fn erased_private_witness(
    gamma: &DensityOperator,
    p: f64,
) -> Result<(ComplexMatrix, SystemDims), EminError> {
    if !(0.0..1.0).contains(&p) {
        return Err(EminError::Domain {
            name: "p",
            value: p,
            domain: "[0, 1)",
        });
    }
    let flat = gamma.grouped_bipartite()?;
    let d_a = flat.dims().parts()[0].dim;
    let d_b = flat.dims().parts()[1].dim;
    let eb = ErasureEmbedding::new(d_b);
    let ext = eb.extended_dim();

    // gamma embedded into (A, B_ext).
    let v = ComplexMatrix::identity(d_a).kron(&eb.isometry());
    let gamma_emb = v.matmul(flat.matrix()).matmul(&v.dagger());

    let term1 = gamma_emb.scale_re(p).kron(&eb.erased_proj());
    // (A, E_ext, B_ext) -> (A, B_ext, E_ext).
    let build_dims = SystemDims::new(vec![
        Part::new(Party::A, d_a),
        Part::erasure_extended(Party::B, ext),
        Part::erasure_extended(Party::B, ext),
    ])?;
    let (term2, _) = permute_systems(
        &gamma_emb.scale_re(1.0 - p).kron(&eb.erased_proj()),
        &build_dims,
        &[0, 2, 1],
    )?;
    let omega = term1.add(&term2);

    let eta_p = erased_private(&flat, p)?;
    let eta_q = erased_private(&flat, 1.0 - p)?;
    let marg_ab = partial_trace(&omega, &build_dims, &[0, 1])?;
    let dev_ab = marg_ab.sub(eta_p.matrix()).max_abs();
    if dev_ab > 1e-10 {
        return Err(EminError::WitnessMarginal {
            context: "Tr_E[w] differs from the erased private state",
            deviation: dev_ab,
        });
    }
    let marg_ae = partial_trace(&omega, &build_dims, &[0, 2])?;
    let dev_ae = marg_ae.sub(eta_q.matrix()).max_abs();
    if dev_ae > 1e-10 {
        return Err(EminError::WitnessMarginal {
            context: "Tr_B[w] differs from the complementary erased private state",
            deviation: dev_ae,
        });
    }
    Ok((omega, build_dims))
}

/// Witness for full-rank states: `rho (x) I/d_B'` extends `rho`, its
/// exchanged marginal is `rho_A (x) I/d_B'`, and `Pi^rho = I` makes the
/// overlap exactly one.
pub struct FullRankWitness {
    pub omega: ComplexMatrix,
    pub dims: SystemDims,
    pub sigma: DensityOperator,
    pub overlap: f64,
}

pub fn fullrank_witness(rho: &DensityOperator) -> Result<FullRankWitness, EminError> {
    let flat = rho.grouped_bipartite()?;
    let d_a = flat.dims().parts()[0].dim;
    let d_b = flat.dims().parts()[1].dim;
    let eig = hermitian_eig(flat.matrix())?;
    let lmin = eig.min_eigenvalue();
    if lmin <= SUPPORT_REL_TOL * eig.max_eigenvalue().max(0.0) {
        return Err(EminError::RankDeficient {
            min_eigenvalue: lmin,
        });
    }
    let omega = flat
        .matrix()
        .kron(&ComplexMatrix::identity(d_b).scale_re(1.0 / d_b as f64));
    let dims = SystemDims::new(vec![
        Part::new(Party::A, d_a),
        Part::new(Party::B, d_b),
        Part::new(Party::B, d_b),
    ])?;
    let rho_a = flat.marginal(Party::A)?;
    let sigma_m = rho_a.kron(&ComplexMatrix::identity(d_b).scale_re(1.0 / d_b as f64));
    let sigma = DensityOperator::with_uniform_tolerance(
        sigma_m.clone(),
        SystemDims::new(vec![Part::new(Party::A, d_a), Part::new(Party::B, d_b)])?,
        1e-9,
    )?;
    // Pi^rho = I for full-rank rho, so the overlap is Tr[sigma] = 1.
    let overlap = sigma_m.trace().re;
    Ok(FullRankWitness {
        omega,
        dims,
        sigma,
        overlap,
    })
}

/// Feasibility certificate for `sigma in F(gamma)`: searches for
/// `w >= 0` on `A B B'` with `Tr_B'[w] = gamma` and `Tr_B[w] = sigma`.
/// The reported residual is the max violation of either marginal at the
/// returned point; small residual certifies membership.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub residual: f64,
    pub omega: ComplexMatrix,
    pub status: SdpStatus,
}

pub fn extension_feasibility(
    gamma: &DensityOperator,
    sigma: &DensityOperator,
    opts: &SolveOptions,
) -> Result<FeasibilityReport, EminError> {
    let flat = gamma.grouped_bipartite()?;
    let sigma_flat = sigma.grouped_bipartite()?;
    let d_a = flat.dims().parts()[0].dim;
    let d_b = flat.dims().parts()[1].dim;
    if sigma_flat.dim() != d_a * d_b {
        return Err(EminError::Sdp(SdpError::MarginalMismatch(format!(
            "sigma dim {} does not match gamma dim {}",
            sigma_flat.dim(),
            d_a * d_b
        ))));
    }
    let n_full = d_a * d_b;
    let eig = hermitian_eig(flat.matrix())?;
    let cutoff = SUPPORT_REL_TOL * eig.max_eigenvalue().max(0.0);
    let kept: Vec<usize> = (0..n_full)
        .filter(|&i| eig.eigenvalues[i] > cutoff)
        .collect();
    let rank = kept.len();
    let var_dim = rank * d_b;
    if var_dim > VAR_DIM_CAP || d_a * d_b > MARGINAL_DIM_CAP {
        return Err(EminError::DimensionCap {
            var_dim,
            var_cap: VAR_DIM_CAP,
            marginal_dim: d_a * d_b,
            marginal_cap: MARGINAL_DIM_CAP,
        });
    }

    let dims3 = SystemDims::new(vec![
        Part::new(Party::A, d_a),
        Part::new(Party::B, d_b),
        Part::new(Party::B, d_b),
    ])?;
    let mut constraints = marginal_constraint_operators(&dims3, 2, flat.matrix())?;
    constraints.extend(marginal_constraint_operators(
        &dims3,
        1,
        sigma_flat.matrix(),
    )?);

    let n3 = d_a * d_b * d_b;
    let (problem, isometry) = if rank < n_full {
        let mut v_s = ComplexMatrix::zeros(n_full, rank);
        for (col, &i) in kept.iter().enumerate() {
            for r in 0..n_full {
                v_s[(r, col)] = eig.eigenvectors[(r, i)];
            }
        }
        let v_lift = v_s.kron(&ComplexMatrix::identity(d_b));
        let cons_res: Vec<(ComplexMatrix, f64)> = constraints
            .iter()
            .map(|(a, b)| {
                let mut ar = v_lift.dagger().matmul(a).matmul(&v_lift);
                ar.hermitize();
                (ar, *b)
            })
            .collect();
        (
            SdpProblem::new(ComplexMatrix::zeros(var_dim, var_dim), cons_res)?,
            Some(v_lift),
        )
    } else {
        (
            SdpProblem::new(ComplexMatrix::zeros(n3, n3), constraints)?,
            None,
        )
    };

    let solution = solve(&problem, opts)?;
    let omega = match &isometry {
        Some(v) => {
            let mut m = v.matmul(&solution.omega).matmul(&v.dagger());
            m.hermitize();
            m
        }
        None => solution.omega.clone(),
    };
    let marg_bp = partial_trace(&omega, &dims3, &[0, 1])?;
    let marg_b = partial_trace(&omega, &dims3, &[0, 2])?;
    let residual = marg_bp
        .sub(flat.matrix())
        .max_abs()
        .max(marg_b.sub(sigma_flat.matrix()).max_abs());
    Ok(FeasibilityReport {
        residual,
        omega,
        status: solution.status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        doubly_erased_private, erased_state, isotropic_state, max_entangled, private_state,
        werner_state, PrivateStateSpec,
    };

    const LEMMA1_HALF_2: f64 = 0.339_035_952_556_318_9;

    fn mixed_product() -> DensityOperator {
        // Fixed full-rank product state on 2 (x) 2.
        let a = ComplexMatrix::from_real(2, 2, &[0.7, 0.1, 0.1, 0.3]);
        let b = ComplexMatrix::from_real(2, 2, &[0.6, -0.15, -0.15, 0.4]);
        DensityOperator::new(a.kron(&b), SystemDims::bipartite(2, 2)).unwrap()
    }

    #[test]
    fn emin_of_maxent_is_one_bit() {
        let phi = max_entangled(2).unwrap();
        let report = emin(&phi, 1e-8).unwrap();
        assert_eq!(report.solver_status, SdpStatus::Optimal);
        assert!(
            (report.value_bits - 1.0).abs() < 1e-4,
            "emin = {}",
            report.value_bits
        );
        assert!((report.overlap - 0.25).abs() < 1e-6);
        assert!(report.marginal_residual < 1e-6);
    }

    #[test]
    fn emin_of_product_state_is_zero() {
        let report = emin(&mixed_product(), 1e-8).unwrap();
        assert!(report.value_bits.abs() < 1e-6, "emin = {}", report.value_bits);
        assert!(report.value_bits >= -1e-6);
    }

    #[test]
    fn emin_of_werner_interior_is_zero() {
        let w = werner_state(0.7, 2).unwrap();
        let report = emin(&w, 1e-8).unwrap();
        assert!(report.value_bits.abs() < 1e-6, "emin = {}", report.value_bits);
    }

    #[test]
    fn emin_report_internal_consistency() {
        let phi = max_entangled(2).unwrap();
        let report = emin(&phi, 1e-8).unwrap();
        let recomputed = -0.5 * report.overlap.log2();
        assert!((report.value_bits - recomputed).abs() < 1e-10);
        // sigma really is the B-marginal of the extension, relabeled.
        let sigma2 = partial_trace(
            &report.optimal_extension,
            &report.extension_dims,
            &[0, 2],
        )
        .unwrap();
        assert!(sigma2.sub(report.optimal_sigma.matrix()).max_abs() < 1e-9);
    }

    #[test]
    fn doubly_erased_chain_value() {
        let phi = max_entangled(2).unwrap();
        let report = emin_doubly_erased(&phi, 0.5, &SolveOptions::default()).unwrap();
        assert!(
            (report.value_bits - LEMMA1_HALF_2).abs() < 1e-4,
            "emin = {}",
            report.value_bits
        );
        let chain = report.chain_value_bits.unwrap();
        assert!((report.value_bits - chain).abs() < 5e-4);
    }

    #[test]
    fn lemma1_bound_values() {
        assert_eq!(lemma1_bound(0.0, 2).unwrap(), 0.0);
        assert!((lemma1_bound(1.0, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((lemma1_bound(1.0, 3).unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!((lemma1_bound(0.5, 2).unwrap() - LEMMA1_HALF_2).abs() < 1e-12);
        assert!(lemma1_bound(1.5, 2).is_err());
        assert!(lemma1_bound(0.5, 1).is_err());
    }

    #[test]
    fn membership_verdicts() {
        let erased = erased_state(0.9, 2).unwrap();
        let v = is_super_two_extendible(&erased, MEMBERSHIP_TOL).unwrap();
        assert!(v.is_member, "leak = {}", v.leak);
        assert!(v.witness.is_some());

        let phi = max_entangled(2).unwrap();
        let v = is_super_two_extendible(&phi, MEMBERSHIP_TOL).unwrap();
        assert!(!v.is_member);
        assert!((v.leak - 0.75).abs() < 1e-5, "leak = {}", v.leak);

        let v = is_super_two_extendible(&mixed_product(), MEMBERSHIP_TOL).unwrap();
        assert!(v.is_member);
    }

    #[test]
    fn erased_private_witness_marginals() {
        let phi = max_entangled(2).unwrap();
        let (omega, dims) = erased_private_witness(&phi, 0.5).unwrap();
        // At p = 1/2 both marginals coincide.
        let m1 = partial_trace(&omega, &dims, &[0, 1]).unwrap();
        let m2 = partial_trace(&omega, &dims, &[0, 2]).unwrap();
        assert!(m1.sub(&m2).max_abs() < 1e-12);

        // p = 0: w = gamma_AE (x) [e]_B, the AB marginal is a product.
        let (omega, dims) = erased_private_witness(&phi, 0.0).unwrap();
        let m_ab = partial_trace(&omega, &dims, &[0, 1]).unwrap();
        let expect = erased_state(0.0, 2).unwrap();
        assert!(m_ab.sub(expect.matrix()).max_abs() < 1e-12);

        assert!(erased_private_witness(&phi, 1.0).is_err());
    }

    #[test]
    fn fullrank_witness_certifies_membership() {
        for rho in [werner_state(0.3, 2).unwrap(), isotropic_state(0.5, 2).unwrap()] {
            let w = fullrank_witness(&rho).unwrap();
            assert!((w.overlap - 1.0).abs() < 1e-10);
            // Marginal check: Tr_B'[w] = rho.
            let marg = partial_trace(&w.omega, &w.dims, &[0, 1]).unwrap();
            assert!(marg.sub(rho.matrix()).max_abs() < 1e-12);
        }
        let phi = max_entangled(2).unwrap();
        assert!(matches!(
            fullrank_witness(&phi),
            Err(EminError::RankDeficient { .. })
        ));
    }

    #[test]
    fn feasibility_certifies_fullrank_sigma() {
        // sigma = rho_A (x) I/d is in F(rho) for any rho (canonical
        // extension rho (x) I/d).
        let rho = werner_state(0.4, 2).unwrap();
        let w = fullrank_witness(&rho).unwrap();
        let report = extension_feasibility(&rho, &w.sigma, &SolveOptions::default()).unwrap();
        assert!(report.residual < 1e-6, "residual {}", report.residual);
    }

    #[test]
    fn feasibility_rejects_impossible_sigma() {
        // For pure Phi^2 every sigma in F is I/2 (x) chi; Phi itself is not.
        let phi = max_entangled(2).unwrap();
        let report = extension_feasibility(&phi, &phi, &SolveOptions::default()).unwrap();
        assert!(report.residual > 1e-3, "residual {}", report.residual);
    }

    #[test]
    fn privacy_bound_for_default_private_state() {
        let spec = PrivateStateSpec::with_defaults(2, (2, 2)).unwrap();
        let gamma = private_state(&spec).unwrap();
        let report = emin(&gamma, 1e-8).unwrap();
        assert!(
            report.value_bits >= 1.0 - 1e-4,
            "emin = {}",
            report.value_bits
        );
    }

    #[test]
    fn dimension_cap_enforced() {
        // 4 (x) 4 full-rank tensor square exceeds the lifted cap.
        let w = werner_state(0.5, 2).unwrap();
        let big = w.tensor_bipartite(&w).unwrap().tensor_bipartite(&w).unwrap();
        assert!(matches!(
            emin(&big, 1e-8),
            Err(EminError::DimensionCap { .. })
        ));
    }

    #[test]
    fn doubly_erased_p_limits() {
        let phi = max_entangled(2).unwrap();
        let eta0 = doubly_erased_private(&phi, 0.0).unwrap();
        let r = emin(&eta0, 1e-8).unwrap();
        assert!(r.value_bits.abs() < 1e-6);
        let eta1 = doubly_erased_private(&phi, 1.0).unwrap();
        let r = emin(&eta1, 1e-8).unwrap();
        assert!((r.value_bits - 1.0).abs() < 1e-4);
    }
}
