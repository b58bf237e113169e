//! Quantum channels used in the constructions and proofs: the partially
//! dephasing channel, flag copy/retrieval/randomization channels, and a
//! catalogue of concrete one-way LOCC channels for monotonicity tests.
//!
//! Classical flags are realized as diagonal blocks of an explicit dim-2
//! subsystem. Convention used throughout this module: a flag part is the
//! *first* part of its party, so a flagged layout reads
//! `[X_A, A', ...]` on Alice's side and `[X_B, B', ...]` on Bob's.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{hermitian_eig, ComplexMatrix, LinalgError, Part, Party, SystemDims};
use crate::states::{sector_coherence, DensityOperator, ErasureEmbedding, StateError};

/// Completeness tolerance for Kraus sets (`sum K^dag K = I`).
pub const KRAUS_COMPLETENESS_TOL: f64 = 1e-10;
/// Choi-matrix PSD tolerance for the complete-positivity check.
pub const CHOI_PSD_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("Kraus set is not trace preserving (completeness deviation {deviation:.3e})")]
    Incomplete { deviation: f64 },
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("party {party:?} is not erasure-extended")]
    NotErasureExtended { party: Party },
    #[error("input layout is missing a flag subsystem: {0}")]
    MissingFlag(&'static str),
    #[error(
        "input carries coherence across erasure sectors (magnitude {magnitude:.3e}); \
         flag retrieval is only defined on sector-diagonal states"
    )]
    SectorCoherence { magnitude: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A completely positive trace-preserving map in Kraus form. Kraus
/// operators may be rectangular (output dim x input dim).
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus_ops: Vec<ComplexMatrix>,
    in_dims: SystemDims,
    out_dims: SystemDims,
}

impl KrausChannel {
    pub fn new(
        kraus_ops: Vec<ComplexMatrix>,
        in_dims: SystemDims,
        out_dims: SystemDims,
    ) -> Result<Self, ChannelError> {
        let din = in_dims.total_dim();
        let dout = out_dims.total_dim();
        for k in &kraus_ops {
            if k.rows() != dout || k.cols() != din {
                return Err(ChannelError::DimensionMismatch {
                    context: "Kraus operator shape",
                    expected: dout,
                    got: k.rows(),
                });
            }
        }
        let mut sum = ComplexMatrix::zeros(din, din);
        for k in &kraus_ops {
            sum = sum.add(&k.dagger().matmul(k));
        }
        let deviation = sum.sub(&ComplexMatrix::identity(din)).max_abs();
        if deviation > KRAUS_COMPLETENESS_TOL {
            return Err(ChannelError::Incomplete { deviation });
        }
        Ok(Self {
            kraus_ops,
            in_dims,
            out_dims,
        })
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn in_dims(&self) -> &SystemDims {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &SystemDims {
        &self.out_dims
    }

    /// Applies the channel: `rho -> sum_k K rho K^dag`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator, ChannelError> {
        if rho.dim() != self.in_dims.total_dim() {
            return Err(ChannelError::DimensionMismatch {
                context: "channel input",
                expected: self.in_dims.total_dim(),
                got: rho.dim(),
            });
        }
        let dout = self.out_dims.total_dim();
        let mut out = ComplexMatrix::zeros(dout, dout);
        for k in &self.kraus_ops {
            let krho = k.matmul(rho.matrix());
            out = out.add(&krho.matmul(&k.dagger()));
        }
        Ok(DensityOperator::with_uniform_tolerance(
            out,
            self.out_dims.clone(),
            1e-9,
        )?)
    }

    /// Composition `next o self` (this channel first).
    ///
    /// Kraus products with negligible norm are pruned; the completeness
    /// sum is unaffected at working precision.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel, ChannelError> {
        if next.in_dims.total_dim() != self.out_dims.total_dim() {
            return Err(ChannelError::DimensionMismatch {
                context: "channel composition",
                expected: self.out_dims.total_dim(),
                got: next.in_dims.total_dim(),
            });
        }
        let mut ops = Vec::new();
        for second in &next.kraus_ops {
            for first in &self.kraus_ops {
                let prod = second.matmul(first);
                if prod.frobenius_norm() > 1e-14 {
                    ops.push(prod);
                }
            }
        }
        KrausChannel::new(ops, self.in_dims.clone(), next.out_dims.clone())
    }

    /// Choi matrix on (input (x) output), `C[(i,m),(j,n)] = sum_k
    /// K[m,i] conj(K[n,j])`. PSD for any Kraus set; `Tr_out C = I_in`
    /// iff the channel is trace preserving.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let din = self.in_dims.total_dim();
        let dout = self.out_dims.total_dim();
        let mut c = ComplexMatrix::zeros(din * dout, din * dout);
        for k in &self.kraus_ops {
            for i in 0..din {
                for m in 0..dout {
                    let a = k[(m, i)];
                    if a.norm_sqr() == 0.0 {
                        continue;
                    }
                    for j in 0..din {
                        for n in 0..dout {
                            c[(i * dout + m, j * dout + n)] += a * k[(n, j)].conj();
                        }
                    }
                }
            }
        }
        c
    }

    /// Well-formedness check: Choi PSD within tolerance and
    /// trace-preserving marginal.
    pub fn verify_cptp(&self) -> Result<(), ChannelError> {
        let choi = self.choi_matrix();
        let eig = hermitian_eig(&choi)?;
        let scale = eig.max_eigenvalue().max(1.0);
        if eig.min_eigenvalue() < -CHOI_PSD_TOL * scale {
            return Err(ChannelError::Linalg(LinalgError::NotPsd {
                min_eigenvalue: eig.min_eigenvalue(),
            }));
        }
        let din = self.in_dims.total_dim();
        let dout = self.out_dims.total_dim();
        let choi_dims = SystemDims::new(vec![
            Part::new(Party::A, din),
            Part::new(Party::B, dout),
        ])?;
        let marg = crate::linalg::partial_trace(&choi, &choi_dims, &[0])?;
        let dev = marg.sub(&ComplexMatrix::identity(din)).max_abs();
        if dev > KRAUS_COMPLETENESS_TOL {
            return Err(ChannelError::Incomplete { deviation: dev });
        }
        Ok(())
    }
}

/// Identity channel on the given layout.
pub fn identity_channel(dims: &SystemDims) -> KrausChannel {
    let d = dims.total_dim();
    KrausChannel::new(
        vec![ComplexMatrix::identity(d)],
        dims.clone(),
        dims.clone(),
    )
    .expect("identity is CPTP")
}

fn single_part_of(dims: &SystemDims, party: Party) -> Result<(usize, Part), ChannelError> {
    let idx = dims.indices_of(party);
    if idx.len() != 1 {
        return Err(ChannelError::MissingFlag(
            "expected exactly one part for the party",
        ));
    }
    Ok((idx[0], dims.parts()[idx[0]]))
}

/// Kraus operator acting as `op` on part `target` and identity elsewhere.
fn lift_to_part(dims: &SystemDims, target: usize, op: &ComplexMatrix) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(1);
    for (i, part) in dims.parts().iter().enumerate() {
        if i == target {
            m = m.kron(op);
        } else {
            m = m.kron(&ComplexMatrix::identity(part.dim));
        }
    }
    m
}

/// Partially dephasing channel `Pi_A (.) Pi_A + [e]_A (.) [e]_A` on the
/// erasure-extended part of the given party, identity on everything else.
pub fn partial_dephasing(dims: &SystemDims, party: Party) -> Result<KrausChannel, ChannelError> {
    let target = dims
        .parts()
        .iter()
        .position(|p| p.party == party && p.erasure_extended)
        .ok_or(ChannelError::NotErasureExtended { party })?;
    let emb = ErasureEmbedding::new(dims.parts()[target].dim - 1);
    let ops = vec![
        lift_to_part(dims, target, &emb.base_proj()),
        lift_to_part(dims, target, &emb.erased_proj()),
    ];
    KrausChannel::new(ops, dims.clone(), dims.clone())
}

/// Local flag-retrieval channel for a doubly erased state.
///
/// Each party measures the POVM `{Pi, [e]}` on its erasure-extended
/// system; on `Pi` the unerased payload is kept (truncated to the base
/// space), on `[e]` it is replaced with the maximally mixed state. Only
/// Alice's flag is kept, as a leading dim-2 part of her side. On
/// `eta^{p,k}` the output is
/// `p [1] (x) gamma + (1-p) [0] (x) I/(d_A d_B)`.
pub fn flag_retrieval(dims: &SystemDims) -> Result<KrausChannel, ChannelError> {
    dims.require_bipartite()?;
    let (ia, part_a) = single_part_of(dims, Party::A)?;
    let (ib, part_b) = single_part_of(dims, Party::B)?;
    if !part_a.erasure_extended {
        return Err(ChannelError::NotErasureExtended { party: Party::A });
    }
    if !part_b.erasure_extended {
        return Err(ChannelError::NotErasureExtended { party: Party::B });
    }
    if ia > ib {
        return Err(ChannelError::MissingFlag("layout must list A before B"));
    }
    let d_a = part_a.dim - 1;
    let d_b = part_b.dim - 1;
    let ea = ErasureEmbedding::new(d_a);
    let eb = ErasureEmbedding::new(d_b);

    // Alice: (d_A + 1) -> X_A (x) A'.
    let ket = |d: usize, i: usize| ComplexMatrix::basis_ket(d, i);
    let mut alice: Vec<ComplexMatrix> = Vec::new();
    alice.push(ket(2, 1).kron(&ea.isometry().dagger()));
    let bra_e = ket(d_a + 1, ea.erased_index()).dagger();
    for m in 0..d_a {
        alice.push(
            ket(2, 0)
                .kron(&ket(d_a, m).matmul(&bra_e))
                .scale_re(1.0 / (d_a as f64).sqrt()),
        );
    }
    // Bob: (d_B + 1) -> B' (his flag is produced and discarded locally).
    let mut bob: Vec<ComplexMatrix> = Vec::new();
    bob.push(eb.isometry().dagger());
    let bra_eb = ket(d_b + 1, eb.erased_index()).dagger();
    for m in 0..d_b {
        bob.push(ket(d_b, m).matmul(&bra_eb).scale_re(1.0 / (d_b as f64).sqrt()));
    }

    let mut ops = Vec::new();
    for ka in &alice {
        for kb in &bob {
            ops.push(ka.kron(kb));
        }
    }
    let out_dims = SystemDims::new(vec![
        Part::new(Party::A, 2),
        Part::new(Party::A, d_a),
        Part::new(Party::B, d_b),
    ])?;
    KrausChannel::new(ops, dims.clone(), out_dims)
}

/// Applies flag retrieval after rejecting inputs that carry coherence
/// across the erasure sectors (those fall outside the erased-state
/// correspondence and must not be silently truncated).
pub fn flag_retrieval_apply(rho: &DensityOperator) -> Result<DensityOperator, ChannelError> {
    let grouped = rho.grouped_bipartite()?;
    let magnitude = sector_coherence(&grouped);
    if magnitude > 1e-10 {
        return Err(ChannelError::SectorCoherence { magnitude });
    }
    flag_retrieval(grouped.dims())?.apply(&grouped)
}

/// Classical copy of Alice's flag to a fresh Bob-side flag:
/// `[X_A, A', B'] -> [X_A, A', X_B, B']`. Copying is in the computational
/// basis, so flag coherences are destroyed.
pub fn flag_copy(dims: &SystemDims) -> Result<KrausChannel, ChannelError> {
    let parts = dims.parts();
    if parts.len() != 3
        || parts[0].party != Party::A
        || parts[0].dim != 2
        || parts[1].party != Party::A
        || parts[2].party != Party::B
    {
        return Err(ChannelError::MissingFlag(
            "flag_copy expects layout [X_A(2), A', B']",
        ));
    }
    let d_a = parts[1].dim;
    let d_b = parts[2].dim;
    let mut ops = Vec::new();
    for i in 0..2 {
        let proj = ComplexMatrix::basis_op(2, i, i);
        let insert = ComplexMatrix::basis_ket(2, i);
        ops.push(
            proj.kron(&ComplexMatrix::identity(d_a))
                .kron(&insert)
                .kron(&ComplexMatrix::identity(d_b)),
        );
    }
    let out_dims = SystemDims::new(vec![
        Part::new(Party::A, 2),
        Part::new(Party::A, d_a),
        Part::new(Party::B, 2),
        Part::new(Party::B, d_b),
    ])?;
    KrausChannel::new(ops, dims.clone(), out_dims)
}

/// Failure randomization after a flag copy: on layout
/// `[X_A, A', X_B, B']` each party keeps its payload on flag 1 and
/// replaces it with the maximally mixed state on flag 0; Bob's flag copy
/// is then traced out, returning `[X_A, A', B']`.
pub fn failure_randomize(dims: &SystemDims) -> Result<KrausChannel, ChannelError> {
    let parts = dims.parts();
    if parts.len() != 4
        || parts[0].party != Party::A
        || parts[0].dim != 2
        || parts[1].party != Party::A
        || parts[2].party != Party::B
        || parts[2].dim != 2
        || parts[3].party != Party::B
    {
        return Err(ChannelError::MissingFlag(
            "failure_randomize expects layout [X_A(2), A', X_B(2), B']",
        ));
    }
    let d_a = parts[1].dim;
    let d_b = parts[3].dim;

    // Local replace-on-flag-0 channel on (flag, payload).
    let local = |d: usize| -> Vec<ComplexMatrix> {
        let mut ops = Vec::new();
        ops.push(ComplexMatrix::basis_op(2, 1, 1).kron(&ComplexMatrix::identity(d)));
        for m in 0..d {
            for f in 0..d {
                let replace = ComplexMatrix::basis_ket(d, m)
                    .matmul(&ComplexMatrix::basis_ket(d, f).dagger())
                    .scale_re(1.0 / (d as f64).sqrt());
                ops.push(ComplexMatrix::basis_op(2, 0, 0).kron(&replace));
            }
        }
        ops
    };

    let alice = local(d_a);
    let bob = local(d_b);
    let mut ops = Vec::new();
    for b_flag in 0..2usize {
        // Tracing out X_B: project Bob's flag onto |b>.
        let bra = ComplexMatrix::basis_ket(2, b_flag).dagger();
        let discard = ComplexMatrix::identity(2 * d_a)
            .kron(&bra)
            .kron(&ComplexMatrix::identity(d_b));
        for ka in &alice {
            for kb in &bob {
                let full = discard.matmul(&ka.kron(kb));
                if full.frobenius_norm() > 1e-14 {
                    ops.push(full);
                }
            }
        }
    }
    let out_dims = SystemDims::new(vec![
        Part::new(Party::A, 2),
        Part::new(Party::A, d_a),
        Part::new(Party::B, d_b),
    ])?;
    KrausChannel::new(ops, dims.clone(), out_dims)
}

/// The failure-randomization pipeline `failure_randomize o flag_copy` on
/// a flagged state `[X_A, A', B']`.
pub fn failure_randomize_pipeline(dims: &SystemDims) -> Result<KrausChannel, ChannelError> {
    let copy = flag_copy(dims)?;
    let fr = failure_randomize(copy.out_dims())?;
    copy.then(&fr)
}

/// A named entry of the one-way LOCC catalogue.
pub struct LoccCatalogueEntry {
    pub name: &'static str,
    pub channel: KrausChannel,
}

/// Fixed catalogue of concrete one-way LOCC channels valid for the given
/// (flat `[A, B]`) input layout:
///
/// (a) Alice measures the computational basis and sends the outcome; Bob
///     applies a conditional cyclic shift.
/// (b) local unitaries (discrete Fourier transforms on both sides).
/// (c) Alice discards her system and prepares `|0>` (a replacement
///     channel, no communication).
/// (d) for doubly-erased layouts: flag retrieval followed by flag copy
///     and failure randomization.
pub fn one_way_locc_examples(dims: &SystemDims) -> Result<Vec<LoccCatalogueEntry>, ChannelError> {
    dims.require_bipartite()?;
    let (ia, part_a) = single_part_of(dims, Party::A)?;
    let (_, part_b) = single_part_of(dims, Party::B)?;
    if ia != 0 {
        return Err(ChannelError::MissingFlag(
            "catalogue expects a flat [A, B] layout",
        ));
    }
    let d_a = part_a.dim;
    let d_b = part_b.dim;
    let mut entries = Vec::new();

    // (a) measure-and-correct.
    let shift_b = crate::states::shift_operator(d_b);
    let mut ops = Vec::new();
    for i in 0..d_a {
        let mut u = ComplexMatrix::identity(d_b);
        for _ in 0..(i % d_b) {
            u = shift_b.matmul(&u);
        }
        ops.push(ComplexMatrix::basis_op(d_a, i, i).kron(&u));
    }
    entries.push(LoccCatalogueEntry {
        name: "measure_send_correct",
        channel: KrausChannel::new(ops, dims.clone(), dims.clone())?,
    });

    // (b) local unitaries.
    let u = fourier_unitary(d_a).kron(&fourier_unitary(d_b));
    entries.push(LoccCatalogueEntry {
        name: "local_unitaries",
        channel: KrausChannel::new(vec![u], dims.clone(), dims.clone())?,
    });

    // (c) Alice discards and reprepares |0>.
    let mut ops = Vec::new();
    for f in 0..d_a {
        let replace =
            ComplexMatrix::basis_ket(d_a, 0).matmul(&ComplexMatrix::basis_ket(d_a, f).dagger());
        ops.push(replace.kron(&ComplexMatrix::identity(d_b)));
    }
    entries.push(LoccCatalogueEntry {
        name: "discard_and_prepare",
        channel: KrausChannel::new(ops, dims.clone(), dims.clone())?,
    });

    // (d) flag pipeline, when both parties are erasure-extended.
    if part_a.erasure_extended && part_b.erasure_extended {
        let retrieve = flag_retrieval(dims)?;
        let pipeline = failure_randomize_pipeline(retrieve.out_dims())?;
        entries.push(LoccCatalogueEntry {
            name: "flag_retrieval_pipeline",
            channel: retrieve.then(&pipeline)?,
        });
    }
    Ok(entries)
}

/// Discrete Fourier transform unitary on `d` levels.
fn fourier_unitary(d: usize) -> ComplexMatrix {
    let scale = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |r, c| {
        let phase = 2.0 * std::f64::consts::PI * (r * c) as f64 / d as f64;
        Complex64::new(phase.cos() * scale, phase.sin() * scale)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        doubly_erased_private, max_entangled, private_state, DensityOperator, PrivateStateSpec,
    };
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_density(n: usize, rng: &mut StdRng) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let m = g.matmul(&g.dagger());
        let t = m.trace().re;
        m.scale_re(1.0 / t)
    }

    #[test]
    fn identity_channel_preserves_input() {
        let phi = max_entangled(2).unwrap();
        let ch = identity_channel(phi.dims());
        let out = ch.apply(&phi).unwrap();
        assert!(out.matrix().sub(phi.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn full_dephasing_of_plus_state() {
        let dims = SystemDims::new(vec![Part::new(Party::A, 2)]).unwrap();
        let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let rho = DensityOperator::new(plus, dims.clone()).unwrap();
        let ops = (0..2)
            .map(|i| ComplexMatrix::basis_op(2, i, i))
            .collect::<Vec<_>>();
        let ch = KrausChannel::new(ops, dims.clone(), dims).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!(out
            .matrix()
            .sub(&ComplexMatrix::identity(2).scale_re(0.5))
            .max_abs()
            < 1e-14);
    }

    #[test]
    fn replacement_channel_outputs_maximally_mixed() {
        let mut rng = StdRng::seed_from_u64(2);
        let dims = SystemDims::new(vec![Part::new(Party::A, 3)]).unwrap();
        let mut ops = Vec::new();
        for m in 0..3 {
            for f in 0..3 {
                ops.push(
                    ComplexMatrix::basis_ket(3, m)
                        .matmul(&ComplexMatrix::basis_ket(3, f).dagger())
                        .scale_re(1.0 / 3f64.sqrt()),
                );
            }
        }
        let ch = KrausChannel::new(ops, dims.clone(), dims.clone()).unwrap();
        let rho = DensityOperator::new(random_density(3, &mut rng), dims).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!(out
            .matrix()
            .sub(&ComplexMatrix::identity(3).scale_re(1.0 / 3.0))
            .max_abs()
            < 1e-12);
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let dims = SystemDims::new(vec![Part::new(Party::A, 2)]).unwrap();
        let err = KrausChannel::new(
            vec![ComplexMatrix::identity(2).scale_re(0.4)],
            dims.clone(),
            dims,
        );
        assert!(matches!(err, Err(ChannelError::Incomplete { .. })));
    }

    #[test]
    fn dephasing_fixes_doubly_erased_state() {
        let phi = max_entangled(2).unwrap();
        let eta = doubly_erased_private(&phi, 0.5).unwrap();
        let ch = partial_dephasing(eta.dims(), Party::A).unwrap();
        let out = ch.apply(&eta).unwrap();
        assert!(out.matrix().sub(eta.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn dephasing_kills_cross_sector_coherence() {
        // Pure superposition of a base level and the erased level of A.
        let dims = SystemDims::new(vec![
            Part::erasure_extended(Party::A, 3),
            Part::new(Party::B, 1),
        ])
        .unwrap();
        let mut psi = ComplexMatrix::zeros(3, 1);
        psi[(0, 0)] = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
        psi[(2, 0)] = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
        let rho = DensityOperator::new(psi.matmul(&psi.dagger()), dims.clone()).unwrap();
        let ch = partial_dephasing(&dims, Party::A).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!(out.matrix()[(0, 2)].norm() < 1e-14);
        assert!((out.matrix()[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((out.matrix()[(2, 2)].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn dephasing_completeness_and_idempotence() {
        let phi = max_entangled(2).unwrap();
        let eta = doubly_erased_private(&phi, 0.3).unwrap();
        let ch = partial_dephasing(eta.dims(), Party::A).unwrap();
        // Pi + [e] = I on d_A + 1.
        let mut sum = ComplexMatrix::zeros(9, 9);
        for k in ch.kraus_ops() {
            sum = sum.add(&k.dagger().matmul(k));
        }
        assert!(sum.sub(&ComplexMatrix::identity(9)).max_abs() < 1e-14);

        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..3 {
            let rho =
                DensityOperator::new(random_density(9, &mut rng), eta.dims().clone()).unwrap();
            let once = ch.apply(&rho).unwrap();
            let twice = ch.apply(&once).unwrap();
            assert!(twice.matrix().sub(once.matrix()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn flag_retrieval_on_doubly_erased_state() {
        let phi = max_entangled(2).unwrap();
        for p in [0.5, 1.0, 0.0] {
            let eta = doubly_erased_private(&phi, p).unwrap();
            let out = flag_retrieval_apply(&eta).unwrap();
            // Expected: p [1](x)gamma + (1-p) [0](x)I/4 on [X_A, A', B'].
            let mut expect = ComplexMatrix::zeros(8, 8);
            for r in 0..4 {
                for c in 0..4 {
                    expect[(4 + r, 4 + c)] = phi.matrix()[(r, c)].scale(p);
                }
                expect[(r, r)] += Complex64::new((1.0 - p) / 4.0, 0.0);
            }
            assert!(out.matrix().sub(&expect).max_abs() < 1e-12);
            // Flag marginal.
            let flag = crate::linalg::partial_trace(out.matrix(), out.dims(), &[0]).unwrap();
            assert!((flag[(0, 0)].re - (1.0 - p)).abs() < 1e-12);
            assert!((flag[(1, 1)].re - p).abs() < 1e-12);
        }
    }

    #[test]
    fn flag_retrieval_rejects_cross_sector_coherence() {
        let phi = max_entangled(2).unwrap();
        let eta = doubly_erased_private(&phi, 0.5).unwrap();
        let mut m = eta.matrix().clone();
        let i = eta.dims().flatten(&[0, 0]);
        let j = eta.dims().flatten(&[2, 2]);
        m[(i, j)] = Complex64::new(0.1, 0.0);
        m[(j, i)] = Complex64::new(0.1, 0.0);
        let bad = DensityOperator::with_uniform_tolerance(m, eta.dims().clone(), 1e-1).unwrap();
        assert!(matches!(
            flag_retrieval_apply(&bad),
            Err(ChannelError::SectorCoherence { .. })
        ));
    }

    /// Flagged layout [X_A(2), A'(2), B'(2)] carrying q [1](x)gamma +
    /// (1-q) [0](x)sigma.
    fn flagged_state(q: f64, sigma: &ComplexMatrix) -> DensityOperator {
        let phi = max_entangled(2).unwrap();
        let dims = SystemDims::new(vec![
            Part::new(Party::A, 2),
            Part::new(Party::A, 2),
            Part::new(Party::B, 2),
        ])
        .unwrap();
        let one = ComplexMatrix::basis_op(2, 1, 1);
        let zero = ComplexMatrix::basis_op(2, 0, 0);
        let m = one
            .kron(phi.matrix())
            .scale_re(q)
            .add(&zero.kron(sigma).scale_re(1.0 - q));
        DensityOperator::new(m, dims).unwrap()
    }

    #[test]
    fn failure_randomize_matches_replacement_form() {
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..3 {
            let q: f64 = rng.gen_range(0.0..1.0);
            let sigma = random_density(4, &mut rng);
            let input = flagged_state(q, &sigma);
            let pipeline = failure_randomize_pipeline(input.dims()).unwrap();
            let out = pipeline.apply(&input).unwrap();
            let expect = flagged_state(q, &ComplexMatrix::identity(4).scale_re(0.25));
            assert!(out.matrix().sub(expect.matrix()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn failure_randomize_q1_identity_and_idempotent() {
        let mut rng = StdRng::seed_from_u64(13);
        let sigma = random_density(4, &mut rng);
        let input = flagged_state(1.0, &sigma);
        let pipeline = failure_randomize_pipeline(input.dims()).unwrap();
        let out = pipeline.apply(&input).unwrap();
        assert!(out.matrix().sub(input.matrix()).max_abs() < 1e-12);

        // Idempotence on arbitrary (even flag-coherent) inputs.
        for _ in 0..3 {
            let rho =
                DensityOperator::new(random_density(8, &mut rng), input.dims().clone()).unwrap();
            let once = pipeline.apply(&rho).unwrap();
            let twice = pipeline.apply(&once).unwrap();
            assert!(twice.matrix().sub(once.matrix()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn failure_randomize_requires_flag_layout() {
        let dims = SystemDims::bipartite(2, 2);
        assert!(matches!(
            failure_randomize(&dims),
            Err(ChannelError::MissingFlag(_))
        ));
        assert!(matches!(
            flag_copy(&dims),
            Err(ChannelError::MissingFlag(_))
        ));
    }

    #[test]
    fn catalogue_channels_are_cptp() {
        let phi = max_entangled(2).unwrap();
        let eta = doubly_erased_private(&phi, 0.5).unwrap();
        for dims in [phi.dims().clone(), eta.dims().clone()] {
            let entries = one_way_locc_examples(&dims).unwrap();
            for entry in &entries {
                entry
                    .channel
                    .verify_cptp()
                    .unwrap_or_else(|e| panic!("{} not CPTP: {e}", entry.name));
            }
        }
    }

    #[test]
    fn catalogue_includes_flag_pipeline_only_when_extended() {
        let phi = max_entangled(2).unwrap();
        let entries = one_way_locc_examples(phi.dims()).unwrap();
        assert_eq!(entries.len(), 3);
        let eta = doubly_erased_private(&phi, 0.5).unwrap();
        let entries = one_way_locc_examples(eta.dims()).unwrap();
        assert_eq!(entries.len(), 4);
    }

    #[test]
    fn measure_send_correct_gives_product_on_maxent() {
        let phi = max_entangled(2).unwrap();
        let entries = one_way_locc_examples(phi.dims()).unwrap();
        let out = entries[0].channel.apply(&phi).unwrap();
        // Expected I/2 (x) [0].
        let mut expect = ComplexMatrix::zeros(4, 4);
        expect[(0, 0)] = Complex64::new(0.5, 0.0);
        expect[(2, 2)] = Complex64::new(0.5, 0.0);
        assert!(out.matrix().sub(&expect).max_abs() < 1e-13);
    }

    #[test]
    fn flag_pipeline_reproduces_flag_form_from_eta() {
        let spec = PrivateStateSpec::trivial_shield(2).unwrap();
        let gamma = private_state(&spec).unwrap();
        let eta = doubly_erased_private(&gamma, 0.5).unwrap();
        let entries = one_way_locc_examples(eta.dims()).unwrap();
        let pipeline = entries
            .iter()
            .find(|e| e.name == "flag_retrieval_pipeline")
            .unwrap();
        let out = pipeline.channel.apply(&eta).unwrap();
        let expect = flagged_state(0.5, &ComplexMatrix::identity(4).scale_re(0.25));
        assert!(out.matrix().sub(expect.matrix()).max_abs() < 1e-12);
    }
}
