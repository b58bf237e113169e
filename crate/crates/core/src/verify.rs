//! Theorem-verification harness: batch suites that numerically confirm
//! each labeled result and emit a pass/fail report with measured slacks.
//!
//! Every case records its input descriptor, the measured value, the
//! bound or target it is held against, and the remaining slack; a case
//! passes exactly when its slack is non-negative. Solver failures are
//! recorded per case and never abort a suite. With a fixed seed the
//! whole report is deterministic.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::channels::{failure_randomize_pipeline, one_way_locc_examples, partial_dephasing};
use crate::emin::{
    emin_with, erased_private_witness, extension_feasibility, fullrank_witness, lemma1_bound,
    MEMBERSHIP_TOL,
};
use crate::entropy::{
    coherent_information, dmin, isotropic_coherent_closed, werner_coherent_closed,
    DMIN_OVERLAP_TOL,
};
use crate::exec::map_batch;
use crate::linalg::{partial_trace, ComplexMatrix, Part, Party, SystemDims};
use crate::sdp::SolveOptions;
use crate::states::{
    doubly_erased_private, erased_private, erased_state, isotropic_state, max_entangled,
    private_state, swap_operator, werner_state, DensityOperator, PrivateStateSpec,
};

// Suite tolerances, fixed once here.
const TOL_LEMMA1: f64 = 5e-4;
const TOL_MEMBER_EMIN: f64 = 1e-6;
const TOL_PRIVACY: f64 = 1e-4;
const TOL_MONOTONE: f64 = 1e-5;
const TOL_ADDITIVITY: f64 = 5e-3;
const TOL_CLOSED_FORM: f64 = 1e-8;
const TOL_APPA_FORM: f64 = 1e-10;
const TOL_APPC_RESIDUAL: f64 = 1e-6;
const TOL_APPF_MARGINAL: f64 = 1e-10;
const TOL_APPG_OVERLAP: f64 = 1e-10;
const TOL_DMIN_ZERO: f64 = 1e-9;

/// Identifier of a labeled result covered by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SuiteId {
    Lemma1,
    Prop1,
    Thm1,
    Prop2,
    Cor2,
    Cor3,
    AppA,
    AppC,
    AppD,
    AppF,
    AppG,
    AppH,
    AppI,
    Additivity,
    Monotonicity,
    PrivacyBound,
}

impl SuiteId {
    pub fn all() -> &'static [SuiteId] {
        use SuiteId::*;
        &[
            Lemma1,
            Prop1,
            Thm1,
            Prop2,
            Cor2,
            Cor3,
            AppA,
            AppC,
            AppD,
            AppF,
            AppG,
            AppH,
            AppI,
            Additivity,
            Monotonicity,
            PrivacyBound,
        ]
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for SuiteId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        for id in Self::all() {
            if s.eq_ignore_ascii_case(&id.to_string()) {
                return Ok(*id);
            }
        }
        let valid: Vec<String> = Self::all().iter().map(|i| i.to_string()).collect();
        Err(format!(
            "unknown suite id '{s}'; valid ids: {}",
            valid.join(", ")
        ))
    }
}

/// One verified instance inside a suite.
#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    /// Human-readable description of the input.
    pub input: String,
    /// Measured value.
    pub measured: f64,
    /// Bound or target the measurement is held against.
    pub target: f64,
    /// Margin by which the requirement is met; negative means failure.
    pub slack: f64,
    pub pass: bool,
}

impl CaseResult {
    /// Requirement `measured <= target`, already including tolerance.
    fn upper(input: String, measured: f64, target: f64) -> Self {
        let slack = target - measured;
        Self {
            input,
            measured,
            target,
            slack,
            pass: slack >= 0.0 && measured.is_finite(),
        }
    }

    /// Requirement `measured >= target - tol`.
    fn lower(input: String, measured: f64, target: f64, tol: f64) -> Self {
        let slack = measured - target + tol;
        Self {
            input,
            measured,
            target,
            slack,
            pass: slack >= 0.0 && measured.is_finite(),
        }
    }

    fn error(input: String, message: &str) -> Self {
        Self {
            input: format!("{input} [error: {message}]"),
            measured: f64::NAN,
            target: 0.0,
            slack: f64::NEG_INFINITY,
            pass: false,
        }
    }
}

/// Verification report for one labeled result.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub theorem_id: SuiteId,
    pub passed: bool,
    /// One-line conclusion drawn from the suite.
    pub summary: String,
    pub cases: Vec<CaseResult>,
}

/// Parameters shared by all suites.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Grid size for the closed-form sweeps.
    pub grid_points: usize,
    pub solver: SolveOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            grid_points: 11,
            solver: SolveOptions::default(),
        }
    }
}

type Case = Box<dyn FnOnce() -> CaseResult + Send>;

fn run_cases(cases: Vec<Case>) -> Vec<CaseResult> {
    map_batch(cases, |c| c())
}

/// Runs the selected suites and aggregates their reports.
pub fn run_suite(ids: &[SuiteId], cfg: &SuiteConfig) -> Vec<TheoremReport> {
    ids.iter().map(|id| run_one(*id, cfg)).collect()
}

fn run_one(id: SuiteId, cfg: &SuiteConfig) -> TheoremReport {
    let (cases, summary) = match id {
        SuiteId::Lemma1 => lemma1_suite(cfg),
        SuiteId::Prop1 => prop1_suite(cfg),
        SuiteId::Thm1 => thm1_suite(cfg),
        SuiteId::Prop2 => prop2_suite(cfg),
        SuiteId::Cor2 => cor2_suite(cfg),
        SuiteId::Cor3 => cor3_suite(cfg),
        SuiteId::AppA => appa_suite(cfg),
        SuiteId::AppC => appc_suite(cfg),
        SuiteId::AppD => appd_suite(cfg),
        SuiteId::AppF => appf_suite(cfg),
        SuiteId::AppG => appg_suite(cfg),
        SuiteId::AppH => apph_suite(cfg),
        SuiteId::AppI => appi_suite(cfg),
        SuiteId::Additivity => additivity_suite(cfg),
        SuiteId::Monotonicity => monotonicity_suite(cfg),
        SuiteId::PrivacyBound => privacy_suite(cfg),
    };
    let results = run_cases(cases);
    let passed = results.iter().all(|c| c.pass);
    TheoremReport {
        theorem_id: id,
        passed,
        summary,
        cases: results,
    }
}

fn nontrivial_private() -> DensityOperator {
    let spec = PrivateStateSpec::with_defaults(2, (2, 2)).expect("valid spec");
    private_state(&spec).expect("valid private state")
}

// ---------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------

fn lemma1_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let opts = cfg.solver;
    let mut cases: Vec<Case> = Vec::new();
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    for &p in &grid {
        // Maximally entangled payload: the bound holds with equality.
        cases.push(Box::new(move || {
            let gamma = match max_entangled(2) {
                Ok(g) => g,
                Err(e) => return CaseResult::error(format!("eta(p={p},gamma=phi2)"), &e.to_string()),
            };
            let bound = lemma1_bound(p, 2).expect("domain ok");
            match doubly_erased_private(&gamma, p).map_err(|e| e.to_string()).and_then(|eta| {
                emin_with(&eta, &opts).map_err(|e| e.to_string())
            }) {
                Ok(report) => CaseResult::lower(
                    format!("eta(p={p},k=2,gamma=phi2) vs bound {bound:.6}"),
                    report.value_bits,
                    bound,
                    TOL_LEMMA1,
                ),
                Err(e) => CaseResult::error(format!("eta(p={p},gamma=phi2)"), &e),
            }
        }));
        cases.push(Box::new(move || {
            let gamma = match max_entangled(2) {
                Ok(g) => g,
                Err(e) => return CaseResult::error(format!("chain(p={p})"), &e.to_string()),
            };
            let bound = lemma1_bound(p, 2).expect("domain ok");
            match doubly_erased_private(&gamma, p)
                .map_err(|e| e.to_string())
                .and_then(|eta| emin_with(&eta, &opts).map_err(|e| e.to_string()))
            {
                Ok(report) => CaseResult::upper(
                    format!("chain equality |emin(eta^{{p={p},2}}) - bound|, gamma=phi2"),
                    (report.value_bits - bound).abs(),
                    TOL_LEMMA1,
                ),
                Err(e) => CaseResult::error(format!("chain(p={p})"), &e),
            }
        }));
        // Nontrivial-shield payload: inequality form.
        cases.push(Box::new(move || {
            let gamma = nontrivial_private();
            let bound = lemma1_bound(p, 2).expect("domain ok");
            match doubly_erased_private(&gamma, p)
                .map_err(|e| e.to_string())
                .and_then(|eta| emin_with(&eta, &opts).map_err(|e| e.to_string()))
            {
                Ok(report) => CaseResult::lower(
                    format!("eta(p={p},k=2,gamma=shift-twisted 2x2 shield) vs bound {bound:.6}"),
                    report.value_bits,
                    bound,
                    TOL_LEMMA1,
                ),
                Err(e) => CaseResult::error(format!("eta(p={p},nontrivial)"), &e),
            }
        }));
    }
    (
        cases,
        "min-unextendible entanglement of doubly erased private states dominates \
         -1/2 log2(p/k^2 + 1-p), with equality for the maximally entangled payload"
            .into(),
    )
}

fn prop1_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let opts = cfg.solver;
    let mut cases: Vec<Case> = Vec::new();
    // Members and non-members, plus both directions of the equivalence.
    cases.push(Box::new(move || {
        match erased_state(0.5, 2)
            .map_err(|e| e.to_string())
            .and_then(|rho| emin_with(&rho, &opts).map_err(|e| e.to_string()))
        {
            Ok(report) => CaseResult::upper(
                "erased(p=0.5,d=2): member, leak -> 0".into(),
                1.0 - report.overlap,
                MEMBERSHIP_TOL,
            ),
            Err(e) => CaseResult::error("erased(0.5,2)".into(), &e),
        }
    }));
    cases.push(Box::new(move || {
        match max_entangled(2)
            .map_err(|e| e.to_string())
            .and_then(|rho| emin_with(&rho, &opts).map_err(|e| e.to_string()))
        {
            Ok(report) => CaseResult::upper(
                "phi2: non-member, |leak - 3/4|".into(),
                ((1.0 - report.overlap) - 0.75).abs(),
                1e-5,
            ),
            Err(e) => CaseResult::error("phi2".into(), &e),
        }
    }));
    cases.push(Box::new(move || {
        match werner_state(0.7, 2)
            .map_err(|e| e.to_string())
            .and_then(|rho| emin_with(&rho, &opts).map_err(|e| e.to_string()))
        {
            Ok(report) => CaseResult::upper(
                "werner(p=0.7,d=2): member, leak -> 0".into(),
                1.0 - report.overlap,
                MEMBERSHIP_TOL,
            ),
            Err(e) => CaseResult::error("werner(0.7,2)".into(), &e),
        }
    }));
    // Verdict consistency: member <=> overlap reaches one <=> emin = 0.
    cases.push(Box::new(move || {
        let states: Vec<(&str, DensityOperator)> = vec![
            ("erased(0.5,2)", erased_state(0.5, 2).unwrap()),
            ("phi2", max_entangled(2).unwrap()),
            ("werner(0.7,2)", werner_state(0.7, 2).unwrap()),
        ];
        let mut mismatches = 0.0;
        for (_, rho) in &states {
            match crate::emin::is_super_two_extendible(rho, MEMBERSHIP_TOL) {
                Ok(v) => {
                    let emin_zero = v.report.value_bits <= 7.3e-7;
                    let overlap_one = v.leak <= MEMBERSHIP_TOL;
                    if v.is_member != overlap_one || v.is_member != emin_zero {
                        mismatches += 1.0;
                    }
                }
                Err(_) => mismatches += 1.0,
            }
        }
        CaseResult::upper(
            "verdict <=> overlap = 1 <=> emin = 0 on {erased, phi2, werner}".into(),
            mismatches,
            0.0,
        )
    }));
    (
        cases,
        "the min-unextendible entanglement vanishes exactly on the super two-extendible set"
            .into(),
    )
}

fn thm1_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let opts = cfg.solver;
    let mut cases: Vec<Case> = Vec::new();
    let members: Vec<(&'static str, fn() -> DensityOperator)> = vec![
        ("erased(0.5,2)", || erased_state(0.5, 2).unwrap()),
        ("werner(0.7,2)", || werner_state(0.7, 2).unwrap()),
    ];
    for (name, build) in members {
        cases.push(Box::new(move || {
            let rho = build();
            let flat = match rho.grouped_bipartite() {
                Ok(f) => f,
                Err(e) => return CaseResult::error(name.into(), &e.to_string()),
            };
            let entries = match one_way_locc_examples(flat.dims()) {
                Ok(e) => e,
                Err(e) => return CaseResult::error(name.into(), &e.to_string()),
            };
            let mut worst = f64::NEG_INFINITY;
            let mut worst_name = "";
            for entry in &entries {
                let out = match entry.channel.apply(&flat) {
                    Ok(o) => o,
                    Err(e) => return CaseResult::error(name.into(), &e.to_string()),
                };
                match emin_with(&out, &opts) {
                    Ok(report) => {
                        if report.value_bits > worst {
                            worst = report.value_bits;
                            worst_name = entry.name;
                        }
                    }
                    Err(e) => return CaseResult::error(name.into(), &e.to_string()),
                }
            }
            CaseResult::upper(
                format!(
                    "{name}: max emin over catalogue outputs (worst: {worst_name}) \
                     => heralded exact key rate 0"
                ),
                worst,
                TOL_MONOTONE,
            )
        }));
    }
    (
        cases,
        "member states yield zero probabilistic one-way distillable key: every catalogue \
         one-way LOCC output keeps emin at zero"
            .into(),
    )
}

fn prop2_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let opts = cfg.solver;
    let mut cases: Vec<Case> = Vec::new();
    for p in [0.3, 0.7] {
        cases.push(Box::new(move || {
            let gamma = max_entangled(2).unwrap();
            match erased_private(&gamma, p)
                .map_err(|e| e.to_string())
                .and_then(|rho| emin_with(&rho, &opts).map_err(|e| e.to_string()))
            {
                Ok(report) => CaseResult::upper(
                    format!("erased_private(p={p},gamma=phi2): emin"),
                    report.value_bits.abs(),
                    TOL_MEMBER_EMIN,
                ),
                Err(e) => CaseResult::error(format!("erased_private(p={p})"), &e),
            }
        }));
    }
    cases.push(Box::new(move || {
        let gamma = nontrivial_private();
        match erased_private(&gamma, 0.5)
            .map_err(|e| e.to_string())
            .and_then(|rho| emin_with(&rho, &opts).map_err(|e| e.to_string()))
        {
            Ok(report) => CaseResult::upper(
                "erased_private(p=0.5,gamma=shift-twisted 2x2 shield): emin".into(),
                report.value_bits.abs(),
                TOL_MEMBER_EMIN,
            ),
            Err(e) => CaseResult::error("erased_private(nontrivial)".into(), &e),
        }
    }));
    (
        cases,
        "erased private states are super two-extendible for p < 1".into(),
    )
}

fn cor2_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let opts = cfg.solver;
    let mut cases: Vec<Case> = Vec::new();
    for p in [0.0, 0.25, 0.5, 0.75, 0.99] {
        cases.push(Box::new(move || {
            match erased_state(p, 2)
                .map_err(|e| e.to_string())
                .and_then(|rho| emin_with(&rho, &opts).map_err(|e| e.to_string()))
            {
                Ok(report) => CaseResult::upper(
                    format!("erased(p={p},d=2): emin"),
                    report.value_bits.abs(),
                    TOL_MEMBER_EMIN,
                ),
                Err(e) => CaseResult::error(format!("erased(p={p},d=2)"), &e),
            }
        }));
    }
    (
        cases,
        "erased states have zero probabilistic one-way distillable key for all p < 1".into(),
    )
}

/// Random full-rank state: Dirichlet(1,...,1) eigenvalues floored at
/// 1e-3, conjugated by a Haar-random unitary.
fn random_full_rank(d_a: usize, d_b: usize, rng: &mut ChaCha20Rng) -> DensityOperator {
    let n = d_a * d_b;
    let mut evals: Vec<f64> = (0..n)
        .map(|_| -(rng.gen_range(1e-12..1.0f64)).ln())
        .collect();
    let total: f64 = evals.iter().sum();
    for l in &mut evals {
        *l = (*l / total).max(1e-3);
    }
    let total: f64 = evals.iter().sum();
    for l in &mut evals {
        *l /= total;
    }
    // Haar unitary: modified Gram-Schmidt on a complex Ginibre matrix.
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                })
                .collect()
        })
        .collect();
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = (0..n).map(|r| cols[k][r].conj() * cols[j][r]).sum();
            for r in 0..n {
                let v = cols[k][r];
                cols[j][r] -= proj * v;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            cols[j][r] /= norm;
        }
    }
    let u = ComplexMatrix::from_fn(n, n, |r, c| cols[c][r]);
    let mut diag = ComplexMatrix::zeros(n, n);
    for (i, &l) in evals.iter().enumerate() {
        diag[(i, i)] = Complex64::new(l, 0.0);
    }
    let m = u.matmul(&diag).matmul(&u.dagger());
    DensityOperator::with_uniform_tolerance(m, SystemDims::bipartite(d_a, d_b), 1e-10)
        .expect("construction is a valid state")
}

fn cor3_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let opts = cfg.solver;
    let seed = cfg.seed;
    let mut cases: Vec<Case> = Vec::new();
    for i in 0..20usize {
        let (d_a, d_b) = if i < 10 { (2, 2) } else { (2, 3) };
        cases.push(Box::new(move || {
            let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(1000 + i as u64));
            let rho = random_full_rank(d_a, d_b, &mut rng);
            match emin_with(&rho, &opts) {
                Ok(report) => CaseResult::upper(
                    format!("random full-rank {d_a}x{d_b} #{i}: emin"),
                    report.value_bits.abs(),
                    TOL_MEMBER_EMIN,
                ),
                Err(e) => CaseResult::error(format!("random full-rank #{i}"), &e.to_string()),
            }
        }));
    }
    (
        cases,
        "all full-rank states are super two-extendible".into(),
    )
}

fn appa_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let seed = cfg.seed;
    let mut cases: Vec<Case> = Vec::new();
    for i in 0..5usize {
        cases.push(Box::new(move || {
            let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(2000 + i as u64));
            let q: f64 = rng.gen_range(0.0..1.0);
            // Random sigma on A'B'.
            let g = ComplexMatrix::from_fn(4, 4, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let s = g.matmul(&g.dagger());
            let sigma = s.scale_re(1.0 / s.trace().re);
            let gamma = max_entangled(2).unwrap();
            let dims = SystemDims::new(vec![
                Part::new(Party::A, 2),
                Part::new(Party::A, 2),
                Part::new(Party::B, 2),
            ])
            .unwrap();
            let one = ComplexMatrix::basis_op(2, 1, 1);
            let zero = ComplexMatrix::basis_op(2, 0, 0);
            let input_m = one
                .kron(gamma.matrix())
                .scale_re(q)
                .add(&zero.kron(&sigma).scale_re(1.0 - q));
            let input = match DensityOperator::new(input_m, dims.clone()) {
                Ok(s) => s,
                Err(e) => return CaseResult::error(format!("AppA #{i}"), &e.to_string()),
            };
            let pipeline = match failure_randomize_pipeline(&dims) {
                Ok(p) => p,
                Err(e) => return CaseResult::error(format!("AppA #{i}"), &e.to_string()),
            };
            let out = match pipeline.apply(&input) {
                Ok(o) => o,
                Err(e) => return CaseResult::error(format!("AppA #{i}"), &e.to_string()),
            };
            let expect = one
                .kron(gamma.matrix())
                .scale_re(q)
                .add(&zero.kron(&ComplexMatrix::identity(4).scale_re(0.25)).scale_re(1.0 - q));
            CaseResult::upper(
                format!("q={q:.3} random sigma #{i}: entrywise deviation from flag form"),
                out.matrix().sub(&expect).max_abs(),
                TOL_APPA_FORM,
            )
        }));
    }
    (
        cases,
        "flag copy plus failure randomization maps arbitrary failure branches to the \
         maximally mixed form"
            .into(),
    )
}

fn appc_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let opts = cfg.solver;
    let p = 0.5;
    // Shared computation: the SDP-optimal extension of eta^{1/2,2}.
    let prep = move || -> Result<(DensityOperator, DensityOperator, DensityOperator), String> {
        let gamma = max_entangled(2).map_err(|e| e.to_string())?;
        let eta = doubly_erased_private(&gamma, p).map_err(|e| e.to_string())?;
        let report = emin_with(&eta, &opts).map_err(|e| e.to_string())?;
        // w_AE = Tr_B[w*] on the extended (A, E) pair, E ~ B.
        let m = partial_trace(
            &report.optimal_extension,
            &report.extension_dims,
            &[0, 2],
        )
        .map_err(|e| e.to_string())?;
        let dims_ae = SystemDims::new(vec![
            Part::erasure_extended(Party::A, 3),
            Part::erasure_extended(Party::B, 3),
        ])
        .map_err(|e| e.to_string())?;
        let omega_ae =
            DensityOperator::with_uniform_tolerance(m, dims_ae, 1e-5).map_err(|e| e.to_string())?;
        let deph = partial_dephasing(omega_ae.dims(), Party::A).map_err(|e| e.to_string())?;
        let dephased = deph.apply(&omega_ae).map_err(|e| e.to_string())?;
        Ok((eta, omega_ae, dephased))
    };

    let mut cases: Vec<Case> = Vec::new();
    cases.push(Box::new(move || match prep() {
        Ok((eta, _, dephased)) => {
            match extension_feasibility(&eta, &dephased, &opts) {
                Ok(f) => CaseResult::upper(
                    "dephased marginal stays in F(eta^{1/2,2}): feasibility residual".into(),
                    f.residual,
                    TOL_APPC_RESIDUAL,
                ),
                Err(e) => CaseResult::error("AppC feasibility".into(), &e.to_string()),
            }
        }
        Err(e) => CaseResult::error("AppC prep".into(), &e),
    }));
    cases.push(Box::new(move || match prep() {
        Ok((_, _, dephased)) => {
            // Unerased block has weight p, erased block weight 1 - p.
            let m = dephased.matrix();
            let mut x_trace = 0.0;
            for a in 0..2usize {
                for e in 0..3usize {
                    x_trace += m[(a * 3 + e, a * 3 + e)].re;
                }
            }
            CaseResult::upper(
                "block weights: |Tr[Pi_A w Pi_A] - p|".into(),
                (x_trace - p).abs(),
                TOL_APPC_RESIDUAL,
            )
        }
        Err(e) => CaseResult::error("AppC blocks".into(), &e),
    }));
    cases.push(Box::new(move || match prep() {
        Ok((_, _, dephased)) => {
            // tau_E = <e| w |e> / (1-p) must be a state.
            let m = dephased.matrix();
            let mut tau = ComplexMatrix::zeros(3, 3);
            for r in 0..3 {
                for c in 0..3 {
                    tau[(r, c)] = m[(2 * 3 + r, 2 * 3 + c)].scale(1.0 / (1.0 - p));
                }
            }
            let trace_dev = (tau.trace().re - 1.0).abs();
            let lmin = crate::linalg::hermitian_eig(&tau)
                .map(|e| e.min_eigenvalue())
                .unwrap_or(f64::NEG_INFINITY);
            CaseResult::upper(
                "erased block tau_E is a state: max(|tr-1|, -lambda_min)".into(),
                trace_dev.max(-lmin),
                TOL_APPC_RESIDUAL,
            )
        }
        Err(e) => CaseResult::error("AppC tau".into(), &e),
    }));
    cases.push(Box::new(move || match prep() {
        Ok((_, _, dephased)) => {
            // sigma_AE = Pi_A w Pi_A / p must lie in F(gamma_embedded).
            let m = dephased.matrix();
            let mut sigma = ComplexMatrix::zeros(9, 9);
            for ra in 0..2usize {
                for re in 0..3usize {
                    for ca in 0..2usize {
                        for ce in 0..3usize {
                            sigma[(ra * 3 + re, ca * 3 + ce)] =
                                m[(ra * 3 + re, ca * 3 + ce)].scale(1.0 / p);
                        }
                    }
                }
            }
            let dims = SystemDims::new(vec![
                Part::erasure_extended(Party::A, 3),
                Part::erasure_extended(Party::B, 3),
            ])
            .unwrap();
            let sigma_state = match DensityOperator::with_uniform_tolerance(sigma, dims, 1e-5) {
                Ok(s) => s,
                Err(e) => return CaseResult::error("AppC sigma".into(), &e.to_string()),
            };
            let gamma_emb = doubly_erased_private(&max_entangled(2).unwrap(), 1.0).unwrap();
            match extension_feasibility(&gamma_emb, &sigma_state, &opts) {
                Ok(f) => CaseResult::upper(
                    "unerased block sigma_AE in F(gamma): feasibility residual".into(),
                    f.residual,
                    TOL_APPC_RESIDUAL,
                ),
                Err(e) => CaseResult::error("AppC sigma feasibility".into(), &e.to_string()),
            }
        }
        Err(e) => CaseResult::error("AppC sigma".into(), &e),
    }));
    (
        cases,
        "the dephased optimal extension marginal decomposes into p sigma_AE + (1-p) [e](x)tau \
         with sigma_AE extending the private state"
            .into(),
    )
}

fn appd_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let opts = cfg.solver;
    let mut cases: Vec<Case> = Vec::new();
    // Convexity: mixtures of members are members.
    cases.push(Box::new(move || {
        let a = erased_state(0.3, 2).unwrap();
        let b = erased_state(0.7, 2).unwrap();
        let m = a.matrix().scale_re(0.5).add(&b.matrix().scale_re(0.5));
        let mix = DensityOperator::new(m, a.dims().clone()).unwrap();
        match emin_with(&mix, &opts) {
            Ok(report) => CaseResult::upper(
                "mixture of erased(0.3) and erased(0.7): emin".into(),
                report.value_bits.abs(),
                TOL_MEMBER_EMIN,
            ),
            Err(e) => CaseResult::error("erased mixture".into(), &e.to_string()),
        }
    }));
    cases.push(Box::new(move || {
        let a = werner_state(0.3, 2).unwrap();
        let b = werner_state(0.6, 2).unwrap();
        let m = a.matrix().scale_re(0.4).add(&b.matrix().scale_re(0.6));
        let mix = DensityOperator::new(m, a.dims().clone()).unwrap();
        match emin_with(&mix, &opts) {
            Ok(report) => CaseResult::upper(
                "mixture of werner(0.3) and werner(0.6): emin".into(),
                report.value_bits.abs(),
                TOL_MEMBER_EMIN,
            ),
            Err(e) => CaseResult::error("werner mixture".into(), &e.to_string()),
        }
    }));
    // Non-closedness: members arbitrarily close to the maximally
    // entangled state, which itself is far from membership.
    cases.push(Box::new(move || {
        match erased_state(0.999, 2)
            .map_err(|e| e.to_string())
            .and_then(|rho| emin_with(&rho, &opts).map_err(|e| e.to_string()))
        {
            Ok(report) => CaseResult::upper(
                "erased(p=0.999,d=2) still a member: emin".into(),
                report.value_bits.abs(),
                TOL_MEMBER_EMIN,
            ),
            Err(e) => CaseResult::error("erased(0.999,2)".into(), &e),
        }
    }));
    cases.push(Box::new(move || {
        match max_entangled(2)
            .map_err(|e| e.to_string())
            .and_then(|rho| emin_with(&rho, &opts).map_err(|e| e.to_string()))
        {
            Ok(report) => CaseResult::lower(
                "limit point phi2 is not a member: emin".into(),
                report.value_bits,
                1.0,
                TOL_PRIVACY,
            ),
            Err(e) => CaseResult::error("phi2".into(), &e),
        }
    }));
    (
        cases,
        "the super two-extendible set is convex but not closed".into(),
    )
}

fn appf_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let _ = cfg;
    let mut cases: Vec<Case> = Vec::new();
    for (label, build, p) in [
        ("gamma=phi2,p=0.5", nontrivial_or_phi(false), 0.5),
        ("gamma=phi2,p=0.3", nontrivial_or_phi(false), 0.3),
        ("gamma=nontrivial,p=0.5", nontrivial_or_phi(true), 0.5),
    ] {
        cases.push(Box::new(move || {
            let gamma = build();
            match erased_private_witness(&gamma, p) {
                Ok((omega, dims)) => {
                    let m_ab = partial_trace(&omega, &dims, &[0, 1]).unwrap();
                    let m_ae = partial_trace(&omega, &dims, &[0, 2]).unwrap();
                    let eta_p = erased_private(&gamma, p).unwrap();
                    let eta_q = erased_private(&gamma, 1.0 - p).unwrap();
                    let dev = m_ab
                        .sub(eta_p.matrix())
                        .max_abs()
                        .max(m_ae.sub(eta_q.matrix()).max_abs());
                    CaseResult::upper(
                        format!("explicit extension marginals ({label})"),
                        dev,
                        TOL_APPF_MARGINAL,
                    )
                }
                Err(e) => CaseResult::error(label.into(), &e.to_string()),
            }
        }));
    }
    cases.push(Box::new(move || {
        let gamma = max_entangled(2).unwrap();
        let a = erased_private(&gamma, 0.3).unwrap();
        let b = erased_private(&gamma, 0.7).unwrap();
        match dmin(&a, &b, DMIN_OVERLAP_TOL) {
            Ok(v) => CaseResult::upper(
                "D_min(eta~^{0.3} || eta~^{0.7}) = 0 (equal supports)".into(),
                v.bits.abs(),
                TOL_DMIN_ZERO,
            ),
            Err(e) => CaseResult::error("dmin equal supports".into(), &e.to_string()),
        }
    }));
    (
        cases,
        "the explicit extension of an erased private state reproduces both stated marginals"
            .into(),
    )
}

fn nontrivial_or_phi(nontrivial: bool) -> fn() -> DensityOperator {
    if nontrivial {
        nontrivial_private
    } else {
        || max_entangled(2).unwrap()
    }
}

fn appg_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let _ = cfg;
    let mut cases: Vec<Case> = Vec::new();
    for (label, build) in [
        ("werner(0.3,2)", werner_state(0.3, 2)),
        ("isotropic(0.5,2)", isotropic_state(0.5, 2)),
    ] {
        cases.push(Box::new(move || match &build {
            Ok(rho) => match fullrank_witness(rho) {
                Ok(w) => CaseResult::upper(
                    format!("{label}: |Tr[Pi^rho sigma] - 1| for rho (x) I/d witness"),
                    (w.overlap - 1.0).abs(),
                    TOL_APPG_OVERLAP,
                ),
                Err(e) => CaseResult::error(label.into(), &e.to_string()),
            },
            Err(e) => CaseResult::error(label.into(), &e.to_string()),
        }));
    }
    cases.push(Box::new(move || {
        let phi = max_entangled(2).unwrap();
        let rejected = fullrank_witness(&phi).is_err();
        CaseResult::upper(
            "phi2 rejected as rank-deficient".into(),
            if rejected { 0.0 } else { 1.0 },
            0.5,
        )
    }));
    (
        cases,
        "rho (x) I/d certifies every full-rank state as super two-extendible".into(),
    )
}

fn apph_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let grid = cfg.grid_points.max(2);
    let mut cases: Vec<Case> = Vec::new();
    for d in [2usize, 3] {
        for i in 0..grid {
            let p = i as f64 / (grid - 1) as f64;
            cases.push(Box::new(move || {
                let closed = werner_coherent_closed(p, d).unwrap().bits;
                match werner_state(p, d)
                    .map_err(|e| e.to_string())
                    .and_then(|w| coherent_information(&w).map_err(|e| e.to_string()))
                {
                    Ok(numeric) => CaseResult::upper(
                        format!("werner d={d} p={p:.2}: |closed - numeric|"),
                        (closed - numeric.bits).abs(),
                        TOL_CLOSED_FORM,
                    ),
                    Err(e) => CaseResult::error(format!("werner d={d} p={p:.2}"), &e),
                }
            }));
        }
    }
    cases.push(Box::new(|| {
        let spot = werner_coherent_closed(1.0, 2).unwrap().bits;
        CaseResult::upper(
            "spot value p=1,d=2: |closed - (1 - log2 3)|".into(),
            (spot - (1.0 - 3f64.log2())).abs(),
            1e-12,
        )
    }));
    cases.push(Box::new(|| {
        // Swap-operator identities behind the closed form.
        let mut worst = 0.0f64;
        for d in [2usize, 3] {
            let f = swap_operator(d);
            let dims = SystemDims::bipartite(d, d);
            let red = partial_trace(&f, &dims, &[1]).unwrap();
            worst = worst.max(red.sub(&ComplexMatrix::identity(d)).max_abs());
            let id = ComplexMatrix::identity(d * d);
            let sym_tr = id.add(&f).scale_re(0.5).trace().re;
            worst = worst.max((sym_tr - (d * (d + 1)) as f64 / 2.0).abs());
        }
        CaseResult::upper(
            "Tr_A[F] = I and Tr[(I+F)/2] = d(d+1)/2 for d=2,3".into(),
            worst,
            1e-12,
        )
    }));
    (
        cases,
        "the Werner coherent information closed form matches the numeric value".into(),
    )
}

fn appi_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let grid = cfg.grid_points.max(2);
    let mut cases: Vec<Case> = Vec::new();
    for d in [2usize, 3] {
        for i in 0..grid {
            let f = i as f64 / (grid - 1) as f64;
            cases.push(Box::new(move || {
                let closed = isotropic_coherent_closed(f, d).unwrap().bits;
                match isotropic_state(f, d)
                    .map_err(|e| e.to_string())
                    .and_then(|s| coherent_information(&s).map_err(|e| e.to_string()))
                {
                    Ok(numeric) => CaseResult::upper(
                        format!("isotropic d={d} F={f:.2}: |closed - numeric|"),
                        (closed - numeric.bits).abs(),
                        TOL_CLOSED_FORM,
                    ),
                    Err(e) => CaseResult::error(format!("isotropic d={d} F={f:.2}"), &e),
                }
            }));
        }
    }
    cases.push(Box::new(|| {
        let v = isotropic_coherent_closed(1.0, 2).unwrap().bits;
        CaseResult::upper(
            "F=1,d=2 recovers log2 d".into(),
            (v - 1.0).abs(),
            1e-12,
        )
    }));
    (
        cases,
        "the isotropic coherent information closed form matches the numeric value".into(),
    )
}

fn additivity_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let opts = cfg.solver;
    let mixed_product = || {
        let a = ComplexMatrix::from_real(2, 2, &[0.7, 0.1, 0.1, 0.3]);
        let b = ComplexMatrix::from_real(2, 2, &[0.6, -0.15, -0.15, 0.4]);
        DensityOperator::new(a.kron(&b), SystemDims::bipartite(2, 2)).unwrap()
    };
    let pure_product = || {
        DensityOperator::new(
            ComplexMatrix::basis_op(2, 0, 0).kron(&ComplexMatrix::basis_op(2, 0, 0)),
            SystemDims::bipartite(2, 2),
        )
        .unwrap()
    };
    let pairs: Vec<(String, Box<dyn Fn() -> DensityOperator + Send + Sync>, Box<dyn Fn() -> DensityOperator + Send + Sync>)> = vec![
        (
            "phi2 (x) phi2".into(),
            Box::new(|| max_entangled(2).unwrap()),
            Box::new(|| max_entangled(2).unwrap()),
        ),
        (
            "phi2 (x) mixed product".into(),
            Box::new(|| max_entangled(2).unwrap()),
            Box::new(mixed_product),
        ),
        (
            "erased(0.5,2) (x) pure product".into(),
            Box::new(|| erased_state(0.5, 2).unwrap()),
            Box::new(pure_product),
        ),
    ];
    let mut cases: Vec<Case> = Vec::new();
    for (label, left, right) in pairs {
        cases.push(Box::new(move || {
            let a = left();
            let b = right();
            let run = || -> Result<f64, String> {
                let ea = emin_with(&a, &opts).map_err(|e| e.to_string())?.value_bits;
                let eb = emin_with(&b, &opts).map_err(|e| e.to_string())?.value_bits;
                let joint = a.tensor_bipartite(&b).map_err(|e| e.to_string())?;
                let ej = emin_with(&joint, &opts).map_err(|e| e.to_string())?.value_bits;
                Ok((ej - ea - eb).abs())
            };
            match run() {
                Ok(dev) => CaseResult::upper(
                    format!("{label}: |emin(rho (x) sigma) - emin(rho) - emin(sigma)|"),
                    dev,
                    TOL_ADDITIVITY,
                ),
                Err(e) => CaseResult::error(label.clone(), &e),
            }
        }));
    }
    (
        cases,
        "min-unextendible entanglement is additive across tensor products".into(),
    )
}

fn monotonicity_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let opts = cfg.solver;
    let states: Vec<(&'static str, fn() -> DensityOperator)> = vec![
        ("phi2", || max_entangled(2).unwrap()),
        ("eta(0.5,2)", || {
            doubly_erased_private(&max_entangled(2).unwrap(), 0.5).unwrap()
        }),
        ("werner(0.7,2)", || werner_state(0.7, 2).unwrap()),
    ];
    let mut cases: Vec<Case> = Vec::new();
    for (name, build) in states {
        cases.push(Box::new(move || {
            let rho = build();
            let flat = match rho.grouped_bipartite() {
                Ok(f) => f,
                Err(e) => return CaseResult::error(name.into(), &e.to_string()),
            };
            let input_emin = match emin_with(&flat, &opts) {
                Ok(r) => r.value_bits,
                Err(e) => return CaseResult::error(name.into(), &e.to_string()),
            };
            let entries = match one_way_locc_examples(flat.dims()) {
                Ok(e) => e,
                Err(e) => return CaseResult::error(name.into(), &e.to_string()),
            };
            let mut worst_increase = f64::NEG_INFINITY;
            let mut worst_name = "";
            for entry in &entries {
                if let Err(e) = entry.channel.verify_cptp() {
                    return CaseResult::error(
                        format!("{name}/{}", entry.name),
                        &e.to_string(),
                    );
                }
                let out = match entry.channel.apply(&flat) {
                    Ok(o) => o,
                    Err(e) => {
                        return CaseResult::error(format!("{name}/{}", entry.name), &e.to_string())
                    }
                };
                match emin_with(&out, &opts) {
                    Ok(r) => {
                        let inc = r.value_bits - input_emin;
                        if inc > worst_increase {
                            worst_increase = inc;
                            worst_name = entry.name;
                        }
                    }
                    Err(e) => {
                        return CaseResult::error(format!("{name}/{}", entry.name), &e.to_string())
                    }
                }
            }
            CaseResult::upper(
                format!("{name}: max emin increase over catalogue (worst: {worst_name})"),
                worst_increase,
                TOL_MONOTONE,
            )
        }));
    }
    (
        cases,
        "no catalogue one-way LOCC channel increases the min-unextendible entanglement".into(),
    )
}

fn privacy_suite(cfg: &SuiteConfig) -> (Vec<Case>, String) {
    let opts = cfg.solver;
    let mut cases: Vec<Case> = Vec::new();
    cases.push(Box::new(move || {
        let gamma = nontrivial_private();
        match emin_with(&gamma, &opts) {
            Ok(r) => CaseResult::lower(
                "private(k=2, 2x2 shield, shift twists): emin >= log2 k".into(),
                r.value_bits,
                1.0,
                TOL_PRIVACY,
            ),
            Err(e) => CaseResult::error("private state".into(), &e.to_string()),
        }
    }));
    for d in [2usize, 3] {
        cases.push(Box::new(move || {
            match max_entangled(d)
                .map_err(|e| e.to_string())
                .and_then(|phi| emin_with(&phi, &opts).map_err(|e| e.to_string()))
            {
                Ok(r) => CaseResult::upper(
                    format!("phi{d}: |emin - log2 {d}|"),
                    (r.value_bits - (d as f64).log2()).abs(),
                    TOL_PRIVACY,
                ),
                Err(e) => CaseResult::error(format!("phi{d}"), &e),
            }
        }));
    }
    (
        cases,
        "private states hold at least log2 k bits of min-unextendible entanglement".into(),
    )
}
