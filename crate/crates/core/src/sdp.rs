//! Dense interior-point solver for SDPs over complex Hermitian variables
//! with trace-linear equality constraints:
//!
//! ```text
//!   maximize   Tr[C w]
//!   subject to Tr[A_i w] = b_i   (i = 1..m)
//!              w >= 0
//! ```
//!
//! The algorithm is primal-dual path following with Nesterov-Todd
//! scaling and a Mehrotra predictor-corrector step; the reduced KKT
//! system is solved through a Cholesky factorization of the Schur
//! complement. The complex Hermitian variable is handled natively with
//! the real inner product `<A, B> = Tr[A B]`.
//!
//! Constraint preprocessing removes linearly dependent rows by modified
//! Gram-Schmidt in operator space. A dependent row whose right-hand side
//! is inconsistent with the kept rows certifies primal infeasibility
//! before any iteration runs.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{hermitian_eig, ComplexMatrix, LinalgError, SystemDims};

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("objective/constraint operator {index} is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { index: usize, asymmetry: f64 },
    #[error("constraint list must be non-empty")]
    EmptyConstraints,
    #[error("operator {index} has dimension {got}, expected {expected}")]
    WrongDimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("traced part is not isomorphic to the target: {0}")]
    MarginalMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Logging level for the solver ("quiet" emits nothing, "info" one line
/// per solve, "debug" one line per iteration on stderr).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Verbosity {
    #[default]
    Quiet,
    Info,
    Debug,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iters: usize,
    pub verbosity: Verbosity,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_iters: 200,
            verbosity: Verbosity::Quiet,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            gap_tol: tol,
            feas_tol: tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIters,
}

/// Hermitian-variable SDP in the trace form above.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    var_dim: usize,
    objective: ComplexMatrix,
    constraints: Vec<(ComplexMatrix, f64)>,
}

impl SdpProblem {
    pub fn new(
        objective: ComplexMatrix,
        constraints: Vec<(ComplexMatrix, f64)>,
    ) -> Result<Self, SdpError> {
        let n = objective.require_square()?;
        let herm_tol = 1e-12;
        let asym = objective.hermitian_asymmetry();
        if asym > herm_tol * objective.max_abs().max(1.0) {
            return Err(SdpError::NotHermitian {
                index: 0,
                asymmetry: asym,
            });
        }
        if constraints.is_empty() {
            return Err(SdpError::EmptyConstraints);
        }
        for (i, (a, _)) in constraints.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(SdpError::WrongDimension {
                    index: i + 1,
                    expected: n,
                    got: a.rows(),
                });
            }
            let asym = a.hermitian_asymmetry();
            if asym > herm_tol * a.max_abs().max(1.0) {
                return Err(SdpError::NotHermitian {
                    index: i + 1,
                    asymmetry: asym,
                });
            }
        }
        Ok(Self {
            var_dim: n,
            objective,
            constraints,
        })
    }

    pub fn var_dim(&self) -> usize {
        self.var_dim
    }

    pub fn objective(&self) -> &ComplexMatrix {
        &self.objective
    }

    pub fn constraints(&self) -> &[(ComplexMatrix, f64)] {
        &self.constraints
    }
}

/// Solver output. `omega` is the last (best) primal iterate; when the
/// status is `Optimal` it satisfies the documented gap and residual
/// bounds against the original constraint list.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub omega: ComplexMatrix,
    pub primal_value: f64,
    pub dual_value: f64,
    /// Dual slack `Z >= 0`; complementary slackness gives
    /// `|Tr[omega Z]| <= 10 * gap_tol` at optimality.
    pub dual_slack: ComplexMatrix,
    pub status: SdpStatus,
    pub iterations: usize,
    /// Max violation of the original constraints at `omega`.
    pub primal_residual: f64,
    /// Frobenius norm of the dual residual `C - A*(y) + Z` (max form).
    pub dual_residual: f64,
    /// Largest right-hand-side inconsistency absorbed while dropping
    /// dependent constraints (zero for exactly stated problems).
    pub reduction_inconsistency: f64,
}

/// Builds the complete set of real trace constraints expressing
/// `Tr_traced[w] = target`, one Hermitian operator per real degree of
/// freedom of the marginal (so `kept_dim^2` constraints in total).
pub fn marginal_constraint_operators(
    dims: &SystemDims,
    traced_part: usize,
    target: &ComplexMatrix,
) -> Result<Vec<(ComplexMatrix, f64)>, SdpError> {
    if traced_part >= dims.len() {
        return Err(SdpError::MarginalMismatch(format!(
            "traced part {traced_part} out of range for {} parts",
            dims.len()
        )));
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|&i| i != traced_part).collect();
    let kept_dim: usize = kept.iter().map(|&i| dims.parts()[i].dim).product();
    if target.rows() != kept_dim || target.cols() != kept_dim {
        return Err(SdpError::MarginalMismatch(format!(
            "target is {}x{}, kept parts have dimension {kept_dim}",
            target.rows(),
            target.cols()
        )));
    }
    let n = dims.total_dim();
    let traced_dim = dims.parts()[traced_part].dim;
    let kept_dims: Vec<usize> = kept.iter().map(|&i| dims.parts()[i].dim).collect();

    let unflatten_kept = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0usize; kept_dims.len()];
        for (slot, d) in out.iter_mut().zip(&kept_dims).rev() {
            *slot = idx % d;
            idx /= d;
        }
        out
    };
    // Lifts |c><r| on the kept parts to sum_t |c,t><r,t| on the full space.
    let lift = |r: usize, c: usize, coeff: Complex64, m: &mut ComplexMatrix| {
        let rk = unflatten_kept(r);
        let ck = unflatten_kept(c);
        let mut full_r = vec![0usize; dims.len()];
        let mut full_c = vec![0usize; dims.len()];
        for t in 0..traced_dim {
            for (pos, &part) in kept.iter().enumerate() {
                full_r[part] = ck[pos];
                full_c[part] = rk[pos];
            }
            full_r[traced_part] = t;
            full_c[traced_part] = t;
            m[(dims.flatten(&full_r), dims.flatten(&full_c))] += coeff;
        }
    };

    let mut out = Vec::with_capacity(kept_dim * kept_dim);
    for r in 0..kept_dim {
        let mut a = ComplexMatrix::zeros(n, n);
        lift(r, r, Complex64::new(1.0, 0.0), &mut a);
        out.push((a, target[(r, r)].re));
        for c in (r + 1)..kept_dim {
            // Real part: (|c><r| + |r><c|)/2.
            let mut re_op = ComplexMatrix::zeros(n, n);
            lift(r, c, Complex64::new(0.5, 0.0), &mut re_op);
            lift(c, r, Complex64::new(0.5, 0.0), &mut re_op);
            out.push((re_op, target[(r, c)].re));
            // Imaginary part: i(|r><c| - |c><r|)/2.
            let mut im_op = ComplexMatrix::zeros(n, n);
            lift(c, r, Complex64::new(0.0, 0.5), &mut im_op);
            lift(r, c, Complex64::new(0.0, -0.5), &mut im_op);
            out.push((im_op, target[(r, c)].im));
        }
    }
    Ok(out)
}

/// Sparse triplet view of a Hermitian operator.
struct Triplets {
    entries: Vec<(usize, usize, Complex64)>,
}

impl Triplets {
    fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let v = m[(r, c)];
                if v.norm_sqr() > 0.0 {
                    entries.push((r, c, v));
                }
            }
        }
        Self { entries }
    }

    /// `Tr[A M]` for Hermitian A (triplets) and Hermitian M.
    fn trace_product(&self, m: &ComplexMatrix) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(r, c, v) in &self.entries {
            acc += v * m[(c, r)];
        }
        acc.re
    }

    /// `out += s * A`.
    fn axpy_into(&self, s: f64, out: &mut ComplexMatrix) {
        for &(r, c, v) in &self.entries {
            out[(r, c)] += v.scale(s);
        }
    }
}

struct Reduction {
    kept: Vec<usize>,
    inconsistency: f64,
    infeasible: bool,
}

/// Modified Gram-Schmidt over operator space; drops dependent
/// constraints and checks their right-hand sides for consistency.
fn reduce_constraints(constraints: &[(ComplexMatrix, f64)]) -> Reduction {
    let drop_tol = 1e-10;
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    let mut r_cols: Vec<Vec<f64>> = Vec::new(); // column j: coeffs of kept j on basis 0..=j
    let mut kept: Vec<usize> = Vec::new();
    let mut kept_b: Vec<f64> = Vec::new();
    let mut inconsistency = 0.0f64;
    let mut infeasible = false;

    for (i, (a, b)) in constraints.iter().enumerate() {
        let norm_a = a.frobenius_norm();
        let mut v = a.clone();
        let mut mu = vec![0.0f64; basis.len()];
        for pass in 0..2 {
            for (k, q) in basis.iter().enumerate() {
                let c = q.inner_re(&v);
                v.axpy(Complex64::new(-c, 0.0), q);
                mu[k] += c;
            }
            if pass == 0 && basis.is_empty() {
                break;
            }
        }
        let r = v.frobenius_norm();
        if r > drop_tol * norm_a.max(1.0) {
            basis.push(v.scale_re(1.0 / r));
            let mut col = mu;
            col.push(r);
            r_cols.push(col);
            kept.push(i);
            kept_b.push(*b);
        } else {
            // Dependent row: back-substitute R alpha = mu to express it in
            // the kept originals, then check the right-hand side.
            let k = kept.len();
            let mut alpha = vec![0.0f64; k];
            for j in (0..k).rev() {
                let mut s = mu[j];
                for l in (j + 1)..k {
                    s -= r_cols[l][j] * alpha[l];
                }
                alpha[j] = s / r_cols[j][j];
            }
            let implied: f64 = alpha.iter().zip(&kept_b).map(|(x, y)| x * y).sum();
            let gap = (b - implied).abs();
            inconsistency = inconsistency.max(gap);
            if gap > 1e-6 * (1.0 + b.abs()) {
                infeasible = true;
            }
        }
    }
    Reduction {
        kept,
        inconsistency,
        infeasible,
    }
}

/// Dense real symmetric Cholesky; returns the lower factor row-major.
fn cholesky(s: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0f64; m * m];
    for i in 0..m {
        for j in 0..=i {
            let mut sum = s[i * m + j];
            for k in 0..j {
                sum -= l[i * m + k] * l[j * m + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * m + i] = sum.sqrt();
            } else {
                l[i * m + j] = sum / l[j * m + j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[f64], m: usize, rhs: &[f64]) -> Vec<f64> {
    let mut y = rhs.to_vec();
    for i in 0..m {
        for k in 0..i {
            let v = l[i * m + k] * y[k];
            y[i] -= v;
        }
        y[i] /= l[i * m + i];
    }
    for i in (0..m).rev() {
        for k in (i + 1)..m {
            let v = l[k * m + i] * y[k];
            y[i] -= v;
        }
        y[i] /= l[i * m + i];
    }
    y
}

/// Largest step `alpha` with `p + alpha dp >= 0`, given the
/// eigendecomposition-based whitening of `p`.
fn max_step(p_inv_half: &ComplexMatrix, dp: &ComplexMatrix) -> f64 {
    let mut g = p_inv_half.matmul(dp).matmul(p_inv_half);
    g.hermitize();
    match hermitian_eig(&g) {
        Ok(eig) => {
            let lmin = eig.min_eigenvalue();
            if lmin >= -1e-14 {
                f64::INFINITY
            } else {
                -1.0 / lmin
            }
        }
        Err(_) => 0.0,
    }
}

fn herm_part(m: &ComplexMatrix) -> ComplexMatrix {
    let mut h = m.add(&m.dagger()).scale_re(0.5);
    h.hermitize();
    h
}

/// Solves the SDP. Deterministic: identical inputs and options produce
/// an identical iterate sequence.
pub fn solve(problem: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution, SdpError> {
    let n = problem.var_dim;
    let c_max = &problem.objective;
    // Internal minimization form.
    let c_min = c_max.scale_re(-1.0);

    let all_triplets: Vec<Triplets> = problem
        .constraints
        .iter()
        .map(|(a, _)| Triplets::from_matrix(a))
        .collect();
    let all_b: Vec<f64> = problem.constraints.iter().map(|(_, b)| *b).collect();

    let reduction = reduce_constraints(&problem.constraints);
    let finish = |x: &ComplexMatrix,
                  z: &ComplexMatrix,
                  y_dot_b: f64,
                  status: SdpStatus,
                  iterations: usize,
                  dual_res: f64| {
        let mut omega = x.clone();
        omega.hermitize();
        let primal_residual = all_triplets
            .iter()
            .zip(&all_b)
            .map(|(t, b)| (t.trace_product(&omega) - b).abs())
            .fold(0.0f64, f64::max);
        SdpSolution {
            primal_value: c_max.inner_re(&omega),
            dual_value: -y_dot_b,
            omega,
            dual_slack: z.clone(),
            status,
            iterations,
            primal_residual,
            dual_residual: dual_res,
            reduction_inconsistency: reduction.inconsistency,
        }
    };

    let x0 = ComplexMatrix::identity(n).scale_re(1.0 / n as f64);
    if reduction.infeasible {
        let sol = finish(
            &x0,
            &ComplexMatrix::identity(n),
            f64::NAN,
            SdpStatus::Infeasible,
            0,
            f64::NAN,
        );
        return Ok(sol);
    }

    let kept = &reduction.kept;
    let m = kept.len();
    let triplets: Vec<&Triplets> = kept.iter().map(|&i| &all_triplets[i]).collect();
    let b: Vec<f64> = kept.iter().map(|&i| all_b[i]).collect();
    let b_inf = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let c_scale = c_min.frobenius_norm().max(1.0);

    let apply_a = |x: &ComplexMatrix| -> Vec<f64> {
        triplets.iter().map(|t| t.trace_product(x)).collect()
    };
    let apply_a_star = |y: &[f64]| -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(n, n);
        for (t, &yi) in triplets.iter().zip(y) {
            t.axpy_into(yi, &mut out);
        }
        out
    };

    let mut x = x0;
    let mut y = vec![0.0f64; m];
    let mut z = ComplexMatrix::identity(n);

    let mut best: Option<(f64, ComplexMatrix, ComplexMatrix, f64, usize, f64)> = None;
    let mut status = SdpStatus::MaxIters;
    let mut iterations = 0usize;

    for iter in 0..opts.max_iters {
        iterations = iter;
        // Residuals.
        let ax = apply_a(&x);
        let r_p: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
        let mut r_d = c_min.sub(&z).sub(&apply_a_star(&y));
        r_d.hermitize();
        let mu = x.inner_re(&z) / n as f64;

        let pv = c_max.inner_re(&x);
        let y_dot_b: f64 = y.iter().zip(&b).map(|(a, c)| a * c).sum();
        let dv = -y_dot_b;
        let rp_inf = r_p.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let rd_norm = r_d.frobenius_norm();
        let gap_ok = (pv - dv).abs() <= opts.gap_tol * (1.0 + pv.abs())
            && mu * n as f64 <= opts.gap_tol * (1.0 + pv.abs() + dv.abs());
        let feas_ok =
            rp_inf <= opts.feas_tol * (1.0 + b_inf) && rd_norm <= opts.feas_tol * c_scale;

        if opts.verbosity == Verbosity::Debug {
            eprintln!(
                "sdp iter={iter} mu={mu:.3e} gap={:.3e} rp={rp_inf:.3e} rd={:.3e}",
                (pv - dv).abs(),
                rd_norm
            );
        }

        let score = (rp_inf / (1.0 + b_inf))
            .max(rd_norm / c_scale)
            .max((pv - dv).abs() / (1.0 + pv.abs()));
        if best.as_ref().map_or(true, |(s, ..)| score < *s) {
            best = Some((score, x.clone(), z.clone(), y_dot_b, iter, rd_norm));
        }

        if gap_ok && feas_ok {
            status = SdpStatus::Optimal;
            best = Some((score, x.clone(), z.clone(), y_dot_b, iter, rd_norm));
            break;
        }
        // Divergence heuristic: unbounded dual certifies primal
        // infeasibility for equality-constrained problems.
        let y_inf = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if y_inf > 1e10 * (1.0 + b_inf) || !mu.is_finite() {
            if y_inf > 1e10 * (1.0 + b_inf) {
                status = SdpStatus::Infeasible;
            }
            break;
        }

        // Nesterov-Todd scaling W = Z^{-1/2}(Z^{1/2} X Z^{1/2})^{1/2} Z^{-1/2}.
        let eig_z = hermitian_eig(&z)?;
        let z_floor = eig_z.max_eigenvalue().max(1e-300) * 1e-16;
        let z_half = eig_z.apply_fn(|l| l.max(z_floor).sqrt());
        let z_inv_half = eig_z.apply_fn(|l| 1.0 / l.max(z_floor).sqrt());
        let z_inv = eig_z.apply_fn(|l| 1.0 / l.max(z_floor));
        let mut m_mat = z_half.matmul(&x).matmul(&z_half);
        m_mat.hermitize();
        let eig_m = hermitian_eig(&m_mat)?;
        let m_floor = eig_m.max_eigenvalue().max(1e-300) * 1e-16;
        let m_half = eig_m.apply_fn(|l| l.max(m_floor).sqrt());
        let mut w = z_inv_half.matmul(&m_half).matmul(&z_inv_half);
        w.hermitize();

        // Schur complement S[i][j] = <A_i, W A_j W>.
        let t_mats: Vec<ComplexMatrix> = triplets
            .iter()
            .map(|t| {
                let mut a = ComplexMatrix::zeros(n, n);
                t.axpy_into(1.0, &mut a);
                let mut wa = w.matmul(&a).matmul(&w);
                wa.hermitize();
                wa
            })
            .collect();
        let mut s = vec![0.0f64; m * m];
        for i in 0..m {
            for j in i..m {
                let v = triplets[i].trace_product(&t_mats[j]);
                s[i * m + j] = v;
                s[j * m + i] = v;
            }
        }
        let trace_s: f64 = (0..m).map(|i| s[i * m + i]).sum();
        let chol = {
            let mut ridge = 0.0f64;
            let mut fac = cholesky(&s, m);
            while fac.is_none() && ridge < 1e-6 * trace_s.max(1e-300) {
                ridge = if ridge == 0.0 {
                    1e-14 * trace_s.max(1e-300) / m as f64
                } else {
                    ridge * 100.0
                };
                let mut s2 = s.clone();
                for i in 0..m {
                    s2[i * m + i] += ridge;
                }
                fac = cholesky(&s2, m);
            }
            fac
        };
        let Some(l_factor) = chol else {
            break;
        };

        // Whitened inverses for step lengths.
        let eig_x = hermitian_eig(&x)?;
        let x_floor = eig_x.max_eigenvalue().max(1e-300) * 1e-16;
        let x_inv_half = eig_x.apply_fn(|l| 1.0 / l.max(x_floor).sqrt());

        // Shared direction solve for a given central-path residual R_c:
        // S dy = r_p - A(R_c) + A(W R_d W); dZ = R_d - A*(dy);
        // dX = R_c - W dZ W.
        let w_rd_w = {
            let mut t = w.matmul(&r_d).matmul(&w);
            t.hermitize();
            t
        };
        let a_wrdw = apply_a(&w_rd_w);
        let solve_direction = |r_c: &ComplexMatrix| -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
            let a_rc = apply_a(r_c);
            let rhs: Vec<f64> = (0..m).map(|i| r_p[i] - a_rc[i] + a_wrdw[i]).collect();
            let dy = cholesky_solve(&l_factor, m, &rhs);
            let mut dz = r_d.sub(&apply_a_star(&dy));
            dz.hermitize();
            let mut dx = r_c.sub(&w.matmul(&dz).matmul(&w));
            dx.hermitize();
            (dx, dy, dz)
        };

        // Predictor (affine scaling).
        let r_c_aff = x.scale_re(-1.0);
        let (dx_aff, _dy_aff, dz_aff) = solve_direction(&r_c_aff);
        let ap_aff = max_step(&x_inv_half, &dx_aff).min(1.0);
        let ad_aff = max_step(&z_inv_half, &dz_aff).min(1.0);
        let x_aff = {
            let mut t = x.clone();
            t.axpy(Complex64::new(ap_aff, 0.0), &dx_aff);
            t
        };
        let z_aff = {
            let mut t = z.clone();
            t.axpy(Complex64::new(ad_aff, 0.0), &dz_aff);
            t
        };
        let mu_aff = (x_aff.inner_re(&z_aff) / n as f64).max(0.0);
        let sigma = ((mu_aff / mu).powi(3)).clamp(1e-8, 0.999);

        // Corrector with Mehrotra second-order term.
        let corr = herm_part(&dx_aff.matmul(&dz_aff).matmul(&z_inv));
        let mut r_c = z_inv.scale_re(sigma * mu).sub(&x).sub(&corr);
        r_c.hermitize();
        let (dx, dy, dz) = solve_direction(&r_c);

        let gamma = 0.98;
        let ap = (gamma * max_step(&x_inv_half, &dx)).min(1.0);
        let ad = (gamma * max_step(&z_inv_half, &dz)).min(1.0);

        x.axpy(Complex64::new(ap, 0.0), &dx);
        x.hermitize();
        for (yi, dyi) in y.iter_mut().zip(&dy) {
            *yi += ad * dyi;
        }
        z.axpy(Complex64::new(ad, 0.0), &dz);
        z.hermitize();

        if ap < 1e-8 && ad < 1e-8 {
            // Stalled; stop with the best iterate seen so far.
            break;
        }
    }

    let (_, bx, bz, by_dot_b, best_iter, brd) = best.expect("at least one iterate");
    let iterations = if status == SdpStatus::Optimal {
        best_iter
    } else {
        iterations
    };
    let sol = finish(&bx, &bz, by_dot_b, status, iterations, brd);
    if opts.verbosity != Verbosity::Quiet {
        eprintln!(
            "sdp done status={:?} iters={} primal={:.9e} dual={:.9e} rp={:.3e}",
            sol.status, sol.iterations, sol.primal_value, sol.dual_value, sol.primal_residual
        );
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Part, Party};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(n: usize, rng: &mut StdRng) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let mut h = g.add(&g.dagger()).scale_re(0.5);
        h.hermitize();
        h
    }

    fn trace_one_problem(c: ComplexMatrix) -> SdpProblem {
        let n = c.rows();
        SdpProblem::new(c, vec![(ComplexMatrix::identity(n), 1.0)]).unwrap()
    }

    #[test]
    fn maximize_over_spectraplex_matches_lambda_max() {
        let mut rng = StdRng::seed_from_u64(11);
        for n in [2usize, 3, 4, 6] {
            let c = random_hermitian(n, &mut rng);
            let lmax = hermitian_eig(&c).unwrap().max_eigenvalue();
            let sol = solve(&trace_one_problem(c), &SolveOptions::default()).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal);
            assert!(
                (sol.primal_value - lmax).abs() < 1e-7,
                "n={n}: {} vs {lmax}",
                sol.primal_value
            );
        }
    }

    #[test]
    fn complementary_slackness_and_gap_at_optimum() {
        let mut rng = StdRng::seed_from_u64(29);
        let c = random_hermitian(4, &mut rng);
        let opts = SolveOptions::default();
        let sol = solve(&trace_one_problem(c), &opts).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        let xz = sol.omega.inner_re(&sol.dual_slack);
        assert!(xz.abs() <= 10.0 * opts.gap_tol, "Tr[wZ] = {xz}");
        assert!(
            (sol.primal_value - sol.dual_value).abs()
                <= opts.gap_tol * (1.0 + sol.primal_value.abs())
        );
        assert!(sol.primal_residual <= opts.feas_tol);
        let lmin = hermitian_eig(&sol.omega).unwrap().min_eigenvalue();
        assert!(lmin >= -opts.feas_tol);
    }

    #[test]
    fn scaling_covariance() {
        let mut rng = StdRng::seed_from_u64(31);
        let c = random_hermitian(3, &mut rng);
        let base = solve(&trace_one_problem(c.clone()), &SolveOptions::default()).unwrap();
        let scaled = solve(
            &trace_one_problem(c.scale_re(3.7)),
            &SolveOptions::default(),
        )
        .unwrap();
        assert!((scaled.primal_value - 3.7 * base.primal_value).abs() < 1e-6);
        assert!(scaled.omega.sub(&base.omega).max_abs() < 1e-5);
    }

    #[test]
    fn determinism_identical_runs() {
        let mut rng = StdRng::seed_from_u64(37);
        let c = random_hermitian(4, &mut rng);
        let p = trace_one_problem(c);
        let s1 = solve(&p, &SolveOptions::default()).unwrap();
        let s2 = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(s1.iterations, s2.iterations);
        assert_eq!(s1.omega.data(), s2.omega.data());
        assert_eq!(s1.primal_value, s2.primal_value);
    }

    #[test]
    fn infeasible_toy_detected() {
        let n = 2;
        let p = SdpProblem::new(
            ComplexMatrix::identity(n),
            vec![
                (ComplexMatrix::identity(n), 1.0),
                (ComplexMatrix::identity(n), 2.0),
            ],
        )
        .unwrap();
        let sol = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn redundant_consistent_constraints_ok() {
        let mut rng = StdRng::seed_from_u64(41);
        let c = random_hermitian(3, &mut rng);
        let lmax = hermitian_eig(&c).unwrap().max_eigenvalue();
        let p = SdpProblem::new(
            c,
            vec![
                (ComplexMatrix::identity(3), 1.0),
                (ComplexMatrix::identity(3).scale_re(2.0), 2.0),
            ],
        )
        .unwrap();
        let sol = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal_value - lmax).abs() < 1e-7);
    }

    #[test]
    fn brute_force_spectraplex_grid_oracle() {
        // Independent oracle: exhaustive grid over pure states (the
        // extreme points of the spectraplex) for n = 2 and n = 3.
        let mut rng = StdRng::seed_from_u64(43);
        for n in [2usize, 3] {
            let c = random_hermitian(n, &mut rng);
            let mut best = f64::NEG_INFINITY;
            let steps = if n == 2 { 60 } else { 56 };
            let mut psi = vec![Complex64::new(0.0, 0.0); n];
            let grid_point = |angles: &[f64], phases: &[f64], psi: &mut Vec<Complex64>| {
                // Hyperspherical parametrization of the amplitude vector.
                let mut amp = 1.0f64;
                for (k, item) in psi.iter_mut().enumerate().take(n - 1) {
                    let a = angles[k];
                    *item = Complex64::new(
                        (amp * a.cos()) * phases[k].cos(),
                        (amp * a.cos()) * phases[k].sin(),
                    );
                    amp *= a.sin();
                }
                psi[n - 1] = Complex64::new(amp, 0.0);
            };
            let half_pi = std::f64::consts::FRAC_PI_2;
            let two_pi = std::f64::consts::TAU;
            if n == 2 {
                for i in 0..=steps {
                    for j in 0..steps {
                        let angles = [half_pi * i as f64 / steps as f64];
                        let phases = [two_pi * j as f64 / steps as f64];
                        grid_point(&angles, &phases, &mut psi);
                        let val = expectation(&c, &psi);
                        best = best.max(val);
                    }
                }
            } else {
                for i in 0..=steps {
                    for j in 0..=steps {
                        for pi in 0..steps {
                            for pj in 0..steps {
                                let angles = [
                                    half_pi * i as f64 / steps as f64,
                                    half_pi * j as f64 / steps as f64,
                                ];
                                let phases = [
                                    two_pi * pi as f64 / steps as f64,
                                    two_pi * pj as f64 / steps as f64,
                                ];
                                grid_point(&angles, &phases, &mut psi);
                                best = best.max(expectation(&c, &psi));
                            }
                        }
                    }
                }
            }
            let sol = solve(&trace_one_problem(c), &SolveOptions::default()).unwrap();
            assert!(
                (sol.primal_value - best).abs() < 5e-3,
                "n={n}: sdp {} vs grid {best}",
                sol.primal_value
            );
        }
    }

    fn expectation(c: &ComplexMatrix, psi: &[Complex64]) -> f64 {
        let n = psi.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..n {
            for col in 0..n {
                acc += psi[r].conj() * c[(r, col)] * psi[col];
            }
        }
        acc.re
    }

    #[test]
    fn marginal_constraints_count_and_satisfaction() {
        let dims = SystemDims::new(vec![
            Part::new(Party::A, 2),
            Part::new(Party::B, 2),
            Part::new(Party::B, 2),
        ])
        .unwrap();
        let rho = crate::states::max_entangled(2).unwrap();
        let cons = marginal_constraint_operators(&dims, 2, rho.matrix()).unwrap();
        assert_eq!(cons.len(), 16);
        // Canonical extension rho (x) I/2 satisfies all of them.
        let omega = rho.matrix().kron(&ComplexMatrix::identity(2).scale_re(0.5));
        for (a, b) in &cons {
            let val = a.matmul(&omega).trace().re;
            assert!((val - b).abs() < 1e-12, "constraint violated: {val} vs {b}");
        }
        // A candidate with the wrong marginal violates at least one.
        let bad = ComplexMatrix::identity(8).scale_re(1.0 / 8.0);
        let worst = cons
            .iter()
            .map(|(a, b)| (a.matmul(&bad).trace().re - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst > 0.2);
    }

    #[test]
    fn marginal_constraints_reject_wrong_target_dim() {
        let dims = SystemDims::new(vec![
            Part::new(Party::A, 2),
            Part::new(Party::B, 2),
            Part::new(Party::B, 3),
        ])
        .unwrap();
        let rho = crate::states::max_entangled(2).unwrap();
        // Tracing part 1 leaves a 6-dim space; a 4x4 target mismatches.
        assert!(matches!(
            marginal_constraint_operators(&dims, 1, rho.matrix()),
            Err(SdpError::MarginalMismatch(_))
        ));
    }

    #[test]
    fn rejects_non_hermitian_objective() {
        let c = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            SdpProblem::new(c, vec![(ComplexMatrix::identity(2), 1.0)]),
            Err(SdpError::NotHermitian { .. })
        ));
    }

    #[test]
    fn rejects_empty_constraints() {
        assert!(matches!(
            SdpProblem::new(ComplexMatrix::identity(2), vec![]),
            Err(SdpError::EmptyConstraints)
        ));
    }
}
