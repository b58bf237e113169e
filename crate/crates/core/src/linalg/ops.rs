//! Partial trace, subsystem permutation, support projector, purification.

use num_complex::Complex64;

use super::dims::SystemDims;
use super::eig::hermitian_eig;
use super::matrix::ComplexMatrix;
use super::LinalgError;

/// Reduces an operator to the parts listed in `keep` (indices into
/// `dims.parts()`, in their original order). The trace is preserved; an
/// empty keep-set yields the 1x1 full trace.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: &SystemDims,
    keep: &[usize],
) -> Result<ComplexMatrix, LinalgError> {
    let n = m.require_square()?;
    dims.require_matches(n)?;
    let num_parts = dims.len();
    for &k in keep {
        if k >= num_parts {
            return Err(LinalgError::BadDims(format!(
                "keep index {k} out of range for {num_parts} parts"
            )));
        }
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() || sorted != keep {
        return Err(LinalgError::BadDims(
            "keep-set must be strictly increasing part indices".into(),
        ));
    }

    let traced: Vec<usize> = (0..num_parts).filter(|i| !keep.contains(i)).collect();
    let keep_dim: usize = keep.iter().map(|&i| dims.parts()[i].dim).product();
    let trace_dim: usize = traced.iter().map(|&i| dims.parts()[i].dim).product();

    let keep_dims: Vec<usize> = keep.iter().map(|&i| dims.parts()[i].dim).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims.parts()[i].dim).collect();

    let unflatten = |mut idx: usize, part_dims: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize; part_dims.len()];
        for (slot, d) in out.iter_mut().zip(part_dims).rev() {
            *slot = idx % d;
            idx /= d;
        }
        out
    };

    let mut out = ComplexMatrix::zeros(keep_dim, keep_dim);
    let mut full_row = vec![0usize; num_parts];
    let mut full_col = vec![0usize; num_parts];
    for kr in 0..keep_dim {
        let kr_multi = unflatten(kr, &keep_dims);
        for kc in 0..keep_dim {
            let kc_multi = unflatten(kc, &keep_dims);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..trace_dim {
                let t_multi = unflatten(t, &traced_dims);
                for (pos, &part) in keep.iter().enumerate() {
                    full_row[part] = kr_multi[pos];
                    full_col[part] = kc_multi[pos];
                }
                for (pos, &part) in traced.iter().enumerate() {
                    full_row[part] = t_multi[pos];
                    full_col[part] = t_multi[pos];
                }
                acc += m[(dims.flatten(&full_row), dims.flatten(&full_col))];
            }
            out[(kr, kc)] = acc;
        }
    }
    Ok(out)
}

/// Relabels subsystems: part `j` of the output is part `new_from_old[j]`
/// of the input. Returns the permuted operator and its dims.
pub fn permute_systems(
    m: &ComplexMatrix,
    dims: &SystemDims,
    new_from_old: &[usize],
) -> Result<(ComplexMatrix, SystemDims), LinalgError> {
    let n = m.require_square()?;
    dims.require_matches(n)?;
    if new_from_old.len() != dims.len() {
        return Err(LinalgError::BadDims(
            "permutation length must equal part count".into(),
        ));
    }
    let mut seen = vec![false; dims.len()];
    for &i in new_from_old {
        if i >= dims.len() || seen[i] {
            return Err(LinalgError::BadDims("invalid permutation".into()));
        }
        seen[i] = true;
    }

    let new_dims = dims.permuted(new_from_old);
    let mut out = ComplexMatrix::zeros(n, n);
    let mut old_multi_r = vec![0usize; dims.len()];
    let mut old_multi_c = vec![0usize; dims.len()];
    for r in 0..n {
        let new_r = new_dims.unflatten(r);
        for (j, &old) in new_from_old.iter().enumerate() {
            old_multi_r[old] = new_r[j];
        }
        let old_r = dims.flatten(&old_multi_r);
        for c in 0..n {
            let new_c = new_dims.unflatten(c);
            for (j, &old) in new_from_old.iter().enumerate() {
                old_multi_c[old] = new_c[j];
            }
            out[(r, c)] = m[(old_r, dims.flatten(&old_multi_c))];
        }
    }
    Ok((out, new_dims))
}

/// Projector onto the span of eigenvectors with eigenvalue above
/// `rel_tol * lambda_max`. The input must be PSD: an eigenvalue below
/// `-1e-8 * lambda_max` is an error rather than silently clipped.
pub fn support_projector(
    h: &ComplexMatrix,
    rel_tol: f64,
) -> Result<ComplexMatrix, LinalgError> {
    let eig = hermitian_eig(h)?;
    let lmax = eig.max_eigenvalue().max(0.0);
    let lmin = eig.min_eigenvalue();
    if lmin < -1e-8 * lmax.max(1e-300) {
        return Err(LinalgError::NotPsd {
            min_eigenvalue: lmin,
        });
    }
    let cutoff = rel_tol * lmax;
    Ok(eig.apply_fn(|l| if l > cutoff { 1.0 } else { 0.0 }))
}

/// Rank of the operator under the same cutoff rule as [`support_projector`].
pub fn support_rank(h: &ComplexMatrix, rel_tol: f64) -> Result<usize, LinalgError> {
    let eig = hermitian_eig(h)?;
    let cutoff = rel_tol * eig.max_eigenvalue().max(0.0);
    Ok(eig.eigenvalues.iter().filter(|&&l| l > cutoff).count())
}

/// Purifies a density operator: returns a column state vector on
/// system (x) reference with the reference dimension equal to the rank.
///
/// `Tr_ref |psi><psi| = rho` up to the eigendecomposition accuracy.
pub fn purify(rho: &ComplexMatrix, rank_rel_tol: f64) -> Result<ComplexMatrix, LinalgError> {
    let n = rho.require_square()?;
    let eig = hermitian_eig(rho)?;
    let cutoff = rank_rel_tol * eig.max_eigenvalue().max(0.0);
    let kept: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i] > cutoff)
        .collect();
    let rank = kept.len().max(1);
    let mut psi = ComplexMatrix::zeros(n * rank, 1);
    for (slot, &i) in kept.iter().enumerate() {
        let amp = eig.eigenvalues[i].max(0.0).sqrt();
        for r in 0..n {
            // |psi> = sum_i sqrt(l_i) |v_i> (x) |i>_ref
            psi[(r * rank + slot, 0)] = eig.eigenvectors[(r, i)] * amp;
        }
    }
    Ok(psi)
}
