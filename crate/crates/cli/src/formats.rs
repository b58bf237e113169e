//! File formats: the JSON state-file schema and the CSV sweep rows.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use unext::linalg::{ComplexMatrix, Part, Party, SystemDims};
use unext::states::DensityOperator;

/// Default validation tolerance for parsed operators.
pub const DEFAULT_STATE_TOL: f64 = 1e-8;

/// JSON document describing a bipartite density operator.
///
/// `dims.a` and `dims.b` list the subsystem dimensions of each party (in
/// subsystem order, A parts first); `dims.erasure_extended` optionally
/// flags each part, in the same order, as carrying an erasure level.
/// Matrix entries are `[re, im]` pairs, row-major.
#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: StateDims,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StateDims {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erasure_extended: Option<Vec<bool>>,
}

impl StateFile {
    pub fn from_density(rho: &DensityOperator) -> Self {
        let canon = rho
            .canonical_a_first()
            .expect("valid state has a canonical layout");
        let a: Vec<usize> = canon
            .dims()
            .parts()
            .iter()
            .filter(|p| p.party == Party::A)
            .map(|p| p.dim)
            .collect();
        let b: Vec<usize> = canon
            .dims()
            .parts()
            .iter()
            .filter(|p| p.party == Party::B)
            .map(|p| p.dim)
            .collect();
        let flags: Vec<bool> = canon
            .dims()
            .parts()
            .iter()
            .map(|p| p.erasure_extended)
            .collect();
        let n = canon.dim();
        let matrix = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let z = canon.matrix()[(r, c)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            dims: StateDims {
                a,
                b,
                erasure_extended: flags.iter().any(|&f| f).then_some(flags),
            },
            tol: None,
            matrix,
        }
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        if self.dims.a.is_empty() || self.dims.b.is_empty() {
            bail!("dims invariant violated: need at least one A-side and one B-side part");
        }
        let mut parts: Vec<Part> = Vec::new();
        for &d in &self.dims.a {
            parts.push(Part::new(Party::A, d));
        }
        for &d in &self.dims.b {
            parts.push(Part::new(Party::B, d));
        }
        if let Some(flags) = &self.dims.erasure_extended {
            if flags.len() != parts.len() {
                bail!(
                    "dims invariant violated: erasure_extended has {} entries for {} parts",
                    flags.len(),
                    parts.len()
                );
            }
            for (p, &f) in parts.iter_mut().zip(flags) {
                p.erasure_extended = f;
            }
        }
        let dims = SystemDims::new(parts)
            .map_err(|e| anyhow::anyhow!("dims invariant violated: {e}"))?;
        let n = dims.total_dim();
        if self.matrix.len() != n {
            bail!(
                "matrix dimension invariant violated: {} rows for dims product {n}",
                self.matrix.len()
            );
        }
        let mut m = ComplexMatrix::zeros(n, n);
        for (r, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                bail!(
                    "matrix dimension invariant violated: row {r} has {} entries, expected {n}",
                    row.len()
                );
            }
            for (c, &[re, im]) in row.iter().enumerate() {
                m[(r, c)] = num_complex::Complex64::new(re, im);
            }
        }
        let tol = self.tol.unwrap_or(DEFAULT_STATE_TOL);
        DensityOperator::with_uniform_tolerance(m, dims, tol)
            .map_err(|e| anyhow::anyhow!("density operator invariant violated: {e}"))
    }
}

pub fn read_state_file(path: &Path) -> Result<DensityOperator> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read state file {}", path.display()))?;
    let parsed: StateFile = serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("malformed state file JSON: {e}"))?;
    parsed.to_density()
}

pub fn write_state_file(path: &Path, rho: &DensityOperator) -> Result<()> {
    let doc = StateFile::from_density(rho);
    let text = serde_json::to_string_pretty(&doc)?;
    fs::write(path, text)
        .with_context(|| format!("cannot write state file {}", path.display()))?;
    Ok(())
}

/// Frozen CSV header of the sweep output.
pub const SWEEP_HEADER: [&str; 11] = [
    "family",
    "param_name",
    "param_value",
    "d",
    "k",
    "emin_bits",
    "lemma1_bound_bits",
    "coherent_info_bits",
    "is_2ext_sup",
    "solver_iters",
    "wall_ms",
];

/// One sweep grid point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub family: String,
    pub param_name: String,
    pub param_value: f64,
    pub d: usize,
    pub k: usize,
    pub emin_bits: f64,
    pub lemma1_bound_bits: f64,
    pub coherent_info_bits: f64,
    pub is_2ext_sup: bool,
    pub solver_iters: usize,
    pub wall_ms: u128,
}

/// Formats with 12 significant digits.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

impl SweepRow {
    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.family.clone(),
            self.param_name.clone(),
            fmt_sig12(self.param_value),
            self.d.to_string(),
            self.k.to_string(),
            fmt_sig12(self.emin_bits),
            fmt_sig12(self.lemma1_bound_bits),
            fmt_sig12(self.coherent_info_bits),
            self.is_2ext_sup.to_string(),
            self.solver_iters.to_string(),
            self.wall_ms.to_string(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use unext::states::{erased_state, max_entangled};

    #[test]
    fn state_file_roundtrip_exact() {
        for rho in [max_entangled(2).unwrap(), erased_state(0.3, 2).unwrap()] {
            let doc = StateFile::from_density(&rho);
            let back = doc.to_density().unwrap();
            let canon = rho.canonical_a_first().unwrap();
            assert!(back.matrix().sub(canon.matrix()).max_abs() < 1e-12);
            assert_eq!(back.dims(), canon.dims());
        }
    }

    #[test]
    fn rejects_bad_trace() {
        let rho = max_entangled(2).unwrap();
        let mut doc = StateFile::from_density(&rho);
        doc.matrix[0][0] = [0.9, 0.0];
        let err = doc.to_density().unwrap_err().to_string();
        assert!(err.contains("invariant violated"), "{err}");
    }

    #[test]
    fn rejects_wrong_dims() {
        let rho = max_entangled(2).unwrap();
        let mut doc = StateFile::from_density(&rho);
        doc.dims.a = vec![3];
        let err = doc.to_density().unwrap_err().to_string();
        assert!(err.contains("invariant violated"), "{err}");
    }

    #[test]
    fn sig12_format() {
        assert_eq!(fmt_sig12(0.25), "2.50000000000e-1");
        assert_eq!(fmt_sig12(1.0), "1.00000000000e0");
    }
}
