//! On-disk cache of cell-integrated kernel tables.
//!
//! A table is stored under a file name built from the bit patterns of every
//! key component (kind, order, dimension, grid step, tolerance, extent), so
//! changing any of them selects a different file. Loaded tables are checked
//! against the requested key before use; unreadable entries are rebuilt.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use hlab_core::potential::{KernelKind, KernelSpec, KernelTable};

use crate::error::{HlabError, Result};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "HLAB_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct KernelCache {
    dir: Option<PathBuf>,
}

impl KernelCache {
    /// `$HLAB_CACHE_DIR`, or `hlab-kernels` under the system temp directory.
    pub fn from_env() -> Self {
        let dir = env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| env::temp_dir().join("hlab-kernels"));
        Self { dir: Some(dir) }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    /// Builds every table afresh.
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn file_name(spec: &KernelSpec, step: f64, extent: usize) -> String {
        let kind = match spec.kind {
            KernelKind::Bessel => "bessel",
            KernelKind::Riesz => "riesz",
        };
        format!(
            "{kind}-o{:016x}-n{}-h{:016x}-t{:016x}-e{extent}.json",
            spec.order.to_bits(),
            spec.dim,
            step.to_bits(),
            spec.tolerance.to_bits()
        )
    }

    /// Cached table for `spec` on a lattice with `step` and `extent`.
    pub fn table(&self, spec: KernelSpec, step: f64, extent: usize) -> Result<KernelTable> {
        let Some(dir) = &self.dir else {
            return Ok(KernelTable::build(spec, step, extent)?);
        };
        let path = dir.join(Self::file_name(&spec, step, extent));
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(table) = serde_json::from_str::<KernelTable>(&text) {
                if table.spec == spec && table.step == step && table.extent == extent && valid_len(&table) {
                    return Ok(table);
                }
            }
        }
        let table = KernelTable::build(spec, step, extent)?;
        fs::create_dir_all(dir).map_err(|e| HlabError::io(dir, e))?;
        // write then rename so concurrent readers never see a partial file
        let tmp = dir.join(format!(
            ".{}.{}.tmp",
            Self::file_name(&spec, step, extent),
            std::process::id()
        ));
        fs::write(&tmp, serde_json::to_string(&table)?).map_err(|e| HlabError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| HlabError::io(&path, e))?;
        Ok(table)
    }

    pub fn table_for_grid(&self, spec: KernelSpec, grid: &hlab_core::grid::GridSpec) -> Result<KernelTable> {
        self.table(spec, grid.step(), grid.cells_per_side)
    }
}

fn valid_len(t: &KernelTable) -> bool {
    let expect = if t.spec.dim == 1 { t.extent } else { t.extent * t.extent };
    t.weights.len() == expect
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_components_change_file_name() {
        let a = KernelSpec::bessel(1.5, 1).unwrap();
        let base = KernelCache::file_name(&a, 0.25, 16);
        assert_ne!(base, KernelCache::file_name(&KernelSpec::bessel(1.25, 1).unwrap(), 0.25, 16));
        assert_ne!(base, KernelCache::file_name(&a, 0.125, 16));
        assert_ne!(base, KernelCache::file_name(&a.with_tolerance(1e-8), 0.25, 16));
        assert_ne!(base, KernelCache::file_name(&KernelSpec::bessel(1.5, 2).unwrap(), 0.25, 16));
        assert_ne!(base, KernelCache::file_name(&KernelSpec::riesz(0.5, 1).unwrap(), 0.25, 16));
    }
}
