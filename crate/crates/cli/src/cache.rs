//! On-disk structure-constant cache.
//!
//! One JSON file per box, named `qtqft-r{r}-s{s}-v{version}.json`. Anything
//! that does not match the requested box and the current format version is
//! refused by [`cache_load`]; [`load_or_build`] turns a refusal into a rebuild.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use qtqft_core::{BoxContext, Partition, StructureTable, TableRecord};
use serde::{Deserialize, Serialize};

pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt cache file: {0}")]
    Corrupt(String),
    #[error("cache format version {found}, expected {expected}")]
    Version { found: u32, expected: u32 },
    #[error("cache is for the {found_r}x{found_s} box, expected {r}x{s}")]
    BoxMismatch { found_r: usize, found_s: usize, r: usize, s: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub a: Partition,
    pub b: Partition,
    pub c: Partition,
    pub q_exp: i64,
    /// Decimal string so that large coefficients survive JSON readers.
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheFile {
    pub version: u32,
    pub r: usize,
    pub s: usize,
    pub constants: Vec<CacheRecord>,
}

impl CacheFile {
    pub fn from_table(table: &StructureTable) -> Self {
        let ctx = table.ctx();
        let constants = table
            .records()
            .into_iter()
            .map(|rec| CacheRecord { a: rec.a, b: rec.b, c: rec.c, q_exp: rec.q_exp, coeff: rec.coeff.to_string() })
            .collect();
        Self { version: CACHE_VERSION, r: ctx.r(), s: ctx.s(), constants }
    }

    pub fn into_table(self, ctx: BoxContext) -> Result<StructureTable, CacheError> {
        if self.version != CACHE_VERSION {
            return Err(CacheError::Version { found: self.version, expected: CACHE_VERSION });
        }
        if (self.r, self.s) != (ctx.r(), ctx.s()) {
            return Err(CacheError::BoxMismatch { found_r: self.r, found_s: self.s, r: ctx.r(), s: ctx.s() });
        }
        let mut records = Vec::with_capacity(self.constants.len());
        for rec in self.constants {
            let coeff: BigInt = rec
                .coeff
                .parse()
                .map_err(|_| CacheError::Corrupt(format!("coefficient {:?} is not an integer", rec.coeff)))?;
            records.push(TableRecord { a: rec.a, b: rec.b, c: rec.c, q_exp: rec.q_exp, coeff });
        }
        StructureTable::from_records(ctx, records).map_err(|e| CacheError::Corrupt(e.to_string()))
    }
}

pub fn cache_path(dir: &Path, ctx: BoxContext) -> PathBuf {
    dir.join(format!("qtqft-r{}-s{}-v{}.json", ctx.r(), ctx.s(), CACHE_VERSION))
}

pub fn cache_store(table: &StructureTable, path: &Path) -> Result<(), CacheError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let text = serde_json::to_string(&CacheFile::from_table(table)).map_err(|e| CacheError::Corrupt(e.to_string()))?;
    // Write-then-rename so a crashed run never leaves a half-written cache.
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn cache_load(ctx: BoxContext, path: &Path) -> Result<StructureTable, CacheError> {
    let text = fs::read_to_string(path)?;
    let file: CacheFile = serde_json::from_str(&text).map_err(|e| CacheError::Corrupt(e.to_string()))?;
    file.into_table(ctx)
}

/// Loads the cached table for `ctx` from `dir`, rebuilding and rewriting it
/// when the file is missing or unusable. Warnings go to `warn`.
pub fn load_or_build(ctx: BoxContext, dir: &Path, warn: &mut dyn FnMut(String)) -> StructureTable {
    let path = cache_path(dir, ctx);
    match cache_load(ctx, &path) {
        Ok(table) => return table,
        Err(CacheError::Io(e)) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => warn(format!("warning: ignoring cache {}: {e}; rebuilding", path.display())),
    }
    let table = StructureTable::build(ctx);
    if let Err(e) = cache_store(&table, &path) {
        warn(format!("warning: could not write cache {}: {e}", path.display()));
    }
    table
}
