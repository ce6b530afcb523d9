use std::fs;
use std::path::Path;
use std::process::Command;

use qtqft_cli::cache::{cache_load, cache_path, cache_store, load_or_build, CacheError, CacheFile, CACHE_VERSION};
use qtqft_core::fusion::direct_basis_product;
use qtqft_core::{BoxContext, QuantumRing, StructureTable};

fn ctx(r: usize, s: usize) -> BoxContext {
    BoxContext::new(r, s).unwrap()
}

#[test]
fn file_name_embeds_box_and_version() {
    let path = cache_path(Path::new("/tmp/x"), ctx(2, 3));
    assert_eq!(path.file_name().unwrap().to_str().unwrap(), format!("qtqft-r2-s3-v{CACHE_VERSION}.json"));
}

#[test]
fn round_trip_reproduces_every_basis_product() {
    let dir = tempfile::tempdir().unwrap();
    let c = ctx(2, 2);
    let path = cache_path(dir.path(), c);
    cache_store(&StructureTable::build(c), &path).unwrap();
    let ring = QuantumRing::with_table(cache_load(c, &path).unwrap());
    let basis = c.partitions();
    assert_eq!(basis.len(), 6);
    for a in &basis {
        for b in &basis {
            // Compare against the table-free Giambelli/Pieri route.
            assert_eq!(ring.basis_product(a, b).unwrap(), direct_basis_product(c, a, b).unwrap(), "{a}*{b}");
        }
    }
}

#[test]
fn coefficients_are_decimal_strings() {
    let c = ctx(2, 2);
    let file = CacheFile::from_table(&StructureTable::build(c));
    let v = serde_json::to_value(&file).unwrap();
    let first = &v["constants"][0];
    assert!(first["coeff"].is_string());
    assert!(first["q_exp"].is_i64());
    assert_eq!((v["r"].as_u64(), v["s"].as_u64(), v["version"].as_u64()), (Some(2), Some(2), Some(CACHE_VERSION as u64)));
}

#[test]
fn foreign_box_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("other.json");
    cache_store(&StructureTable::build(ctx(2, 3)), &path).unwrap();
    match cache_load(ctx(2, 2), &path) {
        Err(CacheError::BoxMismatch { found_r: 2, found_s: 3, r: 2, s: 2 }) => {}
        other => panic!("expected a box mismatch, got {other:?}"),
    }
}

#[test]
fn stale_version_is_rebuilt_not_reused() {
    let dir = tempfile::tempdir().unwrap();
    let c = ctx(1, 2);
    let path = cache_path(dir.path(), c);
    let mut file = CacheFile::from_table(&StructureTable::build(c));
    file.version = CACHE_VERSION + 1;
    // Poison a coefficient so silent reuse would be visible.
    file.constants[0].coeff = "7".into();
    fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    assert!(matches!(cache_load(c, &path), Err(CacheError::Version { .. })));

    let mut warnings = Vec::new();
    let table = load_or_build(c, dir.path(), &mut |w| warnings.push(w));
    assert_eq!(table, StructureTable::build(c));
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].contains("version"), "{}", warnings[0]);
    assert_eq!(cache_load(c, &path).unwrap(), table);
}

#[test]
fn corrupt_file_is_rebuilt_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let c = ctx(2, 2);
    let path = cache_path(dir.path(), c);
    fs::write(&path, "{ not json").unwrap();
    let mut warnings = Vec::new();
    let table = load_or_build(c, dir.path(), &mut |w| warnings.push(w));
    assert_eq!(table, StructureTable::build(c));
    assert!(warnings.iter().any(|w| w.contains("corrupt")), "{warnings:?}");
    assert!(cache_load(c, &path).is_ok());
}

#[test]
fn missing_cache_is_built_silently() {
    let dir = tempfile::tempdir().unwrap();
    let c = ctx(2, 2);
    let mut warnings = Vec::new();
    load_or_build(c, dir.path(), &mut |w| warnings.push(w));
    assert!(warnings.is_empty());
    assert!(cache_path(dir.path(), c).exists());
}

fn run_json(args: &[&str], cache: &Path) -> (Option<i32>, Vec<u8>, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_qtqft"))
        .args(args)
        .env("QTQFT_CACHE_DIR", cache)
        .output()
        .unwrap();
    (o.status.code(), o.stdout, String::from_utf8(o.stderr).unwrap())
}

#[test]
fn deleting_the_cache_gives_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--r", "2", "--s", "3", "--json", "tensor", "1", "-1", "1", "1"];
    let (code, cold, _) = run_json(&args, dir.path());
    assert_eq!(code, Some(0));
    let path = cache_path(dir.path(), ctx(2, 3));
    assert!(path.exists(), "the environment variable selects the cache directory");
    let (_, warm, _) = run_json(&args, dir.path());
    fs::remove_file(&path).unwrap();
    let (_, rebuilt, _) = run_json(&args, dir.path());
    assert_eq!(cold, warm);
    assert_eq!(cold, rebuilt);
}

#[test]
fn cli_warns_on_a_foreign_cache_under_the_expected_name() {
    let dir = tempfile::tempdir().unwrap();
    // A (2,3) table written where the (2,2) cache should live.
    cache_store(&StructureTable::build(ctx(2, 3)), &cache_path(dir.path(), ctx(2, 2))).unwrap();
    let (code, out, err) = run_json(&["--r", "2", "--s", "2", "product", "1", "1"], dir.path());
    assert_eq!(code, Some(0));
    assert_eq!(String::from_utf8(out).unwrap().trim(), "s(1,1) + s(2,0)");
    assert!(err.contains("2x3 box"), "{err}");
}
