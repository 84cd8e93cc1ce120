mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use biorel::ingest::{cell_file, read_canonical, write_canonical};
use biorel::relcore::{catalog_entry, RelationInfo, Value};
use biorel::store::{
    BackendKind, FetchPolicy, Origin, Prompter, QueryPattern, Store, StoreConfig, StoreError,
};
use common::{build_fixture_data, fixture_store, rel, TestServer};

fn strs(rows: &[Vec<Value>], col: usize) -> BTreeSet<String> {
    rows.iter().map(|r| r[col].to_string()).collect()
}

#[test]
fn worked_queries_on_every_backend() {
    for backend in BackendKind::ALL {
        let (_dir, store) = fixture_store(backend);
        let q = |name: &str, p: QueryPattern| store.query_rows(&rel(name), &p).unwrap();

        let symb = q("map_hgnc_hgnc_symb", QueryPattern::free(2).bind(0, 19295));
        assert_eq!(symb, vec![vec![Value::Int(19295), Value::from("LMTK3")]], "{backend}");

        let rev = q("map_unip_hgnc_unip", QueryPattern::free(2).bind(1, "Q96Q04"));
        assert_eq!(rev, vec![vec![Value::Int(19295), Value::from("Q96Q04")]], "{backend}");

        let fwd = q("map_unip_hgnc_unip", QueryPattern::free(2).bind(0, 19295));
        let expected: BTreeSet<String> =
            ["A0A0A0MQW5", "A0A3B3IRV9", "A0A3B3ISL5", "A0A3B3ITQ7", "Q96Q04"].map(String::from).into();
        assert_eq!(strs(&fwd, 1), expected, "{backend}");
        assert_eq!(fwd.len(), 5);

        let isa = q("edge_gont_is_a", QueryPattern::free(2).bind(0, 139));
        assert_eq!(strs(&isa, 1), ["44431", "98588"].map(String::from).into(), "{backend}");

        let first = q("map_unip_hgnc_unip", QueryPattern::free(2).bind(1, "M0R009"));
        assert_eq!(first, vec![vec![Value::Int(5), Value::from("M0R009")]]);
    }
}

#[test]
fn fresh_store_has_no_handles() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(StoreConfig::new(BackendKind::Memory, dir.path())).unwrap();
    assert!(store.handles().is_empty());
    assert_eq!(store.import_count(), 0);
}

#[test]
fn never_policy_without_file() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(StoreConfig::new(BackendKind::Memory, dir.path())).unwrap();
    let err = store.ensure_table(&rel("map_hgnc_hgnc_symb")).unwrap_err();
    assert!(matches!(err, StoreError::TableMissingAndFetchForbidden(ref n) if n == "map_hgnc_hgnc_symb"));
}

#[test]
fn ensure_is_idempotent_and_single_flight() {
    for backend in BackendKind::ALL {
        let (_dir, store) = fixture_store(backend);
        let name = rel("map_unip_hgnc_unip");
        let handles: Vec<_> = std::thread::scope(|s| {
            let hs: Vec<_> = (0..8).map(|_| s.spawn(|| store.ensure_table(&name).unwrap())).collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(handles.windows(2).all(|w| Arc::ptr_eq(&w[0], &w[1])));
        assert_eq!(store.import_count(), 1);
        assert!(Arc::ptr_eq(&handles[0], &store.ensure_table(&name).unwrap()));
        assert_eq!(store.import_count(), 1);
        assert_eq!(store.handles().len(), 1);
        assert_eq!(handles[0].origin, Origin::Fixture);
        assert_eq!(handles[0].backend, backend);
    }
}

#[test]
fn row_count_matches_full_scan() {
    for backend in BackendKind::ALL {
        let (_dir, store) = fixture_store(backend);
        for name in ["map_hgnc_hgnc_symb", "edge_strg_hs_symb", "map_gont_symb_gont", "edge_gont_is_a"] {
            let name = rel(name);
            let info = store.table_info(&name).unwrap();
            let n = store.query(&name, &QueryPattern::free(name.arity())).unwrap().count() as u64;
            assert_eq!(info.row_count(), Some(n), "{backend} {name}");
            assert!(n > 0);
        }
    }
}

#[test]
fn bound_value_of_wrong_type() {
    let (_dir, store) = fixture_store(BackendKind::Memory);
    let err = store
        .query(&rel("map_hgnc_hgnc_symb"), &QueryPattern::free(2).bind(0, "LMTK3"))
        .err()
        .unwrap();
    assert!(matches!(err, StoreError::TypeMismatch { column: 0, .. }));
    let err = store.query(&rel("map_hgnc_hgnc_symb"), &QueryPattern::free(3)).err().unwrap();
    assert!(matches!(err, StoreError::ArityMismatch { .. }));
}

#[test]
fn import_round_trip_and_schema_check() {
    let name = rel("map_hgnc_hgnc_symb");
    let schema = &catalog_entry(&name).unwrap().schema;
    let rows = vec![
        vec![Value::Int(1), Value::from("A1BG")],
        vec![Value::Int(2), Value::from("A2M")],
        vec![Value::Int(2), Value::from("A2M-dup")],
    ];
    for backend in BackendKind::ALL {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("in.tsv.gz");
        write_canonical(&file, schema, &RelationInfo::new(), &rows).unwrap();
        let store = Store::open(StoreConfig::new(backend, dir.path().join("data"))).unwrap();
        let handle = store.import_canonical(&name, &file).unwrap();
        assert_eq!(handle.origin, Origin::LocalCache);
        let mut back = store.query_rows(&name, &QueryPattern::free(2)).unwrap();
        back.sort();
        assert_eq!(back, rows, "{backend}");
        assert_eq!(store.query_rows(&name, &QueryPattern::free(2).bind(0, 2)).unwrap().len(), 2);
        assert!(matches!(store.import_canonical(&name, &file), Err(StoreError::AlreadyRegistered(_))));

        let other = rel("map_hgnc_hgnc_name");
        let err = store.import_canonical(&other, &file).unwrap_err();
        assert!(matches!(err, StoreError::SchemaMismatch(_)), "{err:?}");
    }
}

#[test]
fn header_arity_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.tsv.gz");
    let body = "#name\tmap_hgnc_hgnc_symb\n#arity\t3\n#columns\thgnc:integer,symb:symbol\n#row_count\t0\n";
    let mut gz = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
    std::io::Write::write_all(&mut gz, body.as_bytes()).unwrap();
    std::fs::write(&file, gz.finish().unwrap()).unwrap();
    let store = Store::open(StoreConfig::new(BackendKind::Memory, dir.path())).unwrap();
    let err = store.import_canonical(&rel("map_hgnc_hgnc_symb"), &file).unwrap_err();
    assert!(matches!(err, StoreError::SchemaMismatch(_)), "{err:?}");
}

#[test]
fn corrupt_cache_file_fails_import() {
    let (dir, store) = fixture_store(BackendKind::Sql);
    let name = rel("map_hgnc_hgnc_symb");
    let path = cell_file(dir.path(), &name);
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 20]).unwrap();
    let err = store.ensure_table(&name).unwrap_err();
    assert!(matches!(err, StoreError::ImportFailed { .. }), "{err:?}");
    assert!(store.handles().is_empty());
}

#[test]
fn persistent_backends_reuse_imports() {
    for backend in [BackendKind::Kv, BackendKind::Sql] {
        let dir = tempfile::tempdir().unwrap();
        build_fixture_data(dir.path());
        let name = rel("map_hgnc_hgnc_symb");
        let first = Store::open(StoreConfig::new(backend, dir.path())).unwrap();
        first.ensure_table(&name).unwrap();
        assert_eq!(first.import_count(), 1);
        drop(first);

        let second = Store::open(StoreConfig::new(backend, dir.path())).unwrap();
        let rows = second.query_rows(&name, &QueryPattern::free(2).bind(0, 19295)).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(second.import_count(), 0, "{backend}");

        // with the canonical file gone the stored table still serves
        std::fs::remove_file(cell_file(dir.path(), &name)).unwrap();
        drop(second);
        let third = Store::open(StoreConfig::new(backend, dir.path())).unwrap();
        assert_eq!(third.table_info(&name).unwrap().get("source_db"), Some("hgnc"));
    }
}

#[test]
fn sql_single_writer_many_readers() {
    let dir = tempfile::tempdir().unwrap();
    build_fixture_data(dir.path());
    let config = StoreConfig::new(BackendKind::Sql, dir.path());
    let writer = Store::open(config.clone()).unwrap();
    writer.ensure_table(&rel("map_hgnc_hgnc_symb")).unwrap();

    let err = Store::open(config.clone()).unwrap_err();
    assert!(matches!(err, StoreError::BackendUnavailable(_)), "{err:?}");

    let reader = Store::open(StoreConfig { read_only: true, ..config.clone() }).unwrap();
    let rows = reader.query_rows(&rel("map_hgnc_hgnc_symb"), &QueryPattern::free(2).bind(0, 19295)).unwrap();
    assert_eq!(rows[0][1], Value::from("LMTK3"));
    let missing = reader.ensure_table(&rel("edge_gont_is_a")).unwrap_err();
    assert!(matches!(missing, StoreError::ReadOnly | StoreError::TableMissingAndFetchForbidden(_)), "{missing:?}");

    drop(writer);
    assert!(Store::open(config).is_ok());
}

#[test]
fn missing_data_dir_for_reader() {
    let dir = tempfile::tempdir().unwrap();
    let config = StoreConfig { read_only: true, ..StoreConfig::new(BackendKind::Memory, dir.path().join("nope")) };
    assert!(matches!(Store::open(config), Err(StoreError::DataDirUnavailable { .. })));
}

struct Answer(bool);

impl Prompter for Answer {
    fn interactive(&self) -> bool {
        true
    }
    fn confirm(&self, _: &biorel::relcore::RelName, _: &str) -> bool {
        self.0
    }
}

#[test]
fn lazy_fetch_on_first_query() {
    let repo = tempfile::tempdir().unwrap();
    build_fixture_data(repo.path());
    let server = TestServer::serve(repo.path());
    let name = rel("map_unip_hgnc_unip");

    for backend in BackendKind::ALL {
        let cache = tempfile::tempdir().unwrap();
        let config = StoreConfig::new(backend, cache.path()).with_repo(&server.url, FetchPolicy::Auto);
        let store = Store::open(config).unwrap();
        let rows = store.query_rows(&name, &QueryPattern::free(2).bind(0, 19295)).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(cell_file(cache.path(), &name).is_file());
        let handle = store.ensure_table(&name).unwrap();
        assert_eq!(handle.origin, Origin::Fixture);
        assert_eq!(handle.info, read_canonical(&cell_file(repo.path(), &name)).unwrap().info);
    }

    let cache = tempfile::tempdir().unwrap();
    let prompt = StoreConfig::new(BackendKind::Memory, cache.path()).with_repo(&server.url, FetchPolicy::Prompt);
    let declined = Store::open(prompt.clone()).unwrap().with_prompter(Answer(false));
    assert!(matches!(declined.ensure_table(&name), Err(StoreError::UserDeclined(_))));
    assert!(!cell_file(cache.path(), &name).exists());
    let accepted = Store::open(prompt.clone()).unwrap().with_prompter(Answer(true));
    assert!(accepted.ensure_table(&name).is_ok());
    // no terminal attached: prompt behaves as auto
    let cache = tempfile::tempdir().unwrap();
    let headless = Store::open(StoreConfig { data_dir: cache.path().into(), ..prompt }).unwrap();
    assert!(headless.ensure_table(&name).is_ok());

    let cache = tempfile::tempdir().unwrap();
    let dead = StoreConfig::new(BackendKind::Memory, cache.path()).with_repo("http://127.0.0.1:9/x", FetchPolicy::Auto);
    let err = Store::open(dead).unwrap().ensure_table(&name).unwrap_err();
    assert!(matches!(err, StoreError::FetchFailed(_)), "{err:?}");
}

#[test]
fn malformed_repo_url_rejected_unless_never() {
    let dir = tempfile::tempdir().unwrap();
    let bad = StoreConfig::new(BackendKind::Memory, dir.path()).with_repo("not a url", FetchPolicy::Auto);
    assert!(matches!(Store::open(bad.clone()), Err(StoreError::BackendUnavailable(_))));
    assert!(Store::open(StoreConfig { fetch_policy: FetchPolicy::Never, ..bad }).is_ok());
}

#[test]
fn restriction_is_monotone() {
    let (_dir, store) = fixture_store(BackendKind::Kv);
    let name = rel("edge_strg_hs_symb");
    let all = store.query_rows(&name, &QueryPattern::free(3)).unwrap();
    for row in all.iter().take(20) {
        let one = QueryPattern::free(3).bind(0, row[0].clone());
        let two = one.clone().bind(2, row[2].clone());
        let a = store.query_rows(&name, &one).unwrap();
        let b = store.query_rows(&name, &two).unwrap();
        assert!(b.iter().all(|r| a.contains(r)));
        assert!(b.contains(row));
    }
}
