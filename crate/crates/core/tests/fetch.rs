mod common;

use std::fs;
use std::sync::atomic::Ordering;

use biorel::ingest::{cell_file, fetch_remote, fetch_remote_outcome, read_canonical, FetchOutcome, IngestError};
use common::{build_fixture_data, rel, TestServer};

fn repo() -> (tempfile::TempDir, TestServer) {
    let dir = tempfile::tempdir().unwrap();
    build_fixture_data(dir.path());
    let server = TestServer::serve(dir.path());
    (dir, server)
}

#[test]
fn download_then_revalidate() {
    let (_repo, server) = repo();
    let cache = tempfile::tempdir().unwrap();
    let name = rel("map_unip_hgnc_unip");
    let first = fetch_remote_outcome(&name, &server.url, cache.path()).unwrap();
    assert!(matches!(first, FetchOutcome::Downloaded(_)));
    assert_eq!(first.path(), cell_file(cache.path(), &name));
    assert!(read_canonical(first.path()).unwrap().rows.len() > 5);

    let second = fetch_remote_outcome(&name, &server.url, cache.path()).unwrap();
    assert!(matches!(second, FetchOutcome::NotModified(_)));
    assert_eq!(server.transfers.load(Ordering::SeqCst), 1);
}

#[test]
fn missing_relation_names_it() {
    let (repo, server) = repo();
    let name = rel("map_hgnc_hgnc_symb");
    fs::remove_file(cell_file(repo.path(), &name)).unwrap();
    let cache = tempfile::tempdir().unwrap();
    match fetch_remote(&name, &server.url, cache.path()) {
        Err(IngestError::FetchFailed { name: n, reason }) => {
            assert_eq!(n, "map_hgnc_hgnc_symb");
            assert!(reason.contains("404"), "{reason}");
        }
        other => panic!("expected FetchFailed, got {other:?}"),
    }
}

#[test]
fn truncated_body_is_rejected_and_removed() {
    let (repo, server) = repo();
    let name = rel("map_hgnc_hgnc_symb");
    let cache = tempfile::tempdir().unwrap();
    // a good copy first, so that removal of the stale entry is observable
    fetch_remote(&name, &server.url, cache.path()).unwrap();
    let full = fs::read(cell_file(repo.path(), &name)).unwrap();
    fs::write(cell_file(repo.path(), &name), [&full[..], b"x"].concat()).unwrap();
    server
        .truncate
        .lock()
        .unwrap()
        .insert("/hs/hgnc/map_hgnc_hgnc_symb.tsv.gz".into(), full.len() / 2);

    let err = fetch_remote(&name, &server.url, cache.path()).unwrap_err();
    assert!(matches!(err, IngestError::ChecksumMismatch { .. }), "{err:?}");
    let cached = cell_file(cache.path(), &name);
    assert!(!cached.exists());
    assert!(!cached.with_extension("gz.part").exists());
}

#[test]
fn file_scheme() {
    let (repo, _server) = repo();
    let cache = tempfile::tempdir().unwrap();
    let url = format!("file://{}", repo.path().display());
    let path = fetch_remote(&rel("edge_gont_is_a"), &url, cache.path()).unwrap();
    assert_eq!(fs::read(&path).unwrap(), fs::read(cell_file(repo.path(), &rel("edge_gont_is_a"))).unwrap());
}

#[test]
fn concurrent_fetches_agree() {
    let (_repo, server) = repo();
    let cache = tempfile::tempdir().unwrap();
    let name = rel("edge_strg_hs_symb");
    let paths: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..6).map(|_| s.spawn(|| fetch_remote(&name, &server.url, cache.path()).unwrap())).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert!(paths.windows(2).all(|w| w[0] == w[1]));
    assert!(read_canonical(&paths[0]).is_ok());
    assert_eq!(server.transfers.load(Ordering::SeqCst), 1);
}
