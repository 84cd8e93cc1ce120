#![allow(dead_code)]

pub mod oracle;

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use biorel::ingest::{build_tree, BuildContext};
use biorel::relcore::{parse_rel_name, RelName};
use biorel::store::{BackendKind, Store, StoreConfig};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn rel(name: &str) -> RelName {
    parse_rel_name(name).unwrap()
}

/// Builds every fixture dump into `dir`.
pub fn build_fixture_data(dir: &Path) {
    build_tree(&fixtures().join("dumps"), dir, &BuildContext::new("2019-07-01")).unwrap();
}

pub fn fixture_store(backend: BackendKind) -> (tempfile::TempDir, Store) {
    let dir = tempfile::tempdir().unwrap();
    build_fixture_data(dir.path());
    let store = Store::open(StoreConfig::new(backend, dir.path())).unwrap();
    (dir, store)
}

/// Minimal HTTP/1.1 file server with ETag revalidation.
pub struct TestServer {
    pub url: String,
    /// Responses that carried a body.
    pub transfers: Arc<AtomicUsize>,
    /// Paths whose body is cut to the given number of bytes.
    pub truncate: Arc<Mutex<HashMap<String, usize>>>,
}

impl TestServer {
    pub fn serve(root: &Path) -> TestServer {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let transfers = Arc::new(AtomicUsize::new(0));
        let truncate: Arc<Mutex<HashMap<String, usize>>> = Arc::default();
        let root = root.to_path_buf();
        let (t, cut) = (transfers.clone(), truncate.clone());
        thread::spawn(move || {
            for stream in listener.incoming().flatten() {
                let (root, t, cut) = (root.clone(), t.clone(), cut.clone());
                thread::spawn(move || respond(stream, &root, &t, &cut));
            }
        });
        TestServer { url, transfers, truncate }
    }
}

fn respond(mut stream: TcpStream, root: &Path, transfers: &AtomicUsize, cut: &Mutex<HashMap<String, usize>>) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut request = String::new();
    reader.read_line(&mut request).unwrap();
    let path = request.split_whitespace().nth(1).unwrap_or("/").to_string();
    let mut if_none_match = None;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 || line.trim().is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("if-none-match") {
                if_none_match = Some(v.trim().to_string());
            }
        }
    }
    let file = root.join(path.trim_start_matches('/'));
    let Ok(mut body) = std::fs::read(&file) else {
        let _ = stream.write_all(b"HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\nConnection: close\r\n\r\n");
        return;
    };
    let etag = format!("\"{:x}-{}\"", body.iter().fold(0u64, |h, &b| h.wrapping_mul(31).wrapping_add(b as u64)), body.len());
    if if_none_match.as_deref() == Some(etag.as_str()) {
        let _ = write!(stream, "HTTP/1.1 304 Not Modified\r\nETag: {etag}\r\nConnection: close\r\n\r\n");
        return;
    }
    if let Some(&n) = cut.lock().unwrap().get(&path) {
        body.truncate(n);
    }
    transfers.fetch_add(1, Ordering::SeqCst);
    let _ = write!(
        stream,
        "HTTP/1.1 200 OK\r\nETag: {etag}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    );
    let _ = stream.write_all(&body);
    let _ = stream.flush();
}
