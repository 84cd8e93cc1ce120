use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use super::{canonical, IngestError};
use crate::relcore::RelName;

/// What [`fetch_remote_outcome`] did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FetchOutcome {
    /// The body was transferred and verified.
    Downloaded(PathBuf),
    /// The server confirmed the cached copy (304).
    NotModified(PathBuf),
}

impl FetchOutcome {
    pub fn path(&self) -> &Path {
        match self {
            FetchOutcome::Downloaded(p) | FetchOutcome::NotModified(p) => p,
        }
    }
}

/// `repo_url/<org>/<db>/<name>.tsv.gz`.
pub fn relation_url(repo_url: &str, name: &RelName) -> String {
    format!(
        "{}/{}/{}/{}.{}",
        repo_url.trim_end_matches('/'),
        name.org(),
        name.db(),
        name,
        canonical::EXTENSION
    )
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Fetches a canonical file into the cache and returns its path.
pub fn fetch_remote(name: &RelName, repo_url: &str, cache_dir: &Path) -> Result<PathBuf, IngestError> {
    fetch_remote_outcome(name, repo_url, cache_dir).map(|o| o.path().to_path_buf())
}

/// Fetches a canonical file, revalidating a cached copy by ETag.
///
/// The body is written to a `.part` file, decoded in full and checked
/// against its declared name and row count before being moved into place.
/// A body that fails verification removes the cache entry. Concurrent
/// callers on the same cache path serialize on a `.lock` file.
pub fn fetch_remote_outcome(name: &RelName, repo_url: &str, cache_dir: &Path) -> Result<FetchOutcome, IngestError> {
    let path = canonical::cell_file(cache_dir, name);
    fs::create_dir_all(path.parent().expect("cell files have a parent"))?;
    let lock = OpenOptions::new().create(true).truncate(false).write(true).open(sidecar(&path, ".lock"))?;
    lock.lock()?;

    let url = relation_url(repo_url, name);
    let failed = |reason: String| IngestError::FetchFailed { name: name.to_string(), reason };
    let etag_path = sidecar(&path, ".etag");
    let part = sidecar(&path, ".part");

    let etag = if let Some(local) = url.strip_prefix("file://") {
        let mut src = File::open(local).map_err(|e| failed(format!("{url}: {e}")))?;
        let mut out = File::create(&part)?;
        io::copy(&mut src, &mut out)?;
        None
    } else {
        let cached_etag = if path.exists() { fs::read_to_string(&etag_path).ok() } else { None };
        let agent = ureq::Agent::new_with_config(
            ureq::Agent::config_builder()
                .http_status_as_error(false)
                .timeout_global(Some(Duration::from_secs(600)))
                .build(),
        );
        let mut request = agent.get(&url);
        if let Some(tag) = &cached_etag {
            request = request.header("If-None-Match", tag.trim());
        }
        let mut response = request.call().map_err(|e| failed(format!("{url}: {e}")))?;
        let status = response.status().as_u16();
        if status == 304 && cached_etag.is_some() {
            log::debug!("{name}: cached copy still current");
            return Ok(FetchOutcome::NotModified(path));
        }
        if status != 200 {
            return Err(failed(format!("{url}: HTTP {status}")));
        }
        let etag = response
            .headers()
            .get("etag")
            .and_then(|v| v.to_str().ok())
            .map(str::to_string);
        let mut body = response.body_mut().as_reader();
        let mut out = File::create(&part)?;
        if let Err(e) = copy_body(&mut body, &mut out) {
            drop(out);
            discard(&[&part, &path, &etag_path]);
            return Err(IngestError::ChecksumMismatch { name: name.to_string(), reason: format!("transfer cut short: {e}") });
        }
        etag
    };

    if let Err(reason) = verify(&part, name) {
        discard(&[&part, &path, &etag_path]);
        return Err(IngestError::ChecksumMismatch { name: name.to_string(), reason });
    }
    fs::rename(&part, &path)?;
    match etag {
        Some(tag) => fs::write(&etag_path, tag)?,
        None => discard(&[&etag_path]),
    }
    log::info!("fetched {name} from {url}");
    Ok(FetchOutcome::Downloaded(path))
}

fn copy_body(body: &mut impl Read, out: &mut File) -> io::Result<()> {
    io::copy(body, out)?;
    out.flush()
}

fn verify(part: &Path, name: &RelName) -> Result<(), String> {
    let file = canonical::read_canonical(part).map_err(|e| e.to_string())?;
    if file.schema.name().to_string() != name.to_string() {
        return Err(format!("file declares {}", file.schema.name()));
    }
    Ok(())
}

fn discard(paths: &[&Path]) {
    for p in paths {
        let _ = fs::remove_file(p);
    }
}
