use std::path::{Path, PathBuf};

use biorel::options::{Layer, OptionError, Settings};
use biorel::store::{BackendKind, FetchPolicy, StoreConfig};

use crate::Failure;

pub const CONFIG_ENV: &str = "BIOREL_CONFIG";

fn default_data_dir() -> PathBuf {
    dirs::data_local_dir().map(|d| d.join("biorel")).unwrap_or_else(|| PathBuf::from(".biorel-data"))
}

/// `<config dir>/biorel/config`
pub fn standard_config_path() -> Option<PathBuf> {
    dirs::config_dir().map(|d| d.join("biorel").join("config"))
}

pub fn usage(e: OptionError) -> Failure {
    Failure::Usage(e.to_string())
}

/// Defaults, then the config file, then `BIOREL_*` variables, then flags.
pub fn resolve(
    config_flag: Option<&Path>,
    env: impl IntoIterator<Item = (String, String)>,
    flags: &[(&str, Option<String>)],
) -> Result<Settings, Failure> {
    let mut s = Settings::with_defaults();
    s.set(Layer::Default, "data_dir", default_data_dir().to_string_lossy()).map_err(usage)?;

    let env: Vec<(String, String)> = env.into_iter().collect();
    let env_config = env.iter().find(|(k, _)| k == CONFIG_ENV).map(|(_, v)| PathBuf::from(v));
    match config_flag.map(Path::to_path_buf).or(env_config) {
        Some(path) => s.load_config_file(&path).map_err(usage)?,
        None => {
            if let Some(path) = standard_config_path().filter(|p| p.is_file()) {
                s.load_config_file(&path).map_err(usage)?;
            }
        }
    }
    s.apply_env(env.into_iter().filter(|(k, _)| k != CONFIG_ENV));
    for (key, value) in flags {
        if let Some(v) = value {
            s.set(Layer::CallSite, key, v.clone()).map_err(usage)?;
        }
    }
    Ok(s)
}

pub fn store_config(s: &Settings, read_only: bool) -> Result<StoreConfig, Failure> {
    let backend: BackendKind = s.parse("backend").map_err(usage)?.unwrap_or(BackendKind::Memory);
    let policy: FetchPolicy = s.parse("fetch_policy").map_err(usage)?.unwrap_or(FetchPolicy::Prompt);
    let data_dir = s.get("data_dir").map(PathBuf::from).unwrap_or_else(default_data_dir);
    let mut config = StoreConfig::new(backend, data_dir);
    if let Some(url) = s.get("repo_url") {
        config = config.with_repo(url, policy);
    } else {
        config.fetch_policy = policy;
    }
    config.read_only = read_only;
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(config)
}
