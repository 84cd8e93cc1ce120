use std::fs;
use std::io::{self, Write};
use std::path::Path;

use biorel::analytics::{graph_file_name, AnalysisOptions, AnalyticsError, GeneFamily, GoOver, ora_tsv};
use biorel::graph::{Direction, WGraph};
use biorel::ingest::canonical::escape_field;
use biorel::ingest::{build_tree, stats, stats_tsv, BuildContext};
use biorel::options::Settings;
use biorel::relcore::{catalog_entry, catalog_list, parse_go_id, parse_rel_name, selector_parse, CellSelector, Provenance, RelError};
use biorel::store::{bench_backends, synthetic_map, BackendKind, QueryPattern, Store, StoreConfig, StoreError, Workload};

use crate::settings::{resolve, store_config};
use crate::{AnalysisFlags, Cli, Command, Failure};

fn op(e: impl std::fmt::Display) -> Failure {
    Failure::Operational(e.to_string())
}

fn store_failure(e: StoreError) -> Failure {
    match e {
        StoreError::Rel(_) | StoreError::ArityMismatch { .. } | StoreError::TypeMismatch { .. } => Failure::Usage(e.to_string()),
        other => op(other),
    }
}

fn analytics_failure(e: AnalyticsError) -> Failure {
    match e {
        AnalyticsError::Option(_) | AnalyticsError::InvalidFilter(_) => Failure::Usage(e.to_string()),
        AnalyticsError::Graph(biorel::graph::GraphError::InvalidOption(_)) => Failure::Usage(e.to_string()),
        AnalyticsError::Graph(biorel::graph::GraphError::MinWeightOutOfRange(_)) => Failure::Usage(e.to_string()),
        other => op(other),
    }
}

fn selector(text: Option<&str>) -> Result<CellSelector, Failure> {
    selector_parse(text.unwrap_or("")).map_err(|e: RelError| Failure::Usage(e.to_string()))
}

fn open(config: StoreConfig) -> Result<Store, Failure> {
    Store::open(config).map_err(op)
}

fn write_out(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(op(e)),
        _ => Ok(()),
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let mut flags = vec![
        ("data_dir", cli.data_dir.clone()),
        ("backend", cli.backend.clone()),
        ("repo_url", cli.repo_url.clone()),
        ("fetch_policy", cli.fetch_policy.clone()),
    ];
    match &cli.command {
        Command::FamilyGraph { flags: f, .. } | Command::GoOver { flags: f, .. } => flags.extend(f.settings()),
        _ => {}
    }
    let settings = resolve(cli.config.as_deref(), std::env::vars(), &flags)?;

    match cli.command {
        Command::Tables { selector: sel } => tables(sel.as_deref()),
        Command::Config => config(&settings),
        Command::Query { name, args } => query(store_config(&settings, cli.read_only)?, &name, &args),
        Command::Fetch { selector: sel } => fetch(store_config(&settings, cli.read_only)?, sel.as_deref()),
        Command::Stats { selector: sel } => {
            let sel = selector(sel.as_deref())?;
            let store = open(store_config(&settings, cli.read_only)?)?;
            write_out(&stats_tsv(&stats(&store, &sel).map_err(store_failure)?))
        }
        Command::Build { dumps, out, build_date } => {
            let config = store_config(&settings, cli.read_only)?;
            let out = out.unwrap_or(config.data_dir);
            let date = build_date.unwrap_or_else(|| chrono::Local::now().format("%Y-%m-%d").to_string());
            build(&dumps, &out, &date)
        }
        Command::Bench { rows, workload, ops, backends } => bench(rows, &workload, ops, &backends),
        Command::FamilyGraph { csv, family, flags } => {
            family_graph(&settings, store_config(&settings, cli.read_only)?, &csv, &family, &flags)
        }
        Command::GoOver { csv, tsv, flags } => {
            go_over(&settings, store_config(&settings, cli.read_only)?, &csv, tsv.as_deref(), &flags)
        }
    }
}

fn tables(sel: Option<&str>) -> Result<(), Failure> {
    let sel = selector(sel)?;
    let text: String = catalog_list(&sel).iter().map(|e| e.listing() + "\n").collect();
    write_out(&text)
}

fn config(settings: &Settings) -> Result<(), Failure> {
    let text: String = settings.entries().map(|(k, v, l)| format!("{k}\t{v}\t{l}\n")).collect();
    write_out(&text)
}

fn query(config: StoreConfig, name: &str, args: &[String]) -> Result<(), Failure> {
    let name = parse_rel_name(name).map_err(|e| Failure::Usage(e.to_string()))?;
    let schema = &catalog_entry(&name).map_err(|e| Failure::Usage(e.to_string()))?.schema;
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let pattern = QueryPattern::parse_args(schema, &args).map_err(store_failure)?;
    let store = open(config)?;
    let mut out = io::BufWriter::new(io::stdout().lock());
    for row in store.query(&name, &pattern).map_err(store_failure)? {
        let row = row.map_err(op)?;
        let line: Vec<String> = row.iter().map(|v| escape_field(&v.to_string())).collect();
        if let Err(e) = writeln!(out, "{}", line.join("\t")) {
            return if e.kind() == io::ErrorKind::BrokenPipe { Ok(()) } else { Err(op(e)) };
        }
    }
    out.flush().or_else(|e| if e.kind() == io::ErrorKind::BrokenPipe { Ok(()) } else { Err(op(e)) })
}

fn fetch(config: StoreConfig, sel: Option<&str>) -> Result<(), Failure> {
    let sel = selector(sel)?;
    let store = open(config)?;
    let mut failed = 0;
    let mut text = String::new();
    for entry in catalog_list(&sel) {
        if entry.provenance == Provenance::Stub {
            continue;
        }
        match store.ensure_table(&entry.name) {
            Ok(handle) => {
                let rows = handle.info.row_count().map(|n| n.to_string()).unwrap_or_default();
                text += &format!("{}\tok\t{}\t{rows}\n", entry.name, handle.origin.as_str());
            }
            Err(e) => {
                failed += 1;
                eprintln!("{}: {e}", entry.name);
                text += &format!("{}\tfailed\t{}\n", entry.name, error_kind(&e));
            }
        }
    }
    write_out(&text)?;
    if failed > 0 {
        return Err(op(format!("{failed} relations could not be made available")));
    }
    Ok(())
}

fn error_kind(e: &StoreError) -> &'static str {
    match e {
        StoreError::TableMissingAndFetchForbidden(_) => "TableMissingAndFetchForbidden",
        StoreError::UserDeclined(_) => "UserDeclined",
        StoreError::FetchFailed(_) => "FetchFailed",
        StoreError::ImportFailed { .. } => "ImportFailed",
        _ => "Error",
    }
}

fn build(dumps: &Path, out: &Path, date: &str) -> Result<(), Failure> {
    let reports = build_tree(dumps, out, &BuildContext::new(date)).map_err(op)?;
    let mut text = String::from("relation\trows\n");
    let (mut malformed, mut excluded, mut dropped) = (0, 0, 0);
    for r in &reports {
        for (name, rows) in &r.relations {
            text += &format!("{name}\t{rows}\n");
        }
        malformed += r.malformed;
        excluded += r.excluded;
        dropped += r.dropped;
    }
    eprintln!("built {} dumps into {}: {malformed} malformed, {excluded} excluded, {dropped} dropped", reports.len(), out.display());
    write_out(&text)
}

fn bench(rows: usize, workload: &str, ops: usize, backends: &str) -> Result<(), Failure> {
    let workload: Workload = workload.parse().map_err(Failure::Usage)?;
    let kinds: Vec<BackendKind> =
        backends.split(',').map(|b| b.trim().parse()).collect::<Result<_, String>>().map_err(Failure::Usage)?;
    let tmp = tempfile::tempdir().map_err(op)?;
    let file = tmp.path().join("synthetic.tsv.gz");
    let name = synthetic_map(&file, rows).map_err(op)?;
    let configs: Vec<StoreConfig> = kinds.iter().map(|k| StoreConfig::new(*k, tmp.path().join(k.as_str()))).collect();
    let report = bench_backends(&configs, &name, &file, workload, ops).map_err(op)?;
    write_out(&report.to_tsv())
}

fn names(g: &WGraph<f64>, dir: Direction) -> String {
    g.nodes().filter(|(_, a)| a.direction == dir).map(|(s, _)| s).collect::<Vec<_>>().join(" ")
}

fn options(settings: &Settings, flags: &AnalysisFlags) -> Result<AnalysisOptions<f64>, Failure> {
    let mut opts = AnalysisOptions::<f64>::from_settings(settings).map_err(analytics_failure)?;
    opts.out_dir = Some(flags.out_dir.clone());
    Ok(opts)
}

fn family_graph(settings: &Settings, config: StoreConfig, csv: &Path, family: &str, flags: &AnalysisFlags) -> Result<(), Failure> {
    let opts = options(settings, flags)?;
    let store = open(config)?;
    let family = if family.starts_with("GO:") {
        let term = parse_go_id(family).map_err(|e| Failure::Usage(e.to_string()))?;
        GeneFamily::from_go_term(&store, term, opts.org)
    } else {
        GeneFamily::from_file(Path::new(family))
    }
    .map_err(analytics_failure)?;
    let path = flags.out_dir.join(graph_file_name(family.name(), opts.render.format));
    let _ = fs::remove_file(&path);
    let g = biorel::analytics::family_string_graph(&store, csv, &family, &opts).map_err(analytics_failure)?;
    let mut text = format!("{} nodes, {} edges\n", g.node_count(), g.edge_count());
    text += &format!("up\t{}\ndown\t{}\nabsent\t{}\n", names(&g, Direction::Up), names(&g, Direction::Down), names(&g, Direction::Absent));
    if path.is_file() {
        text += &format!("file\t{}\n", path.display());
    }
    write_out(&text)
}

fn go_over(settings: &Settings, config: StoreConfig, csv: &Path, tsv: Option<&Path>, flags: &AnalysisFlags) -> Result<(), Failure> {
    let opts = options(settings, flags)?;
    let store = open(config)?;
    let run = GoOver::run(&store, csv, &opts).map_err(analytics_failure)?;
    let report = ora_tsv(&run.table);
    match tsv {
        Some(path) => fs::write(path, report).map_err(|e| op(format!("{}: {e}", path.display())))?,
        None => write_out(&report)?,
    }
    eprintln!(
        "{} hits, {} genes, {} terms tested, {} at alpha {}",
        run.genes.hits.genes.len(),
        run.genes.universe.genes.len(),
        run.table.len(),
        run.graphs.len(),
        opts.alpha
    );
    for f in &run.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}
