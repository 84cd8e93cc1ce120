mod common;

use std::collections::BTreeSet;

use biorel::graph::{annotate_regulation, edge_rows, render, string_subgraph, Direction, RenderFormat, RenderOptions, WGraph};
use biorel::ingest::write_canonical;
use biorel::relcore::{catalog_entry, OrgToken, RelationInfo, Row, Value};
use biorel::store::{BackendKind, QueryPattern, Store, StoreConfig};
use common::{fixture_store, rel};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_edges(rng: &mut impl Rng, pool: &[String]) -> Vec<Row> {
    let mut seen = BTreeSet::new();
    let mut rows = Vec::new();
    for _ in 0..rng.random_range(0..120) {
        let a = pool.choose(rng).unwrap();
        let b = pool.choose(rng).unwrap();
        if a == b {
            continue;
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if !seen.insert((a.clone(), b.clone())) {
            continue;
        }
        let w = if rng.random_bool(0.1) { *[1, 999, 400].choose(rng).unwrap() } else { rng.random_range(1..=999) };
        rows.push(vec![Value::from(a.as_str()), Value::from(b.as_str()), Value::Int(w)]);
    }
    rows
}

fn oracle(store: &Store, symbols: &BTreeSet<String>, min_weight: i64) -> Vec<Row> {
    let name = rel("edge_strg_hs_symb");
    let mut rows: Vec<Row> = store
        .query_rows(&name, &QueryPattern::free(3))
        .unwrap()
        .into_iter()
        .filter(|r| {
            symbols.contains(r[0].as_str().unwrap())
                && symbols.contains(r[1].as_str().unwrap())
                && r[2].as_int().unwrap() >= min_weight
        })
        .collect();
    rows.sort();
    rows
}

fn store_with_edges(backend: BackendKind, rows: &[Row]) -> (tempfile::TempDir, Store) {
    let dir = tempfile::tempdir().unwrap();
    let name = rel("edge_strg_hs_symb");
    let file = dir.path().join("edges.tsv.gz");
    let mut info = RelationInfo::new();
    info.set(RelationInfo::SOURCE_URL, "fixture:random");
    write_canonical(&file, &catalog_entry(&name).unwrap().schema, &info, rows).unwrap();
    let store = Store::open(StoreConfig::new(backend, dir.path())).unwrap();
    store.import_canonical(&name, &file).unwrap();
    (dir, store)
}

#[test]
fn subgraph_matches_full_scan_filter() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pool: Vec<String> = (0..30).map(|i| format!("G{i}")).collect();
    for round in 0..100 {
        let backend = BackendKind::ALL[round % 3];
        let rows = random_edges(&mut rng, &pool);
        let (_dir, store) = store_with_edges(backend, &rows);
        let symbols: BTreeSet<String> = pool.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
        let list: Vec<&String> = symbols.iter().collect();
        for min_weight in [0, 1, 400, 999, 1000, rng.random_range(0..=1000)] {
            let g: WGraph<f64> = string_subgraph(&store, &list, OrgToken::Hs, min_weight).unwrap();
            let mut got = edge_rows(&g);
            got.sort();
            assert_eq!(got, oracle(&store, &symbols, min_weight), "round {round} min_weight {min_weight}");
            assert_eq!(g.node_count(), symbols.len());
            if min_weight == 1000 {
                assert_eq!(g.edge_count(), 0);
            }
        }
    }
}

#[test]
fn raising_min_weight_never_adds_edges() {
    let (_dir, store) = fixture_store(BackendKind::Memory);
    let all = store.query_rows(&rel("edge_strg_hs_symb"), &QueryPattern::free(3)).unwrap();
    let symbols: BTreeSet<&str> = all.iter().flat_map(|r| [r[0].as_str().unwrap(), r[1].as_str().unwrap()]).collect();
    let symbols: Vec<&str> = symbols.into_iter().collect();
    let mut prev: Option<BTreeSet<(String, String)>> = None;
    for w in (0..=1000).step_by(50) {
        let g: WGraph<f64> = string_subgraph(&store, &symbols, OrgToken::Hs, w).unwrap();
        let edges: BTreeSet<(String, String)> = g.edges().map(|(a, b, _)| (a.into(), b.into())).collect();
        if let Some(p) = &prev {
            assert!(edges.is_subset(p), "edges appeared at {w}");
        }
        prev = Some(edges);
    }
}

#[test]
fn subgraph_edge_cases() {
    let (_dir, store) = fixture_store(BackendKind::Memory);
    let empty: WGraph<f64> = string_subgraph::<f64, &str>(&store, &[], OrgToken::Hs, 400).unwrap();
    assert!(empty.is_empty());
    assert!(string_subgraph::<f64, &str>(&store, &["ATG5"], OrgToken::Hs, 1001).is_err());
    assert!(string_subgraph::<f64, &str>(&store, &["ATG5"], OrgToken::Hs, -1).is_err());

    let g: WGraph<f64> = string_subgraph(&store, &["ATG5", "BECN1", "MAP1LC3B", "SQSTM1"], OrgToken::Hs, 400).unwrap();
    let edges: Vec<_> = g.edges().collect();
    assert_eq!(edges, vec![("ATG5", "BECN1", 900), ("BECN1", "MAP1LC3B", 700), ("MAP1LC3B", "SQSTM1", 950)]);
}

#[test]
fn mouse_cell_has_its_own_edges() {
    let (_dir, store) = fixture_store(BackendKind::Memory);
    let all = store.query_rows(&rel("edge_strg_mouse_symb"), &QueryPattern::free(3)).unwrap();
    let symbols: Vec<String> = all.iter().flat_map(|r| [r[0].to_string(), r[1].to_string()]).collect();
    let g: WGraph<f64> = string_subgraph(&store, &symbols, OrgToken::Mouse, 0).unwrap();
    assert_eq!(g.edge_count(), all.len());
}

fn random_graph(rng: &mut impl Rng) -> WGraph<f64> {
    let names = ["ATG5", "BECN1", "a b", "q\"uote", "back\\slash", "ZNF-167", "x.y", "Lmtk3", "1abc", "<tag>&"];
    let mut g = WGraph::new();
    let picked: Vec<&str> = names.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
    for s in &picked {
        g.add_node(s);
    }
    for _ in 0..rng.random_range(0..12) {
        if let (Some(a), Some(b)) = (picked.choose(rng), picked.choose(rng)) {
            if a != b {
                g.add_edge(a, b, rng.random_range(1..=999)).unwrap();
            }
        }
    }
    let mut hits: Vec<(&str, f64)> = Vec::new();
    for s in &picked {
        let lfc = rng.random_range(-4.0..4.0);
        if rng.random_bool(0.7) {
            hits.push((s, lfc));
        }
    }
    annotate_regulation(&g, &hits).unwrap()
}

#[test]
fn dot_output_parses() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..100 {
        let g = random_graph(&mut rng);
        let opts = RenderOptions { format: RenderFormat::Dot, ..RenderOptions::default() };
        let text = render(&g, &opts).unwrap();
        let parsed = graphviz_rust::parse(&text);
        assert!(parsed.is_ok(), "graph {i} failed to parse: {:?}\n{text}", parsed.err());
        assert_eq!(text.matches("fillcolor=").count(), g.node_count());
        assert_eq!(text.matches(" -- ").count(), g.edge_count());
    }
}

#[test]
fn renders_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let g = random_graph(&mut rng);
        for format in [RenderFormat::Dot, RenderFormat::Svg] {
            let opts = RenderOptions { format, ..RenderOptions::default() };
            let copy = g.clone();
            assert_eq!(render(&g, &opts).unwrap().into_bytes(), render(&copy, &opts).unwrap().into_bytes());
        }
    }
}

#[test]
fn up_nodes_take_the_up_colour() {
    let mut g = WGraph::<f64>::new();
    g.add_node("ATG5");
    let g = annotate_regulation(&g, &[("ATG5", 2.5)]).unwrap();
    assert_eq!(g.node("ATG5").unwrap().direction, Direction::Up);
    let opts = RenderOptions { format: RenderFormat::Dot, color_up: "green".parse().unwrap(), ..RenderOptions::default() };
    let text = render(&g, &opts).unwrap();
    assert!(text.contains("fillcolor=\"#00ff00ff\""), "{text}");
    assert_eq!(text.matches("fillcolor=").count(), 1);
}

#[test]
fn single_precision_graphs() {
    let (_dir, store) = fixture_store(BackendKind::Memory);
    let g: WGraph<f32> = string_subgraph(&store, &["ATG5", "BECN1"], OrgToken::Hs, 400).unwrap();
    let g = annotate_regulation(&g, &[("ATG5", 1.5f32), ("BECN1", -0.5)]).unwrap();
    assert_eq!(g.count(Direction::Up), 1);
    assert_eq!(g.count(Direction::Down), 1);
    let svg = render(&g, &RenderOptions::<f32>::default()).unwrap();
    assert!(svg.contains("<line"));
}
