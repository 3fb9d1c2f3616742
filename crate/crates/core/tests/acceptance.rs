//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use archrecover::clustering::mq_after_move;
use archrecover::clustering::{
    audit_counters, next_percentile, search, skewness_g1, sn_accept, AnnealingState, Graph, Move, Partition,
    SearchConfig, SeedContext, SeedStrategy, Target,
};
use archrecover::graphml::to_graphml;
use archrecover::ingest::CorpusBundle;
use archrecover::ingest::{
    extract_inheritance_list, extract_package_path, parse_java, tokenize_identifier, CallFact, CodeEntity, MethodSig,
    Normalizer, ScopingRules,
};
use archrecover::retrieval::{query_classes, QueryParams, RetrievalInputs};
use archrecover::similarity::{
    apply_tf_idf, combined_similarity, lowercase_key, FeatureMatrix, SignificanceFactors, SimilarityModel, SymMatrix,
};
use common::{analyze, clusters_of, random_graph, scratch_mq, scratch_mqc, set_partitions};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn tokenization() -> Outcome {
    let start = Instant::now();
    let words = tokenize_identifier("This ControllerClass will schedule processes");
    ensure(
        words == ["This", "Controller", "Class", "will", "schedule", "processes"],
        || format!("sentence split to {words:?}"),
    )?;
    let segs = extract_package_path("com.atl.application.controlManager");
    ensure(segs == ["com", "atl", "application", "control", "Manager"], || {
        format!("package split to {segs:?}")
    })?;
    let t = within(Duration::from_secs(1), start)?;
    Ok(format!("exact match in {t:?}"))
}

fn inheritance() -> Outcome {
    let src = "package app; class ClientAnalytics implements Business, Analytics, Client { }";
    let parsed = parse_java(src, None);
    ensure(parsed.len() == 1, || format!("{} types parsed", parsed.len()))?;
    let got = extract_inheritance_list(&parsed[0].entity);
    let want: BTreeSet<String> = ["Business", "Analytics", "Client"].map(String::from).into();
    ensure(got == want, || format!("inheritance list {got:?}"))?;
    Ok("{Business, Analytics, Client}".into())
}

fn tf_idf_zeroing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pool = ["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta"];
    for trial in 0..100 {
        let d = rng.random_range(1..12);
        let rows: Vec<Vec<(&str, f64)>> = (0..d)
            .map(|_| {
                let mut r = vec![("shared", rng.random_range(1..5) as f64)];
                for w in pool {
                    if rng.random_bool(0.4) {
                        r.push((w, rng.random_range(1..4) as f64));
                    }
                }
                r
            })
            .collect();
        let raw = FeatureMatrix::from_counts(rows, str::to_string);
        let df = raw.document_frequencies();
        let m = apply_tf_idf(raw);
        for j in 0..m.col_count() {
            if df[j] == d {
                for (i, r) in m.rows.iter().enumerate() {
                    ensure(r.get(j) == 0.0, || {
                        format!("trial {trial}: row {i} column {} is {}", m.vocabulary[j], r.get(j))
                    })?;
                }
            }
        }
        ensure(m.column("shared").is_some(), || "shared column missing".into())?;
    }
    Ok("100 corpora, ubiquitous tokens weigh exactly 0".into())
}

fn random_corpus(rng: &mut ChaCha8Rng) -> CorpusBundle {
    let stems = [
        "Order", "Job", "Invoice", "Queue", "Client", "Report", "Payment", "Task",
    ];
    let suffixes = ["Service", "Manager", "Store", "Runner", "View"];
    let packages = ["app.core", "app.billing", "app.jobs", "lib.util"];
    let verbs = ["get", "put", "run", "send", "load", "close"];
    let words = [
        "create", "invoice", "queue", "schedule", "job", "payment", "client", "report",
    ];
    let n = rng.random_range(2..14);
    let mut names = BTreeSet::new();
    while names.len() < n {
        names.insert(format!(
            "{}{}",
            stems.choose(rng).unwrap(),
            suffixes.choose(rng).unwrap()
        ));
    }
    let names: Vec<String> = names.into_iter().collect();
    let mut entities = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let mut e = CodeEntity::new(i, name.clone(), *packages.choose(rng).unwrap());
        for _ in 0..rng.random_range(0..4) {
            let m = format!("{}{}", verbs.choose(rng).unwrap(), stems.choose(rng).unwrap());
            if !e.has_public_method(&m) {
                e = e.with_method(MethodSig::new(m, &["int"], "void"));
            }
        }
        if rng.random_bool(0.7) {
            let text: Vec<&str> = (0..rng.random_range(1..6))
                .map(|_| *words.choose(rng).unwrap())
                .collect();
            e = e.with_comment(text.join(" "));
        }
        if rng.random_bool(0.4) {
            e = e.with_parent(names.choose(rng).unwrap().clone());
        }
        entities.push(e);
    }
    let mut facts = Vec::new();
    for _ in 0..rng.random_range(0..3 * n) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if let Some(m) = entities[b].public_methods.first() {
            facts.push(CallFact {
                caller: names[a].clone(),
                callee: names[b].clone(),
                method: m.name.clone(),
                signature: None,
            });
        }
    }
    CorpusBundle::from_entities(entities, &facts, &ScopingRules::empty(), &Normalizer::java_default())
        .expect("random corpus")
}

fn check_unit_symmetric(m: &SymMatrix, what: &str) -> Result<(), String> {
    for i in 0..m.len() {
        for j in 0..m.len() {
            let v = m.get(i, j);
            ensure((0.0..=1.0).contains(&v), || format!("{what}[{i},{j}] = {v}"))?;
            ensure(v == m.get(j, i), || format!("{what} asymmetric at ({i},{j})"))?;
        }
    }
    Ok(())
}

fn similarity_ranges() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..100 {
        let corpus = random_corpus(&mut rng);
        let raw: [f64; 6] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
        let sum: f64 = raw.iter().sum();
        let factors = SignificanceFactors::from_array(raw.map(|v| v / sum));
        let model = SimilarityModel::build(&corpus, &factors).map_err(|e| format!("trial {trial}: {e}"))?;
        for (k, m) in model.deltas.matrices.iter().enumerate() {
            check_unit_symmetric(m, &format!("trial {trial} feature {k}"))?;
        }
        check_unit_symmetric(&model.combined, &format!("trial {trial} combined"))?;
        let bad = SignificanceFactors::from_array(raw.map(|v| v / sum * 1.1));
        ensure(combined_similarity(&bad, &model.deltas.matrices).is_err(), || {
            format!("trial {trial}: factors summing to 1.1 accepted")
        })?;
    }
    Ok("100 corpora, six matrices and combined in [0,1], bad factors rejected".into())
}

fn incremental_mq() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    for t in 0..1000 {
        let n = rng.random_range(2..=50);
        let g = random_graph(n, rng.random_range(0.05..0.9), &mut rng);
        let k = rng.random_range(1..=n.min(8));
        let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let mut p = Partition::from_assignment(&g, &labels);
        let node = rng.random_range(0..n);
        let from = p.cluster_of(node);
        let targets: Vec<usize> = p.live_slots().filter(|&s| s != from).collect();
        let to = if targets.is_empty() || (p.members(from).len() > 1 && rng.random_bool(0.2)) {
            if p.members(from).len() == 1 {
                continue;
            }
            Target::New
        } else {
            Target::Existing(*targets.choose(&mut rng).unwrap())
        };
        let old = p.mq();
        let got = mq_after_move(&mut p, &g, Move { node, from, to }, old);
        labels[node] = match to {
            Target::Existing(s) => labels[p.members(s).iter().copied().find(|&v| v != node).unwrap()],
            Target::New => labels.iter().max().unwrap() + 1,
        };
        let want = scratch_mq(&g, &labels);
        let err = (got - want).abs();
        worst = worst.max(err);
        ensure(err <= 1e-9, || format!("triple {t}: incremental {got}, scratch {want}"))?;
    }
    let t = within(Duration::from_secs(10), start)?;
    Ok(format!("1000 triples, max error {worst:.1e}, {t:?}"))
}

fn mqc_identity() -> Outcome {
    ensure(cfg!(debug_assertions), || "audits only run in debug builds".into())?;
    let (evals0, audits0) = audit_counters();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for s in 0..10 {
        let g = random_graph(rng.random_range(6..25), 0.4, &mut rng);
        let cfg = SearchConfig {
            strategies: SeedStrategy::GRAPH_ONLY.to_vec(),
            rng_seed: s,
            ..SearchConfig::default()
        };
        let r = search(&SeedContext::graph_only(&g), &cfg).map_err(|e| e.to_string())?;
        for q in r
            .seeds
            .iter()
            .flat_map(|o| [o.seed_quality, o.final_quality])
            .chain([r.report])
        {
            let id = 2.0 * q.mq + q.cluster_count as f64 - q.diff as f64 - q.iso as f64;
            ensure((id - q.mqc).abs() < 1e-9, || format!("identity broken: {q:?}"))?;
        }
        let scratch = scratch_mqc(&g, &r.best.assignment());
        ensure((scratch - r.report.mqc).abs() < 1e-9, || {
            format!("best MQC {} vs scratch {scratch}", r.report.mqc)
        })?;
    }
    let (evals, audits) = audit_counters();
    let (evals, audits) = (evals - evals0, audits - audits0);
    ensure(audits > 0, || "no evaluation was audited".into())?;
    ensure(audits * 100 >= evals.saturating_sub(100), || {
        format!("{audits} audits for {evals} evaluations")
    })?;
    Ok(format!("{audits} of {evals} evaluations audited"))
}

fn exhaustive_optimum() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut optimal = 0;
    let mut worst_gap: f64 = 0.0;
    let instances = 50;
    for i in 0..instances {
        let n = 4 + i % 5;
        let g = random_graph(n, rng.random_range(0.3..0.9), &mut rng);
        let packages: Vec<String> = (0..n).map(|_| format!("p{}", rng.random_range(0..3))).collect();
        let inherit = SymMatrix::from_fn(n, |a, b| if (a + b) % 3 == 0 { 0.5 } else { 0.0 });
        let best = set_partitions(n)
            .iter()
            .map(|l| scratch_mqc(&g, l))
            .fold(f64::NEG_INFINITY, f64::max);
        let ctx = SeedContext {
            graph: &g,
            packages: Some(&packages),
            inheritance: Some(&inherit),
            outlier_elimination: true,
        };
        let cfg = SearchConfig {
            rng_seed: i as u64,
            ..SearchConfig::default()
        };
        let r = search(&ctx, &cfg).map_err(|e| e.to_string())?;
        let got = scratch_mqc(&g, &r.best.assignment());
        if got >= best - 1e-9 {
            optimal += 1;
        }
        let gap = (best - got) / best.abs().max(1e-12);
        worst_gap = worst_gap.max(gap);
    }
    let t = within(Duration::from_secs(60), start)?;
    let rate = optimal as f64 / instances as f64;
    let detail = format!(
        "{optimal}/{instances} optimal, worst gap {:.2}%, {t:?}",
        worst_gap * 100.0
    );
    ensure(rate >= 0.9, || detail.clone())?;
    ensure(worst_gap <= 0.05 + 1e-12, || detail.clone())?;
    Ok(detail)
}

fn planted_partition() -> Outcome {
    let mut recovered = 0;
    let mut outscored = 0;
    let runs = 50;
    for r in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(1600 + r);
        let k = 2 + (r as usize % 3);
        let size = rng.random_range(3..=40 / k);
        let n = k * size;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut block = vec![0; n];
        for (pos, &v) in order.iter().enumerate() {
            block[v] = pos / size;
        }
        let mut w = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let x = if block[i] == block[j] {
                    rng.random_range(0.7..=1.0)
                } else {
                    rng.random_range(0.0..=0.1)
                };
                w[i][j] = x;
                w[j][i] = x;
            }
        }
        let g = Graph::from_fn(n, |i, j| w[i][j]);
        let ctx = SeedContext {
            outlier_elimination: true,
            ..SeedContext::graph_only(&g)
        };
        let cfg = SearchConfig {
            strategies: SeedStrategy::GRAPH_ONLY.to_vec(),
            rng_seed: r,
            ..SearchConfig::default()
        };
        let res = search(&ctx, &cfg).map_err(|e| e.to_string())?;
        if res.best.clusters() == clusters_of(&block) {
            recovered += 1;
        } else if res.report.mqc > scratch_mqc(&g, &block) + 1e-9 {
            outscored += 1;
        }
    }
    let detail = format!(
        "{recovered}/{runs} planted partitions recovered; {outscored} misses scored higher MQC than the planted partition"
    );
    ensure(recovered * 10 >= runs * 9, || detail.clone())?;
    Ok(detail)
}

fn sn_statistics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let s = AnnealingState::new(1000.0, 0.7).map_err(|e| e.to_string())?;
    let draws = 10_000;
    let accepted = (0..draws).filter(|_| sn_accept(-693.1, 0.0, &s, &mut rng)).count();
    let freq = accepted as f64 / draws as f64;
    ensure((freq - 0.5).abs() <= 0.02, || format!("acceptance frequency {freq}"))?;
    let worse_never = (0..draws).all(|i| {
        let old = i as f64 / 100.0;
        !sn_accept(old, old, &s, &mut rng) && !sn_accept(old + 1.0, old, &s, &mut rng)
    });
    ensure(worse_never, || "accepted a move with mqNew >= mqOld".into())?;
    Ok(format!("frequency {freq:.4}, no acceptance when mqNew >= mqOld"))
}

/// Bias-corrected sample skewness written out term by term.
fn scratch_g1(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    let m3 = xs.iter().map(|x| (x - mean) * (x - mean) * (x - mean)).sum::<f64>();
    let s = (m2 / (n - 1.0)).sqrt();
    (n / ((n - 1.0) * (n - 2.0))) * (m3 / (s * s * s))
}

fn skewness() -> Outcome {
    for sym in [
        &[3usize, 3, 3][..],
        &[1, 2, 3],
        &[2, 5, 8, 11],
        &[1, 1, 9, 9],
        &[4, 6, 6, 8],
    ] {
        let g1 = skewness_g1(sym);
        ensure(g1.abs() < 1e-12, || format!("G1{sym:?} = {g1}"))?;
    }
    let got = skewness_g1(&[1, 1, 1, 10]);
    let want = scratch_g1(&[1.0, 1.0, 1.0, 10.0]);
    ensure((got - want).abs() <= 1e-9, || format!("G1 = {got}, scratch {want}"))?;
    let step = next_percentile(75);
    ensure(step == 87, || format!("first increment from 75 is {step}"))?;
    Ok(format!("G1[1,1,1,10] = {got:.12}, 75 -> {step}"))
}

fn architecture_consistency() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = analyze("shop", dir.path());
    let arch = &out.snapshot.architecture;
    let clusters = arch.partition_clusters();
    ensure(clusters == [vec![0, 1, 2], vec![3, 4, 5]], || {
        format!("clusters {clusters:?}")
    })?;

    let deps = &out.analysis.corpus.dependencies;
    let names = &out.analysis.corpus.entities;
    let home = |v: usize| clusters.iter().position(|c| c.contains(&v)).unwrap();
    let mut expected: BTreeMap<usize, BTreeSet<(String, String)>> = BTreeMap::new();
    for e in &deps.edges {
        if home(e.caller) != home(e.callee) {
            expected
                .entry(home(e.callee))
                .or_default()
                .insert((names[e.callee].name.clone(), e.method.clone()));
        }
    }
    for iface in &arch.interfaces {
        let got: BTreeSet<(String, String)> = iface
            .methods
            .iter()
            .map(|m| (m.owner_name.clone(), m.method.clone()))
            .collect();
        let want = expected.remove(&iface.cluster_id).unwrap_or_default();
        ensure(got == want, || {
            format!("cluster {} interface {got:?}, expected {want:?}", iface.cluster_id)
        })?;
    }
    ensure(expected.is_empty(), || format!("interfaces missing for {expected:?}"))?;

    let edges: Vec<(usize, usize, Vec<String>)> = arch
        .interactions
        .edges
        .iter()
        .map(|e| {
            (
                e.provider,
                e.consumer,
                e.methods.iter().map(|m| m.qualified()).collect(),
            )
        })
        .collect();
    let hand = vec![
        (0, 1, vec!["InvoiceService.billJob".to_string()]),
        (1, 0, vec!["JobQueue.pendingCount".to_string()]),
    ];
    ensure(edges == hand, || format!("interaction edges {edges:?}"))?;

    let xml = to_graphml(&arch.interactions, &arch.labels);
    let golden = include_str!("fixtures/shop.graphml");
    ensure(xml == golden, || {
        "GraphML differs from tests/fixtures/shop.graphml".into()
    })?;
    let written = std::fs::read_to_string(dir.path().join("interactions.graphml")).map_err(|e| e.to_string())?;
    ensure(written == golden, || {
        "written GraphML differs from the golden file".into()
    })?;
    Ok("interfaces, 2 interaction edges and GraphML match".into())
}

/// Hand-built three-class retrieval instance.
struct Three {
    text: FeatureMatrix,
    names: FeatureMatrix,
    graph: Graph,
    normalizer: Normalizer,
}

const THREE_TEXT: [&[(&str, f64)]; 3] = [
    &[("schedul", 2.0), ("job", 1.0), ("thread", 1.0)],
    &[("process", 1.0), ("run", 2.0), ("command", 1.0)],
    &[("invoic", 2.0), ("payment", 1.0), ("job", 1.0)],
];
const THREE_NAMES: [&[&str]; 3] = [&["Job", "Scheduler"], &["Process", "Runner"], &["Invoice", "Service"]];
const THREE_W: [[f64; 3]; 3] = [[0.0, 0.5, 0.2], [0.5, 0.0, 0.1], [0.2, 0.1, 0.0]];

impl Three {
    fn new() -> Self {
        Three {
            text: apply_tf_idf(FeatureMatrix::from_counts(
                THREE_TEXT.map(|r| r.to_vec()),
                str::to_string,
            )),
            names: apply_tf_idf(FeatureMatrix::from_counts(
                THREE_NAMES.map(|r| r.iter().map(|c| (*c, 1.0)).collect::<Vec<_>>()),
                lowercase_key,
            )),
            graph: Graph::from_fn(3, |i, j| THREE_W[i][j]),
            normalizer: Normalizer::java_default(),
        }
    }

    fn inputs(&self) -> RetrievalInputs<'_> {
        RetrievalInputs {
            text: &self.text,
            class_names: &self.names,
            graph: &self.graph,
            normalizer: &self.normalizer,
        }
    }
}

/// Both rankings recomputed from the raw counts: idf ln(d/df), unknown
/// query terms weighted ln(d), cosine per space, mean score, centroid score
/// Σ w/rank, fused rank α·vsm + β·centroid.
fn three_class_oracle(query_stems: &[&str], query_concepts: &[&str]) -> Vec<(usize, usize, usize, f64)> {
    let d = 3.0_f64;
    fn space(rows: Vec<BTreeMap<String, f64>>, q: &[String], d: f64) -> Vec<f64> {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &rows {
            for t in r.keys() {
                *df.entry(t).or_default() += 1;
            }
        }
        let idf = |t: &str| df.get(t).map(|&n| (d / n as f64).ln());
        let weighted: Vec<BTreeMap<&str, f64>> = rows
            .iter()
            .map(|r| r.iter().map(|(t, c)| (t.as_str(), c * idf(t).unwrap())).collect())
            .collect();
        let mut qv: BTreeMap<&str, f64> = BTreeMap::new();
        for t in q {
            *qv.entry(t.as_str()).or_default() += idf(t).unwrap_or(d.ln());
        }
        let qn = qv.values().map(|x| x * x).sum::<f64>().sqrt();
        weighted
            .iter()
            .map(|r| {
                let rn = r.values().map(|x| x * x).sum::<f64>().sqrt();
                let dot: f64 = qv.iter().filter_map(|(t, w)| r.get(t).map(|x| x * w)).sum();
                if qn == 0.0 || rn == 0.0 {
                    0.0
                } else {
                    dot / (qn * rn)
                }
            })
            .collect()
    }
    let text_rows = THREE_TEXT
        .iter()
        .map(|r| r.iter().map(|(t, c)| (t.to_string(), *c)).collect())
        .collect();
    let name_rows = THREE_NAMES
        .iter()
        .map(|r| r.iter().map(|c| (c.to_lowercase(), 1.0)).collect())
        .collect();
    let qs: Vec<String> = query_stems.iter().map(|s| s.to_string()).collect();
    let qc: Vec<String> = query_concepts.iter().map(|s| s.to_string()).collect();
    let a = space(text_rows, &qs, d);
    let b = space(name_rows, &qc, d);
    let vsm: Vec<f64> = (0..3).map(|i| (a[i] + b[i]) / 2.0).collect();
    let order = |s: &[f64]| {
        let mut ids = vec![0usize, 1, 2];
        ids.sort_by(|&x, &y| s[y].partial_cmp(&s[x]).unwrap().then(x.cmp(&y)));
        let mut rank = [0usize; 3];
        for (pos, &id) in ids.iter().enumerate() {
            rank[id] = pos + 1;
        }
        rank
    };
    let vr = order(&vsm);
    let cent: Vec<f64> = (0..3)
        .map(|i| (0..3).filter(|&j| j != i).map(|j| THREE_W[i][j] / vr[j] as f64).sum())
        .collect();
    let cr = order(&cent);
    let mut fin: Vec<(usize, usize, usize, f64)> = (0..3)
        .map(|i| (i, vr[i], cr[i], 0.6 * vr[i] as f64 + 0.4 * cr[i] as f64))
        .collect();
    fin.sort_by(|x, y| x.3.partial_cmp(&y.3).unwrap().then(x.0.cmp(&y.0)));
    fin
}

fn random_retrieval(rng: &mut ChaCha8Rng) -> (FeatureMatrix, FeatureMatrix, Graph) {
    let vocab = [
        "job", "queue", "invoice", "payment", "schedul", "run", "report", "client",
    ];
    let n = rng.random_range(2..9);
    let rows: Vec<Vec<(&str, f64)>> = (0..n)
        .map(|_| {
            vocab
                .iter()
                .filter_map(|t| rng.random_bool(0.35).then(|| (*t, rng.random_range(1..4) as f64)))
                .collect()
        })
        .collect();
    let text = apply_tf_idf(FeatureMatrix::from_counts(rows.clone(), str::to_string));
    let names = apply_tf_idf(FeatureMatrix::from_counts(rows, str::to_string));
    let g = random_graph(n, 0.6, rng);
    (text, names, g)
}

fn retrieval() -> Outcome {
    let normalizer = Normalizer::java_default();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut both_first = 0;
    for t in 0..200 {
        let (text, names, graph) = random_retrieval(&mut rng);
        let inputs = RetrievalInputs {
            text: &text,
            class_names: &names,
            graph: &graph,
            normalizer: &normalizer,
        };
        let q = ["job queue", "invoice payment", "schedule run report", "client"][t % 4];
        let pure = QueryParams {
            alpha: 1.0,
            beta: 0.0,
            ..QueryParams::default()
        };
        let r = query_classes(q, &inputs, &pure).map_err(|e| e.to_string())?;
        let fin: Vec<usize> = r.ranking.iter().map(|e| e.class_id).collect();
        let vsm: Vec<usize> = r.vsm.iter().map(|e| e.class_id).collect();
        ensure(fin == vsm, || {
            format!("instance {t}: beta=0 order {fin:?} vs vsm {vsm:?}")
        })?;

        let r = query_classes(q, &inputs, &QueryParams::default()).map_err(|e| e.to_string())?;
        let v1 = r.vsm[0].class_id;
        if r.centroid[0].class_id == v1 {
            both_first += 1;
            ensure(r.ranking[0].class_id == v1, || {
                format!("instance {t}: class {v1} first in both, not final 1")
            })?;
        }
    }
    ensure(both_first > 0, || "no instance had a class first in both lists".into())?;

    let three = Three::new();
    let got = query_classes("schedule process", &three.inputs(), &QueryParams::default()).map_err(|e| e.to_string())?;
    let want = three_class_oracle(&["schedul", "process"], &["schedule", "process"]);
    let got_rows: Vec<(usize, usize, usize, f64)> = got
        .ranking
        .iter()
        .map(|f| (f.class_id, f.vsm_rank, f.centroid_rank, f.score))
        .collect();
    ensure(got_rows.len() == want.len(), || format!("{got_rows:?} vs {want:?}"))?;
    for (g, w) in got_rows.iter().zip(&want) {
        ensure(
            g.0 == w.0 && g.1 == w.1 && g.2 == w.2 && (g.3 - w.3).abs() < 1e-12,
            || format!("ranking {got_rows:?}, oracle {want:?}"),
        )?;
    }
    Ok(format!(
        "beta=0 and double-first hold on 200 instances ({both_first} double-first), 3-class order {:?}",
        want.iter().map(|r| r.0).collect::<Vec<_>>()
    ))
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let x = analyze("shop", a.path());
    let mut cfg = common::config("shop", b.path());
    cfg.parallel = false;
    let y = archrecover::run_pipeline(&cfg).map_err(|e| e.to_string())?;
    ensure(x.snapshot.content_json() == y.snapshot.content_json(), || {
        "snapshot contents differ".into()
    })?;
    let load = |d: &std::path::Path| {
        archrecover::ArchitectureSnapshot::load(&d.join("snapshot.json")).map(|s| s.content_json())
    };
    let (la, lb) = (
        load(a.path()).map_err(|e| e.to_string())?,
        load(b.path()).map_err(|e| e.to_string())?,
    );
    ensure(la == lb, || "saved snapshots differ".into())?;
    for f in ["corpus.json", "similarity.json", "interactions.graphml"] {
        let fa = std::fs::read(a.path().join(f)).map_err(|e| e.to_string())?;
        let fb = std::fs::read(b.path().join(f)).map_err(|e| e.to_string())?;
        ensure(fa == fb, || format!("{f} differs"))?;
    }
    Ok(format!("{} bytes of snapshot content identical", la.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("tokenization fixture", tokenization),
        ("inheritance fixture", inheritance),
        ("tf-idf zeroing", tf_idf_zeroing),
        ("similarity ranges", similarity_ranges),
        ("incremental MQ oracle", incremental_mq),
        ("MQC identity", mqc_identity),
        ("exhaustive optimum recovery", exhaustive_optimum),
        ("planted partition recovery", planted_partition),
        ("SN statistics", sn_statistics),
        ("skewness", skewness),
        ("architecture consistency", architecture_consistency),
        ("retrieval", retrieval),
        ("determinism", determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS  {name:<28} {detail} [{ms} ms]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<28} {detail} [{ms} ms]");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
