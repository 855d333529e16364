//! Acceptance checks. Runs as a plain binary so that every check prints one
//! PASS/FAIL line whether or not the others fail.

use std::cell::RefCell;
use std::path::Path;
use std::time::{Duration, Instant};

use ilscape::corpus::{desk_config, desk_mesh, desk_scenes, translate_params, CorpusScene, DEFAULT_SEED};
use ilscape::export::{matrix_csv, mds_csv, pr_csv, prediction_csv, prediction_pr_csv, saliency_csv};
use ilscape::ild::ild_string;
use ilscape::svg::scatter_svg;
use ilscape::trajectory_csv::trajectories_string;
use ilscape_core::analysis::{
    distance_matrix, leave_one_out, mds_embed, predict, prediction_report, retrieve, saliency, segment_signatures,
    DbEntry, DescriptorDb, LooReport, PredictionLevel,
};
use ilscape_core::descriptor::{distance, AttributeWeights};
use ilscape_core::encode::Encoder;
use ilscape_core::flowfield::{compute_attributes, AttributeKind, NormMode, TensorDecomposition, VectorField};
use ilscape_core::trajectory::{synthesize, Preset, SynthParams};
use ilscape_core::{Axis, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N_SEG: usize = 8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit: f64) -> (bool, String) {
    let s = elapsed.as_secs_f64();
    (s < limit, format!("{s:.2} s of {limit} s"))
}

/// Encoded corpus shared by several checks.
struct Corpus {
    scenes: Vec<CorpusScene>,
    db: DescriptorDb,
    loo: LooReport,
}

fn encode_corpus(encoder: &Encoder, scenes: &[CorpusScene]) -> DescriptorDb {
    let entries = scenes
        .iter()
        .map(|s| {
            let d = encoder.encode(&s.trajectories).unwrap().with_label(&s.label);
            let seg = segment_signatures(encoder, &s.trajectories, N_SEG).unwrap();
            DbEntry {
                segments: Some(seg),
                ..DbEntry::new(&s.id, d)
            }
        })
        .collect();
    DescriptorDb::new(entries).unwrap()
}

fn oracle() -> Outcome {
    let start = Instant::now();
    let n = 8;
    let swirl = VectorField::from_fn(Vec3::splat(-1.0), 2.0, n, |p| Vec3::new(-p.y, p.x, 0.0)).unwrap();
    let source = VectorField::from_fn(Vec3::splat(-1.0), 2.0, n, |p| p).unwrap();
    let cases = [(swirl, [1.0, 0.0, 0.0, 1.0]), (source, [1.5f64.sqrt(), 3f64.sqrt(), 0.0, 0.0])];
    let kinds = [AttributeKind::Mt, AttributeKind::Md, AttributeKind::Ms, AttributeKind::Mw];
    let mut worst: f64 = 0.0;
    for (field, want) in &cases {
        let grids = compute_attributes(field, &[]);
        for k in 1..n - 1 {
            for j in 1..n - 1 {
                for i in 1..n - 1 {
                    let c = field.index(i, j, k);
                    for (a, w) in kinds.iter().zip(want) {
                        let got = grids.get(*a)[c];
                        worst = worst.max((got - w).abs() / w.abs().max(1.0));
                    }
                }
            }
        }
    }
    let (fast, t) = within(start.elapsed(), 1.0);
    check(worst <= 1e-6 && fast, format!("max relative error {worst:.1e}, {t}"))
}

fn decomposition() -> Outcome {
    let start = Instant::now();
    let rng = RefCell::new(ChaCha8Rng::seed_from_u64(DEFAULT_SEED));
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let field = VectorField::from_fn(Vec3::ZERO, 1.0, 8, |_| {
            let mut r = rng.borrow_mut();
            Vec3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
        })
        .unwrap();
        for c in 0..512 {
            let [i, j, k] = field.coords(c);
            let t = field.gradient(i, j, k);
            let d = TensorDecomposition::new(&t);
            worst = worst.max((d.symmetric() + d.antisymmetric()).max_abs_diff(&t));
        }
    }
    let (fast, t) = within(start.elapsed(), 5.0);
    check(worst <= 1e-9 && fast, format!("max |S + A - T| {worst:.1e}, {t}"))
}

fn time_variance() -> Outcome {
    let start = Instant::now();
    let mesh = desk_mesh();
    let slow = translate_params();
    let fast = SynthParams {
        speed: 2.0 * slow.speed,
        duration: 0.5 * slow.duration,
        ..slow
    };
    let w = AttributeWeights::default();
    let mut d = [0.0; 2];
    for (out, mode) in d.iter_mut().zip([NormMode::Direction, NormMode::Average]) {
        let enc = Encoder::new(mesh.clone(), desk_config(mode, 8)).unwrap();
        let a = enc.encode(&synthesize(Preset::Translate, &slow, 1, Some(&mesh)).unwrap()).unwrap();
        let b = enc.encode(&synthesize(Preset::Translate, &fast, 1, Some(&mesh)).unwrap()).unwrap();
        *out = distance(&a, &b, &w).unwrap();
    }
    let [direction, average] = d;
    let (quick, t) = within(start.elapsed(), 30.0);
    check(
        direction < 0.02 && average >= 5.0 * direction && quick,
        format!("direction {direction:.5}, average {average:.5} ({:.1}x), {t}", average / direction),
    )
}

fn rotations(corpus: &Corpus) -> Outcome {
    let start = Instant::now();
    let mesh = desk_mesh();
    let c = mesh.bounds().center();
    let cfg = desk_config(NormMode::Direction, 8);
    let base_enc = Encoder::new(mesh.clone(), cfg).unwrap();
    let w = AttributeWeights::default();
    let mut worst: f64 = 0.0;
    let mut encoders = Vec::new();
    for turns in 1..4 {
        let m = mesh.map_vertices(|p| Axis::Z.quarter_turn(p, c, turns)).unwrap();
        encoders.push((turns, Encoder::new(m, cfg).unwrap()));
    }
    for s in corpus.scenes.iter().step_by(ilscape::corpus::INSTANCES) {
        let base = base_enc.encode(&s.trajectories).unwrap();
        for (turns, enc) in &encoders {
            let ts = s
                .trajectories
                .map(|p| Axis::Z.quarter_turn(p, c, *turns), |v| Axis::Z.quarter_turn_dir(v, *turns));
            worst = worst.max(distance(&base, &enc.encode(&ts).unwrap(), &w).unwrap());
        }
    }
    let (quick, t) = within(start.elapsed(), 60.0);
    check(worst < 0.05 && quick, format!("largest distance over 3 classes x 3 turns {worst:.5}, {t}"))
}

fn depth(corpus: &Corpus) -> Outcome {
    let start = Instant::now();
    let mesh = desk_mesh();
    let e7 = Encoder::new(mesh.clone(), desk_config(NormMode::Direction, 7)).unwrap();
    let e8 = Encoder::new(mesh, desk_config(NormMode::Direction, 8)).unwrap();
    let w = AttributeWeights::default();
    let mut worst: f64 = 0.0;
    for s in corpus.scenes.iter().step_by(ilscape::corpus::INSTANCES) {
        let a = e7.encode(&s.trajectories).unwrap();
        let b = e8.encode(&s.trajectories).unwrap();
        worst = worst.max(distance(&a, &b, &w).unwrap());
    }
    let intra = corpus.loo.mean_intra;
    let (quick, t) = within(start.elapsed(), 60.0);
    check(
        worst < 0.1 && worst < intra && quick,
        format!("largest depth 7 vs 8 distance {worst:.5}, intra-class mean {intra:.5}, {t}"),
    )
}

fn retrieval(corpus: &Corpus, elapsed: Duration) -> Outcome {
    let l = &corpus.loo;
    let (quick, t) = within(elapsed, 300.0);
    check(
        l.accuracy >= 0.9 && l.mean_intra < l.mean_inter && quick,
        format!(
            "accuracy {:.3}, intra {:.4}, inter {:.4}, {t}",
            l.accuracy, l.mean_intra, l.mean_inter
        ),
    )
}

fn prediction(corpus: &Corpus, levels: &[PredictionLevel], elapsed: Duration) -> Outcome {
    let w = AttributeWeights::default();
    let p: Vec<f64> = levels.iter().map(|l| l.precision_at_half_recall).collect();
    let nq = levels[0].queries.max(1) as f64;
    // one swapped pair moves a single query's precision at recall 0.5 by at most 1/3
    let noise = 1.0 / (3.0 * nq);
    let monotone = p.windows(2).all(|x| x[1] >= x[0] - noise);
    let mut exact = true;
    for (i, e) in corpus.db.entries().iter().enumerate() {
        let rest = corpus.db.without(i);
        let seg = e.segments.as_ref().unwrap().segment(N_SEG).unwrap().unwrap();
        let a = predict(&rest, seg, N_SEG, &w).unwrap();
        let b = retrieve(&rest, &e.descriptor, rest.len(), &w).unwrap();
        exact &= a.len() == b.len()
            && a.iter().zip(&b).all(|(x, y)| x.id == y.id && x.distance.to_bits() == y.distance.to_bits());
    }
    let (quick, t) = within(elapsed, 600.0);
    let shown: Vec<String> = p.iter().map(|x| format!("{x:.2}")).collect();
    check(
        p[0] >= 0.5 && monotone && exact && quick,
        format!(
            "P@R0.5 by k [{}], non-decreasing within {noise:.3}: {monotone}, k = {N_SEG} equals full retrieval: {exact}, {t}",
            shown.join(", ")
        ),
    )
}

fn throughput() -> Outcome {
    let mesh = desk_mesh();
    let params = SynthParams {
        count: 6173,
        speed: 2.0,
        emitter: ilscape_core::Aabb::new(Vec3::new(-0.9, -0.9, 0.1), Vec3::new(0.9, 0.9, 0.9)),
        ..translate_params()
    };
    let ts = synthesize(Preset::Swirl, &params, 5, Some(&mesh)).unwrap();
    let samples = ts.sample_count();
    let start = Instant::now();
    let enc = Encoder::new(mesh, desk_config(NormMode::Direction, 8)).unwrap();
    let built = start.elapsed();
    let (_, stats) = enc.encode_with_stats(&ts).unwrap();
    let (quick, t) = within(start.elapsed(), 5.0);
    check(
        samples >= 500_000 && quick,
        format!(
            "{samples} samples, {} active sensors, encoder built in {:.2} s, total {t}",
            stats.active_sensors,
            built.as_secs_f64()
        ),
    )
}

/// Every file the suite produces, written under `dir`.
fn write_outputs(dir: &Path, corpus: &Corpus, levels: &[PredictionLevel]) {
    let w = AttributeWeights::default();
    let put = |name: &str, text: String| std::fs::write(dir.join(name), text).unwrap();
    for (s, e) in corpus.scenes.iter().zip(corpus.db.entries()) {
        put(&format!("{}.ild", e.id), ild_string(&e.descriptor, e.segments.as_ref()));
        put(&format!("{}.csv", s.id), trajectories_string(&s.trajectories));
    }
    let m = distance_matrix(&corpus.db, &w).unwrap();
    put("matrix.csv", matrix_csv(&m));
    put("loo_pr.csv", pr_csv(&corpus.loo.mean_pr));
    let emb = mds_embed(&m.values).unwrap();
    let labels: Vec<Option<String>> = corpus.db.entries().iter().map(|e| e.label.clone()).collect();
    put("mds.csv", mds_csv(&m.ids, &labels, &emb));
    put("mds.svg", scatter_svg(&emb.points, &labels, &m.ids));
    put("prediction.csv", prediction_csv(levels));
    put("prediction_pr.csv", prediction_pr_csv(levels));
    let enc = Encoder::new(desk_mesh(), desk_config(NormMode::Direction, 8)).unwrap();
    let scene = enc.encode_detailed(&corpus.scenes[0].trajectories).unwrap();
    put("saliency.csv", saliency_csv(&saliency(&enc, &scene, &w, 0.1).unwrap()));
}

fn run_corpus() -> (Corpus, Vec<PredictionLevel>, Duration, Duration) {
    let start = Instant::now();
    let scenes = desk_scenes(DEFAULT_SEED).unwrap();
    let enc = Encoder::new(desk_mesh(), desk_config(NormMode::Direction, 8)).unwrap();
    let db = encode_corpus(&enc, &scenes);
    let w = AttributeWeights::default();
    let loo = leave_one_out(&db, &w).unwrap();
    let loo_time = start.elapsed();
    let levels = prediction_report(&db, &w).unwrap();
    (Corpus { scenes, db, loo }, levels, loo_time, start.elapsed())
}

fn same_files(a: &Path, b: &Path) -> (bool, usize) {
    let mut names: Vec<_> = std::fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let equal = names
        .iter()
        .all(|n| std::fs::read(a.join(n)).ok() == std::fs::read(b.join(n)).ok());
    let count_b = std::fs::read_dir(b).unwrap().count();
    (equal && count_b == names.len(), names.len())
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |name, o: Outcome| {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o));
    };
    report("1 attribute oracle", oracle());
    report("2 decomposition identity", decomposition());
    report("3 time-variance switch", time_variance());

    let (corpus, levels, loo_time, predict_time) = run_corpus();
    report("4 orientation robustness", rotations(&corpus));
    report("5 sensor-count independence", depth(&corpus));
    report("6 desk-scale retrieval", retrieval(&corpus, loo_time));
    report("7 prediction", prediction(&corpus, &levels, predict_time));
    report("8 throughput", throughput());

    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    write_outputs(first.path(), &corpus, &levels);
    // the second run is single-threaded
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| {
        let (again, again_levels, _, _) = run_corpus();
        write_outputs(second.path(), &again, &again_levels);
    });
    let (equal, files) = same_files(first.path(), second.path());
    report(
        "9 determinism",
        check(equal, format!("{files} output files compared byte for byte across thread counts")),
    );

    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    if !failed.is_empty() {
        eprintln!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
