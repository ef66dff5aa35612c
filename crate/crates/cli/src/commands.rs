use std::path::{Path, PathBuf};

use anyhow::anyhow;
use evidential_magdm::calibration::{self, Verification};
use evidential_magdm::fusion::{self, FeatureSet, FusionConfig, FusionReport, SyntheticConfig, SYNTHETIC_SOURCES};
use evidential_magdm::linguistic::DecisionMatrix;
use evidential_magdm::pipeline::{self, PipelineConfig, PipelineReport};
use evidential_magdm::Matrix;
use serde_json::{json, Value};

use crate::failure::{CliResult, Failure, CHECKS_FAILED};
use crate::input::{load_config, read_decision_matrix, read_features, read_manifest};
use crate::output::{f6, json_text, matrix_csv, md_json, md_matrix, md_table, term_csv, to_value, write_atomic};

pub struct RankArgs {
    pub inputs: Vec<PathBuf>,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub json: bool,
    pub dump_intermediates: bool,
}

fn pipeline_config(path: Option<&Path>) -> CliResult<PipelineConfig> {
    let cfg: PipelineConfig = match path {
        Some(p) => load_config(p)?,
        None => PipelineConfig::default(),
    };
    cfg.validate().map_err(Failure::config)?;
    Ok(cfg)
}

fn check_labels(matrices: &[DecisionMatrix], inputs: &[PathBuf]) -> CliResult<()> {
    let first = &matrices[0];
    for (m, path) in matrices.iter().zip(inputs).skip(1) {
        if m.attributes() != first.attributes() || m.alternatives() != first.alternatives() {
            return Err(Failure::input(anyhow!(
                "{}: alternative/attribute labels differ from {}",
                path.display(),
                inputs[0].display()
            )));
        }
    }
    Ok(())
}

fn pair_labels(experts: &[String], pairs: &[(usize, usize)]) -> Vec<String> {
    pairs.iter().map(|&(a, b)| format!("{}-{}", experts[a], experts[b])).collect()
}

pub fn rank(args: &RankArgs) -> CliResult<u8> {
    let cfg = pipeline_config(args.config.as_deref())?;
    let matrices = args
        .inputs
        .iter()
        .map(|p| read_decision_matrix(p))
        .collect::<CliResult<Vec<_>>>()?;
    if let Some(first) = matrices.first() {
        log::info!(
            "{} expert(s), {} alternatives × {} attributes",
            matrices.len(),
            first.num_alternatives(),
            first.num_attributes()
        );
    }
    if matrices.len() >= 2 {
        check_labels(&matrices, &args.inputs)?;
    }
    let report = pipeline::run(&matrices, &cfg)?;

    let mut body = to_value(&report)?;
    if !args.dump_intermediates {
        if let Value::Object(map) = &mut body {
            map.remove("memberships");
            map.remove("bpas");
        }
    }
    let inputs: Vec<String> = args.inputs.iter().map(|p| p.display().to_string()).collect();
    let doc = json!({ "inputs": inputs, "report": body });
    let text = json_text(&doc);
    write_atomic(&args.out.join("report.json"), text.as_bytes())?;
    write_atomic(&args.out.join("report.md"), rank_markdown(&report)?.as_bytes())?;
    if args.dump_intermediates {
        dump_intermediates(&report, &args.out.join("intermediates"))?;
    }

    if args.json {
        print!("{text}");
    } else {
        let a = &report.assessment;
        println!("expert weights:");
        for (e, w) in a.experts.iter().zip(&a.weights.weights) {
            println!("  {e}  {}", f6(*w));
        }
        let order: Vec<&str> = report.ranking.order.iter().map(|&i| a.alternatives[i].as_str()).collect();
        println!("ranking: {}", order.join(" > "));
        println!("report written to {}", args.out.display());
    }
    Ok(0)
}

fn rank_markdown(r: &PipelineReport) -> CliResult<String> {
    let a = &r.assessment;
    let mut s = String::from("# Expert weighting and ranking\n\n## Configuration\n\n");
    md_json(&mut s, &to_value(&r.config)?);

    s.push_str("## Expert weights\n\n");
    let rows: Vec<Vec<String>> = (0..a.experts.len())
        .map(|k| {
            vec![
                a.experts[k].clone(),
                f6(a.weights.averages[k]),
                f6(a.weights.supports[k]),
                f6(a.weights.weights[k]),
            ]
        })
        .collect();
    let header = ["expert", "average divergence", "support", "weight"].map(String::from);
    md_table(&mut s, &header, &rows);
    let order: Vec<&str> = a.weights.order().iter().map(|&k| a.experts[k].as_str()).collect();
    s.push_str(&format!("Expert order: {}\n\n", order.join(" ≻ ")));

    s.push_str("## Pairwise divergence\n\n");
    let pairs = pair_labels(&a.experts, &a.divergence.pairs);
    let mut with_avg = a.divergence.pairwise.to_rows();
    with_avg.push(a.divergence.pair_aggregates.clone());
    let mut labels = a.alternatives.clone();
    labels.push(format!("{:?}", r.config.pair_aggregation));
    md_matrix(&mut s, "alternative", &labels, &pairs, &Matrix::from_rows(&with_avg)?);

    s.push_str("## Divergence matrix\n\n");
    md_matrix(&mut s, "expert", &a.experts, &a.experts, &a.divergence.aggregate);

    s.push_str("## Fused matrix and ranking\n\n");
    let rk = &r.ranking;
    let mut header = vec!["rank".to_owned(), "alternative".to_owned()];
    header.extend(a.attributes.iter().cloned());
    header.push("score".into());
    let rows: Vec<Vec<String>> = rk
        .order
        .iter()
        .enumerate()
        .map(|(pos, &i)| {
            let mut row = vec![(pos + 1).to_string(), a.alternatives[i].clone()];
            row.extend(rk.fused.row(i).iter().map(|&v| f6(v)));
            row.push(f6(rk.scores[i]));
            row
        })
        .collect();
    md_table(&mut s, &header, &rows);
    let ideal: Vec<String> = rk.ideal.iter().map(|&v| f6(v)).collect();
    s.push_str(&format!("Ideal solution: ({})\n", ideal.join(", ")));
    Ok(s)
}

fn dump_intermediates(r: &PipelineReport, dir: &Path) -> CliResult<()> {
    let a = &r.assessment;
    let terms = r.config.linguistic.terms;
    for (stage, matrices) in [("memberships", &a.memberships), ("bpa", &a.bpas)] {
        for (expert, m) in a.experts.iter().zip(matrices) {
            let csv = term_csv(&a.alternatives, &a.attributes, terms, m);
            write_atomic(&dir.join(stage).join(format!("{expert}.csv")), csv.as_bytes())?;
        }
    }
    let per_expert: [(&str, &[Matrix]); 4] = [
        ("normalized", &a.normalized),
        ("belief", &a.beliefs),
        ("plausibility", &a.plausibilities),
        ("wpbl", &a.wpbl),
    ];
    for (stage, matrices) in per_expert {
        for (expert, m) in a.experts.iter().zip(matrices) {
            let csv = matrix_csv("alternative", &a.alternatives, &a.attributes, m);
            write_atomic(&dir.join(stage).join(format!("{expert}.csv")), csv.as_bytes())?;
        }
    }
    let pairs = pair_labels(&a.experts, &a.divergence.pairs);
    let tables = [
        (
            "pairwise_divergence.csv",
            matrix_csv("alternative", &a.alternatives, &pairs, &a.divergence.pairwise),
        ),
        (
            "divergence_matrix.csv",
            matrix_csv("expert", &a.experts, &a.experts, &a.divergence.aggregate),
        ),
        (
            "fused.csv",
            matrix_csv("alternative", &a.alternatives, &a.attributes, &r.ranking.fused),
        ),
    ];
    for (name, csv) in tables {
        write_atomic(&dir.join(name), csv.as_bytes())?;
    }
    Ok(())
}

pub struct FuseArgs {
    pub manifest: PathBuf,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub json: bool,
    pub seed: Option<u64>,
}

pub fn fuse_features(args: &FuseArgs) -> CliResult<u8> {
    let manifest = read_manifest(&args.manifest)?;
    let mut cfg: FusionConfig = match (&args.config, manifest.config) {
        (Some(p), _) => load_config(p)?,
        (None, Some(c)) => c,
        (None, None) => FusionConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(Failure::config)?;
    if manifest.sources.len() < 2 {
        return Err(Failure::input(anyhow!(
            "{}: fusion needs at least 2 sources, got {}",
            args.manifest.display(),
            manifest.sources.len()
        )));
    }
    let mut sources: Vec<FeatureSet> = Vec::new();
    let mut dim_names = Vec::new();
    for path in &manifest.sources {
        let (set, names) = read_features(path)?;
        if let Some(first) = sources.first() {
            if set.features().shape() != first.features().shape() {
                return Err(Failure::input(anyhow!(
                    "{}: shape {:?} differs from {} {:?}",
                    path.display(),
                    set.features().shape(),
                    first.source_id(),
                    first.features().shape()
                )));
            }
            if let (Some(a), Some(b)) = (set.labels(), first.labels()) {
                if a != b {
                    return Err(Failure::input(anyhow!(
                        "{}: labels differ from {}",
                        path.display(),
                        first.source_id()
                    )));
                }
            }
        } else {
            dim_names = names;
        }
        sources.push(set);
    }
    log::info!("{} sources, {:?} samples × dims", sources.len(), sources[0].features().shape());
    let report = fusion::run_fusion(&sources, &cfg)?;

    let fused_csv = features_csv(&report.fused, &dim_names);
    write_atomic(&args.out.join("fused.csv"), fused_csv.as_bytes())?;
    let inputs: Vec<String> = manifest.sources.iter().map(|p| p.display().to_string()).collect();
    let doc = json!({ "inputs": inputs, "report": to_value(&report)? });
    let text = json_text(&doc);
    write_atomic(&args.out.join("metrics.json"), text.as_bytes())?;
    write_atomic(&args.out.join("metrics.md"), fusion_markdown(&report)?.as_bytes())?;

    if args.json {
        print!("{text}");
    } else {
        println!("source weights:");
        for (s, w) in report.plan.sources.iter().zip(&report.plan.weights) {
            println!("  {s}  {}", f6(*w));
        }
        if let Some(m) = &report.fused_metrics {
            println!("fused accuracy {} (kappa {})", f6(m.overall_accuracy), m.kappa);
            for s in &report.source_metrics {
                println!("  {} alone: accuracy {}", s.source_id, f6(s.metrics.overall_accuracy));
            }
        }
        println!("output written to {}", args.out.display());
    }
    Ok(0)
}

fn features_csv(set: &FeatureSet, dim_names: &[String]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = dim_names.to_vec();
    if set.labels().is_some() {
        header.push("label".into());
    }
    w.write_record(&header).expect("in-memory write");
    for i in 0..set.num_samples() {
        let mut row: Vec<String> = set.features().row(i).iter().map(|v| v.to_string()).collect();
        if let Some(l) = set.labels() {
            row.push(l[i].to_string());
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn fusion_markdown(r: &FusionReport) -> CliResult<String> {
    let mut s = String::from("# Feature fusion\n\n## Configuration\n\n");
    md_json(&mut s, &to_value(&r.config)?);
    s.push_str("## Source weights\n\n");
    let header = ["source", "weight"].map(String::from);
    let rows: Vec<Vec<String>> = r
        .plan
        .sources
        .iter()
        .zip(&r.plan.weights)
        .map(|(src, w)| vec![src.clone(), f6(*w)])
        .collect();
    md_table(&mut s, &header, &rows);
    s.push_str(&format!(
        "{} block(s) of up to {} dims; {} sampled rows.\n\n",
        r.plan.blocks.len(),
        r.plan.block_size,
        r.plan.rows_used.len()
    ));
    if let Some(m) = &r.fused_metrics {
        s.push_str(&format!(
            "## Classification\n\nNearest centroid, {} train / {} test samples.\n\n",
            r.train_samples, r.test_samples
        ));
        let header = ["features", "accuracy", "kappa", "macro F1"].map(String::from);
        let mut rows = vec![vec![
            "fused".to_owned(),
            f6(m.overall_accuracy),
            m.kappa.to_string(),
            m.macro_avg.f1.to_string(),
        ]];
        for src in &r.source_metrics {
            let sm = &src.metrics;
            rows.push(vec![
                src.source_id.clone(),
                f6(sm.overall_accuracy),
                sm.kappa.to_string(),
                sm.macro_avg.f1.to_string(),
            ]);
        }
        md_table(&mut s, &header, &rows);
        s.push_str("### Fused, per class\n\n");
        let header = ["class", "accuracy", "sensitivity", "specificity", "precision", "F1"].map(String::from);
        let rows: Vec<Vec<String>> = m
            .per_class
            .iter()
            .map(|c| {
                vec![
                    c.class.to_string(),
                    c.accuracy.to_string(),
                    c.sensitivity.to_string(),
                    c.specificity.to_string(),
                    c.precision.to_string(),
                    c.f1.to_string(),
                ]
            })
            .collect();
        md_table(&mut s, &header, &rows);
    }
    Ok(s)
}

pub struct VerifyArgs {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub json: bool,
}

pub fn verify(args: &VerifyArgs) -> CliResult<u8> {
    let cfg = pipeline_config(args.config.as_deref())?;
    let v = calibration::verify(&cfg)?;
    let text = json_text(&to_value(&v)?);
    let md = verify_markdown(&v)?;
    if let Some(out) = &args.out {
        write_atomic(&out.join("verify.json"), text.as_bytes())?;
        write_atomic(&out.join("verify.md"), md.as_bytes())?;
    }
    if args.json {
        print!("{text}");
    } else {
        print!("{md}");
    }
    Ok(if v.all_passed() { 0 } else { CHECKS_FAILED })
}

fn verify_markdown(v: &Verification) -> CliResult<String> {
    let mut s = String::from("# Recruitment case checks\n\n## Configuration\n\n");
    md_json(&mut s, &to_value(&v.config)?);
    let header = ["check", "result", "max deviation", "tolerance", "detail"].map(String::from);
    let opt = |x: Option<f64>| x.map_or_else(|| "-".to_owned(), |v| format!("{v:.6}"));
    let rows: Vec<Vec<String>> = v
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.to_owned(),
                if c.passed { "PASS" } else { "FAIL" }.to_owned(),
                opt(c.max_deviation),
                opt(c.tolerance),
                c.detail.clone(),
            ]
        })
        .collect();
    s.push_str("## Checks\n\n");
    md_table(&mut s, &header, &rows);
    let passed = v.checks.iter().filter(|c| c.passed).count();
    s.push_str(&format!("{passed}/{} checks passed.\n\n", v.checks.len()));

    s.push_str("## Ranking scores\n\n");
    let header = ["candidate", "computed", "printed"].map(String::from);
    let rows: Vec<Vec<String>> = v
        .scores_vs_printed
        .iter()
        .enumerate()
        .map(|(i, (c, p))| vec![format!("C{}", i + 1), f6(*c), format!("{p:.4}")])
        .collect();
    md_table(&mut s, &header, &rows);
    Ok(s)
}

pub struct SyntheticArgs {
    pub out: PathBuf,
    pub seed: u64,
}

/// Writes the three-source benchmark as CSVs plus a manifest.
pub fn synthetic(args: &SyntheticArgs) -> CliResult<u8> {
    let cfg = SyntheticConfig::default();
    let sources = fusion::synthetic_sources(&cfg, args.seed)?;
    let names: Vec<String> = (0..cfg.dims).map(|d| format!("f{d}")).collect();
    for s in &sources {
        let csv = features_csv(s, &names);
        write_atomic(&args.out.join(format!("{}.csv", s.source_id())), csv.as_bytes())?;
    }
    let files: Vec<String> = SYNTHETIC_SOURCES.iter().map(|s| format!("{s}.csv")).collect();
    let manifest = json!({
        "sources": files,
        "config": to_value(&FusionConfig { seed: args.seed, ..FusionConfig::default() })?,
    });
    write_atomic(&args.out.join("manifest.json"), json_text(&manifest).as_bytes())?;
    println!("synthetic benchmark written to {}", args.out.display());
    Ok(0)
}
