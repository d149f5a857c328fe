use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use mtpairs::data_model::{
    convert_tsv_release, enumerate_pairs, filter_pairs, ingest_external_scores, read_external_scores,
    write_collection, Manifest, Orientation, SubsetSpec, SystemPair,
};
use mtpairs::error::at_path;
use mtpairs::human_eval::{significance_band, MatchingMode, ZeroHandling};
use mtpairs::meta::{hunter_schmidt, read_observations};
use mtpairs::metrics::{score_campaign, BuiltinMetric, MetricConfig, TokenizationScheme, Tokenizer};
use mtpairs::pairwise::{
    build_delta_records, human_tests, scatter_points, significance_columns, AccuracyTable, DeltaRecord,
    HumanTestConfig,
};
use mtpairs::pipeline::{cmd_compare, cmd_pipeline, CompareConfig, PipelineConfig};
use mtpairs::report::{format_p, render_accuracy_table, render_quadrant_table, RenderOptions};
use mtpairs::stats::{
    bootstrap_accuracy_clusters, collect_segment_stats, metric_tests, quadrant_analysis, ResampleConfig,
};
use mtpairs::{load_collection, Collection, Error, Result, WilcoxonConfig};

use crate::args::*;

pub struct Ctx<'a> {
    pub global: &'a GlobalArgs,
    pub command_line: String,
}

impl Ctx<'_> {
    fn collection(&self) -> Result<Collection> {
        let path = self
            .global
            .collection
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("--collection is required".into()))?;
        load_collection(path)
    }

    fn alphas(&self, collection: Option<&Collection>) -> Result<Vec<f64>> {
        match &self.global.alphas {
            Some(s) => parse_list(s)
                .iter()
                .map(|a| {
                    a.parse::<f64>()
                        .ok()
                        .filter(|x| *x > 0.0 && *x < 1.0)
                        .ok_or_else(|| Error::InvalidConfig(format!("invalid alpha '{a}'")))
                })
                .collect(),
            None => Ok(collection.map_or_else(|| Manifest::default().alphas, |c| c.manifest.alphas.clone())),
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.global.out {
            Some(path) => std::fs::write(path, text).map_err(at_path(path))?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn parse_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(str::to_owned).collect()
}

fn metric_config(a: &MetricArgs) -> Result<MetricConfig> {
    let scheme: TokenizationScheme = a.tokenizer.parse()?;
    if !(a.chrf_beta > 0.0) {
        return Err(Error::InvalidConfig(format!("chrf beta must be positive, got {}", a.chrf_beta)));
    }
    Ok(MetricConfig {
        tokenizer: Tokenizer {
            scheme,
            lowercase: a.lowercase,
        },
        strict_bleu: a.strict_bleu,
        chrf_beta: a.chrf_beta,
    })
}

fn human_config(a: &HumanArgs) -> Result<HumanTestConfig> {
    let matching: MatchingMode = a.matching.parse()?;
    let zero_handling: ZeroHandling = a.zeros.parse()?;
    Ok(HumanTestConfig {
        matching,
        wilcoxon: WilcoxonConfig {
            zero_handling,
            exact_max_n: a.exact_max_n,
            continuity_correction: !a.no_continuity_correction,
        },
    })
}

fn render_options(t: &TableArgs) -> Result<RenderOptions> {
    Ok(RenderOptions {
        style: t.style.parse()?,
        precision: t.precision,
    })
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        log::warn!("{w}");
    }
}

fn metric_list(collection: &Collection, metrics: &Option<String>) -> Vec<String> {
    match metrics {
        Some(m) => parse_list(m),
        None => collection.metric_names(),
    }
}

fn records(collection: &Collection, r: &RecordArgs) -> Result<(Vec<String>, Vec<DeltaRecord>)> {
    let metrics = metric_list(collection, &r.metrics);
    let mut warnings = Vec::new();
    let recs = build_delta_records(collection, &metrics, &human_config(&r.human)?, r.intersect_metrics, &mut warnings)?;
    warn_all(&warnings);
    Ok((metrics, recs))
}

fn columns(subset: &Option<String>, alphas: &[f64]) -> Result<(Vec<(String, SubsetSpec)>, usize)> {
    match subset {
        Some(s) => {
            let cols = s
                .split(';')
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(|c| Ok((c.to_owned(), c.parse::<SubsetSpec>()?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((cols, 0))
        }
        None => Ok((significance_columns(alphas), usize::from(!alphas.is_empty()))),
    }
}

fn apply_alphas(collection: &mut Collection, ctx: &Ctx) -> Result<Vec<f64>> {
    let alphas = ctx.alphas(Some(collection))?;
    collection.manifest.alphas = alphas.clone();
    Ok(alphas)
}

fn builtin_scored(collection: &mut Collection, metrics: &[String], cfg: &MetricConfig) -> Result<()> {
    let builtins: Vec<BuiltinMetric> = metrics.iter().filter_map(|m| BuiltinMetric::lookup(m)).collect();
    mtpairs::pipeline::score_builtin_metrics(collection, &builtins, cfg)?;
    Ok(())
}

pub fn ingest(ctx: &Ctx, a: &IngestArgs) -> Result<()> {
    let out = ctx
        .global
        .out
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("ingest needs --out".into()))?;
    let collection = if let Some(dir) = &a.tsv_dir {
        let mut manifest = Manifest::default();
        manifest.alphas = ctx.alphas(None)?;
        convert_tsv_release(dir, manifest)?
    } else {
        let scores = a
            .scores
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("ingest needs --scores or --tsv-dir".into()))?;
        let mut orientations = BTreeMap::new();
        for item in parse_list(a.orientation.as_deref().unwrap_or("")) {
            let (m, o) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("expected METRIC=orientation, got '{item}'")))?;
            orientations.insert(m.trim().to_owned(), o.trim().parse::<Orientation>()?);
        }
        ingest_external_scores(ctx.collection()?, read_external_scores(scores)?, &orientations)?
    };
    write_collection(&collection, out)?;
    eprintln!(
        "wrote {} campaigns, metrics: {}",
        collection.campaigns.len(),
        collection.metric_names().join(", ")
    );
    Ok(())
}

pub fn validate(ctx: &Ctx) -> Result<()> {
    let c = ctx.collection()?;
    let mut out = String::from("campaign\tlanguage_pair\tsystems\tsegments\tjudgements\tmetrics\n");
    for camp in &c.campaigns {
        let metrics: Vec<&str> = camp.metric_scores.iter().map(|m| m.metric_name.as_str()).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            camp.campaign_id,
            camp.language_pair,
            camp.systems().len(),
            camp.segments.len(),
            camp.judgements.len(),
            metrics.join(",")
        );
    }
    ctx.emit(&out)
}

pub fn score(ctx: &Ctx, a: &ScoreArgs) -> Result<()> {
    let metric: BuiltinMetric = a.metric.parse()?;
    let cfg = metric_config(&a.metric_args)?;
    let mut collection = ctx.collection()?;
    let mut out = format!("campaign\tsystem\t{}\n", metric.name());
    for camp in &mut collection.campaigns {
        if camp.outputs.is_empty() || camp.references().is_none() {
            log::warn!("campaign '{}' lacks outputs or references; not scored", camp.campaign_id);
            continue;
        }
        let (set, _) = score_campaign(camp, metric, &cfg)?;
        for sys in set.systems() {
            let v = set.system_score(sys).map(|v| set.orientation.normalize(v)).unwrap_or(f64::NAN);
            let _ = writeln!(out, "{}\t{}\t{:.4}", camp.campaign_id, sys, v);
        }
        camp.upsert_metric(set);
    }
    if let Some(path) = &a.write_collection {
        write_collection(&collection, path)?;
    }
    ctx.emit(&out)
}

pub fn human_test(ctx: &Ctx, a: &HumanArgs) -> Result<()> {
    let mut collection = ctx.collection()?;
    let alphas = apply_alphas(&mut collection, ctx)?;
    let mut warnings = Vec::new();
    let tests = human_tests(&collection, &human_config(a)?, &mut warnings)?;
    warn_all(&warnings);
    let mut out = String::from("campaign\tsystem_a\tsystem_b\thuman_delta\tn_units\tunmatched\tmethod\tp\tband\n");
    for t in tests {
        let band = significance_band(t.outcome.p_value, &alphas);
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.4}\t{}\t{}\t{:?}\t{}\t{}",
            t.pair.campaign_id,
            t.pair.system_a,
            t.pair.system_b,
            t.human_delta,
            t.n_units,
            t.unmatched,
            t.outcome.method,
            format_p(t.outcome.p_value),
            band.label
        );
    }
    ctx.emit(&out)
}

pub fn accuracy(ctx: &Ctx, a: &AccuracyArgs) -> Result<()> {
    let mut collection = ctx.collection()?;
    let alphas = apply_alphas(&mut collection, ctx)?;
    let (metrics, recs) = records(&collection, &a.records)?;
    let (cols, sort) = columns(&a.subset, &alphas)?;
    let table = AccuracyTable::build(&recs, &metrics, &cols, sort);
    ctx.emit(&render_accuracy_table(&table, &[], &render_options(&a.table)?)?)
}

pub fn scatter(ctx: &Ctx, a: &ScatterArgs) -> Result<()> {
    let collection = ctx.collection()?;
    let metrics = vec![a.metric.clone()];
    let mut warnings = Vec::new();
    let recs = build_delta_records(&collection, &metrics, &human_config(&a.human)?, false, &mut warnings)?;
    warn_all(&warnings);
    let spec: SubsetSpec = a.subset.as_deref().unwrap_or("all").parse()?;
    let mut out = String::from("metric_delta\thuman_delta\tdirection\n");
    for (m, h, d) in scatter_points(&filter_pairs(&recs, &spec), &a.metric) {
        let _ = writeln!(out, "{m}\t{h}\t{}", d.as_str());
    }
    ctx.emit(&out)
}

pub fn clusters(ctx: &Ctx, a: &ClusterArgs) -> Result<()> {
    let mut collection = ctx.collection()?;
    let alphas = apply_alphas(&mut collection, ctx)?;
    let (metrics, recs) = records(&collection, &a.records)?;
    let cols = match &a.subset {
        Some(_) => columns(&a.subset, &alphas)?.0,
        None => vec![("All".to_owned(), SubsetSpec::all())],
    };
    let cfg = ResampleConfig {
        n_resamples: a.resamples,
        seed: ctx.global.seed,
        confidence: a.confidence,
        alpha: 0.05,
    };
    let mut out = String::from("subset\tn\tmetric\taccuracy\twin_fraction\ttied_with_best\tbest\n");
    for (label, spec) in &cols {
        let rep = bootstrap_accuracy_clusters(&recs, &metrics, spec, &cfg)?;
        for (m, acc) in &rep.accuracy {
            let _ = writeln!(
                out,
                "{label}\t{}\t{m}\t{:.4}\t{:.4}\t{}\t{}",
                rep.n_pairs,
                acc,
                rep.win_fraction[m],
                rep.tied_with_best.contains(m),
                *m == rep.best_metric
            );
        }
    }
    let _ = writeln!(out, "# resamples {} seed {} confidence {}", cfg.n_resamples, cfg.seed, cfg.confidence);
    ctx.emit(&out)
}

pub fn sigtest(ctx: &Ctx, a: &SigtestArgs) -> Result<()> {
    let mut collection = ctx.collection()?;
    let metrics = vec![a.metric.clone()];
    let mcfg = metric_config(&a.metric_args)?;
    builtin_scored(&mut collection, &metrics, &mcfg)?;
    let store = collect_segment_stats(&collection, &metrics, &mcfg)?;
    let pairs: Vec<SystemPair> = collection.campaigns.iter().flat_map(enumerate_pairs).collect();
    let cfg = ResampleConfig {
        n_resamples: a.resamples,
        seed: ctx.global.seed,
        confidence: 0.95,
        alpha: a.alpha,
    };
    let tests = metric_tests(&store, &pairs, &a.metric, &cfg)?;
    if tests.is_empty() {
        return Err(Error::SegmentStatsRequired(a.metric.clone()));
    }
    let mut out = String::from("campaign\tsystem_a\tsystem_b\tscore_a\tscore_b\tp\tsignificant\n");
    for (pair, t) in &tests {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.4}\t{:.4}\t{}\t{}",
            pair.campaign_id,
            pair.system_a,
            pair.system_b,
            t.score_a,
            t.score_b,
            format_p(t.outcome.p_value),
            t.significant
        );
    }
    let _ = writeln!(out, "# resamples {} seed {} alpha {}", cfg.n_resamples, cfg.seed, cfg.alpha);
    ctx.emit(&out)
}

pub fn quadrants(ctx: &Ctx, a: &QuadrantArgs) -> Result<()> {
    let mut collection = ctx.collection()?;
    apply_alphas(&mut collection, ctx)?;
    let mcfg = metric_config(&a.metric_args)?;
    let metrics = metric_list(&collection, &a.records.metrics);
    builtin_scored(&mut collection, &metrics, &mcfg)?;
    let (metrics, recs) = records(&collection, &a.records)?;
    let store = collect_segment_stats(&collection, &metrics, &mcfg)?;
    let cfg = ResampleConfig {
        n_resamples: a.resamples,
        seed: ctx.global.seed,
        confidence: 0.95,
        alpha: a.metric_alpha,
    };
    let pairs: Vec<SystemPair> = recs.iter().map(|r| r.pair.clone()).collect();
    let mut reports = Vec::new();
    for m in &metrics {
        let tests = metric_tests(&store, &pairs, m, &cfg)?;
        if tests.is_empty() {
            log::warn!("metric '{m}' has no segment-level statistics; skipped");
            continue;
        }
        reports.push(quadrant_analysis(&recs, m, a.human_alpha, &tests));
    }
    ctx.emit(&render_quadrant_table(&reports, &render_options(&a.table)?))
}

pub fn meta(ctx: &Ctx, a: &MetaArgs) -> Result<()> {
    let res = hunter_schmidt(&read_observations(&a.input)?)?;
    ctx.emit(&format!("r\tn_total\tn_groups\n{:.6}\t{}\t{}\n", res.r, res.n_total, res.n_groups))
}

pub fn report(ctx: &Ctx, a: &ReportArgs) -> Result<()> {
    let mut collection = ctx.collection()?;
    let alphas = apply_alphas(&mut collection, ctx)?;
    let (metrics, recs) = records(&collection, &a.records)?;
    let (cols, sort) = columns(&a.subset, &alphas)?;
    let table = AccuracyTable::build(&recs, &metrics, &cols, sort);
    let mut clusters = Vec::new();
    if a.resamples > 0 {
        let cfg = ResampleConfig {
            n_resamples: a.resamples,
            seed: ctx.global.seed,
            confidence: a.confidence,
            alpha: 0.05,
        };
        for col in &table.columns {
            match bootstrap_accuracy_clusters(&recs, &metrics, &col.spec, &cfg) {
                Ok(c) => clusters.push(Some(c)),
                Err(Error::EmptySubset(_)) => clusters.push(None),
                Err(e) => return Err(e),
            }
        }
    }
    let refs: Vec<_> = clusters.iter().map(Option::as_ref).collect();
    ctx.emit(&render_accuracy_table(&table, &refs, &render_options(&a.table)?)?)
}

fn as_str(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    Ok(std::fs::read_to_string(path).map_err(at_path(path))?.lines().map(str::to_owned).collect())
}

pub fn compare(ctx: &Ctx, a: &CompareArgs) -> Result<()> {
    let refs = read_lines(&a.reference)?;
    let ha = read_lines(&a.hyp_a)?;
    let hb = read_lines(&a.hyp_b)?;
    let cfg = CompareConfig {
        metric: a.metric.parse()?,
        metric_cfg: metric_config(&a.metric_args)?,
        resample: ResampleConfig {
            n_resamples: a.resamples,
            seed: ctx.global.seed,
            confidence: 0.95,
            alpha: a.alpha,
        },
    };
    let r = cmd_compare(&as_str(&refs), &as_str(&ha), &as_str(&hb), &cfg)?;
    ctx.emit(&format!(
        "verdict\t{}\np\t{}\nmetric\t{}\nscore_a\t{:.4}\nscore_b\t{:.4}\nsegments\t{}\nresamples\t{}\nseed\t{}\nalpha\t{}\n",
        r.verdict.as_str(),
        format_p(r.p_value),
        r.metric,
        r.score_a,
        r.score_b,
        r.n_segments,
        r.n_resamples,
        r.seed,
        r.alpha
    ))
}

pub fn pipeline(ctx: &Ctx, a: &PipelineArgs) -> Result<()> {
    let collection = ctx.collection()?;
    let cfg = PipelineConfig {
        metrics: a.records.metrics.as_deref().map(parse_list),
        human: human_config(&a.records.human)?,
        metric_cfg: metric_config(&a.metric_args)?,
        alphas: ctx.global.alphas.as_ref().map(|_| ctx.alphas(None)).transpose()?,
        seed: ctx.global.seed,
        cluster_resamples: a.cluster_resamples,
        sigtest_resamples: a.sigtest_resamples,
        confidence: a.confidence,
        human_alpha: a.human_alpha,
        metric_alpha: a.metric_alpha,
        intersect_metrics: a.records.intersect_metrics,
        render: render_options(&a.table)?,
        command_line: ctx.command_line.clone(),
        timestamp: a.timestamp.clone(),
    };
    let bundle = cmd_pipeline(&collection, &cfg)?;
    warn_all(&bundle.notices);
    let text = if a.json {
        serde_json::to_string_pretty(&bundle).map_err(|e| Error::Input(e.to_string()))? + "\n"
    } else {
        bundle.render()
    };
    ctx.emit(&text)
}
