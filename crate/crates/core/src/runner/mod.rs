//! Experiment orchestration: resolves the input graph, fans replications out
//! to workers, aggregates, and writes CSV outputs plus a run manifest.
//!
//! Determinism contract: a given (config, base seed, dataset) produces
//! byte-identical CSV bodies regardless of worker count, because every
//! replication owns an RNG stream derived from `(base seed, index)` and
//! aggregation folds replications in index order.

pub mod aggregate;
pub mod config;
pub mod manifest;
pub mod output;

pub use aggregate::{aggregate_replications, AggregatedSeries};
pub use config::{
    parse_config, parse_config_file, unit_grid, ExperimentConfig, ExperimentKind, GeneratorSpec,
    InputSpec, TMaxSpec,
};
pub use manifest::{fingerprint, DatasetFingerprint, RunManifest, MANIFEST_FILE};
pub use output::OutputFile;

use std::fs;
use std::path::{Path, PathBuf};

use crate::diffusion::{
    f_local_profile, pool_profiles, remove_then_diffuse, replicate_diffusions, ModelParams,
    StrengthGraph, TimeBudget,
};
use crate::error::{Error, Result};
use crate::graph::{
    bfs_rings, connected_components, generate_community_graph, generate_scale_free,
    load_edge_list, write_edge_list, Graph, IdMap, LoadOptions, LoadReport,
};
use crate::percolation::{critical_fraction, percolation_sweep, removal_order, Direction};
use crate::seeding;
use crate::strength::{all_strengths, degree_strength_correlation, strength_cdf};
use output::CsvBuilder;

const STREAM_TIE_BREAK: u64 = 1;
const STREAM_DIFFUSION: u64 = 2;

/// What a finished experiment hands back to the caller.
#[derive(Debug)]
pub struct ExperimentOutput {
    pub manifest: RunManifest,
    pub summary: Vec<String>,
    pub out_dir: PathBuf,
}

struct ResolvedInput {
    graph: Graph,
    ids: IdMap,
    load_report: Option<LoadReport>,
    fingerprint: DatasetFingerprint,
    description: String,
}

fn resolve_input(cfg: &ExperimentConfig) -> Result<ResolvedInput> {
    match &cfg.input {
        InputSpec::EdgeList {
            path,
            comment_prefix,
            delimiter,
        } => {
            let options = LoadOptions {
                comment_prefix: comment_prefix.clone(),
                delimiter: *delimiter,
            };
            let (graph, ids, report) = load_edge_list(path, &options)?;
            let fingerprint = manifest::fingerprint(&graph, &ids);
            Ok(ResolvedInput {
                description: path.display().to_string(),
                graph,
                ids,
                load_report: Some(report),
                fingerprint,
            })
        }
        InputSpec::Generator(spec) => {
            let (graph, description) = match *spec {
                GeneratorSpec::ScaleFree { n, m } => (
                    generate_scale_free(n, m, cfg.seed)?,
                    format!("scale-free(n={n}, m={m}, seed={})", cfg.seed),
                ),
                GeneratorSpec::Community {
                    communities,
                    size,
                    p_in,
                    k_out,
                } => (
                    generate_community_graph(communities, size, p_in, k_out, cfg.seed)?,
                    format!(
                        "community(c={communities}, s={size}, p_in={p_in}, k_out={k_out}, seed={})",
                        cfg.seed
                    ),
                ),
            };
            let ids = IdMap::identity(graph.node_count());
            let fingerprint = manifest::fingerprint(&graph, &ids);
            Ok(ResolvedInput {
                graph,
                ids,
                load_report: None,
                fingerprint,
                description,
            })
        }
    }
}

/// Runs the configured experiment and writes its outputs and manifest.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.threads {
        None => run_inner(cfg),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            pool.install(|| run_inner(cfg))
        }
    }
}

fn run_inner(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let resolved = resolve_input(cfg)?;
    manifest::guard_resume(&cfg.out_dir, &resolved.fingerprint)?;

    let (files, summary) = dispatch(cfg, &resolved)?;

    fs::create_dir_all(&cfg.out_dir).map_err(|source| Error::Io {
        path: cfg.out_dir.clone(),
        source,
    })?;
    let mut outputs = Vec::with_capacity(files.len());
    for file in &files {
        let path = if Path::new(&file.name).is_absolute() {
            PathBuf::from(&file.name)
        } else {
            cfg.out_dir.join(&file.name)
        };
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        fs::write(&path, &file.bytes).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        outputs.push((file.name.clone(), manifest::checksum(&file.bytes)));
    }

    let run_manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: cfg.kind.name().to_string(),
        config: cfg.echo(),
        dataset: resolved.fingerprint.clone(),
        outputs,
    };
    let manifest_path = cfg.out_dir.join(MANIFEST_FILE);
    fs::write(&manifest_path, run_manifest.render()).map_err(|source| Error::Io {
        path: manifest_path,
        source,
    })?;

    Ok(ExperimentOutput {
        manifest: run_manifest,
        summary,
        out_dir: cfg.out_dir.clone(),
    })
}

fn common_meta(csv: &mut CsvBuilder, cfg: &ExperimentConfig, resolved: &ResolvedInput) {
    csv.meta("tool", format!("weakties {}", env!("CARGO_PKG_VERSION")))
        .meta("experiment", cfg.kind.name())
        .meta("input", &resolved.description)
        .meta("nodes", resolved.graph.node_count())
        .meta("edges", resolved.graph.edge_count())
        .meta("seed", cfg.seed);
}

fn dispatch(
    cfg: &ExperimentConfig,
    resolved: &ResolvedInput,
) -> Result<(Vec<OutputFile>, Vec<String>)> {
    match &cfg.kind {
        ExperimentKind::LoadStats => load_stats(cfg, resolved),
        ExperimentKind::Strength => strength_table(cfg, resolved),
        ExperimentKind::Cdf { grid_step } => cdf(cfg, resolved, *grid_step),
        ExperimentKind::Correlate => correlate(cfg, resolved),
        ExperimentKind::Percolate {
            direction,
            grid_step,
            collapse_threshold,
        } => percolate(cfg, resolved, *direction, *grid_step, *collapse_threshold),
        ExperimentKind::Diffuse {
            alphas,
            betas,
            t_max,
            epsilon,
            per_run,
            paired_seeds,
        } => diffuse(
            cfg,
            resolved,
            alphas,
            betas,
            *t_max,
            *epsilon,
            *per_run,
            *paired_seeds,
        ),
        ExperimentKind::RemoveDiffuse {
            direction,
            fr_grid,
            alpha,
            beta,
            t_max,
            epsilon,
        } => remove_diffuse(cfg, resolved, *direction, fr_grid, *alpha, *beta, *t_max, *epsilon),
        ExperimentKind::Gen { output } => gen_graph(cfg, resolved, output),
    }
}

fn load_stats(
    cfg: &ExperimentConfig,
    resolved: &ResolvedInput,
) -> Result<(Vec<OutputFile>, Vec<String>)> {
    let g = &resolved.graph;
    let labeling = connected_components(g);
    let report = resolved.load_report.unwrap_or_default();
    let min_degree = g.degrees().iter().copied().min().unwrap_or(0);
    let max_degree = g.degrees().iter().copied().max().unwrap_or(0);
    let mean_degree = 2.0 * g.edge_count() as f64 / g.node_count() as f64;
    let f_gcc = labeling.largest_size() as f64 / g.node_count() as f64;

    let mut csv = CsvBuilder::new();
    common_meta(&mut csv, cfg, resolved);
    csv.header("metric,value");
    csv.row(format_args!("nodes,{}", g.node_count()));
    csv.row(format_args!("edges,{}", g.edge_count()));
    csv.row(format_args!("self_loops_dropped,{}", report.self_loops_dropped));
    csv.row(format_args!("duplicates_merged,{}", report.duplicates_merged));
    csv.row(format_args!("comment_lines,{}", report.comment_lines));
    csv.row(format_args!("min_degree,{min_degree}"));
    csv.row(format_args!("max_degree,{max_degree}"));
    csv.row(format_args!("mean_degree,{mean_degree}"));
    csv.row(format_args!("components,{}", labeling.component_count()));
    csv.row(format_args!("largest_component,{}", labeling.largest_size()));
    csv.row(format_args!("f_gcc,{f_gcc}"));

    let summary = vec![format!(
        "{}: {} nodes, {} edges, {} components (largest {}), dropped {} self-loops / {} duplicates",
        resolved.description,
        g.node_count(),
        g.edge_count(),
        labeling.component_count(),
        labeling.largest_size(),
        report.self_loops_dropped,
        report.duplicates_merged,
    )];
    Ok((vec![csv.finish("load_stats.csv")], summary))
}

fn strength_table(
    cfg: &ExperimentConfig,
    resolved: &ResolvedInput,
) -> Result<(Vec<OutputFile>, Vec<String>)> {
    let g = &resolved.graph;
    let table = all_strengths(g);
    let mut csv = CsvBuilder::new();
    common_meta(&mut csv, cfg, resolved);
    csv.header("raw_u,raw_v,common_neighbors,strength,degenerate");
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        csv.row(format_args!(
            "{},{},{},{},{}",
            resolved.ids.raw(u),
            resolved.ids.raw(v),
            table.common_neighbors(e),
            table.strength(e),
            u8::from(table.is_degenerate(e)),
        ));
    }
    let degenerate = (0..table.len()).filter(|&e| table.is_degenerate(e)).count();
    let summary = vec![format!(
        "computed strengths for {} edges ({} degenerate dyads)",
        table.len(),
        degenerate
    )];
    Ok((vec![csv.finish("strengths.csv")], summary))
}

fn cdf(
    cfg: &ExperimentConfig,
    resolved: &ResolvedInput,
    grid_step: f64,
) -> Result<(Vec<OutputFile>, Vec<String>)> {
    let table = all_strengths(&resolved.graph);
    let grid = unit_grid(grid_step)?;
    let points = strength_cdf(&table, &grid)?;
    let mut csv = CsvBuilder::new();
    common_meta(&mut csv, cfg, resolved);
    csv.meta("grid-step", grid_step);
    csv.header("threshold,cdf");
    for (threshold, value) in &points {
        csv.row(format_args!("{threshold},{value}"));
    }
    let at_zero = points.first().map(|p| p.1).unwrap_or(0.0);
    let summary = vec![format!("strength CDF over {} thresholds; {:.1}% of ties have zero strength", points.len(), 100.0 * at_zero)];
    Ok((vec![csv.finish("cdf.csv")], summary))
}

fn correlate(
    cfg: &ExperimentConfig,
    resolved: &ResolvedInput,
) -> Result<(Vec<OutputFile>, Vec<String>)> {
    let g = &resolved.graph;
    let table = all_strengths(g);
    let tau = degree_strength_correlation(g, &table)?;
    let observations = 2 * g.edge_count();
    let mut csv = CsvBuilder::new();
    common_meta(&mut csv, cfg, resolved);
    csv.header("statistic,value");
    csv.row(format_args!("observations,{observations}"));
    csv.row(format_args!("defined,{}", u8::from(tau.is_some())));
    match tau {
        Some(value) => csv.row(format_args!("tau_b,{value}")),
        None => csv.row("tau_b,nan"),
    };
    let summary = vec![match tau {
        Some(value) => format!("degree-strength rank correlation tau_b = {value:.4} over {observations} observations"),
        None => "degree-strength rank correlation undefined (all degrees or strengths tied)".into(),
    }];
    Ok((vec![csv.finish("correlation.csv")], summary))
}

fn percolate(
    cfg: &ExperimentConfig,
    resolved: &ResolvedInput,
    direction: Direction,
    grid_step: f64,
    collapse_threshold: f64,
) -> Result<(Vec<OutputFile>, Vec<String>)> {
    let g = &resolved.graph;
    let table = all_strengths(g);
    let tie_break_seed = seeding::derive(cfg.seed, STREAM_TIE_BREAK);
    let order = removal_order(&table, direction, tie_break_seed);
    let grid = unit_grid(grid_step)?;
    let sweep = percolation_sweep(g, &order, &grid)?;
    let crit = critical_fraction(&sweep, collapse_threshold);

    let mut csv = CsvBuilder::new();
    common_meta(&mut csv, cfg, resolved);
    csv.meta("order", direction.as_str())
        .meta("tie-break-seed", tie_break_seed)
        .meta("grid-step", grid_step)
        .meta("collapse-threshold", collapse_threshold)
        .meta("f_c_sbar", crit.f_c_sbar)
        .meta(
            "f_c_gcc",
            crit.f_c_gcc
                .map_or_else(|| "none".to_string(), |v| v.to_string()),
        );
    csv.header("f_r,s_bar,f_gcc");
    for s in &sweep.samples {
        csv.row(format_args!("{},{},{}", s.f_r, s.s_bar, s.f_gcc));
    }
    let summary = vec![format!(
        "{}-first removal: peak cluster statistic at f_r = {}, giant cluster at or below {} from {}",
        direction.as_str(),
        crit.f_c_sbar,
        collapse_threshold,
        crit.f_c_gcc
            .map_or_else(|| "never".to_string(), |v| format!("f_r = {v}")),
    )];
    Ok((
        vec![csv.finish(format!("percolation_{}.csv", direction.as_str()))],
        summary,
    ))
}

fn resolve_t_max(t_max: TMaxSpec, g: &Graph) -> TimeBudget {
    match t_max {
        TMaxSpec::Auto => TimeBudget::Events(g.node_count() as u64),
        TMaxSpec::Events(n) => TimeBudget::Events(n),
    }
}

#[allow(clippy::too_many_arguments)]
fn diffuse(
    cfg: &ExperimentConfig,
    resolved: &ResolvedInput,
    alphas: &[f64],
    betas: &[f64],
    t_max: TMaxSpec,
    epsilon: f64,
    per_run: bool,
    paired_seeds: bool,
) -> Result<(Vec<OutputFile>, Vec<String>)> {
    let g = &resolved.graph;
    let table = all_strengths(g);
    let net = StrengthGraph::intact(g, &table);
    let budget = resolve_t_max(t_max, g);
    let diffusion_base = seeding::derive(cfg.seed, STREAM_DIFFUSION);

    let mut files = Vec::new();
    let mut summary = Vec::new();
    for (ai, &alpha) in alphas.iter().enumerate() {
        for (bi, &beta) in betas.iter().enumerate() {
            let params = ModelParams::new(alpha, beta)?
                .with_epsilon(epsilon)?
                .with_t_max(budget);
            // paired seeds share the replication streams across alpha values,
            // so each replication index starts from the same seed node
            let cell = if paired_seeds {
                seeding::derive(diffusion_base, bi as u64)
            } else {
                seeding::derive(diffusion_base, (ai * betas.len() + bi) as u64)
            };
            let runs = replicate_diffusions(&net, &params, cfg.replications, cell)?;

            let coverage: Vec<Vec<f64>> = runs.iter().map(|r| r.coverage.clone()).collect();
            let f_pub: Vec<Vec<f64>> = runs.iter().map(|r| r.f_pub.clone()).collect();
            let cov_agg = aggregate_replications(&coverage)?;
            let pub_agg = aggregate_replications(&f_pub)?;

            let mut csv = CsvBuilder::new();
            common_meta(&mut csv, cfg, resolved);
            csv.meta("alpha", alpha)
                .meta("beta", beta)
                .meta("tmax", budget_events(budget))
                .meta("epsilon", epsilon)
                .meta("runs", cfg.replications)
                .meta("paired-seeds", paired_seeds);
            csv.header("T,C,f_pub,stderr_C,stderr_f_pub,n");
            for t in 0..cov_agg.mean.len() {
                csv.row(format_args!(
                    "{},{},{},{},{},{}",
                    t, cov_agg.mean[t], pub_agg.mean[t], cov_agg.stderr[t], pub_agg.stderr[t], cov_agg.n
                ));
            }
            files.push(csv.finish(format!("coverage_a{alpha}_b{beta}.csv")));

            let mut profiles = Vec::with_capacity(runs.len());
            for run in &runs {
                let rings = bfs_rings(g, run.seed_node)?;
                profiles.push(f_local_profile(run, &rings));
            }
            let pooled = pool_profiles(profiles);
            let mut csv = CsvBuilder::new();
            common_meta(&mut csv, cfg, resolved);
            csv.meta("alpha", alpha)
                .meta("beta", beta)
                .meta("runs", cfg.replications);
            csv.header("hop,ring_size,published,f_local");
            for bin in &pooled {
                csv.row(format_args!(
                    "{},{},{},{}",
                    bin.hop,
                    bin.ring_size,
                    bin.published,
                    bin.f_local()
                ));
            }
            files.push(csv.finish(format!("flocal_a{alpha}_b{beta}.csv")));

            if per_run {
                for (i, run) in runs.iter().enumerate() {
                    let mut csv = CsvBuilder::new();
                    csv.meta("alpha", alpha)
                        .meta("beta", beta)
                        .meta("replication", i)
                        .meta("seed-node", run.seed_node)
                        .meta("rng-seed", run.rng_seed);
                    csv.header("T,round,C,f_pub");
                    for t in 0..run.coverage.len() {
                        let round = if t == 0 { 0 } else { run.rounds[t - 1] };
                        csv.row(format_args!(
                            "{},{},{},{}",
                            t, round, run.coverage[t], run.f_pub[t]
                        ));
                    }
                    files.push(csv.finish(format!("runs/coverage_a{alpha}_b{beta}_r{i}.csv")));
                }
            }

            let final_mean = *cov_agg.mean.last().unwrap();
            let final_se = *cov_agg.stderr.last().unwrap();
            summary.push(format!(
                "alpha={alpha} beta={beta}: mean final C = {final_mean:.4} (stderr {final_se:.4}, n={})",
                cfg.replications
            ));
        }
    }
    Ok((files, summary))
}

fn budget_events(budget: TimeBudget) -> u64 {
    match budget {
        TimeBudget::Events(n) => n,
        TimeBudget::Unbounded => u64::MAX,
    }
}

#[allow(clippy::too_many_arguments)]
fn remove_diffuse(
    cfg: &ExperimentConfig,
    resolved: &ResolvedInput,
    direction: Direction,
    fr_grid: &[f64],
    alpha: f64,
    beta: f64,
    t_max: TMaxSpec,
    epsilon: f64,
) -> Result<(Vec<OutputFile>, Vec<String>)> {
    let g = &resolved.graph;
    let table = all_strengths(g);
    let tie_break_seed = seeding::derive(cfg.seed, STREAM_TIE_BREAK);
    let order = removal_order(&table, direction, tie_break_seed);
    let params = ModelParams::new(alpha, beta)?
        .with_epsilon(epsilon)?
        .with_t_max(resolve_t_max(t_max, g));
    let diffusion_base = seeding::derive(cfg.seed, STREAM_DIFFUSION);

    let mut csv = CsvBuilder::new();
    common_meta(&mut csv, cfg, resolved);
    csv.meta("order", direction.as_str())
        .meta("tie-break-seed", tie_break_seed)
        .meta("alpha", alpha)
        .meta("beta", beta)
        .meta("tmax", budget_events(params.t_max))
        .meta("runs", cfg.replications);
    csv.header("f_r,order,mean_C,stderr_C,runs");
    let mut summary = Vec::new();
    for (i, &f_r) in fr_grid.iter().enumerate() {
        let stat = remove_then_diffuse(
            g,
            &table,
            &order,
            f_r,
            &params,
            cfg.replications,
            seeding::derive(diffusion_base, i as u64),
        )?;
        csv.row(format_args!(
            "{},{},{},{},{}",
            f_r,
            direction.as_str(),
            stat.mean,
            stat.stderr,
            stat.n
        ));
        summary.push(format!(
            "f_r={f_r} ({}-first): mean C = {:.4} (stderr {:.4})",
            direction.as_str(),
            stat.mean,
            stat.stderr
        ));
    }
    Ok((
        vec![csv.finish(format!("remove_diffuse_{}.csv", direction.as_str()))],
        summary,
    ))
}

fn gen_graph(
    cfg: &ExperimentConfig,
    resolved: &ResolvedInput,
    output: &Path,
) -> Result<(Vec<OutputFile>, Vec<String>)> {
    let mut bytes = Vec::new();
    write_edge_list(&resolved.graph, &resolved.ids, &mut bytes).map_err(|source| Error::Io {
        path: output.to_path_buf(),
        source,
    })?;
    let summary = vec![format!(
        "generated {}: {} nodes, {} edges (seed {})",
        resolved.description,
        resolved.graph.node_count(),
        resolved.graph.edge_count(),
        cfg.seed
    )];
    Ok((
        vec![OutputFile {
            name: output.display().to_string(),
            bytes,
        }],
        summary,
    ))
}
