use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use commeval::bench::{
    generate_network, run_scaling_study, Family, GeneratorParams, ScalingResult, StudyConfig, StudyInputs,
};
use commeval::engine::{
    run_info_metrics, run_intrinsic_metrics, run_matching_metrics, run_pair_metrics, Backend, BackendConfig,
};
use commeval::{load_communities, load_edge_list, write_communities, write_edge_list, Network, Partition};

#[derive(Parser)]
#[command(
    name = "commeval",
    version,
    about = "Community-quality metrics for network partitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare a detected partition with the ground truth (VI, NMI, F, NVD, RI, ARI, JI).
    Compare(CompareArgs),
    /// Modularity, modularity density and per-community measures of one partition.
    Quality(QualityArgs),
    /// Scaling study on generated networks, written as CSV.
    Bench(BenchArgs),
    /// Write a planted-partition network and its communities.
    Generate(GenerateArgs),
}

#[derive(Args, Clone)]
struct Exec {
    #[arg(long, default_value = "seq", value_parser = parse_backend)]
    backend: Backend,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl Exec {
    fn config(&self) -> BackendConfig {
        BackendConfig::new(self.backend, self.workers)
    }
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    ground_truth: PathBuf,
    #[arg(long)]
    detected: PathBuf,
    /// Number of nodes. Defaults to the number of distinct nodes in the two files.
    #[arg(long)]
    universe: Option<usize>,
    #[command(flatten)]
    exec: Exec,
    #[arg(long)]
    csv: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QualityArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long, visible_alias = "detected")]
    communities: PathBuf,
    #[command(flatten)]
    exec: Exec,
    #[arg(long)]
    csv: bool,
    /// Write the per-community table here as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// info, matching, pair, compare or intrinsic.
    #[arg(long, default_value = "compare", value_parser = parse_family)]
    task: Family,
    #[arg(long, value_delimiter = ',', default_values_t = [100_000usize])]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4])]
    workers: Vec<usize>,
    #[arg(long, default_value = "shm", value_parser = parse_backend)]
    backend: Backend,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    /// Share of nodes moved to another community to make the detected partition.
    #[arg(long, default_value_t = 0.2)]
    perturb: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// CSV path. With several sizes, one file per size named `<stem>-n<size>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 1000)]
    nodes: usize,
    #[arg(long, default_value_t = 15.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 50)]
    max_degree: usize,
    #[arg(long, default_value_t = 0.3)]
    mixing: f64,
    #[arg(long, default_value_t = 50)]
    min_community: usize,
    #[arg(long, default_value_t = 150)]
    max_community: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Prefix for `<out>.edges` and `<out>.cmty`.
    #[arg(long)]
    out: PathBuf,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: commeval::Error| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: commeval::Error| e.to_string())
}

/// Bad files, bad flags and inconsistent inputs exit with 2; failures while
/// computing exit with 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    use commeval::Error::*;
    for cause in err.chain() {
        if cause.downcast_ref::<io::Error>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<commeval::Error>() {
            return match e {
                Io(_)
                | Parse { .. }
                | Empty(_)
                | Overlap { .. }
                | OutOfRange { .. }
                | UnknownNode(_)
                | UniverseMismatch(..)
                | EmptyUniverse
                | Workers(_)
                | Infeasible(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn read_partition(path: &Path) -> Result<Partition> {
    load_communities(open(path)?, usize::MAX).with_context(|| format!("reading {}", path.display()))
}

fn compare(args: &CompareArgs) -> Result<bool> {
    let ground = read_partition(&args.ground_truth)?;
    let detected = read_partition(&args.detected)?;
    let distinct: HashSet<u64> = ground
        .communities()
        .chain(detected.communities())
        .flatten()
        .copied()
        .collect();
    let universe = args.universe.unwrap_or(distinct.len());
    if distinct.len() > universe {
        bail!(commeval::Error::OutOfRange {
            node: *distinct.iter().max().unwrap(),
            universe
        });
    }
    let ground = ground.with_universe(universe)?;
    let detected = detected.with_universe(universe)?;
    let cfg = args.exec.config();

    let mut rows: Vec<(&str, Result<f64, String>)> = Vec::new();
    let mut seconds = 0.0;
    let mut failed = false;
    let mut family = |names: &[&'static str], r: commeval::Result<(Vec<f64>, f64)>| match r {
        Ok((values, t)) => {
            seconds += t;
            rows.extend(names.iter().zip(values).map(|(&n, v)| (n, Ok(v))));
        }
        Err(e) => {
            failed = true;
            rows.extend(names.iter().map(|&n| (n, Err(e.to_string()))));
        }
    };
    family(
        &["VI", "NMI"],
        run_info_metrics(&ground, &detected, &cfg).map(|r| (vec![r.value.vi, r.value.nmi], r.timing.total_seconds)),
    );
    family(
        &["F-measure", "NVD"],
        run_matching_metrics(&ground, &detected, &cfg)
            .map(|r| (vec![r.value.f_measure, r.value.nvd], r.timing.total_seconds)),
    );
    family(
        &["RI", "ARI", "JI"],
        run_pair_metrics(&ground, &detected, &cfg).map(|r| {
            let m = r.value.metrics;
            (vec![m.ri, m.ari, m.ji], r.timing.total_seconds)
        }),
    );

    // Nodes missing from a partition still count in |V|; say so.
    let coverage: Vec<String> = [("ground truth", &ground), ("detected", &detected)]
        .into_iter()
        .filter(|(_, p)| p.covered() < universe)
        .map(|(name, p)| format!("{name} partition covers {} of {universe} nodes", p.covered()))
        .collect();
    let mut out = output(args.out.as_deref())?;
    if args.csv {
        for note in &coverage {
            eprintln!("note: {note}");
        }
        writeln!(out, "metric,value")?;
        for (name, v) in &rows {
            match v {
                Ok(x) => writeln!(out, "{name},{x}")?,
                Err(e) => writeln!(out, "{name},error: {}", e.replace(',', ";"))?,
            }
        }
    } else {
        writeln!(
            out,
            "# backend {}, workers {}, universe {universe}, {seconds:.6}s",
            cfg.backend.name(),
            cfg.effective_workers()
        )?;
        for note in &coverage {
            writeln!(out, "# {note}")?;
        }
        for (name, v) in &rows {
            match v {
                Ok(x) => writeln!(out, "{name:<10} {x:.6}")?,
                Err(e) => writeln!(out, "{name:<10} error: {e}")?,
            }
        }
    }
    out.flush()?;
    Ok(!failed)
}

fn quality(args: &QualityArgs) -> Result<bool> {
    let (network, _) =
        load_edge_list(open(&args.network)?).with_context(|| format!("reading {}", args.network.display()))?;
    let partition = read_partition(&args.communities)?.with_universe(network.node_count())?;
    let cfg = args.exec.config();
    let report = run_intrinsic_metrics(&network, &partition, &cfg)?;
    let r = &report.value;

    let table = |out: &mut dyn Write| -> io::Result<()> {
        writeln!(
            out,
            "community,size,intra_edges,intra_density,contraction,inter_edges,expansion,conductance"
        )?;
        for row in &r.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.id,
                row.size,
                row.intra_edges,
                row.intra_density,
                row.contraction,
                row.inter_edges,
                row.expansion,
                row.conductance
            )?;
        }
        Ok(())
    };
    if let Some(path) = &args.out {
        let mut f = output(Some(path))?;
        table(&mut f)?;
        f.flush()?;
    }
    let mut out = io::stdout().lock();
    if args.csv {
        writeln!(out, "metric,value")?;
        writeln!(out, "Q,{}", r.modularity)?;
        writeln!(out, "Qds,{}", r.modularity_density)?;
        if args.out.is_none() {
            writeln!(out)?;
            table(&mut out)?;
        }
    } else {
        writeln!(
            out,
            "# backend {}, workers {}, {} nodes, {} edges, {} communities, {:.6}s",
            cfg.backend.name(),
            cfg.effective_workers(),
            network.node_count(),
            r.total_edges,
            r.community_count,
            report.timing.total_seconds
        )?;
        writeln!(out, "{:<10} {:.6}", "Q", r.modularity)?;
        writeln!(out, "{:<10} {:.6}", "Qds", r.modularity_density)?;
        let m = &r.mean;
        writeln!(
            out,
            "mean per community: intra {:.3}, density {:.6}, contraction {:.6}, inter {:.3}, expansion {:.6}, conductance {:.6}",
            m.intra_edges, m.intra_density, m.contraction, m.inter_edges, m.expansion, m.conductance
        )?;
        if r.edgeless_communities > 0 {
            writeln!(
                out,
                "{} communities have no edges; their conductance is reported as 0",
                r.edgeless_communities
            )?;
        }
        if r.unassigned_nodes > 0 {
            writeln!(out, "{} network nodes belong to no community", r.unassigned_nodes)?;
        }
        if args.out.is_none() {
            writeln!(
                out,
                "{:>9} {:>6} {:>7} {:>9} {:>11} {:>7} {:>9} {:>11}",
                "community", "size", "intra", "density", "contraction", "inter", "expansion", "conductance"
            )?;
            for row in &r.rows {
                writeln!(
                    out,
                    "{:>9} {:>6} {:>7} {:>9.6} {:>11.6} {:>7} {:>9.6} {:>11.6}",
                    row.id,
                    row.size,
                    row.intra_edges,
                    row.intra_density,
                    row.contraction,
                    row.inter_edges,
                    row.expansion,
                    row.conductance
                )?;
            }
        }
    }
    Ok(true)
}

fn csv_path(out: &Path, size: usize, several: bool) -> PathBuf {
    if !several {
        return out.to_path_buf();
    }
    let stem = out
        .file_stem()
        .map_or("bench".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}-n{size}.csv"))
}

fn bench(args: &BenchArgs) -> Result<bool> {
    let several = args.sizes.len() > 1;
    for &size in &args.sizes {
        let params = GeneratorParams::with_nodes(size, args.seed);
        let inputs = StudyInputs::generated(&params, args.perturb)?;
        let study = StudyConfig {
            family: args.task,
            backend: args.backend,
            workers: args.workers.clone(),
            repetitions: args.repetitions,
        };
        let result: ScalingResult = run_scaling_study(&inputs, &study)?;
        match &args.out {
            Some(path) => {
                let path = csv_path(path, size, several);
                result.write_csv(output(Some(&path))?)?;
                eprintln!("n = {size}: wrote {}", path.display());
            }
            None => {
                if several {
                    println!("# n = {size}");
                }
                result.write_csv(io::stdout().lock())?;
            }
        }
    }
    Ok(true)
}

fn generate(args: &GenerateArgs) -> Result<bool> {
    let params = GeneratorParams {
        nodes: args.nodes,
        avg_degree: args.avg_degree,
        max_degree: args.max_degree,
        mixing: args.mixing,
        community_sizes: (args.min_community, args.max_community),
        seed: args.seed,
    };
    let (network, partition): (Network, Partition) = generate_network(&params)?;
    let prefix = args.out.to_string_lossy();
    let (edges, cmty) = (
        PathBuf::from(format!("{prefix}.edges")),
        PathBuf::from(format!("{prefix}.cmty")),
    );
    write_edge_list(&network, output(Some(&edges))?)?;
    write_communities(&partition, output(Some(&cmty))?)?;
    let n = network.node_count();
    let max_degree = (0..n as u32).map(|u| network.degree(u)).max().unwrap_or(0);
    println!(
        "{n} nodes, {} edges, mean degree {:.3}, max degree {max_degree}, {} communities",
        network.edge_count(),
        2.0 * network.edge_count() as f64 / n as f64,
        partition.len()
    );
    println!("wrote {} and {}", edges.display(), cmty.display());
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compare(a) => compare(a),
        Command::Quality(a) => quality(a),
        Command::Bench(a) => bench(a),
        Command::Generate(a) => generate(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
