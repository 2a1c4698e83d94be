//! One function per subcommand. Each returns the report printed to stdout;
//! files go to `--out` when it is set.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cutsdp::certify::{build_certificate, proximity_check};
use cutsdp::datagen::{
    gen_balls, gen_circles_deterministic, gen_circles_random, gen_lines_deterministic, gen_lines_random, gen_sbm,
    Dataset,
};
use cutsdp::experiment::{report_thresholds, run_grid, ExperimentGrid, GridMode, SigmaRule, ThresholdQuery};
use cutsdp::io;
use cutsdp::kernel_graph::{build_graph, KernelKind, KernelSpec, WeightedGraph};
use cutsdp::partition::{cut_value, ground_truth_x, split, Partition, Variant};
use cutsdp::sdp::{exactness_gap, make_problem, round_solution, solve, SolverOptions};
use cutsdp::spectral::{embed, spectral_cluster_with};
use serde_json::{json, Value};

use crate::args::{
    parse_axis, CertifyArgs, Cli, Format, GenArgs, GenModel, GraphArgs, KernelArg, ModeArg, PhaseArgs, SdpArgs,
    SigmaRuleArg, SpectralArgs, ThresholdArgs,
};
use crate::CliError;

/// What a command produced: the stdout text and whether the run should
/// exit with the non-convergence code.
pub struct Report {
    pub text: String,
    pub nonconverged: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Self { text, nonconverged: false }
    }
}

struct Sink<'a> {
    out: Option<&'a Path>,
}

impl Sink<'_> {
    fn path(&self, name: &str) -> Option<PathBuf> {
        self.out.map(|d| d.join(name))
    }

    fn csv(&self, name: &str, f: impl FnOnce(&mut std::fs::File) -> cutsdp::Result<()>) -> Result<(), CliError> {
        if let Some(p) = self.path(name) {
            io::write_to_file(&p, f)?;
        }
        Ok(())
    }

    fn json(&self, name: &str, v: &Value) -> Result<(), CliError> {
        if let Some(p) = self.path(name) {
            std::fs::write(&p, pretty(v)).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        }
        Ok(())
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let sink = Sink { out: cli.out.as_deref() };
    match &cli.command {
        crate::args::Command::Gen(a) => gen(cli, a, &sink),
        crate::args::Command::Spectral(a) => spectral(cli, a, &sink),
        crate::args::Command::Sdp(a) => sdp(cli, a, &sink),
        crate::args::Command::Certify(a) => certify(cli, a, &sink),
        crate::args::Command::Phase(a) => phase(cli, a, &sink),
        crate::args::Command::Thresholds(a) => thresholds(cli, a),
    }
}

fn need(v: Option<f64>, flag: &str, model: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| usage(format!("--{flag} is required for model {model}")))
}

fn labels_csv(p: &Partition) -> String {
    p.labels().iter().map(|l| format!("{l}\n")).collect()
}

fn gen(cli: &Cli, a: &GenArgs, sink: &Sink) -> Result<Report, CliError> {
    let seed = cli.seed;
    let dataset = |d: cutsdp::Result<Dataset>| -> Result<Report, CliError> {
        let d = d?;
        sink.csv("points.csv", |f| io::write_points(f, &d.points))?;
        sink.csv("labels.csv", |f| io::write_labels(f, &d.truth))?;
        let meta = json!({ "params": d.params, "seed": d.seed, "points": d.points.len(), "dim": d.points.dim() });
        sink.json("meta.json", &meta)?;
        Ok(Report::ok(match cli.format {
            Format::Json => pretty(&meta),
            Format::Csv => {
                let mut s = String::new();
                for i in 0..d.points.len() {
                    for x in d.points.point(i) {
                        write!(s, "{x:?},").unwrap();
                    }
                    writeln!(s, "{}", d.truth.label(i)).unwrap();
                }
                s
            }
        }))
    };
    match a.model {
        GenModel::Circles => dataset(gen_circles_deterministic(a.n, a.r1, a.kappa)),
        GenModel::CirclesRandom => dataset(gen_circles_random(a.n, a.r1, need(a.delta, "delta", "circles-random")?, seed)),
        GenModel::Lines => dataset(gen_lines_deterministic(a.n, need(a.delta, "delta", "lines")?)),
        GenModel::LinesRandom => dataset(gen_lines_random(a.n, need(a.delta, "delta", "lines-random")?, seed)),
        GenModel::Balls => dataset(gen_balls(a.n, need(a.delta, "delta", "balls")?, seed)),
        GenModel::Sbm => {
            let s = gen_sbm(a.n, need(a.alpha, "alpha", "sbm")?, need(a.beta, "beta", "sbm")?, seed)?;
            sink.csv("weights.csv", |f| io::write_matrix(f, &s.w))?;
            sink.csv("labels.csv", |f| io::write_labels(f, &s.truth))?;
            let meta = json!({ "params": s.params, "seed": s.seed, "vertices": s.w.nrows(), "zero_diagonal": s.zero_diagonal });
            sink.json("meta.json", &meta)?;
            Ok(Report::ok(match cli.format {
                Format::Json => pretty(&meta),
                Format::Csv => {
                    let mut buf = Vec::new();
                    io::write_matrix(&mut buf, &s.w)?;
                    String::from_utf8(buf).expect("ascii")
                }
            }))
        }
    }
}

fn load_graph(g: &GraphArgs) -> Result<WeightedGraph, CliError> {
    if let Some(path) = &g.points {
        let sigma = g.sigma.ok_or_else(|| usage("--sigma is required with --points"))?;
        let kind = match g.kernel {
            KernelArg::Heat => KernelKind::Heat,
            KernelArg::Threshold => KernelKind::Threshold,
        };
        let pts = io::read_points_file(path, g.header)?;
        Ok(build_graph(&pts, &KernelSpec::new(kind, sigma)?)?)
    } else {
        let path = g.weights.as_ref().ok_or_else(|| usage("one of --points or --weights is required"))?;
        Ok(WeightedGraph::from_weights(io::read_matrix_file(path, g.header)?)?)
    }
}

fn load_labels(path: &Path, n: usize, header: bool) -> Result<Partition, CliError> {
    let p = io::read_labels_file(path, header)?;
    if p.n() != n {
        return Err(usage(format!("{} has {} labels but the graph has {n} vertices", path.display(), p.n())));
    }
    Ok(p)
}

fn spectral(cli: &Cli, a: &SpectralArgs, sink: &Sink) -> Result<Report, CliError> {
    let g = load_graph(&a.graph)?;
    let variant = a.variant.into();
    let km = spectral_cluster_with(&g, a.k, variant, cli.seed, a.restarts)?;
    let emb = embed(&g, a.k, variant)?;
    let mut report = json!({
        "variant": variant,
        "k": a.k,
        "objective": km.objective,
        "iterations": km.iterations,
        "restart": km.restart,
        "eigenvalues": &emb.eigenvalues[..(a.k + 1).min(emb.eigenvalues.len())],
        "degenerate_gap": emb.degenerate_gap,
        "labels": km.partition.labels(),
    });
    if let Some(t) = &a.truth {
        let truth = load_labels(t, g.n(), a.graph.header)?;
        report["matches_truth"] = json!(km.partition.same_clusters(&truth));
    }
    sink.csv("labels.csv", |f| io::write_labels(f, &km.partition))?;
    sink.json("spectral.json", &report)?;
    Ok(Report::ok(match cli.format {
        Format::Json => pretty(&report),
        Format::Csv => labels_csv(&km.partition),
    }))
}

fn sdp(cli: &Cli, a: &SdpArgs, sink: &Sink) -> Result<Report, CliError> {
    let g = load_graph(&a.graph)?;
    let prob = make_problem(&g, a.k, a.variant)?;
    let opts = SolverOptions { tol_primal: a.tol, tol_dual: a.tol, max_iters: a.max_iters, seed: cli.seed, ..Default::default() };
    let sol = solve(&prob, &opts)?;
    let r = round_solution(&sol, a.k)?;
    let mut report = json!({
        "variant": a.variant,
        "k": a.k,
        "converged": sol.converged,
        "iterations": sol.iterations,
        "objective": sol.objective,
        "primal_residual": sol.primal_residual,
        "dual_residual": sol.dual_residual,
        "rho": sol.rho,
        "feasibility": sol.gaps,
        "rounding_gap": r.gap,
        "exact": r.exact,
        "labels": r.partition.labels(),
    });
    if let Some(t) = &a.truth {
        let truth = load_labels(t, g.n(), a.graph.header)?;
        report["exactness_gap"] = json!(exactness_gap(&sol, &ground_truth_x(&g, &truth, a.variant)?));
        report["matches_truth"] = json!(r.partition.same_clusters(&truth));
    }
    sink.csv("labels.csv", |f| io::write_labels(f, &r.partition))?;
    if a.write_z {
        if sink.out.is_none() {
            return Err(usage("--write-z needs --out"));
        }
        sink.csv("z.csv", |f| io::write_matrix(f, &sol.z))?;
    }
    sink.json("sdp.json", &report)?;
    let text = match cli.format {
        Format::Json => pretty(&report),
        Format::Csv => labels_csv(&r.partition),
    };
    Ok(Report { text, nonconverged: !sol.converged })
}

fn certify(cli: &Cli, a: &CertifyArgs, sink: &Sink) -> Result<Report, CliError> {
    let g = load_graph(&a.graph)?;
    let p = load_labels(&a.labels, g.n(), a.graph.header)?;
    let prox = proximity_check(&g, &p, a.variant)?;
    let s = split(&g, &p)?;
    let mut report = json!({
        "proximity": prox,
        "z_interval": prox.z_interval(),
        "ratiocut": cut_value(&g, &p, Variant::RatioCut)?,
        "ncut": cut_value(&g, &p, Variant::NCut).ok(),
        "d_delta_norm": s.d_delta_norm,
        "p_delta_norm": s.p_delta_norm,
    });
    if a.full_certificate {
        let cert = build_certificate(&g, &p, a.variant, a.z)?;
        report["certificate"] = json!({
            "z": cert.z,
            "z_scanned": cert.z_scanned,
            "checks": cert.checks,
            "verified": cert.checks.all_pass(),
        });
        sink.csv("b.csv", |f| io::write_matrix(f, &cert.b))?;
        sink.csv("q.csv", |f| io::write_matrix(f, &cert.q))?;
    }
    sink.json("certify.json", &report)?;
    Ok(Report::ok(match cli.format {
        Format::Json => pretty(&report),
        Format::Csv => {
            let mut t = String::from("key,value\n");
            writeln!(t, "variant,{}", a.variant).unwrap();
            writeln!(t, "lhs,{:?}", prox.lhs).unwrap();
            writeln!(t, "rhs,{:?}", prox.rhs).unwrap();
            writeln!(t, "holds,{}", prox.holds).unwrap();
            if let Some(v) = report["certificate"]["verified"].as_bool() {
                writeln!(t, "certificate_verified,{v}").unwrap();
            }
            t
        }
    }))
}

fn phase(cli: &Cli, a: &PhaseArgs, sink: &Sink) -> Result<Report, CliError> {
    let model = a.model.parse()?;
    let mut grid = ExperimentGrid::new(model, a.n, parse_axis(&a.deltas).map_err(usage)?, parse_axis(&a.ps).map_err(usage)?);
    grid.trials = a.trials;
    grid.seed = cli.seed;
    grid.mode = match a.mode {
        ModeArg::ConditionCheck => GridMode::ConditionCheck,
        ModeArg::FullSdp => GridMode::FullSdp,
    };
    if let Some(r) = a.sigma_rule {
        grid.sigma_rule = match r {
            SigmaRuleArg::OverN => SigmaRule::OverN,
            SigmaRuleArg::OverTwoN => SigmaRule::OverTwoN,
            SigmaRuleArg::OverFiveSqrtN => SigmaRule::OverFiveSqrtN,
        };
    }
    grid.solver = SolverOptions { tol_primal: a.tol, tol_dual: a.tol, max_iters: a.max_iters, ..Default::default() };
    let result = run_grid(&grid)?;
    if let Some(dir) = sink.out {
        result.write_heatmaps(dir, &a.model)?;
    }
    let value = serde_json::to_value(&result).expect("serializable");
    sink.json("grid.json", &value)?;
    let nonconverged = result.cells.iter().any(|c| c.sdp_nonconverged > 0);
    let text = match cli.format {
        Format::Json => pretty(&value),
        Format::Csv => {
            let mut t = String::from("delta,p,sigma,trials,ratiocut,ncut,ratiocut_sdp,ncut_sdp,failed\n");
            let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
            for c in &result.cells {
                writeln!(
                    t,
                    "{},{},{},{},{},{},{},{},{}",
                    c.delta,
                    c.p,
                    c.sigma,
                    c.trials,
                    c.ratiocut_condition,
                    c.ncut_condition,
                    opt(c.ratiocut_sdp),
                    opt(c.ncut_sdp),
                    c.failed_trials
                )
                .unwrap();
            }
            t
        }
    };
    Ok(Report { text, nonconverged })
}

fn thresholds(cli: &Cli, a: &ThresholdArgs) -> Result<Report, CliError> {
    let n = || a.n.ok_or_else(|| usage(format!("--n is required for model {}", a.model)));
    let query = match a.model.as_str() {
        "circles" => ThresholdQuery::Circles {
            n: n()?,
            kappa: need(a.kappa, "kappa", "circles")?,
            sigma: need(a.sigma, "sigma", "circles")?,
        },
        "lines" => ThresholdQuery::Lines {
            n: n()?,
            delta: need(a.delta, "delta", "lines")?,
            sigma: need(a.sigma, "sigma", "lines")?,
        },
        "sbm" => ThresholdQuery::Sbm { alpha: need(a.alpha, "alpha", "sbm")?, beta: need(a.beta, "beta", "sbm")? },
        _ => ThresholdQuery::Balls { n: n()?, delta: need(a.delta, "delta", "balls")? },
    };
    let rows = report_thresholds(&query)?;
    Ok(Report::ok(match cli.format {
        Format::Json => pretty(&json!({ "query": query, "rows": rows })),
        Format::Csv => {
            let mut t = String::from("name,actual,required,satisfied,note\n");
            for r in &rows {
                writeln!(t, "{},{:?},{:?},{},\"{}\"", r.name, r.actual, r.required, r.satisfied, r.note.replace('"', "'"))
                    .unwrap();
            }
            t
        }
    }))
}
