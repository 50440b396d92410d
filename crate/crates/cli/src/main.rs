//! `qdimer`: exact computations, samplers and figures for q-weighted lozenge tilings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdimer::acceptance;
use qdimer::catalog;
use qdimer::kasteleyn::{invert_k, partition_function};
use qdimer::lattice::{format_domain, parse_domain, Axis, Domain, LatticePoint};
use qdimer::modlab::{
    annihilator, boundary_decomposition, build_q, build_qw, check_x_injective, default_marked_point,
    generators_relations, hilbert_m, predicted_dim_m, verify_line_module, verify_move, ModError,
    ResolutionData,
};
use qdimer::ncalg::NCParams;
use qdimer::render::{density_csv, density_svg, tiling_svg, tiling_text, Shading};
use qdimer::sampler::{density_run, sample_exact_many, DensityConfig, Mcmc, Method};
use qdimer::scalar::{format_scalar, parse_scalar, to_f64, Scalar};

#[derive(Parser, Debug)]
#[command(name = "qdimer", version, about = "Exact q-weighted lozenge tilings and their graded modules")]
struct Cli {
    /// Seed of every random choice (default 0; selftest defaults to its own fixed seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sampling (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for written artifacts.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

impl Cli {
    fn seed(&self) -> u64 {
        match self.command {
            Command::Selftest { .. } => self.seed.unwrap_or(acceptance::Settings::default().seed),
            _ => self.seed.unwrap_or(0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Svg,
}

#[derive(Args, Debug, Clone)]
struct DomainArg {
    /// Domain file (`A x y z` / `B x y z` lines) or a built-in name such as `hex2,2,2` or `u11a`.
    #[arg(long)]
    domain: String,
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// Gauge parameter q, as `p` or `p/q`.
    #[arg(long, conflicts_with = "qij")]
    q: Option<String>,
    /// Full triple `q12,q23,q31`.
    #[arg(long)]
    qij: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a domain and print its boundary data.
    DomainCheck {
        #[command(flatten)]
        domain: DomainArg,
    },
    /// Partition function `det K_0` normalized by the minimal tiling.
    Partition {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Exact inverse of the level-0 Kasteleyn matrix.
    Inverse {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        params: ParamArgs,
        /// Only the column of this white triangle, as `x,y,z`.
        #[arg(long)]
        white: Option<String>,
    },
    /// Dimensions of M, Q and optionally Q^w degree by degree.
    Kernel {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        max_degree: Option<i64>,
        /// Marked white triangle `x,y,z`, or `auto`.
        #[arg(long)]
        marked: Option<String>,
    },
    /// Minimal generators and relations of Q or Q^w.
    Resolution {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 3)]
        max_degree: i64,
        #[arg(long)]
        marked: Option<String>,
    },
    /// Point-module decomposition of Q / x_k Q.
    Boundary {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 3)]
        axis: usize,
        /// Degrees to examine (default: 1 up to one below the stable range).
        #[arg(long, value_delimiter = ',')]
        degree: Vec<i64>,
    },
    /// Minimal-degree operators annihilating a column of K^-1.
    Annihilator {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "auto")]
        marked: String,
        #[arg(long, default_value_t = 4)]
        max_degree: i64,
    },
    /// Compare Q across a boundary move.
    Move {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        params: ParamArgs,
        /// Segment id (default: every horizontal segment).
        #[arg(long)]
        segment: Option<usize>,
    },
    /// Random tilings, as edge lists or pictures.
    Sample {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Burn-in sweeps per chain (default: ten per face).
        #[arg(long)]
        burnin: Option<u64>,
        /// Single-face updates after burn-in.
        #[arg(long, default_value_t = 0)]
        steps: u64,
    },
    /// Orientation frequencies as SVG and CSV.
    Heatmap {
        #[command(flatten)]
        domain: DomainArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Mcmc)]
        method: MethodArg,
        #[arg(long, default_value_t = 200)]
        samples: u64,
        /// Burn-in sweeps per chain (default: ten per face).
        #[arg(long)]
        burnin: Option<u64>,
        #[arg(long, default_value_t = 1)]
        thin: u64,
        #[arg(long, default_value_t = 1)]
        chains: u64,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Only these criteria.
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<u8>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Mcmc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Mcmc => Method::Mcmc,
        }
    }
}

/// Failure classes, mapped to exit codes 1 (input) and 2 (verification).
enum Failure {
    Input(String),
    Verification(String),
}

impl From<ModError> for Failure {
    fn from(e: ModError) -> Failure {
        match e {
            ModError::Lattice(_) | ModError::BadMarkedPoint(_) | ModError::MissingDegree(_) => Failure::Input(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn input<E: ToString>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn load_domain(name: &str) -> Result<Domain, Failure> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{name}: {e}")))?;
        let (a, b) = parse_domain(&text).map_err(|e| Failure::Input(format!("{name}: {e}")))?;
        return Domain::relaxed(a, b).map_err(|e| Failure::Input(format!("{name}: {e}")));
    }
    catalog::named(name).ok_or_else(|| {
        Failure::Input(format!("{name}: no such file, and not a built-in domain (hexA,B,C or one of {})", catalog::NAMES.join(", ")))
    })
}

fn load_params(p: &ParamArgs) -> Result<NCParams, Failure> {
    if let Some(t) = &p.qij {
        let parts: Vec<&str> = t.split(',').collect();
        if parts.len() != 3 {
            return Err(Failure::Input(format!("--qij expects three values q12,q23,q31, got {t:?}")));
        }
        let v: Vec<Scalar> = parts.iter().map(|s| parse_scalar(s.trim())).collect::<Result<_, _>>().map_err(input)?;
        return NCParams::new(v[0].clone(), v[1].clone(), v[2].clone()).map_err(input);
    }
    let q = parse_scalar(p.q.as_deref().unwrap_or("1")).map_err(input)?;
    NCParams::gauge(q).map_err(input)
}

fn parse_point(t: &str) -> Result<LatticePoint, Failure> {
    let v: Vec<i64> = t
        .trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|s| s.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Input(format!("expected a point x,y,z, got {t:?}")))?;
    match v[..] {
        [a, b, c] => Ok(LatticePoint::new(a, b, c)),
        _ => Err(Failure::Input(format!("expected a point x,y,z, got {t:?}"))),
    }
}

fn marked_point(d: &Domain, t: &str) -> Result<LatticePoint, Failure> {
    if t == "auto" {
        default_marked_point(d).ok_or_else(|| Failure::Input("domain has no white triangle".into()))
    } else {
        parse_point(t)
    }
}

fn header(out: &mut String, command: &str, cli: &Cli, domain: Option<&str>, params: Option<&NCParams>) {
    let _ = writeln!(out, "# command: {command}");
    if let Some(d) = domain {
        let _ = writeln!(out, "# domain: {d}");
    }
    if let Some(p) = params {
        let _ = writeln!(out, "# params: {p} q={}", format_scalar(&p.q()));
    }
    let _ = writeln!(out, "# seed: {}", cli.seed());
}

fn domain_check(cli: &Cli, d: &DomainArg) -> Outcome {
    let dom = load_domain(&d.domain)?;
    let mut out = String::new();
    header(&mut out, "domain-check", cli, Some(&d.domain), None);
    let _ = writeln!(out, "black: {}", dom.black.len());
    let _ = writeln!(out, "white: {}", dom.white.len());
    let _ = writeln!(out, "degree: {}", dom.degree);
    let _ = writeln!(out, "stable range: {}", dom.stable_range);
    let _ = writeln!(out, "tileable: {}", dom.tileable);
    let _ = writeln!(out, "index K0: {}", dom.index_k0());
    for s in &dom.segments {
        let _ = writeln!(out, "segment {}: axis {} {} length {} height {}", s.id, s.axis, s.color, s.length, s.height);
    }
    out.push_str("triangles:\n");
    out.push_str(&format_domain(&dom.a, &dom.b));
    Ok(out)
}

fn partition(cli: &Cli, d: &DomainArg, p: &ParamArgs) -> Outcome {
    let dom = load_domain(&d.domain)?;
    let params = load_params(p)?;
    let z = partition_function(&dom, &params).map_err(|e| Failure::Verification(e.to_string()))?;
    let mut out = String::new();
    header(&mut out, "partition", cli, Some(&d.domain), Some(&params));
    let _ = writeln!(out, "Z = {}", format_scalar(&z));
    Ok(out)
}

fn inverse(cli: &Cli, d: &DomainArg, p: &ParamArgs, white: Option<&str>) -> Outcome {
    let dom = load_domain(&d.domain)?;
    let params = load_params(p)?;
    let sys = invert_k(&dom, &params).map_err(|e| Failure::Verification(e.to_string()))?;
    let whites: Vec<LatticePoint> = match white {
        Some(w) => vec![parse_point(w)?],
        None => sys.whites().to_vec(),
    };
    let mut out = String::new();
    let csv = cli.format == Format::Csv;
    if csv {
        out.push_str("b1,b2,b3,w1,w2,w3,value\n");
    } else {
        header(&mut out, "inverse", cli, Some(&d.domain), Some(&params));
        let _ = writeln!(out, "det K0 = {}", format_scalar(&sys.determinant));
        let _ = writeln!(out, "Z = {}", format_scalar(&sys.partition_function));
        out.push_str("verified: K K^-1 = K^-1 K = I\n");
    }
    for w in &whites {
        let col = sys.column(w).map_err(input)?;
        for (b, v) in sys.blacks().iter().zip(&col) {
            if csv {
                let _ = writeln!(out, "{},{},{},{},{},{},{}", b.0[0], b.0[1], b.0[2], w.0[0], w.0[1], w.0[2], format_scalar(v));
            } else {
                let _ = writeln!(out, "K^-1[{b}, {w}] = {}", format_scalar(v));
            }
        }
    }
    Ok(out)
}

fn kernel(cli: &Cli, d: &DomainArg, p: &ParamArgs, max_degree: Option<i64>, marked: Option<&str>) -> Outcome {
    let dom = load_domain(&d.domain)?;
    let params = load_params(p)?;
    let s = dom.stable_range as i64;
    let top = max_degree.unwrap_or(s + 1);
    let q = build_q(&dom, &params, top)?;
    let mut out = String::new();
    header(&mut out, "kernel", cli, Some(&d.domain), Some(&params));
    let _ = writeln!(out, "degree: {}", dom.degree);
    let _ = writeln!(out, "stable range: {s}");
    let mut failed = Vec::new();
    for k in 0..=top {
        let m = dom.module().dim(k);
        let predicted = predicted_dim_m(&dom, k);
        let dq = q.dim(k)?;
        let stable = k <= s;
        let _ = writeln!(out, "d={k}: dim M = {m} (formula {predicted}), dim Q = {dq}{}", if stable { format!(" (expected {})", k as usize * dom.degree) } else { String::new() });
        if let Err(e) = hilbert_m(&dom, k) {
            failed.push(e.to_string());
        }
        if stable && dq != k as usize * dom.degree {
            failed.push(format!("dim Q_{k} = {dq}"));
        }
    }
    if let Some(t) = marked {
        let w = marked_point(&dom, t)?;
        let qw = build_qw(&dom, &params, w, top)?;
        let sw = qw.stable_range as i64;
        let _ = writeln!(out, "marked: {w}, stable range {sw}");
        for k in 0..=top {
            let dw = qw.dim(k)?;
            let expected = (dom.degree + 1) * k as usize + 1;
            let note = if k <= sw { format!(" (expected {expected})") } else { String::new() };
            let _ = writeln!(out, "d={k}: dim Q^w = {dw}{note}");
            if k <= sw && dw != expected {
                failed.push(format!("dim Q^w_{k} = {dw}"));
            }
        }
        match verify_line_module(&qw, &q, sw.min(top)) {
            Ok(r) => {
                let _ = writeln!(out, "line module: dims {:?}, l = {}", r.quotient_dims, r.line);
            }
            Err(e) => failed.push(format!("line module: {e}")),
        }
    }
    finish(out, failed)
}

fn finish(mut out: String, failed: Vec<String>) -> Outcome {
    if failed.is_empty() {
        out.push_str("verdict: pass\n");
        Ok(out)
    } else {
        for f in &failed {
            let _ = writeln!(out, "failed: {f}");
        }
        out.push_str("verdict: fail\n");
        Err(Failure::Verification(out))
    }
}

fn write_resolution(out: &mut String, data: &ResolutionData) {
    let _ = writeln!(out, "{}", data.summary());
    let _ = writeln!(out, "generator degrees: {:?}", data.generator_degrees);
    let _ = writeln!(out, "relation degrees: {:?}", data.relation_degrees);
    let _ = writeln!(out, "syzygies: {:?}", data.syzygies.iter().filter(|(_, n)| **n > 0).collect::<Vec<_>>());
    out.push_str("R:\n");
    for (i, row) in data.relation_matrix.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|f| f.to_string()).collect();
        let _ = writeln!(out, "  r{i}: [{}]", cells.join(" | "));
    }
}

fn resolution(cli: &Cli, d: &DomainArg, p: &ParamArgs, max_degree: i64, marked: Option<&str>) -> Outcome {
    let dom = load_domain(&d.domain)?;
    let params = load_params(p)?;
    let top = max_degree.min(dom.stable_range as i64);
    let km = match marked {
        Some(t) => build_qw(&dom, &params, marked_point(&dom, t)?, top)?,
        None => build_q(&dom, &params, top)?,
    };
    let mut out = String::new();
    header(&mut out, "resolution", cli, Some(&d.domain), Some(&params));
    if let Some(w) = km.marked {
        let _ = writeln!(out, "module: Q^w, w = {w}, stable range {}", km.stable_range);
    } else {
        let _ = writeln!(out, "module: Q, stable range {}", km.stable_range);
    }
    match generators_relations(&km, max_degree) {
        Ok(data) => {
            write_resolution(&mut out, &data);
            out.push_str("shape: generic\n");
            Ok(out)
        }
        Err(ModError::NongenericQ { reason, data }) => {
            write_resolution(&mut out, &data);
            let _ = writeln!(out, "shape: nongeneric ({reason})");
            Err(Failure::Verification(out))
        }
        Err(e) => Err(e.into()),
    }
}

fn axis_arg(k: usize) -> Result<Axis, Failure> {
    match k {
        1..=3 => Ok(Axis::from_index(k - 1)),
        _ => Err(Failure::Input(format!("--axis must be 1, 2 or 3, got {k}"))),
    }
}

fn boundary(cli: &Cli, d: &DomainArg, p: &ParamArgs, axis: usize, degrees: &[i64]) -> Outcome {
    let dom = load_domain(&d.domain)?;
    let params = load_params(p)?;
    let axis = axis_arg(axis)?;
    let s = dom.stable_range as i64;
    let degrees: Vec<i64> = if degrees.is_empty() { (1..s).collect() } else { degrees.to_vec() };
    let top = degrees.iter().copied().max().unwrap_or(0) + 1;
    let q = build_q(&dom, &params, top.max(1))?;
    let mut out = String::new();
    header(&mut out, "boundary", cli, Some(&d.domain), Some(&params));
    let expected = dom.heights(axis);
    let _ = writeln!(out, "axis: {axis}");
    let _ = writeln!(out, "boundary heights: {expected:?}");
    let mut failed = Vec::new();
    for &k in &degrees {
        let parts = boundary_decomposition(&q, axis, k)?;
        let mut heights = Vec::new();
        for part in &parts {
            let _ = writeln!(out, "d={k}: {}", part.describe());
            match part.height {
                Some(h) => heights.extend(std::iter::repeat_n(h, part.multiplicity)),
                None => failed.push(format!("d={k}: height not determined by q^a")),
            }
        }
        heights.sort_unstable();
        let _ = writeln!(out, "d={k}: recovered heights {heights:?}");
        if heights != expected {
            failed.push(format!("d={k}: recovered {heights:?}"));
        }
        let injective = check_x_injective(&q, axis, k)?;
        let _ = writeln!(out, "d={k}: {axis} injective on Q: {injective}");
        if !injective {
            failed.push(format!("d={k}: {axis} not injective"));
        }
    }
    finish(out, failed)
}

fn annihilate(cli: &Cli, d: &DomainArg, p: &ParamArgs, marked: &str, max_degree: i64) -> Outcome {
    let dom = load_domain(&d.domain)?;
    let params = load_params(p)?;
    let w = marked_point(&dom, marked)?;
    let qw = build_qw(&dom, &params, w, 0)?;
    let ann = annihilator(&qw, max_degree)?;
    let mut out = String::new();
    header(&mut out, "annihilator", cli, Some(&d.domain), Some(&params));
    let _ = writeln!(out, "marked: {w}, stable range {}", qw.stable_range);
    let _ = writeln!(out, "minimal degree: {}", ann.degree);
    let _ = writeln!(out, "in stable range: {}", ann.in_stable_range);
    let _ = writeln!(out, "operators: {}", ann.operators.len());
    for (i, f) in ann.operators.iter().enumerate() {
        let _ = writeln!(out, "  f{i} = {f}");
    }
    Ok(out)
}

fn boundary_move(cli: &Cli, d: &DomainArg, p: &ParamArgs, segment: Option<usize>) -> Outcome {
    let dom = load_domain(&d.domain)?;
    let params = load_params(p)?;
    let ids: Vec<usize> = match segment {
        Some(s) => vec![s],
        None => dom.segments_of(Axis::X3).iter().map(|s| s.id).collect(),
    };
    let mut out = String::new();
    header(&mut out, "move", cli, Some(&d.domain), Some(&params));
    let mut failed = Vec::new();
    for id in ids {
        let rep = match verify_move(&dom, &params, id, dom.stable_range as i64) {
            Ok(r) => r,
            Err(e) => {
                let _ = writeln!(out, "segment {id}: unsupported, {e}");
                failed.push(format!("segment {id}: {e}"));
                continue;
            }
        };
        let ratios: Vec<String> = rep.params.iter().map(|x| format!("d={} {}", x.degree, format_scalar(&x.ratio))).collect();
        let _ = writeln!(
            out,
            "segment {id}: {} height {}, dim Q/Q' {:?}, ratios [{}], {}",
            rep.color,
            rep.height,
            rep.quotient_dims,
            ratios.join(", "),
            if rep.passed() { "pass" } else { "fail" }
        );
        failed.extend(rep.failures.iter().map(|f| format!("segment {id}: {f}")));
        if rep.params.is_empty() {
            failed.push(format!("segment {id}: no ratio could be read"));
        }
    }
    finish(out, failed)
}

fn positive_q(params: &NCParams) -> Result<Scalar, Failure> {
    let q = params.q();
    if q <= Scalar::from_integer(0.into()) {
        return Err(Failure::Input(format!("sampling needs q > 0, got {}", format_scalar(&q))));
    }
    Ok(q)
}

fn write_artifact(dir: &Path, name: &str, body: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn sample(cli: &Cli, d: &DomainArg, p: &ParamArgs, method: MethodArg, count: u64, burnin: Option<u64>, steps: u64) -> Outcome {
    let dom = load_domain(&d.domain)?;
    let params = load_params(p)?;
    let q = positive_q(&params)?;
    let gauge = NCParams::gauge(q.clone()).map_err(input)?;
    let tilings = match method {
        MethodArg::Exact => {
            let sys = invert_k(&dom, &gauge).map_err(|e| Failure::Verification(e.to_string()))?;
            sample_exact_many(&sys, count as usize, cli.seed()).map_err(input)?
        }
        MethodArg::Mcmc => (0..count)
            .map(|i| {
                let mut chain = Mcmc::with_stream(&dom, to_f64(&q), cli.seed(), i).map_err(input)?;
                chain.sweep(burnin.unwrap_or(10 * chain.faces() as u64));
                chain.run(steps);
                Ok(chain.tiling())
            })
            .collect::<Result<Vec<_>, Failure>>()?,
    };
    let mut out = String::new();
    header(&mut out, "sample", cli, Some(&d.domain), Some(&gauge));
    match method {
        MethodArg::Exact => out.push_str("# method: Exact\n"),
        MethodArg::Mcmc => {
            let b = burnin.map_or("default".to_string(), |b| b.to_string());
            let _ = writeln!(out, "# method: Mcmc burnin {b} steps {steps}");
        }
    }
    for (i, t) in tilings.iter().enumerate() {
        let _ = writeln!(out, "tiling {i}");
        match cli.format {
            Format::Svg => {
                let path = write_artifact(&cli.out_dir, &format!("tiling_{i}.svg"), &tiling_svg(t, &format!("{} seed {} #{i}", d.domain, cli.seed())))?;
                let _ = writeln!(out, "volume {}\nwrote {}", t.volume, path.display());
            }
            _ => out.push_str(&tiling_text(t)),
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn heatmap(cli: &Cli, d: &DomainArg, p: &ParamArgs, method: MethodArg, samples: u64, burnin: Option<u64>, thin: u64, chains: u64) -> Outcome {
    let dom = load_domain(&d.domain)?;
    let params = load_params(p)?;
    let q = positive_q(&params)?;
    let config = DensityConfig { method: method.into(), samples: samples.max(1), burnin_sweeps: burnin, thin_sweeps: thin.max(1), chains, seed: cli.seed() };
    let (map, tiling) = density_run(&dom, &q, &config).map_err(|e| Failure::Verification(e.to_string()))?;
    let title = format!("{} q={} seed {}", d.domain, format_scalar(&q), cli.seed());
    let mut out = String::new();
    header(&mut out, "heatmap", cli, Some(&d.domain), Some(&NCParams::gauge(q.clone()).map_err(input)?));
    let _ = writeln!(out, "# method: {method:?} samples {} burnin {} thin {} chains {}", map.samples, burnin.map_or("default".to_string(), |b| b.to_string()), config.thin_sweeps, chains);
    let files = [
        ("heatmap.csv", density_csv(&map)),
        ("heatmap.svg", density_svg(&map, Shading::Mix, &title)),
        ("heatmap_x3.svg", density_svg(&map, Shading::Gray(Axis::X3), &title)),
        ("tiling.svg", tiling_svg(&tiling, &title)),
    ];
    for (name, body) in files {
        let wanted = match cli.format {
            Format::Text => true,
            Format::Csv => name.ends_with(".csv"),
            Format::Svg => name.ends_with(".svg"),
        };
        if wanted {
            let path = write_artifact(&cli.out_dir, name, &body)?;
            let _ = writeln!(out, "wrote {}", path.display());
        }
    }
    Ok(out)
}

fn selftest(cli: &Cli, criteria: &[u8]) -> Outcome {
    let ids: Vec<u8> = if criteria.is_empty() { (1..=9).collect() } else { criteria.to_vec() };
    if let Some(bad) = ids.iter().find(|i| !(1..=9).contains(*i)) {
        return Err(Failure::Input(format!("no criterion {bad}; criteria are numbered 1 to 9")));
    }
    let settings = acceptance::Settings { seed: cli.seed(), out_dir: Some(cli.out_dir.clone()) };
    let mut out = String::new();
    header(&mut out, "selftest", cli, None, None);
    let mut all = true;
    for id in ids {
        let o = acceptance::run(id, &settings);
        all &= o.passed;
        let _ = writeln!(out, "{}", o.line());
        for d in &o.details {
            let _ = writeln!(out, "    {d}");
        }
        print!("{out}");
        out.clear();
    }
    if all {
        Ok(out)
    } else {
        Err(Failure::Verification(out))
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::DomainCheck { domain } => domain_check(cli, domain),
        Command::Partition { domain, params } => partition(cli, domain, params),
        Command::Inverse { domain, params, white } => inverse(cli, domain, params, white.as_deref()),
        Command::Kernel { domain, params, max_degree, marked } => kernel(cli, domain, params, *max_degree, marked.as_deref()),
        Command::Resolution { domain, params, max_degree, marked } => resolution(cli, domain, params, *max_degree, marked.as_deref()),
        Command::Boundary { domain, params, axis, degree } => boundary(cli, domain, params, *axis, degree),
        Command::Annihilator { domain, params, marked, max_degree } => annihilate(cli, domain, params, marked, *max_degree),
        Command::Move { domain, params, segment } => boundary_move(cli, domain, params, *segment),
        Command::Sample { domain, params, method, count, burnin, steps } => {
            sample(cli, domain, params, *method, *count, *burnin, *steps)
        }
        Command::Heatmap { domain, params, method, samples, burnin, thin, chains } => {
            heatmap(cli, domain, params, *method, *samples, *burnin, *thin, *chains)
        }
        Command::Selftest { criterion } => selftest(cli, criterion),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(out)) => {
            print!("{out}");
            if !out.ends_with('\n') {
                println!();
            }
            eprintln!("verification failed");
            ExitCode::from(2)
        }
    }
}
