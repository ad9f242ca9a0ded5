use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sato_tate::arith::sieve_primes;
use sato_tate::curves::{decompose_factors, sweep_traces, CurveSpec, Family, TraceCache, TraceMethod, TraceRecord};
use sato_tate::moments::{
    curve_moments, fmt_f, group_exact_moments, mc_moments, CurveMoments, MomentReport, MomentTable, MAX_ORDER,
};
use sato_tate::mtrank::{factor_index_check, IndexKind, MTInstance, Overall};
use sato_tate::stgroup::{
    check_usp_membership, classify_c, component_group, generators_for_class, twist_class, verify_generators,
};

const DEFAULT_SEED: u64 = 20_240_101;
const CACHE_FILE: &str = "traces.csv";

#[derive(Parser)]
#[command(name = "sato-tate", version, about = "Sato-Tate groups and moment statistics of y^2 = x^(2^m) - c and y^2 = x^(2^d+1) - cx")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Pow2m,
    Twopow,
}

#[derive(Args, Clone)]
struct CurveArgs {
    /// Curve family; inferred from --m or --d when omitted.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,

    /// Exponent m of y^2 = x^(2^m) - c.
    #[arg(long)]
    m: Option<u32>,

    /// Exponent d of y^2 = x^(2^d+1) - cx.
    #[arg(long)]
    d: Option<u32>,

    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    c: i64,
}

impl CurveArgs {
    fn family_and_param(&self) -> Result<(Family, u32)> {
        let family = match (self.family, self.m, self.d) {
            (Some(FamilyArg::Pow2m), ..) | (None, Some(_), None) => Family::PowTwo,
            (Some(FamilyArg::Twopow), ..) | (None, None, Some(_)) => Family::TwoPowPlusOne,
            (None, None, None) => bail!("give --m or --d"),
            (None, Some(_), Some(_)) => bail!("give only one of --m and --d, or pass --family"),
        };
        let param = match family {
            Family::PowTwo => self.m.context("--family pow2m needs --m")?,
            Family::TwoPowPlusOne => self.d.context("--family twopow needs --d")?,
        };
        Ok((family, param))
    }

    fn spec_with(&self, c: i64) -> Result<CurveSpec> {
        let (family, param) = self.family_and_param()?;
        Ok(CurveSpec::new(family, param, c)?)
    }

    fn spec(&self) -> Result<CurveSpec> {
        self.spec_with(self.c)
    }
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// Largest prime in the sweep.
    #[arg(long, default_value_t = 1 << 16, value_parser = clap::value_parser!(u64).range(3..))]
    pmax: u64,

    /// Directory holding the trace cache.
    #[arg(long, env = "SATO_TATE_CACHE_DIR")]
    cache: Option<PathBuf>,
}

fn parse_nmax(s: &str) -> Result<u32, String> {
    let n: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if n == 0 || n > MAX_ORDER {
        return Err(format!("must be between 1 and {MAX_ORDER}"));
    }
    Ok(n)
}

#[derive(Subcommand)]
enum Command {
    /// Exact (and optionally Monte Carlo) moments over the Sato-Tate group.
    StMoments {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value_t = 8, value_parser = parse_nmax)]
        nmax: u32,
        /// Statistic a_i; exact moments exist for a_1 only.
        #[arg(long, default_value_t = 1)]
        ai: usize,
        /// Monte Carlo samples (0 disables).
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Moments of the normalized Frobenius trace over good primes up to --pmax.
    CurveMoments {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, default_value_t = 8, value_parser = parse_nmax)]
        nmax: u32,
    },
    /// Curve moments for one or more c next to the exact group moments.
    Compare {
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long, num_args = 1.., default_values_t = [1], allow_negative_numbers = true)]
        c: Vec<i64>,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, default_value_t = 8, value_parser = parse_nmax)]
        nmax: u32,
    },
    /// Check the generator relations and symplectic membership.
    Verify {
        #[command(flatten)]
        curve: CurveArgs,
        /// Check every twist class, not only the class of --c.
        #[arg(long)]
        all_classes: bool,
    },
    /// Twist class of c in Q(zeta_N).
    ClassifyC {
        #[arg(long, allow_negative_numbers = true)]
        c: i64,
        #[arg(long = "N")]
        n: u64,
    },
    /// Isogeny factors of y^2 = x^(2^m) - c.
    Decompose {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        c: i64,
    },
    /// Mumford-Tate degeneracy check of an integer matrix.
    MtRank {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Text produced by a command and whether every check in it passed.
struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn pass(text: String) -> Self {
        Self { text, ok: true }
    }
}

fn render_table(table: &MomentTable, format: Format, even_only: bool) -> Result<String> {
    Ok(match format {
        Format::Csv => table.to_csv()?,
        Format::Json => serde_json::to_string_pretty(table)? + "\n",
        Format::Table => table.to_text(even_only),
    })
}

fn render_report(report: &MomentReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(report.to_json()? + "\n"),
        _ => render_table(&report.table(), format, report.statistic == 1),
    }
}

fn st_moments(curve: &CurveArgs, nmax: u32, ai: usize, samples: u64, seed: u64, format: Format) -> Result<Output> {
    let spec = curve.spec()?;
    if ai == 0 || ai > spec.genus() {
        bail!("--ai must be between 1 and the genus {}", spec.genus());
    }
    if ai > 1 && samples == 0 {
        bail!("exact moments exist for a_1 only; pass --samples for a_{ai}");
    }
    let mut report = MomentReport::new(&spec, twist_class(&spec)?, ai, nmax);
    if ai == 1 {
        report = report.with_exact(&group_exact_moments(&spec, nmax)?);
    }
    if samples > 0 {
        let cosets = component_group(&spec)?;
        report = report.with_cosets(cosets.len()).with_mc(mc_moments(&cosets, ai, nmax, samples, seed)?);
    }
    Ok(Output::pass(render_report(&report, format)?))
}

/// Traces of `spec` at good primes up to pmax. First-family traces are sums
/// of factor traces.
fn traces(spec: &CurveSpec, sweep: &SweepArgs) -> Result<Vec<TraceRecord>> {
    let primes = sieve_primes(sweep.pmax);
    let method = match spec.family() {
        Family::PowTwo => TraceMethod::FactorSum,
        Family::TwoPowPlusOne => TraceMethod::Direct,
    };
    match &sweep.cache {
        Some(dir) => {
            let cache = TraceCache::new(dir.join(CACHE_FILE));
            cache.sweep_by(spec, primes.as_slice(), method).with_context(|| format!("trace cache {}", cache.path().display()))
        }
        None => Ok(sweep_traces(spec, primes.as_slice(), method)?),
    }
}

fn sweep_moments(spec: &CurveSpec, sweep: &SweepArgs, nmax: u32) -> Result<CurveMoments> {
    Ok(curve_moments(&traces(spec, sweep)?, sweep.pmax, nmax)?)
}

fn cmd_curve_moments(curve: &CurveArgs, sweep: &SweepArgs, nmax: u32, format: Format) -> Result<Output> {
    let spec = curve.spec()?;
    let report = MomentReport::new(&spec, twist_class(&spec)?, 1, nmax).with_curve(sweep_moments(&spec, sweep, nmax)?);
    Ok(Output::pass(render_report(&report, format)?))
}

fn cmd_compare(curve: &CurveArgs, cs: &[i64], sweep: &SweepArgs, nmax: u32, format: Format) -> Result<Output> {
    let mut table = MomentTable::new((1..=nmax).collect());
    let mut classes: Vec<(Option<u64>, Vec<String>, Vec<f64>)> = Vec::new();
    let mut curves = Vec::new();
    for &c in cs {
        let spec = curve.spec_with(c)?;
        let class = twist_class(&spec)?;
        let moments = sweep_moments(&spec, sweep, nmax)?;
        table.push("a1".into(), c.to_string(), moments.estimates.iter().map(|v| fmt_f(*v)).collect());
        if !classes.iter().any(|(k, ..)| *k == class) {
            let exact = group_exact_moments(&spec, nmax)?;
            let values = exact.values();
            let as_f64 = values.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect();
            classes.push((class, values.iter().map(|r| r.to_string()).collect(), as_f64));
        }
        curves.push((c, class, moments));
    }
    for (class, exact, _) in &classes {
        let label = match class {
            Some(a) if classes.len() > 1 => format!("mu1[a={a}]"),
            _ => "mu1".into(),
        };
        table.push(label, "-".into(), exact.clone());
    }
    for (c, class, moments) in &curves {
        let (_, _, exact) = classes.iter().find(|(k, ..)| k == class).expect("class recorded");
        let rel = moments
            .estimates
            .iter()
            .zip(exact)
            .map(|(a, mu)| if *mu == 0.0 { "-".to_string() } else { fmt_f((a - mu) / mu) })
            .collect();
        table.push("relerr".into(), c.to_string(), rel);
    }
    Ok(Output::pass(render_table(&table, format, true)?))
}

fn cmd_verify(curve: &CurveArgs, all_classes: bool, format: Format) -> Result<Output> {
    let spec = curve.spec()?;
    let n = spec.root_order();
    let classes: Vec<Option<u64>> = if n < 8 {
        vec![None]
    } else if all_classes {
        (0..).map(|k| 1u64 << k).take_while(|a| *a <= n / 2).map(Some).collect()
    } else {
        vec![twist_class(&spec)?]
    };
    let mut lines = Vec::new();
    let mut records = Vec::new();
    let mut ok = true;
    for class in classes {
        let gens = generators_for_class(&spec, class)?;
        let tag = class.map_or("-".to_string(), |a| a.to_string());
        for check in verify_generators(&spec, &gens)? {
            ok &= check.holds;
            lines.push(format!("{check} class={tag}"));
            records.push(serde_json::json!({ "class": class, "check": check }));
        }
        for (name, g) in gens.named() {
            let holds = check_usp_membership(g)?;
            ok &= holds;
            lines.push(format!("{} {name:<8} in USp({}) class={tag}", if holds { "PASS" } else { "FAIL" }, g.size()));
            records.push(serde_json::json!({ "class": class, "generator": name, "usp": holds }));
        }
    }
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({ "curve": spec.to_string(), "checks": records }))? + "\n",
        _ => format!("{spec}\n{}\n", lines.join("\n")),
    };
    Ok(Output { text, ok })
}

fn cmd_classify(c: i64, n: u64, format: Format) -> Result<Output> {
    let a = classify_c(c, n)?;
    Ok(Output::pass(match format {
        Format::Json => serde_json::json!({ "c": c, "N": n, "class": a }).to_string() + "\n",
        _ => format!("{a}\n"),
    }))
}

fn cmd_decompose(m: u32, c: i64, format: Format) -> Result<Output> {
    let spec = CurveSpec::pow_two(m, c)?;
    let ds = decompose_factors(m)?;
    let factors: Vec<CurveSpec> = ds.iter().map(|&d| CurveSpec::two_pow_plus_one(d, c)).collect::<Result<_, _>>()?;
    let text = match format {
        Format::Json => {
            let rows: Vec<_> = factors
                .iter()
                .map(|f| serde_json::json!({ "d": f.param(), "genus": f.genus(), "curve": f.to_string() }))
                .collect();
            serde_json::to_string_pretty(&serde_json::json!({ "curve": spec.to_string(), "genus": spec.genus(), "factors": rows }))? + "\n"
        }
        Format::Csv => {
            let mut s = "d,genus,curve\n".to_string();
            for f in &factors {
                s += &format!("{},{},{}\n", f.param(), f.genus(), f);
            }
            s
        }
        Format::Table => {
            let mut s = format!("{spec} (genus {}) is isogenous to the product of\n", spec.genus());
            for f in &factors {
                s += &format!("  d={}  genus {:<3} {f}\n", f.param(), f.genus());
            }
            s
        }
    };
    Ok(Output::pass(text))
}

fn cmd_mt_rank(input: &Path, format: Format) -> Result<Output> {
    let inst = MTInstance::load(input).with_context(|| format!("reading {}", input.display()))?;
    let v = factor_index_check(&inst);
    let ok = v.overall == Overall::Nondegenerate;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&v)? + "\n",
        _ => {
            let mut s = format!("rank {} kernel {}\n", v.rank, v.kernel_dim);
            for b in &v.blocks {
                let kind = match b.index {
                    IndexKind::InfiniteIndex => "InfiniteIndex",
                    IndexKind::FiniteIndex => "FiniteIndex",
                };
                s += &format!("block cols {}..{} span {} of {} {kind}\n", b.offset, b.offset + b.width, b.span_dim, inst.cols());
            }
            s + &format!("{:?}\n", v.overall)
        }
    };
    Ok(Output { text, ok })
}

fn run(cli: &Cli) -> Result<Output> {
    let f = cli.format;
    match &cli.command {
        Command::StMoments { curve, nmax, ai, samples, seed } => st_moments(curve, *nmax, *ai, *samples, *seed, f),
        Command::CurveMoments { curve, sweep, nmax } => cmd_curve_moments(curve, sweep, *nmax, f),
        Command::Compare { family, m, d, c, sweep, nmax } => {
            let curve = CurveArgs { family: *family, m: *m, d: *d, c: c[0] };
            cmd_compare(&curve, c, sweep, *nmax, f)
        }
        Command::Verify { curve, all_classes } => cmd_verify(curve, *all_classes, f),
        Command::ClassifyC { c, n } => cmd_classify(*c, *n, f),
        Command::Decompose { m, c } => cmd_decompose(*m, *c, f),
        Command::MtRank { input } => cmd_mt_rank(input, f),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = run(&cli).and_then(|out| {
        match &cli.out {
            Some(path) => std::fs::write(path, &out.text).with_context(|| format!("writing {}", path.display()))?,
            None => print!("{}", out.text),
        }
        Ok(out.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
