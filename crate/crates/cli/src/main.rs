use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use superiso::cm::{CmError, REGISTRY_ENV};
use superiso::ec::{
    bateman_horn_constant, expected_curve_count, expected_samples_per_hit, isogeny_class_census, random_x_source,
    search_curves, verify_curve_record, SEARCH_DISCRIMINANTS,
};
use superiso::quadratic::kronecker_class_number;
use superiso::weil::{compute_i_bound, scan_all, search, verify_weil_record, SurfaceContext};
use superiso::{PrimalityPolicy, Registry, SuperIsolatedCurveRecord, SuperIsolatedWeilRecord, WeilSearchParams};

#[derive(Parser, Debug)]
#[command(name = "superiso", version, about = "Super-isolated elliptic curves and abelian surfaces")]
struct Cli {
    /// Worker threads for the library's parallel loops.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write records here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Lines)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Lines,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Elliptic curves of prime order.
    #[command(subcommand)]
    Ec(EcCommand),
    /// Super-isolated Weil numbers over quartic CM fields.
    #[command(subcommand)]
    Surface(SurfaceCommand),
    /// The quartic CM field registry.
    #[command(subcommand)]
    Fields(FieldsCommand),
}

#[derive(Subcommand, Debug)]
enum EcCommand {
    Search {
        #[arg(long)]
        d: u32,
        /// Bit length of p.
        #[arg(long)]
        bits: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        seed: u64,
    },
    Verify {
        file: PathBuf,
    },
    Estimate {
        /// A discriminant or `all`.
        #[arg(long, default_value = "all")]
        d: String,
        #[arg(long, default_value_t = 1_000_000)]
        prime_bound: usize,
        /// Bit length of x for the samples-per-hit figure.
        #[arg(long, default_value_t = 128)]
        x_bits: u32,
        /// Bit length of the bound M for the expected count.
        #[arg(long, default_value_t = 256)]
        m_bits: u32,
    },
    Census {
        #[arg(long)]
        p: u64,
    },
}

#[derive(Args, Debug)]
struct PMax {
    #[arg(long, conflicts_with = "p_max_bits")]
    p_max: Option<BigInt>,
    #[arg(long)]
    p_max_bits: Option<u64>,
}

impl PMax {
    fn value(&self) -> Result<BigInt, Failure> {
        match (&self.p_max, self.p_max_bits) {
            (Some(p), None) if p > &BigInt::from(1) => Ok(p.clone()),
            (None, Some(b)) if b > 0 => Ok(BigInt::from(1) << b),
            (None, None) => Err(Failure::usage("one of --p-max or --p-max-bits is required")),
            _ => Err(Failure::usage("p_max must be at least 2")),
        }
    }
}

#[derive(Subcommand, Debug)]
enum SurfaceCommand {
    Search {
        #[arg(long)]
        field: String,
        #[command(flatten)]
        p_max: PMax,
        #[arg(long, default_value_t = 1000)]
        cofactor_max: u64,
        /// Override the derived orbit bound.
        #[arg(long)]
        i_max: Option<u64>,
    },
    ScanAll {
        #[command(flatten)]
        p_max: PMax,
        #[arg(long, default_value_t = 1000)]
        cofactor_max: u64,
        /// Keep only near-prime records with r at least 2^r_min_bits.
        #[arg(long)]
        r_min_bits: Option<u64>,
        #[arg(long)]
        r_max_bits: Option<u64>,
    },
    Verify {
        file: PathBuf,
    },
    Bound {
        #[arg(long)]
        field: String,
        #[command(flatten)]
        p_max: PMax,
    },
}

#[derive(Subcommand, Debug)]
enum FieldsCommand {
    List,
    Validate {
        /// Registry file; defaults to the shipped one or the environment override.
        file: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 1, msg: msg.into() }
    }

    fn invalid(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }
}

impl From<CmError> for Failure {
    fn from(e: CmError) -> Self {
        match e {
            CmError::UnknownField(_) => Failure::usage(e.to_string()),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

struct Out {
    format: Format,
    text: String,
}

impl Out {
    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    /// `key=value` pairs as a line or as aligned columns.
    fn record(&mut self, s: &str) {
        match self.format {
            Format::Lines => self.line(s),
            Format::Table => {
                let mut row = String::new();
                for kv in s.split_whitespace() {
                    let _ = write!(row, "{kv:<24} ");
                }
                self.line(row.trim_end());
            }
        }
    }
}

fn registry() -> Result<Registry, Failure> {
    Ok(Registry::load_default()?)
}

fn read_lines(path: &Path) -> Result<Vec<String>, Failure> {
    let s = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok(s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from).collect())
}

fn run_ec(cmd: EcCommand, out: &mut Out) -> Result<(), Failure> {
    let pol = PrimalityPolicy::default();
    match cmd {
        EcCommand::Search { d, bits, count, seed } => {
            if bits < 8 || count == 0 {
                return Err(Failure::usage("--bits must be at least 8 and --count positive"));
            }
            let xs = random_x_source(d, bits, seed).map_err(|e| Failure::usage(e.to_string()))?;
            for r in search_curves(d, xs, count, &pol).map_err(|e| Failure::usage(e.to_string()))? {
                out.record(&r.to_string());
            }
        }
        EcCommand::Verify { file } => {
            let mut bad = 0;
            for (i, l) in read_lines(&file)?.iter().enumerate() {
                let res = l
                    .parse::<SuperIsolatedCurveRecord>()
                    .map_err(|e| e.to_string())
                    .and_then(|r| verify_curve_record(&r, &pol));
                match res {
                    Ok(()) => out.line(format!("record {} ok", i + 1)),
                    Err(e) => {
                        bad += 1;
                        out.line(format!("record {} rejected: {e}", i + 1));
                    }
                }
            }
            if bad > 0 {
                return Err(Failure::invalid(format!("{bad} records rejected")));
            }
        }
        EcCommand::Estimate { d, prime_bound, x_bits, m_bits } => {
            let ds: Vec<u32> = if d == "all" {
                SEARCH_DISCRIMINANTS.to_vec()
            } else {
                vec![d.parse().map_err(|_| Failure::usage(format!("bad discriminant {d}")))?]
            };
            if prime_bound < 2 {
                return Err(Failure::usage("--prime-bound must be at least 2"));
            }
            for d in ds {
                let c = bateman_horn_constant(d, prime_bound).map_err(|e| Failure::usage(e.to_string()))?;
                let s = expected_samples_per_hit(c, x_bits);
                out.record(&format!("d={d} C={c:.4} prime_bound={prime_bound} samples_per_hit_at_x_bits_{x_bits}={s:.0}"));
            }
            let m = 2f64.powi(m_bits as i32);
            let n = expected_curve_count(m).map_err(|e| Failure::usage(e.to_string()))?;
            out.record(&format!("expected_curves_below_2^{m_bits}={n:.4e}"));
        }
        EcCommand::Census { p } => {
            let census = isogeny_class_census(p).map_err(|e| Failure::usage(e.to_string()))?;
            let pi = p as i64;
            for (t, n) in census {
                let h = kronecker_class_number(t * t - 4 * pi).map_err(|e| Failure::usage(e.to_string()))?;
                out.record(&format!("t={t} classes={n} H={h}"));
            }
        }
    }
    Ok(())
}

fn run_surface(cmd: SurfaceCommand, out: &mut Out) -> Result<(), Failure> {
    let pol = PrimalityPolicy::default();
    let reg = registry()?;
    let weil = |e: superiso::weil::WeilError| Failure::invalid(e.to_string());
    match cmd {
        SurfaceCommand::Search { field, p_max, cofactor_max, i_max } => {
            let ctx = SurfaceContext::new(reg.get(&field)?).map_err(weil)?;
            let mut params = WeilSearchParams::new(p_max.value()?);
            params.cofactor_max = cofactor_max;
            params.i_max = i_max;
            let (recs, cert) = search(&ctx, &params, &pol).map_err(weil)?;
            if let Some(c) = cert {
                eprintln!("field={} {c}", ctx.field.id);
            }
            for r in recs {
                out.record(&r.to_string());
            }
        }
        SurfaceCommand::ScanAll { p_max, cofactor_max, r_min_bits, r_max_bits } => {
            let filter = r_min_bits.is_some() || r_max_bits.is_some();
            let r_min = BigInt::from(1) << r_min_bits.unwrap_or(0);
            let r_max = r_max_bits.map_or_else(|| BigInt::from(1) << 100_000, |b| BigInt::from(1) << b);
            let s = scan_all(&reg, &p_max.value()?, cofactor_max, &r_min, &r_max, &pol).map_err(weil)?;
            eprintln!("fields={} classes={} near_prime={}", s.fields.len(), s.total_classes, s.near_prime.len());
            if filter {
                for r in &s.near_prime {
                    out.record(&r.to_string());
                }
            } else {
                for r in s.fields.iter().flat_map(|f| &f.records) {
                    out.record(&r.to_string());
                }
            }
        }
        SurfaceCommand::Verify { file } => {
            let mut bad = 0;
            for (i, l) in read_lines(&file)?.iter().enumerate() {
                let res = l.parse::<SuperIsolatedWeilRecord>().map_err(|e| e.to_string()).and_then(|r| {
                    let f = reg.get(&r.field_id).map_err(|_| superiso::weil::RejectReason::UnknownField.to_string())?;
                    let ctx = SurfaceContext::new(f).map_err(|e| e.to_string())?;
                    verify_weil_record(f, &ctx.polys, &r, &pol).map_err(|e| e.to_string())
                });
                match res {
                    Ok(()) => out.line(format!("record {} ok", i + 1)),
                    Err(e) => {
                        bad += 1;
                        out.line(format!("record {} rejected: {e}", i + 1));
                    }
                }
            }
            if bad > 0 {
                return Err(Failure::invalid(format!("{bad} records rejected")));
            }
        }
        SurfaceCommand::Bound { field, p_max } => {
            let ctx = SurfaceContext::new(reg.get(&field)?).map_err(weil)?;
            let c = compute_i_bound(&ctx, &p_max.value()?).map_err(weil)?;
            out.record(&format!("field={} {c}", ctx.field.id));
            for (b, l) in &c.branch_leading {
                out.record(&format!("branch={b} leading={l:.6}"));
            }
        }
    }
    Ok(())
}

fn run_fields(cmd: FieldsCommand, out: &mut Out) -> Result<(), Failure> {
    match cmd {
        FieldsCommand::List => {
            for f in &registry()?.fields {
                out.record(&format!(
                    "id={} alias={} kind={} disc_k={} disc_f={}",
                    f.id,
                    f.alias.as_deref().unwrap_or("-"),
                    f.kind.as_str(),
                    f.disc_k,
                    f.disc_f
                ));
            }
        }
        FieldsCommand::Validate { file } => {
            let path = file.or_else(|| std::env::var_os(REGISTRY_ENV).map(PathBuf::from));
            let source = match &path {
                Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
                None => Registry::builtin_source().to_string(),
            };
            let rep = Registry::check(&source);
            out.line(format!("fields={} failures={}", rep.fields.len(), rep.failures.len()));
            for e in &rep.failures {
                out.line(format!("failure: {e}"));
            }
            if !rep.failures.is_empty() {
                return Err(Failure::invalid(format!("{} fields failed validation", rep.failures.len())));
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Failure::usage("--workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::usage(e.to_string()))?;
    }
    let mut out = Out { format: cli.format, text: String::new() };
    let res = match cli.command {
        Command::Ec(c) => run_ec(c, &mut out),
        Command::Surface(c) => run_surface(c, &mut out),
        Command::Fields(c) => run_fields(c, &mut out),
    };
    let written = match &cli.output {
        Some(p) => std::fs::write(p, &out.text),
        None => std::io::stdout().lock().write_all(out.text.as_bytes()),
    };
    written.map_err(|e| Failure::usage(format!("write: {e}")))?;
    res
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
