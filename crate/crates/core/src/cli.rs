//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a checked property fails, 2 on usage or
//! data errors. Numbers are printed with 12 significant digits.

use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::codec::{decode, encode, EncodedStream};
use crate::coder::{code_from_lengths, escort_huffman, kraft_sum, Codebook};
use crate::entropy::{renyi_entropy, shannon_entropy, tsallis_entropy_normalized, EntropyOrder, LogBase};
use crate::error::Error;
use crate::lengths::{
    campbell_length, escort_mean_length, expected_length, ideal_lengths_shannon, new_length_measure,
    verify_bounds, LengthVector, REPORTED_ONLY,
};
use crate::prob::{escort, parse_distribution, Distribution, CONSTRUCTION_TOLERANCE};
use crate::reference;
use crate::trials::{run_suite, SuiteConfig, DEFAULT_Q_GRID};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_DATA_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "escort",
    version,
    about = "Prefix coding with escort distributions and Renyi entropy bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    /// Distribution file: `label<TAB>probability` or one probability per line
    pub dist: PathBuf,
    /// Divide the values by their sum instead of requiring them to sum to 1
    #[arg(long)]
    pub normalize: bool,
    /// Allowed |sum - 1| when not normalizing
    #[arg(long, default_value_t = CONSTRUCTION_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Canonical code with lengths ceil(-log_D P_i)
    Shannon,
    /// Huffman code on the escort distribution
    Huffman,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print Shannon, Renyi and Tsallis entropies and the escort distribution
    Entropy {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(short = 'D', long = "base", default_value_t = 2)]
        base: u32,
    },
    /// Print the escort distribution of order q
    Escort {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
    },
    /// Build a prefix code for the escort of order q
    Codebook {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(short = 'D', long = "base", default_value_t = 2)]
        base: u32,
        #[arg(long, value_enum, default_value_t = Method::Huffman)]
        method: Method,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the length measures of a code and check the entropy bounds
    Measure {
        #[command(flatten)]
        dist: DistArgs,
        /// Codebook file (`#D=` header) or a lengths file (one length per line)
        lengths: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Campbell parameter; defaults to (1 - q)/q when 0 < q < 1
        #[arg(long)]
        beta: Option<f64>,
        /// Base for a plain lengths file (a codebook carries its own)
        #[arg(short = 'D', long = "base", default_value_t = 2)]
        base: u32,
    },
    /// Check the entropy bounds on random distributions and Kraft-feasible codes
    Verify {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        min_n: usize,
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        /// Comma-separated orders
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_Q_GRID.to_vec())]
        q_grid: Vec<f64>,
        #[arg(short = 'D', long = "base", default_value_t = 2)]
        base: u32,
        /// Use uniform sources with equal-length codes
        #[arg(long)]
        uniform: bool,
        /// Slack tolerance
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Encode a byte stream into an ESCC container
    Encode {
        /// Use this codebook (labels are byte values 0-255)
        #[arg(long, conflicts_with = "dist")]
        book: Option<PathBuf>,
        /// Build an escort Huffman code from this distribution (labels are byte values)
        #[arg(long)]
        dist: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(short = 'D', long = "base", default_value_t = 2)]
        base: u32,
        #[arg(long)]
        normalize: bool,
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decode an ESCC container back to bytes
    Decode {
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rebuild the published seven-symbol example codes and compare
    #[command(name = "paper-table")]
    ReferenceTable,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Data(#[from] Error),
    #[error("{path}: {source}")]
    File { path: String, source: Box<CliError> },
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Formats with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        format!("{:.*}", (11 - exp) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

fn with_path<T>(path: &Path, r: CliResult<T>) -> CliResult<T> {
    r.map_err(|e| CliError::File {
        path: path.display().to_string(),
        source: Box::new(e),
    })
}

fn read_text(path: &Path) -> CliResult<String> {
    with_path(path, std::fs::read_to_string(path).map_err(CliError::from))
}

fn load_distribution(args: &DistArgs) -> CliResult<Distribution> {
    let text = read_text(&args.dist)?;
    with_path(
        &args.dist,
        parse_distribution(&text, args.normalize, args.tolerance).map_err(CliError::from),
    )
}

fn base_of(d: u32) -> CliResult<LogBase> {
    Ok(LogBase::new(d)?)
}

fn read_input(path: Option<&Path>) -> CliResult<Vec<u8>> {
    match path {
        Some(p) => with_path(p, std::fs::read(p).map_err(CliError::from)),
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => with_path(p, std::fs::write(p, bytes).map_err(CliError::from)),
        None => Ok(out.write_all(bytes)?),
    }
}

/// Parses a codebook (`#D=` header) or a plain lengths file.
fn load_lengths(path: &Path, base: LogBase) -> CliResult<(LengthVector, LogBase)> {
    let text = read_text(path)?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.starts_with("#D=") {
        let book = with_path(path, Codebook::parse_tsv(&text).map_err(CliError::from))?;
        return Ok((book.length_vector(), book.base()));
    }
    let mut lengths = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value = line.rsplit('\t').next().unwrap_or(line).trim();
        let value: f64 = value.parse().map_err(|_| CliError::File {
            path: path.display().to_string(),
            source: Box::new(
                Error::Parse {
                    line: n + 1,
                    message: format!("cannot parse length {value:?}"),
                }
                .into(),
            ),
        })?;
        lengths.push(value);
    }
    Ok((
        with_path(path, LengthVector::new(lengths).map_err(CliError::from))?,
        base,
    ))
}

/// Runs a parsed command, writing reports to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<i32> {
    match cli.command {
        Command::Entropy { dist, q, base } => cmd_entropy(&dist, q, base, out),
        Command::Escort { dist, q } => cmd_escort(&dist, q, out),
        Command::Codebook {
            dist,
            q,
            base,
            method,
            output,
        } => cmd_codebook(&dist, q, base, method, output.as_deref(), out),
        Command::Measure {
            dist,
            lengths,
            q,
            beta,
            base,
        } => cmd_measure(&dist, &lengths, q, beta, base, out),
        Command::Verify {
            trials,
            seed,
            min_n,
            max_n,
            q_grid,
            base,
            uniform,
            tolerance,
        } => {
            if trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            if min_n == 0 || min_n > max_n {
                return Err(CliError::Usage("need 1 <= --min-n <= --max-n".into()));
            }
            for &q in &q_grid {
                crate::prob::check_order(q)?;
            }
            let config = SuiteConfig {
                trials,
                seed,
                min_symbols: min_n,
                max_symbols: max_n,
                q_grid,
                base: base_of(base)?,
                tolerance,
                uniform,
            };
            cmd_verify(&config, out)
        }
        Command::Encode {
            book,
            dist,
            q,
            base,
            normalize,
            input,
            output,
        } => cmd_encode(
            book.as_deref(),
            dist.as_deref(),
            q,
            base,
            normalize,
            input.as_deref(),
            output.as_deref(),
            out,
        ),
        Command::Decode { input, output } => cmd_decode(input.as_deref(), output.as_deref(), out),
        Command::ReferenceTable => cmd_reference_table(out),
    }
}

fn cmd_entropy(args: &DistArgs, q: f64, base: u32, out: &mut dyn Write) -> CliResult<i32> {
    let p = load_distribution(args)?;
    let order = EntropyOrder::new(q, base)?;
    let base = order.base();
    let e = escort(&p, q)?;
    let mut s = format!("# q={} D={}\n", fmt_num(q), base.get());
    let _ = writeln!(s, "H_1\t{}", fmt_num(shannon_entropy(&p, base)));
    let _ = writeln!(s, "H_q\t{}", fmt_num(renyi_entropy(&p, order)));
    let _ = writeln!(s, "S_q_nats\t{}", fmt_num(tsallis_entropy_normalized(&p, q)?));
    let _ = writeln!(s, "# escort distribution");
    for (i, v) in e.probs().iter().enumerate() {
        let _ = writeln!(s, "{}\t{}", p.label(i), fmt_num(*v));
    }
    out.write_all(s.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_escort(args: &DistArgs, q: f64, out: &mut dyn Write) -> CliResult<i32> {
    let p = load_distribution(args)?;
    let e = escort(&p, q)?;
    let mut s = String::new();
    for (i, v) in e.probs().iter().enumerate() {
        let _ = writeln!(s, "{}\t{}", p.label(i), fmt_num(*v));
    }
    out.write_all(s.as_bytes())?;
    Ok(EXIT_OK)
}

/// Code for the escort of order `q` by the chosen method.
pub fn build_codebook(p: &Distribution, q: f64, base: LogBase, method: Method) -> crate::Result<Codebook> {
    match method {
        Method::Huffman => escort_huffman(p, q, base),
        Method::Shannon => {
            let lengths = ideal_lengths_shannon(&escort(p, q)?, base, true)?;
            code_from_lengths(&lengths, base)?.with_labels(p.label_list())
        }
    }
}

fn cmd_codebook(
    args: &DistArgs,
    q: f64,
    base: u32,
    method: Method,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let p = load_distribution(args)?;
    let book = build_codebook(&p, q, base_of(base)?, method)?;
    write_output(output, book.to_tsv().as_bytes(), out)?;
    Ok(EXIT_OK)
}

fn cmd_measure(
    args: &DistArgs,
    lengths_path: &Path,
    q: f64,
    beta: Option<f64>,
    base: u32,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let p = load_distribution(args)?;
    let (l, base) = load_lengths(lengths_path, base_of(base)?)?;
    let tolerance = crate::lengths::SLACK_TOLERANCE;
    let reports = verify_bounds(&p, &l, q, base, tolerance)?;

    let beta = beta.or(if q > 0.0 && q < 1.0 {
        Some((1.0 - q) / q)
    } else {
        None
    });
    let mut s = format!(
        "# q={} D={} kraft_sum={}\n",
        fmt_num(q),
        base.get(),
        fmt_num(kraft_sum(&l, base))
    );
    let _ = writeln!(s, "Lbar\t{}", fmt_num(expected_length(&p, &l)?));
    match beta {
        Some(b) => {
            let c = campbell_length(&p, &l, b, base)?;
            let _ = writeln!(s, "C_beta\t{}\tbeta={}", fmt_num(c), fmt_num(b));
        }
        None => {
            let _ = writeln!(s, "C_beta\tn/a");
        }
    }
    let _ = writeln!(s, "M_q\t{}", fmt_num(escort_mean_length(&p, &l, q)?));
    let _ = writeln!(s, "L_q\t{}", fmt_num(new_length_measure(&p, &l, q, base)?));
    let _ = writeln!(s, "# inequality\tmeasure\tbound\tslack\tstatus");
    let mut violated = false;
    for r in &reports {
        if !r.applicable {
            let _ = writeln!(s, "{}\tn/a\tn/a\tn/a\tn/a", r.inequality());
            continue;
        }
        violated |= !r.satisfied && !REPORTED_ONLY.contains(&r.inequality().as_str());
        let status = match (r.satisfied, r.equality_within_tolerance) {
            (false, _) => "VIOLATED",
            (true, true) => "equality",
            (true, false) => "holds",
        };
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            r.inequality(),
            fmt_num(r.measure_value),
            fmt_num(r.bound_value),
            fmt_num(r.slack),
            status
        );
    }
    out.write_all(s.as_bytes())?;
    Ok(if violated { EXIT_VIOLATION } else { EXIT_OK })
}

/// Renders a suite summary as the `verify` report.
pub fn format_summary(config: &SuiteConfig, summary: &crate::trials::SuiteSummary) -> String {
    let grid: Vec<String> = config.q_grid.iter().map(|&q| fmt_num(q)).collect();
    let mut s = format!(
        "# trials={} seed={} N={}..={} D={} tolerance={} q_grid={}\n",
        config.trials,
        config.seed,
        config.min_symbols,
        config.max_symbols,
        config.base.get(),
        fmt_num(config.tolerance),
        grid.join(",")
    );
    let _ = writeln!(
        s,
        "# inequality\tchecked\tpassed\tviolations\tn/a\tequalities\tworst_slack"
    );
    for t in &summary.tallies {
        let worst = if t.checked == 0 {
            "n/a".to_string()
        } else {
            fmt_num(t.worst_slack)
        };
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            t.inequality,
            t.checked,
            t.passed(),
            t.violations,
            t.not_applicable,
            t.equalities,
            worst
        );
        if t.violations > 0 {
            let by_q: Vec<String> = t
                .violations_by_q
                .iter()
                .zip(&grid)
                .filter(|(v, _)| **v > 0)
                .map(|(v, q)| format!("q={q}:{v}"))
                .collect();
            let _ = writeln!(s, "#   violations by order: {}", by_q.join(" "));
        }
        if REPORTED_ONLY.contains(&t.inequality) {
            let _ = writeln!(s, "#   conditional bound: reported, not counted");
        }
    }
    let total = summary.total_violations();
    let _ = writeln!(
        s,
        "{}",
        if total == 0 {
            "PASS".to_string()
        } else {
            format!("FAIL ({total} violations)")
        }
    );
    s
}

fn cmd_verify(config: &SuiteConfig, out: &mut dyn Write) -> CliResult<i32> {
    let summary = run_suite(config)?;
    out.write_all(format_summary(config, &summary).as_bytes())?;
    Ok(if summary.total_violations() == 0 {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

/// Symbol index of each byte under `labels`, which must be decimal byte values.
fn byte_symbol_map(labels: &[String]) -> CliResult<[Option<usize>; 256]> {
    let mut map = [None; 256];
    for (i, label) in labels.iter().enumerate() {
        let b: u8 = label
            .parse()
            .map_err(|_| CliError::Usage(format!("label {label:?} is not a byte value 0-255")))?;
        map[b as usize] = Some(i);
    }
    Ok(map)
}

#[allow(clippy::too_many_arguments)]
fn cmd_encode(
    book: Option<&Path>,
    dist: Option<&Path>,
    q: f64,
    base: u32,
    normalize: bool,
    input: Option<&Path>,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let data = read_input(input)?;
    let base = base_of(base)?;
    let book = match (book, dist) {
        (Some(path), _) => with_path(
            path,
            Codebook::parse_tsv(&read_text(path)?).map_err(CliError::from),
        )?,
        (None, Some(path)) => {
            let args = DistArgs {
                dist: path.to_path_buf(),
                normalize,
                tolerance: CONSTRUCTION_TOLERANCE,
            };
            escort_huffman(&load_distribution(&args)?, q, base)?
        }
        (None, None) => empirical_codebook(&data, q, base)?,
    };
    let map = byte_symbol_map(book.labels())?;
    let symbols = data
        .iter()
        .map(|&b| map[b as usize].ok_or_else(|| CliError::Usage(format!("byte {b} has no codeword"))))
        .collect::<CliResult<Vec<usize>>>()?;
    let stream = encode(&symbols, &book)?;
    write_output(output, &stream.to_bytes(), out)?;
    Ok(EXIT_OK)
}

/// Escort Huffman code over the bytes present in `data`, by frequency.
fn empirical_codebook(data: &[u8], q: f64, base: LogBase) -> crate::Result<Codebook> {
    let mut counts = [0u64; 256];
    for &b in data {
        counts[b as usize] += 1;
    }
    let present: Vec<usize> = (0..256).filter(|&b| counts[b] > 0).collect();
    if present.is_empty() {
        return Codebook::new(base, Vec::new(), None);
    }
    let p = Distribution::new(present.iter().map(|&b| counts[b] as f64).collect(), true, 0.0)?
        .with_labels(present.iter().map(|b| b.to_string()).collect())?;
    escort_huffman(&p, q, base)
}

fn cmd_decode(input: Option<&Path>, output: Option<&Path>, out: &mut dyn Write) -> CliResult<i32> {
    let bytes = read_input(input)?;
    let stream = EncodedStream::from_bytes(&bytes)?;
    let symbols = decode(&stream)?;
    let map: Vec<u8> = stream
        .codebook
        .labels()
        .iter()
        .map(|l| {
            l.parse::<u8>()
                .map_err(|_| CliError::Usage(format!("label {l:?} is not a byte value 0-255")))
        })
        .collect::<CliResult<_>>()?;
    let data: Vec<u8> = symbols.into_iter().map(|s| map[s]).collect();
    write_output(output, &data, out)?;
    Ok(EXIT_OK)
}

/// Renders the reference-code comparison; returns the text and whether all columns passed.
pub fn format_reference_table(columns: &[reference::ColumnReport]) -> (String, bool) {
    let p = reference::REFERENCE_PROBS;
    let mut s = String::from("p_i");
    for c in columns {
        let _ = write!(s, "\tq={}", c.q);
    }
    s.push('\n');
    for (i, pi) in p.iter().enumerate() {
        let _ = write!(s, "{pi}");
        for c in columns {
            let _ = write!(s, "\t{}", c.codewords[i]);
        }
        s.push('\n');
    }
    let mut all = true;
    for c in columns {
        let mut lengths = c.lengths.clone();
        lengths.sort_unstable();
        let set: Vec<String> = lengths.iter().map(u32::to_string).collect();
        let pass = c.passed();
        all &= pass;
        let _ = writeln!(
            s,
            "q={}\tlengths={{{}}}\tM_q={}\tM_q(reference)={}\tcodewords_match={}\t{}",
            c.q,
            set.join(","),
            fmt_num(c.mean_produced),
            fmt_num(c.mean_reference),
            c.codewords_match,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    (s, all)
}

fn cmd_reference_table(out: &mut dyn Write) -> CliResult<i32> {
    let (s, all) = format_reference_table(&reference::reproduce()?);
    out.write_all(s.as_bytes())?;
    Ok(if all { EXIT_OK } else { EXIT_VIOLATION })
}
