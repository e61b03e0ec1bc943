//! Command implementations behind the `pairedconv` binary. Each command is a
//! plain function so it can be driven from tests without spawning a process.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use pairedconv::conv_schemes::{
    channel_oracle_check, check_identities, ConvolutionScheme, SchemeId,
};
use pairedconv::image_pipeline::{
    process_rows, simulate_measured_image, to_display, DisplayPolicy, Selection, WidthPolicy,
};
use pairedconv::instrument::{count_additions, Counted};
use pairedconv::oracle::dpt_naive;
use pairedconv::paired_transform::{
    dpt_forward, dpt_forward_in, dpt_forward_unitary, dpt_matrix, dpt_unitary, Signal,
};
use pairedconv::pgm::{load_pgm, save_pgm, PgmError};
use pairedconv::qsim::{
    apply_qpt_suffix, measure, prepare_conv_superposition, qpt_circuit, Histogram,
    SuperpositionMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Invalid(#[from] pairedconv::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Pgm { path: PathBuf, source: PgmError },

    #[error("verification failed")]
    Verification,
}

impl CliError {
    /// 2 for parse/input errors, 3 for I/O, 4 for failed verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Invalid(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Pgm { source, .. } => match source {
                PgmError::Io(_) => 3,
                _ => 2,
            },
            CliError::Verification => 4,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

fn pgm_err(path: &Path) -> impl FnOnce(PgmError) -> CliError + '_ {
    move |source| CliError::Pgm {
        path: path.to_owned(),
        source,
    }
}

/// Formats a number without a trailing `.0` and without negative zero.
pub fn fmt_num(v: f64) -> String {
    format!("{}", v + 0.0)
}

fn join_nums(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt_num(v))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>, CliError> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| CliError::Parse(format!("not a number: `{tok}`")))
        })
        .collect()
}

/// Integer spectrum on the first line, orthonormal spectrum on the second;
/// with `csv`, one `index,integer,unitary` row per coefficient.
pub fn cmd_dpt(text: &str, csv: bool) -> Result<String, CliError> {
    let x = parse_vector(text)?;
    let c = dpt_forward(&x)?;
    let u = dpt_forward_unitary(&x)?;
    if csv {
        let mut out = String::from("index,integer,unitary\n");
        for (i, (a, b)) in c.iter().zip(&u).enumerate() {
            writeln!(out, "{i},{},{}", fmt_num(*a), fmt_num(*b)).unwrap();
        }
        Ok(out)
    } else {
        Ok(format!("{}\n{}\n", join_nums(&c), join_nums(&u)))
    }
}

fn lift_term_display(offset: isize, weight: i64) -> String {
    let arg = match offset {
        0 => "f(n)".to_owned(),
        o => format!("f(n{o:+})"),
    };
    match weight {
        1 => arg,
        -1 => format!("-{arg}"),
        w => format!("{w}{arg}"),
    }
}

/// Tab-separated catalog of every scheme: its lift, then one row per channel.
pub fn list_schemes() -> String {
    let mut out = String::from("scheme\tqubits\tlift\n");
    for id in SchemeId::ALL {
        let s = id.scheme();
        let lift: Vec<String> = s
            .lift
            .iter()
            .map(|t| lift_term_display(t.offset, t.weight))
            .collect();
        writeln!(out, "{id}\t{}\t({})", s.qubits, lift.join(", ")).unwrap();
    }
    out.push_str("\nscheme\tchannel\tkind\tscale\tmask\tname\n");
    for id in SchemeId::ALL {
        for c in &id.scheme().channels {
            writeln!(
                out,
                "{id}\tc{}\t{}\t{}\t{}\t{}",
                c.index,
                c.kind.as_str(),
                c.scale,
                c.mask_display(),
                c.name
            )
            .unwrap();
        }
    }
    out
}

fn file_stem(input: &Path) -> String {
    input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_owned())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

#[derive(Debug, Clone)]
pub struct EdgeOptions {
    pub input: PathBuf,
    pub scheme: SchemeId,
    /// `None` selects every channel that is not identically zero.
    pub channels: Option<Vec<usize>>,
    pub display: DisplayPolicy,
    pub width: WidthPolicy,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeOutput {
    pub channel_files: Vec<(usize, PathBuf)>,
    pub manifest: PathBuf,
}

/// Writes `<stem>.c<k>.pgm` per selected channel plus `<stem>.manifest.tsv`.
pub fn cmd_edge(opts: &EdgeOptions) -> Result<EdgeOutput, CliError> {
    let img = load_pgm(&opts.input).map_err(pgm_err(&opts.input))?;
    let scheme = opts.scheme.scheme();
    let channels = match &opts.channels {
        Some(list) => {
            if let Some(&bad) = list.iter().find(|&&k| k >= scheme.len()) {
                return Err(CliError::Parse(format!(
                    "channel {bad} does not exist in {} ({} channels)",
                    scheme.id,
                    scheme.len()
                )));
            }
            list.clone()
        }
        None => scheme.nonzero_channels(),
    };
    let set = process_rows(&img, scheme, opts.width)?;
    ensure_dir(&opts.out_dir)?;
    let stem = file_stem(&opts.input);

    let mut manifest = format!(
        "# scheme {} on {} ({}x{}), display {:?}\nchannel\tfile\tkind\tscale\tmask\tmin\tmax\tname\n",
        scheme.id,
        opts.input.display(),
        img.width(),
        img.height(),
        opts.display
    );
    let mut files = Vec::with_capacity(channels.len());
    for k in channels {
        let path = opts.out_dir.join(format!("{stem}.c{k}.pgm"));
        save_pgm(&set.display(k, opts.display), &path).map_err(pgm_err(&path))?;
        let spec = scheme.channel(k);
        let (lo, hi) = set.range(k);
        writeln!(
            manifest,
            "c{k}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            path.file_name().unwrap().to_string_lossy(),
            spec.kind.as_str(),
            spec.scale,
            spec.mask_display(),
            fmt_num(lo),
            fmt_num(hi),
            spec.name
        )
        .unwrap();
        log::info!("wrote {}", path.display());
        files.push((k, path));
    }
    let manifest_path = opts.out_dir.join(format!("{stem}.manifest.tsv"));
    fs::write(&manifest_path, manifest).map_err(io_err(&manifest_path))?;
    Ok(EdgeOutput {
        channel_files: files,
        manifest: manifest_path,
    })
}

#[derive(Debug, Clone)]
pub struct MeasureOptions {
    pub input: PathBuf,
    pub scheme: SchemeId,
    pub selection: Selection,
    pub seed: u64,
    pub display: DisplayPolicy,
    pub width: WidthPolicy,
    pub out_dir: PathBuf,
}

/// Writes `<stem>.measured.pgm`.
pub fn cmd_measure_sim(opts: &MeasureOptions) -> Result<PathBuf, CliError> {
    let img = load_pgm(&opts.input).map_err(pgm_err(&opts.input))?;
    let measured = simulate_measured_image(
        &img,
        opts.scheme.scheme(),
        opts.selection,
        opts.seed,
        opts.width,
    )?;
    ensure_dir(&opts.out_dir)?;
    let path = opts
        .out_dir
        .join(format!("{}.measured.pgm", file_stem(&opts.input)));
    save_pgm(&to_display(&measured, opts.display), &path).map_err(pgm_err(&path))?;
    Ok(path)
}

#[derive(Debug, Clone)]
pub struct SignalMeasureOptions {
    pub input: PathBuf,
    pub scheme: SchemeId,
    pub mode: SuperpositionMode,
    pub shots: u64,
    pub seed: u64,
    /// Zero-pad the signal to a power-of-two length instead of rejecting it.
    pub pad: bool,
    pub out: Option<PathBuf>,
}

/// Prepares the convolution superposition of a 1-D signal, applies the
/// suffix QPT, samples the full register, and optionally writes the CSV.
pub fn cmd_measure_signal(opts: &SignalMeasureOptions) -> Result<Histogram, CliError> {
    let text = fs::read_to_string(&opts.input).map_err(io_err(&opts.input))?;
    let values = parse_vector(&text)?;
    let f = if opts.pad {
        Signal::zero_padded(values)
    } else {
        Signal::new(values)?
    };
    let scheme = opts.scheme.scheme();
    let prepared = prepare_conv_superposition(scheme, &f, opts.mode)?;
    if !prepared.zero_prefixes.is_empty() {
        log::warn!(
            "positions with an all-zero window: {:?}",
            prepared.zero_prefixes
        );
    }
    let state = apply_qpt_suffix(prepared.state, scheme.qubits)?;
    let hist = measure(&state, opts.shots, opts.seed)?;
    if let Some(out) = &opts.out {
        fs::write(out, hist.to_csv()).map_err(io_err(out))?;
    }
    Ok(hist)
}

/// Outcome of [`cmd_verify`]: one line per check.
#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub lines: Vec<String>,
    pub failures: usize,
}

impl VerifyReport {
    fn record(&mut self, ok: bool, what: impl AsRef<str>) {
        let tag = if ok { "PASS" } else { "FAIL" };
        self.lines.push(format!("{tag} {}", what.as_ref()));
        if !ok {
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub const VERIFY_SIGNALS: usize = 100;

/// Runs the channel oracles and identities for `schemes`, plus the
/// transform-level checks (fast vs naive, orthonormality, circuits).
pub fn cmd_verify(schemes: &[ConvolutionScheme], seed: u64) -> VerifyReport {
    let mut report = VerifyReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signals: Vec<Signal> = (0..VERIFY_SIGNALS)
        .map(|_| random_signal(&mut rng, 16))
        .collect();

    for scheme in schemes {
        let failure = signals
            .iter()
            .find_map(|f| channel_oracle_check(scheme, f).err());
        match failure {
            None => report.record(
                true,
                format!(
                    "{} channel oracle ({} channels, {} signals)",
                    scheme.id,
                    scheme.len(),
                    signals.len()
                ),
            ),
            Some(e) => report.record(false, e.to_string()),
        }
        for identity in &scheme.identities {
            let single = ConvolutionScheme {
                identities: vec![*identity],
                ..scheme.clone()
            };
            let failure = signals
                .iter()
                .find_map(|f| check_identities(&single, f).err());
            match failure {
                None => report.record(true, format!("{} identity {identity}", scheme.id)),
                Some(e) => report.record(false, e.to_string()),
            }
        }
    }

    for r in 2..=10 {
        let n = 1usize << r;
        let ok = (0..10).all(|_| {
            let x: Vec<f64> = (0..n)
                .map(|_| f64::from(rng.random_range(-255..=255)))
                .collect();
            dpt_forward(&x).ok() == dpt_naive(&x).ok()
        });
        report.record(ok, format!("fast DPT equals matrix product, N = {n}"));
    }
    for n in [4usize, 8, 16, 32] {
        let err = dpt_unitary(n).map(|m| m.orthonormality_error());
        let ok = matches!(err, Ok(e) if e < 1e-12);
        report.record(ok, format!("orthonormal DPT, N = {n}"));
    }
    for k in 1..=4 {
        let ok = circuit_error(k).is_some_and(|(err, hadamards)| err < 1e-12 && hadamards == k);
        report.record(
            ok,
            format!("QPT circuit equals orthonormal DPT, {k} qubits, {k} H gates"),
        );
    }
    report
}

/// Max entry difference between the gate-level QPT and the DPT matrix, and
/// the circuit's Hadamard count.
pub fn circuit_error(k: usize) -> Option<(f64, usize)> {
    let circuit = qpt_circuit(k).ok()?;
    let u = circuit.unitary().ok()?;
    let m = dpt_unitary(1 << k).ok()?;
    let mut worst = 0.0f64;
    for (i, row) in u.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((v - m.get(i, j)).norm());
        }
    }
    Some((worst, circuit.hadamard_count()))
}

fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Signal {
    Signal::new(
        (0..n)
            .map(|_| f64::from(rng.random_range(0..=255)))
            .collect(),
    )
    .expect("power-of-two length")
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    /// Mean nanoseconds per transform.
    pub fast_ns: f64,
    pub naive_ns: f64,
    pub additions: usize,
}

/// Times the fast DPT against a prebuilt-matrix product for each size.
pub fn cmd_bench(sizes: &[usize], reps: usize, seed: u64) -> Result<Vec<BenchRow>, CliError> {
    let reps = reps.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .map(|&n| {
            let matrix = dpt_matrix(n)?;
            let x: Vec<f64> = (0..n)
                .map(|_| f64::from(rng.random_range(-255..=255)))
                .collect();
            let counted: Vec<Counted> = x.iter().map(|&v| Counted(v as i64)).collect();
            let (_, additions) = count_additions(|| dpt_forward_in(&counted));

            let start = Instant::now();
            for _ in 0..reps {
                std::hint::black_box(dpt_forward(std::hint::black_box(&x))?);
            }
            let fast_ns = start.elapsed().as_nanos() as f64 / reps as f64;

            let start = Instant::now();
            for _ in 0..reps {
                std::hint::black_box(matrix.apply(std::hint::black_box(&x)));
            }
            let naive_ns = start.elapsed().as_nanos() as f64 / reps as f64;
            Ok(BenchRow {
                n,
                fast_ns,
                naive_ns,
                additions,
            })
        })
        .collect()
}

pub fn format_bench(rows: &[BenchRow]) -> String {
    let mut out = String::from("N\tfast_ns\tnaive_ns\tadditions\texpected\n");
    for r in rows {
        writeln!(
            out,
            "{}\t{:.1}\t{:.1}\t{}\t{}",
            r.n,
            r.fast_ns,
            r.naive_ns,
            r.additions,
            2 * r.n - 2
        )
        .unwrap();
    }
    out
}

/// Parses `4,8,16` or a range `4..1024` (powers of two in between).
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Parse(format!("bad size list `{spec}`"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        let mut n = lo.max(2).next_power_of_two();
        let mut out = Vec::new();
        while n <= hi {
            out.push(n);
            n *= 2;
        }
        if out.is_empty() {
            return Err(bad());
        }
        Ok(out)
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
            .collect()
    }
}
