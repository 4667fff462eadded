//! Command-line front end: `simulate` and `demo`.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channel::ChannelOutput;
use crate::code::{Code, Payload};
use crate::decoder::{Decoder, DEFAULT_PATH_CAP};
use crate::error::{Error, Result};
use crate::llc::LlcSpec;
use crate::metrics::{Estimate, MetricsRow};
use crate::tree::{TreeSpec, DEFAULT_PROFILE};

pub const CSV_HEADER: [&str; 16] = [
    "code", "K", "pe", "B", "L", "J", "M", "trials", "seed", "pdp", "php", "pdp_ci95", "php_ci95",
    "avg_khat", "collisions", "elapsed_ms",
];

#[derive(Debug, Parser)]
#[command(name = "uace", version, about = "Codes and simulations for the unsourced A-channel with erasures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate PDP and PHP for every (K, p_e) pair and append CSV rows.
    Simulate(SimulateArgs),
    /// Encode one payload, erase a section, decode, and explain the result.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeKind {
    Llc,
    Tc,
}

impl CodeKind {
    fn label(self) -> &'static str {
        match self {
            CodeKind::Llc => "llc",
            CodeKind::Tc => "tc",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CodeArgs {
    #[arg(long, value_enum, default_value = "llc")]
    pub code: CodeKind,
    /// Payload bits.
    #[arg(long = "b", default_value_t = 128)]
    pub payload_bits: usize,
    /// Sections.
    #[arg(long = "l", default_value_t = 16)]
    pub sections: usize,
    /// Bits per section.
    #[arg(long = "j", default_value_t = 16)]
    pub section_bits: usize,
    /// Memory depth (llc).
    #[arg(long = "m-depth", default_value_t = 2)]
    pub memory: usize,
    /// Information bits per section (tc), comma separated.
    #[arg(long = "m-profile", value_delimiter = ',')]
    pub profile: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Active users, comma separated for a sweep.
    #[arg(long = "k", value_delimiter = ',', default_value = "100")]
    pub users: Vec<usize>,
    /// Erasure probabilities, comma separated for a sweep.
    #[arg(long = "pe", value_delimiter = ',', required = true)]
    pub erasure_probs: Vec<f64>,
    #[arg(long, default_value_t = 400)]
    pub trials: usize,
    /// Seeds both the code construction and the trials.
    #[arg(long, required = true)]
    pub seed: u64,
    /// CSV file to append to.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long = "path-cap", default_value_t = DEFAULT_PATH_CAP)]
    pub path_cap: usize,
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Payload as hex, first nibble holds the first bits.
    #[arg(long)]
    pub payload: String,
    /// Section to erase.
    #[arg(long)]
    pub erase: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub enum BuiltCode {
    Llc(LlcSpec),
    Tree(TreeSpec),
}

impl BuiltCode {
    pub fn as_code(&self) -> &dyn Code {
        match self {
            BuiltCode::Llc(c) => c,
            BuiltCode::Tree(c) => c,
        }
    }
}

impl CodeArgs {
    pub fn build(&self, seed: u64) -> Result<BuiltCode> {
        match self.code {
            CodeKind::Llc => {
                if self.profile.is_some() {
                    return Err(Error::invalid("--m-profile only applies to --code tc"));
                }
                if self.sections == 0 || !self.payload_bits.is_multiple_of(self.sections) {
                    return Err(Error::invalid(format!(
                        "B = {} is not a multiple of L = {}",
                        self.payload_bits, self.sections
                    )));
                }
                let m = self.payload_bits / self.sections;
                Ok(BuiltCode::Llc(LlcSpec::new(
                    self.sections,
                    self.section_bits,
                    m,
                    self.memory,
                    seed,
                )?))
            }
            CodeKind::Tc => {
                let profile = match &self.profile {
                    Some(p) => p.clone(),
                    None if self.sections == 16 && self.section_bits == 16 && self.payload_bits == 128 => {
                        DEFAULT_PROFILE.to_vec()
                    }
                    None => {
                        return Err(Error::invalid(
                            "--m-profile is required unless B=128, L=16, J=16",
                        ))
                    }
                };
                if profile.len() != self.sections {
                    return Err(Error::invalid(format!(
                        "profile has {} entries for {} sections",
                        profile.len(),
                        self.sections
                    )));
                }
                Ok(BuiltCode::Tree(TreeSpec::with_payload(
                    self.payload_bits,
                    self.section_bits,
                    profile,
                    seed,
                )?))
            }
        }
    }
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let sci = format!("{:.*e}", digits - 1, x);
    // Rounding may bump the exponent (e.g. 9.999995 -> 1.00000e1).
    let exp = sci
        .split('e')
        .nth(1)
        .and_then(|e| e.parse::<i32>().ok())
        .unwrap_or(exp);
    if exp < -4 || exp >= digits as i32 {
        let (mantissa, _) = sci.split_once('e').unwrap();
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub struct CsvRow<'a> {
    pub code: &'a dyn Code,
    pub users: usize,
    pub erasure_prob: f64,
    pub seed: u64,
    pub metrics: MetricsRow,
    pub elapsed_ms: u128,
}

impl CsvRow<'_> {
    pub fn fields(&self) -> Vec<String> {
        let m = &self.metrics;
        vec![
            self.code.name().to_string(),
            self.users.to_string(),
            format_sig(self.erasure_prob, 6),
            self.code.payload_bits().to_string(),
            self.code.sections().to_string(),
            self.code.section_bits().to_string(),
            self.code.memory().map_or(String::new(), |d| d.to_string()),
            m.trials.to_string(),
            self.seed.to_string(),
            format_sig(m.pdp, 6),
            format_sig(m.php, 6),
            format_sig(m.pdp_ci95, 6),
            format_sig(m.php_ci95, 6),
            format_sig(m.avg_khat, 6),
            m.collisions.to_string(),
            self.elapsed_ms.to_string(),
        ]
    }
}

fn append_rows(path: &PathBuf, rows: &[Vec<String>]) -> std::io::Result<()> {
    let needs_header = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if needs_header {
        writer.write_record(CSV_HEADER)?;
    }
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()
}

pub fn cmd_simulate(args: &SimulateArgs) -> std::result::Result<Vec<MetricsRow>, String> {
    let built = args.code.build(args.seed).map_err(|e| e.to_string())?;
    let code = built.as_code();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = args.workers {
        if w == 0 {
            return Err("--workers must be at least 1".into());
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| e.to_string())?;
    eprintln!(
        "simulate: code={} B={} L={} J={} trials={} seed={}",
        args.code.code.label(),
        code.payload_bits(),
        code.sections(),
        code.section_bits(),
        args.trials,
        args.seed
    );

    let mut rows = Vec::new();
    for &users in &args.users {
        for &pe in &args.erasure_probs {
            let start = Instant::now();
            let estimate = Estimate::new(users, pe, args.trials, args.seed).with_path_cap(args.path_cap);
            let metrics = pool.install(|| estimate.run(code)).map_err(|e| e.to_string())?;
            let row = CsvRow {
                code,
                users,
                erasure_prob: pe,
                seed: args.seed,
                metrics,
                elapsed_ms: start.elapsed().as_millis(),
            };
            println!(
                "{} K={users} pe={} pdp={} (±{}) php={} (±{}) avg_khat={}",
                code.name(),
                format_sig(pe, 6),
                format_sig(metrics.pdp, 6),
                format_sig(metrics.pdp_ci95, 3),
                format_sig(metrics.php, 6),
                format_sig(metrics.php_ci95, 3),
                format_sig(metrics.avg_khat, 6),
            );
            if let Some(path) = &args.out {
                append_rows(path, &[row.fields()]).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            rows.push(metrics);
        }
    }
    Ok(rows)
}

pub fn cmd_demo(args: &DemoArgs, out: &mut dyn Write) -> std::result::Result<(), String> {
    let built = args.code.build(args.seed).map_err(|e| e.to_string())?;
    let code = built.as_code();
    let payload = Payload::from_hex(&args.payload, code.payload_bits()).map_err(|e| e.to_string())?;
    let codeword = code.encode(&payload).map_err(|e| e.to_string())?;
    let io = |e: std::io::Error| e.to_string();

    writeln!(
        out,
        "{} code: B={} L={} J={}{}",
        code.name(),
        code.payload_bits(),
        code.sections(),
        code.section_bits(),
        code.memory().map_or(String::new(), |d| format!(" M={d}"))
    )
    .map_err(io)?;
    writeln!(out, "payload {}", payload.to_hex()).map_err(io)?;
    for (l, s) in codeword.sections().iter().enumerate() {
        let info = match &built {
            BuiltCode::Llc(c) => c.info_bits(),
            BuiltCode::Tree(c) => c.profile()[l],
        };
        let row = s.to_row(code.section_bits());
        let marker = if args.erase == Some(l) { "  <- erased" } else { "" };
        writeln!(
            out,
            "section {l:>2}: {} | {}{marker}",
            row.slice(0, info),
            row.slice(info, code.section_bits() - info)
        )
        .map_err(io)?;
    }

    if let Some(e) = args.erase {
        if e >= code.sections() {
            return Err(format!("cannot erase section {e} of {}", code.sections()));
        }
    }
    let lists = codeword
        .sections()
        .iter()
        .enumerate()
        .map(|(l, &s)| if args.erase == Some(l) { vec![] } else { vec![s] })
        .collect();
    let output = ChannelOutput::new(code.section_bits(), lists);

    let (decoded, phase2) = match &built {
        BuiltCode::Llc(c) => {
            let r = Decoder::new(c).decode(&output).map_err(|e| e.to_string())?;
            (r.decoded, r.phase2_count > 0)
        }
        BuiltCode::Tree(c) => (c.decode(&output).map_err(|e| e.to_string())?.decoded, false),
    };
    match (decoded.contains(&payload), phase2) {
        (true, false) => writeln!(out, "decoded in phase 1 (no erasure)"),
        (true, true) => writeln!(
            out,
            "decoded in phase 2: section {} recovered from its neighbours' parities",
            args.erase.unwrap_or_default()
        ),
        (false, _) if args.erase == Some(0) => {
            writeln!(out, "unrecoverable: section 0 was erased, so no path can start from it")
        }
        (false, _) => writeln!(out, "unrecoverable: payload not in the decoded list"),
    }
    .map_err(io)?;
    for extra in decoded.iter().filter(|w| **w != payload) {
        writeln!(out, "also decoded {}", extra.to_hex()).map_err(io)?;
    }
    Ok(())
}

/// Parses arguments and runs a subcommand; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a).map(|_| ()),
        Command::Demo(a) => cmd_demo(a, &mut std::io::stdout()),
    };
    match result {
        Ok(()) => 0,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(format_sig(0.226875, 6), "0.226875");
        assert_eq!(format_sig(0.0787512345, 6), "0.0787512");
        assert_eq!(format_sig(1.0, 6), "1");
        assert_eq!(format_sig(100.0, 6), "100");
        assert_eq!(format_sig(0.05, 6), "0.05");
        assert_eq!(format_sig(0.00001234567, 6), "1.23457e-05");
        assert_eq!(format_sig(0.9999999, 6), "1");
    }

    #[test]
    fn seed_is_mandatory() {
        assert!(Cli::try_parse_from(["uace", "simulate", "--pe", "0.1"]).is_err());
        assert!(Cli::try_parse_from(["uace", "simulate", "--pe", "0.1", "--seed", "3"]).is_ok());
    }

    #[test]
    fn sweep_lists_parse() {
        let cli = Cli::try_parse_from([
            "uace", "simulate", "--pe", "0,0.025,0.05", "--k", "50,150", "--seed", "1",
        ])
        .unwrap();
        let Command::Simulate(a) = cli.command else { panic!() };
        assert_eq!(a.erasure_probs, vec![0.0, 0.025, 0.05]);
        assert_eq!(a.users, vec![50, 150]);
    }

    #[test]
    fn llc_rejects_profile_and_bad_b() {
        let mut args = CodeArgs {
            code: CodeKind::Llc,
            payload_bits: 128,
            sections: 16,
            section_bits: 16,
            memory: 2,
            profile: Some(vec![8; 16]),
        };
        assert!(args.build(0).is_err());
        args.profile = None;
        args.payload_bits = 127;
        assert!(args.build(0).is_err());
        args.payload_bits = 128;
        assert!(args.build(0).is_ok());
    }
}
