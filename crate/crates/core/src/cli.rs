//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::analysis::{self, RedundancyPoint};
use crate::bitio::{BitReader, BitWriter};
use crate::cminus::signature_length_row;
use crate::codec::CodeFamily;
use crate::error::Error as CodeError;
use crate::fringe2::top_code_params;
use crate::oracle::{self, OracleRun};

pub const MAGIC: &[u8; 4] = b"TDGD";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("odd number of integers ({0}); input is read as pairs")]
    OddSymbolCount(usize),

    #[error("cannot parse {token:?} at byte offset {offset} as a nonnegative integer")]
    ParseError { token: String, offset: usize },

    #[error("invalid family parameters: {0}")]
    InvalidFamilyParam(String),

    #[error("not a TDGD stream (bad magic or header)")]
    BadMagic,

    #[error("unsupported stream version {0}")]
    BadVersion(u8),

    #[error("stream has data after the last pair")]
    TrailingGarbage,

    #[error(transparent)]
    Code(#[from] CodeError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidFamilyParam(_) => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Ck,
    Cminus,
    Limit,
    Golomb,
}

#[derive(Parser, Debug)]
#[command(
    name = "tdgd",
    version,
    about = "Optimal prefix codes for pairs of geometric integers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode whitespace-separated integers, read as pairs
    Encode {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        k: Option<u64>,
        /// Input file (stdin when absent)
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode a stream written by `encode`, one pair per line
    Decode {
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Top-code parameters and profiles of C_k
    Params {
        #[arg(long, default_value_t = 1)]
        k_min: u64,
        #[arg(long, default_value_t = 10)]
        k_max: u64,
    },
    /// Per-signature codeword lengths of C_-k
    Lengths {
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 0)]
        s_min: u64,
        #[arg(long, default_value_t = 16)]
        s_max: u64,
    },
    /// Redundancy table over a grid of q, as CSV
    Sweep {
        #[arg(long, default_value_t = 0.05)]
        q_lo: f64,
        #[arg(long, default_value_t = 0.95)]
        q_hi: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        /// Add the truncated-Huffman estimate of the optimum
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average length of the Huffman code of the truncated source
    Oracle {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Where two families have equal average length
    Crossover {
        #[arg(long, default_value = "limit")]
        a: String,
        #[arg(long, default_value = "ck:1")]
        b: String,
        #[arg(long, default_value_t = 0.25)]
        lo: f64,
        #[arg(long, default_value_t = 0.45)]
        hi: f64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Pick a code from the sample mean of the integers
    Select {
        #[arg(long)]
        mean: f64,
    },
}

pub fn family_from_args(family: FamilyArg, k: Option<u64>) -> CliResult<CodeFamily> {
    let need_k = |k: Option<u64>| {
        k.ok_or_else(|| CliError::InvalidFamilyParam("this family needs --k".into()))
    };
    let f = match family {
        FamilyArg::Ck => CodeFamily::Ck(need_k(k)?),
        FamilyArg::Cminus => CodeFamily::Cminus(need_k(k)?),
        FamilyArg::Golomb => CodeFamily::GolombPair(need_k(k)?),
        FamilyArg::Limit => match k {
            None | Some(0) => CodeFamily::Limit,
            Some(_) => {
                return Err(CliError::InvalidFamilyParam(
                    "the limit code takes no --k".into(),
                ))
            }
        },
    };
    f.validate()
        .map_err(|e| CliError::InvalidFamilyParam(e.to_string()))?;
    if f.k().unwrap_or(0) > u64::from(u16::MAX) {
        return Err(CliError::InvalidFamilyParam("k must fit in 16 bits".into()));
    }
    Ok(f)
}

fn family_byte(f: CodeFamily) -> u8 {
    match f {
        CodeFamily::Ck(_) => 1,
        CodeFamily::Cminus(_) => 2,
        CodeFamily::Limit => 3,
        CodeFamily::GolombPair(_) => 4,
    }
}

pub fn write_header(out: &mut Vec<u8>, family: CodeFamily, pairs: u64) {
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(family_byte(family));
    out.extend_from_slice(&(family.k().unwrap_or(0) as u16).to_le_bytes());
    out.extend_from_slice(&pairs.to_le_bytes());
}

pub fn read_header(data: &[u8]) -> CliResult<(CodeFamily, u64)> {
    if data.len() < HEADER_LEN || &data[..4] != MAGIC {
        return Err(CliError::BadMagic);
    }
    if data[4] != VERSION {
        return Err(CliError::BadVersion(data[4]));
    }
    let k = u64::from(u16::from_le_bytes([data[6], data[7]]));
    let family = match data[5] {
        1 => CodeFamily::Ck(k),
        2 => CodeFamily::Cminus(k),
        3 if k == 0 => CodeFamily::Limit,
        4 => CodeFamily::GolombPair(k),
        _ => return Err(CliError::BadMagic),
    };
    family.validate().map_err(|_| CliError::BadMagic)?;
    let pairs = u64::from_le_bytes(data[8..16].try_into().expect("eight bytes"));
    Ok((family, pairs))
}

/// Parses whitespace-separated nonnegative integers into pairs.
pub fn parse_pairs(text: &str) -> CliResult<Vec<(u64, u64)>> {
    let mut values = Vec::new();
    let mut offset = 0;
    for token in text.split_ascii_whitespace() {
        // locate the token to report its offset
        let start = offset + text[offset..].find(token).unwrap_or(0);
        offset = start + token.len();
        let v = token.parse::<u64>().map_err(|_| CliError::ParseError {
            token: token.to_string(),
            offset: start,
        })?;
        values.push(v);
    }
    if values.len() % 2 != 0 {
        return Err(CliError::OddSymbolCount(values.len()));
    }
    Ok(values.chunks_exact(2).map(|p| (p[0], p[1])).collect())
}

pub fn encode_stream(family: CodeFamily, pairs: &[(u64, u64)]) -> CliResult<(Vec<u8>, u64)> {
    let codec = family.codec()?;
    let mut w = BitWriter::new();
    for &p in pairs {
        codec.encode_into(&mut w, p)?;
    }
    let bits = w.bit_len();
    let mut out = Vec::with_capacity(HEADER_LEN);
    write_header(&mut out, family, pairs.len() as u64);
    out.extend_from_slice(&w.finish());
    Ok((out, bits))
}

pub fn decode_stream(data: &[u8]) -> CliResult<(CodeFamily, Vec<(u64, u64)>)> {
    let (family, count) = read_header(data)?;
    let codec = family.codec()?;
    let mut r = BitReader::new(&data[HEADER_LEN..]);
    let mut pairs = Vec::new();
    for _ in 0..count {
        pairs.push(codec.decode(&mut r)?);
    }
    if r.remaining() >= 8 || !r.rest_is_zero() {
        return Err(CliError::TrailingGarbage);
    }
    Ok((family, pairs))
}

fn read_input(path: Option<&PathBuf>, stdin: &mut dyn Read) -> CliResult<Vec<u8>> {
    Ok(match path {
        Some(p) => fs::read(p)?,
        None => {
            let mut buf = Vec::new();
            stdin.read_to_end(&mut buf)?;
            buf
        }
    })
}

fn write_output(path: Option<&PathBuf>, data: &[u8], stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, data)?,
        None => stdout.write_all(data)?,
    }
    Ok(())
}

pub fn params_table(k_min: u64, k_max: u64) -> CliResult<String> {
    let mut out = String::from("k\tM\tj\tr\tsigma\tc\tprofile\n");
    for k in k_min.max(1)..=k_max {
        let p = top_code_params(k)?;
        let [a, b, c] = p.profile.counts;
        out.push_str(&format!(
            "{k}\t{}\t{}\t{}\t{}\t{}\t({a},{b},{c})",
            p.big_m, p.j, p.r, p.sigma, p.c
        ));
        if k == 1 {
            out.push_str("\tvoid top code");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn lengths_table(k: u64, s_min: u64, s_max: u64) -> CliResult<String> {
    if k < 2 {
        return Err(CliError::InvalidFamilyParam("C_-k needs k >= 2".into()));
    }
    let mut out = String::from("s\tlambda\tn_short\tn_long\n");
    for s in s_min..=s_max {
        let row = signature_length_row(k, s)?;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            row.s, row.lambda, row.n_short, row.n_long
        ));
    }
    Ok(out)
}

pub const SWEEP_HEADER: &str =
    "q,entropy,opt_est,red_golomb_best,red_ck_best,red_cminus_best,red_limit";

pub fn sweep_row(q: f64, eps: f64, with_oracle: bool) -> CliResult<String> {
    let p = RedundancyPoint::at(q)?;
    let opt = if with_oracle && q <= oracle::DEFAULT_MAX_Q {
        let est = oracle::oracle_optimal_avg_len(q, eps)?;
        format!("{:.6}", p.redundancy(est.value))
    } else {
        String::new()
    };
    Ok(format!(
        "{q:.6},{:.6},{opt},{:.6},{:.6},{:.6},{:.6}",
        p.entropy,
        p.redundancy(p.golomb_best.1),
        p.redundancy(p.ck_best.1),
        p.redundancy(p.cminus_best.1),
        p.redundancy(p.limit),
    ))
}

pub fn sweep_csv(
    q_lo: f64,
    q_hi: f64,
    step: f64,
    eps: f64,
    with_oracle: bool,
) -> CliResult<String> {
    if step.is_nan() || step <= 0.0 || q_hi < q_lo {
        return Err(CliError::InvalidFamilyParam(
            "sweep needs step > 0 and q_lo <= q_hi".into(),
        ));
    }
    let n = ((q_hi - q_lo) / step + 1e-9).floor() as u64;
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for i in 0..=n {
        let q = q_lo + step * i as f64;
        out.push_str(&sweep_row(q, eps, with_oracle)?);
        out.push('\n');
    }
    Ok(out)
}

fn execute(
    command: Command,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    match command {
        Command::Encode {
            family,
            k,
            input,
            out,
        } => {
            let family = family_from_args(family, k)?;
            let text = read_input(input.as_ref(), stdin)?;
            let text = String::from_utf8_lossy(&text);
            let pairs = parse_pairs(&text)?;
            let (bytes, bits) = encode_stream(family, &pairs)?;
            writeln!(stderr, "{family}: {} pairs, {bits} bits", pairs.len())?;
            write_output(out.as_ref(), &bytes, stdout)?;
        }
        Command::Decode { input, out } => {
            let data = read_input(input.as_ref(), stdin)?;
            let (_, pairs) = decode_stream(&data)?;
            let mut text = String::new();
            for (i, j) in pairs {
                text.push_str(&format!("{i} {j}\n"));
            }
            write_output(out.as_ref(), text.as_bytes(), stdout)?;
        }
        Command::Params { k_min, k_max } => {
            stdout.write_all(params_table(k_min, k_max)?.as_bytes())?;
        }
        Command::Lengths { k, s_min, s_max } => {
            stdout.write_all(lengths_table(k, s_min, s_max)?.as_bytes())?;
        }
        Command::Sweep {
            q_lo,
            q_hi,
            step,
            eps,
            oracle,
            out,
        } => {
            let csv = sweep_csv(q_lo, q_hi, step, eps, oracle)?;
            write_output(out.as_ref(), csv.as_bytes(), stdout)?;
        }
        Command::Oracle { q, eps } => {
            let run = OracleRun::new(q, eps)?;
            let est = run.estimate(eps);
            writeln!(
                stdout,
                "{:.6} ± {:.1e} (S={}, symbols={})",
                est.value, est.uncertainty, est.s_max, est.alphabet
            )?;
        }
        Command::Crossover { a, b, lo, hi, tol } => {
            let parse = |s: &str| {
                s.parse::<CodeFamily>()
                    .map_err(|e| CliError::InvalidFamilyParam(e.to_string()))
            };
            let (fa, fb) = (parse(&a)?, parse(&b)?);
            let q = analysis::crossover(
                |q| analysis::avg_len_family(fa, q),
                |q| analysis::avg_len_family(fb, q),
                lo,
                hi,
                tol,
            )?;
            writeln!(stdout, "{q:.5}")?;
        }
        Command::Select { mean } => {
            if mean.is_nan() || mean < 0.0 {
                return Err(CliError::InvalidFamilyParam("mean must be >= 0".into()));
            }
            writeln!(stdout, "{}", analysis::adaptive_select(mean))?;
        }
    }
    Ok(())
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(cli.command, stdin, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], input: &[u8]) -> (i32, Vec<u8>, String) {
        let mut stdin = input;
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("tdgd").chain(args.iter().copied()),
            &mut stdin,
            &mut out,
            &mut err,
        );
        (code, out, String::from_utf8(err).unwrap())
    }

    #[test]
    fn encode_ck1_example() {
        let (code, out, _) = call(&["encode", "--family", "ck", "--k", "1"], b"2 1");
        assert_eq!(code, 0);
        assert_eq!(&out[..4], b"TDGD");
        assert_eq!(out[4..8], [1, 1, 1, 0]);
        assert_eq!(u64::from_le_bytes(out[8..16].try_into().unwrap()), 1);
        assert_eq!(out[16..], [0b1101_0000]);
    }

    #[test]
    fn encode_limit_example() {
        let (code, out, _) = call(&["encode", "--family", "limit"], b"0 0\n");
        assert_eq!(code, 0);
        assert_eq!(out[5..8], [3, 0, 0]);
        assert_eq!(out[16..], [0]);
    }

    #[test]
    fn input_errors() {
        let (code, _, err) = call(&["encode", "--family", "ck", "--k", "1"], b"1 2 3");
        assert_eq!(code, 2);
        assert!(err.contains("odd number"));
        let (code, _, err) = call(&["encode", "--family", "ck", "--k", "1"], b"1 x2");
        assert_eq!(code, 2);
        assert!(err.contains("\"x2\"") && err.contains("offset 2"));
        let (code, _, _) = call(&["encode", "--family", "cminus", "--k", "1"], b"1 2");
        assert_eq!(code, 1);
        let (code, _, _) = call(&["encode", "--family", "ck"], b"1 2");
        assert_eq!(code, 1);
        let (code, _, _) = call(&["frobnicate"], b"");
        assert_eq!(code, 1);
    }

    #[test]
    fn decode_errors() {
        let (_, mut out, _) = call(&["encode", "--family", "golomb", "--k", "3"], b"7 0 1 1");
        let (code, text, _) = call(&["decode"], &out);
        assert_eq!(code, 0);
        assert_eq!(String::from_utf8(text).unwrap(), "7 0\n1 1\n");
        let mut bad = out.clone();
        bad[0] = b'X';
        let (code, _, err) = call(&["decode"], &bad);
        assert_eq!(code, 2);
        assert!(err.contains("magic"));
        let last = out.len() - 1;
        out[last] |= 1;
        let (code, _, err) = call(&["decode"], &out);
        assert_eq!(code, 2);
        assert!(err.contains("after the last pair"));
        out.push(0);
        assert!(matches!(
            decode_stream(&out),
            Err(CliError::TrailingGarbage)
        ));
    }

    #[test]
    fn tables() {
        let (_, out, _) = call(&["params", "--k-min", "3", "--k-max", "3"], b"");
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "k\tM\tj\tr\tsigma\tc\tprofile\n3\t3\t0\t0\t1\t1\t(0,7,2)\n"
        );
        let (_, out, _) = call(&["params", "--k-min", "1", "--k-max", "2"], b"");
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("void top code"));
        assert!(text.contains("(0,4,0)"));
        let (_, out, _) = call(
            &["lengths", "--k", "3", "--s-min", "0", "--s-max", "3"],
            b"",
        );
        assert!(String::from_utf8(out).unwrap().ends_with("3\t7\t3\t1\n"));
        let (_, out, _) = call(
            &["lengths", "--k", "2", "--s-min", "2", "--s-max", "2"],
            b"",
        );
        assert!(String::from_utf8(out).unwrap().ends_with("2\t4\t3\t0\n"));
        let (code, _, _) = call(&["lengths", "--k", "1"], b"");
        assert_eq!(code, 1);
    }

    #[test]
    fn one_line_outputs() {
        let (_, out, _) = call(&["select", "--mean", "1.0"], b"");
        assert_eq!(out, b"ck k=1\n");
        let (_, out, _) = call(&["crossover"], b"");
        assert_eq!(out, b"0.33715\n");
        let (_, out, _) = call(&["oracle", "--q", "0.5"], b"");
        assert!(String::from_utf8(out).unwrap().starts_with("4.000000 ± "));
        let (code, _, _) = call(&["crossover", "--lo", "0.4", "--hi", "0.45"], b"");
        assert_eq!(code, 2);
    }

    #[test]
    fn sweep_rows() {
        let csv = sweep_csv(0.5, 0.5, 0.05, 1e-9, false).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_HEADER);
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "0.500000");
        assert_eq!(row[2], "");
        assert_eq!(row[4], "0.000000");
    }
}
