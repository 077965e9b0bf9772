use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fanocoeff_core::report::render_chern_expansion;
use fanocoeff_core::sequences::{self, multinomial};
use fanocoeff_core::verify::{
    aggregate_identities, sign_survey, verify_identities_with, IdentityBounds, IdentityKind,
};
use fanocoeff_core::{Certificate, Coefficients, Method, Rational, SequenceCache};
use serde::Serialize;

use crate::files::{timestamp, write_certificate};
use crate::shard::certify_sharded_with;
use crate::table::{build_table_with, to_csv, TableRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "fanocoeff",
    version,
    about = "Exact b(i,j,k) coefficients, identity checks and positivity certificates"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "plain")]
    pub format: Format,
    /// Output file for streamed results; certificate directory for
    /// certify, verify and cross-validate.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Certificate directory when --out is not given.
    #[arg(
        long,
        global = true,
        env = "FANOCOEFF_OUT_DIR",
        default_value = "certificates",
        hide_env_values = true
    )]
    pub out_dir: PathBuf,
    #[arg(long, global = true, env = "FANOCOEFF_SHARDS", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub shards: u32,
    /// recurrence, genfunc or closed.
    #[arg(long, global = true, default_value = "closed")]
    pub method: Method,
    /// Replace B_0, B_1, ... with these values. Exists to check that
    /// certify and verify catch bad input.
    #[arg(long, global = true, hide = true, value_delimiter = ',')]
    pub seed_bernoulli: Vec<Rational>,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    fn engine(&self) -> Coefficients {
        if self.seed_bernoulli.is_empty() {
            Coefficients::new()
        } else {
            Coefficients::with_sequences(SequenceCache::with_bernoulli_prefix(&self.seed_bernoulli))
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Special-number sequences.
    Seq {
        #[command(subcommand)]
        which: Seq,
    },
    /// A single coefficient b(i, j, k).
    Bcoeff { i: usize, j: usize, k: usize },
    /// Every b and d with i <= I_MAX, j <= J_MAX, k <= i + j.
    Table { i_max: usize, j_max: usize },
    /// Run identity checks; all of them when none are named.
    Verify {
        identities: Vec<IdentityKind>,
        /// Override one bound, e.g. `--bound endpoint_i_max=50`.
        #[arg(long = "bound", value_name = "KEY=VALUE")]
        bounds: Vec<String>,
    },
    /// Certify b(i, j, k) > 0 for 1 <= i < N, j in {1, 2}, 1 <= k <= i + j.
    Certify { n: usize },
    /// Check that all three methods agree, including zeros past k = i + j.
    CrossValidate { i_max: usize, j_max: usize },
    /// Expansion of ch_j(H_i); plain output is LaTeX.
    Chern { i: usize, j: usize },
    /// Sign counts for j outside {1, 2}. Exploratory; certifies nothing.
    Explore {
        j_min: usize,
        j_max: usize,
        #[arg(long, default_value_t = 20)]
        i_max: usize,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum Seq {
    /// Bernoulli number B_n.
    Bern { n: usize },
    /// Higher-order Bernoulli number B_n^(i).
    Hbern { n: usize, i: usize },
    /// Higher-order Daehee number D_q^(k).
    Daehee { q: usize, k: usize },
    /// Stirling number of the second kind S(j, p).
    Stirling2 { j: usize, p: usize },
    /// Sum over l_1 + ... + l_k = q of 1/((l_1+1)...(l_k+1)).
    Harmsum { k: usize, q: usize },
    /// n! / (parts_1! ... parts_r!).
    Multinomial { n: usize, parts: Vec<usize> },
}

impl Seq {
    fn name(&self) -> &'static str {
        match self {
            Seq::Bern { .. } => "bern",
            Seq::Hbern { .. } => "hbern",
            Seq::Daehee { .. } => "daehee",
            Seq::Stirling2 { .. } => "stirling2",
            Seq::Harmsum { .. } => "harmsum",
            Seq::Multinomial { .. } => "multinomial",
        }
    }

    fn args(&self) -> Vec<(&'static str, String)> {
        match self {
            Seq::Bern { n } => vec![("n", n.to_string())],
            Seq::Hbern { n, i } => vec![("n", n.to_string()), ("i", i.to_string())],
            Seq::Daehee { q, k } => vec![("q", q.to_string()), ("k", k.to_string())],
            Seq::Stirling2 { j, p } => vec![("j", j.to_string()), ("p", p.to_string())],
            Seq::Harmsum { k, q } => vec![("k", k.to_string()), ("q", q.to_string())],
            Seq::Multinomial { n, parts } => vec![
                ("n", n.to_string()),
                (
                    "parts",
                    parts
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(" "),
                ),
            ],
        }
    }

    fn value(&self) -> Result<Rational> {
        Ok(match *self {
            Seq::Bern { n } => sequences::bernoulli(n),
            Seq::Hbern { n, i } => sequences::higher_bernoulli(n, i),
            Seq::Daehee { q, k } => sequences::daehee(q, k),
            Seq::Stirling2 { j, p } => Rational::from_integer(sequences::stirling2(j, p)?),
            Seq::Harmsum { k, q } => {
                if k == 0 {
                    bail!("harmsum needs k >= 1");
                }
                sequences::harmonic_product_sum(k, q)
            }
            Seq::Multinomial { n, ref parts } => Rational::from_integer(multinomial(n, parts)?),
        })
    }
}

/// Runs `cli`, writing streamed output to `stdout`. Returns the process
/// exit code: 0 on success or a passing certificate, 1 on a failing one.
/// Errors map to exit code 2 in the binary.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<u8> {
    match &cli.command {
        Command::Seq { which } => {
            let value = which.value()?;
            let text = match cli.format {
                Format::Plain => format!("{value}\n"),
                Format::Csv => {
                    let args = which
                        .args()
                        .into_iter()
                        .map(|(_, v)| v)
                        .collect::<Vec<_>>()
                        .join(" ");
                    csv_text(
                        &["sequence", "args", "value"],
                        &[vec![which.name().into(), args, value.to_string()]],
                    )?
                }
                Format::Json => {
                    let args: serde_json::Map<_, _> = which
                        .args()
                        .into_iter()
                        .map(|(k, v)| (k.to_string(), serde_json::Value::String(v)))
                        .collect();
                    json_line(
                        &serde_json::json!({ "sequence": which.name(), "args": args, "value": value }),
                    )?
                }
            };
            emit(cli, stdout, &text)?;
            Ok(0)
        }
        Command::Bcoeff { i, j, k } => {
            let row = TableRow::compute(&mut cli.engine(), *i, *j, *k, cli.method)?;
            let text = match cli.format {
                Format::Plain => format!("{}\n", row.b),
                Format::Csv => to_csv(std::slice::from_ref(&row))?,
                Format::Json => json_line(&row)?,
            };
            emit(cli, stdout, &text)?;
            Ok(0)
        }
        Command::Table { i_max, j_max } => {
            let rows = build_table_with(cli.engine(), *i_max, *j_max, cli.method)?;
            let text = match cli.format {
                Format::Plain => rows
                    .iter()
                    .map(|r| format!("{} {} {} {} {} {}\n", r.i, r.j, r.k, r.b, r.d, r.method))
                    .collect(),
                Format::Csv => to_csv(&rows)?,
                Format::Json => json_line(&rows)?,
            };
            emit(cli, stdout, &text)?;
            Ok(0)
        }
        Command::Verify { identities, bounds } => {
            let kinds: Vec<IdentityKind> = if identities.is_empty() {
                IdentityKind::ALL.to_vec()
            } else {
                identities.clone()
            };
            let bounds = apply_bounds(bounds)?;
            let stamp = timestamp();
            let parts: Vec<Certificate> =
                run_identities(&cli.engine(), &bounds, &kinds, cli.shards as usize)
                    .into_iter()
                    .map(|c| c.stamped(stamp.clone()))
                    .collect();
            let all = aggregate_identities(&parts).stamped(stamp);
            let stem = if identities.is_empty() {
                "verify-all".to_string()
            } else {
                format!(
                    "verify-{}",
                    kinds
                        .iter()
                        .map(|k| k.as_str())
                        .collect::<Vec<_>>()
                        .join("+")
                )
            };
            let path = write_certificate(&cert_dir(cli), &stem, &all)?;
            let mut text = String::new();
            match cli.format {
                Format::Json => text = json_line(&all)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = parts.iter().map(summary_row).collect();
                    text = csv_text(
                        &["property", "verdict", "checked_count", "witnesses"],
                        &rows,
                    )?;
                }
                Format::Plain => {
                    for c in &parts {
                        text.push_str(&summary_line(c));
                    }
                    text.push_str(&format!("certificate: {}\n", path.display()));
                }
            }
            stdout.write_all(text.as_bytes())?;
            Ok(exit_for(&all))
        }
        Command::Certify { n } => {
            let cert = certify_sharded_with(cli.engine(), *n, cli.method, cli.shards as usize)?
                .stamped(timestamp());
            let stem = format!("certify-N{}-{}", n, method_flag(cli.method));
            let path = write_certificate(&cert_dir(cli), &stem, &cert)?;
            report_certificate(cli, stdout, &cert, &path)?;
            Ok(exit_for(&cert))
        }
        Command::CrossValidate { i_max, j_max } => {
            let cert = cli
                .engine()
                .cross_validate(*i_max, *j_max)
                .stamped(timestamp());
            let path = write_certificate(
                &cert_dir(cli),
                &format!("cross-validate-i{i_max}-j{j_max}"),
                &cert,
            )?;
            report_certificate(cli, stdout, &cert, &path)?;
            Ok(exit_for(&cert))
        }
        Command::Chern { i, j } => {
            let e = render_chern_expansion(&mut cli.engine(), *i, *j, cli.method)?;
            let text = match cli.format {
                Format::Plain => format!("{}\n", e.to_latex()),
                Format::Json => json_line(&e)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = e
                        .terms
                        .iter()
                        .map(|t| {
                            vec![
                                t.k.to_string(),
                                t.coefficient.to_string(),
                                t.operator_order.to_string(),
                                t.ch_index.to_string(),
                                t.c1_power.to_string(),
                            ]
                        })
                        .collect();
                    csv_text(
                        &["k", "coefficient", "operator_order", "ch_index", "c1_power"],
                        &rows,
                    )?
                }
            };
            emit(cli, stdout, &text)?;
            Ok(0)
        }
        Command::Explore {
            j_min,
            j_max,
            i_max,
        } => {
            if j_min > j_max {
                bail!("empty j range {j_min}..={j_max}");
            }
            let rows = sign_survey(&mut cli.engine(), *i_max, *j_min..=*j_max, cli.method)?;
            let text = match cli.format {
                Format::Json => json_line(&rows)?,
                Format::Csv => {
                    let body: Vec<Vec<String>> = rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.j.to_string(),
                                r.positive.to_string(),
                                r.zero.to_string(),
                                r.negative.to_string(),
                                r.first_nonpositive
                                    .map(|(i, k)| format!("{i} {k}"))
                                    .unwrap_or_default(),
                            ]
                        })
                        .collect();
                    csv_text(
                        &["j", "positive", "zero", "negative", "first_nonpositive"],
                        &body,
                    )?
                }
                Format::Plain => rows
                    .iter()
                    .map(|r| {
                        let first = r
                            .first_nonpositive
                            .map(|(i, k)| format!(" first_nonpositive=(i={i}, k={k})"))
                            .unwrap_or_default();
                        format!(
                            "j={} i<={} positive={} zero={} negative={}{}\n",
                            r.j, i_max, r.positive, r.zero, r.negative, first
                        )
                    })
                    .collect(),
            };
            emit(cli, stdout, &text)?;
            Ok(0)
        }
    }
}

fn method_flag(m: Method) -> &'static str {
    match m {
        Method::ClosedForm => "closed",
        other => other.as_str(),
    }
}

fn exit_for(cert: &Certificate) -> u8 {
    if cert.passed() {
        0
    } else {
        1
    }
}

fn cert_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| cli.out_dir.clone())
}

fn emit(cli: &Cli, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => write_file(path, text),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn json_line<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn summary_row(c: &Certificate) -> Vec<String> {
    vec![
        c.claim.property.clone(),
        if c.passed() { "pass" } else { "fail" }.into(),
        c.checked_count.to_string(),
        c.witnesses.len().to_string(),
    ]
}

fn summary_line(c: &Certificate) -> String {
    let mut line = format!(
        "{}: {} ({} checked, {} witnesses)\n",
        c.claim.property,
        if c.passed() { "pass" } else { "fail" },
        c.checked_count,
        c.witnesses.len()
    );
    for w in c.witnesses.iter().take(10) {
        line.push_str(&format!(
            "  ({}, {}, {}) {} {}\n",
            w.i, w.j, w.k, w.value, w.reason
        ));
    }
    line
}

fn report_certificate(
    cli: &Cli,
    stdout: &mut dyn Write,
    cert: &Certificate,
    path: &Path,
) -> Result<()> {
    let text = match cli.format {
        Format::Json => json_line(cert)?,
        Format::Csv => {
            let mut row = summary_row(cert);
            row.push(path.display().to_string());
            csv_text(
                &[
                    "property",
                    "verdict",
                    "checked_count",
                    "witnesses",
                    "certificate",
                ],
                &[row],
            )?
        }
        Format::Plain => format!("{}certificate: {}\n", summary_line(cert), path.display()),
    };
    stdout.write_all(text.as_bytes())?;
    Ok(())
}

/// `IdentityBounds::default()` with `key=value` overrides.
fn apply_bounds(overrides: &[String]) -> Result<IdentityBounds> {
    let mut value = serde_json::to_value(IdentityBounds::default())?;
    let map = value
        .as_object_mut()
        .expect("bounds serialize as an object");
    for item in overrides {
        let Some((key, raw)) = item.split_once('=') else {
            bail!("bound {item:?} is not KEY=VALUE")
        };
        let known = map.keys().cloned().collect::<Vec<_>>().join(", ");
        let slot = map
            .get_mut(key)
            .with_context(|| format!("unknown bound {key:?}; known: {known}"))?;
        *slot = serde_json::Value::from(
            raw.parse::<u64>()
                .with_context(|| format!("bound {key} = {raw:?}"))?,
        );
    }
    Ok(serde_json::from_value(value)?)
}

/// Identity checks spread over up to `shards` threads, each with its own
/// clone of `base`. Results come back in the order of `kinds`.
fn run_identities(
    base: &Coefficients,
    bounds: &IdentityBounds,
    kinds: &[IdentityKind],
    shards: usize,
) -> Vec<Certificate> {
    let shards = shards.clamp(1, kinds.len().max(1));
    if shards == 1 {
        return verify_identities_with(&mut base.clone(), bounds, kinds);
    }
    let mut slots: Vec<Option<Certificate>> = vec![None; kinds.len()];
    thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|shard| {
                let mine: Vec<(usize, IdentityKind)> = kinds
                    .iter()
                    .copied()
                    .enumerate()
                    .filter(|(pos, _)| pos % shards == shard)
                    .collect();
                let mut engine = base.clone();
                scope.spawn(move || {
                    mine.into_iter()
                        .map(|(pos, kind)| {
                            (
                                pos,
                                verify_identities_with(&mut engine, bounds, &[kind]).remove(0),
                            )
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (pos, cert) in h.join().expect("identity shard panicked") {
                slots[pos] = Some(cert);
            }
        }
    });
    slots
        .into_iter()
        .map(|c| c.expect("every identity ran"))
        .collect()
}
