use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use np_core::bundled::{parse_curve, parse_family, parse_module};
use np_core::fspace::FSpaceRepr;
use np_core::lfunction::{check_bound, congruence_check, degree_identity_check, l_series, normalize_unit_character, bound};
use np_core::phi_nabla::SeriesMatrix;
use np_core::polygon::render_svg;
use np_core::{budget, selftest, CrystalFamily, Error, ExtractOptions, NewtonPolygon, Result};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "np", version, about = "Newton polygons, jump loci and L-series of F-isocrystals over finite fields")]
struct Cli {
    /// Upper bound on enumerated field elements per step (overrides NP_BUDGET)
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Newton polygon and local factor of an F-space (JSON matrix file)
    Eval {
        #[arg(long)]
        fspace: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Zeta function of a curve (TOML)
    Zeta {
        #[arg(long)]
        curve: PathBuf,
        /// also list closed points up to this degree
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Jump locus of a family (TOML)
    Jumps {
        #[arg(long)]
        family: PathBuf,
        /// characteristic for the Legendre family
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 2)]
        max_degree: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// cross-check through exterior powers
        #[arg(long)]
        exterior: bool,
    },
    /// Truncated L-series and its mod-p checks
    Lfun {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        p: Option<u64>,
        /// truncation order D: coefficients of t^0 .. t^(D-1)
        #[arg(long)]
        order: usize,
        /// p-adic precision M
        #[arg(long, default_value_t = 4)]
        precision: u32,
        /// pass to the (q-1)-st tensor power first
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        congruence: bool,
        #[arg(long)]
        degree_identity: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Unit-root sub-object and slope filtration of a (φ,∇)-module (JSON)
    Unitroot {
        #[arg(long)]
        module: PathBuf,
        #[arg(long, default_value_t = 2)]
        sample_degree: u32,
        #[arg(long)]
        filtration: bool,
    },
    /// Jump-degree bound B = r + 2^(1+(q-1)r)(g-1), or check it on a family
    Bound {
        #[arg(long, required_unless_present = "family")]
        q: Option<u64>,
        #[arg(long, required_unless_present = "family")]
        g: Option<u32>,
        #[arg(long, required_unless_present = "family")]
        r: Option<u64>,
        #[arg(long, conflicts_with_all = ["q", "g", "r"])]
        family: Option<PathBuf>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 2)]
        max_degree: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the acceptance suite
    Selftest {
        /// run a single criterion
        #[arg(long)]
        only: Option<u32>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConfigInvalid { .. } | Error::Parse(_) | Error::NotCoprime { .. } | Error::OutOfRange(_) => 2,
        Error::BudgetExceeded { .. } => 3,
        Error::PrecisionInsufficient(_) => 4,
        _ => 1,
    }
}

fn error_json(kind: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "message": message } }).to_string()
}

fn read(path: &Path, field: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::config(field, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn to_value(v: &impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("values serialize")
}

fn no_csv(format: Format, cmd: &str) -> Result<()> {
    if format == Format::Csv {
        return Err(Error::config("format", format!("{cmd} has no CSV output")));
    }
    Ok(())
}

/// Loads a family, with `--p` replacing q for the Legendre provider.
fn load_family(path: &Path, p: Option<u64>) -> Result<CrystalFamily> {
    let src = read(path, "family")?;
    let Some(p) = p else { return parse_family(&src) };
    let mut repr: toml::Table = toml::from_str(&src).map_err(|e| Error::Parse(e.to_string()))?;
    if repr.get("provider").and_then(|v| v.as_str()) != Some("legendre") {
        return Err(Error::config("p", "--p only applies to the legendre provider"));
    }
    repr.insert("q".into(), toml::Value::Integer(p as i64));
    parse_family(&toml::to_string(&repr).map_err(|e| Error::Parse(e.to_string()))?)
}

fn series_matrix(m: &SeriesMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(|s| to_value(&s.coeffs())).collect()))
            .collect(),
    )
}

fn run(cli: Cli) -> Result<String> {
    if let Some(b) = cli.budget {
        budget::set_enumeration_budget(b);
    }
    match cli.command {
        Command::Eval { fspace, svg, format } => {
            no_csv(format, "eval")?;
            let repr: FSpaceRepr =
                serde_json::from_str(&read(&fspace, "fspace")?).map_err(|e| Error::config("fspace", e.to_string()))?;
            let v = repr.build()?;
            let np = v.newton_polygon()?;
            if let Some(path) = svg {
                write(&path, &render_svg(&[("F", &np)]))?;
            }
            Ok(match format {
                Format::Text => format!("slopes: {}\n", np),
                _ => pretty(&json!({
                    "rank": v.rank(),
                    "scale": v.scale(),
                    "local_factor": to_value(&v.local_factor()),
                    "polygon": to_value(&np),
                })),
            })
        }
        Command::Zeta { curve, max_degree, format } => {
            no_csv(format, "zeta")?;
            let c = parse_curve(&read(&curve, "curve")?)?;
            let z = c.zeta()?;
            let points = max_degree.map(|d| c.closed_points(d)).transpose()?;
            Ok(match format {
                Format::Text => {
                    let mut out = format!("P(t) = {}\ne = {}\ng = {}\n", poly_text(&z.numerator), z.p_rank, z.genus);
                    out.push_str(&format!("N = {:?}\n", z.counts));
                    if let Some(pts) = points {
                        for x in pts {
                            out.push_str(&format!("{}\n", x.id));
                        }
                    }
                    out
                }
                _ => {
                    let mut v = to_value(&z);
                    if let Some(pts) = points {
                        v["closed_points"] = to_value(&pts);
                    }
                    pretty(&v)
                }
            })
        }
        Command::Jumps { family, p, max_degree, format, svg, exterior } => {
            let fam = load_family(&family, p)?;
            let rep = fam.jump_locus(max_degree)?;
            if exterior {
                let other = fam.jump_locus_exterior(max_degree)?;
                if other != rep.jump_ids() {
                    return Err(Error::Inconsistency(format!(
                        "exterior-power route found {} jump orbits, direct route {}",
                        other.len(),
                        rep.jumps.len()
                    )));
                }
            }
            if let Some(path) = svg {
                let mut polys: Vec<(String, &NewtonPolygon)> = vec![("generic".into(), &rep.generic)];
                let mut seen: Vec<&NewtonPolygon> = Vec::new();
                for j in &rep.jumps {
                    if !seen.contains(&&j.polygon) {
                        seen.push(&j.polygon);
                        polys.push((format!("jump {}", j.id), &j.polygon));
                    }
                }
                let refs: Vec<(&str, &NewtonPolygon)> = polys.iter().map(|(n, p)| (n.as_str(), *p)).collect();
                write(&path, &render_svg(&refs))?;
            }
            Ok(match format {
                Format::Csv => rep.to_csv()?,
                Format::Json => pretty(&to_value(&rep)),
                Format::Text => {
                    let mut out = format!("generic {} ({}), reduced degree {}\n", rep.generic, rep.status, rep.reduced_degree);
                    for j in &rep.jumps {
                        out.push_str(&format!("{} {}\n", j.id, j.polygon));
                    }
                    out
                }
            })
        }
        Command::Lfun { family, p, order, precision, normalize, congruence, degree_identity, format } => {
            if order == 0 {
                return Err(Error::config("order", "truncation order must be at least 1"));
            }
            if precision == 0 {
                return Err(Error::config("precision", "precision must be at least 1"));
            }
            let base = load_family(&family, p)?;
            let mut report = json!({});
            let fam = if normalize {
                let n = normalize_unit_character(&base, order as u32 - 1, Some(order - 1))?;
                report["normalization"] = to_value(&n);
                n.family
            } else {
                base.clone()
            };
            let series = l_series(&fam, order, precision)?;
            if congruence {
                report["congruence"] = to_value(&congruence_check(&fam, order, Some(&base))?);
            }
            if degree_identity {
                report["degree_identity"] = to_value(&degree_identity_check(&fam, order)?);
            }
            Ok(match format {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    let io = |e: csv::Error| Error::Io(e.to_string());
                    w.write_record(["k", "coefficient", "mod_p"]).map_err(io)?;
                    for (k, (c, r)) in series.coeffs().iter().zip(series.mod_p()).enumerate() {
                        w.write_record([k.to_string(), c.to_string(), r.to_string()]).map_err(io)?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))?
                }
                Format::Json => {
                    report["series"] = to_value(&series);
                    report["mod_p"] = to_value(&series.mod_p());
                    pretty(&report)
                }
                Format::Text => {
                    let c: Vec<String> = series.coeffs().iter().map(|c| c.to_string()).collect();
                    format!("L = [{}] mod (p^{}, t^{})\n", c.join(", "), series.precision(), series.order())
                }
            })
        }
        Command::Unitroot { module, sample_degree, filtration } => {
            let m = parse_module(&read(&module, "module")?)?;
            let opts = ExtractOptions { sample_degree };
            let cert = m.generic_np_certificate(sample_degree)?;
            let mut out = json!({
                "special": to_value(&m.special_np()?),
                "generic": to_value(&cert),
                "horizontal": m.is_horizontal(),
            });
            let u = m.unit_root_sub(opts)?;
            out["unit_root"] = json!({
                "pivots": u.pivots,
                "basis": series_matrix(&u.basis),
                "restricted": series_matrix(&u.restricted),
                "iterations": u.iterations,
            });
            if filtration {
                let steps = m.slope_filtration(opts)?;
                out["filtration"] = Value::Array(
                    steps
                        .iter()
                        .map(|s| json!({ "slope": np_core::polygon::format_rat(&s.slope), "rank": s.basis.cols(), "basis": series_matrix(&s.basis) }))
                        .collect(),
                );
            }
            Ok(pretty(&out))
        }
        Command::Bound { q, g, r, family, p, max_degree, format } => {
            no_csv(format, "bound")?;
            let rep = match family {
                Some(path) => check_bound(&load_family(&path, p)?, max_degree)?,
                None => {
                    let (q, g, r) = (q.expect("clap"), g.expect("clap"), r.expect("clap"));
                    if q < 2 || r < 1 {
                        return Err(Error::config("q", "need q >= 2 and r >= 1"));
                    }
                    bound(q, g, r)
                }
            };
            Ok(match format {
                Format::Text => match rep.verdict {
                    None => format!("{}\n", rep.bound),
                    Some(v) => format!(
                        "bound {}\nobserved {}\nverdict {}\n",
                        rep.bound,
                        rep.observed.unwrap_or_default(),
                        if v { "pass" } else { "fail" }
                    ),
                },
                _ => pretty(&to_value(&rep)),
            })
        }
        Command::Selftest { only, format } => {
            no_csv(format, "selftest")?;
            let results = match only {
                Some(id) if (1..=10).contains(&id) => vec![selftest::run(id)],
                Some(id) => return Err(Error::config("only", format!("no criterion {id}"))),
                None => selftest::run_all(),
            };
            let failed = results.iter().filter(|r| !r.passed).count();
            let out = match format {
                Format::Json => pretty(&json!({ "results": to_value(&results), "failed": failed })),
                _ => {
                    let mut s: String = results.iter().map(|r| r.line() + "\n").collect();
                    s.push_str(&format!("{} passed, {failed} failed\n", results.len() - failed));
                    s
                }
            };
            if failed > 0 {
                emit(&out);
                return Err(Error::Inconsistency(format!("{failed} acceptance checks failed")));
            }
            Ok(out)
        }
    }
}

fn poly_text(c: &[i64]) -> String {
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0)
        .map(|(i, &a)| match i {
            0 => a.to_string(),
            1 => format!("{a}t"),
            _ => format!("{a}t^{i}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ").replace("+ -", "- ")
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(out: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            emit(&e.to_string());
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", error_json("config-invalid", first));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(mut out) => {
            if !out.ends_with('\n') {
                out.push('\n');
            }
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), &e.to_string()));
            ExitCode::from(exit_code(&e))
        }
    }
}
