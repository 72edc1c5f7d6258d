use std::path::{Path, PathBuf};
use std::process::ExitCode;

use calkin_core::calkin::{remc_sufficient, stability_condition3, RemcVerdict, StabilityCertificate, StabilityDecision};
use calkin_core::elemop::{
    a_upper_bounds_grid, bound_table, h_lower_bounds, hs_singular_numbers, minimal_representation,
    recover_first_symbol, verify_witness, ElementaryOp, DEFAULT_OMEGA_GRID,
};
use calkin_core::linalg::{singular_values, ComplexMatrix};
use calkin_core::seqkit::{dominates, star_rearrange, tensor_prefix, top_products, Domination, Generator};
use calkin_core::Error;
use calkin_harness::config::{Format, RunConfig, DEFAULT_SEED};
use calkin_harness::report::{csv_report, fmt_num, json_report};
use calkin_harness::seqspec::parse_seq;
use calkin_harness::suite::run_all;
use calkin_harness::{HarnessError, EXIT_CERTIFICATE, EXIT_TOLERANCE};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "calkin", version, about = "Reproducible checks for sequence ideals and elementary operators")]
struct Cli {
    #[arg(long, global = true, env = "CALKIN_SEED")]
    seed: Option<u64>,
    /// Write the report into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Slack for inequalities.
    #[arg(long, global = true)]
    tol_ineq: Option<f64>,
    /// Slack for identities.
    #[arg(long, global = true)]
    tol_identity: Option<f64>,
    /// Sets both tolerances.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    horizon: Option<usize>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    r_max: Option<usize>,
    /// Largest matrix dimension drawn by verify-all.
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sequence operations.
    Seq {
        #[command(subcommand)]
        cmd: SeqCmd,
    },
    /// Finite-horizon stability verdict for a principal ideal.
    Stability {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Elementary-operator computations on an operator file.
    Elemop {
        #[command(subcommand)]
        cmd: ElemopCmd,
    },
    /// Runs the full acceptance suite.
    VerifyAll,
}

#[derive(Subcommand)]
enum SeqCmd {
    /// First n terms of a (x) b.
    Tensor {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(short)]
        n: usize,
    },
    /// Decreasing rearrangement of a JSON list of reals or [re, im] pairs.
    Rearrange {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Tests a <= C b on the first terms.
    Dominate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 1e6)]
        c_max: f64,
    },
}

#[derive(Subcommand)]
enum ElemopCmd {
    /// Certified lower and upper bounds for every index of M_{A,B}.
    Bounds {
        #[arg(long)]
        op: PathBuf,
        /// Single band ratio; the default grid is used otherwise.
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Recovers one symbol from the operator.
    Recover {
        #[arg(long)]
        op: PathBuf,
        /// 1-based symbol index.
        #[arg(long, default_value_t = 1)]
        target: usize,
    },
    /// Shortest representation with independent symbols.
    Minimal {
        #[arg(long)]
        op: PathBuf,
    },
    /// Singular numbers of the operator on Hilbert-Schmidt space.
    Hsnums {
        #[arg(long)]
        op: PathBuf,
    },
}

/// A rendered command result.
struct Output {
    name: &'static str,
    json: String,
    csv: String,
    exit: i32,
}

#[derive(Serialize)]
struct Cited<T: Serialize> {
    operation: &'static str,
    claim: &'static str,
    #[serde(flatten)]
    value: T,
}

fn config_from(cli: &Cli) -> Result<RunConfig, HarnessError> {
    let mut cfg = RunConfig::new(cli.seed.unwrap_or(DEFAULT_SEED));
    if let Some(t) = cli.tol {
        cfg.tolerances.ineq = t;
        cfg.tolerances.identity = t;
    }
    if let Some(t) = cli.tol_ineq {
        cfg.tolerances.ineq = t;
    }
    if let Some(t) = cli.tol_identity {
        cfg.tolerances.identity = t;
    }
    cfg.horizon = cli.horizon.unwrap_or(cfg.horizon);
    cfg.depth = cli.depth.unwrap_or(cfg.depth);
    cfg.r_max = cli.r_max.unwrap_or(cfg.r_max);
    cfg.max_dim = cli.max_dim.unwrap_or(cfg.max_dim);
    cfg.out_dir.clone_from(&cli.out);
    cfg.format = cli.format;
    cfg.validate()?;
    Ok(cfg)
}

fn render<T: Serialize>(
    name: &'static str,
    cfg: &RunConfig,
    operation: &'static str,
    claim: &'static str,
    value: T,
    headers: &[&str],
    rows: Vec<Vec<String>>,
) -> Result<Output, HarnessError> {
    let json = json_report(name, cfg, &Cited { operation, claim, value })?;
    let csv = csv_report(headers, &rows)?;
    Ok(Output { name, json, csv, exit: 0 })
}

fn seq_rows(values: &[f64]) -> Vec<Vec<String>> {
    values.iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), fmt_num(*v)]).collect()
}

fn read_op(path: &Path) -> Result<ElementaryOp, HarnessError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn single_pair(op: &ElementaryOp) -> Result<(&ComplexMatrix, &ComplexMatrix), HarnessError> {
    match op.symbols() {
        [(a, b)] => Ok((a, b)),
        s => Err(HarnessError::Usage(format!("expected one symbol pair, found {}", s.len()))),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawEntry {
    Real(f64),
    Complex([f64; 2]),
}

fn cmd_seq(cmd: &SeqCmd, cfg: &RunConfig) -> Result<Output, HarnessError> {
    match cmd {
        SeqCmd::Tensor { a, b, n } => {
            let (sa, sb) = (parse_seq(a, *n)?, parse_seq(b, *n)?);
            let t = tensor_prefix(&sa, &sb, *n)?;
            #[derive(Serialize)]
            struct R<'a> {
                a: &'a str,
                b: &'a str,
                n: usize,
                values: &'a [f64],
            }
            let values = t.prefix();
            render(
                "seq-tensor",
                cfg,
                "seqkit::tensor_prefix",
                "a (x) b is the decreasing rearrangement of all products a_i b_j",
                R { a, b, n: *n, values },
                &["n", "value"],
                seq_rows(values),
            )
        }
        SeqCmd::Rearrange { input } => {
            let raw: Vec<RawEntry> = serde_json::from_str(&std::fs::read_to_string(input)?)?;
            let raw: Vec<Complex64> = raw
                .into_iter()
                .map(|e| match e {
                    RawEntry::Real(x) => Complex64::new(x, 0.0),
                    RawEntry::Complex([re, im]) => Complex64::new(re, im),
                })
                .collect();
            let s = star_rearrange(&raw);
            render(
                "seq-rearrange",
                cfg,
                "seqkit::star_rearrange",
                "absolute values in decreasing order, with multiplicity",
                serde_json::json!({ "values": s.prefix() }),
                &["n", "value"],
                seq_rows(s.prefix()),
            )
        }
        SeqCmd::Dominate { a, b, c_max } => {
            let h = cfg.horizon;
            let (sa, sb) = (parse_seq(a, h)?, parse_seq(b, h)?);
            let d = dominates(&sa, &sb, h, *c_max)?;
            let (av, bv) = (sa.terms(h)?, sb.terms(h)?);
            let ratios: Vec<f64> = av.iter().zip(&bv).map(|(x, y)| x / y).collect();
            let mut rows = seq_rows(&ratios);
            rows.insert(0, vec!["verdict".into(), if d.is_dominated() { "dominated" } else { "not_at_horizon" }.into()]);
            #[derive(Serialize)]
            struct R<'a> {
                domination: Domination,
                ratios: &'a [f64],
            }
            render(
                "seq-dominate",
                cfg,
                "seqkit::dominates",
                "a <= C b termwise up to the horizon",
                R { domination: d, ratios: &ratios },
                &["n", "ratio"],
                rows,
            )
        }
    }
}

fn cmd_stability(spec: &str, omega: Option<f64>, cli: &Cli, cfg: &RunConfig) -> Result<Output, HarnessError> {
    let a = parse_seq(spec, cfg.horizon)?;
    let omega = omega.unwrap_or(match a.generator() {
        Some(Generator::Power { .. }) => (-1f64).exp(),
        _ => 0.5,
    });
    // counts for 1/log2 explode doubly exponentially with the band index
    let depth = match (cli.depth, a.generator()) {
        (Some(d), _) => d,
        (None, Some(Generator::LogInverse)) => 4,
        (None, _) => cfg.depth,
    };
    let verdict = stability_condition3(&a, omega, cfg.r_max, depth)?;
    let remc = remc_sufficient(&a, omega, depth)?;
    let consistent = !matches!(remc, RemcVerdict::Holds { .. }) || verdict.is_stable();

    let decision = match &verdict.decision {
        StabilityDecision::StableCertified { .. } => "stable_certified",
        StabilityDecision::NotStableAtHorizon { .. } => "not_stable_at_horizon",
        StabilityDecision::Inconclusive { .. } => "inconclusive",
    };
    let mut rows = vec![
        vec!["decision".into(), decision.into()],
        vec!["omega".into(), fmt_num(omega)],
        vec!["depth".into(), depth.to_string()],
    ];
    match &verdict.decision {
        StabilityDecision::StableCertified { certificate } => {
            let (kind, r, c) = match certificate {
                StabilityCertificate::Condition3 { r, c } => ("profile_shift", r, c),
                StabilityCertificate::Remc { c, r } => ("band_growth", r, c),
            };
            rows.push(vec!["certificate".into(), kind.into()]);
            rows.push(vec!["r".into(), r.to_string()]);
            rows.push(vec!["c".into(), fmt_num(*c)]);
        }
        StabilityDecision::NotStableAtHorizon { tables } | StabilityDecision::Inconclusive { tables } => {
            for t in tables {
                let last = t.rows.last().map_or(f64::NAN, |r| r.1);
                rows.push(vec![format!("final_ratio_r{}", t.r), fmt_num(last)]);
            }
        }
    }
    rows.push(vec!["band_growth".into(), match remc {
        RemcVerdict::Holds { c, .. } => format!("holds c={}", fmt_num(c)),
        RemcVerdict::FailsAt { n, j, .. } => format!("fails n={n} j={j}"),
    }]);
    rows.push(vec!["consistent".into(), consistent.to_string()]);

    #[derive(Serialize)]
    struct R {
        sequence: String,
        omega: f64,
        depth: usize,
        verdict: calkin_core::calkin::StabilityVerdict,
        band_growth: RemcVerdict,
        consistent: bool,
    }
    let mut out = render(
        "stability",
        cfg,
        "calkin::stability_condition3, calkin::remc_sufficient",
        "the principal ideal is stable iff M~_n <= C K~_{n+r} for some r, C",
        R { sequence: spec.into(), omega, depth, verdict, band_growth: remc, consistent },
        &["field", "value"],
        rows,
    )?;
    if !consistent {
        out.exit = EXIT_CERTIFICATE;
    }
    Ok(out)
}

fn cmd_elemop(cmd: &ElemopCmd, cfg: &RunConfig) -> Result<Output, HarnessError> {
    match cmd {
        ElemopCmd::Bounds { op, omega } => {
            let phi = read_op(op)?;
            let (a, b) = single_pair(&phi)?;
            let grid: Vec<f64> = omega.map_or(DEFAULT_OMEGA_GRID.to_vec(), |w| vec![w]);
            let table = bound_table(a, b, &grid)?;
            self_check_bounds(a, b, &grid, &table, cfg)?;
            let rows = table
                .iter()
                .map(|r| vec![r.index.to_string(), fmt_num(r.lower), fmt_num(r.upper), fmt_num(r.envelope)])
                .collect();
            render(
                "elemop-bounds",
                cfg,
                "elemop::bound_table",
                "h_n(M_{A,B}) >= (s(A) (x) s(B))(n)/sqrt(n) and a_n(M_{A,B}) <= 6.75 (s(A) (x) s(B))(n)",
                serde_json::json!({ "grid": grid, "rows": table }),
                &["index", "lower", "upper", "envelope"],
                rows,
            )
        }
        ElemopCmd::Recover { op, target } => {
            let phi = read_op(op)?;
            if *target == 0 || *target > phi.len() {
                return Err(Error::IndexOutOfRange { index: *target, max: phi.len() }.into());
            }
            let rec = recover_first_symbol(&phi, target - 1, cfg.seed)?;
            if rec.residual >= 1e-8 {
                return Err(HarnessError::Certificate(format!("reconstruction residual {:e}", rec.residual)));
            }
            if rec.inequality.iter().any(|&(_, l, r)| l > r + cfg.tolerances.ineq) {
                return Err(HarnessError::Certificate("singular-number inequality violated".into()));
            }
            let mut rows: Vec<Vec<String>> = vec![
                vec!["residual".into(), fmt_num(rec.residual), String::new()],
                vec!["r".into(), rec.r.to_string(), String::new()],
            ];
            rows.extend(rec.inequality.iter().map(|(n, l, r)| vec![format!("n={n}"), fmt_num(*l), fmt_num(*r)]));
            render(
                "elemop-recover",
                cfg,
                "elemop::recover_first_symbol",
                "A_1 = sum_j psi_j Phi phi_j, so s_{rn-r+1}(A_1) <= sum_j s_n(psi_j Phi phi_j)",
                serde_json::json!({ "target": target, "recovery": rec }),
                &["item", "lhs", "rhs"],
                rows,
            )
        }
        ElemopCmd::Minimal { op } => {
            let phi = read_op(op)?;
            let (value, rows) = match minimal_representation(&phi) {
                Ok(m) => {
                    let len = m.len();
                    (serde_json::json!({ "zero_operator": false, "length": len, "operator": m }), vec![
                        vec!["length".into(), len.to_string()],
                    ])
                }
                Err(Error::ZeroOperator) => (serde_json::json!({ "zero_operator": true, "length": 0 }), vec![
                    vec!["length".into(), "0".into()],
                ]),
                Err(e) => return Err(e.into()),
            };
            render(
                "elemop-minimal",
                cfg,
                "elemop::minimal_representation",
                "every elementary operator has a representation with independent A's and B's",
                value,
                &["field", "value"],
                rows,
            )
        }
        ElemopCmd::Hsnums { op } => {
            let phi = read_op(op)?;
            let s = hs_singular_numbers(&phi)?;
            // for one pair the numbers are the products s_i(A) s_j(B)
            let law_error = match phi.symbols() {
                [(a, b)] => {
                    let law = top_products(&singular_values(a)?, &singular_values(b)?, s.len());
                    Some(s.prefix().iter().zip(&law).map(|(x, t)| (x - t.value).abs()).fold(0.0, f64::max))
                }
                _ => None,
            };
            if law_error.is_some_and(|e| e > cfg.tolerances.ineq) {
                return Err(HarnessError::Certificate(format!("product law off by {:e}", law_error.unwrap_or(0.0))));
            }
            render(
                "elemop-hsnums",
                cfg,
                "elemop::hs_singular_numbers",
                "s(M_{A,B}) on Hilbert-Schmidt space is s(A) (x) s(B)",
                serde_json::json!({ "values": s.prefix(), "product_law_error": law_error }),
                &["n", "value"],
                seq_rows(s.prefix()),
            )
        }
    }
}

/// Re-verifies every witness and the ordering of the table; any failure is
/// a certificate failure.
fn self_check_bounds(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    grid: &[f64],
    table: &[calkin_core::elemop::BoundRow],
    cfg: &RunConfig,
) -> Result<(), HarnessError> {
    let tol = cfg.tolerances.ineq;
    let upper = a_upper_bounds_grid(a, b, grid, table.len())?;
    for u in &upper {
        if !verify_witness(u, a, b)? {
            return Err(HarnessError::Certificate(format!("upper witness at index {} failed", u.index)));
        }
    }
    let e1: Vec<f64> = std::iter::once(1.0).chain(std::iter::repeat(0.0)).take(a.rows()).collect();
    let e1b: Vec<f64> = std::iter::once(1.0).chain(std::iter::repeat(0.0)).take(b.rows()).collect();
    for l in h_lower_bounds(a, b, &e1, &e1b)? {
        if !verify_witness(&l, a, b)? {
            return Err(HarnessError::Certificate(format!("lower witness at index {} failed", l.index)));
        }
    }
    for r in table {
        if r.lower > r.upper + tol || r.upper > r.envelope + tol {
            return Err(HarnessError::Certificate(format!("bounds out of order at index {}", r.index)));
        }
    }
    Ok(())
}

fn cmd_verify_all(cfg: &RunConfig) -> Result<Output, HarnessError> {
    let report = run_all(cfg);
    for c in &report.criteria {
        eprintln!("{}", c.line());
    }
    eprintln!("total {:.2} s", report.elapsed.as_secs_f64());
    let exit = match report.criteria.iter().find(|c| !c.passed) {
        None if report.within_total_budget => 0,
        None => EXIT_CERTIFICATE,
        Some(c) if c.tolerance_induced => EXIT_TOLERANCE,
        Some(_) => EXIT_CERTIFICATE,
    };
    let rows: Vec<Vec<String>> = report
        .criteria
        .iter()
        .map(|c| {
            let measured: Vec<String> = c.measured.iter().map(|(k, v)| format!("{k}={}", fmt_num(*v))).collect();
            vec![
                c.id.to_string(),
                c.title.into(),
                c.operation.into(),
                c.claim.into(),
                if c.passed { "pass" } else { "fail" }.into(),
                c.tolerance_induced.to_string(),
                measured.join(";"),
            ]
        })
        .collect();
    let json = json_report("verify-all", cfg, &report)?;
    let csv = csv_report(&["id", "title", "operation", "claim", "status", "tolerance_induced", "measured"], &rows)?;
    Ok(Output { name: "verify-all", json, csv, exit })
}

fn emit(out: &Output, cfg: &RunConfig) -> Result<(), HarnessError> {
    let (body, ext) = match cfg.format {
        Format::Json => (&out.json, "json"),
        Format::Csv => (&out.csv, "csv"),
    };
    match &cfg.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}.{ext}", out.name));
            std::fs::write(&path, body)?;
            println!("{}", path.display());
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<i32, HarnessError> {
    let cfg = config_from(cli)?;
    let out = match &cli.cmd {
        Cmd::Seq { cmd } => cmd_seq(cmd, &cfg)?,
        Cmd::Stability { seq, omega } => cmd_stability(seq, *omega, cli, &cfg)?,
        Cmd::Elemop { cmd } => cmd_elemop(cmd, &cfg)?,
        Cmd::VerifyAll => cmd_verify_all(&cfg)?,
    };
    emit(&out, &cfg)?;
    Ok(out.exit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("calkin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
