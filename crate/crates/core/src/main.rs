use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use arclab::arcs::{
    all_completions, completions_through, coverage, greedy_complete, Arc, ArcFile, Coverage,
    SearchOrder,
};
use arclab::claims::{emit, list_claims, parse_q_list, run_claim, ClaimId, Format, RunOptions, Status};
use arclab::conic::{ConicContext, PointClass};
use arclab::curves::{analyze, build_quartic, build_segre_curve, CurveFile, HomPoly};
use arclab::field::make_field;
use arclab::plane::Plane;

#[derive(Parser)]
#[command(name = "arclab", version, about = "Arcs on the conic XY = Z^2 in PG(2,q), q odd")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run claim checks and emit a report; exits 1 if any claim is refuted.
    Verify(VerifyArgs),
    /// List the registered claims.
    Claims,
    /// Build K = H + R0 and print or save it as an arc file.
    Construct {
        #[arg(long)]
        q: u64,
        /// Write the arc file here instead of stdout.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Coverage of H (or of an arc file): free points and covered count.
    FreePoints {
        #[arg(long)]
        q: Option<u64>,
        /// Arc file to use instead of H.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// Complete H (or an arc file), greedily or exhaustively.
    Complete {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        from: Option<PathBuf>,
        /// Maximum number of added points in the exhaustive search.
        #[arg(long, default_value_t = 4)]
        cap: usize,
        /// Enumerate every completion with at most `cap` additions.
        #[arg(long)]
        exhaustive: bool,
        /// Only completions containing an internal point free for the arc.
        #[arg(long, requires = "exhaustive")]
        through_internal: bool,
        /// Try free points in reverse enumeration order.
        #[arg(long)]
        reverse: bool,
    },
    /// Analyze a plane curve: points, singularities, genus, Hasse–Weil.
    Curve(CurveArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Claim id, or `all`.
    #[arg(long, default_value = "all")]
    claim: String,
    /// Field orders: `a,b,c`, `a..b` or a mix; defaults per claim.
    #[arg(long)]
    q: Option<String>,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report elapsed_ms as 0 so repeated runs are byte-identical.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    q: Option<u64>,
    /// Parameters `a,b,c,mu` of (cX^2Z^2 - bZ^4) - mu Y^2(aX^2 - cZ^2), as encoded field elements.
    #[arg(long, conflicts_with_all = ["quartic", "from"])]
    segre: Option<String>,
    /// Parameter `mu'` of X^2Y^2 - mu' Z^2(X^2+Y^2).
    #[arg(long, conflicts_with = "from")]
    quartic: Option<u64>,
    /// Curve file `{q, d, monomials}`.
    #[arg(long)]
    from: Option<PathBuf>,
    /// Count tolerance on top of 2g sqrt(q); defaults to the number of rational singular points.
    #[arg(long)]
    slack: Option<u32>,
    /// Also save the curve as a curve file.
    #[arg(long)]
    emit: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn write_out(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn pretty<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// The arc named on the command line: an arc file, or H for the given q.
fn load_arc(q: Option<u64>, from: Option<&PathBuf>) -> Result<Arc> {
    match (q, from) {
        (_, Some(path)) => Ok(read_json::<ArcFile>(path)?.to_arc()?),
        (Some(q), None) => {
            let conic = ConicContext::new(make_field(q)?);
            Ok(Arc::new(conic.plane(), conic.build_h().h)?)
        }
        (None, None) => bail!("give --q or --from"),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify(args) => verify(args),
        Command::Claims => {
            print!("{}", pretty(&list_claims())?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Construct { q, emit } => {
            let conic = ConicContext::new(make_field(q)?);
            let hs = conic.build_h();
            let r0 = conic.choose_r0();
            let mut points = hs.h.clone();
            points.push(r0);
            let arc = Arc::new(conic.plane(), points)?;
            let mut file = arc.to_file();
            file.h = Some(hs.h.iter().map(|p| p.encoded()).collect());
            file.r0 = Some(r0.encoded());
            write_out(&pretty(&file)?, emit.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::FreePoints { q, from } => {
            let arc = load_arc(q, from.as_ref())?;
            print!("{}", pretty(&coverage(&arc).export())?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Complete {
            q,
            from,
            cap,
            exhaustive,
            through_internal,
            reverse,
        } => {
            let arc = load_arc(q, from.as_ref())?;
            let order = if reverse {
                SearchOrder::Reverse
            } else {
                SearchOrder::Forward
            };
            if !exhaustive {
                let done = greedy_complete(&arc);
                print!("{}", pretty(&done.to_file())?);
            } else if through_internal {
                let conic = ConicContext::new(arc.plane().field().clone());
                let seeds: Vec<_> = coverage(&arc)
                    .with_flag(Coverage::Free)
                    .into_iter()
                    .filter(|&p| conic.classify_point(p) == PointClass::Internal)
                    .collect();
                print!("{}", pretty(&completions_through(&arc, &seeds, cap, order))?);
            } else {
                print!("{}", pretty(&all_completions(&arc, cap, order))?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Curve(args) => curve(args),
    }
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let format: Format = args.format.parse()?;
    let ids: Vec<ClaimId> = if args.claim.eq_ignore_ascii_case("all") {
        ClaimId::ALL.to_vec()
    } else {
        vec![args.claim.parse()?]
    };
    let explicit = args.q.as_deref().map(parse_q_list).transpose()?;
    let opts = RunOptions {
        timing: !args.deterministic,
    };
    let reports = ids
        .into_iter()
        .map(|id| {
            let qs = explicit.clone().unwrap_or_else(|| id.default_qs());
            run_claim(id, &qs, opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    write_out(&emit(&reports, format), args.out.as_ref())?;
    Ok(if reports.iter().any(|r| r.status == Status::Refuted) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn curve(args: CurveArgs) -> Result<ExitCode> {
    let (field, poly): (_, HomPoly) = if let Some(path) = &args.from {
        let file: CurveFile = read_json(path)?;
        let field = make_field(file.q as u64)?;
        let poly = file.to_poly(&field)?;
        (field, poly)
    } else {
        let q = args.q.context("give --q with --segre or --quartic")?;
        let field = make_field(q)?;
        let poly = if let Some(spec) = &args.segre {
            let vals = spec
                .split(',')
                .map(|s| Ok(field.elem(s.trim().parse()?)?))
                .collect::<Result<Vec<_>>>()?;
            let [a, b, c, mu] = vals[..] else {
                bail!("--segre expects four values a,b,c,mu");
            };
            build_segre_curve(&field, a, b, c, mu)?
        } else if let Some(mu) = args.quartic {
            build_quartic(&field, field.elem(mu)?)?
        } else {
            bail!("give --segre, --quartic or --from");
        };
        (field, poly)
    };
    if let Some(path) = &args.emit {
        fs::write(path, pretty(&poly.to_file(&field))?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let plane = Plane::new(field);
    print!("{}", pretty(&analyze(&plane, &poly, args.slack))?);
    Ok(ExitCode::SUCCESS)
}
