use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cpm_core::bbside::{hms_check, perf_tcnc, TcncCurve};
use cpm_core::cpmcat::random::random_glued_object;
use cpm_core::cpmcat::{cover_of, euler_pairing, CoverPresentation, GluedObject};
use cpm_core::moves::{edge_name, graph_hash, reduce_to_unit_weights, verify_transport, RewriteTrace};
use cpm_core::quiverize::{quiver_of, Fishbone};
use cpm_core::ribbon::{dualizable_skeleton, faces, graph_to_json, to_dot, wheel_skeleton, DualizableSpec, Skeleton};
use cpm_core::Field;

#[derive(Parser)]
#[command(name = "cpm", version, about = "Constructible plumbing models on chordal ribbon graphs")]
struct Cli {
    /// Q or a prime p
    #[arg(long, global = true, default_value = "32003")]
    field: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory for written files
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    emit_dot_per_step: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct GraphArgs {
    #[arg(long)]
    genus: Option<u8>,
    /// Comma-separated weight vector
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<usize>>,
    #[arg(long, num_args = 2, value_names = ["A1", "A2"])]
    wheel: Option<Vec<usize>>,
    #[arg(long)]
    fishbone: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a graph and report faces and genus
    Build {
        #[command(flatten)]
        g: GraphArgs,
        /// Also write DOT
        #[arg(long)]
        dot: bool,
    },
    /// Quiver of a fishbone JSON file
    Quiverize { file: PathBuf },
    /// Stalk homology of a glued object (read from a file or drawn at random)
    Stalks {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long)]
        object: Option<PathBuf>,
    },
    /// Reduce a dualizable graph to unit weights
    Reduce {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long, default_value_t = 0)]
        track_random: usize,
    },
    /// Re-check a rewrite trace
    Verify { trace: PathBuf },
    /// Compare B-side and CPM presentations
    HmsCheck {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long, default_value_t = 2)]
        samples: usize,
    },
    /// Pairwise Euler pairings of random objects
    Euler {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
}

enum Failure {
    Input(anyhow::Error),
    Verify(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn parse_field(s: &str) -> Result<Field> {
    if s.eq_ignore_ascii_case("q") {
        return Ok(Field::Q);
    }
    let p: u64 = s.trim_start_matches(['F', 'f', 'p']).parse().with_context(|| format!("bad field {s:?}"))?;
    Ok(Field::fp(p)?)
}

fn read_json(p: &Path) -> Result<Value> {
    let s = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    serde_json::from_str(&s).with_context(|| format!("parsing {}", p.display()))
}

fn spec(g: &GraphArgs) -> Result<DualizableSpec> {
    match (g.genus, &g.weights) {
        (Some(genus), Some(w)) => Ok(DualizableSpec::new(genus, w.clone())?),
        _ => bail!("need --genus and --weights"),
    }
}

fn skeleton(g: &GraphArgs) -> Result<Skeleton> {
    if let Some(w) = &g.wheel {
        return Ok(wheel_skeleton(w[0], w[1])?);
    }
    if let Some(p) = &g.fishbone {
        return Ok(Fishbone::from_json(&read_json(p)?)?.skeleton());
    }
    Ok(dualizable_skeleton(&spec(g)?)?)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn write_out(dir: &Option<PathBuf>, name: &str, body: &str) -> Result<Option<PathBuf>> {
    let Some(d) = dir else { return Ok(None) };
    fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    let p = d.join(name);
    fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
    Ok(Some(p))
}

fn random_objects(cov: &CoverPresentation, field: Field, seed: u64, k: usize) -> Result<Vec<GluedObject>> {
    (0..k).map(|i| Ok(random_glued_object(cov, field, seed.wrapping_add(i as u64))?)).collect()
}

fn run(cli: &Cli) -> std::result::Result<Value, Failure> {
    let field = parse_field(&cli.field)?;
    match &cli.cmd {
        Cmd::Build { g, dot } => {
            let sk = skeleton(g)?;
            let graph = sk.to_graph().map_err(|e| anyhow!(e))?;
            let f = faces(&graph).map_err(|e| anyhow!(e))?;
            let gj = graph_to_json(&graph);
            write_out(&cli.out, "graph.json", &pretty(&gj))?;
            if *dot {
                write_out(&cli.out, "graph.dot", &to_dot(&graph))?;
            }
            let mut v = json!({
                "faces": f.count,
                "genus": f.genus,
                "components": f.components,
                "spokes": sk.spoke_total(),
                "hash": graph_hash(&sk).map_err(|e| anyhow!(e))?,
            });
            if cli.out.is_none() {
                v["graph"] = gj;
            }
            Ok(v)
        }
        Cmd::Quiverize { file } => {
            let f = Fishbone::from_json(&read_json(file)?).map_err(|e| anyhow!(e))?;
            let q = quiver_of(&f).map_err(|e| anyhow!(e))?;
            let mut v = q.to_json();
            v["pattern"] = json!(q.pattern());
            write_out(&cli.out, "quiver.json", &pretty(&v))?;
            Ok(v)
        }
        Cmd::Stalks { g, object } => {
            let x = match object {
                Some(p) => GluedObject::from_json(&read_json(p)?).map_err(|e| anyhow!(e))?,
                None => {
                    let cov = cover_of(&skeleton(g)?.to_graph().map_err(|e| anyhow!(e))?).map_err(|e| anyhow!(e))?;
                    random_objects(&cov, field, cli.seed, 1)?.remove(0)
                }
            };
            let mut stalks = serde_json::Map::new();
            for e in x.cover.edges().map_err(|e| anyhow!(e))? {
                let h = x.stalk(e).map_err(|e| anyhow!(e))?.homology().0;
                stalks.insert(edge_name(&e), json!(h));
            }
            Ok(json!({"valid": x.is_valid(), "stalks": stalks}))
        }
        Cmd::Reduce { g, track_random } => {
            let sk = dualizable_skeleton(&spec(g)?).map_err(|e| anyhow!(e))?;
            let cov = cover_of(&sk.to_graph().map_err(|e| anyhow!(e))?).map_err(|e| anyhow!(e))?;
            let xs = random_objects(&cov, field, cli.seed, *track_random)?;
            let (end, _, trace) = reduce_to_unit_weights(&sk, &xs).map_err(|e| anyhow!(e))?;
            let tj = trace.to_json().map_err(|e| anyhow!(e))?;
            let path = write_out(&cli.out, "trace.json", &pretty(&tj))?;
            if cli.emit_dot_per_step {
                write_out(&cli.out, "step_0.dot", &to_dot(&trace.graph.to_graph().map_err(|e| anyhow!(e))?))?;
                for (k, s) in trace.steps.iter().enumerate() {
                    let d = to_dot(&s.graph.to_graph().map_err(|e| anyhow!(e))?);
                    write_out(&cli.out, &format!("step_{}.dot", k + 1), &d)?;
                }
            }
            let rep = verify_transport(&trace);
            let weights = cpm_core::ribbon::dualizable_weights(&end).map_err(|e| anyhow!(e))?.weights;
            let v = json!({
                "steps": trace.steps.len(),
                "weights": weights,
                "tracked": track_random,
                "trace": path.map(|p| p.display().to_string()),
                "verify": serde_json::to_value(&rep).map_err(|e| anyhow!(e))?,
            });
            if !rep.passed() {
                return Err(Failure::Verify(format!("step {}", rep.first_failure().unwrap_or(0))));
            }
            Ok(v)
        }
        Cmd::Verify { trace } => {
            let t = RewriteTrace::from_json(&read_json(trace)?).map_err(|e| anyhow!(e))?;
            let rep = verify_transport(&t);
            if let Some(k) = rep.first_failure() {
                let failed: Vec<&String> =
                    rep.steps[k].checks.iter().filter(|(_, ok)| !**ok).map(|(n, _)| n).collect();
                return Err(Failure::Verify(format!("step {k}: {failed:?}")));
            }
            Ok(serde_json::to_value(&rep).map_err(|e| anyhow!(e))?)
        }
        Cmd::HmsCheck { g, samples } => {
            let s = spec(g)?;
            let c = TcncCurve::new(s.genus, s.weights).map_err(|e| anyhow!(e))?;
            let rep = hms_check(&c, *samples, cli.seed).map_err(|e| anyhow!(e))?;
            let pres = perf_tcnc(&c).map_err(|e| anyhow!(e))?;
            write_out(&cli.out, "presentation.json", &pretty(&pres.to_json()))?;
            let v = serde_json::to_value(&rep).map_err(|e| anyhow!(e))?;
            if !rep.passed() {
                emit(&v);
                return Err(Failure::Verify(rep.messages.join("; ")));
            }
            Ok(v)
        }
        Cmd::Euler { g, count } => {
            let cov = cover_of(&skeleton(g)?.to_graph().map_err(|e| anyhow!(e))?).map_err(|e| anyhow!(e))?;
            let xs = random_objects(&cov, field, cli.seed, *count)?;
            let m = xs
                .iter()
                .map(|x| xs.iter().map(|y| euler_pairing(x, y)).collect::<cpm_core::Result<Vec<_>>>())
                .collect::<cpm_core::Result<Vec<_>>>()
                .map_err(|e| anyhow!(e))?;
            Ok(json!({"euler": m}))
        }
    }
}

fn emit(v: &Value) {
    // a closed pipe is not an error for a report printer
    let _ = writeln!(std::io::stdout().lock(), "{}", pretty(v));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Verify(s)) => {
            eprintln!("verification failed at {s}");
            ExitCode::from(3)
        }
    }
}
