//! Batch front end: graph and decomposition checks, containment searches,
//! strip and signature reports, refinement runs, assemblage tooling and the
//! lemma suites.

mod report;

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use gwb_core::assemblage::{encoding_at, find_simulation_with_deadline, AnchoredDecomposition, QAssemblage};
use gwb_core::decomp::{metrics, validate, RootedDecomposition};
use gwb_core::error::Error;
use gwb_core::graph::Multigraph;
use gwb_core::quasiorder::{validate_quasi_order, FiniteQuasiOrder};
use gwb_core::realize::{decoration_from_decomposition, gamma_elevation, node_realizer};
use gwb_core::suites::{canonical_orderings, run_suite, Outcome, SuiteName};
use gwb_core::topo::{find_embedding_with_deadline, robertson_chain};

use report::{digest_of, RunReport};

#[derive(Parser)]
#[command(name = "gwb", version, about = "structural graph workbench")]
struct Cli {
    /// Echo wall-clock timing into the report (off keeps reports
    /// byte-identical across runs)
    #[arg(long, global = true)]
    timing: bool,
    /// Global timeout for embedding and simulation searches, in
    /// milliseconds (overridden by GWB_TIMEOUT_MS)
    #[arg(long, global = true)]
    timeout_ms: Option<u64>,
    /// Write a DOT rendering of the primary input graph to this file
    #[arg(long, global = true)]
    dot: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    /// Multigraph JSON file
    #[arg(long)]
    graph: String,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a rooted tree-decomposition against its host graph
    ValidateTd {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        td: String,
    },
    /// Width, adhesion and nestedness of a decomposition
    Metrics {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        td: String,
    },
    /// Emit the Robertson chain of length k
    Rc {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Topological-minor test: does the host contain the pattern?
    Tm {
        /// pattern graph JSON
        #[arg(long)]
        pattern: String,
        #[command(flatten)]
        graph: GraphArg,
        /// optional quasi-order JSON for label-constrained containment
        #[arg(long)]
        order: Option<String>,
    },
    /// Pairwise containment matrix of a labelled family
    Antichain {
        /// graph JSON files, in order
        #[arg(long, num_args = 1..)]
        family: Vec<String>,
        #[arg(long)]
        order: Option<String>,
    },
    /// Maximal strips for a given Z and s; optionally try to break the
    /// longest one
    Strips {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        td: String,
        /// Z as comma-separated vertices (empty for ∅)
        #[arg(long, default_value = "")]
        z: String,
        #[arg(long)]
        s: usize,
        /// attempt an alpha-breaking pseudo-edge-cut for the longest strip
        #[arg(long)]
        alpha: Option<usize>,
    },
    /// Depth table and elevation of a decomposition
    Elevation {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        td: String,
        #[arg(long, default_value_t = 14)]
        host_limit: usize,
    },
    /// Exact incorporated-separation signature
    Signature {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        td: String,
        #[arg(long)]
        max_order: usize,
    },
    /// Run the refinement driver to a linked, integrated, nested output
    Refine {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        td: String,
        #[arg(long = "N", visible_alias = "n", default_value_t = 1)]
        n: usize,
        #[arg(long)]
        max_order: Option<usize>,
        #[arg(long, default_value_t = 200)]
        step_limit: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Does the second assemblage simulate the first?
    Simulate {
        #[arg(long)]
        small: String,
        #[arg(long)]
        big: String,
    },
    /// Encoding of an anchored assemblage at a node
    Encode {
        #[arg(long)]
        assemblage: String,
        #[arg(long)]
        anchored: String,
        #[arg(long)]
        node: Option<String>,
    },
    /// Node-realizer and Γ-elevation of an anchored assemblage
    Realizer {
        #[arg(long)]
        assemblage: String,
        #[arg(long)]
        anchored: String,
        #[arg(long, default_value_t = 14)]
        host_limit: usize,
    },
    /// Extract the decorated tree of an unimpeded anchored decomposition
    Decorate {
        #[arg(long)]
        assemblage: String,
        #[arg(long)]
        anchored: String,
        #[arg(long = "N", visible_alias = "n", default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        h: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
    },
    /// Run a verification suite, or replay a dumped counterexample
    Suite {
        /// one of: lemma41 lemma33 lemma43 lemma44 lemma62 claim3 claim4
        /// menger embed-oracle
        name: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        /// replay a counterexample JSON file instead of sampling
        #[arg(long)]
        replay: Option<String>,
    },
}

fn read_input(report: &mut RunReport, path: &str) -> Result<String, Error> {
    let bytes = fs::read(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    report.inputs.push(digest_of(path, &bytes));
    String::from_utf8(bytes).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

fn to_dot_graph(g: &Multigraph) -> String {
    let mut s = String::from("graph {\n");
    for v in g.vertices() {
        s.push_str(&format!("  \"{v}\";\n"));
    }
    for (u, v) in g.edges() {
        s.push_str(&format!("  \"{u}\" -- \"{v}\";\n"));
    }
    s.push_str("}\n");
    s
}

fn deadline_from(cli_timeout: Option<u64>) -> Option<Instant> {
    let env = std::env::var("GWB_TIMEOUT_MS").ok().and_then(|v| v.parse::<u64>().ok());
    env.or(cli_timeout).map(|ms| Instant::now() + Duration::from_millis(ms))
}

fn seed_override(seed: u64) -> u64 {
    std::env::var("GWB_SEED")
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .unwrap_or(seed)
}

fn run(cli: Cli) -> Result<(RunReport, u8), Error> {
    let deadline = deadline_from(cli.timeout_ms);
    let dot_out = cli.dot.clone();
    let write_dot = |g: &Multigraph| -> Result<(), Error> {
        if let Some(path) = &dot_out {
            fs::write(path, to_dot_graph(g)).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
        }
        Ok(())
    };
    match cli.command {
        Command::ValidateTd { graph, td } => {
            let mut rep = RunReport::new("validate-td");
            let g = Multigraph::parse(&read_input(&mut rep, &graph.graph)?)?;
            let d = RootedDecomposition::parse(&read_input(&mut rep, &td)?)?;
            write_dot(&g)?;
            match validate(&g, &d) {
                Ok(()) => {
                    rep.results = json!({"ok": true});
                    Ok((rep, 0))
                }
                Err(v) => {
                    rep.results = json!({"ok": false, "violation": v});
                    Ok((rep, 1))
                }
            }
        }
        Command::Metrics { graph, td } => {
            let mut rep = RunReport::new("metrics");
            let g = Multigraph::parse(&read_input(&mut rep, &graph.graph)?)?;
            let d = RootedDecomposition::parse(&read_input(&mut rep, &td)?)?;
            if let Err(v) = validate(&g, &d) {
                rep.results = json!({"ok": false, "violation": v});
                return Ok((rep, 1));
            }
            rep.results = serde_json::to_value(metrics(&d))?;
            Ok((rep, 0))
        }
        Command::Rc { k, out } => {
            let mut rep = RunReport::new("rc");
            let g = robertson_chain(k)?;
            write_dot(&g)?;
            let text = g.serialize();
            if let Some(path) = out {
                fs::write(&path, &text).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
                rep.results = json!({"written": path, "vertices": g.n(), "edges": g.m()});
            } else {
                rep.results = serde_json::from_str(&text)?;
            }
            Ok((rep, 0))
        }
        Command::Tm {
            pattern,
            graph,
            order,
        } => {
            let mut rep = RunReport::new("tm");
            let h = Multigraph::parse(&read_input(&mut rep, &pattern)?)?;
            let g = Multigraph::parse(&read_input(&mut rep, &graph.graph)?)?;
            write_dot(&g)?;
            let q = match order {
                Some(path) => {
                    let q = FiniteQuasiOrder::parse(&read_input(&mut rep, &path)?)?;
                    if let Err(v) = validate_quasi_order(&q) {
                        rep.results = json!({"ok": false, "order_violation": v});
                        return Ok((rep, 2));
                    }
                    Some(q)
                }
                None => None,
            };
            let leq = q.as_ref().map(|q| {
                move |a: &str, b: &str| q.leq(a, b).unwrap_or(false)
            });
            let found = match &leq {
                Some(f) => find_embedding_with_deadline(&h, &g, Some(f), deadline),
                None => find_embedding_with_deadline(&h, &g, None, deadline),
            };
            match found {
                Ok(Some(e)) => {
                    rep.results = json!({"contains": true, "embedding": e});
                    Ok((rep, 0))
                }
                Ok(None) => {
                    rep.results = json!({"contains": false});
                    Ok((rep, 1))
                }
                Err(Error::Timeout) => {
                    rep.results = json!({"verdict": "undecided"});
                    Ok((rep, 3))
                }
                Err(e) => Err(e),
            }
        }
        Command::Antichain { family, order } => {
            let mut rep = RunReport::new("antichain");
            let mut graphs = Vec::new();
            for path in &family {
                graphs.push(Multigraph::parse(&read_input(&mut rep, path)?)?);
            }
            let q = match order {
                Some(path) => Some(FiniteQuasiOrder::parse(&read_input(&mut rep, &path)?)?),
                None => None,
            };
            if let Some(q) = &q {
                if let Err(v) = validate_quasi_order(q) {
                    rep.results = json!({"ok": false, "order_violation": v});
                    return Ok((rep, 2));
                }
            }
            let k = graphs.len();
            let mut matrix = vec![vec![false; k]; k];
            let mut undecided = false;
            for i in 0..k {
                for j in 0..k {
                    let leq = q.as_ref().map(|q| {
                        move |a: &str, b: &str| q.leq(a, b).unwrap_or(false)
                    });
                    let r = match &leq {
                        Some(f) => find_embedding_with_deadline(&graphs[i], &graphs[j], Some(f), deadline),
                        None => find_embedding_with_deadline(&graphs[i], &graphs[j], None, deadline),
                    };
                    match r {
                        Ok(found) => matrix[i][j] = found.is_some(),
                        Err(Error::Timeout) => {
                            undecided = true;
                            matrix[i][j] = false;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            let antichain = !undecided
                && (0..k).all(|i| (0..k).all(|j| i == j || !matrix[i][j]));
            rep.results = json!({
                "matrix": matrix,
                "antichain_certificate": antichain,
                "undecided": undecided,
            });
            let code = if undecided {
                3
            } else if antichain {
                0
            } else {
                1
            };
            Ok((rep, code))
        }
        Command::Strips { graph, td, z, s, alpha } => {
            let mut rep = RunReport::new("strips");
            let g = Multigraph::parse(&read_input(&mut rep, &graph.graph)?)?;
            let d = RootedDecomposition::parse(&read_input(&mut rep, &td)?)?;
            let zset: gwb_core::graph::VertexSet = z
                .split(',')
                .filter(|x| !x.is_empty())
                .map(|x| x.to_string())
                .collect();
            let strips = gwb_core::strips::find_strips(&g, &d, &zset, s)?;
            let depth = strips.iter().map(|x| x.len()).max().unwrap_or(0);
            let broken = match (alpha, strips.iter().max_by_key(|x| x.len())) {
                (Some(a), Some(longest)) => {
                    let cut = gwb_core::strips::break_strip(&g, &d, longest, a)?;
                    Some(json!({"strip": longest, "alpha": a, "cut": cut}))
                }
                _ => None,
            };
            rep.results = json!({"strips": strips, "depth": depth, "breaking": broken});
            Ok((rep, 0))
        }
        Command::Elevation {
            graph,
            td,
            host_limit,
        } => {
            let mut rep = RunReport::new("elevation");
            let g = Multigraph::parse(&read_input(&mut rep, &graph.graph)?)?;
            let d = RootedDecomposition::parse(&read_input(&mut rep, &td)?)?;
            let r = gwb_core::strips::depth_and_elevation(&g, &d, host_limit)?;
            rep.results = serde_json::to_value(&r)?;
            Ok((rep, 0))
        }
        Command::Signature {
            graph,
            td,
            max_order,
        } => {
            let mut rep = RunReport::new("signature");
            let g = Multigraph::parse(&read_input(&mut rep, &graph.graph)?)?;
            let d = RootedDecomposition::parse(&read_input(&mut rep, &td)?)?;
            let sig = gwb_core::refine::signature(&g, &d, max_order)?;
            rep.results = json!({"max_order": sig.max_order, "counts": sig.flat()});
            Ok((rep, 0))
        }
        Command::Refine {
            graph,
            td,
            n,
            max_order,
            step_limit,
            out,
        } => {
            let mut rep = RunReport::new("refine");
            let g = Multigraph::parse(&read_input(&mut rep, &graph.graph)?)?;
            let d = RootedDecomposition::parse(&read_input(&mut rep, &td)?)?;
            let mo = max_order.unwrap_or(((metrics(&d).width + 1).max(1)) as usize);
            let result = gwb_core::refine::refine_driver(&g, &d, n, mo, step_limit)?;
            let out_json = serde_json::to_value(&result.decomposition)?;
            if let Some(path) = out {
                fs::write(&path, serde_json::to_string(&out_json)?)
                    .map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            }
            rep.results = json!({
                "decomposition": out_json,
                "trace": result.trace,
                "metrics": metrics(&result.decomposition),
            });
            Ok((rep, 0))
        }
        Command::Simulate { small, big } => {
            let mut rep = RunReport::new("simulate");
            let s: QAssemblage = QAssemblage::parse(&read_input(&mut rep, &small)?)?;
            let b: QAssemblage = QAssemblage::parse(&read_input(&mut rep, &big)?)?;
            match find_simulation_with_deadline(&s, &b, deadline) {
                Ok(Some(w)) => {
                    rep.results = json!({"simulates": true, "embedding": w.embedding, "iota": w.iota});
                    Ok((rep, 0))
                }
                Ok(None) => {
                    rep.results = json!({"simulates": false});
                    Ok((rep, 1))
                }
                Err(Error::Timeout) => {
                    rep.results = json!({"verdict": "undecided"});
                    Ok((rep, 3))
                }
                Err(e) => Err(e),
            }
        }
        Command::Encode {
            assemblage,
            anchored,
            node,
        } => {
            let mut rep = RunReport::new("encode");
            let s: QAssemblage = QAssemblage::parse(&read_input(&mut rep, &assemblage)?)?;
            let ad: AnchoredDecomposition = serde_json::from_str(&read_input(&mut rep, &anchored)?)?;
            ad.validate(&s)?;
            let t = node.unwrap_or_else(|| ad.decomp.root().to_string());
            let enc = encoding_at(&s, &ad, &t, &canonical_orderings(&ad))?;
            rep.results = serde_json::to_value(&enc)?;
            Ok((rep, 0))
        }
        Command::Realizer {
            assemblage,
            anchored,
            host_limit,
        } => {
            let mut rep = RunReport::new("realizer");
            let s: QAssemblage = QAssemblage::parse(&read_input(&mut rep, &assemblage)?)?;
            let ad: AnchoredDecomposition = serde_json::from_str(&read_input(&mut rep, &anchored)?)?;
            let rz = node_realizer(&s, &ad)?;
            let ge = gamma_elevation(&s, &ad, &rz, host_limit)?;
            rep.results = json!({
                "realizer": rz.decomp,
                "new_root": rz.new_root,
                "gamma_elevation": ge,
            });
            Ok((rep, 0))
        }
        Command::Decorate {
            assemblage,
            anchored,
            n,
            h,
            d,
        } => {
            let mut rep = RunReport::new("decorate");
            let s: QAssemblage = QAssemblage::parse(&read_input(&mut rep, &assemblage)?)?;
            let ad: AnchoredDecomposition = serde_json::from_str(&read_input(&mut rep, &anchored)?)?;
            let (tree, drep) = decoration_from_decomposition(&s, &ad, n, h, d, 14)?;
            rep.results = json!({
                "decorated_tree": serde_json::from_str::<serde_json::Value>(&tree.serialize())?,
                "choppers": drep.choppers,
                "levels": drep.levels,
                "n_prime": drep.n_prime,
            });
            Ok((rep, 0))
        }
        Command::Suite {
            name,
            seed,
            count,
            replay,
        } => {
            let mut rep = RunReport::new("suite");
            if let Some(path) = replay {
                let ce: serde_json::Value = serde_json::from_str(&read_input(&mut rep, &path)?)?;
                let outcome = gwb_core::suites::replay(&ce)?;
                let (verdict, code) = match outcome {
                    Outcome::Pass => ("pass", 0),
                    Outcome::Fail(_) => ("fail", 1),
                    Outcome::Undecided => ("undecided", 3),
                };
                rep.results = json!({"replay": path, "verdict": verdict});
                return Ok((rep, code));
            }
            let Some(name) = name else {
                return Err(Error::Precondition(format!(
                    "suite name required; one of {:?}",
                    SuiteName::all()
                )));
            };
            let suite = SuiteName::parse(&name)?;
            let seed = seed_override(seed);
            rep.seed = Some(seed);
            let tally = run_suite(suite, seed, count, deadline)?;
            let code = if tally.failed > 0 {
                1
            } else if tally.undecided > 0 {
                3
            } else {
                0
            };
            rep.results = serde_json::to_value(&tally)?;
            Ok((rep, code))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let timing = cli.timing;
    let started = Instant::now();
    match run(cli) {
        Ok((mut rep, code)) => {
            if timing {
                rep.timing_ms = Some(started.elapsed().as_millis());
            }
            rep.print();
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::SizeGuard { .. } | Error::SearchCap(_) | Error::StepLimit(_) | Error::Timeout => 3,
                Error::Parse(_) | Error::UnknownVertex(_) | Error::UnknownNode(_) | Error::Precondition(_) => 2,
                Error::Internal(_) => 4,
            };
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_rendering() {
        let g = gwb_core::graph::graph_of(&["a", "b"], &[("a", "b"), ("a", "b")]);
        let dot = to_dot_graph(&g);
        assert!(dot.contains("\"a\" -- \"b\""));
        assert_eq!(dot.matches("--").count(), 2);
    }
}
