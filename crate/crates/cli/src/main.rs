//! `defmatch`: generate, match, verify and bound definable matchings, and
//! search for embedding witnesses.
//!
//! Exit status: 0 success, 1 verification failure, 2 usage error, 3 resource cap.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Deserialize;
use serde_json::{json, Value};

use defmatch::coverage::{match_with_defect, CoverageOptions, NmReading, Variant};
use defmatch::instances::{self, rng};
use defmatch::matching::{certify_no_short_paths, eliminate, validate_matching, ComponentJson, SymbolicMatching};
use defmatch::oracle::{self, ExplicitGraph, Vertex};
use defmatch::semigroup::{
    cancel, check_leq_0, check_leq_m, find_embedding, tarski_verdict, EmbeddingWitness, SearchBounds, TaggedUniverse,
    TarskiVerdict, WitnessJson,
};
use defmatch::{Error, GraphSpec, Limits, NiceGraph, SetSpec, Universe, UniverseSpec};

type Q = Ratio<u64>;

#[derive(Parser)]
#[command(name = "defmatch", version, about = "Definable matchings without short augmenting paths")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    /// Largest period of an eventually periodic set.
    #[arg(long, global = true)]
    cap_period: Option<u64>,
    /// Largest number of sequence prefixes one elimination may visit.
    #[arg(long, global = true)]
    cap_sequences: Option<u64>,
    /// Even steps of the neighborhood chain follow matched partners (M) or all edges (E).
    #[arg(long, global = true, value_enum, default_value = "M")]
    nm_reading: Reading,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reading {
    #[value(name = "M")]
    M,
    #[value(name = "E")]
    E,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    BothSides,
    ASide,
    Multigraph,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a random finite k-regular graph or a named preset as JSON.
    Gen {
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Vertices per side.
        #[arg(long, default_value_t = 10)]
        size: u64,
        /// Split A into up to this many pieces, each with its own map order.
        #[arg(long, default_value_t = 1)]
        pieces: usize,
        /// four-cycle, one-ended-path, hilbert-hotel or zigzag.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Check the nice-graph invariants of a graph file.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Remove all augmenting paths of length at most 2K+1.
    Match {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "K", default_value_t = 1)]
        big_k: usize,
        /// Initial matching (default empty).
        #[arg(long)]
        input_matching: Option<PathBuf>,
    },
    /// Check a matching symbolically and against an explicit window.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        input_matching: PathBuf,
        #[arg(long = "K", default_value_t = 1)]
        big_k: usize,
        #[arg(long, default_value_t = 1000)]
        window: u64,
    },
    /// Coverage sweep over random regular graphs (or one graph file) as CSV.
    Bound {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        size: u64,
        #[arg(long, default_value = "2")]
        m: Q,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        pieces: usize,
        #[arg(long, value_enum, default_value = "both-sides")]
        variant: VariantArg,
        #[arg(long, default_value_t = 1000)]
        window: u64,
    },
    /// Search for X ≤ Y, X ≤_m Y or X ≤_0 Y.
    Embed {
        /// JSON with "universe", "x" and "y".
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: Option<Q>,
        #[arg(long)]
        m_max: Option<u64>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Cancel k from a witness of kA ≤ kB.
    Cancel {
        /// JSON with "universe", "k", "a", "b" and "theta" (over k tagged copies).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "2")]
        m: Q,
    },
    /// Paradoxical decomposition or certified invariant measure.
    Tarski {
        /// JSON with "universe" and "x".
        #[arg(long)]
        input: Option<PathBuf>,
        /// Use the universe of a preset graph, with X the whole universe.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Maximum matching and short augmenting paths on an explicit graph.
    Oracle {
        /// Edge list ("na nb" header, then "a b" per line) or a graph JSON.
        #[arg(long)]
        input: PathBuf,
        /// Window for expanding a graph JSON.
        #[arg(long, default_value_t = 1000)]
        window: u64,
        /// Print the expanded edge list instead of matching it.
        #[arg(long)]
        export: bool,
        /// A matching JSON to test for augmenting paths.
        #[arg(long)]
        input_matching: Option<PathBuf>,
        #[arg(long = "K")]
        big_k: Option<usize>,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 2)]
    max_word_len: usize,
    #[arg(long, default_value_t = 3)]
    q_max: u64,
    #[arg(long, default_value_t = 20_000)]
    max_nodes: u64,
}

impl SearchArgs {
    fn bounds(&self) -> SearchBounds {
        SearchBounds { max_word_len: self.max_word_len, q_max: self.q_max, max_nodes: self.max_nodes }
    }
}

/// A run that completed but found a violated property.
#[derive(Debug)]
struct Failed;

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed")
    }
}

impl std::error::Error for Failed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            if code != 1 || e.downcast_ref::<Failed>().is_none() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Failed>().is_some() {
        return 1;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Resource { .. }) => 3,
        Some(Error::Hypothesis(_) | Error::Invariant(_)) => 1,
        _ => 2,
    }
}

struct Ctx<'a> {
    common: &'a Common,
}

impl Ctx<'_> {
    fn limits(&self) -> Limits {
        let mut l = Limits::default();
        if let Some(p) = self.common.cap_period {
            l.max_period = p;
        }
        if let Some(s) = self.common.cap_sequences {
            l.max_sequences = s;
        }
        l
    }

    fn coverage(&self, window: u64) -> CoverageOptions {
        let nm_reading = match self.common.nm_reading {
            Reading::M => NmReading::M,
            Reading::E => NmReading::E,
        };
        CoverageOptions { nm_reading, window }
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.common.output {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    fn emit_json(&self, v: &Value) -> anyhow::Result<()> {
        self.emit(&format!("{}\n", serde_json::to_string_pretty(v)?))
    }

    fn graph(&self, path: &Path) -> anyhow::Result<NiceGraph> {
        let spec: GraphSpec = read_json(path)?;
        Ok(NiceGraph::from_spec(&spec, self.limits())?)
    }

    fn universe(&self, spec: &UniverseSpec) -> anyhow::Result<Universe> {
        Ok(Universe::from_spec(spec, self.limits())?)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow!(Error::Malformed(format!("{}: {e}", path.display()))))
}

/// A matching file: a bare component list or an object with a `matching` field.
#[derive(Deserialize)]
#[serde(untagged)]
enum MatchingFile {
    Bare(Vec<ComponentJson>),
    Wrapped { matching: Vec<ComponentJson> },
}

fn read_matching(g: &NiceGraph, path: &Path) -> anyhow::Result<SymbolicMatching> {
    let comps = match read_json::<MatchingFile>(path)? {
        MatchingFile::Bare(c) | MatchingFile::Wrapped { matching: c } => c,
    };
    Ok(SymbolicMatching::from_json(g, &comps)?)
}

fn preset(name: &str) -> anyhow::Result<NiceGraph> {
    if name == "four-cycle" {
        return Ok(instances::four_cycle());
    }
    instances::preset(name).map_err(|_| {
        anyhow!(Error::Malformed(format!("unknown preset {name:?}; known: four-cycle, {}", instances::PRESETS.join(", "))))
    })
}

fn labels(ex: &ExplicitGraph, path: &[Vertex]) -> Vec<u64> {
    path.iter()
        .map(|v| match *v {
            Vertex::A(i) => ex.a[i],
            Vertex::B(j) => ex.b[j],
        })
        .collect()
}

fn window_for(g: &NiceGraph, window: u64) -> u64 {
    g.universe().finite_size().unwrap_or(window)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let ctx = Ctx { common: &cli.common };
    match &cli.cmd {
        Cmd::Gen { k, size, pieces, preset: name } => {
            let g = match name {
                Some(n) => preset(n)?,
                None => {
                    let mut r = rng(cli.common.seed);
                    if *pieces <= 1 {
                        instances::random_regular(&mut r, *size, *k)?
                    } else {
                        instances::random_regular_split(&mut r, *size, *k, *pieces)?
                    }
                }
            };
            ctx.emit_json(&serde_json::to_value(g.to_spec())?)
        }
        Cmd::Validate { input } => {
            let g = ctx.graph(input)?;
            let report = g.validate();
            ctx.emit_json(&json!({ "valid": report.is_valid(), "violations": report.violations }))?;
            if report.is_valid() {
                Ok(())
            } else {
                Err(Failed.into())
            }
        }
        Cmd::Match { input, big_k, input_matching } => {
            let g = ctx.graph(input)?;
            let m0 = match input_matching {
                Some(p) => read_matching(&g, p)?,
                None => SymbolicMatching::empty(),
            };
            let m = eliminate(&g, &m0, *big_k)?;
            let size = g.universe().finite_size().map(|_| m.size());
            ctx.emit_json(&json!({ "K": big_k, "size": size, "matching": m.to_json(&g) }))
        }
        Cmd::Verify { input, input_matching, big_k, window } => {
            let g = ctx.graph(input)?;
            let m = read_matching(&g, input_matching)?;
            let report = validate_matching(&g, &m);
            if !report.is_valid() {
                ctx.emit_json(&json!({ "valid": false, "violations": report.violations }))?;
                return Err(Failed.into());
            }
            let n = window_for(&g, *window);
            let ex = g.explicit_expand(n);
            let mt = ex.matching_from_labels(&m.window_pairs(&g, n))?;
            oracle::check_matching(&ex, &mt)?;
            let path = oracle::aug_path_exists(&ex, &mt, 2 * big_k + 1)?;
            let symbolic = certify_no_short_paths(&g, &m, *big_k)?;
            let ok = path.is_none() && symbolic.is_none();
            ctx.emit_json(&json!({
                "valid": true,
                "window": n,
                "matched_pairs": mt.len(),
                "max_matching": oracle::max_matching(&ex).0,
                "short_path": path.as_ref().map(|p| labels(&ex, p)),
                "symbolic_short_path": symbolic.map(|gs| gs.to_string()),
                "ok": ok,
            }))?;
            if ok {
                Ok(())
            } else {
                Err(Failed.into())
            }
        }
        Cmd::Bound { input, k, size, m, count, pieces, variant, window } => {
            let variant = match variant {
                VariantArg::BothSides => Variant::BothSides,
                VariantArg::ASide => Variant::ASide,
                VariantArg::Multigraph => Variant::Multigraph,
            };
            let graphs: Vec<NiceGraph> = match input {
                Some(p) => vec![ctx.graph(p)?],
                None => {
                    let mut r = rng(cli.common.seed);
                    (0..*count).map(|_| instances::random_regular_split(&mut r, *size, *k, *pieces)).collect::<Result<_, _>>()?
                }
            };
            let mut csv = String::from("instance,k,m,K,V,M,Y0,y0_bound,berge_bound,pass\n");
            let mut all = true;
            for (i, g) in graphs.iter().enumerate() {
                let rep = match_with_defect(g, *m, variant, ctx.coverage(*window))?;
                let n = window_for(g, *window);
                let count_in = |s: &defmatch::DefSet| if g.universe().finite_size().is_some() { s.count() } else { s.enumerate_window(n).len() as u64 };
                let whole = match variant {
                    Variant::BothSides => g.vertices()?,
                    _ => g.a_side()?,
                };
                let v = count_in(&whole);
                let a = count_in(&g.a_side()?);
                let y0 = count_in(&rep.y0);
                let msize = rep.matching.window_pairs(g, n).len() as u64;
                let y0_bound = Q::from_integer(v) / *m;
                let berge = Q::new((rep.big_k + 1) * a, rep.big_k + 2);
                let pass = Q::from_integer(y0) <= y0_bound && Q::from_integer(msize) >= berge && rep.chain_report.holds();
                all &= pass;
                csv.push_str(&format!("{i},{},{m},{},{v},{msize},{y0},{y0_bound},{berge},{pass}\n", rep.k, rep.big_k));
            }
            ctx.emit(&csv)?;
            if all {
                Ok(())
            } else {
                Err(Failed.into())
            }
        }
        Cmd::Embed { input, m, m_max, search } => {
            #[derive(Deserialize)]
            struct EmbedInput {
                universe: UniverseSpec,
                x: SetSpec,
                y: SetSpec,
            }
            let inp: EmbedInput = read_json(input)?;
            let u = ctx.universe(&inp.universe)?;
            let (x, y) = (u.resolve(&inp.x)?, u.resolve(&inp.y)?);
            let bounds = search.bounds();
            let out = match (m, m_max) {
                (Some(_), Some(_)) => bail!(Error::Malformed("give at most one of --m and --m-max".into())),
                (None, None) => {
                    let w = find_embedding(&u, &x, &y, &bounds)?;
                    json!({ "relation": "≤", "found": w.is_some(), "witness": w.map(|w| w.to_json()) })
                }
                (Some(m), None) => {
                    let r = check_leq_m(&u, &x, &y, *m, &bounds)?;
                    json!({
                        "relation": "≤_m",
                        "convention": "pX ≤ qY with p/q ≥ m",
                        "m": m.to_string(),
                        "found": r.is_some(),
                        "p": r.as_ref().map(|r| r.p),
                        "q": r.as_ref().map(|r| r.q),
                        "copies": r.as_ref().map(|r| r.tagged.copies()),
                        "witness": r.map(|r| r.witness.to_json()),
                    })
                }
                (None, Some(mm)) => {
                    let entries = check_leq_0(&u, &x, &y, *mm, &bounds)?;
                    let list: Vec<Value> = entries
                        .iter()
                        .map(|e| match &e.found {
                            None => json!({ "m": e.m, "found": false }),
                            Some(z) => json!({
                                "m": e.m,
                                "found": true,
                                "x0": z.x0.to_spec(),
                                "p": z.self_embedding.p,
                                "q": z.self_embedding.q,
                                "self_embedding": z.self_embedding.witness.to_json(),
                                "rest": z.rest.to_json(),
                            }),
                        })
                        .collect();
                    json!({ "relation": "≤_0", "convention": "pX0 ≤ qX with p/q ≥ m", "entries": list })
                }
            };
            ctx.emit_json(&out)
        }
        Cmd::Cancel { input, m } => {
            #[derive(Deserialize)]
            struct CancelInput {
                universe: UniverseSpec,
                k: u64,
                a: SetSpec,
                b: SetSpec,
                theta: WitnessJson,
            }
            let inp: CancelInput = read_json(input)?;
            let base = ctx.universe(&inp.universe)?;
            let t = TaggedUniverse::new(&base, inp.k)?;
            let theta = EmbeddingWitness::from_json(t.universe(), &inp.theta)?;
            let out = cancel(&t, &base.resolve(&inp.a)?, &base.resolve(&inp.b)?, &theta, *m, ctx.coverage(1000))?;
            let pieces: Vec<Value> = out
                .pieces
                .iter()
                .map(|p| json!({ "i": p.i, "j": p.j, "C": p.c.to_spec(), "D": p.d.to_spec(), "word": p.word }))
                .collect();
            ctx.emit_json(&json!({
                "m": m.to_string(),
                "K": out.coverage.as_ref().map(|c| c.big_k),
                "Y0": out.y0.to_spec(),
                "pieces": pieces,
                "witness": out.witness.to_json(),
            }))
        }
        Cmd::Tarski { input, preset: name, samples, search } => {
            #[derive(Deserialize)]
            struct TarskiInput {
                universe: UniverseSpec,
                x: SetSpec,
            }
            let (u, x) = match (input, name) {
                (Some(p), None) => {
                    let inp: TarskiInput = read_json(p)?;
                    let u = ctx.universe(&inp.universe)?;
                    let x = u.resolve(&inp.x)?;
                    (u, x)
                }
                (None, Some(n)) => {
                    let u = preset(n)?.universe().clone();
                    let x = u.whole();
                    (u, x)
                }
                _ => bail!(Error::Malformed("give exactly one of --input and --preset".into())),
            };
            let v = tarski_verdict(&u, &x, &search.bounds(), *samples, cli.common.seed)?;
            let out = match v {
                TarskiVerdict::Paradoxical(b) => {
                    let o = &b.obstruction;
                    let entries: Vec<Value> = b
                        .leq_zero
                        .iter()
                        .filter_map(|e| e.found.as_ref().map(|z| (e.m, z)))
                        .map(|(m, z)| {
                            json!({
                                "m": m,
                                "x0": z.x0.to_spec(),
                                "p": z.self_embedding.p,
                                "q": z.self_embedding.q,
                                "self_embedding": z.self_embedding.witness.to_json(),
                                "rest": z.rest.to_json(),
                            })
                        })
                        .collect();
                    json!({
                        "verdict": "paradoxical",
                        "encoding": "copy t of x is 2x + t; 2X is copies 0 and 1, X is copy 0",
                        "convention": "pX0 ≤ q·2X with p/q ≥ m",
                        "obstruction": {
                            "m": o.m, "p": o.p, "q": o.q,
                            "mu_x0_at_most": o.x0_upper.to_string(),
                            "mu_rest_at_least": o.rest_lower.to_string(),
                            "mu_rest_at_most": "1",
                            "contradiction": o.contradiction,
                        },
                        "leq_zero": entries,
                    })
                }
                TarskiVerdict::MeasureCandidate { measure, sets_checked } => json!({
                    "verdict": "measure_candidate",
                    "measure": format!("{measure:?}").to_lowercase(),
                    "sets_checked": sets_checked,
                }),
                TarskiVerdict::Inconclusive { reason } => json!({ "verdict": "inconclusive", "reason": reason }),
            };
            ctx.emit_json(&out)
        }
        Cmd::Oracle { input, window, export, input_matching, big_k } => {
            let is_json = input.extension().is_some_and(|e| e == "json");
            let (ex, g) = if is_json {
                let g = ctx.graph(input)?;
                let n = window_for(&g, *window);
                (g.explicit_expand(n), Some(g))
            } else {
                let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
                (ExplicitGraph::from_edge_list(&text)?, None)
            };
            if *export {
                return ctx.emit(&ex.to_edge_list());
            }
            let (size, pairs) = oracle::max_matching(&ex);
            let pair_labels: Vec<[u64; 2]> = pairs.iter().map(|&(a, b)| [ex.a[a], ex.b[b]]).collect();
            let mut out = json!({ "a": ex.a.len(), "b": ex.b.len(), "edges": ex.edges.len(), "max_matching": size, "pairs": pair_labels });
            if let Some(p) = input_matching {
                let g = g.ok_or_else(|| anyhow!(Error::Malformed("--input-matching needs a graph JSON input".into())))?;
                let m = read_matching(&g, p)?;
                let n = window_for(&g, *window);
                let mt = ex.matching_from_labels(&m.window_pairs(&g, n))?;
                oracle::check_matching(&ex, &mt)?;
                let bound = 2 * big_k.unwrap_or(0) + 1;
                let path = oracle::aug_path_exists(&ex, &mt, bound)?;
                out["matching_size"] = json!(mt.len());
                out["max_path_length"] = json!(bound);
                out["short_path"] = json!(path.as_ref().map(|p| labels(&ex, p)));
                ctx.emit_json(&out)?;
                if path.is_some() {
                    return Err(Failed.into());
                }
                return Ok(());
            }
            ctx.emit_json(&out)
        }
    }
}
