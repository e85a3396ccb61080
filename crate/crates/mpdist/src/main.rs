use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mpdist::approx::{approximate_dmp, ApproxPath, DEFAULT_EXACT_CAP};
use mpdist::error::Result;
use mpdist::gen::{generate_instance, Generator, InstanceSpec};
use mpdist::kernel::{alpha_constant, kernel_witness, ALPHA, DEFAULT_D1, DEFAULT_D2};
use mpdist::newick::{parse_character_file, parse_newick, write_newick};
use mpdist::oracle::{
    decide_dmp, display_graph, exact_dmp, exact_dtbr, exact_treewidth, Relation, DMP_CAP,
    DTBR_CAP, TW_CAP,
};
use mpdist::parsimony::{character_distance, parsimony_score};
use mpdist::reduction::reduce;
use mpdist::suite::{alpha_tables_text, run_suite, SUITE_NAMES};
use mpdist::PhyloTree;

/// Maximum parsimony distance toolkit for unrooted binary phylogenies.
#[derive(Parser)]
#[command(name = "mpdist", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelArg {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Random,
    TbrWalk,
    GluedQuartets,
    CaterpillarVariant,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a Newick file and print the canonical form.
    Parse { tree: PathBuf },
    /// Apply the cherry/chain reduction to a tree pair.
    Reduce { tree1: PathBuf, tree2: PathBuf },
    /// Parsimony score of a character on a tree.
    Score {
        tree: PathBuf,
        character: PathBuf,
        /// Also print an optimal extension as CSV.
        #[arg(long)]
        extension: bool,
    },
    /// Exact d_MP by exhaustive character enumeration (small n).
    DmpExact {
        tree1: PathBuf,
        tree2: PathBuf,
        #[arg(long, default_value_t = DMP_CAP)]
        cap: usize,
    },
    /// Exact d_TBR via maximum agreement forests (small n).
    DtbrExact {
        tree1: PathBuf,
        tree2: PathBuf,
        #[arg(long, default_value_t = DTBR_CAP)]
        cap: usize,
    },
    /// Exact treewidth of the display graph of a tree pair.
    TwExact {
        tree1: PathBuf,
        tree2: PathBuf,
        #[arg(long, default_value_t = TW_CAP)]
        cap: usize,
    },
    /// Decide d_MP <= k, >= k, or == k using the kernel size triage.
    Decide {
        tree1: PathBuf,
        tree2: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        rel: RelArg,
        #[arg(long, default_value_t = DMP_CAP)]
        cap: usize,
    },
    /// Construct a distance-k witness character on an irreducible pair.
    KernelWitness {
        tree1: PathBuf,
        tree2: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_D1)]
        d1: usize,
        #[arg(long, default_value_t = DEFAULT_D2)]
        d2: usize,
    },
    /// Constant-factor approximation of d_MP.
    DmpApprox {
        tree1: PathBuf,
        tree2: PathBuf,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        exact_cap: usize,
    },
    /// Print the c, t' and alpha constant tables.
    AlphaTable,
    /// Generate a deterministic instance pair.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        generator: GenKind,
        /// TBR moves (tbr-walk only).
        #[arg(long, default_value_t = 1)]
        moves: usize,
        /// Gadget count (glued-quartets only).
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a named verification suite.
    Suite {
        /// Suite name, or "all".
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

fn default_seed(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| {
            std::env::var("MPDIST_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(42)
}

fn load_tree(path: &PathBuf) -> Result<PhyloTree> {
    parse_newick(fs::read_to_string(path)?.trim())
}

fn load_pair(p1: &PathBuf, p2: &PathBuf) -> Result<(PhyloTree, PhyloTree)> {
    Ok((load_tree(p1)?, load_tree(p2)?))
}

#[derive(Serialize)]
struct WitnessReport {
    ps_t1: usize,
    ps_t2: usize,
    distance: usize,
    k: usize,
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Parse { tree } => {
            let t = load_tree(&tree)?;
            println!("{}", write_newick(&t));
        }
        Command::Reduce { tree1, tree2 } => {
            let (t1, t2) = load_pair(&tree1, &tree2)?;
            let trace = reduce(&t1, &t2)?;
            let steps: Vec<serde_json::Value> = trace
                .steps
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "kind": format!("{:?}", s.kind),
                        "deleted": s.deleted,
                        "retained": s.retained,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string(&steps)?);
            println!("{}", write_newick(&trace.reduced.0));
            println!("{}", write_newick(&trace.reduced.1));
        }
        Command::Score {
            tree,
            character,
            extension,
        } => {
            let t = load_tree(&tree)?;
            let chi = parse_character_file(&fs::read_to_string(&character)?, t.taxa())?;
            let (score, phi) = parsimony_score(&t, &chi)?;
            println!("score {}", score);
            if extension {
                print!("{}", phi.to_csv());
            }
        }
        Command::DmpExact { tree1, tree2, cap } => {
            let (t1, t2) = load_pair(&tree1, &tree2)?;
            let (d, chi) = exact_dmp(&t1, &t2, cap)?;
            println!("d_MP {}", d);
            print!("{}", chi.to_csv());
        }
        Command::DtbrExact { tree1, tree2, cap } => {
            let (t1, t2) = load_pair(&tree1, &tree2)?;
            let (d, forest) = exact_dtbr(&t1, &t2, cap)?;
            println!("d_TBR {}", d);
            for block in &forest.blocks {
                println!("{}", block.join(","));
            }
        }
        Command::TwExact { tree1, tree2, cap } => {
            let (t1, t2) = load_pair(&tree1, &tree2)?;
            let g = display_graph(&t1, &t2)?;
            let (tw, decomp) = exact_treewidth(&g, cap)?;
            println!("treewidth {}", tw);
            for (i, bag) in decomp.bags.iter().enumerate() {
                let vs: Vec<String> = bag.iter().map(|v| v.to_string()).collect();
                println!("bag {}: {{{}}}", i, vs.join(","));
            }
            for (a, b) in &decomp.edges {
                println!("bag-edge {} {}", a, b);
            }
        }
        Command::Decide {
            tree1,
            tree2,
            k,
            rel,
            cap,
        } => {
            let (t1, t2) = load_pair(&tree1, &tree2)?;
            let rel = match rel {
                RelArg::Le => Relation::Le,
                RelArg::Ge => Relation::Ge,
                RelArg::Eq => Relation::Eq,
            };
            println!("{}", decide_dmp(&t1, &t2, k, rel, cap)?);
        }
        Command::KernelWitness {
            tree1,
            tree2,
            k,
            d1,
            d2,
        } => {
            let (t1, t2) = load_pair(&tree1, &tree2)?;
            let params = alpha_constant(d1, d2)?;
            let chi = kernel_witness(&t1, &t2, k, &params)?;
            let (ps1, _) = parsimony_score(&t1, &chi)?;
            let (ps2, _) = parsimony_score(&t2, &chi)?;
            print!("{}", chi.to_csv());
            let report = WitnessReport {
                ps_t1: ps1,
                ps_t2: ps2,
                distance: ps1.abs_diff(ps2),
                k,
            };
            println!("{}", serde_json::to_string(&report)?);
        }
        Command::DmpApprox {
            tree1,
            tree2,
            r,
            exact_cap,
        } => {
            let (t1, t2) = load_pair(&tree1, &tree2)?;
            let res = approximate_dmp(&t1, &t2, r, exact_cap)?;
            let path = match res.path {
                ApproxPath::Exact => "exact",
                ApproxPath::Kernel => "kernel",
            };
            println!(
                "achieved {} (path {}, guarantee factor {})",
                res.achieved, path, res.guarantee_denominator
            );
            print!("{}", res.chi.to_csv());
            let d = character_distance(&t1, &t2, &res.chi)?;
            debug_assert_eq!(d, res.achieved);
        }
        Command::AlphaTable => {
            print!("{}", alpha_tables_text());
            println!("default (d1,d2) = ({},{}), alpha = {}", DEFAULT_D1, DEFAULT_D2, ALPHA);
        }
        Command::Gen {
            n,
            generator,
            moves,
            k,
            seed,
        } => {
            let generator = match generator {
                GenKind::Random => Generator::Random,
                GenKind::TbrWalk => Generator::TbrWalk { moves },
                GenKind::GluedQuartets => Generator::GluedQuartets { k },
                GenKind::CaterpillarVariant => Generator::CaterpillarVariant,
            };
            let spec = InstanceSpec {
                n,
                generator,
                seed: default_seed(seed),
            };
            let (t1, t2) = generate_instance(&spec)?;
            println!("{}", write_newick(&t1));
            println!("{}", write_newick(&t2));
        }
        Command::Suite { name, seed, json } => {
            let seed = default_seed(seed);
            let names: Vec<&str> = if name == "all" {
                SUITE_NAMES.to_vec()
            } else {
                vec![name.as_str()]
            };
            let mut all_passed = true;
            for name in names {
                let report = run_suite(name, seed)?;
                all_passed &= report.passed;
                if json {
                    println!("{}", serde_json::to_string(&report)?);
                } else {
                    println!(
                        "suite {} (seed {}): {}",
                        report.name,
                        report.seed,
                        if report.passed { "PASS" } else { "FAIL" }
                    );
                    for a in &report.assertions {
                        println!(
                            "  [{}] {} — {}",
                            if a.passed { "ok" } else { "FAIL" },
                            a.label,
                            a.detail
                        );
                    }
                }
            }
            return Ok(all_passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
