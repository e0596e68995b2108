use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use neighborlat::disc_form;
use neighborlat::k3::{self, K3LatticePair};
use neighborlat::kummer::{self, SubgroupPair};
use neighborlat::neighbors::{self, IsotropicLine};
use neighborlat::padic::{self, GeneralizedLine};
use neighborlat::{corpus, json as j, EmbeddedLattice, Error, Lattice, Result};

/// Kneser neighbors, discriminant forms and K3 lattice predicates.
///
/// Inputs are JSON: a path, `-` for stdin, or the JSON text itself.
#[derive(Parser)]
#[command(name = "neighborlat", version)]
struct Cli {
    /// Enumeration budget for candidate classes.
    #[arg(long, global = true, default_value_t = neighbors::DEFAULT_MAX_CLASSES)]
    max_classes: u64,
    /// Largest finite group enumerated by isomorphism and subgroup searches.
    #[arg(long, global = true, default_value_t = disc_form::DEFAULT_ISO_BOUND)]
    iso_bound: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LineArgs {
    /// A line as JSON: {"d": .., "gen": [..]} (or with "parts" for generalized lines).
    #[arg(long, conflicts_with_all = ["d", "index"])]
    line: Option<String>,
    /// Modulus, together with --index into the sorted line list.
    #[arg(long, requires = "index")]
    d: Option<u64>,
    #[arg(long, requires = "d")]
    index: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, discriminant, signature and evenness.
    Info { input: String },
    /// The discriminant form (A_L, q).
    DiscForm { input: String },
    /// All d-isotropic lines, for d coprime to the discriminant.
    Lines {
        input: String,
        #[arg(long)]
        d: u64,
        /// Print only the number of lines.
        #[arg(long)]
        count: bool,
    },
    /// The d-neighbor of a line.
    Neighbor {
        input: String,
        #[command(flatten)]
        line: LineArgs,
    },
    /// The d-split sublattice ker(ℓ).
    Split {
        input: String,
        #[command(flatten)]
        line: LineArgs,
    },
    /// The split sublattice, its classes H = L/M and H' = L'/M in A_M.
    Transverse {
        input: String,
        #[command(flatten)]
        line: LineArgs,
    },
    /// Rank, signature and discriminant-form comparison of two lattices.
    GenusCheck { first: String, second: String },
    /// Generalized isotropic lines (odd primes may divide the discriminant).
    GenLines {
        input: String,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        count: bool,
    },
    /// The generalized neighbor of a generalized line.
    GenNeighbor {
        input: String,
        #[command(flatten)]
        line: LineArgs,
    },
    /// A maximal even overlattice.
    Maximalize { input: String },
    /// Whether the lattice has no proper even overlattice.
    IsMaximal { input: String },
    /// Validates a K3 lattice pair; without "glue", searches for one.
    K3PairCheck { input: String },
    /// The pair of X_ℓ: same NS, neighbor as transcendental lattice.
    K3Neighbor {
        input: String,
        #[arg(long)]
        line: String,
    },
    /// ker(ℓ) and the embedding predicate for Y_ℓ.
    K3Split {
        input: String,
        #[arg(long)]
        line: String,
    },
    /// The Kummer example T(A) = U(-1) ⊕ U with its line dictionary.
    Kummer {
        #[arg(long)]
        d: u64,
        /// Print the full line ↔ subgroup-pair dictionary.
        #[arg(long, conflicts_with = "neighbor")]
        list: bool,
        /// Neighbor of a subgroup pair, each given as "x,y".
        #[arg(long, num_args = 2, value_names = ["C1", "C2"])]
        neighbor: Option<Vec<String>>,
    },
    /// Runs the invariant suite on the built-in corpus.
    Selftest,
}

fn read_input(src: &str) -> Result<Value> {
    let text = if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(e.to_string()))?;
        s
    } else if src.trim_start().starts_with(['{', '[']) {
        src.to_string()
    } else {
        std::fs::read_to_string(src).map_err(|e| Error::Parse(format!("{src}: {e}")))?
    };
    j::from_str(&text)
}

/// A lattice, or an embedded lattice taken with its own Gram matrix.
fn load_lattice(src: &str) -> Result<Lattice> {
    let v = read_input(src)?;
    if v.get("basis_num").is_some() {
        j::parse_embedded(&v)?.to_lattice()
    } else {
        j::parse_lattice(&v)
    }
}

fn load_embedded(src: &str) -> Result<EmbeddedLattice> {
    j::parse_embedded(&read_input(src)?)
}

fn pick_line(l: &Lattice, args: &LineArgs, max_classes: u64) -> Result<IsotropicLine> {
    match (&args.line, args.d, args.index) {
        (Some(s), _, _) => j::parse_line(l, &read_input(s)?),
        (None, Some(d), Some(i)) => {
            let lines = neighbors::enumerate_isotropic_lines(l, d, max_classes)?;
            let n = lines.len();
            lines.into_iter().nth(i).ok_or_else(|| Error::InvalidLine(format!("index {i} out of range ({n} lines)")))
        }
        _ => Err(Error::Parse("give --line or --d with --index".into())),
    }
}

fn pick_generalized(l: &Lattice, args: &LineArgs, max_classes: u64) -> Result<GeneralizedLine> {
    match (&args.line, args.d, args.index) {
        (Some(s), _, _) => j::parse_generalized_line(l, &read_input(s)?),
        (None, Some(d), Some(i)) => {
            let lines = padic::generalized_isotropic_lines(l, d, max_classes)?;
            let n = lines.len();
            lines.into_iter().nth(i).ok_or_else(|| Error::InvalidLine(format!("index {i} out of range ({n} lines)")))
        }
        _ => Err(Error::Parse("give --line or --d with --index".into())),
    }
}

fn parse_subgroup(s: &str) -> Result<[u64; 2]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => {
            let p = |t: &str| t.parse::<u64>().map_err(|_| Error::Parse(format!("bad subgroup generator {s:?}")));
            Ok([p(x)?, p(y)?])
        }
        _ => Err(Error::Parse(format!("subgroup generator must be \"x,y\", got {s:?}"))),
    }
}

fn elements(xs: &[disc_form::Element]) -> Value {
    Value::Array(xs.iter().map(j::element).collect())
}

fn info(l: &Lattice) -> Value {
    let (p, q) = l.signature();
    json!({ "rank": l.rank(), "disc": j::int(&l.discriminant()), "signature": [p, q], "even": l.is_even() })
}

fn kummer_cmd(d: u64, list: bool, neighbor: Option<Vec<String>>) -> Result<Value> {
    let t = kummer::kummer_transcendental();
    if let Some(cs) = neighbor {
        let pair = SubgroupPair { c1: parse_subgroup(&cs[0])?, c2: parse_subgroup(&cs[1])? };
        let kn = kummer::kummer_neighbor(pair, d)?;
        return Ok(json!({
            "d": d,
            "c1": pair.c1,
            "c2": pair.c2,
            "neighbor": j::embedded(&kn.neighbor),
            "natural_gram": j::matrix(&kn.natural_gram()?),
            "intersection": j::embedded(&kn.intersection),
            "line": j::line(&kn.line),
        }));
    }
    let dict = kummer::line_subgroup_dictionary(d)?;
    if list {
        let rows: Vec<Value> = dict
            .iter()
            .map(|e| {
                json!({
                    "c1": e.pair.c1,
                    "c2": e.pair.c2,
                    "hom": [[e.hom.a, e.hom.b], [e.hom.c, e.hom.d]],
                    "line": j::line(&e.line),
                })
            })
            .collect();
        return Ok(Value::Array(rows));
    }
    let lines = neighbors::enumerate_isotropic_lines(&t, d, neighbors::DEFAULT_MAX_CLASSES)?;
    let kn = kummer::kummer_neighbor(SubgroupPair { c1: [0, 1], c2: [0, 1] }, d)?;
    Ok(json!({
        "d": d,
        "gram": j::matrix(t.gram()),
        "lines": lines.len(),
        "pairs": dict.len(),
        "standard_neighbor": {
            "c1": [0, 1],
            "c2": [0, 1],
            "neighbor": j::embedded(&kn.neighbor),
            "natural_gram": j::matrix(&kn.natural_gram()?),
            "intersection": j::embedded(&kn.intersection),
            "line": j::line(&kn.line),
        },
    }))
}

fn selftest(bound: u64) -> Result<Value> {
    let mut checks = 0u64;
    let mut failures = Vec::new();
    for entry in corpus::neighbor_corpus().into_iter().filter(|e| e.lattice.rank() <= 5) {
        let l = &entry.lattice;
        for d in [2u64, 3, 5] {
            let lines = match neighbors::enumerate_isotropic_lines(l, d, 100_000) {
                Ok(lines) => lines,
                Err(Error::NotCoprime { .. }) => continue,
                Err(e) => return Err(e),
            };
            for line in &lines {
                let n = neighbors::neighbor_from_line(line)?;
                let ok = neighbors::line_from_neighbor(l, &n)? == *line
                    && neighbors::same_genus_invariants(l, &n.to_lattice()?, bound)?;
                checks += 1;
                if !ok {
                    failures.push(format!("{} d={} gen={:?}", entry.name, d, line.gen()));
                }
            }
        }
        let f = disc_form::discriminant_form(l)?;
        let (p, q) = l.signature();
        checks += 1;
        if i64::from(disc_form::milgram_signature(&f, bound)?) != (p as i64 - q as i64).rem_euclid(8) {
            failures.push(format!("{}: Milgram", entry.name));
        }
    }
    for (name, pair) in k3::k3_fixtures()? {
        checks += 1;
        if pair.glued_lattice().is_err() {
            failures.push(format!("{name}: glue"));
        }
    }
    if !failures.is_empty() {
        return Err(Error::Invariant(failures.join("; ")));
    }
    Ok(json!({ "checks": checks, "ok": true }))
}

fn run(cli: Cli) -> Result<Value> {
    let mc = cli.max_classes;
    let ib = cli.iso_bound;
    match cli.command {
        Command::Info { input } => Ok(info(&load_lattice(&input)?)),
        Command::DiscForm { input } => {
            let l = load_lattice(&input)?;
            Ok(j::form(&disc_form::discriminant_form(&l)?))
        }
        Command::Lines { input, d, count } => {
            let l = load_lattice(&input)?;
            if count {
                return Ok(json!({ "d": d, "count": neighbors::count_isotropic_lines(&l, d, mc)? }));
            }
            Ok(Value::Array(neighbors::enumerate_isotropic_lines(&l, d, mc)?.iter().map(j::line).collect()))
        }
        Command::Neighbor { input, line } => {
            let l = load_lattice(&input)?;
            Ok(j::embedded(&neighbors::neighbor_from_line(&pick_line(&l, &line, mc)?)?))
        }
        Command::Split { input, line } => {
            let l = load_lattice(&input)?;
            Ok(j::embedded(&neighbors::split_sublattice(&pick_line(&l, &line, mc)?)?))
        }
        Command::Transverse { input, line } => {
            let l = load_lattice(&input)?;
            let line = pick_line(&l, &line, mc)?;
            let (m, h) = neighbors::line_subgroup(&line)?;
            let t = neighbors::transverse_subgroup(&m, &h, ib)?;
            let n = disc_form::overlattice_from_isotropic(&m, &t)?;
            Ok(json!({
                "split": j::embedded(&m),
                "form": j::form(h.parent()),
                "h": elements(h.generators()),
                "transverse": elements(t.generators()),
                "neighbor": j::embedded(&n),
            }))
        }
        Command::GenusCheck { first, second } => {
            let a = load_lattice(&first)?;
            let b = load_lattice(&second)?;
            Ok(json!({ "same_genus": neighbors::same_genus_invariants(&a, &b, ib)? }))
        }
        Command::GenLines { input, d, count } => {
            let l = load_lattice(&input)?;
            if count {
                return Ok(json!({ "d": d, "count": padic::count_generalized_isotropic_lines(&l, d, mc)? }));
            }
            Ok(Value::Array(padic::generalized_isotropic_lines(&l, d, mc)?.iter().map(j::generalized_line).collect()))
        }
        Command::GenNeighbor { input, line } => {
            let l = load_lattice(&input)?;
            Ok(j::embedded(&padic::generalized_neighbor(&pick_generalized(&l, &line, mc)?)?))
        }
        Command::Maximalize { input } => Ok(j::embedded(&k3::maximalize(&load_embedded(&input)?, ib)?)),
        Command::IsMaximal { input } => Ok(json!({ "maximal": k3::is_maximal(&load_lattice(&input)?, ib)? })),
        Command::K3PairCheck { input } => {
            let v = read_input(&input)?;
            let pair = if v.get("glue").is_some() {
                j::parse_pair(&v)?
            } else {
                let ns = j::parse_lattice(v.get("ns").ok_or_else(|| Error::Parse("missing field \"ns\"".into()))?)?;
                let t = j::parse_lattice(v.get("t").ok_or_else(|| Error::Parse("missing field \"t\"".into()))?)?;
                K3LatticePair::with_found_glue(ns, t, ib)?
            };
            let g = pair.glued_lattice()?;
            let (p, q) = g.signature();
            Ok(json!({
                "valid": true,
                "rho": pair.picard_number(),
                "glued": { "rank": g.rank(), "disc": j::int(&g.discriminant()), "signature": [p, q], "even": g.is_even() },
                "pair": j::pair(&pair),
            }))
        }
        Command::K3Neighbor { input, line } => {
            let pair = j::parse_pair(&read_input(&input)?)?;
            let lv = read_input(&line)?;
            let out = if lv.get("parts").is_some() {
                k3::k3_generalized_neighbor_data(&pair, &j::parse_generalized_line(pair.t(), &lv)?)?
            } else {
                k3::k3_neighbor_data(&pair, &j::parse_line(pair.t(), &lv)?)?
            };
            Ok(j::pair(&out))
        }
        Command::K3Split { input, line } => {
            let pair = j::parse_pair(&read_input(&input)?)?;
            let lv = read_input(&line)?;
            let s = if lv.get("parts").is_some() {
                k3::k3_generalized_split_data(&pair, &j::parse_generalized_line(pair.t(), &lv)?)?
            } else {
                k3::k3_split_data(&pair, &j::parse_line(pair.t(), &lv)?)?
            };
            Ok(json!({
                "t_split": j::lattice(&s.t_split),
                "disc": j::int(&s.t_split.discriminant()),
                "embeddable": s.embeddable.as_str(),
            }))
        }
        Command::Kummer { d, list, neighbor } => kummer_cmd(d, list, neighbor),
        Command::Selftest => selftest(ib),
    }
}

fn emit(v: &Value) {
    // a closed pipe downstream is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{}", j::to_canonical(v));
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("NEIGHBORLAT_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        neighborlat::configure_threads(n);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit(&j::error(&e));
            if e.is_internal() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
