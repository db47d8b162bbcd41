//! `thomhom`: command line access to the posets, homology computations,
//! derivations and counting ledgers of `thompson-homology`.
//!
//! Every run prints one JSON document (or its markdown rendering) holding
//! the tool version, the full configuration and the result.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use thompson_homology::conj::{self, CountingConvention, OrbitTypeVector};
use thompson_homology::fj::{self, CoinvariantMode, CoinvariantTable, PoincarePolynomial, ThetaDimsTable};
use thompson_homology::signature::parse_arities;
use thompson_homology::{les, stein, zfn, betti_reduced, ColourSignature, Error, PosetDump};

mod markdown;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_UNDERDETERMINED: i32 = 3;

/// Cap on values expanded from a list argument such as `1..8`.
const MAX_LIST: usize = 1024;

#[derive(Debug, Parser, Serialize)]
#[command(name = "thomhom", version, about = "Posets, homology and counting ledgers for generalised Thompson groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Recorded in the output; every computation is deterministic.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Md,
}

#[derive(Debug, Args, Serialize)]
pub struct SigArgs {
    /// Number of colours.
    #[arg(long)]
    pub s: Option<u64>,
    /// Comma-separated arities, one per colour.
    #[arg(long)]
    pub arities: Option<String>,
    /// JSON file `{"s":2,"arities":[2,2]}`.
    #[arg(long, conflicts_with_all = ["s", "arities"])]
    pub signature: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Derived constants of a signature.
    Constants {
        #[command(flatten)]
        #[serde(flatten)]
        sig: SigArgs,
    },
    /// The reduced poset of full non-repeating classes.
    Zfn {
        #[command(flatten)]
        #[serde(flatten)]
        sig: SigArgs,
        #[arg(long)]
        delta: u64,
        /// Slot cap; defaults to 2^s - 1.
        #[arg(long)]
        p_cap: Option<usize>,
        /// Also report the dimension-or-cone dichotomy.
        #[arg(long)]
        dichotomy: bool,
        /// Include the poset and order complex dumps.
        #[arg(long)]
        dump: bool,
    },
    /// The poset of elementary expansion classes.
    SteinZ {
        #[command(flatten)]
        #[serde(flatten)]
        sig: SigArgs,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        delta: u64,
        /// Compare with the full and reduced subposets.
        #[arg(long)]
        validate_quillen: bool,
    },
    /// Quillen cross-validation over lists of `p` and `delta` (`4,5` or `1..4`).
    QuillenCheck {
        #[command(flatten)]
        #[serde(flatten)]
        sig: SigArgs,
        #[arg(long)]
        p: String,
        #[arg(long)]
        delta: String,
    },
    /// Longest chains: the ambient interval of a signature, or a poset file.
    Chains {
        #[command(flatten)]
        #[serde(flatten)]
        sig: SigArgs,
        /// Poset dump `{"elements":[...],"covers":[[i,j],...]}`.
        #[arg(long, conflicts_with_all = ["s", "arities", "signature"])]
        poset: Option<PathBuf>,
        /// Dimension of the reduced poset for delta up to the vanishing threshold + 2.
        #[arg(long)]
        sweep: bool,
        /// Reduced Betti numbers of the poset file.
        #[arg(long, requires = "poset")]
        betti: bool,
    },
    /// Group homology from the exact sequences.
    Derive {
        /// `2v`: two colours of arity two.
        #[arg(long, conflicts_with = "vanish")]
        target: Option<Target>,
        /// Certify vanishing of `H_k`.
        #[arg(long, requires = "k")]
        vanish: bool,
        #[command(flatten)]
        #[serde(flatten)]
        sig: SigArgs,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Conjugacy classes of cyclic subgroups of order `m`.
    Conj {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value = "statement")]
        convention: String,
        /// Compare every counting method.
        #[arg(long)]
        report: bool,
    },
    /// Weyl group order of a cyclic subgroup with the given orbit type.
    Weyl {
        #[arg(long)]
        m: u64,
        /// `k1=1,k2=0,k4=1`.
        #[arg(long)]
        orbit: String,
        #[arg(long, default_value_t = conj::DEFAULT_WEYL_CAP)]
        cap: u64,
    },
    /// Ledger for the source of the Farrell-Jones assembly map.
    Fj {
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
        #[command(flatten)]
        #[serde(flatten)]
        sig: SigArgs,
        #[arg(long, default_value_t = 1)]
        r: u64,
        #[arg(long)]
        m_max: u64,
        /// Arity used for class counts; defaults to the common arity.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value = "statement")]
        convention: String,
        /// `[{"m":2,"q":0,"dim":1},...]`.
        #[arg(long)]
        theta: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::UpperBound)]
        mode: Mode,
        /// `[{"m":2,"i":1,"p":0,"q":0,"dim":1},...]`, for `--mode table`.
        #[arg(long)]
        coinvariants: Option<PathBuf>,
        /// Betti numbers of the group from degree 0, e.g. `1,0,0,1`.
        #[arg(long)]
        group_betti: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Target {
    #[value(name = "2v")]
    #[serde(rename = "2v")]
    TwoV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    UpperBound,
    Table,
    Trivial,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource { .. } => EXIT_RESOURCE,
        Error::Underdetermined { .. } | Error::DerivationFailed(_) | Error::Conflict { .. } | Error::Inconsistent(_) => {
            EXIT_UNDERDETERMINED
        }
        _ => EXIT_MALFORMED,
    }
}

/// Parse `argv` (including the program name), run, and render.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_MALFORMED,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli) {
        Ok(result) => {
            let doc = json!({
                "tool": "thomhom",
                "version": VERSION,
                "config": serde_json::to_value(&cli).expect("config serializes"),
                "result": result,
            });
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&doc).expect("value serializes") + "\n",
                Format::Md => markdown::render(&doc),
            };
            match &cli.output {
                Some(path) => match fs::write(path, &text) {
                    Ok(()) => Outcome {
                        code: EXIT_OK,
                        stdout: String::new(),
                        stderr: String::new(),
                    },
                    Err(e) => Outcome {
                        code: EXIT_MALFORMED,
                        stdout: String::new(),
                        stderr: format!("error: cannot write {}: {e}\n", path.display()),
                    },
                },
                None => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
            }
        }
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Error> {
    Ok(serde_json::to_value(v)?)
}

fn signature(args: &SigArgs) -> Result<ColourSignature, Error> {
    if let Some(path) = &args.signature {
        return ColourSignature::from_json(&read(path)?);
    }
    let arities = args
        .arities
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--arities (or --signature) is required".into()))?;
    let arities = parse_arities(arities)?;
    match args.s {
        Some(s) => ColourSignature::with_s(s, arities),
        None => ColourSignature::new(arities),
    }
}

/// `4`, `1,2,5` or `1..4` (inclusive).
pub fn parse_list(text: &str) -> Result<Vec<u64>, Error> {
    let bad = |e: std::num::ParseIntError| Error::Parse(format!("bad list {text:?}: {e}"));
    let mut out = Vec::new();
    for piece in text.split(',').map(str::trim) {
        if let Some((a, b)) = piece.split_once("..") {
            let (a, b): (u64, u64) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
            if b < a {
                return Err(Error::Parse(format!("empty range {piece:?}")));
            }
            if (b - a) as usize >= MAX_LIST || out.len() + (b - a) as usize >= MAX_LIST {
                return Err(Error::Resource {
                    what: "list entries",
                    actual: (b - a + 1) as u128,
                    limit: MAX_LIST as u128,
                });
            }
            out.extend(a..=b);
        } else {
            out.push(piece.parse().map_err(bad)?);
        }
        if out.len() > MAX_LIST {
            return Err(Error::Resource {
                what: "list entries",
                actual: out.len() as u128,
                limit: MAX_LIST as u128,
            });
        }
    }
    Ok(out)
}

fn execute(cli: &Cli) -> Result<Value, Error> {
    match &cli.command {
        Command::Constants { sig } => {
            let g = signature(sig)?;
            Ok(json!({
                "signature": g,
                "constants": g.derived_constants(),
                "default_p_cap": zfn::default_p_cap(&g),
            }))
        }
        Command::Zfn {
            sig,
            delta,
            p_cap,
            dichotomy,
            dump,
        } => {
            let g = signature(sig)?;
            let p_cap = p_cap.unwrap_or_else(|| zfn::default_p_cap(&g));
            let mut out = to_value(&zfn::zfn_summary(&g, p_cap, *delta)?)?;
            if *dichotomy {
                out["dichotomy"] = to_value(&zfn::contractibility_dichotomy(&g, p_cap, *delta)?)?;
            }
            if *dump {
                let z = zfn::build_zfn_poset(&g, p_cap, *delta)?;
                out["poset"] = to_value(&z.poset.to_dump())?;
                out["complex"] = to_value(&z.poset.order_complex()?.to_dump())?;
            }
            Ok(out)
        }
        Command::SteinZ {
            sig,
            p,
            delta,
            validate_quillen,
        } => {
            let g = signature(sig)?;
            if *validate_quillen {
                return to_value(&stein::cross_validate_quillen(&g, *p, *delta)?);
            }
            let z = stein::build_z_poset(&g, *p, *delta)?;
            let complex = z.poset.order_complex()?;
            Ok(json!({
                "signature": g,
                "p": p,
                "delta": delta,
                "partitions": z.partitions.len(),
                "elements": z.poset.len(),
                "covers": z.poset.covers().len(),
                "dimension": z.poset.longest_chain(),
                "betti": betti_reduced(&complex),
            }))
        }
        Command::QuillenCheck { sig, p, delta } => {
            let g = signature(sig)?;
            let mut reports = Vec::new();
            for p in parse_list(p)? {
                for d in parse_list(delta)? {
                    reports.push(stein::cross_validate_quillen(&g, p as usize, d)?);
                }
            }
            let consistent = reports.iter().all(|r| r.consistent);
            Ok(json!({ "consistent": consistent, "reports": reports }))
        }
        Command::Chains {
            sig,
            poset,
            sweep,
            betti,
        } => chains(sig, poset.as_ref(), *sweep, *betti),
        Command::Derive { target, vanish, sig, k } => {
            if *vanish {
                let g = signature(sig)?;
                let k = k.expect("clap requires k");
                return to_value(&les::derive_vanishing(&g, k)?);
            }
            match target {
                Some(Target::TwoV) => to_value(&les::derive_2v()?),
                None => Err(Error::InvalidArgument("give --target 2v or --vanish".into())),
            }
        }
        Command::Conj {
            n,
            r,
            m,
            convention,
            report,
        } => {
            let conv = CountingConvention::parse(convention)?;
            if *report {
                return to_value(&conj::reconcile_counts(*n, *r, *m, conv)?);
            }
            let vectors = conj::enumerate_orbit_vectors(*n, *r, *m, conv)?;
            Ok(json!({
                "convention": conv,
                "count": vectors.len().to_string(),
                "orbit_vectors": vectors.iter().map(ToString::to_string).collect::<Vec<_>>(),
            }))
        }
        Command::Weyl { m, orbit, cap } => {
            let v = OrbitTypeVector::parse(*m, orbit)?;
            to_value(&conj::weyl_group(&v, *cap)?)
        }
        Command::Fj { .. } => fj_ledger(&cli.command),
    }
}

fn chains(sig: &SigArgs, poset: Option<&PathBuf>, sweep: bool, betti: bool) -> Result<Value, Error> {
    if let Some(path) = poset {
        let p = PosetDump::parse(&read(path)?)?;
        let mut out = json!({
            "elements": p.len(),
            "covers": p.covers().len(),
            "longest_chain": p.longest_chain(),
            "chain_count": p.chain_count().to_string(),
        });
        if betti {
            out["betti"] = to_value(&betti_reduced(&p.order_complex()?))?;
        }
        return Ok(out);
    }
    let g = signature(sig)?;
    let interval = zfn::ambient_interval(&g)?;
    let mut out = json!({
        "signature": g,
        "interval_elements": interval.len(),
        "longest_chain": interval.longest_chain(),
        "d": g.derived_constants().d.to_string(),
    });
    if sweep {
        let limit = g
            .derived_constants()
            .threshold_u64()
            .and_then(|t| t.checked_add(2))
            .filter(|&t| t as usize <= MAX_LIST)
            .ok_or(Error::Resource {
                what: "delta sweep length",
                actual: u128::MAX,
                limit: MAX_LIST as u128,
            })?;
        let p_cap = zfn::default_p_cap(&g);
        let mut dims = BTreeMap::new();
        for delta in 1..=limit {
            dims.insert(delta.to_string(), zfn::zfn_dimension(&g, p_cap, delta)?);
        }
        out["zfn_dimension"] = to_value(&dims)?;
    }
    Ok(out)
}

fn fj_ledger(cmd: &Command) -> Result<Value, Error> {
    let Command::Fj {
        degree,
        sig,
        r,
        m_max,
        n,
        convention,
        theta,
        mode,
        coinvariants,
        group_betti,
    } = cmd
    else {
        unreachable!("called with fj only")
    };
    let g = signature(sig)?;
    let conv = CountingConvention::parse(convention)?;
    let n_arity = match n {
        Some(n) => *n,
        None if g.is_uniform() => g.arities()[0],
        None => {
            return Err(Error::InvalidArgument(
                "arities differ; give --n for the class counts".into(),
            ))
        }
    };
    let (group, source) = group_homology(&g, group_betti.as_deref())?;
    let indices = fj::fj_summand_indices(*degree, g.s() as u64, n_arity, *r, *m_max, conv)?;
    let mut centralizers = BTreeMap::new();
    for m in 1..=*m_max {
        centralizers.insert(m, fj::centralizer_poincare(&group, m)?);
    }
    let theta = match theta {
        Some(path) => ThetaDimsTable::from_json(&read(path)?)?,
        None => ThetaDimsTable::new(),
    };
    let mode = match (mode, coinvariants) {
        (Mode::Table, Some(path)) => CoinvariantMode::Table(CoinvariantTable::from_json(&read(path)?)?),
        (Mode::Table, None) => return Err(Error::InvalidArgument("--mode table needs --coinvariants".into())),
        (_, Some(_)) => return Err(Error::InvalidArgument("--coinvariants is only used with --mode table".into())),
        (Mode::UpperBound, None) => CoinvariantMode::UpperBound,
        (Mode::Trivial, None) => CoinvariantMode::Trivial,
    };
    let ledger = fj::fj_total_dimension(&indices.indices, &centralizers, &theta, &mode)?;
    let cents: BTreeMap<String, &PoincarePolynomial> = centralizers.iter().map(|(m, p)| (m.to_string(), p)).collect();
    Ok(json!({
        "group_homology": group,
        "group_homology_source": source,
        "m_max_cutoff": m_max,
        "class_counts": indices.class_counts,
        "convention": indices.convention,
        "theta_entries": theta.len(),
        "centralizers": cents,
        "ledger": ledger,
    }))
}

/// `H_*(G; Q)` as a Poincare polynomial and where it came from.
fn group_homology(g: &ColourSignature, given: Option<&str>) -> Result<(PoincarePolynomial, String), Error> {
    if let Some(text) = given {
        let betti = parse_betti(text)?;
        return Ok((PoincarePolynomial::from_betti(&betti), "supplied with --group-betti".into()));
    }
    if g.s() == 1 {
        return Ok((PoincarePolynomial::one(), "one colour: rationally acyclic".into()));
    }
    if g.arities() == [2, 2] {
        let d = les::derive_2v()?;
        let table: BTreeMap<u64, u64> = d.table.iter().map(|(&k, &v)| (k as u64, v)).collect();
        let top = d.table.keys().max().copied().unwrap_or(0) as u64;
        return Ok((
            PoincarePolynomial::truncated(&table, top),
            format!("derived through degree {top}; higher degrees unknown"),
        ));
    }
    Err(Error::Underdetermined {
        goal: format!("H_*(G; Q) for arities {:?}", g.arities()),
        blocking: vec!["supply --group-betti".into()],
    })
}

fn parse_betti(text: &str) -> Result<Vec<u64>, Error> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad Betti number {p:?}: {e}")))
        })
        .collect()
}
