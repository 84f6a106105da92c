use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use trapezoid_orders::catalog::{catalog_load, verify_paper, Scope, NAMES};
use trapezoid_orders::classify::{classify_detailed, hierarchy_check, Class, Membership};
use trapezoid_orders::constructions::{
    interval_order_proper_parallelogram, interval_order_unit_trapezoid,
    proper_parallelogram_from_interval_and_linear, semiorders_of_unit_parallelogram,
    unit_parallelogram_from_semiorders, unit_trapezoid_from_interval_and_semiorder,
};
use trapezoid_orders::format::{parse_poset, parse_rep, serialize_poset, serialize_rep};
use trapezoid_orders::oracle::{exists_with_stats, Existence, PropertyQuery, SearchOptions};
use trapezoid_orders::svg::write_svg;
use trapezoid_orders::{Poset, PropertySet, Representation};

const OK: u8 = 0;
const FAIL: u8 = 1;
const INPUT: u8 = 2;
const TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "trapord", version, about = "Trapezoid orders: representations, constructions and classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Place an order in the class hierarchy.
    Classify {
        poset: PathBuf,
        /// Time limit in seconds for all oracle queries together.
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Build a representation with one of the explicit constructions.
    Construct {
        #[arg(long, value_enum)]
        method: Method,
        /// Input poset files (one or two, depending on the method).
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report the induced order and properties of a representation.
    Check {
        rep: PathBuf,
        /// Fail unless the representation induces this order.
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Split a unit parallelogram representation into its two baseline semiorders.
    Split { rep: PathBuf },
    /// Decide whether an order has a representation with the given properties.
    Oracle {
        poset: PathBuf,
        /// Comma-separated subset of trapezoid,proper,unit,parallelogram,rectangle.
        #[arg(long, default_value = "trapezoid")]
        require: String,
        #[arg(long)]
        budget: Option<f64>,
        /// Print one line per branching decision to stderr.
        #[arg(long)]
        trace: bool,
        /// Break clause-selection ties in reverse order.
        #[arg(long)]
        reverse: bool,
        /// Write the witness here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The catalog of example orders.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Draw a representation as SVG.
    Render {
        rep: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List entry names.
    List,
    /// Print an entry's order and its passed load-time assertions.
    Show { entry: String },
    /// Run an entry's scripted checks (`all` for every entry).
    Verify {
        entry: String,
        #[arg(long)]
        budget: Option<f64>,
        /// Skip the negative queries on the two largest orders.
        #[arg(long)]
        skip_extended: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Interval order X and semiorder S -> unit trapezoid representation of X∩S.
    UnitTrapezoid,
    /// Interval order X and linear order L -> proper parallelogram representation of X∩L.
    ProperParallelogram,
    /// Interval order -> unit trapezoid representation.
    IntervalUnit,
    /// Interval order -> proper parallelogram representation.
    IntervalProperParallelogram,
    /// Semiorders S and T -> unit parallelogram representation of S∩T.
    UnitParallelogram,
}

impl Method {
    fn arity(self) -> usize {
        match self {
            Method::IntervalUnit | Method::IntervalProperParallelogram => 1,
            _ => 2,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn input_err(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: INPUT,
        message: message.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn load_poset(path: &Path) -> Result<(String, Poset), Failure> {
    let f = parse_poset(&read(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    Ok((f.name, f.poset))
}

fn load_rep(path: &Path) -> Result<(String, Representation), Failure> {
    let f = parse_rep(&read(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    Ok((f.name, f.rep))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| input_err(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn budget(secs: Option<f64>) -> Result<Option<Duration>, Failure> {
    secs.map(|s| Duration::try_from_secs_f64(s).map_err(|e| input_err(format!("--budget: {e}"))))
        .transpose()
}

fn flags(rep: &Representation) -> String {
    if rep.is_empty() {
        return "(empty)".into();
    }
    rep.property_set().map(|p| p.to_string()).unwrap_or_default()
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Classify { poset, budget: b } => {
            let (name, p) = load_poset(&poset)?;
            let cl = classify_detailed(&p, budget(b)?);
            assert!(hierarchy_check(&cl.classes));
            println!("order {name} ({} elements)", p.len());
            for c in Class::ALL {
                let s = match cl.classes.status(c) {
                    Membership::Member => "member",
                    Membership::NonMember => "non-member",
                    Membership::Unresolved => "unresolved (timeout)",
                };
                println!("{:<9} {s}", c.name());
            }
            Ok(if cl.classes.is_resolved() { OK } else { TIMEOUT })
        }
        Command::Construct { method, inputs, output } => {
            if inputs.len() != method.arity() {
                return Err(input_err(format!("this method takes {} input file(s)", method.arity())));
            }
            let posets = inputs.iter().map(|p| load_poset(p).map(|x| x.1)).collect::<Result<Vec<_>, _>>()?;
            let built = match method {
                Method::UnitTrapezoid => unit_trapezoid_from_interval_and_semiorder(&posets[0], &posets[1]),
                Method::ProperParallelogram => proper_parallelogram_from_interval_and_linear(&posets[0], &posets[1]),
                Method::IntervalUnit => interval_order_unit_trapezoid(&posets[0]),
                Method::IntervalProperParallelogram => interval_order_proper_parallelogram(&posets[0]),
                Method::UnitParallelogram => unit_parallelogram_from_semiorders(&posets[0], &posets[1]),
            };
            match built {
                Ok(rep) => {
                    eprintln!("properties: {}", flags(&rep));
                    emit(&serialize_rep("constructed", &rep), output.as_deref())?;
                    Ok(OK)
                }
                Err(e) => {
                    eprintln!("construction failed: {e}");
                    Ok(FAIL)
                }
            }
        }
        Command::Check { rep, against } => {
            let (name, r) = load_rep(&rep)?;
            let induced = r.induced_order();
            print!("{}", serialize_poset(&name, &induced));
            println!("properties: {}", flags(&r));
            if let Some(path) = against {
                let (_, want) = load_poset(&path)?;
                if induced == want {
                    println!("induces {}: yes", path.display());
                } else {
                    println!("induces {}: no", path.display());
                    return Ok(FAIL);
                }
            }
            Ok(OK)
        }
        Command::Split { rep } => {
            let (_, r) = load_rep(&rep)?;
            match semiorders_of_unit_parallelogram(&r) {
                Ok((s, t)) => {
                    print!("{}", serialize_poset("lower", &s));
                    print!("{}", serialize_poset("upper", &t));
                    Ok(OK)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(FAIL)
                }
            }
        }
        Command::Oracle {
            poset,
            require,
            budget: b,
            trace,
            reverse,
            output,
        } => {
            let (name, p) = load_poset(&poset)?;
            let props = PropertySet::parse(&require).map_err(input_err)?;
            let q = PropertyQuery::new(props);
            let opts = SearchOptions {
                budget: budget(b)?,
                reverse_clause_order: reverse,
                trace,
            };
            let (out, stats) = exists_with_stats(&p, q, &opts);
            eprintln!(
                "{} nodes, {} simplex calls, {} conflicts, {:.3} s",
                stats.nodes,
                stats.lp_calls,
                stats.conflicts,
                stats.elapsed.as_secs_f64()
            );
            match out {
                Existence::Found(w) => {
                    println!("Found {{{q}}} representation of {name}; properties: {}", flags(&w));
                    emit(&serialize_rep(&name, &w), output.as_deref())?;
                    Ok(OK)
                }
                Existence::NotExist => {
                    println!("NotExist: {name} has no {{{q}}} representation");
                    Ok(FAIL)
                }
                Existence::Timeout(_) => {
                    println!("Timeout");
                    Ok(TIMEOUT)
                }
            }
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                for n in NAMES {
                    println!("{n}");
                }
                Ok(OK)
            }
            CatalogAction::Show { entry } => {
                let e = catalog_load(&entry).map_err(input_err)?;
                for l in &e.provenance {
                    println!("# {l}");
                }
                print!("{}", serialize_poset(&e.name, &e.poset));
                for a in &e.assertions {
                    println!("# checked: {a}");
                }
                Ok(OK)
            }
            CatalogAction::Verify {
                entry,
                budget: b,
                skip_extended,
            } => {
                let names: Vec<&str> = if entry == "all" {
                    NAMES.to_vec()
                } else {
                    vec![entry.as_str()]
                };
                let scope = if skip_extended { Scope::SkipExtended } else { Scope::All };
                let b = budget(b)?;
                let (mut fail, mut timeout) = (false, false);
                for n in names {
                    let e = catalog_load(n).map_err(input_err)?;
                    let r = verify_paper(&e, b, scope);
                    print!("{r}");
                    fail |= r.any_fail();
                    timeout |= r.any_timeout();
                }
                Ok(if fail {
                    FAIL
                } else if timeout {
                    TIMEOUT
                } else {
                    OK
                })
            }
        },
        Command::Render { rep, output } => {
            let (_, r) = load_rep(&rep)?;
            if r.is_empty() {
                return Err(input_err("cannot render an empty representation"));
            }
            write_svg(&r, &output).map_err(|e| input_err(format!("{}: {e}", output.display())))?;
            Ok(OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
