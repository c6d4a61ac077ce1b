//! `secrecy`: validate, query and transform simplicial secrecy models.
//!
//! Exit status: 0 ok or true, 1 false / invalid / countermodel found,
//! 2 input error, 3 search limit exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use secrecy_core::document::DocumentError;
use secrecy_core::{
    check_derivation, check_validity_bounded, parse, random_model, satisfies, to_aux, truth_set,
    valid_on, AuxModel, DerivationDocument, FacetId, FacetPolicy, Formula, ModelDocument,
    SearchBounds, SearchError, SecrecyModel, ShareModel, Verdict,
};

#[derive(Parser)]
#[command(name = "secrecy", version, about = "Simplicial secrecy model toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model document and report every violated invariant.
    Validate { model: PathBuf },
    /// Evaluate a formula at one facet.
    Check {
        model: PathBuf,
        /// Facet key, e.g. `u0+w1`.
        facet: String,
        formula: String,
    },
    /// Print the facets where a formula holds.
    Truthset { model: PathBuf, formula: String },
    /// Keep only events containing the owner's star at each vertex.
    Normalize {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report (SN) violations.
    SnCheck {
        model: PathBuf,
        /// Also list one witness per (vertex, event, facet, agent).
        #[arg(long)]
        witnesses: bool,
    },
    /// Build the share model of an auxiliary-colour model.
    Share {
        model: PathBuf,
        /// Group order; defaults to the number of facets.
        #[arg(long)]
        modulus: Option<u64>,
        /// Formulas to compare between the two models, one per line.
        #[arg(long)]
        pool: Option<PathBuf>,
        /// Where to write the share-model document (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a derivation document.
    Prove { derivation: PathBuf },
    /// Look for a countermodel within size bounds.
    Search(SearchArgs),
}

#[derive(Args)]
struct SearchArgs {
    formula: String,
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    states: Option<usize>,
    /// Comma-separated atom names.
    #[arg(long, value_delimiter = ',')]
    atoms: Option<Vec<String>>,
    #[arg(long)]
    max_events: Option<usize>,
    /// Also consider every nonempty subset of grid cells as a complex.
    #[arg(long)]
    all_subsets: bool,
    #[arg(long)]
    cap: Option<u64>,
    /// Check this many random models instead of searching exhaustively.
    #[arg(long, default_value_t = 0)]
    samples: u64,
    /// First seed for `--samples`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// TOML file with bounds; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// A failure that ends the command with the given status.
struct Failure {
    status: u8,
    message: String,
}

fn input_error(message: impl ToString) -> Failure {
    Failure {
        status: 2,
        message: message.to_string(),
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_document(path: &Path) -> Result<ModelDocument, Failure> {
    ModelDocument::from_json(&read(path)?)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<SecrecyModel, Failure> {
    load_document(path)?
        .to_model()
        .map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse(text).map_err(|e| input_error(format!("{text:?}: {e}")))
}

fn facet(text: &str) -> Result<FacetId, Failure> {
    FacetId::parse_key(text).ok_or_else(|| input_error(format!("invalid facet key {text:?}")))
}

fn read_pool(path: &Path) -> Result<Vec<Formula>, Failure> {
    read(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("//"))
        .map(formula)
        .collect()
}

fn keys(ids: &[FacetId]) -> String {
    ids.iter().map(FacetId::key).collect::<Vec<_>>().join(" ")
}

fn validate(path: &Path) -> Outcome {
    match load_document(path)?.to_model() {
        Ok(_) => {
            println!("valid");
            Ok(0)
        }
        Err(DocumentError::Complex(e)) => {
            for v in &e.0 {
                println!("invalid: {v}");
            }
            Ok(1)
        }
        Err(DocumentError::Model(e)) => {
            let violations = e.sn_violations();
            for v in &violations {
                println!(
                    "SN violation: vertex {} event {{{}}} facet {} agent {}",
                    v.vertex,
                    keys(&v.event),
                    v.facet,
                    v.blocked_agent
                );
            }
            if violations.is_empty() {
                println!("invalid: {e}");
            }
            Ok(1)
        }
        Err(e) => Err(input_error(e)),
    }
}

fn check(path: &Path, key: &str, text: &str) -> Outcome {
    let model = load_model(path)?;
    let value = satisfies(&model, &facet(key)?, &formula(text)?).map_err(input_error)?;
    println!("{value}");
    Ok(if value { 0 } else { 1 })
}

fn truthset(path: &Path, text: &str) -> Outcome {
    let model = load_model(path)?;
    let set = truth_set(&model, &formula(text)?).map_err(input_error)?;
    println!("{}", keys(&set));
    Ok(0)
}

fn normalize(path: &Path, out: Option<&Path>) -> Outcome {
    let model = load_model(path)?.normalize_owner_local();
    write_or_print(out, &ModelDocument::from_model(&model).to_canonical_json())?;
    Ok(0)
}

fn sn_check(path: &Path, witnesses: bool) -> Outcome {
    match load_document(path)?.to_model() {
        Ok(model) => {
            println!("no SN violations");
            if witnesses {
                for w in model.sn_witnesses() {
                    println!(
                        "witness: vertex {} event {{{}}} facet {} agent {} -> {}",
                        w.vertex,
                        keys(&w.event),
                        w.facet,
                        w.agent,
                        w.witness
                    );
                }
            }
            Ok(0)
        }
        Err(DocumentError::Model(e)) if !e.sn_violations().is_empty() => {
            for v in e.sn_violations() {
                println!(
                    "SN violation: vertex {} event {{{}}} facet {} agent {}",
                    v.vertex,
                    keys(&v.event),
                    v.facet,
                    v.blocked_agent
                );
            }
            Ok(1)
        }
        Err(e) => Err(input_error(format!("{}: {e}", path.display()))),
    }
}

fn share(path: &Path, modulus: Option<u64>, pool: Option<&Path>, out: Option<&Path>) -> Outcome {
    let model = load_model(path)?;
    let aux = if model.is_aux() {
        AuxModel::new(model).map_err(input_error)?
    } else {
        eprintln!("note: adding a fresh auxiliary vertex to every facet");
        to_aux(&model).map_err(input_error)?
    };
    let modulus = modulus.unwrap_or(aux.model().complex().num_facets() as u64);
    let sh = ShareModel::build(&aux, modulus).map_err(input_error)?;
    let doc = ModelDocument::from_model(sh.model()).to_canonical_json();
    let Some(pool) = pool else {
        write_or_print(out, &doc)?;
        return Ok(0);
    };
    let pool = read_pool(pool)?;
    let report = sh.check_representation(&pool).map_err(input_error)?;
    if out.is_some() {
        write_or_print(out, &doc)?;
    } else {
        print!("{doc}");
    }
    let summary = format!(
        "share model: {} facets (modulus {modulus}); {} comparisons over {} formulas, {} disagreements",
        report.share_facets,
        report.comparisons,
        report.formulas,
        report.disagreements.len()
    );
    let report_out = |line: &str| {
        if out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    };
    report_out(&summary);
    for d in &report.disagreements {
        report_out(&format!(
            "disagreement: {} at aux {} ({}) vs share {} ({})",
            d.formula, d.aux_facet, d.aux_value, d.share_facet, d.share_value
        ));
    }
    Ok(if report.agrees() { 0 } else { 1 })
}

fn prove(path: &Path) -> Outcome {
    let d = DerivationDocument::from_json(&read(path)?)
        .and_then(|doc| doc.to_derivation())
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    match check_derivation(&d) {
        Ok(()) => {
            match d.conclusion() {
                Some(c) => println!("ok: {} proves {c}", d.name),
                None => println!("ok: {} is empty", d.name),
            }
            Ok(0)
        }
        Err(e) => {
            println!("rejected: {} {e}", d.name);
            Ok(1)
        }
    }
}

fn bounds(args: &SearchArgs) -> Result<SearchBounds, Failure> {
    let mut b = match &args.config {
        Some(path) => toml::from_str(&read(path)?)
            .map_err(|e| input_error(format!("{}: {e}", path.display())))?,
        None => SearchBounds::default(),
    };
    if let Some(n) = args.agents {
        b.agents = n;
    }
    if let Some(n) = args.states {
        b.local_states_per_agent = n;
    }
    if let Some(atoms) = &args.atoms {
        b.atoms = atoms.clone();
    }
    if let Some(n) = args.max_events {
        b.max_events_per_vertex = n;
    }
    if args.all_subsets {
        b.facet_subset_policy = FacetPolicy::AllNonemptySubsets;
    }
    if let Some(cap) = args.cap {
        b.cap = cap;
    }
    Ok(b)
}

fn search_error(e: SearchError) -> Failure {
    match e {
        SearchError::BoundsTooLarge { .. } => Failure {
            status: 3,
            message: e.to_string(),
        },
        other => input_error(other),
    }
}

fn print_countermodel(model: &SecrecyModel, facet: &FacetId) {
    println!("countermodel at facet {facet}");
    print!("{}", ModelDocument::from_model(model).to_canonical_json());
}

fn search(args: &SearchArgs) -> Outcome {
    let phi = formula(&args.formula)?;
    let b = bounds(args)?;
    if args.samples > 0 {
        for seed in args.seed..args.seed + args.samples {
            let model = random_model(seed, &b).map_err(search_error)?;
            if !valid_on(&model, &phi).map_err(input_error)? {
                let set = truth_set(&model, &phi).map_err(input_error)?;
                let facet = model
                    .complex()
                    .facets()
                    .iter()
                    .find(|f| !set.contains(f))
                    .expect("some facet falsifies")
                    .clone();
                println!("seed {seed}");
                print_countermodel(&model, &facet);
                return Ok(1);
            }
        }
        println!("valid on {} sampled models", args.samples);
        return Ok(0);
    }
    let result = check_validity_bounded(&phi, &b).map_err(search_error)?;
    match result.verdict {
        Verdict::ValidUpToBound => {
            println!(
                "valid up to bound ({} models examined, {:.3}s)",
                result.models_examined,
                result.elapsed.as_secs_f64()
            );
            Ok(0)
        }
        Verdict::Countermodel { model, facet } => {
            print_countermodel(&model, &facet);
            Ok(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate { model } => validate(model),
        Command::Check {
            model,
            facet,
            formula,
        } => check(model, facet, formula),
        Command::Truthset { model, formula } => truthset(model, formula),
        Command::Normalize { model, out } => normalize(model, out.as_deref()),
        Command::SnCheck { model, witnesses } => sn_check(model, *witnesses),
        Command::Share {
            model,
            modulus,
            pool,
            out,
        } => share(model, *modulus, pool.as_deref(), out.as_deref()),
        Command::Prove { derivation } => prove(derivation),
        Command::Search(args) => search(args),
    };
    match outcome {
        Ok(status) => ExitCode::from(status),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
