use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use shiftaut::counting::{bell, count_foldings_g_n_2, enumerate_foldings_capped, EnumerationMethod, DEFAULT_LATTICE_CAP};
use shiftaut::decomposition::{decompose, decompose_involutions, verify};
use shiftaut::graph_aut::{enumerate_automorphisms, is_permutation_induced, transducer_from_automorphism, DEFAULT_AUT_CAP};
use shiftaut::io::{self, FormatError, Manifest, MachineFile};
use shiftaut::subgroup::{subgroup_automaton, subgroup_closure, DEFAULT_SUBGROUP_CAP};
use shiftaut::{corpus, Automaton, ElementOrder, Error, LocalRule, OrderCaps, Transducer};

#[derive(Parser)]
#[command(name = "shiftaut", version, about = "Synchronizing automata, transducers and automorphisms of the one-sided shift")]
struct Cli {
    /// Write to this path instead of standard output (a directory for `decompose`).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exhaustive,
    Lattice,
}

#[derive(Subcommand)]
enum Command {
    /// The de Bruijn automaton G(n, m).
    Debruijn { n: usize, m: usize },
    /// Synchronizing level and class counts of the synchronizing sequence.
    Sync { file: PathBuf },
    /// The core of an automaton or transducer.
    Core { file: PathBuf },
    /// Minimal form of a transducer.
    Minimize { file: PathBuf },
    /// Minimal form of the product, left machine first.
    Product { left: PathBuf, right: PathBuf },
    /// Inverse of a transducer, minimized.
    Invert { file: PathBuf },
    /// Exit 0 if the transducer is an element of H_n, 1 otherwise.
    CheckHn { file: PathBuf },
    /// Transducer of a local rule.
    Rule2trans { file: PathBuf },
    /// Local rule of a synchronizing transducer.
    Trans2rule { file: PathBuf },
    /// All automorphisms of the automaton's underlying digraph.
    Aut {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_AUT_CAP)]
        cap: usize,
    },
    /// The transducer H(A, φ) of an automorphism of A.
    Haphi { file: PathBuf, automorphism: PathBuf },
    /// Factor an element of H_n into finite-order factors and a single-state remainder.
    Decompose {
        file: PathBuf,
        /// Split every factor into factors of order at most 2.
        #[arg(long)]
        involutions: bool,
    },
    /// Order of an element of H_n.
    Order {
        file: PathBuf,
        #[arg(long, default_value_t = OrderCaps::default().iterations)]
        cap: usize,
    },
    /// Number of foldings of G(n, m).
    FoldCount { n: usize, m: usize },
    /// List the foldings of G(n, m), one partition per line.
    FoldEnum {
        n: usize,
        m: usize,
        #[arg(long, value_enum, default_value_t = Method::Lattice)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_LATTICE_CAP)]
        cap: usize,
    },
    /// The k-th Bell number.
    Bell { k: usize },
    /// The automaton A(G) of the finite group generated by the given elements,
    /// followed by the automorphism of each element.
    SubgroupAg {
        #[arg(required = true)]
        generators: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SUBGROUP_CAP)]
        cap: usize,
    },
    /// Graphviz rendering of an automaton or transducer.
    Dot { file: PathBuf },
    /// A random element of H_n built from automorphisms of random foldings of G(n, m).
    RandomElement {
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        factors: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
enum Failure {
    /// Exit 1: the answer is "no" or the input does not qualify.
    Verdict(String),
    /// Exit 2: unreadable input or files.
    Input(String),
    /// Exit 3: a configured cap was hit.
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Verdict(e.to_string())
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Invalid(inner) if inner.is_cap() => Failure::Cap(inner.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// Text to emit plus whether the verdict was positive.
struct Output {
    text: String,
    positive: bool,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output { text, positive: true }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn machine(path: &Path) -> Result<MachineFile, Failure> {
    MachineFile::parse(&read(path)?).map_err(|e| located(path, e))
}

fn located(path: &Path, e: FormatError) -> Failure {
    match Failure::from(e) {
        Failure::Input(msg) => Failure::Input(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn transducer(path: &Path) -> Result<Transducer, Failure> {
    match machine(path)? {
        MachineFile::Transducer(t) => Ok(t),
        MachineFile::Rule(f) => Ok(f.to_transducer()?),
        MachineFile::Automaton(_) => Err(Failure::Input(format!("{}: expected a transducer", path.display()))),
    }
}

fn automaton(path: &Path) -> Result<Automaton, Failure> {
    match machine(path)? {
        MachineFile::Automaton(a) => Ok(a),
        MachineFile::Transducer(t) => Ok(t.base().clone()),
        MachineFile::Rule(_) => Err(Failure::Input(format!("{}: expected an automaton", path.display()))),
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let out = match &cli.command {
        Command::Debruijn { n, m } => io::render_automaton(&Automaton::de_bruijn(*n, *m)?).into(),
        Command::Sync { file } => {
            let a = automaton(file)?;
            let seq = a.sync_sequence();
            let counts: Vec<String> = seq.class_counts().iter().map(usize::to_string).collect();
            let mut text = format!("class counts: {}\n", counts.join(" "));
            match seq.level() {
                Some(k) => writeln!(text, "strongly synchronizing at level {k}").unwrap(),
                None => writeln!(text, "not strongly synchronizing").unwrap(),
            }
            Output { text, positive: seq.level().is_some() }
        }
        Command::Core { file } => match machine(file)? {
            MachineFile::Transducer(t) => io::render_transducer(&t.core()?).into(),
            MachineFile::Automaton(a) => io::render_automaton(&a.core_of()?.0).into(),
            MachineFile::Rule(f) => io::render_transducer(&f.to_transducer()?.core()?).into(),
        },
        Command::Minimize { file } => io::render_transducer(&transducer(file)?.minimal()).into(),
        Command::Product { left, right } => {
            io::render_transducer(&transducer(left)?.product_min(&transducer(right)?)?).into()
        }
        Command::Invert { file } => io::render_transducer(&transducer(file)?.invert()?.minimal()).into(),
        Command::CheckHn { file } => {
            let yes = transducer(file)?.is_in_hn();
            Output { text: format!("{yes}\n"), positive: yes }
        }
        Command::Rule2trans { file } => match machine(file)? {
            MachineFile::Rule(f) => io::render_transducer(&f.to_transducer()?).into(),
            _ => return Err(Failure::Input(format!("{}: expected a rule", file.display()))),
        },
        Command::Trans2rule { file } => io::render_rule(&LocalRule::from_transducer(&transducer(file)?)?).into(),
        Command::Aut { file, cap } => {
            let a = automaton(file)?;
            let all = enumerate_automorphisms(&a, *cap)?;
            let mut text = format!("# {} automorphisms\n", all.len());
            for phi in &all {
                match is_permutation_induced(&a, phi)? {
                    Some(rho) => writeln!(text, "# induced by {:?}", rho.as_slice()).unwrap(),
                    None => text.push_str("# not induced by a letter permutation\n"),
                }
                text.push_str(&io::render_automorphism(phi));
            }
            text.into()
        }
        Command::Haphi { file, automorphism } => {
            let a = automaton(file)?;
            let phi = io::parse_automorphism(&read(automorphism)?, &a).map_err(|e| located(automorphism, e))?;
            io::render_transducer(&transducer_from_automorphism(&a, &phi)?).into()
        }
        Command::Decompose { file, involutions } => return decompose_command(cli, file, *involutions),
        Command::Order { file, cap } => {
            let t = transducer(file)?;
            let caps = OrderCaps { iterations: *cap, ..OrderCaps::default() };
            match t.order_with(caps)? {
                ElementOrder::Finite(k) => format!("{k}\n").into(),
                ElementOrder::ExceedsCap => return Err(Failure::Cap(format!("order exceeds {cap}"))),
            }
        }
        Command::FoldCount { n, m } => fold_count(*n, *m)?.into(),
        Command::FoldEnum { n, m, method, cap } => {
            let g = Automaton::de_bruijn(*n, *m)?;
            let method = match method {
                Method::Exhaustive => EnumerationMethod::Exhaustive,
                Method::Lattice => EnumerationMethod::Lattice,
            };
            let mut all = enumerate_foldings_capped(&g, method, *cap)?;
            all.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
            let mut text = format!("# {} foldings of G({n},{m})\n", all.len());
            for p in &all {
                let labels: Vec<String> = p.as_slice().iter().map(usize::to_string).collect();
                writeln!(text, "{}", labels.join(" ")).unwrap();
            }
            text.into()
        }
        Command::Bell { k } => format!("{}\n", bell(*k)).into(),
        Command::SubgroupAg { generators, cap } => {
            let gens = generators.iter().map(|p| transducer(p)).collect::<Result<Vec<_>, _>>()?;
            let g = subgroup_closure(&gens, *cap)?;
            let ag = subgroup_automaton(&g)?;
            ag.check(&g)?;
            let mut text = format!("# group of order {}, words of length {}\n", g.len(), ag.level);
            text.push_str(&io::render_automaton(&ag.automaton));
            for (i, phi) in ag.embedding.iter().enumerate() {
                writeln!(text, "# element {i}").unwrap();
                text.push_str(&io::render_automorphism(phi));
            }
            text.into()
        }
        Command::Dot { file } => match machine(file)? {
            MachineFile::Automaton(a) => io::automaton_to_dot(&a).into(),
            MachineFile::Transducer(t) => io::transducer_to_dot(&t).into(),
            MachineFile::Rule(f) => io::transducer_to_dot(&f.to_transducer()?).into(),
        },
        Command::RandomElement { n, m, factors, seed } => {
            let t = corpus::random_hn_element(&mut corpus::seeded(*seed), *n, *m, *factors)?;
            io::render_transducer(&t).into()
        }
    };
    Ok(out)
}

fn fold_count(n: usize, m: usize) -> Result<String, Failure> {
    let count = match m {
        0 | 1 => bell(n),
        2 => count_foldings_g_n_2(n)?,
        _ => {
            let g = Automaton::de_bruijn(n, m)?;
            enumerate_foldings_capped(&g, EnumerationMethod::Lattice, DEFAULT_LATTICE_CAP)?.len().into()
        }
    };
    Ok(format!("{count}\n"))
}

fn decompose_command(cli: &Cli, file: &Path, involutions: bool) -> Result<Output, Failure> {
    let t = transducer(file)?;
    if !t.is_in_hn() {
        return Err(Failure::Verdict(format!("{}: not an element of H_n", file.display())));
    }
    let f = if involutions { decompose_involutions(&t)? } else { decompose(&t)? };
    let verification = verify(&f)?;
    let manifest = Manifest::describe(&f, &verification);
    let files: Vec<(&str, &Transducer)> = std::iter::once((manifest.remainder.file.as_str(), &f.remainder))
        .chain(manifest.factors.iter().map(|e| e.file.as_str()).zip(&f.inverse_factors))
        .collect();
    let positive = verification.ok();
    match &cli.output {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
            for (name, machine) in &files {
                write_file(&dir.join(name), &io::render_transducer(machine))?;
            }
            write_file(&dir.join("manifest.txt"), &manifest.render())?;
            Ok(Output { text: String::new(), positive })
        }
        None => {
            let mut text = manifest.render();
            for (name, machine) in &files {
                writeln!(text, "\n# {name}").unwrap();
                text.push_str(&io::render_transducer(machine));
            }
            Ok(Output { text, positive })
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = run(&cli).and_then(|out| {
        let is_dir_command = matches!(cli.command, Command::Decompose { .. });
        match &cli.output {
            Some(path) if !is_dir_command => write_file(path, &out.text)?,
            _ => print!("{}", out.text),
        }
        Ok(out.positive)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(failure) => {
            let (code, msg) = match failure {
                Failure::Verdict(m) => (1, m),
                Failure::Input(m) => (2, m),
                Failure::Cap(m) => (3, m),
            };
            eprintln!("shiftaut: {msg}");
            ExitCode::from(code)
        }
    }
}
