//! Command-line surface for the rauzy library: invariant reports, arc
//! labellings, word application, class enumeration, connectivity
//! certificates, verification suites, and diameter measurements.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rauzy::classes::{enumerate_classes, measure_diameter, Dynamics, Metric};
use rauzy::dynamics::{apply, apply_word};
use rauzy::invariants::{
    arf, cycle_invariant, exceptional_invariants, perm_type, sign, PermType,
};
use rauzy::labelling::build_labelling;
use rauzy::pathfinder::{connect_bfs, connect_rauzy, connect_sliding};
use rauzy::word::{Gen, Word};
use rauzy::{Perm, Side};

#[derive(Parser)]
#[command(name = "rauzy", version, about = "Rauzy-type dynamics on irreducible permutations")]
struct Cli {
    /// Seed for randomized commands; fixed seed gives bit-identical output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker-thread cap; the default runs single-threaded.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, ValueEnum)]
enum DynChoice {
    Extended,
    Sliding,
    Rauzy,
    Pivotless,
}

impl From<DynChoice> for Dynamics {
    fn from(d: DynChoice) -> Dynamics {
        match d {
            DynChoice::Extended => Dynamics::Extended,
            DynChoice::Sliding => Dynamics::Sliding,
            DynChoice::Rauzy => Dynamics::Rauzy,
            DynChoice::Pivotless => Dynamics::Pivotless,
        }
    }
}

#[derive(Subcommand)]
enum Verb {
    /// Print the invariant report of a permutation.
    Invariants { perm: String },
    /// Print the consistent arc labelling as a table.
    Label { perm: String },
    /// Apply a word to a permutation.
    Apply { word: String, perm: String },
    /// Enumerate the classes of a dynamics at size n.
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = DynChoice::Extended)]
        dynamics: DynChoice,
    },
    /// Search a connecting word between two permutations.
    Connect {
        source: String,
        target: String,
        #[arg(long, value_enum, default_value_t = DynChoice::Rauzy)]
        dynamics: DynChoice,
        /// Use the exhaustive search instead of the structural one.
        #[arg(long)]
        oracle: bool,
    },
    /// Run a verification suite; prints PASS/FAIL per item.
    Verify {
        #[arg(long, default_value = "all")]
        table: String,
    },
    /// Measure per-class diameters as CSV.
    Diameter {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = DynChoice::Extended)]
        dynamics: DynChoice,
    },
}

fn parse_perm(s: &str) -> Result<Perm, String> {
    s.parse::<Perm>().map_err(|e| format!("bad permutation '{s}': {e}"))
}

fn fmt_lambda(lam: &[usize]) -> String {
    let parts: Vec<String> = lam.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn cmd_invariants(perm: &str) -> Result<(), String> {
    let p = parse_perm(perm)?;
    if !p.is_irreducible() {
        return Err(format!("'{p}' is reducible; invariants need an irreducible permutation"));
    }
    let ci = cycle_invariant(&p);
    let a = arf(&p).map_err(|e| e.to_string())?;
    let s = sign(&p).map_err(|e| e.to_string())?;
    let ty = match perm_type(&p) {
        PermType::X { r, i } => format!("X({r},{i})"),
        PermType::H { r1, r2 } => format!("H({r1},{r2})"),
    };
    let hyper = rauzy::invariants::is_exceptional(&p);
    println!("perm:          {p}");
    println!("n:             {}", p.n());
    println!("lambda:        {}", fmt_lambda(&ci.lambda));
    println!("rank:          {}", ci.rank());
    println!("ell:           {}", ci.ell());
    println!("Abar:          {a}");
    println!("sign:          {s}");
    println!("type:          {ty}");
    println!("hyperelliptic: {hyper}");
    Ok(())
}

fn cmd_label(perm: &str) -> Result<(), String> {
    let p = parse_perm(perm)?;
    let lab = build_labelling(&p);
    println!("{:>4}  {:>6}  label", "arc", "side");
    for side in [Side::Bottom, Side::Top] {
        let (name, tag, map) = match side {
            Side::Bottom => ("bottom", "b", &lab.pi_b),
            Side::Top => ("top", "t", &lab.pi_t),
        };
        for (arc, l) in map {
            println!("{arc:>4}  {name:>6}  {tag}_{{{},{},{}}}", l.index, l.cycle_len, l.copy);
        }
    }
    Ok(())
}

fn cmd_apply(word: &str, perm: &str) -> Result<(), String> {
    let w: Word = word.parse().map_err(|e| format!("bad word '{word}': {e}"))?;
    let p = parse_perm(perm)?;
    let q = apply_word(&w, &p).map_err(|e| e.to_string())?;
    println!("{q}");
    Ok(())
}

fn cmd_classify(n: usize, d: Dynamics) -> Result<(), String> {
    let reports = enumerate_classes(n, d).map_err(|e| e.to_string())?;
    for r in &reports {
        println!("class:");
        println!("  representative: {}", r.representative);
        println!("  size:           {}", r.size);
        println!("  lambda:         {}", fmt_lambda(&r.fingerprint.lambda));
        if let Some(rk) = r.fingerprint.rank {
            println!("  rank:           {rk}");
        }
        println!("  sign:           {}", r.fingerprint.sign);
        println!("  hyperelliptic:  {}", r.fingerprint.hyperelliptic);
    }
    println!();
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(["classify_v1", "n", "lambda", "sign", "size", "diam_graph", "diam_alt"])
        .map_err(|e| e.to_string())?;
    for r in &reports {
        let lam: Vec<String> = r.fingerprint.lambda.iter().map(|x| x.to_string()).collect();
        w.write_record([
            String::new(),
            n.to_string(),
            lam.join("+"),
            r.fingerprint.sign.to_string(),
            r.size.to_string(),
            r.diameter_graph.map(|d| d.to_string()).unwrap_or_default(),
            r.diameter_alternation.map(|d| d.to_string()).unwrap_or_default(),
        ])
        .map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())?;
    Ok(())
}

fn cmd_connect(source: &str, target: &str, d: Dynamics, oracle: bool) -> Result<ExitCode, String> {
    let p = parse_perm(source)?;
    let q = parse_perm(target)?;
    let res = if oracle {
        connect_bfs(&p, &q, d)
    } else {
        match d {
            Dynamics::Rauzy => connect_rauzy(&p, &q),
            Dynamics::Sliding => connect_sliding(&p, &q),
            _ => connect_bfs(&p, &q, d),
        }
    };
    match res {
        Ok(Some(cert)) => {
            println!("word:       {}", cert.word);
            println!("graph:      {}", cert.word.graph_length());
            println!("alternation: {}", cert.word.alternation_length());
            println!("bound_ok:   {}", cert.bound_ok);
            Ok(ExitCode::SUCCESS)
        }
        Ok(None) => {
            println!("not connected");
            Ok(ExitCode::from(1))
        }
        Err(rauzy::Error::BudgetExceeded(m)) | Err(rauzy::Error::SearchBudgetExceeded(m)) => {
            println!("budget exceeded: {m}");
            Ok(ExitCode::from(3))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_diameter(n: usize, d: Dynamics) -> Result<(), String> {
    let reports = enumerate_classes(n, d).map_err(|e| e.to_string())?;
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(["diameter_v1", "n", "lambda", "sign", "size", "diam_graph", "diam_alt"])
        .map_err(|e| e.to_string())?;
    for r in &reports {
        let members = rauzy::classes::orbit_of(&r.representative, d);
        let dg = measure_diameter(&members, d, Metric::Graph).map_err(|e| e.to_string())?;
        let da = measure_diameter(&members, d, Metric::Alternation).map_err(|e| e.to_string())?;
        let lam: Vec<String> = r.fingerprint.lambda.iter().map(|x| x.to_string()).collect();
        w.write_record([
            String::new(),
            n.to_string(),
            lam.join("+"),
            r.fingerprint.sign.to_string(),
            r.size.to_string(),
            dg.to_string(),
            da.to_string(),
        ])
        .map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())?;
    Ok(())
}

fn random_irreducible(rng: &mut ChaCha8Rng, n: usize) -> Perm {
    loop {
        let mut vals: Vec<usize> = (1..=n).collect();
        vals.shuffle(rng);
        let p = Perm::from_slice(&vals).unwrap();
        if p.is_irreducible() {
            return p;
        }
    }
}

fn verify_small_n() -> bool {
    for n in 4..=7 {
        let Ok(reports) = enumerate_classes(n, Dynamics::Extended) else {
            return false;
        };
        let mut got: Vec<(Vec<usize>, i8, bool)> = reports
            .iter()
            .filter(|r| !r.fingerprint.lambda.contains(&1))
            .map(|r| {
                (r.fingerprint.lambda.clone(), r.fingerprint.sign, r.fingerprint.hyperelliptic)
            })
            .collect();
        got.sort();
        if got != rauzy::classes::small_table(n) {
            return false;
        }
    }
    true
}

fn verify_parity(n: usize) -> bool {
    use std::collections::HashMap;
    let Ok(reports) = enumerate_classes(n, Dynamics::Extended) else {
        return false;
    };
    let mut by_lambda: HashMap<Vec<usize>, Vec<i8>> = HashMap::new();
    for r in &reports {
        if r.fingerprint.hyperelliptic {
            continue;
        }
        by_lambda.entry(r.fingerprint.lambda.clone()).or_default().push(r.fingerprint.sign);
    }
    for (lam, mut signs) in by_lambda {
        if lam.contains(&1) {
            continue;
        }
        signs.sort_unstable();
        let evens = lam.iter().filter(|&&x| x % 2 == 0).count();
        let ok = if evens == 0 {
            signs == vec![-1, 1]
        } else {
            evens % 2 == 0 && signs == vec![0]
        };
        if !ok {
            return false;
        }
    }
    true
}

fn verify_exceptional() -> bool {
    for n in 4..=16 {
        let p = Perm::identity(n);
        let ci = cycle_invariant(&p);
        let s = match sign(&p) {
            Ok(s) => s,
            Err(_) => return false,
        };
        if (ci.lambda, s) != exceptional_invariants(n) {
            return false;
        }
    }
    true
}

fn verify_invariance(seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let n = rng.gen_range(4..=9);
        let p = random_irreducible(&mut rng, n);
        let g = match rng.gen_range(0..5) {
            0 => Gen::L,
            1 => Gen::LPrime,
            2 => Gen::R,
            3 => Gen::RPrime,
            _ => {
                if !p.is_standard() {
                    Gen::L
                } else {
                    Gen::S(rng.gen_range(2..=n))
                }
            }
        };
        let Ok(q) = apply(g, &p) else { continue };
        let (ok_l, ok_a) = (
            cycle_invariant(&p).lambda == cycle_invariant(&q).lambda,
            arf(&p).ok() == arf(&q).ok(),
        );
        if !ok_l || !ok_a {
            return false;
        }
    }
    true
}

fn cmd_verify(table: &str, seed: u64) -> Result<ExitCode, String> {
    let suites: Vec<(&str, Box<dyn Fn() -> bool>)> = vec![
        ("small-n", Box::new(verify_small_n)),
        ("parity", Box::new(|| verify_parity(8))),
        ("exceptional", Box::new(verify_exceptional)),
        ("invariance", Box::new(move || verify_invariance(seed))),
    ];
    let mut failed = false;
    let mut matched = false;
    for (name, f) in suites {
        if table != "all" && table != name {
            continue;
        }
        matched = true;
        let ok = f();
        println!("{}: {name}", if ok { "PASS" } else { "FAIL" });
        failed |= !ok;
    }
    if !matched {
        return Err(format!(
            "unknown table '{table}'; expected all, small-n, parity, exceptional, invariance"
        ));
    }
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 1 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global();
    } else {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
    }
    let out = match &cli.verb {
        Verb::Invariants { perm } => cmd_invariants(perm).map(|()| ExitCode::SUCCESS),
        Verb::Label { perm } => cmd_label(perm).map(|()| ExitCode::SUCCESS),
        Verb::Apply { word, perm } => cmd_apply(word, perm).map(|()| ExitCode::SUCCESS),
        Verb::Classify { n, dynamics } => {
            cmd_classify(*n, (*dynamics).into()).map(|()| ExitCode::SUCCESS)
        }
        Verb::Connect { source, target, dynamics, oracle } => {
            cmd_connect(source, target, (*dynamics).into(), *oracle)
        }
        Verb::Verify { table } => cmd_verify(table, cli.seed),
        Verb::Diameter { n, dynamics } => {
            cmd_diameter(*n, (*dynamics).into()).map(|()| ExitCode::SUCCESS)
        }
    };
    match out {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
