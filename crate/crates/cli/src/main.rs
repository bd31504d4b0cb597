use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use padiq::global::{
    almost_universality_verdict, criterion_check, relevant_primes, with_threads, GlobalReport,
    GlobalVerdict,
};
use padiq::lattice::{
    det_square_class, hasse_invariant, is_isotropic, jordan_decompose, FormMatrix,
};
use padiq::local::{
    decide_representation, is_primitively_universal_local_with, spectrum, UniversalityOptions,
};
use padiq::padic::{parse_target, SquareClass};
use padiq::verify::{fixtures, DEFAULT_SEED};
use padiq::Error;

#[derive(Parser)]
#[command(
    name = "padiq",
    version,
    about = "Local and global analysis of integral quadratic forms"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for parallel searches.
    #[arg(long, global = true, env = "PADIQ_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormArg {
    /// Form description: inline JSON or a path to a JSON file.
    #[arg(long)]
    form: String,
}

#[derive(Subcommand)]
enum Command {
    /// Jordan splitting, invariants and universality at each relevant prime.
    Analyze {
        #[command(flatten)]
        form: FormArg,
        /// Restrict to one prime.
        #[arg(short)]
        p: Option<u64>,
    },
    /// Jordan splitting over Z_p.
    Jordan {
        #[command(flatten)]
        form: FormArg,
        #[arg(short)]
        p: u64,
    },
    /// Decide whether a target is (primitively) represented over Z_p.
    Rep {
        #[command(flatten)]
        form: FormArg,
        #[arg(short)]
        p: u64,
        /// Integer, fraction or p^e*u.
        #[arg(short, allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        primitive: bool,
    },
    /// Square classes of order at most emax that are represented.
    Spectrum {
        #[command(flatten)]
        form: FormArg,
        #[arg(short)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        emax: u32,
        #[arg(long)]
        primitive: bool,
    },
    /// Universality and primitive universality over Z_p.
    Universal {
        #[command(flatten)]
        form: FormArg,
        #[arg(short)]
        p: u64,
        /// Depth of the class scan when no rule decides.
        #[arg(long)]
        emax: Option<u32>,
    },
    /// Enumerate represented integers up to a bound.
    Scan {
        #[command(flatten)]
        form: FormArg,
        #[arg(short = 'B')]
        bound: u64,
    },
    /// Almost universality verdicts from the local data.
    Verdict {
        #[command(flatten)]
        form: FormArg,
    },
    /// Check the sufficient criterion for almost primitive universality.
    Criterion {
        #[command(flatten)]
        form: FormArg,
    },
    /// Run the fixture corpus and print PASS/FAIL per criterion.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Comma-separated criterion ids to run.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

enum Failure {
    /// Malformed input: exit 2.
    Input(String),
    /// Valid input the computation rejects: exit 1.
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Description { .. } | Error::Target(_) => Failure::Input(e.to_string()),
            e => Failure::Compute(e),
        }
    }
}

struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            ok: true,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match with_threads(cli.threads, || run(cli.command)) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
            } else {
                print!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_form(arg: &FormArg) -> Result<FormMatrix, Failure> {
    let src = arg.form.trim();
    let text = if src.starts_with('{') {
        src.to_string()
    } else {
        std::fs::read_to_string(Path::new(src))
            .map_err(|e| Failure::Input(format!("cannot read form file {src}: {e}")))?
    };
    Ok(FormMatrix::from_description(&text)?)
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Analyze { form, p } => analyze(&load_form(&form)?, p),
        Command::Jordan { form, p } => {
            let js = jordan_decompose(&load_form(&form)?, p)?;
            let mut text = format!("{js}\n");
            for c in &js.components {
                let _ = writeln!(
                    text,
                    "  scale {}^{}: rank {}, {}, norm {}^{}",
                    p,
                    c.scale_exp,
                    c.rank,
                    if c.proper { "proper" } else { "improper" },
                    p,
                    c.norm_exp
                );
            }
            Ok(Output::new(text, to_json(&js)))
        }
        Command::Rep {
            form,
            p,
            a,
            primitive,
        } => {
            let l = load_form(&form)?;
            let target = parse_target(&a)?;
            let v = decide_representation(&l, p, &target, primitive)?;
            let mut text = format!("{}\n", v.decided);
            match &v.witness {
                Some(w) => {
                    let _ = writeln!(
                        text,
                        "witness {:?}: q ≡ {} mod {}^{}, gradient order {}",
                        w.vector, target, p, w.modulus_exp, w.gradient_ord
                    );
                }
                None => {
                    let _ = writeln!(text, "no solution mod {}^{}", p, v.exhaustion_level);
                }
            }
            Ok(Output::new(text, to_json(&v)))
        }
        Command::Spectrum {
            form,
            p,
            emax,
            primitive,
        } => {
            let l = load_form(&form)?;
            let found = spectrum(&l, p, emax, primitive)?;
            let missing: Vec<SquareClass> = SquareClass::up_to(p, emax)
                .into_iter()
                .filter(|c| !found.contains(c))
                .collect();
            let names = |v: &mut dyn Iterator<Item = &SquareClass>| {
                v.map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
            };
            let text = format!(
                "found [{}]\nmissing [{}]\n",
                names(&mut found.iter()),
                names(&mut missing.iter())
            );
            let json = json!({ "prime": p, "e_max": emax, "primitive": primitive, "found": found, "missing": missing });
            Ok(Output::new(text, json))
        }
        Command::Universal { form, p, emax } => {
            let l = load_form(&form)?;
            let r =
                is_primitively_universal_local_with(&l, p, UniversalityOptions { e_max: emax })?;
            let mut text = r.render();
            if !(r.primitively_universal.is_yes() || r.primitively_universal.is_no()) {
                text.push_str("  (bounded: no obstruction found, not a proof)\n");
            }
            Ok(Output::new(text, to_json(&r)))
        }
        Command::Scan { form, bound } => {
            let r = GlobalReport::build(&load_form(&form)?, bound)?;
            Ok(Output::new(r.render(), to_json(&r)))
        }
        Command::Verdict { form } => {
            let v = almost_universality_verdict(&load_form(&form)?)?;
            Ok(Output::new(render_verdict(&v), to_json(&v)))
        }
        Command::Criterion { form } => {
            let r = criterion_check(&load_form(&form)?)?;
            Ok(Output::new(r.render(), to_json(&r)))
        }
        Command::Verify { seed, only } => {
            let mut text = String::new();
            let mut rows = Vec::new();
            let mut ok = true;
            for f in fixtures()
                .iter()
                .filter(|f| only.is_empty() || only.contains(&f.id))
            {
                let o = f.run(seed);
                ok &= o.passed;
                let _ = writeln!(text, "{}", o.line());
                rows.push(json!({
                    "id": o.id,
                    "title": o.title,
                    "passed": o.passed,
                    "detail": o.detail,
                    "limit_ms": o.limit.as_millis() as u64,
                }));
            }
            let _ = writeln!(text, "{}", if ok { "all passed" } else { "FAILURES" });
            Ok(Output {
                text,
                json: json!({ "seed": seed, "criteria": rows, "passed": ok }),
                ok,
            })
        }
    }
}

fn analyze(l: &FormMatrix, only: Option<u64>) -> Result<Output, Failure> {
    let primes = match only {
        Some(p) => vec![p],
        None => relevant_primes(l)?,
    };
    let mut text = format!(
        "form {l}\nrank {}, gram determinant {}\n",
        l.rank(),
        l.gram_det()
    );
    let mut rows = Vec::new();
    for p in primes {
        let js = jordan_decompose(l, p)?;
        let det = det_square_class(l, p)?;
        let hasse = hasse_invariant(l, p)?;
        let iso = is_isotropic(l, p)?;
        let _ = writeln!(
            text,
            "p = {p}\n  jordan {js}\n  determinant class {det}, hasse {hasse:+}, {}",
            if iso { "isotropic" } else { "anisotropic" }
        );
        let mut row = json!({
            "prime": p,
            "jordan": js,
            "det_class": det,
            "hasse": hasse,
            "isotropic": iso,
        });
        if !l.is_half() {
            let r = is_primitively_universal_local_with(l, p, UniversalityOptions::default())?;
            for line in r.render().lines() {
                let _ = writeln!(text, "  {line}");
            }
            row["universality"] = to_json(&r);
        }
        rows.push(row);
    }
    Ok(Output::new(text, json!({ "form": l, "primes": rows })))
}

fn render_verdict(v: &GlobalVerdict) -> String {
    let mut out = String::new();
    let primes: Vec<String> = v.relevant_primes.iter().map(|p| p.to_string()).collect();
    let _ = writeln!(out, "relevant primes: {}", primes.join(", "));
    for r in &v.per_prime {
        out.push_str(&r.render());
    }
    let _ = writeln!(out, "almost universal: {}", v.almost_universal);
    let _ = writeln!(
        out,
        "almost primitively universal: {}",
        v.almost_primitively_universal
    );
    for w in &v.progression_witnesses {
        let _ = writeln!(out, "missed progression at p = {}: {w}", w.prime);
    }
    for n in &v.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}
