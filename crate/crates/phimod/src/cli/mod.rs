//! Command-line front end. `run` returns the process exit code:
//! 0 success, 1 verification mismatch, 2 lift failure, 3 bad input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use crate::applications::patterns::{bundled, Manifest, BUNDLED};
use crate::applications::{
    builtin, classify, verify_against_oracle, verify_appendix, BuiltinParams, ResidueTable, BUILTIN_NAMES,
};
use crate::error::{Error, Result};
use crate::hseries::{expand_phi_power, normal_form_phi_power, Composition, HCombo, HComboJson, EXPAND_CAP};
use crate::laurent::LaurentPoly;
use crate::minpoly::{self, BivarPoly, Tree};
use crate::modarith::Context;
use crate::phipoly::{PhiPoly, PhiPolyJson};
use crate::solver::{find_base, solve, FunctionalEquation, LiftReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_LIFT: i32 = 2;
pub const EXIT_BAD_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "phimod", version, about = "Generating functions modulo prime powers via Φ(z) = Σ z^(p^n)")]
#[command(disable_help_flag = true)]
struct Cli {
    /// Print help
    #[arg(long, action = ArgAction::Help, global = true)]
    help: Option<bool>,
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Prime p
    #[arg(short = 'p', long = "prime", global = true)]
    p: Option<u64>,
    /// Work modulo p^gamma
    #[arg(long, global = true, conflicts_with = "alpha")]
    gamma: Option<u32>,
    /// Work modulo p^(p^alpha) (lifting exponent)
    #[arg(long, global = true)]
    alpha: Option<u32>,
    /// Denominator D of the series variable w = z^(1/D)
    #[arg(long = "scale-d", global = true)]
    scale_d: Option<u32>,
    /// Exponent h of the base q = p^h
    #[arg(short = 'h', long = "step-h", global = true)]
    step_h: Option<u32>,
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Write the primary output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normal form of Φ^K in the H-basis
    ExpandPhi {
        #[arg(short = 'K', long = "power")]
        k: u64,
    },
    /// Rewrite a sum of H-series into coprime indices
    ReduceH {
        /// Compositions such as 3,1 (each with coefficient 1)
        comps: Vec<String>,
        /// HCombo JSON file instead of positional compositions
        #[arg(long)]
        file: Option<PathBuf>,
        /// Print every rewrite step
        #[arg(long)]
        trace: bool,
    },
    /// Coefficient of z^n
    Coeff {
        #[arg(long = "phi-power", conflicts_with = "file")]
        phi_power: Option<u64>,
        /// PhiPoly JSON (as written by solve --out)
        #[arg(long)]
        file: Option<PathBuf>,
        /// Exponent n, decimal, any size
        #[arg(short = 'n')]
        n: String,
        /// Reduce the result modulo this divisor of the working modulus
        #[arg(long)]
        modulus: Option<u64>,
        /// Use the largest word-sized power of p so the integer value shows through
        #[arg(long)]
        raw: bool,
    },
    /// Lift a mod-p solution to modulus p^(p^alpha)
    Solve {
        #[command(flatten)]
        source: EquationArgs,
        /// Certification order in w-units
        #[arg(long)]
        cert_order: Option<i64>,
    },
    /// Residues of the coefficients for n ≤ N
    Classify {
        #[command(flatten)]
        source: EquationArgs,
        #[arg(long, conflicts_with = "builtin")]
        file: Option<PathBuf>,
        #[arg(short = 'N')]
        n_max: u64,
        #[arg(long)]
        modulus: Option<u64>,
        /// Only rows with this residue
        #[arg(long)]
        residue: Option<u64>,
        /// Shorthand for --format csv
        #[arg(long)]
        csv: bool,
    },
    /// Compare a solution with exact integer values, or check a bundled residue manifest
    Verify {
        #[command(flatten)]
        source: EquationArgs,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(short = 'N', default_value_t = 1000)]
        n_max: u64,
        #[arg(long)]
        modulus: Option<u64>,
        /// Bundled manifest name, or a manifest JSON path
        #[arg(long)]
        manifest: Option<String>,
    },
    /// Polynomials A(z,t) with A(z,Φ(z)) ≡ 0 mod p^gamma
    Minpoly {
        #[command(subcommand)]
        action: MinpolyCmd,
    },
    /// Blossom series through T = z(1+T)^k
    AppendixCheck {
        #[arg(short = 'k', default_value_t = 3)]
        k: u64,
        #[arg(long, default_value_t = 60)]
        order: usize,
    },
}

#[derive(Subcommand, Debug)]
enum MinpolyCmd {
    /// Decide vanishing exactly in the H-basis
    Verify {
        #[arg(long, required_unless_present = "poly_file")]
        poly: Option<String>,
        /// BivarPoly JSON
        #[arg(long)]
        poly_file: Option<PathBuf>,
    },
    /// Build A_2 … A_delta starting from t^p − t + z
    Search {
        #[arg(long, default_value_t = 2)]
        delta: u32,
        /// Perturb only the coefficients of A_{delta-1}^p
        #[arg(long)]
        literal: bool,
    },
    /// Least degree allowed for the modulus p^gamma
    Bound,
}

#[derive(Args, Debug, Clone, Default)]
struct EquationArgs {
    /// One of the built-in equations
    #[arg(long)]
    builtin: Option<String>,
    /// Polynomial in z and F, e.g. "F^2 - F + z"
    #[arg(long = "eq", conflicts_with = "builtin")]
    eq: Option<String>,
    /// Initial terms of the solution, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    initial: Vec<i64>,
    /// Parameter k of the blossom equation
    #[arg(short = 'k', long = "k")]
    k: Option<u64>,
}

struct Env {
    g: Global,
    out: Vec<u8>,
}

impl Env {
    fn emit(&mut self, s: &str) {
        self.out.extend_from_slice(s.as_bytes());
        if !s.ends_with('\n') {
            self.out.push(b'\n');
        }
    }

    fn p(&self) -> Result<u64> {
        self.g.p.ok_or_else(|| Error::BadInput("-p is required".into()))
    }

    fn step(&self) -> u32 {
        self.g.step_h.unwrap_or(1)
    }

    /// γ from --gamma, or q^α from --alpha, else 1.
    fn gamma(&self, p: u64) -> Result<u32> {
        match (self.g.gamma, self.g.alpha) {
            (Some(g), _) => Ok(g),
            (None, Some(a)) => {
                let q = p.checked_pow(self.step()).ok_or_else(|| Error::OutOfRange("q overflows".into()))?;
                q.checked_pow(a)
                    .and_then(|x| u32::try_from(x).ok())
                    .ok_or_else(|| Error::OutOfRange("p^alpha overflows".into()))
            }
            (None, None) => Ok(1),
        }
    }

    fn ctx(&self) -> Result<Context> {
        let p = self.p()?;
        Context::with_step(p, self.gamma(p)?, self.g.scale_d.unwrap_or(1), self.step())
    }
}

/// Largest γ with p^γ below 2^62.
fn word_gamma(p: u64) -> u32 {
    let mut g = 1;
    let mut m = p;
    while let Some(next) = m.checked_mul(p).filter(|&x| x < 1 << 62) {
        m = next;
        g += 1;
    }
    g
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::BadInput(format!("{}: {e}", path.display())))
}

fn parse_big(s: &str) -> Result<BigInt> {
    s.trim().parse::<BigInt>().map_err(|_| Error::BadInput(format!("not an integer: {s}")))
}

fn load_phipoly(path: &Path, env: &Env) -> Result<PhiPoly> {
    let j: PhiPolyJson =
        serde_json::from_str(&read(path)?).map_err(|e| Error::BadInput(format!("{}: {e}", path.display())))?;
    PhiPoly::from_json(&j, env.g.p, env.g.gamma)
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn equation_of(env: &Env, src: &EquationArgs) -> Result<FunctionalEquation> {
    if let Some(name) = &src.builtin {
        let params = BuiltinParams { p: env.g.p, h: env.g.step_h, k: src.k };
        let mut eq = builtin(name, params)?.equation;
        if let Some(d) = env.g.scale_d {
            if d != eq.scale_d {
                return Err(Error::BadInput(format!("{name} uses scaleD = {}", eq.scale_d)));
            }
        }
        eq.name = name.clone();
        return Ok(eq);
    }
    let text = src.eq.as_ref().ok_or_else(|| {
        Error::BadInput(format!("give --builtin ({}) or --eq", BUILTIN_NAMES.join(", ")))
    })?;
    let init: Vec<BigInt> = src.initial.iter().map(|&x| BigInt::from(x)).collect();
    FunctionalEquation::parse("equation", env.p()?, text, env.g.scale_d.unwrap_or(1), env.step(), &init)
}

fn alpha(env: &Env) -> u32 {
    env.g.alpha.unwrap_or(1)
}

fn run_solve(env: &Env, src: &EquationArgs, cert: Option<i64>) -> Result<(FunctionalEquation, LiftReport)> {
    let eq = equation_of(env, src)?;
    let a = alpha(env);
    let base = match &src.builtin {
        Some(name) => builtin(name, BuiltinParams { p: env.g.p, h: env.g.step_h, k: src.k })?.base(a),
        None => None,
    };
    let base = match base {
        Some(b) => b,
        None => find_base(&eq, a, None).ok_or_else(|| Error::LiftFailed {
            beta: 1,
            reason: "no solution modulo p in the search window".into(),
        })?,
    };
    let rep = solve(&eq, &base, a, cert)?;
    Ok((eq, rep))
}

fn solution_of(env: &Env, src: &EquationArgs, file: Option<&PathBuf>) -> Result<PhiPoly> {
    if let Some(f) = file {
        return load_phipoly(f, env);
    }
    let (_, rep) = run_solve(env, src, None)?;
    match rep.failure {
        Some(f) => Err(Error::LiftFailed { beta: rep.reached_beta + 1, reason: f }),
        None => Ok(rep.solution),
    }
}

fn load_manifest(name: &str) -> Result<Manifest> {
    if BUNDLED.contains(&name) {
        bundled(name)
    } else {
        Manifest::from_json(&read(Path::new(name))?)
    }
}

fn dispatch(env: &mut Env, cmd: Command) -> Result<i32> {
    let fmt = env.g.format;
    match cmd {
        Command::ExpandPhi { k } => {
            let ctx = env.ctx()?;
            let c = if k <= EXPAND_CAP { expand_phi_power(ctx, k)?.reduce() } else { normal_form_phi_power(ctx, k) };
            let s = if fmt == Format::Json { to_json(&c.to_json()) } else { c.display(false) };
            env.emit(&s);
        }
        Command::ReduceH { comps, file, trace } => {
            let ctx = env.ctx()?;
            let c = match file {
                Some(f) => {
                    let j: HComboJson =
                        serde_json::from_str(&read(&f)?).map_err(|e| Error::BadInput(format!("{}: {e}", f.display())))?;
                    HCombo::from_json(ctx, &j)?
                }
                None => {
                    let mut c = HCombo::zero(ctx);
                    for s in &comps {
                        let parts = s
                            .split(',')
                            .map(|x| x.trim().parse::<u64>().map_err(|_| Error::BadInput(format!("bad composition {s}"))))
                            .collect::<Result<Vec<_>>>()?;
                        c.add_term(Composition::new(parts)?, &LaurentPoly::one(ctx));
                    }
                    c
                }
            };
            let (r, steps) = c.reduce_traced();
            if trace && fmt == Format::Text {
                for (from, to) in &steps {
                    let to: Vec<String> = to.iter().map(|t| t.to_string()).collect();
                    env.emit(&format!("{from} -> {}", to.join(", ")));
                }
            }
            let s = if fmt == Format::Json { to_json(&r.to_json()) } else { r.display(false) };
            env.emit(&s);
        }
        Command::Coeff { phi_power, file, n, modulus, raw } => {
            let n = parse_big(&n)?;
            let value = match (phi_power, file) {
                (Some(k), _) => {
                    let p = env.p()?;
                    let gamma = if raw { word_gamma(p) } else { env.gamma(p)? };
                    let ctx = Context::with_step(p, gamma, 1, env.step())?;
                    normal_form_phi_power(ctx, k).coeff_at_z(&n)?
                }
                (None, Some(f)) => load_phipoly(&f, env)?.extract_coefficient(&n)?,
                (None, None) => return Err(Error::BadInput("give --phi-power or --file".into())),
            };
            let value = match modulus {
                Some(m) => value.reduce_to(m)?,
                None => value,
            };
            let s = match fmt {
                Format::Json => to_json(&json!({"n": n.to_string(), "value": value.value, "modulus": value.modulus})),
                _ if raw => value.signed().to_string(),
                _ => value.to_string(),
            };
            env.emit(&s);
        }
        Command::Solve { source, cert_order } => {
            let (eq, rep) = run_solve(env, &source, cert_order)?;
            if let Some(path) = env.g.out.take() {
                fs::write(&path, to_json(&rep.solution.to_json()))
                    .map_err(|e| Error::BadInput(format!("{}: {e}", path.display())))?;
            }
            let s = match fmt {
                Format::Json => to_json(&rep.to_json(&eq)),
                _ => {
                    let mut s = format!(
                        "{}: modulo {}^{} ({})\n",
                        eq.name,
                        eq.p,
                        rep.reached_beta,
                        if rep.is_success() { "certified" } else { "not certified" }
                    );
                    if let Some(f) = &rep.failure {
                        s.push_str(&format!("failure: {f}\n"));
                    }
                    s.push_str(&rep.solution.display(false));
                    s
                }
            };
            env.emit(&s);
            if !rep.is_success() {
                return Ok(EXIT_LIFT);
            }
        }
        Command::Classify { source, file, n_max, modulus, residue, csv } => {
            let sol = solution_of(env, &source, file.as_ref())?;
            let m = modulus.unwrap_or(sol.ctx().modulus());
            let table = classify(&sol, n_max, m)?;
            let s = if csv || fmt == Format::Csv {
                table.to_csv(residue)
            } else if fmt == Format::Json {
                match residue {
                    Some(r) => to_json(&json!({"modulus": m, "residue": r, "positions": table.positions(r)})),
                    None => table.to_json(),
                }
            } else {
                text_table(&table, residue)
            };
            env.emit(&s);
        }
        Command::Verify { source, file, n_max, modulus, manifest } => {
            let sol = solution_of(env, &source, file.as_ref())?;
            if let Some(name) = manifest {
                let man = load_manifest(&name)?;
                let table = classify(&sol, n_max, man.modulus)?;
                let rep = man.check(&table.residues)?;
                let ok = if man.exhaustive { rep.exhaustive_ok() } else { rep.spot_ok() };
                let s = if fmt == Format::Json {
                    to_json(&json!({"manifest": man.name, "ok": ok, "report": rep}))
                } else {
                    let mut s = String::from(if ok { "OK" } else { "MISMATCH" });
                    for (item, n, want, got) in rep.item_failures.iter().take(20) {
                        s.push_str(&format!("\n{item}: n={n} expected {want} got {got}"));
                    }
                    for (n, r) in rep.excluded_hits.iter().take(20) {
                        s.push_str(&format!("\nexcluded residue {r} at n={n}"));
                    }
                    for (n, a, b) in rep.conflicts.iter().take(20) {
                        s.push_str(&format!("\nn={n} claimed by {a} and {b}"));
                    }
                    if !rep.uncovered.is_empty() {
                        s.push_str(&format!("\n{} n unclassified, first {:?}", rep.uncovered.len(), rep.uncovered[0]));
                    }
                    s
                };
                env.emit(&s);
                return Ok(if ok { EXIT_OK } else { EXIT_MISMATCH });
            }
            let name = source.builtin.as_ref().ok_or_else(|| Error::BadInput("verify needs --builtin".into()))?;
            let oracle = builtin(name, BuiltinParams { p: env.g.p, h: env.g.step_h, k: source.k })?.oracle();
            let m = modulus.unwrap_or(sol.ctx().modulus());
            let chk = verify_against_oracle(&sol, &oracle, n_max, m)?;
            let s = match (fmt, &chk.first_mismatch) {
                (Format::Json, _) => to_json(&chk),
                (_, None) => "OK".to_string(),
                (_, Some(mm)) => format!("MISMATCH at n={}: got {} expected {} (mod {m})", mm.n, mm.got, mm.expected),
            };
            env.emit(&s);
            if !chk.is_ok() {
                return Ok(EXIT_MISMATCH);
            }
        }
        Command::Minpoly { action } => return minpoly_cmd(env, action),
        Command::AppendixCheck { k, order } => {
            if k < 3 || k % 2 == 0 {
                return Err(Error::BadInput("k must be odd and at least 3".into()));
            }
            let rep = verify_appendix(k, order);
            let s = if fmt == Format::Json {
                to_json(&rep)
            } else {
                format!(
                    "k={k} order={order}: fuss {}, lemma {}, equation {}",
                    ok_word(rep.fuss_ok),
                    ok_word(rep.lemma_ok),
                    ok_word(rep.equation_ok)
                )
            };
            env.emit(&s);
            if !rep.passed() {
                return Ok(EXIT_MISMATCH);
            }
        }
    }
    Ok(EXIT_OK)
}

fn ok_word(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn text_table(t: &ResidueTable, residue: Option<u64>) -> String {
    match residue {
        Some(r) => {
            let v: Vec<String> = t.positions(r).iter().map(|n| n.to_string()).collect();
            v.join(" ")
        }
        None => {
            let v: Vec<String> = t.residues.iter().enumerate().map(|(n, r)| format!("{n}: {r}")).collect();
            v.join("\n")
        }
    }
}

fn minpoly_cmd(env: &mut Env, action: MinpolyCmd) -> Result<i32> {
    let p = env.p()?;
    let fmt = env.g.format;
    match action {
        MinpolyCmd::Verify { poly, poly_file } => {
            let gamma = env.gamma(p)?;
            let tree = match (poly, poly_file) {
                (Some(s), _) => Tree::parse(&s)?,
                (None, Some(f)) => Tree::Poly(BivarPoly::from_json(&read(&f)?)?),
                (None, None) => return Err(Error::BadInput("give --poly or --poly-file".into())),
            };
            let rep = minpoly::vanishing_report(&tree, p, gamma)?;
            let s = if fmt == Format::Json { to_json(&rep) } else { rep.to_string() };
            env.emit(&s);
            Ok(if rep.vanishes { EXIT_OK } else { EXIT_MISMATCH })
        }
        MinpolyCmd::Search { delta, literal } => {
            if delta < 2 {
                return Err(Error::BadInput("--delta starts at 2".into()));
            }
            let mut family = vec![Tree::Poly(BivarPoly::artin_schreier(p))];
            while family.len() < delta as usize {
                let next = if literal && family.len() + 1 == delta as usize {
                    minpoly::search_min_poly_literal(family.last().unwrap(), p, family.len() as u32 + 1)?
                } else {
                    minpoly::search_min_poly(&family, p)?
                };
                match next {
                    Some(a) => family.push(a),
                    None => {
                        env.emit(&format!("not found at δ={}", family.len() + 1));
                        return Ok(EXIT_MISMATCH);
                    }
                }
            }
            let a = family.last().unwrap();
            let gamma = minpoly::level_exponent(p, delta);
            let s = if fmt == Format::Json {
                let poly: serde_json::Value = serde_json::from_str(&a.expand().to_json()).expect("own JSON");
                to_json(&json!({"p": p, "delta": delta, "gamma": gamma, "polynomial": a.to_string(), "expanded": poly}))
            } else {
                a.to_string()
            };
            env.emit(&s);
            Ok(EXIT_OK)
        }
        MinpolyCmd::Bound => {
            let gamma = env.gamma(p)?;
            if gamma == 0 {
                return Err(Error::BadInput("gamma must be positive".into()));
            }
            let d = minpoly::degree_lower_bound(p, gamma);
            let s = if fmt == Format::Json { to_json(&json!({"p": p, "gamma": gamma, "degree": d})) } else { d.to_string() };
            env.emit(&s);
            Ok(EXIT_OK)
        }
    }
}

/// Parse `args` (program name first), run, write stdout/stderr, return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut env = Env { g: cli.global.clone(), out: Vec::new() };
    let code = match dispatch(&mut env, cli.command) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let written = match &env.g.out {
        Some(path) => fs::write(path, &env.out).map_err(|e| e.to_string()),
        None => stdout.write_all(&env.out).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_BAD_INPUT;
    }
    code
}
