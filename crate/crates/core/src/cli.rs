//! Command-line front end: state files, key-value reports and subcommands.
//!
//! A state file holds `N <n>` followed by one `k <re> <im>` line per Dicke
//! index `k = 0..=N`; lines starting with `#` are comments. Reports are
//! `[section]` headers followed by `key = value` lines, lists as indexed keys
//! (`y.1`, `term.0.coeff`) and complex numbers as `re im`.

use crate::canonical::{
    equivalent, il_canonical, lu_canonical, EquivalenceMode, ILCanonicalForm, LUCanonicalForm,
};
use crate::decomp::{decompose, CoherentDecomposition, DecompositionDiagnostics};
use crate::error::{Error, Result};
use crate::majorana::{self, genericity, majorana_polynomial, majorana_roots, mobius_on_roots};
use crate::measures::{lu_invariants, schmidt_measure, three_tangle};
use crate::random::{haar_su2, random_special, random_state, rng_stream};
use crate::sphere::Extended;
use crate::symstate::{apply_collective, fidelity, CollectiveMap, SymmetricState};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SEED_ENV: &str = "SYMDECOMP_SEED";

/// Deviation of the input norm from 1 above which a warning is issued.
const NORM_WARN_TOL: f64 = 1e-6;

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_complex(z: Complex64) -> String {
    format!("{} {}", fmt_real(z.re), fmt_real(z.im))
}

fn fmt_extended(z: &Extended) -> String {
    match z {
        Extended::Finite(c) => fmt_complex(*c),
        Extended::Infinity => "inf".to_string(),
    }
}

/// Ordered key-value report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn section(&mut self, name: &str) -> &mut Self {
        if !self.text.is_empty() {
            self.text.push('\n');
        }
        let _ = writeln!(self.text, "[{name}]");
        self
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {value}");
        self
    }

    pub fn real(&mut self, key: &str, x: f64) -> &mut Self {
        self.kv(key, fmt_real(x))
    }

    pub fn complex(&mut self, key: &str, z: Complex64) -> &mut Self {
        self.kv(key, fmt_complex(z))
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// A parsed state file. `warning` is set when the coefficients were
/// rescaled to unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedState {
    pub state: SymmetricState,
    pub warning: Option<String>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("not a real number: {tok:?}")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite value {tok:?}")));
    }
    Ok(x)
}

pub fn parse_state_file(text: &str) -> Result<ParsedState> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(0, "empty state file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "N" {
        return Err(parse_err(hline, "expected `N <integer>`"));
    }
    let n: usize = toks[1]
        .parse()
        .map_err(|_| parse_err(hline, format!("not a qubit count: {:?}", toks[1])))?;
    if n < 2 {
        return Err(parse_err(hline, format!("N must be at least 2, found {n}")));
    }

    let mut coeffs: Vec<Option<Complex64>> = vec![None; n + 1];
    let mut last_line = hline;
    for (ln, l) in lines {
        last_line = ln;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(ln, "expected `k <re> <im>`"));
        }
        let k: usize = toks[0]
            .parse()
            .map_err(|_| parse_err(ln, format!("not an index: {:?}", toks[0])))?;
        if k > n {
            return Err(parse_err(ln, format!("index {k} out of range 0..={n}")));
        }
        if coeffs[k].is_some() {
            return Err(parse_err(ln, format!("duplicate index {k}")));
        }
        coeffs[k] = Some(Complex64::new(parse_real(toks[1], ln)?, parse_real(toks[2], ln)?));
    }
    if let Some(k) = coeffs.iter().position(Option::is_none) {
        return Err(parse_err(last_line, format!("missing index {k}")));
    }
    let state = SymmetricState::new(coeffs.into_iter().map(Option::unwrap).collect())?;
    let norm = state.norm();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    if (norm - 1.0).abs() > NORM_WARN_TOL {
        let (unit, _) = state.rescaled()?;
        return Ok(ParsedState {
            state: unit,
            warning: Some(format!("input norm {} rescaled to 1", fmt_real(norm))),
        });
    }
    Ok(ParsedState {
        state,
        warning: None,
    })
}

pub fn write_state_file(s: &SymmetricState) -> String {
    let mut out = format!("N {}\n", s.n_qubits());
    for (k, c) in s.dicke().iter().enumerate() {
        let _ = writeln!(out, "{k} {}", fmt_complex(*c));
    }
    out
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => 2,
        Error::NonGeneric { .. } => 3,
        Error::SolverFailure { .. } => 4,
        Error::TieBreakUnstable { .. } => 5,
        _ => 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Lu,
    Il,
}

impl From<Mode> for EquivalenceMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Lu => EquivalenceMode::LU,
            Mode::Il => EquivalenceMode::IL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "symdecomp", version, about = "Spin coherent state decomposition of symmetric multiqubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose a state into spin coherent states.
    Decompose {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Majorana roots and degeneracy.
    Roots { file: PathBuf },
    /// LU or IL canonical form.
    Canonical {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Test two states for LU or IL equivalence.
    Compare {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Three-qubit tangle.
    Tangle { file: PathBuf },
    /// Schmidt rank and measure.
    Schmidt { file: PathBuf },
    /// Write node vectors scaled by the coefficient ratios as CSV.
    BlochExport {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print random normalized states as state files.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Run the property suite and report pass or fail per property.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command, err) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", e.name());
            exit_code(&e)
        }
    }
}

fn load(path: &Path, err: &mut dyn Write) -> Result<SymmetricState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let parsed = parse_state_file(&text)?;
    if let Some(w) = parsed.warning {
        let _ = writeln!(err, "warning: {}: {w}", path.display());
    }
    Ok(parsed.state)
}

fn env_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{SEED_ENV} is not an unsigned integer: {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn execute(cmd: &Command, err: &mut dyn Write) -> Result<(String, i32)> {
    let mut r = Report::new();
    match cmd {
        Command::Decompose { file, tol } => {
            let s = load(file, err)?;
            let (d, diag) = decompose(&s, *tol)?;
            report_state(&mut r, &s);
            report_decomposition(&mut r, &d);
            report_diagnostics(&mut r, &diag);
        }
        Command::Roots { file } => {
            let s = load(file, err)?;
            let roots = majorana_roots(&majorana_polynomial(&s), majorana::DEFAULT_CLUSTER_TOL)?;
            let g = genericity(&s, majorana::DEFAULT_CLUSTER_TOL)?;
            report_state(&mut r, &s);
            r.section("roots")
                .kv("distinct", roots.roots().len())
                .kv("gamma", g.gamma)
                .kv("generic", g.generic);
            for (i, (z, mult)) in roots.roots().iter().enumerate() {
                let (theta, phi) = z.angles();
                r.kv(&format!("root.{i}.value"), fmt_extended(z))
                    .kv(&format!("root.{i}.multiplicity"), mult)
                    .real(&format!("root.{i}.theta"), theta)
                    .real(&format!("root.{i}.phi"), phi);
            }
        }
        Command::Canonical { file, mode } => {
            let s = load(file, err)?;
            report_state(&mut r, &s);
            match mode {
                Mode::Lu => {
                    let (form, g) = lu_canonical(&s)?;
                    report_lu(&mut r, "canonical", &form);
                    report_map(&mut r, &g);
                }
                Mode::Il => {
                    let (form, g) = il_canonical(&s)?;
                    report_il(&mut r, "canonical", &form);
                    report_map(&mut r, &g);
                }
            }
        }
        Command::Compare {
            file1,
            file2,
            mode,
            tol,
        } => {
            let s1 = load(file1, err)?;
            let s2 = load(file2, err)?;
            let eq = equivalent(&s1, &s2, (*mode).into(), *tol)?;
            r.section("compare")
                .kv("mode", if *mode == Mode::Lu { "lu" } else { "il" })
                .real("tol", *tol)
                .kv("equivalent", eq);
            for (name, s) in [("form1", &s1), ("form2", &s2)] {
                match mode {
                    Mode::Lu => match lu_canonical(s) {
                        Ok((f, _)) => report_lu(&mut r, name, &f),
                        Err(e) => report_absent(&mut r, name, &e),
                    },
                    Mode::Il => match il_canonical(s) {
                        Ok((f, _)) => report_il(&mut r, name, &f),
                        Err(e) => report_absent(&mut r, name, &e),
                    },
                }
            }
        }
        Command::Tangle { file } => {
            let s = load(file, err)?;
            let t = three_tangle(&s)?;
            let opt = |x: Option<f64>| x.map(fmt_real).unwrap_or_else(|| "none".into());
            r.section("tangle")
                .kv("tau_decomp", opt(t.tau_decomp))
                .kv("tau_canonical", opt(t.tau_canonical))
                .kv("tau_pair", opt(t.tau_pair))
                .real("tau_oracle", t.tau_oracle);
            if let Some(e) = &t.formula_error {
                r.kv("formula_error", e.name());
            }
        }
        Command::Schmidt { file } => {
            let s = load(file, err)?;
            let (d, _) = decompose(&s, 1e-9)?;
            let (rank, p) = schmidt_measure(&d, 1e-10);
            r.section("schmidt").kv("r", rank).real("P", p);
        }
        Command::BlochExport { file, out } => {
            let s = load(file, err)?;
            let (d, _) = decompose(&s, 1e-9)?;
            let csv = bloch_csv(&d);
            std::fs::write(out, &csv)
                .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", out.display())))?;
            r.section("bloch")
                .kv("rows", d.len())
                .kv("out", out.display());
        }
        Command::Random { n, seed, count } => {
            if *n < 2 {
                return Err(Error::InvalidInput(format!("--n must be at least 2, found {n}")));
            }
            let seed = match seed {
                Some(s) => *s,
                None => env_seed()?,
            };
            let mut text = String::new();
            for i in 0..*count {
                if *count > 1 {
                    let _ = writeln!(text, "# state {i} seed {seed}");
                }
                let s = random_state(*n, &mut rng_stream(seed, i as u64));
                text.push_str(&write_state_file(&s));
            }
            return Ok((text, 0));
        }
        Command::Verify { seed, n_max } => {
            if *n_max < 3 {
                return Err(Error::InvalidInput(format!("--n-max must be at least 3, found {n_max}")));
            }
            let seed = match seed {
                Some(s) => *s,
                None => env_seed()?,
            };
            let results = verify_suite(seed, *n_max);
            r.section("verify").kv("seed", seed).kv("n_max", n_max);
            let mut all = true;
            for p in &results {
                all &= p.pass;
                r.section(p.name)
                    .kv("result", if p.pass { "PASS" } else { "FAIL" })
                    .kv("checked", p.checked)
                    .kv("failed", p.failed)
                    .kv("rejected", p.rejected)
                    .real("worst", p.worst);
            }
            return Ok((r.as_str().to_string(), if all { 0 } else { 1 }));
        }
    }
    Ok((r.as_str().to_string(), 0))
}

fn report_state(r: &mut Report, s: &SymmetricState) {
    r.section("state")
        .kv("n_qubits", s.n_qubits())
        .kv("parity", s.parity().as_str());
}

fn report_decomposition(r: &mut Report, d: &CoherentDecomposition) {
    r.section("decomposition")
        .kv("terms", d.len())
        .kv("paired", d.is_paired())
        .real("A", d.amplitude().norm());
    for (i, t) in d.terms().iter().enumerate() {
        let (theta, phi) = t.node.angles();
        r.complex(&format!("term.{i}.coeff"), t.coeff)
            .real(&format!("term.{i}.theta"), theta)
            .real(&format!("term.{i}.phi"), phi);
    }
    for (i, (y, k)) in d.y().iter().zip(d.k()).enumerate() {
        r.real(&format!("y.{}", i + 1), *y)
            .real(&format!("k.{}", i + 1), k);
    }
    let gram = lu_invariants(d).gram;
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let ov = d.terms()[i].node.overlap(&d.terms()[j].node).norm();
            r.real(&format!("node_overlap.{i}.{j}"), ov)
                .complex(&format!("gram.{i}.{j}"), gram[i][j]);
        }
    }
}

fn report_diagnostics(r: &mut Report, g: &DecompositionDiagnostics) {
    r.section("diagnostics")
        .real("fidelity_deficit", g.reconstruction_fidelity_deficit)
        .real("determinant_residual", g.max_determinant_residual)
        .real("root_residual", g.max_root_residual)
        .real("value_at_zero_residual", g.value_at_zero_residual)
        .real("moment_residual", g.moment_residual)
        .kv("attempts", g.attempts)
        .real("hankel_condition", g.hankel_condition)
        .kv("pairing_candidates", g.pairing_candidates)
        .kv("near_ties", g.near_ties.len());
}

fn report_lu(r: &mut Report, section: &str, f: &LUCanonicalForm) {
    r.section(section)
        .kv("mode", "lu")
        .real("A", f.amplitude())
        .kv("paired", f.is_paired());
    for (i, y) in f.y().iter().enumerate() {
        r.real(&format!("y.{}", i + 1), *y);
    }
    let offset = if f.is_paired() { 2 } else { 1 };
    for (i, l) in f.phases().iter().enumerate() {
        r.real(&format!("l.{}", i + 2), *l);
    }
    for (i, n) in f.nodes().iter().enumerate() {
        let (t, p) = n.angles();
        r.real(&format!("node.{}.theta", i + offset), t)
            .real(&format!("node.{}.phi", i + offset), p);
    }
    if let Some(p) = f.three_qubit() {
        r.real("three_qubit.y", p.y)
            .real("three_qubit.epsilon", p.epsilon)
            .real("three_qubit.phi", p.phi);
    }
    report_parameters(r, &f.parameters());
}

fn report_il(r: &mut Report, section: &str, f: &ILCanonicalForm) {
    r.section(section).kv("mode", "il").real("A", f.amplitude());
    let first = if let (Some(c), Some(lambda)) = (f.c(), f.lambda()) {
        r.kv("c", fmt_extended(&c)).complex("lambda", lambda);
        if let Some(res) = f.relation_residual() {
            r.real("relation_residual", res);
        }
        3
    } else {
        2
    };
    for (i, ((l, x), n)) in f.lambdas().iter().zip(f.xis()).zip(f.nodes()).enumerate() {
        let (t, p) = n.angles();
        let m = i + first;
        r.real(&format!("lambda.{m}"), *l)
            .real(&format!("xi.{m}"), *x)
            .real(&format!("node.{m}.theta"), t)
            .real(&format!("node.{m}.phi"), p);
    }
    r.kv("independent_parameters", f.independent_parameter_count());
    report_parameters(r, &f.parameters());
}

fn report_parameters(r: &mut Report, v: &[f64]) {
    r.kv("parameters", v.len());
    for (i, x) in v.iter().enumerate() {
        r.real(&format!("parameter.{i}"), *x);
    }
}

fn report_absent(r: &mut Report, section: &str, e: &Error) {
    r.section(section).kv("status", e.name()).kv("detail", e);
}

fn report_map(r: &mut Report, g: &CollectiveMap) {
    r.section("map");
    for (i, row) in g.matrix().iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            r.complex(&format!("g.{i}.{j}"), *z);
        }
    }
}

/// CSV rows `label,x,y,z,length`: node `m` as a Bloch vector scaled by `y_m`
/// (`y_0 = 1`).
pub fn bloch_csv(d: &CoherentDecomposition) -> String {
    let mut out = String::from("label,x,y,z,length\n");
    let mut ys = vec![1.0];
    ys.extend(d.y());
    for (i, (t, y)) in d.terms().iter().zip(ys).enumerate() {
        let v = t.node.bloch().map(|c| c * y);
        let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        let _ = writeln!(
            out,
            "node_{i},{},{},{},{}",
            fmt_real(v[0]),
            fmt_real(v[1]),
            fmt_real(v[2]),
            fmt_real(len)
        );
    }
    out
}

/// Outcome of one property of the self-check suite. `rejected` counts inputs
/// the property could not be evaluated on; they are reported, not failed.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub pass: bool,
    pub checked: usize,
    pub failed: usize,
    pub rejected: usize,
    pub worst: f64,
}

#[derive(Default)]
struct Tally {
    checked: usize,
    failed: usize,
    rejected: usize,
    worst: f64,
}

impl Tally {
    fn record(&mut self, err: f64, tol: f64) {
        self.checked += 1;
        if err.is_nan() || err > tol {
            self.failed += 1;
        }
        self.worst = if err.is_nan() { f64::NAN } else { self.worst.max(err) };
    }

    fn finish(self, name: &'static str) -> PropertyResult {
        PropertyResult {
            name,
            pass: self.failed == 0 && self.checked > 0,
            checked: self.checked,
            failed: self.failed,
            rejected: self.rejected,
            worst: self.worst,
        }
    }
}

const VERIFY_STATES: u64 = 10;

/// Round trip, covariance and tangle checks on seeded random inputs for
/// `N = 3..=n_max`.
pub fn verify_suite(seed: u64, n_max: usize) -> Vec<PropertyResult> {
    let mut round = Tally::default();
    let mut lu = Tally::default();
    let mut il = Tally::default();
    let mut mob = Tally::default();
    for n in 3..=n_max {
        for i in 0..VERIFY_STATES {
            let mut r = rng_stream(seed, (n as u64) * 1000 + i);
            let s = random_state(n, &mut r);

            match decompose(&s, 1e-9) {
                Ok((d, _)) => {
                    let (back, _) = crate::decomp::reconstruct(&d);
                    let f = fidelity(&s, &back).unwrap_or(0.0);
                    round.record(1.0 - f, 1e-9);
                }
                Err(_) => round.rejected += 1,
            }

            let u = haar_su2(&mut r);
            let (us, _) = apply_collective(&u, &s, true);
            match lu_covariance_error(&s, &us) {
                Ok(e) => lu.record(e, 1e-7),
                Err(_) => lu.rejected += 1,
            }

            let g = random_special(2.0, &mut r);
            let (gs, _) = apply_collective(&g, &s, true);
            match equivalent(&s, &gs, EquivalenceMode::IL, 1e-6) {
                Ok(eq) => il.record(if eq { 0.0 } else { 1.0 }, 0.5),
                Err(_) => il.rejected += 1,
            }

            let p = majorana_polynomial(&s);
            match (
                majorana_roots(&p, majorana::DEFAULT_CLUSTER_TOL),
                majorana_roots(&majorana_polynomial(&gs), majorana::DEFAULT_CLUSTER_TOL),
            ) {
                (Ok(a), Ok(b)) => mob.record(mobius_on_roots(&g, &a).distance(&b), 1e-8),
                _ => mob.rejected += 1,
            }
        }
    }

    let mut printed = Tally::default();
    let mut pair = Tally::default();
    let mut oracle = Tally::default();
    for i in 0..VERIFY_STATES * 5 {
        let s = random_state(3, &mut rng_stream(seed, 100_000 + i));
        match three_tangle(&s) {
            Ok(t) => match (t.tau_decomp, t.tau_canonical, t.tau_pair) {
                (Some(a), Some(b), Some(c)) => {
                    printed.record((a - b).abs(), 1e-9);
                    pair.record((c - t.tau_oracle).abs(), 1e-9);
                    oracle.record((a - t.tau_oracle).abs().max((b - t.tau_oracle).abs()), 1e-9);
                }
                _ => {
                    printed.rejected += 1;
                    pair.rejected += 1;
                    oracle.rejected += 1;
                }
            },
            Err(_) => {
                printed.rejected += 1;
                pair.rejected += 1;
                oracle.rejected += 1;
            }
        }
    }

    vec![
        round.finish("round_trip"),
        lu.finish("lu_covariance"),
        il.finish("il_invariance"),
        mob.finish("mobius_covariance"),
        printed.finish("tangle_closed_forms_agree"),
        pair.finish("tangle_pair_value_vs_oracle"),
        oracle.finish("tangle_closed_forms_vs_oracle"),
    ]
}

/// Largest deviation of the LU invariants and canonical form between `s` and
/// its rotated copy `us`; infinite when the forms do not match.
fn lu_covariance_error(s: &SymmetricState, us: &SymmetricState) -> Result<f64> {
    let (d1, _) = decompose(s, 1e-9)?;
    let (d2, _) = decompose(us, 1e-9)?;
    let (i1, i2) = (lu_invariants(&d1), lu_invariants(&d2));
    if i1.y.len() != i2.y.len() {
        return Ok(f64::INFINITY);
    }
    let mut e = (i1.amplitude - i2.amplitude).abs();
    for (a, b) in i1.y.iter().zip(&i2.y) {
        e = e.max((a - b).abs());
    }
    for (ra, rb) in i1.gram.iter().zip(&i2.gram) {
        for (a, b) in ra.iter().zip(rb) {
            e = e.max((a.norm() - b.norm()).abs());
        }
    }
    if !equivalent(s, us, EquivalenceMode::LU, 1e-7)? {
        e = f64::INFINITY;
    }
    Ok(e)
}
