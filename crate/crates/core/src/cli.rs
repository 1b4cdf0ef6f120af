//! Command-line front end. Every command produces a [`ReportDocument`];
//! the exit code is 0 when all its checks pass, 1 when a check fails and 2
//! for unreadable or malformed input.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

use crate::category::{SkeletalCategory, DEFAULT_TOLERANCE};
use crate::diagram::Engine;
use crate::error::{FrobError, Result};
use crate::frobenius::{cardy_algebra, check_algebra, check_jandl, simple_current_candidate, FrobeniusAlgebra, JandlStructure};
use crate::io::{load_algebra, load_category, tolerance_from_env, write_atomic, AlgebraFile, CategoryFile};
use crate::library;
use crate::observables::{
    annulus_coefficients, check_modular_invariance, check_nimrep, defect_fusion, defect_partition_function,
    torus_partition_function, CertificateReport, PartitionTable,
};
use crate::rep::{bimodule_hom_dim, check_bimodule, check_module, list_simple_modules, regular_bimodule, Bimodule};
use crate::report::ReportDocument;

/// Thresholds on projector health, independent of the category tolerance.
const IDEMPOTENCY_LIMIT: f64 = 1e-8;
const INTEGRALITY_LIMIT: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "frobcat", version, about = "Skeletal modular categories, Frobenius algebras and their partition functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Machine,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Also write the machine-readable report to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Verification tolerance; defaults to the file's value, then
    /// FROBCAT_TOLERANCE, then 1e-9.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct AlgebraArgs {
    /// Algebra file.
    pub algebra: PathBuf,
    /// Category file or `bundled:<name>`, overriding the one named in the
    /// algebra file.
    #[arg(long)]
    pub category: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coherence, modularity and Verlinde checks of a category.
    CheckCategory {
        /// Category file or `bundled:<name>`.
        category: String,
        #[command(flatten)]
        common: Common,
    },
    /// Frobenius axioms (and the Jandl axioms when present) of an algebra.
    CheckAlgebra {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Torus partition function with its modular certificates.
    Torus {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Annulus coefficients over the simple modules, with the NIMrep check.
    Annulus {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Simple bimodules, their fusion table and a defect partition function.
    Defects {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Left defect: `A` or an index into the simple bimodule list.
        #[arg(long, default_value = "A")]
        left: String,
        /// Right defect: `A` or an index into the simple bimodule list.
        #[arg(long, default_value = "A")]
        right: String,
        #[command(flatten)]
        common: Common,
    },
    /// Simple modules (boundary conditions) with their underlying objects.
    Modules {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Writes the bundled categories and algebras as text files.
    Export {
        /// Target directory.
        dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::CheckCategory { common, .. }
            | Command::CheckAlgebra { common, .. }
            | Command::Torus { common, .. }
            | Command::Annulus { common, .. }
            | Command::Defects { common, .. }
            | Command::Modules { common, .. }
            | Command::Export { common, .. } => common,
        }
    }
}

pub fn exit_code(err: &FrobError) -> i32 {
    match err {
        FrobError::Io(_) | FrobError::Parse(_) => 2,
        _ => 1,
    }
}

/// Parses arguments, runs the command and prints the report. Returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let common = cli.command.common().clone();
    match execute(&cli.command) {
        Ok(doc) => {
            if let Some(path) = &common.output {
                let written = doc.to_json().and_then(|j| write_atomic(path, &j));
                if let Err(e) = written {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
            let text = match common.format {
                Format::Table => doc.render(),
                Format::Machine => match doc.to_json() {
                    Ok(j) => j + "\n",
                    Err(e) => {
                        eprintln!("error: {e}");
                        return 2;
                    }
                },
            };
            // a closed pipe is not an error of the computation
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if doc.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn tolerance(common: &Common) -> Result<f64> {
    match common.tolerance {
        Some(t) if t.is_finite() && t > 0.0 => Ok(t),
        Some(t) => Err(FrobError::Parse(format!("tolerance {t} is not a positive number"))),
        None => tolerance_from_env(DEFAULT_TOLERANCE),
    }
}

fn open_category(spec: &str, common: &Common) -> Result<SkeletalCategory> {
    let mut cat = load_category(spec, tolerance(common)?)?;
    if let Some(t) = common.tolerance {
        cat.tolerance = t;
    }
    Ok(cat)
}

fn open_algebra(args: &AlgebraArgs, common: &Common) -> Result<(SkeletalCategory, AlgebraFile)> {
    let (mut cat, file) = load_algebra(&args.algebra, args.category.as_deref(), tolerance(common)?)?;
    if let Some(t) = common.tolerance {
        cat.tolerance = t;
    }
    Ok((cat, file))
}

/// Runs a parsed command.
pub fn execute(cmd: &Command) -> Result<ReportDocument> {
    match cmd {
        Command::CheckCategory { category, common } => cmd_check_category(&open_category(category, common)?),
        Command::CheckAlgebra { alg, common } => {
            let (cat, file) = open_algebra(alg, common)?;
            cmd_check_algebra(&cat, &file)
        }
        Command::Torus { alg, common } => {
            let (cat, file) = open_algebra(alg, common)?;
            cmd_torus(&cat, &file)
        }
        Command::Annulus { alg, common } => {
            let (cat, file) = open_algebra(alg, common)?;
            cmd_annulus(&cat, &file)
        }
        Command::Defects { alg, left, right, common } => {
            let (cat, file) = open_algebra(alg, common)?;
            cmd_defects(&cat, &file, left, right)
        }
        Command::Modules { alg, common } => {
            let (cat, file) = open_algebra(alg, common)?;
            cmd_modules(&cat, &file)
        }
        Command::Export { dir, .. } => cmd_export(dir),
    }
}

fn names(cat: &SkeletalCategory) -> Vec<String> {
    cat.ring().names().to_vec()
}

fn indexed(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

/// `2·σ ⊕ ψ` style description of a multiplicity vector.
fn describe(cat: &SkeletalCategory, mult: &[usize]) -> String {
    let parts: Vec<String> = mult
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(i, &n)| if n == 1 { cat.ring().name(i).to_string() } else { format!("{n}·{}", cat.ring().name(i)) })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ⊕ ")
    }
}

pub fn cmd_check_category(cat: &SkeletalCategory) -> Result<ReportDocument> {
    let tol = cat.tolerance;
    let mut doc = ReportDocument::new("check-category", &cat.name, None);
    let coh = cat.verify();
    doc.check("fusion_ring", coh.ring.violations.len() as f64, 0.0, coh.ring.is_valid(), coh.ring.violations.clone());
    let pent = doc.residual("pentagon", coh.pentagon, tol);
    if !pent.passed {
        pent.details.extend(coh.pentagon_worst.clone());
    }
    let hex = doc.residual("hexagon", coh.hexagon, tol);
    if !hex.passed {
        hex.details.extend(coh.hexagon_worst.clone());
    }
    doc.residual("unit_triangle", coh.unit, tol);
    doc.residual("ribbon", coh.ribbon, tol);
    doc.residual("quantum_dimensions", coh.dims, tol);
    doc.residual("sphericality", coh.sphericality, tol);
    match cat.s_matrix() {
        Ok(s) => {
            doc.check("s_nondegenerate", 0.0, 0.0, true, Vec::new());
            let m = cat.modular_check(&s);
            doc.residual("st_cubed", m.st_cubed, tol.max(1e-8));
            doc.residual("s_squared", m.s_squared, tol.max(1e-8));
            doc.residual("perron_frobenius", m.perron_frobenius, tol.max(1e-8));
            let v = cat.verlinde_check(&s);
            doc.check("verlinde", v.violations.len() as f64, 0.0, v.is_valid(), v.violations);
        }
        Err(e) => doc.check("s_nondegenerate", 1.0, 0.0, false, vec![e.to_string()]),
    }
    Ok(doc)
}

fn push_axioms(doc: &mut ReportDocument, rep: &crate::frobenius::AxiomReport, tol: f64, prefix: &str) {
    for (name, r) in &rep.residuals {
        doc.residual(&format!("{prefix}{name}"), *r, tol);
    }
}

pub fn cmd_check_algebra(cat: &SkeletalCategory, file: &AlgebraFile) -> Result<ReportDocument> {
    let eng = Engine::new(cat);
    let (alg, jandl) = file.build(&eng)?;
    let tol = cat.tolerance;
    let mut doc = ReportDocument::new("check-algebra", &cat.name, Some(&alg.name));
    let rep = check_algebra(&eng, &alg)?;
    push_axioms(&mut doc, &rep, tol, "");
    for (label, beta) in [("beta_a", rep.beta_a), ("beta_1", rep.beta_1)] {
        if let Some(b) = beta {
            doc.check(label, b.norm(), 0.0, b.norm() > tol, vec![format!("{label} = {:.12} {:+.12}i", b.re, b.im)]);
        }
    }
    if let Some(j) = &jandl {
        push_axioms(&mut doc, &check_jandl(&eng, &alg, j)?, tol, "jandl_");
    }
    doc.note(format!("A = {}", describe(cat, alg.obj().multiplicities())));
    Ok(doc)
}

fn push_certificates(doc: &mut ReportDocument, rep: &CertificateReport) {
    for c in &rep.certificates {
        doc.check(&c.name, c.value, c.threshold, c.passed, c.violations.clone());
    }
}

fn push_projector_health(doc: &mut ReportDocument, t: &std::collections::BTreeMap<String, f64>, prefix: &str) {
    if let Some(&v) = t.get("projector_idempotency") {
        doc.residual(&format!("{prefix}projector_idempotency"), v, IDEMPOTENCY_LIMIT);
    }
    if let Some(&v) = t.get("trace_integrality") {
        doc.residual(&format!("{prefix}trace_integrality"), v, INTEGRALITY_LIMIT);
    }
}

fn verified(eng: &Engine, alg: &FrobeniusAlgebra, doc: &mut ReportDocument) -> Result<bool> {
    let tol = eng.category().tolerance;
    let rep = check_algebra(eng, alg)?;
    let ok = rep.passes(tol);
    let worst = rep.worst().map(|(n, r)| format!("worst axiom {n} = {r:.3e}")).into_iter().collect();
    doc.check("algebra_axioms", rep.worst().map_or(0.0, |w| w.1), tol, ok, worst);
    Ok(ok)
}

fn push_partition(doc: &mut ReportDocument, cat: &SkeletalCategory, t: &PartitionTable, name: &str, haploid: bool) -> Result<()> {
    doc.table(name, names(cat), names(cat), t.z.clone());
    push_projector_health(doc, &t.residuals, "");
    push_certificates(doc, &check_modular_invariance(cat, &t.z, haploid)?);
    Ok(())
}

/// Defect tables need not commute with S; their modular data is reported
/// without a verdict.
fn push_defect_partition(doc: &mut ReportDocument, cat: &SkeletalCategory, t: &PartitionTable, name: &str) -> Result<()> {
    doc.table(name, names(cat), names(cat), t.z.clone());
    push_projector_health(doc, &t.residuals, "");
    for c in check_modular_invariance(cat, &t.z, false)?.certificates {
        doc.note(format!("{name}: {} = {:.3e} (informational)", c.name, c.value));
        for v in c.violations {
            doc.note(format!("{name}:   {v}"));
        }
    }
    Ok(())
}

pub fn cmd_torus(cat: &SkeletalCategory, file: &AlgebraFile) -> Result<ReportDocument> {
    let eng = Engine::new(cat);
    let (alg, _) = file.build(&eng)?;
    let mut doc = ReportDocument::new("torus", &cat.name, Some(&alg.name));
    if !verified(&eng, &alg, &mut doc)? {
        return Ok(doc);
    }
    let z = torus_partition_function(&eng, &alg)?;
    push_partition(&mut doc, cat, &z, "Z", alg.obj().is_haploid())?;
    Ok(doc)
}

pub fn cmd_modules(cat: &SkeletalCategory, file: &AlgebraFile) -> Result<ReportDocument> {
    let eng = Engine::new(cat);
    let (alg, _) = file.build(&eng)?;
    let mut doc = ReportDocument::new("modules", &cat.name, Some(&alg.name));
    if !verified(&eng, &alg, &mut doc)? {
        return Ok(doc);
    }
    let simples = list_simple_modules(&eng, &alg)?;
    let mut worst = 0.0f64;
    for m in &simples {
        if let Some((_, r)) = check_module(&eng, &alg, m)?.worst() {
            worst = worst.max(r);
        }
    }
    doc.residual("module_axioms", worst, cat.tolerance.max(1e-8));
    let mult: Vec<Vec<usize>> = simples.iter().map(|m| m.multiplicities(&eng)).collect();
    for (k, m) in mult.iter().enumerate() {
        doc.note(format!("M{k} = {}", describe(cat, m)));
    }
    doc.table("simple modules (underlying multiplicities)", indexed("M", simples.len()), names(cat), mult);
    Ok(doc)
}

pub fn cmd_annulus(cat: &SkeletalCategory, file: &AlgebraFile) -> Result<ReportDocument> {
    let eng = Engine::new(cat);
    let (alg, _) = file.build(&eng)?;
    let mut doc = ReportDocument::new("annulus", &cat.name, Some(&alg.name));
    if !verified(&eng, &alg, &mut doc)? {
        return Ok(doc);
    }
    let ann = annulus_coefficients(&eng, &alg)?;
    push_projector_health(&mut doc, &ann.residuals, "");
    push_certificates(&mut doc, &check_nimrep(cat.ring(), &ann));
    let labels = indexed("M", ann.modules.len());
    for (k, m) in ann.modules.iter().enumerate() {
        doc.note(format!("M{k} = {}", describe(cat, m)));
    }
    for (i, a) in ann.a.iter().enumerate() {
        doc.table(&format!("A_{}", cat.ring().name(i)), labels.clone(), labels.clone(), a.clone());
    }
    Ok(doc)
}

fn pick_defect<'b>(spec: &str, regular: &'b Bimodule, simples: &'b [Bimodule]) -> Result<(String, &'b Bimodule)> {
    if spec == "A" {
        return Ok(("A".into(), regular));
    }
    let k: usize = spec.parse().map_err(|_| FrobError::Parse(format!("defect {spec:?} is neither `A` nor an index")))?;
    let b = simples.get(k).ok_or(FrobError::IndexOutOfRange { index: k, len: simples.len() })?;
    Ok((format!("X{k}"), b))
}

pub fn cmd_defects(cat: &SkeletalCategory, file: &AlgebraFile, left: &str, right: &str) -> Result<ReportDocument> {
    let eng = Engine::new(cat);
    let (alg, _) = file.build(&eng)?;
    let mut doc = ReportDocument::new("defects", &cat.name, Some(&alg.name));
    if !verified(&eng, &alg, &mut doc)? {
        return Ok(doc);
    }
    let (fusion, simples) = defect_fusion(&eng, &alg)?;
    let mut worst = 0.0f64;
    for b in &simples {
        if let Some((_, r)) = check_bimodule(&eng, &alg, &alg, b)?.worst() {
            worst = worst.max(r);
        }
    }
    doc.residual("bimodule_axioms", worst, cat.tolerance.max(1e-8));
    push_projector_health(&mut doc, &fusion.residuals, "fusion_");
    let reg = regular_bimodule(&alg);
    let labels = indexed("X", simples.len());
    for (k, m) in fusion.bimodules.iter().enumerate() {
        let unit = if bimodule_hom_dim(&eng, &alg, &alg, &reg, &simples[k])? > 0 { "  (contains A)" } else { "" };
        doc.note(format!("X{k} = {}{unit}", describe(cat, m)));
    }
    for (a, t) in fusion.table.iter().enumerate() {
        doc.table(&format!("X{a} ⊗_A X_b -> X_c (rows b, columns c)"), labels.clone(), labels.clone(), t.clone());
    }
    let (ln, lb) = pick_defect(left, &reg, &simples)?;
    let (rn, rb) = pick_defect(right, &reg, &simples)?;
    let z = defect_partition_function(&eng, &alg, (&ln, lb), (&rn, rb))?;
    push_defect_partition(&mut doc, cat, &z, &format!("Z[{ln}|{rn}]"))?;
    doc.note("the twist condition on defect tables depends on conventions for the modular action");
    Ok(doc)
}

/// An exported algebra: file name and contents.
struct Export {
    file: String,
    alg: FrobeniusAlgebra,
    jandl: Option<JandlStructure>,
    note: String,
}

fn with_identity_jandl(eng: &Engine, alg: FrobeniusAlgebra, note: &str, file: String) -> Result<Export> {
    let j = JandlStructure { sigma: eng.identity(&alg.object()) };
    let jandl = check_jandl(eng, &alg, &j)?.passes(1e-9).then_some(j);
    Ok(Export { file, alg, jandl, note: note.into() })
}

fn bundled_algebras(eng: &Engine, cat: &str) -> Result<Vec<Export>> {
    let one = |_: usize, _: usize| C64::new(1.0, 0.0);
    let mut out = vec![with_identity_jandl(eng, cardy_algebra(eng), "", format!("{cat}_cardy.toml"))?];
    let extra: &[(&str, &[usize], &str)] = match cat {
        "toric_code" => &[("toric_code_1e.toml", &[0, 1], "A = 1 ⊕ e"), ("toric_code_1m.toml", &[0, 2], "A = 1 ⊕ m")],
        "su2_4" => &[("su2_4_d.toml", &[0, 4], "A = U_0 ⊕ U_4, the D-type invariant")],
        "z3" => &[("z3_full.toml", &[0, 1, 2], "A = 1 ⊕ a ⊕ a², Morita equivalent to the unit")],
        "ising" => &[("ising_1psi.toml", &[0, 2], "A = 1 ⊕ ψ ≅ σ ⊗ σ^∨, Morita equivalent to the unit")],
        "semion" => &[("semion_candidate.toml", &[0, 1], "A = 1 ⊕ s; not associative for any normalization")],
        _ => &[],
    };
    for &(file, h, note) in extra {
        let alg = simple_current_candidate(eng, h, one)?;
        out.push(with_identity_jandl(eng, alg, note, file.into())?);
    }
    Ok(out)
}

pub fn cmd_export(dir: &Path) -> Result<ReportDocument> {
    std::fs::create_dir_all(dir)?;
    let mut doc = ReportDocument::new("export", &dir.to_string_lossy(), None);
    for name in library::BUNDLED {
        let cat = library::by_name(name).expect("bundled");
        let coh = cat.verify();
        let ok = coh.passes(cat.tolerance);
        doc.check(&format!("{name}.toml"), coh.pentagon.max(coh.hexagon), cat.tolerance, ok, Vec::new());
        if !ok {
            continue;
        }
        write_atomic(&dir.join(format!("{name}.toml")), &CategoryFile::from_category(&cat).to_toml()?)?;
        let eng = Engine::new(&cat);
        for mut e in bundled_algebras(&eng, name)? {
            e.alg.name = e.file.trim_end_matches(".toml").to_string();
            let mut file = AlgebraFile::from_algebra(&e.alg, &format!("{name}.toml"), e.jandl.as_ref());
            file.note = e.note;
            let passes = check_algebra(&eng, &e.alg)?.passes(cat.tolerance);
            if !passes {
                doc.note(format!("{} fails the algebra axioms and is kept as a negative example", e.file));
            }
            write_atomic(&dir.join(&e.file), &file.to_toml()?)?;
        }
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn common() -> Common {
        Common { format: Format::Machine, output: None, tolerance: None }
    }

    #[test]
    fn bundled_categories_check_out() {
        for name in ["fibonacci", "ising"] {
            let cat = open_category(&format!("bundled:{name}"), &common()).unwrap();
            let doc = cmd_check_category(&cat).unwrap();
            assert!(doc.passed, "{}", doc.render());
        }
    }

    #[test]
    fn corrupted_f_names_the_pentagon_tuple() {
        let cat = library::fibonacci().unwrap();
        let mut e = cat.f_entries()[3];
        e.value += 0.1;
        let bad = cat.with_f_entry(e).unwrap();
        let doc = cmd_check_category(&bad).unwrap();
        assert!(!doc.passed);
        let pent = doc.residuals.iter().find(|r| r.name == "pentagon").unwrap();
        assert!(!pent.passed && !pent.details.is_empty());
    }

    #[test]
    fn argument_errors_exit_with_two() {
        assert_eq!(main_with_args(["frobcat", "frobnicate"]), 2);
        assert_eq!(main_with_args(["frobcat", "check-category", "/nonexistent/file.toml"]), 2);
        assert_eq!(main_with_args(["frobcat", "check-category", "bundled:fibonacci", "--tolerance=-1"]), 2);
    }
}
