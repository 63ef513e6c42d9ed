//! The `c2` command line: checking, interpretation, verification and the
//! degeneracy demos.

pub mod records;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context as _};
use clap::{Parser, Subcommand, ValueEnum};

use c2_core::check::{check_bytes, check_declaration, kind_of};
use c2_core::fincat::file::{load_bases, load_category, BaseAssignment, FileError};
use c2_core::models::{self, degeneracy, lafont, Mode, Model, ModelError, ParallelPair};
use c2_core::parser::{parse, pretty_expr, Declaration, ParseError, Pos, SourceFile};
use c2_core::profunctor::nat_eq;
use c2_core::semantics::SemError;
use c2_core::syntax::{alpha_eq, Name};
use c2_core::typing::{Checker, Context, Judgment};
use c2_core::verify::{verify_expr, verify_reduction};

use records::{components, Record, Status, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    JsonLines,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    Lafont,
    Nondegeneracy,
    RelCollapse,
}

#[derive(Debug, Parser)]
#[command(name = "c2", version, about = "Check and interpret classical sequent calculus proofs")]
pub struct Cli {
    /// Base assignment file mapping base types to finite categories.
    #[arg(long, global = true, env = "C2_BASE")]
    pub base: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = Mode::Prof)]
    pub mode: Mode,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Refuse base categories with more objects than this.
    #[arg(long, global = true)]
    pub max_objects: Option<usize>,
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and type-check source files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the profunctor of each term and the cell of each reduction.
    Interp {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Only this declaration.
        #[arg(long)]
        decl: Option<String>,
    },
    /// Check semantic properties of each declaration, or validate category files.
    Verify {
        files: Vec<PathBuf>,
        #[arg(long)]
        category: Vec<PathBuf>,
    },
    /// Run a demonstration; reductions in the given files join the pair search.
    Demo {
        #[arg(value_enum)]
        which: Demo,
        files: Vec<PathBuf>,
        /// Generated critical pairs to examine as well.
        #[arg(long)]
        pairs: Option<usize>,
    },
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

struct Out<'a> {
    w: &'a mut dyn Write,
    format: Format,
    failures: usize,
    items: usize,
}

impl Out<'_> {
    fn emit(&mut self, r: &Record) -> anyhow::Result<()> {
        match self.format {
            Format::JsonLines => writeln!(self.w, "{}", serde_json::to_string(r)?)?,
            Format::Human => {
                let text = human(r);
                if !text.is_empty() {
                    writeln!(self.w, "{text}")?;
                }
            }
        }
        Ok(())
    }

    fn item(&mut self, failed: bool) {
        self.items += 1;
        self.failures += usize::from(failed);
    }

    fn finish(&mut self, command: &'static str) -> anyhow::Result<u8> {
        self.emit(&Record::Summary { command, items: self.items, failures: self.failures })?;
        Ok(if self.failures == 0 { EXIT_OK } else { EXIT_FAIL })
    }
}

fn context_text(c: &Context) -> String {
    let hyps: Vec<String> = c
        .hyps()
        .iter()
        .map(|h| format!("{}:{}{}", h.name, h.polarity, c2_core::parser::pretty_type(&h.ty)))
        .collect();
    format!("[{}]", hyps.join(", "))
}

fn table_text(t: &Table, indent: &str) -> String {
    let coords: Vec<String> = t.coords.iter().map(|c| format!("{} ({})", c.name, c.variance)).collect();
    let mut s = format!("{indent}coordinates: {}", coords.join(", "));
    for p in &t.points {
        s.push_str(&format!("\n{indent}({}) -> {{{}}}", p.at.join(", "), p.elements.join(", ")));
    }
    s
}

fn human(r: &Record) -> String {
    match r {
        Record::ParseError { file, class, line, column, message } => {
            format!("{file}:{line}:{column}: error[{class}]: {message}")
        }
        Record::Declaration { file, name, kind, line, column, status: Status::Ok, .. } => {
            format!("{file}:{line}:{column}: {kind} {name}: ok")
        }
        Record::Declaration { file, name, kind, line, column, class, message, .. } => format!(
            "{file}:{line}:{column}: {kind} {name}: error[{}]: {}",
            class.unwrap_or("error"),
            message.as_deref().unwrap_or("")
        ),
        Record::Profunctor { name, judgment, table, .. } => format!("{name} : {judgment}\n{}", table_text(table, "  ")),
        Record::Cell { name, judgment, source, target, components, .. } => {
            let mut s = format!("{name} : {judgment}\n  source\n{}\n  target\n{}\n  cell", table_text(source, "    "), table_text(target, "    "));
            for c in components {
                let maps: Vec<String> = c.map.iter().map(|[a, b]| format!("{a} |-> {b}")).collect();
                s.push_str(&format!("\n    ({}) {}", c.at.join(", "), maps.join(", ")));
            }
            s
        }
        Record::Property { file, name, property, passed, detail } => {
            let verdict = if *passed { "pass" } else { "FAIL" };
            match detail {
                Some(d) => format!("{file}: {name}: {property}: {verdict}: {d}"),
                None => format!("{file}: {name}: {property}: {verdict}"),
            }
        }
        Record::Category { file, valid: true, objects, arrows, .. } => {
            format!("{file}: valid category ({objects} objects, {arrows} arrows)")
        }
        Record::Category { file, witness, .. } => {
            format!("{file}: invalid category: {}", witness.as_deref().unwrap_or(""))
        }
        Record::Lafont { source, via_mu, via_mu_tilde, well_typed, distinct_reducts } => format!(
            "source:       {source}\nby beta_mu:   {via_mu}\nby beta_mu~:  {via_mu_tilde}\nboth steps well typed: {well_typed}\nreducts differ: {distinct_reducts}"
        ),
        Record::Nondegeneracy { witness_left, witness_right, parallel, distinct, searched, from_corpus, searched_distinct } => {
            let mut s = format!(
                "left:  {witness_left}\nright: {witness_right}\nsame source and target: {parallel}\ncells differ: {distinct}"
            );
            if *searched > 0 {
                s.push_str(&format!(
                    "\nsearched {searched} pairs ({from_corpus} from files), {searched_distinct} separated"
                ));
            }
            s
        }
        Record::RelCollapse {
            examined,
            parallel,
            distinct,
            prof_distinct,
            and_or_coincide,
            negation_preserves_cardinality,
        } => format!(
            "examined {examined} pairs, {parallel} parallel, {distinct} distinct ({prof_distinct} distinct in prof)\n\
             and/or coincide: {and_or_coincide}\nnegation preserves cardinality: {negation_preserves_cardinality}"
        ),
        Record::Summary { command, items, failures } => format!("{command}: {items} checked, {failures} failed"),
    }
}

fn base_assignment(cli: &Cli, fallback: impl FnOnce() -> BaseAssignment) -> anyhow::Result<BaseAssignment> {
    let bases = match &cli.base {
        Some(p) => load_bases(p).with_context(|| format!("loading base file {}", p.display()))?,
        None => fallback(),
    };
    if let Some(n) = cli.max_objects {
        if bases.max_objects() > n {
            bail!("a base category has {} objects, more than --max-objects {n}", bases.max_objects());
        }
    }
    Ok(bases)
}

fn read(path: &Path) -> anyhow::Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn error_class(e: &ModelError) -> &'static str {
    match e {
        ModelError::Sem(SemError::Type(t)) => t.class(),
        ModelError::Sem(SemError::TooLarge { .. }) => "too-large",
        _ => "semantic",
    }
}

fn declaration_record(file: &str, d: &Declaration, pos: Pos, error: Option<(&'static str, String)>) -> Record {
    let (status, class, message) = match error {
        None => (Status::Ok, None, None),
        Some((c, m)) => (Status::Error, Some(c), Some(m)),
    };
    Record::Declaration {
        file: file.into(),
        name: d.name().to_string(),
        kind: kind_of(d),
        line: pos.line,
        column: pos.column,
        status,
        class,
        message,
    }
}

fn parse_error_record(file: &str, e: &ParseError) -> Record {
    let mut message = e.message.clone();
    if !e.expected.is_empty() {
        message.push_str(&format!(" (expected {})", e.expected.join(" or ")));
    }
    Record::ParseError { file: file.into(), class: e.class(), line: e.line, column: e.column, message }
}

/// Parses `path`, emitting a parse error record on failure.
fn load_source(out: &mut Out, path: &Path) -> anyhow::Result<Option<SourceFile>> {
    let bytes = read(path)?;
    match c2_core::parser::parse_bytes(&bytes) {
        Ok(f) => Ok(Some(f)),
        Err(e) => {
            out.item(true);
            out.emit(&parse_error_record(&path.display().to_string(), &e))?;
            Ok(None)
        }
    }
}

fn check(cli: &Cli, files: &[PathBuf], out: &mut Out) -> anyhow::Result<u8> {
    let checker = if cli.verbose { Checker::tracing() } else { Checker::default() };
    for path in files {
        let name = path.display().to_string();
        let bytes = read(path)?;
        match check_bytes(&checker, &bytes) {
            Err(e) => {
                out.item(true);
                out.emit(&parse_error_record(&name, &e))?;
            }
            Ok(report) => {
                for (d, o) in report.file.declarations.iter().zip(&report.outcomes) {
                    out.item(o.error.is_some());
                    let err = o.error.as_ref().map(|e| (e.class(), e.to_string()));
                    out.emit(&declaration_record(&name, d, o.pos, err))?;
                }
            }
        }
    }
    if cli.verbose {
        for (rule, n) in checker.rule_counts() {
            eprintln!("rule {rule}: {n}");
        }
    }
    out.finish("check")
}

fn interp(cli: &Cli, files: &[PathBuf], only: Option<&str>, out: &mut Out) -> anyhow::Result<u8> {
    let m = Model::new(base_assignment(cli, BaseAssignment::default)?, cli.mode)?;
    for path in files {
        let name = path.display().to_string();
        let Some(file) = load_source(out, path)? else { continue };
        for (d, pos) in file.declarations.iter().zip(&file.positions) {
            if only.is_some_and(|n| n != d.name().as_str()) {
                continue;
            }
            let rec = match d {
                Declaration::TypeDef { .. } => continue,
                Declaration::TermDecl { context, judgment, expr, .. } => {
                    m.interp(context, expr, judgment).map(|p| Record::Profunctor {
                        file: name.clone(),
                        name: d.name().to_string(),
                        judgment: format!("{} |- {judgment}", context_text(context)),
                        table: Table::of(&p),
                    })
                }
                Declaration::ReductionDecl { context, judgment, reduction, .. } => {
                    m.reduction(context, reduction, Some(judgment)).map(|c| Record::Cell {
                        file: name.clone(),
                        name: d.name().to_string(),
                        judgment: format!("{} |- {judgment}", context_text(context)),
                        source: Table::of(&c.source),
                        target: Table::of(&c.target),
                        components: components(&c.cell),
                    })
                }
            };
            match rec {
                Ok(r) => {
                    out.item(false);
                    out.emit(&r)?;
                }
                Err(e) => {
                    out.item(true);
                    out.emit(&declaration_record(&name, d, *pos, Some((error_class(&e), e.to_string()))))?;
                }
            }
        }
    }
    out.finish("interp")
}

fn verify(cli: &Cli, files: &[PathBuf], categories: &[PathBuf], out: &mut Out) -> anyhow::Result<u8> {
    if files.is_empty() && categories.is_empty() {
        bail!("verify needs a source file or --category");
    }
    for path in categories {
        let file = path.display().to_string();
        let rec = match load_category(path) {
            Ok(c) => Record::Category { file, valid: true, objects: c.n_objects(), arrows: c.n_arrows(), witness: None },
            Err(e @ (FileError::Io { .. } | FileError::Json { .. })) => return Err(e.into()),
            Err(e) => Record::Category { file, valid: false, objects: 0, arrows: 0, witness: Some(e.to_string()) },
        };
        out.item(matches!(rec, Record::Category { valid: false, .. }));
        out.emit(&rec)?;
    }
    if files.is_empty() {
        return out.finish("verify");
    }
    let m = Model::new(base_assignment(cli, BaseAssignment::default)?, cli.mode)?;
    for path in files {
        let name = path.display().to_string();
        let Some(file) = load_source(out, path)? else { continue };
        for (d, pos) in file.declarations.iter().zip(&file.positions) {
            let started = Instant::now();
            if let Err(e) = check_declaration(&Checker::default(), d) {
                out.item(true);
                out.emit(&declaration_record(&name, d, *pos, Some((e.class(), e.to_string()))))?;
                continue;
            }
            let props = match d {
                Declaration::TypeDef { .. } => continue,
                Declaration::TermDecl { context, judgment, expr, .. } => verify_expr(&m, context, expr, judgment),
                Declaration::ReductionDecl { context, judgment, reduction, .. } => {
                    verify_reduction(&m, context, reduction, judgment)
                }
            };
            match props {
                Ok(props) => {
                    for p in props {
                        out.item(!p.passed);
                        out.emit(&Record::Property {
                            file: name.clone(),
                            name: d.name().to_string(),
                            property: p.name,
                            passed: p.passed,
                            detail: p.detail,
                        })?;
                    }
                }
                Err(e) => {
                    out.item(true);
                    out.emit(&declaration_record(&name, d, *pos, Some((error_class(&e), e.to_string()))))?;
                }
            }
            if cli.verbose {
                eprintln!("{name}: {}: {:.2?}", d.name(), started.elapsed());
            }
        }
    }
    out.finish("verify")
}

/// The pinned separating pair.
pub fn witness_pair() -> ParallelPair {
    let file = parse(models::WITNESS).expect("witness parses");
    let mut reds = file.declarations.into_iter().filter_map(|d| match d {
        Declaration::ReductionDecl { context, reduction, .. } => Some((context, reduction)),
        _ => None,
    });
    let (context, left) = reds.next().expect("left witness");
    let (_, right) = reds.next().expect("right witness");
    ParallelPair { context, judgment: Judgment::Absurd, left, right }
}

/// Parallel pairs among the reductions of `files`.
fn file_pairs(files: &[PathBuf]) -> anyhow::Result<Vec<ParallelPair>> {
    let mut decls = Vec::new();
    for path in files {
        let file = c2_core::parser::parse_bytes(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        decls.extend(file.declarations);
    }
    Ok(models::corpus_pairs(&decls))
}

fn demo(cli: &Cli, which: Demo, files: &[PathBuf], pairs: Option<usize>, out: &mut Out) -> anyhow::Result<u8> {
    let fallback = if which == Demo::RelCollapse { models::discrete_bases } else { models::demo_bases };
    let bases = base_assignment(cli, fallback)?;
    let ok = match which {
        Demo::Lafont => {
            let m = Model::new(bases, cli.mode)?;
            let (rec, ok) = match lafont(&m) {
                Ok(l) => {
                    let distinct = !alpha_eq(&l.via_mu.typing.target, &l.via_mu_tilde.typing.target);
                    let rec = Record::Lafont {
                        source: pretty_expr(&l.source),
                        via_mu: pretty_expr(&l.via_mu.typing.target),
                        via_mu_tilde: pretty_expr(&l.via_mu_tilde.typing.target),
                        well_typed: true,
                        distinct_reducts: distinct,
                    };
                    (rec, distinct)
                }
                Err(ModelError::Sem(SemError::Type(e))) => bail!("critical pair does not check: {e}"),
                Err(e) => return Err(e.into()),
            };
            out.emit(&rec)?;
            ok
        }
        Demo::Nondegeneracy => {
            let m = Model::new(bases, cli.mode)?;
            let w = witness_pair();
            let l = m.reduction(&w.context, &w.left, Some(&Judgment::Absurd))?;
            let r = m.reduction(&w.context, &w.right, Some(&Judgment::Absurd))?;
            let parallel = l.source == r.source && l.target == r.target;
            let distinct = parallel && !nat_eq(&l.cell, &r.cell);
            let mut searched = file_pairs(files)?;
            let from_corpus = searched.len();
            searched.extend(models::vacuous_critical_pairs(pairs.unwrap_or(0)));
            let search = degeneracy(&m, &searched)?;
            out.emit(&Record::Nondegeneracy {
                witness_left: pretty_expr(&l.typing.source),
                witness_right: pretty_expr(&r.typing.source),
                parallel,
                distinct,
                searched: search.examined,
                from_corpus,
                searched_distinct: search.distinct,
            })?;
            distinct || search.distinct > 0
        }
        Demo::RelCollapse => {
            let rel = Model::new(bases.clone(), Mode::Rel)?;
            let prof = Model::new(bases.clone(), Mode::Prof)?;
            let mut all = vec![witness_pair()];
            all.extend(file_pairs(files)?);
            all.extend(models::vacuous_critical_pairs(pairs.unwrap_or(40)));
            let report = degeneracy(&rel, &all)?;
            let contrast = degeneracy(&prof, &all)?;
            let mut names: Vec<Name> = ["A", "B", "C"].map(Name::new).into();
            names.extend(bases.named().map(|(n, _)| n.clone()).filter(|n| !["A", "B", "C"].contains(&n.as_str())));
            let shape = models::connective_shape(&rel, &names)?;
            out.emit(&Record::RelCollapse {
                examined: report.examined,
                parallel: report.parallel,
                distinct: report.distinct,
                prof_distinct: contrast.distinct,
                and_or_coincide: shape.and_or_coincide,
                negation_preserves_cardinality: shape.negation_preserves_cardinality,
            })?;
            report.distinct == 0 && shape.and_or_coincide && shape.negation_preserves_cardinality
        }
    };
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

/// Runs a parsed command line, writing records to `w`. Errors are usage or
/// I/O problems.
pub fn run(cli: &Cli, w: &mut dyn Write) -> anyhow::Result<u8> {
    let mut out = Out { w, format: cli.format, failures: 0, items: 0 };
    let started = Instant::now();
    let code = match &cli.command {
        Command::Check { files } => check(cli, files, &mut out),
        Command::Interp { files, decl } => interp(cli, files, decl.as_deref(), &mut out),
        Command::Verify { files, category } => verify(cli, files, category, &mut out),
        Command::Demo { which, files, pairs } => demo(cli, *which, files, *pairs, &mut out),
    }?;
    if cli.verbose {
        eprintln!("finished in {:.2?}", started.elapsed());
    }
    Ok(code)
}
