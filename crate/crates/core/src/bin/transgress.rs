use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use jandl::algebra::{build_double, even_subalgebra, quasi_bialgebra, DoubleVariant, TwistedGroupoidAlgebra};
use jandl::cochain::{cocycle_basis, set_table_budget, CocycleFile, CocycleSource};
use jandl::counting::{
    centre_dim, class_count, count_simples, double_simple_count, flat_sect_equality, one_loop_sectors, CountReport,
};
use jandl::groupoid::{parse_group_spec, GradedGroup};
use jandl::suite::{self, Manifest};
use jandl::torsion::{check_doubly_odd_reduction, torsion_2d, torsion_3d};
use jandl::transgress::{transgress, TransgressionMap};
use jandl::{Cochain, Error, GradedGroupoid, Twist};

#[derive(Parser, Debug)]
#[command(name = "transgress", version, about = "Twisted loop transgression on finite Z2-graded groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// `cyclic:4:mod2`, `dihedral:4:reflection`, `product_Z2:S3`, ... or a JSON group description.
    #[arg(long, global = true)]
    group: Option<String>,
    /// Builtin name (`trivial`, `quaternionic`, `cyclic3[:f]`, `cyclic2_pulled:i:j`), `basis:i`, or a JSON file.
    #[arg(long, global = true)]
    cocycle: Option<String>,
    /// Degree for sources that do not fix one.
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long, global = true, value_parser = parse_map)]
    map: Option<TransgressionMap>,
    #[arg(long, global = true)]
    variant: Option<DoubleVariant>,
    /// Coefficients in (1/k)Z/Z for the solver.
    #[arg(long, global = true, default_value_t = 4)]
    order: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "TRANSGRESS_THREADS")]
    threads: Option<usize>,
    /// Largest number of entries a single cochain table may hold.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
enum Command {
    /// Group, grading and loop groupoid sizes.
    Info,
    /// Solver basis of twisted cocycles and the invariant factors of cohomology.
    Cocycles,
    /// Transgress a cocycle along `--map`.
    Transgress,
    /// Counting reports for a cocycle of degree 1, 2 or 3.
    Count,
    /// Centre of the Real twisted group algebra.
    Centre,
    /// A twisted double and its basic invariants.
    Double,
    /// Quasi-bialgebra identities for a 3-cocycle.
    Quasicheck,
    /// Discrete-torsion phases as TSV.
    Torsion,
    /// The full verification suite.
    Verify {
        /// Replaces the bundled manifest.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

fn parse_map(s: &str) -> Result<TransgressionMap, String> {
    match s.to_ascii_lowercase().as_str() {
        "tau" => Ok(TransgressionMap::Tau),
        "tau_pi" => Ok(TransgressionMap::TauPi),
        "tau_ref" => Ok(TransgressionMap::TauRef),
        "tau_ref_tilde" => Ok(TransgressionMap::TauRefTilde),
        _ => Err(format!("unknown map '{s}'")),
    }
}

enum Failure {
    Input(String),
    Verification(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Verification { .. } => Failure::Verification(e.to_string()),
            Error::Budget { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Input(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Failure>;

struct Input {
    group: GradedGroup,
    space: GradedGroupoid,
}

impl Cli {
    fn input(&self) -> Run<Input> {
        let spec = self.group.as_deref().ok_or_else(|| Failure::Input("--group is required".into()))?;
        let group = parse_group_spec(spec)?;
        let space = group.classifying_groupoid();
        Ok(Input { group, space })
    }

    fn cocycle(&self, input: &Input, default_degree: usize, twist: Twist) -> Run<Cochain> {
        let src: CocycleSource = self.cocycle.as_deref().unwrap_or("trivial").parse()?;
        let degree = self.degree.unwrap_or(default_degree);
        Ok(src.resolve(&input.group, &input.space, degree, twist, self.order)?)
    }

    fn emit(&self, text: &str) -> Run<()> {
        match &self.out {
            Some(p) => fs::write(p, text)?,
            None => {
                let mut o = std::io::stdout().lock();
                let r = o.write_all(text.as_bytes()).and_then(|_| {
                    if text.ends_with('\n') {
                        Ok(())
                    } else {
                        o.write_all(b"\n")
                    }
                });
                match r {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                    r => r?,
                }
            }
        }
        Ok(())
    }

    fn emit_json(&self, v: &Value) -> Run<()> {
        self.emit(&serde_json::to_string_pretty(v).map_err(|e| Failure::Input(e.to_string()))?)
    }
}

fn sizes(g: &jandl::FiniteGroupoid) -> Value {
    json!({"objects": g.n_objects(), "morphisms": g.n_morphisms(), "components": g.components().len()})
}

fn info(cli: &Cli) -> Run<()> {
    let i = cli.input()?;
    let g = &i.group;
    let elements: Vec<Value> = (0..g.order())
        .map(|x| json!({"name": g.element_name(x), "sign": g.sign(x).to_i64()}))
        .collect();
    let mut loops = serde_json::Map::new();
    for map in TransgressionMap::ALL.into_iter().take(3) {
        let lg = map.loop_groupoid(&i.space)?;
        loops.insert(format!("{:?}", map.loop_kind()).to_lowercase(), sizes(lg.groupoid()));
    }
    cli.emit_json(&json!({
        "group": g.name(),
        "order": g.order(),
        "graded": g.is_graded(),
        "kernel_order": g.kernel().len(),
        "conjugacy_classes": class_count(g),
        "elements": elements,
        "loop_groupoids": loops,
    }))
}

fn cocycles(cli: &Cli) -> Run<()> {
    let i = cli.input()?;
    let degree = cli.degree.unwrap_or(2);
    let twist = cli.map.map_or(Twist::Pi, |m| m.input_twist());
    let b = cocycle_basis(&i.space, degree, twist, cli.order)?;
    let files: Vec<CocycleFile> = b.cocycles.iter().map(CocycleFile::from_cochain).collect();
    cli.emit_json(&json!({
        "group": i.group.name(),
        "degree": degree,
        "twist": twist,
        "order": cli.order,
        "invariant_factors": b.invariant_factors,
        "cocycles": files,
    }))
}

fn transgress_cmd(cli: &Cli) -> Run<()> {
    let i = cli.input()?;
    let map = cli.map.ok_or_else(|| Failure::Input("--map is required".into()))?;
    let c = cli.cocycle(&i, 2, map.input_twist())?;
    if c.degree() == 0 {
        return Err(Failure::Input("cannot transgress a degree-0 cochain".into()));
    }
    let lg = map.loop_groupoid(&i.space)?;
    let t = transgress(map, &lg, &c)?;
    cli.emit_json(&json!({
        "group": i.group.name(),
        "map": map,
        "loop_groupoid": sizes(lg.groupoid()),
        "cocycle": CocycleFile::from_cochain(&t),
    }))
}

fn table(reports: &[&CountReport]) {
    for r in reports {
        eprintln!(
            "{:<32} formula {:>6}  sections {:>6}  agree {}",
            r.quantity,
            jandl::phase::format_rational(&r.value_formula),
            jandl::phase::format_rational(&r.value_sections),
            r.agree
        );
    }
}

fn count(cli: &Cli) -> Run<()> {
    let i = cli.input()?;
    let c = cli.cocycle(&i, 2, Twist::Pi)?;
    let (reports, sectors) = match c.degree() {
        1 => (vec![flat_sect_equality(&c)?], None),
        2 => (vec![count_simples(&c)?, centre_dim(&i.group, &c)?], None),
        3 => (vec![double_simple_count(&c)?], Some(one_loop_sectors(&c)?)),
        d => return Err(Error::Degree(d).into()),
    };
    table(&reports.iter().collect::<Vec<_>>());
    let agree = reports.iter().all(|r| r.agree);
    cli.emit_json(&json!({
        "group": i.group.name(),
        "degree": c.degree(),
        "reports": reports,
        "sectors": sectors,
        "agree": agree,
    }))?;
    if agree {
        Ok(())
    } else {
        Err(Failure::Verification("count reports disagree".into()))
    }
}

fn centre(cli: &Cli) -> Run<()> {
    let i = cli.input()?;
    let c = cli.cocycle(&i, 2, Twist::Pi)?;
    let report = centre_dim(&i.group, &c)?;
    let algebra = TwistedGroupoidAlgebra::new(c)?;
    let z = algebra.centre()?;
    let basis: Vec<Value> = z.basis.iter().map(|e| json!(e.to_json(algebra.groupoid()))).collect();
    table(&[&report]);
    cli.emit_json(&json!({"group": i.group.name(), "report": report, "dim_real": z.dim_real, "basis": basis}))
}

fn double(cli: &Cli) -> Run<()> {
    let i = cli.input()?;
    let variant = cli.variant.unwrap_or(DoubleVariant::DdQuot);
    let c = cli.cocycle(&i, 3, variant.map().input_twist())?;
    let d = build_double(&c, variant)?;
    let z = d.algebra.centre()?;
    cli.emit_json(&json!({
        "group": i.group.name(),
        "variant": variant.to_string(),
        "dim": d.algebra.dim(),
        "real": d.algebra.is_real(),
        "even_dim": even_subalgebra(&d).len(),
        "loop_groupoid": sizes(d.loops.groupoid()),
        "centre_dim_real": z.dim_real,
    }))
}

fn quasicheck(cli: &Cli) -> Run<()> {
    let i = cli.input()?;
    let c = cli.cocycle(&i, 3, Twist::Pi)?;
    let q = quasi_bialgebra(&i.group, &c)?;
    let checks = q.checks();
    let rows: Vec<Value> = checks
        .iter()
        .map(|(name, r)| json!({"check": name, "passed": r.is_ok(), "witness": r.as_ref().err().map(|e| e.to_string())}))
        .collect();
    cli.emit_json(&json!({"group": i.group.name(), "checks": rows}))?;
    match checks.into_iter().find_map(|(_, r)| r.err()) {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn torsion(cli: &Cli) -> Run<()> {
    let i = cli.input()?;
    let c = cli.cocycle(&i, 2, Twist::Pi)?;
    let t = match c.degree() {
        2 => torsion_2d(&i.group, &c)?,
        3 => {
            let t = torsion_3d(&i.group, &c)?;
            check_doubly_odd_reduction(&i.group, &c, &t)?;
            t
        }
        d => return Err(Error::Degree(d).into()),
    };
    cli.emit(&t.to_tsv(&i.group))
}

fn verify(cli: &Cli, manifest: &Option<PathBuf>) -> Run<()> {
    let m = match manifest {
        Some(p) => Manifest::from_json(&fs::read_to_string(p)?)?,
        None => Manifest::standard(),
    };
    let outcomes = suite::run(&m, cli.seed);
    let mut text = String::new();
    for o in &outcomes {
        match &o.witness {
            None => text.push_str(&format!("PASS {:>2} {}: {} cases\n", o.criterion, o.name, o.cases)),
            Some(w) => text.push_str(&format!("FAIL {:>2} {}: {w}\n", o.criterion, o.name)),
        }
    }
    cli.emit(&text)?;
    if outcomes.iter().all(|o| o.passed()) {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{} of {} properties failed",
            outcomes.iter().filter(|o| !o.passed()).count(),
            outcomes.len()
        )))
    }
}

fn run(cli: &Cli) -> Run<()> {
    if let Some(b) = cli.budget {
        if b == 0 {
            return Err(Failure::Input("--budget must be positive".into()));
        }
        set_table_budget(b);
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    match &cli.command {
        Command::Info => info(cli),
        Command::Cocycles => cocycles(cli),
        Command::Transgress => transgress_cmd(cli),
        Command::Count => count(cli),
        Command::Centre => centre(cli),
        Command::Double => double(cli),
        Command::Quasicheck => quasicheck(cli),
        Command::Torsion => torsion(cli),
        Command::Verify { manifest } => verify(cli, manifest),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("budget exceeded: {m}");
            ExitCode::from(3)
        }
    }
}
