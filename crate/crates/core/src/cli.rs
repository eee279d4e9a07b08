//! Command-line front end: subcommand configuration, line-oriented reports
//! with `CHECK` lines, exit codes and the deterministic report bundle.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use crate::algprob::{build_nu, diagonal_vs_m, ToyUniversalMixture};
use crate::channel::ApproxChannel;
use crate::complexity::{
    self, calibrate, complexity_report, decoder_cross_check, lemma3_chain, mueller_gap, parse_corpus, third,
    BvlSearch, Dictionary, LemmaNu, ReferenceMachine,
};
use crate::corpus;
use crate::decoder::{coverage_table, decode};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational};
use crate::halting::{enumerate_projections, enumerate_projections_within, orthogonality_defect, trace_sum};
use crate::machine::{
    embed_bits, embed_input, evolve, exact_wellformed_check, extract_output, final_weight, halting_profile,
    parse_machine, parse_machine_exact, wellformed_check, ConfigMixture, ConfigSpace, HaltDiagnostic, QTMDef,
};
use crate::opalg::{index_to_bits, parse_operator, random, write_operator, LowRank, Operator};
use crate::tolerances::{EPS_NUM, ETA_HALT, ETA_SUB, MAX_WINDOW, RANK_MISMATCH, THETA};

#[derive(Parser, Debug)]
#[command(name = "qtmlab", version, about = "Quantum Turing machine laboratory")]
pub struct Cli {
    /// Worker threads; QTM_THREADS is used when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Parse a machine and check that its evolution is unitary.
    Validate(RunConfig),
    /// Evolve a classical or operator input and report halting and output.
    Evolve(RunConfig),
    /// Enumerate halting projections P_t for k-qubit inputs.
    HaltingSpaces(RunConfig),
    /// Build the elementary approximation channel and certify it.
    Approx(RunConfig),
    /// Threshold-and-count coverage table.
    Coverage(RunConfig),
    /// Decode the b-th coverage entry.
    Decode(RunConfig),
    /// Plain and BvL complexity of one string.
    Complexity(RunConfig),
    /// Plain-versus-BvL gap over a corpus.
    Gap(RunConfig),
    /// Build the declared mixture nu and compare its diagonal with m.
    Nu(RunConfig),
    /// Full pipeline bundled into one deterministic archive.
    Bundle(RunConfig),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Evolve(_) => "evolve",
            Command::HaltingSpaces(_) => "halting-spaces",
            Command::Approx(_) => "approx",
            Command::Coverage(_) => "coverage",
            Command::Decode(_) => "decode",
            Command::Complexity(_) => "complexity",
            Command::Gap(_) => "gap",
            Command::Nu(_) => "nu",
            Command::Bundle(_) => "bundle",
        }
    }

    pub fn config(&self) -> &RunConfig {
        match self {
            Command::Validate(c)
            | Command::Evolve(c)
            | Command::HaltingSpaces(c)
            | Command::Approx(c)
            | Command::Coverage(c)
            | Command::Decode(c)
            | Command::Complexity(c)
            | Command::Gap(c)
            | Command::Nu(c)
            | Command::Bundle(c) => c,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BackendArg {
    #[default]
    Float,
    Exact,
}

/// Options shared by every subcommand. Machine and data paths accept
/// `corpus:<name>` for the shipped files.
#[derive(Args, Clone, Debug, Default)]
pub struct RunConfig {
    /// Machine document (repeatable where several are accepted).
    #[arg(long)]
    pub machine: Vec<String>,
    #[arg(long, value_enum, default_value_t = BackendArg::Float)]
    pub backend: BackendArg,
    /// Override the machine's window.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Bundle: halting, channel and coverage run for k = 1..=levels.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long = "tmax", alias = "t-max", default_value_t = 16)]
    pub t_max: usize,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, default_value_t = ETA_SUB)]
    pub eta: f64,
    /// Channel precision as p/q.
    #[arg(long, conflicts_with = "j")]
    pub delta: Option<String>,
    /// Channel precision as 1/j.
    #[arg(long)]
    pub j: Option<u64>,
    #[arg(long = "ell-max")]
    pub ell_max: Option<usize>,
    /// Classical input bits.
    #[arg(long, conflicts_with = "state")]
    pub input: Option<String>,
    /// Input operator file in `op` format.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub cert: bool,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print each projection in `op` format.
    #[arg(long)]
    pub operators: bool,
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub x: Option<String>,
    /// Classical reference machine (`.tm`).
    #[arg(long)]
    pub classical: Option<String>,
    /// Quantum reference machine (`.qtm`).
    #[arg(long)]
    pub quantum: Option<String>,
    /// `basic`, or a file of `state` lines added to the basic dictionary.
    #[arg(long, default_value = "basic")]
    pub dict: String,
    #[arg(long = "k-max", default_value_t = 4)]
    pub k_max: usize,
    #[arg(long = "l-max", default_value_t = 12)]
    pub l_max: usize,
    #[arg(long)]
    pub corpus: Option<String>,
    /// Levels for the decoder cross-check.
    #[arg(long = "decoder-k", value_delimiter = ',', default_values_t = [1usize, 2, 3])]
    pub decoder_k: Vec<usize>,
    /// Declared bound on the maximum gap.
    #[arg(long = "c-star")]
    pub c_star: Option<usize>,
    /// Declared decoder overhead constant.
    #[arg(long = "c-dec")]
    pub c_dec: Option<i64>,
    #[arg(long)]
    pub lemma3: bool,
    #[arg(long)]
    pub prop2: bool,
    #[arg(long)]
    pub mix: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long = "check-domination")]
    pub check_domination: bool,
    /// Output path for `bundle`; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One named bound: `CHECK <name> PASS|FAIL <value> <bound>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: String,
    pub bound: String,
    /// Failing an anchored bound exits 4; other checks exit 3.
    pub anchored: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            pass: value <= bound,
            value: format!("{value:.9e}"),
            bound: format!("{bound:.9e}"),
            anchored: true,
        }
    }

    pub fn le_int(name: impl Into<String>, value: i64, bound: i64) -> Self {
        Self {
            name: name.into(),
            pass: value <= bound,
            value: value.to_string(),
            bound: bound.to_string(),
            anchored: true,
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            pass,
            value: if pass { "1" } else { "0" }.into(),
            bound: "1".into(),
            anchored: true,
        }
    }

    fn unanchored(mut self) -> Self {
        self.anchored = false;
        self
    }

    pub fn line(&self) -> String {
        format!(
            "CHECK {} {} {} {}",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.value,
            self.bound
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub text: String,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl Report {
    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn check(&mut self, c: Check) {
        self.line(c.line());
        self.checks.push(c);
    }

    fn absorb(&mut self, other: Report) {
        self.text.push_str(&other.text);
        self.checks.extend(other.checks);
        self.warnings.extend(other.warnings);
    }

    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| !c.pass && c.anchored) {
            4
        } else if self.checks.iter().any(|c| !c.pass) {
            3
        } else {
            0
        }
    }
}

/// What the binary prints and returns.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run(command: &Command) -> Outcome {
    let result = match command {
        Command::Validate(c) => validate(c),
        Command::Evolve(c) => evolve_cmd(c),
        Command::HaltingSpaces(c) => halting_spaces(c),
        Command::Approx(c) => approx(c),
        Command::Coverage(c) => coverage(c),
        Command::Decode(c) => decode_cmd(c),
        Command::Complexity(c) => complexity_cmd(c),
        Command::Gap(c) => gap(c),
        Command::Nu(c) => nu(c),
        Command::Bundle(c) => bundle(c),
    };
    match result {
        Ok(r) => {
            let mut stderr = String::new();
            for w in &r.warnings {
                writeln!(stderr, "warning: {w}").unwrap();
            }
            Outcome {
                code: r.exit_code(),
                stdout: r.text,
                stderr,
            }
        }
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: e.exit_code(),
        },
    }
}

/// `corpus:<name>` resolves to a shipped file, anything else is a path.
pub fn read_source(spec: &str) -> Result<String> {
    if let Some(name) = spec.strip_prefix("corpus:") {
        let stem = name.rsplit_once('.').map_or(name, |(s, _)| s);
        let text = match stem {
            "rm" => corpus::RM,
            "prefix" => corpus::PREFIX,
            "idprint" => corpus::IDPRINT,
            "corpus4" => corpus::CORPUS4,
            "mix" => corpus::MIX,
            other => corpus::MACHINES
                .iter()
                .find(|(n, _)| *n == other)
                .map(|(_, t)| *t)
                .ok_or_else(|| Error::InvalidArgument(format!("no shipped file `{name}`")))?,
        };
        return Ok(text.to_string());
    }
    Ok(std::fs::read_to_string(spec)?)
}

fn load_machine(spec: &str, backend: BackendArg) -> Result<QTMDef> {
    let text = read_source(spec)?;
    let def = match backend {
        BackendArg::Float => parse_machine(&text)?,
        BackendArg::Exact => parse_machine_exact(&text)?,
    };
    def.validate()?;
    Ok(def)
}

fn space(cfg: &RunConfig, spec: &str) -> Result<ConfigSpace> {
    let def = load_machine(spec, cfg.backend)?;
    let w = cfg.window.unwrap_or(def.window);
    ConfigSpace::new(def, w)
}

fn one_machine(cfg: &RunConfig) -> Result<&str> {
    match cfg.machine.as_slice() {
        [m] => Ok(m),
        [] => Err(Error::InvalidArgument("--machine is required".into())),
        _ => Err(Error::InvalidArgument(
            "this subcommand takes one --machine".into(),
        )),
    }
}

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::InvalidArgument(format!("{flag} is required")))
}

fn delta_of(cfg: &RunConfig) -> Result<BigRational> {
    match (&cfg.delta, cfg.j) {
        (Some(_), Some(_)) => Err(Error::InvalidArgument("--delta conflicts with --j".into())),
        (Some(d), None) => parse_rational(d)
            .map_err(Error::InvalidArgument)?
            .ok_or_else(|| Error::InvalidArgument(format!("zero denominator in `{d}`"))),
        (None, Some(0)) => Err(Error::InvalidArgument("--j must be positive".into())),
        (None, Some(j)) => Ok(BigRational::new(BigInt::one(), BigInt::from(j))),
        (None, None) => Ok(BigRational::new(BigInt::one(), BigInt::from(8))),
    }
}

fn show(x: &str) -> &str {
    complexity::gap::show(x)
}

pub fn validate(cfg: &RunConfig) -> Result<Report> {
    if cfg.machine.is_empty() {
        return Err(Error::InvalidArgument("--machine is required".into()));
    }
    let mut r = Report::default();
    for spec in &cfg.machine {
        let cs = space(cfg, spec)?;
        let def = cs.machine();
        let wf = wellformed_check(&cs)?;
        r.line(format!(
            "machine {} tapes {} window {} states {} rules {} amplitudes {}",
            def.name,
            def.tapes,
            cs.window(),
            def.states.len(),
            def.rule_count(),
            if def.is_exact() { "rational" } else { "irrational" }
        ));
        r.line(format!(
            "evolution dim {} nnz {} completion {}",
            wf.dim,
            wf.nnz,
            wf.completion.name()
        ));
        r.check(Check::le(format!("unitarity:{}", def.name), wf.unitary_defect, EPS_NUM).unanchored());
        if cfg.backend == BackendArg::Exact {
            r.check(
                Check::flag(
                    format!("exact_unitarity:{}", def.name),
                    exact_wellformed_check(&cs)?,
                )
                .unanchored(),
            );
        }
    }
    Ok(r)
}

fn input_mixture(cfg: &RunConfig, cs: &ConfigSpace) -> Result<ConfigMixture> {
    match (&cfg.input, &cfg.state) {
        (Some(bits), None) => {
            let bits = if bits == "-" { "" } else { bits.as_str() };
            Ok(LowRank::pure(embed_bits(cs, bits)?))
        }
        (None, Some(path)) => embed_input(cs, &parse_operator(&read_source(path)?)?),
        (Some(_), Some(_)) => Err(Error::InvalidArgument("--input conflicts with --state".into())),
        (None, None) => Err(Error::InvalidArgument("--input or --state is required".into())),
    }
}

pub fn evolve_cmd(cfg: &RunConfig) -> Result<Report> {
    let cs = space(cfg, one_machine(cfg)?)?;
    let rho = input_mixture(cfg, &cs)?;
    let t_end = cfg.t.unwrap_or(cfg.t_max);
    let mut r = Report::default();
    r.line(format!("evolve machine {} steps {t_end}", cs.machine().name));
    let mut cur = rho.clone();
    for s in 0..=t_end {
        if s > 0 {
            cur = evolve(&cs, &cur, 1)?;
        }
        r.line(format!(
            "step {s} final_weight {:.12} trace {:.12}",
            final_weight(cs.machine(), &cur),
            cur.trace()
        ));
    }
    let prof = halting_profile(&cs, &rho, t_end, ETA_HALT)?;
    match prof.diagnostic {
        HaltDiagnostic::Halted => r.line(format!("halting time {}", prof.time.expect("halted"))),
        HaltDiagnostic::Partial { step, weight } => {
            r.line(format!("halting partial step {step} weight {weight:.12}"))
        }
        HaltDiagnostic::NeverHalted => r.line(format!("halting none within {t_end}")),
    }
    let out = extract_output(&cs, &cur, cs.window())?;
    for n in 0..=cs.window() {
        for i in 0..1usize << n {
            let y = index_to_bits(i, n);
            let w = out.weight_of(&y)?;
            if w > EPS_NUM {
                r.line(format!("output {} weight {w:.12}", show(&y)));
            }
        }
    }
    r.check(Check::le("output_trace", out.trace(), 1.0 + EPS_NUM));
    Ok(r)
}

fn halting_report(cs: &ConfigSpace, k: usize, t_max: usize, eta: f64, operators: bool) -> Result<Report> {
    let ps = enumerate_projections_within(cs, k, t_max, eta)?;
    let mut r = Report::default();
    r.line(format!(
        "halting machine {} k {k} tmax {t_max} eta {eta:e} projections {}",
        cs.machine().name,
        ps.len()
    ));
    for h in &ps {
        r.line(format!("P t {} rank {} trace {:.12}", h.t, h.rank, h.p.trace()));
        if operators {
            r.text.push_str(&write_operator(&h.p));
        }
    }
    let name = &cs.machine().name;
    r.check(Check::le(
        format!("orthogonality:{name}:k{k}"),
        orthogonality_defect(&ps)?,
        EPS_NUM,
    ));
    r.check(Check::le(
        format!("trace_sum:{name}:k{k}"),
        trace_sum(&ps),
        (1u64 << k) as f64 + EPS_NUM,
    ));
    Ok(r)
}

pub fn halting_spaces(cfg: &RunConfig) -> Result<Report> {
    let cs = space(cfg, one_machine(cfg)?)?;
    halting_report(&cs, cfg.k, cfg.t_max, cfg.eta, cfg.operators)
}

fn sample_inputs(ch: &ApproxChannel, samples: usize, seed: u64) -> Vec<Operator> {
    let mut rng = random::rng(seed);
    (0..samples)
        .map(|i| {
            if i % 2 == 0 {
                Operator::projector(&random::random_in_span(&mut rng, &ch.halting.basis))
            } else {
                let ens = random::random_ensemble_in_span(&mut rng, &ch.halting.basis);
                Operator::mixture(1 << ch.k, &ens).expect("ensemble")
            }
        })
        .collect()
}

fn certify(ch: &ApproxChannel, samples: usize, seed: u64, label: &str) -> Result<Report> {
    let mut r = Report::default();
    let inputs = sample_inputs(ch, samples, seed);
    let (mut worst_cert, mut worst_ratio) = (0.0f64, 0.0f64);
    for sigma in &inputs {
        worst_cert = worst_cert.max(ch.error_certificate(sigma)?);
        for step in ch.accumulation_sweep(sigma)? {
            worst_ratio = worst_ratio.max(step.measured / step.bound);
        }
    }
    r.line(format!("certificate {label} samples {samples} seed {seed}"));
    r.check(Check::le(
        format!("certificate:{label}"),
        worst_cert,
        ch.delta_f64(),
    ));
    r.check(Check::le(format!("per_step:{label}"), worst_ratio, 1.0));
    Ok(r)
}

fn channel_lines(ch: &ApproxChannel) -> String {
    format!(
        "channel k {} t {} delta {} gamma {} window_ext {}\nrounding bits {} damping {} budget {:.6e} width {}\ndefect {:.6e} entry_error {:.6e} rank {}\n",
        ch.k,
        ch.t,
        format_rational(&ch.delta),
        format_rational(&ch.gamma),
        ch.window_ext,
        ch.rounded.bits.map_or("none".into(), |b| b.to_string()),
        ch.rounded.damping.as_ref().map_or("none".into(), format_rational),
        ch.rounded.budget,
        ch.rounded.width,
        ch.defect,
        ch.max_entry_error,
        ch.halting.rank
    )
}

pub fn approx(cfg: &RunConfig) -> Result<Report> {
    let cs = space(cfg, one_machine(cfg)?)?;
    let t = *required(&cfg.t, "--t")?;
    let delta = delta_of(cfg)?;
    let ch = ApproxChannel::new(&cs, cfg.k, t, delta)?;
    let mut r = Report::default();
    r.text.push_str(&channel_lines(&ch));
    if cfg.cert {
        if ch.halting.rank == 0 {
            r.line("certificate skipped empty halting subspace");
        } else {
            let label = format!("{}:k{}:t{}", cs.machine().name, cfg.k, t);
            r.absorb(certify(&ch, cfg.samples, cfg.seed, &label)?);
        }
    }
    Ok(r)
}

fn coverage_report(cs: &ConfigSpace, k: usize, t_max: usize, ell_max: Option<usize>) -> Result<Report> {
    let table = coverage_table(cs, k, t_max, ell_max)?;
    let mut r = Report::default();
    r.text.push_str(&table.to_text());
    let name = &cs.machine().name;
    r.check(Check::le_int(
        format!("rows:{name}:k{k}"),
        table.rows.len() as i64,
        table.bound_2k1 as i64,
    ));
    r.check(Check::le(
        format!("trace_o:{name}:k{k}"),
        table.trace_o,
        (1u64 << k) as f64 + EPS_NUM,
    ));
    Ok(r)
}

pub fn coverage(cfg: &RunConfig) -> Result<Report> {
    let cs = space(cfg, one_machine(cfg)?)?;
    coverage_report(&cs, cfg.k, cfg.t_max, cfg.ell_max)
}

pub fn decode_cmd(cfg: &RunConfig) -> Result<Report> {
    let cs = space(cfg, one_machine(cfg)?)?;
    let b = *required(&cfg.b, "--b")?;
    let y = decode(&cs, cfg.k, b, cfg.t_max)?;
    let mut r = Report::default();
    r.line(show(&y));
    Ok(r)
}

fn dictionary(cfg: &RunConfig) -> Result<Dictionary> {
    let d = Dictionary::basic(cfg.k_max);
    if cfg.dict == "basic" {
        Ok(d)
    } else {
        let extra = Dictionary::parse_states(&read_source(&cfg.dict)?)?;
        Ok(d.with_states(extra, &cfg.dict))
    }
}

fn reference_pair(cfg: &RunConfig) -> Result<(ReferenceMachine, BvlSearch)> {
    let rm = ReferenceMachine::parse(&read_source(required(&cfg.classical, "--classical")?)?)?;
    let q = space(cfg, required(&cfg.quantum, "--quantum")?)?;
    let search = BvlSearch::new(&q, dictionary(cfg)?, cfg.k_max)?;
    Ok((rm, search))
}

fn pair_header(rm: &ReferenceMachine, search: &BvlSearch) -> String {
    format!(
        "reference classical {} kind {} budget {} quantum {} dictionary {} programs {}",
        rm.name,
        rm.kind.name(),
        rm.step_budget,
        search.base.machine().name,
        search.dictionary.description,
        search.dictionary.programs.len()
    )
}

pub fn complexity_cmd(cfg: &RunConfig) -> Result<Report> {
    let x = required(&cfg.x, "--x")?;
    let x = if x == "-" { "" } else { x.as_str() };
    if !x.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::InvalidArgument(format!("`{x}` is not a bit string")));
    }
    let (rm, search) = reference_pair(cfg)?;
    let rep = complexity_report(x, &rm, &search, cfg.l_max)?;
    let mut r = Report::default();
    r.line(pair_header(&rm, &search));
    r.line(rep.line());
    for (k, v) in &rep.hbvl_eps {
        r.line(format!(
            "hbvl_eps 1/{k} {}",
            v.map_or("none".to_string(), |n| n.to_string())
        ));
    }
    if let Some(why) = rep.inconclusive() {
        r.warnings.push(format!("{}: {why}", show(x)));
    }
    r.check(Check::flag("hbvl_eps_below_hbvl", rep.invariants_hold()));
    Ok(r)
}

pub fn gap(cfg: &RunConfig) -> Result<Report> {
    let corpus = parse_corpus(&read_source(required(&cfg.corpus, "--corpus")?)?)?;
    let (rm, search) = reference_pair(cfg)?;
    gap_report(cfg, &corpus, &rm, &search)
}

fn gap_report(
    cfg: &RunConfig,
    corpus: &[String],
    rm: &ReferenceMachine,
    search: &BvlSearch,
) -> Result<Report> {
    let g = mueller_gap(corpus, rm, search, cfg.l_max)?;
    let mut r = Report::default();
    r.line(pair_header(rm, search));
    r.text.push_str(&g.to_text());
    for (x, why) in &g.flagged {
        r.warnings
            .push(format!("{} excluded from the gap: {why}", show(x)));
    }
    r.check(Check::flag(
        "hbvl_eps_below_hbvl",
        g.reports.iter().all(|x| x.invariants_hold()),
    ));
    if let Some(c) = cfg.c_star {
        r.check(Check::le_int("max_gap", g.max_gap as i64, c as i64));
    }
    if !cfg.decoder_k.is_empty() {
        let d = decoder_cross_check(&search.base, rm, &cfg.decoder_k, cfg.t_max, cfg.l_max)?;
        r.text.push_str(&d.to_text());
        let c_dec = cfg.c_dec.unwrap_or(d.c_dec);
        r.check(Check::flag(
            format!("decoder_overhead:c_dec={c_dec}"),
            d.holds(c_dec),
        ));
    }
    if cfg.lemma3 {
        let nu = LemmaNu::build(search, search.k_max, third())?;
        let chain = lemma3_chain(search, &nu, corpus)?;
        r.text.push_str(&chain.to_text());
        r.check(Check::flag("lemma3_chain", chain.holds()));
    }
    if cfg.prop2 {
        let cal = calibrate(64, 8);
        r.text.push_str(&cal.to_text());
        let out = complexity::prop2_check(&complexity::sample_grid(64, 8), |c| {
            complexity::c_prime_form(c, cal.constant)
        });
        r.check(Check::flag("prop2", out.holds()));
    }
    Ok(r)
}

pub fn nu(cfg: &RunConfig) -> Result<Report> {
    let mix = ToyUniversalMixture::parse(&read_source(required(&cfg.mix, "--mix")?)?)?;
    nu_report(&mix, cfg.steps, cfg.check_domination)
}

fn nu_report(mix: &ToyUniversalMixture, steps: usize, domination: bool) -> Result<Report> {
    let b = build_nu(mix, steps)?;
    let mut r = Report::default();
    r.line(format!(
        "nu programs {} steps {steps} max_len {} trace {:.12}",
        mix.programs.len(),
        b.max_len,
        b.nu.trace()
    ));
    for (i, p) in mix.programs.iter().enumerate() {
        r.line(format!(
            "program {} weight {} terms {} tail {} ml_lower_bound {}",
            i + 1,
            format_rational(&p.weight),
            p.lc.terms.len(),
            format_rational(&b.tails[i]),
            format_rational(&p.weight)
        ));
    }
    let d = diagonal_vs_m(mix, steps, complexity::toy_m)?;
    r.text.push_str(&d.to_text());
    r.check(Check::le("diagonal_sum", b.diagonal_sum(), 1.0 + EPS_NUM));
    if domination {
        for (i, ok) in b.domination()?.into_iter().enumerate() {
            r.check(Check::flag(format!("domination:{}", i + 1), ok));
        }
    }
    Ok(r)
}

/// Stage name attached to any error raised inside it.
fn stage<T>(name: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().map_err(|e| Error::Stage {
        stage: name,
        source: Box::new(e),
    })
}

fn manifest(cfg: &RunConfig, machines: &[String]) -> String {
    let mut s = String::new();
    writeln!(s, "bundle format 1").unwrap();
    writeln!(s, "qtmlab {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(s, "threads {}", rayon::current_num_threads()).unwrap();
    writeln!(s, "seed {} samples {}", cfg.seed, cfg.samples).unwrap();
    writeln!(
        s,
        "tolerances eps_num {EPS_NUM:e} eta_halt {ETA_HALT:e} eta_sub {ETA_SUB:e} rank_mismatch {RANK_MISMATCH} theta {THETA} max_window {MAX_WINDOW}"
    )
    .unwrap();
    writeln!(s, "machines {}", machines.join(" ")).unwrap();
    writeln!(s, "levels k 1..={} tmax {}", cfg.levels, cfg.t_max).unwrap();
    s
}

/// Runs halting, channel certificates, coverage, gap and nu and returns one
/// archive with `=== <section>` headers.
pub fn bundle_archive(cfg: &RunConfig) -> Result<(String, Vec<Check>)> {
    let machines: Vec<String> = if cfg.machine.is_empty() {
        corpus::MACHINES
            .iter()
            .map(|(n, _)| format!("corpus:{n}"))
            .collect()
    } else {
        cfg.machine.clone()
    };
    let mut sections: Vec<(String, Report)> = Vec::new();
    let spaces = stage("validate", || {
        let mut rep = Report::default();
        let mut spaces = Vec::new();
        for m in &machines {
            let one = RunConfig {
                machine: vec![m.clone()],
                ..cfg.clone()
            };
            let r = validate(&one)?;
            if let Some(c) = r.checks.iter().find(|c| !c.pass) {
                return Err(Error::Malformed(format!("{m}: {}", c.line())));
            }
            rep.absorb(r);
            spaces.push(space(cfg, m)?);
        }
        sections.push(("validate".into(), rep));
        Ok(spaces)
    })?;
    let levels = 1..=cfg.levels;
    stage("halting", || {
        let mut rep = Report::default();
        for cs in &spaces {
            for k in levels.clone() {
                rep.absorb(halting_report(cs, k, cfg.t_max, ETA_SUB, false)?);
            }
        }
        sections.push(("halting".into(), rep));
        Ok(())
    })?;
    stage("channel", || {
        let mut rep = Report::default();
        let delta = delta_of(cfg)?;
        for cs in &spaces {
            for k in levels.clone() {
                for h in enumerate_projections(cs, k, cfg.t_max)? {
                    let label = format!("{}:k{}:t{}", cs.machine().name, k, h.t);
                    let ch = ApproxChannel::from_projection(cs, h, delta.clone())?;
                    rep.text.push_str(&channel_lines(&ch));
                    let seed = cfg.seed.wrapping_add(random::rng(k as u64).gen::<u64>());
                    rep.absorb(certify(&ch, cfg.samples, seed, &label)?);
                }
            }
        }
        sections.push(("channel".into(), rep));
        Ok(())
    })?;
    stage("coverage", || {
        let mut rep = Report::default();
        for cs in &spaces {
            for k in levels.clone() {
                rep.absorb(coverage_report(cs, k, cfg.t_max, cfg.ell_max)?);
            }
        }
        sections.push(("coverage".into(), rep));
        Ok(())
    })?;
    stage("gap", || {
        let gcfg = RunConfig {
            classical: Some(cfg.classical.clone().unwrap_or("corpus:rm".into())),
            quantum: Some(cfg.quantum.clone().unwrap_or("corpus:hadamard".into())),
            corpus: Some(cfg.corpus.clone().unwrap_or("corpus:corpus4".into())),
            lemma3: true,
            prop2: true,
            window: None,
            ..cfg.clone()
        };
        let corpus = parse_corpus(&read_source(gcfg.corpus.as_deref().expect("set"))?)?;
        let (rm, search) = reference_pair(&gcfg)?;
        sections.push(("gap".into(), gap_report(&gcfg, &corpus, &rm, &search)?));
        Ok(())
    })?;
    stage("nu", || {
        let mix = ToyUniversalMixture::parse(&read_source(cfg.mix.as_deref().unwrap_or("corpus:mix"))?)?;
        sections.push(("nu".into(), nu_report(&mix, cfg.steps, true)?));
        Ok(())
    })?;
    let mut archive = format!("=== manifest\n{}", manifest(cfg, &machines));
    let mut checks = Vec::new();
    for (name, rep) in sections {
        write!(archive, "=== {name}\n{}", rep.text).unwrap();
        checks.extend(rep.checks);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    write!(archive, "=== summary\nchecks {} failed {failed}\n", checks.len()).unwrap();
    Ok((archive, checks))
}

pub fn bundle(cfg: &RunConfig) -> Result<Report> {
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("--samples must be positive".into()));
    }
    let (archive, checks) = bundle_archive(cfg)?;
    let mut r = Report {
        checks,
        ..Report::default()
    };
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &archive)?;
            r.line(format!("bundle written to {}", path.display()));
            for c in r.checks.clone().iter().filter(|c| !c.pass) {
                r.line(c.line());
            }
            let n = r.checks.len();
            r.line(format!("checks {n}"));
        }
        None => r.text = archive,
    }
    Ok(r)
}
