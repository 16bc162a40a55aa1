//! `shiftlab`: experiment driver for shift-operator dynamics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use shiftlab::analytic::{self, PipelineOptions};
use shiftlab::certificate::{self, MixingCertificate, VerifyOptions};
use shiftlab::exec::{self, Execution};
use shiftlab::interval::CertifiedInterval;
use shiftlab::report::{self, fmt_num};
use shiftlab::scalar::parse_complex;
use shiftlab::{obstruction, product, solve, Error, GeomSequence, OperatorSymbol, Result, C64};

#[derive(Parser)]
#[command(name = "shiftlab", version, about = "Certified mixing chains and obstruction witnesses for shift operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preimage chain for I + λB, transported to a kernel vector.
    MixingChain(ChainArgs),
    /// Rates, observed norms and spectral distances over a modulus grid.
    ThresholdScan(ScanArgs),
    /// Minimal-norm floor for preimages of the range witness at |λ| = 1.
    RangeWitness(WitnessArgs),
    /// Eigenvectors of B on the unit circle and resolvent checks.
    Quotient(QuotientArgs),
    /// Parameters and certificate for R·f(B).
    Analytic(AnalyticArgs),
    /// Chain and separated kernel family for λB∘P∘S.
    Product(ProductArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "shiftlab-out")]
    out_dir: PathBuf,
    /// Emit only this format (default: all that apply).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Residual tolerance per operator application.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Sampling horizon for sup-norms without a closed form.
    #[arg(long, default_value_t = shiftlab::seq::DEFAULT_HORIZON)]
    horizon: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Common {
    fn wants(&self, f: Format) -> bool {
        self.format.is_none_or(|g| g == f)
    }

    fn path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir)?;
        Ok(self.out_dir.join(name))
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.horizon == 0 {
            return Err(Error::Parse("tolerance and horizon must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    /// Target: a JSON sequence file, or `eK` for the unit vector e_K.
    #[arg(long, default_value = "e1")]
    target: String,
    #[arg(long, default_value_t = 40)]
    n_max: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ScanArgs {
    /// Moduli `start:stop:step` (λ is real and positive on the grid).
    #[arg(long, default_value = "0.5:4:0.25")]
    lambda_grid: String,
    #[arg(long, default_value_t = 20)]
    n_max: usize,
    /// Truncation length for the obstruction at |λ| = 1.
    #[arg(long = "N", default_value_t = 101)]
    big_n: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long, allow_hyphen_values = true, default_value = "-1")]
    lambda: String,
    #[arg(long = "N", default_value_t = 101)]
    big_n: usize,
    /// Random head perturbations per λ.
    #[arg(long, default_value_t = 50)]
    count: usize,
    /// Perturbation radius; the floor applies below 1/2.
    #[arg(long, default_value_t = 0.49)]
    radius: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct QuotientArgs {
    /// Number of equally spaced angles θ.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Random resolvent instances.
    #[arg(long, default_value_t = 200)]
    resolvents: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct AnalyticArgs {
    /// Coefficients of f, constant term first, e.g. `0,1` for f(z) = z.
    #[arg(long, allow_hyphen_values = true, default_value = "0,1")]
    coeffs: String,
    /// Operator scale R (default: 1.01·R0).
    #[arg(long = "R")]
    r: Option<f64>,
    /// Rescale f first so that 0 interior to f(D̄) suffices.
    #[arg(long)]
    rescale: bool,
    #[arg(long, default_value = "e1")]
    target: String,
    #[arg(long, default_value_t = 5)]
    m_max: usize,
    #[arg(long, default_value_t = 0.1)]
    margin: f64,
    #[arg(long, default_value_t = 0.5)]
    a_target: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ProductArgs {
    #[arg(long, allow_hyphen_values = true, default_value = "2")]
    lambda: String,
    #[arg(long, default_value = "e1")]
    target: String,
    #[arg(long, default_value_t = 20)]
    n_max: usize,
    /// log₂ of the family size.
    #[arg(long, default_value_t = 8)]
    k: u32,
    #[command(flatten)]
    common: Common,
}

fn parse_target(s: &str) -> Result<GeomSequence> {
    if let Some(k) = s.strip_prefix('e').and_then(|k| k.parse::<usize>().ok()) {
        if k == 0 {
            return Err(Error::Parse("unit vectors are indexed from 1".into()));
        }
        return Ok(GeomSequence::basis(k));
    }
    GeomSequence::from_json(&fs::read_to_string(s)?)
}

fn parse_list(s: &str) -> Result<Vec<C64>> {
    s.split(',').map(|t| parse_complex(t.trim())).collect()
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("grid {s:?}: {e}"))))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(Error::Parse(format!("grid {s:?} must be start:stop:step")));
    };
    if !(step > 0.0) || stop < start {
        return Err(Error::Parse(format!("grid {s:?} is empty")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn verify_opts(common: &Common) -> VerifyOptions {
    VerifyOptions { tol: common.tol, ..VerifyOptions::default() }
}

#[derive(Serialize)]
struct CertificateSummary<'a> {
    verified: bool,
    max_residual: f64,
    entries: usize,
    rate: f64,
    offset: f64,
    non_decaying: bool,
    norms: Vec<(usize, CertifiedInterval)>,
    base_point: &'a GeomSequence,
}

fn emit_certificate(common: &Common, stem: &str, cert: &MixingCertificate, title: &str) -> Result<bool> {
    let check = certificate::verify_with(cert, verify_opts(common))?;
    let norms = cert.chain.iter().map(|e| (e.n, e.delta.sup_norm_with(common.horizon))).collect();
    let summary = CertificateSummary {
        verified: check.ok(),
        max_residual: check.max_residual(),
        entries: cert.chain.len(),
        rate: cert.rate,
        offset: cert.offset,
        non_decaying: cert.non_decaying,
        norms,
        base_point: &cert.base_point,
    };
    if common.wants(Format::Json) {
        report::write_json(&common.path(&format!("{stem}.json"))?, cert)?;
        report::write_json(&common.path(&format!("{stem}-verification.json"))?, &summary)?;
    }
    if common.wants(Format::Csv) {
        let rows: Vec<Vec<String>> = cert
            .chain
            .iter()
            .zip(&check.entries)
            .map(|(e, c)| {
                vec![
                    e.n.to_string(),
                    fmt_num(e.distance.lower),
                    fmt_num(e.distance.upper),
                    fmt_num(c.bound),
                    fmt_num(c.residual.upper),
                    (c.residual_ok && c.bound_ok && c.split_ok).to_string(),
                ]
            })
            .collect();
        let header = ["n", "distance_lo", "distance_hi", "bound", "residual_hi", "ok"].map(String::from);
        report::write_csv_records(&common.path(&format!("{stem}.csv"))?, &header, &rows)?;
    }
    if common.wants(Format::Svg) {
        report::write_text(&common.path(&format!("{stem}.svg"))?, &report::decay_svg(cert, title))?;
    }
    println!(
        "{title}: {} entries, rate {}, verified {}{}",
        cert.chain.len(),
        cert.rate,
        check.ok(),
        if cert.non_decaying { " (non-decaying)" } else { "" }
    );
    Ok(check.ok())
}

fn verification_failed(ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Verification("one or more chain entries failed the residual or bound check".into()))
    }
}

fn cmd_mixing_chain(a: &ChainArgs) -> Result<()> {
    a.common.validate()?;
    let lambda = parse_complex(&a.lambda)?;
    let y = parse_target(&a.target)?;
    let cert = solve::kernel_mixing_chain(lambda, &y, a.n_max)?;
    let ok = emit_certificate(&a.common, "mixing-chain", &cert, &format!("I + λB, λ = {lambda}"))?;
    verification_failed(ok)
}

fn cmd_threshold_scan(a: &ScanArgs) -> Result<()> {
    a.common.validate()?;
    let grid = parse_grid(&a.lambda_grid)?;
    let rows = Execution::available().map(&grid, |&m| -> Result<Vec<String>> {
        let lambda = C64::new(m, 0.0);
        let (rate, observed) = if m > 1.0 {
            let cert = solve::mixing_chain(lambda, &GeomSequence::basis(1), a.n_max)?;
            let last = cert.chain.last().map(|e| e.w.sup_norm_with(a.common.horizon));
            (Some(cert.rate), last)
        } else {
            (None, None)
        };
        let obstruction = if (m - 1.0).abs() <= 1e-12 {
            Some(obstruction::witness_report(lambda, a.big_n)?)
        } else {
            None
        };
        let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
        Ok(vec![
            fmt_num(m),
            opt(rate),
            opt(observed.map(|i| i.lower)),
            opt(observed.map(|i| i.upper)),
            fmt_num(obstruction::spectral_circle_distance(lambda)),
            (m > 2.0).to_string(),
            opt(obstruction.as_ref().map(|r| r.floor)),
            opt(obstruction.as_ref().map(|r| r.min_norm.lower)),
            opt(obstruction.as_ref().map(|r| r.min_norm.upper)),
        ])
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let header = [
        "modulus",
        "rate_bound",
        "chain_norm_lo",
        "chain_norm_hi",
        "spectral_distance",
        "mixing",
        "obstruction_floor",
        "min_norm_lo",
        "min_norm_hi",
    ]
    .map(String::from);
    let path = report::write_csv_records(&a.common.path("threshold-scan.csv")?, &header, &rows)?;
    println!("threshold scan: {} grid points -> {}", rows.len(), path.display());
    Ok(())
}

fn cmd_range_witness(a: &WitnessArgs) -> Result<()> {
    a.common.validate()?;
    let lambda = parse_complex(&a.lambda)?;
    let base = obstruction::witness_report(lambda, a.big_n)?;
    let mut reports = vec![base];
    reports.extend(obstruction::perturbation_suite(
        &[lambda],
        a.big_n,
        a.count,
        a.radius,
        a.common.seed,
        Execution::available(),
    )?);
    if a.common.wants(Format::Json) {
        report::write_json(&a.common.path("range-witness.json")?, &reports)?;
    }
    if a.common.wants(Format::Csv) {
        let rows: Vec<Vec<String>> = reports
            .iter()
            .map(|r| {
                vec![
                    format!("{}", r.lambda),
                    r.n.to_string(),
                    r.w_description.clone(),
                    fmt_num(r.perturbation.upper),
                    fmt_num(r.min_norm.lower),
                    fmt_num(r.min_norm.upper),
                    fmt_num(r.floor),
                    r.meets_floor(1e-6).to_string(),
                ]
            })
            .collect();
        let header =
            ["lambda", "N", "w", "perturbation_hi", "min_norm_lo", "min_norm_hi", "floor", "meets_floor"].map(String::from);
        report::write_csv_records(&a.common.path("range-witness.csv")?, &header, &rows)?;
    }
    let worst = reports.iter().map(|r| r.min_norm.lower).fold(f64::INFINITY, f64::min);
    println!(
        "range witness λ = {lambda}, N = {}: min_norm {} (floor {}), worst over {} perturbations {}",
        a.big_n,
        reports[0].min_norm,
        reports[0].floor,
        a.count,
        worst
    );
    Ok(())
}

#[derive(Serialize)]
struct QuotientReport {
    eigen: Vec<EigenRow>,
    resolvent: Vec<ResolventRow>,
}

#[derive(Serialize)]
struct EigenRow {
    theta: f64,
    residual: CertifiedInterval,
    seminorm: CertifiedInterval,
}

#[derive(Serialize)]
struct ResolventRow {
    mu: [f64; 2],
    residual: CertifiedInterval,
    norm: CertifiedInterval,
    bound: f64,
}

fn cmd_quotient(a: &QuotientArgs) -> Result<()> {
    a.common.validate()?;
    let thetas: Vec<f64> = (0..a.grid).map(|k| std::f64::consts::TAU * k as f64 / a.grid as f64).collect();
    let eigen = Execution::available().map(&thetas, |&theta| {
        let x = obstruction::circle_eigenvector(theta);
        EigenRow {
            theta,
            residual: obstruction::eigen_residual(theta, &x).sup_norm_with(a.common.horizon),
            seminorm: x.quotient_seminorm(),
        }
    });
    let resolvent = Execution::available().map_range(a.resolvents, |k| -> Result<ResolventRow> {
        let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
        rng.set_stream(k as u64);
        let mu = C64::from_polar(0.95 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        let len = rng.gen_range(1..=12);
        let y = GeomSequence::finite(
            (0..len).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        );
        let x = obstruction::resolvent_solve(mu, &y)?;
        let back = shiftlab::symbol::apply_polynomial(&[-mu, C64::new(1.0, 0.0)], &x);
        Ok(ResolventRow {
            mu: [mu.re, mu.im],
            residual: back.distance(&y),
            norm: x.sup_norm_with(a.common.horizon),
            bound: y.sup_norm().upper / (1.0 - mu.norm()),
        })
    });
    let resolvent = resolvent.into_iter().collect::<Result<Vec<_>>>()?;
    let exact = eigen.iter().filter(|r| r.residual == CertifiedInterval::zero()).count();
    let rep = QuotientReport { eigen, resolvent };
    if a.common.wants(Format::Json) {
        report::write_json(&a.common.path("quotient.json")?, &rep)?;
    }
    if a.common.wants(Format::Csv) {
        let rows: Vec<Vec<String>> = rep
            .eigen
            .iter()
            .map(|r| {
                vec![
                    fmt_num(r.theta),
                    fmt_num(r.residual.lower),
                    fmt_num(r.residual.upper),
                    fmt_num(r.seminorm.lower),
                    fmt_num(r.seminorm.upper),
                ]
            })
            .collect();
        let header = ["theta", "residual_lo", "residual_hi", "seminorm_lo", "seminorm_hi"].map(String::from);
        report::write_csv_records(&a.common.path("quotient.csv")?, &header, &rows)?;
    }
    println!("quotient: {exact}/{} eigen residuals exactly zero, {} resolvent solves", a.grid, rep.resolvent.len());
    Ok(())
}

fn cmd_analytic(a: &AnalyticArgs) -> Result<()> {
    a.common.validate()?;
    let mut f = OperatorSymbol::polynomial(parse_list(&a.coeffs)?);
    let mut scale = 1.0;
    if a.rescale {
        let (c, scaled) = analytic::corollary_rescale(&f, a.margin)?;
        println!("rescaled by c = {c}");
        scale = c;
        f = scaled;
    }
    let opts = PipelineOptions { margin: a.margin, a_target: a.a_target, ..Default::default() };
    let hyp = analytic::hypothesis_check(&f)?;
    if !hyp.holds() {
        return Err(Error::Hypothesis(format!(
            "cannot certify the covering hypothesis: min |f| on the circle in {}, verdict {:?}",
            hyp.min_modulus, hyp.verdict
        )));
    }
    let params = analytic::pipeline_params(&f, opts)?;
    let r = a.r.unwrap_or(1.01 * params.r0);
    let y = parse_target(&a.target)?;
    let run = analytic::analytic_mixing_chain(&f, r, &y, a.m_max, opts)?;
    if a.common.wants(Format::Json) {
        #[derive(Serialize)]
        struct Params<'a> {
            hypothesis: &'a analytic::HypothesisReport,
            rescale: f64,
            #[serde(rename = "R")]
            r: f64,
            ab: f64,
            params: &'a analytic::PipelineParams,
        }
        let p = Params { hypothesis: &hyp, rescale: scale, r, ab: run.params.ab(), params: &run.params };
        report::write_json(&a.common.path("analytic-params.json")?, &p)?;
    }
    println!(
        "analytic: R1 = {}, n0 = {}, a = {}, b = {}, ab = {}, R0 = {}",
        run.params.r1,
        run.params.n0,
        run.params.a,
        run.params.b,
        run.params.ab(),
        run.params.r0
    );
    let ok = emit_certificate(&a.common, "analytic", &run.certificate, &format!("R·f(B), R = {r}"))?;
    verification_failed(ok)
}

fn cmd_product(a: &ProductArgs) -> Result<()> {
    a.common.validate()?;
    let lambda = parse_complex(&a.lambda)?;
    let y = parse_target(&a.target)?;
    let v0 = GeomSequence::geometric(C64::new(1.0, 0.0), C64::new(1.0, 0.0))?;
    let cert = product::kernel_product_chain(lambda, &y, a.n_max, &v0)?;
    let ok = emit_certificate(&a.common, "product-chain", &cert, &format!("λB∘P∘S, λ = {lambda}"))?;
    let family = product::separated_family(a.k, Execution::available())?;
    let dist = Execution::available().map_range(family.len(), |i| {
        family.iter().map(|b| family[i].distance(b)).collect::<Vec<_>>()
    });
    let in_kernel = family.iter().all(|m| product::product_apply(lambda, m).is_zero());
    if a.common.wants(Format::Json) {
        report::write_json(&a.common.path("product-family.json")?, &family)?;
    }
    if a.common.wants(Format::Csv) {
        let header: Vec<String> = (0..family.len()).map(|j| format!("b{j}")).collect();
        let rows: Vec<Vec<String>> =
            dist.iter().map(|row| row.iter().map(|d| format!("[{},{}]", d.lower, d.upper)).collect()).collect();
        report::write_csv_records(&a.common.path("product-distances.csv")?, &header, &rows)?;
    }
    let separated = dist
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, d)| i == j || *d == CertifiedInterval::exact(1.0)));
    println!(
        "product family: {} kernel vectors (all in kernel: {in_kernel}, pairwise distance exactly 1: {separated})",
        family.len()
    );
    verification_failed(ok && in_kernel && separated)
}

fn configure_threads() {
    if let Some(n) = std::env::var("SHIFTLAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        exec::configure_threads(n);
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::MixingChain(a) => cmd_mixing_chain(a),
        Command::ThresholdScan(a) => cmd_threshold_scan(a),
        Command::RangeWitness(a) => cmd_range_witness(a),
        Command::Quotient(a) => cmd_quotient(a),
        Command::Analytic(a) => cmd_analytic(a),
        Command::Product(a) => cmd_product(a),
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
