mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use nrmi_core::{
    crm_moment, normalize, replicate_rng, run_berry_esseen, run_clt, run_fclt, run_figure1, run_quantile, run_slln,
    sample_crm_ferguson_klass, va_moments, variance_integral_ia, BaseMeasure, ExperimentConfig, ExperimentResult,
    LevyFamily, Moment, TruncationSpec,
};

const OUT_ENV: &str = "NRMI_LAB_OUT";

#[derive(Parser)]
#[command(name = "nrmi-lab", version, about = "Simulate normalized random measures and check their large-a limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one CRM and its normalization and write both as CSV.
    Sample(Common),
    /// Print τ_k, CRM moments and moments of V_a.
    Moments(Common),
    /// Print the variance integral I_a and Var P(A) = H(A)(1 − H(A))·I_a.
    Variance(Common),
    /// Print the hypothesis report for a family.
    Validate(Common),
    /// Strong law and Glivenko–Cantelli distances.
    Slln(Common),
    /// Covariance of the scaled partition statistics against Σ.
    Clt(Common),
    /// Covariance of the scaled CDF process against the bridge.
    Fclt(Common),
    /// KS distance rate in a.
    BerryEsseen(Common),
    /// Histograms of the fixed linear combination with the normal overlay.
    Figure1(Common),
    /// Scaled quantile process covariance.
    Quantile(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// dirichlet, gdir:G, stable:S, nig or ngg:S:T
    #[arg(long)]
    family: Option<LevyFamily>,
    /// Concentration parameter; repeat for several values.
    #[arg(long = "a")]
    a: Vec<f64>,
    #[arg(long)]
    reps: Option<usize>,
    /// fixed:T, adaptive or adaptive:EPS, optionally suffixed with :drop
    #[arg(long)]
    trunc: Option<TruncationSpec>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory; NRMI_LAB_OUT takes precedence.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated evaluation grid, or quantile levels.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Comma-separated partition cut points.
    #[arg(long, value_delimiter = ',')]
    cuts: Option<Vec<f64>>,
    /// Comma-separated coefficient vector; repeat for several.
    #[arg(long)]
    coeffs: Vec<String>,
    /// uniform or normal:M:S
    #[arg(long)]
    base: Option<BaseMeasure>,
    /// JSON experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn parse_vector(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| usage(format!("bad number {t:?} in {text:?}: {e}"))))
        .collect()
}

impl Common {
    fn out_dir(&self) -> Option<PathBuf> {
        std::env::var_os(OUT_ENV).map(PathBuf::from).or_else(|| self.out.clone())
    }

    fn family(&self) -> Result<LevyFamily> {
        self.family.clone().ok_or_else(|| usage("--family is required"))
    }

    fn single_a(&self) -> Result<f64> {
        match self.a.as_slice() {
            [a] => Ok(*a),
            [] => Err(usage("--a is required")),
            _ => Err(usage("this command takes a single --a")),
        }
    }

    fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| usage("--seed is required; runs are never seeded from the clock"))
    }

    /// Resolve an experiment config from `--config` plus flag overrides.
    fn experiment(&self, figure1: bool) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ExperimentConfig::from_json(&text).map_err(|e| usage(e.to_string()))?
            }
            None => {
                let family = self.family()?;
                let seed = self.seed()?;
                if figure1 {
                    ExperimentConfig::figure1(family, seed)
                } else {
                    if self.a.is_empty() {
                        return Err(usage("--a is required"));
                    }
                    let reps = self.reps.ok_or_else(|| usage("--reps is required"))?;
                    ExperimentConfig::new(family, self.a.clone(), reps, seed)
                }
            }
        };
        if let Some(f) = &self.family {
            cfg.family = f.clone();
        }
        if !self.a.is_empty() {
            cfg.a_list = self.a.clone();
        }
        if let Some(r) = self.reps {
            cfg.replicates = r;
        }
        if let Some(t) = self.trunc {
            cfg.truncation = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(g) = &self.grid {
            cfg.grid = Some(g.clone());
        }
        if let Some(c) = &self.cuts {
            cfg.cuts = Some(c.clone());
        }
        if !self.coeffs.is_empty() {
            cfg.coefficients = self.coeffs.iter().map(|c| parse_vector(c)).collect::<Result<_>>()?;
        }
        if let Some(b) = &self.base {
            cfg.base = b.clone();
        }
        Ok(cfg)
    }
}

fn moment_text(m: Moment) -> String {
    match m.finite() {
        Some(v) => format!("{v:.10}"),
        None => "divergent".into(),
    }
}

fn cmd_sample(c: &Common) -> Result<()> {
    let family = c.family()?;
    let a = c.single_a()?;
    let seed = c.seed()?;
    let trunc = c.trunc.unwrap_or(TruncationSpec::fixed(nrmi_core::experiments::DEFAULT_TRUNCATION));
    let base = c.base.clone().unwrap_or_default();
    let mut rng = replicate_rng(seed, 0);
    let mu = sample_crm_ferguson_klass(&family, a, &base, &trunc, &mut rng)?.with_seed(seed);
    let p = normalize(&mu)?;
    println!(
        "a={a}: {} atoms ({} from the series), total mass {:.6}, leftover bound {:.3e}, largest weight {:.6}",
        mu.atoms().len(),
        mu.series_len(),
        mu.total_mass(),
        mu.truncation().leftover_bound,
        p.max_weight()
    );
    if let Some(dir) = c.out_dir() {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        mu.write_csv(fs::File::create(dir.join("crm.csv"))?)?;
        p.write_csv(fs::File::create(dir.join("measure.csv"))?)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}

fn cmd_moments(c: &Common) -> Result<()> {
    let family = c.family()?;
    println!("family {family}");
    for k in 1..=4 {
        println!("tau_{k} = {}", moment_text(family.tau(k)?));
    }
    for k in 1..=3 {
        println!("tau_tilde_{k} = {}", moment_text(family.tau_tilde(k)?));
    }
    println!("E[mu(A)^p] for a unit block:");
    println!("{:>6} {:>16} {:>16} {:>16} {:>16}", "H(A)", "p=1", "p=2", "p=3", "p=4");
    for h in [0.1, 0.3, 0.5, 0.9] {
        let cells: Vec<String> = (1..=4)
            .map(|p| crm_moment(&family, p, h).map_or_else(|_| "divergent".into(), |v| format!("{v:.10}")))
            .collect();
        println!("{h:>6} {:>16} {:>16} {:>16} {:>16}", cells[0], cells[1], cells[2], cells[3]);
    }
    for &a in &c.a {
        let m = va_moments(&family, a)?;
        println!("a={a}: E[V_a] = {:.6}, E[V_a^2] = {:.6}, E[V_a^3] = {:.6}", m.m1, m.m2, m.m3);
    }
    Ok(())
}

fn cmd_variance(c: &Common) -> Result<()> {
    let family = c.family()?;
    if c.a.is_empty() {
        return Err(usage("--a is required"));
    }
    for &a in &c.a {
        let ia = variance_integral_ia(&family, a)?;
        println!("a={a}: I_a = {ia:.6}");
        let row: Vec<String> =
            [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|h: &f64| format!("H={h}: {:.6}", h * (1.0 - h) * ia)).collect();
        println!("  Var P(A): {}", row.join("  "));
    }
    Ok(())
}

fn cmd_validate(c: &Common) -> Result<()> {
    let report = c.family()?.validate();
    for (k, v) in report.to_record() {
        println!("{k} = {v}");
    }
    if let Some(dir) = c.out_dir() {
        fs::create_dir_all(&dir)?;
        fs::write(dir.join("validation.json"), serde_json::to_string_pretty(&report.to_json())? + "\n")?;
    }
    Ok(())
}

/// Statistics printed in the per-a summary line.
fn summary_keys(suite: &str) -> &'static [&'static str] {
    match suite {
        "slln" => &["sup_distance_mean", "metric_mean", "max_weight_mean"],
        "clt" => &["max_abs_dev", "frobenius", "combo_1_ks"],
        "fclt" | "quantile" => &["max_abs_dev"],
        _ => &["ks"],
    }
}

fn report(res: &ExperimentResult, out: Option<&Path>) -> Result<bool> {
    let suite = res.metadata.suite.as_str();
    for &a in &res.metadata.config.a_list {
        let parts: Vec<String> =
            summary_keys(suite).iter().filter_map(|k| res.aggregate(a, k).map(|v| format!("{k}={v:.5}"))).collect();
        println!("{suite} a={a}: {}", parts.join(", "));
    }
    for row in res.rows.iter().filter(|r| r.a.is_none()) {
        println!("{suite}: {}={:.5}", row.statistic, row.value);
    }
    for check in &res.metadata.checks {
        println!("{} {}: {}", if check.passed { "ok" } else { "FAILED" }, check.name, check.detail);
    }
    if let Some(dir) = out {
        res.write_to_dir(dir).with_context(|| format!("writing results to {}", dir.display()))?;
        if !res.histograms.is_empty() {
            let path = dir.join(format!("{suite}.svg"));
            svg::emit_svg_density(&res.histograms, &res.limit_curve, &path)?;
        }
        println!("wrote {}", dir.display());
    }
    Ok(res.passed())
}

fn run(cli: Cli) -> Result<bool> {
    type Suite = fn(&ExperimentConfig) -> nrmi_core::Result<ExperimentResult>;
    let (common, suite): (&Common, Suite) = match &cli.command {
        Command::Sample(c) => return cmd_sample(c).map(|_| true),
        Command::Moments(c) => return cmd_moments(c).map(|_| true),
        Command::Variance(c) => return cmd_variance(c).map(|_| true),
        Command::Validate(c) => return cmd_validate(c).map(|_| true),
        Command::Slln(c) => (c, run_slln),
        Command::Clt(c) => (c, run_clt),
        Command::Fclt(c) => (c, run_fclt),
        Command::BerryEsseen(c) => (c, run_berry_esseen),
        Command::Figure1(c) => (c, run_figure1),
        Command::Quantile(c) => (c, run_quantile),
    };
    let cfg = common.experiment(matches!(cli.command, Command::Figure1(_)))?;
    let res = suite(&cfg)?;
    report(&res, common.out_dir().as_deref())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return 2;
        }
        if cause.is::<std::io::Error>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<nrmi_core::Error>() {
            return match e {
                nrmi_core::Error::Io(_) | nrmi_core::Error::Csv(_) | nrmi_core::Error::Json(_) => 3,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
