//! Command-line driver: evaluate kernels, run transforms, means, moduli and
//! verification checks; emit CSV/JSON artifacts.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{parse_complex, parse_grid, RunConfig};
use damek_ricci::ineqlab::{
    default_families, rows_to_csv, run_check_in, CheckId, FamilySpec, GridSpec, LabContext,
    LabSummary,
};
use damek_ricci::meanop::{decay_profile, mean_operator_bound, modulus_of_continuity, spherical_mean, MeanConfig};
use damek_ricci::norms::LorentzIndex;
use damek_ricci::specfun::{c_function, phi_dr, plancherel_density, SpectralPoint};
use damek_ricci::transforms::{PlanConfig, RadialProfile, TransformPlan};
use damek_ricci::SpaceParams;

#[derive(Parser)]
#[command(name = "drlab", version, about = "Numerical harmonic analysis on Damek-Ricci spaces")]
struct Cli {
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Dimension of the v-part (even, positive).
    #[arg(long, global = true)]
    m: Option<u32>,
    /// Dimension of the centre (0, or 1 with m = 2).
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Seed for randomized components.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Spectral truncation.
    #[arg(long, global = true)]
    xi_max: Option<f64>,
    /// Grid refinement multiplier.
    #[arg(long, global = true)]
    refine: Option<usize>,
    /// Output directory for artifact files.
    #[arg(long, global = true)]
    output: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Profile family: gauss | bump | powertail.
    #[arg(long, default_value = "gauss")]
    family: String,
    /// Gauss width / bump support / powertail exponent b.
    #[arg(long, default_value_t = 1.0)]
    param: f64,
    /// Lebesgue class p (powertail only).
    #[arg(long, default_value_t = 4.0 / 3.0)]
    class_p: f64,
}

impl FamilyArgs {
    fn spec(&self, count: usize) -> Result<FamilySpec> {
        Ok(match self.family.as_str() {
            "gauss" => FamilySpec::gauss(self.param, count),
            "bump" => FamilySpec::bump(self.param, count),
            "powertail" => FamilySpec::powertail(self.param, self.class_p, count),
            other => bail!("unknown family '{other}'"),
        })
    }

    fn single_profile(&self, space: &SpaceParams, refine: usize) -> Result<RadialProfile> {
        let spec = self.spec(1)?;
        let members = damek_ricci::ineqlab::make_family(&spec, space, refine)?;
        Ok(members.into_iter().next().expect("count = 1").profile)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the spherical function phi_lambda(a_t).
    Phi {
        /// Spectral parameter, e.g. 1.5+0.2i
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        t: f64,
    },
    /// Evaluate the c-function of the space's Jacobi analysis at mu.
    Cfun {
        /// Jacobi-scale spectral argument (mu = 2 lambda), e.g. 3-0.5i
        #[arg(long)]
        mu: String,
    },
    /// Evaluate the Plancherel density |c(mu)|^-2 on the real line.
    Density {
        #[arg(long)]
        mu: f64,
    },
    /// Forward spherical transform of a built-in profile; writes spectral CSV.
    Transform {
        #[command(flatten)]
        family: FamilyArgs,
        /// Imaginary offset of the spectral line.
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
    },
    /// Roundtrip: forward then inverse transform; writes both CSV files.
    Invert {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Spherical mean M_t of a profile; writes the profile CSV.
    Mean {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        t: f64,
    },
    /// Spherical modulus of continuity Omega_{p,q}[f](r).
    Modulus {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// Decay table of the mean operator bound; writes t,bound,norm,ratio CSV.
    Decay {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// t grid as start:stop:count
        #[arg(long, default_value = "2:10:17")]
        t_grid: String,
    },
    /// Run one catalog check or `all`; writes rows CSV and a JSON summary.
    Verify {
        /// Check id (R1, HY2, ...) or `all`.
        id: String,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        param: f64,
        #[arg(long, default_value_t = 4.0 / 3.0)]
        class_p: f64,
    },
    /// Tabulate phi / density / bound / contraction over grids; writes
    /// plot-ready CSV.
    Sweep {
        /// What to sweep: phi | density | bound | contraction.
        #[arg(long, default_value = "phi")]
        what: String,
        #[command(flatten)]
        family: FamilyArgs,
        /// xi grid start:stop:count
        #[arg(long, default_value = "0:10:41")]
        xi: String,
        /// eta offset for phi sweeps
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        /// t grid start:stop:count
        #[arg(long, default_value = "0.5:8:16")]
        t_grid: String,
        /// p for bound sweeps
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let final_path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, &final_path)?;
    Ok(final_path)
}

fn effective(cli: &Cli) -> Result<(RunConfig, SpaceParams)> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(m) = cli.m {
        cfg.space.m = m;
    }
    if let Some(k) = cli.k {
        cfg.space.k = k;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(x) = cli.xi_max {
        cfg.xi_max = x;
    }
    if let Some(r) = cli.refine {
        cfg.refine = r.max(1);
    }
    if let Some(o) = &cli.output {
        cfg.output = o.clone();
    }
    let space = SpaceParams::new(cfg.space.m, cfg.space.k)?;
    Ok((cfg, space))
}

fn plan_for(
    space: &SpaceParams,
    cfg: &RunConfig,
    r_max: f64,
    eta: f64,
    calibrate: bool,
) -> Result<TransformPlan> {
    let mut plan = TransformPlan::new(
        space,
        PlanConfig {
            r_max,
            xi_max: cfg.xi_max,
            eta,
            refine: cfg.refine,
        },
    )?;
    if calibrate {
        plan.calibrate()?;
    }
    Ok(plan)
}

/// Errors that reflect bad input rather than a failed verification.
fn is_input_error(e: &anyhow::Error) -> bool {
    if let Some(de) = e.downcast_ref::<damek_ricci::Error>() {
        matches!(
            de,
            damek_ricci::Error::InvalidArgument(_)
                | damek_ricci::Error::UnsupportedInstance { .. }
                | damek_ricci::Error::DivergentRegime(_)
                | damek_ricci::Error::OutsideCertifiedDomain { .. }
        )
    } else {
        // config parse errors, bad literals, unknown tokens
        true
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_input_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let (cfg, space) = effective(cli)?;
    let out_dir = PathBuf::from(&cfg.output);
    match &cli.command {
        Command::Phi { lambda, t } => {
            let lam = parse_complex(lambda)?;
            let v = phi_dr(&space, SpectralPoint::new(lam.re, lam.im), *t)?;
            println!("{:.15e}{:+.15e}i", v.re, v.im);
            Ok(true)
        }
        Command::Cfun { mu } => {
            let m = parse_complex(mu)?;
            let v = c_function(&space.jacobi_params(), SpectralPoint::new(m.re, m.im))?;
            println!("{:.15e}{:+.15e}i", v.re, v.im);
            Ok(true)
        }
        Command::Density { mu } => {
            let v = plancherel_density(&space.jacobi_params(), *mu);
            println!("{v:.15e}");
            Ok(true)
        }
        Command::Transform { family, eta } => {
            let profile = family.single_profile(&space, cfg.refine)?;
            let plan = plan_for(&space, &cfg, profile.r_max(), *eta, false)?;
            let spectrum = plan.forward(&profile)?;
            let csv = plan.spectral().to_csv(&spectrum);
            let path = write_atomic(&out_dir, "spectrum.csv", &csv)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Invert { family } => {
            let profile = family.single_profile(&space, cfg.refine)?;
            let plan = plan_for(&space, &cfg, profile.r_max(), 0.0, true)?;
            let spectrum = plan.forward(&profile)?;
            let rec = plan.inverse_profile(&spectrum, *profile.decay_class())?;
            write_atomic(&out_dir, "spectrum.csv", &plan.spectral().to_csv(&spectrum))?;
            let path = write_atomic(&out_dir, "profile.csv", &rec.to_csv())?;
            let meta = serde_json::to_string_pretty(&rec.meta())?;
            write_atomic(&out_dir, "profile.meta.json", &meta)?;
            let mut err = 0.0f64;
            let mut scale = 0.0f64;
            for ((a, b), w) in rec
                .values()
                .iter()
                .zip(profile.values())
                .zip(profile.measure_weights())
            {
                err += (a - b).norm_sqr() * w;
                scale += b.norm_sqr() * w;
            }
            println!(
                "wrote {} (roundtrip rel L2 = {:.3e})",
                path.display(),
                (err / scale).sqrt()
            );
            Ok(true)
        }
        Command::Mean { family, t } => {
            let profile = family.single_profile(&space, cfg.refine)?;
            let plan = plan_for(&space, &cfg, profile.r_max(), 0.0, true)?;
            let mt = spherical_mean(&plan, &profile, *t)?;
            let path = write_atomic(&out_dir, "mean.csv", &mt.to_csv())?;
            let meta = serde_json::to_string_pretty(&mt.meta())?;
            write_atomic(&out_dir, "mean.meta.json", &meta)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Modulus { family, p, q, r } => {
            let profile = family.single_profile(&space, cfg.refine)?;
            let plan = plan_for(&space, &cfg, profile.r_max(), 0.0, true)?;
            let idx = LorentzIndex::new(*p, *q)?;
            let omega = modulus_of_continuity(&plan, &profile, idx, *r)?;
            println!("{omega:.12e}");
            Ok(true)
        }
        Command::Decay { p, t_grid } => {
            let grid = parse_grid(t_grid)?;
            let mc = MeanConfig::new(grid, 1).map_err(|e| anyhow!(e))?;
            let table = decay_profile(&space, *p, &mc)?;
            let path = write_atomic(&out_dir, "decay.csv", &table.to_csv())?;
            println!(
                "wrote {} (compensated spread {:.4}, log-log slope {:.4})",
                path.display(),
                table.compensated_spread(),
                table.log_slope()
            );
            Ok(true)
        }
        Command::Verify {
            id,
            family,
            param,
            class_p,
        } => {
            let grids = GridSpec {
                xi_max: cfg.xi_max,
                refine: cfg.refine,
                seed: cfg.seed,
                r0: cfg.r0,
            };
            let ctx = LabContext::new(&space, grids);
            let ids: Vec<CheckId> = if id.eq_ignore_ascii_case("all") {
                CheckId::ALL.to_vec()
            } else {
                vec![id.parse::<CheckId>()?]
            };
            let mut rows = Vec::new();
            let mut reports = Vec::new();
            for cid in ids {
                let families = match family {
                    Some(name) => vec![FamilyArgs {
                        family: name.clone(),
                        param: *param,
                        class_p: *class_p,
                    }
                    .spec(1)?],
                    None => default_families(cid),
                };
                let mut family_reports = Vec::new();
                for fs in families {
                    let run = run_check_in(&ctx, cid, &fs)?;
                    rows.extend(run.rows);
                    family_reports.push(run.report);
                }
                let worst = family_reports
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.ratio.total_cmp(&b.1.ratio))
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                let mut merged = family_reports[worst].clone();
                merged.pass = family_reports.iter().all(|r| r.pass);
                merged.constant_estimate = family_reports
                    .iter()
                    .map(|r| r.constant_estimate)
                    .fold(f64::NEG_INFINITY, f64::max);
                merged.refinement_drift = family_reports
                    .iter()
                    .map(|r| r.refinement_drift)
                    .fold(0.0, f64::max);
                merged.family = family_reports
                    .iter()
                    .map(|r| r.family.clone())
                    .collect::<Vec<_>>()
                    .join("+");
                println!(
                    "{}: ratio {:.6}, constant {:.6}, drift {:.3e} -> {}",
                    merged.check_id,
                    merged.ratio,
                    merged.constant_estimate,
                    merged.refinement_drift,
                    if merged.pass { "pass" } else { "FAIL" }
                );
                reports.push(merged);
            }
            let summary = LabSummary {
                schema_version: 1,
                space: space.tag(),
                seed: cfg.seed,
                checks: reports,
            };
            write_atomic(&out_dir, "verify_rows.csv", &rows_to_csv(&rows))?;
            let path = write_atomic(&out_dir, "verify_summary.json", &summary.to_json())?;
            println!("wrote {}", path.display());
            Ok(summary.all_pass())
        }
        Command::Sweep {
            what,
            family,
            xi,
            eta,
            t_grid,
            p,
        } => {
            let xis = parse_grid(xi)?;
            let ts = parse_grid(t_grid)?;
            let csv = match what.as_str() {
                "phi" => {
                    let mut out = String::from("xi,eta,t,re,im\n");
                    for &x in &xis {
                        for &t in &ts {
                            let v = phi_dr(&space, SpectralPoint::new(x, *eta), t)?;
                            out.push_str(&format!(
                                "{x:.12e},{eta:.12e},{t:.12e},{:.12e},{:.12e}\n",
                                v.re, v.im
                            ));
                        }
                    }
                    out
                }
                "density" => {
                    let jp = space.jacobi_params();
                    let mut out = String::from("mu,density\n");
                    for &x in &xis {
                        out.push_str(&format!("{x:.12e},{:.12e}\n", plancherel_density(&jp, x)));
                    }
                    out
                }
                "bound" => {
                    let mut out = String::from("t,bound\n");
                    for &t in &ts {
                        out.push_str(&format!(
                            "{t:.12e},{:.12e}\n",
                            mean_operator_bound(&space, *p, t)?
                        ));
                    }
                    out
                }
                "contraction" => {
                    // t,bound,norm,ratio with norm = ||M_t f||_p / ||f||_p.
                    use damek_ricci::norms::lp_norm;
                    let profile = family.single_profile(&space, cfg.refine)?;
                    let plan = plan_for(&space, &cfg, profile.r_max(), 0.0, true)?;
                    let grid = profile.weighted_grid();
                    let base = lp_norm(&profile.magnitudes(), &grid, *p);
                    let mut out = String::from("t,bound,norm,ratio\n");
                    for &t in &ts {
                        let bound = mean_operator_bound(&space, *p, t)?;
                        let mt = spherical_mean(&plan, &profile, t)?;
                        let norm = lp_norm(&mt.magnitudes(), &grid, *p) / base;
                        out.push_str(&format!(
                            "{t:.12e},{bound:.12e},{norm:.12e},{:.12e}\n",
                            norm / bound
                        ));
                    }
                    out
                }
                other => bail!("unknown sweep target '{other}'"),
            };
            let path = write_atomic(&out_dir, "sweep.csv", &csv)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
    }
}
