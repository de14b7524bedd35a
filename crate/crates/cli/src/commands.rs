//! Implementations of the four subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use equimetric::{
    integrate, run_sweep, run_verification, smd_derivative_check, FlowSpec, GroupElement,
    InitialState, MeasurementVector, RateFn, RateOverrides, SweepConfig,
};

use crate::config::{self, FlowConfig};
use crate::manifest::RunManifest;
use crate::plot;
use crate::{Cli, Failure, FlowArgs, SweepArgs, TransformArgs, VerifyArgs, EXIT_VERIFY_FAILED};

fn out_dir(cli: &Cli) -> Result<PathBuf, Failure> {
    let dir = cli
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_text(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body)?;
    Ok(())
}

pub fn transform(cli: &Cli, args: &TransformArgs) -> Result<u8, Failure> {
    let group = GroupElement::new(args.gamma, args.omega)?;
    let input = MeasurementVector::new(args.tau, args.sigma_e)?;
    let transformed = group.apply(&input);
    let generator = group.log();

    let manifest = RunManifest::new(
        "transform",
        serde_json::json!({
            "gamma": args.gamma,
            "omega": args.omega,
            "tau": args.tau,
            "sigma_e": args.sigma_e,
        }),
        cli.seed.unwrap_or(0),
    );
    let body = serde_json::json!({
        "group": { "gamma": group.gamma(), "omega": group.omega() },
        "input": { "tau": input.tau(), "sigma_e": input.sigma_e(), "anchor": input.anchor() },
        "transformed": {
            "tau": transformed.tau(),
            "sigma_e": transformed.sigma_e(),
            "anchor": transformed.anchor(),
        },
        "generator": {
            "scale_rate": generator.scale_rate(),
            "translation_rate": generator.translation_rate(),
        },
        "manifest": manifest,
    });
    println!("{}", serde_json::to_string_pretty(&body).expect("serializable"));
    Ok(0)
}

pub fn flow(cli: &Cli, args: &FlowArgs) -> Result<u8, Failure> {
    let mut cfg = FlowConfig::default();
    if let Some(path) = &args.from_manifest {
        cfg = RunManifest::load(path)?.config_as()?;
    }
    if let Some(v) = args.gamma {
        cfg.gamma = v;
    }
    if let Some(v) = args.omega {
        cfg.omega = v;
    }
    if let Some(v) = args.steps {
        cfg.steps = v;
    }
    if let Some(v) = &args.break_mean_rate {
        cfg.break_mean_rate = Some(v.clone());
    }
    if let Some(v) = &args.break_var_rate {
        cfg.break_var_rate = Some(v.clone());
    }
    for (slot, flag) in [
        (&mut cfg.mu1, args.mu1),
        (&mut cfg.mu2, args.mu2),
        (&mut cfg.tau_sd1, args.tau_sd1),
        (&mut cfg.tau_sd2, args.tau_sd2),
        (&mut cfg.err_sd1, args.err_sd1),
        (&mut cfg.err_sd2, args.err_sd2),
    ] {
        if let Some(v) = flag {
            *slot = v;
        }
    }

    let overrides = RateOverrides {
        mean_p1: cfg
            .break_mean_rate
            .as_deref()
            .map(RateFn::parse)
            .transpose()?,
        error_p1: cfg
            .break_var_rate
            .as_deref()
            .map(RateFn::parse)
            .transpose()?,
        ..Default::default()
    };
    let spec = if overrides.is_empty() {
        FlowSpec::symmetric(cfg.gamma, cfg.omega)?
    } else {
        FlowSpec::broken(cfg.gamma, cfg.omega, overrides)?
    };
    let initial = InitialState {
        mu1: cfg.mu1,
        mu2: cfg.mu2,
        tau_sd1: cfg.tau_sd1,
        tau_sd2: cfg.tau_sd2,
        err_sd1: cfg.err_sd1,
        err_sd2: cfg.err_sd2,
        n1: 1,
        n2: 1,
    };
    let trace = integrate(&spec, &initial, cfg.steps)?;
    let drift = trace.max_smd_drift();
    let derivative_max = smd_derivative_check(&trace);

    let dir = out_dir(cli)?;
    let csv_path = dir.join("flow_trace.csv");
    let mut csv = Vec::new();
    trace.write_csv(&mut csv)?;
    write_text(&csv_path, std::str::from_utf8(&csv).expect("csv is utf-8"))?;
    let manifest = RunManifest::new("flow", &cfg, cli.seed.unwrap_or(0));
    manifest.write(&dir.join("flow_trace.manifest.json"))?;

    if cli.json {
        let body = serde_json::json!({
            "max_smd_drift": drift,
            "smd_derivative_max": derivative_max,
            "trace_csv": csv_path,
            "manifest": manifest,
        });
        println!("{}", serde_json::to_string_pretty(&body).expect("serializable"));
    } else {
        println!("max_smd_drift = {drift:e}");
        println!("smd_derivative_max = {derivative_max:e}");
        println!("trace written to {}", csv_path.display());
    }
    Ok(0)
}

pub fn sweep(cli: &Cli, args: &SweepArgs) -> Result<u8, Failure> {
    let mut cfg = SweepConfig::default();
    if let Some(path) = &args.from_manifest {
        cfg = RunManifest::load(path)?.config_as()?;
    }
    if let Some(path) = &args.config {
        let pairs = config::parse_key_values(&config::read_to_string(path)?)?;
        config::apply_sweep_pairs(&mut cfg, &pairs)?;
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    for (slot, flag) in [
        (&mut cfg.mu1, args.mu1),
        (&mut cfg.sd1, args.sd1),
        (&mut cfg.mu2, args.mu2),
        (&mut cfg.sd2, args.sd2),
        (&mut cfg.gamma, args.gamma),
        (&mut cfg.k_start, args.k_start),
        (&mut cfg.k_end, args.k_end),
        (&mut cfg.k_step, args.k_step),
    ] {
        if let Some(v) = flag {
            *slot = v;
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;

    let result = run_sweep(&cfg)?;
    let dir = out_dir(cli)?;
    let csv_path = dir.join("sweep.csv");
    let json_path = dir.join("sweep.json");
    let mut csv = Vec::new();
    result.write_csv(&mut csv)?;
    write_text(&csv_path, std::str::from_utf8(&csv).expect("csv is utf-8"))?;
    write_text(
        &json_path,
        &(result.to_json().expect("serializable") + "\n"),
    )?;
    let manifest = RunManifest::new("sweep", cfg, cfg.seed);
    manifest.write(&dir.join("sweep.manifest.json"))?;
    let svg_path = if args.plot {
        let path = dir.join("sweep.svg");
        write_text(&path, &plot::sweep_chart(&result))?;
        Some(path)
    } else {
        None
    };

    let max_deviation = result
        .rows
        .iter()
        .map(|r| r.deviation)
        .fold(0.0_f64, f64::max);
    if cli.json {
        let body = serde_json::json!({
            "baseline": result.baseline,
            "rows": result.rows.len(),
            "max_deviation": max_deviation,
            "csv": csv_path,
            "json": json_path,
            "svg": svg_path,
            "manifest": manifest,
        });
        println!("{}", serde_json::to_string_pretty(&body).expect("serializable"));
    } else {
        println!("baseline smd = {}", result.baseline);
        println!(
            "rows = {}, max deviation = {max_deviation:e}",
            result.rows.len()
        );
        println!("csv written to {}", csv_path.display());
        println!("json written to {}", json_path.display());
        if let Some(path) = svg_path {
            println!("svg written to {}", path.display());
        }
    }
    Ok(0)
}

pub fn verify(cli: &Cli, args: &VerifyArgs) -> Result<u8, Failure> {
    let seed = cli.seed.unwrap_or(42);
    let report = run_verification(args.n, seed)?;
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        );
    } else {
        println!(
            "{:<28} {:>13} {:>13}  status",
            "check", "measured", "tolerance"
        );
        for check in &report.checks {
            println!(
                "{:<28} {:>13.4e} {:>13.4e}  {}",
                check.name,
                check.measured,
                check.tolerance,
                if check.passed { "PASS" } else { "FAIL" }
            );
        }
    }
    Ok(if report.all_passed() {
        0
    } else {
        EXIT_VERIFY_FAILED
    })
}
