use std::io::Write;

use serde::Serialize;

use metriq::montecarlo::SimulationRecord;
use metriq::tomography::exact_responses;
use metriq::{
    apply, build_dilation, build_pt_system, chained_success_probability, default_design, g_eta,
    normalize_metric, reconstruct, run_prover, simulate_g_eta as sim_g_eta, simulate_pt as sim_pt,
    threshold, verify as verify_channel, ComplexMatrix, MetricJson, RngStream, Verdict,
};

use crate::config::{load, resolve_seed, resolve_shots, GEtaConfig, PtConfig, VerifyConfig};
use crate::{CliError, CommonArgs, Format, EXIT_DOMAIN, EXIT_REJECT};

fn emit(args: &CommonArgs, body: &str) -> Result<(), CliError> {
    match &args.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Fixed-width scientific notation, 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct MetricReport {
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subidentity: Option<bool>,
    /// Qutrit unitary dilating `η/‖η‖`, for qubit metrics.
    #[serde(skip_serializing_if = "Option::is_none")]
    dilation: Option<ComplexMatrix>,
}

pub fn metric_validate(args: &CommonArgs) -> Result<u8, CliError> {
    let json: MetricJson = load(&args.config)?;
    let (report, code) = match json.to_metric() {
        Ok(eta) => {
            let dilation = if eta.dim() == 2 {
                let (eta_tilde, _) = normalize_metric(&eta);
                Some(build_dilation(&eta_tilde, 0.0)?.matrix)
            } else {
                None
            };
            let report = MetricReport {
                valid: true,
                error: None,
                eigenvalues: Some(eta.eigenvalues().to_vec()),
                norm: Some(eta.norm()),
                subidentity: Some(eta.is_subidentity()),
                dilation,
            };
            (report, 0)
        }
        Err(e) => {
            let report = MetricReport {
                valid: false,
                error: Some(e.to_string()),
                eigenvalues: None,
                norm: None,
                subidentity: None,
                dilation: None,
            };
            (report, EXIT_DOMAIN)
        }
    };
    let body = match args.format {
        Some(Format::Json) => to_json(&report),
        Some(Format::Csv) => {
            let mut s = String::from("valid,norm,subidentity,eigenvalues\n");
            if report.valid {
                let eig: Vec<String> = report.eigenvalues.iter().flatten().map(|&l| num(l)).collect();
                s += &format!(
                    "true,{},{},{}\n",
                    num(report.norm.unwrap_or(f64::NAN)),
                    report.subidentity.unwrap_or(false),
                    eig.join(";")
                );
            } else {
                s += "false,,,\n";
            }
            s
        }
        None => {
            if report.valid {
                let eig: Vec<String> = report.eigenvalues.iter().flatten().map(|l| format!("{l:.6}")).collect();
                format!(
                    "valid, eigenvalues [{}], norm {:.6}, {}\n",
                    eig.join(", "),
                    report.norm.unwrap_or(f64::NAN),
                    if report.subidentity == Some(true) { "subidentity" } else { "exceeds identity" }
                )
            } else {
                format!("invalid: {}\n", report.error.as_deref().unwrap_or(""))
            }
        }
    };
    emit(args, &body)?;
    Ok(code)
}

#[derive(Serialize)]
struct SimulationOutput<'a> {
    procedure: &'a str,
    #[serde(flatten)]
    record: &'a SimulationRecord,
    analytic_prob: f64,
    abs_error: f64,
}

fn write_simulation(
    args: &CommonArgs,
    procedure: &str,
    record: &SimulationRecord,
    analytic: f64,
) -> Result<u8, CliError> {
    let abs_error = (record.success_ratio - analytic).abs();
    let body = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => format!(
            "seed,N,total_copies,success_ratio,analytic_prob,abs_error\n{},{},{},{},{},{}\n",
            record.seed,
            record.requested_successes,
            record.total_copies_used,
            num(record.success_ratio),
            num(analytic),
            num(abs_error)
        ),
        Format::Json => to_json(&SimulationOutput {
            procedure,
            record,
            analytic_prob: analytic,
            abs_error,
        }),
    };
    emit(args, &body)?;
    Ok(0)
}

pub fn simulate_g_eta(args: &CommonArgs) -> Result<u8, CliError> {
    let cfg: GEtaConfig = load(&args.config)?;
    let seed = resolve_seed(args, cfg.seed)?;
    let shots = resolve_shots(args, cfg.shots)?;
    let eta = cfg.metric.to_metric()?;
    let record = sim_g_eta(&eta, &cfg.rho, shots, RngStream::new(seed, 0))?;
    let analytic = apply(&g_eta(&eta)?, &cfg.rho)?.trace().re;
    write_simulation(args, "g-eta", &record, analytic)
}

pub fn simulate_pt(args: &CommonArgs) -> Result<u8, CliError> {
    let cfg: PtConfig = load(&args.config)?;
    let seed = resolve_seed(args, cfg.seed)?;
    let shots = resolve_shots(args, cfg.shots)?;
    let sys = build_pt_system(cfg.hamiltonian)?;
    let record = sim_pt(&sys, &cfg.rho, cfg.t, shots, RngStream::new(seed, 0))?;
    let analytic = chained_success_probability(&sys, &cfg.rho, cfg.t)?;
    write_simulation(args, "pt", &record, analytic)
}

pub fn verify(args: &CommonArgs) -> Result<u8, CliError> {
    let cfg: VerifyConfig = load(&args.config)?;
    let eta = cfg.metric.to_metric()?;
    threshold(&eta)?;
    cfg.prover.validate()?;
    let design = default_design();
    let recon = if cfg.exact {
        reconstruct(&exact_responses(&cfg.prover, &eta, &design)?, &design)?
    } else {
        let seed = resolve_seed(args, cfg.seed)?;
        let shots = resolve_shots(args, cfg.shots)?;
        let responses = run_prover(&cfg.prover, &eta, &design, shots, RngStream::new(seed, 0))?;
        reconstruct(&responses, &design)?.with_provenance(shots, seed)
    };
    let report = verify_channel(&eta, &recon)?;
    let body = match args.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => format!(
            "distance,threshold,verdict,lambda1,lambda2,shots_per_input,seed\n{},{},{},{},{},{},{}\n",
            num(report.distance),
            num(report.threshold),
            match report.verdict {
                Verdict::Accept => "accept",
                Verdict::Reject => "reject",
            },
            num(report.eta_eigenvalues[0]),
            num(report.eta_eigenvalues[1]),
            report.shots_per_input.map(|n| n.to_string()).unwrap_or_default(),
            report.seed.map(|s| s.to_string()).unwrap_or_default()
        ),
    };
    emit(args, &body)?;
    Ok(match report.verdict {
        Verdict::Accept => 0,
        Verdict::Reject => EXIT_REJECT,
    })
}
