//! Canned end-to-end runs: the certified chain for phi = x1(x1^2 + x2^(2k))
//! and the diverging/contrasting scan for psi = x1^2 + x2^(2k).

use super::loja_cmd::{
    classical_json, envelope_csv, envelope_json, probe_csv, probe_payload, verdict_outcome,
};
use super::OutOpt;
use crate::parse;
use crate::report::{num, rat, ExitClass, Outcome};
use carleman_core::geometry::ZeroSet;
use carleman_core::lojasiewicz::{
    axis_probe, axis_psi, certify_hyperplane_product, classical_loja_fit, fit_envelope,
    growth_profile, hyperplane_product, LojaError, TestFunction, Verdict, POLYDISC_SLACK,
    VERDICT_GROWTH_FACTOR,
};
use carleman_core::weights::WeightSequence;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

const FLAT_LOCUS_NOTE: &str =
    "empty for a nonzero polynomial; the chain concerns the declared zero set only";

fn gevrey_seq(spec: &str) -> Result<(WeightSequence, Value), String> {
    let (alpha, beta) = parse::gevrey_pair(spec)?;
    let m = WeightSequence::gevrey(alpha, beta).map_err(|e| e.to_string())?;
    Ok((m, json!({"kind": "gevrey", "alpha": alpha, "beta": beta})))
}

#[derive(clap::Subcommand, Debug)]
pub enum ReproduceCmd {
    /// Constant chain for phi = x1(x1^2 + x2^(2k)): polydisc bound,
    /// Cauchy-type coefficient bound, assembled (C, sigma), envelope check
    Ex43(Ex43Args),
    /// Axis scan for psi = x1^2 + x2^(2k) plus the classical power-law fit
    Ex42(Ex42Args),
}

#[derive(clap::Args, Debug)]
pub struct Ex43Args {
    /// Even-power exponent in psi = x1^2 + x2^(2k); needs k >= 2
    #[arg(long, value_name = "K", default_value_t = 2)]
    pub k: u32,
    /// Gevrey parameters "ALPHA,BETA"
    #[arg(long, value_name = "A,B", default_value = "1,0")]
    pub gevrey: String,
    /// Distance scale inside h_M(lambda * dist)
    #[arg(long, value_name = "L", default_value = "1")]
    pub lambda: String,
    /// Highest coefficient order in the Cauchy-type step
    #[arg(long, value_name = "P", default_value_t = 40)]
    pub pmax: u32,
    /// Highest derivative order in the envelope check
    #[arg(long, value_name = "J", default_value_t = 16)]
    pub jmax: u32,
    /// Extra sigma values checked alongside the derived one
    #[arg(long, value_name = "S,...", default_value = "1,2,4,8,16")]
    pub sigma_ladder: String,
    /// One spec per axis (default: x1 in [1/64,1/2] geometric, x2 in [-1/2,1/2])
    #[arg(long = "grid", value_name = "SPEC")]
    pub grid: Vec<String>,
    /// Grid refinements for the envelope stability check
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub refine: u32,
    #[command(flatten)]
    pub out: OutOpt,
}

pub fn run_ex43(args: Ex43Args) -> Result<i32, String> {
    let emitter = args.out.emitter();
    let (mut m, seq_echo) = gevrey_seq(&args.gevrey)?;
    let lambda = parse::f64_value(&args.lambda)?;
    let sigma_ladder = parse::f64_list(&args.sigma_ladder)?;
    if sigma_ladder.is_empty() || sigma_ladder.iter().any(|&s| !(s > 0.0)) {
        return Err("sigma ladder entries must be positive".into());
    }
    if args.refine < 1 {
        return Err("need at least one refinement to judge stability".into());
    }
    let specs = if args.grid.is_empty() {
        vec!["x1:1/64:1/2:20,geom".to_string(), "x2:-1/2:1/2:20".to_string()]
    } else {
        args.grid.clone()
    };
    let grid = parse::grid_box(&specs)?;
    if grid.nvars() != 2 {
        return Err("the chain needs a two-dimensional grid".into());
    }

    let config = json!({
        "k": args.k,
        "sequence": seq_echo,
        "lambda": num(lambda),
        "p_max": args.pmax,
        "j_max": args.jmax,
        "sigma_ladder": sigma_ladder,
        "grid": specs,
        "refine": args.refine,
    });
    let thresholds = json!({
        "growth_factor": VERDICT_GROWTH_FACTOR,
        "polydisc_slack": POLYDISC_SLACK,
    });

    let cert = match certify_hyperplane_product(args.k, &mut m, lambda, &grid, args.pmax) {
        Ok(c) => c,
        Err(LojaError::StepFailed { step, detail }) => {
            let payload = json!({
                "failed_step": step,
                "detail": detail,
                "flat_locus": FLAT_LOCUS_NOTE,
            });
            return emitter.finish(
                "reproduce ex43",
                config,
                Outcome {
                    verdict: "falsified",
                    exit: ExitClass::Fail,
                    payload,
                    thresholds,
                    csv: None,
                },
            );
        }
        Err(e) => return Err(e.to_string()),
    };

    let f = TestFunction::new(hyperplane_product(args.k), ZeroSet::hyperplane(0), &grid)
        .map_err(|e| e.to_string())?;
    let mut g = grid;
    let mut levels =
        vec![growth_profile(&f, &mut m, lambda, &g, args.jmax).map_err(|e| e.to_string())?];
    for _ in 0..args.refine {
        g = g.refine();
        levels.push(growth_profile(&f, &mut m, lambda, &g, args.jmax).map_err(|e| e.to_string())?);
    }
    let mut ladder = sigma_ladder.clone();
    ladder.push(cert.sigma);
    ladder.sort_by(f64::total_cmp);
    ladder.dedup();
    let env = fit_envelope(&levels, &ladder).map_err(|e| e.to_string())?;

    let overall = if cert.verdict == Verdict::CertifiedHeuristic
        && env.verdict == Verdict::CertifiedHeuristic
    {
        Verdict::CertifiedHeuristic
    } else if env.verdict == Verdict::Diverging {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    };
    let payload = json!({
        "k": cert.k,
        "delta": rat(&cert.delta),
        "constants": {
            "a": num(cert.a),
            "b": num(cert.b),
            "sigma": num(cert.sigma),
            "c_product": num(cert.c_product),
            "ln_c_envelope": num(cert.ln_c_envelope),
        },
        "p_max": cert.p_max,
        "steps": cert.steps
            .iter()
            .map(|s| json!({
                "samples": s.samples,
                "worst_margin": num(s.worst_margin),
                "witness": s.witness,
            }))
            .collect::<Vec<_>>(),
        "chain_verdict": format!("{}", cert.verdict),
        "envelope": envelope_json(&env),
        "flat_locus": FLAT_LOCUS_NOTE,
    });
    let csv = envelope_csv(&env);
    let (verdict, exit) = verdict_outcome(overall);
    emitter.finish(
        "reproduce ex43",
        config,
        Outcome { verdict, exit, payload, thresholds, csv: Some(csv) },
    )
}

#[derive(clap::Args, Debug)]
pub struct Ex42Args {
    /// Even-power exponent in psi = x1^2 + x2^(2k)
    #[arg(long, value_name = "K")]
    pub k: u32,
    /// Gevrey parameters "ALPHA,BETA"
    #[arg(long, value_name = "A,B", default_value = "1,0")]
    pub gevrey: String,
    /// Distance scale inside h_M(lambda * t)
    #[arg(long, value_name = "L", default_value = "1")]
    pub lambda: String,
    /// Candidate sigma values
    #[arg(long, value_name = "S,...", default_value = "1,2,4,8,16")]
    pub sigma_ladder: String,
    /// Axis points, strictly decreasing rationals in (0,1)
    #[arg(long = "tladder", value_name = "T,...", default_value = "0.2,0.1,0.05,0.025")]
    pub t_ladder: String,
    #[command(flatten)]
    pub out: OutOpt,
}

pub fn run_ex42(args: Ex42Args) -> Result<i32, String> {
    let emitter = args.out.emitter();
    let (mut m, seq_echo) = gevrey_seq(&args.gevrey)?;
    let lambda = parse::f64_value(&args.lambda)?;
    let sigma_ladder = parse::f64_list(&args.sigma_ladder)?;
    let t_ladder = parse::rational_list(&args.t_ladder)?;
    let config = json!({
        "k": args.k,
        "sequence": seq_echo,
        "lambda": num(lambda),
        "sigma_ladder": sigma_ladder,
        "t_ladder": t_ladder.iter().map(rat).collect::<Vec<_>>(),
    });

    let report = axis_probe(args.k, &mut m, lambda, &sigma_ladder, &t_ladder)
        .map_err(|e| e.to_string())?;

    // classical power-law contrast on a box around the lone real zero
    let cgrid = parse::grid_box(&[
        "x1:-1/2:1/2:9".to_string(),
        "x2:-1/2:1/2:9".to_string(),
    ])?;
    let origin = vec![BigRational::zero(), BigRational::zero()];
    let zs = ZeroSet::points(vec![origin]).map_err(|e| e.to_string())?;
    let cf = TestFunction::new(axis_psi(args.k), zs, &cgrid).map_err(|e| e.to_string())?;
    let classical = classical_loja_fit(&cf, &cgrid).map_err(|e| e.to_string())?;

    let payload = json!({
        "probe": probe_payload(&report),
        "classical": classical_json(&classical),
        "flat_locus": FLAT_LOCUS_NOTE,
    });
    let csv = probe_csv(&report, true);
    let (verdict, exit) = verdict_outcome(report.verdict);
    emitter.finish(
        "reproduce ex42",
        config,
        Outcome {
            verdict,
            exit,
            payload,
            thresholds: json!({"growth_factor": report.growth_threshold}),
            csv: Some(csv),
        },
    )
}
