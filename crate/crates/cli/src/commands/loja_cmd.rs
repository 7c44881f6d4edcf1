use super::{OutOpt, SeqOpt};
use crate::parse;
use crate::report::{csv_f64, csv_table, num, num_list, rat, rat_point, ExitClass, Outcome};
use carleman_core::geometry::GridBox;
use carleman_core::lojasiewicz::{
    axis_probe, classical_loja_fit, fit_envelope, growth_profile, ClassicalFit, EnvelopeFit,
    GrowthProfile, ProbeReport, TestFunction, Verdict, VERDICT_GROWTH_FACTOR,
};
use carleman_core::math;
use serde_json::{json, Value};

#[derive(clap::Subcommand, Debug)]
pub enum LojaCmd {
    /// Largest normalized derivative term at each order over a probe grid
    Profile(ProfileArgs),
    /// Envelope constants across grid refinements, with a stability verdict
    Fit(FitArgs),
    /// Axis scan of 1/(x1^2 + x2^(2k)) against the weight sequence
    Probe(ProbeArgs),
    /// Power-law fit |phi(x)| >= C dist(x)^nu away from the zero set
    Classical(ClassicalArgs),
}

/// Target function shared by the grid-based subcommands.
#[derive(clap::Args, Debug)]
pub struct TargetOpt {
    /// Polynomial, e.g. "x1^3 + x1*x2^4"
    #[arg(long, value_name = "EXPR")]
    pub phi: String,
    /// Force the variable count (otherwise the largest index in EXPR)
    #[arg(long, value_name = "N")]
    pub nvars: Option<usize>,
    /// Declared zero set: {"hyperplane":1}, {"points":[["0","0"]]}, or {"union":[..]}
    #[arg(long, value_name = "JSON")]
    pub zero_set: String,
    /// One spec per axis: x<i>:lo:hi:count[,geom]
    #[arg(long = "grid", value_name = "SPEC")]
    pub grid: Vec<String>,
}

impl TargetOpt {
    fn build(&self) -> Result<(TestFunction, GridBox, Value), String> {
        let phi = parse::polynomial(&self.phi, self.nvars)?;
        let n = phi.nvars();
        if self.grid.is_empty() {
            return Err("at least one --grid axis spec is required".into());
        }
        let grid = parse::grid_box(&self.grid)?;
        if grid.nvars() != n {
            return Err(format!("grid has {} axes but phi uses {n} variables", grid.nvars()));
        }
        let zs = parse::zero_set(&self.zero_set, n)?;
        let f = TestFunction::new(phi, zs, &grid).map_err(|e| e.to_string())?;
        let echo = json!({
            "phi": self.phi,
            "nvars": n,
            "zero_set": self.zero_set,
            "grid": self.grid,
        });
        Ok((f, grid, echo))
    }
}

/// Explicit weight tables cannot be grown on demand; reject order caps the
/// table cannot serve before core panics on the lookup.
pub fn check_order_cap(m: &carleman_core::weights::WeightSequence, cap: u64) -> Result<(), String> {
    if let Some(len) = m.len() {
        if cap >= len {
            return Err(format!(
                "order cap {cap} needs M_{cap}, but the explicit table ends at M_{}",
                len - 1
            ));
        }
    }
    Ok(())
}

pub(crate) fn verdict_outcome(v: Verdict) -> (&'static str, ExitClass) {
    match v {
        Verdict::CertifiedHeuristic => ("certified-heuristic", ExitClass::Pass),
        Verdict::Diverging => ("diverging", ExitClass::Fail),
        Verdict::Inconclusive => ("inconclusive", ExitClass::Unknown),
    }
}

fn profile_json(p: &GrowthProfile) -> Value {
    json!({
        "lambda": num(p.lambda),
        "j_max": p.j_max,
        "grid_len": p.grid_len,
        "skipped": p.skipped,
        "s": num_list(&p.s),
        "witnesses": p.witnesses
            .iter()
            .enumerate()
            .map(|(j, w)| json!({
                "j": j,
                "x": rat_point(&w.x),
                "index": w.index.0,
                "ln_term": num(w.ln_term),
            }))
            .collect::<Vec<_>>(),
    })
}

pub(crate) fn envelope_json(fit: &EnvelopeFit) -> Value {
    json!({
        "sigma_ladder": num_list(&fit.sigma_ladder),
        "ln_c": num_list(&fit.ln_c),
        "history": fit.history.iter().map(|row| num_list(row)).collect::<Vec<_>>(),
        "verdict": format!("{}", fit.verdict),
    })
}

pub(crate) fn envelope_csv(fit: &EnvelopeFit) -> String {
    let mut rows = Vec::new();
    for (l, row) in fit.history.iter().enumerate() {
        for (i, &lnc) in row.iter().enumerate() {
            rows.push(vec![l.to_string(), csv_f64(fit.sigma_ladder[i]), csv_f64(lnc)]);
        }
    }
    csv_table("level,sigma,ln_c", &rows)
}

pub(crate) fn probe_payload(report: &ProbeReport) -> Value {
    // per-sigma multiplicative growth of the required constant between
    // consecutive t values
    let growth: Vec<Value> = report
        .sigma_ladder
        .iter()
        .enumerate()
        .map(|(i, &sig)| {
            let factors: Vec<f64> = report
                .rows
                .windows(2)
                .map(|w| math::exp(w[1].entries[i].required_ln_c - w[0].entries[i].required_ln_c))
                .collect();
            json!({"sigma": num(sig), "factors": num_list(&factors)})
        })
        .collect();
    json!({
        "k": report.k,
        "lambda": num(report.lambda),
        "cross_checked": report.cross_checked,
        "rows": report.rows
            .iter()
            .map(|r| json!({
                "t": rat(&r.t),
                "ln_h": num(r.ln_h),
                "entries": r.entries
                    .iter()
                    .map(|e| json!({
                        "sigma": num(e.sigma),
                        "best_m": e.best_m,
                        "required_ln_c": num(e.required_ln_c),
                    }))
                    .collect::<Vec<_>>(),
            }))
            .collect::<Vec<_>>(),
        "growth": growth,
        "verdict": format!("{}", report.verdict),
    })
}

pub(crate) fn probe_csv(report: &ProbeReport, with_growth: bool) -> String {
    let mut rows = Vec::new();
    for (r, row) in report.rows.iter().enumerate() {
        for (i, e) in row.entries.iter().enumerate() {
            let mut cols = vec![
                row.t.to_string(),
                csv_f64(e.sigma),
                e.best_m.to_string(),
                csv_f64(e.required_ln_c),
            ];
            if with_growth {
                cols.push(if r == 0 {
                    String::new()
                } else {
                    csv_f64(math::exp(
                        e.required_ln_c - report.rows[r - 1].entries[i].required_ln_c,
                    ))
                });
            }
            rows.push(cols);
        }
    }
    let header = if with_growth {
        "t,sigma,best_m,required_ln_c,growth_from_prev"
    } else {
        "t,sigma,best_m,required_ln_c"
    };
    csv_table(header, &rows)
}

pub(crate) fn classical_json(fit: &ClassicalFit) -> Value {
    json!({
        "nu": num(fit.nu),
        "ln_c": num(fit.ln_c),
        "c": num(fit.c),
        "residual_rms": num(fit.residual_rms),
        "binding_count": fit.binding_count,
        "used": fit.used,
        "skipped": fit.skipped,
    })
}

#[derive(clap::Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub target: TargetOpt,
    #[command(flatten)]
    pub seq: SeqOpt,
    /// Distance scale inside h_M(lambda * dist)
    #[arg(long, value_name = "L", default_value = "1")]
    pub lambda: String,
    /// Highest derivative order to profile
    #[arg(long, value_name = "J", default_value_t = 16)]
    pub jmax: u32,
    #[command(flatten)]
    pub out: OutOpt,
}

pub fn run_profile(args: ProfileArgs) -> Result<i32, String> {
    let emitter = args.out.emitter();
    let (f, grid, target_echo) = args.target.build()?;
    let lambda = parse::f64_value(&args.lambda)?;
    let (mut m, seq_echo) = args.seq.build()?;
    check_order_cap(&m, args.jmax.into())?;
    let p = growth_profile(&f, &mut m, lambda, &grid, args.jmax).map_err(|e| e.to_string())?;
    let config = json!({
        "target": target_echo,
        "sequence": seq_echo,
        "lambda": num(lambda),
        "j_max": args.jmax,
    });
    let csv = csv_table(
        "j,s_j",
        &p.s.iter().enumerate().map(|(j, &v)| vec![j.to_string(), csv_f64(v)]).collect::<Vec<_>>(),
    );
    emitter.finish(
        "loja profile",
        config,
        Outcome {
            verdict: "computed",
            exit: ExitClass::Pass,
            payload: profile_json(&p),
            thresholds: json!({}),
            csv: Some(csv),
        },
    )
}

#[derive(clap::Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    pub target: TargetOpt,
    #[command(flatten)]
    pub seq: SeqOpt,
    /// Distance scale inside h_M(lambda * dist)
    #[arg(long, value_name = "L", default_value = "1")]
    pub lambda: String,
    /// Highest derivative order to profile
    #[arg(long, value_name = "J", default_value_t = 16)]
    pub jmax: u32,
    /// Candidate sigma values, ascending
    #[arg(long, value_name = "S,...", default_value = "1,2,4,8,16")]
    pub sigma_ladder: String,
    /// Number of dyadic grid refinements beyond the base grid
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub refine: u32,
    #[command(flatten)]
    pub out: OutOpt,
}

pub fn run_fit(args: FitArgs) -> Result<i32, String> {
    let emitter = args.out.emitter();
    let (f, grid, target_echo) = args.target.build()?;
    let lambda = parse::f64_value(&args.lambda)?;
    let sigma_ladder = parse::f64_list(&args.sigma_ladder)?;
    if sigma_ladder.is_empty() || sigma_ladder.iter().any(|&s| !(s > 0.0)) {
        return Err("sigma ladder entries must be positive".into());
    }
    if args.refine < 1 {
        return Err("need at least one refinement to judge stability".into());
    }
    let (mut m, seq_echo) = args.seq.build()?;
    check_order_cap(&m, args.jmax.into())?;

    let mut g = grid;
    let mut levels =
        vec![growth_profile(&f, &mut m, lambda, &g, args.jmax).map_err(|e| e.to_string())?];
    for _ in 0..args.refine {
        g = g.refine();
        levels.push(growth_profile(&f, &mut m, lambda, &g, args.jmax).map_err(|e| e.to_string())?);
    }
    let fit = fit_envelope(&levels, &sigma_ladder).map_err(|e| e.to_string())?;

    let config = json!({
        "target": target_echo,
        "sequence": seq_echo,
        "lambda": num(lambda),
        "j_max": args.jmax,
        "sigma_ladder": sigma_ladder,
        "refine": args.refine,
    });
    let csv = envelope_csv(&fit);
    let mut payload = envelope_json(&fit);
    payload["levels"] = Value::Array(
        levels
            .iter()
            .enumerate()
            .map(|(i, p)| json!({"level": i, "grid_len": p.grid_len, "skipped": p.skipped}))
            .collect(),
    );
    let (verdict, exit) = verdict_outcome(fit.verdict);
    emitter.finish(
        "loja fit",
        config,
        Outcome {
            verdict,
            exit,
            payload,
            thresholds: json!({"growth_factor": VERDICT_GROWTH_FACTOR}),
            csv: Some(csv),
        },
    )
}

#[derive(clap::Args, Debug)]
pub struct ProbeArgs {
    /// Exponent in psi = x1^2 + x2^(2k)
    #[arg(long, value_name = "K")]
    pub k: u32,
    #[command(flatten)]
    pub seq: SeqOpt,
    /// Distance scale inside h_M(lambda * t)
    #[arg(long, value_name = "L", default_value = "1")]
    pub lambda: String,
    /// Candidate sigma values, ascending
    #[arg(long, value_name = "S,...", default_value = "1,2,4,8,16")]
    pub sigma_ladder: String,
    /// Axis points, strictly decreasing rationals in (0,1)
    #[arg(long = "tladder", value_name = "T,...", default_value = "0.2,0.1,0.05,0.025")]
    pub t_ladder: String,
    #[command(flatten)]
    pub out: OutOpt,
}

pub fn run_probe(args: ProbeArgs) -> Result<i32, String> {
    let emitter = args.out.emitter();
    let lambda = parse::f64_value(&args.lambda)?;
    let sigma_ladder = parse::f64_list(&args.sigma_ladder)?;
    let t_ladder = parse::rational_list(&args.t_ladder)?;
    let (mut m, seq_echo) = args.seq.build()?;
    if m.len().is_some() {
        return Err("the axis probe scans unboundedly many orders; use --gevrey".into());
    }
    let report =
        axis_probe(args.k, &mut m, lambda, &sigma_ladder, &t_ladder).map_err(|e| e.to_string())?;

    let config = json!({
        "k": args.k,
        "sequence": seq_echo,
        "lambda": num(lambda),
        "sigma_ladder": sigma_ladder,
        "t_ladder": t_ladder.iter().map(rat).collect::<Vec<_>>(),
    });
    let payload = probe_payload(&report);
    let csv = probe_csv(&report, false);
    let (verdict, exit) = verdict_outcome(report.verdict);
    emitter.finish(
        "loja probe",
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

#[derive(clap::Args, Debug)]
pub struct ClassicalArgs {
    #[command(flatten)]
    pub target: TargetOpt,
    #[command(flatten)]
    pub out: OutOpt,
}

pub fn run_classical(args: ClassicalArgs) -> Result<i32, String> {
    let emitter = args.out.emitter();
    let (f, grid, target_echo) = args.target.build()?;
    let fit = classical_loja_fit(&f, &grid).map_err(|e| e.to_string())?;
    let config = json!({"target": target_echo});
    let mut payload = classical_json(&fit);
    payload["flat_locus"] =
        json!("empty for a nonzero polynomial; the fit concerns the declared zero set only");
    emitter.finish(
        "loja classical",
        config,
        Outcome {
            verdict: "computed",
            exit: ExitClass::Pass,
            payload,
            thresholds: json!({}),
            csv: None,
        },
    )
}
