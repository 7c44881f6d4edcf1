use super::{OutOpt, SeqOpt};
use crate::report::{csv_f64, csv_table, num, num_list, ExitClass, Outcome};
use carleman_core::weights::{self, CHECK_REL_TOL};
use serde_json::json;

#[derive(clap::Subcommand, Debug)]
pub enum WeightsCmd {
    /// Regularity diagnostics: normalization, log-convexity, the product
    /// inequality, moderate growth, strong non-quasianalyticity
    Check(CheckArgs),
}

#[derive(clap::Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub seq: SeqOpt,
    /// Highest index examined
    #[arg(long, value_name = "N", default_value_t = 200)]
    pub jmax: u64,
    #[command(flatten)]
    pub out: OutOpt,
}

pub fn run(cmd: WeightsCmd) -> Result<i32, String> {
    let WeightsCmd::Check(args) = cmd;
    let emitter = args.out.emitter();
    let (mut m, seq_echo) = args.seq.build()?;
    if args.jmax < 2 {
        return Err("jmax must be at least 2".into());
    }
    let rep = weights::check_regularity(&mut m, args.jmax);

    let all_ok = rep.normalized
        && rep.log_convex
        && rep.logprod_ok
        && rep.moderate_growth_stable
        && rep.snqa_tail_ok
        && rep.snqa_a.is_some()
        && rep.moderate_growth_a.is_finite();
    let (verdict, exit) = if all_ok {
        ("verified", ExitClass::Pass)
    } else {
        ("falsified", ExitClass::Fail)
    };

    let csv = csv_table(
        "j,qa_partial_sum",
        &rep.qa_partial_sums
            .iter()
            .enumerate()
            .map(|(j, &v)| vec![j.to_string(), csv_f64(v)])
            .collect::<Vec<_>>(),
    );
    let payload = json!({
        "tested_j_max": rep.tested_j_max,
        "normalized": rep.normalized,
        "log_convex": rep.log_convex,
        "logprod_ok": rep.logprod_ok,
        "moderate_growth_a": num(rep.moderate_growth_a),
        "moderate_growth_stable": rep.moderate_growth_stable,
        "snqa_a": rep.snqa_a.map(num),
        "snqa_truncation": rep.snqa_truncation,
        "snqa_remainder": num(rep.snqa_remainder),
        "snqa_tail_ok": rep.snqa_tail_ok,
        "qa_partial_sums": num_list(&rep.qa_partial_sums),
    });
    let config = json!({"sequence": seq_echo, "jmax": args.jmax});
    emitter.finish(
        "weights check",
        config,
        Outcome {
            verdict,
            exit,
            payload,
            thresholds: json!({
                "check_rel_tol": CHECK_REL_TOL,
                "moderate_growth_stability_factor": 1.5,
            }),
            csv: Some(csv),
        },
    )
}
