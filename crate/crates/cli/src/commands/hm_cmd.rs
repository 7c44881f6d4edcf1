use super::{OutOpt, SeqOpt, TGridOpt};
use crate::parse;
use crate::report::{csv_f64, csv_table, num, ExitClass, Outcome};
use carleman_core::assoc::{self, TIE_REL_TOL};
use carleman_core::math;
use serde_json::json;

#[derive(clap::Subcommand, Debug)]
pub enum HmCmd {
    /// Evaluate h_M(t) = inf_j t^j M_j at one t
    Eval(EvalArgs),
    /// Tabulate h_M over a t grid (CSV columns: t, h, minimizer_j)
    Table(TableArgs),
}

#[derive(clap::Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub seq: SeqOpt,
    /// Evaluation point (rational or decimal)
    #[arg(long, value_name = "T")]
    pub t: String,
    /// Smallest admissible t (guards the weight-table ceiling)
    #[arg(long, value_name = "T", default_value = "1e-6")]
    pub t_floor: String,
    #[command(flatten)]
    pub out: OutOpt,
}

#[derive(clap::Args, Debug)]
pub struct TableArgs {
    #[command(flatten)]
    pub seq: SeqOpt,
    #[command(flatten)]
    pub grid: TGridOpt,
    /// Smallest admissible t (guards the weight-table ceiling)
    #[arg(long, value_name = "T", default_value = "1e-6")]
    pub t_floor: String,
    #[command(flatten)]
    pub out: OutOpt,
}

pub fn run(cmd: HmCmd) -> Result<i32, String> {
    match cmd {
        HmCmd::Eval(args) => eval(args),
        HmCmd::Table(args) => table(args),
    }
}

fn eval(args: EvalArgs) -> Result<i32, String> {
    let emitter = args.out.emitter();
    let t = parse::f64_value(&args.t)?;
    let floor = args.seq.safe_t_floor(parse::f64_value(&args.t_floor)?);
    let (mut m, seq_echo) = args.seq.build()?;
    if !(t > 0.0) {
        return Err(format!("t must be positive, got {t}"));
    }
    if t < floor {
        return Err(format!("t = {t} below the evaluation floor {floor}"));
    }
    let h = assoc::hm_eval(&mut m, t);
    let payload = json!({
        "t": t,
        "log_h": num(h.log_h),
        "h": num(math::exp(h.log_h)),
        "minimizer": h.minimizer,
    });
    let config = json!({"sequence": seq_echo, "t": t, "t_floor": floor});
    emitter.finish(
        "hm eval",
        config,
        Outcome {
            verdict: "computed",
            exit: ExitClass::Pass,
            payload,
            thresholds: json!({"tie_rel_tol": TIE_REL_TOL}),
            csv: None,
        },
    )
}

fn table(args: TableArgs) -> Result<i32, String> {
    let emitter = args.out.emitter();
    let floor = args.seq.safe_t_floor(parse::f64_value(&args.t_floor)?);
    let (grid, grid_echo) = args.grid.build(floor)?;
    let (mut m, seq_echo) = args.seq.build()?;
    let mut rows_json = Vec::with_capacity(grid.len());
    let mut rows_csv = Vec::with_capacity(grid.len());
    for &t in &grid {
        let h = assoc::hm_eval(&mut m, t);
        let hv = math::exp(h.log_h);
        rows_json.push(json!({
            "t": t,
            "log_h": num(h.log_h),
            "h": num(hv),
            "minimizer": h.minimizer,
        }));
        rows_csv.push(vec![csv_f64(t), csv_f64(hv), h.minimizer.to_string()]);
    }
    let payload = json!({"rows": rows_json});
    let config = json!({"sequence": seq_echo, "t_grid": grid_echo, "t_floor": floor});
    emitter.finish(
        "hm table",
        config,
        Outcome {
            verdict: "computed",
            exit: ExitClass::Pass,
            payload,
            thresholds: json!({"tie_rel_tol": TIE_REL_TOL}),
            csv: Some(csv_table("t,h,minimizer_j", &rows_csv)),
        },
    )
}
