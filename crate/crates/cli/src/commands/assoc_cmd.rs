use super::{OutOpt, SeqOpt, TGridOpt};
use crate::parse;
use crate::report::{csv_f64, csv_table, num, ExitClass, Outcome};
use carleman_core::assoc::{self, RhoSearch};
use serde_json::json;

#[derive(clap::Subcommand, Debug)]
pub enum RhoCmd {
    /// Search a ladder for the least rho with h_M(t) <= h_M(rho t)^2
    Find(RhoArgs),
}

#[derive(clap::Args, Debug)]
pub struct RhoArgs {
    #[command(flatten)]
    pub seq: SeqOpt,
    /// Ascending candidates, each > 1
    #[arg(long, value_name = "R,...", default_value = "1.5,2,4,8,16,32,64")]
    pub rho_ladder: String,
    #[command(flatten)]
    pub grid: TGridOpt,
    /// Smallest admissible t
    #[arg(long, value_name = "T", default_value = "1e-6")]
    pub t_floor: String,
    /// Defect tolerance for accepting a rho
    #[arg(long, value_name = "TOL", default_value = "1e-9")]
    pub tol: String,
    #[command(flatten)]
    pub out: OutOpt,
}

pub fn run_rho(cmd: RhoCmd) -> Result<i32, String> {
    let RhoCmd::Find(args) = cmd;
    let emitter = args.out.emitter();
    let ladder = parse::f64_list(&args.rho_ladder)?;
    if ladder.is_empty() || ladder.iter().any(|&r| !(r > 1.0)) {
        return Err("rho ladder entries must all exceed 1".into());
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err("rho ladder must be strictly ascending".into());
    }
    let tol = parse::f64_value(&args.tol)?;
    if !(tol > 0.0) {
        return Err("tol must be positive".into());
    }
    let floor = args.seq.safe_t_floor(parse::f64_value(&args.t_floor)?);
    let (grid, grid_echo) = args.grid.build(floor)?;
    let (mut m, seq_echo) = args.seq.build()?;

    let search = assoc::find_rho(&mut m, &grid, &ladder, tol);
    let config = json!({
        "sequence": seq_echo,
        "rho_ladder": ladder,
        "t_grid": grid_echo,
        "t_floor": floor,
        "tol": tol,
    });
    let thresholds = json!({"tol": tol});
    match search {
        RhoSearch::Found(w) => {
            let payload = json!({
                "rho": num(w.rho),
                "max_defect": num(w.max_defect),
                "grid_len": w.grid_len,
            });
            emitter.finish(
                "rho find",
                config,
                Outcome {
                    verdict: "verified",
                    exit: ExitClass::Pass,
                    payload,
                    thresholds,
                    csv: None,
                },
            )
        }
        RhoSearch::NotFound { defects } => {
            let csv = csv_table(
                "rho,max_defect",
                &defects
                    .iter()
                    .map(|&(r, d)| vec![csv_f64(r), csv_f64(d)])
                    .collect::<Vec<_>>(),
            );
            let payload = json!({
                "defects": defects
                    .iter()
                    .map(|&(r, d)| json!({"rho": num(r), "max_defect": num(d)}))
                    .collect::<Vec<_>>(),
            });
            emitter.finish(
                "rho find",
                config,
                Outcome {
                    verdict: "falsified",
                    exit: ExitClass::Fail,
                    payload,
                    thresholds,
                    csv: Some(csv),
                },
            )
        }
    }
}

#[derive(clap::Subcommand, Debug)]
pub enum EtaCmd {
    /// Bracket h_M between scaled copies of exp(-(t |ln t|^beta)^(-1/alpha))
    Bracket(EtaArgs),
}

#[derive(clap::Args, Debug)]
pub struct EtaArgs {
    #[command(flatten)]
    pub seq: SeqOpt,
    /// Ascending scale candidates for both sides of the bracket
    #[arg(long, value_name = "C,...", default_value = "0.125,0.25,0.5,1,2,4,8")]
    pub ladder: String,
    /// Lower end of the t grid
    #[arg(long, value_name = "T", default_value = "1e-3")]
    pub t_from: String,
    /// Upper end of the t grid; the envelope needs t < 1
    #[arg(long, value_name = "T", default_value = "0.5")]
    pub t_to: String,
    /// Number of t grid points
    #[arg(long, value_name = "N", default_value_t = 200)]
    pub t_count: usize,
    /// Spacing of the t grid: log or linear
    #[arg(long, value_name = "log|linear", default_value = "log")]
    pub t_spacing: String,
    /// Smallest admissible t
    #[arg(long, value_name = "T", default_value = "1e-6")]
    pub t_floor: String,
    /// Comparison tolerance in the log domain
    #[arg(long, value_name = "TOL", default_value = "1e-9")]
    pub tol: String,
    #[command(flatten)]
    pub out: OutOpt,
}

pub fn run_eta(cmd: EtaCmd) -> Result<i32, String> {
    let EtaCmd::Bracket(args) = cmd;
    let emitter = args.out.emitter();
    let ladder = parse::f64_list(&args.ladder)?;
    if ladder.is_empty() || ladder.iter().any(|&c| !(c > 0.0)) {
        return Err("ladder entries must be positive".into());
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err("ladder must be strictly ascending".into());
    }
    let tol = parse::f64_value(&args.tol)?;
    let floor = args.seq.safe_t_floor(parse::f64_value(&args.t_floor)?);
    let tgrid = TGridOpt {
        t_from: args.t_from.clone(),
        t_to: args.t_to.clone(),
        t_count: args.t_count,
        t_spacing: args.t_spacing.clone(),
    };
    let (grid, grid_echo) = tgrid.build(floor)?;
    if *grid.last().expect("nonempty grid") >= 1.0 {
        return Err("the envelope's log term needs the whole grid below t = 1".into());
    }
    // the upper envelope shifts t by ladder scales; keep the scaled
    // arguments above the floor too
    let min_scale = ladder[0];
    if grid[0] * min_scale < floor {
        return Err(format!(
            "smallest scaled argument {} falls below the floor {floor}",
            grid[0] * min_scale
        ));
    }
    let (mut m, seq_echo) = args.seq.build()?;
    let config = json!({
        "sequence": seq_echo,
        "ladder": ladder,
        "t_grid": grid_echo,
        "t_floor": floor,
        "tol": tol,
    });
    let thresholds = json!({"tol": tol});
    match assoc::eta_bracket(&mut m, &grid, &ladder, tol) {
        Ok(b) => {
            let payload = json!({
                "lower_scale": num(b.a),
                "upper_scale": num(b.b),
                "grid_len": b.grid_len,
            });
            emitter.finish(
                "eta bracket",
                config,
                Outcome {
                    verdict: "verified",
                    exit: ExitClass::Pass,
                    payload,
                    thresholds,
                    csv: None,
                },
            )
        }
        Err(assoc::AssocError::BracketNotFound) => {
            let payload = json!({
                "note": "no ladder scale bracketed h on this grid; widen the ladder or shrink the grid",
            });
            emitter.finish(
                "eta bracket",
                config,
                Outcome {
                    verdict: "inconclusive",
                    exit: ExitClass::Unknown,
                    payload,
                    thresholds,
                    csv: None,
                },
            )
        }
        Err(e) => Err(e.to_string()),
    }
}
