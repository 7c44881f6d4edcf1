use super::OutOpt;
use crate::parse;
use crate::report::{num, rat, ExitClass, Outcome};
use carleman_core::math::ln_big_rational_abs;
use carleman_core::series::{recenter, reciprocal, MultiIndex};
use num_traits::{Signed, Zero};
use serde_json::json;

#[derive(clap::Subcommand, Debug)]
pub enum SeriesCmd {
    /// Exact partial derivative of 1/phi (or phi itself) at a rational point
    Diff(DiffArgs),
}

#[derive(clap::Args, Debug)]
pub struct DiffArgs {
    /// Polynomial, e.g. "x1^2 + x2^4" or "x1^3 + x1*x2^4"
    #[arg(long, value_name = "EXPR")]
    pub phi: String,
    /// Force the variable count (otherwise the largest index in EXPR)
    #[arg(long, value_name = "N")]
    pub nvars: Option<usize>,
    /// Evaluation point, comma-separated rationals
    #[arg(long, value_name = "X,...")]
    pub at: String,
    /// Derivative multi-index, comma-separated
    #[arg(long, value_name = "J,...")]
    pub index: String,
    /// Truncation order (default: the order of the requested index)
    #[arg(long, value_name = "CAP")]
    pub cap: Option<u32>,
    /// Differentiate phi itself instead of 1/phi
    #[arg(long)]
    pub direct: bool,
    #[command(flatten)]
    pub out: OutOpt,
}

pub fn run(cmd: SeriesCmd) -> Result<i32, String> {
    let SeriesCmd::Diff(args) = cmd;
    let emitter = args.out.emitter();
    let phi = parse::polynomial(&args.phi, args.nvars)?;
    let n = phi.nvars();
    let at = parse::rational_list(&args.at)?;
    if at.len() != n {
        return Err(format!("--at has {} coordinates but phi uses {n} variables", at.len()));
    }
    let index: Vec<u32> = args
        .index
        .split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|e| format!("bad index entry {s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if index.len() != n {
        return Err(format!("--index has {} entries but phi uses {n} variables", index.len()));
    }
    let j = MultiIndex(index.clone());
    let cap = match args.cap {
        Some(c) if c < j.total() => {
            return Err(format!("cap {c} is below the requested order {}", j.total()));
        }
        Some(c) => c,
        None => j.total(),
    };

    let phi_at = phi.eval(&at).map_err(|e| e.to_string())?;
    let centered = recenter(&phi, &at, cap).map_err(|e| e.to_string())?;
    let series = if args.direct {
        centered
    } else {
        if phi_at.is_zero() {
            return Err(format!("phi vanishes at ({}); 1/phi has no expansion there", args.at));
        }
        reciprocal(&centered, cap).map_err(|e| e.to_string())?
    };
    let value = series.derivative_at(&j).map_err(|e| e.to_string())?;
    let sign: i8 = if value.is_zero() {
        0
    } else if value.is_positive() {
        1
    } else {
        -1
    };
    let ln_abs = if sign == 0 { f64::NEG_INFINITY } else { ln_big_rational_abs(&value) };

    let config = json!({
        "phi": args.phi,
        "nvars": n,
        "at": at.iter().map(rat).collect::<Vec<_>>(),
        "index": index,
        "cap": cap,
        "target": if args.direct { "phi" } else { "1/phi" },
    });
    let payload = json!({
        "derivative": rat(&value),
        "ln_abs": num(ln_abs),
        "sign": sign,
        "phi_at": rat(&phi_at),
    });
    emitter.finish(
        "series diff",
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
