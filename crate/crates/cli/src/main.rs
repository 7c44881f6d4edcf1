//! Deterministic command-line harness over carleman-core. Every subcommand
//! prints one JSON report (optionally a CSV data table) and exits with:
//! 0 verified/computed/certified-heuristic, 1 falsified/diverging,
//! 2 inconclusive, 64 usage error, 65 bad configuration or domain error.

mod commands;
mod parse;
mod report;

use clap::Parser;
use commands::flat_cmd::FlatCmd;
use commands::loja_cmd::LojaCmd;
use commands::reproduce_cmd::ReproduceCmd;

#[derive(Parser, Debug)]
#[command(name = "carleman", version, about = "Weighted Lojasiewicz inequality toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Top,
}

#[derive(clap::Subcommand, Debug)]
enum Top {
    /// Regularity checks for a weight sequence
    #[command(subcommand)]
    Weights(commands::weights_cmd::WeightsCmd),
    /// The associated function h_M(t) = inf_j t^j M_j
    #[command(subcommand)]
    Hm(commands::hm_cmd::HmCmd),
    /// Doubling scale rho with h_M(t) <= h_M(rho t)^2
    #[command(subcommand)]
    Rho(commands::assoc_cmd::RhoCmd),
    /// Bracket h_M between stretched-exponential envelopes
    #[command(subcommand)]
    Eta(commands::assoc_cmd::EtaCmd),
    /// Exact derivatives of polynomial reciprocals
    #[command(subcommand)]
    Series(commands::series_cmd::SeriesCmd),
    /// Weighted Lojasiewicz profiles, fits, and probes
    #[command(subcommand)]
    Loja(LojaCmd),
    /// Flat-function envelope fits
    #[command(subcommand)]
    Flat(FlatCmd),
    /// Canned worked examples
    #[command(subcommand)]
    Reproduce(ReproduceCmd),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.cmd {
        Top::Weights(c) => commands::weights_cmd::run(c),
        Top::Hm(c) => commands::hm_cmd::run(c),
        Top::Rho(c) => commands::assoc_cmd::run_rho(c),
        Top::Eta(c) => commands::assoc_cmd::run_eta(c),
        Top::Series(c) => commands::series_cmd::run(c),
        Top::Loja(c) => match c {
            LojaCmd::Profile(a) => commands::loja_cmd::run_profile(a),
            LojaCmd::Fit(a) => commands::loja_cmd::run_fit(a),
            LojaCmd::Probe(a) => commands::loja_cmd::run_probe(a),
            LojaCmd::Classical(a) => commands::loja_cmd::run_classical(a),
        },
        Top::Flat(c) => match c {
            FlatCmd::Bound(a) => commands::flat_cmd::run_bound(a),
            FlatCmd::Quotient(a) => commands::flat_cmd::run_quotient(a),
        },
        Top::Reproduce(c) => match c {
            ReproduceCmd::Ex43(a) => commands::reproduce_cmd::run_ex43(a),
            ReproduceCmd::Ex42(a) => commands::reproduce_cmd::run_ex42(a),
        },
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(65);
        }
    }
}
