//! Solves over a (a, b, β) grid in parallel and prints the result CSV in
//! declared order.
//!
//! cargo run --release --example parameter_sweep

use coupled_nls::cli::output::{write_results, ResultRow};
use coupled_nls::cli::RunConfig;
use coupled_nls::solver::minimize_ground;
use rayon::prelude::*;

const BASE: &str = r#"{"p": 4, "q": 4, "r1": 1.75, "r2": 1.75, "mu1": 1, "mu2": 1, "beta": 1, "a": 1, "b": 1}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let base = RunConfig::from_json(BASE)?;
    let mut cfgs = Vec::new();
    for b in [0.5, 1.0, 2.0] {
        for beta in [1.0, 10.0] {
            cfgs.push(base.varied("b", b)?.varied("beta", beta)?);
        }
    }
    let rows: Vec<ResultRow> = cfgs
        .par_iter()
        .map(|c| match minimize_ground(&c.solve_config()) {
            Ok(r) => ResultRow::from_result(&c.params, &r),
            Err(_) => ResultRow::failed(&c.params),
        })
        .collect();
    write_results(&mut std::io::stdout().lock(), &rows)?;
    Ok(())
}
