//! The README walkthrough: test a CSV file, then a simulated path.
//!
//! Run with a real file in the working directory:
//! `cargo run --example quickstart` (expects `my_series.csv`).

use unitroot::{
    builtin_quantile, gen_random_walk, load_series, unit_root_stats, InnovationSpec, SeedSpec,
    StatisticCase,
};

fn main() -> unitroot::Result<()> {
    // observed data
    let series = load_series("my_series.csv".as_ref(), None)?;
    let out = unit_root_stats(&series, StatisticCase::MeanCorrected)?;
    let cv = builtin_quantile(0.05, out.n)?;
    println!(
        "tau_mu = {:.4}  5% cv = {:.4}  reject = {}",
        out.tau,
        cv,
        out.tau <= cv
    );

    // or a simulated null path, reproducible from its seed
    let walk = gen_random_walk(200, &InnovationSpec::standard_normal(), SeedSpec::new(7))?;
    let sim = unit_root_stats(&walk, StatisticCase::MeanCorrected)?;
    println!("simulated tau_mu = {:.4}", sim.tau);
    Ok(())
}
