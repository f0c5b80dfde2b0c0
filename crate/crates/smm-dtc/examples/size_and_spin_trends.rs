//! How the envelope period scales with chain length and site spin.
//!
//! At strong exchange (J = 10 D) the envelope accelerates going from a
//! three-site to a five-site chain, and as the site spin grows at fixed
//! length: more exchange channels per molecule dephase the sub-harmonic
//! faster, shrinking the envelope period T at fixed B and D.
//!
//! Run with `cargo run --example size_and_spin_trends`.

use smm_dtc::config::RunConfig;
use smm_dtc::error::Result;
use smm_dtc::pipeline::run_in_memory;

fn envelope_period(spin: f64, n_sites: usize, periods: usize) -> Result<Option<f64>> {
    let config: RunConfig = toml::from_str(&format!(
        "[model]\nspin = {spin}\nn_sites = {n_sites}\nj_exchange = 10.0\n\
         [evolution]\nperiods = {periods}\n"
    ))?;
    let products = run_in_memory(&config.resolve()?)?;
    Ok(products.report.envelope.and_then(|e| e.period))
}

fn main() -> Result<()> {
    let periods = 1000;
    println!("B = omega/2, J = 10 D, {periods} drive periods\n");

    println!("chain length at S = 1:");
    println!("  N    envelope period T (T0)");
    for n in [3usize, 5] {
        match envelope_period(1.0, n, periods)? {
            Some(t) => println!("  {n}    {t:.1}"),
            None => println!("  {n}    undetermined"),
        }
    }

    println!("\nsite spin at N = 3:");
    println!("  S      envelope period T (T0)");
    for s in [1.0, 1.5, 2.0] {
        match envelope_period(s, 3, periods)? {
            Some(t) => println!("  {s:<4}   {t:.1}"),
            None => println!("  {s:<4}   undetermined"),
        }
    }
    Ok(())
}
