//! Exchange-form control: Heisenberg versus Ising coupling.
//!
//! With full Heisenberg exchange the transverse spin components exchange
//! between sites and the sub-harmonic stays sharp. Restricting the coupling
//! to Sz Sz (Ising) removes that channel; the line survives at this system
//! size but shifts down and reshapes, showing the exchange form matters for
//! the fine structure even though the single molecule sets the scale.
//!
//! Run with `cargo run --example ising_control`.

use smm_dtc::config::RunConfig;
use smm_dtc::error::Result;
use smm_dtc::pipeline::run_in_memory;

fn main() -> Result<()> {
    println!("N = 3 chain of S = 1, B = omega/2, J = D, 400 drive periods\n");
    for coupling in ["heisenberg", "ising"] {
        let config: RunConfig = toml::from_str(&format!(
            "[model]\nn_sites = 3\ncoupling = \"{coupling}\"\n[evolution]\nperiods = 400\n"
        ))?;
        let products = run_in_memory(&config.resolve()?)?;
        let report = &products.report;
        println!("{coupling}:");
        match &report.detection {
            Some(d) => {
                println!("  f_dtc/omega  = {:.6}", d.f_dtc);
                println!("  peak         = {:.1}", d.peak_magnitude);
                println!("  peak/median  = {:.1}", d.threshold_ratio);
                println!(
                    "  offset from single-molecule line = {:+.4} omega",
                    d.f_dtc - report.f_dtc_analytic
                );
            }
            None => println!("  {}", report.detection_status),
        }
        if let Some(env) = &report.envelope {
            match env.period {
                Some(t) => println!("  envelope period = {t:.1} T0"),
                None => println!("  envelope period undetermined"),
            }
        }
        println!();
    }
    Ok(())
}
