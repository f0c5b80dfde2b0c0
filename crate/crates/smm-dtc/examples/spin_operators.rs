//! Spin algebra building blocks: single-site operators, their commutation
//! relations, and the Kronecker embedding into a chain.
//!
//! Run with `cargo run --example spin_operators`.

use num_complex::Complex64 as C64;
use smm_dtc::error::Result;
use smm_dtc::linalg::{commutator, frobenius_norm};
use smm_dtc::spin::{chain_dim, chain_operators, spin_ops, Spin, DIM_CAP};

fn main() -> Result<()> {
    // Single site: S = 1 gives the familiar 3x3 matrices.
    let spin = Spin::new(1.0)?;
    let ops = spin_ops(spin);
    println!("S = {} site, dimension {}", spin.s(), spin.dim());
    println!("m values: {:?}", spin.m_values());

    // [Sx, Sy] = i Sz, and the Casimir Sx^2 + Sy^2 + Sz^2 = S(S+1) 1.
    let comm = commutator(&ops.sx, &ops.sy);
    let expected = ops.sz.mapv(|z| z * C64::new(0.0, 1.0));
    println!(
        "|| [Sx, Sy] - i Sz ||_F = {:.3e}",
        frobenius_norm(&(&comm - &expected))
    );
    let casimir = ops.sx.dot(&ops.sx) + ops.sy.dot(&ops.sy) + ops.sz.dot(&ops.sz);
    let s = spin.s();
    println!(
        "Casimir eigenvalue: {:.6} (S(S+1) = {:.6})",
        casimir[(0, 0)].re,
        s * (s + 1.0)
    );

    // Half-integer spins are exact as well.
    for s in [0.5, 1.5, 2.5] {
        let sp = Spin::new(s)?;
        println!("S = {s}: local dimension {}", sp.dim());
    }

    // Chain embedding: site operators act on (2S+1)^N dimensional space and
    // commute across sites.
    let chain = chain_operators(spin, 3)?;
    println!(
        "\nN = 3 chain of S = 1: dimension {}",
        chain.basis.dim()
    );
    let cross = commutator(&chain.sx[0], &chain.sz[2]);
    println!(
        "|| [S_0^x, S_2^z] ||_F = {:.3e} (different sites commute)",
        frobenius_norm(&cross)
    );
    let total = commutator(&chain.sx_total, &chain.sy_total);
    let expected = chain.sz_total.mapv(|z| z * C64::new(0.0, 1.0));
    println!(
        "|| [Sx_tot, Sy_tot] - i Sz_tot ||_F = {:.3e}",
        frobenius_norm(&(&total - &expected))
    );

    // Dense storage is capped; oversized chains are rejected up front.
    println!("\ndense-matrix cap: {DIM_CAP}");
    for (s, n) in [(1.0, 7), (1.0, 8), (3.0, 4), (3.0, 5)] {
        let spin = Spin::new(s)?;
        match chain_dim(spin, n) {
            Ok(dim) => println!("  S = {s}, N = {n}: dim {dim} fits"),
            Err(e) => println!("  S = {s}, N = {n}: {e}"),
        }
    }
    Ok(())
}
