//! Quantum illumination of a weakly reflecting target in a noisy background.
//!
//! For each signal strength and noise level we print the quantum and
//! classical Fisher information (closed forms), the numeric Gaussian value
//! for the quantum probe and the ratio `R = H_Q / H_C`, which tends to 2 for
//! faint signals in bright noise. Absorption with strength `gamma` scales
//! both informations by the same factor, so `R` does not depend on it.
//!
//! ```bash
//! cargo run --release --example illumination
//! ```

use cvq::illumination::{gain, h_c, h_q, h_q_numeric, logistic_loss, qi_probe_log_negativity, QiParams};
use cvq::Result;

fn main() -> Result<()> {
    println!(
        "{:>8} {:>8} {:>6} {:>12} {:>12} {:>12} {:>8}",
        "N_S", "N_th", "gamma", "H_Q", "H_Q num", "H_C", "R"
    );
    for n_s in [1e-3, 0.1, 1.0] {
        for n_th in [1.0, 100.0, 1e4] {
            for gamma in [0.0, 0.5] {
                let p = QiParams::new(n_s, n_th, gamma, 1e-4)?;
                println!(
                    "{n_s:>8} {n_th:>8} {gamma:>6} {:>12.5e} {:>12.5e} {:>12.5e} {:>8.5}",
                    h_q(&p)?,
                    h_q_numeric(&p)?,
                    h_c(&p)?,
                    gain(&p)?
                );
            }
        }
    }

    println!("\nprobe entanglement (log-negativity) against idler noise");
    for n_th in [0.0, 0.5, 2.0] {
        println!("  N_S = 0.5, N_th = {n_th}: {:.6}", qi_probe_log_negativity(0.5, n_th)?);
    }

    println!("\nsliced absorption against its limit e^-gamma");
    for g in [0.1, 0.5, 1.0] {
        let slices: Vec<String> = [1, 4, 12].iter().map(|&k| format!("k={k}: {:.6}", logistic_loss(g, k))).collect();
        println!("  gamma = {g}: {}  limit {:.6}", slices.join("  "), (-g).exp());
    }
    Ok(())
}
