//! Bi-frequency illumination: estimating the reflectivity difference between
//! two frequencies with an entangled probe versus a coherent one.

use cvq::bifreq::{
    jpa_identification_residual, jpa_synthesis, noiseless_mu, optimal_coeffs, qcrb_root, ratio,
    ratio_limit_noisy, ratio_limit_reflective, BifreqParams,
};
use cvq::Result;

fn main() -> Result<()> {
    let (n_s, n_th) = (2.9, 1e3);

    // The enhancement builds up as the reference reflectivity approaches one;
    // the scale is set by N_th (1 - eta1).
    println!("quantum / classical QFI ratio, N_S = {n_s}, N_th = {n_th}");
    for k in [1, 2, 4, 6, 8, 10] {
        let eta1 = 1.0 - 10f64.powi(-k);
        let p = BifreqParams::tmsv(eta1, n_s, n_th)?;
        println!("  eta1 = 1 - 1e-{k:<2} ratio {:.6}", ratio(&p)?);
    }
    println!("  eta1 -> 1 limit {:.6}", ratio_limit_reflective(n_s, n_th));
    println!("  N_th -> inf of that limit {:.6}", ratio_limit_noisy(n_s));

    let c = optimal_coeffs(0.9, 1.0, 10.0)?;
    println!("\noptimal observable at eta1 = 0.9, N_S = 1, N_th = 10:");
    println!("  L11 {:.6}  L22 {:.6}  L12 {:.6}  L0 {:.6}", c.l11, c.l22, c.l12, c.l0);

    println!("\nnoise level where the printed variance meets the bound");
    for eta1 in [0.75, 0.9, 0.95] {
        let roots: Vec<String> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&s| match qcrb_root(eta1, s, 1e-3, 1e6) {
                Ok(Some((root, _))) => format!("N_S={s}: {root:.3}"),
                _ => format!("N_S={s}: none"),
            })
            .collect();
        println!("  eta1 = {eta1}: {}", roots.join(", "));
    }

    let mu = noiseless_mu(n_s);
    let net = jpa_synthesis(mu)?;
    println!("\nsqueezer network for the noiseless observable (mu = {mu:.6})");
    println!("  {net:?}");
    println!("  identification residual {:.2e}", jpa_identification_residual(&net, mu));
    Ok(())
}
