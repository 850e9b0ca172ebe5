//! Quantum Fisher information of a one-parameter Gaussian family and the
//! quadratic observable that saturates the bound.

use cvq::estimation::{gaussian_qfi, gaussian_sld, observable_moments, optimal_observable, GaussianFamily};
use cvq::gaussian::{apply, beam_splitter, partial_trace, thermal, tmst, ModeSubset};
use cvq::Result;

fn main() -> Result<()> {
    // Reflectivity of a splitter that mixes the signal arm with a warm bath.
    let family = GaussianFamily::new(
        |eta| {
            let s = tmst(0.6, 0.05)?.tensor(&thermal(1, 0.8)?);
            let s = apply(&s, &beam_splitter(eta)?, &ModeSubset::new(&[1, 2])?)?;
            partial_trace(&s, &ModeSubset::new(&[0, 1])?)
        },
        0.4,
        1e-4,
    );

    let h = gaussian_qfi(&family)?;
    println!("H(eta = 0.4) = {h:.10}");
    println!("single-shot bound on the standard deviation: {:.6}", 1.0 / h.sqrt());

    let sld = gaussian_sld(&family)?;
    println!("SLD quadratic part\n{:.6}", sld.quad);
    println!("SLD linear part {:.6?}, constant {:.6}", sld.lin.as_slice(), sld.c0);

    let st = family.state_at(family.lambda0)?;
    let opt = optimal_observable(&family)?;
    let (mean, var) = observable_moments(&st, &opt)?;
    println!("optimal observable: mean {mean:.10} (unbiased at 0.4), var * H = {:.10}", var * h);

    // Thermal occupation as the parameter: H = 1 / (n (n + 1)).
    for n in [0.1, 1.0, 10.0] {
        let fam = GaussianFamily::new(|x| thermal(1, x), n, 1e-4);
        println!("thermal n = {n:>4}: H = {:.8}, 1/(n(n+1)) = {:.8}", gaussian_qfi(&fam)?, 1.0 / (n * (n + 1.0)));
    }
    Ok(())
}
