//! How far entanglement survives in air, and what weather does to it.
//!
//! The attenuation density for a given reach is found by inversion, which is
//! how the humid-air presets are calibrated. An inhomogeneous path is
//! integrated numerically, and a cryogenic amplifier on one arm shows that
//! amplification only ever removes entanglement.

use cvq::channel::{
    bose_einstein, eta_env_inhomogeneous, hemt_amplify, l_max, lossy_tmst, mu_for_reach, AirChannel, Geometry,
    MU_OXYGEN,
};
use cvq::entanglement::negativity;
use cvq::presets::PresetFile;
use cvq::Result;

fn main() -> Result<()> {
    let n_th = bose_einstein(5e9, 300.0)?;
    println!("thermal photons at 5 GHz: 300 K {n_th:.2}, 2.7 K {:.3}", bose_einstein(5e9, 2.7)?);

    let (r, n) = (1.0, 1e-2);
    let dry = AirChannel::new(MU_OXYGEN, 0.0, n_th, 0.0)?;
    println!(
        "dry air: reach {:.2} m (asym), {:.2} m (sym)",
        l_max(&dry, r, n, Geometry::Asym)?,
        l_max(&dry, r, n, Geometry::Sym)?
    );

    let presets = PresetFile::builtin();
    for name in ["water_avg", "water_max"] {
        let p = presets.resolve(name)?;
        let ch = AirChannel::new(p.f64("mu")?, 0.0, p.f64("n_th")?, p.f64("eta_ant")?)?;
        println!(
            "{name}: mu = {:.4e} /m, reach {:.2} m (asym), {:.2} m (sym)",
            p.f64("mu")?,
            l_max(&ch, r, n, Geometry::Asym)?,
            l_max(&ch, r, n, Geometry::Sym)?
        );
    }
    println!("attenuation for a 300 m reach: {:.4e} /m", mu_for_reach(300.0, r, n, 1250.0)?);

    // A fog bank between 200 m and 300 m triples the attenuation.
    let fog = |x: f64| if (200.0..300.0).contains(&x) { 3.0 * MU_OXYGEN } else { MU_OXYGEN };
    let (eta, n_eff) = eta_env_inhomogeneous(fog, |_| n_th, 400.0)?;
    println!("400 m through fog: reflectivity {eta:.6}, effective photons {n_eff:.2}");

    let cm = lossy_tmst(&dry.at_distance(100.0), r, n, Geometry::Asym)?;
    println!("\nnegativity at 100 m: {:.6}", negativity(&cm)?);
    for gain in [1.0, 10.0, 100.0] {
        let amp = hemt_amplify(&cm, gain, 5.0, &[1])?;
        println!("  after gain {gain:>5} on the far arm: {:.6}", negativity(&amp)?);
    }
    Ok(())
}
