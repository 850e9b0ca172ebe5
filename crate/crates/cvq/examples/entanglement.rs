//! Negativity of a microwave squeezed pair sent through warm air, for both
//! link geometries, and the distance where it vanishes.

use cvq::channel::{l_max, lossy_tmst, nu_minus_at, AirChannel, Geometry, MU_OXYGEN};
use cvq::entanglement::{log_negativity, negativity};
use cvq::Result;

fn main() -> Result<()> {
    let (r, n, n_th) = (1.0, 1e-2, 1250.0);
    let ch = AirChannel::new(MU_OXYGEN, 0.0, n_th, 0.0)?;

    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "L [m]", "N asym", "E_N asym", "N sym", "E_N sym");
    for l in (0..=600).step_by(50) {
        let l = l as f64;
        let here = ch.at_distance(l);
        let a = lossy_tmst(&here, r, n, Geometry::Asym)?;
        let s = lossy_tmst(&here, r, n, Geometry::Sym)?;
        println!(
            "{l:>6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            negativity(&a)?,
            log_negativity(&a)?,
            negativity(&s)?,
            log_negativity(&s)?
        );
    }

    for g in [Geometry::Asym, Geometry::Sym] {
        let reach = l_max(&ch, r, n, g)?;
        println!("{g:?}: entangled up to {reach:.2} m (nu_minus there {:.9})", nu_minus_at(&ch, r, n, g, reach)?);
    }
    Ok(())
}
