//! Ground-to-satellite link budget at 5 GHz.

use cvq::channel::{
    directivity, entanglement_region, friis, fspl, preservation_threshold, tau_diffraction, tau_path, Geometry,
    LinkGeometry,
};
use cvq::Result;

fn main() -> Result<()> {
    let base = LinkGeometry {
        nu: 5e9,
        d: 1000.0,
        a: 1.0,
        e_a: 1.0,
        w0: 0.5,
        a_r: 1.0,
        r0: 1000.0,
    };
    println!("wavelength {:.4} m, Rayleigh range {:.2} m", base.wavelength(), base.rayleigh_range());
    println!("directivity of a 1 m dish {:.2}", directivity(base.a, base.nu, base.e_a));

    println!("\n{:>10} {:>12} {:>12} {:>12} {:>12}", "d [m]", "FSPL [dB]", "Friis", "tau_path", "tau_diff");
    for d in [1e2, 1e3, 1e4, 1e5, 5e5] {
        let g = LinkGeometry { d, r0: d, ..base };
        println!(
            "{d:>10.0} {:>12.2} {:>12.4e} {:>12.4e} {:>12.6}",
            fspl(g.nu, d).1,
            friis(&g)?,
            tau_path(&g)?,
            tau_diffraction(&g)?
        );
    }

    let n_th = 11.0;
    let asym = preservation_threshold(n_th, 1.0, Geometry::Asym);
    let sym = preservation_threshold(n_th, 1.0, Geometry::Sym);
    println!("\nlargest loss keeping entanglement at {n_th} photons: asym {asym:.4}, sym {sym:.4}");
    for d in [1e3, 1e4, 1e5] {
        println!("  d = {d:>8.0} m needs a_R w0 >= {:.2} m^2", entanglement_region(base.wavelength(), sym, d));
    }
    Ok(())
}
