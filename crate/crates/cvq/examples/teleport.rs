//! Teleportation fidelity over an open-air microwave link.

use cvq::channel::Geometry;
use cvq::teleport::{classical_limit_distance, fidelity_at, LinkSetup, Protocol};
use cvq::Result;

fn main() -> Result<()> {
    let setup = LinkSetup::table1();
    let protocols: Vec<(&str, Protocol)> = ["bare", "concat:2", "ps:0.95", "heuristic", "swap", "gain:0.008", "swap-gain:0.008"]
        .iter()
        .map(|s| (*s, s.parse().expect("protocol names above are valid")))
        .collect();

    for geometry in [Geometry::Asym, Geometry::Sym] {
        println!("{geometry:?} geometry");
        print!("{:>6}", "L [m]");
        for (name, _) in &protocols {
            print!(" {name:>15}");
        }
        println!();
        for l in (0..=600).step_by(100) {
            print!("{l:>6}");
            for (_, p) in &protocols {
                print!(" {:>15.6}", fidelity_at(&setup, geometry, *p, l as f64)?);
            }
            println!();
        }
        print!("{:>6}", "F=1/2");
        for (_, p) in &protocols {
            match classical_limit_distance(&setup, geometry, *p, 2000.0) {
                Ok(d) => print!(" {d:>13.2} m"),
                Err(_) => print!(" {:>15}", "-"),
            }
        }
        println!("\n");
    }
    Ok(())
}
