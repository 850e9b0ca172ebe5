//! Building and transforming Gaussian states.
//!
//! A squeezed thermal pair goes through a lossy beam splitter that mixes one
//! arm with a hot bath. We print the covariance matrix, its symplectic
//! spectrum and the purity at each step.
//!
//! ```bash
//! cargo run --example gaussian_states
//! ```

use cvq::gaussian::{
    apply, beam_splitter, partial_trace, purity, symplectic_eigenvalues, thermal, tmst, ModeSubset,
};
use cvq::Result;

fn show(label: &str, st: &cvq::GaussianState) -> Result<()> {
    let nu = symplectic_eigenvalues(st.sigma())?;
    println!("{label}");
    println!("  symplectic spectrum {nu:.6?}");
    println!("  purity {:.6}", purity(st)?);
    Ok(())
}

fn main() -> Result<()> {
    let pair = tmst(0.8, 0.05)?;
    print!("two-mode squeezed thermal, r = 0.8, n = 0.05{}", pair.sigma());
    show("source", &pair)?;

    // Third mode is the environment at 20 photons.
    let world = pair.tensor(&thermal(1, 20.0)?);
    let mixed = apply(&world, &beam_splitter(0.9)?, &ModeSubset::new(&[1, 2])?)?;
    show("after the splitter (three modes, still global unitary)", &mixed)?;

    let kept = partial_trace(&mixed, &ModeSubset::new(&[0, 1])?)?;
    print!("received pair{}", kept.sigma());
    show("received pair", &kept)?;
    println!("physical: {}", kept.is_physical());
    Ok(())
}
