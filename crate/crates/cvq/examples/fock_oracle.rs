//! Cross-checking Gaussian closed forms in a truncated photon-number basis.
//!
//! The oracle never sees a covariance matrix: it builds kets and density
//! matrices level by level. Agreement with the phase-space formulas is the
//! whole point, so each line prints both numbers and the truncation leakage.

use cvq::entanglement::{negativity, BipartiteCM};
use cvq::fock::{
    displacement, negativity_fock, negativity_pure, photon_subtract, standard_form_density, tmsv_ket,
};
use cvq::gaussian::{tmsv, tmst};
use cvq::Result;
use num_complex::Complex64 as C;

fn main() -> Result<()> {
    println!("squeezed vacuum, pure-state route");
    for r in [0.2, 0.6, 1.0] {
        let ket = tmsv_ket(r, 60);
        let gauss = negativity(&BipartiteCM::from_state(&tmsv(r))?)?;
        println!("  r = {r}: fock {:.10}  gaussian {gauss:.10}", negativity_pure(&ket)?);
    }

    println!("squeezed thermal, partial-transpose spectrum");
    for (r, n) in [(0.3, 0.05), (0.5, 0.2)] {
        let cm = BipartiteCM::from_state(&tmst(r, n)?)?;
        let (a, b, g) = cm.standard_params().expect("squeezed thermal states are in standard form");
        let rho = standard_form_density(a, b, g, 24)?;
        println!(
            "  r = {r}, n = {n}: fock {:.10}  gaussian {:.10}  leakage {:.1e}",
            negativity_fock(&rho)?,
            negativity(&cm)?,
            rho.leakage()
        );
    }

    // One photon removed from each arm: Schmidt weights (n+1)^2 lambda^2n.
    let (sub, weight) = photon_subtract(&tmsv_ket(0.5, 60), &[1, 1])?;
    println!("a_A a_B on r = 0.5: norm^2 before renormalizing {weight:.6}, negativity {:.6}", negativity_pure(&sub)?);

    // D(a) D(b) = exp((a b* - a* b)/2) D(a + b), checked on the low levels.
    let (a, b) = (C::new(0.4, 0.1), C::new(-0.2, 0.3));
    let lhs = displacement(40, a) * displacement(40, b);
    let phase = ((a * b.conj() - a.conj() * b) * 0.5).exp();
    let rhs = displacement(40, a + b) * phase;
    let err = (0..10)
        .flat_map(|i| (0..10).map(move |j| (i, j)))
        .map(|(i, j)| (lhs[(i, j)] - rhs[(i, j)]).norm())
        .fold(0.0, f64::max);
    println!("displacement composition, worst entry on 10 levels: {err:.2e}");
    Ok(())
}
