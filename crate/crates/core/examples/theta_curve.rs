//! Minimal end-to-end use of the library: simulate coupled pairs for a
//! heavy-tailed moving average and print the estimated stability curve.

use tailstab_core::coefficients::CoefficientSeq;
use tailstab_core::heavy_tails::{Family, TailLaw};
use tailstab_core::processes::{simulate_coupled, ProcessSpec};
use tailstab_core::tas::{estimate_theta_curve, GridPolicy};

fn main() -> tailstab_core::Result<()> {
    let innovation = TailLaw::new(Family::Pareto, 3.0, 1.0, 1.0)?;
    let coeffs = CoefficientSeq::power_decay(3.0, 1.0, 1.0, 1e-4)?;
    let spec = ProcessSpec::linear(innovation, coeffs)?;
    let draws = simulate_coupled(&spec, &[1, 2, 3, 4], 100_000, 7)?;
    let est = estimate_theta_curve(&draws, 3.0, &GridPolicy::default())?;
    for lag in &est.per_lag {
        println!("theta({}) = {:.4} (<= {:.4})", lag.lag, lag.theta_hat, lag.upper_conf);
    }
    Ok(())
}
