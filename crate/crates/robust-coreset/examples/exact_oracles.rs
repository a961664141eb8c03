//! The reference solvers: exact brute force over independent sets and the
//! offline greedy baseline, here on a facility-location instance under an
//! intersection of two matroids.
//!
//! ```bash
//! cargo run -p robust-coreset --example exact_oracles
//! ```

use robust_coreset::instance::{generate_synthetic, GenConfig, GenKind};
use robust_coreset::matroid::PMatroid;
use robust_coreset::reference::{brute_force_opt, greedy};
use robust_coreset::submodular::UtilityOracle;

fn main() -> anyhow::Result<()> {
    let mut config = GenConfig::new(GenKind::FacilityRandom, 14, 4);
    config.clients = 6;
    config.partition = Some((5, 1)); // uniform k=4 intersected with 5 groups of cap 1
    let instance = generate_synthetic(&config, 21)?;
    let oracle = UtilityOracle::from_instance(&instance)?;
    let pm = PMatroid::from_instance(&instance)?;

    println!(
        "facility instance: n = {}, {} clients, p = {} matroids, rank = {}",
        instance.n(),
        6,
        pm.p(),
        pm.rank_bound()?
    );

    let (optimum_set, optimum) = brute_force_opt(&oracle, &pm, &instance.ground_set())?;
    println!("\nbrute force: f* = {optimum} at {optimum_set:?}");
    println!("             ({} oracle queries)", oracle.query_count());

    let greedy_oracle = oracle.clone();
    let chosen = greedy(&greedy_oracle, &pm, &instance.ground_set())?;
    let greedy_value = greedy_oracle.eval(&chosen)?;
    println!("\ngreedy:      f = {greedy_value} at {chosen:?}");
    println!(
        "             ({} oracle queries)",
        greedy_oracle.query_count()
    );

    let p = pm.p() as f64;
    println!(
        "\ngreedy / optimum = {:.3} (guaranteed at least 1/(p+1) = {:.3})",
        greedy_value / optimum,
        1.0 / (p + 1.0)
    );
    Ok(())
}
