//! The full three-stage pipeline: stream into a buffered coreset, let a
//! static adversary delete items, rebuild, and compare against both the
//! unbuffered baseline and the post-deletion optimum.
//!
//! ```bash
//! cargo run -p robust-coreset --example robust_pipeline
//! ```

use robust_coreset::adversary::{make_deletion_set, AdversaryModel};
use robust_coreset::instance::{generate_synthetic, GenConfig, GenKind, ItemSet};
use robust_coreset::matroid::PMatroid;
use robust_coreset::reference::{brute_force_opt, nonrobust_baseline};
use robust_coreset::robust::{self, rebuild_after_deletion, RobustParams};
use robust_coreset::submodular::UtilityOracle;

fn main() -> anyhow::Result<()> {
    let mut config = GenConfig::new(GenKind::CoverageRandomBipartite, 24, 4);
    config.universe = 30;
    let instance = generate_synthetic(&config, 3)?;
    let oracle = UtilityOracle::from_instance(&instance)?;
    let pm = PMatroid::from_instance(&instance)?;

    let params = RobustParams::new(1.0, 0.25, 3)?;
    println!(
        "n = {}, k = {}, deletion budget d = {}, buffer capacity B = ceil(d/eps) = {}",
        instance.n(),
        pm.rank_bound()?,
        params.deletions,
        params.buffer_capacity()
    );

    // Stage 1: stream through the randomized buffer.
    let outcome = robust::run(&oracle, &pm, &instance.stream(), params, 2024)?;
    let coreset = outcome.coreset(&pm)?;
    println!(
        "\nstage 1: solution {:?} + buffer of {} = coreset of {} items (bound {})",
        outcome.state().solution(),
        outcome.buffer().len(),
        coreset.size,
        coreset.bound
    );
    println!(
        "         {} draws, {} oracle queries",
        outcome.draw_log().len(),
        oracle.query_count()
    );

    // Stage 2: the adversary deletes the d heaviest singletons. It never sees
    // the algorithm's random bits, so this is computed from the instance alone.
    let deletions = make_deletion_set(
        &AdversaryModel::TopSingletons,
        &instance,
        &oracle.clone(),
        &pm,
        3,
    )?;
    println!("\nstage 2: adversary deletes {:?}", deletions.ids());

    // Stage 3: replay the surviving buffer and drop the deleted items.
    let rebuilt = rebuild_after_deletion(&outcome, &pm, &oracle, &deletions)?;
    println!(
        "\nstage 3: final solution {:?} with f = {}",
        rebuilt.final_solution, rebuilt.value
    );

    // Context: what was at stake.
    let survivors: ItemSet = instance
        .ground_set()
        .difference(deletions.ids())
        .copied()
        .collect();
    let (_, optimum_after) = brute_force_opt(&oracle, &pm, &survivors)?;
    let baseline = nonrobust_baseline(
        &oracle,
        &pm,
        &instance.stream(),
        params.alpha,
        deletions.ids(),
    )?;
    println!(
        "\nrecovered / optimum-after-deletion: {} / {}",
        rebuilt.value, optimum_after
    );
    println!("unbuffered baseline after the same deletions: {baseline}");
    Ok(())
}
