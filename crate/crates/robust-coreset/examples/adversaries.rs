//! Compare deletion strategies: the damage each static adversary does to the
//! buffered pipeline (averaged over seeds, since stage one is randomized)
//! versus the deterministic unbuffered stream under the same deletions.
//!
//! ```bash
//! cargo run -p robust-coreset --example adversaries
//! ```

use robust_coreset::adversary::{make_deletion_set, AdversaryModel};
use robust_coreset::instance::{generate_synthetic, GenConfig, GenKind, ItemSet};
use robust_coreset::matroid::PMatroid;
use robust_coreset::reference::{brute_force_opt, nonrobust_baseline};
use robust_coreset::robust::{self, rebuild_after_deletion, RobustParams};
use robust_coreset::submodular::UtilityOracle;

fn main() -> anyhow::Result<()> {
    let config = GenConfig::new(GenKind::ModularUniform, 24, 4);
    let instance = generate_synthetic(&config, 8)?;
    let oracle = UtilityOracle::from_instance(&instance)?;
    let pm = PMatroid::from_instance(&instance)?;
    let params = RobustParams::new(1.0, 0.25, 3)?;
    let seeds = 50u64;

    let models = [
        AdversaryModel::Random { seed: 1 },
        AdversaryModel::TopSingletons,
        AdversaryModel::GreedyAttack,
        AdversaryModel::Fixed(vec![]),
    ];

    println!("mean rebuilt value over {seeds} seeds vs the unbuffered baseline:\n");
    println!(
        "{:<12} {:>18} {:>14} {:>10} {:>10}",
        "adversary", "deleted", "mean rebuilt", "baseline", "optimum"
    );
    for model in models {
        // Static: depends only on (instance, d, adversary seed).
        let deletions = make_deletion_set(&model, &instance, &oracle.clone(), &pm, 3)?;

        let mut total = 0.0;
        for seed in 0..seeds {
            let outcome = robust::run(&oracle.clone(), &pm, &instance.stream(), params, seed)?;
            total += rebuild_after_deletion(&outcome, &pm, &oracle.clone(), &deletions)?.value;
        }
        let mean_rebuilt = total / seeds as f64;

        let baseline = nonrobust_baseline(
            &oracle.clone(),
            &pm,
            &instance.stream(),
            params.alpha,
            deletions.ids(),
        )?;
        let survivors: ItemSet = instance
            .ground_set()
            .difference(deletions.ids())
            .copied()
            .collect();
        let (_, optimum) = brute_force_opt(&oracle.clone(), &pm, &survivors)?;

        let deleted: Vec<String> = deletions.ids().iter().map(|id| id.to_string()).collect();
        println!(
            "{:<12} {:>18} {:>14.1} {:>10} {:>10}",
            model.to_string(),
            format!("{{{}}}", deleted.join(",")),
            mean_rebuilt,
            baseline,
            optimum
        );
    }
    Ok(())
}
