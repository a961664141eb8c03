//! The plain streaming pass: watch items arrive one by one, see which swaps
//! happen, and compare the frozen solution weight against the exact optimum.
//!
//! ```bash
//! cargo run -p robust-coreset --example streaming_exchange
//! ```

use robust_coreset::exchange::{c_alpha, ExchangeState, StepDecision};
use robust_coreset::instance::{generate_synthetic, GenConfig, GenKind};
use robust_coreset::matroid::PMatroid;
use robust_coreset::reference::brute_force_opt;
use robust_coreset::submodular::UtilityOracle;

fn main() -> anyhow::Result<()> {
    let mut config = GenConfig::new(GenKind::CoverageRandomBipartite, 16, 3);
    config.universe = 20;
    let instance = generate_synthetic(&config, 11)?;
    let oracle = UtilityOracle::from_instance(&instance)?;
    let pm = PMatroid::from_instance(&instance)?;

    let alpha = 1.0;
    let mut state = ExchangeState::new(alpha)?;
    println!(
        "streaming {} items under a uniform k=3 constraint (alpha = {alpha}):\n",
        instance.n()
    );
    for v in instance.stream() {
        match state.step(&pm, &oracle, v)? {
            StepDecision::Accepted { swapped_out } if swapped_out.is_empty() => {
                println!(
                    "  {v:>3}  accepted (weight {})",
                    state.weight_of(v).unwrap()
                );
            }
            StepDecision::Accepted { swapped_out } => {
                let evicted: Vec<String> = swapped_out.iter().map(|id| id.to_string()).collect();
                println!(
                    "  {v:>3}  accepted (weight {}), evicting {{{}}}",
                    state.weight_of(v).unwrap(),
                    evicted.join(", ")
                );
            }
            StepDecision::Rejected => println!("  {v:>3}  rejected"),
        }
    }

    let solution: Vec<String> = state.solution().iter().map(|id| id.to_string()).collect();
    println!("\nfinal solution  I = {{{}}}", solution.join(", "));
    println!("frozen weight   w(I) = {}", state.solution_weight());
    println!("actual utility  f(I) = {}", oracle.eval(state.solution())?);
    println!(
        "swapped-out weight w(K) = {} (alpha * w(K) <= w(I))",
        state.swapped_weight()
    );

    let (optimum_set, optimum) = brute_force_opt(&oracle, &pm, &instance.ground_set())?;
    let constant = c_alpha(alpha, pm.p());
    println!("\nexact optimum f* = {optimum} at {optimum_set:?}");
    println!(
        "guarantee: f* <= c_alpha * w(I) = {} * {} = {}",
        constant,
        state.solution_weight(),
        constant * state.solution_weight()
    );
    Ok(())
}
