//! Auditable randomness: every buffer draw is logged with its candidate
//! snapshot and probability, the log serializes to JSON lines, and a replay
//! of the logged choices reproduces the run exactly.
//!
//! ```bash
//! cargo run -p robust-coreset --example sampling_audit
//! ```

use robust_coreset::instance::{generate_synthetic, GenConfig, GenKind, ItemId};
use robust_coreset::matroid::PMatroid;
use robust_coreset::robust::{
    self, read_draw_trace, sample_buffer, write_draw_trace, Buffer, DrawSource, RobustParams,
};
use robust_coreset::submodular::UtilityOracle;

fn main() -> anyhow::Result<()> {
    // Draw frequencies follow inverse marginals: entries with cached gains
    // {1, 3} are picked with probabilities 3/4 and 1/4.
    let buffer = Buffer::with_entries(2, vec![(ItemId(0), 1.0), (ItemId(1), 3.0)]);
    let mut source = DrawSource::seeded(5);
    let mut counts = [0u32; 2];
    let draws = 50_000;
    for _ in 0..draws {
        counts[sample_buffer(&buffer, &mut source)?.chosen.0 as usize] += 1;
    }
    println!("inverse-marginal sampling over {draws} draws:");
    for (id, count) in counts.iter().enumerate() {
        println!(
            "  item {id} (gain {}): {:.4}",
            [1.0, 3.0][id],
            *count as f64 / draws as f64
        );
    }

    // A real run, its audit trace, and a faithful replay.
    let mut config = GenConfig::new(GenKind::CoverageRandomBipartite, 20, 3);
    config.universe = 24;
    let instance = generate_synthetic(&config, 13)?;
    let oracle = UtilityOracle::from_instance(&instance)?;
    let pm = PMatroid::from_instance(&instance)?;
    let params = RobustParams::new(1.0, 0.5, 2)?;

    let outcome = robust::run(&oracle, &pm, &instance.stream(), params, 77)?;
    println!(
        "\nrun with seed 77 made {} draws:",
        outcome.draw_log().len()
    );
    for (index, record) in outcome.draw_log().iter().enumerate().take(4) {
        println!(
            "  draw {index}: chose {} with p = {:.3} out of {} candidates",
            record.chosen,
            record.probability,
            record.candidates.len()
        );
    }

    let trace_path = std::env::temp_dir().join("robust-coreset-draws.jsonl");
    write_draw_trace(std::fs::File::create(&trace_path)?, outcome.draw_log())?;
    let replay_log = read_draw_trace(std::io::BufReader::new(std::fs::File::open(&trace_path)?))?;
    println!("\ntrace written to {} and read back", trace_path.display());

    let mut replay = DrawSource::replay(&replay_log);
    let replayed = robust::run_with_source(&oracle, &pm, &instance.stream(), params, &mut replay)?;
    assert_eq!(replayed.state().accept_log(), outcome.state().accept_log());
    assert_eq!(replayed.coreset_items(), outcome.coreset_items());
    println!("replaying the logged choices reproduced the identical outcome");
    Ok(())
}
