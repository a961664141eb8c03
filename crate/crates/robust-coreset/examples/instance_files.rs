//! Instance files end to end: generate a synthetic instance for each utility
//! kind, write it to disk, reload it, and validate it.
//!
//! ```bash
//! cargo run -p robust-coreset --example instance_files
//! ```

use robust_coreset::instance::{
    generate_synthetic, load_instance, validate_instance, GenConfig, GenKind, Instance,
};

fn main() -> anyhow::Result<()> {
    let out_dir = std::env::temp_dir().join("robust-coreset-instances");
    std::fs::create_dir_all(&out_dir)?;

    let mut coverage = GenConfig::new(GenKind::CoverageRandomBipartite, 10, 3);
    coverage.universe = 15;
    let mut facility = GenConfig::new(GenKind::FacilityRandom, 8, 2);
    facility.clients = 5;
    let mut modular_p2 = GenConfig::new(GenKind::ModularUniform, 12, 3);
    modular_p2.partition = Some((4, 1)); // second matroid: 4 groups, capacity 1

    for (label, config) in [
        ("modular-p2", modular_p2),
        ("coverage", coverage),
        ("facility", facility),
    ] {
        let instance = generate_synthetic(&config, 7)?;
        let path = out_dir.join(format!("{label}.json"));
        instance.write_to(&path)?;

        let reloaded = load_instance(&path)?;
        assert_eq!(instance, reloaded, "file format must round-trip");

        println!(
            "{label}: n={} p={} kind={} -> {}",
            reloaded.n(),
            reloaded.p(),
            reloaded.function.kind_name(),
            path.display()
        );
    }

    // Validation names each violation; nothing is rejected silently.
    let broken: Instance = Instance::from_json(
        r#"{
            "items": [{"id": 0}, {"id": 1}, {"id": 1}],
            "function": {"kind": "modular", "values": {"0": 1, "1": 2, "9": 3}},
            "matroids": [{"kind": "partition", "groups": [[0], [1]], "capacities": [1, -2]}]
        }"#,
    )?;
    let report = validate_instance(&broken);
    println!(
        "\na deliberately broken file produces {} issues:",
        report.issues().len()
    );
    print!("{report}");
    Ok(())
}
