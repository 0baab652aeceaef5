//! Drive the run orchestration as a library: write a config, run the
//! conservation and monotonicity suites into a scratch directory, read
//! a checkpoint back, then sweep two configs concurrently.

use gbo_lab::runner::{
    parse_config, read_checkpoint, run, sweep, RunStatus, Suite,
};

fn main() {
    let scratch = std::env::temp_dir().join("gbo_lab_sweep_example");
    let _ = std::fs::remove_dir_all(&scratch);
    std::fs::create_dir_all(&scratch).unwrap();

    let cfg_path = scratch.join("config.json");
    std::fs::write(
        &cfg_path,
        r#"{
  "k": 6, "N": 256, "L": 100.0, "dt": 0.005, "t_end": 0.5,
  "snapshot_every": 10, "checkpoint_every": 50,
  "data": { "family": "gaussian", "amp": 0.4, "width": 4.0 },
  "gap_samples": 50
}"#,
    )
    .unwrap();
    let config = parse_config(&cfg_path).unwrap();

    let out = scratch.join("single");
    let (status, outcomes) = run(&config, &[Suite::Conservation, Suite::Monotonicity], &out);
    for o in &outcomes {
        println!("suite {:15} passed = {}", o.suite, o.passed);
        for note in &o.notes {
            println!("  {note}");
        }
    }
    assert_eq!(status, RunStatus::Pass, "suites must pass");

    let state = read_checkpoint(&out.join("final.ckpt")).unwrap();
    println!(
        "final checkpoint: t = {}, k = {}, N = {}",
        state.t,
        state.k,
        state.u.grid().len()
    );
    assert!((state.t - 0.5).abs() < 1e-12);

    let mut second = config.clone();
    second.seed = 99;
    let status = sweep(
        &[config, second],
        &[Suite::Conservation],
        &scratch.join("sweep"),
        2,
    )
    .unwrap();
    assert_eq!(status, RunStatus::Pass);
    println!("sweep finished; artifacts under {}", scratch.display());
}
