//! Bit error rate against white noise level, averaged over random messages.
//!
//! cargo run --release --example noise_sweep -- 100

use vibrolink::metrics::{run_sweep, CellSpec, ExperimentSpec};

fn main() -> vibrolink::Result<()> {
    let messages = std::env::args().nth(1).map_or(100, |s| s.parse().expect("message count"));
    let sigmas = [0.0, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5];
    let cells = sigmas
        .iter()
        .map(|&s| CellSpec {
            white_sigma: Some(s),
            ..CellSpec::labelled(format!("sigma {s}"))
        })
        .collect();
    let spec = ExperimentSpec {
        name: "noise".into(),
        messages,
        cells,
        ..Default::default()
    };
    let report = run_sweep(&spec)?;
    println!("{:<10} {:>8} {:>8} {:>8} {:>9}", "cell", "mean", "p90", "flagged", "pwm err");
    for c in &report.cells {
        println!(
            "{:<10} {:>8.4} {:>8.4} {:>8} {:>9.4}",
            c.label,
            c.mean_ber,
            c.p90_ber,
            c.trials - c.accepted,
            c.mode_errors.pwm
        );
    }
    Ok(())
}
