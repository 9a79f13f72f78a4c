//! Decoding the same noisy corpus at the native 700 Hz and after
//! resampling to the lower rates typical of phone sensor APIs.
//!
//! cargo run --release --example sampling_rate

use vibrolink::metrics::{run_sweep, CellSpec, ExperimentSpec};

fn main() -> vibrolink::Result<()> {
    let cells = [700.0, 500.0, 400.0, 200.0]
        .iter()
        .map(|&rate| CellSpec {
            white_sigma: Some(0.15),
            sample_rate: Some(rate),
            ..CellSpec::labelled(format!("{rate} Hz"))
        })
        .collect();
    let spec = ExperimentSpec {
        name: "sampling rate".into(),
        messages: 60,
        cells,
        ..Default::default()
    };
    for c in run_sweep(&spec)?.cells {
        println!(
            "{:<8} mean BER {:.4}  pilot missing {:>3}  length mismatch {:>3}",
            c.label, c.mean_ber, c.flags.pilot_not_found, c.flags.length_mismatch
        );
    }
    Ok(())
}
