//! Full four-bit symbols against two-bit time-only symbols, and what
//! happens when every ON/OFF duration is shortened to go faster.
//!
//! cargo run --release --example speed_tradeoff

use vibrolink::framing::Mode;
use vibrolink::metrics::{run_sweep, CellSpec, ExperimentSpec};

fn main() -> vibrolink::Result<()> {
    let mut cells = Vec::new();
    for mode in [Mode::Full, Mode::TimeOnly] {
        for scale in [1.0, 0.85, 0.7, 0.55] {
            cells.push(CellSpec {
                white_sigma: Some(0.15),
                mode: Some(mode),
                time_scale: Some(scale),
                ..CellSpec::labelled(format!("{mode:?} x{scale}"))
            });
        }
    }
    let spec = ExperimentSpec {
        name: "speed".into(),
        messages: 60,
        cells,
        ..Default::default()
    };
    for c in run_sweep(&spec)?.cells {
        println!("{:<16} {:>6.2} bps  mean BER {:.4}", c.label, c.mean_bit_rate_bps, c.mean_ber);
    }
    Ok(())
}
