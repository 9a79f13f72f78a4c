//! Error rate for the three places a phone can rest on the device.
//!
//! cargo run --release --example placement

use vibrolink::channel::Placement;
use vibrolink::metrics::{run_sweep, CellSpec, ExperimentSpec};

fn main() -> vibrolink::Result<()> {
    let cells = Placement::ALL
        .iter()
        .map(|&p| CellSpec {
            white_sigma: Some(0.25),
            placement: Some(p),
            ..CellSpec::labelled(p.name())
        })
        .collect();
    let spec = ExperimentSpec {
        name: "placement".into(),
        messages: 60,
        cells,
        ..Default::default()
    };
    for (p, c) in Placement::ALL.iter().zip(run_sweep(&spec)?.cells) {
        println!("{:<8} attenuation {:.2}  mean BER {:.4}", c.label, p.attenuation(), c.mean_ber);
    }
    Ok(())
}
