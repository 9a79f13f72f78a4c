//! Symbol deletions are caught by the length check and the message is sent
//! again. Prints how many deletions were injected and caught, and the error
//! rate of what the receiver finally accepted.
//!
//! cargo run --release --example retransmission

use vibrolink::metrics::{run_cell, CellSpec, ExperimentSpec};

fn main() -> vibrolink::Result<()> {
    let spec = ExperimentSpec {
        name: "retransmit".into(),
        messages: 200,
        ..Default::default()
    };
    for retries in [0, 1, 3] {
        let cell = CellSpec {
            white_sigma: Some(0.2),
            deletion_probability: 0.2,
            max_retries: retries,
            ..CellSpec::labelled(format!("{retries} retries"))
        };
        let r = run_cell(&spec, &cell)?;
        println!(
            "{:<10} deletions {:>3}/{:<3} caught  resent {:>3}  accepted {:>3}/{}  accepted BER {:.4}  overall BER {:.4}",
            r.label,
            r.deletions_flagged,
            r.deletions_injected,
            r.retransmissions,
            r.accepted,
            r.trials,
            r.accepted_mean_ber,
            r.mean_ber
        );
    }
    Ok(())
}
