//! Which symbol parameters get mixed up under moderate noise.
//!
//! cargo run --release --example confusion -- 0.3

use vibrolink::metrics::{run_cell, CellSpec, ExperimentSpec};

const NAMES: [&str; 8] = ["pwm20", "pwm30", "pwm60", "pwm100", "on250", "on500", "off150", "off300"];

fn main() -> vibrolink::Result<()> {
    let sigma = std::env::args().nth(1).map_or(0.25, |s| s.parse().expect("noise sigma"));
    let spec = ExperimentSpec {
        name: "confusion".into(),
        messages: 100,
        ..Default::default()
    };
    let cell = CellSpec {
        white_sigma: Some(sigma),
        ..CellSpec::labelled("moderate")
    };
    let r = run_cell(&spec, &cell)?;

    print!("{:>8}", "sent\\got");
    for n in NAMES {
        print!("{n:>8}");
    }
    println!();
    for (name, row) in NAMES.iter().zip(&r.confusion.counts) {
        print!("{name:>8}");
        for c in row {
            print!("{c:>8}");
        }
        println!();
    }
    let e = r.mode_errors;
    println!("error rates: pwm {:.4}  on {:.4}  off {:.4}", e.pwm, e.on, e.off);
    println!(
        "{} of {} PWM errors between neighbouring levels",
        r.confusion.adjacent_pwm_errors(),
        r.confusion.pwm_errors()
    );
    Ok(())
}
