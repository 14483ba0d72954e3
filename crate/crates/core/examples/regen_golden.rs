//! Regenerates `tests/data/prolate_golden.txt` from the Nyström oracle.
//!
//! A value is only written when doubling the node count moves it by at most
//! 1e-12; otherwise the program stops with an error.
//!
//! ```text
//! cargo run --release --example regen_golden > crates/core/tests/data/prolate_golden.txt
//! ```

use std::io::{self, Write};

use coarse_eur::prolate::{lambda0_nystrom, write_golden, GoldenRecord, DEFAULT_NODES};

const CS: [f64; 8] = [0.1, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 12.0];

fn main() -> coarse_eur::Result<()> {
    let mut records = Vec::new();
    for c in CS {
        let base = lambda0_nystrom(c, DEFAULT_NODES)?;
        let doubled = lambda0_nystrom(c, 2 * DEFAULT_NODES)?;
        let moved = (base.lambda0 - doubled.lambda0).abs();
        if moved > 1e-12 {
            return Err(coarse_eur::Error::Numerical(format!(
                "c = {c}: doubling nodes moved lambda0 by {moved:e}"
            )));
        }
        records.push(GoldenRecord::from((&base, DEFAULT_NODES)));
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "# c lambda0 deficit nodes (Nystrom, Gauss-Legendre)")?;
    write_golden(&mut out, &records)?;
    Ok(())
}
