//! Structure of the built-in CSS codes: distance, encoder length and the
//! syndrome lookup used by the decoder.

use clockforge::qlwc::{CssCode, PauliKind};

fn main() -> clockforge::Result<()> {
    for code in [CssCode::steane7(), CssCode::code422(), CssCode::identity(2)?] {
        println!(
            "{}: [[{}, {}, {}]] encoder {} gates, distance by search {}, stabilizers commute {}, encoder error {:.1e}",
            code.name,
            code.n,
            code.k,
            code.d,
            code.encoder_len(),
            code.brute_force_distance()?,
            code.stabilizers_commute(),
            code.encoder_stabilizer_error()?
        );
        if code.correctable() > 0 {
            for (syndrome, mask) in code.lookup_table(PauliKind::X) {
                println!("  X syndrome {syndrome:03b} -> flip mask {mask:0width$b}", width = code.n);
            }
        }
    }
    Ok(())
}
