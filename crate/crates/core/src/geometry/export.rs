//! Plain-text patch dump.
//!
//! ```text
//! # iga-contact patch v1
//! dim <d>
//! degrees <p_0> ... <p_{d-1}>
//! knots <dir> <k_0> <k_1> ...          (one line per direction)
//! controls <n>
//! <x> <y> [<z>] <w>                    (n lines, first direction fastest)
//! ```

use std::io::Write;

use crate::error::Result;
use crate::scalar::Real;

use super::NurbsPatch;

pub fn write_patch<T: Real, W: Write>(patch: &NurbsPatch<T>, mut out: W) -> Result<()> {
    let d = patch.dim();
    writeln!(out, "# iga-contact patch v1")?;
    writeln!(out, "dim {d}")?;
    let degrees: Vec<String> = (0..d).map(|k| patch.degree(k).to_string()).collect();
    writeln!(out, "degrees {}", degrees.join(" "))?;
    for k in 0..d {
        let kv: Vec<String> = patch.tensor().direction(k).knots().iter().map(|v| format!("{:.17e}", v.as_f64())).collect();
        writeln!(out, "knots {k} {}", kv.join(" "))?;
    }
    writeln!(out, "controls {}", patch.control_points().len())?;
    for (p, w) in patch.control_points().iter().zip(patch.space().weights()) {
        let coords: Vec<String> = p[..d].iter().map(|v| format!("{:.17e}", v.as_f64())).collect();
        writeln!(out, "{} {:.17e}", coords.join(" "), w.as_f64())?;
    }
    Ok(())
}
