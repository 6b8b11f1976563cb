// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Plain-text CSV emission. Floats are written with 17 significant digits so
//! that values round-trip exactly.

use std::fmt::Write;

/// Formats `v` in scientific notation with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a header line plus one line per row.
pub fn csv_string<R>(header: &[&str], rows: R) -> String
where
    R: IntoIterator,
    R::Item: AsRef<[f64]>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row.as_ref() {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}
