use std::fmt::Write as _;

use rfsurrogate_core::fmt::f17;
use rfsurrogate_core::DesignSpace;

use crate::UncertaintyField;

/// One row per (candidate, frequency): `candidate_index,<axes>,frequency_hz,uncertainty`.
pub fn field_csv(field: &UncertaintyField, space: &DesignSpace) -> String {
    let mut out = String::from("candidate_index");
    for a in space.axes() {
        out.push(',');
        out.push_str(&a.name);
    }
    out.push_str(",frequency_hz,uncertainty\n");
    for (i, (id, p)) in field.ids.iter().zip(&field.candidates).enumerate() {
        let coords: String = p.values.iter().map(|v| format!(",{}", f17(*v))).collect();
        for (k, f) in field.grid.points().iter().enumerate() {
            let _ = writeln!(out, "{id}{coords},{},{}", f17(*f), f17(field.values[(i, k)]));
        }
    }
    out
}
