//! The bundled MO3 reference system: lattice, three two-valued observables
//! and the listed values of an arity-3 s-map (corrected and raw).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::Result;
use crate::json::{observables_from_doc, ObservableSetDoc, SMapDoc};
use crate::lattice::{Lattice, LatticeDescription};
use crate::observable::Observable;
use crate::smap::PartialSMap;

pub const MO3_JSON: &str = include_str!("../fixtures/mo3.json");
pub const OBSERVABLES_JSON: &str = include_str!("../fixtures/observables.json");
pub const PARTIAL_JSON: &str = include_str!("../fixtures/example31_partial.json");
pub const RAW_JSON: &str = include_str!("../fixtures/example31_raw.json");

pub fn lattice() -> Arc<Lattice> {
    let desc: LatticeDescription = serde_json::from_str(MO3_JSON).expect("bundled lattice parses");
    Arc::new(Lattice::from_description(&desc).expect("bundled lattice is an OML"))
}

/// `x1`, `x2`, `x3` on `lattice`.
pub fn observables(lattice: &Arc<Lattice>) -> BTreeMap<String, Observable> {
    let doc: ObservableSetDoc = serde_json::from_str(OBSERVABLES_JSON).expect("bundled observables parse");
    observables_from_doc(lattice.clone(), &doc).expect("bundled observables are valid")
}

/// The listed values, corrected unless `raw`.
pub fn partial(lattice: &Arc<Lattice>, raw: bool) -> Result<PartialSMap> {
    let doc: SMapDoc = serde_json::from_str(if raw { RAW_JSON } else { PARTIAL_JSON })?;
    doc.to_partial(lattice.clone())
}
