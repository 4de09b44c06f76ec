//! Exact-arithmetic combinatorics of root data, Galois forms, endoscopic
//! triples, and cocharacter sums.

pub mod endoscopy;
pub mod galois;
pub mod kottwitz;
pub mod levi;
pub mod groups;
pub mod lattice;
pub mod report;
pub mod root_datum;

pub use endoscopy::{EndoTriple, OutGroup, SsPair};
pub use galois::{GaloisForm, GaloisGen, RelativeRoot};
pub use kottwitz::{EndoCochainSum, EndoCochar, KottwitzPoint};
pub use levi::{EmbeddedDatum, HLevi, SlopeDatum, ValuationElt};
pub use report::{ClassId, Report};
pub use lattice::{LatAut, LatVec, RatVec, TorsionVec};
pub use root_datum::{BasedRootDatum, RootDatum, StdLevi, WeylElt, WeylGroup};
