//! Ingestion: parse detector annotation documents, apply post-processing
//! rules (color snapping, object thresholding) and reify them into triples.

mod align;
mod color;
mod doc;
mod reify;

pub use align::AlignmentTable;
pub use color::{nearest_css3_color, Css3ColorTable};
pub use doc::{
    filter_objects, load_annotations, parse_annotations, AnnotationDoc, Detections, HumanPresence,
    ScoredLabel, SituationMeta, UNIT_KEYS,
};
pub use reify::{Reifier, ROLE_UNITS};
