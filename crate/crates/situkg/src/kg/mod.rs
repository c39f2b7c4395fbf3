//! Triple store with canonical serialization, pattern queries, the
//! anti-leakage filter and the shared-node query.

mod graph;
mod leakage;
mod ntriples;
mod shared;
mod term;

pub use graph::Graph;
pub use leakage::{default_forbidden, filter_leakage, AC_LABELS};
pub use ntriples::{load_graph, parse_ntriples, parse_term, save_graph, serialize_ntriples};
pub use shared::{shared_nodes, shared_nodes_map, SharedNodesOptions};
pub use term::{Iri, Literal, Term, Triple};
