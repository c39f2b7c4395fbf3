//! Translational knowledge-graph embeddings: training, evaluation, export.

mod checkpoint;
mod config;
mod eval;
mod model;
mod train;

pub use checkpoint::{export_entities_tsv, load_model, save_model};
pub use config::{KgeConfig, Norm};
pub use eval::{link_prediction_eval, ranks_for, LinkPredictionReport};
pub use model::{index_graph, init_model, GraphIndex, KgeModel};
pub use train::{negative_sample, pair_loss, train, train_epoch};
