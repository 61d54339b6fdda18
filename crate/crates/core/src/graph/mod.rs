//! Labeled world graphs and the sender/receiver views drawn from them.

mod alphabet;
mod channel;
mod format;
mod generate;
mod multigraph;
mod world;

pub use alphabet::{Label, LabelAlphabet, LabelDistribution, NULL, NULL_SYMBOL};
pub use channel::ChannelNoiseModel;
pub use format::{parse_graph, write_graph};
pub use generate::{
    generate_clique, generate_er_labeled, generate_path, generate_ring_regular, perturb_view, ViewPair,
};
pub use multigraph::{reduce_multigraph, DirectedArc, ReducedGraph, MAX_MULTIGRAPH_LABELS};
pub use world::{max_nodes, set_max_nodes, NodeNames, WorldGraph, DEFAULT_MAX_NODES};
