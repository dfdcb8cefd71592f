//! Discovery of acyclic directly-follows graphs from acyclic event logs.
//!
//! The log is split into sublogs whose standard DFGs are acyclic
//! ([`partition`]); their models are merged pairwise without creating cycles
//! ([`merge`], [`rename`]), duplicating vertices where fusing them would.
//! [`conformance`] scores the result against the (renamed) log.

pub mod conformance;
pub mod dfg;
pub mod event_log;
pub mod fixtures;
pub mod fvs;
pub mod merge;
pub mod partition;
pub mod pipeline;
pub mod rename;
pub mod synth;

pub use conformance::{evaluate, fitness, precision, rename_log, ConformanceError, MetricsReport, Timing};
pub use dfg::{
    count_simple_cycles, discover_dfg, is_acyclic, is_run, model_stats, perfectly_fits, to_dot, CycleCount, Dfg,
    DfgBuilder, ModelError, ModelStats, VertexId, VertexLabel, END, START,
};
pub use event_log::{parse_log, write_log, Activity, EventLog, LogConfig, LogError, Trace};
pub use fvs::{min_fvs, Digraph, FvsResult};
pub use merge::{common_subgraphs, merge_pair, CommonSubgraph, ConnectivityGraph, MergeError, MergeMode, MergedModel, RenameMap};
pub use partition::{partition_log, read_grouping, write_grouping, CompatibilityGraph, Manifest, Partition, PartitionError};
pub use pipeline::{discover, Discovery, PipelineConfig, PipelineError};
pub use rename::{greedy_rename, merge_many, merge_with_duplicates, RenamePlan, RenameTree};
