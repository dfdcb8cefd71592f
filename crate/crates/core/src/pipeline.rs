//! End-to-end discovery: partition, discover one model per sublog, merge.

use std::collections::HashMap;

use thiserror::Error;

use crate::conformance::{rename_sources, ConformanceError};
use crate::dfg::{discover_dfg, is_acyclic, Dfg, ModelError};
use crate::event_log::EventLog;
use crate::merge::{MergeError, MergeMode, MergedModel};
use crate::partition::{partition_log, Partition, PartitionError};
use crate::rename::merge_in_order;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub mode: MergeMode,
    pub fvs_budget: u64,
    /// Merge order over sublog indices; input order when `None`.
    pub order: Option<Vec<usize>>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { mode: MergeMode::Accurate, fvs_budget: 1_000_000, order: None }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Merge(#[from] MergeError),
    #[error(transparent)]
    Conformance(#[from] ConformanceError),
    #[error("grouping: {0}")]
    Grouping(String),
    #[error("sublog {0} does not have an acyclic model")]
    CyclicSublog(usize),
}

#[derive(Debug, Clone)]
pub struct Discovery {
    pub partition: Partition,
    pub models: Vec<Dfg>,
    pub merged: MergedModel,
    /// The input log with every sublog renamed into the merged model.
    pub renamed_log: EventLog,
}

/// Splits `log` (by `grouping` when given, else by the partition
/// heuristic), discovers the standard model of each part and merges them.
pub fn discover(
    log: &EventLog,
    grouping: Option<&HashMap<String, String>>,
    config: &PipelineConfig,
) -> Result<Discovery, PipelineError> {
    let partition = match grouping {
        Some(g) => {
            let cyclic = log.cyclic_cases();
            if !cyclic.is_empty() {
                return Err(PartitionError::CyclicLog(cyclic).into());
            }
            Partition::from_grouping(log, g).map_err(PipelineError::Grouping)?
        }
        None => partition_log(log)?,
    };
    let models = partition.sublogs.iter().map(discover_dfg).collect::<Result<Vec<_>, _>>()?;
    if let Some(i) = models.iter().position(|m| !is_acyclic(m)) {
        return Err(PipelineError::CyclicSublog(i));
    }
    let merged = merge_models(&models, config)?;
    let renamed_log = rename_sources(&partition.sublogs, &merged.rename_map, &merged.model)?;
    Ok(Discovery { partition, models, merged, renamed_log })
}

pub fn merge_models(models: &[Dfg], config: &PipelineConfig) -> Result<MergedModel, MergeError> {
    let order: Vec<usize> = config.order.clone().unwrap_or_else(|| (0..models.len()).collect());
    merge_in_order(models, &order, config.mode, config.fvs_budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfg::{count_simple_cycles, perfectly_fits, CycleCount};
    use crate::{fixtures, synth};

    #[test]
    fn lms_pipeline() {
        let log = fixtures::lms_log();
        let d = discover(&log, None, &PipelineConfig::default()).unwrap();
        assert!(is_acyclic(&d.merged.model));
        assert_eq!(count_simple_cycles(&d.merged.model, 1000), CycleCount::Exact(0));
        assert!(perfectly_fits(&d.merged.model, &d.renamed_log));
        assert!(d.renamed_log.same_multiset(&log) || d.renamed_log.len() == log.len());
    }

    #[test]
    fn single_trace_is_a_chain_either_way() {
        let log = EventLog::from_sequences(&[&["A", "B", "C"]]).unwrap();
        let d = discover(&log, None, &PipelineConfig::default()).unwrap();
        assert_eq!(d.merged.model, discover_dfg(&log).unwrap());
    }

    #[test]
    fn grouping_skips_partitioning() {
        let (log, grouping) = synth::conflict_log(&mut synth::rng(9), 3);
        let d = discover(&log, Some(&grouping), &PipelineConfig::default()).unwrap();
        assert_eq!(d.partition.sublogs.len(), 3);
        assert!(perfectly_fits(&d.merged.model, &d.renamed_log));
        let reordered = PipelineConfig { order: Some(vec![2, 1, 0]), ..PipelineConfig::default() };
        let r = discover(&log, Some(&grouping), &reordered).unwrap();
        assert!(is_acyclic(&r.merged.model));
        let mut partial = grouping.clone();
        partial.remove("g0-0");
        assert!(matches!(discover(&log, Some(&partial), &PipelineConfig::default()), Err(PipelineError::Grouping(_))));
    }

    #[test]
    fn cyclic_log_is_a_domain_error() {
        let log = EventLog::from_sequences(&[&["A", "B", "A"]]).unwrap();
        assert!(matches!(discover(&log, None, &PipelineConfig::default()), Err(PipelineError::Partition(_))));
    }
}
