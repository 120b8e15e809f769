//! Spectral theory of k-uniform hypergraphs with loops: partition
//! flattenings of the adjacency map, star-product powers, the symmetric
//! power matrix, cycle gadgets whose homomorphism counts equal power-matrix
//! traces, and eigenvalue-separation experiments built on top.

pub mod analysis;
pub mod counting;
pub mod error;
pub mod gadgets;
pub mod hypergraph;
pub mod indexing;
pub mod multilinear;
pub mod spectral;
pub mod suites;

pub use analysis::{
    analyze, experiment, rows_to_csv, validate_report_json, AnalyzeOptions, ExperimentConfig,
    ExperimentReport, ExperimentRow, QuasirandomReport, CSV_HEADER, REPORT_SCHEMA_JSON,
};
pub use counting::{
    circuit_count_trace, cycle_deviation, hom_count_bruteforce, labeled_copy_count_bruteforce,
    CountReport,
};
pub use error::{Error, Result};
pub use gadgets::{cycle, cycle_of_ordering, path, step, Gadget};
pub use hypergraph::{
    complete_graph, generate, read_hypergraph, write_hypergraph, GenSpec, Hypergraph,
};
pub use indexing::{
    parse_partition, parse_partition_list, proper_partitions, OrderedPartition, Partition,
};
pub use multilinear::{
    a_matrix, a_matrix_with_asym, all_ones_map, flatten, flatten_as, read_multimap_dump,
    star_product, write_multimap_dump, Budget, DeviationMap, DeviationSpec, MultiForm, MultiMap,
};
pub use spectral::{
    a_spectrum, alignment_check, eig, lambda1_pi, lambda2_pi, spectral_norm_bilinear,
    spectral_norm_hopm, ASpectrum, EigenDecomp, HopmOptions, NormBracket, PartitionNorm,
    SymMatrix,
};
pub use suites::{run_all, SuiteOutcome, SuiteReport, VerifyLevel};
