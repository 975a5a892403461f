//! Scoring word vectors on synonym tests and rating benchmarks, overall and
//! per corpus-frequency class.

mod benchmark;
mod frequency;
mod report;
mod scoring;
mod similarity;

pub use benchmark::{Benchmark, BenchmarkKind, Items, MultipleChoiceItem, RatingPair};
pub use frequency::{
    assign_frequency_class, partition_tests, FrequencyClass, FrequencyLookup, FrequencyThresholds, ObservedRange,
    Partition, TestPartition,
};
pub use report::{aggregate_report, class_table, evaluate_suite, overall_table, records, Aggregate, ClassReport, EvalReport};
pub use scoring::{
    average_ranks, eval_multiple_choice, eval_similarity, evaluate, pearson, spearman, ChoiceScore, Metric,
    RatingScore, TestScore,
};
pub use similarity::{cosine, sparse_cosine, SparseVectors, VectorSpace};
