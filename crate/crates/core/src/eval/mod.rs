//! Answer normalization, retrieval accuracy, Exact Match, ROUGE and grouped breakdowns.

mod grouped;
mod normalize;
mod retrieval;
mod rouge;

pub use grouped::{grouped_metric, question_type, GroupStat, Labeler, OTHER, QUESTION_TYPES};
pub use normalize::{
    contains_run, exact_match, normalize_answer, normalized_tokens, passage_contains_answer,
};
pub use retrieval::{hit_depth, topk_accuracy, HitDepth, RetrievalReport};
pub use rouge::{rouge_f1, rouge_f1_multi, rouge_tokens, RougeScores};
