//! Instruction data: loading, validity preprocessing, control-tag
//! annotation, prompt rendering and evaluation-set construction.

mod annotate;
mod evalset;
mod load;
mod preprocess;
mod prompt;

pub use annotate::{
    annotate_dataset, annotate_training, AnnotatedExample, AnnotationMeta, AnnotationRecord,
    DEFAULT_MAX_CONTROLS,
};
pub use evalset::{
    build_eval_set, split, EvalSetConfig, EvalTask, SkippedTask, SubsetPolicy, DEFAULT_K,
    DEFAULT_SIGMA,
};
pub use load::{load_dataset, parse_dataset, DatasetExample, DatasetFormat};
pub use preprocess::{preprocess, DropReason, DropRecord, FeatureSource, PreparedExample};
pub use prompt::{
    control_system_prompt, format_value, parse_tags, render_prompt, render_tags, Prompt,
    TEMPLATE_VERSION,
};
