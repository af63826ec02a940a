//! Controllability scoring: raw L1 errors, min/P95 normalization, rewards
//! and sweep reports.

mod report;
mod reward;
mod score;

pub use report::{
    radar_bundle, score_rows, score_run, sweep_report, write_csv, ExtractionFailure, NSweepRow,
    Normalization, RadarBaseline, RadarBundle, RadarNormalization, ScoreRow, ScoredRun,
    SigmaSweepRow, SweepKind, SweepReport, SweepTable,
};
pub use reward::{reinforce_reward, reinforce_reward_text, RewardStats};
pub use score::{
    l1_error, percentile, ErrorMatrix, ErrorRecord, NormScale, NORMALIZATION_PERCENTILE,
};
