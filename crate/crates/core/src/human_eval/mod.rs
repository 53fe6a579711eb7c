//! Blinded pairwise human evaluation: item sampling, annotator assignment,
//! Likert records, win/lose/tie derivation and agreement statistics.

mod agreement;
mod protocol;

pub use agreement::{
    agreement_report, cohen_kappa, krippendorff_alpha, AgreementReport, AgreementRow, Difference,
};
pub use protocol::{
    assign, derive_wlt, derive_wlt_for, render_summary, sample_items, summarize, validate_records,
    AnnotationRecord, AssignmentPlan, Criterion, EvalItem, PlannedItem, Slot, SlotPair,
    SystemScores, Wlt, WltPair,
};
