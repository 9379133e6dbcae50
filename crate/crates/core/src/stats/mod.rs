//! Pearson screening, negative binomial regression and the two-stage
//! policy-effectiveness analysis.

mod analysis;
pub mod nbr;
mod pearson;

pub use analysis::{
    run_effectiveness_analysis, AnalysisConfig, AnalysisError, AnalysisReport, Direction, InstitutionData,
    Response, ResponseSet, ScreeningOutcome, Stage1Cell, Stage2Result, SummaryRow, MIN_INSTITUTIONS, SIGNIFICANCE,
    STAGE1_CONDITIONS,
};
pub use nbr::{fit_nbr, fit_nbr_raw, Coefficient, Dispersion, NbrError, NbrFit, NbrOptions, INTERCEPT, LL_ROUNDING};
pub use pearson::{pearson, screen_conditions, t_test_p, Correlation, CorrelationResult, PearsonError, Screening, Side};
