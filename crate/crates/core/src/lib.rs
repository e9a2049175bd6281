pub mod centers;
pub mod cherednik;
pub mod homog;
pub mod exact;
pub mod liedata;
pub mod pairings;
pub mod pbw;
pub mod poisson;
pub mod wmin;
pub mod report;

pub use exact::{QPoly, QSeries, Scalar};
