//! Effective sample size of Gaussian spatial data under full and block
//! likelihood, with the block efficiency `ESS_B / ESS`.
//!
//! ```
//! use blockess::{ess_block_auto, ess_full_auto, rw_1d, CorrelationModel, PointGeometry};
//!
//! let model = CorrelationModel::ar1(0.6);
//! let geom = PointGeometry::Line(900);
//! let full = ess_full_auto(&model, &geom, None).unwrap().value;
//! let row = ess_block_auto(&model, &geom, &rw_1d(900, 30, 30).unwrap(), None).unwrap().value;
//! assert_eq!(format!("{:.3}", row / full), "0.961");
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod blocking;
pub mod corrmodel;
pub mod error;
pub mod ess;
pub mod spdkernel;

pub use blocking::{
    cw_1d, cw_1d_unequal, cw_2d, equal_1d, equal_2d, mcw_1d, prw, rw_1d, rw_1d_unequal, rw_2d,
    Arrangement, Blocking, BlockingSpec, BlockingTag, Layout1d, Layout2d,
};
pub use corrmodel::{entry, CorrelationModel, Kernel, PointGeometry};
pub use error::{EssError, Result};
pub use ess::{
    ess_block_auto, ess_block_dense, ess_full, ess_full_auto, EssMethod, EssReport, LambdaTable,
};
