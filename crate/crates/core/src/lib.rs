//! Extreme points of the convex set of bipartite density matrices with
//! positive partial transpose (PPT).
//!
//! The crate decides whether a PPT state is extreme, walks from any PPT
//! state to an extreme point through faces of decreasing rank, and samples
//! two-dimensional sections through the set.

pub mod bipartite;
pub mod catalog;
pub mod error;
pub mod extremality;
pub mod hermitian;
pub mod io;
pub mod mspace;
pub mod random;
pub mod search;
pub mod sections;

pub use bipartite::{partial_transpose, product_state, BipartiteDims, DensityMatrix};
pub use error::{Error, Result};
pub use extremality::{check_rank_bound, test_extremality, ExtremalityReport, Face, Verdict};
pub use hermitian::{HermitianMatrix, SpectralDecomposition, Tolerances, C64};
pub use mspace::{MVector, SuperOperator};
pub use search::{
    decompose_along_face, find_extreme, line_search_to_boundary, rank_survey, Direction,
    FaceDecomposition, RankSurvey, SearchTrace,
};
pub use sections::{
    face_section, ppt_reach, radial_boundary, sample_section, Extent, FacePlane, FaceSectionConfig,
    Region, SectionSample, SectionSpec,
};
