//! Representations of the Euclidean quiver of type Ã(p,q) with the source
//! and sink orientation, exact Hom/Ext computations, and a checker for
//! stratifying systems built from preprojective and preinjective modules.

pub mod catalog;
pub mod cli;
pub mod exactnum;
pub mod homcalc;
pub mod quiverrep;
pub mod strata;
