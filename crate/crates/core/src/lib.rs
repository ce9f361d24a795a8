//! Exact verification engine for weakly unital dg categories.
//!
//! The crate realises the dg operads `O` and `O'` by normal-form planar
//! trees and computes their truncated cohomology, and provides finite
//! weakly unital dg categories with limits, good coequalizers, model
//! structure predicates, the Kontsevich category and bar-cobar weak units.

pub mod barcobar;
pub mod dgcat;
pub mod exactlinalg;
pub mod kontsevich;
pub mod suites;
pub mod treeops;
pub mod wuoperad;
