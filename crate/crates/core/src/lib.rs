pub mod braided;
pub mod document;
pub mod dynkin;
pub mod fixtures;
pub mod multsolve;
pub mod nichols;
pub mod permkit;
pub mod scalars;
pub mod solutions;
pub mod tequiv;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction_chapter {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/permutations.md")]
mod permutations_chapter {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/near-racks.md")]
mod near_racks_chapter {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/coefficients.md")]
mod coefficients_chapter {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/twisting.md")]
mod twisting_chapter {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/nichols.md")]
mod nichols_chapter {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/diagrams.md")]
mod diagrams_chapter {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/fixtures.md")]
mod fixtures_chapter {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/formats.md")]
mod formats_chapter {}
