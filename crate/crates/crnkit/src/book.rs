//! Compiles and runs every code block in the book as a doctest, so the
//! guide can never drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
#[cfg(doctest)]
pub struct BookIntroduction;

#[doc = include_str!("../../../book/src/networks.md")]
#[cfg(doctest)]
pub struct BookNetworks;

#[doc = include_str!("../../../book/src/invariants.md")]
#[cfg(doctest)]
pub struct BookInvariants;

#[doc = include_str!("../../../book/src/enlargements.md")]
#[cfg(doctest)]
pub struct BookEnlargements;

#[doc = include_str!("../../../book/src/verification.md")]
#[cfg(doctest)]
pub struct BookVerification;
