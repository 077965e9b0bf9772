//! Exact computation of the coefficient family `b(i, j, k)` built from
//! Bernoulli numbers, together with the machinery to certify its positivity.
//!
//! `b` is defined by a recurrence in the Bernoulli numbers; `d(i, j, k) =
//! (-1)^j j! b(i, j, k)` is its exponentially normalised twin. Three
//! independent methods are provided ([`Method`]): the recurrence itself, the
//! generating function `D_{(i,k)}(t) = sum_j d(i, j, k) t^j / j!`, and a
//! closed form in Bernoulli numbers, Stirling numbers and harmonic product
//! sums.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the command
//! line and threading live in the `fanocoeff` crate.

#![no_std]

extern crate alloc;

pub mod certificate;
pub mod coefficients;
pub mod numerics;
pub mod oracle;
pub mod report;
pub mod sequences;
pub mod series;
pub mod verify;

pub use certificate::{Certificate, Claim, Param, Verdict, Witness};
pub use coefficients::{
    b_from_d, d_from_b, CoeffError, CoeffTable, Coefficients, Method, TripleIndex,
};
pub use numerics::{rat_add, rat_cmp, rat_div, rat_mul, NumericsError, Rational};

pub use report::{render_chern_expansion, ChernExpansion, ChernTerm, ReportError};
pub use sequences::{SequenceCache, SequenceError};
pub use series::{gen_series, valuation_split, Generator, PowerSeries, SeriesError, ValuedSeries};
pub use verify::{
    aggregate_identities, certify_positivity, verify_identities, IdentityBounds, IdentityKind,
    VerifyError,
};
