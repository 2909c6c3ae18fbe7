//! Long virtual knot diagrams and the `ζ` invariant with coefficients in the
//! ring `T = Z[p^±1, q^±1] / ((p-1)(p-q), (q-1)(p-q))`.

pub mod diagram;
pub mod fuzz;
pub mod invariant;
pub mod moves;
pub mod oracle;
pub mod ring;

pub use diagram::{
    generate, random_code, DiagramCode, DiagramError, Family, Passage, PassageToken, Sign,
};
pub use ring::{Generator, Laurent, QPowerRelation, Ring, RingT, ZetaPolynomial};
