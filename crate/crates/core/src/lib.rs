//! Arcs on the conic `XY = Z²` in PG(2,q), q odd: finite-field arithmetic,
//! incidence geometry, coverage and completion of arcs, and analysis of
//! plane curves over GF(q).

pub mod field;
pub mod plane;
pub mod conic;
pub mod arcs;
pub mod curves;
pub mod poly;
pub mod claims;
