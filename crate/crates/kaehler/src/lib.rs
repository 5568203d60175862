//! Exact computation of Kähler differentials, low-degree Hochschild and
//! cyclic homology, and certified torsion bounds for finite-dimensional
//! commutative algebras over Q and F_p.

pub mod algebra;
pub mod corpus;
pub mod dsl;
pub mod field;
pub mod hochschild;
pub mod matrix;
pub mod omega;
pub mod structure;
pub mod subspace;
pub mod tau;
