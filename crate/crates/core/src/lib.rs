//! Exact computation of Dirichlet stereohedra for the full cubic
//! crystallographic groups, whose odd subgroup is of type `F23` with
//! intersecting three-fold axes.

pub mod bounds;
pub mod catalog;
pub mod cell;
pub mod experiment;
pub mod group;
pub mod helix;
pub mod isometry;
pub mod lattice;
pub mod pointgroup;
pub mod polytope;
pub mod rational;
pub mod sampling;

pub use group::{GroupError, GroupPresentation, Lattice};
pub use isometry::Isometry;
pub use lattice::{Color, Letter, SubdomainLabel, TetraAddress, TetraKind};
pub use polytope::{ConvexPolyhedron, GeometryError, Halfspace, Location};
pub use rational::{Point3, Rational};
