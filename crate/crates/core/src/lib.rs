//! Exact computations for cubulating crystallographic groups.
//!
//! * [`exactlin`]: rational scalars, vectors and matrices.
//! * [`sgnperm`]: the signed permutation group `O(n, Z)` and the hyperoctahedron `Q_n`.
//! * [`crys`]: crystallographic group data, validation and the built-in catalog.
//! * [`decide`]: the hyperoctahedrality decision with witnesses and rejection certificates.
//! * [`walls`]: the standard cubulation by lattice-translated coordinate walls.
//! * [`dual`]: dual cube complexes of finite wallspaces and median-graph operations.
//! * [`boundary`]: simplicial boundaries of products of lines, rays and trees.

pub mod boundary;
pub mod crys;
pub mod decide;
pub mod dual;
pub mod exactlin;
pub mod sgnperm;
pub mod walls;
