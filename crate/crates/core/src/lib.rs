//! Numerical verification of curvature comparison theorems for convex bodies
//! in constant-curvature and rotationally symmetric model spaces.
//!
//! Bodies are radial graphs `t = p(θ)` about a reference point `O`; the
//! checks compare the angle between the outer normal and the radial
//! direction, the support function, and rolling balls against the
//! corresponding quantities of model spheres.

pub mod comparison;
pub mod error;
pub mod hypersurface;
pub mod modelspace;
pub mod polar;
pub mod quadric;
pub mod roots;
pub mod rolling;
pub mod scene;

pub use error::{Error, Result};
pub use hypersurface::{Direction, FourierCurve, OffsetEllipse, OffsetSphere, Profile, Shape, Surface};
pub use modelspace::{ModelSpace, PolarPoint, WarpedProfile};
