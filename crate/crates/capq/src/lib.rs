//! Numerical toolkit for planar capacitors.
//!
//! A capacitor is the complement `Ω = Ĉ \ (E ∪ F)` of two disjoint continua.
//! This crate computes its conformal capacity and extremal potential on a
//! grid, extracts equipotential level curves, measures how far those curves
//! are from round circles (the three-point bounded-turning constant), and
//! evaluates the closed-form distortion bounds that relate the capacity to
//! the quasicircle constant of each level line.
//!
//! Alongside the solver sit the special functions the closed forms need
//! (complete elliptic integrals, Jacobi `sn`, the Grötzsch and Teichmüller
//! ring moduli), the five-stage conformal map onto the twisted Teichmüller
//! domain, the extremal radial stretch of an annulus, and the hyperbolic
//! collar computations for a closed geodesic.
//!
//! Capacity throughout is normalised so that the round annulus
//! `{r < |z| < R}` has capacity `log(R/r)`, i.e. it is the conformal modulus
//! of the ring `Ω`.
//!
//! ```
//! use capq::capacitor::{CapacitorSpec, GridSpec, Role, Shape, ShapeEntry};
//! use capq::solver::{solve_potential, DEFAULT_TOLERANCE};
//!
//! let spec = CapacitorSpec::new(
//!     vec![
//!         ShapeEntry::new(Role::E, Shape::disc([0.0, 0.0], 0.5)),
//!         ShapeEntry::new(Role::F, Shape::disc_complement([0.0, 0.0], 2.0)),
//!     ],
//!     GridSpec::square([0.0, 0.0], 2.2, 128),
//! );
//! let mask = capq::capacitor::rasterize(&spec.validate()?)?;
//! let field = solve_potential(&mask, DEFAULT_TOLERANCE)?;
//! assert!((field.capacity - 4f64.ln()).abs() < 0.05);
//! # Ok::<(), capq::Error>(())
//! ```

pub mod bounds;
pub mod capacitor;
pub mod chain;
pub mod collar;
pub mod equipotential;
mod error;
pub mod io;
pub mod pipeline;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod turning;

pub use error::{Error, Result};

/// Points in the plane are complex numbers.
pub type Point = num_complex::Complex64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/capacity.md")]
    mod capacity {}
    #[doc = include_str!("../../../book/src/level-curves.md")]
    mod level_curves {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/special-functions.md")]
    mod special_functions {}
    #[doc = include_str!("../../../book/src/conformal-chain.md")]
    mod conformal_chain {}
    #[doc = include_str!("../../../book/src/collar.md")]
    mod collar {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
