//! Morse-Smale complexes of convex polyhedra under the radial distance
//! function.
//!
//! ```
//! use polymorse::{analyze, poly::make_cube, Origin, Vec3};
//!
//! let rp = make_cube(0.5).with_reference(Origin::Given(Vec3::ZERO)).unwrap();
//! let a = analyze(&rp).unwrap();
//! assert_eq!(a.complex.census(), (6, 12, 8));
//! assert!(a.validation.pass);
//! ```

pub mod document;
pub mod equilibria;
pub mod error;
pub mod flow;
pub mod geom;
pub mod io;
pub mod mscomplex;
pub mod oracle;
pub mod poly;
pub mod timing;

pub use document::{analyze, Analysis, AnalysisDocument};
pub use equilibria::{find_equilibria, EdgeClass, Equilibria, Equilibrium, EquilibriumKind};
pub use error::{BuildError, Error, NonGenericWitness, Result};
pub use flow::{
    probe_genericity, AscendingCurve, CurveRole, ExtendedGradient, GradientField, GradientSource,
    ProbeOptions, Segment,
};
pub use geom::{Point3, TolerancePolicy, Vec3, Vector3};
pub use mscomplex::{build_ms_complex, to_graph, validate, MSComplex, MSGraph, ValidationReport};
pub use poly::{Carrier, Origin, Polyhedron, ReferencedPolyhedron, SurfacePoint};
