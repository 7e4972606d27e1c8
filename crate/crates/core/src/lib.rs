//! Pseudo-spectral solver for the 3D incompressible Navier–Stokes equations in
//! vorticity form on the periodic box, with a time-slab scheme whose
//! coefficients are slab averages closed by successive approximation, and a
//! ledger of the energy and enstrophy estimates that scheme relies on.

pub mod cli;
pub mod error;
pub mod estimates;
pub mod flows;
pub mod io;
pub mod reference;
pub mod series;
pub mod slab;
pub mod spectral;

pub use error::{Error, Result};
