//! Numerical laboratory for Nyman-Beurling type approximation problems.
//!
//! The library computes distances between the indicator `chi = 1_(0,1]` (or
//! more general targets) and linear spans of fractional-part dilations
//! `rho_theta(t) = {theta/t}` in `L^2(0, infinity)`, both for deterministic
//! dilation factors and for random ones (the pNB/gNB variants built from
//! mean Beurling functions `Psi_X(t) = E{X/t}`).
//!
//! Everything checkable is checked twice: certified piecewise-exact
//! quadrature backs the deterministic Gram systems, Monte Carlo backs the
//! Muntz-transform identity, and an independent Mellin/Plancherel route on
//! the critical line recomputes every distance from `zeta(1/2 + it)`.

pub mod beurling;
pub mod bracket;
pub mod criteria;
pub mod error;
pub mod families;
pub mod gram;
pub mod kahan;
pub mod muntz;
pub mod plancherel;
pub mod quad;
pub mod rng;
pub mod special;
pub mod zeta;

pub use bracket::{BracketedValue, Constants};
pub use error::{Error, Result};
pub use families::Distribution;
pub use gram::{DistanceReport, GramSystem};
pub use rng::RngStream;
