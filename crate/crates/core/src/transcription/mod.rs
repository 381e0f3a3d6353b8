//! Direct transcription of a Bolza optimal control problem into an NLP.
//!
//! Every coordinate of order `q` owns one coefficient block `alpha`; its
//! levels come from the integral collocation operator with the known initial
//! values substituted. Controls are nodal. The equality vector is
//! `[psi_0; Xi_1; ...; Xi_C; psi_f]` and the cost is `phi + (dt/2) sum g_k w_k`.

mod layout;
mod nlp;
mod ocp;
mod time;
mod trajectory;

pub use layout::{ChiLayout, ChiPieces};
pub use nlp::{assemble_rate_constraints, ProblemDescriptor, Table, Transcription};
pub use ocp::{
    BoundaryRow, ControlSpec, CoordinateSpec, DynamicsFn, EndpointFn, Inequality, NodeFn, OcpDefinition, TimeSpec,
};
pub use time::{TimeMap, TimeMode};
pub use trajectory::{Endpoints, NodePoint, Trajectory};
