//! Workbench for nonmonotonic reasoning over finite structures.
//!
//! The crate is organised around two families of objects:
//!
//! * **Defeasible inheritance diagrams** — finite DAGs with positively and
//!   negatively signed arrows.  [`net`] holds the data model and path
//!   enumeration, [`infer`] the validity induction (with its variant modes,
//!   extension enumeration and the big-set derivation engine), [`reactive`]
//!   the compilation into reactive graphs plus a small gate-circuit
//!   simulator, and [`blocking`] the horizon operator over blocking nets.
//!
//! * **Finite choice functions** — explicit-domain maps `mu: Y -> P(U)`.
//!   [`choice`] provides checkers for the algebraic conditions, the hull
//!   computation and a counterexample-search harness; [`pref`] builds and
//!   verifies preferential-structure representations (general, transitive,
//!   smooth, smooth-transitive, ranked, block-ranked); [`higher`] does the
//!   same for generalized structures whose arrows may attack other arrows.
//!
//! [`io`] supplies the text formats, DOT export and the command front end
//! shared by the CLI and the Python bindings.

pub mod blocking;
pub mod choice;
pub mod higher;
pub mod infer;
pub mod io;
pub mod net;
pub mod pref;
pub mod reactive;
