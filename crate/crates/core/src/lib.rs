//! Kripke semantics for intuitionistic and intermediate propositional logics,
//! blended Kripke models of set theory over finite rank-truncated universes,
//! and the de Jongh countermodel pipeline built on top of them.
//!
//! The crate is organized around the pipeline's stages:
//!
//! * [`formulas`] — ASTs, parsers and printers for the propositional language
//!   and the first-order language of set theory, plus substitutions.
//! * [`frames`] — finite tree Kripke frames, upset combinatorics, and
//!   enumeration of trees up to isomorphism.
//! * [`propositional`] — IPC forcing, brute-force frame validity, and axiom
//!   schemes for the intermediate logics LC, T_n and BD_n.
//! * [`universes`] — finite transitive extensional membership structures
//!   (cumulative levels `V_k` and friends) with classical evaluation.
//! * [`blended`] — rank-stratified Kripke models of set theory built from
//!   end-node universes, their forcing relation, and truncated IZF checks.
//! * [`dejongh`] — upset-counting sentences, node identifiers, faithful
//!   substitutions, and countermodel certificates.

pub mod acceptance;
pub mod blended;
pub mod config;
pub mod dejongh;
pub mod formulas;
pub mod frames;
pub mod propositional;
pub mod report;
pub mod sampling;
pub mod universes;

pub use blended::{BlendedModel, ElemId, IzfAxiom, IzfVerdict};
pub use config::RunConfig;
pub use dejongh::Logic;
pub use formulas::{parse_prop, parse_set, PropFormula, SetFormula, Substitution};
pub use frames::{Frame, FrameClass};
pub use propositional::{force_prop, valid_in_frame, Valuation};
pub use universes::Universe;
