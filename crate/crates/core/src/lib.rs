//! Assume-guarantee contracts for two-objective parity games.

pub mod batch;
pub mod benchgen;
pub mod csm;
pub mod fixpoints;
pub mod game;
pub mod json;
pub mod negotiation;
pub mod par;
pub mod templates;
pub mod verification;
