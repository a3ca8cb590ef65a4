//! Multi-criteria decision analysis for policy alternatives.
//!
//! An [`AcsTable`](model::AcsTable) scores alternatives against criteria.
//! [`rules`] turns it into per-rule rankings (the E table), [`aggregation`]
//! combines those into robust aggregate orderings (the A table) and compares
//! orderings, [`scoring`] fills tables from LLM replies, [`io`] reads and
//! writes every file format, and [`session`]/[`service`] expose an editable
//! working model over HTTP.

pub mod aggregation;
pub mod analysis;
pub mod cli;
pub mod io;
pub mod model;
pub mod rules;
pub mod scoring;
pub mod service;
pub mod session;
