//! Exponential last passage percolation with shock initial data.
//!
//! Seeded weight fields, passage-time sweeps and maximizers, competition
//! interfaces, the TASEP coupling, Tracy-Widom numerics and the model
//! observables used by the experiments in `lpp-shock-lab`. Needs only
//! `alloc`.

#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod interface;
pub mod lattice;
pub mod lpp;
pub mod models;
pub mod stats;
pub mod tasep;
pub mod twdist;
pub mod weights;
