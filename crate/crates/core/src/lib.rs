//! Edge caching with random linear fountain codes.
//!
//! The crate is split along the pipeline of a satellite-fed cache network:
//!
//! * [`gf`]: arithmetic over the binary extension fields GF(2^m), m = 1..=8;
//! * [`lrfc`]: the rateless codec itself: an encoder drawing i.i.d. uniform
//!   coefficients and an incremental rank-tracking decoder;
//! * [`analysis`]: closed-form decoding-failure probabilities, overhead
//!   statistics and expected backhaul rates;
//! * [`placement`]: integer optimization of how many coded symbols of each
//!   file the hubs cache;
//! * [`sim`]: reproducible Monte Carlo simulation of the delivery phase plus
//!   the hub-grid geometry producing connectivity distributions.
//!
//! Everything works without `std` (the `std` feature, on by default, only
//! forwards to the RNG crates); all floating-point math goes through `libm`
//! so results are identical in both configurations.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod gf;
pub mod lrfc;
pub mod placement;
pub mod sim;
