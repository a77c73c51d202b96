//! Verification of Greenberg's conjecture for real quadratic fields using
//! discrete logarithms of cyclotomic units modulo auxiliary split primes.

pub mod cache;
pub mod cyclo_logs;
pub mod finite_field;
pub mod greenberg;
pub mod group_ring;
pub mod quadratic;
