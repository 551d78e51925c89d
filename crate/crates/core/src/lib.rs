//! Certified search and verification of pairwise-coprime blocks, all-even blocks and
//! pairwise-coprime index sets in sequences `floor(f(n))` for regular functions `f`.

pub mod funclib;
pub mod json;
pub mod ntcore;
pub mod scanner;
pub mod seeker;
pub mod verifier;
