pub mod bayes;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod io;
pub mod optim;
pub mod rng;
pub mod simlab;
pub mod survival;
pub mod synthesis;
pub mod tuning;
pub mod util;
