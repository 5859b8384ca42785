pub mod analyze;
pub mod solve;
pub mod theta_opt;
pub mod verify;
