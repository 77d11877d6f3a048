//! Command-line interface, mission store and HTTP service.
//!
//! [`cli::dispatch`] and [`server::router`] sit on the same
//! [`missions::Service`], so both surfaces share one status machine.
pub mod cli;
pub mod missions;
pub mod server;
pub mod store;

pub use cli::dispatch;
pub use missions::{ErrorClass, IntentInput, Service, ServiceError};
pub use store::{MissionRecord, Store, StoreError};
