pub mod batch;
pub mod server;
