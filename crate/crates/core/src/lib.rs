pub mod discovery;
pub mod domain;
pub mod mining;
pub mod routing;
pub mod semantic;
pub mod sim;
pub mod experiments;
