//! Strategy synthesis for alternating-time temporal logic goals and generation of
//! AgentSpeak plan libraries for agents with incomplete information.
//!
//! The pipeline runs model text through [`ispl`] into an explicit concurrent game
//! model ([`cgm`]), checks ATL goals and extracts strategies ([`atl`]), turns the
//! strategies into one plan per belief state ([`forge`]), writes them as AgentSpeak
//! ([`agentspeak`]) and executes them in a grid world with belief tracking
//! ([`runtime`]).

pub mod agentspeak;
pub mod atl;
pub mod cgm;
pub mod fixtures;
pub mod forge;
pub mod ispl;
pub mod runtime;
