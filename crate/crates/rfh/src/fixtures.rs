//! Built-in example inputs.

use clap::ValueEnum;

use crate::io::{parse, FormatError, ModelJson, MorseJson};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Example {
    S2,
    T2,
    Rp2,
    #[value(name = "s2-rf")]
    S2Rf,
    #[value(name = "rp2-rf")]
    Rp2Rf,
}

pub enum Fixture {
    Morse(MorseJson),
    Model(Box<ModelJson>),
}

impl Example {
    pub const ALL: [Example; 5] = [Example::S2, Example::T2, Example::Rp2, Example::S2Rf, Example::Rp2Rf];

    pub fn name(self) -> &'static str {
        match self {
            Example::S2 => "s2",
            Example::T2 => "t2",
            Example::Rp2 => "rp2",
            Example::S2Rf => "s2-rf",
            Example::Rp2Rf => "rp2-rf",
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            Example::S2 => include_str!("../fixtures/s2.json"),
            Example::T2 => include_str!("../fixtures/t2.json"),
            Example::Rp2 => include_str!("../fixtures/rp2.json"),
            Example::S2Rf => include_str!("../fixtures/s2-rf.json"),
            Example::Rp2Rf => include_str!("../fixtures/rp2-rf.json"),
        }
    }

    pub fn load(self) -> Result<Fixture, FormatError> {
        match self {
            Example::S2 | Example::T2 | Example::Rp2 => Ok(Fixture::Morse(parse(self.text())?)),
            Example::S2Rf | Example::Rp2Rf => Ok(Fixture::Model(Box::new(parse(self.text())?))),
        }
    }

    pub fn morse(self) -> Option<MorseJson> {
        match self.load().expect("embedded fixture parses") {
            Fixture::Morse(m) => Some(m),
            Fixture::Model(_) => None,
        }
    }

    pub fn model(self) -> Option<ModelJson> {
        match self.load().expect("embedded fixture parses") {
            Fixture::Morse(_) => None,
            Fixture::Model(m) => Some(*m),
        }
    }
}
