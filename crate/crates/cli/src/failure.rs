use std::fmt::Display;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub const USAGE: u8 = 1;
    pub const DATA: u8 = 2;
    pub const RUNTIME: u8 = 3;

    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }

    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self::new(Self::USAGE, error)
    }

    pub fn data(error: impl Into<anyhow::Error>) -> Self {
        Self::new(Self::DATA, error)
    }

    pub fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Self::new(Self::RUNTIME, error)
    }
}

pub fn usage_msg(msg: impl Display) -> Failure {
    Failure::usage(anyhow::anyhow!("{msg}"))
}

pub fn data_msg(msg: impl Display) -> Failure {
    Failure::data(anyhow::anyhow!("{msg}"))
}
