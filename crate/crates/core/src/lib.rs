pub mod economy;
pub mod error;
pub mod exposure;
pub mod io;
pub mod matrix;
pub mod risk;
pub mod scenario;

pub use error::{Error, Result};
pub use matrix::{BankId, Matrix};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/exposures.md")]
    mod exposures {}
    #[doc = include_str!("../../../book/src/debtrank.md")]
    mod debtrank {}
    #[doc = include_str!("../../../book/src/surcharge.md")]
    mod surcharge {}
    #[doc = include_str!("../../../book/src/economy.md")]
    mod economy {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
