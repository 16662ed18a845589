pub mod absindex;
pub mod ball;
pub mod bennett;
pub mod error;
pub mod forms;
pub mod linforms;
pub mod oracle;
pub mod pell;
pub mod pipeline;
pub mod poly;
pub mod reduce;
pub mod ring;

pub use ball::{Ball, ComplexBall, Modulus};
pub use error::{Error, Result};
pub use ring::{Convention, QuadInt, RingSpec, UnitRoot};
pub use rug;
