//! Sound catalogues for UML class diagrams, an auditory-notation linter,
//! diagram sonification, interactive navigation and study statistics.

pub mod acoustics;
pub mod audio;
pub mod catalogue;
pub mod nav;
pub mod principles;
pub mod protocol;
pub mod sonifier;
pub mod stats;
pub mod uml;
