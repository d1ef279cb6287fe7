pub mod grammar;
pub mod lexicon;
pub mod orderdomain;
pub mod parser;
pub mod tfs;
