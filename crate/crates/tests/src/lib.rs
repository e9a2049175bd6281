//! Holds the cross-module `acceptance` test target; no library code.
