//! Acceptance criteria for the workspace, run as the `acceptance` test
//! target. The library itself is empty.
