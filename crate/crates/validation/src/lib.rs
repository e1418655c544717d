//! Holds the `acceptance` test target, which checks the solver against its
//! acceptance criteria and prints one PASS or FAIL line for each.
