#pragma once

#include <stdexcept>
#include <string>

namespace chemoweb {

// Parameter values outside their admissible range (negative rates, yields
// outside (0,1), malformed parameter documents, ...).
class invalid_parameter_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input document could not be parsed at all (JSON syntax, unknown keys).
class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A quantity was requested outside the domain where it is defined
// (e.g. the inflow threshold outside the admissible hydrogen window).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A well-posed equation has no solution for the given arguments
// (e.g. inverting a growth rate above its saturation limit).
class no_solution_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The model sits in a regime where the requested construction is void,
// e.g. the recycle fraction omega is >= 1 so no populated steady state exists.
class regime_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An analytic stability rule was asked for outside its hypotheses
// (the closed-form rules require all decay rates to be zero).
class wrong_method_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// An iterative routine failed to converge or produced an unusable result.
// Never silently degrade: callers see this instead of a wrong number.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace chemoweb
