#pragma once

#include <stdexcept>
#include <string>

namespace gibbscert {

// Base class for all toolkit errors so callers can catch one type.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

class invalid_hyperparameter_error : public error {
public:
    using error::error;
};

// A data value x outside the support of the model's likelihood.
class support_error : public error {
public:
    using error::error;
};

// ch >= 1: the quadratic drift construction does not apply to this family
// without hyperparameter restrictions.
class family_restriction_error : public error {
public:
    using error::error;
};

// af == ch: the drift center u is undefined.
class degenerate_center_error : public error {
public:
    using error::error;
};

class invalid_rate_error : public error {
public:
    using error::error;
};

class invalid_small_set_error : public error {
public:
    using error::error;
};

// Small set fails w > 2L/(1-gamma), the usability threshold for the
// Rosenthal bound.
class small_set_too_small_error : public error {
public:
    using error::error;
};

class inapplicable_bound_error : public error {
public:
    using error::error;
};

class inapplicable_oracle_error : public error {
public:
    using error::error;
};

class no_solution_error : public error {
public:
    using error::error;
};

class infeasible_search_error : public error {
public:
    using error::error;
};

class not_geometrically_certified_error : public error {
public:
    using error::error;
};

class insufficient_path_error : public error {
public:
    using error::error;
};

// Bad grid handed to a grid-based check (e.g. a point outside the small set).
class grid_error : public error {
public:
    using error::error;
};

class not_gaussian_error : public error {
public:
    using error::error;
};

class config_error : public error {
public:
    using error::error;
};

} // namespace gibbscert
