#pragma once

#include <stdexcept>
#include <string>

namespace impsync {

/// Incompatible or invalid matrix dimensions.
class dimension_error : public std::invalid_argument {
public:
    explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A linear solve hit a pivot below tolerance.
class singular_error : public std::runtime_error {
public:
    explicit singular_error(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative kernel exhausted its sweep budget.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// The sampled-data pair (e^{AT}, B) is singular to tolerance, so no
/// deadbeat gain exists for this period.
class controllability_error : public std::runtime_error {
public:
    explicit controllability_error(const std::string& what) : std::runtime_error(what) {}
};

/// The influence graph fails the simple-zero-eigenvalue criterion.
class spanning_tree_error : public std::runtime_error {
public:
    explicit spanning_tree_error(const std::string& what) : std::runtime_error(what) {}
};

/// An internal cross-check failed (inconsistent factors, violated identity).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace impsync
