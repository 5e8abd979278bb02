#pragma once

#include <stdexcept>
#include <string>

namespace islab {

// Evaluation at (or too close to) the degenerate vacuum edge, or a transport
// coefficient degenerating on the interior.
struct degeneracy_error : std::runtime_error {
    explicit degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

// Bad scalar inputs (negative density, exponents out of range, ...).
struct domain_error : std::domain_error {
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// Invalid norm / operator specification (weight exponent, ladder relation).
struct spec_error : std::invalid_argument {
    explicit spec_error(const std::string& what) : std::invalid_argument(what) {}
};

// Field too short for the requested stencil or derivative order.
struct size_error : std::invalid_argument {
    explicit size_error(const std::string& what) : std::invalid_argument(what) {}
};

// Moving boundary ran into the artificial far edge.
struct domain_collapse_error : std::runtime_error {
    explicit domain_collapse_error(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver exceeded its iteration cap; message carries the residual.
struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

// NaN detected during time stepping; message carries the step report.
struct numerical_abort : std::runtime_error {
    explicit numerical_abort(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace islab
