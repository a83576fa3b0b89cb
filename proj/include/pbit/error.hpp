#ifndef PBIT_ERROR_HPP
#define PBIT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pbit {

/// Base class of every error raised by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A state, distribution or index does not match the size of the model it is used with.
struct dimension_error : error {
    using error::error;
};

/// An exact oracle was asked to enumerate more states than it supports.
struct capacity_error : error {
    using error::error;
};

/// Degree bound, schedule or other numeric parameter outside its valid range.
struct invalid_argument : error {
    using error::error;
};

/// A search over a bounded domain found no admissible answer.
struct infeasible_error : error {
    using error::error;
};

/// Caller broke a structural contract (e.g. an improper coloring handed to a parallel sweep).
struct contract_violation : error {
    using error::error;
};

/// Scaling collapse was requested on curves whose rescaled ranges never overlap.
struct no_overlap_error : error {
    using error::error;
};

/// Malformed text input (instance, embedding or netlist files).
struct parse_error : error {
    parse_error(const std::string &what, std::size_t line)
        : error("line " + std::to_string(line) + ": " + what), line(line) {
    }
    std::size_t line;
};

/// Experiment configuration failed validation.
struct config_error : error {
    using error::error;
};

}  // namespace pbit

#endif  // PBIT_ERROR_HPP
