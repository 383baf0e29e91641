#pragma once

#include <stdexcept>
#include <string>

namespace irsa {

// Thrown when an iterative series or search cannot meet its configured
// tolerance. The CLI maps this to the numerical-diagnostic exit code.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// Malformed polynomial / distribution text.
class ParseError : public std::invalid_argument {
public:
    explicit ParseError(const std::string& what_arg) : std::invalid_argument(what_arg) {}
};

}  // namespace irsa
