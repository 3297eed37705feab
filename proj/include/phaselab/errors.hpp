#pragma once

#include <stdexcept>
#include <string>

namespace phaselab {

// Raised when a request exceeds a configured resource cap (enumeration
// size, combinatorial cap, work budget). The CLI maps this to exit code 2;
// plain std::invalid_argument (bad parameters) maps to exit code 1.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phaselab
