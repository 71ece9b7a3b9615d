#pragma once

#include <stdexcept>
#include <string>

namespace pcgl {

// Exceeded a configured compute budget (CLI exit code 4).
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values or sup-norm blow-up during time stepping (CLI exit 3).
// Carries the last time reached before the blow-up was detected.
struct blowup_error : std::runtime_error {
    double survival_time;
    blowup_error(const std::string& what, double t)
        : std::runtime_error(what), survival_time(t) {}
};

// Malformed configuration or input file (CLI exit code 2).
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pcgl
