#pragma once

#include <stdexcept>
#include <string>

namespace omega {

// Requested table/range exceeds the configured memory budget or hard ceiling.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// An operation needs counter data outside the range a table actually covers.
struct coverage_error : std::runtime_error {
    explicit coverage_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace omega
