#pragma once

#include <stdexcept>
#include <string>

namespace sparseact {

// Data, file or configuration problem surfaced to the caller.
// The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sparseact
