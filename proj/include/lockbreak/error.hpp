#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lockbreak {

// Root of every exception thrown by the library. `module()` names the
// subsystem that raised it so front ends can categorize failures.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}

    [[nodiscard]] const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

}  // namespace lockbreak
