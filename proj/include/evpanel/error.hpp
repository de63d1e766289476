#pragma once

#include <stdexcept>
#include <string>

namespace evpanel {

/// Error thrown by every validation and construction failure in the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& what) {
    throw Error(what);
}

} // namespace evpanel
