#pragma once
#include <stdexcept>
#include <string>

namespace pmj {

// Every failure the library reports carries one of a small set of fixed messages
// ("empty product", "not parabolic", ...); callers match on what().
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pmj
