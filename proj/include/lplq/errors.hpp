#pragma once

#include <stdexcept>
#include <string>

namespace lplq {

// Construction-time invariant violations (bad partitions, negative lengths,
// mismatched sizes).  CLI maps these to exit code 3.
class invariant_error : public std::runtime_error {
public:
    explicit invariant_error(const std::string& what) : std::runtime_error(what) {}
};

// Operation preconditions (non-unit norm, missing support, p/q not integral).
// CLI maps these to exit code 4.
class precondition_error : public std::runtime_error {
public:
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lplq
