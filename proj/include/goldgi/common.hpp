#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace goldgi {

// Malformed input or a broken operation precondition. The CLI maps this to
// exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Filesystem or serialization failure. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Worker count for data-parallel loops. GOLD_GI_THREADS caps it; 0 or unset
// means hardware concurrency. Never exceeds `jobs`.
std::size_t worker_count(std::size_t jobs);

// Runs body(begin, end) over disjoint chunks of [0, n). Each index is handled
// by exactly one invocation, so per-element work with a fixed internal
// summation order gives identical results at any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// Shortest-faithful decimal rendering used by every CSV writer ("%.17g").
std::string format_double(double v);

}  // namespace goldgi
