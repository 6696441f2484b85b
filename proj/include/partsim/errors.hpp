#pragma once
#include <stdexcept>
#include <string>

namespace partsim {

// Thrown when a request would exceed the in-memory sampling budget; the
// message names the cheaper alternative (Poissonized / low-r sampling).
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when cross-referenced structures disagree (e.g. a mutation record
// pointing at a lineage that is not alive at that time).
struct integrity_error : std::runtime_error {
    explicit integrity_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace partsim
