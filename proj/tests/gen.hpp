#pragma once
// Hand-rolled property-test driver: runs a body over seeded random cases and
// reports the failing case index so it can be replayed.
#include <cstdint>
#include <string>

#include "doctest.h"
#include "qpf/common.hpp"

namespace gen {

template <class Body>
void for_all(std::uint64_t seed, int cases, Body&& body) {
    for (int i = 0; i < cases; ++i) {
        qpf::Rng rng(seed * 1000003ull + static_cast<std::uint64_t>(i));
        CAPTURE(i);
        body(rng);
    }
}

}  // namespace gen
