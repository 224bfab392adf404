#pragma once

#include "haarint/algebra.hpp"

namespace haarint {

// St^(beta)(n, m) with k = n - m columns.
struct StiefelSpec {
    int beta = 1;
    int n = 1;
    int k = 1;
    CoordLayout layout;

    StiefelSpec() = default;
    StiefelSpec(int beta_, int n_, int k_) : beta(beta_), n(n_), k(k_), layout(beta_, n_, k_) {}

    int m() const { return n - k; }
    int gamma() const { return beta == 4 ? 2 : 1; }
};

}  // namespace haarint
