#pragma once

#include <vector>

namespace haarint {

using IntMatrix = std::vector<std::vector<int>>;

// Row a has the single entry sign[a] in column perm[a]. sign may be 0, which
// only arises for deliberately broken sets.
struct SignedPerm {
    std::vector<int> perm;
    std::vector<int> sign;

    int dim() const { return static_cast<int>(perm.size()); }
    IntMatrix dense() const;
    static SignedPerm identity(int d);
    // A (x) 1_block for a small signed-permutation pattern A.
    static SignedPerm kron_identity(const SignedPerm& a, int block);
    SignedPerm operator*(const SignedPerm& o) const;
    SignedPerm transpose() const;
    bool operator==(const SignedPerm&) const = default;
};

struct JSet {
    int d = 0;
    std::vector<SignedPerm> mats;  // mats[0] is the identity

    int kappa() const { return static_cast<int>(mats.size()); }
};

JSet build_jset(int beta, int n);
JSet build_general_jset(int kappa, int d);
bool verify_jset(const JSet& js);

IntMatrix matmul(const IntMatrix& a, const IntMatrix& b);

}  // namespace haarint
