#include <doctest.h>

#include "haarint/clifford.hpp"

using namespace haarint;

TEST_CASE("real and complex sets") {
    auto j1 = build_jset(1, 3);
    CHECK(j1.kappa() == 1);
    CHECK(j1.mats[0] == SignedPerm::identity(3));
    auto j2 = build_jset(2, 2);
    IntMatrix J = j2.mats[1].dense();
    IntMatrix want = {{0, 0, 1, 0}, {0, 0, 0, 1}, {-1, 0, 0, 0}, {0, -1, 0, 0}};
    CHECK(J == want);
    CHECK(verify_jset(j2));
}

TEST_CASE("quaternion set multiplication table") {
    for (int n = 1; n <= 4; ++n) {
        auto js = build_jset(4, n);
        REQUIRE(js.kappa() == 4);
        CHECK(verify_jset(js));
        const auto& J1 = js.mats[1];
        const auto& J2 = js.mats[2];
        const auto& J3 = js.mats[3];
        CHECK(J1 * J2 == J3);
        CHECK(J2 * J3 == J1);
        CHECK(J3 * J1 == J2);
        SignedPerm minus_id = SignedPerm::identity(4 * n);
        for (auto& s : minus_id.sign) s = -1;
        for (int i = 1; i <= 3; ++i) CHECK(js.mats[i] * js.mats[i] == minus_id);
    }
    IntMatrix j1 = build_jset(4, 1).mats[1].dense();
    IntMatrix want = {{0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
    CHECK(j1 == want);
}

TEST_CASE("general sets") {
    auto k2 = build_general_jset(2, 2);
    CHECK(k2.mats[1].dense() == IntMatrix{{0, 1}, {-1, 0}});
    auto k3 = build_general_jset(3, 4);
    CHECK(k3.kappa() == 3);
    CHECK(verify_jset(k3));
    IntMatrix a = matmul(k3.mats[1].dense(), k3.mats[2].dense());
    IntMatrix b = matmul(k3.mats[2].dense(), k3.mats[1].dense());
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(a[i][j] == -b[i][j]);
    CHECK(build_general_jset(1, 5).kappa() == 1);
    CHECK(verify_jset(build_general_jset(3, 12)));
    CHECK(verify_jset(build_general_jset(4, 8)));
    CHECK_THROWS(build_general_jset(3, 6));
    CHECK_THROWS(build_general_jset(2, 3));
    CHECK_THROWS(build_jset(3, 2));
}

TEST_CASE("verification rejects broken sets") {
    auto js = build_jset(4, 2);
    auto bad = js;
    for (auto& s : bad.mats[0].sign) s = 0;
    CHECK_FALSE(verify_jset(bad));
    auto sym = build_jset(2, 1);
    sym.mats[1].sign = {1, 1};
    CHECK_FALSE(verify_jset(sym));
    auto two_same = build_jset(4, 1);
    two_same.mats[2] = two_same.mats[1];
    CHECK_FALSE(verify_jset(two_same));
}
