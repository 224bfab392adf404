#include "haarint/clifford.hpp"

#include <stdexcept>

namespace haarint {

IntMatrix SignedPerm::dense() const {
    const int d = dim();
    IntMatrix m(d, std::vector<int>(d, 0));
    for (int a = 0; a < d; ++a) m[a][perm[a]] = sign[a];
    return m;
}

SignedPerm SignedPerm::identity(int d) {
    SignedPerm s;
    for (int a = 0; a < d; ++a) {
        s.perm.push_back(a);
        s.sign.push_back(1);
    }
    return s;
}

SignedPerm SignedPerm::kron_identity(const SignedPerm& a, int block) {
    SignedPerm s;
    for (int r = 0; r < a.dim(); ++r)
        for (int i = 0; i < block; ++i) {
            s.perm.push_back(a.perm[r] * block + i);
            s.sign.push_back(a.sign[r]);
        }
    return s;
}

SignedPerm SignedPerm::operator*(const SignedPerm& o) const {
    SignedPerm s;
    for (int a = 0; a < dim(); ++a) {
        int mid = perm[a];
        s.perm.push_back(o.perm[mid]);
        s.sign.push_back(sign[a] * o.sign[mid]);
    }
    return s;
}

SignedPerm SignedPerm::transpose() const {
    SignedPerm s;
    s.perm.assign(dim(), 0);
    s.sign.assign(dim(), 0);
    for (int a = 0; a < dim(); ++a) {
        s.perm[perm[a]] = a;
        s.sign[perm[a]] = sign[a];
    }
    return s;
}

namespace {

SignedPerm pattern(std::initializer_list<std::pair<int, int>> rows) {
    SignedPerm s;
    for (auto [col, sg] : rows) {
        s.perm.push_back(col);
        s.sign.push_back(sg);
    }
    return s;
}

// 4x4 block patterns of the quaternion units acting on stacked components.
const SignedPerm& quat1() {
    static const SignedPerm p = pattern({{1, 1}, {0, -1}, {3, -1}, {2, 1}});
    return p;
}
const SignedPerm& quat2() {
    static const SignedPerm p = pattern({{2, 1}, {3, 1}, {0, -1}, {1, -1}});
    return p;
}
const SignedPerm& complex_unit() {
    static const SignedPerm p = pattern({{1, 1}, {0, -1}});
    return p;
}

}  // namespace

JSet build_jset(int beta, int n) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    switch (beta) {
        case 1:
            return build_general_jset(1, n);
        case 2:
            return build_general_jset(2, 2 * n);
        case 4:
            return build_general_jset(4, 4 * n);
        default:
            throw std::invalid_argument("beta must be 1, 2 or 4");
    }
}

JSet build_general_jset(int kappa, int d) {
    if (d < 1) throw std::invalid_argument("dimension must be positive");
    JSet js;
    js.d = d;
    js.mats.push_back(SignedPerm::identity(d));
    switch (kappa) {
        case 1:
            break;
        case 2:
            if (d % 2) throw std::invalid_argument("kappa=2 needs even dimension");
            js.mats.push_back(SignedPerm::kron_identity(complex_unit(), d / 2));
            break;
        case 3:
        case 4: {
            if (d % 4) throw std::invalid_argument("kappa=3,4 needs dimension divisible by 4");
            SignedPerm j1 = SignedPerm::kron_identity(quat1(), d / 4);
            SignedPerm j2 = SignedPerm::kron_identity(quat2(), d / 4);
            js.mats.push_back(j1);
            js.mats.push_back(j2);
            if (kappa == 4) js.mats.push_back(j1 * j2);
            break;
        }
        default:
            throw std::invalid_argument("kappa must be in 1..4");
    }
    return js;
}

IntMatrix matmul(const IntMatrix& a, const IntMatrix& b) {
    const std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), inner = b.size();
    IntMatrix c(n, std::vector<int>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < inner; ++k)
            if (a[i][k])
                for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

bool verify_jset(const JSet& js) {
    const int d = js.d;
    if (js.mats.empty()) return false;
    std::vector<IntMatrix> dense;
    for (const auto& m : js.mats) {
        if (m.dim() != d) return false;
        dense.push_back(m.dense());
    }
    auto transpose = [d](const IntMatrix& m) {
        IntMatrix t(d, std::vector<int>(d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) t[j][i] = m[i][j];
        return t;
    };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (dense[0][i][j] != (i == j ? 1 : 0)) return false;
    for (std::size_t p = 1; p < dense.size(); ++p)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (dense[p][i][j] != -dense[p][j][i]) return false;
    for (std::size_t p = 0; p < dense.size(); ++p) {
        IntMatrix tp = transpose(dense[p]);
        for (std::size_t q = p; q < dense.size(); ++q) {
            IntMatrix a = matmul(tp, dense[q]);
            IntMatrix b = matmul(transpose(dense[q]), dense[p]);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    int want = (p == q && i == j) ? 2 : 0;
                    if (a[i][j] + b[i][j] != want) return false;
                }
        }
    }
    return true;
}

}  // namespace haarint
