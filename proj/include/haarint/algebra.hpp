#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace haarint {

using Rational = mpq_class;

// "p" or "p/q", lowest terms.
std::string to_string(const Rational& q);
// Strict parse: rejects non-reduced fractions, zero or negative denominators.
Rational parse_rational(const std::string& s);
// p/q in lowest terms (mpq_class(p, q) does not reduce).
Rational frac(long p, long q);
// x (x+1) ... (x+j-1)
Rational rising(const Rational& x, int j);
Rational factorial(int j);
double to_double(const Rational& q);

struct GaussRational {
    Rational re;
    Rational im;

    GaussRational() = default;
    GaussRational(Rational r) : re(std::move(r)) {}
    GaussRational(long r) : re(r) {}
    GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }
    GaussRational conj() const { return {re, -im}; }

    GaussRational& operator+=(const GaussRational& o);
    GaussRational& operator-=(const GaussRational& o);
    GaussRational& operator*=(const GaussRational& o);
    GaussRational& operator/=(const GaussRational& o);
    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
    GaussRational operator-() const { return {-re, -im}; }
    friend bool operator==(const GaussRational& a, const GaussRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }
};

// Real coordinates of an n x k matrix over R, C or H. Column c, component l,
// row r sit at c*comp*n + l*n + r. `comp` is beta for the three division
// algebras; generic layouts (Clifford functionals) allow any comp >= 1.
class CoordLayout {
public:
    CoordLayout() = default;
    CoordLayout(int beta, int n, int k);
    static CoordLayout generic(int comp, int n, int k);

    int beta() const { return comp_; }
    int n() const { return n_; }
    int k() const { return k_; }
    int dim() const { return comp_ * n_ * k_; }
    int column_dim() const { return comp_ * n_; }
    int index(int c, int l, int r) const { return c * comp_ * n_ + l * n_ + r; }
    int column_of(int idx) const { return idx / (comp_ * n_); }
    bool operator==(const CoordLayout&) const = default;

private:
    int comp_ = 1;
    int n_ = 1;
    int k_ = 1;
};

class Monomial {
public:
    using Entry = std::pair<std::uint32_t, std::uint32_t>;  // (coordinate, exponent)

    Monomial() = default;
    explicit Monomial(std::vector<Entry> entries);  // sorts, merges, drops zeros
    static Monomial var(std::uint32_t idx, std::uint32_t exp = 1);

    const std::vector<Entry>& entries() const { return e_; }
    std::uint32_t degree() const { return deg_; }
    std::uint32_t exponent(std::uint32_t idx) const;
    bool empty() const { return e_.empty(); }
    std::uint32_t max_index() const { return e_.empty() ? 0 : e_.back().first; }

    Monomial operator*(const Monomial& o) const;
    // Does this monomial divide `o`?
    bool divides(const Monomial& o) const;
    bool operator==(const Monomial& o) const { return e_ == o.e_; }

private:
    std::vector<Entry> e_;
    std::uint32_t deg_ = 0;
};

// Graded lexicographic: lower degree first; within a degree the larger
// exponent at the lowest differing coordinate comes first.
struct GradedLex {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

class Polynomial {
public:
    using Terms = std::map<Monomial, GaussRational, GradedLex>;

    Polynomial() = default;
    explicit Polynomial(CoordLayout layout) : layout_(layout) {}
    static Polynomial constant(CoordLayout layout, GaussRational c);
    static Polynomial variable(CoordLayout layout, int idx);
    static Polynomial monomial(CoordLayout layout, Monomial m, GaussRational c = GaussRational(1));

    const CoordLayout& layout() const { return layout_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_real() const;
    // -1 for the zero polynomial
    int degree() const;
    GaussRational constant_term() const;
    GaussRational coeff(const Monomial& m) const;

    void add_term(const Monomial& m, const GaussRational& c);
    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const GaussRational& c);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const GaussRational& c) { return a *= c; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    Polynomial operator-() const;
    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.layout_ == b.layout_ && a.terms_ == b.terms_;
    }

    Polynomial pow(int e) const;
    Polynomial diff(int coord) const;
    Polynomial homogeneous_part(int d) const;
    // Keep only the terms whose monomials use no coordinate of column c
    // (i.e. set that column to zero).
    Polynomial drop_column(int c) const;
    // Terms whose degree in column c equals d.
    Polynomial column_degree_part(int c, int d) const;
    // Substitute x_i -> sign[i] * x_{perm[i]}.
    Polynomial substitute_signed(const std::vector<int>& perm, const std::vector<int>& sign) const;
    Polynomial with_layout(CoordLayout layout) const;

    std::complex<double> eval(std::span<const double> point) const;

    std::string to_json() const;
    static Polynomial from_json(const std::string& text);

private:
    void check_same(const Polynomial& o) const;
    CoordLayout layout_;
    Terms terms_;
};

Polynomial pow(const Polynomial& p, int e);

// Random polynomial of degree <= max_degree with small integer coefficients,
// built from a few random monomials plus products of random quadratic forms
// so that Haar integrals are typically nonzero.
Polynomial random_polynomial(const CoordLayout& layout, int max_degree, std::mt19937_64& rng);

}  // namespace haarint
