#include "haarint/algebra.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>

namespace haarint {

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& s) {
    auto is_int = [](const std::string& t) {
        std::size_t i = (!t.empty() && t[0] == '-') ? 1 : 0;
        if (i >= t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    auto slash = s.find('/');
    std::string num = s.substr(0, slash);
    if (!is_int(num)) throw std::invalid_argument("bad rational: '" + s + "'");
    mpz_class p(num);
    mpz_class q(1);
    if (slash != std::string::npos) {
        std::string den = s.substr(slash + 1);
        if (!is_int(den) || den[0] == '-') throw std::invalid_argument("bad denominator: '" + s + "'");
        q = mpz_class(den);
        if (q == 0) throw std::invalid_argument("zero denominator: '" + s + "'");
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
        if (g != 1) throw std::invalid_argument("rational not in lowest terms: '" + s + "'");
    }
    return Rational(p, q);
}

Rational frac(long p, long q) {
    Rational r(p, q);
    r.canonicalize();
    return r;
}

Rational rising(const Rational& x, int j) {
    Rational r(1);
    for (int i = 0; i < j; ++i) r *= x + i;
    return r;
}

Rational factorial(int j) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(j));
    return Rational(f);
}

double to_double(const Rational& q) { return q.get_d(); }

GaussRational& GaussRational::operator+=(const GaussRational& o) {
    re += o.re;
    if (sgn(o.im) != 0) im += o.im;
    return *this;
}

GaussRational& GaussRational::operator-=(const GaussRational& o) {
    re -= o.re;
    if (sgn(o.im) != 0) im -= o.im;
    return *this;
}

GaussRational& GaussRational::operator*=(const GaussRational& o) {
    if (sgn(im) == 0 && sgn(o.im) == 0) {
        re *= o.re;
        return *this;
    }
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

GaussRational& GaussRational::operator/=(const GaussRational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    if (sgn(o.im) == 0) {
        re /= o.re;
        im /= o.re;
        return *this;
    }
    Rational d = o.re * o.re + o.im * o.im;
    *this *= o.conj();
    re /= d;
    im /= d;
    return *this;
}

CoordLayout::CoordLayout(int beta, int n, int k) : comp_(beta), n_(n), k_(k) {
    if (beta != 1 && beta != 2 && beta != 4) throw std::invalid_argument("beta must be 1, 2 or 4");
    if (n < 1 || k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
}

CoordLayout CoordLayout::generic(int comp, int n, int k) {
    if (comp < 1 || n < 1 || k < 1) throw std::invalid_argument("bad generic layout");
    CoordLayout l;
    l.comp_ = comp;
    l.n_ = n;
    l.k_ = k;
    return l;
}

Monomial::Monomial(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end());
    for (const auto& [i, e] : entries) {
        if (e == 0) continue;
        if (!e_.empty() && e_.back().first == i)
            e_.back().second += e;
        else
            e_.emplace_back(i, e);
        deg_ += e;
    }
}

Monomial Monomial::var(std::uint32_t idx, std::uint32_t exp) { return Monomial({{idx, exp}}); }

std::uint32_t Monomial::exponent(std::uint32_t idx) const {
    auto it = std::lower_bound(e_.begin(), e_.end(), Entry{idx, 0});
    return (it != e_.end() && it->first == idx) ? it->second : 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r;
    r.e_.reserve(e_.size() + o.e_.size());
    auto a = e_.begin();
    auto b = o.e_.begin();
    while (a != e_.end() || b != o.e_.end()) {
        if (b == o.e_.end() || (a != e_.end() && a->first < b->first)) {
            r.e_.push_back(*a++);
        } else if (a == e_.end() || b->first < a->first) {
            r.e_.push_back(*b++);
        } else {
            r.e_.emplace_back(a->first, a->second + b->second);
            ++a;
            ++b;
        }
    }
    r.deg_ = deg_ + o.deg_;
    return r;
}

bool Monomial::divides(const Monomial& o) const {
    auto b = o.e_.begin();
    for (const auto& [i, e] : e_) {
        while (b != o.e_.end() && b->first < i) ++b;
        if (b == o.e_.end() || b->first != i || b->second < e) return false;
    }
    return true;
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    const auto& x = a.entries();
    const auto& y = b.entries();
    std::size_t n = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i].first != y[i].first) return x[i].first < y[i].first;
        if (x[i].second != y[i].second) return x[i].second > y[i].second;
    }
    return x.size() < y.size();
}

Polynomial Polynomial::constant(CoordLayout layout, GaussRational c) {
    Polynomial p(layout);
    p.add_term(Monomial(), c);
    return p;
}

Polynomial Polynomial::variable(CoordLayout layout, int idx) {
    if (idx < 0 || idx >= layout.dim()) throw std::out_of_range("coordinate out of range");
    return monomial(layout, Monomial::var(static_cast<std::uint32_t>(idx)));
}

Polynomial Polynomial::monomial(CoordLayout layout, Monomial m, GaussRational c) {
    if (!m.empty() && m.max_index() >= static_cast<std::uint32_t>(layout.dim()))
        throw std::out_of_range("coordinate out of range");
    Polynomial p(layout);
    p.add_term(m, c);
    return p;
}

bool Polynomial::is_real() const {
    for (const auto& [m, c] : terms_)
        if (!c.is_real()) return false;
    return true;
}

int Polynomial::degree() const {
    if (terms_.empty()) return -1;
    return static_cast<int>(terms_.rbegin()->first.degree());
}

GaussRational Polynomial::constant_term() const { return coeff(Monomial()); }

GaussRational Polynomial::coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? GaussRational() : it->second;
}

void Polynomial::add_term(const Monomial& m, const GaussRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void Polynomial::check_same(const Polynomial& o) const {
    if (!(layout_ == o.layout_)) throw std::invalid_argument("layout mismatch");
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(const GaussRational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_same(b);
    Polynomial r(a.layout_);
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
}

Polynomial Polynomial::pow(int e) const {
    if (e < 0) throw std::invalid_argument("negative power");
    Polynomial r = constant(layout_, GaussRational(1));
    Polynomial base = *this;
    while (e > 0) {
        if (e & 1) r = r * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return r;
}

Polynomial pow(const Polynomial& p, int e) { return p.pow(e); }

Polynomial Polynomial::diff(int coord) const {
    if (coord < 0 || coord >= layout_.dim()) throw std::out_of_range("coordinate out of range");
    Polynomial r(layout_);
    auto idx = static_cast<std::uint32_t>(coord);
    for (const auto& [m, c] : terms_) {
        std::uint32_t e = m.exponent(idx);
        if (e == 0) continue;
        std::vector<Monomial::Entry> ent = m.entries();
        for (auto& x : ent)
            if (x.first == idx) x.second -= 1;
        r.add_term(Monomial(std::move(ent)), c * GaussRational(static_cast<long>(e)));
    }
    return r;
}

Polynomial Polynomial::homogeneous_part(int d) const {
    Polynomial r(layout_);
    for (const auto& [m, c] : terms_)
        if (static_cast<int>(m.degree()) == d) r.terms_.emplace_hint(r.terms_.end(), m, c);
    return r;
}

Polynomial Polynomial::drop_column(int c) const { return column_degree_part(c, 0); }

Polynomial Polynomial::column_degree_part(int c, int d) const {
    Polynomial r(layout_);
    for (const auto& [m, v] : terms_) {
        int cd = 0;
        for (const auto& [i, e] : m.entries())
            if (layout_.column_of(static_cast<int>(i)) == c) cd += static_cast<int>(e);
        if (cd == d) r.terms_.emplace_hint(r.terms_.end(), m, v);
    }
    return r;
}

Polynomial Polynomial::substitute_signed(const std::vector<int>& perm, const std::vector<int>& sign) const {
    if (perm.size() != static_cast<std::size_t>(layout_.dim()) || sign.size() != perm.size())
        throw std::invalid_argument("substitution size mismatch");
    Polynomial r(layout_);
    for (const auto& [m, c] : terms_) {
        std::vector<Monomial::Entry> ent;
        int s = 1;
        for (const auto& [i, e] : m.entries()) {
            ent.emplace_back(static_cast<std::uint32_t>(perm[i]), e);
            if (sign[i] < 0 && (e & 1)) s = -s;
        }
        r.add_term(Monomial(std::move(ent)), s > 0 ? c : -c);
    }
    return r;
}

Polynomial Polynomial::with_layout(CoordLayout layout) const {
    Polynomial r(layout);
    for (const auto& [m, c] : terms_) {
        if (!m.empty() && m.max_index() >= static_cast<std::uint32_t>(layout.dim()))
            throw std::out_of_range("polynomial does not fit layout");
        r.terms_.emplace_hint(r.terms_.end(), m, c);
    }
    return r;
}

namespace {

// Neumaier compensated accumulator.
struct CompSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

}  // namespace

std::complex<double> Polynomial::eval(std::span<const double> point) const {
    if (point.size() != static_cast<std::size_t>(layout_.dim())) throw std::invalid_argument("point length mismatch");
    CompSum re, im;
    for (const auto& [m, c] : terms_) {
        double v = 1.0;
        for (const auto& [i, e] : m.entries())
            for (std::uint32_t k = 0; k < e; ++k) v *= point[i];
        re.add(to_double(c.re) * v);
        if (!c.is_real()) im.add(to_double(c.im) * v);
    }
    return {re.value(), im.value()};
}

std::string Polynomial::to_json() const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["layout"] = {{"beta", layout_.beta()}, {"n", layout_.n()}, {"k", layout_.k()}};
    ordered_json terms = ordered_json::array();
    for (const auto& [m, c] : terms_) {
        ordered_json mono = ordered_json::object();
        for (const auto& [i, e] : m.entries()) mono[std::to_string(i)] = std::to_string(e);
        ordered_json t;
        t["m"] = mono;
        if (c.is_real())
            t["c"] = to_string(c.re);
        else
            t["c"] = {{"re", to_string(c.re)}, {"im", to_string(c.im)}};
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j.dump();
}

namespace {

std::uint32_t parse_count(const nlohmann::json& v, const char* what) {
    long long x;
    if (v.is_string()) {
        const std::string& s = v.get_ref<const std::string&>();
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
            throw std::invalid_argument(std::string("bad ") + what + ": '" + s + "'");
        x = std::stoll(s);
    } else if (v.is_number_integer()) {
        x = v.get<long long>();
    } else {
        throw std::invalid_argument(std::string("bad ") + what);
    }
    if (x < 0) throw std::invalid_argument(std::string("negative ") + what);
    return static_cast<std::uint32_t>(x);
}

Rational parse_rational_json(const nlohmann::json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw std::invalid_argument("coefficient must be a \"p/q\" string");
}

}  // namespace

Polynomial Polynomial::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
        throw std::invalid_argument("polynomial JSON needs a \"terms\" array");
    std::vector<std::pair<Monomial, GaussRational>> parsed;
    std::uint32_t max_idx = 0;
    for (const auto& t : j["terms"]) {
        if (!t.is_object() || !t.contains("m") || !t.contains("c") || !t["m"].is_object())
            throw std::invalid_argument("term needs \"m\" and \"c\"");
        std::vector<Monomial::Entry> ent;
        for (const auto& [key, val] : t["m"].items()) {
            std::uint32_t idx = parse_count(nlohmann::json(key), "coordinate index");
            ent.emplace_back(idx, parse_count(val, "exponent"));
            max_idx = std::max(max_idx, idx);
        }
        GaussRational c;
        const auto& cj = t["c"];
        if (cj.is_object()) {
            if (!cj.contains("re") || !cj.contains("im")) throw std::invalid_argument("complex coefficient needs re and im");
            c = GaussRational(parse_rational_json(cj["re"]), parse_rational_json(cj["im"]));
        } else {
            c = GaussRational(parse_rational_json(cj));
        }
        parsed.emplace_back(Monomial(std::move(ent)), std::move(c));
    }
    CoordLayout layout;
    if (j.contains("layout")) {
        const auto& l = j["layout"];
        layout = CoordLayout(l.at("beta").get<int>(), l.at("n").get<int>(), l.at("k").get<int>());
    } else {
        layout = CoordLayout::generic(1, static_cast<int>(max_idx) + 1, 1);
    }
    Polynomial p(layout);
    for (auto& [m, c] : parsed) {
        if (!m.empty() && m.max_index() >= static_cast<std::uint32_t>(layout.dim()))
            throw std::out_of_range("coordinate index exceeds layout dimension");
        p.add_term(m, c);
    }
    return p;
}

Polynomial random_polynomial(const CoordLayout& layout, int max_degree, std::mt19937_64& rng) {
    const int dim = layout.dim();
    std::uniform_int_distribution<int> coord(0, dim - 1);
    std::uniform_int_distribution<int> small(1, 3);
    std::bernoulli_distribution flip(0.5);
    auto rand_coeff = [&] { return GaussRational(flip(rng) ? small(rng) : -small(rng)); };

    Polynomial p(layout);
    int nmono = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int t = 0; t < nmono; ++t) {
        int d = std::uniform_int_distribution<int>(0, max_degree)(rng);
        std::vector<Monomial::Entry> ent;
        for (int i = 0; i < d; ++i) ent.emplace_back(coord(rng), 1);
        p.add_term(Monomial(std::move(ent)), rand_coeff());
    }
    int nprod = std::uniform_int_distribution<int>(1, 2)(rng);
    for (int t = 0; t < nprod && max_degree >= 2; ++t) {
        int factors = std::uniform_int_distribution<int>(1, max_degree / 2)(rng);
        Polynomial prod = Polynomial::constant(layout, rand_coeff());
        for (int f = 0; f < factors; ++f) {
            Polynomial q(layout);
            int nt = std::uniform_int_distribution<int>(1, 3)(rng);
            for (int s = 0; s < nt; ++s) {
                int a = coord(rng);
                int b = flip(rng) ? a : coord(rng);
                q.add_term(Monomial({{static_cast<std::uint32_t>(a), 1}, {static_cast<std::uint32_t>(b), 1}}), rand_coeff());
            }
            prod = prod * q;
        }
        p += prod;
    }
    return p;
}

}  // namespace haarint
