// haarint: command-line front end. JSON on stdout, diagnostics on stderr.
// Exit codes: 0 ok, 1 a check failed, 2 bad flags or input.
#include "haarint/haar.hpp"
#include "haarint/iz.hpp"
#include "haarint/kernels.hpp"
#include "haarint/pizzetti.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace haarint;
using nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    int beta = 1, n = 2, k = 1;
    std::string poly, engine = "auto", convention = "from_zero", method = "mc", H, mc_check;
    std::uint64_t samples = 100000, seed = 1;
    int threads = 0, jmax = 60, trials = 20, nodes = 64, degree = 8, a_max = 4, kappa = 1, m = 2, max_degree = 4;
    double tolerance = -1;
    std::vector<double> lambdas;
};

ordered_json rational_json(const GaussRational& q) {
    if (q.is_real()) return to_string(q.re);
    return {{"re", to_string(q.re)}, {"im", to_string(q.im)}};
}

ordered_json mc_json(const McEstimate& e) {
    return {{"mean", e.mean}, {"stderr", e.std_error}, {"samples", e.samples}, {"seed", e.seed}};
}

ordered_json report_json(const CheckReport& r) {
    ordered_json j{{"passed", r.passed}, {"relations", r.relations}, {"applications", r.applications}};
    if (!r.passed) {
        j["failed"] = r.failed;
        if (!r.witness.empty()) j["witness"] = ordered_json::parse(r.witness);
    }
    return j;
}

StiefelSpec spec_of(const Flags& f) { return StiefelSpec(f.beta, f.n, f.k); }

Polynomial load_poly(const Flags& f, const StiefelSpec& spec) {
    if (f.poly.empty()) throw UsageError("--poly is required");
    std::ifstream in(f.poly);
    if (!in) throw UsageError("cannot read " + f.poly);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    Polynomial p = Polynomial::from_json(text);
    if (!ordered_json::parse(text).contains("layout")) return p.with_layout(spec.layout);
    if (!(p.layout() == spec.layout)) throw UsageError("polynomial layout does not match --beta/--n/--k");
    return p;
}

std::vector<double> parse_list(const std::string& s, std::size_t want, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            v.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad number in ") + what + ": '" + item + "'");
        }
    }
    if (want && v.size() != want) throw UsageError(std::string(what) + " needs " + std::to_string(want) + " values");
    return v;
}

int cmd_moment(const Flags& f) {
    const StiefelSpec spec = spec_of(f);
    const Polynomial p = load_poly(f, spec);
    const Engine e = resolve_engine(parse_engine(f.engine), spec);
    GaussRational v;
    if (e == Engine::Clifford) {
        if (spec.k != 2) throw UsageError("the clifford engine needs k = 2");
        v = clifford_functional(spec.beta, spec.n, build_general_jset(spec.beta, spec.beta * spec.n), p);
    } else {
        if (!engine_supports(e, spec)) throw UsageError("engine " + engine_name(e) + " does not support this manifold");
        v = integrate(e, spec, p);
    }
    ordered_json out{{"beta", spec.beta}, {"n", spec.n}, {"k", spec.k}, {"engine", engine_name(e)}, {"exact", rational_json(v)}};
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_kernel(const Flags& f) {
    const int m = f.n - f.k;
    KernelValue kv;
    if (f.beta == 2)
        kv = psi_hat_beta2(f.n, m, f.lambdas);
    else if (f.beta == 4)
        kv = psi_hat_beta4(f.n, m, f.lambdas);
    else
        throw UsageError("kernel needs --beta 2 or 4");
    ordered_json out{{"beta", f.beta}, {"n", f.n}, {"m", m}, {"lambda", f.lambdas}, {"value", kv.value},
                     {"method", method_name(kv.method)}};
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_iz(const Flags& f) {
    const std::vector<double> h = parse_list(f.H, 4, "--H");
    const std::array<double, 4> E{h[0], h[1], h[2], h[3]};
    const SumConvention conv = parse_convention(f.convention);
    const IzResult r = iz_series(E, f.jmax, conv);
    ordered_json out{{"value", r.value},         {"tail", r.tail_estimate}, {"convention", convention_name(conv)},
                     {"jmax", r.jmax},           {"converged", r.converged}, {"truncated", r.truncated}};
    if (!f.mc_check.empty()) {
        const std::vector<double> sc = parse_list(f.mc_check, 2, "--mc-check");
        if (sc[0] < 100 || sc[1] < 0) throw UsageError("--mc-check needs samples >= 100 and seed >= 0");
        const McEstimate e = iz_monte_carlo(E, static_cast<std::uint64_t>(sc[0]), static_cast<std::uint64_t>(sc[1]), f.threads);
        out["mc"] = mc_json(e);
    }
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_sample(const Flags& f) {
    const StiefelSpec spec = spec_of(f);
    if (f.samples > 100000) throw UsageError("sample emits at most 100000 points");
    std::mt19937_64 rng(f.seed);
    ordered_json pts = ordered_json::array();
    double orth = 0, structure = 0;
    for (std::uint64_t i = 0; i < f.samples; ++i) {
        const HaarSample s = sample_stiefel(spec, rng);
        orth = std::max(orth, orthonormality_residual(s));
        structure = std::max(structure, structure_residual(s));
        pts.push_back(s.x);
    }
    ordered_json out{{"beta", spec.beta}, {"n", spec.n}, {"k", spec.k}, {"seed", f.seed},
                     {"orthonormality_residual", orth}, {"structure_residual", structure}, {"points", std::move(pts)}};
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_check(const std::string& suite, const Flags& f) {
    ordered_json out;
    bool passed = false;
    if (suite == "commutators") {
        const CheckReport r = check_commutators(CoordLayout(f.beta, f.n, std::max(f.k, 2)), f.trials, f.seed);
        out = report_json(r);
        passed = r.passed;
    } else if (suite == "prop43" || suite == "pairing") {
        const StiefelSpec spec = spec_of(f);
        const Engine e = resolve_engine(parse_engine(f.engine), spec);
        if (!engine_supports(e, spec)) throw UsageError("engine " + engine_name(e) + " does not support this manifold");
        const CheckReport r = check_pairing_invariance(spec, e, f.trials, f.seed, f.max_degree);
        out = report_json(r);
        out["engine"] = engine_name(e);
        passed = r.passed;
    } else if (suite == "clifford-lemmas") {
        const CheckReport r = check_clifford_lemmas(f.kappa, f.m, f.trials, f.seed);
        out = report_json(r);
        passed = r.passed;
    } else if (suite == "sekiguchi") {
        const SekiguchiReport r = sekiguchi_check(f.a_max);
        ordered_json coefs = ordered_json::array();
        for (const auto& c : r.d1_coefficients) coefs.push_back(to_string(c));
        out = {{"passed", r.passed}, {"checks", r.checks}, {"d1_coefficients", coefs}};
        if (!r.passed) out["failed"] = r.failure;
        passed = r.passed;
    } else if (suite == "kernel-vs-moments") {
        const StiefelSpec spec = spec_of(f);
        const MomentCheck mc = kernel_moment_check(spec, f.lambdas, f.degree, parse_engine(f.engine));
        ordered_json rows = ordered_json::array();
        for (const auto& r : mc.rows)
            rows.push_back({{"degree", r.degree}, {"series", r.series_term}, {"kernel", r.kernel_term}});
        out = {{"passed", mc.passed},     {"series_value", mc.series_value}, {"kernel_value", mc.kernel_value},
               {"tail_bound", mc.tail_bound}, {"rows", rows}};
        passed = mc.passed;
    }
    std::cout << out.dump() << "\n";
    return passed ? 0 : 1;
}

int cmd_oracle(const Flags& f) {
    const StiefelSpec spec = spec_of(f);
    const Polynomial p = load_poly(f, spec);
    ordered_json out{{"beta", spec.beta}, {"n", spec.n}, {"k", spec.k}, {"method", f.method}};
    double value, slack;
    if (f.method == "mc") {
        const McEstimate e = mc_integrate(spec, p, f.samples, f.seed, f.threads);
        out["mc"] = mc_json(e);
        value = e.mean;
        slack = f.tolerance * e.std_error;  // tolerance in standard errors
    } else {
        value = low_dim_quadrature(spec, p, f.nodes);
        out["value"] = value;
        slack = f.tolerance;
    }
    if (f.tolerance < 0) {
        std::cout << out.dump() << "\n";
        return 0;
    }
    const GaussRational exact = integrate(Engine::Auto, spec, p);
    const bool ok = std::fabs(value - to_double(exact.re)) <= slack;
    out["exact"] = rational_json(exact);
    out["passed"] = ok;
    std::cout << out.dump() << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and Monte Carlo Haar integrals over Stiefel manifolds"};
    app.require_subcommand(1);
    Flags f;
    std::string suite;
    std::string lambda_text;

    auto spec_flags = [&](CLI::App* s) {
        s->add_option("--beta", f.beta, "1, 2 or 4")->check(CLI::IsMember({1, 2, 4}));
        s->add_option("--n", f.n, "rows")->check(CLI::PositiveNumber);
        s->add_option("--k", f.k, "columns")->check(CLI::PositiveNumber);
    };
    auto engine_flag = [&](CLI::App* s) {
        s->add_option("--engine", f.engine)->check(
            CLI::IsMember({"auto", "sphere", "codim2", "so2", "clifford", "recursion"}));
    };
    auto thread_flag = [&](CLI::App* s) {
        s->add_option("--threads", f.threads, "worker threads (default HAARINT_THREADS or all cores)")
            ->check(CLI::NonNegativeNumber);
    };

    CLI::App* moment = app.add_subcommand("moment", "exact Haar integral of a polynomial");
    spec_flags(moment);
    engine_flag(moment);
    moment->add_option("--poly", f.poly, "polynomial JSON file")->required();

    CLI::App* kernel = app.add_subcommand("kernel", "kernel function at singular values --lambda");
    spec_flags(kernel);
    kernel->add_option("--lambda", lambda_text, "comma-separated singular values")->required();

    CLI::App* iz = app.add_subcommand("iz", "series for E exp(-2 tr X X^T H) over St(4,2)");
    iz->add_option("--H", f.H, "e1,e2,e3,e4")->required();
    iz->add_option("--jmax", f.jmax)->check(CLI::Range(0, 60));
    iz->add_option("--convention", f.convention)->check(CLI::IsMember({"paper", "from_zero"}));
    iz->add_option("--mc-check", f.mc_check, "samples,seed");
    thread_flag(iz);

    CLI::App* sample = app.add_subcommand("sample", "Haar samples in coordinate order");
    spec_flags(sample);
    sample->add_option("--samples", f.samples)->check(CLI::PositiveNumber);
    sample->add_option("--seed", f.seed);

    CLI::App* check = app.add_subcommand("check", "named invariant suites");
    check->add_option("suite", suite)
        ->required()
        ->check(CLI::IsMember({"commutators", "prop43", "pairing", "clifford-lemmas", "sekiguchi", "kernel-vs-moments"}));
    spec_flags(check);
    engine_flag(check);
    check->add_option("--trials", f.trials)->check(CLI::PositiveNumber);
    check->add_option("--seed", f.seed);
    check->add_option("--max-degree", f.max_degree)->check(CLI::Range(0, 12));
    check->add_option("--kappa", f.kappa, "clifford-lemmas: number of generators")->check(CLI::PositiveNumber);
    check->add_option("--m", f.m, "clifford-lemmas: block count")->check(CLI::PositiveNumber);
    check->add_option("--a-max", f.a_max, "sekiguchi: largest power of det k")->check(CLI::Range(1, 5));
    check->add_option("--lambda", lambda_text, "kernel-vs-moments: singular values");
    check->add_option("--degree", f.degree, "kernel-vs-moments: series degree D")->check(CLI::Range(0, 16));

    CLI::App* oracle = app.add_subcommand("oracle", "Monte Carlo or quadrature estimate");
    spec_flags(oracle);
    oracle->add_option("--poly", f.poly, "polynomial JSON file")->required();
    oracle->add_option("--method", f.method)->check(CLI::IsMember({"mc", "quadrature"}));
    oracle->add_option("--samples", f.samples)->check(CLI::PositiveNumber);
    oracle->add_option("--seed", f.seed);
    oracle->add_option("--nodes", f.nodes)->check(CLI::Range(2, 512));
    oracle->add_option("--tolerance", f.tolerance,
                       "compare with the exact value: absolute for quadrature, in standard errors for mc");
    thread_flag(oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!lambda_text.empty()) f.lambdas = parse_list(lambda_text, 0, "--lambda");
        if (*moment) return cmd_moment(f);
        if (*kernel) return cmd_kernel(f);
        if (*iz) return cmd_iz(f);
        if (*sample) return cmd_sample(f);
        if (*check) return cmd_check(suite, f);
        if (*oracle) return cmd_oracle(f);
    } catch (const std::exception& e) {
        std::cerr << "haarint: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
