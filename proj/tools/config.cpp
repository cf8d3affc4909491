#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <exception>
#include <thread>

#include "cli.hpp"
#include "pendrot/error.hpp"

namespace pendrot::cli {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::InvalidParams, msg); }

double parse_number(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) config_error("cannot parse " + what + " '" + s + "'");
    return v;
}

// "p/q" or a decimal that is an exact ratio with denominator ≤ 1000.
std::pair<int, int> parse_ratio(const std::string& s) {
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const double p = parse_number(s.substr(0, slash), "r numerator");
        const double q = parse_number(s.substr(slash + 1), "r denominator");
        if (p != std::round(p) || q != std::round(q) || q == 0) config_error("r must be a ratio of integers");
        const int ip = static_cast<int>(p), iq = static_cast<int>(q);
        const int g = std::gcd(ip, iq);
        return {ip / g, iq / g};
    }
    const double v = parse_number(s, "r");
    for (int q = 1; q <= 1000; ++q) {
        const double p = std::round(v * q);
        if (std::abs(p / q - v) < 1e-12) return {static_cast<int>(p), q};
    }
    config_error("r = " + s + " is not a ratio with a small denominator");
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
                next = n;
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

Resolved resolve(const RunConfig& cfg, const std::string& command) {
    Resolved res;
    const double a2 = cfg.a2.value_or(1.0);
    double a1 = cfg.a1.value_or(1.0);
    if (cfg.mu) {
        if (cfg.a1 && std::abs(*cfg.a1 - *cfg.mu * a2) > 1e-12 * std::max(1.0, std::abs(*cfg.a1))) {
            config_error("--a1 and --mu disagree");
        }
        a1 = *cfg.mu * a2;
    }
    if (!(cfg.eps >= 0.0) || !std::isfinite(cfg.eps)) config_error("eps must be finite and >= 0");

    if (cfg.r) {
        if (cfg.harmonics_given) config_error("give either --r or the harmonic integers k1 k2 l1 l2, not both");
        const auto [num, den] = parse_ratio(*cfg.r);
        res.params.a1 = a1;
        res.params.a2 = a2;
        res.params.eps = cfg.eps;
        res.params.r_num = num;
        res.params.r_den = den;
    } else {
        SystemParams sp;
        sp.a1 = a1;
        sp.a2 = a2;
        sp.k1 = cfg.k1;
        sp.k2 = cfg.k2;
        sp.l1 = cfg.l1;
        sp.l2 = cfg.l2;
        sp.eps = cfg.eps;
        res.reduction = reduce(sp);
        res.params = res.reduction->reduced;
    }
    res.params.validate();

    res.criterion = parse_criterion(cfg.criterion);
    res.checks = {{"melnikov_tol", 1e-8}, {"tau_tol", 1e-6}, {"symmetry_tol", 1e-8}, {"ray_step", 1e-4}};
    for (const auto& kv : cfg.tol_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) config_error("--tol-override expects KEY=VAL, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const double val = parse_number(kv.substr(eq + 1), key);
        if (key == "tol_root") res.search.tol_root = val;
        else if (key == "tol_degen") res.search.tol_degen = val;
        else if (key == "tol_tie") res.search.tol_tie = val;
        else if (key == "tau_max") res.search.tau_max = val;
        else if (key == "ode_tol") res.policy.ode.tol = val;
        else if (key == "delta") res.policy.delta = val;
        else if (key == "margin_coeff") res.policy.margin_coeff = val;
        else if (key == "level_coeff") res.policy.level_coeff = val;
        else if (key == "t_max_coeff") res.policy.t_max_coeff = val;
        else if (key == "eps_cap") res.policy.eps_cap = val;
        else if (key == "torus_drift_coeff") res.policy.torus_drift_coeff = val;
        else if (res.checks.count(key)) res.checks[key] = val;
        else config_error("unknown tolerance key '" + key + "'");
    }

    res.threads = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());

    auto& h = res.header;
    h.emplace_back("command", command);
    h.emplace_back("a1", format_double(res.params.a1));
    h.emplace_back("a2", format_double(res.params.a2));
    h.emplace_back("mu", format_double(res.params.mu()));
    h.emplace_back("eps", format_double(res.params.eps));
    h.emplace_back("r", std::to_string(res.params.r_num) + "/" + std::to_string(res.params.r_den));
    if (res.reduction) {
        h.emplace_back("k1", std::to_string(cfg.k1));
        h.emplace_back("k2", std::to_string(cfg.k2));
        h.emplace_back("l1", std::to_string(cfg.l1));
        h.emplace_back("l2", std::to_string(cfg.l2));
        h.emplace_back("orientation", std::to_string(res.reduction->orientation));
    }
    h.emplace_back("criterion", res.criterion.name());
    for (const auto& kv : cfg.tol_overrides) h.emplace_back("override", kv);
    return res;
}

}  // namespace pendrot::cli
