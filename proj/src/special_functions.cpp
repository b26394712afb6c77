#include "lab/special_functions.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace lab {

std::string ScanReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["grid"] = grid;
    j["worst_violation"] = worst_violation;
    j["worst_location"] = worst_location;
    j["pass"] = pass;
    return j.dump();
}

static void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

double gamma_fn(double x) {
    require(std::isfinite(x) && x > 0.0, "gamma: x must be positive and finite");
    return std::tgamma(x);
}

double log_gamma(double x) {
    require(std::isfinite(x) && x > 0.0, "log_gamma: x must be positive and finite");
    return std::lgamma(x);
}

// Bernoulli numbers B_2 .. B_14 over their series denominators appear below.
// Shift to x >= 10 keeps the truncated asymptotic series below 1e-12.

double digamma(double x) {
    require(std::isfinite(x) && x > 0.0, "digamma: x must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    // psi(x) ~ ln x - 1/(2x) - sum B_{2k}/(2k x^{2k})
    double series = inv2 * (1.0 / 12.0
                  - inv2 * (1.0 / 120.0
                  - inv2 * (1.0 / 252.0
                  - inv2 * (1.0 / 240.0
                  - inv2 * (1.0 / 132.0
                  - inv2 * (691.0 / 32760.0
                  - inv2 * (1.0 / 12.0)))))));
    return acc + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
    require(std::isfinite(x) && x > 0.0, "trigamma: x must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    // psi'(x) ~ 1/x + 1/(2x^2) + sum B_{2k}/x^{2k+1}
    double series = inv * inv2 * (1.0 / 6.0
                  - inv2 * (1.0 / 30.0
                  - inv2 * (1.0 / 42.0
                  - inv2 * (1.0 / 30.0
                  - inv2 * (5.0 / 66.0
                  - inv2 * (691.0 / 2730.0
                  - inv2 * (7.0 / 6.0)))))));
    return acc + inv + 0.5 * inv2 + series;
}

double log_unit_ball_volume(int k) {
    require(k >= 1, "unit_ball_volume: k must be >= 1");
    return 0.5 * k * std::log(M_PI) - std::lgamma(0.5 * k + 1.0);
}

double unit_ball_volume(int k) { return std::exp(log_unit_ball_volume(k)); }

double log_sharp_lsi_constant(double p, int n) {
    require(p > 1.0, "sharp_lsi_constant: p must be > 1");
    require(n >= 1, "sharp_lsi_constant: n must be >= 1");
    const double q = p / (p - 1.0);
    return std::log(p / n) + (p - 1.0) * (std::log(p - 1.0) - 1.0)
         - (p / n) * (log_unit_ball_volume(n) + std::lgamma(double(n) / q + 1.0));
}

double sharp_lsi_constant(double p, int n) {
    return std::exp(log_sharp_lsi_constant(p, n));
}

double gaussian_integral(double alpha, int k, double q) {
    require(alpha > 0.0, "gaussian_integral: alpha must be positive");
    require(k >= 1, "gaussian_integral: k must be >= 1");
    require(q > 1.0 && q <= 2.0, "gaussian_integral: q must lie in (1, 2]");
    return std::exp(-(double(k) / q) * std::log(alpha)
                    + log_unit_ball_volume(k) + std::lgamma(double(k) / q + 1.0));
}

double log_k_sequence(int m, int n, double q) {
    require(m >= 1 && n >= 1, "k_sequence: m, n must be >= 1");
    require(q > 1.0 && q <= 2.0, "k_sequence: q must lie in (1, 2]");
    const double md = m, nd = n, sd = md + nd;
    return log_unit_ball_volume(m) + std::lgamma(md / q + 1.0)
         - log_unit_ball_volume(m + n) - std::lgamma(sd / q + 1.0)
         + (0.5 - 1.0 / q) * (md * std::log(md) + nd * std::log(nd) - sd * std::log(sd));
}

double k_sequence(int m, int n, double q) { return std::exp(log_k_sequence(m, n, q)); }

double log_k_limit(int n, double q) {
    require(n >= 1, "k_limit: n must be >= 1");
    require(q > 1.0 && q <= 2.0, "k_limit: q must lie in (1, 2]");
    const double nd = n;
    return (nd / q) * std::log(q) - 0.5 * nd * std::log(2.0 * M_PI)
         + nd * (1.0 / q - 0.5) * (1.0 - std::log(nd));
}

double k_limit(int n, double q) { return std::exp(log_k_limit(n, q)); }

GeneralConstants general_constants(int n, double p) {
    require(n >= 1, "general_constants: n must be >= 1");
    require(p >= 2.0, "general_constants: p must be >= 2");
    const double nd = n;
    GeneralConstants c{};
    c.log_A = 0.5 * p * (2.0 * std::log(p) - std::log(2.0 * M_PI * M_E * nd));
    c.log_B = ((1.0 + nd) / nd) * (0.5 * p - 1.0) * std::log(1.0 + nd)
            + std::log((p - 1.0) / nd)
            + (p - 1.0) * (std::log(p - 1.0) - std::log(p) - 1.0)
            - 0.5 * p * std::log(M_PI);
    c.A = std::exp(c.log_A);
    c.B = std::exp(c.log_B);
    return c;
}

ScanReport constant_chain_check(double p, int n, int m) {
    require(p >= 2.0, "constant_chain_check: p must be >= 2");
    require(n >= 2, "constant_chain_check: n must be >= 2");
    require(m >= 1, "constant_chain_check: m must be >= 1");
    const double q = p / (p - 1.0);
    const double log_left = log_sharp_lsi_constant(p, n);
    const double log_mid = std::log(p / double(n)) + (p - 1.0) * (std::log(p - 1.0) - 1.0)
                         + (p / double(n)) * log_k_sequence(m, n, q);
    const double log_right = general_constants(n, p).log_A;

    ScanReport r;
    r.name = "constant_chain";
    std::ostringstream g;
    g << "p=" << p << " n=" << n << " m=" << m;
    r.grid = g.str();
    r.tolerance = 1e-12;
    r.worst_violation = std::max(log_left - log_mid, log_mid - log_right);
    r.worst_location = {p, double(n), double(m)};
    r.pass = r.worst_violation <= r.tolerance;
    return r;
}

static double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double parallelogram_check(double q, const std::vector<double>& v,
                           const std::vector<double>& w) {
    require(q > 1.0 && q <= 2.0, "parallelogram_check: q must lie in (1, 2]");
    require(v.size() == w.size(), "parallelogram_check: dimension mismatch");
    const double nv = norm2(v), nw = norm2(w);
    double dot = 0.0, nsum = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        dot += v[i] * w[i];
        nsum += (v[i] + w[i]) * (v[i] + w[i]);
    }
    nsum = std::sqrt(nsum);
    const double cross = (nw == 0.0) ? 0.0 : q * std::pow(nw, q - 2.0) * dot;
    const double pv = (nv == 0.0) ? 0.0 : std::pow(nv, q);
    const double pw = (nw == 0.0) ? 0.0 : std::pow(nw, q);
    const double ps = (nsum == 0.0) ? 0.0 : std::pow(nsum, q);
    return (3.0 - q) * pv + cross + pw - ps;
}

double digamma_root() {
    auto f = [](double x) { return digamma(x) + x * trigamma(x); };
    double lo = 1e-3, hi = 0.5;
    require(f(lo) < 0.0 && f(hi) > 0.0, "digamma_root: bracket failure");
    for (int i = 0; i < 80 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ScanReport monotone_gamma_power_scan() {
    // log of G((x+t)/2)/G((x+t)/q) * G(x/q)/G(x/2) * (x^x/(x+t)^{x+t})^{1/2-1/q}
    auto value = [](double x, double t, double q) {
        return std::exp(std::lgamma((x + t) / 2.0) - std::lgamma((x + t) / q)
                        + std::lgamma(x / q) - std::lgamma(x / 2.0)
                        + (0.5 - 1.0 / q) * (x * std::log(x) - (x + t) * std::log(x + t)));
    };
    ScanReport r;
    r.name = "gamma_power_monotonicity";
    r.grid = "q in {1.1,1.25,1.5,1.75,2}, t in {1..10}, x in {0.25,0.5,...,40}";
    r.tolerance = 1e-10;
    r.worst_violation = -std::numeric_limits<double>::infinity();
    for (double q : {1.1, 1.25, 1.5, 1.75, 2.0}) {
        for (int t = 1; t <= 10; ++t) {
            double prev = value(0.25, t, q);
            for (int i = 2; i <= 160; ++i) {
                const double x = 0.25 * i;
                const double cur = value(x, t, q);
                const double viol = prev - cur;  // positive if decreasing
                if (viol > r.worst_violation) {
                    r.worst_violation = viol;
                    r.worst_location = {x, double(t), q};
                }
                prev = cur;
            }
        }
    }
    r.pass = r.worst_violation <= r.tolerance;
    return r;
}

ScanReport monotone_gamma_ratio_scan() {
    ScanReport r;
    r.name = "gamma_ratio_monotonicity";
    r.grid = "r in {1,1.5,2,3,5}, x in [1/2, 40] step 1/8 (log of the ratio)";
    r.tolerance = 1e-10;
    r.worst_violation = -std::numeric_limits<double>::infinity();
    for (double ratio : {1.0, 1.5, 2.0, 3.0, 5.0}) {
        double prev = std::lgamma(ratio * 0.5) - std::lgamma(0.5);
        for (int i = 5; i <= 320; ++i) {
            const double x = 0.125 * i;
            const double cur = std::lgamma(ratio * x) - std::lgamma(x);
            const double viol = prev - cur;
            if (viol > r.worst_violation) {
                r.worst_violation = viol;
                r.worst_location = {x, ratio};
            }
            prev = cur;
        }
    }
    r.pass = r.worst_violation <= r.tolerance;
    return r;
}

ScanReport parallelogram_scan(unsigned long long seed, int draws) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uq(1.0, 2.0);
    std::uniform_int_distribution<int> uk(1, 8);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ScanReport r;
    r.name = "parallelogram_inequality";
    std::ostringstream g;
    g << draws << " draws, q uniform (1,2], dim 1..8, Gaussian v,w, seed " << seed;
    r.grid = g.str();
    r.tolerance = 1e-12;
    r.worst_violation = -std::numeric_limits<double>::infinity();
    for (int d = 0; d < draws; ++d) {
        // nudge q away from the open endpoint at 1
        const double q = std::max(std::nextafter(1.0, 2.0), uq(rng));
        const int k = uk(rng);
        std::vector<double> v(k), w(k);
        for (int i = 0; i < k; ++i) v[i] = gauss(rng);
        for (int i = 0; i < k; ++i) w[i] = gauss(rng);
        const double slack = parallelogram_check(q, v, w);
        if (-slack > r.worst_violation) {
            r.worst_violation = -slack;
            r.worst_location = {q, double(k)};
        }
    }
    r.pass = r.worst_violation <= r.tolerance;
    return r;
}

}  // namespace lab
