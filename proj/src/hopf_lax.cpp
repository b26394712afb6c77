#include "lab/hopf_lax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

void require_usage(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double chord(const DiscreteSubmanifold& M, int a, int b) {
    double s = 0.0;
    for (int c = 0; c < M.N; ++c) {
        const double d = M.p(a)[c] - M.p(b)[c];
        s += d * d;
    }
    return std::sqrt(s);
}

// (1/q) log int e^{q u} dmu, evaluated as a shifted log-sum-exp
double log_lp_norm(const DiscreteSubmanifold& M, const std::vector<double>& u,
                   double q, Measure mu, double alpha) {
    double peak = -kInf;
    for (int v = 0; v < M.num_vertices(); ++v) peak = std::max(peak, q * u[v]);
    double s = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v)
        s += measure_weight(M, v, mu, alpha) * std::exp(q * u[v] - peak);
    return (peak + std::log(s)) / q;
}

void validate_times(const std::vector<double>& times) {
    require(!times.empty() && times[0] == 0.0,
            "hopf_lax: time grid must start at t = 0");
    for (size_t i = 1; i < times.size(); ++i)
        require(times[i] > times[i - 1] && times[i] > 0.0,
                "hopf_lax: times must be positive and strictly increasing");
}

// exact separable transform on flat charts: min over grid nodes of
// u(y) + |x-y|^2/(2t), one axis at a time
std::vector<double> flat_inf_convolution(const DiscreteSubmanifold& M,
                                         std::vector<double> f, double t) {
    std::vector<int> stride(M.n);
    {
        int s = 1;
        for (int a = M.n - 1; a >= 0; --a) {
            stride[a] = s;
            s *= M.dims[a];
        }
    }
    const int V = static_cast<int>(f.size());
    std::vector<double> out(V);
    for (int a = 0; a < M.n; ++a) {
        const int L = M.dims[a];
        const double h = M.spacing[a];
        const int lines = V / L;
        for (int line = 0; line < lines; ++line) {
            const int outer = line / stride[a], inner = line % stride[a];
            const int base = outer * stride[a] * L + inner;
            for (int i = 0; i < L; ++i) {
                double best = kInf;
                for (int j = 0; j < L; ++j) {
                    const double d = (i - j) * h;
                    best = std::min(best, f[base + j * stride[a]] + d * d / (2.0 * t));
                }
                out[base + i * stride[a]] = best;
            }
        }
        f = out;
    }
    return f;
}

std::vector<std::vector<int>> two_ring(const DiscreteSubmanifold& M) {
    const int V = M.num_vertices();
    std::vector<std::vector<int>> out(V);
    for (int v = 0; v < V; ++v) {
        auto& nb = out[v];
        for (int u : M.ring[v]) {
            nb.push_back(u);
            for (int w : M.ring[u])
                if (w != v) nb.push_back(w);
        }
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return out;
}

// Flag the table ill-posed when minimizers for central probe vertices land on
// the truncation boundary; closed meshes are never flagged.
bool central_minimizers_escape(const DiscreteSubmanifold& M,
                               const std::vector<int>& argmin) {
    double rmax = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) rmax = std::max(rmax, M.norm_x(v));
    int central = 0, escaped = 0;
    for (int v = 0; v < M.num_vertices(); ++v) {
        if (M.norm_x(v) > 0.2 * rmax) continue;
        ++central;
        if (argmin[v] >= 0 && M.boundary[argmin[v]]) ++escaped;
    }
    return central > 0 && 2 * escaped > central;
}

}  // namespace

bool quadratic_well_posed(double beta, double t) {
    return t > 0.0 && beta < 0.95 / (2.0 * t);
}

HopfLaxTable hopf_lax(const DiscreteSubmanifold& M, const ScalarField& u,
                      const std::vector<double>& times, DistancePolicy policy) {
    require(u.M == &M, "hopf_lax: field attached to a different submanifold");
    validate_times(times);
    for (double x : u.v)
        require(std::isfinite(x), "hopf_lax: u must be finite everywhere");

    if (policy == DistancePolicy::automatic)
        policy = (M.backend == Backend::chart && M.flat)
                     ? DistancePolicy::analytic_flat
                     : DistancePolicy::graph;
    require_usage(policy != DistancePolicy::analytic_flat ||
                      (M.backend == Backend::chart && M.flat),
                  "hopf_lax: analytic_flat policy needs a flat chart");

    HopfLaxTable table;
    table.M = &M;
    table.times = times;
    table.u = u;
    table.policy = policy;
    table.q.resize(times.size());
    for (auto& field : table.q) {
        field.M = &M;
        field.v = u.v;
    }

    const int V = M.num_vertices();
    const size_t T = times.size();
    if (policy == DistancePolicy::analytic_flat) {
        for (size_t i = 1; i < T; ++i)
            table.q[i].v = flat_inf_convolution(M, u.v, times[i]);
        // ill-posedness probe: brute-force minimizers for central vertices
        std::vector<int> argmin(V, -1);
        double rmax = 0.0;
        for (int v = 0; v < V; ++v) rmax = std::max(rmax, M.norm_x(v));
        const double tmax = times.back();
        for (int v = 0; v < V; ++v) {
            if (M.norm_x(v) > 0.2 * rmax) continue;
            double best = kInf;
            for (int y = 0; y < V; ++y) {
                const double d = chord(M, v, y);
                const double cand = u.v[y] + d * d / (2.0 * tmax);
                if (cand < best) {
                    best = cand;
                    argmin[v] = y;
                }
            }
        }
        table.ill_posed = central_minimizers_escape(M, argmin);
        return table;
    }

    // graph policy: per-source shortest paths on the two-ring graph. A source
    // y can only improve the slice at time t_i within distance
    // sqrt(2 t_i (max_x Q_{t_i}(x) - u(y))), so the per-slice upper envelopes
    // bound how far each Dijkstra must run.
    const auto nb = two_ring(M);
    std::vector<int> order(V);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return u.v[a] < u.v[b]; });
    std::vector<int> argmin(V);
    std::iota(argmin.begin(), argmin.end(), 0);
    std::vector<double> env(T);
    auto refresh_env = [&] {
        for (size_t i = 1; i < T; ++i)
            env[i] = *std::max_element(table.q[i].v.begin(), table.q[i].v.end());
    };
    refresh_env();

    std::vector<double> dist(V, kInf);
    std::vector<int> touched;
    using Item = std::pair<double, int>;
    int since_refresh = 0;
    for (int src : order) {
        if (++since_refresh >= 128) {
            refresh_env();
            since_refresh = 0;
        }
        double radius = 0.0;
        for (size_t i = 1; i < T; ++i) {
            const double gap = env[i] - u.v[src];
            if (gap > 0.0)
                radius = std::max(radius, std::sqrt(2.0 * times[i] * gap));
        }
        if (radius == 0.0) continue;
        radius = 1.05 * radius + 2.0 * M.hmax;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[src] = 0.0;
        touched.push_back(src);
        pq.push({0.0, src});
        while (!pq.empty()) {
            const auto [d, v] = pq.top();
            pq.pop();
            if (d > dist[v]) continue;
            if (d > radius) break;
            for (size_t i = 1; i < T; ++i) {
                const double cand = u.v[src] + d * d / (2.0 * times[i]);
                if (cand < table.q[i].v[v]) {
                    table.q[i].v[v] = cand;
                    if (i == T - 1) argmin[v] = src;
                }
            }
            for (int w : nb[v]) {
                const double cand = d + chord(M, v, w);
                if (cand < dist[w]) {
                    if (dist[w] == kInf) touched.push_back(w);
                    dist[w] = cand;
                    pq.push({cand, w});
                }
            }
        }
        for (int v : touched) dist[v] = kInf;
        touched.clear();
    }
    table.ill_posed = central_minimizers_escape(M, argmin);
    return table;
}

std::vector<ScalarField> hamilton_jacobi_residual(const HopfLaxTable& table) {
    require(table.times.size() >= 3,
            "hamilton_jacobi_residual: need at least 3 time samples");
    const DiscreteSubmanifold& M = *table.M;
    std::vector<ScalarField> out;
    for (size_t i = 0; i + 1 < table.times.size(); ++i) {
        const double dt = table.times[i + 1] - table.times[i];
        const auto grad = surface_gradient(table.q[i]);
        ScalarField r;
        r.M = &M;
        r.v.resize(M.num_vertices());
        for (int v = 0; v < M.num_vertices(); ++v) {
            double g2 = 0.0;
            for (int c = 0; c < M.N; ++c) g2 += grad.at(v)[c] * grad.at(v)[c];
            r.v[v] = (table.q[i + 1].v[v] - table.q[i].v[v]) / dt + 0.5 * g2;
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string HypercontractivityReport::csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "t,q_t,F,bound,ratio,monotone_flag\n";
    for (size_t i = 0; i < t.size(); ++i)
        os << t[i] << ',' << q[i] << ',' << F[i] << ',' << bound[i] << ','
           << ratio[i] << ',' << static_cast<int>(monotone[i]) << '\n';
    return os.str();
}

std::string HypercontractivityReport::json_summary() const {
    nlohmann::json j;
    j["kind"] = kind;
    j["a"] = a;
    if (kind == "euclidean") j["b"] = b;
    j["worst_ratio"] = ratio.empty() ? 0.0 : *std::max_element(ratio.begin(), ratio.end());
    j["all_monotone"] =
        std::all_of(monotone.begin(), monotone.end(), [](char m) { return m != 0; });
    j["equality_profile_distance"] = equality_profile_distance;
    j["ill_posed"] = ill_posed;
    return j.dump(2);
}

namespace {

// rms distance of u to c0 + <d, x> - beta |x|^2 over the patch (beta = 0
// fits the affine family)
double profile_distance(const DiscreteSubmanifold& M, const std::vector<double>& u,
                        double beta) {
    const int dim = M.N + 1;
    std::vector<double> A(static_cast<size_t>(dim) * dim, 0.0), rhs(dim, 0.0);
    const int V = M.num_vertices();
    auto basis = [&](int v, int k) {
        return k == 0 ? 1.0 : M.p(v)[k - 1];
    };
    for (int v = 0; v < V; ++v) {
        const double target = u[v] + beta * M.norm_x(v) * M.norm_x(v);
        for (int r = 0; r < dim; ++r) {
            rhs[r] += basis(v, r) * target;
            for (int c = 0; c < dim; ++c) A[r * dim + c] += basis(v, r) * basis(v, c);
        }
    }
    // gaussian elimination with partial pivoting on the small normal system
    std::vector<double> x(rhs);
    for (int col = 0; col < dim; ++col) {
        int piv = col;
        for (int r = col + 1; r < dim; ++r)
            if (std::abs(A[r * dim + col]) > std::abs(A[piv * dim + col])) piv = r;
        for (int c = 0; c < dim; ++c) std::swap(A[col * dim + c], A[piv * dim + c]);
        std::swap(x[col], x[piv]);
        const double p = A[col * dim + col];
        if (std::abs(p) < 1e-14) continue;
        for (int r = col + 1; r < dim; ++r) {
            const double f = A[r * dim + col] / p;
            for (int c = col; c < dim; ++c) A[r * dim + c] -= f * A[col * dim + c];
            x[r] -= f * x[col];
        }
    }
    for (int col = dim - 1; col >= 0; --col) {
        if (std::abs(A[col * dim + col]) < 1e-14) {
            x[col] = 0.0;
            continue;
        }
        for (int c = col + 1; c < dim; ++c) x[col] -= A[col * dim + c] * x[c];
        x[col] /= A[col * dim + col];
    }
    double ss = 0.0;
    for (int v = 0; v < V; ++v) {
        double fit = 0.0;
        for (int k = 0; k < dim; ++k) fit += x[k] * basis(v, k);
        const double target = u[v] + beta * M.norm_x(v) * M.norm_x(v);
        ss += (fit - target) * (fit - target);
    }
    return std::sqrt(ss / V);
}

}  // namespace

HypercontractivityReport euclidean_hyper_report(const DiscreteSubmanifold& M,
                                                const ScalarField& u, double a,
                                                double b, double t) {
    require(0.0 < a && a < b, "euclidean_hyper_report: need 0 < a < b");
    require(t > 0.0, "euclidean_hyper_report: t must be positive");
    const auto table = hopf_lax(M, u, {0.0, t});
    const int n = M.n;
    const double supH = M.sup_H_analytic;

    HypercontractivityReport rep;
    rep.kind = "euclidean";
    rep.a = a;
    rep.b = b;
    rep.ill_posed = table.ill_posed;
    const double logFa = log_lp_norm(M, u.v, a, Measure::volume, 0.0);
    const double logF = log_lp_norm(M, table.q[1].v, b, Measure::volume, 0.0);
    const double log_bound =
        logFa + 0.5 * n * (b - a) / (a * b) * std::log((b - a) / (2.0 * M_PI * t)) +
        0.5 * n * (a + b) / (a * b) * std::log(a / b) +
        t * supH * supH / 6.0 * (a * a + a * b + b * b) / (a * a * b * b);
    rep.t = {t};
    rep.q = {b};
    rep.F = {std::exp(logF)};
    rep.bound = {std::exp(log_bound)};
    rep.ratio = {std::exp(logF - log_bound)};
    rep.monotone = {1};
    rep.equality_profile_distance =
        profile_distance(M, u.v, (b - a) / (2.0 * b * t));
    return rep;
}

HypercontractivityReport gaussian_hyper_report(const DiscreteSubmanifold& M,
                                               const ScalarField& u, double a,
                                               const std::vector<double>& times) {
    require(a > 0.0, "gaussian_hyper_report: a must be positive");
    require_usage(M.shrinker,
                  "gaussian_hyper_report: submanifold was not generated as a "
                  "self-shrinker");
    validate_times(times);

    // growth hypothesis |u| <= C1 + C2 |x|^theta, theta < 2 (theta = 2
    // tolerated while (a + t/2) C2 < 1/4), fitted over the outer shell
    double rmax = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) rmax = std::max(rmax, M.norm_x(v));
    if (rmax >= 3.0) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        int cnt = 0;
        double c2 = 0.0;
        for (int v = 0; v < M.num_vertices(); ++v) {
            const double r = M.norm_x(v);
            if (r < 0.6 * rmax || std::abs(u.v[v]) < 1e-12) continue;
            const double lx = std::log(r), ly = std::log(std::abs(u.v[v]));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            c2 = std::max(c2, std::abs(u.v[v]) / (r * r));
            ++cnt;
        }
        if (cnt >= 8) {
            const double theta = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
            require_usage(theta <= 2.1,
                          "gaussian_hyper_report: u grows like |x|^theta with "
                          "theta > 2, outside the hypothesis");
            if (theta > 1.9)
                require_usage((a + 0.5 * times.back()) * c2 < 0.25,
                              "gaussian_hyper_report: quadratic-growth u "
                              "violates (a + t/2) C2 < 1/4");
        }
    }

    const auto table = hopf_lax(M, u, times);
    HypercontractivityReport rep;
    rep.kind = "gaussian";
    rep.a = a;
    rep.ill_posed = table.ill_posed;
    for (size_t i = 0; i < times.size(); ++i) {
        const double qi = a + 0.5 * times[i];
        const double logF =
            log_lp_norm(M, table.q[i].v, qi, Measure::gaussian, 0.25);
        rep.t.push_back(times[i]);
        rep.q.push_back(qi);
        rep.F.push_back(std::exp(logF));
        rep.bound.push_back(i == 0 ? std::exp(logF) : rep.bound[0]);
        rep.ratio.push_back(rep.F.back() / rep.bound[0]);
        rep.monotone.push_back(i == 0 ||
                               rep.F[i] <= rep.F[i - 1] * (1.0 + 1e-12) + 1e-12);
    }
    rep.equality_profile_distance = profile_distance(M, u.v, 0.0);
    return rep;
}

SharpnessProbeResult sharpness_probe(const std::string& kind, double trial) {
    SharpnessProbeResult res;
    res.trial = trial;
    const auto M = make_flat_chart(2, 1, 6.0, 65);

    if (kind == "euclidean_2pi") {
        require(trial > 0.0, "sharpness_probe: trial constant must be positive");
        const double a = 1.0, b = 2.0;
        for (double t : {0.25, 0.5}) {
            const double beta = (b - a) / (2.0 * b * t);
            if (!quadratic_well_posed(beta, t)) continue;
            ScalarField u;
            u.M = &M;
            u.v.resize(M.num_vertices());
            for (int v = 0; v < M.num_vertices(); ++v) {
                const double r = M.norm_x(v);
                u.v[v] = -beta * r * r;
            }
            auto rep = euclidean_hyper_report(M, u, a, b, t);
            // replacing 2 pi by a larger constant shrinks the bound, which
            // raises the observed ratio by (trial / 2 pi)^exponent
            const double shift =
                0.5 * M.n * (b - a) / (a * b) * std::log(trial / (2.0 * M_PI));
            const double trial_ratio = rep.ratio[0] * std::exp(shift);
            if (trial_ratio > res.ratio) {
                res.ratio = trial_ratio;
                res.t = t;
            }
            if (trial_ratio > 1.05) {
                res.found = true;
                res.notes = "extremal concave quadratic violates the modified bound";
            }
        }
        if (!res.found) res.notes = "no violation at this resolution";
        return res;
    }

    if (kind == "gaussian_factor2") {
        require(trial > 0.0, "sharpness_probe: trial constant must be positive");
        const double a = 1.0;
        ScalarField u;
        u.M = &M;
        u.v.resize(M.num_vertices());
        for (int v = 0; v < M.num_vertices(); ++v) u.v[v] = M.p(v)[0];
        const std::vector<double> times = {0.0, 0.2, 0.4};
        const auto table = hopf_lax(M, u, times);
        double F0 = 0.0;
        for (size_t i = 0; i < times.size(); ++i) {
            const double qi = a + times[i] / trial;
            const double F = std::exp(
                log_lp_norm(M, table.q[i].v, qi, Measure::gaussian, 0.25));
            if (i == 0) {
                F0 = F;
                continue;
            }
            if (F > F0 * (1.0 + 1e-3) && F / F0 > res.ratio) {
                res.found = true;
                res.t = times[i];
                res.ratio = F / F0;
                res.notes = "affine u breaks monotonicity at the trial exponent rate";
            }
        }
        if (!res.found) res.notes = "no violation at this resolution";
        return res;
    }

    throw std::invalid_argument("sharpness_probe: unknown kind " + kind);
}

}  // namespace lab
