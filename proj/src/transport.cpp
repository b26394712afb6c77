#include "lab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot_n(const double* a, const double* b, int N) {
    double s = 0.0;
    for (int k = 0; k < N; ++k) s += a[k] * b[k];
    return s;
}

double sq_dist(const double* a, const double* b, int N) {
    double s = 0.0;
    for (int k = 0; k < N; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

void validate_masses(const std::vector<double>& m, const char* which) {
    double total = 0.0;
    for (double v : m) {
        if (v < 0.0)
            throw std::invalid_argument(std::string(which) +
                                        " masses must be non-negative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument(std::string(which) +
                                    " masses must sum to 1");
}

// Transportation problem by successive shortest augmenting paths with
// potentials.  cost is row-major ns x nt; init_phi / init_psi shift the
// starting potentials so two cost matrices differing by per-row and
// per-column constants run through identical reduced costs and produce
// identical plans.
struct FlowResult {
    std::vector<double> flow;  // ns x nt
    std::vector<double> phi;
    std::vector<double> psi;
};

FlowResult min_cost_flow(int ns, int nt, const std::vector<double>& cost,
                         const std::vector<double>& init_phi,
                         const std::vector<double>& init_psi,
                         std::vector<double> supply,
                         std::vector<double> demand) {
    FlowResult r;
    r.flow.assign(static_cast<size_t>(ns) * nt, 0.0);
    r.phi = init_phi;
    r.psi = init_psi;

    const int V = ns + nt;
    std::vector<double> dist(V);
    std::vector<int> parent(V);
    std::vector<char> done(V);

    double remaining = 0.0;
    for (double d : demand) remaining += d;

    const int max_iters = 10 * V + 100;
    int iters = 0;
    while (remaining > 1e-13) {
        if (++iters > max_iters)
            throw std::runtime_error("transport solver failed to converge");
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(parent.begin(), parent.end(), -1);
        std::fill(done.begin(), done.end(), 0);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        for (int i = 0; i < ns; ++i)
            if (supply[i] > 1e-15) {
                dist[i] = 0.0;
                pq.push({0.0, i});
            }
        int sink = -1;
        while (!pq.empty()) {
            const auto [d, v] = pq.top();
            pq.pop();
            if (done[v]) continue;
            done[v] = 1;
            if (v >= ns && demand[v - ns] > 1e-15) {
                sink = v;
                break;
            }
            if (v < ns) {
                const int i = v;
                const double* row = &cost[static_cast<size_t>(i) * nt];
                for (int j = 0; j < nt; ++j) {
                    const double rc =
                        std::max(0.0, row[j] - r.phi[i] - r.psi[j]);
                    if (d + rc < dist[ns + j]) {
                        dist[ns + j] = d + rc;
                        parent[ns + j] = i;
                        pq.push({dist[ns + j], ns + j});
                    }
                }
            } else {
                const int j = v - ns;
                for (int i = 0; i < ns; ++i) {
                    if (r.flow[static_cast<size_t>(i) * nt + j] <= 0.0)
                        continue;
                    // reduced cost of the reverse arc; zero on the support
                    // up to rounding
                    const double rc = std::max(
                        0.0, r.phi[i] + r.psi[j] -
                                 cost[static_cast<size_t>(i) * nt + j]);
                    if (d + rc < dist[i]) {
                        dist[i] = d + rc;
                        parent[i] = v;
                        pq.push({dist[i], i});
                    }
                }
            }
        }
        if (sink < 0)
            throw std::invalid_argument(
                "transport instance is infeasible: demand unreachable");
        const double dT = dist[sink];
        for (int i = 0; i < ns; ++i) r.phi[i] -= std::min(dist[i], dT);
        for (int j = 0; j < nt; ++j) r.psi[j] += std::min(dist[ns + j], dT);

        // bottleneck along the augmenting path
        double delta = demand[sink - ns];
        for (int v = sink; parent[v] >= 0 || v < ns;) {
            const int u = parent[v];
            if (u < 0) {
                delta = std::min(delta, supply[v]);
                break;
            }
            if (v >= ns) {
                // forward arc u -> v, unbounded capacity
            } else {
                delta = std::min(
                    delta,
                    r.flow[static_cast<size_t>(v) * nt + (u - ns)]);
            }
            v = u;
        }
        for (int v = sink; parent[v] >= 0 || v < ns;) {
            const int u = parent[v];
            if (u < 0) {
                supply[v] -= delta;
                break;
            }
            if (v >= ns)
                r.flow[static_cast<size_t>(u) * nt + (v - ns)] += delta;
            else
                r.flow[static_cast<size_t>(v) * nt + (u - ns)] -= delta;
            v = u;
        }
        demand[sink - ns] -= delta;
        remaining -= delta;
    }
    return r;
}

// Successive shortest paths can return a degenerate optimum whose support
// contains cycles; cancel them in the cost-non-increasing direction until
// the support is a forest, which bounds it by ns + nt - 1 arcs.
void reduce_to_forest(int ns, int nt, const std::vector<double>& cost,
                      std::vector<double>& flow) {
    const int V = ns + nt;
    struct Edge {
        int i, j;
    };
    while (true) {
        std::vector<Edge> edges;
        for (int i = 0; i < ns; ++i)
            for (int j = 0; j < nt; ++j)
                if (flow[static_cast<size_t>(i) * nt + j] > 1e-14)
                    edges.push_back({i, j});
        std::vector<std::vector<std::pair<int, int>>> adj(V);  // (edge, other)
        for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
            adj[edges[e].i].push_back({e, ns + edges[e].j});
            adj[ns + edges[e].j].push_back({e, edges[e].i});
        }
        // DFS for a cycle
        std::vector<int> parent_edge(V, -1), parent(V, -1);
        std::vector<char> state(V, 0);  // 0 new, 1 on stack, 2 done
        std::vector<int> cycle_edges;
        for (int root = 0; root < V && cycle_edges.empty(); ++root) {
            if (state[root]) continue;
            std::vector<std::pair<int, size_t>> stack{{root, 0}};
            state[root] = 1;
            while (!stack.empty() && cycle_edges.empty()) {
                auto& [v, it] = stack.back();
                if (it == adj[v].size()) {
                    state[v] = 2;
                    stack.pop_back();
                    continue;
                }
                const auto [e, w] = adj[v][it++];
                if (e == parent_edge[v]) continue;
                if (state[w] == 1) {
                    cycle_edges.push_back(e);
                    for (int u = v; u != w; u = parent[u])
                        cycle_edges.push_back(parent_edge[u]);
                } else if (state[w] == 0) {
                    state[w] = 1;
                    parent[w] = v;
                    parent_edge[w] = e;
                    stack.push_back({w, 0});
                }
            }
        }
        if (cycle_edges.empty()) return;
        // alternate signs around the even cycle; orient so the cost change
        // is non-positive
        double dcost = 0.0;
        for (size_t k = 0; k < cycle_edges.size(); ++k) {
            const auto& e = edges[cycle_edges[k]];
            const double s = (k % 2 == 0) ? 1.0 : -1.0;
            dcost += s * cost[static_cast<size_t>(e.i) * nt + e.j];
        }
        const double orient = dcost <= 0.0 ? 1.0 : -1.0;
        double delta = kInf;
        for (size_t k = 0; k < cycle_edges.size(); ++k) {
            const double s = orient * ((k % 2 == 0) ? 1.0 : -1.0);
            if (s < 0.0) {
                const auto& e = edges[cycle_edges[k]];
                delta = std::min(delta,
                                 flow[static_cast<size_t>(e.i) * nt + e.j]);
            }
        }
        for (size_t k = 0; k < cycle_edges.size(); ++k) {
            const double s = orient * ((k % 2 == 0) ? 1.0 : -1.0);
            const auto& e = edges[cycle_edges[k]];
            double& f = flow[static_cast<size_t>(e.i) * nt + e.j];
            f += s * delta;
            if (f <= 1e-14) f = 0.0;
        }
    }
}

}  // namespace

TargetMeasure make_gaussian_target(int N, int per_axis, double radius,
                                   double alpha) {
    if (N < 1 || per_axis < 2 || radius <= 0.0 || alpha <= 0.0)
        throw std::invalid_argument("bad gaussian target parameters");
    TargetMeasure t;
    t.N = N;
    t.trim_radius = radius;
    const double h = 2.0 * radius / (per_axis - 1);
    std::vector<int> idx(N, 0);
    std::vector<double> y(N);
    double total = 0.0;
    while (true) {
        double r2 = 0.0;
        for (int k = 0; k < N; ++k) {
            y[k] = -radius + idx[k] * h;
            r2 += y[k] * y[k];
        }
        if (r2 <= radius * radius) {
            t.points.insert(t.points.end(), y.begin(), y.end());
            const double w = std::exp(-alpha * r2);
            t.mass.push_back(w);
            total += w;
        }
        int k = N - 1;
        while (k >= 0 && ++idx[k] == per_axis) idx[k--] = 0;
        if (k < 0) break;
    }
    for (double& w : t.mass) w /= total;
    return t;
}

TransportPlan solve_exact(const TransportInstance& inst) {
    if (inst.M == nullptr) throw std::invalid_argument("missing source mesh");
    const DiscreteSubmanifold& M = *inst.M;
    const int ns = M.num_vertices();
    const int nt = inst.target.count();
    if (static_cast<long long>(ns) * nt > 4'000'000)
        throw std::length_error("transport instance over the size budget");
    if (static_cast<int>(inst.source_mass.size()) != ns ||
        inst.target.N != M.N || nt == 0)
        throw std::invalid_argument("inconsistent transport instance");
    validate_masses(inst.source_mass, "source");
    validate_masses(inst.target.mass, "target");

    std::vector<double> cq(static_cast<size_t>(ns) * nt);
    std::vector<double> cs(cq.size());
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j) {
            const size_t e = static_cast<size_t>(i) * nt + j;
            cq[e] = 0.5 * sq_dist(M.p(i), inst.target.p(j), M.N);
            cs[e] = -dot_n(M.p(i), inst.target.p(j), M.N);
        }
    std::vector<double> zero_s(ns, 0.0), zero_t(nt, 0.0);
    std::vector<double> shift_s(ns), shift_t(nt);
    for (int i = 0; i < ns; ++i)
        shift_s[i] = -0.5 * dot_n(M.p(i), M.p(i), M.N);
    for (int j = 0; j < nt; ++j)
        shift_t[j] =
            -0.5 * dot_n(inst.target.p(j), inst.target.p(j), inst.target.N);

    auto fq = min_cost_flow(ns, nt, cq, zero_s, zero_t, inst.source_mass,
                            inst.target.mass);
    reduce_to_forest(ns, nt, cq, fq.flow);
    // the two conventions differ by per-row and per-column constants, so
    // shifted duals certify the same plan as optimal for both; check dual
    // feasibility and complementary slackness under each cost matrix
    std::vector<double> phi_s(ns), psi_t(nt);
    for (int i = 0; i < ns; ++i) phi_s[i] = fq.phi[i] + shift_s[i];
    for (int j = 0; j < nt; ++j) psi_t[j] = fq.psi[j] + shift_t[j];
    double scale = 1.0;
    for (double v : cq) scale = std::max(scale, std::abs(v));
    for (double v : cs) scale = std::max(scale, std::abs(v));
    const double tol = 1e-9 * scale;
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j) {
            const size_t e = static_cast<size_t>(i) * nt + j;
            const double rq = cq[e] - fq.phi[i] - fq.psi[j];
            const double rs = cs[e] - phi_s[i] - psi_t[j];
            if (rq < -tol || rs < -tol)
                throw std::runtime_error(
                    "cost conventions disagree on the optimal plan");
            if (fq.flow[e] > 1e-14 &&
                (std::abs(rq) > tol || std::abs(rs) > tol))
                throw std::runtime_error(
                    "cost conventions disagree on the optimal plan");
        }

    const bool quad = inst.cost == CostConvention::quadratic;
    const auto& f = fq;
    const auto& c = quad ? cq : cs;
    TransportPlan plan;
    plan.convention = inst.cost;
    plan.psi = quad ? f.phi : phi_s;
    plan.psi_target = quad ? f.psi : psi_t;
    double dual = 0.0;
    for (int i = 0; i < ns; ++i) dual += inst.source_mass[i] * plan.psi[i];
    for (int j = 0; j < nt; ++j)
        dual += inst.target.mass[j] * plan.psi_target[j];
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j) {
            const size_t e = static_cast<size_t>(i) * nt + j;
            if (f.flow[e] > 1e-14) {
                plan.support.push_back({i, j, f.flow[e]});
                plan.cost += f.flow[e] * c[e];
            }
        }
    plan.duality_gap = plan.cost - dual;
    return plan;
}

CycleScanReport cyclical_monotonicity_check(const TransportInstance& inst,
                                            const TransportPlan& plan,
                                            int num_cycles, int cycle_length,
                                            std::uint64_t seed) {
    if (cycle_length < 2 || cycle_length > 4)
        throw std::invalid_argument("cycle length must be in [2, 4]");
    if (plan.support.empty())
        throw std::invalid_argument("plan has empty support");
    const DiscreteSubmanifold& M = *inst.M;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(
        0, static_cast<int>(plan.support.size()) - 1);
    std::uniform_int_distribution<int> len(2, cycle_length);

    CycleScanReport rep;
    std::vector<int> cyc;
    auto record = [&](const std::vector<int>& cycle, double s) {
        ++rep.cycles_checked;
        if (rep.cycles_checked == 1 || s < rep.worst_sum) {
            rep.worst_sum = s;
            rep.witness = cycle;
        }
    };
    // all length-2 cycles when the support is small enough; sampling alone
    // is unlikely to hit a specific bad pair
    const int S = static_cast<int>(plan.support.size());
    if (static_cast<long long>(S) * S <= 4'000'000) {
        for (int a = 0; a < S; ++a)
            for (int b = a + 1; b < S; ++b) {
                const auto& ea = plan.support[a];
                const auto& eb = plan.support[b];
                const double* ya = inst.target.p(ea.j);
                const double* yb = inst.target.p(eb.j);
                double s = 0.0;
                for (int d = 0; d < M.N; ++d)
                    s += (ya[d] - yb[d]) * (M.p(ea.i)[d] - M.p(eb.i)[d]);
                record({a, b}, s);
            }
    }
    for (int c = 0; c < num_cycles; ++c) {
        const int k = len(rng);
        cyc.clear();
        for (int t = 0; t < k; ++t) cyc.push_back(pick(rng));
        double s = 0.0;
        for (int t = 0; t < k; ++t) {
            const auto& cur = plan.support[cyc[t]];
            const auto& nxt = plan.support[cyc[(t + 1) % k]];
            const double* y = inst.target.p(cur.j);
            const double* x = M.p(cur.i);
            const double* xn = M.p(nxt.i);
            for (int d = 0; d < M.N; ++d) s += y[d] * (x[d] - xn[d]);
        }
        record(cyc, s);
    }
    rep.pass = rep.worst_sum >= -1e-9;
    return rep;
}

StructureReport structure_check(const TransportInstance& inst,
                                const TransportPlan& plan) {
    const DiscreteSubmanifold& M = *inst.M;
    const int N = M.N;
    StructureReport rep;
    std::vector<double> yT(N);
    for (const auto& e : plan.support) {
        const double* y = inst.target.p(e.j);
        project_tangent(M, e.i, y, yT.data());
        double ny = 0.0, nt = 0.0, np = 0.0;
        for (int d = 0; d < N; ++d) {
            ny += y[d] * y[d];
            nt += yT[d] * yT[d];
            const double p = y[d] - yT[d];
            np += p * p;
        }
        rep.max_pythagoras_err =
            std::max(rep.max_pythagoras_err, std::abs(ny - nt - np));
    }

    // barycentric map: plan-weighted average target per source vertex,
    // expressed in tangential chart components
    const int ns = M.num_vertices();
    std::vector<double> bary(static_cast<size_t>(ns) * M.n, 0.0);
    std::vector<double> sent(ns, 0.0);
    for (const auto& e : plan.support) {
        const double* y = inst.target.p(e.j);
        for (int a = 0; a < M.n; ++a)
            bary[static_cast<size_t>(e.i) * M.n + a] +=
                e.w * dot_n(y, M.frame_vec(e.i, a), N);
        sent[e.i] += e.w;
    }
    for (int i = 0; i < ns; ++i)
        if (sent[i] > 1e-14)
            for (int a = 0; a < M.n; ++a)
                bary[static_cast<size_t>(i) * M.n + a] /= sent[i];

    if (M.flat && M.n == 2 && M.backend == Backend::chart) {
        // discrete curl of the tangential map on the chart grid, away from
        // the collar and from vertices carrying no mass
        const int d1 = M.dims[1];
        const double h0 = M.spacing[0], h1 = M.spacing[1];
        double worst = 0.0;
        bool any = false;
        for (int i = 0; i < ns; ++i) {
            if (M.collar[i]) continue;
            const int r = i / d1, c = i % d1;
            if (r == 0 || c == 0 || r == M.dims[0] - 1 || c == d1 - 1)
                continue;
            const int up = i - d1, dn = i + d1, lf = i - 1, rt = i + 1;
            bool ok = sent[i] > 1e-14;
            for (int v : {up, dn, lf, rt}) ok = ok && sent[v] > 1e-14;
            if (!ok) continue;
            const double d0t1 =
                (bary[static_cast<size_t>(dn) * 2 + 1] -
                 bary[static_cast<size_t>(up) * 2 + 1]) /
                (2.0 * h0);
            const double d1t0 =
                (bary[static_cast<size_t>(rt) * 2] -
                 bary[static_cast<size_t>(lf) * 2]) /
                (2.0 * h1);
            worst = std::max(worst, std::abs(d0t1 - d1t0));
            any = true;
        }
        rep.curl_estimate = worst;
        rep.curl_checked = any;
    }

    if (M.n == 1 && M.backend == Backend::chart) {
        // chart vertices are ordered along the axis
        double viol = 0.0;
        double prev = 0.0;
        bool have_prev = false;
        for (int i = 0; i < ns; ++i) {
            if (sent[i] <= 1e-14) continue;
            const double t = bary[static_cast<size_t>(i)];
            if (have_prev) viol = std::max(viol, prev - t);
            prev = t;
            have_prev = true;
        }
        rep.monotone_violation = viol;
        rep.monotone_checked = have_prev;
    }
    return rep;
}

BalanceReport monge_ampere_balance(const TransportInstance& inst,
                                   const TransportPlan& plan, int bins) {
    if (bins < 1) throw std::invalid_argument("bins must be positive");
    const DiscreteSubmanifold& M = *inst.M;
    const int ns = M.num_vertices();
    const int nt = inst.target.count();
    std::vector<double> row(ns, 0.0), col(nt, 0.0);
    for (const auto& e : plan.support) {
        row[e.i] += e.w;
        col[e.j] += e.w;
    }
    BalanceReport rep;
    for (int i = 0; i < ns; ++i) {
        const double m = inst.source_mass[i];
        if (m > 1e-14)
            rep.max_source_imbalance =
                std::max(rep.max_source_imbalance, std::abs(row[i] - m) / m);
        else
            rep.max_source_imbalance =
                std::max(rep.max_source_imbalance, std::abs(row[i] - m));
    }
    for (int j = 0; j < nt; ++j) {
        const double m = inst.target.mass[j];
        if (m > 1e-14)
            rep.max_target_imbalance =
                std::max(rep.max_target_imbalance, std::abs(col[j] - m) / m);
        else
            rep.max_target_imbalance =
                std::max(rep.max_target_imbalance, std::abs(col[j] - m));
    }

    if (M.flat && M.N > M.n) {
        // plan mass binned by the last normal coordinate of the target,
        // against the target measure's own marginal in that coordinate
        const int d = M.N - 1;
        double lo = kInf, hi = -kInf;
        for (int j = 0; j < nt; ++j) {
            lo = std::min(lo, inst.target.p(j)[d]);
            hi = std::max(hi, inst.target.p(j)[d]);
        }
        const double span = std::max(hi - lo, 1e-12);
        std::vector<double> plan_hist(bins, 0.0), target_hist(bins, 0.0);
        auto bin_of = [&](double z) {
            return std::min(bins - 1,
                            static_cast<int>((z - lo) / span * bins));
        };
        for (const auto& e : plan.support)
            plan_hist[bin_of(inst.target.p(e.j)[d])] += e.w;
        for (int j = 0; j < nt; ++j)
            target_hist[bin_of(inst.target.p(j)[d])] += inst.target.mass[j];
        for (int b = 0; b < bins; ++b)
            rep.max_fiber_mismatch = std::max(
                rep.max_fiber_mismatch,
                std::abs(plan_hist[b] - target_hist[b]));
        rep.fiber_checked = true;
    }
    return rep;
}

double det_trace_scan(int n, int draws, std::uint64_t seed) {
    if (n < 1 || draws < 1) throw std::invalid_argument("bad scan parameters");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> A(static_cast<size_t>(n) * n);
    std::vector<double> S(A.size());
    double worst = kInf;
    for (int d = 0; d < draws; ++d) {
        for (double& a : A) a = gauss(rng);
        double tr = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    s += A[static_cast<size_t>(k) * n + i] *
                         A[static_cast<size_t>(k) * n + j];
                S[static_cast<size_t>(i) * n + j] = s / n;
                if (i == j) tr += s / n;
            }
        // determinant by LU with partial pivoting
        double det = 1.0;
        for (int c = 0; c < n; ++c) {
            int piv = c;
            for (int r = c + 1; r < n; ++r)
                if (std::abs(S[static_cast<size_t>(r) * n + c]) >
                    std::abs(S[static_cast<size_t>(piv) * n + c]))
                    piv = r;
            if (piv != c) {
                for (int k = 0; k < n; ++k)
                    std::swap(S[static_cast<size_t>(c) * n + k],
                              S[static_cast<size_t>(piv) * n + k]);
                det = -det;
            }
            const double p = S[static_cast<size_t>(c) * n + c];
            det *= p;
            if (p == 0.0) break;
            for (int r = c + 1; r < n; ++r) {
                const double f = S[static_cast<size_t>(r) * n + c] / p;
                for (int k = c; k < n; ++k)
                    S[static_cast<size_t>(r) * n + k] -=
                        f * S[static_cast<size_t>(c) * n + k];
            }
        }
        worst = std::min(worst, std::pow(tr / n, n) - det);
    }
    return worst;
}

std::string plan_csv(const TransportPlan& plan) {
    std::ostringstream os;
    os.precision(17);
    os << "i,j,weight\n";
    for (const auto& e : plan.support)
        os << e.i << ',' << e.j << ',' << e.w << '\n';
    return os.str();
}

std::string plan_json_header(const TransportInstance& inst,
                             const TransportPlan& plan) {
    nlohmann::json j;
    j["source_count"] = inst.M ? inst.M->num_vertices() : 0;
    j["source_generator"] = inst.M ? inst.M->generator : "";
    j["target_count"] = inst.target.count();
    j["trim_radius"] = inst.target.trim_radius;
    j["cost_convention"] =
        inst.cost == CostConvention::quadratic ? "quadratic" : "scalar-product";
    j["support_size"] = plan.support.size();
    j["total_cost"] = plan.cost;
    j["duality_gap"] = plan.duality_gap;
    return j.dump(2);
}

}  // namespace lab
