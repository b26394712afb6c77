#include "lab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lab/fields.hpp"
#include "lab/functionals.hpp"
#include "lab/hopf_lax.hpp"
#include "lab/mesh.hpp"
#include "lab/special_functions.hpp"
#include "lab/transport.hpp"

namespace lab {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

struct Check {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
    void note(const std::string& what) {
        if (detail.tellp() > 0) detail << "; ";
        detail << what;
    }
};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

// --- criterion bodies -------------------------------------------------------

void crit_constants(Check& c) {
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
        const double exact = 2.0 / (M_PI * M_E * n);
        worst = std::max(worst,
                         std::abs(sharp_lsi_constant(2.0, n) / exact - 1.0));
        const auto g = general_constants(n, 2.0);
        worst = std::max(worst, std::abs(g.A / exact - 1.0));
        worst = std::max(worst, std::abs(g.B / (0.25 * exact) - 1.0));
    }
    c.require(worst <= 1e-12, "constant mismatch " + fmt(worst));

    const double root = digamma_root();
    c.require(std::abs(root - 0.2161) <= 5e-4, "digamma root " + fmt(root));

    const double lhs = digamma(0.5) + 0.5 * trigamma(0.5);
    const double rhs =
        -kEulerGamma - 2.0 * std::log(2.0) + M_PI * M_PI / 4.0;
    c.require(std::abs(lhs - rhs) <= 1e-10,
              "half-integer digamma identity off by " + fmt(lhs - rhs));
    c.note("constants within " + fmt(worst) + ", root " + fmt(root));
}

void crit_constant_chain(Check& c) {
    for (double p : {2.0, 2.5, 3.0, 4.0})
        for (int n = 2; n <= 6; ++n)
            for (int m = 1; m <= 20; ++m) {
                const auto rep = constant_chain_check(p, n, m);
                c.require(rep.pass, "chain violated at p=" + fmt(p) +
                                        " n=" + fmt(n) + " m=" + fmt(m));
                if (p == 2.0) {
                    const double logL = log_sharp_lsi_constant(2.0, n);
                    const double mid = std::log(2.0 / n) - 1.0 +
                                       (2.0 / n) * log_k_sequence(m, n, 2.0);
                    const double logA = general_constants(n, 2.0).log_A;
                    c.require(std::abs(logL - mid) <= 1e-12 &&
                                  std::abs(mid - logA) <= 1e-12,
                              "p=2 collapse fails at n=" + fmt(n) +
                                  " m=" + fmt(m));
                }
            }
}

void crit_appendix_scans(Check& c) {
    const auto mono1 = monotone_gamma_power_scan();
    c.require(mono1.pass, "gamma power scan: worst " +
                              fmt(mono1.worst_violation));
    const auto mono2 = monotone_gamma_ratio_scan();
    c.require(mono2.pass, "gamma ratio scan: worst " +
                              fmt(mono2.worst_violation));
    const auto par = parallelogram_scan(12345, 1000000);
    c.require(par.pass, "parallelogram scan: worst " +
                            fmt(par.worst_violation));

    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 8);
    double worst_eq = 0.0;
    for (int d = 0; d < 1000; ++d) {
        const int k = dim(rng);
        std::vector<double> v(k), w(k);
        for (double& x : v) x = gauss(rng);
        for (double& x : w) x = gauss(rng);
        worst_eq =
            std::max(worst_eq, std::abs(parallelogram_check(2.0, v, w)));
    }
    c.require(worst_eq <= 1e-12, "q=2 equality slack " + fmt(worst_eq));
}

void crit_equality_anchor(Check& c) {
    double prev = 1e9;
    for (int res : {65, 129, 257}) {
        const auto M = make_flat_chart(2, 1, 6.0, res);
        const auto f = normalize(gaussian_profile(M, 1.0), 2.0);
        const double d = deficit_main(f).deficit;
        c.require(d >= 0.0 && d <= 1e-2,
                  "deficit " + fmt(d) + " at res " + fmt(res));
        c.require(d < prev, "not decreasing at res " + fmt(res));
        c.note("res " + fmt(res) + ": " + fmt(d));
        prev = d;
    }
}

void crit_nonnegativity(Check& c) {
    const auto flat = make_flat_chart(2, 1, 6.0, 65);
    const auto sphere = make_sphere(2, 2.0, 3);
    const auto catenoid = make_catenoid(64, 2.0);
    const auto cylinder = make_cylinder_shrinker(1, 2, 96, 6.0);
    const std::vector<const DiscreteSubmanifold*> gens{&flat, &sphere,
                                                       &catenoid, &cylinder};
    const std::vector<std::string> gen_names{"flat", "sphere", "catenoid",
                                             "cylinder"};
    const double alphas_param[] = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
    double worst = 1e9;
    std::string worst_at = "none";
    auto track = [&](double d, const std::string& where) {
        if (d < worst) {
            worst = d;
            worst_at = where;
        }
    };
    for (size_t g = 0; g < gens.size(); ++g) {
        const auto& M = *gens[g];
        for (const auto& nf : standard_test_fields(M)) {
            const std::string tag = gen_names[g] + "/" + nf.name;
            const auto f2 = normalize(nf.f, 2.0);
            track(deficit_main(f2).deficit, tag + "/main");
            for (double a : alphas_param)
                track(deficit_parametric(f2, a).deficit,
                      tag + "/param(" + fmt(a) + ")");
            for (double a : {0.125, 0.25, 0.5}) {
                const auto phi = normalize(nf.f, 2.0, Measure::gaussian, a);
                track(deficit_gaussian(phi, a).deficit,
                      tag + "/gauss(" + fmt(a) + ")");
            }
            if (M.minimal)
                for (double p : {2.0, 3.0})
                    track(deficit_lp_minimal(normalize(nf.f, p), p).deficit,
                          tag + "/lpmin(" + fmt(p) + ")");
            for (double p : {2.0, 2.5})
                track(deficit_lp_general(normalize(nf.f, p), p).deficit,
                      tag + "/lpgen(" + fmt(p) + ")");
        }
    }
    c.require(worst >= -1e-6, "deficit " + fmt(worst) + " at " + worst_at);
    c.note("worst deficit " + fmt(worst) + " at " + worst_at);
}

void crit_alpha_linkage(Check& c) {
    const auto flat = make_flat_chart(2, 1, 6.0, 65);
    const auto sphere = make_sphere(2, 2.0, 3);
    std::vector<ScalarField> fields;
    for (const auto& nf : standard_test_fields(flat))
        fields.push_back(nf.f);
    auto sph = standard_test_fields(sphere);
    for (size_t k = 0; k < 4; ++k) fields.push_back(sph[k].f);

    const double ratio = std::pow(4.0, 1.0 / 63.0);
    for (const auto& raw : fields) {
        const auto f = normalize(raw, 2.0);
        const auto main = deficit_main(f);
        const double E =
            dirichlet_energy(f, 2.0) + 0.25 * curvature_energy(f, 2.0);
        const double astar = 2.0 * E / f.M->n;
        double best = 1e300;
        for (int k = 0; k < 64; ++k) {
            const double a = 0.5 * astar * std::pow(ratio, k);
            best = std::min(best, deficit_parametric(f, a).deficit);
        }
        const double tol = 0.5 * f.M->n * (ratio - 1.0 - std::log(ratio)) +
                           1e-3 * std::abs(main.deficit) + 1e-9;
        c.require(std::abs(best - main.deficit) <= tol,
                  "grid min " + fmt(best) + " vs main " +
                      fmt(main.deficit));
    }
}

void crit_divergence(Check& c) {
    const auto M = make_flat_chart(2, 1, 6.0, 257);
    const double r = std::abs(divergence_residual(gaussian_profile(M, 1.0)));
    c.require(r <= 1e-3, "divergence residual " + fmt(r));
    c.note("residual " + fmt(r));

    const auto saw = saw_counterexample(2, 1.5, 30);
    double worst_flux = 0.0;
    for (double fl : saw.flux)
        worst_flux = std::max(worst_flux, std::abs(fl - 1.0));
    c.require(worst_flux <= 1e-12, "flux deviates by " + fmt(worst_flux));
    bool found = false;
    for (const auto& m : saw.moments)
        if (m.alpha == 1.0) {
            found = true;
            c.require(!m.converged && m.last_term >= 10.0,
                      "alpha=1 moment not divergent, last term " +
                          fmt(m.last_term));
        }
    c.require(found, "no alpha=1 moment reported");
}

void crit_hopf_lax(Check& c) {
    const auto M = make_flat_chart(2, 1, 6.0, 129);
    const double s = 4.0, t = 1.0;
    ScalarField u;
    u.M = &M;
    u.v.resize(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double r = M.norm_x(v);
        u.v[v] = r * r / (2.0 * s);
    }
    for (auto policy : {DistancePolicy::analytic_flat, DistancePolicy::graph}) {
        const auto table = hopf_lax(M, u, {0.0, t}, policy);
        double worst = 0.0;
        bool dominated = true;
        for (int v = 0; v < M.num_vertices(); ++v) {
            for (const auto& q : table.q)
                dominated = dominated && q.v[v] <= u.v[v];
            if (M.collar[v] || M.norm_x(v) >= 4.0) continue;
            const double exact =
                M.norm_x(v) * M.norm_x(v) / (2.0 * (s + t));
            worst = std::max(worst, std::abs(table.q[1].v[v] - exact));
        }
        c.require(worst <= 2e-2, "closed-form error " + fmt(worst));
        c.require(dominated, "Q_t u > u somewhere");
    }

    double prev = 1e9;
    for (int res : {65, 129}) {
        const auto Mr = make_flat_chart(2, 1, 6.0, res);
        ScalarField ur;
        ur.M = &Mr;
        ur.v.resize(Mr.num_vertices());
        for (int v = 0; v < Mr.num_vertices(); ++v) {
            const double r = Mr.norm_x(v);
            ur.v[v] = r * r / (2.0 * s);
        }
        const auto both = hopf_lax(Mr, ur, {0.0, 0.5, 1.0});
        const auto inner = hopf_lax(Mr, both.q[1], {0.0, 0.5});
        double gap = 0.0;
        for (int v = 0; v < Mr.num_vertices(); ++v)
            if (!Mr.collar[v] && Mr.norm_x(v) < 4.0)
                gap = std::max(gap,
                               std::abs(both.q[2].v[v] - inner.q[1].v[v]));
        c.require(gap <= 5e-2, "semigroup gap " + fmt(gap));
        c.require(gap < prev, "semigroup gap not shrinking");
        prev = gap;
    }
}

void crit_euclidean_hyper(Check& c) {
    const auto M = make_flat_chart(2, 1, 6.0, 65);
    const double a = 1.0, b = 2.0, t = 0.5;
    const double beta = (b - a) / (2.0 * b * t);
    ScalarField eq;
    eq.M = &M;
    eq.v.resize(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double r = M.norm_x(v);
        eq.v[v] = 1.0 - beta * r * r;
    }
    const auto rep = euclidean_hyper_report(M, eq, a, b, t);
    const double ratio = rep.ratio.back();
    c.require(ratio >= 0.95 && ratio <= 1.0 + 1e-3,
              "equality ratio " + fmt(ratio));
    c.note("equality ratio " + fmt(ratio));

    int idx = 0;
    for (double scale : {0.1, 0.25}) {
        ScalarField g;
        g.M = &M;
        g.v.resize(M.num_vertices());
        for (int v = 0; v < M.num_vertices(); ++v) {
            const double r = M.norm_x(v);
            g.v[v] = scale * M.p(v)[0] - 0.3 * scale * r * r;
        }
        const auto grep = euclidean_hyper_report(M, g, a, b, t);
        c.require(grep.ratio.back() <= 1.0 + 1e-3,
                  "generic ratio " + fmt(grep.ratio.back()) + " at field " +
                      fmt(idx));
        ++idx;
    }

    const auto hit = sharpness_probe("euclidean_2pi", 8.0);
    c.require(hit.found, "no witness at trial 8");
    const auto miss = sharpness_probe("euclidean_2pi", 2.0 * M_PI);
    c.require(!miss.found, "false witness at 2 pi");
}

void crit_gaussian_hyper(Check& c) {
    const auto S = make_sphere(2, 2.0, 4);
    ScalarField u;
    u.M = &S;
    u.v.resize(S.num_vertices());
    for (int v = 0; v < S.num_vertices(); ++v) u.v[v] = S.p(v)[2];
    std::vector<double> times;
    for (int i = 0; i < 9; ++i) times.push_back(0.25 * i);
    const auto rep = gaussian_hyper_report(S, u, 1.0, times);
    double worst = 0.0;
    for (size_t i = 1; i < rep.F.size(); ++i)
        worst = std::max(worst, rep.F[i] - rep.F[i - 1]);
    c.require(worst <= 1e-8, "F increases by " + fmt(worst));
    c.note("worst increase " + fmt(worst));

    const auto C = make_cylinder_shrinker(1, 2, 96, 6.0);
    ScalarField bad;
    bad.M = &C;
    bad.v.resize(C.num_vertices());
    for (int v = 0; v < C.num_vertices(); ++v)
        bad.v[v] = std::pow(C.norm_x(v), 2.5);
    bool threw = false;
    try {
        gaussian_hyper_report(C, bad, 1.0, {0.0, 0.5});
    } catch (const std::invalid_argument&) {
        threw = true;
    }
    c.require(threw, "growth check accepted |x|^2.5");
}

void crit_transport(Check& c) {
    const auto M = make_flat_chart(1, 1, 3.0, 201);
    TransportInstance inst;
    inst.M = &M;
    inst.source_mass.resize(M.num_vertices());
    double total = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double x = M.p(v)[0];
        inst.source_mass[v] = M.weight[v] * std::exp(-0.5 * x * x);
        total += inst.source_mass[v];
    }
    for (double& m : inst.source_mass) m /= total;
    const int nt = 200;
    const double ht = 5.6 / (nt - 1);
    inst.target.N = 2;
    total = 0.0;
    for (int j = 0; j < nt; ++j) {
        const double x = -2.8 + j * ht;
        inst.target.points.insert(inst.target.points.end(), {x, 0.0});
        inst.target.mass.push_back(std::exp(-0.35 * x * x));
        total += inst.target.mass.back();
    }
    for (double& m : inst.target.mass) m /= total;

    const auto plan = solve_exact(inst);  // certifies both cost conventions
    c.require(static_cast<int>(plan.support.size()) <=
                  M.num_vertices() + nt - 1,
              "support too large");
    c.require(std::abs(plan.duality_gap) <= 1e-9 * plan.cost,
              "duality gap " + fmt(plan.duality_gap));

    // quantile-coupling oracle
    std::vector<double> t_or(M.num_vertices(), 0.0),
        w_or(M.num_vertices(), 0.0);
    {
        size_t i = 0, j = 0;
        double ra = inst.source_mass[0], rb = inst.target.mass[0];
        while (i < inst.source_mass.size() && j < inst.target.mass.size()) {
            const double w = std::min(ra, rb);
            if (w > 1e-15) {
                t_or[i] += w * inst.target.p(static_cast<int>(j))[0];
                w_or[i] += w;
            }
            ra -= w;
            rb -= w;
            if (ra <= 1e-15 && ++i < inst.source_mass.size())
                ra = inst.source_mass[i];
            if (rb <= 1e-15 && ++j < inst.target.mass.size())
                rb = inst.target.mass[j];
        }
    }
    std::vector<double> t_lp(M.num_vertices(), 0.0),
        w_lp(M.num_vertices(), 0.0);
    for (const auto& e : plan.support) {
        t_lp[e.i] += e.w * inst.target.p(e.j)[0];
        w_lp[e.i] += e.w;
    }
    double worst = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v)
        if (inst.source_mass[v] > 1e-10 && w_or[v] > 1e-14 &&
            w_lp[v] > 1e-14)
            worst = std::max(
                worst, std::abs(t_lp[v] / w_lp[v] - t_or[v] / w_or[v]));
    c.require(worst <= ht, "oracle mismatch " + fmt(worst));
    c.note("oracle mismatch " + fmt(worst));

    const auto scan = cyclical_monotonicity_check(inst, plan, 10000, 4, 17);
    c.require(scan.pass, "cycle sum " + fmt(scan.worst_sum));

    const double slack = det_trace_scan(3, 100000, 42);
    c.require(slack >= -1e-12, "det-trace slack " + fmt(slack));
}

struct Criterion {
    int id;
    std::string name;
    std::function<void(Check&)> body;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> table{
        {1, "closed-form constants", crit_constants},
        {2, "constant chain", crit_constant_chain},
        {3, "appendix scans", crit_appendix_scans},
        {4, "equality-case anchor", crit_equality_anchor},
        {5, "non-negativity battery", crit_nonnegativity},
        {6, "alpha-optimality linkage", crit_alpha_linkage},
        {7, "divergence identity", crit_divergence},
        {8, "inf-convolution semigroup", crit_hopf_lax},
        {9, "volume-measure hypercontractivity", crit_euclidean_hyper},
        {10, "gaussian-measure hypercontractivity", crit_gaussian_hyper},
        {11, "exact transport", crit_transport},
    };
    return table;
}

}  // namespace

CriterionResult run_criterion(int id) {
    if (id < 1 || id > static_cast<int>(criteria().size()))
        throw std::invalid_argument("criterion id out of range");
    const auto& crit = criteria()[id - 1];
    CriterionResult r;
    r.id = crit.id;
    r.name = crit.name;
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        crit.body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    r.pass = c.pass;
    r.detail = c.detail.str();
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    return r;
}

std::vector<CriterionResult> run_acceptance() {
    std::vector<CriterionResult> out;
    for (const auto& crit : criteria()) out.push_back(run_criterion(crit.id));
    return out;
}

std::vector<int> quick_criteria() { return {1, 2, 3, 7}; }

}  // namespace lab
