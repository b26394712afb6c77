#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lab/mesh.hpp"
#include "lab/transport.hpp"

using namespace lab;

namespace {

std::vector<double> gaussian_source_mass(const DiscreteSubmanifold& M,
                                         double alpha) {
    std::vector<double> m(M.num_vertices());
    double total = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) {
        double r2 = 0.0;
        for (int d = 0; d < M.N; ++d) r2 += M.p(v)[d] * M.p(v)[d];
        m[v] = M.weight[v] * std::exp(-alpha * r2);
        total += m[v];
    }
    for (double& x : m) x /= total;
    return m;
}

TargetMeasure line_target(const std::vector<double>& xs,
                          const std::vector<double>& mass, int N) {
    TargetMeasure t;
    t.N = N;
    t.mass = mass;
    double total = 0.0;
    for (double w : mass) total += w;
    for (double& w : t.mass) w /= total;
    for (double x : xs) {
        t.points.push_back(x);
        for (int d = 1; d < N; ++d) t.points.push_back(0.0);
    }
    return t;
}

// quantile coupling of two measures on a line, the 1-D optimal map
std::vector<TransportPlan::Entry> quantile_plan(const std::vector<double>& a,
                                                const std::vector<double>& b) {
    std::vector<TransportPlan::Entry> out;
    size_t i = 0, j = 0;
    double ra = a[0], rb = b[0];
    while (i < a.size() && j < b.size()) {
        const double w = std::min(ra, rb);
        if (w > 1e-15)
            out.push_back({static_cast<int>(i), static_cast<int>(j), w});
        ra -= w;
        rb -= w;
        if (ra <= 1e-15) {
            ++i;
            if (i < a.size()) ra = a[i];
        }
        if (rb <= 1e-15) {
            ++j;
            if (j < b.size()) rb = b[j];
        }
    }
    return out;
}

}  // namespace

TEST_CASE("identity instance gives the identity plan at zero cost") {
    const auto M = make_flat_chart(1, 1, 2.0, 9);
    TransportInstance inst;
    inst.M = &M;
    const int V = M.num_vertices();
    inst.source_mass.assign(V, 1.0 / V);
    std::vector<double> xs, ms(V, 1.0);
    for (int v = 0; v < V; ++v) xs.push_back(M.p(v)[0]);
    inst.target = line_target(xs, ms, 2);

    const auto plan = solve_exact(inst);
    REQUIRE(static_cast<int>(plan.support.size()) == V);
    for (const auto& e : plan.support) {
        CHECK(e.i == e.j);
        CHECK(e.w == doctest::Approx(1.0 / V).epsilon(1e-12));
    }
    CHECK(std::abs(plan.cost) <= 1e-12);
    CHECK(std::abs(plan.duality_gap) <= 1e-12);

    const auto scan = cyclical_monotonicity_check(inst, plan, 500, 4, 7);
    CHECK(scan.pass);
    CHECK(scan.worst_sum >= -1e-9);
}

TEST_CASE("two-point crossing instance picks the monotone matching") {
    const auto M = make_flat_chart(1, 1, 1.0, 3);
    REQUIRE(M.num_vertices() == 3);
    TransportInstance inst;
    inst.M = &M;
    inst.source_mass = {0.5, 0.0, 0.5};
    inst.target = line_target({-0.4, 0.7}, {1.0, 1.0}, 2);

    // enumerate both matchings
    auto cost2 = [&](int j0, int j1) {
        auto sq = [&](int i, int j) {
            double s = 0.0;
            for (int d = 0; d < 2; ++d) {
                const double t = M.p(i)[d] - inst.target.p(j)[d];
                s += t * t;
            }
            return 0.5 * s;
        };
        return 0.5 * sq(0, j0) + 0.5 * sq(2, j1);
    };
    REQUIRE(cost2(0, 1) < cost2(1, 0));

    const auto plan = solve_exact(inst);
    REQUIRE(plan.support.size() == 2);
    CHECK(plan.support[0].i == 0);
    CHECK(plan.support[0].j == 0);
    CHECK(plan.support[1].i == 2);
    CHECK(plan.support[1].j == 1);
    CHECK(plan.cost == doctest::Approx(cost2(0, 1)).epsilon(1e-12));

    // swapping the two pairs must be caught by the cycle scan with a
    // length-2 witness
    TransportPlan bad = plan;
    std::swap(bad.support[0].j, bad.support[1].j);
    const auto scan = cyclical_monotonicity_check(inst, bad, 100, 2, 3);
    CHECK_FALSE(scan.pass);
    CHECK(scan.witness.size() == 2);
}

TEST_CASE("1-D plan matches the quantile coupling within one grid cell") {
    const auto M = make_flat_chart(1, 1, 3.0, 201);
    TransportInstance inst;
    inst.M = &M;
    inst.source_mass = gaussian_source_mass(M, 0.5);
    std::vector<double> xs, ms;
    const int nt = 200;
    const double ht = 5.6 / (nt - 1);
    for (int j = 0; j < nt; ++j) {
        const double x = -2.8 + j * ht;
        xs.push_back(x);
        ms.push_back(std::exp(-0.35 * x * x));
    }
    inst.target = line_target(xs, ms, 2);

    const auto plan = solve_exact(inst);
    CHECK(static_cast<int>(plan.support.size()) <= M.num_vertices() + nt - 1);
    CHECK(std::abs(plan.duality_gap) <= 1e-9 * plan.cost);

    const auto oracle = quantile_plan(inst.source_mass, inst.target.mass);
    auto bary = [&](const std::vector<TransportPlan::Entry>& sup) {
        std::vector<double> t(M.num_vertices(), 0.0), w(M.num_vertices(), 0.0);
        for (const auto& e : sup) {
            t[e.i] += e.w * inst.target.p(e.j)[0];
            w[e.i] += e.w;
        }
        for (int i = 0; i < M.num_vertices(); ++i)
            if (w[i] > 1e-14) t[i] /= w[i];
        return t;
    };
    const auto t_lp = bary(plan.support);
    const auto t_or = bary(oracle);
    double worst = 0.0;
    for (int i = 0; i < M.num_vertices(); ++i)
        if (inst.source_mass[i] > 1e-10)
            worst = std::max(worst, std::abs(t_lp[i] - t_or[i]));
    CHECK(worst <= ht);

    const auto rep = structure_check(inst, plan);
    CHECK(rep.monotone_checked);
    CHECK(rep.monotone_violation <= 1e-12);
    CHECK(rep.max_pythagoras_err <= 1e-10);

    const auto scan = cyclical_monotonicity_check(inst, plan, 10000, 4, 11);
    CHECK(scan.pass);
}

TEST_CASE("flat 2-D chart: splitting, curl, and mass balance") {
    const auto M = make_flat_chart(2, 1, 2.0, 15);
    TransportInstance inst;
    inst.M = &M;
    inst.source_mass = gaussian_source_mass(M, 0.5);
    inst.target = make_gaussian_target(3, 9, 2.5, 0.25);

    const auto plan = solve_exact(inst);
    CHECK(static_cast<int>(plan.support.size()) <=
          M.num_vertices() + inst.target.count() - 1);
    CHECK(std::abs(plan.duality_gap) <= 1e-9 * plan.cost);

    const auto rep = structure_check(inst, plan);
    CHECK(rep.max_pythagoras_err <= 1e-10);

    const auto bal = monge_ampere_balance(inst, plan, 8);
    CHECK(bal.max_source_imbalance <= 1e-9);
    CHECK(bal.max_target_imbalance <= 1e-9);
    CHECK(bal.fiber_checked);
    CHECK(bal.max_fiber_mismatch <= 1e-9);

    // perturbed weights must be flagged
    TransportPlan bad = plan;
    bad.support[0].w *= 1.5;
    const auto bbal = monge_ampere_balance(inst, bad, 8);
    CHECK(std::max(bbal.max_source_imbalance, bbal.max_target_imbalance) >
          1e-3);
}

TEST_CASE("tangential barycentric map is curl-free up to grid roughness") {
    // planar Gaussian target in the chart plane: the optimal map is the
    // gradient of a convex potential, so its discrete curl shrinks as the
    // target grid refines
    const auto M = make_flat_chart(2, 1, 2.0, 15);
    auto planar_target = [](int per_axis, double radius, double alpha) {
        TargetMeasure t;
        t.N = 3;
        t.trim_radius = radius;
        const double h = 2.0 * radius / (per_axis - 1);
        double total = 0.0;
        for (int a = 0; a < per_axis; ++a)
            for (int b = 0; b < per_axis; ++b) {
                const double x = -radius + a * h, y = -radius + b * h;
                if (x * x + y * y > radius * radius) continue;
                t.points.insert(t.points.end(), {x, y, 0.0});
                t.mass.push_back(std::exp(-alpha * (x * x + y * y)));
                total += t.mass.back();
            }
        for (double& w : t.mass) w /= total;
        return t;
    };

    double prev = 1e9;
    for (int per_axis : {17, 33}) {
        TransportInstance inst;
        inst.M = &M;
        inst.source_mass = gaussian_source_mass(M, 0.5);
        inst.target = planar_target(per_axis, 2.5, 0.5);
        const auto plan = solve_exact(inst);
        const auto rep = structure_check(inst, plan);
        REQUIRE(rep.curl_checked);
        MESSAGE("per_axis " << per_axis << " curl " << rep.curl_estimate);
        CHECK(rep.curl_estimate < prev);
        prev = rep.curl_estimate;
    }
    CHECK(prev < 0.6);
}

TEST_CASE("sphere source: orthogonal splitting and monotone cycles") {
    const auto M = make_sphere(2, 1.0, 2);
    TransportInstance inst;
    inst.M = &M;
    std::vector<double> m(M.weight.begin(), M.weight.end());
    double total = 0.0;
    for (double w : m) total += w;
    for (double& w : m) w /= total;
    inst.source_mass = m;
    inst.target = make_gaussian_target(3, 5, 1.6, 0.5);

    const auto plan = solve_exact(inst);
    CHECK(std::abs(plan.duality_gap) <= 1e-9 * std::max(plan.cost, 1.0));
    const auto rep = structure_check(inst, plan);
    CHECK(rep.max_pythagoras_err <= 1e-10);
    const auto scan = cyclical_monotonicity_check(inst, plan, 2000, 4, 3);
    CHECK(scan.pass);
}

TEST_CASE("scaling the instance scales cost by lambda squared") {
    const auto M1 = make_flat_chart(1, 1, 1.5, 41);
    const auto M2 = make_flat_chart(1, 1, 3.0, 41);
    std::vector<double> xs1, xs2, ms;
    const int nt = 30;
    for (int j = 0; j < nt; ++j) {
        const double x = -1.2 + j * 2.4 / (nt - 1);
        xs1.push_back(x);
        xs2.push_back(2.0 * x);
        ms.push_back(std::exp(-x * x));
    }
    TransportInstance a, b;
    a.M = &M1;
    b.M = &M2;
    a.source_mass = gaussian_source_mass(M1, 0.5);
    b.source_mass = a.source_mass;
    a.target = line_target(xs1, ms, 2);
    b.target = line_target(xs2, ms, 2);

    const auto pa = solve_exact(a);
    const auto pb = solve_exact(b);
    REQUIRE(pa.support.size() == pb.support.size());
    for (size_t k = 0; k < pa.support.size(); ++k) {
        CHECK(pa.support[k].i == pb.support[k].i);
        CHECK(pa.support[k].j == pb.support[k].j);
        CHECK(pa.support[k].w ==
              doctest::Approx(pb.support[k].w).epsilon(1e-10));
    }
    CHECK(pb.cost == doctest::Approx(4.0 * pa.cost).epsilon(1e-9));
}

TEST_CASE("determinant-trace inequality on random PSD matrices") {
    for (int n : {2, 3, 5}) {
        const double worst = det_trace_scan(n, 100000, 42);
        CHECK(worst >= -1e-12);
    }
    CHECK(det_trace_scan(3, 1000, 9) == det_trace_scan(3, 1000, 9));
}

TEST_CASE("argument validation") {
    const auto M = make_flat_chart(1, 1, 1.0, 5);
    TransportInstance inst;
    inst.M = &M;
    inst.source_mass.assign(5, 0.2);
    inst.target = line_target({-1.0, 0.0, 1.0}, {1.0, 1.0, 1.0}, 2);

    auto bad = inst;
    bad.source_mass[0] = -0.1;
    CHECK_THROWS_AS(solve_exact(bad), std::invalid_argument);
    bad = inst;
    bad.source_mass[0] = 0.5;
    CHECK_THROWS_AS(solve_exact(bad), std::invalid_argument);
    bad = inst;
    bad.target.mass[0] = 2.0;
    CHECK_THROWS_AS(solve_exact(bad), std::invalid_argument);

    const auto big = make_flat_chart(2, 1, 2.0, 65);
    TransportInstance huge;
    huge.M = &big;
    huge.source_mass.assign(big.num_vertices(),
                            1.0 / big.num_vertices());
    huge.target.N = big.N;
    huge.target.mass.assign(1000, 1e-3);
    huge.target.points.assign(3000, 0.0);
    CHECK_THROWS_AS(solve_exact(huge), std::length_error);

    CHECK_THROWS_AS(make_gaussian_target(0, 5, 1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(det_trace_scan(0, 10, 1), std::invalid_argument);
}

TEST_CASE("serialization") {
    const auto M = make_flat_chart(1, 1, 1.0, 5);
    TransportInstance inst;
    inst.M = &M;
    inst.source_mass.assign(5, 0.2);
    std::vector<double> xs, ms(5, 1.0);
    for (int v = 0; v < 5; ++v) xs.push_back(M.p(v)[0]);
    inst.target = line_target(xs, ms, 2);
    const auto plan = solve_exact(inst);

    const auto csv = plan_csv(plan);
    CHECK(csv.rfind("i,j,weight\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          static_cast<long>(plan.support.size()) + 1);

    const auto j = nlohmann::json::parse(plan_json_header(inst, plan));
    CHECK(j["source_count"] == 5);
    CHECK(j["target_count"] == 5);
    CHECK(j["cost_convention"] == "quadratic");
    CHECK(j["support_size"] == plan.support.size());
    CHECK(std::abs(j["duality_gap"].get<double>()) <= 1e-12);
}
