#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lab/fields.hpp"
#include "lab/hopf_lax.hpp"
#include "lab/mesh.hpp"

#include <cmath>
#include <vector>

using namespace lab;

namespace {

ScalarField quadratic_u(const DiscreteSubmanifold& M, double s) {
    ScalarField u;
    u.M = &M;
    u.v.resize(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double r = M.norm_x(v);
        u.v[v] = r * r / (2.0 * s);
    }
    return u;
}

}  // namespace

TEST_CASE("quadratic profile has the closed-form inf-convolution") {
    const auto M = make_flat_chart(2, 1, 6.0, 129);
    const double s = 8.0, t = 0.25;
    const auto u = quadratic_u(M, s);
    for (auto policy : {DistancePolicy::analytic_flat, DistancePolicy::graph}) {
        const auto table = hopf_lax(M, u, {0.0, t}, policy);
        CHECK_FALSE(table.ill_posed);
        double worst = 0.0;
        for (int v = 0; v < M.num_vertices(); ++v) {
            const double r = M.norm_x(v);
            const double exact = r * r / (2.0 * (s + t));
            worst = std::max(worst, std::abs(table.q[1].v[v] - exact));
        }
        // grid-min error budget (1/2)(1/s + 1/t)(h/2)^2 per axis ~ 0.009;
        // the graph policy adds the metrication overshoot on top
        if (policy == DistancePolicy::analytic_flat)
            CHECK(worst < 1e-2);
        else
            CHECK(worst < 2e-2);
    }
}

TEST_CASE("constant and cone profiles") {
    const auto M = make_flat_chart(2, 1, 6.0, 65);
    ScalarField c;
    c.M = &M;
    c.v.assign(M.num_vertices(), 1.7);
    const auto table = hopf_lax(M, c, {0.0, 0.5, 1.0});
    for (const auto& q : table.q)
        for (double x : q.v) CHECK(x == 1.7);

    ScalarField cone;
    cone.M = &M;
    cone.v.resize(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) cone.v[v] = -M.norm_x(v);
    const double t = 0.5;
    const auto tc = hopf_lax(M, cone, {0.0, t});
    // Q_t(-|y|) = -|x| - t/2 away from the truncation boundary
    double worst = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) {
        if (M.norm_x(v) > 4.0) continue;
        worst = std::max(worst,
                         std::abs(tc.q[1].v[v] - (-M.norm_x(v) - 0.5 * t)));
    }
    CHECK(worst < 2e-2);
}

TEST_CASE("pointwise domination, time monotonicity, monotone in u") {
    const auto M = make_flat_chart(2, 1, 6.0, 65);
    const auto u = quadratic_u(M, 4.0);
    const auto table = hopf_lax(M, u, {0.0, 0.25, 0.5, 1.0});
    for (int v = 0; v < M.num_vertices(); ++v) {
        CHECK(table.q[0].v[v] == u.v[v]);
        for (size_t i = 1; i < table.times.size(); ++i) {
            CHECK(table.q[i].v[v] <= u.v[v]);
            CHECK(table.q[i].v[v] <= table.q[i - 1].v[v] + 1e-15);
        }
    }

    ScalarField w = u;
    for (double& x : w.v) x += 0.3;  // u <= w pointwise
    const auto tw = hopf_lax(M, w, {0.0, 0.5});
    const auto tu = hopf_lax(M, u, {0.0, 0.5});
    for (int v = 0; v < M.num_vertices(); ++v)
        CHECK(tu.q[1].v[v] <= tw.q[1].v[v] + 1e-15);
}

TEST_CASE("discrete semigroup sub-property and translation covariance") {
    const auto M = make_flat_chart(2, 1, 6.0, 65);
    const auto u = quadratic_u(M, 4.0);
    const double s = 0.25, t = 0.75;
    const auto qt = hopf_lax(M, u, {0.0, t});
    const auto qs = hopf_lax(M, u, {0.0, s});
    const auto qcomp = hopf_lax(M, qs.q[1], {0.0, t - s});
    for (int v = 0; v < M.num_vertices(); ++v)
        CHECK(qt.q[1].v[v] <= qcomp.q[1].v[v] + 1e-12);

    // translate u by one grid cell along axis 0: Q commutes with the shift
    // wherever both stencils stay inside the patch
    const int res = 65;
    const auto g0 = hopf_lax(M, u, {0.0, 0.5});
    ScalarField shifted;
    shifted.M = &M;
    shifted.v.resize(M.num_vertices());
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j)
            shifted.v[i * res + j] = u.v[std::max(i - 1, 0) * res + j];
    const auto g1 = hopf_lax(M, shifted, {0.0, 0.5});
    for (int i = 20; i < 45; ++i)
        for (int j = 20; j < 45; ++j)
            CHECK(g1.q[1].v[i * res + j] ==
                  doctest::Approx(g0.q[1].v[(i - 1) * res + j]).epsilon(1e-12));
}

TEST_CASE("time grid validation and ill-posedness flag") {
    const auto M = make_flat_chart(2, 1, 6.0, 33);
    const auto u = quadratic_u(M, 4.0);
    CHECK_THROWS(hopf_lax(M, u, {0.5, 1.0}));       // missing t = 0
    CHECK_THROWS(hopf_lax(M, u, {0.0, 1.0, 0.5}));  // not increasing
    CHECK_THROWS(hopf_lax(M, u, {0.0, -1.0}));

    CHECK(quadratic_well_posed(0.4, 1.0));
    CHECK_FALSE(quadratic_well_posed(0.5, 1.0));

    // concave quadratic past the margin: minimizers escape to the boundary
    const double t = 1.0, beta = 0.7 / (2.0 * t);
    ScalarField bad;
    bad.M = &M;
    bad.v.resize(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double r = M.norm_x(v);
        bad.v[v] = -beta * r * r;
    }
    const auto tb = hopf_lax(M, bad, {0.0, 4.0});
    CHECK(tb.ill_posed);
    const auto tg = hopf_lax(M, quadratic_u(M, 4.0), {0.0, 4.0});
    CHECK_FALSE(tg.ill_posed);
}

TEST_CASE("hamilton-jacobi residual") {
    // smooth convex case: equality in HJ.  The residual mixes a grid
    // minimum error of size h^2 / dt with a first order error from the
    // forward time quotient; the latter scales with the cube of the
    // curvature of u, so a gentle quadratic isolates the h^2 part and the
    // residual shrinks under grid refinement at a fixed time step.
    const double dt = 0.25;
    double prev = 1e9;
    for (int res : {129, 257}) {
        const auto M = make_flat_chart(2, 1, 6.0, res);
        const auto u = quadratic_u(M, 8.0);
        std::vector<double> times;
        for (int i = 0; i <= 4; ++i) times.push_back(dt * i);
        const auto table = hopf_lax(M, u, times);
        const auto rs = hamilton_jacobi_residual(table);
        double worst = 0.0;
        for (const auto& r : rs)
            for (int v = 0; v < M.num_vertices(); ++v)
                if (!M.collar[v] && M.norm_x(v) < 4.0)
                    worst = std::max(worst, std::abs(r.v[v]));
        CHECK(worst < 0.5 * prev);
        prev = worst;
    }
    CHECK(prev < 0.02);

    const auto M = make_flat_chart(2, 1, 6.0, 65);
    ScalarField c;
    c.M = &M;
    c.v.assign(M.num_vertices(), 2.0);
    const auto rs = hamilton_jacobi_residual(hopf_lax(M, c, {0.0, 0.5, 1.0}));
    for (const auto& r : rs)
        for (double x : r.v) CHECK(x == 0.0);

    // one-sided bound at t = 0: (Q_t u - u)/t >= -|grad u|^2/2 - tol
    const auto u = quadratic_u(M, 4.0);
    const auto table = hopf_lax(M, u, {0.0, 0.05, 0.1});
    const auto r0 = hamilton_jacobi_residual(table)[0];
    for (int v = 0; v < M.num_vertices(); ++v)
        if (!M.collar[v]) CHECK(r0.v[v] >= -0.05);
}

TEST_CASE("euclidean hypercontractivity: equality case and generic fields") {
    const double a = 1.0, b = 2.0, t = 0.5;
    const double beta = (b - a) / (2.0 * b * t);
    REQUIRE(quadratic_well_posed(beta, t));
    double prev = 1e9;
    for (int res : {65, 129}) {
        const auto M = make_flat_chart(2, 1, 6.0, res);
        ScalarField u;
        u.M = &M;
        u.v.resize(M.num_vertices());
        for (int v = 0; v < M.num_vertices(); ++v) {
            const double r = M.norm_x(v);
            u.v[v] = 1.0 - beta * r * r;
        }
        const auto rep = euclidean_hyper_report(M, u, a, b, t);
        CHECK_FALSE(rep.ill_posed);
        CHECK(std::abs(rep.ratio[0] - 1.0) < prev);
        CHECK(rep.equality_profile_distance < 1e-10);
        prev = std::abs(rep.ratio[0] - 1.0);
    }
    CHECK(prev < 1e-3);

    // strictly interior profile: ratio below 1
    const auto M = make_flat_chart(2, 1, 6.0, 65);
    ScalarField u;
    u.M = &M;
    u.v.resize(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double r = M.norm_x(v);
        u.v[v] = -0.5 * beta * r * r;
    }
    const auto rep = euclidean_hyper_report(M, u, a, b, t);
    CHECK(rep.ratio[0] < 1.0);
    CHECK(rep.equality_profile_distance > 1e-3);

    // minimal catenoid patch with a bounded source function
    const auto C = make_catenoid(48, 2.0);
    ScalarField uc;
    uc.M = &C;
    uc.v.resize(C.num_vertices());
    for (int v = 0; v < C.num_vertices(); ++v) uc.v[v] = std::sin(C.p(v)[2]);
    const auto repc = euclidean_hyper_report(C, uc, a, b, t);
    CHECK(repc.ratio[0] <= 1.0 + 1e-2);
}

TEST_CASE("gaussian hypercontractivity on shrinkers") {
    std::vector<double> times;
    for (int i = 0; i <= 8; ++i) times.push_back(0.25 * i);

    const auto S = make_sphere(2, 2.0, 4);
    ScalarField u;
    u.M = &S;
    u.v.resize(S.num_vertices());
    for (int v = 0; v < S.num_vertices(); ++v) u.v[v] = S.p(v)[2];
    const auto rep = gaussian_hyper_report(S, u, 1.0, times);
    for (char m : rep.monotone) CHECK(m);
    CHECK(rep.F[0] == rep.bound[0]);
    for (size_t i = 0; i < rep.q.size(); ++i)
        CHECK(rep.q[i] == doctest::Approx(1.0 + 0.125 * i));

    ScalarField c;
    c.M = &S;
    c.v.assign(S.num_vertices(), 0.8);
    const auto repc = gaussian_hyper_report(S, c, 1.0, times);
    for (char m : repc.monotone) CHECK(m);

    // growth check: |x|^{2.5} rejected on the truncated cylinder
    const auto Cy = make_cylinder_shrinker(1, 2, 48, 6.0);
    ScalarField fast;
    fast.M = &Cy;
    fast.v.resize(Cy.num_vertices());
    for (int v = 0; v < Cy.num_vertices(); ++v)
        fast.v[v] = std::pow(Cy.norm_x(v), 2.5);
    CHECK_THROWS_AS(gaussian_hyper_report(Cy, fast, 1.0, times),
                    std::invalid_argument);

    // theta = 2 boundary family inside the (a + t/2) C2 < 1/4 window
    ScalarField quad;
    quad.M = &Cy;
    quad.v.resize(Cy.num_vertices());
    for (int v = 0; v < Cy.num_vertices(); ++v) {
        const double r = Cy.norm_x(v);
        quad.v[v] = -0.1 * r * r;
    }
    const auto repq = gaussian_hyper_report(Cy, quad, 1.0, {0.0, 0.5, 1.0});
    for (size_t i = 0; i < repq.F.size(); ++i) {
        CHECK(std::isfinite(repq.F[i]));
        CHECK(repq.monotone[i]);
    }

    // non-shrinker geometry is refused
    const auto S1 = make_sphere(2, 1.0, 3);
    ScalarField us;
    us.M = &S1;
    us.v.assign(S1.num_vertices(), 0.1);
    CHECK_THROWS_AS(gaussian_hyper_report(S1, us, 1.0, times),
                    std::invalid_argument);
}

TEST_CASE("sharpness probes") {
    const auto hit = sharpness_probe("euclidean_2pi", 8.0);
    CHECK(hit.found);
    CHECK(hit.ratio > 1.05);

    const auto miss = sharpness_probe("euclidean_2pi", 2.0 * M_PI);
    CHECK_FALSE(miss.found);
    CHECK(miss.ratio < 1.05);

    const auto ghit = sharpness_probe("gaussian_factor2", 1.0);
    CHECK(ghit.found);
    const auto gmiss = sharpness_probe("gaussian_factor2", 2.0);
    CHECK_FALSE(gmiss.found);

    CHECK_THROWS(sharpness_probe("unknown", 1.0));
}

TEST_CASE("report serialization shape") {
    const auto M = make_flat_chart(2, 1, 6.0, 33);
    ScalarField u;
    u.M = &M;
    u.v.resize(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) u.v[v] = -0.1 * M.norm_x(v);
    const auto rep = euclidean_hyper_report(M, u, 1.0, 2.0, 0.5);
    const auto csv = rep.csv();
    CHECK(csv.rfind("t,q_t,F,bound,ratio,monotone_flag\n", 0) == 0);
    const auto js = rep.json_summary();
    CHECK(js.find("\"worst_ratio\"") != std::string::npos);
    CHECK(js.find("\"equality_profile_distance\"") != std::string::npos);
}
