#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lab/mesh.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using namespace lab;

namespace {

double hvec_norm(const DiscreteSubmanifold& M, int v) {
    double s = 0.0;
    for (int c = 0; c < M.N; ++c) {
        const double h = M.H[static_cast<size_t>(v) * M.N + c];
        s += h * h;
    }
    return std::sqrt(s);
}

int center_vertex(const DiscreteSubmanifold& M) {
    int best = 0;
    double bestn = M.norm_x(0);
    for (int v = 1; v < M.num_vertices(); ++v) {
        const double nv = M.norm_x(v);
        if (nv < bestn) {
            bestn = nv;
            best = v;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("flat chart: weights, curvature, normal position") {
    const auto M = make_flat_chart(2, 2, 6.0, 33);
    CHECK(M.num_vertices() == 33 * 33);
    CHECK(M.N == 4);
    double total = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) total += M.weight[v];
    CHECK(std::abs(total - 144.0) < 1e-10);

    const auto [xT, xP] = split_position(M);
    for (int v = 0; v < M.num_vertices(); ++v) {
        CHECK(hvec_norm(M, v) == 0.0);
        for (int c = 0; c < M.N; ++c) {
            CHECK(std::abs(xP.v[static_cast<size_t>(v) * M.N + c]) < 1e-14);
            CHECK(std::abs(xT.v[static_cast<size_t>(v) * M.N + c] - M.p(v)[c]) < 1e-14);
        }
    }
    CHECK(M.flat);
    CHECK(M.minimal);
}

TEST_CASE("flat chart: 1d and 3d weight totals") {
    const auto M1 = make_flat_chart(1, 1, 4.0, 65);
    double t1 = 0.0;
    for (int v = 0; v < M1.num_vertices(); ++v) t1 += M1.weight[v];
    CHECK(std::abs(t1 - 8.0) < 1e-12);

    const auto M3 = make_flat_chart(3, 1, 2.0, 17);
    double t3 = 0.0;
    for (int v = 0; v < M3.num_vertices(); ++v) t3 += M3.weight[v];
    CHECK(std::abs(t3 - 64.0) < 1e-10);
}

TEST_CASE("flat chart: gradient exact on quadratics, gaussian mass") {
    const auto M = make_flat_chart(2, 1, 6.0, 65);
    ScalarField f;
    f.M = &M;
    f.v.resize(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double x = M.p(v)[0], y = M.p(v)[1];
        f.v[v] = 0.5 * x * x - 2.0 * x * y + 3.0 * y + 1.0;
    }
    const auto g = surface_gradient(f);
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double x = M.p(v)[0], y = M.p(v)[1];
        CHECK(std::abs(g.v[static_cast<size_t>(v) * 3] - (x - 2.0 * y)) < 1e-10);
        CHECK(std::abs(g.v[static_cast<size_t>(v) * 3 + 1] - (-2.0 * x + 3.0)) < 1e-10);
        CHECK(std::abs(g.v[static_cast<size_t>(v) * 3 + 2]) < 1e-14);
    }

    // standard gaussian of weight alpha integrates to 1 up to truncation error
    ScalarField one;
    one.M = &M;
    one.v.assign(M.num_vertices(), 1.0);
    const double mass = integrate(M, one, Measure::gaussian, 0.5);
    CHECK(std::abs(mass - 1.0) < 1e-3);
}

TEST_CASE("flat chart: graph geodesic metrication error within known bound") {
    // two-ring corrective sweep leaves a direction-dependent overshoot of at
    // most sec(13.28 deg) - 1 ~ 2.75 percent, independent of resolution
    const auto M = make_flat_chart(2, 1, 6.0, 129);
    const int c = center_vertex(M);
    const auto d = geodesic_distance(M, {c});
    double worst = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) {
        double e = 0.0;
        for (int k = 0; k < 2; ++k) e += M.p(v)[k] * M.p(v)[k];
        e = std::sqrt(e);
        if (e > 0.5) {
            CHECK(d.v[v] >= e - 1e-12);  // graph paths never undershoot
            worst = std::max(worst, (d.v[v] - e) / e);
        }
    }
    CHECK(worst < 0.0276);
}

TEST_CASE("circle: perimeter, curvature, antipodal distance") {
    const auto M = make_sphere(1, 1.0, 10000);
    double total = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) total += M.weight[v];
    CHECK(std::abs(total - 2.0 * M_PI) < 1e-6);

    for (int v = 0; v < M.num_vertices(); v += 997)
        CHECK(std::abs(hvec_norm(M, v) - 1.0) < 1e-5);

    const auto d = geodesic_distance(M, {0});
    CHECK(std::abs(d.v[5000] - M_PI) < 1e-4);
}

TEST_CASE("sphere n=2: discrete curvature converges to n/r") {
    const double radius = 2.0;
    double prev_err = 1e9, prev_shrink = 1e9;
    for (int level : {3, 4, 5}) {
        const auto M = make_sphere(2, radius, level);
        double worst = 0.0, worst_shrink = 0.0;
        for (int v = 0; v < M.num_vertices(); ++v) {
            worst = std::max(worst, std::abs(hvec_norm(M, v) - 1.0));
            double s = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double r = M.H[static_cast<size_t>(v) * 3 + c] + 0.5 * M.p(v)[c];
                s += r * r;
            }
            worst_shrink = std::max(worst_shrink, std::sqrt(s));
        }
        CHECK(worst < prev_err);
        CHECK(worst_shrink < 0.55 * prev_shrink);  // first order in h
        prev_err = worst;
        prev_shrink = worst_shrink;
    }
    // at the finest level tested, both are small
    const auto M = make_sphere(2, radius, 5);
    double worst = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v)
        worst = std::max(worst, std::abs(hvec_norm(M, v) - 1.0));
    CHECK(worst < 5e-3);
    CHECK(M.shrinker);

    double area = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) area += M.weight[v];
    CHECK(std::abs(area - 4.0 * M_PI * radius * radius) / (4.0 * M_PI * radius * radius) < 2e-3);
}

TEST_CASE("sphere n=2: frames orthonormal and tangent, gradient of height") {
    const auto M = make_sphere(2, 2.0, 4);
    for (int v = 0; v < M.num_vertices(); ++v) {
        for (int a = 0; a < 2; ++a) {
            double nn = 0.0, rdot = 0.0;
            for (int c = 0; c < 3; ++c) {
                nn += M.frame_vec(v, a)[c] * M.frame_vec(v, a)[c];
                rdot += M.frame_vec(v, a)[c] * M.p(v)[c];
            }
            CHECK(std::abs(nn - 1.0) < 1e-10);
            CHECK(std::abs(rdot) < 1e-9);
        }
        double cross = 0.0;
        for (int c = 0; c < 3; ++c) cross += M.frame_vec(v, 0)[c] * M.frame_vec(v, 1)[c];
        CHECK(std::abs(cross) < 1e-10);
    }

    // grad of f = <x, e3> on a sphere is e3 minus its radial part
    ScalarField f;
    f.M = &M;
    f.v.resize(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) f.v[v] = M.p(v)[2];
    const auto g = surface_gradient(f);
    double worst = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double r = M.norm_x(v);
        double e = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double expect = (c == 2 ? 1.0 : 0.0) - M.p(v)[2] * M.p(v)[c] / (r * r);
            const double got = g.v[static_cast<size_t>(v) * 3 + c];
            e += (got - expect) * (got - expect);
        }
        worst = std::max(worst, std::sqrt(e));
    }
    CHECK(worst < 0.05);
}

TEST_CASE("cylinder shrinker: analytic H, normal position, shrinker identity") {
    const auto M = make_cylinder_shrinker(1, 2, 64, 4.0);
    CHECK(M.shrinker);
    const auto [xT, xP] = split_position(M);
    const double r = std::sqrt(2.0);
    for (int v = 0; v < M.num_vertices(); ++v) {
        double np = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double x = xP.v[static_cast<size_t>(v) * 3 + c];
            np += x * x;
        }
        CHECK(std::abs(std::sqrt(np) - r) < 1e-12);
        // H + x_perp / 2 = 0 holds exactly with analytic data
        for (int c = 0; c < 3; ++c) {
            const double res = M.H[static_cast<size_t>(v) * 3 + c] +
                               0.5 * xP.v[static_cast<size_t>(v) * 3 + c];
            CHECK(std::abs(res) < 1e-12);
        }
        CHECK(std::abs(hvec_norm(M, v) - 1.0 / r) < 1e-12);
    }
    double area = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) area += M.weight[v];
    CHECK(std::abs(area - 2.0 * M_PI * r * 8.0) < 1e-9);
}

TEST_CASE("cylinder: gradient of angular and axial functions") {
    const auto M = make_cylinder_shrinker(1, 2, 128, 3.0);
    ScalarField f;
    f.M = &M;
    f.v.resize(M.num_vertices());
    // f = x0 restricted to the cylinder; grad = e_theta * d(r cos th)/ds
    for (int v = 0; v < M.num_vertices(); ++v) f.v[v] = M.p(v)[0];
    const auto g = surface_gradient(f);
    double worst = 0.0;
    const double r = std::sqrt(2.0);
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double th = std::atan2(M.p(v)[1], M.p(v)[0]);
        const double expect[3] = {std::sin(th) * std::sin(th),
                                  -std::sin(th) * std::cos(th), 0.0};
        double e = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double got = g.v[static_cast<size_t>(v) * 3 + c];
            e += (got - expect[c]) * (got - expect[c]);
        }
        worst = std::max(worst, std::sqrt(e));
    }
    CHECK(worst < 1e-3);
    (void)r;

    for (int v = 0; v < M.num_vertices(); ++v) f.v[v] = M.p(v)[2] * M.p(v)[2];
    const auto g2 = surface_gradient(f);
    for (int v = 0; v < M.num_vertices(); ++v)
        CHECK(std::abs(g2.v[static_cast<size_t>(v) * 3 + 2] - 2.0 * M.p(v)[2]) < 1e-9);
}

TEST_CASE("catenoid: minimal, area, discrete curvature diagnostic") {
    const double T = 2.0;
    const auto M = make_catenoid(128, T);
    CHECK(M.minimal);
    for (int v = 0; v < M.num_vertices(); ++v) CHECK(hvec_norm(M, v) == 0.0);

    double area = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) area += M.weight[v];
    const double exact = M_PI * (2.0 * T + std::sinh(2.0 * T));
    CHECK(std::abs(area - exact) / exact < 1e-3);

    // cotangent curvature of the triangulated patch vanishes under refinement
    double prev = 1e9;
    for (int res : {32, 64, 128}) {
        const auto Mc = make_catenoid(res, T);
        const auto Hd = discrete_mean_curvature(Mc);
        double worst = 0.0;
        for (int v = 0; v < Mc.num_vertices(); ++v) {
            if (Mc.collar[v]) continue;
            double s = 0.0;
            for (int c = 0; c < 3; ++c)
                s += Hd.v[static_cast<size_t>(v) * 3 + c] * Hd.v[static_cast<size_t>(v) * 3 + c];
            worst = std::max(worst, std::sqrt(s));
        }
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("stiffness form matches gradient quadrature on a flat chart") {
    const auto M = make_flat_chart(2, 1, 3.0, 33);
    const auto L = cotan_stiffness(M);
    ScalarField f;
    f.M = &M;
    f.v.resize(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double x = M.p(v)[0], y = M.p(v)[1];
        f.v[v] = 2.0 * x + 0.5 * y;
    }
    // linear field: Dirichlet form = |grad|^2 * area exactly
    const double form = stiffness_form(L, f.v, f.v);
    CHECK(std::abs(form - 4.25 * 36.0) < 1e-8);
    // operator is symmetric
    std::vector<double> g(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) g[v] = M.p(v)[0] * M.p(v)[1];
    const auto Lf = stiffness_apply(L, f.v);
    const auto Lg = stiffness_apply(L, g);
    double fg = 0.0, gf = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) {
        fg += f.v[v] * Lg[v];
        gf += g[v] * Lf[v];
    }
    CHECK(std::abs(fg - gf) < 1e-8);
}

TEST_CASE("submesh io round trip") {
    const auto M = make_cylinder_shrinker(1, 2, 16, 2.0);
    std::stringstream ss;
    write_submesh(M, ss);
    const auto R = read_submesh(ss);
    CHECK(R.n == M.n);
    CHECK(R.N == M.N);
    CHECK(R.num_vertices() == M.num_vertices());
    CHECK(R.backend == Backend::chart);
    CHECK(R.dims == M.dims);
    for (size_t i = 0; i < M.pos.size(); ++i) CHECK(R.pos[i] == M.pos[i]);
    for (size_t i = 0; i < M.weight.size(); ++i) CHECK(R.weight[i] == M.weight[i]);
    for (size_t i = 0; i < M.H.size(); ++i) CHECK(R.H[i] == M.H[i]);
    for (size_t i = 0; i < M.frame.size(); ++i) CHECK(R.frame[i] == M.frame[i]);

    const auto S = make_sphere(2, 1.0, 2);
    std::stringstream s2;
    write_submesh(S, s2);
    const auto R2 = read_submesh(s2);
    CHECK(R2.backend == Backend::simplicial);
    CHECK(R2.tris == S.tris);

    std::stringstream bad("SUBMESH 3 2 3 10 2 chart");
    CHECK_THROWS(read_submesh(bad));
}

TEST_CASE("generator argument validation") {
    CHECK_THROWS(make_flat_chart(4, 1, 1.0, 9));
    CHECK_THROWS(make_flat_chart(2, 1, 1.0, 10));  // even resolution
    CHECK_THROWS(make_flat_chart(2, 1, -1.0, 9));
    CHECK_THROWS(make_sphere(3, 1.0, 3));
    CHECK_THROWS(make_sphere(1, 1.0, 4));  // too coarse
    CHECK_THROWS(make_cylinder_shrinker(2, 3, 32, 4.0));
    CHECK_THROWS(make_catenoid(4, 2.0));
}
