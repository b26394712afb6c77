#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

// Discrete n-dimensional submanifolds immersed in R^{n+m}: generators,
// tangent/normal splitting, surface gradients, mean curvature, quadrature,
// and geodesic distance. Two backends: parametric charts (analytic frames,
// metric and H) and simplicial meshes (n = 2, cotangent operators).

namespace lab {

enum class Backend { chart, simplicial };
enum class Measure { volume, gaussian };

struct DiscreteSubmanifold {
    int n = 0;  // intrinsic dimension
    int N = 0;  // ambient dimension n + m
    Backend backend = Backend::chart;
    std::string generator;

    std::vector<double> pos;     // V x N
    std::vector<double> weight;  // V, vertex-lumped quadrature
    std::vector<double> frame;   // V x n x N, orthonormal tangent vectors
    std::vector<double> H;       // V x N, mean curvature vector
    std::vector<char> boundary;  // V
    std::vector<char> collar;    // V, within the excluded boundary collar

    // chart backend
    std::vector<int> dims;          // points per axis
    std::vector<char> periodic;     // per axis
    std::vector<double> spacing;    // chart-coordinate step per axis
    std::vector<double> jac;        // V x n x N, d(pos)/d(u_a)
    std::vector<double> ginv;       // V x n x n, inverse metric

    // connectivity
    std::vector<int> tris;  // triangles, 3 indices each (n = 2)
    std::vector<int> segs;  // polyline edges, 2 indices each (n = 1)
    std::vector<std::vector<int>> ring;  // one-ring adjacency

    bool minimal = false;   // analytic H == 0
    bool shrinker = false;  // satisfies H + x_perp/2 = 0 analytically
    bool flat = false;      // intrinsic distance equals ambient distance
    double hmax = 0.0;      // largest edge length
    double truncation = 0.0;
    double sup_H_analytic = 0.0;

    int num_vertices() const { return static_cast<int>(weight.size()); }
    const double* p(int v) const { return &pos[static_cast<size_t>(v) * N]; }
    const double* frame_vec(int v, int a) const {
        return &frame[(static_cast<size_t>(v) * n + a) * N];
    }
    double norm_x(int v) const;
};

struct ScalarField {
    const DiscreteSubmanifold* M = nullptr;
    std::vector<double> v;
};

struct AmbientField {
    const DiscreteSubmanifold* M = nullptr;
    std::vector<double> v;  // V x N
    const double* at(int i) const { return &v[static_cast<size_t>(i) * M->N]; }
};

// Generators -----------------------------------------------------------------

// Truncated n-plane {(x, 0)} in R^{n+m} on a uniform grid; resolution must be
// odd so a center vertex exists. n in {1, 2, 3}.
DiscreteSubmanifold make_flat_chart(int n, int m, double half_width, int resolution);

// Round sphere of the given radius. n = 1: polygon with `resolution`
// vertices; n = 2: icosahedron subdivided `resolution` times (simplicial
// backend, discrete H from the cotangent operator).
DiscreteSubmanifold make_sphere(int n, double radius, int resolution);

// Product shrinker S^k(sqrt(2k)) x R^{n-k}, truncated in the flat direction.
// Only k = 1, n = 2 is generated (the combination the suite uses).
DiscreteSubmanifold make_cylinder_shrinker(int k, int n, int resolution,
                                           double truncation = 6.0);

// Catenoid patch (cosh v cos u, cosh v sin u, v), |v| <= truncation.
DiscreteSubmanifold make_catenoid(int resolution, double truncation);

// Operators ------------------------------------------------------------------

AmbientField surface_gradient(const ScalarField& f);

// Orthogonal splitting of the position field: xT + xPerp = x exactly.
std::pair<AmbientField, AmbientField> split_position(const DiscreteSubmanifold& M);

// Project an ambient vector at vertex v onto the tangent space there.
void project_tangent(const DiscreteSubmanifold& M, int v, const double* vec,
                     double* out);

// Graph shortest-path distance with one two-ring corrective sweep.
// Unreachable vertices get +infinity.
ScalarField geodesic_distance(const DiscreteSubmanifold& M,
                              const std::vector<int>& sources);

// Vertex-lumped integral; gaussian(alpha) multiplies the weight by
// (alpha/pi)^{n/2} e^{-alpha |x|^2}.
double integrate(const DiscreteSubmanifold& M, const ScalarField& f,
                 Measure mu = Measure::volume, double alpha = 0.0);

// Quadrature weight of one vertex under the chosen measure.
double measure_weight(const DiscreteSubmanifold& M, int v,
                      Measure mu = Measure::volume, double alpha = 0.0);

// Cotangent stiffness: off-diagonal entries w_uv per undirected edge, stored
// per-row. The Dirichlet form is sum_edges w_uv (f_u - f_v)(g_u - g_v).
struct Stiffness {
    std::vector<std::vector<std::pair<int, double>>> rows;
};
Stiffness cotan_stiffness(const DiscreteSubmanifold& M);
double stiffness_form(const Stiffness& L, const std::vector<double>& f,
                      const std::vector<double>& g);
// (L f)_v = sum_u w_uv (f_v - f_u)
std::vector<double> stiffness_apply(const Stiffness& L, const std::vector<double>& f);

// Discrete mean curvature from the cotangent (n = 2) or polyline second
// difference (n = 1) operator applied to coordinates.
AmbientField discrete_mean_curvature(const DiscreteSubmanifold& M);

// Chart-backend partial derivative along one axis (midpoint-collocation
// compact scheme; periodic axes use 4th-order central differences).
std::vector<double> chart_partial(const DiscreteSubmanifold& M,
                                  const std::vector<double>& f, int axis);

// SUBMESH v1 text format.
void write_submesh(const DiscreteSubmanifold& M, std::ostream& os);
DiscreteSubmanifold read_submesh(std::istream& is);

}  // namespace lab
