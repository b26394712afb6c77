#include "lab/functionals.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lab/special_functions.hpp"

namespace lab {

namespace {

constexpr double kClip = 1e-300;

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

void require_usage(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

int report_resolution(const DiscreteSubmanifold& M) {
    return M.backend == Backend::chart && !M.dims.empty() ? M.dims[0]
                                                          : M.num_vertices();
}

DeficitReport base_report(const DiscreteSubmanifold& M, std::string name) {
    DeficitReport r;
    r.name = std::move(name);
    r.truncation = M.truncation;
    r.resolution = report_resolution(M);
    return r;
}

double grad_norm(const AmbientField& g, int v) {
    double s = 0.0;
    for (int c = 0; c < g.M->N; ++c) s += g.at(v)[c] * g.at(v)[c];
    return std::sqrt(s);
}

double h_norm(const DiscreteSubmanifold& M, int v) {
    double s = 0.0;
    for (int c = 0; c < M.N; ++c) {
        const double h = M.H[static_cast<size_t>(v) * M.N + c];
        s += h * h;
    }
    return std::sqrt(s);
}

double plogp(double m) {
    return m > 0.0 ? m * std::log(std::max(m, kClip)) : 0.0;
}

// int (|grad f|^2 + |H|^2 f^2 / 4) dvol, the energy on the right side of
// the volume-measure inequalities
double quadratic_energy(const ScalarField& f) {
    return dirichlet_energy(f, 2.0) + 0.25 * curvature_energy(f, 2.0);
}

// sqrt(det g) from the chart Jacobian, n <= 3
double sqrt_det_g(const DiscreteSubmanifold& M, int v) {
    double g[3][3] = {};
    for (int a = 0; a < M.n; ++a)
        for (int b = 0; b < M.n; ++b)
            for (int c = 0; c < M.N; ++c)
                g[a][b] += M.jac[(static_cast<size_t>(v) * M.n + a) * M.N + c] *
                           M.jac[(static_cast<size_t>(v) * M.n + b) * M.N + c];
    double det = 0.0;
    if (M.n == 1) {
        det = g[0][0];
    } else if (M.n == 2) {
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    } else {
        det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
              g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
              g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    }
    return std::sqrt(det);
}

std::vector<double> laplacian(const DiscreteSubmanifold& M,
                              const std::vector<double>& u) {
    const int V = M.num_vertices();
    std::vector<double> out(V, 0.0);
    if (M.backend == Backend::chart) {
        // divergence form: (1/sqrt g) d_a (sqrt g g^{ab} d_b u)
        std::vector<std::vector<double>> partial(M.n);
        for (int a = 0; a < M.n; ++a) partial[a] = chart_partial(M, u, a);
        std::vector<double> sg(V);
        for (int v = 0; v < V; ++v) sg[v] = sqrt_det_g(M, v);
        for (int a = 0; a < M.n; ++a) {
            std::vector<double> flux(V);
            for (int v = 0; v < V; ++v) {
                double s = 0.0;
                for (int b = 0; b < M.n; ++b)
                    s += M.ginv[static_cast<size_t>(v) * M.n * M.n + a * M.n + b] *
                         partial[b][v];
                flux[v] = sg[v] * s;
            }
            const auto dflux = chart_partial(M, flux, a);
            for (int v = 0; v < V; ++v) out[v] += dflux[v] / sg[v];
        }
        return out;
    }
    const Stiffness L = cotan_stiffness(M);
    const auto Lu = stiffness_apply(L, u);
    for (int v = 0; v < V; ++v) out[v] = -Lu[v] / M.weight[v];
    return out;
}

}  // namespace

std::string DeficitReport::csv_header() {
    return "name,p,alpha,trunc,resolution,left,right,deficit,norm_residual,notes";
}

std::string DeficitReport::csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << name << ',' << p << ',' << alpha << ',' << truncation << ','
       << resolution << ',' << left << ',' << right << ',' << deficit << ','
       << norm_residual << ',' << notes;
    return os.str();
}

ScalarField normalize(const ScalarField& f, double p, Measure mu, double alpha) {
    require(f.M != nullptr, "normalize: field not attached");
    require(p >= 1.0, "normalize: p must be >= 1");
    const DiscreteSubmanifold& M = *f.M;
    double mass = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v)
        mass += std::pow(std::abs(f.v[v]), p) * measure_weight(M, v, mu, alpha);
    require(mass > 0.0, "normalize: field has zero p-mass");
    ScalarField out = f;
    const double scale = std::pow(mass, -1.0 / p);
    for (double& x : out.v) x *= scale;
    return out;
}

double lp_mass_residual(const ScalarField& f, double p, Measure mu, double alpha) {
    const DiscreteSubmanifold& M = *f.M;
    double mass = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v)
        mass += std::pow(std::abs(f.v[v]), p) * measure_weight(M, v, mu, alpha);
    return std::abs(mass - 1.0);
}

double entropy(const ScalarField& f, double p, Measure mu, double alpha) {
    require(f.M != nullptr, "entropy: field not attached");
    require_usage(lp_mass_residual(f, p, mu, alpha) <= 1e-6,
                  "entropy: field is not normalized in L^p");
    const DiscreteSubmanifold& M = *f.M;
    double s = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v)
        s += plogp(std::pow(std::abs(f.v[v]), p)) * measure_weight(M, v, mu, alpha);
    return s;
}

double dirichlet_energy(const ScalarField& f, double p) {
    require(f.M != nullptr, "dirichlet_energy: field not attached");
    const auto g = surface_gradient(f);
    double s = 0.0;
    for (int v = 0; v < f.M->num_vertices(); ++v)
        s += std::pow(grad_norm(g, v), p) * f.M->weight[v];
    return s;
}

double curvature_energy(const ScalarField& f, double p) {
    require(f.M != nullptr, "curvature_energy: field not attached");
    double s = 0.0;
    for (int v = 0; v < f.M->num_vertices(); ++v)
        s += std::pow(h_norm(*f.M, v), p) * std::pow(std::abs(f.v[v]), p) *
             f.M->weight[v];
    return s;
}

DeficitReport deficit_main(const ScalarField& f) {
    const DiscreteSubmanifold& M = *f.M;
    DeficitReport r = base_report(M, "main");
    r.p = 2.0;
    r.norm_residual = lp_mass_residual(f, 2.0);
    r.left = entropy(f, 2.0);
    const double E = quadratic_energy(f);
    const double arg = 2.0 / (M_PI * M_E * M.n) * E;
    if (arg <= 0.0) {
        r.notes = "degenerate: energy vanished at this truncation";
        r.right = -std::numeric_limits<double>::infinity();
    } else {
        r.right = 0.5 * M.n * std::log(arg);
    }
    r.deficit = r.right - r.left;
    return r;
}

DeficitReport deficit_parametric(const ScalarField& f, double alpha) {
    require(alpha > 0.0, "deficit_parametric: alpha must be positive");
    const DiscreteSubmanifold& M = *f.M;
    DeficitReport r = base_report(M, "parametric");
    r.p = 2.0;
    r.alpha = alpha;
    r.norm_residual = lp_mass_residual(f, 2.0);
    r.left = entropy(f, 2.0);
    const double E = quadratic_energy(f);
    r.right = -M.n + 0.5 * M.n * std::log(alpha / M_PI) + E / alpha;
    r.deficit = r.right - r.left;
    return r;
}

DeficitReport deficit_gaussian(const ScalarField& phi, double alpha) {
    require(alpha > 0.0, "deficit_gaussian: alpha must be positive");
    const DiscreteSubmanifold& M = *phi.M;
    DeficitReport r = base_report(M, "gaussian");
    r.p = 2.0;
    r.alpha = alpha;
    r.norm_residual = lp_mass_residual(phi, 2.0, Measure::gaussian, alpha);
    r.left = entropy(phi, 2.0, Measure::gaussian, alpha);

    const auto g = surface_gradient(phi);
    const auto [xT, xP] = split_position(M);
    double grad_term = 0.0, curv_term = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double w = measure_weight(M, v, Measure::gaussian, alpha);
        const double gn = grad_norm(g, v);
        grad_term += gn * gn * w;
        double hp = 0.0;
        for (int c = 0; c < M.N; ++c) {
            const double z = M.H[static_cast<size_t>(v) * M.N + c] +
                             2.0 * alpha * xP.v[static_cast<size_t>(v) * M.N + c];
            hp += z * z;
        }
        curv_term += phi.v[v] * phi.v[v] * hp * w;
    }
    r.right = grad_term / alpha + curv_term / (4.0 * alpha);
    r.deficit = r.right - r.left;
    return r;
}

DeficitReport deficit_lp_minimal(const ScalarField& f, double p) {
    require(p >= 2.0, "deficit_lp_minimal: p must be >= 2");
    const DiscreteSubmanifold& M = *f.M;
    require_usage(M.minimal,
                  "deficit_lp_minimal: submanifold is not minimal; use "
                  "deficit_lp_general");
    DeficitReport r = base_report(M, "lp_minimal");
    r.p = p;
    r.norm_residual = lp_mass_residual(f, p);
    r.left = entropy(f, p);
    const double E = dirichlet_energy(f, p);
    const double arg =
        std::pow(p * p / (2.0 * M_PI * M_E * M.n), 0.5 * p) * E;
    if (arg <= 0.0) {
        r.notes = "degenerate: energy vanished at this truncation";
        r.right = -std::numeric_limits<double>::infinity();
    } else {
        r.right = M.n / p * std::log(arg);
    }
    r.deficit = r.right - r.left;
    return r;
}

DeficitReport deficit_lp_general(const ScalarField& f, double p) {
    require(p >= 2.0, "deficit_lp_general: p must be >= 2");
    const DiscreteSubmanifold& M = *f.M;
    const int n = M.n, m = M.N - M.n;
    DeficitReport r = base_report(M, "lp_general");
    r.p = p;
    r.norm_residual = lp_mass_residual(f, p);
    r.left = entropy(f, p);
    const GeneralConstants gc = general_constants(n, p);
    const double base = (2.0 * p - 3.0) / (p - 1.0);
    const double c1 = std::pow(base, static_cast<double>(m) / n * (p - 1.0));
    const double c2 = std::pow(base, static_cast<double>(m + n) / n * (p - 1.0));
    const double arg = c1 * gc.A * dirichlet_energy(f, p) +
                       c2 * gc.B * curvature_energy(f, p);
    if (arg <= 0.0) {
        r.notes = "degenerate: energy vanished at this truncation";
        r.right = -std::numeric_limits<double>::infinity();
    } else {
        r.right = static_cast<double>(n) / p * std::log(arg);
    }
    r.deficit = r.right - r.left;
    return r;
}

double divergence_residual(const ScalarField& f) {
    require(f.M != nullptr, "divergence_residual: field not attached");
    const DiscreteSubmanifold& M = *f.M;
    const auto g = surface_gradient(f);
    const auto [xT, xP] = split_position(M);
    double s = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) {
        double gxt = 0.0, hxp = 0.0;
        for (int c = 0; c < M.N; ++c) {
            gxt += g.at(v)[c] * xT.v[static_cast<size_t>(v) * M.N + c];
            hxp += M.H[static_cast<size_t>(v) * M.N + c] *
                   xP.v[static_cast<size_t>(v) * M.N + c];
        }
        s += (2.0 * f.v[v] * gxt + f.v[v] * f.v[v] * (M.n + hxp)) * M.weight[v];
    }
    return s;
}

SawReport saw_counterexample(int n, double beta, int k_max) {
    require(n >= 1, "saw_counterexample: n must be >= 1");
    require(beta > 1.0, "saw_counterexample: beta must exceed 1");
    require(k_max >= 1 && k_max <= 40, "saw_counterexample: k_max must be in [1, 40]");
    SawReport rep;
    rep.n = n;
    rep.beta = beta;
    const double alphas[] = {0.0, 0.5, 0.9, 1.0};
    std::vector<std::vector<double>> terms(4);
    for (int k = 1; k <= k_max; ++k) {
        const double R = std::exp2(k);
        const double l = std::pow(R, -0.5 * n);
        const double delta = std::pow(k, beta) / R;
        rep.k.push_back(k);
        rep.R.push_back(R);
        rep.flux.push_back(l * l * std::pow(R, n));
        const double shell = l * l * std::pow(R, n - 1.0);
        rep.sum_delta += shell * delta;
        rep.sum_inv_delta += shell / delta;
        for (int i = 0; i < 4; ++i)
            terms[i].push_back(l * l * std::pow(R, 2.0 * alphas[i] + n - 1.0) * delta);
    }
    for (int i = 0; i < 4; ++i) {
        SawMoment mo;
        mo.alpha = alphas[i];
        for (double t : terms[i]) mo.partial_sum += t;
        mo.last_term = terms[i].back();
        // geometric-tail certificate: the last few term ratios below 1
        mo.converged = terms[i].size() >= 4;
        for (size_t j = terms[i].size() - 3; j < terms[i].size() && mo.converged; ++j)
            mo.converged = terms[i][j] < 0.99 * terms[i][j - 1];
        rep.moments.push_back(mo);
    }
    return rep;
}

double integration_by_parts_residual(const ScalarField& f, const ScalarField& u,
                                     double p) {
    require(f.M != nullptr && u.M == f.M,
            "integration_by_parts_residual: fields must share a submanifold");
    require(p >= 1.0, "integration_by_parts_residual: p must be >= 1");
    const DiscreteSubmanifold& M = *f.M;
    for (int v = 0; v < M.num_vertices(); ++v)
        require_usage(!(M.collar[v] && f.v[v] != 0.0),
                      "integration_by_parts_residual: f must vanish on the "
                      "boundary collar");
    const auto gf = surface_gradient(f);
    const auto gu = surface_gradient(u);
    const auto lap_u = laplacian(M, u.v);
    double cross = 0.0, bulk = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) {
        double dot = 0.0;
        for (int c = 0; c < M.N; ++c) dot += gf.at(v)[c] * gu.at(v)[c];
        cross += std::pow(std::abs(f.v[v]), p - 1.0) * dot * M.weight[v];
        bulk += std::pow(std::abs(f.v[v]), p) * lap_u[v] * M.weight[v];
    }
    return -p * cross - bulk;
}

}  // namespace lab
