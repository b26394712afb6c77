#include "lab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace lab {

namespace {

constexpr int kVertexBudget = 1 << 22;

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

double dist(const double* a, const double* b, int N) {
    double s = 0.0;
    for (int c = 0; c < N; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
    return std::sqrt(s);
}

// Row-major grid indexing, axis 0 slowest.
struct GridIndexer {
    std::vector<int> dims;
    std::vector<int> stride;
    explicit GridIndexer(const std::vector<int>& d) : dims(d), stride(d.size()) {
        int s = 1;
        for (int a = static_cast<int>(d.size()) - 1; a >= 0; --a) {
            stride[a] = s;
            s *= d[a];
        }
    }
    int total() const {
        int s = 1;
        for (int d : dims) s *= d;
        return s;
    }
    int flatten(const std::vector<int>& idx) const {
        int v = 0;
        for (size_t a = 0; a < dims.size(); ++a) v += idx[a] * stride[a];
        return v;
    }
    std::vector<int> unflatten(int v) const {
        std::vector<int> idx(dims.size());
        for (size_t a = 0; a < dims.size(); ++a) {
            idx[a] = v / stride[a];
            v %= stride[a];
        }
        return idx;
    }
};

void build_chart_adjacency(DiscreteSubmanifold& M) {
    const GridIndexer g(M.dims);
    const int V = M.num_vertices();
    M.ring.assign(V, {});
    // all offsets in {-1,0,1}^n
    std::vector<std::vector<int>> offsets;
    std::vector<int> off(M.n, -1);
    while (true) {
        bool allzero = true;
        for (int a = 0; a < M.n; ++a) allzero = allzero && off[a] == 0;
        if (!allzero) offsets.push_back(off);
        int a = M.n - 1;
        while (a >= 0 && off[a] == 1) off[a--] = -1;
        if (a < 0) break;
        ++off[a];
    }
    for (int v = 0; v < V; ++v) {
        const auto idx = g.unflatten(v);
        for (const auto& o : offsets) {
            std::vector<int> j = idx;
            bool ok = true;
            for (int a = 0; a < M.n && ok; ++a) {
                j[a] += o[a];
                if (M.periodic[a]) {
                    j[a] = (j[a] + M.dims[a]) % M.dims[a];
                } else if (j[a] < 0 || j[a] >= M.dims[a]) {
                    ok = false;
                }
            }
            if (ok) M.ring[v].push_back(g.flatten(j));
        }
        std::sort(M.ring[v].begin(), M.ring[v].end());
        M.ring[v].erase(std::unique(M.ring[v].begin(), M.ring[v].end()), M.ring[v].end());
    }
}

void build_simplicial_adjacency(DiscreteSubmanifold& M) {
    const int V = M.num_vertices();
    M.ring.assign(V, {});
    auto link = [&](int a, int b) {
        M.ring[a].push_back(b);
        M.ring[b].push_back(a);
    };
    for (size_t t = 0; t + 2 < M.tris.size(); t += 3) {
        link(M.tris[t], M.tris[t + 1]);
        link(M.tris[t + 1], M.tris[t + 2]);
        link(M.tris[t + 2], M.tris[t]);
    }
    for (size_t s = 0; s + 1 < M.segs.size(); s += 2) link(M.segs[s], M.segs[s + 1]);
    for (auto& r : M.ring) {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
    }
}

void triangulate_chart(DiscreteSubmanifold& M) {
    if (M.n != 2) return;
    const GridIndexer g(M.dims);
    const int d0 = M.dims[0], d1 = M.dims[1];
    const int c0 = M.periodic[0] ? d0 : d0 - 1;
    const int c1 = M.periodic[1] ? d1 : d1 - 1;
    for (int i = 0; i < c0; ++i)
        for (int j = 0; j < c1; ++j) {
            const int i1 = (i + 1) % d0, j1 = (j + 1) % d1;
            const int a = g.flatten({i, j}), b = g.flatten({i1, j});
            const int c = g.flatten({i, j1}), d = g.flatten({i1, j1});
            M.tris.insert(M.tris.end(), {a, b, d});
            M.tris.insert(M.tris.end(), {a, d, c});
        }
}

void compute_hmax(DiscreteSubmanifold& M) {
    double h = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v)
        for (int u : M.ring[v])
            h = std::max(h, dist(M.p(v), M.p(u), M.N));
    M.hmax = h;
}

// collar = within `depth` graph rings of a boundary vertex
void mark_collar(DiscreteSubmanifold& M, int depth = 2) {
    const int V = M.num_vertices();
    M.collar.assign(V, 0);
    std::vector<int> frontier;
    for (int v = 0; v < V; ++v)
        if (M.boundary[v]) {
            M.collar[v] = 1;
            frontier.push_back(v);
        }
    for (int d = 0; d < depth; ++d) {
        std::vector<int> next;
        for (int v : frontier)
            for (int u : M.ring[v])
                if (!M.collar[u]) {
                    M.collar[u] = 1;
                    next.push_back(u);
                }
        frontier.swap(next);
    }
}

void simplicial_mass_and_H(DiscreteSubmanifold& M) {
    const Stiffness L = cotan_stiffness(M);
    const int V = M.num_vertices();
    // barycentric lumping for quadrature; Voronoi (mixed) areas for the
    // curvature normal, which stays accurate at irregular-valence vertices
    std::vector<double> mass(V, 0.0), vmass(V, 0.0);
    for (size_t t = 0; t + 2 < M.tris.size(); t += 3) {
        const int vid[3] = {M.tris[t], M.tris[t + 1], M.tris[t + 2]};
        double edge[3][3];  // edge[i] = opposite side of vertex i
        double len2[3];
        for (int i = 0; i < 3; ++i) {
            const int j = vid[(i + 1) % 3], k = vid[(i + 2) % 3];
            len2[i] = 0.0;
            for (int c = 0; c < 3; ++c) {
                edge[i][c] = M.pos[3 * k + c] - M.pos[3 * j + c];
                len2[i] += edge[i][c] * edge[i][c];
            }
        }
        const double cx = edge[2][1] * edge[1][2] - edge[2][2] * edge[1][1];
        const double cy = edge[2][2] * edge[1][0] - edge[2][0] * edge[1][2];
        const double cz = edge[2][0] * edge[1][1] - edge[2][1] * edge[1][0];
        const double twoA = std::sqrt(cx * cx + cy * cy + cz * cz);
        const double area = 0.5 * twoA;
        double cot[3];
        bool obtuse = false;
        for (int i = 0; i < 3; ++i) {
            double dot = 0.0;
            for (int c = 0; c < 3; ++c) dot += edge[(i + 1) % 3][c] * edge[(i + 2) % 3][c];
            cot[i] = -dot / twoA;
            if (cot[i] < 0.0) obtuse = true;
        }
        for (int i = 0; i < 3; ++i) {
            mass[vid[i]] += area / 3.0;
            if (obtuse)
                vmass[vid[i]] += cot[i] < 0.0 ? area / 2.0 : area / 4.0;
            else
                vmass[vid[i]] += 0.125 * (len2[(i + 1) % 3] * cot[(i + 1) % 3] +
                                          len2[(i + 2) % 3] * cot[(i + 2) % 3]);
        }
    }
    M.weight = mass;
    M.H.assign(static_cast<size_t>(V) * M.N, 0.0);
    for (int v = 0; v < V; ++v) {
        for (const auto& [u, w] : L.rows[v])
            for (int c = 0; c < M.N; ++c)
                M.H[static_cast<size_t>(v) * M.N + c] +=
                    w * (M.pos[static_cast<size_t>(u) * M.N + c] -
                         M.pos[static_cast<size_t>(v) * M.N + c]);
        for (int c = 0; c < M.N; ++c)
            M.H[static_cast<size_t>(v) * M.N + c] /= vmass[v];
    }
}

}  // namespace

double DiscreteSubmanifold::norm_x(int v) const {
    double s = 0.0;
    for (int c = 0; c < N; ++c) s += p(v)[c] * p(v)[c];
    return std::sqrt(s);
}

DiscreteSubmanifold make_flat_chart(int n, int m, double half_width, int resolution) {
    require(n >= 1 && n <= 3, "make_flat_chart: n must be in {1,2,3}");
    require(m >= 1, "make_flat_chart: m must be >= 1");
    require(half_width > 0.0, "make_flat_chart: half_width must be positive");
    require(resolution >= 3 && resolution % 2 == 1,
            "make_flat_chart: resolution must be odd and >= 3");
    double count = 1.0;
    for (int a = 0; a < n; ++a) count *= resolution;
    if (count > kVertexBudget)
        throw std::length_error("make_flat_chart: vertex budget exceeded");

    DiscreteSubmanifold M;
    M.n = n;
    M.N = n + m;
    M.backend = Backend::chart;
    M.generator = "flat_chart";
    M.minimal = true;
    M.flat = true;
    M.shrinker = true;  // H and xPerp both vanish identically
    M.truncation = half_width;
    M.dims.assign(n, resolution);
    M.periodic.assign(n, 0);
    const double h = 2.0 * half_width / (resolution - 1);
    M.spacing.assign(n, h);

    const GridIndexer g(M.dims);
    const int V = g.total();
    M.pos.assign(static_cast<size_t>(V) * M.N, 0.0);
    M.weight.assign(V, 0.0);
    M.frame.assign(static_cast<size_t>(V) * n * M.N, 0.0);
    M.H.assign(static_cast<size_t>(V) * M.N, 0.0);
    M.boundary.assign(V, 0);
    M.jac.assign(static_cast<size_t>(V) * n * M.N, 0.0);
    M.ginv.assign(static_cast<size_t>(V) * n * n, 0.0);

    for (int v = 0; v < V; ++v) {
        const auto idx = g.unflatten(v);
        double w = 1.0;
        for (int a = 0; a < n; ++a) {
            M.pos[static_cast<size_t>(v) * M.N + a] = -half_width + idx[a] * h;
            const bool edge = idx[a] == 0 || idx[a] == resolution - 1;
            w *= h * (edge ? 0.5 : 1.0);
            if (edge) M.boundary[v] = 1;
            M.frame[(static_cast<size_t>(v) * n + a) * M.N + a] = 1.0;
            M.jac[(static_cast<size_t>(v) * n + a) * M.N + a] = 1.0;
            M.ginv[static_cast<size_t>(v) * n * n + a * n + a] = 1.0;
        }
        M.weight[v] = w;
    }
    build_chart_adjacency(M);
    triangulate_chart(M);
    if (n == 1)
        for (int v = 0; v + 1 < V; ++v) M.segs.insert(M.segs.end(), {v, v + 1});
    mark_collar(M);
    compute_hmax(M);
    return M;
}

DiscreteSubmanifold make_sphere(int n, double radius, int resolution) {
    require(n == 1 || n == 2, "make_sphere: n must be 1 or 2");
    require(radius > 0.0, "make_sphere: radius must be positive");

    DiscreteSubmanifold M;
    M.n = n;
    M.N = n + 1;
    M.backend = Backend::simplicial;
    M.generator = "sphere";
    M.truncation = radius;
    M.sup_H_analytic = n / radius;
    M.shrinker = std::abs(radius - std::sqrt(2.0 * n)) < 1e-12;

    if (n == 1) {
        require(resolution >= 8, "make_sphere: polygon needs >= 8 vertices");
        const int V = resolution;
        M.pos.resize(static_cast<size_t>(V) * 2);
        M.frame.resize(static_cast<size_t>(V) * 2);
        for (int v = 0; v < V; ++v) {
            const double th = 2.0 * M_PI * v / V;
            M.pos[2 * v] = radius * std::cos(th);
            M.pos[2 * v + 1] = radius * std::sin(th);
            M.frame[2 * v] = -std::sin(th);
            M.frame[2 * v + 1] = std::cos(th);
        }
        for (int v = 0; v < V; ++v) M.segs.insert(M.segs.end(), {v, (v + 1) % V});
        M.weight.assign(V, 0.0);
        build_simplicial_adjacency(M);
        // chord-length lumped weights and second-difference curvature
        M.H.assign(static_cast<size_t>(V) * 2, 0.0);
        for (int v = 0; v < V; ++v) {
            const int prev = (v + V - 1) % V, next = (v + 1) % V;
            const double lp = dist(M.p(v), M.p(prev), 2);
            const double ln = dist(M.p(v), M.p(next), 2);
            M.weight[v] = 0.5 * (lp + ln);
            for (int c = 0; c < 2; ++c)
                M.H[2 * v + c] = ((M.pos[2 * next + c] - M.pos[2 * v + c]) / ln +
                                  (M.pos[2 * prev + c] - M.pos[2 * v + c]) / lp) /
                                 M.weight[v];
        }
        M.boundary.assign(V, 0);
        mark_collar(M);
        compute_hmax(M);
        return M;
    }

    // n = 2: subdivided icosahedron
    require(resolution >= 1 && resolution <= 7,
            "make_sphere: subdivision level must be in [1, 7]");
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<std::array<double, 3>> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    auto project = [&](std::array<double, 3>& p) {
        const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        for (int c = 0; c < 3; ++c) p[c] *= radius / r;
    };
    for (auto& p : verts) project(p);
    for (int level = 0; level < resolution; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            std::array<double, 3> p;
            for (int c = 0; c < 3; ++c) p[c] = 0.5 * (verts[a][c] + verts[b][c]);
            project(p);
            verts.push_back(p);
            const int id = static_cast<int>(verts.size()) - 1;
            midpoint[key] = id;
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces.swap(next);
    }
    const int V = static_cast<int>(verts.size());
    M.pos.resize(static_cast<size_t>(V) * 3);
    for (int v = 0; v < V; ++v)
        for (int c = 0; c < 3; ++c) M.pos[3 * v + c] = verts[v][c];
    for (const auto& f : faces) M.tris.insert(M.tris.end(), {f[0], f[1], f[2]});
    M.boundary.assign(V, 0);
    M.weight.assign(V, 0.0);  // placeholder, replaced by barycentric areas
    build_simplicial_adjacency(M);
    simplicial_mass_and_H(M);

    // analytic tangent frames: two orthonormal vectors orthogonal to x
    M.frame.assign(static_cast<size_t>(V) * 2 * 3, 0.0);
    for (int v = 0; v < V; ++v) {
        double r[3];
        const double nrm = M.norm_x(v);
        for (int c = 0; c < 3; ++c) r[c] = M.p(v)[c] / nrm;
        int axis = 0;
        for (int c = 1; c < 3; ++c)
            if (std::abs(r[c]) < std::abs(r[axis])) axis = c;
        double e1[3] = {0, 0, 0};
        e1[axis] = 1.0;
        double d = r[0] * e1[0] + r[1] * e1[1] + r[2] * e1[2];
        double len = 0.0;
        for (int c = 0; c < 3; ++c) {
            e1[c] -= d * r[c];
            len += e1[c] * e1[c];
        }
        len = std::sqrt(len);
        for (int c = 0; c < 3; ++c) M.frame[(static_cast<size_t>(v) * 2) * 3 + c] = e1[c] / len;
        // e2 = r x e1
        double* e2 = &M.frame[(static_cast<size_t>(v) * 2 + 1) * 3];
        e2[0] = r[1] * e1[2] / len - r[2] * e1[1] / len;
        e2[1] = r[2] * e1[0] / len - r[0] * e1[2] / len;
        e2[2] = r[0] * e1[1] / len - r[1] * e1[0] / len;
    }
    mark_collar(M);
    compute_hmax(M);
    return M;
}

DiscreteSubmanifold make_cylinder_shrinker(int k, int n, int resolution,
                                           double truncation) {
    require(k >= 1 && n >= 2 && k < n, "make_cylinder_shrinker: need 1 <= k < n");
    require(k == 1 && n == 2,
            "make_cylinder_shrinker: only k=1, n=2 is generated");
    require(resolution >= 8, "make_cylinder_shrinker: resolution must be >= 8");
    require(truncation > 0.0, "make_cylinder_shrinker: truncation must be positive");

    const double r = std::sqrt(2.0 * k);
    DiscreteSubmanifold M;
    M.n = 2;
    M.N = 3;
    M.backend = Backend::chart;
    M.generator = "cylinder_shrinker";
    M.shrinker = true;
    M.truncation = truncation;
    M.sup_H_analytic = k / r;
    M.dims = {resolution, resolution | 1};  // odd point count along z
    M.periodic = {1, 0};
    const int dth = M.dims[0], dz = M.dims[1];
    const double hth = 2.0 * M_PI / dth;
    const double hz = 2.0 * truncation / (dz - 1);
    M.spacing = {hth, hz};

    const GridIndexer g(M.dims);
    const int V = g.total();
    if (V > kVertexBudget)
        throw std::length_error("make_cylinder_shrinker: vertex budget exceeded");
    M.pos.resize(static_cast<size_t>(V) * 3);
    M.weight.resize(V);
    M.frame.assign(static_cast<size_t>(V) * 2 * 3, 0.0);
    M.H.assign(static_cast<size_t>(V) * 3, 0.0);
    M.boundary.assign(V, 0);
    M.jac.assign(static_cast<size_t>(V) * 2 * 3, 0.0);
    M.ginv.assign(static_cast<size_t>(V) * 4, 0.0);

    for (int v = 0; v < V; ++v) {
        const auto idx = g.unflatten(v);
        const double th = idx[0] * hth;
        const double z = -truncation + idx[1] * hz;
        double* p = &M.pos[static_cast<size_t>(v) * 3];
        p[0] = r * std::cos(th);
        p[1] = r * std::sin(th);
        p[2] = z;
        const bool edge = idx[1] == 0 || idx[1] == dz - 1;
        if (edge) M.boundary[v] = 1;
        M.weight[v] = r * hth * hz * (edge ? 0.5 : 1.0);
        double* f0 = &M.frame[(static_cast<size_t>(v) * 2) * 3];
        f0[0] = -std::sin(th);
        f0[1] = std::cos(th);
        double* f1 = &M.frame[(static_cast<size_t>(v) * 2 + 1) * 3];
        f1[2] = 1.0;
        double* j0 = &M.jac[(static_cast<size_t>(v) * 2) * 3];
        j0[0] = -r * std::sin(th);
        j0[1] = r * std::cos(th);
        double* j1 = &M.jac[(static_cast<size_t>(v) * 2 + 1) * 3];
        j1[2] = 1.0;
        M.ginv[static_cast<size_t>(v) * 4] = 1.0 / (r * r);
        M.ginv[static_cast<size_t>(v) * 4 + 3] = 1.0;
        // analytic H of S^k(r) x R: -(k/r^2) radial part, zero flat part
        M.H[static_cast<size_t>(v) * 3] = -(k / (r * r)) * p[0];
        M.H[static_cast<size_t>(v) * 3 + 1] = -(k / (r * r)) * p[1];
    }
    build_chart_adjacency(M);
    triangulate_chart(M);
    mark_collar(M);
    compute_hmax(M);
    return M;
}

DiscreteSubmanifold make_catenoid(int resolution, double truncation) {
    require(resolution >= 8, "make_catenoid: resolution must be >= 8");
    require(truncation > 0.0, "make_catenoid: truncation must be positive");

    DiscreteSubmanifold M;
    M.n = 2;
    M.N = 3;
    M.backend = Backend::chart;
    M.generator = "catenoid";
    M.minimal = true;
    M.truncation = truncation;
    M.dims = {resolution, resolution | 1};
    M.periodic = {1, 0};
    const int du = M.dims[0], dv = M.dims[1];
    const double hu = 2.0 * M_PI / du;
    const double hv = 2.0 * truncation / (dv - 1);
    M.spacing = {hu, hv};

    const GridIndexer g(M.dims);
    const int V = g.total();
    if (V > kVertexBudget)
        throw std::length_error("make_catenoid: vertex budget exceeded");
    M.pos.resize(static_cast<size_t>(V) * 3);
    M.weight.resize(V);
    M.frame.assign(static_cast<size_t>(V) * 2 * 3, 0.0);
    M.H.assign(static_cast<size_t>(V) * 3, 0.0);
    M.boundary.assign(V, 0);
    M.jac.assign(static_cast<size_t>(V) * 2 * 3, 0.0);
    M.ginv.assign(static_cast<size_t>(V) * 4, 0.0);

    for (int vtx = 0; vtx < V; ++vtx) {
        const auto idx = g.unflatten(vtx);
        const double u = idx[0] * hu;
        const double w = -truncation + idx[1] * hv;
        const double ch = std::cosh(w), sh = std::sinh(w);
        double* p = &M.pos[static_cast<size_t>(vtx) * 3];
        p[0] = ch * std::cos(u);
        p[1] = ch * std::sin(u);
        p[2] = w;
        const bool edge = idx[1] == 0 || idx[1] == dv - 1;
        if (edge) M.boundary[vtx] = 1;
        M.weight[vtx] = ch * ch * hu * hv * (edge ? 0.5 : 1.0);
        double* j0 = &M.jac[(static_cast<size_t>(vtx) * 2) * 3];
        j0[0] = -ch * std::sin(u);
        j0[1] = ch * std::cos(u);
        double* j1 = &M.jac[(static_cast<size_t>(vtx) * 2 + 1) * 3];
        j1[0] = sh * std::cos(u);
        j1[1] = sh * std::sin(u);
        j1[2] = 1.0;
        double* f0 = &M.frame[(static_cast<size_t>(vtx) * 2) * 3];
        f0[0] = -std::sin(u);
        f0[1] = std::cos(u);
        double* f1 = &M.frame[(static_cast<size_t>(vtx) * 2 + 1) * 3];
        f1[0] = sh * std::cos(u) / ch;
        f1[1] = sh * std::sin(u) / ch;
        f1[2] = 1.0 / ch;
        M.ginv[static_cast<size_t>(vtx) * 4] = 1.0 / (ch * ch);
        M.ginv[static_cast<size_t>(vtx) * 4 + 3] = 1.0 / (ch * ch);
    }
    build_chart_adjacency(M);
    triangulate_chart(M);
    mark_collar(M);
    compute_hmax(M);
    return M;
}

std::vector<double> chart_partial(const DiscreteSubmanifold& M,
                                  const std::vector<double>& f, int axis) {
    require(M.backend == Backend::chart, "chart_partial: chart backend only");
    require(axis >= 0 && axis < M.n, "chart_partial: axis out of range");
    require(f.size() == M.weight.size(), "chart_partial: field size mismatch");
    const GridIndexer g(M.dims);
    const int V = g.total();
    const int L = M.dims[axis];
    const int stride = g.stride[axis];
    const double h = M.spacing[axis];
    std::vector<double> out(V, 0.0);

    const int lines = V / L;
    for (int line = 0; line < lines; ++line) {
        // base index of this grid line
        const int outer = line / stride, inner = line % stride;
        const int base = outer * stride * L + inner;
        auto at = [&](int j) { return base + j * stride; };
        if (M.periodic[axis]) {
            // explicit 4th-order central differences
            for (int j = 0; j < L; ++j) {
                const double fp1 = f[at((j + 1) % L)], fm1 = f[at((j + L - 1) % L)];
                const double fp2 = f[at((j + 2) % L)], fm2 = f[at((j + L - 2) % L)];
                out[at(j)] = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
            }
        } else {
            // midpoint collocation: (g_j + g_{j+1})/2 = (f_{j+1} - f_j)/h,
            // closed with a second-order one-sided value at the line start
            double gprev = (-3.0 * f[at(0)] + 4.0 * f[at(1)] - f[at(2)]) / (2.0 * h);
            out[at(0)] = gprev;
            for (int j = 0; j + 1 < L; ++j) {
                const double gnext = 2.0 * (f[at(j + 1)] - f[at(j)]) / h - gprev;
                out[at(j + 1)] = gnext;
                gprev = gnext;
            }
        }
    }
    return out;
}

AmbientField surface_gradient(const ScalarField& f) {
    require(f.M != nullptr, "surface_gradient: field not attached to a submanifold");
    const DiscreteSubmanifold& M = *f.M;
    require(f.v.size() == M.weight.size(), "surface_gradient: field size mismatch");
    const int V = M.num_vertices();
    AmbientField out;
    out.M = &M;
    out.v.assign(static_cast<size_t>(V) * M.N, 0.0);

    if (M.backend == Backend::chart) {
        std::vector<std::vector<double>> partial(M.n);
        for (int a = 0; a < M.n; ++a) partial[a] = chart_partial(M, f.v, a);
        for (int v = 0; v < V; ++v) {
            for (int b = 0; b < M.n; ++b) {
                double coeff = 0.0;
                for (int a = 0; a < M.n; ++a)
                    coeff += M.ginv[static_cast<size_t>(v) * M.n * M.n + b * M.n + a] *
                             partial[a][v];
                const double* col = &M.jac[(static_cast<size_t>(v) * M.n + b) * M.N];
                for (int c = 0; c < M.N; ++c)
                    out.v[static_cast<size_t>(v) * M.N + c] += coeff * col[c];
            }
        }
        return out;
    }

    if (M.n == 2) {
        // per-face affine gradients, area-averaged to vertices
        std::vector<double> denom(V, 0.0);
        for (size_t t = 0; t + 2 < M.tris.size(); t += 3) {
            const int a = M.tris[t], b = M.tris[t + 1], c = M.tris[t + 2];
            double e1[3], e2[3];
            for (int k = 0; k < 3; ++k) {
                e1[k] = M.pos[3 * b + k] - M.pos[3 * a + k];
                e2[k] = M.pos[3 * c + k] - M.pos[3 * a + k];
            }
            double nf[3] = {e1[1] * e2[2] - e1[2] * e2[1],
                            e1[2] * e2[0] - e1[0] * e2[2],
                            e1[0] * e2[1] - e1[1] * e2[0]};
            const double twoA = std::sqrt(nf[0] * nf[0] + nf[1] * nf[1] + nf[2] * nf[2]);
            for (double& x : nf) x /= twoA;
            const int vid[3] = {a, b, c};
            double grad[3] = {0, 0, 0};
            for (int i = 0; i < 3; ++i) {
                // edge opposite vertex i, oriented consistently
                const int j = vid[(i + 1) % 3], k = vid[(i + 2) % 3];
                double e[3];
                for (int cc = 0; cc < 3; ++cc) e[cc] = M.pos[3 * k + cc] - M.pos[3 * j + cc];
                const double fi = f.v[vid[i]];
                grad[0] += fi * (nf[1] * e[2] - nf[2] * e[1]);
                grad[1] += fi * (nf[2] * e[0] - nf[0] * e[2]);
                grad[2] += fi * (nf[0] * e[1] - nf[1] * e[0]);
            }
            const double area = 0.5 * twoA;
            for (double& x : grad) x /= twoA;
            for (int i = 0; i < 3; ++i) {
                for (int cc = 0; cc < 3; ++cc)
                    out.v[static_cast<size_t>(vid[i]) * 3 + cc] += (area / 3.0) * grad[cc];
                denom[vid[i]] += area / 3.0;
            }
        }
        for (int v = 0; v < V; ++v) {
            double tmp[3];
            for (int cc = 0; cc < 3; ++cc)
                tmp[cc] = out.v[static_cast<size_t>(v) * 3 + cc] / denom[v];
            project_tangent(M, v, tmp, &out.v[static_cast<size_t>(v) * 3]);
        }
        return out;
    }

    // n = 1 simplicial polyline: central difference along arclength
    for (int v = 0; v < V; ++v) {
        const auto& nb = M.ring[v];
        if (nb.size() == 2) {
            const double lp = dist(M.p(v), M.p(nb[0]), M.N);
            const double ln = dist(M.p(v), M.p(nb[1]), M.N);
            // signed along the stored tangent direction
            double dirdot = 0.0;
            for (int c = 0; c < M.N; ++c)
                dirdot += (M.p(nb[1])[c] - M.p(nb[0])[c]) * M.frame_vec(v, 0)[c];
            const double slope = (f.v[nb[1]] - f.v[nb[0]]) / (lp + ln) *
                                 (dirdot >= 0.0 ? 1.0 : -1.0);
            for (int c = 0; c < M.N; ++c)
                out.v[static_cast<size_t>(v) * M.N + c] = slope * M.frame_vec(v, 0)[c];
        }
    }
    return out;
}

void project_tangent(const DiscreteSubmanifold& M, int v, const double* vec,
                     double* out) {
    for (int c = 0; c < M.N; ++c) out[c] = 0.0;
    for (int a = 0; a < M.n; ++a) {
        const double* e = M.frame_vec(v, a);
        double d = 0.0;
        for (int c = 0; c < M.N; ++c) d += vec[c] * e[c];
        for (int c = 0; c < M.N; ++c) out[c] += d * e[c];
    }
}

std::pair<AmbientField, AmbientField> split_position(const DiscreteSubmanifold& M) {
    const int V = M.num_vertices();
    AmbientField xT, xP;
    xT.M = xP.M = &M;
    xT.v.assign(static_cast<size_t>(V) * M.N, 0.0);
    xP.v.assign(static_cast<size_t>(V) * M.N, 0.0);
    for (int v = 0; v < V; ++v) {
        project_tangent(M, v, M.p(v), &xT.v[static_cast<size_t>(v) * M.N]);
        for (int c = 0; c < M.N; ++c)
            xP.v[static_cast<size_t>(v) * M.N + c] =
                M.p(v)[c] - xT.v[static_cast<size_t>(v) * M.N + c];
    }
    return {xT, xP};
}

ScalarField geodesic_distance(const DiscreteSubmanifold& M,
                              const std::vector<int>& sources) {
    require(!sources.empty(), "geodesic_distance: empty source set");
    const int V = M.num_vertices();
    const double inf = std::numeric_limits<double>::infinity();
    ScalarField d;
    d.M = &M;
    d.v.assign(V, inf);

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int s : sources) {
        require(s >= 0 && s < V, "geodesic_distance: source index out of range");
        d.v[s] = 0.0;
        pq.push({0.0, s});
    }
    std::vector<int> order;
    order.reserve(V);
    while (!pq.empty()) {
        const auto [dv, v] = pq.top();
        pq.pop();
        if (dv > d.v[v]) continue;
        order.push_back(v);
        for (int u : M.ring[v]) {
            const double cand = dv + dist(M.p(v), M.p(u), M.N);
            if (cand < d.v[u]) {
                d.v[u] = cand;
                pq.push({cand, u});
            }
        }
    }
    // one corrective sweep over two-ring neighborhoods, forward then reverse
    auto relax = [&](int v) {
        for (int u : M.ring[v]) {
            {
                const double cand = d.v[u] + dist(M.p(v), M.p(u), M.N);
                if (cand < d.v[v]) d.v[v] = cand;
            }
            for (int w : M.ring[u]) {
                if (w == v) continue;
                const double cand = d.v[w] + dist(M.p(v), M.p(w), M.N);
                if (cand < d.v[v]) d.v[v] = cand;
            }
        }
    };
    for (auto it = order.begin(); it != order.end(); ++it) relax(*it);
    for (auto it = order.rbegin(); it != order.rend(); ++it) relax(*it);
    return d;
}

double measure_weight(const DiscreteSubmanifold& M, int v, Measure mu, double alpha) {
    if (mu == Measure::volume) return M.weight[v];
    require(alpha > 0.0, "measure_weight: gaussian measure needs alpha > 0");
    const double r2 = M.norm_x(v) * M.norm_x(v);
    return M.weight[v] * std::pow(alpha / M_PI, 0.5 * M.n) * std::exp(-alpha * r2);
}

double integrate(const DiscreteSubmanifold& M, const ScalarField& f, Measure mu,
                 double alpha) {
    require(f.M == &M, "integrate: field attached to a different submanifold");
    double s = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) s += f.v[v] * measure_weight(M, v, mu, alpha);
    return s;
}

Stiffness cotan_stiffness(const DiscreteSubmanifold& M) {
    const int V = M.num_vertices();
    Stiffness L;
    L.rows.assign(V, {});
    std::vector<std::map<int, double>> acc(V);
    if (!M.tris.empty()) {
        for (size_t t = 0; t + 2 < M.tris.size(); t += 3) {
            const int vid[3] = {M.tris[t], M.tris[t + 1], M.tris[t + 2]};
            double e[3][3];
            for (int i = 0; i < 3; ++i)
                for (int c = 0; c < 3; ++c)
                    e[i][c] = M.pos[3 * vid[(i + 2) % 3] + c] - M.pos[3 * vid[(i + 1) % 3] + c];
            double nf[3] = {e[0][1] * e[1][2] - e[0][2] * e[1][1],
                            e[0][2] * e[1][0] - e[0][0] * e[1][2],
                            e[0][0] * e[1][1] - e[0][1] * e[1][0]};
            const double twoA = std::sqrt(nf[0] * nf[0] + nf[1] * nf[1] + nf[2] * nf[2]);
            for (int i = 0; i < 3; ++i) {
                // cot of angle at vertex i = -<e_j, e_k> / (2A), edges opposite j, k
                const int j = (i + 1) % 3, k = (i + 2) % 3;
                double dot = 0.0;
                for (int c = 0; c < 3; ++c) dot += e[j][c] * e[k][c];
                const double w = -0.5 * dot / twoA;
                acc[vid[j]][vid[k]] += w;
                acc[vid[k]][vid[j]] += w;
            }
        }
    } else if (!M.segs.empty()) {
        for (size_t s = 0; s + 1 < M.segs.size(); s += 2) {
            const int a = M.segs[s], b = M.segs[s + 1];
            const double w = 1.0 / dist(M.p(a), M.p(b), M.N);
            acc[a][b] += w;
            acc[b][a] += w;
        }
    } else {
        throw std::domain_error("cotan_stiffness: no connectivity available");
    }
    for (int v = 0; v < V; ++v)
        L.rows[v].assign(acc[v].begin(), acc[v].end());
    return L;
}

double stiffness_form(const Stiffness& L, const std::vector<double>& f,
                      const std::vector<double>& g) {
    double s = 0.0;
    for (size_t v = 0; v < L.rows.size(); ++v)
        for (const auto& [u, w] : L.rows[v])
            s += 0.5 * w * (f[v] - f[u]) * (g[v] - g[u]);
    return s;
}

std::vector<double> stiffness_apply(const Stiffness& L, const std::vector<double>& f) {
    std::vector<double> out(f.size(), 0.0);
    for (size_t v = 0; v < L.rows.size(); ++v)
        for (const auto& [u, w] : L.rows[v]) out[v] += w * (f[v] - f[u]);
    return out;
}

AmbientField discrete_mean_curvature(const DiscreteSubmanifold& M) {
    const int V = M.num_vertices();
    AmbientField Hd;
    Hd.M = &M;
    Hd.v.assign(static_cast<size_t>(V) * M.N, 0.0);
    const Stiffness L = cotan_stiffness(M);
    // lumped mass: reuse stored weights for simplicial meshes; charts carry
    // quadrature weights that play the same role
    for (int v = 0; v < V; ++v) {
        for (const auto& [u, w] : L.rows[v])
            for (int c = 0; c < M.N; ++c)
                Hd.v[static_cast<size_t>(v) * M.N + c] +=
                    w * (M.pos[static_cast<size_t>(u) * M.N + c] -
                         M.pos[static_cast<size_t>(v) * M.N + c]);
        for (int c = 0; c < M.N; ++c)
            Hd.v[static_cast<size_t>(v) * M.N + c] /= M.weight[v];
    }
    return Hd;
}

void write_submesh(const DiscreteSubmanifold& M, std::ostream& os) {
    const int V = M.num_vertices();
    int num_cells = 0;
    if (M.backend == Backend::chart) {
        num_cells = 1;
        for (int a = 0; a < M.n; ++a)
            num_cells *= M.periodic[a] ? M.dims[a] : M.dims[a] - 1;
    } else {
        num_cells = M.n == 2 ? static_cast<int>(M.tris.size() / 3)
                             : static_cast<int>(M.segs.size() / 2);
    }
    os << "SUBMESH 1 " << M.n << ' ' << M.N << ' ' << V << ' ' << num_cells << ' '
       << (M.backend == Backend::chart ? "chart" : "simplicial") << '\n';
    os << std::setprecision(17);
    for (int v = 0; v < V; ++v) {
        for (int c = 0; c < M.N; ++c) os << (c ? " " : "") << M.p(v)[c];
        os << '\n';
    }
    if (M.backend == Backend::chart) {
        for (int a = 0; a < M.n; ++a) os << (a ? " " : "") << M.dims[a];
        os << '\n';
    } else if (M.n == 2) {
        for (size_t t = 0; t + 2 < M.tris.size(); t += 3)
            os << M.tris[t] << ' ' << M.tris[t + 1] << ' ' << M.tris[t + 2] << '\n';
    } else {
        for (size_t s = 0; s + 1 < M.segs.size(); s += 2)
            os << M.segs[s] << ' ' << M.segs[s + 1] << '\n';
    }
    os << "WEIGHTS\n";
    for (int v = 0; v < V; ++v) os << M.weight[v] << '\n';
    os << "H\n";
    for (int v = 0; v < V; ++v) {
        for (int c = 0; c < M.N; ++c) os << (c ? " " : "") << M.H[static_cast<size_t>(v) * M.N + c];
        os << '\n';
    }
    os << "FRAMES\n";
    for (int v = 0; v < V; ++v) {
        for (int a = 0; a < M.n; ++a)
            for (int c = 0; c < M.N; ++c)
                os << ((a || c) ? " " : "") << M.frame_vec(v, a)[c];
        os << '\n';
    }
}

DiscreteSubmanifold read_submesh(std::istream& is) {
    std::string magic;
    int version = 0;
    DiscreteSubmanifold M;
    is >> magic >> version;
    if (magic != "SUBMESH" || version != 1)
        throw std::runtime_error("read_submesh: bad header");
    int V = 0, cells = 0;
    std::string backend;
    is >> M.n >> M.N >> V >> cells >> backend;
    if (!is || M.n < 1 || M.N < M.n || V <= 0)
        throw std::runtime_error("read_submesh: malformed header fields");
    M.backend = backend == "chart" ? Backend::chart : Backend::simplicial;
    M.pos.resize(static_cast<size_t>(V) * M.N);
    for (auto& x : M.pos) is >> x;
    if (M.backend == Backend::chart) {
        M.dims.resize(M.n);
        for (auto& d : M.dims) is >> d;
    } else if (M.n == 2) {
        M.tris.resize(static_cast<size_t>(cells) * 3);
        for (auto& t : M.tris) is >> t;
    } else {
        M.segs.resize(static_cast<size_t>(cells) * 2);
        for (auto& s : M.segs) is >> s;
    }
    M.weight.assign(V, 0.0);
    std::string block;
    while (is >> block) {
        if (block == "WEIGHTS") {
            for (auto& w : M.weight) is >> w;
        } else if (block == "H") {
            M.H.resize(static_cast<size_t>(V) * M.N);
            for (auto& h : M.H) is >> h;
        } else if (block == "FRAMES") {
            M.frame.resize(static_cast<size_t>(V) * M.n * M.N);
            for (auto& f : M.frame) is >> f;
        } else {
            throw std::runtime_error("read_submesh: unknown block " + block);
        }
    }
    M.boundary.assign(V, 0);
    M.collar.assign(V, 0);
    return M;
}

}  // namespace lab
