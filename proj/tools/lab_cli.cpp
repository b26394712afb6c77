// Command-line front door: builds scenarios, runs the suites, and writes
// CSV/JSON reports.  Exit codes: 0 pass, 1 criterion or suite failure,
// 2 usage or config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lab/acceptance.hpp"
#include "lab/fields.hpp"
#include "lab/functionals.hpp"
#include "lab/hopf_lax.hpp"
#include "lab/mesh.hpp"
#include "lab/special_functions.hpp"
#include "lab/transport.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Scenario {
    std::string generator = "flat_chart";
    double half_width = 6.0;
    std::vector<int> resolutions = {65, 129};
    std::string field = "gaussian_a1";
    double p = 2.0;
    std::vector<double> alphas = {0.5, 1.0, 2.0};
    double a = 1.0;
    double b = 2.0;
    double t = 0.5;
    std::vector<double> times = {0.0, 0.25, 0.5};
    int transport_points = 120;
    std::uint64_t seed = 1;
    std::vector<std::string> suites = {"constants", "deficits", "hopflax",
                                       "transport"};
    std::string out;
};

const std::vector<std::string> kGenerators = {"flat_chart", "sphere",
                                              "catenoid", "cylinder_shrinker"};
const std::vector<std::string> kFields = {
    "gaussian_a1",        "gaussian_a05_off", "gaussian_poly",
    "bump_r3",            "perturbed_gaussian", "stretched_exp"};
const std::vector<std::string> kSuites = {"constants", "deficits", "hopflax",
                                          "transport"};

bool contains(const std::vector<std::string>& v, const std::string& x) {
    for (const auto& s : v)
        if (s == x) return true;
    return false;
}

lab::DiscreteSubmanifold make_generator(const Scenario& s, int resolution) {
    if (s.generator == "flat_chart")
        return lab::make_flat_chart(2, 1, s.half_width, resolution);
    if (s.generator == "sphere") {
        // interpret the resolution as a subdivision level
        const int level = std::max(1, std::min(6, resolution / 32 + 2));
        return lab::make_sphere(2, 2.0, level);
    }
    if (s.generator == "catenoid") return lab::make_catenoid(resolution, 2.0);
    if (s.generator == "cylinder_shrinker")
        return lab::make_cylinder_shrinker(1, 2, resolution, s.half_width);
    throw ConfigError("field 'generator': unknown generator '" + s.generator +
                      "'");
}

lab::ScalarField pick_field(const lab::DiscreteSubmanifold& M,
                            const std::string& name) {
    for (auto& nf : lab::standard_test_fields(M))
        if (nf.name == name) return std::move(nf.f);
    throw ConfigError("field 'field': unknown field '" + name + "'");
}

std::string out_dir(const std::string& flag_out, const std::string& cfg_out) {
    if (!flag_out.empty()) return flag_out;
    if (!cfg_out.empty()) return cfg_out;
    if (const char* env = std::getenv("LOGSOB_LAB_OUT"))
        if (*env != '\0') return env;
    return ".";
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "."
                                                      : path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << content;
}

// --- suite runners ----------------------------------------------------------

void run_constants(const fs::path& dir) {
    json j;
    for (int n = 1; n <= 10; ++n) {
        const auto g = lab::general_constants(n, 2.0);
        j["sharp_lsi_p2"].push_back(
            {{"n", n}, {"value", lab::sharp_lsi_constant(2.0, n)}});
        j["general_p2"].push_back({{"n", n}, {"A", g.A}, {"B", g.B}});
    }
    j["digamma_root"] = lab::digamma_root();
    bool chain = true;
    for (double p : {2.0, 2.5, 3.0, 4.0})
        for (int n = 2; n <= 6; ++n)
            for (int m = 1; m <= 20; ++m)
                chain = chain && lab::constant_chain_check(p, n, m).pass;
    j["constant_chain_pass"] = chain;
    write_file(dir / "constants.json", j.dump(2) + "\n");
}

bool run_deficits(const Scenario& s, const fs::path& dir, json& summary) {
    std::ostringstream csv;
    csv << lab::DeficitReport::csv_header() << "\n";
    double worst = 1e300;
    for (int res : s.resolutions) {
        const auto M = make_generator(s, res);
        const auto raw = pick_field(M, s.field);
        const auto f2 = lab::normalize(raw, 2.0);
        auto row = [&](const lab::DeficitReport& r) {
            csv << r.csv_row() << "\n";
            worst = std::min(worst, r.deficit);
        };
        row(lab::deficit_main(f2));
        for (double a : s.alphas) row(lab::deficit_parametric(f2, a));
        row(lab::deficit_lp_general(lab::normalize(raw, s.p), s.p));
        if (M.minimal)
            row(lab::deficit_lp_minimal(lab::normalize(raw, s.p), s.p));
    }
    write_file(dir / "deficits.csv", csv.str());
    const bool pass = worst >= -1e-6;
    summary["deficits"] = {{"pass", pass}, {"worst_deficit", worst}};
    return pass;
}

bool run_hopflax(const Scenario& s, const fs::path& dir, json& summary) {
    const auto M = make_generator(s, s.resolutions.front());
    std::ostringstream csv;
    csv << "kind,resolution,t,q_t,F,bound,ratio,monotone_flag\n";
    auto rows = [&](const std::string& kind,
                    const lab::HypercontractivityReport& rep) {
        csv.precision(17);
        for (size_t i = 0; i < rep.t.size(); ++i)
            csv << kind << ',' << s.resolutions.front() << ',' << rep.t[i]
                << ',' << rep.q[i] << ',' << rep.F[i] << ',' << rep.bound[i]
                << ',' << rep.ratio[i] << ','
                << (rep.monotone[i] ? 1 : 0) << "\n";
    };
    bool pass = true;
    const double beta = (s.b - s.a) / (2.0 * s.b * s.t);
    lab::ScalarField u;
    u.M = &M;
    u.v.resize(M.num_vertices());
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double r = M.norm_x(v);
        u.v[v] = 1.0 - beta * r * r;
    }
    const auto rep = lab::euclidean_hyper_report(M, u, s.a, s.b, s.t);
    rows("euclidean", rep);
    for (double r : rep.ratio) pass = pass && r <= 1.0 + 1e-3;

    // flat charts satisfy the shrinker identity trivially, but their
    // truncated Gaussian mass is below 1, which pollutes the strict
    // monotonicity flags; run the weighted report on curved shrinkers only
    if (M.shrinker && s.generator != "flat_chart") {
        lab::ScalarField g;
        g.M = &M;
        g.v.resize(M.num_vertices());
        for (int v = 0; v < M.num_vertices(); ++v) g.v[v] = M.p(v)[M.N - 1];
        const auto grep = lab::gaussian_hyper_report(M, g, s.a, s.times);
        rows("gaussian", grep);
        for (char m : grep.monotone) pass = pass && m;
    }
    write_file(dir / "hopflax.csv", csv.str());
    summary["hopflax"] = {{"pass", pass}};
    return pass;
}

bool run_transport(const Scenario& s, const fs::path& dir, json& summary) {
    const int res = s.transport_points | 1;  // odd
    const auto M = lab::make_flat_chart(1, 1, 3.0, res);
    lab::TransportInstance inst;
    inst.M = &M;
    inst.source_mass.resize(M.num_vertices());
    double total = 0.0;
    for (int v = 0; v < M.num_vertices(); ++v) {
        const double x = M.p(v)[0];
        inst.source_mass[v] = M.weight[v] * std::exp(-0.5 * x * x);
        total += inst.source_mass[v];
    }
    for (double& m : inst.source_mass) m /= total;
    inst.target.N = 2;
    total = 0.0;
    for (int j = 0; j < s.transport_points; ++j) {
        const double x = -2.8 + j * 5.6 / (s.transport_points - 1);
        inst.target.points.insert(inst.target.points.end(), {x, 0.0});
        inst.target.mass.push_back(std::exp(-0.35 * x * x));
        total += inst.target.mass.back();
    }
    for (double& m : inst.target.mass) m /= total;

    const auto plan = lab::solve_exact(inst);
    const auto scan =
        lab::cyclical_monotonicity_check(inst, plan, 10000, 4, s.seed);
    const bool pass =
        static_cast<int>(plan.support.size()) <=
            M.num_vertices() + s.transport_points - 1 &&
        std::abs(plan.duality_gap) <= 1e-9 * std::max(plan.cost, 1e-12) &&
        scan.pass;
    write_file(dir / "transport.csv", lab::plan_csv(plan));
    summary["transport"] = json::parse(lab::plan_json_header(inst, plan));
    summary["transport"]["pass"] = pass;
    summary["transport"]["worst_cycle_sum"] = scan.worst_sum;
    return pass;
}

int run_scenario(const Scenario& s, const std::string& flag_out) {
    const fs::path dir = out_dir(flag_out, s.out);
    fs::create_directories(dir);
    json summary;
    std::vector<std::string> failures;
    for (const auto& suite : s.suites) {
        bool ok = true;
        if (suite == "constants")
            run_constants(dir);
        else if (suite == "deficits")
            ok = run_deficits(s, dir, summary);
        else if (suite == "hopflax")
            ok = run_hopflax(s, dir, summary);
        else if (suite == "transport")
            ok = run_transport(s, dir, summary);
        else
            throw ConfigError("field 'suites': unknown suite '" + suite + "'");
        if (!ok) failures.push_back(suite);
    }
    summary["pass"] = failures.empty();
    summary["failures"] = failures;
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    if (!failures.empty()) {
        std::cerr << "failed:";
        for (const auto& f : failures) std::cerr << ' ' << f;
        std::cerr << "\n";
        return 1;
    }
    return 0;
}

// --- config parsing ---------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

Scenario parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config '" + path + "'");
    Scenario s;
    bool generator_given = false;
    std::string line, section = "scenario";
    int ln = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError("line " + std::to_string(ln) + ": " + msg);
    };
    while (std::getline(is, line)) {
        ++ln;
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        if (line[b] == '#') continue;
        if (line[b] == '[') {
            const auto e = line.find(']', b);
            if (e == std::string::npos) fail("unterminated section header");
            section = line.substr(b + 1, e - b - 1);
            if (section != "scenario" && !contains(kSuites, section))
                fail("unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        auto keyv = split(line.substr(0, eq), '=');
        if (keyv.empty()) fail("missing key before '='");
        const std::string key = keyv[0];
        const std::string value = [&] {
            auto v = line.substr(eq + 1);
            const auto vb = v.find_first_not_of(" \t");
            if (vb == std::string::npos) return std::string();
            return v.substr(vb, v.find_last_not_of(" \t") - vb + 1);
        }();
        if (value.empty()) fail("field '" + key + "': empty value");
        try {
            if (key == "generator") {
                if (!contains(kGenerators, value))
                    fail("field 'generator': unknown generator '" + value +
                         "'");
                s.generator = value;
                generator_given = true;
            } else if (key == "field") {
                if (!contains(kFields, value))
                    fail("field 'field': unknown field '" + value + "'");
                s.field = value;
            } else if (key == "suites") {
                s.suites = split(value, ',');
                for (const auto& su : s.suites)
                    if (!contains(kSuites, su))
                        fail("field 'suites': unknown suite '" + su + "'");
            } else if (key == "half_width") {
                s.half_width = std::stod(value);
            } else if (key == "resolutions") {
                s.resolutions.clear();
                for (const auto& r : split(value, ','))
                    s.resolutions.push_back(std::stoi(r));
            } else if (key == "p") {
                s.p = std::stod(value);
            } else if (key == "alphas") {
                s.alphas.clear();
                for (const auto& a : split(value, ','))
                    s.alphas.push_back(std::stod(a));
            } else if (key == "a") {
                s.a = std::stod(value);
            } else if (key == "b") {
                s.b = std::stod(value);
            } else if (key == "t") {
                s.t = std::stod(value);
            } else if (key == "times") {
                s.times.clear();
                for (const auto& t : split(value, ','))
                    s.times.push_back(std::stod(t));
            } else if (key == "points") {
                s.transport_points = std::stoi(value);
            } else if (key == "seed") {
                s.seed = std::stoull(value);
            } else if (key == "out") {
                s.out = value;
            } else {
                fail("unknown field '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            fail("field '" + key + "': malformed value '" + value + "'");
        }
    }
    const bool needs_generator = contains(s.suites, "deficits") ||
                                 contains(s.suites, "hopflax");
    if (needs_generator && !generator_given)
        throw ConfigError("missing field 'generator'");
    if (s.resolutions.empty()) throw ConfigError("field 'resolutions': empty");
    return s;
}

int run_suite(const std::string& name, const std::string& flag_out) {
    std::vector<lab::CriterionResult> results;
    if (name == "acceptance") {
        results = lab::run_acceptance();
    } else {
        for (int id : lab::quick_criteria())
            results.push_back(lab::run_criterion(id));
    }
    json summary;
    std::vector<std::string> failures;
    for (const auto& r : results) {
        std::printf("criterion %2d %-38s %s  (%.1fs)%s%s\n", r.id,
                    r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds,
                    r.detail.empty() ? "" : "  ", r.detail.c_str());
        summary["criteria"].push_back(
            {{"id", r.id}, {"name", r.name}, {"pass", r.pass},
             {"detail", r.detail}});
        if (!r.pass) failures.push_back(r.name);
    }
    summary["pass"] = failures.empty();
    summary["failures"] = failures;
    const fs::path dir = out_dir(flag_out, "");
    fs::create_directories(dir);
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    if (!failures.empty()) {
        std::cerr << "failed:";
        for (const auto& f : failures) std::cerr << ' ' << f;
        std::cerr << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Numerical laboratory for entropy inequalities, inf-convolution "
        "semigroups, and exact transport on discretized submanifolds"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string flag_out;
    std::uint64_t seed = 1;
    int workers = 1;
    app.add_option("--out", flag_out, "output directory (or LOGSOB_LAB_OUT)");
    app.add_option("--seed", seed, "seed for randomized scans");
    app.add_option("--workers", workers, "concurrency cap for scenario runs")
        ->check(CLI::PositiveNumber);

    auto* c_const = app.add_subcommand("constants", "emit constants.json");

    Scenario def;
    auto* c_def = app.add_subcommand("deficit", "deficit suite on a scenario");
    c_def->add_option("--generator", def.generator, "generator name")
        ->check(CLI::IsMember(kGenerators));
    c_def->add_option("--field", def.field, "test field name")
        ->check(CLI::IsMember(kFields));
    c_def->add_option("--resolution", def.resolutions, "resolution levels");
    c_def->add_option("--half-width", def.half_width, "chart truncation");
    c_def->add_option("--p", def.p, "integrability exponent");
    c_def->add_option("--alpha", def.alphas, "parametric alpha values");

    auto* c_hl = app.add_subcommand("hopflax", "hypercontractivity reports");
    c_hl->add_option("--generator", def.generator, "generator name")
        ->check(CLI::IsMember(kGenerators));
    c_hl->add_option("--resolution", def.resolutions, "resolution levels");
    c_hl->add_option("--a", def.a, "starting exponent");
    c_hl->add_option("--b", def.b, "target exponent");
    c_hl->add_option("--t", def.t, "time horizon");

    auto* c_tr = app.add_subcommand("transport", "1-D exact transport report");
    c_tr->add_option("--points", def.transport_points, "target point count")
        ->check(CLI::Range(10, 2000));

    std::string config_path;
    auto* c_run = app.add_subcommand("run", "run a scenario config");
    c_run->add_option("config", config_path, "key-value config file")
        ->required();

    std::string suite_name;
    auto* c_suite = app.add_subcommand("suite", "acceptance or quick battery");
    c_suite->add_option("name", suite_name, "suite name")
        ->required()
        ->check(CLI::IsMember({"acceptance", "quick"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        def.seed = seed;
        if (c_const->parsed()) {
            def.suites = {"constants"};
            return run_scenario(def, flag_out);
        }
        if (c_def->parsed()) {
            def.suites = {"deficits"};
            return run_scenario(def, flag_out);
        }
        if (c_hl->parsed()) {
            def.suites = {"hopflax"};
            return run_scenario(def, flag_out);
        }
        if (c_tr->parsed()) {
            def.suites = {"transport"};
            return run_scenario(def, flag_out);
        }
        if (c_run->parsed()) {
            Scenario s = parse_config(config_path);
            if (seed != 1) s.seed = seed;
            return run_scenario(s, flag_out);
        }
        if (c_suite->parsed()) return run_suite(suite_name, flag_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
