#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "condscat/harness.hpp"

using namespace condscat;
using harness::json;
namespace fs = std::filesystem;

namespace {

fs::path workdir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "condscat_harness_test" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Run {
    int code = -1;
    json report;
    fs::path dir;
};

Run cli(const std::string& command, const json& doc, const std::string& name, const std::string& extra = "") {
    const char* exe = std::getenv("CONDSCAT_CLI");
    REQUIRE_MESSAGE(exe != nullptr, "CONDSCAT_CLI is not set");
    Run r;
    r.dir = workdir(name);
    std::string args = command + " --out " + r.dir.string() + " " + extra;
    if (!doc.is_null()) {
        std::ofstream(r.dir / "config.json") << doc.dump(2);
        args += " --config " + (r.dir / "config.json").string();
    }
    const int st = std::system((std::string(exe) + " " + args + " 2>" + (r.dir / "log.txt").string()).c_str());
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    if (fs::exists(r.dir / "report.json")) r.report = json::parse(slurp(r.dir / "report.json"));
    return r;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream f(p);
    std::vector<std::vector<std::string>> rows;
    for (std::string line; std::getline(f, line);) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

json squares(double q2 = 3.0) {
    return {{"schema_version", 1},
            {"medium",
             {{"kind", "nest"},
              {"k", 1.0},
              {"layers",
               {{{"vertices", {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}}, {"q", 2.0}, {"lambda", {0.0, 0.5}}},
                {{"vertices", {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}}, {"q", q2}, {"lambda", 0.0}}}}}},
            {"incident", {{"kind", "plane_wave"}, {"direction", {0.6, 0.8}}}},
            {"mesh", {{"nodes_per_edge", 16}}},
            {"far_field", {{"directions", 64}}}};
}

json probe_doc(json probe) { return {{"schema_version", 1}, {"probe", std::move(probe)}}; }

}  // namespace

TEST_CASE("validate") {
    const Run ok = cli("validate", squares(), "validate_ok");
    CHECK(ok.code == 0);
    CHECK(ok.report["command"] == "validate");
    CHECK(ok.report["schema_version"] == 1);
    CHECK(ok.report.contains("scenario_digest"));

    const Run bad = cli("validate", squares(-1.0), "validate_bad_q");
    CHECK(bad.code == 1);
    CHECK(bad.report.dump().find("Re q must be positive") != std::string::npos);

    const fs::path dir = workdir("validate_malformed");
    std::ofstream(dir / "broken.json") << "{\n  \"schema_version\": 1,\n  \"medium\": { \"kind\": \"nest\", }\n}\n";
    const std::string cmd = std::string(std::getenv("CONDSCAT_CLI")) + " validate --config " + (dir / "broken.json").string() +
                            " --out " + dir.string() + " 2>/dev/null";
    const int st = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(st) == 1);
    const json rep = json::parse(slurp(dir / "report.json"));
    CHECK(rep["error"].get<std::string>().find("line 3") != std::string::npos);

    json wrong = squares();
    wrong["schema_version"] = 7;
    CHECK(cli("validate", wrong, "validate_schema").code == 1);
    CHECK(cli("validate", json(), "validate_missing").code == 1);
}

TEST_CASE("forward outputs") {
    json zero = squares(1.0);
    zero["medium"]["layers"][0]["q"] = 1.0;
    zero["medium"]["layers"][0]["lambda"] = 0.0;
    zero["near_field"] = {{"x", {-2.0, 2.0}}, {"y", {-2.0, 2.0}}, {"n", {5, 4}}};
    const Run r = cli("forward", zero, "forward_zero");
    REQUIRE(r.code == 0);
    const auto ff = read_csv(r.dir / "farfield.csv");
    REQUIRE(ff.size() == 65);
    CHECK(ff[0] == std::vector<std::string>{"angle_rad", "re", "im"});
    for (size_t i = 1; i < ff.size(); ++i) CHECK(std::hypot(std::stod(ff[i][1]), std::stod(ff[i][2])) < 1e-10);
    const auto nf = read_csv(r.dir / "nearfield.csv");
    REQUIRE(nf.size() == 21);
    CHECK(nf[0] == std::vector<std::string>{"x", "y", "re", "im", "near_boundary"});
    for (size_t i = 1; i < nf.size(); ++i) {
        const double x = std::stod(nf[i][0]), y = std::stod(nf[i][1]);
        if (std::abs(std::abs(x) - 1.0) < 1e-12 && std::abs(y) <= 1.0) continue;  // on an interface
        const cplx u{std::stod(nf[i][2]), std::stod(nf[i][3])};
        CHECK(std::abs(u - std::exp(I * (0.6 * x + 0.8 * y))) < 1e-9);
    }
}

TEST_CASE("forward output is deterministic and refines") {
    const Run a = cli("forward", squares(), "forward_a");
    const Run b = cli("forward", squares(), "forward_b");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(slurp(a.dir / "farfield.csv") == slurp(b.dir / "farfield.csv"));
    CHECK(a.report["scenario_digest"] == b.report["scenario_digest"]);

    auto pattern = [](const fs::path& p) {
        FarFieldPattern f;
        const auto rows = read_csv(p);
        for (size_t i = 1; i < rows.size(); ++i) {
            f.angles.push_back(std::stod(rows[i][0]));
            f.values.emplace_back(std::stod(rows[i][1]), std::stod(rows[i][2]));
        }
        return f;
    };
    const Run c = cli("forward", squares(), "forward_2n", "--mesh-level 32");
    const Run d = cli("forward", squares(), "forward_4n", "--mesh-level 64");
    REQUIRE(c.code == 0);
    REQUIRE(d.code == 0);
    const double e1 = farfield_diff(pattern(d.dir / "farfield.csv"), pattern(a.dir / "farfield.csv"));
    const double e2 = farfield_diff(pattern(d.dir / "farfield.csv"), pattern(c.dir / "farfield.csv"));
    MESSAGE("n=16 vs 64: " << e1 << ", n=32 vs 64: " << e2);
    CHECK(e2 < 0.25 * e1);

    // CSV values round-trip exactly to the library result
    const harness::Scenario sc = harness::parse_scenario(squares());
    const auto solved = harness::solve_scenario(sc.medium, sc.incident, sc.mesh, sc.solve);
    const FarFieldPattern lib = far_field(*solved.mesh, sc.incident, solved.result, uniform_directions(64));
    const FarFieldPattern csv = pattern(a.dir / "farfield.csv");
    for (size_t i = 0; i < lib.values.size(); ++i) {
        CHECK(csv.angles[i] == lib.angles[i]);
        CHECK(csv.values[i] == lib.values[i]);
    }
}

TEST_CASE("configuration parsing") {
    const json doc = squares();
    const harness::MediumSpec m = harness::parse_medium(doc["medium"]);
    CHECK(m.polygons.size() == 2);
    CHECK(m.polygons[1][2].x == 0.5);
    CHECK(m.polygons[1][2].y == 0.5);
    CHECK(m.lambda[0] == cplx(0.0, 0.5));
    CHECK(harness::parse_complex(json(2.5), "x") == cplx(2.5));
    CHECK(harness::parse_complex(json::array({1.0, -2.0}), "x") == cplx(1.0, -2.0));
    CHECK_THROWS_AS(harness::parse_complex(json("a"), "x"), InputError);
    CHECK_THROWS_AS(harness::parse_complex(json::array({1.0, 2.0, 3.0}), "x"), InputError);
    const IncidentField pw = harness::parse_incident({{"kind", "plane_wave"}, {"angle", pi / 2}});
    CHECK(std::abs(pw.direction.x) < 1e-16);
    CHECK(pw.direction.y == doctest::Approx(1.0));
    const IncidentField ps = harness::parse_incident({{"kind", "point_source"}, {"location", {3, 1}}, {"amplitude", {0, 2}}});
    CHECK(ps.kind == IncidentField::Kind::point_source);
    CHECK(ps.amplitude == cplx(0, 2));
    CHECK_THROWS_AS(harness::parse_incident({{"kind", "laser"}}), InputError);
    CHECK_THROWS_AS(harness::parse_config_text("{\"schema_version\": 1,,}"), InputError);

    json cells = {{"kind", "cell"},
                  {"k", 1.0},
                  {"hull", {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}},
                  {"cells", {{{"vertices", {{-1, -1}, {0, -1}, {0, 1}, {-1, 1}}}, {"q", 2.0}},
                             {{"vertices", {{0, -1}, {1, -1}, {1, 1}, {0, 1}}}, {"q", {3.0, 0.1}}}}},
                  {"lambda_star", {0.0, 0.5}}};
    const harness::MediumSpec c = harness::parse_medium(cells);
    CHECK(c.kind == harness::MediumSpec::Kind::cell);
    CHECK(c.q[1] == cplx(3.0, 0.1));
    CHECK_NOTHROW(c.build());
}

TEST_CASE("stated tail bound in the default cgo-verify grid") {
    const Run r = cli("cgo-verify", json(), "cgo_default");
    CHECK(r.code == 0);
}

TEST_CASE("cgo-verify reports every check") {
    const Run r = cli("cgo-verify", json(), "cgo_rows");
    const auto rows = read_csv(r.dir / "cgo_verify.csv");
    REQUIRE(!rows.empty());
    CHECK(rows[0] == std::vector<std::string>{"check", "theta_m", "theta_M", "s", "h", "alpha", "lhs", "rhs", "margin",
                                              "pass", "tol"});
    std::map<std::string, std::pair<int, int>> tally;
    for (size_t i = 1; i < rows.size(); ++i) {
        auto& t = tally[rows[i][0]];
        ++t.first;
        t.second += rows[i][9] == "1" ? 1 : 0;
    }
    CHECK(tally["sector_identity"] == std::pair{9, 9});
    CHECK(tally["weighted_bound"] == std::pair{27, 27});
    CHECK(tally["tail_majorant"] == std::pair{27, 27});
    CHECK(tally["edge_identity"] == std::pair{27, 27});
    CHECK(tally["tail_bound"].first == 27);
    // only the tail estimate may fail, and the exit code must say so
    CHECK(r.code == (tally["tail_bound"].second == 27 ? 0 : 2));
    for (const auto& o : r.report["offenders"]) CHECK(o["check"] == "tail_bound");
}

TEST_CASE("cgo-verify negative control and rejected sectors") {
    const json corrupt = {{"schema_version", 1}, {"cgo_verify", {{"test_mode", "corrupt_constant"}}}};
    const Run r = cli("cgo-verify", corrupt, "cgo_corrupt");
    CHECK(r.code == 2);
    CHECK(r.report["checks"]["sector_identity"]["failed"] == 9);

    const json degenerate = {{"schema_version", 1}, {"cgo_verify", {{"sectors", {{-pi / 2, pi / 2}}}}}};
    const Run d = cli("cgo-verify", degenerate, "cgo_degenerate");
    CHECK(d.code == 1);
    CHECK(d.report["error"].get<std::string>().find("pi") != std::string::npos);
}

TEST_CASE("probe, manufactured mode") {
    const Run r = cli("probe",
                      probe_doc({{"mode", "manufactured"},
                                 {"eta", {{0.3, 0.1}, 0.0}},
                                 {"omega", {1.0, 1.0}},
                                 {"direction", {0.6, 0.8}}}),
                      "probe_manufactured");
    REQUIRE(r.code == 0);
    const auto rows = read_csv(r.dir / "probe.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"s", "re_eta", "im_eta", "re_omega", "im_omega", "residual"});
    CHECK(std::stod(rows[5][0]) == 800.0);
    const cplx eta{std::stod(rows[5][1]), std::stod(rows[5][2])};
    CHECK(std::abs(eta - cplx(0.3, 0.1)) < 0.02);

    const Run g = cli("probe", probe_doc({{"mode", "manufactured"}, {"eta", {0.2, 0.2}}}), "probe_grid",
                      "--s-grid 100,200,400");
    REQUIRE(g.code == 0);
    CHECK(read_csv(g.dir / "probe.csv").size() == 4);

    const Run z = cli("probe", probe_doc({{"mode", "manufactured"}, {"amplitude", 0.0}}), "probe_refuse");
    CHECK(z.code == 1);
    CHECK(z.report["error"].get<std::string>().find("not admissible") != std::string::npos);
}

TEST_CASE("probe, solver mode with identical media") {
    json doc = squares();
    doc["probe"] = {{"mode", "solver"}, {"compare", doc["medium"]}, {"polygon", 2}, {"vertex", 1}};
    const Run r = cli("probe", doc, "probe_identical");
    REQUIRE(r.code == 0);
    const auto rows = read_csv(r.dir / "probe.csv");
    REQUIRE(rows.size() == 6);
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::hypot(std::stod(rows[i][1]), std::stod(rows[i][2])) < 1e-8);
        CHECK(std::hypot(std::stod(rows[i][3]), std::stod(rows[i][4])) < 1e-8);
    }
}

TEST_CASE("sweep") {
    // the mesh difference at 16 nodes per edge swamps the 1e-3 perturbation
    const Run coarse = cli("sweep", squares(), "sweep_coarse");
    CHECK(coarse.code == 2);

    const Run r = cli("sweep", squares(), "sweep_default", "--mesh-level 64");
    REQUIRE(r.code == 0);
    const auto rows = read_csv(r.dir / "sweep.csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"target", "index", "magnitude", "farfield_diff", "noise_floor", "ratio", "tol"});
    const double floor = r.report["noise_floor"];
    for (size_t i = 1; i < rows.size(); ++i) {
        const double mag = std::stod(rows[i][2]), d = std::stod(rows[i][3]);
        CHECK(rows[i][0] == "q");
        CHECK(rows[i][6] == "1e-08");
        if (mag == 0.0)
            CHECK(d <= floor);
        else
            CHECK(d > 10.0 * floor);
    }
    CHECK(r.report["monotonicity_flags"].empty());

    json v = squares();
    v["sweep"] = {{"perturbations", {{{"target", "vertex"}, {"index", 2}, {"vertex", 1}, {"magnitudes", {0.05}}}}}};
    const Run vr = cli("sweep", v, "sweep_vertex");
    CHECK(vr.code == 0);

    json none = squares();
    none["incident"] = {{"kind", "none"}};
    CHECK(cli("sweep", none, "sweep_none").code == 1);
}

TEST_CASE("passive") {
    json doc = squares();
    doc["passive"] = {{"source", {3.0, 1.0}}, {"perturbations", {{{"target", "q"}, {"index", 2}, {"magnitudes", {0.1, 0.0}}}}}};
    const Run r = cli("passive", doc, "passive_ok");
    CHECK(r.code == 0);
    CHECK(fs::exists(r.dir / "passive.csv"));

    json inside = doc;
    inside["passive"]["source"] = {0.2, 0.1};
    CHECK(cli("passive", inside, "passive_inside").code == 1);
    json touching = doc;
    touching["passive"]["source"] = {1.0, 0.3};
    CHECK(cli("passive", touching, "passive_touching").code == 1);
}

TEST_CASE("command line") {
    CHECK(cli("bogus", json(), "cli_bogus").code == 1);
    CHECK(cli("forward", json(), "cli_noconfig").code == 1);
    CHECK(cli("probe", probe_doc({{"mode", "manufactured"}}), "cli_badgrid", "--s-grid 100,x").code == 1);
    const Run serial = cli("forward", squares(), "cli_serial", "--serial");
    const Run par = cli("forward", squares(), "cli_parallel");
    REQUIRE(serial.code == 0);
    CHECK(slurp(serial.dir / "farfield.csv") == slurp(par.dir / "farfield.csv"));
}
