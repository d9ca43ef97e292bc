#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "condscat/corner_probe.hpp"
#include "condscat/forward.hpp"

namespace condscat::harness {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

// editable description of a medium; build() validates
struct MediumSpec {
    enum class Kind { nest, cell };
    Kind kind = Kind::nest;
    double k = 1.0;
    std::vector<std::vector<Vec2>> polygons;  // nest layers outermost first, or cells
    std::vector<Vec2> hull;                   // cell partitions only
    std::vector<cplx> q;
    std::vector<cplx> lambda;  // nest: one per layer boundary
    cplx lambda_star{};        // cell: every interface

    Medium build() const;
};

struct Scenario {
    MediumSpec spec;
    Medium medium;
    IncidentField incident;
    MeshSpec mesh;
    SolveOptions solve;
    int directions = 256;
    json doc;  // whole document; command sections are read from here
};

// InputError carrying the line and column of a syntax error
json parse_config_text(const std::string& text);
json load_config(const std::string& path);

cplx parse_complex(const json& node, const std::string& where);
MediumSpec parse_medium(const json& node, const std::string& where = "medium");
IncidentField parse_incident(const json& node, const std::string& where = "incident");
Scenario parse_scenario(const json& doc);

struct RunOptions {
    std::string out_dir = ".";
    int mesh_level = 0;          // > 0 overrides nodes per edge
    std::vector<double> s_grid;  // empty keeps the command default
    double tol = 0.0;            // > 0 overrides the command tolerance
    Exec exec = Exec::parallel;
};

struct CommandResult {
    int exit_code = 0;  // 0 pass, 1 validation or refusal, 2 numerical failure
    json report;
};

CommandResult cmd_validate(const json& doc, const RunOptions& opt);
CommandResult cmd_forward(const json& doc, const RunOptions& opt);
CommandResult cmd_cgo_verify(const json& doc, const RunOptions& opt);
CommandResult cmd_sweep(const json& doc, const RunOptions& opt);
CommandResult cmd_probe(const json& doc, const RunOptions& opt);
CommandResult cmd_passive(const json& doc, const RunOptions& opt);

// loads the config, dispatches, maps exceptions to exit codes and writes report.json
int run(const std::string& command, const std::string& config_path, const RunOptions& opt, std::ostream& log);

// vertex probing on a solved scenario
struct VertexSite {
    size_t polygon = 0;  // index into MediumSpec::polygons
    size_t vertex = 0;
    CornerSector sector;
};
std::vector<VertexSite> vertex_sites(const MediumSpec& spec);

struct SolvedScenario {
    std::shared_ptr<const BoundaryMesh> mesh;
    IncidentField incident;
    SolveResult result;

    cplx field(Vec2 x) const;
    FieldSample sample(Vec2 x) const;
};
SolvedScenario solve_scenario(const Medium& m, const IncidentField& inc, const MeshSpec& mesh,
                              const SolveOptions& opts);

// tau <= 0 uses the default threshold
probe::AdmissibilityReport check_admissibility(const SolvedScenario& s, const MediumSpec& spec, double tau = 0.0);

void write_farfield_csv(const std::string& path, const FarFieldPattern& p);

}  // namespace condscat::harness
