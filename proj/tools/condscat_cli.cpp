#include <CLI11.hpp>
#include <iostream>

#include "condscat/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Polygonal conductive-medium scattering experiments"};
    app.require_subcommand(1, 1);

    std::string config, out = ".";
    int mesh_level = 0;
    std::vector<double> s_grid;
    double tol = 0.0;
    bool serial = false;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"validate", "check geometry and medium of a scenario"},
        {"forward", "solve a scattering scenario and write its far-field pattern"},
        {"cgo-verify", "check the CGO sector identities and bounds"},
        {"sweep", "far-field discrepancy under medium perturbations"},
        {"probe", "recover conductive and potential differences at a corner"},
        {"passive", "sweep driven by a point source"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "scenario JSON");
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--mesh-level", mesh_level, "nodes per edge (overrides the config)");
        sub->add_option("--s-grid", s_grid, "probe parameters s")->delimiter(',');
        sub->add_option("--tol", tol, "command tolerance (overrides the default)");
        sub->add_flag("--serial", serial, "use the serial reference kernels");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    condscat::harness::RunOptions opt;
    opt.out_dir = out;
    opt.mesh_level = mesh_level;
    opt.s_grid = s_grid;
    opt.tol = tol;
    opt.exec = serial ? condscat::Exec::serial : condscat::Exec::parallel;
    return condscat::harness::run(app.get_subcommands().front()->get_name(), config, opt, std::cerr);
}
