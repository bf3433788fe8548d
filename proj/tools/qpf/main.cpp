#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

int exit_code(qpf::ErrorKind k) {
    switch (k) {
        case qpf::ErrorKind::Config: return 2;
        case qpf::ErrorKind::Precondition: return 3;
        case qpf::ErrorKind::Invariant: return 4;
        case qpf::ErrorKind::Timeout: return 5;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasiperiodically forced circle maps: flat curves, blow-ups, minimal sets and cocycles"};
    app.require_subcommand(1, 1);

    std::string manifest, out, seed_text;
    unsigned threads = 0;
    long depth = 0;
    int grid = 0;
    bool svg = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--manifest", manifest, "Manifest file")->required();
        sub->add_option("--out", out, "Output directory (overrides [run] out)");
        sub->add_option("--seed", seed_text, "Seed (overrides [run] seed)");
        sub->add_option("--threads", threads, "Worker threads (overrides [run] threads)");
        sub->add_flag("--emit-svg", svg, "Also write SVG figures");
        sub->add_option("--depth", depth, "Flattening depth (overrides [curve] depth)");
        sub->add_option("--grid", grid, "Fiber and vertical grid size (overrides [grids])");
    };
    auto* curve = app.add_subcommand("curve", "Flatten a curve and write its certificate");
    auto* blow = app.add_subcommand("blowup", "Build the blow-up pipeline and run its audits");
    auto* analyze = app.add_subcommand("analyze", "Rotation, deviation and minimal-set reports");
    auto* cocycle = app.add_subcommand("cocycle", "Lyapunov exponent and fiber cardinality of a cocycle");
    for (auto* s : {curve, blow, analyze, cocycle}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        auto m = qpf::cli::load_manifest(manifest);
        if (!out.empty()) m.out = out;
        if (!seed_text.empty()) {
            std::size_t used = 0;
            unsigned long long s = 0;
            try {
                s = std::stoull(seed_text, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != seed_text.size()) throw qpf::ConfigError("--seed expects an unsigned integer");
            m.seed = s;
        }
        if (threads > 0) m.threads = threads;
        if (svg) m.emit_svg = true;
        if (depth > 0) m.depth = depth;
        if (grid > 0) {
            m.fibers = m.knots = grid;
            m.orbit_fibers = m.bins = static_cast<std::size_t>(grid);
            m.cocycle_fibers = m.cocycle_bins = static_cast<std::size_t>(grid);
        }
        if (*curve) return qpf::cli::cmd_curve(m);
        if (*blow) return qpf::cli::cmd_blowup(m);
        if (*analyze) return qpf::cli::cmd_analyze(m);
        return qpf::cli::cmd_cocycle(m);
    } catch (const qpf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
