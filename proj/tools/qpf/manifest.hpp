#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "qpf/blowup/weights.hpp"
#include "qpf/curves/geometry.hpp"
#include "qpf/curves/surgery.hpp"
#include "qpf/sl2/cocycle.hpp"

namespace qpf::cli {

// Sectioned key=value configuration. Every key is validated on load; unknown
// sections or keys raise ConfigError before any computation starts.
struct Manifest {
    // [base]
    std::string base_kind = "translation";  // translation | skew
    std::string omega = "golden";           // golden | silver | rational
    std::string rho = "silver";
    std::string phi_offset = "1/4", phi_amplitude = "1/10";  // skew: tent cocycle

    // [curve]
    std::string curve_shape = "tent";  // tent | constant
    std::string curve_offset = "1/10", curve_amplitude = "1/20";
    long depth = 16;
    std::vector<curves::CrossingRequest> crossings;
    std::string curve_source = "flatten";  // flatten | file
    std::string curve_file, certificate_file;
    bool waive = false;

    // [weights]
    std::string weight_mode = "quadratic";  // quadratic | hoelder
    int k = 4, N = 8;
    double eps = 0.5, alpha = 0.0, s = 0.0;
    std::string bumps = "urysohn";  // urysohn | hoelder
    double hoelder_alpha = 1.0 / 3.0;
    std::vector<int> sweep;

    // [grids]
    int fibers = 4096, knots = 4096, table_knots = 256, audit_fibers = 64;
    std::size_t orbit_fibers = 4096, bins = 4096;

    // [run]
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out = "qpf-out";
    std::string target = "blowup";  // analyze: translation | skew | blowup | cocycle
    std::int64_t rotation_iters = 100000, burnin = 100000, iters = 10000000, lyapunov_steps = 1000000;
    std::int64_t projection_samples = 100000;
    int deviation_samples = 16;
    long probe_n_max = 64;
    std::size_t cluster_tol = 8;
    bool emit_svg = false;

    // [cocycle]
    sl2::Family family = sl2::Family::Constant;
    double lambda = 2.0, energy = 0.0, phi = 0.5;
    double ma = 1.0, mb = 0.0, mc = 0.0, md = 1.0;  // constant matrix
    std::string cocycle_omega = "golden";
    std::size_t cocycle_fibers = 512, cocycle_bins = 4096;
    std::int64_t cocycle_iters = 2000000, cocycle_burnin = 10000;

    curves::ExactBase base() const;
    curves::PLGraph initial_curve() const;
    blowup::WeightScheme weights(int n_override = 0) const;
    sl2::Cocycle cocycle() const;
    double omega_value() const;
};

Manifest load_manifest(const std::string& path);
Manifest parse_manifest(const std::string& text);

}  // namespace qpf::cli
