#pragma once
#include <cstdint>
#include <vector>

#include "qpf/blowup/pipeline.hpp"
#include "qpf/curves/surgery.hpp"

namespace qpf::blowup {

// Atlas invariants on every fiber of both grids.
AtlasAudit audit_atlas(const Pipeline& p, double leb_tol = 1e-9);

struct DensityReport {
    long fibers = 0;
    double h_floor = 0.0;         // 1 - ratio, from the weights
    double min_h_grid = 1e300;    // over G1 x vertical grid
    double min_h_pieces = 1e300;  // exact minimum of the piecewise formula
    double max_layer_error = 0.0;       // |int_{U_m} h - a_{m-1}|, closed form
    double max_layer_error_grid = 0.0;  // same with the grid interpolant of h
    double max_mass_error = 0.0;        // |int h - 1|
};
DensityReport density_report(const Pipeline& p);

struct ResidualReport {
    double cell = 0.0;
    double bound = 0.0;  // a_N / beta + 4 cells
    double sup = 0.0;    // pi(f(x)) vs pi(x) + rho
    double shifted_sup = 0.0;  // pi'(f(x)) vs pi(x) + rho, pi' from the pushed measure
    double atom_image_error = 0.0;  // f(pi^{-1}(z)) vs pi'^{-1}(R z), plateau ends
    std::vector<double> per_fiber, shifted_per_fiber;
};
ResidualReport verify_semiconjugacy(const Pipeline& p);

// ||pi_* nu - R_* mu|| (sum of atom mass differences) per G1 fiber.
struct TvReport {
    double expected = 0.0;  // a_{-N} + a_N
    double generic_fraction = 0.0;
    double max_generic_deviation = 0.0;
    std::vector<double> per_fiber;
};
TvReport total_variation_law(const Pipeline& p);

struct ProjectionAudit {
    int fibers = 0;
    long samples = 0;
    double max_ks = 0.0;
    double max_atom_width_error = 0.0;
};
// Stratified uniform samples pushed through pi_theta on evenly spaced G0 fibers.
ProjectionAudit audit_projection(const Pipeline& p, int fibers = 64, long samples = 100000, std::uint64_t seed = 1);

struct TransportReport {
    int fibers = 0;
    double max_ks = 0.0;          // f_theta(uniform) vs nu_{theta+omega}
    double max_pair_error = 0.0;  // |nu[f x1, f x2] - (x2 - x1)|
    double f_graph_error = 0.0;   // |f(phi0^-) - phi1^-|
};
TransportReport transport_check(const Pipeline& p, int fibers = 16, long samples = 100000, int pairs = 1000,
                                std::uint64_t seed = 2);

struct NuCompare {
    int fibers = 0;
    double max_layer_diff = 0.0;      // nu_h(U_m) vs nu_general(U_m)
    double max_cdf_diff_off_atlas = 0.0;  // cumulative masses at grid points outside the atlas
    double min_general_density = 1e300;
};
NuCompare compare_nu_routes(const Pipeline& p, int stride = 16);

struct ProbePair {
    double theta_u = 0.0, theta_v = 0.0;
    Arc x_u, x_v;  // circle coordinates, lo < hi (hi may exceed 1)
    long m = 0;    // certified crossing time, 0 when uncertified
    long hit = -1;
};
// Smallest n <= n_max with f^n(sample of U) in V, U and V thin rectangles around the
// given fibers (half-width cell_frac / fibers); -1 when nothing is found.
long probe_hitting_time(const Pipeline& p, const ProbePair& pr, long n_max, int samples = 16, double cell_frac = 0.5);

struct NonminimalityReport {
    double annulus_lo = 0.0, annulus_hi = 0.0;
    double required = 0.0;  // a_0
    bool witness = false;
    std::vector<ProbePair> pairs;
    int found = 0, inconclusive = 0;
    double found_fraction = 0.0;
};
NonminimalityReport verify_nonminimality(const Pipeline& p, const std::vector<curves::CrossingWitness>& witnesses,
                                         long n_max = 64);

struct HoelderReport {
    double max_constant = 0.0;        // max_n ((4|n|+2)/(eps a_n))^alpha
    double max_quotient_ratio = 0.0;  // observed |g(x)-g(y)|/|x-y|^alpha over the per-term constant
};
HoelderReport hoelder_report(const Pipeline& p, int fibers = 32);

}  // namespace qpf::blowup
