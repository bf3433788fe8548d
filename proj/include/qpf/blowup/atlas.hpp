#pragma once
#include <string>
#include <vector>

#include "qpf/blowup/measure.hpp"

namespace qpf::blowup {

struct Arc {
    double lo = 0.0, hi = 0.0;
    double len() const { return hi - lo; }
};

// Per fiber: disjoint open arcs U_n inside the plateau of Gamma_n (lifted domain
// coordinates), and the compact shrinkings V_n = {x in U_n : d(x, U_n^c) >= margin_n}.
struct FiberAtlas {
    int lo = 0, hi = -1;
    double start = 0.0;  // lifted domain starts here; U arcs lie in [start, start + 1]
    std::vector<std::vector<Arc>> U;
    std::vector<double> margin;

    const std::vector<Arc>& u(int n) const { return U[static_cast<std::size_t>(n - lo)]; }
    double leb(int n) const;
    double v_leb(int n) const;
    int components(int n) const { return static_cast<int>(u(n).size()); }
    // Index whose U contains the lifted point, or lo - 1 for none.
    int owner(double lifted) const;
};

// Free-coordinate allocation inside each plateau, members taken by allocation rank.
// Throws CoverFailure when eps <= 0 (V cannot be compact inside U then).
FiberAtlas build_fiber_atlas(const FiberMeasure& m, const MeasureSpec& spec, double eps);

struct AtlasAudit {
    long fibers = 0;
    double max_leb_error = 0.0;
    double min_v_ratio = 1e300;  // min Leb(V_n) / ((1 - eps) a_n)
    int max_components_excess = -1000;  // max of components - (2|n|+1)
    bool disjoint = true;
    bool inside_plateaus = true;
    std::string first_violation;
    bool ok(double leb_tol) const;
    void merge(const AtlasAudit& o);
};
AtlasAudit audit_fiber_atlas(const FiberAtlas& a, const FiberMeasure& m, const MeasureSpec& spec, double eps,
                             double leb_tol);

enum class BumpKind { Urysohn, Hoelder };

// g_n: min(1, d/margin) for Urysohn, min(1, (K d)^alpha) with K = (4|n|+2)/(eps a_n)
// for Hoelder, d the distance to the complement of U_n.
struct BumpFamily {
    BumpKind kind = BumpKind::Urysohn;
    double alpha = 1.0;
    double eps = 0.5;
    int lo = 0;
    std::vector<double> K;  // Hoelder scale, index n - lo
    std::vector<double> b;  // integrals b_n, index n - lo
    double value(const FiberAtlas& a, int n, double lifted) const;
    double integral(int n) const { return b[static_cast<std::size_t>(n - lo)]; }
    double holder_constant(int n) const;  // K^alpha
};
// Checks (1 - eps) a_n <= b_n <= a_n; throws BumpBoundViolation.
BumpFamily build_bumps(const FiberAtlas& a, const MeasureSpec& spec, BumpKind kind, double eps, double alpha);

}  // namespace qpf::blowup
