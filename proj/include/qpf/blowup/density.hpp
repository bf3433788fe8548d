#pragma once
#include <vector>

#include "qpf/blowup/atlas.hpp"

namespace qpf::blowup {

enum class GShape { Linear, PowUp, PowDown };

// density = base + coef * g on [u0, u1]; g linear from g0 to g1, or (K (u - u0))^alpha,
// or (K (u1 - u))^alpha.
struct DensityPiece {
    double u0 = 0.0, u1 = 0.0;
    double base = 1.0, coef = 0.0;
    GShape shape = GShape::Linear;
    double g0 = 0.0, g1 = 0.0;
    double K = 0.0, alpha = 1.0;
    double g(double u) const;
    double density(double u) const { return base + coef * g(u); }
    double integral(double d) const;  // over [u0, u0 + d]
    double solve(double c) const;     // d with integral(d) = c
};

// Absolutely continuous fiber measure on the lifted domain [start, start + 1).
class FiberDensity {
public:
    double start = 0.0;
    std::vector<DensityPiece> pieces;
    std::vector<double> cum0;  // mass before each piece
    double total = 0.0;

    double density(double lifted) const;
    double cum(double lifted) const;  // nu[start, lifted], lifted in [start, start + 1]
    double inv(double c) const;       // inverse of cum on [0, total]
    // Lift of the cumulative function to the real line: C(u + 1) = C(u) + total.
    double cum_lift(double u) const;
    double inv_lift(double c) const;
    double mass(const Arc& a) const { return cum(a.hi) - cum(a.lo); }
    double min_density() const;
    double max_density() const;
    void finish();  // fills cum0/total after pieces are set
};

// h route: h = 1 - sum_{m=-N+1}^{N} (a_m - a_{m-1}) g_m / b_m.
// General route: density 1 off the atlas, a_{m-1} g_m / b_m on U_m and a_{-N} g_{-N} / b_{-N}
// on the bottom layer (fiber maps of the base preserve Lebesgue).
enum class DensityRoute { H, General };

FiberDensity build_density(const FiberAtlas& a, const BumpFamily& b, const WeightScheme& w, DensityRoute route);

}  // namespace qpf::blowup
