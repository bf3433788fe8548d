#pragma once
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qpf/blowup/weights.hpp"
#include "qpf/curves/geometry.hpp"

namespace qpf::blowup {

using curves::PLGraph;
using curves::Q;

// Curves Gamma_n, lo <= n <= hi, with exact pairwise overlap data.
class CurveFamily {
public:
    // Gamma_n = R^n(gamma) for -N <= n <= N+1. The flatness certificate must validate
    // to depth >= 2N unless waived; a missing certificate without waiver is a
    // PreconditionError.
    static CurveFamily orbit(const curves::ExactBase& R, const PLGraph& gamma, int N,
                             const std::vector<std::string>* certificate, bool waive = false);
    // Arbitrary curves indexed lo, lo+1, ...; pairwise intersections must be flat unless waived.
    static CurveFamily explicit_curves(int lo, std::vector<PLGraph> curves, bool waive = false);

    int lo() const { return lo_; }
    int hi() const { return lo_ + static_cast<int>(curves_.size()) - 1; }
    const PLGraph& curve(int n) const { return curves_.at(static_cast<std::size_t>(n - lo_)); }
    bool waived() const { return waived_; }
    // Fraction of curve j lying below curve i at theta, for curves coinciding there.
    // Moves linearly along each overlap arc between the sides the curves arrive from.
    double below_fraction(int i, int j, const Q& theta) const;
    // p1(Gamma_i cap Gamma_j).
    const curves::CircIntervalSet& overlap(int i, int j) const;

private:
    struct PairData {
        curves::CircIntervalSet X;
        std::vector<std::pair<curves::CircArc, curves::ContactSides>> arcs;  // Gamma_j relative to Gamma_i
    };
    const PairData& pair(int i, int j) const;  // i < j
    int lo_ = 0;
    std::vector<PLGraph> curves_;
    std::map<std::pair<int, int>, PairData> pairs_;
    bool waived_ = false;
};

// Which curves carry atoms, with what mass, and which one sits at height zero.
struct MeasureSpec {
    int lo = 0, hi = -1, anchor = 0;
    std::vector<double> mass;  // mass[n - lo]
    double beta = 1.0;
    double at(int n) const { return mass[static_cast<std::size_t>(n - lo)]; }
};
MeasureSpec window_spec(const WeightScheme& w, int anchor = 0);  // a_n on Gamma_n, |n| <= N
// R_* of the infinite measure restricted to the window image: a_{n-1} on Gamma_n, -N < n <= N+1.
MeasureSpec pushed_spec(const WeightScheme& w, int anchor = 1);

// Order in which curves of one plateau receive their allocation: 0, 1, -1, 2, -2, ...
inline int allocation_rank(int n) { return n > 0 ? 2 * n - 1 : -2 * n; }

struct AtomGroup {
    double pos = 0.0;         // height above the anchor curve, in [0,1); 0 for the anchor group
    double lo = 0.0, hi = 0.0;  // plateau in the lifted domain coordinate
    std::vector<int> members;  // by allocation rank
    std::vector<double> below;  // below[i*m + j]: fraction of member j below member i
    bool interpolated = false;  // some pair sits strictly inside an overlap arc
    double mass() const { return hi - lo; }
};

// One fiber of mu = beta Leb + sum a_n delta_{Gamma_n}, classified exactly, with its
// quantile projection. Domain points use the lifted coordinate u in [-top, 1 - top).
class FiberMeasure {
public:
    Q theta;
    double theta_d = 0.0;
    double anchor_pos = 0.0;  // gamma_anchor(theta) mod 1
    double beta = 1.0;
    double bottom = 0.0, top = 0.0;  // anchor plateau is [-top, bottom]
    std::vector<AtomGroup> groups;   // groups[0] is the anchor group; then increasing pos

    double lift_domain(double x) const;  // circle point -> lifted coordinate
    // mu_theta[anchor, anchor + y], y in [0,1), the anchor atom counted at 0.
    double cdf(double y) const;
    double quantile(double u) const;  // lifted u -> height in [0,1]
    double project(double x) const;   // pi_theta(x) on the circle
    // pi^{-1}(y) as a lifted arc; degenerate when y carries no atom.
    std::pair<double, double> preimage(double y) const;
    const AtomGroup* group_of(int n) const;
    double lower_of(int n) const { return group_of(n)->lo; }
    int interpolated_groups() const;
    std::size_t atoms() const;

private:
    friend FiberMeasure build_fiber_measure(const class CurveFamily&, const MeasureSpec&, const Q&);
    std::vector<double> ku_, ky_;  // quantile knots
};

FiberMeasure build_fiber_measure(const CurveFamily& fam, const MeasureSpec& spec, const Q& theta);

}  // namespace qpf::blowup

namespace qpf::blowup {

struct ConjugatingRotation {
    std::vector<double> alpha;  // per fiber, signed in [-1/2, 1/2)
    double residual = 0.0;
};
// alpha with pi_theta(x) = pi2_theta(x + alpha(theta)) on matching fibers; throws NotSameMeasure
// when the sampled residual exceeds tol.
ConjugatingRotation find_conjugating_rotation(const std::vector<FiberMeasure>& pi,
                                              const std::vector<FiberMeasure>& pi2, double tol = 1e-9,
                                              int samples = 257);

}  // namespace qpf::blowup
