#pragma once
#include <vector>

#include "qpf/core/dynamics.hpp"
#include "qpf/curves/intervals.hpp"
#include "qpf/curves/plgraph.hpp"

namespace qpf::curves {

// Base map with exact rational data: (theta, x) -> (theta + omega, x + rho) or
// (theta + omega, x + phi(theta)) with phi piecewise linear of degree zero.
struct ExactBase {
    enum class Kind { Translation, SkewRotation };
    Kind kind = Kind::Translation;
    Q omega;
    Q rho;
    PLGraph phi;
    long max_depth = 256;

    // Fiber displacement of R^q starting at fiber theta.
    Q displacement(const Q& theta, long q) const;
    core::QpfSystem to_system() const;

    static ExactBase translation(const Q& omega, const Q& rho);
    static ExactBase skew_rotation(const Q& omega, PLGraph phi);
    static ExactBase default_translation();  // golden omega, silver rho, both to 1e-30
};

// R^n(Gamma); throws PreconditionError when |n| exceeds R.max_depth.
PLGraph image_curve(const ExactBase& R, const PLGraph& g, long n);

// Exact set of theta with g(theta) = h(theta) mod 1.
CircIntervalSet intersection_projection(const PLGraph& g, const PLGraph& h);

struct FlatReport {
    bool flat = true;
    CircIntervalSet components;
};
// Empty intersections count as flat.
FlatReport is_flat_intersection(const PLGraph& g, const PLGraph& h);

// h crosses from one side of g to the other somewhere over the arc.
bool crosses_over(const PLGraph& g, const PLGraph& h, const CircArc& arc);

// Sign of h - g (relative to the coinciding integer) just before and just after
// each component of intersection_projection(g, h): +1 above, -1 below.
struct ContactSides {
    int before = 0;
    int after = 0;
};
std::vector<ContactSides> contact_sides(const PLGraph& g, const PLGraph& h, const CircIntervalSet& set);

}  // namespace qpf::curves
