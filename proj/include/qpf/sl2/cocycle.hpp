#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qpf/core/dynamics.hpp"

namespace qpf::sl2 {

struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;
    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

Mat2 rotation_matrix(double phi);  // rotates vectors by pi * phi
Mat2 diagonal_matrix(double lambda);

// Lines through the origin in the chart x = (direction angle)/pi mod 1.
// Lift of the action, continuous in x, with x + lift_offset in (x - 1, x + 1).
double projective_lift(const Mat2& A, double x);
double projective_action(const Mat2& A, double x);

enum class Family { Constant, Rotation, Diagonal, Harper };
std::string to_string(Family f);
Family family_from_string(const std::string& s);  // ConfigError on unknown names

struct Cocycle {
    double omega = core::kGoldenOmega;
    Family family = Family::Constant;
    Mat2 constant;       // Constant
    double phi = 0.0;    // Rotation
    double lambda = 2.0; // Diagonal, Harper coupling
    double energy = 0.0; // Harper
    Mat2 at(double theta) const;
};

Cocycle constant_cocycle(const Mat2& A, double omega = core::kGoldenOmega);
Cocycle rotation_cocycle(double phi, double omega = core::kGoldenOmega);
Cocycle diagonal_cocycle(double lambda, double omega = core::kGoldenOmega);
Cocycle harper_cocycle(double energy, double lambda, double omega = core::kGoldenOmega);

core::QpfSystem cocycle_qpf(const Cocycle& c);

struct LyapunovReport {
    double exponent = 0.0;   // (1/N) log |A^N_theta0|
    double det_drift = 0.0;  // |sum of log det of the triangular factors|
};
// Requires N >= 1000; QR-orthonormalizes each step and rescales every 32.
LyapunovReport lyapunov(const Cocycle& c, std::int64_t N, double theta0);

enum class Verdict { WholeTorus, GraphLike, OnePoint, TwoPoint, Inconclusive };
std::string to_string(Verdict v);

struct CardinalityOptions {
    std::size_t fibers = 512, bins = 4096;
    std::int64_t burnin = 10000, iters = 2000000;
    std::uint64_t seed = 1;
    std::size_t cluster_tol = 8;   // bins; gaps at most this wide do not split clusters
    double generic_fraction = 0.9; // share of fibers the modal count must reach
    double full_fraction = 0.9;    // share of gap-free fibers for the whole-torus verdict
    double jump_tol = 0.125;       // largest cluster-centre jump between adjacent fibers for a graph
    unsigned threads = 1;
};

struct CardinalityReport {
    std::map<int, long> histogram;  // cluster count -> fibers; 0 marks gap-free fibers
    long sampled = 0;               // nonempty fibers
    int modal = 0;
    double modal_fraction = 0.0;
    double full_fraction = 0.0;
    double max_centre_jump = 0.0;   // single-cluster fibers only
    std::size_t cluster_tol = 0;
    Verdict verdict = Verdict::Inconclusive;
    bool flagged = false;           // one-point verdicts are not expected for linear examples
    double fraction_with(int count) const;
};
CardinalityReport minimal_fiber_cardinality(const Cocycle& c, const CardinalityOptions& opt = {});

struct TripleMap {
    Mat2 A;
    double residual = 0.0;
};
// Unimodular matrix whose projective action sends (a, z, b) to (a2, z2, b2).
// Both triples must be strictly cyclically ordered; DegenerateTriple otherwise.
TripleMap triple_map(double a, double z, double b, double a2, double z2, double b2);

}  // namespace qpf::sl2
