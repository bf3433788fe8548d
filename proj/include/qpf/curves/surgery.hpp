#pragma once
#include <map>
#include <string>
#include <vector>

#include "qpf/curves/geometry.hpp"

namespace qpf::curves {

struct Point {
    Q theta;
    Q x;
};

struct Itinerary {
    std::vector<long> times;  // sorted, contains 0
    long first() const { return times.front(); }
    long last() const { return times.back(); }
    long r() const;
    long s() const;
    long length() const { return r() + s(); }
    bool contains(long k) const;
    bool operator==(const Itinerary& o) const { return times == o.times; }
};

// Lazily computed images R^k(Gamma) of one fixed curve.
class CurveOrbit {
public:
    CurveOrbit(const ExactBase& R, const PLGraph& g) : R_(R), g_(g) {}
    const PLGraph& image(long k);
    const PLGraph& curve() const { return g_; }

private:
    const ExactBase& R_;
    const PLGraph& g_;
    std::map<long, PLGraph> cache_;
};

Itinerary itinerary_of_point(const ExactBase& R, const PLGraph& g, const Point& z, long n, long horizon);
Itinerary itinerary_of_interval(const ExactBase& R, const PLGraph& g, const CircArc& I, long n, long horizon);

struct PerturbationBox {
    Q theta, delta;  // I = [theta, theta + delta]
    Q x, eta;        // J = [x - eta, x + eta]
    Itinerary itinerary;
    long depth = 1;
    CircArc I() const { return CircArc{frac_q(theta), delta}; }
    long window_lo() const { return itinerary.first() - depth; }
    long window_hi() const { return itinerary.last() + depth; }
};

struct BoxCheck {
    bool ok = true;
    std::string reason;
};
BoxCheck validate_box(const ExactBase& R, const PLGraph& g, const PerturbationBox& box, long horizon = 100000);

Q resolution_floor();  // 1e-9

PerturbationBox find_perturbation_box(const ExactBase& R, const PLGraph& g, const Point& z, long n,
                                      const Q& delta_max, const Q& eta_max, long horizon = 100000);

struct PerturbationResult {
    PLGraph curve;
    Q lambda;
    std::vector<CircArc> modified;  // arcs I + q_i omega
};
PerturbationResult apply_perturbation(const ExactBase& R, const PLGraph& g, const PerturbationBox& box,
                                      const std::vector<Point>& through = {});

// eps0 * 2^-n, held at eps_min once it gets there so that deep steps stay above
// the box resolution floor (eps0 * 2^-27 is already below 1e-9).
struct EpsSchedule {
    Q eps0 = Q(1, 10);
    Q eps_min = Q(1, 1000000);
    Q at(long n) const;
};

struct CrossingRequest {
    CircArc I, J;
    long at_depth = 1;
};

struct CrossingResult {
    PLGraph curve;
    long m = 0;
    PerturbationBox box_i, box_j;
    Point w;
};
CrossingResult ensure_crossing(const ExactBase& R, const PLGraph& g, const CircArc& I, const CircArc& J,
                               const Q& eps, long depth, long orbit_bound, long horizon = 100000);

struct CrossingWitness {
    CircArc I, J;
    long m = 0;
    bool verified = false;
};

struct FlattenOptions {
    EpsSchedule eps;
    long max_depth = 64;
    long horizon = 100000;
    long orbit_bound = 10000;
    std::vector<CrossingRequest> crossings;
};

struct FlattenResult {
    PLGraph curve;
    std::vector<std::string> certificate;  // JSON lines
    std::vector<CircIntervalSet> components;  // index k-1 holds p1(Gamma cap R^k Gamma)
    std::vector<CrossingWitness> crossings;
    long surgeries = 0;
};
FlattenResult flatten_to_depth(const ExactBase& R, const PLGraph& g0, long N, const FlattenOptions& opt = {});

// Recomputes every p1(Gamma cap R^k Gamma), 1 <= k <= N, and checks flatness and the recorded
// component sets and crossing witnesses of a certificate.
bool validate_certificate(const ExactBase& R, const PLGraph& g, const std::vector<std::string>& certificate,
                          std::string* why = nullptr);

struct EscapeReport {
    bool escaping = false;
    bool inconclusive = false;
    long max_escape_time = 0;
    long samples = 0;
};
EscapeReport check_escaping(const ExactBase& R, const PLGraph& g, long n, long horizon, int samples = 32);

}  // namespace qpf::curves
