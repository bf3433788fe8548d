#pragma once
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qpf/common.hpp"

namespace qpf::core {

enum class SystemKind { Translation, SkewRotation, Sampled, CocycleInduced, BlowupBuilt };
std::string to_string(SystemKind k);

// Lift of one fiber map family. Implementations return the lift normalized
// so that apply(theta, 0) lies in [0,1).
class FiberMap {
public:
    virtual ~FiberMap() = default;
    virtual double apply(double theta, double x) const = 0;
    // Solves apply(theta, x) = y; bisection to 1e-13 unless overridden.
    virtual double inverse(double theta, double y) const;
    // n-fold composition starting at fiber theta; n >= 0.
    virtual double iterate(double theta, double omega, std::int64_t n, double x) const;
};

// Degree-zero periodic piecewise-linear function of theta, double precision.
struct PeriodicPL {
    std::vector<double> t;  // strictly increasing in [0,1)
    std::vector<double> v;
    double operator()(double theta) const;
    double sup_abs() const;
};

PeriodicPL tent_wave(double offset, double amplitude);  // offset + amplitude * (1 - |2t - 1|)

struct QpfSystem {
    double omega = 0.0;
    SystemKind kind = SystemKind::Sampled;
    std::shared_ptr<const FiberMap> fiber;
    // Parameters retained for exact consumers; only meaningful for the matching kind.
    double rho = 0.0;
    PeriodicPL phi;

    double lift(double theta, double x) const { return fiber->apply(theta, x); }
    double lift_inverse(double theta, double y) const { return fiber->inverse(theta, y); }
};

QpfSystem make_translation(double omega, double rho);
QpfSystem make_skew_rotation(double omega, PeriodicPL phi);
QpfSystem make_system(double omega, SystemKind kind, std::shared_ptr<const FiberMap> fiber);

inline constexpr double kGoldenOmega = 0.6180339887498948482;  // (sqrt5 - 1)/2
inline constexpr double kSilverRho = 0.41421356237309504880;   // sqrt2 - 1

// Fiber maps tabulated on a theta grid, linear in theta and in x.
// values[i] holds lift values at x_j = j/knots, j = 0..knots, for theta_i = i/fibers.
class TableFiberMap : public FiberMap {
public:
    TableFiberMap(std::size_t fibers, std::size_t knots, std::vector<double> values);
    double apply(double theta, double x) const override;
    std::size_t fibers() const { return fibers_; }
    std::size_t knots() const { return knots_; }

private:
    double at_fiber(std::size_t i, double x) const;
    std::size_t fibers_, knots_;
    std::vector<double> values_;
};

// F^n_theta(x); negative n uses inverse fiber maps.
double compose_fiber(const QpfSystem& sys, double theta, std::int64_t n, double x);

struct RotationEstimate {
    double rho = 0.0;
    double cauchy_gap = 0.0;  // |estimate(N) - estimate(N/2)|
};
RotationEstimate rotation_number(const QpfSystem& sys, double theta0, double x0, std::int64_t N);

struct DeviationTrace {
    double rho_estimate = 0.0;
    std::vector<double> devs;        // D_1..D_N
    std::vector<double> sup_growth;  // running sup |D_n|
};
DeviationTrace deviations(const QpfSystem& sys, double theta, double x, std::int64_t N, double rho);

enum class Boundedness { BoundedSuspected, UnboundedSuspected };
std::string to_string(Boundedness b);

struct BoundednessReport {
    Boundedness verdict = Boundedness::BoundedSuspected;
    double rho = 0.0;
    double sup_full = 0.0;  // max over samples of sup_{n<=N} |D_n|
    double sup_half = 0.0;  // same for n <= N/2
    double ratio = 1.0;
    double threshold = 1.5;
    std::vector<double> growth;  // max over samples of running sup, per n
};

// Heuristic only: compares deviation growth between N/2 and N.
BoundednessReport classify_rho_boundedness(const QpfSystem& sys, std::int64_t N, int fiber_samples,
                                           double threshold = 1.5);

// Largest circular jump of theta -> F_theta(x) between adjacent grid fibers.
double continuity_modulus(const QpfSystem& sys, std::size_t fibers, std::size_t knots);

}  // namespace qpf::core
