#pragma once
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qpf {

// Failure categories; the CLI maps them to exit codes.
enum class ErrorKind { Config, Precondition, Invariant, Timeout };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), kind_(kind), name_(std::move(name)) {}
    ErrorKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

private:
    ErrorKind kind_;
    std::string name_;
};

#define QPF_ERROR(Name, Kind)                                                   \
    struct Name : Error {                                                       \
        explicit Name(const std::string& w) : Error(ErrorKind::Kind, #Name, w) {} \
    }

QPF_ERROR(ConfigError, Config);
QPF_ERROR(PreconditionError, Precondition);
QPF_ERROR(EscapeTimeout, Timeout);
QPF_ERROR(IntervalTooWide, Precondition);
QPF_ERROR(BoxNotFound, Invariant);
QPF_ERROR(LambdaNotFound, Invariant);
QPF_ERROR(SurgeryStalled, Invariant);
QPF_ERROR(OrbitSearchTimeout, Timeout);
QPF_ERROR(WeightsInvalid, Config);
QPF_ERROR(NotSameMeasure, Invariant);
QPF_ERROR(AtlasInvariantViolation, Invariant);
QPF_ERROR(CoverFailure, Invariant);
QPF_ERROR(BumpBoundViolation, Invariant);
QPF_ERROR(DensityNonpositive, Invariant);
QPF_ERROR(SupportGap, Invariant);
QPF_ERROR(EtaNotInvertible, Invariant);
QPF_ERROR(DegenerateTriple, Precondition);

#undef QPF_ERROR

inline double mod1(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

// Signed representative of x - y in [-1/2, 1/2).
inline double circ_diff(double x, double y) {
    double d = mod1(x - y);
    return d >= 0.5 ? d - 1.0 : d;
}

inline double circ_dist(double x, double y) { return std::fabs(circ_diff(x, y)); }

struct CircleAngle {
    double value = 0.0;
    CircleAngle() = default;
    explicit CircleAngle(double v) : value(mod1(v)) {}
    CircleAngle operator+(double d) const { return CircleAngle(value + d); }
    double dist(CircleAngle o) const { return circ_dist(value, o.value); }
};

// splitmix64; deterministic across platforms, unlike <random> distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::int64_t below(std::int64_t n) { return static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(n)); }

private:
    std::uint64_t s_;
};

}  // namespace qpf
