#include "qpf/core/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace qpf::core {

std::string to_string(SystemKind k) {
    switch (k) {
        case SystemKind::Translation: return "translation";
        case SystemKind::SkewRotation: return "skew-rotation";
        case SystemKind::Sampled: return "sampled";
        case SystemKind::CocycleInduced: return "cocycle-induced";
        case SystemKind::BlowupBuilt: return "blowup-built";
    }
    return "?";
}

std::string to_string(Boundedness b) {
    return b == Boundedness::BoundedSuspected ? "bounded-suspected" : "unbounded-suspected";
}

double FiberMap::inverse(double theta, double y) const {
    double f0 = apply(theta, 0.0);
    double lo = std::floor(y - f0), hi = lo + 1.0;
    // apply(lo) <= y < apply(hi) by monotonicity and degree one
    while (hi - lo > 1e-13 * std::max(1.0, std::fabs(lo))) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (apply(theta, mid) <= y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double FiberMap::iterate(double theta, double omega, std::int64_t n, double x) const {
    for (std::int64_t k = 0; k < n; ++k) x = apply(mod1(theta + static_cast<double>(k) * omega), x);
    return x;
}

double PeriodicPL::operator()(double theta) const {
    if (t.size() == 1) return v[0];
    double s = mod1(theta);
    auto it = std::upper_bound(t.begin(), t.end(), s);
    double t0, v0, t1, v1;
    if (it == t.begin()) {
        t0 = t.back() - 1.0, v0 = v.back(), t1 = t.front(), v1 = v.front();
    } else if (it == t.end()) {
        t0 = t.back(), v0 = v.back(), t1 = t.front() + 1.0, v1 = v.front();
    } else {
        std::size_t j = static_cast<std::size_t>(it - t.begin());
        t0 = t[j - 1], v0 = v[j - 1], t1 = t[j], v1 = v[j];
    }
    return v0 + (v1 - v0) * (s - t0) / (t1 - t0);
}

double PeriodicPL::sup_abs() const {
    double m = 0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

PeriodicPL tent_wave(double offset, double amplitude) {
    return PeriodicPL{{0.0, 0.5}, {offset, offset + amplitude}};
}

namespace {

class TranslationMap : public FiberMap {
public:
    explicit TranslationMap(double rho) : rho_(mod1(rho)) {}
    double apply(double, double x) const override { return x + rho_; }
    double inverse(double, double y) const override { return y - rho_; }
    double iterate(double, double, std::int64_t n, double x) const override {
        return x + static_cast<double>(n) * rho_;
    }

private:
    double rho_;
};

class SkewRotationMap : public FiberMap {
public:
    explicit SkewRotationMap(PeriodicPL phi) : phi_(std::move(phi)) {}
    double apply(double theta, double x) const override { return x + mod1(phi_(theta)); }
    double inverse(double theta, double y) const override { return y - mod1(phi_(theta)); }

private:
    PeriodicPL phi_;
};

}  // namespace

QpfSystem make_translation(double omega, double rho) {
    QpfSystem s;
    s.omega = omega;
    s.kind = SystemKind::Translation;
    s.rho = rho;
    s.fiber = std::make_shared<TranslationMap>(rho);
    return s;
}

QpfSystem make_skew_rotation(double omega, PeriodicPL phi) {
    QpfSystem s;
    s.omega = omega;
    s.kind = SystemKind::SkewRotation;
    s.phi = phi;
    s.fiber = std::make_shared<SkewRotationMap>(std::move(phi));
    return s;
}

QpfSystem make_system(double omega, SystemKind kind, std::shared_ptr<const FiberMap> fiber) {
    QpfSystem s;
    s.omega = omega;
    s.kind = kind;
    s.fiber = std::move(fiber);
    return s;
}

TableFiberMap::TableFiberMap(std::size_t fibers, std::size_t knots, std::vector<double> values)
    : fibers_(fibers), knots_(knots), values_(std::move(values)) {
    if (values_.size() != fibers_ * (knots_ + 1)) throw PreconditionError("table size mismatch");
    for (std::size_t i = 0; i < fibers_; ++i) {
        double* row = values_.data() + i * (knots_ + 1);
        double shift = std::floor(row[0]);
        for (std::size_t j = 0; j <= knots_; ++j) row[j] -= shift;
    }
}

double TableFiberMap::at_fiber(std::size_t i, double x) const {
    const double* row = values_.data() + i * (knots_ + 1);
    double k = std::floor(x);
    double u = (x - k) * static_cast<double>(knots_);
    std::size_t j = std::min(static_cast<std::size_t>(u), knots_ - 1);
    double w = u - static_cast<double>(j);
    return row[j] + (row[j + 1] - row[j]) * w + k;
}

double TableFiberMap::apply(double theta, double x) const {
    double t = mod1(theta) * static_cast<double>(fibers_);
    std::size_t i = std::min(static_cast<std::size_t>(t), fibers_ - 1);
    double w = t - static_cast<double>(i);
    double a = at_fiber(i, x);
    if (w == 0.0) return a;
    return (1.0 - w) * a + w * at_fiber((i + 1) % fibers_, x);
}

double compose_fiber(const QpfSystem& sys, double theta, std::int64_t n, double x) {
    if (n >= 0) return sys.fiber->iterate(mod1(theta), sys.omega, n, x);
    for (std::int64_t k = 1; k <= -n; ++k)
        x = sys.fiber->inverse(mod1(theta - static_cast<double>(k) * sys.omega), x);
    return x;
}

RotationEstimate rotation_number(const QpfSystem& sys, double theta0, double x0, std::int64_t N) {
    if (N < 1) throw PreconditionError("rotation_number needs N >= 1");
    std::int64_t half = N / 2;
    double xh = compose_fiber(sys, theta0, half, x0);
    double xf = compose_fiber(sys, theta0 + static_cast<double>(half) * sys.omega, N - half, xh);
    RotationEstimate r;
    r.rho = (xf - x0) / static_cast<double>(N);
    if (half > 0) r.cauchy_gap = std::fabs(r.rho - (xh - x0) / static_cast<double>(half));
    return r;
}

DeviationTrace deviations(const QpfSystem& sys, double theta, double x, std::int64_t N, double rho) {
    DeviationTrace tr;
    tr.rho_estimate = rho;
    tr.devs.reserve(static_cast<std::size_t>(N));
    tr.sup_growth.reserve(static_cast<std::size_t>(N));
    double cur = x, sup = 0.0;
    for (std::int64_t n = 1; n <= N; ++n) {
        if (sys.kind == SystemKind::Translation)
            cur = sys.fiber->iterate(theta, sys.omega, n, x);
        else
            cur = sys.fiber->apply(mod1(theta + static_cast<double>(n - 1) * sys.omega), cur);
        double d = cur - x - static_cast<double>(n) * rho;
        tr.devs.push_back(d);
        sup = std::max(sup, std::fabs(d));
        tr.sup_growth.push_back(sup);
    }
    return tr;
}

BoundednessReport classify_rho_boundedness(const QpfSystem& sys, std::int64_t N, int fiber_samples,
                                           double threshold) {
    if (N < 100) throw PreconditionError("classify_rho_boundedness needs N >= 100");
    if (fiber_samples < 1) throw PreconditionError("need at least one fiber sample");
    BoundednessReport rep;
    rep.threshold = threshold;
    rep.rho = rotation_number(sys, 0.0, 0.0, 8 * N).rho;
    rep.growth.assign(static_cast<std::size_t>(N), 0.0);
    for (int s = 0; s < fiber_samples; ++s) {
        double theta = (s + 0.5) / fiber_samples;
        double x = mod1(0.7548776662466927 * s);
        auto tr = deviations(sys, theta, x, N, rep.rho);
        for (std::size_t n = 0; n < tr.sup_growth.size(); ++n)
            rep.growth[n] = std::max(rep.growth[n], tr.sup_growth[n]);
    }
    rep.sup_full = rep.growth.back();
    rep.sup_half = rep.growth[static_cast<std::size_t>(N / 2) - 1];
    // deviations at rounding level carry no growth information
    if (rep.sup_full > 1e-9 && rep.sup_half > 0.0) rep.ratio = rep.sup_full / rep.sup_half;
    rep.verdict = rep.ratio > threshold ? Boundedness::UnboundedSuspected : Boundedness::BoundedSuspected;
    return rep;
}

double continuity_modulus(const QpfSystem& sys, std::size_t fibers, std::size_t knots) {
    double worst = 0.0;
    for (std::size_t j = 0; j < knots; ++j) {
        double x = static_cast<double>(j) / static_cast<double>(knots);
        double first = sys.lift(0.0, x), prev = first;
        for (std::size_t i = 1; i <= fibers; ++i) {
            double cur = i == fibers ? first : sys.lift(static_cast<double>(i) / static_cast<double>(fibers), x);
            worst = std::max(worst, circ_dist(cur, prev));
            prev = cur;
        }
    }
    return worst;
}

}  // namespace qpf::core
