#include "qpf/sl2/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpf/minsets/fiberset.hpp"
#include "qpf/parallel.hpp"

namespace qpf::sl2 {

using std::numbers::pi;

Mat2 rotation_matrix(double phi) {
    double c = std::cos(pi * phi), s = std::sin(pi * phi);
    return {c, -s, s, c};
}

Mat2 diagonal_matrix(double lambda) { return {lambda, 0.0, 0.0, 1.0 / lambda}; }

double projective_lift(const Mat2& M, double x) {
    // -A acts like A on lines; with trace >= 0 no line is sent to its own reverse,
    // so the angle increment stays inside (-pi, pi) and the lift is continuous.
    Mat2 A = M.trace() < 0 ? Mat2{-M.a, -M.b, -M.c, -M.d} : M;
    double c = std::cos(pi * x), s = std::sin(pi * x);
    double wx = A.a * c + A.b * s, wy = A.c * c + A.d * s;
    double delta = std::atan2(wy * c - wx * s, wx * c + wy * s);
    return x + delta / pi;
}

double projective_action(const Mat2& A, double x) { return mod1(projective_lift(A, x)); }

std::string to_string(Family f) {
    switch (f) {
        case Family::Constant: return "constant";
        case Family::Rotation: return "rotation";
        case Family::Diagonal: return "diagonal";
        case Family::Harper: return "harper";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    for (auto f : {Family::Constant, Family::Rotation, Family::Diagonal, Family::Harper})
        if (to_string(f) == s) return f;
    throw ConfigError("unknown cocycle family '" + s + "'");
}

Mat2 Cocycle::at(double theta) const {
    switch (family) {
        case Family::Constant: return constant;
        case Family::Rotation: return rotation_matrix(phi);
        case Family::Diagonal: return diagonal_matrix(lambda);
        case Family::Harper: return {energy - 2.0 * lambda * std::cos(2.0 * pi * theta), -1.0, 1.0, 0.0};
    }
    return {};
}

Cocycle constant_cocycle(const Mat2& A, double omega) {
    if (std::fabs(A.det() - 1.0) > 1e-12) throw PreconditionError("constant matrix is not unimodular");
    Cocycle c;
    c.omega = omega;
    c.family = Family::Constant;
    c.constant = A;
    return c;
}

Cocycle rotation_cocycle(double phi, double omega) {
    Cocycle c;
    c.omega = omega;
    c.family = Family::Rotation;
    c.phi = phi;
    return c;
}

Cocycle diagonal_cocycle(double lambda, double omega) {
    if (!(lambda > 0)) throw ConfigError("diagonal entry must be positive");
    Cocycle c;
    c.omega = omega;
    c.family = Family::Diagonal;
    c.lambda = lambda;
    return c;
}

Cocycle harper_cocycle(double energy, double lambda, double omega) {
    Cocycle c;
    c.omega = omega;
    c.family = Family::Harper;
    c.energy = energy;
    c.lambda = lambda;
    return c;
}

namespace {

class CocycleFiberMap : public core::FiberMap {
public:
    explicit CocycleFiberMap(Cocycle c) : c_(std::move(c)) {}
    double apply(double theta, double x) const override {
        Mat2 A = c_.at(theta);
        return projective_lift(A, x) - std::floor(projective_lift(A, 0.0));
    }

private:
    Cocycle c_;
};

}  // namespace

core::QpfSystem cocycle_qpf(const Cocycle& c) {
    return core::make_system(c.omega, core::SystemKind::CocycleInduced, std::make_shared<CocycleFiberMap>(c));
}

LyapunovReport lyapunov(const Cocycle& c, std::int64_t N, double theta0) {
    if (N < 1000) throw PreconditionError("Lyapunov estimate needs N >= 1000");
    // A_n Q_{n-1} = Q_n R_n each step. The triangular factors multiply into T, kept as
    // exp(log_scale) * T with T rescaled every 32 steps; log r11 + log r22 tracks log det.
    double q0 = 1.0, q1 = 0.0;  // first column of Q; the second is (-q1, q0)
    double t11 = 1.0, t12 = 0.0, t22 = 1.0, log_scale = 0.0, log_det = 0.0;
    double theta = mod1(theta0);
    for (std::int64_t n = 0; n < N; ++n) {
        Mat2 A = c.at(theta);
        theta = mod1(theta + c.omega);
        double m11 = A.a * q0 + A.b * q1, m21 = A.c * q0 + A.d * q1;
        double m12 = -A.a * q1 + A.b * q0, m22 = -A.c * q1 + A.d * q0;
        double r11 = std::hypot(m11, m21);
        q0 = m11 / r11;
        q1 = m21 / r11;
        double r12 = q0 * m12 + q1 * m22, r22 = -q1 * m12 + q0 * m22;
        log_det += std::log(r11) + std::log(std::fabs(r22));
        t12 = r11 * t12 + r12 * t22;
        t11 *= r11;
        t22 *= r22;
        if ((n + 1) % 32 == 0) {
            double s = std::max({std::fabs(t11), std::fabs(t12), std::fabs(t22)});
            t11 /= s;
            t12 /= s;
            t22 /= s;
            log_scale += std::log(s);
        }
    }
    double p = t11 * t11 + t12 * t12 + t22 * t22, q = t11 * t22;
    double sigma = std::sqrt(0.5 * (p + std::sqrt(std::max(0.0, p * p - 4.0 * q * q))));
    LyapunovReport r;
    r.exponent = (log_scale + std::log(sigma)) / static_cast<double>(N);
    r.det_drift = std::fabs(log_det);
    return r;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::WholeTorus: return "whole-torus";
        case Verdict::GraphLike: return "graph-like";
        case Verdict::OnePoint: return "one-point";
        case Verdict::TwoPoint: return "two-point";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

double CardinalityReport::fraction_with(int count) const {
    auto it = histogram.find(count);
    return it == histogram.end() || sampled == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(sampled);
}

CardinalityReport minimal_fiber_cardinality(const Cocycle& c, const CardinalityOptions& opt) {
    if (opt.cluster_tol < 2) throw PreconditionError("cluster tolerance must be at least 2 bins");
    auto sys = cocycle_qpf(c);
    minsets::OrbitOptions oo;
    oo.burnin = opt.burnin;
    oo.iters = opt.iters;
    oo.seed = opt.seed;
    oo.fibers = opt.fibers;
    oo.bins = opt.bins;
    auto K = minsets::approximate_minimal_set(sys, oo);

    const std::size_t F = K.fibers(), B = K.bins();
    std::vector<int> count(F, -1);
    std::vector<double> centre(F, -1.0);
    parallel_for(F, opt.threads, [&](std::size_t f) {
        auto runs = K.runs(f);
        if (runs.empty()) return;
        // Gaps wider than the tolerance split clusters; no such gap means a gap-free fiber.
        std::vector<std::size_t> wide;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            std::size_t end = (runs[i].first + runs[i].second) % B;
            std::size_t next = runs[(i + 1) % runs.size()].first;
            std::size_t g = runs.size() == 1 ? B - runs[i].second : (next + B - end) % B;
            if (g > opt.cluster_tol) wide.push_back(i);
        }
        count[f] = static_cast<int>(wide.size());
        if (wide.size() == 1) {
            // Circular mean of the single cluster, starting after the wide gap.
            std::size_t first = (wide[0] + 1) % runs.size();
            double start = static_cast<double>(runs[first].first), sum = 0.0, n = 0.0;
            for (std::size_t k = 0; k < runs.size(); ++k) {
                const auto& r = runs[(first + k) % runs.size()];
                double off = std::fmod(static_cast<double>(r.first) - start + static_cast<double>(B), static_cast<double>(B));
                for (std::size_t j = 0; j < r.second; ++j) {
                    sum += off + static_cast<double>(j) + 0.5;
                    n += 1.0;
                }
            }
            centre[f] = mod1((start + sum / n) / static_cast<double>(B));
        }
    });

    CardinalityReport rep;
    rep.cluster_tol = opt.cluster_tol;
    for (int v : count)
        if (v >= 0) {
            ++rep.histogram[v];
            ++rep.sampled;
        }
    rep.full_fraction = rep.fraction_with(0);
    for (const auto& [k, n] : rep.histogram)
        if (k > 0 && static_cast<double>(n) / static_cast<double>(rep.sampled) > rep.modal_fraction) {
            rep.modal = k;
            rep.modal_fraction = static_cast<double>(n) / static_cast<double>(rep.sampled);
        }
    for (std::size_t f = 0; f < F; ++f) {
        std::size_t g = (f + 1) % F;
        if (centre[f] >= 0 && centre[g] >= 0) {
            // Crossing theta = 1 the fiber maps agree, so the graph closes up.
            rep.max_centre_jump = std::max(rep.max_centre_jump, circ_dist(centre[f], centre[g]));
        }
    }

    if (rep.full_fraction >= opt.full_fraction) {
        rep.verdict = Verdict::WholeTorus;
    } else if (rep.modal_fraction >= opt.generic_fraction && rep.modal == 2) {
        rep.verdict = Verdict::TwoPoint;
    } else if (rep.modal_fraction >= opt.generic_fraction && rep.modal == 1) {
        rep.verdict = rep.max_centre_jump <= opt.jump_tol ? Verdict::GraphLike : Verdict::OnePoint;
    } else {
        rep.verdict = Verdict::Inconclusive;
    }
    rep.flagged = rep.verdict == Verdict::OnePoint;
    return rep;
}

namespace {

bool strictly_ordered(double a, double z, double b) {
    double dz = mod1(z - a), db = mod1(b - a);
    return dz > 0 && db > 0 && dz < db;
}

// Columns alpha v(a), gamma v(b) with alpha v(a) + gamma v(b) = v(z).
Mat2 frame(double a, double z, double b) {
    double ca = std::cos(pi * a), sa = std::sin(pi * a);
    double cb = std::cos(pi * b), sb = std::sin(pi * b);
    double cz = std::cos(pi * z), sz = std::sin(pi * z);
    double D = ca * sb - cb * sa;
    double alpha = (cz * sb - cb * sz) / D, gamma = (ca * sz - cz * sa) / D;
    return {alpha * ca, gamma * cb, alpha * sa, gamma * sb};
}

Mat2 inverse(const Mat2& M) {
    double d = M.det();
    return {M.d / d, -M.b / d, -M.c / d, M.a / d};
}

}  // namespace

TripleMap triple_map(double a, double z, double b, double a2, double z2, double b2) {
    if (!strictly_ordered(a, z, b) || !strictly_ordered(a2, z2, b2))
        throw DegenerateTriple("triples must be distinct and cyclically ordered");
    Mat2 A = frame(a2, z2, b2) * inverse(frame(a, z, b));
    double d = A.det();
    if (!(d > 0)) throw DegenerateTriple("triples have opposite orientation");
    double s = std::sqrt(d);
    A = {A.a / s, A.b / s, A.c / s, A.d / s};
    if (A.trace() < 0) A = {-A.a, -A.b, -A.c, -A.d};
    TripleMap out{A, 0.0};
    for (auto [x, y] : {std::pair{a, a2}, std::pair{z, z2}, std::pair{b, b2}})
        out.residual = std::max(out.residual, circ_dist(projective_action(A, x), y));
    return out;
}

}  // namespace qpf::sl2
