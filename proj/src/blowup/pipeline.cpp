#include "qpf/blowup/pipeline.hpp"

#include <cmath>

#include "qpf/common.hpp"
#include "qpf/parallel.hpp"

namespace qpf::blowup {

namespace {

class BlowupFiberMap : public core::FiberMap {
public:
    explicit BlowupFiberMap(std::shared_ptr<const Pipeline> p) : p_(std::move(p)) {}
    double apply(double theta, double x) const override { return p_->f_at(theta, x); }

private:
    std::shared_ptr<const Pipeline> p_;
};

}  // namespace

GridFiber build_grid_fiber(const CurveFamily& fam, const MeasureSpec& spec, const Q& theta, const PipelineConfig& cfg) {
    GridFiber g;
    g.mu = build_fiber_measure(fam, spec, theta);
    g.atlas = build_fiber_atlas(g.mu, spec, cfg.weights.eps);
    g.bumps = build_bumps(g.atlas, spec, cfg.bumps, cfg.weights.eps, cfg.hoelder_alpha);
    g.nu = build_density(g.atlas, g.bumps, cfg.weights, DensityRoute::H);
    return g;
}

std::shared_ptr<const Pipeline> Pipeline::build(const CurveFamily& fam, const curves::ExactBase& R,
                                                const PipelineConfig& cfg) {
    if (cfg.fibers < 2 || cfg.knots < 2) throw ConfigError("grids need at least two fibers and two knots");
    if (fam.lo() > -cfg.weights.N || fam.hi() < cfg.weights.N + 1)
        throw PreconditionError("curve family does not cover indices -N..N+1");
    std::shared_ptr<Pipeline> p(new Pipeline());
    p->cfg_ = cfg;
    p->fam_ = fam;
    p->R_ = R;
    p->omega_ = curves::to_d(R.omega);
    std::size_t M = static_cast<std::size_t>(cfg.fibers);
    p->g0_.resize(M);
    p->g1_.resize(M);
    p->pushed1_.resize(M);
    p->disp_.resize(M);
    MeasureSpec win = window_spec(cfg.weights, 0);
    MeasureSpec push = pushed_spec(cfg.weights, 1);
    parallel_for(M, cfg.threads, [&](std::size_t i) {
        Q t0 = curves::make_q(static_cast<long>(i), static_cast<long>(M));
        Q t1 = curves::frac_q(t0 + R.omega);
        p->g0_[i] = build_grid_fiber(p->fam_, win, t0, cfg);
        p->g1_[i] = build_grid_fiber(p->fam_, win, t1, cfg);
        p->pushed1_[i] = build_fiber_measure(p->fam_, push, t1);
        p->disp_[i] = curves::to_d(R.displacement(t0, 1));
        if (std::fabs(p->g1_[i].nu.total - 1.0) > 1e-12)
            throw EtaNotInvertible("nu fiber mass " + std::to_string(p->g1_[i].nu.total) + " at theta=" +
                                   std::to_string(p->theta1(i)));
    });
    p->shift_.assign(M, 0.0);
    p->f0_.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
        p->shift_[i] = std::floor(p->f_raw(i, 0.0));
        p->f0_[i] = p->f_raw(i, 0.0) - p->shift_[i];
    }
    p->pair_shift_.resize(M);
    for (std::size_t i = 0; i < M; ++i) p->pair_shift_[i] = std::round(p->f0_[i] - p->f0_[(i + 1) % M]);
    return p;
}

double Pipeline::f_raw(std::size_t i, double x) const {
    const GridFiber& b = g1_[i];
    double phi0 = g0_[i].mu.lower_of(0);
    double phi1 = b.mu.lower_of(1);
    return b.nu.inv_lift(b.nu.cum_lift(phi1) + (x - phi0));
}

double Pipeline::f_lift(std::size_t i, double x) const { return f_raw(i, x) - shift_[i]; }

double Pipeline::f_at(double theta, double x) const {
    std::size_t M = g0_.size();
    double t = mod1(theta) * static_cast<double>(M);
    std::size_t i = std::min(static_cast<std::size_t>(t), M - 1);
    double lam = t - static_cast<double>(i);
    double a = f_lift(i, x);
    if (lam <= 0.0) return a;
    std::size_t j = (i + 1) % M;
    double b = f_lift(j, x) + pair_shift_[i];
    double v0 = (1.0 - lam) * f0_[i] + lam * (f0_[j] + pair_shift_[i]);
    return (1.0 - lam) * a + lam * b - std::floor(v0);
}

core::QpfSystem Pipeline::system() const {
    auto sys = core::make_system(omega_, core::SystemKind::BlowupBuilt,
                                 std::make_shared<BlowupFiberMap>(shared_from_this()));
    if (R_.kind == curves::ExactBase::Kind::Translation) sys.rho = curves::to_d(R_.rho);
    return sys;
}

}  // namespace qpf::blowup
