#pragma once
#include <cstddef>
#include <memory>
#include <vector>

#include "qpf/blowup/density.hpp"
#include "qpf/core/dynamics.hpp"

namespace qpf::blowup {

struct PipelineConfig {
    WeightScheme weights;
    int fibers = 4096;  // G0 = {i / fibers}, G1 = G0 + omega
    int knots = 4096;   // vertical grid for audits and tables
    BumpKind bumps = BumpKind::Urysohn;
    double hoelder_alpha = 1.0 / 3.0;
    unsigned threads = 1;
};

struct GridFiber {
    FiberMeasure mu;      // window measure, anchored at Gamma_0
    FiberAtlas atlas;
    BumpFamily bumps;
    FiberDensity nu;      // h route
};

// Everything built on the two fiber grids, plus the transported fiber maps
// f_theta = C_nu^{-1}(C_nu(phi1^-) + x - phi0^-) at theta in G0 (nu taken at theta + omega).
class Pipeline : public std::enable_shared_from_this<Pipeline> {
public:
    static std::shared_ptr<const Pipeline> build(const CurveFamily& fam, const curves::ExactBase& R,
                                                 const PipelineConfig& cfg);

    const PipelineConfig& config() const { return cfg_; }
    const WeightScheme& weights() const { return cfg_.weights; }
    const CurveFamily& family() const { return fam_; }
    const curves::ExactBase& base() const { return R_; }
    std::size_t fibers() const { return g0_.size(); }
    double omega() const { return omega_; }
    double theta0(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(g0_.size()); }
    double theta1(std::size_t i) const { return g1_[i].mu.theta_d; }
    double displacement(std::size_t i) const { return disp_[i]; }  // R's fiber shift at theta0(i)
    const GridFiber& g0(std::size_t i) const { return g0_[i]; }
    const GridFiber& g1(std::size_t i) const { return g1_[i]; }
    const FiberMeasure& pushed1(std::size_t i) const { return pushed1_[i]; }  // R_* mu at G1, anchored at Gamma_1

    double f_lift(std::size_t i, double x) const;  // normalized so f_lift(i, 0) is in [0,1)
    double f_at(double theta, double x) const;     // linear blend of neighbouring grid lifts
    core::QpfSystem system() const;

private:
    Pipeline() = default;
    double f_raw(std::size_t i, double x) const;
    PipelineConfig cfg_;
    CurveFamily fam_;
    curves::ExactBase R_;
    double omega_ = 0.0;
    std::vector<GridFiber> g0_, g1_;
    std::vector<FiberMeasure> pushed1_;
    std::vector<double> disp_, shift_, f0_, pair_shift_;
};

GridFiber build_grid_fiber(const CurveFamily& fam, const MeasureSpec& spec, const Q& theta, const PipelineConfig& cfg);

}  // namespace qpf::blowup
