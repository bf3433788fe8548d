#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qpf/curves/geometry.hpp"

namespace qpf::cli {

namespace {

constexpr double kSize = 512.0;
const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::ofstream open_svg(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path + "'");
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
       << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return os;
}

// Circle coordinate y in [0,1) drawn with 0 at the bottom.
double py(double y) { return kSize * (1.0 - y); }

}  // namespace

void svg_curves(const std::string& path, const curves::ExactBase& R, const curves::PLGraph& g, long images) {
    auto os = open_svg(path);
    const int samples = 1024;
    for (long k = 0; k <= images; ++k) {
        auto h = k == 0 ? g : curves::image_curve(R, g, k);
        os << "<g stroke=\"" << kPalette[k % 10] << "\" fill=\"none\" stroke-width=\"" << (k == 0 ? 2 : 1) << "\">\n";
        std::string pts;
        double prev = -1.0;
        auto flush = [&] {
            if (!pts.empty()) os << "<polyline points=\"" << pts << "\"/>\n";
            pts.clear();
        };
        for (int s = 0; s <= samples; ++s) {
            double t = static_cast<double>(s) / samples;
            double y = mod1(h.eval_d(std::min(t, 1.0 - 1e-12)));
            if (prev >= 0 && std::fabs(y - prev) > 0.5) flush();
            std::ostringstream p;
            p << std::fixed << std::setprecision(2) << kSize * t << ',' << py(y) << ' ';
            pts += p.str();
            prev = y;
        }
        flush();
        os << "</g>\n";
    }
    os << "</svg>\n";
}

void svg_atlas(const std::string& path, const blowup::Pipeline& p, std::size_t stride) {
    auto os = open_svg(path);
    stride = std::max<std::size_t>(stride, 1);
    const double w = kSize * static_cast<double>(stride) / static_cast<double>(p.fibers());
    for (std::size_t i = 0; i < p.fibers(); i += stride) {
        const auto& a = p.g0(i).atlas;
        double x0 = kSize * p.theta0(i);
        for (int n = a.lo; n <= a.hi; ++n)
            for (const auto& arc : a.u(n)) {
                // Split arcs that wrap past 1.
                double lo = mod1(arc.lo), len = arc.len();
                double pieces[2][2] = {{lo, std::min(1.0, lo + len)}, {0.0, std::max(0.0, lo + len - 1.0)}};
                for (auto& pc : pieces) {
                    if (pc[1] <= pc[0]) continue;
                    os << "<rect x=\"" << x0 << "\" y=\"" << py(pc[1]) << "\" width=\"" << w << "\" height=\""
                       << kSize * (pc[1] - pc[0]) << "\" fill=\"" << kPalette[((n % 10) + 10) % 10] << "\"/>\n";
                }
            }
    }
    os << "</svg>\n";
}

void svg_fiberset(const std::string& path, const minsets::FiberSet& K) {
    auto os = open_svg(path);
    const std::size_t cols = std::min<std::size_t>(K.fibers(), 512), rows = std::min<std::size_t>(K.bins(), 512);
    const double cw = kSize / static_cast<double>(cols), ch = kSize / static_cast<double>(rows);
    os << "<g fill=\"black\">\n";
    for (std::size_t c = 0; c < cols; ++c) {
        std::vector<bool> on(rows, false);
        for (std::size_t f = c * K.fibers() / cols; f < (c + 1) * K.fibers() / cols; ++f)
            for (const auto& [s, l] : K.runs(f))
                for (std::size_t b = s; b < s + l; ++b) on[(b % K.bins()) * rows / K.bins()] = true;
        for (std::size_t r = 0; r < rows;) {
            if (!on[r]) {
                ++r;
                continue;
            }
            std::size_t e = r;
            while (e < rows && on[e]) ++e;
            os << "<rect x=\"" << cw * static_cast<double>(c) << "\" y=\"" << kSize - ch * static_cast<double>(e)
               << "\" width=\"" << cw << "\" height=\"" << ch * static_cast<double>(e - r) << "\"/>\n";
            r = e;
        }
    }
    os << "</g>\n</svg>\n";
}

}  // namespace qpf::cli
