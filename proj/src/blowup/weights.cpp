#include "qpf/blowup/weights.hpp"

#include <cmath>

#include "qpf/common.hpp"

namespace qpf::blowup {

WeightScheme make_weights(WeightMode mode, int k, int N, double eps, double alpha, double s) {
    if (k < 1) throw WeightsInvalid("k >= 1 required, got " + std::to_string(k));
    if (N < 1) throw WeightsInvalid("N >= 1 required, got " + std::to_string(N));
    if (!(eps > 0.0 && eps < 1.0)) throw WeightsInvalid("eps in (0,1) required");
    WeightScheme w;
    w.mode = mode;
    w.k = k;
    w.N = N;
    w.eps = eps;
    if (mode == WeightMode::Hoelder) {
        // Bounded component counts are only available below 1/2.
        if (!(alpha > 0.0 && alpha < 0.5)) throw WeightsInvalid("Hoelder exponent alpha in (0, 1/2) required");
        if (!(s > 1.0 && s < 1.0 / alpha - 1.0))
            throw WeightsInvalid("s in (1, 1/alpha - 1) violated: s=" + std::to_string(s));
        w.alpha = alpha;
        w.s = s;
    }
    curves::Q sum = 0;
    double sumd = 0.0;
    for (int n = -N; n <= N; ++n) {
        long m = std::abs(n) + k;
        double an = mode == WeightMode::Quadratic ? 1.0 / (static_cast<double>(m) * m) : std::pow(m, -s);
        if (mode == WeightMode::Quadratic) sum += curves::make_q(1, m * m);
        w.a.push_back(an);
        sumd += an;
    }
    if (mode == WeightMode::Quadratic) {
        w.beta_exact = 1 - sum;
        w.beta = curves::to_d(w.beta_exact);
    } else {
        w.beta = 1.0 - sumd;
    }
    if (!(w.beta > 0.0)) throw WeightsInvalid("sum of a_n >= 1 (beta = " + std::to_string(w.beta) + " <= 0)");
    for (int n = -N; n < N; ++n) {
        double r = std::max(0.0, w.at(n + 1) - w.at(n)) / ((1.0 - eps) * w.at(n + 1));
        if (r > w.ratio) w.ratio = r, w.ratio_at = n;
    }
    if (!(w.ratio < 1.0))
        throw WeightsInvalid("boundary ratio max (a_{n+1} - a_n) / ((1 - eps) a_{n+1}) = " + std::to_string(w.ratio) +
                             " >= 1");
    return w;
}

}  // namespace qpf::blowup
