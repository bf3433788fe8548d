#pragma once
#include <string>
#include <vector>

#include "qpf/curves/rational.hpp"

namespace qpf::blowup {

enum class WeightMode { Quadratic, Hoelder };

// Atom weights a_n for |n| <= N and the continuous share beta = 1 - sum a_n.
struct WeightScheme {
    WeightMode mode = WeightMode::Quadratic;
    int k = 4;
    int N = 8;
    double eps = 0.5;
    double alpha = 0.0;  // Hoelder exponent of the bumps (Hoelder mode)
    double s = 0.0;      // weight decay exponent (Hoelder mode)
    std::vector<double> a;  // a[n + N]
    double beta = 0.0;
    curves::Q beta_exact;  // quadratic mode only
    // max over window of (a_{n+1} - a_n)^+ / ((1 - eps) a_{n+1}); h >= 1 - ratio.
    double ratio = 0.0;
    int ratio_at = 0;  // the n attaining it

    double at(int n) const { return a[static_cast<std::size_t>(n + N)]; }
    double h_floor() const { return 1.0 - ratio; }
};

// Throws WeightsInvalid naming the violated inequality.
WeightScheme make_weights(WeightMode mode, int k, int N, double eps, double alpha = 0.0, double s = 0.0);

}  // namespace qpf::blowup
