#pragma once
#include <string>
#include <utility>
#include <vector>

#include "qpf/curves/rational.hpp"

namespace qpf::curves {

// Continuous graph theta -> gamma(theta) stored by breakpoints theta_i in [0,1)
// with lift values v_i; gamma(theta + 1) = gamma(theta) + degree.
class PLGraph {
public:
    PLGraph() = default;
    // Points are reduced mod 1 in theta (values adjusted by the degree) and sorted.
    PLGraph(std::vector<std::pair<Q, Q>> points, long degree = 0);

    static PLGraph constant(const Q& c);
    static PLGraph tent(const Q& offset, const Q& amplitude);  // offset + amplitude (1 - |2t - 1|)

    Q eval(const Q& theta) const;
    double eval_d(double theta) const;

    std::size_t size() const { return t_.size(); }
    const std::vector<Q>& ts() const { return t_; }
    const std::vector<Q>& vs() const { return v_; }
    long degree() const { return degree_; }
    bool approximate() const { return approximate_; }
    void set_approximate(bool a) { approximate_ = a; }

    // Graph of theta -> gamma(theta - dtheta) + dvalue.
    PLGraph shifted(const Q& dtheta, const Q& dvalue) const;

    // Replace the graph over the closed arc [a, a+len] by the given breakpoints
    // (canonical thetas in that arc, lift values continuous with the rest).
    void splice(const Q& a, const Q& len, const std::vector<std::pair<Q, Q>>& points);

    // Breakpoint thetas lying in the open arc (a, a+len), returned as offsets from a.
    std::vector<Q> breakpoint_offsets_in(const Q& a, const Q& len) const;

    // Lift range over the closed arc [a, a+len] (theta measured from a, unwrapped).
    std::pair<Q, Q> range_over(const Q& a, const Q& len) const;

    bool operator==(const PLGraph& o) const { return degree_ == o.degree_ && t_ == o.t_ && v_ == o.v_; }

    // One line per breakpoint: "tnum/tden vnum/vden".
    std::string to_text() const;
    static PLGraph from_text(const std::string& text);

private:
    std::vector<Q> t_, v_;
    long degree_ = 0;
    bool approximate_ = false;
};

}  // namespace qpf::curves
