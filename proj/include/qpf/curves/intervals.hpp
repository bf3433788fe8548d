#pragma once
#include <string>
#include <vector>

#include "qpf/curves/rational.hpp"

namespace qpf::curves {

// Closed arc [a, a+len] on the circle; a in [0,1), 0 <= len <= 1.
struct CircArc {
    Q a;
    Q len;
    Q end() const { return a + len; }
    bool degenerate() const { return len == 0; }
    bool contains(const Q& theta) const;
    bool operator==(const CircArc& o) const { return a == o.a && len == o.len; }
};

CircArc make_arc(const Q& a, const Q& b);  // from a to b going forward (b lifted past a)

// Disjoint closed arcs in canonical order. Touching arcs are merged.
class CircIntervalSet {
public:
    CircIntervalSet() = default;
    static CircIntervalSet full_circle();
    static CircIntervalSet from_arcs(std::vector<CircArc> arcs);

    bool empty() const { return !full_ && arcs_.empty(); }
    bool full() const { return full_; }
    const std::vector<CircArc>& arcs() const { return arcs_; }
    std::size_t count() const { return full_ ? 1 : arcs_.size(); }
    std::size_t degenerate_count() const;
    bool contains(const Q& theta) const;
    bool meets(const CircArc& arc) const;
    Q measure() const;

    CircIntervalSet unite(const CircIntervalSet& o) const;
    CircIntervalSet intersect(const CircArc& arc) const;
    CircIntervalSet translate(const Q& s) const;
    // Smallest circular gap between distinct components; 1 for fewer than two.
    Q min_gap() const;

    bool operator==(const CircIntervalSet& o) const { return full_ == o.full_ && arcs_ == o.arcs_; }
    std::string to_string() const;

private:
    bool full_ = false;
    std::vector<CircArc> arcs_;
};

// Pieces of the intersection of two arcs (0, 1 or 2 arcs).
std::vector<CircArc> intersect_arcs(const CircArc& x, const CircArc& y);

}  // namespace qpf::curves
