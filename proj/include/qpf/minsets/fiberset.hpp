#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpf/core/dynamics.hpp"

namespace qpf::minsets {

// Occupied vertical bins per fiber column; one bit per (fiber, bin).
class FiberSet {
public:
    FiberSet() = default;
    FiberSet(std::size_t fibers, std::size_t bins);

    std::size_t fibers() const { return fibers_; }
    std::size_t bins() const { return bins_; }
    bool test(std::size_t f, std::size_t b) const { return (row(f)[b >> 6] >> (b & 63)) & 1u; }
    void set(std::size_t f, std::size_t b) { bits_[f * words_ + (b >> 6)] |= std::uint64_t{1} << (b & 63); }
    void mark(double theta, double x);  // bins the point (theta, x mod 1)
    std::size_t occupied(std::size_t f) const;
    std::size_t occupied() const;
    bool empty() const { return occupied() == 0; }
    // Maximal runs [start, start+len) of occupied bins; a run through bin 0 wraps.
    std::vector<std::pair<std::size_t, std::size_t>> runs(std::size_t f) const;
    // Groups of runs separated by at most `gap` empty bins, counted circularly.
    int clusters(std::size_t f, std::size_t gap) const;

    // "fiberset v1 <fibers> <bins>" then one line per fiber: index, then start:len runs.
    std::string to_rle() const;
    static FiberSet from_rle(const std::string& text);
    bool operator==(const FiberSet& o) const {
        return fibers_ == o.fibers_ && bins_ == o.bins_ && bits_ == o.bits_;
    }

private:
    const std::uint64_t* row(std::size_t f) const { return bits_.data() + f * words_; }
    std::size_t fibers_ = 0, bins_ = 0, words_ = 0;
    std::vector<std::uint64_t> bits_;
};

struct OrbitOptions {
    std::int64_t burnin = 100000;
    std::int64_t iters = 10000000;
    std::uint64_t seed = 1;
    std::size_t fibers = 4096;
    std::size_t bins = 4096;
};

// Bins the tail of one orbit started at a seeded point. Requires iters >= 10 * fibers.
FiberSet approximate_minimal_set(const core::QpfSystem& f, const OrbitOptions& opt);

struct ComponentCounts {
    std::vector<int> per_fiber;  // -1 for empty fibers
    int c_min = 0;               // c(K): minimum over nonempty fibers
    double fraction_at_min = 0.0;
    int modal = 0;
    double modal_fraction = 0.0;
};
ComponentCounts fiber_component_count(const FiberSet& K, std::size_t gap = 0, unsigned threads = 1);

// Per-fiber open sets (circle arcs) the set should avoid, e.g. atlas interiors.
using Avoid = std::vector<std::vector<std::pair<double, double>>>;

struct StructureOptions {
    int rect_samples = 200;
    std::size_t rect_fibers = 16, rect_bins = 16;
    std::size_t interior_window = 2;  // bins
    std::uint64_t seed = 7;
    std::optional<double> beta;  // fiber measure bound
    const Avoid* avoid = nullptr;  // indexed like the fibers of K
};

struct StructureReport {
    long components = 0;
    std::size_t max_extent = 0;   // widest 4-connected component, in fiber cells (columns - 1)
    bool vertical_segments = false;  // max_extent <= 1
    bool strip_like = false;         // some component spans every column
    int rect_used = 0, rect_skipped = 0, rect_with_interval = 0;
    double interior_free_fraction = 0.0;  // fibers where every occupied bin has a free bin nearby
    double max_fiber_measure = 0.0;
    bool measure_ok = true;          // max fiber measure <= beta + 2 bins, when beta is given
    long avoid_violations = 0;       // occupied bins deep inside the avoided sets
    bool ambiguous = false;
    std::string question;            // set when ambiguous
};
StructureReport structure_diagnostics(const FiberSet& K, const StructureOptions& opt = {}, unsigned threads = 1);

// Bins of f(K) (bin centres pushed forward) that K misses, and the allowance 2 sqrt(#occupied).
std::pair<std::size_t, double> invariance_defect(const FiberSet& K, const core::QpfSystem& f, unsigned threads = 1);

// Surfaced verbatim in structure reports whose diagnostics disagree.
inline constexpr const char* kOpenQuestion = "can c(K) be finite?";

}  // namespace qpf::minsets
