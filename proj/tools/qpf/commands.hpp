#pragma once
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "manifest.hpp"
#include "qpf/blowup/verify.hpp"

namespace qpf::cli {

// Timestamped progress lines; the only artifact allowed to differ between reruns.
class RunLog {
public:
    explicit RunLog(const std::string& dir);
    void operator()(const std::string& msg);

private:
    std::ofstream out_;
};

struct CurveData {
    curves::PLGraph curve;
    std::vector<std::string> certificate;
    bool has_certificate = false;
    std::vector<curves::CrossingWitness> crossings;
    curves::FlattenResult flatten;  // filled when the curve was flattened in this run
    bool flattened = false;
};

// Flattens the manifest curve to at least min_depth, or reads it from files.
CurveData obtain_curve(const Manifest& m, const curves::ExactBase& R, long min_depth, RunLog& log);

// Certificate crossing records that are marked verified.
std::vector<curves::CrossingWitness> certificate_crossings(const std::vector<std::string>& certificate);

std::shared_ptr<const blowup::Pipeline> build_pipeline(const Manifest& m, const curves::ExactBase& R,
                                                       const CurveData& c, int N, RunLog& log);

// Each returns the process exit code.
int cmd_curve(const Manifest& m);
int cmd_blowup(const Manifest& m);
int cmd_analyze(const Manifest& m);
int cmd_cocycle(const Manifest& m);

}  // namespace qpf::cli
