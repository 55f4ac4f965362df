#pragma once

#include <string>

namespace lpflow {

/// One evaluated inequality: lhs <= C * rhs with the empirical constant
/// reported as the ratio. The (s, p, r) columns describe the left-hand norm.
/// sample_id and resolution are filled by the verification harness.
struct InequalityReport {
    std::string sample_id;
    std::string law_id;
    double s = 0.0;
    double p = 0.0;
    double r = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    int resolution = 0;
    bool degenerate = false;  // rhs vanished (or inputs trivial); ratio unusable

    double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

}  // namespace lpflow
