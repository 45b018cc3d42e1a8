#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ctm {

/// Resolved parameters of one CLI invocation. The text form is flat
/// `key=value` lines with `#` comments; every output file carries it as a
/// comment header.
struct RunConfig {
    std::string command;
    int N = 11;
    int n = 4;
    double eps = 0.2;
    double u0 = 3.0;
    double kappa = 10.0;
    double kappa_s = 0.05;
    double v = 1.0;
    double fixed_u = -1.0;  // < 0 selects feedback gain
    double beta = 1.0;
    int perturbed = 0;
    std::uint64_t seed = 1;
    double dt = 0.01;
    double t_end = 200.0;
    int record_every = 10;
    double settle_time = 0.0;  // response classification ignores earlier windows
    std::string method = "rk4";
    std::string out = "ctm_out";
    int n_min = 2;
    int n_max = 0;  // 0 means (N-1)/2
    double u_min = 0.0;
    double u_max = 0.0;  // 0 means 1.5 (N-1)/(N-2n-1)
    int u_steps = 200;
    std::string edges;
    std::string thresholds;
    std::string seeds;

    bool operator==(const RunConfig&) const = default;

    std::string to_text() const;
    std::vector<std::string> header_lines() const;

    /// Unknown keys and malformed values throw UsageError.
    static RunConfig from_text(const std::string& text, RunConfig base);
    static RunConfig from_text(const std::string& text);
};

}  // namespace ctm
