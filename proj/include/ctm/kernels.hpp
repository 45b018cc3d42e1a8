#pragma once

#include <span>

#include "ctm/network.hpp"
#include "ctm/sigmoid.hpp"

namespace ctm::kernels {

inline constexpr int kParallelMinAgents = 256;

// dx_i = -d_i x_i + u * sum_j a_ij S(v x_j) + d_i (1 - 2 mu_i)
//
// `coupled` is caller-provided scratch of length N; on return it holds
// S(v x_j). Both variants sum each row in index order, so they produce
// bit-identical results.
void ctm_drift_serial(const Network& net, const Sigmoid& sigmoid, double u, double v, std::span<const double> x,
                      std::span<double> dx, std::span<double> coupled);
void ctm_drift_parallel(const Network& net, const Sigmoid& sigmoid, double u, double v, std::span<const double> x,
                        std::span<double> dx, std::span<double> coupled);

}  // namespace ctm::kernels
