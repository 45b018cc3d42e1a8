#include "ctm/kernels.hpp"

#include <cmath>

namespace ctm::kernels {

namespace {

inline double drift_row(const Network& net, int i, double u, std::span<const double> x,
                        std::span<const double> coupled) {
    const std::size_t N = static_cast<std::size_t>(net.size);
    const std::uint8_t* row = net.adjacency.data() + static_cast<std::size_t>(i) * N;
    double sum = 0.0;
    for (std::size_t j = 0; j < N; ++j)
        if (row[j]) sum += coupled[j];
    const double d = net.degrees[i];
    return -d * x[i] + u * sum + d * (1.0 - 2.0 * net.thresholds[i]);
}

}  // namespace

void ctm_drift_serial(const Network& net, const Sigmoid& sigmoid, double u, double v, std::span<const double> x,
                      std::span<double> dx, std::span<double> coupled) {
    const int N = net.size;
    for (int j = 0; j < N; ++j) coupled[j] = sigmoid(v * x[j]);
    for (int i = 0; i < N; ++i) dx[i] = drift_row(net, i, u, x, coupled);
}

void ctm_drift_parallel(const Network& net, const Sigmoid& sigmoid, double u, double v, std::span<const double> x,
                        std::span<double> dx, std::span<double> coupled) {
    const int N = net.size;
#pragma omp parallel
    {
#pragma omp for schedule(static)
        for (int j = 0; j < N; ++j) coupled[j] = sigmoid(v * x[j]);
#pragma omp for schedule(static)
        for (int i = 0; i < N; ++i) dx[i] = drift_row(net, i, u, x, coupled);
    }
}

}  // namespace ctm::kernels
