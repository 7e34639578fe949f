#include "lplq/batch.hpp"

#include <cmath>

namespace lplq {

std::vector<double> batch_mixed_norms_serial(std::span<const StepFunction2D> fs,
                                             const NormParams& pq) {
    std::vector<double> out(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) out[i] = mixed_norm(fs[i], pq);
    return out;
}

std::vector<double> batch_mixed_norms(std::span<const StepFunction2D> fs, const NormParams& pq) {
    std::vector<double> out(fs.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(fs.size()); ++i)
        out[static_cast<std::size_t>(i)] = mixed_norm(fs[static_cast<std::size_t>(i)], pq);
    return out;
}

std::vector<double> batch_isometry_defects_serial(const LatticeAutomorphism& a,
                                                  std::span<const StepFunction2D> fs,
                                                  const NormParams& pq) {
    std::vector<double> out(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i)
        out[i] = std::abs(mixed_norm(apply(a, fs[i]), pq) - mixed_norm(fs[i], pq));
    return out;
}

std::vector<double> batch_isometry_defects(const LatticeAutomorphism& a,
                                           std::span<const StepFunction2D> fs,
                                           const NormParams& pq) {
    std::vector<double> out(fs.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(fs.size()); ++i) {
        std::size_t k = static_cast<std::size_t>(i);
        out[k] = std::abs(mixed_norm(apply(a, fs[k]), pq) - mixed_norm(fs[k], pq));
    }
    return out;
}

}  // namespace lplq
