#pragma once

#include <span>
#include <vector>

#include "lplq/step_function.hpp"
#include "lplq/transport.hpp"

namespace lplq {

// Data-parallel kernels with serial reference implementations.  The parallel
// and serial paths must agree bit-for-bit (each element is computed by the
// same scalar code); tests and the benchmark target compare them.

std::vector<double> batch_mixed_norms_serial(std::span<const StepFunction2D> fs,
                                             const NormParams& pq);
std::vector<double> batch_mixed_norms(std::span<const StepFunction2D> fs, const NormParams& pq);

std::vector<double> batch_isometry_defects_serial(const LatticeAutomorphism& a,
                                                  std::span<const StepFunction2D> fs,
                                                  const NormParams& pq);
std::vector<double> batch_isometry_defects(const LatticeAutomorphism& a,
                                           std::span<const StepFunction2D> fs,
                                           const NormParams& pq);

}  // namespace lplq
