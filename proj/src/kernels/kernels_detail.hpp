#pragma once

#include <functional>

#include "eigenbound/kernels.hpp"

// ISA variants operating on the half-open element range [begin, end).

namespace eigenbound::kernels::detail {

void residual_terms_scalar(const ElementBatch& b, const ResidualBatch& r,
                           int begin, int end, double* r2, double* s2);
void p1_stiffness_scalar(const ElementBatch& b, int begin, int end,
                         double* s00, double* s01, double* s02,
                         double* s11, double* s12, double* s22);

#if defined(__x86_64__)
void residual_terms_avx2(const ElementBatch& b, const ResidualBatch& r,
                         int begin, int end, double* r2, double* s2);
void p1_stiffness_avx2(const ElementBatch& b, int begin, int end,
                       double* s00, double* s01, double* s02,
                       double* s11, double* s12, double* s22);
#endif

// Runs fn(begin, end) over chunks of [0, n) on up to thread_count() threads.
void parallel_ranges(int n, const std::function<void(int, int)>& fn);

}  // namespace eigenbound::kernels::detail
