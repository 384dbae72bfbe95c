#include "dtfim/simd/ou_batch.hpp"

namespace dtfim::simd {

void ou_paths_scalar(const OuPathArgs& args, long p0, long p1, double* out) {
    ou_paths_impl<ScalarBatch>(args, p0, p1, out);
}

void daxpy_scalar(long n, double a, const double* x, double* y) {
    for (long i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace dtfim::simd
