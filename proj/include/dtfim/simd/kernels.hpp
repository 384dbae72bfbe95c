#pragma once

#include <cstdint>

namespace dtfim::simd {

/// Kernel selection. `automatic` picks the widest variant the CPU supports.
enum class KernelKind { automatic, scalar, avx2, avx512 };

bool cpu_has_avx2();
bool cpu_has_avx512();

/// Resolves `automatic` to a concrete kind; throws InvalidParams when a
/// forced kind is unsupported on this CPU.
KernelKind resolve_kernel(KernelKind kind);

const char* kernel_name(KernelKind kind);

/// Inputs of the Euler-Maruyama path kernel: real-basis drift A, noise factor
/// B with B B^T equal to the real-basis diffusion, step dt and per-run seed.
/// Each path owns one xoshiro256++ stream derived from (seed, path index), so
/// results do not depend on how paths are batched or threaded.
struct OuPathArgs {
    double a[9];
    double b[9];
    double dt = 1e-3;
    long n_steps = 0;
    std::uint64_t seed = 0;
};

/// Simulates paths [path_begin, path_end) from the origin and writes the final
/// coordinates, three doubles per path, to `out` (relative to path_begin).
using OuPathsFn = void (*)(const OuPathArgs& args, long path_begin, long path_end,
                           double* out);

OuPathsFn ou_paths_fn(KernelKind kind);

/// y[i] += a * x[i]
using DaxpyFn = void (*)(long n, double a, const double* x, double* y);

DaxpyFn daxpy_fn(KernelKind kind);

}  // namespace dtfim::simd
