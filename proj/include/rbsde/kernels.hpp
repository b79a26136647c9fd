#pragma once

#include <cstddef>

// Inner arithmetic kernels for the per-level tree loops.
//
// Every kernel is SPECIFIED by its scalar reference loop below; the AVX2
// variants must return bit-identical results. That is possible because each
// output element is produced by the same sequence of IEEE operations in both
// paths (no fma, no reassociation), and the reductions fix a 4-lane stride
// order that both paths share. Dispatch is decided once at startup from
// cpuid, overridable with RBSDE_SIMD=scalar|avx2 or force().

namespace rbsde::kernels {

enum class Isa { scalar, avx2 };

Isa active();
void force(Isa isa);   // test hook; silently falls back to scalar if unsupported
bool avx2_available();

// out[i] = 0.5 * (in[2i] + in[2i+1]); n_out outputs.
void pair_half_sum(const double* in, double* out, std::size_t n_out);

// out[2i] = parent[i] * factor[2i]; out[2i+1] = parent[i] * factor[2i+1].
void expand_mul(const double* parent, const double* factor, double* out,
                std::size_t n_parent);

// out[i] = a[i] * b[i].
void mul(const double* a, const double* b, double* out, std::size_t n);

// 4-lane strided sum: s[j] = sum over i of x[4i+j], result ((s0+s1)+(s2+s3)).
double sum(const double* x, std::size_t n);

// Same lane structure with s[j] += w[4i+j]*x[4i+j].
double dot(const double* w, const double* x, std::size_t n);

}  // namespace rbsde::kernels
