#include "rbsde/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace rbsde::kernels {

namespace detail {

void pair_half_sum_scalar(const double* in, double* out, std::size_t n_out) {
  for (std::size_t i = 0; i < n_out; ++i) out[i] = 0.5 * (in[2 * i] + in[2 * i + 1]);
}

void expand_mul_scalar(const double* parent, const double* factor, double* out,
                       std::size_t n_parent) {
  for (std::size_t i = 0; i < n_parent; ++i) {
    out[2 * i] = parent[i] * factor[2 * i];
    out[2 * i + 1] = parent[i] * factor[2 * i + 1];
  }
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double sum_scalar(const double* x, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s[0] += x[i];
    s[1] += x[i + 1];
    s[2] += x[i + 2];
    s[3] += x[i + 3];
  }
  for (std::size_t j = 0; i + j < n; ++j) s[j] += x[i + j];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

double dot_scalar(const double* w, const double* x, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s[0] += w[i] * x[i];
    s[1] += w[i + 1] * x[i + 1];
    s[2] += w[i + 2] * x[i + 2];
    s[3] += w[i + 3] * x[i + 3];
  }
  for (std::size_t j = 0; i + j < n; ++j) s[j] += w[i + j] * x[i + j];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

#if RBSDE_HAVE_AVX2
void pair_half_sum_avx2(const double* in, double* out, std::size_t n_out);
void expand_mul_avx2(const double* parent, const double* factor, double* out,
                     std::size_t n_parent);
void mul_avx2(const double* a, const double* b, double* out, std::size_t n);
double sum_avx2(const double* x, std::size_t n);
double dot_avx2(const double* w, const double* x, std::size_t n);
#endif

}  // namespace detail

namespace {

struct Dispatch {
  void (*pair_half_sum)(const double*, double*, std::size_t) = detail::pair_half_sum_scalar;
  void (*expand_mul)(const double*, const double*, double*, std::size_t) = detail::expand_mul_scalar;
  void (*mul)(const double*, const double*, double*, std::size_t) = detail::mul_scalar;
  double (*sum)(const double*, std::size_t) = detail::sum_scalar;
  double (*dot)(const double*, const double*, std::size_t) = detail::dot_scalar;
  Isa isa = Isa::scalar;
};

Dispatch make_dispatch(Isa isa) {
  Dispatch d;
#if RBSDE_HAVE_AVX2
  if (isa == Isa::avx2) {
    d.pair_half_sum = detail::pair_half_sum_avx2;
    d.expand_mul = detail::expand_mul_avx2;
    d.mul = detail::mul_avx2;
    d.sum = detail::sum_avx2;
    d.dot = detail::dot_avx2;
    d.isa = Isa::avx2;
  }
#else
  (void)isa;
#endif
  return d;
}

Isa startup_isa() {
  if (const char* env = std::getenv("RBSDE_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Isa::avx2;
    return Isa::scalar;
  }
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

Dispatch& dispatch() {
  static Dispatch d = make_dispatch(startup_isa());
  return d;
}

}  // namespace

bool avx2_available() {
#if RBSDE_HAVE_AVX2
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active() { return dispatch().isa; }

void force(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
  dispatch() = make_dispatch(isa);
}

void pair_half_sum(const double* in, double* out, std::size_t n_out) {
  dispatch().pair_half_sum(in, out, n_out);
}

void expand_mul(const double* parent, const double* factor, double* out,
                std::size_t n_parent) {
  dispatch().expand_mul(parent, factor, out, n_parent);
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  dispatch().mul(a, b, out, n);
}

double sum(const double* x, std::size_t n) { return dispatch().sum(x, n); }

double dot(const double* w, const double* x, std::size_t n) {
  return dispatch().dot(w, x, n);
}

}  // namespace rbsde::kernels
