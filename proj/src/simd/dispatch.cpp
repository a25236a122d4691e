#include "mfgpi/simd.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mfg::simd {

#if !MFGPI_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#if !MFGPI_HAVE_NEON
const KernelTable* neon_kernels() { return nullptr; }
#endif

namespace {

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &scalar_kernels();
    case Isa::avx2:
      return avx2_kernels();
    case Isa::neon:
      return neon_kernels();
  }
  return nullptr;
}

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& select_table() {
  if (const char* env = std::getenv("MFGPI_SIMD"); env && *env) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (want == isa_name(isa) && isa_supported(isa)) return *table_for(isa);
  }
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (isa_supported(isa)) return *table_for(isa);
  return scalar_kernels();
}

}  // namespace

bool isa_supported(Isa isa) { return table_for(isa) != nullptr && cpu_has(isa); }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& kernels() {
  static const KernelTable& active = select_table();
  return active;
}

Isa active_isa() {
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (&kernels() == table_for(isa)) return isa;
  return Isa::scalar;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument("SIMD table '" + std::string(isa_name(isa)) +
                                "' is not available on this machine");
  return *table_for(isa);
}

}  // namespace mfg::simd
