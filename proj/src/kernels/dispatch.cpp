#include <atomic>
#include <cstdlib>
#include <string>

#include "ptun/kernels.hpp"

namespace ptun::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("PTUN_FORCE_SCALAR"); env != nullptr && std::string(env) == "1") return Isa::scalar;
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) return;
  selected().store(isa, std::memory_order_relaxed);
}

void reset_isa() { selected().store(detect(), std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void contract(const ContractArgs& args) {
  if (active_isa() == Isa::avx2) {
    contract_avx2(args);
  } else {
    contract_scalar(args);
  }
}

}  // namespace ptun::kernels
