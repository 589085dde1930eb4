#include "mkmmd/kernels.hpp"

#include <sstream>

namespace mkmmd {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian:
      return "gaussian";
    case KernelFamily::laplacian:
      return "laplacian";
    case KernelFamily::anova:
      return "anova";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gaussian" || name == "rbf") return KernelFamily::gaussian;
  if (name == "laplacian") return KernelFamily::laplacian;
  if (name == "anova") return KernelFamily::anova;
  throw ConfigError("unknown kernel family '" + std::string(name) + "'");
}

std::string describe(const BaseKernel& k) {
  std::ostringstream out;
  out << to_string(k.family()) << "(rho=" << k.bandwidth() << ")";
  return out.str();
}

}  // namespace mkmmd
