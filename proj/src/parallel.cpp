#include "qnd/parallel.hpp"

#include <cstdlib>

namespace qnd {

unsigned threads_from_env() {
  const char* raw = std::getenv("QND_SIM_THREADS");
  unsigned n = 0;
  if (raw != nullptr && *raw != '\0') {
    char* end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    if (end != raw && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

}  // namespace qnd
