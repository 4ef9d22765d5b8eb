#include "stratsel/parallel.hpp"

#include <cstdlib>
#include <string>

namespace stratsel {

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("SSL_THREADS")) {
    try {
      const long v = std::stol(cap);
      if (v >= 1) n = std::min<std::size_t>(static_cast<std::size_t>(v), 256);
    } catch (const std::exception&) {
      // Unparseable values leave the default in place.
    }
  }
  return n;
}

}  // namespace stratsel
