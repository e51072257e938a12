#include "gkex/rng.hpp"

namespace gkex {

void SeededSource::fill(std::span<std::uint8_t> out) {
  for (auto &b : out) b = static_cast<std::uint8_t>(engine_() & 0xff);
}

void ScriptedSource::fill(std::span<std::uint8_t> out) {
  for (auto &b : out) {
    if (!script_.empty()) {
      b = script_.front();
      script_.pop_front();
    } else {
      std::uint8_t one;
      fallback_.fill({&one, 1});
      b = one;
    }
  }
}

}  // namespace gkex
