#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <random>
#include <span>

#include "gkex/bytes.hpp"

namespace gkex {

/// Source of random bytes. All protocol randomness flows through this
/// interface so runs are reproducible from an explicit seed and tests can
/// script exact draws.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  Bytes bytes(std::size_t n) {
    Bytes b(n);
    fill(b);
    return b;
  }
};

/// mt19937_64-backed source; byte stream is fully determined by the seed.
class SeededSource : public RandomSource {
 public:
  explicit SeededSource(std::uint64_t seed) : engine_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::mt19937_64 engine_;
};

/// Serves queued bytes first, then falls back to a seeded stream. Used by
/// tests to pin specific draws (e.g. a party's exponent) while leaving later
/// draws (signature nonces) random.
class ScriptedSource : public RandomSource {
 public:
  ScriptedSource(Bytes script, std::uint64_t fallback_seed)
      : script_(script.begin(), script.end()), fallback_(fallback_seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::deque<std::uint8_t> script_;
  SeededSource fallback_;
};

}  // namespace gkex
