#pragma once

#include <cstdint>
#include <limits>

namespace panelgls {

/// SplitMix64 finalizer (Stafford variant 13).
std::uint64_t mix64(std::uint64_t z);

/// Counter-based 64-bit generator: draw n of stream `key` is
/// mix64(key + (n + 1) * 0x9E3779B97F4A7C15), i.e. SplitMix64 started at `key`.
/// Any draw can be recomputed from (key, n) alone, so streams are cheap to
/// split and replications never share state.
///
/// Stream tree used by the simulator:
///   run seed s  ->  replication key  = s XOR r          (r = replication index)
///   replication ->  variate stream   = derive(key, id)  (id: factors, unit i, ...)
class CounterRng {
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return at(counter_++); }
  result_type at(std::uint64_t n) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  /// Key of child stream `id` of this stream.
  CounterRng derive(std::uint64_t id) const;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Marsaglia polar method, both variates used).
  double normal();

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace panelgls
