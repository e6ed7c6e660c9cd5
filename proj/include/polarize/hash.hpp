#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace polarize {

/// 128-bit state fingerprint built from two independently seeded 64-bit
/// mixing streams. Used for visited-state sets and check memoization.
struct Fingerprint {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

struct FingerprintHash {
  std::size_t operator()(const Fingerprint& f) const noexcept {
    return static_cast<std::size_t>(f.hi ^ (f.lo * 0x9e3779b97f4a7c15ULL));
  }
};

class Hasher {
 public:
  void mix(std::uint64_t x) {
    a_ = step(a_ ^ x, 0xbf58476d1ce4e5b9ULL);
    b_ = step(b_ + x + 0x632be59bd9b4e019ULL, 0x94d049bb133111ebULL);
  }

  template <class T>
  void mix(const std::optional<T>& o) {
    mix(o.has_value() ? 1u : 0u);
    if (o) hash_into(*this, *o);
  }

  Fingerprint finish() const { return {step(a_, 0xd6e8feb86659fd93ULL), step(b_, 0xa0761d6478bd642fULL)}; }

 private:
  static std::uint64_t step(std::uint64_t z, std::uint64_t m) {
    z = (z ^ (z >> 30)) * m;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t a_ = 0x243f6a8885a308d3ULL;
  std::uint64_t b_ = 0x13198a2e03707344ULL;
};

inline void hash_into(Hasher& h, std::uint64_t v) { h.mix(v); }
inline void hash_into(Hasher& h, std::int64_t v) { h.mix(static_cast<std::uint64_t>(v)); }
inline void hash_into(Hasher& h, std::uint32_t v) { h.mix(v); }
inline void hash_into(Hasher& h, bool v) { h.mix(v ? 1u : 0u); }

template <class T>
void hash_into(Hasher& h, const std::vector<T>& xs) {
  h.mix(xs.size());
  for (const auto& x : xs) hash_into(h, x);
}

template <class K, class V>
void hash_into(Hasher& h, const std::map<K, V>& m) {
  h.mix(m.size());
  for (const auto& [k, v] : m) {
    hash_into(h, k);
    hash_into(h, v);
  }
}

template <class T>
Fingerprint fingerprint(const T& value) {
  Hasher h;
  hash_into(h, value);
  return h.finish();
}

}  // namespace polarize
