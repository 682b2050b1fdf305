#include "lowbend/random.hpp"

namespace lowbend {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

StreamKey::StreamKey(std::uint64_t s, std::string_view label, std::uint64_t i)
    : seed(s), label_hash(fnv1a64(label)), index(i) {}

StreamKey StreamKey::child(std::string_view label, std::uint64_t i) const {
  StreamKey k;
  k.seed = mix();
  k.label_hash = fnv1a64(label);
  k.index = i;
  return k;
}

std::uint64_t StreamKey::mix() const {
  return splitmix64(splitmix64(splitmix64(seed) ^ label_hash) ^ index);
}

}  // namespace lowbend
