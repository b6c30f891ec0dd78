#include "ergolab/skew.hpp"

#include <cstdio>
#include <cstring>

namespace ergolab::skew {

namespace {

std::uint64_t fnv1a(const char* data, std::size_t len, std::uint64_t h) {
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_double(double v, std::uint64_t h) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return fnv1a(buf, static_cast<std::size_t>(len), h);
}

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;

}  // namespace

std::uint64_t point_hash(const products::Point& x) {
  std::uint64_t h = kFnvOffset;
  for (long long v : x) {
    char buf[24];
    const int len = std::snprintf(buf, sizeof(buf), "%lld,", v);
    h = fnv1a(buf, static_cast<std::size_t>(len), h);
  }
  return h;
}

std::uint64_t point_hash(const gaussian::Vector& x) {
  std::uint64_t h = kFnvOffset;
  for (int i = 0; i < x.size(); ++i) h = hash_double(x[i], h);
  return h;
}

std::uint64_t point_hash(double x) { return hash_double(x, kFnvOffset); }

}  // namespace ergolab::skew
