#include "envelope/index_set.hpp"

#include <algorithm>
#include <set>

#include "envelope/types.hpp"

namespace envelope {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::svea1: return "svea1";
    case Variant::j3: return "j3";
    case Variant::j5: return "j5";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "svea1") return Variant::svea1;
  if (s == "j3") return Variant::j3;
  if (s == "j5") return Variant::j5;
  throw ValidationError("unknown variant '" + s + "' (expected svea1, j3 or j5)");
}

std::vector<int> positive_harmonics(Variant v) {
  switch (v) {
    case Variant::svea1: return {1};
    case Variant::j3: return {1, 3};
    case Variant::j5: return {1, 3, 5};
  }
  return {};
}

std::vector<int> signed_harmonics(Variant v) {
  std::vector<int> out;
  for (int j : positive_harmonics(v)) {
    out.push_back(-j);
    out.push_back(j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int max_harmonic(Variant v) { return positive_harmonics(v).back(); }

std::vector<IndexTriple> enumerate_index_set(int target, std::span<const int> jset) {
  std::vector<IndexTriple> out;
  for (int a : jset) {
    for (int b : jset) {
      for (int c : jset) {
        if (a + b + c == target) out.push_back({a, b, c});
      }
    }
  }
  return out;
}

std::vector<int> residual_harmonics(Variant v) {
  const std::vector<int> js = signed_harmonics(v);
  const int jmax = max_harmonic(v);
  std::set<int> targets;
  for (int a : js) {
    for (int b : js) {
      for (int c : js) {
        const int s = a + b + c;
        if (s > jmax) targets.insert(s);
      }
    }
  }
  return {targets.begin(), targets.end()};
}

}  // namespace envelope
