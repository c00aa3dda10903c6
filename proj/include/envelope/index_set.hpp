#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace envelope {

using IndexTriple = std::array<int, 3>;

enum class Variant { svea1, j3, j5 };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

// Retained positive harmonics: {1}, {1, 3} or {1, 3, 5}.
std::vector<int> positive_harmonics(Variant v);
// Full signed index set, e.g. {-3, -1, 1, 3}.
std::vector<int> signed_harmonics(Variant v);
int max_harmonic(Variant v);

// All J in Jset^3 with j1 + j2 + j3 = target, in lexicographic order of Jset positions.
std::vector<IndexTriple> enumerate_index_set(int target, std::span<const int> jset);

// Positive targets j with |j| > max harmonic reached by triples of Jset (residual harmonics).
std::vector<int> residual_harmonics(Variant v);

}  // namespace envelope
