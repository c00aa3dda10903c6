#pragma once

#include <filesystem>

#include "envelope/spectral.hpp"

namespace envelope {

struct Snapshot {
  SpectralField field;
  double t = 0.0;
};

// Layout: int64 N, int64 n, double t, then N * n interleaved (re, im) doubles,
// all little-endian. The torus length is not stored; pass it back in on read.
void write_snapshot(const std::filesystem::path& path, const SpectralField& f, double t);
Snapshot read_snapshot(const std::filesystem::path& path, double length);

// mode,k,component,re,im per line.
void write_snapshot_csv(const std::filesystem::path& path, const SpectralField& f, double t);

}  // namespace envelope
