#include <bit>
#include <cstring>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "fsns/checkpoint.hpp"
#include "fsns/error.hpp"
#include "helpers.hpp"

using namespace fsns;
using namespace fsns::test;

namespace {

const double kPi = std::numbers::pi;

Checkpoint small() {
  Checkpoint c;
  c.spec = {.d = 1, .nx = 4, .nz = 2, .lx = 2 * kPi, .depth = 2.0};
  c.eps = 0.01;
  c.t = 0.5;
  c.A = 1.25;
  const std::size_t n = 4 * 3;
  c.v = {Field(n), Field(n)};
  for (std::size_t k = 0; k < n; ++k) {
    c.v[0][k] = 0.5 * k;
    c.v[1][k] = -1.0 / (k + 1.0);
  }
  c.h = {0.1, -0.2, 0.3, -0.4};
  return c;
}

double f64_at(const std::vector<std::uint8_t>& b, std::size_t off) {
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[off + i]) << (8 * i);
  return std::bit_cast<double>(u);
}

std::uint32_t u32_at(const std::vector<std::uint8_t>& b, std::size_t off) {
  return b[off] | (b[off + 1] << 8) | (b[off + 2] << 16) | (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

}  // namespace

TEST_CASE("checkpoint bytes follow the documented layout") {
  const Checkpoint c = small();
  const auto b = encode_checkpoint(c);
  // 80 header + 8 (12 * 2 + 4) payload + 8 hash.
  REQUIRE(b.size() == 80 + 8 * 28 + 8);
  CHECK(std::memcmp(b.data(), "FSNSCKPT", 8) == 0);
  CHECK(u32_at(b, 8) == 1);
  CHECK(u32_at(b, 12) == 1);
  CHECK(u32_at(b, 16) == 4);
  CHECK(u32_at(b, 20) == 1);
  CHECK(u32_at(b, 24) == 2);
  CHECK(u32_at(b, 28) == 0);
  CHECK(f64_at(b, 32) == 2 * kPi);
  CHECK(f64_at(b, 48) == 2.0);
  CHECK(f64_at(b, 56) == 0.01);
  CHECK(f64_at(b, 64) == 0.5);
  CHECK(f64_at(b, 72) == 1.25);
  CHECK(f64_at(b, 80) == 0.0);
  CHECK(f64_at(b, 80 + 8 * 5) == 2.5);
  CHECK(f64_at(b, 80 + 8 * 12) == -1.0);
  CHECK(f64_at(b, 80 + 8 * 24) == 0.1);
  CHECK(f64_at(b, 80 + 8 * 27) == -0.4);
  // Independent FNV-1a of the prefix.
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i + 8 < b.size(); ++i) h = (h ^ b[i]) * 1099511628211ULL;
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i) stored |= static_cast<std::uint64_t>(b[b.size() - 8 + i]) << (8 * i);
  CHECK(stored == h);
}

TEST_CASE("checkpoint round trip is bit exact") {
  const Checkpoint c = small();
  const Checkpoint d = decode_checkpoint(encode_checkpoint(c));
  CHECK(d.spec.nx == 4);
  CHECK(d.spec.nz == 2);
  CHECK(d.spec.lx == c.spec.lx);
  CHECK(d.t == c.t);
  CHECK(d.v == c.v);
  CHECK(d.h == c.h);
  CHECK(encode_checkpoint(d) == encode_checkpoint(c));
}

TEST_CASE("corrupted checkpoints are rejected") {
  const auto good = encode_checkpoint(small());
  auto flip = good;
  flip[100] ^= 1;
  CHECK_THROWS_AS(decode_checkpoint(flip), FormatError);
  auto cut = good;
  cut.resize(cut.size() - 3);
  CHECK_THROWS_AS(decode_checkpoint(cut), FormatError);
  auto magic = good;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(magic), FormatError);
  auto version = good;
  version[8] = 2;
  CHECK_THROWS_AS(decode_checkpoint(version), FormatError);
  Checkpoint bad = small();
  bad.h.pop_back();
  CHECK_THROWS_AS(encode_checkpoint(bad), ShapeError);
}

TEST_CASE("restoring a checkpoint resumes the run exactly") {
  Grid g({.d = 1, .nx = 16, .nz = 16, .lx = 2 * kPi, .depth = 2.0});
  const auto chi = CutoffProfile::smooth_step();
  const Field h = sample_surface(g, [](double y) { return 0.02 * std::cos(y); });
  DynamicsConfig cfg;
  cfg.eps = 0.02;
  Stepper st(g, chi, choose_A(SurfaceState::from_values(g, h), chi, g), cfg);
  FlowState s = standing_wave(st, 0.02, 1.0);
  for (int i = 0; i < 3; ++i) s = st.step(s, 0.01);

  const auto path = std::filesystem::temp_directory_path() / "fsns_checkpoint_test.bin";
  write_checkpoint(path.string(), capture(s, g, st.A()));
  const FlowState r = restore(read_checkpoint(path.string()), st);
  std::filesystem::remove(path);
  CHECK(r.t == s.t);
  CHECK(r.v == s.v);
  CHECK(r.frame.J == s.frame.J);
  const FlowState a = st.step(s, 0.01), b = st.step(r, 0.01);
  CHECK(a.v == b.v);
  CHECK(a.surface.h == b.surface.h);

  Grid other({.d = 1, .nx = 8, .nz = 16, .lx = 2 * kPi, .depth = 2.0});
  Stepper so(other, chi, st.A(), cfg);
  CHECK_THROWS_AS(restore(capture(s, g, st.A()), so), ShapeError);
}
