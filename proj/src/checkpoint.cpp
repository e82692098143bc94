#include "fsns/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fsns/error.hpp"

namespace fsns {

namespace {

constexpr std::size_t kHeaderBytes = 80;

std::uint64_t fnv1a(const std::uint8_t* p, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename U>
void put(std::vector<std::uint8_t>& out, U x) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t x) { put(out, x); }
void put_f64(std::vector<std::uint8_t>& out, double x) { put(out, std::bit_cast<std::uint64_t>(x)); }

template <typename U>
U get(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + sizeof(U) > in.size()) throw FormatError("checkpoint truncated");
  U x = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) x |= static_cast<U>(in[pos + i]) << (8 * i);
  pos += sizeof(U);
  return x;
}
double get_f64(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  return std::bit_cast<double>(get<std::uint64_t>(in, pos));
}

std::size_t horizontal_points(const GridSpec& s) {
  return static_cast<std::size_t>(s.nx) * (s.d == 2 ? s.ny : 1);
}

}  // namespace

Checkpoint capture(const FlowState& s, const Grid& grid, double A) {
  Checkpoint c;
  c.spec = grid.spec();
  c.eps = s.eps;
  c.t = s.t;
  c.A = A;
  c.v = s.v;
  c.h = s.surface.h;
  return c;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c) {
  const std::size_t nh = horizontal_points(c.spec);
  const std::size_t n = nh * static_cast<std::size_t>(c.spec.nz + 1);
  if (static_cast<int>(c.v.size()) != c.spec.d + 1) throw ShapeError("checkpoint: component count");
  for (const auto& f : c.v)
    if (f.size() != n) throw ShapeError("checkpoint: velocity size");
  if (c.h.size() != nh) throw ShapeError("checkpoint: surface size");

  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 8 * (n * c.v.size() + nh) + 8);
  out.insert(out.end(), std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(c.spec.d));
  put_u32(out, static_cast<std::uint32_t>(c.spec.nx));
  put_u32(out, static_cast<std::uint32_t>(c.spec.d == 2 ? c.spec.ny : 1));
  put_u32(out, static_cast<std::uint32_t>(c.spec.nz));
  put_u32(out, 0);
  for (double x : {c.spec.lx, c.spec.ly, c.spec.depth, c.eps, c.t, c.A}) put_f64(out, x);
  for (const auto& f : c.v)
    for (double x : f) put_f64(out, x);
  for (double x : c.h) put_f64(out, x);
  put(out, fnv1a(out.data(), out.size()));
  return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& in) {
  if (in.size() < kHeaderBytes + 8 || std::memcmp(in.data(), kCheckpointMagic, 8) != 0)
    throw FormatError("not a checkpoint");
  std::size_t pos = 8;
  if (get<std::uint32_t>(in, pos) != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version");
  Checkpoint c;
  c.spec.d = static_cast<int>(get<std::uint32_t>(in, pos));
  c.spec.nx = static_cast<int>(get<std::uint32_t>(in, pos));
  c.spec.ny = static_cast<int>(get<std::uint32_t>(in, pos));
  c.spec.nz = static_cast<int>(get<std::uint32_t>(in, pos));
  if (get<std::uint32_t>(in, pos) != 0) throw FormatError("checkpoint reserved field set");
  if (c.spec.d < 1 || c.spec.d > 2 || c.spec.nx < 1 || c.spec.ny < 1 || c.spec.nz < 1)
    throw FormatError("checkpoint dimensions invalid");
  c.spec.lx = get_f64(in, pos);
  c.spec.ly = get_f64(in, pos);
  c.spec.depth = get_f64(in, pos);
  c.eps = get_f64(in, pos);
  c.t = get_f64(in, pos);
  c.A = get_f64(in, pos);

  const std::size_t nh = horizontal_points(c.spec);
  const std::size_t n = nh * static_cast<std::size_t>(c.spec.nz + 1);
  const std::size_t expect = kHeaderBytes + 8 * (n * (c.spec.d + 1) + nh) + 8;
  if (in.size() != expect) throw FormatError("checkpoint size does not match its dimensions");
  std::size_t tail = in.size() - 8;
  if (get<std::uint64_t>(in, tail) != fnv1a(in.data(), in.size() - 8))
    throw FormatError("checkpoint checksum mismatch");

  c.v.assign(c.spec.d + 1, Field(n));
  for (auto& f : c.v)
    for (double& x : f) x = get_f64(in, pos);
  c.h.resize(nh);
  for (double& x : c.h) x = get_f64(in, pos);
  return c;
}

void write_checkpoint(const std::string& path, const Checkpoint& c) {
  const auto bytes = encode_checkpoint(c);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

FlowState restore(const Checkpoint& c, const Stepper& stepper) {
  const GridSpec& g = stepper.grid().spec();
  if (g.d != c.spec.d || g.nx != c.spec.nx || (g.d == 2 && g.ny != c.spec.ny) || g.nz != c.spec.nz ||
      g.lx != c.spec.lx || g.depth != c.spec.depth)
    throw ShapeError("checkpoint grid differs from the stepper grid");
  if (c.A != stepper.A()) throw ShapeError("checkpoint A differs from the stepper");
  FlowState s = stepper.make_state(c.v, SurfaceState::from_values(stepper.grid(), c.h), c.t);
  s.eps = c.eps;
  return s;
}

}  // namespace fsns
