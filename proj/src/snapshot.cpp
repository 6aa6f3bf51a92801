#include "dtil/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace dtil {

namespace {

static_assert(sizeof(double) == 8);

template <class T>
void put(std::vector<char>& buf, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  buf.insert(buf.end(), raw, raw + sizeof(T));
}

template <class T>
T get(const char* p) {
  char raw[sizeof(T)];
  std::memcpy(raw, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  T v;
  std::memcpy(&v, raw, sizeof(T));
  return v;
}

constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 + 4;

void put_header(std::vector<char>& buf, const LatticeSpec& spec, std::uint32_t flags) {
  buf.insert(buf.end(), {'D', 'T', 'I', 'L'});
  put<std::uint32_t>(buf, kSnapshotVersion);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(spec.n_per_axis));
  put<double>(buf, spec.spacing);
  put<std::uint32_t>(buf, flags);
}

void put_matrices(std::vector<char>& buf, std::span<const Mat2> values) {
  for (const auto& x : values)
    for (const auto& z : x.m) {
      put<double>(buf, z.real());
      put<double>(buf, z.imag());
    }
}

void flush(std::ostream& os, const std::vector<char>& buf) {
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw SnapshotError("failed to write snapshot");
}

void read_exact(std::istream& is, char* dst, std::size_t n, const char* what) {
  is.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) throw SnapshotError(std::string("truncated snapshot: ") + what);
}

void get_matrices(const char* p, std::span<Mat2> values) {
  for (auto& x : values)
    for (auto& z : x.m) {
      z = cplx(get<double>(p), get<double>(p + 8));
      p += 16;
    }
}

}  // namespace

DensityField Snapshot::energy_density() const {
  if (density) return *density;
  if (state) return dtil::density(*state);
  throw SnapshotError("snapshot holds neither fields nor a density");
}

void write_snapshot(std::ostream& os, const FieldState& state) {
  const LatticeSpec& spec = state.spec();
  std::vector<char> buf;
  buf.reserve(kHeaderBytes + spec.sites() * 7 * 64);
  put_header(buf, spec, kHasConnection | kHasHiggs);
  put_matrices(buf, state.connection.values());
  put_matrices(buf, state.higgs.values());
  flush(os, buf);
}

void write_snapshot(std::ostream& os, const DensityField& density) {
  std::vector<char> buf;
  buf.reserve(kHeaderBytes + density.values.size() * 8);
  put_header(buf, density.spec, kDensityOnly);
  for (double v : density.values) put<double>(buf, v);
  flush(os, buf);
}

void write_snapshot(const std::string& path, const FieldState& state) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SnapshotError("cannot open " + path + " for writing");
  write_snapshot(os, state);
}

void write_snapshot(const std::string& path, const DensityField& density) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SnapshotError("cannot open " + path + " for writing");
  write_snapshot(os, density);
}

Snapshot read_snapshot(std::istream& is) {
  char head[kHeaderBytes];
  read_exact(is, head, kHeaderBytes, "header");
  if (std::memcmp(head, "DTIL", 4) != 0) throw SnapshotError("bad magic: not a DTIL snapshot");
  const auto version = get<std::uint32_t>(head + 4);
  if (version != kSnapshotVersion)
    throw SnapshotError("unsupported snapshot version " + std::to_string(version) + " (expected " +
                        std::to_string(kSnapshotVersion) + ")");
  const auto n = get<std::uint32_t>(head + 8);
  const double h = get<double>(head + 12);
  const auto flags = get<std::uint32_t>(head + 20);
  if (!(flags == kDensityOnly || (flags != 0 && (flags & ~3u) == 0)))
    throw SnapshotError("unknown snapshot flags " + std::to_string(flags));

  Snapshot snap;
  try {
    snap.spec = LatticeSpec(static_cast<int>(n), h);
  } catch (const std::invalid_argument& e) {
    throw SnapshotError(std::string("bad lattice in header: ") + e.what());
  }
  snap.flags = flags;
  const std::size_t N = snap.spec.sites();
  std::size_t expected = 0;
  if (flags & kHasConnection) expected += N * kDim * 64;
  if (flags & kHasHiggs) expected += N * 64;
  if (flags & kDensityOnly) expected += N * 8;

  // refuse to allocate for a payload the stream cannot hold
  const auto here = is.tellg();
  if (here != std::streampos(-1)) {
    is.seekg(0, std::ios::end);
    const auto end = is.tellg();
    is.seekg(here);
    if (end != std::streampos(-1)) {
      const auto avail = static_cast<std::size_t>(end - here);
      if (avail < expected) throw SnapshotError("truncated snapshot: payload shorter than header implies");
      if (avail > expected) throw SnapshotError("snapshot payload longer than header implies");
    }
  }

  std::vector<char> payload(expected);
  read_exact(is, payload.data(), expected, "payload");
  if (is.peek() != std::char_traits<char>::eof()) throw SnapshotError("snapshot payload longer than header implies");

  const char* p = payload.data();
  if (flags & (kHasConnection | kHasHiggs)) {
    FieldState st(snap.spec);
    if (flags & kHasConnection) {
      get_matrices(p, st.connection.values());
      p += N * kDim * 64;
    }
    if (flags & kHasHiggs) {
      get_matrices(p, st.higgs.values());
      p += N * 64;
    }
    snap.state = std::move(st);
  } else {
    DensityField d(snap.spec);
    for (std::size_t i = 0; i < N; ++i) d.values[i] = get<double>(p + 8 * i);
    snap.density = std::move(d);
  }
  return snap;
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SnapshotError("cannot open " + path);
  return read_snapshot(is);
}

FieldState read_state(const std::string& path) {
  Snapshot s = read_snapshot(path);
  if (!s.state) throw SnapshotError(path + " is a density-only snapshot; fields are required");
  return std::move(*s.state);
}

}  // namespace dtil
