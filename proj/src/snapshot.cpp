#include "swe/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>

#include "swe/error.hpp"

namespace swe {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'S', 'W', 'E', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 * 8;

template <class T>
void putLittle(std::vector<std::uint8_t>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  auto bits = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    out.push_back(static_cast<std::uint8_t>(bits & 0xffu));
    bits >>= 8;
  }
}

template <class T>
T getLittle(std::span<const std::uint8_t> in, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  if (pos + sizeof(U) > in.size()) throw ConfigError("snapshot truncated");
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) bits |= static_cast<U>(in[pos + b]) << (8 * b);
  pos += sizeof(U);
  return std::bit_cast<T>(bits);
}

GridSpec decodeHeader(std::span<const std::uint8_t> bytes, std::size_t& pos, double& time) {
  if (bytes.size() < kHeaderBytes || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw ConfigError("not an SWE1 snapshot");
  }
  pos = 4;
  GridSpec spec;
  spec.nx = static_cast<int>(getLittle<std::uint32_t>(bytes, pos));
  spec.ny = static_cast<int>(getLittle<std::uint32_t>(bytes, pos));
  spec.dx = getLittle<double>(bytes, pos);
  spec.x0 = getLittle<double>(bytes, pos);
  spec.y0 = getLittle<double>(bytes, pos);
  time = getLittle<double>(bytes, pos);
  spec.validate();
  return spec;
}

std::vector<std::uint8_t> readAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::vector<std::uint8_t> encodeSnapshot(const FieldSet& fields, double time) {
  const GridSpec& s = fields.spec;
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 4 * 8 * s.interiorSize());
  for (std::uint8_t b : kMagic) out.push_back(b);
  putLittle(out, static_cast<std::uint32_t>(s.nx));
  putLittle(out, static_cast<std::uint32_t>(s.ny));
  putLittle(out, s.dx);
  putLittle(out, s.x0);
  putLittle(out, s.y0);
  putLittle(out, time);
  for (const auto* field : {&fields.h, &fields.hu, &fields.hv, &fields.z}) {
    for (int j = 1; j <= s.ny; ++j) {
      for (int i = 1; i <= s.nx; ++i) putLittle(out, (*field)[fields.index(i, j)]);
    }
  }
  return out;
}

Snapshot decodeSnapshot(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  Snapshot snap;
  const GridSpec spec = decodeHeader(bytes, pos, snap.time);
  if (bytes.size() != kHeaderBytes + 4 * 8 * spec.interiorSize()) {
    throw ConfigError("snapshot payload size does not match its header");
  }
  snap.fields = FieldSet(spec);
  for (auto* field : {&snap.fields.h, &snap.fields.hu, &snap.fields.hv, &snap.fields.z}) {
    for (int j = 1; j <= spec.ny; ++j) {
      for (int i = 1; i <= spec.nx; ++i) (*field)[snap.fields.index(i, j)] = getLittle<double>(bytes, pos);
    }
  }
  return snap;
}

void writeSnapshot(const std::filesystem::path& path, const FieldSet& fields, double time) {
  const auto bytes = encodeSnapshot(fields, time);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write snapshot " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Snapshot readSnapshot(const std::filesystem::path& path) {
  const auto bytes = readAll(path);
  return decodeSnapshot(bytes);
}

GridSpec readSnapshotGrid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot " + path.string());
  std::vector<std::uint8_t> header(kHeaderBytes);
  in.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(header.size()));
  if (static_cast<std::size_t>(in.gcount()) != kHeaderBytes) throw ConfigError("snapshot truncated");
  std::size_t pos = 0;
  double time = 0.0;
  return decodeHeader(header, pos, time);
}

void writeFieldCsv(const std::filesystem::path& path, const FieldSet& f) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "i,j,x,y,h,hu,hv,z\n" << std::setprecision(17);
  for (int j = 1; j <= f.spec.ny; ++j) {
    for (int i = 1; i <= f.spec.nx; ++i) {
      const std::size_t k = f.index(i, j);
      out << i << ',' << j << ',' << f.spec.cellCenterX(i) << ',' << f.spec.cellCenterY(j) << ','
          << f.h[k] << ',' << f.hu[k] << ',' << f.hv[k] << ',' << f.z[k] << '\n';
    }
  }
}

}  // namespace swe
