#include "npd/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace npd::io {
namespace {

template <class U>
U to_little(U v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    U out = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) {
      out = static_cast<U>((out << 8) | ((v >> (8 * b)) & 0xff));
    }
    return out;
  }
}

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  void u32(std::uint32_t v) { raw(to_little(v)); }
  void f64(double v) { raw(to_little(std::bit_cast<std::uint64_t>(v))); }
  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }

 private:
  template <class U>
  void raw(U v) { bytes(&v, sizeof v); }
  std::ofstream& out_;
};

class Reader {
 public:
  Reader(std::ifstream& in, const std::filesystem::path& path) : in_(in), path_(path) {}
  std::uint32_t u32() { return to_little(raw<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(to_little(raw<std::uint64_t>())); }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw CheckpointError(path_.string() + ": truncated checkpoint");
    }
  }

 private:
  template <class U>
  U raw() {
    U v;
    bytes(&v, sizeof v);
    return v;
  }
  std::ifstream& in_;
  const std::filesystem::path& path_;
};

NpdState read_impl(const std::filesystem::path& path, GridPtr grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  Reader r(in, path);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw CheckpointError(path.string() + ": not a checkpoint (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError(path.string() + ": unsupported checkpoint version " +
                          std::to_string(version));
  }
  const std::uint32_t nx = r.u32(), ny = r.u32(), nz = r.u32();
  const std::uint32_t species = r.u32();
  const std::uint32_t flags = r.u32();
  if (nx != ny || ny != nz) throw CheckpointError(path.string() + ": grid must be cubic");
  if (species == 0) throw CheckpointError(path.string() + ": no species");

  NpdState state;
  state.time = r.f64();
  GridSpec spec;
  spec.box_length = r.f64();
  spec.resolution = static_cast<int>(nx);
  spec.dealias_fraction = r.f64();
  state.params.diffusivity = r.f64();
  state.params.allow_unequal_valence = (flags & 1u) != 0;
  for (std::uint32_t i = 0; i < species; ++i) state.params.valences.push_back(r.f64());

  if (grid) {
    if (!(grid->spec() == spec)) {
      throw CheckpointError(path.string() + ": grid differs from the requested grid");
    }
  } else {
    try {
      grid = Grid::make(spec);
    } catch (const std::invalid_argument& e) {
      throw CheckpointError(path.string() + ": invalid grid: " + e.what());
    }
  }

  const auto count = static_cast<std::size_t>(grid->spectral_size());
  for (std::uint32_t i = 0; i < species; ++i) {
    SpectralField c = SpectralField::zeros(grid);
    if constexpr (std::endian::native == std::endian::little) {
      r.bytes(c.coeffs.data(), count * sizeof(Complex));
    } else {
      for (std::size_t k = 0; k < count; ++k) {
        const double re = r.f64();
        const double im = r.f64();
        c.coeffs(static_cast<Eigen::Index>(k)) = {re, im};
      }
    }
    state.concentrations.push_back(std::move(c));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CheckpointError(path.string() + ": trailing bytes after payload");
  }
  return state;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const NpdState& state) {
  if (state.concentrations.empty()) throw CheckpointError("write_checkpoint: empty state");
  const GridSpec& spec = state.grid()->spec();
  const auto n = static_cast<std::uint32_t>(spec.resolution);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp.string());
    Writer w(out);
    w.bytes(kCheckpointMagic, sizeof kCheckpointMagic);
    w.u32(kCheckpointVersion);
    w.u32(n);
    w.u32(n);
    w.u32(n);
    w.u32(static_cast<std::uint32_t>(state.species_count()));
    w.u32(state.params.allow_unequal_valence ? 1u : 0u);
    w.f64(state.time);
    w.f64(spec.box_length);
    w.f64(spec.dealias_fraction);
    w.f64(state.params.diffusivity);
    for (double z : state.params.valences) w.f64(z);
    for (const auto& c : state.concentrations) {
      require_same_grid(state.grid(), c.grid);
      if constexpr (std::endian::native == std::endian::little) {
        w.bytes(c.coeffs.data(), static_cast<std::size_t>(c.coeffs.size()) * sizeof(Complex));
      } else {
        for (Eigen::Index k = 0; k < c.coeffs.size(); ++k) {
          w.f64(c.coeffs(k).real());
          w.f64(c.coeffs(k).imag());
        }
      }
    }
    out.flush();
    if (!out) throw CheckpointError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

NpdState read_checkpoint(const std::filesystem::path& path) { return read_impl(path, nullptr); }

NpdState read_checkpoint(const std::filesystem::path& path, const GridPtr& grid) {
  return read_impl(path, grid);
}

}  // namespace npd::io
