#include "exbt/ml/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "exbt/error.hpp"

namespace exbt::ml {

namespace {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_string(std::ostream& out, const std::string& s) {
  if (s.size() > 0xFFFF) throw DataError("model file: name too long");
  put<std::uint16_t>(out, std::uint16_t(s.size()));
  out.write(s.data(), std::streamsize(s.size()));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw DataError("model file: truncated");
  return v;
}

std::string get_string(std::istream& in) {
  const auto len = get<std::uint16_t>(in);
  std::string s(len, '\0');
  if (!in.read(s.data(), len)) throw DataError("model file: truncated");
  return s;
}

}  // namespace

void save_model(const FittedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(kModelMagic, 4);
  put<std::uint16_t>(out, kModelFormatVersion);
  put_string(out, model.family());
  const auto blocks = model.parameters();
  put<std::uint32_t>(out, std::uint32_t(blocks.size()));
  for (const auto& b : blocks) {
    put_string(out, b.name);
    put<std::uint32_t>(out, std::uint32_t(b.data.rows()));
    put<std::uint32_t>(out, std::uint32_t(b.data.cols()));
    out.write(reinterpret_cast<const char*>(b.data.data()),
              std::streamsize(sizeof(double) * std::size_t(b.data.size())));
  }
  if (!out) throw DataError("error writing " + path.string());
}

SavedModel read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0) {
    throw DataError(path.string() + ": not a model file (bad magic)");
  }
  SavedModel m;
  m.version = get<std::uint16_t>(in);
  if (m.version != kModelFormatVersion) {
    throw DataError(path.string() + ": unsupported model format version " + std::to_string(m.version));
  }
  m.family = get_string(in);
  const auto count = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    ParameterBlock b;
    b.name = get_string(in);
    const auto rows = get<std::uint32_t>(in);
    const auto cols = get<std::uint32_t>(in);
    b.data.resize(rows, cols);
    if (!in.read(reinterpret_cast<char*>(b.data.data()),
                 std::streamsize(sizeof(double) * std::size_t(b.data.size())))) {
      throw DataError(path.string() + ": truncated block '" + b.name + "'");
    }
    m.blocks.push_back(std::move(b));
  }
  return m;
}

std::unique_ptr<FittedModel> load_model(const std::filesystem::path& path) {
  SavedModel m = read_model_file(path);
  return restore_model(m.family, m.blocks);
}

}  // namespace exbt::ml
