#include "cellbench/dense_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "cellbench/atomic_file.hpp"

namespace cellbench {

namespace {

static_assert(std::endian::native == std::endian::little,
              "dense map I/O assumes a little-endian host");

}  // namespace

void write_dense_file(const std::filesystem::path& path, const DenseFile& file) {
  const DenseMap& m = file.map;
  nlohmann::json header = {
      {"format", "cellbench-dense"},
      {"version", kDenseFormatVersion},
      {"kind", file.kind},
      {"height", m.height()},
      {"width", m.width()},
      {"channels", m.channel_count()},
      {"channel_names", file.channel_names},
      {"dtype", "float32"},
      {"layout", "planar"},
  };
  std::string out = header.dump();
  out.push_back('\n');
  const std::size_t plane = static_cast<std::size_t>(m.height()) * static_cast<std::size_t>(m.width());
  const std::size_t offset = out.size();
  out.resize(offset + plane * static_cast<std::size_t>(m.channel_count()) * sizeof(float));
  char* dst = out.data() + offset;
  for (int c = 0; c < m.channel_count(); ++c) {
    for (const double v : m.channel(c)) {
      const auto f = static_cast<float>(v);
      std::memcpy(dst, &f, sizeof f);
      dst += sizeof f;
    }
  }
  write_file_atomic(path, out);
}

DenseFile read_dense_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dense map " + path.string());
  std::string header_line;
  std::getline(in, header_line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error("not a cellbench dense map: " + path.string());
  }
  if (header.value("format", "") != "cellbench-dense") {
    throw std::runtime_error("not a cellbench dense map: " + path.string());
  }
  if (header.value("version", 0) != kDenseFormatVersion || header.value("dtype", "") != "float32" ||
      header.value("layout", "") != "planar") {
    throw std::runtime_error("unsupported dense map encoding: " + path.string());
  }
  const int h = header.at("height").get<int>();
  const int w = header.at("width").get<int>();
  const int channels = header.at("channels").get<int>();
  DenseFile file{header.value("kind", ""),
                 header.value("channel_names", std::vector<std::string>{}),
                 DenseMap(h, w, channels)};
  const std::string payload{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const std::size_t plane = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  if (payload.size() != plane * static_cast<std::size_t>(channels) * sizeof(float)) {
    throw std::runtime_error("dense map payload size mismatch: " + path.string());
  }
  const char* src = payload.data();
  for (int c = 0; c < channels; ++c) {
    for (double& v : file.map.channel(c)) {
      float f = 0.0F;
      std::memcpy(&f, src, sizeof f);
      v = f;
      src += sizeof f;
    }
  }
  return file;
}

}  // namespace cellbench
