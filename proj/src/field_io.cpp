#include "zeitlin/field_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace zeitlin::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

constexpr std::uint32_t kVersion = 1;

struct Writer {
  std::vector<unsigned char> buf;
  void put(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    buf.insert(buf.end(), c, c + n);
  }
  template <class T>
  void put(T v) {
    put(&v, sizeof v);
  }
  void coeffs(const basis::QuantizedField& w) {
    for (int k = 0; k < w.size(); ++k) {
      put(w.coeffs()[k].real());
      put(w.coeffs()[k].imag());
    }
  }
  void save(const std::filesystem::path& file) {
    std::uint32_t crc = static_cast<std::uint32_t>(::crc32(0L, buf.data(), static_cast<uInt>(buf.size())));
    put(crc);
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!os) throw std::runtime_error("write failed: " + file.string());
  }
};

struct Reader {
  std::vector<unsigned char> buf;
  std::size_t pos = 0;
  std::string name;

  Reader(const std::filesystem::path& file, const char* magic) : name(file.string()) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + name);
    buf.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
    if (buf.size() < 12 || std::memcmp(buf.data(), magic, 4) != 0) throw std::runtime_error(name + ": bad magic");
    std::uint32_t crc;
    std::memcpy(&crc, buf.data() + buf.size() - 4, 4);
    if (crc != static_cast<std::uint32_t>(::crc32(0L, buf.data(), static_cast<uInt>(buf.size() - 4))))
      throw std::runtime_error(name + ": CRC mismatch");
    buf.resize(buf.size() - 4);
    pos = 4;
    if (get<std::uint32_t>() != kVersion) throw std::runtime_error(name + ": unsupported version");
  }
  template <class T>
  T get() {
    if (pos + sizeof(T) > buf.size()) throw std::runtime_error(name + ": truncated");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof v);
    pos += sizeof v;
    return v;
  }
  basis::QuantizedField coeffs(int N) {
    basis::QuantizedField w(N);
    for (int k = 0; k < w.size(); ++k) {
      double re = get<double>(), im = get<double>();
      w.coeffs()[k] = {re, im};
    }
    return w;
  }
  int level() {
    auto n = get<std::uint32_t>();
    if (n < 2 || n > 4096) throw std::runtime_error(name + ": bad level");
    return static_cast<int>(n);
  }
};

}  // namespace

void write_field(const std::filesystem::path& file, const basis::QuantizedField& w) {
  Writer wr;
  wr.put("ZFLD", 4);
  wr.put(kVersion);
  wr.put(static_cast<std::uint32_t>(w.N()));
  wr.coeffs(w);
  wr.save(file);
}

basis::QuantizedField read_field(const std::filesystem::path& file) {
  Reader rd(file, "ZFLD");
  auto w = rd.coeffs(rd.level());
  if (rd.pos != rd.buf.size()) throw std::runtime_error(rd.name + ": trailing bytes");
  return w;
}

nlohmann::json field_to_json(const basis::QuantizedField& w) {
  nlohmann::json j;
  j["N"] = w.N();
  auto arr = nlohmann::json::array();
  for (int k = 0; k < w.size(); ++k) {
    const auto c = w.coeffs()[k];
    if (c == basis::cplx(0.0)) continue;
    auto h = from_flat(k);
    arr.push_back({h.l, h.m, c.real(), c.imag()});
  }
  j["coeffs"] = arr;
  return j;
}

basis::QuantizedField field_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("N")) throw std::invalid_argument("field: missing 'N'");
  if (!j["N"].is_number_integer() || j["N"].get<int>() < 2) throw std::invalid_argument("field.N: integer >= 2 required");
  basis::QuantizedField w(j["N"].get<int>());
  if (!j.contains("coeffs")) return w;
  const auto& arr = j["coeffs"];
  if (!arr.is_array()) throw std::invalid_argument("field.coeffs: array required");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& e = arr[i];
    const std::string path = "field.coeffs[" + std::to_string(i) + "]";
    if (!e.is_array() || (e.size() != 3 && e.size() != 4)) throw std::invalid_argument(path + ": [l, m, re(, im)] required");
    int l = e[0].get<int>(), m = e[1].get<int>();
    if (l < 1 || l > w.lmax() || m < -l || m > l) throw std::invalid_argument(path + ": index out of range");
    w(l, m) = {e[2].get<double>(), e.size() == 4 ? e[3].get<double>() : 0.0};
  }
  return w;
}

basis::QuantizedField load_field(const std::filesystem::path& file) {
  if (file.extension() == ".json") {
    std::ifstream is(file);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    return field_from_json(nlohmann::json::parse(is));
  }
  return read_field(file);
}

void save_field(const std::filesystem::path& file, const basis::QuantizedField& w) {
  if (file.extension() == ".json") {
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    os << field_to_json(w).dump(2) << "\n";
    return;
  }
  write_field(file, w);
}

void write_trajectory(const std::filesystem::path& file, const dynamics::Trajectory& tr) {
  Writer wr;
  wr.put("ZTRJ", 4);
  wr.put(kVersion);
  wr.put(static_cast<std::uint32_t>(tr.N));
  wr.put(static_cast<std::uint64_t>(tr.states.size()));
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    wr.put(tr.times[i]);
    wr.coeffs(tr.states[i]);
  }
  wr.save(file);
}

dynamics::Trajectory read_trajectory(const std::filesystem::path& file) {
  Reader rd(file, "ZTRJ");
  dynamics::Trajectory tr;
  tr.N = rd.level();
  const auto frames = rd.get<std::uint64_t>();
  const std::size_t frame_bytes = 8 + 16 * static_cast<std::size_t>(mode_count(tr.N - 1));
  if (rd.buf.size() - rd.pos != frames * frame_bytes) throw std::runtime_error(rd.name + ": size mismatch");
  for (std::uint64_t i = 0; i < frames; ++i) {
    tr.times.push_back(rd.get<double>());
    tr.states.push_back(rd.coeffs(tr.N));
  }
  return tr;
}

}  // namespace zeitlin::io
