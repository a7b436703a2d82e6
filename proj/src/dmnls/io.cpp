#include "dmnls/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dmnls/error.hpp"

namespace dmnls {
namespace {

constexpr std::array<char, 8> kMagic = {'D', 'M', 'N', 'L', 'S', '1', '\0', '\0'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, 8);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) fail(ErrorCode::Io, "snapshot: truncated file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

void append_g17(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string norms_csv(const NormSeries& series) {
  std::string out = kNormsHeader;
  out += '\n';
  const auto running = series.running();
  const auto& samples = series.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    for (double v : {s.t, s.mass, s.grad, s.jnorm, s.sup, running[i].x}) {
      append_g17(out, v);
      out += ',';
    }
    append_g17(out, running[i].s);
    out += '\n';
  }
  return out;
}

void write_norms_csv(const std::string& path, const NormSeries& series) {
  write_text(path, norms_csv(series));
}

NormSeries read_norms_csv(const std::string& path, double delta) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != kNormsHeader) {
    fail(ErrorCode::Io, "norms.csv: unexpected header in '" + path + "'");
  }
  NormSeries series(delta);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 7> v{};
    std::size_t pos = 0;
    for (std::size_t c = 0; c < v.size(); ++c) {
      const auto next = line.find(',', pos);
      const std::string cell = line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      try {
        v[c] = std::stod(cell);
      } catch (const std::exception&) {
        fail(ErrorCode::Io, "norms.csv: malformed cell '" + cell + "'");
      }
      if (next == std::string::npos && c + 1 < v.size()) fail(ErrorCode::Io, "norms.csv: short row");
      pos = next + 1;
    }
    series.append({v[0], v[1], v[2], v[3], v[4]});
  }
  return series;
}

void write_snapshot(const std::string& path, const Field& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "snapshot: cannot write '" + path + "'");
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint64_t>(out, field.size());
  put_le<double>(out, field.grid.half_width());
  put_le<double>(out, field.time);
  for (const auto& z : field.values) {
    put_le<double>(out, z.real());
    put_le<double>(out, z.imag());
  }
  if (!out) fail(ErrorCode::Io, "snapshot: write failed for '" + path + "'");
}

Field read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "snapshot: cannot open '" + path + "'");
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    fail(ErrorCode::Io, "snapshot: bad magic in '" + path + "'");
  }
  const auto n = get_le<std::uint64_t>(in);
  const auto half_width = get_le<double>(in);
  const auto t = get_le<double>(in);
  Field field(Grid(half_width, n), t);
  for (auto& z : field.values) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    z = cplx(re, im);
  }
  return field;
}

nlohmann::json profile_to_json(const ScatteringProfile& p, const nlohmann::json& meta) {
  const std::size_t n = p.W.size();
  std::vector<double> xi(n), w0r(n), w0i(n), wr(n), wi(n);
  for (std::size_t k = 0; k < n; ++k) {
    xi[k] = p.xi_grid.x(k);
    w0r[k] = p.W0[k].real();
    w0i[k] = p.W0[k].imag();
    wr[k] = p.W[k].real();
    wi[k] = p.W[k].imag();
  }
  nlohmann::json m = meta;
  m["T0"] = p.T0;
  m["avg"] = p.avg;
  m["window"] = {p.window_start, p.window_end};
  m["window_samples"] = p.samples;
  m["drift"] = p.drift;
  m["xi_half_width"] = p.xi_grid.half_width();
  return {{"xi", xi}, {"W0_re", w0r}, {"W0_im", w0i}, {"Phi", p.Phi},
          {"W_re", wr}, {"W_im", wi}, {"meta", m}};
}

ScatteringProfile profile_from_json(const nlohmann::json& doc) {
  try {
    const auto& meta = doc.at("meta");
    const auto w0r = doc.at("W0_re").get<std::vector<double>>();
    const auto w0i = doc.at("W0_im").get<std::vector<double>>();
    const auto wr = doc.at("W_re").get<std::vector<double>>();
    const auto wi = doc.at("W_im").get<std::vector<double>>();
    const std::size_t n = w0r.size();
    ScatteringProfile p{Grid(meta.at("xi_half_width").get<double>(), n), std::vector<cplx>(n),
                        doc.at("Phi").get<std::vector<double>>(), std::vector<cplx>(n)};
    if (w0i.size() != n || wr.size() != n || wi.size() != n || p.Phi.size() != n) {
      fail(ErrorCode::Io, "profile.json: arrays differ in length");
    }
    for (std::size_t k = 0; k < n; ++k) {
      p.W0[k] = cplx(w0r[k], w0i[k]);
      p.W[k] = cplx(wr[k], wi[k]);
    }
    p.T0 = meta.at("T0").get<double>();
    p.avg = meta.at("avg").get<double>();
    p.window_start = meta.at("window").at(0).get<double>();
    p.window_end = meta.at("window").at(1).get<double>();
    p.samples = meta.at("window_samples").get<std::size_t>();
    p.drift = meta.at("drift").get<double>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, std::string("profile.json: ") + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace dmnls
