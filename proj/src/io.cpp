#include "parseval/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace parseval::io {

namespace {

constexpr char kMagic[4] = {'P', 'S', 'V', 'B'};
constexpr std::uint8_t kMaxKind = 4;

template <class T>
void put(std::string& out, T value) {
  using U = std::make_unsigned_t<std::conditional_t<std::is_same_v<T, double>, std::int64_t, T>>;
  U bits;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = static_cast<U>(value);
  }
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  template <class U>
  U get_unsigned(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return v;
  }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) throw FormatError(FormatErrc::truncated, std::string("file truncated while reading ") + what);
  }

  const char* data() const { return bytes_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t payload_crc(const char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in blocks to stay portable for large payloads.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void check_version_and_magic(Reader& r) {
  if (r.remaining() < 4) throw FormatError(FormatErrc::truncated, "file shorter than the magic number");
  if (std::memcmp(r.data(), kMagic, 4) != 0) throw FormatError(FormatErrc::bad_magic, "not a PSVB container");
  r.skip(4);
  const auto version = r.get_unsigned<std::uint16_t>("version");
  if (version != kFormatVersion) {
    throw FormatError(FormatErrc::version_mismatch, "container version " + std::to_string(version) +
                                                        " is not supported (expected " +
                                                        std::to_string(kFormatVersion) + ")");
  }
}

[[noreturn]] void length_error(const std::string& what) { throw FormatError(FormatErrc::length_mismatch, what); }

[[noreturn]] void parse_error(const std::string& what) { throw FormatError(FormatErrc::parse, what); }

Index positive(std::int64_t v, const char* what) {
  if (v < 1) parse_error(std::string(what) + " must be positive");
  return v;
}

// Sequential cursor over a decoded header or payload with bounds checks.
template <class T>
class Cursor {
 public:
  Cursor(const std::vector<T>& v, const char* what) : v_(v), what_(what) {}
  T next() {
    if (i_ >= v_.size()) length_error(std::string(what_) + " shorter than declared");
    return v_[i_++];
  }
  void finish() const {
    if (i_ != v_.size()) length_error(std::string(what_) + " longer than declared");
  }

 private:
  const std::vector<T>& v_;
  const char* what_;
  std::size_t i_ = 0;
};

template <class Scalar>
std::string encode_signal_impl(const MultiSignal<Scalar>& s) {
  Container c;
  c.kind = FileKind::signal;
  c.complex = is_complex_v<Scalar>;
  c.header.push_back(static_cast<std::int64_t>(s.grid().dims()));
  for (Index n : s.grid().sizes()) c.header.push_back(n);
  c.header.push_back(s.channels());
  const auto& d = s.data();
  c.payload.reserve(static_cast<std::size_t>(d.size()) * (c.complex ? 2 : 1));
  for (Index n = 0; n < d.rows(); ++n) {
    for (Index k = 0; k < d.cols(); ++k) {
      if constexpr (is_complex_v<Scalar>) {
        c.payload.push_back(d(n, k).real());
        c.payload.push_back(d(n, k).imag());
      } else {
        c.payload.push_back(d(n, k));
      }
    }
  }
  return encode(c);
}

template <class Scalar>
MultiSignal<Scalar> decode_signal_impl(const std::string& bytes) {
  Container c = decode(bytes, FileKind::signal);
  if (c.complex != is_complex_v<Scalar>) {
    throw FormatError(FormatErrc::kind_mismatch, c.complex ? "signal is complex, a real signal was requested"
                                                           : "signal is real, a complex signal was requested");
  }
  Cursor<std::int64_t> h(c.header, "signal header");
  const auto d = positive(h.next(), "dimension");
  std::vector<Index> sizes;
  for (Index a = 0; a < d; ++a) sizes.push_back(positive(h.next(), "grid size"));
  const Index channels = positive(h.next(), "channel count");
  h.finish();
  Grid g(sizes);
  const std::size_t per = is_complex_v<Scalar> ? 2 : 1;
  if (c.payload.size() != static_cast<std::size_t>(channels * g.count()) * per) {
    length_error("signal payload length does not match its header");
  }
  ChannelArray<Scalar> data(channels, g.count());
  std::size_t i = 0;
  for (Index n = 0; n < channels; ++n) {
    for (Index k = 0; k < g.count(); ++k) {
      if constexpr (is_complex_v<Scalar>) {
        data(n, k) = Scalar(c.payload[i], c.payload[i + 1]);
        i += 2;
      } else {
        data(n, k) = c.payload[i++];
      }
    }
  }
  return MultiSignal<Scalar>(std::move(g), std::move(data));
}

void put_filter_header(std::vector<std::int64_t>& header, const Filter& h) {
  header.push_back(h.out_channels());
  header.push_back(h.in_channels());
  header.push_back(static_cast<std::int64_t>(h.tap_count()));
  for (const auto& t : h.taps()) header.insert(header.end(), t.offset.begin(), t.offset.end());
}

void put_filter_payload(std::vector<double>& payload, const Filter& h) {
  for (const auto& t : h.taps()) {
    for (Index m = 0; m < t.matrix.rows(); ++m) {
      for (Index n = 0; n < t.matrix.cols(); ++n) payload.push_back(t.matrix(m, n));
    }
  }
}

struct FilterShape {
  Index out = 0, in = 0;
  std::vector<Offset> offsets;
};

FilterShape read_filter_header(Cursor<std::int64_t>& h, std::size_t dims) {
  FilterShape s;
  s.out = positive(h.next(), "filter output channels");
  s.in = positive(h.next(), "filter input channels");
  const auto taps = h.next();
  if (taps < 0) parse_error("negative tap count");
  for (std::int64_t t = 0; t < taps; ++t) {
    Offset o(dims);
    for (auto& v : o) v = h.next();
    s.offsets.push_back(std::move(o));
  }
  return s;
}

Filter read_filter_payload(Cursor<double>& p, const FilterShape& s, std::size_t dims) {
  Filter f(s.out, s.in, dims);
  for (const auto& o : s.offsets) {
    Eigen::MatrixXd m(s.out, s.in);
    for (Index i = 0; i < s.out; ++i) {
      for (Index j = 0; j < s.in; ++j) m(i, j) = p.next();
    }
    try {
      f.add_tap(o, std::move(m));
    } catch (const std::invalid_argument& e) {
      parse_error(std::string("invalid filter tap: ") + e.what());
    }
  }
  return f;
}

void put_spline(std::vector<double>& payload, const SplineActivation& s) {
  payload.push_back(s.t_min);
  payload.push_back(s.t_max);
  payload.insert(payload.end(), s.values.begin(), s.values.end());
}

SplineActivation read_spline(Cursor<double>& p, Index knots) {
  SplineActivation s;
  s.t_min = p.next();
  s.t_max = p.next();
  s.values.resize(static_cast<std::size_t>(knots));
  for (auto& v : s.values) v = p.next();
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    parse_error(std::string("invalid spline: ") + e.what());
  }
  return s;
}

std::string lower_extension(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

void format_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

const char* kind_name(FileKind k) {
  switch (k) {
    case FileKind::signal: return "signal";
    case FileKind::filter: return "filter";
    case FileKind::mask: return "mask";
    case FileKind::weights: return "weights";
    case FileKind::spline: return "spline";
  }
  return "unknown";
}

std::string encode(const Container& c) {
  std::string out(kMagic, 4);
  put<std::uint16_t>(out, kFormatVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(c.kind));
  put<std::uint8_t>(out, c.complex ? 1 : 0);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.header.size()));
  for (auto v : c.header) put<std::int64_t>(out, v);
  put<std::uint64_t>(out, c.payload.size());
  const std::size_t start = out.size();
  for (double v : c.payload) put<double>(out, v);
  put<std::uint32_t>(out, payload_crc(out.data() + start, out.size() - start));
  return out;
}

FileKind peek_kind(const std::string& bytes) {
  Reader r(bytes);
  check_version_and_magic(r);
  const auto kind = r.get_unsigned<std::uint8_t>("kind");
  if (kind > kMaxKind) parse_error("unknown container kind " + std::to_string(kind));
  return static_cast<FileKind>(kind);
}

Container decode(const std::string& bytes, FileKind expected) {
  Reader r(bytes);
  check_version_and_magic(r);
  Container c;
  const auto kind = r.get_unsigned<std::uint8_t>("kind");
  if (kind > kMaxKind) parse_error("unknown container kind " + std::to_string(kind));
  c.kind = static_cast<FileKind>(kind);
  if (c.kind != expected) {
    throw FormatError(FormatErrc::kind_mismatch, std::string("file holds a ") + kind_name(c.kind) + ", expected a " +
                                                     kind_name(expected));
  }
  const auto cflag = r.get_unsigned<std::uint8_t>("complex flag");
  if (cflag > 1) parse_error("complex flag must be 0 or 1");
  c.complex = cflag == 1;
  const auto hcount = r.get_unsigned<std::uint32_t>("header count");
  r.need(static_cast<std::size_t>(hcount) * 8, "header");
  c.header.resize(hcount);
  for (auto& v : c.header) v = static_cast<std::int64_t>(r.get_unsigned<std::uint64_t>("header"));
  const auto pcount = r.get_unsigned<std::uint64_t>("payload count");
  if (pcount > r.remaining() / 8) throw FormatError(FormatErrc::truncated, "payload shorter than declared");
  const char* start = r.data();
  c.payload.resize(static_cast<std::size_t>(pcount));
  for (auto& v : c.payload) v = std::bit_cast<double>(r.get_unsigned<std::uint64_t>("payload"));
  const auto computed = payload_crc(start, static_cast<std::size_t>(pcount) * 8);
  const auto stored = r.get_unsigned<std::uint32_t>("checksum");
  if (r.remaining() != 0) length_error("trailing bytes after the checksum");
  if (stored != computed) throw FormatError(FormatErrc::crc_mismatch, "payload checksum mismatch");
  return c;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrc::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatErrc::io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatErrc::io, "write failed for " + path.string());
}

std::string encode_signal(const Signal& s) { return encode_signal_impl(s); }
std::string encode_signal(const ComplexSignal& s) { return encode_signal_impl(s); }
Signal decode_signal(const std::string& bytes) { return decode_signal_impl<double>(bytes); }
ComplexSignal decode_complex_signal(const std::string& bytes) { return decode_signal_impl<cd>(bytes); }

std::string encode_filter(const Filter& h) {
  Container c;
  c.kind = FileKind::filter;
  c.header.push_back(static_cast<std::int64_t>(h.dims()));
  put_filter_header(c.header, h);
  put_filter_payload(c.payload, h);
  return encode(c);
}

Filter decode_filter(const std::string& bytes) {
  Container c = decode(bytes, FileKind::filter);
  if (c.complex) parse_error("complex filters are not supported");
  Cursor<std::int64_t> h(c.header, "filter header");
  const auto dims = static_cast<std::size_t>(positive(h.next(), "dimension"));
  auto shape = read_filter_header(h, dims);
  h.finish();
  Cursor<double> p(c.payload, "filter payload");
  Filter f = read_filter_payload(p, shape, dims);
  p.finish();
  return f;
}

std::string encode_mask(const SamplingMask& m) {
  m.validate();
  Container c;
  c.kind = FileKind::mask;
  c.header = {2, m.grid.size(0), m.grid.size(1)};
  for (auto s : m.selected) c.payload.push_back(s ? 1.0 : 0.0);
  return encode(c);
}

SamplingMask decode_mask(const std::string& bytes) {
  Container c = decode(bytes, FileKind::mask);
  Cursor<std::int64_t> h(c.header, "mask header");
  if (h.next() != 2) parse_error("masks are two-dimensional");
  const Index rows = positive(h.next(), "mask rows");
  const Index cols = positive(h.next(), "mask columns");
  h.finish();
  SamplingMask m{Grid{rows, cols}, {}};
  if (c.payload.size() != static_cast<std::size_t>(rows * cols)) length_error("mask payload length mismatch");
  for (double v : c.payload) {
    if (v != 0.0 && v != 1.0) parse_error("mask entries must be 0 or 1");
    m.selected.push_back(v == 1.0 ? 1 : 0);
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    parse_error(e.what());
  }
  return m;
}

std::string encode_splines(const std::vector<SplineActivation>& s) {
  if (s.empty()) throw ValueError("no spline profiles to encode");
  Container c;
  c.kind = FileKind::spline;
  c.header = {static_cast<std::int64_t>(s.size()), static_cast<std::int64_t>(s.front().knot_count())};
  for (const auto& sp : s) {
    if (sp.knot_count() != s.front().knot_count()) throw ValueError("spline profiles in one file share a knot count");
    put_spline(c.payload, sp);
  }
  return encode(c);
}

std::vector<SplineActivation> decode_splines(const std::string& bytes) {
  Container c = decode(bytes, FileKind::spline);
  Cursor<std::int64_t> h(c.header, "spline header");
  const Index count = positive(h.next(), "profile count");
  const Index knots = positive(h.next(), "knot count");
  h.finish();
  Cursor<double> p(c.payload, "spline payload");
  std::vector<SplineActivation> out;
  for (Index i = 0; i < count; ++i) out.push_back(read_spline(p, knots));
  p.finish();
  return out;
}

std::string encode_weights(const CnnDenoiser& net) {
  net.validate();
  Container c;
  c.kind = FileKind::weights;
  c.header = {static_cast<std::int64_t>(net.filters.size()), static_cast<std::int64_t>(net.filters.front().dims()),
              net.biases.empty() ? 0 : 1};
  for (const auto& f : net.filters) put_filter_header(c.header, f);
  for (const auto& a : net.activations) {
    if (a.kind == ActivationLayer::Kind::relu) {
      c.header.insert(c.header.end(), {0, 0});
    } else {
      const auto knots = a.splines.front().knot_count();
      for (const auto& s : a.splines) {
        if (s.knot_count() != knots) throw ValueError("spline profiles in one layer share a knot count");
      }
      c.header.insert(c.header.end(), {1, static_cast<std::int64_t>(knots)});
    }
  }
  for (const auto& f : net.filters) put_filter_payload(c.payload, f);
  for (const auto& a : net.activations) {
    for (const auto& s : a.splines) put_spline(c.payload, s);
  }
  for (const auto& b : net.biases) c.payload.insert(c.payload.end(), b.data(), b.data() + b.size());
  return encode(c);
}

CnnDenoiser decode_weights(const std::string& bytes) {
  Container c = decode(bytes, FileKind::weights);
  Cursor<std::int64_t> h(c.header, "weights header");
  const Index layers = positive(h.next(), "layer count");
  const auto dims = static_cast<std::size_t>(positive(h.next(), "dimension"));
  const auto has_bias = h.next();
  if (has_bias != 0 && has_bias != 1) parse_error("bias flag must be 0 or 1");
  std::vector<FilterShape> shapes;
  for (Index l = 0; l < layers; ++l) shapes.push_back(read_filter_header(h, dims));
  std::vector<std::pair<std::int64_t, Index>> acts;
  for (Index l = 0; l + 1 < layers; ++l) {
    const auto kind = h.next();
    const auto knots = h.next();
    if (kind != 0 && kind != 1) parse_error("unknown activation kind");
    if (kind == 1 && knots < 2) parse_error("spline layers need at least two knots");
    acts.emplace_back(kind, knots);
  }
  h.finish();

  CnnDenoiser net;
  Cursor<double> p(c.payload, "weights payload");
  for (const auto& s : shapes) net.filters.push_back(read_filter_payload(p, s, dims));
  for (std::size_t l = 0; l < acts.size(); ++l) {
    if (acts[l].first == 0) {
      net.activations.push_back(ActivationLayer::relu_layer());
      continue;
    }
    std::vector<SplineActivation> per;
    for (Index ch = 0; ch < shapes[l].out; ++ch) per.push_back(read_spline(p, acts[l].second));
    net.activations.push_back(ActivationLayer::spline_layer(std::move(per)));
  }
  if (has_bias) {
    for (const auto& s : shapes) {
      Eigen::VectorXd b(s.out);
      for (Index i = 0; i < s.out; ++i) b(i) = p.next();
      net.biases.push_back(std::move(b));
    }
  }
  p.finish();
  try {
    net.validate();
  } catch (const std::invalid_argument& e) {
    parse_error(std::string("invalid network: ") + e.what());
  }
  return net;
}

void save(const std::filesystem::path& path, const Signal& s) { write_file(path, encode_signal(s)); }
void save(const std::filesystem::path& path, const ComplexSignal& s) { write_file(path, encode_signal(s)); }
void save(const std::filesystem::path& path, const Filter& h) { write_file(path, encode_filter(h)); }
void save(const std::filesystem::path& path, const SamplingMask& m) { write_file(path, encode_mask(m)); }
void save(const std::filesystem::path& path, const CnnDenoiser& net) { write_file(path, encode_weights(net)); }
void save(const std::filesystem::path& path, const std::vector<SplineActivation>& s) {
  write_file(path, encode_splines(s));
}

Signal load_signal(const std::filesystem::path& path) { return decode_signal(read_file(path)); }
Filter load_filter(const std::filesystem::path& path) { return decode_filter(read_file(path)); }
SamplingMask load_mask(const std::filesystem::path& path) { return decode_mask(read_file(path)); }
CnnDenoiser load_weights(const std::filesystem::path& path) { return decode_weights(read_file(path)); }
std::vector<SplineActivation> load_splines(const std::filesystem::path& path) {
  return decode_splines(read_file(path));
}

Signal load_pgm(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::size_t pos = 0;
  auto next_token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])) && bytes[pos] != '#') ++pos;
    if (start == pos) throw FormatError(FormatErrc::truncated, "PGM header ends early");
    return bytes.substr(start, pos - start);
  };
  auto next_int = [&]() {
    const std::string t = next_token();
    long v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || v < 0) parse_error("bad PGM integer '" + t + "'");
    return v;
  };
  const std::string magic = next_token();
  if (magic != "P2" && magic != "P5") throw FormatError(FormatErrc::bad_magic, "not a P2/P5 graymap");
  const long width = next_int();
  const long height = next_int();
  const long maxval = next_int();
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) parse_error("bad PGM dimensions or maxval");
  Signal s(Grid{height, width}, 1);
  const auto count = static_cast<std::size_t>(width * height);
  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = next_int();
      if (v > maxval) parse_error("PGM sample exceeds maxval");
      s(0, static_cast<Index>(i)) = static_cast<double>(v) / static_cast<double>(maxval);
    }
    return s;
  }
  ++pos;  // single whitespace after maxval
  const std::size_t bps = maxval < 256 ? 1 : 2;
  if (bytes.size() < pos + count * bps) throw FormatError(FormatErrc::truncated, "PGM raster shorter than declared");
  for (std::size_t i = 0; i < count; ++i) {
    unsigned v = static_cast<unsigned char>(bytes[pos + i * bps]);
    if (bps == 2) v = (v << 8) | static_cast<unsigned char>(bytes[pos + i * bps + 1]);
    if (static_cast<long>(v) > maxval) parse_error("PGM sample exceeds maxval");
    s(0, static_cast<Index>(i)) = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return s;
}

void save_pgm(const std::filesystem::path& path, const Signal& s) {
  if (s.grid().dims() != 2 || s.channels() != 1) throw DimensionError("PGM output needs a single-channel 2-D signal");
  std::string out = "P5\n" + std::to_string(s.grid().size(1)) + " " + std::to_string(s.grid().size(0)) + "\n255\n";
  for (Index k = 0; k < s.sites(); ++k) {
    const double v = std::clamp(s(0, k), 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  write_file(path, out);
}

std::string to_csv(const Signal& s) {
  std::string out = "grid=" + s.grid().str() + ",channels=" + std::to_string(s.channels()) + "\n";
  for (Index n = 0; n < s.channels(); ++n) {
    for (Index k = 0; k < s.sites(); ++k) {
      if (k) out.push_back(',');
      format_double(out, s(n, k));
    }
    out.push_back('\n');
  }
  return out;
}

Signal from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(FormatErrc::truncated, "empty CSV");
  const std::string gkey = "grid=", ckey = ",channels=";
  const auto cpos = line.find(ckey);
  if (line.rfind(gkey, 0) != 0 || cpos == std::string::npos) parse_error("CSV header must read grid=...,channels=...");
  Grid g = parse_grid(line.substr(gkey.size(), cpos - gkey.size()));
  Index channels = 0;
  const std::string cstr = line.substr(cpos + ckey.size());
  auto res = std::from_chars(cstr.data(), cstr.data() + cstr.size(), channels);
  if (res.ec != std::errc() || channels < 1) parse_error("bad channel count in CSV header");
  Signal s(g, channels);
  for (Index n = 0; n < channels; ++n) {
    if (!std::getline(in, line)) throw FormatError(FormatErrc::truncated, "CSV has fewer rows than channels");
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (Index k = 0; k < g.count(); ++k) {
      double v = 0.0;
      auto r = std::from_chars(p, end, v);
      if (r.ec != std::errc()) parse_error("bad CSV value in channel " + std::to_string(n));
      s(n, k) = v;
      p = r.ptr;
      if (k + 1 < g.count()) {
        if (p == end || *p != ',') length_error("CSV row " + std::to_string(n) + " is too short");
        ++p;
      }
    }
    if (p != end) length_error("CSV row " + std::to_string(n) + " is too long");
  }
  return s;
}

Signal load_any_signal(const std::filesystem::path& path) {
  const auto ext = lower_extension(path);
  if (ext == ".pgm") return load_pgm(path);
  if (ext == ".csv") return from_csv(read_file(path));
  return load_signal(path);
}

void save_any_signal(const std::filesystem::path& path, const Signal& s) {
  const auto ext = lower_extension(path);
  if (ext == ".pgm") {
    save_pgm(path, s);
  } else if (ext == ".csv") {
    write_file(path, to_csv(s));
  } else {
    save(path, s);
  }
}

Grid parse_grid(const std::string& text) {
  std::vector<Index> sizes;
  std::size_t start = 0;
  while (true) {
    const auto x = text.find('x', start);
    const std::string part = text.substr(start, x == std::string::npos ? std::string::npos : x - start);
    Index v = 0;
    auto r = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || r.ec != std::errc() || r.ptr != part.data() + part.size() || v < 1) {
      throw ValueError("bad grid '" + text + "', expected e.g. 64x64");
    }
    sizes.push_back(v);
    if (x == std::string::npos) break;
    start = x + 1;
  }
  return Grid(sizes);
}

}  // namespace parseval::io
