#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "parseval/builders.hpp"
#include "parseval/inverse.hpp"

namespace parseval::io {

// Binary container, all integers and floats little-endian:
//   "PSVB" | u16 version | u8 kind | u8 complex | u32 header count | i64 header[...]
//   | u64 payload count | f64 payload[...] | u32 CRC-32 of the payload bytes

enum class FileKind : std::uint8_t { signal = 0, filter = 1, mask = 2, weights = 3, spline = 4 };

constexpr std::uint16_t kFormatVersion = 1;

const char* kind_name(FileKind k);

struct Container {
  FileKind kind = FileKind::signal;
  bool complex = false;
  std::vector<std::int64_t> header;
  std::vector<double> payload;
};

std::string encode(const Container& c);

/// Throws FormatError with a code per failure mode; `expected` guards cross-kind loads.
Container decode(const std::string& bytes, FileKind expected);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

/// Kind stored in an encoded container, after magic and version checks.
FileKind peek_kind(const std::string& bytes);

// Typed codecs. Signal payload: channel-major, sites row-major; complex entries as (re, im) pairs.
std::string encode_signal(const Signal& s);
std::string encode_signal(const ComplexSignal& s);
Signal decode_signal(const std::string& bytes);
ComplexSignal decode_complex_signal(const std::string& bytes);

// Filter header: d, M, N, tap count, then d offsets per tap; payload: row-major M x N per tap.
std::string encode_filter(const Filter& h);
Filter decode_filter(const std::string& bytes);

// Mask header: 2, rows, cols; payload: one 0/1 per bin.
std::string encode_mask(const SamplingMask& m);
SamplingMask decode_mask(const std::string& bytes);

// Spline header: profile count, knot count; payload per profile: t_min, t_max, knot values.
std::string encode_splines(const std::vector<SplineActivation>& s);
std::vector<SplineActivation> decode_splines(const std::string& bytes);

// Weights header: layer count L, d, has-bias flag, then per filter (M, N, taps, offsets...)
// and per activation (kind 0 relu / 1 spline, knot count); payload: filter taps, spline
// profiles, then biases, in layer order.
std::string encode_weights(const CnnDenoiser& net);
CnnDenoiser decode_weights(const std::string& bytes);

void save(const std::filesystem::path& path, const Signal& s);
void save(const std::filesystem::path& path, const ComplexSignal& s);
void save(const std::filesystem::path& path, const Filter& h);
void save(const std::filesystem::path& path, const SamplingMask& m);
void save(const std::filesystem::path& path, const CnnDenoiser& net);
void save(const std::filesystem::path& path, const std::vector<SplineActivation>& s);

Signal load_signal(const std::filesystem::path& path);
Filter load_filter(const std::filesystem::path& path);
SamplingMask load_mask(const std::filesystem::path& path);
CnnDenoiser load_weights(const std::filesystem::path& path);
std::vector<SplineActivation> load_splines(const std::filesystem::path& path);

/// Plain graymap, P2 or P5 (8 or 16 bit); values scaled to [0, 1].
Signal load_pgm(const std::filesystem::path& path);
/// Binary P5, 8 bit; values clamped to [0, 1] and rounded.
void save_pgm(const std::filesystem::path& path, const Signal& s);

/// One header line "grid=<n1>x<n2>...,channels=<N>", then one comma-separated line per channel.
/// Values use shortest round-trip formatting.
std::string to_csv(const Signal& s);
Signal from_csv(const std::string& text);

/// Signal by extension: .psvb, .pgm, .csv.
Signal load_any_signal(const std::filesystem::path& path);
void save_any_signal(const std::filesystem::path& path, const Signal& s);

/// Parses "64x64" or "128".
Grid parse_grid(const std::string& text);

/// Module chain description (JSON).
struct ChainSpec {
  std::size_t dims = 2;
  Index in_channels = 1;
  std::uint64_t seed = 0;
  ModuleChain chain;
  std::vector<double> gains;  ///< per module; 1 except in negative controls
};

ChainSpec parse_chain_spec(const std::string& json_text);
ChainSpec load_chain_spec(const std::filesystem::path& path);

/// gain_I H_I * ... * gain_1 H_1
Filter compile(const ChainSpec& spec);

/// Denoiser description (JSON): frame-threshold over a named frame, or CNN weights.
struct DenoiserSpec {
  enum class Type { frame_threshold, cnn, identity };
  Type type = Type::frame_threshold;
  std::string frame = "wavelet";  ///< dct | wavelet | chain
  Index frame_size = 2;
  int levels = 3;
  bool pass_lowpass = true;
  ChainSpec frame_chain;
  double tau = 0.015;
  double beta = 0.4;
  std::filesystem::path weights;
  bool renormalize = false;
};

DenoiserSpec parse_denoiser_spec(const std::string& json_text, const std::filesystem::path& base_dir = {});
DenoiserSpec load_denoiser_spec(const std::filesystem::path& path);

/// Analysis filter named by a frame-threshold spec.
Filter frame_filter(const DenoiserSpec& spec);

struct BuiltDenoiser {
  SignalMap residual;
  double beta = 0.4;
  std::vector<std::string> audit;
};

/// Instantiates R on `grid`; CNN weights are certified and rejected unless spec.renormalize.
BuiltDenoiser build_denoiser(const DenoiserSpec& spec, const Grid& grid);

}  // namespace parseval::io
