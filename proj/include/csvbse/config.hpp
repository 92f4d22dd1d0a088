#ifndef CSVBSE_CONFIG_HPP
#define CSVBSE_CONFIG_HPP

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "csvbse/algorithms.hpp"
#include "csvbse/common.hpp"
#include "csvbse/simulate.hpp"
#include "csvbse/sourcemodel.hpp"
#include "csvbse/stft.hpp"

// Structured text configuration: INI-style sections of key = value lines.
// Keys may repeat within a section (used for lists such as microphones and
// waypoints). Parse errors carry the line number.
namespace csvbse::config {

struct Entry {
  std::string value;
  int line = 0;
};

class Ini {
 public:
  static Ini parse_text(const std::string& text, const std::string& origin = "<string>") {
    Ini ini;
    ini.origin_ = origin;
    ini.text_ = text;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          fail(ErrorCode::InvalidConfig,
               origin + ":" + std::to_string(line_no) + ": unterminated section header");
        section = trim(t.substr(1, t.size() - 2));
        if (section.empty())
          fail(ErrorCode::InvalidConfig,
               origin + ":" + std::to_string(line_no) + ": empty section name");
        ini.section_order_.push_back(section);
        ini.sections_[section];  // materialize even if empty
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        fail(ErrorCode::InvalidConfig,
             origin + ":" + std::to_string(line_no) + ": expected 'key = value', got '" + t + "'");
      const std::string key = trim(t.substr(0, eq));
      if (key.empty())
        fail(ErrorCode::InvalidConfig, origin + ":" + std::to_string(line_no) + ": empty key");
      ini.sections_[section][key].push_back({trim(t.substr(eq + 1)), line_no});
    }
    return ini;
  }

  static Ini parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
  }

  const std::string& text() const { return text_; }
  const std::string& origin() const { return origin_; }

  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }
  bool has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }
  // Sections in first-appearance order (used to find interferer sections).
  const std::vector<std::string>& section_names() const { return section_order_; }

  std::vector<std::string> values(const std::string& section, const std::string& key) const {
    std::vector<std::string> out;
    const auto s = sections_.find(section);
    if (s == sections_.end()) return out;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return out;
    for (const auto& e : k->second) out.push_back(e.value);
    return out;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
  }
  std::string require_string(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e)
      fail(ErrorCode::InvalidConfig,
           origin_ + ": missing required key '" + key + "' in section [" + section + "]");
    return e->value;
  }

  double get_double(const std::string& section, const std::string& key, double fallback) const {
    const Entry* e = find(section, key);
    return e ? to_double(*e, section, key) : fallback;
  }
  long get_int(const std::string& section, const std::string& key, long fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    try {
      std::size_t pos = 0;
      const long v = std::stol(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidConfig, where(*e, section, key) + ": expected an integer, got '" +
                                         e->value + "'");
    }
  }
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    fail(ErrorCode::InvalidConfig,
         where(*e, section, key) + ": expected a boolean, got '" + e->value + "'");
  }

  // Space-separated list of doubles (e.g. "4.0 4.0 2.5").
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) return {};
    return split_doubles(*e, section, key);
  }

  Vector3d get_vec3(const std::string& section, const std::string& key,
                    const Vector3d& fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const auto v = split_doubles(*e, section, key);
    if (v.size() != 3)
      fail(ErrorCode::InvalidConfig,
           where(*e, section, key) + ": expected three coordinates, got " +
               std::to_string(v.size()));
    return Vector3d(v[0], v[1], v[2]);
  }

  std::vector<Vector3d> get_vec3_list(const std::string& section, const std::string& key) const {
    std::vector<Vector3d> out;
    const auto s = sections_.find(section);
    if (s == sections_.end()) return out;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return out;
    for (const auto& e : k->second) {
      const auto v = split_doubles(e, section, key);
      if (v.size() != 3)
        fail(ErrorCode::InvalidConfig, where(e, section, key) + ": expected three coordinates");
      out.emplace_back(v[0], v[1], v[2]);
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second.back();  // last assignment wins
  }

  std::string where(const Entry& e, const std::string& section, const std::string& key) const {
    return origin_ + ":" + std::to_string(e.line) + ": [" + section + "] " + key;
  }

  double to_double(const Entry& e, const std::string& section, const std::string& key) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidConfig,
           where(e, section, key) + ": expected a number, got '" + e.value + "'");
    }
  }

  std::vector<double> split_doubles(const Entry& e, const std::string& section,
                                    const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(e.value);
    std::string tok;
    while (in >> tok) {
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        fail(ErrorCode::InvalidConfig,
             where(e, section, key) + ": expected numbers, got '" + tok + "'");
      }
    }
    return out;
  }

  std::string origin_;
  std::string text_;
  std::vector<std::string> section_order_;
  std::map<std::string, std::map<std::string, std::vector<Entry>>> sections_;
};

enum class AlgorithmName { OgiveW, BogiveW, OverIva, BlockAuxIve, PilotedBlockAuxIve };

inline AlgorithmName algorithm_from_name(const std::string& name) {
  if (name == "ogive_w") return AlgorithmName::OgiveW;
  if (name == "bogive_w") return AlgorithmName::BogiveW;
  if (name == "overiva") return AlgorithmName::OverIva;
  if (name == "block_auxive") return AlgorithmName::BlockAuxIve;
  if (name == "piloted_block_auxive") return AlgorithmName::PilotedBlockAuxIve;
  fail(ErrorCode::InvalidConfig, "unknown algorithm '" + name +
                                     "' (expected ogive_w, bogive_w, overiva, block_auxive or "
                                     "piloted_block_auxive)");
}

inline std::string algorithm_name(AlgorithmName a) {
  switch (a) {
    case AlgorithmName::OgiveW: return "ogive_w";
    case AlgorithmName::BogiveW: return "bogive_w";
    case AlgorithmName::OverIva: return "overiva";
    case AlgorithmName::BlockAuxIve: return "block_auxive";
    case AlgorithmName::PilotedBlockAuxIve: return "piloted_block_auxive";
  }
  fail(ErrorCode::InvalidConfig, "unhandled algorithm name");
}

inline bool is_gradient(AlgorithmName a) {
  return a == AlgorithmName::OgiveW || a == AlgorithmName::BogiveW;
}
inline bool is_single_block(AlgorithmName a) {
  return a == AlgorithmName::OgiveW || a == AlgorithmName::OverIva;
}
inline bool needs_pilot(AlgorithmName a) { return a == AlgorithmName::PilotedBlockAuxIve; }

// Everything one run needs: transform, estimator, and io/seed bookkeeping.
struct RunConfig {
  stft::StftConfig stft;
  AlgorithmName algorithm = AlgorithmName::BlockAuxIve;
  algorithms::AlgoConfig algo;
  double pilot_delta = 1.0;
  std::string pilot_text;  // per-frame magnitudes, one number per line
  std::string pilot_wav;   // or: waveform whose per-frame spectral norm pilots
  unsigned seed = 0;
  unsigned threads = 1;
};

inline RunConfig run_config_from(const Ini& ini) {
  RunConfig rc;
  rc.stft.fft_len = ini.get_int("stft", "fft_len", 512);
  rc.stft.hop = ini.get_int("stft", "hop", 128);
  rc.stft.window = stft::window_from_name(ini.get_string("stft", "window", "hamming"));
  rc.stft.validate();

  rc.algorithm = algorithm_from_name(ini.get_string("algorithm", "name", "block_auxive"));
  rc.algo.n_blocks = ini.get_int("algorithm", "blocks", is_single_block(rc.algorithm) ? 1 : 2);
  if (is_single_block(rc.algorithm) && rc.algo.n_blocks != 1)
    fail(ErrorCode::InvalidConfig,
         algorithm_name(rc.algorithm) + " is single-block; use its block-wise variant for blocks > 1");
  if (rc.algo.n_blocks < 1) fail(ErrorCode::InvalidConfig, "blocks must be >= 1");

  const long iters = ini.get_int("algorithm", "iters", is_gradient(rc.algorithm) ? 1000 : 100);
  if (iters < 1) fail(ErrorCode::InvalidConfig, "iters must be >= 1");
  rc.algo.max_iter = static_cast<int>(iters);
  rc.algo.aux_iters = static_cast<int>(iters);
  rc.algo.step_size = ini.get_double("algorithm", "step_size", 0.2);
  rc.algo.tol = ini.get_double("algorithm", "tol", 1e-4);
  rc.algo.aux_rel_tol = ini.get_double("algorithm", "rel_tol", 1e-6);
  rc.algo.ref_channel = ini.get_int("algorithm", "ref_channel", 0);
  rc.algo.record_trace = true;

  const std::string init = ini.get_string("algorithm", "init", "unit");
  if (init == "unit") {
    rc.algo.init = algorithms::InitKind::UnitVector;
  } else if (init == "steering") {
    rc.algo.init = algorithms::InitKind::SteeringVector;
    auto delays = ini.get_doubles("algorithm", "steering_delays");
    if (delays.empty())
      fail(ErrorCode::InvalidConfig, "steering init needs steering_delays (seconds per channel)");
    rc.algo.steering_delays =
        Eigen::Map<VectorXd>(delays.data(), static_cast<Eigen::Index>(delays.size()));
  } else {
    fail(ErrorCode::InvalidConfig, "unknown init '" + init + "' (expected unit or steering)");
  }

  rc.pilot_delta = ini.get_double("algorithm", "delta", 1.0);
  rc.pilot_text = ini.get_string("algorithm", "pilot", "");
  rc.pilot_wav = ini.get_string("algorithm", "pilot_wav", "");
  if (needs_pilot(rc.algorithm) && rc.pilot_text.empty() && rc.pilot_wav.empty())
    fail(ErrorCode::InvalidConfig,
         "piloted_block_auxive needs a pilot (set pilot = <text file> or pilot_wav = <wav>)");

  rc.seed = static_cast<unsigned>(ini.get_int("run", "seed", 0));
  return rc;
}

// Assemble a room scene from [room], [mics], [scenario], [target] and any
// [source.*] sections.
inline simulate::Scenario scenario_from(const Ini& ini) {
  simulate::Scenario sc;
  sc.room.dims = ini.get_vec3("room", "dims", sc.room.dims);
  sc.room.t60 = ini.get_double("room", "t60", sc.room.t60);
  sc.room.speed_of_sound = ini.get_double("room", "speed_of_sound", sc.room.speed_of_sound);

  sc.fs = ini.get_double("scenario", "fs", sc.fs);
  sc.duration = ini.get_double("scenario", "duration", 0.0);
  sc.mixture_rms = ini.get_double("scenario", "mixture_rms", sc.mixture_rms);
  sc.rir_taps = ini.get_int("scenario", "rir_taps", -1);

  sc.mics = ini.get_vec3_list("mics", "mic");
  if (sc.mics.empty())
    fail(ErrorCode::InvalidConfig, "no microphones ([mics] needs one 'mic = x y z' per channel)");

  auto parse_source = [&](const std::string& section) {
    simulate::SourceSpec src;
    src.kind = simulate::signal_kind_from_name(ini.get_string(section, "kind", "white"));
    src.wav_path = ini.get_string(section, "wav", "");
    if (src.kind == simulate::SignalKind::WavFile && src.wav_path.empty())
      fail(ErrorCode::InvalidConfig, "[" + section + "] kind = wav needs wav = <path>");
    src.level_db = ini.get_double(section, "level_db", 0.0);
    src.path.waypoints = ini.get_vec3_list(section, "waypoint");
    if (src.path.waypoints.empty())
      fail(ErrorCode::InvalidConfig, "[" + section + "] needs at least one 'waypoint = x y z'");
    auto dwells = ini.get_doubles(section, "dwells");
    if (dwells.empty()) {
      const double total = ini.get_double(section, "dwell_total", 0.0);
      if (!(total > 0.0))
        fail(ErrorCode::InvalidConfig,
             "[" + section + "] needs dwells (one per waypoint) or dwell_total");
      dwells.assign(src.path.waypoints.size(),
                    total / static_cast<double>(src.path.waypoints.size()));
    }
    if (dwells.size() != src.path.waypoints.size())
      fail(ErrorCode::InvalidConfig, "[" + section + "] dwells must match the waypoint count");
    src.path.dwells = dwells;
    src.path.crossfade_len = ini.get_int(section, "crossfade_len", -1);
    return src;
  };

  if (!ini.has_section("target")) fail(ErrorCode::InvalidConfig, "missing [target] section");
  sc.target = parse_source("target");
  std::vector<std::string> seen;
  for (const auto& name : ini.section_names()) {
    if (name.rfind("source.", 0) != 0) continue;
    if (std::find(seen.begin(), seen.end(), name) != seen.end()) continue;
    seen.push_back(name);
    sc.others.push_back(parse_source(name));
  }

  sc.validate();
  return sc;
}

// Synthetic transform-domain scene parameters ([synthetic] section).
struct SyntheticSpec {
  Eigen::Index bins = 64;
  Eigen::Index channels = 3;
  Eigen::Index blocks = 3;
  Eigen::Index frames_per_block = 200;
};

inline SyntheticSpec synthetic_from(const Ini& ini) {
  SyntheticSpec sp;
  sp.bins = ini.get_int("synthetic", "bins", sp.bins);
  sp.channels = ini.get_int("synthetic", "channels", sp.channels);
  sp.blocks = ini.get_int("synthetic", "blocks", sp.blocks);
  sp.frames_per_block = ini.get_int("synthetic", "frames_per_block", sp.frames_per_block);
  if (sp.bins < 1 || sp.channels < 2 || sp.blocks < 1 || sp.frames_per_block < 1)
    fail(ErrorCode::InvalidConfig, "[synthetic] needs bins >= 1, channels >= 2, blocks >= 1, "
                                   "frames_per_block >= 1");
  return sp;
}

// Bundled one-command scenes.
inline std::string preset_text(const std::string& name) {
  if (name == "room-4x4") {
    // 4 x 4 x 2.5 m room, 5-mic array at 5 cm spacing, target moving on an
    // arc around the array, static white-noise interferer.
    return R"(# preset: room-4x4
[room]
dims = 4 4 2.5
t60 = 0.1

[scenario]
fs = 16000
mixture_rms = 0.05

[mics]
mic = 1.90 2.00 1.20
mic = 1.95 2.00 1.20
mic = 2.00 2.00 1.20
mic = 2.05 2.00 1.20
mic = 2.10 2.00 1.20

[target]
kind = modulated
waypoint = 1.00 3.00 1.30
waypoint = 1.35 3.20 1.30
waypoint = 2.00 3.30 1.30
waypoint = 2.65 3.20 1.30
waypoint = 3.00 3.00 1.30
dwell_total = 6.0

[source.interferer]
kind = white
level_db = 0
waypoint = 3.20 0.80 1.40
dwells = 6.0

[stft]
fft_len = 512
hop = 128
window = hamming

[algorithm]
name = block_auxive
blocks = 3
iters = 100

[evaluate]
seeds = 5

[attmap]
grid = 0.4 3.6 9 0.4 3.6 9
z = 1.3
probe_duration = 0.5
)";
  }
  if (name == "grid-move") {
    // Target walking a line, position changing every second; block size near
    // 150 frames.
    return R"(# preset: grid-move
[room]
dims = 6 6 2.5
t60 = 0.1

[scenario]
fs = 16000
mixture_rms = 0.05

[mics]
mic = 2.95 3.00 1.20
mic = 3.00 3.00 1.20
mic = 3.05 3.00 1.20

[target]
kind = modulated
waypoint = 1.50 4.50 1.30
waypoint = 2.50 4.80 1.30
waypoint = 3.50 4.80 1.30
waypoint = 4.50 4.50 1.30
dwells = 1.0 1.0 1.0 1.0

[source.interferer]
kind = white
level_db = 0
waypoint = 4.80 1.20 1.40
dwells = 4.0

[stft]
fft_len = 512
hop = 128
window = hamming

[algorithm]
name = block_auxive
blocks = 3
iters = 100

[evaluate]
seeds = 5

[attmap]
grid = 0.5 5.5 9 0.5 5.5 9
z = 1.3
probe_duration = 0.5
)";
  }
  if (name == "oracle-csv") {
    // Synthetic transform-domain mixtures that satisfy the constant-
    // separating-vector model exactly; evaluate-only.
    return R"(# preset: oracle-csv
[synthetic]
bins = 32
channels = 3
blocks = 3
frames_per_block = 250

[algorithm]
name = block_auxive
blocks = 3
iters = 60

[evaluate]
seeds = 10
)";
  }
  fail(ErrorCode::InvalidConfig,
       "unknown preset '" + name + "' (expected room-4x4, grid-move or oracle-csv)");
}

}  // namespace csvbse::config

#endif  // CSVBSE_CONFIG_HPP
