#include "trivol/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "io_util.hpp"
#include "trivol/errors.hpp"

namespace trivol {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::uint64_t parse_u64(const std::string& where, const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || v.empty()) {
    throw ConfigError(where + ": key " + key + " wants an unsigned integer, got \"" + v + "\"");
  }
  return out;
}

std::uint32_t parse_u32(const std::string& where, const std::string& key, const std::string& v) {
  const std::uint64_t out = parse_u64(where, key, v);
  if (out > 0xffffffffull) {
    throw ConfigError(where + ": key " + key + " value " + v + " exceeds 32 bits");
  }
  return static_cast<std::uint32_t>(out);
}

double parse_double(const std::string& where, const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || v.empty()) {
    throw ConfigError(where + ": key " + key + " wants a number, got \"" + v + "\"");
  }
  return out;
}

bool parse_bool(const std::string& where, const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(where + ": key " + key + " wants true/false, got \"" + v + "\"");
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Representation r) {
  switch (r) {
    case Representation::TriPlanar: return "triplanar";
    case Representation::Cp: return "cp";
    case Representation::Implicit: return "implicit";
  }
  throw ConfigError("unknown representation enum value");
}

std::string to_string(InitKind k) {
  return k == InitKind::Random ? "random" : "atlas";
}

std::string to_string(Combiner c) {
  return c == Combiner::Product ? "product" : "sum";
}

Representation parse_representation(const std::string& s) {
  if (s == "triplanar") return Representation::TriPlanar;
  if (s == "cp") return Representation::Cp;
  if (s == "implicit") return Representation::Implicit;
  throw ConfigError("representation must be triplanar|cp|implicit, got \"" + s + "\"");
}

InitKind parse_init_kind(const std::string& s) {
  if (s == "random") return InitKind::Random;
  if (s == "atlas") return InitKind::Atlas;
  throw ConfigError("init must be random|atlas, got \"" + s + "\"");
}

Combiner parse_combiner(const std::string& s) {
  if (s == "product") return Combiner::Product;
  if (s == "sum") return Combiner::Sum;
  throw ConfigError("combiner must be product|sum, got \"" + s + "\"");
}

TrainConfig implicit_baseline_config() {
  TrainConfig cfg;
  cfg.representation = Representation::Implicit;
  cfg.encoding.degree = 10;
  cfg.encoding.include_raw = true;
  cfg.mlp_layers = 6;
  cfg.mlp_width = 128;
  return cfg;
}

void validate_train_config(const TrainConfig& cfg) {
  validate(cfg.encoding);
  if (cfg.representation != Representation::Implicit) {
    if (cfg.field_res < 2) throw ConfigError("field_res must be >= 2");
    if (cfg.rank < 1) throw ConfigError("rank must be >= 1");
    if (cfg.channels < 1) throw ConfigError("channels must be >= 1");
    MlpConfig mcfg;
    mcfg.n_layers = cfg.mlp_layers;
    mcfg.hidden_width = cfg.mlp_width;
    mcfg.input_width = cfg.channels * encoded_scalar_width(cfg.encoding);
    validate_decoder_config(mcfg);
  } else {
    if (cfg.mlp_layers < 1 || cfg.mlp_layers > 8) {
      throw ConfigError("mlp_layers must be in [1, 8]");
    }
    if (cfg.mlp_width < 1 || cfg.mlp_width > 4096) {
      throw ConfigError("mlp_width must be in [1, 4096]");
    }
  }
  if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (cfg.eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (cfg.batch_slices < 1) throw ConfigError("batch_slices must be >= 1");
  for (auto [name, lr] : {std::pair<const char*, double>{"lr_field", cfg.lr_field},
                          {"lr_decoder", cfg.lr_decoder},
                          {"lr_pose", cfg.lr_pose}}) {
    if (!(std::isfinite(lr)) || lr <= 0.0) {
      throw ConfigError(std::string(name) + " must be finite and > 0");
    }
  }
  if (cfg.init == InitKind::Atlas && cfg.atlas_path.empty()) {
    throw ConfigError("init=atlas requires atlas_path");
  }
  if (!std::isfinite(cfg.stop_ssim)) throw ConfigError("stop_ssim must be finite");
}

std::string format_train_config(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "representation=" << to_string(cfg.representation) << "\n";
  out << "field_res=" << cfg.field_res << "\n";
  out << "rank=" << cfg.rank << "\n";
  out << "channels=" << cfg.channels << "\n";
  out << "combiner=" << to_string(cfg.combiner) << "\n";
  out << "encode_degree=" << cfg.encoding.degree << "\n";
  out << "encode_include_raw=" << (cfg.encoding.include_raw ? "true" : "false") << "\n";
  out << "mlp_layers=" << cfg.mlp_layers << "\n";
  out << "mlp_width=" << cfg.mlp_width << "\n";
  out << "epochs=" << cfg.epochs << "\n";
  out << "eval_every=" << cfg.eval_every << "\n";
  out << "batch_slices=" << cfg.batch_slices << "\n";
  out << "lr_field=" << fmt_double(cfg.lr_field) << "\n";
  out << "lr_decoder=" << fmt_double(cfg.lr_decoder) << "\n";
  out << "lr_pose=" << fmt_double(cfg.lr_pose) << "\n";
  out << "learn_poses=" << (cfg.learn_poses ? "true" : "false") << "\n";
  out << "seed=" << cfg.seed << "\n";
  out << "init=" << to_string(cfg.init) << "\n";
  out << "atlas_path=" << cfg.atlas_path << "\n";
  out << "stop_ssim=" << fmt_double(cfg.stop_ssim) << "\n";
  return out.str();
}

void write_train_config(const TrainConfig& cfg, const std::string& path) {
  detail::write_file(path, format_train_config(cfg));
}

TrainConfig parse_train_config_text(const std::string& text, const std::string& where) {
  TrainConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    const std::string at = where + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(at + ": expected key=value, got \"" + stripped + "\"");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError(at + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(at + ": duplicate key " + key);
    if (key == "representation") {
      cfg.representation = parse_representation(value);
    } else if (key == "field_res") {
      cfg.field_res = parse_u32(at, key, value);
    } else if (key == "rank") {
      cfg.rank = parse_u32(at, key, value);
    } else if (key == "channels") {
      cfg.channels = parse_u32(at, key, value);
    } else if (key == "combiner") {
      cfg.combiner = parse_combiner(value);
    } else if (key == "encode_degree") {
      cfg.encoding.degree = parse_u32(at, key, value);
    } else if (key == "encode_include_raw") {
      cfg.encoding.include_raw = parse_bool(at, key, value);
    } else if (key == "mlp_layers") {
      cfg.mlp_layers = parse_u32(at, key, value);
    } else if (key == "mlp_width") {
      cfg.mlp_width = parse_u32(at, key, value);
    } else if (key == "epochs") {
      cfg.epochs = parse_u32(at, key, value);
    } else if (key == "eval_every") {
      cfg.eval_every = parse_u32(at, key, value);
    } else if (key == "batch_slices") {
      cfg.batch_slices = parse_u32(at, key, value);
    } else if (key == "lr_field") {
      cfg.lr_field = parse_double(at, key, value);
    } else if (key == "lr_decoder") {
      cfg.lr_decoder = parse_double(at, key, value);
    } else if (key == "lr_pose") {
      cfg.lr_pose = parse_double(at, key, value);
    } else if (key == "learn_poses") {
      cfg.learn_poses = parse_bool(at, key, value);
    } else if (key == "seed") {
      cfg.seed = parse_u64(at, key, value);
    } else if (key == "init") {
      cfg.init = parse_init_kind(value);
    } else if (key == "atlas_path") {
      cfg.atlas_path = value;
    } else if (key == "stop_ssim") {
      cfg.stop_ssim = parse_double(at, key, value);
    } else {
      throw ConfigError(at + ": unknown key \"" + key + "\"");
    }
  }
  validate_train_config(cfg);
  return cfg;
}

TrainConfig parse_train_config(const std::string& path) {
  return parse_train_config_text(detail::read_file(path), path);
}

}  // namespace trivol
