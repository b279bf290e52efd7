#include "trivol/checkpoint.hpp"

#include <cmath>
#include <string>

#include "io_util.hpp"
#include "trivol/errors.hpp"

namespace trivol {

namespace {

constexpr char kModelMagic[9] = "RFLDv001";
constexpr std::uint8_t kKindTriPlanar = 0;
constexpr std::uint8_t kKindCp = 1;
constexpr std::uint8_t kKindImplicit = 2;

void check_finite_block(const std::string& path, const std::vector<float>& block,
                        const char* what) {
  for (float v : block) {
    if (!std::isfinite(v)) throw IoError(path + ": non-finite value in " + what);
  }
}

void put_dims(std::string& out, const std::array<std::uint32_t, 3>& res, std::uint32_t rank,
              std::uint32_t channels) {
  detail::put_u32le(out, res[0]);
  detail::put_u32le(out, res[1]);
  detail::put_u32le(out, res[2]);
  detail::put_u32le(out, rank);
  detail::put_u32le(out, channels);
}

void put_decoder(std::string& out, const Mlp& mlp) {
  detail::put_u32le(out, mlp.cfg.n_layers);
  for (std::uint32_t l = 0; l < mlp.cfg.n_layers; ++l) {
    detail::put_u32le(out, mlp.in_dim(l));
    detail::put_u32le(out, mlp.out_dim(l));
    detail::put_f32le_block(out, mlp.weights[l].data(), mlp.weights[l].size());
    detail::put_f32le_block(out, mlp.biases[l].data(), mlp.biases[l].size());
  }
}

Mlp read_decoder(const std::string& path, detail::Cursor& cur) {
  const std::uint32_t n_layers = cur.u32le();
  if (n_layers < 1 || n_layers > 8) {
    throw IoError(path + ": decoder layer count " + std::to_string(n_layers) +
                  " outside [1, 8]");
  }
  Mlp mlp;
  mlp.cfg.n_layers = n_layers;
  mlp.weights.resize(n_layers);
  mlp.biases.resize(n_layers);
  std::uint32_t prev_out = 0;
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    const std::uint32_t in = cur.u32le();
    const std::uint32_t out = cur.u32le();
    if (in < 1 || in > 4096 || out < 1 || out > 4096) {
      throw IoError(path + ": decoder layer " + std::to_string(l) + " dims " +
                    std::to_string(in) + "x" + std::to_string(out) + " outside [1, 4096]");
    }
    if (l == 0) {
      mlp.cfg.input_width = in;
    } else if (in != prev_out) {
      throw IoError(path + ": decoder layer " + std::to_string(l) + " input width " +
                    std::to_string(in) + " != previous output width " + std::to_string(prev_out));
    }
    if (l + 1 == n_layers) {
      if (out != 1) {
        throw IoError(path + ": decoder final layer output width " + std::to_string(out) +
                      " != 1");
      }
    } else {
      if (l == 0) {
        mlp.cfg.hidden_width = out;
      } else if (out != mlp.cfg.hidden_width) {
        throw IoError(path + ": decoder hidden widths differ (" + std::to_string(out) + " vs " +
                      std::to_string(mlp.cfg.hidden_width) + ")");
      }
    }
    prev_out = out;
    mlp.weights[l].resize(std::size_t(out) * in);
    mlp.biases[l].resize(out);
    cur.f32le_block(mlp.weights[l].data(), mlp.weights[l].size());
    cur.f32le_block(mlp.biases[l].data(), mlp.biases[l].size());
    check_finite_block(path, mlp.weights[l], "decoder weights");
    check_finite_block(path, mlp.biases[l], "decoder biases");
  }
  if (n_layers == 1) mlp.cfg.hidden_width = mlp.cfg.input_width;
  return mlp;
}

Combiner read_combiner(const std::string& path, std::uint8_t raw) {
  if (raw > 1) throw IoError(path + ": unknown combiner code " + std::to_string(raw));
  return static_cast<Combiner>(raw);
}

}  // namespace

void validate_model(const Model& model) {
  validate(model.encoding);
  const std::uint32_t want =
      field_channels(model.field) * encoded_scalar_width(model.encoding);
  if (model.decoder.cfg.input_width != want) {
    throw ShapeError("decoder input width " + std::to_string(model.decoder.cfg.input_width) +
                     " != channels * encoded width = " + std::to_string(want));
  }
  if (model.decoder.out_dim(model.decoder.cfg.n_layers - 1) != 1) {
    throw ShapeError("decoder must emit a single intensity");
  }
}

void save_model(const Model& model, const std::string& path) {
  validate_model(model);
  std::string out;
  out.append(kModelMagic, 8);
  if (const auto* t = std::get_if<TriPlanarField>(&model.field)) {
    out.push_back(char(kKindTriPlanar));
    out.push_back(char(static_cast<std::uint8_t>(t->combiner)));
    put_dims(out, t->res, t->rank, t->channels);
    for (int p = 0; p < 3; ++p) detail::put_f32le_block(out, t->planes[p].data(), t->planes[p].size());
  } else if (const auto* c = std::get_if<CPField>(&model.field)) {
    out.push_back(char(kKindCp));
    out.push_back(char(static_cast<std::uint8_t>(c->combiner)));
    put_dims(out, c->res, c->rank, c->channels);
    for (int a = 0; a < 3; ++a) detail::put_f32le_block(out, c->vectors[a].data(), c->vectors[a].size());
  } else {
    out.push_back(char(kKindImplicit));
    out.push_back(char(0));
    put_dims(out, {0, 0, 0}, 0, 3);
  }
  put_decoder(out, model.decoder);
  detail::put_u32le(out, model.encoding.degree);
  out.push_back(char(model.encoding.include_raw ? 1 : 0));
  detail::write_file(path, out);
}

Model load_model(const std::string& path) {
  const std::string data = detail::read_file(path);
  detail::Cursor cur(path, data);
  const std::string magic = cur.bytes(8);
  if (magic != std::string(kModelMagic, 8)) {
    throw BadMagicError(path + ": bad magic \"" + magic + "\"");
  }
  const std::uint8_t kind = cur.u8();
  const std::uint8_t combiner_raw = cur.u8();
  std::array<std::uint32_t, 3> res{cur.u32le(), cur.u32le(), cur.u32le()};
  const std::uint32_t rank = cur.u32le();
  const std::uint32_t channels = cur.u32le();

  Model model;
  if (kind == kKindTriPlanar || kind == kKindCp) {
    if (res[0] < 2 || res[1] < 2 || res[2] < 2) {
      throw IoError(path + ": factor resolution must be >= 2 per axis");
    }
    if (rank < 1) throw IoError(path + ": rank must be >= 1");
    if (channels < 1) throw IoError(path + ": channels must be >= 1");
    const std::uint64_t guard = std::uint64_t(1) << 28;
    const std::uint64_t per_cr = kind == kKindTriPlanar
                                     ? std::uint64_t(res[0]) * res[1] + std::uint64_t(res[1]) * res[2] +
                                           std::uint64_t(res[0]) * res[2]
                                     : std::uint64_t(res[0]) + res[1] + res[2];
    if (per_cr * rank * channels > guard) {
      throw IoError(path + ": factor payload implausibly large");
    }
  }
  if (kind == kKindTriPlanar) {
    TriPlanarField f;
    f.res = res;
    f.rank = rank;
    f.channels = channels;
    f.combiner = read_combiner(path, combiner_raw);
    const std::array<std::size_t, 3> rows{res[0], res[1], res[0]};
    const std::array<std::size_t, 3> cols{res[1], res[2], res[2]};
    for (int p = 0; p < 3; ++p) {
      f.planes[p].resize(rows[p] * cols[p] * rank * channels);
      cur.f32le_block(f.planes[p].data(), f.planes[p].size());
      check_finite_block(path, f.planes[p], "factor planes");
    }
    model.field = std::move(f);
  } else if (kind == kKindCp) {
    CPField f;
    f.res = res;
    f.rank = rank;
    f.channels = channels;
    f.combiner = read_combiner(path, combiner_raw);
    for (int a = 0; a < 3; ++a) {
      f.vectors[a].resize(std::size_t(res[a]) * rank * channels);
      cur.f32le_block(f.vectors[a].data(), f.vectors[a].size());
      check_finite_block(path, f.vectors[a], "factor vectors");
    }
    model.field = std::move(f);
  } else if (kind == kKindImplicit) {
    if (channels != 3) {
      throw IoError(path + ": implicit models carry 3 coordinate channels, file says " +
                    std::to_string(channels));
    }
    model.field = std::monostate{};
  } else {
    throw IoError(path + ": unknown representation code " + std::to_string(kind));
  }

  model.decoder = read_decoder(path, cur);
  model.encoding.degree = cur.u32le();
  const std::uint8_t raw_flag = cur.u8();
  if (raw_flag > 1) throw IoError(path + ": include_raw flag must be 0 or 1");
  model.encoding.include_raw = raw_flag == 1;
  cur.expect_exhausted("model header");
  validate_model(model);
  return model;
}

}  // namespace trivol
