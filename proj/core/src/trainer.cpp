#include "trivol/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <numeric>
#include <sstream>

#include "field_detail.hpp"
#include "io_util.hpp"
#include "trivol/atlas.hpp"
#include "trivol/errors.hpp"
#include "trivol/loss.hpp"
#include "trivol/optim.hpp"
#include "trivol/rng.hpp"

namespace trivol {

namespace {

constexpr char kReportHeader[] = "epoch,seconds,train_loss,test_axial,test_coronal,test_sagittal";

// Reusable buffers for one slice pass; sized lazily so slices of different
// resolutions can share one workspace.
struct Workspace {
  std::vector<CellIndex> cells;
  std::vector<double> feats;        // [C][n]
  std::vector<double> triples;      // per-(c,r) plane/vector values, 3 per pixel
  std::vector<double> encoded;      // [n][C*w]
  MlpBatch batch;
  std::vector<double> out;          // [n]
  Image2D rendered;
  std::vector<double> grad_out;     // [n]
  std::vector<double> enc_grad;     // [n][C*w]
  std::vector<double> dfeats;       // [C][n]
  std::vector<double> coord_grads;  // [n][3]
};

void forward_features(const Model& model, const SliceGrid& grid, Workspace& ws,
                      bool want_triples) {
  const std::size_t n = grid.coords.size();
  const std::uint32_t channels = field_channels(model.field);
  ws.feats.resize(std::size_t(channels) * n);
  if (const auto* tp = std::get_if<TriPlanarField>(&model.field)) {
    ws.cells.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = grid.coords[i];
      ws.cells[i] = locate_cell(tp->res, p[0], p[1], p[2]);
    }
    if (want_triples) ws.triples.resize(3 * std::size_t(channels) * tp->rank * n);
    detail::batched_forward(*tp, ws.cells, ws.feats.data(),
                            want_triples ? ws.triples.data() : nullptr);
  } else if (const auto* cp = std::get_if<CPField>(&model.field)) {
    ws.cells.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = grid.coords[i];
      ws.cells[i] = locate_cell(cp->res, p[0], p[1], p[2]);
    }
    if (want_triples) ws.triples.resize(3 * std::size_t(channels) * cp->rank * n);
    detail::batched_forward(*cp, ws.cells, ws.feats.data(),
                            want_triples ? ws.triples.data() : nullptr);
  } else {
    // Implicit: the features are the raw grid coordinates.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::uint32_t a = 0; a < 3; ++a) ws.feats[std::size_t(a) * n + i] = grid.coords[i][a];
    }
  }
}

void render_into(const Model& model, const SliceGrid& grid, Workspace& ws, bool want_triples) {
  const std::size_t n = grid.coords.size();
  forward_features(model, grid, ws, want_triples);
  const std::uint32_t channels = field_channels(model.field);
  const std::uint32_t width = encoded_scalar_width(model.encoding);
  ws.encoded.resize(n * std::size_t(channels) * width);
  detail::encode_batch(model.encoding, ws.feats.data(), channels, n, ws.encoded.data());
  ws.out.resize(n);
  mlp_forward(model.decoder, ws.encoded.data(), n, ws.batch, ws.out.data());
  ws.rendered.rows = grid.rows;
  ws.rendered.cols = grid.cols;
  ws.rendered.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) ws.rendered.pixels[i] = static_cast<float>(ws.out[i]);
}

// dL/dE and dL/dT of one slice from per-pixel coordinate gradients;
// p_i = R(E) b_i + T with b_i = (xs[col], ys[row], 0).
void accumulate_pose_grad(const SliceGrid& grid, const Pose& pose, const double* coord_grads,
                          std::array<double, 6>& pg) {
  const std::array<Mat3, 3> dR = pose_rotation_derivatives(pose);
  for (std::uint32_t r = 0; r < grid.rows; ++r) {
    const double by = grid.ys[r];
    for (std::uint32_t c = 0; c < grid.cols; ++c) {
      const double bx = grid.xs[c];
      const std::size_t i = std::size_t(r) * grid.cols + c;
      const double gx = coord_grads[3 * i];
      const double gy = coord_grads[3 * i + 1];
      const double gz = coord_grads[3 * i + 2];
      for (int a = 0; a < 3; ++a) {
        const auto& m = dR[a].m;
        pg[a] += gx * (m[0] * bx + m[1] * by) + gy * (m[3] * bx + m[4] * by) +
                 gz * (m[6] * bx + m[7] * by);
      }
      pg[3] += gx;
      pg[4] += gy;
      pg[5] += gz;
    }
  }
}

// Backprop through one slice whose forward state lives in ws. Field/decoder
// gradients accumulate; pose_grad (when non-null) receives this slice's
// 6-vector contribution.
void backward_slice(const Model& model, const SliceGrid& grid, const Image2D& target,
                    Workspace& ws, FieldGradients* field_grads, MlpGrads& decoder_grads,
                    std::array<double, 6>* pose_grad, const Pose& pose) {
  const std::size_t n = grid.coords.size();
  const std::uint32_t channels = field_channels(model.field);
  const std::uint32_t width = encoded_scalar_width(model.encoding);
  training_loss_backward(ws.rendered, target, ws.grad_out);
  const bool implicit = std::holds_alternative<std::monostate>(model.field);
  const bool need_input = !implicit || pose_grad != nullptr;
  ws.enc_grad.resize(n * std::size_t(channels) * width);
  mlp_backward(model.decoder, ws.encoded.data(), n, ws.batch, ws.grad_out.data(), decoder_grads,
               need_input ? ws.enc_grad.data() : nullptr);
  if (!need_input) return;
  ws.dfeats.resize(std::size_t(channels) * n);
  detail::encode_backward_batch(model.encoding, ws.feats.data(), channels, n, ws.enc_grad.data(),
                                ws.dfeats.data());
  if (const auto* tp = std::get_if<TriPlanarField>(&model.field)) {
    detail::batched_backward_params(*tp, ws.cells, ws.dfeats.data(), ws.triples.data(),
                                    *field_grads);
    if (pose_grad) {
      ws.coord_grads.assign(3 * n, 0.0);
      detail::batched_backward_coords(*tp, ws.cells, ws.dfeats.data(), ws.coord_grads.data());
      accumulate_pose_grad(grid, pose, ws.coord_grads.data(), *pose_grad);
    }
  } else if (const auto* cp = std::get_if<CPField>(&model.field)) {
    detail::batched_backward_params(*cp, ws.cells, ws.dfeats.data(), ws.triples.data(),
                                    *field_grads);
    if (pose_grad) {
      ws.coord_grads.assign(3 * n, 0.0);
      detail::batched_backward_coords(*cp, ws.cells, ws.dfeats.data(), ws.coord_grads.data());
      accumulate_pose_grad(grid, pose, ws.coord_grads.data(), *pose_grad);
    }
  } else if (pose_grad) {
    // Implicit: feature gradients are already coordinate gradients.
    ws.coord_grads.resize(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::uint32_t a = 0; a < 3; ++a) {
        ws.coord_grads[3 * i + a] = ws.dfeats[std::size_t(a) * n + i];
      }
    }
    accumulate_pose_grad(grid, pose, ws.coord_grads.data(), *pose_grad);
  }
}

std::string fmt_metric(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_pose_finite(const Pose& p, std::int64_t epoch, std::int64_t slice) {
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(p.euler_deg[a]) || !std::isfinite(p.trans[a])) {
      throw NumericError("pose parameters became non-finite", epoch, slice);
    }
  }
}

}  // namespace

std::string format_report(const RunReport& report) {
  std::ostringstream out;
  for (const auto& note : report.notes) out << "# " << note << "\n";
  out << kReportHeader << "\n";
  for (const auto& row : report.rows) {
    char secbuf[64];
    std::snprintf(secbuf, sizeof secbuf, "%.6f", row.seconds);
    out << row.epoch << ',' << secbuf << ',' << fmt_metric(row.train_loss) << ','
        << fmt_metric(row.test.axial) << ',' << fmt_metric(row.test.coronal) << ','
        << fmt_metric(row.test.sagittal) << "\n";
  }
  return out.str();
}

void write_report(const RunReport& report, const std::string& path) {
  detail::write_file(path, format_report(report));
}

RunReport read_report(const std::string& path) {
  const std::string text = detail::read_file(path);
  RunReport report;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t start = line.find_first_not_of(" \t", 1);
      report.notes.push_back(start == std::string::npos ? "" : line.substr(start));
      continue;
    }
    if (!header_seen) {
      if (line != kReportHeader) {
        throw IoError(path + ":" + std::to_string(lineno) + ": unexpected report header \"" +
                      line + "\"");
      }
      header_seen = true;
      continue;
    }
    std::array<std::string, 6> fields;
    std::size_t from = 0;
    for (int f = 0; f < 6; ++f) {
      const std::size_t comma = line.find(',', from);
      if (f < 5 && comma == std::string::npos) {
        throw IoError(path + ":" + std::to_string(lineno) + ": expected 6 report fields");
      }
      fields[f] = line.substr(from, comma == std::string::npos ? std::string::npos : comma - from);
      from = comma + 1;
    }
    ReportRow row;
    row.epoch = static_cast<std::uint32_t>(std::strtoul(fields[0].c_str(), nullptr, 10));
    row.seconds = std::strtod(fields[1].c_str(), nullptr);
    row.train_loss = std::strtod(fields[2].c_str(), nullptr);
    row.test.axial = std::strtod(fields[3].c_str(), nullptr);
    row.test.coronal = std::strtod(fields[4].c_str(), nullptr);
    row.test.sagittal = std::strtod(fields[5].c_str(), nullptr);
    report.rows.push_back(row);
  }
  if (!header_seen) throw IoError(path + ": missing report header");
  return report;
}

Model make_model(const TrainConfig& cfg) {
  validate_train_config(cfg);
  Model model;
  switch (cfg.representation) {
    case Representation::TriPlanar:
      model.field = make_triplanar({cfg.field_res, cfg.field_res, cfg.field_res}, cfg.rank,
                                   cfg.channels, cfg.combiner, cfg.seed);
      break;
    case Representation::Cp:
      model.field = make_cp({cfg.field_res, cfg.field_res, cfg.field_res}, cfg.rank, cfg.channels,
                            cfg.combiner, cfg.seed);
      break;
    case Representation::Implicit:
      model.field = std::monostate{};
      break;
  }
  model.encoding = cfg.encoding;
  MlpConfig mcfg;
  mcfg.n_layers = cfg.mlp_layers;
  mcfg.hidden_width = cfg.mlp_width;
  mcfg.input_width = field_channels(model.field) * encoded_scalar_width(cfg.encoding);
  model.decoder = make_mlp(mcfg, cfg.seed);
  return model;
}

Image2D render_slice(const Model& model, const SliceGrid& grid) {
  validate_model(model);
  if (grid.rows < 2 || grid.cols < 2 ||
      grid.coords.size() != std::size_t(grid.rows) * grid.cols) {
    throw ShapeError("slice grid is inconsistent");
  }
  Workspace ws;
  render_into(model, grid, ws, false);
  return std::move(ws.rendered);
}

TrainResult reconstruct(const std::vector<Image2D>& stack, const std::vector<Pose>& poses,
                        const TrainConfig& cfg, const TrainHooks& hooks) {
  validate_train_config(cfg);
  if (stack.size() != poses.size()) {
    throw ShapeError("slice/pose count mismatch: " + std::to_string(stack.size()) + " images vs " +
                     std::to_string(poses.size()) + " poses");
  }
  if (stack.empty()) throw ShapeError("training stack is empty");
  const SsimConfig ssim_defaults;
  for (std::size_t s = 0; s < stack.size(); ++s) {
    if (stack[s].rows < ssim_defaults.window || stack[s].cols < ssim_defaults.window) {
      throw ShapeError("training slice " + std::to_string(s) + " is smaller than the " +
                       std::to_string(ssim_defaults.window) + "-pixel loss window");
    }
    if (stack[s].pixels.size() != std::size_t(stack[s].rows) * stack[s].cols) {
      throw ShapeError("training slice " + std::to_string(s) + " pixel buffer is inconsistent");
    }
    check_pose_finite(poses[s], -1, static_cast<std::int64_t>(s));
  }

  TrainResult result;
  result.model = cfg.init == InitKind::Atlas ? init_from_atlas(cfg) : make_model(cfg);
  result.poses = poses;
  validate_model(result.model);

  result.report.notes.push_back("config: representation=" + to_string(cfg.representation) +
                                " mlp=" + std::to_string(cfg.mlp_layers) + "-" +
                                std::to_string(cfg.mlp_width) + " encode_degree=" +
                                std::to_string(cfg.encoding.degree) +
                                (cfg.encoding.include_raw ? "+raw" : "") + " seed=" +
                                std::to_string(cfg.seed));
  if (cfg.representation == Representation::Implicit) {
    result.report.notes.push_back(
        "baseline: dense coordinate network stand-in; architecture is a desk-scale choice, "
        "not a faithful reproduction of any published implicit model");
  }

  const bool has_field = !std::holds_alternative<std::monostate>(result.model.field);
  FieldGradients field_grads;
  if (const auto* tp = std::get_if<TriPlanarField>(&result.model.field)) {
    field_grads = make_gradients(*tp);
  } else if (const auto* cp = std::get_if<CPField>(&result.model.field)) {
    field_grads = make_gradients(*cp);
  }
  MlpGrads decoder_grads = make_grads(result.model.decoder);

  const std::size_t n_slices = stack.size();
  std::vector<AdamState> pose_opt;
  std::vector<std::array<double, 6>> pose_grads;
  if (cfg.learn_poses) {
    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr_pose;
    pose_opt.assign(n_slices, make_adam(6, adam_cfg));
    pose_grads.assign(n_slices, {0, 0, 0, 0, 0, 0});
  }

  // Grids of frozen poses are built once; learnable poses rebuild on visit.
  std::vector<SliceGrid> grids(n_slices);
  auto grid_for = [&](std::size_t s) -> const SliceGrid& {
    const bool moving = cfg.learn_poses && result.poses[s].learnable;
    if (moving || grids[s].coords.empty()) {
      grids[s] = pose_to_grid(result.poses[s], stack[s].rows, stack[s].cols);
    }
    return grids[s];
  };

  Workspace ws;
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&start]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  // Returns true when training should stop.
  auto record = [&](std::uint32_t epoch, double train_loss) {
    ReportRow row;
    row.epoch = epoch;
    row.seconds = elapsed();
    row.train_loss = train_loss;
    if (hooks.evaluate) row.test = hooks.evaluate(result.model, result.poses);
    result.report.rows.push_back(row);
    if (hooks.on_row) hooks.on_row(row, result.model, result.poses);
    if (hooks.should_stop && hooks.should_stop(row)) return true;
    if (cfg.stop_ssim <= 1.0) {
      int n_finite = 0;
      bool all_reached = true;
      for (double v : {row.test.axial, row.test.coronal, row.test.sagittal}) {
        if (std::isfinite(v)) {
          ++n_finite;
          all_reached = all_reached && v <= -cfg.stop_ssim;
        }
      }
      if (n_finite > 0 && all_reached) return true;
    }
    return false;
  };

  // Epoch 0: loss of the untrained model, no updates.
  {
    double total = 0.0;
    for (std::size_t s = 0; s < n_slices; ++s) {
      render_into(result.model, grid_for(s), ws, false);
      const double loss = training_loss(ws.rendered, stack[s]);
      if (!std::isfinite(loss)) {
        throw NumericError("training loss is non-finite", 0, static_cast<std::int64_t>(s));
      }
      total += loss;
    }
    if (record(0, total / double(n_slices))) return result;
  }

  Rng order_rng(derive_seed(cfg.seed, 0x54F1E5));
  std::vector<std::uint32_t> order(n_slices);
  std::iota(order.begin(), order.end(), 0u);

  std::vector<std::uint32_t> batch_poses;
  for (std::uint32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t in_batch = 0;
    batch_poses.clear();

    auto flush = [&]() {
      if (in_batch == 0) return;
      // Mean-over-batch convention folded into the step size.
      const double lr_field = cfg.lr_field / double(in_batch);
      const double lr_decoder = cfg.lr_decoder / double(in_batch);
      if (auto* tp = std::get_if<TriPlanarField>(&result.model.field)) {
        for (int p = 0; p < 3; ++p) {
          sgd_step_consume(tp->planes[p], field_grads.parts[p], lr_field);
        }
      } else if (auto* cp = std::get_if<CPField>(&result.model.field)) {
        for (int a = 0; a < 3; ++a) {
          sgd_step_consume(cp->vectors[a], field_grads.parts[a], lr_field);
        }
      }
      for (std::size_t l = 0; l < result.model.decoder.weights.size(); ++l) {
        sgd_step_consume(result.model.decoder.weights[l], decoder_grads.weights[l], lr_decoder);
        sgd_step_consume(result.model.decoder.biases[l], decoder_grads.biases[l], lr_decoder);
      }
      for (const std::uint32_t s : batch_poses) {
        Pose& pose = result.poses[s];
        std::array<double, 6> params{pose.euler_deg[0], pose.euler_deg[1], pose.euler_deg[2],
                                     pose.trans[0],     pose.trans[1],     pose.trans[2]};
        if (in_batch > 1) {
          for (double& g : pose_grads[s]) g /= double(in_batch);
        }
        adam_step_consume(pose_opt[s], params, pose_grads[s]);
        pose.euler_deg = {params[0], params[1], params[2]};
        pose.trans = {params[3], params[4], params[5]};
        check_pose_finite(pose, epoch, s);
      }
      batch_poses.clear();
      in_batch = 0;
    };

    for (std::size_t oi = 0; oi < n_slices; ++oi) {
      const std::uint32_t s = order[oi];
      const SliceGrid& grid = grid_for(s);
      render_into(result.model, grid, ws, has_field);
      const double loss = training_loss(ws.rendered, stack[s]);
      if (!std::isfinite(loss)) {
        throw NumericError("training loss became non-finite", epoch, s);
      }
      epoch_loss += loss;
      const bool learn_this = cfg.learn_poses && result.poses[s].learnable;
      backward_slice(result.model, grid, stack[s], ws, has_field ? &field_grads : nullptr,
                     decoder_grads, learn_this ? &pose_grads[s] : nullptr, result.poses[s]);
      if (learn_this) batch_poses.push_back(s);
      ++in_batch;
      if (in_batch >= cfg.batch_slices || oi + 1 == n_slices) flush();
    }

    if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs) {
      if (record(epoch, epoch_loss / double(n_slices))) break;
    }
  }
  return result;
}

TrainResult train_implicit(const std::vector<Image2D>& stack, const std::vector<Pose>& poses,
                           const TrainConfig& cfg, const TrainHooks& hooks) {
  TrainConfig implicit_cfg = cfg;
  implicit_cfg.representation = Representation::Implicit;
  return reconstruct(stack, poses, implicit_cfg, hooks);
}

PoseErrorRow compute_pose_error(std::uint32_t epoch, const std::vector<Pose>& current,
                                const std::vector<Pose>& truth, std::uint32_t grid_dim) {
  if (current.size() != truth.size()) throw ShapeError("pose error needs equal-length pose sets");
  if (current.empty()) throw ShapeError("pose error needs at least one pose");
  if (grid_dim < 2) throw ConfigError("grid_dim must be >= 2 to express voxel units");
  PoseErrorRow row;
  row.epoch = epoch;
  const double voxels_per_unit = double(grid_dim - 1) / 2.0;
  double angle_sum = 0.0, trans_sum = 0.0;
  for (std::size_t s = 0; s < current.size(); ++s) {
    for (int a = 0; a < 3; ++a) {
      angle_sum += std::abs(current[s].euler_deg[a] - truth[s].euler_deg[a]);
      trans_sum += std::abs(current[s].trans[a] - truth[s].trans[a]) * voxels_per_unit;
    }
  }
  const double n3 = 3.0 * double(current.size());
  row.mean_abs_angle_deg = angle_sum / n3;
  row.mean_abs_trans_voxels = trans_sum / n3;
  row.combined = (angle_sum + trans_sum) / (2.0 * n3);
  return row;
}

NoisyPoseResult reconstruct_with_noisy_poses(const std::vector<Image2D>& stack,
                                             const std::vector<Pose>& true_poses,
                                             double noise_halfwidth, std::uint32_t grid_dim,
                                             const TrainConfig& cfg, const TrainHooks& hooks) {
  if (grid_dim < 2) throw ConfigError("grid_dim must be >= 2 to express voxel units");
  const std::vector<Pose> noisy =
      perturb_poses(true_poses, noise_halfwidth, cfg.seed, grid_dim);
  TrainConfig run_cfg = cfg;
  run_cfg.learn_poses = true;
  NoisyPoseResult result;
  TrainHooks run_hooks = hooks;
  run_hooks.on_row = [&](const ReportRow& row, const Model& model,
                         const std::vector<Pose>& poses) {
    result.pose_errors.push_back(compute_pose_error(row.epoch, poses, true_poses, grid_dim));
    if (hooks.on_row) hooks.on_row(row, model, poses);
  };
  result.train = reconstruct(stack, noisy, run_cfg, run_hooks);
  return result;
}

std::string format_pose_errors(const std::vector<PoseErrorRow>& rows) {
  std::ostringstream out;
  out << "epoch,mean_abs_angle_deg,mean_abs_trans_voxels,combined\n";
  for (const auto& r : rows) {
    out << r.epoch << ',' << fmt_metric(r.mean_abs_angle_deg) << ','
        << fmt_metric(r.mean_abs_trans_voxels) << ',' << fmt_metric(r.combined) << "\n";
  }
  return out.str();
}

void write_pose_errors(const std::vector<PoseErrorRow>& rows, const std::string& path) {
  detail::write_file(path, format_pose_errors(rows));
}

std::vector<AblationRowSpec> default_ablation_rows() {
  return {
      {Representation::TriPlanar, 2, 128}, {Representation::TriPlanar, 3, 128},
      {Representation::TriPlanar, 4, 128}, {Representation::TriPlanar, 3, 32},
      {Representation::TriPlanar, 3, 64},  {Representation::TriPlanar, 2, 64},
      {Representation::Cp, 2, 64},
  };
}

std::vector<AblationColumnSpec> default_ablation_columns() {
  return {
      {"L=0", {0, true}},           {"L=2", {2, false}},          {"L=5", {5, false}},
      {"L=10", {10, false}},        {"L=2 + input", {2, true}},   {"L=5 + input", {5, true}},
      {"L=10 + input", {10, true}},
  };
}

namespace {

std::string row_label(const AblationRowSpec& spec) {
  const char* rep = spec.representation == Representation::TriPlanar ? "Tri-Planar"
                    : spec.representation == Representation::Cp      ? "CP"
                                                                     : "Implicit";
  return std::string(rep) + " MLP " + std::to_string(spec.mlp_layers) + "-" +
         std::to_string(spec.mlp_width);
}

}  // namespace

AblationTable ablation_sweep(const std::vector<Image2D>& stack, const std::vector<Pose>& poses,
                             const std::vector<Image2D>& test_stack,
                             const std::vector<Pose>& test_poses,
                             const std::vector<AblationRowSpec>& rows,
                             const std::vector<AblationColumnSpec>& columns,
                             const TrainConfig& base) {
  if (test_stack.size() != test_poses.size()) {
    throw ShapeError("test slice/pose count mismatch");
  }
  if (rows.empty() || columns.empty()) throw ConfigError("ablation grid is empty");
  AblationTable table;
  for (const auto& r : rows) table.row_labels.push_back(row_label(r));
  for (const auto& c : columns) table.column_labels.push_back(c.label);
  table.cells.assign(rows.size(), std::vector<double>(
                                      columns.size(), std::numeric_limits<double>::quiet_NaN()));

  std::vector<SliceGrid> test_grids;
  test_grids.reserve(test_stack.size());
  for (std::size_t t = 0; t < test_stack.size(); ++t) {
    test_grids.push_back(pose_to_grid(test_poses[t], test_stack[t].rows, test_stack[t].cols));
  }

  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    for (std::size_t ci = 0; ci < columns.size(); ++ci) {
      TrainConfig cfg = base;
      cfg.representation = rows[ri].representation;
      cfg.mlp_layers = rows[ri].mlp_layers;
      cfg.mlp_width = rows[ri].mlp_width;
      cfg.encoding = columns[ci].encoding;
      double cell = std::numeric_limits<double>::quiet_NaN();
      try {
        const TrainResult run = reconstruct(stack, poses, cfg, {});
        double total = 0.0;
        bool finite = true;
        for (std::size_t t = 0; t < test_stack.size() && finite; ++t) {
          const Image2D rendered = render_slice(run.model, test_grids[t]);
          const double loss = training_loss(rendered, test_stack[t]);
          finite = std::isfinite(loss);
          total += loss;
        }
        if (finite && !test_stack.empty()) cell = total / double(test_stack.size());
      } catch (const NumericError&) {
        // Diverged configuration: the cell is recorded as NaN.
      }
      table.cells[ri][ci] = cell;
    }
  }
  return table;
}

std::string format_ablation_csv(const AblationTable& table) {
  std::ostringstream out;
  out << "network";
  for (const auto& c : table.column_labels) out << ',' << c;
  out << "\n";
  for (std::size_t ri = 0; ri < table.row_labels.size(); ++ri) {
    out << table.row_labels[ri];
    for (const double v : table.cells[ri]) {
      out << ',';
      if (std::isnan(v)) {
        out << "NaN";
      } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        out << buf;
      }
    }
    out << "\n";
  }
  return out.str();
}

void write_ablation_csv(const AblationTable& table, const std::string& path) {
  detail::write_file(path, format_ablation_csv(table));
}

}  // namespace trivol
