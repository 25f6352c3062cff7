#include "ssdaae/checkpoint.hpp"

#include <bit>
#include <fstream>

#include "ssdaae/errors.hpp"

namespace ssdaae {

namespace fs = std::filesystem;

void write_f32_blob(const fs::path& path, std::span<const float> values) {
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t w = std::bit_cast<std::uint32_t>(values[i]);
    if constexpr (std::endian::native == std::endian::big) w = __builtin_bswap32(w);
    words[i] = w;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(words.size() * 4));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<float> read_f32_blob(const fs::path& path, std::size_t expected) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IngestionError("missing checkpoint blob " + path.string());
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != expected * 4) {
    throw IngestionError(path.string() + ": expected " + std::to_string(expected) + " floats, found " +
                         std::to_string(bytes) + " bytes");
  }
  in.seekg(0);
  std::vector<std::uint32_t> words(expected);
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(bytes));
  std::vector<float> values(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint32_t w = words[i];
    if constexpr (std::endian::native == std::endian::big) w = __builtin_bswap32(w);
    values[i] = std::bit_cast<float>(w);
  }
  return values;
}

namespace {

Json report_to_json(const MetricsReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"target", row.target},
                    {"threshold", row.threshold},
                    {"sensitivity", row.sensitivity},
                    {"specificity", row.specificity}});
  }
  return {{"split", r.split}, {"auc", r.auc}, {"rows", rows}};
}

MetricsReport report_from_json(const nlohmann::json& j) {
  MetricsReport r;
  r.split = j.at("split").get<std::string>();
  r.auc = j.at("auc").get<double>();
  for (const auto& row : j.at("rows")) {
    r.rows.push_back({row.at("target").get<double>(), row.at("threshold").get<double>(),
                      row.at("sensitivity").get<double>(), row.at("specificity").get<double>()});
  }
  return r;
}

nlohmann::json read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IngestionError("no checkpoint manifest in " + dir.string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError("malformed checkpoint manifest: " + std::string(e.what()));
  }
  if (m.value("format", "") != "ssdaae-checkpoint") throw IngestionError(dir.string() + " is not a checkpoint");
  return m;
}

}  // namespace

void save_checkpoint(const fs::path& dir, Model& model, const RunConfig& config, std::size_t epoch,
                     Trainer* trainer, const LoopState* loop) {
  fs::create_directories(dir / "params");
  Json manifest;
  manifest["format"] = "ssdaae-checkpoint";
  manifest["version"] = 1;
  manifest["kind"] = std::string(name_of(model.kind()));
  manifest["dtype"] = "float32 little-endian";
  manifest["flatten_order"] =
      "row-major over the listed shape; conv weights [out, in, kh, kw], transposed-conv weights "
      "[in, out, kh, kw]; flattened activations channel-major CHW";
  // The output location is not part of the run's identity; two replays written
  // to different directories must produce identical checkpoints.
  RunConfig stored = config;
  stored.out.clear();
  manifest["config_hash"] = config_hash(stored);
  manifest["config"] = to_json(stored);
  manifest["epoch"] = epoch;
  manifest["step"] = trainer ? trainer->steps_done() : 0;
  manifest["sigma"] = model.corruption().sigma;

  Json params = Json::array();
  for (const auto& [name, tensor] : model.parameters()) {
    const std::string file = "params/" + name + ".f32";
    write_f32_blob(dir / file, tensor->data());
    params.push_back({{"name", name}, {"shape", tensor->shape()}, {"file", file}});
  }
  manifest["parameters"] = params;

  Json rng = Json::object();
  if (trainer) {
    rng["trainer"] = trainer->rng().state();
    Json optims = Json::array();
    for (const auto& [opt_name, opt] : trainer->optimizers()) {
      const RMSPropOptions& o = opt->options();
      Json entry = {{"name", opt_name},
                    {"learning_rate", o.learning_rate},
                    {"momentum", o.momentum},
                    {"decay", o.decay},
                    {"epsilon", o.epsilon},
                    {"initialised", opt->initialised()}};
      Json buffers = Json::array();
      if (opt->initialised()) {
        fs::create_directories(dir / "optim" / opt_name);
        for (std::size_t i = 0; i < opt->params().size(); ++i) {
          const std::string& pname = opt->params()[i].first;
          const std::string base = "optim/" + opt_name + "/" + pname;
          write_f32_blob(dir / (base + ".sq.f32"), opt->square_avg()[i]);
          write_f32_blob(dir / (base + ".mom.f32"), opt->momentum_buffer()[i]);
          buffers.push_back({{"param", pname}, {"square_avg", base + ".sq.f32"}, {"momentum", base + ".mom.f32"}});
        }
      }
      entry["buffers"] = buffers;
      optims.push_back(entry);
    }
    manifest["optimizers"] = optims;
  }
  if (loop) {
    rng["order"] = loop->order_rng;
    Json l = {{"epochs_done", loop->epochs_done},
              {"stream_order", loop->stream_order},
              {"stream_pos", loop->stream_pos},
              {"best_epoch", loop->best_epoch}};
    l["best_validation"] = loop->best_validation ? report_to_json(*loop->best_validation) : Json();
    if (loop->best_epoch == epoch) {
      l["best_parameters"] = "params";
    } else {
      fs::create_directories(dir / "best");
      auto named = model.parameters();
      for (std::size_t i = 0; i < named.size(); ++i) {
        write_f32_blob(dir / ("best/" + named[i].first + ".f32"), loop->best_parameters.at(i).data());
      }
      l["best_parameters"] = "best";
    }
    manifest["loop"] = l;
  }
  manifest["rng_state"] = rng;

  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write checkpoint manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

CheckpointInfo read_checkpoint_info(const fs::path& dir) {
  const nlohmann::json m = read_manifest(dir);
  CheckpointInfo info;
  info.config = config_from_json(m.at("config"));
  info.config_hash = m.at("config_hash").get<std::string>();
  info.epoch = m.at("epoch").get<std::size_t>();
  info.step = m.at("step").get<std::size_t>();
  if (config_hash(info.config) != info.config_hash) {
    throw IngestionError("checkpoint config hash mismatch in " + dir.string());
  }
  return info;
}

Model load_model(const fs::path& dir) {
  const nlohmann::json m = read_manifest(dir);
  const CheckpointInfo info = read_checkpoint_info(dir);
  Model model = build_model(info.config);
  auto named = model.parameters();
  const auto& listed = m.at("parameters");
  if (listed.size() != named.size()) throw IngestionError("checkpoint parameter count does not match the model");
  for (std::size_t i = 0; i < named.size(); ++i) {
    const auto& entry = listed[i];
    if (entry.at("name").get<std::string>() != named[i].first ||
        entry.at("shape").get<Shape>() != named[i].second->shape()) {
      throw IngestionError("checkpoint parameter " + entry.at("name").get<std::string>() +
                           " does not match model parameter " + named[i].first);
    }
    auto values = read_f32_blob(dir / entry.at("file").get<std::string>(), named[i].second->numel());
    std::copy(values.begin(), values.end(), named[i].second->values().begin());
  }
  return model;
}

void restore_training_state(const fs::path& dir, Trainer& trainer, LoopState& loop) {
  const nlohmann::json m = read_manifest(dir);
  if (!m.contains("optimizers") || !m.contains("loop")) {
    throw IngestionError(dir.string() + " holds no training state");
  }
  trainer.rng().restore(m.at("rng_state").at("trainer").get<std::string>());
  trainer.set_steps_done(m.at("step").get<std::size_t>());

  auto optims = trainer.optimizers();
  const auto& stored = m.at("optimizers");
  if (stored.size() != optims.size()) throw IngestionError("checkpoint optimizer set does not match the variant");
  for (std::size_t k = 0; k < optims.size(); ++k) {
    auto& [name, opt] = optims[k];
    const auto& entry = stored[k];
    if (entry.at("name").get<std::string>() != name) throw IngestionError("optimizer order mismatch");
    const auto& buffers = entry.at("buffers");
    if (!entry.at("initialised").get<bool>()) continue;
    opt->square_avg().assign(opt->params().size(), {});
    opt->momentum_buffer().assign(opt->params().size(), {});
    for (std::size_t i = 0; i < opt->params().size(); ++i) {
      const std::size_t n = opt->params()[i].second->numel();
      opt->square_avg()[i] = read_f32_blob(dir / buffers.at(i).at("square_avg").get<std::string>(), n);
      opt->momentum_buffer()[i] = read_f32_blob(dir / buffers.at(i).at("momentum").get<std::string>(), n);
    }
  }

  const auto& l = m.at("loop");
  loop.epochs_done = l.at("epochs_done").get<std::size_t>();
  loop.order_rng = m.at("rng_state").at("order").get<std::string>();
  loop.stream_order = l.at("stream_order").get<std::vector<std::size_t>>();
  loop.stream_pos = l.at("stream_pos").get<std::size_t>();
  loop.best_epoch = l.at("best_epoch").get<std::size_t>();
  loop.best_validation.reset();
  if (!l.at("best_validation").is_null()) loop.best_validation = report_from_json(l.at("best_validation"));
  const std::string best_dir = l.at("best_parameters").get<std::string>();
  auto named = trainer.model().parameters();
  loop.best_parameters.clear();
  for (const auto& [name, tensor] : named) {
    loop.best_parameters.emplace_back(tensor->shape(),
                                      read_f32_blob(dir / (best_dir + "/" + name + ".f32"), tensor->numel()));
  }
}

}  // namespace ssdaae
