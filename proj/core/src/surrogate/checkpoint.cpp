#include "splinecolloc/surrogate/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "splinecolloc/errors.hpp"

namespace splinecolloc::surrogate {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "splinecolloc-mpnn";
constexpr int kVersion = 1;

}  // namespace

std::string checkpoint_to_json(const Checkpoint& c) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["variant"] = variant_name(c.variant);
  const auto& m = c.params.config;
  j["model"] = {{"channels", m.channels},
                {"hidden", m.hidden},
                {"processors", m.processors},
                {"layers", m.layers}};
  const auto& p = c.pipeline;
  j["pipeline"] = {{"cells", p.cells},       {"steps", p.steps},
                   {"stride", p.stride},     {"time_order", p.time_order},
                   {"windows", p.windows},   {"adaptive", p.adaptive},
                   {"adapt_every", p.adapt_every}, {"beta", p.beta},
                   {"fine_stride", p.fine_stride}};
  j["channel_scale"] = c.channel_scale;
  json tensors = json::array();
  const auto names = c.params.tensor_names();
  const auto ts = c.params.tensors();
  for (std::size_t k = 0; k < ts.size(); ++k) {
    tensors.push_back({{"name", names[k]},
                       {"rows", ts[k]->rows()},
                       {"cols", ts[k]->cols()},
                       {"data", std::vector<double>(ts[k]->data(), ts[k]->data() + ts[k]->size())}});
  }
  j["tensors"] = std::move(tensors);
  return j.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != kFormat) throw IoError("not a splinecolloc checkpoint");
    if (j.at("version") != kVersion) throw IoError("unsupported checkpoint version");
    Checkpoint c;
    c.variant = parse_variant(j.at("variant").get<std::string>());
    MpnnConfig m;
    const auto& jm = j.at("model");
    m.channels = jm.at("channels");
    m.hidden = jm.at("hidden");
    m.processors = jm.at("processors");
    m.layers = jm.at("layers");
    c.params = MpnnParams::zeros(m);
    const auto& jp = j.at("pipeline");
    c.pipeline.cells = jp.at("cells");
    c.pipeline.steps = jp.at("steps");
    c.pipeline.stride = jp.at("stride");
    c.pipeline.time_order = jp.at("time_order");
    c.pipeline.windows = jp.at("windows");
    c.pipeline.adaptive = jp.at("adaptive");
    c.pipeline.adapt_every = jp.at("adapt_every");
    c.pipeline.beta = jp.at("beta");
    c.pipeline.fine_stride = jp.at("fine_stride");
    c.channel_scale = j.at("channel_scale").get<std::vector<double>>();

    const auto names = c.params.tensor_names();
    auto ts = c.params.tensors();
    const auto& jt = j.at("tensors");
    if (jt.size() != ts.size()) throw IoError("checkpoint tensor count does not match the model");
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto& t = jt[k];
      if (t.at("name") != names[k] || t.at("rows") != ts[k]->rows() || t.at("cols") != ts[k]->cols())
        throw IoError("checkpoint tensor '" + names[k] + "' has the wrong name or shape");
      const auto data = t.at("data").get<std::vector<double>>();
      if (data.size() != static_cast<std::size_t>(ts[k]->size()))
        throw IoError("checkpoint tensor '" + names[k] + "' has the wrong length");
      std::copy(data.begin(), data.end(), ts[k]->data());
    }
    return c;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << checkpoint_to_json(c) << '\n';
  if (!out) throw IoError("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace splinecolloc::surrogate
