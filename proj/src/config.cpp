#include "oxdgm/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace oxdgm {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object())
    throw std::invalid_argument("config: " + where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (allowed.find(key) == allowed.end())
      throw std::invalid_argument("config: unknown key \"" + key + "\" in " + where);
  }
}

std::vector<std::pair<double, double>> parse_levels(const json& j, const std::string& where) {
  if (!j.is_array())
    throw std::invalid_argument("config: " + where + " must be an array of [x, y] pairs");
  std::vector<std::pair<double, double>> levels;
  levels.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("config: " + where + " entries must be [x, y] pairs");
    levels.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return levels;
}

json levels_to_json(const std::vector<std::pair<double, double>>& levels) {
  json arr = json::array();
  for (const auto& [x, y] : levels) arr.push_back(json::array({x, y}));
  return arr;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  reject_unknown_keys(j,
                      {"name", "kind", "layer_sizes", "seed", "threads", "train", "quant",
                       "device", "neuron", "normalizer", "data", "noise_density"},
                      "top level");
  ExperimentConfig c;
  c.name = j.at("name").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dbn")
    c.kind = ModelKind::kDbn;
  else if (kind == "sda")
    c.kind = ModelKind::kSda;
  else
    throw std::invalid_argument("config: kind must be \"dbn\" or \"sda\"");
  c.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  if (c.layer_sizes.size() < 2)
    throw std::invalid_argument("config: layer_sizes needs at least 2 entries");
  const std::size_t n_blocks = c.layer_sizes.size() - 1;
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();

  const json& t = j.at("train");
  reject_unknown_keys(t,
                      {"epsilon", "epochs", "batch_size", "momentum", "weight_decay",
                       "use_bias", "input_corruption"},
                      "train");
  if (t.contains("epsilon")) {
    const json& eps = t.at("epsilon");
    if (eps.is_number())
      c.epsilon.assign(n_blocks, eps.get<double>());
    else if (eps.is_array())
      c.epsilon = eps.get<std::vector<double>>();
    else
      throw std::invalid_argument("config: train.epsilon must be a number or array");
  } else {
    c.epsilon.assign(n_blocks, 0.1);
  }
  if (t.contains("batch_size")) c.batch_size = t.at("batch_size").get<int>();
  if (t.contains("momentum")) c.momentum = t.at("momentum").get<double>();
  if (t.contains("weight_decay")) c.weight_decay = t.at("weight_decay").get<double>();
  if (t.contains("use_bias")) c.use_bias = t.at("use_bias").get<bool>();
  if (t.contains("input_corruption"))
    c.input_corruption = t.at("input_corruption").get<double>();
  const json& ep = t.at("epochs");
  if (ep.is_number_integer())
    c.epochs.assign(n_blocks, ep.get<int>());
  else if (ep.is_array())
    c.epochs = ep.get<std::vector<int>>();
  else
    throw std::invalid_argument("config: train.epochs must be an integer or array");

  if (j.contains("quant")) {
    const json& q = j.at("quant");
    reject_unknown_keys(q, {"bits", "w_min", "w_max"}, "quant");
    if (q.contains("bits")) c.quant.bits = q.at("bits").get<int>();
    if (q.contains("w_min")) c.quant.w_min = q.at("w_min").get<double>();
    if (q.contains("w_max")) c.quant.w_max = q.at("w_max").get<double>();
  }

  if (j.contains("device")) {
    const json& d = j.at("device");
    reject_unknown_keys(
        d, {"dist", "mu_on", "sigma_on", "mu_off", "sigma_off", "v_read", "r_series"},
        "device");
    if (d.contains("dist")) {
      const std::string dist = d.at("dist").get<std::string>();
      if (dist == "normal")
        c.device.dist = ResistanceDist::kNormal;
      else if (dist == "lognormal")
        c.device.dist = ResistanceDist::kLogNormal;
      else
        throw std::invalid_argument("config: device.dist must be \"normal\" or \"lognormal\"");
    }
    if (d.contains("mu_on")) c.device.mu_on = d.at("mu_on").get<double>();
    if (d.contains("sigma_on")) c.device.sigma_on = d.at("sigma_on").get<double>();
    if (d.contains("mu_off")) c.device.mu_off = d.at("mu_off").get<double>();
    if (d.contains("sigma_off")) c.device.sigma_off = d.at("sigma_off").get<double>();
    if (d.contains("v_read")) c.device.v_read = d.at("v_read").get<double>();
    if (d.contains("r_series")) c.device.r_series = d.at("r_series").get<double>();
  }

  const json& n = j.at("neuron");
  reject_unknown_keys(n, {"ref_mode", "state_commit", "gains"}, "neuron");
  const std::string mode = n.at("ref_mode").get<std::string>();
  if (mode == "ideal")
    c.ref_mode = RefMode::kIdealUniform;
  else if (mode == "device")
    c.ref_mode = RefMode::kDeviceDerived;
  else
    throw std::invalid_argument("config: neuron.ref_mode must be \"ideal\" or \"device\"");
  if (n.contains("state_commit")) {
    const std::string commit = n.at("state_commit").get<std::string>();
    if (commit == "per_batch")
      c.state_commit = StateCommit::kPerBatch;
    else if (commit == "per_draw")
      c.state_commit = StateCommit::kPerDraw;
    else
      throw std::invalid_argument(
          "config: neuron.state_commit must be \"per_batch\" or \"per_draw\"");
  }
  c.gains = n.at("gains").get<std::vector<double>>();

  const json& nm = j.at("normalizer");
  if (nm.contains("identity")) {
    reject_unknown_keys(nm, {"identity"}, "normalizer");
    if (!nm.at("identity").get<bool>())
      throw std::invalid_argument("config: normalizer.identity must be true when present");
    c.normalizer_identity = true;
  } else {
    reject_unknown_keys(nm, {"gain_levels", "bias_levels", "selected_levels"}, "normalizer");
    c.normalizer_identity = false;
    c.norm_gain_levels = parse_levels(nm.at("gain_levels"), "normalizer.gain_levels");
    if (nm.contains("bias_levels"))
      c.norm_bias_levels = parse_levels(nm.at("bias_levels"), "normalizer.bias_levels");
    c.norm_selected = nm.at("selected_levels").get<std::vector<double>>();
  }

  if (j.contains("data")) {
    const json& d = j.at("data");
    reject_unknown_keys(d,
                        {"dir", "train_images", "train_labels", "test_images", "test_labels",
                         "n_train", "n_test", "binarize"},
                        "data");
    if (d.contains("dir")) c.data.dir = d.at("dir").get<std::string>();
    if (d.contains("train_images")) c.data.train_images = d.at("train_images").get<std::string>();
    if (d.contains("train_labels")) c.data.train_labels = d.at("train_labels").get<std::string>();
    if (d.contains("test_images")) c.data.test_images = d.at("test_images").get<std::string>();
    if (d.contains("test_labels")) c.data.test_labels = d.at("test_labels").get<std::string>();
    if (d.contains("n_train")) c.data.n_train = d.at("n_train").get<std::uint64_t>();
    if (d.contains("n_test")) c.data.n_test = d.at("n_test").get<std::uint64_t>();
    if (d.contains("binarize")) c.data.binarize = d.at("binarize").get<bool>();
  }
  if (j.contains("noise_density")) c.noise_density = j.at("noise_density").get<double>();

  c.validate();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  json j;
  j["name"] = name;
  j["kind"] = kind == ModelKind::kDbn ? "dbn" : "sda";
  j["layer_sizes"] = layer_sizes;
  j["seed"] = seed;
  j["threads"] = threads;
  j["train"] = {{"epsilon", epsilon},
                {"epochs", epochs},
                {"batch_size", batch_size},
                {"momentum", momentum},
                {"weight_decay", weight_decay},
                {"use_bias", use_bias},
                {"input_corruption", input_corruption}};
  j["quant"] = {{"bits", quant.bits}, {"w_min", quant.w_min}, {"w_max", quant.w_max}};
  j["device"] = {
      {"dist", device.dist == ResistanceDist::kNormal ? "normal" : "lognormal"},
      {"mu_on", device.mu_on},     {"sigma_on", device.sigma_on},
      {"mu_off", device.mu_off},   {"sigma_off", device.sigma_off},
      {"v_read", device.v_read},   {"r_series", device.r_series}};
  j["neuron"] = {
      {"ref_mode", ref_mode == RefMode::kIdealUniform ? "ideal" : "device"},
      {"state_commit", state_commit == StateCommit::kPerBatch ? "per_batch" : "per_draw"},
      {"gains", gains}};
  if (normalizer_identity) {
    j["normalizer"] = {{"identity", true}};
  } else {
    j["normalizer"] = {{"gain_levels", levels_to_json(norm_gain_levels)},
                       {"bias_levels", levels_to_json(norm_bias_levels)},
                       {"selected_levels", norm_selected}};
  }
  j["data"] = {{"dir", data.dir},
               {"train_images", data.train_images},
               {"train_labels", data.train_labels},
               {"test_images", data.test_images},
               {"test_labels", data.test_labels},
               {"n_train", data.n_train},
               {"n_test", data.n_test},
               {"binarize", data.binarize}};
  j["noise_density"] = noise_density;
  return j;
}

void ExperimentConfig::validate() const {
  const std::size_t n_blocks = layer_sizes.empty() ? 0 : layer_sizes.size() - 1;
  if (name.empty()) throw std::invalid_argument("config: name must not be empty");
  if (epochs.size() != n_blocks)
    throw std::invalid_argument("config: train.epochs needs one entry per block");
  if (epsilon.size() != n_blocks)
    throw std::invalid_argument("config: train.epsilon needs one entry per block");
  if (gains.size() != layer_sizes.size())
    throw std::invalid_argument("config: neuron.gains needs one entry per layer");
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  if (noise_density < 0.0 || noise_density > 1.0)
    throw std::invalid_argument("config: noise_density must be in [0,1]");
  if (data.n_train % 10 != 0 || data.n_test % 10 != 0)
    throw std::invalid_argument("config: n_train and n_test must be multiples of 10");
  if (!normalizer_identity && n_blocks >= 2 && norm_selected.size() != n_blocks - 1)
    throw std::invalid_argument(
        "config: normalizer.selected_levels needs one entry per inter-block interface");
  // Full structural validation (sizes, device params, quantization).
  to_network_spec().validate();
}

NetworkSpec ExperimentConfig::to_network_spec() const {
  NetworkSpec spec;
  spec.kind = kind;
  spec.layer_sizes = layer_sizes;
  spec.quant = quant;
  spec.name = name;
  spec.layer_cfgs.reserve(layer_sizes.size());
  for (std::size_t node = 0; node < layer_sizes.size(); ++node) {
    NeuronLayerConfig lc;
    lc.size = layer_sizes[node];
    lc.gain = node < gains.size() ? gains[node] : 1.0;
    lc.ref_mode = ref_mode;
    lc.state_commit = state_commit;
    lc.device = device;
    spec.layer_cfgs.push_back(lc);
  }
  const std::size_t n_blocks = layer_sizes.size() - 1;
  spec.block_cfgs.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    RbmConfig rc;
    rc.epsilon = b < epsilon.size() ? epsilon[b] : 0.1;
    rc.epochs = b < epochs.size() ? epochs[b] : 1;
    rc.batch_size = batch_size;
    rc.momentum = momentum;
    rc.weight_decay = weight_decay;
    rc.use_bias = use_bias;
    // Corruption is a property of raw pixel presentations; deeper blocks see
    // activations from the layer below and train without it.
    rc.input_corruption = b == 0 ? input_corruption : 0.0;
    spec.block_cfgs.push_back(rc);
  }
  spec.normalizers.reserve(n_blocks - 1);
  for (std::size_t i = 0; i + 1 < n_blocks; ++i) {
    if (normalizer_identity) {
      spec.normalizers.push_back(NormalizerConfig::identity());
    } else {
      NormalizerConfig nc;
      nc.gain_levels = norm_gain_levels;
      nc.bias_levels = norm_bias_levels;
      if (nc.bias_levels.empty() && !norm_gain_levels.empty()) {
        nc.bias_levels = {{norm_gain_levels.front().first, 0.0},
                          {norm_gain_levels.back().first, 0.0}};
      }
      nc.selected_level = i < norm_selected.size() ? norm_selected[i] : 0.0;
      spec.normalizers.push_back(nc);
    }
  }
  return spec;
}

}  // namespace oxdgm
