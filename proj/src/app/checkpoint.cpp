#include "loadguide/app/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "loadguide/errors.hpp"

namespace loadguide::app {

namespace {

constexpr const char* kMagic = "loadguide-checkpoint";
constexpr int kVersion = 1;

std::string hex(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%a", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

double parse_hex(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') throw DataError("checkpoint: bad number '" + token + "'");
  return v;
}

void write_values(std::ostream& out, const char* tag, const std::vector<double>& values) {
  out << tag;
  for (double v : values) out << ' ' << hex(v);
  out << '\n';
}

void write_layers(std::ostream& out, const std::vector<const nd::LayerParams*>& layers) {
  out << "layers " << layers.size() << '\n';
  for (const auto* p : layers) {
    out << "layer " << p->name << ' ' << nd::to_string(p->kind) << ' ' << p->weights.rows() << ' ' << p->weights.cols()
        << ' ' << p->bias.size() << ' ' << p->conv.kernel_width << ' ' << p->conv.in_channels << ' '
        << p->conv.out_channels << '\n';
    write_values(out, "weights", p->weights.data());
    write_values(out, "bias", p->bias);
  }
  out << "end\n";
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

struct RawCheckpoint {
  std::string model;
  std::map<std::string, std::string> config;
  std::istream* in = nullptr;
};

RawCheckpoint read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("checkpoint: empty input");
  auto head = tokens(line);
  if (head.size() != 2 || head[0] != kMagic) throw DataError("checkpoint: missing '" + std::string(kMagic) + "' header");
  if (head[1] != std::to_string(kVersion)) throw DataError("checkpoint: unsupported version " + head[1]);
  RawCheckpoint raw;
  raw.in = &in;
  while (std::getline(in, line)) {
    auto t = tokens(line);
    if (t.empty()) continue;
    if (t[0] == "layers") {
      raw.config["layers"] = t.size() > 1 ? t[1] : "";
      return raw;
    }
    if (t.size() != 2) throw DataError("checkpoint: malformed line '" + line + "'");
    if (t[0] == "model") raw.model = t[1];
    else raw.config[t[0]] = t[1];
  }
  throw DataError("checkpoint: truncated before layer data");
}

void read_layers(std::istream& in, const std::string& count, std::vector<nd::LayerParams*> layers) {
  if (count != std::to_string(layers.size())) {
    throw DataError("checkpoint: " + count + " layers stored, model expects " + std::to_string(layers.size()));
  }
  std::string line;
  for (auto* p : layers) {
    if (!std::getline(in, line)) throw DataError("checkpoint: truncated layer list");
    const auto h = tokens(line);
    const std::vector<std::string> expect{"layer", p->name, nd::to_string(p->kind), std::to_string(p->weights.rows()),
                                          std::to_string(p->weights.cols()), std::to_string(p->bias.size()),
                                          std::to_string(p->conv.kernel_width), std::to_string(p->conv.in_channels),
                                          std::to_string(p->conv.out_channels)};
    if (h != expect) throw DataError("checkpoint: layer header '" + line + "' does not match layer '" + p->name + "'");
    for (auto [tag, target] : {std::pair{"weights", &p->weights.data()}, std::pair{"bias", &p->bias}}) {
      if (!std::getline(in, line)) throw DataError("checkpoint: truncated layer '" + p->name + "'");
      const auto v = tokens(line);
      if (v.empty() || v[0] != tag || v.size() != target->size() + 1) {
        throw DataError("checkpoint: bad " + std::string(tag) + " block for layer '" + p->name + "'");
      }
      for (std::size_t j = 0; j < target->size(); ++j) (*target)[j] = parse_hex(v[j + 1]);
    }
  }
  while (std::getline(in, line))
    if (!tokens(line).empty()) break;
  if (tokens(line) != std::vector<std::string>{"end"}) throw DataError("checkpoint: missing 'end'");
}

const std::string& need(const RawCheckpoint& raw, const std::string& key) {
  auto it = raw.config.find(key);
  if (it == raw.config.end()) throw DataError("checkpoint: missing config key '" + key + "'");
  return it->second;
}

std::size_t need_size(const RawCheckpoint& raw, const std::string& key) {
  return static_cast<std::size_t>(std::stoull(need(raw, key)));
}

template <class Save>
void save_file(const std::filesystem::path& path, Save save) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  save(out);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::ifstream open_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  return in;
}

}  // namespace

void save_msp(std::ostream& out, const msp::MspModel& model) {
  const auto& c = model.config;
  out << kMagic << ' ' << kVersion << '\n' << "model msp\n";
  out << "lookback " << c.lookback << '\n' << "horizon " << c.horizon << '\n' << "variables " << c.variables << '\n';
  out << "state_counts ";
  for (std::size_t i = 0; i < c.state_counts.size(); ++i) out << (i ? "," : "") << c.state_counts[i];
  out << '\n';
  out << "trunk_channels " << c.trunk_channels << '\n' << "ue_channels " << c.ue_channels << '\n'
      << "kernel_width " << c.kernel_width << '\n' << "seed " << c.seed << '\n';
  write_layers(out, model.layers());
}

msp::MspModel load_msp(std::istream& in) {
  const RawCheckpoint raw = read_header(in);
  if (raw.model != "msp") throw DataError("checkpoint holds a '" + raw.model + "' model, expected msp");
  msp::MspConfig c;
  c.lookback = need_size(raw, "lookback");
  c.horizon = need_size(raw, "horizon");
  c.variables = need_size(raw, "variables");
  std::istringstream counts(need(raw, "state_counts"));
  for (std::string n; std::getline(counts, n, ',');) c.state_counts.push_back(std::stoi(n));
  c.trunk_channels = need_size(raw, "trunk_channels");
  c.ue_channels = need_size(raw, "ue_channels");
  c.kernel_width = need_size(raw, "kernel_width");
  c.seed = std::stoull(need(raw, "seed"));
  msp::MspModel model = msp::make_msp(c);
  read_layers(in, need(raw, "layers"), model.layers());
  return model;
}

void save_forecaster(std::ostream& out, const forecaster::ForecasterModel& model) {
  const auto& c = model.config;
  out << kMagic << ' ' << kVersion << '\n' << "model forecaster\n";
  out << "kind " << forecaster::to_string(c.kind) << '\n' << "lookback " << c.lookback << '\n' << "horizon "
      << c.horizon << '\n' << "variables " << c.variables << '\n' << "hidden " << c.hidden << '\n'
      << "per_variable " << (c.per_variable ? 1 : 0) << '\n' << "seed " << c.seed << '\n';
  write_layers(out, model.layers());
}

forecaster::ForecasterModel load_forecaster(std::istream& in) {
  const RawCheckpoint raw = read_header(in);
  if (raw.model != "forecaster") throw DataError("checkpoint holds a '" + raw.model + "' model, expected forecaster");
  forecaster::ForecasterConfig c;
  c.kind = forecaster::forecaster_kind_from_string(need(raw, "kind"));
  c.lookback = need_size(raw, "lookback");
  c.horizon = need_size(raw, "horizon");
  c.variables = need_size(raw, "variables");
  c.hidden = need_size(raw, "hidden");
  c.per_variable = need(raw, "per_variable") == "1";
  c.seed = std::stoull(need(raw, "seed"));
  forecaster::ForecasterModel model = forecaster::make_forecaster(c);
  read_layers(in, need(raw, "layers"), model.layers());
  return model;
}

void save_msp(const std::filesystem::path& path, const msp::MspModel& model) {
  save_file(path, [&](std::ostream& out) { save_msp(out, model); });
}

msp::MspModel load_msp(const std::filesystem::path& path) {
  auto in = open_file(path);
  return load_msp(in);
}

void save_forecaster(const std::filesystem::path& path, const forecaster::ForecasterModel& model) {
  save_file(path, [&](std::ostream& out) { save_forecaster(out, model); });
}

forecaster::ForecasterModel load_forecaster(const std::filesystem::path& path) {
  auto in = open_file(path);
  return load_forecaster(in);
}

}  // namespace loadguide::app
