#include "edgeseq/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace edgeseq {

ModelConfig RunConfig::model_config() const {
  return ModelConfig{model_embed_dim, model_hidden_size, model_num_layers, model_dropout};
}

TrainConfig RunConfig::train_config() const {
  TrainConfig tc;
  tc.ordering = ordering();
  tc.max_epochs = train_max_epochs;
  tc.batch_size = train_batch_size;
  tc.adam.lr = train_lr;
  tc.adam.halve_every = train_lr_halve_every;
  tc.patience = train_patience;
  tc.min_improvement = train_min_improvement;
  tc.seed = seed;
  return tc;
}

SampleConfig RunConfig::sample_config(std::uint32_t max_train_m) const {
  SampleConfig sc;
  sc.temperature = sample_temperature;
  sc.max_steps = sample_max_steps > 0 ? sample_max_steps : static_cast<int>(max_train_m) + 8;
  sc.max_retries = sample_max_retries;
  return sc;
}

EvalConfig RunConfig::eval_config() const {
  EvalConfig ec;
  ec.repetitions = eval_repetitions;
  ec.seed = seed;
  ec.uniqueness_distinct_classes = eval_uniqueness_distinct;
  ec.sample_sizes.clear();
  std::stringstream ss(eval_sample_sizes);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    ec.sample_sizes.push_back(std::stoull(token));
  }
  if (ec.sample_sizes.empty()) throw UserError("eval.sample_sizes must list at least one size");
  return ec;
}

OrderingStrategy RunConfig::ordering() const {
  return OrderingStrategy{ordering_kind_from_string(ordering_kind), seed};
}

namespace {

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
T parse_value(const std::string& key, const std::string& raw);

template <>
int parse_value<int>(const std::string& key, const std::string& raw) {
  int out;
  auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), out);
  if (ec != std::errc{} || p != raw.data() + raw.size())
    throw UserError("config key '" + key + "': expected integer, got '" + raw + "'");
  return out;
}

template <>
std::uint64_t parse_value<std::uint64_t>(const std::string& key, const std::string& raw) {
  std::uint64_t out;
  auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), out);
  if (ec != std::errc{} || p != raw.data() + raw.size())
    throw UserError("config key '" + key + "': expected unsigned integer, got '" + raw + "'");
  return out;
}

template <>
double parse_value<double>(const std::string& key, const std::string& raw) {
  try {
    std::size_t used = 0;
    double out = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return out;
  } catch (const std::exception&) {
    throw UserError("config key '" + key + "': expected number, got '" + raw + "'");
  }
}

template <>
bool parse_value<bool>(const std::string& key, const std::string& raw) {
  if (raw == "true" || raw == "1") return true;
  if (raw == "false" || raw == "0") return false;
  throw UserError("config key '" + key + "': expected true/false, got '" + raw + "'");
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

const std::map<std::string, Field>& schema() {
  static const std::map<std::string, Field> fields = [] {
    std::map<std::string, Field> m;
    auto add_int = [&m](const std::string& key, int RunConfig::* member) {
      m[key] = Field{[key, member](RunConfig& c, const std::string& v) {
                       c.*member = parse_value<int>(key, v);
                     },
                     [member](const RunConfig& c) { return std::to_string(c.*member); }};
    };
    auto add_double = [&m](const std::string& key, double RunConfig::* member) {
      m[key] = Field{[key, member](RunConfig& c, const std::string& v) {
                       c.*member = parse_value<double>(key, v);
                     },
                     [member](const RunConfig& c) { return format_double(c.*member); }};
    };
    auto add_string = [&m](const std::string& key, std::string RunConfig::* member) {
      m[key] = Field{[member](RunConfig& c, const std::string& v) { c.*member = v; },
                     [member](const RunConfig& c) { return c.*member; }};
    };
    auto add_bool = [&m](const std::string& key, bool RunConfig::* member) {
      m[key] = Field{[key, member](RunConfig& c, const std::string& v) {
                       c.*member = parse_value<bool>(key, v);
                     },
                     [member](const RunConfig& c) { return c.*member ? "true" : "false"; }};
    };
    add_string("ordering.kind", &RunConfig::ordering_kind);
    add_int("model.embed_dim", &RunConfig::model_embed_dim);
    add_int("model.hidden_size", &RunConfig::model_hidden_size);
    add_int("model.num_layers", &RunConfig::model_num_layers);
    add_double("model.dropout", &RunConfig::model_dropout);
    add_int("train.max_epochs", &RunConfig::train_max_epochs);
    add_int("train.batch_size", &RunConfig::train_batch_size);
    add_double("train.lr", &RunConfig::train_lr);
    add_int("train.lr_halve_every", &RunConfig::train_lr_halve_every);
    add_int("train.patience", &RunConfig::train_patience);
    add_double("train.min_improvement", &RunConfig::train_min_improvement);
    add_double("sample.temperature", &RunConfig::sample_temperature);
    add_int("sample.max_steps", &RunConfig::sample_max_steps);
    add_int("sample.max_retries", &RunConfig::sample_max_retries);
    add_int("eval.repetitions", &RunConfig::eval_repetitions);
    add_string("eval.sample_sizes", &RunConfig::eval_sample_sizes);
    add_bool("eval.uniqueness_distinct", &RunConfig::eval_uniqueness_distinct);
    m["seed"] = Field{[](RunConfig& c, const std::string& v) {
                        c.seed = parse_value<std::uint64_t>("seed", v);
                      },
                      [](const RunConfig& c) { return std::to_string(c.seed); }};
    return m;
  }();
  return fields;
}

std::string trim(std::string_view sv) {
  while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
  while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' || sv.back() == '\r'))
    sv.remove_suffix(1);
  return std::string(sv);
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw UserError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(std::string_view(trimmed).substr(0, eq));
    std::string value = trim(std::string_view(trimmed).substr(eq + 1));
    auto it = schema().find(key);
    if (it == schema().end())
      throw UserError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    it->second.set(config, value);
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string serialize(const RunConfig& config) {
  std::ostringstream out;
  for (const auto& [key, field] : schema()) out << key << " = " << field.get(config) << "\n";
  return out.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

std::string config_hash(const RunConfig& config) { return fnv1a_hex(serialize(config)); }

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open '" + path + "' for hashing");
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a_hex(buf.str());
}

}  // namespace edgeseq
