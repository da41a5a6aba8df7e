#include "wearssl/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

namespace wearssl::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const std::string t = trim(text);
  auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": cannot parse '" + text + "' as a number");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<double>(key, item));
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<std::size_t>(key, item));
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>)
      out += fmt(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

struct Field {
  std::function<void(const std::string& key, const std::string& value)> set;
  std::function<std::string()> get;
};

using Section = std::vector<std::pair<std::string, Field>>;

template <class T>
Field number(T& ref) {
  return {[&ref](const std::string& k, const std::string& v) { ref = parse_number<T>(k, v); }, [&ref] {
            if constexpr (std::is_floating_point_v<T>)
              return fmt(ref);
            else
              return std::to_string(ref);
          }};
}

Field boolean(bool& ref) {
  return {[&ref](const std::string& k, const std::string& v) { ref = parse_bool(k, v); },
          [&ref] { return std::string(ref ? "true" : "false"); }};
}

Field doubles(std::vector<double>& ref) {
  return {[&ref](const std::string& k, const std::string& v) { ref = parse_doubles(k, v); },
          [&ref] { return join(ref); }};
}

Field sizes(std::vector<std::size_t>& ref) {
  return {[&ref](const std::string& k, const std::string& v) { ref = parse_sizes(k, v); },
          [&ref] { return join(ref); }};
}

Field optional_lr(std::optional<double>& ref) {
  return {[&ref](const std::string& k, const std::string& v) {
            if (trim(v) == "auto")
              ref.reset();
            else
              ref = parse_number<double>(k, v);
          },
          [&ref] { return ref ? fmt(*ref) : std::string("auto"); }};
}

Field pipeline(augment::Pipeline& ref) {
  return {[&ref](const std::string& k, const std::string& v) {
            try {
              ref = augment::parse_pipeline(v);
            } catch (const std::exception& e) {
              throw ConfigError(k + ": " + e.what());
            }
          },
          [&ref] { return augment::to_string(ref); }};
}

Field path(std::filesystem::path& ref) {
  return {[&ref](const std::string&, const std::string& v) { ref = trim(v); }, [&ref] { return ref.string(); }};
}

// Every section and key the config understands, bound to `c`. Order here
// is the order of the written file.
std::vector<std::pair<std::string, Section>> schema(RunConfig& c) {
  std::vector<std::pair<std::string, Section>> s;

  s.push_back({"run",
               {{"mode",
                 {[&c](const std::string& k, const std::string& v) {
                    const std::string t = trim(v);
                    if (t == "full")
                      c.mode = RunMode::kFull;
                    else if (t == "cheap")
                      c.mode = RunMode::kCheap;
                    else
                      throw ConfigError(k + ": expected full or cheap, got '" + v + "'");
                  },
                  [&c] { return std::string(c.mode == RunMode::kFull ? "full" : "cheap"); }}},
                {"seeds",
                 {[&c](const std::string& k, const std::string& v) {
                    try {
                      c.seeds = parse_seed_list(v);
                    } catch (const std::invalid_argument& e) {
                      throw ConfigError(k + ": " + e.what());
                    }
                  },
                  [&c] { return join(c.seeds); }}},
                {"tasks",
                 {[&c](const std::string& k, const std::string& v) {
                    try {
                      c.tasks = parse_task_list(v);
                    } catch (const std::invalid_argument& e) {
                      throw ConfigError(k + ": " + e.what());
                    }
                  },
                  [&c] {
                    std::string out;
                    for (std::size_t i = 0; i < c.tasks.size(); ++i)
                      out += (i ? ", " : "") + std::string(data::task_name(c.tasks[i]));
                    return out;
                  }}}}});

  Section data{{"source",
                {[&c](const std::string& k, const std::string& v) {
                   const std::string t = trim(v);
                   if (t == "synthetic")
                     c.data.source = DataSource::kSynthetic;
                   else if (t == "csv")
                     c.data.source = DataSource::kCsv;
                   else
                     throw ConfigError(k + ": expected synthetic or csv, got '" + v + "'");
                 },
                 [&c] { return std::string(c.data.source == DataSource::kSynthetic ? "synthetic" : "csv"); }}},
               {"samples", path(c.data.samples)},
               {"labels", path(c.data.labels)}};
  s.push_back({"data", std::move(data)});

  auto& sc = c.data.synthetic;
  Section syn{{"participants", number(sc.n_participants)},
              {"days", number(sc.days)},
              {"seed", number(sc.seed)},
              {"effect_scale", number(sc.effect_scale)},
              {"noise_sigma", number(sc.noise_sigma)},
              {"trait_spread", number(sc.trait_spread)},
              {"start_time", number(sc.start_time)}};
  for (data::Task t : data::kAllTasks) {
    const std::size_t i = static_cast<std::size_t>(t);
    const std::string name(data::task_name(t));
    syn.push_back({"prevalence." + name, doubles(sc.prevalence[i])});
    auto& e = sc.effects[i];
    syn.push_back({"effect." + name + ".amplitude_drop", number(e.amplitude_drop)});
    syn.push_back({"effect." + name + ".phase_delay_hours", number(e.phase_delay_hours)});
    syn.push_back({"effect." + name + ".sleep_loss_hours", number(e.sleep_loss_hours)});
    syn.push_back({"effect." + name + ".awakenings_per_hour", number(e.awakenings_per_hour)});
    syn.push_back({"effect." + name + ".awakening_samples", number(e.awakening_samples)});
    syn.push_back({"effect." + name + ".light_drop", number(e.light_drop)});
    syn.push_back({"effect." + name + ".activity_noise_gain", number(e.activity_noise_gain)});
  }
  s.push_back({"synthetic", std::move(syn)});

  auto& p = c.preprocess;
  s.push_back({"preprocess",
               {{"window_length", number(p.window_length)},
                {"max_gap", number(p.max_gap)},
                {"interpolate", boolean(p.interpolate)},
                {"normalize", boolean(p.normalize)},
                {"channels",
                 {[&p](const std::string& k, const std::string& v) {
                    p.channels.clear();
                    for (const auto& name : split_list(v)) {
                      const auto ch = data::parse_channel(name);
                      if (!ch) throw ConfigError(k + ": unknown channel '" + name + "'");
                      p.channels.push_back(*ch);
                    }
                  },
                  [&p] {
                    std::string out;
                    for (std::size_t i = 0; i < p.channels.size(); ++i)
                      out += (i ? ", " : "") + std::string(data::channel_name(p.channels[i]));
                    return out;
                  }}},
                {"train_fraction", number(p.train_fraction)},
                {"val_fraction", number(p.val_fraction)},
                {"test_fraction", number(p.test_fraction)},
                {"split_seed", number(p.split_seed)},
                {"std_floor", number(p.std_floor)}}});

  auto& sm = c.simclr;
  s.push_back({"simclr",
               {{"feature_maps", sizes(sm.model.feature_maps)},
                {"kernels", sizes(sm.model.kernels)},
                {"dropout", number(sm.model.dropout)},
                {"head_widths", sizes(sm.model.head_widths)},
                {"batch_size", number(sm.train.batch_size)},
                {"epochs", number(sm.train.epochs)},
                {"temperature", number(sm.train.temperature)},
                {"base_lr", optional_lr(sm.train.base_lr)},
                {"lars_momentum", number(sm.train.lars.momentum)},
                {"lars_weight_decay", number(sm.train.lars.weight_decay)},
                {"lars_trust_coefficient", number(sm.train.lars.trust_coefficient)},
                {"lars_eps", number(sm.train.lars.eps)},
                {"pipeline", pipeline(sm.train.pipeline)},
                {"norm_floor", number(sm.train.norm_floor)},
                {"max_windows", number(sm.max_windows)}}});

  auto& by = c.byol;
  s.push_back({"byol",
               {{"encoder_widths", sizes(by.model.encoder.widths)},
                {"projector_hidden", number(by.model.projector_hidden)},
                {"projection_dim", number(by.model.projection_dim)},
                {"batch_size", number(by.train.batch_size)},
                {"epochs", number(by.train.epochs)},
                {"base_lr", optional_lr(by.train.base_lr)},
                {"optimizer",
                 {[&by](const std::string& k, const std::string& v) {
                    const std::string t = trim(v);
                    if (t == "adam")
                      by.train.optimizer = byol::OptimizerKind::kAdam;
                    else if (t == "lars")
                      by.train.optimizer = byol::OptimizerKind::kLars;
                    else
                      throw ConfigError(k + ": expected adam or lars, got '" + v + "'");
                  },
                  [&by] { return std::string(by.train.optimizer == byol::OptimizerKind::kAdam ? "adam" : "lars"); }}},
                {"adam_beta1", number(by.train.adam.beta1)},
                {"adam_beta2", number(by.train.adam.beta2)},
                {"adam_eps", number(by.train.adam.eps)},
                {"lars_momentum", number(by.train.lars.momentum)},
                {"lars_weight_decay", number(by.train.lars.weight_decay)},
                {"lars_trust_coefficient", number(by.train.lars.trust_coefficient)},
                {"ema_beta", number(by.train.beta)},
                {"normalize_loss", boolean(by.train.normalize_loss)},
                {"pipeline", pipeline(by.train.pipeline)},
                {"norm_floor", number(by.train.norm_floor)},
                {"autoencoder_init", boolean(by.autoencoder_init)},
                {"autoencoder_epochs", number(by.autoencoder.epochs)},
                {"autoencoder_batch_size", number(by.autoencoder.batch_size)},
                {"autoencoder_lr", number(by.autoencoder.lr)},
                {"max_windows", number(by.max_windows)}}});

  auto& su = c.supervised;
  s.push_back({"supervised",
               {{"epochs", number(su.epochs)},
                {"batch_size", number(su.batch_size)},
                {"lr", number(su.lr)},
                {"max_windows", number(su.max_windows)}}});

  auto& pr = c.probe;
  s.push_back({"probe",
               {{"l2_grid", doubles(pr.l2_grid)},
                {"gradient_tolerance", number(pr.gradient_tolerance)},
                {"max_iterations", number(pr.max_iterations)}}});
  return s;
}

void apply_tree(RunConfig& c, const boost::property_tree::ptree& tree) {
  auto sections = schema(c);
  for (const auto& entry : tree) {
    const std::string& name = entry.first;
    const auto& body = entry.second;
    auto sec = std::find_if(sections.begin(), sections.end(), [&](const auto& s) { return s.first == name; });
    if (sec == sections.end()) {
      if (body.empty() && !body.data().empty()) throw ConfigError(name + ": keys must live in a [section]");
      throw ConfigError("unknown section [" + name + "]");
    }
    for (const auto& kv : body) {
      const std::string& key = kv.first;
      const std::string full = name + "." + key;
      auto field = std::find_if(sec->second.begin(), sec->second.end(), [&](const auto& f) { return f.first == key; });
      if (field == sec->second.end()) throw ConfigError("unknown key " + full);
      field->second.set(full, kv.second.data());
    }
  }
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  c.simclr.train.batch_size = 1024;
  c.byol.train.batch_size = 1024;
  return c;
}

RunConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig c = default_config();
  apply_tree(c, tree);
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate(const RunConfig& c) {
  auto check = [](auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  };
  if (c.seeds.empty()) throw ConfigError("run.seeds must not be empty");
  if (c.tasks.empty()) throw ConfigError("run.tasks must not be empty");
  if (c.mode == RunMode::kCheap && c.seeds.size() < 2) throw ConfigError("run.seeds needs >= 2 seeds in cheap mode");
  check([&] { data::validate(c.data.synthetic); });
  check([&] { data::validate(c.preprocess); });

  simclr::ModelConfig sm = c.simclr.model;
  sm.channels = c.preprocess.channels.size();
  sm.length = c.preprocess.window_length;
  check([&] { simclr::validate(sm); });
  check([&] { simclr::validate(c.simclr.train); });
  check([&] { byol::validate(c.byol.train); });
  check([&] { augment::validate(c.simclr.train.pipeline, c.preprocess.window_length); });
  check([&] { augment::validate(c.byol.train.pipeline, c.preprocess.window_length); });

  if (c.byol.model.encoder.widths.empty()) throw ConfigError("byol.encoder_widths must not be empty");
  for (auto w : c.byol.model.encoder.widths)
    if (w == 0) throw ConfigError("byol.encoder_widths entries must be >= 1");
  if (c.byol.model.projector_hidden == 0) throw ConfigError("byol.projector_hidden must be >= 1");
  if (c.byol.model.projection_dim == 0) throw ConfigError("byol.projection_dim must be >= 1");
  if (c.byol.autoencoder.batch_size < 1) throw ConfigError("byol.autoencoder_batch_size must be >= 1");
  if (!(c.byol.autoencoder.lr >= 0.0)) throw ConfigError("byol.autoencoder_lr must be >= 0");
  if (c.supervised.batch_size < 2) throw ConfigError("supervised.batch_size must be >= 2");
  if (!(c.supervised.lr >= 0.0)) throw ConfigError("supervised.lr must be >= 0");
  if (c.probe.l2_grid.empty()) throw ConfigError("probe.l2_grid must not be empty");
  for (double l2 : c.probe.l2_grid)
    if (!(l2 >= 0.0)) throw ConfigError("probe.l2_grid entries must be >= 0");
  if (!(c.probe.gradient_tolerance > 0.0)) throw ConfigError("probe.gradient_tolerance must be > 0");
  if (c.probe.max_iterations < 1) throw ConfigError("probe.max_iterations must be >= 1");
}

std::string to_ini(const RunConfig& config) {
  RunConfig copy = config;
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, fields] : schema(copy)) {
    out << (first ? "" : "\n") << '[' << name << "]\n";
    first = false;
    for (const auto& [key, field] : fields) out << key << " = " << field.get() << '\n';
  }
  return out.str();
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  const std::string t = trim(text);
  std::vector<std::uint64_t> out;
  auto num = [](const std::string& s) {
    std::uint64_t v = 0;
    const std::string x = trim(s);
    auto [end, ec] = std::from_chars(x.data(), x.data() + x.size(), v);
    if (x.empty() || ec != std::errc() || end != x.data() + x.size())
      throw std::invalid_argument("bad seed '" + s + "'");
    return v;
  };
  if (const auto dots = t.find(".."); dots != std::string::npos) {
    const std::uint64_t lo = num(t.substr(0, dots)), hi = num(t.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("seed range '" + t + "' is empty");
    if (hi - lo >= 100000) throw std::invalid_argument("seed range '" + t + "' is too long");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  for (const auto& item : split_list(t)) out.push_back(num(item));
  if (out.empty()) throw std::invalid_argument("empty seed list");
  return out;
}

std::vector<data::Task> parse_task_list(const std::string& text) {
  const std::string t = trim(text);
  if (t == "all") return {data::kAllTasks.begin(), data::kAllTasks.end()};
  std::vector<data::Task> out;
  for (const auto& name : split_list(t)) {
    const auto task = data::parse_task(name);
    if (!task) throw std::invalid_argument("unknown task '" + name + "'");
    if (std::find(out.begin(), out.end(), *task) == out.end()) out.push_back(*task);
  }
  if (out.empty()) throw std::invalid_argument("empty task list");
  return out;
}

}  // namespace wearssl::cli
