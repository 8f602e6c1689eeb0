#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace curvednet::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& v) {
  T out{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw std::invalid_argument(v);
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(v);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"architecture", [](RunConfig& c, const std::string& v) { c.architecture = v; }},
      {"curvature_s", [](RunConfig& c, const std::string& v) { c.curvature_s = parse_number<double>(v); }},
      {"curvature_h", [](RunConfig& c, const std::string& v) { c.curvature_h = parse_number<double>(v); }},
      {"mixed_components", [](RunConfig& c, const std::string& v) { c.mixed_components = split_list(v); }},
      {"embed_dim", [](RunConfig& c, const std::string& v) { c.embed_dim = parse_number<std::size_t>(v); }},
      {"extractor_hidden",
       [](RunConfig& c, const std::string& v) {
         c.extractor_hidden.clear();
         if (v == "none") return;
         for (const auto& t : split_list(v)) c.extractor_hidden.push_back(parse_number<std::size_t>(t));
       }},
      {"epochs", [](RunConfig& c, const std::string& v) { c.epochs = parse_number<std::size_t>(v); }},
      {"lr", [](RunConfig& c, const std::string& v) { c.lr = parse_number<double>(v); }},
      {"batch_size", [](RunConfig& c, const std::string& v) { c.batch_size = parse_number<std::size_t>(v); }},
      {"max_grad_norm", [](RunConfig& c, const std::string& v) { c.max_grad_norm = parse_number<double>(v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>(v); }},
      {"xi", [](RunConfig& c, const std::string& v) { c.xi = parse_number<double>(v); }},
      {"init",
       [](RunConfig& c, const std::string& v) {
         if (v == "random") c.init = InitMode::random;
         else if (v == "uniform") c.init = InitMode::uniform;
         else throw std::invalid_argument(v);
       }},
      {"standardize", [](RunConfig& c, const std::string& v) { c.standardize = parse_bool(v); }},
      {"detection_error_mode",
       [](RunConfig& c, const std::string& v) {
         if (v == "min") c.detection_error_mode = DetectionErrorMode::min_over_thresholds;
         else if (v == "tpr95") c.detection_error_mode = DetectionErrorMode::at_95_tpr;
         else throw std::invalid_argument(v);
       }},
      {"aupr_positive",
       [](RunConfig& c, const std::string& v) {
         if (v == "ood") c.aupr_positive = PositiveClass::ood;
         else if (v == "id") c.aupr_positive = PositiveClass::id;
         else throw std::invalid_argument(v);
       }},
      {"data_source",
       [](RunConfig& c, const std::string& v) {
         if (v == "synthetic") c.data_source = DataSource::synthetic;
         else if (v == "embeddings") c.data_source = DataSource::embeddings;
         else throw std::invalid_argument(v);
       }},
      {"n_super", [](RunConfig& c, const std::string& v) { c.synthetic.n_super = parse_number<std::size_t>(v); }},
      {"n_sub_per_super",
       [](RunConfig& c, const std::string& v) { c.synthetic.n_sub_per_super = parse_number<std::size_t>(v); }},
      {"dim", [](RunConfig& c, const std::string& v) { c.synthetic.dim = parse_number<std::size_t>(v); }},
      {"super_spread", [](RunConfig& c, const std::string& v) { c.synthetic.super_spread = parse_number<double>(v); }},
      {"sub_spread", [](RunConfig& c, const std::string& v) { c.synthetic.sub_spread = parse_number<double>(v); }},
      {"noise_std", [](RunConfig& c, const std::string& v) { c.synthetic.noise_std = parse_number<double>(v); }},
      {"samples_per_leaf",
       [](RunConfig& c, const std::string& v) { c.synthetic.samples_per_leaf = parse_number<std::size_t>(v); }},
      {"ood_leaves", [](RunConfig& c, const std::string& v) { c.synthetic.ood_leaves = parse_number<std::size_t>(v); }},
      {"train_fraction",
       [](RunConfig& c, const std::string& v) { c.synthetic.train_fraction = parse_number<double>(v); }},
  };
  return table;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

void RunConfig::validate() const {
  const auto bad = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  static const std::set<std::string> archs = {"baseline", "sio", "hio", "mio", "sit", "hit", "mit"};
  if (!archs.count(architecture)) bad("unknown architecture '" + architecture + "'");
  if (!(curvature_s > 0.0)) bad("curvature_s must be > 0");
  if (!(curvature_h < 0.0)) bad("curvature_h must be < 0");
  if (architecture == "mio" || architecture == "mit") {
    if (mixed_components.size() < 2) bad("mixed architectures need at least two components");
    for (const auto& m : mixed_components) {
      if (m != "euclidean" && m != "spherical" && m != "hyperbolic") {
        bad("unknown mixed component '" + m + "'");
      }
    }
  }
  if (epochs == 0) bad("epochs must be positive");
  if (batch_size == 0) bad("batch_size must be positive");
  if (!(lr >= 0.0)) bad("lr must be >= 0");
  if (!(max_grad_norm >= 0.0)) bad("max_grad_norm must be >= 0");
  if (!(xi > 0.0 && xi < 1.0)) bad("xi must lie in (0, 1)");
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "config line " + std::to_string(n) + ": ";
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, where + "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw Error(ErrorCode::ConfigError, where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw Error(ErrorCode::ConfigError, where + "repeated key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const std::invalid_argument&) {
      throw Error(ErrorCode::ConfigError, where + "bad value '" + value + "' for " + key);
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  return parse_run_config(in);
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  std::vector<std::string> hidden;
  for (std::size_t h : c.extractor_hidden) hidden.push_back(std::to_string(h));
  o << "architecture = " << c.architecture << '\n'
    << "curvature_s = " << format_double(c.curvature_s) << '\n'
    << "curvature_h = " << format_double(c.curvature_h) << '\n'
    << "mixed_components = " << join(c.mixed_components) << '\n'
    << "embed_dim = " << c.embed_dim << '\n'
    << "extractor_hidden = " << (hidden.empty() ? "none" : join(hidden)) << '\n'
    << "epochs = " << c.epochs << '\n'
    << "lr = " << format_double(c.lr) << '\n'
    << "batch_size = " << c.batch_size << '\n'
    << "max_grad_norm = " << format_double(c.max_grad_norm) << '\n'
    << "seed = " << c.seed << '\n'
    << "xi = " << format_double(c.xi) << '\n'
    << "init = " << to_string(c.init) << '\n'
    << "standardize = " << (c.standardize ? "true" : "false") << '\n'
    << "detection_error_mode = " << to_string(c.detection_error_mode) << '\n'
    << "aupr_positive = " << to_string(c.aupr_positive) << '\n'
    << "data_source = " << (c.data_source == DataSource::synthetic ? "synthetic" : "embeddings") << '\n'
    << "n_super = " << c.synthetic.n_super << '\n'
    << "n_sub_per_super = " << c.synthetic.n_sub_per_super << '\n'
    << "dim = " << c.synthetic.dim << '\n'
    << "super_spread = " << format_double(c.synthetic.super_spread) << '\n'
    << "sub_spread = " << format_double(c.synthetic.sub_spread) << '\n'
    << "noise_std = " << format_double(c.synthetic.noise_std) << '\n'
    << "samples_per_leaf = " << c.synthetic.samples_per_leaf << '\n'
    << "ood_leaves = " << c.synthetic.ood_leaves << '\n'
    << "train_fraction = " << format_double(c.synthetic.train_fraction) << '\n';
  return o.str();
}

ModelConfig model_config(const RunConfig& c, std::size_t input_dim, std::size_t classes) {
  c.validate();
  ModelConfig m = model_config_for(c.architecture, c.curvature_s, c.curvature_h);
  if (c.architecture == "mio" || c.architecture == "mit") {
    m.geometries.clear();
    for (const auto& name : c.mixed_components) {
      if (name == "euclidean") m.geometries.push_back(GeometryTag::euclidean());
      if (name == "spherical") m.geometries.push_back(GeometryTag::spherical(c.curvature_s));
      if (name == "hyperbolic") m.geometries.push_back(GeometryTag::hyperbolic(c.curvature_h));
    }
  }
  m.input_dim = input_dim;
  m.classes = classes;
  m.xi = c.xi;
  m.init = c.init;
  m.standardize = c.standardize;
  if (c.data_source == DataSource::embeddings) {
    // Precomputed features: the extractor is the identity.
    m.hidden.clear();
    m.embed_dim = input_dim;
  } else {
    m.hidden = c.extractor_hidden;
    m.embed_dim = c.embed_dim;
    if (m.hidden.empty()) m.embed_dim = input_dim;
  }
  m.validate();
  return m;
}

TrainConfig train_config(const RunConfig& c) {
  TrainConfig t;
  t.epochs = c.epochs;
  t.lr = c.lr;
  t.batch_size = c.batch_size;
  t.seed = c.seed;
  t.max_grad_norm = c.max_grad_norm;
  return t;
}

MetricsOptions metrics_options(const RunConfig& c) {
  return {c.detection_error_mode, c.aupr_positive};
}

}  // namespace curvednet::cli
