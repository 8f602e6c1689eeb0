#include "curvednet/model_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace curvednet {

namespace {

std::string_view constraint_name(Constraint c) {
  switch (c) {
    case Constraint::none: return "none";
    case Constraint::sphere_rows: return "sphere_rows";
    case Constraint::ball_rows: return "ball_rows";
  }
  return "none";
}

[[noreturn]] void bad(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ModelFormat, "model line " + std::to_string(line) + ": " + what);
}

void write_values(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? " " : "") << format_double(values[i]);
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next line split into whitespace tokens; the key must match.
  std::vector<std::string> expect(std::string_view key) {
    if (!std::getline(in_, line_)) bad(line_no_ + 1, "unexpected end of file, wanted " + std::string(key));
    ++line_no_;
    std::istringstream ss(line_);
    std::vector<std::string> tokens;
    for (std::string t; ss >> t;) tokens.push_back(t);
    if (tokens.empty() || tokens.front() != key) bad(line_no_, "expected '" + std::string(key) + "'");
    tokens.erase(tokens.begin());
    return tokens;
  }

  std::string peek_key() {
    const auto pos = in_.tellg();
    std::string l;
    std::getline(in_, l);
    in_.seekg(pos);
    std::istringstream ss(l);
    std::string key;
    ss >> key;
    return key;
  }

  const std::string& line() const { return line_; }
  std::size_t line_no() const { return line_no_; }

  double to_double(const std::string& s) const {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) bad(line_no_, "bad number '" + s + "'");
    return v;
  }
  std::size_t to_size(const std::string& s) const {
    std::size_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) bad(line_no_, "bad count '" + s + "'");
    return v;
  }
  std::vector<double> doubles(std::size_t expected) {
    if (!std::getline(in_, line_)) bad(line_no_ + 1, "missing values");
    ++line_no_;
    std::istringstream ss(line_);
    std::vector<double> out;
    for (std::string t; ss >> t;) out.push_back(to_double(t));
    if (out.size() != expected) bad(line_no_, "wrong number of values");
    return out;
  }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

}  // namespace

void save_model(std::ostream& out, const Model& model) {
  const ModelConfig& c = model.config();
  out << kModelMagic << '\n';
  out << "architecture " << to_string(c.architecture) << '\n';
  out << "geometries";
  if (c.geometries.empty()) out << " none";
  for (const auto& g : c.geometries) out << ' ' << to_string(g.kind) << ':' << format_double(g.curvature);
  out << '\n';
  out << "input_dim " << c.input_dim << '\n';
  out << "hidden";
  if (c.hidden.empty()) out << " none";
  for (std::size_t h : c.hidden) out << ' ' << h;
  out << '\n';
  out << "embed_dim " << c.embed_dim << '\n';
  out << "classes " << c.classes << '\n';
  out << "xi " << format_double(c.xi) << '\n';
  out << "init " << to_string(c.init) << '\n';
  out << "standardize " << (c.standardize ? 1 : 0) << '\n';
  out << "standardization " << model.input_shift().size() << '\n';
  if (!model.input_shift().empty()) {
    write_values(out, model.input_shift());
    write_values(out, model.input_scale());
  }
  out << "metadata " << model.metadata.size() << '\n';
  for (const auto& [k, v] : model.metadata) out << "meta " << k << ' ' << v << '\n';
  out << "params " << model.params().size() << '\n';
  for (const auto& p : model.params()) {
    out << "param " << p.name << ' ' << constraint_name(p.constraint) << ' '
        << format_double(p.curvature) << ' ' << format_double(p.xi) << ' ' << p.rows() << ' '
        << p.cols() << ' ' << p.shape.size() << '\n';
    write_values(out, p.value);
  }
  out << "end\n";
}

Model load_model(std::istream& in) {
  std::string magic;
  if (!std::getline(in, magic) || magic != kModelMagic) {
    throw Error(ErrorCode::ModelFormat, "not a model file (missing " + std::string(kModelMagic) + ")");
  }
  Reader r(in);
  ModelConfig c;
  {
    const auto t = r.expect("architecture");
    if (t.size() != 1) bad(r.line_no(), "architecture takes one value");
    if (t[0] == "baseline") c.architecture = Architecture::baseline;
    else if (t[0] == "gio") c.architecture = Architecture::gio;
    else if (t[0] == "git") c.architecture = Architecture::git;
    else bad(r.line_no(), "unknown architecture '" + t[0] + "'");
  }
  for (const auto& tok : r.expect("geometries")) {
    if (tok == "none") continue;
    const auto colon = tok.find(':');
    if (colon == std::string::npos) bad(r.line_no(), "geometry tag needs kind:curvature");
    const std::string kind = tok.substr(0, colon);
    const double k = r.to_double(tok.substr(colon + 1));
    if (kind == "euclidean") c.geometries.push_back(GeometryTag::euclidean());
    else if (kind == "spherical") c.geometries.push_back(GeometryTag::spherical(k));
    else if (kind == "hyperbolic") c.geometries.push_back(GeometryTag::hyperbolic(k));
    else bad(r.line_no(), "unknown geometry '" + kind + "'");
  }
  c.input_dim = r.to_size(r.expect("input_dim").at(0));
  for (const auto& tok : r.expect("hidden")) {
    if (tok != "none") c.hidden.push_back(r.to_size(tok));
  }
  c.embed_dim = r.to_size(r.expect("embed_dim").at(0));
  c.classes = r.to_size(r.expect("classes").at(0));
  c.xi = r.to_double(r.expect("xi").at(0));
  c.init = r.expect("init").at(0) == "uniform" ? InitMode::uniform : InitMode::random;
  c.standardize = r.expect("standardize").at(0) == "1";
  const std::size_t n_std = r.to_size(r.expect("standardization").at(0));
  std::vector<double> shift;
  std::vector<double> scale;
  if (n_std > 0) {
    shift = r.doubles(n_std);
    scale = r.doubles(n_std);
  }
  const std::size_t n_meta = r.to_size(r.expect("metadata").at(0));
  std::vector<std::pair<std::string, std::string>> metadata;
  for (std::size_t i = 0; i < n_meta; ++i) {
    const auto t = r.expect("meta");
    if (t.empty()) bad(r.line_no(), "meta needs a key");
    const std::string& line = r.line();
    const auto key_pos = line.find(t[0], 5);
    const auto value_pos = key_pos + t[0].size() + 1;
    metadata.emplace_back(t[0], value_pos < line.size() ? line.substr(value_pos) : "");
  }
  const std::size_t n_params = r.to_size(r.expect("params").at(0));
  ParamSet params;
  for (std::size_t i = 0; i < n_params; ++i) {
    const auto t = r.expect("param");
    if (t.size() != 7) bad(r.line_no(), "param header needs 7 fields");
    Constraint constraint = Constraint::none;
    if (t[1] == "sphere_rows") constraint = Constraint::sphere_rows;
    else if (t[1] == "ball_rows") constraint = Constraint::ball_rows;
    else if (t[1] != "none") bad(r.line_no(), "unknown constraint '" + t[1] + "'");
    const double k = r.to_double(t[2]);
    const double xi = r.to_double(t[3]);
    const std::size_t rows = r.to_size(t[4]);
    const std::size_t cols = r.to_size(t[5]);
    const std::size_t rank = r.to_size(t[6]);
    std::vector<std::size_t> shape = rank == 2 ? std::vector<std::size_t>{rows, cols}
                                               : std::vector<std::size_t>{cols};
    params.add(t[0], std::move(shape), r.doubles(rows * cols), constraint, k, xi);
  }
  r.expect("end");
  Model m = Model::assemble(c, std::move(params));
  m.set_standardization(std::move(shift), std::move(scale));
  m.metadata = std::move(metadata);
  return m;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  save_model(out, model);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return load_model(in);
}

}  // namespace curvednet
