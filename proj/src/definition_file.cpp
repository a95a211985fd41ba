#include "fman/definition_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fman/gallery.hpp"
#include "fman/sampling.hpp"

namespace fman {

namespace {

using boost::property_tree::ptree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) out.push_back(trim(part));
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  double v = 0.0;
  const std::string t = trim(text);
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw DefinitionError(where + ": '" + t + "' is not a number");
  return v;
}

int parse_count(const std::string& text, const std::string& where) {
  int v = 0;
  const std::string t = trim(text);
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || v < 0) throw DefinitionError(where + ": '" + t + "' is not a non-negative integer");
  return v;
}

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// "name.K" with 1 <= K <= count
std::optional<int> indexed_section(const std::string& key, const std::string& prefix, int count,
                                   const std::string& where) {
  if (key.rfind(prefix + ".", 0) != 0) return std::nullopt;
  const int k = parse_count(key.substr(prefix.size() + 1), where);
  if (k < 1 || k > count) throw DefinitionError(where + ": index " + std::to_string(k) + " outside 1.." + std::to_string(count));
  return k - 1;
}

class Reader {
 public:
  Reader(const ptree& root, std::string origin) : root_(root), origin_(std::move(origin)) {}

  MetricFManifold read() {
    for (const auto& [key, node] : root_) {
      if (node.empty() && !node.data().empty()) throw error("entry '" + key + "' outside of any section");
    }
    read_chart();
    const int m = chart_->dim();
    const int s = chart_->s();
    MetricField g(m);
    Tensor11Field f(m);
    std::vector<VectorField> xi(static_cast<std::size_t>(s), VectorField(m));
    std::vector<OneForm> eta(static_cast<std::size_t>(s), OneForm(m));
    std::vector<bool> xi_seen(static_cast<std::size_t>(s)), eta_seen(static_cast<std::size_t>(s));
    std::optional<CharacteristicExprs> declared;
    std::string name;
    std::map<int, std::string> notes;

    for (const auto& [section, node] : root_) {
      const std::string where = origin_ + " [" + section + "]";
      if (section == "chart") continue;
      if (section == "manifold") {
        for (const auto& [key, value] : node) {
          if (key == "name") {
            name = trim(value.data());
          } else if (key.rfind("note.", 0) == 0) {
            notes[parse_count(key.substr(5), where)] = trim(value.data());
          } else {
            throw error("unknown key '" + key + "' in [manifold]");
          }
        }
      } else if (section == "metric") {
        read_metric(node, g, where);
      } else if (section == "f") {
        for (const auto& [key, value] : node) {
          const auto [k, j] = pair_key(key, where);
          f(k, j) = expression(value.data(), where + " " + key);
        }
      } else if (auto i = indexed_section(section, "xi", s, where)) {
        xi_seen[static_cast<std::size_t>(*i)] = true;
        for (const auto& [key, value] : node) {
          xi[static_cast<std::size_t>(*i)][coordinate(key, where)] = expression(value.data(), where + " " + key);
        }
      } else if (auto j = indexed_section(section, "eta", s, where)) {
        eta_seen[static_cast<std::size_t>(*j)] = true;
        for (const auto& [key, value] : node) {
          eta[static_cast<std::size_t>(*j)][coordinate(key, where)] = expression(value.data(), where + " " + key);
        }
      } else if (section == "declared") {
        declared = read_declared(node, s, where);
      } else {
        throw error("unknown section [" + section + "]");
      }
    }
    for (int i = 0; i < s; ++i) {
      if (!xi_seen[static_cast<std::size_t>(i)]) throw error("missing section [xi." + std::to_string(i + 1) + "]");
      if (!eta_seen[static_cast<std::size_t>(i)]) throw error("missing section [eta." + std::to_string(i + 1) + "]");
    }
    if (name.empty()) name = std::filesystem::path(origin_).stem().string();
    try {
      MetricFManifold M(name, *chart_, std::move(f), std::move(xi), std::move(eta), std::move(g));
      if (declared) M.set_declared(std::move(*declared));
      for (auto& [k, text] : notes) M.add_note(std::move(text));
      return M;
    } catch (const GeometryError& e) {
      throw error(e.what());
    }
  }

 private:
  DefinitionError error(const std::string& what) const { return DefinitionError(origin_ + ": " + what); }

  void read_chart() {
    const auto it = root_.find("chart");
    if (it == root_.not_found()) throw error("missing section [chart]");
    const ptree& node = it->second;
    std::optional<int> n, s;
    std::vector<std::string> coords;
    std::map<std::string, Interval> domain;
    for (const auto& [key, value] : node) {
      const std::string where = origin_ + " [chart] " + key;
      if (key == "n") {
        n = parse_count(value.data(), where);
      } else if (key == "s") {
        s = parse_count(value.data(), where);
      } else if (key == "coordinates") {
        coords = split(value.data(), ',');
      } else if (key.rfind("domain.", 0) == 0) {
        const auto bounds = split(value.data(), ',');
        if (bounds.size() != 2) throw DefinitionError(where + ": expected 'lo, hi'");
        domain[key.substr(7)] = Interval{parse_number(bounds[0], where), parse_number(bounds[1], where)};
      } else {
        throw error("unknown key '" + key + "' in [chart]");
      }
    }
    if (!n || !s) throw error("[chart] needs n and s");
    if (coords.empty()) throw error("[chart] needs coordinates");
    if (static_cast<int>(coords.size()) != 2 * *n + *s) {
      throw error("[chart] lists " + std::to_string(coords.size()) + " coordinates but 2n+s = " +
                  std::to_string(2 * *n + *s));
    }
    std::vector<Interval> intervals;
    for (const auto& c : coords) {
      const auto d = domain.find(c);
      if (d == domain.end()) throw error("[chart] has no domain." + c);
      intervals.push_back(d->second);
      domain.erase(d);
    }
    if (!domain.empty()) throw error("[chart] domain for unknown coordinate '" + domain.begin()->first + "'");
    try {
      chart_ = Chart(*n, *s, coords, intervals);
    } catch (const GeometryError& e) {
      throw error(e.what());
    }
  }

  int coordinate(const std::string& key, const std::string& where) const {
    const auto idx = chart_->index_of(trim(key));
    if (!idx) throw DefinitionError(where + ": unknown coordinate '" + trim(key) + "'");
    return static_cast<int>(*idx);
  }

  std::pair<int, int> pair_key(const std::string& key, const std::string& where) const {
    const auto parts = split(key, ',');
    if (parts.size() != 2) throw DefinitionError(where + ": key '" + key + "' must name two coordinates");
    return {coordinate(parts[0], where), coordinate(parts[1], where)};
  }

  Expr expression(const std::string& text, const std::string& where) const {
    try {
      return chart_->parse(text);
    } catch (const ExprError& e) {
      throw DefinitionError(where + ": " + e.what());
    }
  }

  void read_metric(const ptree& node, MetricField& g, const std::string& where) const {
    const int m = chart_->dim();
    std::vector<bool> set(static_cast<std::size_t>(m * m));
    for (const auto& [key, value] : node) {
      const auto [i, j] = pair_key(key, where);
      g(i, j) = expression(value.data(), where + " " + key);
      set[static_cast<std::size_t>(i * m + j)] = true;
    }
    const std::vector<Point> points = sample_points(*chart_, SampleOptions{16, 0, false, 0});
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const bool ij = set[static_cast<std::size_t>(i * m + j)];
        const bool ji = set[static_cast<std::size_t>(j * m + i)];
        if (ij && !ji) g(j, i) = g(i, j);
        if (ji && !ij) g(i, j) = g(j, i);
        if (ij && ji) {
          for (const auto& p : points) {
            double a = 0.0, b = 0.0;
            try {
              a = g(i, j).evaluate(p);
              b = g(j, i).evaluate(p);
            } catch (const DomainError& e) {
              throw DefinitionError(where + ": " + e.what());
            }
            if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a) + std::abs(b))) {
              const auto& c = chart_->coordinates();
              throw DefinitionError(where + ": metric is not symmetric (" + c[static_cast<std::size_t>(i)] + "," +
                                    c[static_cast<std::size_t>(j)] + ")");
            }
          }
        }
      }
    }
  }

  CharacteristicExprs read_declared(const ptree& node, int s, const std::string& where) const {
    CharacteristicExprs cf{std::vector<Expr>(static_cast<std::size_t>(s)), std::vector<Expr>(static_cast<std::size_t>(s))};
    for (const auto& [key, value] : node) {
      if (auto i = indexed_section(key, "alpha", s, where)) {
        cf.alpha[static_cast<std::size_t>(*i)] = expression(value.data(), where + " " + key);
      } else if (auto j = indexed_section(key, "beta", s, where)) {
        cf.beta[static_cast<std::size_t>(*j)] = expression(value.data(), where + " " + key);
      } else {
        throw DefinitionError(where + ": unknown key '" + key + "'");
      }
    }
    return cf;
  }

  const ptree& root_;
  std::string origin_;
  std::optional<Chart> chart_;
};

}  // namespace

MetricFManifold parse_definition(const std::string& text, const std::string& origin) {
  ptree root;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw DefinitionError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  return Reader(root, origin).read();
}

MetricFManifold load_definition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DefinitionError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_definition(buf.str(), path.string());
}

MetricFManifold load_manifold(std::string_view source) {
  constexpr std::string_view prefix = "gallery:";
  if (source.substr(0, prefix.size()) == prefix) {
    try {
      return gallery(source.substr(prefix.size()));
    } catch (const std::invalid_argument& e) {
      throw DefinitionError(e.what());
    } catch (const ExprError& e) {
      throw DefinitionError(std::string(source) + ": " + e.what());
    }
  }
  return load_definition(std::filesystem::path(source));
}

std::string format_definition(const MetricFManifold& M) {
  const Chart& chart = M.chart();
  const auto& c = chart.coordinates();
  const int m = M.dim();
  std::ostringstream out;
  out << "[manifold]\nname = " << M.name() << "\n";
  for (std::size_t k = 0; k < M.notes().size(); ++k) out << "note." << k + 1 << " = " << M.notes()[k] << "\n";
  out << "\n[chart]\nn = " << M.n() << "\ns = " << M.s() << "\ncoordinates = ";
  for (std::size_t i = 0; i < c.size(); ++i) out << (i ? ", " : "") << c[i];
  out << "\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << "domain." << c[i] << " = " << format_number(chart.domain()[i].lo) << ", "
        << format_number(chart.domain()[i].hi) << "\n";
  }
  out << "\n[metric]\n";
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      if (!M.g()(i, j).is_constant(0.0)) {
        out << c[static_cast<std::size_t>(i)] << "," << c[static_cast<std::size_t>(j)] << " = " << M.g()(i, j).to_string() << "\n";
      }
    }
  }
  out << "\n[f]\n";
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      if (!M.f()(k, j).is_constant(0.0)) {
        out << c[static_cast<std::size_t>(k)] << "," << c[static_cast<std::size_t>(j)] << " = " << M.f()(k, j).to_string() << "\n";
      }
    }
  }
  auto vector_section = [&](const std::string& title, const std::vector<Expr>& comps) {
    out << "\n[" << title << "]\n";
    for (int i = 0; i < m; ++i) {
      if (!comps[static_cast<std::size_t>(i)].is_constant(0.0)) {
        out << c[static_cast<std::size_t>(i)] << " = " << comps[static_cast<std::size_t>(i)].to_string() << "\n";
      }
    }
  };
  for (int i = 0; i < M.s(); ++i) {
    vector_section("xi." + std::to_string(i + 1), M.xi()[static_cast<std::size_t>(i)].components);
    vector_section("eta." + std::to_string(i + 1), M.eta()[static_cast<std::size_t>(i)].components);
  }
  if (M.declared()) {
    out << "\n[declared]\n";
    for (int i = 0; i < M.s(); ++i) out << "alpha." << i + 1 << " = " << M.declared()->alpha[static_cast<std::size_t>(i)].to_string() << "\n";
    for (int i = 0; i < M.s(); ++i) out << "beta." << i + 1 << " = " << M.declared()->beta[static_cast<std::size_t>(i)].to_string() << "\n";
  }
  return out.str();
}

void save_definition(const MetricFManifold& M, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DefinitionError("cannot write '" + path.string() + "'");
  out << format_definition(M);
  if (!out) throw DefinitionError("failed writing '" + path.string() + "'");
}

}  // namespace fman
