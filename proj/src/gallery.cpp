#include "fman/gallery.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "fman/constructions.hpp"

namespace fman {

namespace {

// Component fields filled by coordinate name.
class Builder {
 public:
  Builder(int n, int s, std::vector<std::string> coords, Interval box = {-1.0, 1.0})
      : chart_(n, s, coords, std::vector<Interval>(coords.size(), box)),
        g_(chart_.dim()),
        f_(chart_.dim()),
        xi_(static_cast<std::size_t>(s), VectorField(chart_.dim())),
        eta_(static_cast<std::size_t>(s), OneForm(chart_.dim())) {}

  int idx(const std::string& name) const { return static_cast<int>(chart_.index_of(name).value()); }
  Expr var(const std::string& name) const { return chart_.coordinate(static_cast<std::size_t>(idx(name))); }
  Expr parse(const std::string& text) const { return chart_.parse(text); }
  int dim() const { return chart_.dim(); }

  void metric(int i, int j, const Expr& e) {
    g_(i, j) = e;
    g_(j, i) = e;
  }
  void f(const std::string& upper, const std::string& lower, const Expr& e) { f_(idx(upper), idx(lower)) = e; }
  void xi(int i, const std::string& c, const Expr& e) { xi_[static_cast<std::size_t>(i)][idx(c)] = e; }
  void eta(int i, const std::string& c, const Expr& e) { eta_[static_cast<std::size_t>(i)][idx(c)] = e; }
  const OneForm& eta(int i) const { return eta_[static_cast<std::size_t>(i)]; }

  MetricFManifold build(std::string name) const {
    return MetricFManifold(std::move(name), chart_, f_, xi_, eta_, g_);
  }

 private:
  Chart chart_;
  MetricField g_;
  Tensor11Field f_;
  std::vector<VectorField> xi_;
  std::vector<OneForm> eta_;
};

std::string num(int i) { return std::to_string(i); }

std::vector<std::string> names(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(prefix + num(i));
  return out;
}

std::vector<std::string> concat(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// J∂x_j = ∂y_j
void standard_complex(Builder& b, int n) {
  for (int j = 1; j <= n; ++j) {
    b.f("y" + num(j), "x" + num(j), Expr(1.0));
    b.f("x" + num(j), "y" + num(j), Expr(-1.0));
  }
}

MetricFManifold euclidean_c(int n, int s) {
  Builder b(n, s, concat({names("x", n), names("y", n), names("t", s)}));
  for (int i = 0; i < b.dim(); ++i) b.metric(i, i, Expr(1.0));
  standard_complex(b, n);
  for (int i = 0; i < s; ++i) {
    b.xi(i, "t" + num(i + 1), Expr(1.0));
    b.eta(i, "t" + num(i + 1), Expr(1.0));
  }
  MetricFManifold M = b.build("euclidean_C(" + num(n) + "," + num(s) + ")");
  M.set_declared({std::vector<Expr>(static_cast<std::size_t>(s)), std::vector<Expr>(static_cast<std::size_t>(s))});
  return M;
}

MetricFManifold hermitian_flat(int n) {
  Builder b(n, 0, concat({names("x", n), names("y", n)}));
  for (int i = 0; i < b.dim(); ++i) b.metric(i, i, Expr(1.0));
  standard_complex(b, n);
  return b.build("hermitian_flat(" + num(n) + ")");
}

// G = I on R^4 and J = R J₀ Rᵀ, R the rotation of the (x1, x2) plane by the angle y2.
MetricFManifold hermitian_rotated() {
  Builder b(2, 0, {"x1", "y1", "x2", "y2"});
  for (int i = 0; i < 4; ++i) b.metric(i, i, Expr(1.0));
  const Expr c = cos(b.var("y2"));
  const Expr s = sin(b.var("y2"));
  using M4 = std::array<std::array<Expr, 4>, 4>;
  M4 R{}, J0{}, Rt{};
  R[0][0] = c;
  R[2][0] = s;
  R[0][2] = -s;
  R[2][2] = c;
  R[1][1] = Expr(1.0);
  R[3][3] = Expr(1.0);
  J0[1][0] = Expr(1.0);
  J0[0][1] = Expr(-1.0);
  J0[3][2] = Expr(1.0);
  J0[2][3] = Expr(-1.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) Rt[i][j] = R[j][i];
  auto mul = [](const M4& A, const M4& B) {
    M4 C{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) C[i][j] = C[i][j] + A[i][k] * B[k][j];
    return C;
  };
  const M4 J = mul(mul(R, J0), Rt);
  const char* coords[] = {"x1", "y1", "x2", "y2"};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) b.f(coords[i], coords[j], J[i][j]);
  return b.build("hermitian_rotated");
}

// η_i = ½dz_i − ½Σ y_j dx_j, ξ_i = 2∂z_i, g = Σ η_i⊗η_i + ¼Σ(dx_j² + dy_j²),
// f∂x_j = −∂y_j, f∂y_j = ∂x_j + y_j Σ ∂z_i.
MetricFManifold standard_s(int n, int s) {
  Builder b(n, s, concat({names("x", n), names("y", n), names("z", s)}));
  for (int i = 0; i < s; ++i) {
    const std::string z = "z" + num(i + 1);
    b.eta(i, z, Expr(0.5));
    b.xi(i, z, Expr(2.0));
    for (int j = 1; j <= n; ++j) b.eta(i, "x" + num(j), Expr(-0.5) * b.var("y" + num(j)));
  }
  for (int j = 1; j <= n; ++j) {
    const std::string x = "x" + num(j), y = "y" + num(j);
    b.f(y, x, Expr(-1.0));
    b.f(x, y, Expr(1.0));
    for (int i = 1; i <= s; ++i) b.f("z" + num(i), y, b.var(y));
  }
  for (int p = 0; p < b.dim(); ++p) {
    for (int q = p; q < b.dim(); ++q) {
      Expr e = p == q && p < 2 * n ? Expr(0.25) : Expr();
      for (int i = 0; i < s; ++i) e = e + b.eta(i)[p] * b.eta(i)[q];
      b.metric(p, q, e);
    }
  }
  MetricFManifold M = b.build("standard_S(" + num(n) + "," + num(s) + ")");
  M.set_declared({std::vector<Expr>(static_cast<std::size_t>(s), Expr(1.0)), std::vector<Expr>(static_cast<std::size_t>(s))});
  return M;
}

// ξ = ∂z, η = dz − c x dy, g = η⊗η + e^{2u(z)}(dx² + dy²), φ∂x = ∂y + c x ∂z, φ∂y = −∂x
// with c = 2 and u = z²/2, so that α = e^{−z²} and β = z.
MetricFManifold trans_sasakian_3d() {
  Builder b(1, 1, {"x", "y", "z"});
  const Expr x = b.var("x");
  const Expr conformal = b.parse("exp(z^2)");
  b.xi(0, "z", Expr(1.0));
  b.eta(0, "z", Expr(1.0));
  b.eta(0, "y", Expr(-2.0) * x);
  b.f("y", "x", Expr(1.0));
  b.f("z", "x", Expr(2.0) * x);
  b.f("x", "y", Expr(-1.0));
  for (int p = 0; p < 3; ++p) {
    for (int q = p; q < 3; ++q) {
      Expr e = b.eta(0)[p] * b.eta(0)[q];
      if (p == q && p < 2) e = e + conformal;
      b.metric(p, q, e);
    }
  }
  MetricFManifold M = b.build("trans_sasakian_3d");
  M.set_declared({{b.parse("exp(-z^2)")}, {b.parse("z")}});
  return M;
}

MetricFManifold kenmotsu(int n) {
  WarpParams w;
  w.s = 1;
  w.h = "exp(t1)";
  MetricFManifold M = warp_kaehler(hermitian_flat(n), w);
  M.set_name("kenmotsu(" + num(n) + ")");
  M.set_declared({{Expr()}, {Expr(1.0)}});
  return M;
}

MetricFManifold deformed(const MetricFManifold& base, const std::string& a, const std::string& b, std::string name) {
  DeformationParams p{base.chart().parse(a), base.chart().parse(b)};
  MetricFManifold M = d_conformal_deform(base, p);
  M.set_name(std::move(name));
  return M;
}

int to_int(const std::string& text, const std::string& what) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || v < 1) throw std::invalid_argument(what + " must be a positive integer");
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::pair<std::string, std::vector<std::string>> split_call(std::string_view spec) {
  const std::string text = trim(spec);
  const auto open = text.find('(');
  if (open == std::string::npos) return {text, {}};
  if (text.back() != ')') throw std::invalid_argument("malformed gallery reference '" + text + "'");
  std::vector<std::string> args;
  int depth = 0;
  std::string current;
  for (std::size_t i = open + 1; i + 1 < text.size(); ++i) {
    const char c = text[i];
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) throw std::invalid_argument("unbalanced parentheses in '" + text + "'");
    if (c == ',' && depth == 0) {
      args.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (depth != 0) throw std::invalid_argument("unbalanced parentheses in '" + text + "'");
  if (!trim(current).empty() || !args.empty()) args.push_back(trim(current));
  return {trim(text.substr(0, open)), args};
}

MetricFManifold hermitian_product(const MetricFManifold& A, const MetricFManifold& B) {
  if (A.s() != 0) throw std::invalid_argument("first product factor must be almost Hermitian");
  std::vector<std::string> coords = A.chart().coordinates();
  coords.insert(coords.end(), B.chart().coordinates().begin(), B.chart().coordinates().end());
  std::vector<Interval> domain = A.chart().domain();
  domain.insert(domain.end(), B.chart().domain().begin(), B.chart().domain().end());
  const Chart chart(A.n() + B.n(), B.s(), coords, domain);
  const int ma = A.dim(), m = chart.dim();
  MetricField g(m);
  Tensor11Field f(m);
  auto lift = [&](const Expr& e) { return e.rebind(coords); };
  for (int i = 0; i < ma; ++i)
    for (int j = 0; j < ma; ++j) {
      g(i, j) = lift(A.g()(i, j));
      f(i, j) = lift(A.f()(i, j));
    }
  for (int i = 0; i < B.dim(); ++i)
    for (int j = 0; j < B.dim(); ++j) {
      g(ma + i, ma + j) = lift(B.g()(i, j));
      f(ma + i, ma + j) = lift(B.f()(i, j));
    }
  std::vector<VectorField> xi;
  std::vector<OneForm> eta;
  for (int k = 0; k < B.s(); ++k) {
    VectorField x(m);
    OneForm e(m);
    for (int i = 0; i < B.dim(); ++i) {
      x[ma + i] = lift(B.xi()[static_cast<std::size_t>(k)][i]);
      e[ma + i] = lift(B.eta()[static_cast<std::size_t>(k)][i]);
    }
    xi.push_back(std::move(x));
    eta.push_back(std::move(e));
  }
  return MetricFManifold(A.name() + " x " + B.name(), chart, std::move(f), std::move(xi), std::move(eta),
                         std::move(g));
}

const std::vector<GalleryInfo>& gallery_catalog() {
  static const std::vector<GalleryInfo> catalog = {
      {"euclidean_C", "euclidean_C(n=1, s=1)", "flat R^{2n+s}, constant f; C-manifold"},
      {"standard_S", "standard_S(n=1, s=1)", "standard S-structure on R^{2n+s}; alpha=1, beta=0"},
      {"kenmotsu", "kenmotsu(n=1)", "R x_{e^t} C^n; alpha=0, beta=1"},
      {"kaehler_times_S", "kaehler_times_S", "flat C^1 x standard_S(1,1); K-manifold, not almost trans-S"},
      {"deformed_S", "deformed_S(a=2, b=4)", "deformation of standard_S(1,1); alpha=a/b, beta=0"},
      {"deformed_C", "deformed_C(a=2+sin(t1), b=exp(t1))", "deformation of euclidean_C(1,1); alpha=0, beta=1/(2a)"},
      {"deformed_kenmotsu", "deformed_kenmotsu(a=exp(2*t1), b=exp(2*t1))",
       "deformation of kenmotsu(1); alpha=0, beta=2e^{-2t}"},
      {"trans_sasakian_3d", "trans_sasakian_3d", "3-dimensional trans-Sasakian; alpha=e^{-z^2}, beta=z"},
      {"warped_kaehler", "warped_kaehler(h=1+t1^2+t2^2/2)", "R^2 x_h C^1; alpha=0, beta_i=(dh/dt_i)/h"},
      {"warped_nonkaehler", "warped_nonkaehler(h=exp(t1))", "R x_h (non-Kaehler R^4); not almost trans-S"},
      {"warped_almost", "warped_almost(fiber=standard_S, h=1+t1^2)",
       "R x_h fiber; almost trans-S, not normal for non-constant h"},
      {"warped_product_S", "warped_product_S", "R x standard_S(1,1); alpha=(0,1), beta=(0,0)"},
      {"warped_trans_sasakian", "warped_trans_sasakian(h=1+t1^2)",
       "R x_h trans_sasakian_3d; alpha=(0,alpha/h), beta=(h'/h,beta/h)"},
      {"hermitian_flat", "hermitian_flat(n=1)", "flat Kaehler fiber C^n (s=0)"},
      {"hermitian_rotated", "hermitian_rotated", "non-Kaehler almost Hermitian fiber on R^4 (s=0)"},
  };
  return catalog;
}

// "key=value" arguments are accepted in signature order; the key must match.
std::vector<std::string> positional(const std::string& name, std::vector<std::string> args) {
  const auto& catalog = gallery_catalog();
  const auto it = std::find_if(catalog.begin(), catalog.end(), [&](const GalleryInfo& g) { return g.name == name; });
  if (it == catalog.end()) return args;
  const auto params = split_call(it->signature).second;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto eq = args[i].find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(args[i].substr(0, eq));
    const std::string expected = i < params.size() ? trim(params[i].substr(0, params[i].find('='))) : "";
    if (key != expected) throw std::invalid_argument(name + ": argument " + std::to_string(i + 1) + " is '" + expected + "', not '" + key + "'");
    args[i] = trim(args[i].substr(eq + 1));
  }
  return args;
}

MetricFManifold gallery(std::string_view spec) {
  const auto [name, raw_args] = split_call(spec);
  const std::vector<std::string> args = positional(name, raw_args);
  auto arg = [&, &args = args](std::size_t i, const std::string& fallback) {
    return i < args.size() && !args[i].empty() ? args[i] : fallback;
  };
  auto expect_at_most = [&, &args = args, &name = name](std::size_t count) {
    if (args.size() > count) throw std::invalid_argument(name + " takes at most " + std::to_string(count) + " arguments");
  };

  if (name == "euclidean_C") {
    expect_at_most(2);
    return euclidean_c(to_int(arg(0, "1"), "n"), to_int(arg(1, "1"), "s"));
  }
  if (name == "standard_S") {
    expect_at_most(2);
    return standard_s(to_int(arg(0, "1"), "n"), to_int(arg(1, "1"), "s"));
  }
  if (name == "kenmotsu") {
    expect_at_most(1);
    return kenmotsu(to_int(arg(0, "1"), "n"));
  }
  if (name == "hermitian_flat") {
    expect_at_most(1);
    return hermitian_flat(to_int(arg(0, "1"), "n"));
  }
  if (name == "hermitian_rotated") {
    expect_at_most(0);
    return hermitian_rotated();
  }
  if (name == "trans_sasakian_3d") {
    expect_at_most(0);
    return trans_sasakian_3d();
  }
  if (name == "kaehler_times_S") {
    expect_at_most(0);
    Builder u(1, 0, {"u", "v"});
    u.metric(0, 0, Expr(1.0));
    u.metric(1, 1, Expr(1.0));
    u.f("v", "u", Expr(1.0));
    u.f("u", "v", Expr(-1.0));
    MetricFManifold M = hermitian_product(u.build("C^1"), standard_s(1, 1));
    M.set_name("kaehler_times_S");
    return M;
  }
  if (name == "deformed_S") {
    expect_at_most(2);
    const std::string a = arg(0, "2"), b = arg(1, "4");
    MetricFManifold M = deformed(standard_s(1, 1), a, b, "deformed_S(" + a + "," + b + ")");
    const Expr ea = M.chart().parse(a), eb = M.chart().parse(b);
    if (ea.is_constant() && eb.is_constant()) M.set_declared({{ea / eb}, {Expr()}});
    return M;
  }
  if (name == "deformed_C") {
    expect_at_most(2);
    const std::string a = arg(0, "2+sin(t1)"), b = arg(1, "exp(t1)");
    MetricFManifold M = deformed(euclidean_c(1, 1), a, b, "deformed_C(" + a + "," + b + ")");
    if (args.empty()) M.set_declared({{Expr()}, {M.chart().parse("1/(2*(2+sin(t1)))")}});
    return M;
  }
  if (name == "deformed_kenmotsu") {
    expect_at_most(2);
    const std::string a = arg(0, "exp(2*t1)"), b = arg(1, "exp(2*t1)");
    MetricFManifold M = deformed(kenmotsu(1), a, b, "deformed_kenmotsu(" + a + "," + b + ")");
    if (args.empty()) M.set_declared({{Expr()}, {M.chart().parse("2*exp(-2*t1)")}});
    return M;
  }
  if (name == "warped_kaehler") {
    expect_at_most(1);
    WarpParams w{2, arg(0, "1+t1^2+t2^2/2"), {}, {}};
    MetricFManifold M = warp_kaehler(hermitian_flat(1), w);
    M.set_name("warped_kaehler(" + w.h + ")");
    return M;
  }
  if (name == "warped_nonkaehler") {
    expect_at_most(1);
    WarpParams w{1, arg(0, "exp(t1)"), {}, {}};
    MetricFManifold M = warp_kaehler(hermitian_rotated(), w);
    M.set_name("warped_nonkaehler(" + w.h + ")");
    return M;
  }
  if (name == "warped_almost") {
    expect_at_most(2);
    const MetricFManifold fiber = gallery(arg(0, "standard_S"));
    WarpParams w{1, arg(1, "1+t1^2"), {}, {}};
    MetricFManifold M = fiber.s() == 0 ? warp_kaehler(fiber, w) : warp_trans_s(fiber, w);
    M.set_name("warped_almost(" + fiber.name() + "," + w.h + ")");
    return M;
  }
  if (name == "warped_product_S") {
    expect_at_most(0);
    MetricFManifold M = warp_trans_s(standard_s(1, 1), WarpParams{1, "1", {}, {}});
    M.set_name("warped_product_S");
    M.set_declared({{Expr(), Expr(1.0)}, {Expr(), Expr()}});
    return M;
  }
  if (name == "warped_trans_sasakian") {
    expect_at_most(1);
    WarpParams w{1, arg(0, "1+t1^2"), {}, {}};
    MetricFManifold M = warp_trans_s(trans_sasakian_3d(), w);
    M.set_name("warped_trans_sasakian(" + w.h + ")");
    if (args.empty()) {
      const Chart& c = M.chart();
      M.set_declared({{Expr(), c.parse("exp(-z^2)/(1+t1^2)")}, {c.parse("2*t1/(1+t1^2)"), c.parse("z/(1+t1^2)")}});
    }
    return M;
  }
  throw std::invalid_argument("unknown gallery manifold '" + name + "'");
}

}  // namespace fman
