#include "fracadi/bench_harness.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fracadi/diagnostics.hpp"
#include "fracadi/errors.hpp"
#include "fracadi/frac_ops.hpp"

namespace fracadi {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '-') c = '_';
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// s^2 (2 - s)^2 and the pieces of the p2d / p3d forcing along one axis.
double bump2(double s) { return s * s * (2 - s) * (2 - s); }

// d1 * left + d2 * right derivative of s^2 (2-s)^2 with d1 = Gamma(3-mu) s^mu,
// d2 = Gamma(3-mu) (2-s)^mu.
double bump2_diffusion(double s, double mu) {
  const double r = 2 - s;
  return 8 * (s * s + r * r) - 24 * (s * s * s + r * r * r) / (3 - mu) +
         24 * (s * s * s * s + r * r * r * r) / ((3 - mu) * (4 - mu));
}

// (s / 4) * d/ds [s^2 (2-s)^2]
double bump2_advection(double s) { return 2 * s * s - 3 * s * s * s + s * s * s * s; }

double p1d_spatial(double x, double a) {
  const double r = 1 - x;
  const double rl = 2.0 / std::tgamma(3 - a) * (std::pow(x, 2 - a) + std::pow(r, 2 - a)) -
                    2 * 6.0 / std::tgamma(4 - a) * (std::pow(x, 3 - a) + std::pow(r, 3 - a)) +
                    24.0 / std::tgamma(5 - a) * (std::pow(x, 4 - a) + std::pow(r, 4 - a));
  return -(x * x * r * r + (4 * x * x * x - 6 * x * x + 2 * x) + rl);
}

double p2d_spatial(double x, double y, double a, double b) {
  auto bracket = [](double s, double mu) {
    const double r = 2 - s;
    return s * s + r * r - 3 * (s * s * s + r * r * r) / (3 - mu) +
           3 * (s * s * s * s + r * r * r * r) / ((3 - mu) * (4 - mu));
  };
  return -4 * x * x * y * y * (x - 2) * (y - 2) * (3 * x * y - 5 * x - 5 * y + 8) -
         32 * bump2(y) * bracket(x, a) - 32 * bump2(x) * bracket(y, b);
}

// Riesz derivative of the sine profile: left RL derivative at x plus its
// mirror (the profile is symmetric about 1/2). Memoized per abscissa.
class RieszDerivative {
 public:
  explicit RieszDerivative(double mu) : mu_(mu) {}

  double operator()(double x) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = memo_.find(x); it != memo_.end()) return it->second;
    }
    const double v = left_rl_derivative(riesz_profile_d2, x, mu_) +
                     left_rl_derivative(riesz_profile_d2, 1 - x, mu_);
    std::lock_guard lock(mutex_);
    memo_.emplace(x, v);
    return v;
  }

 private:
  double mu_;
  std::mutex mutex_;
  std::unordered_map<double, double> memo_;
};

AxisSpec variable_axis(double lo, double hi, int n, double mu) {
  const double gm = std::tgamma(3 - mu);
  return AxisSpec(
      lo, hi, n, FracOrder(mu), [gm, mu](double s) { return gm * std::pow(s, mu); },
      [gm, mu, hi](double s) { return gm * std::pow(hi - s, mu); },
      [](double s) { return s / 4; });
}

double exp_neg(double t) { return std::exp(-t); }

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double num = 0.0;
  const auto slash = text.find('/');
  auto one = [&](std::string_view part) {
    part = trim(part);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty())
      throw ConfigError("invalid number for '" + std::string(key) + "': '" + std::string(text) + "'");
    return v;
  };
  if (slash == std::string_view::npos) {
    num = one(text);
  } else {
    const double den = one(text.substr(slash + 1));
    if (den == 0.0) throw ConfigError("zero denominator for '" + std::string(key) + "'");
    num = one(text.substr(0, slash)) / den;
  }
  if (!std::isfinite(num)) throw ConfigError("non-finite value for '" + std::string(key) + "'");
  return num;
}

int parse_int(std::string_view key, std::string_view text) {
  text = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(text) + "'");
  return v;
}

template <class F>
auto parse_list(std::string_view key, std::string_view text, F parse_one) {
  std::vector<decltype(parse_one(key, text))> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start));
    if (!item.empty()) out.push_back(parse_one(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty list for '" + std::string(key) + "'");
  return out;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string general(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows, TableFormat format) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    if (format == TableFormat::Csv) {
      for (std::size_t c = 0; c < cells.size(); ++c) os << (c ? "," : "") << cells[c];
    } else {
      os << '|';
      for (const auto& cell : cells) os << ' ' << cell << " |";
    }
    os << '\n';
  };
  line(header);
  if (format == TableFormat::Markdown) {
    os << '|';
    for (std::size_t c = 0; c < header.size(); ++c) os << " --- |";
    os << '\n';
  }
  for (const auto& r : rows) line(r);
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Catalog

std::string to_string(CatalogId id) {
  switch (id) {
    case CatalogId::P1d: return "p1d";
    case CatalogId::P2d: return "p2d";
    case CatalogId::P3d: return "p3d";
    case CatalogId::Riesz2d: return "riesz2d";
  }
  return "?";
}

CatalogId parse_catalog(std::string_view name) {
  const std::string n = lower(trim(name));
  if (n == "p1d") return CatalogId::P1d;
  if (n == "p2d") return CatalogId::P2d;
  if (n == "p3d") return CatalogId::P3d;
  if (n == "riesz2d") return CatalogId::Riesz2d;
  throw ConfigError("unknown problem '" + std::string(name) + "'");
}

const CatalogEntry& catalog_entry(CatalogId id) {
  static const std::array<CatalogEntry, 4> entries{{
      {CatalogId::P1d, 1, 0.0, 1.0, 1.0},
      {CatalogId::P2d, 2, 0.0, 2.0, 2.0},
      {CatalogId::P3d, 3, 0.0, 2.0, 2.0},
      {CatalogId::Riesz2d, 2, 0.0, 1.0, 1.0},
  }};
  return entries.at(static_cast<std::size_t>(id));
}

Problem make_problem(CatalogId id, const CatalogParams& params, int n, int n_steps,
                     std::optional<double> t_end) {
  const CatalogEntry& e = catalog_entry(id);
  const double a = params.alpha, b = params.beta, c = params.gamma;
  Problem p{.axes = {},
            .time = TimeSpec(t_end.value_or(e.t_end), n_steps),
            .forcing = {},
            .initial = {},
            .exact = std::nullopt,
            .separable_forcing = std::nullopt};
  SpaceFn spatial;
  SpaceFn profile;

  switch (id) {
    case CatalogId::P1d:
      p.axes.emplace_back(0.0, 1.0, n, FracOrder(a), constant(1), constant(1), constant(1));
      profile = [](const Point& x) { return x[0] * x[0] * (1 - x[0]) * (1 - x[0]); };
      spatial = [a](const Point& x) { return p1d_spatial(x[0], a); };
      break;
    case CatalogId::P2d:
      p.axes.push_back(variable_axis(0, 2, n, a));
      p.axes.push_back(variable_axis(0, 2, n, b));
      profile = [](const Point& x) { return 4 * bump2(x[0]) * bump2(x[1]); };
      spatial = [a, b](const Point& x) { return p2d_spatial(x[0], x[1], a, b); };
      break;
    case CatalogId::P3d:
      p.axes.push_back(variable_axis(0, 2, n, a));
      p.axes.push_back(variable_axis(0, 2, n, b));
      p.axes.push_back(variable_axis(0, 2, n, c));
      profile = [](const Point& x) { return 4 * bump2(x[0]) * bump2(x[1]) * bump2(x[2]); };
      spatial = build_forcing_3d(a, b, c);
      break;
    case CatalogId::Riesz2d: {
      p.axes.emplace_back(0.0, 1.0, n, FracOrder(a), constant(1), constant(1), constant(0));
      p.axes.emplace_back(0.0, 1.0, n, FracOrder(b), constant(1), constant(1), constant(0));
      profile = [](const Point& x) { return riesz_profile(x[0]) * riesz_profile(x[1]); };
      auto rx = std::make_shared<RieszDerivative>(a);
      auto ry = a == b ? rx : std::make_shared<RieszDerivative>(b);
      spatial = [rx, ry](const Point& x) {
        const double px = riesz_profile(x[0]), py = riesz_profile(x[1]);
        return -(px * py + (*rx)(x[0]) * py + px * (*ry)(x[1]));
      };
      break;
    }
  }

  p.initial = profile;
  p.exact = [profile](const Point& x, double t) { return std::exp(-t) * profile(x); };
  p.forcing = [spatial](const Point& x, double t) { return std::exp(-t) * spatial(x); };
  p.separable_forcing = SeparableForcing{spatial, exp_neg};
  return p;
}

Problem make_constant_problem(int dims, double mu, int n, int n_steps, double t_end, double d1,
                              double d2, double kappa) {
  if (dims < 1 || dims > 3) throw DimensionError("make_constant_problem: dims must be 1, 2 or 3");
  Problem p{.axes = {},
            .time = TimeSpec(t_end, n_steps),
            .forcing = [](const Point&, double) { return 0.0; },
            .initial = [dims](const Point& x) {
              double v = 1.0;
              for (int d = 0; d < dims; ++d) v *= 16 * x[d] * x[d] * (1 - x[d]) * (1 - x[d]);
              return v;
            },
            .exact = std::nullopt,
            .separable_forcing = std::nullopt};
  for (int d = 0; d < dims; ++d)
    p.axes.emplace_back(0.0, 1.0, n, FracOrder(mu), constant(d1), constant(d2), constant(kappa));
  return p;
}

// ---------------------------------------------------------------------------
// Forcing

double riesz_profile(double s) {
  return std::sin(std::pow(2 * s, 4)) * std::sin(std::pow(2 - 2 * s, 4));
}

double riesz_profile_d2(double s) {
  const double a = std::pow(2 * s, 4), b = std::pow(2 - 2 * s, 4);
  const double a1 = 64 * s * s * s, a2 = 192 * s * s;
  const double r = 2 - 2 * s;
  const double b1 = -8 * r * r * r, b2 = 48 * r * r;
  const double sa = std::sin(a), ca = std::cos(a), sb = std::sin(b), cb = std::cos(b);
  const double f = sa, f1 = ca * a1, f2 = -sa * a1 * a1 + ca * a2;
  const double g = sb, g1 = cb * b1, g2 = -sb * b1 * b1 + cb * b2;
  return f2 * g + 2 * f1 * g1 + f * g2;
}

double left_rl_derivative(const std::function<double(double)>& second_derivative, double x,
                          double mu) {
  if (!(mu > 1.0 && mu < 2.0)) throw Error("left_rl_derivative: order must lie in (1, 2)");
  if (x <= 0.0) return 0.0;
  using Gauss = boost::math::quadrature::gauss<double, 30>;
  const double p = 2.0 - mu;
  const double s0 = std::min(x, 1e-2);

  // int_0^s0 s^(1-mu) f''(x-s) ds = (1/p) int_0^(s0^p) f''(x - w^(1/p)) dw
  const double w_end = std::pow(s0, p);
  constexpr int kNearPanels = 20;
  double total = 0.0;
  for (int k = 0; k < kNearPanels; ++k) {
    const double lo = w_end * k / kNearPanels, hi = w_end * (k + 1) / kNearPanels;
    total += Gauss::integrate(
        [&](double w) { return second_derivative(x - std::pow(w, 1.0 / p)); }, lo, hi);
  }
  total /= p;

  if (x > s0) {
    const int panels = static_cast<int>(std::ceil((x - s0) * 400));
    const double width = (x - s0) / panels;
    for (int k = 0; k < panels; ++k) {
      const double lo = s0 + k * width, hi = lo + width;
      total += Gauss::integrate(
          [&](double s) { return std::pow(s, 1 - mu) * second_derivative(x - s); }, lo, hi);
    }
  }
  return total / std::tgamma(2 - mu);
}

SpaceFn build_forcing_3d(double alpha, double beta, double gamma) {
  for (double m : {alpha, beta, gamma}) FracOrder{m};
  return [alpha, beta, gamma](const Point& x) {
    const double px = bump2(x[0]), py = bump2(x[1]), pz = bump2(x[2]);
    const double lx = bump2_diffusion(x[0], alpha) + bump2_advection(x[0]);
    const double ly = bump2_diffusion(x[1], beta) + bump2_advection(x[1]);
    const double lz = bump2_diffusion(x[2], gamma) + bump2_advection(x[2]);
    return -4 * (px * py * pz + lx * py * pz + px * ly * pz + px * py * lz);
  };
}

namespace {

// Contribution of axis `ax` to L u at coarse interior nodes, using lines
// refined by m.
Field axis_operator_at_nodes(const SpaceTimeFn& exact, const std::vector<AxisSpec>& axes,
                             int ax, int m, double t) {
  std::vector<int> extents;
  for (const auto& a : axes) extents.push_back(a.interior());
  Field out(extents);

  const AxisSpec fine = axes[ax].with_nodes(axes[ax].n() * m);
  const int nf = fine.n();
  const double h = fine.step();
  const FracCoeffs c = frac_coeffs(fine.order(), static_cast<std::size_t>(nf) + 2);
  const double scale = frac_scale(fine.order(), h);
  std::vector<double> line(nf + 1);

  // Iterate over coarse lines along `ax`: fix the other indices.
  const std::size_t total = out.size();
  const int len = extents[ax];
  std::size_t stride = 1;
  for (int d = 0; d < ax; ++d) stride *= extents[d];
  for (std::size_t k = 0; k < total; ++k) {
    if ((k / stride) % len != 0) continue;  // visit each line once, at its first node
    Point base = interior_point(axes, out, k);
    for (int i = 0; i <= nf; ++i) {
      Point pt = base;
      pt[ax] = fine.node(i);
      line[i] = exact(pt, t);
    }
    for (int j = 0; j < len; ++j) {
      const int kk = (j + 1) * m;  // fine node index of coarse node j
      const double x = fine.node(kk);
      double left = 0.0, right = 0.0;
      for (int l = 0; l <= kk + 1 && kk - l + 1 <= nf; ++l) left += c.g[l] * line[kk - l + 1];
      for (int l = 0; kk + l - 1 <= nf; ++l)
        if (kk + l - 1 >= 0) right += c.g[l] * line[kk + l - 1];
      out.values()[k + j * stride] = scale * (fine.d1(x) * left + fine.d2(x) * right) +
                                     fine.kappa(x) * (line[kk + 1] - line[kk - 1]) / (2 * h);
    }
  }
  return out;
}

// Removes an error term c h^p from values at spacings h and h/2.
Field extrapolate(const Field& coarse, const Field& fine, double p) {
  const double w = std::pow(2.0, p);
  return (1.0 / (w - 1.0)) * (w * fine - coarse);
}

Field time_derivative(const SpaceTimeFn& exact, const std::vector<AxisSpec>& axes,
                      const Field& shape, double t) {
  constexpr double dt = 1e-3;
  Field out(shape.extents());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Point p = interior_point(axes, out, k);
    out.values()[k] = (-exact(p, t + 2 * dt) + 8 * exact(p, t + dt) - 8 * exact(p, t - dt) +
                       exact(p, t - 2 * dt)) /
                      (12 * dt);
  }
  return out;
}

}  // namespace

OracleResult forcing_oracle(const SpaceTimeFn& exact, const std::vector<AxisSpec>& axes, int r,
                            double t, double tolerance) {
  if (r != 4 && r != 8 && r != 16) throw Error("forcing_oracle: refinement must be 4, 8 or 16");
  if (axes.empty() || axes.size() > 3) throw DimensionError("forcing_oracle: 1 to 3 axes");
  // Per axis: the h^2 term, then the h^(4-mu) term left by the zero
  // extension at the boundary. Two independent estimates from
  // (r, 2r, 4r) and (2r, 4r, 8r).
  Field first, second;
  for (int ax = 0; ax < static_cast<int>(axes.size()); ++ax) {
    std::vector<Field> lv;
    for (int m : {r, 2 * r, 4 * r, 8 * r}) lv.push_back(axis_operator_at_nodes(exact, axes, ax, m, t));
    std::vector<Field> a;
    for (int k = 0; k < 3; ++k) a.push_back(extrapolate(lv[k], lv[k + 1], 2.0));
    const double p = 4.0 - axes[ax].order().value();
    Field b1 = extrapolate(a[0], a[1], p), b2 = extrapolate(a[1], a[2], p);
    if (ax == 0) {
      first = std::move(b1);
      second = std::move(b2);
    } else {
      first += b1;
      second += b2;
    }
  }
  const double gap = max_error(first, second);
  if (!(gap <= tolerance)) {
    std::ostringstream msg;
    msg << "forcing_oracle: Richardson discrepancy " << gap << " exceeds tolerance " << tolerance
        << " at r = " << r;
    throw Error(msg.str());
  }
  OracleResult res;
  res.values = time_derivative(exact, axes, second, t) - second;
  res.discrepancy = gap;
  return res;
}

// ---------------------------------------------------------------------------
// Configuration

std::string to_string(TableFormat f) { return f == TableFormat::Csv ? "csv" : "markdown"; }

TableFormat parse_format(std::string_view name) {
  const std::string n = lower(trim(name));
  if (n == "csv") return TableFormat::Csv;
  if (n == "markdown" || n == "md") return TableFormat::Markdown;
  throw ConfigError("unknown format '" + std::string(name) + "'");
}

std::string RunConfig::label() const {
  if (!name.empty()) return name;
  std::ostringstream os;
  os << "alpha=" << alpha;
  const int dims = catalog_entry(problem).dims;
  if (dims > 1) os << " beta=" << beta;
  if (dims > 2) os << " gamma=" << gamma;
  return os.str();
}

void apply_setting(RunConfig& cfg, std::string_view key_in, std::string_view value) {
  const std::string key = lower(trim(key_in));
  value = trim(value);
  if (key == "problem") cfg.problem = parse_catalog(value);
  else if (key == "alpha") cfg.alpha = parse_double(key, value);
  else if (key == "beta") cfg.beta = parse_double(key, value);
  else if (key == "gamma") cfg.gamma = parse_double(key, value);
  else if (key == "scheme") cfg.scheme = parse_scheme(value);
  else if (key == "n") cfg.n = parse_int(key, value);
  else if (key == "nt_ratio") cfg.nt_ratio = parse_double(key, value);
  else if (key == "t_end") cfg.t_end = parse_double(key, value);
  else if (key == "output") cfg.output = std::string(value);
  else if (key == "format") cfg.format = parse_format(value);
  else if (key == "levels") cfg.levels = parse_list(key, value, parse_int);
  else if (key == "ratios") cfg.ratios = parse_list(key, value, parse_double);
  else if (key == "bootstrap") cfg.bootstrap = parse_bootstrap(value);
  else throw ConfigError("unknown key '" + std::string(key_in) + "'");
}

void validate_config(const RunConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("n must be at least 2");
  if (!(cfg.nt_ratio > 0)) throw ConfigError("nt_ratio must be positive");
  if (cfg.t_end && !(*cfg.t_end > 0)) throw ConfigError("t_end must be positive");
  for (int l : cfg.levels)
    if (l < 1) throw ConfigError("levels must be positive");
  for (double r : cfg.ratios)
    if (!(r > 0)) throw ConfigError("ratios must be positive");
  // Orders are validated by FracOrder; admissibility on a small grid.
  check_admissible(make_problem(cfg.problem, cfg.params(), 4, 1, cfg.t_end), cfg.scheme);
}

std::vector<RunConfig> parse_config(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> defaults;
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                         : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    auto& target = sections.empty() ? defaults : sections.back().second;
    target.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  if (sections.empty()) sections.push_back({"", {}});

  std::vector<RunConfig> out;
  for (const auto& [name, entries] : sections) {
    RunConfig cfg;
    cfg.name = name;
    for (const auto& [k, v] : defaults) apply_setting(cfg, k, v);
    for (const auto& [k, v] : entries) apply_setting(cfg, k, v);
    validate_config(cfg);
    out.push_back(std::move(cfg));
  }
  return out;
}

std::vector<RunConfig> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

int steps_for(double t_end, double dx, double ratio) {
  const double exact = t_end / (ratio * dx);
  const double rounded = std::round(exact);
  if (rounded < 1 || std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact)) {
    std::ostringstream msg;
    msg << "t_end / (nt_ratio * dx) = " << exact << " is not a positive integer";
    throw ConfigError(msg.str());
  }
  return static_cast<int>(rounded);
}

// ---------------------------------------------------------------------------
// Studies

namespace {

int intervals_for(const CatalogEntry& e, int level) {
  const double n = (e.hi - e.lo) * level;
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9) throw ConfigError("level does not divide the domain");
  return static_cast<int>(rounded);
}

double run_error(const Problem& problem, SchemeKind scheme, const RunOptions& opts) {
  const RunResult res = run(problem, scheme, opts);
  const Field exact = sample_field(problem, Sample::Exact, problem.time.t_end);
  return max_error(res.solution, exact);
}

}  // namespace

std::vector<ConvergenceRecord> run_convergence_study(const RunConfig& cfg) {
  if (cfg.levels.size() < 2) throw ConfigError("convergence study needs at least two levels");
  const CatalogEntry& e = catalog_entry(cfg.problem);
  const double t_end = cfg.t_end.value_or(e.t_end);
  RunOptions opts;
  opts.bootstrap = cfg.bootstrap.value_or(Bootstrap::DAdi);

  std::vector<ConvergenceRecord> out;
  for (std::size_t k = 0; k < cfg.levels.size(); ++k) {
    ConvergenceRecord rec;
    rec.series = cfg.label();
    rec.level = cfg.levels[k];
    rec.delta = 1.0 / rec.level;
    try {
      const int n_steps = steps_for(t_end, rec.delta, cfg.nt_ratio);
      rec.tau = t_end / n_steps;
      const Problem p =
          make_problem(cfg.problem, cfg.params(), intervals_for(e, rec.level), n_steps, t_end);
      rec.error = run_error(p, cfg.scheme, opts);
    } catch (const std::exception& ex) {
      rec.failure = ex.what();
    }
    if (k > 0) {
      const ConvergenceRecord& prev = out.back();
      if (prev.level == rec.level) {
        rec.rate = 0.0;
        if (rec.failure.empty()) rec.failure = "degenerate input: refinement must change dx";
      } else if (prev.error && rec.error && *prev.error > 0 && *rec.error > 0) {
        rec.rate = std::log(*prev.error / *rec.error) / std::log(prev.delta / rec.delta);
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

SplittingTable run_splitting_comparison(const RunConfig& cfg) {
  if (cfg.problem != CatalogId::Riesz2d)
    throw ConfigError("splitting comparison runs on riesz2d only");
  const CatalogEntry& e = catalog_entry(cfg.problem);
  const double t_end = cfg.t_end.value_or(e.t_end);
  const double dx = (e.hi - e.lo) / cfg.n;
  RunOptions opts;
  opts.bootstrap = cfg.bootstrap.value_or(Bootstrap::Exact);

  SplittingTable table;
  table.ratios = cfg.ratios.empty() ? std::vector<double>{10, 5, 2.5, 1} : cfg.ratios;
  table.schemes = {SchemeKind::DAdi, SchemeKind::DAdi2, SchemeKind::Fs2};
  table.errors.assign(table.schemes.size(), {});

  for (double ratio : table.ratios) {
    const Problem p = make_problem(cfg.problem, cfg.params(), cfg.n,
                                   steps_for(t_end, dx, ratio), t_end);
    const Field exact = sample_field(p, Sample::Exact, t_end);
    std::vector<Field> sols;
    for (std::size_t s = 0; s < table.schemes.size(); ++s) {
      sols.push_back(run(p, table.schemes[s], opts).solution);
      table.errors[s].push_back(max_error(sols.back(), exact));
    }
    table.equivalence_gap = std::max(table.equivalence_gap, max_error(sols[1], sols[2]));
  }
  if (!(table.equivalence_gap <= 1e-13)) {
    std::ostringstream msg;
    msg << "D-ADI-II and FS-II differ by " << table.equivalence_gap;
    throw Error(msg.str());
  }
  return table;
}

// ---------------------------------------------------------------------------
// Tables

std::string emit_table(const std::vector<ConvergenceRecord>& records, TableFormat format) {
  if (records.empty()) throw Error("emit_table: no records");
  std::vector<std::string> series;
  std::vector<int> levels;
  for (const auto& r : records) {
    if (std::find(series.begin(), series.end(), r.series) == series.end()) series.push_back(r.series);
    if (std::find(levels.begin(), levels.end(), r.level) == levels.end()) levels.push_back(r.level);
  }
  std::vector<std::string> header{"level", "delta", "tau"};
  if (series.size() == 1) {
    header.insert(header.end(), {"error", "rate"});
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : records)
      rows.push_back({std::to_string(r.level), general(r.delta), general(r.tau),
                      r.error ? sci(*r.error) : "", r.rate ? fixed4(*r.rate) : ""});
    return render(header, rows, format);
  }
  for (const auto& s : series) {
    header.push_back("error[" + s + "]");
    header.push_back("rate[" + s + "]");
  }
  std::vector<std::vector<std::string>> rows;
  for (int level : levels) {
    std::vector<std::string> row{std::to_string(level), general(1.0 / level), ""};
    for (const auto& s : series) {
      auto it = std::find_if(records.begin(), records.end(),
                             [&](const auto& r) { return r.series == s && r.level == level; });
      if (it == records.end()) {
        row.insert(row.end(), {"", ""});
        continue;
      }
      if (row[2].empty()) row[2] = general(it->tau);
      row.push_back(it->error ? sci(*it->error) : "");
      row.push_back(it->rate ? fixed4(*it->rate) : "");
    }
    rows.push_back(std::move(row));
  }
  return render(header, rows, format);
}

std::string emit_splitting_table(const SplittingTable& table, TableFormat format) {
  std::vector<std::string> header{"scheme"};
  for (double r : table.ratios) header.push_back("tau/dx=" + general(r));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t s = 0; s < table.schemes.size(); ++s) {
    std::vector<std::string> row{to_string(table.schemes[s])};
    for (double e : table.errors[s]) row.push_back(sci(e));
    rows.push_back(std::move(row));
  }
  return render(header, rows, format);
}

std::string emit_field(const std::vector<AxisSpec>& axes, const Field& field) {
  static const char* names[] = {"x", "y", "z"};
  std::ostringstream os;
  for (int d = 0; d < field.dims(); ++d) os << names[d] << ',';
  os << "u\n";
  char buf[40];
  for (std::size_t k = 0; k < field.size(); ++k) {
    const Point p = interior_point(axes, field, k);
    for (int d = 0; d < field.dims(); ++d) {
      std::snprintf(buf, sizeof buf, "%.17g,", p[d]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", field.values()[k]);
    os << buf;
  }
  return os.str();
}

}  // namespace fracadi
