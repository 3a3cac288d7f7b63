#include "minty/report.hpp"

#include <array>
#include <cmath>

namespace minty {

namespace {

constexpr std::array<std::pair<Inequality, const char*>, 22> kInequalityNames{{
    {Inequality::firm_sum_of_squares, "firm_sum_of_squares"},
    {Inequality::firm_complement, "firm_complement"},
    {Inequality::firm_reflection, "firm_reflection"},
    {Inequality::firm_inner_product, "firm_inner_product"},
    {Inequality::firm_cross_term, "firm_cross_term"},
    {Inequality::lipschitz_bound, "lipschitz_bound"},
    {Inequality::strict_nonexpansive, "strict_nonexpansive"},
    {Inequality::injective, "injective"},
    {Inequality::strict_firm, "strict_firm"},
    {Inequality::cyclic_firm, "cyclic_firm"},
    {Inequality::banach_graph, "banach_graph"},
    {Inequality::strong_monotone, "strong_monotone"},
    {Inequality::cocoercive, "cocoercive"},
    {Inequality::paramonotone_cross, "paramonotone_cross"},
    {Inequality::reflected_graph, "reflected_graph"},
    {Inequality::reflected_firm, "reflected_firm"},
    {Inequality::reflected_lipschitz, "reflected_lipschitz"},
    {Inequality::linearity, "linearity"},
    {Inequality::affinity, "affinity"},
    {Inequality::isometry, "isometry"},
    {Inequality::idempotent, "idempotent"},
    {Inequality::strong_mono_reflected, "strong_mono_reflected"},
}};

double param(const Params& p, const char* name) {
  const auto it = p.find(name);
  if (it == p.end()) throw InvalidArgument(std::string("inequality parameter missing: ") + name);
  return it->second;
}

void require_points(std::span<const Vector> pts, std::size_t n, Inequality id) {
  if (pts.size() != n) {
    throw InvalidArgument("inequality " + to_string(id) + " expects " + std::to_string(n) +
                          " points, got " + std::to_string(pts.size()));
  }
}

const Map& require_map(const Map* t, Inequality id) {
  if (!t) throw InvalidArgument("inequality " + to_string(id) + " needs a map");
  return *t;
}

/// Margin for inequalities quadratic in the pair difference.
double quad_margin(double sq, double factor = 1.0) { return factor * tol::verdict * (1.0 + sq); }

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds_on_samples: return "holds_on_samples";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: break;
  }
  return "inconclusive";
}

Verdict parse_verdict(const std::string& s) {
  if (s == "holds_on_samples" || s == "holds") return Verdict::holds_on_samples;
  if (s == "violated") return Verdict::violated;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw InvalidArgument("unknown verdict '" + s + "'");
}

std::string to_string(Inequality i) {
  for (const auto& [k, name] : kInequalityNames)
    if (k == i) return name;
  return "?";
}

Inequality parse_inequality(const std::string& s) {
  for (const auto& [k, name] : kInequalityNames)
    if (s == name) return k;
  throw InvalidArgument("unknown inequality '" + s + "'");
}

InequalityValue evaluate_inequality(Inequality id, std::span<const Vector> pts, const Map* t,
                                    const Params& params) {
  switch (id) {
    case Inequality::firm_sum_of_squares:
    case Inequality::firm_complement:
    case Inequality::firm_reflection:
    case Inequality::firm_inner_product:
    case Inequality::firm_cross_term:
    case Inequality::lipschitz_bound:
    case Inequality::strict_nonexpansive:
    case Inequality::injective:
    case Inequality::strict_firm:
    case Inequality::reflected_firm:
    case Inequality::reflected_lipschitz:
    case Inequality::isometry:
    case Inequality::strong_mono_reflected: {
      require_points(pts, 2, id);
      const Map& T = require_map(t, id);
      const Vector d = pts[0] - pts[1];
      const Vector td = T(pts[0]) - T(pts[1]);
      const Vector sd = d - td;  // (I-T)x - (I-T)y
      const double dd = d.squaredNorm();
      switch (id) {
        case Inequality::firm_sum_of_squares:
          return {td.squaredNorm() + sd.squaredNorm(), dd, quad_margin(dd, 2.0)};
        case Inequality::firm_complement: {
          // Evaluate through S = I - T literally: S d and (I - S) d.
          const Vector s = (pts[0] - T(pts[0])) - (pts[1] - T(pts[1]));
          const Vector is = d - s;
          return {s.squaredNorm() + is.squaredNorm(), dd, quad_margin(dd, 2.0)};
        }
        case Inequality::firm_reflection: {
          const Vector nd = (2.0 * T(pts[0]) - pts[0]) - (2.0 * T(pts[1]) - pts[1]);
          return {nd.squaredNorm(), dd, quad_margin(dd, 4.0)};
        }
        case Inequality::firm_inner_product:
          return {td.squaredNorm(), d.dot(td), quad_margin(dd)};
        case Inequality::firm_cross_term:
          return {0.0, td.dot(sd), quad_margin(dd)};
        case Inequality::lipschitz_bound: {
          const double l = param(params, "L");
          return {td.squaredNorm(), l * l * dd, quad_margin(dd)};
        }
        case Inequality::strict_nonexpansive:
          return {td.squaredNorm(), dd, -quad_margin(dd)};
        case Inequality::injective:
          return {0.0, td.squaredNorm(), -quad_margin(dd)};
        case Inequality::strict_firm:
          return {td.squaredNorm(), d.dot(td), -quad_margin(dd)};
        case Inequality::reflected_firm: {
          const double b = param(params, "beta");
          return {(1.0 - b * b) * dd, 4.0 * td.dot(sd), quad_margin(dd, 4.0)};
        }
        case Inequality::reflected_lipschitz: {
          const double b = param(params, "beta");
          const Vector nd = 2.0 * td - d;
          return {nd.squaredNorm(), b * b * dd, quad_margin(dd, 4.0)};
        }
        case Inequality::isometry: {
          const double dn = std::sqrt(dd);
          return {std::abs(td.norm() - dn), 0.0, tol::verdict * (1.0 + dn)};
        }
        case Inequality::strong_mono_reflected: {
          const double eps = param(params, "epsilon");
          const Vector nd = 2.0 * td - d;
          const Vector md = eps * d + (1.0 + eps) * nd;
          return {md.squaredNorm(), dd, quad_margin(dd, (1.0 + 2.0 * eps) * (1.0 + 2.0 * eps))};
        }
        default: break;
      }
      break;
    }
    case Inequality::banach_graph:
    case Inequality::strong_monotone:
    case Inequality::cocoercive:
    case Inequality::reflected_graph: {
      require_points(pts, 4, id);
      const Vector dx = pts[0] - pts[2];
      const Vector du = pts[1] - pts[3];
      const double xx = dx.squaredNorm();
      const double uu = du.squaredNorm();
      const double xu = dx.dot(du);
      const double m = tol::verdict * (1.0 + xx + uu);
      switch (id) {
        case Inequality::banach_graph: {
          const double b = param(params, "beta");
          return {(1.0 - b * b) / (b * b) * xx, 2.0 * xu + uu, m / (b * b)};
        }
        case Inequality::strong_monotone:
          return {param(params, "epsilon") * xx, xu, m};
        case Inequality::cocoercive:
          return {param(params, "gamma") * uu, xu, m};
        case Inequality::reflected_graph: {
          const double b = param(params, "beta");
          // Margin in terms of the Minty preimage difference dx + du, matching
          // reflected_firm and reflected_lipschitz.
          return {(1.0 - b * b) * (xx + uu), 2.0 * (1.0 + b * b) * xu,
                  quad_margin((dx + du).squaredNorm(), 4.0)};
        }
        default: break;
      }
      break;
    }
    case Inequality::paramonotone_cross: {
      require_points(pts, 4, id);
      const Map& T = require_map(t, id);
      const Vector& x = pts[0];
      const Vector& u = pts[1];
      const Vector& y = pts[2];
      const Vector& v = pts[3];
      const double ex = (T(x + v) - x).norm() / (1.0 + x.norm());
      const double ey = (T(y + u) - y).norm() / (1.0 + y.norm());
      // A pair admitted with <x-y,u-v> = d > 0 can legitimately miss the graph
      // by O(sqrt(d |u-v|)), e.g. nearby boundary points of a ball.
      const double slack = std::sqrt(2.0 * std::abs((x - y).dot(u - v)) * (1.0 + u.norm() + v.norm()));
      return {std::max(ex, ey), 0.0, 1e-6 + slack};
    }
    case Inequality::cyclic_firm: {
      if (pts.size() < 2) throw InvalidArgument("cyclic_firm needs at least two points");
      const Map& T = require_map(t, id);
      std::vector<Vector> tx;
      tx.reserve(pts.size());
      for (const auto& p : pts) tx.push_back(T(p));
      double sum = 0.0;
      double spread = 0.0;
      const std::size_t n = pts.size();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        sum += (pts[i] - tx[i]).dot(tx[i] - tx[j]);
        spread += (pts[i] - pts[j]).squaredNorm();
      }
      return {0.0, sum, tol::verdict * (1.0 + spread)};
    }
    case Inequality::linearity: {
      require_points(pts, 2, id);
      const Map& T = require_map(t, id);
      const double a = param(params, "alpha");
      const double b = param(params, "beta");
      const Vector tx = T(pts[0]);
      const Vector ty = T(pts[1]);
      const Vector tc = T(a * pts[0] + b * pts[1]);
      const double scale = 1.0 + std::abs(a) * tx.norm() + std::abs(b) * ty.norm() + tc.norm();
      return {(tc - a * tx - b * ty).norm(), 0.0, tol::verdict * scale};
    }
    case Inequality::affinity: {
      require_points(pts, 2, id);
      const Map& T = require_map(t, id);
      const double l = param(params, "lambda");
      const Vector tx = T(pts[0]);
      const Vector ty = T(pts[1]);
      const Vector tc = T(l * pts[0] + (1.0 - l) * pts[1]);
      const double scale = 1.0 + std::abs(l) * tx.norm() + std::abs(1.0 - l) * ty.norm() + tc.norm();
      return {(tc - l * tx - (1.0 - l) * ty).norm(), 0.0, tol::verdict * scale};
    }
    case Inequality::idempotent: {
      require_points(pts, 1, id);
      const Map& T = require_map(t, id);
      const Vector tx = T(pts[0]);
      return {(T(tx) - tx).norm(), 0.0, tol::verdict * (1.0 + tx.norm())};
    }
  }
  throw InvalidArgument("unhandled inequality " + to_string(id));
}

Witness make_witness(Inequality id, std::vector<Vector> points, const Map* t, Params params) {
  const auto v = evaluate_inequality(id, points, t, params);
  return {id, std::move(points), std::move(params), v.lhs, v.rhs, v.margin};
}

bool replays(const Witness& w, const Map* t) {
  const auto v = evaluate_inequality(w.inequality, w.points, t, w.params);
  return v.violated();
}

}  // namespace minty
