#include "sft/path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sft/errors.hpp"

namespace sft {
namespace {

Mat rot2(double angle) {
  Mat r(2, 2);
  const double c = std::cos(angle), s = std::sin(angle);
  r << c, -s, s, c;
  return r;
}

Mat hyp2(double at) {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = std::exp(at);
  d(1, 1) = std::exp(-at);
  return d;
}

// simultaneous rotation by the same angle on every R^2 summand
Mat rot_all(int dim, double angle) {
  Mat r = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; i += 2) r.block<2, 2>(i, i) = rot2(angle);
  return r;
}

double twist_angle_rate(const Expr& e) {
  const double sgn =
      e.orient == Orientation::positive_puncture ? -1.0 : 1.0;
  return sgn * 2.0 * M_PI * e.param;
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) fail(Errc::bad_parameter, std::string(what) + " must be finite");
}

SymplecticPath make_atom(Expr::Kind kind, double param) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->param = param;
  return SymplecticPath{2, std::shared_ptr<const Expr>(e)};
}

struct ConcatPiece {
  int index;
  double local_t;
};

ConcatPiece subdivide(double t, int k) {
  int idx = std::min(static_cast<int>(t * k), k - 1);
  return {idx, t * k - idx};
}

Mat table_lookup(const SampleTable& tb, double t);
Mat table_derivative(const SampleTable& tb, double t);

Mat eval(const SymplecticPath& p, double t);

Mat eval_expr(const Expr& e, int dim, double t) {
  switch (e.kind) {
    case Expr::Kind::rotation:
      return rot2(2.0 * M_PI * e.param * t);
    case Expr::Kind::positive_hyperbolic:
      return hyp2(e.param * t);
    case Expr::Kind::negative_hyperbolic:
      return rot2(M_PI * t) * hyp2(e.param * t);
    case Expr::Kind::shear: {
      Mat a = Mat::Identity(2, 2);
      a(0, 1) = e.param * t;
      return a;
    }
    case Expr::Kind::direct_sum: {
      Mat a = Mat::Zero(dim, dim);
      int at = 0;
      for (const auto& c : e.children) {
        a.block(at, at, c.dim, c.dim) = eval(c, t);
        at += c.dim;
      }
      return a;
    }
    case Expr::Kind::concatenate: {
      const int k = static_cast<int>(e.children.size());
      const auto [idx, s] = subdivide(t, k);
      Mat prefix = Mat::Identity(dim, dim);
      for (int j = 0; j < idx; ++j) prefix = eval(e.children[j], 1.0) * prefix;
      return eval(e.children[idx], s) * prefix;
    }
    case Expr::Kind::loop_twist: {
      const auto& base = e.children[0];
      Mat inner = Mat::Identity(dim, dim);
      inner.block(2, 2, base.dim, base.dim) = eval(base, t);
      return rot_all(dim, twist_angle_rate(e) * t) * inner;
    }
    case Expr::Kind::iterate: {
      const auto [idx, s] = subdivide(t, e.count);
      const Mat end = eval(e.children[0], 1.0);
      Mat power = Mat::Identity(dim, dim);
      for (int j = 0; j < idx; ++j) power = end * power;
      return eval(e.children[0], s) * power;
    }
  }
  fail(Errc::internal_inconsistency, "unhandled expression kind");
}

Mat deriv(const SymplecticPath& p, double t);

Mat deriv_expr(const Expr& e, int dim, double t) {
  switch (e.kind) {
    case Expr::Kind::rotation: {
      const double w = 2.0 * M_PI * e.param;
      return w * standard_J(2) * rot2(w * t);
    }
    case Expr::Kind::positive_hyperbolic: {
      Mat d = Mat::Zero(2, 2);
      d(0, 0) = e.param * std::exp(e.param * t);
      d(1, 1) = -e.param * std::exp(-e.param * t);
      return d;
    }
    case Expr::Kind::negative_hyperbolic: {
      Mat d = Mat::Zero(2, 2);
      d(0, 0) = e.param * std::exp(e.param * t);
      d(1, 1) = -e.param * std::exp(-e.param * t);
      return M_PI * standard_J(2) * rot2(M_PI * t) * hyp2(e.param * t) +
             rot2(M_PI * t) * d;
    }
    case Expr::Kind::shear: {
      Mat d = Mat::Zero(2, 2);
      d(0, 1) = e.param;
      return d;
    }
    case Expr::Kind::direct_sum: {
      Mat a = Mat::Zero(dim, dim);
      int at = 0;
      for (const auto& c : e.children) {
        a.block(at, at, c.dim, c.dim) = deriv(c, t);
        at += c.dim;
      }
      return a;
    }
    case Expr::Kind::concatenate: {
      const int k = static_cast<int>(e.children.size());
      const auto [idx, s] = subdivide(t, k);
      Mat prefix = Mat::Identity(dim, dim);
      for (int j = 0; j < idx; ++j) prefix = eval(e.children[j], 1.0) * prefix;
      return k * deriv(e.children[idx], s) * prefix;
    }
    case Expr::Kind::loop_twist: {
      const auto& base = e.children[0];
      const double w = twist_angle_rate(e);
      Mat inner = Mat::Identity(dim, dim);
      inner.block(2, 2, base.dim, base.dim) = eval(base, t);
      Mat inner_dot = Mat::Zero(dim, dim);
      inner_dot.block(2, 2, base.dim, base.dim) = deriv(base, t);
      const Mat r = rot_all(dim, w * t);
      return w * standard_J(dim) * r * inner + r * inner_dot;
    }
    case Expr::Kind::iterate: {
      const auto [idx, s] = subdivide(t, e.count);
      const Mat end = eval(e.children[0], 1.0);
      Mat power = Mat::Identity(dim, dim);
      for (int j = 0; j < idx; ++j) power = end * power;
      return e.count * deriv(e.children[0], s) * power;
    }
  }
  fail(Errc::internal_inconsistency, "unhandled expression kind");
}

Mat eval(const SymplecticPath& p, double t) {
  if (const auto* e = std::get_if<std::shared_ptr<const Expr>>(&p.body))
    return eval_expr(**e, p.dim, t);
  return table_lookup(*std::get<std::shared_ptr<const SampleTable>>(p.body), t);
}

Mat deriv(const SymplecticPath& p, double t) {
  if (const auto* e = std::get_if<std::shared_ptr<const Expr>>(&p.body))
    return deriv_expr(**e, p.dim, t);
  return table_derivative(*std::get<std::shared_ptr<const SampleTable>>(p.body),
                          t);
}

// index i with times[i] <= t <= times[i+1]
int bracket(const std::vector<double>& times, double t) {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  int i = static_cast<int>(it - times.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(times.size()) - 2);
}

Mat table_lookup(const SampleTable& tb, double t) {
  const int i = bracket(tb.times, t);
  if (t <= tb.times.front()) return tb.matrices.front();
  if (t >= tb.times.back()) return tb.matrices.back();
  const double span = tb.times[i + 1] - tb.times[i];
  const double s = (t - tb.times[i]) / span;
  if (s < 1e-14) return tb.matrices[i];
  if (s > 1.0 - 1e-14) return tb.matrices[i + 1];
  const Mat& a = tb.matrices[i];
  const Mat& b = tb.matrices[i + 1];
  Mat m = (1.0 - s) * a + s * b;
  // Linear interpolation keeps the sign information crossing detection needs
  // only while the defect stays second order in the local step.
  const double step = (b - a).cwiseAbs().maxCoeff();
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  const double allowed = 10.0 * tb.tol + step * step * scale * scale;
  const double defect = symplectic_defect(m);
  if (defect > allowed) {
    std::ostringstream msg;
    msg << "interpolated sample at t=" << t << " has symplectic defect "
        << defect << " (allowed " << allowed << ")";
    fail(Errc::symplectic_violation, msg.str());
  }
  return m;
}

// central difference at each sample (one-sided at the ends), interpolated
// linearly in between
Mat table_sample_derivative(const SampleTable& tb, int i) {
  const int n = static_cast<int>(tb.times.size());
  if (i == 0)
    return (tb.matrices[1] - tb.matrices[0]) / (tb.times[1] - tb.times[0]);
  if (i == n - 1)
    return (tb.matrices[n - 1] - tb.matrices[n - 2]) /
           (tb.times[n - 1] - tb.times[n - 2]);
  return (tb.matrices[i + 1] - tb.matrices[i - 1]) /
         (tb.times[i + 1] - tb.times[i - 1]);
}

Mat table_derivative(const SampleTable& tb, double t) {
  const int i = bracket(tb.times, t);
  const double s = (t - tb.times[i]) / (tb.times[i + 1] - tb.times[i]);
  const Mat da = table_sample_derivative(tb, i);
  const Mat db = table_sample_derivative(tb, i + 1);
  return (1.0 - s) * da + s * db;
}

void collect_breakpoints(const SymplecticPath& p, double lo, double span,
                         std::vector<double>* out) {
  const auto* ep = std::get_if<std::shared_ptr<const Expr>>(&p.body);
  if (!ep) return;  // table derivatives interpolate continuously
  const Expr& e = **ep;
  switch (e.kind) {
    case Expr::Kind::direct_sum:
      for (const auto& c : e.children) collect_breakpoints(c, lo, span, out);
      return;
    case Expr::Kind::concatenate: {
      const int k = static_cast<int>(e.children.size());
      for (int i = 1; i < k; ++i) out->push_back(lo + span * i / k);
      for (int i = 0; i < k; ++i)
        collect_breakpoints(e.children[i], lo + span * i / k, span / k, out);
      return;
    }
    case Expr::Kind::iterate: {
      const int m = e.count;
      for (int j = 1; j < m; ++j) out->push_back(lo + span * j / m);
      for (int j = 0; j < m; ++j)
        collect_breakpoints(e.children[0], lo + span * j / m, span / m, out);
      return;
    }
    case Expr::Kind::loop_twist:
      collect_breakpoints(e.children[0], lo, span, out);
      return;
    default:
      return;
  }
}

}  // namespace

Mat standard_J(int dim) {
  Mat j = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; i += 2) {
    j(i, i + 1) = -1.0;
    j(i + 1, i) = 1.0;
  }
  return j;
}

double symplectic_defect(const Mat& a) {
  const Mat j = standard_J(static_cast<int>(a.rows()));
  return (a.transpose() * j * a - j).cwiseAbs().maxCoeff();
}

bool is_symplectic(const Mat& a, double tol) {
  if (a.rows() != a.cols() || a.rows() % 2 != 0 || a.rows() < 2) return false;
  if (symplectic_defect(a) > tol) return false;
  return std::abs(a.determinant() - 1.0) <= tol;
}

SymplecticPath rotation(double theta) {
  require_finite(theta, "rotation angle");
  return make_atom(Expr::Kind::rotation, theta);
}

SymplecticPath positive_hyperbolic(double a) {
  require_finite(a, "stretch");
  return make_atom(Expr::Kind::positive_hyperbolic, a);
}

SymplecticPath negative_hyperbolic(double a) {
  require_finite(a, "stretch");
  return make_atom(Expr::Kind::negative_hyperbolic, a);
}

SymplecticPath shear(double slope) {
  require_finite(slope, "shear slope");
  return make_atom(Expr::Kind::shear, slope);
}

SymplecticPath direct_sum(std::vector<SymplecticPath> parts) {
  if (parts.empty()) fail(Errc::bad_parameter, "direct_sum needs at least one path");
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::direct_sum;
  int dim = 0;
  for (const auto& p : parts) dim += p.dim;
  e->children = std::move(parts);
  return SymplecticPath{dim, std::shared_ptr<const Expr>(e)};
}

SymplecticPath concatenate(std::vector<SymplecticPath> parts) {
  if (parts.empty()) fail(Errc::bad_parameter, "concatenate needs at least one path");
  const int dim = parts.front().dim;
  for (const auto& p : parts)
    if (p.dim != dim)
      fail(Errc::bad_parameter, "concatenate requires equal dimensions");
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::concatenate;
  e->children = std::move(parts);
  return SymplecticPath{dim, std::shared_ptr<const Expr>(e)};
}

SymplecticPath twist(const SymplecticPath& base, double delta, Orientation o) {
  if (!(delta > 0.0 && delta < 1.0))
    fail(Errc::bad_parameter, "twist rate must lie strictly inside (0,1)");
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::loop_twist;
  e->param = delta;
  e->orient = o;
  e->children = {base};
  return SymplecticPath{base.dim + 2, std::shared_ptr<const Expr>(e)};
}

SymplecticPath iterate(const SymplecticPath& base, int m) {
  if (m < 1) fail(Errc::bad_parameter, "iterate multiplicity must be >= 1");
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::iterate;
  e->count = m;
  e->children = {base};
  return SymplecticPath{base.dim, std::shared_ptr<const Expr>(e)};
}

SymplecticPath sample_table(std::vector<double> times, std::vector<Mat> mats,
                            double tol) {
  if (times.size() != mats.size())
    fail(Errc::bad_parameter, "sample table needs one matrix per time");
  if (times.size() < 17)
    fail(Errc::coarse_samples, "sample table needs at least 17 samples (N >= 16)");
  if (std::abs(times.front()) > 1e-12 || std::abs(times.back() - 1.0) > 1e-12)
    fail(Errc::bad_parameter, "sample times must run from 0 to 1");
  times.front() = 0.0;
  times.back() = 1.0;
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      fail(Errc::bad_parameter, "sample times must be strictly increasing");

  const auto rows = mats.front().rows();
  if (rows < 2 || rows % 2 != 0)
    fail(Errc::bad_parameter, "sample matrices must have even dimension >= 2");
  for (size_t i = 0; i < mats.size(); ++i) {
    if (mats[i].rows() != rows || mats[i].cols() != rows)
      fail(Errc::bad_parameter, "sample matrices must share one square shape");
    if (!is_symplectic(mats[i], tol)) {
      std::ostringstream msg;
      msg << "sample " << i << " violates the symplectic invariants";
      fail(Errc::symplectic_violation, msg.str());
    }
  }
  if ((mats.front() - Mat::Identity(rows, rows)).cwiseAbs().maxCoeff() > tol)
    fail(Errc::bad_parameter, "path must start at the identity");
  for (size_t i = 1; i < mats.size(); ++i) {
    const double step = (mats[i] - mats[i - 1]).cwiseAbs().maxCoeff();
    if (step >= 0.5) {
      std::ostringstream msg;
      msg << "consecutive samples " << i - 1 << "," << i << " differ by "
          << step << " in max norm; coarse sampling is rejected";
      fail(Errc::coarse_samples, msg.str());
    }
  }

  auto tb = std::make_shared<SampleTable>();
  tb->times = std::move(times);
  tb->matrices = std::move(mats);
  tb->tol = tol;
  return SymplecticPath{static_cast<int>(rows),
                        std::shared_ptr<const SampleTable>(tb)};
}

Mat path_eval(const SymplecticPath& p, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    fail(Errc::bad_parameter, "path parameter must lie in [0,1]");
  return eval(p, t);
}

Mat path_derivative(const SymplecticPath& p, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    fail(Errc::bad_parameter, "path parameter must lie in [0,1]");
  return deriv(p, t);
}

bool is_nondegenerate(const SymplecticPath& p, double tol) {
  const Mat a = eval(p, 1.0);
  const Mat id = Mat::Identity(p.dim, p.dim);
  return std::abs((a - id).determinant()) > tol;
}

bool operator==(const SymplecticPath& a, const SymplecticPath& b) {
  if (a.dim != b.dim) return false;
  const auto* ea = std::get_if<std::shared_ptr<const Expr>>(&a.body);
  const auto* eb = std::get_if<std::shared_ptr<const Expr>>(&b.body);
  if (static_cast<bool>(ea) != static_cast<bool>(eb)) return false;
  if (ea) {
    const Expr& x = **ea;
    const Expr& y = **eb;
    if (x.kind != y.kind || x.param != y.param || x.count != y.count ||
        x.orient != y.orient || x.children.size() != y.children.size())
      return false;
    for (size_t i = 0; i < x.children.size(); ++i)
      if (!(x.children[i] == y.children[i])) return false;
    return true;
  }
  const auto& ta = *std::get<std::shared_ptr<const SampleTable>>(a.body);
  const auto& tbm = *std::get<std::shared_ptr<const SampleTable>>(b.body);
  if (ta.times != tbm.times || ta.matrices.size() != tbm.matrices.size())
    return false;
  for (size_t i = 0; i < ta.matrices.size(); ++i)
    if (ta.matrices[i] != tbm.matrices[i]) return false;
  return true;
}

std::vector<double> derivative_breakpoints(const SymplecticPath& p) {
  std::vector<double> bp;
  collect_breakpoints(p, 0.0, 1.0, &bp);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end(),
                       [](double x, double y) { return std::abs(x - y) < 1e-12; }),
           bp.end());
  std::erase_if(bp, [](double x) { return x < 1e-12 || x > 1.0 - 1e-12; });
  return bp;
}

double local_sample_step(const SymplecticPath& p, double t) {
  if (const auto* e = std::get_if<std::shared_ptr<const Expr>>(&p.body)) {
    double worst = 0.0;
    const Expr& x = **e;
    switch (x.kind) {
      case Expr::Kind::direct_sum:
        for (const auto& c : x.children)
          worst = std::max(worst, local_sample_step(c, t));
        return worst;
      case Expr::Kind::concatenate: {
        const int k = static_cast<int>(x.children.size());
        const auto [idx, s] = subdivide(t, k);
        return local_sample_step(x.children[idx], s);
      }
      case Expr::Kind::iterate: {
        const auto [idx, s] = subdivide(t, x.count);
        (void)idx;
        return local_sample_step(x.children[0], s);
      }
      case Expr::Kind::loop_twist:
        return local_sample_step(x.children[0], t);
      default:
        return 0.0;
    }
  }
  const auto& tb = *std::get<std::shared_ptr<const SampleTable>>(p.body);
  const int i = bracket(tb.times, t);
  double step = (tb.matrices[i + 1] - tb.matrices[i]).cwiseAbs().maxCoeff();
  if (i + 2 < static_cast<int>(tb.matrices.size()))
    step = std::max(step,
                    (tb.matrices[i + 2] - tb.matrices[i + 1]).cwiseAbs().maxCoeff());
  if (i > 0)
    step = std::max(step,
                    (tb.matrices[i] - tb.matrices[i - 1]).cwiseAbs().maxCoeff());
  return step;
}

}  // namespace sft
