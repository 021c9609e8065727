#include "sft/maslov.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sft/errors.hpp"

namespace sft {
namespace {

// Crossings are located in three passes. A doubling grid census finds the
// regions where f(t) = det(A(t) - Id) changes sign or dips toward zero; each
// hot region is rescanned at zoom resolution; every refined zero must then
// match the local vanishing order of f against its kernel dimension, and a
// mismatch zooms in further, so two nearby crossings cannot masquerade as
// one. Zeros closer than the kernel tolerance share kernel directions and are
// merged back into a single contribution.
constexpr int kGridStart = 256;
constexpr int kGridMax = 8192;
constexpr int kZoomSamples = 256;
constexpr int kZoomDepth = 3;
constexpr int kChunkCells = 32;
constexpr double kBisectWidth = 1e-9;
constexpr double kGoldenWidth = 1e-10;
constexpr double kMergeRadius = 1e-8;
constexpr double kSeamRadius = 1e-7;
constexpr double kKernelSpan = 1e-4;
constexpr double kOrderSlack = 0.4;

struct GridCensus {
  int samples = 0;
  std::vector<double> values;               // f at i/samples
  double fscale = 0.0;                      // max |f| over the grid
  int basin_end = 0;                        // first index past the t=0 zero basin
  std::vector<int> sign_intervals;          // i: f changes sign on [t_i, t_{i+1}]
  std::vector<std::pair<int, int>> minima;  // merged runs of local minima of |f|
};

class Detector {
 public:
  Detector(const SymplecticPath& p, double tol) : p_(p), tol_(tol) {}

  int run() {
    if (std::abs(f(1.0)) <= tol_)
      fail(Errc::degenerate_endpoint, "det(A(1) - Id) is within tolerance of zero");

    seams_ = derivative_breakpoints(p_);

    int twice_mu = start_signature();

    GridCensus census = stabilize_grid();
    fscale_ = census.fscale;

    // widen every candidate into a window of hot cells and coalesce overlaps
    std::vector<std::pair<int, int>> hot;
    for (int i : census.sign_intervals) hot.push_back({i - 2, i + 3});
    for (const auto& run : census.minima)
      hot.push_back({run.first - 2, run.second + 2});
    std::sort(hot.begin(), hot.end());

    std::vector<double> crossings;
    for (std::size_t j = 0; j < hot.size();) {
      int lo = hot[j].first;
      int hi = hot[j].second;
      std::size_t k = j + 1;
      while (k < hot.size() && hot[k].first <= hi) {
        hi = std::max(hi, hot[k].second);
        ++k;
      }
      lo = std::max(lo, census.basin_end);
      hi = std::min(hi, census.samples);
      // wide windows are rescanned in overlapping chunks so the zoom never
      // runs coarser than the census that built them
      for (int start = lo; start < hi; start += kChunkCells - 2) {
        const int stop = std::min(start + kChunkCells, hi);
        zoom_collect(static_cast<double>(start) / census.samples,
                     static_cast<double>(stop) / census.samples, 0, crossings);
        if (stop == hi) break;
      }
      j = k;
    }

    std::sort(crossings.begin(), crossings.end());
    crossings.erase(std::unique(crossings.begin(), crossings.end(),
                                [](double a, double b) {
                                  return std::abs(a - b) < kMergeRadius;
                                }),
                    crossings.end());
    merge_shared_kernels(crossings);

    for (double t : crossings) {
      for (double s : seams_)
        if (std::abs(t - s) < kSeamRadius)
          fail(Errc::irregular_crossing,
               "crossing sits on a derivative discontinuity");
      twice_mu += 2 * crossing_signature(t);
    }

    if (twice_mu % 2 != 0)
      fail(Errc::internal_inconsistency, "crossing contributions have odd parity");
    return twice_mu / 2;
  }

 private:
  double f(double t) const {
    Mat a = path_eval(p_, t);
    for (int i = 0; i < p_.dim; ++i) a(i, i) -= 1.0;
    return a.determinant();
  }

  Mat form_matrix(double t) const {
    const Mat q = standard_J(p_.dim).transpose() * path_derivative(p_, t);
    return 0.5 * (q + q.transpose());
  }

  // Floor below which a refined |f| minimum counts as an exact zero. Sampled
  // paths contribute an interpolation term: the chord sags below the true
  // path by about step^2/8 per entry, and near a tangential crossing that
  // defect enters f quadratically, scaled by the nonvanishing cofactor.
  double zero_floor(double t) const {
    double floor = 1e-9 * std::max(fscale_, 1.0);
    const double step = local_sample_step(p_, t);
    if (step > 0.0)
      floor = std::max(floor, 0.0625 * std::pow(step, 4) * std::max(fscale_, 1.0));
    return floor;
  }

  // Signature of the quadratic form at t=0, taken on the full space since
  // A(0) = Id. A zero eigenvalue means the start crossing is not regular.
  // Sampled paths only offer a one-sided difference at t=0, whose error is
  // about step * |Q| / 2.
  int start_signature() const {
    const Mat q0 = form_matrix(0.0);
    Eigen::SelfAdjointEigenSolver<Mat> es(q0);
    const auto& ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    double floor = 1e-8 * std::max(top, 1.0);
    const double step = local_sample_step(p_, 0.0);
    if (step > 0.0)
      floor = std::max(floor, step * std::max(1.0, q0.cwiseAbs().maxCoeff()));
    int sig = 0;
    for (int i = 0; i < ev.size(); ++i) {
      if (std::abs(ev[i]) <= floor)
        fail(Errc::irregular_crossing, "crossing form at t=0 is degenerate");
      sig += ev[i] > 0.0 ? 1 : -1;
    }
    return sig;
  }

  GridCensus scan(int samples) const {
    GridCensus c;
    c.samples = samples;
    c.values.resize(samples + 1);
    for (int i = 0; i <= samples; ++i)
      c.values[i] = f(static_cast<double>(i) / samples);
    for (double v : c.values) c.fscale = std::max(c.fscale, std::abs(v));

    const double basin_floor = 1e-9 * std::max(c.fscale, 1.0);
    int i0 = 0;
    while (i0 <= samples && std::abs(c.values[i0]) <= basin_floor) ++i0;
    c.basin_end = i0;

    std::vector<char> near_sign_change(samples + 1, 0);
    for (int i = std::max(i0, 0); i < samples; ++i) {
      if (c.values[i] * c.values[i + 1] < 0.0) {
        c.sign_intervals.push_back(i);
        for (int k = i - 1; k <= i + 2; ++k)
          if (k >= 0 && k <= samples) near_sign_change[k] = 1;
      }
    }

    std::vector<int> raw;
    for (int i = std::max(i0, 1); i < samples; ++i) {
      const double v = std::abs(c.values[i]);
      if (near_sign_change[i]) continue;
      if (v >= 0.3 * c.fscale) continue;
      if (v <= std::abs(c.values[i - 1]) && v <= std::abs(c.values[i + 1]))
        raw.push_back(i);
    }
    // plateaus and off-by-one rediscoveries collapse to one run
    for (std::size_t j = 0; j < raw.size();) {
      std::size_t k = j;
      while (k + 1 < raw.size() && raw[k + 1] - raw[k] <= 2) ++k;
      c.minima.push_back({raw[j], raw[k]});
      j = k + 1;
    }
    return c;
  }

  GridCensus stabilize_grid() const {
    GridCensus prev;
    bool have_prev = false;
    for (int n = kGridStart; n <= kGridMax; n *= 2) {
      GridCensus cur = scan(n);
      if (have_prev &&
          prev.sign_intervals.size() == cur.sign_intervals.size() &&
          prev.minima.size() == cur.minima.size())
        return cur;
      prev = std::move(cur);
      have_prev = true;
    }
    fail(Errc::unresolved_crossing,
         "crossing census does not stabilize under grid refinement");
  }

  double bisect(double a, double b, double fa, double fb) const {
    (void)fb;
    while (b - a > kBisectWidth) {
      const double m = 0.5 * (a + b);
      const double fm = f(m);
      if (fm == 0.0) return m;
      if ((fm > 0.0) == (fa > 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  }

  double golden_min(double a, double b) const {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = std::abs(f(c));
    double fd = std::abs(f(d));
    while (b - a > kGoldenWidth) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = std::abs(f(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = std::abs(f(d));
      }
    }
    return 0.5 * (a + b);
  }

  // Rescan a window at zoom resolution: bisect every sign change, golden-
  // refine every dip of |f|, and push the survivors through the order check.
  // An unclassifiable near-zero gets one more zoom before it is an error.
  void zoom_collect(double a, double b, int depth,
                    std::vector<double>& out) const {
    const int m = kZoomSamples;
    const double h = (b - a) / m;
    std::vector<double> v(m + 1);
    for (int j = 0; j <= m; ++j) v[j] = f(a + h * j);

    std::vector<char> root_cell(m + 1, 0);
    for (int j = 0; j < m; ++j) {
      if (v[j] * v[j + 1] < 0.0) {
        root_cell[j] = root_cell[j + 1] = 1;
        verify(bisect(a + h * j, a + h * (j + 1), v[j], v[j + 1]), h, depth,
               out);
      }
    }

    std::vector<int> raw;
    for (int j = 1; j < m; ++j) {
      if (root_cell[j]) continue;
      const double w = std::abs(v[j]);
      if (w <= std::abs(v[j - 1]) && w <= std::abs(v[j + 1])) raw.push_back(j);
    }
    for (std::size_t j = 0; j < raw.size();) {
      std::size_t k = j;
      while (k + 1 < raw.size() && raw[k + 1] - raw[k] <= 2) ++k;
      const double lo = std::max(a, a + h * (raw[j] - 1));
      const double hi = std::min(b, a + h * (raw[k] + 1));
      const double t = golden_min(lo, hi);
      const double fmin = std::abs(f(t));
      const double floor = zero_floor(t);
      if (fmin <= floor) {
        verify(t, h, depth, out);
      } else if (fmin <= 100.0 * floor) {
        if (depth < kZoomDepth)
          zoom_collect(std::max(0.0, t - 6.0 * h), std::min(1.0, t + 6.0 * h),
                       depth + 1, out);
        else
          fail(Errc::unresolved_crossing,
               "near-zero of det(A(t) - Id) cannot be classified at working precision");
      }
      j = k + 1;
    }
  }

  // At an isolated regular crossing f vanishes to order exactly the kernel
  // dimension. Probing |f| at r and r/2 on each side measures the apparent
  // order over that radius; any mismatch means another zero hides within
  // reach, so the neighborhood is rescanned one level deeper. Past the depth
  // cap the kernel tolerance absorbs whatever remains unresolved.
  void verify(double t0, double h, int depth, std::vector<double>& out) const {
    if (depth >= kZoomDepth) {
      out.push_back(t0);
      return;
    }
    const int kdim = kernel_dim(t0, nullptr);
    bool clean = true;
    for (int side : {-1, 1}) {
      const double room = side > 0 ? 1.0 - t0 : t0;
      const double r = std::min(2.0 * h, 0.5 * room);
      if (r <= 64.0 * kGoldenWidth) continue;
      const double f1 = std::abs(f(t0 + side * r));
      const double f2 = std::abs(f(t0 + side * 0.5 * r));
      if (f1 == 0.0 || f2 == 0.0 ||
          std::abs(std::log2(f1 / f2) - kdim) > kOrderSlack) {
        clean = false;
        break;
      }
    }
    if (clean) {
      out.push_back(t0);
      return;
    }
    zoom_collect(std::max(0.0, t0 - 6.0 * h), std::min(1.0, t0 + 6.0 * h),
                 depth + 1, out);
  }

  // Dimension of the numerical kernel of A(t) - Id; fills the orthonormal
  // kernel basis when requested. Tables widen the tolerance: the interpolant
  // is off by about step^2/8 per entry.
  int kernel_dim(double t, Mat* basis) const {
    Mat b = path_eval(p_, t);
    const double anorm = b.cwiseAbs().maxCoeff();
    for (int i = 0; i < p_.dim; ++i) b(i, i) -= 1.0;
    const double step = local_sample_step(p_, t);
    double ktol = 1e-6 * std::max(1.0, anorm);
    if (step > 0.0) ktol = std::max(ktol, 0.5 * step * step);

    const unsigned opts = basis ? unsigned(Eigen::ComputeFullV) : 0u;
    Eigen::JacobiSVD<Mat> svd(b, opts);
    const auto& sv = svd.singularValues();
    int kdim = 0;
    for (int i = 0; i < sv.size(); ++i) {
      const double s = sv[i];
      if (s < ktol)
        ++kdim;
      else if (s < 10.0 * ktol)
        fail(Errc::irregular_crossing, "kernel dimension at crossing is ambiguous");
    }
    if (kdim == 0)
      fail(Errc::unresolved_crossing,
           "located crossing has no numerical kernel at working precision");
    if (basis) *basis = svd.matrixV().rightCols(kdim);
    return kdim;
  }

  // Nearby zeros whose kernels coincide are one crossing seen twice, for
  // example the two interpolation roots a sampled tangential crossing leaves
  // around its true time. Genuinely distinct crossings this close keep
  // disjoint kernels, so the principal angle separates the two cases.
  void merge_shared_kernels(std::vector<double>& ts) const {
    if (ts.size() < 2) return;
    std::vector<double> kept;
    Mat prev_basis;
    bool have_basis = false;
    for (double t : ts) {
      if (kept.empty() || t - kept.back() >= kKernelSpan) {
        kept.push_back(t);
        have_basis = false;
        continue;
      }
      if (!have_basis) {
        kernel_dim(kept.back(), &prev_basis);
        have_basis = true;
      }
      Mat basis;
      kernel_dim(t, &basis);
      const double overlap = Eigen::JacobiSVD<Mat>(prev_basis.transpose() * basis)
                                 .singularValues()
                                 .maxCoeff();
      if (overlap > 0.9) continue;
      if (overlap > 0.5)
        fail(Errc::irregular_crossing,
             "nearby crossings share kernel directions at working precision");
      kept.push_back(t);
      prev_basis = basis;
    }
    ts = kept;
  }

  // Signature of the crossing form restricted to ker(A(t) - Id).
  int crossing_signature(double t) const {
    Mat basis;
    kernel_dim(t, &basis);
    const Mat ad = path_derivative(p_, t);
    const double w = std::max(1.0, ad.cwiseAbs().maxCoeff());
    const double step = local_sample_step(p_, t);
    const Mat q = standard_J(p_.dim).transpose() * ad;
    const Mat qs = 0.5 * (q + q.transpose());
    const Mat g = basis.transpose() * qs * basis;
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    const auto& ev = es.eigenvalues();
    const double top = std::max(1.0, ev.cwiseAbs().maxCoeff());
    double floor = 1e-8 * top;
    if (step > 0.0) floor = std::max(floor, step * step * w);
    int sig = 0;
    for (int i = 0; i < ev.size(); ++i) {
      if (std::abs(ev[i]) <= floor)
        fail(Errc::irregular_crossing, "crossing form is degenerate on the kernel");
      sig += ev[i] > 0.0 ? 1 : -1;
    }
    return sig;
  }

  const SymplecticPath& p_;
  double tol_;
  double fscale_ = 1.0;
  std::vector<double> seams_;
};

}  // namespace

int maslov_index_rs(const SymplecticPath& path, double tol) {
  return Detector(path, tol).run();
}

}  // namespace sft
