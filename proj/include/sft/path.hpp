#pragma once

#include <Eigen/Dense>
#include <memory>
#include <variant>
#include <vector>

namespace sft {

using Mat = Eigen::MatrixXd;

// Defaults shared across the library; both overridable per call.
constexpr double kSymplecticTol = 1e-8;  // matrix invariant tolerance
constexpr double kNondegTol = 1e-6;      // nondegeneracy tolerance

// Standard complex structure, block-diagonal [[0,-1],[1,0]] in the ordered
// basis x1,y1,...,xm,ym. The symplectic form is omega(u,v) = <J u, v>.
Mat standard_J(int dim);

// max-norm of A^T J A - J
double symplectic_defect(const Mat& a);

// Checks the SymplecticMatrix invariants: defect and |det - 1| within tol.
bool is_symplectic(const Mat& a, double tol = kSymplecticTol);

enum class Orientation { positive_puncture, negative_puncture };

struct Expr;

// Stored samples of a path: strictly increasing times 0 = t_0 < ... < t_N = 1
// with a validated symplectic matrix at each. Evaluation between samples is
// entrywise linear with a defect re-check; no geodesic correction.
struct SampleTable {
  std::vector<double> times;
  std::vector<Mat> matrices;
  double tol = kSymplecticTol;  // tolerance the samples were validated at
};

// A path in Symp(2m) on normalized parameter t in [0,1], starting at Id.
struct SymplecticPath {
  int dim = 2;
  std::variant<std::shared_ptr<const Expr>, std::shared_ptr<const SampleTable>>
      body;
};

// Closed-form bodies. Children are whole paths, so tables may sit under
// sum/concat/twist/iterate nodes.
struct Expr {
  enum class Kind {
    rotation,             // R(2*pi*theta*t)
    positive_hyperbolic,  // diag(e^{at}, e^{-at})
    negative_hyperbolic,  // R(pi*t) * diag(e^{at}, e^{-at})
    shear,                // [[1, s*t],[0,1]]
    direct_sum,
    concatenate,          // uniform subdivision, left pieces run first
    loop_twist,           // RotAll(-/+ 2*pi*delta*t) * (Id_2 (+) A(t))
    iterate,              // A({mt}) * A(1)^floor(mt)
  };
  Kind kind;
  double param = 0.0;  // theta, stretch, slope, or twist rate
  int count = 1;       // iterate multiplicity
  Orientation orient = Orientation::positive_puncture;
  std::vector<SymplecticPath> children;
};

SymplecticPath rotation(double theta);
SymplecticPath positive_hyperbolic(double a);
SymplecticPath negative_hyperbolic(double a);
SymplecticPath shear(double slope);
SymplecticPath direct_sum(std::vector<SymplecticPath> parts);
SymplecticPath concatenate(std::vector<SymplecticPath> parts);
SymplecticPath twist(const SymplecticPath& base, double delta, Orientation o);
SymplecticPath iterate(const SymplecticPath& base, int m);
SymplecticPath sample_table(std::vector<double> times, std::vector<Mat> mats,
                            double tol = kSymplecticTol);

Mat path_eval(const SymplecticPath& p, double t);

// dA/dt: exact for expression bodies; central differences (interpolated
// between samples) for tables. One-sided at junctions/endpoints.
Mat path_derivative(const SymplecticPath& p, double t);

// true iff |det(A(1) - Id)| > tol
bool is_nondegenerate(const SymplecticPath& p, double tol = kNondegTol);

// Structural equality (exact parameter comparison; tables compare values).
bool operator==(const SymplecticPath& a, const SymplecticPath& b);
inline bool operator!=(const SymplecticPath& a, const SymplecticPath& b) {
  return !(a == b);
}

// Interior parameters where the derivative may jump (concat/iterate seams),
// sorted, without 0 and 1.
std::vector<double> derivative_breakpoints(const SymplecticPath& p);

// Largest consecutive-sample max-norm step of any table bracketing t;
// 0 for purely closed-form paths. Drives resolution floors downstream.
double local_sample_step(const SymplecticPath& p, double t);

}  // namespace sft
